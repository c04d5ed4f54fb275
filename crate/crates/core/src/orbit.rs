//! Sink/flow/source classification, regularity, shift orbits and the
//! structural checks on orbits and almost split sequences.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::homology::{ar_sequence, indecomposability, joint_support_disjoint, RayModule};
use crate::module::TreeModule;
use crate::reflection::{sigma, sigma_minus};
use crate::tree::{distance, Center, VertexWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Sink,
    Flow,
    Source,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Sink => "sink",
            Kind::Flow => "flow",
            Kind::Source => "source",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: Kind,
    pub center: Center,
    pub radius: usize,
    pub diameter: usize,
    pub diameter_path: Vec<VertexWord>,
}

/// Type, center and radius of the support tree under the module's
/// orientation. A single vertex is classified by its own sink/source
/// status.
pub fn classify(m: &TreeModule) -> Result<Classification> {
    m.require_unflipped()?;
    let shape = m.support_tree()?.shape();
    let kind = if shape.diameter % 2 == 1 {
        Kind::Flow
    } else if m.parity().is_sink(&shape.path[0]) {
        Kind::Sink
    } else {
        Kind::Source
    };
    Ok(Classification {
        kind,
        center: shape.center,
        radius: shape.radius,
        diameter: shape.diameter,
        diameter_path: shape.path,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    NotRegular,
}

/// Iteration cap for the Coxeter test.
pub const COXETER_CAP: usize = 64;

/// The Coxeter matrix Φ = [[-1, n], [-n, n²-1]] of K(n).
pub fn coxeter(n: i64) -> [[i64; 2]; 2] {
    [[-1, n], [-n, n * n - 1]]
}

/// Φ⁻¹ = [[n²-1, -n], [n, -1]].
pub fn coxeter_inverse(n: i64) -> [[i64; 2]; 2] {
    [[n * n - 1, -n], [n, -1]]
}

pub fn apply(m: [[i64; 2]; 2], v: [i64; 2]) -> Option<[i64; 2]> {
    let row = |r: [i64; 2]| r[0].checked_mul(v[0])?.checked_add(r[1].checked_mul(v[1])?);
    Some([row(m[0])?, row(m[1])?])
}

/// Decides regularity of an indecomposable module from its push-down
/// dimension vector by iterating Φ and Φ⁻¹.
pub fn is_regular(m: &TreeModule) -> Result<Regularity> {
    if m.is_zero() {
        return Err(Error::ZeroModule);
    }
    if !indecomposability(m)?.is_indecomposable() {
        return Err(Error::Decomposable);
    }
    let k = m.pushdown()?;
    coxeter_verdict(m.n() as i64, [k.d1 as i64, k.d2 as i64])
}

/// Regularity verdict for a dimension vector of an indecomposable.
pub fn coxeter_verdict(n: i64, dims: [i64; 2]) -> Result<Regularity> {
    if dims.iter().any(|&x| x <= 0) {
        return Ok(Regularity::NotRegular);
    }
    for mat in [coxeter(n), coxeter_inverse(n)] {
        let mut v = dims;
        let mut increases = 0;
        let mut settled = false;
        for _ in 0..COXETER_CAP {
            let Some(next) = apply(mat, v) else {
                return Err(Error::RegularityUndetermined(COXETER_CAP));
            };
            if next.iter().any(|&x| x <= 0) {
                return Ok(Regularity::NotRegular);
            }
            if next[0] > v[0] && next[1] > v[1] {
                increases += 1;
            } else {
                increases = 0;
            }
            v = next;
            if increases == 3 {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(Error::RegularityUndetermined(COXETER_CAP));
        }
    }
    Ok(Regularity::Regular)
}

/// Steps allowed when searching for the minimal sink module.
pub const LOCATE_CAP: usize = 64;

/// The minimal-radius sink module of the orbit, and the index of `m`
/// relative to it.
fn locate_m0(m: &TreeModule) -> Result<(TreeModule, i64)> {
    let c = classify(m)?;
    let mut cur = m.clone();
    if c.kind == Kind::Sink {
        for steps in 0..LOCATE_CAP {
            let next = sigma(&cur)?;
            if next.is_zero() {
                return Err(Error::NotRegular);
            }
            if classify(&next)?.kind != Kind::Sink {
                return Ok((cur, -(steps as i64)));
            }
            cur = next;
        }
    } else {
        for steps in 1..=LOCATE_CAP {
            cur = sigma_minus(&cur)?;
            if cur.is_zero() {
                return Err(Error::NotRegular);
            }
            if classify(&cur)?.kind == Kind::Sink {
                return Ok((cur, steps as i64));
            }
        }
    }
    Err(Error::Horizon(format!(
        "no sink-to-flow transition within {LOCATE_CAP} shifts"
    )))
}

/// ι(m): the t with m = σᵗ M₀.
pub fn index_of(m: &TreeModule) -> Result<i64> {
    Ok(locate_m0(m)?.1)
}

/// r₀ of the orbit of `m`.
pub fn minimal_sink_radius(m: &TreeModule) -> Result<usize> {
    Ok(classify(&locate_m0(m)?.0)?.radius)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    pub index: i64,
    pub dims: String,
    pub total_dim: usize,
    pub kind: Kind,
    pub radius: usize,
    pub diameter: usize,
    pub center: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub records: Vec<OrbitRecord>,
    pub r0: usize,
    pub b: usize,
    pub center_path: Vec<VertexWord>,
    pub iota_of_input: i64,
    pub p: VertexWord,
    pub q: VertexWord,
    pub back: usize,
    pub fwd: usize,
    pub note: String,
    #[serde(skip)]
    classifications: Vec<(i64, Classification)>,
}

impl OrbitReport {
    /// Classifications by index, for callers running further checks.
    pub fn classifications(&self) -> &[(i64, Classification)] {
        &self.classifications
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "iota(input) = {}   r0 = {}   b = {}   p = {}   q = {}",
            self.iota_of_input,
            self.r0,
            self.b,
            self.p.display_name(),
            self.q.display_name()
        );
        let path: Vec<String> = self.center_path.iter().map(|v| v.display_name()).collect();
        let _ = writeln!(s, "center path: ({})", path.join(", "));
        let _ = writeln!(
            s,
            "{:>5}  {:<6}  {:>2}  {:>2}  {:<16}  {:>3}  dims",
            "i", "type", "r", "d", "center", "dim"
        );
        for r in &self.records {
            let _ = writeln!(
                s,
                "{:>5}  {:<6}  {:>2}  {:>2}  {:<16}  {:>3}  {}",
                r.index,
                r.kind.to_string(),
                r.radius,
                r.diameter,
                r.center,
                r.total_dim,
                r.dims
            );
        }
        let _ = writeln!(s, "note: {}", self.note);
        s
    }
}

fn falsify(claim: String, m: &TreeModule, extra: serde_json::Value) -> Error {
    Error::falsified(claim, json!({ "module": m.to_file(), "details": extra }))
}

/// Shift orbit of a regular indecomposable over the horizon
/// `[-back, fwd]` around M₀, with every pattern invariant verified.
/// `fwd = None` means `b + 4`.
pub fn orbit_report(m: &TreeModule, back: usize, fwd: Option<usize>) -> Result<OrbitReport> {
    if is_regular(m)? != Regularity::Regular {
        return Err(Error::NotRegular);
    }
    let (m0, iota) = locate_m0(m)?;
    let c0 = classify(&m0)?;
    let r0 = c0.radius;
    let Center::Vertex(a0) = c0.center.clone() else {
        return Err(falsify(
            "the minimal sink module has a vertex center".into(),
            m,
            json!({}),
        ));
    };
    // forward: flows then sources
    let mut forward: Vec<(TreeModule, Classification)> = Vec::new();
    let mut cur = m0.clone();
    let mut b = 0;
    loop {
        cur = sigma(&cur)?;
        if cur.is_zero() {
            return Err(falsify(
                "regular modules never vanish under σ".into(),
                m,
                json!({}),
            ));
        }
        let c = classify(&cur)?;
        let is_flow = c.kind == Kind::Flow;
        forward.push((cur.clone(), c));
        if !is_flow {
            break;
        }
        b += 1;
        if b > LOCATE_CAP {
            return Err(Error::Horizon("flow run exceeds the cap".into()));
        }
    }
    let fwd = fwd.unwrap_or(b + 4).max(b + 1);
    while forward.len() < fwd {
        cur = sigma(&cur)?;
        if cur.is_zero() {
            return Err(falsify(
                "regular modules never vanish under σ".into(),
                m,
                json!({}),
            ));
        }
        let c = classify(&cur)?;
        forward.push((cur.clone(), c));
    }
    forward.truncate(fwd);
    let mut backward: Vec<(TreeModule, Classification)> = Vec::new();
    cur = m0.clone();
    for _ in 0..back {
        cur = sigma_minus(&cur)?;
        if cur.is_zero() {
            return Err(falsify(
                "regular modules never vanish under σ⁻".into(),
                m,
                json!({}),
            ));
        }
        let c = classify(&cur)?;
        backward.push((cur.clone(), c));
    }
    let mut entries: Vec<(i64, TreeModule, Classification)> = Vec::new();
    for (i, (mm, c)) in backward.into_iter().enumerate().rev() {
        entries.push((-(i as i64) - 1, mm, c));
    }
    entries.push((0, m0.clone(), c0.clone()));
    for (i, (mm, c)) in forward.into_iter().enumerate() {
        entries.push((i as i64 + 1, mm, c));
    }

    let mut violations: Vec<String> = Vec::new();
    // center path from the chained flow edge-centers
    let mut path = vec![a0.clone()];
    for (i, _, c) in &entries {
        if *i < 1 || *i > b as i64 {
            continue;
        }
        let last = path.last().unwrap().clone();
        match &c.center {
            Center::Edge(u, v) if *u == last => path.push(v.clone()),
            Center::Edge(u, v) if *v == last => path.push(u.clone()),
            other => {
                violations.push(format!(
                    "flow {i}: center {other} does not continue the path at {}",
                    last.display_name()
                ));
                break;
            }
        }
    }
    let q = path.last().unwrap().clone();
    let distinct: std::collections::BTreeSet<&VertexWord> = path.iter().collect();
    if distinct.len() != path.len() {
        violations.push("center path repeats a vertex".into());
    }
    if violations.is_empty() && distance(&a0, &q) != b {
        violations.push(format!("b = {b} but d(p, q) = {}", distance(&a0, &q)));
    }
    if r0 == 0 {
        violations.push("r0 must be positive".into());
    }
    if b > r0 {
        violations.push(format!("b = {b} exceeds r0 = {r0}"));
    }
    let a0_sink = m0.parity().is_sink(&a0);
    if (r0 % 2 == 0) != a0_sink {
        violations.push(format!(
            "r0 = {r0} but a0 = {} is a {}",
            a0.display_name(),
            if a0_sink { "sink" } else { "source" }
        ));
    }
    for (i, _, c) in &entries {
        let i = *i;
        let (kind, radius, center) = if i <= 0 {
            (
                Kind::Sink,
                r0 + (-i) as usize,
                Some(Center::Vertex(a0.clone())),
            )
        } else if i <= b as i64 {
            let k = i as usize;
            (
                Kind::Flow,
                r0.saturating_sub(1),
                path.get(k)
                    .map(|v| Center::edge(path[k - 1].clone(), v.clone())),
            )
        } else {
            (
                Kind::Source,
                r0 + (i as usize - b - 1),
                Some(Center::Vertex(q.clone())),
            )
        };
        if c.kind != kind || c.radius != radius || center.as_ref() != Some(&c.center) {
            violations.push(format!(
                "index {i}: expected {kind} r={radius} center {}, found {} r={} center {}",
                center.map_or("?".into(), |c| c.to_string()),
                c.kind,
                c.radius,
                c.center
            ));
        }
    }
    let records: Vec<OrbitRecord> = entries
        .iter()
        .map(|(i, mm, c)| OrbitRecord {
            index: *i,
            dims: mm.dims_summary(),
            total_dim: mm.total_dim(),
            kind: c.kind,
            radius: c.radius,
            diameter: c.diameter,
            center: c.center.to_string(),
        })
        .collect();
    if !violations.is_empty() {
        return Err(falsify(
            format!("orbit pattern violated: {}", violations.join("; ")),
            m,
            json!({ "records": records }),
        ));
    }
    Ok(OrbitReport {
        records,
        r0,
        b,
        center_path: path,
        iota_of_input: iota,
        p: a0,
        q,
        back,
        fwd,
        note: format!(
            "uniqueness of M0 is certified on indices {}..={} only",
            -(back as i64),
            fwd
        ),
        classifications: entries.into_iter().map(|(i, _, c)| (i, c)).collect(),
    })
}

/// Which transition rule described the step `m -> σm`.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionReport {
    pub from: Kind,
    pub to: Kind,
    pub clause: &'static str,
    pub d_before: usize,
    pub d_after: usize,
}

/// The endpoint pair `(a_r, a_{r+1})` of a flow module's center edge,
/// with `a_r` on the side of the sink end of its diameter paths.
fn flow_center_ends(m: &TreeModule, c: &Classification) -> Option<(VertexWord, VertexWord)> {
    let Center::Edge(u, v) = &c.center else {
        return None;
    };
    let want_sink = c.radius.is_multiple_of(2);
    if m.parity().is_sink(u) == want_sink {
        Some((u.clone(), v.clone()))
    } else {
        Some((v.clone(), u.clone()))
    }
}

/// Whether `w` continues some diameter path of the flow module `m`
/// beyond `a1 = a_{r+1}`.
fn continues_diameter(
    m: &TreeModule,
    c: &Classification,
    a0: &VertexWord,
    a1: &VertexWord,
    w: &VertexWord,
) -> bool {
    if w == a0 || distance(a1, w) != 1 {
        return false;
    }
    let Ok(tree) = m.support_tree() else {
        return false;
    };
    if !tree.contains(w) {
        return false;
    }
    let reach = tree
        .vertices()
        .iter()
        .filter(|v| distance(v, a1) == distance(v, w) + 1)
        .map(|v| distance(v, a1))
        .max()
        .unwrap_or(0);
    reach == c.radius
}

/// Matches the step `m -> σm` against the transition rules.
pub fn transition_check(m: &TreeModule) -> Result<TransitionReport> {
    let c = classify(m)?;
    let s = sigma(m)?;
    if s.is_zero() {
        return Err(Error::NotRegular);
    }
    let cs = classify(&s)?;
    let (d, ds) = (c.diameter, cs.diameter);
    let clause = match (c.kind, cs.kind) {
        (Kind::Sink, Kind::Sink) if cs.center == c.center && ds + 2 == d => {
            Some("sink->sink: same center, diameter d-2")
        }
        (Kind::Sink, Kind::Flow)
            if c.center.vertices().iter().all(|v| cs.center.contains(v)) && ds + 1 == d =>
        {
            Some("sink->flow: center contains c, diameter d-1")
        }
        (Kind::Sink, Kind::Source) if cs.center == c.center && ds == d => {
            Some("sink->source: same center, diameter d")
        }
        (Kind::Flow, Kind::Flow) if ds == d => flow_center_ends(m, &c).and_then(|(a0, a1)| {
            let Center::Edge(x, y) = &cs.center else {
                return None;
            };
            let w = if *x == a1 {
                y
            } else if *y == a1 {
                x
            } else {
                return None;
            };
            continues_diameter(m, &c, &a0, &a1, w)
                .then_some("flow->flow: center {a_(r+1), a_(r+2)}, diameter d")
        }),
        (Kind::Flow, Kind::Source) if ds == d + 1 => flow_center_ends(m, &c).and_then(|(_, a1)| {
            (cs.center == Center::Vertex(a1))
                .then_some("flow->source: center a_(r+1), diameter d+1")
        }),
        (Kind::Source, Kind::Source) if cs.center == c.center && cs.radius == c.radius + 1 => {
            Some("source->source: same center, radius r+1")
        }
        _ => None,
    };
    let bound_ok = c.kind != Kind::Sink || (ds <= d && ds + 2 >= d);
    match clause {
        Some(clause) if bound_ok => Ok(TransitionReport {
            from: c.kind,
            to: cs.kind,
            clause,
            d_before: d,
            d_after: ds,
        }),
        _ => Err(falsify(
            format!(
                "no transition rule matches {} (d={d}, center {}) -> {} (d={ds}, center {})",
                c.kind, c.center, cs.kind, cs.center
            ),
            m,
            json!({ "sigma": s.to_file() }),
        )),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MiddleTermReport {
    pub y_kind: Kind,
    pub y_radius: usize,
    pub y_center: String,
    pub sigma_z_kind: Kind,
    pub sigma_z_radius: usize,
    pub sigma_z_center: String,
    pub summands: usize,
    pub summand_radii: Vec<usize>,
    pub iota_z: i64,
    pub summand_iotas: Vec<i64>,
    pub disjoint_supports: bool,
}

/// Checks the shape of the middle term of the almost split sequence
/// ending in `z` against σz.
pub fn middle_term_check(z: &TreeModule) -> Result<MiddleTermReport> {
    let ar = ar_sequence(z)?;
    let sz = sigma(z)?;
    let csz = classify(&sz)?;
    let mods = ar.summand_modules();
    let mut violations = Vec::new();
    if mods.len() > 2 {
        violations.push(format!("{} summands, at most two allowed", mods.len()));
    }
    let cls: Vec<Classification> = mods.iter().map(|m| classify(m)).collect::<Result<_>>()?;
    let y_radius = cls.iter().map(|c| c.radius).max().unwrap_or(0);
    let y_kind = cls[0].kind;
    let y_center = cls[0].center.clone();
    for c in &cls[1..] {
        if c.kind != y_kind {
            violations.push(format!("summand types differ: {} and {}", y_kind, c.kind));
        }
        if c.center != y_center {
            violations.push(format!(
                "summand centers differ: {} and {}",
                y_center, c.center
            ));
        }
    }
    if cls.len() == 2 && cls[0].radius.abs_diff(cls[1].radius) != 2 {
        violations.push(format!(
            "summand radii {} and {} differ by other than 2",
            cls[0].radius, cls[1].radius
        ));
    }
    if y_kind != csz.kind {
        violations.push(format!("type(Y) = {y_kind} but type(σz) = {}", csz.kind));
    }
    if y_center != csz.center {
        violations.push(format!("C(Y) = {y_center} but C(σz) = {}", csz.center));
    }
    if y_radius != csz.radius + 1 {
        violations.push(format!("r(Y) = {y_radius} but r(σz) = {}", csz.radius));
    }
    let iota_z = index_of(z)?;
    let iotas: Vec<i64> = mods.iter().map(|m| index_of(m)).collect::<Result<_>>()?;
    for (k, &i) in iotas.iter().enumerate() {
        if i != iota_z + 1 {
            violations.push(format!("ι(Y{}) = {i} but ι(z) = {iota_z}", k + 1));
        }
    }
    let disjoint = joint_support_disjoint(&ar.x, z)?;
    if disjoint && y_kind != Kind::Flow {
        violations.push(format!("T(σ²z) and T(z) are disjoint but Y is a {y_kind}"));
    }
    if !violations.is_empty() {
        return Err(falsify(
            format!("middle term check failed: {}", violations.join("; ")),
            z,
            ar.to_json_value(),
        ));
    }
    Ok(MiddleTermReport {
        y_kind,
        y_radius,
        y_center: y_center.to_string(),
        sigma_z_kind: csz.kind,
        sigma_z_radius: csz.radius,
        sigma_z_center: csz.center.to_string(),
        summands: mods.len(),
        summand_radii: cls.iter().map(|c| c.radius).collect(),
        iota_z,
        summand_iotas: iotas,
        disjoint_supports: disjoint,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub r0: usize,
    pub ql: usize,
    pub value: i64,
    pub r0_shifted: usize,
    pub value_shifted: i64,
}

/// r₀ − ql for a module of known quasi-length and for its shift.
pub fn component_invariant(ray: &RayModule) -> Result<ComponentReport> {
    let r0 = minimal_sink_radius(&ray.module)?;
    let shifted = sigma(&ray.module)?;
    let r0s = minimal_sink_radius(&shifted)?;
    let value = r0 as i64 - ray.ql as i64;
    let value_shifted = r0s as i64 - ray.ql as i64;
    if value != value_shifted {
        return Err(falsify(
            format!("r0 - ql changed under σ: {value} -> {value_shifted}"),
            &ray.module,
            json!({ "ql": ray.ql }),
        ));
    }
    Ok(ComponentReport {
        r0,
        ql: ray.ql,
        value,
        r0_shifted: r0s,
        value_shifted,
    })
}

/// Graphviz rendering of the support tree: sinks as filled boxes, sources
/// as circles, center vertices and center edge in red.
pub fn to_dot(m: &TreeModule, highlight_center: bool) -> Result<String> {
    let tree = m.support_tree()?;
    let center = if highlight_center {
        Some(classify(m)?.center)
    } else {
        None
    };
    let name = |v: &VertexWord| format!("\"{}\"", v.display_name());
    let mut s = String::from("graph module {\n");
    for v in tree.vertices() {
        let shape = if m.parity().is_sink(v) {
            "shape=box, style=filled, fillcolor=lightgray"
        } else {
            "shape=circle"
        };
        let red = center.as_ref().is_some_and(|c| c.contains(v));
        let _ = writeln!(
            s,
            "  {} [label=\"{}\\n{}\", {shape}{}];",
            name(v),
            v.display_name(),
            m.dim_at(v),
            if red {
                ", color=red, fontcolor=red"
            } else {
                ""
            }
        );
    }
    for v in tree.vertices() {
        let Some(p) = v.parent() else { continue };
        if !tree.contains(&p) {
            continue;
        }
        let (src, tgt) = m.edge_ends(v);
        let red = matches!(&center, Some(Center::Edge(a, b)) if (a == v && *b == p) || (b == v && *a == p));
        let _ = writeln!(
            s,
            "  {} -- {} [label=\"{}\", dir=forward{}];",
            name(&src),
            name(&tgt),
            v.last_label().unwrap(),
            if red { ", color=red" } else { "" }
        );
    }
    s.push_str("}\n");
    Ok(s)
}
