//! Seeded property suites. Every check returns `Err(Error::Falsified)`
//! with a counterexample bundle when a structural law fails.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::generators::{random_module, regular_suite, GenSpec};
use crate::homology::{
    end_radical, euler_form, ext1, hom_basis, iso_test, kronecker_iso, ray_module,
};
use crate::module::{Parity, TreeModule};
use crate::orbit::{
    apply, classify, component_invariant, coxeter, coxeter_inverse, middle_term_check,
    orbit_report, transition_check,
};
use crate::reflection::{sigma, sigma_kronecker, sigma_minus, sigma_minus_kronecker, sigma_power};
use crate::tree::{
    ball, distance, minimal_subtree, neighbors, translate, Center, FiniteTree, GroupElement,
    VertexWord,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Tree,
    Functor,
    Hom,
    Orbit,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Tree, Suite::Functor, Suite::Hom, Suite::Orbit],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Tree => "tree",
            Suite::Functor => "functor",
            Suite::Hom => "hom",
            Suite::Orbit => "orbit",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seeds: usize,
    pub base_seed: u64,
    pub gen: GenSpec,
}

/// One failed check.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub check: String,
    pub seed: u64,
    pub claim: String,
    pub bundle: serde_json::Value,
    /// True for a counterexample to a structural law, false for an error
    /// that kept the check from running.
    pub falsifier: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckTally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checks: BTreeMap<String, CheckTally>,
    pub failures: Vec<Failure>,
}

impl SuiteOutcome {
    fn new(suite: Suite) -> Self {
        SuiteOutcome {
            suite,
            checks: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn record(&mut self, check: &str, seed: u64, r: Result<()>) {
        let tally = self.checks.entry(check.to_string()).or_default();
        match r {
            Ok(()) => tally.passed += 1,
            Err(e) => {
                tally.failed += 1;
                let (claim, bundle, falsifier) = match e {
                    Error::Falsified { claim, bundle } => (claim, bundle, true),
                    other => (other.to_string(), serde_json::Value::Null, false),
                };
                self.failures.push(Failure {
                    check: check.to_string(),
                    seed,
                    claim,
                    bundle,
                    falsifier,
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = format!("suite {}\n", self.suite.name());
        for (name, t) in &self.checks {
            s.push_str(&format!(
                "  {:<28} {:>4} passed {:>4} failed\n",
                name, t.passed, t.failed
            ));
        }
        s
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<SuiteOutcome>> {
    suite
        .expand()
        .into_iter()
        .map(|s| run_one(s, cfg))
        .collect()
}

fn run_one(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new(suite);
    match suite {
        Suite::Tree => {
            for k in 0..cfg.seeds as u64 {
                let seed = cfg.base_seed + k;
                out.record("tree_shape", seed, check_tree_shape(seed, cfg.gen.n, 40));
                out.record("ball", seed, check_ball(seed, cfg.gen.n));
                out.record(
                    "translation_isometry",
                    seed,
                    check_translation(seed, cfg.gen.n),
                );
            }
        }
        Suite::Functor => {
            for (seed, m) in regular_suite(cfg.base_seed, cfg.seeds, &cfg.gen)? {
                out.record("quasi_inverse", seed, check_quasi_inverse(&m));
                out.record("commutation", seed, check_commutation(&m));
                out.record("support_ball", seed, check_support_ball(&m));
                out.record("coxeter_law", seed, check_coxeter(&m));
            }
        }
        Suite::Hom => {
            for k in 0..cfg.seeds as u64 {
                let seed = cfg.base_seed + k;
                out.record("euler_law", seed, check_euler_pair(seed, &cfg.gen));
            }
            for (seed, m) in regular_suite(cfg.base_seed, cfg.seeds, &cfg.gen)? {
                out.record("ext_end", seed, check_ext_end(&m));
                out.record("duality", seed, check_duality(&m));
            }
        }
        Suite::Orbit => {
            for (seed, m) in regular_suite(cfg.base_seed, cfg.seeds, &cfg.gen)? {
                out.record("orbit_pattern", seed, check_orbit(&m).map(|_| ()));
                out.record("transitions", seed, check_transitions(&m, 4, None));
                if is_brick(&m)? {
                    out.record("middle_term", seed, middle_term_check(&m).map(|_| ()));
                }
            }
        }
        Suite::All => unreachable!("expanded"),
    }
    Ok(out)
}

fn falsify(claim: String, m: &TreeModule, extra: serde_json::Value) -> Error {
    Error::falsified(claim, json!({ "module": m.to_file(), "details": extra }))
}

/// A random finite subtree of T(n) with at most `max_vertices` vertices,
/// grown from a random vertex.
pub fn random_subtree(seed: u64, n: usize, max_vertices: usize) -> FiniteTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7472_6565);
    let mut start = VertexWord::root();
    for _ in 0..rng.random_range(0..4) {
        let nb = neighbors(&start, n);
        start = nb[rng.random_range(0..nb.len())].0.clone();
    }
    let target = rng.random_range(1..=max_vertices.max(1));
    let mut verts = vec![start];
    let mut set: BTreeSet<VertexWord> = verts.iter().cloned().collect();
    while set.len() < target {
        let v = verts[rng.random_range(0..verts.len())].clone();
        let nb = neighbors(&v, n);
        let w = nb[rng.random_range(0..nb.len())].0.clone();
        if set.insert(w.clone()) {
            verts.push(w);
        }
    }
    minimal_subtree(set.iter()).expect("nonempty")
}

/// Eccentricities by BFS inside the subtree.
fn eccentricities(t: &FiniteTree) -> BTreeMap<VertexWord, usize> {
    t.vertices()
        .iter()
        .map(|s| {
            let mut seen = BTreeMap::from([(s.clone(), 0usize)]);
            let mut q = VecDeque::from([s.clone()]);
            while let Some(v) = q.pop_front() {
                let d = seen[&v];
                for w in t.tree_neighbors(&v) {
                    if !seen.contains_key(&w) {
                        seen.insert(w.clone(), d + 1);
                        q.push_back(w);
                    }
                }
            }
            (s.clone(), seen.values().copied().max().unwrap_or(0))
        })
        .collect()
}

/// Diameter, center and radius from all-pairs BFS distances.
pub fn brute_force_shape(t: &FiniteTree) -> (usize, Center, usize) {
    let ecc = eccentricities(t);
    let diameter = ecc.values().copied().max().unwrap_or(0);
    let e = ecc.values().copied().min().unwrap_or(0);
    let mids: Vec<VertexWord> = ecc
        .iter()
        .filter(|(_, &x)| x == e)
        .map(|(v, _)| v.clone())
        .collect();
    match mids.as_slice() {
        [c] => (diameter, Center::Vertex(c.clone()), e),
        [a, b] => (diameter, Center::edge(a.clone(), b.clone()), e - 1),
        _ => unreachable!("a tree has one or two central vertices"),
    }
}

pub fn check_tree_shape(seed: u64, n: usize, max_vertices: usize) -> Result<()> {
    let t = random_subtree(seed, n, max_vertices);
    let shape = t.shape();
    let (d, c, r) = brute_force_shape(&t);
    let path_ok = shape.path.len() == shape.diameter + 1
        && shape.path.windows(2).all(|w| distance(&w[0], &w[1]) == 1)
        && shape.path.iter().all(|v| t.contains(v));
    if (shape.diameter, &shape.center, shape.radius) != (d, &c, r) || !path_ok {
        return Err(Error::falsified(
            "double sweep disagrees with brute force",
            json!({
                "vertices": t.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "sweep": shape,
                "brute": { "diameter": d, "center": c, "radius": r },
            }),
        ));
    }
    Ok(())
}

pub fn check_ball(seed: u64, n: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6261_6c6c);
    let t = random_subtree(seed, n, 6);
    let verts: Vec<&VertexWord> = t.vertices().iter().collect();
    let a = verts[rng.random_range(0..verts.len())].clone();
    let center = match neighbors(&a, n).into_iter().find(|(w, _)| t.contains(w)) {
        Some((b, _)) if rng.random_bool(0.5) => Center::edge(a, b),
        _ => Center::Vertex(a),
    };
    let r = rng.random_range(0..3);
    let got: BTreeSet<VertexWord> = ball(&center, r, n).vertices().clone();
    // every word within reach, filtered by the closed-form distance
    let reach = center.vertices().iter().map(|v| v.len()).max().unwrap_or(0) + r;
    let mut all = vec![VertexWord::root()];
    let mut frontier = all.clone();
    for _ in 0..reach {
        let next: Vec<VertexWord> = frontier
            .iter()
            .flat_map(|v| {
                neighbors(v, n)
                    .into_iter()
                    .map(|(w, _)| w)
                    .filter(|w| w.len() > v.len())
            })
            .collect();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    let want: BTreeSet<VertexWord> = all
        .into_iter()
        .filter(|v| center.distance_to(v) <= r)
        .collect();
    if got != want {
        return Err(Error::falsified(
            "ball enumeration mismatch",
            json!({ "center": center, "r": r, "bfs": got.len(), "filtered": want.len() }),
        ));
    }
    Ok(())
}

pub fn check_translation(seed: u64, n: usize) -> Result<()> {
    let t = random_subtree(seed, n, 10);
    let verts: Vec<&VertexWord> = t.vertices().iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7472_616e);
    let mut labels = Vec::new();
    let len = 2 * rng.random_range(0..3);
    while labels.len() < len {
        let l = rng.random_range(1..=n as u32);
        if labels.last() != Some(&l) {
            labels.push(l);
        }
    }
    let g = GroupElement::new(VertexWord::from_labels(labels)?)?;
    for u in &verts {
        for v in &verts {
            if distance(&translate(u, &g), &translate(v, &g)) != distance(u, v) {
                return Err(Error::falsified(
                    "translation is not an isometry",
                    json!({ "g": g.word(), "u": u, "v": v }),
                ));
            }
        }
    }
    Ok(())
}

pub fn check_quasi_inverse(m: &TreeModule) -> Result<()> {
    let back = sigma_minus(&sigma(m)?)?;
    if iso_test(&back, m).is_none() {
        return Err(falsify(
            "σ⁻σm is not isomorphic to m".into(),
            m,
            json!({ "sigma_minus_sigma": back.to_file() }),
        ));
    }
    let fwd = sigma(&sigma_minus(m)?)?;
    if iso_test(&fwd, m).is_none() {
        return Err(falsify(
            "σσ⁻m is not isomorphic to m".into(),
            m,
            json!({ "sigma_sigma_minus": fwd.to_file() }),
        ));
    }
    Ok(())
}

/// Push-down of σm against σ' of the push-down, both in canonical form at
/// the reflected Kronecker vertex; likewise for σ⁻.
pub fn check_commutation(m: &TreeModule) -> Result<()> {
    let k = m.pushdown()?;
    let sink = m.parity().kronecker_sink();
    let lhs = sigma(m)?.pushdown()?.canonicalize_vertex(sink);
    let rhs = sigma_kronecker(&k);
    if lhs != rhs {
        return Err(falsify(
            "pushdown(σm) differs from σ'(pushdown m)".into(),
            m,
            json!({ "lhs": lhs.maps, "rhs": rhs.maps }),
        ));
    }
    let lhs = sigma_minus(m)?.pushdown()?.canonicalize_vertex(3 - sink);
    let rhs = sigma_minus_kronecker(&k);
    if lhs != rhs {
        return Err(falsify(
            "pushdown(σ⁻m) differs from σ'⁻(pushdown m)".into(),
            m,
            json!({ "lhs": lhs.maps, "rhs": rhs.maps }),
        ));
    }
    Ok(())
}

pub fn check_support_ball(m: &TreeModule) -> Result<()> {
    let c = classify(m)?;
    let b = ball(&c.center, c.radius + 1, m.n());
    let s = sigma(m)?;
    let outside: Vec<String> = s
        .support()
        .filter(|v| !b.contains(v))
        .map(|v| v.to_string())
        .collect();
    if !outside.is_empty() {
        return Err(falsify(
            "supp(σm) leaves B₊₁(m)".into(),
            m,
            json!({ "outside": outside }),
        ));
    }
    Ok(())
}

/// dim π(σ²m) = Φ·dim π(m) on σΩ-parity modules and Φ⁻¹·dim π(m) on
/// Ω-parity modules, in (d1, d2) coordinates.
pub fn check_coxeter(m: &TreeModule) -> Result<()> {
    let n = m.n() as i64;
    let k = m.pushdown()?;
    let k2 = sigma_power(m, 2)?.pushdown()?;
    let mat = match m.parity() {
        Parity::SigmaOmega => coxeter(n),
        Parity::Omega => coxeter_inverse(n),
    };
    let want = apply(mat, [k.d1 as i64, k.d2 as i64]);
    let got = [k2.d1 as i64, k2.d2 as i64];
    if want != Some(got) {
        return Err(falsify(
            "dimension vector of σ²m breaks the Coxeter law".into(),
            m,
            json!({ "before": [k.d1, k.d2], "after": got, "expected": want }),
        ));
    }
    Ok(())
}

/// A random ordered pair of modules sharing parity, checked against the
/// support-edge bilinear form.
pub fn check_euler_pair(seed: u64, gen: &GenSpec) -> Result<()> {
    let a = random_module(&GenSpec {
        seed: 2 * seed,
        ..gen.clone()
    })?;
    let b = random_module(&GenSpec {
        seed: 2 * seed + 1,
        ..gen.clone()
    })?;
    let hom = hom_basis(&a, &b)?.dim() as i64;
    let ext = ext1(&a, &b)?.dim() as i64;
    let form = euler_form(&a, &b);
    if hom - ext != form {
        return Err(falsify(
            format!(
                "dim Hom - dim Ext = {} but the Euler form gives {form}",
                hom - ext
            ),
            &a,
            json!({ "other": b.to_file(), "hom": hom, "ext": ext }),
        ));
    }
    Ok(())
}

pub fn is_brick(m: &TreeModule) -> Result<bool> {
    Ok(end_radical(m)?.dim() == 1)
}

/// dim Ext¹(z, σ²z) = dim End(z); only bricks are tested by the suites.
pub fn check_ext_end(z: &TreeModule) -> Result<()> {
    let x = sigma_power(z, 2)?;
    let e = ext1(z, &x)?.dim();
    let end = end_radical(z)?.dim();
    if e != end {
        return Err(falsify(
            format!("dim Ext(z, σ²z) = {e} but dim End(z) = {end}"),
            z,
            json!({}),
        ));
    }
    Ok(())
}

pub fn check_duality(m: &TreeModule) -> Result<()> {
    let d = m.dual()?;
    if iso_test(&d.dual()?, m).is_none() {
        return Err(falsify("D²m is not isomorphic to m".into(), m, json!({})));
    }
    let lhs = sigma(m)?.dual()?;
    let rhs = sigma_minus(&d)?;
    if iso_test(&lhs, &rhs).is_none() {
        return Err(falsify(
            "Dσm is not isomorphic to σ⁻Dm".into(),
            m,
            json!({ "d_sigma": lhs.to_file(), "sigma_minus_d": rhs.to_file() }),
        ));
    }
    if kronecker_iso(&d.pushdown()?, &m.pushdown()?.dual()).is_none() {
        return Err(falsify(
            "pushdown(Dm) is not the Kronecker dual of pushdown(m)".into(),
            m,
            json!({}),
        ));
    }
    Ok(())
}

pub fn check_orbit(m: &TreeModule) -> Result<crate::orbit::OrbitReport> {
    orbit_report(m, 4, None)
}

/// Every step of the orbit over `[-back, fwd]` around `m` matches exactly
/// one transition rule.
pub fn check_transitions(m: &TreeModule, back: usize, fwd: Option<usize>) -> Result<()> {
    let fwd = match fwd {
        Some(f) => f,
        None => orbit_report(m, back, None)?.fwd,
    };
    let mut cur = sigma_power(m, -(back as i64))?;
    for _ in 0..back + fwd {
        transition_check(&cur)?;
        cur = sigma(&cur)?;
    }
    Ok(())
}

/// r₀ − ql is constant along the σ-orbit of a ray module.
pub fn check_ray(x: &TreeModule, length: usize) -> Result<()> {
    let ray = ray_module(x, length)?;
    component_invariant(&ray)?;
    middle_term_check(&ray.module).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            seeds: 3,
            base_seed: 0,
            gen: GenSpec::default(),
        }
    }

    #[test]
    fn every_suite_is_clean_on_a_few_seeds() {
        for o in run_suite(Suite::All, &small()).unwrap() {
            assert!(o.passed(), "{}\n{:?}", o.summary(), o.failures);
            assert!(o.checks.values().all(|t| t.passed > 0));
        }
    }

    #[test]
    fn brute_force_agrees_on_a_path() {
        let set: Vec<VertexWord> = ["", "+1", "+1.-2"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let t = minimal_subtree(set.iter()).unwrap();
        let (d, c, r) = brute_force_shape(&t);
        assert_eq!((d, r), (2, 1));
        assert_eq!(c, Center::Vertex("+1".parse().unwrap()));
    }

    #[test]
    fn broken_coxeter_claim_is_reported() {
        let z = crate::generators::fixture_example4(1, 1).unwrap();
        let mut o = SuiteOutcome::new(Suite::Functor);
        o.record("coxeter_law", 0, check_coxeter(&z));
        assert!(o.passed());
        // the opposite direction must not hold on Ω-parity input
        let k = z.pushdown().unwrap();
        let k2 = sigma_power(&z, 2).unwrap().pushdown().unwrap();
        assert_ne!(
            apply(coxeter(3), [k.d1 as i64, k.d2 as i64]),
            Some([k2.d1 as i64, k2.d2 as i64])
        );
    }
}
