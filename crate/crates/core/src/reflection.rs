//! Reflection functors at single vertices, the shift functors σ and σ⁻ on
//! tree modules, and their counterparts on K(n).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{cokernel, kernel, Matrix};
use crate::module::{KroneckerModule, TreeModule};
use crate::tree::{neighbors, VertexWord};

/// Neighbours of `x` sorted by edge label.
fn by_label(x: &VertexWord, n: usize) -> Vec<VertexWord> {
    let mut ns = neighbors(x, n);
    ns.sort_by_key(|(_, l)| *l);
    ns.into_iter().map(|(y, _)| y).collect()
}

/// New space and incident maps at a sink: the kernel of the total map
/// into `M_x`, with maps to each neighbour given by row blocks.
fn sink_data(m: &TreeModule, x: &VertexWord) -> (usize, Vec<(VertexWord, Matrix)>) {
    let f = m.field();
    let dx = m.dim_at(x);
    let ns: Vec<VertexWord> = by_label(x, m.n())
        .into_iter()
        .filter(|y| m.dim_at(y) > 0)
        .collect();
    let blocks: Vec<Matrix> = ns
        .iter()
        .map(|y| {
            m.edge_map(y, x)
                .cloned()
                .unwrap_or_else(|| Matrix::zeros(dx, m.dim_at(y)))
        })
        .collect();
    let refs: Vec<&Matrix> = blocks.iter().collect();
    let total = Matrix::hstack(dx, &refs);
    let ker = kernel(&total, f);
    let k = ker.dim();
    let mut out = Vec::with_capacity(ns.len());
    let mut r0 = 0;
    for y in ns {
        let d = m.dim_at(&y);
        out.push((y, ker.basis().submatrix(r0, r0 + d, 0, k)));
        r0 += d;
    }
    (k, out)
}

/// New space and incident maps at a source: the cokernel of the total map
/// out of `M_x`, with maps from each neighbour given by column blocks.
fn source_data(m: &TreeModule, x: &VertexWord) -> (usize, Vec<(VertexWord, Matrix)>) {
    let f = m.field();
    let dx = m.dim_at(x);
    let ns: Vec<VertexWord> = by_label(x, m.n())
        .into_iter()
        .filter(|y| m.dim_at(y) > 0)
        .collect();
    let blocks: Vec<Matrix> = ns
        .iter()
        .map(|y| {
            m.edge_map(x, y)
                .cloned()
                .unwrap_or_else(|| Matrix::zeros(m.dim_at(y), dx))
        })
        .collect();
    let refs: Vec<&Matrix> = blocks.iter().collect();
    let total = Matrix::vstack(dx, &refs);
    let cok = cokernel(&total, f);
    let c = cok.dim();
    let mut out = Vec::with_capacity(ns.len());
    let mut c0 = 0;
    for y in ns {
        let d = m.dim_at(&y);
        out.push((y, cok.projection.submatrix(0, c, c0, c0 + d)));
        c0 += d;
    }
    (c, out)
}

/// Reflection at the sink `x`; arrows at `x` are reversed and the vertex
/// is recorded as locally flipped.
pub fn reflect_at_sink(m: &TreeModule, x: &VertexWord) -> Result<TreeModule> {
    if !m.is_sink(x) {
        return Err(Error::NotASink(x.display_name()));
    }
    let (k, maps) = sink_data(m, x);
    let mut out = m.clone();
    out.replace_vertex(x, k, maps);
    Ok(out)
}

/// Reflection at the source `x`.
pub fn reflect_at_source(m: &TreeModule, x: &VertexWord) -> Result<TreeModule> {
    if !m.is_source(x) {
        return Err(Error::NotASource(x.display_name()));
    }
    let (c, maps) = source_data(m, x);
    let mut out = m.clone();
    out.replace_vertex(x, c, maps);
    Ok(out)
}

/// Vertices of the given kind lying in the support or adjacent to it.
fn touched(m: &TreeModule, want_sink: bool) -> BTreeSet<VertexWord> {
    let parity = m.parity();
    let mut out = BTreeSet::new();
    for v in m.support() {
        if parity.is_sink(v) == want_sink {
            out.insert(v.clone());
        }
        for (y, _) in neighbors(v, m.n()) {
            if parity.is_sink(&y) == want_sink {
                out.insert(y);
            }
        }
    }
    out
}

fn shift(m: &TreeModule, at_sinks: bool) -> Result<TreeModule> {
    m.require_unflipped()?;
    let targets = touched(m, at_sinks);
    // sinks (sources) are pairwise non-adjacent, so each new space depends
    // only on the input module
    let data: Vec<_> = targets
        .iter()
        .map(|x| {
            if at_sinks {
                sink_data(m, x)
            } else {
                source_data(m, x)
            }
        })
        .collect();
    let mut out = m.clone();
    for (x, (d, maps)) in targets.iter().zip(data) {
        out.replace_vertex(x, d, maps);
    }
    Ok(out.finish_shift())
}

/// σ: reflection at every sink touching the support; the orientation flips.
pub fn sigma(m: &TreeModule) -> Result<TreeModule> {
    shift(m, true)
}

/// σ⁻: reflection at every source touching the support.
pub fn sigma_minus(m: &TreeModule) -> Result<TreeModule> {
    shift(m, false)
}

/// σᵗ for any integer t; stops early once the module vanishes.
pub fn sigma_power(m: &TreeModule, t: i64) -> Result<TreeModule> {
    let mut cur = m.clone();
    for _ in 0..t.unsigned_abs() {
        if cur.is_zero() {
            return Ok(TreeModule::zero(
                cur.n(),
                cur.field(),
                cur.parity().flipped(),
            ));
        }
        cur = if t > 0 {
            sigma(&cur)?
        } else {
            sigma_minus(&cur)?
        };
    }
    Ok(cur)
}

/// σ' on K(n): kernel of the stacked map into the sink vertex. The output
/// is in canonical form at the reflected vertex.
pub fn sigma_kronecker(k: &KroneckerModule) -> KroneckerModule {
    let f = k.field;
    let s = k.source_dim();
    let ker = kernel(&k.stacked_row(), f);
    let kd = ker.dim();
    let maps = (0..k.n)
        .map(|i| ker.basis().submatrix(i * s, (i + 1) * s, 0, kd))
        .collect();
    let parity = k.parity.flipped();
    // the old sink vertex becomes the new source
    let (d1, d2) = match k.parity.kronecker_sink() {
        1 => (kd, k.d2),
        _ => (k.d1, kd),
    };
    KroneckerModule {
        n: k.n,
        field: f,
        parity,
        d1,
        d2,
        maps,
    }
}

/// σ'⁻ on K(n): cokernel of the stacked map out of the source vertex.
pub fn sigma_minus_kronecker(k: &KroneckerModule) -> KroneckerModule {
    let f = k.field;
    let t = k.sink_dim();
    let cok = cokernel(&k.stacked_column(), f);
    let c = cok.dim();
    let maps = (0..k.n)
        .map(|i| cok.projection.submatrix(0, c, i * t, (i + 1) * t))
        .collect();
    let parity = k.parity.flipped();
    let (d1, d2) = match k.parity.kronecker_sink() {
        1 => (k.d1, c),
        _ => (c, k.d2),
    };
    KroneckerModule {
        n: k.n,
        field: f,
        parity,
        d1,
        d2,
        maps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank_kernel, FieldSpec};
    use crate::module::Parity;
    use std::collections::BTreeMap;

    fn w(s: &str) -> VertexWord {
        s.parse().unwrap()
    }

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    fn edge(lambda: u64) -> TreeModule {
        TreeModule::new(
            3,
            f(),
            Parity::Omega,
            BTreeMap::from([(w(""), 1), (w("+1"), 1)]),
            BTreeMap::from([(w("+1"), Matrix::scalar(lambda))]),
        )
        .unwrap()
    }

    fn example_z() -> TreeModule {
        TreeModule::new(
            3,
            f(),
            Parity::Omega,
            BTreeMap::from([(w(""), 1), (w("+1"), 1), (w("+3"), 1)]),
            BTreeMap::from([(w("+1"), Matrix::scalar(1)), (w("+3"), Matrix::scalar(1))]),
        )
        .unwrap()
    }

    fn simple(v: &str, parity: Parity) -> TreeModule {
        TreeModule::new(3, f(), parity, BTreeMap::from([(w(v), 1)]), BTreeMap::new()).unwrap()
    }

    #[test]
    fn single_sink_reflections() {
        let s = simple("+1", Parity::Omega);
        let r = reflect_at_sink(&s, &w("+1")).unwrap();
        assert!(r.is_zero());

        let e = edge(3);
        // oracle: kernel of the 1x1 matrix (3)
        let (rank, ker) = rank_kernel(&Matrix::scalar(3), f());
        assert_eq!((rank, ker.len()), (1, 0));
        let r = reflect_at_sink(&e, &w("+1")).unwrap();
        assert_eq!(r.dim_at(&w("+1")), 0);
        assert!(r.validate().is_empty());

        let r = reflect_at_sink(&e, &w("+2")).unwrap();
        assert_eq!(r.dim_at(&w("+2")), 1);
        assert!(r.validate().is_empty());
        assert!(r.is_source(&w("+2")));

        assert!(matches!(
            reflect_at_sink(&e, &w("")),
            Err(Error::NotASink(_))
        ));
        assert!(sigma(&r).is_err());
    }

    #[test]
    fn sigma_of_example() {
        let z = example_z();
        let s = sigma(&z).unwrap();
        assert_eq!(s.parity(), Parity::SigmaOmega);
        assert_eq!(s.dims().clone(), BTreeMap::from([(w(""), 1), (w("+2"), 1)]));
        assert!(!s.map(&w("+2")).unwrap().is_zero());
        assert!(s.validate().is_empty());

        let x = sigma_power(&z, 2).unwrap();
        assert_eq!(x.parity(), Parity::Omega);
        assert_eq!(
            x.dims().keys().cloned().collect::<Vec<_>>(),
            vec![w("+2"), w("+2.-1"), w("+2.-3")]
        );
        assert!(x.dims().values().all(|&d| d == 1));
        assert!(x.support().all(|v| z.dim_at(v) == 0));
        assert_eq!(sigma_power(&z, 0).unwrap(), z);
    }

    #[test]
    fn sigma_of_edge() {
        let s = sigma(&edge(5)).unwrap();
        assert_eq!(
            s.dims().clone(),
            BTreeMap::from([(w(""), 1), (w("+2"), 1), (w("+3"), 1)])
        );
        assert!(sigma(&simple("+2", Parity::Omega)).unwrap().is_zero());
    }

    #[test]
    fn sigma_minus_inverts_dims() {
        let z = example_z();
        let back = sigma_minus(&sigma(&z).unwrap()).unwrap();
        assert_eq!(back.dims(), z.dims());
        assert_eq!(back.parity(), z.parity());
        assert!(sigma_minus(&simple("", Parity::Omega)).unwrap().is_zero());
        let back = sigma_power(&sigma_power(&z, 2).unwrap(), -2).unwrap();
        assert_eq!(back.dims(), z.dims());
    }

    #[test]
    fn kronecker_sigma() {
        let k = edge(4).pushdown().unwrap();
        let s = sigma_kronecker(&k);
        assert_eq!(s.dims(), (1, 2));
        assert_eq!(s.parity, Parity::SigmaOmega);
        let s2 = KroneckerModule::new(3, f(), Parity::Omega, 0, 1, vec![Matrix::zeros(1, 0); 3])
            .unwrap();
        assert_eq!(sigma_kronecker(&s2).dims(), (0, 0));
    }

    #[test]
    fn commutation_on_fixtures() {
        for m in [edge(2), example_z(), sigma(&example_z()).unwrap()] {
            let lhs = sigma(&m).unwrap().pushdown().unwrap();
            let rhs = sigma_kronecker(&m.pushdown().unwrap());
            let v = m.parity().kronecker_sink();
            assert_eq!(lhs.canonicalize_vertex(v), rhs);
            let lhs = sigma_minus(&m).unwrap().pushdown().unwrap();
            let rhs = sigma_minus_kronecker(&m.pushdown().unwrap());
            let v = 3 - m.parity().kronecker_sink();
            assert_eq!(lhs.canonicalize_vertex(v), rhs);
        }
    }
}
