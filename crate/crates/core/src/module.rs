//! Graded Kronecker modules: finite-support representations of T(n) and
//! their push-downs to K(n).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Matrix, Subspace};
use crate::tree::{
    minimal_subtree, neighbors, reflect_beta, translate, FiniteTree, GroupElement, Label,
    VertexWord,
};

/// Orientation of T(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// Even words are sources, odd words are sinks.
    Omega,
    /// Even words are sinks, odd words are sources.
    SigmaOmega,
}

impl Parity {
    pub fn flipped(self) -> Parity {
        match self {
            Parity::Omega => Parity::SigmaOmega,
            Parity::SigmaOmega => Parity::Omega,
        }
    }

    pub fn is_sink(self, v: &VertexWord) -> bool {
        match self {
            Parity::Omega => !v.in_first_fiber(),
            Parity::SigmaOmega => v.in_first_fiber(),
        }
    }

    pub fn is_source(self, v: &VertexWord) -> bool {
        !self.is_sink(v)
    }

    /// The sink vertex (1 or 2) of K(n).
    pub fn kronecker_sink(self) -> u8 {
        match self {
            Parity::Omega => 2,
            Parity::SigmaOmega => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Omega => "omega",
            Parity::SigmaOmega => "sigma_omega",
        })
    }
}

/// A finite-dimensional representation of T(n) under a bipartite
/// orientation.
///
/// Edges are keyed by their longer endpoint (the child). The matrix on an
/// edge maps the source space to the target space. `flips` records
/// vertices at which a single reflection was applied since the last full
/// shift; it is empty for every module produced by the public shift
/// functors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeModule {
    n: usize,
    field: FieldSpec,
    parity: Parity,
    dims: BTreeMap<VertexWord, usize>,
    maps: BTreeMap<VertexWord, Matrix>,
    flips: BTreeSet<VertexWord>,
}

impl TreeModule {
    pub fn zero(n: usize, field: FieldSpec, parity: Parity) -> Self {
        TreeModule {
            n,
            field,
            parity,
            dims: BTreeMap::new(),
            maps: BTreeMap::new(),
            flips: BTreeSet::new(),
        }
    }

    /// Builds and validates a module.
    pub fn new(
        n: usize,
        field: FieldSpec,
        parity: Parity,
        dims: BTreeMap<VertexWord, usize>,
        maps: BTreeMap<VertexWord, Matrix>,
    ) -> Result<Self> {
        let m = TreeModule {
            n,
            field,
            parity,
            dims,
            maps,
            flips: BTreeSet::new(),
        };
        let diags = m.validate();
        if diags.is_empty() {
            Ok(m)
        } else {
            Err(Error::Invalid(diags))
        }
    }

    /// Builds a module without validation; callers guarantee the invariants.
    pub(crate) fn from_parts(
        n: usize,
        field: FieldSpec,
        parity: Parity,
        dims: BTreeMap<VertexWord, usize>,
        maps: BTreeMap<VertexWord, Matrix>,
    ) -> Self {
        TreeModule {
            n,
            field,
            parity,
            dims,
            maps,
            flips: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dims(&self) -> &BTreeMap<VertexWord, usize> {
        &self.dims
    }

    pub fn maps(&self) -> &BTreeMap<VertexWord, Matrix> {
        &self.maps
    }

    pub fn flips(&self) -> &BTreeSet<VertexWord> {
        &self.flips
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim_at(&self, v: &VertexWord) -> usize {
        self.dims.get(v).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = &VertexWord> {
        self.dims.keys()
    }

    /// Matrix on the edge whose longer endpoint is `child`.
    pub fn map(&self, child: &VertexWord) -> Option<&Matrix> {
        self.maps.get(child)
    }

    /// Whether `a` is the source of the edge between adjacent `a` and `b`.
    pub fn is_edge_source(&self, a: &VertexWord, b: &VertexWord) -> bool {
        let base = self.parity.is_source(a);
        let reversed = self.flips.contains(a) != self.flips.contains(b);
        base != reversed
    }

    /// `(source, target)` of the edge keyed by `child`.
    pub fn edge_ends(&self, child: &VertexWord) -> (VertexWord, VertexWord) {
        let parent = child.parent().expect("edges are keyed by a non-root word");
        if self.is_edge_source(child, &parent) {
            (child.clone(), parent)
        } else {
            (parent, child.clone())
        }
    }

    pub fn is_sink(&self, x: &VertexWord) -> bool {
        neighbors(x, self.n)
            .iter()
            .all(|(y, _)| self.is_edge_source(y, x))
    }

    pub fn is_source(&self, x: &VertexWord) -> bool {
        neighbors(x, self.n)
            .iter()
            .all(|(y, _)| self.is_edge_source(x, y))
    }

    /// Every violated invariant, each naming its vertex or edge.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        if self.n == 0 {
            diags.push("arity n must be at least 1".to_string());
        }
        if let Err(e) = FieldSpec::new(self.field.p) {
            diags.push(e.to_string());
        }
        for (v, &d) in &self.dims {
            if d == 0 {
                diags.push(format!(
                    "vertex {}: dimension 0 stored explicitly; zero spaces must be absent",
                    v.display_name()
                ));
            }
            if !v.is_valid_for(self.n) {
                diags.push(format!(
                    "vertex {}: label exceeds arity {}",
                    v.display_name(),
                    self.n
                ));
            }
        }
        for (c, m) in &self.maps {
            let Some(parent) = c.parent() else {
                diags.push("edge keyed by the root word".to_string());
                continue;
            };
            if !c.is_valid_for(self.n) {
                diags.push(format!("edge {c}: label exceeds arity {}", self.n));
            }
            let (s, t) = self.edge_ends(c);
            let (ds, dt) = (self.dim_at(&s), self.dim_at(&t));
            if self.dim_at(c) == 0 || self.dim_at(&parent) == 0 {
                diags.push(format!(
                    "edge {c}: carries a matrix but an endpoint has dimension 0"
                ));
            } else if m.shape() != (dt, ds) {
                diags.push(format!(
                    "edge {c}: matrix is {}x{}, expected {dt}x{ds} (target x source)",
                    m.rows(),
                    m.cols()
                ));
            }
            if m.as_slice().iter().any(|&x| x >= self.field.p) {
                diags.push(format!("edge {c}: entry outside GF({})", self.field.p));
            }
        }
        for v in self.dims.keys() {
            if let Some(p) = v.parent() {
                if self.dims.contains_key(&p) && !self.maps.contains_key(v) {
                    diags.push(format!("edge {v}: both endpoints nonzero but no matrix"));
                }
            }
        }
        diags
    }

    pub fn support_tree(&self) -> Result<FiniteTree> {
        if self.is_zero() {
            return Err(Error::ZeroModule);
        }
        minimal_subtree(self.dims.keys())
    }

    fn check_compatible(&self, other: &TreeModule) -> Result<()> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::DimensionMismatch(format!(
                "modules over T({}) / GF({}) and T({}) / GF({})",
                self.n, self.field.p, other.n, other.field.p
            )));
        }
        if self.parity != other.parity {
            return Err(Error::ParityMismatch(format!(
                "{} versus {}",
                self.parity, other.parity
            )));
        }
        if !self.flips.is_empty() || !other.flips.is_empty() {
            return Err(Error::PartiallyReflected);
        }
        Ok(())
    }

    pub(crate) fn require_unflipped(&self) -> Result<()> {
        if self.flips.is_empty() {
            Ok(())
        } else {
            Err(Error::PartiallyReflected)
        }
    }

    /// Blockwise direct sum, `self` first.
    pub fn direct_sum(&self, other: &TreeModule) -> Result<TreeModule> {
        self.check_compatible(other)?;
        let mut dims = self.dims.clone();
        for (v, d) in &other.dims {
            *dims.entry(v.clone()).or_default() += d;
        }
        let mut maps = BTreeMap::new();
        for c in dims.keys() {
            let Some(p) = c.parent() else { continue };
            if !dims.contains_key(&p) {
                continue;
            }
            let (s, t) = self.edge_ends(c);
            let block = |m: &TreeModule| -> Matrix {
                m.maps
                    .get(c)
                    .cloned()
                    .unwrap_or_else(|| Matrix::zeros(m.dim_at(&t), m.dim_at(&s)))
            };
            maps.insert(c.clone(), Matrix::block_diag(&block(self), &block(other)));
        }
        Ok(TreeModule::from_parts(
            self.n,
            self.field,
            self.parity,
            dims,
            maps,
        ))
    }

    /// Fiber-wise collapse to a K(n)-module. Blocks follow the canonical
    /// vertex order within each fiber.
    pub fn pushdown(&self) -> Result<KroneckerModule> {
        self.require_unflipped()?;
        let mut offsets: BTreeMap<&VertexWord, usize> = BTreeMap::new();
        let (mut d1, mut d2) = (0, 0);
        for (v, &d) in &self.dims {
            let slot = if v.in_first_fiber() { &mut d1 } else { &mut d2 };
            offsets.insert(v, *slot);
            *slot += d;
        }
        let (rows, cols) = match self.parity {
            Parity::Omega => (d2, d1),
            Parity::SigmaOmega => (d1, d2),
        };
        let mut maps = vec![Matrix::zeros(rows, cols); self.n];
        for (c, m) in &self.maps {
            let (s, t) = self.edge_ends(c);
            let label = c.last_label().unwrap() as usize;
            maps[label - 1].set_block(offsets[&t], offsets[&s], m);
        }
        Ok(KroneckerModule {
            n: self.n,
            field: self.field,
            parity: self.parity,
            d1,
            d2,
            maps,
        })
    }

    /// The duality transported along the fiber-swapping automorphism β:
    /// the space at β(y) is the dual of the space at y and every edge
    /// carries the transposed matrix.
    pub fn dual(&self) -> Result<TreeModule> {
        self.require_unflipped()?;
        let dims = self
            .dims
            .iter()
            .map(|(v, &d)| (reflect_beta(v), d))
            .collect();
        let maps = self
            .maps
            .iter()
            .map(|(c, m)| {
                let p = c.parent().unwrap();
                let (bc, bp) = (reflect_beta(c), reflect_beta(&p));
                let key = if bc.len() > bp.len() { bc } else { bp };
                (key, m.transpose())
            })
            .collect();
        Ok(TreeModule::from_parts(
            self.n,
            self.field,
            self.parity,
            dims,
            maps,
        ))
    }

    /// Relabels the support along `v -> g.v`; matrices are unchanged.
    pub fn translate_module(&self, g: &GroupElement) -> Result<TreeModule> {
        self.require_unflipped()?;
        let dims = self
            .dims
            .iter()
            .map(|(v, &d)| (translate(v, g), d))
            .collect();
        let maps = self
            .maps
            .iter()
            .map(|(c, m)| {
                let p = c.parent().unwrap();
                let (tc, tp) = (translate(c, g), translate(&p, g));
                let key = if tc.len() > tp.len() { tc } else { tp };
                (key, m.clone())
            })
            .collect();
        Ok(TreeModule::from_parts(
            self.n,
            self.field,
            self.parity,
            dims,
            maps,
        ))
    }

    /// Same spaces and maps, read under the opposite orientation with
    /// every matrix transposed. Used to test orientation sensitivity.
    pub fn with_parity_flipped(&self) -> TreeModule {
        TreeModule {
            n: self.n,
            field: self.field,
            parity: self.parity.flipped(),
            dims: self.dims.clone(),
            maps: self
                .maps
                .iter()
                .map(|(c, m)| (c.clone(), m.transpose()))
                .collect(),
            flips: BTreeSet::new(),
        }
    }

    /// Replaces the data at `x` and its incident edges. Used by the
    /// single-vertex reflections.
    pub(crate) fn replace_vertex(
        &mut self,
        x: &VertexWord,
        dim: usize,
        incident: Vec<(VertexWord, Matrix)>,
    ) {
        for (y, _) in neighbors(x, self.n) {
            let key = if y.len() > x.len() { y } else { x.clone() };
            self.maps.remove(&key);
        }
        if dim == 0 {
            self.dims.remove(x);
        } else {
            self.dims.insert(x.clone(), dim);
            for (y, m) in incident {
                if self.dim_at(&y) > 0 {
                    let key = if y.len() > x.len() { y } else { x.clone() };
                    self.maps.insert(key, m);
                }
            }
        }
        if !self.flips.remove(x) {
            self.flips.insert(x.clone());
        }
    }

    pub(crate) fn finish_shift(mut self) -> TreeModule {
        self.flips.clear();
        self.parity = self.parity.flipped();
        self
    }

    /// Matrix from `a` to `b` across the edge joining them, if any.
    pub fn edge_map(&self, a: &VertexWord, b: &VertexWord) -> Option<&Matrix> {
        let key = if a.len() > b.len() { a } else { b };
        self.maps.get(key)
    }

    pub fn to_file(&self) -> ModuleFile {
        ModuleFile {
            n: self.n,
            p: self.field.p,
            parity: self.parity,
            vertices: self
                .dims
                .iter()
                .map(|(v, &d)| VertexEntry {
                    word: v.clone(),
                    dim: d,
                })
                .collect(),
            edges: self
                .maps
                .iter()
                .map(|(c, m)| EdgeEntry {
                    child: c.clone(),
                    matrix: m.to_rows(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &ModuleFile) -> Result<TreeModule> {
        let field = FieldSpec::new(file.p)?;
        let mut dims = BTreeMap::new();
        let mut diags = Vec::new();
        for e in &file.vertices {
            if dims.insert(e.word.clone(), e.dim).is_some() {
                diags.push(format!("vertex {}: listed twice", e.word.display_name()));
            }
        }
        let mut maps = BTreeMap::new();
        for e in &file.edges {
            let rows = e.matrix.len();
            let cols = e.matrix.first().map_or(0, Vec::len);
            if e.matrix.iter().any(|r| r.len() != cols) {
                diags.push(format!("edge {}: ragged matrix", e.child));
                continue;
            }
            let m = Matrix::from_fn(rows, cols, |i, j| e.matrix[i][j]);
            if maps.insert(e.child.clone(), m).is_some() {
                diags.push(format!("edge {}: listed twice", e.child));
            }
        }
        if !diags.is_empty() {
            return Err(Error::Invalid(diags));
        }
        TreeModule::new(file.n, field, file.parity, dims, maps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("module files serialize")
    }

    pub fn from_json(s: &str) -> Result<TreeModule> {
        TreeModule::from_file(&serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<TreeModule> {
        TreeModule::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Compact dimension listing, e.g. `root:1 +1:1 +3:1`.
    pub fn dims_summary(&self) -> String {
        self.dims
            .iter()
            .map(|(v, d)| format!("{}:{d}", v.display_name()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// On-disk module format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub n: usize,
    pub p: u64,
    pub parity: Parity,
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub word: VertexWord,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub child: VertexWord,
    pub matrix: Vec<Vec<u64>>,
}

/// A representation of K(n): spaces at vertices 1 and 2 and the arrows
/// γ₁..γₙ, each oriented from the source vertex to the sink vertex of the
/// current parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KroneckerModule {
    pub n: usize,
    pub field: FieldSpec,
    pub parity: Parity,
    pub d1: usize,
    pub d2: usize,
    pub maps: Vec<Matrix>,
}

impl KroneckerModule {
    pub fn new(
        n: usize,
        field: FieldSpec,
        parity: Parity,
        d1: usize,
        d2: usize,
        maps: Vec<Matrix>,
    ) -> Result<Self> {
        let k = KroneckerModule {
            n,
            field,
            parity,
            d1,
            d2,
            maps,
        };
        if k.maps.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} arrows for K({n})",
                k.maps.len()
            )));
        }
        let shape = (k.sink_dim(), k.source_dim());
        if let Some(i) = k.maps.iter().position(|m| m.shape() != shape) {
            return Err(Error::DimensionMismatch(format!(
                "arrow {} is {:?}, expected {shape:?}",
                i + 1,
                k.maps[i].shape()
            )));
        }
        Ok(k)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn source_dim(&self) -> usize {
        match self.parity {
            Parity::Omega => self.d1,
            Parity::SigmaOmega => self.d2,
        }
    }

    pub fn sink_dim(&self) -> usize {
        match self.parity {
            Parity::Omega => self.d2,
            Parity::SigmaOmega => self.d1,
        }
    }

    /// Vector-space duality composed with the swap of the two vertices,
    /// so that the orientation class is preserved.
    pub fn dual(&self) -> KroneckerModule {
        KroneckerModule {
            n: self.n,
            field: self.field,
            parity: self.parity,
            d1: self.d2,
            d2: self.d1,
            maps: self.maps.iter().map(Matrix::transpose).collect(),
        }
    }

    /// All arrows side by side: `sink x (n * source)`.
    pub fn stacked_row(&self) -> Matrix {
        let parts: Vec<&Matrix> = self.maps.iter().collect();
        Matrix::hstack(self.sink_dim(), &parts)
    }

    /// All arrows on top of each other: `(n * sink) x source`.
    pub fn stacked_column(&self) -> Matrix {
        let parts: Vec<&Matrix> = self.maps.iter().collect();
        Matrix::vstack(self.source_dim(), &parts)
    }

    /// Normalizes the basis at vertex `v` (1 or 2).
    ///
    /// At the source vertex the stacked column is replaced by the
    /// canonical basis of its column span; at the sink vertex the stacked
    /// row is brought to reduced row echelon form. Two modules that differ
    /// only by a change of basis at `v` become equal, provided the stacked
    /// map at `v` is injective (source) or surjective (sink).
    pub fn canonicalize_vertex(&self, v: u8) -> KroneckerModule {
        let f = self.field;
        let sink = self.parity.kronecker_sink() == v;
        let mut out = self.clone();
        if sink {
            let rr = crate::linalg::rref(&self.stacked_row(), f);
            if rr.rank() < self.sink_dim() {
                return out;
            }
            let s = self.source_dim();
            for (i, m) in out.maps.iter_mut().enumerate() {
                *m = rr.matrix.submatrix(0, self.sink_dim(), i * s, (i + 1) * s);
            }
        } else {
            let span = Subspace::span_of_columns(&self.stacked_column(), f);
            if span.dim() < self.source_dim() {
                return out;
            }
            let t = self.sink_dim();
            for (i, m) in out.maps.iter_mut().enumerate() {
                *m = span
                    .basis()
                    .submatrix(i * t, (i + 1) * t, 0, self.source_dim());
            }
        }
        out
    }

    /// The arrow labelled `label` (1-based).
    pub fn arrow(&self, label: Label) -> &Matrix {
        &self.maps[label as usize - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> VertexWord {
        s.parse().unwrap()
    }

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    pub(crate) fn edge(lambda: u64) -> TreeModule {
        TreeModule::new(
            3,
            f(),
            Parity::Omega,
            BTreeMap::from([(w(""), 1), (w("+1"), 1)]),
            BTreeMap::from([(w("+1"), Matrix::scalar(lambda))]),
        )
        .unwrap()
    }

    fn simple(v: &str) -> TreeModule {
        TreeModule::new(
            3,
            f(),
            Parity::Omega,
            BTreeMap::from([(w(v), 1)]),
            BTreeMap::new(),
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

    #[test]
    fn validate_diagnostics() {
        assert!(edge(5).validate().is_empty());
        let bad = TreeModule::from_parts(
            3,
            f(),
            Parity::Omega,
            BTreeMap::from([(w(""), 1), (w("+1"), 2)]),
            BTreeMap::from([(w("+1"), Matrix::scalar(1))]),
        );
        let d = bad.validate();
        assert_eq!(d.len(), 1);
        assert!(d[0].contains("edge +1"), "{d:?}");
        let zero = TreeModule::from_parts(
            3,
            f(),
            Parity::Omega,
            BTreeMap::from([(w(""), 0)]),
            BTreeMap::new(),
        );
        assert!(zero.validate()[0].contains("dimension 0"));
    }

    #[test]
    fn support_trees() {
        assert_eq!(simple("").support_tree().unwrap().len(), 1);
        let t = example_z().support_tree().unwrap();
        let s = t.shape();
        assert_eq!((t.len(), s.radius), (3, 1));
        assert_eq!(s.center, crate::tree::Center::Vertex(w("")));
        let gap = simple("+1").direct_sum(&simple("+3")).unwrap();
        assert!(gap.support_tree().unwrap().contains(&w("")));
        assert!(TreeModule::zero(3, f(), Parity::Omega)
            .support_tree()
            .is_err());
    }

    #[test]
    fn direct_sums() {
        let z = TreeModule::zero(3, f(), Parity::Omega);
        assert_eq!(edge(2).direct_sum(&z).unwrap(), edge(2));
        let s = edge(2).direct_sum(&edge(3)).unwrap();
        assert_eq!(s.dim_at(&w("")), 2);
        assert!(s.validate().is_empty());
        let (a, b, ab) = (
            edge(2).pushdown().unwrap(),
            simple("").pushdown().unwrap(),
            edge(2).direct_sum(&simple("")).unwrap().pushdown().unwrap(),
        );
        // independent block assembly on the Kronecker side
        for i in 0..3 {
            let expect = Matrix::block_diag(&a.maps[i], &b.maps[i]);
            assert_eq!(ab.maps[i], expect);
        }
        assert!(edge(1).direct_sum(&edge(1).with_parity_flipped()).is_err());
    }

    #[test]
    fn pushdowns() {
        let k = edge(7).pushdown().unwrap();
        assert_eq!(k.dims(), (1, 1));
        assert_eq!(k.maps[0], Matrix::scalar(7));
        assert!(k.maps[1].is_zero() && k.maps[2].is_zero());

        let k = example_z().pushdown().unwrap();
        assert_eq!(k.dims(), (1, 2));
        // odd fiber order: +1 then +3
        assert_eq!(k.maps[0].to_rows(), vec![vec![1], vec![0]]);
        assert!(k.maps[1].is_zero());
        assert_eq!(k.maps[2].to_rows(), vec![vec![0], vec![1]]);

        let k = simple("").pushdown().unwrap();
        assert_eq!(k.dims(), (1, 0));
        assert!(k.maps.iter().all(|m| m.shape() == (0, 1)));
    }

    #[test]
    fn duals() {
        for m in [edge(4), example_z(), simple("+2")] {
            let d = m.dual().unwrap();
            assert!(d.validate().is_empty());
            assert_eq!(d.dual().unwrap(), m);
            assert_eq!(d.total_dim(), m.total_dim());
        }
        assert_eq!(simple("").dual().unwrap(), simple("+1"));
        let pd = edge(4).dual().unwrap().pushdown().unwrap();
        let dp = edge(4).pushdown().unwrap().dual();
        assert_eq!(pd, dp);
    }

    #[test]
    fn translations() {
        let g = GroupElement::new(w("+1.-2")).unwrap();
        assert_eq!(
            example_z()
                .translate_module(&GroupElement::identity())
                .unwrap(),
            example_z()
        );
        let t = example_z().translate_module(&g).unwrap();
        assert!(t.validate().is_empty());
        assert_eq!(t.pushdown().unwrap(), example_z().pushdown().unwrap());
        assert_eq!(
            t.support_tree().unwrap().shape().radius,
            example_z().support_tree().unwrap().shape().radius
        );
    }

    #[test]
    fn json_round_trip() {
        let z = example_z();
        let back = TreeModule::from_json(&z.to_json()).unwrap();
        assert_eq!(back, z);
        let mut file = z.to_file();
        file.edges[0].matrix = vec![vec![1, 2]];
        match TreeModule::from_file(&file) {
            Err(Error::Invalid(d)) => assert!(d[0].contains("edge +1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sinks_and_sources() {
        let z = example_z();
        assert!(z.is_source(&w("")));
        assert!(z.is_sink(&w("+2")));
        assert!(!z.is_sink(&w("")));
    }

    #[test]
    fn canonicalize_removes_basis_choice() {
        let k = example_z().pushdown().unwrap();
        // swap the two basis vectors at vertex 2
        let mut swapped = k.clone();
        for m in &mut swapped.maps {
            *m = Matrix::from_fn(2, 1, |i, j| m.get(1 - i, j));
        }
        assert_ne!(swapped, k);
        assert_eq!(swapped.canonicalize_vertex(2), k.canonicalize_vertex(2));
    }
}
