use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::FieldSpec;

/// Dense row-major matrix over GF(p).
///
/// A linear map `V -> W` with `dim V = c`, `dim W = r` is stored as an
/// `r x c` matrix, so columns index the source.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl serde::Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn scalar(value: u64) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![value],
        }
    }

    /// Builds a matrix from rows, reducing entries mod p.
    pub fn from_rows(rows: &[Vec<u64>], field: FieldSpec) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&x| field.reduce(x)));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Column matrix from a vector.
    pub fn column(v: &[u64]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.data[i * m.cols + j] = x;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Product `self * other`. Panics on incompatible shapes.
    pub fn mul(&self, other: &Matrix, field: FieldSpec) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o = (*o + a * b) % field.p;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64], field: FieldSpec) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| (acc + a * b) % field.p)
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix, field: FieldSpec) -> Matrix {
        assert_eq!(self.shape(), other.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix, field: FieldSpec) -> Matrix {
        assert_eq!(self.shape(), other.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| field.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: u64, field: FieldSpec) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| field.mul(a, c)).collect(),
        }
    }

    /// Copy of rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j))
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    /// Horizontal concatenation; all parts must have `rows` rows.
    pub fn hstack(rows: usize, parts: &[&Matrix]) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut c0 = 0;
        for m in parts {
            assert_eq!(m.rows, rows);
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        out
    }

    /// Vertical concatenation; all parts must have `cols` columns.
    pub fn vstack(cols: usize, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut r0 = 0;
        for m in parts {
            assert_eq!(m.cols, cols);
            out.set_block(r0, 0, m);
            r0 += m.rows;
        }
        out
    }

    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows + b.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(a.rows, a.cols, b);
        out
    }

    pub fn pow(&self, mut e: u64, field: FieldSpec) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            base = base.mul(&base, field);
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self, field: FieldSpec) -> u64 {
        (0..self.rows.min(self.cols)).fold(0, |acc, i| field.add(acc, self.get(i, i)))
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination. Only nonzero entries of the pivot row are
/// touched during elimination, which keeps the sparse intertwiner systems
/// cheap.
pub fn rref(m: &Matrix, field: FieldSpec) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let p = field.p;
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut nz = Vec::with_capacity(cols);
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(i) = (r..rows).find(|&i| a.data[i * cols + c] != 0) else {
            continue;
        };
        if i != r {
            for j in c..cols {
                a.data.swap(i * cols + j, r * cols + j);
            }
        }
        let inv = field.inv(a.data[r * cols + c]);
        nz.clear();
        for j in c..cols {
            let x = a.data[r * cols + j];
            if x != 0 {
                a.data[r * cols + j] = (x * inv) % p;
                nz.push(j);
            }
        }
        let (before, rest) = a.data.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for row in before
            .chunks_exact_mut(cols)
            .chain(after.chunks_exact_mut(cols))
        {
            let t = row[c];
            if t == 0 {
                continue;
            }
            let nt = p - t;
            for &j in &nz {
                row[j] = (row[j] + nt * pivot_row[j]) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

pub fn rank(m: &Matrix, field: FieldSpec) -> usize {
    rref(m, field).rank()
}

/// A subspace of `k^ambient` held by its canonical basis: the columns of
/// `basis` are in reduced column echelon form, with `pivots[i]` the row
/// where column `i` has its leading one (and every other column a zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(ambient, 0),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            basis: Matrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Canonical basis of the column span of `m`.
    pub fn span_of_columns(m: &Matrix, field: FieldSpec) -> Self {
        let rr = rref(&m.transpose(), field);
        let k = rr.rank();
        let basis = rr.matrix.submatrix(0, k, 0, m.rows()).transpose();
        Subspace {
            basis,
            pivots: rr.pivots,
        }
    }

    pub fn span_of_vectors(ambient: usize, vectors: &[Vec<u64>], field: FieldSpec) -> Self {
        Self::span_of_columns(&Matrix::from_columns(ambient, vectors), field)
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vectors(&self) -> Vec<Vec<u64>> {
        (0..self.dim()).map(|j| self.basis.col(j)).collect()
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not
    /// in the subspace.
    pub fn coordinates(&self, v: &[u64], field: FieldSpec) -> Option<Vec<u64>> {
        let coords: Vec<u64> = self.pivots.iter().map(|&r| v[r]).collect();
        let back = self.basis.mul_vec(&coords, field);
        (back == v).then_some(coords)
    }

    /// Coordinates of each column of `m`, assumed to lie in the subspace.
    /// This reads the pivot rows and does not verify membership.
    pub fn coordinates_of_columns(&self, m: &Matrix) -> Matrix {
        m.select_rows(&self.pivots)
    }

    pub fn contains(&self, v: &[u64], field: FieldSpec) -> bool {
        self.coordinates(v, field).is_some()
    }

    pub fn intersect(&self, other: &Subspace, field: FieldSpec) -> Subspace {
        // Solve A x = B y; the intersection is A x over the kernel.
        let n = self.ambient();
        let stacked = Matrix::hstack(n, &[&self.basis, &other.basis.scale(field.p - 1, field)]);
        let ker = kernel(&stacked, field);
        let xs = ker.basis.submatrix(0, self.dim(), 0, ker.dim());
        Subspace::span_of_columns(&self.basis.mul(&xs, field), field)
    }
}

/// Null space of `m` with its canonical basis.
pub fn kernel(m: &Matrix, field: FieldSpec) -> Subspace {
    let cols = m.cols();
    let rr = rref(m, field);
    let mut is_pivot = vec![false; cols];
    for &c in &rr.pivots {
        is_pivot[c] = true;
    }
    let vectors: Vec<Vec<u64>> = (0..cols)
        .filter(|&j| !is_pivot[j])
        .map(|j| {
            let mut v = vec![0; cols];
            v[j] = 1;
            for (k, &pc) in rr.pivots.iter().enumerate() {
                v[pc] = field.neg(rr.matrix.get(k, j));
            }
            v
        })
        .collect();
    if vectors.is_empty() {
        return Subspace::zero(cols);
    }
    Subspace::span_of_vectors(cols, &vectors, field)
}

/// Rank together with the canonical kernel basis.
pub fn rank_kernel(m: &Matrix, field: FieldSpec) -> (usize, Vec<Vec<u64>>) {
    let ker = kernel(m, field);
    (m.cols() - ker.dim(), ker.vectors())
}

/// One solution of `m x = rhs` with free variables set to zero.
pub fn solve(m: &Matrix, rhs: &[u64], field: FieldSpec) -> Result<Option<Vec<u64>>> {
    if rhs.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            rhs.len(),
            m.rows()
        )));
    }
    let aug = Matrix::hstack(m.rows(), &[m, &Matrix::column(rhs)]);
    let rr = rref(&aug, field);
    if rr.pivots.last() == Some(&m.cols()) {
        return Ok(None);
    }
    let mut x = vec![0; m.cols()];
    for (k, &pc) in rr.pivots.iter().enumerate() {
        x[pc] = rr.matrix.get(k, m.cols());
    }
    Ok(Some(x))
}

pub fn inverse(m: &Matrix, field: FieldSpec) -> Option<Matrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let rr = rref(&Matrix::hstack(n, &[m, &Matrix::identity(n)]), field);
    if rr.rank() < n || rr.pivots[n - 1] != n - 1 {
        return None;
    }
    Some(rr.matrix.submatrix(0, n, n, 2 * n))
}

pub fn is_invertible(m: &Matrix, field: FieldSpec) -> bool {
    m.is_square() && rank(m, field) == m.rows()
}

/// Canonical quotient `k^rows / im(m)`.
///
/// `projection` is the quotient map in reduced row echelon form;
/// `representatives[i]` is the coordinate whose unit vector maps to the
/// i-th basis vector of the quotient.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub projection: Matrix,
    pub representatives: Vec<usize>,
}

impl Cokernel {
    pub fn dim(&self) -> usize {
        self.projection.rows()
    }
}

pub fn cokernel(m: &Matrix, field: FieldSpec) -> Cokernel {
    let n = m.rows();
    let image = rref(&m.transpose(), field);
    let k = image.rank();
    let mut is_pivot = vec![false; n];
    for &c in &image.pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    // Row q kills the image: e_j minus the pivot-row contributions.
    let mut proj = Matrix::zeros(free.len(), n);
    for (q, &j) in free.iter().enumerate() {
        proj.set(q, j, 1);
        for (row, &pc) in image.pivots.iter().enumerate().take(k) {
            proj.set(q, pc, field.neg(image.matrix.get(row, j)));
        }
    }
    let rr = rref(&proj, field);
    Cokernel {
        projection: rr.matrix,
        representatives: rr.pivots,
    }
}
