use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Matrix};

/// Univariate polynomial over GF(p), coefficients lowest degree first.
/// The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    /// `x`
    pub fn x() -> Self {
        Poly { coeffs: vec![0, 1] }
    }

    /// `x - a`
    pub fn linear(a: u64, field: FieldSpec) -> Self {
        Poly::new(vec![field.neg(a), 1])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self, field: FieldSpec) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = field.inv(self.leading());
        Poly::new(self.coeffs.iter().map(|&c| field.mul(c, inv)).collect())
    }

    pub fn add(&self, other: &Poly, field: FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    field.add(
                        self.coeffs.get(i).copied().unwrap_or(0),
                        other.coeffs.get(i).copied().unwrap_or(0),
                    )
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly, field: FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    field.sub(
                        self.coeffs.get(i).copied().unwrap_or(0),
                        other.coeffs.get(i).copied().unwrap_or(0),
                    )
                })
                .collect(),
        )
    }

    pub fn scale(&self, c: u64, field: FieldSpec) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, field: FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % field.p;
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder. Panics when dividing by zero.
    pub fn div_rem(&self, divisor: &Poly, field: FieldSpec) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let inv = field.inv(divisor.leading());
        let dl = divisor.coeffs.len();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dl + 1];
        for k in (0..quot.len()).rev() {
            let c = field.mul(rem[k + dl - 1], inv);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            let nc = field.neg(c);
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = (rem[k + j] + nc * d) % field.p;
            }
        }
        rem.truncate(dl - 1);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly, field: FieldSpec) -> Poly {
        self.div_rem(divisor, field).1
    }

    pub fn div_exact(&self, divisor: &Poly, field: FieldSpec) -> Poly {
        let (q, r) = self.div_rem(divisor, field);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly, field: FieldSpec) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, field);
            a = b;
            b = r;
        }
        a.monic(field)
    }

    pub fn derivative(&self, field: FieldSpec) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| field.mul(c, i as u64 % field.p))
                .collect(),
        )
    }

    pub fn mul_mod(&self, other: &Poly, modulus: &Poly, field: FieldSpec) -> Poly {
        self.mul(other, field).rem(modulus, field)
    }

    pub fn pow_mod(&self, mut e: u128, modulus: &Poly, field: FieldSpec) -> Poly {
        let mut acc = Poly::one().rem(modulus, field);
        let mut base = self.rem(modulus, field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus, field);
            }
            base = base.mul_mod(&base, modulus, field);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64, field: FieldSpec) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| field.add(field.mul(acc, x), c))
    }

    /// Evaluates the polynomial at a square matrix (Horner).
    pub fn eval_matrix(&self, m: &Matrix, field: FieldSpec) -> Matrix {
        let n = m.rows();
        let mut acc = Matrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .mul(m, field)
                .add(&Matrix::identity(n).scale(c, field), field);
        }
        acc
    }

    pub fn pow(&self, e: usize, field: FieldSpec) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self, field))
    }

    /// Canonical order: degree, then the negated coefficients compared from
    /// the top down. Linear factors `x - a` are thus ordered by `a`.
    pub fn canonical_cmp(&self, other: &Poly, field: FieldSpec) -> Ordering {
        let key = |q: &Poly| -> Vec<u64> { q.coeffs.iter().rev().map(|&c| field.neg(c)).collect() };
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| key(self).cmp(&key(other)))
    }
}

/// Characteristic polynomial `det(x I - m)`, via reduction to Hessenberg
/// form. Valid over every prime field.
pub fn charpoly(m: &Matrix, field: FieldSpec) -> Result<Poly> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut h = m.clone();
    for j in 0..n.saturating_sub(2) {
        let Some(i) = (j + 1..n).find(|&i| h.get(i, j) != 0) else {
            continue;
        };
        if i != j + 1 {
            for c in 0..n {
                let t = h.get(i, c);
                h.set(i, c, h.get(j + 1, c));
                h.set(j + 1, c, t);
            }
            for r in 0..n {
                let t = h.get(r, i);
                h.set(r, i, h.get(r, j + 1));
                h.set(r, j + 1, t);
            }
        }
        let inv = field.inv(h.get(j + 1, j));
        for k in j + 2..n {
            let u = field.mul(h.get(k, j), inv);
            if u == 0 {
                continue;
            }
            for c in 0..n {
                let v = field.sub(h.get(k, c), field.mul(u, h.get(j + 1, c)));
                h.set(k, c, v);
            }
            for r in 0..n {
                let v = field.add(h.get(r, j + 1), field.mul(u, h.get(r, k)));
                h.set(r, j + 1, v);
            }
        }
    }
    // 1-indexed recurrence over leading principal minors
    let hh = |a: usize, b: usize| h.get(a - 1, b - 1);
    let mut polys: Vec<Poly> = vec![Poly::one()];
    for mm in 1..=n {
        let mut pm = Poly::linear(hh(mm, mm), field).mul(&polys[mm - 1], field);
        let mut t = 1u64;
        for i in 1..mm {
            t = field.mul(t, hh(mm - i + 1, mm - i));
            let c = field.mul(hh(mm - i, mm), t);
            if c != 0 {
                pm = pm.sub(&polys[mm - i - 1].scale(c, field), field);
            }
        }
        polys.push(pm);
    }
    Ok(polys.pop().unwrap())
}

/// Square-free decomposition of a monic polynomial: pairs `(g, i)` with
/// `f = prod g^i`, each `g` square-free and the `g` pairwise coprime.
pub fn square_free(f: &Poly, field: FieldSpec) -> Vec<(Poly, usize)> {
    let f = f.monic(field);
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative(field), field);
    let mut w = f.div_exact(&c, field);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c, field);
        let z = w.div_exact(&y, field);
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w, field);
    }
    if !c.is_one() {
        // c is a p-th power
        let p = field.p as usize;
        let root = Poly::new(c.coeffs.iter().step_by(p).copied().collect());
        for (g, j) in square_free(&root, field) {
            out.push((g, j * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(f: &Poly, field: FieldSpec) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut g = f.clone();
    let x = Poly::x();
    let mut h = x.clone();
    let mut d = 1;
    while g.deg() >= 2 * d {
        h = h.pow_mod(field.p as u128, &g, field);
        let part = h.sub(&x, field).gcd(&g, field);
        if !part.is_one() {
            g = g.div_exact(&part, field);
            h = h.rem(&g, field);
            out.push((part, d));
        }
        d += 1;
    }
    if g.deg() > 0 {
        let dg = g.deg();
        out.push((g, dg));
    }
    out
}

/// Splits `f`, a product of distinct irreducibles of degree `d`.
fn equal_degree(f: &Poly, d: usize, field: FieldSpec, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    loop {
        let a = Poly::new((0..n).map(|_| rng.random_range(0..field.p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if field.p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f, field);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul_mod(&t, f, field);
                acc = acc.add(&t, field);
            }
            acc
        } else {
            // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p-1)/2)
            let mut t = a.rem(f, field);
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.pow_mod(field.p as u128, f, field);
                norm = norm.mul_mod(&t, f, field);
            }
            norm.pow_mod(((field.p - 1) / 2) as u128, f, field)
                .sub(&Poly::one(), field)
        };
        let g = b.gcd(f, field);
        if !g.is_one() && g.deg() < n && !g.is_zero() {
            let mut out = equal_degree(&g, d, field, rng);
            out.extend(equal_degree(&f.div_exact(&g, field), d, field, rng));
            return out;
        }
    }
}

/// Irreducible factorization of a nonzero polynomial made monic, as
/// `(monic irreducible, multiplicity)` in canonical order.
pub fn factor(f: &Poly, field: FieldSpec) -> Vec<(Poly, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b6d6f64);
    let mut out: Vec<(Poly, usize)> = Vec::new();
    for (sf, mult) in square_free(f, field) {
        for (part, d) in distinct_degree(&sf, field) {
            for irr in equal_degree(&part, d, field, &mut rng) {
                out.push((irr.monic(field), mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0, field));
    out
}

/// Factorization of the characteristic polynomial of a square matrix.
pub fn charpoly_factor(m: &Matrix, field: FieldSpec) -> Result<Vec<(Poly, usize)>> {
    Ok(factor(&charpoly(m, field)?, field))
}

/// Multiplies out a factorization.
pub fn expand(factors: &[(Poly, usize)], field: FieldSpec) -> Poly {
    factors
        .iter()
        .fold(Poly::one(), |acc, (g, e)| acc.mul(&g.pow(*e, field), field))
}

/// Merges factor lists, adding multiplicities of equal factors.
pub fn merge_factors(
    lists: impl IntoIterator<Item = Vec<(Poly, usize)>>,
    field: FieldSpec,
) -> Vec<(Poly, usize)> {
    let mut out: Vec<(Poly, usize)> = Vec::new();
    for list in lists {
        for (g, e) in list {
            match out.iter_mut().find(|(h, _)| *h == g) {
                Some(entry) => entry.1 += e,
                None => out.push((g, e)),
            }
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0, field));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    /// Independent oracle: det(x I - m) by cofactor expansion over Poly.
    fn cofactor_charpoly(m: &Matrix, field: FieldSpec) -> Poly {
        let n = m.rows();
        let entries: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = Poly::new(vec![field.neg(m.get(i, j))]);
                        if i == j {
                            c.add(&Poly::x(), field)
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        fn det(a: &[Vec<Poly>], field: FieldSpec) -> Poly {
            let n = a.len();
            if n == 0 {
                return Poly::one();
            }
            let mut acc = Poly::zero();
            for j in 0..n {
                let minor: Vec<Vec<Poly>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = a[0][j].mul(&det(&minor, field), field);
                acc = if j % 2 == 0 {
                    acc.add(&term, field)
                } else {
                    acc.sub(&term, field)
                };
            }
            acc
        }
        det(&entries, field)
    }

    #[test]
    fn identity_factors() {
        let fs = charpoly_factor(&Matrix::identity(2), f()).unwrap();
        assert_eq!(fs, vec![(Poly::linear(1, f()), 2)]);
    }

    #[test]
    fn diagonal_distinct() {
        let mut d = Matrix::zeros(2, 2);
        d.set(0, 0, 1);
        d.set(1, 1, 2);
        let fs = charpoly_factor(&d, f()).unwrap();
        assert_eq!(
            fs,
            vec![(Poly::linear(1, f()), 1), (Poly::linear(2, f()), 1)]
        );
    }

    #[test]
    fn nilpotent_jordan_block() {
        let mut j = Matrix::zeros(3, 3);
        j.set(0, 1, 1);
        j.set(1, 2, 1);
        assert_eq!(charpoly_factor(&j, f()).unwrap(), vec![(Poly::x(), 3)]);
    }

    #[test]
    fn non_square_rejected() {
        assert!(charpoly_factor(&Matrix::zeros(2, 3), f()).is_err());
    }

    #[test]
    fn irreducible_quadratic_over_small_field() {
        // x^2 + 1 is irreducible over GF(7)
        let f7 = FieldSpec::new(7).unwrap();
        let g = Poly::new(vec![1, 0, 1]);
        assert_eq!(factor(&g, f7), vec![(g.clone(), 1)]);
        // (x^2+1)^2 (x+3) over GF(7)
        let h = g.mul(&g, f7).mul(&Poly::new(vec![3, 1]), f7);
        assert_eq!(factor(&h, f7), vec![(Poly::new(vec![3, 1]), 1), (g, 2)]);
    }

    #[test]
    fn pth_powers_in_characteristic_two_and_three() {
        for p in [2u64, 3] {
            let fp = FieldSpec::new(p).unwrap();
            let g = Poly::new(vec![1, 1]);
            let h = g.pow(p as usize + 1, fp);
            assert_eq!(factor(&h, fp), vec![(g.clone(), p as usize + 1)]);
        }
        let f2 = FieldSpec::new(2).unwrap();
        let g = Poly::new(vec![1, 1, 1]); // x^2+x+1
        let q = Poly::new(vec![1, 1, 0, 1]); // x^3+x+1
        let prod = g.mul(&q, f2).mul(&g, f2);
        assert_eq!(factor(&prod, f2), vec![(g, 2), (q, 1)]);
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..=5).prop_flat_map(|n| {
            proptest::collection::vec(0u64..10007, n * n)
                .prop_map(move |v| Matrix::from_fn(n, n, |i, j| v[i * n + j]))
        })
    }

    fn structured_matrix() -> impl Strategy<Value = Matrix> {
        // small entries hit repeated and shared eigenvalues often
        (1usize..=5).prop_flat_map(|n| {
            proptest::collection::vec(0u64..3, n * n)
                .prop_map(move |v| Matrix::from_fn(n, n, |i, j| v[i * n + j]))
        })
    }

    proptest! {
        #[test]
        fn charpoly_matches_cofactor_oracle(m in small_matrix()) {
            prop_assert_eq!(charpoly(&m, f()).unwrap(), cofactor_charpoly(&m, f()));
        }

        #[test]
        fn factorization_expands_back(m in structured_matrix()) {
            let cp = cofactor_charpoly(&m, f());
            let fs = charpoly_factor(&m, f()).unwrap();
            prop_assert_eq!(expand(&fs, f()), cp);
            for (g, _) in &fs {
                prop_assert_eq!(g.leading(), 1);
            }
        }

        #[test]
        fn factors_small_field(m in structured_matrix()) {
            let f5 = FieldSpec::new(5).unwrap();
            let cp = cofactor_charpoly(&m, f5);
            let fs = factor(&cp, f5);
            prop_assert_eq!(expand(&fs, f5), cp);
            // irreducibility by brute force: no root and, for quartics,
            // no monic quadratic divisor
            for (g, _) in &fs {
                let d = g.degree().unwrap();
                if d >= 2 {
                    for a in 0..5 {
                        prop_assert!(g.eval(a, f5) != 0);
                    }
                }
                if d == 4 {
                    for c0 in 0..5 {
                        for c1 in 0..5 {
                            let q = Poly::new(vec![c0, c1, 1]);
                            prop_assert!(!g.rem(&q, f5).is_zero());
                        }
                    }
                }
            }
        }

        #[test]
        fn rank_of_transpose(m in small_matrix()) {
            use crate::linalg::rank;
            prop_assert_eq!(rank(&m, f()), rank(&m.transpose(), f()));
        }
    }
}
