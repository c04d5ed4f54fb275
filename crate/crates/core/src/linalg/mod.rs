//! Exact linear algebra over a prime field.

mod field;
mod matrix;
mod poly;

pub use field::{FieldSpec, DEFAULT_PRIME};
pub use matrix::{
    cokernel, inverse, is_invertible, kernel, rank, rank_kernel, rref, solve, Cokernel, Matrix,
    Rref, Subspace,
};
pub use poly::{charpoly, charpoly_factor, expand, factor, merge_factors, square_free, Poly};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (0usize..6, 0usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u64..4, r * c)
                .prop_map(move |v| Matrix::from_fn(r, c, |i, j| v[i * c + j]))
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(m in arb_matrix()) {
            let f = FieldSpec::default();
            let (r, ker) = rank_kernel(&m, f);
            prop_assert_eq!(r + ker.len(), m.cols());
            for v in &ker {
                prop_assert!(m.mul_vec(v, f).iter().all(|&x| x == 0));
            }
            prop_assert_eq!(Subspace::span_of_vectors(m.cols(), &ker, f).dim(), ker.len());
        }

        #[test]
        fn solutions_substitute_back(m in arb_matrix(), seed in 0u64..1000) {
            let f = FieldSpec::default();
            let rhs: Vec<u64> = (0..m.rows()).map(|i| (seed * 31 + i as u64 * 7) % 4).collect();
            if let Some(x) = solve(&m, &rhs, f).unwrap() {
                prop_assert_eq!(m.mul_vec(&x, f), rhs);
            }
        }
    }
}
