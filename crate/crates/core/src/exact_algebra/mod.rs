//! Exact arithmetic over ℚ(i) and graded polynomial linear algebra.
//!
//! Every certified statement made elsewhere in the crate (ranks of pencils,
//! dimensions of ideal pieces, kernels of induced maps) bottoms out in the
//! rank and kernel routines of [`ExactMatrix`]. No floating point is used here.

mod gaussian;
mod graded;
mod matrix;
mod modular;
mod poly;

pub use gaussian::{GaussianRational, LiteralError};
pub use graded::{graded_matrix, GradedError, GradedMap, PolyMatrix};
pub use matrix::ExactMatrix;
pub use modular::MODULUS;
pub use poly::{monomial_basis, monomial_count, Exponent, HomogPoly, MonomialIndex, PolyError, UniPoly};

/// `C(n, k)` for non-negative arguments, 0 when `k > n`.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: i64 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}
