//! Cohomology of twisted ideal sheaves and normal sheaves of determinantal
//! curves, computed from the linear resolution
//! `0 → O(−r−1)^r → O(−r)^{r+1} → I_C → 0`.
//!
//! `H¹` and `H²` of line bundles on ℙ³ vanish, so the long exact sequence
//! gives `h⁰` by counting, `h¹ = 0`, and `h²`, `h³` as the kernel and
//! cokernel of the `H³`-level map. By Serre duality that map is the
//! transpose of multiplication by `φ₂ᵀ` on `S_m^{r+1} → S_{m+1}^r` with
//! `m = r − k − 4`.

use num_traits::Zero;
use thiserror::Error;

use crate::acm_curve::{ideal_piece_dimension, ideal_piece_matrix, ACMCurve};
use crate::exact_algebra::{binomial, graded_matrix, ExactMatrix, MonomialIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("operation requires a certified curve")]
    NotCertified,
    #[error("normal sections are computed for twists 0 and -1, got {0}")]
    UnsupportedTwist(i64),
}

/// `(h⁰, h¹, h², h³)`.
pub type Betti = [i64; 4];

/// `h^i(ℙ³, O(m))`.
pub fn line_bundle_cohomology_p3(m: i64) -> Betti {
    let h0 = if m >= 0 { binomial(m + 3, 3) } else { 0 };
    let h3 = if m <= -4 { binomial(-m - 1, 3) } else { 0 };
    [h0, 0, 0, h3]
}

/// `χ(O(m)) = (m+1)(m+2)(m+3)/6` as a polynomial in `m`.
pub fn euler_characteristic_p3(m: i64) -> i64 {
    (m + 1) * (m + 2) * (m + 3) / 6
}

fn require_certified(c: &ACMCurve) -> Result<(), CohomologyError> {
    if c.is_certified() {
        Ok(())
    } else {
        Err(CohomologyError::NotCertified)
    }
}

/// `h^i(I_C(k))` for a certified curve.
pub fn ideal_cohomology(c: &ACMCurve, k: i64) -> Result<Betti, CohomologyError> {
    require_certified(c)?;
    let r = c.r() as i64;
    let h0 = |m: i64| line_bundle_cohomology_p3(m)[0];
    let zeroth = (r + 1) * h0(k - r) - r * h0(k - r - 1);
    let m = r - k - 4;
    // H³(O(k−r−1))^r → H³(O(k−r))^{r+1}, dual to S_m^{r+1} → S_{m+1}^r.
    let source = r * h0(m + 1);
    let target = (r + 1) * h0(m);
    let rank = if source == 0 || target == 0 {
        0
    } else {
        let dual = graded_matrix(&c.matrix().phi().transpose(), m).expect("φ₂ is linear");
        dual.matrix.transpose().rank() as i64
    };
    Ok([zeroth, 0, source - rank, target - rank])
}

/// `χ(I_C(k))` predicted by the resolution.
pub fn predicted_euler_characteristic(r: usize, k: i64) -> i64 {
    let r = r as i64;
    (r + 1) * euler_characteristic_p3(k - r) - r * euler_characteristic_p3(k - r - 1)
}

/// Ellia's criterion for `H*(N(−2)) = 0`: `I_C(r−1)` and `I_C(r−2)` are
/// acyclic.
pub fn ellia_stability_check(c: &ACMCurve) -> Result<bool, CohomologyError> {
    let r = c.r() as i64;
    Ok(ideal_cohomology(c, r - 1)? == [0; 4] && ideal_cohomology(c, r - 2)? == [0; 4])
}

/// `h⁰(N(twist))` for `twist ∈ {0, −1}`: degree-`twist` module maps
/// `I → S/I`, i.e. tuples `(s_j) ∈ (S/I)_a^{r+1}`, `a = r + twist`, with
/// `Σ_j φ_{jc} s_j ∈ I_{a+1}` for every column `c`.
///
/// Working with lifts to `S_a^{r+1}`, the admissible tuples form the
/// preimage of `I_{a+1}^r` under `M: s ↦ (Σ_j φ_{jc} s_j)_c`. Writing `G`
/// for a spanning matrix of `I_{a+1}^r`, the preimage has dimension
/// `null[M | G] − null(G)`, and the lifts of zero contribute
/// `(r+1)·dim I_a`. All matrices have the minors' integer coefficients.
pub fn normal_sections(c: &ACMCurve, twist: i64) -> Result<usize, CohomologyError> {
    require_certified(c)?;
    if twist != 0 && twist != -1 {
        return Err(CohomologyError::UnsupportedTwist(twist));
    }
    let r = c.r();
    let a = r as i64 + twist;
    // M: S_a^{r+1} → S_{a+1}^r is multiplication by φ₂ᵀ.
    let m = graded_matrix(&c.matrix().phi().transpose(), a).expect("φ₂ is linear").matrix;
    let target = MonomialIndex::new(4, a + 1).len();
    let spanning = ideal_piece_matrix(c.minors(), a + 1).map(|g| g.transpose());
    let g = match &spanning {
        Some(block) => {
            let mut g = ExactMatrix::zeros(r * target, r * block.cols());
            for copy in 0..r {
                for i in 0..target {
                    for j in 0..block.cols() {
                        if !block[(i, j)].is_zero() {
                            g[(copy * target + i, copy * block.cols() + j)] = block[(i, j)].clone();
                        }
                    }
                }
            }
            g
        }
        None => ExactMatrix::zeros(r * target, 0),
    };
    let nullity = |x: &ExactMatrix| x.cols() - x.rank();
    let preimage = nullity(&m.hstack(&g)) - nullity(&g);
    let lifts_of_zero = (r + 1) * ideal_piece_dimension(c.minors(), a);
    Ok(preimage - lifts_of_zero)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyRow {
    pub k: i64,
    pub ideal: Betti,
    /// `h⁰(O_C(k)) = h⁰(O(k)) − h⁰(I_C(k))`, using `h¹(I_C(k)) = 0`.
    pub structure_h0: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyTable {
    pub r: usize,
    pub rows: Vec<CohomologyRow>,
}

impl CohomologyTable {
    pub fn compute(c: &ACMCurve, twists: impl IntoIterator<Item = i64>) -> Result<Self, CohomologyError> {
        let rows = twists
            .into_iter()
            .map(|k| {
                let ideal = ideal_cohomology(c, k)?;
                Ok(CohomologyRow {
                    k,
                    ideal,
                    structure_h0: line_bundle_cohomology_p3(k)[0] - ideal[0],
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { r: c.r(), rows })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalSheafReport {
    pub h0_n: usize,
    pub h0_n_minus1: usize,
    pub stability: bool,
}

pub fn normal_sheaf_report(c: &ACMCurve) -> Result<NormalSheafReport, CohomologyError> {
    Ok(NormalSheafReport {
        h0_n: normal_sections(c, 0)?,
        h0_n_minus1: normal_sections(c, -1)?,
        stability: ellia_stability_check(c)?,
    })
}
