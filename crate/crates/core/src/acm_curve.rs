//! Determinantal curves `C ⊂ ℙ³` cut out by the maximal minors of an
//! `(r+1) × r` matrix of linear forms `φ₂ = Σ Aᵢxᵢ`, and their fibers over
//! the line `B = {x₃ = x₄ = 0}`'s complement.
//!
//! Such a curve has the linear resolution
//! `0 → O(−r−1)^r → O(−r)^{r+1} → I_C → 0`, degree `r(r+1)/2` and genus
//! `(r−1)(r−2)(2r+3)/6`. Its fiber over `ζ = [1 : t]` is the length-`d`
//! scheme in the plane `x₄ = t·x₃` cut out by the minors of
//! `A₁u + A₂v + (A₃ + tA₄)w`.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact_algebra::{
    binomial, graded_matrix, monomial_basis, Exponent, ExactMatrix, GaussianRational, HomogPoly, MonomialIndex, PolyMatrix,
};
use crate::pencil::{Pencil, RankDropWitness};
use crate::reality::is_sigma_invariant_ideal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AcmError {
    #[error("coefficient matrix A{which} has shape {found:?}, expected {expected:?}")]
    Shape {
        which: usize,
        found: (usize, usize),
        expected: (usize, usize),
    },
    #[error("the curve meets the base line: A₁x₁ + A₂x₂ drops rank at {0}")]
    MeetsBaseLine(RankDropWitness),
    #[error("resolution certification failed: {0}")]
    Resolution(CertificationReport),
    #[error("operation requires a certified curve")]
    NotCertified,
}

/// `φ₂(x) = A₁x₁ + A₂x₂ + A₃x₃ + A₄x₄` with `(r+1) × r` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMatrix {
    r: usize,
    a: [ExactMatrix; 4],
}

impl LinearMatrix {
    pub fn new(a: [ExactMatrix; 4]) -> Result<Self, AcmError> {
        let r = a[0].cols();
        for (k, m) in a.iter().enumerate() {
            if r == 0 || m.shape() != (r + 1, r) {
                return Err(AcmError::Shape {
                    which: k + 1,
                    found: m.shape(),
                    expected: (r + 1, r),
                });
            }
        }
        Ok(Self { r, a })
    }

    /// `Sx₁ + Tx₂ + A₃x₃ + A₄x₄` around a given pencil.
    pub fn from_pencil(p: &Pencil, a3: ExactMatrix, a4: ExactMatrix) -> Result<Self, AcmError> {
        Self::new([p.a1().clone(), p.a2().clone(), a3, a4])
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn coefficients(&self) -> [&ExactMatrix; 4] {
        [&self.a[0], &self.a[1], &self.a[2], &self.a[3]]
    }

    /// `A_{k+1}` for `k ∈ 0..4`.
    pub fn a(&self, k: usize) -> &ExactMatrix {
        &self.a[k]
    }

    pub fn pencil(&self) -> Pencil {
        Pencil::new(self.a[0].clone(), self.a[1].clone()).expect("shapes checked on construction")
    }

    pub fn phi(&self) -> PolyMatrix {
        PolyMatrix::linear(&self.a)
    }

    /// `(G A₁ H, …, G A₄ H)`.
    pub fn gauge(&self, g: &ExactMatrix, h: &ExactMatrix) -> Self {
        Self {
            r: self.r,
            a: std::array::from_fn(|k| &(g * &self.a[k]) * h),
        }
    }

    /// The `r+1` maximal minors; minor `j` is `(−1)^j det(φ₂ without row j)`.
    pub fn maximal_minors(&self) -> Vec<HomogPoly> {
        let refs: Vec<&ExactMatrix> = self.a.iter().collect();
        signed_maximal_minors(&refs)
    }

    /// The matrix `A₁u + A₂v + (A₃ + tA₄)w` on the fiber plane over `[1 : t]`.
    pub fn fiber_matrix(&self, chart: &FiberChart) -> [ExactMatrix; 3] {
        let third = match chart {
            FiberChart::Affine(t) => &self.a[2] + &self.a[3].scale(t),
            FiberChart::Infinity => self.a[3].clone(),
        };
        [self.a[0].clone(), self.a[1].clone(), third]
    }
}

/// Maximal minors of `Σ_k coeffs[k]·x_k` (an `(r+1) × r` matrix of linear
/// forms in `coeffs.len()` variables) with alternating cofactor signs.
pub fn signed_maximal_minors(coeffs: &[&ExactMatrix]) -> Vec<HomogPoly> {
    let n = coeffs.len();
    let (rows, r) = coeffs[0].shape();
    assert_eq!(rows, r + 1);
    let entry = |i: usize, j: usize| {
        let c: Vec<GaussianRational> = coeffs.iter().map(|m| m[(i, j)].clone()).collect();
        HomogPoly::linear(&c)
    };
    let forms: Vec<Vec<HomogPoly>> = (0..=r).map(|i| (0..r).map(|j| entry(i, j)).collect()).collect();
    (0..=r)
        .map(|skip| {
            let kept: Vec<&Vec<HomogPoly>> = forms.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, f)| f).collect();
            let det = determinant_of_forms(&kept, n);
            if skip % 2 == 0 {
                det
            } else {
                -&det
            }
        })
        .collect()
}

/// Determinant of a square matrix of linear forms by dynamic programming
/// over column subsets (row `k` is matched after rows `0..k`).
fn determinant_of_forms(rows: &[&Vec<HomogPoly>], num_vars: usize) -> HomogPoly {
    let r = rows.len();
    let mut table: Vec<Option<HomogPoly>> = vec![None; 1 << r];
    table[0] = Some(HomogPoly::constant(num_vars, GaussianRational::one()));
    for mask in 0usize..(1 << r) {
        let Some(current) = table[mask].take() else {
            continue;
        };
        let k = mask.count_ones() as usize;
        if k == r {
            table[mask] = Some(current);
            continue;
        }
        for c in 0..r {
            if mask & (1 << c) != 0 || rows[k][c].is_zero() {
                continue;
            }
            let larger = (mask >> (c + 1)).count_ones();
            let mut term = &current * &rows[k][c];
            if larger % 2 == 1 {
                term = -&term;
            }
            let slot = &mut table[mask | (1 << c)];
            *slot = Some(match slot.take() {
                Some(acc) => &acc + &term,
                None => term,
            });
        }
    }
    table[(1 << r) - 1].take().unwrap_or_else(|| HomogPoly::zero(num_vars, r as u32))
}

/// `(d, g) = (r(r+1)/2, (r−1)(r−2)(2r+3)/6)`.
pub fn invariants(r: usize) -> (i64, i64) {
    let r = r as i64;
    (r * (r + 1) / 2, (r - 1) * (r - 2) * (2 * r + 3) / 6)
}

/// `dim_k` of the ideal predicted by the linear resolution:
/// `(r+1)·h⁰(O(k−r)) − r·h⁰(O(k−r−1))`.
pub fn predicted_ideal_dimension(r: usize, k: i64) -> i64 {
    let r_ = r as i64;
    let h0 = |m: i64| binomial(m + 3, 3);
    (r_ + 1) * h0(k - r_) - r_ * h0(k - r_ - 1)
}

/// Dimension of the degree-`k` piece of the ideal generated by the forms
/// `gens` in their polynomial ring.
pub fn ideal_piece_dimension(gens: &[HomogPoly], k: i64) -> usize {
    ideal_piece_matrix(gens, k).map_or(0, |m| m.rank())
}

/// Rows: coefficient vectors of `monomial · generator` in degree `k`.
/// Generators may have different degrees.
pub(crate) fn ideal_piece_matrix(gens: &[HomogPoly], k: i64) -> Option<ExactMatrix> {
    let usable: Vec<(&HomogPoly, Vec<Exponent>)> = gens
        .iter()
        .filter(|g| !g.is_zero() && g.degree() as i64 <= k)
        .map(|g| (g, monomial_basis(g.num_vars(), k - g.degree() as i64)))
        .collect();
    let n = usable.first()?.0.num_vars();
    let target = MonomialIndex::new(n, k);
    let total: usize = usable.iter().map(|(_, m)| m.len()).sum();
    let mut m = ExactMatrix::zeros(total, target.len());
    let mut row = 0;
    for (g, monos) in &usable {
        for mono in monos {
            for (e, c) in g.terms() {
                let prod: Vec<u32> = e.iter().zip(mono).map(|(a, b)| a + b).collect();
                m[(row, target.position(&prod).expect("product monomial"))] = c.clone();
            }
            row += 1;
        }
    }
    Some(m)
}

/// Flags recorded on an [`ACMCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CertificationFlags {
    pub base_avoiding: bool,
    pub resolution_exact: bool,
    pub sigma_invariant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCheck {
    pub k: i64,
    pub actual: i64,
    pub predicted: i64,
}

/// Graded dimensions of the minors ideal against the resolution's
/// prediction for `k = 0..=2r+2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificationReport {
    pub checks: Vec<DegreeCheck>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.actual == c.predicted)
    }

    pub fn mismatches(&self) -> Vec<&DegreeCheck> {
        self.checks.iter().filter(|c| c.actual != c.predicted).collect()
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad = self.mismatches();
        if bad.is_empty() {
            return write!(f, "all graded dimensions agree");
        }
        let parts: Vec<String> = bad
            .iter()
            .map(|c| format!("k={} actual={} predicted={}", c.k, c.actual, c.predicted))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A determinantal curve with its minors and certification state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ACMCurve {
    matrix: LinearMatrix,
    minors: Vec<HomogPoly>,
    flags: CertificationFlags,
}

impl ACMCurve {
    /// Wraps a linear matrix without certifying it.
    pub fn new(matrix: LinearMatrix) -> Self {
        let minors = matrix.maximal_minors();
        Self {
            matrix,
            minors,
            flags: CertificationFlags::default(),
        }
    }

    /// Runs base-avoidance, resolution certification and the σ-invariance
    /// test. Fails on the first two; σ-invariance is only recorded.
    pub fn certify(mut self) -> Result<Self, AcmError> {
        if let Some(w) = self.matrix.pencil().rank_drop_witness() {
            return Err(AcmError::MeetsBaseLine(w));
        }
        self.flags.base_avoiding = true;
        let report = certify_resolution(&self);
        if !report.passed() {
            return Err(AcmError::Resolution(report));
        }
        self.flags.resolution_exact = true;
        self.flags.sigma_invariant =
            is_sigma_invariant_ideal(&self.minors, self.r() as u32).expect("minors are homogeneous of degree r");
        Ok(self)
    }

    pub fn matrix(&self) -> &LinearMatrix {
        &self.matrix
    }

    pub fn minors(&self) -> &[HomogPoly] {
        &self.minors
    }

    pub fn r(&self) -> usize {
        self.matrix.r()
    }

    pub fn degree(&self) -> i64 {
        invariants(self.r()).0
    }

    pub fn genus(&self) -> i64 {
        invariants(self.r()).1
    }

    pub fn flags(&self) -> CertificationFlags {
        self.flags
    }

    pub fn is_certified(&self) -> bool {
        self.flags.base_avoiding && self.flags.resolution_exact
    }
}

pub fn avoids_base_line(c: &ACMCurve) -> bool {
    crate::pencil::is_injective_pencil(&c.matrix.pencil())
}

/// Compares the graded dimensions of the minors ideal with the linear
/// resolution for `k = 0..=2r+2`. Works on any curve; a matrix whose minors
/// share a factor (which forces the curve to meet `B`) shows up as a
/// mismatch rather than a panic.
pub fn certify_resolution(c: &ACMCurve) -> CertificationReport {
    let r = c.r();
    let phi = c.matrix.phi();
    let syzygies = cramer_syzygies_hold(&phi, &c.minors);
    let checks = (0..=(2 * r as i64 + 2))
        .map(|k| {
            let predicted = predicted_ideal_dimension(r, k);
            let actual = if syzygies && sandwich_closes(c, &phi, k, predicted) {
                predicted
            } else {
                ideal_piece_dimension(&c.minors, k) as i64
            };
            DegreeCheck { k, actual, predicted }
        })
        .collect();
    CertificationReport { checks }
}

/// `Σ_j φ_{jc}·m_j = 0` for every column `c`: expanding the determinant of
/// `φ` with column `c` repeated.
fn cramer_syzygies_hold(phi: &PolyMatrix, minors: &[HomogPoly]) -> bool {
    (0..phi.cols()).all(|c| {
        let mut acc = HomogPoly::zero(phi.num_vars(), minors[0].degree() + 1);
        for (j, m) in minors.iter().enumerate() {
            acc = &acc + &(phi.get(j, c) * m);
        }
        acc.is_zero()
    })
}

/// Certifies `dim I_k = predicted` without exact elimination. The rank of
/// the multiplication map mod a prime bounds `dim I_k` from below; the
/// Cramer syzygies inject `(S_{k−r−1})^r` into its kernel, so when their
/// mod-p rank is full, `dim I_k ≤ (r+1)·h⁰(O(k−r)) − r·h⁰(O(k−r−1))`.
fn sandwich_closes(c: &ACMCurve, phi: &PolyMatrix, k: i64, predicted: i64) -> bool {
    let r = c.r() as i64;
    let lower = match ideal_piece_matrix(&c.minors, k) {
        Some(m) => m.modular_rank(),
        None => Some(0),
    };
    if lower != Some(predicted as usize) {
        return false;
    }
    let source = k - r - 1;
    if source < 0 {
        return true;
    }
    let syz = graded_matrix(phi, source).expect("φ₂ is linear");
    syz.matrix.modular_rank() == Some(syz.matrix.cols())
}

/// Which fiber of `ℙ³ − B → ℙ¹` to restrict to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberChart {
    /// `ζ = [1 : t]`: the plane `x₄ = t·x₃` with coordinates `(x₁, x₂, x₃)`.
    Affine(GaussianRational),
    /// `ζ = [0 : 1]`: the plane `x₃ = 0` with coordinates `(x₁, x₂, x₄)`.
    Infinity,
}

impl FiberChart {
    /// The chart of the antipodal fiber `−1/ζ̄`.
    pub fn antipode(&self) -> FiberChart {
        match self {
            FiberChart::Affine(t) if t.is_zero() => FiberChart::Infinity,
            FiberChart::Affine(t) => FiberChart::Affine(-t.conj().inv()),
            FiberChart::Infinity => FiberChart::Affine(GaussianRational::zero()),
        }
    }
}

/// A zero-dimensional scheme in a fiber plane, given by homogeneous
/// generators in `(u, v, w)`; setting `w = 1` gives the affine fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberScheme {
    r: usize,
    chart: Option<FiberChart>,
    generators: Vec<HomogPoly>,
}

/// `H(0), …, H(r+2)` of a fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertFunction {
    pub values: Vec<i64>,
}

impl HilbertFunction {
    /// `H(k) = (k+1)(k+2)/2` for `k < r` and `r(r+1)/2` for `k ≥ r`.
    pub fn expected(r: usize) -> Self {
        let d = invariants(r).0;
        let values = (0..=(r as i64 + 2))
            .map(|k| if k < r as i64 { (k + 1) * (k + 2) / 2 } else { d })
            .collect();
        Self { values }
    }

    pub fn is_weakly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

impl FiberScheme {
    /// A fiber scheme from hand-built generators in three variables.
    pub fn from_generators(r: usize, generators: Vec<HomogPoly>) -> Self {
        assert!(generators.iter().all(|g| g.num_vars() == 3));
        Self {
            r,
            chart: None,
            generators,
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn chart(&self) -> Option<&FiberChart> {
        self.chart.as_ref()
    }

    pub fn generators(&self) -> &[HomogPoly] {
        &self.generators
    }

    /// Length of the scheme: the stable value of the Hilbert function.
    pub fn length(&self) -> i64 {
        *self.hilbert_values(self.r as i64 + 2).last().expect("nonempty")
    }

    fn hilbert_values(&self, top: i64) -> Vec<i64> {
        (0..=top)
            .map(|k| monomial_basis(3, k).len() as i64 - ideal_piece_dimension(&self.generators, k) as i64)
            .collect()
    }

    /// Standard monomials `u^a v^b` (as exponents of `(u, v, w)` in degree
    /// `r`) spanning the quotient: the non-pivot columns of the reduced
    /// ideal piece. Has `length()` elements.
    pub fn quotient_basis(&self) -> Vec<Exponent> {
        let k = self.r as i64;
        let basis = monomial_basis(3, k);
        let pivots = ideal_piece_matrix(&self.generators, k).map(|m| m.rref().1).unwrap_or_default();
        basis
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains(i))
            .map(|(_, e)| e)
            .collect()
    }
}

/// The fiber of a certified curve over the given chart.
pub fn restrict_to_fiber(c: &ACMCurve, chart: FiberChart) -> Result<FiberScheme, AcmError> {
    if !c.is_certified() {
        return Err(AcmError::NotCertified);
    }
    let m = c.matrix.fiber_matrix(&chart);
    let refs: Vec<&ExactMatrix> = m.iter().collect();
    Ok(FiberScheme {
        r: c.r(),
        chart: Some(chart),
        generators: signed_maximal_minors(&refs),
    })
}

pub fn fiber_hilbert_function(f: &FiberScheme) -> HilbertFunction {
    HilbertFunction {
        values: f.hilbert_values(f.r as i64 + 2),
    }
}

/// No plane curve of degree `< r` contains the fiber.
pub fn stratum_check(f: &FiberScheme) -> bool {
    let h = fiber_hilbert_function(f);
    (0..f.r).all(|k| h.values[k] == ((k + 1) * (k + 2) / 2) as i64)
}

/// Pushes fiber generators over `[1 : t]` through σ. The results are forms
/// on the antipodal plane over `[1 : t']`, `t' = −1/t̄`, with coordinates
/// `y = σ(x) = (−x̄₂, x̄₁, −t̄·x̄₃)`, i.e. `h(y) = ḡ(y₂, −y₁, t'·y₃)`.
pub fn sigma_fiber_image(gens: &[HomogPoly], t: &GaussianRational) -> Vec<HomogPoly> {
    assert!(!t.is_zero(), "the antipode of t = 0 is the fiber at infinity");
    let t_anti = -t.conj().inv();
    let z = GaussianRational::zero;
    let o = GaussianRational::one;
    let sub = ExactMatrix::from_rows(vec![
        vec![z(), o(), z()],
        vec![-o(), z(), z()],
        vec![z(), z(), t_anti],
    ]);
    gens.iter().map(|g| g.conj().substitute_linear(&sub)).collect()
}

/// Whether two generator lists of one degree span the same space.
pub fn same_span(a: &[HomogPoly], b: &[HomogPoly]) -> bool {
    let Some(first) = a.iter().chain(b).find(|g| !g.is_zero()) else {
        return true;
    };
    let idx = MonomialIndex::new(first.num_vars(), first.degree() as i64);
    let rows = |v: &[HomogPoly]| -> Vec<Vec<GaussianRational>> {
        v.iter().map(|g| g.coefficients(&idx)).collect()
    };
    let ma = ExactMatrix::from_rows(rows(a));
    let mb = ExactMatrix::from_rows(rows(b));
    let ra = ma.rank();
    ra == mb.rank() && ma.vstack(&mb).rank() == ra
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::test_support::{random_gauss, random_invertible};
    use crate::pencil::CanonicalPair;
    use crate::reality::{make_sigma_invariant_pencil, QuaternionicStructure};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn canonical_with(r: usize, a3: ExactMatrix, a4: ExactMatrix) -> LinearMatrix {
        LinearMatrix::from_pencil(&Pencil::canonical(r), a3, a4).unwrap()
    }

    fn var(i: usize) -> HomogPoly {
        HomogPoly::var(4, i)
    }

    #[test]
    fn line_minors() {
        let m = canonical_with(1, ExactMatrix::zeros(2, 1), ExactMatrix::zeros(2, 1));
        assert_eq!(m.maximal_minors(), vec![var(1), -&var(0)]);
    }

    #[test]
    fn twisted_cubic_shape_minors() {
        let m = canonical_with(2, ExactMatrix::zeros(3, 2), ExactMatrix::zeros(3, 2));
        // Sx₁+Tx₂ = [[x₁,0],[x₂,x₁],[0,x₂]]
        let (x1, x2) = (var(0), var(1));
        assert_eq!(m.maximal_minors(), vec![&x2 * &x2, -&(&x1 * &x2), &x1 * &x1]);
    }

    #[test]
    fn minors_match_cofactor_oracle() {
        // Evaluate at random points and compare with determinants of the
        // evaluated scalar matrices.
        use crate::exact_algebra::test_support::laplace_det;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for r in 1..=5 {
            let a: [ExactMatrix; 4] = std::array::from_fn(|_| ExactMatrix::from_fn(r + 1, r, |_, _| random_gauss(&mut rng, 2)));
            let m = LinearMatrix::new(a).unwrap();
            let minors = m.maximal_minors();
            assert!(minors.iter().all(|p| p.is_zero() || p.degree() == r as u32));
            let x: Vec<GaussianRational> = (0..4).map(|_| random_gauss(&mut rng, 3)).collect();
            let mut at = ExactMatrix::zeros(r + 1, r);
            for k in 0..4 {
                at = &at + &m.a(k).scale(&x[k]);
            }
            for (j, p) in minors.iter().enumerate() {
                let rows: Vec<usize> = (0..=r).filter(|&i| i != j).collect();
                let cols: Vec<usize> = (0..r).collect();
                let det = laplace_det(&at.submatrix(&rows, &cols));
                let expected = if j % 2 == 0 { det } else { -det };
                assert_eq!(p.evaluate(&x), expected);
            }
        }
    }

    #[test]
    fn invariant_values() {
        assert_eq!(invariants(1), (1, 0));
        assert_eq!(invariants(2), (3, 0));
        assert_eq!(invariants(3), (6, 3));
        assert_eq!(invariants(4), (10, 11));
    }

    #[test]
    fn base_line_detection() {
        let c = CanonicalPair::new(2);
        let z = ExactMatrix::zeros(3, 2);
        let good = ACMCurve::new(canonical_with(2, z.clone(), z.clone()));
        assert!(avoids_base_line(&good));
        let bad = ACMCurve::new(LinearMatrix::new([c.s.clone(), c.s.clone(), z.clone(), z.clone()]).unwrap());
        assert!(!avoids_base_line(&bad));
        assert!(matches!(bad.certify(), Err(AcmError::MeetsBaseLine(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let moved = good.matrix().gauge(&random_invertible(&mut rng, 3), &random_invertible(&mut rng, 2));
        assert!(avoids_base_line(&ACMCurve::new(moved)));
    }

    #[test]
    fn predicted_dimensions() {
        // Line: the ideal (x₂, x₁) has 2 linear and 10 − 3 = 7 quadratic forms.
        assert_eq!(predicted_ideal_dimension(1, 1), 2);
        assert_eq!(predicted_ideal_dimension(1, 2), 7);
        // Twisted cubic: 3 quadrics, 10 = 20 − 10 cubics.
        assert_eq!(predicted_ideal_dimension(2, 2), 3);
        assert_eq!(predicted_ideal_dimension(2, 3), 10);
        for r in 1..6 {
            // For k ≥ r the complement is the Hilbert polynomial d·k + 1 − g.
            let (d, g) = invariants(r);
            for k in r as i64..(3 * r as i64) {
                assert_eq!(binomial(k + 3, 3) - predicted_ideal_dimension(r, k), d * k + 1 - g);
            }
        }
    }

    #[test]
    fn certification_of_generated_curves() {
        for r in 1..=3 {
            let c = ACMCurve::new(make_sigma_invariant_pencil(r, 3).unwrap()).certify().unwrap();
            assert!(c.is_certified() && c.flags().sigma_invariant);
        }
        let r2 = ACMCurve::new(make_sigma_invariant_pencil(2, 1).unwrap());
        let report = certify_resolution(&r2);
        assert_eq!(report.checks[2].actual, 3);
        let idx = MonomialIndex::new(4, 2);
        let span = ExactMatrix::from_rows(r2.minors().iter().map(|p| p.coefficients(&idx)).collect());
        assert_eq!(span.rank(), 3);
    }

    #[test]
    fn dependent_rows_fail_with_degree() {
        // Row 2 = row 0 + 2·row 1: every minor is a multiple of one quadric.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a: [ExactMatrix; 4] = std::array::from_fn(|_| {
            let top = ExactMatrix::from_fn(2, 2, |_, _| random_gauss(&mut rng, 3));
            let last: Vec<GaussianRational> = (0..2).map(|j| &top[(0, j)] + &(&top[(1, j)] * &g("2"))).collect();
            top.vstack(&ExactMatrix::from_rows(vec![last]))
        });
        let c = ACMCurve::new(LinearMatrix::new(a).unwrap());
        let report = certify_resolution(&c);
        assert!(!report.passed());
        assert_eq!(report.mismatches()[0].k, 2);
        assert_eq!(report.mismatches()[0].actual, 1);
        assert!(c.certify().is_err());
    }

    #[test]
    fn fibers_have_constant_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for r in 1..=3 {
            let c = ACMCurve::new(make_sigma_invariant_pencil(r, 2).unwrap()).certify().unwrap();
            let (d, _) = invariants(r);
            let mut charts = vec![FiberChart::Affine(g("0")), FiberChart::Infinity, FiberChart::Affine(g("1000-999i"))];
            charts.extend((0..3).map(|_| FiberChart::Affine(random_gauss(&mut rng, 5))));
            for chart in charts {
                let f = restrict_to_fiber(&c, chart).unwrap();
                assert_eq!(f.length(), d);
                assert_eq!(f.quotient_basis().len() as i64, d);
                let h = fiber_hilbert_function(&f);
                assert_eq!(h, HilbertFunction::expected(r));
                assert!(h.is_weakly_increasing());
                assert!(stratum_check(&f));
            }
        }
    }

    #[test]
    fn expected_hilbert_functions() {
        assert_eq!(HilbertFunction::expected(1).values, vec![1, 1, 1, 1]);
        assert_eq!(HilbertFunction::expected(2).values, vec![1, 3, 3, 3, 3]);
        assert_eq!(HilbertFunction::expected(3).values, vec![1, 3, 6, 6, 6, 6]);
    }

    #[test]
    fn line_fiber_is_one_point() {
        let a3 = ExactMatrix::from_rows(vec![vec![g("1+2i")], vec![g("-3")]]);
        let a4 = QuaternionicStructure::new(1).apply(&a3);
        let c = ACMCurve::new(canonical_with(1, a3.clone(), a4.clone())).certify().unwrap();
        let t = g("1/2-1i");
        let f = restrict_to_fiber(&c, FiberChart::Affine(t.clone())).unwrap();
        let tilde = &a3 + &a4.scale(&t);
        // Su + Tv + Ã₃ = 0 ⇒ (u, v) = (−Ã₃₀, −Ã₃₁).
        let p = [-&tilde[(0, 0)], -&tilde[(1, 0)], GaussianRational::one()];
        assert!(f.generators().iter().all(|q| q.evaluate(&p).is_zero()));
        assert_eq!(f.length(), 1);
    }

    #[test]
    fn collinear_points_fail_stratum() {
        // (v, u(u−w)(u−2w)): three points on the line v = 0.
        let u = HomogPoly::var(3, 0);
        let v = HomogPoly::var(3, 1);
        let w = HomogPoly::var(3, 2);
        let cubic = &(&u * &(&u - &w)) * &(&u - &w.scale(&g("2")));
        let gens = vec![v, cubic];
        let f = FiberScheme::from_generators(2, gens);
        assert_eq!(fiber_hilbert_function(&f).values, vec![1, 2, 3, 3, 3]);
        assert!(!stratum_check(&f));
    }

    #[test]
    fn uncertified_fibers_rejected() {
        let c = ACMCurve::new(canonical_with(1, ExactMatrix::zeros(2, 1), ExactMatrix::zeros(2, 1)));
        assert_eq!(restrict_to_fiber(&c, FiberChart::Infinity), Err(AcmError::NotCertified));
    }

    #[test]
    fn gauge_invariance_of_certification() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for r in 2..=3 {
            let m = make_sigma_invariant_pencil(r, 4).unwrap();
            let moved = m.gauge(&random_invertible(&mut rng, r + 1), &random_invertible(&mut rng, r));
            let a = ACMCurve::new(m);
            let b = ACMCurve::new(moved);
            assert_eq!(certify_resolution(&a), certify_resolution(&b));
            let (a, b) = (a.certify().unwrap(), b.certify().unwrap());
            assert!(b.flags().sigma_invariant);
            let t = random_gauss(&mut rng, 4);
            let fa = restrict_to_fiber(&a, FiberChart::Affine(t.clone())).unwrap();
            let fb = restrict_to_fiber(&b, FiberChart::Affine(t)).unwrap();
            assert_eq!(fa.length(), fb.length());
            assert!(same_span(fa.generators(), fb.generators()));
        }
    }

    #[test]
    fn sigma_exchanges_antipodal_fibers() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for r in 1..=3 {
            let c = ACMCurve::new(make_sigma_invariant_pencil(r, 6).unwrap()).certify().unwrap();
            for _ in 0..3 {
                let t = loop {
                    let t = random_gauss(&mut rng, 4);
                    if !t.is_zero() {
                        break t;
                    }
                };
                let here = restrict_to_fiber(&c, FiberChart::Affine(t.clone())).unwrap();
                let anti = FiberChart::Affine(t.clone()).antipode();
                let there = restrict_to_fiber(&c, anti).unwrap();
                assert!(same_span(&sigma_fiber_image(here.generators(), &t), there.generators()));
            }
        }
    }

    #[test]
    fn antipodes() {
        assert_eq!(FiberChart::Affine(g("0")).antipode(), FiberChart::Infinity);
        assert_eq!(FiberChart::Affine(g("1")).antipode(), FiberChart::Affine(g("-1")));
        assert_eq!(FiberChart::Affine(g("1i")).antipode(), FiberChart::Affine(g("-1i")));
        assert_eq!(FiberChart::Affine(g("2")).antipode(), FiberChart::Affine(g("-1/2")));
    }
}
