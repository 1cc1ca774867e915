//! The real structure `σ[x₁,x₂,x₃,x₄] = [−x̄₂, x̄₁, −x̄₄, x̄₃]` of ℙ³ and its
//! action on forms, linear matrices and pencil data.
//!
//! On forms the induced map is `(σ*f)(x) = conj(f(σ(x)))`. It sends the
//! monomial `x₁^a x₂^b x₃^c x₄^e` to `(−1)^{a+c} x₁^b x₂^a x₃^e x₄^c` and
//! conjugates coefficients, so it is antilinear and squares to
//! `(−1)^degree`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::acm_curve::LinearMatrix;
use crate::exact_algebra::{ExactMatrix, GaussianRational, HomogPoly, MonomialIndex};
use crate::pencil::is_injective_pencil;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealityError {
    #[error("σ is undefined at the zero vector")]
    ZeroPoint,
    #[error("generator {index} has degree {found}, expected {expected}")]
    WrongDegree { index: usize, found: u32, expected: u32 },
    #[error("forms must live in 4 variables, got {0}")]
    WrongArity(usize),
    #[error("no admissible σ-invariant pencil for r = {r} after {attempts} attempts")]
    GenerationExhausted { r: usize, attempts: usize },
    #[error("matrix has shape {found:?}, expected {expected:?}")]
    Shape {
        found: (usize, usize),
        expected: (usize, usize),
    },
}

/// Attempts made by [`make_sigma_invariant_pencil`] before giving up.
pub const GENERATION_ATTEMPTS: usize = 64;

pub fn sigma_point(x: &[GaussianRational; 4]) -> Result<[GaussianRational; 4], RealityError> {
    if x.iter().all(Zero::is_zero) {
        return Err(RealityError::ZeroPoint);
    }
    Ok([-x[1].conj(), x[0].conj(), -x[3].conj(), x[2].conj()])
}

/// Coefficient-level rewrite rules of the induced action on forms.
#[derive(Debug, Clone, Copy, Default)]
pub struct SigmaAction;

impl SigmaAction {
    /// Image of a monomial: sign and exponent.
    pub fn monomial(e: &[u32]) -> (bool, Vec<u32>) {
        let negative = (e[0] + e[2]) % 2 == 1;
        (negative, vec![e[1], e[0], e[3], e[2]])
    }

    /// For each monomial of `degree` (in [`MonomialIndex`] order), the
    /// position of its image and whether the sign flips.
    pub fn rewrite_table(degree: u32) -> Vec<(usize, bool)> {
        let idx = MonomialIndex::new(4, degree as i64);
        idx.basis()
            .iter()
            .map(|e| {
                let (neg, img) = Self::monomial(e);
                (idx.position(&img).expect("image monomial"), neg)
            })
            .collect()
    }

    pub fn apply(f: &HomogPoly) -> HomogPoly {
        assert_eq!(f.num_vars(), 4, "σ acts on forms in 4 variables");
        let terms = f.terms().map(|(e, c)| {
            let (neg, img) = Self::monomial(e);
            let c = c.conj();
            (img, if neg { -c } else { c })
        });
        HomogPoly::from_terms(4, f.degree(), terms.collect::<Vec<_>>()).expect("σ preserves degree")
    }

    /// Applies the action to a coefficient vector of the given degree.
    pub fn apply_coefficients(degree: u32, v: &[GaussianRational]) -> Vec<GaussianRational> {
        let table = Self::rewrite_table(degree);
        let mut out = vec![GaussianRational::zero(); v.len()];
        for (c, (target, neg)) in v.iter().zip(table) {
            out[target] = if neg { -c.conj() } else { c.conj() };
        }
        out
    }
}

/// Whether the span of `gens` in degree `degree` is stable under σ*.
pub fn is_sigma_invariant_ideal(gens: &[HomogPoly], degree: u32) -> Result<bool, RealityError> {
    for (index, g) in gens.iter().enumerate() {
        if g.num_vars() != 4 {
            return Err(RealityError::WrongArity(g.num_vars()));
        }
        if !g.is_zero() && g.degree() != degree {
            return Err(RealityError::WrongDegree {
                index,
                found: g.degree(),
                expected: degree,
            });
        }
    }
    let idx = MonomialIndex::new(4, degree as i64);
    let rows: Vec<Vec<GaussianRational>> = gens.iter().map(|g| g.coefficients(&idx)).collect();
    if rows.is_empty() {
        return Ok(true);
    }
    let span = ExactMatrix::from_rows(rows.clone());
    let images: Vec<Vec<GaussianRational>> = rows
        .iter()
        .map(|r| SigmaAction::apply_coefficients(degree, r))
        .collect();
    let both = span.vstack(&ExactMatrix::from_rows(images));
    Ok(both.rank() == span.rank())
}

/// `σ*φ` for `φ = Σ Aᵢxᵢ`: coefficients `(Ā₂, −Ā₁, Ā₄, −Ā₃)`.
pub fn sigma_linear_matrix(m: &LinearMatrix) -> LinearMatrix {
    let [a1, a2, a3, a4] = m.coefficients();
    LinearMatrix::new([a2.conj(), -&a1.conj(), a4.conj(), -&a3.conj()]).expect("shape preserved")
}

/// Signed reversal matrices `(G₀, H₀)` with `G₀(Sx₁+Tx₂)H₀ = σ*(Sx₁+Tx₂)`:
/// `G₀ e_i = (−1)^i e_{r−i}` and `H₀ e_j = (−1)^{r−1−j} e_{r−1−j}`.
pub fn canonical_sigma_gauge(r: usize) -> (ExactMatrix, ExactMatrix) {
    let sign = |k: usize| {
        if k % 2 == 0 {
            GaussianRational::one()
        } else {
            -GaussianRational::one()
        }
    };
    let g = ExactMatrix::from_fn(r + 1, r + 1, |i, j| {
        if i + j == r {
            sign(j)
        } else {
            GaussianRational::zero()
        }
    });
    let h = ExactMatrix::from_fn(r, r, |i, j| {
        if i + j + 1 == r {
            sign(r - 1 - j)
        } else {
            GaussianRational::zero()
        }
    });
    (g, h)
}

/// The antilinear map `τ(A) = G₀ Ā H₀` on `(r+1) × r` matrices. In the
/// canonical gauge a linear matrix `Sx₁ + Tx₂ + A₃x₃ + A₄x₄` is σ-invariant
/// exactly when `A₄ = τ(A₃)`; `τ² = −1`.
#[derive(Debug, Clone)]
pub struct QuaternionicStructure {
    g: ExactMatrix,
    h: ExactMatrix,
}

impl QuaternionicStructure {
    pub fn new(r: usize) -> Self {
        let (g, h) = canonical_sigma_gauge(r);
        Self { g, h }
    }

    pub fn r(&self) -> usize {
        self.h.rows()
    }

    pub fn apply(&self, a: &ExactMatrix) -> ExactMatrix {
        &(&self.g * &a.conj()) * &self.h
    }

    pub fn gauge(&self) -> (&ExactMatrix, &ExactMatrix) {
        (&self.g, &self.h)
    }
}

/// The unique `(A₃, A₄)` with `A₃ + t·A₄ = Ã₃` and `A₄ = τ(A₃)`:
/// `A₃ = (Ã₃ − t·τ(Ã₃)) / (1 + |t|²)`.
pub fn sigma_pair_a34(
    a3_tilde: &ExactMatrix,
    t: &GaussianRational,
) -> Result<(ExactMatrix, ExactMatrix), RealityError> {
    let r = a3_tilde.cols();
    if r == 0 || a3_tilde.rows() != r + 1 {
        return Err(RealityError::Shape {
            found: a3_tilde.shape(),
            expected: (r + 1, r),
        });
    }
    let tau = QuaternionicStructure::new(r);
    let denom = GaussianRational::from_real(GaussianRational::one().re() + t.norm_sqr());
    let a3 = (a3_tilde - &tau.apply(a3_tilde).scale(t)).scale(&denom.inv());
    let a4 = tau.apply(&a3);
    Ok((a3, a4))
}

fn random_entry(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3))
}

/// A random σ-invariant linear matrix with small Gaussian-integer entries.
///
/// For odd `r` the `r+1` rows come in pairs `(R, σ*R)`; for even `r` the `r`
/// columns do. Draws are repeated until `A₁x₁ + A₂x₂` is injective (the
/// curve avoids `B`) and the maximal minors are linearly independent.
pub fn make_sigma_invariant_pencil(r: usize, seed: u64) -> Result<LinearMatrix, RealityError> {
    assert!(r >= 1, "r must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((r as u64) << 48));
    for _ in 0..GENERATION_ATTEMPTS {
        let m = if r % 2 == 1 {
            paired_rows(r, &mut rng)
        } else {
            paired_rows_transposed(r, &mut rng)
        };
        if !is_injective_pencil(&m.pencil()) {
            continue;
        }
        let minors = m.maximal_minors();
        let idx = MonomialIndex::new(4, r as i64);
        let coeffs = ExactMatrix::from_rows(minors.iter().map(|p| p.coefficients(&idx)).collect());
        if coeffs.rank() == r + 1 {
            return Ok(m);
        }
    }
    Err(RealityError::GenerationExhausted {
        r,
        attempts: GENERATION_ATTEMPTS,
    })
}

/// Coefficients of `σ*` on a vector of linear forms `Σ vₖ xₖ`.
fn sigma_vector(v: &[Vec<GaussianRational>; 4]) -> [Vec<GaussianRational>; 4] {
    let conj = |w: &Vec<GaussianRational>| w.iter().map(GaussianRational::conj).collect::<Vec<_>>();
    let neg_conj = |w: &Vec<GaussianRational>| w.iter().map(|x| -x.conj()).collect::<Vec<_>>();
    [conj(&v[1]), neg_conj(&v[0]), conj(&v[3]), neg_conj(&v[2])]
}

fn paired_vectors(count: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<[Vec<GaussianRational>; 4]> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: [Vec<GaussianRational>; 4] =
            std::array::from_fn(|_| (0..len).map(|_| random_entry(rng)).collect());
        let w = sigma_vector(&v);
        out.push(v);
        out.push(w);
    }
    out
}

fn paired_rows(r: usize, rng: &mut ChaCha8Rng) -> LinearMatrix {
    let rows = paired_vectors(r + 1, r, rng);
    let a: [ExactMatrix; 4] = std::array::from_fn(|k| ExactMatrix::from_fn(r + 1, r, |i, j| rows[i][k][j].clone()));
    LinearMatrix::new(a).expect("shape")
}

fn paired_rows_transposed(r: usize, rng: &mut ChaCha8Rng) -> LinearMatrix {
    let cols = paired_vectors(r, r + 1, rng);
    let a: [ExactMatrix; 4] = std::array::from_fn(|k| ExactMatrix::from_fn(r + 1, r, |i, j| cols[j][k][i].clone()));
    LinearMatrix::new(a).expect("shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::test_support::{random_form, random_gauss};
    use crate::pencil::CanonicalPair;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn point_rule() {
        let e1 = [g("1"), g("0"), g("0"), g("0")];
        assert_eq!(sigma_point(&e1).unwrap(), [g("0"), g("1"), g("0"), g("0")]);
        let p = [g("0"), g("0"), g("1"), g("1i")];
        assert_eq!(sigma_point(&p).unwrap(), [g("0"), g("0"), g("1i"), g("1")]);
        assert_eq!(sigma_point(&[g("0"), g("0"), g("0"), g("0")]), Err(RealityError::ZeroPoint));
    }

    #[test]
    fn point_rule_is_projective_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x: [GaussianRational; 4] = std::array::from_fn(|_| random_gauss(&mut rng, 4));
            if x.iter().all(Zero::is_zero) {
                continue;
            }
            let y = sigma_point(&sigma_point(&x).unwrap()).unwrap();
            // σ² = −1 on coordinates, i.e. the identity on ℙ³.
            for k in 0..4 {
                assert_eq!(y[k], -x[k].clone());
            }
        }
    }

    #[test]
    fn action_squares_to_sign_by_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for degree in 0..=4 {
            let f = random_form(&mut rng, 4, degree);
            let ff = SigmaAction::apply(&SigmaAction::apply(&f));
            let expected = if degree % 2 == 0 { f.clone() } else { -&f };
            assert_eq!(ff, expected, "degree {degree}");
        }
    }

    #[test]
    fn action_matches_pullback_by_points() {
        // (σ*f)(x) = conj(f(σ(x))) on random points.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_form(&mut rng, 4, 3);
        let sf = SigmaAction::apply(&f);
        for _ in 0..10 {
            let x: [GaussianRational; 4] = std::array::from_fn(|_| random_gauss(&mut rng, 3));
            if x.iter().all(Zero::is_zero) {
                continue;
            }
            let sx = sigma_point(&x).unwrap();
            assert_eq!(sf.evaluate(&x), f.evaluate(&sx).conj());
        }
    }

    #[test]
    fn invariant_spans() {
        let x1 = HomogPoly::var(4, 0);
        let x2 = HomogPoly::var(4, 1);
        assert!(is_sigma_invariant_ideal(&[&x1 * &x1, &x2 * &x2], 2).unwrap());
        assert!(!is_sigma_invariant_ideal(&[&x1 * &x1], 2).unwrap());
        assert!(matches!(
            is_sigma_invariant_ideal(&[x1.clone()], 2),
            Err(RealityError::WrongDegree { index: 0, .. })
        ));
    }

    #[test]
    fn generated_pencils_are_invariant() {
        for r in 1..=4 {
            for seed in 1..=3 {
                let m = make_sigma_invariant_pencil(r, seed).unwrap();
                assert!(is_sigma_invariant_ideal(&m.maximal_minors(), r as u32).unwrap(), "r={r} seed={seed}");
                assert!(is_injective_pencil(&m.pencil()));
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(make_sigma_invariant_pencil(3, 5).unwrap(), make_sigma_invariant_pencil(3, 5).unwrap());
        assert_ne!(make_sigma_invariant_pencil(3, 5).unwrap(), make_sigma_invariant_pencil(3, 6).unwrap());
    }

    #[test]
    fn r1_is_a_real_line() {
        let m = make_sigma_invariant_pencil(1, 1).unwrap();
        let minors = m.maximal_minors();
        assert!(minors.iter().all(|p| p.degree() == 1));
        // Two independent linear forms whose span is σ-stable.
        assert!(is_sigma_invariant_ideal(&minors, 1).unwrap());
    }

    #[test]
    fn canonical_gauge_intertwines_sigma() {
        for r in 1..=5 {
            let c = CanonicalPair::new(r);
            let (g0, h0) = canonical_sigma_gauge(r);
            let zero = ExactMatrix::zeros(r + 1, r);
            let base = LinearMatrix::new([c.s.clone(), c.t.clone(), zero.clone(), zero]).unwrap();
            let moved = base.gauge(&g0, &h0);
            assert_eq!(moved, sigma_linear_matrix(&base), "r = {r}");
        }
    }

    #[test]
    fn tau_is_quaternionic_and_encodes_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for r in 1..=4 {
            let tau = QuaternionicStructure::new(r);
            let a3 = ExactMatrix::from_fn(r + 1, r, |_, _| random_gauss(&mut rng, 3));
            assert_eq!(tau.apply(&tau.apply(&a3)), -&a3);
            let c = CanonicalPair::new(r);
            let m = LinearMatrix::new([c.s.clone(), c.t.clone(), a3.clone(), tau.apply(&a3)]).unwrap();
            assert!(is_sigma_invariant_ideal(&m.maximal_minors(), r as u32).unwrap());
            let broken = LinearMatrix::new([c.s.clone(), c.t.clone(), a3.clone(), a3.clone()]).unwrap();
            assert!(!is_sigma_invariant_ideal(&broken.maximal_minors(), r as u32).unwrap());
        }
    }

    #[test]
    fn sigma_pair_examples() {
        let zero = ExactMatrix::zeros(3, 2);
        let (a3, a4) = sigma_pair_a34(&zero, &g("2-1i")).unwrap();
        assert!(a3.is_zero() && a4.is_zero());

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for r in 1..=3 {
            let tau = QuaternionicStructure::new(r);
            let a3 = ExactMatrix::from_fn(r + 1, r, |_, _| random_gauss(&mut rng, 3));
            let a4 = tau.apply(&a3);
            let t = random_gauss(&mut rng, 3);
            let tilde = &a3 + &a4.scale(&t);
            let (b3, b4) = sigma_pair_a34(&tilde, &t).unwrap();
            assert_eq!((b3, b4), (a3, a4));
        }

        // r = 1, t = 0: A₃ is the input and A₄ is forced by reality.
        let tilde = ExactMatrix::from_rows(vec![vec![g("1+2i")], vec![g("-3")]]);
        let (a3, a4) = sigma_pair_a34(&tilde, &g("0")).unwrap();
        assert_eq!(a3, tilde);
        let c = CanonicalPair::new(1);
        let m = LinearMatrix::new([c.s, c.t, a3, a4]).unwrap();
        assert!(is_sigma_invariant_ideal(&m.maximal_minors(), 1).unwrap());
    }
}
