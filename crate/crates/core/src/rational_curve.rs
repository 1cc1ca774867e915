//! Parametrized rational curves `f: ℙ¹ → ℙ³` and the splitting type of
//! their normal bundles.
//!
//! With `J = [∂f/∂s, ∂f/∂t]` (a 4×2 matrix of forms of degree `d−1`) the
//! normal bundle is `N = coker(J: O(1)² → O(d)⁴)`, so its dual sits in
//! `0 → N^∨ → O(−d)⁴ → O(−1)² → 0`. Writing `N = O(a) ⊕ O(b)`,
//! `h⁰(N^∨(m)) = max(m−a+1, 0) + max(m−b+1, 0)`, and the first `m` with a
//! nonzero kernel of `Jᵀ` on global sections is `a`.

use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact_algebra::{graded_matrix, ExactMatrix, GaussianRational, HomogPoly, MonomialIndex, PolyMatrix, UniPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalCurveError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("component {index} has {found} coefficients, expected {expected}")]
    CoefficientCount { index: usize, found: usize, expected: usize },
    #[error("invalid map: {0}")]
    Invalid(MapDefect),
    #[error("h⁰(N^∨(m)) profile {profile:?} does not match O({a}) ⊕ O({b})")]
    InconsistentProfile { a: i64, b: i64, profile: Vec<(i64, usize)> },
    #[error("no admissible map of degree {d} after {attempts} attempts")]
    GenerationExhausted { d: u32, attempts: usize },
}

/// A point `[s : t]` of ℙ¹ certifying a defect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointWitness {
    /// `[0 : 1]`.
    Infinity,
    /// `[1 : λ]`.
    Point(GaussianRational),
    /// Roots of this polynomial in `λ` (the points `[1 : λ]`) when no
    /// root is available over ℚ(i).
    GcdFactor(UniPoly),
}

impl fmt::Display for PointWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointWitness::Infinity => write!(f, "[0:1]"),
            PointWitness::Point(l) => write!(f, "[1:{l}]"),
            PointWitness::GcdFactor(g) => {
                let c: Vec<String> = g.coeffs().iter().map(ToString::to_string).collect();
                write!(f, "[1:λ] for roots λ of the polynomial with coefficients [{}]", c.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapDefect {
    /// The components vanish simultaneously.
    BasePoint(PointWitness),
    /// The Jacobian drops rank.
    NotImmersive(PointWitness),
}

impl fmt::Display for MapDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapDefect::BasePoint(w) => write!(f, "base point at {w}"),
            MapDefect::NotImmersive(w) => write!(f, "Jacobian drops rank at {w}"),
        }
    }
}

/// `[f₀ : f₁ : f₂ : f₃]` with binary forms of degree `d` in `(s, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCurveMap {
    d: u32,
    f: [HomogPoly; 4],
}

impl RationalCurveMap {
    pub fn new(d: u32, f: [HomogPoly; 4]) -> Result<Self, RationalCurveError> {
        if d == 0 {
            return Err(RationalCurveError::ZeroDegree);
        }
        let expected = d as usize + 1;
        for (index, p) in f.iter().enumerate() {
            assert_eq!(p.num_vars(), 2, "components are binary forms");
            if !p.is_zero() && p.degree() != d {
                return Err(RationalCurveError::CoefficientCount {
                    index,
                    found: p.degree() as usize + 1,
                    expected,
                });
            }
        }
        Ok(Self { d, f })
    }

    /// Components from coefficient lists `[c_0, …, c_d]` of
    /// `Σ c_i s^{d−i} t^i`.
    pub fn from_coefficients(d: u32, components: &[Vec<GaussianRational>; 4]) -> Result<Self, RationalCurveError> {
        if d == 0 {
            return Err(RationalCurveError::ZeroDegree);
        }
        let idx = MonomialIndex::new(2, d as i64);
        let mut f: [HomogPoly; 4] = std::array::from_fn(|_| HomogPoly::zero(2, d));
        for (index, c) in components.iter().enumerate() {
            if c.len() != idx.len() {
                return Err(RationalCurveError::CoefficientCount {
                    index,
                    found: c.len(),
                    expected: idx.len(),
                });
            }
            f[index] = HomogPoly::from_coefficients(&idx, c);
        }
        Self::new(d, f)
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn components(&self) -> &[HomogPoly; 4] {
        &self.f
    }

    /// Coefficient lists in the order of [`RationalCurveMap::from_coefficients`].
    pub fn coefficients(&self) -> [Vec<GaussianRational>; 4] {
        let idx = MonomialIndex::new(2, self.d as i64);
        std::array::from_fn(|k| self.f[k].coefficients(&idx))
    }

    /// `f ∘ M` for an invertible 2×2 matrix acting on `(s, t)`.
    pub fn reparametrize(&self, m: &ExactMatrix) -> Self {
        Self {
            d: self.d,
            f: std::array::from_fn(|k| self.f[k].substitute_linear(m)),
        }
    }

    /// The 4×2 Jacobian `[∂f/∂s, ∂f/∂t]`.
    pub fn jacobian(&self) -> PolyMatrix {
        PolyMatrix::from_fn(4, 2, 2, |i, j| self.f[i].partial(j))
    }

    /// The rational normal curve `[s^d : s^{d−1}t : …]` padded with zeros
    /// (`d ≤ 3`).
    pub fn rational_normal(d: u32) -> Self {
        assert!((1..=3).contains(&d));
        let f = std::array::from_fn(|k| {
            if k as u32 <= d {
                HomogPoly::monomial(vec![d - k as u32, k as u32], GaussianRational::from(1))
            } else {
                HomogPoly::zero(2, d)
            }
        });
        Self { d, f }
    }
}

/// `λ ↦ p(1, λ)`.
fn dehomogenize(p: &HomogPoly) -> UniPoly {
    let d = p.degree();
    let mut c = vec![GaussianRational::zero(); d as usize + 1];
    for (e, v) in p.terms() {
        c[e[1] as usize] = v.clone();
    }
    UniPoly::new(c)
}

/// A common zero of binary forms of one degree, if any.
fn common_zero(forms: &[HomogPoly]) -> Option<PointWitness> {
    let nonzero: Vec<&HomogPoly> = forms.iter().filter(|p| !p.is_zero()).collect();
    let Some(first) = nonzero.first() else {
        return Some(PointWitness::GcdFactor(UniPoly::zero()));
    };
    let d = first.degree();
    // [0 : 1] is a zero exactly when every t^d coefficient vanishes.
    if nonzero.iter().all(|p| p.coefficient(&[0, d]).is_zero()) {
        return Some(PointWitness::Infinity);
    }
    let g = nonzero
        .iter()
        .fold(UniPoly::zero(), |acc, p| acc.gcd(&dehomogenize(p)));
    if g.is_constant() {
        return None;
    }
    Some(match g.linear_root() {
        Some(l) => PointWitness::Point(l),
        None => PointWitness::GcdFactor(g),
    })
}

/// Exact check of base-point freeness and immersion.
pub fn validate_map(f: &RationalCurveMap) -> Result<(), MapDefect> {
    if let Some(w) = common_zero(&f.f) {
        return Err(MapDefect::BasePoint(w));
    }
    let j = f.jacobian();
    let mut minors = Vec::with_capacity(6);
    for a in 0..4 {
        for b in a + 1..4 {
            minors.push(&(j.get(a, 0) * j.get(b, 1)) - &(j.get(a, 1) * j.get(b, 0)));
        }
    }
    if let Some(w) = common_zero(&minors) {
        return Err(MapDefect::NotImmersive(w));
    }
    Ok(())
}

/// `N ≅ O(a) ⊕ O(b)` with `a ≤ b` and `a + b = 4d − 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplittingType {
    pub a: i64,
    pub b: i64,
}

impl SplittingType {
    pub fn is_balanced(&self) -> bool {
        self.a == self.b
    }

    /// `h⁰(O(m−a) ⊕ O(m−b))`.
    pub fn dual_sections(&self, m: i64) -> usize {
        ((m - self.a + 1).max(0) + (m - self.b + 1).max(0)) as usize
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// `h⁰(N^∨(m)) = dim ker(Jᵀ: H⁰(O(m−d))⁴ → H⁰(O(m−1))²)`.
pub fn dual_normal_sections(f: &RationalCurveMap, m: i64) -> usize {
    let source = m - f.d as i64;
    if source < 0 {
        return 0;
    }
    let jt = f.jacobian().transpose();
    let map = graded_matrix(&jt, source).expect("Jacobian entries share degree d − 1");
    map.matrix.cols() - map.rank()
}

/// `h⁰(N(m))` from the primal presentation, for `m ≥ −1` where
/// `H¹(O(1+m)) = 0`: `4(d+m+1) − rank(J on H⁰(O(1+m))²)`.
pub fn normal_sections(f: &RationalCurveMap, m: i64) -> usize {
    assert!(m >= -1);
    let map = graded_matrix(&f.jacobian(), 1 + m).expect("Jacobian entries share degree d − 1");
    4 * (f.d as usize + m as usize + 1) - map.rank()
}

pub fn normal_splitting_type(f: &RationalCurveMap) -> Result<SplittingType, RationalCurveError> {
    validate_map(f).map_err(RationalCurveError::Invalid)?;
    let d = f.d as i64;
    let total = 4 * d - 2;
    let mut profile = Vec::new();
    let mut a = None;
    for m in d..=total {
        let h = dual_normal_sections(f, m);
        profile.push((m, h));
        if h > 0 {
            a = Some(m);
            break;
        }
    }
    let a = a.unwrap_or(total);
    let split = SplittingType { a, b: total - a };
    if split.a > split.b {
        return Err(RationalCurveError::InconsistentProfile {
            a: split.a,
            b: split.b,
            profile,
        });
    }
    // Verify the whole profile up to b + 2, not just the first jump.
    let mut full = Vec::new();
    let mut consistent = true;
    for m in (d - 1)..=(split.b + 2) {
        let h = dual_normal_sections(f, m);
        full.push((m, h));
        consistent &= h == split.dual_sections(m);
    }
    if !consistent {
        return Err(RationalCurveError::InconsistentProfile {
            a: split.a,
            b: split.b,
            profile: full,
        });
    }
    Ok(split)
}

/// `H*(N(−2)) = 0`, i.e. the balanced type `(2d−1, 2d−1)`.
pub fn stability_check(f: &RationalCurveMap) -> Result<bool, RationalCurveError> {
    let s = normal_splitting_type(f)?;
    Ok(s.a == 2 * f.d as i64 - 1 && s.b == 2 * f.d as i64 - 1)
}

/// Attempts made by [`random_rational_curve`] before giving up.
pub const GENERATION_ATTEMPTS: usize = 200;

/// A valid map with coefficients in `{−3, …, 3} + i·{−3, …, 3}`.
pub fn random_rational_curve(d: u32, seed: u64) -> Result<RationalCurveMap, RationalCurveError> {
    if d == 0 {
        return Err(RationalCurveError::ZeroDegree);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((d as u64) << 40));
    let n = d as usize + 1;
    for _ in 0..GENERATION_ATTEMPTS {
        let comps: [Vec<GaussianRational>; 4] = std::array::from_fn(|_| {
            (0..n)
                .map(|_| GaussianRational::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3)))
                .collect()
        });
        let f = RationalCurveMap::from_coefficients(d, &comps)?;
        if validate_map(&f).is_ok() {
            return Ok(f);
        }
    }
    Err(RationalCurveError::GenerationExhausted {
        d,
        attempts: GENERATION_ATTEMPTS,
    })
}
