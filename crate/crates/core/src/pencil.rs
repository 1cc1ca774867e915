//! Injective `(r+1) × r` pencils `A₁x₁ + A₂x₂` and their reduction to the
//! canonical pair `(S, T)`.
//!
//! An injective pencil of this shape has a single Kronecker row index `r`
//! and lies in the open `GL(r+1) × GL(r)` orbit of `Sx₁ + Tx₂`. The reduction
//! below finds the degree-`r` left-kernel vector of the pencil, turns its
//! coefficient vectors into the row change of basis, and then solves for the
//! column change of basis. Every reduction is verified exactly before it is
//! returned.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact_algebra::{ExactMatrix, GaussianRational, UniPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PencilError {
    #[error("pencil matrices must be {expected_rows}x{expected_cols}, got {found:?}")]
    Shape {
        expected_rows: usize,
        expected_cols: usize,
        found: (usize, usize),
    },
    #[error("pencil is not injective: rank drops at {0}")]
    NotInjective(RankDropWitness),
    #[error("reduction failed verification: {0}")]
    Verification(&'static str),
}

/// A point `[x₁ : x₂]` of ℙ¹ where `rank(A₁x₁ + A₂x₂) < r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankDropWitness {
    /// `[0 : 1]`, i.e. `rank(A₂) < r`.
    Infinity,
    /// `[1 : λ]` for an exact root `λ` of the gcd of the maximal minors.
    Point(GaussianRational),
    /// The gcd of the maximal minors of `A₁ + λA₂` when it has no linear
    /// factor we can name exactly.
    GcdFactor(UniPoly),
}

impl std::fmt::Display for RankDropWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RankDropWitness::Infinity => write!(f, "[0:1]"),
            RankDropWitness::Point(l) => write!(f, "[1:{l}]"),
            RankDropWitness::GcdFactor(g) => {
                let c: Vec<String> = g.coeffs().iter().map(ToString::to_string).collect();
                write!(f, "roots of gcd with coefficients [{}]", c.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pencil {
    r: usize,
    a1: ExactMatrix,
    a2: ExactMatrix,
}

impl Pencil {
    pub fn new(a1: ExactMatrix, a2: ExactMatrix) -> Result<Self, PencilError> {
        let r = a1.cols();
        for m in [&a1, &a2] {
            if r == 0 || m.shape() != (r + 1, r) {
                return Err(PencilError::Shape {
                    expected_rows: r + 1,
                    expected_cols: r,
                    found: m.shape(),
                });
            }
        }
        Ok(Self { r, a1, a2 })
    }

    pub fn canonical(r: usize) -> Self {
        let c = CanonicalPair::new(r);
        Self {
            r,
            a1: c.s,
            a2: c.t,
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn a1(&self) -> &ExactMatrix {
        &self.a1
    }

    pub fn a2(&self) -> &ExactMatrix {
        &self.a2
    }

    /// `(G A₁ H, G A₂ H)`.
    pub fn gauge(&self, g: &ExactMatrix, h: &ExactMatrix) -> Self {
        Self {
            r: self.r,
            a1: &(g * &self.a1) * h,
            a2: &(g * &self.a2) * h,
        }
    }

    /// Substitutes `x = M y` for an invertible 2×2 matrix `M`.
    pub fn change_variables(&self, m: &ExactMatrix) -> Self {
        Self {
            r: self.r,
            a1: &self.a1.scale(&m[(0, 0)]) + &self.a2.scale(&m[(1, 0)]),
            a2: &self.a1.scale(&m[(0, 1)]) + &self.a2.scale(&m[(1, 1)]),
        }
    }

    /// `A₁ + λA₂` at an exact `λ`.
    pub fn at(&self, lambda: &GaussianRational) -> ExactMatrix {
        &self.a1 + &self.a2.scale(lambda)
    }

    /// The `r+1` maximal minors of `A₁ + λA₂` as polynomials in `λ`; minor `j`
    /// is `(−1)^j det(A₁ + λA₂ with row j deleted)`.
    pub fn maximal_minor_polys(&self) -> Vec<UniPoly> {
        let nodes: Vec<GaussianRational> = (0..=self.r as i64).map(GaussianRational::from).collect();
        let evaluated: Vec<ExactMatrix> = nodes.iter().map(|l| self.at(l)).collect();
        (0..=self.r)
            .map(|j| {
                let values: Vec<GaussianRational> = evaluated
                    .iter()
                    .map(|m| {
                        let d = m.without_row(j).determinant();
                        if j % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .collect();
                UniPoly::interpolate(&nodes, &values)
            })
            .collect()
    }

    /// `None` when the pencil is injective at every point of ℙ¹.
    pub fn rank_drop_witness(&self) -> Option<RankDropWitness> {
        self.witness_from_minors(&self.maximal_minor_polys())
    }

    fn witness_from_minors(&self, minors: &[UniPoly]) -> Option<RankDropWitness> {
        if self.a2.rank() < self.r {
            return Some(RankDropWitness::Infinity);
        }
        let g = minors.iter().fold(UniPoly::zero(), |acc, m| acc.gcd(m));
        if g.is_zero() {
            // Every minor vanishes identically: rank drops everywhere.
            return Some(RankDropWitness::Point(GaussianRational::zero()));
        }
        if g.is_constant() {
            return None;
        }
        Some(match g.squarefree_part().linear_root() {
            Some(root) => RankDropWitness::Point(root),
            None => RankDropWitness::GcdFactor(g),
        })
    }
}

pub fn is_injective_pencil(p: &Pencil) -> bool {
    p.rank_drop_witness().is_none()
}

/// `S_{ij} = δ_{ij}` and `T_{ij} = δ_{i,j+1}`, both `(r+1) × r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPair {
    pub s: ExactMatrix,
    pub t: ExactMatrix,
}

impl CanonicalPair {
    pub fn new(r: usize) -> Self {
        let one = |b: bool| {
            if b {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            }
        };
        Self {
            s: ExactMatrix::from_fn(r + 1, r, |i, j| one(i == j)),
            t: ExactMatrix::from_fn(r + 1, r, |i, j| one(i == j + 1)),
        }
    }

    pub fn r(&self) -> usize {
        self.s.cols()
    }
}

/// `P (A₁x₁ + A₂x₂) Q = S x₁ + T x₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KroneckerReduction {
    pub p: ExactMatrix,
    pub q: ExactMatrix,
}

impl KroneckerReduction {
    pub fn verify(&self, pencil: &Pencil) -> bool {
        let c = CanonicalPair::new(pencil.r());
        let reduced = pencil.gauge(&self.p, &self.q);
        reduced.a1 == c.s && reduced.a2 == c.t
    }
}

/// Coefficient vectors `w_0, …, w_k` of the lowest-degree polynomial vector
/// `w(x) = Σ w_m x₁^{k−m} x₂^m` with `w(x)ᵀ(A₁x₁ + A₂x₂) = 0`, searching
/// degrees `0..=max_degree`. Returns `None` when no such vector exists.
pub fn minimal_left_kernel(p: &Pencil, max_degree: usize) -> Option<Vec<Vec<GaussianRational>>> {
    let n = p.r + 1;
    let r = p.r;
    for k in 0..=max_degree {
        // unknown (m, i) -> m*n + i; equation (m, c) for m in 0..=k+1
        let mut sys = ExactMatrix::zeros((k + 2) * r, (k + 1) * n);
        for m in 0..=k + 1 {
            for c in 0..r {
                let row = m * r + c;
                for i in 0..n {
                    if m <= k {
                        sys[(row, m * n + i)] += &p.a1[(i, c)];
                    }
                    if m >= 1 {
                        sys[(row, (m - 1) * n + i)] += &p.a2[(i, c)];
                    }
                }
            }
        }
        let ker = sys.kernel_basis();
        if ker.cols() > 0 {
            let v = ker.column(0);
            return Some(v.chunks(n).map(<[GaussianRational]>::to_vec).collect());
        }
    }
    None
}

/// The degree-`r` left kernel `w(x)` of `A₁x₁ + A₂x₂` read off the signed
/// maximal minors (Cramer's rule): entry `m` holds the coefficients of
/// `x₁^{r−m} x₂^m`.
fn cramer_kernel(r: usize, minors: &[UniPoly]) -> Vec<Vec<GaussianRational>> {
    (0..=r)
        .map(|m| {
            minors
                .iter()
                .map(|poly| poly.coeffs().get(m).cloned().unwrap_or_else(GaussianRational::zero))
                .collect()
        })
        .collect()
}

/// Exact `(P, Q)` taking an injective pencil to `(S, T)`.
///
/// An injective `(r+1) × r` pencil has the single row minimal index `r`, so
/// its left kernel in degree `r` is one-dimensional and spanned by the
/// signed maximal minors. Matching it with the kernel of `(S, T)` fixes `P`;
/// the top `r × r` block of `P A₁` must then be `Q⁻¹`.
pub fn kronecker_reduce(p: &Pencil) -> Result<KroneckerReduction, PencilError> {
    let minors = p.maximal_minor_polys();
    if let Some(w) = p.witness_from_minors(&minors) {
        return Err(PencilError::NotInjective(w));
    }
    let r = p.r;
    let n = r + 1;
    let canonical = Pencil::canonical(r);
    let w = ExactMatrix::from_columns(n, &cramer_kernel(r, &minors));
    let w_can = ExactMatrix::from_columns(n, &cramer_kernel(r, &canonical.maximal_minor_polys()));
    let w_can_inv = w_can.inverse().ok_or(PencilError::Verification("canonical kernel matrix singular"))?;
    let pmat = (&w * &w_can_inv).transpose();

    let top: Vec<usize> = (0..r).collect();
    let q = (&pmat * &p.a1)
        .submatrix(&top, &top)
        .inverse()
        .ok_or(PencilError::Verification("column change of basis singular"))?;
    let red = KroneckerReduction { p: pmat, q };
    if !red.verify(p) {
        return Err(PencilError::Verification("P(A1 x1 + A2 x2)Q != S x1 + T x2"));
    }
    Ok(red)
}

/// Coefficient matrix of the linear system `X S + S Y = 0`, `X T + T Y = 0`
/// in the unknowns `(vec X, vec Y)`, X of size `(r+1)²` first.
pub fn stabilizer_system(c: &CanonicalPair) -> ExactMatrix {
    let r = c.r();
    let n = r + 1;
    let nx = n * n;
    let mut sys = ExactMatrix::zeros(2 * n * r, nx + r * r);
    for (block, m) in [&c.s, &c.t].into_iter().enumerate() {
        for i in 0..n {
            for j in 0..r {
                let row = block * n * r + i * r + j;
                // (X M)[i,j] = Σ_a X[i,a] M[a,j]
                for a in 0..n {
                    sys[(row, i * n + a)] += &m[(a, j)];
                }
                // (M Y)[i,j] = Σ_b M[i,b] Y[b,j]
                for b in 0..r {
                    sys[(row, nx + b * r + j)] += &m[(i, b)];
                }
            }
        }
    }
    sys
}

/// Dimension of the Lie algebra of the stabiliser of `(S, T)`.
pub fn stabilizer_dimension(c: &CanonicalPair) -> usize {
    stabilizer_system(c).kernel_basis().cols()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::test_support::random_invertible;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_pairs_are_injective() {
        for r in 1..=6 {
            assert!(is_injective_pencil(&Pencil::canonical(r)), "r = {r}");
        }
    }

    #[test]
    fn equal_matrices_fail_with_witness() {
        let s = CanonicalPair::new(1).s;
        let p = Pencil::new(s.clone(), s).unwrap();
        assert!(!is_injective_pencil(&p));
        let minus_one = GaussianRational::from(-1);
        assert_eq!(p.rank_drop_witness(), Some(RankDropWitness::Point(minus_one)));
        assert!(matches!(kronecker_reduce(&p), Err(PencilError::NotInjective(_))));
    }

    #[test]
    fn singular_a2_is_witnessed_at_infinity() {
        let c = CanonicalPair::new(2);
        let p = Pencil::new(c.s.clone(), ExactMatrix::zeros(3, 2)).unwrap();
        assert_eq!(p.rank_drop_witness(), Some(RankDropWitness::Infinity));
    }

    #[test]
    fn shape_is_checked() {
        assert!(matches!(
            Pencil::new(ExactMatrix::zeros(2, 2), ExactMatrix::zeros(2, 2)),
            Err(PencilError::Shape { .. })
        ));
    }

    #[test]
    fn canonical_reduces_to_identity_or_equivalent() {
        for r in 1..=4 {
            let p = Pencil::canonical(r);
            let red = kronecker_reduce(&p).unwrap();
            assert!(red.verify(&p));
        }
    }

    #[test]
    fn gauge_scrambled_pencils_reduce() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for r in 1..=4 {
            let g = random_invertible(&mut rng, r + 1);
            let h = random_invertible(&mut rng, r);
            let p = Pencil::canonical(r).gauge(&g, &h);
            assert!(is_injective_pencil(&p));
            let red = kronecker_reduce(&p).unwrap();
            assert!(red.verify(&p));
        }
    }

    #[test]
    fn s_and_s_plus_t() {
        let c = CanonicalPair::new(2);
        let p = Pencil::new(c.s.clone(), &c.s + &c.t).unwrap();
        let red = kronecker_reduce(&p).unwrap();
        assert!(red.verify(&p));
    }

    #[test]
    fn stabilizer_is_one_dimensional() {
        for r in [1, 2, 5] {
            assert_eq!(stabilizer_dimension(&CanonicalPair::new(r)), 1, "r = {r}");
        }
    }

    #[test]
    fn gauge_reductions_differ_by_central_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = 3;
        let g0 = random_invertible(&mut rng, r + 1);
        let h0 = random_invertible(&mut rng, r);
        let p = Pencil::canonical(r).gauge(&g0, &h0);
        let g = random_invertible(&mut rng, r + 1);
        let h = random_invertible(&mut rng, r);
        let p2 = p.gauge(&g, &h);
        let a = kronecker_reduce(&p).unwrap();
        let b = kronecker_reduce(&p2).unwrap();
        // (P' G P⁻¹, Q⁻¹ H Q') fixes (S, T), so it is (z·Id, z⁻¹·Id).
        let x = &(&b.p * &g) * &a.p.inverse().unwrap();
        let y = &(&a.q.inverse().unwrap() * &h) * &b.q;
        let z = x[(0, 0)].clone();
        assert_eq!(x, ExactMatrix::identity(r + 1).scale(&z));
        assert_eq!(&x[(0, 0)] * &y[(0, 0)], GaussianRational::one());
        assert_eq!(y, ExactMatrix::identity(r).scale(&y[(0, 0)]));
    }
}
