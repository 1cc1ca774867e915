//! Points of the fiber over `[1 : t]` and their first-order motion.
//!
//! The fiber is the length-`d` scheme in the plane with coordinates
//! `(u, v, w)` cut out by the maximal minors of `A₁u + A₂v + Ã₃(t)w`. Its
//! degree-`r+1` dual space (functionals vanishing on the ideal) is spanned
//! by the point evaluations, and composing a functional with `u`, `v`, `w`
//! gives the multiplication operators on the degree-`r` quotient. These
//! are built exactly; only the eigenvalue step is floating point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{MetricError, TangentSection};
use crate::acm_curve::{ideal_piece_matrix, signed_maximal_minors, FiberChart, LinearMatrix};
use crate::exact_algebra::{ExactMatrix, GaussianRational, HomogPoly, MonomialIndex};

/// Minimum eigenvalue separation, relative to the eigenvalue scale, below
/// which the fiber is treated as non-reduced.
const SEPARATION_THRESHOLD: f64 = 1e-7;
/// Relative generator residual accepted for a refined fiber point.
const RESIDUAL_THRESHOLD: f64 = 1e-10;
/// Fixed generic combination `M_u + γ·M_v` whose eigenvalues separate the
/// points.
const GAMMA: Complex64 = Complex64::new(0.618_033_988_749_894_9, 0.314_159_265_358_979_3);

/// The minors of the fiber matrix in `(u, v, w)`.
fn fiber_generators(m: &LinearMatrix, t: &GaussianRational) -> Vec<HomogPoly> {
    let f = m.fiber_matrix(&FiberChart::Affine(t.clone()));
    let refs: Vec<&ExactMatrix> = f.iter().collect();
    signed_maximal_minors(&refs)
}

/// Exact multiplication operators `(M_u, M_v)` by `u/w` and `v/w` on the
/// `d`-dimensional quotient over `[1 : t]`, in a basis where the vector of
/// standard-monomial values at a fiber point is a left eigenvector with
/// eigenvalue the point's coordinate.
pub fn fiber_multiplication_operators(
    m: &LinearMatrix,
    t: &GaussianRational,
) -> Result<(ExactMatrix, ExactMatrix), MetricError> {
    let r = m.r();
    let d = r * (r + 1) / 2;
    let gens = fiber_generators(m, t);
    let k = r as i64;
    let low = MonomialIndex::new(3, k);
    let high = MonomialIndex::new(3, k + 1);
    let piece = |deg| ideal_piece_matrix(&gens, deg).ok_or_else(|| MetricError::Extraction("vanishing fiber minors".into()));
    let pivots = piece(k)?.rref().1;
    let standard: Vec<usize> = (0..low.len()).filter(|i| !pivots.contains(i)).collect();
    // Functionals on degree r+1 vanishing on the ideal.
    let dual = piece(k + 1)?.kernel_basis();
    if standard.len() != d || dual.cols() != d {
        return Err(MetricError::Extraction(format!(
            "fiber over t = {t} has length {} in degree {k} and {} in degree {}, expected {d}",
            standard.len(),
            dual.cols(),
            k + 1
        )));
    }
    // Row i, column s: the i-th functional applied to x · (s-th standard monomial).
    let compose = |var: usize| {
        ExactMatrix::from_fn(d, d, |i, s| {
            let mut e = low.basis()[standard[s]].clone();
            e[var] += 1;
            dual[(high.position(&e).expect("degree r+1 monomial"), i)].clone()
        })
    };
    let w_inv = compose(2)
        .inverse()
        .ok_or_else(|| MetricError::Extraction(format!("fiber over t = {t} meets the line w = 0")))?;
    Ok((&w_inv * &compose(0), &w_inv * &compose(1)))
}

fn numeric(m: &ExactMatrix) -> DMatrix<Complex64> {
    m.to_complex()
}

/// Null vector of a square matrix: the right singular vector of its
/// smallest singular value.
fn null_vector(a: DMatrix<Complex64>) -> DVector<Complex64> {
    let n = a.ncols();
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    DVector::from_iterator(n, v_t.row(idx).iter().map(|z| z.conj()))
}

/// Relative residual of the generators at `(u, v, 1)`.
fn residual(gens: &[HomogPoly], p: [Complex64; 2]) -> f64 {
    let point = [p[0], p[1], Complex64::new(1.0, 0.0)];
    let scale = (1.0 + p[0].norm() + p[1].norm()).powi(gens[0].degree() as i32);
    gens.iter()
        .map(|g| {
            let size: f64 = g.terms().map(|(_, c)| c.to_complex().norm()).sum();
            g.evaluate_complex(&point).norm() / (size * scale)
        })
        .fold(0.0, f64::max)
}

/// Gauss–Newton on the overdetermined system of generators in `(u, v)`.
fn refine(gens: &[HomogPoly], partials: &[[HomogPoly; 2]], mut p: [Complex64; 2]) -> [Complex64; 2] {
    for _ in 0..4 {
        let point = [p[0], p[1], Complex64::new(1.0, 0.0)];
        let jac = DMatrix::from_fn(gens.len(), 2, |i, j| partials[i][j].evaluate_complex(&point));
        let rhs = DVector::from_iterator(gens.len(), gens.iter().map(|g| -g.evaluate_complex(&point)));
        let normal = jac.adjoint() * &jac;
        let Some(step) = normal.lu().solve(&(jac.adjoint() * rhs)) else {
            break;
        };
        p = [p[0] + step[0], p[1] + step[1]];
        if step.norm() <= 1e-15 * (1.0 + p[0].norm() + p[1].norm()) {
            break;
        }
    }
    p
}

/// The `d` points `(u, v)` (affine coordinates `w = 1`) of the fiber over
/// `[1 : t]`, from the joint eigenvalues of the multiplication operators,
/// refined by Gauss–Newton.
pub fn fiber_points(m: &LinearMatrix, t: &GaussianRational) -> Result<Vec<[Complex64; 2]>, MetricError> {
    let tc = t.to_complex();
    let (mu, mv) = fiber_multiplication_operators(m, t)?;
    let (mu, mv) = (numeric(&mu), numeric(&mv));
    let d = mu.nrows();
    let combined = &mu + &mv * GAMMA;
    let (_, schur) = combined.clone().schur().unpack();
    let eigenvalues: Vec<Complex64> = (0..d).map(|i| schur[(i, i)]).collect();
    let scale = 1.0 + eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut separation = f64::INFINITY;
    for i in 0..d {
        for j in 0..i {
            separation = separation.min((eigenvalues[i] - eigenvalues[j]).norm() / scale);
        }
    }
    if separation < SEPARATION_THRESHOLD {
        return Err(MetricError::NonReducedFiber { t: tc, separation });
    }
    let gens = fiber_generators(m, t);
    let partials: Vec<[HomogPoly; 2]> = gens.iter().map(|g| [g.partial(0), g.partial(1)]).collect();
    eigenvalues
        .iter()
        .map(|&lambda| {
            let shifted = &combined - DMatrix::from_diagonal_element(d, d, lambda);
            // Left eigenvector y: yᵀ(M − λ) = 0.
            let y = null_vector(shifted.transpose());
            let yc = y.map(|z| z.conj());
            let norm = y.dot(&yc);
            let rayleigh = |op: &DMatrix<Complex64>| (y.transpose() * op * &yc)[(0, 0)] / norm;
            let p = refine(&gens, &partials, [rayleigh(&mu), rayleigh(&mv)]);
            let res = residual(&gens, p);
            if res < RESIDUAL_THRESHOLD {
                Ok(p)
            } else {
                Err(MetricError::PointResidual { t: tc, residual: res })
            }
        })
        .collect()
}

/// Determinant of the `r × r` matrix `rows` with column `c` replaced (if
/// given) by the same rows of `replacement`.
fn replaced_det(base: &DMatrix<Complex64>, rows: &[usize], column: Option<(usize, &DMatrix<Complex64>)>) -> Complex64 {
    let r = base.ncols();
    DMatrix::from_fn(rows.len(), r, |i, j| match column {
        Some((c, rep)) if c == j => rep[(rows[i], j)],
        _ => base[(rows[i], j)],
    })
    .determinant()
}

/// Derivative of `det(base without row `skip`)` along `direction`, by
/// multilinearity in the columns.
fn minor_derivative(base: &DMatrix<Complex64>, skip: usize, direction: &DMatrix<Complex64>) -> Complex64 {
    let rows: Vec<usize> = (0..base.nrows()).filter(|&i| i != skip).collect();
    (0..base.ncols())
        .map(|c| replaced_det(base, &rows, Some((c, direction))))
        .sum()
}

/// The implicit-differentiation data at one fiber point: the pair of
/// minors with the best-conditioned Jacobian and its inverse.
pub(crate) struct PointFrame {
    base: DMatrix<Complex64>,
    pair: [usize; 2],
    jac_inv: nalgebra::Matrix2<Complex64>,
}

impl PointFrame {
    pub(crate) fn new(m: &LinearMatrix, t: Complex64, p: [Complex64; 2]) -> Result<Self, MetricError> {
        Self::with_pair(m, t, p, None)
    }

    fn with_pair(m: &LinearMatrix, t: Complex64, p: [Complex64; 2], pair: Option<[usize; 2]>) -> Result<Self, MetricError> {
        let a: Vec<DMatrix<Complex64>> = (0..4).map(|k| numeric(m.a(k))).collect();
        let base = &a[0] * p[0] + &a[1] * p[1] + &a[2] + &a[3] * t;
        let grads: Vec<[Complex64; 2]> = (0..base.nrows())
            .map(|j| [minor_derivative(&base, j, &a[0]), minor_derivative(&base, j, &a[1])])
            .collect();
        let scale = grads.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let det = |j: usize, k: usize| grads[j][0] * grads[k][1] - grads[j][1] * grads[k][0];
        let pair = match pair {
            Some(pair) => pair,
            None => {
                let mut best = ([0, 1], -1.0);
                for j in 0..grads.len() {
                    for k in (j + 1)..grads.len() {
                        let size = det(j, k).norm();
                        if size > best.1 {
                            best = ([j, k], size);
                        }
                    }
                }
                best.0
            }
        };
        let [j, k] = pair;
        if det(j, k).norm() <= 1e-12 * scale * scale || scale == 0.0 {
            return Err(MetricError::SingularJacobian { t });
        }
        let jac = nalgebra::Matrix2::new(grads[j][0], grads[j][1], grads[k][0], grads[k][1]);
        let jac_inv = jac.try_inverse().ok_or(MetricError::SingularJacobian { t })?;
        Ok(Self { base, pair, jac_inv })
    }

    /// `(δu, δv)` for the perturbation `δÃ₃ = direction`.
    pub(crate) fn derivative(&self, direction: &DMatrix<Complex64>) -> [Complex64; 2] {
        let g = nalgebra::Vector2::new(
            minor_derivative(&self.base, self.pair[0], direction),
            minor_derivative(&self.base, self.pair[1], direction),
        );
        let dp = -(self.jac_inv * g);
        [dp[0], dp[1]]
    }
}

/// `(δu, δv)` of the fiber point `p` over `[1 : t]` along the tangent
/// section `x`, which moves the fiber matrix by `δA₃ + t·δA₄`.
pub fn point_derivative(
    m: &LinearMatrix,
    t: &GaussianRational,
    p: [Complex64; 2],
    x: &TangentSection,
) -> Result<[Complex64; 2], MetricError> {
    let tc = t.to_complex();
    Ok(PointFrame::new(m, tc, p)?.derivative(&x.at(tc)))
}
