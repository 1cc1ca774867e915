//! The O(2)-valued symplectic form, its quadratic fit, and the metric.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::chart::{complex_structures, normalize_to_flat_chart, real_tangent_basis, FlatChart, TangentSection};
use super::fibers::{fiber_points, PointFrame};
use super::MetricError;
use crate::acm_curve::{ACMCurve, LinearMatrix};
use crate::exact_algebra::{ExactMatrix, GaussianRational};

/// Relative residual allowed in the quadratic fit of `ω(X, Y)(t)`.
pub const FIT_TOLERANCE: f64 = 1e-8;
/// Relative tolerance for symmetry and compatibility of the Gram matrix.
pub const GRAM_TOLERANCE: f64 = 1e-8;
/// Relative Gram deviation across charts accepted as flat.
pub const FLATNESS_TOLERANCE: f64 = 1e-6;
/// Fewest sample fibers accepted by the fit.
const MIN_SAMPLES: usize = 5;
/// Eigenvalues of the Gram matrix below this fraction of the largest are
/// counted as zero.
const NULL_EIGENVALUE: f64 = 1e-9;
/// Attempts with rotated sample fibers before a non-reduced fiber is fatal.
const RESAMPLE_ATTEMPTS: usize = 6;

/// Seven exact sample fibers: four on `|t| = 1/2`, three on `|t| = 2`, at
/// Pythagorean angles chosen so that no sample is near the antipode
/// `−1/t̄` of another.
pub fn default_sample_fibers() -> Vec<GaussianRational> {
    ["3/10+2/5i", "-6/13+5/26i", "-15/34-4/17i", "12/25-7/50i", "10/13+24/13i", "-48/25-14/25i", "14/25-48/25i"]
        .iter()
        .map(|s| s.parse().expect("valid literal"))
        .collect()
}

/// The fibers rotated by `((3 + 4i)/5)^k`, which keeps them exact and on
/// the same circles.
fn rotated_fibers(fibers: &[GaussianRational], k: usize) -> Vec<GaussianRational> {
    let unit = GaussianRational::ratio(3, 5) + GaussianRational::ratio(4, 5) * GaussianRational::i();
    let mut factor = GaussianRational::from(1);
    for _ in 0..k {
        factor = &factor * &unit;
    }
    fibers.iter().map(|t| t * &factor).collect()
}

/// `ω(X, Y)(t)`: the sum over the fiber points of `δu_X δv_Y − δv_X δu_Y`.
pub fn symplectic_sample(
    m: &LinearMatrix,
    t: &GaussianRational,
    x: &TangentSection,
    y: &TangentSection,
) -> Result<Complex64, MetricError> {
    let tc = t.to_complex();
    let mut total = Complex64::new(0.0, 0.0);
    for p in fiber_points(m, t)? {
        let frame = PointFrame::new(m, tc, p)?;
        let (dx, dy) = (frame.derivative(&x.at(tc)), frame.derivative(&y.at(tc)));
        total += dx[0] * dy[1] - dx[1] * dy[0];
    }
    Ok(total)
}

/// The matrix `Ω(t)_{ab} = ω(X_a, X_b)(t)` for a whole basis at once.
fn symplectic_matrix(m: &LinearMatrix, t: &GaussianRational, basis: &[TangentSection]) -> Result<DMatrix<Complex64>, MetricError> {
    let tc = t.to_complex();
    let n = basis.len();
    let directions: Vec<DMatrix<Complex64>> = basis.iter().map(|x| x.at(tc)).collect();
    let points = fiber_points(m, t)?;
    let mut du = DMatrix::zeros(points.len(), n);
    let mut dv = DMatrix::zeros(points.len(), n);
    for (i, p) in points.iter().enumerate() {
        let frame = PointFrame::new(m, tc, *p)?;
        for (a, dir) in directions.iter().enumerate() {
            let d = frame.derivative(dir);
            du[(i, a)] = d[0];
            dv[(i, a)] = d[1];
        }
    }
    let cross = du.transpose() * &dv;
    Ok(&cross - cross.transpose())
}

/// Least-squares coefficients of `c₀ + c₁t + c₂t²` and the fit residual
/// relative to the largest sample.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    pub c: [Complex64; 3],
    pub residual: f64,
}

/// Pseudo-inverse of the `m × 3` Vandermonde matrix of the samples.
fn vandermonde_pinv(ts: &[Complex64]) -> Result<DMatrix<Complex64>, MetricError> {
    let distinct = {
        let mut count = 0;
        for (i, a) in ts.iter().enumerate() {
            if ts[..i].iter().all(|b| (a - b).norm() > 1e-12 * (1.0 + a.norm())) {
                count += 1;
            }
        }
        count
    };
    if distinct < MIN_SAMPLES {
        return Err(MetricError::TooFewSamples(distinct));
    }
    let v = DMatrix::from_fn(ts.len(), 3, |i, k| ts[i].powu(k as u32));
    v.pseudo_inverse(1e-14).map_err(|e| MetricError::Extraction(e.to_string()))
}

pub fn fit_quadratic(samples: &[(Complex64, Complex64)]) -> Result<QuadraticFit, MetricError> {
    let ts: Vec<Complex64> = samples.iter().map(|s| s.0).collect();
    let pinv = vandermonde_pinv(&ts)?;
    let mut c = [Complex64::new(0.0, 0.0); 3];
    for (k, ck) in c.iter_mut().enumerate() {
        *ck = samples.iter().enumerate().map(|(s, (_, y))| pinv[(k, s)] * y).sum();
    }
    let scale = samples.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
    let worst = samples
        .iter()
        .map(|(t, y)| (c[0] + c[1] * t + c[2] * t * t - y).norm())
        .fold(0.0, f64::max);
    Ok(QuadraticFit {
        c,
        residual: if scale > 0.0 { worst / scale } else { worst },
    })
}

/// Fits every entry of `Ω(t)` at once. Returns the coefficient matrices
/// and the worst residual relative to the largest sampled entry.
fn fit_matrices(samples: &[(Complex64, DMatrix<Complex64>)]) -> Result<([DMatrix<Complex64>; 3], f64), MetricError> {
    let ts: Vec<Complex64> = samples.iter().map(|s| s.0).collect();
    let pinv = vandermonde_pinv(&ts)?;
    let shape = samples[0].1.shape();
    let coeffs: [DMatrix<Complex64>; 3] = std::array::from_fn(|k| {
        samples
            .iter()
            .enumerate()
            .fold(DMatrix::zeros(shape.0, shape.1), |acc, (s, (_, y))| acc + y * pinv[(k, s)])
    });
    let scale = samples.iter().map(|s| s.1.camax()).fold(0.0, f64::max);
    let worst = samples
        .iter()
        .map(|(t, y)| (&coeffs[0] + &coeffs[1] * *t + &coeffs[2] * (t * t) - y).camax())
        .fold(0.0, f64::max);
    Ok((coeffs, if scale > 0.0 { worst / scale } else { worst }))
}

/// `(positive, negative, zero)` eigenvalue counts of the Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    fn of(gram: &DMatrix<f64>) -> Self {
        let sym = (gram + gram.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym).eigenvalues;
        let scale = eig.amax();
        let mut s = Signature { positive: 0, negative: 0, zero: 0 };
        for &l in eig.iter() {
            if l.abs() <= NULL_EIGENVALUE * scale {
                s.zero += 1;
            } else if l > 0.0 {
                s.positive += 1;
            } else {
                s.negative += 1;
            }
        }
        s
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.positive, self.negative)?;
        if self.zero > 0 {
            write!(f, " with {} null directions", self.zero)?;
        }
        Ok(())
    }
}

/// Consistency measures of one extracted frame, all relative to the
/// largest Gram entry (quaternion residuals are absolute).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameDiagnostics {
    pub fit_residual: f64,
    /// Largest imaginary part of the three Kähler forms.
    pub imaginary_part: f64,
    pub symmetry: f64,
    /// `max |g(IX, IY) − g(X, Y)|`, likewise for `J`, `K`.
    pub compatibility: [f64; 3],
    /// `max |ω_J − g(J·, ·)|` and `max |ω_K − g(K·, ·)|`.
    pub kahler_consistency: [f64; 2],
    /// `max` over `I² + 1`, `J² + 1`, `K² + 1`, `IJ − K`.
    pub quaternion_residual: f64,
}

impl FrameDiagnostics {
    pub fn within_tolerance(&self) -> bool {
        self.fit_residual < FIT_TOLERANCE
            && self.imaginary_part < GRAM_TOLERANCE
            && self.symmetry < GRAM_TOLERANCE
            && self.compatibility.iter().all(|&c| c < GRAM_TOLERANCE)
            && self.kahler_consistency.iter().all(|&c| c < 1e-6)
            && self.quaternion_residual < 1e-10
    }
}

/// The metric and quaternionic structure at one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct HKFrame {
    pub r: usize,
    pub gram: DMatrix<f64>,
    pub i: DMatrix<f64>,
    pub j: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub omega: [DMatrix<f64>; 3],
    pub signature: Signature,
    pub diagnostics: FrameDiagnostics,
}

fn real(m: &ExactMatrix) -> DMatrix<f64> {
    m.to_complex().map(|z| z.re)
}

fn omega_samples(
    m: &LinearMatrix,
    fibers: &[GaussianRational],
    basis: &[TangentSection],
) -> Result<Vec<(Complex64, DMatrix<Complex64>)>, MetricError> {
    fibers
        .iter()
        .map(|t| Ok((t.to_complex(), symplectic_matrix(m, t, basis)?)))
        .collect()
}

/// Extraction on the fiber family of `m` with the flat-chart tangent basis.
/// With `enforce` the tolerances are checked and violations are errors.
fn extract_frame(m: &LinearMatrix, fibers: &[GaussianRational], enforce: bool) -> Result<HKFrame, MetricError> {
    let r = m.r();
    let basis = real_tangent_basis(r);
    let samples = omega_samples(m, fibers, &basis)?;
    let ([c0, c1, c2], fit_residual) = fit_matrices(&samples)?;
    let two_i = Complex64::new(0.0, 2.0);
    let forms = [-&c1 / two_i, (&c0 - &c2) / two_i, (&c0 + &c2) / Complex64::new(-2.0, 0.0)];
    let scale_c = forms.iter().map(|f| f.map(|z| z.re).amax()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let imaginary_part = forms.iter().map(|f| f.map(|z| z.im).amax()).fold(0.0, f64::max) / scale_c;
    let omega = forms.map(|f| f.map(|z| z.re));

    let q = complex_structures(r);
    let (i, j, k) = (real(&q.i), real(&q.j), real(&q.k));
    let gram = &omega[0] * &i;
    let scale = gram.amax().max(f64::MIN_POSITIVE);
    let rel = |x: DMatrix<f64>| x.amax() / scale;
    let id = DMatrix::<f64>::identity(i.nrows(), i.ncols());
    let quaternion_residual = [&i * &i + &id, &j * &j + &id, &k * &k + &id, &i * &j - &k]
        .iter()
        .map(|x| x.amax())
        .fold(0.0, f64::max);
    let diagnostics = FrameDiagnostics {
        fit_residual,
        imaginary_part,
        symmetry: rel(&gram - gram.transpose()),
        compatibility: [&i, &j, &k].map(|op| rel(op.transpose() * &gram * op - &gram)),
        kahler_consistency: [
            rel(&omega[1] - j.transpose() * &gram),
            rel(&omega[2] - k.transpose() * &gram),
        ],
        quaternion_residual,
    };
    if enforce {
        if diagnostics.fit_residual >= FIT_TOLERANCE {
            return Err(MetricError::FitResidual { residual: diagnostics.fit_residual });
        }
        if !diagnostics.within_tolerance() {
            return Err(MetricError::Extraction(format!(
                "Gram checks failed: symmetry {:e}, compatibility {:?}, Kähler consistency {:?}",
                diagnostics.symmetry, diagnostics.compatibility, diagnostics.kahler_consistency
            )));
        }
    }
    Ok(HKFrame {
        r,
        signature: Signature::of(&gram),
        gram,
        i,
        j,
        k,
        omega,
        diagnostics,
    })
}

/// The metric of the flat chart from the sampled O(2)-valued form.
pub fn extract_metric(chart: &FlatChart, fibers: &[GaussianRational]) -> Result<HKFrame, MetricError> {
    extract_frame(&chart.linear_matrix(), fibers, true)
}

/// Retries with rotated fibers while some sample fiber is non-reduced.
fn with_resampling(
    fibers: &[GaussianRational],
    mut run: impl FnMut(&[GaussianRational]) -> Result<HKFrame, MetricError>,
) -> Result<(HKFrame, usize), MetricError> {
    let mut last = None;
    for k in 0..RESAMPLE_ATTEMPTS {
        match run(&rotated_fibers(fibers, k)) {
            Ok(frame) => return Ok((frame, k)),
            Err(e @ MetricError::NonReducedFiber { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub fibers: Vec<GaussianRational>,
    /// Negative control: use the scrambled gauge directly, without Kronecker
    /// reduction, as if it were the flat chart.
    pub skip_sigma_gauge: bool,
    pub tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            fibers: default_sample_fibers(),
            skip_sigma_gauge: false,
            tolerance: FLATNESS_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartResult {
    pub index: usize,
    /// The flat chart drawn for this point (before scrambling).
    pub chart: FlatChart,
    /// The scrambled linear matrix handed to the pipeline.
    pub scrambled: LinearMatrix,
    pub frame: HKFrame,
    /// How many times the sample fibers were rotated.
    pub resamples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub r: usize,
    pub skip_sigma_gauge: bool,
    pub charts: Vec<ChartResult>,
    pub mean_gram: DMatrix<f64>,
    /// Largest entrywise deviation from the mean Gram, relative to the
    /// largest mean entry.
    pub deviation: f64,
    /// The common signature, if all charts agree.
    pub signature: Option<Signature>,
    pub tolerance: f64,
    pub passed: bool,
}

fn random_chart(r: usize, rng: &mut ChaCha8Rng) -> FlatChart {
    FlatChart::new(ExactMatrix::from_fn(r + 1, r, |_, _| {
        GaussianRational::ratio(rng.gen_range(-3..=3), 2) + GaussianRational::ratio(rng.gen_range(-3..=3), 2) * GaussianRational::i()
    }))
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> ExactMatrix {
    loop {
        let m = ExactMatrix::from_fn(n, n, |_, _| GaussianRational::from_ints(rng.gen_range(-2..=2), rng.gen_range(-2..=2)));
        if m.rank() == n {
            return m;
        }
    }
}

/// Draws `n` random flat charts, scrambles each by a random gauge, runs
/// the normalization and extraction pipeline, and compares the Gram
/// matrices.
pub fn flatness_scan(r: usize, n: usize, seed: u64, options: &ScanOptions) -> Result<MetricReport, MetricError> {
    assert!(r >= 1 && n >= 1, "need r ≥ 1 and at least one chart");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((r as u64) << 32));
    let drawn: Vec<(FlatChart, LinearMatrix)> = (0..n)
        .map(|_| {
            let chart = random_chart(r, &mut rng);
            let (g, h) = (random_invertible(r + 1, &mut rng), random_invertible(r, &mut rng));
            let scrambled = chart.linear_matrix().gauge(&g, &h);
            (chart, scrambled)
        })
        .collect();
    let charts: Vec<ChartResult> = drawn
        .into_par_iter()
        .enumerate()
        .map(|(index, (chart, scrambled))| {
            let result = if options.skip_sigma_gauge {
                with_resampling(&options.fibers, |f| extract_frame(&scrambled, f, false))
            } else {
                ACMCurve::new(scrambled.clone())
                    .certify()
                    .map_err(MetricError::from)
                    .and_then(|c| normalize_to_flat_chart(&c))
                    .and_then(|flat| with_resampling(&options.fibers, |f| extract_metric(&flat, f)))
            };
            result
                .map(|(frame, resamples)| ChartResult {
                    index,
                    chart: chart.clone(),
                    scrambled: scrambled.clone(),
                    frame,
                    resamples,
                })
                .map_err(|e| MetricError::ScanFailure {
                    index,
                    chart: Box::new(chart),
                    source: Box::new(e),
                })
        })
        .collect::<Result<_, _>>()?;

    let dim = charts[0].frame.gram.nrows();
    let mean_gram = charts
        .iter()
        .fold(DMatrix::zeros(dim, dim), |acc, c| acc + &c.frame.gram)
        / charts.len() as f64;
    let scale = mean_gram.amax().max(f64::MIN_POSITIVE);
    let deviation = charts
        .iter()
        .map(|c| (&c.frame.gram - &mean_gram).amax() / scale)
        .fold(0.0, f64::max);
    let first = charts[0].frame.signature;
    let signature = charts.iter().all(|c| c.frame.signature == first).then_some(first);
    let passed = deviation < options.tolerance
        && signature.is_some()
        && charts.iter().all(|c| c.frame.diagnostics.within_tolerance());
    Ok(MetricReport {
        r,
        skip_sigma_gauge: options.skip_sigma_gauge,
        charts,
        mean_gram,
        deviation,
        signature,
        tolerance: options.tolerance,
        passed,
    })
}
