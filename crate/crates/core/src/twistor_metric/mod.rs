//! The flat chart on the space of σ-invariant determinantal curves and the
//! hyperkähler metric read off from the fibrewise symplectic form.
//!
//! After gauge fixing `(A₁, A₂) = (S, T)` a σ-invariant curve is determined
//! by `A₃` alone (`A₄ = τ(A₃)`), so the moduli space is the real vector
//! space of `(r+1) × r` complex matrices. A tangent vector `X = δA₃` moves
//! the fiber over `[1 : t]` by `δÃ₃(t) = δA₃ + t·τ(δA₃)`, and the points
//! `(u, v)` of that fiber by implicit differentiation. The sum over the
//! fiber points of `du ∧ dv` is quadratic in `t`,
//! `ω(X, Y)(t) = c₀ + c₁t + c₂t²`, and its coefficients give the three
//! Kähler forms:
//!
//! * `ω_I = −c₁ / 2i`,
//! * `ω_J = (c₀ − c₂) / 2i`,
//! * `ω_K = −(c₀ + c₂) / 2`,
//!
//! with metric `g(X, Y) = ω_I(X, IY)`. These constants make the `r = 1`
//! chart (a single point `(u, v) = −Ã₃(t)`) the standard Euclidean ℝ⁴.

mod chart;
mod extract;
mod fibers;

pub use chart::{
    complex_structures, complexified_structures, normalize_to_flat_chart, real_tangent_basis, ComplexStructures,
    FlatChart, TangentSection,
};
pub use extract::{
    default_sample_fibers, extract_metric, fit_quadratic, flatness_scan, symplectic_sample, ChartResult,
    FrameDiagnostics, HKFrame, MetricReport, QuadraticFit, ScanOptions, Signature, FIT_TOLERANCE,
    FLATNESS_TOLERANCE, GRAM_TOLERANCE,
};
pub use fibers::{fiber_multiplication_operators, fiber_points, point_derivative};

use num_complex::Complex64;
use thiserror::Error;

use crate::acm_curve::AcmError;
use crate::pencil::PencilError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("curve is not certified")]
    NotCertified,
    #[error("curve is not σ-invariant")]
    NotSigmaInvariant,
    #[error("A₄ differs from τ(A₃); not a flat chart")]
    RealityConstraint,
    #[error(transparent)]
    Curve(#[from] AcmError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error("fiber over t = {t} is not reduced (eigenvalue separation {separation:e}); resample t")]
    NonReducedFiber { t: Complex64, separation: f64 },
    #[error("fiber over t = {t} has a point where every pair of minors has a singular Jacobian")]
    SingularJacobian { t: Complex64 },
    #[error("fiber over t = {t}: refined point has relative residual {residual:e}")]
    PointResidual { t: Complex64, residual: f64 },
    #[error("quadratic fit needs at least 5 distinct samples, got {0}")]
    TooFewSamples(usize),
    #[error("quadratic fit residual {residual:e} exceeds tolerance")]
    FitResidual { residual: f64 },
    #[error("metric extraction failed: {0}")]
    Extraction(String),
    #[error("chart {index} failed: {source}")]
    ScanFailure {
        index: usize,
        chart: Box<FlatChart>,
        source: Box<MetricError>,
    },
}
