//! Flat charts, tangent sections and the quaternionic structure.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::MetricError;
use crate::acm_curve::{ACMCurve, LinearMatrix};
use crate::exact_algebra::{ExactMatrix, GaussianRational};
use crate::pencil::{kronecker_reduce, Pencil};
use crate::reality::QuaternionicStructure;

/// A σ-invariant curve in the gauge `(A₁, A₂) = (S, T)`, `A₄ = τ(A₃)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatChart {
    a3: ExactMatrix,
    a4: ExactMatrix,
}

impl FlatChart {
    /// The chart with coordinates `A₃`.
    pub fn new(a3: ExactMatrix) -> Self {
        let r = a3.cols();
        assert!(r >= 1 && a3.rows() == r + 1, "A₃ must be (r+1) × r");
        let a4 = QuaternionicStructure::new(r).apply(&a3);
        Self { a3, a4 }
    }

    /// Validates `A₄ = τ(A₃)`.
    pub fn from_parts(a3: ExactMatrix, a4: ExactMatrix) -> Result<Self, MetricError> {
        let chart = Self::new(a3);
        if chart.a4 != a4 {
            return Err(MetricError::RealityConstraint);
        }
        Ok(chart)
    }

    pub fn r(&self) -> usize {
        self.a3.cols()
    }

    pub fn a3(&self) -> &ExactMatrix {
        &self.a3
    }

    pub fn a4(&self) -> &ExactMatrix {
        &self.a4
    }

    /// `Sx₁ + Tx₂ + A₃x₃ + A₄x₄`.
    pub fn linear_matrix(&self) -> LinearMatrix {
        LinearMatrix::from_pencil(&Pencil::canonical(self.r()), self.a3.clone(), self.a4.clone())
            .expect("shapes agree")
    }

    /// The `2r(r+1)` real coordinates: real and imaginary parts of the
    /// entries of `A₃` in row-major order.
    pub fn real_coordinates(&self) -> Vec<f64> {
        self.a3
            .entries()
            .flat_map(|z| {
                let c = z.to_complex();
                [c.re, c.im]
            })
            .collect()
    }
}

/// Brings a certified σ-invariant curve to its flat chart. The Kronecker
/// reduction of `(A₁, A₂)` is unique up to the centre `(zI, z⁻¹I)`, which
/// acts trivially on `A₃`; σ-invariance then forces `A₄ = τ(A₃)` in the
/// reduced gauge, which is verified here rather than imposed.
pub fn normalize_to_flat_chart(c: &ACMCurve) -> Result<FlatChart, MetricError> {
    if !c.is_certified() {
        return Err(MetricError::NotCertified);
    }
    if !c.flags().sigma_invariant {
        return Err(MetricError::NotSigmaInvariant);
    }
    let m = c.matrix();
    let red = kronecker_reduce(&m.pencil())?;
    let a3 = &(&red.p * m.a(2)) * &red.q;
    let a4 = &(&red.p * m.a(3)) * &red.q;
    FlatChart::from_parts(a3, a4)
}

/// A first-order deformation `(δA₃, δA₄)`; over `[1 : ζ]` it moves the
/// fiber by `δA₃ + ζ·δA₄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentSection {
    pub a: ExactMatrix,
    pub b: ExactMatrix,
}

impl TangentSection {
    /// The real tangent vector with `δA₃ = a` (and `δA₄ = τ(a)`).
    pub fn real(a: ExactMatrix) -> Self {
        let b = QuaternionicStructure::new(a.cols()).apply(&a);
        Self { a, b }
    }

    /// Whether `δA₄ = τ(δA₃)`.
    pub fn is_real(&self) -> bool {
        QuaternionicStructure::new(self.a.cols()).apply(&self.a) == self.b
    }

    /// `δA₃ + t·δA₄` in floating point.
    pub fn at(&self, t: Complex64) -> DMatrix<Complex64> {
        self.a.to_complex() + self.b.to_complex() * t
    }
}

/// `E_ij` and `i·E_ij` for every entry in row-major order, lifted to real
/// sections; coordinate `2(i·r + j)` is the real part and `2(i·r + j) + 1`
/// the imaginary part of `(δA₃)_ij`.
pub fn real_tangent_basis(r: usize) -> Vec<TangentSection> {
    let mut out = Vec::with_capacity(2 * r * (r + 1));
    for i in 0..=r {
        for j in 0..r {
            for unit in [GaussianRational::one(), GaussianRational::i()] {
                let mut a = ExactMatrix::zeros(r + 1, r);
                a[(i, j)] = unit;
                out.push(TangentSection::real(a));
            }
        }
    }
    out
}

/// Real coordinates of `δA₃` (see [`real_tangent_basis`]).
fn coordinates_of(a: &ExactMatrix) -> Vec<GaussianRational> {
    a.entries()
        .flat_map(|z| {
            [
                GaussianRational::from_real(z.re().clone()),
                GaussianRational::from_real(z.im().clone()),
            ]
        })
        .collect()
}

/// `I`, `J`, `K` as exact real matrices on the `2r(r+1)` coordinates,
/// acting on `δA₃` by `I a = i·a`, `J a = i·τ(a)`, `K a = −τ(a)`; these are
/// `(a, b) ↦ (ia, −ib)`, `(ib, ia)`, `(−b, a)` on sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexStructures {
    pub i: ExactMatrix,
    pub j: ExactMatrix,
    pub k: ExactMatrix,
}

pub fn complex_structures(r: usize) -> ComplexStructures {
    let tau = QuaternionicStructure::new(r);
    let basis = real_tangent_basis(r);
    let n = basis.len();
    let build = |op: &dyn Fn(&ExactMatrix) -> ExactMatrix| {
        let cols: Vec<Vec<GaussianRational>> = basis.iter().map(|s| coordinates_of(&op(&s.a))).collect();
        ExactMatrix::from_columns(n, &cols)
    };
    let i = GaussianRational::i();
    ComplexStructures {
        i: build(&|a| a.scale(&i)),
        j: build(&|a| tau.apply(a).scale(&i)),
        k: build(&|a| -&tau.apply(a)),
    }
}

/// `I`, `J`, `K` on the complexified section space of pairs `(a, b)` of
/// arbitrary complex `(r+1) × r` matrices, as `2n × 2n` matrices with
/// `n = r(r+1)` (coordinates: entries of `a`, then entries of `b`).
pub fn complexified_structures(r: usize) -> ComplexStructures {
    let n = r * (r + 1);
    let i = GaussianRational::i();
    let one = GaussianRational::one();
    let block = |tl: GaussianRational, tr: GaussianRational, bl: GaussianRational, br: GaussianRational| {
        ExactMatrix::from_fn(2 * n, 2 * n, |p, q| {
            let (bp, bq) = (p / n, q / n);
            if p % n != q % n {
                return GaussianRational::zero();
            }
            match (bp, bq) {
                (0, 0) => tl.clone(),
                (0, 1) => tr.clone(),
                (1, 0) => bl.clone(),
                _ => br.clone(),
            }
        })
    };
    let z = GaussianRational::zero;
    ComplexStructures {
        i: block(i.clone(), z(), z(), -i.clone()),
        j: block(z(), i.clone(), i.clone(), z()),
        k: block(z(), -one.clone(), one, z()),
    }
}
