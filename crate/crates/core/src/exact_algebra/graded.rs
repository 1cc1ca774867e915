//! Matrices of forms and the linear maps they induce on graded pieces.

use std::ops::Mul;

use thiserror::Error;

use super::poly::{MonomialIndex, HomogPoly};
use super::ExactMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("entry ({row}, {col}) has degree {found}, expected {expected}")]
    Inhomogeneous {
        row: usize,
        col: usize,
        found: u32,
        expected: u32,
    },
}

/// A `rows × cols` matrix of forms in a common polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    num_vars: usize,
    entries: Vec<HomogPoly>,
}

impl PolyMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        num_vars: usize,
        mut f: impl FnMut(usize, usize) -> HomogPoly,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = f(i, j);
                assert_eq!(p.num_vars(), num_vars);
                entries.push(p);
            }
        }
        Self {
            rows,
            cols,
            num_vars,
            entries,
        }
    }

    /// `Σ_k coeffs[k]·x_k` for a list of scalar matrices of equal shape.
    pub fn linear(coeffs: &[ExactMatrix]) -> Self {
        let (rows, cols) = coeffs[0].shape();
        assert!(coeffs.iter().all(|m| m.shape() == (rows, cols)));
        let n = coeffs.len();
        Self::from_fn(rows, cols, n, |i, j| {
            let c: Vec<_> = coeffs.iter().map(|m| m[(i, j)].clone()).collect();
            HomogPoly::linear(&c)
        })
    }

    pub fn identity(n: usize, num_vars: usize) -> Self {
        Self::from_fn(n, n, num_vars, |i, j| {
            if i == j {
                HomogPoly::constant(num_vars, num_traits::One::one())
            } else {
                HomogPoly::zero(num_vars, 0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn get(&self, i: usize, j: usize) -> &HomogPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.num_vars, |i, j| self.get(j, i).clone())
    }

    /// Common degree of the nonzero entries. Zero entries are compatible with
    /// any degree; an all-zero matrix reports degree 0.
    pub fn entry_degree(&self) -> Result<u32, GradedError> {
        let mut expected: Option<u32> = None;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let p = self.get(i, j);
                if p.is_zero() {
                    continue;
                }
                match expected {
                    None => expected = Some(p.degree()),
                    Some(e) if e != p.degree() => {
                        return Err(GradedError::Inhomogeneous {
                            row: i,
                            col: j,
                            found: p.degree(),
                            expected: e,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(expected.unwrap_or(0))
    }
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows);
        let n = self.num_vars;
        let deg = self.entry_degree().unwrap_or(0) + rhs.entry_degree().unwrap_or(0);
        PolyMatrix::from_fn(self.rows, rhs.cols, n, |i, j| {
            let mut acc = HomogPoly::zero(n, deg);
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }
}

/// The linear map `(S_s)^{cols} → (S_{s+e})^{rows}`, `v ↦ φ·v`, written in
/// monomial coordinates. Coordinates are grouped by component: index
/// `component · (piece size) + monomial position`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub source_degree: i64,
    pub target_degree: i64,
    pub source_multiplicity: usize,
    pub target_multiplicity: usize,
    pub matrix: ExactMatrix,
}

impl GradedMap {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

/// Matrix of `v ↦ φ·v` from the degree-`source_degree` piece. Fails when
/// the entries of `φ` do not share one degree.
pub fn graded_matrix(phi: &PolyMatrix, source_degree: i64) -> Result<GradedMap, GradedError> {
    let e = phi.entry_degree()? as i64;
    let n = phi.num_vars();
    let src = MonomialIndex::new(n, source_degree);
    let tgt = MonomialIndex::new(n, source_degree + e);
    let (p, q) = (phi.rows(), phi.cols());
    let mut m = ExactMatrix::zeros(p * tgt.len(), q * src.len());
    for (si, mono) in src.basis().iter().enumerate() {
        for j in 0..q {
            let col = j * src.len() + si;
            for i in 0..p {
                let entry = phi.get(i, j);
                for (exp, c) in entry.terms() {
                    let prod: Vec<u32> = exp.iter().zip(mono).map(|(a, b)| a + b).collect();
                    let row = i * tgt.len() + tgt.position(&prod).expect("product monomial");
                    m[(row, col)] += c;
                }
            }
        }
    }
    Ok(GradedMap {
        source_degree,
        target_degree: source_degree + e,
        source_multiplicity: q,
        target_multiplicity: p,
        matrix: m,
    })
}
