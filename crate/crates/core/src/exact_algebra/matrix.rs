//! Dense exact matrices over the Gaussian rationals.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::GaussianRational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = GaussianRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors. All rows must share one length.
    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| GaussianRational::from(v)).collect())
                .collect(),
        )
    }

    /// Stacks column vectors side by side; `nrows` is needed when `cols` is empty.
    pub fn from_columns(nrows: usize, cols: &[Vec<GaussianRational>]) -> Self {
        Self::from_fn(nrows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[GaussianRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<GaussianRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &GaussianRational> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(GaussianRational::conj).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Copy with row `skip` removed.
    pub fn without_row(&self, skip: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != skip).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        self.submatrix(&rows, &cols)
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_complex())
    }

    /// Exact rank via fraction-free elimination.
    pub fn rank(&self) -> usize {
        IntEchelon::new(self).rank
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let ech = IntEchelon::new(self);
        let mut rows: Vec<Vec<GaussianRational>> = ech
            .rows
            .iter()
            .take(ech.rank)
            .map(|r| r.iter().map(GaussInt::to_gaussian).collect())
            .collect();
        let pivots = ech.pivots;
        for (k, &p) in pivots.iter().enumerate() {
            let inv = rows[k][p].inv();
            for x in rows[k].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            let pivot_row = rows[k].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == k || row[p].is_zero() {
                    continue;
                }
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &(&f * y);
                    }
                }
            }
        }
        let m = if rows.is_empty() {
            ExactMatrix::zeros(0, self.cols)
        } else {
            ExactMatrix::from_rows(rows)
        };
        (m, pivots)
    }

    /// Columns form a basis of `{v : M v = 0}`; one vector per free column,
    /// with a 1 in that column.
    pub fn kernel_basis(&self) -> ExactMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let cols: Vec<Vec<GaussianRational>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![GaussianRational::zero(); self.cols];
                v[f] = GaussianRational::one();
                for (k, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(k, f)].clone();
                }
                v
            })
            .collect();
        ExactMatrix::from_columns(self.cols, &cols)
    }

    /// Some exact solution of `M x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&ExactMatrix::from_columns(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = r[(k, self.cols)].clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> GaussianRational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = GaussianRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return GaussianRational::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det = &det * &piv;
            let inv = piv.inv();
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] * &inv;
                for j in c..n {
                    if !a[(c, j)].is_zero() {
                        let d = &f * &a[(c, j)];
                        a[(i, j)] -= &d;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<ExactMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let (r, pivots) = self.hstack(&ExactMatrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(ExactMatrix::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = GaussianRational;
    fn index(&self, (i, j): (usize, usize)) -> &GaussianRational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussianRational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.shape(), rhs.shape());
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.shape(), rhs.shape());
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Gaussian integer used internally by the fraction-free elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussInt {
                re: &self.re * &o.re,
                im: BigInt::zero(),
            };
        }
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn to_gaussian(&self) -> GaussianRational {
        GaussianRational::new(
            BigRational::from_integer(self.re.clone()),
            BigRational::from_integer(self.im.clone()),
        )
    }

    /// Rough size used to prefer small pivots.
    fn bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }
}

/// Row echelon form over ℤ[i] by Bareiss elimination: at step `k` every
/// remaining row becomes `(p_k·row − a·pivot_row) / p_{k−1}`, where the
/// division is exact because all intermediate entries are minors of the
/// input. Entry sizes therefore stay bounded by the Hadamard bound.
struct IntEchelon {
    rows: Vec<Vec<GaussInt>>,
    pivots: Vec<usize>,
    rank: usize,
}

fn to_int_row(row: &[GaussianRational]) -> Vec<GaussInt> {
    let mut scale = BigInt::one();
    for x in row {
        if !x.is_zero() {
            scale = scale.lcm(&x.denom_lcm());
        }
    }
    row.iter()
        .map(|x| {
            if x.is_zero() {
                GaussInt::zero()
            } else {
                let (re, im) = x.scaled_integer(&scale);
                GaussInt { re, im }
            }
        })
        .collect()
}

fn remove_content(row: &mut [GaussInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.re.is_zero() {
            g = g.gcd(&x.re);
        }
        if !x.im.is_zero() {
            g = g.gcd(&x.im);
        }
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in row.iter_mut() {
        if !x.re.is_zero() {
            x.re = &x.re / &g;
        }
        if !x.im.is_zero() {
            x.im = &x.im / &g;
        }
    }
}

impl IntEchelon {
    fn new(m: &ExactMatrix) -> Self {
        let mut rows: Vec<Vec<GaussInt>> = (0..m.rows).map(|i| to_int_row(m.row(i))).collect();
        for r in rows.iter_mut() {
            remove_content(r);
        }
        // Rows that are entirely zero never take part.
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        let mut pivots = Vec::new();
        let mut rank = 0;
        let mut previous = GaussInt::one();
        for col in 0..m.cols {
            if rank == rows.len() {
                break;
            }
            // Prefer the smallest candidate pivot to limit coefficient growth.
            let Some(p) = (rank..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by_key(|&i| (rows[i][col].bits(), i))
            else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let prow = &head[rank];
            let piv = &prow[col];
            let divisor = previous.exact_divisor();
            for row in tail.iter_mut() {
                let a = row[col].clone();
                for (x, y) in row.iter_mut().zip(prow.iter()).skip(col) {
                    let mut v = if x.is_zero() { GaussInt::zero() } else { piv.mul(x) };
                    if !a.is_zero() && !y.is_zero() {
                        v = v.sub(&a.mul(y));
                    }
                    *x = divisor.divide(v);
                }
            }
            previous = piv.clone();
            pivots.push(col);
            rank += 1;
        }
        Self { rows, pivots, rank }
    }
}

/// Exact division by a fixed nonzero Gaussian integer `c`, computed as
/// `x·c̄ / |c|²`.
struct ExactDivisor {
    conj: GaussInt,
    norm: BigInt,
    trivial: bool,
}

impl GaussInt {
    fn zero() -> Self {
        GaussInt {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    fn one() -> Self {
        GaussInt {
            re: BigInt::one(),
            im: BigInt::zero(),
        }
    }

    fn sub(self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: self.re - &o.re,
            im: self.im - &o.im,
        }
    }

    fn exact_divisor(&self) -> ExactDivisor {
        ExactDivisor {
            conj: GaussInt {
                re: self.re.clone(),
                im: -self.im.clone(),
            },
            norm: &self.re * &self.re + &self.im * &self.im,
            trivial: self.im.is_zero() && self.re.is_one(),
        }
    }
}

impl ExactDivisor {
    fn divide(&self, x: GaussInt) -> GaussInt {
        if self.trivial || x.is_zero() {
            return x;
        }
        if self.conj.im.is_zero() {
            // Real divisor: divide componentwise.
            let d = &self.conj.re;
            debug_assert!((&x.re % d).is_zero() && (&x.im % d).is_zero());
            return GaussInt {
                re: x.re / d,
                im: x.im / d,
            };
        }
        let p = x.mul(&self.conj);
        debug_assert!((&p.re % &self.norm).is_zero() && (&p.im % &self.norm).is_zero());
        GaussInt {
            re: p.re / &self.norm,
            im: p.im / &self.norm,
        }
    }
}
