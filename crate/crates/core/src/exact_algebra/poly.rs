//! Homogeneous multivariate polynomials and univariate polynomials over ℚ(i).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{ExactMatrix, GaussianRational};

pub type Exponent = Vec<u32>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("term {exponent:?} has degree {found}, expected {expected}")]
    Inhomogeneous {
        exponent: Exponent,
        found: u32,
        expected: u32,
    },
    #[error("exponent {exponent:?} has {found} variables, expected {expected}")]
    WrongArity {
        exponent: Exponent,
        found: usize,
        expected: usize,
    },
}

/// All exponent vectors of total degree `degree` in `num_vars` variables, in
/// descending lexicographic order (`x₁^degree` first). Empty for negative
/// degrees.
pub fn monomial_basis(num_vars: usize, degree: i64) -> Vec<Exponent> {
    assert!(num_vars >= 1, "monomial basis needs at least one variable");
    if degree < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; num_vars];
    fill_monomials(0, degree as u32, &mut current, &mut out);
    out
}

fn fill_monomials(var: usize, remaining: u32, current: &mut Exponent, out: &mut Vec<Exponent>) {
    if var + 1 == current.len() {
        current[var] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        fill_monomials(var + 1, remaining - e, current, out);
    }
    current[var] = 0;
}

/// `C(degree + num_vars − 1, num_vars − 1)`, or 0 for negative degree.
pub fn monomial_count(num_vars: usize, degree: i64) -> usize {
    if degree < 0 {
        return 0;
    }
    let n = degree as u128 + num_vars as u128 - 1;
    let k = (num_vars - 1) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c as usize
}

/// Monomial basis of one graded piece together with its position lookup.
#[derive(Clone, Debug)]
pub struct MonomialIndex {
    pub num_vars: usize,
    pub degree: i64,
    basis: Vec<Exponent>,
    position: HashMap<Exponent, usize>,
}

impl MonomialIndex {
    pub fn new(num_vars: usize, degree: i64) -> Self {
        let basis = monomial_basis(num_vars, degree);
        let position = basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Self {
            num_vars,
            degree,
            basis,
            position,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Exponent] {
        &self.basis
    }

    pub fn position(&self, e: &[u32]) -> Option<usize> {
        self.position.get(e).copied()
    }
}

/// A homogeneous polynomial: every stored exponent vector sums to `degree`
/// and no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogPoly {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<Exponent, GaussianRational>,
}

impl HomogPoly {
    pub fn zero(num_vars: usize, degree: u32) -> Self {
        Self {
            num_vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(num_vars, 0);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// The variable `x_{var}` (0-based) as a degree-1 form.
    pub fn var(num_vars: usize, var: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[var] = 1;
        Self::monomial(e, GaussianRational::one())
    }

    pub fn monomial(exponent: Exponent, c: GaussianRational) -> Self {
        let num_vars = exponent.len();
        let degree = exponent.iter().sum();
        let mut p = Self::zero(num_vars, degree);
        p.add_term(exponent, c);
        p
    }

    /// Linear form `Σ coeffs[j]·x_j`.
    pub fn linear(coeffs: &[GaussianRational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n, 1);
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms(
        num_vars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Exponent, GaussianRational)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(num_vars, degree);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(PolyError::WrongArity {
                    found: e.len(),
                    expected: num_vars,
                    exponent: e,
                });
            }
            let found: u32 = e.iter().sum();
            if found != degree {
                return Err(PolyError::Inhomogeneous {
                    exponent: e,
                    found,
                    expected: degree,
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Reads coefficients from a vector indexed by `index` (of matching degree).
    pub fn from_coefficients(index: &MonomialIndex, coeffs: &[GaussianRational]) -> Self {
        assert_eq!(coeffs.len(), index.len());
        assert!(index.degree >= 0);
        let mut p = Self::zero(index.num_vars, index.degree as u32);
        for (e, c) in index.basis().iter().zip(coeffs) {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: GaussianRational) {
        debug_assert_eq!(e.iter().sum::<u32>(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> GaussianRational {
        self.terms.get(e).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Coefficient vector in the order of `index`, which must have this degree.
    pub fn coefficients(&self, index: &MonomialIndex) -> Vec<GaussianRational> {
        assert_eq!(index.num_vars, self.num_vars);
        let mut v = vec![GaussianRational::zero(); index.len()];
        if self.is_zero() {
            return v;
        }
        assert_eq!(index.degree, self.degree as i64, "degree mismatch");
        for (e, c) in &self.terms {
            v[index.position(e).expect("monomial in basis")] = c.clone();
        }
        v
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut p = Self::zero(self.num_vars, self.degree);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    /// Conjugates every coefficient.
    pub fn conj(&self) -> Self {
        Self {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &[u32]) -> Self {
        let deg: u32 = m.iter().sum();
        Self {
            num_vars: self.num_vars,
            degree: self.degree + deg,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.num_vars, GaussianRational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn evaluate(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.num_vars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.clone();
                for (x, &k) in point.iter().zip(e) {
                    for _ in 0..k {
                        v = &v * x;
                    }
                }
                v
            })
            .sum()
    }

    pub fn evaluate_complex(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.to_complex();
                for (x, &k) in point.iter().zip(e) {
                    v *= x.powu(k);
                }
                v
            })
            .sum()
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut p = Self::zero(self.num_vars, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            p.add_term(e2, c * &GaussianRational::from(e[var] as i64));
        }
        p
    }

    /// Linear change of variables `x_j ↦ Σ_k m[j][k]·y_k`, where `m` has one
    /// row per old variable and one column per new variable.
    pub fn substitute_linear(&self, m: &ExactMatrix) -> Self {
        assert_eq!(m.rows(), self.num_vars);
        let images: Vec<HomogPoly> = (0..m.rows()).map(|j| HomogPoly::linear(m.row(j))).collect();
        let mut out = Self::zero(m.cols(), self.degree);
        for (e, c) in &self.terms {
            let mut term = HomogPoly::constant(m.cols(), c.clone());
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &images[j].pow(k);
                }
            }
            out = &out + &term;
        }
        out
    }
}

impl Add for &HomogPoly {
    type Output = HomogPoly;
    fn add(self, rhs: &HomogPoly) -> HomogPoly {
        assert_eq!(self.num_vars, rhs.num_vars);
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl Neg for &HomogPoly {
    type Output = HomogPoly;
    fn neg(self) -> HomogPoly {
        self.scale(&-GaussianRational::one())
    }
}

impl Sub for &HomogPoly {
    type Output = HomogPoly;
    fn sub(self, rhs: &HomogPoly) -> HomogPoly {
        self + &(-rhs)
    }
}

impl Mul for &HomogPoly {
    type Output = HomogPoly;
    fn mul(self, rhs: &HomogPoly) -> HomogPoly {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut p = HomogPoly::zero(self.num_vars, self.degree + rhs.degree);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }
}

impl fmt::Debug for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·x{}", j + 1)?,
                    _ => write!(f, "·x{}^{}", j + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// Univariate polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    coeffs: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn evaluate(&self, x: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.inv();
                Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    /// Euclidean division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = divisor.leading().unwrap().inv();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![GaussianRational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let t = &c * d;
                rem[k + j] -= &t;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// Newton interpolation through `(x_k, y_k)` with distinct nodes.
    pub fn interpolate(xs: &[GaussianRational], ys: &[GaussianRational]) -> UniPoly {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for level in 1..n {
            for k in (level..n).rev() {
                let num = &dd[k] - &dd[k - 1];
                let den = &xs[k] - &xs[k - level];
                dd[k] = &num / &den;
            }
        }
        let mut poly = UniPoly::new(vec![dd[n - 1].clone()]);
        for k in (0..n - 1).rev() {
            // poly = poly·(x − x_k) + dd[k]
            let mut c = vec![GaussianRational::zero(); poly.coeffs.len() + 1];
            for (j, a) in poly.coeffs.iter().enumerate() {
                c[j + 1] += a;
                c[j] -= &(a * &xs[k]);
            }
            c[0] += &dd[k];
            poly = UniPoly::new(c);
        }
        poly
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from(k as i64))
                .collect(),
        )
    }

    /// The product of the distinct monic irreducible factors, `p / gcd(p, p')`.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().map_or(true, |d| d == 0) {
            return self.monic();
        }
        self.div_rem(&self.gcd(&self.derivative())).0.monic()
    }

    /// The unique root of a degree-1 polynomial.
    pub fn linear_root(&self) -> Option<GaussianRational> {
        (self.degree() == Some(1)).then(|| -(&self.coeffs[0] / &self.coeffs[1]))
    }
}
