//! Exact scalars `a + b·i` with arbitrary-precision rational parts.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// A Gaussian rational number. Both parts are kept in lowest terms with
/// positive denominators (guaranteed by `BigRational`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid number literal {literal:?}: {reason}")]
pub struct LiteralError {
    pub literal: String,
    pub reason: &'static str,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(re.into()),
            im: BigRational::from_integer(im.into()),
        }
    }

    /// `num/den` as a real Gaussian rational.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self {
            re: BigRational::new(num.into(), den.into()),
            im: BigRational::zero(),
        }
    }

    pub fn from_real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|² = z·conj(z)`, always real.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero Gaussian rational");
        Self {
            re: &self.re / &n,
            im: -(&self.im / &n),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Least common multiple of the two denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// Scales by an integer multiple of the denominators and returns the
    /// Gaussian integer `(re, im)`. Panics if `scale` does not clear them.
    pub fn scaled_integer(&self, scale: &BigInt) -> (BigInt, BigInt) {
        let re = &self.re * BigRational::from_integer(scale.clone());
        let im = &self.im * BigRational::from_integer(scale.clone());
        assert!(re.is_integer() && im.is_integer());
        (re.to_integer(), im.to_integer())
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_ints(1, 0)
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &'b GaussianRational) -> GaussianRational {
                let f: fn(&GaussianRational, &GaussianRational) -> GaussianRational = $body;
                f(self, rhs)
            }
        }
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $tr<&'b GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &'b GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| GaussianRational {
    re: &a.re + &b.re,
    im: &a.im + &b.im,
});
forward_binop!(Sub, sub, |a, b| GaussianRational {
    re: &a.re - &b.re,
    im: &a.im - &b.im,
});
forward_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussianRational::from_real(&a.re * &b.re);
    }
    GaussianRational {
        re: &a.re * &b.re - &a.im * &b.im,
        im: &a.re * &b.im + &a.im * &b.re,
    }
});
forward_binop!(Div, div, |a, b| a * &b.inv());

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -self.clone()
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign for GaussianRational {
    fn add_assign(&mut self, rhs: GaussianRational) {
        *self += &rhs;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Product for GaussianRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

fn write_rat(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

/// Formats using the literal grammar: `3`, `-1/2`, `2i`, `2+1/3i`, `2-1/3i`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write_rat(f, &self.re),
            (true, false) => {
                write_rat(f, &self.im)?;
                write!(f, "i")
            }
            (false, false) => {
                write_rat(f, &self.re)?;
                if self.im.is_negative() {
                    write!(f, "-")?;
                    write_rat(f, &-self.im.clone())?;
                } else {
                    write!(f, "+")?;
                    write_rat(f, &self.im)?;
                }
                write!(f, "i")
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = parse_int(num)?;
    match den {
        None => Some(BigRational::from_integer(num)),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(num, d))
        }
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `RAT | RAT "i" | RAT ("+"|"-") RAT "i"`. The Unicode minus sign
/// U+2212 is accepted wherever `-` is.
impl FromStr for GaussianRational {
    type Err = LiteralError;

    fn from_str(literal: &str) -> Result<Self, Self::Err> {
        let err = |reason| LiteralError {
            literal: literal.to_string(),
            reason,
        };
        let s: String = literal.trim().replace('\u{2212}', "-");
        if s.is_empty() {
            return Err(err("empty literal"));
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_rat(&s)
                .map(GaussianRational::from_real)
                .ok_or_else(|| err("malformed rational"));
        };
        // The split point is the last sign that is not the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        match split {
            None => {
                let im = parse_rat(body).ok_or_else(|| err("malformed imaginary part"))?;
                Ok(GaussianRational::new(BigRational::zero(), im))
            }
            Some(at) => {
                let re = parse_rat(&body[..at]).ok_or_else(|| err("malformed real part"))?;
                let sign = &body[at..at + 1];
                let rest = &body[at + 1..];
                if rest.starts_with('-') || rest.starts_with('+') {
                    return Err(err("doubled sign"));
                }
                let mut im = parse_rat(rest).ok_or_else(|| err("malformed imaginary part"))?;
                if sign == "-" {
                    im = -im;
                }
                Ok(GaussianRational::new(re, im))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_literal_forms() {
        assert_eq!(g("3"), GaussianRational::from_ints(3, 0));
        assert_eq!(g("\u{2212}1/2"), GaussianRational::ratio(-1, 2));
        assert_eq!(
            g("2+1/3i"),
            GaussianRational::from_ints(2, 0) + GaussianRational::ratio(1, 3) * GaussianRational::i()
        );
        assert_eq!(g("-4i"), GaussianRational::from_ints(0, -4));
        assert_eq!(g("1/2-3i"), GaussianRational::ratio(1, 2) - GaussianRational::from_ints(0, 3));
        assert_eq!(g("2/4"), GaussianRational::ratio(1, 2));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "i", "1/0", "1/-2", "1+", "1+i", "a", "1+-2i", "1.5", "3/"] {
            assert!(bad.parse::<GaussianRational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "3", "-1/2", "2i", "-7/3i", "2+1/3i", "2-1/3i", "-1-i"] {
            let parsed: Result<GaussianRational, _> = s.parse();
            if let Ok(v) = parsed {
                assert_eq!(g(&v.to_string()), v);
            }
        }
        assert_eq!(g("2-1/3i").to_string(), "2-1/3i");
        assert_eq!(g("-7/3i").to_string(), "-7/3i");
    }

    #[test]
    fn norm_is_real_and_conj_involutive() {
        let z = g("3/5-7/2i");
        assert!((&z * &z.conj()).is_real());
        assert_eq!(z.conj().conj(), z);
        assert_eq!(&z * &z.inv(), GaussianRational::one());
    }
}
