//! Reduction of Gaussian-rational matrices to a prime field.
//!
//! For a prime `p ≡ 1 (mod 4)` the map `ℤ[i] → F_p`, `i ↦ √−1`, is a ring
//! homomorphism, so every minor that is nonzero mod `p` is nonzero over
//! ℚ(i). The rank over `F_p` is therefore a certified lower bound for the
//! exact rank, which callers combine with structural upper bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{ExactMatrix, GaussianRational};

/// A prime `≡ 1 (mod 4)` just below `2⁶²`.
pub const MODULUS: u64 = 4_611_686_018_427_387_817;
/// A square root of `−1` modulo [`MODULUS`].
const SQRT_MINUS_ONE: u64 = 120_863_620_846_201_794;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    acc
}

fn inv(a: u64) -> u64 {
    pow(a, MODULUS - 2)
}

fn reduce_int(n: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().expect("residue fits in u64")
}

fn reduce_rational(q: &BigRational) -> Option<u64> {
    let den = reduce_int(q.denom());
    if den == 0 {
        return None;
    }
    Some(mul(reduce_int(q.numer()), inv(den)))
}

/// Image of `z` in `F_p`, or `None` when `p` divides a denominator.
pub fn reduce(z: &GaussianRational) -> Option<u64> {
    if z.is_zero() {
        return Some(0);
    }
    let re = reduce_rational(z.re())?;
    let im = reduce_rational(z.im())?;
    Some(add(re, mul(im, SQRT_MINUS_ONE)))
}

impl ExactMatrix {
    /// Rank of the reduction mod [`MODULUS`]; never exceeds the exact rank.
    /// `None` when some entry's denominator vanishes mod the prime.
    pub fn modular_rank(&self) -> Option<usize> {
        let (rows, cols) = self.shape();
        let mut a = Vec::with_capacity(rows * cols);
        for x in self.entries() {
            a.push(reduce(x)?);
        }
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&i| a[i * cols + c] != 0) else {
                continue;
            };
            if p != rank {
                for j in 0..cols {
                    a.swap(p * cols + j, rank * cols + j);
                }
            }
            let pinv = inv(a[rank * cols + c]);
            for i in rank + 1..rows {
                let f = a[i * cols + c];
                if f == 0 {
                    continue;
                }
                let f = mul(f, pinv);
                for j in c..cols {
                    let y = a[rank * cols + j];
                    if y != 0 {
                        a[i * cols + j] = sub(a[i * cols + j], mul(f, y));
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        Some(rank)
    }
}
