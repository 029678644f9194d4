//! Gauss-Jordan elimination over exact rationals and over a prime field.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub trait Field: Clone + PartialEq + Debug {
    fn zero_el() -> Self;
    fn one_el() -> Self;
    fn is_zero_el(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self) -> Self;
    fn from_u64(v: u64) -> Self;
}

impl Field for BigRational {
    fn zero_el() -> Self {
        Zero::zero()
    }
    fn one_el() -> Self {
        One::one()
    }
    fn is_zero_el(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(v.into())
    }
}

/// The Mersenne prime `2^61 - 1`.
pub const MODULUS: u64 = (1 << 61) - 1;

/// Element of the prime field of order [`MODULUS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp(pub u64);

impl Fp {
    fn reduce(v: u128) -> u64 {
        let lo = (v as u64) & MODULUS;
        let hi = (v >> 61) as u64;
        let s = lo + hi;
        if s >= MODULUS {
            s - MODULUS
        } else {
            s
        }
    }

    fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Field for Fp {
    fn zero_el() -> Self {
        Fp(0)
    }
    fn one_el() -> Self {
        Fp(1)
    }
    fn is_zero_el(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        let s = self.0 + other.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
    fn sub(&self, other: &Self) -> Self {
        Fp(if self.0 >= other.0 {
            self.0 - other.0
        } else {
            self.0 + MODULUS - other.0
        })
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(Fp::reduce(self.0 as u128 * other.0 as u128))
    }
    fn inv(&self) -> Self {
        self.pow(MODULUS - 2)
    }
    fn from_u64(v: u64) -> Self {
        Fp(v % MODULUS)
    }
}

/// Reduced row echelon form of `rows`; zero rows are dropped. Returns the
/// pivot column of each remaining row.
pub fn rref<F: Field>(rows: &mut Vec<Vec<F>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero_el()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv();
        if inv != F::one_el() {
            for v in rows[r][col..].iter_mut() {
                if !v.is_zero_el() {
                    *v = v.mul(&inv);
                }
            }
        }
        let pivot_row = std::mem::take(&mut rows[r]);
        let nz: Vec<usize> = (col..ncols).filter(|&j| !pivot_row[j].is_zero_el()).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row.is_empty() || row[col].is_zero_el() {
                continue;
            }
            let factor = row[col].clone();
            for &j in &nz {
                row[j] = row[j].sub(&factor.mul(&pivot_row[j]));
            }
        }
        rows[r] = pivot_row;
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::q;

    #[test]
    fn rational_rank() {
        let mut rows = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        let piv = rref(&mut rows, 3);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(rows[0], vec![q(1), q(0), q(1)]);
        assert_eq!(rows[1], vec![q(0), q(1), q(1)]);
    }

    #[test]
    fn prime_field_arithmetic() {
        let a = Fp::from_u64(123_456_789);
        assert_eq!(a.mul(&a.inv()), Fp(1));
        assert_eq!(Fp(0).sub(&Fp(1)), Fp(MODULUS - 1));
        let mut rows = vec![vec![Fp(1), Fp(1)], vec![Fp(1), Fp(1)]];
        assert_eq!(rref(&mut rows, 2).len(), 1);
    }
}
