//! Fixed-point interval arithmetic over big integers.
//!
//! An interval at precision p is [lo / 2^p, hi / 2^p]. Every operation rounds
//! lo down and hi up, and the logarithm carries an explicit error bound, so
//! the true value is always enclosed.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Extra working bits inside `ln`.
const GUARD: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn floor_shr(a: &BigInt, k: u32) -> BigInt {
    // BigInt >> rounds toward negative infinity
    a >> k
}

fn ceil_shr(a: &BigInt, k: u32) -> BigInt {
    -((-a) >> k)
}

impl Interval {
    pub fn from_int(v: impl Into<BigInt>, prec: u32) -> Self {
        let v = v.into() << prec;
        Interval {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    /// num / den, den > 0.
    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>, prec: u32) -> Self {
        let num = num.into() << prec;
        let den = den.into();
        assert!(den.is_positive());
        Interval {
            lo: floor_div(&num, &den),
            hi: ceil_div(&num, &den),
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_f64(&self) -> f64 {
        scaled_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        scaled_to_f64(&self.hi, self.prec)
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&(&self.lo + &self.hi), self.prec + 1)
    }

    /// hi - lo in units of 2^-prec.
    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    fn check(&self, other: &Interval) {
        assert_eq!(self.prec, other.prec, "precision mismatch");
    }

    pub fn add(&self, other: &Interval) -> Interval {
        self.check(other);
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.check(other);
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        self.check(other);
        let p = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = p.iter().min().unwrap();
        let max = p.iter().max().unwrap();
        Interval {
            lo: floor_shr(min, self.prec),
            hi: ceil_shr(max, self.prec),
            prec: self.prec,
        }
    }

    /// Multiplication by an exact integer.
    pub fn scale(&self, k: i64) -> Interval {
        let (a, b) = (&self.lo * k, &self.hi * k);
        let (lo, hi) = if k >= 0 { (a, b) } else { (b, a) };
        Interval {
            lo,
            hi,
            prec: self.prec,
        }
    }

    /// Division by an interval that is strictly positive.
    pub fn div(&self, other: &Interval) -> Result<Interval> {
        self.check(other);
        if !other.lo.is_positive() {
            return Err(Error::DomainError("division by an interval containing 0".into()));
        }
        let num = [&self.lo << self.prec, &self.hi << self.prec];
        let quots_lo: Vec<BigInt> = num
            .iter()
            .flat_map(|a| [floor_div(a, &other.lo), floor_div(a, &other.hi)])
            .collect();
        let quots_hi: Vec<BigInt> = num
            .iter()
            .flat_map(|a| [ceil_div(a, &other.lo), ceil_div(a, &other.hi)])
            .collect();
        Ok(Interval {
            lo: quots_lo.into_iter().min().unwrap(),
            hi: quots_hi.into_iter().max().unwrap(),
            prec: self.prec,
        })
    }

    /// Natural logarithm of a strictly positive interval.
    pub fn ln(&self) -> Result<Interval> {
        if !self.lo.is_positive() {
            return Err(Error::DomainError("logarithm of a non-positive interval".into()));
        }
        let (lo_v, lo_e) = ln_scaled(&self.lo, self.prec);
        let (hi_v, hi_e) = ln_scaled(&self.hi, self.prec);
        Ok(Interval {
            lo: lo_v - lo_e,
            hi: hi_v + hi_e,
            prec: self.prec,
        })
    }

    /// Certainly self <= other.
    pub fn le(&self, other: &Interval) -> bool {
        self.check(other);
        self.hi <= other.lo
    }

    /// Certainly self > other.
    pub fn gt(&self, other: &Interval) -> bool {
        self.check(other);
        self.lo > other.hi
    }

    /// Decided ordering, or `None` when the intervals overlap.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

fn scaled_to_f64(v: &BigInt, prec: u32) -> f64 {
    // Keep 64 significant bits before converting.
    let bits = v.bits() as i64;
    let shift = (bits - 64).max(0) as u32;
    let head = (v >> shift).to_f64().unwrap_or(f64::NAN);
    head * 2f64.powi(shift as i32 - prec as i32)
}

/// 2·atanh(z) for 0 <= z < 1/2 at working precision w, with an error bound in
/// ulps. `z` is scaled by 2^w.
fn two_atanh(z: &BigInt, w: u32) -> (BigInt, u64) {
    let z2 = (z * z) >> w;
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = (&power * &z2) >> w;
        k += 1;
    }
    // Each term and each power update loses at most one ulp, and the tail
    // after the power underflows is below one ulp; doubling doubles it.
    (sum << 1, 2 * (2 * k + 2))
}

/// ln(2) at working precision w.
fn ln2(w: u32) -> (BigInt, u64) {
    let third = (BigInt::one() << w) / BigInt::from(3);
    let (v, e) = two_atanh(&third, w);
    (v, e + 3)
}

/// ln(x / 2^p) scaled by 2^p, for x > 0, with an error bound in ulps.
fn ln_scaled(x: &BigInt, p: u32) -> (BigInt, BigInt) {
    let w = p + GUARD;
    let xw = x << GUARD;
    // xw = m · 2^k with m in [2^w, 2^{w+1})
    let k = xw.bits() as i64 - 1 - w as i64;
    let (m, m_err) = match k.cmp(&0) {
        Ordering::Greater => (&xw >> (k as u32), 1u64),
        Ordering::Less => (&xw << ((-k) as u32), 0),
        Ordering::Equal => (xw.clone(), 0),
    };
    let one = BigInt::one() << w;
    // z = (m - 1) / (m + 1) in [0, 1/3)
    let z = ((&m - &one) << w) / (&m + &one);
    let (at, at_err) = two_atanh(&z, w);
    let (l2, l2_err) = ln2(w);
    let total = at + &l2 * k;
    let err_w = at_err + 3 + 2 * m_err + l2_err * k.unsigned_abs();
    let value = match total.sign() {
        Sign::Minus => -((-&total) >> GUARD),
        _ => &total >> GUARD,
    };
    let err = BigInt::from(err_w >> GUARD) + 2;
    (value, err)
}
