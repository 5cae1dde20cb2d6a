//! Closed-form existence criteria.
//!
//! Everything that can be decided in integers is: square roots are removed
//! by squaring, and F_1, F_2 become polynomial inequalities. Only F_3 needs
//! logarithms, which are enclosed in intervals and refined until decided.

pub mod interval;
mod scan;

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

pub use interval::Interval;
pub use scan::{
    case_iv_threshold, classify, exception_scan, in_table1, table1_report, table1_rows, x_pairs, Case, Neighbour,
    ScanOptions, ScanReport, ScanRow, ScanVerdict, Table1Row, Table1RowReport, TheoremVerdict, ThresholdReport,
    LISTED_EXCEPTIONS,
};

use crate::error::{Error, Result};
use crate::ntheory::{euler_phi, factor_power_minus_one, FactorBudget, FactorCache, Factorization};

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn binomial(n: u32, k: u32) -> BigUint {
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Sign of a + b√q for integers a, b and q > 0.
pub fn sign_surd(a: &BigInt, b: &BigInt, q: u64) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    let pos = |s: Sign| s == Sign::Plus;
    let neg = |s: Sign| s == Sign::Minus;
    if !neg(sa) && !neg(sb) {
        return if pos(sa) || pos(sb) { Ordering::Greater } else { Ordering::Equal };
    }
    if !pos(sa) && !pos(sb) {
        return Ordering::Less;
    }
    // opposite signs: compare a^2 with b^2 q
    let a2 = a * a;
    let b2q = b * b * BigInt::from(q);
    let mag = a2.cmp(&b2q);
    if pos(sa) {
        mag
    } else {
        mag.reverse()
    }
}

/// δ(q, n) = Σ_{i<n} C(n,i) q^min(i, n/2), stored as a + b√q (b = 0 for even n).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Delta {
    pub q: u64,
    pub n: u32,
    #[serde(serialize_with = "ser_big")]
    pub a: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub b: BigUint,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn delta(q: u64, n: u32) -> Delta {
    let qb = big(q);
    let mut a = BigUint::zero();
    let mut b = BigUint::zero();
    for i in 0..n {
        let c = binomial(n, i);
        if 2 * i <= n {
            a += c * qb.pow(i);
        } else if n % 2 == 0 {
            a += c * qb.pow(n / 2);
        } else {
            b += c * qb.pow(n / 2);
        }
    }
    Delta { q, n, a, b }
}

impl Delta {
    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::INFINITY) + self.b.to_f64().unwrap_or(f64::INFINITY) * (self.q as f64).sqrt()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero()
    }

    /// δ(q, n) ≤ (2^n - 1) q^(n/2), decided exactly.
    pub fn at_most_crude_bound(&self) -> bool {
        let c = (BigUint::one() << self.n) - 1u32;
        let half = big(self.q).pow(self.n / 2);
        if self.n % 2 == 0 {
            return self.a <= c * half;
        }
        // a + b√q ≤ c q^((n-1)/2) √q  ⟺  a ≤ (c' - b)√q
        let c2 = c * half;
        if c2 < self.b {
            return false;
        }
        let r = &c2 - &self.b;
        &self.a * &self.a <= &r * &r * big(self.q)
    }
}

/// ((q - 1) / (2√q))^n compared with W, exactly: W²(4q)^n ≤ (q-1)^{2n}.
pub fn check_eq2(q: u64, n: u32, w: &BigUint) -> bool {
    w * w * big(4 * q).pow(n) <= big(q - 1).pow(2 * n)
}

/// (q - 1)^n > δ(q, n) W.
pub fn check_a(q: u64, n: u32, w: &BigUint, d: &Delta) -> bool {
    let lhs = BigInt::from(big(q - 1).pow(n));
    let w = BigInt::from(w.clone());
    let l = lhs - BigInt::from(d.a.clone()) * &w;
    let rest = -(BigInt::from(d.b.clone()) * &w);
    sign_surd(&l, &rest, q) == Ordering::Greater
}

/// (q - 1)^n + φ(q^n - 1) > q^n.
pub fn check_b(q: u64, n: u32, phi: &BigUint) -> bool {
    big(q - 1).pow(n) + phi > big(q).pow(n)
}

/// F_1 bound, exactly: 49^4 16^n q^{3n} ≤ 10^4 (q - 1)^{4n}.
pub fn f1_holds(q: u64, n: u32) -> bool {
    big(49).pow(4) * big(16).pow(n) * big(q).pow(3 * n) <= big(10).pow(4) * big(q - 1).pow(4 * n)
}

/// F_2 bound, exactly: 45147^8 256^n q^{5n} ≤ 10^8 (q - 1)^{8n}.
pub fn f2_holds(q: u64, n: u32) -> bool {
    big(45147).pow(8) * big(256).pow(n) * big(q).pow(5 * n) <= big(10).pow(8) * big(q - 1).pow(8 * n)
}

/// Precision schedule for interval decisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 64,
            max_bits: 4096,
        }
    }
}

/// Logs of the three terms F_i(q^n)^{1/n} and of (q - 1)/(2√q).
#[derive(Clone, Debug)]
pub struct LogTerms {
    pub f: [Interval; 3],
    pub rhs: Interval,
}

/// Encloses ln F_i(q^n)^{1/n} and ln((q - 1)/(2√q)) at `prec` bits.
///
/// ln F_1^{1/n} = ln(4.9)/n + ln(q)/4, ln F_2^{1/n} = ln(4514.7)/n + ln(q)/8,
/// ln F_3^{1/n} = 0.96 ln(q) / ln(n ln q).
pub fn log_terms(q: u64, n: u32, prec: u32) -> Result<LogTerms> {
    let lnq = Interval::from_int(q, prec).ln()?;
    let n_i = Interval::from_int(n, prec);
    let nlnq = lnq.scale(n as i64);
    if !nlnq.gt(&Interval::from_int(1, prec)) {
        if nlnq.le(&Interval::from_int(1, prec)) {
            return Err(Error::DomainError(format!("log log of {q}^{n} is not positive")));
        }
        return Err(Error::PrecisionExhausted { bits: prec });
    }
    let c1 = Interval::from_ratio(49, 10, prec).ln()?;
    let c2 = Interval::from_ratio(45147, 10, prec).ln()?;
    let f1 = c1.div(&n_i)?.add(&lnq.div(&Interval::from_int(4, prec))?);
    let f2 = c2.div(&n_i)?.add(&lnq.div(&Interval::from_int(8, prec))?);
    let f3 = lnq.mul(&Interval::from_ratio(96, 100, prec)).div(&nlnq.ln()?)?;
    let rhs = Interval::from_int(q - 1, prec)
        .ln()?
        .sub(&Interval::from_int(2, prec).ln()?)
        .sub(&lnq.div(&Interval::from_int(2, prec))?);
    Ok(LogTerms { f: [f1, f2, f3], rhs })
}

/// Runs `decide` at increasing precision until it returns a verdict.
fn refine<T>(prec: Precision, mut decide: impl FnMut(u32) -> Result<Option<T>>) -> Result<T> {
    let mut bits = prec.start_bits;
    loop {
        match decide(bits) {
            Ok(Some(v)) => return Ok(v),
            Ok(None) | Err(Error::PrecisionExhausted { .. }) => {}
            Err(e) => return Err(e),
        }
        if bits >= prec.max_bits {
            return Err(Error::PrecisionExhausted { bits });
        }
        bits = (bits * 2).min(prec.max_bits);
    }
}

/// min_i F_i(q^n)^{1/n} ≤ (q - 1)/(2√q).
pub fn check_eq3(q: u64, n: u32, prec: Precision) -> Result<bool> {
    if q < 2 || n < 1 {
        return Err(Error::DomainError(format!("({q}, {n})")));
    }
    if f1_holds(q, n) || f2_holds(q, n) {
        return Ok(true);
    }
    f3_holds(q, n, prec)
}

/// The F_3 term alone against (q - 1)/(2√q).
pub fn f3_holds(q: u64, n: u32, prec: Precision) -> Result<bool> {
    refine(prec, |bits| {
        let t = log_terms(q, n, bits)?;
        Ok(if t.f[2].le(&t.rhs) {
            Some(true)
        } else if t.f[2].gt(&t.rhs) {
            Some(false)
        } else {
            None
        })
    })
}

/// The three F_i(q^n)^{1/n} and (q - 1)/(2√q), rounded to f64, and the
/// index (1-based) of the smallest F_i.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FValues {
    pub f: [f64; 3],
    pub rhs: f64,
    pub minimizer: usize,
}

pub fn f_values(q: u64, n: u32, prec: Precision) -> Result<FValues> {
    refine(prec, |bits| {
        let t = log_terms(q, n, bits)?;
        let mut best = 0;
        for i in 1..3 {
            match t.f[i].compare(&t.f[best]) {
                Some(Ordering::Less) => best = i,
                Some(_) => {}
                None => return Ok(None),
            }
        }
        Ok(Some(FValues {
            f: [0, 1, 2].map(|i| t.f[i].mid_f64().exp()),
            rhs: t.rhs.mid_f64().exp(),
            minimizer: best + 1,
        }))
    })
}

/// Lower bound on the number of primitive elements of S_C*:
/// φ(N)/N · ((q-1)^n - δ(q,n) W), N = q^n - 1, held as φ/N · (A + B√q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem32Bound {
    pub q: u64,
    pub phi: BigUint,
    pub unit_order: BigUint,
    pub a: BigInt,
    pub b: BigInt,
}

pub fn theorem32_lower_bound(q: u64, n: u32, w: &BigUint, d: &Delta, phi: &BigUint) -> Theorem32Bound {
    let w = BigInt::from(w.clone());
    Theorem32Bound {
        q,
        phi: phi.clone(),
        unit_order: big(q).pow(n) - 1u32,
        a: BigInt::from(big(q - 1).pow(n)) - BigInt::from(d.a.clone()) * &w,
        b: -(BigInt::from(d.b.clone()) * &w),
    }
}

impl Theorem32Bound {
    pub fn is_nonnegative(&self) -> bool {
        sign_surd(&self.a, &self.b, self.q) != Ordering::Less
    }

    /// count > bound, exactly.
    pub fn exceeded_by(&self, count: u64) -> bool {
        let phi = BigInt::from(self.phi.clone());
        let lhs = BigInt::from(count) * BigInt::from(self.unit_order.clone()) - &phi * &self.a;
        sign_surd(&lhs, &(-(&phi * &self.b)), self.q) == Ordering::Greater
    }

    /// The exact value when it is rational.
    pub fn rational(&self) -> Option<BigRational> {
        self.b.is_zero().then(|| {
            BigRational::new(
                BigInt::from(self.phi.clone()) * &self.a,
                BigInt::from(self.unit_order.clone()),
            )
        })
    }

    pub fn to_f64(&self) -> f64 {
        let s = (self.q as f64).sqrt();
        let core = self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * s;
        core * self.phi.to_f64().unwrap_or(f64::NAN) / self.unit_order.to_f64().unwrap_or(f64::NAN)
    }
}

/// Every quantity of the case analysis for one pair; `None` marks a check
/// that could not be decided because q^n - 1 was not factored.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub q: u64,
    pub n: u32,
    pub delta: Delta,
    pub delta_value: f64,
    pub w: Option<u64>,
    pub phi: Option<String>,
    pub eq2: Option<bool>,
    pub eq3: bool,
    pub check_a: Option<bool>,
    pub check_b: Option<bool>,
    pub f_values: FValues,
}

/// Builds the full report. The factorization is looked up or computed
/// within `budget`; a timeout leaves the W-dependent fields unknown.
pub fn bound_report(q: u64, n: u32, cache: Option<&FactorCache>, budget: &FactorBudget, prec: Precision) -> Result<BoundReport> {
    let d = delta(q, n);
    let f = match factor_power_minus_one(q, n, cache, budget) {
        Ok(f) => Some(f),
        Err(Error::FactoringTimeout { .. }) => None,
        Err(e) => return Err(e),
    };
    let wp = f.as_ref().map(w_phi);
    Ok(BoundReport {
        q,
        n,
        delta_value: d.to_f64(),
        w: wp.as_ref().map(|(w, _)| w.to_u64().expect("W fits in 64 bits")),
        phi: wp.as_ref().map(|(_, p)| p.to_string()),
        eq2: wp.as_ref().map(|(w, _)| check_eq2(q, n, w)),
        eq3: check_eq3(q, n, prec)?,
        check_a: wp.as_ref().map(|(w, _)| check_a(q, n, w, &d)),
        check_b: wp.as_ref().map(|(_, p)| check_b(q, n, p)),
        f_values: f_values(q, n, prec)?,
        delta: d,
    })
}

/// W and φ of a factored q^n - 1.
pub fn w_phi(f: &Factorization) -> (BigUint, BigUint) {
    (f.squarefree_divisor_count(), euler_phi(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: u64) -> BigUint {
        big(v)
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(3, 2).a, u(7));
        assert_eq!(delta(2, 4).a, u(49));
        assert!(delta(2, 4).at_most_crude_bound());
        for q in 2..30 {
            assert_eq!(delta(q, 2).a, u(1 + 2 * q));
        }
        // n = 3: 1 + 3q + 3q√q
        let d = delta(5, 3);
        assert_eq!((d.a.clone(), d.b.clone()), (u(16), u(15)));
        assert!((d.to_f64() - (16.0 + 15.0 * 5f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn delta_crude_bound_grid() {
        for q in 2..=64 {
            for n in 2..=24 {
                assert!(delta(q, n).at_most_crude_bound(), "({q},{n})");
            }
        }
    }

    #[test]
    fn surd_signs() {
        let s = |a: i64, b: i64, q| sign_surd(&BigInt::from(a), &BigInt::from(b), q);
        assert_eq!(s(3, -1, 9), Ordering::Equal);
        assert_eq!(s(3, -1, 8), Ordering::Greater);
        assert_eq!(s(-3, 1, 10), Ordering::Greater);
        assert_eq!(s(-3, 1, 8), Ordering::Less);
        assert_eq!(s(0, 0, 5), Ordering::Equal);
        assert_eq!(s(-1, -1, 5), Ordering::Less);
    }

    #[test]
    fn eq2_examples() {
        assert!(!check_eq2(7, 2, &u(4)));
        // 389^2 - 1 = 151320 = 2^3 · 3 · 5 · 13 · 97
        assert!(check_eq2(389, 2, &u(32)));
        for n in 2..20 {
            assert!(!check_eq2(2, n, &u(2)));
        }
    }

    #[test]
    fn check_a_and_b_examples() {
        // 255 = 3 · 5 · 17
        assert!(!check_a(16, 2, &u(8), &delta(16, 2)));
        // 14640 = 2^4 · 3 · 5 · 61, φ = 3840
        assert!(!check_b(11, 4, &u(3840)));
        for n in 2..20u32 {
            let phi_max = (1u64 << n) - 2;
            assert!(!check_b(2, n, &u(phi_max)));
        }
        // 37^3 - 1 = 50652 = 2^2 · 3^3 · 7 · 67; δ = 1 + 111 + 111√37
        let d = delta(37, 3);
        let lhs = 36f64.powi(3);
        let rhs = d.to_f64() * 16.0;
        assert_eq!(check_a(37, 3, &u(16), &d), lhs > rhs);
    }

    #[test]
    fn lower_bound_examples() {
        // q = 7, n = 2: 16/48 · (36 - 15 · 4) = -8
        let b = theorem32_lower_bound(7, 2, &u(4), &delta(7, 2), &u(16));
        assert_eq!(b.rational().unwrap(), BigRational::from_integer(BigInt::from(-8)));
        assert!(!b.is_nonnegative());
        assert!(b.exceeded_by(0));
        let b = theorem32_lower_bound(7, 3, &u(8), &delta(7, 3), &u(108));
        assert!(b.rational().is_none());
        assert!(b.to_f64() < 0.0);
    }

    #[test]
    fn eq3_table_corners() {
        let p = Precision::default();
        for (q, n) in [(389, 2), (76, 4), (16, 25), (13, 45), (11, 76)] {
            assert!(check_eq3(q, n, p).unwrap(), "({q},{n})");
        }
        for (q, n) in [(388, 2), (75, 4), (16, 24), (13, 44), (11, 75)] {
            assert!(!check_eq3(q, n, p).unwrap(), "({q},{n})");
        }
    }

    #[test]
    fn f_values_match_floating_point() {
        let v = f_values(389, 2, Precision::default()).unwrap();
        assert!((v.f[0] - (4.9 * 389f64.sqrt()).sqrt()).abs() < 1e-12);
        assert_eq!(v.minimizer, 1);
        assert!((v.rhs - 388.0 / (2.0 * 389f64.sqrt())).abs() < 1e-12);
        let v = f_values(16, 25, Precision::default()).unwrap();
        assert_eq!(v.minimizer, 3);
        assert!(v.f[1] > v.f[2]);
    }

    #[test]
    fn domain_error_for_tiny_fields() {
        // 2^1: ln ln 2 < 0
        assert!(matches!(log_terms(2, 1, 64), Err(Error::DomainError(_))));
    }
}
