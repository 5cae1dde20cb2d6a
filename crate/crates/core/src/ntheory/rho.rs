//! Pollard rho with Brent's cycle detection.
//!
//! Seeds are derived from the attempt number, so a given input always walks
//! the same sequence. The big-integer variant charges every modular
//! multiplication against a shared budget.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::prime::{is_prime_u64, mul_mod};

/// Number of products folded into one gcd.
const BATCH: u64 = 128;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn brent_u64(n: u64, attempt: u64) -> Option<u64> {
    let c = 1 + splitmix(attempt) % (n - 1);
    let mut y = splitmix(attempt ^ 0x5555) % n;
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += BATCH;
        }
        r <<= 1;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// A nontrivial factor of an odd composite `n < 2^64`.
pub(crate) fn find_factor_u64(n: u64) -> u64 {
    debug_assert!(n > 3 && !is_prime_u64(n));
    if n % 2 == 0 {
        return 2;
    }
    let mut attempt = 0;
    loop {
        if let Some(d) = brent_u64(n, attempt) {
            return d;
        }
        attempt += 1;
    }
}

/// Fully factor `n < 2^64` into primes (unsorted, with repetition).
pub(crate) fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            out.push(m);
            continue;
        }
        let d = find_factor_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
}

/// Shared multiplication budget for big-integer rho.
#[derive(Debug)]
pub(crate) struct Meter {
    pub remaining: u64,
}

impl Meter {
    fn charge(&mut self, k: u64) -> bool {
        if self.remaining < k {
            self.remaining = 0;
            false
        } else {
            self.remaining -= k;
            true
        }
    }
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// A nontrivial factor of an odd composite big integer, or `None` when the
/// meter runs dry.
pub(crate) fn find_factor_big(n: &BigUint, meter: &mut Meter) -> Option<BigUint> {
    let one = BigUint::one();
    for attempt in 0.. {
        let c = BigUint::from(1 + splitmix(attempt) % 1_000_003);
        let mut y = BigUint::from(splitmix(attempt ^ 0x5555)) % n;
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            if !meter.charge(r) {
                return None;
            }
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                let steps = BATCH.min(r - k);
                if !meter.charge(2 * steps) {
                    return None;
                }
                for _ in 0..steps {
                    y = f(&y);
                    q = (&q * abs_diff(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            r <<= 1;
        }
        if &g == n {
            loop {
                if !meter.charge(2) {
                    return None;
                }
                ys = f(&ys);
                g = abs_diff(&x, &ys).gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n && !g.is_zero() {
            return Some(g);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u64_semiprimes() {
        let cases = [
            (1_000_003u64, 1_000_033u64),
            (4_294_967_291, 4_294_967_279),
            (65_537, 65_537),
        ];
        for (p, q) in cases {
            let mut out = Vec::new();
            factor_u64_into(p * q, &mut out);
            out.sort();
            let mut expect = vec![p, q];
            expect.sort();
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn big_semiprime_splits() {
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(998_244_353u64) * BigUint::from(1_000_000_009u64);
        let n = &p * &q;
        let mut meter = Meter { remaining: 10_000_000 };
        let d = find_factor_big(&n, &mut meter).unwrap();
        assert!((&n % &d).is_zero() && d != one() && d != n);
    }

    #[test]
    fn meter_exhaustion_reports_none() {
        let p = BigUint::from(18_446_744_073_709_551_557u64);
        let q = BigUint::from(18_446_744_073_709_551_533u64);
        let mut meter = Meter { remaining: 100 };
        assert!(find_factor_big(&(&p * &q), &mut meter).is_none());
    }

    fn one() -> BigUint {
        BigUint::one()
    }
}
