//! Exact integer number theory: factorization, Möbius, Euler's totient and
//! square-free divisors.

mod cache;
mod prime;
mod rho;

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use cache::FactorCache;
pub use prime::{is_prime_u64, is_probable_prime, pow_mod as pow_mod_u64, primes_up_to};

/// Limits for blind factoring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division runs over all primes up to this bound.
    pub trial_bound: u32,
    /// Maximum number of big-integer modular multiplications spent in rho.
    pub max_mulmods: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 1_000_000,
            max_mulmods: 1_000_000_000,
        }
    }
}

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// The factorization of 1.
    pub fn one() -> Self {
        Factorization {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Check a claimed factorization: product, ordering and primality of
    /// every listed prime. Input primes may come in any order and may repeat;
    /// they are merged.
    pub fn verified(value: BigUint, factors: Vec<(BigUint, u32)>) -> Result<Self, String> {
        let mut factors: Vec<(BigUint, u32)> = factors.into_iter().filter(|(_, e)| *e > 0).collect();
        factors.sort();
        let mut merged: Vec<(BigUint, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((last, le)) if *last == p => *le += e,
                _ => merged.push((p, e)),
            }
        }
        let mut product = BigUint::one();
        for (p, e) in &merged {
            if !is_probable_prime(p) {
                return Err(format!("{p} is not prime"));
            }
            product *= p.pow(*e);
        }
        if product != value {
            return Err(format!("product of factors is {product}, expected {value}"));
        }
        Ok(Factorization {
            value,
            factors: merged,
        })
    }

    /// Assemble from prime powers already known to be prime.
    fn from_primes(value: BigUint, mut primes: Vec<BigUint>) -> Self {
        primes.sort();
        let mut factors: Vec<(BigUint, u32)> = Vec::new();
        for p in primes {
            match factors.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        let f = Factorization { value, factors };
        debug_assert_eq!(f.product(), f.value);
        f
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    /// Distinct prime factors.
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Number of distinct prime factors, ω.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Product of two coprime-or-not factorizations.
    pub fn merge(&self, other: &Factorization) -> Factorization {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        factors.sort();
        let mut merged: Vec<(BigUint, u32)> = Vec::new();
        for (p, e) in factors {
            match merged.last_mut() {
                Some((last, le)) if *last == p => *le += e,
                _ => merged.push((p, e)),
            }
        }
        Factorization {
            value: &self.value * &other.value,
            factors: merged,
        }
    }

    /// W: the number of square-free divisors, 2^ω.
    pub fn squarefree_divisor_count(&self) -> BigUint {
        BigUint::one() << self.omega()
    }
}

impl fmt::Display for Factorization {
    /// Cache-file syntax: `VALUE = P1^E1 * P2 * ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.value)?;
        for (i, (p, e)) in self.factors.iter().enumerate() {
            let sep = if i == 0 { " " } else { " * " };
            if *e == 1 {
                write!(f, "{sep}{p}")?;
            } else {
                write!(f, "{sep}{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Factorization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Factor a 64-bit integer; always completes.
pub fn factor_u64(m: u64) -> Factorization {
    assert!(m >= 1, "factor of zero");
    let mut rest = m;
    let mut primes: Vec<u64> = Vec::new();
    for &p in prime::small_primes().iter().take_while(|&&p| p < 1 << 12) {
        let p = p as u64;
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            primes.push(p);
            rest /= p;
        }
    }
    rho::factor_u64_into(rest, &mut primes);
    Factorization::from_primes(
        BigUint::from(m),
        primes.into_iter().map(BigUint::from).collect(),
    )
}

/// Factor `m`, consulting `cache` first, then trial division and rho.
pub fn factor(m: &BigUint, cache: Option<&FactorCache>, budget: &FactorBudget) -> Result<Factorization> {
    if m.is_zero() {
        return Err(Error::InvalidParameters("cannot factor 0".into()));
    }
    if let Some(f) = cache.and_then(|c| c.get(m)) {
        return Ok(f.clone());
    }
    if let Some(small) = m.to_u64() {
        return Ok(factor_u64(small));
    }
    let mut primes: Vec<BigUint> = Vec::new();
    let mut rest = m.clone();
    for &p in prime::small_primes()
        .iter()
        .take_while(|&&p| p <= budget.trial_bound)
    {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            primes.push(pb.clone());
        }
    }
    let mut meter = rho::Meter {
        remaining: budget.max_mulmods,
    };
    let mut stack = vec![rest];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if let Some(small) = c.to_u64() {
            let mut out = Vec::new();
            rho::factor_u64_into(small, &mut out);
            primes.extend(out.into_iter().map(BigUint::from));
            continue;
        }
        if let Some(f) = cache.and_then(|cache| cache.get(&c)) {
            for (p, e) in f.factors() {
                primes.extend(std::iter::repeat_n(p.clone(), *e as usize));
            }
            continue;
        }
        if is_probable_prime(&c) {
            primes.push(c);
            continue;
        }
        match rho::find_factor_big(&c, &mut meter) {
            Some(d) => {
                let other = &c / &d;
                stack.push(d);
                stack.push(other);
            }
            None => {
                return Err(Error::FactoringTimeout {
                    value: m.to_string(),
                })
            }
        }
    }
    Ok(Factorization::from_primes(m.clone(), primes))
}

/// Factor q^n - 1 using the cache, then the cyclotomic split, then blind
/// factoring of each cyclotomic part.
pub fn factor_power_minus_one(
    q: u64,
    n: u32,
    cache: Option<&FactorCache>,
    budget: &FactorBudget,
) -> Result<Factorization> {
    if q < 2 || n == 0 {
        return Err(Error::InvalidParameters(format!("q^n - 1 with q={q}, n={n}")));
    }
    let value = BigUint::from(q).pow(n) - 1u32;
    if let Some(f) = cache.and_then(|c| c.get(&value)) {
        return Ok(f.clone());
    }
    let mut total = Factorization::one();
    for part in cyclotomic_split(q, n) {
        let f = factor(&part, cache, budget).map_err(|e| match e {
            Error::FactoringTimeout { .. } => Error::FactoringTimeout {
                value: value.to_string(),
            },
            other => other,
        })?;
        total = total.merge(&f);
    }
    debug_assert_eq!(total.value, value);
    Ok(total)
}

/// Divisors of `n` in increasing order.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Möbius function of a small integer.
pub fn moebius_u64(n: u64) -> i8 {
    moebius(&factor_u64(n))
}

/// Möbius function from a factorization: 0 unless square-free.
pub fn moebius(f: &Factorization) -> i8 {
    if f.factors.iter().any(|(_, e)| *e > 1) {
        0
    } else if f.omega() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Values Φ_d(q) for each divisor d of n, in increasing d. Their product is
/// q^n - 1.
pub fn cyclotomic_split(q: u64, n: u32) -> Vec<BigUint> {
    assert!(q >= 2 && n >= 1);
    let q = BigUint::from(q);
    divisors_u64(n as u64)
        .into_iter()
        .map(|d| {
            // Φ_d(q) = Π_{e | d} (q^e - 1)^{μ(d/e)}
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for e in divisors_u64(d) {
                let term = q.pow(e as u32) - 1u32;
                match moebius_u64(d / e) {
                    1 => num *= term,
                    -1 => den *= term,
                    _ => {}
                }
            }
            let (quot, rem) = num.div_rem(&den);
            debug_assert!(rem.is_zero());
            quot
        })
        .collect()
}

/// Euler's totient φ(value) = Π p^(e-1) (p - 1).
pub fn euler_phi(f: &Factorization) -> BigUint {
    f.factors
        .iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(e - 1) * (p - 1u32))
}

/// A square-free divisor of a factored integer, keyed by which of its prime
/// factors it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDivisor {
    pub value: BigUint,
    /// Bit i set when the i-th prime of the parent factorization divides.
    pub mask: u64,
    pub mu: i8,
}

/// All 2^ω square-free divisors (1 included), with their Möbius signs, in
/// increasing mask order.
pub fn squarefree_divisors(f: &Factorization) -> impl Iterator<Item = SquarefreeDivisor> + '_ {
    let omega = f.omega();
    assert!(omega < 64, "too many prime factors to enumerate");
    (0..1u64 << omega).map(move |mask| {
        let mut value = BigUint::one();
        for (i, (p, _)) in f.factors.iter().enumerate() {
            if mask >> i & 1 == 1 {
                value *= p;
            }
        }
        let mu = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        SquarefreeDivisor { value, mask, mu }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn gcd(a: u64, b: u64) -> u64 {
        a.gcd(&b)
    }

    #[test]
    fn factor_48() {
        let f = factor_u64(48);
        assert_eq!(f.factors(), &[(big(2), 4), (big(3), 1)]);
        assert_eq!(f.to_string(), "48 = 2^4 * 3");
    }

    #[test]
    fn factor_one_is_empty() {
        let f = factor_u64(1);
        assert!(f.factors().is_empty());
        assert_eq!(euler_phi(&f), big(1));
        assert_eq!(moebius(&f), 1);
        assert_eq!(squarefree_divisors(&f).count(), 1);
    }

    #[test]
    fn factor_exhaustive_to_a_million() {
        for m in 1..=1_000_000u64 {
            let f = factor_u64(m);
            assert_eq!(f.product(), big(m));
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn phi_matches_gcd_count() {
        for m in 1..=10_000u64 {
            let brute = (1..=m).filter(|&k| gcd(k, m) == 1).count() as u64;
            assert_eq!(euler_phi(&factor_u64(m)), big(brute), "{m}");
        }
    }

    #[test]
    fn w_matches_brute_squarefree_count() {
        for m in 1..=10_000u64 {
            let brute = divisors_u64(m)
                .into_iter()
                .filter(|&d| (2..=d).take_while(|k| k * k <= d).all(|k| d % (k * k) != 0))
                .count();
            let f = factor_u64(m);
            assert_eq!(squarefree_divisors(&f).count(), brute, "{m}");
            assert_eq!(f.squarefree_divisor_count(), big(1 << f.omega()));
        }
    }

    #[test]
    fn squarefree_divisors_of_12() {
        let vals: Vec<u64> = squarefree_divisors(&factor_u64(12))
            .map(|d| d.value.to_u64().unwrap())
            .collect();
        assert_eq!(vals, vec![1, 2, 3, 6]);
        let mus: Vec<i8> = squarefree_divisors(&factor_u64(12)).map(|d| d.mu).collect();
        assert_eq!(mus, vec![1, -1, -1, 1]);
        assert_eq!(squarefree_divisors(&factor_u64(48)).count(), 4);
        assert_eq!(squarefree_divisors(&factor_u64(101)).count(), 2);
    }

    #[test]
    fn moebius_small() {
        assert_eq!(moebius_u64(1), 1);
        assert_eq!(moebius_u64(2), -1);
        assert_eq!(moebius_u64(6), 1);
        assert_eq!(moebius_u64(4), 0);
        assert_eq!(moebius_u64(30), -1);
    }

    #[test]
    fn phi_of_48() {
        assert_eq!(euler_phi(&factor_u64(48)), big(16));
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic_split(2, 2), vec![big(1), big(3)]);
        assert_eq!(cyclotomic_split(3, 4), vec![big(2), big(4), big(10)]);
        let parts = cyclotomic_split(11, 12);
        assert_eq!(parts.len(), 6);
        let prod = parts.iter().fold(BigUint::one(), |a, b| a * b);
        assert_eq!(prod, big(11).pow(12) - 1u32);
    }

    #[test]
    fn cyclotomic_products_small_grid() {
        for q in 2..=50u64 {
            for n in 1..=12u32 {
                let prod = cyclotomic_split(q, n).iter().fold(BigUint::one(), |a, b| a * b);
                assert_eq!(prod, big(q).pow(n) - 1u32, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn lemma_item1_numerically_to_a_million() {
        // W(t) < 4.9 t^{1/4}  <=>  10^4 W^4 < 49^4 t
        let c = 49u128.pow(4);
        for t in 3..=1_000_000u64 {
            let w = 1u128 << factor_u64(t).omega();
            assert!(10_000 * w.pow(4) < c * t as u128, "t={t}");
        }
    }

    #[test]
    fn factor_11_pow_12_minus_1_blind() {
        let f = factor_power_minus_one(11, 12, None, &FactorBudget::default()).unwrap();
        assert_eq!(f.value(), &(big(11).pow(12) - 1u32));
        assert_eq!(f.product(), *f.value());
        let listed: Vec<String> = f.factors().iter().map(|(p, e)| format!("{p}^{e}")).collect();
        assert_eq!(
            listed,
            ["2^4", "3^2", "5^1", "7^1", "13^1", "19^1", "37^1", "61^1", "1117^1"]
        );
    }

    #[test]
    fn big_factor_with_rho() {
        // 1000000000039 * 1180591620717411303449, both prime
        let n: BigUint = "1180591620763454376656979040834511".parse().unwrap();
        let f = factor(&n, None, &FactorBudget::default()).unwrap();
        assert_eq!(f.omega(), 2);
        assert_eq!(f.factors()[0].0, big(1_000_000_000_039));
        assert_eq!(f.product(), n);
    }

    #[test]
    fn tiny_budget_times_out() {
        let p = big(18_446_744_073_709_551_557);
        let q = big(18_446_744_073_709_551_533);
        let budget = FactorBudget {
            trial_bound: 1000,
            max_mulmods: 1000,
        };
        assert!(matches!(
            factor(&(&p * &q), None, &budget),
            Err(Error::FactoringTimeout { .. })
        ));
    }

    #[test]
    fn verified_rejects_bad_claims() {
        assert!(Factorization::verified(big(12), vec![(big(2), 2), (big(3), 1)]).is_ok());
        assert!(Factorization::verified(big(12), vec![(big(4), 1), (big(3), 1)]).is_err());
        assert!(Factorization::verified(big(13), vec![(big(2), 2), (big(3), 1)]).is_err());
        let merged = Factorization::verified(big(12), vec![(big(3), 1), (big(2), 1), (big(2), 1)]).unwrap();
        assert_eq!(merged.factors(), &[(big(2), 2), (big(3), 1)]);
    }
}
