//! The tower F_p ⊆ F_q ⊆ F_{q^n}.
//!
//! F_q is `Subfield` (integer codes, table arithmetic). F_{q^n} is
//! F_q[x]/(ext modulus) and its elements are coordinate vectors in the power
//! basis 1, x, ..., x^{n-1}. For small fields an element is also identified
//! with its *index* Σ coords[i] q^i, which is the enumeration order used for
//! generator search, log tables and exhaustive sweeps.

mod basis;
pub mod matrix;
pub mod poly;
mod subfield;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

pub use basis::Basis;
pub use poly::Coeffs;
pub use subfield::{Subfield, MAX_SUBFIELD_ORDER};

use crate::error::{Error, Result};
use crate::ntheory::{factor_power_minus_one, FactorBudget, FactorCache, Factorization};

/// Default cap on the number of field elements covered by a log table.
pub const DEFAULT_LOG_TABLE_LIMIT: u64 = 1 << 24;

/// p, m, n with q = p^m and |F| = q^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FieldParams {
    pub p: u32,
    pub m: u32,
    pub n: u32,
}

impl FieldParams {
    /// Parameters for F_{q^n} with n >= 2.
    pub fn new(p: u32, m: u32, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameters(format!(
                "extension degree must be >= 2, got {n}"
            )));
        }
        Self::check(p, m, n)
    }

    /// F_q viewed as a degree-1 "extension" of itself; for unit tests.
    pub fn degenerate(p: u32, m: u32) -> Result<Self> {
        Self::check(p, m, 1)
    }

    fn check(p: u32, m: u32, n: u32) -> Result<Self> {
        if !crate::ntheory::is_prime_u64(p as u64) {
            return Err(Error::InvalidParameters(format!("{p} is not prime")));
        }
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameters("degrees must be positive".into()));
        }
        Ok(FieldParams { p, m, n })
    }

    /// Parameters for a prime power q and degree n.
    pub fn from_q(q: u64, n: u32) -> Result<Self> {
        let (p, m) = prime_power(q)
            .ok_or_else(|| Error::InvalidParameters(format!("{q} is not a prime power")))?;
        Self::new(p as u32, m, n)
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.q()).pow(self.n)
    }

    pub fn descriptor(&self) -> String {
        format!("{}^{}^{}", self.p, self.m, self.n)
    }
}

impl fmt::Display for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for FieldParams {
    type Err = Error;

    /// `p^m^n`, e.g. `7^1^2`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('^').collect();
        let bad = || Error::InvalidParameters(format!("field descriptor {s:?} is not p^m^n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<u32> = parts
            .iter()
            .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if nums[2] == 1 {
            Self::degenerate(nums[0], nums[1])
        } else {
            Self::new(nums[0], nums[1], nums[2])
        }
    }
}

/// (p, m) with q = p^m, or `None` when q is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = crate::ntheory::factor_u64(q);
    match f.factors() {
        [(p, e)] => Some((p.to_u64()?, *e)),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogTablePolicy {
    /// Build when |F| is within the limit.
    Auto,
    Never,
    /// Fail with `OrderTooLarge` when |F| exceeds the limit.
    Required,
}

#[derive(Clone, Debug)]
pub struct BuildOptions<'a> {
    pub log_table: LogTablePolicy,
    pub log_table_limit: u64,
    pub cache: Option<&'a FactorCache>,
    pub budget: FactorBudget,
}

impl Default for BuildOptions<'_> {
    fn default() -> Self {
        BuildOptions {
            log_table: LogTablePolicy::Auto,
            log_table_limit: DEFAULT_LOG_TABLE_LIMIT,
            cache: None,
            budget: FactorBudget::default(),
        }
    }
}

/// An element of a specific field context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<u32>,
    ctx: u32,
}

impl FieldElement {
    /// Power-basis coordinates, each an F_q code.
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

#[derive(Debug)]
struct LogTable {
    /// log[index] = k with g^k = element; unused slot at index 0.
    log: Vec<u32>,
    /// exp[k] = index of g^k.
    exp: Vec<u32>,
}

static NEXT_CTX: AtomicU32 = AtomicU32::new(1);

/// A concrete realization of F_{q^n}.
#[derive(Debug)]
pub struct FieldCtx {
    id: u32,
    params: FieldParams,
    sub: Subfield,
    ext_modulus: Vec<u32>,
    order: BigUint,
    unit_order: BigUint,
    order_u64: Option<u64>,
    unit_factorization: Factorization,
    /// (|F| - 1) / r for each prime r of the unit group order.
    cofactors: Vec<BigUint>,
    generator: FieldElement,
    log_table: Option<LogTable>,
}

/// Reproducibility record of a field's construction.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FieldInfo {
    pub descriptor: String,
    pub q: u64,
    pub order: String,
    /// Coefficients of the F_p modulus, constant term first; absent for m = 1.
    pub base_modulus: Option<Vec<u32>>,
    /// Coefficients of the F_q modulus as F_q codes, constant term first.
    pub ext_modulus: Vec<u32>,
    pub generator: Vec<u32>,
    pub unit_group_factorization: String,
}

/// Builds F_{q^n}: smallest irreducible moduli, smallest generator, and a log
/// table when permitted.
pub fn build_field(params: FieldParams, opts: &BuildOptions<'_>) -> Result<FieldCtx> {
    let sub = Subfield::new(params.p, params.m)?;
    let q = sub.q() as u64;
    let n = params.n as usize;
    let order = params.order();
    let unit_order = &order - 1u32;
    let order_u64 = order.to_u64();

    let wants_table = match opts.log_table {
        LogTablePolicy::Never => false,
        LogTablePolicy::Auto => order_u64.is_some_and(|o| o <= opts.log_table_limit),
        LogTablePolicy::Required => {
            if order_u64.is_none_or(|o| o > opts.log_table_limit) {
                return Err(Error::OrderTooLarge {
                    order: order.to_string(),
                    limit: opts.log_table_limit.to_string(),
                    feature: "log table",
                });
            }
            true
        }
    };
    let wants_table = wants_table && order_u64.is_some_and(|o| o <= u32::MAX as u64);

    let ext_modulus = poly::smallest_irreducible(&sub, n);
    let unit_factorization = factor_power_minus_one(q, params.n, opts.cache, &opts.budget)?;
    let cofactors = unit_factorization
        .primes()
        .map(|r| &unit_order / r)
        .collect();

    let id = NEXT_CTX.fetch_add(1, Ordering::Relaxed);
    let placeholder = FieldElement {
        coords: vec![0; n],
        ctx: id,
    };
    let mut ctx = FieldCtx {
        id,
        params,
        sub,
        ext_modulus,
        order,
        unit_order,
        order_u64,
        unit_factorization,
        cofactors,
        generator: placeholder,
        log_table: None,
    };
    ctx.generator = ctx.find_generator();
    if wants_table {
        ctx.log_table = Some(ctx.build_log_table());
    }
    Ok(ctx)
}

impl FieldCtx {
    fn find_generator(&self) -> FieldElement {
        // For n >= 2 the constants (indices below q) have order dividing q - 1.
        let start = if self.params.n >= 2 { self.q() } else { 1 };
        let mut coords = vec![0u32; self.n()];
        let mut idx = start;
        loop {
            self.fill_coords(idx, &mut coords);
            let e = FieldElement {
                coords: coords.clone(),
                ctx: self.id,
            };
            if self.is_primitive(&e) {
                return e;
            }
            idx += 1;
        }
    }

    fn build_log_table(&self) -> LogTable {
        let size = self.order_u64.expect("small field") as usize;
        let mut log = vec![u32::MAX; size];
        let mut exp = Vec::with_capacity(size - 1);
        let mut cur = self.one();
        for k in 0..(size - 1) as u32 {
            let idx = self.index(&cur) as u32;
            exp.push(idx);
            log[idx as usize] = k;
            cur = self.mul(&cur, &self.generator);
        }
        debug_assert!(cur == self.one());
        LogTable { log, exp }
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn subfield(&self) -> &Subfield {
        &self.sub
    }

    pub fn q(&self) -> u64 {
        self.sub.q() as u64
    }

    pub fn n(&self) -> usize {
        self.params.n as usize
    }

    pub fn ext_modulus(&self) -> &[u32] {
        &self.ext_modulus
    }

    pub fn base_modulus(&self) -> Option<&[u32]> {
        self.sub.modulus()
    }

    /// |F|.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// |F| when it fits in 64 bits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order_u64
    }

    /// |F| - 1.
    pub fn unit_order(&self) -> &BigUint {
        &self.unit_order
    }

    pub fn unit_factorization(&self) -> &Factorization {
        &self.unit_factorization
    }

    pub fn generator(&self) -> &FieldElement {
        &self.generator
    }

    pub fn has_log_table(&self) -> bool {
        self.log_table.is_some()
    }

    pub fn info(&self) -> FieldInfo {
        FieldInfo {
            descriptor: self.params.descriptor(),
            q: self.q(),
            order: self.order.to_string(),
            base_modulus: self.sub.modulus().map(<[u32]>::to_vec),
            ext_modulus: self.ext_modulus.clone(),
            generator: self.generator.coords.clone(),
            unit_group_factorization: self.unit_factorization.to_string(),
        }
    }

    fn check(&self, a: &FieldElement) {
        debug_assert_eq!(a.ctx, self.id, "element from another field context");
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coords: vec![0; self.n()],
            ctx: self.id,
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_subfield(1)
    }

    /// The embedded subfield element with code `c`.
    pub fn from_subfield(&self, c: u32) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = c;
        e
    }

    /// Element from power-basis coordinates.
    pub fn element(&self, coords: Vec<u32>) -> Result<FieldElement> {
        if coords.len() != self.n() || coords.iter().any(|&c| c as u64 >= self.q()) {
            return Err(Error::InvalidParameters(format!(
                "coordinates {coords:?} do not describe an element of {}",
                self.params
            )));
        }
        Ok(FieldElement {
            coords,
            ctx: self.id,
        })
    }

    fn fill_coords(&self, mut idx: u64, out: &mut [u32]) {
        let q = self.q();
        for c in out.iter_mut() {
            *c = (idx % q) as u32;
            idx /= q;
        }
    }

    /// Element with enumeration index `idx`.
    pub fn element_at(&self, idx: u64) -> FieldElement {
        debug_assert!(self.order_u64.is_none_or(|o| idx < o));
        let mut coords = vec![0; self.n()];
        self.fill_coords(idx, &mut coords);
        FieldElement {
            coords,
            ctx: self.id,
        }
    }

    /// Enumeration index Σ coords[i] q^i; panics when |F| exceeds 2^64.
    pub fn index(&self, a: &FieldElement) -> u64 {
        self.check(a);
        assert!(self.order_u64.is_some(), "field too large for indices");
        let q = self.q();
        a.coords.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64)
    }

    /// All elements in index order; small fields only.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let total = self.order_u64.expect("field too large to enumerate");
        (0..total).map(move |i| self.element_at(i))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let q = self.q() as u32;
        FieldElement {
            coords: (0..self.n()).map(|_| rng.random_range(0..q)).collect(),
            ctx: self.id,
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        FieldElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(&x, &y)| self.sub.add(x, y))
                .collect(),
            ctx: self.id,
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.check(a);
        FieldElement {
            coords: a.coords.iter().map(|&x| self.sub.neg(x)).collect(),
            ctx: self.id,
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    /// Multiply by a subfield scalar.
    pub fn scale(&self, c: u32, a: &FieldElement) -> FieldElement {
        self.check(a);
        FieldElement {
            coords: a.coords.iter().map(|&x| self.sub.mul(c, x)).collect(),
            ctx: self.id,
        }
    }

    fn from_poly(&self, mut p: Vec<u32>) -> FieldElement {
        p.resize(self.n(), 0);
        FieldElement {
            coords: p,
            ctx: self.id,
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        self.from_poly(poly::mul_mod(&self.sub, &a.coords, &b.coords, &self.ext_modulus))
    }

    pub fn pow(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        self.check(a);
        self.from_poly(poly::pow_mod_big(&self.sub, &a.coords, e, &self.ext_modulus))
    }

    pub fn pow_u64(&self, a: &FieldElement, e: u64) -> FieldElement {
        self.check(a);
        self.from_poly(poly::pow_mod_u64(&self.sub, &a.coords, e, &self.ext_modulus))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.pow(a, &(&self.order - 2u32)))
    }

    /// Generator of F^*: nonzero and y^((|F|-1)/r) ≠ 1 for every prime r.
    pub fn is_primitive(&self, y: &FieldElement) -> bool {
        self.check(y);
        if y.is_zero() {
            return false;
        }
        let one = self.one();
        self.cofactors.iter().all(|c| self.pow(y, c) != one)
    }

    /// The checks behind `is_primitive`: (r, y^((|F|-1)/r) ≠ 1) per prime r.
    pub fn primitivity_transcript(&self, y: &FieldElement) -> Vec<(BigUint, bool)> {
        let one = self.one();
        self.unit_factorization
            .primes()
            .zip(&self.cofactors)
            .map(|(r, c)| (r.clone(), self.pow(y, c) != one))
            .collect()
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, y: &FieldElement) -> Result<BigUint> {
        if y.is_zero() {
            return Err(Error::ZeroElement);
        }
        let one = self.one();
        let mut ord = self.unit_order.clone();
        for (r, e) in self.unit_factorization.factors() {
            for _ in 0..*e {
                let cand = &ord / r;
                if self.pow(y, &cand) == one {
                    ord = cand;
                } else {
                    break;
                }
            }
        }
        Ok(ord)
    }

    /// k in [0, |F| - 2] with g^k = y.
    pub fn discrete_log(&self, y: &FieldElement) -> Result<u64> {
        let table = self.log_table.as_ref().ok_or(Error::NoLogTable)?;
        if y.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(table.log[self.index(y) as usize] as u64)
    }

    /// Discrete log by index, for hot loops; `None` at zero.
    #[inline]
    pub fn log_of_index(&self, idx: u64) -> Option<u32> {
        let t = self.log_table.as_ref()?;
        let l = t.log[idx as usize];
        (l != u32::MAX).then_some(l)
    }

    /// Index of g^k; requires a log table.
    #[inline]
    pub fn index_of_power(&self, k: u64) -> Option<u64> {
        let t = self.log_table.as_ref()?;
        Some(t.exp[(k % (t.exp.len() as u64)) as usize] as u64)
    }

    /// primitive-by-log: gcd(log y, |F| - 1) = 1.
    pub fn is_primitive_index(&self, idx: u64) -> Option<bool> {
        let l = self.log_of_index(idx)? as u64;
        let n = self.unit_order.to_u64()?;
        Some(num_integer::gcd(l, n) == 1)
    }
}

impl FieldCtx {
    pub fn unit_order_u64(&self) -> Option<u64> {
        self.unit_order.to_u64()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(p: u32, m: u32, n: u32) -> FieldCtx {
        let params = if n == 1 {
            FieldParams::degenerate(p, m).unwrap()
        } else {
            FieldParams::new(p, m, n).unwrap()
        };
        build_field(params, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn f8_uses_x3_x_1() {
        let f = field(2, 1, 3);
        assert_eq!(f.ext_modulus(), &[1, 1, 0, 1]);
        assert_eq!(f.unit_order(), &BigUint::from(7u32));
    }

    #[test]
    fn f49_unit_group() {
        let f = field(7, 1, 2);
        assert_eq!(f.unit_factorization().to_string(), "48 = 2^4 * 3");
        assert_eq!(f.ext_modulus(), &[1, 0, 1]);
    }

    #[test]
    fn f16_tower() {
        let f = field(2, 2, 2);
        assert_eq!(f.base_modulus(), Some(&[1, 1, 1][..]));
        assert_eq!(f.order(), &BigUint::from(16u32));
        assert_eq!(f.ext_modulus().len(), 3);
        assert!(poly::is_irreducible(f.subfield(), f.ext_modulus()));
    }

    #[test]
    fn primitivity_small_cases() {
        let f8 = field(2, 1, 3);
        assert!(!f8.is_primitive(&f8.zero()));
        for y in f8.elements().skip(2) {
            assert!(f8.is_primitive(&y));
        }
        let f7 = field(7, 1, 1);
        let prim: Vec<u64> = f7
            .elements()
            .filter(|y| f7.is_primitive(y))
            .map(|y| f7.index(&y))
            .collect();
        assert_eq!(prim, vec![3, 5]);
    }

    #[test]
    fn descriptors_parse() {
        let p: FieldParams = "7^1^2".parse().unwrap();
        assert_eq!(p, FieldParams { p: 7, m: 1, n: 2 });
        assert!("6^1^2".parse::<FieldParams>().is_err());
        assert!("7^1".parse::<FieldParams>().is_err());
        assert_eq!(p.to_string(), "7^1^2");
        assert_eq!(FieldParams::from_q(16, 2).unwrap(), FieldParams { p: 2, m: 4, n: 2 });
        assert!(FieldParams::from_q(12, 2).is_err());
    }

    #[test]
    fn discrete_log_round_trip_f49() {
        let f = field(7, 1, 2);
        assert_eq!(f.discrete_log(f.generator()).unwrap(), 1);
        assert_eq!(f.discrete_log(&f.one()).unwrap(), 0);
        assert!(matches!(f.discrete_log(&f.zero()), Err(Error::ZeroElement)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let y = f.random_element(&mut rng);
            if y.is_zero() {
                continue;
            }
            let k = f.discrete_log(&y).unwrap();
            assert_eq!(f.pow_u64(f.generator(), k), y);
        }
    }

    #[test]
    fn no_log_table_when_refused() {
        let opts = BuildOptions {
            log_table: LogTablePolicy::Never,
            ..Default::default()
        };
        let f = build_field(FieldParams::new(3, 1, 2).unwrap(), &opts).unwrap();
        assert!(matches!(f.discrete_log(f.generator()), Err(Error::NoLogTable)));
        let opts = BuildOptions {
            log_table: LogTablePolicy::Required,
            log_table_limit: 100,
            ..Default::default()
        };
        assert!(matches!(
            build_field(FieldParams::new(3, 1, 5).unwrap(), &opts),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn deterministic_construction() {
        let a = field(3, 2, 3);
        let b = field(3, 2, 3);
        assert_eq!(a.info(), b.info());
    }
}
