//! The coefficient field F_q, q = p^m, with log/antilog tables.
//!
//! Elements are integer codes: the element Σ c_k y^k (c_k ∈ F_p) of
//! F_p[y]/(base modulus) is encoded as Σ c_k p^k. For m = 1 the code is the
//! residue itself.

use num_traits::ToPrimitive;

use super::poly::{self, Coeffs, PrimeModulus};
use crate::error::{Error, Result};
use crate::ntheory::{factor_u64, is_prime_u64};

/// Largest subfield order with tables.
pub const MAX_SUBFIELD_ORDER: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct Subfield {
    p: u32,
    m: u32,
    q: u32,
    /// Monic irreducible of degree m over F_p; `None` when m = 1.
    modulus: Option<Vec<u32>>,
    /// Code of the generator of F_q^* used for the tables.
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Subfield {
    pub fn new(p: u32, m: u32) -> Result<Self> {
        if !is_prime_u64(p as u64) {
            return Err(Error::InvalidParameters(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidParameters("subfield degree must be >= 1".into()));
        }
        let order = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if order > MAX_SUBFIELD_ORDER {
            return Err(Error::OrderTooLarge {
                order: order.to_string(),
                limit: MAX_SUBFIELD_ORDER.to_string(),
                feature: "subfield tables",
            });
        }
        let q = order as u32;
        let fp = PrimeModulus(p);
        let modulus = (m > 1).then(|| poly::smallest_irreducible(&fp, m as usize));

        let to_poly = |code: u32| -> Vec<u32> {
            let mut c = code;
            let mut out = Vec::with_capacity(m as usize);
            for _ in 0..m {
                out.push(c % p);
                c /= p;
            }
            poly::trim(&mut out);
            out
        };
        let to_code = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let mul_codes = |a: u32, b: u32| -> u32 {
            match &modulus {
                None => fp.mul(a, b),
                Some(md) => to_code(&poly::mul_mod(&fp, &to_poly(a), &to_poly(b), md)),
            }
        };
        let pow_code = |a: u32, mut e: u64| -> u32 {
            let mut acc = 1u32;
            let mut base = a;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_codes(acc, base);
                }
                base = mul_codes(base, base);
                e >>= 1;
            }
            acc
        };

        let unit = (q - 1) as u64;
        let cofactors: Vec<u64> = factor_u64(unit.max(1))
            .primes()
            .map(|r| unit / r.to_u64().unwrap())
            .collect();
        let generator = (1..q)
            .find(|&g| cofactors.iter().all(|&c| pow_code(g, c) != 1))
            .expect("F_q^* is cyclic");

        let mut exp = Vec::with_capacity(unit as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = 1u32;
        for k in 0..unit as u32 {
            exp.push(cur);
            log[cur as usize] = k;
            cur = mul_codes(cur, generator);
        }
        debug_assert_eq!(cur, 1);
        Ok(Subfield {
            p,
            m,
            q,
            modulus,
            generator,
            exp,
            log,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    /// Discrete log of a nonzero code with respect to `generator`.
    #[inline]
    pub fn log(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.log[a as usize]
    }

    #[inline]
    pub fn exp(&self, k: u32) -> u32 {
        self.exp[k as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let k = (self.log(a) as u64 * (e % (self.q as u64 - 1))) % (self.q as u64 - 1);
        self.exp(k as u32)
    }
}

impl Coeffs for Subfield {
    fn size(&self) -> u64 {
        self.q as u64
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    fn neg(&self, a: u32) -> u32 {
        if self.m == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            let d = (self.p - a % self.p) % self.p;
            out += d * place;
            place *= self.p;
            a /= self.p;
        }
        out
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let n = self.q - 1;
        self.exp[if s >= n { s - n } else { s } as usize]
    }

    #[inline]
    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize];
        self.exp[if l == 0 { 0 } else { self.q - 1 - l } as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_table() {
        let f = Subfield::new(2, 2).unwrap();
        assert_eq!(f.modulus(), Some(&[1, 1, 1][..]));
        // y = code 2, y^2 = y + 1 = code 3
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.add(2, 3), 1);
    }

    #[test]
    fn field_laws_exhaustive_small() {
        for (p, m) in [(2, 3), (3, 2), (5, 1), (7, 2), (2, 4)] {
            let f = Subfield::new(p, m).unwrap();
            let q = f.q();
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in (0..q).step_by(3) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_composite_and_oversized() {
        assert!(Subfield::new(4, 1).is_err());
        assert!(matches!(Subfield::new(2, 17), Err(Error::OrderTooLarge { .. })));
    }
}
