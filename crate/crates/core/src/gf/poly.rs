//! Dense univariate polynomials over a small finite field, coefficients
//! stored lowest degree first.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::ntheory::factor_u64;

/// Coefficient arithmetic for polynomials. Elements are `u32` codes in
/// `[0, size)`.
pub trait Coeffs {
    fn size(&self) -> u64;
    fn add(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn inv(&self, a: u32) -> u32;

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}

/// Integers modulo a prime.
#[derive(Clone, Copy, Debug)]
pub struct PrimeModulus(pub u32);

impl Coeffs for PrimeModulus {
    fn size(&self) -> u64 {
        self.0 as u64
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }
    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        crate::ntheory::pow_mod_u64(a as u64, self.0 as u64 - 2, self.0 as u64) as u32
    }
}

pub fn trim(p: &mut Vec<u32>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[u32]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` modulo the monic polynomial `m` (in place).
pub fn rem_monic<F: Coeffs>(f: &F, a: &mut Vec<u32>, m: &[u32]) {
    let dm = m.len() - 1;
    debug_assert_eq!(m[dm], 1);
    trim(a);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top];
        if c != 0 {
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate().take(dm) {
                if mi != 0 {
                    a[shift + i] = f.sub(a[shift + i], f.mul(c, mi));
                }
            }
        }
        a.pop();
        trim(a);
    }
}

/// Schoolbook product.
pub fn mul<F: Coeffs>(f: &F, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                out[i + j] = f.add(out[i + j], f.mul(ai, bj));
            }
        }
    }
    trim(&mut out);
    out
}

pub fn mul_mod<F: Coeffs>(f: &F, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    let mut prod = mul(f, a, b);
    rem_monic(f, &mut prod, m);
    prod
}

/// `base^exp mod m`, exponent given by its bits (most significant first).
pub fn pow_mod_bits<F: Coeffs>(
    f: &F,
    base: &[u32],
    bits: impl Iterator<Item = bool>,
    m: &[u32],
) -> Vec<u32> {
    let mut acc = vec![1u32];
    rem_monic(f, &mut acc, m);
    let mut b = base.to_vec();
    rem_monic(f, &mut b, m);
    for bit in bits {
        acc = mul_mod(f, &acc, &acc, m);
        if bit {
            acc = mul_mod(f, &acc, &b, m);
        }
    }
    acc
}

pub fn pow_mod_u64<F: Coeffs>(f: &F, base: &[u32], exp: u64, m: &[u32]) -> Vec<u32> {
    let bits = (0..64 - exp.leading_zeros()).rev().map(move |i| exp >> i & 1 == 1);
    pow_mod_bits(f, base, bits, m)
}

pub fn pow_mod_big<F: Coeffs>(f: &F, base: &[u32], exp: &BigUint, m: &[u32]) -> Vec<u32> {
    let nb = exp.bits();
    let bits = (0..nb).rev().map(move |i| exp.bit(i));
    pow_mod_bits(f, base, bits, m)
}

pub fn sub<F: Coeffs>(f: &F, a: &[u32], b: &[u32]) -> Vec<u32> {
    let len = a.len().max(b.len());
    let mut out: Vec<u32> = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            f.sub(x, y)
        })
        .collect();
    trim(&mut out);
    out
}

/// Monic gcd.
pub fn gcd<F: Coeffs>(f: &F, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let lead_inv = f.inv(*b.last().unwrap());
        let bm: Vec<u32> = b.iter().map(|&c| f.mul(c, lead_inv)).collect();
        rem_monic(f, &mut a, &bm);
        b = std::mem::replace(&mut a, bm);
    }
    if let Some(&lead) = a.last() {
        let li = f.inv(lead);
        for c in a.iter_mut() {
            *c = f.mul(*c, li);
        }
    }
    a
}

/// Rabin's test: monic `m` of degree d is irreducible iff x^(s^d) = x mod m
/// and gcd(x^(s^(d/r)) - x, m) = 1 for every prime r | d, where s is the
/// coefficient field size.
pub fn is_irreducible<F: Coeffs>(f: &F, m: &[u32]) -> bool {
    let d = m.len() - 1;
    assert!(d >= 1 && m[d] == 1, "expects a monic polynomial of degree >= 1");
    if d == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    let x = vec![0u32, 1];
    let s = f.size();
    // frob[k] = x^(s^k) mod m
    let mut frob = Vec::with_capacity(d + 1);
    frob.push(x.clone());
    for k in 1..=d {
        let next = pow_mod_u64(f, &frob[k - 1], s, m);
        frob.push(next);
    }
    let mut xr = x.clone();
    rem_monic(f, &mut xr, m);
    if frob[d] != xr {
        return false;
    }
    for (r, _) in factor_u64(d as u64).factors() {
        let r = r.to_usize().unwrap();
        let h = sub(f, &frob[d / r], &x);
        let g = gcd(f, &h, m);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Coefficients (low first, leading 1 omitted) of the monic polynomial with
/// integer code `code`: coefficient i is base-`s` digit i.
pub fn monic_from_code(code: u64, s: u64, d: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(d + 1);
    let mut c = code;
    for _ in 0..d {
        out.push((c % s) as u32);
        c /= s;
    }
    out.push(1);
    out
}

/// The monic irreducible of degree d with the smallest code Σ c_i s^i.
pub fn smallest_irreducible<F: Coeffs>(f: &F, d: usize) -> Vec<u32> {
    let s = f.size();
    let mut code = 0u64;
    loop {
        let cand = monic_from_code(code, s, d);
        if is_irreducible(f, &cand) {
            return cand;
        }
        code += 1;
    }
}
