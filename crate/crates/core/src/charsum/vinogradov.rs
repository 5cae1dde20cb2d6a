//! The character-sum expansion of the indicator of primitive elements:
//!
//!   I(y) = φ(N)/N · Σ_{d | N} μ(d)/φ(d) · Σ_{χ ∈ Λ(d)} χ(y),  N = |F| - 1.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{CharacterGroup, KahanSum, TERM_ALLOWANCE};
use crate::error::Result;
use crate::gf::FieldElement;
use crate::ntheory::{euler_phi, squarefree_divisors};

struct Term {
    /// μ(d)/φ(d).
    weight: f64,
    /// Exponents (N/d)·u of the characters in Λ(d).
    indices: Vec<u64>,
}

/// Precomputed Λ(d) for every squarefree d | |F| - 1.
pub struct VinogradovIndicator<'a> {
    group: &'a CharacterGroup,
    prefactor: f64,
    terms: Vec<Term>,
    characters: u64,
}

impl<'a> VinogradovIndicator<'a> {
    pub fn new(group: &'a CharacterGroup) -> Result<Self> {
        let f = group.ctx().unit_factorization();
        let n = group.order();
        let phi_n = euler_phi(f).to_f64().expect("small field");
        let mut terms = Vec::new();
        let mut characters = 0;
        for d in squarefree_divisors(f) {
            let d_val = d.value.to_u64().expect("divides a small order");
            let chars = group.characters_of_order(d_val)?;
            characters += chars.len() as u64;
            terms.push(Term {
                weight: d.mu as f64 / chars.len() as f64,
                indices: chars.iter().map(|c| c.index).collect(),
            });
        }
        Ok(VinogradovIndicator {
            group,
            prefactor: phi_n / n as f64,
            terms,
            characters,
        })
    }

    /// Complex value at the element with discrete log `log`; the imaginary
    /// part vanishes up to round-off.
    pub fn eval_log(&self, log: u64) -> Complex64 {
        let mut outer = KahanSum::default();
        for t in &self.terms {
            let mut inner = KahanSum::default();
            for &j in &t.indices {
                inner.add(self.group.root(((j as u128 * log as u128) % self.group.order() as u128) as u64));
            }
            outer.add(inner.value() * t.weight);
        }
        outer.value() * self.prefactor
    }

    pub fn eval_index(&self, idx: u64) -> Complex64 {
        match self.group.ctx().log_of_index(idx) {
            Some(l) => self.eval_log(l as u64),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Real part of I(y).
    pub fn indicator(&self, y: &FieldElement) -> f64 {
        self.eval_index(self.group.ctx().index(y)).re
    }

    /// A bound on the round-off in one evaluation.
    pub fn error_bound(&self) -> f64 {
        self.characters as f64 * TERM_ALLOWANCE * 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimitiveCount {
    pub size: u64,
    pub exact: u64,
    pub vinogradov: f64,
    /// Largest imaginary part seen in a single indicator evaluation.
    pub max_imaginary: f64,
}

/// Primitive elements of a set, counted directly and through the indicator.
pub fn count_primitive_in<I: IntoIterator<Item = u64>>(group: &CharacterGroup, indices: I) -> Result<PrimitiveCount> {
    let ind = VinogradovIndicator::new(group)?;
    let ctx = group.ctx();
    let n = group.order();
    let mut size = 0;
    let mut exact = 0;
    let mut acc = KahanSum::default();
    let mut max_imaginary: f64 = 0.0;
    for idx in indices {
        size += 1;
        if let Some(l) = ctx.log_of_index(idx) {
            if num_integer::gcd(l as u64, n) == 1 {
                exact += 1;
            }
            let v = ind.eval_log(l as u64);
            max_imaginary = max_imaginary.max(v.im.abs());
            acc.add(Complex64::new(v.re, 0.0));
        }
    }
    Ok(PrimitiveCount {
        size,
        exact,
        vinogradov: acc.value().re,
        max_imaginary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_field, BuildOptions, FieldParams};
    use std::sync::Arc;

    fn group(p: u32, m: u32, n: u32) -> CharacterGroup {
        let ctx = build_field(FieldParams::new(p, m, n).unwrap(), &BuildOptions::default()).unwrap();
        CharacterGroup::new(Arc::new(ctx)).unwrap()
    }

    #[test]
    fn indicator_matches_primitivity_f49() {
        let g = group(7, 1, 2);
        let ind = VinogradovIndicator::new(&g).unwrap();
        let ctx = g.ctx().clone();
        for y in ctx.elements() {
            let v = ind.indicator(&y);
            let expect = if ctx.is_primitive(&y) { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-9, "{y}: {v}");
        }
        assert!(ind.indicator(&ctx.one()).abs() < 1e-9);
    }

    #[test]
    fn counts_over_whole_field() {
        let g = group(7, 1, 2);
        let c = count_primitive_in(&g, 1..49).unwrap();
        assert_eq!(c.exact, 16);
        assert!((c.vinogradov - 16.0).abs() < 1e-9);
        let z = count_primitive_in(&g, [0]).unwrap();
        assert_eq!((z.size, z.exact, z.vinogradov), (1, 0, 0.0));
    }
}
