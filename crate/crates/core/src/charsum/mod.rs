//! Multiplicative characters χ_j(g^k) = exp(2πi jk / (|F| - 1)) and their
//! sums over subsets of the field.

mod sweep;
mod vinogradov;

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::bounds::delta;
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::hyperplane::{AffineSubspace, Arrangement, AvoidedSet};

pub use sweep::{digit_subspace_sweep, SweepReport, SweepRow, arrangement_sweep};
pub use vinogradov::{count_primitive_in, PrimitiveCount, VinogradovIndicator};

/// Round-off allowance per summed unit term.
pub const TERM_ALLOWANCE: f64 = 4.0 * f64::EPSILON;
/// Absolute slack added to every bound comparison.
pub const BOUND_TOLERANCE: f64 = 1e-6;

/// Largest unit-group order with a precomputed table of roots of unity.
const ROOT_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Character {
    /// j in [0, |F| - 2].
    pub index: u64,
    /// (|F| - 1) / gcd(j, |F| - 1).
    pub order: u64,
}

impl Character {
    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }
}

/// The character group of a field with a log table.
#[derive(Debug)]
pub struct CharacterGroup {
    ctx: Arc<FieldCtx>,
    /// |F| - 1.
    n: u64,
    roots: Option<Vec<Complex64>>,
}

impl CharacterGroup {
    pub fn new(ctx: Arc<FieldCtx>) -> Result<Self> {
        if !ctx.has_log_table() {
            return Err(Error::NoLogTable);
        }
        let n = ctx.unit_order_u64().expect("log tables imply a small field");
        let roots = (n <= ROOT_TABLE_LIMIT).then(|| {
            (0..n)
                .map(|k| {
                    let (s, c) = (TAU * k as f64 / n as f64).sin_cos();
                    Complex64::new(c, s)
                })
                .collect()
        });
        Ok(CharacterGroup { ctx, n, roots })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// |F| - 1.
    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn character(&self, index: u64) -> Character {
        let index = index % self.n;
        Character {
            index,
            order: self.n / index.gcd(&self.n),
        }
    }

    pub fn trivial(&self) -> Character {
        self.character(0)
    }

    /// All nontrivial characters in index order.
    pub fn nontrivial(&self) -> impl Iterator<Item = Character> + '_ {
        (1..self.n).map(|j| self.character(j))
    }

    /// Λ(d): the φ(d) characters of order d, indices (|F|-1)/d · u for
    /// u coprime to d, u increasing.
    pub fn characters_of_order(&self, d: u64) -> Result<Vec<Character>> {
        if d == 0 || self.n % d != 0 {
            return Err(Error::NotADivisor { d, order: self.n });
        }
        let step = self.n / d;
        Ok((1..=d)
            .filter(|u| u.gcd(&d) == 1)
            .map(|u| self.character((step * u) % self.n))
            .collect())
    }

    /// exp(2πi k / (|F| - 1)).
    #[inline]
    pub fn root(&self, k: u64) -> Complex64 {
        let k = k % self.n;
        match &self.roots {
            Some(t) => t[k as usize],
            None => {
                let (s, c) = (TAU * k as f64 / self.n as f64).sin_cos();
                Complex64::new(c, s)
            }
        }
    }

    /// χ(g^log).
    #[inline]
    pub fn eval_log(&self, chi: Character, log: u64) -> Complex64 {
        let k = ((chi.index as u128 * log as u128) % self.n as u128) as u64;
        self.root(k)
    }

    /// χ at the element with the given index; 0 at zero.
    #[inline]
    pub fn eval_index(&self, chi: Character, idx: u64) -> Complex64 {
        match self.ctx.log_of_index(idx) {
            Some(l) => self.eval_log(chi, l as u64),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn eval(&self, chi: Character, y: &FieldElement) -> Complex64 {
        self.eval_index(chi, self.ctx.index(y))
    }

    /// Σ_{y ∈ S} χ(y).
    pub fn sum<I: IntoIterator<Item = FieldElement>>(&self, set: I, chi: Character) -> SumResult {
        let mut acc = KahanSum::default();
        for y in set {
            acc.add(self.eval(chi, &y));
        }
        acc.finish()
    }

    /// Σ χ over element indices.
    pub fn sum_indices<I: IntoIterator<Item = u64>>(&self, set: I, chi: Character) -> SumResult {
        let mut acc = KahanSum::default();
        for idx in set {
            acc.add(self.eval_index(chi, idx));
        }
        acc.finish()
    }

    /// Σ χ over discrete logs (zero elements already dropped).
    pub fn sum_logs(&self, logs: &[u32], chi: Character) -> SumResult {
        let mut acc = KahanSum::default();
        for &l in logs {
            acc.add(self.eval_log(chi, l as u64));
        }
        acc.finish()
    }
}

/// Neumaier-compensated complex summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
    terms: u64,
}

#[inline]
fn two_sum(s: &mut f64, c: &mut f64, x: f64) {
    let t = *s + x;
    if s.abs() >= x.abs() {
        *c += (*s - t) + x;
    } else {
        *c += (x - t) + *s;
    }
    *s = t;
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        two_sum(&mut self.sum.re, &mut self.comp.re, z.re);
        two_sum(&mut self.sum.im, &mut self.comp.im, z.im);
        self.terms += 1;
    }

    /// Counts a term known to be exactly zero.
    #[inline]
    pub fn add_zero(&mut self) {
        self.terms += 1;
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }

    pub fn finish(&self) -> SumResult {
        let v = self.value();
        SumResult {
            re: v.re,
            im: v.im,
            magnitude: v.norm(),
            terms: self.terms,
            error_bound: self.terms as f64 * TERM_ALLOWANCE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumResult {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub terms: u64,
    pub error_bound: f64,
}

impl SumResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Outcome of one bound comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub character: u64,
    pub order: u64,
    pub set: String,
    pub magnitude: f64,
    pub bound: f64,
    /// bound - magnitude.
    pub margin: f64,
    pub pass: bool,
}

fn compare(chi: Character, set: String, s: &SumResult, bound: f64) -> Result<BoundCheck> {
    let pass = s.magnitude <= bound + BOUND_TOLERANCE + s.error_bound;
    let check = BoundCheck {
        character: chi.index,
        order: chi.order,
        set,
        magnitude: s.magnitude,
        bound,
        margin: bound - s.magnitude,
        pass,
    };
    if pass {
        Ok(check)
    } else {
        Err(Error::BoundViolated(format!(
            "|sum of chi_{} over {}| = {} exceeds {}",
            chi.index, check.set, check.magnitude, bound
        )))
    }
}

/// q^min(t, n/2) for a t-dimensional affine subspace.
pub fn affine_bound(q: u64, n: usize, t: usize) -> f64 {
    (q as f64).powf((t as f64).min(n as f64 / 2.0))
}

/// Checks |Σ_{y ∈ A} χ(y)| ≤ q^min(t, n/2) by enumeration.
pub fn verify_affine_bound(group: &CharacterGroup, a: &AffineSubspace, chi: Character) -> Result<BoundCheck> {
    if chi.is_trivial() {
        return Err(Error::InvalidParameters("the bound needs a nontrivial character".into()));
    }
    let ctx = group.ctx();
    let s = group.sum(a.points(ctx), chi);
    let bound = affine_bound(ctx.q(), ctx.n(), a.dimension());
    compare(chi, format!("{} + span(dim {})", a.offset, a.dimension()), &s, bound)
}

/// Checks |Σ_{y ∈ S_C*} χ(y)| ≤ δ(q, n), and δ(q, n) ≤ (2^n - 1) q^(n/2).
pub fn verify_arrangement_bound(group: &CharacterGroup, arr: &Arrangement, chi: Character) -> Result<BoundCheck> {
    if chi.is_trivial() {
        return Err(Error::InvalidParameters("the bound needs a nontrivial character".into()));
    }
    let ctx = group.ctx();
    let (q, n) = (ctx.q(), ctx.n() as u32);
    let d = delta(q, n);
    if !d.at_most_crude_bound() {
        return Err(Error::BoundViolated(format!(
            "delta({q},{n}) exceeds (2^n - 1) q^(n/2)"
        )));
    }
    let set = AvoidedSet::new(arr)?;
    let s = group.sum_indices(set.indices(), chi);
    compare(chi, arr.descriptor(), &s, d.to_f64())
}
