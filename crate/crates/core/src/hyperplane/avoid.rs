//! Enumeration of S_C*, the elements avoiding every hyperplane.
//!
//! In general position the map y ↦ (L_1(y), ..., L_n(y)) is a bijection
//! F_{q^n} → F_q^n, so S_C* is the image of Π (F_q ∖ {c_i}) under its
//! inverse. Enumeration walks that product lexicographically (v_1 slowest)
//! and updates power coordinates incrementally.

use std::sync::Arc;

use super::Arrangement;
use crate::error::{Error, Result};
use crate::gf::matrix::Matrix;
use crate::gf::{Coeffs, FieldCtx, FieldElement};

/// Default cap on |S_C*| for enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 26;

#[derive(Clone, Debug)]
pub struct AvoidedSet {
    ctx: Arc<FieldCtx>,
    /// Column j: power coordinates of the element with L = e_j.
    columns: Vec<Vec<u32>>,
    /// allowed[j] = F_q ∖ {c_j}, increasing.
    allowed: Vec<Vec<u32>>,
    /// L-values to digits in the arrangement basis.
    to_digits: Matrix,
}

impl AvoidedSet {
    pub fn new(arr: &Arrangement) -> Result<Self> {
        Self::with_limit(arr, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn with_limit(arr: &Arrangement, limit: u64) -> Result<Self> {
        let ctx = arr.ctx().clone();
        let n = ctx.n();
        let q = ctx.q();
        let size = (q - 1).checked_pow(n as u32);
        if size.is_none_or(|s| s > limit) {
            return Err(Error::OrderTooLarge {
                order: format!("({})^{n}", q - 1),
                limit: limit.to_string(),
                feature: "avoided-set enumeration",
            });
        }
        Self::sampler(arr)
    }

    /// Same structure without the enumeration budget, for sampling.
    pub(crate) fn sampler(arr: &Arrangement) -> Result<Self> {
        let ctx = arr.ctx().clone();
        let f = ctx.subfield();
        let to_digits = arr
            .functional_matrix()
            .inverse(f)
            .ok_or_else(|| Error::InvalidParameters("arrangement is not in general position".into()))?;
        let t = arr.basis().to_power().mul(f, &to_digits);
        let n = ctx.n();
        let columns = (0..n)
            .map(|j| (0..n).map(|i| t[(i, j)]).collect())
            .collect();
        let q = ctx.q() as u32;
        let allowed = arr
            .hyperplanes()
            .iter()
            .map(|h| (0..q).filter(|&a| a != h.constant).collect())
            .collect();
        Ok(AvoidedSet {
            ctx,
            columns,
            allowed,
            to_digits,
        })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// (q - 1)^n.
    pub fn len(&self) -> u64 {
        self.allowed.iter().map(|a| a.len() as u64).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Power coordinates of the element with L-values `v`.
    pub fn coords_of(&self, v: &[u32]) -> Vec<u32> {
        let f = self.ctx.subfield();
        let n = self.ctx.n();
        let mut out = vec![0u32; n];
        for (j, &a) in v.iter().enumerate() {
            if a != 0 {
                for (o, &t) in out.iter_mut().zip(&self.columns[j]) {
                    *o = f.add(*o, f.mul(a, t));
                }
            }
        }
        out
    }

    pub fn element_of(&self, v: &[u32]) -> FieldElement {
        self.ctx.element(self.coords_of(v)).expect("in range")
    }

    /// Digits, in the arrangement basis, of the element with L-values `v`.
    pub fn digits_of(&self, v: &[u32]) -> Vec<u32> {
        self.to_digits.mul_vec(self.ctx.subfield(), v)
    }

    pub(crate) fn allowed(&self) -> &[Vec<u32>] {
        &self.allowed
    }

    /// The whole set.
    pub fn cursor(&self) -> AvoidedCursor<'_> {
        AvoidedCursor::new(self, None)
    }

    /// The part with L_1-value `allowed[0][shard]`; shards 0..q-1 partition
    /// the set and concatenate to `cursor()` order.
    pub fn shard(&self, shard: usize) -> AvoidedCursor<'_> {
        AvoidedCursor::new(self, Some(shard))
    }

    pub fn shard_count(&self) -> usize {
        self.allowed.first().map_or(0, Vec::len)
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let ctx = self.ctx.clone();
        let mut c = self.cursor();
        std::iter::from_fn(move || c.advance().map(|coords| ctx.element(coords.to_vec()).unwrap()))
    }

    /// Element indices in enumeration order; small fields only.
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        let mut c = self.cursor();
        std::iter::from_fn(move || c.next_index())
    }
}

/// Odometer over Π allowed[j].
pub struct AvoidedCursor<'a> {
    set: &'a AvoidedSet,
    pos: Vec<usize>,
    coords: Vec<u32>,
    /// First position that moves; 1 inside a shard.
    first: usize,
    started: bool,
    done: bool,
}

impl<'a> AvoidedCursor<'a> {
    fn new(set: &'a AvoidedSet, shard: Option<usize>) -> Self {
        let n = set.allowed.len();
        let mut pos = vec![0usize; n];
        let empty = set.allowed.iter().any(Vec::is_empty) || shard.is_some_and(|s| s >= set.shard_count());
        if let Some(s) = shard {
            if !empty {
                pos[0] = s;
            }
        }
        let v: Vec<u32> = if empty {
            vec![0; n]
        } else {
            (0..n).map(|j| set.allowed[j][pos[j]]).collect()
        };
        AvoidedCursor {
            coords: set.coords_of(&v),
            set,
            pos,
            first: usize::from(shard.is_some()),
            started: false,
            done: empty,
        }
    }

    /// Power coordinates of the next element.
    pub fn advance(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.coords);
        }
        let f = self.set.ctx.subfield();
        let n = self.pos.len();
        let mut j = n;
        loop {
            if j == self.first {
                self.done = true;
                return None;
            }
            j -= 1;
            let allowed = &self.set.allowed[j];
            let old = allowed[self.pos[j]];
            let wrap = self.pos[j] + 1 == allowed.len();
            self.pos[j] = if wrap { 0 } else { self.pos[j] + 1 };
            let new = allowed[self.pos[j]];
            let delta = f.sub(new, old);
            for (c, &t) in self.coords.iter_mut().zip(&self.set.columns[j]) {
                *c = f.add(*c, f.mul(delta, t));
            }
            if !wrap {
                return Some(&self.coords);
            }
        }
    }

    /// Current L-values.
    pub fn values(&self) -> Vec<u32> {
        self.pos
            .iter()
            .enumerate()
            .map(|(j, &p)| self.set.allowed[j][p])
            .collect()
    }

    pub fn next_index(&mut self) -> Option<u64> {
        let q = self.set.ctx.q();
        self.advance()
            .map(|c| c.iter().rev().fold(0u64, |acc, &x| acc * q + x as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_field, Basis, BuildOptions, FieldParams};
    use crate::hyperplane::{digit_arrangement, random_general_position};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis(p: u32, m: u32, n: u32) -> Basis {
        let ctx = build_field(FieldParams::new(p, m, n).unwrap(), &BuildOptions::default()).unwrap();
        Basis::power(Arc::new(ctx))
    }

    #[test]
    fn q2_zero_constants_leave_one_element() {
        let arr = digit_arrangement(basis(2, 1, 2), &[0, 0]).unwrap();
        let s = AvoidedSet::new(&arr).unwrap();
        let all: Vec<_> = s.iter().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].coords(), &[1, 1]);
    }

    #[test]
    fn matches_filter_and_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (p, m, n) in [(3, 1, 2), (7, 1, 2), (2, 2, 3), (3, 1, 4)] {
            let b = basis(p, m, n);
            let ctx = b.ctx().clone();
            for arr in [
                digit_arrangement(b.clone(), &vec![1; n as usize]).unwrap(),
                random_general_position(b.clone(), &mut rng),
            ] {
                let s = AvoidedSet::new(&arr).unwrap();
                let got: Vec<u64> = s.indices().collect();
                let q = ctx.q();
                assert_eq!(got.len() as u64, (q - 1).pow(n));
                let mut sorted = got.clone();
                sorted.sort_unstable();
                let brute: Vec<u64> = ctx.elements().filter(|y| arr.avoids(y)).map(|y| ctx.index(&y)).collect();
                assert_eq!(sorted, brute);
            }
        }
    }

    #[test]
    fn shards_concatenate_to_full_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let arr = random_general_position(basis(5, 1, 3), &mut rng);
        let s = AvoidedSet::new(&arr).unwrap();
        let full: Vec<u64> = s.indices().collect();
        let mut joined = Vec::new();
        for k in 0..s.shard_count() {
            let mut c = s.shard(k);
            while let Some(i) = c.next_index() {
                joined.push(i);
            }
        }
        assert_eq!(full, joined);
    }

    #[test]
    fn lexicographic_in_digits() {
        let arr = digit_arrangement(basis(3, 1, 2), &[0, 0]).unwrap();
        let s = AvoidedSet::new(&arr).unwrap();
        let digits: Vec<Vec<u32>> = s.iter().map(|y| arr.basis().digits(&y)).collect();
        assert_eq!(digits, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn budget_enforced() {
        let arr = digit_arrangement(basis(3, 1, 4), &[0; 4]).unwrap();
        assert!(matches!(AvoidedSet::with_limit(&arr, 10), Err(Error::OrderTooLarge { .. })));
    }
}
