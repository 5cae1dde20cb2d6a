//! Exhaustive bound sweeps, parallel over characters.
//!
//! Each character is processed sequentially and results are collected in
//! character order, so reports do not depend on the worker count.

use rayon::prelude::*;
use serde::Serialize;

use super::{affine_bound, Character, CharacterGroup, KahanSum, BOUND_TOLERANCE};
use crate::bounds::delta;
use crate::error::{Error, Result};
use crate::gf::{Basis, FieldInfo};
use crate::hyperplane::{Arrangement, AvoidedSet};

/// Worst case for one character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub character: u64,
    pub order: u64,
    /// The set attaining the smallest margin.
    pub set: String,
    pub magnitude: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    /// Number of sets checked against this character.
    pub checks: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub field: FieldInfo,
    pub kind: &'static str,
    pub rows: Vec<SweepRow>,
    pub checks: u64,
    pub violations: u64,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn worst_margin(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.margin).reduce(f64::min)
    }
}

struct Worst {
    row: SweepRow,
    violations: u64,
}

impl Worst {
    fn new(chi: Character) -> Self {
        Worst {
            row: SweepRow {
                character: chi.index,
                order: chi.order,
                set: String::new(),
                magnitude: 0.0,
                bound: 0.0,
                margin: f64::INFINITY,
                pass: true,
                checks: 0,
            },
            violations: 0,
        }
    }

    fn record(&mut self, magnitude: f64, error: f64, bound: f64, set: impl FnOnce() -> String) {
        self.row.checks += 1;
        let ok = magnitude <= bound + BOUND_TOLERANCE + error;
        if !ok {
            self.violations += 1;
            self.row.pass = false;
        }
        let margin = bound - magnitude;
        if margin < self.row.margin {
            self.row.margin = margin;
            self.row.magnitude = magnitude;
            self.row.bound = bound;
            self.row.set = set();
        }
    }
}

fn finish(group: &CharacterGroup, kind: &'static str, worst: Vec<Worst>) -> SweepReport {
    let checks = worst.iter().map(|w| w.row.checks).sum();
    let violations = worst.iter().map(|w| w.violations).sum();
    SweepReport {
        field: group.ctx().info(),
        kind,
        rows: worst.into_iter().map(|w| w.row).collect(),
        checks,
        violations,
    }
}

/// Every nontrivial character against every digit-aligned affine subspace
/// {y : a_i = c_i for i in K} of the basis, for all K and all constants.
pub fn digit_subspace_sweep(group: &CharacterGroup, basis: &Basis) -> Result<SweepReport> {
    let ctx = group.ctx();
    let q = ctx.q();
    let n = ctx.n();
    let total = ctx.order_u64().ok_or(Error::NoLogTable)? as usize;
    let qpow: Vec<u64> = (0..n).map(|i| q.pow(i as u32)).collect();

    // Logs indexed by digit code Σ a_i q^i.
    let mut digits = vec![0u32; n];
    let logs: Vec<u32> = (0..total as u64)
        .map(|code| {
            let mut c = code;
            for d in digits.iter_mut() {
                *d = (c % q) as u32;
                c /= q;
            }
            let y = basis.combine(&digits);
            ctx.log_of_index(ctx.index(&y)).unwrap_or(u32::MAX)
        })
        .collect();

    // keys[free][code]: the code with the free digits cleared.
    let keys: Vec<Vec<u32>> = (0..1usize << n)
        .map(|free| {
            (0..total as u64)
                .map(|code| {
                    let mut k = code;
                    for (i, &w) in qpow.iter().enumerate() {
                        if free >> i & 1 == 1 {
                            k -= (code / w % q) * w;
                        }
                    }
                    k as u32
                })
                .collect()
        })
        .collect();

    let describe = |free: usize, key: u64| -> String {
        let parts: Vec<String> = (0..n)
            .map(|i| {
                if free >> i & 1 == 1 {
                    "*".to_string()
                } else {
                    (key / qpow[i] % q).to_string()
                }
            })
            .collect();
        format!("[{}]", parts.join(","))
    };

    let chars: Vec<Character> = group.nontrivial().collect();
    let worst: Vec<Worst> = chars
        .par_iter()
        .map(|&chi| {
            let vals: Vec<Option<num_complex::Complex64>> = logs
                .iter()
                .map(|&l| (l != u32::MAX).then(|| group.eval_log(chi, l as u64)))
                .collect();
            let mut w = Worst::new(chi);
            let mut buckets = vec![KahanSum::default(); total];
            for (free, key) in keys.iter().enumerate() {
                let t = free.count_ones() as usize;
                let bound = affine_bound(q, n, t);
                buckets.iter_mut().for_each(|b| *b = KahanSum::default());
                for (v, &k) in vals.iter().zip(key) {
                    match v {
                        Some(z) => buckets[k as usize].add(*z),
                        None => buckets[k as usize].add_zero(),
                    }
                }
                for (k, b) in buckets.iter().enumerate() {
                    if b.terms == 0 {
                        continue;
                    }
                    let s = b.finish();
                    w.record(s.magnitude, s.error_bound, bound, || describe(free, k as u64));
                }
            }
            w
        })
        .collect();
    Ok(finish(group, "digit-subspaces", worst))
}

/// Every nontrivial character against S_C* of each arrangement, bounded by
/// δ(q, n).
pub fn arrangement_sweep(group: &CharacterGroup, arrangements: &[Arrangement]) -> Result<SweepReport> {
    let ctx = group.ctx();
    let (q, n) = (ctx.q(), ctx.n() as u32);
    let d = delta(q, n);
    if !d.at_most_crude_bound() {
        return Err(Error::BoundViolated(format!("delta({q},{n}) exceeds (2^n - 1) q^(n/2)")));
    }
    let bound = d.to_f64();
    let sets: Vec<(Vec<u32>, u64)> = arrangements
        .iter()
        .map(|arr| {
            let s = AvoidedSet::new(arr)?;
            let mut logs = Vec::with_capacity(s.len() as usize);
            let mut zeros = 0;
            for idx in s.indices() {
                match ctx.log_of_index(idx) {
                    Some(l) => logs.push(l),
                    None => zeros += 1,
                }
            }
            Ok((logs, zeros))
        })
        .collect::<Result<_>>()?;
    let chars: Vec<Character> = group.nontrivial().collect();
    let worst: Vec<Worst> = chars
        .par_iter()
        .map(|&chi| {
            let mut w = Worst::new(chi);
            for (arr, (logs, zeros)) in arrangements.iter().zip(&sets) {
                let mut s = group.sum_logs(logs, chi);
                s.error_bound += *zeros as f64 * super::TERM_ALLOWANCE;
                w.record(s.magnitude, s.error_bound, bound, || arr.descriptor());
            }
            w
        })
        .collect();
    Ok(finish(group, "arrangements", worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_field, BuildOptions, FieldParams};
    use crate::hyperplane::random_general_position;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn group(p: u32, m: u32, n: u32) -> CharacterGroup {
        let ctx = build_field(FieldParams::new(p, m, n).unwrap(), &BuildOptions::default()).unwrap();
        CharacterGroup::new(Arc::new(ctx)).unwrap()
    }

    #[test]
    fn digit_sweep_f81() {
        let g = group(3, 1, 4);
        let r = digit_subspace_sweep(&g, &Basis::power(g.ctx().clone())).unwrap();
        assert_eq!(r.rows.len(), 79);
        assert!(r.passed());
        // (q + 1)^n subspaces per character
        assert!(r.rows.iter().all(|row| row.checks == 256));
    }

    #[test]
    fn arrangement_sweep_f125() {
        let g = group(5, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let arrs: Vec<_> = (0..5)
            .map(|_| random_general_position(Basis::power(g.ctx().clone()), &mut rng))
            .collect();
        let r = arrangement_sweep(&g, &arrs).unwrap();
        assert_eq!(r.rows.len(), 123);
        assert!(r.passed());
        assert_eq!(r.checks, 123 * 5);
    }

    #[test]
    fn sweeps_independent_of_worker_count() {
        let g = group(2, 2, 3);
        let b = Basis::power(g.ctx().clone());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| digit_subspace_sweep(&g, &b).unwrap());
        let c = three.install(|| digit_subspace_sweep(&g, &b).unwrap());
        assert_eq!(a, c);
    }
}
