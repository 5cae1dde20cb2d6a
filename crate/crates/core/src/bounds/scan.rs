//! The finite case analysis: the threshold table, the set X of pairs outside it, the
//! exception scan and the classifier.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_a, check_b, check_eq2, check_eq3, delta, f_values, w_phi, FValues, Precision,
};
use crate::error::{Error, Result};
use crate::gf::prime_power;
use crate::ntheory::{factor_power_minus_one, FactorBudget, FactorCache};

/// A row (q0, n0, i): the F-bound holds through F_i for all q ≥ q0, n ≥ n0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub q: u64,
    pub n: u32,
    pub f: usize,
}

const TABLE1: [Table1Row; 5] = [
    Table1Row { q: 389, n: 2, f: 1 },
    Table1Row { q: 76, n: 4, f: 3 },
    Table1Row { q: 16, n: 25, f: 3 },
    Table1Row { q: 13, n: 45, f: 2 },
    Table1Row { q: 11, n: 76, f: 2 },
];

/// Pairs with q ≥ 11 for which none of the F-bound, (a), (b) holds.
pub const LISTED_EXCEPTIONS: [(u64, u32); 4] = [(13, 4), (11, 4), (11, 6), (11, 12)];

pub fn table1_rows() -> &'static [Table1Row] {
    &TABLE1
}

/// Index of the first row covering (q, n).
pub fn in_table1(q: u64, n: u32) -> Option<usize> {
    TABLE1.iter().position(|r| q >= r.q && n >= r.n)
}

/// X: prime powers 11 ≤ q ≤ 388 and n ≥ 2 not covered by any row, ordered
/// by (q, n).
pub fn x_pairs() -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in 11..389u64 {
        if prime_power(q).is_none() {
            continue;
        }
        let mut n = 2;
        while in_table1(q, n).is_none() {
            out.push((q, n));
            n += 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Neighbour {
    pub q: u64,
    pub n: u32,
    pub prime_power: bool,
    pub eq3: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1RowReport {
    pub row: Table1Row,
    pub eq3: bool,
    pub f_values: FValues,
    /// (q0 - 1, n0) and (q0, n0 - 1); the second is omitted when n0 = 2.
    pub neighbours: Vec<Neighbour>,
    /// The F-bound fails at every neighbour.
    pub tight: bool,
    /// The F-bound holds at the corner with the stated F_i as minimizer.
    pub pass: bool,
}

/// Evaluates every row at its corner and its two inner neighbours. The
/// neighbours are evaluated whether or not q0 - 1 is a prime power.
pub fn table1_report(prec: Precision) -> Result<Vec<Table1RowReport>> {
    TABLE1
        .iter()
        .map(|&row| {
            let eq3 = check_eq3(row.q, row.n, prec)?;
            let fv = f_values(row.q, row.n, prec)?;
            let mut neighbours = Vec::new();
            let mut cand = vec![(row.q - 1, row.n)];
            if row.n > 2 {
                cand.push((row.q, row.n - 1));
            }
            for (q, n) in cand {
                neighbours.push(Neighbour {
                    q,
                    n,
                    prime_power: prime_power(q).is_some(),
                    eq3: check_eq3(q, n, prec)?,
                });
            }
            Ok(Table1RowReport {
                row,
                eq3,
                pass: eq3 && fv.minimizer == row.f,
                f_values: fv,
                tight: neighbours.iter().all(|x| !x.eq3),
                neighbours,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVerdict {
    Eq3,
    CheckA,
    CheckB,
    Exception,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub q: u64,
    pub n: u32,
    /// Always `None` for pairs of X; kept so rows read the same as the
    /// classifier's.
    pub in_table1_row: Option<usize>,
    pub eq3: Option<bool>,
    pub check_a: Option<bool>,
    pub check_b: Option<bool>,
    pub verdict: ScanVerdict,
    #[serde(rename = "W")]
    pub w: Option<u64>,
    pub phi_known: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    /// Restrict the scan to one q.
    pub q: Option<u64>,
    pub precision: Precision,
    pub budget: FactorBudget,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            q: None,
            precision: Precision::default(),
            budget: FactorBudget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub description: String,
    pub q: Option<u64>,
    pub pairs: usize,
    pub rows: Vec<ScanRow>,
    pub exceptions: Vec<(u64, u32)>,
    pub unknowns: Vec<(u64, u32)>,
    pub complete: bool,
    /// The exceptions are exactly the listed pairs in range.
    pub matches_listed: bool,
}

impl ScanReport {
    /// 0 on a match, 3 when some pair is unknown, 2 on a mismatch.
    pub fn exit_code(&self) -> i32 {
        if !self.complete {
            3
        } else if self.matches_listed {
            0
        } else {
            2
        }
    }
}

fn scan_pair(q: u64, n: u32, cache: Option<&FactorCache>, opts: &ScanOptions) -> Result<ScanRow> {
    let mut row = ScanRow {
        q,
        n,
        in_table1_row: in_table1(q, n),
        eq3: None,
        check_a: None,
        check_b: None,
        verdict: ScanVerdict::Unknown,
        w: None,
        phi_known: false,
    };
    match check_eq3(q, n, opts.precision) {
        Ok(true) => {
            row.eq3 = Some(true);
            row.verdict = ScanVerdict::Eq3;
            return Ok(row);
        }
        Ok(false) => row.eq3 = Some(false),
        Err(Error::PrecisionExhausted { .. }) => {}
        Err(e) => return Err(e),
    }
    let f = match factor_power_minus_one(q, n, cache, &opts.budget) {
        Ok(f) => f,
        Err(Error::FactoringTimeout { .. }) => return Ok(row),
        Err(e) => return Err(e),
    };
    let (w, phi) = w_phi(&f);
    row.w = Some(u64::try_from(w.clone()).expect("W fits in 64 bits"));
    row.phi_known = true;
    let a = check_a(q, n, &w, &delta(q, n));
    row.check_a = Some(a);
    if a {
        row.verdict = ScanVerdict::CheckA;
        return Ok(row);
    }
    let b = check_b(q, n, &phi);
    row.check_b = Some(b);
    row.verdict = if b {
        ScanVerdict::CheckB
    } else if row.eq3.is_none() {
        ScanVerdict::Unknown
    } else {
        ScanVerdict::Exception
    };
    Ok(row)
}

/// Runs the F-bound, then (a), then (b) on every pair of X, stopping at the
/// first that holds.
pub fn exception_scan(cache: Option<&FactorCache>, opts: &ScanOptions) -> Result<ScanReport> {
    let pairs: Vec<(u64, u32)> = x_pairs()
        .into_iter()
        .filter(|&(q, _)| opts.q.is_none_or(|r| r == q))
        .collect();
    let rows: Vec<ScanRow> = pairs
        .par_iter()
        .map(|&(q, n)| scan_pair(q, n, cache, opts))
        .collect::<Result<_>>()?;
    let pick = |v: ScanVerdict| -> Vec<(u64, u32)> {
        let mut out: Vec<_> = rows.iter().filter(|r| r.verdict == v).map(|r| (r.q, r.n)).collect();
        out.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        out
    };
    let exceptions = pick(ScanVerdict::Exception);
    let unknowns = pick(ScanVerdict::Unknown);
    let expected: Vec<(u64, u32)> = LISTED_EXCEPTIONS
        .iter()
        .copied()
        .filter(|&(q, _)| opts.q.is_none_or(|r| r == q))
        .collect();
    Ok(ScanReport {
        description: "X = prime powers 11 <= q <= 388 with 2 <= n below the first threshold row covering q".into(),
        q: opts.q,
        pairs: pairs.len(),
        complete: unknowns.is_empty(),
        matches_listed: unknowns.is_empty() && exceptions == expected,
        exceptions,
        unknowns,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    CoveredCaseI,
    CoveredCaseIi,
    CoveredCaseIii,
    AsymptoticCaseIvVerifiedAtN,
    ListedException,
    TrivialQ2,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremVerdict {
    pub q: u64,
    pub n: u32,
    pub case: Case,
    pub justification: String,
}

/// Which of the existence criteria decides (q, n), if any.
fn decide(q: u64, n: u32, cache: Option<&FactorCache>, budget: &FactorBudget, prec: Precision, eq2: bool) -> Result<Option<String>> {
    if let Some(r) = in_table1(q, n) {
        let row = TABLE1[r];
        return Ok(Some(format!("F-bound via threshold row (>= {}, >= {}, F{})", row.q, row.n, row.f)));
    }
    if !eq2 && check_eq3(q, n, prec)? {
        return Ok(Some(format!("F-bound via F{}", f_values(q, n, prec)?.minimizer)));
    }
    let f = factor_power_minus_one(q, n, cache, budget)?;
    let (w, phi) = w_phi(&f);
    if eq2 && check_eq2(q, n, &w) {
        return Ok(Some(format!("W-bound with W = {w}")));
    }
    if check_a(q, n, &w, &delta(q, n)) {
        return Ok(Some(format!("check (a) with W = {w}")));
    }
    if check_b(q, n, &phi) {
        return Ok(Some("check (b)".into()));
    }
    Ok(None)
}

/// Places (q, n) in the main theorem's case analysis. A factorization that
/// cannot be obtained within `budget` is returned as `FactoringTimeout`.
pub fn classify(q: u64, n: u32, cache: Option<&FactorCache>, budget: &FactorBudget, prec: Precision) -> Result<TheoremVerdict> {
    if prime_power(q).is_none() || n < 2 {
        return Err(Error::InvalidParameters(format!("({q}, {n}) needs a prime power q and n >= 2")));
    }
    let verdict = |case, justification: String| Ok(TheoremVerdict { q, n, case, justification });
    if q == 2 {
        return verdict(Case::TrivialQ2, "q = 2: the digits (1, ..., 1) leave only 0".into());
    }
    if q <= 5 {
        return verdict(Case::Unresolved, format!("q = {q} is outside the case analysis"));
    }
    if q <= 9 {
        return match decide(q, n, cache, budget, prec, true)? {
            Some(j) => verdict(Case::AsymptoticCaseIvVerifiedAtN, j),
            None => verdict(Case::Unresolved, "none of the W-bound, (a), (b) holds at this n".into()),
        };
    }
    if LISTED_EXCEPTIONS.contains(&(q, n)) {
        return verdict(Case::ListedException, "the F-bound, (a) and (b) all fail".into());
    }
    let case = match q {
        11 => Case::CoveredCaseIii,
        13 => Case::CoveredCaseIi,
        _ => Case::CoveredCaseI,
    };
    match decide(q, n, cache, budget, prec, false)? {
        Some(j) => verdict(case, j),
        None => verdict(Case::Unresolved, "the F-bound, (a) and (b) all fail".into()),
    }
}

/// Where the W-bound starts to hold for q ∈ {7, 8, 9}, sampled for n ≤ limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub q: u64,
    pub limit: u32,
    /// Smallest n at which the W-bound holds.
    pub first: Option<u32>,
    /// Every decided n ≥ first also satisfies the W-bound.
    pub holds_for_all_sampled_after: bool,
    /// n > first where the W-bound fails.
    pub failures_after: Vec<u32>,
    /// n whose factorization was unavailable.
    pub unknown: Vec<u32>,
}

pub fn case_iv_threshold(q: u64, limit: u32, cache: Option<&FactorCache>, budget: &FactorBudget) -> Result<ThresholdReport> {
    let results: Vec<(u32, Option<bool>)> = (2..=limit)
        .into_par_iter()
        .map(|n| match factor_power_minus_one(q, n, cache, budget) {
            Ok(f) => Ok((n, Some(check_eq2(q, n, &f.squarefree_divisor_count())))),
            Err(Error::FactoringTimeout { .. }) => Ok((n, None)),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let first = results.iter().find(|r| r.1 == Some(true)).map(|r| r.0);
    let failures_after: Vec<u32> = match first {
        Some(f) => results.iter().filter(|r| r.0 > f && r.1 == Some(false)).map(|r| r.0).collect(),
        None => Vec::new(),
    };
    Ok(ThresholdReport {
        q,
        limit,
        first,
        holds_for_all_sampled_after: first.is_some() && failures_after.is_empty(),
        failures_after,
        unknown: results.iter().filter(|r| r.1.is_none()).map(|r| r.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_extent() {
        let x = x_pairs();
        assert!(x.contains(&(13, 44)));
        assert!(!x.contains(&(13, 45)));
        assert!(x.contains(&(11, 75)));
        assert!(x.contains(&(388, 3)) || prime_power(388).is_none());
        assert!(x.contains(&(383, 3)));
        assert!(!x.contains(&(383, 4)));
        assert!(x.contains(&(75, 24)) || prime_power(75).is_none());
        assert!(x.contains(&(73, 24)));
        assert!(!x.iter().any(|&(q, _)| q == 12 || q == 389));
        let by_q = |q| x.iter().filter(|p| p.0 == q).count();
        assert_eq!((by_q(11), by_q(13), by_q(16), by_q(79)), (74, 43, 23, 2));
    }

    #[test]
    fn table1_lookup() {
        assert_eq!(in_table1(389, 2), Some(0));
        assert_eq!(in_table1(1000, 3), Some(0));
        assert_eq!(in_table1(76, 4), Some(1));
        assert_eq!(in_table1(75, 4), None);
        assert_eq!(in_table1(11, 76), Some(4));
        assert_eq!(in_table1(7, 1000), None);
    }

    #[test]
    fn classifier_without_factoring() {
        let b = FactorBudget::default();
        let p = Precision::default();
        let c = |q, n| classify(q, n, None, &b, p).unwrap().case;
        assert_eq!(c(2, 7), Case::TrivialQ2);
        assert_eq!(c(4, 3), Case::Unresolved);
        assert_eq!(c(11, 6), Case::ListedException);
        assert_eq!(c(13, 4), Case::ListedException);
        assert_eq!(c(401, 2), Case::CoveredCaseI);
        assert!(classify(12, 2, None, &b, p).is_err());
        assert!(classify(11, 1, None, &b, p).is_err());
    }

    #[test]
    fn classifier_small_pairs() {
        let b = FactorBudget::default();
        let p = Precision::default();
        let v = classify(17, 3, None, &b, p).unwrap();
        assert_eq!(v.case, Case::CoveredCaseI);
        assert_eq!(classify(11, 5, None, &b, p).unwrap().case, Case::CoveredCaseIii);
        assert_eq!(classify(13, 3, None, &b, p).unwrap().case, Case::CoveredCaseIi);
        // 36 + φ(48) = 52 > 49
        let v = classify(7, 2, None, &b, p).unwrap();
        assert_eq!((v.case, v.justification.as_str()), (Case::AsymptoticCaseIvVerifiedAtN, "check (b)"));
        // 342 = 2 · 3^2 · 19: W = 8, φ = 108
        assert_eq!(classify(7, 3, None, &b, p).unwrap().case, Case::Unresolved);
    }
}
