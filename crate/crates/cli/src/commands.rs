use std::sync::Arc;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use primavoid::bounds::{
    case_iv_threshold, delta, exception_scan, table1_report, theorem32_lower_bound, w_phi, ScanOptions,
};
use primavoid::charsum::{arrangement_sweep, count_primitive_in, digit_subspace_sweep, CharacterGroup, SweepReport};
use primavoid::gf::{build_field, Basis, BuildOptions, FieldCtx, FieldParams};
use primavoid::hyperplane::{
    digit_arrangement, find_primitive_avoiding, is_general_position, random_general_position, Arrangement,
    AvoidedSet,
};
use primavoid::ntheory::FactorCache;
use primavoid::{Error, Result};

use crate::render::{float, opt, Report};
use crate::{Global, Target};

fn field(g: &Global, cache: Option<&FactorCache>, descriptor: &str) -> Result<Arc<FieldCtx>> {
    let params: FieldParams = descriptor.parse()?;
    let opts = BuildOptions {
        cache,
        budget: g.budget(),
        ..BuildOptions::default()
    };
    Ok(Arc::new(build_field(params, &opts)?))
}

fn parse_constants(text: &str, n: usize) -> Result<Vec<u32>> {
    let vals = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidParameters(format!("bad constant {s:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(if vals.len() == 1 { vec![vals[0]; n] } else { vals })
}

fn arrangement(ctx: &Arc<FieldCtx>, t: &Target) -> Result<Arrangement> {
    let basis = Basis::power(ctx.clone());
    match (&t.constants, &t.arrangement) {
        (_, Some(a)) => Arrangement::parse(basis, a),
        (c, None) => {
            let c = parse_constants(c.as_deref().unwrap_or("0"), ctx.n())?;
            digit_arrangement(basis, &c)
        }
    }
}

fn check_size(g: &Global, ctx: &FieldCtx, feature: &'static str) -> Result<()> {
    match ctx.order_u64() {
        Some(v) if v <= g.enumeration_limit => Ok(()),
        _ => Err(Error::OrderTooLarge {
            order: ctx.order().to_string(),
            limit: g.enumeration_limit.to_string(),
            feature,
        }),
    }
}

fn sweep_rows(r: &SweepReport, rows: &mut Vec<Vec<String>>) {
    for row in &r.rows {
        rows.push(vec![
            r.kind.to_string(),
            row.character.to_string(),
            row.order.to_string(),
            row.set.clone(),
            float(row.magnitude),
            float(row.bound),
            float(row.margin),
            row.pass.to_string(),
            row.checks.to_string(),
        ]);
    }
}

pub fn verify_charsums(g: &Global, descriptor: &str, count: usize, seed: u64) -> Result<Report> {
    let cache = g.load_cache()?;
    let ctx = field(g, cache.as_ref(), descriptor)?;
    check_size(g, &ctx, "character sum sweeps")?;
    let group = CharacterGroup::new(ctx.clone())?;
    let digits = digit_subspace_sweep(&group, &Basis::power(ctx.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrs: Vec<Arrangement> = (0..count)
        .map(|_| random_general_position(Basis::power(ctx.clone()), &mut rng))
        .collect();
    let arr = arrangement_sweep(&group, &arrs)?;
    let violations = digits.violations + arr.violations;
    let mut rep = Report::new(
        "verify-charsums",
        json!({
            "field": ctx.info(),
            "seed": seed,
            "arrangements": arrs.iter().map(Arrangement::descriptor).collect::<Vec<_>>(),
            "digit_subspaces": digits,
            "arrangement_sums": arr,
            "violations": violations,
        }),
    );
    rep.header = vec!["kind", "character", "order", "set", "magnitude", "bound", "margin", "pass", "checks"];
    sweep_rows(&digits, &mut rep.rows);
    sweep_rows(&arr, &mut rep.rows);
    rep.text = format!(
        "field {}\ndigit subspaces: {} characters, {} checks, worst margin {}\n\
         arrangements: {} sets, {} checks, worst margin {}\nviolations: {violations}\n",
        descriptor,
        digits.rows.len(),
        digits.checks,
        opt(&digits.worst_margin()),
        arrs.len(),
        arr.checks,
        opt(&arr.worst_margin()),
    );
    rep.exit = if violations == 0 { 0 } else { 2 };
    Ok(rep)
}

pub fn count(g: &Global, t: &Target) -> Result<Report> {
    let cache = g.load_cache()?;
    let ctx = field(g, cache.as_ref(), &t.field)?;
    let arr = arrangement(&ctx, t)?;
    let set = AvoidedSet::with_limit(&arr, g.enumeration_limit)?;
    let group = CharacterGroup::new(ctx.clone())?;
    let pc = count_primitive_in(&group, set.indices())?;
    let (q, n) = (ctx.q(), ctx.n() as u32);
    let (w, phi) = w_phi(ctx.unit_factorization());
    let bound = theorem32_lower_bound(q, n, &w, &delta(q, n), &phi);
    let exceeds = bound.exceeded_by(pc.exact);
    let exact_bound = bound.rational().map(|r| r.to_string());
    let mut rep = Report::new(
        "count",
        json!({
            "field": ctx.info(),
            "arrangement": arr.descriptor(),
            "general_position": is_general_position(&arr),
            "size": pc.size,
            "expected_size": BigUint::from(q - 1).pow(n).to_string(),
            "primitive": pc.exact,
            "vinogradov": pc.vinogradov,
            "max_imaginary": pc.max_imaginary,
            "W": w.to_string(),
            "phi": phi.to_string(),
            "bound": bound.to_f64(),
            "bound_exact": exact_bound,
            "bound_nonnegative": bound.is_nonnegative(),
            "exceeds_bound": exceeds,
        }),
    );
    rep.header = vec!["field", "arrangement", "size", "primitive", "vinogradov", "bound", "exceeds_bound"];
    rep.rows.push(vec![
        ctx.params().descriptor(),
        arr.descriptor(),
        pc.size.to_string(),
        pc.exact.to_string(),
        float(pc.vinogradov),
        float(bound.to_f64()),
        exceeds.to_string(),
    ]);
    rep.text = format!(
        "field {}\narrangement {}\n|S| = {}\nprimitive: {} (indicator {:.6})\nlower bound {:.6}, exceeded: {exceeds}\n",
        ctx.params().descriptor(),
        arr.descriptor(),
        pc.size,
        pc.exact,
        pc.vinogradov,
        bound.to_f64(),
    );
    Ok(rep)
}

pub fn scan(g: &Global, q: Option<u64>) -> Result<Report> {
    let cache = g.load_cache()?;
    let opts = ScanOptions {
        q,
        precision: g.precision(),
        budget: g.budget(),
    };
    let r = exception_scan(cache.as_ref(), &opts)?;
    let mut rep = Report::new("scan", &r);
    rep.header = vec!["q", "n", "in_table1_row", "eq3", "check_a", "check_b", "verdict", "W", "phi_known"];
    for row in &r.rows {
        rep.rows.push(vec![
            row.q.to_string(),
            row.n.to_string(),
            row.in_table1_row.map_or(String::new(), |v| v.to_string()),
            opt(&row.eq3),
            opt(&row.check_a),
            opt(&row.check_b),
            serde_json::to_value(row.verdict).unwrap().as_str().unwrap().to_string(),
            opt(&row.w),
            row.phi_known.to_string(),
        ]);
    }
    let list = |v: &[(u64, u32)]| v.iter().map(|(q, n)| format!("({q}, {n})")).collect::<Vec<_>>().join(" ");
    rep.text = format!(
        "{}\npairs: {}\nexceptions: {}\nunknown: {}\nmatches listed exceptions: {}\n",
        r.description,
        r.pairs,
        list(&r.exceptions),
        list(&r.unknowns),
        r.matches_listed,
    );
    rep.exit = r.exit_code();
    Ok(rep)
}

pub fn witness(g: &Global, t: &Target, seed: u64, max_draws: u64) -> Result<Report> {
    let cache = g.load_cache()?;
    let ctx = field(g, cache.as_ref(), &t.field)?;
    let arr = arrangement(&ctx, t)?;
    let found = match find_primitive_avoiding(&arr, seed, max_draws) {
        Ok(w) => Some(w),
        Err(Error::NotFound { .. }) => None,
        Err(e) => return Err(e),
    };
    let verified = found.as_ref().is_some_and(|w| w.verify(&arr));
    let mut rep = Report::new(
        "witness",
        json!({
            "field": ctx.info(),
            "arrangement": arr.descriptor(),
            "seed": seed,
            "max_draws": max_draws,
            "found": found.is_some(),
            "witness": found,
            "verified": verified,
        }),
    );
    rep.header = vec!["field", "found", "draws", "coords", "digits", "verified"];
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    match &found {
        Some(w) => {
            rep.rows.push(vec![
                ctx.params().descriptor(),
                "true".into(),
                w.draws.to_string(),
                join(&w.coords),
                join(&w.digits),
                verified.to_string(),
            ]);
            let mut text = format!(
                "field {}\narrangement {}\nwitness {} after {} draws\ndigits {}\n",
                ctx.params().descriptor(),
                arr.descriptor(),
                w.element,
                w.draws,
                join(&w.digits)
            );
            for (i, h) in w.hyperplanes.iter().enumerate() {
                text += &format!("  L_{}(y) = {} != {}: {}\n", i + 1, h.value, h.constant, h.avoids);
            }
            for c in &w.exponent_checks {
                text += &format!("  y^(N/{}) != 1: {}\n", c.prime, c.passes);
            }
            text += &format!("verified: {verified}\n");
            rep.text = text;
            rep.exit = if verified { 0 } else { 2 };
        }
        None => {
            rep.rows.push(vec![
                ctx.params().descriptor(),
                "false".into(),
                max_draws.to_string(),
                String::new(),
                String::new(),
                "false".into(),
            ]);
            rep.text = format!("no primitive element found in {max_draws} draws\n");
            rep.exit = 1;
        }
    }
    Ok(rep)
}

pub fn table1(g: &Global) -> Result<Report> {
    let rows = table1_report(g.precision())?;
    let all = rows.iter().all(|r| r.pass);
    let mut rep = Report::new("table1", json!({ "rows": rows, "pass": all }));
    rep.header = vec!["q", "n", "f", "eq3", "minimizer", "F1", "F2", "F3", "rhs", "neighbours", "tight", "pass"];
    let mut text = String::new();
    for r in &rows {
        let nb = r
            .neighbours
            .iter()
            .map(|x| format!("({},{})={}", x.q, x.n, x.eq3))
            .collect::<Vec<_>>()
            .join(" ");
        rep.rows.push(vec![
            r.row.q.to_string(),
            r.row.n.to_string(),
            r.row.f.to_string(),
            r.eq3.to_string(),
            r.f_values.minimizer.to_string(),
            float(r.f_values.f[0]),
            float(r.f_values.f[1]),
            float(r.f_values.f[2]),
            float(r.f_values.rhs),
            nb.clone(),
            r.tight.to_string(),
            r.pass.to_string(),
        ]);
        text += &format!(
            ">= {:>3}, >= {:>2}, F{}: eq3 {} via F{} ({:.6} vs {:.6}); neighbours {nb}\n",
            r.row.q,
            r.row.n,
            r.row.f,
            r.eq3,
            r.f_values.minimizer,
            r.f_values.f[r.f_values.minimizer - 1],
            r.f_values.rhs,
        );
    }
    rep.text = text;
    rep.exit = if all { 0 } else { 2 };
    Ok(rep)
}

pub fn classify(g: &Global, q: u64, n: u32) -> Result<Report> {
    let cache = g.load_cache()?;
    let v = primavoid::bounds::classify(q, n, cache.as_ref(), &g.budget(), g.precision())?;
    let mut rep = Report::new("classify", &v);
    let case = serde_json::to_value(v.case).unwrap().as_str().unwrap().to_string();
    rep.header = vec!["q", "n", "case", "justification"];
    rep.rows.push(vec![q.to_string(), n.to_string(), case.clone(), v.justification.clone()]);
    rep.text = format!("({q}, {n}): {case} ({})\n", v.justification);
    Ok(rep)
}

pub fn threshold(g: &Global, q: u64, limit: u32) -> Result<Report> {
    let cache = g.load_cache()?;
    let r = case_iv_threshold(q, limit, cache.as_ref(), &g.budget())?;
    let mut rep = Report::new("threshold", &r);
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    rep.header = vec!["q", "limit", "first", "holds_for_all_sampled_after", "failures_after", "unknown"];
    rep.rows.push(vec![
        q.to_string(),
        limit.to_string(),
        opt(&r.first),
        r.holds_for_all_sampled_after.to_string(),
        join(&r.failures_after),
        join(&r.unknown),
    ]);
    rep.text = format!(
        "q = {q}, n <= {limit}: the W-bound first holds at n = {}; fails again at [{}]; unknown [{}]\n",
        opt(&r.first),
        join(&r.failures_after),
        join(&r.unknown)
    );
    Ok(rep)
}

fn cache_source(c: &FactorCache) -> String {
    c.source().map_or_else(|| "<shipped>".into(), |p| p.display().to_string())
}

fn require_cache(g: &Global) -> Result<FactorCache> {
    g.load_cache()?
        .ok_or_else(|| Error::InvalidParameters("no cache selected".into()))
}

pub fn cache_verify(g: &Global) -> Result<Report> {
    // Loading re-verifies every entry; a bad entry is an error.
    let c = require_cache(g)?;
    let src = cache_source(&c);
    let mut rep = Report::new("cache verify", json!({ "source": src, "entries": c.len(), "verified": true }));
    rep.header = vec!["source", "entries", "verified"];
    rep.rows.push(vec![src.clone(), c.len().to_string(), "true".into()]);
    rep.text = format!("{src}: {} entries verified\n", c.len());
    Ok(rep)
}

pub fn cache_stats(g: &Global) -> Result<Report> {
    let c = require_cache(g)?;
    let src = cache_source(&c);
    let digits = |v: &BigUint| v.to_str_radix(10).len();
    let max_value = c.iter().map(|f| digits(f.value())).max().unwrap_or(0);
    let max_prime = c
        .iter()
        .flat_map(|f| f.factors().iter().map(|(p, _)| digits(p)))
        .max()
        .unwrap_or(0);
    let primes: usize = c.iter().map(|f| f.omega()).sum();
    let mut rep = Report::new(
        "cache stats",
        json!({
            "source": src,
            "entries": c.len(),
            "distinct_prime_factors": primes,
            "max_value_digits": max_value,
            "max_prime_digits": max_prime,
        }),
    );
    rep.header = vec!["source", "entries", "distinct_prime_factors", "max_value_digits", "max_prime_digits"];
    rep.rows.push(vec![
        src.clone(),
        c.len().to_string(),
        primes.to_string(),
        max_value.to_string(),
        max_prime.to_string(),
    ]);
    rep.text = format!(
        "{src}: {} entries, {primes} prime factors, values up to {max_value} digits, primes up to {max_prime} digits\n",
        c.len()
    );
    Ok(rep)
}
