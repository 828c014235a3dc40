//! Exhaustive verification over ranges of surds.
//!
//! [`sweep`] walks every admissible pair `(D, Q)` up to a bound, expands each
//! surd once, and runs all verifiers of the parent module against the shared
//! convergent stream.  Every verifier contributes one row per surd.  Rows
//! stream into a caller-provided [`ReportSink`] as they are produced, in no
//! particular order when running on several threads; the final report carries
//! them sorted by `(D, Q, check)` together with aggregate statistics.

use super::{
    convergent_match_in, ladder_in, link_unit, period_end_units_in, scaled_expansion_in,
    shift_by_period, verify_stream_invariants, TheoremError,
};
use crate::arith::is_square;
use crate::cfrac::ConvergentStep;
use crate::rings::{fundamental_unit, Norm, RingContext, UnitClass};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;
use std::io;

/// Which denominators a sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QPolicy {
    /// Every `Q < D` coprime to `D`.
    All,
    /// Only the given `Q`.
    Only(u64),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub d_max: u64,
    pub q_policy: QPolicy,
    /// How many periods the period-end checks cover.
    pub l_max: u32,
    /// Powers of the fundamental unit of `Z[√D1]` to link and shift.
    pub unit_power_cap: u32,
    /// At most this many divisors `t` of `s` feed the scaled-expansion check.
    pub divisor_cap: usize,
    /// Divisors are collected by scanning `t = 1, 2, …` up to this bound.
    pub divisor_scan_limit: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            d_max: 500,
            q_policy: QPolicy::All,
            l_max: 2,
            unit_power_cap: 4,
            divisor_cap: 64,
            divisor_scan_limit: 10_000,
        }
    }
}

/// The individual checks a sweep runs per surd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Invariants,
    UnitLink,
    PeriodUnits,
    ConvergentMatch,
    Ladder,
    ScaledExpansion,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Invariants => "invariants",
            CheckKind::UnitLink => "unit-link",
            CheckKind::PeriodUnits => "period-units",
            CheckKind::ConvergentMatch => "convergent-match",
            CheckKind::Ladder => "ladder",
            CheckKind::ScaledExpansion => "scaled-expansion",
        }
    }
}

/// Outcome of one check on one surd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub d: u64,
    pub q: u64,
    pub check: CheckKind,
    /// `None` for a pass, otherwise the violation message.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn passed(&self) -> bool {
        self.error.is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "D": self.d.to_string(),
            "Q": self.q.to_string(),
            "check": self.check.name(),
            "status": if self.passed() { "pass" } else { "fail" },
        });
        if let Some(e) = &self.error {
            v["detail"] = json!(e);
        }
        v
    }
}

/// Receives rows as they are produced, possibly from several threads at once.
pub trait ReportSink: Sync {
    fn row(&self, row: &SweepRow);
}

/// Discards every row; the report still collects them all.
pub struct NullSink;

impl ReportSink for NullSink {
    fn row(&self, _row: &SweepRow) {}
}

impl<F: Fn(&SweepRow) + Sync> ReportSink for F {
    fn row(&self, row: &SweepRow) {
        self(row)
    }
}

/// Aggregate counters of a sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub surds: u64,
    pub units: u64,
    pub irregular_units: u64,
    pub max_period: usize,
    /// Surds whose fundamental unit of `Z[√D1]` has norm -1.
    pub minus_norms_d1: u64,
    /// Surds whose fundamental unit of `Z[√D2]` has norm -1.
    pub minus_norms_d2: u64,
    /// Stream indices in the first period whose `Q_{k+1}` divides `Q` with a
    /// square quotient; recorded as a statistic, nothing is asserted of them.
    pub unit_candidate_indices: u64,
}

impl SweepStats {
    fn absorb(&mut self, other: &SweepStats) {
        self.surds += other.surds;
        self.units += other.units;
        self.irregular_units += other.irregular_units;
        self.max_period = self.max_period.max(other.max_period);
        self.minus_norms_d1 += other.minus_norms_d1;
        self.minus_norms_d2 += other.minus_norms_d2;
        self.unit_candidate_indices += other.unit_candidate_indices;
    }
}

/// Result of a sweep: all rows, sorted, plus aggregates.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub stats: SweepStats,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(SweepRow::passed)
    }

    pub fn violations(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| !r.passed())
    }

    /// One JSON object per row, one row per line.
    pub fn write_ndjson<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        for row in &self.rows {
            writeln!(w, "{}", row.to_json())?;
        }
        Ok(())
    }

    /// Human-readable closing summary.
    pub fn summary(&self) -> String {
        let violations: Vec<&SweepRow> = self.violations().collect();
        let mut out = format!(
            "surds checked: {}\n\
             units checked: {} ({} irregular)\n\
             longest period: {}\n\
             minus-norm fundamental units: {} in Z[√D1], {} in Z[√D2]\n\
             unit-shaped stream indices recorded: {}\n\
             rows: {}, violations: {}\n",
            self.stats.surds,
            self.stats.units,
            self.stats.irregular_units,
            self.stats.max_period,
            self.stats.minus_norms_d1,
            self.stats.minus_norms_d2,
            self.stats.unit_candidate_indices,
            self.rows.len(),
            violations.len(),
        );
        for row in violations.iter().take(10) {
            out.push_str(&format!(
                "  √({}/{}) {}: {}\n",
                row.d,
                row.q,
                row.check.name(),
                row.error.as_deref().unwrap_or(""),
            ));
        }
        if violations.len() > 10 {
            out.push_str(&format!("  … and {} more\n", violations.len() - 10));
        }
        out
    }
}

/// Every `(D, Q)` with `2 ≤ D ≤ d_max`, `1 ≤ Q < D`, `gcd(D, Q) = 1` and
/// `D·Q` not a perfect square, filtered through the `Q` policy.
pub fn admissible_pairs(cfg: &SweepConfig) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for d in 2..=cfg.d_max {
        for q in 1..d {
            if let QPolicy::Only(only) = cfg.q_policy {
                if q != only {
                    continue;
                }
            }
            if num_integer::gcd(d, q) != 1 {
                continue;
            }
            if is_square(&(BigUint::from(d) * q)) {
                continue;
            }
            out.push((d, q));
        }
    }
    out
}

fn row_of(d: u64, q: u64, check: CheckKind, res: Result<(), TheoremError>) -> SweepRow {
    SweepRow {
        d,
        q,
        check,
        error: res.err().map(|e| e.to_string()),
    }
}

fn primes_upto(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if is_prime[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
    }
    out
}

/// Divisors of `n` not exceeding `limit`, smallest first, at most `cap` of
/// them.  Any such divisor is built from primes ≤ `limit`, so a bounded
/// trial division enumerates them exactly; `n` itself is never factored.
fn small_divisors(n: &BigUint, primes: &[u64], limit: u64, cap: usize) -> Vec<u64> {
    let mut found: Vec<(u64, u32)> = Vec::new();
    let mut rest = n.clone();
    for &p in primes {
        // exponents beyond p^v > limit can never matter
        let mut v = 0u32;
        let mut bound = limit;
        while bound >= p {
            bound /= p;
            v += 1;
        }
        let mut e = 0u32;
        while e < v && (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            found.push((p, e));
        }
    }
    let mut divs: Vec<u64> = vec![1];
    for (p, e) in found {
        let mut next = Vec::new();
        for &d in &divs {
            let mut m = d;
            next.push(m);
            for _ in 0..e {
                m = match m.checked_mul(p) {
                    Some(m) if m <= limit => m,
                    _ => break,
                };
                next.push(m);
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs.truncate(cap);
    divs
}

fn check_surd(cfg: &SweepConfig, primes: &[u64], d: u64, q: u64) -> (Vec<SweepRow>, SweepStats) {
    let mut rows = Vec::with_capacity(6);
    let mut stats = SweepStats {
        surds: 1,
        ..SweepStats::default()
    };
    let ctx = RingContext::new(BigUint::from(d), BigUint::from(q)).expect("admissible pair");
    let surd = ctx.surd();
    let cf = match surd.expand() {
        Ok(cf) => cf,
        Err(e) => {
            rows.push(row_of(d, q, CheckKind::Invariants, Err(e.into())));
            return (rows, stats);
        }
    };
    let plen = cf.period_len();
    stats.max_period = plen;
    let levels = cfg.unit_power_cap.max(1);
    let l_max = cfg.l_max.max(1);
    let horizon = plen * (levels as usize + 1).max(l_max as usize);
    let steps: Vec<ConvergentStep> = surd.convergents().take(horizon).collect();

    for step in &steps[..plen] {
        let (ratio, rem) = surd.q().div_rem(&step.q_next);
        if rem.is_zero() && is_square(&ratio) {
            stats.unit_candidate_indices += 1;
        }
    }

    let span = steps.len().min(2 * plen);
    rows.push(row_of(
        d,
        q,
        CheckKind::Invariants,
        verify_stream_invariants(surd, &cf, &steps[..span]),
    ));

    // every power of the fundamental unit of Z[√D1] must link to a convergent
    // and survive the one-period shift
    let link_result = (|| {
        let eps = fundamental_unit(ctx.d1())?;
        let mut u = eps.clone();
        for j in 1..=levels {
            let link = link_unit(&ctx, &u, &steps)?;
            shift_by_period(&ctx, &link, plen, &steps)?;
            if j < levels {
                u = u.mul(&eps)?;
            }
        }
        Ok(())
    })();
    rows.push(row_of(d, q, CheckKind::UnitLink, link_result));

    let ladder_result = ladder_in(&ctx, &cf, &steps, levels);
    if let Ok(ladder) = &ladder_result {
        stats.units += ladder.rungs.len() as u64;
        stats.irregular_units += ladder
            .rungs
            .iter()
            .filter(|r| r.class == UnitClass::Irregular)
            .count() as u64;
        if ladder.rungs[0].link.unit.norm() == Norm::Minus {
            stats.minus_norms_d1 += 1;
        }
        if ladder.eta.norm() == Norm::Minus {
            stats.minus_norms_d2 += 1;
        }
    }
    rows.push(row_of(d, q, CheckKind::Ladder, ladder_result.map(|_| ())));

    rows.push(row_of(
        d,
        q,
        CheckKind::PeriodUnits,
        period_end_units_in(&ctx, &cf, &steps, l_max).map(|_| ()),
    ));
    rows.push(row_of(
        d,
        q,
        CheckKind::ConvergentMatch,
        convergent_match_in(&ctx, &cf, &steps, l_max).map(|_| ()),
    ));

    // scaled expansions for the smallest divisors of s at the first period end
    let scaled_result = (|| {
        let s_end = &steps[plen - 1].convergent.s;
        for dvsr in small_divisors(s_end, primes, cfg.divisor_scan_limit, cfg.divisor_cap) {
            let t = BigUint::from(dvsr);
            scaled_expansion_in(&ctx, &cf, &steps, 1, &t).map_err(|e| match e {
                TheoremError::Violation {
                    d,
                    q,
                    check,
                    detail,
                } => TheoremError::Violation {
                    d,
                    q,
                    check,
                    detail: format!("t = {dvsr}: {detail}"),
                },
                other => other,
            })?;
        }
        Ok(())
    })();
    rows.push(row_of(d, q, CheckKind::ScaledExpansion, scaled_result));

    (rows, stats)
}

/// Runs every check on every admissible surd, fanning out over the rayon
/// thread pool.  The sink is the only shared object; rows reach it unordered.
pub fn sweep<S: ReportSink + ?Sized>(cfg: &SweepConfig, sink: &S) -> SweepReport {
    let pairs = admissible_pairs(cfg);
    let primes = primes_upto(cfg.divisor_scan_limit.max(2));
    let per_surd: Vec<(Vec<SweepRow>, SweepStats)> = pairs
        .par_iter()
        .map(|&(d, q)| {
            let out = check_surd(cfg, &primes, d, q);
            for row in &out.0 {
                sink.row(row);
            }
            out
        })
        .collect();
    let mut rows = Vec::new();
    let mut stats = SweepStats::default();
    for (r, s) in per_surd {
        rows.extend(r);
        stats.absorb(&s);
    }
    rows.sort_by_key(|r| (r.d, r.q, r.check));
    SweepReport {
        config: cfg.clone(),
        rows,
        stats,
    }
}
