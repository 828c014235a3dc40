//! Machine checks of the correspondences between units and convergents.
//!
//! For an admissible surd `√(D/Q)` with orders `Z[√D1] ⊇ Z[√D2]` (see
//! [`RingContext`]), the following classical statements are verified value by
//! value, never assumed:
//!
//! * every unit `r + s√D1 > 1` shows up among the convergents of `√(D/Q)` as
//!   `(r/t, s·q/t) = (r_k, s_k)` with `t = gcd(r, q)`, and at that index
//!   `Q_{k+1} = Q/t²`; moving `k` forward by one period length yields another
//!   unit with the same `t` ([`link_unit`], [`shift_by_period`]);
//! * the units of `Z[√D2]` are exactly `r_k + (s_k/Q)·√D2` for `k` one less
//!   than a multiple of the period length, and each is a power of the
//!   fundamental unit of `Z[√D2]` ([`verify_period_end_units`]);
//! * at those indices the convergents of `√(D/Q)` and of `√D2` have equal
//!   numerators, and denominators coupled by the factor `Q`
//!   ([`verify_convergent_match`]);
//! * for any divisor `t` of `s_k` at such an index, writing
//!   `r_k/t = [c0, …, c_n]` with `n ≡ k (mod 2)`, the scaled surd
//!   `(s_k/t)·√(D/Q)` expands as `[c0, {c1, …, c_n, 2·c0}]`
//!   ([`verify_scaled_expansion`]).
//!
//! Any mismatch comes back as [`TheoremError::Violation`] with the surd and a
//! description of what broke.

pub mod sweep;

use crate::arith::valuation;
use crate::cfrac::{
    rational_cf, CfError, ConvergentStep, Parity, PeriodicCf, RationalCf, Surd,
};
use crate::rings::{fundamental_unit, QuadUnit, RingContext, RingError, UnitClass};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoremError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("t = {t} must be a positive divisor of s_k = {s}")]
    BadDivisor { t: BigUint, s: BigUint },
    #[error("the period multiple l must be at least 1")]
    ZeroIndex,
    #[error("√({d}/{q}) failed {check}: {detail}")]
    Violation {
        d: BigUint,
        q: BigUint,
        check: &'static str,
        detail: String,
    },
}

fn violation(surd: &Surd, check: &'static str, detail: String) -> TheoremError {
    TheoremError::Violation {
        d: surd.d().clone(),
        q: surd.q().clone(),
        check,
        detail,
    }
}

/// `(-1)^{k+1}` as a big integer.
fn sign_at(k: usize) -> BigInt {
    if k.is_multiple_of(2) {
        BigInt::from(-1)
    } else {
        BigInt::one()
    }
}

/// A unit of `Z[√D1]` located inside the convergent stream of `√(D/Q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitConvergentLink {
    /// The unit `r + s√D1`.
    pub unit: QuadUnit,
    /// `t = gcd(r, q)`.
    pub t: BigUint,
    /// Index with `(r_k, s_k) = (r/t, s·q/t)`.
    pub k: usize,
    /// `Q_{k+1}`, always equal to `Q/t²`.
    pub q_next: BigUint,
}

/// Locates a unit of `Z[√D1]` in a convergent stream prefix.
///
/// Numerators grow strictly, so the scan stops as soon as they pass `r/t`; a
/// unit that fails to appear inside the prefix is reported as a violation.
pub fn link_unit(
    ctx: &RingContext,
    unit: &QuadUnit,
    steps: &[ConvergentStep],
) -> Result<UnitConvergentLink, TheoremError> {
    if unit.radicand() != ctx.d1() {
        return Err(RingError::RadicandMismatch.into());
    }
    let surd = ctx.surd();
    let t = unit.r().gcd(ctx.small_q());
    let target_r = unit.r() / &t;
    let target_s = unit.s() * ctx.small_q() / &t;
    for step in steps {
        if step.convergent.r > target_r {
            break;
        }
        if step.convergent.r != target_r {
            continue;
        }
        if step.convergent.s != target_s {
            return Err(violation(
                surd,
                "unit-link",
                format!(
                    "convergent {} has numerator r/t but denominator {} ≠ s·q/t = {}",
                    step.convergent.k, step.convergent.s, target_s
                ),
            ));
        }
        let t_sq = &t * &t;
        let (expected_q, rem) = surd.q().div_rem(&t_sq);
        if !rem.is_zero() {
            return Err(violation(
                surd,
                "unit-link",
                format!("t² = {t_sq} does not divide Q"),
            ));
        }
        if step.q_next != expected_q {
            return Err(violation(
                surd,
                "unit-link",
                format!(
                    "Q_(k+1) = {} at k = {} instead of Q/t² = {}",
                    step.q_next, step.convergent.k, expected_q
                ),
            ));
        }
        return Ok(UnitConvergentLink {
            unit: unit.clone(),
            t,
            k: step.convergent.k,
            q_next: step.q_next.clone(),
        });
    }
    Err(violation(
        surd,
        "unit-link",
        format!("unit {unit} matches no convergent within {} steps", steps.len()),
    ))
}

/// Moves a linked unit one period forward: the convergent at `k + (m+1)`
/// scales back to another unit of `Z[√D1]` with the same `t`.
pub fn shift_by_period(
    ctx: &RingContext,
    link: &UnitConvergentLink,
    period_len: usize,
    steps: &[ConvergentStep],
) -> Result<UnitConvergentLink, TheoremError> {
    let surd = ctx.surd();
    let k2 = link.k + period_len;
    assert!(k2 < steps.len(), "convergent stream prefix too short");
    let step = &steps[k2];
    let r2 = &step.convergent.r * &link.t;
    let s2_num = &step.convergent.s * &link.t;
    let (s2, rem) = s2_num.div_rem(ctx.small_q());
    if !rem.is_zero() {
        return Err(violation(
            surd,
            "period-shift",
            format!("q does not divide s·t at shifted index {k2}"),
        ));
    }
    let unit = QuadUnit::new(ctx.d1().clone(), r2, s2).map_err(|_| {
        violation(
            surd,
            "period-shift",
            format!("convergent at shifted index {k2} does not scale to a unit"),
        )
    })?;
    let t2 = unit.r().gcd(ctx.small_q());
    if t2 != link.t {
        return Err(violation(
            surd,
            "period-shift",
            format!("shifted unit has t = {t2} instead of {}", link.t),
        ));
    }
    if step.q_next != link.q_next {
        return Err(violation(
            surd,
            "period-shift",
            format!(
                "Q_(k+1) = {} at shifted index {k2} instead of {}",
                step.q_next, link.q_next
            ),
        ));
    }
    Ok(UnitConvergentLink {
        unit,
        t: t2,
        k: k2,
        q_next: step.q_next.clone(),
    })
}

/// Finds `j` with `base^j = target`, comparing values exactly.
fn power_index(base: &QuadUnit, target: &QuadUnit, cap: u32) -> Option<u32> {
    let mut acc = base.clone();
    for j in 1..=cap {
        if acc == *target {
            return Some(j);
        }
        if acc.r() > target.r() {
            return None;
        }
        acc = acc.mul(base).ok()?;
    }
    None
}

/// A unit of `Z[√D2]` read off the convergent at the end of the `l`-th period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodEndUnit {
    pub l: u32,
    /// `k = l·(m+1) - 1`.
    pub k: usize,
    /// `r_k + (s_k/Q)·√D2`.
    pub unit: QuadUnit,
    /// Which power of the fundamental unit of `Z[√D2]` this is, found by
    /// value comparison.
    pub eta_power: u32,
}

/// Checks that the convergents closing the first `l_max` periods give units
/// of `Z[√D2]`, that each is a power of the fundamental unit, and that no
/// other index in range has `Q_{k+1} = Q`.
pub fn verify_period_end_units(
    ctx: &RingContext,
    l_max: u32,
) -> Result<Vec<PeriodEndUnit>, TheoremError> {
    let cf = ctx.surd().expand()?;
    let steps: Vec<ConvergentStep> = ctx
        .surd()
        .convergents()
        .take(cf.period_len() * l_max as usize)
        .collect();
    period_end_units_in(ctx, &cf, &steps, l_max)
}

pub(crate) fn period_end_units_in(
    ctx: &RingContext,
    cf: &PeriodicCf,
    steps: &[ConvergentStep],
    l_max: u32,
) -> Result<Vec<PeriodEndUnit>, TheoremError> {
    assert!(l_max >= 1);
    let surd = ctx.surd();
    let plen = cf.period_len();
    let horizon = plen * l_max as usize;
    assert!(steps.len() >= horizon, "convergent stream prefix too short");
    let steps = &steps[..horizon];
    let eta = fundamental_unit(ctx.d2())?;
    let mut out = Vec::new();
    for l in 1..=l_max {
        let k = plen * l as usize - 1;
        let step = &steps[k];
        let (s_over_q, rem) = step.convergent.s.div_rem(surd.q());
        if !rem.is_zero() {
            return Err(violation(
                surd,
                "period-units",
                format!("Q does not divide s_k at period end k = {k}"),
            ));
        }
        let unit = QuadUnit::new(ctx.d2().clone(), step.convergent.r.clone(), s_over_q)
            .map_err(|_| {
                violation(
                    surd,
                    "period-units",
                    format!("convergent at period end k = {k} is not a unit of Z[√D2]"),
                )
            })?;
        let eta_power = power_index(&eta, &unit, 64 * l_max).ok_or_else(|| {
            violation(
                surd,
                "period-units",
                format!("unit at k = {k} is not a power of the fundamental unit {eta}"),
            )
        })?;
        out.push(PeriodEndUnit { l, k, unit, eta_power });
    }
    // exactness: Q | s_k together with Q_{k+1} = Q happens at the period
    // ends and nowhere else.  Q_{k+1} = Q alone is weaker: it recurs at
    // interior indices carrying units of Z[√D1] whose s_k the full Q does
    // not divide.
    for step in steps {
        let at_end = (step.convergent.k + 1) % plen == 0;
        let unit_shaped =
            step.q_next == *surd.q() && (&step.convergent.s % surd.q()).is_zero();
        if unit_shaped != at_end {
            return Err(violation(
                surd,
                "period-units",
                format!(
                    "k = {}: Q_(k+1) = {}, Q | s_k is {}, but k {} a period end",
                    step.convergent.k,
                    step.q_next,
                    (&step.convergent.s % surd.q()).is_zero(),
                    if at_end { "is" } else { "is not" }
                ),
            ));
        }
    }
    Ok(out)
}

/// One compared pair of period-end convergents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchEntry {
    pub l: u32,
    /// Period-end index for `√(D/Q)`.
    pub k: usize,
    /// Period-end index for `√D2`.
    pub k_d2: usize,
    pub r: BigUint,
    pub s: BigUint,
    /// Denominator on the `√D2` side; always `s = s_d2·Q`.
    pub s_d2: BigUint,
}

/// Result of comparing the two convergent streams at period ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentMatch {
    pub period_len: usize,
    pub period_len_d2: usize,
    pub entries: Vec<MatchEntry>,
}

/// Checks that `√(D/Q)` and `√D2` close their periods on the same numerators,
/// with denominators coupled by the factor `Q`.
pub fn verify_convergent_match(
    ctx: &RingContext,
    l_max: u32,
) -> Result<ConvergentMatch, TheoremError> {
    let cf = ctx.surd().expand()?;
    let steps: Vec<ConvergentStep> = ctx
        .surd()
        .convergents()
        .take(cf.period_len() * l_max as usize)
        .collect();
    convergent_match_in(ctx, &cf, &steps, l_max)
}

pub(crate) fn convergent_match_in(
    ctx: &RingContext,
    cf: &PeriodicCf,
    steps: &[ConvergentStep],
    l_max: u32,
) -> Result<ConvergentMatch, TheoremError> {
    assert!(l_max >= 1);
    let surd = ctx.surd();
    let surd_d2 = Surd::new(ctx.d2().clone(), BigUint::one())?;
    let cf_d2 = surd_d2.expand()?;
    let plen = cf.period_len();
    let plen_d2 = cf_d2.period_len();
    assert!(steps.len() >= plen * l_max as usize);
    let steps_d2: Vec<ConvergentStep> =
        surd_d2.convergents().take(plen_d2 * l_max as usize).collect();
    let mut entries = Vec::new();
    for l in 1..=l_max {
        let k = plen * l as usize - 1;
        let k_d2 = plen_d2 * l as usize - 1;
        let c = &steps[k].convergent;
        let c2 = &steps_d2[k_d2].convergent;
        if c.r != c2.r {
            return Err(violation(
                surd,
                "convergent-match",
                format!("numerators differ at l = {l}: {} vs {}", c.r, c2.r),
            ));
        }
        if c.s != &c2.s * surd.q() {
            return Err(violation(
                surd,
                "convergent-match",
                format!(
                    "denominators at l = {l} violate s = s'·Q: {} vs {}·{}",
                    c.s,
                    c2.s,
                    surd.q()
                ),
            ));
        }
        entries.push(MatchEntry {
            l,
            k,
            k_d2,
            r: c.r.clone(),
            s: c.s.clone(),
            s_d2: c2.s.clone(),
        });
    }
    Ok(ConvergentMatch {
        period_len: plen,
        period_len_d2: plen_d2,
        entries,
    })
}

/// One power of the fundamental unit of `Z[√D1]`, located and classified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderRung {
    /// Power `j`, the rung carries `ε^j`.
    pub power: u32,
    pub link: UnitConvergentLink,
    pub class: UnitClass,
}

/// The fundamental unit `ε` of `Z[√D1]` and its powers up to a level, each
/// linked into the convergent stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitLadder {
    pub rungs: Vec<LadderRung>,
    /// Fundamental unit `η` of `Z[√D2]`.
    pub eta: QuadUnit,
    /// `j0` with `ε^{j0} = η`; regular rungs sit exactly at multiples of it.
    pub eta_power: u32,
}

/// Builds the ladder `ε, ε², …` up to `levels`, linking every power into the
/// convergent stream and checking the regularity pattern: `ε^j` lies in
/// `Z[√D2]` exactly when `j0 | j`, where `ε^{j0} = η`, and in that case it
/// rewrites to `η^{j/j0}`.
pub fn unit_ladder(ctx: &RingContext, levels: u32) -> Result<UnitLadder, TheoremError> {
    let cf = ctx.surd().expand()?;
    let steps: Vec<ConvergentStep> = ctx
        .surd()
        .convergents()
        .take(cf.period_len() * (levels as usize + 1))
        .collect();
    ladder_in(ctx, &cf, &steps, levels)
}

pub(crate) fn ladder_in(
    ctx: &RingContext,
    cf: &PeriodicCf,
    steps: &[ConvergentStep],
    levels: u32,
) -> Result<UnitLadder, TheoremError> {
    assert!(levels >= 1);
    let surd = ctx.surd();
    let plen = cf.period_len();
    assert!(steps.len() >= plen * levels as usize);
    let eps = fundamental_unit(ctx.d1())?;
    let eta = fundamental_unit(ctx.d2())?;
    // η = R + S·√D2 seen inside Z[√D1] is R + S·(Q/q)·√D1
    let eta_in_d1 = QuadUnit::new(ctx.d1().clone(), eta.r().clone(), eta.s() * ctx.cofactor())?;
    let eta_power = power_index(&eps, &eta_in_d1, 512).ok_or_else(|| {
        violation(
            surd,
            "ladder",
            format!("{eta} is not a small power of {eps}"),
        )
    })?;
    let mut rungs: Vec<LadderRung> = Vec::new();
    let mut u = eps.clone();
    for j in 1..=levels {
        let link = link_unit(ctx, &u, steps)?;
        let class = ctx.classify(&u)?;
        let expect_regular = j % eta_power == 0;
        if (class == UnitClass::Regular) != expect_regular {
            return Err(violation(
                surd,
                "ladder",
                format!(
                    "ε^{j} is {class:?} but ε^j lies in Z[√D2] exactly for {eta_power} | j"
                ),
            ));
        }
        if expect_regular {
            let rewritten = ctx.rewrite_in_d2(&u)?;
            if rewritten != eta.pow(j / eta_power) {
                return Err(violation(
                    surd,
                    "ladder",
                    format!("ε^{j} does not rewrite to η^{}", j / eta_power),
                ));
            }
        }
        if let Some(prev) = rungs.last() {
            if link.k <= prev.link.k {
                return Err(violation(
                    surd,
                    "ladder",
                    format!(
                        "linked indices not strictly increasing: k = {} after {}",
                        link.k, prev.link.k
                    ),
                ));
            }
        }
        rungs.push(LadderRung {
            power: j,
            link,
            class,
        });
        if j < levels {
            u = u.mul(&eps)?;
        }
    }
    Ok(UnitLadder {
        rungs,
        eta,
        eta_power,
    })
}

/// Result of predicting the expansion of a scaled surd `(s_k/t)·√(D/Q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledExpansion {
    /// Period-end index the prediction starts from.
    pub k: usize,
    pub t: BigUint,
    /// `r_k/t = [c0, …, c_n]` with `n ≡ k (mod 2)`.
    pub rational: RationalCf,
    /// `[c0, {c1, …, c_n, 2·c0}]`.
    pub predicted: PeriodicCf,
    /// `(s_k/t)²·D/Q` in lowest terms.
    pub d_scaled: BigUint,
    pub q_scaled: BigUint,
    /// `t/q_scaled`, so that `t·√(d_scaled/q_scaled) = a·√(d_scaled·q_scaled)`.
    pub a: BigUint,
    /// Directly computed minimal expansion of `√(d_scaled/q_scaled)`.
    pub computed: PeriodicCf,
}

/// Predicts the expansion of `(s_k/t)·√(D/Q)` from the continued fraction of
/// `r_k/t` and checks it against a direct expansion, word by word.
///
/// `k` is the end of the `l`-th period.  The directly computed minimal period
/// may be shorter; the predicted word must then be an exact whole-number
/// repetition of it.  On top of the word comparison the reduced value
/// `d_scaled/q_scaled` is checked prime by prime: for every `p | Q` the
/// exponent of `p` in `t²·(d_scaled/q_scaled)/(d_scaled·q_scaled)` is
/// nonnegative and even, which is what makes `a = t/q_scaled` an integer.
pub fn verify_scaled_expansion(
    ctx: &RingContext,
    l: u32,
    t: &BigUint,
) -> Result<ScaledExpansion, TheoremError> {
    if l == 0 {
        return Err(TheoremError::ZeroIndex);
    }
    let cf = ctx.surd().expand()?;
    let steps: Vec<ConvergentStep> = ctx
        .surd()
        .convergents()
        .take(cf.period_len() * l as usize)
        .collect();
    scaled_expansion_in(ctx, &cf, &steps, l, t)
}

pub(crate) fn scaled_expansion_in(
    ctx: &RingContext,
    cf: &PeriodicCf,
    steps: &[ConvergentStep],
    l: u32,
    t: &BigUint,
) -> Result<ScaledExpansion, TheoremError> {
    if l == 0 {
        return Err(TheoremError::ZeroIndex);
    }
    let surd = ctx.surd();
    let plen = cf.period_len();
    let k = plen * l as usize - 1;
    assert!(steps.len() > k, "convergent stream prefix too short");
    let step = &steps[k];
    let (r_k, s_k) = (step.convergent.r.clone(), step.convergent.s.clone());
    if t.is_zero() || !(&s_k % t).is_zero() {
        return Err(TheoremError::BadDivisor {
            t: t.clone(),
            s: s_k.clone(),
        });
    }
    let w = &s_k / t;
    let parity = if k.is_multiple_of(2) { Parity::Even } else { Parity::Odd };
    let rational = rational_cf(&r_k, t, parity)?;
    let n = rational.n();
    debug_assert_eq!(n % 2, k % 2);
    let c0 = rational.terms()[0].clone();
    let mut period: Vec<BigUint> = rational.terms()[1..].to_vec();
    period.push(&c0 << 1);
    let predicted = PeriodicCf::new(c0, period)?;

    // (s_k/t)²·D/Q in lowest terms
    let num = &w * &w * surd.d();
    let g = num.gcd(surd.q());
    let d_scaled = &num / &g;
    let q_scaled = surd.q() / &g;

    // prime by prime: the exponent of p in t²·(D'/Q')/(D'·Q') = t²/Q'²,
    // computed once from the valuation bookkeeping and once directly,
    // must agree and be even and nonnegative
    let q_factors = crate::arith::factorize(surd.q()).expect("Q ≥ 1");
    for (p, e) in q_factors.pairs() {
        let e = i64::from(*e);
        let f = i64::from(valuation(t, p).map_err(|_| TheoremError::BadDivisor {
            t: t.clone(),
            s: s_k.clone(),
        })?);
        let g_p = i64::from(valuation(&w, p).unwrap_or(0));
        let by_cases = if e <= 2 * g_p { 2 * f } else { 2 * f + 4 * g_p - 2 * e };
        let direct = 2 * f - 2 * i64::from(valuation(&q_scaled, p).unwrap_or(0));
        if by_cases != direct {
            return Err(violation(
                surd,
                "scaled-expansion",
                format!("valuation bookkeeping at p = {p}: {by_cases} ≠ {direct}"),
            ));
        }
        if by_cases < 0 || by_cases % 2 != 0 {
            return Err(violation(
                surd,
                "scaled-expansion",
                format!("exponent of p = {p} in t²/q_scaled² is {by_cases}"),
            ));
        }
    }
    let (a, rem) = t.div_rem(&q_scaled);
    if !rem.is_zero() {
        return Err(violation(
            surd,
            "scaled-expansion",
            format!("reduced denominator {q_scaled} does not divide t = {t}"),
        ));
    }

    let scaled_surd = Surd::new(d_scaled.clone(), q_scaled.clone())?;
    let computed = scaled_surd.expand()?;
    if computed.b0() != predicted.b0() {
        return Err(violation(
            surd,
            "scaled-expansion",
            format!(
                "leading term differs: computed {} vs predicted {}",
                computed.b0(),
                predicted.b0()
            ),
        ));
    }
    let lp = predicted.period_len();
    let lc = computed.period_len();
    if lp % lc != 0 {
        return Err(violation(
            surd,
            "scaled-expansion",
            format!("predicted period length {lp} is not a multiple of computed {lc}"),
        ));
    }
    if computed.repeat(lp / lc).period() != predicted.period() {
        return Err(violation(
            surd,
            "scaled-expansion",
            format!("period word differs: computed {computed} vs predicted {predicted}"),
        ));
    }
    // the scaled stream obeys the same bookkeeping as the original
    let scaled_steps: Vec<ConvergentStep> = scaled_surd
        .convergents()
        .take(computed.period_len())
        .collect();
    verify_stream_invariants(&scaled_surd, &computed, &scaled_steps)?;
    Ok(ScaledExpansion {
        k,
        t: t.clone(),
        rational,
        predicted,
        d_scaled,
        q_scaled,
        a,
        computed,
    })
}

/// Re-derives the bookkeeping identities on a convergent stream prefix: the
/// period shape (closing `2·b0`, palindromic prefix), the state bounds
/// `0 ≤ P ≤ ⌊√D2⌋` and `0 < Q_k ≤ 2⌊√D2⌋ + 1`, the coupling
/// `Q·r_k² - s_k²·D = (-1)^{k+1}·Q_{k+1}` and the determinant
/// `r_k·s_{k-1} - r_{k-1}·s_k = (-1)^{k+1}`.
pub fn verify_stream_invariants(
    surd: &Surd,
    cf: &PeriodicCf,
    steps: &[ConvergentStep],
) -> Result<(), TheoremError> {
    let period = cf.period();
    if period.last() != Some(&(cf.b0() << 1)) {
        return Err(violation(
            surd,
            "invariants",
            "period does not close with 2·b0".into(),
        ));
    }
    let prefix = &period[..period.len() - 1];
    if !prefix.iter().eq(prefix.iter().rev()) {
        return Err(violation(
            surd,
            "invariants",
            "period prefix is not a palindrome".into(),
        ));
    }
    let bound_q = (surd.sqrt_d2() << 1) + 1u32;
    let mut st = surd.initial_state();
    for _ in 0..steps.len() {
        let (_, next) = surd.step(&st)?;
        if next.p > *surd.sqrt_d2() || next.q.is_zero() || next.q > bound_q {
            return Err(violation(
                surd,
                "invariants",
                format!("state (P, Q) = ({}, {}) out of bounds at k = {}", next.p, next.q, next.k),
            ));
        }
        st = next;
    }
    let d = BigInt::from(surd.d().clone());
    let q = BigInt::from(surd.q().clone());
    let mut r_prev = BigInt::one();
    let mut s_prev = BigInt::zero();
    for step in steps {
        let k = step.convergent.k;
        let sign = sign_at(k);
        let r = BigInt::from(step.convergent.r.clone());
        let s = BigInt::from(step.convergent.s.clone());
        if &q * &r * &r - &s * &s * &d != &sign * BigInt::from(step.q_next.clone()) {
            return Err(violation(
                surd,
                "invariants",
                format!("Q·r² - s²·D ≠ ±Q_(k+1) at k = {k}"),
            ));
        }
        if &r * &s_prev - &r_prev * &s != sign {
            return Err(violation(
                surd,
                "invariants",
                format!("determinant ≠ ±1 at k = {k}"),
            ));
        }
        r_prev = r;
        s_prev = s;
    }
    Ok(())
}
