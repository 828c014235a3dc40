//! Periodic continued fractions of quadratic surds `√(D/Q)`.
//!
//! For admissible `(D, Q)` the surd is expanded through its complete
//! quotients `x_k = (√D2 + P_k)/Q_k` with `D2 = D·Q`:
//!
//! ```text
//! P_0 = 0,  Q_0 = Q
//! b_k     = floor((P_k + √D2) / Q_k)
//! P_{k+1} = b_k·Q_k - P_k
//! Q_{k+1} = (D2 - P_{k+1}²) / Q_k        (always an exact division)
//! ```
//!
//! The expansion is periodic from index 1 onward and has the shape
//! `[b0, {b1, …, b_m, 2·b0}]` with `(b1, …, b_m)` a palindrome.  Convergents
//! `r_k/s_k` follow the usual recurrence and satisfy
//!
//! ```text
//! Q·r_k² - s_k²·D = (-1)^{k+1} · Q_{k+1}
//! ```
//!
//! which couples every convergent to a complete-quotient denominator.  The
//! convergent stream therefore carries `Q_{k+1}` along with `r_k` and `s_k`.

use crate::arith::{is_square, isqrt};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CfError {
    #[error("D and Q must be coprime")]
    NotCoprime,
    #[error("the surd must exceed 1, so Q < D is required")]
    NotGreaterThanOne,
    #[error("D·Q is a perfect square, the surd is rational")]
    PerfectSquare,
    #[error("complete quotient invariant broken: {0}")]
    InternalInvariant(String),
    #[error("no period found within {cap} steps")]
    PeriodNotFound { cap: u64 },
    #[error("period must be nonempty and end in 2·b0")]
    MalformedPeriod,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("numerator must be nonzero")]
    ZeroNumerator,
}

/// A quadratic surd `√(D/Q)` with `gcd(D, Q) = 1`, `Q < D` and `D·Q` not a
/// perfect square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    d: BigUint,
    q: BigUint,
    d2: BigUint,
    sqrt_d2: BigUint,
}

/// State of the complete quotient `x_k = (√D2 + P_k)/Q_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientState {
    pub p: BigUint,
    pub q: BigUint,
    pub k: usize,
}

impl Surd {
    pub fn new(d: BigUint, q: BigUint) -> Result<Surd, CfError> {
        if q.is_zero() || !d.gcd(&q).is_one() {
            return Err(CfError::NotCoprime);
        }
        if q >= d {
            return Err(CfError::NotGreaterThanOne);
        }
        let d2 = &d * &q;
        if is_square(&d2) {
            return Err(CfError::PerfectSquare);
        }
        let sqrt_d2 = isqrt(&d2);
        Ok(Surd { d, q, d2, sqrt_d2 })
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// `D2 = D·Q`, the radicand of the equivalent pure surd `√D2 / Q`.
    pub fn d2(&self) -> &BigUint {
        &self.d2
    }

    /// `⌊√D2⌋`.
    pub fn sqrt_d2(&self) -> &BigUint {
        &self.sqrt_d2
    }

    pub fn initial_state(&self) -> QuotientState {
        QuotientState {
            p: BigUint::zero(),
            q: self.q.clone(),
            k: 0,
        }
    }

    /// One step of the complete-quotient recurrence: returns the partial
    /// quotient `b_k` and the state for `k + 1`.
    ///
    /// Inexact division, a nonpositive `Q_{k+1}` or a state outside the bounds
    /// `0 ≤ P ≤ ⌊√D2⌋`, `0 < Q ≤ 2⌊√D2⌋ + 1` signal a bug, never an input
    /// problem, and come back as [`CfError::InternalInvariant`].
    pub fn step(&self, state: &QuotientState) -> Result<(BigUint, QuotientState), CfError> {
        let b = (&state.p + &self.sqrt_d2) / &state.q;
        let bq = &b * &state.q;
        if bq < state.p {
            return Err(CfError::InternalInvariant(format!(
                "negative P at step {}",
                state.k
            )));
        }
        let p_next = bq - &state.p;
        let p_sq = &p_next * &p_next;
        if p_sq >= self.d2 {
            return Err(CfError::InternalInvariant(format!(
                "P² ≥ D2 at step {}",
                state.k
            )));
        }
        let (q_next, rem) = (&self.d2 - p_sq).div_rem(&state.q);
        if !rem.is_zero() {
            return Err(CfError::InternalInvariant(format!(
                "inexact Q division at step {}",
                state.k
            )));
        }
        if p_next > self.sqrt_d2 || q_next > (&self.sqrt_d2 << 1) + 1u32 {
            return Err(CfError::InternalInvariant(format!(
                "state out of bounds at step {}",
                state.k + 1
            )));
        }
        Ok((
            b,
            QuotientState {
                p: p_next,
                q: q_next,
                k: state.k + 1,
            },
        ))
    }

    /// Default step budget for period detection, `max(64, 10·⌊√D2⌋)`.
    pub fn default_cap(&self) -> u64 {
        u64::try_from(&self.sqrt_d2 * 10u32)
            .unwrap_or(u64::MAX)
            .max(64)
    }

    /// Minimal periodic expansion `[b0, {b1, …, b_m, 2·b0}]`.
    pub fn expand(&self) -> Result<PeriodicCf, CfError> {
        self.expand_capped(self.default_cap())
    }

    /// Like [`Surd::expand`] with an explicit step budget.
    ///
    /// The period is detected as the first recurrence of the state
    /// `(P_k, Q_k) = (P_1, Q_1)` with `k > 1`; the tail shape and the
    /// palindrome property are then verified, not assumed.
    pub fn expand_capped(&self, cap: u64) -> Result<PeriodicCf, CfError> {
        let (b0, first) = self.step(&self.initial_state())?;
        let key = (first.p.clone(), first.q.clone());
        let mut terms = Vec::new();
        let mut state = first;
        let mut steps = 1u64;
        loop {
            if steps >= cap {
                return Err(CfError::PeriodNotFound { cap });
            }
            let (b, next) = self.step(&state)?;
            steps += 1;
            terms.push(b);
            if next.k > 1 && next.p == key.0 && next.q == key.1 {
                break;
            }
            state = next;
        }
        let cf = PeriodicCf::new(b0, terms)?;
        let prefix = &cf.period[..cf.period.len() - 1];
        if !is_palindrome(prefix) {
            return Err(CfError::InternalInvariant(
                "period prefix is not a palindrome".into(),
            ));
        }
        Ok(cf)
    }

    /// Infinite stream of convergents `r_k/s_k` with the coupled `Q_{k+1}`.
    ///
    /// The iterator drives the live state machine; it panics if the
    /// complete-quotient arithmetic ever breaks its invariants, which would be
    /// a bug rather than an input condition.
    pub fn convergents(&self) -> Convergents<'_> {
        Convergents {
            surd: self,
            state: self.initial_state(),
            r_prev: BigUint::one(),
            r_prev2: BigUint::zero(),
            s_prev: BigUint::zero(),
            s_prev2: BigUint::one(),
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_one() {
            write!(f, "√{}", self.d)
        } else {
            write!(f, "√({}/{})", self.d, self.q)
        }
    }
}

fn is_palindrome(word: &[BigUint]) -> bool {
    word.iter().eq(word.iter().rev())
}

/// Expansion `[b0, {period}]` where the period ends in `2·b0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicCf {
    b0: BigUint,
    period: Vec<BigUint>,
}

impl PeriodicCf {
    pub fn new(b0: BigUint, period: Vec<BigUint>) -> Result<PeriodicCf, CfError> {
        match period.last() {
            Some(last) if *last == (&b0 << 1) => Ok(PeriodicCf { b0, period }),
            _ => Err(CfError::MalformedPeriod),
        }
    }

    pub fn b0(&self) -> &BigUint {
        &self.b0
    }

    pub fn period(&self) -> &[BigUint] {
        &self.period
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// `m`, the number of period terms before the closing `2·b0`.
    pub fn m(&self) -> usize {
        self.period.len() - 1
    }

    /// Partial quotient `b_k`, cycling through the period for `k ≥ 1`.
    pub fn term(&self, k: usize) -> &BigUint {
        if k == 0 {
            &self.b0
        } else {
            &self.period[(k - 1) % self.period.len()]
        }
    }

    /// The same expansion written with the period repeated `times` times.
    pub fn repeat(&self, times: usize) -> PeriodicCf {
        assert!(times >= 1);
        let mut period = Vec::with_capacity(self.period.len() * times);
        for _ in 0..times {
            period.extend_from_slice(&self.period);
        }
        PeriodicCf {
            b0: self.b0.clone(),
            period,
        }
    }

    /// Convergent `r_k/s_k` of the infinite expansion at `k = depth`.
    pub fn convergent_at(&self, depth: usize) -> Convergent {
        let mut r_prev = BigUint::one();
        let mut r_prev2 = BigUint::zero();
        let mut s_prev = BigUint::zero();
        let mut s_prev2 = BigUint::one();
        let mut r = BigUint::zero();
        let mut s = BigUint::zero();
        for k in 0..=depth {
            let b = self.term(k);
            r = b * &r_prev + &r_prev2;
            s = b * &s_prev + &s_prev2;
            r_prev2 = std::mem::replace(&mut r_prev, r.clone());
            s_prev2 = std::mem::replace(&mut s_prev, s.clone());
        }
        Convergent { k: depth, r, s }
    }
}

impl fmt::Display for PeriodicCf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {{", self.b0)?;
        for (i, b) in self.period.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}]")
    }
}

/// Convergent `r_k/s_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub k: usize,
    pub r: BigUint,
    pub s: BigUint,
}

/// One element of the convergent stream: the partial quotient `b_k`, the
/// convergent it completes and the complete-quotient value `Q_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentStep {
    pub b: BigUint,
    pub convergent: Convergent,
    pub q_next: BigUint,
}

pub struct Convergents<'a> {
    surd: &'a Surd,
    state: QuotientState,
    r_prev: BigUint,
    r_prev2: BigUint,
    s_prev: BigUint,
    s_prev2: BigUint,
}

impl Iterator for Convergents<'_> {
    type Item = ConvergentStep;

    fn next(&mut self) -> Option<ConvergentStep> {
        let k = self.state.k;
        let (b, next) = self
            .surd
            .step(&self.state)
            .expect("complete quotient arithmetic stays exact");
        let r = &b * &self.r_prev + &self.r_prev2;
        let s = &b * &self.s_prev + &self.s_prev2;
        self.r_prev2 = std::mem::replace(&mut self.r_prev, r.clone());
        self.s_prev2 = std::mem::replace(&mut self.s_prev, s.clone());
        let q_next = next.q.clone();
        self.state = next;
        Some(ConvergentStep {
            b,
            convergent: Convergent { k, r, s },
            q_next,
        })
    }
}

/// Which parity the top index of a rational continued fraction must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Canonical,
}

/// Finite continued fraction `[c0, c1, …, c_n]` of a positive rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCf {
    terms: Vec<BigUint>,
}

impl RationalCf {
    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    /// Top index `n`.
    pub fn n(&self) -> usize {
        self.terms.len() - 1
    }

    /// Folds the terms back into a fraction `(num, den)` in lowest terms.
    pub fn as_fraction(&self) -> (BigUint, BigUint) {
        let mut num = self.terms.last().unwrap().clone();
        let mut den = BigUint::one();
        for c in self.terms.iter().rev().skip(1) {
            let next_num = c * &num + &den;
            den = std::mem::replace(&mut num, next_num);
        }
        (num, den)
    }
}

impl fmt::Display for RationalCf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Continued fraction of `num/den > 0` with the top index forced to the
/// requested parity.
///
/// The canonical (Euclidean) expansion never ends in 1, so flipping its parity
/// is always possible through the single rewrite `[…, c] → […, c - 1, 1]`, and
/// at most one rewrite is ever applied.
pub fn rational_cf(num: &BigUint, den: &BigUint, parity: Parity) -> Result<RationalCf, CfError> {
    if den.is_zero() {
        return Err(CfError::ZeroDenominator);
    }
    if num.is_zero() {
        return Err(CfError::ZeroNumerator);
    }
    let mut a = num.clone();
    let mut b = den.clone();
    let mut terms = Vec::new();
    while !b.is_zero() {
        let (c, rem) = a.div_rem(&b);
        terms.push(c);
        a = std::mem::replace(&mut b, rem);
    }
    let want_odd = match parity {
        Parity::Canonical => return Ok(RationalCf { terms }),
        Parity::Even => false,
        Parity::Odd => true,
    };
    if (terms.len() - 1) % 2 != usize::from(want_odd) {
        debug_assert!({
            let last = terms.last().unwrap();
            !last.is_zero() && (terms.len() == 1 || *last >= BigUint::from(2u32))
        });
        *terms.last_mut().unwrap() -= 1u32;
        terms.push(BigUint::one());
    }
    Ok(RationalCf { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn surd(d: u64, q: u64) -> Surd {
        Surd::new(big(d), big(q)).unwrap()
    }

    #[test]
    fn new_validates_inputs() {
        assert!(Surd::new(big(157), big(45)).is_ok());
        assert_eq!(Surd::new(big(6), big(4)), Err(CfError::NotCoprime));
        assert_eq!(Surd::new(big(4), big(1)), Err(CfError::PerfectSquare));
        assert_eq!(Surd::new(big(3), big(5)), Err(CfError::NotGreaterThanOne));
        assert_eq!(Surd::new(big(1), big(1)), Err(CfError::NotGreaterThanOne));
        assert_eq!(Surd::new(big(5), big(0)), Err(CfError::NotCoprime));
    }

    #[test]
    fn step_trace_of_sqrt_3_over_2() {
        // √(3/2): D2 = 6, ⌊√6⌋ = 2
        let s = surd(3, 2);
        let st0 = s.initial_state();
        assert_eq!((st0.p.clone(), st0.q.clone()), (big(0), big(2)));
        let (b0, st1) = s.step(&st0).unwrap();
        assert_eq!(b0, big(1));
        assert_eq!((st1.p.clone(), st1.q.clone()), (big(2), big(1)));
        let (b1, st2) = s.step(&st1).unwrap();
        assert_eq!(b1, big(4));
        assert_eq!((st2.p.clone(), st2.q.clone()), (big(2), big(2)));
        let (b2, st3) = s.step(&st2).unwrap();
        assert_eq!(b2, big(2));
        assert_eq!((st3.p.clone(), st3.q.clone()), (big(2), big(1)));
    }

    #[test]
    fn expand_sqrt_2() {
        let cf = surd(2, 1).expand().unwrap();
        assert_eq!(cf.b0(), &big(1));
        assert_eq!(cf.period(), &[big(2)]);
        assert_eq!(cf.m(), 0);
    }

    #[test]
    fn expand_sqrt_157_over_45() {
        let cf = surd(157, 45).expand().unwrap();
        assert_eq!(cf.b0(), &big(1));
        assert_eq!(cf.period_len(), 16);
        assert_eq!(cf.m(), 15);
        let want: Vec<BigUint> = [1u64, 6, 1, 1, 3, 4, 1, 32, 1, 4, 3, 1, 1, 6, 1, 2]
            .iter()
            .map(|&n| big(n))
            .collect();
        assert_eq!(cf.period(), &want[..]);
    }

    #[test]
    fn expand_sqrt_7065() {
        let cf = surd(7065, 1).expand().unwrap();
        assert_eq!(cf.b0(), &big(84));
        assert_eq!(cf.period_len(), 8);
        let want: Vec<BigUint> = [18u64, 1, 2, 18, 2, 1, 18, 168]
            .iter()
            .map(|&n| big(n))
            .collect();
        assert_eq!(cf.period(), &want[..]);
    }

    #[test]
    fn expand_respects_cap() {
        assert_eq!(
            surd(157, 45).expand_capped(2),
            Err(CfError::PeriodNotFound { cap: 2 })
        );
    }

    #[test]
    fn convergents_of_sqrt_157_over_45() {
        let s = surd(157, 45);
        let steps: Vec<ConvergentStep> = s.convergents().take(16).collect();
        assert_eq!(steps[4].convergent.r, big(28));
        assert_eq!(steps[4].convergent.s, big(15));
        assert_eq!(steps[4].q_next, big(45));
        assert_eq!(steps[15].convergent.r, big(4923521));
        assert_eq!(steps[15].convergent.s, big(2635920));
        assert_eq!(steps[15].q_next, big(45));
    }

    #[test]
    fn convergents_of_sqrt_3_over_2() {
        let s = surd(3, 2);
        let steps: Vec<ConvergentStep> = s.convergents().take(2).collect();
        assert_eq!(steps[0].convergent.r, big(1));
        assert_eq!(steps[0].convergent.s, big(1));
        assert_eq!(steps[1].convergent.r, big(5));
        assert_eq!(steps[1].convergent.s, big(4));
    }

    #[test]
    fn norm_relation_and_determinant() {
        // Q·r_k² - s_k²·D = (-1)^{k+1}·Q_{k+1} and r_k·s_{k-1} - r_{k-1}·s_k = (-1)^{k+1}
        for (d, q) in [(157u64, 45u64), (3, 2), (7065, 1), (19, 5)] {
            let s = surd(d, q);
            let (dd, qq) = (BigInt::from(s.d().clone()), BigInt::from(s.q().clone()));
            let mut r_prev = BigInt::from(1);
            let mut s_prev = BigInt::from(0);
            for step in s.convergents().take(30) {
                let k = step.convergent.k;
                let sign = if k % 2 == 0 { -1 } else { 1 };
                let r = BigInt::from(step.convergent.r.clone());
                let sk = BigInt::from(step.convergent.s.clone());
                let lhs = &qq * &r * &r - &sk * &sk * &dd;
                assert_eq!(lhs, BigInt::from(step.q_next.clone()) * sign, "norm at k={k}");
                assert_eq!(&r * &s_prev - &r_prev * &sk, BigInt::from(sign), "det at k={k}");
                r_prev = r;
                s_prev = sk;
            }
        }
    }

    #[test]
    fn rational_cf_known_values() {
        let cf = rational_cf(&big(4923521), &big(1008), Parity::Odd).unwrap();
        let want: Vec<BigUint> = [4884u64, 2, 4, 12, 4, 2].iter().map(|&n| big(n)).collect();
        assert_eq!(cf.terms(), &want[..]);
        assert_eq!(cf.n(), 5);

        let cf = rational_cf(&big(7), &big(1), Parity::Even).unwrap();
        assert_eq!(cf.terms(), &[big(7)]);
        let cf = rational_cf(&big(7), &big(1), Parity::Odd).unwrap();
        assert_eq!(cf.terms(), &[big(6), big(1)]);

        let cf = rational_cf(&big(355), &big(113), Parity::Canonical).unwrap();
        assert_eq!(cf.terms(), &[big(3), big(7), big(16)]);

        assert_eq!(
            rational_cf(&big(3), &big(0), Parity::Even),
            Err(CfError::ZeroDenominator)
        );
        assert_eq!(
            rational_cf(&big(0), &big(3), Parity::Even),
            Err(CfError::ZeroNumerator)
        );
    }

    #[test]
    fn rational_cf_round_trips() {
        for num in 1u64..60 {
            for den in 1u64..60 {
                let g = num_integer::gcd(num, den);
                for parity in [Parity::Even, Parity::Odd, Parity::Canonical] {
                    let cf = rational_cf(&big(num), &big(den), parity).unwrap();
                    assert_eq!(cf.as_fraction(), (big(num / g), big(den / g)));
                    match parity {
                        Parity::Even => assert_eq!(cf.n() % 2, 0),
                        Parity::Odd => assert_eq!(cf.n() % 2, 1),
                        Parity::Canonical => {}
                    }
                    for c in &cf.terms()[1..] {
                        assert!(!c.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn eval_periodic_known_values() {
        let cf = PeriodicCf::new(big(1), vec![big(2)]).unwrap();
        let c = cf.convergent_at(1);
        assert_eq!((c.r, c.s), (big(3), big(2)));
        let c = cf.convergent_at(3);
        assert_eq!((c.r, c.s), (big(17), big(12)));

        let period: Vec<BigUint> = [2u64, 4, 12, 4, 2, 9768].iter().map(|&n| big(n)).collect();
        let cf = PeriodicCf::new(big(4884), period).unwrap();
        let c = cf.convergent_at(5);
        assert_eq!((c.r, c.s), (big(4923521), big(1008)));
    }

    #[test]
    fn eval_periodic_matches_stream() {
        let s = surd(157, 45);
        let cf = s.expand().unwrap();
        for (k, step) in s.convergents().take(25).enumerate() {
            let c = cf.convergent_at(k);
            assert_eq!(c.r, step.convergent.r);
            assert_eq!(c.s, step.convergent.s);
        }
    }

    #[test]
    fn repeat_unrolls_period() {
        let cf = PeriodicCf::new(big(1), vec![big(2)]).unwrap();
        let cf3 = cf.repeat(3);
        assert_eq!(cf3.period(), &[big(2), big(2), big(2)]);
        assert_eq!(cf3.b0(), &big(1));
        // a repeated word still evaluates to the same expansion
        for depth in 0..8 {
            assert_eq!(cf.convergent_at(depth), cf3.convergent_at(depth));
        }
    }

    #[test]
    fn malformed_period_rejected() {
        assert_eq!(
            PeriodicCf::new(big(1), vec![big(3)]),
            Err(CfError::MalformedPeriod)
        );
        assert_eq!(PeriodicCf::new(big(1), vec![]), Err(CfError::MalformedPeriod));
    }

    #[test]
    fn display_forms() {
        assert_eq!(surd(157, 45).to_string(), "√(157/45)");
        assert_eq!(surd(7065, 1).to_string(), "√7065");
        let cf = PeriodicCf::new(big(1), vec![big(2)]).unwrap();
        assert_eq!(cf.to_string(), "[1, {2}]");
    }
}
