//! Continued fractions of quadratic surds `√(D/Q)` and units of quadratic orders.
//!
//! For coprime naturals `D > Q ≥ 1` with `D·Q` not a perfect square, the
//! expansion of `√(D/Q)` is periodic of the shape `[b0, {b1, …, b_m, 2·b0}]`
//! with `(b1, …, b_m)` a palindrome.  Writing `q` for the smallest divisor of
//! `Q` whose square `Q` divides, the surd drags two quadratic orders along:
//! `Z[√D1]` with `D1 = D·q²/Q` and `Z[√D2]` with `D2 = D·Q`.  Units of both
//! orders show up as convergents `r_k/s_k` of `√(D/Q)`, and the units of
//! `Z[√D2]` are exactly the convergents at the last index of each period.
//!
//! The crate computes the expansions and the unit groups ([`cfrac`],
//! [`rings`]), and machine-checks the convergent/unit correspondences on any
//! given surd or over exhaustive ranges ([`theorems`]).
//!
//! Everything is exact big-integer arithmetic; no floating point is involved.

pub mod arith;
pub mod cfrac;
pub mod rings;
pub mod theorems;

pub use cfrac::{Convergent, ConvergentStep, Parity, PeriodicCf, RationalCf, Surd};
pub use rings::{fundamental_unit, Norm, QuadUnit, RingContext, UnitClass};
pub use theorems::sweep::{
    admissible_pairs, sweep, CheckKind, NullSink, QPolicy, ReportSink, SweepConfig, SweepReport,
    SweepRow, SweepStats,
};
pub use theorems::{
    link_unit, shift_by_period, unit_ladder, verify_convergent_match, verify_period_end_units,
    verify_scaled_expansion, verify_stream_invariants, ConvergentMatch, LadderRung, MatchEntry,
    PeriodEndUnit, ScaledExpansion, TheoremError, UnitConvergentLink, UnitLadder,
};
