//! Quadratic orders attached to a surd and their units.
//!
//! A surd `√(D/Q)` determines two orders.  With `q` the smallest divisor of
//! `Q` whose square `Q` divides, put `D1 = D·q²/Q` and `D2 = D·Q`, so that
//! `D2 = D1·(Q/q)²` and `Z[√D2] ⊆ Z[√D1]`.  A unit `r + s√D1 > 1` is called
//! regular when it already lies in `Z[√D2]`, which happens exactly when `Q/q`
//! divides `s`; irregular units can only exist when `q² ≠ Q`.

use crate::arith::smallest_q;
use crate::cfrac::{CfError, Surd};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error("units must share a radicand")]
    RadicandMismatch,
    #[error("not a unit: r² - s²·N must be ±1 with r, s ≥ 1")]
    NotAUnit,
    #[error("unit is irregular, it does not lie in Z[√D2]")]
    NotRegular,
}

/// Norm of a unit, `r² - s²·N = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Plus,
    Minus,
}

impl Norm {
    pub fn as_i8(self) -> i8 {
        match self {
            Norm::Plus => 1,
            Norm::Minus => -1,
        }
    }

    fn mul(self, rhs: Norm) -> Norm {
        if self == rhs {
            Norm::Plus
        } else {
            Norm::Minus
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // f.pad honors width flags, so the value aligns in tables
        f.pad(match self {
            Norm::Plus => "+1",
            Norm::Minus => "-1",
        })
    }
}

/// A unit `r + s√N > 1` of the order `Z[√N]`, with `r, s ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadUnit {
    radicand: BigUint,
    r: BigUint,
    s: BigUint,
    norm: Norm,
}

impl QuadUnit {
    /// Validates `|r² - s²·N| = 1` and derives the norm from the values.
    pub fn new(radicand: BigUint, r: BigUint, s: BigUint) -> Result<QuadUnit, RingError> {
        if r.is_zero() || s.is_zero() {
            return Err(RingError::NotAUnit);
        }
        let lhs = &r * &r;
        let rhs = &s * &s * &radicand;
        let norm = if lhs > rhs && &lhs - &rhs == BigUint::one() {
            Norm::Plus
        } else if rhs > lhs && &rhs - &lhs == BigUint::one() {
            Norm::Minus
        } else {
            return Err(RingError::NotAUnit);
        };
        Ok(QuadUnit {
            radicand,
            r,
            s,
            norm,
        })
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn r(&self) -> &BigUint {
        &self.r
    }

    pub fn s(&self) -> &BigUint {
        &self.s
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    /// Product of two units of the same order.
    ///
    /// The result is rebuilt through [`QuadUnit::new`], so the unit equation
    /// is re-validated on every product, and norm multiplicativity is checked
    /// on top.
    pub fn mul(&self, rhs: &QuadUnit) -> Result<QuadUnit, RingError> {
        if self.radicand != rhs.radicand {
            return Err(RingError::RadicandMismatch);
        }
        let r = &self.r * &rhs.r + &self.s * &rhs.s * &self.radicand;
        let s = &self.r * &rhs.s + &self.s * &rhs.r;
        let product = QuadUnit::new(self.radicand.clone(), r, s)?;
        assert_eq!(
            product.norm,
            self.norm.mul(rhs.norm),
            "norm multiplicativity broke, this is a bug"
        );
        Ok(product)
    }

    /// `self` raised to the power `e ≥ 1`.
    pub fn pow(&self, e: u32) -> QuadUnit {
        assert!(e >= 1);
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self).expect("same radicand");
        }
        acc
    }
}

impl fmt::Display for QuadUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_one() {
            write!(f, "{} + √{}", self.r, self.radicand)
        } else {
            write!(f, "{} + {}·√{}", self.r, self.s, self.radicand)
        }
    }
}

/// Whether a unit of `Z[√D1]` lies in the smaller order `Z[√D2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitClass {
    Regular,
    Irregular,
}

/// The pair of orders `Z[√D1] ⊇ Z[√D2]` attached to `√(D/Q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingContext {
    surd: Surd,
    small_q: BigUint,
    d1: BigUint,
    d2: BigUint,
}

impl RingContext {
    pub fn new(d: BigUint, q: BigUint) -> Result<RingContext, RingError> {
        let surd = Surd::new(d, q)?;
        let small_q = smallest_q(surd.q()).expect("Q ≥ 1");
        let (d1, rem) = (surd.d() * &small_q * &small_q).div_rem(surd.q());
        debug_assert!(rem.is_zero(), "Q divides D·q² by choice of q");
        let d2 = surd.d2().clone();
        debug_assert_eq!(&d1 * (surd.q() / &small_q).pow(2), d2);
        Ok(RingContext {
            surd,
            small_q,
            d1,
            d2,
        })
    }

    pub fn surd(&self) -> &Surd {
        &self.surd
    }

    /// The smallest divisor `q` of `Q` with `Q | q²`.
    pub fn small_q(&self) -> &BigUint {
        &self.small_q
    }

    /// `D1 = D·q²/Q`, radicand of the large order.
    pub fn d1(&self) -> &BigUint {
        &self.d1
    }

    /// `D2 = D·Q`, radicand of the small order.
    pub fn d2(&self) -> &BigUint {
        &self.d2
    }

    /// `Q/q`; a unit `r + s√D1` is regular exactly when this divides `s`.
    pub fn cofactor(&self) -> BigUint {
        self.surd.q() / &self.small_q
    }

    pub fn classify(&self, unit: &QuadUnit) -> Result<UnitClass, RingError> {
        if unit.radicand() != &self.d1 {
            return Err(RingError::RadicandMismatch);
        }
        if (unit.s() % self.cofactor()).is_zero() {
            Ok(UnitClass::Regular)
        } else {
            Ok(UnitClass::Irregular)
        }
    }

    /// Rewrites a regular unit `r + s√D1` as `r + (s·q/Q)·√D2`.
    pub fn rewrite_in_d2(&self, unit: &QuadUnit) -> Result<QuadUnit, RingError> {
        match self.classify(unit)? {
            UnitClass::Regular => {}
            UnitClass::Irregular => return Err(RingError::NotRegular),
        }
        let s2 = unit.s() * &self.small_q / self.surd.q();
        QuadUnit::new(self.d2.clone(), unit.r().clone(), s2)
    }
}

/// Fundamental unit of `Z[√N]`: the smallest unit `> 1`, read off the
/// expansion of `√N` as `r_m + s_m·√N` with norm `(-1)^{m+1}`.
pub fn fundamental_unit(n: &BigUint) -> Result<QuadUnit, RingError> {
    let surd = Surd::new(n.clone(), BigUint::one())?;
    let cf = surd.expand()?;
    let c = cf.convergent_at(cf.m());
    let unit = QuadUnit::new(n.clone(), c.r, c.s)?;
    let expected = if cf.m() % 2 == 0 {
        Norm::Minus
    } else {
        Norm::Plus
    };
    assert_eq!(unit.norm(), expected, "norm disagrees with period parity");
    Ok(unit)
}
