//! Exact integer helpers: floor square roots, squareness, trial-division
//! factorization and p-adic valuations.
//!
//! Everything here is desk scale: factorization is plain trial division and is
//! meant for the denominators and divisors that show up in surd work, not for
//! cryptographic sizes.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("argument must be nonzero")]
    ZeroArgument,
}

/// Floor of the square root, `⌊√n⌋`, by Newton iteration.
///
/// The iterate starts at a power of two above `√n` and decreases monotonically;
/// a final correction clamp guards the floor property exactly.
pub fn isqrt(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let one = BigUint::one();
    // 2^⌈bits/2⌉ ≥ √n
    let mut x: BigUint = &one << n.bits().div_ceil(2);
    loop {
        let next = (&x + n / &x) >> 1;
        if next >= x {
            break;
        }
        x = next;
    }
    while &x * &x > *n {
        x -= &one;
    }
    while (&x + &one) * (&x + &one) <= *n {
        x += &one;
    }
    x
}

/// True when `n` is a perfect square.
pub fn is_square(n: &BigUint) -> bool {
    let r = isqrt(n);
    &r * &r == *n
}

/// Prime factorization as `(prime, exponent)` pairs with primes ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(BigUint, u32)] {
        &self.pairs
    }

    /// Multiplies the factorization back together.
    pub fn product(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &self.pairs {
            acc *= p.pow(*e);
        }
        acc
    }

    /// Exponent of `p`, zero when `p` does not occur.
    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.pairs
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

/// Factors `n ≥ 1` by trial division up to `√n`.
pub fn factorize(n: &BigUint) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let mut rest = n.clone();
    let mut pairs = Vec::new();
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let mut d = two.clone();
    while &d * &d <= rest {
        if (&rest % &d).is_zero() {
            let mut e = 0u32;
            while (&rest % &d).is_zero() {
                rest /= &d;
                e += 1;
            }
            pairs.push((d.clone(), e));
        }
        d += if d == two { &one } else { &two };
    }
    if rest > one {
        pairs.push((rest, 1));
    }
    Ok(Factorization { pairs })
}

/// Smallest divisor `q` of `n` such that `n` divides `q²`.
///
/// From `n = ∏ p^e` this is `∏ p^⌈e/2⌉`; it equals `√n` exactly when `n` is a
/// perfect square.
pub fn smallest_q(n: &BigUint) -> Result<BigUint, ArithError> {
    let mut acc = BigUint::one();
    for (p, e) in factorize(n)?.pairs() {
        acc *= p.pow(e.div_ceil(2));
    }
    Ok(acc)
}

/// Largest `e` with `p^e` dividing `n`, for `n ≠ 0` and prime `p`.
pub fn valuation(n: &BigUint, p: &BigUint) -> Result<u32, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    debug_assert!(*p >= BigUint::from(2u32));
    let mut rest = n.clone();
    let mut e = 0u32;
    while (&rest % p).is_zero() {
        rest /= p;
        e += 1;
    }
    Ok(e)
}
