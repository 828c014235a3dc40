//! Randomized invariant checks for the arithmetic layer and the expansion
//! engine.  Everything here is a structural property that must hold for any
//! input, not a frozen example.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use surdcf::arith::{factorize, is_square, isqrt, smallest_q, valuation};
use surdcf::cfrac::{rational_cf, Parity};
use surdcf::{fundamental_unit, verify_stream_invariants, ConvergentStep, Surd};

fn big(n: u128) -> BigUint {
    BigUint::from(n)
}

/// Admissible surd inputs: coprime D > Q ≥ 1 with D·Q not a square.
fn admissible() -> impl Strategy<Value = (u64, u64)> {
    (2u64..2000, 1u64..2000)
        .prop_map(|(d, q)| (d.max(q + 1), q))
        .prop_filter("coprime and nonsquare", |&(d, q)| {
            let prod = BigUint::from(d) * q;
            d.gcd(&q) == 1 && !is_square(&prod)
        })
}

proptest! {
    #[test]
    fn isqrt_brackets_its_argument(n in any::<u128>()) {
        let n = big(n);
        let root = isqrt(&n);
        prop_assert!(&root * &root <= n);
        let next = &root + 1u32;
        prop_assert!(&next * &next > n);
    }

    #[test]
    fn squares_are_recognized(n in any::<u64>()) {
        let n = big(u128::from(n));
        prop_assert!(is_square(&(&n * &n)));
        if n >= big(2) {
            // n² < n²+1 < (n+1)², so n²+1 cannot be a square
            prop_assert!(!is_square(&(&n * &n + 1u32)));
        }
    }

    #[test]
    fn factorization_recomposes(n in 1u64..200_000) {
        let n = big(u128::from(n));
        let f = factorize(&n).unwrap();
        prop_assert_eq!(f.product(), n);
        let mut last = BigUint::zero();
        for (p, e) in f.pairs() {
            prop_assert!(*p > last, "primes out of order");
            prop_assert!(*e >= 1);
            // p admits no divisor in 2..p
            let mut d = big(2);
            while &d * &d <= *p {
                prop_assert!(!(p % &d).is_zero(), "{p} is not prime");
                d += 1u32;
            }
            last = p.clone();
        }
    }

    #[test]
    fn smallest_q_is_minimal(q in 1u64..5000) {
        let q = big(u128::from(q));
        let small = smallest_q(&q).unwrap();
        prop_assert!((&small * &small % &q).is_zero());
        let mut c = BigUint::one();
        while c < small {
            prop_assert!(!(&c * &c % &q).is_zero(), "smaller candidate {c}");
            c += 1u32;
        }
    }

    #[test]
    fn valuation_is_exact(n in 1u64..1_000_000, p_pick in 0usize..4) {
        let p = big([2u128, 3, 5, 7][p_pick]);
        let n = big(u128::from(n));
        let v = valuation(&n, &p).unwrap();
        prop_assert!((&n % p.pow(v)).is_zero());
        prop_assert!(!(&n % p.pow(v + 1)).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // covers the closing 2·b0 term, the palindrome, the state bounds, the
    // norm relation and the determinant in one pass over two periods
    #[test]
    fn expansion_invariants_hold((d, q) in admissible()) {
        let surd = Surd::new(big(u128::from(d)), big(u128::from(q))).unwrap();
        let cf = surd.expand().unwrap();
        let steps: Vec<ConvergentStep> =
            surd.convergents().take(2 * cf.period_len()).collect();
        verify_stream_invariants(&surd, &cf, &steps).unwrap();
    }

    #[test]
    fn closed_form_convergents_match_streaming((d, q) in admissible()) {
        let surd = Surd::new(big(u128::from(d)), big(u128::from(q))).unwrap();
        let cf = surd.expand().unwrap();
        for (depth, step) in surd.convergents().take(12).enumerate() {
            let closed = cf.convergent_at(depth);
            prop_assert_eq!(closed.r, step.convergent.r);
            prop_assert_eq!(closed.s, step.convergent.s);
        }
    }

    #[test]
    fn rational_cf_round_trips(num in 0u64..1_000_000, den in 1u64..10_000, pick in 0usize..3) {
        let parity = [Parity::Canonical, Parity::Even, Parity::Odd][pick];
        let num = big(u128::from(num));
        let den = big(u128::from(den));
        let cf = rational_cf(&num, &den, parity).unwrap();
        let (top, bottom) = cf.as_fraction();
        prop_assert_eq!(&top * &den, &num * &bottom);
        match parity {
            Parity::Even => prop_assert_eq!(cf.n() % 2, 0),
            Parity::Odd => prop_assert_eq!(cf.n() % 2, 1),
            Parity::Canonical => {
                if cf.n() >= 1 {
                    prop_assert!(*cf.terms().last().unwrap() >= big(2));
                }
            }
        }
        for term in &cf.terms()[1..] {
            prop_assert!(*term >= BigUint::one());
        }
    }

    #[test]
    fn unit_powers_multiply(n in 2u64..300, a in 1u32..4, b in 1u32..4) {
        let n = big(u128::from(n));
        if is_square(&n) {
            return Ok(());
        }
        let eps = fundamental_unit(&n).unwrap();
        let left = eps.pow(a).mul(&eps.pow(b)).unwrap();
        let right = eps.pow(a + b);
        prop_assert_eq!(left.r(), right.r());
        prop_assert_eq!(left.s(), right.s());
        prop_assert_eq!(left.norm(), right.norm());
        // the norm of a power is the power of the norm
        let sign = eps.norm().as_i8().pow(a + b);
        prop_assert_eq!(right.norm().as_i8(), sign.signum());
    }
}
