//! Factorials, primorials, primality, factorization and the general bounds
//! on straight-line complexity.

mod factor;
mod prime;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

pub(crate) use factor::rem_digits;
pub use factor::{divisors, factorize, FactorBudget, FactoredInteger, DEFAULT_TRIAL_LIMIT};
pub use prime::{is_prime, is_prime_u64, primes_up_to};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Product of all primes `<= p`.
pub fn primorial(p: u64) -> Result<BigUint, NumTheoryError> {
    if p < 2 {
        return Err(NumTheoryError::InvalidInput(format!(
            "primorial needs p >= 2, got {p}"
        )));
    }
    Ok(primes_up_to(p)
        .into_iter()
        .fold(BigUint::one(), |acc, q| acc * q))
}

/// General bounds `(lower, upper)` on the straight-line complexity of `n`.
///
/// `lower` is the least `k >= 1` with `n <= 2^(2^(k-1))`, the largest value
/// a length-`k` program reaches; it equals `k + 1` at `n = 2^(2^k)`.
/// `upper` is `floor(2 log2 n)`, from building powers of two and summing the
/// binary expansion.
pub fn tau_bounds(n: &BigUint) -> Result<(u32, u32), NumTheoryError> {
    if n < &BigUint::from(2u8) {
        return Err(NumTheoryError::InvalidInput(format!(
            "complexity bounds need n >= 2, got {n}"
        )));
    }
    let need = (n - 1u8).bits();
    let mut lower = 1u32;
    while (1u64 << (lower - 1)) < need {
        lower += 1;
    }
    let upper = ((n * n).bits() - 1) as u32;
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(5), BigUint::from(120u8));
        assert_eq!(
            factorial(22),
            "1124000727777607680000".parse::<BigUint>().unwrap()
        );
        for n in 1..40u64 {
            assert_eq!(factorial(n), factorial(n - 1) * n);
        }
    }

    #[test]
    fn factorial_22_by_repeated_multiplication() {
        let mut acc = 1u128;
        for k in 1..=22u128 {
            acc *= k;
        }
        assert_eq!(factorial(22).to_u128(), Some(acc));
    }

    #[test]
    fn primorials() {
        assert_eq!(primorial(2).unwrap(), BigUint::from(2u8));
        assert_eq!(primorial(7).unwrap(), BigUint::from(210u8));
        assert_eq!(primorial(8).unwrap(), BigUint::from(210u8));
        assert_eq!(
            primorial(23).unwrap(),
            BigUint::from(2u64 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23)
        );
        assert_eq!(primorial(23).unwrap(), BigUint::from(223_092_870u64));
        assert!(primorial(1).is_err());
        assert_eq!(primorial(29).unwrap(), primorial(23).unwrap() * 29u8);
    }

    #[test]
    fn bounds() {
        assert_eq!(tau_bounds(&BigUint::from(2u8)).unwrap(), (1, 2));
        assert_eq!(tau_bounds(&BigUint::from(256u32)).unwrap().0, 4);
        assert_eq!(tau_bounds(&BigUint::from(257u32)).unwrap().0, 5);
        for k in 0..8u32 {
            let n = BigUint::one() << (1u64 << k);
            assert_eq!(tau_bounds(&n).unwrap().0, k + 1, "2^(2^{k})");
        }
        // floor(2 log2 n): 3 -> 3, 4 -> 4, 5 -> 4.
        assert_eq!(tau_bounds(&BigUint::from(3u8)).unwrap().1, 3);
        assert_eq!(tau_bounds(&BigUint::from(4u8)).unwrap().1, 4);
        assert_eq!(tau_bounds(&BigUint::from(5u8)).unwrap().1, 4);
        assert!(tau_bounds(&BigUint::one()).is_err());
    }

    #[test]
    fn bounds_match_float_formula_on_smooth_range() {
        for n in 2..5000u64 {
            let (lo, hi) = tau_bounds(&BigUint::from(n)).unwrap();
            let lg = (n as f64).log2();
            // Away from exact powers the float formula is unambiguous.
            let float_lo = (lg.log2() + 1.0).ceil() as u32;
            if (lg.log2() + 1.0).fract() > 1e-9 {
                assert_eq!(lo, float_lo.max(1), "n={n}");
            }
            if (2.0 * lg).fract() > 1e-9 {
                assert_eq!(hi, (2.0 * lg).floor() as u32, "n={n}");
            }
        }
    }
}
