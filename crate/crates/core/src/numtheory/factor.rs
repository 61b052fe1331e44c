//! Integer factorization: trial division followed by Brent's variant of
//! Pollard rho, under a per-value time budget.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::prime::{gcd_u64, is_prime, mul_mod, primes_up_to};

pub const DEFAULT_TRIAL_LIMIT: u64 = 1_000_000;

/// Limits for [`factorize`].
#[derive(Debug, Clone, Copy)]
pub struct FactorBudget {
    /// Trial division covers primes below this bound (at most 10^6).
    pub trial_limit: u64,
    /// Wall-clock allowance for the rho phase of one value.
    pub time: Duration,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: DEFAULT_TRIAL_LIMIT,
            time: Duration::from_secs(10),
        }
    }
}

impl FactorBudget {
    pub fn with_time(time: Duration) -> Self {
        FactorBudget {
            time,
            ..Default::default()
        }
    }
}

/// `value = prod(p^e for factors) * prod(unfactored)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub value: BigUint,
    pub factors: BTreeMap<BigUint, u32>,
    /// Composite cofactors the budget ran out on.
    pub unfactored: Vec<BigUint>,
    pub complete: bool,
}

impl FactoredInteger {
    /// Number of divisors; a lower bound when incomplete.
    pub fn divisor_count(&self) -> u64 {
        let atoms = self.unfactored.len() as u32;
        self.factors
            .values()
            .map(|e| u64::from(*e) + 1)
            .product::<u64>()
            * (1u64 << atoms)
    }
}

fn trial_primes(limit: u64) -> &'static [u64] {
    static DEFAULT: OnceLock<Vec<u64>> = OnceLock::new();
    let primes = DEFAULT.get_or_init(|| primes_up_to(DEFAULT_TRIAL_LIMIT));
    let end = primes.partition_point(|p| *p < limit);
    &primes[..end]
}

/// Remainder of a little-endian `u64` digit string modulo a small `m`.
pub(crate) fn rem_digits(digits: &[u64], m: u64) -> u64 {
    digits
        .iter()
        .rev()
        .fold(0u128, |acc, d| ((acc << 64) | u128::from(*d)) % u128::from(m)) as u64
}

/// Factors `x`. Deterministic: rho uses fixed starting points and constants.
/// Zero cannot be factored and is returned as unfactored.
pub fn factorize(x: &BigUint, budget: &FactorBudget) -> FactoredInteger {
    let mut factors: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut unfactored = Vec::new();
    if x.is_zero() {
        return FactoredInteger {
            value: x.clone(),
            factors,
            unfactored: vec![x.clone()],
            complete: false,
        };
    }

    let mut n = x.clone();
    let twos = n.trailing_zeros().unwrap_or(0);
    if twos > 0 {
        factors.insert(BigUint::from(2u8), twos as u32);
        n >>= twos;
    }

    let mut checked_prime = false;
    let mut digits = n.to_u64_digits();
    for (i, &p) in trial_primes(budget.trial_limit).iter().enumerate().skip(1) {
        if n.is_one() {
            break;
        }
        if let Some(small) = n.to_u64() {
            if p.saturating_mul(p) > small {
                break;
            }
            if small % p == 0 {
                let mut e = 0;
                let mut s = small;
                while s % p == 0 {
                    s /= p;
                    e += 1;
                }
                factors.insert(BigUint::from(p), e);
                n = BigUint::from(s);
                checked_prime = false;
            }
        } else {
            if rem_digits(&digits, p) == 0 {
                let mut e = 0;
                let bp = BigUint::from(p);
                loop {
                    let (q, r) = n.div_rem(&bp);
                    if !r.is_zero() {
                        break;
                    }
                    n = q;
                    e += 1;
                }
                factors.insert(bp, e);
                digits = n.to_u64_digits();
                checked_prime = false;
            }
            // A large prime cofactor would otherwise walk the whole table.
            if !checked_prime && i >= 168 {
                if is_prime(&n) {
                    break;
                }
                checked_prime = true;
            }
        }
    }

    if !n.is_one() {
        let deadline = Instant::now() + budget.time;
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_prime(&m) {
                *factors.entry(m).or_insert(0) += 1;
                continue;
            }
            match split(&m, deadline) {
                Some(d) => {
                    let other = &m / &d;
                    stack.push(d);
                    stack.push(other);
                }
                None => unfactored.push(m),
            }
        }
    }

    unfactored.sort();
    let complete = unfactored.is_empty();
    FactoredInteger {
        value: x.clone(),
        factors,
        unfactored,
        complete,
    }
}

/// A nontrivial factor of composite `n`, or `None` past the deadline.
fn split(n: &BigUint, deadline: Instant) -> Option<BigUint> {
    if let Some(small) = n.to_u64() {
        return split_u64(small, deadline).map(BigUint::from);
    }
    for c in 1u64.. {
        if Instant::now() > deadline {
            return None;
        }
        if let Some(d) = brent_big(n, &BigUint::from(c), deadline) {
            return Some(d);
        }
    }
    None
}

fn split_u64(n: u64, deadline: Instant) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1u64.. {
        if Instant::now() > deadline {
            return None;
        }
        if let Some(d) = brent_u64(n, c, deadline) {
            return Some(d);
        }
    }
    None
}

const BATCH: u64 = 128;

fn brent_u64(n: u64, c: u64, deadline: Instant) -> Option<u64> {
    let f = |y: u64| ((u128::from(mul_mod(y, y, n)) + u128::from(c)) % u128::from(n)) as u64;
    let (mut y, mut x, mut ys) = (2u64, 2u64, 2u64);
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += BATCH;
        }
        r *= 2;
        if g == 1 && Instant::now() > deadline {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &BigUint, c: &BigUint, deadline: Instant) -> Option<BigUint> {
    let f = |y: &BigUint| (y * y + c) % n;
    let abs_diff = |a: &BigUint, b: &BigUint| if a >= b { a - b } else { b - a };
    let two = BigUint::from(2u8);
    let (mut y, mut x, mut ys) = (two.clone(), two.clone(), two);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = (&q * abs_diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
        if g.is_one() && Instant::now() > deadline {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// All positive divisors, ascending. For an incomplete factorization the
/// unfactored cofactors are treated as atoms, giving a subset of the true
/// divisor set.
pub fn divisors(f: &FactoredInteger) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    let atoms = f
        .factors
        .iter()
        .map(|(p, e)| (p, *e))
        .chain(f.unfactored.iter().map(|c| (c, 1)));
    for (p, e) in atoms {
        let base = out.clone();
        let mut power = BigUint::one();
        for _ in 0..e {
            power *= p;
            out.extend(base.iter().map(|d| d * &power));
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(f: &FactoredInteger) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &f.factors {
            acc *= p.pow(*e);
        }
        for c in &f.unfactored {
            acc *= c;
        }
        acc
    }

    fn fac(x: u128) -> FactoredInteger {
        factorize(&BigUint::from(x), &FactorBudget::default())
    }

    #[test]
    fn factors_65520() {
        let f = fac(65_520);
        assert!(f.complete);
        let expected: BTreeMap<BigUint, u32> = [(2u32, 4u32), (3, 2), (5, 1), (7, 1), (13, 1)]
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        assert_eq!(f.factors, expected);
    }

    #[test]
    fn trivial_inputs() {
        let one = fac(1);
        assert!(one.complete && one.factors.is_empty());
        let two128 = factorize(&(BigUint::one() << 128u32), &FactorBudget::default());
        assert!(two128.complete);
        assert_eq!(two128.factors.len(), 1);
        assert_eq!(two128.factors[&BigUint::from(2u8)], 128);
    }

    #[test]
    fn rho_splits_beyond_trial_range() {
        // Two primes above the trial-division bound.
        let p = 1_000_003u128;
        let q = 2_147_483_647u128;
        let f = fac(p * q * 97);
        assert!(f.complete);
        assert_eq!(f.factors.len(), 3);
        assert_eq!(product(&f), BigUint::from(p * q * 97));

        let big = (BigUint::one() << 89u32) - 1u32; // prime
        let x = &big * BigUint::from(p * q);
        let f = factorize(&x, &FactorBudget::default());
        assert!(f.complete);
        assert!(f.factors.contains_key(&big));
        assert_eq!(product(&f), x);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        // Product of two 61-bit primes; no time for rho.
        let a = BigUint::from(2_305_843_009_213_693_951u64);
        let b = BigUint::from(2_305_843_009_213_693_921u64);
        let budget = FactorBudget {
            trial_limit: 1000,
            time: Duration::ZERO,
        };
        let x = &a * &b;
        let f = factorize(&x, &budget);
        if !f.complete {
            assert_eq!(f.unfactored, vec![x.clone()]);
            assert_eq!(divisors(&f), vec![BigUint::one(), x.clone()]);
        }
        assert_eq!(product(&f), x);
    }

    #[test]
    fn divisor_lists() {
        let d: Vec<u64> = divisors(&fac(12)).iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        let d: Vec<u64> = divisors(&fac(101)).iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 101]);
        // Brute-force scan of 65520 finds 120 divisors.
        let brute = (1..=65_520u64).filter(|d| 65_520 % d == 0).count();
        assert_eq!(brute, 120);
        assert_eq!(divisors(&fac(65_520)).len(), 120);
        assert_eq!(fac(65_520).divisor_count(), 120);
    }
}
