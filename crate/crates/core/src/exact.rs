//! Exact integer combinatorics used throughout the propagator sums.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multinomial coefficient `(sum parts)! / prod parts!`.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0u64;
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// Lossy conversion that stays finite far beyond f64's integer range by
/// going through the natural log when the value is large.
pub fn to_f64(v: &BigUint) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)
}

/// Natural log of a positive big integer.
pub fn ln(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 52 {
        return to_f64(v).ln();
    }
    let shift = bits - 52;
    let mantissa = to_f64(&(v >> shift));
    mantissa.ln() + (shift as f64) * std::f64::consts::LN_2
}
