//! Arbitrary-precision number-theoretic primitives.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;
use thiserror::Error;

/// Default trial-division bound used by [`squarefree_reduce`].
pub const DEFAULT_EFFORT_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberTheoryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{a} is not invertible modulo {modulus}")]
    NotInvertible { a: BigInt, modulus: BigInt },
}

type Result<T> = std::result::Result<T, NumberTheoryError>;

/// Extended Euclid: returns `(g, s, t)` with `g = gcd(a, b) > 0` and
/// `s·a + t·b = g`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(NumberTheoryError::InvalidInput("ext_gcd(0, 0) is undefined".into()));
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

/// Inverse of `a` modulo `modulus`, in `[0, modulus)`.
pub fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    if !modulus.is_positive() {
        return Err(NumberTheoryError::InvalidInput(format!("modulus {modulus} must be positive")));
    }
    let (g, s, _) = ext_gcd(&a.mod_floor(modulus), modulus)
        .map_err(|_| NumberTheoryError::NotInvertible { a: a.clone(), modulus: modulus.clone() })?;
    if !g.is_one() {
        return Err(NumberTheoryError::NotInvertible { a: a.clone(), modulus: modulus.clone() });
    }
    Ok(s.mod_floor(modulus))
}

/// `c^e mod modulus` by square-and-multiply; `c` may be negative.
///
/// # Panics
/// If `modulus` is not positive.
pub fn pow_mod(c: &BigInt, e: &BigUint, modulus: &BigInt) -> BigInt {
    assert!(modulus.is_positive(), "pow_mod needs a positive modulus");
    let base = c.mod_floor(modulus);
    base.modpow(&BigInt::from(e.clone()), modulus)
}

/// Outcome of the gcd test that drives the odd-modulus algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoprimeSplit {
    /// `N = first · second` with both factors `> 1` and coprime.
    Split(BigInt, BigInt),
    /// `gcd(N, c) = 1`.
    Coprime,
    /// `c` is divisible by every prime factor of `N`.
    AllFactors,
}

/// Looks for a coprime factorization of `n` exposed by `c`, via
/// `g = gcd(N, c^⌈log₂N⌉ mod N)`.
///
/// If `c` shares some but not all primes with `N`, then `g` collects the full
/// prime-power parts of the shared primes and `(g, N/g)` is returned.
pub fn coprime_split(n: &BigInt, c: &BigInt) -> Result<CoprimeSplit> {
    if n < &BigInt::from(2) {
        return Err(NumberTheoryError::InvalidInput(format!("coprime_split needs N >= 2, got {n}")));
    }
    // gcd(N, c) = 1 iff gcd(N, c^e) = 1; skip the exponentiation in that case.
    if c.gcd(n).is_one() {
        return Ok(CoprimeSplit::Coprime);
    }
    let e = BigUint::from((n - 1u32).bits());
    let g = pow_mod(c, &e, n).gcd(n);
    if g == *n {
        return Ok(CoprimeSplit::AllFactors);
    }
    let cofactor = n / &g;
    assert!(
        g.gcd(&cofactor).is_one(),
        "gcd(N, c^⌈log2 N⌉) must absorb whole prime powers (N = {n}, c = {c})"
    );
    Ok(CoprimeSplit::Split(g, cofactor))
}

fn low_u64(x: &BigUint) -> u64 {
    x.iter_u64_digits().next().unwrap_or(0)
}

/// Jacobi symbol `(a / b)` for odd `b >= 1`, by binary reciprocity.
/// `(a / 1) = 1` for every `a`, including `a = 0`.
pub fn jacobi(a: &BigInt, b: &BigInt) -> Result<i8> {
    if !b.is_positive() || b.is_even() {
        return Err(NumberTheoryError::InvalidInput(format!(
            "Jacobi symbol needs an odd positive lower argument, got {b}"
        )));
    }
    let mut b = b.magnitude().clone();
    let mut a = a.mod_floor(&BigInt::from(b.clone())).into_parts().1;
    let mut sign = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz % 2 == 1 && matches!(low_u64(&b) & 7, 3 | 5) {
            sign = -sign;
        }
        a >>= tz;
        if low_u64(&a) & 3 == 3 && low_u64(&b) & 3 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut b);
        a %= &b;
    }
    Ok(if b.is_one() { sign } else { 0 })
}

fn sieve(bound: u64) -> Vec<u32> {
    let bound = bound.min(u32::MAX as u64) as usize;
    if bound < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; bound];
    let mut primes = Vec::new();
    for i in 2..bound {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j < bound {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn primes_below(bound: u64) -> std::borrow::Cow<'static, [u32]> {
    static DEFAULT: OnceLock<Vec<u32>> = OnceLock::new();
    if bound == DEFAULT_EFFORT_BOUND {
        std::borrow::Cow::Borrowed(DEFAULT.get_or_init(|| sieve(DEFAULT_EFFORT_BOUND)).as_slice())
    } else {
        std::borrow::Cow::Owned(sieve(bound))
    }
}

fn rem_small(digits: &[u64], p: u64) -> u64 {
    digits
        .iter()
        .rev()
        .fold(0u128, |r, &d| ((r << 64) | d as u128) % p as u128) as u64
}

/// Splits `r = s²·r′` by trial division with primes below `effort_bound`
/// followed by a perfect-square test on the unfactored remainder.
///
/// `r′` has no square prime factor below the bound and is not a perfect
/// square; it is squarefree whenever `r < effort_bound³`.
pub fn squarefree_reduce(r: &BigUint, effort_bound: u64) -> (BigUint, BigUint) {
    if r.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut square_root = BigUint::one();
    let mut kept = BigUint::one();
    let mut rest = r.clone();
    let mut digits: Vec<u64> = rest.iter_u64_digits().collect();
    for &p in primes_below(effort_bound).iter() {
        let p = p as u64;
        if rest.bits() <= 64 {
            let small = low_u64(&rest);
            if (small as u128) < (p as u128) * (p as u128) {
                break;
            }
        }
        if rem_small(&digits, p) != 0 {
            continue;
        }
        let mut exponent = 0u32;
        loop {
            let (q, rem) = rest.div_rem(&BigUint::from(p));
            if !rem.is_zero() {
                break;
            }
            rest = q;
            exponent += 1;
        }
        square_root *= BigUint::from(p).pow(exponent / 2);
        if exponent % 2 == 1 {
            kept *= p;
        }
        digits = rest.iter_u64_digits().collect();
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        square_root *= root;
        rest = BigUint::one();
    }
    (square_root, kept * rest)
}

/// `ν₂(n)` and the odd part of a positive `n`.
pub fn split_two_power(n: &BigInt) -> (u64, BigInt) {
    debug_assert!(n.is_positive());
    let k = n.trailing_zeros().unwrap_or(0);
    (k, n >> k)
}

/// Whether `q = p^t` for a prime `p` and `t >= 1`, by trial division.
/// Returns `(p, t)` when it is.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let mut rest = q;
    let mut t = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        t += 1;
    }
    (rest == 1).then_some((p, t))
}

/// Conversion helper for callers that know a value fits in `u64`.
pub fn to_u64(n: &BigInt) -> Option<u64> {
    match n.sign() {
        Sign::Minus => None,
        _ => n.to_u64(),
    }
}
