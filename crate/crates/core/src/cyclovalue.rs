//! Exact single-term values `r · √R · e^{2πiθ}`.
//!
//! Every value produced by the solver and by closed-form Gauss sums is a
//! product of integers, dyadic fractions, roots of unity and square roots,
//! so one canonical term (or zero) is enough to represent it exactly.
//! The canonical form keeps `r` a reduced nonnegative fraction, `R` free of
//! small square factors and not a perfect square, and `θ ∈ [0, 1)` reduced.

use crate::ntheory::{squarefree_reduce, DEFAULT_EFFORT_BOUND};
use crate::Complex64;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::Mul;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("scale denominator must be nonzero")]
    ZeroDenominator,
}

/// A nonzero canonical term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    coeff: Ratio<BigUint>,
    radicand: BigUint,
    phase: Ratio<BigUint>,
}

impl Term {
    /// Rational coefficient `r > 0`.
    pub fn coeff(&self) -> &Ratio<BigUint> {
        &self.coeff
    }

    /// Radicand `R >= 1`.
    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    /// Phase `θ ∈ [0, 1)` in turns.
    pub fn phase(&self) -> &Ratio<BigUint> {
        &self.phase
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolicValue {
    Zero,
    Term(Term),
}

/// Result of [`SymbolicValue::compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueEquality {
    StructurallyEqual,
    /// Canonical forms differ but radicands are too large for the
    /// squarefree reduction to be conclusive and the values agree to 1e-9.
    NumericallyEqual,
    NotEqual,
}

/// Split magnitude/phase approximation of a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    /// `log10 |v|`, `-∞` for zero.
    pub log10_mag: f64,
    /// Argument in turns, in `[0, 1)`.
    pub phase_turns: f64,
    /// The value itself when its magnitude fits in an `f64`.
    pub complex: Option<Complex64>,
}

fn reduce_phase(phase: Ratio<BigUint>) -> Ratio<BigUint> {
    let (num, den) = phase.into();
    Ratio::new(num % &den, den)
}

fn log10_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        if let Some(f) = x.to_f64() {
            return f.log10();
        }
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// Product of nonnegative rationals. Integral operands skip the gcd
/// normalization, whose cost would otherwise grow quadratically with the size
/// of an accumulated coefficient.
fn ratio_mul(a: &Ratio<BigUint>, b: &Ratio<BigUint>) -> Ratio<BigUint> {
    if a.is_integer() && b.is_integer() {
        Ratio::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

impl SymbolicValue {
    pub fn zero() -> Self {
        SymbolicValue::Zero
    }

    pub fn one() -> Self {
        SymbolicValue::Term(Term {
            coeff: Ratio::one(),
            radicand: BigUint::one(),
            phase: Ratio::zero(),
        })
    }

    /// Builds and canonicalizes `coeff · √radicand · e^{2πi·phase}`.
    pub fn term(coeff: Ratio<BigUint>, radicand: BigUint, phase: Ratio<BigUint>) -> Self {
        if coeff.is_zero() || radicand.is_zero() {
            return SymbolicValue::Zero;
        }
        let (square, radicand) = if radicand.is_one() {
            (BigUint::one(), radicand)
        } else {
            squarefree_reduce(&radicand, DEFAULT_EFFORT_BOUND)
        };
        SymbolicValue::Term(Term {
            coeff: ratio_mul(&coeff, &Ratio::from_integer(square)),
            radicand,
            phase: reduce_phase(phase),
        })
    }

    /// `e^{2πi k / m}`.
    ///
    /// # Panics
    /// If `m` is zero.
    pub fn root_of_unity(k: &BigInt, m: &BigUint) -> Self {
        assert!(!m.is_zero(), "root of unity of order 0");
        let m_signed = BigInt::from(m.clone());
        let k = k.mod_floor(&m_signed).into_parts().1;
        SymbolicValue::Term(Term {
            coeff: Ratio::one(),
            radicand: BigUint::one(),
            phase: Ratio::new(k, m.clone()),
        })
    }

    /// The integer `n` (with sign carried by the phase).
    pub fn from_integer(n: &BigInt) -> Self {
        if n.is_zero() {
            return SymbolicValue::Zero;
        }
        let phase = if n.is_negative() { Ratio::new(BigUint::one(), BigUint::from(2u32)) } else { Ratio::zero() };
        SymbolicValue::Term(Term {
            coeff: Ratio::from_integer(n.magnitude().clone()),
            radicand: BigUint::one(),
            phase,
        })
    }

    /// `√r`.
    pub fn sqrt(r: &BigUint) -> Self {
        Self::term(Ratio::one(), r.clone(), Ratio::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::root_of_unity(&BigInt::one(), &BigUint::from(4u32))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SymbolicValue::Zero)
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            SymbolicValue::Zero => None,
            SymbolicValue::Term(t) => Some(t),
        }
    }

    /// Exact product. Radicands combine as `√R₁·√R₂ = g·√(R₁R₂/g²)` with
    /// `g = gcd(R₁, R₂)`.
    pub fn mul(&self, other: &SymbolicValue) -> SymbolicValue {
        let (a, b) = match (self, other) {
            (SymbolicValue::Term(a), SymbolicValue::Term(b)) => (a, b),
            _ => return SymbolicValue::Zero,
        };
        let coeff = ratio_mul(&a.coeff, &b.coeff);
        let phase = reduce_phase(&a.phase + &b.phase);
        if a.radicand.is_one() || b.radicand.is_one() {
            let radicand = if a.radicand.is_one() { b.radicand.clone() } else { a.radicand.clone() };
            return SymbolicValue::Term(Term { coeff, radicand, phase });
        }
        // For squarefree radicands the two cofactors are coprime and
        // squarefree, so their product needs no further reduction.
        let g = a.radicand.gcd(&b.radicand);
        let radicand = (&a.radicand / &g) * (&b.radicand / &g);
        let coeff = ratio_mul(&coeff, &Ratio::from_integer(g));
        SymbolicValue::Term(Term { coeff, radicand, phase })
    }

    /// Multiplies by `num / den`. A negative factor is absorbed into the phase.
    pub fn scale(&self, num: &BigInt, den: &BigInt) -> Result<SymbolicValue, ValueError> {
        if den.is_zero() {
            return Err(ValueError::ZeroDenominator);
        }
        let negative = num.is_negative() != den.is_negative();
        let factor = Ratio::new(num.magnitude().clone(), den.magnitude().clone());
        let mut out = match self {
            SymbolicValue::Zero => return Ok(SymbolicValue::Zero),
            SymbolicValue::Term(_) if factor.is_zero() => return Ok(SymbolicValue::Zero),
            SymbolicValue::Term(t) => Term { coeff: ratio_mul(&t.coeff, &factor), radicand: t.radicand.clone(), phase: t.phase.clone() },
        };
        if negative {
            out.phase = reduce_phase(out.phase + Ratio::new(BigUint::one(), BigUint::from(2u32)));
        }
        Ok(SymbolicValue::Term(out))
    }

    /// `self^e`.
    pub fn pow(&self, e: u64) -> SymbolicValue {
        let mut result = SymbolicValue::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The value as an integer, when it is one (radicand 1, integral
    /// coefficient, phase 0 or 1/2).
    pub fn to_integer(&self) -> Option<BigInt> {
        let t = match self {
            SymbolicValue::Zero => return Some(BigInt::zero()),
            SymbolicValue::Term(t) => t,
        };
        if !t.radicand.is_one() || !t.coeff.is_integer() {
            return None;
        }
        let magnitude = BigInt::from(t.coeff.to_integer());
        if t.phase.is_zero() {
            Some(magnitude)
        } else if t.phase == Ratio::new(BigUint::one(), BigUint::from(2u32)) {
            Some(-magnitude)
        } else {
            None
        }
    }

    pub fn approx(&self) -> Approx {
        let t = match self {
            SymbolicValue::Zero => {
                return Approx {
                    log10_mag: f64::NEG_INFINITY,
                    phase_turns: 0.0,
                    complex: Some(Complex64::new(0.0, 0.0)),
                }
            }
            SymbolicValue::Term(t) => t,
        };
        let log10_mag =
            log10_biguint(t.coeff.numer()) - log10_biguint(t.coeff.denom()) + 0.5 * log10_biguint(&t.radicand);
        let phase_turns = t.phase.to_f64().unwrap_or(0.0);
        let complex = if log10_mag.abs() < 300.0 {
            let coeff = t.coeff.to_f64();
            let root = t.radicand.to_f64().map(f64::sqrt);
            match (coeff, root) {
                (Some(c), Some(r)) if (c * r).is_finite() => {
                    let angle = std::f64::consts::TAU * phase_turns;
                    Some(Complex64::from_polar(c * r, angle))
                }
                _ => None,
            }
        } else {
            None
        };
        Approx { log10_mag, phase_turns, complex }
    }

    /// Structural equality, falling back to a numerical comparison when the
    /// radicands are too large for canonical forms to be unique.
    pub fn compare(&self, other: &SymbolicValue) -> ValueEquality {
        if self == other {
            return ValueEquality::StructurallyEqual;
        }
        let (a, b) = match (self, other) {
            (SymbolicValue::Term(a), SymbolicValue::Term(b)) => (a, b),
            _ => return ValueEquality::NotEqual,
        };
        let cube = BigUint::from(DEFAULT_EFFORT_BOUND).pow(3);
        if a.radicand < cube && b.radicand < cube {
            return ValueEquality::NotEqual;
        }
        let (x, y) = (self.approx(), other.approx());
        let mut dphase = (x.phase_turns - y.phase_turns).abs();
        dphase = dphase.min(1.0 - dphase);
        let dmag = (x.log10_mag - y.log10_mag).abs();
        if dmag <= 1e-9 && dphase <= 1e-9 {
            ValueEquality::NumericallyEqual
        } else {
            ValueEquality::NotEqual
        }
    }
}

impl Mul for &SymbolicValue {
    type Output = SymbolicValue;

    fn mul(self, rhs: &SymbolicValue) -> SymbolicValue {
        SymbolicValue::mul(self, rhs)
    }
}

fn ratio_string(r: &Ratio<BigUint>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for SymbolicValue {
    /// Human-readable form such as `-i*sqrt(3)` or `1/2*sqrt(2)*exp(2*pi*i*1/8)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self {
            SymbolicValue::Zero => return write!(f, "0"),
            SymbolicValue::Term(t) => t,
        };
        let four = BigUint::from(4u32);
        let quarter_turns = (t.phase.clone() * Ratio::from_integer(four)).is_integer().then(|| {
            (t.phase.numer() * BigUint::from(4u32) / t.phase.denom()).to_u32().unwrap_or(0)
        });
        let (negative, imaginary, explicit_phase) = match quarter_turns {
            Some(0) => (false, false, false),
            Some(1) => (false, true, false),
            Some(2) => (true, false, false),
            Some(3) => (true, true, false),
            _ => (false, false, true),
        };
        let prefix = if negative { "-" } else { "" };
        let mut parts: Vec<String> = Vec::new();
        let has_root = !t.radicand.is_one();
        if !t.coeff.is_one() || !(has_root || imaginary) {
            if t.coeff.is_integer() {
                parts.push(t.coeff.numer().to_string());
            } else {
                parts.push(ratio_string(&t.coeff));
            }
        }
        if imaginary {
            parts.push("i".to_string());
        }
        if has_root {
            parts.push(format!("sqrt({})", t.radicand));
        }
        if explicit_phase {
            parts.push(format!("exp(2*pi*i*{})", ratio_string(&t.phase)));
        }
        write!(f, "{}{}", prefix, parts.join("*"))
    }
}

impl Serialize for SymbolicValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SymbolicValue::Zero => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("kind", "zero")?;
                map.end()
            }
            SymbolicValue::Term(t) => {
                let approx = self.approx();
                let mut map = serializer.serialize_map(Some(5))?;
                map.serialize_entry("kind", "term")?;
                map.serialize_entry("coeff", &ratio_string(&t.coeff))?;
                map.serialize_entry("radicand", &t.radicand.to_string())?;
                map.serialize_entry("phase", &ratio_string(&t.phase))?;
                map.serialize_entry(
                    "approx",
                    &serde_json::json!({
                        "log10_mag": approx.log10_mag,
                        "phase_turns": approx.phase_turns,
                        "re": approx.complex.map(|z| z.re),
                        "im": approx.complex.map(|z| z.im),
                    }),
                )?;
                map.end()
            }
        }
    }
}

/// Sign of an integer as a unit value (`±1`), or `Zero`.
pub(crate) fn signum_value(sign: i8) -> SymbolicValue {
    match sign.cmp(&0) {
        std::cmp::Ordering::Equal => SymbolicValue::Zero,
        std::cmp::Ordering::Greater => SymbolicValue::one(),
        std::cmp::Ordering::Less => SymbolicValue::from_integer(&BigInt::from_biguint(Sign::Minus, BigUint::one())),
    }
}
