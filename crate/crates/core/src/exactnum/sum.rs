use serde::{Deserialize, Serialize};

use super::{Cardinal, Rational};
use crate::error::ExactError;

/// Outcome of summing a (possibly infinite) family of rationals in every order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumClass {
    Finite(Rational),
    PlusInfinity,
    MinusInfinity,
    Indeterminate,
}

impl std::fmt::Display for SumClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SumClass::Finite(v) => write!(f, "{v}"),
            SumClass::PlusInfinity => f.write_str("+inf"),
            SumClass::MinusInfinity => f.write_str("-inf"),
            SumClass::Indeterminate => f.write_str("indeterminate"),
        }
    }
}

impl SumClass {
    /// `true` for a convergent sum `>= 0` or divergence to `+inf`.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            SumClass::Finite(v) => !v.is_negative(),
            SumClass::PlusInfinity => true,
            _ => false,
        }
    }

    pub fn negate(&self) -> SumClass {
        match self {
            SumClass::Finite(v) => SumClass::Finite(-v),
            SumClass::PlusInfinity => SumClass::MinusInfinity,
            SumClass::MinusInfinity => SumClass::PlusInfinity,
            SumClass::Indeterminate => SumClass::Indeterminate,
        }
    }

    /// Combine a positive-part magnitude and a negative-part magnitude.
    pub fn from_parts(pos: &Mass, neg: &Mass) -> SumClass {
        match (pos, neg) {
            (Mass::Finite(p), Mass::Finite(n)) => SumClass::Finite(p - n),
            (Mass::Infinite, Mass::Finite(_)) => SumClass::PlusInfinity,
            (Mass::Finite(_), Mass::Infinite) => SumClass::MinusInfinity,
            (Mass::Infinite, Mass::Infinite) => SumClass::Indeterminate,
        }
    }
}

/// Magnitude of one signed part of a series: a finite non-negative total or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mass {
    Finite(Rational),
    Infinite,
}

impl Mass {
    pub fn zero() -> Mass {
        Mass::Finite(Rational::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Mass::Infinite)
    }

    pub fn add(&self, other: &Mass) -> Mass {
        match (self, other) {
            (Mass::Finite(a), Mass::Finite(b)) => Mass::Finite(a + b),
            _ => Mass::Infinite,
        }
    }

    /// As a `SumClass` magnitude (`Finite(v >= 0)` or `PlusInfinity`).
    pub fn as_sum_class(&self) -> SumClass {
        match self {
            Mass::Finite(v) => SumClass::Finite(v.clone()),
            Mass::Infinite => SumClass::PlusInfinity,
        }
    }
}

/// One input to [`sum_classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumTerm {
    /// `count` individuals each contributing `delta`.
    Block { delta: Rational, count: Cardinal },
    /// A tail whose positive and negative parts were summed separately.
    Tail { pos: Mass, neg: Mass },
}

impl SumTerm {
    pub fn block(delta: Rational, count: Cardinal) -> SumTerm {
        SumTerm::Block { delta, count }
    }

    fn parts(&self) -> Result<(Mass, Mass), ExactError> {
        match self {
            SumTerm::Block { delta, count } => {
                let mass = match count {
                    _ if delta.is_zero() => Mass::zero(),
                    Cardinal::Omega => Mass::Infinite,
                    Cardinal::Finite(n) => Mass::Finite(delta.abs() * Rational::from_integer(*n as i64)),
                };
                Ok(if delta.is_negative() {
                    (Mass::zero(), mass)
                } else {
                    (mass, Mass::zero())
                })
            }
            SumTerm::Tail { pos, neg } => {
                for m in [pos, neg] {
                    if let Mass::Finite(v) = m {
                        if v.is_negative() {
                            return Err(ExactError::NegativeMass(v.clone()));
                        }
                    }
                }
                Ok((pos.clone(), neg.clone()))
            }
        }
    }
}

/// Classify the unconditional sum of all terms.
///
/// Unconditional convergence is decided as absolute convergence: the positive
/// and negative parts are totalled separately. A nonzero constant block of
/// size ω always contributes infinite mass; there is no way to pass it in as a
/// finite one.
pub fn sum_classify(terms: &[SumTerm]) -> Result<SumClass, ExactError> {
    let mut pos = Mass::zero();
    let mut neg = Mass::zero();
    for term in terms {
        let (p, n) = term.parts()?;
        pos = pos.add(&p);
        neg = neg.add(&n);
    }
    Ok(SumClass::from_parts(&pos, &neg))
}
