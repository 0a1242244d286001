use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A count of individuals: a natural number or the countably infinite ω.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Cardinal {
    Finite(u64),
    Omega,
}

pub use Cardinal::{Finite, Omega};

impl Cardinal {
    pub const ZERO: Cardinal = Cardinal::Finite(0);

    pub fn is_zero(self) -> bool {
        self == Cardinal::ZERO
    }

    pub fn is_infinite(self) -> bool {
        self == Omega
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Finite(n) => Some(n),
            Omega => None,
        }
    }
}

/// Cardinal addition: ω absorbs everything.
pub fn cardinal_add(a: Cardinal, b: Cardinal) -> Cardinal {
    match (a, b) {
        (Finite(m), Finite(n)) => Finite(m.checked_add(n).expect("cardinal overflow")),
        _ => Omega,
    }
}

impl Add for Cardinal {
    type Output = Cardinal;
    fn add(self, rhs: Cardinal) -> Cardinal {
        cardinal_add(self, rhs)
    }
}

impl Sum for Cardinal {
    fn sum<I: Iterator<Item = Cardinal>>(iter: I) -> Self {
        iter.fold(Cardinal::ZERO, cardinal_add)
    }
}

impl PartialOrd for Cardinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cardinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Omega) => Ordering::Less,
            (Omega, Finite(_)) => Ordering::Greater,
            (Omega, Omega) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(n) => write!(f, "{n}"),
            Omega => f.write_str("omega"),
        }
    }
}

impl Serialize for Cardinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(n) => serializer.serialize_u64(*n),
            Omega => serializer.serialize_str("omega"),
        }
    }
}

struct CardinalVisitor;

impl Visitor<'_> for CardinalVisitor {
    type Value = Cardinal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a non-negative integer or \"omega\"")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cardinal, E> {
        Ok(Finite(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cardinal, E> {
        u64::try_from(v)
            .map(Finite)
            .map_err(|_| E::custom(format!("negative cardinal {v}")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Cardinal, E> {
        match v {
            "omega" | "ω" => Ok(Omega),
            other => other
                .parse::<u64>()
                .map(Finite)
                .map_err(|_| E::custom(format!("bad cardinal {other:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(CardinalVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe() -> Vec<Cardinal> {
        (0..=100).map(Finite).chain(std::iter::once(Omega)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(cardinal_add(Finite(2), Finite(3)), Finite(5));
        assert_eq!(cardinal_add(Omega, Finite(5)), Omega);
        assert_eq!(cardinal_add(Omega, Omega), Omega);
    }

    #[test]
    fn commutative_with_identity() {
        for &a in &universe() {
            assert_eq!(cardinal_add(a, Cardinal::ZERO), a);
            for &b in &universe() {
                assert_eq!(cardinal_add(a, b), cardinal_add(b, a));
            }
        }
    }

    #[test]
    fn associative() {
        let u = universe();
        let sample: Vec<Cardinal> = u.iter().copied().step_by(7).chain([Omega]).collect();
        for &a in &u {
            for &b in &sample {
                for &c in &sample {
                    assert_eq!(
                        cardinal_add(cardinal_add(a, b), c),
                        cardinal_add(a, cardinal_add(b, c))
                    );
                }
            }
        }
    }

    #[test]
    fn serde_forms() {
        assert_eq!(serde_json::to_string(&Omega).unwrap(), "\"omega\"");
        assert_eq!(serde_json::from_str::<Cardinal>("7").unwrap(), Finite(7));
        assert_eq!(serde_json::from_str::<Cardinal>("\"omega\"").unwrap(), Omega);
        assert!(serde_json::from_str::<Cardinal>("-1").is_err());
    }
}
