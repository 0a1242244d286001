//! Infinite-valued cells.
//!
//! A tail assigns the `n`-th individual of an ω cell (n = 1, 2, …) the value
//!
//! ```text
//! t(n) = exceptions[n]                          if n is an exception index
//!      = constant + Σ a·rⁿ + harmonic / n       otherwise
//! ```
//!
//! with `0 < |r| < 1`. A nonzero harmonic coefficient may not be mixed with
//! anything else; everything else is closed under affine combination.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::WorldError;
use crate::exactnum::{Cardinal, Mass, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tail {
    constant: Rational,
    /// ratio -> coefficient, coefficients nonzero
    geometric: BTreeMap<Rational, Rational>,
    harmonic: Rational,
    exceptions: BTreeMap<u64, Rational>,
}

/// Serialized form of a tail, as written in scenario files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDescriptor {
    Const(Rational),
    Geometric { a: Rational, r: Rational },
    Harmonic { a: Rational },
    Mixed {
        #[serde(default)]
        constant: Rational,
        #[serde(default)]
        geometric: Vec<GeometricTerm>,
        #[serde(default)]
        exceptions: BTreeMap<u64, Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricTerm {
    pub a: Rational,
    pub r: Rational,
}

/// Signs of `t(n) - θ` over all n, with the magnitude of each signed part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSummary {
    pub pos_count: Cardinal,
    pub neg_count: Cardinal,
    pub pos_mass: Mass,
    pub neg_mass: Mass,
}

impl SignSummary {
    fn empty() -> Self {
        SignSummary {
            pos_count: Cardinal::ZERO,
            neg_count: Cardinal::ZERO,
            pos_mass: Mass::zero(),
            neg_mass: Mass::zero(),
        }
    }

    fn tally(&mut self, value: &Rational) {
        if value.is_positive() {
            self.pos_count = self.pos_count + Cardinal::Finite(1);
            self.pos_mass = self.pos_mass.add(&Mass::Finite(value.clone()));
        } else if value.is_negative() {
            self.neg_count = self.neg_count + Cardinal::Finite(1);
            self.neg_mass = self.neg_mass.add(&Mass::Finite(-value));
        }
    }

    fn infinite_side(&mut self, sign: i8, mass: Mass) {
        if sign > 0 {
            self.pos_count = Cardinal::Omega;
            self.pos_mass = self.pos_mass.add(&mass);
        } else if sign < 0 {
            self.neg_count = Cardinal::Omega;
            self.neg_mass = self.neg_mass.add(&mass);
        }
    }
}

impl Tail {
    pub fn constant(c: Rational) -> Tail {
        Tail {
            constant: c,
            geometric: BTreeMap::new(),
            harmonic: Rational::zero(),
            exceptions: BTreeMap::new(),
        }
    }

    pub fn geometric(a: Rational, r: Rational) -> Result<Tail, WorldError> {
        Tail::mixed(Rational::zero(), vec![(a, r)], BTreeMap::new())
    }

    pub fn harmonic(a: Rational) -> Tail {
        let mut t = Tail::constant(Rational::zero());
        t.harmonic = a;
        t
    }

    pub fn mixed(
        constant: Rational,
        geometric: Vec<(Rational, Rational)>,
        exceptions: BTreeMap<u64, Rational>,
    ) -> Result<Tail, WorldError> {
        let mut geo: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (a, r) in geometric {
            if r.is_zero() || r.abs() >= Rational::one() {
                return Err(WorldError::World(format!("geometric ratio {r} must satisfy 0 < |r| < 1")));
            }
            *geo.entry(r).or_insert_with(Rational::zero) += &a;
        }
        if exceptions.contains_key(&0) {
            return Err(WorldError::World("tail indices start at 1".into()));
        }
        let mut t = Tail { constant, geometric: geo, harmonic: Rational::zero(), exceptions };
        t.normalize();
        Ok(t)
    }

    pub fn from_descriptor(d: &TailDescriptor) -> Result<Tail, WorldError> {
        match d {
            TailDescriptor::Const(c) => Ok(Tail::constant(c.clone())),
            TailDescriptor::Geometric { a, r } => Tail::geometric(a.clone(), r.clone()),
            TailDescriptor::Harmonic { a } => Ok(Tail::harmonic(a.clone())),
            TailDescriptor::Mixed { constant, geometric, exceptions } => Tail::mixed(
                constant.clone(),
                geometric.iter().map(|g| (g.a.clone(), g.r.clone())).collect(),
                exceptions.clone(),
            ),
        }
    }

    pub fn to_descriptor(&self) -> TailDescriptor {
        if !self.harmonic.is_zero() {
            return TailDescriptor::Harmonic { a: self.harmonic.clone() };
        }
        if self.geometric.is_empty() && self.exceptions.is_empty() {
            return TailDescriptor::Const(self.constant.clone());
        }
        if self.constant.is_zero() && self.exceptions.is_empty() && self.geometric.len() == 1 {
            let (r, a) = self.geometric.iter().next().unwrap();
            return TailDescriptor::Geometric { a: a.clone(), r: r.clone() };
        }
        TailDescriptor::Mixed {
            constant: self.constant.clone(),
            geometric: self
                .geometric
                .iter()
                .map(|(r, a)| GeometricTerm { a: a.clone(), r: r.clone() })
                .collect(),
            exceptions: self.exceptions.clone(),
        }
    }

    fn normalize(&mut self) {
        self.geometric.retain(|_, a| !a.is_zero());
        let exceptions = std::mem::take(&mut self.exceptions);
        self.exceptions = exceptions
            .into_iter()
            .filter(|(n, v)| *v != self.base_term(*n))
            .collect();
    }

    fn check_harmonic(&self) -> Result<(), WorldError> {
        if !self.harmonic.is_zero()
            && (!self.constant.is_zero() || !self.geometric.is_empty() || !self.exceptions.is_empty())
        {
            return Err(WorldError::UnsupportedTailCombination(
                "a harmonic tail can only be combined with other harmonic tails or zero".into(),
            ));
        }
        Ok(())
    }

    /// `Some(c)` when every term equals `c`.
    pub fn as_constant(&self) -> Option<&Rational> {
        (self.geometric.is_empty() && self.harmonic.is_zero() && self.exceptions.is_empty())
            .then_some(&self.constant)
    }

    pub fn is_harmonic(&self) -> bool {
        !self.harmonic.is_zero()
    }

    /// Limit of t(n) as n → ∞.
    pub fn limit(&self) -> &Rational {
        &self.constant
    }

    fn base_term(&self, n: u64) -> Rational {
        let mut v = self.constant.clone();
        for (r, a) in &self.geometric {
            v += &(a * r.pow(n));
        }
        if !self.harmonic.is_zero() {
            v += &(&self.harmonic / Rational::from_integer(n as i64));
        }
        v
    }

    /// Value of the n-th individual, n ≥ 1.
    pub fn term(&self, n: u64) -> Rational {
        assert!(n >= 1, "tail indices start at 1");
        match self.exceptions.get(&n) {
            Some(v) => v.clone(),
            None => self.base_term(n),
        }
    }

    pub fn scale(&self, alpha: &Rational) -> Tail {
        let mut t = Tail {
            constant: &self.constant * alpha,
            geometric: self.geometric.iter().map(|(r, a)| (r.clone(), a * alpha)).collect(),
            harmonic: &self.harmonic * alpha,
            exceptions: self.exceptions.iter().map(|(n, v)| (*n, v * alpha)).collect(),
        };
        t.normalize();
        t
    }

    pub fn add(&self, other: &Tail) -> Result<Tail, WorldError> {
        let mut geometric = self.geometric.clone();
        for (r, a) in &other.geometric {
            *geometric.entry(r.clone()).or_insert_with(Rational::zero) += a;
        }
        let indices: Vec<u64> = self.exceptions.keys().chain(other.exceptions.keys()).copied().collect();
        let exceptions = indices.into_iter().map(|n| (n, self.term(n) + other.term(n))).collect();
        let mut t = Tail {
            constant: &self.constant + &other.constant,
            geometric,
            harmonic: &self.harmonic + &other.harmonic,
            exceptions,
        };
        t.normalize();
        t.check_harmonic()?;
        Ok(t)
    }

    pub fn add_constant(&self, c: &Rational) -> Result<Tail, WorldError> {
        self.add(&Tail::constant(c.clone()))
    }

    pub fn negate(&self) -> Tail {
        self.scale(&-Rational::one())
    }

    fn max_exception(&self) -> u64 {
        self.exceptions.keys().next_back().copied().unwrap_or(0)
    }

    /// Index from which the non-constant part stays strictly inside `(-eps, eps)`.
    fn settle_index(&self, eps: &Rational) -> u64 {
        let half = eps / Rational::from_integer(2);
        let geo_bound = if self.harmonic.is_zero() { eps.clone() } else { half.clone() };
        let mut n = 1u64;
        if !self.geometric.is_empty() {
            loop {
                let bound: Rational = self.geometric.iter().map(|(r, a)| a.abs() * r.abs().pow(n)).sum();
                if bound < geo_bound {
                    break;
                }
                n += 1;
            }
        }
        if !self.harmonic.is_zero() {
            // |h| / n < eps/2  <=>  n > 2|h| / eps
            let cutoff = (self.harmonic.abs() / &half).floor_u64().expect("harmonic cutoff overflow");
            n = n.max(cutoff + 1);
        }
        n.max(self.max_exception() + 1)
    }

    /// Index from which every term of the given parity has the sign of the
    /// dominant geometric group, together with that group's coefficient sign.
    fn parity_dominance(&self, parity: u64) -> Option<(i8, u64)> {
        let mut groups: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (r, a) in &self.geometric {
            let coeff = if parity == 1 && r.is_negative() { -a } else { a.clone() };
            *groups.entry(r.abs()).or_insert_with(Rational::zero) += &coeff;
        }
        groups.retain(|_, b| !b.is_zero());
        let (rho, lead) = groups.pop_last()?;
        let lead_abs = lead.abs();
        let ratios: Vec<(Rational, Rational)> = groups.iter().map(|(p, b)| (p / &rho, b.abs())).collect();
        let mut n = 1u64;
        loop {
            let rest: Rational = ratios.iter().map(|(x, b)| b * x.pow(n)).sum();
            if lead_abs > rest {
                return Some((lead.signum(), n));
            }
            n += 1;
        }
    }

    /// Sign structure of the sequence `t(n) - theta`.
    pub fn sign_summary(&self, theta: &Rational) -> SignSummary {
        let mut out = SignSummary::empty();
        let drift = &self.constant - theta;

        if !drift.is_zero() {
            let start = self.settle_index(&drift.abs());
            for n in 1..start {
                out.tally(&(self.term(n) - theta));
            }
            out.infinite_side(drift.signum(), Mass::Infinite);
            return out;
        }

        if !self.harmonic.is_zero() {
            out.infinite_side(self.harmonic.signum(), Mass::Infinite);
            return out;
        }

        let classes: Vec<(u64, Option<(i8, u64)>)> =
            (0..2).map(|p| (p, self.parity_dominance(p))).collect();
        let start = classes
            .iter()
            .filter_map(|(_, d)| d.map(|(_, n)| n))
            .chain([self.max_exception() + 1])
            .max()
            .unwrap();
        for n in 1..start {
            out.tally(&(self.term(n) - theta));
        }
        for (parity, dominance) in classes {
            let Some((sign, _)) = dominance else { continue };
            let first = if start % 2 == parity { start } else { start + 1 };
            let class_sum: Rational = self
                .geometric
                .iter()
                .map(|(r, a)| a * r.pow(first) / (Rational::one() - r * r))
                .sum();
            out.infinite_side(sign, Mass::Finite(class_sum.abs()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{q, Finite, Omega};
    use proptest::prelude::*;

    #[test]
    fn remark_sequence_masses() {
        // <1,0,0,...> minus <1/2,1/4,1/8,...>
        let w = Tail::mixed(Rational::zero(), vec![], [(1, q(1, 1))].into()).unwrap();
        let v = Tail::geometric(q(1, 1), q(1, 2)).unwrap();
        let d = w.add(&v.negate()).unwrap();
        let s = d.sign_summary(&Rational::zero());
        assert_eq!(s.pos_mass, Mass::Finite(q(1, 2)));
        assert_eq!(s.neg_mass, Mass::Finite(q(1, 2)));
        assert_eq!(s.pos_count, Finite(1));
        assert_eq!(s.neg_count, Omega);
    }

    #[test]
    fn harmonic_rules() {
        let h = Tail::harmonic(q(-1, 1));
        let s = h.sign_summary(&Rational::zero());
        assert_eq!(s.neg_mass, Mass::Infinite);
        assert_eq!(s.pos_count, Finite(0));
        // -1/n < -1/10 for n = 1..9
        assert_eq!(h.sign_summary(&q(-1, 10)).neg_count, Finite(9));
        assert!(h.add(&Tail::geometric(q(1, 1), q(1, 2)).unwrap()).is_err());
        assert!(h.add(&Tail::harmonic(q(1, 1))).unwrap().as_constant().is_some());
    }

    #[test]
    fn alternating_ratio_splits_by_parity() {
        // a = 1, r = -1/2: odd terms negative, even terms positive
        let t = Tail::geometric(q(1, 1), q(-1, 2)).unwrap();
        let s = t.sign_summary(&Rational::zero());
        assert_eq!((s.pos_count, s.neg_count), (Omega, Omega));
        // even: sum (1/4)^k = 1/3 ; odd: 1/2 * 1/(1-1/4) = 2/3
        assert_eq!(s.pos_mass, Mass::Finite(q(1, 3)));
        assert_eq!(s.neg_mass, Mass::Finite(q(2, 3)));
    }

    #[test]
    fn descriptor_round_trip() {
        let t = Tail::mixed(q(1, 2), vec![(q(1, 1), q(1, 3)), (q(2, 1), q(-1, 2))], [(4, q(7, 1))].into())
            .unwrap();
        assert_eq!(Tail::from_descriptor(&t.to_descriptor()).unwrap(), t);
        let json = serde_json::to_string(&t.to_descriptor()).unwrap();
        let back: TailDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(Tail::from_descriptor(&back).unwrap(), t);
    }

    #[test]
    fn rejects_bad_ratio() {
        assert!(Tail::geometric(q(1, 1), q(1, 1)).is_err());
        assert!(Tail::geometric(q(1, 1), Rational::zero()).is_err());
    }

    fn tail_strategy() -> impl Strategy<Value = Tail> {
        let ratio = prop::sample::select(vec![q(1, 2), q(-1, 2), q(1, 3), q(-1, 3), q(2, 3), q(1, 4)]);
        (
            -3i64..=3,
            prop::collection::vec((-4i64..=4, 1i64..=3, ratio), 0..3),
            prop::collection::btree_map(1u64..8, (-4i64..=4).prop_map(|v| q(v, 2)), 0..3),
        )
            .prop_map(|(c, geo, exc)| {
                Tail::mixed(q(c, 2), geo.into_iter().map(|(n, d, r)| (q(n, d), r)).collect(), exc).unwrap()
            })
    }

    // Brute force over explicit terms: 2/3^n < 2^-100 beyond n = 180.
    const HORIZON: u64 = 240;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn summary_matches_explicit_terms(t in tail_strategy(), th in -3i64..=3) {
            let theta = q(th, 2);
            let s = t.sign_summary(&theta);
            let diffs: Vec<Rational> = (1..=HORIZON).map(|n| t.term(n) - &theta).collect();
            let late = &diffs[200..];
            for (count, is_side) in [(s.pos_count, true), (s.neg_count, false)] {
                let pick = |v: &Rational| if is_side { v.is_positive() } else { v.is_negative() };
                match count {
                    Finite(k) => {
                        prop_assert_eq!(diffs.iter().filter(|v| pick(v)).count() as u64, k);
                    }
                    Omega => prop_assert!(late.iter().any(pick)),
                }
            }
            let eps = q(1, 1_000_000);
            for (mass, positive) in [(&s.pos_mass, true), (&s.neg_mass, false)] {
                if let Mass::Finite(m) = mass {
                    let partial: Rational = diffs
                        .iter()
                        .filter(|v| if positive { v.is_positive() } else { v.is_negative() })
                        .map(|v| v.abs())
                        .sum();
                    prop_assert!((m - &partial).abs() < eps, "mass {} vs partial {}", m, partial);
                } else {
                    prop_assert!(!(t.limit() - &theta).is_zero());
                }
            }
        }

        #[test]
        fn affine_ops_are_termwise(a in tail_strategy(), b in tail_strategy(), n in 1i64..=4) {
            let alpha = q(n, 4);
            let combo = a.scale(&alpha).add(&b.scale(&(Rational::one() - &alpha))).unwrap();
            for k in 1..12 {
                prop_assert_eq!(
                    combo.term(k),
                    &alpha * a.term(k) + (Rational::one() - &alpha) * b.term(k)
                );
            }
        }
    }
}
