use super::tail::{SignSummary, Tail};
use super::world::{CellValue, World};
use crate::criteria::Verdict;
use crate::error::WorldError;
use crate::exactnum::{sum_classify, Cardinal, Mass, Rational, SumClass, SumTerm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaBlock {
    /// `count` individuals, each with difference `delta`.
    Constant { count: Cardinal, delta: Rational },
    /// An ω cell whose differences form a tail sequence.
    Tail(Tail),
}

/// Per-cell differences `w - v` of two worlds on one population.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaProfile {
    blocks: Vec<DeltaBlock>,
    summaries: Vec<SignSummary>,
}

pub fn delta_profile(w: &World, v: &World) -> Result<DeltaProfile, WorldError> {
    w.require_same_population(v)?;
    let mut blocks = Vec::new();
    for (i, (a, b)) in w.values().iter().zip(v.values()).enumerate() {
        match a.sub(b)? {
            CellValue::Level(d) if d.is_zero() => {}
            CellValue::Level(delta) => blocks.push(DeltaBlock::Constant { count: w.population().size(i), delta }),
            CellValue::Tail(t) => blocks.push(DeltaBlock::Tail(t)),
        }
    }
    Ok(DeltaProfile::from_blocks(blocks))
}

fn block_summary(block: &DeltaBlock, theta: &Rational) -> SignSummary {
    match block {
        DeltaBlock::Tail(t) => t.sign_summary(theta),
        DeltaBlock::Constant { count, delta } => {
            let d = delta - theta;
            let mass = match count {
                Cardinal::Omega => Mass::Infinite,
                Cardinal::Finite(n) => Mass::Finite(d.abs() * Rational::from_integer(*n as i64)),
            };
            let none = (Cardinal::ZERO, Mass::zero());
            let (pos, neg) = match d.signum() {
                1 => ((*count, mass), none),
                -1 => (none, (*count, mass)),
                _ => (none.clone(), none),
            };
            SignSummary { pos_count: pos.0, pos_mass: pos.1, neg_count: neg.0, neg_mass: neg.1 }
        }
    }
}

impl DeltaProfile {
    pub fn from_blocks(blocks: Vec<DeltaBlock>) -> DeltaProfile {
        let zero = Rational::zero();
        let summaries = blocks.iter().map(|b| block_summary(b, &zero)).collect();
        DeltaProfile { blocks, summaries }
    }

    pub fn blocks(&self) -> &[DeltaBlock] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.pos_count().is_zero() && self.neg_count().is_zero()
    }

    pub fn has_tails(&self) -> bool {
        self.blocks.iter().any(|b| matches!(b, DeltaBlock::Tail(_)))
    }

    pub fn negate(&self) -> DeltaProfile {
        DeltaProfile::from_blocks(
            self.blocks
                .iter()
                .map(|b| match b {
                    DeltaBlock::Constant { count, delta } => DeltaBlock::Constant { count: *count, delta: -delta },
                    DeltaBlock::Tail(t) => DeltaBlock::Tail(t.negate()),
                })
                .collect(),
        )
    }

    pub fn pos_mass(&self) -> Mass {
        self.summaries.iter().fold(Mass::zero(), |acc, s| acc.add(&s.pos_mass))
    }

    pub fn neg_mass(&self) -> Mass {
        self.summaries.iter().fold(Mass::zero(), |acc, s| acc.add(&s.neg_mass))
    }

    /// Magnitude of the positive part, as `Finite(v >= 0)` or `PlusInfinity`.
    pub fn pos_sum(&self) -> SumClass {
        self.pos_mass().as_sum_class()
    }

    pub fn neg_sum(&self) -> SumClass {
        self.neg_mass().as_sum_class()
    }

    /// Number of individuals with a positive difference.
    pub fn pos_count(&self) -> Cardinal {
        self.summaries.iter().map(|s| s.pos_count).sum()
    }

    pub fn neg_count(&self) -> Cardinal {
        self.summaries.iter().map(|s| s.neg_count).sum()
    }

    /// Number of individuals whose difference exceeds `c`.
    pub fn count_above(&self, c: &Rational) -> Cardinal {
        self.blocks.iter().map(|b| block_summary(b, c).pos_count).sum()
    }

    /// Number of individuals whose difference is below `c`.
    pub fn count_below(&self, c: &Rational) -> Cardinal {
        self.blocks.iter().map(|b| block_summary(b, c).neg_count).sum()
    }

    /// Unconditional sum of all differences.
    pub fn sum_class(&self) -> SumClass {
        let terms: Vec<SumTerm> = self
            .summaries
            .iter()
            .map(|s| SumTerm::Tail { pos: s.pos_mass.clone(), neg: s.neg_mass.clone() })
            .collect();
        sum_classify(&terms).expect("sign summaries carry non-negative masses")
    }

    /// `(delta, count)` for every constant block; `None` if any block is a tail.
    pub fn constant_blocks(&self) -> Option<Vec<(Rational, Cardinal)>> {
        self.blocks
            .iter()
            .map(|b| match b {
                DeltaBlock::Constant { count, delta } => Some((delta.clone(), *count)),
                DeltaBlock::Tail(_) => None,
            })
            .collect()
    }

    /// Limits of the ω blocks: the constant delta of an ω block or a tail's limit.
    pub fn omega_limits(&self) -> Vec<Rational> {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                DeltaBlock::Constant { count: Cardinal::Omega, delta } => Some(delta.clone()),
                DeltaBlock::Constant { .. } => None,
                DeltaBlock::Tail(t) => Some(t.limit().clone()),
            })
            .collect()
    }
}

/// Cellwise comparison: better iff weakly better everywhere and strictly somewhere.
pub fn pareto_compare(w: &World, v: &World) -> Result<Verdict, WorldError> {
    let d = delta_profile(w, v)?;
    Ok(Verdict::from_weak(d.neg_count().is_zero(), d.pos_count().is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{q, Finite, Omega};
    use crate::worlds::Population;

    fn pop2() -> Population {
        Population::of(&[("A", Omega), ("rest", Omega)]).unwrap()
    }

    #[test]
    fn equal_worlds_give_empty_profile() {
        let w = World::from_levels(pop2(), vec![q(1, 1), q(-2, 3)]).unwrap();
        let d = delta_profile(&w, &w).unwrap();
        assert!(d.blocks().is_empty());
        assert_eq!(d.sum_class(), SumClass::Finite(Rational::zero()));
    }

    #[test]
    fn spd_witness_blocks() {
        let w = World::from_levels(pop2(), vec![q(2, 1), q(0, 1)]).unwrap();
        let v = World::from_levels(pop2(), vec![q(0, 1), q(1, 1)]).unwrap();
        let d = delta_profile(&w, &v).unwrap();
        assert_eq!(
            d.blocks(),
            &[
                DeltaBlock::Constant { count: Omega, delta: q(2, 1) },
                DeltaBlock::Constant { count: Omega, delta: q(-1, 1) }
            ]
        );
        assert_eq!(d.sum_class(), SumClass::Indeterminate);
    }

    #[test]
    fn geometric_gap_profile() {
        let p = Population::of(&[("X", Omega)]).unwrap();
        let first = Tail::mixed(Rational::zero(), vec![], [(1, q(1, 1))].into()).unwrap();
        let w = World::new(p.clone(), vec![CellValue::Tail(first)]).unwrap();
        let v = World::new(p, vec![CellValue::Tail(Tail::geometric(q(1, 1), q(1, 2)).unwrap())]).unwrap();
        let d = delta_profile(&w, &v).unwrap();
        assert_eq!(d.blocks().len(), 1);
        assert_eq!(d.pos_sum(), SumClass::Finite(q(1, 2)));
        assert_eq!(d.neg_sum(), SumClass::Finite(q(1, 2)));
    }

    #[test]
    fn swapping_arguments_negates() {
        let p = Population::of(&[("A", Omega), ("B", Finite(3))]).unwrap();
        let w = World::new(
            p.clone(),
            vec![CellValue::Tail(Tail::geometric(q(1, 1), q(-1, 3)).unwrap()), CellValue::Level(q(1, 2))],
        )
        .unwrap();
        let v = World::from_levels(p, vec![q(1, 4), q(2, 1)]).unwrap();
        assert_eq!(delta_profile(&w, &v).unwrap().negate(), delta_profile(&v, &w).unwrap());
    }

    #[test]
    fn pareto_examples() {
        let p = Population::of(&[("A-", Omega), ("A\\A-", Omega), ("rest", Omega)]).unwrap();
        let w = World::from_levels(p.clone(), vec![q(1, 1), q(1, 1), q(0, 1)]).unwrap();
        let w_minus = World::from_levels(p.clone(), vec![q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(pareto_compare(&w, &w_minus).unwrap(), Verdict::StrictlyBetter);
        assert_eq!(pareto_compare(&w, &w).unwrap(), Verdict::Equivalent);
        let v = World::from_levels(p, vec![q(0, 1), q(0, 1), q(1, 1)]).unwrap();
        assert_eq!(pareto_compare(&w, &v).unwrap(), Verdict::Incomparable);
    }
}
