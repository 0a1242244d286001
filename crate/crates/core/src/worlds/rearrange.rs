use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::world::{CellValue, Population, World};
use crate::error::WorldError;
use crate::exactnum::Cardinal;

/// One flow entry: `(source cell, target cell, count)`.
pub type FlowEntry = (usize, usize, Cardinal);

/// A permutation of the population, recorded as cardinal flows between cells.
///
/// An entry `(s, t, n)` counts the `n` individuals `x` of target cell `t` whose
/// image `σ(x)` lies in source cell `s`; the rearranged world is `x ↦ w(σ(x))`.
/// Absent pairs carry no flow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rearrangement {
    source: Population,
    target: Population,
    flow: Vec<FlowEntry>,
}

impl Rearrangement {
    /// From a dense `source × target` matrix.
    pub fn new(source: Population, target: Population, flow: Vec<Vec<Cardinal>>) -> Result<Self, WorldError> {
        if flow.len() != source.len() || flow.iter().any(|row| row.len() != target.len()) {
            return Err(WorldError::Flow(format!(
                "flow must be {}x{}",
                source.len(),
                target.len()
            )));
        }
        let entries = flow
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().enumerate().map(move |(t, &n)| (s, t, n)))
            .collect();
        Rearrangement::from_sparse(source, target, entries)
    }

    /// From entries in any order; repeated pairs add up and zero counts are dropped.
    pub fn from_sparse(source: Population, target: Population, entries: Vec<FlowEntry>) -> Result<Self, WorldError> {
        let mut merged: BTreeMap<(usize, usize), Cardinal> = BTreeMap::new();
        for (s, t, n) in entries {
            if s >= source.len() || t >= target.len() {
                return Err(WorldError::Flow(format!("flow entry ({s}, {t}) is out of range")));
            }
            let slot = merged.entry((s, t)).or_insert(Cardinal::ZERO);
            *slot = *slot + n;
        }
        let flow: Vec<FlowEntry> = merged.into_iter().filter(|(_, n)| !n.is_zero()).map(|((s, t), n)| (s, t, n)).collect();
        let mut rows = vec![Cardinal::ZERO; source.len()];
        let mut cols = vec![Cardinal::ZERO; target.len()];
        for &(s, t, n) in &flow {
            rows[s] = rows[s] + n;
            cols[t] = cols[t] + n;
        }
        for (s, total) in rows.into_iter().enumerate() {
            if total != source.size(s) {
                return Err(WorldError::Flow(format!(
                    "row {:?} sums to {total}, cell has {}",
                    source.id(s),
                    source.size(s)
                )));
            }
        }
        for (t, total) in cols.into_iter().enumerate() {
            if total != target.size(t) {
                return Err(WorldError::Flow(format!(
                    "column {:?} sums to {total}, cell has {}",
                    target.id(t),
                    target.size(t)
                )));
            }
        }
        Ok(Rearrangement { source, target, flow })
    }

    /// Build from `(source cell, target cell, count)` triples keyed by cell id.
    pub fn from_entries(
        source: &Population,
        target: &Population,
        entries: &[(&str, &str, Cardinal)],
    ) -> Result<Self, WorldError> {
        let mut flow = Vec::with_capacity(entries.len());
        for (s, t, n) in entries {
            let si = source
                .index_of(s)
                .ok_or_else(|| WorldError::Flow(format!("unknown source cell {s:?}")))?;
            let ti = target
                .index_of(t)
                .ok_or_else(|| WorldError::Flow(format!("unknown target cell {t:?}")))?;
            flow.push((si, ti, *n));
        }
        Rearrangement::from_sparse(source.clone(), target.clone(), flow)
    }

    pub fn identity(p: &Population) -> Rearrangement {
        let flow = (0..p.len()).map(|s| (s, s, p.size(s))).collect();
        Rearrangement { source: p.clone(), target: p.clone(), flow }
    }

    pub fn source(&self) -> &Population {
        &self.source
    }

    pub fn target(&self) -> &Population {
        &self.target
    }

    /// The nonzero entries, sorted by source then target.
    pub fn flow(&self) -> &[FlowEntry] {
        &self.flow
    }

    pub fn inverse(&self) -> Rearrangement {
        let mut flow: Vec<FlowEntry> = self.flow.iter().map(|&(s, t, n)| (t, s, n)).collect();
        flow.sort_by_key(|&(s, t, _)| (s, t));
        Rearrangement { source: self.target.clone(), target: self.source.clone(), flow }
    }

    /// Only finitely many individuals change cell (cells matched by id).
    pub fn is_finite_support(&self) -> bool {
        let moved: Cardinal = self
            .flow
            .iter()
            .filter(|&&(s, t, _)| self.source.id(s) != self.target.id(t))
            .map(|&(_, _, n)| n)
            .sum();
        moved.is_finite()
    }

    pub fn apply(&self, w: &World) -> Result<World, WorldError> {
        let w = if w.population() == &self.source {
            w.clone()
        } else {
            w.reordered(&self.source)
                .map_err(|_| WorldError::Flow("world is not on the rearrangement's source population".into()))?
        };
        let mut feeders = vec![Vec::new(); self.target.len()];
        let mut outflows = vec![0usize; self.source.len()];
        for &(s, t, _) in &self.flow {
            feeders[t].push(s);
            outflows[s] += 1;
        }
        let mut values = Vec::with_capacity(self.target.len());
        for (t, feeders) in feeders.iter().enumerate() {
            let first = w.value(feeders[0]).clone();
            if let CellValue::Tail(_) = first {
                if feeders.len() != 1 || outflows[feeders[0]] != 1 {
                    return Err(WorldError::Flow(format!(
                        "tail cell {:?} can only be moved whole",
                        self.source.id(feeders[0])
                    )));
                }
            }
            if let Some(&s) = feeders.iter().find(|&&s| *w.value(s) != first) {
                return Err(WorldError::Flow(format!(
                    "target cell {:?} receives different values from {:?} and {:?}",
                    self.target.id(t),
                    self.source.id(feeders[0]),
                    self.source.id(s)
                )));
            }
            values.push(first);
        }
        World::new(self.target.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{q, Finite, Omega, Rational};
    use crate::worlds::{pareto_compare, Tail};
    use crate::criteria::Verdict;

    #[test]
    fn identity_and_swap() {
        let p = Population::of(&[("A", Omega), ("B", Omega)]).unwrap();
        let w = World::from_levels(p.clone(), vec![q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(Rearrangement::identity(&p).apply(&w).unwrap(), w);
        let swap = Rearrangement::from_entries(&p, &p, &[("A", "B", Omega), ("B", "A", Omega)]).unwrap();
        let swapped = swap.apply(&w).unwrap();
        assert_eq!(swapped.levels().unwrap(), vec![q(0, 1), q(1, 1)]);
        assert_eq!(swap.apply(&swapped).unwrap(), w);
    }

    #[test]
    fn injection_into_subset_is_pareto_dominated() {
        // A = A- ∪ D; σ maps A- onto A (through A- ∪ D) and D onto R.
        let p = Population::of(&[("A-", Omega), ("D", Omega), ("R", Omega)]).unwrap();
        let w = World::from_levels(p.clone(), vec![q(1, 1), q(1, 1), q(0, 1)]).unwrap();
        let inj = Rearrangement::from_entries(
            &p,
            &p,
            &[("A-", "A-", Omega), ("D", "A-", Omega), ("R", "D", Omega), ("R", "R", Omega)],
        )
        .unwrap();
        let image = inj.apply(&w).unwrap();
        assert_eq!(image.levels().unwrap(), vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(pareto_compare(&w, &image).unwrap(), Verdict::StrictlyBetter);
        assert_eq!(image.census(), w.census());
    }

    #[test]
    fn bad_flows_rejected() {
        let p = Population::of(&[("A", Omega), ("B", Finite(2))]).unwrap();
        assert!(Rearrangement::from_entries(&p, &p, &[("A", "A", Omega), ("B", "B", Finite(1))]).is_err());
        assert!(Rearrangement::from_entries(&p, &p, &[("A", "A", Omega), ("B", "A", Finite(2))]).is_err());
    }

    #[test]
    fn mixed_inflow_and_split_tails_rejected() {
        let p = Population::of(&[("A", Omega), ("B", Omega)]).unwrap();
        let w = World::from_levels(p.clone(), vec![q(1, 1), q(0, 1)]).unwrap();
        let mix = Rearrangement::from_entries(
            &p,
            &p,
            &[("A", "A", Omega), ("B", "A", Omega), ("B", "B", Omega)],
        );
        // Row A sums to ω and column A too, so the flow is valid but mixes values.
        let mix = mix.unwrap();
        assert!(mix.apply(&w).is_err());
        let t = World::new(
            p.clone(),
            vec![CellValue::Tail(Tail::geometric(q(1, 1), q(1, 2)).unwrap()), CellValue::Level(Rational::zero())],
        )
        .unwrap();
        let split = Rearrangement::from_entries(
            &p,
            &p,
            &[("A", "A", Omega), ("A", "B", Omega), ("B", "B", Omega)],
        )
        .unwrap();
        assert!(split.apply(&t).is_err());
    }

    #[test]
    fn finite_support_detection() {
        let p = Population::of(&[("A", Omega), ("x", Finite(1)), ("y", Finite(1))]).unwrap();
        let f = Rearrangement::from_entries(&p, &p, &[("A", "A", Omega), ("x", "y", Finite(1)), ("y", "x", Finite(1))])
            .unwrap();
        assert!(f.is_finite_support());
        assert!(!Rearrangement::from_entries(
            &Population::of(&[("A", Omega), ("B", Omega)]).unwrap(),
            &Population::of(&[("A", Omega), ("B", Omega)]).unwrap(),
            &[("A", "B", Omega), ("B", "A", Omega)]
        )
        .unwrap()
        .is_finite_support());
    }
}
