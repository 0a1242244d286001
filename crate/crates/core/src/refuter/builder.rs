use std::collections::BTreeSet;

use super::{CertStep, ContradictionKind, Direction, Levels, ProofCase, RefutationCertificate, Target, SCHEMA};
use crate::error::{Error, Result};
use crate::exactnum::{Cardinal, Rational};
use crate::worlds::{canonical_pair, convex_combine, Cell, FlowEntry, Population, Rearrangement, World};

/// The joint cell structure of a pair, refined as a derivation needs.
#[derive(Clone, Debug)]
pub(super) struct Layout {
    pub cells: Vec<Cell>,
    pub w: Levels,
    pub v: Levels,
}

impl Layout {
    pub fn from_pair(w: &World, v: &World) -> Result<Layout> {
        let (cw, cv) = canonical_pair(w, v)?;
        let levels = |x: &World| x.levels().ok_or_else(|| Error::Domain("certificates need finite-valued worlds".into()));
        Ok(Layout { cells: cw.population().cells().to_vec(), w: levels(&cw)?, v: levels(&cv)? })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn size(&self, i: usize) -> Cardinal {
        self.cells[i].size
    }

    fn push_copy(&mut self, i: usize, id: String, size: Cardinal) -> usize {
        self.cells.push(Cell::new(id, size));
        self.w.push(self.w[i].clone());
        self.v.push(self.v[i].clone());
        self.cells.len() - 1
    }

    /// Split the ω cell `i` into `parts` ω cells; `i` stays the first part.
    pub fn split_omega(&mut self, i: usize, parts: usize) -> Vec<usize> {
        assert!(self.size(i).is_infinite() && parts >= 1);
        let base = self.cells[i].id.clone();
        if parts == 1 {
            return vec![i];
        }
        self.cells[i].id = format!("{base}/1");
        let mut out = vec![i];
        for j in 2..=parts {
            out.push(self.push_copy(i, format!("{base}/{j}"), Cardinal::Omega));
        }
        out
    }

    /// Carve `n` singleton cells out of cell `i`.
    pub fn carve(&mut self, i: usize, n: u64) -> Vec<usize> {
        let base = self.cells[i].id.clone();
        let size = self.size(i);
        assert!(n >= 1 && Cardinal::Finite(n) <= size);
        let mut out = Vec::new();
        let first_new = if size == Cardinal::Finite(n) {
            self.cells[i] = Cell::new(format!("{base}#1"), Cardinal::Finite(1));
            out.push(i);
            2
        } else {
            if let Cardinal::Finite(k) = size {
                self.cells[i].size = Cardinal::Finite(k - n);
            }
            1
        };
        for j in first_new..=n {
            out.push(self.push_copy(i, format!("{base}#{j}"), Cardinal::Finite(1)));
        }
        out
    }

    pub fn population(&self) -> Result<Population> {
        Ok(Population::new(self.cells.clone())?)
    }
}

/// `levels` with every cell in `cells` set to `x`.
pub(super) fn set(levels: &Levels, cells: &[usize], x: &Rational) -> Levels {
    let mut out = levels.clone();
    for &i in cells {
        out[i] = x.clone();
    }
    out
}

/// Every cell mapped to itself except those in `moved`, followed by `moves`.
fn flow_with(pop: &Population, moved: &[usize], moves: impl IntoIterator<Item = FlowEntry>) -> Vec<FlowEntry> {
    (0..pop.len()).filter(|i| !moved.contains(i)).map(|i| (i, i, pop.size(i))).chain(moves).collect()
}

/// Exchange the ω cell `single` with the union of `group`, fixing everything else.
pub(super) fn swap_flow(pop: &Population, single: usize, group: &[usize]) -> Vec<FlowEntry> {
    let moved: Vec<usize> = group.iter().copied().chain([single]).collect();
    let moves = group.iter().flat_map(|&g| [(single, g, pop.size(g)), (g, single, pop.size(g))]);
    flow_with(pop, &moved, moves)
}

/// Exchange equal-size cells pairwise.
pub(super) fn pair_swap_flow(pop: &Population, pairs: &[(usize, usize)]) -> Vec<FlowEntry> {
    let moved: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let moves = pairs.iter().flat_map(|&(a, b)| [(a, b, pop.size(a)), (b, a, pop.size(b))]);
    flow_with(pop, &moved, moves)
}

/// Cyclic shift by `k` over the singleton cells `z`: `z[j]` receives from `z[j + k]`.
pub(super) fn shift_flow(pop: &Population, z: &[usize], k: usize) -> Vec<FlowEntry> {
    let n = z.len();
    flow_with(pop, z, (0..n).map(|j| (z[(j + k) % n], z[j], Cardinal::Finite(1))))
}

/// Smallest `n` with `(h - l) / n + l < m`.
pub(super) fn count_down(h: &Rational, l: &Rational, m: &Rational) -> usize {
    ((h - l) / (m - l)).floor_u64().expect("m above l") as usize + 1
}

/// Smallest `n` with `h - (h - l) / n > m`.
pub(super) fn count_up(h: &Rational, l: &Rational, m: &Rational) -> usize {
    ((h - l) / (h - m)).floor_u64().expect("m below h") as usize + 1
}

pub(super) struct Builder {
    pop: Population,
    steps: Vec<CertStep>,
    facts: Vec<(Levels, Levels)>,
}

impl Builder {
    pub fn new(pop: Population) -> Builder {
        Builder { pop, steps: Vec::new(), facts: Vec::new() }
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn left(&self, i: usize) -> &Levels {
        &self.facts[i].0
    }

    pub fn right(&self, i: usize) -> &Levels {
        &self.facts[i].1
    }

    fn push(&mut self, step: CertStep, left: Levels, right: Levels) -> usize {
        self.steps.push(step);
        self.facts.push((left, right));
        self.steps.len() - 1
    }

    fn world(&self, levels: &Levels) -> World {
        World::from_levels(self.pop.clone(), levels.clone()).expect("levels fit the population")
    }

    pub fn assume(&mut self, left: Levels, right: Levels) -> usize {
        self.push(CertStep::AssumeWeak { left: left.clone(), right: right.clone() }, left, right)
    }

    pub fn pareto(&mut self, from: Levels, to: Levels) -> usize {
        debug_assert!(from.iter().zip(&to).all(|(a, b)| a >= b), "Pareto step must dominate");
        self.push(CertStep::ByStrongPareto { from: from.clone(), to: to.clone() }, from, to)
    }

    pub fn rearrange(&mut self, premise: usize, flow: Vec<FlowEntry>) -> Result<usize> {
        let r = Rearrangement::from_sparse(self.pop.clone(), self.pop.clone(), flow.clone())?;
        let image = |l: &Levels| -> Result<Levels> {
            Ok(r.apply(&self.world(l))?.levels().expect("levels stay levels"))
        };
        let (left, right) = (image(self.left(premise))?, image(self.right(premise))?);
        let step = CertStep::ByRearrangement { premise, flow, left: left.clone(), right: right.clone() };
        Ok(self.push(step, left, right))
    }

    /// Equal-weight Convex Dominance over `premises`.
    pub fn convex(&mut self, premises: Vec<usize>) -> Result<usize> {
        let alpha = Rational::new(1, premises.len() as i64);
        let weights = vec![alpha.clone(); premises.len()];
        let mix = |side: &dyn Fn(usize) -> Levels| -> Result<Levels> {
            let parts: Vec<(Rational, World)> =
                premises.iter().map(|&p| (alpha.clone(), self.world(&side(p)))).collect();
            Ok(convex_combine(&parts)?.levels().expect("levels stay levels"))
        };
        let left = mix(&|p| self.left(p).clone())?;
        let right = mix(&|p| self.right(p).clone())?;
        let step = CertStep::ByConvexDominance { weights, premises, left: left.clone(), right: right.clone() };
        Ok(self.push(step, left, right))
    }

    pub fn trans(&mut self, chain: Vec<usize>) -> usize {
        debug_assert!(chain.windows(2).all(|p| self.right(p[0]) == self.left(p[1])), "broken chain");
        let left = self.left(chain[0]).clone();
        let right = self.right(*chain.last().unwrap()).clone();
        let step = CertStep::ByTransitivity { chain, left: left.clone(), right: right.clone() };
        self.push(step, left, right)
    }

    /// From `P ≽ Q` with `P = h` on `high`, `P = l` on the parts `low`, and `Q`
    /// constant across both: average `P` downward and conclude `P_m ≽ Q`.
    pub fn ivl_down(&mut self, fact: usize, high: &[usize], low: &[usize], l: &Rational, h: &Rational, m: &Rational) -> Result<usize> {
        let p = self.left(fact).clone();
        let region: Vec<usize> = high.iter().chain(low).copied().collect();
        let p_m = set(&p, &region, m);
        let n = count_down(h, l, m);
        if n == 1 {
            let up = self.pareto(p_m, p);
            return Ok(self.trans(vec![up, fact]));
        }
        assert_eq!(low.len(), n - 1, "low region must be split into n - 1 parts");
        let mut premises = vec![fact];
        for &part in low {
            let flow = swap_flow(&self.pop, part, high);
            premises.push(self.rearrange(fact, flow)?);
        }
        let avg = self.convex(premises)?;
        let up = self.pareto(p_m, self.left(avg).clone());
        Ok(self.trans(vec![up, avg]))
    }

    /// From `Q ≽ P` with `P = h` on the parts `high`, `P = l` on `low`, and `Q`
    /// constant across both: average `P` upward and conclude `Q ≽ P_m`.
    pub fn ivl_up(&mut self, fact: usize, high: &[usize], low: &[usize], l: &Rational, h: &Rational, m: &Rational) -> Result<usize> {
        let p = self.right(fact).clone();
        let region: Vec<usize> = high.iter().chain(low).copied().collect();
        let p_m = set(&p, &region, m);
        let n = count_up(h, l, m);
        if n == 1 {
            let down = self.pareto(p, p_m);
            return Ok(self.trans(vec![fact, down]));
        }
        assert_eq!(high.len(), n - 1, "high region must be split into n - 1 parts");
        let mut premises = vec![fact];
        for &part in high {
            let flow = swap_flow(&self.pop, part, low);
            premises.push(self.rearrange(fact, flow)?);
        }
        let avg = self.convex(premises)?;
        let down = self.pareto(self.right(avg).clone(), p_m);
        Ok(self.trans(vec![avg, down]))
    }

    /// Split value, first form: `P ≽ Q` with `P ≤ Q` off the region and `Q = k ∈ (l, h)` on it.
    pub fn split_value_down(&mut self, fact: usize, high: &[usize], low: &[usize], l: &Rational, h: &Rational, k: &Rational) -> Result<usize> {
        let m = l.midpoint(k);
        let pm_q = self.ivl_down(fact, high, low, l, h, &m)?;
        let strict = self.pareto(self.right(fact).clone(), self.left(pm_q).clone());
        Ok(self.trans(vec![pm_q, strict]))
    }

    /// Split value, second form: `Q ≽ P` with `P ≥ Q` off the region and `Q = k ∈ (l, h)` on it.
    pub fn split_value_up(&mut self, fact: usize, high: &[usize], low: &[usize], l: &Rational, h: &Rational, k: &Rational) -> Result<usize> {
        let m = k.midpoint(h);
        let q_pm = self.ivl_up(fact, high, low, l, h, &m)?;
        let strict = self.pareto(self.right(q_pm).clone(), self.left(fact).clone());
        Ok(self.trans(vec![q_pm, strict]))
    }

    pub fn conclude(mut self, kind: ContradictionKind, premise: usize, case: ProofCase) -> RefutationCertificate {
        let (w, v) = self.facts[0].clone();
        self.steps.push(CertStep::ConcludeContradiction { kind, premise });
        let used_axioms: BTreeSet<_> = self.steps.iter().filter_map(CertStep::axiom).collect();
        RefutationCertificate {
            schema: SCHEMA.into(),
            case,
            population: self.pop,
            target: Target { w, v, direction: Direction::Forward },
            steps: self.steps,
            used_axioms,
        }
    }
}

/// Split counts for the low and high parts of an ω cell, as the plan in hand requires.
pub(super) fn parts(n: usize) -> usize {
    n.saturating_sub(1).max(1)
}
