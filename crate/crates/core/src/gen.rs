//! Seeded random generators for worlds, rearrangements and streams.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{Cardinal, Rational};
use crate::ordered::PeriodicStream;
use crate::worlds::{Cell, CellValue, Population, Rearrangement, Tail, World};

/// Per-trial generator: one ChaCha stream per trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Which worlds a criterion can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// {0,1}-valued worlds
    Indicator,
    /// finite-valued worlds
    FiniteValued,
    /// any cell may carry a tail
    Descriptor,
}

/// The kind of values one cell takes across every world of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellFamily {
    Plain,
    Geometric,
    Harmonic,
}

const RATIOS: [(i64, i64); 6] = [(1, 2), (-1, 2), (1, 3), (-1, 3), (2, 3), (1, 4)];

/// A level with denominator ≤ 6 and magnitude ≤ 8; half the time from the coarse grid {-2, …, 2}.
pub fn level<R: Rng>(rng: &mut R) -> Rational {
    if rng.gen_bool(0.5) {
        Rational::from_integer(rng.gen_range(-2..=2))
    } else {
        let d = rng.gen_range(1..=6);
        Rational::new(rng.gen_range(-8 * d..=8 * d), d)
    }
}

fn positive_level<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(1..=6);
    Rational::new(rng.gen_range(1..=4 * d), d)
}

fn ratio<R: Rng>(rng: &mut R) -> Rational {
    let (n, d) = *RATIOS.choose(rng).unwrap();
    Rational::new(n, d)
}

pub fn population<R: Rng>(rng: &mut R, min_cells: usize, max_cells: usize) -> Population {
    let n = rng.gen_range(min_cells..=max_cells);
    let mut cells: Vec<Cell> = (0..n)
        .map(|i| {
            let size = if rng.gen_bool(0.6) { Cardinal::Omega } else { Cardinal::Finite(rng.gen_range(1..=4)) };
            Cell::new(format!("c{i}"), size)
        })
        .collect();
    if !cells.iter().any(|c| c.size.is_infinite()) {
        let i = rng.gen_range(0..n);
        cells[i].size = Cardinal::Omega;
    }
    Population::new(cells).expect("generated population is valid")
}

pub fn families<R: Rng>(rng: &mut R, pop: &Population, domain: Domain) -> Vec<CellFamily> {
    pop.cells()
        .iter()
        .map(|c| {
            if domain != Domain::Descriptor || c.size.is_finite() {
                return CellFamily::Plain;
            }
            match rng.gen_range(0..10) {
                0..=5 => CellFamily::Plain,
                6..=8 => CellFamily::Geometric,
                _ => CellFamily::Harmonic,
            }
        })
        .collect()
}

pub fn cell_value<R: Rng>(rng: &mut R, family: CellFamily, domain: Domain) -> CellValue {
    if domain == Domain::Indicator {
        return CellValue::Level(Rational::from_integer(rng.gen_range(0..=1)));
    }
    match family {
        CellFamily::Plain => CellValue::Level(level(rng)),
        CellFamily::Geometric => {
            let terms = (0..rng.gen_range(1..=2)).map(|_| (level(rng), ratio(rng))).collect();
            let exceptions: BTreeMap<u64, Rational> =
                (0..rng.gen_range(0..=2)).map(|_| (rng.gen_range(1..=6), level(rng))).collect();
            let constant = if rng.gen_bool(0.5) { Rational::zero() } else { level(rng) };
            CellValue::from_tail(Tail::mixed(constant, terms, exceptions).expect("ratios are admissible"))
        }
        CellFamily::Harmonic => CellValue::from_tail(Tail::harmonic(level(rng))),
    }
}

pub fn world<R: Rng>(rng: &mut R, pop: &Population, fams: &[CellFamily], domain: Domain) -> World {
    let values = fams.iter().map(|f| cell_value(rng, *f, domain)).collect();
    World::new(pop.clone(), values).expect("generated values fit their cells")
}

/// A population with per-cell families and `k` worlds over it.
pub struct Sample {
    pub population: Population,
    pub families: Vec<CellFamily>,
    pub worlds: Vec<World>,
}

pub fn sample<R: Rng>(rng: &mut R, k: usize, domain: Domain) -> Sample {
    let population = population(rng, 2, 8);
    let families = families(rng, &population, domain);
    let worlds = (0..k).map(|_| world(rng, &population, &families, domain)).collect();
    Sample { population, families, worlds }
}

/// A termwise non-negative value of the given family; zero about a third of the time unless `strict`.
pub fn nonneg_bump<R: Rng>(rng: &mut R, family: CellFamily, strict: bool) -> CellValue {
    if !strict && rng.gen_bool(0.35) {
        return CellValue::Level(Rational::zero());
    }
    match family {
        CellFamily::Plain => CellValue::Level(positive_level(rng)),
        CellFamily::Harmonic => CellValue::from_tail(Tail::harmonic(positive_level(rng))),
        CellFamily::Geometric => match rng.gen_range(0..3) {
            0 => CellValue::Level(positive_level(rng)),
            1 => CellValue::from_tail(
                Tail::mixed(Rational::zero(), vec![], [(rng.gen_range(1..=6), positive_level(rng))].into())
                    .expect("exception-only tail"),
            ),
            _ => {
                let r = Rational::new(1, rng.gen_range(2..=4));
                CellValue::from_tail(Tail::geometric(positive_level(rng), r).expect("ratio in (0,1)"))
            }
        },
    }
}

/// `(upper, lower)` with `upper` cellwise ≥ `lower`, strictly above in some cell when `strict`.
pub fn pareto_pair<R: Rng>(rng: &mut R, w: &World, fams: &[CellFamily], domain: Domain, strict: bool) -> (World, World) {
    let n = fams.len();
    let forced = rng.gen_range(0..n);
    if domain == Domain::Indicator {
        let mut upper = w.values().to_vec();
        if strict {
            upper[forced] = CellValue::Level(Rational::one());
        }
        let lower = upper
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if (strict && i == forced) || rng.gen_bool(0.3) {
                    CellValue::Level(Rational::zero())
                } else {
                    v.clone()
                }
            })
            .collect();
        return (w.with_values(upper).unwrap(), w.with_values(lower).unwrap());
    }
    let lower = (0..n)
        .map(|i| {
            let bump = nonneg_bump(rng, fams[i], strict && i == forced);
            w.value(i).sub(&bump).expect("bump stays in family")
        })
        .collect();
    (w.clone(), w.with_values(lower).unwrap())
}

/// Replace a random subset of cells with fresh values of the same family.
pub fn perturb<R: Rng>(rng: &mut R, w: &World, fams: &[CellFamily], domain: Domain) -> World {
    let values = w
        .values()
        .iter()
        .zip(fams)
        .map(|(v, f)| if rng.gen_bool(0.4) { cell_value(rng, *f, domain) } else { v.clone() })
        .collect();
    w.with_values(values).unwrap()
}

/// Split some cells of a shared population (all worlds refined alike).
///
/// ω cells holding only plain levels may split into two ω parts or shed a
/// finite part; finite cells may split in two. With `finite_only`, ω cells only
/// shed finite parts.
pub fn refine<R: Rng>(rng: &mut R, worlds: &[World], finite_only: bool) -> Vec<World> {
    let pop = worlds[0].population();
    let mut cells = Vec::new();
    let mut columns: Vec<Vec<CellValue>> = vec![Vec::new(); worlds.len()];
    for (i, cell) in pop.cells().iter().enumerate() {
        let plain = worlds.iter().all(|w| w.value(i).level().is_some());
        let parts: Vec<Cardinal> = match cell.size {
            Cardinal::Omega if plain && rng.gen_bool(0.5) => {
                if !finite_only && rng.gen_bool(0.5) {
                    vec![Cardinal::Omega, Cardinal::Omega]
                } else {
                    vec![Cardinal::Omega, Cardinal::Finite(rng.gen_range(1..=2))]
                }
            }
            Cardinal::Finite(n) if n >= 2 && rng.gen_bool(0.5) => {
                let k = rng.gen_range(1..n);
                vec![Cardinal::Finite(k), Cardinal::Finite(n - k)]
            }
            size => vec![size],
        };
        for (j, size) in parts.into_iter().enumerate() {
            let id = if j == 0 { cell.id.clone() } else { format!("{}.{j}", cell.id) };
            cells.push(Cell::new(id, size));
            for (col, w) in columns.iter_mut().zip(worlds) {
                col.push(w.value(i).clone());
            }
        }
    }
    let refined = Population::new(cells).expect("refinement keeps an ω cell");
    columns
        .into_iter()
        .map(|vals| World::new(refined.clone(), vals).expect("refinement preserves values"))
        .collect()
}

/// A random cell-level permutation among equal-size cells; with `finite_only`
/// every ω cell stays put, so only finitely many individuals move.
pub fn cell_permutation<R: Rng>(rng: &mut R, pop: &Population, finite_only: bool) -> Rearrangement {
    cell_permutation_within(rng, pop, finite_only, |_| 0)
}

/// As [`cell_permutation`], moving cells only within classes of equal `class(i)`.
pub fn cell_permutation_within<R: Rng>(
    rng: &mut R,
    pop: &Population,
    finite_only: bool,
    class: impl Fn(usize) -> u8,
) -> Rearrangement {
    let mut by_size: BTreeMap<(Cardinal, u8), Vec<usize>> = BTreeMap::new();
    for (i, c) in pop.cells().iter().enumerate() {
        if !(finite_only && c.size.is_infinite()) {
            by_size.entry((c.size, class(i))).or_default().push(i);
        }
    }
    let mut flow = vec![vec![Cardinal::ZERO; pop.len()]; pop.len()];
    for i in 0..pop.len() {
        flow[i][i] = pop.size(i);
    }
    for group in by_size.values() {
        let mut shuffled = group.clone();
        shuffled.shuffle(rng);
        for (&s, &t) in group.iter().zip(&shuffled) {
            flow[s][s] = Cardinal::ZERO;
            flow[s][t] = pop.size(s);
        }
    }
    for i in 0..pop.len() {
        if flow[i].iter().all(|c| c.is_zero()) {
            flow[i][i] = pop.size(i);
        }
    }
    Rearrangement::new(pop.clone(), pop.clone(), flow).expect("equal-size cell permutation")
}

fn stream_values<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| Rational::new(rng.gen_range(-4..=4), rng.gen_range(1..=2))).collect()
}

pub fn stream<R: Rng>(rng: &mut R) -> PeriodicStream {
    let prefix_len = rng.gen_range(0..=3);
    let prefix = stream_values(rng, prefix_len);
    let period_len = rng.gen_range(1..=4);
    let period = stream_values(rng, period_len);
    PeriodicStream::new(prefix, period).expect("nonempty period")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{compare, Criterion, Verdict};

    #[test]
    fn deterministic_per_trial() {
        let a = sample(&mut trial_rng(7, 3), 2, Domain::Descriptor);
        let b = sample(&mut trial_rng(7, 3), 2, Domain::Descriptor);
        assert_eq!(a.worlds, b.worlds);
    }

    #[test]
    fn pareto_below_is_dominated() {
        for t in 0..200 {
            let mut rng = trial_rng(11, t);
            for domain in [Domain::Indicator, Domain::FiniteValued, Domain::Descriptor] {
                let s = sample(&mut rng, 1, domain);
                let (w, v) = pareto_pair(&mut rng, &s.worlds[0], &s.families, domain, true);
                assert_eq!(compare(Criterion::ParetoPreorder, &w, &v).unwrap(), Verdict::StrictlyBetter);
            }
        }
    }

    #[test]
    fn refinement_and_permutation_preserve_census() {
        for t in 0..200 {
            let mut rng = trial_rng(5, t);
            let s = sample(&mut rng, 2, Domain::FiniteValued);
            let refined = refine(&mut rng, &s.worlds, false);
            assert_eq!(refined[0].census(), s.worlds[0].census());
            let pi = cell_permutation(&mut rng, refined[0].population(), t % 2 == 0);
            assert_eq!(pi.apply(&refined[0]).unwrap().census(), s.worlds[0].census());
            if t % 2 == 0 {
                assert!(pi.is_finite_support());
            }
        }
    }
}

/// Two worlds over one sampled population: independent half the time,
/// otherwise the second is a perturbation of the first.
pub fn pair<R: Rng>(rng: &mut R, domain: Domain) -> (World, World) {
    let s = sample(rng, 2, domain);
    if rng.gen_bool(0.5) {
        let [w, v]: [World; 2] = s.worlds.try_into().expect("two worlds");
        return (w, v);
    }
    let v = perturb(rng, &s.worlds[0], &s.families, domain);
    (s.worlds[0].clone(), v)
}

/// A finite-valued pair over at most four cells, finite ones holding at most
/// four individuals; levels come from {0, 1, 2, 3} half the time.
pub fn small_pair<R: Rng>(rng: &mut R) -> (World, World) {
    let pop = population(rng, 1, 4);
    let coarse = rng.gen_bool(0.5);
    let draw = |rng: &mut R| if coarse { Rational::from_integer(rng.gen_range(0..=3)) } else { level(rng) };
    let w: Vec<Rational> = (0..pop.len()).map(|_| draw(rng)).collect();
    let v: Vec<Rational> = (0..pop.len()).map(|_| draw(rng)).collect();
    (World::from_levels(pop.clone(), w).unwrap(), World::from_levels(pop, v).unwrap())
}

/// A pair for the finite-sum truncation check: at most one finite cell (≤ 3
/// individuals, differences of magnitude ≤ 2), one or two ω cells that carry
/// either a constant difference in {-2, …, 2} or a geometric tail with limit 0,
/// magnitude ≤ 1 and ratio of magnitude ≤ 1/2 on one side.
pub fn fsp_pair<R: Rng>(rng: &mut R) -> (World, World) {
    let mut cells = Vec::new();
    let mut w = Vec::new();
    let mut v = Vec::new();
    if rng.gen_bool(0.7) {
        cells.push(Cell::new("f", Cardinal::Finite(rng.gen_range(1..=3))));
        let x = Rational::from_integer(rng.gen_range(-1..=1));
        let d = Rational::from_integer(rng.gen_range(-2..=2));
        v.push(CellValue::Level(&x - &d));
        w.push(CellValue::Level(x));
    }
    for i in 0..rng.gen_range(1..=2) {
        cells.push(Cell::new(format!("x{i}"), Cardinal::Omega));
        if rng.gen_bool(0.5) {
            let x = Rational::from_integer(rng.gen_range(-1..=1));
            let d = Rational::from_integer(rng.gen_range(-2..=2));
            v.push(CellValue::Level(&x - &d));
            w.push(CellValue::Level(x));
        } else {
            let a = Rational::new(rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 }, 2);
            let (n, d) = *[(1, 2), (-1, 2), (1, 3), (-1, 3), (1, 4)].choose(rng).unwrap();
            let tail = CellValue::from_tail(Tail::geometric(a, Rational::new(n, d)).expect("ratio below 1"));
            let zero = CellValue::Level(Rational::zero());
            if rng.gen_bool(0.5) {
                w.push(tail);
                v.push(zero);
            } else {
                w.push(zero);
                v.push(tail);
            }
        }
    }
    let pop = Population::new(cells).expect("at least one ω cell");
    (World::new(pop.clone(), w).unwrap(), World::new(pop, v).unwrap())
}
