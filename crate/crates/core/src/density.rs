//! How often each criterion ranks a random pair of worlds, under an explicit,
//! parameterized distribution on pairs.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{compare, Criterion, Verdict};
use crate::error::{Error, Result};
use crate::exactnum::{Cardinal, Rational};
use crate::gen::trial_rng;
use crate::worlds::{Cell, Population, World};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PairGenerator {
    /// Both worlds drawn independently.
    Uniform,
    /// The worlds differ on finite cells only.
    FiniteDifference,
    /// One ω cell where `w` is higher and one where `v` is.
    BothSignOmega,
    /// `BothSignOmega` with probability `p`, otherwise `FiniteDifference`.
    Mixed { p: f64 },
}

impl PairGenerator {
    /// The Sum Preorder's comparable fraction implied by the generator, when it is fixed by construction.
    pub fn expected_sp_comparable(&self) -> Option<f64> {
        match self {
            PairGenerator::Uniform => None,
            PairGenerator::FiniteDifference => Some(1.0),
            PairGenerator::BothSignOmega => Some(0.0),
            PairGenerator::Mixed { p } => Some(1.0 - p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PairGenerator::Uniform => "uniform".into(),
            PairGenerator::FiniteDifference => "finite-difference".into(),
            PairGenerator::BothSignOmega => "both-sign-omega".into(),
            PairGenerator::Mixed { p } => format!("mixed(p={p})"),
        }
    }
}

/// Levels `k / denom` with `|k / denom| ≤ max_abs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub max_abs: i64,
    pub denom: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    pub criteria: Vec<Criterion>,
    pub generator: PairGenerator,
    pub min_cells: usize,
    pub max_cells: usize,
    pub grid: Grid,
    /// Chance that a cell beyond the forced ω cells is infinite.
    pub omega_prob: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            criteria: vec![
                Criterion::ParetoPreorder,
                Criterion::SumPreorder,
                Criterion::FiniteSumPreorder,
                Criterion::SumPlusDifferences,
                Criterion::ConvergentDivergences,
            ],
            generator: PairGenerator::Uniform,
            min_cells: 2,
            max_cells: 5,
            grid: Grid { max_abs: 2, denom: 2 },
            omega_prob: 0.5,
            samples: 1000,
            seed: 0,
        }
    }
}

impl DensityConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("density config: {m}")));
        if self.samples == 0 {
            return bad("sample count must be at least 1");
        }
        if self.criteria.is_empty() || self.criteria.iter().any(|c| c.is_ordered()) {
            return bad("criteria must be a nonempty set of unordered criteria");
        }
        if self.min_cells < 2 || self.min_cells > self.max_cells {
            return bad("cell counts need 2 ≤ min ≤ max");
        }
        if self.grid.denom < 1 || self.grid.max_abs < 1 {
            return bad("grid needs a positive denominator and bound");
        }
        if !(0.0..=1.0).contains(&self.omega_prob) {
            return bad("omega probability must lie in [0, 1]");
        }
        if let PairGenerator::Mixed { p } = self.generator {
            if !(0.0..=1.0).contains(&p) {
                return bad("mixture probability must lie in [0, 1]");
            }
        }
        Ok(())
    }

    fn level<R: Rng>(&self, rng: &mut R) -> Rational {
        let k = self.grid.max_abs * self.grid.denom;
        Rational::new(rng.gen_range(-k..=k), self.grid.denom)
    }

    /// A population with at least `omega` infinite cells and at least one finite cell.
    fn population<R: Rng>(&self, rng: &mut R, omega: usize) -> Population {
        let n = rng.gen_range(self.min_cells..=self.max_cells).max(omega + 1);
        let cells = (0..n)
            .map(|i| {
                let infinite = i < omega || (i + 1 < n && rng.gen_bool(self.omega_prob));
                let size = if infinite { Cardinal::Omega } else { Cardinal::Finite(rng.gen_range(1..=3)) };
                Cell::new(format!("c{i}"), size)
            })
            .collect();
        Population::new(cells).expect("fresh ids and an ω cell")
    }

    /// Sample `index` of the run, reproducible on its own.
    pub fn pair(&self, index: u64) -> (World, World) {
        let mut rng = trial_rng(self.seed, index);
        let generator = match self.generator {
            PairGenerator::Mixed { p } if rng.gen_bool(p) => PairGenerator::BothSignOmega,
            PairGenerator::Mixed { .. } => PairGenerator::FiniteDifference,
            g => g,
        };
        let omega = match generator {
            PairGenerator::BothSignOmega => 2,
            _ => 1,
        };
        let pop = self.population(&mut rng, omega);
        let mut w = Vec::new();
        let mut v = Vec::new();
        for (i, cell) in pop.cells().iter().enumerate() {
            let x = self.level(&mut rng);
            let y = match generator {
                PairGenerator::FiniteDifference if cell.size.is_infinite() => x.clone(),
                PairGenerator::BothSignOmega if i < 2 => {
                    let step = Rational::new(rng.gen_range(1..=2 * self.grid.denom), self.grid.denom);
                    if i == 0 {
                        &x - &step
                    } else {
                        &x + &step
                    }
                }
                _ => self.level(&mut rng),
            };
            w.push(x);
            v.push(y);
        }
        (
            World::from_levels(pop.clone(), w).expect("levels fit"),
            World::from_levels(pop, v).expect("levels fit"),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub criterion: String,
    pub generator: String,
    pub samples: u64,
    pub strictly_better: u64,
    pub strictly_worse: u64,
    pub equivalent: u64,
    pub incomparable: u64,
    pub frac_comparable: f64,
    pub frac_strict: f64,
    pub frac_equivalent: f64,
    pub seed: u64,
}

impl DensityRow {
    pub fn comparable(&self) -> u64 {
        self.samples - self.incomparable
    }
}

#[derive(Clone, Copy, Default)]
struct Tally([u64; 4]);

impl Tally {
    fn add(mut self, v: Verdict) -> Tally {
        let i = match v {
            Verdict::StrictlyBetter => 0,
            Verdict::StrictlyWorse => 1,
            Verdict::Equivalent => 2,
            Verdict::Incomparable => 3,
        };
        self.0[i] += 1;
        self
    }

    fn merge(mut self, o: Tally) -> Tally {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

/// One row per criterion; the counts do not depend on thread scheduling.
pub fn run_density(config: &DensityConfig) -> Result<Vec<DensityRow>> {
    config.validate()?;
    let k = config.criteria.len();
    let tallies = (0..config.samples)
        .into_par_iter()
        .map(|i| -> Result<Vec<Tally>> {
            let (w, v) = config.pair(i);
            config.criteria.iter().map(|&c| Ok(Tally::default().add(compare(c, &w, &v)?))).collect()
        })
        .try_reduce(
            || vec![Tally::default(); k],
            |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()),
        )?;
    let n = config.samples as f64;
    Ok(config
        .criteria
        .iter()
        .zip(tallies)
        .map(|(c, Tally([sb, sw, eq, inc]))| DensityRow {
            criterion: c.name().into(),
            generator: config.generator.label(),
            samples: config.samples,
            strictly_better: sb,
            strictly_worse: sw,
            equivalent: eq,
            incomparable: inc,
            frac_comparable: (config.samples - inc) as f64 / n,
            frac_strict: (sb + sw) as f64 / n,
            frac_equivalent: eq as f64 / n,
            seed: config.seed,
        })
        .collect())
}
