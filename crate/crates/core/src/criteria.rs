//! Decision procedures for the unordered welfare relations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Mass, Rational, SumClass};
use crate::worlds::{delta_profile, DeltaProfile, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrictlyBetter,
    StrictlyWorse,
    Equivalent,
    Incomparable,
}

impl Verdict {
    /// Assemble a verdict from the two weak comparisons `w ≽ v` and `v ≽ w`.
    pub fn from_weak(forward: bool, backward: bool) -> Verdict {
        match (forward, backward) {
            (true, true) => Verdict::Equivalent,
            (true, false) => Verdict::StrictlyBetter,
            (false, true) => Verdict::StrictlyWorse,
            (false, false) => Verdict::Incomparable,
        }
    }

    pub fn flip(self) -> Verdict {
        match self {
            Verdict::StrictlyBetter => Verdict::StrictlyWorse,
            Verdict::StrictlyWorse => Verdict::StrictlyBetter,
            other => other,
        }
    }

    /// `w ≽ v` holds.
    pub fn forward(self) -> bool {
        matches!(self, Verdict::StrictlyBetter | Verdict::Equivalent)
    }

    /// `v ≽ w` holds.
    pub fn backward(self) -> bool {
        matches!(self, Verdict::StrictlyWorse | Verdict::Equivalent)
    }

    pub fn is_comparable(self) -> bool {
        self != Verdict::Incomparable
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Verdict::StrictlyBetter | Verdict::StrictlyWorse)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StrictlyBetter => "StrictlyBetter",
            Verdict::StrictlyWorse => "StrictlyWorse",
            Verdict::Equivalent => "Equivalent",
            Verdict::Incomparable => "Incomparable",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "sp")]
    SumPreorder,
    #[serde(rename = "fsp")]
    FiniteSumPreorder,
    #[serde(rename = "cp")]
    CountingPreorder,
    #[serde(rename = "pareto")]
    ParetoPreorder,
    #[serde(rename = "spd")]
    SumPlusDifferences,
    #[serde(rename = "cdv")]
    ConvergentDivergences,
    #[serde(rename = "cu")]
    CatchingUp,
    #[serde(rename = "ot")]
    Overtaking,
}

impl Criterion {
    pub const ALL: [Criterion; 8] = [
        Criterion::SumPreorder,
        Criterion::FiniteSumPreorder,
        Criterion::CountingPreorder,
        Criterion::ParetoPreorder,
        Criterion::SumPlusDifferences,
        Criterion::ConvergentDivergences,
        Criterion::CatchingUp,
        Criterion::Overtaking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::SumPreorder => "sp",
            Criterion::FiniteSumPreorder => "fsp",
            Criterion::CountingPreorder => "cp",
            Criterion::ParetoPreorder => "pareto",
            Criterion::SumPlusDifferences => "spd",
            Criterion::ConvergentDivergences => "cdv",
            Criterion::CatchingUp => "cu",
            Criterion::Overtaking => "ot",
        }
    }

    pub fn is_ordered(self) -> bool {
        matches!(self, Criterion::CatchingUp | Criterion::Overtaking)
    }

    /// Whether the criterion accepts this pair of (aligned) worlds.
    pub fn accepts(self, w: &World, v: &World) -> bool {
        match self {
            Criterion::CountingPreorder => w.is_indicator() && v.is_indicator(),
            Criterion::SumPlusDifferences => w.is_finite_valued() && v.is_finite_valued(),
            Criterion::CatchingUp | Criterion::Overtaking => false,
            _ => true,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Criterion> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown criterion {s:?}")))
    }
}

fn profile(w: &World, v: &World) -> Result<DeltaProfile> {
    if w.population() != v.population() && w.population().same_cells(v.population()) {
        return Ok(delta_profile(w, &v.reordered(w.population())?)?);
    }
    Ok(delta_profile(w, v)?)
}

fn sp_weak(d: &DeltaProfile) -> bool {
    d.sum_class().is_nonnegative()
}

fn fsp_weak(d: &DeltaProfile) -> bool {
    let Mass::Finite(losses) = d.neg_mass() else {
        return false;
    };
    match d.pos_mass() {
        Mass::Infinite => true,
        Mass::Finite(gains) => gains > losses || (gains == losses && d.pos_count().is_finite()),
    }
}

fn cp_weak(d: &DeltaProfile) -> bool {
    d.neg_count().is_finite() && d.pos_count() >= d.neg_count()
}

fn pareto_weak(d: &DeltaProfile) -> bool {
    d.neg_count().is_zero()
}

fn spd_weak(d: &DeltaProfile) -> bool {
    if sp_weak(d) {
        return true;
    }
    let blocks = d.constant_blocks().expect("finite-valued profile");
    let min_gain = blocks.iter().filter(|(x, _)| x.is_positive()).map(|(x, _)| x).min();
    let max_loss = blocks.iter().filter(|(x, _)| x.is_negative()).map(|(x, _)| -x).max();
    match (min_gain, max_loss) {
        (Some(g), Some(l)) => *g >= l,
        _ => false,
    }
}

fn cdv_weak(d: &DeltaProfile) -> bool {
    if sp_weak(d) {
        return true;
    }
    let limits = d.omega_limits();
    let (Some(top), Some(bottom)) = (limits.iter().max(), limits.iter().min()) else {
        return false;
    };
    let two = Rational::from_integer(2);
    let infinitely_above = top.is_positive() && d.count_above(&(top / &two)).is_infinite();
    let finitely_below = !bottom.is_negative();
    infinitely_above && finitely_below
}

fn weak_test(criterion: Criterion) -> Result<fn(&DeltaProfile) -> bool> {
    Ok(match criterion {
        Criterion::SumPreorder => sp_weak,
        Criterion::FiniteSumPreorder => fsp_weak,
        Criterion::CountingPreorder => cp_weak,
        Criterion::ParetoPreorder => pareto_weak,
        Criterion::SumPlusDifferences => spd_weak,
        Criterion::ConvergentDivergences => cdv_weak,
        Criterion::CatchingUp | Criterion::Overtaking => {
            return Err(Error::Domain(format!(
                "{criterion} compares ordered streams, not worlds"
            )))
        }
    })
}

fn check_domain(criterion: Criterion, w: &World, v: &World) -> Result<()> {
    match criterion {
        Criterion::CountingPreorder if !(w.is_indicator() && v.is_indicator()) => {
            Err(Error::Domain("cp only accepts {0,1}-valued worlds".into()))
        }
        Criterion::SumPlusDifferences if !(w.is_finite_valued() && v.is_finite_valued()) => {
            Err(Error::Domain("spd only accepts finite-valued worlds".into()))
        }
        _ => Ok(()),
    }
}

/// Does `w ≽ v` hold under `criterion`?
pub fn weakly_above(criterion: Criterion, w: &World, v: &World) -> Result<bool> {
    let test = weak_test(criterion)?;
    check_domain(criterion, w, v)?;
    Ok(test(&profile(w, v)?))
}

pub fn compare(criterion: Criterion, w: &World, v: &World) -> Result<Verdict> {
    let test = weak_test(criterion)?;
    check_domain(criterion, w, v)?;
    let d = profile(w, v)?;
    Ok(Verdict::from_weak(test(&d), test(&d.negate())))
}

pub fn compare_sp(w: &World, v: &World) -> Result<Verdict> {
    compare(Criterion::SumPreorder, w, v)
}

pub fn compare_fsp(w: &World, v: &World) -> Result<Verdict> {
    compare(Criterion::FiniteSumPreorder, w, v)
}

pub fn compare_cp(w: &World, v: &World) -> Result<Verdict> {
    compare(Criterion::CountingPreorder, w, v)
}

pub fn compare_pareto(w: &World, v: &World) -> Result<Verdict> {
    compare(Criterion::ParetoPreorder, w, v)
}

pub fn compare_spd(w: &World, v: &World) -> Result<Verdict> {
    compare(Criterion::SumPlusDifferences, w, v)
}

pub fn compare_cdv(w: &World, v: &World) -> Result<Verdict> {
    compare(Criterion::ConvergentDivergences, w, v)
}

/// Unconditional sum of `w - v`.
pub fn sum_of_differences(w: &World, v: &World) -> Result<SumClass> {
    Ok(profile(w, v)?.sum_class())
}
