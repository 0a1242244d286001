//! Generate-and-assert checks of the axioms against any criterion.

mod schemas;
mod special;
mod streams;
pub mod witness;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::Criterion;
use crate::error::{Error, Result};
use crate::gen::{trial_rng, Domain};

pub use special::{check_completeness_impossible, check_lv_fact};
pub use streams::swap_symmetric_pair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    StrongPareto,
    PermutationInvariance,
    QuasiIndependence,
    Anonymity,
    FiniteAnonymity,
    Completeness,
    Transitivity,
    Reflexivity,
    WeakPareto,
    ZeroIndependence,
    SumAxiom,
    RestrictedTransfersOriginal,
    RestrictedTransfersCorrected,
    ConvexDominance,
}

impl AxiomId {
    pub const ALL: [AxiomId; 14] = [
        AxiomId::Reflexivity,
        AxiomId::Transitivity,
        AxiomId::StrongPareto,
        AxiomId::PermutationInvariance,
        AxiomId::QuasiIndependence,
        AxiomId::ConvexDominance,
        AxiomId::Anonymity,
        AxiomId::FiniteAnonymity,
        AxiomId::Completeness,
        AxiomId::WeakPareto,
        AxiomId::ZeroIndependence,
        AxiomId::SumAxiom,
        AxiomId::RestrictedTransfersOriginal,
        AxiomId::RestrictedTransfersCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::StrongPareto => "strong-pareto",
            AxiomId::PermutationInvariance => "permutation-invariance",
            AxiomId::QuasiIndependence => "quasi-independence",
            AxiomId::Anonymity => "anonymity",
            AxiomId::FiniteAnonymity => "finite-anonymity",
            AxiomId::Completeness => "completeness",
            AxiomId::Transitivity => "transitivity",
            AxiomId::Reflexivity => "reflexivity",
            AxiomId::WeakPareto => "weak-pareto",
            AxiomId::ZeroIndependence => "zero-independence",
            AxiomId::SumAxiom => "sum",
            AxiomId::RestrictedTransfersOriginal => "restricted-transfers-original",
            AxiomId::RestrictedTransfersCorrected => "restricted-transfers-corrected",
            AxiomId::ConvexDominance => "convex-dominance",
        }
    }

    /// Whether `criterion` has a domain on which this axiom's schema can be instantiated.
    pub fn applies_to(self, criterion: Criterion) -> bool {
        use AxiomId::*;
        match criterion {
            Criterion::CatchingUp | Criterion::Overtaking => {
                matches!(self, Reflexivity | Transitivity | StrongPareto | PermutationInvariance | Anonymity | Completeness)
            }
            Criterion::CountingPreorder => matches!(
                self,
                Reflexivity
                    | Transitivity
                    | StrongPareto
                    | PermutationInvariance
                    | Anonymity
                    | FiniteAnonymity
                    | Completeness
                    | WeakPareto
            ),
            _ => true,
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<AxiomId> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown axiom {s:?}")))
    }
}

/// One violated instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: u64,
    pub inputs: Vec<String>,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub label: String,
    pub axiom: Option<AxiomId>,
    pub criterion: Option<Criterion>,
    pub trials: u64,
    pub failures: Vec<Failure>,
    pub seed: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(
            f,
            "{status} {}: {} failures in {} trials (seed {})",
            self.label,
            self.failures.len(),
            self.trials,
            self.seed
        )?;
        if let Some(first) = self.failures.first() {
            write!(f, "\n  first failure at trial {}: expected {}, got {}", first.trial, first.expected, first.got)?;
            for input in &first.inputs {
                write!(f, "\n    {input}")?;
            }
        }
        Ok(())
    }
}

/// What a single trial produced: `None` when the schema held.
pub(crate) type Outcome = Option<(Vec<String>, String, String)>;

pub(crate) fn domain_of(criterion: Criterion) -> Domain {
    match criterion {
        Criterion::CountingPreorder => Domain::Indicator,
        Criterion::SumPlusDifferences => Domain::FiniteValued,
        _ => Domain::Descriptor,
    }
}

pub(crate) fn run_trials(
    label: String,
    axiom: Option<AxiomId>,
    criterion: Option<Criterion>,
    budget: u64,
    seed: u64,
    trial: impl Fn(u64) -> Result<Outcome> + Sync,
) -> Result<CheckReport> {
    let outcomes: Vec<(u64, Outcome)> = (0..budget)
        .into_par_iter()
        .map(|t| trial(t).map(|o| (t, o)))
        .collect::<Result<_>>()?;
    let failures = outcomes
        .into_iter()
        .filter_map(|(t, o)| o.map(|(inputs, expected, got)| Failure { trial: t, inputs, expected, got }))
        .collect();
    Ok(CheckReport { label, axiom, criterion, trials: budget, failures, seed })
}

/// Test `criterion` against `axiom` on `budget` trials; the first trials replay
/// the directed witnesses for that axiom.
pub fn check_axiom(criterion: Criterion, axiom: AxiomId, budget: u64, seed: u64) -> Result<CheckReport> {
    if !axiom.applies_to(criterion) {
        return Err(Error::Domain(format!("{axiom} cannot be instantiated for {criterion}")));
    }
    let label = format!("{criterion}/{axiom}");
    if criterion.is_ordered() {
        return run_trials(label, Some(axiom), Some(criterion), budget, seed, |t| {
            streams::trial(criterion, axiom, t, &mut trial_rng(seed, t))
        });
    }
    run_trials(label, Some(axiom), Some(criterion), budget, seed, |t| {
        schemas::trial(criterion, axiom, t, &mut trial_rng(seed, t))
    })
}

/// Every applicable axiom for `criterion`.
pub fn check_all(criterion: Criterion, budget: u64, seed: u64) -> Result<Vec<CheckReport>> {
    AxiomId::ALL
        .into_iter()
        .filter(|a| a.applies_to(criterion))
        .map(|a| check_axiom(criterion, a, budget, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(c: Criterion, a: AxiomId) -> CheckReport {
        check_axiom(c, a, 150, 3).unwrap()
    }

    #[test]
    fn core_axioms_hold_for_the_preorders() {
        use AxiomId::*;
        let c = Criterion::ALL.into_iter().filter(|c| !c.is_ordered());
        for criterion in c {
            for axiom in [Reflexivity, StrongPareto, PermutationInvariance, WeakPareto] {
                if axiom.applies_to(criterion) {
                    let r = run(criterion, axiom);
                    assert!(r.passed(), "{r}");
                }
            }
        }
    }

    #[test]
    fn directed_failures_reproduce() {
        for c in [Criterion::SumPreorder, Criterion::ConvergentDivergences, Criterion::ParetoPreorder] {
            let anon = run(c, AxiomId::Anonymity);
            assert_eq!(anon.failures.first().map(|f| f.trial), Some(0), "{anon}");
            let complete = run(c, AxiomId::Completeness);
            assert_eq!(complete.failures.first().map(|f| f.trial), Some(0), "{complete}");
        }
        let lv = run(Criterion::SumPreorder, AxiomId::RestrictedTransfersOriginal);
        assert_eq!(lv.failures.first().map(|f| f.trial), Some(0), "{lv}");
        assert!(run(Criterion::SumPreorder, AxiomId::RestrictedTransfersCorrected).passed());
        for c in [Criterion::CatchingUp, Criterion::Overtaking] {
            let pi = run(c, AxiomId::PermutationInvariance);
            assert_eq!(pi.failures.first().map(|f| f.trial), Some(0), "{pi}");
        }
    }

    #[test]
    fn spd_transitivity_fails_in_the_harness() {
        assert!(!check_axiom(Criterion::SumPlusDifferences, AxiomId::Transitivity, 400, 17).unwrap().passed());
    }

    #[test]
    fn special_checks_pass() {
        assert!(check_completeness_impossible(100, 2).unwrap().passed());
        assert!(check_lv_fact(100, 2).unwrap().passed());
    }

    #[test]
    fn stream_axioms_outside_support_are_rejected() {
        assert!(check_axiom(Criterion::CatchingUp, AxiomId::SumAxiom, 1, 0).is_err());
        assert_eq!("strong-pareto".parse::<AxiomId>().unwrap(), AxiomId::StrongPareto);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = check_axiom(Criterion::SumPlusDifferences, AxiomId::Transitivity, 200, 9).unwrap();
        let b = check_axiom(Criterion::SumPlusDifferences, AxiomId::Transitivity, 200, 9).unwrap();
        assert_eq!(a, b);
    }
}
