//! Refutation certificates: finite derivations showing that a comparison cannot
//! hold in any preorder with Strong Pareto, Permutation Invariance and
//! Quasi-Independence, together with an independent checker.

mod builder;
mod check;
mod finite;
mod mutate;
mod two_valued;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::axioms::AxiomId;
use crate::error::{Error, Result};
use crate::exactnum::{Cardinal, Rational};
use crate::worlds::{canonical_pair, FlowEntry, Population, World};

pub use check::{check_certificate, CertificateError};
pub use finite::refute_finite_valued;
pub use mutate::mutate;
pub use two_valued::refute_two_valued;

pub const SCHEMA: &str = "swr-cert/1";

/// Welfare levels listed in the order of the certificate's population.
pub type Levels = Vec<Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContradictionKind {
    StrictCycle,
    ReflexivityViolation,
    ParetoViolation,
}

/// One derivation step. Every step except the first and last concludes a fact
/// `left ≽ right`; whether that fact is strict is recomputed by the checker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CertStep {
    AssumeWeak { left: Levels, right: Levels },
    ByStrongPareto { from: Levels, to: Levels },
    ByRearrangement { premise: usize, flow: Vec<FlowEntry>, left: Levels, right: Levels },
    ByConvexDominance { weights: Vec<Rational>, premises: Vec<usize>, left: Levels, right: Levels },
    ByTransitivity { chain: Vec<usize>, left: Levels, right: Levels },
    ConcludeContradiction { kind: ContradictionKind, premise: usize },
}

impl CertStep {
    pub fn rule(&self) -> &'static str {
        match self {
            CertStep::AssumeWeak { .. } => "assume_weak",
            CertStep::ByStrongPareto { .. } => "by_strong_pareto",
            CertStep::ByRearrangement { .. } => "by_rearrangement",
            CertStep::ByConvexDominance { .. } => "by_convex_dominance",
            CertStep::ByTransitivity { .. } => "by_transitivity",
            CertStep::ConcludeContradiction { .. } => "conclude_contradiction",
        }
    }

    pub(crate) fn axiom(&self) -> Option<AxiomId> {
        match self {
            CertStep::AssumeWeak { .. } => None,
            CertStep::ByStrongPareto { .. } => Some(AxiomId::StrongPareto),
            CertStep::ByRearrangement { .. } => Some(AxiomId::PermutationInvariance),
            CertStep::ByConvexDominance { .. } => Some(AxiomId::QuasiIndependence),
            CertStep::ByTransitivity { .. } => Some(AxiomId::Transitivity),
            CertStep::ConcludeContradiction { kind: ContradictionKind::ParetoViolation, .. } => {
                Some(AxiomId::StrongPareto)
            }
            CertStep::ConcludeContradiction { .. } => Some(AxiomId::Reflexivity),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Refute `w ≽ v`.
    Forward,
    /// Refute `v ≽ w`.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub w: Levels,
    pub v: Levels,
    pub direction: Direction,
}

impl Target {
    pub(crate) fn assumed(&self) -> (&Levels, &Levels) {
        match self.direction {
            Direction::Forward => (&self.w, &self.v),
            Direction::Backward => (&self.v, &self.w),
        }
    }
}

/// Which argument the generator followed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofCase {
    /// Both differences infinite: the swap argument.
    TwoValuedSwap,
    /// Fewer gains than losses, gains finite: the cycle through `f(A)` and `f(B)`.
    TwoValuedCycle,
    Case1,
    Case2a,
    Case2b,
    Case2c,
}

impl fmt::Display for ProofCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProofCase::TwoValuedSwap => "two-valued swap",
            ProofCase::TwoValuedCycle => "two-valued cycle",
            ProofCase::Case1 => "case 1",
            ProofCase::Case2a => "case 2a",
            ProofCase::Case2b => "case 2b",
            ProofCase::Case2c => "case 2c",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationCertificate {
    pub schema: String,
    pub case: ProofCase,
    pub population: Population,
    pub target: Target,
    pub steps: Vec<CertStep>,
    pub used_axioms: BTreeSet<AxiomId>,
}

impl RefutationCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<RefutationCertificate> {
        let cert: RefutationCertificate =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("malformed certificate: {e}")))?;
        if cert.schema != SCHEMA {
            return Err(Error::Domain(format!("unsupported certificate schema {:?}", cert.schema)));
        }
        Ok(cert)
    }

    /// Whether the certificate's target is, up to relabelling individuals, the pair `(w, v)`.
    pub fn targets(&self, w: &World, v: &World) -> bool {
        let Ok(tw) = World::from_levels(self.population.clone(), self.target.w.clone()) else {
            return false;
        };
        let Ok(tv) = World::from_levels(self.population.clone(), self.target.v.clone()) else {
            return false;
        };
        matches!((joint_census(w, v), joint_census(&tw, &tv)), (Some(a), Some(b)) if a == b)
    }
}

type JointCensus = std::collections::BTreeMap<(Rational, Rational), Cardinal>;

fn joint_census(w: &World, v: &World) -> Option<JointCensus> {
    let (cw, cv) = canonical_pair(w, v).ok()?;
    let mut out = JointCensus::new();
    for (i, (a, b)) in cw.values().iter().zip(cv.values()).enumerate() {
        let key = (a.level()?.clone(), b.level()?.clone());
        let e = out.entry(key).or_insert(Cardinal::ZERO);
        *e = *e + cw.population().size(i);
    }
    Some(out)
}

/// Refute `w ≽ v` with whichever generator fits the pair.
pub fn refute(w: &World, v: &World) -> Result<RefutationCertificate> {
    if w.is_indicator() && v.is_indicator() {
        refute_two_valued(w, v)
    } else {
        refute_finite_valued(w, v)
    }
}

/// Refute `w ≽ v` (forward) or `v ≽ w` (backward), recording the pair in its given order.
pub fn refute_directed(w: &World, v: &World, direction: Direction) -> Result<RefutationCertificate> {
    match direction {
        Direction::Forward => refute(w, v),
        Direction::Backward => {
            let mut cert = refute(v, w)?;
            let t = &mut cert.target;
            std::mem::swap(&mut t.w, &mut t.v);
            t.direction = Direction::Backward;
            Ok(cert)
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::criteria::{compare_sp, Verdict};
    use crate::exactnum::{Finite, Omega};
    use crate::gen::{self, Domain};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pair(rows: &[(&str, &str, Cardinal)]) -> (World, World) {
        let cells: Vec<_> = rows.iter().enumerate().map(|(i, r)| crate::worlds::Cell::new(format!("c{i}"), r.2)).collect();
        let pop = Population::new(cells).unwrap();
        let w = World::from_levels(pop.clone(), rows.iter().map(|r| q(r.0)).collect()).unwrap();
        let v = World::from_levels(pop, rows.iter().map(|r| q(r.1)).collect()).unwrap();
        (w, v)
    }

    fn refuted(w: &World, v: &World, case: ProofCase) -> RefutationCertificate {
        let cert = refute(w, v).unwrap();
        assert_eq!(cert.case, case);
        check_certificate(&cert).unwrap();
        assert!(cert.targets(w, v));
        cert
    }

    #[test]
    fn case_1_finite_margin() {
        let (w, v) = pair(&[("0", "3", Finite(2)), ("5", "0", Finite(1)), ("1", "1", Omega)]);
        let cert = refuted(&w, &v, ProofCase::Case1);
        assert!(cert.used_axioms.contains(&AxiomId::QuasiIndependence));
    }

    #[test]
    fn case_1_infinite_gain() {
        let (w, v) = pair(&[("0", "1/3", Omega), ("2", "0", Finite(3))]);
        refuted(&w, &v, ProofCase::Case1);
    }

    #[test]
    fn case_2_subcases() {
        let (w, v) = pair(&[("1", "0", Omega), ("1", "2", Omega)]);
        refuted(&w, &v, ProofCase::Case2c);
        let (w, v) = pair(&[("3", "0", Omega), ("1", "2", Omega)]);
        refuted(&w, &v, ProofCase::Case2a);
        let (w, v) = pair(&[("3", "2", Omega), ("1", "3/2", Omega)]);
        refuted(&w, &v, ProofCase::Case2b);
        let (w, v) = pair(&[("3", "1", Omega), ("0", "1", Omega), ("7", "-1", Finite(2))]);
        refuted(&w, &v, ProofCase::Case2a);
    }

    #[test]
    fn case_2c_grid() {
        for a in 1..=4 {
            for b in 0..a {
                for d in (a + 1)..=6 {
                    let (w, v) = pair(&[(&a.to_string(), &b.to_string(), Omega), (&a.to_string(), &d.to_string(), Omega)]);
                    refuted(&w, &v, ProofCase::Case2c);
                }
            }
        }
    }

    #[test]
    fn two_valued_cases() {
        let (w, v) = pair(&[("1", "0", Omega), ("0", "1", Omega)]);
        let cert = refuted(&w, &v, ProofCase::TwoValuedSwap);
        assert!(!cert.used_axioms.contains(&AxiomId::QuasiIndependence));
        let (w, v) = pair(&[("1", "0", Finite(2)), ("0", "1", Finite(3)), ("0", "0", Omega)]);
        refuted(&w, &v, ProofCase::TwoValuedCycle);
        let (w, v) = pair(&[("1", "0", Finite(2)), ("0", "1", Omega), ("1", "1", Omega)]);
        refuted(&w, &v, ProofCase::TwoValuedCycle);
        let (w, v) = pair(&[("0", "1", Finite(1)), ("0", "0", Omega)]);
        refuted(&w, &v, ProofCase::TwoValuedCycle);
    }

    #[test]
    fn ranked_pairs_are_not_refuted() {
        let (w, v) = pair(&[("1", "0", Omega), ("0", "1", Finite(4))]);
        assert!(matches!(refute(&w, &v), Err(Error::NotRefutable(_))));
        let (w, v) = pair(&[("2", "0", Finite(1)), ("0", "3/2", Finite(1)), ("1", "1", Omega)]);
        assert!(matches!(refute(&w, &v), Err(Error::NotRefutable(_))));
    }

    #[test]
    fn backward_certificates_check() {
        let (w, v) = pair(&[("1", "0", Omega), ("1", "2", Omega)]);
        let cert = refute_directed(&v, &w, Direction::Backward).unwrap();
        check_certificate(&cert).unwrap();
        assert_eq!(cert.target.direction, Direction::Backward);
    }

    #[test]
    fn certificates_round_trip() {
        let (w, v) = pair(&[("3", "0", Omega), ("1", "2", Omega)]);
        let cert = refute(&w, &v).unwrap();
        let back = RefutationCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
    }

    fn random_refutable(seed: u64) -> Option<(World, World)> {
        let mut rng = gen::trial_rng(seed, 0);
        let s = gen::sample(&mut rng, 2, Domain::FiniteValued);
        let (w, v) = (&s.worlds[0], &s.worlds[1]);
        match compare_sp(w, v).ok()? {
            Verdict::StrictlyWorse | Verdict::Incomparable => Some((w.clone(), v.clone())),
            _ => None,
        }
    }

    #[test]
    fn random_refutations_check() {
        let mut seen = BTreeSet::new();
        let mut n = 0;
        for seed in 0..400 {
            let Some((w, v)) = random_refutable(seed) else { continue };
            let cert = refute(&w, &v).unwrap_or_else(|e| panic!("{w} vs {v}: {e}"));
            if let Err(e) = check_certificate(&cert) {
                panic!("{w} vs {v} ({}): {e}", cert.case);
            }
            seen.insert(cert.case);
            n += 1;
        }
        assert!(n > 50, "only {n} refutable pairs");
        assert!(seen.len() >= 3, "cases seen: {seen:?}");
    }

    #[test]
    fn mutants_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let certs: Vec<_> = [
            pair(&[("0", "3", Finite(2)), ("5", "0", Finite(1)), ("1", "1", Omega)]),
            pair(&[("3", "0", Omega), ("1", "2", Omega)]),
            pair(&[("1", "0", Omega), ("1", "2", Omega)]),
            pair(&[("1", "0", Omega), ("0", "1", Omega)]),
        ]
        .iter()
        .map(|(w, v)| refute(w, v).unwrap())
        .collect();
        let trials = 2000;
        let rejected = (0..trials)
            .filter(|t| check_certificate(&mutate(&certs[t % certs.len()], &mut rng)).is_err())
            .count();
        assert!(rejected * 100 >= trials * 95, "rejected {rejected}/{trials}");
    }
}
