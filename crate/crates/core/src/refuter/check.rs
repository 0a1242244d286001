use std::collections::BTreeSet;

use thiserror::Error;

use super::{CertStep, ContradictionKind, Levels, RefutationCertificate, SCHEMA};
use crate::criteria::Verdict;
use crate::exactnum::Rational;
use crate::worlds::{convex_combine, pareto_compare, Population, Rearrangement, World};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}: {reason}", match .step { Some(s) => format!("step {s}"), None => "certificate".to_string() })]
pub struct CertificateError {
    pub step: Option<usize>,
    pub reason: String,
}

fn bad<T>(step: Option<usize>, reason: impl Into<String>) -> Result<T, CertificateError> {
    Err(CertificateError { step, reason: reason.into() })
}

struct Fact {
    left: Levels,
    right: Levels,
    strict: bool,
}

struct Checker<'a> {
    pop: &'a Population,
    facts: Vec<Option<Fact>>,
    used: Vec<bool>,
}

impl Checker<'_> {
    fn world(&self, step: usize, levels: &Levels) -> Result<World, CertificateError> {
        World::from_levels(self.pop.clone(), levels.clone()).or_else(|e| bad(Some(step), e.to_string()))
    }

    fn premise(&mut self, step: usize, p: usize) -> Result<&Fact, CertificateError> {
        if p >= step {
            return bad(Some(step), format!("premise {p} does not precede the step"));
        }
        self.used[p] = true;
        match &self.facts[p] {
            Some(f) => Ok(f),
            None => bad(Some(step), format!("premise {p} concludes no comparison")),
        }
    }

    /// `Some(strict)` when `from` is pointwise at least `to`.
    fn dominance(&self, step: usize, from: &Levels, to: &Levels) -> Result<Option<bool>, CertificateError> {
        let verdict = pareto_compare(&self.world(step, from)?, &self.world(step, to)?)
            .or_else(|e| bad(Some(step), e.to_string()))?;
        Ok(match verdict {
            Verdict::StrictlyBetter => Some(true),
            Verdict::Equivalent => Some(false),
            _ => None,
        })
    }

    fn step(&mut self, i: usize, step: &CertStep) -> Result<Option<Fact>, CertificateError> {
        let claim = |left: &Levels, right: &Levels, got: (Levels, Levels), what: &str| {
            if (left, right) == (&got.0, &got.1) {
                Ok(())
            } else {
                bad(Some(i), format!("stated conclusion differs from the recomputed {what}"))
            }
        };
        match step {
            CertStep::AssumeWeak { .. } => bad(Some(i), "only the first step may be an assumption"),
            CertStep::ByStrongPareto { from, to } => match self.dominance(i, from, to)? {
                Some(strict) => Ok(Some(Fact { left: from.clone(), right: to.clone(), strict })),
                None => bad(Some(i), "the first world does not Pareto-dominate the second"),
            },
            CertStep::ByRearrangement { premise, flow, left, right } => {
                let r = Rearrangement::from_sparse(self.pop.clone(), self.pop.clone(), flow.clone())
                    .or_else(|e| bad(Some(i), e.to_string()))?;
                let (pl, pr, strict) = {
                    let f = self.premise(i, *premise)?;
                    (f.left.clone(), f.right.clone(), f.strict)
                };
                let image = |l: &Levels| -> Result<Levels, CertificateError> {
                    let w = r.apply(&self.world(i, l)?).or_else(|e| bad(Some(i), e.to_string()))?;
                    w.levels().map_or_else(|| bad(Some(i), "image is not finite-valued"), Ok)
                };
                claim(left, right, (image(&pl)?, image(&pr)?), "image")?;
                Ok(Some(Fact { left: left.clone(), right: right.clone(), strict }))
            }
            CertStep::ByConvexDominance { weights, premises, left, right } => {
                if weights.is_empty() || weights.len() != premises.len() {
                    return bad(Some(i), "weights and premises must pair up");
                }
                if weights.iter().any(|a| !a.is_positive()) {
                    return bad(Some(i), "weights must be positive");
                }
                if weights.iter().sum::<Rational>() != Rational::one() {
                    return bad(Some(i), "weights must sum to 1");
                }
                let mut ls = Vec::new();
                let mut rs = Vec::new();
                for (a, &p) in weights.iter().zip(premises) {
                    let (pl, pr) = {
                        let f = self.premise(i, p)?;
                        (f.left.clone(), f.right.clone())
                    };
                    ls.push((a.clone(), self.world(i, &pl)?));
                    rs.push((a.clone(), self.world(i, &pr)?));
                }
                let mix = |parts: &[(Rational, World)]| -> Result<Levels, CertificateError> {
                    let w = convex_combine(parts).or_else(|e| bad(Some(i), e.to_string()))?;
                    Ok(w.levels().expect("mixtures of levels are levels"))
                };
                claim(left, right, (mix(&ls)?, mix(&rs)?), "mixture")?;
                Ok(Some(Fact { left: left.clone(), right: right.clone(), strict: false }))
            }
            CertStep::ByTransitivity { chain, left, right } => {
                if chain.len() < 2 {
                    return bad(Some(i), "a chain needs at least two links");
                }
                let mut links = Vec::new();
                for &p in chain {
                    let f = self.premise(i, p)?;
                    links.push((f.left.clone(), f.right.clone(), f.strict));
                }
                if links.windows(2).any(|w| w[0].1 != w[1].0) {
                    return bad(Some(i), "consecutive links do not meet");
                }
                let strict = links.iter().any(|l| l.2);
                claim(left, right, (links[0].0.clone(), links.last().unwrap().1.clone()), "chain ends")?;
                Ok(Some(Fact { left: left.clone(), right: right.clone(), strict }))
            }
            CertStep::ConcludeContradiction { kind, premise } => {
                let (l, r, strict) = {
                    let f = self.premise(i, *premise)?;
                    (f.left.clone(), f.right.clone(), f.strict)
                };
                match kind {
                    ContradictionKind::StrictCycle | ContradictionKind::ReflexivityViolation => {
                        if !strict || l != r {
                            return bad(Some(i), "premise is not a strict preference of a world over itself");
                        }
                    }
                    ContradictionKind::ParetoViolation => {
                        if self.dominance(i, &r, &l)? != Some(true) {
                            return bad(Some(i), "premise does not contradict Strong Pareto");
                        }
                    }
                }
                Ok(None)
            }
        }
    }
}

/// Re-derive every step of `cert` from scratch.
pub fn check_certificate(cert: &RefutationCertificate) -> Result<(), CertificateError> {
    if cert.schema != SCHEMA {
        return bad(None, format!("unsupported schema {:?}", cert.schema));
    }
    let n = cert.population.len();
    let well_sized = |l: &Levels| l.len() == n;
    if !well_sized(&cert.target.w) || !well_sized(&cert.target.v) {
        return bad(None, "target levels do not match the population");
    }
    let Some(CertStep::AssumeWeak { left, right }) = cert.steps.first() else {
        return bad(Some(0), "a certificate must open with its assumption");
    };
    if (left, right) != cert.target.assumed() {
        return bad(Some(0), "the assumption is not the targeted comparison");
    }
    let last = cert.steps.len() - 1;
    if !matches!(cert.steps[last], CertStep::ConcludeContradiction { .. }) || last == 0 {
        return bad(Some(last), "a certificate must close with a contradiction");
    }
    let mut checker = Checker { pop: &cert.population, facts: Vec::new(), used: vec![false; cert.steps.len()] };
    checker.facts.push(Some(Fact { left: left.clone(), right: right.clone(), strict: false }));
    for (i, step) in cert.steps.iter().enumerate().skip(1) {
        if i < last && matches!(step, CertStep::ConcludeContradiction { .. }) {
            return bad(Some(i), "a contradiction may only close the certificate");
        }
        let fact = checker.step(i, step)?;
        checker.facts.push(fact);
    }
    if let Some(i) = (0..last).find(|&i| !checker.used[i]) {
        return bad(Some(i), "step is never used");
    }
    let used: BTreeSet<_> = cert.steps.iter().filter_map(CertStep::axiom).collect();
    if used != cert.used_axioms {
        return bad(None, "declared axioms differ from the axioms the steps invoke");
    }
    Ok(())
}
