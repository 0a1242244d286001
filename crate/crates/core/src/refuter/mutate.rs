use rand::seq::SliceRandom;
use rand::Rng;

use super::{CertStep, ContradictionKind, Levels, RefutationCertificate};
use crate::exactnum::{Cardinal, Rational};

fn nudge<R: Rng + ?Sized>(rng: &mut R, levels: &mut Levels) {
    let i = rng.gen_range(0..levels.len());
    let delta = Rational::new(rng.gen_range(1..=4), rng.gen_range(1..=3));
    if rng.gen_bool(0.5) {
        levels[i] += &delta;
    } else {
        levels[i] -= &delta;
    }
}

fn side<'a, R: Rng + ?Sized>(rng: &mut R, step: &'a mut CertStep) -> Option<&'a mut Levels> {
    let pick = rng.gen_bool(0.5);
    match step {
        CertStep::AssumeWeak { left, right }
        | CertStep::ByRearrangement { left, right, .. }
        | CertStep::ByConvexDominance { left, right, .. }
        | CertStep::ByTransitivity { left, right, .. } => Some(if pick { left } else { right }),
        CertStep::ByStrongPareto { from, to } => Some(if pick { from } else { to }),
        CertStep::ConcludeContradiction { .. } => None,
    }
}

fn premise_slot<'a, R: Rng + ?Sized>(rng: &mut R, step: &'a mut CertStep) -> Option<&'a mut usize> {
    match step {
        CertStep::ByRearrangement { premise, .. } | CertStep::ConcludeContradiction { premise, .. } => Some(premise),
        CertStep::ByConvexDominance { premises, .. } => premises.choose_mut(rng),
        CertStep::ByTransitivity { chain, .. } => chain.choose_mut(rng),
        _ => None,
    }
}

/// A copy of `cert` with one step corrupted.
pub fn mutate<R: Rng + ?Sized>(cert: &RefutationCertificate, rng: &mut R) -> RefutationCertificate {
    loop {
        let mut out = cert.clone();
        let i = rng.gen_range(0..out.steps.len());
        let n = out.steps.len();
        let step = &mut out.steps[i];
        match rng.gen_range(0..6) {
            0 => {
                if let Some(levels) = side(rng, step) {
                    nudge(rng, levels);
                }
            }
            1 => {
                if let CertStep::ByRearrangement { flow, .. } = step {
                    let j = rng.gen_range(0..flow.len());
                    let entry = &mut flow[j];
                    if rng.gen_bool(0.5) {
                        entry.2 = match entry.2 {
                            Cardinal::Finite(0) => Cardinal::Finite(1),
                            Cardinal::Finite(k) if rng.gen_bool(0.5) => Cardinal::Finite(k - 1),
                            Cardinal::Finite(_) => Cardinal::Omega,
                            Cardinal::Omega => Cardinal::ZERO,
                        };
                    } else {
                        let cells = flow.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0) + 1;
                        let entry = &mut flow[j];
                        entry.1 = (entry.1 + rng.gen_range(1..cells.max(2))) % cells.max(2);
                    }
                }
            }
            2 => {
                if let CertStep::ByConvexDominance { weights, .. } = step {
                    let j = rng.gen_range(0..weights.len());
                    weights[j] += &Rational::new(1, rng.gen_range(2..=7));
                }
            }
            3 => {
                if let Some(p) = premise_slot(rng, step) {
                    *p = rng.gen_range(0..n);
                }
            }
            4 => match step {
                CertStep::ByTransitivity { chain, .. } if chain.len() > 2 => {
                    let j = rng.gen_range(0..chain.len());
                    chain.remove(j);
                }
                CertStep::ByTransitivity { chain, .. } => chain.reverse(),
                CertStep::ConcludeContradiction { kind, .. } => {
                    *kind = match kind {
                        ContradictionKind::ParetoViolation => ContradictionKind::StrictCycle,
                        _ => ContradictionKind::ParetoViolation,
                    };
                }
                _ => {}
            },
            _ => {
                if n > 1 {
                    out.steps.remove(i);
                }
            }
        }
        if out != *cert {
            return out;
        }
    }
}
