use rand::Rng;

use super::witness;
use super::{domain_of, AxiomId, Outcome};
use crate::criteria::{compare, weakly_above, Criterion, Verdict};
use crate::error::Result;
use crate::exactnum::{Cardinal, Rational};
use crate::gen::{self, CellFamily, Domain, Sample};
use crate::worlds::{
    apply_restricted_transfers, convex_combine, CellValue, Rearrangement, RestrictedTransfer, World,
};

fn show(worlds: &[&World]) -> Vec<String> {
    worlds.iter().map(|w| w.to_string()).collect()
}

fn fail(worlds: &[&World], expected: impl ToString, got: impl ToString) -> Outcome {
    Some((show(worlds), expected.to_string(), got.to_string()))
}

fn expect_verdict(inputs: &[&World], expected: Verdict, got: Verdict) -> Outcome {
    if expected == got {
        None
    } else {
        fail(inputs, expected, got)
    }
}

/// A world related to `w`: perturbed, Pareto-lowered or fresh.
fn step<R: Rng>(rng: &mut R, w: &World, s: &Sample, domain: Domain) -> World {
    match rng.gen_range(0..3) {
        0 => gen::perturb(rng, w, &s.families, domain),
        1 => gen::pareto_pair(rng, w, &s.families, domain, false).1,
        _ => gen::world(rng, &s.population, &s.families, domain),
    }
}

const ALPHA_LATTICE: [(i64, i64); 7] = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];

fn alpha<R: Rng>(rng: &mut R) -> Rational {
    if rng.gen_bool(0.5) {
        let (n, d) = ALPHA_LATTICE[rng.gen_range(0..ALPHA_LATTICE.len())];
        Rational::new(n, d)
    } else {
        let d = rng.gen_range(1..=12);
        Rational::new(rng.gen_range(0..=d), d)
    }
}

pub(super) fn trial<R: Rng>(c: Criterion, axiom: AxiomId, t: u64, rng: &mut R) -> Result<Outcome> {
    let domain = domain_of(c);
    let t = t as usize;
    match axiom {
        AxiomId::Reflexivity => {
            let s = gen::sample(rng, 1, domain);
            let w = &s.worlds[0];
            Ok(expect_verdict(&[w], Verdict::Equivalent, compare(c, w, w)?))
        }
        AxiomId::Transitivity => {
            let s = gen::sample(rng, 1, domain);
            let w = s.worlds[0].clone();
            let v = step(rng, &w, &s, domain);
            let u = step(rng, &v, &s, domain);
            if weakly_above(c, &w, &v)? && weakly_above(c, &v, &u)? && !weakly_above(c, &w, &u)? {
                return Ok(fail(&[&w, &v, &u], "w ≽ u", "w ⋡ u"));
            }
            Ok(None)
        }
        AxiomId::StrongPareto => strong_pareto(c, domain, t, rng),
        AxiomId::WeakPareto => {
            let s = gen::sample(rng, 1, domain);
            let (up, low) = gen::pareto_pair(rng, &s.worlds[0], &s.families, domain, false);
            if weakly_above(c, &up, &low)? {
                Ok(None)
            } else {
                Ok(fail(&[&up, &low], "w ≽ v", "w ⋡ v"))
            }
        }
        AxiomId::PermutationInvariance => permutation_invariance(c, domain, t, rng),
        AxiomId::Anonymity => {
            let (w, image) = if t == 0 {
                let (w, pi) = witness::injection();
                let image = pi.apply(&w)?;
                (w, image)
            } else {
                let s = gen::sample(rng, 1, domain);
                let refined = gen::refine(rng, &s.worlds, false);
                let w = &refined[0];
                let harmonic = |i: usize| w.value(i).as_tail().is_harmonic() as u8;
                let pi = gen::cell_permutation_within(rng, w.population(), false, harmonic);
                let image = pi.apply(w)?;
                (w.clone(), image)
            };
            Ok(expect_verdict(&[&w, &image], Verdict::Equivalent, compare(c, &w, &image)?))
        }
        AxiomId::FiniteAnonymity => {
            let s = gen::sample(rng, 2, domain);
            let refined = gen::refine(rng, &s.worlds, true);
            let pi = gen::cell_permutation(rng, refined[0].population(), true);
            let moved = pi.apply(&refined[0])?;
            let before = compare(c, &refined[0], &refined[1])?;
            Ok(expect_verdict(&[&refined[0], &moved, &refined[1]], before, compare(c, &moved, &refined[1])?))
        }
        AxiomId::Completeness => {
            let (w, v) = if t == 0 {
                let inc = witness::incompleteness(&witness::IncompletenessLayout::default())?;
                (inc.w, inc.v)
            } else {
                let s = gen::sample(rng, 2, domain);
                (s.worlds[0].clone(), s.worlds[1].clone())
            };
            let got = compare(c, &w, &v)?;
            Ok(if got.is_comparable() { None } else { fail(&[&w, &v], "comparable", got) })
        }
        AxiomId::QuasiIndependence => {
            let (w, v, u, a) = if t == 0 && domain == Domain::Descriptor {
                let (w, v) = witness::harmonic_witness();
                let u = v.clone();
                (w, v, u, Rational::new(1, 2))
            } else {
                let s = gen::sample(rng, 2, domain);
                let w = s.worlds[0].clone();
                let v = step(rng, &w, &s, domain);
                (w, v, s.worlds[1].clone(), alpha(rng))
            };
            if !weakly_above(c, &w, &v)? {
                return Ok(None);
            }
            let b = Rational::one() - &a;
            let lhs = convex_combine(&[(a.clone(), w.clone()), (b.clone(), u.clone())])?;
            let rhs = convex_combine(&[(a.clone(), v.clone()), (b, u.clone())])?;
            if weakly_above(c, &lhs, &rhs)? {
                Ok(None)
            } else {
                Ok(fail(&[&w, &v, &u], format!("mixtures at α = {a} ordered"), "mixtures not ordered"))
            }
        }
        AxiomId::ConvexDominance => convex_dominance(c, domain, rng),
        AxiomId::ZeroIndependence => {
            let s = gen::sample(rng, 1, domain);
            let w = s.worlds[0].clone();
            let v = step(rng, &w, &s, domain);
            let d = w.sub(&v)?;
            let zero = World::constant(w.population().clone(), Rational::zero());
            let lhs = (weakly_above(c, &w, &v)?, weakly_above(c, &v, &w)?);
            let rhs = (weakly_above(c, &d, &zero)?, weakly_above(c, &zero, &d)?);
            Ok(if lhs == rhs { None } else { fail(&[&w, &v], format!("{lhs:?}"), format!("{rhs:?}")) })
        }
        AxiomId::SumAxiom => sum_axiom(c, domain, t, rng),
        AxiomId::RestrictedTransfersOriginal => {
            let (u, v, moved) = if t == 0 {
                let (a, b, _, ts) = witness::transfer_fact();
                let moved = apply_restricted_transfers(&a, &ts)?;
                (a, b, moved)
            } else {
                let s = gen::sample(rng, 1, Domain::FiniteValued);
                let u = s.worlds[0].clone();
                let v = gen::pareto_pair(rng, &u, &s.families, Domain::FiniteValued, true).1;
                let (moved, _) = random_transfers(rng, &u)?;
                (u, v, moved)
            };
            if compare(c, &u, &v)? != Verdict::StrictlyBetter {
                return Ok(None);
            }
            let got = compare(c, &moved, &aligned_like(&v, &moved, &u)?)?;
            Ok(expect_verdict(&[&u, &v, &moved], Verdict::StrictlyBetter, got))
        }
        AxiomId::RestrictedTransfersCorrected => {
            let u = if t == 0 { corrected_witness() } else { positive_world(rng) };
            let zero = World::constant(u.population().clone(), Rational::zero());
            if compare(c, &u, &zero)? != Verdict::StrictlyBetter {
                return Ok(None);
            }
            let (moved, _) = random_transfers(rng, &u)?;
            let zero = World::constant(moved.population().clone(), Rational::zero());
            Ok(expect_verdict(&[&u, &moved], Verdict::StrictlyBetter, compare(c, &moved, &zero)?))
        }
    }
}

fn strong_pareto<R: Rng>(c: Criterion, domain: Domain, t: usize, rng: &mut R) -> Result<Outcome> {
    let (up, low) = match t {
        0 => {
            let inc = witness::incompleteness(&witness::IncompletenessLayout::default())?;
            (inc.w, inc.w_minus)
        }
        1 => {
            let (w, pi) = witness::injection();
            let image = pi.apply(&w)?;
            (w, image)
        }
        _ => {
            let s = gen::sample(rng, 1, domain);
            gen::pareto_pair(rng, &s.worlds[0], &s.families, domain, true)
        }
    };
    Ok(expect_verdict(&[&up, &low], Verdict::StrictlyBetter, compare(c, &up, &low)?))
}

fn permutation_invariance<R: Rng>(c: Criterion, domain: Domain, t: usize, rng: &mut R) -> Result<Outcome> {
    let directed = |t: usize| -> Result<Option<(World, World, Rearrangement)>> {
        let inc = witness::incompleteness(&witness::IncompletenessLayout::default())?;
        Ok(match t {
            0 => Some((inc.w, inc.v, inc.swap)),
            1 => Some((inc.v, inc.w_minus, inc.swap_minus)),
            _ => None,
        })
    };
    let (w, v, pi) = match directed(t)? {
        Some(d) => d,
        None => {
            let s = gen::sample(rng, 2, domain);
            let before = compare(c, &s.worlds[0], &s.worlds[1])?;
            let refined = gen::refine(rng, &s.worlds, false);
            let after = compare(c, &refined[0], &refined[1])?;
            if before != after {
                return Ok(fail(&[&s.worlds[0], &s.worlds[1], &refined[0], &refined[1]], before, after));
            }
            let pi = gen::cell_permutation(rng, refined[0].population(), false);
            (refined[0].clone(), refined[1].clone(), pi)
        }
    };
    let (pw, pv) = (pi.apply(&w)?, pi.apply(&v)?);
    Ok(expect_verdict(&[&w, &v, &pw, &pv], compare(c, &w, &v)?, compare(c, &pw, &pv)?))
}

fn convex_dominance<R: Rng>(c: Criterion, domain: Domain, rng: &mut R) -> Result<Outcome> {
    let n = rng.gen_range(2..=5);
    let s = gen::sample(rng, n, domain);
    let mut ws = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for w in &s.worlds {
        let mut v = step(rng, w, &s, domain);
        let mut w = w.clone();
        if !weakly_above(c, &w, &v)? {
            if weakly_above(c, &v, &w)? {
                std::mem::swap(&mut w, &mut v);
            } else {
                v = gen::pareto_pair(rng, &w, &s.families, domain, false).1;
            }
        }
        ws.push(w);
        vs.push(v);
    }
    let ks: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = ks.iter().sum();
    let weights: Vec<Rational> = ks.iter().map(|&k| Rational::new(k, total)).collect();
    let lhs = convex_combine(&weights.iter().cloned().zip(ws.iter().cloned()).collect::<Vec<_>>())?;
    let rhs = convex_combine(&weights.iter().cloned().zip(vs.iter().cloned()).collect::<Vec<_>>())?;
    if weakly_above(c, &lhs, &rhs)? {
        Ok(None)
    } else {
        let inputs: Vec<&World> = ws.iter().chain(&vs).collect();
        Ok(fail(&inputs, format!("{n}-way mixture ordered"), "mixture not ordered"))
    }
}

/// A world with an unconditionally convergent sum: ω cells are 0 or tails with limit 0.
fn summable_world<R: Rng>(rng: &mut R, s: &Sample, domain: Domain) -> World {
    let values = s
        .population
        .cells()
        .iter()
        .zip(&s.families)
        .map(|(cell, fam)| {
            if cell.size.is_finite() {
                return CellValue::Level(gen::level(rng));
            }
            match (fam, domain) {
                (CellFamily::Geometric, Domain::Descriptor) => {
                    let v = gen::cell_value(rng, CellFamily::Geometric, domain);
                    let limit = v.as_tail().limit().clone();
                    v.sub(&CellValue::Level(limit)).expect("constant shift stays in family")
                }
                _ => CellValue::Level(Rational::zero()),
            }
        })
        .collect();
    World::new(s.population.clone(), values).expect("summable values fit")
}

fn sum_axiom<R: Rng>(c: Criterion, domain: Domain, t: usize, rng: &mut R) -> Result<Outcome> {
    let (w, v) = if t == 0 && domain == Domain::Descriptor {
        let (a, b) = witness::geometric_gap();
        (b, a)
    } else {
        let s = gen::sample(rng, 0, domain);
        let w = summable_world(rng, &s, domain);
        let v = if rng.gen_bool(0.5) {
            summable_world(rng, &s, domain)
        } else {
            let mut vals = w.values().to_vec();
            if let Some(i) = (0..vals.len()).find(|&i| s.population.size(i).is_finite()) {
                vals[i] = CellValue::Level(gen::level(rng));
            }
            w.with_values(vals)?
        };
        (w, v)
    };
    let zero = World::constant(w.population().clone(), Rational::zero());
    let total = |x: &World| crate::criteria::sum_of_differences(x, &zero);
    let (sw, sv) = (total(&w)?, total(&v)?);
    let (crate::exactnum::SumClass::Finite(a), crate::exactnum::SumClass::Finite(b)) = (&sw, &sv) else {
        return Ok(fail(&[&w, &v], "convergent sums", format!("{sw:?}, {sv:?}")));
    };
    let expected = a >= b;
    let got = weakly_above(c, &w, &v)?;
    Ok(if expected == got { None } else { fail(&[&w, &v], format!("w ≽ v is {expected}"), got) })
}

fn corrected_witness() -> World {
    let pop = crate::worlds::Population::of(&[("A", Cardinal::Omega), ("N", Cardinal::Finite(3)), ("rest", Cardinal::Omega)])
        .unwrap();
    World::from_levels(pop, vec![Rational::from_integer(3), Rational::from_integer(-1), Rational::zero()]).unwrap()
}

/// A finite-valued world whose ω cells are non-negative.
fn positive_world<R: Rng>(rng: &mut R) -> World {
    let s = gen::sample(rng, 1, Domain::FiniteValued);
    let values = s.worlds[0]
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = v.level().unwrap();
            CellValue::Level(if s.population.size(i).is_infinite() { x.abs() } else { x.clone() })
        })
        .collect();
    s.worlds[0].with_values(values).unwrap()
}

/// Up to three legal restricted transfers, each drawn against and applied to the running world.
pub(crate) fn random_transfers<R: Rng>(rng: &mut R, u: &World) -> Result<(World, Vec<RestrictedTransfer>)> {
    let mut current = u.clone();
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let pop = current.population();
        let pick = |sign: i8| -> Vec<usize> {
            (0..pop.len())
                .filter(|&i| current.value(i).level().is_some_and(|x| x.signum() == sign))
                .collect()
        };
        let (donors, recipients) = (pick(1), pick(-1));
        if donors.is_empty() || recipients.is_empty() {
            break;
        }
        let d = donors[rng.gen_range(0..donors.len())];
        let r = recipients[rng.gen_range(0..recipients.len())];
        let (dv, rv) = (current.value(d).level().unwrap().clone(), current.value(r).level().unwrap().clone());
        let cap = dv.min(rv.abs());
        let m = rng.gen_range(1..=4);
        let amount = cap * Rational::new(rng.gen_range(1..=m), m);
        let (ds, rs) = (pop.size(d), pop.size(r));
        let paired = if ds.is_infinite() && rs.is_infinite() && rng.gen_bool(0.5) {
            Cardinal::Omega
        } else {
            let bound = |s: Cardinal| s.finite().unwrap_or(2);
            Cardinal::Finite(rng.gen_range(1..=bound(ds).min(bound(rs))))
        };
        let t = RestrictedTransfer { donor: pop.id(d).into(), recipient: pop.id(r).into(), amount, paired_count: paired };
        current = apply_restricted_transfers(&current, std::slice::from_ref(&t))?;
        out.push(t);
    }
    Ok((current, out))
}

/// `v` carried onto the refined population of `moved` (refined from `base`).
fn aligned_like(v: &World, moved: &World, base: &World) -> Result<World> {
    debug_assert_eq!(v.population(), base.population());
    let values = moved
        .population()
        .cells()
        .iter()
        .map(|c| {
            let parent = c.id.split("~t").next().unwrap();
            v.value_of(parent).cloned().expect("transfer cells descend from base cells")
        })
        .collect();
    Ok(World::new(moved.population().clone(), values)?)
}
