use rand::Rng;

use super::schemas::random_transfers;
use super::witness::{self, IncompletenessLayout};
use super::{run_trials, Outcome};
use crate::criteria::{compare_pareto, compare_sp, Verdict};
use crate::error::Result;
use crate::exactnum::{Cardinal, Rational};
use crate::gen::trial_rng;
use crate::oracle::explicit_differences;
use crate::worlds::{align, apply_restricted_transfers, Correspondence, Population, RefinedCell, World};

fn check(failures: &mut Vec<String>, ok: bool, what: &str) {
    if !ok {
        failures.push(what.to_string());
    }
}

fn outcome(inputs: &[&World], failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        None
    } else {
        Some((inputs.iter().map(|w| w.to_string()).collect(), "all identities hold".into(), failures.join("; ")))
    }
}

fn random_layout<R: Rng>(rng: &mut R) -> IncompletenessLayout {
    let mut ids: Vec<String> = Vec::new();
    while ids.len() < 4 {
        let id = format!("c{}", rng.gen_range(0..1000));
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    let size = |rng: &mut R, max: u64| if rng.gen_bool(0.5) { Cardinal::Omega } else { Cardinal::Finite(rng.gen_range(1..=max)) };
    let a_rest_size = size(rng, 5);
    let rest = match rng.gen_range(0..3) {
        0 => None,
        _ => Some((ids[3].clone(), size(rng, 3))),
    };
    IncompletenessLayout { a_minus: ids[0].clone(), a_rest: ids[1].clone(), a_rest_size, b: ids[2].clone(), rest }
}

/// Any relation with Strong Pareto and Permutation Invariance must leave `w`
/// and `v` incomparable: check the rearrangement identities and the Pareto
/// step behind that argument on randomized layouts.
pub fn check_completeness_impossible(budget: u64, seed: u64) -> Result<super::CheckReport> {
    run_trials("completeness-impossible".into(), None, None, budget, seed, |t| {
        let layout = if t == 0 { IncompletenessLayout::default() } else { random_layout(&mut trial_rng(seed, t)) };
        let inc = witness::incompleteness(&layout)?;
        let mut failures = Vec::new();
        check(&mut failures, inc.swap.apply(&inc.w)? == inc.v, "π(w) = v");
        check(&mut failures, inc.swap.apply(&inc.v)? == inc.w, "π(v) = w");
        check(&mut failures, inc.swap_minus.apply(&inc.v)? == inc.w_minus, "π'(v) = w⁻");
        check(&mut failures, inc.swap_minus.apply(&inc.w_minus)? == inc.v, "π'(w⁻) = v");
        check(&mut failures, compare_pareto(&inc.w, &inc.w_minus)? == Verdict::StrictlyBetter, "w ≻ w⁻");
        Ok(outcome(&[&inc.w, &inc.w_minus, &inc.v], failures))
    })
}

/// `U = 3` on an ω cell with finitely many `-1`s elsewhere.
fn lv_world<R: Rng>(rng: &mut R) -> World {
    let mut cells = vec![("A".to_string(), Cardinal::Omega), ("Z".to_string(), Cardinal::Omega)];
    let mut levels = vec![Rational::from_integer(3), Rational::zero()];
    for j in 0..rng.gen_range(1..=3) {
        cells.push((format!("N{j}"), Cardinal::Finite(rng.gen_range(1..=3))));
        levels.push(Rational::from_integer(-1));
    }
    let refs: Vec<(&str, Cardinal)> = cells.iter().map(|(id, s)| (id.as_str(), *s)).collect();
    World::from_levels(Population::of(&refs).unwrap(), levels).unwrap()
}

/// `after` and `before` on the population of `after`, each transfer cell matched to its parent.
fn trace_back(after: &World, before: &World) -> Result<(World, World)> {
    let cells = after
        .population()
        .cells()
        .iter()
        .map(|c| RefinedCell {
            id: c.id.clone(),
            size: c.size,
            w_cell: c.id.clone(),
            v_cell: c.id.split("~t").next().unwrap().to_string(),
        })
        .collect();
    Ok(align(after, before, Some(&Correspondence { cells }))?)
}

/// The restricted-transfer fact under SP, followed by the corrected schema on
/// `U ≻ 0` worlds with a conservation check by explicit enumeration.
pub fn check_lv_fact(budget: u64, seed: u64) -> Result<super::CheckReport> {
    run_trials("restricted-transfers-fact".into(), None, None, budget, seed, |t| {
        let mut failures = Vec::new();
        if t == 0 {
            let (a, b, c, transfers) = witness::transfer_fact();
            let moved = apply_restricted_transfers(&a, &transfers)?;
            check(&mut failures, compare_sp(&a, &b)? == Verdict::StrictlyBetter, "a ≻ b");
            check(&mut failures, moved == c, "transfers turn a into c");
            check(&mut failures, compare_sp(&b, &c)? == Verdict::Incomparable, "b ⊥ c");
            return Ok(outcome(&[&a, &b, &c], failures));
        }
        let mut rng = trial_rng(seed, t);
        let u = lv_world(&mut rng);
        let zero = |w: &World| World::constant(w.population().clone(), Rational::zero());
        check(&mut failures, compare_sp(&u, &zero(&u))? == Verdict::StrictlyBetter, "U ≻ 0");
        let (_, transfers) = random_transfers(&mut rng, &u)?;
        let mut current = u.clone();
        for tr in &transfers {
            current = apply_restricted_transfers(&current, std::slice::from_ref(tr))?;
            check(&mut failures, compare_sp(&current, &zero(&current))? == Verdict::StrictlyBetter, "U* ≻ 0");
        }
        let (after, before) = trace_back(&current, &u)?;
        let horizon = |_: &_, _: &_, _: Cardinal| 4;
        let net: Rational = explicit_differences(&after, &before, horizon).into_iter().sum();
        check(&mut failures, net.is_zero(), "transfers conserve the finite total");
        Ok(outcome(&[&u, &current], failures))
    })
}
