use super::builder::{count_down, count_up, parts, set, shift_flow, Builder, Layout};
use super::{ContradictionKind, ProofCase, RefutationCertificate};
use crate::criteria::{compare_sp, Verdict};
use crate::error::{Error, Result};
use crate::exactnum::{Cardinal, Rational};
use crate::worlds::World;

/// Refute `w ≽ v` for finite-valued worlds that the Sum Preorder does not rank that way.
pub fn refute_finite_valued(w: &World, v: &World) -> Result<RefutationCertificate> {
    if !(w.is_finite_valued() && v.is_finite_valued()) || w.levels().is_none() || v.levels().is_none() {
        return Err(Error::Domain("refutation needs finite-valued worlds without tails".into()));
    }
    match compare_sp(w, v)? {
        Verdict::StrictlyWorse => case_1(Layout::from_pair(w, v)?),
        Verdict::Incomparable => case_2(Layout::from_pair(w, v)?),
        _ => Err(Error::NotRefutable(format!("{w} is weakly above {v} under the sum preorder"))),
    }
}

/// `v` beats `w` by a finite margin or by an infinite gain: pin a finite block
/// carrying the advantage and symmetrize it.
fn case_1(mut layout: Layout) -> Result<RefutationCertificate> {
    let delta = |l: &Layout, i: usize| &l.v[i] - &l.w[i];
    let mut deficit = Rational::zero();
    let mut z = Vec::new();
    for i in 0..layout.len() {
        let d = delta(&layout, i);
        if d.is_negative() {
            let Cardinal::Finite(k) = layout.size(i) else {
                unreachable!("an infinite gain for w would stop v from being strictly better")
            };
            deficit += &(-&d * Rational::from_integer(k as i64));
            z.push(i);
        }
    }
    let z_gains = z.clone();
    let mut z: Vec<usize> = z_gains.iter().flat_map(|&i| carve_all(&mut layout, i)).collect();
    let mut ahead: Vec<usize> = (0..layout.len()).filter(|&i| delta(&layout, i).is_positive()).collect();
    ahead.sort_by(|&i, &j| delta(&layout, j).cmp(&delta(&layout, i)));
    let mut surplus = Rational::zero();
    for i in ahead {
        if surplus > deficit {
            break;
        }
        let d = delta(&layout, i);
        let need = ((&deficit - &surplus) / &d).floor_u64().expect("bounded block") + 1;
        let take = match layout.size(i) {
            Cardinal::Finite(k) => k.min(need),
            Cardinal::Omega => need,
        };
        surplus += &(&d * Rational::from_integer(take as i64));
        z.extend(layout.carve(i, take));
    }
    debug_assert!(surplus > deficit);

    let pop = layout.population()?;
    let mut b = Builder::new(pop);
    let (h, g) = (layout.w.clone(), layout.v.clone());
    let g_minus: Vec<Rational> =
        (0..layout.len()).map(|i| if z.contains(&i) { g[i].clone() } else { h[i].clone() }).collect();
    let s0 = b.assume(h, g.clone());
    let s1 = b.pareto(g, g_minus);
    let s2 = b.trans(vec![s0, s1]);
    let mut premises = vec![s2];
    for k in 1..z.len() {
        let flow = shift_flow(b.population(), &z, k);
        premises.push(b.rearrange(s2, flow)?);
    }
    let mean = b.convex(premises)?;
    Ok(b.conclude(ContradictionKind::ParetoViolation, mean, ProofCase::Case1))
}

fn carve_all(layout: &mut Layout, i: usize) -> Vec<usize> {
    let Cardinal::Finite(k) = layout.size(i) else { unreachable!() };
    layout.carve(i, k)
}

/// How the argument closes for a chosen infinite losing cell `e`, where `w = c`
/// and `v = d`, against `a`, `b`, the extremes of `w` and `v` over the cells where `w` wins.
enum Plan {
    /// `a ≤ c`: lift the gains to `c` and average `v` upward on `e`.
    Up,
    /// `c < a` and `b < d`: average twice through the midpoint `m1`.
    Twice { m1: Rational, n1: usize, n2: usize },
    /// `c < a` and `d ≤ b`: lower `v` on the gains to `k` and average `w` downward.
    Down { case: ProofCase, k: Rational, n: usize },
}

struct Choice {
    gains: Vec<usize>,
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
    e: usize,
    plan: Plan,
}

fn plan(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> (Plan, usize) {
    if c >= a {
        let n = count_up(d, b, &c.midpoint(d));
        (Plan::Up, parts(n))
    } else if d > b {
        let m1 = b.clone().max(c.clone()).midpoint(d);
        let n1 = count_down(a, c, &m1);
        let n2 = count_up(d, b, &m1.midpoint(d));
        let size = parts(n1) + parts(n2);
        (Plan::Twice { m1, n1, n2 }, size)
    } else {
        // With d = b, v⁻ is already constant on the gains and `e`.
        let (case, k) = if d < b { (ProofCase::Case2b, d.clone()) } else { (ProofCase::Case2a, b.clone()) };
        let n = count_down(a, c, &c.midpoint(&k));
        (Plan::Down { case, k, n }, parts(n))
    }
}

/// Every infinite losing cell supports the argument; take the one needing the fewest parts.
fn choose(layout: &Layout) -> Choice {
    let gains: Vec<usize> = (0..layout.len()).filter(|&i| layout.w[i] > layout.v[i]).collect();
    let a = gains.iter().map(|&i| layout.w[i].clone()).max().expect("infinitely many gains");
    let b = gains.iter().map(|&i| layout.v[i].clone()).min().unwrap();
    let (e, plan, _) = (0..layout.len())
        .filter(|&i| layout.w[i] < layout.v[i] && layout.size(i).is_infinite())
        .map(|i| {
            let (p, size) = plan(&a, &b, &layout.w[i], &layout.v[i]);
            (i, p, size)
        })
        .min_by_key(|(i, _, size)| (*size, *i))
        .expect("infinitely many losses on one level");
    let (c, d) = (layout.w[e].clone(), layout.v[e].clone());
    Choice { gains, a, b, c, d, e, plan }
}

/// Infinitely many gains and infinitely many losses: lift `w` on its gains,
/// lower `v`, and close with the split value argument.
fn case_2(mut layout: Layout) -> Result<RefutationCertificate> {
    let Choice { gains, a, b, c, d, e, plan } = choose(&layout);
    match plan {
        Plan::Twice { m1, n1, n2 } => {
            let pieces = layout.split_omega(e, parts(n1) + parts(n2));
            let (e1, e2) = pieces.split_at(parts(n1));
            let mut bld = Builder::new(layout.population()?);
            let a_e1: Vec<usize> = gains.iter().chain(e1).copied().collect();
            let w_plus = set(&layout.w, &gains, &a);
            let v_minus = set(&layout.v, &a_e1, &b);
            let lifted = lift_and_lower(&mut bld, &layout, w_plus.clone(), v_minus);
            let wm_v = bld.ivl_down(lifted, &gains, e1, &c, &a, &m1)?;
            let wm = bld.left(wm_v).clone();
            let all: Vec<usize> = a_e1.iter().chain(e2).copied().collect();
            let wm_plus = set(&wm, e2, &m1);
            debug_assert_eq!(wm_plus, set(&w_plus, &all, &m1));
            let raise = bld.pareto(wm_plus, wm);
            let fact = bld.trans(vec![raise, wm_v]);
            let cycle = bld.split_value_up(fact, e2, &a_e1, &b, &d, &m1)?;
            Ok(bld.conclude(ContradictionKind::StrictCycle, cycle, ProofCase::Case2a))
        }
        Plan::Down { case, k, n } => {
            let low = layout.split_omega(e, parts(n));
            let mut bld = Builder::new(layout.population()?);
            let w_plus = set(&layout.w, &gains, &a);
            let v_minus = set(&layout.v, &gains, &k);
            let fact = lift_and_lower(&mut bld, &layout, w_plus, v_minus);
            let cycle = bld.split_value_down(fact, &gains, &low, &c, &a, &k)?;
            Ok(bld.conclude(ContradictionKind::StrictCycle, cycle, case))
        }
        Plan::Up => {
            let n = count_up(&d, &b, &c.midpoint(&d));
            let high = layout.split_omega(e, parts(n));
            let mut bld = Builder::new(layout.population()?);
            let w_plus = set(&layout.w, &gains, &c);
            let v_minus = set(&layout.v, &gains, &b);
            let fact = lift_and_lower(&mut bld, &layout, w_plus, v_minus);
            let cycle = bld.split_value_up(fact, &high, &gains, &b, &d, &c)?;
            Ok(bld.conclude(ContradictionKind::StrictCycle, cycle, ProofCase::Case2c))
        }
    }
}

/// Assume `w ≽ v`, then chain `w⁺ ≽ w ≽ v ≽ v⁻`.
fn lift_and_lower(b: &mut Builder, layout: &Layout, w_plus: Vec<Rational>, v_minus: Vec<Rational>) -> usize {
    let s0 = b.assume(layout.w.clone(), layout.v.clone());
    let up = b.pareto(w_plus, layout.w.clone());
    let down = b.pareto(layout.v.clone(), v_minus);
    b.trans(vec![up, s0, down])
}
