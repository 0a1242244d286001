use super::builder::{pair_swap_flow, swap_flow, Builder, Layout};
use super::{ContradictionKind, ProofCase, RefutationCertificate};
use crate::criteria::compare_cp;
use crate::error::{Error, Result};
use crate::exactnum::{Cardinal, Rational};
use crate::worlds::World;

fn class(layout: &Layout, wv: (i64, i64)) -> Option<usize> {
    let key = (Rational::from_integer(wv.0), Rational::from_integer(wv.1));
    (0..layout.len()).find(|&i| layout.w[i] == key.0 && layout.v[i] == key.1)
}

/// Refute `w ≽ v` for {0,1}-valued worlds using Strong Pareto and Permutation Invariance only.
pub fn refute_two_valued(w: &World, v: &World) -> Result<RefutationCertificate> {
    if !(w.is_indicator() && v.is_indicator()) {
        return Err(Error::Domain("two-valued refutation needs {0,1}-valued worlds".into()));
    }
    if compare_cp(w, v)?.forward() {
        return Err(Error::NotRefutable(format!("{w} is weakly above {v} under the counting preorder")));
    }
    let mut layout = Layout::from_pair(w, v)?;
    let size = |c: Option<usize>, l: &Layout| c.map_or(Cardinal::ZERO, |i| l.size(i));
    let (p, q) = (class(&layout, (1, 0)), class(&layout, (0, 1)));
    let (gains, losses) = (size(p, &layout), size(q, &layout));
    let q = q.expect("losses are nonempty whenever the counting preorder declines");

    if gains.is_infinite() && losses.is_infinite() {
        let p = p.unwrap();
        let halves = layout.split_omega(p, 2);
        let pop = layout.population()?;
        let mut b = Builder::new(pop);
        let s0 = b.assume(layout.w.clone(), layout.v.clone());
        let swapped = b.rearrange(s0, swap_flow(b.population(), q, &halves))?;
        let w_minus = super::builder::set(&layout.w, &[halves[1]], &Rational::zero());
        let drop = b.pareto(layout.w.clone(), w_minus);
        let v_over = b.trans(vec![swapped, drop]);
        let back = b.rearrange(v_over, pair_swap_flow(b.population(), &[(halves[0], q)]))?;
        let cycle = b.trans(vec![back, v_over]);
        return Ok(b.conclude(ContradictionKind::StrictCycle, cycle, ProofCase::TwoValuedSwap));
    }

    let Cardinal::Finite(k) = gains else { unreachable!("infinite gains with finite losses are ranked") };
    let pop_levels = |l: &Layout| (l.w.clone(), l.v.clone());
    if k == 0 {
        let pop = layout.population()?;
        let mut b = Builder::new(pop);
        let (wl, vl) = pop_levels(&layout);
        let s0 = b.assume(wl, vl);
        return Ok(b.conclude(ContradictionKind::ParetoViolation, s0, ProofCase::TwoValuedCycle));
    }
    let p = p.unwrap();
    let carved = split_off(&mut layout, q, k);
    let pop = layout.population()?;
    let mut b = Builder::new(pop);
    let (a, bb) = pop_levels(&layout);
    let s0 = b.assume(a.clone(), bb.clone());
    let image = b.rearrange(s0, pair_swap_flow(b.population(), &[(p, carved)]))?;
    let (fa, fb) = (b.left(image).clone(), b.right(image).clone());
    let fb_over_a = b.pareto(fb, a);
    let b_over_fa = b.pareto(bb, fa);
    let cycle = b.trans(vec![image, fb_over_a, s0, b_over_fa]);
    Ok(b.conclude(ContradictionKind::ReflexivityViolation, cycle, ProofCase::TwoValuedCycle))
}

/// Split a cell of exactly `k` individuals off cell `i`, which must be strictly larger.
fn split_off(layout: &mut Layout, i: usize, k: u64) -> usize {
    let id = format!("{}@{k}", layout.cells[i].id);
    if let Cardinal::Finite(n) = layout.size(i) {
        layout.cells[i].size = Cardinal::Finite(n - k);
    }
    layout.cells.push(crate::worlds::Cell::new(id, Cardinal::Finite(k)));
    layout.w.push(layout.w[i].clone());
    layout.v.push(layout.v[i].clone());
    layout.len() - 1
}
