//! Brute-force reference implementations.
//!
//! Each works on explicit finite instantiations and never touches the
//! mass and count summaries that the decision procedures use.

use crate::criteria::{weakly_above, Criterion, Verdict};
use crate::error::Result;
use crate::exactnum::{Cardinal, Rational};
use crate::ordered::{common_shape, PeriodicStream};
use crate::worlds::{CellValue, World};

/// Explicit differences `w(x) - v(x)` for the first `horizon(cell)` individuals of each cell.
pub fn explicit_differences(
    w: &World,
    v: &World,
    horizon: impl Fn(&CellValue, &CellValue, Cardinal) -> u64,
) -> Vec<Rational> {
    assert_eq!(w.population(), v.population(), "oracle needs aligned worlds");
    let mut out = Vec::new();
    for (i, (a, b)) in w.values().iter().zip(v.values()).enumerate() {
        let size = w.population().size(i);
        let n = match size {
            Cardinal::Finite(k) => horizon(a, b, size).min(k),
            Cardinal::Omega => horizon(a, b, size),
        };
        let (ta, tb) = (a.as_tail(), b.as_tail());
        out.extend((1..=n).map(|k| ta.term(k) - tb.term(k)));
    }
    out
}

fn is_tail_cell(a: &CellValue, b: &CellValue) -> bool {
    matches!(a, CellValue::Tail(_)) || matches!(b, CellValue::Tail(_))
}

/// Finite Sum Preorder on a truncation: the best finite `A` drawn from a short
/// horizon, against every finite `B ⊇ A` drawn from a longer one.
///
/// Horizons are tuned for the instances produced by `gen::fsp_pair`: at most one
/// finite cell carrying a difference of at most 6 in total, at most two ω cells,
/// constant ω differences of magnitude ≤ 2, tails with limit 0 and ratios of
/// magnitude ≤ 1/2. Two short constant cells then gain at most 2·10 + 6 = 26,
/// below the 30 lost on a long one.
pub fn fsp_weak_truncated(w: &World, v: &World) -> bool {
    let omega_constants = w
        .values()
        .iter()
        .zip(v.values())
        .enumerate()
        .filter(|(i, (a, b))| w.population().size(*i).is_infinite() && !is_tail_cell(a, b))
        .count();
    let short = |a: &CellValue, b: &CellValue, _| if is_tail_cell(a, b) { 16 } else { 10 };
    let long_const = if omega_constants >= 2 { 30 } else { 40 };
    let long = |a: &CellValue, b: &CellValue, _| if is_tail_cell(a, b) { 20 } else { long_const };
    let a_universe = explicit_differences(w, v, short);
    let b_universe = explicit_differences(w, v, long);
    // max over A ⊆ short universe of min over B ⊇ A within the long universe
    let best_a: Rational = a_universe.iter().filter(|d| d.is_positive()).sum();
    let worst_rest: Rational = b_universe.iter().filter(|d| d.is_negative()).map(|d| d.abs()).sum();
    best_a >= worst_rest
}

/// `w ⊵ v` by enumerating every pair of equal-size selections `Y`, `Z` of size ≤ 4
/// over an instantiation with at most four individuals per cell.
pub fn spd_weak_enumerated(w: &World, v: &World) -> Result<bool> {
    if weakly_above(Criterion::SumPreorder, w, v)? {
        return Ok(true);
    }
    let diffs = explicit_differences(w, v, |_, _, _| 4);
    let gains: Vec<Rational> = diffs.iter().filter(|d| d.is_positive()).cloned().collect();
    let losses: Vec<Rational> = diffs.iter().filter(|d| d.is_negative()).map(|d| d.abs()).collect();
    if gains.is_empty() || losses.is_empty() {
        return Ok(false);
    }
    for k in 1..=4usize.min(gains.len()).min(losses.len()) {
        let ys = subset_sums(&gains, k);
        let zs = subset_sums(&losses, k);
        let min_y = ys.iter().min().unwrap();
        if zs.iter().any(|z| z > min_y) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn subset_sums(xs: &[Rational], k: usize) -> Vec<Rational> {
    fn go(xs: &[Rational], k: usize, start: usize, acc: Rational, out: &mut Vec<Rational>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..xs.len() {
            go(xs, k - 1, i + 1, &acc + &xs[i], out);
        }
    }
    let mut out = Vec::new();
    go(xs, k, 0, Rational::zero(), &mut out);
    out
}

/// Partial sums `S_1 … S_{P + 4L}` of `w - v`.
pub fn partial_sums(w: &PeriodicStream, v: &PeriodicStream) -> Vec<Rational> {
    let (p, l) = common_shape(w, v);
    let mut s = Rational::zero();
    (1..=p + 4 * l)
        .map(|n| {
            s += &(w.at(n) - v.at(n));
            s.clone()
        })
        .collect()
}

#[derive(Clone, Copy)]
struct ResidueTrend {
    eventually_nonneg: bool,
    eventually_pos: bool,
    eventually_zero: bool,
}

/// Read the eventual behaviour of each residue class off four consecutive periods.
fn trends(w: &PeriodicStream, v: &PeriodicStream) -> Vec<ResidueTrend> {
    let (p, l) = common_shape(w, v);
    let s = partial_sums(w, v);
    (0..l)
        .map(|r| {
            let samples: Vec<&Rational> = (0..4).map(|k| &s[p + k * l + r]).collect();
            let step = samples[1] - samples[0];
            for pair in samples.windows(2) {
                assert_eq!(pair[1] - pair[0], step, "partial sums are not arithmetic per residue");
            }
            let last = samples[3];
            ResidueTrend {
                eventually_nonneg: step.is_positive() || (step.is_zero() && !last.is_negative()),
                eventually_pos: step.is_positive() || (step.is_zero() && last.is_positive()),
                eventually_zero: step.is_zero() && last.is_zero(),
            }
        })
        .collect()
}

pub fn cu_by_partial_sums(w: &PeriodicStream, v: &PeriodicStream) -> Verdict {
    let fwd = trends(w, v).iter().all(|t| t.eventually_nonneg);
    let bwd = trends(v, w).iter().all(|t| t.eventually_nonneg);
    Verdict::from_weak(fwd, bwd)
}

pub fn ot_by_partial_sums(w: &PeriodicStream, v: &PeriodicStream) -> Verdict {
    let zero = trends(w, v).iter().all(|t| t.eventually_zero);
    let fwd = trends(w, v).iter().all(|t| t.eventually_pos);
    let bwd = trends(v, w).iter().all(|t| t.eventually_pos);
    Verdict::from_weak(zero || fwd, zero || bwd)
}
