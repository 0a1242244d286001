use rand::seq::SliceRandom;
use rand::Rng;

use super::{witness, AxiomId, Outcome};
use crate::criteria::{Criterion, Verdict};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::gen;
use crate::ordered::{cu_compare, ot_compare, PeriodicStream};

fn cmp(c: Criterion, w: &PeriodicStream, v: &PeriodicStream) -> Verdict {
    match c {
        Criterion::CatchingUp => cu_compare(w, v),
        _ => ot_compare(w, v),
    }
}

fn show(streams: &[&PeriodicStream]) -> Vec<String> {
    streams.iter().map(|s| serde_json::to_string(s).expect("streams serialize")).collect()
}

fn small<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(-4..=4), rng.gen_range(1..=2))
}

fn bump_values<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { Rational::zero() } else { Rational::new(rng.gen_range(1..=3), 2) })
        .collect()
}

/// A non-negative stream with at least one positive entry.
fn bump<R: Rng>(rng: &mut R) -> PeriodicStream {
    let prefix_len = rng.gen_range(0..=3);
    let mut prefix = bump_values(rng, prefix_len);
    let period_len = rng.gen_range(1..=3);
    let period = bump_values(rng, period_len);
    if prefix.iter().chain(&period).all(Rational::is_zero) {
        if prefix.is_empty() {
            prefix.push(Rational::one());
        } else {
            let i = rng.gen_range(0..prefix.len());
            prefix[i] = Rational::one();
        }
    }
    PeriodicStream::new(prefix, period).expect("nonempty period")
}

/// Entries `(a, b)` closed under swapping: each off-diagonal pair appears in both orders.
fn symmetric_block<R: Rng>(rng: &mut R, pairs: usize, diagonal: usize) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for _ in 0..pairs {
        let (a, b) = (small(rng), small(rng));
        out.push((a.clone(), b.clone()));
        out.push((b, a));
    }
    for _ in 0..diagonal {
        let c = small(rng);
        out.push((c.clone(), c));
    }
    out.shuffle(rng);
    out
}

/// Two streams whose joint census is symmetric under swapping coordinates, so some
/// rearrangement of positions carries each onto the other.
pub fn swap_symmetric_pair<R: Rng>(rng: &mut R) -> (PeriodicStream, PeriodicStream) {
    let (pairs, diagonal) = (rng.gen_range(1..=2), rng.gen_range(0..=1));
    let period = symmetric_block(rng, pairs, diagonal);
    let (pairs, diagonal) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
    let prefix = symmetric_block(rng, pairs, diagonal);
    let split = |xs: &[(Rational, Rational)], first: bool| -> Vec<Rational> {
        xs.iter().map(|(a, b)| if first { a.clone() } else { b.clone() }).collect()
    };
    (
        PeriodicStream::new(split(&prefix, true), split(&period, true)).expect("nonempty period"),
        PeriodicStream::new(split(&prefix, false), split(&period, false)).expect("nonempty period"),
    )
}

/// A stream near `w`: each entry moves by at most one half.
fn tweak<R: Rng>(rng: &mut R, w: &PeriodicStream) -> PeriodicStream {
    let noise = gen::stream(rng);
    w.zip_with(&noise, |a, b| {
        let step = Rational::new(b.signum() as i64, 2);
        a + &step
    })
}

fn expect(inputs: &[&PeriodicStream], ok: bool, expected: impl ToString, got: Verdict) -> Outcome {
    if ok {
        None
    } else {
        Some((show(inputs), expected.to_string(), got.to_string()))
    }
}

pub(super) fn trial<R: Rng>(c: Criterion, axiom: AxiomId, t: u64, rng: &mut R) -> Result<Outcome> {
    Ok(match axiom {
        AxiomId::Reflexivity => {
            let w = gen::stream(rng);
            let got = cmp(c, &w, &w);
            expect(&[&w], got == Verdict::Equivalent, Verdict::Equivalent, got)
        }
        AxiomId::Transitivity => {
            let w = gen::stream(rng);
            let v = tweak(rng, &w);
            let u = tweak(rng, &v);
            let above = |a: &PeriodicStream, b: &PeriodicStream| cmp(c, a, b).forward();
            if above(&w, &v) && above(&v, &u) && !above(&w, &u) {
                Some((show(&[&w, &v, &u]), "w ≽ u".into(), cmp(c, &w, &u).to_string()))
            } else {
                None
            }
        }
        AxiomId::StrongPareto => {
            let w = gen::stream(rng);
            let v = w.zip_with(&bump(rng), |a, b| a - b);
            let got = cmp(c, &w, &v);
            expect(&[&w, &v], got == Verdict::StrictlyBetter, Verdict::StrictlyBetter, got)
        }
        AxiomId::PermutationInvariance => {
            let (w, v) = if t == 0 { witness::stream_witness() } else { swap_symmetric_pair(rng) };
            let got = cmp(c, &w, &v);
            let symmetric = matches!(got, Verdict::Equivalent | Verdict::Incomparable);
            expect(&[&w, &v], symmetric, "equivalent or incomparable", got)
        }
        AxiomId::Anonymity => {
            let (w, v) = if t == 0 { witness::stream_witness() } else { swap_symmetric_pair(rng) };
            let got = cmp(c, &w, &v);
            expect(&[&w, &v], got == Verdict::Equivalent, Verdict::Equivalent, got)
        }
        AxiomId::Completeness => {
            let (w, v) = (gen::stream(rng), gen::stream(rng));
            let got = cmp(c, &w, &v);
            expect(&[&w, &v], got.is_comparable(), "comparable", got)
        }
        other => return Err(Error::Domain(format!("{other} cannot be instantiated for {c}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::trial_rng;
    use crate::ordered::forget_order_pair;
    use crate::worlds::World;

    fn swapped(w: &World, v: &World) -> bool {
        let joint = |a: &World, b: &World| {
            let mut cells: Vec<_> = a
                .values()
                .iter()
                .zip(b.values())
                .enumerate()
                .map(|(i, (x, y))| (x.level().unwrap().clone(), y.level().unwrap().clone(), a.population().size(i)))
                .collect();
            cells.sort();
            cells
        };
        joint(w, v) == joint(v, w)
    }

    #[test]
    fn swap_pairs_have_symmetric_census() {
        for t in 0..300 {
            let (w, v) = swap_symmetric_pair(&mut trial_rng(5, t));
            let (wj, vj) = forget_order_pair(&w, &v);
            assert!(swapped(&wj, &vj), "trial {t}");
        }
        let (w, v) = witness::stream_witness();
        let (wj, vj) = forget_order_pair(&w, &v);
        assert!(swapped(&wj, &vj));
    }

    #[test]
    fn bump_is_dominated() {
        for t in 0..200 {
            let mut rng = trial_rng(9, t);
            let w = gen::stream(&mut rng);
            let v = w.zip_with(&bump(&mut rng), |a, b| a - b);
            assert_eq!(cu_compare(&w, &v), Verdict::StrictlyBetter);
        }
    }
}
