//! Catching Up and Overtaking on eventually periodic welfare streams.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::criteria::Verdict;
use crate::error::{Error, Result};
use crate::exactnum::{Cardinal, Rational};
use crate::worlds::{Cell, CellValue, Population, World};

/// `prefix[0], prefix[1], …` followed by `period` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PeriodicStream {
    prefix: Vec<Rational>,
    period: Vec<Rational>,
}

#[derive(Deserialize)]
struct RawStream {
    #[serde(default)]
    prefix: Vec<Rational>,
    period: Vec<Rational>,
}

impl<'de> Deserialize<'de> for PeriodicStream {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawStream::deserialize(d)?;
        PeriodicStream::new(raw.prefix, raw.period).map_err(serde::de::Error::custom)
    }
}

impl PeriodicStream {
    pub fn new(prefix: Vec<Rational>, period: Vec<Rational>) -> Result<PeriodicStream> {
        if period.is_empty() {
            return Err(Error::Domain("a stream period must be nonempty".into()));
        }
        Ok(PeriodicStream { prefix, period })
    }

    /// Convenience constructor from integers.
    pub fn ints(prefix: &[i64], period: &[i64]) -> PeriodicStream {
        let conv = |xs: &[i64]| xs.iter().map(|&x| Rational::from_integer(x)).collect();
        PeriodicStream::new(conv(prefix), conv(period)).expect("nonempty period")
    }

    pub fn prefix(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn period(&self) -> &[Rational] {
        &self.period
    }

    /// Value at position `n`, counting from 1.
    pub fn at(&self, n: usize) -> &Rational {
        assert!(n >= 1, "stream positions start at 1");
        if n <= self.prefix.len() {
            &self.prefix[n - 1]
        } else {
            &self.period[(n - self.prefix.len() - 1) % self.period.len()]
        }
    }

    /// Pointwise combination over the common shape of both streams.
    pub fn zip_with(&self, other: &PeriodicStream, f: impl Fn(&Rational, &Rational) -> Rational) -> PeriodicStream {
        let (p, l) = common_shape(self, other);
        let (ap, al) = self.stretched(p, l);
        let (bp, bl) = other.stretched(p, l);
        let join = |xs: Vec<Rational>, ys: Vec<Rational>| xs.iter().zip(&ys).map(|(x, y)| f(x, y)).collect();
        PeriodicStream { prefix: join(ap, bp), period: join(al, bl) }
    }

    /// The same stream written with a longer prefix and a period of length `period_len`.
    fn stretched(&self, prefix_len: usize, period_len: usize) -> (Vec<Rational>, Vec<Rational>) {
        let prefix = (1..=prefix_len).map(|n| self.at(n).clone()).collect();
        let period = (prefix_len + 1..=prefix_len + period_len).map(|n| self.at(n).clone()).collect();
        (prefix, period)
    }
}

/// Common prefix length and period length for a pair of streams.
pub fn common_shape(w: &PeriodicStream, v: &PeriodicStream) -> (usize, usize) {
    (w.prefix.len().max(v.prefix.len()), w.period.len().lcm(&v.period.len()))
}

/// Partial sums of `w - v`: `S_P` and `S_P + partial(r)` for `r = 1..=L`.
struct Drift {
    residues: Vec<Rational>,
    delta: Rational,
}

fn drift(w: &PeriodicStream, v: &PeriodicStream) -> Drift {
    let (p, l) = common_shape(w, v);
    let (wp, wl) = w.stretched(p, l);
    let (vp, vl) = v.stretched(p, l);
    let base: Rational = wp.iter().zip(&vp).map(|(a, b)| a - b).sum();
    let mut running = base.clone();
    let mut residues = Vec::with_capacity(l);
    for (a, b) in wl.iter().zip(&vl) {
        running += &(a - b);
        residues.push(running.clone());
    }
    let delta = residues.last().unwrap() - &base;
    Drift { residues, delta }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum EventualSign {
    Positive,
    NonNegative,
}

impl Drift {
    fn eventually(&self, sign: EventualSign) -> bool {
        match self.delta.signum() {
            1 => true,
            -1 => false,
            _ => self.residues.iter().all(|s| match sign {
                EventualSign::Positive => s.is_positive(),
                EventualSign::NonNegative => !s.is_negative(),
            }),
        }
    }

    fn eventually_zero(&self) -> bool {
        self.delta.is_zero() && self.residues.iter().all(Rational::is_zero)
    }

    fn negate(&self) -> Drift {
        Drift { residues: self.residues.iter().map(|s| -s).collect(), delta: -&self.delta }
    }
}

/// Catching Up: `w ≽ v` iff `S_N = Σ_{i≤N} (w_i - v_i)` is eventually `≥ 0`.
pub fn cu_compare(w: &PeriodicStream, v: &PeriodicStream) -> Verdict {
    let d = drift(w, v);
    Verdict::from_weak(d.eventually(EventualSign::NonNegative), d.negate().eventually(EventualSign::NonNegative))
}

/// Overtaking: better iff `S_N` is eventually `> 0`, equivalent iff eventually `= 0`.
pub fn ot_compare(w: &PeriodicStream, v: &PeriodicStream) -> Verdict {
    let d = drift(w, v);
    let zero = d.eventually_zero();
    Verdict::from_weak(
        zero || d.eventually(EventualSign::Positive),
        zero || d.negate().eventually(EventualSign::Positive),
    )
}

fn value_cells<K: Ord + Clone>(keys: impl Iterator<Item = (K, bool)>) -> BTreeMap<K, Cardinal> {
    let mut cells = BTreeMap::new();
    for (k, recurring) in keys {
        let slot = cells.entry(k).or_insert(Cardinal::ZERO);
        *slot = if recurring { Cardinal::Omega } else { *slot + Cardinal::Finite(1) };
    }
    cells
}

/// Drop the enumeration: one cell per value, sized by how often the value occurs.
pub fn forget_order(s: &PeriodicStream) -> World {
    let keys = s
        .prefix
        .iter()
        .map(|x| (x.clone(), false))
        .chain(s.period.iter().map(|x| (x.clone(), true)));
    let cells = value_cells(keys);
    let population = Population::new(cells.iter().map(|(x, n)| Cell::new(x.to_string(), *n)).collect())
        .expect("a periodic stream has a recurring value");
    World::from_levels(population, cells.into_keys().collect()).expect("levels match cells")
}

/// The unordered pair behind two streams: one cell per joint value `(w_i, v_i)`.
pub fn forget_order_pair(w: &PeriodicStream, v: &PeriodicStream) -> (World, World) {
    let (p, l) = common_shape(w, v);
    let (wp, wl) = w.stretched(p, l);
    let (vp, vl) = v.stretched(p, l);
    let keys = wp
        .into_iter()
        .zip(vp)
        .map(|k| (k, false))
        .chain(wl.into_iter().zip(vl).map(|k| (k, true)));
    let cells = value_cells(keys);
    let population = Population::new(
        cells.iter().map(|((a, b), n)| Cell::new(format!("{a}|{b}"), *n)).collect(),
    )
    .expect("a periodic stream has a recurring value");
    let wv = cells.keys().map(|(a, _)| CellValue::Level(a.clone())).collect();
    let vv = cells.keys().map(|(_, b)| CellValue::Level(b.clone())).collect();
    (
        World::new(population.clone(), wv).expect("levels match cells"),
        World::new(population, vv).expect("levels match cells"),
    )
}
