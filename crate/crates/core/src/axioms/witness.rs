//! Concrete worlds from the classical constructions, shared by the axiom
//! harness, the replays and the tests.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactnum::{Cardinal, Rational};
use crate::ordered::PeriodicStream;
use crate::worlds::{CellValue, Population, Rearrangement, RestrictedTransfer, Tail, World};

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Cell layout for the incompleteness construction: `A = A⁻ ∪ (A∖A⁻)`, `B` disjoint from `A`.
#[derive(Clone, Debug)]
pub struct IncompletenessLayout {
    pub a_minus: String,
    pub a_rest: String,
    pub a_rest_size: Cardinal,
    pub b: String,
    pub rest: Option<(String, Cardinal)>,
}

impl Default for IncompletenessLayout {
    fn default() -> Self {
        IncompletenessLayout {
            a_minus: "A-".into(),
            a_rest: "A\\A-".into(),
            a_rest_size: Cardinal::Omega,
            b: "B".into(),
            rest: Some(("rest".into(), Cardinal::Omega)),
        }
    }
}

/// `w = 1_A`, `w⁻ = 1_{A⁻}`, `v = 1_B`, with `π` swapping `A` and `B` and `π'` swapping `A⁻` and `B`.
#[derive(Clone, Debug)]
pub struct Incompleteness {
    pub w: World,
    pub w_minus: World,
    pub v: World,
    pub swap: Rearrangement,
    pub swap_minus: Rearrangement,
}

pub fn incompleteness(layout: &IncompletenessLayout) -> Result<Incompleteness> {
    let l = layout;
    if l.b == l.a_minus || l.b == l.a_rest {
        return Err(Error::Domain("B must be disjoint from A".into()));
    }
    if l.a_rest_size.is_zero() {
        return Err(Error::Domain("A⁻ must be a proper subset of A".into()));
    }
    let mut cells = vec![
        (l.a_minus.as_str(), Cardinal::Omega),
        (l.a_rest.as_str(), l.a_rest_size),
        (l.b.as_str(), Cardinal::Omega),
    ];
    if let Some((id, size)) = &l.rest {
        cells.push((id.as_str(), *size));
    }
    let pop = Population::of(&cells)?;
    let indicator = |ones: &[&str]| {
        let levels = pop
            .cells()
            .iter()
            .map(|c| if ones.contains(&c.id.as_str()) { int(1) } else { int(0) })
            .collect();
        World::from_levels(pop.clone(), levels)
    };
    let w = indicator(&[&l.a_minus, &l.a_rest])?;
    let w_minus = indicator(&[&l.a_minus])?;
    let v = indicator(&[&l.b])?;
    let mut swap = vec![
        (l.a_minus.as_str(), l.b.as_str(), Cardinal::Omega),
        (l.a_rest.as_str(), l.b.as_str(), l.a_rest_size),
        (l.b.as_str(), l.a_minus.as_str(), Cardinal::Omega),
        (l.b.as_str(), l.a_rest.as_str(), l.a_rest_size),
    ];
    let mut swap_minus = vec![
        (l.a_minus.as_str(), l.b.as_str(), Cardinal::Omega),
        (l.b.as_str(), l.a_minus.as_str(), Cardinal::Omega),
        (l.a_rest.as_str(), l.a_rest.as_str(), l.a_rest_size),
    ];
    if let Some((id, size)) = &l.rest {
        swap.push((id.as_str(), id.as_str(), *size));
        swap_minus.push((id.as_str(), id.as_str(), *size));
    }
    Ok(Incompleteness {
        swap: Rearrangement::from_entries(&pop, &pop, &swap)?,
        swap_minus: Rearrangement::from_entries(&pop, &pop, &swap_minus)?,
        w,
        w_minus,
        v,
    })
}

/// `w = 1_A` with `A = A⁻ ∪ D`, and a permutation injecting `A` into `A⁻`.
pub fn injection() -> (World, Rearrangement) {
    let pop = Population::of(&[("A-", Cardinal::Omega), ("D", Cardinal::Omega), ("R", Cardinal::Omega)]).unwrap();
    let w = World::from_levels(pop.clone(), vec![int(1), int(1), int(0)]).unwrap();
    let pi = Rearrangement::from_entries(
        &pop,
        &pop,
        &[
            ("A-", "A-", Cardinal::Omega),
            ("D", "A-", Cardinal::Omega),
            ("R", "D", Cardinal::Omega),
            ("R", "R", Cardinal::Omega),
        ],
    )
    .unwrap();
    (w, pi)
}

fn two_cells() -> Population {
    Population::of(&[("A", Cardinal::Omega), ("rest", Cardinal::Omega)]).unwrap()
}

/// `w = 2` on an infinite coinfinite `A`, `v = 1` off `A`.
pub fn spd_witness() -> (World, World) {
    let pop = two_cells();
    (
        World::from_levels(pop.clone(), vec![int(2), int(0)]).unwrap(),
        World::from_levels(pop, vec![int(0), int(1)]).unwrap(),
    )
}

/// `w = 1` on `A`; `v(b_n) = 1/n` on a disjoint `B`.
pub fn harmonic_witness() -> (World, World) {
    let pop = Population::of(&[("A", Cardinal::Omega), ("B", Cardinal::Omega)]).unwrap();
    (
        World::from_levels(pop.clone(), vec![int(1), int(0)]).unwrap(),
        World::new(pop, vec![CellValue::Level(int(0)), CellValue::Tail(Tail::harmonic(int(1)))]).unwrap(),
    )
}

/// `w = ⟨1, 0, 0, …⟩` and `v = ⟨1/2, 1/4, 1/8, …⟩` on one ω cell.
pub fn geometric_gap() -> (World, World) {
    let pop = Population::of(&[("X", Cardinal::Omega)]).unwrap();
    let first = Tail::mixed(Rational::zero(), vec![], BTreeMap::from([(1, int(1))])).unwrap();
    (
        World::new(pop.clone(), vec![CellValue::Tail(first)]).unwrap(),
        World::new(pop, vec![CellValue::Tail(Tail::geometric(int(1), Rational::new(1, 2)).unwrap())]).unwrap(),
    )
}

/// `a = 2/−2`, `b = 1/−2`, `c = 0` on `A`/rest, with the transfers turning `a` into `c`.
pub fn transfer_fact() -> (World, World, World, Vec<RestrictedTransfer>) {
    let pop = two_cells();
    (
        World::from_levels(pop.clone(), vec![int(2), int(-2)]).unwrap(),
        World::from_levels(pop.clone(), vec![int(1), int(-2)]).unwrap(),
        World::constant(pop, Rational::zero()),
        vec![RestrictedTransfer::new("A", "rest", int(2), Cardinal::Omega)],
    )
}

/// `⟨1, 0, 1, 0, …⟩` against `⟨0, 0, 0, 1, 0, 1, …⟩`.
pub fn stream_witness() -> (PeriodicStream, PeriodicStream) {
    (PeriodicStream::ints(&[], &[1, 0]), PeriodicStream::ints(&[0, 0], &[0, 1]))
}
