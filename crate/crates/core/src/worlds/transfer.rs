use serde::{Deserialize, Serialize};

use super::world::{Cell, CellValue, Population, World};
use crate::error::WorldError;
use crate::exactnum::{Cardinal, Rational};

/// `paired_count` simultaneous one-to-one transfers of `amount` from
/// individuals of `donor` to individuals of `recipient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedTransfer {
    pub donor: String,
    pub recipient: String,
    pub amount: Rational,
    pub paired_count: Cardinal,
}

impl RestrictedTransfer {
    pub fn new(donor: &str, recipient: &str, amount: Rational, paired_count: Cardinal) -> Self {
        RestrictedTransfer { donor: donor.into(), recipient: recipient.into(), amount, paired_count }
    }
}

fn level(w: &World, i: usize) -> Result<Rational, WorldError> {
    match w.value(i) {
        CellValue::Level(v) => Ok(v.clone()),
        CellValue::Tail(_) => Err(WorldError::Transfer(format!(
            "cell {:?} carries a tail",
            w.population().id(i)
        ))),
    }
}

/// Split `k` individuals off cell `i`, giving them `value`.
fn carve(cells: &mut Vec<Cell>, values: &mut Vec<CellValue>, i: usize, k: Cardinal, value: Rational, tag: &str) {
    let size = cells[i].size;
    let rest = match (size, k) {
        (Cardinal::Omega, Cardinal::Finite(_)) => Some(Cardinal::Omega),
        (Cardinal::Finite(n), Cardinal::Finite(m)) if n > m => Some(Cardinal::Finite(n - m)),
        _ => None,
    };
    match rest {
        None => values[i] = CellValue::Level(value),
        Some(rest) => {
            cells[i].size = rest;
            cells.push(Cell::new(format!("{}{tag}", cells[i].id), k));
            values.push(CellValue::Level(value));
        }
    }
}

pub fn apply_restricted_transfers(w: &World, transfers: &[RestrictedTransfer]) -> Result<World, WorldError> {
    let mut current = w.clone();
    for (step, t) in transfers.iter().enumerate() {
        let pop = current.population();
        let find = |id: &str| {
            pop.index_of(id)
                .ok_or_else(|| WorldError::Transfer(format!("unknown cell {id:?}")))
        };
        let (d, r) = (find(&t.donor)?, find(&t.recipient)?);
        if d == r {
            return Err(WorldError::Transfer("donor and recipient must differ".into()));
        }
        if !t.amount.is_positive() {
            return Err(WorldError::Transfer(format!("amount {} must be positive", t.amount)));
        }
        let (dv, rv) = (level(&current, d)?, level(&current, r)?);
        if !dv.is_positive() || !rv.is_negative() {
            return Err(WorldError::Transfer(format!(
                "donor must be positive and recipient negative, got {dv} and {rv}"
            )));
        }
        let (dv2, rv2) = (&dv - &t.amount, &rv + &t.amount);
        if dv2.is_negative() || rv2.is_positive() {
            return Err(WorldError::Transfer(format!(
                "moving {} takes {dv} to {dv2} and {rv} to {rv2}",
                t.amount
            )));
        }
        let k = t.paired_count;
        if k.is_zero() || k > pop.size(d) || k > pop.size(r) {
            return Err(WorldError::Transfer(format!("cannot pair {k} individuals")));
        }
        let mut cells = pop.cells().to_vec();
        let mut values = current.values().to_vec();
        let fresh = |n: &usize| {
            let tag = format!("~t{n}");
            [d, r].iter().all(|&i| pop.index_of(&format!("{}{tag}", pop.id(i))).is_none())
        };
        let tag = format!("~t{}", (step + 1..).find(fresh).unwrap());
        carve(&mut cells, &mut values, d, k, dv2, &tag);
        carve(&mut cells, &mut values, r, k, rv2, &tag);
        current = World::new(Population::new(cells)?, values)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{q, Finite, Omega};

    fn pair_world(a: i64, b: i64) -> World {
        let p = Population::of(&[("a", Finite(1)), ("b", Finite(1)), ("rest", Omega)]).unwrap();
        World::from_levels(p, vec![q(a, 1), q(b, 1), q(0, 1)]).unwrap()
    }

    #[test]
    fn legal_and_illegal_moves() {
        let w = pair_world(-1, 3);
        let moved = apply_restricted_transfers(&w, &[RestrictedTransfer::new("b", "a", q(1, 1), Finite(1))]).unwrap();
        assert_eq!(moved, pair_world(0, 2));
        assert!(apply_restricted_transfers(&w, &[RestrictedTransfer::new("b", "a", q(2, 1), Finite(1))]).is_err());
        assert_eq!(apply_restricted_transfers(&w, &[]).unwrap(), w);
    }

    #[test]
    fn infinite_pairing_zeroes_out() {
        let p = Population::of(&[("A", Omega), ("rest", Omega)]).unwrap();
        let a = World::from_levels(p.clone(), vec![q(2, 1), q(-2, 1)]).unwrap();
        let c = apply_restricted_transfers(&a, &[RestrictedTransfer::new("A", "rest", q(2, 1), Omega)]).unwrap();
        assert_eq!(c, World::constant(p, Rational::zero()));
    }

    #[test]
    fn partial_pairing_splits_cells() {
        let p = Population::of(&[("A", Omega), ("N", Finite(3))]).unwrap();
        let u = World::from_levels(p, vec![q(3, 1), q(-1, 1)]).unwrap();
        let after = apply_restricted_transfers(&u, &[RestrictedTransfer::new("A", "N", q(1, 2), Finite(2))]).unwrap();
        let census = after.census().unwrap();
        assert_eq!(census[&q(3, 1)], Omega);
        assert_eq!(census[&q(5, 2)], Finite(2));
        assert_eq!(census[&q(-1, 2)], Finite(2));
        assert_eq!(census[&q(-1, 1)], Finite(1));
    }
}
