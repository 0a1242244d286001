use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::world::{Cell, CellValue, Population, World};
use crate::error::WorldError;
use crate::exactnum::Cardinal;

/// One cell of a common refinement: the individuals lying in `w_cell` of the
/// first world's population and in `v_cell` of the second's.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedCell {
    pub id: String,
    pub size: Cardinal,
    pub w_cell: String,
    pub v_cell: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub cells: Vec<RefinedCell>,
}

/// Put two worlds on one population.
///
/// Worlds whose populations list the same cells are returned as they are (the
/// second reordered to match the first). Anything else needs a declared
/// correspondence; overlap is never guessed.
pub fn align(w: &World, v: &World, correspondence: Option<&Correspondence>) -> Result<(World, World), WorldError> {
    if w.population().same_cells(v.population()) {
        return Ok((w.clone(), v.reordered(w.population())?));
    }
    let corr = correspondence.ok_or_else(|| {
        WorldError::Alignment("populations differ and no correspondence was supplied".into())
    })?;
    let population = Population::new(corr.cells.iter().map(|c| Cell::new(c.id.clone(), c.size)).collect())?;
    let wv = refine(w, corr, |c| &c.w_cell, "first")?;
    let vv = refine(v, corr, |c| &c.v_cell, "second")?;
    Ok((World::new(population.clone(), wv)?, World::new(population, vv)?))
}

fn refine(
    world: &World,
    corr: &Correspondence,
    parent: impl Fn(&RefinedCell) -> &String,
    which: &str,
) -> Result<Vec<CellValue>, WorldError> {
    let pop = world.population();
    let mut parts: BTreeMap<&str, Vec<Cardinal>> = BTreeMap::new();
    let mut values = Vec::with_capacity(corr.cells.len());
    for rc in &corr.cells {
        let p = parent(rc);
        let i = pop
            .index_of(p)
            .ok_or_else(|| WorldError::Alignment(format!("{which} world has no cell {p:?}")))?;
        parts.entry(pop.id(i)).or_default().push(rc.size);
        values.push(world.value(i).clone());
    }
    for (i, cell) in pop.cells().iter().enumerate() {
        let sizes = parts.get(cell.id.as_str()).cloned().unwrap_or_default();
        let total: Cardinal = sizes.iter().copied().sum();
        if total != cell.size {
            return Err(WorldError::Alignment(format!(
                "parts of {which} world's cell {:?} sum to {total}, cell has {}",
                cell.id, cell.size
            )));
        }
        if matches!(world.value(i), CellValue::Tail(_)) && sizes.len() != 1 {
            return Err(WorldError::Alignment(format!(
                "tail cell {:?} cannot be split",
                cell.id
            )));
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{q, Finite, Omega};

    #[test]
    fn same_population_is_verbatim() {
        let p = Population::of(&[("A", Omega), ("B", Finite(1))]).unwrap();
        let w = World::from_levels(p.clone(), vec![q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(align(&w, &w, None).unwrap(), (w.clone(), w.clone()));
        let reversed = Population::of(&[("B", Finite(1)), ("A", Omega)]).unwrap();
        let v = World::from_levels(reversed, vec![q(5, 1), q(0, 1)]).unwrap();
        let (_, v2) = align(&w, &v, None).unwrap();
        assert_eq!(v2.levels().unwrap(), vec![q(0, 1), q(5, 1)]);
    }

    #[test]
    fn four_cell_refinement() {
        let pw = Population::of(&[("A", Omega), ("rest", Omega)]).unwrap();
        let pv = Population::of(&[("B", Omega), ("rest", Omega)]).unwrap();
        let w = World::from_levels(pw, vec![q(1, 1), q(0, 1)]).unwrap();
        let v = World::from_levels(pv, vec![q(1, 1), q(0, 1)]).unwrap();
        assert!(align(&w, &v, None).is_err());
        let cell = |id: &str, wc: &str, vc: &str| RefinedCell {
            id: id.into(),
            size: Omega,
            w_cell: wc.into(),
            v_cell: vc.into(),
        };
        let corr = Correspondence {
            cells: vec![
                cell("AB", "A", "B"),
                cell("A-B", "A", "rest"),
                cell("B-A", "rest", "B"),
                cell("rest", "rest", "rest"),
            ],
        };
        let (a, b) = align(&w, &v, Some(&corr)).unwrap();
        assert_eq!(a.population().len(), 4);
        assert_eq!(a.levels().unwrap(), vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(b.levels().unwrap(), vec![q(1, 1), q(0, 1), q(1, 1), q(0, 1)]);
        assert_eq!(a.census(), w.census());

        let mut bad = corr.clone();
        bad.cells[0].size = Finite(2);
        bad.cells[1].size = Finite(3);
        assert!(align(&w, &v, Some(&bad)).is_err());
    }
}
