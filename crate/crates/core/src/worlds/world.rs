use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tail::{Tail, TailDescriptor};
use crate::error::WorldError;
use crate::exactnum::{Cardinal, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub id: String,
    pub size: Cardinal,
}

impl Cell {
    pub fn new(id: impl Into<String>, size: Cardinal) -> Cell {
        Cell { id: id.into(), size }
    }
}

/// A finite partition of the countably infinite population into labelled cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Population {
    cells: Vec<Cell>,
}

impl Population {
    pub fn new(cells: Vec<Cell>) -> Result<Population, WorldError> {
        if !cells.iter().any(|c| c.size.is_infinite()) {
            return Err(WorldError::Population("at least one cell must have size omega".into()));
        }
        let mut seen = HashSet::new();
        for c in &cells {
            if c.size.is_zero() {
                return Err(WorldError::Population(format!("cell {:?} is empty", c.id)));
            }
            if !seen.insert(c.id.as_str()) {
                return Err(WorldError::Population(format!("duplicate cell id {:?}", c.id)));
            }
        }
        Ok(Population { cells })
    }

    /// Shorthand for tests and replays: `[("A", Omega), ("B", Finite(2))]`.
    pub fn of(cells: &[(&str, Cardinal)]) -> Result<Population, WorldError> {
        Population::new(cells.iter().map(|(id, size)| Cell::new(*id, *size)).collect())
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn size(&self, i: usize) -> Cardinal {
        self.cells[i].size
    }

    pub fn id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    /// Same cells, possibly listed in another order.
    pub fn same_cells(&self, other: &Population) -> bool {
        self.len() == other.len()
            && self
                .cells
                .iter()
                .all(|c| other.index_of(&c.id).is_some_and(|j| other.cells[j].size == c.size))
    }
}

impl<'de> Deserialize<'de> for Population {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let cells = Vec::<Cell>::deserialize(d)?;
        Population::new(cells).map_err(serde::de::Error::custom)
    }
}

/// What a world assigns to one cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellValue {
    Level(Rational),
    Tail(Tail),
}

impl CellValue {
    pub fn from_tail(t: Tail) -> CellValue {
        match t.as_constant() {
            Some(c) => CellValue::Level(c.clone()),
            None => CellValue::Tail(t),
        }
    }

    pub fn level(&self) -> Option<&Rational> {
        match self {
            CellValue::Level(v) => Some(v),
            CellValue::Tail(_) => None,
        }
    }

    pub fn as_tail(&self) -> Tail {
        match self {
            CellValue::Level(v) => Tail::constant(v.clone()),
            CellValue::Tail(t) => t.clone(),
        }
    }

    pub fn scale(&self, alpha: &Rational) -> CellValue {
        match self {
            CellValue::Level(v) => CellValue::Level(v * alpha),
            CellValue::Tail(t) => CellValue::from_tail(t.scale(alpha)),
        }
    }

    pub fn add(&self, other: &CellValue) -> Result<CellValue, WorldError> {
        match (self, other) {
            (CellValue::Level(a), CellValue::Level(b)) => Ok(CellValue::Level(a + b)),
            _ => Ok(CellValue::from_tail(self.as_tail().add(&other.as_tail())?)),
        }
    }

    pub fn sub(&self, other: &CellValue) -> Result<CellValue, WorldError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CellValue::Level(v) => serde_json::Value::String(v.to_string()),
            CellValue::Tail(t) => serde_json::to_value(t.to_descriptor()).expect("descriptor serializes"),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<CellValue, WorldError> {
        if v.is_string() || v.is_number() {
            let r: Rational = serde_json::from_value(v.clone())
                .map_err(|e| WorldError::World(format!("bad value {v}: {e}")))?;
            return Ok(CellValue::Level(r));
        }
        let d: TailDescriptor =
            serde_json::from_value(v.clone()).map_err(|e| WorldError::World(format!("bad descriptor {v}: {e}")))?;
        Ok(CellValue::from_tail(Tail::from_descriptor(&d)?))
    }
}

impl From<Rational> for CellValue {
    fn from(v: Rational) -> Self {
        CellValue::Level(v)
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Level(v) => write!(f, "{v}"),
            CellValue::Tail(_) => write!(f, "{}", self.to_json()),
        }
    }
}

/// An assignment of welfare levels to every individual, one value per cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct World {
    population: Population,
    values: Vec<CellValue>,
}

impl World {
    pub fn new(population: Population, values: Vec<CellValue>) -> Result<World, WorldError> {
        if values.len() != population.len() {
            return Err(WorldError::World(format!(
                "{} values for {} cells",
                values.len(),
                population.len()
            )));
        }
        let values: Vec<CellValue> = values
            .into_iter()
            .map(|v| match v {
                CellValue::Tail(t) => CellValue::from_tail(t),
                level => level,
            })
            .collect();
        for (cell, value) in population.cells().iter().zip(&values) {
            if matches!(value, CellValue::Tail(_)) && cell.size.is_finite() {
                return Err(WorldError::World(format!("tail on finite cell {:?}", cell.id)));
            }
        }
        Ok(World { population, values })
    }

    pub fn from_levels(population: Population, levels: Vec<Rational>) -> Result<World, WorldError> {
        World::new(population, levels.into_iter().map(CellValue::Level).collect())
    }

    pub fn constant(population: Population, level: Rational) -> World {
        let values = vec![CellValue::Level(level); population.len()];
        World { population, values }
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn values(&self) -> &[CellValue] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &CellValue {
        &self.values[i]
    }

    pub fn value_of(&self, id: &str) -> Option<&CellValue> {
        self.population.index_of(id).map(|i| &self.values[i])
    }

    /// Plain levels when every cell carries one.
    pub fn levels(&self) -> Option<Vec<Rational>> {
        self.values.iter().map(|v| v.level().cloned()).collect()
    }

    pub fn is_finite_valued(&self) -> bool {
        self.values.iter().all(|v| v.level().is_some())
    }

    /// Every value is 0 or 1.
    pub fn is_indicator(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.level().is_some_and(|x| x.is_zero() || *x == Rational::one()))
    }

    /// How many individuals sit at each level (finite-valued worlds only).
    pub fn census(&self) -> Option<BTreeMap<Rational, Cardinal>> {
        let mut out = BTreeMap::new();
        for (i, v) in self.values.iter().enumerate() {
            let level = v.level()?.clone();
            let slot = out.entry(level).or_insert(Cardinal::ZERO);
            *slot = *slot + self.population.size(i);
        }
        Some(out)
    }

    /// The same world with its cells listed in `order`'s order.
    pub fn reordered(&self, order: &Population) -> Result<World, WorldError> {
        if !self.population.same_cells(order) {
            return Err(WorldError::Alignment("populations have different cells".into()));
        }
        let values = order
            .cells()
            .iter()
            .map(|c| self.value_of(&c.id).unwrap().clone())
            .collect();
        Ok(World { population: order.clone(), values })
    }

    pub fn with_values(&self, values: Vec<CellValue>) -> Result<World, WorldError> {
        World::new(self.population.clone(), values)
    }

    pub fn scale(&self, alpha: &Rational) -> World {
        World {
            population: self.population.clone(),
            values: self.values.iter().map(|v| v.scale(alpha)).collect(),
        }
    }

    pub fn add(&self, other: &World) -> Result<World, WorldError> {
        self.require_same_population(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(World { population: self.population.clone(), values })
    }

    pub fn sub(&self, other: &World) -> Result<World, WorldError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub(crate) fn require_same_population(&self, other: &World) -> Result<(), WorldError> {
        if self.population != other.population {
            return Err(WorldError::Alignment(
                "worlds are not on one population; align them first".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (c, v) in self.population.cells().iter().zip(&self.values) {
            map.insert(c.id.clone(), v.to_json());
        }
        serde_json::Value::Object(map)
    }

    pub fn from_json(population: &Population, value: &serde_json::Value) -> Result<World, WorldError> {
        let obj = value
            .as_object()
            .ok_or_else(|| WorldError::World("world must be an object of cell values".into()))?;
        for key in obj.keys() {
            if population.index_of(key).is_none() {
                return Err(WorldError::World(format!("unknown cell {key:?}")));
            }
        }
        let values = population
            .cells()
            .iter()
            .map(|c| {
                obj.get(&c.id)
                    .ok_or_else(|| WorldError::World(format!("no value for cell {:?}", c.id)))
                    .and_then(CellValue::from_json)
            })
            .collect::<Result<_, _>>()?;
        World::new(population.clone(), values)
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (c, v)) in self.population.cells().iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}({}): {}", c.id, c.size, v)?;
        }
        f.write_str("}")
    }
}

/// Merge cells on which both worlds agree in value, dropping nothing else.
///
/// Returned worlds share a fresh population whose cell ids join the merged ids with `+`.
pub fn canonical_pair(w: &World, v: &World) -> Result<(World, World), WorldError> {
    w.require_same_population(v)?;
    let mut groups: Vec<(Vec<usize>, CellValue, CellValue)> = Vec::new();
    let mut index: BTreeMap<(CellValue, CellValue), usize> = BTreeMap::new();
    for i in 0..w.population.len() {
        let key = (w.values[i].clone(), v.values[i].clone());
        // Tails belong to one specific cell and never merge.
        let mergeable = matches!(key, (CellValue::Level(_), CellValue::Level(_)));
        match index.get(&key) {
            Some(&g) if mergeable => groups[g].0.push(i),
            _ => {
                if mergeable {
                    index.insert(key.clone(), groups.len());
                }
                groups.push((vec![i], key.0, key.1));
            }
        }
    }
    let cells = groups
        .iter()
        .map(|(members, _, _)| {
            let id = members.iter().map(|&i| w.population.id(i)).collect::<Vec<_>>().join("+");
            let size = members.iter().map(|&i| w.population.size(i)).sum();
            Cell::new(id, size)
        })
        .collect();
    let population = Population::new(cells)?;
    let wv = groups.iter().map(|g| g.1.clone()).collect();
    let vv = groups.iter().map(|g| g.2.clone()).collect();
    Ok((World::new(population.clone(), wv)?, World::new(population, vv)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{q, Finite, Omega};

    #[test]
    fn population_invariants() {
        assert!(Population::of(&[("A", Finite(3))]).is_err());
        assert!(Population::of(&[]).is_err());
        assert!(Population::of(&[("A", Omega), ("B", Finite(0))]).is_err());
        assert!(Population::of(&[("A", Omega), ("A", Finite(1))]).is_err());
        assert!(Population::of(&[("A", Omega), ("B", Finite(1))]).is_ok());
    }

    #[test]
    fn tails_only_on_omega_cells() {
        let p = Population::of(&[("A", Omega), ("B", Finite(1))]).unwrap();
        let t = CellValue::Tail(Tail::geometric(q(1, 1), q(1, 2)).unwrap());
        assert!(World::new(p.clone(), vec![CellValue::Level(q(0, 1)), t.clone()]).is_err());
        assert!(World::new(p, vec![t, CellValue::Level(q(0, 1))]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let p = Population::of(&[("A", Omega), ("B", Finite(2))]).unwrap();
        let w = World::new(
            p.clone(),
            vec![CellValue::Tail(Tail::harmonic(q(1, 1))), CellValue::Level(q(-3, 2))],
        )
        .unwrap();
        assert_eq!(World::from_json(&p, &w.to_json()).unwrap(), w);
    }

    #[test]
    fn canonical_pair_merges_matching_cells() {
        let p = Population::of(&[("A", Omega), ("B", Finite(2)), ("C", Finite(1))]).unwrap();
        let w = World::from_levels(p.clone(), vec![q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        let v = World::from_levels(p, vec![q(0, 1), q(1, 1), q(1, 1)]).unwrap();
        let (cw, cv) = canonical_pair(&w, &v).unwrap();
        assert_eq!(cw.population().len(), 2);
        assert_eq!(cw.population().cells()[1], Cell::new("B+C", Finite(3)));
        assert_eq!(cv.census(), v.census());
    }
}
