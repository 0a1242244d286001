//! Scenario files: named populations, worlds, streams and correspondences in one JSON document.
//!
//! ```json
//! {
//!   "population": [{"id": "A", "size": "omega"}, {"id": "B", "size": 2}],
//!   "worlds": {
//!     "w": {"A": "1", "B": {"const": "0"}},
//!     "u": {"population": "split", "values": {"A1": "1", "A2": "0"}}
//!   },
//!   "populations": {"split": [{"id": "A1", "size": "omega"}, {"id": "A2", "size": "omega"}]},
//!   "streams": {"s": {"prefix": ["1"], "period": ["0", "-1/2"]}},
//!   "correspondences": {"c": {"cells": [{"id": "x", "size": "omega", "w_cell": "A", "v_cell": "A1"}]}}
//! }
//! ```
//!
//! A world listed as a plain map is over the top-level population; the
//! `{"population", "values"}` form names one of `populations`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{ParseError, Result};
use crate::ordered::PeriodicStream;
use crate::worlds::{align, CellValue, Correspondence, Population, World};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub population: Option<Population>,
    pub populations: BTreeMap<String, Population>,
    pub worlds: BTreeMap<String, World>,
    pub streams: BTreeMap<String, PeriodicStream>,
    pub correspondences: BTreeMap<String, Correspondence>,
}

fn err(path: &str, msg: impl std::fmt::Display) -> ParseError {
    ParseError::Scenario(format!("{path}: {msg}"))
}

fn named<T: serde::de::DeserializeOwned>(doc: &Map<String, Value>, key: &str) -> Result<BTreeMap<String, T>> {
    let Some(v) = doc.get(key) else { return Ok(BTreeMap::new()) };
    let obj = v.as_object().ok_or_else(|| err(key, "expected an object"))?;
    obj.iter()
        .map(|(name, item)| {
            let parsed = serde_json::from_value(item.clone()).map_err(|e| err(&format!("{key}.{name}"), e))?;
            Ok((name.clone(), parsed))
        })
        .collect()
}

fn parse_world(path: &str, pop: &Population, values: &Map<String, Value>) -> Result<World> {
    for id in values.keys() {
        if pop.index_of(id).is_none() {
            return Err(err(path, format!("cell {id:?} is not in the population")).into());
        }
    }
    let vals = pop
        .cells()
        .iter()
        .map(|c| {
            let v = values.get(&c.id).ok_or_else(|| err(path, format!("no value for cell {:?}", c.id)))?;
            CellValue::from_json(v).map_err(|e| err(&format!("{path}.{}", c.id), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    World::new(pop.clone(), vals).map_err(|e| err(path, e).into())
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let doc: Value = serde_json::from_str(text).map_err(|e| ParseError::Scenario(e.to_string()))?;
        let doc = doc.as_object().ok_or_else(|| err("document", "expected an object"))?;
        for key in doc.keys() {
            if !["population", "populations", "worlds", "streams", "correspondences"].contains(&key.as_str()) {
                return Err(err(key, "unknown top-level key").into());
            }
        }
        let population: Option<Population> = match doc.get("population") {
            Some(p) => Some(serde_json::from_value(p.clone()).map_err(|e| err("population", e))?),
            None => None,
        };
        let populations: BTreeMap<String, Population> = named(doc, "populations")?;
        let mut worlds = BTreeMap::new();
        if let Some(ws) = doc.get("worlds") {
            let ws = ws.as_object().ok_or_else(|| err("worlds", "expected an object"))?;
            for (name, body) in ws {
                let path = format!("worlds.{name}");
                let body = body.as_object().ok_or_else(|| err(&path, "expected an object"))?;
                let explicit = body.len() == 2 && body.get("values").is_some_and(Value::is_object);
                let world = match (explicit, body.get("population")) {
                    (true, Some(Value::String(p))) => {
                        let pop = populations.get(p).ok_or_else(|| err(&path, format!("unknown population {p:?}")))?;
                        parse_world(&path, pop, body["values"].as_object().unwrap())?
                    }
                    _ => {
                        let pop = population.as_ref().ok_or_else(|| err(&path, "no top-level population"))?;
                        parse_world(&path, pop, body)?
                    }
                };
                worlds.insert(name.clone(), world);
            }
        }
        Ok(Scenario {
            population,
            populations,
            worlds,
            streams: named(doc, "streams")?,
            correspondences: named(doc, "correspondences")?,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut doc = Map::new();
        if let Some(p) = &self.population {
            doc.insert("population".into(), json!(p));
        }
        if !self.populations.is_empty() {
            doc.insert("populations".into(), json!(self.populations));
        }
        let worlds: Map<String, Value> = self
            .worlds
            .iter()
            .map(|(name, w)| {
                let values: Map<String, Value> =
                    w.population().cells().iter().zip(w.values()).map(|(c, v)| (c.id.clone(), v.to_json())).collect();
                let body = match self.populations.iter().find(|(_, p)| *p == w.population()) {
                    Some((pname, _)) if self.population.as_ref() != Some(w.population()) => {
                        json!({"population": pname, "values": values})
                    }
                    _ => Value::Object(values),
                };
                (name.clone(), body)
            })
            .collect();
        if !worlds.is_empty() {
            doc.insert("worlds".into(), Value::Object(worlds));
        }
        if !self.streams.is_empty() {
            doc.insert("streams".into(), json!(self.streams));
        }
        if !self.correspondences.is_empty() {
            doc.insert("correspondences".into(), json!(self.correspondences));
        }
        Value::Object(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("scenarios serialize")
    }

    pub fn world(&self, name: &str) -> Result<&World> {
        self.worlds.get(name).ok_or_else(|| err("worlds", format!("no world named {name:?}")).into())
    }

    pub fn stream(&self, name: &str) -> Result<&PeriodicStream> {
        self.streams.get(name).ok_or_else(|| err("streams", format!("no stream named {name:?}")).into())
    }

    pub fn correspondence(&self, name: &str) -> Result<&Correspondence> {
        self.correspondences
            .get(name)
            .ok_or_else(|| err("correspondences", format!("no correspondence named {name:?}")).into())
    }

    /// The named worlds on one population, through the named correspondence if given.
    pub fn pair(&self, w: &str, v: &str, correspondence: Option<&str>) -> Result<(World, World)> {
        let corr = correspondence.map(|c| self.correspondence(c)).transpose()?;
        Ok(align(self.world(w)?, self.world(v)?, corr)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{compare, Criterion, Verdict};

    const DOC: &str = r#"{
      "population": [{"id": "A", "size": "omega"}, {"id": "B", "size": 2}],
      "populations": {"split": [{"id": "A1", "size": "omega"}, {"id": "A2", "size": "omega"}, {"id": "B", "size": 2}]},
      "worlds": {
        "w": {"A": "1", "B": {"const": "0"}},
        "v": {"A": {"geometric": {"a": "1", "r": "1/2"}}, "B": "-1/3"},
        "u": {"population": "split", "values": {"A1": "1", "A2": "0", "B": "0"}}
      },
      "streams": {"s": {"prefix": ["1"], "period": ["0", "-1/2"]}},
      "correspondences": {"c": {"cells": [
        {"id": "x", "size": "omega", "w_cell": "A", "v_cell": "A1"},
        {"id": "y", "size": "omega", "w_cell": "A", "v_cell": "A2"},
        {"id": "z", "size": 2, "w_cell": "B", "v_cell": "B"}
      ]}}
    }"#;

    #[test]
    fn parses_every_section() {
        let s = Scenario::parse(DOC).unwrap();
        assert_eq!(s.worlds.len(), 3);
        assert_eq!(s.stream("s").unwrap().period().len(), 2);
        let (w, u) = s.pair("w", "u", Some("c")).unwrap();
        assert_eq!(compare(Criterion::SumPreorder, &w, &u).unwrap(), Verdict::StrictlyBetter);
        assert!(s.pair("w", "u", None).is_err());
    }

    #[test]
    fn serialization_is_canonical() {
        let s = Scenario::parse(DOC).unwrap();
        let once = s.to_json();
        let again = Scenario::parse(&once).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_json(), once);
    }

    #[test]
    fn diagnostics_name_the_place() {
        let e = Scenario::parse(r#"{"population": [{"id": "A", "size": "omega"}], "worlds": {"w": {"A": "x"}}}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("worlds.w.A"), "{e}");
        let e = Scenario::parse("{\n  \"population\": [\n  }").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = Scenario::parse(r#"{"population": [{"id": "A", "size": "omega"}], "worlds": {"w": {"Q": "1"}}}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("\"Q\""), "{e}");
    }
}
