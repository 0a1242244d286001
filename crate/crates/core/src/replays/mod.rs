//! Named, data-driven replays of the concrete constructions. Each replay is a
//! scenario plus a list of assertions, stored as JSON under `replays/data`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::axioms::{check_axiom, check_completeness_impossible, check_lv_fact, AxiomId, CheckReport};
use crate::criteria::{compare, weakly_above, Criterion, Verdict};
use crate::error::{Error, Result};
use crate::exactnum::Cardinal;
use crate::ordered::{cu_compare, forget_order, forget_order_pair, ot_compare, PeriodicStream};
use crate::refuter::{check_certificate, refute_directed, Direction, ProofCase};
use crate::scenario::Scenario;
use crate::worlds::{apply_restricted_transfers, Rearrangement, RestrictedTransfer, World};

const REGISTRY: &[(&str, &str)] = &[
    ("prop1-incompleteness", include_str!("data/prop1-incompleteness.json")),
    ("anonymity-injection", include_str!("data/anonymity-injection.json")),
    ("sum-coincidence", include_str!("data/sum-coincidence.json")),
    ("vallentyne-gap", include_str!("data/vallentyne-gap.json")),
    ("spd-extension", include_str!("data/spd-extension.json")),
    ("cdv-extension", include_str!("data/cdv-extension.json")),
    ("ot-invariance-violation", include_str!("data/ot-invariance-violation.json")),
    ("lv-inconsistency", include_str!("data/lv-inconsistency.json")),
    ("transfer-legality", include_str!("data/transfer-legality.json")),
    ("maximality-certificates", include_str!("data/maximality-certificates.json")),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferOutcome {
    /// The transfers apply and produce the named world.
    Legal(String),
    Illegal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialCheck {
    CompletenessImpossible,
    LvFact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assertion {
    Compare {
        criterion: Criterion,
        w: String,
        v: String,
        #[serde(default)]
        correspondence: Option<String>,
        expect: Verdict,
    },
    Weak {
        criterion: Criterion,
        w: String,
        v: String,
        expect: bool,
    },
    /// The criteria return one verdict on the pair.
    Agree {
        criteria: Vec<Criterion>,
        w: String,
        v: String,
    },
    Streams {
        criterion: Criterion,
        w: String,
        v: String,
        expect: Verdict,
    },
    /// Both streams have the same unordered image.
    UnorderedEqual {
        w: String,
        v: String,
        expect: bool,
    },
    /// Compare the streams after forgetting their order, position by position.
    UnorderedCompare {
        criterion: Criterion,
        w: String,
        v: String,
        expect: Verdict,
    },
    /// Apply a rearrangement given by `(from, to, count)` entries; the image
    /// must equal `expect` when given and is stored under `bind` when given.
    Rearrange {
        world: String,
        flow: Vec<(String, String, Cardinal)>,
        #[serde(default)]
        expect: Option<String>,
        #[serde(default)]
        bind: Option<String>,
    },
    Transfer {
        world: String,
        transfers: Vec<RestrictedTransfer>,
        expect: TransferOutcome,
    },
    Axiom {
        criterion: Criterion,
        axiom: AxiomId,
        trials: u64,
        seed: u64,
        expect_pass: bool,
    },
    Special {
        name: SpecialCheck,
        trials: u64,
        seed: u64,
    },
    /// Build, check and classify a refutation certificate.
    Refute {
        w: String,
        v: String,
        direction: Direction,
        case: ProofCase,
    },
}

impl Assertion {
    pub fn label(&self) -> String {
        match self {
            Assertion::Compare { criterion, w, v, .. } => format!("{} {w} vs {v}", criterion.name()),
            Assertion::Weak { criterion, w, v, .. } => format!("{} {w} ≽ {v}", criterion.name()),
            Assertion::Agree { criteria, w, v } => {
                let names: Vec<_> = criteria.iter().map(|c| c.name()).collect();
                format!("{} agree on {w} vs {v}", names.join("/"))
            }
            Assertion::Streams { criterion, w, v, .. } => format!("{} {w} vs {v}", criterion.name()),
            Assertion::UnorderedEqual { w, v, .. } => format!("unordered {w} = {v}"),
            Assertion::UnorderedCompare { criterion, w, v, .. } => {
                format!("{} on unordered {w} vs {v}", criterion.name())
            }
            Assertion::Rearrange { world, .. } => format!("rearrange {world}"),
            Assertion::Transfer { world, .. } => format!("transfer from {world}"),
            Assertion::Axiom { criterion, axiom, .. } => format!("{} {}", criterion.name(), axiom.name()),
            Assertion::Special { name, .. } => format!("{name:?}"),
            Assertion::Refute { w, v, direction, case } => format!("refute {w} vs {v} ({direction:?}, {case})"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Replay {
    pub name: String,
    /// Which construction this replays.
    pub origin: String,
    pub scenario: serde_json::Value,
    pub assertions: Vec<Assertion>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssertionOutcome {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub name: String,
    pub origin: String,
    pub outcomes: Vec<AssertionOutcome>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

pub fn names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|(n, _)| *n)
}

pub fn load(name: &str) -> Result<Replay> {
    let (_, text) =
        REGISTRY.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownReplay(name.to_string()))?;
    let replay: Replay =
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("replay {name} is malformed: {e}")))?;
    Ok(replay)
}

struct Env {
    worlds: BTreeMap<String, World>,
    streams: BTreeMap<String, PeriodicStream>,
    scenario: Scenario,
}

impl Env {
    fn world(&self, name: &str) -> Result<&World> {
        self.worlds.get(name).ok_or_else(|| Error::Domain(format!("no world named {name:?}")))
    }

    fn stream(&self, name: &str) -> Result<&PeriodicStream> {
        self.streams.get(name).ok_or_else(|| Error::Domain(format!("no stream named {name:?}")))
    }

    fn pair(&self, w: &str, v: &str, correspondence: Option<&str>) -> Result<(World, World)> {
        let corr = correspondence.map(|c| self.scenario.correspondence(c)).transpose()?;
        Ok(crate::worlds::align(self.world(w)?, self.world(v)?, corr)?)
    }
}

fn expect<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> (bool, String) {
    let ok = got == want;
    (ok, if ok { format!("{got:?}") } else { format!("expected {want:?}, got {got:?}") })
}

fn summary(report: &CheckReport) -> String {
    match report.failures.first() {
        Some(f) => format!(
            "{} failure(s); trial {}: expected {}, got {}",
            report.failures.len(),
            f.trial,
            f.expected,
            f.got
        ),
        None => format!("{} trials passed", report.trials),
    }
}

fn run_one(env: &mut Env, a: &Assertion) -> Result<(bool, String)> {
    Ok(match a {
        Assertion::Compare { criterion, w, v, correspondence, expect: want } => {
            let (w, v) = env.pair(w, v, correspondence.as_deref())?;
            expect(compare(*criterion, &w, &v)?, *want)
        }
        Assertion::Weak { criterion, w, v, expect: want } => {
            let (w, v) = env.pair(w, v, None)?;
            expect(weakly_above(*criterion, &w, &v)?, *want)
        }
        Assertion::Agree { criteria, w, v } => {
            let (w, v) = env.pair(w, v, None)?;
            let verdicts = criteria.iter().map(|c| compare(*c, &w, &v)).collect::<Result<Vec<_>>>()?;
            let ok = verdicts.windows(2).all(|p| p[0] == p[1]);
            (ok, format!("{verdicts:?}"))
        }
        Assertion::Streams { criterion, w, v, expect: want } => {
            let (w, v) = (env.stream(w)?, env.stream(v)?);
            let got = match criterion {
                Criterion::CatchingUp => cu_compare(w, v),
                Criterion::Overtaking => ot_compare(w, v),
                other => return Err(Error::Domain(format!("{} does not compare streams", other.name()))),
            };
            expect(got, *want)
        }
        Assertion::UnorderedEqual { w, v, expect: want } => {
            expect(forget_order(env.stream(w)?) == forget_order(env.stream(v)?), *want)
        }
        Assertion::UnorderedCompare { criterion, w, v, expect: want } => {
            let (w, v) = forget_order_pair(env.stream(w)?, env.stream(v)?);
            expect(compare(*criterion, &w, &v)?, *want)
        }
        Assertion::Rearrange { world, flow, expect: want, bind } => {
            let w = env.world(world)?.clone();
            let entries: Vec<(&str, &str, Cardinal)> =
                flow.iter().map(|(a, b, n)| (a.as_str(), b.as_str(), *n)).collect();
            let image = Rearrangement::from_entries(w.population(), w.population(), &entries)?.apply(&w)?;
            let out = match want {
                Some(name) => expect(&image, env.world(name)?),
                None => (true, image.to_string()),
            };
            if let Some(b) = bind {
                env.worlds.insert(b.clone(), image);
            }
            out
        }
        Assertion::Transfer { world, transfers, expect: want } => {
            match (apply_restricted_transfers(env.world(world)?, transfers), want) {
                (Ok(got), TransferOutcome::Legal(name)) => expect(&got, env.world(name)?),
                (Ok(got), TransferOutcome::Illegal) => (false, format!("expected an illegal transfer, got {got}")),
                (Err(e), TransferOutcome::Legal(_)) => (false, format!("expected a legal transfer: {e}")),
                (Err(e), TransferOutcome::Illegal) => (true, e.to_string()),
            }
        }
        Assertion::Axiom { criterion, axiom, trials, seed, expect_pass } => {
            let report = check_axiom(*criterion, *axiom, *trials, *seed)?;
            let (ok, _) = expect(report.passed(), *expect_pass);
            (ok, summary(&report))
        }
        Assertion::Special { name, trials, seed } => {
            let report = match name {
                SpecialCheck::CompletenessImpossible => check_completeness_impossible(*trials, *seed)?,
                SpecialCheck::LvFact => check_lv_fact(*trials, *seed)?,
            };
            (report.passed(), summary(&report))
        }
        Assertion::Refute { w, v, direction, case } => {
            let (w, v) = env.pair(w, v, None)?;
            let cert = refute_directed(&w, &v, *direction)?;
            if let Err(e) = check_certificate(&cert) {
                return Ok((false, format!("certificate rejected: {e}")));
            }
            if !cert.targets(&w, &v) {
                return Ok((false, "certificate targets another pair".into()));
            }
            let (ok, detail) = expect(cert.case, *case);
            (ok, format!("{detail}, {} steps", cert.steps.len()))
        }
    })
}

pub fn run(replay: &Replay) -> Result<ReplayReport> {
    let scenario = Scenario::parse(&replay.scenario.to_string())?;
    let mut env = Env { worlds: scenario.worlds.clone(), streams: scenario.streams.clone(), scenario };
    let outcomes = replay
        .assertions
        .iter()
        .map(|a| {
            let (passed, detail) = run_one(&mut env, a).unwrap_or_else(|e| (false, format!("error: {e}")));
            AssertionOutcome { label: a.label(), passed, detail }
        })
        .collect();
    Ok(ReplayReport { name: replay.name.clone(), origin: replay.origin.clone(), outcomes })
}

pub fn run_replay(name: &str) -> Result<ReplayReport> {
    run(&load(name)?)
}

pub fn run_all() -> Result<Vec<ReplayReport>> {
    names().map(run_replay).collect()
}
