//! Acceptance gate: one line per criterion, each run at its stated size and tolerance.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are still run in full and reported
//! as FAIL; the process exits non-zero only when some other criterion fails or
//! when a listed one unexpectedly passes.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use swr_core::axioms::{check_axiom, AxiomId};
use swr_core::criteria::{compare, weakly_above, Criterion, Verdict};
use swr_core::density::{run_density, DensityConfig, PairGenerator};
use swr_core::gen::{self, trial_rng, Domain};
use swr_core::oracle::{cu_by_partial_sums, fsp_weak_truncated, ot_by_partial_sums, spd_weak_enumerated};
use swr_core::ordered::{cu_compare, ot_compare};
use swr_core::refuter::{check_certificate, mutate, refute_finite_valued, refute_two_valued, ProofCase};
use swr_core::replays;
use swr_core::exactnum::{q, Omega};
use swr_core::worlds::{Population, World};

/// Transitivity of the sum-plus-differences relation fails on {0,1,2}-valued worlds.
const KNOWN_UNATTAINABLE: &[u32] = &[3];

struct Verdicts {
    ok: bool,
    summary: String,
    problems: Vec<String>,
}

impl Verdicts {
    fn new() -> Verdicts {
        Verdicts { ok: true, summary: String::new(), problems: Vec::new() }
    }

    fn require(&mut self, cond: bool, problem: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.problems.push(problem.into());
        }
    }
}

fn within(v: &mut Verdicts, elapsed: Duration, limit: Duration) {
    v.require(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"));
}

fn replay_suite() -> Verdicts {
    let mut v = Verdicts::new();
    let start = Instant::now();
    let reports = replays::run_all().expect("registry loads");
    let elapsed = start.elapsed();
    for r in &reports {
        for o in r.outcomes.iter().filter(|o| !o.passed) {
            v.require(false, format!("{}: {}: {}", r.name, o.label, o.detail));
        }
    }
    let assertions: usize = reports.iter().map(|r| r.outcomes.len()).sum();
    within(&mut v, elapsed, Duration::from_secs(5));
    v.summary = format!("{} replays, {assertions} assertions in {elapsed:.2?}", reports.len());
    v
}

fn disagreements(seed: u64, n: u64, domain: Domain, criteria: &[Criterion]) -> Vec<String> {
    (0..n)
        .into_par_iter()
        .filter_map(|t| {
            let (w, x) = gen::pair(&mut trial_rng(seed, t), domain);
            let verdicts: Vec<Verdict> = criteria.iter().map(|&c| compare(c, &w, &x).unwrap()).collect();
            (verdicts.windows(2).any(|p| p[0] != p[1])).then(|| format!("trial {t}: {w} vs {x}: {verdicts:?}"))
        })
        .collect()
}

fn coincidence() -> Verdicts {
    let mut v = Verdicts::new();
    let n = 10_000;
    let finite = disagreements(2, n, Domain::FiniteValued, &[Criterion::SumPreorder, Criterion::FiniteSumPreorder]);
    let indicator = disagreements(
        3,
        n,
        Domain::Indicator,
        &[Criterion::CountingPreorder, Criterion::SumPreorder, Criterion::FiniteSumPreorder],
    );
    for d in finite.iter().chain(&indicator).take(3) {
        v.require(false, d.clone());
    }
    v.require(finite.is_empty() && indicator.is_empty(), "mismatches found");
    v.summary = format!(
        "sp/fsp on {n} finite-valued pairs: {} mismatches; cp/sp/fsp on {n} {{0,1}} pairs: {} mismatches",
        finite.len(),
        indicator.len()
    );
    v
}

fn axiom_suite() -> Verdicts {
    let mut v = Verdicts::new();
    let start = Instant::now();
    let trials = 1000;
    let preorders = [
        Criterion::SumPreorder,
        Criterion::FiniteSumPreorder,
        Criterion::CountingPreorder,
        Criterion::SumPlusDifferences,
        Criterion::ConvergentDivergences,
    ];
    let mut jobs: Vec<(Criterion, AxiomId)> = Vec::new();
    for c in preorders {
        for a in [AxiomId::Reflexivity, AxiomId::Transitivity, AxiomId::StrongPareto, AxiomId::PermutationInvariance] {
            jobs.push((c, a));
        }
    }
    for c in [Criterion::SumPreorder, Criterion::ConvergentDivergences] {
        jobs.push((c, AxiomId::QuasiIndependence));
        jobs.push((c, AxiomId::ConvexDominance));
    }
    let mut clean = 0;
    for (c, a) in &jobs {
        let r = check_axiom(*c, *a, trials, 17).unwrap();
        if r.passed() {
            clean += 1;
        } else {
            let f = &r.failures[0];
            v.require(
                false,
                format!(
                    "{c}/{a}: {} of {trials} trials fail; trial {}: expected {}, got {}; inputs {}",
                    r.failures.len(),
                    f.trial,
                    f.expected,
                    f.got,
                    f.inputs.join(" ; ")
                ),
            );
        }
    }
    let mut directed = 0;
    let mut witnesses = 0;
    for c in preorders {
        for a in [AxiomId::Anonymity, AxiomId::Completeness] {
            // The incompleteness witness binds transitive relations only; ⊵ ranks it.
            if a == AxiomId::Completeness && c == Criterion::SumPlusDifferences {
                continue;
            }
            witnesses += 1;
            let r = check_axiom(c, a, 1, 17).unwrap();
            let reproduced = r.failures.first().is_some_and(|f| f.trial == 0);
            v.require(reproduced, format!("{c}/{a}: directed witness did not fail"));
            directed += usize::from(reproduced);
        }
    }
    if let Some(detail) = spd_counterexample() {
        v.require(false, detail);
    }
    let elapsed = start.elapsed();
    within(&mut v, elapsed, Duration::from_secs(60));
    v.summary = format!(
        "{clean}/{} schema checks clean at {trials} trials; {directed}/{witnesses} directed failures reproduced; {elapsed:.2?}",
        jobs.len()
    );
    v
}

/// Three ω cells with levels in {0, 1, 2} on which ⊵ chains but does not compose.
fn spd_counterexample() -> Option<String> {
    let pop = Population::of(&[("A", Omega), ("B", Omega), ("C", Omega)]).unwrap();
    let world = |l: [i64; 3]| World::from_levels(pop.clone(), l.iter().map(|&x| q(x, 1)).collect()).unwrap();
    let (w, x, u) = (world([0, 1, 1]), world([1, 0, 1]), world([2, 0, 0]));
    let spd = |a: &World, b: &World| weakly_above(Criterion::SumPlusDifferences, a, b).unwrap();
    (spd(&w, &x) && spd(&x, &u) && !spd(&w, &u)).then(|| format!("minimal case: {w} ⊵ {x} ⊵ {u}, yet {w} ⋭ {u}"))
}

fn declined(w: &World, x: &World) -> bool {
    matches!(compare(Criterion::SumPreorder, w, x).unwrap(), Verdict::StrictlyWorse | Verdict::Incomparable)
}

#[derive(Default)]
struct CertTally {
    pairs: usize,
    cases: BTreeMap<ProofCase, usize>,
    errors: Vec<String>,
    mutants: usize,
    rejected: usize,
}

impl CertTally {
    fn merge(mut self, o: CertTally) -> CertTally {
        self.pairs += o.pairs;
        for (c, n) in o.cases {
            *self.cases.entry(c).or_default() += n;
        }
        self.errors.extend(o.errors);
        self.mutants += o.mutants;
        self.rejected += o.rejected;
        self
    }
}

const MUTANTS_PER_CERT: usize = 4;

fn certify(seed: u64, t: u64, domain: Domain) -> CertTally {
    let mut tally = CertTally::default();
    let mut rng = trial_rng(seed, t);
    let (w, x) = gen::pair(&mut rng, domain);
    if !declined(&w, &x) {
        return tally;
    }
    tally.pairs = 1;
    let cert = match domain {
        Domain::Indicator => refute_two_valued(&w, &x),
        _ => refute_finite_valued(&w, &x),
    };
    let checked = cert.map_err(|e| e.to_string()).and_then(|c| {
        check_certificate(&c).map_err(|e| e.to_string())?;
        if c.targets(&w, &x) {
            Ok(c)
        } else {
            Err("certificate targets another pair".into())
        }
    });
    match checked {
        Ok(c) => {
            tally.cases.insert(c.case, 1);
            tally.mutants = MUTANTS_PER_CERT;
            tally.rejected =
                (0..MUTANTS_PER_CERT).filter(|_| check_certificate(&mutate(&c, &mut rng)).is_err()).count();
        }
        Err(e) => tally.errors.push(format!("trial {t}: {w} vs {x}: {e}")),
    }
    tally
}

fn certify_until(seed: u64, want: usize, domain: Domain) -> CertTally {
    let mut total = CertTally::default();
    let mut next = 0u64;
    while total.pairs < want {
        let batch = (want - total.pairs) as u64 * 2;
        let more = (next..next + batch)
            .into_par_iter()
            .map(|t| certify(seed, t, domain))
            .reduce(CertTally::default, CertTally::merge);
        total = total.merge(more);
        next += batch;
    }
    total
}

fn maximality() -> Verdicts {
    let mut v = Verdicts::new();
    let finite = certify_until(4, 1000, Domain::FiniteValued);
    let indicator = certify_until(5, 200, Domain::Indicator);
    let (nf, ni) = (finite.pairs, indicator.pairs);
    let all = finite.merge(indicator);
    for e in all.errors.iter().take(5) {
        v.require(false, e.clone());
    }
    for case in [ProofCase::Case1, ProofCase::Case2a, ProofCase::Case2b, ProofCase::Case2c] {
        v.require(all.cases.contains_key(&case), format!("{case} never exercised"));
    }
    let rate = all.rejected as f64 / all.mutants as f64;
    v.require(rate >= 0.95, format!("mutation rejection {rate:.4} below 0.95"));
    let counts: Vec<String> = all.cases.iter().map(|(c, n)| format!("{c}: {n}")).collect();
    v.summary = format!(
        "{nf} finite-valued and {ni} {{0,1}} pairs, {} certificate errors ({}); {}/{} mutants rejected ({:.2}%)",
        all.errors.len(),
        counts.join(", "),
        all.rejected,
        all.mutants,
        100.0 * rate
    );
    v
}

fn oracles() -> Verdicts {
    let mut v = Verdicts::new();
    let n = 600u64;
    let spd: Vec<String> = (0..n)
        .into_par_iter()
        .filter_map(|t| {
            let (w, x) = gen::small_pair(&mut trial_rng(7, t));
            let found = [(&w, &x), (&x, &w)].into_iter().find_map(|(a, b)| {
                let fast = weakly_above(Criterion::SumPlusDifferences, a, b).unwrap();
                let slow = spd_weak_enumerated(a, b).unwrap();
                (fast != slow).then(|| format!("spd trial {t}: {a} vs {b}: {fast} vs enumeration {slow}"))
            });
            found
        })
        .collect();
    let fsp: Vec<String> = (0..n)
        .into_par_iter()
        .filter_map(|t| {
            let (w, x) = gen::fsp_pair(&mut trial_rng(8, t));
            let found = [(&w, &x), (&x, &w)].into_iter().find_map(|(a, b)| {
                let fast = weakly_above(Criterion::FiniteSumPreorder, a, b).unwrap();
                let slow = fsp_weak_truncated(a, b);
                (fast != slow).then(|| format!("fsp trial {t}: {a} vs {b}: {fast} vs truncation {slow}"))
            });
            found
        })
        .collect();
    let geometric = (0..n)
        .filter(|&t| {
            let (w, x) = gen::fsp_pair(&mut trial_rng(8, t));
            !(w.is_finite_valued() && x.is_finite_valued())
        })
        .count();
    let streams: Vec<String> = (0..n)
        .into_par_iter()
        .filter_map(|t| {
            let mut rng = trial_rng(9, t);
            let (w, x) = (gen::stream(&mut rng), gen::stream(&mut rng));
            let cu = (cu_compare(&w, &x), cu_by_partial_sums(&w, &x));
            let ot = (ot_compare(&w, &x), ot_by_partial_sums(&w, &x));
            (cu.0 != cu.1 || ot.0 != ot.1).then(|| format!("stream trial {t}: cu {cu:?}, ot {ot:?}"))
        })
        .collect();
    for d in spd.iter().chain(&fsp).chain(&streams).take(5) {
        v.require(false, d.clone());
    }
    v.summary = format!(
        "spd vs enumeration: {}/{n} mismatches; fsp vs truncation: {}/{n} ({geometric} with geometric tails); cu/ot vs partial sums: {}/{n}",
        spd.len(),
        fsp.len(),
        streams.len()
    );
    v
}

fn corrected_premises() -> Verdicts {
    let mut v = Verdicts::new();
    let trials = 500;
    let mut parts = Vec::new();
    for a in [
        AxiomId::WeakPareto,
        AxiomId::ZeroIndependence,
        AxiomId::SumAxiom,
        AxiomId::RestrictedTransfersCorrected,
    ] {
        let r = check_axiom(Criterion::SumPreorder, a, trials, 21).unwrap();
        v.require(r.passed(), format!("sp/{a}: {} failures", r.failures.len()));
        parts.push(format!("{a} {}", if r.passed() { "clean" } else { "FAILS" }));
    }
    let original = check_axiom(Criterion::SumPreorder, AxiomId::RestrictedTransfersOriginal, 1, 21).unwrap();
    let fact = original.failures.first().is_some_and(|f| f.trial == 0);
    v.require(fact, "the original transfer schema did not fail on the three-world witness");
    v.summary = format!("sp over {trials} trials: {}; original schema fails on the witness: {fact}", parts.join(", "));
    v
}

fn density() -> Verdicts {
    let mut v = Verdicts::new();
    let p = 0.3;
    let n = 10_000u64;
    let config = DensityConfig {
        criteria: vec![Criterion::SumPreorder],
        generator: PairGenerator::Mixed { p },
        samples: n,
        seed: 10,
        ..DensityConfig::default()
    };
    let row = &run_density(&config).unwrap()[0];
    let expected = config.generator.expected_sp_comparable().unwrap();
    let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
    let z = (row.frac_comparable - expected) / sigma;
    v.require(z.abs() <= 3.0, format!("measured {} vs {expected}: {z:.2} σ", row.frac_comparable));
    v.summary = format!("mixed(p={p}), n={n}: comparable {:.4} vs {expected:.4} ({z:+.2} σ)", row.frac_comparable);
    v
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Verdicts); 7] = [
        (1, "replay suite", replay_suite),
        (2, "sp/fsp/cp coincidence", coincidence),
        (3, "axiom suite", axiom_suite),
        (4, "maximality certificates", maximality),
        (5, "decision-procedure oracles", oracles),
        (6, "corrected transfer premises", corrected_premises),
        (7, "density sanity", density),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let v = run();
        let status = if v.ok { "PASS" } else { "FAIL" };
        println!("[{status}] {id}. {name}: {} ({:.1?})", v.summary, start.elapsed());
        for p in &v.problems {
            println!("       {p}");
        }
        let known = KNOWN_UNATTAINABLE.contains(&id);
        if v.ok == known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: every criterion behaves as recorded (known unattainable: {KNOWN_UNATTAINABLE:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: criteria {unexpected:?} differ from the recorded outcome");
        ExitCode::FAILURE
    }
}
