use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use swr_core::axioms::{check_all, check_axiom, check_completeness_impossible, check_lv_fact, AxiomId, CheckReport};
use swr_core::criteria::{compare, sum_of_differences, Criterion};
use swr_core::density::{run_density, DensityConfig, Grid, PairGenerator};
use swr_core::ordered::{cu_compare, ot_compare};
use swr_core::refuter::{check_certificate, refute_directed, Direction, RefutationCertificate};
use swr_core::replays;
use swr_core::scenario::Scenario;
use swr_core::Error;

#[derive(Parser)]
#[command(name = "swr", version, about = "Compare worlds over infinite populations, check axioms, and build refutation certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two worlds (or streams, for cu and ot) from a scenario file.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Two names separated by a comma.
        #[arg(long)]
        pair: String,
        #[arg(long, default_value = "sp")]
        criterion: Criterion,
        /// Correspondence used to align worlds over different populations.
        #[arg(long)]
        correspondence: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run the randomized axiom checks.
    Axioms {
        #[arg(long, default_value = "sp")]
        criterion: Criterion,
        /// An axiom name, `all`, or one of the special checks `completeness-impossible` and `lv-fact`.
        #[arg(long, default_value = "all")]
        axiom: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, env = "SWR_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Build a refutation certificate for a comparison the sum preorder declines.
    Refute {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        pair: String,
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
        /// Write the certificate here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify { certificate: PathBuf },
    /// Run the replay corpus.
    Replay {
        #[arg(long, conflicts_with = "name", required_unless_present = "name")]
        all: bool,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Estimate how often each criterion ranks a random pair.
    Density {
        #[arg(long, value_enum, default_value = "uniform")]
        generator: GeneratorArg,
        /// Mixture probability for `--generator mixed`.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "pareto,sp,fsp,spd,cdv")]
        criteria: Vec<Criterion>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, env = "SWR_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_cells: usize,
        #[arg(long, default_value_t = 5)]
        max_cells: usize,
        #[arg(long, default_value_t = 2)]
        grid_max: i64,
        #[arg(long, default_value_t = 2)]
        grid_denom: i64,
        #[arg(long, default_value_t = 0.5)]
        omega_prob: f64,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Uniform,
    FiniteDifference,
    BothSignOmega,
    Mixed,
}

/// A run that completed but whose checks did not all pass.
struct Failed;

type Outcome = anyhow::Result<Result<(), Failed>>;

fn split_pair(pair: &str) -> anyhow::Result<(&str, &str)> {
    match pair.split_once(',') {
        Some((w, v)) if !w.is_empty() && !v.is_empty() => Ok((w.trim(), v.trim())),
        _ => bail!("--pair expects two names separated by a comma, got {pair:?}"),
    }
}

fn load_scenario(path: &PathBuf) -> anyhow::Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scenario::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn passed(ok: bool) -> Result<(), Failed> {
    if ok {
        Ok(())
    } else {
        Err(Failed)
    }
}

fn cmd_compare(scenario: &PathBuf, pair: &str, criterion: Criterion, corr: Option<&str>, as_json: bool) -> Outcome {
    let s = load_scenario(scenario)?;
    let (wn, vn) = split_pair(pair)?;
    let (verdict, sum) = if criterion.is_ordered() {
        let (w, v) = (s.stream(wn)?, s.stream(vn)?);
        let verdict = if criterion == Criterion::CatchingUp { cu_compare(w, v) } else { ot_compare(w, v) };
        (verdict, None)
    } else {
        let (w, v) = s.pair(wn, vn, corr)?;
        let sum = (criterion == Criterion::SumPreorder).then(|| sum_of_differences(&w, &v)).transpose()?;
        (compare(criterion, &w, &v)?, sum)
    };
    if as_json {
        let doc = json!({"criterion": criterion, "w": wn, "v": vn, "verdict": verdict, "sum_of_differences": sum});
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{criterion}: {wn} vs {vn}: {verdict}");
        if let Some(sum) = sum {
            println!("sum of differences: {sum}");
        }
    }
    Ok(Ok(()))
}

fn cmd_axioms(criterion: Criterion, axiom: &str, trials: u64, seed: u64, as_json: bool) -> Outcome {
    let reports: Vec<CheckReport> = match axiom {
        "all" => check_all(criterion, trials, seed)?,
        "completeness-impossible" => vec![check_completeness_impossible(trials, seed)?],
        "lv-fact" => vec![check_lv_fact(trials, seed)?],
        name => vec![check_axiom(criterion, name.parse::<AxiomId>()?, trials, seed)?],
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for r in &reports {
            println!("{r}");
        }
    }
    Ok(passed(reports.iter().all(CheckReport::passed)))
}

fn cmd_refute(scenario: &PathBuf, pair: &str, direction: DirectionArg, out: Option<&PathBuf>) -> Outcome {
    let s = load_scenario(scenario)?;
    let (wn, vn) = split_pair(pair)?;
    let (w, v) = s.pair(wn, vn, None)?;
    let direction = match direction {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    };
    let cert = match refute_directed(&w, &v, direction) {
        Ok(cert) => cert,
        Err(e @ Error::NotRefutable(_)) => {
            eprintln!("{e}");
            return Ok(Err(Failed));
        }
        Err(e) => return Err(e.into()),
    };
    match out {
        Some(path) => {
            fs::write(path, cert.to_json()).with_context(|| format!("writing {}", path.display()))?;
            println!("{} certificate with {} steps written to {}", cert.case, cert.steps.len(), path.display());
        }
        None => println!("{}", cert.to_json()),
    }
    Ok(Ok(()))
}

fn cmd_verify(path: &PathBuf) -> Outcome {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cert = RefutationCertificate::from_json(&text)?;
    match check_certificate(&cert) {
        Ok(()) => {
            let axioms: Vec<_> = cert.used_axioms.iter().map(|a| a.name()).collect();
            println!("valid: {} ({} steps; uses {})", cert.case, cert.steps.len(), axioms.join(", "));
            Ok(Ok(()))
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(Err(Failed))
        }
    }
}

fn cmd_replay(name: Option<&str>, as_json: bool) -> Outcome {
    let reports = match name {
        Some(n) => vec![replays::run_replay(n)?],
        None => replays::run_all()?,
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for r in &reports {
            println!("{} {} ({})", if r.passed() { "pass" } else { "FAIL" }, r.name, r.origin);
            for o in r.outcomes.iter().filter(|o| !o.passed) {
                println!("  {}: {}", o.label, o.detail);
            }
        }
    }
    Ok(passed(reports.iter().all(|r| r.passed())))
}

fn cmd_density(config: DensityConfig, csv_out: bool) -> Outcome {
    let rows = run_density(&config)?;
    if csv_out {
        let mut w = csv::Writer::from_writer(std::io::stdout());
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    } else {
        println!(
            "generator {} | cells {}..={} | grid ±{} step 1/{} | ω probability {} | {} samples | seed {}",
            config.generator.label(),
            config.min_cells,
            config.max_cells,
            config.grid.max_abs,
            config.grid.denom,
            config.omega_prob,
            config.samples,
            config.seed
        );
        println!("{:<8} {:>11} {:>9} {:>11}", "criterion", "comparable", "strict", "equivalent");
        for r in &rows {
            println!("{:<8} {:>11.4} {:>9.4} {:>11.4}", r.criterion, r.frac_comparable, r.frac_strict, r.frac_equivalent);
        }
    }
    Ok(Ok(()))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compare { scenario, pair, criterion, correspondence, json } => {
            cmd_compare(&scenario, &pair, criterion, correspondence.as_deref(), json)
        }
        Command::Axioms { criterion, axiom, trials, seed, json } => cmd_axioms(criterion, &axiom, trials, seed, json),
        Command::Refute { scenario, pair, direction, out } => cmd_refute(&scenario, &pair, direction, out.as_ref()),
        Command::Verify { certificate } => cmd_verify(&certificate),
        Command::Replay { name, json, .. } => cmd_replay(name.as_deref(), json),
        Command::Density {
            generator,
            p,
            criteria,
            samples,
            seed,
            min_cells,
            max_cells,
            grid_max,
            grid_denom,
            omega_prob,
            csv,
        } => {
            let generator = match generator {
                GeneratorArg::Uniform => PairGenerator::Uniform,
                GeneratorArg::FiniteDifference => PairGenerator::FiniteDifference,
                GeneratorArg::BothSignOmega => PairGenerator::BothSignOmega,
                GeneratorArg::Mixed => PairGenerator::Mixed { p },
            };
            let config = DensityConfig {
                criteria,
                generator,
                min_cells,
                max_cells,
                grid: Grid { max_abs: grid_max, denom: grid_denom },
                omega_prob,
                samples,
                seed,
            };
            cmd_density(config, csv)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
