use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use divisorial::report::{metric_point, render_text, run, to_json};
use divisorial::scenario::{bundled, parse_scenario, Analysis, Scenario, BUNDLED};
use divisorial::symkernel::parse_scalar;
use divisorial::Error;

/// Divisors, Ricci-flat metrics and Kähler cones from bases of holomorphic
/// vector fields.
#[derive(Parser)]
#[command(name = "divisorial", version)]
struct Cli {
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every randomized probe (overrides the scenario's seed).
    #[arg(long, global = true, env = "DIVISORIAL_SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Target {
    /// Scenario file, or the name of a bundled scenario.
    scenario: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis the scenario requests.
    Analyze(Target),
    /// Divisor, its factors and the tangency of each field.
    Divisor(Target),
    /// Evaluate the metric at a point of the metric chart.
    Metric {
        #[command(flatten)]
        target: Target,
        /// Comma-separated coordinates, e.g. "1, 2 + i".
        #[arg(long)]
        at: String,
    },
    /// Lattice normal form and cone dimension.
    Cone(Target),
    /// Run selected numerical probes.
    Probe {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        complete: bool,
        #[arg(long)]
        ricci: bool,
        #[arg(long)]
        flow: bool,
    },
    /// List the bundled scenarios.
    Scenarios,
}

fn load(name: &str) -> Result<Scenario, Error> {
    let src = if Path::new(name).exists() {
        std::fs::read_to_string(name).map_err(|e| Error::Invalid(format!("{name}: {e}")))?
    } else if let Some(s) = bundled(name) {
        s.to_string()
    } else {
        return Err(Error::Invalid(format!(
            "no scenario file or bundled scenario named '{name}'"
        )));
    };
    parse_scenario(&src)
}

fn only(mut s: Scenario, wanted: &[Analysis]) -> Scenario {
    s.analyses = wanted.iter().copied().collect();
    s
}

fn execute(cli: &Cli) -> Result<String, Error> {
    let analyze = |s: Scenario| -> Result<String, Error> {
        let r = run(&s, cli.seed)?;
        Ok(if cli.json { to_json(&r) } else { render_text(&r) })
    };
    match &cli.command {
        Command::Scenarios => Ok(BUNDLED.iter().map(|(n, _)| format!("{n}\n")).collect()),
        Command::Analyze(t) => analyze(load(&t.scenario)?),
        Command::Divisor(t) => analyze(only(load(&t.scenario)?, &[Analysis::Divisor])),
        Command::Cone(t) => {
            let s = load(&t.scenario)?;
            if s.lattice.is_none() {
                return Err(Error::Invalid("the scenario declares no lattice".into()));
            }
            analyze(only(s, &[Analysis::Cone]))
        }
        Command::Probe {
            target,
            complete,
            ricci,
            flow,
        } => {
            let mut wanted = Vec::new();
            if *complete {
                wanted.push(Analysis::Completeness);
            }
            if *ricci {
                wanted.push(Analysis::Ricci);
            }
            if *flow {
                wanted.push(Analysis::Flow);
            }
            if wanted.is_empty() {
                return Err(Error::Invalid(
                    "choose at least one of --complete, --ricci, --flow".into(),
                ));
            }
            analyze(only(load(&target.scenario)?, &wanted))
        }
        Command::Metric { target, at } => {
            let s = load(&target.scenario)?;
            let point = at
                .split(',')
                .map(|c| parse_scalar(c.trim()).map(|z| z.to_complex()))
                .collect::<Result<Vec<_>, _>>()?;
            let r = metric_point(&s, &point)?;
            Ok(if cli.json {
                to_json(&r)
            } else {
                let mut o = format!("g at {at} on chart {}:\n", r.chart);
                for row in r.g.rows() {
                    let cells: Vec<String> = row.iter().map(|z| format!("{:.6} {:+.6}i", z.re, z.im)).collect();
                    o.push_str(&format!("  [{}]\n", cells.join(", ")));
                }
                o.push_str(&format!(
                    "det = {:.6e}, positive definite: {}\n",
                    r.det, r.positive_definite
                ));
                o
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::DegenerateBasis => 2,
                Error::Parse { .. } => 3,
                _ => 1,
            })
        }
    }
}
