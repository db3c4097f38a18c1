use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use normderiv_core::operator::{norm_attainment_set, op_limit_oracle, op_norm, rho_pm_operator};
use normderiv_core::orthogonality::{is_orthogonal, ray_scan_2d, scan_samples};
use normderiv_core::smoothness::{classify, AdditivityConfig};
use normderiv_core::tolerance;
use normderiv_core::{rho_limit_oracle, rho_pair, OperatorMatrix, Schedule, Side, SpaceDescriptor};
use normderiv_lab::{parse, replay_failure, run_suite, LabError};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "normderiv-lab",
    version,
    about = "Norm derivatives, orthogonality and smoothness on finite-dimensional spaces"
)]
struct Cli {
    /// JSON output (the default; kept for scripts that pass it explicitly)
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-sided and mean derivatives of the norm at x in direction y
    Derive {
        #[command(flatten)]
        pair: PairArgs,
        /// Also evaluate the difference-quotient oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Decide an orthogonality relation between x and y
    Orthogonal {
        #[command(flatten)]
        pair: PairArgs,
        /// bj, rho, rho+ or rho-
        #[arg(long, default_value = "bj")]
        relation: String,
        #[arg(long, default_value_t = tolerance::ORTHOGONALITY)]
        tol: f64,
    },
    /// Scan the orthogonality set of a point of a two-dimensional space
    Rays {
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "rho")]
        relation: String,
        /// Angular step in degrees, in (0, 1]
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, default_value_t = tolerance::ORTHOGONALITY)]
        tol: f64,
        /// Print the sampled derivatives as CSV instead of the diagram
        #[arg(long)]
        csv: bool,
    },
    /// Classical, rho and rho± smoothness of a point
    Classify {
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, env = "NDL_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Operator norm of a matrix
    Opnorm {
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Norm attainment set of a matrix
    Attainment {
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Derivatives of the operator norm at T in direction A
    Opderive {
        #[command(flatten)]
        op: OperatorArgs,
        /// Direction A, row-major JSON
        #[arg(long)]
        direction: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Run a verification suite and emit its report
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, env = "NDL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        /// Tolerance override, key=value (exact, oracle, additivity, orthogonality)
        #[arg(long = "tol")]
        tol: Vec<String>,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun one recorded failure of a report with a full trace
    Replay {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
}

#[derive(Args)]
struct PairArgs {
    /// l1:N, linf:N, euclidean:N, lp:N:P or a JSON descriptor
    #[arg(long)]
    space: String,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
}

#[derive(Args)]
struct OperatorArgs {
    /// Row-major JSON, e.g. [[1,0],[0,1]]
    #[arg(long)]
    matrix: String,
    /// Defaults to euclidean of the column count
    #[arg(long)]
    domain: Option<String>,
    /// Defaults to euclidean of the row count
    #[arg(long)]
    codomain: Option<String>,
}

impl OperatorArgs {
    fn build(&self, rows: &[Vec<f64>]) -> Result<OperatorMatrix, LabError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let domain = match &self.domain {
            Some(s) => parse::space(s)?,
            None => SpaceDescriptor::Euclidean(n),
        };
        let codomain = match &self.codomain {
            Some(s) => parse::space(s)?,
            None => SpaceDescriptor::Euclidean(m),
        };
        Ok(OperatorMatrix::from_rows(rows, domain, codomain)?)
    }

    fn operator(&self) -> Result<OperatorMatrix, LabError> {
        self.build(&parse::matrix(&self.matrix)?)
    }
}

fn print<T: Serialize>(value: &T) -> Result<(), LabError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Exit status: 0 clean, 1 a suite recorded failures.
fn run(cli: Cli) -> Result<u8, LabError> {
    match cli.command {
        Command::Derive { pair, oracle } => {
            let s = parse::space(&pair.space)?;
            let (x, y) = (parse::vector(&pair.x)?, parse::vector(&pair.y)?);
            let p = rho_pair(&s, &x, &y)?;
            let mut out = json!({"space": s, "x": x, "y": y, "rho_minus": p.minus, "rho_plus": p.plus, "rho": p.mean()});
            if oracle {
                let schedule = Schedule::default();
                out["oracle"] = json!({
                    "rho_plus": rho_limit_oracle(&s, &x, &y, Side::Plus, &schedule)?,
                    "rho_minus": rho_limit_oracle(&s, &x, &y, Side::Minus, &schedule)?,
                });
            }
            print(&out)?;
        }
        Command::Orthogonal {
            pair,
            relation,
            tol,
        } => {
            let s = parse::space(&pair.space)?;
            let (x, y) = (parse::vector(&pair.x)?, parse::vector(&pair.y)?);
            print(&is_orthogonal(
                &s,
                &x,
                &y,
                parse::relation(&relation)?,
                tol,
            )?)?;
        }
        Command::Rays {
            space,
            x,
            relation,
            step,
            tol,
            csv,
        } => {
            let s = parse::space(&space)?;
            let x = parse::vector(&x)?;
            if csv {
                let mut out = std::io::stdout().lock();
                writeln!(out, "angle_deg,rho_minus,rho_plus,rho")?;
                for r in scan_samples(&s, &x, step)? {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        r.angle_deg, r.rho_minus, r.rho_plus, r.rho
                    )?;
                }
            } else {
                print(&ray_scan_2d(
                    &s,
                    &x,
                    parse::relation(&relation)?,
                    step,
                    tol,
                )?)?;
            }
        }
        Command::Classify {
            space,
            x,
            trials,
            seed,
        } => {
            let cfg = AdditivityConfig {
                trials,
                seed,
                ..AdditivityConfig::default()
            };
            print(&classify(
                &parse::space(&space)?,
                &parse::vector(&x)?,
                &cfg,
            )?)?;
        }
        Command::Opnorm { op } => {
            let t = op.operator()?;
            print(&json!({"operator": t, "norm": op_norm(&t)?}))?;
        }
        Command::Attainment { op } => {
            print(&norm_attainment_set(&op.operator()?)?)?;
        }
        Command::Opderive {
            op,
            direction,
            oracle,
        } => {
            let t = op.operator()?;
            let a = op.build(&parse::matrix(&direction)?)?;
            let plus = rho_pm_operator(&t, &a, Side::Plus)?;
            let minus = rho_pm_operator(&t, &a, Side::Minus)?;
            let mut out = json!({
                "rho_minus": minus.value,
                "rho_plus": plus.value,
                "rho": 0.5 * (plus.value + minus.value),
            });
            if oracle {
                let schedule = Schedule::default();
                out["oracle"] = json!({
                    "rho_plus": op_limit_oracle(&t, &a, Side::Plus, &schedule)?,
                    "rho_minus": op_limit_oracle(&t, &a, Side::Minus, &schedule)?,
                });
            }
            print(&out)?;
        }
        Command::Verify {
            suite,
            seed,
            trials,
            tol,
            out,
        } => {
            let overrides = tol
                .iter()
                .map(|t| parse::tolerance(t))
                .collect::<Result<BTreeMap<_, _>, _>>()?;
            let report = run_suite(&suite, seed, trials, &overrides)?;
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            print(&report)?;
            eprintln!(
                "{}: {} checks, {} failures, {:.2}s",
                report.suite_name, report.cases_run, report.failure_count, report.elapsed_seconds
            );
            return Ok(u8::from(!report.passed()));
        }
        Command::Replay { report, index } => {
            print(&replay_failure(&report, index)?)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.json;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
