use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gramq::coherence::OptimizerConfig;
use gramq::ensemble::{format_f64, gram, Canonical};
use gramq::quantifiers::Quantifier;
use gramq::verify::{ensemble_checks, run_all, Budget};
use gramq_cli::output::{emit, render, to_csv, Format};
use gramq_cli::sweep::{sweep, SweepSpec};
use gramq_cli::{check_params, crossings, resolve_ensemble, table1, CliError, CliResult, EXIT_OK, EXIT_VERIFY_FAILED};

/// Quantumness of pure-state ensembles from the α-z Rényi coherence of their Gram matrix.
#[derive(Parser)]
#[command(name = "gramq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for optimizer starts and random suites
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random optimizer starts (default 16; 32 for table1 and crossings)
    #[arg(long)]
    restarts: Option<usize>,
}

impl Common {
    fn config(&self, default_restarts: usize) -> OptimizerConfig {
        OptimizerConfig::default()
            .with_seed(self.seed)
            .with_restarts(self.restarts.unwrap_or(default_restarts))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate quantifiers for a canonical ensemble or an ensemble file
    Eval {
        /// Canonical name (b92, diag, trine, bb84, tetrad, six) or file path
        ensemble: String,
        /// Quantifier to evaluate; repeat for several, omit for all that apply
        #[arg(long = "quantifier", short)]
        quantifiers: Vec<Quantifier>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        /// B92 overlap
        #[arg(long)]
        x: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep α and emit one row per grid point (CSV by default)
    Sweep {
        /// Ensembles to sweep; defaults to the six canonical ones
        ensembles: Vec<String>,
        #[arg(long, default_value_t = 0.05)]
        start: f64,
        #[arg(long, default_value_t = 2.0)]
        end: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        /// Half-width of the window around α = 1 replaced by the limit row
        #[arg(long, default_value_t = 1e-3)]
        exclude_window: f64,
        /// Divide by the member count
        #[arg(long)]
        normalized: bool,
        /// B92 overlap
        #[arg(long)]
        x: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Comparison table for the six canonical ensembles
    Table1 {
        #[command(flatten)]
        common: Common,
    },
    /// Crossings of the z = 1 curves with each other and with comparison constants
    Crossings {
        /// Only report roots against the two-decimal table constants
        #[arg(long)]
        table_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the property suites; exits 1 on any failure
    Verify {
        /// Extra ensemble files to check
        files: Vec<PathBuf>,
        /// Smaller case counts, no grid oracle
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        common: Common,
    },
    /// List canonical ensembles with their Gram matrices
    Ensembles {
        #[command(flatten)]
        common: Common,
    },
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Eval {
            ensemble,
            quantifiers,
            alpha,
            z,
            x,
            common,
        } => {
            let target = resolve_ensemble(&ensemble, x)?;
            let params = match alpha {
                Some(a) => {
                    let (p, warning) = check_params(a, z)?;
                    if let Some(w) = warning {
                        eprintln!("{w}");
                    }
                    Some(p)
                }
                None => None,
            };
            let rows = gramq_cli::evaluate(&target, &quantifiers, params, &common.config(16))?;
            emit(&render(&rows, common.format.unwrap_or(Format::Json)), common.out.as_deref())?;
        }
        Command::Sweep {
            ensembles,
            start,
            end,
            step,
            z,
            exclude_window,
            normalized,
            x,
            common,
        } => {
            let names = if ensembles.is_empty() {
                Canonical::all().map(|c| c.name().to_string()).to_vec()
            } else {
                ensembles
            };
            let targets = names
                .iter()
                .map(|n| {
                    let x = if n.eq_ignore_ascii_case("b92") { x } else { None };
                    resolve_ensemble(n, x)
                })
                .collect::<CliResult<Vec<_>>>()?;
            let spec = SweepSpec {
                alpha_start: start,
                alpha_end: end,
                alpha_step: step,
                z,
                exclude_window,
            };
            let (records, warnings) = sweep(&targets, &spec, normalized, &common.config(16))?;
            for w in warnings {
                eprintln!("{w}");
            }
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => to_csv(&records),
                Format::Json => json(&records),
                Format::Text => {
                    let rows: Vec<_> = records
                        .into_iter()
                        .map(|record| gramq_cli::EvalRow {
                            validity: record.alpha.zip(record.z).map(|(a, z)| {
                                gramq::coherence::Validity::classify(a, z)
                            }),
                            record,
                        })
                        .collect();
                    render(&rows, Format::Text)
                }
            };
            emit(&text, common.out.as_deref())?;
        }
        Command::Table1 { common } => {
            let rows = table1::table1(&common.config(32))?;
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Text => table1::to_text(&rows),
                Format::Csv => table1::to_csv(&rows),
                Format::Json => json(&rows),
            };
            emit(&text, common.out.as_deref())?;
        }
        Command::Crossings { table_only, common } => {
            let rows = crossings::crossings(!table_only, &common.config(32))?;
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Text => crossings::to_text(&rows),
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut s = String::from("ensemble,lhs,rhs,rhs_value,source,alpha_root,residual\n");
                    for c in &rows {
                        let line = match c {
                            crossings::Crossing::Root {
                                ensemble,
                                lhs,
                                rhs,
                                rhs_value,
                                source,
                                alpha_root,
                                residual,
                            } => format!(
                                "{ensemble},{lhs},{rhs},{},{},{},{}",
                                rhs_value.map(format_f64).unwrap_or_default(),
                                source.map_or("curve", |s| s.name()),
                                format_f64(*alpha_root),
                                format_f64(*residual)
                            ),
                            crossings::Crossing::NoBracket { ensemble, lhs, rhs } => {
                                format!("{ensemble},{lhs},{rhs},,no_bracket,,")
                            }
                        };
                        s.push_str(&line);
                        s.push('\n');
                    }
                    s
                }
            };
            emit(&text, common.out.as_deref())?;
        }
        Command::Verify { files, quick, common } => {
            let mut supplied = Vec::new();
            for f in &files {
                let r = resolve_ensemble(&f.to_string_lossy(), None)?;
                supplied.push(r);
            }
            let cfg = common.config(16);
            let budget = if quick { Budget::Quick } else { Budget::Full };
            let mut reports = run_all(common.seed, budget, &cfg);
            for s in &supplied {
                reports.push(ensemble_checks(&s.name, &s.ensemble, common.seed, &cfg));
            }
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!(
                    "{:<8}{:<40}{:>6} cases {:>4} failures {:>8.2}s\n",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.cases,
                    r.failures.len(),
                    r.seconds
                ));
                for f in &r.failures {
                    text.push_str(&format!("    replay: {f}\n"));
                }
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            text.push_str(&format!("{} suites, {failed} failed\n", reports.len()));
            emit(&text, common.out.as_deref())?;
            return Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED });
        }
        Command::Ensembles { common } => {
            let mut text = String::new();
            let mut listing = Vec::new();
            for c in Canonical::all() {
                let e = c.ensemble()?;
                let g = gram(&e);
                let m = g.matrix();
                match common.format.unwrap_or(Format::Text) {
                    Format::Text => {
                        text.push_str(&format!("{} (n = {}, d = {})\n", c.name(), e.len(), e.dim()));
                        for row in m.row_iter() {
                            let cells: Vec<String> = row
                                .iter()
                                .map(|v| {
                                    if v.im.abs() < 1e-15 {
                                        format!("{:>9.5}", v.re)
                                    } else {
                                        format!("{:>9.5}{:+.5}i", v.re, v.im)
                                    }
                                })
                                .collect();
                            text.push_str(&format!("  {}\n", cells.join(" ")));
                        }
                    }
                    _ => listing.push(serde_json::json!({
                        "name": c.name(),
                        "members": e.len(),
                        "dim": e.dim(),
                        "gram": m.row_iter().map(|r| r.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    })),
                }
            }
            if !listing.is_empty() {
                text = json(&listing);
            }
            emit(&text, common.out.as_deref())?;
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gramq: {e}");
            ExitCode::from(CliError::exit_code(&e))
        }
    }
}
