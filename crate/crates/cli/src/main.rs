//! `dwlab` command-line interface.
//!
//! Exit codes: 0 success (or `solve` found a feasible point), 1 error,
//! 2 `solve` proved infeasibility, 3 `solve` ran out of budget, and
//! `experiment` exits 1 when any cell failed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dwlab::dw_solver::{solve_instance, SolveReport, SolverConfig};
use dwlab::game_value::{value_approx, value_exact, ValueCertificate};
use dwlab::harness::{self, SuiteConfig};
use dwlab::instance_gen::{generate_hard_instance_with, read_instance, width, write_instance, ValueMode};
use dwlab::rational::{self, Rational};
use dwlab::theorem_lab::{min_submatrix_value, sampled_min_submatrix_value, GapReport};
use dwlab::Error;

#[derive(Parser)]
#[command(name = "dwlab", version, about = "Hard packing instances, exact game values and query-count experiments")]
struct Cli {
    /// Seed for instance generation and sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (gen, value, solve, verify) or directory (experiment).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for experiments; overrides the config file.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Approx,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a hard packing instance.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long, value_parser = parse_rational)]
        rho: Rational,
        /// Use a certified approximate value with this tolerance instead of the exact one.
        #[arg(long, value_parser = parse_rational)]
        approx_tol: Option<Rational>,
    },
    /// Compute the value of an instance's matrix game.
    Value {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, value_parser = parse_rational, default_value = "1/1000")]
        tol: Rational,
    },
    /// Run the packing solver.
    Solve {
        instance: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        eps: Rational,
        #[arg(long)]
        trajectory: bool,
        /// Iteration cap replacing the default.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Minimum value over column submatrices for s = 1..=s_max.
    Verify {
        instance: PathBuf,
        #[arg(long)]
        s_max: usize,
        #[arg(long, value_parser = parse_rational, default_value = "1/10")]
        c_gap: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1/10")]
        eps_bar: Rational,
        /// Sample this many subsets per s instead of enumerating all of them.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Run an experiment suite from a TOML or JSON config.
    Experiment { config: PathBuf },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    if let Some(r) = rational::parse(s) {
        return Ok(r);
    }
    s.parse::<f64>()
        .ok()
        .and_then(rational::from_f64)
        .ok_or_else(|| format!("{s:?} is not a rational (use num/den or a decimal)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen { m, rho, approx_tol } => {
            let mode = match approx_tol {
                Some(tol) => ValueMode::Approx { tol: tol.clone() },
                None => ValueMode::Exact,
            };
            let inst = generate_hard_instance_with(*m, rho, cli.seed, &mode)?;
            let w = width(&inst)?;
            let summary = format!(
                "m {}\nn {}\nrho {}\nseed {}\nvalue {}\nwidth {}\n",
                inst.rows(),
                inst.cols(),
                rational::format(rho),
                inst.meta.as_ref().map_or(cli.seed, |meta| meta.seed),
                rational::format(&inst.b[0]),
                rational::format(&w)
            );
            match out {
                Some(p) => {
                    write_instance(p, &inst)?;
                    print!("{summary}");
                }
                None => {
                    print!("{}", inst.to_json());
                    eprint!("{summary}");
                }
            }
            Ok(0)
        }
        Command::Value { instance, mode, tol } => {
            let inst = read_instance(instance)?;
            let cert = match mode {
                Mode::Exact => value_exact(&inst.a)?,
                Mode::Approx => value_approx(&inst.a, tol)?,
            };
            emit(out, &render_certificate(&cert, cli.format)?)?;
            Ok(0)
        }
        Command::Solve {
            instance,
            eps,
            trajectory,
            budget,
        } => {
            let inst = read_instance(instance)?;
            let mut cfg = SolverConfig::new(eps.clone()).with_trajectory(*trajectory);
            cfg.budget = *budget;
            let (report, code) = match solve_instance(&inst, &cfg) {
                Ok(r) => {
                    let code = if r.is_infeasible() { 2 } else { 0 };
                    (r, code)
                }
                Err(Error::BudgetExhausted { budget, report }) => {
                    eprintln!("budget of {budget} iterations exhausted without a certificate");
                    (*report, 3)
                }
                Err(e) => return Err(e.into()),
            };
            emit(out, &render_report(&report, cli.format))?;
            Ok(code)
        }
        Command::Verify {
            instance,
            s_max,
            c_gap,
            eps_bar,
            samples,
        } => {
            let inst = read_instance(instance)?;
            let n = inst.cols();
            if *s_max == 0 || *s_max > n {
                bail!("--s-max must lie in 1..={n}");
            }
            let v_a = value_exact(&inst.a)?.upper;
            if v_a == rational::zero() {
                bail!("V(A) = 0, so gap ratios are undefined");
            }
            let seed = inst.meta.as_ref().map_or(0, |m| m.seed);
            let threshold = (rational::one() + c_gap * eps_bar) * &v_a;
            let mut rows = Vec::new();
            for s in 1..=*s_max {
                let found = match samples {
                    Some(k) => sampled_min_submatrix_value(&inst.a, s, *k, dwlab::rng::derive_seed(cli.seed, s as u64))?,
                    None => match min_submatrix_value(&inst.a, s) {
                        Err(Error::ResourceLimit(msg)) => bail!("{msg}; pass --samples N to sample subsets instead"),
                        other => other?,
                    },
                };
                let pass = found.value > threshold;
                eprintln!(
                    "s={s} {}: v_min_s={} vs (1 + c_gap*eps_bar) V(A) = {}",
                    if pass { "pass" } else { "fail" },
                    rational::format(&found.value),
                    rational::format(&threshold)
                );
                rows.push(GapReport {
                    seed,
                    s,
                    v_a: v_a.clone(),
                    gap_ratio: &found.value / &v_a,
                    v_min_s: found.value,
                    subsets_checked: found.subsets_checked,
                });
            }
            let mut buf = Vec::new();
            harness::write_gap_csv(&mut buf, &rows)?;
            emit(out, std::str::from_utf8(&buf).expect("csv is utf-8"))?;
            Ok(0)
        }
        Command::Experiment { config } => {
            let mut cfg = SuiteConfig::load(config)?;
            if let Some(p) = cli.parallel {
                cfg.parallel = p;
            }
            let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("results"));
            let argv: Vec<String> = std::env::args().collect();
            let result = harness::run_suite(&cfg, &dir, &argv)?;
            for f in &result.manifest.outputs {
                println!("{} {}", f.sha256, dir.join(&f.path).display());
            }
            println!("manifest {}", result.manifest_path.display());
            for f in &result.manifest.failures {
                eprintln!("failed cell {} {}: {}", f.experiment, f.cell, f.error.as_deref().unwrap_or(&f.outcome));
            }
            Ok(if result.failed() { 1 } else { 0 })
        }
    }
}

fn render_certificate(cert: &ValueCertificate, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(cert)? + "\n",
        Format::Csv => format!(
            "upper,lower,gap\n{},{},{}\n",
            rational::format(&cert.upper),
            rational::format(&cert.lower),
            rational::format(&cert.gap())
        ),
    })
}

fn render_report(report: &SolveReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => format!(
            "outcome,queries,iterations,max_relative_violation\n{},{},{},{}\n",
            report.outcome_name(),
            report.queries,
            report.iterations,
            report
                .max_relative_violation
                .as_ref()
                .map(rational::format)
                .unwrap_or_default()
        ),
    }
}
