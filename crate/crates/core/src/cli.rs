//! Command-line front end: `analyze`, `demo` and `selftest`.
//!
//! Exit codes: 0 everything passed, 1 a check or property failed, 2 invalid input
//! (unreadable or malformed scenario, bad flag, unknown demo), 3 numerical precondition
//! failure (not a frame, singular operator, violated orthogonality or norm condition).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::error::Error;
use crate::io::{emit_report, emit_value, parse_scenario, ReportFile, ScenarioFile};
use crate::runner::{run_scenario, validate_scenario, RunOptions, RunOutcome};
use crate::selftest::run_selftest;
use crate::tolerance::Tolerances;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

pub const DEMOS: &[&str] = &["example22", "example23", "perturb", "dual", "parseval_sqrt"];

const EXAMPLE22: &str = include_str!("../fixtures/example22.json");
const EXAMPLE23: &str = include_str!("../fixtures/example23.json");
const PERTURBATION: &str = include_str!("../fixtures/perturbation.json");
const DUAL: &str = r#"{
  "schema_version": 1, "dimension": 4, "terms": 8, "seed": 31,
  "generator": {"kind": "random_operator_sequence", "codomain_dims": [1, 2, 1, 3, 2, 1, 2, 1]},
  "transform": {"kind": "random_invertible"},
  "checks": [{"name": "canonical_dual", "samples": 100}]
}"#;
const PARSEVAL_SQRT: &str = r#"{
  "schema_version": 1, "dimension": 5, "terms": 10, "seed": 41,
  "generator": {"kind": "random_frame_functionals", "condition": 8.0},
  "transform": {"kind": "delta"},
  "checks": [{"name": "inv_sqrt_parseval"}]
}"#;

#[derive(Debug, Parser)]
#[command(
    name = "egframe",
    version,
    about = "Frame operators, sharp bounds and stability checks for E-g-frames"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and print a summary.
    Analyze {
        /// Scenario file (JSON).
        scenario: PathBuf,
        /// Write the full report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Multiply every tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Print a machine-readable summary instead of the table.
        #[arg(long)]
        json: bool,
        /// Record per-check wall time in the report file.
        #[arg(long)]
        timings: bool,
    },
    /// Run a built-in scenario and compare the stated claim with measured values.
    Demo {
        /// One of example22, example23, perturb, dual, parseval_sqrt.
        name: String,
        /// Override the built-in seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the randomized property suite at reduced scale.
    Selftest {
        /// First case seed; case i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of seeds.
        #[arg(long, default_value_t = 30)]
        cases: usize,
        /// Multiply every tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
}

/// Exit code for an error raised while loading or running a scenario.
pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Scenario { .. } | Error::Version(_) | Error::Shape { .. } | Error::Domain(_) => EXIT_INVALID_INPUT,
        Error::Singular { .. } | Error::NotAFrame { .. } | Error::Precondition(_) | Error::Orthogonality { .. } => {
            EXIT_NUMERICAL
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code_for(e))
}

/// Parses the process arguments and runs the command.
pub fn main_entry() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_PASS })
        }
    }
}

pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Analyze {
            scenario,
            report,
            seed,
            tol_scale,
            json,
            timings,
        } => cmd_analyze(
            &scenario,
            report.as_deref(),
            RunOptions {
                seed,
                tol_scale,
                timings,
            },
            json,
        ),
        Command::Demo { name, seed } => cmd_demo(&name, seed),
        Command::Selftest { seed, cases, tol_scale } => cmd_selftest(seed, cases, tol_scale),
    }
}

fn load(text: &str) -> Result<ScenarioFile, Error> {
    let s = parse_scenario(text)?;
    validate_scenario(&s)?;
    Ok(s)
}

pub fn cmd_analyze(
    path: &std::path::Path,
    report_path: Option<&std::path::Path>,
    opts: RunOptions,
    json: bool,
) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
    };
    let outcome = match load(&text).and_then(|s| run_scenario(&s, &opts)) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Some(rp) = report_path {
        if let Err(e) = std::fs::write(rp, emit_report(&outcome.report)) {
            eprintln!("error: cannot write {}: {e}", rp.display());
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
    }
    if json {
        print!("{}", emit_value(&json_summary(&outcome.report)));
    } else {
        print_summary(&path.display().to_string(), &outcome);
    }
    ExitCode::from(if outcome.report.overall_pass {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    })
}

fn json_summary(r: &ReportFile) -> serde_json::Value {
    let checks: Vec<_> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.report.name,
                "passed": c.report.passed,
                "hypothesis_holds": c.report.hypothesis_holds,
                "hypothesis_margin": c.report.hypothesis_margin,
                "conclusion_checked": c.report.conclusion_checked,
            })
        })
        .collect();
    json!({
        "overall_pass": r.overall_pass,
        "lower_opt": r.frame.lower_opt,
        "upper_opt": r.frame.upper_opt,
        "classification": r.frame.classification,
        "checks": checks,
    })
}

fn fmt(x: f64) -> String {
    format!("{x:.10e}")
}

fn print_summary(label: &str, outcome: &RunOutcome) {
    let r = &outcome.report;
    let s = &r.scenario;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "scenario   {label}");
    let _ = writeln!(out, "d = {}, N = {}, seed = {}", s.dimension, s.terms, s.seed);
    let _ = writeln!(
        out,
        "bounds     lower = {}  upper = {}  ({})",
        fmt(r.frame.lower_opt),
        fmt(r.frame.upper_opt),
        r.frame.classification.as_str()
    );
    if r.checks.is_empty() {
        let _ = writeln!(out, "no checks");
    } else {
        let _ = writeln!(
            out,
            "{:<26} {:<6} {:<12} {:>18} {:>12}",
            "check", "result", "hypothesis", "margin", "time [ms]"
        );
    }
    for (c, ms) in r.checks.iter().zip(&outcome.wall_times_ms) {
        let c = &c.report;
        let hyp = if c.hypothesis_holds { "holds" } else { "not met" };
        let margin = c.hypothesis_margin.map_or_else(|| "-".to_string(), fmt);
        let result = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{:<26} {:<6} {:<12} {:>18} {:>12.3}",
            c.name, result, hyp, margin, ms
        );
        for line in detail_lines(c) {
            let _ = writeln!(out, "    {line}");
        }
        for note in &c.notes {
            let _ = writeln!(out, "    note: {note}");
        }
    }
    let _ = writeln!(out, "overall    {}", if r.overall_pass { "PASS" } else { "FAIL" });
}

/// Headline comparisons for a check, in `claim: measured vs predicted` form.
fn detail_lines(c: &crate::theorems::CheckReport) -> Vec<String> {
    let v = |k: &str| c.values.get(k).copied().unwrap_or(f64::NAN);
    match c.name.as_str() {
        "delta_bessel" => vec![format!(
            "Δ-Bessel bound: measured upper {} <= 4B = {}",
            fmt(v("delta_upper")),
            fmt(v("four_upper"))
        )],
        "interleaved_delta" => vec![
            format!(
                "claimed interval [A, 2B] = [{}, {}] contains measured ({}, {})",
                fmt(v("base_lower")),
                fmt(2.0 * v("base_upper")),
                fmt(v("delta_lower")),
                fmt(v("delta_upper"))
            ),
            format!(
                "sharp values (2A, 2B) = ({}, {})",
                fmt(2.0 * v("base_lower")),
                fmt(2.0 * v("base_upper"))
            ),
        ],
        "perturbation" | "perturbation_simple" => vec![format!(
            "predicted [{}, {}], measured ({}, {})",
            fmt(v("predicted_lower")),
            fmt(v("predicted_upper")),
            fmt(v("measured_lower")),
            fmt(v("measured_upper"))
        )],
        "canonical_dual" => vec![
            format!(
                "dual bounds ({}, {}) vs (1/B, 1/A) = ({}, {})",
                fmt(v("dual_lower")),
                fmt(v("dual_upper")),
                fmt(1.0 / v("upper")),
                fmt(1.0 / v("lower"))
            ),
            format!("reconstruction residual {}", fmt(v("reconstruction_residual"))),
        ],
        "inv_sqrt_parseval" => vec![format!("‖S_Γ − I‖_F = {}", fmt(v("identity_residual")))],
        "sum_bessel" => vec![format!(
            "sum upper {} <= B₁‖U₁‖² + B₂‖U₂‖² = {}",
            fmt(v("sum_upper")),
            fmt(v("predicted_upper"))
        )],
        "closed_range" => vec![format!(
            "lower of Λ {} >= A(ΛU)·‖U‖⁻² = {}",
            fmt(v("lower")),
            fmt(v("predicted_lower"))
        )],
        "composition_selfadjoint" => vec![format!(
            "lower of ΛU {} >= A·‖(U⁻¹)*‖⁻² = {}",
            fmt(v("composed_lower")),
            fmt(v("predicted_composed_lower"))
        )],
        _ => Vec::new(),
    }
}

pub fn cmd_demo(name: &str, seed: Option<u64>) -> ExitCode {
    let text = match name {
        "example22" => EXAMPLE22,
        "example23" => EXAMPLE23,
        "perturb" => PERTURBATION,
        "dual" => DUAL,
        "parseval_sqrt" => PARSEVAL_SQRT,
        other => {
            eprintln!("error: unknown demo `{other}` (known: {})", DEMOS.join(", "));
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
    };
    let opts = RunOptions {
        seed,
        ..RunOptions::default()
    };
    match load(text).and_then(|s| run_scenario(&s, &opts)) {
        Ok(outcome) => {
            print_summary(&format!("demo {name}"), &outcome);
            ExitCode::from(if outcome.report.overall_pass {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Err(e) => fail(&e),
    }
}

pub fn cmd_selftest(seed: u64, cases: usize, tol_scale: f64) -> ExitCode {
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        eprintln!("error: --tol-scale must be a positive finite number, got {tol_scale}");
        return ExitCode::from(EXIT_INVALID_INPUT);
    }
    let tol = Tolerances::default().scaled(tol_scale);
    let start = std::time::Instant::now();
    let summary = run_selftest(seed, cases, &tol);
    for f in &summary.failures {
        println!("FAIL {} seed={} {}", f.property, f.seed, f.message);
        println!(
            "     replay: egframe selftest --seed {} --cases 1 --tol-scale {tol_scale:e}",
            f.seed
        );
    }
    println!(
        "selftest: {} evaluations over {} seeds from {seed}, {} failures, {:.2} s",
        summary.evaluated,
        cases,
        summary.failures.len(),
        start.elapsed().as_secs_f64()
    );
    ExitCode::from(if summary.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED })
}
