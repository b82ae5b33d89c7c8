//! Batch front end for the lightcone pipeline.
//!
//! Verbs: `run <file>`, `sweep <file> --axis <name> --values <spec>`,
//! `validate <file>`, `selftest`.
//!
//! Exit codes: 0 success, 2 validation or parse error, 3 quadrature budget
//! exhaustion, 4 second-law audit violation under `--enforce-bound`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lightcone::scenario::{
    load_scenario, parse_axis, run_scenario, scenario_hash, RouteSelection, RunReport, Scenario,
    ScenarioError,
};
use lightcone::selftest::run_selftest;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_BOUND_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "lightcone",
    version,
    about = "Detector-to-detector field communication: pairing, capacity, and the second-law coupling bound"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print the report.
    Run {
        /// Scenario TOML file.
        file: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the machine-readable TOML report here.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Exit with code 4 if the second-law audit is violated.
        #[arg(long)]
        enforce_bound: bool,
    },
    /// Run a scenario once per value of a swept parameter, emitting CSV.
    Sweep {
        /// Scenario TOML file.
        file: PathBuf,
        /// Parameter to vary, e.g. detector_b.switch_center or separation.
        #[arg(long)]
        axis: String,
        /// Values: comma list "0.5,1,2" or linspace "start:stop:count".
        #[arg(long)]
        values: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the CSV table here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Exit with code 4 if any sweep point violates the audit.
        #[arg(long)]
        enforce_bound: bool,
    },
    /// Parse and validate a scenario file, printing the effective settings.
    Validate {
        /// Scenario TOML file.
        file: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args)]
struct Overrides {
    /// Pairing route: momentum, position, or both.
    #[arg(long)]
    route: Option<String>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Provenance seed recorded in reports and used by stochastic checks.
    #[arg(long)]
    seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, scenario: &mut Scenario) -> Result<(), ScenarioError> {
        if let Some(route) = &self.route {
            scenario.route = route
                .parse::<RouteSelection>()
                .map_err(|e| ScenarioError::Validation {
                    field: "route".into(),
                    constraint: "one of momentum, position, both".into(),
                    got: e,
                })?;
        }
        if let Some(rel) = self.rel_tol {
            if !(rel > 0.0 && rel.is_finite()) {
                return Err(ScenarioError::Validation {
                    field: "rel_tol".into(),
                    constraint: "positive and finite".into(),
                    got: rel.to_string(),
                });
            }
            scenario.quadrature.rel_tol = rel;
        }
        if let Some(abs) = self.abs_tol {
            if !(abs > 0.0 && abs.is_finite()) {
                return Err(ScenarioError::Validation {
                    field: "abs_tol".into(),
                    constraint: "positive and finite".into(),
                    got: abs.to_string(),
                });
            }
            scenario.quadrature.abs_tol = abs;
        }
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        Ok(())
    }
}

/// Parse a `--values` spec: empty string for an empty sweep, a comma list,
/// or "start:stop:count" for an inclusive linspace.
fn parse_values(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!(
                "linspace spec must be start:stop:count, got `{spec}`"
            ));
        }
        let start: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| format!("bad linspace start `{}`", parts[0]))?;
        let stop: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| format!("bad linspace stop `{}`", parts[1]))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad linspace count `{}`", parts[2]))?;
        if count == 0 {
            return Ok(Vec::new());
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad value `{tok}` in --values"))
        })
        .collect()
}

fn exit_code_for(err: &ScenarioError) -> u8 {
    if err.is_budget_exhaustion() {
        EXIT_BUDGET
    } else {
        EXIT_VALIDATION
    }
}

fn cmd_run(
    file: PathBuf,
    overrides: Overrides,
    output: Option<PathBuf>,
    enforce_bound: bool,
) -> ExitCode {
    let mut scenario = match load_scenario(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if let Err(e) = overrides.apply(&mut scenario) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    let report = match run_scenario(&scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    println!("scenario {}", file.display());
    print!("{}", report.human_table());
    if let Some(path) = &output {
        if let Err(e) = std::fs::write(path, report.to_toml()) {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
        println!("  report written to {}", path.display());
    }
    if enforce_bound && !report.engine.satisfied {
        eprintln!("second-law audit violated (margin {})", report.engine.margin);
        return ExitCode::from(EXIT_BOUND_VIOLATION);
    }
    ExitCode::SUCCESS
}

fn cmd_sweep(
    file: PathBuf,
    axis: String,
    values_spec: String,
    overrides: Overrides,
    output: Option<PathBuf>,
    enforce_bound: bool,
) -> ExitCode {
    let mut scenario = match load_scenario(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if let Err(e) = overrides.apply(&mut scenario) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    let values = match parse_values(&values_spec) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    // Validate the axis and every sweep point before any computation.
    let axis = match parse_axis(&axis) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let mut points = Vec::with_capacity(values.len());
    for &v in &values {
        match axis.apply(&scenario, v) {
            Ok(s) => points.push((v, s)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_VALIDATION);
            }
        }
    }

    let mut sink: Box<dyn Write> = match &output {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot open {}: {e}", path.display());
                return ExitCode::from(EXIT_VALIDATION);
            }
        },
        None => Box::new(std::io::stdout()),
    };

    let mut violated = false;
    if let Err(e) = writeln!(sink, "{}", RunReport::CSV_HEADER) {
        eprintln!("error: write failed: {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    // Rows are emitted incrementally, one per completed run, in input order.
    for (value, point) in points {
        let report = match run_scenario(&point) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error at {axis:?} = {value}: {e}");
                return ExitCode::from(exit_code_for(&e));
            }
        };
        violated |= !report.engine.satisfied;
        if let Err(e) = writeln!(sink, "{}", report.csv_row(value)) {
            eprintln!("error: write failed: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
        let _ = sink.flush();
    }
    if enforce_bound && violated {
        eprintln!("second-law audit violated at one or more sweep points");
        return ExitCode::from(EXIT_BOUND_VIOLATION);
    }
    ExitCode::SUCCESS
}

fn cmd_validate(file: PathBuf) -> ExitCode {
    match load_scenario(&file) {
        Ok(s) => {
            println!("OK {}", file.display());
            println!("  profile                {}", s.profile);
            println!("  route                  {}", s.route);
            println!(
                "  detector_a             pos {:?}, t0 {}, tau {}, lambda {}, sigma {}",
                s.detector_a.position,
                s.detector_a.switch_center,
                s.detector_a.switch_timescale,
                s.detector_a.coupling,
                s.detector_a.spatial_width
            );
            println!(
                "  detector_b             pos {:?}, t0 {}, tau {}, lambda {}, sigma {}",
                s.detector_b.position,
                s.detector_b.switch_center,
                s.detector_b.switch_timescale,
                s.detector_b.coupling,
                s.detector_b.spatial_width
            );
            println!(
                "  reservoir              T_c {}, c_T {}",
                s.reservoir.t_cold, s.reservoir.heat_capacity
            );
            println!(
                "  quadrature             rel {:e}, abs {:e}, budget {}",
                s.quadrature.rel_tol, s.quadrature.abs_tol, s.quadrature.max_evals
            );
            println!("  information efficiency {}", s.information_efficiency);
            println!("  seed                   {}", s.seed);
            println!("  config hash            {}", scenario_hash(&s));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn cmd_selftest() -> ExitCode {
    let results = run_selftest();
    let mut failed = 0;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<32} {}", r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    println!("{} checks, {} failed", results.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    // Die quietly on closed pipes (e.g. `lightcone validate f | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            file,
            overrides,
            output,
            enforce_bound,
        } => cmd_run(file, overrides, output, enforce_bound),
        Command::Sweep {
            file,
            axis,
            values,
            overrides,
            output,
            enforce_bound,
        } => cmd_sweep(file, axis, values, overrides, output, enforce_bound),
        Command::Validate { file } => cmd_validate(file),
        Command::Selftest => cmd_selftest(),
    }
}
