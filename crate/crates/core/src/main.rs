//! Thin command-line front end over the library: run packaged or custom
//! scenarios, tabulate grid-convergence studies, and emit plot scripts.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure
//! (loss of positivity or a failed boundary solve), 4 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use artery1d::config::{parse_config, resolve_table_file};
use artery1d::convergence::{convergence_study, ConvergenceError};
use artery1d::output::{emit_plot_script, write_run, OutputError};
use artery1d::scenario::{presets, run_scenario, ScenarioConfig};
use artery1d::SourceMode;

#[derive(Parser)]
#[command(name = "artery1d", version, about = "1D arterial blood-flow solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a packaged scenario (by name) or a configuration file.
    Run {
        /// Scenario name (see `scenarios list`) or path to a config file.
        config: String,
        /// Override the source-term treatment.
        #[arg(long, value_parser = parse_source)]
        source: Option<SourceMode>,
        /// Override the cell count.
        #[arg(long)]
        cells: Option<usize>,
        /// Output directory (default: runs/<scenario>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the packaged scenarios.
    Scenarios {
        #[command(subcommand)]
        command: ScenariosCommand,
    },
    /// Grid-convergence study against the scenario's analytic solution.
    Converge {
        /// Scenario name or config path; needs an analytic solution
        /// (tourniquet, dalembert, viscous or viscoelastic).
        scenario: String,
        /// Comma-separated cell counts, e.g. 100,200,400.
        #[arg(long, value_delimiter = ',', required = true)]
        cells: Vec<usize>,
        /// Override the source-term treatment.
        #[arg(long, value_parser = parse_source)]
        source: Option<SourceMode>,
    },
    /// Write a plot script for a run directory.
    Plot {
        /// Directory previously written by `run`.
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum ScenariosCommand {
    /// List the packaged scenarios.
    List,
}

fn parse_source(s: &str) -> Result<SourceMode, String> {
    match s {
        "hsr" => Ok(SourceMode::Hsr),
        "centered" => Ok(SourceMode::Centered),
        other => Err(format!("unknown source treatment `{other}` (use hsr or centered)")),
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load_scenario(spec: &str) -> Result<ScenarioConfig, (u8, String)> {
    if let Some(cfg) = presets::by_name(spec) {
        return Ok(cfg);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err((
            EXIT_CONFIG,
            format!(
                "`{spec}` is neither a packaged scenario nor a config file; \
                 try `scenarios list`"
            ),
        ));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_IO, format!("cannot read {spec}: {e}")))?;
    let mut cfg = parse_config(&text).map_err(|e| (EXIT_CONFIG, format!("{spec}: {e}")))?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve_table_file(&mut cfg, base).map_err(|e| (EXIT_CONFIG, format!("{spec}: {e}")))?;
    Ok(cfg)
}

fn apply_overrides(
    mut cfg: ScenarioConfig,
    source: Option<SourceMode>,
    cells: Option<usize>,
) -> ScenarioConfig {
    if let Some(mode) = source {
        cfg = cfg.with_source_mode(mode);
    }
    if let Some(j) = cells {
        cfg = cfg.with_cells(j);
    }
    cfg
}

fn run_command(
    spec: &str,
    source: Option<SourceMode>,
    cells: Option<usize>,
    out: Option<PathBuf>,
) -> ExitCode {
    let cfg = match load_scenario(spec) {
        Ok(cfg) => apply_overrides(cfg, source, cells),
        Err((code, msg)) => return fail(code, msg),
    };
    let dir = out.unwrap_or_else(|| PathBuf::from("runs").join(&cfg.name));
    let output = match run_scenario(&cfg) {
        Ok(output) => output,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    println!(
        "{}: {} cells, {} steps, source = {}",
        output.name,
        cfg.grid.cells(),
        output.steps,
        cfg.scheme.source_mode
    );
    for d in &output.diagnostics {
        println!(
            "  t = {:>10.6} s  max|u| = {:>12.5e} m/s  mass defect = {:>12.5e} m^3  min A = {:>12.5e} m^2",
            d.t, d.max_abs_u, d.mass_defect, d.min_area
        );
    }
    match write_run(&output, &cfg, &dir) {
        Ok(written) => println!("wrote {} files to {}", written.len(), dir.display()),
        Err(OutputError::Scenario(e)) => return fail(EXIT_CONFIG, e),
        Err(e) => return fail(EXIT_IO, e),
    }
    if let Some(failure) = &output.failure {
        return fail(EXIT_NUMERICAL, format!("run aborted early: {failure}"));
    }
    ExitCode::SUCCESS
}

fn converge_command(spec: &str, cells: &[usize], source: Option<SourceMode>) -> ExitCode {
    let cfg = match load_scenario(spec) {
        Ok(cfg) => apply_overrides(cfg, source, None),
        Err((code, msg)) => return fail(code, msg),
    };
    let rows = match convergence_study(&cfg, cells) {
        Ok(rows) => rows,
        Err(e @ ConvergenceError::MissingOracle(_))
        | Err(e @ ConvergenceError::NonUniformProfile) => return fail(EXIT_CONFIG, e),
        Err(e @ ConvergenceError::RunFailed { .. }) => return fail(EXIT_NUMERICAL, e),
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    println!("{:>8} {:>14} {:>9} {:>14} {:>9}", "cells", "L1(A)", "order", "L1(Q)", "order");
    for row in rows {
        let fmt_order = |o: Option<f64>| match o {
            Some(v) => format!("{v:9.3}"),
            None => format!("{:>9}", "-"),
        };
        println!(
            "{:>8} {:>14.6e} {} {:>14.6e} {}",
            row.cells,
            row.error_a,
            fmt_order(row.order_a),
            row.error_q,
            fmt_order(row.order_q)
        );
    }
    ExitCode::SUCCESS
}

fn plot_command(dir: &Path) -> ExitCode {
    match emit_plot_script(dir) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e @ OutputError::MissingRunInfo(_))
        | Err(e @ OutputError::BadRunInfo(_))
        | Err(e @ OutputError::EmptyRun) => fail(EXIT_CONFIG, e),
        Err(e) => fail(EXIT_IO, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            source,
            cells,
            out,
        } => run_command(&config, source, cells, out),
        Command::Scenarios {
            command: ScenariosCommand::List,
        } => {
            for cfg in presets::all() {
                println!(
                    "{:<18} {:>6} cells  t_end = {:<8} {}",
                    cfg.name,
                    cfg.grid.cells(),
                    format!("{} s", cfg.t_end),
                    scenario_blurb(&cfg.name)
                );
            }
            ExitCode::SUCCESS
        }
        Command::Converge {
            scenario,
            cells,
            source,
        } => converge_command(&scenario, &cells, source),
        Command::Plot { dir } => plot_command(&dir),
    }
}

fn scenario_blurb(name: &str) -> &'static str {
    match name {
        "dead-man" => "aneurysm at rest; equilibrium preservation check",
        "tourniquet" => "dam-break analogue with exact Riemann solution",
        "constriction" => "pulse reflection/transmission at a narrowing",
        "dalembert" => "pure pulse wave, no dissipation or diffusion",
        "viscous" => "pulse damped by blood viscosity",
        "viscoelastic" => "pulse diffused by the viscoelastic wall",
        "tapered" => "tapered artery with friction and viscoelasticity",
        "tapered-inviscid" => "tapered artery, inviscid pure wave",
        _ => "",
    }
}
