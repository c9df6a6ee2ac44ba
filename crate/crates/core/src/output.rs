//! Snapshot CSV output, run directories, and plot-script emission.
//!
//! Snapshot files are named `<scenario>_t<seconds>.csv` and hold the header
//! `x,A,Q,u,R,p` followed by one row per cell, every value printed with 17
//! significant digits (lossless for f64) and LF line endings. A run
//! directory additionally gets `profile.csv` (x, r0, k), `diagnostics.csv`,
//! and a `run_info` key-value file that records which files belong to the
//! run and the parameters the plot script needs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::boundary::InletBoundary;
use crate::geometry::ProfileSpec;
use crate::oracles::{heat_kernel_solution, reflection_transmission};
use crate::scenario::{
    InitialCondition, ProfileSource, RunOutput, ScenarioConfig, ScenarioError, Snapshot,
};
use crate::state::moens_korteweg;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("run directory has no run_info file ({0})")]
    MissingRunInfo(String),
    #[error("run_info: {0}")]
    BadRunInfo(String),
    #[error("run directory contains no snapshot files")]
    EmptyRun,
    #[error("snapshot file {path}: {msg}")]
    BadSnapshot { path: String, msg: String },
}

/// 17 significant digits; parses back to the identical f64.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Canonical snapshot file name, `<scenario>_t<seconds>.csv`.
pub fn snapshot_filename(scenario: &str, t: f64) -> String {
    format!("{scenario}_t{t}.csv")
}

/// Write one snapshot as CSV.
pub fn write_snapshot(snapshot: &Snapshot, path: &Path) -> Result<(), OutputError> {
    let mut text = String::with_capacity(96 * snapshot.x.len());
    text.push_str("x,A,Q,u,R,p\n");
    for i in 0..snapshot.x.len() {
        writeln!(
            text,
            "{},{},{},{},{},{}",
            full(snapshot.x[i]),
            full(snapshot.a[i]),
            full(snapshot.q[i]),
            full(snapshot.u[i]),
            full(snapshot.r[i]),
            full(snapshot.p[i]),
        )
        .unwrap();
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Columns of a snapshot file read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotColumns {
    pub x: Vec<f64>,
    pub a: Vec<f64>,
    pub q: Vec<f64>,
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
}

/// Read a snapshot CSV back.
pub fn read_snapshot(path: &Path) -> Result<SnapshotColumns, OutputError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != "x,A,Q,u,R,p" {
        return Err(OutputError::BadSnapshot {
            path: path.display().to_string(),
            msg: format!("unexpected header `{header}`"),
        });
    }
    let mut cols = SnapshotColumns {
        x: vec![],
        a: vec![],
        q: vec![],
        u: vec![],
        r: vec![],
        p: vec![],
    };
    for (no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut vals = [0.0f64; 6];
        let mut parts = line.split(',');
        for v in vals.iter_mut() {
            let cell = parts.next().ok_or_else(|| OutputError::BadSnapshot {
                path: path.display().to_string(),
                msg: format!("row {} is short", no + 2),
            })?;
            *v = cell.parse().map_err(|e| OutputError::BadSnapshot {
                path: path.display().to_string(),
                msg: format!("row {}: {e}", no + 2),
            })?;
        }
        cols.x.push(vals[0]);
        cols.a.push(vals[1]);
        cols.q.push(vals[2]);
        cols.u.push(vals[3]);
        cols.r.push(vals[4]);
        cols.p.push(vals[5]);
    }
    Ok(cols)
}

fn layout_of(cfg: &ScenarioConfig) -> &'static str {
    match (&cfg.initial, &cfg.boundary.left) {
        (InitialCondition::Tourniquet { .. }, _) => "riemann",
        (InitialCondition::PulsePerturbation { .. }, _) => "reflection",
        (InitialCondition::Rest, InletBoundary::Inflow { .. }) => "overlay",
        (InitialCondition::Rest, InletBoundary::Neumann) => "rest",
    }
}

/// Write a complete run directory: snapshots, profile, diagnostics and the
/// `run_info` manifest. Returns the paths written. A failed run is written
/// as far as it got, with the failure recorded in `run_info`.
pub fn write_run(
    output: &RunOutput,
    cfg: &ScenarioConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>, OutputError> {
    std::fs::create_dir_all(dir)?;
    let profile = cfg.build_profile()?;
    let mut written = Vec::new();

    let mut files = Vec::new();
    for snap in &output.snapshots {
        let name = snapshot_filename(&output.name, snap.t);
        let path = dir.join(&name);
        write_snapshot(snap, &path)?;
        files.push((name, snap.t));
        written.push(path);
    }

    // rest geometry, for profile panels and R - R0 plots
    {
        let mut text = String::from("x,r0,k\n");
        let grid = profile.grid();
        for i in 0..grid.cells() {
            writeln!(
                text,
                "{},{},{}",
                full(grid.cell_center(i)),
                full(profile.r0()[i]),
                full(profile.k()[i])
            )
            .unwrap();
        }
        let path = dir.join("profile.csv");
        std::fs::write(&path, text)?;
        written.push(path);
    }

    {
        let mut text = String::from("t,max_abs_u,equilibrium_deviation,mass,mass_defect,min_area\n");
        for d in &output.diagnostics {
            writeln!(
                text,
                "{},{},{},{},{},{}",
                full(d.t),
                full(d.max_abs_u),
                full(d.equilibrium_deviation),
                full(d.mass),
                full(d.mass_defect),
                full(d.min_area)
            )
            .unwrap();
        }
        let path = dir.join("diagnostics.csv");
        std::fs::write(&path, text)?;
        written.push(path);
    }

    let layout = layout_of(cfg);
    let mut info = String::new();
    writeln!(info, "scenario = {}", output.name).unwrap();
    writeln!(info, "layout = {layout}").unwrap();
    writeln!(info, "source = {}", cfg.scheme.source_mode).unwrap();
    writeln!(info, "steps = {}", output.steps).unwrap();
    if let Some(failure) = &output.failure {
        writeln!(info, "failed = {failure}").unwrap();
    }
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    writeln!(info, "files = {}", names.join(", ")).unwrap();
    let times: Vec<String> = files.iter().map(|(_, t)| format!("{t}")).collect();
    writeln!(info, "times = {}", times.join(", ")).unwrap();

    match layout {
        "overlay" => {
            if let InletBoundary::Inflow { qc, tc } = cfg.boundary.left {
                let a0 = profile.a0()[0];
                let c0 = moens_korteweg(profile.k()[0], profile.r0()[0], cfg.params.rho);
                writeln!(info, "c0 = {c0}").unwrap();
                writeln!(info, "tc = {tc}").unwrap();
                writeln!(info, "amp = {}", qc / a0).unwrap();
                if cfg.params.cf > 0.0 {
                    writeln!(info, "eps_f = {}", tc * cfg.params.cf / a0).unwrap();
                }
                if cfg.params.cv > 0.0 {
                    if let Some(snap) = output.snapshots.last().filter(|s| s.t > 0.0) {
                        let name = format!("asymptote_t{}.csv", snap.t);
                        let path = dir.join(&name);
                        write_heat_kernel_reference(snap, qc, tc, c0, cfg.params.cv, a0, &path)?;
                        writeln!(info, "asymptote = {name}").unwrap();
                        written.push(path);
                    }
                }
            }
        }
        "reflection" => {
            if let (
                ProfileSource::Spec(ProfileSpec::Constriction { r_r, delta_r, k, .. }),
                InitialCondition::PulsePerturbation { epsilon, .. },
            ) = (&cfg.profile, &cfg.initial)
            {
                let r_p = r_r + delta_r;
                let a0_p = std::f64::consts::PI * r_p * r_p;
                let a0_d = std::f64::consts::PI * r_r * r_r;
                let (re, tr) = reflection_transmission(a0_p, *k, a0_d, *k, cfg.params.rho);
                writeln!(info, "re = {re}").unwrap();
                writeln!(info, "tr = {tr}").unwrap();
                // the initial bump splits into two halves; the forward half
                // is the incident amplitude in R - R0
                writeln!(info, "incident = {}", 0.5 * epsilon * r_p).unwrap();
            }
        }
        _ => {}
    }

    let path = dir.join("run_info");
    std::fs::write(&path, info)?;
    written.push(path);
    Ok(written)
}

/// Heat-kernel reference curve for the viscoelastic overlay, written as an
/// `x,u` CSV evaluated on the snapshot grid.
fn write_heat_kernel_reference(
    snap: &Snapshot,
    qc: f64,
    tc: f64,
    c0: f64,
    cv: f64,
    a0: f64,
    path: &Path,
) -> Result<(), OutputError> {
    let width = c0 * tc / 2.0;
    let n = 2048;
    let xi_in: Vec<f64> = (0..n).map(|i| -width + width * i as f64 / (n - 1) as f64).collect();
    let q0: Vec<f64> = xi_in
        .iter()
        .map(|&xi| crate::boundary::inflow_discharge(-xi / c0, qc, tc))
        .collect();
    let eps_nu = cv / (c0 * c0 * tc);
    let tau = eps_nu * snap.t;
    let xi_out: Vec<f64> = snap.x.iter().map(|&x| x - c0 * snap.t).collect();
    let q = heat_kernel_solution(&xi_in, &q0, tau, c0, tc, &xi_out)
        .map_err(|e| OutputError::BadRunInfo(e.to_string()))?;
    let mut text = String::from("x,u\n");
    for i in 0..snap.x.len() {
        writeln!(text, "{},{}", full(snap.x[i]), full(q[i] / a0)).unwrap();
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_run_info(dir: &Path) -> Result<BTreeMap<String, String>, OutputError> {
    let path = dir.join("run_info");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| OutputError::MissingRunInfo(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for line in text.lines() {
        if let Some((k, v)) = line.split_once('=') {
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

/// Emit a self-contained Python/matplotlib script that renders the figures
/// for a run directory written by [`write_run`]. The script only references
/// files that exist in the directory. Returns the script path.
pub fn emit_plot_script(dir: &Path) -> Result<PathBuf, OutputError> {
    let info = parse_run_info(dir)?;
    let scenario = info
        .get("scenario")
        .ok_or_else(|| OutputError::BadRunInfo("missing scenario".into()))?
        .clone();
    let layout = info
        .get("layout")
        .ok_or_else(|| OutputError::BadRunInfo("missing layout".into()))?
        .clone();
    let files: Vec<String> = info
        .get("files")
        .map(|s| {
            s.split(',')
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect()
        })
        .unwrap_or_default();
    let times: Vec<String> = info
        .get("times")
        .map(|s| {
            s.split(',')
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect()
        })
        .unwrap_or_default();
    if files.is_empty() {
        return Err(OutputError::EmptyRun);
    }

    let snap_list: Vec<String> = files
        .iter()
        .zip(&times)
        .map(|(f, t)| format!("(\"{f}\", {t})"))
        .collect();

    let mut py = String::new();
    py.push_str("#!/usr/bin/env python3\n");
    let _ = writeln!(py, "\"\"\"Figures for the `{scenario}` run in this directory.\"\"\"");
    py.push_str(
        "import csv\nimport math\nimport os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\nHERE = os.path.dirname(os.path.abspath(__file__))\n\n\ndef read_columns(name):\n    with open(os.path.join(HERE, name)) as fh:\n        rows = list(csv.reader(fh))\n    header, data = rows[0], [[float(v) for v in r] for r in rows[1:] if r]\n    return {h: [r[i] for r in data] for i, h in enumerate(header)}\n\n\n",
    );
    let _ = writeln!(py, "SNAPSHOTS = [{}]", snap_list.join(", "));
    py.push('\n');

    match layout.as_str() {
        "rest" => {
            py.push_str(
                "profile = read_columns(\"profile.csv\")\n\
                 fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))\n\
                 ax1.plot(profile[\"x\"], profile[\"r0\"], \"k-\")\n\
                 ax1.set_xlabel(\"x [m]\")\n\
                 ax1.set_ylabel(\"rest radius R0 [m]\")\n\
                 for name, t in SNAPSHOTS:\n\
                \x20    snap = read_columns(name)\n\
                \x20    ax2.plot(snap[\"x\"], snap[\"u\"], label=f\"t = {t} s\")\n\
                 ax2.set_xlabel(\"x [m]\")\n\
                 ax2.set_ylabel(\"velocity u [m/s]\")\n\
                 ax2.legend()\n",
            );
        }
        "riemann" => {
            py.push_str(
                "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))\n\
                 for name, t in SNAPSHOTS:\n\
                \x20    snap = read_columns(name)\n\
                \x20    ax1.plot(snap[\"x\"], snap[\"R\"], label=f\"t = {t} s\")\n\
                \x20    ax2.plot(snap[\"x\"], snap[\"Q\"], label=f\"t = {t} s\")\n\
                 ax1.set_xlabel(\"x [m]\")\n\
                 ax1.set_ylabel(\"radius R [m]\")\n\
                 ax2.set_xlabel(\"x [m]\")\n\
                 ax2.set_ylabel(\"flow rate Q [m^3/s]\")\n\
                 ax1.legend()\n\
                 ax2.legend()\n",
            );
        }
        "reflection" => {
            py.push_str(
                "profile = read_columns(\"profile.csv\")\n\
                 fig, ax = plt.subplots(figsize=(8, 4.5))\n\
                 for name, t in SNAPSHOTS:\n\
                \x20    snap = read_columns(name)\n\
                \x20    dr = [r - r0 for r, r0 in zip(snap[\"R\"], profile[\"r0\"])]\n\
                \x20    ax.plot(snap[\"x\"], dr, label=f\"t = {t} s\")\n\
                 ax.set_xlabel(\"x [m]\")\n\
                 ax.set_ylabel(\"R - R0 [m]\")\n",
            );
            if let (Some(re), Some(tr), Some(inc)) =
                (info.get("re"), info.get("tr"), info.get("incident"))
            {
                let _ = writeln!(
                    py,
                    "ax.axhline({re} * {inc}, ls=\"--\", c=\"gray\", label=\"reflection level\")\n\
                     ax.axhline({tr} * {inc}, ls=\":\", c=\"gray\", label=\"transmission level\")"
                );
            }
            py.push_str("ax.legend()\n");
        }
        "overlay" => {
            py.push_str(
                "fig, ax = plt.subplots(figsize=(8, 4.5))\n\
                 xmax = 0.0\n\
                 for name, t in SNAPSHOTS:\n\
                \x20    snap = read_columns(name)\n\
                \x20    ax.plot(snap[\"x\"], snap[\"u\"], label=f\"t = {t} s\")\n\
                \x20    xmax = max(xmax, max(snap[\"x\"]))\n\
                 ax.set_xlabel(\"x [m]\")\n\
                 ax.set_ylabel(\"velocity u [m/s]\")\n",
            );
            if let (Some(amp), Some(eps_f), Some(tc), Some(c0)) = (
                info.get("amp"),
                info.get("eps_f"),
                info.get("tc"),
                info.get("c0"),
            ) {
                let _ = writeln!(
                    py,
                    "xs = [xmax * i / 400.0 for i in range(401)]\n\
                     env = [{amp} * math.exp(-{eps_f} * x / (2.0 * {tc} * {c0})) for x in xs]\n\
                     ax.plot(xs, env, \"k:\", label=\"exponential envelope\")"
                );
            } else if let Some(amp) = info.get("amp") {
                let _ = writeln!(
                    py,
                    "ax.axhline({amp}, ls=\":\", c=\"k\", label=\"pure-wave amplitude\")"
                );
            }
            if let Some(asym) = info.get("asymptote") {
                let _ = writeln!(
                    py,
                    "ref = read_columns(\"{asym}\")\n\
                     ax.plot(ref[\"x\"], ref[\"u\"], \"k--\", label=\"heat-kernel solution\")"
                );
            }
            py.push_str("ax.legend()\n");
        }
        other => {
            return Err(OutputError::BadRunInfo(format!("unknown layout `{other}`")));
        }
    }
    let _ = writeln!(py, "\nout = os.path.join(HERE, \"{scenario}.png\")");
    py.push_str("fig.tight_layout()\nfig.savefig(out, dpi=150)\nprint(f\"wrote {out}\")\n");

    let path = dir.join("plot.py");
    std::fs::write(&path, py)?;
    Ok(path)
}
