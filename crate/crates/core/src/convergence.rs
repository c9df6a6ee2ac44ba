//! Grid-convergence harness: run a scenario on a ladder of cell counts,
//! measure the relative L1 error against the matching analytic solution at
//! `t_end`, and report the observed order between consecutive grids.

use thiserror::Error;

use crate::boundary::InletBoundary;
use crate::geometry::ProfileSpec;
use crate::oracles::{
    dalembert_solution, heat_kernel_solution, viscous_envelope, OracleError, RiemannSolution,
};
use crate::scenario::{
    run_scenario, InitialCondition, ProfileSource, RunFailure, ScenarioConfig, ScenarioError,
};
use crate::state::moens_korteweg;

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error("scenario `{0}` has no analytic solution to converge against")]
    MissingOracle(String),
    #[error("convergence needs a uniform vessel, got a varying profile")]
    NonUniformProfile,
    #[error("run on {cells} cells failed: {failure}")]
    RunFailed { cells: usize, failure: RunFailure },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Which analytic solution a scenario can be compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceOracle {
    /// Exact two-wave Riemann solution.
    Tourniquet,
    /// Pure translation of the inflow pulse.
    Dalembert,
    /// Translated pulse under the exponential friction envelope.
    Viscous,
    /// Heat-kernel diffusion of the inflow pulse.
    Viscoelastic,
}

/// Pick the oracle from the scenario structure: a tourniquet initial
/// condition, or a rest + inflow run on a uniform vessel with friction
/// and/or wall viscoelasticity.
pub fn oracle_for(cfg: &ScenarioConfig) -> Option<ConvergenceOracle> {
    match (&cfg.initial, &cfg.boundary.left) {
        (InitialCondition::Tourniquet { .. }, _) => Some(ConvergenceOracle::Tourniquet),
        (InitialCondition::Rest, InletBoundary::Inflow { .. }) => {
            match (cfg.params.cf > 0.0, cfg.params.cv > 0.0) {
                (false, false) => Some(ConvergenceOracle::Dalembert),
                (true, false) => Some(ConvergenceOracle::Viscous),
                (false, true) => Some(ConvergenceOracle::Viscoelastic),
                (true, true) => None,
            }
        }
        _ => None,
    }
}

/// One row of the error table.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub cells: usize,
    /// Relative L1 error of the area.
    pub error_a: f64,
    /// Relative L1 error of the discharge.
    pub error_q: f64,
    /// Observed order against the previous row, `ln(e_prev/e) / ln(J/J_prev)`.
    pub order_a: Option<f64>,
    pub order_q: Option<f64>,
}

fn uniform_vessel(cfg: &ScenarioConfig) -> Result<(f64, f64), ConvergenceError> {
    match &cfg.profile {
        ProfileSource::Spec(ProfileSpec::Uniform { r0, k }) => Ok((*r0, *k)),
        _ => Err(ConvergenceError::NonUniformProfile),
    }
}

fn reference_solution(
    cfg: &ScenarioConfig,
    oracle: ConvergenceOracle,
    x: &[f64],
    t: f64,
) -> Result<(Vec<f64>, Vec<f64>), ConvergenceError> {
    match oracle {
        ConvergenceOracle::Tourniquet => {
            let (_, k) = uniform_vessel(cfg)?;
            let (a_left, a_right) = match cfg.initial {
                InitialCondition::Tourniquet { a_left, a_right } => (a_left, a_right),
                _ => unreachable!("oracle selection checked the initial condition"),
            };
            let sol = RiemannSolution::solve(a_left, a_right, k, cfg.params.rho)?;
            // the diaphragm sits at the domain midpoint
            let mid = cfg.grid.x_left() + 0.5 * cfg.grid.length();
            let mut a = Vec::with_capacity(x.len());
            let mut q = Vec::with_capacity(x.len());
            for &xi in x {
                let (ai, qi) = sol.evaluate(xi - mid, t);
                a.push(ai);
                q.push(qi);
            }
            Ok((a, q))
        }
        ConvergenceOracle::Dalembert | ConvergenceOracle::Viscous => {
            let (r0, k) = uniform_vessel(cfg)?;
            let (qc, tc) = match cfg.boundary.left {
                InletBoundary::Inflow { qc, tc } => (qc, tc),
                _ => unreachable!(),
            };
            let a0 = std::f64::consts::PI * r0 * r0;
            let c0 = moens_korteweg(k, r0, cfg.params.rho);
            let eps_f = tc * cfg.params.cf / a0;
            let mut a = Vec::with_capacity(x.len());
            let mut q = Vec::with_capacity(x.len());
            for &xi in x {
                let (da, dq) = dalembert_solution(qc, tc, c0, xi, t);
                let env = if oracle == ConvergenceOracle::Viscous {
                    viscous_envelope(eps_f, xi, tc, c0)
                } else {
                    1.0
                };
                a.push(a0 + da * env);
                q.push(dq * env);
            }
            Ok((a, q))
        }
        ConvergenceOracle::Viscoelastic => {
            let (r0, k) = uniform_vessel(cfg)?;
            let (qc, tc) = match cfg.boundary.left {
                InletBoundary::Inflow { qc, tc } => (qc, tc),
                _ => unreachable!(),
            };
            let a0 = std::f64::consts::PI * r0 * r0;
            let c0 = moens_korteweg(k, r0, cfg.params.rho);
            let width = c0 * tc / 2.0;
            let n = 4096;
            let xi_in: Vec<f64> = (0..n)
                .map(|i| -width + width * i as f64 / (n - 1) as f64)
                .collect();
            let q0: Vec<f64> = xi_in
                .iter()
                .map(|&xi| crate::boundary::inflow_discharge(-xi / c0, qc, tc))
                .collect();
            let tau = cfg.params.cv / (c0 * c0 * tc) * t;
            let xi_out: Vec<f64> = x.iter().map(|&xi| xi - c0 * t).collect();
            let q = heat_kernel_solution(&xi_in, &q0, tau, c0, tc, &xi_out)?;
            let a = q.iter().map(|&qi| a0 + qi / c0).collect();
            Ok((a, q))
        }
    }
}

fn l1_relative(numeric: &[f64], exact: &[f64]) -> f64 {
    let err: f64 = numeric
        .iter()
        .zip(exact)
        .map(|(n, e)| (n - e).abs())
        .sum();
    let norm: f64 = exact.iter().map(|e| e.abs()).sum();
    if norm > 0.0 {
        err / norm
    } else {
        err
    }
}

/// Run the scenario on each cell count and tabulate errors and observed
/// orders. Deterministic: identical inputs give identical tables.
pub fn convergence_study(
    cfg: &ScenarioConfig,
    cells: &[usize],
) -> Result<Vec<ConvergenceRow>, ConvergenceError> {
    let oracle =
        oracle_for(cfg).ok_or_else(|| ConvergenceError::MissingOracle(cfg.name.clone()))?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cells.len());
    for &j in cells {
        let mut run_cfg = cfg.clone().with_cells(j);
        run_cfg.snapshots = vec![run_cfg.t_end];
        let out = run_scenario(&run_cfg)?;
        if let Some(failure) = out.failure {
            return Err(ConvergenceError::RunFailed { cells: j, failure });
        }
        let snap = out.snapshots.last().expect("final snapshot");
        let (a_exact, q_exact) = reference_solution(cfg, oracle, &snap.x, run_cfg.t_end)?;
        let error_a = l1_relative(&snap.a, &a_exact);
        let error_q = l1_relative(&snap.q, &q_exact);
        let (order_a, order_q) = match rows.last() {
            Some(prev) => {
                let ratio = (j as f64 / prev.cells as f64).ln();
                (
                    Some((prev.error_a / error_a).ln() / ratio),
                    Some((prev.error_q / error_q).ln() / ratio),
                )
            }
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            cells: j,
            error_a,
            error_q,
            order_a,
            order_q,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn oracle_selection() {
        assert_eq!(
            oracle_for(&presets::tourniquet()),
            Some(ConvergenceOracle::Tourniquet)
        );
        assert_eq!(
            oracle_for(&presets::dalembert()),
            Some(ConvergenceOracle::Dalembert)
        );
        assert_eq!(
            oracle_for(&presets::viscous_damping()),
            Some(ConvergenceOracle::Viscous)
        );
        assert_eq!(
            oracle_for(&presets::viscoelastic()),
            Some(ConvergenceOracle::Viscoelastic)
        );
        assert_eq!(oracle_for(&presets::dead_man()), None);
        assert_eq!(oracle_for(&presets::constriction()), None);
        assert!(matches!(
            convergence_study(&presets::dead_man(), &[10]),
            Err(ConvergenceError::MissingOracle(_))
        ));
    }

    #[test]
    fn tourniquet_errors_shrink_with_resolution() {
        let rows = convergence_study(&presets::tourniquet(), &[50, 100, 200]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].error_a > rows[1].error_a);
        assert!(rows[1].error_a > rows[2].error_a);
        // coarse-grid error is already small: the scheme resolves the
        // Riemann fan well
        assert!(rows[1].error_a < 0.05);
        for row in &rows[1..] {
            let order = row.order_a.unwrap();
            assert!(order > 0.3 && order < 1.6, "order {order}");
        }
    }

    #[test]
    fn identical_cell_counts_give_identical_errors() {
        let a = convergence_study(&presets::tourniquet(), &[64]).unwrap();
        let b = convergence_study(&presets::tourniquet(), &[64]).unwrap();
        assert_eq!(a[0].error_a.to_bits(), b[0].error_a.to_bits());
        assert_eq!(a[0].error_q.to_bits(), b[0].error_q.to_bits());
    }
}
