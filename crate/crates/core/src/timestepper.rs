//! One full time step: the CFL-limited well-balanced convective update, the
//! semi-implicit friction correction, and the split Crank-Nicolson
//! viscoelastic diffusion step.
//!
//! The splitting order is convective -> friction -> viscoelastic (first
//! order). The parabolic substep reuses the hyperbolic time step;
//! Crank-Nicolson is unconditionally stable so no extra restriction is
//! needed.

use thiserror::Error;

use crate::boundary::{fill_ghosts, BoundaryError, BoundarySpec, GHOST};
use crate::geometry::ArteryProfile;
use crate::riemann::hll_flux;
use crate::state::{cfl_dt, pressure_flux_term, PhysicalParams, State};
use crate::wellbalanced::{centered_source, hydrostatic_reconstruct};

#[derive(Debug, Error)]
pub enum StepError {
    #[error("area became non-positive in cell {cell} at t = {time:.9} s (A = {area:.6e})")]
    Positivity { cell: usize, time: f64, area: f64 },
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

/// Treatment of the geometric source term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceMode {
    /// Hydrostatic reconstruction with well-balanced flux corrections.
    Hsr,
    /// Naive centered discretization; the comparison baseline.
    Centered,
}

impl std::fmt::Display for SourceMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourceMode::Hsr => write!(f, "hsr"),
            SourceMode::Centered => write!(f, "centered"),
        }
    }
}

/// Scheme configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub source_mode: SourceMode,
    /// Courant number in (0, 1]; the classic choice is 1.
    pub n_cfl: f64,
    pub enable_friction: bool,
    pub enable_viscoelastic: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            source_mode: SourceMode::Hsr,
            n_cfl: 1.0,
            enable_friction: false,
            enable_viscoelastic: false,
        }
    }
}

/// Mass fluxes through the two domain boundaries during one step.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryMassFlux {
    /// `F1` at the left boundary interface (positive into the domain).
    pub left: f64,
    /// `F1` at the right boundary interface (positive out of the domain).
    pub right: f64,
}

/// Bookkeeping returned by [`advance`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AdvanceReport {
    pub steps: u64,
    /// Time-integrated net boundary mass inflow, `sum dt (F1_left - F1_right)`
    /// [m^3]. Exactly balances the change of `sum A dx` up to rounding.
    pub boundary_mass_net: f64,
}

/// Compensated (Kahan) summation.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// One explicit convective step of size `dt`.
///
/// In [`SourceMode::Hsr`] each cell is updated with the left/right-corrected
/// fluxes built from the hydrostatic reconstruction, the HLL flux and the
/// pressure corrections; in [`SourceMode::Centered`] the HLL flux acts on
/// the raw cell values and the centered source is added explicitly. Does not
/// advance `state.t`; boundary data is evaluated at the current time.
pub fn convective_step(
    state: &mut State,
    profile: &ArteryProfile,
    params: &PhysicalParams,
    cfg: &SchemeConfig,
    dt: f64,
    boundary: &BoundarySpec,
) -> Result<BoundaryMassFlux, StepError> {
    let j = state.cells();
    let dx = profile.grid().dx();
    let rho = params.rho;
    let g = fill_ghosts(state, boundary, profile, params, state.t)?;

    // interface m sits between extended cells (m + GHOST - 1, m + GHOST),
    // i.e. between interior cells m-1 and m; m runs over 0..=j
    let n_if = j + 1;
    let mut f1 = vec![0.0; n_if];
    let mut f2 = vec![0.0; n_if];
    // pressure terms of the reconstructed interface states (HSR mode)
    let mut p_left = vec![0.0; n_if];
    let mut p_right = vec![0.0; n_if];

    for m in 0..n_if {
        let il = m + GHOST - 1;
        let ir = m + GHOST;
        let u_l = if g.a[il] > 0.0 { g.q[il] / g.a[il] } else { 0.0 };
        let u_r = if g.a[ir] > 0.0 { g.q[ir] / g.a[ir] } else { 0.0 };
        match cfg.source_mode {
            SourceMode::Hsr => {
                let rec = hydrostatic_reconstruct(
                    g.a[il],
                    u_l,
                    g.k[il],
                    g.a0_bold[il],
                    g.a[ir],
                    u_r,
                    g.k[ir],
                    g.a0_bold[ir],
                );
                let (a, b) = hll_flux(
                    rec.a_left,
                    rec.a_left * rec.u_left,
                    rec.a_right,
                    rec.a_right * rec.u_right,
                    rec.k_star,
                    rho,
                );
                f1[m] = a;
                f2[m] = b;
                p_left[m] = pressure_flux_term(rec.a_left, rec.k_star, rho);
                p_right[m] = pressure_flux_term(rec.a_right, rec.k_star, rho);
            }
            SourceMode::Centered => {
                let k_star = g.k[il].max(g.k[ir]);
                let (a, b) = hll_flux(g.a[il], g.q[il], g.a[ir], g.q[ir], k_star, rho);
                f1[m] = a;
                f2[m] = b;
            }
        }
    }

    let lam = dt / dx;
    let mut new_a = vec![0.0; j];
    let mut new_q = vec![0.0; j];
    for i in 0..j {
        let a_new = state.a[i] - lam * (f1[i + 1] - f1[i]);
        let q_new = match cfg.source_mode {
            SourceMode::Hsr => {
                let p_cell = pressure_flux_term(state.a[i], profile.k()[i], rho);
                // corrected fluxes F_{i+1/2,L} and F_{i-1/2,R}
                let f_right = f2[i + 1] + (p_cell - p_left[i + 1]);
                let f_left = f2[i] + (p_cell - p_right[i]);
                state.q[i] - lam * (f_right - f_left)
            }
            SourceMode::Centered => {
                state.q[i] - lam * (f2[i + 1] - f2[i])
                    + dt * centered_source(profile, state, rho, dx, i)
            }
        };
        if !(a_new > 0.0) {
            return Err(StepError::Positivity {
                cell: i,
                time: state.t + dt,
                area: a_new,
            });
        }
        new_a[i] = a_new;
        new_q[i] = q_new;
    }
    state.a = new_a;
    state.q = new_q;
    Ok(BoundaryMassFlux {
        left: f1[0],
        right: f1[j],
    })
}

/// Semi-implicit friction correction: per cell
/// `u_new = A u / (A + Cf dt)`, `Q_new = A u_new`, with the area unchanged.
/// A rest state (`u = 0`) passes through exactly.
pub fn friction_correct(state: &mut State, params: &PhysicalParams, dt: f64) {
    if params.cf == 0.0 {
        return;
    }
    for i in 0..state.cells() {
        let a = state.a[i];
        let u = state.q[i] / a;
        let u_new = a * u / (a + params.cf * dt);
        state.q[i] = a * u_new;
    }
}

/// Crank-Nicolson step for the split diffusion problem `dQ/dt = Cv d2Q/dx2`
/// with homogeneous Neumann ends:
/// `(I - lambda/2 L) Q_new = (I + lambda/2 L) Q`, `lambda = Cv dt / dx^2`,
/// `L` the second difference with reflecting end rows. The area is
/// untouched, and `sum Q` is conserved exactly by construction.
pub fn viscoelastic_step(state: &mut State, params: &PhysicalParams, dt: f64, dx: f64) {
    if params.cv == 0.0 || dt == 0.0 {
        return;
    }
    let j = state.cells();
    if j == 1 {
        return; // L = 0 on a single cell
    }
    let lam = params.cv * dt / (dx * dx);
    let half = 0.5 * lam;

    // rhs = (I + lambda/2 L) q
    let q = &state.q;
    let mut rhs = vec![0.0; j];
    rhs[0] = q[0] + half * (q[1] - q[0]);
    for i in 1..j - 1 {
        rhs[i] = q[i] + half * (q[i - 1] - 2.0 * q[i] + q[i + 1]);
    }
    rhs[j - 1] = q[j - 1] + half * (q[j - 2] - q[j - 1]);

    // tridiagonal (I - lambda/2 L): end rows (1 + lambda/2, -lambda/2),
    // interior rows (-lambda/2, 1 + lambda, -lambda/2); every row is
    // diagonally dominant with margin 1 as long as lambda >= 0
    debug_assert!(lam >= 0.0);
    let lower = vec![-half; j - 1];
    let upper = vec![-half; j - 1];
    let mut diag = vec![1.0 + lam; j];
    diag[0] = 1.0 + half;
    diag[j - 1] = 1.0 + half;

    state.q = solve_tridiagonal(&lower, &diag, &upper, &rhs);
}

/// Thomas algorithm for a tridiagonal system; `lower` and `upper` have
/// length `n - 1`.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(n >= 1 && lower.len() == n - 1 && upper.len() == n - 1 && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper.first().copied().unwrap_or(0.0) / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c[i - 1];
        assert!(m != 0.0, "tridiagonal solve breakdown at row {i}");
        if i < n - 1 {
            c[i] = upper[i] / m;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let xi = x[i] - c[i] * x[i + 1];
        x[i] = xi;
    }
    x
}

/// Advance the state to `t_end` with CFL-limited steps, applying the enabled
/// substeps in the order convective -> friction -> viscoelastic. The final
/// step shrinks to land exactly on `t_end`.
pub fn advance(
    state: &mut State,
    profile: &ArteryProfile,
    params: &PhysicalParams,
    cfg: &SchemeConfig,
    boundary: &BoundarySpec,
    t_end: f64,
) -> Result<AdvanceReport, StepError> {
    assert!(t_end >= state.t, "cannot advance backwards in time");
    let dx = profile.grid().dx();
    let mut steps = 0u64;
    let mut net = 0.0;
    let mut comp = 0.0;
    loop {
        let remaining = t_end - state.t;
        if remaining <= 0.0 {
            break;
        }
        let dt_cfl = cfl_dt(state, profile, params, dx, cfg.n_cfl);
        let dt = if dt_cfl < remaining { dt_cfl } else { remaining };
        let flux = convective_step(state, profile, params, cfg, dt, boundary)?;
        if cfg.enable_friction {
            friction_correct(state, params, dt);
        }
        if cfg.enable_viscoelastic {
            viscoelastic_step(state, params, dt, dx);
        }
        // Kahan-compensated accumulation of the boundary mass integral
        let y = dt * (flux.left - flux.right) - comp;
        let t = net + y;
        comp = (t - net) - y;
        net = t;
        if dt == remaining {
            state.t = t_end;
        } else {
            state.t += dt;
        }
        steps += 1;
    }
    Ok(AdvanceReport {
        steps,
        boundary_mass_net: net,
    })
}
