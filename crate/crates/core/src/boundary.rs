//! Ghost-cell boundary conditions: homogeneous Neumann (non-reflecting)
//! ends, and a prescribed inflow discharge with the inlet area recovered by
//! matching the outgoing characteristic.
//!
//! The Riemann invariants of the system are `u +- 4c` (the factor 4 instead
//! of shallow water's 2 because `c` scales as `A^(1/4)`). At a subcritical
//! inlet the outgoing invariant is `W = u - 4c`; the ghost area solves
//! `Q_in / A - 4 c(A) = W` so that the prescribed discharge enters without
//! disturbing the outgoing wave.

use thiserror::Error;

use crate::geometry::ArteryProfile;
use crate::state::{celerity, PhysicalParams, State};

/// Number of ghost cells on each side. The first-order stencil needs one;
/// the second is kept so a higher-order reconstruction can slot in without
/// interface changes.
pub const GHOST: usize = 2;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error(
        "inlet characteristic matching did not converge in {iterations} iterations \
         (residual {residual:.3e}, target {target:.3e})"
    )]
    InletMatchDiverged {
        iterations: usize,
        residual: f64,
        target: f64,
    },
    #[error("inlet matching needs a subcritical first cell (u = {u}, c = {c})")]
    SupercriticalInlet { u: f64, c: f64 },
}

/// Inlet treatment; the outlet is always homogeneous Neumann.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InletBoundary {
    /// Copy-out ghost cells; non-reflecting at rest.
    Neumann,
    /// Half-sine discharge pulse `Q_in(t) = qc sin(2 pi t / tc)` for
    /// `t <= tc / 2`, zero afterwards.
    Inflow { qc: f64, tc: f64 },
}

/// Boundary specification of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub left: InletBoundary,
}

impl BoundarySpec {
    pub fn neumann() -> Self {
        Self {
            left: InletBoundary::Neumann,
        }
    }

    pub fn inflow(qc: f64, tc: f64) -> Self {
        assert!(tc > 0.0, "inflow period must be positive");
        Self {
            left: InletBoundary::Inflow { qc, tc },
        }
    }
}

/// Prescribed inflow discharge [m^3/s]: a single half-sine of amplitude
/// `qc` and period `tc`, closing at exactly `t = tc / 2` with value zero
/// (the Heaviside convention `H(0) = 1` keeps the closure continuous).
pub fn inflow_discharge(t: f64, qc: f64, tc: f64) -> f64 {
    if t < 0.0 || t > 0.5 * tc {
        0.0
    } else {
        qc * (2.0 * std::f64::consts::PI * t / tc).sin()
    }
}

/// Ghost area at the inlet: the root of
/// `Q_in / A - 4 c(A) = u1 - 4 c(A1)`, found by Newton iteration from `A1`
/// with a bisection fallback on `[A1/4, 4 A1]`.
pub fn inlet_match(q_in: f64, a1: f64, u1: f64, k1: f64, rho: f64) -> Result<f64, BoundaryError> {
    assert!(a1 > 0.0, "inlet matching needs a positive first-cell area");
    let c1 = celerity(a1, k1, rho);
    if u1.abs() >= c1 {
        return Err(BoundaryError::SupercriticalInlet { u: u1, c: c1 });
    }
    let w = u1 - 4.0 * c1;
    let target = 1e-12 * w.abs();
    let residual = |a: f64| q_in / a - 4.0 * celerity(a, k1, rho) - w;

    // trivial fixed point: nothing enters and nothing flows
    if q_in == 0.0 && u1 == 0.0 {
        return Ok(a1);
    }

    let mut a = a1;
    for _ in 0..50 {
        let g = residual(a);
        if g.abs() <= target {
            return Ok(a);
        }
        // g'(A) = -Q_in/A^2 - c(A)/A
        let slope = -q_in / (a * a) - celerity(a, k1, rho) / a;
        let next = a - g / slope;
        if !(next > 0.0) || !next.is_finite() {
            break;
        }
        a = next;
    }
    if residual(a).abs() <= target {
        return Ok(a);
    }

    // bisection fallback; the residual is strictly decreasing in A for
    // Q_in >= 0, so a sign change over the bracket pins the root
    let mut lo = a1 / 4.0;
    let mut hi = 4.0 * a1;
    let (mut g_lo, g_hi) = (residual(lo), residual(hi));
    if g_lo.is_nan() || g_hi.is_nan() || g_lo.signum() == g_hi.signum() {
        return Err(BoundaryError::InletMatchDiverged {
            iterations: 50,
            residual: residual(a).abs(),
            target,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = residual(mid);
        if g_mid.abs() <= target {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Err(BoundaryError::InletMatchDiverged {
        iterations: 250,
        residual: residual(0.5 * (lo + hi)).abs(),
        target,
    })
}

/// Interior state extended by [`GHOST`] cells on each side, together with
/// the profile values the reconstruction needs. Ghost profile entries copy
/// the adjacent interior cell, so boundary interfaces see no geometry jump.
#[derive(Debug, Clone)]
pub struct GhostState {
    pub a: Vec<f64>,
    pub q: Vec<f64>,
    pub k: Vec<f64>,
    pub a0_bold: Vec<f64>,
}

impl GhostState {
    /// Total extended length, interior plus `2 * GHOST`.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Fill the ghost cells for the state at time `t`.
pub fn fill_ghosts(
    state: &State,
    spec: &BoundarySpec,
    profile: &ArteryProfile,
    params: &PhysicalParams,
    t: f64,
) -> Result<GhostState, BoundaryError> {
    let j = state.cells();
    let n = j + 2 * GHOST;
    let mut g = GhostState {
        a: vec![0.0; n],
        q: vec![0.0; n],
        k: vec![0.0; n],
        a0_bold: vec![0.0; n],
    };
    g.a[GHOST..GHOST + j].copy_from_slice(&state.a);
    g.q[GHOST..GHOST + j].copy_from_slice(&state.q);
    g.k[GHOST..GHOST + j].copy_from_slice(profile.k());
    g.a0_bold[GHOST..GHOST + j].copy_from_slice(profile.a0_bold());

    let (a_ghost, q_ghost) = match spec.left {
        InletBoundary::Neumann => (state.a[0], state.q[0]),
        InletBoundary::Inflow { qc, tc } => {
            let q_in = inflow_discharge(t, qc, tc);
            let u1 = state.q[0] / state.a[0];
            let a = inlet_match(q_in, state.a[0], u1, profile.k()[0], params.rho)?;
            (a, q_in)
        }
    };
    for i in 0..GHOST {
        g.a[i] = a_ghost;
        g.q[i] = q_ghost;
        g.k[i] = profile.k()[0];
        g.a0_bold[i] = profile.a0_bold()[0];
    }
    for i in 0..GHOST {
        g.a[GHOST + j + i] = state.a[j - 1];
        g.q[GHOST + j + i] = state.q[j - 1];
        g.k[GHOST + j + i] = profile.k()[j - 1];
        g.a0_bold[GHOST + j + i] = profile.a0_bold()[j - 1];
    }
    Ok(g)
}
