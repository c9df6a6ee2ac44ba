//! Conservative state, the physical flux and pressure terms, the
//! eigenstructure of the system, and the CFL time-step bound.
//!
//! All quantities are SI. The nonlinear celerity is
//! `c = sqrt(k sqrt(A) / (2 rho sqrt(pi)))`; for `A = pi R0^2` it reduces to
//! the Moens-Korteweg speed `c0 = sqrt(k R0 / (2 rho))`.

use crate::geometry::ArteryProfile;

const SQRT_PI: f64 = 1.7724538509055159;

/// Conservative variables on the interior cells at one time level.
#[derive(Debug, Clone)]
pub struct State {
    /// Cross-section area per cell [m^2]. Must stay positive.
    pub a: Vec<f64>,
    /// Discharge per cell [m^3/s].
    pub q: Vec<f64>,
    /// Current time [s].
    pub t: f64,
}

impl State {
    pub fn new(a: Vec<f64>, q: Vec<f64>) -> Self {
        assert_eq!(a.len(), q.len(), "A and Q must have the same length");
        assert!(a.iter().all(|&v| v > 0.0), "initial area must be positive");
        assert!(q.iter().all(|v| v.is_finite()), "initial discharge must be finite");
        Self { a, q, t: 0.0 }
    }

    /// Rest state `A = A0, Q = 0` for the given profile.
    pub fn at_rest(profile: &ArteryProfile) -> Self {
        Self::new(profile.a0().to_vec(), vec![0.0; profile.a0().len()])
    }

    pub fn cells(&self) -> usize {
        self.a.len()
    }

    /// Velocity in cell `i` [m/s].
    pub fn velocity(&self, i: usize) -> f64 {
        self.q[i] / self.a[i]
    }
}

/// Physical constants of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Blood density [kg/m^3].
    pub rho: f64,
    /// Friction coefficient [m^2/s].
    pub cf: f64,
    /// Viscoelastic (Kelvin-Voigt) coefficient [m^2/s].
    pub cv: f64,
    /// Reference pressure [Pa]; enters diagnostics only.
    pub p0: f64,
}

impl PhysicalParams {
    pub fn new(rho: f64, cf: f64, cv: f64, p0: f64) -> Self {
        assert!(rho > 0.0, "density must be positive");
        assert!(cf >= 0.0 && cv >= 0.0, "friction coefficients must be non-negative");
        Self { rho, cf, cv, p0 }
    }

    /// Frictionless, inviscid wall, zero reference pressure.
    pub fn inviscid(rho: f64) -> Self {
        Self::new(rho, 0.0, 0.0, 0.0)
    }
}

/// Wave celerity `c = sqrt(k sqrt(A) / (2 rho sqrt(pi)))` [m/s].
pub fn celerity(a: f64, k: f64, rho: f64) -> f64 {
    assert!(a > 0.0, "celerity needs a positive area, got A = {a}");
    assert!(k > 0.0 && rho > 0.0, "celerity needs positive k and rho");
    (k * a.sqrt() / (2.0 * rho * SQRT_PI)).sqrt()
}

/// Moens-Korteweg celerity `c0 = sqrt(k R0 / (2 rho))` [m/s], the linear
/// pulse-wave speed of a vessel at rest.
pub fn moens_korteweg(k: f64, r0: f64, rho: f64) -> f64 {
    assert!(k > 0.0 && r0 > 0.0 && rho > 0.0, "moens_korteweg needs positive inputs");
    (k * r0 / (2.0 * rho)).sqrt()
}

/// Pressure term of the momentum flux, `k A^(3/2) / (3 rho sqrt(pi))`
/// [m^3/s^2].
pub fn pressure_flux_term(a: f64, k: f64, rho: f64) -> f64 {
    debug_assert!(a >= 0.0);
    k * a * a.sqrt() / (3.0 * rho * SQRT_PI)
}

/// Physical flux `(Q, Q^2/A + P(A, k))`.
pub fn physical_flux(a: f64, q: f64, k: f64, rho: f64) -> (f64, f64) {
    assert!(a > 0.0, "physical_flux needs a positive area, got A = {a}");
    (q, q * q / a + pressure_flux_term(a, k, rho))
}

/// Eigenvalues `(u - c, u + c)` of the flux Jacobian.
pub fn eigenvalues(a: f64, q: f64, k: f64, rho: f64) -> (f64, f64) {
    let c = celerity(a, k, rho);
    let u = q / a;
    (u - c, u + c)
}

/// CFL-limited time step `dt = n_cfl dx / max_i(|u_i| + c_i)` [s].
pub fn cfl_dt(
    state: &State,
    profile: &ArteryProfile,
    params: &PhysicalParams,
    dx: f64,
    n_cfl: f64,
) -> f64 {
    assert!(n_cfl > 0.0 && n_cfl <= 1.0, "n_cfl must lie in (0, 1]");
    let mut speed: f64 = 0.0;
    for i in 0..state.cells() {
        let c = celerity(state.a[i], profile.k()[i], params.rho);
        let u = state.q[i] / state.a[i];
        speed = speed.max(u.abs() + c);
    }
    n_cfl * dx / speed
}

/// Elastic tube-law pressure `p = P0 + k (sqrt(A) - sqrt(A0)) / sqrt(pi)`
/// [Pa]; diagnostic output only, the solver works in conservative form.
pub fn elastic_pressure(a: f64, a0: f64, k: f64, p0: f64) -> f64 {
    debug_assert!(a >= 0.0 && a0 > 0.0);
    p0 + k * (a.sqrt() - a0.sqrt()) / SQRT_PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_profile, Grid, ProfileSpec};
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(a.abs()).max(1e-300)
    }

    #[test]
    fn celerity_reference_value() {
        // A = pi (1e-2)^2, k = 1e7, rho = 1060 -> sqrt(1e5 / 2120)
        let c = celerity(PI * 1.0e-4, 1.0e7, 1060.0);
        assert!(close(c, 6.868028197434452, 1e-14));
    }

    #[test]
    fn celerity_quartic_scaling() {
        let c = celerity(PI * 1.0e-4, 1.0e7, 1060.0);
        let c16 = celerity(16.0 * PI * 1.0e-4, 1.0e7, 1060.0);
        assert!(close(c16, 2.0 * c, 1e-14));
    }

    #[test]
    #[should_panic(expected = "positive area")]
    fn celerity_rejects_zero_area() {
        celerity(0.0, 1.0e7, 1060.0);
    }

    #[test]
    fn moens_korteweg_matches_celerity_at_rest() {
        for (k, r0) in [(1.0e7, 1.0e-2), (4.0e8, 4.0e-3), (1.0e8, 5.0e-3)] {
            let c0 = moens_korteweg(k, r0, 1060.0);
            let c = celerity(PI * r0 * r0, k, 1060.0);
            assert!(close(c, c0, 1e-14), "k={k}, r0={r0}: {c} vs {c0}");
        }
        // k quadrupled doubles c0
        let c0 = moens_korteweg(1.0e7, 1.0e-2, 1060.0);
        assert!(close(moens_korteweg(4.0e7, 1.0e-2, 1060.0), 2.0 * c0, 1e-14));
    }

    #[test]
    fn pressure_flux_reference_values() {
        assert_eq!(pressure_flux_term(0.0, 1.0e7, 1060.0), 0.0);
        // normalization: k = 3 rho sqrt(pi), A = 1 -> P = 1
        let k = 3.0 * 1060.0 * PI.sqrt();
        assert!(close(pressure_flux_term(1.0, k, 1060.0), 1.0, 1e-14));
        // frozen value for k = 1e7, A = pi * 16e-6, rho = 1060
        let p = pressure_flux_term(PI * 16.0e-6, 1.0e7, 1060.0);
        assert!(close(p, 6.322702195903986e-4, 1e-13));
    }

    #[test]
    fn pressure_flux_monotone_in_area() {
        // strictly increasing in A at Q = 0, checked on a log-spaced grid
        let mut prev = 0.0;
        for i in 0..60 {
            let a = 1.0e-6 * 10f64.powf(i as f64 * 0.05);
            let p = pressure_flux_term(a, 1.0e7, 1060.0);
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn flux_components() {
        // Q = 0: pure pressure flux
        let (f1, f2) = physical_flux(2.0e-5, 0.0, 1.0e7, 1060.0);
        assert_eq!(f1, 0.0);
        assert_eq!(f2, pressure_flux_term(2.0e-5, 1.0e7, 1060.0));
        // pressureless momentum: A=1, Q=2, k -> 0 limit via tiny k
        let (f1, f2) = physical_flux(1.0, 2.0, 1e-300, 1060.0);
        assert_eq!(f1, 2.0);
        assert!(close(f2, 4.0, 1e-12));
    }

    #[test]
    fn eigenvalues_structure() {
        let (a, k, rho) = (PI * 1.0e-4, 1.0e7, 1060.0);
        let c = celerity(a, k, rho);
        let (l1, l2) = eigenvalues(a, 0.0, k, rho);
        assert_eq!(l1, -c);
        assert_eq!(l2, c);
        // subcritical: l1 < 0 < l2
        let (l1, l2) = eigenvalues(a, 0.5 * c * a, k, rho);
        assert!(l1 < 0.0 && l2 > 0.0);
        // critical point u = c
        let (l1, _) = eigenvalues(a, c * a, k, rho);
        assert!(l1.abs() <= 1e-15 * c);
        // real and distinct whenever A > 0
        for exp in -8..0 {
            let a = 10f64.powi(exp);
            let (l1, l2) = eigenvalues(a, 1e-6, k, rho);
            assert!(l1 < l2);
        }
    }

    #[test]
    fn cfl_reference_value() {
        let grid = Grid::new(1500, 3.0, 0.0).unwrap();
        let profile =
            build_profile(&ProfileSpec::Uniform { r0: 1.0e-2, k: 1.0e7 }, &grid).unwrap();
        let state = State::at_rest(&profile);
        let params = PhysicalParams::inviscid(1060.0);
        let dt = cfl_dt(&state, &profile, &params, grid.dx(), 1.0);
        assert!(close(dt, 2.9120439557122073e-4, 1e-13));
        // halving dx halves dt
        let grid2 = Grid::new(3000, 3.0, 0.0).unwrap();
        let profile2 =
            build_profile(&ProfileSpec::Uniform { r0: 1.0e-2, k: 1.0e7 }, &grid2).unwrap();
        let state2 = State::at_rest(&profile2);
        let dt2 = cfl_dt(&state2, &profile2, &params, grid2.dx(), 1.0);
        assert!(close(dt2, 0.5 * dt, 1e-13));
    }

    #[test]
    fn elastic_pressure_properties() {
        // A = A0 -> p = P0
        assert_eq!(elastic_pressure(2.0e-5, 2.0e-5, 1.0e7, 9000.0), 9000.0);
        // unit construction: P0=0, k=sqrt(pi), A=4, A0=1 -> p = 1
        assert!(close(elastic_pressure(4.0, 1.0, PI.sqrt(), 0.0), 1.0, 1e-14));
        // collapse gives sub-reference pressure
        assert!(elastic_pressure(1.0e-5, 2.0e-5, 1.0e7, 0.0) < 0.0);
    }
}
