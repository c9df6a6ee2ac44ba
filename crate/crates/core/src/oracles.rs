//! Analytic and asymptotic reference solutions used by the validation and
//! acceptance suites: rest-state residuals, the exact two-wave solution of
//! the tourniquet Riemann problem, the pure-wave translation solution, the
//! viscous exponential envelope, the viscoelastic heat-kernel convolution,
//! and linear reflection/transmission coefficients.

use thiserror::Error;

use crate::geometry::ArteryProfile;
use crate::state::{celerity, pressure_flux_term, State};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("tourniquet data needs A_left >= A_right > 0, got {a_left} and {a_right}")]
    UnorderedStates { a_left: f64, a_right: f64 },
    #[error("root of the wave-matching equation is not bracketed")]
    RootNotBracketed,
    #[error("initial pulse is truncated at the grid boundary (|q0| = {end_value:.3e} at the end, peak {peak:.3e})")]
    TruncatedSupport { end_value: f64, peak: f64 },
    #[error("diffusion time must be positive, got tau = {0}")]
    NonPositiveTau(f64),
    #[error("grid and sample arrays must have equal length ({grid} vs {samples})")]
    LengthMismatch { grid: usize, samples: usize },
}

/// Rest-state diagnostics: `(max |u|, max deviation of k sqrt(A) - k sqrt(A0)
/// from its mean)` in SI units. Both vanish on an exact rest equilibrium.
pub fn rest_residual(state: &State, profile: &ArteryProfile) -> (f64, f64) {
    let j = state.cells();
    let max_u = (0..j).map(|i| state.velocity(i).abs()).fold(0.0, f64::max);
    let e: Vec<f64> = (0..j)
        .map(|i| profile.k()[i] * state.a[i].sqrt() - profile.a0_bold()[i])
        .collect();
    let mean = e.iter().sum::<f64>() / j as f64;
    let dev = e.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    (max_u, dev)
}

/// Waves of the tourniquet Riemann solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Rarefaction,
    Shock,
}

/// Exact self-similar solution of the Riemann problem with a dilated region
/// on the left, rest on the right (`A_left >= A_right`, `Q = 0` on both
/// sides): a left rarefaction and a right shock around an intermediate
/// plateau `(A_star, u_star)`.
#[derive(Debug, Clone)]
pub struct RiemannSolution {
    a_left: f64,
    a_right: f64,
    k: f64,
    rho: f64,
    /// Plateau area [m^2].
    pub a_star: f64,
    /// Plateau velocity [m/s].
    pub u_star: f64,
    /// Shock speed [m/s].
    pub shock_speed: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
}

impl RiemannSolution {
    /// Solve the wave-matching equation by bisection.
    ///
    /// The plateau area is the root of
    /// `phi(A) = 4 (c(A_left) - c(A)) - u_shock(A)` on `(A_right, A_left)`,
    /// where `u_shock` is the post-shock velocity from the mass and momentum
    /// jump conditions:
    /// `u_shock(A) = sqrt((P(A) - P(A_right)) (A - A_right) / (A A_right))`.
    pub fn solve(a_left: f64, a_right: f64, k: f64, rho: f64) -> Result<Self, OracleError> {
        if !(a_right > 0.0) || a_left < a_right {
            return Err(OracleError::UnorderedStates { a_left, a_right });
        }
        let c_left = celerity(a_left, k, rho);
        if a_left == a_right {
            // no waves; the degenerate shock moves at the characteristic speed
            return Ok(Self {
                a_left,
                a_right,
                k,
                rho,
                a_star: a_left,
                u_star: 0.0,
                shock_speed: celerity(a_right, k, rho),
                left_wave: WaveKind::Rarefaction,
                right_wave: WaveKind::Shock,
            });
        }
        let p_right = pressure_flux_term(a_right, k, rho);
        let u_shock = |a: f64| {
            ((pressure_flux_term(a, k, rho) - p_right) * (a - a_right) / (a * a_right)).sqrt()
        };
        let phi = |a: f64| 4.0 * (c_left - celerity(a, k, rho)) - u_shock(a);
        let (mut lo, mut hi) = (a_right, a_left);
        if phi(hi) > 0.0 {
            return Err(OracleError::RootNotBracketed);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a_star = 0.5 * (lo + hi);
        let u_star = 4.0 * (c_left - celerity(a_star, k, rho));
        let shock_speed = a_star * u_star / (a_star - a_right);
        Ok(Self {
            a_left,
            a_right,
            k,
            rho,
            a_star,
            u_star,
            shock_speed,
            left_wave: WaveKind::Rarefaction,
            right_wave: WaveKind::Shock,
        })
    }

    /// Sample `(A, Q)` at position `x` (diaphragm at `x = 0`) and time `t`.
    pub fn evaluate(&self, x: f64, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return if x <= 0.0 {
                (self.a_left, 0.0)
            } else {
                (self.a_right, 0.0)
            };
        }
        let xi = x / t;
        let c_left = celerity(self.a_left, self.k, self.rho);
        let c_star = celerity(self.a_star, self.k, self.rho);
        if xi <= -c_left {
            (self.a_left, 0.0)
        } else if xi < self.u_star - c_star {
            // inside the fan: u + 4c = 4 c_left and u - c = xi
            let c = (4.0 * c_left - xi) / 5.0;
            let u = 4.0 * (c_left - c);
            // c = sqrt(k / (2 rho sqrt(pi))) A^(1/4)
            let scale = (self.k / (2.0 * self.rho * std::f64::consts::PI.sqrt())).sqrt();
            let a = (c / scale).powi(4);
            (a, a * u)
        } else if xi < self.shock_speed {
            (self.a_star, self.a_star * self.u_star)
        } else {
            (self.a_right, 0.0)
        }
    }

    /// Maximum relative deviation of `u + 4c` from `4 c(A_left)` over the
    /// interior of the rarefaction fan.
    pub fn fan_invariant_residual(&self) -> f64 {
        let c_left = celerity(self.a_left, self.k, self.rho);
        let c_star = celerity(self.a_star, self.k, self.rho);
        let head = -c_left;
        let tail = self.u_star - c_star;
        let target = 4.0 * c_left;
        let mut worst: f64 = 0.0;
        let n = 64;
        for i in 1..n {
            let xi = head + (tail - head) * i as f64 / n as f64;
            let (a, q) = self.evaluate(xi, 1.0);
            let inv = q / a + 4.0 * celerity(a, self.k, self.rho);
            worst = worst.max((inv - target).abs() / target.abs());
        }
        worst
    }

    /// Relative Rankine-Hugoniot residual of the right shock, the larger of
    /// the mass and momentum components.
    pub fn rankine_hugoniot_residual(&self) -> f64 {
        let q_star = self.a_star * self.u_star;
        let s = self.shock_speed;
        let mass = s * (self.a_star - self.a_right) - q_star;
        let f2_star = q_star * q_star / self.a_star
            + pressure_flux_term(self.a_star, self.k, self.rho);
        let f2_right = pressure_flux_term(self.a_right, self.k, self.rho);
        let momentum = s * q_star - (f2_star - f2_right);
        let mass_scale = (s * self.a_star).abs().max(q_star.abs());
        let mom_scale = (s * q_star).abs().max(f2_star.abs());
        (mass / mass_scale)
            .abs()
            .max((momentum / mom_scale).abs())
    }
}

/// Convenience sampler for the tourniquet solution.
pub fn tourniquet_exact(
    a_left: f64,
    a_right: f64,
    k: f64,
    rho: f64,
    x: f64,
    t: f64,
) -> Result<(f64, f64), OracleError> {
    Ok(RiemannSolution::solve(a_left, a_right, k, rho)?.evaluate(x, t))
}

/// Pure-wave translation solution of the linearized system for the half-sine
/// inflow pulse: `Q(x, t) = Q_in(t - x / c0)` and the area perturbation
/// `A - A0 = Q / c0`. Zero ahead of the front and behind the tail.
pub fn dalembert_solution(qc: f64, tc: f64, c0: f64, x: f64, t: f64) -> (f64, f64) {
    let q = crate::boundary::inflow_discharge(t - x / c0, qc, tc);
    (q / c0, q)
}

/// Spatial attenuation factor of the damped pulse,
/// `exp(-eps_f x / (2 Tc c0))`.
pub fn viscous_envelope(eps_f: f64, x: f64, tc: f64, c0: f64) -> f64 {
    assert!(eps_f >= 0.0, "the damping parameter must be non-negative");
    (-eps_f * x / (2.0 * tc * c0)).exp()
}

/// Heat kernel of the slow-time diffusion problem,
/// `G(tau, xi) = exp(-xi^2 / (2 tau c0^2 Tc)) / sqrt(2 pi tau c0^2 Tc)`.
pub fn heat_kernel(tau: f64, xi: f64, c0: f64, tc: f64) -> f64 {
    assert!(tau > 0.0, "the diffusion time must be positive");
    let var = tau * c0 * c0 * tc;
    (-xi * xi / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Diffused pulse at slow time `tau`: trapezoid-rule convolution of the
/// sampled initial pulse with the heat kernel,
/// `q(tau, xi) = integral q0(eta) G(tau, xi - eta) d eta`.
///
/// The initial pulse must be compactly supported inside `xi_in`; a pulse
/// truncated at the grid boundary (end samples above `1e-8` of the peak) is
/// rejected, because the missing tail mass would silently bias the result.
pub fn heat_kernel_solution(
    xi_in: &[f64],
    q0: &[f64],
    tau: f64,
    c0: f64,
    tc: f64,
    xi_out: &[f64],
) -> Result<Vec<f64>, OracleError> {
    if xi_in.len() != q0.len() {
        return Err(OracleError::LengthMismatch {
            grid: xi_in.len(),
            samples: q0.len(),
        });
    }
    if !(tau > 0.0) {
        return Err(OracleError::NonPositiveTau(tau));
    }
    let peak = q0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let end_value = q0.first().copied().unwrap_or(0.0).abs().max(
        q0.last().copied().unwrap_or(0.0).abs(),
    );
    if peak > 0.0 && end_value > 1e-8 * peak {
        return Err(OracleError::TruncatedSupport { end_value, peak });
    }
    let n = xi_in.len();
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let left = if i > 0 { xi_in[i] - xi_in[i - 1] } else { 0.0 };
        let right = if i + 1 < n { xi_in[i + 1] - xi_in[i] } else { 0.0 };
        weights[i] = 0.5 * (left + right);
    }
    Ok(xi_out
        .iter()
        .map(|&xi| {
            crate::timestepper::compensated_sum(
                (0..n).map(|k| weights[k] * q0[k] * heat_kernel(tau, xi - xi_in[k], c0, tc)),
            )
        })
        .collect())
}

/// Linear reflection and transmission coefficients at an admittance jump,
/// with `Y = A0 / (rho c0)` on each side and the incident wave arriving from
/// the `p` (parent) side:
/// `R_e = (Y_p - Y_d) / (Y_p + Y_d)`, `T_r = 2 Y_p / (Y_p + Y_d)`.
///
/// The coefficients apply to the pressure-like wave amplitudes; with equal
/// stiffness on both sides the radius perturbation `R - R0` obeys the same
/// ratios.
pub fn reflection_transmission(
    a0_p: f64,
    k_p: f64,
    a0_d: f64,
    k_d: f64,
    rho: f64,
) -> (f64, f64) {
    let y_p = a0_p / (rho * celerity(a0_p, k_p, rho));
    let y_d = a0_d / (rho * celerity(a0_d, k_d, rho));
    ((y_p - y_d) / (y_p + y_d), 2.0 * y_p / (y_p + y_d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_profile, Grid, ProfileSpec};
    use std::f64::consts::PI;

    const RHO: f64 = 1060.0;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(a.abs()).max(1e-300)
    }

    #[test]
    fn rest_residual_vanishes_at_rest() {
        let grid = Grid::new(32, 0.14, 0.0).unwrap();
        let p = build_profile(
            &ProfileSpec::AneurysmBump {
                r0: 4.0e-3,
                delta_r: 1.0e-3,
                x1: 1.0e-2,
                x2: 3.05e-2,
                x3: 4.95e-2,
                x4: 7.0e-2,
                k: 4.0e8,
            },
            &grid,
        )
        .unwrap();
        let s = State::at_rest(&p);
        let (max_u, dev) = rest_residual(&s, &p);
        assert_eq!(max_u, 0.0);
        assert!(dev <= 1e-9, "deviation {dev}"); // k sqrt(A0) rounding only
    }

    fn tourniquet_52() -> RiemannSolution {
        let a_l = PI * 25.0e-6;
        let a_r = PI * 16.0e-6;
        RiemannSolution::solve(a_l, a_r, 1.0e7, RHO).unwrap()
    }

    #[test]
    fn tourniquet_frozen_plateau() {
        let sol = tourniquet_52();
        assert!(close(sol.a_star, 6.319991111748639e-5, 1e-12));
        assert!(close(sol.u_star, 1.027162493944612, 1e-12));
        assert!(close(sol.shock_speed, 5.018898014492251, 1e-12));
        assert_eq!(sol.left_wave, WaveKind::Rarefaction);
        assert_eq!(sol.right_wave, WaveKind::Shock);
        // plateau sits strictly between the outer states
        assert!(sol.a_star > PI * 16.0e-6 && sol.a_star < PI * 25.0e-6);
    }

    #[test]
    fn tourniquet_self_consistency() {
        let sol = tourniquet_52();
        assert!(sol.fan_invariant_residual() <= 1e-10);
        assert!(sol.rankine_hugoniot_residual() <= 1e-10);
    }

    #[test]
    fn tourniquet_outer_states_are_exact() {
        let sol = tourniquet_52();
        let t = 5.0e-3;
        let c_l = celerity(PI * 25.0e-6, 1.0e7, RHO);
        let (a, q) = sol.evaluate(-2.0 * c_l * t, t);
        assert_eq!((a, q), (PI * 25.0e-6, 0.0));
        let (a, q) = sol.evaluate(2.0 * sol.shock_speed * t, t);
        assert_eq!((a, q), (PI * 16.0e-6, 0.0));
        // plateau region
        let (a, q) = sol.evaluate(0.5 * (sol.u_star - celerity(sol.a_star, 1.0e7, RHO) + sol.shock_speed) * t, t);
        assert_eq!(a, sol.a_star);
        assert_eq!(q, sol.a_star * sol.u_star);
    }

    #[test]
    fn tourniquet_equal_states_is_constant() {
        let a = PI * 16.0e-6;
        let sol = RiemannSolution::solve(a, a, 1.0e7, RHO).unwrap();
        for x in [-0.02, 0.0, 0.015] {
            assert_eq!(sol.evaluate(x, 1.0e-3), (a, 0.0));
        }
    }

    #[test]
    fn tourniquet_rejects_reversed_data() {
        assert!(matches!(
            RiemannSolution::solve(1.0e-5, 2.0e-5, 1.0e7, RHO),
            Err(OracleError::UnorderedStates { .. })
        ));
    }

    #[test]
    fn dalembert_translation() {
        let (qc, tc) = (1.0e-6, 0.4);
        let c0 = 6.868028197434452;
        // nothing anywhere at t = 0 (for x > 0)
        for x in [0.1, 1.0, 2.9] {
            assert_eq!(dalembert_solution(qc, tc, c0, x, 0.0), (0.0, 0.0));
        }
        // peak sits at x = c0 (t - tc/4)
        let t = 0.3;
        let x_peak = c0 * (t - 0.25 * tc);
        let (a, q) = dalembert_solution(qc, tc, c0, x_peak, t);
        assert!(close(q, qc, 1e-12));
        assert!(close(a, qc / c0, 1e-12));
        // support is [c0 (t - tc/2), c0 t]
        let front = c0 * t;
        let rear = c0 * (t - 0.5 * tc);
        assert!(close(rear, 0.686802819743445, 1e-12));
        assert!(close(front, 2.0604084592303353, 1e-12));
        assert_eq!(dalembert_solution(qc, tc, c0, front + 1e-6, t).1, 0.0);
        assert_eq!(dalembert_solution(qc, tc, c0, rear - 1e-6, t).1, 0.0);
        assert!(dalembert_solution(qc, tc, c0, 0.5 * (front + rear), t).1 > 0.0);
    }

    #[test]
    fn envelope_values() {
        assert_eq!(viscous_envelope(0.53, 0.0, 0.4, 6.868), 1.0);
        let x = 2.0 * 0.4 * 6.868 / 0.53;
        assert!(close(viscous_envelope(0.53, x, 0.4, 6.868), (-1.0f64).exp(), 1e-13));
    }

    #[test]
    fn heat_kernel_normalizes() {
        let c0 = 6.868028197434452;
        let tc = 0.4;
        let tau = 8.3e-2 * 0.4;
        let sigma = f64::sqrt(tau * c0 * c0 * tc);
        let n = 4001;
        let mut total = 0.0;
        let h = 16.0 * sigma / (n - 1) as f64;
        for i in 0..n {
            let xi = -8.0 * sigma + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            total += w * heat_kernel(tau, xi, c0, tc) * h;
        }
        assert!((total - 1.0).abs() <= 1e-10, "kernel mass {total}");
    }

    #[test]
    fn heat_kernel_solution_small_tau_limit() {
        let c0 = 6.868028197434452;
        let tc = 0.4;
        // half-sine pulse on a fine padded grid; the input resolution keeps
        // the narrow kernel resolved (sigma spans a few input cells)
        let n = 20001;
        let (lo, hi) = (-2.0, 0.5);
        let xi: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let width = c0 * tc / 2.0;
        let pulse = |x: f64| {
            if (-width..=0.0).contains(&x) {
                (PI * (-x) / width).sin()
            } else {
                0.0
            }
        };
        let q0: Vec<f64> = xi.iter().map(|&x| pulse(x)).collect();
        let tiny = 1.0e-8;
        let xi_out: Vec<f64> = xi.iter().copied().step_by(100).collect();
        let out = heat_kernel_solution(&xi, &q0, tiny, c0, tc, &xi_out).unwrap();
        let worst = xi_out
            .iter()
            .zip(&out)
            .map(|(&x, &v)| (v - pulse(x)).abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-3, "tau -> 0 limit off by {worst}");
    }

    #[test]
    fn heat_kernel_solution_conserves_mass_on_padded_grid() {
        let c0 = 6.868028197434452;
        let tc = 0.4;
        let tau = 8.3e-2 * 0.4;
        let sigma = f64::sqrt(tau * c0 * c0 * tc);
        let width = c0 * tc / 2.0;
        let pad = 7.0 * sigma;
        let n = 3001;
        let (lo, hi) = (-width - pad, pad);
        let xi: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let q0: Vec<f64> = xi
            .iter()
            .map(|&x| {
                if (-width..=0.0).contains(&x) {
                    (PI * (-x) / width).sin()
                } else {
                    0.0
                }
            })
            .collect();
        let h = (hi - lo) / (n - 1) as f64;
        let out = heat_kernel_solution(&xi, &q0, tau, c0, tc, &xi).unwrap();
        let mass_in: f64 = q0.iter().sum::<f64>() * h;
        let mass_out: f64 = out.iter().sum::<f64>() * h;
        assert!(
            (mass_out - mass_in).abs() <= 1e-8 * mass_in.abs(),
            "{mass_in} -> {mass_out}"
        );
    }

    #[test]
    fn heat_kernel_solution_rejects_truncated_pulse() {
        let xi = [0.0, 1.0, 2.0];
        let q0 = [1.0, 0.5, 0.0]; // nonzero at the left end
        assert!(matches!(
            heat_kernel_solution(&xi, &q0, 0.1, 1.0, 1.0, &xi),
            Err(OracleError::TruncatedSupport { .. })
        ));
    }

    #[test]
    fn reflection_identical_sides() {
        let (re, tr) = reflection_transmission(PI * 16.0e-6, 1.0e8, PI * 16.0e-6, 1.0e8, RHO);
        assert_eq!(re, 0.0);
        assert_eq!(tr, 1.0);
    }

    #[test]
    fn reflection_constriction_values() {
        // parent radius 5e-3 (= r_r + delta_r), daughter 4e-3, k = 1e8 both
        let (re, tr) =
            reflection_transmission(PI * 25.0e-6, 1.0e8, PI * 16.0e-6, 1.0e8, RHO);
        assert!(close(re, 0.16581248852486602, 1e-12));
        assert!(close(tr, 1.165812488524866, 1e-12));
        // the two coefficients are linked: T_r = 1 + R_e
        assert!(close(tr, 1.0 + re, 1e-14));
    }

    #[test]
    fn step_down_in_admittance_amplifies_transmission() {
        let mut x = 0.7071f64;
        let mut next = move || {
            x = (x * 9301.0 + 49297.0) % 233280.0 / 233280.0;
            x
        };
        for _ in 0..100 {
            let a0_p = 1.0e-5 + 1.0e-4 * next();
            let k_p = 1.0e6 + 1.0e8 * next();
            let y_p = a0_p / (RHO * celerity(a0_p, k_p, RHO));
            // construct a daughter with strictly smaller admittance
            let a0_d = a0_p * (0.2 + 0.6 * next());
            let k_d = k_p * (1.0 + next());
            let y_d = a0_d / (RHO * celerity(a0_d, k_d, RHO));
            if y_d >= y_p {
                continue;
            }
            let (re, tr) = reflection_transmission(a0_p, k_p, a0_d, k_d, RHO);
            assert!(tr > 1.0 && re > 0.0 && re < 1.0);
        }
    }
}
