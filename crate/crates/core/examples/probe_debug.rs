// temporary debugging probe: criterion-7 protocol variants
use artery1d::oracles::heat_kernel_solution;
use artery1d::scenario::{presets, run_scenario};
use artery1d::state::moens_korteweg;

fn sup_in(
    x: &[f64],
    u_num: &[f64],
    u_ref: &[f64],
    lo: f64,
    hi: f64,
) -> f64 {
    x.iter()
        .enumerate()
        .filter(|(_, &xi)| (lo..=hi).contains(&xi))
        .map(|(i, _)| (u_num[i] - u_ref[i]).abs())
        .fold(0.0f64, f64::max)
}

fn main() {
    let rho = 1060.0;
    let mut cfg = presets::viscoelastic();
    cfg.snapshots = vec![0.2, 0.4];
    cfg.t_end = 0.4;
    let out = run_scenario(&cfg).unwrap();
    let mid = &out.snapshots[0];
    let snap = &out.snapshots[1];

    let a0 = std::f64::consts::PI * 1.0e-4;
    let c0 = moens_korteweg(1.0e7, 1.0e-2, rho);
    let (qc, tc) = (1.0e-6, 0.4);
    let width = c0 * tc / 2.0;
    let eps_nu = cfg.params.cv / (c0 * c0 * tc);
    let u_num: Vec<f64> = snap.u.clone();
    let peak = u_num.iter().cloned().fold(0.0f64, f64::max);
    let xi_out: Vec<f64> = snap.x.iter().map(|&x| x - c0 * snap.t).collect();

    // pure-wave initial pulse
    let n = 4096;
    let xi_in: Vec<f64> = (0..n)
        .map(|i| -width + width * i as f64 / (n - 1) as f64)
        .collect();
    let q0: Vec<f64> = xi_in
        .iter()
        .map(|&xi| artery1d::boundary::inflow_discharge(-xi / c0, qc, tc))
        .collect();

    for (label, tau) in [
        ("P0 tau = eps*t", eps_nu * snap.t),
        ("P1 tau = eps*(t - Tc/4)", eps_nu * (snap.t - 0.25 * tc)),
    ] {
        let q_ref = heat_kernel_solution(&xi_in, &q0, tau, c0, tc, &xi_out).unwrap();
        let u_ref: Vec<f64> = q_ref.iter().map(|q| q / a0).collect();
        let full = sup_in(&snap.x, &u_num, &u_ref, 0.0, 3.0);
        let cut = sup_in(&snap.x, &u_num, &u_ref, 0.0, 2.6);
        println!(
            "{label}: sup full = {:.2}% of peak, sup x<=2.6 = {:.2}%",
            100.0 * full / peak,
            100.0 * cut / peak
        );
    }

    // P3: restart from the numerical state at t0 = 0.2
    let t0 = mid.t;
    let xi_mid: Vec<f64> = mid.x.iter().map(|&x| x - c0 * t0).collect();
    let q_mid: Vec<f64> = mid.q.clone();
    // q at the domain ends should be tiny; report
    println!(
        "restart pulse end values: {:.2e} (left) {:.2e} (right), peak {:.2e}",
        q_mid.first().unwrap(),
        q_mid.last().unwrap(),
        q_mid.iter().cloned().fold(0.0f64, f64::max)
    );
    let tau = eps_nu * (snap.t - t0);
    match heat_kernel_solution(&xi_mid, &q_mid, tau, c0, tc, &xi_out) {
        Ok(q_ref) => {
            let u_ref: Vec<f64> = q_ref.iter().map(|q| q / a0).collect();
            let full = sup_in(&snap.x, &u_num, &u_ref, 0.0, 3.0);
            let cut = sup_in(&snap.x, &u_num, &u_ref, 0.0, 2.6);
            println!(
                "P3 restart at t0=0.2: sup full = {:.2}% of peak, sup x<=2.6 = {:.2}%",
                100.0 * full / peak,
                100.0 * cut / peak
            );
        }
        Err(e) => println!("P3 failed: {e}"),
    }
}
