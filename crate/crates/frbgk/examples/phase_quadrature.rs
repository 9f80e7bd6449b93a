//! Velocity-grid construction and quadrature quality: weight sums against
//! ball volumes and discrete Maxwellian moments against the analytic values.

use frbgk::phase::{
    build_internal_energy_grid, build_velocity_grid, compute_k, MomentOperator,
};

fn main() {
    // disk and ball measures
    let r_max = 2.0;
    println!("weight sums vs ball volumes (r_max = {r_max}):");
    let disk = build_velocity_grid(2, 8, 16, 1, r_max, [0.0; 3]).unwrap();
    let area: f64 = disk.weights.iter().sum();
    println!(
        "  m = 2: {:.12}  (pi r^2 = {:.12})",
        area,
        std::f64::consts::PI * r_max * r_max
    );
    for n_psi in [2, 4, 8, 16, 32] {
        let ball = build_velocity_grid(3, 8, 16, n_psi, r_max, [0.0; 3]).unwrap();
        let vol: f64 = ball.weights.iter().sum();
        println!(
            "  m = 3, N_psi = {n_psi:>2}: {:.10}  (4/3 pi r^3 = {:.10})",
            vol,
            4.0 / 3.0 * std::f64::consts::PI * r_max.powi(3)
        );
    }

    // moments of an analytic 1D Maxwellian on grids sized by the extent rule
    let (rho, u0, theta): (f64, f64, f64) = (1.0, 0.5, 0.8);
    let gamma: f64 = 3.0;
    let cs = (gamma * theta).sqrt();
    let k = compute_k(1e-15, gamma).unwrap();
    println!("\ndiscrete Maxwellian moments, r_max = k c_s with k = {k:.3}:");
    println!("{:>6} {:>14} {:>14} {:>14}", "N_v", "|d rho|", "|d mom|", "|d E|");
    for n_v in [8, 16, 32, 64, 128] {
        let vel = build_velocity_grid(1, n_v, 1, 1, k * cs, [u0, 0.0, 0.0]).unwrap();
        let zeta = build_internal_energy_grid(0.0, 1, 0.0).unwrap();
        let op = MomentOperator::new(&vel, &zeta);
        let f: Vec<f64> = vel
            .nodes
            .iter()
            .map(|n| {
                let du = n[0] - u0;
                rho / (2.0 * std::f64::consts::PI * theta).sqrt()
                    * (-du * du / (2.0 * theta)).exp()
            })
            .collect();
        let q = op.moments(&f).unwrap();
        println!(
            "{n_v:>6} {:>14.3e} {:>14.3e} {:>14.3e}",
            (q.rho - rho).abs(),
            (q.mom - rho * u0).abs(),
            (q.energy - rho * (0.5 * u0 * u0 + 0.5 * theta)).abs()
        );
    }
}
