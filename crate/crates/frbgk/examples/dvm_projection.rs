//! The discrete velocity model at work: Newton projection onto the modified
//! Maxwellian whose discrete moments match the macroscopic state exactly.
//!
//! Prints the compatibility residual against iteration count and contrasts
//! the discrete moment error of the unmodified (continuous-parameter)
//! Maxwellian with the projected one on a coarse grid.

use frbgk::dvm::{alpha_from_macro, eval_equilibrium, newton_project};
use frbgk::phase::{
    build_internal_energy_grid, build_velocity_grid, compute_k, compute_zeta_max, PhaseSpace,
};
use frbgk::state::{gamma_from_dof, Primitive};

fn main() {
    // polyatomic state on a deliberately coarse grid
    let delta = 4.0;
    let gamma = gamma_from_dof(1, delta);
    let prim = Primitive::new(1.0, 0.5, 1.0);
    let q = prim.to_conserved(gamma);

    let r_max = compute_k(1e-15, gamma).unwrap() * prim.sound_speed(gamma);
    let zeta_max = compute_zeta_max(delta, 1e-6, prim.theta()).unwrap();
    let vel = build_velocity_grid(1, 16, 1, 1, r_max, [prim.u, 0.0, 0.0]).unwrap();
    let zeta = build_internal_energy_grid(delta, 16, zeta_max).unwrap();
    let phase = PhaseSpace::new(vel, zeta);

    println!("state: rho = {}, U = {}, P = {} (delta = {delta}, gamma = {gamma:.3})", prim.rho, prim.u, prim.p);
    println!("grid: N_v = 16, N_zeta = 16, r_max = {r_max:.3}, zeta_max = {zeta_max:.3}\n");

    println!("{:>6} {:>16}", "iters", "rel residual");
    for iters in 0..=5 {
        let (_, res) = newton_project(&q, &phase, iters).unwrap();
        println!("{iters:>6} {res:>16.3e}");
    }

    // moment error of the unmodified Maxwellian vs the projected one
    let alpha0 = alpha_from_macro(&q, 1, delta).unwrap();
    let g0 = eval_equilibrium(&alpha0, &phase);
    let m0 = phase.mom.moments(&g0.values).unwrap();
    let (alpha2, _) = newton_project(&q, &phase, 2).unwrap();
    let g2 = eval_equilibrium(&alpha2, &phase);
    let m2 = phase.mom.moments(&g2.values).unwrap();
    println!("\nmass moment error:");
    println!("  unmodified Maxwellian: {:.3e}", (m0.rho - q.rho).abs());
    println!("  after 2 Newton steps:  {:.3e}", (m2.rho - q.rho).abs());
    println!(
        "\nmodified parameters: amplitude {:.6} -> {:.6}, 1/(2 theta) {:.6} -> {:.6}, mean {:.6} -> {:.6}",
        alpha0.amplitude, alpha2.amplitude, alpha0.inv_width, alpha2.inv_width, alpha0.mean, alpha2.mean
    );
}
