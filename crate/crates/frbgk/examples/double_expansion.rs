//! Double expansion wave (the 123 problem): near-vacuum center region as a
//! stress test of positivity and entropy behavior, with the optional
//! tanh-smoothed initial velocity that removes the center energy spike.

use frbgk::config::{CaseKind, Config};
use frbgk::diagnostics::l1_error;
use frbgk::euler::exact_riemann;
use frbgk::runner::{build_setup, node_primitives};
use frbgk::Primitive;

fn run(smooth: bool) -> (f64, f64, f64) {
    let ne = 100;
    let cfg = Config {
        case: CaseKind::Expansion,
        p: 3,
        n_elements: ne,
        n_v: Some(32),
        n_zeta: Some(32),
        kn: Some(1e-3),
        smooth_ic: smooth,
        t_final: Some(0.15),
        ..Config::default()
    };
    let mut setup = build_setup(&cfg).expect("setup");
    setup
        .solver
        .run(&mut setup.field, setup.t_final, None)
        .expect("run");
    let prims = node_primitives(&setup.solver, &setup.field).expect("moments");
    let xs = setup.solver.node_coords();

    let gamma = setup.gamma;
    let exact = exact_riemann(
        &Primitive::new(1.0, -2.0, 0.4),
        &Primitive::new(1.0, 2.0, 0.4),
        gamma,
    )
    .unwrap();
    let rho: Vec<f64> = prims.iter().map(|q| q.rho).collect();
    let rho_exact: Vec<f64> = xs.iter().map(|x| exact.sample((x - 0.5) / 0.15).rho).collect();
    let l1 = l1_error(&rho, &rho_exact, &setup.solver.mesh, &setup.solver.basis);
    let min_rho = rho.iter().cloned().fold(f64::INFINITY, f64::min);

    // center internal-energy overshoot against the exact star value
    let e_exact = exact.sample(0.0).specific_internal_energy(gamma);
    let mut e_max: f64 = f64::NEG_INFINITY;
    for (x, q) in xs.iter().zip(&prims) {
        if *x >= 0.46 && *x <= 0.54 {
            e_max = e_max.max(q.specific_internal_energy(gamma));
        }
    }
    (l1, min_rho, e_max - e_exact)
}

fn main() {
    let exact = exact_riemann(
        &Primitive::new(1.0, -2.0, 0.4),
        &Primitive::new(1.0, 2.0, 0.4),
        1.4,
    )
    .unwrap();
    println!(
        "exact center state at t = 0.15: rho = {:.4}, e = {:.4}",
        exact.sample(0.0).rho,
        exact.sample(0.0).specific_internal_energy(1.4)
    );
    for smooth in [false, true] {
        let (l1, min_rho, overshoot) = run(smooth);
        println!(
            "{} IC: density L1 error = {l1:.4}, min rho = {min_rho:.3e}, center energy overshoot = {overshoot:.4}",
            if smooth { "tanh-smoothed" } else { "discontinuous" }
        );
    }
}
