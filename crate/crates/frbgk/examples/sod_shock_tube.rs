//! Sod shock tube at the kinetic resolution limit Kn_h = 1/10, compared
//! against the exact Euler solution. Writes CSV artifacts to ./out_sod.

use std::path::Path;

use frbgk::config::{CaseKind, Config};
use frbgk::euler::exact_riemann;
use frbgk::runner::{build_setup, node_primitives};
use frbgk::Primitive;

fn main() {
    let cfg = Config {
        case: CaseKind::Sod,
        p: 3,
        n_elements: 50,
        n_v: Some(16),
        n_zeta: Some(16),
        kn_h: Some(0.1),
        t_final: Some(0.2),
        output_interval: Some(0.05),
        ..Config::default()
    };
    let mut setup = build_setup(&cfg).expect("setup");
    println!(
        "Kn = {:.3e}, mean free path = {:.3e}, Kn_h = {:.3}",
        setup.kn_ctx.kn, setup.kn_ctx.lambda, setup.kn_ctx.kn_h
    );
    let log = setup
        .solver
        .run(&mut setup.field, setup.t_final, setup.output_interval)
        .expect("run");
    let prims = node_primitives(&setup.solver, &setup.field).expect("moments");
    let xs = setup.solver.node_coords();

    // exact reference at t = 0.2
    let exact = exact_riemann(
        &Primitive::new(1.0, 0.0, 1.0),
        &Primitive::new(0.125, 0.0, 0.1),
        1.4,
    )
    .unwrap();
    let t = 0.2;
    let mut linf = 0.0f64;
    for (x, q) in xs.iter().zip(&prims) {
        let r = exact.sample((x - 0.5) / t).rho;
        linf = linf.max((q.rho - r).abs());
    }
    println!("steps: {}", log.steps);
    println!("Linf density error vs exact Euler: {linf:.4}");
    println!(
        "exact waves at t = 0.2: contact x = {:.4}, shock x = {:.4}, post-shock rho = {:.5}",
        0.5 + exact.contact_speed() * t,
        0.5 + exact.right_shock_speed().unwrap() * t,
        exact.density_star_right()
    );
    println!(
        "mass error: {:.3e}, min f: {:.3e}",
        log.rows.last().unwrap().mass_err,
        log.rows.last().unwrap().min_f
    );

    let out = Path::new("out_sod");
    std::fs::create_dir_all(out).unwrap();
    frbgk::output::write_profile(&out.join("profile.csv"), &xs, &prims, setup.gamma).unwrap();
    frbgk::output::write_timeseries(&out.join("timeseries.csv"), &log.rows).unwrap();
    println!("wrote {}", out.display());
}
