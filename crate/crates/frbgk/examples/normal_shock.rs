//! Normal shock structure in an argon-like gas with a power-law collision
//! time: converges to a steady profile, reports the inverse thickness ratio
//! lambda_L / Delta, and extracts distribution slices across the shock.
//!
//! Runs to steady state (residual < 1e-5) by default; pass a Mach number to
//! change the strength, e.g. `cargo run --release --example normal_shock 9.0`.

use std::path::Path;

use frbgk::config::{CaseKind, Config};
use frbgk::diagnostics::{extract_fu, shock_thickness, FarStates};
use frbgk::runner::{build_setup, node_primitives};

fn main() {
    let mach: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("Mach number"))
        .unwrap_or(3.8);
    let cfg = Config {
        case: CaseKind::NormalShock,
        p: 3,
        n_elements: 100,
        n_v: Some(32),
        n_zeta: Some(32),
        mach: Some(mach),
        t_final: Some(100.0),
        fu_locations: vec![-25.0, 0.0, 25.0],
        ..Config::default()
    };
    let mut setup = build_setup(&cfg).expect("setup");
    let (q_l, q_r) = setup.far_states;
    println!(
        "M = {mach}: upstream [rho u P] = [{} {:.4} {}], downstream = [{:.4} {:.4} {:.4}]",
        q_l.rho, q_l.u, q_l.p, q_r.rho, q_r.u, q_r.p
    );
    let log = setup
        .solver
        .run_steady(&mut setup.field, setup.t_final, Some(10.0), 1e-5)
        .expect("run");
    println!(
        "steady after {} steps (t = {:.1}), residual {:.3e}",
        log.steps,
        log.rows.last().unwrap().t,
        log.final_residual
    );

    let prims = node_primitives(&setup.solver, &setup.field).expect("moments");
    let rho: Vec<f64> = prims.iter().map(|q| q.rho).collect();
    let delta = shock_thickness(
        &rho,
        &setup.solver.mesh,
        &setup.solver.basis,
        FarStates::Imposed {
            rho_left: q_l.rho,
            rho_right: q_r.rho,
        },
    )
    .expect("thickness");
    println!(
        "shock thickness Delta = {delta:.4}, inverse thickness ratio lambda_L/Delta = {:.4}",
        setup.kn_ctx.lambda / delta
    );

    let out = Path::new("out_normal_shock");
    std::fs::create_dir_all(out).unwrap();
    let xs = setup.solver.node_coords();
    frbgk::output::write_profile(&out.join("profile.csv"), &xs, &prims, setup.gamma).unwrap();
    for (label, x) in [("upstream", -25.0), ("shock", 0.0), ("downstream", 25.0)] {
        let (u, f_u) = extract_fu(
            &setup.field,
            x,
            &setup.solver.mesh,
            &setup.solver.basis,
            &setup.solver.phase,
        );
        frbgk::output::write_fu(&out.join(format!("fu_{label}.csv")), &u, &f_u).unwrap();
    }
    println!("wrote {}", out.display());
}
