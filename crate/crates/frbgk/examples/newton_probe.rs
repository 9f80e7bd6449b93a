use frbgk::config::{CaseKind, Config};
use frbgk::diagnostics::sample_nodal_field;
use frbgk::runner::{build_setup, node_primitives};

fn pulse_cfg(p: usize, ne: usize, cfl: f64) -> Config {
    Config {
        case: CaseKind::Pulse,
        p,
        n_elements: ne,
        n_v: Some(128),
        delta: Some(0.0),
        kn: Some(1e-2),
        t_final: Some(1.0),
        cfl,
        ..Config::default()
    }
}

fn run(cfg: &Config) -> (Vec<f64>, Vec<f64>, frbgk::fr::Mesh1D, frbgk::fr::FrBasis) {
    let mut setup = build_setup(cfg).unwrap();
    setup.solver.run(&mut setup.field, setup.t_final, None).unwrap();
    let prims = node_primitives(&setup.solver, &setup.field).unwrap();
    (
        prims.iter().map(|q| q.rho).collect(),
        setup.solver.node_coords(),
        setup.solver.mesh,
        setup.solver.basis,
    )
}

fn main() {
    let (ref_rho, _, ref_mesh, ref_basis) = run(&pulse_cfg(5, 100, 0.5));
    println!("reference done");
    for p in [2usize, 3, 5] {
        for ne in [4usize, 8, 12, 16, 20] {
            let (rho, xs, _, _) = run(&pulse_cfg(p, ne, 0.5));
            let mut linf = 0.0f64;
            for (x, r) in xs.iter().zip(&rho) {
                let rr = sample_nodal_field(&ref_rho, &ref_mesh, &ref_basis, *x);
                linf = linf.max((r - rr).abs());
            }
            println!("P{p} ne={ne}: linf = {linf:.4e}");
        }
    }
    // dt sensitivity at P3/N12
    let (a, xs, _, _) = run(&pulse_cfg(3, 12, 0.5));
    let (b, _, _, _) = run(&pulse_cfg(3, 12, 0.25));
    let (c, _, _, _) = run(&pulse_cfg(3, 12, 0.125));
    let mut d_ab = 0.0f64;
    let mut d_bc = 0.0f64;
    for i in 0..a.len() {
        d_ab = d_ab.max((a[i] - b[i]).abs());
        d_bc = d_bc.max((b[i] - c[i]).abs());
    }
    let _ = xs;
    println!("P3 ne=12 |cfl0.5 - cfl0.25| = {d_ab:.3e}, |cfl0.25 - cfl0.125| = {d_bc:.3e}");
}
