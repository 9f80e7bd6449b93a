//! Spatial convergence of the flux reconstruction operator on pure linear
//! advection: one period of a sine wave, L-infinity error against the exact
//! translated profile, orders p + 1.

use frbgk::fr::{advect_rhs, build_basis, Mesh1D, ScalarBc};

fn run(p: usize, ne: usize) -> f64 {
    let basis = build_basis(p).unwrap();
    let mesh = Mesh1D::uniform(0.0, 1.0, ne).unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;
    let ns = p + 1;
    let n = ne * ns;
    let mut f: Vec<f64> = (0..ne)
        .flat_map(|k| {
            (0..ns)
                .map(|i| (two_pi * mesh.node_x(k, i, &basis)).sin())
                .collect::<Vec<_>>()
        })
        .collect();
    let dt = mesh.h_min / 25.0;
    let mut t = 0.0;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut stage = vec![0.0; n];
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        advect_rhs(&f, 1.0, &mesh, &basis, &ScalarBc::Periodic, &mut k1).unwrap();
        for i in 0..n {
            stage[i] = f[i] + 0.5 * step * k1[i];
        }
        advect_rhs(&stage, 1.0, &mesh, &basis, &ScalarBc::Periodic, &mut k2).unwrap();
        for i in 0..n {
            stage[i] = f[i] + 0.5 * step * k2[i];
        }
        advect_rhs(&stage, 1.0, &mesh, &basis, &ScalarBc::Periodic, &mut k3).unwrap();
        for i in 0..n {
            stage[i] = f[i] + step * k3[i];
        }
        advect_rhs(&stage, 1.0, &mesh, &basis, &ScalarBc::Periodic, &mut k4).unwrap();
        for i in 0..n {
            f[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += step;
    }
    let mut linf = 0.0f64;
    for k in 0..ne {
        for i in 0..ns {
            let x = mesh.node_x(k, i, &basis);
            linf = linf.max((f[k * ns + i] - (two_pi * x).sin()).abs());
        }
    }
    linf
}

fn main() {
    println!("{:>4} {:>6} {:>14} {:>8}", "p", "N_e", "Linf error", "order");
    for p in 1..=4 {
        let mut prev: Option<f64> = None;
        for ne in [4usize, 8, 16, 32] {
            let err = run(p, ne);
            let order = prev
                .map(|e| format!("{:.2}", (e / err).ln() / 2.0f64.ln()))
                .unwrap_or_else(|| "-".into());
            println!("{p:>4} {ne:>6} {err:>14.3e} {order:>8}");
            prev = Some(err);
        }
        println!();
    }
}
