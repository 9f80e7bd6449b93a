//! Acceptance suite: one test per quantitative criterion, each printing a
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! (single-threaded output: add `--test-threads=1`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use frbgk::dvm;
use frbgk::fr::{advect_rhs, build_basis, Mesh1D, ScalarBc};
use frbgk::limiter::{element_mean, squeeze};
use frbgk::phase::{build_internal_energy_grid, build_velocity_grid, compute_k, PhaseSpace};
use frbgk::solver::{BcKind, BoundarySpec, CollisionModel, RkWorkspace, Solver};
use frbgk::state::{gamma_from_dof, Primitive};
use frbgk::validate::{self, SuiteReport};

fn report_and_assert(criterion: usize, label: &str, report: SuiteReport) {
    print!("{}", report.render());
    let ok = report.passed();
    println!(
        "acceptance criterion {criterion} ({label}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(
        ok,
        "criterion {criterion} ({label}) failed:\n{}",
        report.render()
    );
}

#[test]
fn criterion_1_zeta_table() {
    report_and_assert(1, "zeta_max table", validate::zeta_table());
}

#[test]
fn criterion_2_spatial_convergence_orders() {
    report_and_assert(
        2,
        "smooth pulse spatial convergence",
        validate::pulse_convergence().unwrap(),
    );
}

#[test]
fn criterion_3_dvm_conservation() {
    report_and_assert(3, "DVM conservation", validate::dvm_conservation().unwrap());
}

#[test]
fn criterion_4_well_balancing() {
    // uniform equilibrium state, 1000 RK4 steps: density unchanged to 1e-11
    let delta = 2.0;
    let gamma = gamma_from_dof(1, delta);
    let prim = Primitive::new(1.3, 0.5, 0.9);
    let r_max = compute_k(1e-15, gamma).unwrap() * prim.sound_speed(gamma);
    let vel = build_velocity_grid(1, 16, 1, 1, r_max, [prim.u, 0.0, 0.0]).unwrap();
    let zeta_max =
        frbgk::phase::compute_zeta_max(delta, 1e-6, prim.theta()).unwrap();
    let zeta = build_internal_energy_grid(delta, 12, zeta_max).unwrap();
    let phase = PhaseSpace::new(vel, zeta);
    let mesh = Mesh1D::uniform(0.0, 1.0, 10).unwrap();
    let basis = build_basis(3).unwrap();
    let solver = Solver::new(
        mesh,
        basis,
        phase,
        BoundarySpec {
            left: BcKind::Periodic,
            right: BcKind::Periodic,
        },
        CollisionModel::Constant { tau: 5e-3 },
    )
    .unwrap();
    let ic = move |_: f64| prim;
    let mut field = solver.initialize(&ic, 5).unwrap();
    let rho0 = solver
        .node_moments(&field)
        .iter()
        .map(|q| q.rho)
        .collect::<Vec<_>>();
    let dt = solver.compute_dt(&field).unwrap();
    let mut ws = RkWorkspace::new(&field);
    for step in 0..1000 {
        solver
            .rk4_step(&mut field, dt, step, step as f64 * dt, &mut ws)
            .unwrap();
    }
    let rho1 = solver.node_moments(&field);
    let drift = rho1
        .iter()
        .zip(&rho0)
        .map(|(q, r0)| (q.rho - r0).abs())
        .fold(0.0f64, f64::max);
    let ok = drift <= 1e-11;
    println!(
        "acceptance criterion 4 (well-balancing): {} -- density drift {:.3e} after 1000 steps (tol 1e-11)",
        if ok { "PASS" } else { "FAIL" },
        drift
    );
    assert!(ok, "well-balancing drift {drift:.3e} exceeds 1e-11");
}

#[test]
fn criterion_5_sod_resolution() {
    report_and_assert(5, "Sod shock tube", validate::sod_suite().unwrap());
}

#[test]
fn criterion_6_double_expansion() {
    report_and_assert(6, "double expansion", validate::expansion_suite().unwrap());
}

#[test]
fn criterion_7_normal_shock() {
    report_and_assert(7, "normal shock structure", validate::normal_shock_suite().unwrap());
}

#[test]
fn criterion_8_property_suites() {
    let mut failures = Vec::new();

    // --- limiter over 1e4 random elements ---
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..10_000 {
        let p = rng.gen_range(1..=5);
        let basis = build_basis(p).unwrap();
        let mut vals: Vec<f64> = (0..p + 1).map(|_| rng.gen_range(-1.0..2.0)).collect();
        // shift so the element mean is nonnegative
        let mean = element_mean(&vals, &basis);
        if mean < 0.0 {
            let target = rng.gen_range(0.0..0.5);
            for v in vals.iter_mut() {
                *v += target - mean;
            }
        }
        let mean_before = element_mean(&vals, &basis);
        let all_nonneg = vals.iter().all(|&v| v >= 0.0);
        let original = vals.clone();
        squeeze(&mut vals, &basis).unwrap();
        let mean_after = element_mean(&vals, &basis);
        if (mean_before - mean_after).abs() > 1e-13 * (1.0 + mean_before.abs()) {
            failures.push(format!(
                "limiter mean drift {:.3e} (trial {trial})",
                mean_before - mean_after
            ));
            break;
        }
        let scale = original.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        if vals.iter().any(|&v| v < -1e-13 * scale) {
            failures.push(format!("limiter negativity (trial {trial})"));
            break;
        }
        if all_nonneg && vals != original {
            failures.push(format!("limiter touched a nonnegative element (trial {trial})"));
            break;
        }
        let first = vals.clone();
        squeeze(&mut vals, &basis).unwrap();
        if vals != first {
            failures.push(format!("limiter not idempotent (trial {trial})"));
            break;
        }
    }
    println!("  property: limiter over 1e4 random elements -- {}", status(&failures));

    // --- quadrature: ball volumes and Gaussian moments ---
    let before = failures.len();
    {
        let r_max = 2.5;
        let disk = build_velocity_grid(2, 10, 12, 1, r_max, [0.0; 3]).unwrap();
        let total: f64 = disk.weights.iter().sum();
        let area = std::f64::consts::PI * r_max * r_max;
        if (total - area).abs() > 1e-11 * area {
            failures.push(format!("disk area mismatch: {total} vs {area}"));
        }
        let mut prev = f64::INFINITY;
        let ball = 4.0 / 3.0 * std::f64::consts::PI * r_max * r_max * r_max;
        for n_psi in [4, 8, 16] {
            let grid = build_velocity_grid(3, 8, 8, n_psi, r_max, [0.0; 3]).unwrap();
            let total: f64 = grid.weights.iter().sum();
            let err = (total - ball).abs() / ball;
            if err > prev {
                failures.push("ball volume error not decreasing".into());
            }
            prev = err;
        }
        if prev > 1e-2 {
            failures.push(format!("ball volume error {prev:.3e} too large"));
        }
        // Gaussian moments on the 1D grid sized by the extent rule
        let (rho, u0, theta) = (1.2, -0.7, 0.6);
        let gamma = 3.0;
        let r = compute_k(1e-15, gamma).unwrap() * (gamma * theta).sqrt();
        let vel = build_velocity_grid(1, 64, 1, 1, r, [u0, 0.0, 0.0]).unwrap();
        let zeta = build_internal_energy_grid(0.0, 1, 0.0).unwrap();
        let phase = PhaseSpace::new(vel, zeta);
        let f: Vec<f64> = phase
            .vel
            .nodes
            .iter()
            .map(|n| {
                let du = n[0] - u0;
                rho / (2.0 * std::f64::consts::PI * theta).sqrt()
                    * (-du * du / (2.0 * theta)).exp()
            })
            .collect();
        let q = phase.mom.moments(&f).unwrap();
        let e_exact = rho * (0.5 * u0 * u0 + 0.5 * theta);
        if (q.rho - rho).abs() > 1e-12
            || (q.mom - rho * u0).abs() > 1e-12
            || (q.energy - e_exact).abs() > 1e-12
        {
            failures.push("Gaussian moments beyond tolerance".into());
        }
    }
    println!(
        "  property: quadrature (ball volumes, Gaussian moments) -- {}",
        status(&failures[before..])
    );

    // --- DVM Jacobian vs central finite differences, 100 random states ---
    let before = failures.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCADE);
    for trial in 0..100 {
        let delta = [0.0, 2.0, 4.0][trial % 3];
        let gamma = gamma_from_dof(1, delta);
        let prim = Primitive::new(
            rng.gen_range(0.1..3.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.1..3.0),
        );
        let r_max = compute_k(1e-15, gamma).unwrap() * prim.sound_speed(gamma) + 1.0;
        let vel = build_velocity_grid(1, 24, 1, 1, r_max, [prim.u, 0.0, 0.0]).unwrap();
        let zeta = if delta > 0.0 {
            let zm = frbgk::phase::compute_zeta_max(delta, 1e-6, prim.theta()).unwrap();
            build_internal_energy_grid(delta, 12, zm).unwrap()
        } else {
            build_internal_energy_grid(0.0, 1, 0.0).unwrap()
        };
        let phase = PhaseSpace::new(vel, zeta);
        let q = prim.to_conserved(gamma);
        let alpha = dvm::alpha_from_macro(&q, 1, delta).unwrap();
        let jac = dvm::moment_jacobian(&alpha, &phase);
        let base = [alpha.amplitude, alpha.inv_width, alpha.mean];
        for j in 0..3 {
            let h = 1e-6 * base[j].abs().max(1e-4);
            let mut ap = alpha;
            let mut am = alpha;
            match j {
                0 => {
                    ap.amplitude += h;
                    am.amplitude -= h;
                }
                1 => {
                    ap.inv_width += h;
                    am.inv_width -= h;
                }
                _ => {
                    ap.mean += h;
                    am.mean -= h;
                }
            }
            let mp = dvm::moment_map(&ap, &phase);
            let mm = dvm::moment_map(&am, &phase);
            let fd = [
                (mp.rho - mm.rho) / (2.0 * h),
                (mp.mom - mm.mom) / (2.0 * h),
                (mp.energy - mm.energy) / (2.0 * h),
            ];
            let col = (0..3).map(|i| jac[i][j].abs()).fold(0.0f64, f64::max);
            for i in 0..3 {
                if (jac[i][j] - fd[i]).abs() / col > 1e-6 {
                    failures.push(format!(
                        "Jacobian mismatch trial {trial} J[{i}][{j}]: {} vs {}",
                        jac[i][j], fd[i]
                    ));
                }
            }
        }
        if !failures.is_empty() && failures.len() > before {
            break;
        }
    }
    println!(
        "  property: DVM Jacobian vs finite differences -- {}",
        status(&failures[before..])
    );

    // --- FR advection order p + 1 ---
    let before = failures.len();
    {
        let p = 2;
        let basis = build_basis(p).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut errors = Vec::new();
        for ne in [8usize, 16] {
            let mesh = Mesh1D::uniform(0.0, 1.0, ne).unwrap();
            let ns = p + 1;
            let n = ne * ns;
            let mut f: Vec<f64> = (0..ne)
                .flat_map(|k| {
                    (0..ns)
                        .map(|i| (two_pi * mesh.node_x(k, i, &basis)).sin())
                        .collect::<Vec<_>>()
                })
                .collect();
            let dt = mesh.h_min / 20.0;
            let mut t = 0.0;
            let mut k1 = vec![0.0; n];
            let mut k2 = vec![0.0; n];
            let mut k3 = vec![0.0; n];
            let mut k4 = vec![0.0; n];
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
            errors.push(linf);
        }
        let order = (errors[0] / errors[1]).ln() / 2.0f64.ln();
        if order < (p + 1) as f64 - 0.2 {
            failures.push(format!("advection order {order:.2} below p+1"));
        }
    }
    println!("  property: FR advection order p+1 -- {}", status(&failures[before..]));

    // --- upwind selection ---
    let before = failures.len();
    {
        use frbgk::fr::upwind_flux;
        if upwind_flux(2.0, 5.0, 1.0) != 2.0
            || upwind_flux(2.0, 5.0, -1.0) != -5.0
            || upwind_flux(2.0, 5.0, 0.0) != 0.0
        {
            failures.push("upwind selection wrong".into());
        }
    }
    println!("  property: upwind selection -- {}", status(&failures[before..]));

    // --- constant preservation ---
    let before = failures.len();
    {
        let basis = build_basis(4).unwrap();
        let mesh = Mesh1D::uniform(0.0, 1.0, 6).unwrap();
        let n = 6 * 5;
        let field = vec![2.2; n];
        let mut out = vec![0.0; n];
        for bc in [
            ScalarBc::Periodic,
            ScalarBc::Ends {
                left: frbgk::fr::EndState::Neumann,
                right: frbgk::fr::EndState::Neumann,
            },
        ] {
            advect_rhs(&field, 0.9, &mesh, &basis, &bc, &mut out).unwrap();
            if out.iter().any(|v| v.abs() > 1e-13 * 2.2) {
                failures.push("constant not preserved".into());
            }
        }
    }
    println!("  property: constant preservation -- {}", status(&failures[before..]));

    let ok = failures.is_empty();
    println!(
        "acceptance criterion 8 (property suites): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "property failures: {failures:?}");
}

fn status(failed: &[String]) -> &'static str {
    if failed.is_empty() {
        "ok"
    } else {
        "FAILED"
    }
}
