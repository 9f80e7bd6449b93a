//! Validation suites: scaled reproductions of the quantitative benchmark
//! studies, each reporting measured-vs-expected checks.

use std::fmt::Write as _;

use crate::config::{CaseKind, Config};
use crate::diagnostics::{
    extract_fu, l1_error, sample_nodal_field, shock_thickness, FarStates,
};
use crate::error::{Error, Result};
use crate::euler::{exact_riemann, rankine_hugoniot};
use crate::fr::{FrBasis, Mesh1D};
use crate::phase::compute_zeta_max;
use crate::runner::{build_setup, node_primitives};
use crate::state::Primitive;

/// One measured-vs-expected comparison.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn abs(name: impl Into<String>, measured: f64, expected: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected,
            tol,
            pass: (measured - expected).abs() <= tol,
        }
    }

    /// measured <= bound
    fn le(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: bound,
            tol: 0.0,
            pass: measured <= bound,
        }
    }

    /// measured >= bound
    fn ge(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: bound,
            tol: 0.0,
            pass: measured >= bound,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {} :: {} -- measured {:.6e}, expected {:.6e} (tol {:.3e})",
                if c.pass { "PASS" } else { "FAIL" },
                self.suite,
                c.name,
                c.measured,
                c.expected,
                c.tol,
            );
        }
        let _ = writeln!(
            s,
            "suite {}: {}",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }

    pub fn jsonl(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{}",
                crate::output::jsonl_check(
                    self.suite, &c.name, c.measured, c.expected, c.tol, c.pass
                )
            );
        }
        s
    }
}

pub const SUITES: &[&str] = &[
    "zeta_table",
    "pulse_convergence",
    "dvm_conservation",
    "sod",
    "expansion",
    "normal_shock",
];

/// Dispatch by suite name.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "zeta_table" => Ok(zeta_table()),
        "pulse_convergence" => pulse_convergence(),
        "dvm_conservation" => dvm_conservation(),
        "sod" => sod_suite(),
        "expansion" => expansion_suite(),
        "normal_shock" => normal_shock_suite(),
        _ => Err(Error::InvalidArgument(format!(
            "unknown suite `{name}`; available: {}",
            SUITES.join(", ")
        ))),
    }
}

/// Published relative internal-energy domain extents zeta_max / theta_max.
pub const ZETA_TABLE: [(f64, [f64; 7]); 4] = [
    (2.0, [4.605, 9.210, 13.816, 18.421, 23.026, 27.631, 32.236]),
    (3.0, [5.453, 10.380, 15.175, 19.916, 24.628, 29.320, 33.999]),
    (4.0, [6.471, 11.667, 16.627, 21.488, 26.295, 31.067, 35.815]),
    (5.0, [7.656, 13.065, 18.165, 23.133, 28.026, 32.870, 37.680]),
];

pub const ZETA_EPS: [f64; 7] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14];

/// All 28 tabulated domain extents within 1e-3.
pub fn zeta_table() -> SuiteReport {
    let mut checks = Vec::new();
    for (delta, row) in ZETA_TABLE {
        for (eps, expected) in ZETA_EPS.iter().zip(row) {
            let measured = compute_zeta_max(delta, *eps, 1.0).unwrap_or(f64::NAN);
            checks.push(Check::abs(
                format!("delta={delta} eps={eps:.0e}"),
                measured,
                expected,
                1e-3,
            ));
        }
    }
    SuiteReport {
        suite: "zeta_table",
        checks,
    }
}

fn pulse_config(p: usize, ne: usize, n_v: usize, kn: f64, delta: f64) -> Config {
    Config {
        case: CaseKind::Pulse,
        p,
        n_elements: ne,
        n_v: Some(n_v),
        n_zeta: if delta > 0.0 { Some(n_v) } else { None },
        delta: Some(delta),
        kn: Some(kn),
        t_final: Some(1.0),
        ..Config::default()
    }
}

struct PulseRun {
    rho: Vec<f64>,
    xs: Vec<f64>,
    mesh: Mesh1D,
    basis: FrBasis,
    mass_err: f64,
}

fn run_pulse(cfg: &Config) -> Result<PulseRun> {
    let mut setup = build_setup(cfg)?;
    let log = setup
        .solver
        .run(&mut setup.field, setup.t_final, None)?;
    let prims = node_primitives(&setup.solver, &setup.field)?;
    let rho = prims.iter().map(|q| q.rho).collect();
    Ok(PulseRun {
        rho,
        xs: setup.solver.node_coords(),
        mesh: setup.solver.mesh,
        basis: setup.solver.basis,
        mass_err: log.rows.last().map(|r| r.mass_err).unwrap_or(f64::NAN),
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Published least-squares convergence orders for the smooth pulse at
/// Kn = 1e-2, delta = 0, orders P2..P5.
pub const PULSE_ROC: [f64; 4] = [3.63, 4.06, 4.93, 5.92];

/// Smooth-pulse spatial convergence against a self-computed fine reference.
pub fn pulse_convergence() -> Result<SuiteReport> {
    let kn = 1e-2;
    let n_v = 128;
    let reference = run_pulse(&pulse_config(5, 100, n_v, kn, 0.0))?;

    let mesh_sizes = [4usize, 8, 12, 16, 20];
    let mut checks = Vec::new();
    for (pi, p) in (2usize..=5).enumerate() {
        let mut log_dx = Vec::new();
        let mut log_err = Vec::new();
        for &ne in &mesh_sizes {
            let run = run_pulse(&pulse_config(p, ne, n_v, kn, 0.0))?;
            let mut linf = 0.0f64;
            for (x, rho) in run.xs.iter().zip(&run.rho) {
                let r_ref = sample_nodal_field(
                    &reference.rho,
                    &reference.mesh,
                    &reference.basis,
                    *x,
                );
                linf = linf.max((rho - r_ref).abs());
            }
            log_dx.push((1.0 / ne as f64).ln());
            log_err.push(linf.ln());
        }
        let order = least_squares_slope(&log_dx, &log_err);
        checks.push(Check::abs(
            format!("P{p} convergence order"),
            order,
            PULSE_ROC[pi],
            0.75,
        ));
        // pairwise orders over the three finest mesh pairs
        for w in 1..4 {
            let i = w;
            let j = w + 1;
            let pair = (log_err[i] - log_err[j]) / (log_dx[i] - log_dx[j]);
            checks.push(Check::ge(
                format!(
                    "P{p} pair order 1/{}-1/{}",
                    mesh_sizes[i], mesh_sizes[j]
                ),
                pair,
                p as f64 + 0.5,
            ));
        }
    }
    Ok(SuiteReport {
        suite: "pulse_convergence",
        checks,
    })
}

/// Mass conservation with and without the discrete velocity model.
pub fn dvm_conservation() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut dvm_err_poly_low_kn = f64::NAN;
    for (kn, delta) in [(1e-1, 0.0), (1e-1, 4.0), (1e-3, 0.0), (1e-3, 4.0)] {
        let cfg = pulse_config(5, 20, 16, kn, delta);
        let run = run_pulse(&cfg)?;
        checks.push(Check::le(
            format!("mass error dvm kn={kn:.0e} delta={delta}"),
            run.mass_err,
            1e-10,
        ));
        if kn == 1e-3 && delta == 4.0 {
            dvm_err_poly_low_kn = run.mass_err;
        }
    }
    // standard mode: the truncated internal-energy domain leaks mass; at
    // this resolution the run may diverge outright, which counts as an
    // unbounded conservation error
    let mut std_cfg = pulse_config(5, 20, 16, 1e-3, 4.0);
    std_cfg.dvm = false;
    let (std_err, note) = match run_pulse(&std_cfg) {
        Ok(run) => (run.mass_err, String::new()),
        Err(e) => (f64::INFINITY, format!(" [standard mode diverged: {e}]")),
    };
    let ratio = std_err / dvm_err_poly_low_kn.max(f64::MIN_POSITIVE);
    checks.push(Check::ge(
        format!("standard/dvm mass error ratio (kn=1e-3, delta=4){note}"),
        ratio,
        100.0,
    ));
    Ok(SuiteReport {
        suite: "dvm_conservation",
        checks,
    })
}

fn sod_config(kn_h: f64) -> Config {
    Config {
        case: CaseKind::Sod,
        p: 3,
        n_elements: 50,
        n_v: Some(16),
        n_zeta: Some(16),
        kn_h: Some(kn_h),
        t_final: Some(0.2),
        ..Config::default()
    }
}

/// Sod shock tube at the resolution limit and below it.
pub fn sod_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();

    let cfg = sod_config(0.1);
    let mut setup = build_setup(&cfg)?;
    setup.solver.run(&mut setup.field, setup.t_final, None)?;
    let prims = node_primitives(&setup.solver, &setup.field)?;
    let xs = setup.solver.node_coords();
    let rho: Vec<f64> = prims.iter().map(|q| q.rho).collect();

    let exact = exact_riemann(
        &Primitive::new(1.0, 0.0, 1.0),
        &Primitive::new(0.125, 0.0, 0.1),
        1.4,
    )?;
    let t = 0.2;
    let shock_x = 0.5 + exact.right_shock_speed().unwrap() * t;
    let plateau = exact.density_star_right();

    // plateau between contact (~0.686) and shock (~0.850)
    let (mut acc, mut cnt) = (0.0, 0.0);
    for (x, r) in xs.iter().zip(&rho) {
        if *x >= 0.72 && *x <= 0.82 {
            acc += r;
            cnt += 1.0;
        }
    }
    let measured_plateau = acc / cnt;
    checks.push(Check::abs(
        "post-shock density plateau",
        measured_plateau,
        plateau,
        0.05 * plateau,
    ));

    // shock located at the steepest density drop right of the contact
    let grad =
        crate::diagnostics::corrected_density_gradient(&rho, &setup.solver.mesh, &setup.solver.basis)?;
    let mut x_shock = f64::NAN;
    let mut steepest = 0.0;
    for (x, g) in xs.iter().zip(&grad) {
        if *x > 0.72 && *g < steepest {
            steepest = *g;
            x_shock = *x;
        }
    }
    let h_elem = 1.0 / 50.0;
    checks.push(Check::abs("shock location", x_shock, shock_x, h_elem));

    let min_rho = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(Check::ge("minimum density", min_rho, f64::MIN_POSITIVE));
    checks.push(Check::le(
        "resolution warnings at kn_h=1/10",
        setup.warnings.len() as f64,
        0.0,
    ));

    // under-resolved run completes and warns
    let cfg_low = sod_config(0.01);
    let mut setup_low = build_setup(&cfg_low)?;
    let completed = setup_low
        .solver
        .run(&mut setup_low.field, setup_low.t_final, None)
        .is_ok();
    checks.push(Check::ge(
        "kn_h=1/100 run completes",
        completed as usize as f64,
        1.0,
    ));
    checks.push(Check::ge(
        "kn_h=1/100 resolution warning emitted",
        setup_low.warnings.len() as f64,
        1.0,
    ));

    Ok(SuiteReport {
        suite: "sod",
        checks,
    })
}

/// Double expansion (123 problem): positivity, density accuracy, and the
/// removal of the center internal-energy spike with consistent initial data.
pub fn expansion_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let gamma = 1.4;
    let t = 0.15;
    let exact = exact_riemann(
        &Primitive::new(1.0, -2.0, 0.4),
        &Primitive::new(1.0, 2.0, 0.4),
        gamma,
    )?;

    // discontinuous IC at Kn = 1e-3
    let cfg = Config {
        case: CaseKind::Expansion,
        p: 3,
        n_elements: 100,
        n_v: Some(32),
        n_zeta: Some(32),
        kn: Some(1e-3),
        t_final: Some(t),
        ..Config::default()
    };
    let mut setup = build_setup(&cfg)?;
    setup.solver.run(&mut setup.field, setup.t_final, None)?;
    let prims = node_primitives(&setup.solver, &setup.field)?;
    let xs = setup.solver.node_coords();
    let rho: Vec<f64> = prims.iter().map(|q| q.rho).collect();
    let rho_exact: Vec<f64> = xs
        .iter()
        .map(|x| exact.sample((x - 0.5) / t).rho)
        .collect();

    let min_rho = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(Check::ge("minimum density", min_rho, f64::MIN_POSITIVE));
    let l1 = l1_error(&rho, &rho_exact, &setup.solver.mesh, &setup.solver.basis);
    checks.push(Check::le("density L1 error vs exact", l1, 0.02));

    // smoothed IC, Kn tied to the mesh: the center energy overshoot decays
    let e_center_exact = exact.sample(0.0).specific_internal_energy(gamma);
    let mut overshoots = Vec::new();
    for ne in [100usize, 200] {
        let h = 1.0 / ne as f64;
        let cfg = Config {
            case: CaseKind::Expansion,
            p: 3,
            n_elements: ne,
            n_v: Some(32),
            n_zeta: Some(32),
            kn: Some(h / 10.0),
            smooth_ic: true,
            t_final: Some(t),
            ..Config::default()
        };
        let mut setup = build_setup(&cfg)?;
        setup.solver.run(&mut setup.field, setup.t_final, None)?;
        let prims = node_primitives(&setup.solver, &setup.field)?;
        let xs = setup.solver.node_coords();
        let mut max_e = f64::NEG_INFINITY;
        for (x, q) in xs.iter().zip(&prims) {
            if *x >= 0.46 && *x <= 0.54 {
                max_e = max_e.max(q.specific_internal_energy(gamma));
            }
        }
        overshoots.push(max_e - e_center_exact);
    }
    checks.push(Check::le(
        format!(
            "smoothed-IC center energy overshoot decreases ({:.4e} -> {:.4e})",
            overshoots[0], overshoots[1]
        ),
        overshoots[1],
        overshoots[0],
    ));

    Ok(SuiteReport {
        suite: "expansion",
        checks,
    })
}

fn shock_config(mach: f64) -> Config {
    Config {
        case: CaseKind::NormalShock,
        p: 3,
        n_elements: 100,
        n_v: Some(32),
        n_zeta: Some(32),
        mach: Some(mach),
        t_final: Some(100.0),
        ..Config::default()
    }
}

struct ShockRun {
    residual: f64,
    plateau_err: f64,
    inverse_thickness: f64,
    fu_upstream: (Vec<f64>, Vec<f64>),
    fu_downstream: (Vec<f64>, Vec<f64>),
    q_left: Primitive,
    q_right: Primitive,
    w_vel: Vec<f64>,
}

fn run_shock(mach: f64, stop_early: bool) -> Result<ShockRun> {
    let cfg = shock_config(mach);
    let mut setup = build_setup(&cfg)?;
    let log = if stop_early {
        setup
            .solver
            .run_steady(&mut setup.field, setup.t_final, Some(5.0), 1e-5)?
    } else {
        setup.solver.run(&mut setup.field, setup.t_final, None)?
    };
    let prims = node_primitives(&setup.solver, &setup.field)?;
    let xs = setup.solver.node_coords();
    let rho: Vec<f64> = prims.iter().map(|q| q.rho).collect();
    let (q_l, q_r) = setup.far_states;

    // downstream plateau over x in [15, 22]
    let (mut acc, mut cnt) = (0.0, 0.0);
    for (x, r) in xs.iter().zip(&rho) {
        if *x >= 15.0 && *x <= 22.0 {
            acc += r;
            cnt += 1.0;
        }
    }
    let plateau_err = (acc / cnt - q_r.rho).abs() / q_r.rho;

    let delta = shock_thickness(
        &rho,
        &setup.solver.mesh,
        &setup.solver.basis,
        FarStates::Imposed {
            rho_left: q_l.rho,
            rho_right: q_r.rho,
        },
    )?;
    let lambda_l = setup.kn_ctx.lambda;

    let fu_up = extract_fu(
        &setup.field,
        -25.0,
        &setup.solver.mesh,
        &setup.solver.basis,
        &setup.solver.phase,
    );
    let fu_down = extract_fu(
        &setup.field,
        25.0,
        &setup.solver.mesh,
        &setup.solver.basis,
        &setup.solver.phase,
    );
    Ok(ShockRun {
        residual: log.final_residual,
        plateau_err,
        inverse_thickness: lambda_l / delta,
        fu_upstream: fu_up,
        fu_downstream: fu_down,
        q_left: q_l,
        q_right: q_r,
        w_vel: setup.solver.phase.mom.w_vel.clone(),
    })
}

fn peak_count(f_u: &[f64]) -> usize {
    let scale = f_u.iter().cloned().fold(0.0f64, f64::max);
    let mut peaks = 0;
    let mut rising = true;
    let mut prev = f_u[0];
    for &v in &f_u[1..] {
        let diff = v - prev;
        if diff.abs() > 1e-12 * scale {
            if rising && diff < 0.0 {
                peaks += 1;
                rising = false;
            } else if !rising && diff > 0.0 {
                rising = true;
            }
            prev = v;
        }
    }
    if rising {
        peaks += 1; // still rising at the end counts as a boundary peak
    }
    peaks
}

fn fu_centroid(u: &[f64], f_u: &[f64], w: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..u.len() {
        num += w[i] * u[i] * f_u[i];
        den += w[i] * f_u[i];
    }
    num / den
}

/// Normal shock structure: steady-state convergence, downstream plateau,
/// inverse thickness ratio behavior over Mach number, and equilibrium
/// distribution slices away from the shock.
pub fn normal_shock_suite() -> Result<SuiteReport> {
    let gamma = 5.0 / 3.0;
    let mut checks = Vec::new();

    let main = run_shock(3.8, false)?;
    checks.push(Check::le("M=3.8 temporal residual", main.residual, 1e-5));
    checks.push(Check::le(
        "M=3.8 downstream plateau relative error",
        main.plateau_err,
        0.01,
    ));
    checks.push(Check::ge(
        "M=3.8 inverse thickness ratio positive",
        main.inverse_thickness,
        f64::MIN_POSITIVE,
    ));

    // distribution slices far from the shock: single-peaked, centered on
    // the local bulk velocity
    for (label, (u, f_u), q) in [
        ("upstream", &main.fu_upstream, main.q_left),
        ("downstream", &main.fu_downstream, main.q_right),
    ] {
        checks.push(Check::abs(
            format!("M=3.8 {label} f_u single peak"),
            peak_count(f_u) as f64,
            1.0,
            0.0,
        ));
        let centroid = fu_centroid(u, f_u, &main.w_vel);
        checks.push(Check::abs(
            format!("M=3.8 {label} f_u centroid vs bulk velocity"),
            centroid,
            q.u,
            0.1 * q.sound_speed(gamma),
        ));
    }

    // inverse thickness ratio peaks at an interior Mach number
    let low = run_shock(1.5, true)?;
    let high = run_shock(9.0, true)?;
    checks.push(Check::ge(
        format!(
            "itr(3.8)={:.4} exceeds itr(1.5)={:.4}",
            main.inverse_thickness, low.inverse_thickness
        ),
        main.inverse_thickness - low.inverse_thickness,
        f64::MIN_POSITIVE,
    ));
    checks.push(Check::ge(
        format!(
            "itr(3.8)={:.4} exceeds itr(9.0)={:.4}",
            main.inverse_thickness, high.inverse_thickness
        ),
        main.inverse_thickness - high.inverse_thickness,
        f64::MIN_POSITIVE,
    ));
    // downstream states consistent with the jump conditions
    let rh = rankine_hugoniot(3.8, gamma, &main.q_left)?;
    checks.push(Check::abs(
        "M=3.8 downstream state matches jump conditions",
        main.q_right.rho,
        rh.rho,
        1e-10,
    ));

    Ok(SuiteReport {
        suite: "normal_shock",
        checks,
    })
}
