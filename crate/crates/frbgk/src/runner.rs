//! Configuration-driven assembly and execution of full runs.

use std::path::Path;

use crate::cases::{self, BcRequest, Case, CollisionSeed};
use crate::config::{BcChoice, CaseKind, CollisionKind, Config};
use crate::diagnostics::KnudsenContext;
use crate::dvm::{self, DvmScratch};
use crate::error::{Error, Result};
use crate::fr::{build_basis, Mesh1D};
use crate::output;
use crate::phase::{
    build_internal_energy_grid, build_velocity_grid, compute_r_max, compute_velocity_offset,
    compute_zeta_max, PhaseSpace,
};
use crate::solver::{
    collision_time_from_knudsen, BcKind, BoundarySpec, CollisionModel, DistributionField,
    RunLog, Solver,
};
use crate::state::Primitive;

/// A fully assembled problem, ready to run.
pub struct Setup {
    pub solver: Solver,
    pub field: DistributionField,
    pub case_name: &'static str,
    pub gamma: f64,
    pub t_final: f64,
    pub output_interval: Option<f64>,
    pub fu_locations: Vec<f64>,
    pub kn_ctx: KnudsenContext,
    pub warnings: Vec<String>,
    pub far_states: (Primitive, Primitive),
    pub threads: usize,
}

fn build_case(cfg: &Config, h_elem: f64) -> Result<Case> {
    match cfg.case {
        CaseKind::Pulse => cases::smooth_pulse(
            cfg.beta.unwrap_or(100.0),
            cfg.delta.unwrap_or(0.0),
        ),
        CaseKind::Expansion => {
            let mut case = cases::double_expansion(cfg.smooth_ic, h_elem)?;
            if let Some(delta) = cfg.delta {
                case.delta = delta;
            }
            Ok(case)
        }
        CaseKind::Sod => {
            let mut case = cases::sod();
            if let Some(delta) = cfg.delta {
                case.delta = delta;
            }
            Ok(case)
        }
        CaseKind::NormalShock => {
            let delta = cfg.delta.unwrap_or(2.0);
            let gamma = crate::state::gamma_from_dof(1, delta);
            let mach = cfg
                .mach
                .ok_or_else(|| Error::Config("normal_shock needs a mach number".into()))?;
            cases::normal_shock(mach, gamma)
        }
    }
}

fn resolve_bc(
    request: BcRequest,
    choice: Option<BcChoice>,
    far: &Primitive,
    phase: &PhaseSpace,
    init_iters: usize,
) -> Result<BcKind> {
    let effective = match choice {
        None => request,
        Some(BcChoice::Periodic) => BcRequest::Periodic,
        Some(BcChoice::Neumann) => BcRequest::Neumann,
        Some(BcChoice::Dirichlet) => BcRequest::DirichletFar,
        Some(BcChoice::Specular) => BcRequest::SpecularWall,
    };
    Ok(match effective {
        BcRequest::Periodic => BcKind::Periodic,
        BcRequest::Neumann => BcKind::Neumann,
        BcRequest::SpecularWall => BcKind::SpecularWall,
        BcRequest::DirichletFar => {
            let cons = far.to_conserved(phase.gamma());
            let mut scratch = DvmScratch::new(phase);
            let mut slice = vec![0.0; phase.n_phase()];
            dvm::project_into(&cons, phase, init_iters, true, &mut scratch, Some(&mut slice), None)?;
            BcKind::Dirichlet(slice)
        }
    })
}

/// Assemble mesh, basis, grids, boundary conditions, the collision model,
/// and the initial field from a validated config.
pub fn build_setup(cfg: &Config) -> Result<Setup> {
    let mut warnings = Vec::new();

    // mesh and basis come first: the tanh-smoothed expansion ties its
    // profile thickness to the element size
    let p = cfg.p;
    let basis = build_basis(p)?;
    let case_probe = build_case(cfg, 1.0)?;
    let domain = cfg.domain.unwrap_or(case_probe.domain);
    let h_elem = (domain.1 - domain.0) / cfg.n_elements as f64;
    let case = build_case(cfg, h_elem)?;
    let mesh = Mesh1D::uniform(domain.0, domain.1, cfg.n_elements)?;
    let gamma = case.gamma();

    // sample the initial condition at the solution nodes
    let ns = p + 1;
    let mut initial = Vec::with_capacity(mesh.n_elements() * ns);
    for k in 0..mesh.n_elements() {
        for i in 0..ns {
            initial.push((case.ic)(mesh.node_x(k, i, &basis)));
        }
    }

    // velocity space
    let n_v = cfg
        .n_v
        .ok_or_else(|| Error::Config("n_v is required for the 1D velocity grid".into()))?;
    let r_max = compute_r_max(&initial, cfg.eps_u, gamma)?;
    let offset = compute_velocity_offset(&initial)?;
    let vel = build_velocity_grid(1, n_v, 1, 1, r_max, [offset, 0.0, 0.0])?;

    // internal-energy space
    let zeta = if case.delta > 0.0 {
        let n_zeta = cfg.n_zeta.ok_or_else(|| {
            Error::Config(format!(
                "n_zeta is required for delta = {} > 0",
                case.delta
            ))
        })?;
        let theta_max = initial
            .iter()
            .map(Primitive::theta)
            .fold(0.0f64, f64::max);
        let zeta_max = compute_zeta_max(case.delta, cfg.eps_zeta, theta_max)?;
        build_internal_energy_grid(case.delta, n_zeta, zeta_max)?
    } else {
        build_internal_energy_grid(0.0, 1, 0.0)?
    };
    let phase = PhaseSpace::new(vel, zeta);

    // Knudsen number / collision time resolution (unit reference length,
    // sound speed referenced to the maximum initial value)
    let l_ref = 1.0;
    let cs_max = initial
        .iter()
        .map(|q| q.sound_speed(gamma))
        .fold(0.0f64, f64::max);
    let h_max_node = mesh.h_max_node(&basis);
    let kn = if let Some(tau) = cfg.tau {
        // invert tau = sqrt(2 gamma / pi) Kn L / c_s for bookkeeping
        tau * cs_max / ((2.0 * gamma / std::f64::consts::PI).sqrt() * l_ref)
    } else if let Some(kn_h) = cfg.kn_h {
        kn_h * h_max_node / l_ref
    } else if let Some(kn) = cfg.kn {
        kn
    } else if let Some(kn) = case.default_kn {
        kn
    } else {
        return Err(Error::Config(
            "set one of kn, kn_h, or tau to fix the collision time".into(),
        ));
    };
    let kn_ctx = KnudsenContext::new(kn, l_ref, h_max_node);
    if kn_ctx.under_resolved() {
        warnings.push(format!(
            "mesh Knudsen number {:.3e} below the resolution rule 1/10: kinetic structures span fewer than the resolvable node spacing and spurious oscillations may appear",
            kn_ctx.kn_h
        ));
    }

    let collision_kind = match (cfg.collision_model, case.collision) {
        (Some(CollisionKind::Constant), _) => CollisionSeed::Constant,
        (Some(CollisionKind::PowerLaw), CollisionSeed::PowerLaw { omega }) => {
            CollisionSeed::PowerLaw {
                omega: cfg.omega.unwrap_or(omega),
            }
        }
        (Some(CollisionKind::PowerLaw), _) => CollisionSeed::PowerLaw {
            omega: cfg.omega.unwrap_or(0.81),
        },
        (None, CollisionSeed::PowerLaw { omega }) => CollisionSeed::PowerLaw {
            omega: cfg.omega.unwrap_or(omega),
        },
        (None, seed) => seed,
    };
    let far = case.far_states();
    let model = match (collision_kind, cfg.tau) {
        (CollisionSeed::Constant, Some(tau)) => CollisionModel::Constant { tau },
        (CollisionSeed::Constant, None) => CollisionModel::Constant {
            tau: collision_time_from_knudsen(kn, gamma, l_ref, cs_max)?,
        },
        (CollisionSeed::PowerLaw { omega }, tau_cfg) => {
            // referenced to the incoming (left) state
            let q_l = far.0;
            let tau_ref = match tau_cfg {
                Some(tau) => tau,
                None => collision_time_from_knudsen(kn, gamma, l_ref, q_l.sound_speed(gamma))?,
            };
            CollisionModel::PowerLaw {
                tau_ref,
                rho_ref: q_l.rho,
                theta_ref: q_l.theta(),
                omega,
            }
        }
    };

    let bc = BoundarySpec {
        left: resolve_bc(case.bc.0, cfg.bc_left, &far.0, &phase, cfg.init_iters)?,
        right: resolve_bc(case.bc.1, cfg.bc_right, &far.1, &phase, cfg.init_iters)?,
    };

    let mut solver = Solver::new(mesh, basis, phase, bc, model)?;
    solver.dvm_enabled = cfg.dvm;
    solver.dvm_iters = cfg.dvm_iters;
    solver.cfl = cfg.cfl;

    let field = solver.initialize(case.ic.as_ref(), cfg.init_iters)?;
    let t_final = cfg.t_final.unwrap_or(case.default_t_final);

    Ok(Setup {
        solver,
        field,
        case_name: case.name,
        gamma,
        t_final,
        output_interval: cfg.output_interval,
        fu_locations: cfg.fu_locations.clone(),
        kn_ctx,
        warnings,
        far_states: far,
        threads: cfg.threads,
    })
}

/// Macroscopic primitives at every solution node of the current field.
pub fn node_primitives(solver: &Solver, field: &DistributionField) -> Result<Vec<Primitive>> {
    let gamma = solver.phase.gamma();
    let mut prims = Vec::with_capacity(field.n_spatial());
    for k in 0..field.n_elements {
        for i in 0..field.n_nodes {
            let q = solver.phase.mom.moments(field.slice(k, i))?;
            prims.push(q.to_primitive(gamma)?);
        }
    }
    Ok(prims)
}

pub struct RunSummary {
    pub log: RunLog,
    pub warnings: Vec<String>,
    pub out_dir: std::path::PathBuf,
}

/// Run with the setup's thread preference installed.
pub fn run_with_threads<T: Send>(
    threads: usize,
    job: impl FnOnce() -> T + Send,
) -> Result<T> {
    if threads == 0 {
        Ok(job())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(pool.install(job))
    }
}

/// Execute a configured case and write the run artifacts:
/// a normalized config copy, profile.csv, timeseries.csv, optional
/// fu_slice CSVs, and a plain-text report.
pub fn run_case(cfg: &Config, out_dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let mut setup = build_setup(cfg)?;
    std::fs::write(out_dir.join("config.cfg"), crate::config::serialize(cfg))?;

    let t_final = setup.t_final;
    let interval = setup.output_interval;
    let mut rows = Vec::new();
    let outcome = {
        let solver = &setup.solver;
        let field = &mut setup.field;
        let rows = &mut rows;
        run_with_threads(setup.threads, move || {
            solver.run_collect(field, t_final, interval, None, rows)
        })?
    };
    let log = match outcome {
        Ok((steps, final_residual)) => RunLog {
            rows,
            steps,
            final_residual,
        },
        Err(e) => {
            // leave the partial time series and the failure report behind
            let _ = output::write_timeseries(&out_dir.join("timeseries.csv"), &rows);
            let _ = std::fs::write(
                out_dir.join("report.txt"),
                format!("run failed: {e}\nrecorded rows: {}\n", rows.len()),
            );
            return Err(e);
        }
    };

    let xs = setup.solver.node_coords();
    let prims = node_primitives(&setup.solver, &setup.field)?;
    output::write_profile(&out_dir.join("profile.csv"), &xs, &prims, setup.gamma)?;
    output::write_timeseries(&out_dir.join("timeseries.csv"), &log.rows)?;
    for (idx, x_loc) in setup.fu_locations.iter().enumerate() {
        let (u, f_u) = crate::diagnostics::extract_fu(
            &setup.field,
            *x_loc,
            &setup.solver.mesh,
            &setup.solver.basis,
            &setup.solver.phase,
        );
        let name = if idx == 0 {
            "fu_slice.csv".to_string()
        } else {
            format!("fu_slice_{}.csv", idx + 1)
        };
        output::write_fu(&out_dir.join(name), &u, &f_u)?;
    }

    let mut report = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(report, "case: {}", setup.case_name);
    let _ = writeln!(report, "gamma: {}", setup.gamma);
    let _ = writeln!(
        report,
        "kn: {:.6e}  lambda: {:.6e}  kn_h: {:.6e}",
        setup.kn_ctx.kn, setup.kn_ctx.lambda, setup.kn_ctx.kn_h
    );
    let _ = writeln!(report, "steps: {}", log.steps);
    let _ = writeln!(report, "final_residual: {:.6e}", log.final_residual);
    if let Some(last) = log.rows.last() {
        let _ = writeln!(report, "final_mass_error: {:.6e}", last.mass_err);
        let _ = writeln!(report, "final_min_f: {:.6e}", last.min_f);
    }
    for w in &setup.warnings {
        let _ = writeln!(report, "warning: {w}");
    }
    std::fs::write(out_dir.join("report.txt"), &report)?;

    Ok(RunSummary {
        log,
        warnings: setup.warnings,
        out_dir: out_dir.to_path_buf(),
    })
}
