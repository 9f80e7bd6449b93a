//! Discrete velocity model: equilibrium distributions on truncated grids.
//!
//! On a finite velocity/internal-energy grid the discrete moments of the
//! continuous Maxwellian no longer match the macroscopic state, which breaks
//! conservation and well-balancing. The remedy is a modified Maxwellian whose
//! *discrete* moments match exactly: its parameters solve a small
//! root-finding problem, handled here by Newton's method with the analytic
//! Jacobian.
//!
//! The equilibrium is parameterized as
//!   g(u) = amplitude * exp(-inv_width * (u - mean)^2)
//! times the internal-energy factor
//!   g_zeta(z) = (z/theta)^(delta/2 - 1) * exp(-z/theta) / (theta * Gamma(delta/2)),
//! with theta = 1 / (2 * inv_width).

use crate::error::{Error, Result};
use crate::phase::PhaseSpace;
use crate::state::{gamma_from_dof, MacroState};

/// Parameters of a (possibly modified) Maxwellian for one spatial dimension.
#[derive(Debug, Clone, Copy)]
pub struct AlphaParams {
    /// Gaussian prefactor, rho / (2 pi theta)^(m/2) for the unmodified case.
    pub amplitude: f64,
    /// Inverse width 1 / (2 theta).
    pub inv_width: f64,
    /// Mean of the free velocity component.
    pub mean: f64,
}

impl AlphaParams {
    pub fn theta(&self) -> f64 {
        0.5 / self.inv_width
    }

    fn as_array(&self) -> [f64; 3] {
        [self.amplitude, self.inv_width, self.mean]
    }
}

/// Equilibrium distribution evaluated at every phase-space node pair,
/// flattened velocity-major.
#[derive(Debug, Clone)]
pub struct EquilibriumField {
    pub values: Vec<f64>,
    pub alpha: AlphaParams,
    pub theta: f64,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive arguments (Lanczos).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Alpha parameters of the continuous Maxwellian with moments Q.
pub fn alpha_from_macro(q: &MacroState, m: usize, delta: f64) -> Result<AlphaParams> {
    let gamma = gamma_from_dof(m, delta);
    q.check_admissible(gamma)?;
    let theta = q.theta(gamma);
    let amplitude = q.rho / (2.0 * std::f64::consts::PI * theta).powf(0.5 * m as f64);
    Ok(AlphaParams {
        amplitude,
        inv_width: 0.5 / theta,
        mean: q.velocity(),
    })
}

/// Continuous moments of the Maxwellian with the given parameters (the
/// algebraic inverse of [`alpha_from_macro`]).
pub fn macro_from_alpha(alpha: &AlphaParams, m: usize, delta: f64) -> MacroState {
    let theta = alpha.theta();
    let rho = alpha.amplitude * (2.0 * std::f64::consts::PI * theta).powf(0.5 * m as f64);
    let u = alpha.mean;
    MacroState::new(
        rho,
        rho * u,
        rho * (0.5 * u * u + 0.5 * (m as f64 + delta) * theta),
    )
}

/// Reusable buffers for the separable equilibrium factors.
#[derive(Debug, Clone)]
pub struct DvmScratch {
    gu: Vec<f64>,
    gz: Vec<f64>,
}

impl DvmScratch {
    pub fn new(phase: &PhaseSpace) -> Self {
        Self {
            gu: vec![0.0; phase.vel.n_nodes()],
            gz: vec![0.0; phase.zeta.n_nodes()],
        }
    }
}

/// Fill the separable factors g_u (per velocity node) and g_zeta (per
/// internal-energy node). Values below 1e-300 are flushed to zero.
fn eval_factors(alpha: &AlphaParams, phase: &PhaseSpace, gu: &mut [f64], gz: &mut [f64]) {
    let mom = &phase.mom;
    for q in 0..mom.n_vel {
        // velocity means beyond the spatial dimension are pinned to the
        // offset; their squared distances are precomputed
        let du = mom.u_vel[q] - alpha.mean;
        let arg = du * du + mom.pinned_sq_vel[q];
        let v = alpha.amplitude * (-alpha.inv_width * arg).exp();
        gu[q] = if v < 1e-300 { 0.0 } else { v };
    }
    let delta = phase.zeta.delta;
    if delta == 0.0 {
        gz[0] = 1.0;
        return;
    }
    let theta = alpha.theta();
    let lambda = (-ln_gamma(0.5 * delta)).exp();
    let expo = 0.5 * delta - 1.0;
    let inv_theta = 1.0 / theta;
    for (r, &z) in phase.zeta.nodes.iter().enumerate() {
        let s = z * inv_theta;
        let v = lambda * half_integer_pow(s, expo) * inv_theta * (-s).exp();
        gz[r] = if v < 1e-300 { 0.0 } else { v };
    }
}

/// s^e for the common small and half-integer exponents of the energy
/// factor, avoiding powf in the hot loop.
#[inline]
fn half_integer_pow(s: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        s
    } else if e == 2.0 {
        s * s
    } else if e == 0.5 {
        s.sqrt()
    } else if e == 1.5 {
        s * s.sqrt()
    } else if e == -0.5 {
        1.0 / s.sqrt()
    } else {
        s.powf(e)
    }
}

/// Moments of g(alpha) and the analytic Jacobian of the moment map with
/// respect to (amplitude, inv_width, mean).
///
/// Everything separates into velocity-axis and zeta-axis contractions, so
/// the cost is O(N_v + N_zeta) rather than O(N_v * N_zeta).
fn assemble(
    alpha: &AlphaParams,
    phase: &PhaseSpace,
    gu: &[f64],
    gz: &[f64],
) -> (MacroState, [[f64; 3]; 3]) {
    let mom = &phase.mom;
    let a2 = alpha.inv_width;
    let delta_term = 0.5 * phase.zeta.delta / a2;

    // velocity-axis sums: plain, du-weighted, and width-sensitivity-weighted
    let (mut v0, mut v1, mut ve) = (0.0, 0.0, 0.0);
    let (mut vd0, mut vd1, mut vde) = (0.0, 0.0, 0.0);
    let (mut va0, mut va1, mut vae) = (0.0, 0.0, 0.0);
    for q in 0..mom.n_vel {
        let g = gu[q];
        if g == 0.0 {
            continue;
        }
        let wg = mom.w_vel[q] * g;
        let u = mom.u_vel[q];
        let eu = mom.half_uu_vel[q];
        let du = u - alpha.mean;
        let a_q = delta_term - (du * du + mom.pinned_sq_vel[q]);
        let wgu = wg * u;
        let wge = wg * eu;
        v0 += wg;
        v1 += wgu;
        ve += wge;
        vd0 += wg * du;
        vd1 += wgu * du;
        vde += wge * du;
        va0 += wg * a_q;
        va1 += wgu * a_q;
        vae += wge * a_q;
    }
    // zeta-axis sums
    let (mut z0, mut z1, mut z2) = (0.0, 0.0, 0.0);
    for r in 0..mom.n_zeta {
        let wg = mom.w_zeta[r] * gz[r];
        let z = mom.zeta_nodes[r];
        z0 += wg;
        z1 += wg * z;
        z2 += wg * z * z;
    }

    let m0 = v0 * z0;
    let m1 = v1 * z0;
    let m2 = ve * z0 + v0 * z1;
    // d/d(mean) contractions, up to the 2 a2 factor
    let c2 = [vd0 * z0, vd1 * z0, vde * z0 + vd0 * z1];
    // d/d(inv_width) contractions: theta_w = a_q - 2 zeta
    let c1 = [
        va0 * z0 - 2.0 * v0 * z1,
        va1 * z0 - 2.0 * v1 * z1,
        (vae * z0 + va0 * z1) - 2.0 * (ve * z1 + v0 * z2),
    ];
    let inv_amp = 1.0 / alpha.amplitude;
    let two_a2 = 2.0 * a2;
    let jac = [
        [m0 * inv_amp, c1[0], two_a2 * c2[0]],
        [m1 * inv_amp, c1[1], two_a2 * c2[1]],
        [m2 * inv_amp, c1[2], two_a2 * c2[2]],
    ];
    (MacroState::new(m0, m1, m2), jac)
}

/// Discrete moments of the equilibrium with the given parameters.
pub fn moment_map(alpha: &AlphaParams, phase: &PhaseSpace) -> MacroState {
    let mut scratch = DvmScratch::new(phase);
    eval_factors(alpha, phase, &mut scratch.gu, &mut scratch.gz);
    let (m, _) = assemble(alpha, phase, &scratch.gu, &scratch.gz);
    m
}

/// Analytic Jacobian of the discrete moment map at `alpha`.
pub fn moment_jacobian(alpha: &AlphaParams, phase: &PhaseSpace) -> [[f64; 3]; 3] {
    let mut scratch = DvmScratch::new(phase);
    eval_factors(alpha, phase, &mut scratch.gu, &mut scratch.gz);
    let (_, j) = assemble(alpha, phase, &scratch.gu, &scratch.gz);
    j
}

/// Solve the 3x3 system J x = r by Gaussian elimination with partial
/// pivoting. Returns None if a pivot degenerates.
fn solve3(j: &[[f64; 3]; 3], r: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = *j;
    let mut b = *r;
    let mut perm = [0usize, 1, 2];
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if a[perm[row]][col].abs() > a[perm[pivot]][col].abs() {
                pivot = row;
            }
        }
        perm.swap(col, pivot);
        let p = a[perm[col]][col];
        if p.abs() < 1e-300 {
            return None;
        }
        for row in col + 1..3 {
            let factor = a[perm[row]][col] / p;
            for k in col..3 {
                a[perm[row]][k] -= factor * a[perm[col]][k];
            }
            b[perm[row]] -= factor * b[perm[col]];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut s = b[perm[col]];
        for k in col + 1..3 {
            s -= a[perm[col]][k] * x[k];
        }
        x[col] = s / a[perm[col]][col];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn inf_norm(r: &[f64; 3]) -> f64 {
    r[0].abs().max(r[1].abs()).max(r[2].abs())
}

/// Relative residual below which the projection counts as discretely
/// compatible; further Newton steps cannot improve conservation.
pub(crate) const COMPAT_TOL: f64 = 1e-13;

/// Iteration cap when converging past the mandatory step count.
pub(crate) const MAX_EXTRA_ITERS: usize = 8;

/// Newton projection onto the discretely compatible Maxwellian, with the
/// final equilibrium factors left in `scratch` and, when `g_out` is given,
/// the full equilibrium written out.
///
/// Performs exactly `n_iters` steps; with `converge` set, keeps stepping
/// (up to a cap) while the relative residual exceeds the compatibility
/// tolerance, which on coarse grids restores conservation that a fixed
/// step count would leave on the table.
pub(crate) fn project_into(
    q: &MacroState,
    phase: &PhaseSpace,
    n_iters: usize,
    converge: bool,
    scratch: &mut DvmScratch,
    mut g_out: Option<&mut [f64]>,
    location: Option<usize>,
) -> Result<(AlphaParams, f64)> {
    let mut alpha = alpha_from_macro(q, phase.vel.m, phase.zeta.delta)
        .map_err(|e| attach_location(e, location))?;
    let scale = inf_norm(&[q.rho, q.mom, q.energy]).max(f64::MIN_POSITIVE);

    eval_factors(&alpha, phase, &mut scratch.gu, &mut scratch.gz);
    let (mut moments, mut jac) = assemble(&alpha, phase, &scratch.gu, &scratch.gz);
    let mut res = [
        moments.rho - q.rho,
        moments.mom - q.mom,
        moments.energy - q.energy,
    ];
    let mut res_norm = inf_norm(&res);

    let max_iters = if converge {
        n_iters.max(MAX_EXTRA_ITERS)
    } else {
        n_iters
    };
    for iter in 0..max_iters {
        if iter >= n_iters && res_norm <= COMPAT_TOL * scale {
            break;
        }
        let step = solve3(&jac, &res).ok_or(Error::DvmConvergence {
            residual: res_norm / scale,
            iterations: iter,
            alpha: alpha.as_array(),
            location,
        })?;
        alpha.amplitude -= step[0];
        alpha.inv_width -= step[1];
        alpha.mean -= step[2];
        if !(alpha.amplitude > 0.0) || !(alpha.inv_width > 0.0) {
            return Err(Error::DvmConvergence {
                residual: res_norm / scale,
                iterations: iter + 1,
                alpha: alpha.as_array(),
                location,
            });
        }
        eval_factors(&alpha, phase, &mut scratch.gu, &mut scratch.gz);
        let (m_new, j_new) = assemble(&alpha, phase, &scratch.gu, &scratch.gz);
        moments = m_new;
        jac = j_new;
        res = [
            moments.rho - q.rho,
            moments.mom - q.mom,
            moments.energy - q.energy,
        ];
        let new_norm = inf_norm(&res);
        // growing residual above the convergence floor signals divergence
        if new_norm > res_norm && new_norm > 1e-11 * scale {
            return Err(Error::DvmConvergence {
                residual: new_norm / scale,
                iterations: iter + 1,
                alpha: alpha.as_array(),
                location,
            });
        }
        res_norm = new_norm;
    }

    if let Some(out) = g_out.as_deref_mut() {
        materialize(phase, &scratch.gu, &scratch.gz, out);
    }
    Ok((alpha, res_norm / scale))
}

fn attach_location(e: Error, location: Option<usize>) -> Error {
    match (e, location) {
        (Error::InvalidState(msg), Some(node)) => {
            Error::InvalidState(format!("{msg} (spatial node {node})"))
        }
        (e, _) => e,
    }
}

/// Combine the separable factors into the full phase-space field.
fn materialize(phase: &PhaseSpace, gu: &[f64], gz: &[f64], out: &mut [f64]) {
    let n_zeta = phase.zeta.n_nodes();
    for (q, &gq) in gu.iter().enumerate() {
        let row = &mut out[q * n_zeta..(q + 1) * n_zeta];
        for (r, slot) in row.iter_mut().enumerate() {
            *slot = gq * gz[r];
        }
    }
}

/// Newton projection: n_iters steps from the continuous-Maxwellian guess.
/// Returns the parameters and the relative infinity-norm residual of the
/// discrete compatibility condition.
pub fn newton_project(
    q: &MacroState,
    phase: &PhaseSpace,
    n_iters: usize,
) -> Result<(AlphaParams, f64)> {
    let mut scratch = DvmScratch::new(phase);
    project_into(q, phase, n_iters, false, &mut scratch, None, None)
}

/// Newton projection that keeps iterating (past `min_iters`, up to a cap)
/// until the discrete compatibility residual reaches the conservation
/// tolerance. This is what the solver uses at runtime: on well-resolved
/// grids it costs exactly `min_iters` steps, on coarse grids it spends the
/// one or two extra steps that machine-level conservation needs.
pub fn newton_project_converged(
    q: &MacroState,
    phase: &PhaseSpace,
    min_iters: usize,
) -> Result<(AlphaParams, f64)> {
    let mut scratch = DvmScratch::new(phase);
    project_into(q, phase, min_iters, true, &mut scratch, None, None)
}

/// Evaluate the equilibrium field for fixed parameters.
pub fn eval_equilibrium(alpha: &AlphaParams, phase: &PhaseSpace) -> EquilibriumField {
    let mut scratch = DvmScratch::new(phase);
    eval_factors(alpha, phase, &mut scratch.gu, &mut scratch.gz);
    let mut values = vec![0.0; phase.n_phase()];
    materialize(phase, &scratch.gu, &scratch.gz, &mut values);
    EquilibriumField {
        values,
        alpha: *alpha,
        theta: alpha.theta(),
    }
}

/// Discrete entropy H'(z) = M(z log z), with 0 log 0 = 0.
pub fn discrete_entropy(field_slice: &[f64], phase: &PhaseSpace) -> Result<f64> {
    if field_slice.len() != phase.n_phase() {
        return Err(Error::InvalidArgument(format!(
            "field slice has {} entries, expected {}",
            field_slice.len(),
            phase.n_phase()
        )));
    }
    let mut h = 0.0;
    for (i, &z) in field_slice.iter().enumerate() {
        if z < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "entropy undefined for negative value {z:.3e} at node {i}"
            )));
        }
        if z > 0.0 {
            h += phase.mom.w[i] * z * z.ln();
        }
    }
    Ok(h)
}
