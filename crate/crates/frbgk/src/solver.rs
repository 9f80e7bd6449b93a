//! BGK solver: transport plus relaxation source, time-step control, and
//! four-stage Runge-Kutta advancement with per-stage positivity limiting.
//!
//! The distribution field is stored element-major with the phase-space index
//! innermost: value(k, i, q, r) = data[((k * n_s + i) * N_v + q) * N_zeta + r].
//! The right-hand side runs as one fused element-parallel pass (transport
//! rows plus the per-node Newton projection and relaxation source), and each
//! RK stage state is built and limited in a single fused pass; on wide fields
//! the step cost is dominated by streaming memory traffic, so passes are kept
//! to a minimum.

use rayon::prelude::*;

use crate::dvm::{self, DvmScratch};
use crate::error::{Error, Result};
use crate::fr::{FrBasis, Mesh1D};
use crate::phase::PhaseSpace;
use crate::state::{MacroState, Primitive};

/// Collision-time closure.
#[derive(Debug, Clone)]
pub enum CollisionModel {
    Constant {
        tau: f64,
    },
    /// tau = tau_ref * (rho_ref / rho) * (theta_ref / theta)^(1 - omega),
    /// mimicking a temperature power-law viscosity.
    PowerLaw {
        tau_ref: f64,
        rho_ref: f64,
        theta_ref: f64,
        omega: f64,
    },
}

/// Collision time from the Knudsen number: tau = sqrt(2 gamma / pi) Kn L / c_s.
pub fn collision_time_from_knudsen(kn: f64, gamma: f64, l_ref: f64, c_s_ref: f64) -> Result<f64> {
    for (name, v) in [("kn", kn), ("gamma", gamma), ("l_ref", l_ref), ("c_s_ref", c_s_ref)] {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok((2.0 * gamma / std::f64::consts::PI).sqrt() * kn * l_ref / c_s_ref)
}

impl CollisionModel {
    /// Evaluate tau for the local macroscopic state.
    pub fn evaluate(&self, q: &MacroState, gamma: f64) -> Result<f64> {
        match self {
            CollisionModel::Constant { tau } => Ok(*tau),
            CollisionModel::PowerLaw {
                tau_ref,
                rho_ref,
                theta_ref,
                omega,
            } => {
                let theta = q.theta(gamma);
                if !(q.rho > 0.0) || !(theta > 0.0) {
                    return Err(Error::InvalidState(format!(
                        "collision time needs rho, theta > 0; got rho = {:.3e}, theta = {:.3e}",
                        q.rho, theta
                    )));
                }
                Ok(tau_ref * (rho_ref / q.rho) * (theta_ref / theta).powf(1.0 - omega))
            }
        }
    }
}

/// Boundary treatment for one domain end.
#[derive(Debug, Clone)]
pub enum BcKind {
    Periodic,
    /// Boundary state equals the interior trace: no effect on the solution.
    Neumann,
    /// Precomputed equilibrium slice over the phase nodes.
    Dirichlet(Vec<f64>),
    /// Reflection f+(u) = f-(-u); needs the mirror-symmetric m = 1 grid.
    SpecularWall,
}

#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub left: BcKind,
    pub right: BcKind,
}

/// The discrete distribution function over (element, node, velocity, zeta).
#[derive(Debug, Clone)]
pub struct DistributionField {
    pub data: Vec<f64>,
    pub n_elements: usize,
    pub n_nodes: usize,
    pub n_phase: usize,
}

impl DistributionField {
    pub fn zeros(n_elements: usize, n_nodes: usize, n_phase: usize) -> Self {
        Self {
            data: vec![0.0; n_elements * n_nodes * n_phase],
            n_elements,
            n_nodes,
            n_phase,
        }
    }

    pub fn n_spatial(&self) -> usize {
        self.n_elements * self.n_nodes
    }

    /// Phase-space slice at spatial node (k, i).
    pub fn slice(&self, k: usize, i: usize) -> &[f64] {
        let start = (k * self.n_nodes + i) * self.n_phase;
        &self.data[start..start + self.n_phase]
    }

    pub fn min_value(&self) -> f64 {
        self.data
            .par_iter()
            .cloned()
            .reduce(|| f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .par_iter()
            .map(|v| v.abs())
            .reduce(|| 0.0, f64::max)
    }
}

/// One diagnostics record.
#[derive(Debug, Clone, Copy)]
pub struct DiagRow {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub mass_err: f64,
    pub min_f: f64,
    pub residual_linf: f64,
}

#[derive(Debug, Clone)]
pub struct RunLog {
    pub rows: Vec<DiagRow>,
    pub steps: usize,
    pub final_residual: f64,
}

/// Scratch buffers reused across right-hand-side evaluations and stages.
pub struct RkWorkspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
    flux: Vec<f64>,
    ghost_left: Vec<f64>,
    ghost_right: Vec<f64>,
    /// Magnitude of the field from the previous limiter pass; used as the
    /// absolute floor for mean-negativity detection.
    scale: f64,
    /// Macroscopic moments at every spatial node of the latest step result.
    moments: Vec<MacroState>,
    /// Minimum field value from the latest step result.
    min_f: f64,
}

impl RkWorkspace {
    pub fn new(field: &DistributionField) -> Self {
        let n = field.data.len();
        let np = field.n_phase;
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            stage: vec![0.0; n],
            flux: vec![0.0; (field.n_elements + 1) * np],
            ghost_left: vec![0.0; np],
            ghost_right: vec![0.0; np],
            scale: field.max_abs(),
            moments: vec![MacroState::new(0.0, 0.0, 0.0); field.n_spatial()],
            min_f: 0.0,
        }
    }
}

enum RhsSlot {
    K1,
    K2,
    K3,
    K4,
}

/// Immutable problem assembly: mesh, basis, phase grids, boundary and
/// collision closures, and the solver controls.
pub struct Solver {
    pub mesh: Mesh1D,
    pub basis: FrBasis,
    pub phase: PhaseSpace,
    pub bc: BoundarySpec,
    pub model: CollisionModel,
    pub dvm_enabled: bool,
    pub dvm_iters: usize,
    pub cfl: f64,
    /// Maximum particle speed for the CFL bound (r_max plus the offset
    /// magnitude when the grid is shifted).
    pub c_max: f64,
}

impl Solver {
    pub fn new(
        mesh: Mesh1D,
        basis: FrBasis,
        phase: PhaseSpace,
        bc: BoundarySpec,
        model: CollisionModel,
    ) -> Result<Self> {
        let periodic_l = matches!(bc.left, BcKind::Periodic);
        let periodic_r = matches!(bc.right, BcKind::Periodic);
        if periodic_l != periodic_r {
            return Err(Error::Config(
                "periodic boundaries must be applied to both ends".into(),
            ));
        }
        for (side, kind) in [("left", &bc.left), ("right", &bc.right)] {
            match kind {
                BcKind::Dirichlet(slice) => {
                    if slice.len() != phase.n_phase() {
                        return Err(Error::Config(format!(
                            "{side} Dirichlet slice has {} values, expected {}",
                            slice.len(),
                            phase.n_phase()
                        )));
                    }
                    if !slice.iter().all(|&v| v > 0.0) {
                        return Err(Error::Config(format!(
                            "{side} Dirichlet slice must be strictly positive"
                        )));
                    }
                }
                BcKind::SpecularWall => {
                    if !phase.vel.is_mirror_symmetric() {
                        return Err(Error::Config(
                            "specular wall needs the m = 1 velocity grid with zero offset"
                                .into(),
                        ));
                    }
                }
                _ => {}
            }
        }
        let c_max = phase.vel.r_max
            + (phase.vel.offset[0].powi(2)
                + phase.vel.offset[1].powi(2)
                + phase.vel.offset[2].powi(2))
            .sqrt();
        Ok(Self {
            mesh,
            basis,
            phase,
            bc,
            model,
            dvm_enabled: true,
            dvm_iters: 2,
            cfl: 0.5,
            c_max,
        })
    }

    pub fn n_spatial(&self) -> usize {
        self.mesh.n_elements() * (self.basis.p + 1)
    }

    fn gamma(&self) -> f64 {
        self.phase.gamma()
    }

    /// Physical coordinates of all solution nodes, element-major.
    pub fn node_coords(&self) -> Vec<f64> {
        let ns = self.basis.p + 1;
        let mut xs = Vec::with_capacity(self.n_spatial());
        for k in 0..self.mesh.n_elements() {
            for i in 0..ns {
                xs.push(self.mesh.node_x(k, i, &self.basis));
            }
        }
        xs
    }

    /// Initialize the field as the modified Maxwellian of the given initial
    /// condition, projected with `init_iters` Newton steps per node. Nodes
    /// that coincide with element faces are evaluated nudged toward the
    /// element interior so discontinuous initial data stays element-aligned.
    pub fn initialize(
        &self,
        ic: &(dyn Fn(f64) -> Primitive + Sync),
        init_iters: usize,
    ) -> Result<DistributionField> {
        let ns = self.basis.p + 1;
        let np = self.phase.n_phase();
        let mut field = DistributionField::zeros(self.mesh.n_elements(), ns, np);
        let gamma = self.gamma();
        let mesh = &self.mesh;
        let basis = &self.basis;
        let phase = &self.phase;
        field
            .data
            .par_chunks_mut(np)
            .enumerate()
            .try_for_each_init(
                || DvmScratch::new(phase),
                |scratch, (node, out)| -> Result<()> {
                    let k = node / ns;
                    let i = node % ns;
                    let x = mesh.node_x(k, i, basis);
                    let xc = 0.5 * (mesh.vertices[k] + mesh.vertices[k + 1]);
                    let x_eval = x + (xc - x) * 1e-12;
                    let q = ic(x_eval).to_conserved(gamma);
                    dvm::project_into(&q, phase, init_iters, true, scratch, Some(out), Some(node))?;
                    Ok(())
                },
            )?;
        Ok(field)
    }

    /// Precompute the equilibrium slice for a Dirichlet boundary state.
    pub fn equilibrium_slice(&self, q: &Primitive, init_iters: usize) -> Result<Vec<f64>> {
        let cons = q.to_conserved(self.gamma());
        let mut scratch = DvmScratch::new(&self.phase);
        let mut out = vec![0.0; self.phase.n_phase()];
        dvm::project_into(&cons, &self.phase, init_iters, true, &mut scratch, Some(&mut out), None)?;
        Ok(out)
    }

    fn fill_ghosts(&self, data: &[f64], ghost_left: &mut [f64], ghost_right: &mut [f64]) {
        let np = self.phase.n_phase();
        let ns = self.basis.p + 1;
        let ne = self.mesh.n_elements();
        let first = &data[0..np];
        let last_start = ((ne - 1) * ns + ns - 1) * np;
        let last = &data[last_start..last_start + np];
        let nz = self.phase.zeta.n_nodes();
        let nv = self.phase.vel.n_nodes();
        match &self.bc.left {
            BcKind::Periodic => ghost_left.copy_from_slice(last),
            BcKind::Neumann => ghost_left.copy_from_slice(first),
            BcKind::Dirichlet(slice) => ghost_left.copy_from_slice(slice),
            BcKind::SpecularWall => {
                for q in 0..nv {
                    let mq = self.phase.vel.mirror_index(q);
                    ghost_left[q * nz..(q + 1) * nz]
                        .copy_from_slice(&first[mq * nz..(mq + 1) * nz]);
                }
            }
        }
        match &self.bc.right {
            BcKind::Periodic => ghost_right.copy_from_slice(first),
            BcKind::Neumann => ghost_right.copy_from_slice(last),
            BcKind::Dirichlet(slice) => ghost_right.copy_from_slice(slice),
            BcKind::SpecularWall => {
                for q in 0..nv {
                    let mq = self.phase.vel.mirror_index(q);
                    ghost_right[q * nz..(q + 1) * nz]
                        .copy_from_slice(&last[mq * nz..(mq + 1) * nz]);
                }
            }
        }
    }

    /// Common interface fluxes in the +x direction, upwinded per velocity node.
    fn interface_fluxes(
        &self,
        data: &[f64],
        ghost_left: &[f64],
        ghost_right: &[f64],
        flux: &mut [f64],
    ) {
        let np = self.phase.n_phase();
        let ns = self.basis.p + 1;
        let ne = self.mesh.n_elements();
        let nz = self.phase.zeta.n_nodes();
        let nv = self.phase.vel.n_nodes();
        let u_nodes = &self.phase.mom.u_vel;
        flux.par_chunks_mut(np)
            .enumerate()
            .with_min_len(16)
            .for_each(|(j, out)| {
                let left = if j == 0 {
                    ghost_left
                } else {
                    let start = ((j - 1) * ns + ns - 1) * np;
                    &data[start..start + np]
                };
                let right = if j == ne {
                    ghost_right
                } else {
                    let start = (j * ns) * np;
                    &data[start..start + np]
                };
                for q in 0..nv {
                    let u = u_nodes[q];
                    let base = q * nz;
                    if u > 0.0 {
                        for r in 0..nz {
                            out[base + r] = u * left[base + r];
                        }
                    } else if u < 0.0 {
                        for r in 0..nz {
                            out[base + r] = u * right[base + r];
                        }
                    } else {
                        out[base..base + nz].fill(0.0);
                    }
                }
            });
    }

    /// Full BGK right-hand side into `out`: advection of every phase-space
    /// node value plus the relaxation source toward the (modified)
    /// Maxwellian, fused into one element-parallel pass. The field is
    /// assumed limited (nonnegative).
    pub fn bgk_rhs(&self, field: &DistributionField, out: &mut DistributionField) -> Result<()> {
        let mut ws = RkWorkspace::new(field);
        self.fill_ghosts(&field.data, &mut ws.ghost_left, &mut ws.ghost_right);
        self.interface_fluxes(&field.data, &ws.ghost_left, &ws.ghost_right, &mut ws.flux);
        self.rhs_fused(field, &ws.flux, &mut out.data)
    }

    fn rhs_into(&self, field: &DistributionField, ws: &mut RkWorkspace, slot: RhsSlot) -> Result<()> {
        self.fill_ghosts(&field.data, &mut ws.ghost_left, &mut ws.ghost_right);
        self.interface_fluxes(&field.data, &ws.ghost_left, &ws.ghost_right, &mut ws.flux);
        let mut k = match slot {
            RhsSlot::K1 => std::mem::take(&mut ws.k1),
            RhsSlot::K2 => std::mem::take(&mut ws.k2),
            RhsSlot::K3 => std::mem::take(&mut ws.k3),
            RhsSlot::K4 => std::mem::take(&mut ws.k4),
        };
        let r = self.rhs_fused(field, &ws.flux, &mut k);
        match slot {
            RhsSlot::K1 => ws.k1 = k,
            RhsSlot::K2 => ws.k2 = k,
            RhsSlot::K3 => ws.k3 = k,
            RhsSlot::K4 => ws.k4 = k,
        }
        r
    }

    fn rhs_fused(&self, field: &DistributionField, flux: &[f64], out: &mut [f64]) -> Result<()> {
        let np = self.phase.n_phase();
        let ns = self.basis.p + 1;
        let gamma = self.gamma();
        let phase = &self.phase;
        let model = &self.model;
        let iters = if self.dvm_enabled { self.dvm_iters } else { 0 };
        let u_phase = &self.phase.mom.u_x[..];
        let diff = &self.basis.diff[..];
        let gl = &self.basis.gl_deriv[..];
        let gr = &self.basis.gr_deriv[..];
        let h = &self.mesh.h[..];
        let data = &field.data[..];

        out.par_chunks_mut(ns * np)
            .enumerate()
            .with_min_len(2)
            .try_for_each_init(
                || (DvmScratch::new(phase), vec![0.0; np]),
                |(scratch, gbuf), (k, out_el)| -> Result<()> {
                    let el = &data[k * ns * np..(k + 1) * ns * np];
                    let inv_jac = 2.0 / h[k];
                    let flux_l = &flux[k * np..(k + 1) * np];
                    let flux_r = &flux[(k + 1) * np..(k + 2) * np];
                    let trace_l = &el[0..np];
                    let trace_r = &el[(ns - 1) * np..ns * np];
                    for (i, row) in out_el.chunks_exact_mut(np).enumerate() {
                        row.fill(0.0);
                        for j in 0..ns {
                            let d = diff[i * ns + j];
                            let fj = &el[j * np..(j + 1) * np];
                            for (r, f) in row.iter_mut().zip(fj) {
                                *r += d * *f;
                            }
                        }
                        let gli = gl[i];
                        let gri = gr[i];
                        let u_phase = &u_phase[..np];
                        for ph in 0..np {
                            let u = u_phase[ph];
                            row[ph] = -inv_jac
                                * (u * row[ph]
                                    + (flux_l[ph] - u * trace_l[ph]) * gli
                                    + (flux_r[ph] - u * trace_r[ph]) * gri);
                        }

                        // relaxation source at this spatial node
                        let node = k * ns + i;
                        let f_row = &el[i * np..(i + 1) * np];
                        let q = phase.mom.moments_unchecked(f_row);
                        let tau = model.evaluate(&q, gamma).map_err(|e| match e {
                            Error::InvalidState(msg) => {
                                Error::InvalidState(format!("{msg} (spatial node {node})"))
                            }
                            other => other,
                        })?;
                        dvm::project_into(&q, phase, iters, self.dvm_enabled, scratch, Some(gbuf), Some(node))?;
                        let inv_tau = 1.0 / tau;
                        for ((o, g), f) in row.iter_mut().zip(gbuf.iter()).zip(f_row) {
                            *o += (*g - *f) * inv_tau;
                        }
                    }
                    Ok(())
                },
            )
    }

    /// Time step: the minimum of the collision time over the domain and the
    /// CFL bound CFL/(2p+1) * h_min / c_max.
    pub fn compute_dt(&self, field: &DistributionField) -> Result<f64> {
        let gamma = self.gamma();
        let tau_min = match &self.model {
            CollisionModel::Constant { tau } => *tau,
            CollisionModel::PowerLaw { .. } => {
                let np = self.phase.n_phase();
                let phase = &self.phase;
                let model = &self.model;
                field
                    .data
                    .par_chunks(np)
                    .with_min_len(32)
                    .map(|row| model.evaluate(&phase.mom.moments_unchecked(row), gamma))
                    .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?
            }
        };
        Ok(tau_min.min(self.dt_cfl()))
    }

    fn dt_cfl(&self) -> f64 {
        self.cfl / (2.0 * self.basis.p as f64 + 1.0) * self.mesh.h_min / self.c_max
    }

    fn dt_from_moments(&self, moments: &[MacroState]) -> Result<f64> {
        let gamma = self.gamma();
        let tau_min = match &self.model {
            CollisionModel::Constant { tau } => *tau,
            CollisionModel::PowerLaw { .. } => {
                let mut tau = f64::INFINITY;
                for q in moments {
                    tau = tau.min(self.model.evaluate(q, gamma)?);
                }
                tau
            }
        };
        Ok(tau_min.min(self.dt_cfl()))
    }

    /// Squeeze-limit one element in place; `buf` holds 3 * np scratch values.
    /// Returns the element's maximum absolute value.
    fn limit_element(
        el: &mut [f64],
        ns: usize,
        np: usize,
        mean_w: &[f64],
        floor: f64,
        k: usize,
        buf: &mut [f64],
    ) -> Result<f64> {
        let (mean, rest) = buf.split_at_mut(np);
        let (min_v, max_v) = rest.split_at_mut(np);
        mean.fill(0.0);
        min_v.fill(f64::INFINITY);
        max_v.fill(0.0);
        for i in 0..ns {
            let row = &el[i * np..(i + 1) * np];
            let m = mean_w[i];
            for ph in 0..np {
                let v = row[ph];
                mean[ph] += m * v;
                min_v[ph] = min_v[ph].min(v);
                max_v[ph] = max_v[ph].max(v.abs());
            }
        }
        let mut el_max = 0.0f64;
        for ph in 0..np {
            let scale = max_v[ph];
            if !scale.is_finite() {
                return Err(Error::BlowUp {
                    step: usize::MAX,
                    time: f64::NAN,
                });
            }
            el_max = el_max.max(scale);
            if min_v[ph] >= 0.0 {
                continue;
            }
            let mean_ph = mean[ph];
            if mean_ph < -1e-12 * scale.max(floor) {
                return Err(Error::MeanNegativity {
                    element: k,
                    mean: mean_ph,
                });
            }
            let denom = mean_ph - min_v[ph];
            if denom < 1e-300 {
                continue;
            }
            let beta = (mean_ph / denom).abs().min(1.0);
            for i in 0..ns {
                let v = &mut el[i * np + ph];
                let s = mean_ph + beta * (*v - mean_ph);
                *v = if s < 0.0 { 0.0 } else { s };
            }
        }
        Ok(el_max)
    }

    /// Squeeze-limit every (element, phase node) pair in place. Returns the
    /// maximum absolute value of the limited field and detects non-finite
    /// values.
    pub fn limit_field(&self, data: &mut [f64], floor: f64) -> Result<f64> {
        let np = self.phase.n_phase();
        let ns = self.basis.p + 1;
        let mean_w = &self.basis.mean_weights;
        let maxima: Vec<f64> = data
            .par_chunks_mut(ns * np)
            .enumerate()
            .with_min_len(4)
            .map_init(
                || vec![0.0f64; 3 * np],
                |buf, (k, el)| Self::limit_element(el, ns, np, mean_w, floor, k, buf),
            )
            .collect::<Result<Vec<f64>>>()?;
        Ok(maxima.into_iter().fold(0.0, f64::max))
    }

    /// out = base + coef * k, limited element by element in one pass.
    fn stage_combine_limit(
        &self,
        base: &[f64],
        k_buf: &[f64],
        coef: f64,
        out: &mut [f64],
        floor: f64,
    ) -> Result<f64> {
        let np = self.phase.n_phase();
        let ns = self.basis.p + 1;
        let block = ns * np;
        let mean_w = &self.basis.mean_weights;
        let maxima: Vec<f64> = out
            .par_chunks_mut(block)
            .enumerate()
            .with_min_len(4)
            .map_init(
                || vec![0.0f64; 3 * np],
                |buf, (k, out_el)| {
                    let b = &base[k * block..(k + 1) * block];
                    let kv = &k_buf[k * block..(k + 1) * block];
                    for i in 0..block {
                        out_el[i] = b[i] + coef * kv[i];
                    }
                    Self::limit_element(out_el, ns, np, mean_w, floor, k, buf)
                },
            )
            .collect::<Result<Vec<f64>>>()?;
        Ok(maxima.into_iter().fold(0.0, f64::max))
    }

    /// In-place final RK4 combination, limiting, per-node moments, and the
    /// global minimum, all in one pass.
    #[allow(clippy::too_many_arguments)]
    fn final_combine_limit(
        &self,
        field: &mut [f64],
        ws_k: (&[f64], &[f64], &[f64], &[f64]),
        dt: f64,
        floor: f64,
        moments: &mut [MacroState],
        min_out: &mut f64,
    ) -> Result<f64> {
        let np = self.phase.n_phase();
        let ns = self.basis.p + 1;
        let block = ns * np;
        let mean_w = &self.basis.mean_weights;
        let (k1, k2, k3, k4) = ws_k;
        let sixth = dt / 6.0;
        let phase = &self.phase;
        let stats: Vec<(f64, f64)> = field
            .par_chunks_mut(block)
            .zip(moments.par_chunks_mut(ns))
            .enumerate()
            .with_min_len(4)
            .map_init(
                || vec![0.0f64; 3 * np],
                |buf, (k, (el, mom_rows))| -> Result<(f64, f64)> {
                    let off = k * block;
                    let a = &k1[off..off + block];
                    let b = &k2[off..off + block];
                    let c = &k3[off..off + block];
                    let d = &k4[off..off + block];
                    for i in 0..block {
                        el[i] += sixth * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
                    }
                    let el_max = Self::limit_element(el, ns, np, mean_w, floor, k, buf)?;
                    let mut el_min = f64::INFINITY;
                    for (i, mom) in mom_rows.iter_mut().enumerate() {
                        let row = &el[i * np..(i + 1) * np];
                        *mom = phase.mom.moments_unchecked(row);
                        for v in row {
                            el_min = el_min.min(*v);
                        }
                    }
                    Ok((el_max, el_min))
                },
            )
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let mut max_all = 0.0f64;
        let mut min_all = f64::INFINITY;
        for (mx, mn) in stats {
            max_all = max_all.max(mx);
            min_all = min_all.min(mn);
        }
        *min_out = min_all;
        Ok(max_all)
    }

    /// Classic four-stage RK4 step with the squeeze limiter applied to every
    /// stage state before its derivative evaluation and to the final state.
    /// The entry field must already be limiter-clean (as produced by
    /// [`initialize`](Self::initialize) or a previous step), which makes the
    /// first stage's limiter application an exact the no-op it would be.
    pub fn rk4_step(
        &self,
        field: &mut DistributionField,
        dt: f64,
        step: usize,
        time: f64,
        ws: &mut RkWorkspace,
    ) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {dt:.3e}"
            )));
        }
        let stamp = |e: Error| match e {
            Error::BlowUp { .. } => Error::BlowUp { step, time },
            other => other,
        };
        // negativity tolerance floor: element means are judged against the
        // global field magnitude, not the element's own, so rounding noise
        // near steep fronts (the stage combine cancels terms of size f/tau)
        // cannot masquerade as a CFL violation; genuine violations sit many
        // orders above -1e-12 * max f and inadmissible moments are caught
        // independently by the equilibrium evaluation
        let floor = ws.scale;

        self.rhs_into(field, ws, RhsSlot::K1)?;

        let half = 0.5 * dt;
        for (slot, coef) in [(RhsSlot::K2, half), (RhsSlot::K3, half), (RhsSlot::K4, dt)] {
            {
                let k_src = match slot {
                    RhsSlot::K2 => &ws.k1,
                    RhsSlot::K3 => &ws.k2,
                    RhsSlot::K4 => &ws.k3,
                    RhsSlot::K1 => unreachable!(),
                };
                let mut stage = std::mem::take(&mut ws.stage);
                let max = self
                    .stage_combine_limit(&field.data, k_src, coef, &mut stage, floor)
                    .map_err(stamp)?;
                ws.scale = max;
                ws.stage = stage;
            }
            let stage_field = DistributionField {
                data: std::mem::take(&mut ws.stage),
                n_elements: field.n_elements,
                n_nodes: field.n_nodes,
                n_phase: field.n_phase,
            };
            let r = self.rhs_into(&stage_field, ws, slot);
            ws.stage = stage_field.data;
            r?;
        }

        {
            let (k1, k2, k3, k4) = (&ws.k1, &ws.k2, &ws.k3, &ws.k4);
            let mut min_f = 0.0;
            let max = self
                .final_combine_limit(
                    &mut field.data,
                    (k1, k2, k3, k4),
                    dt,
                    floor,
                    &mut ws.moments,
                    &mut min_f,
                )
                .map_err(stamp)?;
            ws.scale = max;
            ws.min_f = min_f;
        }
        Ok(())
    }

    /// Density at every spatial node.
    pub fn node_densities(&self, field: &DistributionField, out: &mut Vec<f64>) {
        let np = self.phase.n_phase();
        out.clear();
        out.reserve(field.n_spatial());
        let w = &self.phase.mom.w;
        field
            .data
            .par_chunks(np)
            .with_min_len(32)
            .map(|row| row.iter().zip(w).map(|(f, wi)| wi * f).sum::<f64>())
            .collect_into_vec(out);
    }

    /// Macroscopic moments at every spatial node.
    pub fn node_moments(&self, field: &DistributionField) -> Vec<MacroState> {
        let np = self.phase.n_phase();
        field
            .data
            .par_chunks(np)
            .with_min_len(32)
            .map(|row| self.phase.mom.moments_unchecked(row))
            .collect()
    }

    /// Domain integrals of the conserved variables via element means.
    fn integrate_moments(&self, states: &[MacroState]) -> (f64, f64, f64) {
        let ns = self.basis.p + 1;
        let mut mass = 0.0;
        let mut momentum = 0.0;
        let mut energy = 0.0;
        for k in 0..self.mesh.n_elements() {
            let h = self.mesh.h[k];
            for i in 0..ns {
                let q = &states[k * ns + i];
                let w = h * self.basis.mean_weights[i];
                mass += w * q.rho;
                momentum += w * q.mom;
                energy += w * q.energy;
            }
        }
        (mass, momentum, energy)
    }

    /// Domain integrals of the conserved variables via element means.
    pub fn integrate_conserved(&self, field: &DistributionField) -> (f64, f64, f64) {
        self.integrate_moments(&self.node_moments(field))
    }

    /// Advance to `t_final`, recording diagnostics every `output_interval`
    /// time units (plus the initial and final states). The last step is
    /// clipped to land exactly on `t_final`.
    pub fn run(
        &self,
        field: &mut DistributionField,
        t_final: f64,
        output_interval: Option<f64>,
    ) -> Result<RunLog> {
        let mut rows = Vec::new();
        let stats = self.run_collect(field, t_final, output_interval, None, &mut rows)?;
        Ok(RunLog {
            rows,
            steps: stats.0,
            final_residual: stats.1,
        })
    }

    /// Like [`run`](Self::run), but stops early once the temporal residual
    /// max|d rho|/dt drops below `stop_residual`.
    pub fn run_steady(
        &self,
        field: &mut DistributionField,
        t_max: f64,
        output_interval: Option<f64>,
        stop_residual: f64,
    ) -> Result<RunLog> {
        let mut rows = Vec::new();
        let stats =
            self.run_collect(field, t_max, output_interval, Some(stop_residual), &mut rows)?;
        Ok(RunLog {
            rows,
            steps: stats.0,
            final_residual: stats.1,
        })
    }

    /// Advance with diagnostics appended to `rows` as the run progresses, so
    /// a failed run still leaves its partial log behind. Returns
    /// (steps, final residual).
    pub fn run_collect(
        &self,
        field: &mut DistributionField,
        t_final: f64,
        output_interval: Option<f64>,
        stop_residual: Option<f64>,
        rows: &mut Vec<DiagRow>,
    ) -> Result<(usize, f64)> {
        if t_final < 0.0 {
            return Err(Error::InvalidArgument("t_final must be nonnegative".into()));
        }
        let mut moments = self.node_moments(field);
        let (mass0, mom0, e0) = self.integrate_moments(&moments);
        rows.push(DiagRow {
            t: 0.0,
            mass: mass0,
            momentum: mom0,
            energy: e0,
            mass_err: 0.0,
            min_f: field.min_value(),
            residual_linf: 0.0,
        });
        if t_final == 0.0 {
            return Ok((0, 0.0));
        }
        let interval = output_interval.unwrap_or(t_final);
        let mut next_record = interval;
        let mut ws = RkWorkspace::new(field);
        let mut rho_prev: Vec<f64> = moments.iter().map(|q| q.rho).collect();

        let mut t = 0.0;
        let mut step = 0usize;
        let mut residual = f64::INFINITY;
        while t < t_final * (1.0 - 1e-14) {
            let dt_raw = self.dt_from_moments(&moments)?;
            let dt = dt_raw.min(t_final - t);
            self.rk4_step(field, dt, step, t, &mut ws)?;
            t += dt;
            step += 1;
            std::mem::swap(&mut moments, &mut ws.moments);
            let mut dmax = 0.0f64;
            for (q, prev) in moments.iter().zip(&rho_prev) {
                dmax = dmax.max((q.rho - prev).abs());
            }
            residual = dmax / dt;
            for (dst, q) in rho_prev.iter_mut().zip(&moments) {
                *dst = q.rho;
            }

            let steady = stop_residual.map_or(false, |stop| residual < stop);
            let finished = t >= t_final * (1.0 - 1e-14) || steady;
            if finished || t + 1e-14 * t_final >= next_record {
                let (mass, momentum, energy) = self.integrate_moments(&moments);
                rows.push(DiagRow {
                    t,
                    mass,
                    momentum,
                    energy,
                    mass_err: (mass - mass0).abs(),
                    min_f: ws.min_f,
                    residual_linf: residual,
                });
                while next_record <= t + 1e-14 * t_final {
                    next_record += interval;
                }
            }
            if steady {
                break;
            }
        }
        Ok((step, residual))
    }
}
