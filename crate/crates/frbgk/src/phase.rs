//! Discrete velocity and internal-energy spaces.
//!
//! The velocity space is truncated to a ball of radius `r_max` around an
//! offset velocity and discretized nodally: Gauss-Legendre in the radial
//! direction, uniformly spaced angles for m = 2, 3. For m = 1 the nodes are
//! the concatenation of two Gauss-Legendre rules on [-r_max, 0] and
//! [0, r_max]. The internal-energy axis uses Gauss-Legendre on (0, zeta_max].
//!
//! Weights are built so the discrete sum approximates the Lebesgue integral
//! over the ball: radial factor r^(m-1) with angular weights dphi and
//! dpsi*sin(psi), which makes the weight sum equal the ball volume.

use crate::error::{Error, Result};
use crate::state::{MacroState, Primitive};

/// Evaluate the Legendre polynomial P_n and its derivative at `x` by the
/// three-term recurrence.
pub(crate) fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        // endpoint value via the closed form
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        sign * 0.5 * (n * (n + 1)) as f64
    } else {
        (n as f64) * (x * p - p_prev) / (x * x - 1.0)
    };
    (p, dp)
}

/// n-point Gauss-Legendre rule on [-1, 1]. Nodes strictly increasing,
/// weights positive summing to 2.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs at least one point".into(),
        ));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // cos guess descends from +1; store ascending
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Thermal-radius multiplier: a normalized Maxwellian at distance
/// k * c_s from its mean has relative magnitude eps_u.
pub fn compute_k(eps_u: f64, gamma: f64) -> Result<f64> {
    if !(eps_u > 0.0 && eps_u < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "velocity tolerance must lie in (0, 1), got {eps_u:.3e}"
        )));
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "specific heat ratio must exceed 1, got {gamma}"
        )));
    }
    Ok((-(2.0 / gamma) * eps_u.ln()).sqrt())
}

/// Radial extent of the velocity domain from the initial macroscopic field:
/// k * max c_s plus half the component-wise velocity spread.
pub fn compute_r_max(initial: &[Primitive], eps_u: f64, gamma: f64) -> Result<f64> {
    if initial.is_empty() {
        return Err(Error::InvalidArgument("empty initial field".into()));
    }
    let k = compute_k(eps_u, gamma)?;
    let mut cs_max = 0.0f64;
    let mut u_min = f64::INFINITY;
    let mut u_max = f64::NEG_INFINITY;
    for q in initial {
        q.check_admissible()?;
        cs_max = cs_max.max(q.sound_speed(gamma));
        u_min = u_min.min(q.u);
        u_max = u_max.max(q.u);
    }
    Ok(k * cs_max + 0.5 * (u_max - u_min))
}

/// Velocity offset: component-wise average of the extrema of the initial
/// macroscopic velocity.
pub fn compute_velocity_offset(initial: &[Primitive]) -> Result<f64> {
    if initial.is_empty() {
        return Err(Error::InvalidArgument("empty initial field".into()));
    }
    let mut u_min = f64::INFINITY;
    let mut u_max = f64::NEG_INFINITY;
    for q in initial {
        u_min = u_min.min(q.u);
        u_max = u_max.max(q.u);
    }
    Ok(0.5 * (u_max + u_min))
}

/// Internal-energy extent: zeta_max = theta_max * x*, where x* is the largest
/// root of x^(delta/2 - 1) exp(-x) = eps_zeta on the decreasing tail.
pub fn compute_zeta_max(delta: f64, eps_zeta: f64, theta_max: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(
            "zeta extent is only defined for delta > 0".into(),
        ));
    }
    if !(eps_zeta > 0.0 && eps_zeta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "internal energy tolerance must lie in (0, 1), got {eps_zeta:.3e}"
        )));
    }
    if !(theta_max > 0.0) {
        return Err(Error::InvalidArgument(
            "theta_max must be positive".into(),
        ));
    }
    let a = 0.5 * delta - 1.0;
    let log_eps = eps_zeta.ln();
    // f(x) = a ln x - x - ln(eps); decreasing on the bracket, which starts
    // right of the mode at x = a.
    let f = |x: f64| a * x.ln() - x - log_eps;
    let mut lo = delta.max(2.0) * 0.5;
    let mut hi = 200.0;
    if f(lo) < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "eps_zeta = {eps_zeta:.3e} too large: no root beyond the mode"
        )));
    }
    if f(hi) > 0.0 {
        return Err(Error::InvalidArgument(
            "eps_zeta too small for the bisection bracket".into(),
        ));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(theta_max * 0.5 * (lo + hi))
}

/// Truncated, nodally discretized velocity space.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    /// Velocity dimension (1, 2, or 3).
    pub m: usize,
    /// Cartesian node coordinates, zero-padded to three components.
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub r_max: f64,
    /// Velocity offset U_0, zero-padded.
    pub offset: [f64; 3],
    /// (N_r, N_phi, N_psi) counts; unused angles are 1.
    pub shape: (usize, usize, usize),
}

impl VelocityGrid {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Whether the node set maps onto itself under u -> -u, as required for
    /// specular walls. Holds for m = 1 with zero offset, where
    /// node(i) = -node(N - 1 - i).
    pub fn is_mirror_symmetric(&self) -> bool {
        self.m == 1 && self.offset[0] == 0.0
    }

    /// Index of the node at -u for the mirror-symmetric m = 1 grid.
    pub fn mirror_index(&self, q: usize) -> usize {
        self.n_nodes() - 1 - q
    }
}

/// Internal-energy nodes and weights. For delta = 0 the grid is the inert
/// singleton {zeta = 0, weight 1}.
#[derive(Debug, Clone)]
pub struct InternalEnergyGrid {
    pub delta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub zeta_max: f64,
}

impl InternalEnergyGrid {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_inert(&self) -> bool {
        self.delta == 0.0
    }
}

/// Build the velocity grid.
///
/// For m = 1, `n_r` is the total 1D node count N_v and must be even; the
/// nodes are two N_v/2-point Gauss-Legendre rules on [-r_max, 0] and
/// [0, r_max] shifted by the offset.
pub fn build_velocity_grid(
    m: usize,
    n_r: usize,
    n_phi: usize,
    n_psi: usize,
    r_max: f64,
    offset: [f64; 3],
) -> Result<VelocityGrid> {
    if !(r_max > 0.0) {
        return Err(Error::InvalidArgument("r_max must be positive".into()));
    }
    match m {
        1 => {
            if n_r < 2 || n_r % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "1D velocity node count must be even and at least 2, got {n_r}"
                )));
            }
            let half = n_r / 2;
            let (xg, wg) = gauss_legendre(half)?;
            let mut nodes = Vec::with_capacity(n_r);
            let mut weights = Vec::with_capacity(n_r);
            // [-r_max, 0]
            for i in 0..half {
                nodes.push([-r_max + 0.5 * r_max * (xg[i] + 1.0) + offset[0], 0.0, 0.0]);
                weights.push(0.5 * r_max * wg[i]);
            }
            // [0, r_max]
            for i in 0..half {
                nodes.push([0.5 * r_max * (xg[i] + 1.0) + offset[0], 0.0, 0.0]);
                weights.push(0.5 * r_max * wg[i]);
            }
            Ok(VelocityGrid {
                m,
                nodes,
                weights,
                r_max,
                offset,
                shape: (n_r, 1, 1),
            })
        }
        2 => {
            if n_r < 1 || n_phi < 1 {
                return Err(Error::InvalidArgument(format!(
                    "polar grid needs n_r >= 1 and n_phi >= 1, got ({n_r}, {n_phi})"
                )));
            }
            let (xg, wg) = gauss_legendre(n_r)?;
            let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
            let mut nodes = Vec::with_capacity(n_r * n_phi);
            let mut weights = Vec::with_capacity(n_r * n_phi);
            for i in 0..n_r {
                let r = 0.5 * r_max * (xg[i] + 1.0);
                let wr = 0.5 * r_max * wg[i] * r;
                for j in 0..n_phi {
                    let phi = j as f64 * dphi;
                    nodes.push([
                        r * phi.cos() + offset[0],
                        r * phi.sin() + offset[1],
                        0.0,
                    ]);
                    weights.push(wr * dphi);
                }
            }
            Ok(VelocityGrid {
                m,
                nodes,
                weights,
                r_max,
                offset,
                shape: (n_r, n_phi, 1),
            })
        }
        3 => {
            if n_r < 1 || n_phi < 1 || n_psi < 1 {
                return Err(Error::InvalidArgument(format!(
                    "spherical grid needs positive counts, got ({n_r}, {n_phi}, {n_psi})"
                )));
            }
            let (xg, wg) = gauss_legendre(n_r)?;
            let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
            let dpsi = std::f64::consts::PI / n_psi as f64;
            let mut nodes = Vec::with_capacity(n_r * n_phi * n_psi);
            let mut weights = Vec::with_capacity(n_r * n_phi * n_psi);
            for i in 0..n_r {
                let r = 0.5 * r_max * (xg[i] + 1.0);
                let wr = 0.5 * r_max * wg[i] * r * r;
                for j in 0..n_phi {
                    let phi = j as f64 * dphi;
                    for l in 0..n_psi {
                        let psi = (l as f64 + 0.5) * dpsi;
                        nodes.push([
                            r * psi.sin() * phi.cos() + offset[0],
                            r * psi.sin() * phi.sin() + offset[1],
                            r * psi.cos() + offset[2],
                        ]);
                        weights.push(wr * dphi * dpsi * psi.sin());
                    }
                }
            }
            Ok(VelocityGrid {
                m,
                nodes,
                weights,
                r_max,
                offset,
                shape: (n_r, n_phi, n_psi),
            })
        }
        _ => Err(Error::InvalidArgument(format!(
            "velocity dimension must be 1, 2, or 3, got {m}"
        ))),
    }
}

/// Build the internal-energy grid: normalized Gauss-Legendre on (0, zeta_max].
pub fn build_internal_energy_grid(
    delta: f64,
    n_zeta: usize,
    zeta_max: f64,
) -> Result<InternalEnergyGrid> {
    if delta == 0.0 {
        return Ok(InternalEnergyGrid {
            delta: 0.0,
            nodes: vec![0.0],
            weights: vec![1.0],
            zeta_max: 0.0,
        });
    }
    if delta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "internal degrees of freedom must be nonnegative, got {delta}"
        )));
    }
    if n_zeta < 1 {
        return Err(Error::InvalidArgument(
            "internal energy grid needs at least one node".into(),
        ));
    }
    if !(zeta_max > 0.0) {
        return Err(Error::InvalidArgument(
            "zeta_max must be positive for delta > 0".into(),
        ));
    }
    let (xg, wg) = gauss_legendre(n_zeta)?;
    let nodes = xg
        .iter()
        .map(|x| 0.5 * zeta_max * (x + 1.0))
        .collect::<Vec<_>>();
    let weights = wg.iter().map(|w| 0.5 * zeta_max * w).collect();
    Ok(InternalEnergyGrid {
        delta,
        nodes,
        weights,
        zeta_max,
    })
}

/// Discrete nodal integration operator over the combined velocity x zeta
/// space, with the collision invariants psi = [1, u, (u.u)/2 + zeta]
/// pre-evaluated at every node pair.
///
/// Node pairs are flattened velocity-major: index = q * N_zeta + r.
#[derive(Debug, Clone)]
pub struct MomentOperator {
    pub n_vel: usize,
    pub n_zeta: usize,
    /// Combined quadrature weight w_q * w_r.
    pub w: Vec<f64>,
    /// w * u_x, for the momentum moment.
    pub wu: Vec<f64>,
    /// w * ((u.u)/2 + zeta), for the energy moment.
    pub we: Vec<f64>,
    /// First velocity component per node pair (the 1D advection speed).
    pub u_x: Vec<f64>,
    /// Energy invariant (u.u)/2 + zeta per node pair.
    pub e: Vec<f64>,
    /// Per-velocity-node data for separable equilibrium contractions.
    pub w_vel: Vec<f64>,
    pub u_vel: Vec<f64>,
    /// (u.u)/2 over all m components, per velocity node.
    pub half_uu_vel: Vec<f64>,
    /// Squared distance of the pinned components from the offset.
    pub pinned_sq_vel: Vec<f64>,
    /// Per-internal-energy-node data.
    pub w_zeta: Vec<f64>,
    pub zeta_nodes: Vec<f64>,
}

impl MomentOperator {
    pub fn new(vel: &VelocityGrid, zeta: &InternalEnergyGrid) -> Self {
        let n_vel = vel.n_nodes();
        let n_zeta = zeta.n_nodes();
        let n = n_vel * n_zeta;
        let mut w = Vec::with_capacity(n);
        let mut wu = Vec::with_capacity(n);
        let mut we = Vec::with_capacity(n);
        let mut u_x = Vec::with_capacity(n);
        let mut e = Vec::with_capacity(n);
        let mut w_vel = Vec::with_capacity(n_vel);
        let mut u_vel = Vec::with_capacity(n_vel);
        let mut half_uu_vel = Vec::with_capacity(n_vel);
        let mut pinned_sq_vel = Vec::with_capacity(n_vel);
        for q in 0..n_vel {
            let u = vel.nodes[q];
            let uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
            let mut pinned = 0.0;
            for i in 1..vel.m {
                let d = u[i] - vel.offset[i];
                pinned += d * d;
            }
            w_vel.push(vel.weights[q]);
            u_vel.push(u[0]);
            half_uu_vel.push(0.5 * uu);
            pinned_sq_vel.push(pinned);
            for r in 0..n_zeta {
                let wc = vel.weights[q] * zeta.weights[r];
                let ec = 0.5 * uu + zeta.nodes[r];
                w.push(wc);
                wu.push(wc * u[0]);
                we.push(wc * ec);
                u_x.push(u[0]);
                e.push(ec);
            }
        }
        Self {
            n_vel,
            n_zeta,
            w,
            wu,
            we,
            u_x,
            e,
            w_vel,
            u_vel,
            half_uu_vel,
            pinned_sq_vel,
            w_zeta: zeta.weights.clone(),
            zeta_nodes: zeta.nodes.clone(),
        }
    }

    pub fn n_phase(&self) -> usize {
        self.w.len()
    }

    /// Discrete moments Q = [sum w f, sum w u f, sum w ((u.u)/2 + zeta) f].
    pub fn moments(&self, f_slice: &[f64]) -> Result<MacroState> {
        if f_slice.len() != self.w.len() {
            return Err(Error::InvalidArgument(format!(
                "field slice has {} entries, expected {}",
                f_slice.len(),
                self.w.len()
            )));
        }
        Ok(self.moments_unchecked(f_slice))
    }

    #[inline]
    pub(crate) fn moments_unchecked(&self, f_slice: &[f64]) -> MacroState {
        let n = f_slice.len();
        let (w, wu, we) = (&self.w[..n], &self.wu[..n], &self.we[..n]);
        let mut q0 = 0.0;
        let mut q1 = 0.0;
        let mut q2 = 0.0;
        for i in 0..n {
            let f = f_slice[i];
            q0 += w[i] * f;
            q1 += wu[i] * f;
            q2 += we[i] * f;
        }
        MacroState::new(q0, q1, q2)
    }
}

/// The velocity grid, internal-energy grid, and their moment operator,
/// bundled as the full phase-space discretization for one run.
#[derive(Debug, Clone)]
pub struct PhaseSpace {
    pub vel: VelocityGrid,
    pub zeta: InternalEnergyGrid,
    pub mom: MomentOperator,
}

impl PhaseSpace {
    pub fn new(vel: VelocityGrid, zeta: InternalEnergyGrid) -> Self {
        let mom = MomentOperator::new(&vel, &zeta);
        Self { vel, zeta, mom }
    }

    pub fn n_phase(&self) -> usize {
        self.mom.n_phase()
    }

    /// gamma implied by the velocity dimension and internal degrees of freedom.
    pub fn gamma(&self) -> f64 {
        crate::state::gamma_from_dof(self.vel.m, self.zeta.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(nodes: &[f64], weights: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        nodes.iter().zip(weights).map(|(&x, &w)| w * f(x)).sum()
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let (n1, w1) = gauss_legendre(1).unwrap();
        assert_eq!(n1, vec![0.0]);
        assert_eq!(w1, vec![2.0]);

        let (n2, w2) = gauss_legendre(2).unwrap();
        let x = 1.0 / 3.0f64.sqrt();
        assert!((n2[0] + x).abs() < 1e-15);
        assert!((n2[1] - x).abs() < 1e-15);
        assert!((w2[0] - 1.0).abs() < 1e-15);
        assert!((w2[1] - 1.0).abs() < 1e-15);

        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn gauss_legendre_exactness_degree_15() {
        let (nodes, weights) = gauss_legendre(8).unwrap();
        assert!(integrate(&nodes, &weights, |x| x.powi(15)).abs() < 1e-14);
        let even = integrate(&nodes, &weights, |x| x.powi(14));
        assert!((even - 2.0 / 15.0).abs() < 1e-14);
        // degree 16 is beyond the rule
        let beyond = integrate(&nodes, &weights, |x| x.powi(16));
        assert!((beyond - 2.0 / 17.0).abs() > 1e-8);
    }

    #[test]
    fn gauss_legendre_structure() {
        for n in [3, 5, 16, 64] {
            let (nodes, weights) = gauss_legendre(n).unwrap();
            for i in 1..n {
                assert!(nodes[i] > nodes[i - 1]);
            }
            assert!(nodes[0] > -1.0 && nodes[n - 1] < 1.0);
            assert!(weights.iter().all(|&w| w > 0.0));
            let total: f64 = weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn thermal_multiplier() {
        let k = compute_k(1e-15, 1.4).unwrap();
        assert!((k - 7.0243).abs() < 1e-3);
        // relaxing the tolerance to 1e-6 shrinks the extent by 37%
        for gamma in [1.4, 5.0 / 3.0, 3.0] {
            let ratio = compute_k(1e-6, gamma).unwrap() / compute_k(1e-15, gamma).unwrap();
            assert!((ratio - 0.632).abs() < 1e-3);
        }
        // eps -> 1 collapses the extent
        assert!(compute_k(1.0 - 1e-12, 2.0).unwrap() < 1e-5);
        assert!(compute_k(1.0, 1.4).is_err());
        assert!(compute_k(1e-3, 1.0).is_err());
    }

    #[test]
    fn radial_extent_uniform_state() {
        let field = vec![Primitive::new(1.0, 0.0, 1.0); 8];
        let r = compute_r_max(&field, 1e-15, 3.0).unwrap();
        let k = (-(2.0 / 3.0) * 1e-15f64.ln()).sqrt();
        assert!((r - k * 3.0f64.sqrt()).abs() < 1e-12);
        assert!((r - 8.311).abs() < 1e-2);
    }

    #[test]
    fn radial_extent_velocity_spread() {
        let base = vec![Primitive::new(1.0, -2.0, 1.0), Primitive::new(1.0, 2.0, 1.0)];
        let uniform = vec![Primitive::new(1.0, 0.0, 1.0)];
        let gamma = 1.4;
        let spread = compute_r_max(&base, 1e-15, gamma).unwrap();
        let plain = compute_r_max(&uniform, 1e-15, gamma).unwrap();
        assert!((spread - plain - 2.0).abs() < 1e-12);
    }

    #[test]
    fn radial_extent_sod_states() {
        let field = vec![
            Primitive::new(1.0, 0.0, 1.0),
            Primitive::new(0.125, 0.0, 0.1),
        ];
        let gamma = 1.4;
        let r = compute_r_max(&field, 1e-15, gamma).unwrap();
        let k = compute_k(1e-15, gamma).unwrap();
        let cs_left = (1.4f64).sqrt();
        assert!((r - k * cs_left).abs() < 1e-12);
        // a vacuum state anywhere is rejected
        let bad = vec![Primitive::new(1.0, 0.0, -0.1)];
        assert!(compute_r_max(&bad, 1e-15, gamma).is_err());
    }

    #[test]
    fn velocity_offset() {
        let uniform = vec![Primitive::new(1.0, 1.0, 1.0); 3];
        assert_eq!(compute_velocity_offset(&uniform).unwrap(), 1.0);

        let expansion = vec![Primitive::new(1.0, -2.0, 0.4), Primitive::new(1.0, 2.0, 0.4)];
        assert_eq!(compute_velocity_offset(&expansion).unwrap(), 0.0);

        let sine: Vec<_> = (0..1000)
            .map(|i| {
                let x = i as f64 / 1000.0 * 2.0 * std::f64::consts::PI;
                Primitive::new(1.0, x.sin(), 1.0)
            })
            .collect();
        assert!(compute_velocity_offset(&sine).unwrap().abs() < 1e-4);
    }

    #[test]
    fn zeta_extent_table_values() {
        assert!((compute_zeta_max(2.0, 1e-2, 1.0).unwrap() - 4.605).abs() < 1e-3);
        assert!((compute_zeta_max(4.0, 1e-6, 1.0).unwrap() - 16.627).abs() < 1e-3);
        assert!((compute_zeta_max(5.0, 1e-14, 1.0).unwrap() - 37.680).abs() < 1e-3);
        // theta_max scales the extent linearly
        let base = compute_zeta_max(3.0, 1e-8, 1.0).unwrap();
        let scaled = compute_zeta_max(3.0, 1e-8, 2.5).unwrap();
        assert!((scaled - 2.5 * base).abs() < 1e-9);
        // tolerance above the tail has no root
        assert!(compute_zeta_max(4.0, 0.9, 1.0).is_err());
        assert!(compute_zeta_max(0.0, 1e-6, 1.0).is_err());
    }

    #[test]
    fn grid_1d_two_nodes() {
        let g = build_velocity_grid(1, 2, 1, 1, 1.0, [0.0; 3]).unwrap();
        assert_eq!(g.n_nodes(), 2);
        assert!((g.nodes[0][0] + 0.5).abs() < 1e-15);
        assert!((g.nodes[1][0] - 0.5).abs() < 1e-15);
        assert!((g.weights[0] - 1.0).abs() < 1e-15);
        assert!((g.weights[1] - 1.0).abs() < 1e-15);
        let total: f64 = g.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_1d_symmetry_and_bounds() {
        let g = build_velocity_grid(1, 16, 1, 1, 5.0, [0.0; 3]).unwrap();
        let n = g.n_nodes();
        for i in 0..n {
            assert!((g.nodes[i][0] + g.nodes[n - 1 - i][0]).abs() < 1e-14);
            assert!((g.weights[i] - g.weights[n - 1 - i]).abs() < 1e-14);
            assert!(g.nodes[i][0].abs() < 5.0);
            assert!(g.weights[i] > 0.0);
        }
        assert!(g.is_mirror_symmetric());
        assert!(!build_velocity_grid(1, 16, 1, 1, 5.0, [1.0, 0.0, 0.0])
            .unwrap()
            .is_mirror_symmetric());
        assert!(build_velocity_grid(1, 7, 1, 1, 5.0, [0.0; 3]).is_err());
    }

    #[test]
    fn grid_2d_weights_sum_to_disk_area() {
        for (nr, nphi) in [(4, 8), (8, 16), (12, 9)] {
            let r_max = 3.0;
            let g = build_velocity_grid(2, nr, nphi, 1, r_max, [1.0, -2.0, 0.0]).unwrap();
            assert_eq!(g.n_nodes(), nr * nphi);
            let total: f64 = g.weights.iter().sum();
            let disk = std::f64::consts::PI * r_max * r_max;
            assert!((total - disk).abs() < 1e-11 * disk);
            for (node, w) in g.nodes.iter().zip(&g.weights) {
                assert!(*w > 0.0);
                let dx = node[0] - 1.0;
                let dy = node[1] + 2.0;
                assert!((dx * dx + dy * dy).sqrt() <= r_max + 1e-12);
            }
        }
    }

    #[test]
    fn grid_3d_weights_approach_ball_volume() {
        let r_max: f64 = 2.0;
        let ball = 4.0 / 3.0 * std::f64::consts::PI * r_max.powi(3);
        let mut prev_err = f64::INFINITY;
        for npsi in [2, 4, 8, 16] {
            let g = build_velocity_grid(3, 6, 8, npsi, r_max, [0.0; 3]).unwrap();
            assert_eq!(g.n_nodes(), 6 * 8 * npsi);
            let total: f64 = g.weights.iter().sum();
            let err = (total - ball).abs() / ball;
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-2);
    }

    #[test]
    fn moment_operator_basics() {
        let vel = build_velocity_grid(1, 8, 1, 1, 6.0, [0.0; 3]).unwrap();
        let zeta = build_internal_energy_grid(2.0, 4, 10.0).unwrap();
        let op = MomentOperator::new(&vel, &zeta);
        assert_eq!(op.n_phase(), 32);

        let zeros = vec![0.0; 32];
        let q = op.moments(&zeros).unwrap();
        assert_eq!((q.rho, q.mom, q.energy), (0.0, 0.0, 0.0));

        // indicator normalized at a single node pair
        let idx = 3 * op.n_zeta + 1;
        let mut f = vec![0.0; 32];
        f[idx] = 1.0 / op.w[idx];
        let q = op.moments(&f).unwrap();
        let u = vel.nodes[3][0];
        let z = zeta.nodes[1];
        assert!((q.rho - 1.0).abs() < 1e-14);
        assert!((q.mom - u).abs() < 1e-13);
        assert!((q.energy - (0.5 * u * u + z)).abs() < 1e-13);

        assert!(op.moments(&zeros[..10]).is_err());
    }

    #[test]
    fn internal_energy_grid_inert_and_normalized() {
        let inert = build_internal_energy_grid(0.0, 8, 10.0).unwrap();
        assert_eq!(inert.nodes, vec![0.0]);
        assert_eq!(inert.weights, vec![1.0]);
        assert!(inert.is_inert());

        let g = build_internal_energy_grid(4.0, 8, 10.0).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert!((total - 10.0).abs() < 1e-12);
        for i in 1..g.nodes.len() {
            assert!(g.nodes[i] > g.nodes[i - 1]);
        }
        assert!(g.nodes[0] > 0.0);

        assert!(build_internal_energy_grid(4.0, 8, -1.0).is_err());
        assert!(build_internal_energy_grid(4.0, 0, 10.0).is_err());
    }

    #[test]
    fn internal_energy_distribution_integrates_to_one() {
        // delta = 4, theta = 1: the energy factor is zeta * exp(-zeta), whose
        // integral over (0, zeta_max] misses only the truncated tail.
        let delta = 4.0;
        let zeta_max = compute_zeta_max(delta, 1e-6, 1.0).unwrap();
        let g = build_internal_energy_grid(delta, 32, zeta_max).unwrap();
        let sum: f64 = g
            .nodes
            .iter()
            .zip(&g.weights)
            .map(|(&z, &w)| w * z * (-z).exp())
            .sum();
        assert!((sum - 1.0).abs() < 2e-6);
        // Simpson oracle over the truncated interval agrees to quadrature error
        let n = 20000;
        let h = zeta_max / n as f64;
        let mut simpson = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            let m = a + 0.5 * h;
            let b = a + h;
            let f = |z: f64| z * (-z).exp();
            simpson += h / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        }
        assert!((sum - simpson).abs() < 1e-10);
    }

    #[test]
    fn gaussian_moments_converge_m1() {
        // discrete moments of an analytic Maxwellian converge to [rho, rho U, E]
        let (rho, u0, theta) = (1.3, 0.4, 0.8);
        let gamma: f64 = 3.0;
        let cs = (gamma * theta).sqrt();
        let k = compute_k(1e-15, gamma).unwrap();
        let r_max = k * cs;
        let exact_e = rho * (0.5 * u0 * u0 + 0.5 * theta);
        let mut prev = f64::INFINITY;
        for n_v in [8, 16, 32, 64] {
            let vel = build_velocity_grid(1, n_v, 1, 1, r_max, [u0, 0.0, 0.0]).unwrap();
            let zeta = build_internal_energy_grid(0.0, 1, 0.0).unwrap();
            let op = MomentOperator::new(&vel, &zeta);
            let f: Vec<f64> = vel
                .nodes
                .iter()
                .map(|n| {
                    let du = n[0] - u0;
                    rho / (2.0 * std::f64::consts::PI * theta).sqrt()
                        * (-du * du / (2.0 * theta)).exp()
                })
                .collect();
            let q = op.moments(&f).unwrap();
            let err = (q.rho - rho).abs().max((q.mom - rho * u0).abs()).max((q.energy - exact_e).abs());
            assert!(err < prev || err < 1e-13);
            prev = err;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn gaussian_moments_converge_m2() {
        let (rho, theta) = (0.9, 0.6);
        let (ux, uy) = (0.3, -0.2);
        let gamma: f64 = 2.0; // m = 2, delta = 0
        let cs = (gamma * theta).sqrt();
        let r_max = compute_k(1e-15, gamma).unwrap() * cs;
        // energy sums over both velocity components
        let exact_e = rho * (0.5 * (ux * ux + uy * uy) + theta);
        let mut prev = f64::INFINITY;
        for (nr, nphi) in [(8, 8), (16, 16), (32, 32)] {
            let vel = build_velocity_grid(2, nr, nphi, 1, r_max, [ux, uy, 0.0]).unwrap();
            let zeta = build_internal_energy_grid(0.0, 1, 0.0).unwrap();
            let op = MomentOperator::new(&vel, &zeta);
            let f: Vec<f64> = vel
                .nodes
                .iter()
                .map(|n| {
                    let du = n[0] - ux;
                    let dv = n[1] - uy;
                    rho / (2.0 * std::f64::consts::PI * theta)
                        * (-(du * du + dv * dv) / (2.0 * theta)).exp()
                })
                .collect();
            let q = op.moments(&f).unwrap();
            let err = (q.rho - rho)
                .abs()
                .max((q.mom - rho * ux).abs())
                .max((q.energy - exact_e).abs());
            assert!(err < prev || err < 1e-12);
            prev = err;
        }
        assert!(prev < 1e-10);
    }
}
