//! One-dimensional flux reconstruction spatial operator.
//!
//! Each element carries p+1 Gauss-Lobatto solution nodes. The divergence of
//! the corrected flux is the nodal derivative of the discontinuous flux plus
//! boundary corrections built from the Radau polynomials, which recovers the
//! nodal discontinuous Galerkin scheme. Interface fluxes are upwinded, which
//! is exact for the linear advection of each phase-space node value.

use crate::error::{Error, Result};
use crate::phase::legendre;

/// A 1D mesh of consecutive elements.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    pub vertices: Vec<f64>,
    pub h: Vec<f64>,
    pub h_min: f64,
}

impl Mesh1D {
    pub fn from_vertices(vertices: Vec<f64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument(
                "mesh needs at least two vertices".into(),
            ));
        }
        let mut h = Vec::with_capacity(vertices.len() - 1);
        for i in 1..vertices.len() {
            let dx = vertices[i] - vertices[i - 1];
            if !(dx > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "vertices must be strictly increasing (index {i})"
                )));
            }
            h.push(dx);
        }
        let h_min = h.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(Self {
            vertices,
            h,
            h_min,
        })
    }

    pub fn uniform(a: f64, b: f64, n_elements: usize) -> Result<Self> {
        if n_elements == 0 || !(b > a) {
            return Err(Error::InvalidArgument(format!(
                "invalid uniform mesh: [{a}, {b}] with {n_elements} elements"
            )));
        }
        let dx = (b - a) / n_elements as f64;
        let vertices = (0..=n_elements)
            .map(|i| {
                if i == n_elements {
                    b
                } else {
                    a + i as f64 * dx
                }
            })
            .collect();
        Self::from_vertices(vertices)
    }

    pub fn n_elements(&self) -> usize {
        self.h.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.vertices[0], *self.vertices.last().unwrap())
    }

    /// Physical coordinate of solution node `i` in element `k`.
    pub fn node_x(&self, k: usize, i: usize, basis: &FrBasis) -> f64 {
        let mid = 0.5 * (self.vertices[k] + self.vertices[k + 1]);
        mid + 0.5 * self.h[k] * basis.xi[i]
    }

    /// Maximal spacing between adjacent solution nodes in any element: the
    /// 1D reduction of the Voronoi-neighbor mesh scale used for the mesh
    /// Knudsen number.
    pub fn h_max_node(&self, basis: &FrBasis) -> f64 {
        let max_gap = basis
            .xi
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0f64, f64::max);
        let h_max = self.h.iter().cloned().fold(0.0f64, f64::max);
        0.5 * h_max * max_gap
    }
}

/// Nodal basis data for one approximation order.
#[derive(Debug, Clone)]
pub struct FrBasis {
    pub p: usize,
    /// Gauss-Lobatto solution nodes on [-1, 1]; endpoints included.
    pub xi: Vec<f64>,
    /// Differentiation matrix, row-major: D[i][j] = phi_j'(xi_i).
    pub diff: Vec<f64>,
    /// Derivative of the left (right-Radau) correction function at the nodes.
    pub gl_deriv: Vec<f64>,
    /// Derivative of the right correction function at the nodes.
    pub gr_deriv: Vec<f64>,
    /// Weights m_i with sum m_i z(xi_i) = element mean for deg(z) <= p.
    pub mean_weights: Vec<f64>,
}

/// Gauss-Lobatto nodes and quadrature weights with p+1 points.
fn gauss_lobatto(p: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if p < 1 {
        return Err(Error::InvalidArgument(
            "Gauss-Lobatto set needs order p >= 1".into(),
        ));
    }
    let n = p + 1;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[n - 1] = 1.0;
    // interior nodes are the roots of P_p'
    for i in 1..p {
        let mut x = (std::f64::consts::PI * i as f64 / p as f64).cos();
        for _ in 0..100 {
            let (pp, dp) = legendre(p, x);
            // Legendre ODE: (1 - x^2) P'' = 2 x P' - p (p+1) P
            let d2p = (2.0 * x * dp - (p * (p + 1)) as f64 * pp) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weights = nodes
        .iter()
        .map(|&x| {
            let (pp, _) = legendre(p, x);
            2.0 / ((p * (p + 1)) as f64 * pp * pp)
        })
        .collect();
    Ok((nodes, weights))
}

/// Build the FR basis: Gauss-Lobatto nodes, nodal differentiation matrix,
/// DG-recovering (Radau) correction derivatives, and mean weights.
pub fn build_basis(p: usize) -> Result<FrBasis> {
    let (xi, w) = gauss_lobatto(p)?;
    let n = p + 1;

    // barycentric weights
    let mut bary = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                bary[j] *= xi[j] - xi[k];
            }
        }
        bary[j] = 1.0 / bary[j];
    }
    let mut diff = vec![0.0; n * n];
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let d = bary[j] / bary[i] / (xi[i] - xi[j]);
                diff[i * n + j] = d;
                row_sum += d;
            }
        }
        diff[i * n + i] = -row_sum;
    }

    // left correction: right Radau polynomial of degree p+1,
    // g_L = (-1)^(p+1)/2 (P_{p+1} - P_p), so g_L(-1) = 1, g_L(1) = 0
    let sign = if (p + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let mut gl_deriv = Vec::with_capacity(n);
    let mut gr_deriv = Vec::with_capacity(n);
    for &x in &xi {
        let (_, dp_next) = legendre(p + 1, x);
        let (_, dp) = legendre(p, x);
        gl_deriv.push(0.5 * sign * (dp_next - dp));
        gr_deriv.push(0.5 * (dp_next + dp));
    }

    let mean_weights = w.iter().map(|v| 0.5 * v).collect();
    Ok(FrBasis {
        p,
        xi,
        diff,
        gl_deriv,
        gr_deriv,
        mean_weights,
    })
}

/// Upwind interface flux for normal velocity u_n given the interior (minus)
/// and exterior (plus) traces.
#[inline]
pub fn upwind_flux(f_minus: f64, f_plus: f64, u_n: f64) -> f64 {
    if u_n > 0.0 {
        u_n * f_minus
    } else if u_n < 0.0 {
        u_n * f_plus
    } else {
        0.0
    }
}

/// Ghost-state rule at a domain end for a single phase-space node value.
#[derive(Debug, Clone, Copy)]
pub enum EndState {
    /// Boundary has no effect: ghost equals the interior trace.
    Neumann,
    /// Prescribed exterior value (equilibrium trace or mirrored interior).
    Value(f64),
}

/// Boundary closure for one scalar advection field.
#[derive(Debug, Clone, Copy)]
pub enum ScalarBc {
    Periodic,
    Ends { left: EndState, right: EndState },
}

/// Negative divergence of the corrected flux for linear advection at speed
/// `u0`, evaluated at the solution nodes. `field` and `out` hold
/// N_e * (p+1) values element-major.
pub fn advect_rhs(
    field: &[f64],
    u0: f64,
    mesh: &Mesh1D,
    basis: &FrBasis,
    bc: &ScalarBc,
    out: &mut [f64],
) -> Result<()> {
    let ne = mesh.n_elements();
    let ns = basis.p + 1;
    if field.len() != ne * ns || out.len() != ne * ns {
        return Err(Error::InvalidArgument(format!(
            "field shape mismatch: expected {} values",
            ne * ns
        )));
    }

    // exterior traces at the domain ends
    let (left_ghost, right_ghost) = match bc {
        ScalarBc::Periodic => (field[(ne - 1) * ns + ns - 1], field[0]),
        ScalarBc::Ends { left, right } => (
            match left {
                EndState::Neumann => field[0],
                EndState::Value(v) => *v,
            },
            match right {
                EndState::Neumann => field[ne * ns - 1],
                EndState::Value(v) => *v,
            },
        ),
    };

    // common interface fluxes in the +x direction, shared by both sides
    let mut flux = vec![0.0; ne + 1];
    for (j, slot) in flux.iter_mut().enumerate() {
        let left_trace = if j == 0 {
            left_ghost
        } else {
            field[(j - 1) * ns + ns - 1]
        };
        let right_trace = if j == ne { right_ghost } else { field[j * ns] };
        *slot = if u0 > 0.0 {
            u0 * left_trace
        } else if u0 < 0.0 {
            u0 * right_trace
        } else {
            0.0
        };
    }

    for k in 0..ne {
        let inv_jac = 2.0 / mesh.h[k];
        let el = &field[k * ns..(k + 1) * ns];
        let corr_l = flux[k] - u0 * el[0];
        let corr_r = flux[k + 1] - u0 * el[ns - 1];
        for i in 0..ns {
            let mut d = 0.0;
            for j in 0..ns {
                d += basis.diff[i * ns + j] * el[j];
            }
            out[k * ns + i] = -inv_jac
                * (u0 * d + corr_l * basis.gl_deriv[i] + corr_r * basis.gr_deriv[i]);
        }
    }
    Ok(())
}
