//! Exact Euler references: Rankine-Hugoniot jumps and the exact ideal-gas
//! Riemann solver used to validate the kinetic solutions in the continuum
//! limit.

use crate::error::{Error, Result};
use crate::state::Primitive;

/// Downstream state of a normal shock with upstream Mach number `m` and
/// upstream state `q_l`.
pub fn rankine_hugoniot(mach: f64, gamma: f64, q_l: &Primitive) -> Result<Primitive> {
    if mach < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "normal shock needs M >= 1, got {mach}"
        )));
    }
    let m2 = mach * mach;
    let rho_ratio = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
    let u_ratio = ((gamma - 1.0) * m2 + 2.0) / ((gamma + 1.0) * m2);
    let p_ratio = (2.0 * gamma * m2 - (gamma - 1.0)) / (gamma + 1.0);
    Ok(Primitive::new(
        q_l.rho * rho_ratio,
        q_l.u * u_ratio,
        q_l.p * p_ratio,
    ))
}

/// Exact solution of the ideal-gas Riemann problem, sampled in terms of the
/// similarity variable x/t.
#[derive(Debug, Clone)]
pub struct RiemannSolution {
    pub left: Primitive,
    pub right: Primitive,
    pub gamma: f64,
    /// Star-region pressure and velocity; pressure is zero when a vacuum
    /// region forms.
    pub p_star: f64,
    pub u_star: f64,
    vacuum: bool,
}

fn sound_speed(q: &Primitive, gamma: f64) -> f64 {
    (gamma * q.p / q.rho).sqrt()
}

/// Pressure function f_K(p) and its derivative for one side of the problem.
fn pressure_fn(p: f64, q: &Primitive, gamma: f64) -> (f64, f64) {
    let c = sound_speed(q, gamma);
    if p > q.p {
        // shock branch
        let a = 2.0 / ((gamma + 1.0) * q.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * q.p;
        let root = (a / (p + b)).sqrt();
        let f = (p - q.p) * root;
        let df = root * (1.0 - 0.5 * (p - q.p) / (p + b));
        (f, df)
    } else {
        // rarefaction branch
        let exp = (gamma - 1.0) / (2.0 * gamma);
        let ratio = (p / q.p).powf(exp);
        let f = 2.0 * c / (gamma - 1.0) * (ratio - 1.0);
        let df = 1.0 / (q.rho * c) * (p / q.p).powf(-(gamma + 1.0) / (2.0 * gamma));
        (f, df)
    }
}

/// Solve the Riemann problem. Vacuum-forming inputs are allowed; the sampled
/// states inside a vacuum fan carry zero density.
pub fn exact_riemann(q_l: &Primitive, q_r: &Primitive, gamma: f64) -> Result<RiemannSolution> {
    q_l.check_admissible()?;
    q_r.check_admissible()?;
    let c_l = sound_speed(q_l, gamma);
    let c_r = sound_speed(q_r, gamma);
    let du = q_r.u - q_l.u;

    // pressure positivity: vacuum forms when the expansion exceeds both
    // acoustic reservoirs
    if 2.0 * (c_l + c_r) / (gamma - 1.0) <= du {
        return Ok(RiemannSolution {
            left: *q_l,
            right: *q_r,
            gamma,
            p_star: 0.0,
            u_star: 0.0,
            vacuum: true,
        });
    }

    // two-rarefaction initial guess
    let z = (gamma - 1.0) / (2.0 * gamma);
    let guess = ((c_l + c_r - 0.5 * (gamma - 1.0) * du)
        / (c_l / q_l.p.powf(z) + c_r / q_r.p.powf(z)))
    .powf(1.0 / z);
    let mut p = guess.max(1e-14 * (q_l.p + q_r.p));

    let mut converged = false;
    for _ in 0..100 {
        let (f_l, df_l) = pressure_fn(p, q_l, gamma);
        let (f_r, df_r) = pressure_fn(p, q_r, gamma);
        let g = f_l + f_r + du;
        let dp = g / (df_l + df_r);
        let p_new = (p - dp).max(1e-16 * p);
        let change = 2.0 * (p_new - p).abs() / (p_new + p);
        p = p_new;
        if change < 1e-12 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::InvalidState(
            "Riemann pressure iteration did not converge".into(),
        ));
    }
    let (f_l, _) = pressure_fn(p, q_l, gamma);
    let (f_r, _) = pressure_fn(p, q_r, gamma);
    let u_star = 0.5 * (q_l.u + q_r.u) + 0.5 * (f_r - f_l);
    Ok(RiemannSolution {
        left: *q_l,
        right: *q_r,
        gamma,
        p_star: p,
        u_star,
        vacuum: false,
    })
}

impl RiemannSolution {
    /// Sample the self-similar solution at xi = x / t.
    pub fn sample(&self, xi: f64) -> Primitive {
        let g = self.gamma;
        if self.vacuum {
            return self.sample_vacuum(xi);
        }
        if xi <= self.u_star {
            // left of the contact
            let q = &self.left;
            let c = sound_speed(q, g);
            if self.p_star > q.p {
                // left shock
                let ratio = self.p_star / q.p;
                let s = q.u - c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
                if xi <= s {
                    *q
                } else {
                    let rho = q.rho * (ratio + (g - 1.0) / (g + 1.0))
                        / ((g - 1.0) / (g + 1.0) * ratio + 1.0);
                    Primitive::new(rho, self.u_star, self.p_star)
                }
            } else {
                // left rarefaction
                let c_star = c * (self.p_star / q.p).powf((g - 1.0) / (2.0 * g));
                let head = q.u - c;
                let tail = self.u_star - c_star;
                if xi <= head {
                    *q
                } else if xi >= tail {
                    let rho = q.rho * (self.p_star / q.p).powf(1.0 / g);
                    Primitive::new(rho, self.u_star, self.p_star)
                } else {
                    let u = 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * q.u + xi);
                    let c_fan = 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * (q.u - xi));
                    let rho = q.rho * (c_fan / c).powf(2.0 / (g - 1.0));
                    let p = q.p * (c_fan / c).powf(2.0 * g / (g - 1.0));
                    Primitive::new(rho, u, p)
                }
            }
        } else {
            // right of the contact
            let q = &self.right;
            let c = sound_speed(q, g);
            if self.p_star > q.p {
                // right shock
                let ratio = self.p_star / q.p;
                let s = q.u + c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
                if xi >= s {
                    *q
                } else {
                    let rho = q.rho * (ratio + (g - 1.0) / (g + 1.0))
                        / ((g - 1.0) / (g + 1.0) * ratio + 1.0);
                    Primitive::new(rho, self.u_star, self.p_star)
                }
            } else {
                // right rarefaction
                let c_star = c * (self.p_star / q.p).powf((g - 1.0) / (2.0 * g));
                let head = q.u + c;
                let tail = self.u_star + c_star;
                if xi >= head {
                    *q
                } else if xi <= tail {
                    let rho = q.rho * (self.p_star / q.p).powf(1.0 / g);
                    Primitive::new(rho, self.u_star, self.p_star)
                } else {
                    let u = 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * q.u + xi);
                    let c_fan = 2.0 / (g + 1.0) * (c - 0.5 * (g - 1.0) * (q.u - xi));
                    let rho = q.rho * (c_fan / c).powf(2.0 / (g - 1.0));
                    let p = q.p * (c_fan / c).powf(2.0 * g / (g - 1.0));
                    Primitive::new(rho, u, p)
                }
            }
        }
    }

    fn sample_vacuum(&self, xi: f64) -> Primitive {
        let g = self.gamma;
        let c_l = sound_speed(&self.left, g);
        let c_r = sound_speed(&self.right, g);
        let s_l = self.left.u + 2.0 * c_l / (g - 1.0); // vacuum front, left fan
        let s_r = self.right.u - 2.0 * c_r / (g - 1.0);
        if xi <= self.left.u - c_l {
            self.left
        } else if xi < s_l {
            let u = 2.0 / (g + 1.0) * (c_l + 0.5 * (g - 1.0) * self.left.u + xi);
            let c_fan = 2.0 / (g + 1.0) * (c_l + 0.5 * (g - 1.0) * (self.left.u - xi));
            let rho = self.left.rho * (c_fan / c_l).powf(2.0 / (g - 1.0));
            let p = self.left.p * (c_fan / c_l).powf(2.0 * g / (g - 1.0));
            Primitive::new(rho, u, p)
        } else if xi <= s_r {
            Primitive::new(0.0, 0.5 * (s_l + s_r), 0.0)
        } else if xi < self.right.u + c_r {
            let u = 2.0 / (g + 1.0) * (-c_r + 0.5 * (g - 1.0) * self.right.u + xi);
            let c_fan = 2.0 / (g + 1.0) * (c_r - 0.5 * (g - 1.0) * (self.right.u - xi));
            let rho = self.right.rho * (c_fan / c_r).powf(2.0 / (g - 1.0));
            let p = self.right.p * (c_fan / c_r).powf(2.0 * g / (g - 1.0));
            Primitive::new(rho, u, p)
        } else {
            self.right
        }
    }

    /// Shock speed of the right-moving shock, when present.
    pub fn right_shock_speed(&self) -> Option<f64> {
        if self.vacuum || self.p_star <= self.right.p {
            return None;
        }
        let g = self.gamma;
        let c = sound_speed(&self.right, g);
        let ratio = self.p_star / self.right.p;
        Some(self.right.u + c * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt())
    }

    /// Contact discontinuity speed.
    pub fn contact_speed(&self) -> f64 {
        self.u_star
    }

    /// Density just right of the contact (between contact and right shock).
    pub fn density_star_right(&self) -> f64 {
        let g = self.gamma;
        let q = &self.right;
        if self.p_star > q.p {
            let ratio = self.p_star / q.p;
            q.rho * (ratio + (g - 1.0) / (g + 1.0)) / ((g - 1.0) / (g + 1.0) * ratio + 1.0)
        } else {
            q.rho * (self.p_star / q.p).powf(1.0 / g)
        }
    }
}
