//! Macroscopic flow states: conserved and primitive variables.
//!
//! The conserved vector is [density, momentum, total energy]; the primitive
//! vector is [density, velocity, pressure]. The two are linked through the
//! ideal-gas relation P = (gamma - 1)(E - rho u^2 / 2), where the specific
//! heat ratio follows from the total degrees of freedom, gamma = 1 + 2/(m + delta).

use crate::error::{Error, Result};

/// Conserved variables [rho, rho*U, E] for one spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    pub rho: f64,
    pub mom: f64,
    pub energy: f64,
}

/// Primitive variables [rho, U, P].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

/// Specific heat ratio for velocity dimension `m` and internal degrees of
/// freedom `delta`.
pub fn gamma_from_dof(m: usize, delta: f64) -> f64 {
    1.0 + 2.0 / (m as f64 + delta)
}

/// Internal degrees of freedom needed to realize `gamma` with velocity
/// dimension `m`.
pub fn delta_from_gamma(gamma: f64, m: usize) -> f64 {
    2.0 / (gamma - 1.0) - m as f64
}

impl MacroState {
    pub fn new(rho: f64, mom: f64, energy: f64) -> Self {
        Self { rho, mom, energy }
    }

    pub fn velocity(&self) -> f64 {
        self.mom / self.rho
    }

    pub fn pressure(&self, gamma: f64) -> f64 {
        let u = self.velocity();
        (gamma - 1.0) * (self.energy - 0.5 * self.rho * u * u)
    }

    /// Scaled temperature theta = P / rho.
    pub fn theta(&self, gamma: f64) -> f64 {
        self.pressure(gamma) / self.rho
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.pressure(gamma) / self.rho).sqrt()
    }

    pub fn to_primitive(&self, gamma: f64) -> Result<Primitive> {
        let q = Primitive {
            rho: self.rho,
            u: self.velocity(),
            p: self.pressure(gamma),
        };
        q.check_admissible()?;
        Ok(q)
    }

    /// Admissibility for states that feed the equilibrium distribution.
    pub fn check_admissible(&self, gamma: f64) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::InvalidState(format!(
                "non-positive density {:.6e}",
                self.rho
            )));
        }
        let p = self.pressure(gamma);
        if !(p > 0.0) {
            return Err(Error::InvalidState(format!(
                "non-positive pressure {p:.6e}"
            )));
        }
        Ok(())
    }
}

impl Primitive {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }

    pub fn theta(&self) -> f64 {
        self.p / self.rho
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }

    /// Specific internal energy e = theta / (gamma - 1).
    pub fn specific_internal_energy(&self, gamma: f64) -> f64 {
        self.theta() / (gamma - 1.0)
    }

    pub fn to_conserved(&self, gamma: f64) -> MacroState {
        MacroState {
            rho: self.rho,
            mom: self.rho * self.u,
            energy: self.p / (gamma - 1.0) + 0.5 * self.rho * self.u * self.u,
        }
    }

    pub fn check_admissible(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::InvalidState(format!(
                "non-positive density {:.6e}",
                self.rho
            )));
        }
        if !(self.p > 0.0) {
            return Err(Error::InvalidState(format!(
                "non-positive pressure {:.6e}",
                self.p
            )));
        }
        Ok(())
    }
}
