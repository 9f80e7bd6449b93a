//! Benchmark initial conditions and their standard configurations.

use crate::error::{Error, Result};
use crate::euler::rankine_hugoniot;
use crate::state::{delta_from_gamma, gamma_from_dof, Primitive};

/// Boundary kind requested by a case (resolved to concrete slices later).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcRequest {
    Periodic,
    Neumann,
    /// Equilibrium of the adjacent initial far state.
    DirichletFar,
    SpecularWall,
}

/// How the collision time is seeded from a Knudsen number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollisionSeed {
    /// Constant tau from Kn, the reference length, and the maximum initial
    /// sound speed.
    Constant,
    /// Power-law tau(Q) referenced to the left far state (viscosity-law
    /// exponent omega).
    PowerLaw { omega: f64 },
}

/// A benchmark problem: initial condition, domain, internal degrees of
/// freedom, and default run settings.
pub struct Case {
    pub name: &'static str,
    pub domain: (f64, f64),
    pub delta: f64,
    pub ic: Box<dyn Fn(f64) -> Primitive + Send + Sync>,
    pub bc: (BcRequest, BcRequest),
    pub collision: CollisionSeed,
    /// Default Knudsen number when the config does not set one.
    pub default_kn: Option<f64>,
    pub default_t_final: f64,
}

impl Case {
    pub fn gamma(&self) -> f64 {
        gamma_from_dof(1, self.delta)
    }

    /// Initial states at the domain ends (the Dirichlet far states).
    pub fn far_states(&self) -> (Primitive, Primitive) {
        ((self.ic)(self.domain.0), (self.ic)(self.domain.1))
    }
}

/// Smooth density pulse on the periodic unit interval:
/// rho = 1 + exp(-beta (x - 1/2)^2), U = 1, P = 1.
pub fn smooth_pulse(beta: f64, delta: f64) -> Result<Case> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument("pulse width beta must be positive".into()));
    }
    Ok(Case {
        name: "pulse",
        domain: (0.0, 1.0),
        delta,
        ic: Box::new(move |x| {
            Primitive::new(1.0 + (-beta * (x - 0.5) * (x - 0.5)).exp(), 1.0, 1.0)
        }),
        bc: (BcRequest::Periodic, BcRequest::Periodic),
        collision: CollisionSeed::Constant,
        default_kn: None,
        default_t_final: 1.0,
    })
}

/// Double expansion wave (the 123 problem): q_L = [1, -2, 0.4],
/// q_R = [1, 2, 0.4] split at x = 1/2, polyatomic with delta = 4.
/// The smoothed variant replaces the velocity jump by 2 tanh((x - 1/2)/h).
pub fn double_expansion(smooth: bool, h: f64) -> Result<Case> {
    if smooth && !(h > 0.0) {
        return Err(Error::InvalidArgument(
            "smoothed expansion needs a positive thickness h".into(),
        ));
    }
    let ic: Box<dyn Fn(f64) -> Primitive + Send + Sync> = if smooth {
        Box::new(move |x| Primitive::new(1.0, 2.0 * ((x - 0.5) / h).tanh(), 0.4))
    } else {
        Box::new(|x| {
            if x <= 0.5 {
                Primitive::new(1.0, -2.0, 0.4)
            } else {
                Primitive::new(1.0, 2.0, 0.4)
            }
        })
    };
    Ok(Case {
        name: "expansion",
        domain: (0.0, 1.0),
        delta: 4.0,
        ic,
        bc: (BcRequest::DirichletFar, BcRequest::DirichletFar),
        collision: CollisionSeed::Constant,
        default_kn: None,
        default_t_final: 0.15,
    })
}

/// Sod shock tube: q_L = [1, 0, 1], q_R = [1/8, 0, 1/10] split at x = 1/2,
/// delta = 4 (gamma = 1.4), Dirichlet at both ends.
pub fn sod() -> Case {
    Case {
        name: "sod",
        domain: (0.0, 1.0),
        delta: 4.0,
        ic: Box::new(|x| {
            if x <= 0.5 {
                Primitive::new(1.0, 0.0, 1.0)
            } else {
                Primitive::new(0.125, 0.0, 0.1)
            }
        }),
        bc: (BcRequest::DirichletFar, BcRequest::DirichletFar),
        collision: CollisionSeed::Constant,
        default_kn: None,
        default_t_final: 0.2,
    }
}

/// Stationary normal shock on [-25, 25]: upstream q_L = [1, M sqrt(gamma), 1]
/// with the Rankine-Hugoniot downstream state, argon-like gas
/// (gamma = 5/3 via delta = 2) and a power-law collision time with
/// omega = 0.81 referenced to q_L at Kn = 1.
pub fn normal_shock(mach: f64, gamma: f64) -> Result<Case> {
    if !(mach > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "normal shock needs M > 1, got {mach}"
        )));
    }
    let delta = delta_from_gamma(gamma, 1);
    if delta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gamma = {gamma} is not reachable with m = 1"
        )));
    }
    let q_l = Primitive::new(1.0, mach * gamma.sqrt(), 1.0);
    let q_r = rankine_hugoniot(mach, gamma, &q_l)?;
    Ok(Case {
        name: "normal_shock",
        domain: (-25.0, 25.0),
        delta,
        ic: Box::new(move |x| if x <= 0.0 { q_l } else { q_r }),
        bc: (BcRequest::DirichletFar, BcRequest::DirichletFar),
        collision: CollisionSeed::PowerLaw { omega: 0.81 },
        default_kn: Some(1.0),
        default_t_final: 100.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_profile() {
        let case = smooth_pulse(100.0, 0.0).unwrap();
        assert!(((case.ic)(0.5).rho - 2.0).abs() < 1e-15);
        assert!(((case.ic)(0.0).rho - (1.0 + (-25.0f64).exp())).abs() < 1e-15);
        // symmetric about the center
        for dx in [0.1, 0.2, 0.35] {
            assert!(
                ((case.ic)(0.5 - dx).rho - (case.ic)(0.5 + dx).rho).abs() < 1e-15
            );
        }
        assert!((case.gamma() - 3.0).abs() < 1e-15);
        assert!(smooth_pulse(-1.0, 0.0).is_err());
    }

    #[test]
    fn expansion_profiles() {
        let sharp = double_expansion(false, 0.0).unwrap();
        let q = (sharp.ic)(0.25);
        assert_eq!((q.rho, q.u, q.p), (1.0, -2.0, 0.4));
        assert!((sharp.gamma() - 1.4).abs() < 1e-12);

        let h = 0.01;
        let smooth = double_expansion(true, h).unwrap();
        assert_eq!((smooth.ic)(0.5).u, 0.0);
        let far = (smooth.ic)(0.5 + 5.0 * h).u;
        assert!((far - 2.0 * 5.0f64.tanh()).abs() < 1e-12);
        assert!((far - 1.9999).abs() < 1e-3);
        assert!(double_expansion(true, 0.0).is_err());
    }

    #[test]
    fn sod_profile() {
        let case = sod();
        let l = (case.ic)(0.1);
        let r = (case.ic)(0.9);
        assert_eq!((l.rho, l.u, l.p), (1.0, 0.0, 1.0));
        assert_eq!((r.rho, r.u, r.p), (0.125, 0.0, 0.1));
        assert!((l.rho / r.rho - 8.0).abs() < 1e-14);
    }

    #[test]
    fn normal_shock_setup() {
        let gamma = 5.0 / 3.0;
        let case = normal_shock(3.8, gamma).unwrap();
        assert!((case.delta - 2.0).abs() < 1e-12);
        let (q_l, q_r) = case.far_states();
        assert!((q_l.u - 3.8 * gamma.sqrt()).abs() < 1e-12);
        assert!((q_l.u - 4.906).abs() < 1e-3);
        // far states satisfy the jump identities
        let rh = rankine_hugoniot(3.8, gamma, &q_l).unwrap();
        assert!((q_r.rho - rh.rho).abs() < 1e-12);
        assert!((q_r.u - rh.u).abs() < 1e-12);
        assert!((q_r.p - rh.p).abs() < 1e-12);
        // near M = 1 the initial condition is near-uniform
        let weak = normal_shock(1.0 + 1e-9, gamma).unwrap();
        let (wl, wr) = weak.far_states();
        assert!((wl.rho - wr.rho).abs() < 1e-7);
        assert!(normal_shock(0.9, gamma).is_err());
        // admissibility everywhere
        for case in [
            smooth_pulse(100.0, 0.0).unwrap(),
            double_expansion(false, 0.0).unwrap(),
            sod(),
            normal_shock(9.0, gamma).unwrap(),
        ] {
            let (a, b) = case.domain;
            for i in 0..=50 {
                let x = a + (b - a) * i as f64 / 50.0;
                (case.ic)(x).check_admissible().unwrap();
            }
        }
    }
}
