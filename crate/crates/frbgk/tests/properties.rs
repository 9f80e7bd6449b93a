//! Generative property tests for the numerical kernels.

use proptest::prelude::*;

use frbgk::fr::{advect_rhs, build_basis, upwind_flux, EndState, Mesh1D, ScalarBc};
use frbgk::limiter::{element_mean, squeeze};
use frbgk::phase::gauss_legendre;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The squeeze limiter preserves element means, removes negative values,
    /// and acts as the identity once applied.
    #[test]
    fn limiter_contract(
        p in 1usize..6,
        raw in prop::collection::vec(-1.0f64..2.0, 7),
        lift in 0.0f64..0.5,
    ) {
        let basis = build_basis(p).unwrap();
        let mut vals: Vec<f64> = raw[..p + 1].to_vec();
        let mean = element_mean(&vals, &basis);
        if mean < 0.0 {
            for v in vals.iter_mut() {
                *v += lift - mean;
            }
        }
        let before = element_mean(&vals, &basis);
        squeeze(&mut vals, &basis).unwrap();
        let after = element_mean(&vals, &basis);
        prop_assert!((before - after).abs() <= 1e-13 * (1.0 + before.abs()));
        prop_assert!(vals.iter().all(|&v| v >= 0.0));
        let first = vals.clone();
        squeeze(&mut vals, &basis).unwrap();
        prop_assert_eq!(vals, first);
    }

    /// Gauss-Legendre rules integrate polynomials of degree <= 2n - 1 exactly.
    #[test]
    fn gauss_legendre_exactness(n in 1usize..12, coeffs in prop::collection::vec(-2.0f64..2.0, 24)) {
        let (nodes, weights) = gauss_legendre(n).unwrap();
        let deg = 2 * n - 1;
        let poly = |x: f64| -> f64 {
            let mut acc = 0.0;
            let mut xp = 1.0;
            for c in coeffs.iter().take(deg + 1) {
                acc += c * xp;
                xp *= x;
            }
            acc
        };
        let quad: f64 = nodes.iter().zip(&weights).map(|(&x, &w)| w * poly(x)).sum();
        // analytic integral over [-1, 1]: odd powers vanish
        let mut exact = 0.0;
        for (k, c) in coeffs.iter().take(deg + 1).enumerate() {
            if k % 2 == 0 {
                exact += c * 2.0 / (k as f64 + 1.0);
            }
        }
        prop_assert!((quad - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    /// The upwind flux never reads the downstream state.
    #[test]
    fn upwind_ignores_downstream(
        f_minus in -10.0f64..10.0,
        f_plus in -10.0f64..10.0,
        other in -10.0f64..10.0,
        u_n in prop::sample::select(vec![-2.5f64, -1.0, 0.5, 3.0]),
    ) {
        let base = upwind_flux(f_minus, f_plus, u_n);
        let varied = if u_n > 0.0 {
            upwind_flux(f_minus, other, u_n)
        } else {
            upwind_flux(other, f_plus, u_n)
        };
        prop_assert_eq!(base, varied);
    }

    /// The advection operator is linear in the field.
    #[test]
    fn advection_linearity(
        vals in prop::collection::vec(-1.0f64..1.0, 24),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        u0 in -2.0f64..2.0,
    ) {
        let basis = build_basis(2).unwrap();
        let mesh = Mesh1D::uniform(0.0, 1.0, 8).unwrap();
        let f = &vals[..24];
        let g: Vec<f64> = vals.iter().rev().cloned().collect();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let mut rf = vec![0.0; 24];
        let mut rg = vec![0.0; 24];
        let mut rc = vec![0.0; 24];
        advect_rhs(f, u0, &mesh, &basis, &ScalarBc::Periodic, &mut rf).unwrap();
        advect_rhs(&g, u0, &mesh, &basis, &ScalarBc::Periodic, &mut rg).unwrap();
        advect_rhs(&combo, u0, &mesh, &basis, &ScalarBc::Periodic, &mut rc).unwrap();
        for i in 0..24 {
            let expect = a * rf[i] + b * rg[i];
            prop_assert!((rc[i] - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
        }
    }

    /// Periodic advection conserves the total integral for any field.
    #[test]
    fn advection_conservation(vals in prop::collection::vec(-1.0f64..1.0, 36), u0 in -2.0f64..2.0) {
        let basis = build_basis(3).unwrap();
        let mesh = Mesh1D::uniform(0.0, 2.0, 9).unwrap();
        let mut rhs = vec![0.0; 36];
        advect_rhs(&vals, u0, &mesh, &basis, &ScalarBc::Periodic, &mut rhs).unwrap();
        let mut total = 0.0;
        for k in 0..9 {
            for i in 0..4 {
                total += mesh.h[k] * basis.mean_weights[i] * rhs[k * 4 + i];
            }
        }
        prop_assert!(total.abs() <= 1e-11);
    }

    /// Neumann boundaries keep constants exactly; Dirichlet inflow values
    /// equal to the constant do too.
    #[test]
    fn constant_preservation_bcs(c in 0.1f64..5.0, u0 in -2.0f64..2.0) {
        let basis = build_basis(3).unwrap();
        let mesh = Mesh1D::uniform(-1.0, 1.0, 5).unwrap();
        let field = vec![c; 20];
        let mut out = vec![0.0; 20];
        for bc in [
            ScalarBc::Periodic,
            ScalarBc::Ends { left: EndState::Neumann, right: EndState::Neumann },
            ScalarBc::Ends { left: EndState::Value(c), right: EndState::Value(c) },
        ] {
            advect_rhs(&field, u0, &mesh, &basis, &bc, &mut out).unwrap();
            for v in &out {
                prop_assert!(v.abs() <= 1e-12 * c.max(1.0) * (1.0 + u0.abs()));
            }
        }
    }
}
