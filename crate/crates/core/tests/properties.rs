use std::f64::consts::PI;

use dephaser_core::decoherence_factor::{
    gamma, gamma_closed, gamma_quadrature, sample_curve, visibility, GammaMethod, QuadratureOptions,
};
use dephaser_core::decoherence_time::{solve_decoherence_time, Outcome, SolverOptions};
use dephaser_core::environment::{coth_kernel, BathSpec, QubitSpec, RegimeTag};
use dephaser_core::geometric_phase::{
    default_phase_tolerance, delta_phase_closed, phase_difference, phase_functional_with_profile,
    phase_integral_with_profile, GammaProfile,
};
use dephaser_core::qubit_dynamics::{eigensystem, ReducedDensityMatrix};
use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

fn opts() -> QuadratureOptions {
    QuadratureOptions::with_tolerance(1e-13, 1e-11).unwrap()
}

fn exponent() -> impl Strategy<Value = u32> {
    prop_oneof![Just(1u32), Just(3u32)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_vanishes_at_origin(n in exponent(), g0 in 0.0..2.0f64, cutoff in 1.0..500.0f64, temp in 0.0..2000.0f64) {
        let bath = BathSpec::new(n, g0, cutoff, temp).unwrap();
        prop_assert_eq!(gamma_quadrature(&bath, 0.0, &opts()).unwrap().value, 0.0);
    }

    #[test]
    fn gamma_is_nonnegative(n in exponent(), g0 in 0.0..2.0f64, temp in 0.0..2000.0f64, t in 0.0..5.0f64) {
        let bath = BathSpec::new(n, g0, 100.0, temp).unwrap();
        prop_assert!(gamma_quadrature(&bath, t, &opts()).unwrap().value >= 0.0);
    }

    #[test]
    fn gamma_is_linear_in_coupling(n in exponent(), g0 in 0.01..1.0f64, temp in 0.0..2000.0f64, t in 1e-4..3.0f64) {
        let a = BathSpec::new(n, g0, 100.0, temp).unwrap();
        let b = a.with_gamma0(2.0 * g0).unwrap();
        let ga = gamma_quadrature(&a, t, &opts()).unwrap();
        let gb = gamma_quadrature(&b, t, &opts()).unwrap();
        prop_assert!((gb.value - 2.0 * ga.value).abs() <= 4.0 * (ga.abs_error + gb.abs_error) + 1e-12 * gb.value);
    }

    #[test]
    fn gamma_grows_with_temperature(n in exponent(), t1 in 0.0..500.0f64, dt in 0.0..500.0f64, t in 1e-3..2.0f64) {
        let cold = BathSpec::new(n, 0.3, 100.0, t1).unwrap();
        let hot = cold.with_temperature(t1 + dt).unwrap();
        let gc = gamma_quadrature(&cold, t, &opts()).unwrap();
        let gh = gamma_quadrature(&hot, t, &opts()).unwrap();
        prop_assert!(gh.value >= gc.value - (gh.abs_error + gc.abs_error));
    }

    #[test]
    fn ohmic_zero_temperature_matches_closed_form(lt in -2.0..3.0f64) {
        let bath = BathSpec::ohmic(0.3, 100.0, 0.0).unwrap();
        let t = 10f64.powf(lt) / 100.0;
        let q = gamma_quadrature(&bath, t, &opts()).unwrap().value;
        let c = gamma_closed(&bath, RegimeTag::ZeroT, t).unwrap();
        prop_assert!(((q - c) / c).abs() < 1e-6);
    }

    #[test]
    fn visibility_tracks_gamma(n in exponent(), temp in 0.0..2000.0f64) {
        let bath = BathSpec::new(n, 0.3, 100.0, temp).unwrap();
        let curve = sample_curve(&bath, &GammaMethod::Quadrature(opts()), 0.2, 21).unwrap();
        let gammas = &curve.gamma_values;
        let vis = curve.visibilities();
        prop_assert_eq!(gammas[0], 0.0);
        for i in 1..gammas.len() {
            if gammas[i] >= gammas[i - 1] {
                prop_assert!(vis[i] <= vis[i - 1]);
            }
            prop_assert_eq!(vis[i], visibility(gammas[i]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn coth_kernel_matches_definition(x in 1e-8..50.0f64) {
        let k = coth_kernel(x).unwrap();
        let reference = x.cosh() / x.sinh();
        prop_assert!(((k - reference) / reference).abs() < 1e-13);
        prop_assert!(coth_kernel(-x).is_err());
    }

    #[test]
    fn density_matrix_invariants(theta0 in 0.0..=PI, omega in 0.1..10.0f64, t in 0.0..10.0f64, ga in 0.0..10.0f64, dg in 0.0..10.0f64) {
        let qubit = QubitSpec::new(omega, theta0).unwrap();
        let a = ReducedDensityMatrix::from_gamma(&qubit, t, ga);
        let b = ReducedDensityMatrix::from_gamma(&qubit, t, ga + dg);
        prop_assert_eq!(a.trace(), 1.0);
        prop_assert!(b.purity() <= a.purity());
        let [x, y, z] = b.bloch_vector();
        prop_assert!((x * x + y * y + z * z).sqrt() <= 1.0 + 2.0 * f64::EPSILON);
    }

    #[test]
    fn eigensystem_matches_dense_solver(theta0 in 0.0..=PI, t in 0.0..10.0f64, g in 0.0..10.0f64) {
        let qubit = QubitSpec::new(1.0, theta0).unwrap();
        let rho = ReducedDensityMatrix::from_gamma(&qubit, t, g);
        let ours = eigensystem(&rho, &qubit, g);
        let m = rho.matrix();
        let dense = SymmetricEigen::new(Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]));
        let (hi, lo) = if dense.eigenvalues[0] >= dense.eigenvalues[1] { (0, 1) } else { (1, 0) };
        prop_assert!((ours.eps_plus - dense.eigenvalues[hi]).abs() <= 1e-12);
        prop_assert!((ours.eps_minus - dense.eigenvalues[lo]).abs() <= 1e-12);
        prop_assert!((ours.eps_plus + ours.eps_minus - 1.0).abs() <= 1e-15);
        if dense.eigenvalues[hi] - dense.eigenvalues[lo] > 1e-6 {
            let v = dense.eigenvectors.column(hi);
            let w = ours.dominant_eigenvector();
            let overlap: Complex64 = w[0].conj() * v[0] + w[1].conj() * v[1];
            prop_assert!((1.0 - overlap.norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn correction_sign_follows_cos_theta0(theta0 in 0.01..(PI - 0.01), n in exponent(), high in any::<bool>()) {
        let (bath, regime) = if high {
            (BathSpec::new(n, 0.01, 100.0, 1000.0).unwrap(), RegimeTag::HighT)
        } else {
            (BathSpec::new(n, 0.01, 100.0, 0.0).unwrap(), RegimeTag::ZeroT)
        };
        let d = delta_phase_closed(&QubitSpec::new(1.0, theta0).unwrap(), &bath, regime).unwrap();
        let c = theta0.cos();
        if c.abs() > 1e-12 {
            prop_assert_eq!(d.signum(), c.signum());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_routes_agree(theta0 in 0.05..(PI - 0.05), g0 in 0.0..0.5f64, n in exponent(), high in any::<bool>()) {
        let (temp, regime) = if high { (1000.0, RegimeTag::HighT) } else { (0.0, RegimeTag::ZeroT) };
        let bath = BathSpec::new(n, g0, 100.0, temp).unwrap();
        let qubit = QubitSpec::new(1.0, theta0).unwrap();
        let tol = default_phase_tolerance();
        let profile = GammaProfile::prepare(&bath, &GammaMethod::ClosedForm(regime), qubit.period(), tol).unwrap();
        let a = phase_integral_with_profile(&qubit, &profile, tol).unwrap();
        let b = phase_functional_with_profile(&qubit, &profile, tol).unwrap();
        prop_assert!(phase_difference(a.reduced, b.value).abs() < 1e-8);
        prop_assert!((0.0..2.0 * PI).contains(&a.reduced));
    }

    #[test]
    fn decoherence_time_shrinks_with_coupling(g1 in 0.1..1.0f64, dg in 0.0..1.0f64, temp in prop_oneof![Just(0.0), Just(1000.0)]) {
        let regime = if temp == 0.0 { RegimeTag::ZeroT } else { RegimeTag::HighT };
        let m = GammaMethod::ClosedForm(regime);
        let opts = SolverOptions::default();
        let weak = BathSpec::ohmic(g1, 100.0, temp).unwrap();
        let strong = weak.with_gamma0(g1 + dg).unwrap();
        let tw = solve_decoherence_time(&weak, &m, &opts).unwrap().outcome.time();
        let ts = solve_decoherence_time(&strong, &m, &opts).unwrap().outcome.time();
        if let (Some(tw), Some(ts)) = (tw, ts) {
            prop_assert!(ts <= tw * (1.0 + 1e-9));
        }
    }

    #[test]
    fn found_roots_are_certified(n in exponent(), g0 in 0.05..2.0f64, temp in prop_oneof![Just(0.0), Just(1.55), Just(1000.0)]) {
        let bath = BathSpec::new(n, g0, 100.0, temp).unwrap();
        let m = GammaMethod::Quadrature(QuadratureOptions::default());
        let opts = SolverOptions::with_probe_max(20.0).unwrap();
        let v = solve_decoherence_time(&bath, &m, &opts).unwrap();
        match v.outcome {
            Outcome::TimeFound { t_d, .. } => {
                let g = gamma(&bath, &m, t_d).unwrap().value;
                prop_assert!((g - 1.0).abs() <= 1e-6);
            }
            Outcome::Saturates { plateau, sup, .. } => {
                prop_assert!(plateau < 1.0 && sup < 1.0);
                if n == 3 && temp == 0.0 {
                    prop_assert!((plateau - g0).abs() <= 1e-3);
                }
                if n == 3 && temp == 1000.0 {
                    let analytic = 2.0 * temp * g0 / 100.0;
                    prop_assert!(((plateau - analytic) / analytic).abs() <= 1e-2);
                }
            }
            Outcome::Indeterminate { .. } => {}
        }
    }
}
