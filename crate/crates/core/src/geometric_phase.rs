//! Geometric phase acquired over the quasicyclic path t ∈ [0, τ], τ = 2π/Ω.
//!
//! Two routes are provided. The integral route evaluates
//! Φ_raw = Ω ∫₀^τ sin²(θ_t/2) dt directly from the eigenvalue formula
//! sin²(θ_t/2) = ½(1 + cos θ0 / R(t)), R = √(cos²θ0 + e^{−2Γ} sin²θ0).
//! The functional route assembles the gauge-invariant expression
//! arg{√(ε₊(0)ε₊(τ)) ⟨Ψ₊(0)|Ψ₊(τ)⟩ e^{−∫⟨Ψ₊|∂_tΨ₊⟩dt}} from the
//! eigensystem of ρ(t). With ρ_eg ∝ e^{+iΩt} the connection is
//! iΩ sin²(θ_t/2), so the phase is −Φ_raw reduced into [0, 2π); at Γ = 0
//! that is π(1 − cos θ0).
//!
//! Perturbative corrections δΦ ∝ γ0 sin²θ0 cos θ0 are returned with the sign
//! of the raw integral (δΦ > 0 for θ0 < π/2). Expressed in the orientation of
//! the reduced phase the first-order shift is −δΦ.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::decoherence_factor::{gamma, gamma_closed, GammaMethod, QuadratureOptions};
use crate::environment::{BathSpec, QubitSpec, RegimeTag};
use crate::error::{Error, Result};
use crate::interpolation::ChebyshevTable;
use crate::qubit_dynamics::{eigensystem, ReducedDensityMatrix};
use crate::quadrature::{integrate_panels, Tolerance};

const TWO_PI: f64 = 2.0 * PI;
const MAX_OUTER_INTERVALS: usize = 20_000;

/// Default tolerance for the outer time integrals.
pub fn default_phase_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-10,
        rel: 1e-10,
    }
}

/// Γ(t) on [0, τ], ready for repeated evaluation by the outer integrals.
///
/// Quadrature-based Γ is replaced by a Chebyshev table whose error is a
/// tenth of the outer tolerance, so each outer node costs one polynomial
/// evaluation instead of a frequency integral.
#[derive(Debug, Clone)]
pub enum GammaProfile {
    Closed {
        bath: BathSpec,
        regime: RegimeTag,
        t_end: f64,
    },
    Table(ChebyshevTable),
}

impl GammaProfile {
    pub fn prepare(bath: &BathSpec, method: &GammaMethod, t_end: f64, tol: Tolerance) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(Error::invalid("period", format!("{t_end}")));
        }
        match method {
            GammaMethod::ClosedForm(regime) => {
                // validates the (n, regime) pair up front
                gamma_closed(bath, *regime, 0.0)?;
                Ok(GammaProfile::Closed {
                    bath: *bath,
                    regime: *regime,
                    t_end,
                })
            }
            GammaMethod::Quadrature(opts) => {
                let table_tol = 0.1 * tol.abs.max(f64::MIN_POSITIVE);
                let inner = QuadratureOptions {
                    tol: Tolerance {
                        abs: opts.tol.abs.min(0.1 * table_tol),
                        rel: opts.tol.rel.min(1e-12),
                    },
                    panel_budget: opts.panel_budget,
                };
                let inner_method = GammaMethod::Quadrature(inner);
                let table = ChebyshevTable::build(
                    |t| gamma(bath, &inner_method, t).map(|g| g.value).map_err(|e| e.at_time(t)),
                    0.0,
                    t_end,
                    table_tol,
                )?;
                Ok(GammaProfile::Table(table))
            }
        }
    }

    pub fn t_end(&self) -> f64 {
        match self {
            GammaProfile::Closed { t_end, .. } => *t_end,
            GammaProfile::Table(table) => table.domain().1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            GammaProfile::Closed { bath, regime, .. } => {
                gamma_closed(bath, *regime, t.max(0.0)).unwrap_or(f64::NAN)
            }
            GammaProfile::Table(table) => table.eval(t).max(0.0),
        }
    }

    /// Panel boundaries that resolve the 1/Λ structure near t = 0.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            GammaProfile::Closed { bath, t_end, .. } => {
                let scale = 1.0 / bath.cutoff();
                let mut bps = vec![0.0];
                bps.extend(
                    [0.1, 1.0, 10.0, 100.0]
                        .iter()
                        .map(|k| k * scale)
                        .filter(|&t| t < *t_end),
                );
                bps.push(*t_end);
                bps
            }
            GammaProfile::Table(table) => table.breakpoints(),
        }
    }
}

/// Φ^U = π(1 − cos θ0).
pub fn phase_unitary(qubit: &QubitSpec) -> f64 {
    PI * (1.0 - qubit.theta0().cos())
}

/// Reduces `phi` into [0, 2π), returning the value and the number of whole
/// turns removed.
pub fn reduce_phase(phi: f64) -> (f64, i64) {
    let mut reduced = phi.rem_euclid(TWO_PI);
    if reduced >= TWO_PI {
        reduced = 0.0;
    }
    let winding = ((phi - reduced) / TWO_PI).round() as i64;
    (reduced, winding)
}

/// Difference of two phases wrapped into (−π, π].
pub fn phase_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    if d > PI {
        d - TWO_PI
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseIntegral {
    /// Ω ∫₀^τ sin²(θ_t/2) dt, unreduced.
    pub raw: f64,
    /// −raw reduced into [0, 2π).
    pub reduced: f64,
    /// Whole turns: −raw = reduced + 2π·winding.
    pub winding: i64,
    pub abs_error: f64,
}

pub fn phase_integral_with_profile(
    qubit: &QubitSpec,
    profile: &GammaProfile,
    tol: Tolerance,
) -> Result<PhaseIntegral> {
    let (s, c) = qubit.theta0().sin_cos();
    let weight = |t: f64| {
        let r = c.hypot(s * (-profile.eval(t)).exp());
        if r == 0.0 {
            0.5
        } else {
            0.5 * (1.0 + c / r)
        }
    };
    let est = integrate_panels(weight, &profile.breakpoints(), tol, MAX_OUTER_INTERVALS)?;
    let raw = qubit.omega() * est.value;
    let (reduced, winding) = reduce_phase(-raw);
    Ok(PhaseIntegral {
        raw,
        reduced,
        winding,
        abs_error: qubit.omega() * est.abs_error,
    })
}

/// Geometric phase by direct integration of sin²(θ_t/2) over one period.
pub fn phase_exact_integral(
    qubit: &QubitSpec,
    bath: &BathSpec,
    method: &GammaMethod,
    quad_tol: Tolerance,
) -> Result<PhaseIntegral> {
    let profile = GammaProfile::prepare(bath, method, qubit.period(), quad_tol)?;
    phase_integral_with_profile(qubit, &profile, quad_tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFunctional {
    /// arg of the functional, in [0, 2π).
    pub value: f64,
    /// The complex number whose argument is the phase.
    pub functional: Complex64,
    /// √(ε₊(0) ε₊(τ)).
    pub modulus: f64,
    pub overlap: Complex64,
    /// ∫₀^τ ⟨Ψ₊|∂_tΨ₊⟩ dt (purely imaginary).
    pub connection: Complex64,
    pub abs_error: f64,
}

pub fn phase_functional_with_profile(
    qubit: &QubitSpec,
    profile: &GammaProfile,
    tol: Tolerance,
) -> Result<PhaseFunctional> {
    let tau = qubit.period();
    let state = |t: f64| {
        let g = profile.eval(t);
        let rho = ReducedDensityMatrix::from_gamma(qubit, t, g);
        eigensystem(&rho, qubit, g)
    };

    let start = state(0.0);
    let end = state(tau);
    if start.eps_minus.abs() > 1e-12 {
        return Err(Error::invalid("initial state", "must be pure (eps_minus(0) = 0)"));
    }

    // ⟨Ψ₊|∂_tΨ₊⟩ = iΩ sin²(θ_t/2) for Ψ₊ = (e^{iΩt} sin(θ_t/2), cos(θ_t/2))
    let est = integrate_panels(
        |t| state(t).excited_weight(),
        &profile.breakpoints(),
        tol,
        MAX_OUTER_INTERVALS,
    )?;
    let connection = Complex64::new(0.0, qubit.omega() * est.value);

    let v0 = start.dominant_eigenvector();
    let v1 = end.dominant_eigenvector();
    let overlap = v0[0].conj() * v1[0] + v0[1].conj() * v1[1];
    let modulus = (start.eps_plus * end.eps_plus).sqrt();

    let magnitude = modulus * overlap.norm();
    if magnitude < 1e-15 {
        return Err(Error::UndefinedPhase(magnitude));
    }
    let functional = modulus * overlap * (-connection).exp();
    let (value, _) = reduce_phase(functional.arg());
    Ok(PhaseFunctional {
        value,
        functional,
        modulus,
        overlap,
        connection,
        abs_error: qubit.omega() * est.abs_error,
    })
}

/// Geometric phase from the gauge-invariant functional of the dominant
/// eigenvector (pure initial state, so only ε₊ contributes).
pub fn phase_exact_functional(
    qubit: &QubitSpec,
    bath: &BathSpec,
    method: &GammaMethod,
    quad_tol: Tolerance,
) -> Result<PhaseFunctional> {
    let profile = GammaProfile::prepare(bath, method, qubit.period(), quad_tol)?;
    phase_functional_with_profile(qubit, &profile, quad_tol)
}

fn angular_envelope(qubit: &QubitSpec) -> f64 {
    let (s, c) = qubit.theta0().sin_cos();
    s * s * c
}

/// First-order correction in the four analytic limits:
///
/// * (1, high T): π² γ0 (πT/Ω) sin²θ0 cos θ0
/// * (1, zero T): π γ0 (ln(2πΛ/Ω) − 1) sin²θ0 cos θ0
/// * (3, high T): π γ0 (2T/Λ) sin²θ0 cos θ0
/// * (3, zero T): π γ0 sin²θ0 cos θ0
pub fn delta_phase_closed(qubit: &QubitSpec, bath: &BathSpec, regime: RegimeTag) -> Result<f64> {
    let g0 = bath.gamma0();
    let omega = qubit.omega();
    let factor = match (bath.exponent(), regime) {
        (1, RegimeTag::HighT) => PI * PI * g0 * (PI * bath.temperature() / omega),
        (1, RegimeTag::ZeroT) => PI * g0 * ((TWO_PI * bath.cutoff() / omega).ln() - 1.0),
        (3, RegimeTag::HighT) => PI * g0 * (2.0 * bath.temperature() / bath.cutoff()),
        (3, RegimeTag::ZeroT) => PI * g0,
        (exponent, regime) => return Err(Error::UnsupportedClosedForm { exponent, regime }),
    };
    Ok(factor * angular_envelope(qubit))
}

pub fn delta_phase_generic_with_profile(
    qubit: &QubitSpec,
    profile: &GammaProfile,
    tol: Tolerance,
) -> Result<f64> {
    let est = integrate_panels(|t| profile.eval(t), &profile.breakpoints(), tol, MAX_OUTER_INTERVALS)?;
    Ok(0.5 * qubit.omega() * angular_envelope(qubit) * est.value)
}

/// First-order correction for any Γ: (Ω/2) sin²θ0 cos θ0 ∫₀^τ Γ(t) dt.
///
/// Γ is linear in γ0, so γ0 ∂Γ/∂γ0 at γ0 = 0 is Γ itself.
pub fn delta_phase_generic(
    qubit: &QubitSpec,
    bath: &BathSpec,
    method: &GammaMethod,
    quad_tol: Tolerance,
) -> Result<f64> {
    let profile = GammaProfile::prepare(bath, method, qubit.period(), quad_tol)?;
    delta_phase_generic_with_profile(qubit, &profile, quad_tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaRoute {
    Closed(RegimeTag),
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    pub phi_unitary: f64,
    /// Reduced geometric phase in [0, 2π).
    pub phi_exact: f64,
    /// Ω ∫ sin²(θ_t/2) dt before orientation and reduction.
    pub phi_raw: f64,
    pub winding: i64,
    /// δΦ as returned by the chosen route (sign of the raw integral).
    pub delta_first_order: f64,
    /// First-order shift of `phi_exact`, i.e. −δΦ.
    pub delta_perturbative: f64,
    /// (phi_exact − phi_unitary) wrapped into (−π, π], minus `delta_perturbative`.
    pub residual: f64,
    pub integration_error: f64,
    pub gamma_method: GammaMethod,
    pub delta_route: DeltaRoute,
}

pub fn phase_result_with_profile(
    qubit: &QubitSpec,
    bath: &BathSpec,
    profile: &GammaProfile,
    method: &GammaMethod,
    route: DeltaRoute,
    tol: Tolerance,
) -> Result<PhaseResult> {
    let integral = phase_integral_with_profile(qubit, profile, tol)?;
    let delta = match route {
        DeltaRoute::Closed(regime) => delta_phase_closed(qubit, bath, regime)?,
        DeltaRoute::Generic => delta_phase_generic_with_profile(qubit, profile, tol)?,
    };
    let phi_unitary = phase_unitary(qubit);
    let shift = -delta;
    Ok(PhaseResult {
        phi_unitary,
        phi_exact: integral.reduced,
        phi_raw: integral.raw,
        winding: integral.winding,
        delta_first_order: delta,
        delta_perturbative: shift,
        residual: phase_difference(integral.reduced, phi_unitary) - shift,
        integration_error: integral.abs_error,
        gamma_method: *method,
        delta_route: route,
    })
}

/// All phase quantities for one (qubit, bath) point.
pub fn phase_result(
    qubit: &QubitSpec,
    bath: &BathSpec,
    method: &GammaMethod,
    route: DeltaRoute,
    quad_tol: Tolerance,
) -> Result<PhaseResult> {
    let profile = GammaProfile::prepare(bath, method, qubit.period(), quad_tol)?;
    phase_result_with_profile(qubit, bath, &profile, method, route, quad_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(theta0: f64) -> QubitSpec {
        QubitSpec::with_theta0(theta0).unwrap()
    }

    fn tol() -> Tolerance {
        default_phase_tolerance()
    }

    #[test]
    fn unitary_phase_values() {
        assert_eq!(phase_unitary(&q(0.0)), 0.0);
        assert_relative_eq!(phase_unitary(&q(PI / 2.0)), PI, max_relative = 1e-15);
        assert_relative_eq!(phase_unitary(&q(PI / 3.0)), PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn reduction_and_wrapping() {
        assert_eq!(reduce_phase(-1e-18).0, 0.0);
        let (r, w) = reduce_phase(-PI * 1.5);
        assert_relative_eq!(r, PI / 2.0, max_relative = 1e-15);
        assert_eq!(w, -1);
        assert_relative_eq!(phase_difference(0.1, TWO_PI - 0.1), 0.2, max_relative = 1e-12);
        assert_relative_eq!(phase_difference(TWO_PI - 0.1, 0.1), -0.2, max_relative = 1e-12);
    }

    #[test]
    fn decoupled_bath_gives_unitary_phase() {
        let free = BathSpec::ohmic(0.0, 100.0, 0.0).unwrap();
        let m = GammaMethod::ClosedForm(RegimeTag::ZeroT);
        let qubit = q(PI / 3.0);
        let p = phase_exact_integral(&qubit, &free, &m, tol()).unwrap();
        // raw integral is π(1 + cos θ0); its reverse reduces to π(1 − cos θ0)
        assert_relative_eq!(p.raw, 1.5 * PI, max_relative = 1e-12);
        assert_relative_eq!(p.reduced, PI / 2.0, max_relative = 1e-12);
        assert_eq!(p.winding, -1);
        let f = phase_exact_functional(&qubit, &free, &m, tol()).unwrap();
        assert!(phase_difference(f.value, p.reduced).abs() < 1e-10);
        let r = phase_result(&qubit, &free, &m, DeltaRoute::Generic, tol()).unwrap();
        assert_eq!(r.delta_perturbative, 0.0);
        assert!(r.residual.abs() < 1e-10);
    }

    #[test]
    fn pole_state_phase_is_zero() {
        let bath = BathSpec::ohmic(0.3, 100.0, 0.0).unwrap();
        let m = GammaMethod::ClosedForm(RegimeTag::ZeroT);
        let f = phase_exact_functional(&q(0.0), &bath, &m, tol()).unwrap();
        assert!(f.value.min(TWO_PI - f.value) < 1e-12, "phase {}", f.value);
        assert!(f.functional.re > 0.0);
    }

    #[test]
    fn fully_decohered_phase_vanishes() {
        let bath = BathSpec::ohmic(1e3, 100.0, 1000.0).unwrap();
        let m = GammaMethod::ClosedForm(RegimeTag::HighT);
        for theta0 in [PI / 3.0, 2.0 * PI / 3.0] {
            let p = phase_exact_integral(&q(theta0), &bath, &m, tol()).unwrap();
            assert!(p.reduced.min(TWO_PI - p.reduced) < 1e-5, "phase {}", p.reduced);
        }
    }

    #[test]
    fn closed_corrections() {
        let qubit = q(PI / 4.0);
        let zero = BathSpec::ohmic(0.01, 100.0, 0.0).unwrap();
        assert_relative_eq!(
            delta_phase_closed(&qubit, &zero, RegimeTag::ZeroT).unwrap(),
            0.060_457_054_423_165_87,
            max_relative = 1e-12
        );
        let s0 = BathSpec::supraohmic(0.01, 100.0, 0.0).unwrap();
        assert_relative_eq!(
            delta_phase_closed(&qubit, &s0, RegimeTag::ZeroT).unwrap(),
            0.011107207345395916,
            max_relative = 1e-12
        );
        let hot = BathSpec::ohmic(0.01, 100.0, 10.0 / PI).unwrap();
        assert_relative_eq!(
            delta_phase_closed(&qubit, &hot, RegimeTag::HighT).unwrap(),
            0.348_943_209_981_944,
            max_relative = 1e-12
        );
        for n in [1, 3] {
            for r in [RegimeTag::ZeroT, RegimeTag::HighT] {
                let b = BathSpec::new(n, 0.05, 100.0, 500.0).unwrap();
                assert!(delta_phase_closed(&q(PI / 2.0), &b, r).unwrap().abs() < 1e-12);
            }
        }
        assert!(delta_phase_closed(&qubit, &hot, RegimeTag::GeneralT).is_err());
    }

    #[test]
    fn generic_correction_matches_linear_gamma_exactly() {
        let qubit = q(PI / 4.0);
        let hot = BathSpec::ohmic(0.01, 100.0, 10.0 / PI).unwrap();
        let m = GammaMethod::ClosedForm(RegimeTag::HighT);
        let generic = delta_phase_generic(&qubit, &hot, &m, tol()).unwrap();
        let closed = delta_phase_closed(&qubit, &hot, RegimeTag::HighT).unwrap();
        assert_relative_eq!(generic, closed, max_relative = 1e-10);
        let free = hot.with_gamma0(0.0).unwrap();
        assert_eq!(delta_phase_generic(&qubit, &free, &m, tol()).unwrap(), 0.0);
    }

    #[test]
    fn ohmic_high_t_exact_shift() {
        // The full shift is well below the first-order 0.34894 because
        // Γ(τ) ≈ 0.63; reference from an independent adaptive quadrature.
        let qubit = q(PI / 4.0);
        let hot = BathSpec::ohmic(0.01, 100.0, 10.0 / PI).unwrap();
        let m = GammaMethod::ClosedForm(RegimeTag::HighT);
        let p = phase_exact_integral(&qubit, &hot, &m, tol()).unwrap();
        let shift = p.raw - PI * (1.0 + (PI / 4.0).cos());
        assert_relative_eq!(shift, 0.30188246296887833, max_relative = 1e-8);
    }

    #[test]
    fn routes_agree_on_quadrature_bath() {
        let bath = BathSpec::ohmic(0.1, 100.0, 0.0).unwrap();
        let m = GammaMethod::quadrature();
        let qubit = q(PI / 2.0);
        let profile = GammaProfile::prepare(&bath, &m, qubit.period(), tol()).unwrap();
        let a = phase_integral_with_profile(&qubit, &profile, tol()).unwrap();
        let b = phase_functional_with_profile(&qubit, &profile, tol()).unwrap();
        assert!(phase_difference(a.reduced, b.value).abs() < 1e-9);
        // the table reproduces the closed form (exact at T = 0, n = 1)
        for k in 0..50 {
            let t = qubit.period() * k as f64 / 49.0;
            let exact = gamma_closed(&bath, RegimeTag::ZeroT, t).unwrap();
            assert!((profile.eval(t) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_structure_of_corrections() {
        let b = BathSpec::supraohmic(0.05, 100.0, 0.0).unwrap();
        let d = |th: f64| delta_phase_closed(&q(th), &b, RegimeTag::ZeroT).unwrap();
        assert!(d(PI / 5.0) > 0.0);
        assert!(d(3.0 * PI / 5.0) < 0.0);
        assert_eq!(d(0.0), 0.0);
        assert!(d(PI).abs() < 1e-17);
    }
}
