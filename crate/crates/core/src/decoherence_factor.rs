//! Decoherence factor Γ(t), diffusion coefficient D(t) and visibility e^{−Γ}.
//!
//! Γ(t) = 4 ∫₀^∞ dω J(ω) coth(ω/2T) (1 − cos ωt)/ω²  and  dΓ/dt = 4 D(t), with
//! D(t) = ∫₀^∞ dω J(ω) coth(ω/2T) sin(ωt)/ω.
//!
//! Both integrals are evaluated by adaptive quadrature on panels no wider than
//! half an oscillation period, truncated where the e^{−ω/Λ} envelope has
//! decayed below the absolute tolerance. Closed forms exist for the
//! zero- and high-temperature limits of the ohmic and supraohmic baths.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::environment::{classify_regime, thermal_kernel, BathSpec, RegimeTag, DEFAULT_HIGH_T_THRESHOLD};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, Estimate, Tolerance};

/// Below this value of ωt/2 the sinc factor uses its Taylor series.
const SINC_SERIES_BELOW: f64 = 1e-4;
/// Extra bisections allowed on top of the initial panels.
const EXTRA_INTERVALS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub tol: Tolerance,
    /// Upper bound on the number of initial frequency panels.
    pub panel_budget: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: Tolerance::default(),
            panel_budget: 2_000_000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tolerance(abs: f64, rel: f64) -> Result<Self> {
        Ok(QuadratureOptions {
            tol: Tolerance::new(abs, rel)?,
            ..Default::default()
        })
    }
}

/// How Γ(t) is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMethod {
    /// One of the four analytic limits: (1|3) × (ZeroT|HighT).
    ClosedForm(RegimeTag),
    /// Direct quadrature at the bath's actual temperature.
    Quadrature(QuadratureOptions),
}

impl GammaMethod {
    pub fn quadrature() -> Self {
        GammaMethod::Quadrature(QuadratureOptions::default())
    }

    pub fn label(&self) -> String {
        match self {
            GammaMethod::ClosedForm(r) => format!("closed_{r}"),
            GammaMethod::Quadrature(_) => "quadrature".to_string(),
        }
    }
}

impl fmt::Display for GammaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub value: f64,
    pub abs_error: f64,
    /// Set when a closed form is used on a bath the classifier puts in
    /// another regime.
    pub outside_validity: bool,
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("time", format!("{t} (must be finite and >= 0)")));
    }
    Ok(())
}

fn check_closed(bath: &BathSpec, regime: RegimeTag) -> Result<()> {
    if regime == RegimeTag::GeneralT {
        return Err(Error::UnsupportedClosedForm {
            exponent: bath.exponent(),
            regime,
        });
    }
    Ok(())
}

/// Closed-form Γ for the four supported (n, regime) pairs:
///
/// * (1, high T): π γ0 T t
/// * (1, zero T): (γ0/2) ln(1 + Λ²t²)
/// * (3, high T): (2Tγ0/Λ) Λ²t²/(1 + Λ²t²)
/// * (3, zero T): γ0 Λ⁴t⁴/(1 + Λ²t²)²
pub fn gamma_closed(bath: &BathSpec, regime: RegimeTag, t: f64) -> Result<f64> {
    check_time(t)?;
    check_closed(bath, regime)?;
    let g0 = bath.gamma0();
    let x = bath.cutoff() * t;
    let x2 = x * x;
    let frac = if x2.is_finite() { x2 / (1.0 + x2) } else { 1.0 };
    Ok(match (bath.exponent(), regime) {
        (1, RegimeTag::HighT) => PI * g0 * bath.temperature() * t,
        (1, RegimeTag::ZeroT) => 0.5 * g0 * x2.ln_1p(),
        (3, RegimeTag::HighT) => 2.0 * bath.temperature() * g0 / bath.cutoff() * frac,
        (3, RegimeTag::ZeroT) => g0 * frac * frac,
        _ => unreachable!("validated bath exponent"),
    })
}

/// D(t) = Γ̇(t)/4 for the closed forms of [`gamma_closed`].
pub fn diffusion_closed(bath: &BathSpec, regime: RegimeTag, t: f64) -> Result<f64> {
    check_time(t)?;
    check_closed(bath, regime)?;
    let g0 = bath.gamma0();
    let lambda = bath.cutoff();
    let x = lambda * t;
    let q = 1.0 + x * x;
    Ok(match (bath.exponent(), regime) {
        (1, RegimeTag::HighT) => 0.25 * PI * g0 * bath.temperature(),
        (1, RegimeTag::ZeroT) => 0.25 * g0 * lambda * x / q,
        (3, RegimeTag::HighT) => {
            let plateau = 2.0 * bath.temperature() * g0 / lambda;
            0.5 * plateau * lambda * x / (q * q)
        }
        (3, RegimeTag::ZeroT) => g0 * lambda * x * x * x / (q * q * q),
        _ => unreachable!("validated bath exponent"),
    })
}

/// Whether the classifier agrees that `regime` describes `bath`.
pub fn closed_form_valid(bath: &BathSpec, regime: RegimeTag, threshold: f64) -> bool {
    classify_regime(bath, threshold).tag == regime
}

fn sinc(u: f64) -> f64 {
    if u.abs() < SINC_SERIES_BELOW {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// γ0 Λ^{1−n} e^{−ω/Λ} ω^{n−1} · ω coth(ω/2T), i.e. 4 J(ω) coth(ω/2T) / ω.
fn weighted_density(bath: &BathSpec, omega: f64) -> f64 {
    let lambda = bath.cutoff();
    let n = bath.exponent() as i32;
    bath.gamma0()
        * lambda.powi(1 - n)
        * (-omega / lambda).exp()
        * omega.powi(n - 1)
        * thermal_kernel(bath, omega)
}

fn frequency_panels(bath: &BathSpec, t: f64, opts: &QuadratureOptions) -> Result<Vec<f64>> {
    let lambda = bath.cutoff();
    let decades = if opts.tol.abs > 0.0 { (1.0 / opts.tol.abs).ln() } else { 40.0 };
    let omega_max = lambda * decades.max(40.0);
    let width = if t > 0.0 { (PI / t).min(lambda) } else { lambda };
    let count = (omega_max / width).ceil() as usize;
    if count > opts.panel_budget {
        return Err(Error::PanelBudget {
            required: count,
            budget: opts.panel_budget,
        });
    }
    let mut bps: Vec<f64> = (0..count)
        .map(|k| k as f64 * width)
        .take_while(|&w| w < omega_max)
        .collect();
    bps.push(omega_max);
    Ok(bps)
}

/// Γ(t) by direct quadrature of the defining frequency integral.
pub fn gamma_quadrature(bath: &BathSpec, t: f64, opts: &QuadratureOptions) -> Result<Estimate> {
    check_time(t)?;
    if t == 0.0 || bath.gamma0() == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    let bps = frequency_panels(bath, t, opts)?;
    let half_t2 = 0.5 * t * t;
    // (1 − cos ωt)/ω² = (t²/2) sinc²(ωt/2), free of cancellation
    let integrand = |w: f64| {
        let s = sinc(0.5 * w * t);
        weighted_density(bath, w) * half_t2 * s * s
    };
    integrate_panels(integrand, &bps, opts.tol, bps.len() + EXTRA_INTERVALS)
}

/// D(t) with the time integral done analytically:
/// D(t) = ∫₀^∞ dω J(ω) coth(ω/2T) sin(ωt)/ω.
pub fn diffusion_coefficient(bath: &BathSpec, t: f64, opts: &QuadratureOptions) -> Result<Estimate> {
    check_time(t)?;
    if t == 0.0 || bath.gamma0() == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    let bps = frequency_panels(bath, t, opts)?;
    let integrand = |w: f64| 0.25 * weighted_density(bath, w) * t * sinc(w * t);
    integrate_panels(integrand, &bps, opts.tol, bps.len() + EXTRA_INTERVALS)
}

/// Γ(t) by the selected method.
pub fn gamma(bath: &BathSpec, method: &GammaMethod, t: f64) -> Result<GammaValue> {
    match method {
        GammaMethod::ClosedForm(regime) => Ok(GammaValue {
            value: gamma_closed(bath, *regime, t)?,
            abs_error: 0.0,
            outside_validity: !closed_form_valid(bath, *regime, DEFAULT_HIGH_T_THRESHOLD),
        }),
        GammaMethod::Quadrature(opts) => {
            let est = gamma_quadrature(bath, t, opts)?;
            Ok(GammaValue {
                value: est.value.max(0.0),
                abs_error: est.abs_error,
                outside_validity: false,
            })
        }
    }
}

/// D(t) by the selected method.
pub fn diffusion(bath: &BathSpec, method: &GammaMethod, t: f64) -> Result<f64> {
    match method {
        GammaMethod::ClosedForm(regime) => diffusion_closed(bath, *regime, t),
        GammaMethod::Quadrature(opts) => Ok(diffusion_coefficient(bath, t, opts)?.value),
    }
}

/// Interference visibility F = e^{−Γ}.
pub fn visibility(gamma: f64) -> f64 {
    (-gamma).exp()
}

#[derive(Debug, Clone)]
pub struct DecoherenceCurve {
    pub times: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub abs_errors: Vec<f64>,
    pub method: GammaMethod,
    pub bath: BathSpec,
}

impl DecoherenceCurve {
    pub fn visibilities(&self) -> Vec<f64> {
        self.gamma_values.iter().map(|&g| visibility(g)).collect()
    }
}

/// Uniform grid `0, t_max/(samples−1), …, t_max`.
pub fn time_grid(t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::invalid("t_max", format!("{t_max} (must be > 0)")));
    }
    if samples < 2 {
        return Err(Error::invalid("samples", format!("{samples} (need at least 2)")));
    }
    let last = (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| if i == samples - 1 { t_max } else { t_max * i as f64 / last })
        .collect())
}

/// Samples Γ on a uniform grid. Points are evaluated in parallel on the
/// current rayon pool; output order always follows the grid.
pub fn sample_curve(
    bath: &BathSpec,
    method: &GammaMethod,
    t_max: f64,
    samples: usize,
) -> Result<DecoherenceCurve> {
    let times = time_grid(t_max, samples)?;
    let values = times
        .par_iter()
        .map(|&t| gamma(bath, method, t).map_err(|e| e.at_time(t)))
        .collect::<Result<Vec<GammaValue>>>()?;
    Ok(DecoherenceCurve {
        gamma_values: values.iter().map(|v| v.value).collect(),
        abs_errors: values.iter().map(|v| v.abs_error).collect(),
        times,
        method: *method,
        bath: *bath,
    })
}
