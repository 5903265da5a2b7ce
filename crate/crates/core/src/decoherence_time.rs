//! Decoherence time t_D defined by Γ(t_D) = 1, saturation detection and the
//! observability condition t_D > τ.

use std::f64::consts::PI;

use crate::decoherence_factor::{gamma, GammaMethod};
use crate::environment::{classify_regime, BathSpec, QubitSpec, RegimeTag, DEFAULT_HIGH_T_THRESHOLD};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest time probed while bracketing.
    pub t_probe_max: f64,
    /// Relative width of the final bisection bracket.
    pub time_rel_tol: f64,
    /// Allowed |Γ(t_D) − 1|.
    pub certificate_tol: f64,
    /// Relative change per doubling of t below which Γ counts as flat.
    pub flat_tol: f64,
    /// Period τ the root is compared against.
    pub period: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            t_probe_max: 100.0,
            time_rel_tol: 1e-10,
            certificate_tol: 1e-6,
            flat_tol: 1e-6,
            period: 2.0 * PI,
        }
    }
}

impl SolverOptions {
    pub fn with_probe_max(t_probe_max: f64) -> Result<Self> {
        if !(t_probe_max > 0.0) || !t_probe_max.is_finite() {
            return Err(Error::invalid("t_probe_max", format!("{t_probe_max}")));
        }
        Ok(SolverOptions {
            t_probe_max,
            ..Default::default()
        })
    }

    pub fn for_qubit(mut self, qubit: &QubitSpec) -> Self {
        self.period = qubit.period();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    TimeFound {
        t_d: f64,
        /// Γ re-evaluated at t_D.
        gamma_at_root: f64,
    },
    Saturates {
        /// Last value once Γ stopped changing.
        plateau: f64,
        /// Largest Γ seen while probing.
        sup: f64,
        t_flat: f64,
    },
    Indeterminate {
        reason: String,
        t_last: f64,
        gamma_last: f64,
    },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::TimeFound { .. } => "time_found",
            Outcome::Saturates { .. } => "saturates",
            Outcome::Indeterminate { .. } => "indeterminate",
        }
    }

    pub fn time(&self) -> Option<f64> {
        match self {
            Outcome::TimeFound { t_d, .. } => Some(*t_d),
            _ => None,
        }
    }

    pub fn plateau(&self) -> Option<f64> {
        match self {
            Outcome::Saturates { plateau, .. } => Some(*plateau),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceVerdict {
    pub outcome: Outcome,
    /// t_D > τ, true for a plateau below 1, unknown when indeterminate.
    pub observable_window: Option<bool>,
    /// Closed-form estimate for the matching (n, regime), if any.
    pub formula_estimate: Option<f64>,
    pub regime: RegimeTag,
    pub evaluations: usize,
}

/// Closed-form t_D estimates:
///
/// * (1, high T): 1/(πγ0T)
/// * (1, zero T): e^{1/γ0}/Λ
/// * (3, high T): (1/Λ)√(Λ/(2Tγ0)), only when the plateau 2Tγ0/Λ exceeds 1
pub fn formula_estimate(bath: &BathSpec, regime: RegimeTag) -> Option<f64> {
    let g0 = bath.gamma0();
    let lambda = bath.cutoff();
    let temp = bath.temperature();
    if g0 <= 0.0 {
        return None;
    }
    let t = match (bath.exponent(), regime) {
        (1, RegimeTag::HighT) => 1.0 / (PI * g0 * temp),
        (1, RegimeTag::ZeroT) => (1.0 / g0).exp() / lambda,
        (3, RegimeTag::HighT) if 2.0 * temp * g0 / lambda > 1.0 => {
            (lambda / (2.0 * temp * g0)).sqrt() / lambda
        }
        _ => return None,
    };
    t.is_finite().then_some(t)
}

fn method_regime(bath: &BathSpec, method: &GammaMethod) -> RegimeTag {
    match method {
        GammaMethod::ClosedForm(regime) => *regime,
        GammaMethod::Quadrature(_) => classify_regime(bath, DEFAULT_HIGH_T_THRESHOLD).tag,
    }
}

struct Probe<'a> {
    bath: &'a BathSpec,
    method: &'a GammaMethod,
    evaluations: usize,
}

impl Probe<'_> {
    fn at(&mut self, t: f64) -> Result<f64> {
        self.evaluations += 1;
        Ok(gamma(self.bath, self.method, t)?.value)
    }
}

const MAX_HALVINGS: usize = 1100;
const MAX_BISECTIONS: usize = 400;

/// Finds Γ(t_D) = 1 by geometric bracketing from t = 1/Λ and bisection, or
/// reports that Γ flattens below 1.
pub fn solve_decoherence_time(
    bath: &BathSpec,
    method: &GammaMethod,
    opts: &SolverOptions,
) -> Result<DecoherenceVerdict> {
    if !(opts.t_probe_max > 0.0) || !opts.t_probe_max.is_finite() {
        return Err(Error::invalid("t_probe_max", format!("{}", opts.t_probe_max)));
    }
    let regime = method_regime(bath, method);
    let mut probe = Probe {
        bath,
        method,
        evaluations: 0,
    };
    let outcome = locate(&mut probe, opts)?;
    let observable_window = match &outcome {
        Outcome::TimeFound { t_d, .. } => Some(*t_d > opts.period),
        Outcome::Saturates { .. } => Some(true),
        Outcome::Indeterminate { .. } => None,
    };
    Ok(DecoherenceVerdict {
        outcome,
        observable_window,
        formula_estimate: formula_estimate(bath, regime),
        regime,
        evaluations: probe.evaluations,
    })
}

fn locate(probe: &mut Probe, opts: &SolverOptions) -> Result<Outcome> {
    let start = (1.0 / probe.bath.cutoff()).min(opts.t_probe_max);
    let g_start = probe.at(start)?;

    let (lo, hi) = if g_start >= 1.0 {
        let mut hi = start;
        let mut lo = 0.5 * start;
        let mut found = false;
        for _ in 0..MAX_HALVINGS {
            if lo <= 0.0 {
                break;
            }
            if probe.at(lo)? < 1.0 {
                found = true;
                break;
            }
            hi = lo;
            lo *= 0.5;
        }
        if !found {
            return Ok(Outcome::Indeterminate {
                reason: "gamma stays above 1 as t -> 0".into(),
                t_last: lo,
                gamma_last: g_start,
            });
        }
        (lo, hi)
    } else {
        let mut t = start;
        let mut g = g_start;
        let mut sup = g;
        loop {
            if t >= opts.t_probe_max {
                return Ok(Outcome::Indeterminate {
                    reason: "probe range exhausted before bracketing or flattening".into(),
                    t_last: t,
                    gamma_last: g,
                });
            }
            let t_next = (2.0 * t).min(opts.t_probe_max);
            let g_next = probe.at(t_next)?;
            sup = sup.max(g_next);
            if g_next >= 1.0 {
                break (t, t_next);
            }
            let change = if g_next == g { 0.0 } else { (g_next - g).abs() / g.abs().max(g_next.abs()) };
            // a short final step cannot certify flattening
            let full_doubling = t_next == 2.0 * t;
            if full_doubling && change < opts.flat_tol {
                if 1.0 - g_next <= opts.certificate_tol {
                    return Ok(Outcome::Indeterminate {
                        reason: "plateau indistinguishable from 1".into(),
                        t_last: t_next,
                        gamma_last: g_next,
                    });
                }
                return Ok(Outcome::Saturates {
                    plateau: g_next,
                    sup,
                    t_flat: t_next,
                });
            }
            t = t_next;
            g = g_next;
        }
    };

    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= opts.time_rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if probe.at(mid)? >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t_d = 0.5 * (lo + hi);
    let gamma_at_root = probe.at(t_d)?;
    if (gamma_at_root - 1.0).abs() > opts.certificate_tol {
        return Ok(Outcome::Indeterminate {
            reason: format!("root certificate failed: |gamma(t_d) - 1| = {:e}", (gamma_at_root - 1.0).abs()),
            t_last: t_d,
            gamma_last: gamma_at_root,
        });
    }
    Ok(Outcome::TimeFound { t_d, gamma_at_root })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observability {
    /// Coarse inequality: γ0 < Λ/T at high T, γ0 < 1 at zero T.
    pub coarse: Option<bool>,
    pub coarse_rule: &'static str,
    /// t_D/τ from the solver; infinite for a plateau below 1.
    pub margin: Option<f64>,
    pub verdict: DecoherenceVerdict,
}

pub fn coarse_criterion(bath: &BathSpec, regime: RegimeTag) -> (Option<bool>, &'static str) {
    match regime {
        RegimeTag::HighT => (
            Some(bath.gamma0() < bath.cutoff() / bath.temperature()),
            "gamma0 < cutoff/temperature",
        ),
        RegimeTag::ZeroT => (Some(bath.gamma0() < 1.0), "gamma0 < 1"),
        RegimeTag::GeneralT => (None, "none"),
    }
}

/// Evaluates t_D > τ both through the coarse inequality and the solved t_D.
pub fn observability_condition(
    bath: &BathSpec,
    qubit: &QubitSpec,
    method: &GammaMethod,
    opts: &SolverOptions,
) -> Result<Observability> {
    let opts = opts.for_qubit(qubit);
    let verdict = solve_decoherence_time(bath, method, &opts)?;
    let (coarse, coarse_rule) = coarse_criterion(bath, verdict.regime);
    let margin = match &verdict.outcome {
        Outcome::TimeFound { t_d, .. } => Some(t_d / opts.period),
        Outcome::Saturates { .. } => Some(f64::INFINITY),
        Outcome::Indeterminate { .. } => None,
    };
    Ok(Observability {
        coarse,
        coarse_rule,
        margin,
        verdict,
    })
}
