//! Bath and qubit parameters, the spectral density and temperature regimes.
//!
//! Units: ħ = k_B = 1 and all frequencies, temperatures and inverse times
//! are measured in units of the qubit splitting Ω (which defaults to 1).

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Default value of 2T/Λ above which a bath is treated as high temperature.
pub const DEFAULT_HIGH_T_THRESHOLD: f64 = 10.0;

/// Below this argument `coth` switches to its Laurent series.
const COTH_SERIES_BELOW: f64 = 1e-2;
/// Above this argument `2 / expm1(2x)` is under half an ulp of 1.
const COTH_UNITY_ABOVE: f64 = 20.0;

/// Bosonic bath with spectral density J(ω) = (γ0/4) ωⁿ Λ^{1−n} e^{−ω/Λ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    exponent: u32,
    gamma0: f64,
    cutoff: f64,
    temperature: f64,
}

impl BathSpec {
    /// `gamma0 = 0` is accepted and describes the decoupled (unitary) limit.
    pub fn new(exponent: u32, gamma0: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        if exponent != 1 && exponent != 3 {
            return Err(Error::invalid(
                "exponent",
                format!("{exponent} (supported: 1 ohmic, 3 supraohmic)"),
            ));
        }
        if !(gamma0.is_finite() && gamma0 >= 0.0) {
            return Err(Error::invalid("gamma0", format!("{gamma0} (must be >= 0)")));
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::invalid("cutoff", format!("{cutoff} (must be > 0)")));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::invalid(
                "temperature",
                format!("{temperature} (must be >= 0)"),
            ));
        }
        Ok(BathSpec {
            exponent,
            gamma0,
            cutoff,
            temperature,
        })
    }

    pub fn ohmic(gamma0: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        Self::new(1, gamma0, cutoff, temperature)
    }

    pub fn supraohmic(gamma0: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        Self::new(3, gamma0, cutoff, temperature)
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn with_gamma0(&self, gamma0: f64) -> Result<Self> {
        Self::new(self.exponent, gamma0, self.cutoff, self.temperature)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.exponent, self.gamma0, self.cutoff, temperature)
    }

    pub fn with_cutoff(&self, cutoff: f64) -> Result<Self> {
        Self::new(self.exponent, self.gamma0, cutoff, self.temperature)
    }

    pub fn with_exponent(&self, exponent: u32) -> Result<Self> {
        Self::new(exponent, self.gamma0, self.cutoff, self.temperature)
    }

    /// Λ / (2T); `None` at zero temperature.
    pub fn regime_ratio(&self) -> Option<f64> {
        (self.temperature > 0.0).then(|| self.cutoff / (2.0 * self.temperature))
    }
}

/// Two-level system with splitting Ω, prepared in
/// cos(θ0/2)|e⟩ + sin(θ0/2)|g⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    omega: f64,
    theta0: f64,
}

impl QubitSpec {
    pub fn new(omega: f64, theta0: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid("omega", format!("{omega} (must be > 0)")));
        }
        if !(0.0..=PI).contains(&theta0) {
            return Err(Error::invalid("theta0", format!("{theta0} (must lie in [0, pi])")));
        }
        Ok(QubitSpec { omega, theta0 })
    }

    /// Unit splitting, the convention used throughout.
    pub fn with_theta0(theta0: f64) -> Result<Self> {
        Self::new(1.0, theta0)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Quasicyclic period τ = 2π/Ω.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    ZeroT,
    HighT,
    GeneralT,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::ZeroT => "zero_t",
            RegimeTag::HighT => "high_t",
            RegimeTag::GeneralT => "general_t",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero_t" | "zero" => Some(RegimeTag::ZeroT),
            "high_t" | "high" => Some(RegimeTag::HighT),
            "general_t" | "general" => Some(RegimeTag::GeneralT),
            _ => None,
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureRegime {
    pub tag: RegimeTag,
    /// 2T/Λ, the ratio compared against the high-temperature threshold.
    pub validity_ratio: f64,
}

pub fn classify_regime(bath: &BathSpec, threshold: f64) -> TemperatureRegime {
    let ratio = 2.0 * bath.temperature() / bath.cutoff();
    let tag = if bath.temperature() == 0.0 {
        RegimeTag::ZeroT
    } else if ratio >= threshold {
        RegimeTag::HighT
    } else {
        RegimeTag::GeneralT
    };
    TemperatureRegime {
        tag,
        validity_ratio: ratio,
    }
}

/// J(ω) = (γ0/4) ωⁿ Λ^{1−n} e^{−ω/Λ}.
pub fn spectral_density(bath: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::invalid("frequency", format!("{omega} (must be >= 0)")));
    }
    Ok(spectral_density_unchecked(bath, omega))
}

pub(crate) fn spectral_density_unchecked(bath: &BathSpec, omega: f64) -> f64 {
    let lambda = bath.cutoff();
    let n = bath.exponent() as i32;
    0.25 * bath.gamma0() * omega.powi(n) * lambda.powi(1 - n) * (-omega / lambda).exp()
}

/// coth(x) for x > 0, accurate to a few ulp on the whole half line.
pub fn coth_kernel(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid("coth argument", format!("{x} (must be > 0)")));
    }
    Ok(coth_positive(x))
}

fn coth_positive(x: f64) -> f64 {
    if x < COTH_SERIES_BELOW {
        let x2 = x * x;
        1.0 / x + x / 3.0 - x * x2 / 45.0
    } else if x > COTH_UNITY_ABOVE {
        1.0
    } else {
        1.0 + 2.0 / (2.0 * x).exp_m1()
    }
}

/// x·coth(x), continued to 1 at x = 0.
pub fn x_coth(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < COTH_SERIES_BELOW {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x * coth_positive(x)
    }
}

/// ω·coth(ω/2T), which is 2T at ω = 0 and just ω at zero temperature.
pub fn thermal_kernel(bath: &BathSpec, omega: f64) -> f64 {
    let t = bath.temperature();
    if t == 0.0 {
        omega
    } else {
        2.0 * t * x_coth(omega / (2.0 * t))
    }
}
