//! Run configuration: `[section]` headers with `key = value` lines, read and
//! written as TOML.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use dephaser_core::decoherence_factor::{GammaMethod, QuadratureOptions};
use dephaser_core::environment::{classify_regime, BathSpec, QubitSpec, RegimeTag, DEFAULT_HIGH_T_THRESHOLD};
use dephaser_core::quadrature::Tolerance;
use dephaser_core::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_PRECISION: usize = 12;
pub const DEFAULT_GRID_BUDGET: usize = 1_000_000;

/// Sweepable parameters, in nesting order (the last varies fastest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Exponent,
    Gamma0,
    Cutoff,
    Temperature,
    Omega,
    Theta0,
}

impl Axis {
    pub const ALL: [Axis; 6] = [
        Axis::Exponent,
        Axis::Gamma0,
        Axis::Cutoff,
        Axis::Temperature,
        Axis::Omega,
        Axis::Theta0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axis::Exponent => "exponent",
            Axis::Gamma0 => "gamma0",
            Axis::Cutoff => "cutoff",
            Axis::Temperature => "temperature",
            Axis::Omega => "omega",
            Axis::Theta0 => "theta0",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Γ method as configured; a closed form without a regime is resolved per
/// bath by the temperature classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodChoice {
    Closed(Option<RegimeTag>),
    Quadrature(QuadratureOptions),
}

impl MethodChoice {
    pub fn resolve(&self, bath: &BathSpec) -> Result<GammaMethod> {
        match self {
            MethodChoice::Closed(Some(regime)) => Ok(GammaMethod::ClosedForm(*regime)),
            MethodChoice::Closed(None) => match classify_regime(bath, DEFAULT_HIGH_T_THRESHOLD).tag {
                RegimeTag::GeneralT => Err(Error::UnsupportedClosedForm {
                    exponent: bath.exponent(),
                    regime: RegimeTag::GeneralT,
                }),
                tag => Ok(GammaMethod::ClosedForm(tag)),
            },
            MethodChoice::Quadrature(opts) => Ok(GammaMethod::Quadrature(*opts)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    /// Significant digits in CSV cells.
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub qubit: QubitSpec,
    pub bath: BathSpec,
    pub method: MethodChoice,
    /// Sweep axes in [`Axis`] order, each with at least one value.
    pub grid: Vec<(Axis, Vec<f64>)>,
    pub output: OutputSpec,
    pub grid_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            qubit: QubitSpec::new(1.0, PI / 4.0).expect("valid default qubit"),
            bath: BathSpec::ohmic(0.3, 100.0, 0.0).expect("valid default bath"),
            method: MethodChoice::Quadrature(QuadratureOptions::default()),
            grid: Vec::new(),
            output: OutputSpec {
                path: None,
                precision: DEFAULT_PRECISION,
            },
            grid_budget: DEFAULT_GRID_BUDGET,
        }
    }
}

/// One expanded sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub qubit: QubitSpec,
    pub bath: BathSpec,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            reason: e.message().to_string(),
        })?;
        raw.into_config()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&RawConfig::from_config(self)).expect("config serializes")
    }

    /// Replaces (or adds) a sweep axis, keeping axis order.
    pub fn set_axis(&mut self, axis: Axis, values: Vec<f64>) -> Result<()> {
        if values.is_empty() {
            return Err(Error::Config {
                line: 0,
                reason: format!("grid axis {axis} has no values"),
            });
        }
        self.grid.retain(|(a, _)| *a != axis);
        self.grid.push((axis, values));
        self.grid.sort_by_key(|(a, _)| *a);
        Ok(())
    }

    pub fn grid_size(&self) -> Result<usize> {
        let mut size: usize = 1;
        for (axis, values) in &self.grid {
            size = size.checked_mul(values.len()).ok_or_else(|| Error::Config {
                line: 0,
                reason: format!("grid size overflows at axis {axis}"),
            })?;
        }
        if size > self.grid_budget {
            return Err(Error::Config {
                line: 0,
                reason: format!("grid has {size} points, budget is {}", self.grid_budget),
            });
        }
        Ok(size)
    }

    /// Cartesian product of the grid axes applied to the base specs.
    pub fn expand(&self) -> Result<Vec<GridPoint>> {
        let size = self.grid_size()?;
        let mut points = Vec::with_capacity(size);
        for index in 0..size {
            let mut rest = index;
            let mut qubit = self.qubit;
            let mut bath = self.bath;
            for (axis, values) in self.grid.iter().rev() {
                let v = values[rest % values.len()];
                rest /= values.len();
                apply_axis(&mut qubit, &mut bath, *axis, v)?;
            }
            points.push(GridPoint { qubit, bath });
        }
        Ok(points)
    }
}

fn apply_axis(qubit: &mut QubitSpec, bath: &mut BathSpec, axis: Axis, v: f64) -> Result<()> {
    match axis {
        Axis::Exponent => *bath = bath.with_exponent(integer_exponent(v)?)?,
        Axis::Gamma0 => *bath = bath.with_gamma0(v)?,
        Axis::Cutoff => *bath = bath.with_cutoff(v)?,
        Axis::Temperature => *bath = bath.with_temperature(v)?,
        Axis::Omega => *qubit = QubitSpec::new(v, qubit.theta0())?,
        Axis::Theta0 => *qubit = QubitSpec::new(qubit.omega(), v)?,
    }
    Ok(())
}

fn integer_exponent(v: f64) -> Result<u32> {
    if v.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&v) {
        Ok(v as u32)
    } else {
        Err(Error::InvalidParameter {
            name: "exponent",
            reason: format!("{v} is not an integer"),
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    qubit: RawQubit,
    #[serde(default)]
    bath: RawBath,
    #[serde(default)]
    method: RawMethod,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    grid: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    limits: RawLimits,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawQubit {
    omega: f64,
    theta0: f64,
}

impl Default for RawQubit {
    fn default() -> Self {
        RawQubit {
            omega: 1.0,
            theta0: PI / 4.0,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawBath {
    exponent: u32,
    gamma0: f64,
    cutoff: f64,
    temperature: f64,
}

impl Default for RawBath {
    fn default() -> Self {
        RawBath {
            exponent: 1,
            gamma0: 0.3,
            cutoff: 100.0,
            temperature: 0.0,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawMethod {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    panel_budget: Option<usize>,
}

impl Default for RawMethod {
    fn default() -> Self {
        RawMethod {
            kind: "quadrature".into(),
            regime: None,
            abs_tol: None,
            rel_tol: None,
            panel_budget: None,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    precision: usize,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput {
            path: None,
            precision: DEFAULT_PRECISION,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawLimits {
    grid_budget: usize,
}

impl Default for RawLimits {
    fn default() -> Self {
        RawLimits {
            grid_budget: DEFAULT_GRID_BUDGET,
        }
    }
}

fn config_err(reason: impl Into<String>) -> Error {
    Error::Config {
        line: 0,
        reason: reason.into(),
    }
}

pub fn parse_method(kind: &str, regime: Option<&str>) -> Result<MethodChoice> {
    match kind {
        "closed" => {
            let regime = match regime {
                None => None,
                Some(r) => Some(RegimeTag::parse(r).ok_or_else(|| config_err(format!("unknown regime {r:?}")))?),
            };
            Ok(MethodChoice::Closed(regime))
        }
        "quadrature" => {
            if regime.is_some() {
                return Err(config_err("regime applies only to closed-form methods"));
            }
            Ok(MethodChoice::Quadrature(QuadratureOptions::default()))
        }
        other => Err(config_err(format!("unknown gamma method {other:?} (closed|quadrature)"))),
    }
}

impl RawConfig {
    fn into_config(self) -> Result<RunConfig> {
        let qubit = QubitSpec::new(self.qubit.omega, self.qubit.theta0)?;
        let bath = BathSpec::new(self.bath.exponent, self.bath.gamma0, self.bath.cutoff, self.bath.temperature)?;

        let mut method = parse_method(&self.method.kind, self.method.regime.as_deref())?;
        let tuned = self.method.abs_tol.is_some() || self.method.rel_tol.is_some() || self.method.panel_budget.is_some();
        match &mut method {
            MethodChoice::Quadrature(opts) => {
                let defaults = Tolerance::default();
                opts.tol = Tolerance::new(
                    self.method.abs_tol.unwrap_or(defaults.abs),
                    self.method.rel_tol.unwrap_or(defaults.rel),
                )?;
                if let Some(budget) = self.method.panel_budget {
                    opts.panel_budget = budget;
                }
            }
            MethodChoice::Closed(_) if tuned => {
                return Err(config_err("tolerances apply only to the quadrature method"));
            }
            MethodChoice::Closed(_) => {}
        }

        if self.output.precision == 0 || self.output.precision > 17 {
            return Err(config_err(format!("precision {} outside 1..=17", self.output.precision)));
        }

        let mut config = RunConfig {
            qubit,
            bath,
            method,
            grid: Vec::new(),
            output: OutputSpec {
                path: self.output.path.map(PathBuf::from),
                precision: self.output.precision,
            },
            grid_budget: self.limits.grid_budget,
        };
        for (name, values) in self.grid {
            let axis = Axis::parse(&name).ok_or_else(|| config_err(format!("unknown grid axis {name:?}")))?;
            config.set_axis(axis, values)?;
        }
        config.grid_size()?;
        Ok(config)
    }

    fn from_config(config: &RunConfig) -> Self {
        let method = match config.method {
            MethodChoice::Closed(regime) => RawMethod {
                kind: "closed".into(),
                regime: regime.map(|r| r.as_str().to_string()),
                ..Default::default()
            },
            MethodChoice::Quadrature(opts) => RawMethod {
                kind: "quadrature".into(),
                regime: None,
                abs_tol: Some(opts.tol.abs),
                rel_tol: Some(opts.tol.rel),
                panel_budget: Some(opts.panel_budget),
            },
        };
        RawConfig {
            qubit: RawQubit {
                omega: config.qubit.omega(),
                theta0: config.qubit.theta0(),
            },
            bath: RawBath {
                exponent: config.bath.exponent(),
                gamma0: config.bath.gamma0(),
                cutoff: config.bath.cutoff(),
                temperature: config.bath.temperature(),
            },
            method,
            grid: config
                .grid
                .iter()
                .map(|(a, v)| (a.name().to_string(), v.clone()))
                .collect(),
            output: RawOutput {
                path: config.output.path.as_ref().map(|p| p.display().to_string()),
                precision: config.output.precision,
            },
            limits: RawLimits {
                grid_budget: config.grid_budget,
            },
        }
    }
}
