//! The CSV-producing commands behind the `dephaser` subcommands.

use std::path::{Path, PathBuf};

use dephaser_core::decoherence_factor::{sample_curve, time_grid, GammaMethod};
use dephaser_core::decoherence_time::{observability_condition, Outcome, SolverOptions};
use dephaser_core::environment::{classify_regime, BathSpec, QubitSpec, RegimeTag, DEFAULT_HIGH_T_THRESHOLD};
use dephaser_core::geometric_phase::{
    default_phase_tolerance, delta_phase_closed, delta_phase_generic_with_profile, phase_difference,
    phase_functional_with_profile, phase_integral_with_profile, phase_unitary, GammaProfile,
};
use dephaser_core::{Error, Result};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::table::{write_file, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseRoute {
    Integral,
    Functional,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaChoice {
    Closed,
    Generic,
    Both,
}

/// Runs `f` on a dedicated pool of `jobs` workers (0 or `None`: all cores).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "jobs",
            reason: e.to_string(),
        })?;
    Ok(pool.install(f))
}

fn echo(table: &mut Table, command: &str, args: &[(&str, String)], cfg: &RunConfig) {
    table.comment(&format!("dephaser {command}"));
    for (key, value) in args {
        table.comment(&format!("{key} = {value}"));
    }
    table.comment(&cfg.to_toml());
}

/// First error in grid order, so failures are reported deterministically.
fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

fn reject_grid(cfg: &RunConfig, command: &str) -> Result<()> {
    if cfg.grid.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("sweeps are not supported by {command}"),
        })
    }
}

/// Γ(t) and e^{−Γ} on a uniform grid over [0, t_max].
pub fn gamma_csv(cfg: &RunConfig, t_max: f64, samples: usize) -> Result<String> {
    reject_grid(cfg, "gamma")?;
    let method = cfg.method.resolve(&cfg.bath)?;
    let curve = sample_curve(&cfg.bath, &method, t_max, samples)?;
    let mut table = Table::new(&["t", "gamma", "visibility"]);
    echo(
        &mut table,
        "gamma",
        &[("t_max", t_max.to_string()), ("samples", samples.to_string())],
        cfg,
    );
    for ((t, g), v) in curve.times.iter().zip(&curve.gamma_values).zip(curve.visibilities()) {
        table.push(vec![Cell::Num(*t), Cell::Num(*g), Cell::Num(v)]);
    }
    Ok(table.render(cfg.output.precision))
}

pub const FIGURE1_GAMMA0: [f64; 2] = [0.3, 0.03];
pub const FIGURE1_CUTOFF: f64 = 100.0;
pub const FIGURE1_HIGH_T: f64 = 1000.0;
pub const FIGURE1_LOW_T: f64 = 1.55;
pub const FIGURE1_T_MAX: f64 = 0.5;
pub const FIGURE1_SAMPLES: usize = 201;

fn figure1_curves(exponent: u32, gamma0: f64, precision: usize) -> Result<String> {
    let bath = |temp| BathSpec::new(exponent, gamma0, FIGURE1_CUTOFF, temp);
    let high = bath(FIGURE1_HIGH_T)?;
    let low = bath(FIGURE1_LOW_T)?;
    let zero = bath(0.0)?;
    let quad = GammaMethod::quadrature();
    let columns = [
        (high, GammaMethod::ClosedForm(RegimeTag::HighT)),
        (high, quad),
        (low, quad),
        (zero, quad),
        (zero, GammaMethod::ClosedForm(RegimeTag::ZeroT)),
    ];
    let curves = first_error(
        columns
            .iter()
            .map(|(b, m)| sample_curve(b, m, FIGURE1_T_MAX, FIGURE1_SAMPLES))
            .collect(),
    )?;

    let mut table = Table::new(&[
        "t",
        "gamma_high_closed",
        "gamma_high_quadrature",
        "gamma_low_quadrature",
        "gamma_zero_quadrature",
        "gamma_zero_closed",
    ]);
    table.comment(&format!(
        "dephaser figure1: exponent = {exponent}, gamma0 = {gamma0}, cutoff = {FIGURE1_CUTOFF}"
    ));
    table.comment(&format!(
        "high = {FIGURE1_HIGH_T}, low = {FIGURE1_LOW_T}, zero = 0 (temperatures in units of omega)"
    ));
    let times = time_grid(FIGURE1_T_MAX, FIGURE1_SAMPLES)?;
    for (i, t) in times.iter().enumerate() {
        let mut row = vec![Cell::Num(*t)];
        row.extend(curves.iter().map(|c| Cell::Num(c.gamma_values[i])));
        table.push(row);
    }
    Ok(table.render(precision))
}

const DECTIME_HEADER: [&str; 13] = [
    "exponent",
    "gamma0",
    "cutoff",
    "temperature",
    "omega",
    "regime",
    "verdict",
    "t_d",
    "plateau",
    "formula_t_d",
    "observable",
    "coarse_observable",
    "margin",
];

fn dectime_row(bath: &BathSpec, qubit: &QubitSpec, method: &GammaMethod, opts: &SolverOptions) -> Result<Vec<Cell>> {
    let obs = observability_condition(bath, qubit, method, opts)?;
    let v = &obs.verdict;
    let plateau = match &v.outcome {
        Outcome::Saturates { plateau, .. } => Some(*plateau),
        _ => None,
    };
    Ok(vec![
        Cell::Int(bath.exponent() as i64),
        Cell::Num(bath.gamma0()),
        Cell::Num(bath.cutoff()),
        Cell::Num(bath.temperature()),
        Cell::Num(qubit.omega()),
        Cell::Text(v.regime.as_str().into()),
        Cell::Text(v.outcome.label().into()),
        Cell::opt(v.outcome.time()),
        Cell::opt(plateau),
        Cell::opt(v.formula_estimate),
        Cell::flag(v.observable_window),
        Cell::flag(obs.coarse),
        Cell::opt(obs.margin),
    ])
}

fn figure1_dectime(gamma0: f64, precision: usize) -> Result<String> {
    let qubit = QubitSpec::new(1.0, std::f64::consts::FRAC_PI_4)?;
    let opts = SolverOptions::default();
    let method = GammaMethod::quadrature();
    let cases: Vec<(u32, f64)> = [1, 3]
        .into_iter()
        .flat_map(|n| [FIGURE1_HIGH_T, FIGURE1_LOW_T, 0.0].map(|t| (n, t)))
        .collect();
    let rows = first_error(
        cases
            .par_iter()
            .map(|&(n, temp)| {
                let bath = BathSpec::new(n, gamma0, FIGURE1_CUTOFF, temp)?;
                dectime_row(&bath, &qubit, &method, &opts)
            })
            .collect(),
    )?;
    let mut table = Table::new(&DECTIME_HEADER);
    table.comment(&format!(
        "dephaser figure1: decoherence times, gamma0 = {gamma0}, cutoff = {FIGURE1_CUTOFF}, quadrature gamma, t_probe_max = {}",
        opts.t_probe_max
    ));
    for row in rows {
        table.push(row);
    }
    Ok(table.render(precision))
}

/// Writes gamma0_<γ0>/{ohmic,supraohmic,dectime}.csv under `out_dir` for
/// both couplings and returns the paths in write order.
pub fn figure1(out_dir: &Path, precision: usize) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for gamma0 in FIGURE1_GAMMA0 {
        let dir = out_dir.join(format!("gamma0_{gamma0}"));
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let files = [
            ("ohmic.csv", figure1_curves(1, gamma0, precision)?),
            ("supraohmic.csv", figure1_curves(3, gamma0, precision)?),
            ("dectime.csv", figure1_dectime(gamma0, precision)?),
        ];
        for (name, contents) in files {
            let path = dir.join(name);
            write_file(&path, &contents)?;
            written.push(path);
        }
    }
    Ok(written)
}

fn closed_regime(bath: &BathSpec, method: &GammaMethod) -> Option<RegimeTag> {
    match method {
        GammaMethod::ClosedForm(r) => Some(*r),
        GammaMethod::Quadrature(_) => match classify_regime(bath, DEFAULT_HIGH_T_THRESHOLD).tag {
            RegimeTag::GeneralT => None,
            tag => Some(tag),
        },
    }
}

/// Geometric phase and its first-order correction over the config grid.
///
/// The residual uses the generic correction when it is computed and the
/// closed one otherwise; closed cells are empty where no closed form applies.
pub fn phase_csv(cfg: &RunConfig, route: PhaseRoute, delta: DeltaChoice) -> Result<String> {
    let tol = default_phase_tolerance();
    let wants_integral = route != PhaseRoute::Functional;
    let wants_functional = route != PhaseRoute::Integral;
    let wants_closed = delta != DeltaChoice::Generic;
    let wants_generic = delta != DeltaChoice::Closed;

    let mut header = vec!["theta0", "omega", "exponent", "gamma0", "cutoff", "temperature", "phi_unitary", "phi_exact"];
    if route == PhaseRoute::Both {
        header.extend(["phi_functional", "route_gap"]);
    }
    if wants_integral {
        header.extend(["phi_raw", "winding"]);
    }
    if wants_closed {
        header.push("delta_closed");
    }
    if wants_generic {
        header.push("delta_generic");
    }
    header.push("residual");

    let points = cfg.expand()?;
    let rows = first_error(
        points
            .par_iter()
            .map(|p| -> Result<Vec<Cell>> {
                let method = cfg.method.resolve(&p.bath)?;
                let profile = GammaProfile::prepare(&p.bath, &method, p.qubit.period(), tol)?;
                let integral = wants_integral
                    .then(|| phase_integral_with_profile(&p.qubit, &profile, tol))
                    .transpose()?;
                let functional = wants_functional
                    .then(|| phase_functional_with_profile(&p.qubit, &profile, tol))
                    .transpose()?;
                let closed = if wants_closed {
                    closed_regime(&p.bath, &method)
                        .map(|r| delta_phase_closed(&p.qubit, &p.bath, r))
                        .transpose()?
                } else {
                    None
                };
                let generic = wants_generic
                    .then(|| delta_phase_generic_with_profile(&p.qubit, &profile, tol))
                    .transpose()?;

                let phi_u = phase_unitary(&p.qubit);
                let phi_exact = match (&integral, &functional) {
                    (Some(i), _) => i.reduced,
                    (None, Some(f)) => f.value,
                    (None, None) => unreachable!("at least one route"),
                };
                let residual = generic.or(closed).map(|d| phase_difference(phi_exact, phi_u) + d);

                let mut row = vec![
                    Cell::Num(p.qubit.theta0()),
                    Cell::Num(p.qubit.omega()),
                    Cell::Int(p.bath.exponent() as i64),
                    Cell::Num(p.bath.gamma0()),
                    Cell::Num(p.bath.cutoff()),
                    Cell::Num(p.bath.temperature()),
                    Cell::Num(phi_u),
                    Cell::Num(phi_exact),
                ];
                if let (Some(i), Some(f)) = (&integral, &functional) {
                    row.push(Cell::Num(f.value));
                    row.push(Cell::Num(phase_difference(f.value, i.reduced)));
                }
                if let Some(i) = &integral {
                    row.push(Cell::Num(i.raw));
                    row.push(Cell::Int(i.winding));
                }
                if wants_closed {
                    row.push(Cell::opt(closed));
                }
                if wants_generic {
                    row.push(Cell::opt(generic));
                }
                row.push(Cell::opt(residual));
                Ok(row)
            })
            .collect(),
    )?;

    let route_name = match route {
        PhaseRoute::Integral => "integral",
        PhaseRoute::Functional => "functional",
        PhaseRoute::Both => "both",
    };
    let delta_name = match delta {
        DeltaChoice::Closed => "closed",
        DeltaChoice::Generic => "generic",
        DeltaChoice::Both => "both",
    };
    let mut table = Table::new(&header);
    echo(
        &mut table,
        "phase",
        &[("phase_method", route_name.into()), ("delta", delta_name.into())],
        cfg,
    );
    for row in rows {
        table.push(row);
    }
    Ok(table.render(cfg.output.precision))
}

/// Decoherence time verdicts over the config grid.
pub fn dectime_csv(cfg: &RunConfig, opts: &SolverOptions) -> Result<String> {
    let points = cfg.expand()?;
    let rows = first_error(
        points
            .par_iter()
            .map(|p| {
                let method = cfg.method.resolve(&p.bath)?;
                dectime_row(&p.bath, &p.qubit, &method, opts)
            })
            .collect(),
    )?;
    let mut table = Table::new(&DECTIME_HEADER);
    echo(&mut table, "dectime", &[("t_probe_max", opts.t_probe_max.to_string())], cfg);
    for row in rows {
        table.push(row);
    }
    Ok(table.render(cfg.output.precision))
}
