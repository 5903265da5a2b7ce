use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dephaser::acceptance;
use dephaser::commands::{self, with_jobs, DeltaChoice, PhaseRoute};
use dephaser::config::{parse_method, Axis, MethodChoice, RunConfig, DEFAULT_PRECISION};
use dephaser::table::write_file;
use dephaser_core::decoherence_time::SolverOptions;
use dephaser_core::environment::{BathSpec, QubitSpec, RegimeTag};
use dephaser_core::quadrature::Tolerance;
use dephaser_core::{Error, ErrorClass, Result};

#[derive(Parser)]
#[command(name = "dephaser", version, about = "Decoherence and geometric phase of a dephasing qubit")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "DEPHASER_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decoherence factor and visibility on a uniform time grid.
    Gamma {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Write the decoherence-factor comparison curves and decoherence times.
    Figure1 {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
    },
    /// Geometric phase and its first-order correction over the sweep grid.
    Phase {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        phase_method: RouteArg,
        #[arg(long, value_enum, default_value_t = DeltaArg::Both)]
        delta: DeltaArg,
    },
    /// Decoherence times, saturation and observability over the sweep grid.
    Dectime {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = SolverOptions::default().t_probe_max)]
        t_probe_max: f64,
    },
    /// Run the acceptance suite and print one line per criterion.
    Accept {
        /// Run only this criterion.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=acceptance::CRITERIA as i64))]
        criterion: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Integral,
    Functional,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaArg {
    Closed,
    Generic,
    Both,
}

#[derive(Args)]
struct Common {
    /// Config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    exponent: Option<u32>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long, value_enum)]
    gamma_method: Option<MethodArg>,
    /// Closed-form regime: zero_t or high_t (default: classified from the bath).
    #[arg(long)]
    regime: Option<String>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Sweep axis, e.g. theta0=0.1,0.2 (repeatable).
    #[arg(long = "grid", value_name = "AXIS=V1,V2,...")]
    grid: Vec<String>,
    #[arg(long)]
    grid_budget: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    precision: Option<usize>,
}

fn usage(reason: impl Into<String>) -> Error {
    Error::Config {
        line: 0,
        reason: reason.into(),
    }
}

fn parse_axis(spec: &str) -> Result<(Axis, Vec<f64>)> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| usage(format!("grid {spec:?} is not AXIS=V1,V2,...")))?;
    let axis = Axis::parse(name.trim()).ok_or_else(|| usage(format!("unknown grid axis {name:?}")))?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| usage(format!("grid value {v:?} is not a number"))))
        .collect::<Result<Vec<f64>>>()?;
    Ok((axis, values))
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let b = cfg.bath;
        cfg.bath = BathSpec::new(
            self.exponent.unwrap_or(b.exponent()),
            self.gamma0.unwrap_or(b.gamma0()),
            self.cutoff.unwrap_or(b.cutoff()),
            self.temperature.unwrap_or(b.temperature()),
        )?;
        cfg.qubit = QubitSpec::new(
            self.omega.unwrap_or(cfg.qubit.omega()),
            self.theta0.unwrap_or(cfg.qubit.theta0()),
        )?;

        match self.gamma_method {
            Some(MethodArg::Closed) => cfg.method = parse_method("closed", self.regime.as_deref())?,
            Some(MethodArg::Quadrature) => cfg.method = parse_method("quadrature", self.regime.as_deref())?,
            None => {
                if let Some(r) = &self.regime {
                    let tag = RegimeTag::parse(r).ok_or_else(|| usage(format!("unknown regime {r:?}")))?;
                    match &mut cfg.method {
                        MethodChoice::Closed(regime) => *regime = Some(tag),
                        MethodChoice::Quadrature(_) => {
                            return Err(usage("--regime needs --gamma-method closed"));
                        }
                    }
                }
            }
        }
        if self.abs_tol.is_some() || self.rel_tol.is_some() {
            match &mut cfg.method {
                MethodChoice::Quadrature(opts) => {
                    opts.tol = Tolerance::new(self.abs_tol.unwrap_or(opts.tol.abs), self.rel_tol.unwrap_or(opts.tol.rel))?;
                }
                MethodChoice::Closed(_) => return Err(usage("tolerances apply only to the quadrature method")),
            }
        }

        for spec in &self.grid {
            let (axis, values) = parse_axis(spec)?;
            cfg.set_axis(axis, values)?;
        }
        if let Some(budget) = self.grid_budget {
            cfg.grid_budget = budget;
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        if let Some(p) = self.precision {
            if p == 0 || p > 17 {
                return Err(usage(format!("precision {p} outside 1..=17")));
            }
            cfg.output.precision = p;
        }
        cfg.grid_size()?;
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, csv: &str) -> Result<()> {
    match &cfg.output.path {
        Some(path) => write_file(path, csv),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv.as_bytes()).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

/// Ok(false) when the acceptance suite ran but a criterion failed.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gamma { common, t_max, samples } => {
            let cfg = common.resolve()?;
            emit(&cfg, &commands::gamma_csv(&cfg, t_max, samples)?)?;
        }
        Command::Figure1 { out_dir, precision } => {
            if precision == 0 || precision > 17 {
                return Err(usage(format!("precision {precision} outside 1..=17")));
            }
            for path in commands::figure1(&out_dir, precision)? {
                println!("{}", path.display());
            }
        }
        Command::Phase {
            common,
            phase_method,
            delta,
        } => {
            let cfg = common.resolve()?;
            let route = match phase_method {
                RouteArg::Integral => PhaseRoute::Integral,
                RouteArg::Functional => PhaseRoute::Functional,
                RouteArg::Both => PhaseRoute::Both,
            };
            let delta = match delta {
                DeltaArg::Closed => DeltaChoice::Closed,
                DeltaArg::Generic => DeltaChoice::Generic,
                DeltaArg::Both => DeltaChoice::Both,
            };
            emit(&cfg, &commands::phase_csv(&cfg, route, delta)?)?;
        }
        Command::Dectime { common, t_probe_max } => {
            let cfg = common.resolve()?;
            let opts = SolverOptions::with_probe_max(t_probe_max)?;
            emit(&cfg, &commands::dectime_csv(&cfg, &opts)?)?;
        }
        Command::Accept { criterion } => {
            let ids: Vec<usize> = match criterion {
                Some(id) => vec![id as usize],
                None => (1..=acceptance::CRITERIA).collect(),
            };
            let mut all = true;
            for id in ids {
                let report = acceptance::run_criterion(id);
                println!("{report}");
                all &= report.passed;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 1,
        ErrorClass::Numerical => 2,
        ErrorClass::Io => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("dephaser: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match with_jobs(cli.jobs.map(|j| j as usize), || run(cli.command)).and_then(|r| r) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("dephaser: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
