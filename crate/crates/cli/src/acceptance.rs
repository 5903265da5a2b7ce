//! The eleven acceptance criteria, each returning a pass/fail report.

use std::f64::consts::PI;
use std::fmt;

use dephaser_core::decoherence_factor::{gamma, gamma_quadrature, GammaMethod, QuadratureOptions};
use dephaser_core::decoherence_time::{solve_decoherence_time, Outcome, SolverOptions};
use dephaser_core::environment::{BathSpec, QubitSpec, RegimeTag};
use dephaser_core::geometric_phase::{
    default_phase_tolerance, delta_phase_closed, delta_phase_generic, phase_difference, phase_exact_integral,
    phase_functional_with_profile, phase_integral_with_profile, phase_result, phase_unitary, DeltaRoute,
    GammaProfile,
};
use dephaser_core::qubit_dynamics::{eigensystem, master_equation_residual, ReducedDensityMatrix};
use dephaser_core::Result;
use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{figure1, with_jobs};
use crate::config::DEFAULT_PRECISION;

pub const CRITERIA: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {status}  {}: {}", self.id, self.title, self.detail)
    }
}

fn title(id: usize) -> &'static str {
    match id {
        1 => "ohmic zero-temperature closed form",
        2 => "ohmic high-temperature slope",
        3 => "supraohmic saturation",
        4 => "unitary limit",
        5 => "perturbative closed forms",
        6 => "second-order residual",
        7 => "route equivalence",
        8 => "decoherence times",
        9 => "eigen and dynamics properties",
        10 => "master-equation residual order",
        11 => "figure determinism",
        _ => "unknown criterion",
    }
}

/// Runs criterion `id` (1..=11). Numerical errors count as failures.
pub fn run_criterion(id: usize) -> CriterionReport {
    let outcome = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport {
        id,
        title: title(id),
        passed,
        detail,
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=CRITERIA).map(run_criterion).collect()
}

type Check = Result<(bool, String)>;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Check {
    let bath = BathSpec::ohmic(0.3, 100.0, 0.0)?;
    let opts = QuadratureOptions::with_tolerance(1e-15, 1e-10)?;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let t = 1e-4 * 10f64.powf(5.0 * k as f64 / 49.0);
        let oracle = 0.15 * (1e4 * t * t).ln_1p();
        worst = worst.max(rel(gamma_quadrature(&bath, t, &opts)?.value, oracle));
    }
    Ok((worst <= 1e-6, format!("max relative error {worst:.2e} over 50 times (limit 1e-6)")))
}

fn criterion_2() -> Check {
    let bath = BathSpec::ohmic(0.3, 100.0, 1000.0)?;
    let opts = QuadratureOptions::default();
    let n = 21;
    let mut pts = Vec::with_capacity(n);
    for k in 0..n {
        let t = 0.5 + 0.5 * k as f64 / (n - 1) as f64;
        pts.push((t, gamma_quadrature(&bath, t, &opts)?.value));
    }
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let mean_g = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|(t, g)| (t - mean_t) * (g - mean_g)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mean_t).powi(2)).sum();
    let slope = sxy / sxx;
    let expected = PI * 0.3 * 1000.0;
    let err = rel(slope, expected);
    Ok((err <= 0.05, format!("slope {slope:.2} vs {expected:.2}, relative deviation {err:.4} (limit 0.05)")))
}

fn criterion_3() -> Check {
    let quad = GammaMethod::quadrature();
    let opts = SolverOptions::default();
    let cold = BathSpec::supraohmic(0.3, 100.0, 0.0)?;
    let g_cold = gamma(&cold, &quad, 10.0)?.value;
    let cold_ok = (g_cold - 0.3).abs() <= 1e-3;
    let cold_verdict = solve_decoherence_time(&cold, &quad, &opts)?;

    let hot = BathSpec::supraohmic(0.03, 100.0, 1000.0)?;
    let hot_verdict = solve_decoherence_time(&hot, &quad, &opts)?;
    let (hot_ok, hot_plateau) = match hot_verdict.outcome {
        Outcome::Saturates { plateau, .. } => (rel(plateau, 0.6) <= 0.01, plateau),
        _ => (false, f64::NAN),
    };
    let cold_saturates = matches!(cold_verdict.outcome, Outcome::Saturates { .. });
    Ok((
        cold_ok && cold_saturates && hot_ok,
        format!(
            "cold gamma(t=10) = {g_cold:.7} [{}], cold verdict {}, hot plateau {hot_plateau:.6} vs 0.6 [{}]",
            if cold_ok { "ok" } else { "off" },
            cold_verdict.outcome.label(),
            hot_verdict.outcome.label()
        ),
    ))
}

fn criterion_4() -> Check {
    let free = BathSpec::ohmic(0.0, 100.0, 0.0)?;
    let method = GammaMethod::quadrature();
    let tol = default_phase_tolerance();
    let mut worst: f64 = 0.0;
    for theta0 in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let qubit = QubitSpec::new(1.0, theta0)?;
        let p = phase_exact_integral(&qubit, &free, &method, tol)?;
        worst = worst.max(phase_difference(p.reduced, phase_unitary(&qubit)).abs());
    }
    Ok((worst <= 1e-9, format!("max |phi - pi(1 - cos theta0)| = {worst:.2e} (limit 1e-9)")))
}

fn criterion_5() -> Check {
    let qubit = QubitSpec::new(1.0, PI / 4.0)?;
    let tol = default_phase_tolerance();
    let g0 = 0.01;
    let cases = [
        ("ohmic high T", BathSpec::ohmic(g0, 100.0, 10.0 / PI)?, RegimeTag::HighT, 1e-10, Some(0.34899)),
        ("ohmic zero T", BathSpec::ohmic(g0, 100.0, 0.0)?, RegimeTag::ZeroT, 0.01, Some(0.060449)),
        ("supraohmic high T", BathSpec::supraohmic(g0, 100.0, 1000.0)?, RegimeTag::HighT, 0.01, None),
        ("supraohmic zero T", BathSpec::supraohmic(g0, 100.0, 0.0)?, RegimeTag::ZeroT, 0.01, Some(0.011107)),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, bath, regime, limit, spot) in cases {
        let generic = delta_phase_generic(&qubit, &bath, &GammaMethod::ClosedForm(regime), tol)?;
        let closed = delta_phase_closed(&qubit, &bath, regime)?;
        let dev = rel(generic, closed);
        passed &= dev <= limit;
        let mut part = format!("{name}: generic {generic:.6} closed {closed:.6} dev {dev:.1e}");
        if let Some(spot) = spot {
            let spot_dev = rel(closed, spot);
            passed &= spot_dev <= 0.01;
            part.push_str(&format!(" (reference {spot}, dev {spot_dev:.1e})"));
        }
        parts.push(part);
    }
    Ok((passed, parts.join("; ")))
}

fn residual_ratio(bath: &BathSpec, method: &GammaMethod, regime: RegimeTag) -> Result<(f64, f64, f64)> {
    let qubit = QubitSpec::new(1.0, PI / 4.0)?;
    let tol = default_phase_tolerance();
    let r = |g0: f64| -> Result<f64> {
        let b = bath.with_gamma0(g0)?;
        Ok(phase_result(&qubit, &b, method, DeltaRoute::Closed(regime), tol)?.residual.abs())
    };
    let r1 = r(0.01)?;
    let r2 = r(0.02)?;
    Ok((r1, r2, r2 / r1))
}

fn criterion_6() -> Check {
    let hot = BathSpec::ohmic(0.01, 100.0, 10.0 / PI)?;
    let (a1, a2, ra) = residual_ratio(&hot, &GammaMethod::ClosedForm(RegimeTag::HighT), RegimeTag::HighT)?;
    let cold = BathSpec::supraohmic(0.01, 100.0, 0.0)?;
    let (b1, b2, rb) = residual_ratio(&cold, &GammaMethod::quadrature(), RegimeTag::ZeroT)?;
    let ok = |r: f64| (3.2..=4.8).contains(&r);
    Ok((
        ok(ra) && ok(rb),
        format!(
            "ohmic high T: R = {a1:.3e}, {a2:.3e}, ratio {ra:.3}; supraohmic zero T: R = {b1:.3e}, {b2:.3e}, ratio {rb:.3} (limit 4 +- 20%)"
        ),
    ))
}

fn criterion_7() -> Check {
    let tol = default_phase_tolerance();
    let method = GammaMethod::quadrature();
    let mut worst: f64 = 0.0;
    for temp in [0.0, 1.55, 1000.0] {
        let bath = BathSpec::ohmic(0.05, 100.0, temp)?;
        let profile = GammaProfile::prepare(&bath, &method, 2.0 * PI, tol)?;
        for theta0 in [PI / 6.0, PI / 4.0, PI / 3.0, 2.0 * PI / 3.0] {
            let qubit = QubitSpec::new(1.0, theta0)?;
            let a = phase_integral_with_profile(&qubit, &profile, tol)?;
            let b = phase_functional_with_profile(&qubit, &profile, tol)?;
            worst = worst.max(phase_difference(a.reduced, b.value).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max route gap {worst:.2e} over 12 cases (limit 1e-8)")))
}

fn criterion_8() -> Check {
    let opts = SolverOptions::default();
    let hot = BathSpec::ohmic(0.3, 100.0, 1000.0)?;
    let v_hot = solve_decoherence_time(&hot, &GammaMethod::ClosedForm(RegimeTag::HighT), &opts)?;
    let expected_hot = 1.0 / (PI * 300.0);
    let hot_dev = v_hot.outcome.time().map_or(f64::INFINITY, |t| rel(t, expected_hot));

    let cold = BathSpec::ohmic(0.3, 100.0, 0.0)?;
    let v_cold = solve_decoherence_time(&cold, &GammaMethod::quadrature(), &opts)?;
    let formula = (1.0f64 / 0.3).exp() / 100.0;
    let cold_dev = v_cold.outcome.time().map_or(f64::INFINITY, |t| rel(t, formula));

    let supra = BathSpec::supraohmic(0.3, 100.0, 0.0)?;
    let v_supra = solve_decoherence_time(&supra, &GammaMethod::quadrature(), &opts)?;
    let saturates = matches!(v_supra.outcome, Outcome::Saturates { .. });

    Ok((
        hot_dev <= 1e-6 && cold_dev <= 0.02 && saturates,
        format!(
            "ohmic high T t_d = {:.10e} (dev {hot_dev:.1e}); ohmic zero T t_d = {:.6} vs {formula:.6} (dev {cold_dev:.2e}); supraohmic zero T {}",
            v_hot.outcome.time().unwrap_or(f64::NAN),
            v_cold.outcome.time().unwrap_or(f64::NAN),
            v_supra.outcome.label()
        ),
    ))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let cases = 1000;
    let mut failures = Vec::new();
    let mut worst_eig: f64 = 0.0;
    let mut worst_vec: f64 = 0.0;
    for case in 0..cases {
        let theta0 = rng.gen_range(0.0..=PI);
        let omega = rng.gen_range(0.1..10.0);
        let t = rng.gen_range(0.0..10.0);
        let mut ga = rng.gen_range(0.0..8.0);
        let mut gb = rng.gen_range(0.0..8.0);
        if ga > gb {
            std::mem::swap(&mut ga, &mut gb);
        }
        let qubit = QubitSpec::new(omega, theta0)?;
        let rho_a = ReducedDensityMatrix::from_gamma(&qubit, t, ga);
        let rho_b = ReducedDensityMatrix::from_gamma(&qubit, t, gb);

        if rho_a.trace() != 1.0 || rho_b.trace() != 1.0 {
            failures.push(format!("case {case}: trace"));
        }
        if rho_b.purity() > rho_a.purity() {
            failures.push(format!("case {case}: purity increased"));
        }
        let [x, y, z] = rho_b.bloch_vector();
        if (x * x + y * y + z * z).sqrt() > 1.0 + 2.0 * f64::EPSILON {
            failures.push(format!("case {case}: bloch norm"));
        }

        let ours = eigensystem(&rho_b, &qubit, gb);
        let m = rho_b.matrix();
        let reference = SymmetricEigen::new(Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]));
        let (imax, imin) = if reference.eigenvalues[0] >= reference.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let eig_err = (ours.eps_plus - reference.eigenvalues[imax])
            .abs()
            .max((ours.eps_minus - reference.eigenvalues[imin]).abs());
        worst_eig = worst_eig.max(eig_err);
        if reference.eigenvalues[imax] - reference.eigenvalues[imin] > 1e-6 {
            let v = reference.eigenvectors.column(imax);
            let w = ours.dominant_eigenvector();
            let overlap: Complex64 = w[0].conj() * v[0] + w[1].conj() * v[1];
            worst_vec = worst_vec.max(1.0 - overlap.norm());
        }
    }
    if worst_eig > 1e-12 {
        failures.push(format!("eigenvalue error {worst_eig:.1e}"));
    }
    if worst_vec > 1e-12 {
        failures.push(format!("eigenvector overlap defect {worst_vec:.1e}"));
    }
    let detail = format!(
        "{cases} random cases; max eigenvalue error {worst_eig:.1e}, max eigenvector defect {worst_vec:.1e}; {} violations{}",
        failures.len(),
        failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    Ok((failures.is_empty(), detail))
}

fn criterion_10() -> Check {
    let qubit = QubitSpec::new(1.0, PI / 2.0)?;
    let bath = BathSpec::ohmic(0.05, 100.0, 1000.0)?;
    let method = GammaMethod::ClosedForm(RegimeTag::HighT);
    let t = 5e-3;
    let r1 = master_equation_residual(&qubit, &bath, &method, t, 2e-4)?;
    let r2 = master_equation_residual(&qubit, &bath, &method, t, 1e-4)?;
    let ratio = r1 / r2;
    Ok((
        (3.6..=4.4).contains(&ratio),
        format!("residual {r1:.3e} -> {r2:.3e} on halving dt, ratio {ratio:.4} (limit 4 +- 10%)"),
    ))
}

fn read_tree(paths: &[std::path::PathBuf], root: &std::path::Path) -> Result<Vec<(String, Vec<u8>)>> {
    paths
        .iter()
        .map(|p| {
            let bytes = std::fs::read(p).map_err(|source| dephaser_core::Error::Io {
                path: p.clone(),
                source,
            })?;
            let name = p.strip_prefix(root).unwrap_or(p).display().to_string();
            Ok((name, bytes))
        })
        .collect()
}

fn criterion_11() -> Check {
    let scratch = tempfile::tempdir().map_err(|source| dephaser_core::Error::Io {
        path: std::env::temp_dir(),
        source,
    })?;
    let mut runs = Vec::new();
    for (label, jobs) in [("jobs1_a", 1), ("jobs1_b", 1), ("jobs4", 4)] {
        let dir = scratch.path().join(label);
        let files = with_jobs(Some(jobs), || figure1(&dir, DEFAULT_PRECISION))??;
        runs.push((label, read_tree(&files, &dir)?));
    }
    let reference = &runs[0].1;
    let mismatches: Vec<&str> = runs[1..]
        .iter()
        .filter(|(_, tree)| tree != reference)
        .map(|(label, _)| *label)
        .collect();
    let bytes: usize = reference.iter().map(|(_, b)| b.len()).sum();
    Ok((
        mismatches.is_empty() && reference.len() == 6,
        format!(
            "{} files, {bytes} bytes per run; runs differing from jobs=1: {}",
            reference.len(),
            if mismatches.is_empty() { "none".to_string() } else { mismatches.join(", ") }
        ),
    ))
}
