//! Reduced density matrix of the dephasing qubit and its eigendecomposition.
//!
//! Basis order is (|e⟩, |g⟩). Populations never move; the coherence is
//! ρ_eg(t) = ½ sin θ0 · e^{iΩt − Γ(t)}.

use num_complex::Complex64;

use crate::decoherence_factor::{diffusion, gamma, GammaMethod};
use crate::environment::{BathSpec, QubitSpec};
use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    pub pop_e: f64,
    pub pop_g: f64,
    /// ρ_eg; ρ_ge is its conjugate.
    pub coherence: Complex64,
}

/// Splits 1 into (cos²(θ/2), sin²(θ/2)) so that the two add to exactly 1.
fn populations(theta0: f64) -> (f64, f64) {
    let c = theta0.cos();
    let major = 0.5 * (1.0 + c.abs());
    let minor = 1.0 - major;
    if c >= 0.0 {
        (major, minor)
    } else {
        (minor, major)
    }
}

impl ReducedDensityMatrix {
    /// State at time `t` given the decoherence factor Γ(t).
    pub fn from_gamma(qubit: &QubitSpec, t: f64, gamma: f64) -> Self {
        let (pop_e, pop_g) = populations(qubit.theta0());
        let modulus = 0.5 * qubit.theta0().sin() * (-gamma).exp();
        ReducedDensityMatrix {
            pop_e,
            pop_g,
            coherence: Complex64::from_polar(modulus, qubit.omega() * t),
        }
    }

    pub fn matrix(&self) -> Matrix2 {
        [
            [Complex64::new(self.pop_e, 0.0), self.coherence],
            [self.coherence.conj(), Complex64::new(self.pop_g, 0.0)],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.pop_e + self.pop_g
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        self.pop_e * self.pop_e + self.pop_g * self.pop_g + 2.0 * self.coherence.norm_sqr()
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        bloch_vector(self)
    }
}

/// (x, y, z) = (2 Re ρ_eg, 2 Im ρ_eg, ρ_ee − ρ_gg).
pub fn bloch_vector(rho: &ReducedDensityMatrix) -> [f64; 3] {
    [
        2.0 * rho.coherence.re,
        2.0 * rho.coherence.im,
        rho.pop_e - rho.pop_g,
    ]
}

pub fn evolve(
    qubit: &QubitSpec,
    bath: &BathSpec,
    method: &GammaMethod,
    t: f64,
) -> Result<ReducedDensityMatrix> {
    let g = gamma(bath, method, t)?;
    Ok(ReducedDensityMatrix::from_gamma(qubit, t, g.value))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// Bloch polar angle of the dominant eigenvector, measured so that its
    /// |e⟩ weight is sin²(θ_t/2).
    pub theta_t: f64,
    /// Unit phase carried on the |e⟩ amplitude of the dominant eigenvector,
    /// equal to the phase of ρ_eg (e^{iΩt}).
    pub phase_factor: Complex64,
}

impl EigenSystem {
    /// sin²(θ_t/2), the |e⟩ weight of the dominant eigenvector.
    pub fn excited_weight(&self) -> f64 {
        let s = (0.5 * self.theta_t).sin();
        s * s
    }

    /// Dominant eigenvector (amplitudes on |e⟩, |g⟩).
    pub fn dominant_eigenvector(&self) -> [Complex64; 2] {
        let half = 0.5 * self.theta_t;
        [self.phase_factor * half.sin(), Complex64::new(half.cos(), 0.0)]
    }
}

/// ε± = ½ ± ½ √(cos²θ0 + e^{−2Γ} sin²θ0) and the dominant eigenvector.
///
/// The eigenvector angle obeys tan(θ_t/2) = (R + cos θ0)/(e^{−Γ} sin θ0)
/// with R = √(cos²θ0 + e^{−2Γ} sin²θ0); at Γ = 0 this is cot(θ0/2).
pub fn eigensystem(rho: &ReducedDensityMatrix, qubit: &QubitSpec, gamma: f64) -> EigenSystem {
    let (s, c) = qubit.theta0().sin_cos();
    let damping = (-gamma).exp();
    let sd = s * damping;
    let r = c.hypot(sd);
    let eps_plus = 0.5 * (1.0 + r);
    // det ρ = ¼ sin²θ0 (1 − e^{−2Γ}); dividing avoids cancellation in ½ − R/2
    let det = 0.25 * s * s * -(-2.0 * gamma).exp_m1();
    let eps_minus = det / eps_plus;

    // both branches are the same angle; pick the cancellation-free one
    let half = if c >= 0.0 {
        (r + c).atan2(sd)
    } else {
        sd.atan2(r - c)
    };

    let phase_factor = if rho.coherence.norm() > 0.0 {
        rho.coherence / rho.coherence.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    EigenSystem {
        eps_plus,
        eps_minus,
        theta_t: 2.0 * half,
        phase_factor,
    }
}

fn sigma_z_commutator(m: &Matrix2) -> Matrix2 {
    // [σz, M] with σz = diag(1, −1)
    let zero = Complex64::new(0.0, 0.0);
    [[zero, 2.0 * m[0][1]], [-2.0 * m[1][0], zero]]
}

/// Generator of the pure-dephasing master equation,
/// i(Ω/2)[σz, ρ] − D(t)[σz, [σz, ρ]].
///
/// The sign of the coherent term matches ρ_eg ∝ e^{+iΩt}.
pub fn master_equation_rhs(rho: &ReducedDensityMatrix, omega: f64, diffusion: f64) -> Matrix2 {
    let m = rho.matrix();
    let c1 = sigma_z_commutator(&m);
    let c2 = sigma_z_commutator(&c1);
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = Complex64::new(0.0, 0.5 * omega) * c1[i][j] - diffusion * c2[i][j];
        }
    }
    out
}

/// Largest entry of |ρ̇ − L(ρ)| with ρ̇ from a central difference of step `dt`.
/// The result is O(dt²).
pub fn master_equation_residual(
    qubit: &QubitSpec,
    bath: &BathSpec,
    method: &GammaMethod,
    t: f64,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", format!("{dt} (must be > 0)")));
    }
    if !(t > dt) {
        return Err(Error::invalid("t", format!("{t} (must exceed dt = {dt})")));
    }
    let fwd = evolve(qubit, bath, method, t + dt)?.matrix();
    let bwd = evolve(qubit, bath, method, t - dt)?.matrix();
    let rho = evolve(qubit, bath, method, t)?;
    let rhs = master_equation_rhs(&rho, qubit.omega(), diffusion(bath, method, t)?);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let deriv = (fwd[i][j] - bwd[i][j]) / (2.0 * dt);
            worst = worst.max((deriv - rhs[i][j]).norm());
        }
    }
    Ok(worst)
}
