//! Density-matrix simulation of the two-qubit ansatz circuit: a π pulse on
//! Q1, the exchange gate U_θ, and a virtual Z correction, under a cumulative
//! noise model.

pub mod ptm;

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ReferenceSolution;
use crate::pauli::{reconstruct, DensityMatrix, PauliVector};

pub use ptm::{
    amplitude_damping_channel, decay_probability, dephasing_channel, exchange_unitary,
    flux_averaged_ptm, gauss_hermite, ptm_of_unitary, rx, ry, rz, sigma_from_t2red, Ptm,
};

/// Cumulative error-model levels; each includes every source below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorLevel {
    Ideal,
    Dephasing,
    Relaxation,
    Residual,
    GateDephasing,
}

impl ErrorLevel {
    pub const ALL: [ErrorLevel; 5] = [
        ErrorLevel::Ideal,
        ErrorLevel::Dephasing,
        ErrorLevel::Relaxation,
        ErrorLevel::Residual,
        ErrorLevel::GateDephasing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorLevel::Ideal => "IDEAL",
            ErrorLevel::Dephasing => "DEPHASING",
            ErrorLevel::Relaxation => "RELAXATION",
            ErrorLevel::Residual => "RESIDUAL",
            ErrorLevel::GateDephasing => "GATE_DEPHASING",
        }
    }
}

impl std::fmt::Display for ErrorLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub t1_us: f64,
    pub t2_star_us: f64,
    pub p_residual: f64,
}

impl QubitParams {
    /// Pure dephasing time from 1/T2* = 1/Tφ + 1/(2T1); infinite when the
    /// Ramsey time is T1-limited.
    pub fn t_phi_us(&self) -> f64 {
        let rate = 1.0 / self.t2_star_us - 0.5 / self.t1_us;
        if rate <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / rate
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNoiseModel(format!("{name}: {msg}")));
        if !(self.t1_us > 0.0) || !self.t1_us.is_finite() {
            return bad(format!("t1_us must be positive, got {}", self.t1_us));
        }
        if !(self.t2_star_us > 0.0) || !self.t2_star_us.is_finite() {
            return bad(format!("t2_star_us must be positive, got {}", self.t2_star_us));
        }
        if 1.0 / self.t2_star_us < 0.5 / self.t1_us - 1e-9 {
            return bad(format!(
                "T2* = {} µs exceeds 2·T1 = {} µs",
                self.t2_star_us,
                2.0 * self.t1_us
            ));
        }
        if !(0.0..0.5).contains(&self.p_residual) {
            return bad(format!("p_residual must lie in [0, 0.5), got {}", self.p_residual));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub q0: QubitParams,
    pub q1: QubitParams,
    /// Reduced Ramsey time of Q0 while detuned for the exchange interaction.
    pub t2_star_red_us: f64,
    /// Exchange-gate duration, used when no coupling strength is given.
    pub t_int_us: f64,
    /// Exchange coupling J/2π in MHz. When set, the gate duration is
    /// proportional to the rotation angle instead of fixed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exchange_coupling_mhz: Option<f64>,
    pub level: ErrorLevel,
}

impl NoiseModel {
    /// Device parameters of the reference two-transmon experiment.
    pub fn device_default() -> Self {
        Self {
            q0: QubitParams {
                t1_us: 11.7,
                t2_star_us: 17.3,
                p_residual: 0.0025,
            },
            q1: QubitParams {
                t1_us: 9.8,
                t2_star_us: 9.0,
                p_residual: 0.0134,
            },
            t2_star_red_us: 0.995,
            t_int_us: 0.012,
            exchange_coupling_mhz: Some(20.9),
            level: ErrorLevel::GateDephasing,
        }
    }

    /// Noiseless model.
    pub fn ideal() -> Self {
        Self {
            level: ErrorLevel::Ideal,
            ..Self::device_default()
        }
    }

    pub fn with_level(&self, level: ErrorLevel) -> Self {
        Self {
            level,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.q0.validate("q0")?;
        self.q1.validate("q1")?;
        if !(self.t2_star_red_us > 0.0) || !self.t2_star_red_us.is_finite() {
            return Err(Error::InvalidNoiseModel(format!(
                "t2_star_red_us must be positive, got {}",
                self.t2_star_red_us
            )));
        }
        if !(self.t_int_us >= 0.0) || !self.t_int_us.is_finite() {
            return Err(Error::InvalidNoiseModel(format!(
                "t_int_us must be non-negative, got {}",
                self.t_int_us
            )));
        }
        if let Some(j) = self.exchange_coupling_mhz {
            if !(j > 0.0) || !j.is_finite() {
                return Err(Error::InvalidNoiseModel(format!(
                    "exchange_coupling_mhz must be positive, got {j}"
                )));
            }
        }
        Ok(())
    }

    /// Exchange-gate duration in µs for rotation angle `theta`. With a
    /// coupling J the gate runs for |θ'|/(2πJ), θ' being θ folded into
    /// (−π/2, π/2] (U_{θ+π} differs from U_θ by a ZZ factor).
    pub fn gate_duration(&self, theta: f64) -> f64 {
        match self.exchange_coupling_mhz {
            Some(j) => fold_angle(theta).abs() / (2.0 * PI * j),
            None => self.t_int_us,
        }
    }
}

fn fold_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r > FRAC_PI_2 {
        r - PI
    } else {
        r
    }
}

fn initial_vector(noise: &NoiseModel) -> PauliVector {
    let (p1, p0) = if noise.level >= ErrorLevel::Residual {
        (noise.q1.p_residual, noise.q0.p_residual)
    } else {
        (0.0, 0.0)
    };
    let (z1, z0) = (1.0 - 2.0 * p1, 1.0 - 2.0 * p0);
    let mut coeffs = vec![0.0; 16];
    coeffs[0] = 1.0;
    coeffs[3] = z0; // IZ
    coeffs[12] = z1; // ZI
    coeffs[15] = z1 * z0; // ZZ
    PauliVector::from_raw(2, coeffs)
}

/// Channel applied for t_int/2 on each side of the exchange gate.
fn half_gate_channel(noise: &NoiseModel, t_half: f64) -> Result<Ptm> {
    let mut q1 = Ptm::identity(1);
    let mut q0 = Ptm::identity(1);
    if noise.level >= ErrorLevel::Dephasing {
        q1 = dephasing_channel(decay_probability(t_half, noise.q1.t_phi_us()))?.after(&q1);
    }
    if noise.level >= ErrorLevel::Relaxation {
        q1 = amplitude_damping_channel(decay_probability(t_half, noise.q1.t1_us))?.after(&q1);
        q0 = amplitude_damping_channel(decay_probability(t_half, noise.q0.t1_us))?.after(&q0);
    }
    Ok(Ptm::kron(&q1, &q0))
}

/// Phase gate diag(1, i) on Q0, applied virtually after the circuit so that
/// the ideal output is cos θ|10⟩ − sin θ|01⟩, a real state.
fn virtual_s_on_q0() -> Ptm {
    let s = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 1.0),
        ],
    );
    Ptm::on_qubit(&ptm_of_unitary(&s).expect("S is unitary"), 0)
}

/// Full circuit as a single two-qubit PTM (excluding state preparation).
pub fn circuit_ptm(theta: f64, noise: &NoiseModel) -> Result<Ptm> {
    noise.validate()?;
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("theta must be finite, got {theta}")));
    }
    let x_pi = Ptm::on_qubit(&ptm_of_unitary(&rx(PI))?, 1);
    let t_int = noise.gate_duration(theta);
    let half = half_gate_channel(noise, 0.5 * t_int)?;
    let sigma = if noise.level >= ErrorLevel::GateDephasing {
        sigma_from_t2red(t_int, noise.t2_star_red_us)
    } else {
        0.0
    };
    let gate = flux_averaged_ptm(theta, sigma)?;
    Ok(virtual_s_on_q0()
        .after(&half)
        .after(&gate)
        .after(&half)
        .after(&x_pi))
}

/// Output Pauli vector of the ansatz circuit.
pub fn prepare_ansatz_vector(theta: f64, noise: &NoiseModel) -> Result<PauliVector> {
    Ok(circuit_ptm(theta, noise)?.apply(&initial_vector(noise)))
}

/// Output density matrix of the ansatz circuit.
pub fn prepare_ansatz(theta: f64, noise: &NoiseModel) -> Result<DensityMatrix> {
    Ok(reconstruct(&prepare_ansatz_vector(theta, noise)?))
}

/// Noiseless ansatz state cos θ|10⟩ − sin θ|01⟩ as a Pauli vector.
pub fn ideal_ansatz_vector(theta: f64) -> PauliVector {
    let (s2, c2) = (2.0 * theta).sin_cos();
    let mut coeffs = vec![0.0; 16];
    coeffs[0] = 1.0;
    coeffs[3] = c2; // IZ
    coeffs[5] = -s2; // XX
    coeffs[10] = -s2; // YY
    coeffs[12] = -c2; // ZI
    coeffs[15] = -1.0; // ZZ
    PauliVector::from_raw(2, coeffs)
}

const PHASE_GRID: usize = 72;
const PHASE_GAIN_TOL: f64 = 1e-13;

fn z_phase_diag(a1: f64, a0: f64) -> [Complex64; 4] {
    // Rz(a1) ⊗ Rz(a0) up to a global phase
    [
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, a0),
        Complex64::from_polar(1.0, a1),
        Complex64::from_polar(1.0, a1 + a0),
    ]
}

fn rotated_fidelity(rho: &DMatrix<Complex64>, target: &DMatrix<Complex64>, a1: f64, a0: f64) -> f64 {
    let d = z_phase_diag(a1, a0);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..4 {
        for k in 0..4 {
            acc += d[j] * rho[(j, k)] * d[k].conj() * target[(k, j)];
        }
    }
    acc.re
}

/// Z rotation angles (Q1, Q0) maximizing the fidelity of `rho` with the
/// reference ground state, together with that fidelity. Returns (0, 0) when
/// no rotation improves on the input.
pub fn optimal_phase_angles(rho: &DensityMatrix, reference: &ReferenceSolution) -> Result<(f64, f64, f64)> {
    if rho.n_qubits() != 2 || reference.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: if rho.n_qubits() != 2 { rho.n_qubits() } else { reference.n_qubits() },
        });
    }
    let target = reference.ground_state();
    let (m, t) = (rho.matrix(), target.matrix());
    let f = |a1: f64, a0: f64| rotated_fidelity(m, t, a1, a0);
    let base = f(0.0, 0.0);
    let step = 2.0 * PI / PHASE_GRID as f64;
    let mut best = (0.0, 0.0, base);
    for i in 0..PHASE_GRID {
        for j in 0..PHASE_GRID {
            let (a1, a0) = (i as f64 * step, j as f64 * step);
            let v = f(a1, a0);
            if v > best.2 {
                best = (a1, a0, v);
            }
        }
    }
    // compass search refinement
    let mut h = step;
    while h > 1e-12 {
        let mut moved = false;
        for (d1, d0) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let v = f(best.0 + d1, best.1 + d0);
            if v > best.2 {
                best = (best.0 + d1, best.1 + d0, v);
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    if best.2 <= base + PHASE_GAIN_TOL {
        return Ok((0.0, 0.0, base));
    }
    Ok((best.0.rem_euclid(2.0 * PI), best.1.rem_euclid(2.0 * PI), best.2))
}

/// Apply the fidelity-maximizing virtual Z rotations to `rho`.
pub fn virtual_phase_correction(rho: &DensityMatrix, reference: &ReferenceSolution) -> Result<DensityMatrix> {
    let (a1, a0, _) = optimal_phase_angles(rho, reference)?;
    if a1 == 0.0 && a0 == 0.0 {
        return Ok(rho.clone());
    }
    let d = z_phase_diag(a1, a0);
    let m = rho.matrix();
    let out = DMatrix::from_fn(4, 4, |j, k| d[j] * m[(j, k)] * d[k].conj());
    Ok(DensityMatrix::from_hermitian_unchecked(out))
}
