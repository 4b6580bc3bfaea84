//! Simulated two-qubit readout and linear-inversion state tomography.
//!
//! Each shot yields one bit per qubit. Three channels are averaged per
//! pre-rotation: the digitized Q1 bit, the digitized Q0 bit, and their
//! product. The expected value of channel `i` is `Tr[M_i ρ]` with
//! `M_i = β_II II + β_IZ IZ + β_ZI ZI + β_ZZ ZZ`.

use std::io::{Read, Write};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{pauli_traces, DensityMatrix, PauliVector};
use crate::simulator::{rx, ry, ErrorLevel, NoiseModel};

/// Number of pre-rotation pairs.
pub const N_PREROTATIONS: usize = 36;
/// Calibration shots per computational state, as a multiple of `n_meas`.
pub const CALIBRATION_SHOT_FACTOR: u64 = 7;
const SINGULAR_CONDITION: f64 = 1e10;
const RANK_TOL: f64 = 1e-10;
const VARIANCE_FLOOR: f64 = 1e-6;

/// Readout coefficients of one channel on {II, IZ, ZI, ZZ}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelBetas {
    #[serde(rename = "II")]
    pub ii: f64,
    #[serde(rename = "IZ")]
    pub iz: f64,
    #[serde(rename = "ZI")]
    pub zi: f64,
    #[serde(rename = "ZZ")]
    pub zz: f64,
}

impl ChannelBetas {
    fn from_array(b: [f64; 4]) -> Self {
        Self {
            ii: b[0],
            iz: b[1],
            zi: b[2],
            zz: b[3],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.ii, self.iz, self.zi, self.zz]
    }

    /// Channel value for the joint outcome with digitized values `s1`, `s0`.
    fn value(&self, s1: f64, s0: f64) -> f64 {
        self.ii + self.iz * s0 + self.zi * s1 + self.zz * s1 * s0
    }

    /// Diagonal of the channel operator in the computational basis.
    fn diagonal(&self) -> [f64; 4] {
        let mut d = [0.0; 4];
        for (k, slot) in d.iter_mut().enumerate() {
            let (s1, s0) = digitize(k);
            *slot = self.value(s1, s0);
        }
        d
    }
}

/// Digitized (Q1, Q0) values of basis index `k = 2·b1 + b0`: bit 0 → +1, bit 1 → −1.
fn digitize(k: usize) -> (f64, f64) {
    let s = |b: usize| if b == 0 { 1.0 } else { -1.0 };
    (s((k >> 1) & 1), s(k & 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementModel {
    pub q1: ChannelBetas,
    pub q0: ChannelBetas,
    pub corr: ChannelBetas,
}

impl MeasurementModel {
    /// Perfect ±1 digitization of each channel.
    pub fn ideal() -> Self {
        Self {
            q1: ChannelBetas::from_array([0.0, 0.0, 1.0, 0.0]),
            q0: ChannelBetas::from_array([0.0, 1.0, 0.0, 0.0]),
            corr: ChannelBetas::from_array([0.0, 0.0, 0.0, 1.0]),
        }
    }

    pub fn channels(&self) -> [&ChannelBetas; 3] {
        [&self.q1, &self.q0, &self.corr]
    }
}

/// How calibration treats residual excitation of the prepared basis states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualHandling {
    /// Fit against the actual (residually excited) prepared states, so the
    /// betas describe the detector alone.
    #[default]
    Corrected,
    /// Fit against nominal basis states; residual excitation is absorbed
    /// into the betas.
    Uncorrected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyRecord {
    pub prerotation_index: usize,
    pub m_q1: f64,
    pub m_q0: f64,
    pub m_corr: f64,
    /// Shots per pre-rotation; 0 denotes the exact expectation value.
    pub n_meas: u64,
}

impl TomographyRecord {
    fn channel(&self, c: usize) -> f64 {
        [self.m_q1, self.m_q0, self.m_corr][c]
    }

    fn shots(&self) -> Option<u64> {
        (self.n_meas > 0).then_some(self.n_meas)
    }
}

pub fn write_records<W: Write>(writer: W, records: &[TomographyRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<TomographyRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// The six single-qubit pre-rotations: I, Xπ, Xπ/2, Yπ/2, X−π/2, Y−π/2.
pub fn single_qubit_prerotations() -> [DMatrix<Complex64>; 6] {
    use std::f64::consts::{FRAC_PI_2, PI};
    [
        DMatrix::identity(2, 2),
        rx(PI),
        rx(FRAC_PI_2),
        ry(FRAC_PI_2),
        rx(-FRAC_PI_2),
        ry(-FRAC_PI_2),
    ]
}

/// All 36 pairs as two-qubit unitaries `R_{Q1} ⊗ R_{Q0}`; index `6·i1 + i0`.
pub fn prerotation_set() -> Vec<DMatrix<Complex64>> {
    let singles = single_qubit_prerotations();
    let mut out = Vec::with_capacity(N_PREROTATIONS);
    for r1 in &singles {
        for r0 in &singles {
            out.push(r1.kronecker(r0));
        }
    }
    out
}

fn cached_prerotations() -> &'static [DMatrix<Complex64>] {
    static SET: OnceLock<Vec<DMatrix<Complex64>>> = OnceLock::new();
    SET.get_or_init(prerotation_set)
}

/// Computational-basis outcome probabilities after pre-rotation `k`.
fn outcome_probabilities(rho: &DMatrix<Complex64>, k: usize) -> [f64; 4] {
    let r = &cached_prerotations()[k];
    let rotated = r * rho * r.adjoint();
    let mut p = [0.0; 4];
    for (i, slot) in p.iter_mut().enumerate() {
        *slot = rotated[(i, i)].re.max(0.0);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Multinomial counts over four outcomes via sequential binomials.
fn sample_counts<R: Rng + ?Sized>(rng: &mut R, probs: &[f64; 4], n: u64) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut remaining = n;
    let mut mass = 1.0;
    for i in 0..3 {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 { (probs[i] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = Binomial::new(remaining, q).expect("valid binomial").sample(rng);
        counts[i] = c;
        remaining -= c;
        mass -= probs[i];
    }
    counts[3] = remaining;
    counts
}

fn channel_averages(
    model: &MeasurementModel,
    probs: &[f64; 4],
    counts: Option<&[u64; 4]>,
) -> [f64; 3] {
    let mut m = [0.0; 3];
    for (c, betas) in model.channels().iter().enumerate() {
        let d = betas.diagonal();
        m[c] = match counts {
            Some(counts) => {
                let n: u64 = counts.iter().sum();
                (0..4).map(|k| counts[k] as f64 * d[k]).sum::<f64>() / n as f64
            }
            None => (0..4).map(|k| probs[k] * d[k]).sum(),
        };
    }
    m
}

/// Simulate the 36 pre-rotated measurements of `rho` with readout
/// operators `detector`. `n_meas = None` returns exact expectation values.
pub fn measure_state(
    rho: &DensityMatrix,
    detector: &MeasurementModel,
    n_meas: Option<u64>,
    seed: u64,
) -> Result<Vec<TomographyRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    measure_state_with(rho, detector, n_meas, &mut rng)
}

pub fn measure_state_with<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    detector: &MeasurementModel,
    n_meas: Option<u64>,
    rng: &mut R,
) -> Result<Vec<TomographyRecord>> {
    if rho.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.n_qubits(),
        });
    }
    if n_meas == Some(0) {
        return Err(Error::InvalidArgument("n_meas must be positive".into()));
    }
    let mut out = Vec::with_capacity(N_PREROTATIONS);
    for k in 0..N_PREROTATIONS {
        let probs = outcome_probabilities(rho.matrix(), k);
        let counts = n_meas.map(|n| sample_counts(rng, &probs, n));
        let m = channel_averages(detector, &probs, counts.as_ref());
        out.push(TomographyRecord {
            prerotation_index: k,
            m_q1: m[0],
            m_q0: m[1],
            m_corr: m[2],
            n_meas: n_meas.unwrap_or(0),
        });
    }
    Ok(out)
}

/// Fit the readout betas from the four computational basis states, each
/// measured `7·n_meas` times (exactly when `n_meas` is `None`). Readout is
/// ideal; state preparation carries residual excitation when the noise
/// level includes it.
pub fn calibrate_betas(noise: &NoiseModel, n_meas: Option<u64>, seed: u64) -> Result<MeasurementModel> {
    calibrate_betas_with(noise, n_meas, seed, ResidualHandling::default())
}

pub fn calibrate_betas_with(
    noise: &NoiseModel,
    n_meas: Option<u64>,
    seed: u64,
    handling: ResidualHandling,
) -> Result<MeasurementModel> {
    noise.validate()?;
    if n_meas == Some(0) {
        return Err(Error::InvalidArgument("n_meas must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p1, p0) = if noise.level >= ErrorLevel::Residual {
        (noise.q1.p_residual, noise.q0.p_residual)
    } else {
        (0.0, 0.0)
    };
    let detector = MeasurementModel::ideal();
    let mut design = Matrix4::zeros();
    let mut rhs = [Vector4::zeros(), Vector4::zeros(), Vector4::zeros()];
    for k in 0..4 {
        let (n1, n0) = digitize(k);
        // actual ⟨Z⟩ of each qubit after residual excitation of the nominal state
        let (z1, z0) = (n1 * (1.0 - 2.0 * p1), n0 * (1.0 - 2.0 * p0));
        let probs = [
            (1.0 + z1) * (1.0 + z0) / 4.0,
            (1.0 + z1) * (1.0 - z0) / 4.0,
            (1.0 - z1) * (1.0 + z0) / 4.0,
            (1.0 - z1) * (1.0 - z0) / 4.0,
        ];
        let counts = n_meas.map(|n| sample_counts(&mut rng, &probs, CALIBRATION_SHOT_FACTOR * n));
        let m = channel_averages(&detector, &probs, counts.as_ref());
        let (e1, e0) = match handling {
            ResidualHandling::Corrected => (z1, z0),
            ResidualHandling::Uncorrected => (n1, n0),
        };
        design.set_row(k, &Vector4::new(1.0, e0, e1, e1 * e0).transpose());
        for c in 0..3 {
            rhs[c][k] = m[c];
        }
    }
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > SINGULAR_CONDITION {
        return Err(Error::SingularCalibration { condition });
    }
    let solve = |b: &Vector4<f64>| -> [f64; 4] {
        let x = svd.solve(b, 0.0).expect("SVD computed with U and V");
        [x[0], x[1], x[2], x[3]]
    };
    Ok(MeasurementModel {
        q1: ChannelBetas::from_array(solve(&rhs[0])),
        q0: ChannelBetas::from_array(solve(&rhs[1])),
        corr: ChannelBetas::from_array(solve(&rhs[2])),
    })
}

/// Channel operator `M_i` as a dense diagonal matrix.
fn channel_operator(betas: &ChannelBetas) -> DMatrix<Complex64> {
    let d = betas.diagonal();
    DMatrix::from_fn(4, 4, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// 108×16 matrix of `Tr[R† M_i R P]/4`; column 0 is the identity term.
fn design_matrix(model: &MeasurementModel) -> DMatrix<f64> {
    let rots = cached_prerotations();
    let ops: Vec<DMatrix<Complex64>> = model.channels().iter().map(|b| channel_operator(b)).collect();
    let mut a = DMatrix::zeros(3 * N_PREROTATIONS, 16);
    for (k, r) in rots.iter().enumerate() {
        for (c, m) in ops.iter().enumerate() {
            let eff = r.adjoint() * m * r;
            for (p, tr) in pauli_traces(&eff).into_iter().enumerate() {
                a[(3 * k + c, p)] = tr.re / 4.0;
            }
        }
    }
    a
}

/// Least-squares linear inversion of the 108 channel averages for the 15
/// non-identity Pauli coefficients with ⟨II⟩ fixed to 1. With finite shots
/// each channel's equations are divided by its estimated shot-noise
/// standard deviation.
pub fn linear_inversion(records: &[TomographyRecord], model: &MeasurementModel) -> Result<PauliVector> {
    if records.len() != N_PREROTATIONS {
        return Err(Error::InvalidArgument(format!(
            "expected {N_PREROTATIONS} records, got {}",
            records.len()
        )));
    }
    let mut ordered = [None; N_PREROTATIONS];
    for r in records {
        if r.prerotation_index >= N_PREROTATIONS || ordered[r.prerotation_index].is_some() {
            return Err(Error::InvalidArgument(format!(
                "bad or repeated pre-rotation index {}",
                r.prerotation_index
            )));
        }
        ordered[r.prerotation_index] = Some(*r);
    }
    let ordered: Vec<TomographyRecord> = ordered.into_iter().map(|r| r.unwrap()).collect();

    let mut weights = [1.0; 3];
    for (c, w) in weights.iter_mut().enumerate() {
        let shots: Vec<u64> = ordered.iter().filter_map(|r| r.shots()).collect();
        if shots.len() == N_PREROTATIONS {
            let n = shots.iter().sum::<u64>() as f64 / N_PREROTATIONS as f64;
            let var = ordered.iter().map(|r| 1.0 - r.channel(c).powi(2)).sum::<f64>() / N_PREROTATIONS as f64;
            *w = 1.0 / (var.max(VARIANCE_FLOOR) / n).sqrt();
        }
    }

    let full = design_matrix(model);
    let rows = 3 * N_PREROTATIONS;
    let mut a = DMatrix::zeros(rows, 15);
    let mut b = DVector::zeros(rows);
    for (k, r) in ordered.iter().enumerate() {
        for c in 0..3 {
            let row = 3 * k + c;
            let w = weights[c];
            for p in 1..16 {
                a[(row, p - 1)] = full[(row, p)] * w;
            }
            b[row] = (r.channel(c) - full[(row, 0)]) * w;
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank < 15 {
        return Err(Error::RankDeficient { rank, required: 15 });
    }
    let x = svd.solve(&b, RANK_TOL * smax).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut coeffs = vec![1.0];
    coeffs.extend(x.iter().copied());
    Ok(PauliVector::from_raw(2, coeffs))
}

/// Add zero-mean Gaussian noise of variance `(1 − ρ_P²)/n_meas` to every
/// non-identity coefficient. An infinite `n_meas` returns the input.
pub fn gaussian_coefficient_sampling(rho: &PauliVector, n_meas: f64, seed: u64) -> Result<PauliVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gaussian_coefficient_sampling_with(rho, n_meas, &mut rng)
}

pub fn gaussian_coefficient_sampling_with<R: Rng + ?Sized>(
    rho: &PauliVector,
    n_meas: f64,
    rng: &mut R,
) -> Result<PauliVector> {
    if !(n_meas > 0.0) {
        return Err(Error::InvalidArgument(format!("n_meas must be positive, got {n_meas}")));
    }
    if n_meas.is_infinite() {
        return Ok(rho.clone());
    }
    let coeffs = rho
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if i == 0 {
                return 1.0;
            }
            let sd = ((1.0 - c * c).max(0.0) / n_meas).sqrt();
            let z: f64 = rng.sample(StandardNormal);
            c + sd * z
        })
        .collect();
    Ok(PauliVector::from_raw(rho.n_qubits(), coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{decompose, pauli_matrix, PauliLabel};
    use crate::random_states::random_density_matrix;
    use crate::simulator::prepare_ansatz;
    use approx::assert_abs_diff_eq;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn prerotation_set_shape() {
        let set = prerotation_set();
        assert_eq!(set.len(), 36);
        assert!((&set[0] - DMatrix::<Complex64>::identity(4, 4)).iter().all(|z| z.norm() < 1e-15));
        for u in &set {
            let e = u.adjoint() * u - DMatrix::<Complex64>::identity(4, 4);
            assert!(e.iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn prerotations_map_z_to_all_axes() {
        // R† Z R for each single-qubit rotation
        let z = pauli_matrix(&"Z".parse().unwrap());
        let mut found = Vec::new();
        for r in single_qubit_prerotations() {
            let eff = r.adjoint() * &z * &r;
            let tr = pauli_traces(&eff);
            let idx = (1..4).find(|&i| tr[i].re.abs() > 0.99).unwrap();
            found.push((idx, tr[idx].re.signum() as i32 * 2));
        }
        found.sort();
        assert_eq!(found, vec![(1, -2), (1, 2), (2, -2), (2, 2), (3, -2), (3, 2)]);
    }

    #[test]
    fn ideal_calibration_exact() {
        for level in [ErrorLevel::Ideal, ErrorLevel::GateDephasing] {
            let noise = NoiseModel::device_default().with_level(level);
            let m = calibrate_betas(&noise, None, 0).unwrap();
            let ideal = MeasurementModel::ideal();
            for (a, b) in m.channels().iter().zip(ideal.channels()) {
                assert!(max_abs_diff(&a.as_array(), &b.as_array()) < 1e-12);
            }
        }
    }

    #[test]
    fn uncorrected_calibration_absorbs_residual_excitation() {
        let noise = NoiseModel::device_default().with_level(ErrorLevel::Residual);
        let m = calibrate_betas_with(&noise, None, 0, ResidualHandling::Uncorrected).unwrap();
        assert_abs_diff_eq!(m.q1.zi, 1.0 - 2.0 * 0.0134, epsilon = 1e-12);
        assert_abs_diff_eq!(m.q0.iz, 1.0 - 2.0 * 0.0025, epsilon = 1e-12);
        assert_abs_diff_eq!(m.corr.zz, (1.0 - 2.0 * 0.0134) * (1.0 - 2.0 * 0.0025), epsilon = 1e-12);
        assert_abs_diff_eq!(m.q1.ii, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn finite_shot_calibration_converges() {
        let noise = NoiseModel::device_default();
        let rms = |n: u64| {
            let seeds = 200;
            let sum: f64 = (0..seeds)
                .map(|s| (calibrate_betas(&noise, Some(n), s).unwrap().q1.zi - 1.0).powi(2))
                .sum();
            (sum / seeds as f64).sqrt()
        };
        let ratio = rms(100) / rms(10_000);
        assert!((7.0..14.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn deterministic_outcomes_for_ground_state() {
        let rho = DensityMatrix::basis_state(2, 0);
        let recs = measure_state(&rho, &MeasurementModel::ideal(), Some(50), 3).unwrap();
        // index 6·1 + 1: Xπ on both → |11⟩
        assert_eq!(recs[0].m_q1, 1.0);
        assert_eq!(recs[0].m_q0, 1.0);
        assert_eq!(recs[7].m_q1, -1.0);
        assert_eq!(recs[7].m_q0, -1.0);
        assert_eq!(recs[7].m_corr, 1.0);
        assert_eq!(recs[1].m_q1, 1.0);
        assert_eq!(recs[1].m_q0, -1.0);
    }

    #[test]
    fn exact_records_match_operator_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_density_matrix(&mut rng, 2, 4);
        let model = MeasurementModel {
            q1: ChannelBetas::from_array([0.02, 0.01, 0.95, -0.03]),
            ..MeasurementModel::ideal()
        };
        let recs = measure_state(&rho, &model, None, 0).unwrap();
        for (k, r) in prerotation_set().iter().enumerate() {
            for (c, betas) in model.channels().iter().enumerate() {
                let m = channel_operator(betas);
                let expect = (&m * r * rho.matrix() * r.adjoint()).trace().re;
                assert_abs_diff_eq!(recs[k].channel(c), expect, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn inversion_recovers_exact_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for rank in 1..=4 {
            let rho = random_density_matrix(&mut rng, 2, rank);
            let recs = measure_state(&rho, &MeasurementModel::ideal(), None, 0).unwrap();
            let v = linear_inversion(&recs, &MeasurementModel::ideal()).unwrap();
            assert!(v.l2_distance(&decompose(&rho).unwrap()) < 1e-10);
        }
        let mixed = DensityMatrix::maximally_mixed(2);
        let recs = measure_state(&mixed, &MeasurementModel::ideal(), None, 0).unwrap();
        let v = linear_inversion(&recs, &MeasurementModel::ideal()).unwrap();
        assert!(v.coeffs()[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn inversion_with_nonideal_detector() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_density_matrix(&mut rng, 2, 2);
        let model = MeasurementModel {
            q1: ChannelBetas::from_array([0.03, 0.02, 0.9, 0.01]),
            q0: ChannelBetas::from_array([-0.01, 0.93, 0.0, 0.02]),
            corr: ChannelBetas::from_array([0.0, 0.01, 0.02, 0.88]),
        };
        let recs = measure_state(&rho, &model, None, 0).unwrap();
        let v = linear_inversion(&recs, &model).unwrap();
        assert!(v.l2_distance(&decompose(&rho).unwrap()) < 1e-10);
    }

    #[test]
    fn rank_deficient_model() {
        let dead = ChannelBetas::from_array([0.0; 4]);
        let model = MeasurementModel {
            q1: dead,
            q0: dead,
            corr: ChannelBetas::from_array([0.0, 0.0, 0.0, 1.0]),
        };
        let recs = measure_state(&DensityMatrix::maximally_mixed(2), &model, None, 0).unwrap();
        assert!(matches!(linear_inversion(&recs, &model), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn shot_noise_variance() {
        // a single channel with m = 0.6 exactly: rotate |0⟩ so ⟨Z⟩ = 0.6 on Q1
        let rho = prepare_ansatz(0.0, &NoiseModel::ideal()).unwrap();
        let n = 400;
        let trials = 4000;
        let idx = 12; // Xπ/2 on Q1 → m_q1 mean 0
        let vals: Vec<f64> = (0..trials)
            .map(|s| measure_state(&rho, &MeasurementModel::ideal(), Some(n), s).unwrap()[idx].m_q1)
            .collect();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let expected = (1.0 - mean * mean) / n as f64;
        assert!((var / expected - 1.0).abs() < 0.1, "var {var} expected {expected}");
    }

    #[test]
    fn reconstruction_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rho = random_density_matrix(&mut rng, 2, 2);
        let truth = decompose(&rho).unwrap();
        let n = 200;
        let seeds = 1000;
        let samples: Vec<PauliVector> = (0..seeds)
            .map(|s| {
                let recs = measure_state(&rho, &MeasurementModel::ideal(), Some(n), s).unwrap();
                linear_inversion(&recs, &MeasurementModel::ideal()).unwrap()
            })
            .collect();
        for p in 1..16 {
            let xs: Vec<f64> = samples.iter().map(|v| v.coeffs()[p]).collect();
            let mean = xs.iter().sum::<f64>() / seeds as f64;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64).sqrt();
            let se = sd / (seeds as f64).sqrt();
            // the channel weights are estimated from the same data, so allow a small slack
            assert!((mean - truth.coeffs()[p]).abs() < 3.0 * se + 2e-3, "P={} mean {mean} truth {}", PauliLabel::from_index(2, p), truth.coeffs()[p]);
        }
    }

    #[test]
    fn gaussian_sampling_limits() {
        let v = PauliVector::from_terms(2, &[("ZZ", -1.0), ("XX", 0.3)]).unwrap();
        assert_eq!(gaussian_coefficient_sampling(&v, f64::INFINITY, 1).unwrap(), v);
        let s = gaussian_coefficient_sampling(&v, 100.0, 1).unwrap();
        assert_eq!(s.at("ZZ"), -1.0);
        assert_eq!(s.at("II"), 1.0);
        assert_ne!(s.at("XX"), 0.3);
        assert!(gaussian_coefficient_sampling(&v, 0.0, 1).is_err());
    }

    #[test]
    fn record_csv_round_trip() {
        let rho = DensityMatrix::basis_state(2, 1);
        let recs = measure_state(&rho, &MeasurementModel::ideal(), Some(10), 2).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("prerotation_index,m_q1,m_q0,m_corr,n_meas\n"));
        assert_eq!(read_records(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn measurement_model_json() {
        let j = serde_json::to_value(MeasurementModel::ideal()).unwrap();
        assert_eq!(j["q1"]["ZI"], 1.0);
        assert_eq!(j["q0"]["IZ"], 1.0);
        assert_eq!(j["corr"]["ZZ"], 1.0);
        let back: MeasurementModel = serde_json::from_value(j).unwrap();
        assert_eq!(back, MeasurementModel::ideal());
    }
}
