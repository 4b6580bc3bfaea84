//! The variational loop and the experiments built on it: optimization per
//! bond distance, energy landscapes, parameter-fluctuation ensembles, the
//! cumulative error budget, binned relative-improvement statistics and the
//! minimum-eigenvalue sweep.

pub mod cmaes;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{energy, energy_error, exact_solution, fidelity, Hamiltonian, ReferenceSolution};
use crate::pauli::PauliVector;
use crate::positivity::{min_eigenvalue, relative_improvements, RelativeImprovement};
use crate::seeds::derive_seed;
use crate::simulator::{prepare_ansatz, prepare_ansatz_vector, ErrorLevel, NoiseModel, QubitParams};
use crate::symmetry::{symmetry_verify, SymmetrySpec};
use crate::tomography::{
    calibrate_betas_with, gaussian_coefficient_sampling, linear_inversion, measure_state, MeasurementModel,
    ResidualHandling,
};

pub use cmaes::{CmaEs, CmaEsSettings, GenerationRecord, GoldenSection, OptimizerOutcome, ScalarOptimizer};

/// Effective shot count of the Gaussian shortcut per tomography shot
/// setting: every coefficient is informed by several pre-rotations.
pub const SHORTCUT_SHOT_FACTOR: f64 = 4.0;

const TAG_CALIBRATION: u64 = 1;
const TAG_OPTIMIZER: u64 = 2;
const TAG_EVALUATION: u64 = 3;
const TAG_FINAL: u64 = 4;
const TAG_FINAL_CALIBRATION: u64 = 5;

/// How a state estimate is obtained from the simulated state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Pipeline {
    /// Pre-rotated shot sampling with calibrated readout and linear inversion.
    #[default]
    ShotTomography,
    /// Independent Gaussian noise on each Pauli coefficient.
    GaussianShortcut,
}

/// Reconstructs ansatz states for one Hamiltonian and noise model.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    h: &'a Hamiltonian,
    noise: NoiseModel,
    model: MeasurementModel,
    pipeline: Pipeline,
}

impl<'a> Evaluator<'a> {
    /// Calibrates the readout model (shot pipeline only) with `7·calibration_shots`
    /// shots per basis state.
    pub fn new(
        h: &'a Hamiltonian,
        noise: &NoiseModel,
        pipeline: Pipeline,
        calibration_shots: Option<u64>,
        handling: ResidualHandling,
        seed: u64,
    ) -> Result<Self> {
        noise.validate()?;
        let model = match pipeline {
            Pipeline::ShotTomography => calibrate_betas_with(noise, calibration_shots, seed, handling)?,
            Pipeline::GaussianShortcut => MeasurementModel::ideal(),
        };
        Ok(Self::with_model(h, noise, model, pipeline))
    }

    pub fn with_model(h: &'a Hamiltonian, noise: &NoiseModel, model: MeasurementModel, pipeline: Pipeline) -> Self {
        Self {
            h,
            noise: noise.clone(),
            model,
            pipeline,
        }
    }

    pub fn model(&self) -> &MeasurementModel {
        &self.model
    }

    /// Estimated Pauli vector of the ansatz state; `None` shots is exact.
    pub fn reconstruct(&self, theta: f64, n_meas: Option<u64>, seed: u64) -> Result<PauliVector> {
        match self.pipeline {
            Pipeline::ShotTomography => {
                let rho = prepare_ansatz(theta, &self.noise)?;
                let records = measure_state(&rho, &MeasurementModel::ideal(), n_meas, seed)?;
                linear_inversion(&records, &self.model)
            }
            Pipeline::GaussianShortcut => {
                let v = prepare_ansatz_vector(theta, &self.noise)?;
                match n_meas {
                    None => Ok(v),
                    Some(n) => gaussian_coefficient_sampling(&v, SHORTCUT_SHOT_FACTOR * n as f64, seed),
                }
            }
        }
    }

    pub fn energy(&self, theta: f64, n_meas: Option<u64>, seed: u64) -> Result<(f64, PauliVector)> {
        let v = self.reconstruct(theta, n_meas, seed)?;
        Ok((energy(&v, self.h)?, v))
    }
}

/// One noisy energy estimate at `theta`, calibrating the readout first.
pub fn evaluate_energy(
    theta: f64,
    h: &Hamiltonian,
    noise: &NoiseModel,
    n_meas: Option<u64>,
    seed: u64,
    pipeline: Pipeline,
) -> Result<(f64, PauliVector)> {
    let ev = Evaluator::new(
        h,
        noise,
        pipeline,
        n_meas,
        ResidualHandling::default(),
        derive_seed(seed, &[TAG_CALIBRATION]),
    )?;
    ev.energy(theta, n_meas, derive_seed(seed, &[TAG_EVALUATION]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub population: usize,
    pub initial_theta: f64,
    pub initial_sigma: f64,
    pub max_generations: usize,
    /// Hartree.
    pub tolerance: f64,
    pub stall_generations: usize,
    pub tol_x: f64,
    pub max_spread: f64,
    /// Shots per pre-rotation for each energy evaluation.
    pub n_meas_optimization: u64,
    /// Shots per pre-rotation for the final reconstruction.
    pub n_meas_final: u64,
    pub pipeline: Pipeline,
    pub residual_handling: ResidualHandling,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let c = CmaEsSettings::default();
        Self {
            population: c.population,
            initial_theta: c.initial_mean,
            initial_sigma: c.initial_sigma,
            max_generations: c.max_generations,
            tolerance: c.tolerance,
            stall_generations: c.stall_generations,
            tol_x: c.tol_x,
            max_spread: c.max_spread,
            n_meas_optimization: 1_000,
            n_meas_final: 100_000,
            pipeline: Pipeline::default(),
            residual_handling: ResidualHandling::default(),
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::Config(format!("population must be at least 4, got {}", self.population)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if !(self.initial_sigma > 0.0) {
            return Err(Error::Config("initial_sigma must be positive".into()));
        }
        if self.n_meas_optimization == 0 || self.n_meas_final == 0 {
            return Err(Error::Config("shot counts must be positive".into()));
        }
        if self.max_generations == 0 {
            return Err(Error::Config("max_generations must be positive".into()));
        }
        Ok(())
    }

    fn cmaes(&self) -> CmaEsSettings {
        CmaEsSettings {
            population: self.population,
            initial_mean: self.initial_theta,
            initial_sigma: self.initial_sigma,
            max_generations: self.max_generations,
            tolerance: self.tolerance,
            stall_generations: self.stall_generations,
            tol_x: self.tol_x,
            max_spread: self.max_spread,
        }
    }
}

/// Energy and fidelity figures of a raw and a verified state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(rename = "E_raw")]
    pub e_raw: f64,
    #[serde(rename = "E_sv")]
    pub e_sv: f64,
    #[serde(rename = "dE_raw")]
    pub de_raw: f64,
    #[serde(rename = "dE_sv")]
    pub de_sv: f64,
    #[serde(rename = "F_raw")]
    pub f_raw: f64,
    #[serde(rename = "F_sv")]
    pub f_sv: f64,
}

impl Metrics {
    pub fn compute(raw: &PauliVector, sv: &PauliVector, h: &Hamiltonian, reference: &ReferenceSolution) -> Result<Self> {
        Ok(Self {
            e_raw: energy(raw, h)?,
            e_sv: energy(sv, h)?,
            de_raw: energy_error(raw, reference, h)?,
            de_sv: energy_error(sv, reference, h)?,
            f_raw: fidelity(raw, reference)?,
            f_sv: fidelity(sv, reference)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub bond_distance: f64,
    pub converged_theta: f64,
    /// False when the optimizer stopped at the generation cap.
    pub optimizer_converged: bool,
    pub generations: usize,
    pub evaluations: usize,
    pub raw_vector: PauliVector,
    pub sv_vector: PauliVector,
    pub metrics: Metrics,
    pub trace: Vec<GenerationRecord>,
}

/// Distance between two angles modulo π (the ansatz has period π up to a
/// global sign).
pub fn angle_distance_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// CMA-ES optimization of θ against sampled energies, then a final
/// high-precision reconstruction and symmetry verification.
pub fn optimize(h: &Hamiltonian, noise: &NoiseModel, cfg: &OptimizerConfig) -> Result<RunResult> {
    let optimizer = CmaEs::new(cfg.cmaes())?;
    optimize_with(h, noise, cfg, &optimizer)
}

pub fn optimize_with(
    h: &Hamiltonian,
    noise: &NoiseModel,
    cfg: &OptimizerConfig,
    optimizer: &dyn ScalarOptimizer,
) -> Result<RunResult> {
    cfg.validate()?;
    let reference = exact_solution(h)?;
    let seed = cfg.seed;
    let eval = Evaluator::new(
        h,
        noise,
        cfg.pipeline,
        Some(cfg.n_meas_optimization),
        cfg.residual_handling,
        derive_seed(seed, &[TAG_CALIBRATION]),
    )?;
    let mut objective = |g: usize, thetas: &[f64]| -> Result<Vec<f64>> {
        thetas
            .par_iter()
            .enumerate()
            .map(|(k, &t)| {
                eval.energy(t, Some(cfg.n_meas_optimization), derive_seed(seed, &[TAG_EVALUATION, g as u64, k as u64]))
                    .map(|r| r.0)
            })
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[TAG_OPTIMIZER]));
    let outcome = optimizer.minimize(&mut objective, &mut rng)?;
    if !outcome.converged {
        log::warn!(
            "optimizer hit the generation cap at R = {} Å; reporting best-so-far",
            h.bond_distance()
        );
    }
    let theta = outcome.theta.rem_euclid(2.0 * PI);

    let final_eval = Evaluator::new(
        h,
        noise,
        cfg.pipeline,
        Some(cfg.n_meas_final),
        cfg.residual_handling,
        derive_seed(seed, &[TAG_FINAL_CALIBRATION]),
    )?;
    let raw = final_eval.reconstruct(theta, Some(cfg.n_meas_final), derive_seed(seed, &[TAG_FINAL]))?;
    let sv = symmetry_verify(&raw, &SymmetrySpec::h2_parity())?;
    let metrics = Metrics::compute(&raw, &sv, h, &reference)?;
    Ok(RunResult {
        bond_distance: h.bond_distance(),
        converged_theta: theta,
        optimizer_converged: outcome.converged,
        generations: outcome.generations,
        evaluations: outcome.evaluations,
        raw_vector: raw,
        sv_vector: sv,
        metrics,
        trace: outcome.trace,
    })
}

/// Energies `E[i][j]` of Hamiltonian `i` at angle `j`, from exact
/// (infinite-shot) tomography of the simulated state.
pub fn landscape(hs: &[Hamiltonian], thetas: &[f64], noise: &NoiseModel) -> Result<Vec<Vec<f64>>> {
    if hs.is_empty() || thetas.is_empty() {
        return Err(Error::InvalidArgument("landscape grids must be non-empty".into()));
    }
    noise.validate()?;
    let model = calibrate_betas_with(noise, None, 0, ResidualHandling::Corrected)?;
    let vectors: Vec<PauliVector> = thetas
        .par_iter()
        .map(|&t| {
            let rho = prepare_ansatz(t, noise)?;
            let records = measure_state(&rho, &MeasurementModel::ideal(), None, 0)?;
            linear_inversion(&records, &model)
        })
        .collect::<Result<_>>()?;
    hs.iter()
        .map(|h| vectors.iter().map(|v| energy(v, h)).collect())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitFluctuation {
    pub t1_us: ParamStats,
    pub t2_star_us: ParamStats,
    pub p_residual: ParamStats,
}

/// Conversion of T1 and T2* spreads into a Tφ variance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TphiVarianceRule {
    /// `T̄φ² [Var T2*/T2*² − Var T1/(2 T1²)]`.
    #[default]
    Published,
    /// First-order propagation through `1/(1/T2* − 1/(2T1))`:
    /// `T̄φ⁴ [Var T2*/T2*⁴ + Var T1/(4 T1⁴)]`.
    FirstOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSpec {
    pub q0: QubitFluctuation,
    pub q1: QubitFluctuation,
    #[serde(default = "default_fluctuation_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub tphi_variance_rule: TphiVarianceRule,
    /// Effective shots of the Gaussian sampling noise added to each sample;
    /// `None` leaves the simulated vectors exact.
    #[serde(default = "default_effective_shots")]
    pub effective_shots: Option<f64>,
}

fn default_fluctuation_samples() -> usize {
    10_000
}

fn default_effective_shots() -> Option<f64> {
    Some(4e5)
}

impl FluctuationSpec {
    /// Means and standard deviations of the reference device.
    pub fn device_default() -> Self {
        let s = |mean, std| ParamStats { mean, std };
        Self {
            q0: QubitFluctuation {
                t1_us: s(11.7, 0.6),
                t2_star_us: s(17.3, 1.0),
                p_residual: s(0.0025, 0.0009),
            },
            q1: QubitFluctuation {
                t1_us: s(9.8, 1.0),
                t2_star_us: s(9.0, 1.3),
                p_residual: s(0.0134, 0.0020),
            },
            n_samples: default_fluctuation_samples(),
            tphi_variance_rule: TphiVarianceRule::default(),
            effective_shots: default_effective_shots(),
        }
    }

    /// Mean and variance of Tφ for one qubit. Negative variances are
    /// clamped to 0.
    pub fn tphi_moments(&self, q: &QubitFluctuation) -> (f64, f64) {
        let (t1, t2) = (q.t1_us.mean, q.t2_star_us.mean);
        let (v1, v2) = (q.t1_us.std.powi(2), q.t2_star_us.std.powi(2));
        let tphi = 1.0 / (1.0 / t2 - 1.0 / (2.0 * t1));
        let var = match self.tphi_variance_rule {
            TphiVarianceRule::Published => tphi * tphi * (v2 / (t2 * t2) - v1 / (2.0 * t1 * t1)),
            TphiVarianceRule::FirstOrder => tphi.powi(4) * (v2 / t2.powi(4) + v1 / (4.0 * t1.powi(4))),
        };
        if var < 0.0 {
            log::warn!("negative Tφ variance {var}; clamped to 0");
            (tphi, 0.0)
        } else {
            (tphi, var)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::Config("n_samples must be at least 2".into()));
        }
        for q in [&self.q0, &self.q1] {
            for p in [q.t1_us, q.t2_star_us, q.p_residual] {
                if !(p.std >= 0.0) || !p.mean.is_finite() {
                    return Err(Error::Config("fluctuation stds must be non-negative".into()));
                }
            }
            if !(1.0 / q.t2_star_us.mean > 0.5 / q.t1_us.mean) {
                return Err(Error::Config("mean T2* must be below 2·T1".into()));
            }
        }
        if let Some(n) = self.effective_shots {
            if !(n > 0.0) {
                return Err(Error::Config("effective_shots must be positive".into()));
            }
        }
        Ok(())
    }
}

fn draw_positive<R: Rng>(rng: &mut R, mean: f64, std: f64, upper: f64) -> f64 {
    if std == 0.0 {
        return mean;
    }
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let x = mean + std * z;
        if x >= 0.0 && x < upper {
            return x;
        }
    }
}

fn sample_qubit<R: Rng>(rng: &mut R, spec: &FluctuationSpec, q: &QubitFluctuation) -> QubitParams {
    let (tphi_mean, tphi_var) = spec.tphi_moments(q);
    let t1 = draw_positive(rng, q.t1_us.mean, q.t1_us.std, f64::INFINITY);
    let tphi = loop {
        let x = draw_positive(rng, tphi_mean, tphi_var.sqrt(), f64::INFINITY);
        if x > 0.0 {
            break x;
        }
    };
    let p = draw_positive(rng, q.p_residual.mean, q.p_residual.std, 0.5);
    QubitParams {
        t1_us: t1,
        t2_star_us: 1.0 / (1.0 / tphi + 0.5 / t1),
        p_residual: p,
    }
}

/// Population mean and 2σ bar of one quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanBar {
    pub mean: f64,
    pub bar: f64,
}

impl MeanBar {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            bar: 2.0 * var.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSummary {
    pub n_samples: usize,
    pub de_raw: MeanBar,
    pub de_sv: MeanBar,
    pub infidelity_raw: MeanBar,
    pub infidelity_sv: MeanBar,
}

/// Monte Carlo over device parameters at fixed θ.
pub fn fluctuation_ensemble(
    spec: &FluctuationSpec,
    base: &NoiseModel,
    h: &Hamiltonian,
    theta: f64,
    seed: u64,
) -> Result<FluctuationSummary> {
    spec.validate()?;
    base.validate()?;
    let reference = exact_solution(h)?;
    let sv_spec = SymmetrySpec::h2_parity();
    let samples: Vec<Metrics> = (0..spec.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[i as u64]));
            let noise = NoiseModel {
                q0: sample_qubit(&mut rng, spec, &spec.q0),
                q1: sample_qubit(&mut rng, spec, &spec.q1),
                ..base.clone()
            };
            let exact = prepare_ansatz_vector(theta, &noise)?;
            let raw = match spec.effective_shots {
                Some(n) => gaussian_coefficient_sampling(&exact, n, rng.gen())?,
                None => exact,
            };
            let sv = symmetry_verify(&raw, &sv_spec)?;
            Metrics::compute(&raw, &sv, h, &reference)
        })
        .collect::<Result<_>>()?;
    let pick = |f: fn(&Metrics) -> f64| MeanBar::from_samples(&samples.iter().map(f).collect::<Vec<_>>());
    Ok(FluctuationSummary {
        n_samples: spec.n_samples,
        de_raw: pick(|m| m.de_raw),
        de_sv: pick(|m| m.de_sv),
        infidelity_raw: pick(|m| 1.0 - m.f_raw),
        infidelity_sv: pick(|m| 1.0 - m.f_sv),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub level: ErrorLevel,
    pub de_raw: f64,
    pub de_sv: f64,
    pub infidelity_raw: f64,
    pub infidelity_sv: f64,
    /// Change relative to the previous level (the level itself for the first).
    pub increment_de_raw: f64,
    pub increment_de_sv: f64,
    pub increment_infidelity_raw: f64,
    pub increment_infidelity_sv: f64,
}

/// Metrics at each cumulative level, all with identical seeds.
pub fn error_budget(
    h: &Hamiltonian,
    theta: f64,
    base: &NoiseModel,
    levels: &[ErrorLevel],
    n_meas: Option<u64>,
    pipeline: Pipeline,
    seed: u64,
) -> Result<Vec<BudgetRow>> {
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("levels must be non-empty and strictly increasing".into()));
    }
    let reference = exact_solution(h)?;
    let mut rows: Vec<BudgetRow> = Vec::with_capacity(levels.len());
    for &level in levels {
        let noise = base.with_level(level);
        let ev = Evaluator::new(
            h,
            &noise,
            pipeline,
            n_meas,
            ResidualHandling::default(),
            derive_seed(seed, &[TAG_CALIBRATION]),
        )?;
        let raw = ev.reconstruct(theta, n_meas, derive_seed(seed, &[TAG_EVALUATION]))?;
        let sv = symmetry_verify(&raw, &SymmetrySpec::h2_parity())?;
        let m = Metrics::compute(&raw, &sv, h, &reference)?;
        let (de_raw, de_sv, inf_raw, inf_sv) = (m.de_raw, m.de_sv, 1.0 - m.f_raw, 1.0 - m.f_sv);
        let prev = rows.last().map(|r| (r.de_raw, r.de_sv, r.infidelity_raw, r.infidelity_sv));
        let (p0, p1, p2, p3) = prev.unwrap_or((0.0, 0.0, 0.0, 0.0));
        rows.push(BudgetRow {
            level,
            de_raw,
            de_sv,
            infidelity_raw: inf_raw,
            infidelity_sv: inf_sv,
            increment_de_raw: de_raw - p0,
            increment_de_sv: de_sv - p1,
            increment_infidelity_raw: inf_raw - p2,
            increment_infidelity_sv: inf_sv - p3,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaRecord {
    pub bond_distance: f64,
    pub bin: usize,
    pub positivity: bool,
    #[serde(flatten)]
    pub eta: RelativeImprovement,
}

/// Independent reconstructions at `n_meas_bin` shots, each scored with and
/// without positivity projection.
pub fn binned_positivity_experiment(
    h: &Hamiltonian,
    theta: f64,
    noise: &NoiseModel,
    bins: usize,
    n_meas_bin: u64,
    pipeline: Pipeline,
    seed: u64,
) -> Result<Vec<EtaRecord>> {
    if bins < 2 {
        return Err(Error::InvalidArgument("at least two bins are required".into()));
    }
    let reference = exact_solution(h)?;
    let spec = SymmetrySpec::h2_parity();
    let ev = Evaluator::new(
        h,
        noise,
        pipeline,
        Some(n_meas_bin),
        ResidualHandling::default(),
        derive_seed(seed, &[TAG_CALIBRATION]),
    )?;
    let per_bin: Vec<[EtaRecord; 2]> = (0..bins)
        .into_par_iter()
        .map(|b| {
            let raw = ev.reconstruct(theta, Some(n_meas_bin), derive_seed(seed, &[TAG_EVALUATION, b as u64]))?;
            let rec = |positivity| -> Result<EtaRecord> {
                Ok(EtaRecord {
                    bond_distance: h.bond_distance(),
                    bin: b,
                    positivity,
                    eta: relative_improvements(&raw, h, &reference, &spec, positivity)?,
                })
            };
            Ok([rec(false)?, rec(true)?])
        })
        .collect::<Result<_>>()?;
    Ok(per_bin.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativityStats {
    pub n_meas: u64,
    pub n_seeds: usize,
    pub mean_min_eigenvalue: f64,
    pub std_min_eigenvalue: f64,
    pub fraction_negative: f64,
    pub lowest: f64,
    pub highest: f64,
}

/// Smallest eigenvalue of reconstructed states across seeds, per shot count.
pub fn negativity_sweep(
    theta: f64,
    noise: &NoiseModel,
    n_meas_list: &[u64],
    n_seeds: usize,
    pipeline: Pipeline,
    seed: u64,
) -> Result<Vec<NegativityStats>> {
    if n_seeds < 2 {
        return Err(Error::InvalidArgument("at least two seeds are required".into()));
    }
    let dummy = Hamiltonian::from_terms(2, &[("II", 0.0)])?;
    n_meas_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let ev = Evaluator::new(
                &dummy,
                noise,
                pipeline,
                Some(n),
                ResidualHandling::default(),
                derive_seed(seed, &[TAG_CALIBRATION, i as u64]),
            )?;
            let mins: Vec<f64> = (0..n_seeds)
                .into_par_iter()
                .map(|s| {
                    ev.reconstruct(theta, Some(n), derive_seed(seed, &[TAG_EVALUATION, i as u64, s as u64]))
                        .map(|v| min_eigenvalue(&v))
                })
                .collect::<Result<_>>()?;
            let k = mins.len() as f64;
            let mean = mins.iter().sum::<f64>() / k;
            let std = (mins.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
            Ok(NegativityStats {
                n_meas: n,
                n_seeds,
                mean_min_eigenvalue: mean,
                std_min_eigenvalue: std,
                fraction_negative: mins.iter().filter(|&&x| x < 0.0).count() as f64 / k,
                lowest: mins.iter().copied().fold(f64::INFINITY, f64::min),
                highest: mins.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}
