//! Derivative-free minimizers of a noisy scalar objective in one variable.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Best and mean state of one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_theta: f64,
    pub best_energy: f64,
    /// Weighted energy of the selected parents.
    pub parent_energy: f64,
    /// Lowest parent energy up to and including this generation.
    pub best_so_far: f64,
    pub mean: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOutcome {
    pub theta: f64,
    pub generations: usize,
    pub evaluations: usize,
    /// False when the generation cap was hit before a stopping rule fired.
    pub converged: bool,
    pub trace: Vec<GenerationRecord>,
}

/// Batch objective: evaluates every candidate of one generation.
pub type BatchObjective<'a> = dyn FnMut(usize, &[f64]) -> Result<Vec<f64>> + 'a;

pub trait ScalarOptimizer {
    fn minimize(&self, objective: &mut BatchObjective<'_>, rng: &mut dyn rand::RngCore) -> Result<OptimizerOutcome>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmaEsSettings {
    pub population: usize,
    pub initial_mean: f64,
    pub initial_sigma: f64,
    pub max_generations: usize,
    /// Stop once the best-so-far value improves by less than this over
    /// `stall_generations` generations.
    pub tolerance: f64,
    pub stall_generations: usize,
    /// Stop once the sampling spread σ·√C falls below this.
    pub tol_x: f64,
    /// Upper bound on σ·√C; the objective is periodic so wider spreads
    /// carry no information.
    #[serde(default = "default_max_spread")]
    pub max_spread: f64,
}

fn default_max_spread() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl Default for CmaEsSettings {
    fn default() -> Self {
        Self {
            population: 10,
            initial_mean: std::f64::consts::FRAC_PI_2,
            initial_sigma: 0.5,
            max_generations: 100,
            tolerance: 1e-4,
            stall_generations: 5,
            tol_x: 1e-3,
            max_spread: default_max_spread(),
        }
    }
}

/// (μ/μ_w, λ) CMA-ES restricted to one dimension.
#[derive(Clone, Debug)]
pub struct CmaEs {
    pub settings: CmaEsSettings,
}

impl CmaEs {
    pub fn new(settings: CmaEsSettings) -> Result<Self> {
        if settings.population < 4 {
            return Err(Error::InvalidArgument(format!(
                "population must be at least 4, got {}",
                settings.population
            )));
        }
        if !(settings.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if !(settings.initial_sigma > 0.0) || !(settings.max_spread > 0.0) {
            return Err(Error::InvalidArgument("initial sigma and max spread must be positive".into()));
        }
        Ok(Self { settings })
    }
}

struct Strategy {
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c1: f64,
    c_mu: f64,
    chi: f64,
}

impl Strategy {
    fn new(lambda: usize) -> Self {
        let n = 1.0;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c1 = 2.0 / ((n + 1.3f64).powi(2) + mu_eff);
        let c_mu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0f64).powi(2) + mu_eff));
        Self {
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c1,
            c_mu,
            chi: (2.0 / std::f64::consts::PI).sqrt(),
        }
    }
}

impl ScalarOptimizer for CmaEs {
    fn minimize(&self, objective: &mut BatchObjective<'_>, rng: &mut dyn rand::RngCore) -> Result<OptimizerOutcome> {
        let cfg = &self.settings;
        let lambda = cfg.population;
        let st = Strategy::new(lambda);
        let (mut mean, mut sigma, mut c) = (cfg.initial_mean, cfg.initial_sigma, 1.0f64);
        let (mut p_sigma, mut p_c) = (0.0f64, 0.0f64);
        let mut trace: Vec<GenerationRecord> = Vec::new();
        let mut best_so_far = f64::INFINITY;
        let mut evaluations = 0;
        let mut converged = false;

        for g in 0..cfg.max_generations {
            let sqrt_c = c.sqrt();
            let ys: Vec<f64> = (0..lambda)
                .map(|_| sqrt_c * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let xs: Vec<f64> = ys.iter().map(|y| mean + sigma * y).collect();
            let fs = objective(g, &xs)?;
            if fs.len() != lambda {
                return Err(Error::InvalidArgument("objective returned wrong batch size".into()));
            }
            evaluations += lambda;
            let mut order: Vec<usize> = (0..lambda).collect();
            order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));

            let y_w: f64 = st.weights.iter().zip(&order).map(|(w, &i)| w * ys[i]).sum();
            mean += sigma * y_w;
            p_sigma = (1.0 - st.c_sigma) * p_sigma + (st.c_sigma * (2.0 - st.c_sigma) * st.mu_eff).sqrt() * y_w / sqrt_c;
            let norm_ps = p_sigma.abs() / (1.0 - (1.0 - st.c_sigma).powi(2 * (g as i32 + 1))).sqrt();
            let h_sigma = if norm_ps < 2.4 * st.chi { 1.0 } else { 0.0 };
            p_c = (1.0 - st.c_c) * p_c + h_sigma * (st.c_c * (2.0 - st.c_c) * st.mu_eff).sqrt() * y_w;
            let rank_mu: f64 = st.weights.iter().zip(&order).map(|(w, &i)| w * ys[i] * ys[i]).sum();
            c = (1.0 - st.c1 - st.c_mu) * c
                + st.c1 * (p_c * p_c + (1.0 - h_sigma) * st.c_c * (2.0 - st.c_c) * c)
                + st.c_mu * rank_mu;
            sigma *= ((st.c_sigma / st.d_sigma) * (p_sigma.abs() / st.chi - 1.0)).exp();
            if sigma * c.sqrt() > cfg.max_spread {
                sigma = cfg.max_spread / c.sqrt();
            }

            let best = order[0];
            let parent_energy: f64 = st.weights.iter().zip(&order).map(|(w, &i)| w * fs[i]).sum();
            best_so_far = best_so_far.min(parent_energy);
            trace.push(GenerationRecord {
                generation: g,
                best_theta: xs[best],
                best_energy: fs[best],
                parent_energy,
                best_so_far,
                mean,
                sigma: sigma * c.sqrt(),
            });

            let k = cfg.stall_generations;
            let contracted = sigma * c.sqrt() < 0.1 * cfg.initial_sigma;
            if contracted && trace.len() > k && trace[trace.len() - 1 - k].best_so_far - best_so_far < cfg.tolerance {
                converged = true;
                break;
            }
            if sigma * c.sqrt() < cfg.tol_x {
                converged = true;
                break;
            }
        }
        let window = &trace[trace.len().saturating_sub(cfg.stall_generations + 1)..];
        let theta = window.iter().map(|g| g.mean).sum::<f64>() / window.len() as f64;
        Ok(OptimizerOutcome {
            theta,
            generations: trace.len(),
            evaluations,
            converged,
            trace,
        })
    }
}

/// Golden-section search on a bracket, evaluating one point per generation.
#[derive(Clone, Debug)]
pub struct GoldenSection {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl ScalarOptimizer for GoldenSection {
    fn minimize(&self, objective: &mut BatchObjective<'_>, _rng: &mut dyn rand::RngCore) -> Result<OptimizerOutcome> {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (self.lower, self.upper);
        let mut eval = |g: usize, x: f64| -> Result<f64> { Ok(objective(g, &[x])?[0]) };
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let (mut f1, mut f2) = (eval(0, x1)?, eval(0, x2)?);
        let mut trace = Vec::with_capacity(self.iterations);
        let mut best_so_far = f1.min(f2);
        for g in 1..=self.iterations {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = eval(g, x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = eval(g, x2)?;
            }
            let (bt, bf) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
            best_so_far = best_so_far.min(bf);
            trace.push(GenerationRecord {
                generation: g - 1,
                best_theta: bt,
                best_energy: bf,
                parent_energy: bf,
                best_so_far,
                mean: 0.5 * (lo + hi),
                sigma: hi - lo,
            });
        }
        Ok(OptimizerOutcome {
            theta: 0.5 * (lo + hi),
            generations: self.iterations,
            evaluations: self.iterations + 2,
            converged: true,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quadratic(target: f64) -> impl FnMut(usize, &[f64]) -> Result<Vec<f64>> {
        move |_, xs| Ok(xs.iter().map(|x| (x - target).powi(2)).collect())
    }

    #[test]
    fn strategy_parameters() {
        let st = Strategy::new(10);
        assert_eq!(st.weights.len(), 5);
        assert!((st.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(st.weights.windows(2).all(|w| w[0] > w[1]));
        assert!(st.mu_eff > 3.0 && st.mu_eff < 4.0);
        assert!(st.c1 + st.c_mu <= 1.0);
    }

    #[test]
    fn cmaes_finds_quadratic_minimum() {
        let opt = CmaEs::new(CmaEsSettings {
            tol_x: 1e-8,
            tolerance: 1e-14,
            ..Default::default()
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = opt.minimize(&mut quadratic(0.37), &mut rng).unwrap();
        assert!(out.converged);
        assert!((out.theta - 0.37).abs() < 1e-5, "theta {}", out.theta);
        assert!(out.trace.windows(2).all(|w| w[1].best_so_far <= w[0].best_so_far));
    }

    #[test]
    fn cmaes_on_trig_landscape() {
        let opt = CmaEs::new(CmaEsSettings::default()).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f = |_: usize, xs: &[f64]| Ok(xs.iter().map(|x| (2.0 * (x - 0.1)).cos() * -0.4).collect());
            let out = opt.minimize(&mut f, &mut rng).unwrap();
            let err = (out.theta - 0.1).rem_euclid(std::f64::consts::PI);
            let err = err.min(std::f64::consts::PI - err);
            assert!(err < 0.01, "seed {seed}: theta {}", out.theta);
        }
    }

    #[test]
    fn spread_stays_below_cap() {
        let opt = CmaEs::new(CmaEsSettings {
            max_spread: 0.7,
            ..Default::default()
        })
        .unwrap();
        let mut flat = |_: usize, xs: &[f64]| Ok(xs.iter().map(|x| (8.0 * x).sin() * 1e-9).collect());
        let out = opt.minimize(&mut flat, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert!(out.trace.iter().all(|g| g.sigma <= 0.7 + 1e-12));
    }

    #[test]
    fn cmaes_respects_generation_cap() {
        let opt = CmaEs::new(CmaEsSettings {
            max_generations: 3,
            tolerance: 1e-300,
            tol_x: 0.0,
            ..Default::default()
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = opt.minimize(&mut quadratic(5.0), &mut rng).unwrap();
        assert_eq!(out.generations, 3);
        assert!(!out.converged);
    }

    #[test]
    fn cmaes_is_deterministic() {
        let opt = CmaEs::new(CmaEsSettings::default()).unwrap();
        let run = |seed| opt.minimize(&mut quadratic(1.0), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }

    #[test]
    fn invalid_settings() {
        assert!(CmaEs::new(CmaEsSettings {
            population: 3,
            ..Default::default()
        })
        .is_err());
        assert!(CmaEs::new(CmaEsSettings {
            tolerance: 0.0,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn golden_section_alternate() {
        let gs = GoldenSection {
            lower: -1.0,
            upper: 2.0,
            iterations: 80,
        };
        let out = gs.minimize(&mut quadratic(0.4), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!((out.theta - 0.4).abs() < 1e-8);
    }
}
