//! Experiment commands: each reads an [`ExperimentConfig`], writes CSV/JSON
//! tables into an output directory and echoes the resolved config there.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::hamiltonian::Hamiltonian;
use crate::positivity::format_eta;
use crate::seeds::derive_seed;
use crate::vqe::{
    binned_positivity_experiment, error_budget, fluctuation_ensemble, landscape, negativity_sweep, optimize,
    EtaRecord, RunResult,
};

const TAG_VQE: u64 = 10;
const TAG_BUDGET: u64 = 11;
const TAG_POSITIVITY: u64 = 12;
const TAG_NEGATIVITY: u64 = 13;
const TAG_FLUCTUATION: u64 = 14;

pub const LANDSCAPE_HEADER: [&str; 3] = ["theta", "R_angstrom", "energy"];
pub const VQE_HEADER: [&str; 8] = ["R_angstrom", "theta", "E_raw", "E_sv", "dE_raw", "dE_sv", "F_raw", "F_sv"];
pub const TRACE_HEADER: [&str; 8] = [
    "R_angstrom",
    "generation",
    "best_theta",
    "best_energy",
    "parent_energy",
    "best_so_far",
    "mean",
    "sigma",
];
pub const BUDGET_HEADER: [&str; 12] = [
    "R_angstrom",
    "theta",
    "level",
    "dE_raw",
    "dE_sv",
    "infidelity_raw",
    "infidelity_sv",
    "increment_dE_raw",
    "increment_dE_sv",
    "increment_infidelity_raw",
    "increment_infidelity_sv",
    "n_meas",
];
pub const FLUCTUATION_HEADER: [&str; 11] = [
    "R_angstrom",
    "theta",
    "n_samples",
    "dE_raw_mean",
    "dE_raw_bar",
    "dE_sv_mean",
    "dE_sv_bar",
    "infidelity_raw_mean",
    "infidelity_raw_bar",
    "infidelity_sv_mean",
    "infidelity_sv_bar",
];
pub const SCATTER_HEADER: [&str; 5] = ["R_angstrom", "bin", "eta_E", "eta_F", "positivity"];
pub const HISTOGRAM_HEADER: [&str; 4] = ["positivity", "log10_lower", "log10_upper", "count"];
pub const NEGATIVITY_HEADER: [&str; 7] = [
    "n_meas",
    "n_seeds",
    "mean_min_eigenvalue",
    "std_min_eigenvalue",
    "fraction_negative",
    "lowest",
    "highest",
];

fn csv_writer(path: &Path, header: &[&str]) -> Result<csv::Writer<File>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    Ok(w)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes the resolved config as `config.json`.
pub fn echo_config(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let path = out.join("config.json");
    write_json(&path, cfg)?;
    Ok(path)
}

/// Optimizes every selected bond distance with per-R seeds.
pub fn converge_all(cfg: &ExperimentConfig, hs: &[Hamiltonian]) -> Result<Vec<RunResult>> {
    hs.par_iter()
        .enumerate()
        .map(|(i, h)| {
            let mut opt = cfg.optimizer.clone();
            opt.pipeline = cfg.pipeline;
            opt.seed = derive_seed(cfg.seed, &[TAG_VQE, i as u64]);
            optimize(h, &cfg.noise, &opt)
        })
        .collect()
}

/// `landscape.csv`: energy on the θ grid for every R.
pub fn cmd_landscape(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let hs = cfg.hamiltonians()?;
    let thetas = cfg.landscape.grid();
    let energies = landscape(&hs, &thetas, &cfg.noise)?;
    let path = out.join("landscape.csv");
    let mut w = csv_writer(&path, &LANDSCAPE_HEADER)?;
    for (h, row) in hs.iter().zip(&energies) {
        for (t, e) in thetas.iter().zip(row) {
            w.write_record([t.to_string(), h.bond_distance().to_string(), e.to_string()])?;
        }
    }
    w.flush()?;
    Ok(vec![path])
}

fn r_label(r: f64) -> String {
    format!("{r:.3}")
}

/// `vqe.csv`, `traces.csv` and one `runs/R_<R>.json` per bond distance.
pub fn cmd_vqe(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let hs = cfg.hamiltonians()?;
    let runs = converge_all(cfg, &hs)?;
    let mut written = Vec::new();

    let runs_dir = out.join("runs");
    std::fs::create_dir_all(&runs_dir)?;
    for run in &runs {
        let path = runs_dir.join(format!("R_{}.json", r_label(run.bond_distance)));
        write_json(&path, run)?;
        written.push(path);
    }

    let path = out.join("vqe.csv");
    let mut w = csv_writer(&path, &VQE_HEADER)?;
    for run in &runs {
        let m = &run.metrics;
        w.write_record(
            [run.bond_distance, run.converged_theta, m.e_raw, m.e_sv, m.de_raw, m.de_sv, m.f_raw, m.f_sv].map(|x| x.to_string()),
        )?;
    }
    w.flush()?;
    written.push(path);

    let path = out.join("traces.csv");
    let mut w = csv_writer(&path, &TRACE_HEADER)?;
    for run in &runs {
        for g in &run.trace {
            w.write_record([
                run.bond_distance.to_string(),
                g.generation.to_string(),
                g.best_theta.to_string(),
                g.best_energy.to_string(),
                g.parent_energy.to_string(),
                g.best_so_far.to_string(),
                g.mean.to_string(),
                g.sigma.to_string(),
            ])?;
        }
    }
    w.flush()?;
    written.push(path);
    for run in runs.iter().filter(|r| !r.optimizer_converged) {
        log::warn!("R = {} Å: generation cap reached", run.bond_distance);
    }
    Ok(written)
}

/// `budget.csv` at each converged θ, plus `fluctuation.csv` when a
/// fluctuation spec is configured.
pub fn cmd_error_budget(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let hs = cfg.hamiltonians()?;
    let runs = converge_all(cfg, &hs)?;
    let budgets = hs
        .par_iter()
        .zip(&runs)
        .enumerate()
        .map(|(i, (h, run))| {
            error_budget(
                h,
                run.converged_theta,
                &cfg.noise,
                &cfg.error_budget.levels,
                cfg.error_budget.n_meas,
                cfg.pipeline,
                derive_seed(cfg.seed, &[TAG_BUDGET, i as u64]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let n_meas = cfg.error_budget.n_meas.map_or("inf".to_string(), |n| n.to_string());
    let path = out.join("budget.csv");
    let mut w = csv_writer(&path, &BUDGET_HEADER)?;
    for (run, rows) in runs.iter().zip(&budgets) {
        for r in rows {
            w.write_record([
                run.bond_distance.to_string(),
                run.converged_theta.to_string(),
                r.level.to_string(),
                r.de_raw.to_string(),
                r.de_sv.to_string(),
                r.infidelity_raw.to_string(),
                r.infidelity_sv.to_string(),
                r.increment_de_raw.to_string(),
                r.increment_de_sv.to_string(),
                r.increment_infidelity_raw.to_string(),
                r.increment_infidelity_sv.to_string(),
                n_meas.clone(),
            ])?;
        }
    }
    w.flush()?;
    let mut written = vec![path];

    if let Some(spec) = &cfg.fluctuation {
        let path = out.join("fluctuation.csv");
        let mut w = csv_writer(&path, &FLUCTUATION_HEADER)?;
        for (i, (h, run)) in hs.iter().zip(&runs).enumerate() {
            let s = fluctuation_ensemble(
                spec,
                &cfg.noise,
                h,
                run.converged_theta,
                derive_seed(cfg.seed, &[TAG_FLUCTUATION, i as u64]),
            )?;
            let mut rec = vec![run.bond_distance.to_string(), run.converged_theta.to_string(), s.n_samples.to_string()];
            for mb in [s.de_raw, s.de_sv, s.infidelity_raw, s.infidelity_sv] {
                rec.push(mb.mean.to_string());
                rec.push(mb.bar.to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Counts of `log10 η` per positivity flag on a shared grid; infinite
/// ratios are counted in a final row with `inf` bounds.
fn write_histogram(path: &Path, records: &[EtaRecord], pick: fn(&EtaRecord) -> f64, bins: usize) -> Result<()> {
    let logs: Vec<f64> = records.iter().map(pick).filter(|x| x.is_finite()).map(f64::log10).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
    let (lo, hi) = if logs.is_empty() { (0.0, 1.0) } else if hi > lo { (lo, hi) } else { (lo, lo + 1.0) };
    let width = (hi - lo) / bins as f64;
    let mut w = csv_writer(path, &HISTOGRAM_HEADER)?;
    for flag in [false, true] {
        let mut counts = vec![0usize; bins];
        let mut infinite = 0usize;
        for r in records.iter().filter(|r| r.positivity == flag) {
            let x = pick(r);
            if x.is_finite() {
                let k = (((x.log10() - lo) / width) as usize).min(bins - 1);
                counts[k] += 1;
            } else {
                infinite += 1;
            }
        }
        for (k, c) in counts.iter().enumerate() {
            w.write_record([
                flag.to_string(),
                (lo + k as f64 * width).to_string(),
                (lo + (k + 1) as f64 * width).to_string(),
                c.to_string(),
            ])?;
        }
        w.write_record([flag.to_string(), "inf".into(), "inf".into(), infinite.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `eta_scatter.csv` and the marginal histograms `hist_eta_E.csv`,
/// `hist_eta_F.csv`.
pub fn cmd_positivity(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let hs = cfg.hamiltonians()?;
    let runs = converge_all(cfg, &hs)?;
    let p = &cfg.positivity;
    let mut records = Vec::new();
    for (i, (h, run)) in hs.iter().zip(&runs).enumerate() {
        records.extend(binned_positivity_experiment(
            h,
            run.converged_theta,
            &cfg.noise,
            p.bins,
            p.n_meas_bin,
            cfg.pipeline,
            derive_seed(cfg.seed, &[TAG_POSITIVITY, i as u64]),
        )?);
    }
    let path = out.join("eta_scatter.csv");
    let mut w = csv_writer(&path, &SCATTER_HEADER)?;
    for r in &records {
        w.write_record([
            r.bond_distance.to_string(),
            r.bin.to_string(),
            format_eta(r.eta.eta_e),
            format_eta(r.eta.eta_f),
            r.positivity.to_string(),
        ])?;
    }
    w.flush()?;
    let he = out.join("hist_eta_E.csv");
    write_histogram(&he, &records, |r| r.eta.eta_e, p.histogram_bins)?;
    let hf = out.join("hist_eta_F.csv");
    write_histogram(&hf, &records, |r| r.eta.eta_f, p.histogram_bins)?;
    Ok(vec![path, he, hf])
}

/// `negativity.csv`: smallest-eigenvalue statistics per shot count.
pub fn cmd_negativity(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let n = &cfg.negativity;
    let stats = negativity_sweep(
        n.theta,
        &cfg.noise,
        &n.n_meas,
        n.n_seeds,
        cfg.pipeline,
        derive_seed(cfg.seed, &[TAG_NEGATIVITY]),
    )?;
    let path = out.join("negativity.csv");
    let mut w = csv_writer(&path, &NEGATIVITY_HEADER)?;
    for s in &stats {
        w.write_record([
            s.n_meas.to_string(),
            s.n_seeds.to_string(),
            s.mean_min_eigenvalue.to_string(),
            s.std_min_eigenvalue.to_string(),
            s.fraction_negative.to_string(),
            s.lowest.to_string(),
            s.highest.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(vec![path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::positivity::RelativeImprovement;

    fn rec(eta_e: f64, positivity: bool) -> EtaRecord {
        EtaRecord {
            bond_distance: 1.0,
            bin: 0,
            positivity,
            eta: RelativeImprovement { eta_e, eta_f: 1.0 },
        }
    }

    #[test]
    fn histogram_counts_everything() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let records = vec![rec(1.0, false), rec(10.0, false), rec(f64::INFINITY, true), rec(3.0, true)];
        write_histogram(&path, &records, |r| r.eta.eta_e, 4).unwrap();
        let mut rdr = csv::Reader::from_path(&path).unwrap();
        assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), HISTOGRAM_HEADER);
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 10);
        let total: usize = rows.iter().map(|r| r[3].parse::<usize>().unwrap()).sum();
        assert_eq!(total, 4);
        assert_eq!(&rows[9][1], "inf");
        assert_eq!(&rows[9][3], "1");
    }
}
