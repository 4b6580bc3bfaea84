//! Qubit Hamiltonians, exact reference solutions and the energy / fidelity
//! figures of merit.
//!
//! The two-qubit H2 Hamiltonian has support {II, ZI, IZ, XX, YY, ZZ}. Its
//! coefficients are data: they are read from a CSV table with header
//! `R_angstrom,h_II,h_ZI,h_IZ,h_XX,h_YY,h_ZZ`. A minimal-basis table over
//! twelve bond distances ships with the crate.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{decompose, pauli_matrix, DensityMatrix, PauliLabel, PauliVector};
use crate::simulator::ideal_ansatz_vector;

/// Column names of the coefficient table, in order.
pub const CSV_COLUMNS: [&str; 7] = ["R_angstrom", "h_II", "h_ZI", "h_IZ", "h_XX", "h_YY", "h_ZZ"];

/// Support of the two-qubit H2 Hamiltonian.
pub const H2_SUPPORT: [&str; 6] = ["II", "ZI", "IZ", "XX", "YY", "ZZ"];

const BUNDLED_TABLE: &str = include_str!("../data/h2_sto3g.csv");

/// Number of points in the initial scan for the optimal ansatz angle.
const THETA_SCAN_POINTS: usize = 1500;
const DEGENERACY_GAP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: BTreeMap<PauliLabel, f64>,
    /// Bond distance in Å (0 when the Hamiltonian is not tied to a geometry).
    bond_distance: f64,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize, terms: BTreeMap<PauliLabel, f64>, bond_distance: f64) -> Result<Self> {
        for (label, c) in &terms {
            if label.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    actual: label.n_qubits(),
                });
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient for {label}"
                )));
            }
        }
        Ok(Self {
            n_qubits,
            terms,
            bond_distance,
        })
    }

    /// Build from string labels, e.g. `[("ZZ", -1.0)]`.
    pub fn from_terms(n_qubits: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (label, c) in terms {
            *map.entry(label.parse::<PauliLabel>()?).or_insert(0.0) += c;
        }
        Self::new(n_qubits, map, 0.0)
    }

    /// Two-qubit H2 Hamiltonian from its six coefficients (Hartree).
    pub fn h2(bond_distance: f64, coeffs: [f64; 6]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (label, c) in H2_SUPPORT.iter().zip(coeffs) {
            map.insert(label.parse::<PauliLabel>()?, c);
        }
        Self::new(2, map, bond_distance)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn bond_distance(&self) -> f64 {
        self.bond_distance
    }

    pub fn terms(&self) -> &BTreeMap<PauliLabel, f64> {
        &self.terms
    }

    /// Coefficient of `label` (0 outside the support).
    pub fn coefficient(&self, label: &str) -> f64 {
        label
            .parse::<PauliLabel>()
            .ok()
            .and_then(|l| self.terms.get(&l).copied())
            .unwrap_or(0.0)
    }

    /// Dense Σ h_P P.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1 << self.n_qubits;
        self.terms
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc, (label, &c)| {
                acc + pauli_matrix(label) * Complex64::new(c, 0.0)
            })
    }
}

/// Exact ground state and the best angle reachable by the ideal ansatz.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub ground_energy: f64,
    #[serde(skip)]
    ground_state: Option<DensityMatrix>,
    pub ground_vector: PauliVector,
    pub optimal_theta: f64,
    /// Set when the two lowest eigenvalues are closer than 1e-9.
    pub degenerate: bool,
    /// Full spectrum, ascending.
    pub spectrum: Vec<f64>,
}

impl ReferenceSolution {
    pub fn ground_state(&self) -> DensityMatrix {
        match &self.ground_state {
            Some(rho) => rho.clone(),
            None => crate::pauli::reconstruct(&self.ground_vector),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.ground_vector.n_qubits()
    }

    /// First excitation energy above the ground state.
    pub fn gap(&self) -> f64 {
        self.spectrum[1] - self.spectrum[0]
    }
}

/// Parse a coefficient table; rows are returned sorted by bond distance.
pub fn parse_coefficients<R: Read>(reader: R) -> Result<Vec<Hamiltonian>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let missing: Vec<String> = CSV_COLUMNS
        .iter()
        .filter(|c| !headers.iter().any(|h| h == **c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema { missing });
    }
    let positions: Vec<usize> = CSV_COLUMNS
        .iter()
        .map(|c| headers.iter().position(|h| h == *c).unwrap())
        .collect();

    let mut out: Vec<Hamiltonian> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        let mut values = [0.0; 7];
        for (k, (&pos, name)) in positions.iter().zip(CSV_COLUMNS).enumerate() {
            let field = record.get(pos).ok_or_else(|| Error::Parse {
                row,
                column: name.to_string(),
                message: "missing field".into(),
            })?;
            let v: f64 = field.parse().map_err(|e: std::num::ParseFloatError| Error::Parse {
                row,
                column: name.to_string(),
                message: format!("{field:?}: {e}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: name.to_string(),
                    message: "non-finite value".into(),
                });
            }
            values[k] = v;
        }
        let r = values[0];
        if out.iter().any(|h| h.bond_distance == r) {
            return Err(Error::DuplicateBondDistance(r));
        }
        let mut coeffs = [0.0; 6];
        coeffs.copy_from_slice(&values[1..]);
        out.push(Hamiltonian::h2(r, coeffs)?);
    }
    if out.is_empty() {
        return Err(Error::Schema {
            missing: vec!["<data rows>".into()],
        });
    }
    out.sort_by(|a, b| a.bond_distance.total_cmp(&b.bond_distance));
    Ok(out)
}

pub fn load_coefficients(path: impl AsRef<Path>) -> Result<Vec<Hamiltonian>> {
    let file = std::fs::File::open(path)?;
    parse_coefficients(file)
}

/// The bundled minimal-basis H2 table (twelve bond distances, 0.25–2.5 Å).
pub fn bundled_h2_table() -> Vec<Hamiltonian> {
    parse_coefficients(BUNDLED_TABLE.as_bytes()).expect("bundled table is well formed")
}

/// Σ_P ρ_P h_P over the Hamiltonian's support.
pub fn energy(rho: &PauliVector, h: &Hamiltonian) -> Result<f64> {
    rho.check_qubits(h.n_qubits)?;
    Ok(h.terms.iter().map(|(label, c)| c * rho.get(label)).sum())
}

/// Exact diagonalization plus the optimal ideal-ansatz angle.
pub fn exact_solution(h: &Hamiltonian) -> Result<ReferenceSolution> {
    let eig = SymmetricEigen::new(h.matrix());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let ground = eig.eigenvectors.column(order[0]).clone_owned();
    let amplitudes: Vec<Complex64> = ground.iter().copied().collect();
    let ground_state = DensityMatrix::pure(&amplitudes)?;
    let ground_vector = decompose(&ground_state)?;
    let degenerate = spectrum.len() > 1 && spectrum[1] - spectrum[0] < DEGENERACY_GAP;

    let optimal_theta = if h.n_qubits == 2 {
        optimal_ansatz_angle(h)?
    } else {
        0.0
    };

    Ok(ReferenceSolution {
        ground_energy: spectrum[0],
        ground_state: Some(ground_state),
        ground_vector,
        optimal_theta,
        degenerate,
        spectrum,
    })
}

/// Angle in [0, 2π) minimizing the ideal-ansatz energy: dense scan, golden
/// section, then a closed-form polish using that the ideal energy is a
/// degree-2 trigonometric polynomial a + b·cos 2θ + c·sin 2θ.
fn optimal_ansatz_angle(h: &Hamiltonian) -> Result<f64> {
    let e = |theta: f64| energy(&ideal_ansatz_vector(theta), h);
    let step = 2.0 * PI / THETA_SCAN_POINTS as f64;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..THETA_SCAN_POINTS {
        let theta = k as f64 * step;
        let v = e(theta)?;
        if v < best.1 {
            best = (theta, v);
        }
    }
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (e(x1)?, e(x2)?);
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = e(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = e(x2)?;
        }
    }
    let centre = 0.5 * (lo + hi);

    let d = 0.25;
    let (em, e0, ep) = (e(centre - d)?, e(centre)?, e(centre + d)?);
    // E(centre + t) = a + p cos 2t + q sin 2t
    let q = (ep - em) / (2.0 * (2.0 * d).sin());
    let p = (ep + em - 2.0 * e0) / (2.0 * ((2.0 * d).cos() - 1.0));
    let polished = if p.abs() + q.abs() > 1e-14 {
        // minimum of p cos 2t + q sin 2t closest to t = 0
        let t = 0.5 * (-q).atan2(-p);
        centre + t
    } else {
        centre
    };
    Ok(polished.rem_euclid(2.0 * PI))
}

/// E(ρ) − E₀. Negative values are possible for unphysical ρ.
pub fn energy_error(rho: &PauliVector, reference: &ReferenceSolution, h: &Hamiltonian) -> Result<f64> {
    Ok(energy(rho, h)? - reference.ground_energy)
}

/// Tr[ρ ρ₀] = 2^{-N} Σ_P ρ_P ρ₀_P.
pub fn fidelity(rho: &PauliVector, reference: &ReferenceSolution) -> Result<f64> {
    rho.check_qubits(reference.n_qubits())?;
    let dim = (1usize << rho.n_qubits()) as f64;
    Ok(rho
        .coeffs()
        .iter()
        .zip(reference.ground_vector.coeffs())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / dim)
}
