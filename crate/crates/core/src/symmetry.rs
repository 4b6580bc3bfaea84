//! Symmetry verification: projection of a state onto the `Ŝ = s` eigenspace
//! of a Pauli symmetry, in Pauli-coefficient space and as a matrix projector.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{pauli_matrix, pauli_product, DensityMatrix, PauliLabel, PauliVector};
use crate::tomography::gaussian_coefficient_sampling_with;

/// Smallest sector weight accepted before verification is refused.
pub const SECTOR_EPSILON: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct SymmetrySpec {
    operator: PauliLabel,
    eigenvalue: i8,
}

#[derive(Deserialize)]
struct RawSpec {
    operator: PauliLabel,
    eigenvalue: i8,
}

impl TryFrom<RawSpec> for SymmetrySpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        SymmetrySpec::new(raw.operator, raw.eigenvalue)
    }
}

impl SymmetrySpec {
    pub fn new(operator: PauliLabel, eigenvalue: i8) -> Result<Self> {
        if operator.is_identity() {
            return Err(Error::InvalidArgument("symmetry operator must not be the identity".into()));
        }
        if eigenvalue != 1 && eigenvalue != -1 {
            return Err(Error::InvalidArgument(format!("eigenvalue must be ±1, got {eigenvalue}")));
        }
        Ok(Self { operator, eigenvalue })
    }

    /// Odd two-qubit parity, ZZ = −1.
    pub fn h2_parity() -> Self {
        Self {
            operator: "ZZ".parse().expect("valid label"),
            eigenvalue: -1,
        }
    }

    pub fn operator(&self) -> &PauliLabel {
        &self.operator
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue as f64
    }

    /// `(1 + sŜ)/2`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        let n = self.operator.n_qubits();
        let dim = 1 << n;
        (DMatrix::<Complex64>::identity(dim, dim) + pauli_matrix(&self.operator) * Complex64::new(self.eigenvalue(), 0.0))
            * Complex64::new(0.5, 0.0)
    }
}

impl fmt::Display for SymmetrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {:+}", self.operator, self.eigenvalue)
    }
}

/// Pauli-space verification: commuting coefficients become
/// `(ρ_P + s·φ·ρ_{ŜP}) / (1 + s·ρ_Ŝ)` with `ŜP = φ·label`; anticommuting
/// coefficients vanish.
pub fn symmetry_verify(raw: &PauliVector, spec: &SymmetrySpec) -> Result<PauliVector> {
    let n = spec.operator.n_qubits();
    raw.check_qubits(n)?;
    let s = spec.eigenvalue();
    let weight = 1.0 + s * raw.get(&spec.operator);
    if !(weight > SECTOR_EPSILON) {
        return Err(Error::VanishingSupport { weight: weight / 2.0 });
    }
    let mut out = vec![0.0; raw.len()];
    for (i, (label, value)) in raw.iter().enumerate() {
        if !label.commutes_with(&spec.operator) {
            continue;
        }
        let (phase, partner) = pauli_product(&spec.operator, &label)?;
        let phi = phase
            .as_real()
            .expect("commuting Pauli product has a real phase");
        out[i] = (value + s * phi * raw.get(&partner)) / weight;
    }
    out[0] = 1.0;
    Ok(PauliVector::from_raw(n, out))
}

/// Matrix form `MρM / Tr[Mρ]` with `M = (1 + sŜ)/2`.
pub fn projector_verify(rho: &DensityMatrix, spec: &SymmetrySpec) -> Result<DensityMatrix> {
    if rho.n_qubits() != spec.operator.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: spec.operator.n_qubits(),
            actual: rho.n_qubits(),
        });
    }
    let m = spec.projector();
    let weight = (&m * rho.matrix()).trace().re;
    if !(weight > SECTOR_EPSILON / 2.0) {
        return Err(Error::VanishingSupport { weight });
    }
    let out = &m * rho.matrix() * &m * Complex64::new(1.0 / weight, 0.0);
    Ok(DensityMatrix::from_hermitian_unchecked(crate::pauli::hermitize(out)))
}

/// Monte Carlo variance of the verified coefficient `label` when every raw
/// coefficient carries Gaussian shot noise for `n_meas` shots.
pub fn sv_variance(
    raw: &PauliVector,
    label: &PauliLabel,
    spec: &SymmetrySpec,
    n_meas: f64,
    n_boot: usize,
    seed: u64,
) -> Result<f64> {
    if n_boot < 100 {
        return Err(Error::InvalidArgument(format!("n_boot must be at least 100, got {n_boot}")));
    }
    symmetry_verify(raw, spec)?;
    if n_meas.is_infinite() {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_boot);
    for _ in 0..n_boot {
        let noisy = gaussian_coefficient_sampling_with(raw, n_meas, &mut rng)?;
        samples.push(symmetry_verify(&noisy, spec)?.get(label));
    }
    let mean = samples.iter().sum::<f64>() / n_boot as f64;
    Ok(samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n_boot - 1) as f64)
}
