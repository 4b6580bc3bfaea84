//! Seeded generators for random states and Pauli vectors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::pauli::{hermitize, DensityMatrix, PauliVector};

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random density matrix of the given rank (Ginibre ensemble).
pub fn random_density_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    n_qubits: usize,
    rank: usize,
) -> DensityMatrix {
    let dim = 1 << n_qubits;
    let g = ginibre(rng, dim, rank.clamp(1, dim));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    let rho = hermitize(w * Complex64::new(1.0 / tr, 0.0));
    DensityMatrix::from_hermitian_unchecked(rho)
}

/// Random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> DensityMatrix {
    random_density_matrix(rng, n_qubits, 1)
}

/// Random trace-one Hermitian matrix expressed as a Pauli vector, with
/// non-identity coefficients drawn uniformly from `[-scale, scale]`.
/// Generally not positive.
pub fn random_pauli_vector<R: Rng + ?Sized>(
    rng: &mut R,
    n_qubits: usize,
    scale: f64,
) -> PauliVector {
    let len = 1 << (2 * n_qubits);
    let coeffs = (0..len)
        .map(|i| if i == 0 { 1.0 } else { rng.gen_range(-scale..=scale) })
        .collect();
    PauliVector::from_raw(n_qubits, coeffs)
}
