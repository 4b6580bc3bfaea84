//! Pauli transfer matrices and the elementary channels of the ansatz circuit.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{pauli_matrix, pauli_traces, PauliLabel, PauliVector};

const UNITARY_TOL: f64 = 1e-10;

/// Gauss-Hermite nodes used for flux-noise averaging.
pub const FLUX_QUADRATURE_NODES: usize = 15;

/// Real 4^N×4^N matrix acting on Pauli vectors, rows and columns in
/// canonical label order: `[R]_{ij} = 2^{-N} Tr[P_i Λ(P_j)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ptm {
    n_qubits: usize,
    matrix: DMatrix<f64>,
}

impl Ptm {
    pub fn identity(n_qubits: usize) -> Self {
        let len = 1 << (2 * n_qubits);
        Self {
            n_qubits,
            matrix: DMatrix::identity(len, len),
        }
    }

    pub fn from_matrix(n_qubits: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let len = 1 << (2 * n_qubits);
        if matrix.nrows() != len || matrix.ncols() != len {
            return Err(Error::InvalidArgument(format!(
                "PTM for {n_qubits} qubits must be {len}×{len}"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Channel `self` applied after `first`.
    pub fn after(&self, first: &Ptm) -> Ptm {
        assert_eq!(self.n_qubits, first.n_qubits);
        Ptm {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &first.matrix,
        }
    }

    /// Tensor product; `high` acts on the higher-index qubits.
    pub fn kron(high: &Ptm, low: &Ptm) -> Ptm {
        Ptm {
            n_qubits: high.n_qubits + low.n_qubits,
            matrix: high.matrix.kronecker(&low.matrix),
        }
    }

    /// Embed a single-qubit channel on qubit `q` of a two-qubit register.
    pub fn on_qubit(single: &Ptm, q: usize) -> Ptm {
        assert_eq!(single.n_qubits, 1);
        let id = Ptm::identity(1);
        match q {
            0 => Ptm::kron(&id, single),
            1 => Ptm::kron(single, &id),
            _ => panic!("two-qubit register has no qubit {q}"),
        }
    }

    pub fn apply(&self, v: &PauliVector) -> PauliVector {
        assert_eq!(self.n_qubits, v.n_qubits());
        let x = DVector::from_column_slice(v.coeffs());
        let y = &self.matrix * x;
        PauliVector::from_raw(self.n_qubits, y.iter().copied().collect())
    }

    /// Largest deviation of the first row from (1, 0, …, 0).
    pub fn trace_preservation_error(&self) -> f64 {
        (0..self.matrix.ncols())
            .map(|j| (self.matrix[(0, j)] - if j == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// Choi matrix `2^{-N} Σ_ij R_ij P_jᵀ ⊗ P_i`.
    pub fn choi(&self) -> DMatrix<Complex64> {
        let n = self.n_qubits;
        let dim = 1 << n;
        let labels: Vec<DMatrix<Complex64>> = PauliLabel::all(n).map(|l| pauli_matrix(&l)).collect();
        let mut out = DMatrix::zeros(dim * dim, dim * dim);
        for (j, pj) in labels.iter().enumerate() {
            let pjt = pj.transpose();
            for (i, pi) in labels.iter().enumerate() {
                let r = self.matrix[(i, j)];
                if r != 0.0 {
                    out += pjt.kronecker(pi) * Complex64::new(r / dim as f64, 0.0);
                }
            }
        }
        out
    }

    /// Smallest eigenvalue of the Choi matrix (≥ 0 for completely positive maps).
    pub fn choi_min_eigenvalue(&self) -> f64 {
        self.choi()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Exchange gate: identity on |00⟩, |11⟩ and a rotation by θ with `i sin θ`
/// off-diagonals inside span{|01⟩, |10⟩}.
pub fn exchange_unitary(theta: f64) -> DMatrix<Complex64> {
    let c = Complex64::new(theta.cos(), 0.0);
    let s = Complex64::new(0.0, theta.sin());
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            one, zero, zero, zero, //
            zero, c, s, zero, //
            zero, s, c, zero, //
            zero, zero, zero, one,
        ],
    )
}

pub fn rx(angle: f64) -> DMatrix<Complex64> {
    let (s, c) = (angle / 2.0).sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, -s),
            Complex64::new(c, 0.0),
        ],
    )
}

pub fn ry(angle: f64) -> DMatrix<Complex64> {
    let (s, c) = (angle / 2.0).sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    )
}

pub fn rz(angle: f64) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(1.0, -angle / 2.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0, angle / 2.0),
        ],
    )
}

fn unitarity_error(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let prod = u.adjoint() * u;
    (prod - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `[R]_{ij} = 2^{-N} Tr[P_i U P_j U†]`.
pub fn ptm_of_unitary(u: &DMatrix<Complex64>) -> Result<Ptm> {
    let dim = u.nrows();
    if dim != u.ncols() || dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "unitary must be square with power-of-two size, got {}×{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let deviation = unitarity_error(u);
    if deviation > UNITARY_TOL {
        return Err(Error::NonUnitaryInput { deviation });
    }
    let n = dim.trailing_zeros() as usize;
    let len = 1 << (2 * n);
    let u_dag = u.adjoint();
    let mut m = DMatrix::zeros(len, len);
    for (j, label) in PauliLabel::all(n).enumerate() {
        let image = u * pauli_matrix(&label) * &u_dag;
        for (i, tr) in pauli_traces(&image).into_iter().enumerate() {
            m[(i, j)] = tr.re / dim as f64;
        }
    }
    Ok(Ptm { n_qubits: n, matrix: m })
}

/// Probabilists' Gauss-Hermite rule (weight e^{-x²/2}, weights summing to 1)
/// from the Golub-Welsch eigenproblem.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.iter().map(|&(x, w)| (x, w / total)).unzip()
}

fn flux_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(FLUX_QUADRATURE_NODES))
}

/// Exchange-gate PTM averaged over a Gaussian angle deviation of standard
/// deviation `sigma`: `∫ dδ p(δ) R_{θ+δ}`.
pub fn flux_averaged_ptm(theta: f64, sigma: f64) -> Result<Ptm> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be ≥ 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return ptm_of_unitary(&exchange_unitary(theta));
    }
    let (nodes, weights) = flux_rule();
    let mut acc = DMatrix::zeros(16, 16);
    for (x, w) in nodes.iter().zip(weights) {
        acc += ptm_of_unitary(&exchange_unitary(theta + sigma * x))?.matrix * *w;
    }
    Ok(Ptm {
        n_qubits: 2,
        matrix: acc,
    })
}

/// Angle spread from the reduced dephasing time at the exchange point:
/// σ² = 1 − exp(−t_int / T₂*,red).
pub fn sigma_from_t2red(t_int_us: f64, t2_star_red_us: f64) -> f64 {
    if t_int_us <= 0.0 {
        return 0.0;
    }
    (1.0 - (-t_int_us / t2_star_red_us).exp()).sqrt()
}

/// Single-qubit amplitude damping with decay probability `p`.
pub fn amplitude_damping_channel(p: f64) -> Result<Ptm> {
    check_probability(p)?;
    let a = (1.0 - p).sqrt();
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, a, 0.0, 0.0, //
            0.0, 0.0, a, 0.0, //
            p, 0.0, 0.0, 1.0 - p,
        ],
    );
    Ok(Ptm {
        n_qubits: 1,
        matrix: m,
    })
}

/// Single-qubit pure dephasing: X and Y scaled by (1 − p).
pub fn dephasing_channel(p: f64) -> Result<Ptm> {
    check_probability(p)?;
    let d = 1.0 - p;
    Ok(Ptm {
        n_qubits: 1,
        matrix: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, d, d, 1.0])),
    })
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Decay probability of a channel of duration `t` for time constant `tau`.
pub fn decay_probability(t: f64, tau: f64) -> f64 {
    if t <= 0.0 || tau.is_infinite() {
        0.0
    } else {
        1.0 - (-t / tau).exp()
    }
}
