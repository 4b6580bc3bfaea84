//! Nearest-physical-state projection and the relative-improvement ratios of
//! symmetry verification.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Result;
use crate::hamiltonian::{energy_error, fidelity, Hamiltonian, ReferenceSolution};
use crate::pauli::{decompose, reconstruct, DensityMatrix, PauliVector};
use crate::symmetry::{symmetry_verify, SymmetrySpec};

/// Denominators below this make a ratio infinite.
pub const ETA_ZERO: f64 = 1e-12;
/// Inputs whose smallest eigenvalue is above `-PHYSICAL_TOL` are returned as is.
pub const PHYSICAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub input_min_eigenvalue: f64,
    pub output: PauliVector,
    /// Euclidean distance moved in Pauli-coefficient space.
    pub l2_distance: f64,
    pub converged: bool,
}

/// Smallest eigenvalue of the matrix reconstructed from `vec`.
pub fn min_eigenvalue(vec: &PauliVector) -> f64 {
    reconstruct(vec).min_eigenvalue()
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Closest vector (in Pauli-coefficient L²) whose matrix is positive
/// semidefinite with unit trace. The Pauli L² norm is `2^N` times the
/// squared Frobenius norm, so the minimizer keeps the eigenvectors of the
/// input and projects its spectrum onto the simplex.
pub fn project_physical(vec: &PauliVector) -> ProjectionReport {
    let rho = reconstruct(vec);
    let eig = SymmetricEigen::new(rho.matrix().clone());
    let lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let input_min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    if input_min >= -PHYSICAL_TOL {
        return ProjectionReport {
            input_min_eigenvalue: input_min,
            output: vec.clone(),
            l2_distance: 0.0,
            converged: true,
        };
    }
    let mu = project_to_simplex(&lambda);
    let v = &eig.eigenvectors;
    let diag = DMatrix::from_fn(mu.len(), mu.len(), |i, j| {
        if i == j {
            Complex64::new(mu[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let out = crate::pauli::hermitize(v * diag * v.adjoint());
    let output = decompose(&DensityMatrix::from_hermitian_unchecked(out))
        .expect("hermitized matrix decomposes");
    let output = PauliVector::from_raw(output.n_qubits(), output.coeffs().to_vec());
    let l2_distance = output.l2_distance(vec);
    ProjectionReport {
        input_min_eigenvalue: input_min,
        output,
        l2_distance,
        converged: true,
    }
}

/// Ratios of raw to verified errors; `+∞` when the verified error vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelativeImprovement {
    #[serde(serialize_with = "serialize_eta")]
    pub eta_e: f64,
    #[serde(serialize_with = "serialize_eta")]
    pub eta_f: f64,
}

fn serialize_eta<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

/// Text form used in CSV outputs: `inf` for the sentinel.
pub fn format_eta(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den.abs() < ETA_ZERO {
        f64::INFINITY
    } else {
        num.abs() / den.abs()
    }
}

/// `η_E = |ΔE_raw|/|ΔE_SV|` and `η_F = |1 − F_raw|/|1 − F_SV|`. With
/// `enforce_positivity` the raw vector is first projected to the nearest
/// physical state and both sides of each ratio use the projected state.
pub fn relative_improvements(
    raw: &PauliVector,
    h: &Hamiltonian,
    reference: &ReferenceSolution,
    spec: &SymmetrySpec,
    enforce_positivity: bool,
) -> Result<RelativeImprovement> {
    let base = if enforce_positivity {
        project_physical(raw).output
    } else {
        raw.clone()
    };
    let sv = symmetry_verify(&base, spec)?;
    let de_raw = energy_error(&base, reference, h)?;
    let de_sv = energy_error(&sv, reference, h)?;
    let df_raw = 1.0 - fidelity(&base, reference)?;
    let df_sv = 1.0 - fidelity(&sv, reference)?;
    Ok(RelativeImprovement {
        eta_e: ratio(de_raw, de_sv),
        eta_f: ratio(df_raw, df_sv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{bundled_h2_table, exact_solution};
    use crate::random_states::{random_density_matrix, random_pauli_vector};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn min_eigenvalue_examples() {
        assert_abs_diff_eq!(min_eigenvalue(&PauliVector::maximally_mixed(2)), 0.25, epsilon = 1e-15);
        let v = PauliVector::from_terms(2, &[("ZZ", -1.2)]).unwrap();
        assert_abs_diff_eq!(min_eigenvalue(&v), -0.05, epsilon = 1e-15);
        let reference = exact_solution(&bundled_h2_table()[3]).unwrap();
        assert_abs_diff_eq!(min_eigenvalue(&reference.ground_vector), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn simplex_examples() {
        assert_eq!(project_to_simplex(&[1.1, -0.1, 0.0, 0.0]), vec![1.0, 0.0, 0.0, 0.0]);
        let p = project_to_simplex(&[0.5, 0.5, 0.3, -0.3]);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[0], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.2, epsilon = 1e-15);
        assert_eq!(p[3], 0.0);
    }

    #[test]
    fn diagonal_projection() {
        let v = PauliVector::from_terms(2, &[("IZ", 1.0), ("ZI", 1.0), ("ZZ", 1.0)]).unwrap();
        // eigenvalues (1, 0, 0, 0) already, perturb to (1.1, −0.1, 0, 0)
        let rho = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.1, 0.0),
            Complex64::new(-0.1, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]));
        let raw = decompose(&DensityMatrix::from_matrix(rho).unwrap()).unwrap();
        let report = project_physical(&raw);
        assert!(report.output.l2_distance(&v) < 1e-14);
        assert_abs_diff_eq!(report.input_min_eigenvalue, -0.1, epsilon = 1e-14);
        // Pauli L² distance is sqrt(d)·Frobenius = 2·sqrt(0.02)
        assert_abs_diff_eq!(report.l2_distance, 2.0 * 0.02f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn physical_input_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = decompose(&random_density_matrix(&mut rng, 2, 3)).unwrap();
        let r = project_physical(&v);
        assert_eq!(r.output, v);
        assert_eq!(r.l2_distance, 0.0);
    }

    #[test]
    fn output_physical_and_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let v = random_pauli_vector(&mut rng, 2, 0.6);
            let r = project_physical(&v);
            let rho = reconstruct(&r.output);
            assert!(rho.min_eigenvalue() > -1e-10);
            assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-12);
            let again = project_physical(&r.output);
            assert!(again.l2_distance < 1e-10);
        }
    }

    #[test]
    fn sampled_falsification_of_optimality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_pauli_vector(&mut rng, 2, 0.7);
        let r = project_physical(&v);
        assert!(r.l2_distance > 0.0);
        for _ in 0..10_000 {
            let rank = rng.gen_range(1..=4);
            let cand = decompose(&random_density_matrix(&mut rng, 2, rank)).unwrap();
            // mix toward the optimum so candidates land nearby
            let t: f64 = rng.gen_range(0.0..1.0);
            let mixed: Vec<f64> = cand
                .coeffs()
                .iter()
                .zip(r.output.coeffs())
                .map(|(a, b)| t * a + (1.0 - t) * b)
                .collect();
            let mixed = PauliVector::new(2, mixed).unwrap();
            assert!(mixed.l2_distance(&v) >= 0.99 * r.l2_distance);
        }
    }

    #[test]
    fn ground_state_gives_infinite_ratios() {
        let h = &bundled_h2_table()[4];
        let reference = exact_solution(h).unwrap();
        let eta = relative_improvements(&reference.ground_vector, h, &reference, &SymmetrySpec::h2_parity(), false).unwrap();
        assert!(eta.eta_e.is_infinite());
        assert!(eta.eta_f.is_infinite());
        let json = serde_json::to_string(&eta).unwrap();
        assert_eq!(json, r#"{"eta_e":"inf","eta_f":"inf"}"#);
        assert_eq!(format_eta(2.5), "2.5");
    }

    #[test]
    fn ratio_arithmetic() {
        assert_abs_diff_eq!(ratio(0.1, 0.01), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ratio(-0.1, 0.01), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_keeps_fidelity_near_ground_state() {
        let h = &bundled_h2_table()[6];
        let reference = exact_solution(h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let mut c = reference.ground_vector.coeffs().to_vec();
            for x in c.iter_mut().skip(1) {
                *x += rng.gen_range(-0.02..0.02);
            }
            let noisy = PauliVector::new(2, c).unwrap();
            let norm = noisy.l2_distance(&reference.ground_vector);
            let projected = project_physical(&noisy).output;
            let f0 = fidelity(&noisy, &reference).unwrap();
            let f1 = fidelity(&projected, &reference).unwrap();
            assert!(f1 >= f0 - norm);
        }
    }
}
