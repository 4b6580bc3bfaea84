//! N-qubit Pauli basis, Pauli-coefficient vectors and dense density matrices.
//!
//! Labels are written with the leftmost factor acting on the highest-index
//! qubit, so for two qubits `ZI` is Z on Q1 and the computational basis is
//! ordered |Q1 Q0⟩ = |00⟩, |01⟩, |10⟩, |11⟩. Vectors are laid out in
//! lexicographic label order with I < X < Y < Z.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the dense representation is meant for.
pub const MAX_QUBITS: usize = 6;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IMAG: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Pauli {
        Self::ALL[index & 3]
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// 2×2 matrix of the single-qubit Pauli.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -IMAG, IMAG, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        DMatrix::from_row_slice(2, 2, &m)
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Entry of row `bit` (the only nonzero of that row).
    fn row_value(self, bit: usize) -> Complex64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) => ONE,
            (Pauli::Y, 0) => -IMAG,
            (Pauli::Y, _) => IMAG,
            (Pauli::Z, 0) => ONE,
            (Pauli::Z, _) => -ONE,
        }
    }

    /// `self · other = phase · result`.
    pub fn product(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::One, p),
            (a, b) if a == b => (Phase::One, I),
            (X, Y) => (Phase::I, Z),
            (Y, X) => (Phase::MinusI, Z),
            (Y, Z) => (Phase::I, X),
            (Z, Y) => (Phase::MinusI, X),
            (Z, X) => (Phase::I, Y),
            (X, Z) => (Phase::MinusI, Y),
            _ => unreachable!(),
        }
    }
}

/// Unit phase from {+1, −1, +i, −i}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    MinusOne,
    I,
    MinusI,
}

impl Phase {
    fn quarter_turns(self) -> u8 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_quarter_turns(k: u8) -> Phase {
        match k % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::One | Phase::MinusOne)
    }

    /// Real value of ±1 phases; `None` for ±i.
    pub fn as_real(self) -> Option<f64> {
        match self {
            Phase::One => Some(1.0),
            Phase::MinusOne => Some(-1.0),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::One => ONE,
            Phase::MinusOne => -ONE,
            Phase::I => IMAG,
            Phase::MinusI => -IMAG,
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_quarter_turns(self.quarter_turns() + rhs.quarter_turns())
    }
}

/// Tensor product of single-qubit Paulis; `factors[0]` acts on the highest qubit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliLabel {
    factors: Vec<Pauli>,
}

impl PauliLabel {
    pub fn new(factors: Vec<Pauli>) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_QUBITS {
            return Err(Error::InvalidLabel(
                factors.iter().map(|p| p.symbol()).collect(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            factors: vec![Pauli::I; n_qubits],
        }
    }

    /// Label at position `index` of the canonical ordering.
    pub fn from_index(n_qubits: usize, index: usize) -> Self {
        let factors = (0..n_qubits)
            .map(|k| Pauli::from_index(index >> (2 * (n_qubits - 1 - k))))
            .collect();
        Self { factors }
    }

    /// All 4^N labels in canonical order.
    pub fn all(n_qubits: usize) -> impl Iterator<Item = PauliLabel> {
        (0..1usize << (2 * n_qubits)).map(move |i| PauliLabel::from_index(n_qubits, i))
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    /// Factor acting on qubit `q` (qubit 0 is the rightmost symbol).
    pub fn on_qubit(&self, q: usize) -> Pauli {
        self.factors[self.factors.len() - 1 - q]
    }

    pub fn index(&self) -> usize {
        self.factors
            .iter()
            .fold(0usize, |acc, p| (acc << 2) | p.index())
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.factors.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn commutes_with(&self, other: &PauliLabel) -> bool {
        let anticommuting = self
            .factors
            .iter()
            .zip(&other.factors)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anticommuting % 2 == 0
    }

    /// Bit mask of the qubits flipped by this operator (X or Y factors).
    fn flip_mask(&self) -> usize {
        let n = self.factors.len();
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |acc, (k, _)| acc | 1 << (n - 1 - k))
    }

    /// Value of the single nonzero entry in `row`; its column is `row ^ flip_mask`.
    fn row_value(&self, row: usize) -> Complex64 {
        let n = self.factors.len();
        self.factors
            .iter()
            .enumerate()
            .fold(ONE, |acc, (k, p)| acc * p.row_value((row >> (n - 1 - k)) & 1))
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.factors {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(Pauli::from_symbol)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidLabel(s.to_string()))?;
        PauliLabel::new(factors).map_err(|_| Error::InvalidLabel(s.to_string()))
    }
}

impl Serialize for PauliLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Dense 2^N×2^N tensor product of the label's single-qubit matrices.
pub fn pauli_matrix(label: &PauliLabel) -> DMatrix<Complex64> {
    label
        .factors
        .iter()
        .fold(DMatrix::from_element(1, 1, ONE), |acc, p| acc.kronecker(&p.matrix()))
}

/// Signed product `a · b = phase · label`.
pub fn pauli_product(a: &PauliLabel, b: &PauliLabel) -> Result<(Phase, PauliLabel)> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.n_qubits(),
            actual: b.n_qubits(),
        });
    }
    let mut phase = Phase::One;
    let factors = a
        .factors
        .iter()
        .zip(&b.factors)
        .map(|(&x, &y)| {
            let (ph, p) = x.product(y);
            phase = phase * ph;
            p
        })
        .collect();
    Ok((phase, PauliLabel { factors }))
}

/// Real coefficients ρ_P = Tr[Pρ] over the canonical Pauli basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVector {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl PauliVector {
    /// Build from a coefficient array in canonical order. The identity entry
    /// must be exactly 1 and every entry finite.
    pub fn new(n_qubits: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "register size {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        if coeffs.len() != 1 << (2 * n_qubits) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                1usize << (2 * n_qubits),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Pauli coefficient".into()));
        }
        if coeffs[0] != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "identity coefficient must be 1, got {}",
                coeffs[0]
            )));
        }
        Ok(Self { n_qubits, coeffs })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let mut coeffs = vec![0.0; 1 << (2 * n_qubits)];
        coeffs[0] = 1.0;
        Self { n_qubits, coeffs }
    }

    /// Build from (label, value) pairs; unlisted labels are zero.
    pub fn from_terms(n_qubits: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut v = Self::maximally_mixed(n_qubits);
        for (label, value) in terms {
            let label: PauliLabel = label.parse()?;
            if label.is_identity() {
                if *value != 1.0 {
                    return Err(Error::InvalidArgument(
                        "identity coefficient must be 1".into(),
                    ));
                }
                continue;
            }
            v.set(&label, *value)?;
        }
        Ok(v)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, label: &PauliLabel) -> f64 {
        debug_assert_eq!(label.n_qubits(), self.n_qubits);
        self.coeffs[label.index()]
    }

    /// Coefficient by label string; panics on a malformed label.
    pub fn at(&self, label: &str) -> f64 {
        let label: PauliLabel = label.parse().expect("valid Pauli label");
        self.get(&label)
    }

    /// Set a non-identity coefficient.
    pub fn set(&mut self, label: &PauliLabel, value: f64) -> Result<()> {
        if label.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: label.n_qubits(),
            });
        }
        if label.is_identity() {
            return Err(Error::InvalidArgument(
                "the identity coefficient is fixed to 1".into(),
            ));
        }
        if !value.is_finite() {
            return Err(Error::InvalidArgument("non-finite Pauli coefficient".into()));
        }
        self.coeffs[label.index()] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliLabel, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (PauliLabel::from_index(self.n_qubits, i), c))
    }

    /// Euclidean distance over all coefficients.
    pub fn l2_distance(&self, other: &PauliVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn from_raw(n_qubits: usize, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), 1 << (2 * n_qubits));
        let mut coeffs = coeffs;
        coeffs[0] = 1.0;
        Self { n_qubits, coeffs }
    }

    pub(crate) fn check_qubits(&self, expected: usize) -> Result<()> {
        if self.n_qubits != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.n_qubits,
            });
        }
        Ok(())
    }
}

impl Serialize for PauliVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coeffs<'a>(&'a PauliVector);
        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.coeffs.len()))?;
                for (label, c) in self.0.iter() {
                    map.serialize_entry(&label.to_string(), &c)?;
                }
                map.end()
            }
        }
        let mut s = serializer.serialize_struct("PauliVector", 2)?;
        s.serialize_field("n_qubits", &self.n_qubits)?;
        s.serialize_field("coeffs", &Coeffs(self))?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for PauliVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n_qubits: usize,
            coeffs: CoeffMap,
        }
        struct CoeffMap(Vec<(String, f64)>);
        impl<'de> Deserialize<'de> for CoeffMap {
            fn deserialize<D: Deserializer<'de>>(
                deserializer: D,
            ) -> std::result::Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = CoeffMap;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        f.write_str("a map from Pauli labels to coefficients")
                    }
                    fn visit_map<A: MapAccess<'de>>(
                        self,
                        mut access: A,
                    ) -> std::result::Result<CoeffMap, A::Error> {
                        let mut out = Vec::new();
                        while let Some((k, v)) = access.next_entry::<String, f64>()? {
                            out.push((k, v));
                        }
                        Ok(CoeffMap(out))
                    }
                }
                deserializer.deserialize_map(V)
            }
        }

        let raw = Raw::deserialize(deserializer)?;
        if raw.n_qubits == 0 || raw.n_qubits > MAX_QUBITS {
            return Err(de::Error::custom("n_qubits out of range"));
        }
        let mut coeffs = vec![0.0; 1 << (2 * raw.n_qubits)];
        coeffs[0] = 1.0;
        for (key, value) in raw.coeffs.0 {
            let label: PauliLabel = key.parse().map_err(de::Error::custom)?;
            if label.n_qubits() != raw.n_qubits {
                return Err(de::Error::custom(format!(
                    "label {key} does not match n_qubits = {}",
                    raw.n_qubits
                )));
            }
            coeffs[label.index()] = value;
        }
        PauliVector::new(raw.n_qubits, coeffs).map_err(de::Error::custom)
    }
}

/// Complex Hermitian 2^N×2^N matrix with unit trace. Positivity is not
/// enforced: raw tomographic reconstructions may violate it.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be square with power-of-two size, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "{n_qubits} qubits exceed the dense limit"
            )));
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace {trace} differs from 1"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Pure state |ψ⟩⟨ψ| from an (unnormalized) amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("zero or non-finite state vector".into()));
        }
        let dim = amplitudes.len();
        let psi = nalgebra::DVector::from_iterator(
            dim,
            amplitudes.iter().map(|a| a / norm.sqrt()),
        );
        let rho = &psi * psi.adjoint();
        Self::from_matrix(hermitize(rho))
    }

    /// Computational basis projector |k⟩⟨k|.
    pub fn basis_state(n_qubits: usize, k: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Self {
            n_qubits,
            matrix: m,
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Tr[ρσ] (real for Hermitian arguments).
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }

    pub(crate) fn from_hermitian_unchecked(matrix: DMatrix<Complex64>) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        Self { n_qubits, matrix }
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// (M + M†)/2.
pub(crate) fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

/// ρ_P = Tr[Pρ] for every label in canonical order.
pub fn decompose(rho: &DensityMatrix) -> Result<PauliVector> {
    let deviation = hermitian_deviation(&rho.matrix);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    let n = rho.n_qubits;
    let mut coeffs = Vec::with_capacity(1 << (2 * n));
    for tr in pauli_traces(&rho.matrix) {
        if tr.im.abs() > IMAG_TOL {
            return Err(Error::NonHermitianInput {
                deviation: tr.im.abs(),
            });
        }
        coeffs.push(tr.re);
    }
    // Tr[ρ] = 1 up to the tolerance enforced on construction.
    Ok(PauliVector::from_raw(n, coeffs))
}

/// Tr[P m] for every label in canonical order, for any square 2^N matrix.
pub(crate) fn pauli_traces(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let dim = m.nrows();
    let n = dim.trailing_zeros() as usize;
    PauliLabel::all(n)
        .map(|label| {
            let mask = label.flip_mask();
            (0..dim)
                .map(|row| label.row_value(row) * m[(row ^ mask, row)])
                .sum()
        })
        .collect()
}

/// ρ = 2^{-N} Σ_P ρ_P P.
pub fn reconstruct(vec: &PauliVector) -> DensityMatrix {
    let n = vec.n_qubits;
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for (i, &c) in vec.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let label = PauliLabel::from_index(n, i);
        let mask = label.flip_mask();
        for row in 0..dim {
            m[(row, row ^ mask)] += label.row_value(row) * (c * scale);
        }
    }
    DensityMatrix::from_hermitian_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn label(s: &str) -> PauliLabel {
        s.parse().unwrap()
    }

    fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let labels: Vec<String> = PauliLabel::all(2).map(|l| l.to_string()).collect();
        assert_eq!(labels[0], "II");
        assert_eq!(labels[1], "IX");
        assert_eq!(labels[4], "XI");
        assert_eq!(labels[15], "ZZ");
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(labels, sorted);
        for (i, l) in PauliLabel::all(3).enumerate() {
            assert_eq!(l.index(), i);
        }
    }

    #[test]
    fn identity_matrix() {
        let m = pauli_matrix(&label("II"));
        assert_eq!(m, DMatrix::identity(4, 4));
    }

    #[test]
    fn zi_is_diagonal_on_q1() {
        let m = pauli_matrix(&label("ZI"));
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(label("ZI").on_qubit(1), Pauli::Z);
        assert_eq!(label("ZI").on_qubit(0), Pauli::I);
    }

    #[test]
    fn xx_is_antidiagonal() {
        let m = pauli_matrix(&label("XX"));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { ONE } else { ZERO };
                assert_eq!(m[(i, j)], expected);
            }
        }
    }

    #[test]
    fn paulis_are_involutory_and_hermitian() {
        for l in PauliLabel::all(2) {
            let m = pauli_matrix(&l);
            assert!(max_abs_diff(&(&m * &m), &DMatrix::identity(4, 4)) < 1e-15);
            assert!(hermitian_deviation(&m) < 1e-15);
        }
    }

    #[test]
    fn product_examples() {
        let (ph, l) = pauli_product(&label("ZZ"), &label("IZ")).unwrap();
        assert_eq!((ph, l.to_string().as_str()), (Phase::One, "ZI"));
        let (ph, l) = pauli_product(&label("ZZ"), &label("XX")).unwrap();
        assert_eq!((ph, l.to_string().as_str()), (Phase::MinusOne, "YY"));
        let (ph, l) = pauli_product(&label("ZI"), &label("XI")).unwrap();
        assert_eq!((ph, l.to_string().as_str()), (Phase::I, "YI"));
    }

    #[test]
    fn product_matches_matrix_multiplication_for_all_pairs() {
        for a in PauliLabel::all(2) {
            for b in PauliLabel::all(2) {
                let (ph, l) = pauli_product(&a, &b).unwrap();
                let lhs = pauli_matrix(&l) * ph.to_complex();
                let rhs = pauli_matrix(&a) * pauli_matrix(&b);
                assert!(max_abs_diff(&lhs, &rhs) < 1e-15, "{a}·{b}");
                assert_eq!(ph.is_real(), a.commutes_with(&b), "{a}·{b}");
            }
        }
    }

    #[test]
    fn decompose_basis_state() {
        let v = decompose(&DensityMatrix::basis_state(2, 0)).unwrap();
        assert_eq!(v.at("ZI"), 1.0);
        assert_eq!(v.at("IZ"), 1.0);
        assert_eq!(v.at("ZZ"), 1.0);
        assert_eq!(v.at("XX"), 0.0);
        assert_eq!(v.at("YY"), 0.0);
    }

    #[test]
    fn decompose_maximally_mixed() {
        let v = decompose(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(v, PauliVector::maximally_mixed(2));
    }

    #[test]
    fn decompose_entangled_odd_state_against_brute_force() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ZERO, ONE * h, IMAG * h, ZERO];
        let rho = DensityMatrix::pure(&psi).unwrap();
        let v = decompose(&rho).unwrap();
        for l in PauliLabel::all(2) {
            let brute = (pauli_matrix(&l) * rho.matrix()).trace();
            assert_abs_diff_eq!(v.get(&l), brute.re, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(v.at("ZZ"), -1.0, epsilon = 1e-15);
        // (|01⟩ + i|10⟩)/√2 carries its coherence in XY/YX, not XX/YY.
        assert_abs_diff_eq!(v.at("XX"), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.at("XY").abs(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn decompose_rejects_non_hermitian() {
        let mut m = DMatrix::from_element(4, 4, ZERO);
        m[(0, 0)] = ONE;
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        let rho = DensityMatrix::from_hermitian_unchecked(m);
        assert!(matches!(decompose(&rho), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn reconstruct_examples() {
        let rho = reconstruct(&PauliVector::maximally_mixed(2));
        assert!(max_abs_diff(rho.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-16);

        let v = PauliVector::from_terms(2, &[("ZZ", -1.0)]).unwrap();
        let rho = reconstruct(&v);
        let mut expected = DMatrix::from_element(4, 4, ZERO);
        expected[(1, 1)] = Complex64::new(0.5, 0.0);
        expected[(2, 2)] = Complex64::new(0.5, 0.0);
        assert!(max_abs_diff(rho.matrix(), &expected) < 1e-16);
    }

    #[test]
    fn vector_json_schema() {
        let v = PauliVector::from_terms(2, &[("ZZ", -1.0), ("XX", 0.25)]).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["n_qubits"], 2);
        assert_eq!(json["coeffs"]["II"], 1.0);
        assert_eq!(json["coeffs"]["ZZ"], -1.0);
        assert_eq!(json["coeffs"]["XX"], 0.25);
        let back: PauliVector = serde_json::from_value(json).unwrap();
        assert_eq!(back, v);

        let bad = serde_json::json!({"n_qubits": 2, "coeffs": {"II": 0.5}});
        assert!(serde_json::from_value::<PauliVector>(bad).is_err());
        let bad = serde_json::json!({"n_qubits": 2, "coeffs": {"XQ": 0.5}});
        assert!(serde_json::from_value::<PauliVector>(bad).is_err());
    }

    #[test]
    fn label_parsing() {
        assert!("XYZ".parse::<PauliLabel>().is_ok());
        assert!("".parse::<PauliLabel>().is_err());
        assert!("XA".parse::<PauliLabel>().is_err());
        assert!(label("ZZ").commutes_with(&label("XX")));
        assert!(!label("ZI").commutes_with(&label("XX")));
    }

    #[test]
    fn dimension_checks() {
        assert!(pauli_product(&label("Z"), &label("ZZ")).is_err());
        assert!(PauliVector::new(2, vec![1.0; 15]).is_err());
        let mut coeffs = vec![0.0; 16];
        coeffs[0] = 0.9;
        assert!(PauliVector::new(2, coeffs).is_err());
    }
}
