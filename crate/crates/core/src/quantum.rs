//! Two-qubit pure states, Pauli-X observables and σx-basis measurement.
//!
//! Basis order is |00⟩, |01⟩, |10⟩, |11⟩ with Alice's qubit as the most
//! significant (first) qubit.

use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used for Hermiticity and eigen-relation checks.
pub const EIGEN_TOLERANCE: f64 = 1e-12;

/// Maximum deviation of ‖ψ‖² from 1 accepted by measurement.
pub const MEASUREMENT_NORM_TOLERANCE: f64 = 1e-9;

pub type Amplitudes = [Complex64; 4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("amplitude {index} is not finite")]
    NonFinite { index: usize },
    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
}

/// A two-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Amplitudes,
    label: Option<String>,
}

impl StateVector {
    /// Builds a state from raw amplitudes. Only finiteness is checked here;
    /// operations that require a unit vector check the norm themselves.
    pub fn new(amps: Amplitudes) -> Result<Self, QuantumError> {
        if let Some(index) = amps.iter().position(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(QuantumError::NonFinite { index });
        }
        Ok(Self { amps, label: None })
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amps: Amplitudes) -> Result<Self, QuantumError> {
        let mut state = Self::new(amps)?;
        let norm = state.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(QuantumError::NotNormalized { norm_sqr: 0.0 });
        }
        for a in state.amps.iter_mut() {
            *a /= norm;
        }
        Ok(state)
    }

    /// Computational basis state |ab⟩ for bits a (Alice) and b (Bob).
    pub fn basis(alice: u8, bob: u8) -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        amps[usize::from(alice & 1) << 1 | usize::from(bob & 1)] = Complex64::new(1.0, 0.0);
        Self {
            amps,
            label: Some(format!("|{}{}>", alice & 1, bob & 1)),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// ⟨self|other⟩
    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(label) = &self.label {
            write!(f, "{label} ")?;
        }
        write!(f, "[")?;
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// The singlet (|01⟩ − |10⟩)/√2.
pub fn singlet_state() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector {
        amps: [
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(0.0, 0.0),
        ],
        label: Some("singlet".to_string()),
    }
}

/// Φ⁺ = (|00⟩ + |11⟩)/√2.
pub fn phi_plus_state() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector {
        amps: [
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
        ],
        label: Some("phi_plus".to_string()),
    }
}

/// Which qubit(s) an observable acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    A,
    B,
    Joint,
}

/// A Hermitian operator on the two-qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitObservable {
    matrix: [[Complex64; 4]; 4],
}

impl TwoQubitObservable {
    pub fn new(matrix: [[Complex64; 4]; 4]) -> Result<Self, QuantumError> {
        let mut deviation: f64 = 0.0;
        for (i, row) in matrix.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if !(entry.re.is_finite() && entry.im.is_finite()) {
                    return Err(QuantumError::NonFinite { index: 4 * i + j });
                }
                deviation = deviation.max((entry - matrix[j][i].conj()).norm());
            }
        }
        if deviation > EIGEN_TOLERANCE {
            return Err(QuantumError::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Self { matrix }
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.matrix
    }

    /// Matrix product. Only Hermitian when the factors commute, so the
    /// result is returned as a raw matrix.
    pub fn compose(&self, other: &TwoQubitObservable) -> [[Complex64; 4]; 4] {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..4).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum();
            }
        }
        out
    }

    pub fn commutes_with(&self, other: &TwoQubitObservable) -> bool {
        let ab = self.compose(other);
        let ba = other.compose(self);
        ab.iter()
            .flatten()
            .zip(ba.iter().flatten())
            .all(|(x, y)| (x - y).norm() <= EIGEN_TOLERANCE)
    }
}

impl Add for &TwoQubitObservable {
    type Output = TwoQubitObservable;

    fn add(self, rhs: &TwoQubitObservable) -> TwoQubitObservable {
        let mut matrix = self.matrix;
        for (row, other) in matrix.iter_mut().zip(rhs.matrix.iter()) {
            for (a, b) in row.iter_mut().zip(other.iter()) {
                *a += b;
            }
        }
        TwoQubitObservable { matrix }
    }
}

impl Mul<f64> for &TwoQubitObservable {
    type Output = TwoQubitObservable;

    fn mul(self, scale: f64) -> TwoQubitObservable {
        let mut matrix = self.matrix;
        matrix.iter_mut().flatten().for_each(|a| *a *= scale);
        TwoQubitObservable { matrix }
    }
}

fn kron(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = Complex64::new(a[i >> 1][j >> 1] * b[i & 1][j & 1], 0.0);
        }
    }
    out
}

const SIGMA_X: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
const IDENTITY_2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

/// σx⊗I, I⊗σx or σx⊗σx.
pub fn pauli_x_observable(site: Site) -> TwoQubitObservable {
    let matrix = match site {
        Site::A => kron(&SIGMA_X, &IDENTITY_2),
        Site::B => kron(&IDENTITY_2, &SIGMA_X),
        Site::Joint => kron(&SIGMA_X, &SIGMA_X),
    };
    TwoQubitObservable { matrix }
}

/// Plain matrix-vector product; the result is not renormalized.
pub fn apply(obs: &TwoQubitObservable, state: &StateVector) -> Amplitudes {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (row, slot) in obs.matrix.iter().zip(out.iter_mut()) {
        *slot = row.iter().zip(state.amps.iter()).map(|(m, a)| m * a).sum();
    }
    out
}

/// ‖O|ψ⟩ − λ|ψ⟩‖
pub fn eigen_residual(obs: &TwoQubitObservable, state: &StateVector, eigenvalue: f64) -> f64 {
    apply(obs, state)
        .iter()
        .zip(state.amps.iter())
        .map(|(o, a)| (o - a * eigenvalue).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn is_eigenstate(obs: &TwoQubitObservable, state: &StateVector, eigenvalue: f64, tol: f64) -> bool {
    eigen_residual(obs, state, eigenvalue) <= tol
}

/// A ±1 measurement eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn as_f64(self) -> f64 {
        f64::from(self.value())
    }
}

/// Joint σx outcome (Alice's eigenvalue, Bob's eigenvalue).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomePair {
    pub a: Sign,
    pub b: Sign,
}

impl OutcomePair {
    /// All four outcomes in sampling order (++, +−, −+, −−).
    pub const ALL: [OutcomePair; 4] = [
        OutcomePair {
            a: Sign::Plus,
            b: Sign::Plus,
        },
        OutcomePair {
            a: Sign::Plus,
            b: Sign::Minus,
        },
        OutcomePair {
            a: Sign::Minus,
            b: Sign::Plus,
        },
        OutcomePair {
            a: Sign::Minus,
            b: Sign::Minus,
        },
    ];

    pub fn product(self) -> i8 {
        self.a.value() * self.b.value()
    }
}

/// |±⟩ on Alice's qubit times |±⟩ on Bob's.
pub fn x_eigenstate(outcome: OutcomePair) -> StateVector {
    let (sa, sb) = (outcome.a.as_f64(), outcome.b.as_f64());
    let amps = [1.0, sb, sa, sa * sb].map(|x| Complex64::new(0.5 * x, 0.0));
    let sym = |s: Sign| if s == Sign::Plus { '+' } else { '-' };
    StateVector {
        amps,
        label: Some(format!("|{}{}>_x", sym(outcome.a), sym(outcome.b))),
    }
}

/// Born probabilities of the four σx⊗σx-basis outcomes, ordered as
/// [`OutcomePair::ALL`].
pub fn x_basis_probabilities(state: &StateVector) -> [f64; 4] {
    OutcomePair::ALL.map(|outcome| x_eigenstate(outcome).overlap(state).norm_sqr())
}

fn check_unit(state: &StateVector) -> Result<(), QuantumError> {
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > MEASUREMENT_NORM_TOLERANCE {
        return Err(QuantumError::NotNormalized { norm_sqr });
    }
    Ok(())
}

// Picks an index by inverse CDF. Zero-probability entries are never chosen,
// including when rounding leaves the total slightly below 1.
fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    for (i, p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

/// Measures σx on both qubits at once.
pub fn measure_x_pair<R: Rng + ?Sized>(
    state: &StateVector,
    rng: &mut R,
) -> Result<(OutcomePair, StateVector), QuantumError> {
    check_unit(state)?;
    let probs = x_basis_probabilities(state);
    let outcome = OutcomePair::ALL[sample_index(&probs, rng)];
    Ok((outcome, x_eigenstate(outcome)))
}

/// Measures σx on one site (for `Site::Joint`, the parity σx⊗σx) and returns the renormalized collapsed
/// state. Measuring A then B reproduces the joint distribution of
/// [`measure_x_pair`].
pub fn measure_x_site<R: Rng + ?Sized>(
    state: &StateVector,
    site: Site,
    rng: &mut R,
) -> Result<(Sign, StateVector), QuantumError> {
    check_unit(state)?;
    let obs = pauli_x_observable(site);
    let flipped = apply(&obs, state);
    // (I ± σ)/2 |ψ⟩
    let project = |s: f64| -> Amplitudes {
        let mut out = state.amps;
        for (o, f) in out.iter_mut().zip(flipped.iter()) {
            *o = (*o + f * s) * 0.5;
        }
        out
    };
    let plus = project(1.0);
    let minus = project(-1.0);
    let norm = |v: &Amplitudes| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let probs = [norm(&plus), norm(&minus)];
    let (sign, projected) = match sample_index(&probs, rng) {
        0 => (Sign::Plus, plus),
        _ => (Sign::Minus, minus),
    };
    let mut post = StateVector::normalized(projected)?;
    post.label = state.label.clone();
    Ok((sign, post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn real(v: &Amplitudes) -> [f64; 4] {
        v.map(|a| {
            assert_eq!(a.im, 0.0);
            a.re
        })
    }

    #[test]
    fn bell_states_have_expected_amplitudes() {
        assert_eq!(real(singlet_state().amplitudes()), [0.0, H, -H, 0.0]);
        assert_eq!(real(phi_plus_state().amplitudes()), [H, 0.0, 0.0, H]);
        assert!((singlet_state().norm_sqr() - 1.0).abs() < 1e-12);
        assert!((phi_plus_state().norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(singlet_state().overlap(&phi_plus_state()), Complex64::new(0.0, 0.0));
        assert_eq!(singlet_state().label(), Some("singlet"));
        assert_eq!(phi_plus_state().label(), Some("phi_plus"));
    }

    #[test]
    fn pauli_matrices_by_site() {
        let a = pauli_x_observable(Site::A);
        let ones: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| a.matrix()[i][j] != Complex64::new(0.0, 0.0))
            .collect();
        assert_eq!(ones, vec![(0, 2), (1, 3), (2, 0), (3, 1)]);

        let joint = pauli_x_observable(Site::Joint);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(joint.matrix()[i][j], Complex64::new(expected, 0.0));
            }
        }

        let b = pauli_x_observable(Site::B);
        assert_eq!(b.compose(&b), *TwoQubitObservable::identity().matrix());
        assert!(a.commutes_with(&b));
        for obs in [&a, &b, &joint] {
            assert!(TwoQubitObservable::new(*obs.matrix()).is_ok());
        }
    }

    #[test]
    fn apply_matches_hand_expansion() {
        let sum = &pauli_x_observable(Site::A) + &pauli_x_observable(Site::B);
        assert_eq!(apply(&sum, &singlet_state()), [Complex64::new(0.0, 0.0); 4]);

        let joint = pauli_x_observable(Site::Joint);
        assert_eq!(apply(&joint, &phi_plus_state()), *phi_plus_state().amplitudes());
        assert_eq!(real(&apply(&joint, &singlet_state())), [0.0, -H, H, 0.0]);
    }

    #[test]
    fn eigen_checks() {
        let sum = &pauli_x_observable(Site::A) + &pauli_x_observable(Site::B);
        let joint = pauli_x_observable(Site::Joint);
        assert!(is_eigenstate(&sum, &singlet_state(), 0.0, 1e-12));
        assert!(is_eigenstate(&joint, &phi_plus_state(), 1.0, 1e-12));
        assert!(!is_eigenstate(&joint, &singlet_state(), 1.0, 1e-12));
        assert!(is_eigenstate(&joint, &singlet_state(), -1.0, 1e-12));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = *TwoQubitObservable::identity().matrix();
        m[0][1] = Complex64::new(0.0, 1.0);
        assert!(matches!(
            TwoQubitObservable::new(m),
            Err(QuantumError::NotHermitian { .. })
        ));
    }

    #[test]
    fn non_finite_amplitude_rejected() {
        let mut amps = *singlet_state().amplitudes();
        amps[3] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(StateVector::new(amps), Err(QuantumError::NonFinite { index: 3 }));
    }

    #[test]
    fn born_probabilities_of_named_states() {
        assert_eq!(x_basis_probabilities(&singlet_state())[0], 0.0);
        assert_eq!(x_basis_probabilities(&singlet_state())[3], 0.0);
        let p = x_basis_probabilities(&singlet_state());
        assert!((p[1] - 0.5).abs() < 1e-12 && (p[2] - 0.5).abs() < 1e-12);

        let p = x_basis_probabilities(&phi_plus_state());
        assert_eq!((p[1], p[2]), (0.0, 0.0));
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);

        for p in x_basis_probabilities(&StateVector::basis(0, 0)) {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_state_rejected_by_measurement() {
        let amps = [Complex64::new(0.5, 0.0); 4].map(|a| a * 1.01);
        let state = StateVector::new(amps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            measure_x_pair(&state, &mut rng),
            Err(QuantumError::NotNormalized { .. })
        ));
        assert!(measure_x_site(&state, Site::A, &mut rng).is_err());
    }

    #[test]
    fn post_state_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let (first, post) = measure_x_pair(&phi_plus_state(), &mut rng).unwrap();
            let (again, _) = measure_x_pair(&post, &mut rng).unwrap();
            assert_eq!(first, again);
            assert!(is_eigenstate(
                &pauli_x_observable(Site::A),
                &post,
                first.a.value().into(),
                1e-12
            ));
            assert!(is_eigenstate(
                &pauli_x_observable(Site::B),
                &post,
                first.b.value().into(),
                1e-12
            ));
        }
    }

    #[test]
    fn sequential_site_measurement_keeps_singlet_anticorrelation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (a, mid) = measure_x_site(&singlet_state(), Site::A, &mut rng).unwrap();
            let (b, _) = measure_x_site(&mid, Site::B, &mut rng).unwrap();
            assert_eq!(a.value(), -b.value());
        }
    }
}
