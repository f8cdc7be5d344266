//! Weighted Pauli-string Hamiltonians.
//!
//! Strings are big-endian: the first letter acts on qubit 1, which is the most
//! significant bit of the computational index. "ZI" is diag(1, 1, -1, -1).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError};

pub const MAX_QUBITS: usize = 4;
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("invalid Pauli letter {0:?}")]
    BadLetter(char),
    #[error("qubit count {0} outside 1..=4")]
    BadQubitCount(usize),
    #[error("Pauli string {string} has length {len}, expected {qubits}")]
    LengthMismatch { string: String, len: usize, qubits: usize },
    #[error("all eigenvalues lie in the zero band")]
    DegenerateAtZero,
    #[error("cannot flatten: {0} eigenvalue(s) in the zero band")]
    ZeroEigenvalue(usize),
    #[error("qubit index {0} out of range")]
    BadQubit(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let data = match self {
            Pauli::I => vec![one, z, z, one],
            Pauli::X => vec![z, one, one, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![one, z, z, -one],
        };
        ComplexMatrix::from_row_major(2, data).expect("2x2")
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Result<Self, PauliError> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(PauliError::BadLetter(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self(letters)
    }

    pub fn identity(qubits: usize) -> Self {
        Self(vec![Pauli::I; qubits])
    }

    /// Single non-identity letter on `qubit` (1-based).
    pub fn single(qubits: usize, qubit: usize, p: Pauli) -> Result<Self, PauliError> {
        if qubit == 0 || qubit > qubits {
            return Err(PauliError::BadQubit(qubit));
        }
        let mut v = vec![Pauli::I; qubits];
        v[qubit - 1] = p;
        Ok(Self(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn matrix(&self) -> Result<ComplexMatrix, PauliError> {
        if self.0.is_empty() || self.0.len() > MAX_QUBITS {
            return Err(PauliError::BadQubitCount(self.0.len()));
        }
        let mut letters = self.0.iter();
        let first = letters.next().expect("nonempty").matrix();
        if self.0.len() == 1 {
            // Single qubit: 2x2 is already a valid register matrix.
            return Ok(first);
        }
        let mut m = first;
        for p in letters {
            m = m.kron(&p.matrix())?;
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars().map(Pauli::from_letter).collect::<Result<Vec<_>, _>>().map(Self)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coefficient: f64,
    pub string: PauliString,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamiltonianSpec {
    pub qubits: usize,
    pub terms: Vec<Term>,
    pub identity_coefficient: f64,
}

impl HamiltonianSpec {
    pub fn new(qubits: usize) -> Result<Self, PauliError> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(PauliError::BadQubitCount(qubits));
        }
        Ok(Self { qubits, terms: Vec::new(), identity_coefficient: 0.0 })
    }

    /// Adds a term; an all-identity string goes to the identity coefficient.
    pub fn with_term(mut self, coefficient: f64, string: &str) -> Result<Self, PauliError> {
        self.push_term(coefficient, string.parse()?)?;
        Ok(self)
    }

    pub fn push_term(&mut self, coefficient: f64, string: PauliString) -> Result<(), PauliError> {
        if string.len() != self.qubits {
            return Err(PauliError::LengthMismatch {
                string: string.to_string(),
                len: string.len(),
                qubits: self.qubits,
            });
        }
        if string.is_identity() {
            self.identity_coefficient += coefficient;
        } else {
            self.terms.push(Term { coefficient, string });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, PauliError> {
        let dim = self.dim();
        let mut m = ComplexMatrix::identity(dim)?.scale(Complex64::new(self.identity_coefficient, 0.0));
        for t in &self.terms {
            let p = t.string.matrix()?;
            m = &m + &p.scale(Complex64::new(t.coefficient, 0.0));
        }
        Ok(m)
    }

    /// Trace of the realized matrix.
    pub fn trace(&self) -> f64 {
        self.identity_coefficient * self.dim() as f64
    }

    pub fn gauge_shift(&self, mu: f64) -> Self {
        let mut out = self.clone();
        out.identity_coefficient += mu;
        out
    }

    pub fn traceless(&self) -> Self {
        let mut out = self.clone();
        out.identity_coefficient = 0.0;
        out
    }

    /// True when every term acts on at most one qubit.
    pub fn is_local(&self) -> bool {
        self.terms.iter().all(|t| t.string.weight() <= 1)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient *= s;
        }
        out.identity_coefficient *= s;
        out
    }

    /// Pauli decomposition of a Hermitian matrix; coefficients below `drop_tol` are omitted.
    pub fn from_matrix(m: &ComplexMatrix, drop_tol: f64) -> Result<Self, PauliError> {
        let dim = m.dim();
        let qubits = dim.trailing_zeros() as usize;
        let mut spec = Self::new(qubits)?;
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for code in 0..(1usize << (2 * qubits)) {
            let s: Vec<Pauli> = (0..qubits).map(|q| letters[(code >> (2 * (qubits - 1 - q))) & 3]).collect();
            let s = PauliString::new(s);
            let p = s.matrix()?;
            let c = (&p * m).trace().re / dim as f64;
            if c.abs() > drop_tol {
                spec.push_term(c, s)?;
            }
        }
        Ok(spec)
    }
}

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub fn from_int(v: i32) -> Self {
        Self(2 * v)
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NuH {
    pub value: HalfInt,
    pub positive: usize,
    pub negative: usize,
    /// Eigenvalues inside the zero band; nonzero means the class is ill-defined.
    pub zero_count: usize,
    /// Identity coefficient removed before counting, if any.
    pub stripped_identity: Option<f64>,
}

/// Half the signed imbalance of positive and negative eigenvalues.
pub fn nu_h(spec: &HamiltonianSpec, zero_tol: f64) -> Result<NuH, PauliError> {
    let dim = spec.dim() as f64;
    let stripped = if spec.identity_coefficient.abs() * dim >= zero_tol * dim {
        Some(spec.identity_coefficient)
    } else {
        None
    };
    let m = spec.traceless().to_matrix()?;
    nu_h_matrix(&m, zero_tol).map(|mut r| {
        r.stripped_identity = stripped;
        r
    })
}

/// Same count on a Hermitian matrix taken as is.
pub fn nu_h_matrix(m: &ComplexMatrix, zero_tol: f64) -> Result<NuH, PauliError> {
    let eig = linalg::eig_hermitian(m)?;
    let band = zero_tol * eig.spectral_radius();
    let positive = eig.eigenvalues.iter().filter(|&&l| l > band).count();
    let negative = eig.eigenvalues.iter().filter(|&&l| l < -band).count();
    let zero_count = eig.eigenvalues.len() - positive - negative;
    if positive + negative == 0 {
        return Err(PauliError::DegenerateAtZero);
    }
    Ok(NuH {
        value: HalfInt::from_twice(positive as i32 - negative as i32),
        positive,
        negative,
        zero_count,
        stripped_identity: None,
    })
}

/// Same eigenvectors, eigenvalues replaced by their signs.
pub fn flatten(spec: &HamiltonianSpec, zero_tol: f64) -> Result<ComplexMatrix, PauliError> {
    flatten_matrix(&spec.to_matrix()?, zero_tol)
}

pub fn flatten_matrix(m: &ComplexMatrix, zero_tol: f64) -> Result<ComplexMatrix, PauliError> {
    let eig = linalg::eig_hermitian(m)?;
    let band = zero_tol * eig.spectral_radius();
    let zeros = eig.eigenvalues.iter().filter(|l| l.abs() <= band).count();
    if zeros > 0 || eig.spectral_radius() == 0.0 {
        return Err(PauliError::ZeroEigenvalue(zeros.max(1)));
    }
    let signs: Vec<f64> = eig.eigenvalues.iter().map(|l| l.signum()).collect();
    let d = ComplexMatrix::diag_real(&signs)?;
    Ok(&(&eig.eigenvectors * &d) * &eig.eigenvectors.adjoint())
}

/// c_x XX + c_y YY + c_z ZZ.
pub fn entangling(cx: f64, cy: f64, cz: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(2)
        .and_then(|s| s.with_term(cx, "XX"))
        .and_then(|s| s.with_term(cy, "YY"))
        .and_then(|s| s.with_term(cz, "ZZ"))
        .expect("static terms")
}

pub fn heisenberg(lambda: f64) -> HamiltonianSpec {
    entangling(lambda, lambda, lambda)
}

/// (w/2)(ZI + IX - ZX); generates CNOT with qubit 1 as control.
pub fn cross_resonance(w: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(2)
        .and_then(|s| s.with_term(w / 2.0, "ZI"))
        .and_then(|s| s.with_term(w / 2.0, "IX"))
        .and_then(|s| s.with_term(-w / 2.0, "ZX"))
        .expect("static terms")
}

/// Cross-resonance with the roles of the qubits exchanged (control on qubit 2).
pub fn cross_resonance_reversed(w: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(2)
        .and_then(|s| s.with_term(w / 2.0, "IZ"))
        .and_then(|s| s.with_term(w / 2.0, "XI"))
        .and_then(|s| s.with_term(-w / 2.0, "XZ"))
        .expect("static terms")
}

/// (E/sqrt 2)(X + Z) on `target` (1-based) of a two-qubit register.
pub fn hadamard_h(energy: f64, target: usize) -> Result<HamiltonianSpec, PauliError> {
    let c = energy * FRAC_1_SQRT_2;
    let mut s = HamiltonianSpec::new(2)?;
    s.push_term(c, PauliString::single(2, target, Pauli::X)?)?;
    s.push_term(c, PauliString::single(2, target, Pauli::Z)?)?;
    Ok(s)
}

/// B·Z on qubit 1 plus the Heisenberg coupling.
pub fn parasitic_heisenberg(b: f64, lambda: f64) -> HamiltonianSpec {
    let mut s = HamiltonianSpec::new(2).and_then(|s| s.with_term(b, "ZI")).expect("static terms");
    s.terms.extend(heisenberg(lambda).terms);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zi_is_big_endian() {
        let m = HamiltonianSpec::new(2).unwrap().with_term(1.0, "ZI").unwrap().to_matrix().unwrap();
        assert_eq!(m, ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]).unwrap());
    }

    #[test]
    fn heisenberg_spectrum() {
        let e = linalg::eig_hermitian(&heisenberg(1.0).to_matrix().unwrap()).unwrap();
        for (a, b) in e.eigenvalues.iter().zip([-3.0, 1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_resonance_entries() {
        let m = cross_resonance(2.0).to_matrix().unwrap();
        // (w/2)(ZI + IX - ZX) with w = 2: block diag(Z-block for control 0: I⊗(1·I + X - X)...)
        let want = ComplexMatrix::from_real(
            4,
            &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 2.0, 0.0, 0.0, 2.0, -1.0],
        )
        .unwrap();
        assert!(m.distance(&want) < 1e-15);
        let t: Vec<String> = cross_resonance(2.0).terms.iter().map(|t| format!("{}{}", t.coefficient, t.string)).collect();
        assert_eq!(t, vec!["1ZI", "1IX", "-1ZX"]);
    }

    #[test]
    fn cross_resonance_class_follows_spectrum() {
        // Spectrum {w/2, w/2, w/2, -3w/2}: three positive, one negative.
        let r = nu_h(&cross_resonance(1.0), DEFAULT_ZERO_TOL).unwrap();
        assert_eq!((r.positive, r.negative), (3, 1));
        assert_eq!(r.value, HalfInt::from_int(1));
    }

    #[test]
    fn nu_h_examples() {
        assert_eq!(nu_h(&heisenberg(0.3), DEFAULT_ZERO_TOL).unwrap().value, HalfInt::from_int(1));
        let local = HamiltonianSpec::new(2).unwrap().with_term(0.7, "ZI").unwrap();
        assert_eq!(nu_h(&local, DEFAULT_ZERO_TOL).unwrap().value, HalfInt::from_int(0));
        let m = ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(nu_h_matrix(&m, DEFAULT_ZERO_TOL).unwrap().value, HalfInt::from_int(1));
        let m = ComplexMatrix::identity(4).unwrap();
        assert_eq!(nu_h_matrix(&m, DEFAULT_ZERO_TOL).unwrap().value, HalfInt::from_int(2));
    }

    #[test]
    fn nu_h_strips_identity() {
        let s = heisenberg(1.0).gauge_shift(5.0);
        let r = nu_h(&s, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.value, HalfInt::from_int(1));
        assert_eq!(r.stripped_identity, Some(5.0));
    }

    #[test]
    fn nu_h_zero_band() {
        let z = HamiltonianSpec::new(2).unwrap();
        assert_eq!(nu_h(&z, DEFAULT_ZERO_TOL).unwrap_err(), PauliError::DegenerateAtZero);
        // XX + YY has eigenvalues (-2, 0, 0, 2).
        let r = nu_h(&entangling(1.0, 1.0, 0.0), DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.zero_count, 2);
        assert_eq!(r.value, HalfInt::from_int(0));
    }

    #[test]
    fn flatten_examples() {
        let f = flatten(&heisenberg(1.0), DEFAULT_ZERO_TOL).unwrap();
        let e = linalg::eig_hermitian(&f).unwrap();
        for (a, b) in e.eigenvalues.iter().zip([-1.0, 1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let f7 = flatten(&heisenberg(7.0), DEFAULT_ZERO_TOL).unwrap();
        assert!(f.distance(&f7) < 1e-12);
        let flat = ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]).unwrap();
        assert!(flatten_matrix(&flat, DEFAULT_ZERO_TOL).unwrap().distance(&flat) < 1e-15);
        assert!(flatten(&entangling(1.0, 1.0, 0.0), DEFAULT_ZERO_TOL).is_err());
    }

    #[test]
    fn gauge_shift_and_trace() {
        let s = heisenberg(1.0);
        assert_eq!(s.gauge_shift(0.0), s);
        assert_eq!(s.gauge_shift(0.25).trace(), s.trace() + 1.0);
        let t = s.gauge_shift(0.25).to_matrix().unwrap().trace();
        assert!((t.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauge_shift_realizes_swap_prefactor() {
        use std::f64::consts::PI;
        let t = PI / 4.0;
        let a = linalg::expm_minus_iht(&heisenberg(1.0).to_matrix().unwrap(), t)
            .unwrap()
            .scale(Complex64::from_polar(1.0, PI / 4.0));
        let b = linalg::expm_minus_iht(&heisenberg(1.0).gauge_shift(-1.0).to_matrix().unwrap(), t).unwrap();
        assert!(a.distance(&b) < 1e-12);
    }

    #[test]
    fn builders() {
        assert_eq!(entangling(1.0, 1.0, 1.0), heisenberg(1.0));
        let p = parasitic_heisenberg(0.1, 1.0);
        assert_eq!(p.terms[0].string.to_string(), "ZI");
        assert_eq!(p.terms.len(), 4);
        let h = hadamard_h(1.0, 2).unwrap();
        let strings: Vec<String> = h.terms.iter().map(|t| t.string.to_string()).collect();
        assert_eq!(strings, vec!["IX", "IZ"]);
        assert!(hadamard_h(1.0, 3).is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let s = parasitic_heisenberg(0.3, 1.2).gauge_shift(0.4);
        let back = HamiltonianSpec::from_matrix(&s.to_matrix().unwrap(), 1e-12).unwrap();
        assert!(back.to_matrix().unwrap().distance(&s.to_matrix().unwrap()) < 1e-12);
        assert!((back.identity_coefficient - 0.4).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            HamiltonianSpec::new(2).unwrap().with_term(1.0, "XYZ"),
            Err(PauliError::LengthMismatch { .. })
        ));
        assert!(matches!("XQ".parse::<PauliString>(), Err(PauliError::BadLetter('Q'))));
    }
}
