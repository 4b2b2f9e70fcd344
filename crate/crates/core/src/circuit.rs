//! Phase-asymmetric beamsplitters and circuits over labelled modes.
//!
//! Convention: transmission and reflection off the plain surface carry no
//! phase, reflection off the grey surface flips the sign. Reflection keeps a
//! photon in its mode index and transmission swaps it across, so an element
//! on modes `(a, b)` with grey port `b` has the transfer block
//!
//! ```text
//! [ √η    √(1-η) ]
//! [ √(1-η)  -√η  ]
//! ```
//!
//! acting as `out_i = Σ_j M_ij in_j` on annihilation operators. The block is
//! real, symmetric and involutory.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::OccupationVector;
use crate::linalg::SquareMatrix;
use crate::postselect::DetectionPattern;
use crate::scalar::Real;

/// Which side of a beamsplitter carries the sign-flipping reflection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    A,
    B,
}

/// The 2×2 block for intensity reflectivity `eta`, rows/columns ordered `(a, b)`.
pub fn beamsplitter_matrix<T: Real>(eta: T, grey: Port) -> Result<[[T; 2]; 2]> {
    if !(eta >= T::zero() && eta <= T::one()) {
        return Err(Error::InvalidReflectivity(eta.to_f64_lossy()));
    }
    let r = eta.sqrt();
    let t = (T::one() - eta).sqrt();
    Ok(match grey {
        Port::A => [[-r, t], [t, r]],
        Port::B => [[r, t], [t, -r]],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamsplitterElement<T: Real> {
    pub mode_a: usize,
    pub mode_b: usize,
    /// Intensity reflectivity η.
    pub reflectivity: T,
    pub grey: Port,
    /// Nominal name used in reports (e.g. "B3", "NS1.eta2").
    pub label: Option<String>,
}

impl<T: Real> BeamsplitterElement<T> {
    pub fn new(mode_a: usize, mode_b: usize, reflectivity: T, grey: Port) -> Self {
        Self { mode_a, mode_b, reflectivity, grey, label: None }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn matrix(&self) -> Result<[[T; 2]; 2]> {
        beamsplitter_matrix(self.reflectivity, self.grey)
    }

    pub fn check(&self, n_modes: usize) -> Result<()> {
        for m in [self.mode_a, self.mode_b] {
            if m >= n_modes {
                return Err(Error::ModeOutOfRange { mode: m, n_modes });
            }
        }
        if self.mode_a == self.mode_b {
            return Err(Error::SelfCoupling(self.mode_a));
        }
        self.matrix().map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T: Real> {
    pub n_modes: usize,
    pub labels: Vec<String>,
    pub elements: Vec<BeamsplitterElement<T>>,
    /// Modes fed from ancilla sources, in the order of `ancilla_preparation`.
    pub ancilla_modes: Vec<usize>,
    pub ancilla_preparation: OccupationVector,
    pub detection: DetectionPattern,
}

impl<T: Real> Circuit<T> {
    /// Circuit with no elements, ancillas or detection on the given labelled modes.
    pub fn new(labels: &[&str]) -> Self {
        Self {
            n_modes: labels.len(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            elements: Vec::new(),
            ancilla_modes: Vec::new(),
            ancilla_preparation: OccupationVector::new(Vec::new()),
            detection: DetectionPattern::default(),
        }
    }

    pub fn push(&mut self, element: BeamsplitterElement<T>) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn mode(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Modes not fed by ancillas, in index order.
    pub fn signal_modes(&self) -> Vec<usize> {
        (0..self.n_modes).filter(|m| !self.ancilla_modes.contains(m)).collect()
    }

    /// The circuit truncated after its first `n` elements.
    pub fn prefix(&self, n: usize) -> Self {
        let mut c = self.clone();
        c.elements.truncate(n);
        c
    }

    pub fn reflectivities(&self) -> Vec<T> {
        self.elements.iter().map(|e| e.reflectivity).collect()
    }

    /// Same topology with every reflectivity replaced, in element order.
    pub fn with_reflectivities(&self, etas: &[T]) -> Self {
        assert_eq!(etas.len(), self.elements.len());
        let mut c = self.clone();
        for (e, &eta) in c.elements.iter_mut().zip(etas) {
            e.reflectivity = eta;
        }
        c
    }

    /// Full input occupation: signal occupations placed on the signal modes,
    /// ancilla preparation on the ancilla modes.
    pub fn input_occupation(&self, signal: &[u8]) -> Result<OccupationVector> {
        let signal_modes = self.signal_modes();
        if signal.len() != signal_modes.len() {
            return Err(Error::DimensionMismatch { expected: signal_modes.len(), found: signal.len() });
        }
        let mut counts = vec![0u8; self.n_modes];
        for (&m, &k) in signal_modes.iter().zip(signal) {
            counts[m] = k;
        }
        for (&m, &k) in self.ancilla_modes.iter().zip(self.ancilla_preparation.counts()) {
            counts[m] = k;
        }
        Ok(OccupationVector::new(counts))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_circuit(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValidationIssue {
    OutOfRange { element: usize, reflectivity: f64 },
    BadModeReference { element: usize, mode: usize },
    SelfCoupling { element: usize, mode: usize },
    DuplicateLabel { label: String },
    LabelCount { expected: usize, found: usize },
    BadAncilla { detail: String },
    BadDetection { detail: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutOfRange { element, reflectivity } => {
                write!(f, "element {element}: reflectivity {reflectivity} outside [0, 1]")
            }
            Self::BadModeReference { element, mode } => write!(f, "element {element}: mode {mode} does not exist"),
            Self::SelfCoupling { element, mode } => write!(f, "element {element}: couples mode {mode} to itself"),
            Self::DuplicateLabel { label } => write!(f, "duplicate mode label {label:?}"),
            Self::LabelCount { expected, found } => write!(f, "expected {expected} labels, found {found}"),
            Self::BadAncilla { detail } => write!(f, "ancilla preparation: {detail}"),
            Self::BadDetection { detail } => write!(f, "detection pattern: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.issues.iter().map(ToString::to_string).collect();
            Err(Error::InvalidCircuit(msgs.join("; ")))
        }
    }
}

pub fn validate_circuit<T: Real>(circuit: &Circuit<T>) -> ValidationReport {
    let n = circuit.n_modes;
    let mut issues = Vec::new();

    if circuit.labels.len() != n {
        issues.push(ValidationIssue::LabelCount { expected: n, found: circuit.labels.len() });
    }
    let mut seen = BTreeSet::new();
    for l in &circuit.labels {
        if !seen.insert(l.as_str()) {
            issues.push(ValidationIssue::DuplicateLabel { label: l.clone() });
        }
    }

    for (i, e) in circuit.elements.iter().enumerate() {
        for m in [e.mode_a, e.mode_b] {
            if m >= n {
                issues.push(ValidationIssue::BadModeReference { element: i, mode: m });
            }
        }
        if e.mode_a == e.mode_b {
            issues.push(ValidationIssue::SelfCoupling { element: i, mode: e.mode_a });
        }
        let eta = e.reflectivity;
        if !(eta >= T::zero() && eta <= T::one()) {
            issues.push(ValidationIssue::OutOfRange { element: i, reflectivity: eta.to_f64_lossy() });
        }
    }

    if circuit.ancilla_modes.len() != circuit.ancilla_preparation.n_modes() {
        issues.push(ValidationIssue::BadAncilla {
            detail: format!(
                "{} modes but {} occupation entries",
                circuit.ancilla_modes.len(),
                circuit.ancilla_preparation.n_modes()
            ),
        });
    }
    let mut anc = BTreeSet::new();
    for &m in &circuit.ancilla_modes {
        if m >= n {
            issues.push(ValidationIssue::BadAncilla { detail: format!("mode {m} does not exist") });
        }
        if !anc.insert(m) {
            issues.push(ValidationIssue::BadAncilla { detail: format!("mode {m} listed twice") });
        }
    }
    if let Err(e) = circuit.detection.validate(n) {
        issues.push(ValidationIssue::BadDetection { detail: e.to_string() });
    }

    ValidationReport { issues }
}

/// Product of embedded 2×2 blocks, later elements multiplying on the left.
/// Row `i` expresses output mode `i` in terms of the input modes.
pub fn compose_transfer_matrix<T: Real>(circuit: &Circuit<T>) -> Result<SquareMatrix<T>> {
    let n = circuit.n_modes;
    let mut u = SquareMatrix::identity(n);
    for e in &circuit.elements {
        e.check(n)?;
        let m = e.matrix()?;
        let (a, b) = (e.mode_a, e.mode_b);
        // Only rows a and b change: new_row_a = m00 row_a + m01 row_b, etc.
        for col in 0..n {
            let ra = u[(a, col)];
            let rb = u[(b, col)];
            u[(a, col)] = ra * m[0][0] + rb * m[0][1];
            u[(b, col)] = ra * m[1][0] + rb * m[1][1];
        }
    }
    Ok(u)
}

/// 2×2 block embedded into an `n`-mode identity.
pub fn element_transfer_matrix<T: Real>(element: &BeamsplitterElement<T>, n_modes: usize) -> Result<SquareMatrix<T>> {
    element.check(n_modes)?;
    let m = element.matrix()?;
    let mut u = SquareMatrix::identity(n_modes);
    let idx = [element.mode_a, element.mode_b];
    for (i, &r) in idx.iter().enumerate() {
        for (j, &c) in idx.iter().enumerate() {
            u[(r, c)] = Complex::new(m[i][j], T::zero());
        }
    }
    Ok(u)
}
