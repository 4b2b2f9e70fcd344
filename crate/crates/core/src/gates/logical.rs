//! Dual-rail encoding: one photon shared between an H and a V mode per qubit.

use std::fmt;

use num_complex::Complex;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::fock::{FockStateVector, OccupationVector};
use crate::postselect::{condition, ConditionalOutcome, DetectionPattern};
use crate::scalar::{lit, Real};

use super::{C_H, C_V, T_H, T_V};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Logical {
    H,
    V,
}

impl fmt::Display for Logical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logical::H => "H",
            Logical::V => "V",
        })
    }
}

impl Logical {
    pub fn flipped(self) -> Self {
        match self {
            Logical::H => Logical::V,
            Logical::V => Logical::H,
        }
    }
}

/// Basis inputs in report order: HH, HV, VH, VV (control first).
pub const BASIS_INPUTS: [(Logical, Logical); 4] =
    [(Logical::H, Logical::H), (Logical::H, Logical::V), (Logical::V, Logical::H), (Logical::V, Logical::V)];

/// Four-mode occupation `(c_H, c_V, t_H, t_V)` of a logical basis ket.
pub fn logical_ket(control: Logical, target: Logical) -> OccupationVector {
    let mut counts = [0u8; 4];
    counts[if control == Logical::H { C_H } else { C_V }] = 1;
    counts[if target == Logical::H { T_H } else { T_V }] = 1;
    OccupationVector::from(counts)
}

/// Control and target qubit amplitudes, each ordered `(H, V)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalQubitPair<T: Real> {
    pub control: [Complex<T>; 2],
    pub target: [Complex<T>; 2],
}

impl<T: Real> LogicalQubitPair<T> {
    pub fn new(control: [Complex<T>; 2], target: [Complex<T>; 2]) -> Result<Self> {
        let tol = lit::<T>(1e-12).max(T::epsilon() * lit::<T>(8.0));
        for pair in [&control, &target] {
            let n = pair[0].norm_sqr() + pair[1].norm_sqr();
            if (n - T::one()).abs() > tol {
                return Err(Error::NotNormalized(n.to_f64_lossy()));
            }
        }
        Ok(Self { control, target })
    }

    pub fn basis(control: Logical, target: Logical) -> Self {
        Self { control: one_hot(control), target: one_hot(target) }
    }

    /// Control `(|H> + sign |V>)/√2`, target in a basis state.
    pub fn superposed_control(sign: T, target: Logical) -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self { control: [Complex::new(h, T::zero()), Complex::new(sign * h, T::zero())], target: one_hot(target) }
    }
}

fn one_hot<T: Real>(q: Logical) -> [Complex<T>; 2] {
    let one = Complex::new(T::one(), T::zero());
    match q {
        Logical::H => [one, Complex::default()],
        Logical::V => [Complex::default(), one],
    }
}

/// Product input on a CNOT circuit: qubit photons on its four signal modes,
/// ancillas as the circuit prepares them.
pub fn encode_logical<T: Real>(circuit: &Circuit<T>, q: &LogicalQubitPair<T>) -> Result<FockStateVector<T>> {
    let signal = circuit.signal_modes();
    if signal.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: signal.len() });
    }
    let mut entries = Vec::with_capacity(4);
    for (ci, &ca) in q.control.iter().enumerate() {
        for (ti, &ta) in q.target.iter().enumerate() {
            let amp = ca * ta;
            if amp == Complex::default() {
                continue;
            }
            let occ = logical_ket(if ci == 0 { Logical::H } else { Logical::V }, if ti == 0 { Logical::H } else { Logical::V });
            entries.push((circuit.input_occupation(occ.counts())?, amp));
        }
    }
    FockStateVector::from_entries(circuit.n_modes, entries)
}

/// Projection of a four-mode state onto the logical kets, in HH, HV, VH, VV order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalDecode<T: Real> {
    pub amplitudes: [Complex<T>; 4],
    /// Squared norm outside the logical subspace.
    pub leakage: T,
}

impl<T: Real> LogicalDecode<T> {
    pub fn probabilities(&self) -> [T; 4] {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    /// Index of the most probable logical ket.
    pub fn dominant(&self) -> usize {
        let p = self.probabilities();
        (0..4).fold(0, |best, i| if p[i] > p[best] { i } else { best })
    }
}

pub fn decode_logical<T: Real>(state: &FockStateVector<T>) -> Result<LogicalDecode<T>> {
    if state.n_modes() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: state.n_modes() });
    }
    let amplitudes = BASIS_INPUTS.map(|(c, t)| state.amplitude(&logical_ket(c, t)));
    let inside: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let leakage = (state.norm_sqr() - inside).max(T::zero());
    Ok(LogicalDecode { amplitudes, leakage })
}

/// How a gate run is post-selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Conditioning {
    /// The circuit's own detection rule: one photon at each ancilla-photon
    /// output and none at the vacuum-fed outputs.
    #[default]
    Heralded,
    /// Four-fold coincidence: one photon in each ancilla-photon output, one
    /// across each qubit's output pair; vacuum-fed outputs not inspected.
    Coincidence,
}

impl fmt::Display for Conditioning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conditioning::Heralded => "heralded",
            Conditioning::Coincidence => "coincidence",
        })
    }
}

impl std::str::FromStr for Conditioning {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "heralded" => Ok(Conditioning::Heralded),
            "coincidence" => Ok(Conditioning::Coincidence),
            other => Err(format!("unknown conditioning {other:?} (expected heralded or coincidence)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GateRun<T: Real> {
    /// Evolved state on all modes, before post-selection.
    pub output: FockStateVector<T>,
    /// Post-selected branch on the four qubit modes.
    pub outcome: ConditionalOutcome<T>,
    /// Decode of the normalized branch; `None` if the branch has probability zero.
    pub decode: Option<LogicalDecode<T>>,
}

/// Post-select an evolved CNOT state down to its four qubit modes.
pub fn postselect_qubits<T: Real>(
    circuit: &Circuit<T>,
    evolved: &FockStateVector<T>,
    conditioning: Conditioning,
) -> Result<ConditionalOutcome<T>> {
    match conditioning {
        Conditioning::Heralded => condition(evolved, &circuit.detection),
        Conditioning::Coincidence => {
            let mut pattern = DetectionPattern::new().group(vec![C_H, C_V], 1).group(vec![T_H, T_V], 1);
            for (&m, &k) in circuit.detection.per_mode.iter().filter(|(_, &k)| k > 0) {
                pattern = pattern.exact(m, k);
            }
            let first = condition(evolved, &pattern)?;
            // Drop the unexamined vacuum-fed outputs; photon-number conservation
            // leaves them empty whenever the coincidence fired.
            let mut rest = DetectionPattern::new();
            for (pos, m) in first.kept_modes.iter().enumerate() {
                if !super::QUBIT_MODES.contains(m) {
                    rest = rest.exact(pos, 0);
                }
            }
            let second = condition(&first.reduced_state, &rest)?;
            let kept_modes = second.kept_modes.iter().map(|&p| first.kept_modes[p]).collect();
            Ok(ConditionalOutcome { kept_modes, ..second })
        }
    }
}

/// Encode, evolve, post-select and decode one CNOT input.
pub fn run_gate<T: Real>(
    circuit: &Circuit<T>,
    input: &LogicalQubitPair<T>,
    conditioning: Conditioning,
) -> Result<GateRun<T>> {
    let output = evolve(&encode_logical(circuit, input)?, circuit)?;
    let outcome = postselect_qubits(circuit, &output, conditioning)?;
    let decode = outcome.normalized_state.as_ref().map(decode_logical).transpose()?;
    Ok(GateRun { output, outcome, decode })
}
