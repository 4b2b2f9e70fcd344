//! Gate constructors: the NS gate (full and biased), the two-NS CNOT and the
//! simplified CNOT built from biased NS gates.
//!
//! Mode layout of both CNOT circuits is `c_H, c_V, t_H, t_V` followed by four
//! ancilla modes. Splitters reuse mode indices, so between the entry and exit
//! splitters index 1 carries the first interferometer arm, index 2 the second
//! arm and index 3 the idle target arm. The interior cuts are read on modes 0..4.

mod logical;
mod ns;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::circuit::{BeamsplitterElement, Circuit, Port};
use crate::error::{Error, Result};
use crate::fock::OccupationVector;
use crate::postselect::DetectionPattern;
use crate::scalar::{lit, Real};

pub use logical::{
    decode_logical, encode_logical, logical_ket, postselect_qubits, run_gate, Conditioning, GateRun, Logical, LogicalDecode, LogicalQubitPair,
    BASIS_INPUTS,
};
pub use ns::{
    biased_balance_residuals, biased_ns_amplitudes, closed_form, newton_2d, ns_balance_residuals,
    ns_conditional_map, ns_success_amplitude_vacuum, solve_biased_ns, solve_optimal_ns, BiasedNsParameters,
    BiasedSolution, NsParameters, NumericNsOptimum, OptimalNs,
};

pub const C_H: usize = 0;
pub const C_V: usize = 1;
pub const T_H: usize = 2;
pub const T_V: usize = 3;
pub const A1: usize = 4;
pub const A2: usize = 5;
/// Vacuum ancilla of the first NS gate (v₁), or of B7 in the simplified gate.
pub const V1: usize = 6;
/// Vacuum ancilla of the second NS gate (v₂), or of B8 in the simplified gate.
pub const V2: usize = 7;

/// Qubit modes of both CNOT layouts.
pub const QUBIT_MODES: [usize; 4] = [C_H, C_V, T_H, T_V];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    Ns,
    NsBiased,
    Cnot,
    CnotSimplified,
}

impl GateKind {
    pub const ALL: [GateKind; 4] = [GateKind::Ns, GateKind::NsBiased, GateKind::Cnot, GateKind::CnotSimplified];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Ns => "ns",
            GateKind::NsBiased => "ns-biased",
            GateKind::Cnot => "cnot",
            GateKind::CnotSimplified => "cnot-simplified",
        }
    }

    pub fn is_cnot(self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::CnotSimplified)
    }

    /// Circuit at the solved reflectivities.
    pub fn build<T: Real>(self) -> Circuit<T> {
        match self {
            GateKind::Ns => build_ns_circuit(&NsParameters::optimal()),
            GateKind::NsBiased => build_biased_ns_circuit(&BiasedNsParameters::balanced()),
            GateKind::Cnot => build_cnot_circuit(&NsParameters::optimal()),
            GateKind::CnotSimplified => build_simplified_cnot(),
        }
    }

    /// Number of elements before the cut, for the cuts this gate defines.
    pub fn cut_position(self, cut: Cut) -> Result<usize> {
        match (self, cut) {
            (GateKind::Cnot, Cut::X) => Ok(CNOT_CUT_X),
            (GateKind::Cnot, Cut::Y) => Ok(CNOT_CUT_Y),
            (GateKind::CnotSimplified, Cut::Z) => Ok(SIMPLIFIED_CUT_Z),
            _ => Err(Error::UnknownCut { gate: self.name().into(), cut: cut.to_string() }),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| Error::UnknownGate(s.into()))
    }
}

/// Interior cut positions: `x` before the NS gates, `y` after them, `z` after
/// the biased-NS splitters of the simplified gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cut {
    X,
    Y,
    Z,
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cut::X => "x",
            Cut::Y => "y",
            Cut::Z => "z",
        })
    }
}

impl FromStr for Cut {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Cut::X),
            "y" => Ok(Cut::Y),
            "z" => Ok(Cut::Z),
            other => Err(Error::UnknownCut { gate: "any".into(), cut: other.into() }),
        }
    }
}

const CNOT_CUT_X: usize = 2;
const CNOT_CUT_Y: usize = 8;
const SIMPLIFIED_CUT_Z: usize = 6;

fn half<T: Real>() -> T {
    lit(0.5)
}

/// Append the three splitters of an NS gate acting on `signal`, with the
/// photon-fed ancilla `anc` and the vacuum ancilla `vac`.
fn push_ns<T: Real>(c: &mut Circuit<T>, p: &NsParameters<T>, signal: usize, anc: usize, vac: usize, name: &str) {
    c.push(BeamsplitterElement::new(anc, vac, p.eta1, Port::B).labelled(format!("{name}.eta1")));
    c.push(BeamsplitterElement::new(anc, signal, p.eta2, Port::B).labelled(format!("{name}.eta2")));
    c.push(BeamsplitterElement::new(anc, vac, p.eta3, Port::B).labelled(format!("{name}.eta3")));
}

/// Three-mode NS gate on `(signal, a, v)`: photon in `a`, vacuum in `v`,
/// heralded by one photon at `a` and none at `v`.
pub fn build_ns_circuit<T: Real>(p: &NsParameters<T>) -> Circuit<T> {
    let mut c = Circuit::new(&["s", "a", "v"]);
    push_ns(&mut c, p, 0, 1, 2, "NS");
    c.ancilla_modes = vec![1, 2];
    c.ancilla_preparation = OccupationVector::from([1, 0]);
    c.detection = DetectionPattern::new().exact(1, 1).exact(2, 0);
    c
}

/// Biased NS gate on `(signal, a, v7)`: vacuum-fed η7 splitter on the signal,
/// then a single η2 splitter against the ancilla photon.
pub fn build_biased_ns_circuit<T: Real>(p: &BiasedNsParameters<T>) -> Circuit<T> {
    let mut c = Circuit::new(&["s", "a", "v7"]);
    c.push(BeamsplitterElement::new(0, 2, p.eta7, Port::B).labelled("B7"));
    c.push(BeamsplitterElement::new(1, 0, p.eta2, Port::B).labelled("NS.eta2"));
    c.ancilla_modes = vec![1, 2];
    c.ancilla_preparation = OccupationVector::from([1, 0]);
    c.detection = DetectionPattern::new().exact(1, 1).exact(2, 0);
    c
}

fn cnot_frame<T: Real>(vacuum_labels: [&str; 2]) -> Circuit<T> {
    let mut c = Circuit::new(&["c_H", "c_V", "t_H", "t_V", "a1", "a2", vacuum_labels[0], vacuum_labels[1]]);
    c.ancilla_modes = vec![A1, A2, V1, V2];
    c.ancilla_preparation = OccupationVector::from([1, 1, 0, 0]);
    c.detection = DetectionPattern::new().exact(A1, 1).exact(A2, 1).exact(V1, 0).exact(V2, 0);
    c
}

/// 50:50 splitter, grey on `b`: `out_a = (a + b)/√2`, `out_b = (a - b)/√2`.
fn balanced<T: Real>(a: usize, b: usize, name: &str) -> BeamsplitterElement<T> {
    BeamsplitterElement::new(a, b, half(), Port::B).labelled(name)
}

/// Two-NS CNOT. Splitter signs:
/// `t' = (t_H + t_V)/√2`, `t''' = (t_H - t_V)/√2`;
/// `d1 = (c_V + t')/√2`, `d2 = (c_V - t')/√2`;
/// `c_Vo = (d1' + d2')/√2`, `t'' = (d1' - d2')/√2`;
/// `t_Ho = (t'' + t''')/√2`, `t_Vo = (t'' - t''')/√2`.
pub fn build_cnot_circuit<T: Real>(p: &NsParameters<T>) -> Circuit<T> {
    build_cnot_variant(p, true)
}

/// The CNOT without the two target splitters, which acts as a controlled sign shift.
pub fn build_sign_shift_circuit<T: Real>(p: &NsParameters<T>) -> Circuit<T> {
    build_cnot_variant(p, false)
}

fn build_cnot_variant<T: Real>(p: &NsParameters<T>, target_splitters: bool) -> Circuit<T> {
    let mut c = cnot_frame(["v1", "v2"]);
    if target_splitters {
        c.push(balanced(T_H, T_V, "B4"));
    }
    c.push(balanced(C_V, T_H, "B3"));
    push_ns(&mut c, p, C_V, A1, V1, "NS1");
    push_ns(&mut c, p, T_H, A2, V2, "NS2");
    c.push(balanced(C_V, T_H, "B2"));
    if target_splitters {
        c.push(balanced(T_H, T_V, "B1"));
    }
    c
}

/// Simplified CNOT at the balanced biased-NS reflectivities.
pub fn build_simplified_cnot<T: Real>() -> Circuit<T> {
    build_simplified_cnot_with(&BiasedNsParameters::balanced())
}

/// Simplified CNOT: B5/B6 (η2) against the ancilla photons replace the NS
/// gates, B7 on `c_V` and B8 on `t'` (η7) are fed by vacuum modes `v7`, `v8`.
pub fn build_simplified_cnot_with<T: Real>(p: &BiasedNsParameters<T>) -> Circuit<T> {
    let mut c = cnot_frame(["v7", "v8"]);
    c.push(balanced(T_H, T_V, "B4"));
    c.push(BeamsplitterElement::new(C_V, V1, p.eta7, Port::B).labelled("B7"));
    c.push(BeamsplitterElement::new(T_H, V2, p.eta7, Port::B).labelled("B8"));
    c.push(balanced(C_V, T_H, "B3"));
    c.push(BeamsplitterElement::new(A1, C_V, p.eta2, Port::B).labelled("B5"));
    c.push(BeamsplitterElement::new(A2, T_H, p.eta2, Port::B).labelled("B6"));
    c.push(balanced(C_V, T_H, "B2"));
    c.push(balanced(T_H, T_V, "B1"));
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::compose_transfer_matrix;
    use crate::evolution::evolve;
    use crate::fock::FockStateVector;
    use crate::postselect::condition;

    fn ns_amplitude(c: &Circuit<f64>, n: u8) -> (f64, f64) {
        let input = FockStateVector::basis(c.input_occupation(&[n]).unwrap());
        let out = condition(&evolve(&input, c).unwrap(), &c.detection).unwrap();
        (out.reduced_state.amplitude(&[n].into()).re, out.success_probability)
    }

    #[test]
    fn ns_circuit_reproduces_map() {
        let c = build_ns_circuit(&NsParameters::<f64>::optimal());
        let (l0, p0) = ns_amplitude(&c, 0);
        assert!((l0 - 0.5).abs() < 1e-12);
        assert!((p0 - 0.25).abs() < 1e-12);
        assert!((ns_amplitude(&c, 1).0 - 0.5).abs() < 1e-12);
        assert!((ns_amplitude(&c, 2).0 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ns_circuit_degenerate_outer_splitters() {
        let p = NsParameters::new(1.0, 0.3, 1.0).unwrap();
        let c = build_ns_circuit(&p);
        let expected = ns_conditional_map(&p);
        for n in 0..3u8 {
            assert!((ns_amplitude(&c, n).0 - expected[n as usize]).abs() < 1e-12);
        }
    }

    #[test]
    fn biased_ns_circuit_matches_amplitudes() {
        for (eta2, eta7) in [(0.3, 0.6), (0.1, 1.0)] {
            let p = BiasedNsParameters::new(eta2, eta7).unwrap();
            let c = build_biased_ns_circuit(&p);
            let expected = biased_ns_amplitudes(&p);
            for n in 0..3u8 {
                assert!((ns_amplitude(&c, n).0 - expected[n as usize]).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn cnot_control_h_row_is_untouched() {
        let u = compose_transfer_matrix(&build_cnot_circuit(&NsParameters::<f64>::optimal())).unwrap();
        for j in 0..8 {
            let expected = if j == C_H { 1.0 } else { 0.0 };
            assert!((u[(C_H, j)].re - expected).abs() < 1e-15 && u[(C_H, j)].im == 0.0);
            assert!((u[(j, C_H)].re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn circuits_validate() {
        for g in GateKind::ALL {
            assert!(g.build::<f64>().validate().is_valid(), "{g}");
        }
        assert!(build_sign_shift_circuit(&NsParameters::<f64>::optimal()).validate().is_valid());
        assert_eq!(build_simplified_cnot::<f64>().elements.len(), 8);
    }

    #[test]
    fn gate_names_round_trip() {
        for g in GateKind::ALL {
            assert_eq!(g.name().parse::<GateKind>().unwrap(), g);
        }
        assert!(matches!("toffoli".parse::<GateKind>(), Err(Error::UnknownGate(_))));
        assert!(GateKind::Cnot.cut_position(Cut::Z).is_err());
        assert!(GateKind::CnotSimplified.cut_position(Cut::X).is_err());
    }
}
