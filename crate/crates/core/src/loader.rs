//! Circuit description files.
//!
//! ```json
//! {
//!   "n_modes": 3,
//!   "labels": ["s", "a", "v"],
//!   "elements": [
//!     {"a": "a", "b": "v", "eta": "eta13_ns", "grey": "b"},
//!     {"a": "a", "b": "s", "eta": "eta2_ns", "grey": "b"},
//!     {"a": "a", "b": "v", "eta": "eta13_ns", "grey": "b"}
//!   ],
//!   "ancilla_prep": {"a": 1, "v": 0},
//!   "detection": {"exact": {"a": 1, "v": 0}}
//! }
//! ```
//!
//! Modes are referenced by label or by index. `eta` is a number or one of the
//! tokens `eta2_ns`, `eta13_ns`, `eta2_biased`, `eta7_biased`. `grey` names
//! the port (`"a"` or `"b"`) whose reflection flips sign. Detection groups
//! are written `{"modes": [...], "total": n}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::circuit::{BeamsplitterElement, Circuit, Port};
use crate::error::{Error, Result};
use crate::fock::OccupationVector;
use crate::gates::closed_form;
use crate::postselect::DetectionPattern;
use crate::scalar::{lit, Real};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    n_modes: usize,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    elements: Vec<ElementSpec>,
    #[serde(default)]
    ancilla_prep: BTreeMap<String, u8>,
    #[serde(default)]
    detection: DetectionSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementSpec {
    a: ModeRef,
    b: ModeRef,
    eta: Reflectivity,
    grey: Port,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionSpec {
    #[serde(default)]
    exact: BTreeMap<String, u8>,
    #[serde(default)]
    groups: Vec<GroupSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpec {
    modes: Vec<ModeRef>,
    total: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ModeRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Reflectivity {
    Value(f64),
    Token(String),
}

/// Resolve a symbolic reflectivity token.
pub fn resolve_token<T: Real>(token: &str) -> Option<T> {
    match token {
        "eta2_ns" => Some(closed_form::eta2_ns()),
        "eta13_ns" => Some(closed_form::eta13_ns()),
        "eta2_biased" => Some(closed_form::eta2_biased()),
        "eta7_biased" => Some(closed_form::eta7_biased()),
        _ => None,
    }
}

struct Labels<'a>(&'a [String]);

impl Labels<'_> {
    fn index(&self, r: &ModeRef, at: &str) -> Result<usize> {
        match r {
            ModeRef::Index(i) => Ok(*i),
            ModeRef::Label(s) => self
                .0
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::InvalidCircuit(format!("{at}: unknown mode label {s:?}"))),
        }
    }

    fn key(&self, key: &str, at: &str) -> Result<usize> {
        match key.parse::<usize>() {
            Ok(i) if !self.0.iter().any(|l| l == key) => Ok(i),
            _ => self.index(&ModeRef::Label(key.to_string()), at),
        }
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    let message = e.to_string();
    // serde_json appends " at line L column C"; keep just the message
    let message = match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message,
    };
    Error::Parse { line: e.line(), column: e.column(), message }
}

/// Parse and validate a circuit description.
pub fn parse_circuit<T: Real>(text: &str) -> Result<Circuit<T>> {
    let file: CircuitFile = serde_json::from_str(text).map_err(parse_error)?;
    if file.n_modes == 0 {
        return Err(Error::InvalidCircuit("n_modes must be positive".into()));
    }
    let labels = file.labels.unwrap_or_else(|| (0..file.n_modes).map(|i| i.to_string()).collect());
    let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let mut circuit = Circuit::new(&label_refs);
    circuit.n_modes = file.n_modes;
    let names = Labels(&labels);

    for (i, el) in file.elements.iter().enumerate() {
        let at = format!("elements[{i}]");
        let eta = match &el.eta {
            Reflectivity::Value(v) => lit::<T>(*v),
            Reflectivity::Token(t) => resolve_token(t)
                .ok_or_else(|| Error::InvalidCircuit(format!("{at}.eta: unknown reflectivity token {t:?}")))?,
        };
        let mut element = BeamsplitterElement::new(names.index(&el.a, &at)?, names.index(&el.b, &at)?, eta, el.grey);
        element.label = el.label.clone();
        circuit.push(element);
    }

    let mut prep = Vec::new();
    for (key, &count) in &file.ancilla_prep {
        prep.push((names.key(key, "ancilla_prep")?, count));
    }
    prep.sort_unstable();
    circuit.ancilla_modes = prep.iter().map(|&(m, _)| m).collect();
    circuit.ancilla_preparation = OccupationVector::new(prep.iter().map(|&(_, k)| k).collect::<Vec<u8>>());

    let mut detection = DetectionPattern::new();
    for (key, &count) in &file.detection.exact {
        detection = detection.exact(names.key(key, "detection.exact")?, count);
    }
    for (g, group) in file.detection.groups.iter().enumerate() {
        let at = format!("detection.groups[{g}]");
        let modes = group.modes.iter().map(|r| names.index(r, &at)).collect::<Result<Vec<_>>>()?;
        detection = detection.group(modes, group.total);
    }
    circuit.detection = detection;

    circuit.validate().into_result()?;
    Ok(circuit)
}

pub fn load_circuit<T: Real>(path: &Path) -> Result<Circuit<T>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_circuit(&text)
}
