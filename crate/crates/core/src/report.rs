//! Structured report documents emitted by the command-line tool.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1.0";

/// Envelope around one command's results. Object keys serialize in sorted
/// order and floats in shortest round-trip form, so equal inputs give
/// byte-identical documents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub pass: bool,
}

impl ReportDocument {
    pub fn new(command: &str, inputs: &impl Serialize, results: &impl Serialize, pass: bool) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs: to_value(inputs)?,
            results: to_value(results)?,
            pass,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are JSON-representable");
        s.push('\n');
        s
    }

    /// `path = value` lines for every leaf, then the verdict.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        flatten("", &self.results, &mut out);
        out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        out
    }
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidArgument(format!("report serialization: {e}")))
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push_str(&format!("{prefix} = [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        leaf => out.push_str(&format!("{prefix} = {leaf}\n")),
    }
}
