//! Check reports: one struct feeding both the machine-readable JSON output
//! and the human rendering, so the two always agree.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub tolerance: f64,
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub certificate: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Report {
    pub fn new(command: &str, input: String, tolerance: f64) -> Self {
        Report { command: command.to_string(), input, tolerance, checks: Vec::new() }
    }

    pub fn push(&mut self, name: &str, verdict: impl ToString, certificate: Value) {
        self.checks.push(Check {
            name: name.to_string(),
            verdict: verdict.to_string(),
            certificate,
            note: None,
        });
    }

    pub fn push_with_note(
        &mut self,
        name: &str,
        verdict: impl ToString,
        certificate: Value,
        note: impl ToString,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            verdict: verdict.to_string(),
            certificate,
            note: Some(note.to_string()),
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} report for {}\n", self.command, self.input));
        out.push_str(&format!("tolerance: {}\n", self.tolerance));
        for c in &self.checks {
            out.push_str(&format!("  {:<22} {}", c.name, c.verdict));
            if !c.certificate.is_null() {
                out.push_str(&format!("  {}", compact(&c.certificate)));
            }
            if let Some(note) = &c.note {
                out.push_str(&format!("  ({note})"));
            }
            out.push('\n');
        }
        out
    }
}

/// Compact one-line rendering of a certificate for the human report;
/// matrices are elided to their dimensions.
fn compact(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let parts: Vec<String> = map
                .iter()
                .map(|(k, v)| match v {
                    Value::Array(rows) if !rows.is_empty() && rows.iter().all(|r| r.is_array()) => {
                        format!(
                            "{k}=<{}x{} matrix>",
                            rows.len(),
                            rows.first().map_or(0, |r| r.as_array().map_or(0, |a| a.len()))
                        )
                    }
                    Value::Object(inner)
                        if inner.contains_key("re") && inner.contains_key("im") =>
                    {
                        let n = inner["re"].as_array().map_or(0, |a| a.len());
                        format!("{k}=<{n}x{n} complex matrix>")
                    }
                    other => format!("{k}={other}"),
                })
                .collect();
            parts.join(" ")
        }
        other => other.to_string(),
    }
}

