use serde::Serialize;
use sha2::{Digest, Sha256};
use unibraid::report::{Check, Report};

use crate::Format;

pub const TOOL: &str = "unibraid";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A named text block produced by a command, e.g. a series.
#[derive(Clone, Debug, Serialize)]
pub struct Artifact {
    pub name: String,
    pub text: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: &'static str,
    /// `sha256:<hex>` of the workspace bytes, if a workspace was read.
    pub input_digest: Option<String>,
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

#[derive(Serialize)]
struct Document<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input_digest: Option<&'a str>,
    checks: &'a [Check],
    artifacts: &'a [Artifact],
}

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn render(o: &Outcome, format: Format) -> String {
    match format {
        Format::Machine => {
            let doc = Document {
                tool: TOOL,
                version: VERSION,
                command: o.command,
                input_digest: o.input_digest.as_deref(),
                checks: &o.report.checks,
                artifacts: &o.artifacts,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("{TOOL} {VERSION} {}\n", o.command);
            if let Some(d) = &o.input_digest {
                s.push_str(&format!("input {d}\n"));
            }
            for c in &o.report.checks {
                s.push_str(&format!("{c}\n"));
            }
            let failed = o.report.failures().count();
            s.push_str(&format!("{} checks, {failed} failed\n", o.report.checks.len()));
            for a in &o.artifacts {
                s.push_str(&format!("\n== {} ==\n{}", a.name, a.text));
                if !a.text.ends_with('\n') {
                    s.push('\n');
                }
            }
            s
        }
    }
}
