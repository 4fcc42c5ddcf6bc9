use std::fs;
use std::io::Write;
use std::path::Path;

use a2a_core::Error;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    message: String,
    detail: Option<Value>,
    code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: "usage", message: message.into(), detail: None, code: EXIT_INVALID }
    }

    /// A check over user input that did not pass.
    pub fn check(kind: &'static str, detail: Value) -> Self {
        CliError { kind, message: format!("{kind} check failed"), detail: Some(detail), code: EXIT_INVALID }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }

    pub fn to_json(&self) -> String {
        let mut err = json!({ "kind": self.kind, "message": self.message });
        if let Some(d) = &self.detail {
            err["detail"] = d.clone();
        }
        json!({ "error": err }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (kind, detail, code) = match &e {
            Error::InvalidParams(_) => ("invalidParams", None, EXIT_INVALID),
            Error::InvalidTraffic(_) => ("invalidTraffic", None, EXIT_INVALID),
            Error::InvalidTopology(_) => ("invalidTopology", None, EXIT_INVALID),
            Error::InvalidPath { src, dst, .. } => ("invalidPath", Some(json!({ "src": src, "dst": dst })), EXIT_INVALID),
            Error::InvalidCostModel(_) => ("invalidCostModel", None, EXIT_INVALID),
            Error::Asymmetric => ("asymmetric", None, EXIT_INVALID),
            Error::Unserved { src, dst } => ("unserved", Some(json!({ "src": src, "dst": dst })), EXIT_INVALID),
            Error::Contention { stage, round, violations } => {
                ("contention", Some(json!({ "stage": stage, "round": round, "violations": violations })), EXIT_INVALID)
            }
            Error::Conservation { src, dst, served, demanded } => (
                "conservation",
                Some(json!({ "src": src, "dst": dst, "served": served, "demanded": demanded })),
                EXIT_INVALID,
            ),
            Error::Unsupported(_) => ("unsupported", None, EXIT_INVALID),
            Error::Json(_) => ("json", None, EXIT_INVALID),
            Error::Deadlock { pending } => ("deadlock", Some(json!({ "pending": pending })), EXIT_INTERNAL),
        };
        CliError { kind, message, detail, code }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { kind: "json", message: e.to_string(), detail: None, code: EXIT_INVALID }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { kind: "io", message: e.to_string(), detail: None, code: EXIT_INVALID }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        // Validation failures inside `try_from` surface as serde messages.
        CliError { kind: "invalidInput", message: format!("{}: {e}", path.display()), detail: None, code: EXIT_INVALID }
    })
}

/// Writes `text` to `path` via a sibling temporary file and a rename, or to
/// stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        if !text.ends_with('\n') {
            out.write_all(b"\n")?;
        }
        return Ok(());
    };
    let name = path.file_name().ok_or_else(|| CliError::usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
