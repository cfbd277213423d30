//! Report emission, error bodies and exit codes.

use std::path::Path;
use std::process::ExitCode;

use foptd_core::Error;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    kind: String,
    message: String,
    code: u8,
}

impl CliError {
    pub fn usage(message: &str) -> Self {
        CliError {
            kind: "Usage".into(),
            message: message.into(),
            code: EXIT_VALIDATION,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            kind: "Io".into(),
            message: format!("{}: {e}", path.display()),
            code: EXIT_VALIDATION,
        }
    }

    /// Print the JSON error body on stderr and map to the exit code.
    pub fn report(&self) -> ExitCode {
        let body = json!({
            "schema": SCHEMA_VERSION,
            "error": { "kind": self.kind, "message": self.message, "exit_code": self.code },
        });
        eprintln!("{body}");
        ExitCode::from(self.code)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            kind: e.kind().into(),
            message: e.to_string(),
            code: if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERICAL },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Wrap a command payload in the versioned envelope.
pub fn envelope(command: &str, payload: Value) -> Value {
    let mut out = json!({ "schema": SCHEMA_VERSION, "command": command });
    if let (Value::Object(dst), Value::Object(src)) = (&mut out, payload) {
        dst.extend(src);
    }
    out
}

/// Emit the JSON report to `json` (`-` is stdout), or the text summary to
/// stdout when no JSON destination is given.
pub fn emit(json_dest: Option<&str>, report: &Value, text: &str) -> CliResult<()> {
    let rendered = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match json_dest {
        Some("-") => print!("{rendered}"),
        Some(path) => {
            write_file(Path::new(path), &rendered)?;
            print!("{text}");
        }
        None => print!("{text}"),
    }
    Ok(())
}
