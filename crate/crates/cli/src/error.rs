use csns_core::CsnsError;
use serde_json::json;

/// A failed invocation, mapped onto the documented exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// The configuration was rejected before any compute; lists every violated gate.
    Config { violations: Vec<String> },
    /// A computation failed; artifacts written so far are kept.
    Compute {
        stage: String,
        kind: String,
        message: String,
    },
    /// The run finished but some invariant gates failed.
    Gate { failed: Vec<String> },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            violations: vec![message.into()],
        }
    }

    pub fn compute(stage: &str, err: CsnsError) -> Self {
        CliError::Compute {
            stage: stage.to_string(),
            kind: err.kind().to_string(),
            message: err.to_string(),
        }
    }

    pub fn io(stage: &str, err: std::io::Error) -> Self {
        Self::compute(stage, CsnsError::Io(err))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Compute { .. } => 3,
            CliError::Gate { .. } => 4,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let body = match self {
            CliError::Config { violations } => json!({
                "category": "config",
                "violations": violations,
            }),
            CliError::Compute {
                stage,
                kind,
                message,
            } => json!({
                "category": "compute",
                "stage": stage,
                "kind": kind,
                "message": message,
            }),
            CliError::Gate { failed } => json!({
                "category": "invariant_gate",
                "failed": failed,
            }),
        };
        let mut body = body;
        body["exit_code"] = json!(self.exit_code());
        json!({ "error": body })
    }
}

/// Adapter for `map_err` on core results.
pub fn at(stage: &'static str) -> impl Fn(CsnsError) -> CliError {
    move |e| CliError::compute(stage, e)
}

pub type CliResult<T> = std::result::Result<T, CliError>;
