//! Scenario runner for the accelerated-ensemble master equation: config
//! parsing, parallel sweeps, CSV output and condensate design reports.

pub mod bec_design;
pub mod config;
pub mod output;
pub mod plan;
pub mod presets;
pub mod run;

use config::Diagnostic;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration:\n{}", list(.0))]
    Config(Vec<Diagnostic>),

    #[error(transparent)]
    Model(#[from] unruh_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

fn list(d: &[Diagnostic]) -> String {
    d.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

impl SimError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        SimError::Config(vec![Diagnostic {
            field: field.into(),
            message: message.into(),
        }])
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        SimError::Io {
            context: context.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for integration failures.
    pub fn exit_code(&self) -> i32 {
        use unruh_core::Error as E;
        match self {
            SimError::Config(_) => 2,
            SimError::Model(E::Integration { .. } | E::Numerical(_)) => 3,
            SimError::Model(_) => 2,
            SimError::Io { .. } => 1,
        }
    }
}
