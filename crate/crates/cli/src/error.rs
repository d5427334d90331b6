use rrm_core::analytic::AnalyticError;
use rrm_core::homogenization::HomogenizationError;
use rrm_core::simulator::SimError;
use rrm_core::units::UnitsError;
use thiserror::Error;

/// Failure of a CLI run. Each variant owns one process exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    StepTooLarge(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::StepTooLarge(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Config(_) => "config",
            CliError::StepTooLarge(_) => "step-too-large",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// `error code=<n> kind=<kind> message="<text>"` on one line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
        format!("error code={} kind={} message=\"{}\"", self.exit_code(), self.kind(), msg)
    }

    /// Prefix the message with the sweep point or file it came from.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{ctx}: {m}")),
            CliError::StepTooLarge(m) => CliError::StepTooLarge(format!("{ctx}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{ctx}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{ctx}: {m}")),
        }
    }
}

impl From<UnitsError> for CliError {
    fn from(e: UnitsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<HomogenizationError> for CliError {
    fn from(e: HomogenizationError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::NotReal { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::StepTooLarge { .. } => CliError::StepTooLarge(e.to_string()),
            SimError::Quadrature(_) => CliError::Numerical(e.to_string()),
            SimError::InvalidConfig(_) | SimError::Params(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
