use openholo_core::holonomy::HolonomyError;
use openholo_core::jumps::JumpError;
use openholo_core::lindblad::LindbladError;
use openholo_core::robustness::RobustnessError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{module} engine error: {message}")]
    Engine { module: &'static str, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration problems, 3 for engine failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Engine { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<HolonomyError> for CliError {
    fn from(e: HolonomyError) -> Self {
        CliError::Engine {
            module: "holonomy",
            message: e.to_string(),
        }
    }
}

impl From<LindbladError> for CliError {
    fn from(e: LindbladError) -> Self {
        CliError::Engine {
            module: "lindblad",
            message: e.to_string(),
        }
    }
}

impl From<JumpError> for CliError {
    fn from(e: JumpError) -> Self {
        CliError::Engine {
            module: "jumps",
            message: e.to_string(),
        }
    }
}

impl From<RobustnessError> for CliError {
    fn from(e: RobustnessError) -> Self {
        CliError::Engine {
            module: "robustness",
            message: e.to_string(),
        }
    }
}

impl From<openholo_core::LinalgError> for CliError {
    fn from(e: openholo_core::LinalgError) -> Self {
        CliError::Engine {
            module: "linalg",
            message: e.to_string(),
        }
    }
}
