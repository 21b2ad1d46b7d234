use thiserror::Error;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: zakotfs_core::Error,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        AppError::Config { line, msg: msg.into() }
    }

    pub fn numeric(context: impl Into<String>, source: zakotfs_core::Error) -> Self {
        AppError::Numeric {
            context: context.into(),
            source,
        }
    }

    /// Process exit status: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config { .. } => 2,
            AppError::Numeric { .. } | AppError::Io { .. } => 3,
        }
    }
}

/// Attaches a context string to core errors.
pub(crate) trait Context<T> {
    fn context(self, ctx: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for zakotfs_core::Result<T> {
    fn context(self, ctx: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| AppError::numeric(ctx(), e))
    }
}
