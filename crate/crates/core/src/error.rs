use thiserror::Error;

/// Errors surfaced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum DoaError {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Geometry construction could not satisfy its constraints.
    #[error("construction error: {0}")]
    Construction(String),

    /// An iterative solver produced non-finite values.
    #[error("solver diverged: {0}")]
    Divergence(String),

    /// Angle/amplitude recovery failed.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A pipeline stage failed; carries the stage name.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<DoaError>,
    },

    /// LAPACK backend failure.
    #[error("linear algebra error: {0}")]
    Linalg(String),
}

impl DoaError {
    pub fn domain(msg: impl Into<String>) -> Self {
        DoaError::Domain(msg.into())
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        DoaError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, DoaError>;

impl From<ndarray_linalg::error::LinalgError> for DoaError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        DoaError::Linalg(e.to_string())
    }
}
