//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimensions do not match: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("metric ellipticity too degenerate for the solver: sup|q| = {sup_norm}")]
    DegenerateEllipticity { sup_norm: f64 },

    #[error("Beltrami iteration did not converge: residual {residual} after {iterations} iterations")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("degenerate image lattice: |Im kappa| = {im_kappa}")]
    DegenerateLattice { im_kappa: f64 },

    #[error("non-positive Jacobian at ({x1}, {x2}): J = {jac}")]
    OrientationError { x1: f64, x2: f64, jac: f64 },

    #[error("map inversion failed for target ({re}, {im}): residual {residual}")]
    InversionFailed { re: f64, im: f64, residual: f64 },

    #[error("pushforward failed at target sample ({x1}, {x2}): {reason}")]
    Pushforward { x1: f64, x2: f64, reason: String },

    #[error("weight field touches zero (min = {min})")]
    NonPositiveWeight { min: f64 },

    #[error("cutoff {cutoff} needs at least {needed} grid points per direction, grid has {actual}")]
    AliasingCutoff {
        cutoff: usize,
        needed: usize,
        actual: usize,
    },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("strip data not reflectable: {0}")]
    NotReflectable(String),

    #[error("invalid problem description: {0}")]
    Problem(String),

    #[error("pipeline stage '{stage}' failed")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<V> = std::result::Result<V, Error>;

impl Error {
    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &str) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }
}
