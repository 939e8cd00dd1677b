//! Reduction of 2D periodic elliptic operators to constant-metric form and
//! Floquet-Bloch band computation.
//!
//! The pipeline: validate a periodic metric, convert it to a Beltrami
//! coefficient, solve the periodic Beltrami equation for the isothermal map,
//! renormalize the image lattice, push the remaining coefficients forward,
//! and compute band structures of the resulting fiber operators. Strip
//! problems with Dirichlet/Neumann/Robin conditions reduce to doubled
//! periodic problems by reflection.

pub mod beltrami;
pub mod eig;
pub mod error;
pub mod floquet;
pub mod fft;
pub mod grid;
pub mod io;
pub mod isomap;
pub mod metric;
pub mod oracles;
pub mod presets;
pub mod pipeline;
pub mod pushforward;
pub mod strip;

mod interp;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{cast, rabs, Scalar};

/// Concrete aliases for double-precision work (the CLI uses these).
pub mod f64_types {
    pub type MetricField = crate::metric::MetricField<f64>;
    pub type BeltramiCoefficient = crate::metric::BeltramiCoefficient<f64>;
    pub type IsothermalMap = crate::beltrami::IsothermalMap<f64>;
    pub type SolverConfig = crate::beltrami::SolverConfig<f64>;
    pub type MapEvaluator = crate::isomap::MapEvaluator<f64>;
    pub type RenormalizedMap = crate::isomap::RenormalizedMap<f64>;
    pub type CoefficientSet = crate::pushforward::CoefficientSet<f64>;
    pub type FiberOperator = crate::floquet::FiberOperator<f64>;
    pub type BandStructure = crate::floquet::BandStructure<f64>;
    pub type StripProblem = crate::strip::StripProblem<f64>;
    pub type DoubledProblem = crate::strip::DoubledProblem<f64>;
    pub type ProblemSpec = crate::pipeline::ProblemSpec;
    pub type RunReport = crate::pipeline::RunReport;
}
