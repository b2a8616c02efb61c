//! Monte Carlo check of the adversarial deviation lower bound under
//! consensus-only dynamics, and a runtime probe for MaxSpAN-FL.

pub mod complexity;
pub mod lemma;

use thiserror::Error;

pub use complexity::{complexity_probe, loglog_slope, ComplexityReport, ComplexityRow};
pub use lemma::{
    circulant, consensus_only_step, max_spread_set, lemma1_sides, verify_lemma1, LemmaRow, LemmaScenario,
    LemmaSides, LeastSquares,
};

use crate::{GraphError, PlacementError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("graph is not symmetric")]
    NotSymmetric,
    #[error("graph is not regular (degrees {min}..={max})")]
    NotRegular { min: usize, max: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
}
