//! Exact checks on classical deterministic schemes: query functions as
//! multilinear polynomials, linear independence of the products `Phi(S)`, an
//! exhaustive scheme search for tiny parameters, and coin fixing for randomized
//! one-probe schemes.

mod derandomize;
mod independence;
mod polynomial;
mod search;

pub use derandomize::{derandomize, CoinBudget, DerandomizeResult, DerandomizeStatus};
pub use independence::{
    degree_bound_check, exact_rank, independence_check, phi_product, DegreeReport,
    DisjunctiveScheme, IndependenceReport, QueryFunctions, MAX_RANK_ROWS, MAX_RANK_VARS,
};
pub use polynomial::{tree_to_polynomial, FunctionTable, MultilinearPolynomial, MAX_POLYNOMIAL_VARS};
pub use search::{
    depth_bounded_functions, exhaustive_search, ExplicitScheme, SearchCertificate, SearchConfig,
    SearchOutcome, HARD_MAX_SPACE, HARD_MAX_UNIVERSE,
};

use thiserror::Error;

use crate::classical::SchemeError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum VerifierError {
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
