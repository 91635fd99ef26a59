//! Storage and query schemes in the classical bit-probe model.
//!
//! A scheme stores a set as a [`BitTable`] of fixed length `s` and answers
//! `is q in S?` by probing table bits. Deterministic schemes expose their
//! per-query [`DecisionTree`]; randomized one-probe schemes expose their coin
//! space through [`CoinScheme`] so they can be amplified and derandomized.

mod bench;
mod bitvector;
mod descriptor;
mod oneprobe;
mod perfect_hash;
mod table;
mod tree;

pub use bench::{empirical_error, ErrorEstimate};
pub use bitvector::{bitvector_build, BitVectorScheme};
pub use descriptor::SchemeDescriptor;
pub use oneprobe::{
    amplify, oneprobe_random_build, AmplifiedScheme, OneProbeConfig, RandomizedOneProbeScheme,
};
pub use perfect_hash::{
    perfect_hash_build, PerfectHashLayout, PerfectHashScheme, EXHAUSTIVE_CHECK_LIMIT, PROBE_CONSTANT,
    RETRY_BUDGET, SPACE_CONSTANT,
};
pub use table::BitTable;
pub use tree::DecisionTree;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MembershipInstance, ModelError, SchemeParams};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),
    #[error("instance does not match the scheme: {0}")]
    InstanceMismatch(String),
    #[error("query {query} outside universe of size {universe}")]
    QueryOutOfRange { query: usize, universe: usize },
    #[error("table has {actual} bits, scheme expects {expected}")]
    TableLength { expected: usize, actual: usize },
    #[error("hash search exhausted {attempts} seeds at level {level}; reseed and retry")]
    RetryBudgetExhausted { level: u8, attempts: usize },
    #[error("built scheme answers query {query} incorrectly")]
    Inexact { query: usize },
    #[error("malformed input: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Bitvector,
    Oneprobe,
    Amplified,
    PerfectHash,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Answer {
    pub present: bool,
    pub probes: usize,
}

/// A storage scheme together with a (possibly randomized) query procedure.
pub trait MembershipScheme {
    fn kind(&self) -> SchemeKind;
    fn params(&self) -> &SchemeParams;
    fn store(&self, instance: &MembershipInstance) -> Result<BitTable, SchemeError>;
    fn query(
        &self,
        table: &BitTable,
        q: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Answer, SchemeError>;
}

/// A scheme whose query for each element is a fixed decision tree.
pub trait DeterministicScheme {
    fn universe_size(&self) -> usize;
    fn capacity(&self) -> usize;
    fn space(&self) -> usize;
    /// Maximum depth over all query trees.
    fn depth(&self) -> usize;
    /// The stored table for a sorted member list with at most `capacity` elements.
    fn store_set(&self, members: &[usize]) -> Result<BitTable, SchemeError>;
    fn query_tree(&self, q: usize) -> DecisionTree;
}

/// A randomized query whose randomness is a tuple of `coin_count` coins, each uniform in
/// `0..coin_arity`. Fixing the coins yields a deterministic query.
pub trait CoinScheme {
    fn universe_size(&self) -> usize;
    fn capacity(&self) -> usize;
    fn space(&self) -> usize;
    fn coin_arity(&self) -> usize;
    fn coin_count(&self) -> usize;
    fn store_set(&self, members: &[usize]) -> Result<BitTable, SchemeError>;
    fn answer_with_coins(&self, table: &BitTable, q: usize, coins: &[usize]) -> bool;
}

pub(crate) fn check_query(q: usize, universe: usize) -> Result<(), SchemeError> {
    if q >= universe {
        return Err(SchemeError::QueryOutOfRange { query: q, universe });
    }
    Ok(())
}

pub(crate) fn check_table(table: &BitTable, expected: usize) -> Result<(), SchemeError> {
    if table.len() != expected {
        return Err(SchemeError::TableLength { expected, actual: table.len() });
    }
    Ok(())
}

pub(crate) fn check_instance(
    instance: &MembershipInstance,
    params: &SchemeParams,
) -> Result<(), SchemeError> {
    if instance.universe_size() != params.universe_size {
        return Err(SchemeError::InstanceMismatch(format!(
            "universe {} vs scheme universe {}",
            instance.universe_size(),
            params.universe_size
        )));
    }
    if instance.members().len() > params.capacity {
        return Err(SchemeError::InstanceMismatch(format!(
            "{} members exceed scheme capacity {}",
            instance.members().len(),
            params.capacity
        )));
    }
    Ok(())
}

pub(crate) fn check_members(
    members: &[usize],
    universe: usize,
    capacity: usize,
) -> Result<(), SchemeError> {
    if members.len() > capacity {
        return Err(SchemeError::InstanceMismatch(format!(
            "{} members exceed capacity {capacity}",
            members.len()
        )));
    }
    if members.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SchemeError::InstanceMismatch("members must be strictly increasing".into()));
    }
    if let Some(&last) = members.last() {
        check_query(last, universe)?;
    }
    Ok(())
}
