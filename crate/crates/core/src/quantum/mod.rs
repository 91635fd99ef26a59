//! Dense state-vector simulator of quantum bit-probe query schemes.
//!
//! Basis states are `|j, b, z>` with address `j < s`, data bit `b` and work index
//! `z < Z`, stored at index `(2j + b) Z + z`. The oracle for table `x` is the
//! diagonal phase `(-1)^{b x_j}`. A scheme with `t` probes is a list of layers
//! `U_0 .. U_t` and composes into `W_x = U_t O_x U_{t-1} ... O_x U_0`. The answer
//! to a query is the lowest bit of `z` after measuring `W_x |q>`.

mod encode;
mod file;
mod gram;
mod parity;
mod random;
mod rank;

pub use encode::{encode_classical_as_quantum, EncodeOptions};
pub use file::{scheme_from_json, scheme_to_json};
pub use gram::{gram_from_states, gram_matrix, synthetic_overlap_state, tensor_exponent, GramReport};
pub use parity::{parity_decompose, ParityDecomposition, MAX_PARITY_SPACE};
pub use rank::{tensor_power_rank, RankReport, DEFAULT_RANK_TOLERANCE, MAX_FLATTENED_LEN, MAX_RANK_SETS};
pub use random::{random_scheme, random_unitary};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::classical::{BitTable, SchemeError};
use crate::model::ModelError;

pub type C64 = nalgebra::Complex<f64>;

/// Largest deviation `|U^dagger U - I|_max` accepted for a layer.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("layer {layer} is not unitary (deviation {deviation:.3e})")]
    NotUnitary { layer: usize, deviation: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("query {0} has no embedded basis state")]
    Unembedded(usize),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed scheme file: {0}")]
    Format(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub address_count: usize,
    pub work_size: usize,
}

impl RegisterLayout {
    pub fn new(address_count: usize, work_size: usize) -> Result<Self, QuantumError> {
        if address_count == 0 || work_size < 2 {
            return Err(QuantumError::InvalidScheme(format!(
                "need s >= 1 and Z >= 2 (got s={address_count}, Z={work_size})"
            )));
        }
        Ok(Self { address_count, work_size })
    }

    pub fn dimension(&self) -> usize {
        self.address_count * 2 * self.work_size
    }

    pub fn index(&self, address: usize, data: usize, work: usize) -> usize {
        (address * 2 + data) * self.work_size + work
    }

    /// `(address, data bit, work index)` of a basis index.
    pub fn decode(&self, index: usize) -> (usize, usize, usize) {
        let z = index % self.work_size;
        let rest = index / self.work_size;
        (rest / 2, rest % 2, z)
    }

    pub fn output_bit(&self, index: usize) -> bool {
        index % self.work_size % 2 == 1
    }

    /// Basis states usable as query inputs: data bit 0 and output bit 0, in index order.
    pub fn query_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dimension()).filter(|&i| {
            let (_, b, z) = self.decode(i);
            b == 0 && z % 2 == 0
        })
    }

    /// The first `m` query states.
    pub fn default_embedding(&self, m: usize) -> Result<Vec<usize>, QuantumError> {
        let available = self.address_count * self.work_size / 2;
        if m > available {
            return Err(QuantumError::InvalidScheme(format!(
                "universe of size {m} does not fit the {available} query states of this layout"
            )));
        }
        Ok(self.query_states().take(m).collect())
    }
}

/// The diagonal of the phase oracle for one table.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpec {
    pub table: BitTable,
    pub diagonal: Vec<f64>,
}

impl OracleSpec {
    pub fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.diagonal.len(),
            self.diagonal.iter().map(|&d| C64::new(d, 0.0)),
        ))
    }

    /// `O M`, scaling rows by the diagonal.
    pub fn apply_left(&self, m: &mut DMatrix<C64>) {
        for (i, &d) in self.diagonal.iter().enumerate() {
            if d < 0.0 {
                m.row_mut(i).neg_mut();
            }
        }
    }
}

pub fn oracle_matrix(table: &BitTable, layout: &RegisterLayout) -> Result<OracleSpec, QuantumError> {
    if table.len() != layout.address_count {
        return Err(QuantumError::DimensionMismatch(format!(
            "table of {} bits for {} addresses",
            table.len(),
            layout.address_count
        )));
    }
    let diagonal = (0..layout.dimension())
        .map(|i| {
            let (j, b, _) = layout.decode(i);
            if b == 1 && table.get(j) {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    Ok(OracleSpec { table: table.clone(), diagonal })
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - DMatrix::<C64>::identity(n, n)))
}

#[derive(Clone, Debug)]
pub struct QuantumScheme {
    layout: RegisterLayout,
    layers: Vec<DMatrix<C64>>,
    embedding: Vec<usize>,
}

impl QuantumScheme {
    /// Validates dimensions, unitarity of every layer, and the query embedding.
    pub fn new(
        layout: RegisterLayout,
        layers: Vec<DMatrix<C64>>,
        embedding: Vec<usize>,
    ) -> Result<Self, QuantumError> {
        let d = layout.dimension();
        if layers.is_empty() {
            return Err(QuantumError::InvalidScheme("a scheme needs at least U_0".into()));
        }
        for (k, u) in layers.iter().enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(QuantumError::DimensionMismatch(format!(
                    "layer {k} is {}x{}, layout dimension is {d}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            let deviation = unitarity_deviation(u);
            if !(deviation <= UNITARITY_TOLERANCE) {
                return Err(QuantumError::NotUnitary { layer: k, deviation });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (q, &e) in embedding.iter().enumerate() {
            if e >= d {
                return Err(QuantumError::InvalidScheme(format!("query {q} embedded outside the space")));
            }
            let (_, b, z) = layout.decode(e);
            if b != 0 || z % 2 != 0 {
                return Err(QuantumError::InvalidScheme(format!(
                    "query {q} must embed with data bit 0 and output bit 0"
                )));
            }
            if !seen.insert(e) {
                return Err(QuantumError::InvalidScheme(format!("query {q} shares its basis state")));
            }
        }
        Ok(Self { layout, layers, embedding })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn layers(&self) -> &[DMatrix<C64>] {
        &self.layers
    }

    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn probes(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn universe_size(&self) -> usize {
        self.embedding.len()
    }

    pub fn dimension(&self) -> usize {
        self.layout.dimension()
    }

    fn embedded(&self, q: usize) -> Result<usize, QuantumError> {
        self.embedding.get(q).copied().ok_or(QuantumError::Unembedded(q))
    }
}

/// `W_x = U_t O_x ... U_1 O_x U_0`.
pub fn compose_scheme(scheme: &QuantumScheme, table: &BitTable) -> Result<DMatrix<C64>, QuantumError> {
    let oracle = oracle_matrix(table, &scheme.layout)?;
    Ok(compose_with_oracle(scheme, &oracle))
}

pub(crate) fn compose_with_oracle(scheme: &QuantumScheme, oracle: &OracleSpec) -> DMatrix<C64> {
    let mut w = scheme.layers[0].clone();
    for u in &scheme.layers[1..] {
        oracle.apply_left(&mut w);
        w = u * w;
    }
    w
}

/// `W_x |q>` for the embedded query state.
pub fn query_state(scheme: &QuantumScheme, table: &BitTable, q: usize) -> Result<DVector<C64>, QuantumError> {
    let e = scheme.embedded(q)?;
    let oracle = oracle_matrix(table, &scheme.layout)?;
    let mut v = scheme.layers[0].column(e).into_owned();
    for u in &scheme.layers[1..] {
        for (i, &d) in oracle.diagonal.iter().enumerate() {
            if d < 0.0 {
                v[i] = -v[i];
            }
        }
        v = u * v;
    }
    Ok(v)
}

/// Probability that measuring `W_x |q>` yields output bit 1.
pub fn run_query(scheme: &QuantumScheme, table: &BitTable, q: usize) -> Result<f64, QuantumError> {
    let v = query_state(scheme, table, q)?;
    Ok(output_one_probability(&scheme.layout, &v))
}

pub fn output_one_probability(layout: &RegisterLayout, v: &DVector<C64>) -> f64 {
    v.iter().enumerate().filter(|(i, _)| layout.output_bit(*i)).map(|(_, a)| a.norm_sqr()).sum()
}
