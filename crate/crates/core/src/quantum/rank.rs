use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{compose_scheme, QuantumError, QuantumScheme, C64};
use crate::classical::BitTable;
use crate::model::binom_sum;

/// Singular values below this fraction of the largest count as zero.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-6;
/// Largest flattened length `D^{2n'}` of one tensor power.
pub const MAX_FLATTENED_LEN: u128 = 1 << 22;
pub const MAX_RANK_SETS: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// `sum_{i <= n' t} C(s, i)`.
    pub dimension_bound: String,
    pub dimension_bound_holds: bool,
    pub independent: bool,
    pub set_count: usize,
    pub exponent: usize,
    pub tolerance: f64,
    /// Singular values of the matrix whose rows are the flattened tensor powers,
    /// largest first.
    pub singular_values: Vec<f64>,
}

/// Numerical rank of `{W_x^{(tensor n')}}` over the given tables.
///
/// With `<A, B> = tr(A^dagger B)`, `<A^{(x)n}, B^{(x)n}> = <A, B>^n`, so the Gram
/// matrix of the flattened powers is the entrywise `n'`-th power of the Gram
/// matrix of the `W_x`. Its eigenvalues are the squared singular values.
pub fn tensor_power_rank(
    scheme: &QuantumScheme,
    tables: &[BitTable],
    exponent: usize,
    tolerance: f64,
) -> Result<RankReport, QuantumError> {
    if tables.is_empty() {
        return Err(QuantumError::InvalidInput("no tables given".into()));
    }
    if tables.len() > MAX_RANK_SETS {
        return Err(QuantumError::ResourceCap(format!(
            "{} sets exceed the limit of {MAX_RANK_SETS}",
            tables.len()
        )));
    }
    let d = scheme.dimension() as u128;
    let flattened = d.checked_pow(2 * exponent as u32).filter(|&len| len <= MAX_FLATTENED_LEN);
    if flattened.is_none() {
        return Err(QuantumError::ResourceCap(format!(
            "tensor power of dimension {d} to exponent {exponent} exceeds {MAX_FLATTENED_LEN} entries"
        )));
    }
    let ws: Vec<DMatrix<C64>> =
        tables.iter().map(|t| compose_scheme(scheme, t)).collect::<Result<_, _>>()?;
    let k = ws.len();
    let gram = DMatrix::from_fn(k, k, |a, b| {
        let inner: C64 = ws[a].iter().zip(ws[b].iter()).map(|(x, y)| x.conj() * y).sum();
        inner.powu(exponent as u32)
    });
    let mut eigen: Vec<f64> = gram.svd(false, false).singular_values.iter().copied().collect();
    eigen.sort_by(|a, b| b.total_cmp(a));
    let singular_values: Vec<f64> = eigen.iter().map(|e| e.max(0.0).sqrt()).collect();
    let cutoff = tolerance * singular_values[0];
    let rank = singular_values.iter().filter(|&&s| s > cutoff).count();
    let bound = binom_sum(scheme.layout().address_count as u64, (exponent * scheme.probes()) as u64);
    Ok(RankReport {
        rank,
        dimension_bound_holds: num_bigint::BigUint::from(rank) <= bound,
        dimension_bound: bound.to_string(),
        independent: rank == k,
        set_count: k,
        exponent,
        tolerance,
        singular_values,
    })
}
