use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{output_one_probability, query_state, QuantumError, QuantumScheme, C64};
use crate::classical::BitTable;
use crate::model::SetFamily;

/// `ceil(4 log2|F| / (n log2(1/(4 eps))))`.
pub fn tensor_exponent(family_size: usize, n: usize, epsilon: f64) -> Result<usize, QuantumError> {
    if !(epsilon > 0.0 && 4.0 * epsilon < 1.0) || n == 0 || family_size == 0 {
        return Err(QuantumError::InvalidInput(format!(
            "need 0 < 4 eps < 1, n >= 1 and a non-empty family (eps={epsilon}, n={n})"
        )));
    }
    let ratio = 4.0 * (family_size as f64).log2() / (n as f64 * (1.0 / (4.0 * epsilon)).log2());
    Ok(ratio.ceil() as usize)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramReport {
    pub family_size: usize,
    pub set_size: usize,
    pub tensor_exponent: usize,
    /// Per-element overlap bound `2 sqrt(eps)`.
    pub delta: f64,
    /// `M(S, T)` as `[re, im]` pairs, row-major.
    pub entries: Vec<Vec<[f64; 2]>>,
    pub diagonal_error: f64,
    pub max_off_diagonal: f64,
    /// `delta^{n texp / 2}`: the bound every off-diagonal entry obeys.
    pub off_diagonal_bound: f64,
    /// `1 - (|F| - 1) delta^{n texp / 2}`.
    pub dominance_margin: f64,
    pub min_singular_value: f64,
    pub singular_values: Vec<f64>,
    /// Positive margin: non-singular by diagonal dominance.
    pub nonsingular: bool,
    /// `min_singular_value >= margin - 1e-6`.
    pub singular_value_check: bool,
}

impl GramReport {
    pub fn matrix(&self) -> DMatrix<C64> {
        let k = self.entries.len();
        DMatrix::from_fn(k, k, |r, c| C64::new(self.entries[r][c][0], self.entries[r][c][1]))
    }
}

fn check_family(family: &SetFamily) -> Result<(), QuantumError> {
    if family.is_empty() {
        return Err(QuantumError::InvalidInput("empty family".into()));
    }
    if family.sets.iter().any(|s| s.len() != family.set_size) {
        return Err(QuantumError::InvalidInput("family sets must all have size n".into()));
    }
    let worst = family.max_pairwise_intersection();
    if worst > family.intersection_threshold() {
        return Err(QuantumError::InvalidInput(format!(
            "two sets share {worst} elements, more than {}",
            family.intersection_threshold()
        )));
    }
    Ok(())
}

/// Builds `M(S, T) = (prod_{i in T} <state(S, i), state(T, i)>)^texp` where
/// `state(a, i)` is the image of query `i` under the operator of set `a`.
pub fn gram_from_states(
    family: &SetFamily,
    epsilon: f64,
    tensor_exponent: usize,
    mut state: impl FnMut(usize, usize) -> Result<DVector<C64>, QuantumError>,
) -> Result<GramReport, QuantumError> {
    check_family(family)?;
    let k = family.len();
    let n = family.set_size;
    let delta = 2.0 * epsilon.sqrt();
    let mut cache = std::collections::HashMap::new();
    let mut get = |a: usize, i: usize| -> Result<DVector<C64>, QuantumError> {
        if let Some(v) = cache.get(&(a, i)) {
            return Ok(DVector::clone(v));
        }
        let v = state(a, i)?;
        cache.insert((a, i), v.clone());
        Ok(v)
    };
    let mut m = DMatrix::<C64>::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let mut product = C64::new(1.0, 0.0);
            for &i in &family.sets[b] {
                product *= get(a, i)?.dotc(&get(b, i)?);
            }
            m[(a, b)] = product.powu(tensor_exponent as u32);
        }
    }
    let diagonal_error =
        (0..k).map(|a| (m[(a, a)] - C64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    let max_off_diagonal = (0..k)
        .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| m[(a, b)].norm())
        .fold(0.0, f64::max);
    let off_diagonal_bound = delta.powf((n * tensor_exponent) as f64 / 2.0);
    let dominance_margin = 1.0 - (k - 1) as f64 * off_diagonal_bound;
    let mut singular_values: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    singular_values.sort_by(|x, y| y.total_cmp(x));
    let min_singular_value = *singular_values.last().expect("non-empty family");
    Ok(GramReport {
        family_size: k,
        set_size: n,
        tensor_exponent,
        delta,
        entries: (0..k).map(|a| (0..k).map(|b| [m[(a, b)].re, m[(a, b)].im]).collect()).collect(),
        diagonal_error,
        max_off_diagonal,
        off_diagonal_bound,
        dominance_margin,
        min_singular_value,
        singular_values,
        nonsingular: dominance_margin > 0.0,
        singular_value_check: dominance_margin <= 0.0 || min_singular_value >= dominance_margin - 1e-6,
    })
}

/// Unit vector in `C^{2m}` for query `i` under set `a`: `e_{2i}` when `i` is a
/// member, else `delta e_{2i} + sqrt(1 - delta^2) e_{2i+1}`. Members and
/// non-members of the same query overlap by exactly `delta`.
pub fn synthetic_overlap_state(family: &SetFamily, delta: f64, a: usize, i: usize) -> DVector<C64> {
    let mut v = DVector::zeros(2 * family.universe_size);
    if family.sets[a].contains(&i) {
        v[2 * i] = C64::new(1.0, 0.0);
    } else {
        v[2 * i] = C64::new(delta, 0.0);
        v[2 * i + 1] = C64::new((1.0 - delta * delta).sqrt(), 0.0);
    }
    v
}

/// Gram matrix of a quantum scheme over a family: `tables[a]` is the stored
/// table of `family.sets[a]`. Every query `i` appearing in the family must be
/// answered with error at most `epsilon` on every table.
pub fn gram_matrix(
    scheme: &QuantumScheme,
    tables: &[BitTable],
    family: &SetFamily,
    epsilon: f64,
    tensor_exponent: usize,
) -> Result<GramReport, QuantumError> {
    check_family(family)?;
    if tables.len() != family.len() {
        return Err(QuantumError::InvalidInput(format!(
            "{} tables for a family of {} sets",
            tables.len(),
            family.len()
        )));
    }
    let mut elements: Vec<usize> = family.sets.iter().flatten().copied().collect();
    elements.sort_unstable();
    elements.dedup();
    for (a, table) in tables.iter().enumerate() {
        for &i in &elements {
            let v = query_state(scheme, table, i)?;
            let p = output_one_probability(scheme.layout(), &v);
            let error = if family.sets[a].contains(&i) { 1.0 - p } else { p };
            if error > epsilon + 1e-12 {
                return Err(QuantumError::InvalidInput(format!(
                    "query {i} on set {a} errs with probability {error:.3e} > {epsilon}"
                )));
            }
        }
    }
    gram_from_states(family, epsilon, tensor_exponent, |a, i| query_state(scheme, &tables[a], i))
}

#[cfg(test)]
mod tests {
    use super::super::{encode_classical_as_quantum, max_abs, EncodeOptions};
    use super::*;
    use crate::classical::{bitvector_build, BitVectorScheme};
    use crate::model::{greedy_family_with_limit, MembershipInstance};

    #[test]
    fn exponent_formula() {
        // 4 * 4 / (2 * log2 25) = 1.72
        assert_eq!(tensor_exponent(16, 2, 0.01).unwrap(), 2);
        assert_eq!(tensor_exponent(1, 2, 0.01).unwrap(), 0);
        assert!(tensor_exponent(16, 2, 0.25).is_err());
    }

    #[test]
    fn prescribed_overlaps() {
        let family = greedy_family_with_limit(64, 2, Some(16)).unwrap();
        let eps = 0.01;
        let texp = tensor_exponent(16, 2, eps).unwrap();
        let delta = 2.0 * eps.sqrt();
        let r = gram_from_states(&family, eps, texp, |a, i| Ok(synthetic_overlap_state(&family, delta, a, i))).unwrap();
        assert!(r.diagonal_error < 1e-12);
        let m = r.matrix();
        for a in 0..16 {
            for b in 0..16 {
                let missing = family.sets[b].iter().filter(|i| !family.sets[a].contains(i)).count();
                let want = delta.powi((missing * texp) as i32);
                assert!((m[(a, b)].re - want).abs() < 1e-12);
            }
        }
        assert!((r.dominance_margin - (1.0 - 15.0 * delta.powi(2))).abs() < 1e-9);
        assert!(r.nonsingular && r.singular_value_check);
        assert!(r.max_off_diagonal <= r.off_diagonal_bound + 1e-12);
    }

    #[test]
    fn disjoint_pair_bound() {
        let family = SetFamily { universe_size: 4, set_size: 2, sets: vec![vec![0, 1], vec![2, 3]] };
        let r = gram_from_states(&family, 0.01, 3, |a, i| Ok(synthetic_overlap_state(&family, 0.2, a, i))).unwrap();
        assert!(r.max_off_diagonal <= 0.2f64.powi(6) + 1e-15);
    }

    #[test]
    fn rejects_bad_families() {
        let family = SetFamily { universe_size: 4, set_size: 2, sets: vec![vec![0, 1], vec![0, 1]] };
        assert!(gram_from_states(&family, 0.01, 1, |a, i| Ok(synthetic_overlap_state(&family, 0.2, a, i))).is_err());
    }

    #[test]
    fn exact_quantum_scheme_gives_identity() {
        let bv = BitVectorScheme::new(8, 2).unwrap();
        let qs = encode_classical_as_quantum(&bv, EncodeOptions::default()).unwrap();
        let family = greedy_family_with_limit(8, 2, Some(6)).unwrap();
        let tables: Vec<BitTable> = family
            .sets
            .iter()
            .map(|s| bitvector_build(&MembershipInstance::new(8, 2, s.clone()).unwrap()).unwrap().1)
            .collect();
        let r = gram_matrix(&qs, &tables, &family, 0.01, 1).unwrap();
        assert!(max_abs(&(r.matrix() - DMatrix::identity(6, 6))) < 1e-9);
        assert!((r.min_singular_value - 1.0).abs() < 1e-9);
    }
}
