use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::polynomial::{integer, tree_to_polynomial, FunctionTable, MultilinearPolynomial};
use super::VerifierError;
use crate::classical::{DecisionTree, DeterministicScheme, RandomizedOneProbeScheme};
use crate::model::{binom_sum, subsets_up_to};

/// Size limits of the rank checks.
pub const MAX_RANK_VARS: usize = 14;
pub const MAX_RANK_ROWS: usize = 4096;

/// Query functions `f_i : {0,1}^s -> R` of a scheme, as used by the rank checks.
pub trait QueryFunctions {
    fn universe_size(&self) -> usize;
    fn capacity(&self) -> usize;
    fn space(&self) -> usize;
    /// Probe budget `t` of one query.
    fn probes(&self) -> usize;
    fn query_polynomial(&self, q: usize) -> Result<MultilinearPolynomial, VerifierError>;
    fn query_table(&self, q: usize) -> Result<FunctionTable, VerifierError>;
}

impl<T: DeterministicScheme> QueryFunctions for T {
    fn universe_size(&self) -> usize {
        DeterministicScheme::universe_size(self)
    }

    fn capacity(&self) -> usize {
        DeterministicScheme::capacity(self)
    }

    fn space(&self) -> usize {
        DeterministicScheme::space(self)
    }

    fn probes(&self) -> usize {
        self.depth()
    }

    fn query_polynomial(&self, q: usize) -> Result<MultilinearPolynomial, VerifierError> {
        tree_to_polynomial(&self.query_tree(q), DeterministicScheme::space(self))
    }

    fn query_table(&self, q: usize) -> Result<FunctionTable, VerifierError> {
        let s = DeterministicScheme::space(self);
        check_vars(s)?;
        let tree = self.query_tree(q);
        Ok(FunctionTable::from_fn(s, |p| integer(tree.evaluate_mask(p as u64) as i64)))
    }
}

/// A scheme whose query `i` is a sum `f_i = sum_D g_D` of decision trees, one per
/// coin outcome `D`. When the scheme never accepts a non-member and accepts each
/// member on at least one outcome, `f_i` vanishes off `S` and is at least 1 on `S`.
#[derive(Clone, Debug)]
pub struct DisjunctiveScheme {
    pub universe_size: usize,
    pub capacity: usize,
    pub space: usize,
    pub trees: Vec<Vec<DecisionTree>>,
}

impl DisjunctiveScheme {
    /// One tree per entry of each element's probe set, each reading that location.
    pub fn from_oneprobe(scheme: &RandomizedOneProbeScheme) -> Self {
        let params = crate::classical::MembershipScheme::params(scheme);
        let trees = (0..params.universe_size)
            .map(|x| scheme.probe_set(x).iter().map(|&l| DecisionTree::read(l as usize)).collect())
            .collect();
        Self {
            universe_size: params.universe_size,
            capacity: params.capacity,
            space: params.space,
            trees,
        }
    }
}

impl QueryFunctions for DisjunctiveScheme {
    fn universe_size(&self) -> usize {
        self.universe_size
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn space(&self) -> usize {
        self.space
    }

    fn probes(&self) -> usize {
        self.trees.iter().flatten().map(DecisionTree::depth).max().unwrap_or(0)
    }

    fn query_polynomial(&self, q: usize) -> Result<MultilinearPolynomial, VerifierError> {
        let mut sum = MultilinearPolynomial::zero(self.space);
        for tree in self.trees(q)? {
            sum = sum.add(&tree_to_polynomial(tree, self.space)?);
        }
        Ok(sum)
    }

    fn query_table(&self, q: usize) -> Result<FunctionTable, VerifierError> {
        check_vars(self.space)?;
        let trees = self.trees(q)?;
        Ok(FunctionTable::from_fn(self.space, |p| {
            integer(trees.iter().filter(|t| t.evaluate_mask(p as u64)).count() as i64)
        }))
    }
}

impl DisjunctiveScheme {
    fn trees(&self, q: usize) -> Result<&[DecisionTree], VerifierError> {
        self.trees
            .get(q)
            .map(Vec::as_slice)
            .ok_or_else(|| VerifierError::InvalidInput(format!("query {q} out of range")))
    }
}

fn check_vars(s: usize) -> Result<(), VerifierError> {
    if s > MAX_RANK_VARS {
        return Err(VerifierError::ResourceCap(format!(
            "function tables limited to {MAX_RANK_VARS} table bits, got {s}"
        )));
    }
    Ok(())
}

/// `Phi(S) = prod_{i in S} f_i` evaluated on every table; `Phi({})` is constant 1.
pub fn phi_product(
    scheme: &dyn QueryFunctions,
    members: &[usize],
) -> Result<FunctionTable, VerifierError> {
    check_vars(scheme.space())?;
    if members.len() > scheme.capacity() {
        return Err(VerifierError::InvalidInput(format!(
            "{} members exceed capacity {}",
            members.len(),
            scheme.capacity()
        )));
    }
    let mut product = FunctionTable::constant(scheme.space(), BigRational::one());
    for &q in members {
        product = product.pointwise_mul(&scheme.query_table(q)?);
    }
    Ok(product)
}

/// Rank of a list of vectors in exact rational arithmetic.
pub fn exact_rank(rows: impl IntoIterator<Item = Vec<BigRational>>) -> usize {
    let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
    for mut row in rows {
        for (pivot, b) in &basis {
            if row[*pivot].is_zero() {
                continue;
            }
            let factor = row[*pivot].clone();
            for (x, y) in row.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        if let Some(pivot) = row.iter().position(|x| !x.is_zero()) {
            let inv = row[pivot].recip();
            for x in row.iter_mut() {
                *x *= &inv;
            }
            basis.push((pivot, row));
        }
    }
    basis.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub rank: usize,
    /// Number of sets `|S| <= n`, the rank of an independent family.
    pub expected: usize,
    /// `sum_{i <= nt} C(s, i)`: the dimension the products live in.
    pub dimension_bound: String,
    pub columns: usize,
    pub pass: bool,
}

fn row_count(m: usize, n: usize) -> Result<usize, VerifierError> {
    let count = binom_sum(m as u64, n as u64);
    count.to_usize().filter(|&c| c <= MAX_RANK_ROWS).ok_or_else(|| {
        VerifierError::ResourceCap(format!(
            "{count} sets of size at most {n} exceed the limit of {MAX_RANK_ROWS}"
        ))
    })
}

/// Exact rank of `{Phi(S) : |S| <= n}`; passes when the products are linearly
/// independent.
pub fn independence_check(scheme: &dyn QueryFunctions) -> Result<IndependenceReport, VerifierError> {
    let (m, n, s) = (scheme.universe_size(), scheme.capacity(), scheme.space());
    check_vars(s)?;
    let expected = row_count(m, n)?;
    let tables: Vec<FunctionTable> =
        (0..m).map(|q| scheme.query_table(q)).collect::<Result<_, _>>()?;
    let rows = subsets_up_to(m, n).into_iter().map(|set| {
        let mut product = FunctionTable::constant(s, BigRational::one());
        for q in set {
            product = product.pointwise_mul(&tables[q]);
        }
        product.into_values()
    });
    let rank = exact_rank(rows);
    let bound: BigUint = binom_sum(s as u64, (n * scheme.probes()) as u64);
    Ok(IndependenceReport {
        rank,
        expected,
        dimension_bound: bound.to_string(),
        columns: 1 << s,
        pass: rank == expected,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub max_degree: usize,
    pub bound: usize,
    pub pass: bool,
}

/// Largest degree of `Phi(S)` as a multilinear polynomial over `|S| <= n`,
/// compared against `n t`.
pub fn degree_bound_check(scheme: &dyn QueryFunctions) -> Result<DegreeReport, VerifierError> {
    let (m, n) = (scheme.universe_size(), scheme.capacity());
    row_count(m, n)?;
    let polys: Vec<MultilinearPolynomial> =
        (0..m).map(|q| scheme.query_polynomial(q)).collect::<Result<_, _>>()?;
    let mut max_degree = 0;
    for set in subsets_up_to(m, n) {
        let mut product = MultilinearPolynomial::one(scheme.space());
        for q in set {
            product = product.mul(&polys[q]);
        }
        max_degree = max_degree.max(product.degree());
    }
    let bound = n * scheme.probes();
    Ok(DegreeReport { max_degree, bound, pass: max_degree <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::BitVectorScheme;

    #[test]
    fn phi_of_empty_set_is_one() {
        let bv = BitVectorScheme::new(3, 2).unwrap();
        let phi = phi_product(&bv, &[]).unwrap();
        assert!(phi.values().iter().all(|v| v.is_one()));
        let single = phi_product(&bv, &[1]).unwrap();
        assert_eq!(single, bv.query_table(1).unwrap());
    }

    #[test]
    fn bitvector_pair_product() {
        let bv = BitVectorScheme::new(3, 2).unwrap();
        let phi = phi_product(&bv, &[1, 2]).unwrap();
        let ones: Vec<String> = (0..8)
            .filter(|&p| phi.values()[p].is_one())
            .map(|p| phi.table_at(p).to_string())
            .collect();
        assert_eq!(ones, vec!["011", "111"]);
        assert!(phi.values().iter().all(|v| v.is_zero() || v.is_one()));
    }

    #[test]
    fn bitvector_ranks() {
        let r = independence_check(&BitVectorScheme::new(3, 1).unwrap()).unwrap();
        assert_eq!((r.rank, r.expected, r.pass), (4, 4, true));
        assert_eq!(r.dimension_bound, "4");
        let r = independence_check(&BitVectorScheme::new(3, 3).unwrap()).unwrap();
        assert_eq!((r.rank, r.expected, r.pass), (8, 8, true));
    }

    #[test]
    fn degree_of_bitvector_products() {
        let d = degree_bound_check(&BitVectorScheme::new(3, 2).unwrap()).unwrap();
        assert_eq!((d.max_degree, d.bound, d.pass), (2, 2, true));
    }

    #[test]
    fn exact_rank_examples() {
        let rows = vec![
            vec![integer(1), integer(2)],
            vec![integer(2), integer(4)],
            vec![integer(0), integer(3)],
        ];
        assert_eq!(exact_rank(rows), 2);
        assert_eq!(exact_rank(vec![vec![integer(0); 3]]), 0);
    }

    #[test]
    fn one_sided_sums_stay_independent() {
        // each member read from two locations; f_i counts accepting reads
        let trees = vec![
            vec![DecisionTree::read(0), DecisionTree::read(1)],
            vec![DecisionTree::read(1), DecisionTree::read(2)],
            vec![DecisionTree::read(2), DecisionTree::read(3)],
        ];
        let scheme = DisjunctiveScheme { universe_size: 3, capacity: 1, space: 4, trees };
        let r = independence_check(&scheme).unwrap();
        assert!(r.pass);
        let d = degree_bound_check(&scheme).unwrap();
        assert!(d.pass);
    }

    #[test]
    fn caps_are_enforced() {
        let bv = BitVectorScheme::new(15, 1).unwrap();
        assert!(matches!(independence_check(&bv), Err(VerifierError::ResourceCap(_))));
    }
}
