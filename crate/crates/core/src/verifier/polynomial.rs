use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::VerifierError;
use crate::classical::{BitTable, DecisionTree};

/// Largest table length accepted when expanding query functions.
pub const MAX_POLYNOMIAL_VARS: usize = 20;

/// Real multilinear polynomial in `y_0 .. y_{s-1}`. Monomials are bit masks over
/// the variables; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    num_vars: usize,
    terms: BTreeMap<u32, BigRational>,
}

impl MultilinearPolynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, value: BigRational) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(0, value);
        p
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, BigRational::one())
    }

    pub fn variable(num_vars: usize, j: usize) -> Self {
        assert!(j < num_vars, "variable {j} out of range");
        let mut p = Self::zero(num_vars);
        p.add_term(1 << j, BigRational::one());
        p
    }

    fn add_term(&mut self, monomial: u32, coefficient: BigRational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(monomial).or_insert_with(BigRational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&monomial);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<u32, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, monomial: u32) -> BigRational {
        self.terms.get(&monomial).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Size of the largest monomial; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, -c.clone());
        }
        out
    }

    /// Product reduced with `y_j^2 = y_j`, which is exact on 0/1 inputs.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.num_vars.max(other.num_vars));
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                out.add_term(a | b, ca * cb);
            }
        }
        out
    }

    /// Value at the input whose variable `j` is bit `j` of `point`.
    pub fn evaluate_mask(&self, point: u32) -> BigRational {
        self.terms
            .iter()
            .filter(|(&m, _)| m & !point == 0)
            .fold(BigRational::zero(), |acc, (_, c)| acc + c)
    }

    pub fn evaluate(&self, table: &BitTable) -> BigRational {
        let point = (0..self.num_vars).filter(|&j| table.get(j)).fold(0u32, |acc, j| acc | 1 << j);
        self.evaluate_mask(point)
    }

    /// Evaluations on all `2^s` inputs.
    pub fn to_function_table(&self) -> FunctionTable {
        FunctionTable::from_fn(self.num_vars, |point| self.evaluate_mask(point))
    }
}

/// Expands a decision tree over a table of `num_vars` bits: a probe of `j` becomes
/// `(1 - y_j) P_0 + y_j P_1`.
pub fn tree_to_polynomial(
    tree: &DecisionTree,
    num_vars: usize,
) -> Result<MultilinearPolynomial, VerifierError> {
    if num_vars > MAX_POLYNOMIAL_VARS {
        return Err(VerifierError::ResourceCap(format!(
            "polynomial expansion limited to {MAX_POLYNOMIAL_VARS} table bits, got {num_vars}"
        )));
    }
    if let Some(j) = tree.max_location().filter(|&j| j >= num_vars) {
        return Err(VerifierError::InvalidInput(format!(
            "tree probes location {j} of a {num_vars}-bit table"
        )));
    }
    fn go(tree: &DecisionTree, s: usize) -> MultilinearPolynomial {
        match tree {
            DecisionTree::Leaf(false) => MultilinearPolynomial::zero(s),
            DecisionTree::Leaf(true) => MultilinearPolynomial::one(s),
            DecisionTree::Probe { location, if_zero, if_one } => {
                let y = MultilinearPolynomial::variable(s, *location);
                let not_y = MultilinearPolynomial::one(s).sub(&y);
                not_y.mul(&go(if_zero, s)).add(&y.mul(&go(if_one, s)))
            }
        }
    }
    Ok(go(tree, num_vars))
}

/// A real function on `{0,1}^s` stored as its `2^s` values. Position `p` holds
/// the value at the bit string whose leftmost character (bit 0) is the most
/// significant bit of `p`, so positions follow lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    num_vars: usize,
    values: Vec<BigRational>,
}

impl FunctionTable {
    /// Builds the table from `f(point)`, where bit `j` of `point` is table bit `j`.
    pub fn from_fn(num_vars: usize, mut f: impl FnMut(u32) -> BigRational) -> Self {
        let values = (0..1u32 << num_vars).map(|p| f(position_to_point(p, num_vars))).collect();
        Self { num_vars, values }
    }

    pub fn constant(num_vars: usize, value: BigRational) -> Self {
        Self { num_vars, values: vec![value; 1 << num_vars] }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigRational> {
        self.values
    }

    /// The bit string at position `p`.
    pub fn table_at(&self, p: usize) -> BitTable {
        BitTable::from_mask(position_to_point(p as u32, self.num_vars) as u64, self.num_vars)
    }

    pub fn value_at(&self, table: &BitTable) -> &BigRational {
        let point = (0..self.num_vars).filter(|&j| table.get(j)).fold(0u32, |acc, j| acc | 1 << j);
        &self.values[point_to_position(point, self.num_vars) as usize]
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self { num_vars: self.num_vars, values }
    }

    pub fn pointwise_add(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self { num_vars: self.num_vars, values }
    }

    /// The unique multilinear polynomial with these values (Möbius inversion).
    pub fn interpolate(&self) -> MultilinearPolynomial {
        let s = self.num_vars;
        let mut coeffs: Vec<BigRational> = (0..1u32 << s)
            .map(|point| self.values[point_to_position(point, s) as usize].clone())
            .collect();
        for j in 0..s {
            for point in 0..coeffs.len() {
                if point >> j & 1 == 1 {
                    let lower = coeffs[point ^ 1 << j].clone();
                    coeffs[point] -= lower;
                }
            }
        }
        let mut p = MultilinearPolynomial::zero(s);
        for (m, c) in coeffs.into_iter().enumerate() {
            p.add_term(m as u32, c);
        }
        p
    }
}

fn position_to_point(p: u32, s: usize) -> u32 {
    (0..s).filter(|&j| p >> (s - 1 - j) & 1 == 1).fold(0, |acc, j| acc | 1 << j)
}

fn point_to_position(point: u32, s: usize) -> u32 {
    position_to_point(point, s)
}

pub(crate) fn integer(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}
