//! One-probe classical schemes as quantum schemes.
//!
//! Query `q` gets a slot `(j, r)`: `j` is the location its tree reads and `r`
//! counts earlier queries reading `j`. `U_0` sends `|q>` to
//! `(|j,0,2r> + |j,1,2r>)/sqrt 2`; the oracle flips the sign of the second half
//! when `x_j = 1`, and `U_1` maps the resulting `|+>` / `|->` onto the output
//! states the tree prescribes. Constant trees go to `|j,0,2r>`, which the oracle
//! never touches.

use nalgebra::{DMatrix, DVector};

use super::{QuantumError, QuantumScheme, RegisterLayout, C64};
use crate::classical::{DecisionTree, DeterministicScheme};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EncodeOptions {
    /// Probability that a "present" answer is replaced by "absent". Absent
    /// answers stay exact, so the encoded scheme errs only on positive instances.
    pub positive_error: f64,
}

enum Answer {
    Constant(bool),
    Read { location: usize, when_one: bool },
}

fn classify(tree: &DecisionTree, q: usize) -> Result<Answer, QuantumError> {
    match tree.canonicalize() {
        DecisionTree::Leaf(v) => Ok(Answer::Constant(v)),
        DecisionTree::Probe { location, if_zero, if_one } => match (*if_zero, *if_one) {
            (DecisionTree::Leaf(a), DecisionTree::Leaf(b)) if a != b => {
                Ok(Answer::Read { location, when_one: b })
            }
            _ => Err(QuantumError::InvalidInput(format!(
                "query {q} makes more than one probe; only one-probe schemes can be encoded"
            ))),
        },
    }
}

fn basis(d: usize, i: usize) -> DVector<C64> {
    let mut v = DVector::zeros(d);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Orthonormal basis of the orthogonal complement of `vectors` (assumed orthonormal).
fn complement(vectors: &[DVector<C64>], d: usize) -> Vec<DVector<C64>> {
    let mut all: Vec<DVector<C64>> = vectors.to_vec();
    let mut out = Vec::new();
    for i in 0..d {
        let mut v = basis(d, i);
        for u in &all {
            let c = u.dotc(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= C64::new(norm, 0.0);
            all.push(v.clone());
            out.push(v);
        }
    }
    out
}

/// The unitary sending each `inputs[k]` to `outputs[k]`, extended arbitrarily
/// (but deterministically) on the complement.
fn unitary_from_pairs(inputs: &[DVector<C64>], outputs: &[DVector<C64>], d: usize) -> DMatrix<C64> {
    let mut u = DMatrix::zeros(d, d);
    let rest_in = complement(inputs, d);
    let rest_out = complement(outputs, d);
    for (a, b) in inputs.iter().chain(&rest_in).zip(outputs.iter().chain(&rest_out)) {
        u += b * a.adjoint();
    }
    u
}

pub fn encode_classical_as_quantum(
    scheme: &dyn DeterministicScheme,
    options: EncodeOptions,
) -> Result<QuantumScheme, QuantumError> {
    let eta = options.positive_error;
    if !(0.0..1.0).contains(&eta) {
        return Err(QuantumError::InvalidInput(format!("positive_error {eta} outside [0, 1)")));
    }
    let (m, s) = (scheme.universe_size(), scheme.space());
    let answers: Vec<Answer> =
        (0..m).map(|q| classify(&scheme.query_tree(q), q)).collect::<Result<_, _>>()?;
    let mut per_address = vec![0usize; s];
    let slots: Vec<(usize, usize)> = answers
        .iter()
        .map(|a| {
            let j = match a {
                Answer::Constant(_) => 0,
                Answer::Read { location, .. } => *location,
            };
            per_address[j] += 1;
            (j, per_address[j] - 1)
        })
        .collect();
    let busiest = per_address.iter().copied().max().unwrap_or(0);
    let mut work = 2 * busiest.max(1);
    let layout = loop {
        let layout = RegisterLayout::new(s, work)?;
        if layout.default_embedding(m).is_ok() {
            break layout;
        }
        work += 2;
    };
    let embedding = layout.default_embedding(m)?;
    let d = layout.dimension();
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (keep, lose) = (C64::new((1.0 - eta).sqrt(), 0.0), C64::new(eta.sqrt(), 0.0));

    let mut in0 = Vec::new();
    let mut out0 = Vec::new();
    let mut in1 = Vec::new();
    let mut out1 = Vec::new();
    for (q, (answer, &(j, r))) in answers.iter().zip(&slots).enumerate() {
        let zero = basis(d, layout.index(j, 0, 2 * r));
        let one = basis(d, layout.index(j, 1, 2 * r));
        let yes = basis(d, layout.index(j, 0, 2 * r + 1));
        // "present" with probability 1 - eta, otherwise an even work index
        let present = &yes * keep + &one * lose;
        in0.push(basis(d, embedding[q]));
        match answer {
            Answer::Constant(v) => {
                out0.push(zero.clone());
                in1.push(zero.clone());
                out1.push(if *v { present } else { zero });
            }
            Answer::Read { when_one, .. } => {
                out0.push((&zero + &one) * h);
                let plus = (&zero + &one) * h;
                let minus = (&zero - &one) * h;
                let (absent_in, present_in) = if *when_one { (plus, minus) } else { (minus, plus) };
                in1.push(absent_in);
                out1.push(zero);
                in1.push(present_in);
                out1.push(present);
            }
        }
    }
    let u0 = unitary_from_pairs(&in0, &out0, d);
    let u1 = unitary_from_pairs(&in1, &out1, d);
    QuantumScheme::new(layout, vec![u0, u1], embedding)
}

#[cfg(test)]
mod tests {
    use super::super::run_query;
    use super::*;
    use crate::classical::{BitTable, BitVectorScheme};
    use crate::verifier::ExplicitScheme;
    use crate::model::subsets_up_to;

    #[test]
    fn bitvector_encoding_reproduces_every_answer() {
        let bv = BitVectorScheme::new(3, 3).unwrap();
        let qs = encode_classical_as_quantum(&bv, EncodeOptions::default()).unwrap();
        assert_eq!(qs.probes(), 1);
        for mask in 0..8u64 {
            let table = BitTable::from_mask(mask, 3);
            for q in 0..3 {
                let p = run_query(&qs, &table, q).unwrap();
                let want = if mask >> q & 1 == 1 { 1.0 } else { 0.0 };
                assert!((p - want).abs() < 1e-9, "mask {mask} q {q}: {p}");
            }
        }
    }

    #[test]
    fn negated_and_constant_trees() {
        // query 0 answers "not x_1", query 1 always yes, query 2 always no, query 3 reads x_1
        let trees = vec![
            DecisionTree::probe(1, DecisionTree::leaf(true), DecisionTree::leaf(false)),
            DecisionTree::leaf(true),
            DecisionTree::leaf(false),
            DecisionTree::read(1),
        ];
        let storage = subsets_up_to(4, 1).into_iter().map(|set| (set, BitTable::zeros(2))).collect();
        let scheme = ExplicitScheme::new(4, 1, 2, trees.clone(), storage).unwrap();
        let qs = encode_classical_as_quantum(&scheme, EncodeOptions::default()).unwrap();
        for mask in 0..4u64 {
            let table = BitTable::from_mask(mask, 2);
            for (q, tree) in trees.iter().enumerate() {
                let want = if tree.evaluate(&table).0 { 1.0 } else { 0.0 };
                assert!((run_query(&qs, &table, q).unwrap() - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn positive_error_only_hits_present_answers() {
        let bv = BitVectorScheme::new(3, 1).unwrap();
        let qs = encode_classical_as_quantum(&bv, EncodeOptions { positive_error: 0.3 }).unwrap();
        for mask in 0..8u64 {
            let table = BitTable::from_mask(mask, 3);
            for q in 0..3 {
                let p = run_query(&qs, &table, q).unwrap();
                let want = if mask >> q & 1 == 1 { 0.7 } else { 0.0 };
                assert!((p - want).abs() < 1e-9);
            }
        }
        assert!(encode_classical_as_quantum(&bv, EncodeOptions { positive_error: 1.0 }).is_err());
    }

    #[test]
    fn rejects_two_probe_trees() {
        let trees = vec![DecisionTree::probe(0, DecisionTree::read(1), DecisionTree::leaf(true)); 2];
        let storage = subsets_up_to(2, 1).into_iter().map(|set| (set, BitTable::zeros(2))).collect();
        let scheme = ExplicitScheme::new(2, 1, 2, trees, storage).unwrap();
        assert!(encode_classical_as_quantum(&scheme, EncodeOptions::default()).is_err());
    }
}
