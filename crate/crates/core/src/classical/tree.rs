use serde::{Deserialize, Serialize};

use super::BitTable;

/// A deterministic adaptive query: each internal node probes one table location.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionTree {
    Leaf(bool),
    Probe {
        location: usize,
        if_zero: Box<DecisionTree>,
        if_one: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn leaf(value: bool) -> Self {
        DecisionTree::Leaf(value)
    }

    pub fn probe(location: usize, if_zero: DecisionTree, if_one: DecisionTree) -> Self {
        DecisionTree::Probe { location, if_zero: Box::new(if_zero), if_one: Box::new(if_one) }
    }

    /// Probe `location` and answer the bit read.
    pub fn read(location: usize) -> Self {
        Self::probe(location, Self::leaf(false), Self::leaf(true))
    }

    /// Longest root-to-leaf path, counted in probes.
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Probe { if_zero, if_one, .. } => 1 + if_zero.depth().max(if_one.depth()),
        }
    }

    /// Largest location probed anywhere in the tree.
    pub fn max_location(&self) -> Option<usize> {
        match self {
            DecisionTree::Leaf(_) => None,
            DecisionTree::Probe { location, if_zero, if_one } => Some(
                (*location)
                    .max(if_zero.max_location().unwrap_or(0))
                    .max(if_one.max_location().unwrap_or(0)),
            ),
        }
    }

    /// Walks the tree with `read_bit`, returning the answer and the number of probes made.
    pub fn evaluate_with(&self, mut read_bit: impl FnMut(usize) -> bool) -> (bool, usize) {
        let mut node = self;
        let mut probes = 0;
        loop {
            match node {
                DecisionTree::Leaf(v) => return (*v, probes),
                DecisionTree::Probe { location, if_zero, if_one } => {
                    probes += 1;
                    node = if read_bit(*location) { if_one } else { if_zero };
                }
            }
        }
    }

    pub fn evaluate(&self, table: &BitTable) -> (bool, usize) {
        self.evaluate_with(|j| table.get(j))
    }

    /// Evaluates on the table whose bit `j` is bit `j` of `mask`.
    pub fn evaluate_mask(&self, mask: u64) -> bool {
        self.evaluate_with(|j| mask >> j & 1 == 1).0
    }

    /// Removes probes of locations already read on the same path and collapses
    /// nodes whose two children are identical. The computed function is unchanged.
    pub fn canonicalize(&self) -> DecisionTree {
        fn go(tree: &DecisionTree, known: &mut Vec<(usize, bool)>) -> DecisionTree {
            match tree {
                DecisionTree::Leaf(v) => DecisionTree::Leaf(*v),
                DecisionTree::Probe { location, if_zero, if_one } => {
                    if let Some(&(_, v)) = known.iter().find(|(l, _)| l == location) {
                        return go(if v { if_one } else { if_zero }, known);
                    }
                    known.push((*location, false));
                    let zero = go(if_zero, known);
                    known.pop();
                    known.push((*location, true));
                    let one = go(if_one, known);
                    known.pop();
                    if zero == one {
                        zero
                    } else {
                        DecisionTree::probe(*location, zero, one)
                    }
                }
            }
        }
        go(self, &mut Vec::new())
    }
}
