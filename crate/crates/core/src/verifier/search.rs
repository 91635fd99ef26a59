//! Exhaustive search for exact deterministic `(s, t)`-schemes on tiny universes.
//!
//! Rather than enumerating storage assignments directly, the search enumerates
//! the distinct Boolean functions on `{0,1}^s` computable by trees of depth at
//! most `t`. A scheme exists iff some choice of `m` such functions `f_0..f_{m-1}`
//! realizes every pattern of weight at most `n`: for each `|S| <= n` there must be
//! a table `y` with `f_q(y) = [q in S]` for all `q`, and that `y` is then the
//! stored table of `S`. Permuting the queries permutes the required patterns
//! among themselves, so functions are chosen as increasing sequences of distinct
//! functions, and a partial choice is pruned as soon as its projection misses a
//! required pattern.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::VerifierError;
use crate::classical::{
    check_instance, check_members, check_query, check_table, Answer, BitTable, DecisionTree,
    DeterministicScheme, MembershipScheme, SchemeError, SchemeKind,
};
use crate::model::{subsets_up_to, tradeoff_feasible, MembershipInstance, SchemeParams};

/// Hard limits from the bit-mask representation.
pub const HARD_MAX_SPACE: usize = 6;
pub const HARD_MAX_UNIVERSE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_universe: usize,
    pub max_capacity: usize,
    pub max_space: usize,
    pub max_probes: usize,
    /// Search nodes visited before giving up.
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { max_universe: 5, max_capacity: 2, max_space: 5, max_probes: 2, node_budget: 2_000_000_000 }
    }
}

/// A deterministic scheme given by one tree per query and one table per set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExplicitSchemeData", into = "ExplicitSchemeData")]
pub struct ExplicitScheme {
    pub universe_size: usize,
    pub capacity: usize,
    pub space: usize,
    pub trees: Vec<DecisionTree>,
    /// Tables for every set of size at most `capacity`, in [`subsets_up_to`] order.
    pub storage: Vec<(Vec<usize>, BitTable)>,
    params: SchemeParams,
}

#[derive(Clone, Serialize, Deserialize)]
struct ExplicitSchemeData {
    universe_size: usize,
    capacity: usize,
    space: usize,
    trees: Vec<DecisionTree>,
    storage: Vec<(Vec<usize>, String)>,
}

impl TryFrom<ExplicitSchemeData> for ExplicitScheme {
    type Error = SchemeError;

    fn try_from(d: ExplicitSchemeData) -> Result<Self, SchemeError> {
        let storage = d
            .storage
            .into_iter()
            .map(|(set, bits)| Ok((set, BitTable::parse_bit_string(&bits)?)))
            .collect::<Result<_, SchemeError>>()?;
        Self::new(d.universe_size, d.capacity, d.space, d.trees, storage)
    }
}

impl From<ExplicitScheme> for ExplicitSchemeData {
    fn from(s: ExplicitScheme) -> Self {
        Self {
            universe_size: s.universe_size,
            capacity: s.capacity,
            space: s.space,
            trees: s.trees,
            storage: s.storage.into_iter().map(|(set, t)| (set, t.to_bit_string())).collect(),
        }
    }
}

impl ExplicitScheme {
    pub fn new(
        universe_size: usize,
        capacity: usize,
        space: usize,
        trees: Vec<DecisionTree>,
        storage: Vec<(Vec<usize>, BitTable)>,
    ) -> Result<Self, SchemeError> {
        if trees.len() != universe_size {
            return Err(SchemeError::InvalidParams(format!(
                "{} trees for a universe of size {universe_size}",
                trees.len()
            )));
        }
        if trees.iter().any(|t| t.max_location().is_some_and(|j| j >= space)) {
            return Err(SchemeError::InvalidParams("tree probes outside the table".into()));
        }
        let expected = subsets_up_to(universe_size, capacity);
        if storage.len() != expected.len()
            || storage.iter().zip(&expected).any(|((set, table), want)| set != want || table.len() != space)
        {
            return Err(SchemeError::InvalidParams(
                "storage must list every set of size at most n in order".into(),
            ));
        }
        let depth = trees.iter().map(DecisionTree::depth).max().unwrap_or(0);
        let params = SchemeParams::new(universe_size, capacity, space, depth.max(1), 0.0)?;
        Ok(Self { universe_size, capacity, space, trees, storage, params })
    }

    /// Whether every stored set is answered correctly on every query.
    pub fn is_exact(&self) -> bool {
        self.storage.iter().all(|(set, table)| {
            self.trees.iter().enumerate().all(|(q, tree)| tree.evaluate(table).0 == set.contains(&q))
        })
    }
}

impl DeterministicScheme for ExplicitScheme {
    fn universe_size(&self) -> usize {
        self.universe_size
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn space(&self) -> usize {
        self.space
    }

    fn depth(&self) -> usize {
        self.trees.iter().map(DecisionTree::depth).max().unwrap_or(0)
    }

    fn store_set(&self, members: &[usize]) -> Result<BitTable, SchemeError> {
        check_members(members, self.universe_size, self.capacity)?;
        let (_, table) = self
            .storage
            .iter()
            .find(|(set, _)| set == members)
            .expect("storage covers every valid set");
        Ok(table.clone())
    }

    fn query_tree(&self, q: usize) -> DecisionTree {
        self.trees[q].clone()
    }
}

impl MembershipScheme for ExplicitScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Explicit
    }

    fn params(&self) -> &SchemeParams {
        &self.params
    }

    fn store(&self, instance: &MembershipInstance) -> Result<BitTable, SchemeError> {
        check_instance(instance, &self.params)?;
        self.store_set(instance.members())
    }

    fn query(&self, table: &BitTable, q: usize, _: &mut dyn RngCore) -> Result<Answer, SchemeError> {
        check_query(q, self.universe_size)?;
        check_table(table, self.space)?;
        let (present, probes) = self.trees[q].evaluate(table);
        Ok(Answer { present, probes })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOutcome {
    Found,
    None,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub universe_size: usize,
    pub capacity: usize,
    pub space: usize,
    pub probes: usize,
    /// Distinct functions computable with at most `probes` probes.
    pub function_count: usize,
    pub nodes_visited: u64,
    pub outcome: SearchOutcome,
    /// Whether `sum_{i<=n} C(m,i) <= sum_{i<=nt} C(s,i)`.
    pub inequality_holds: bool,
    pub elapsed_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<ExplicitScheme>,
}

impl SearchCertificate {
    /// True when the outcome does not contradict the inequality, i.e. no scheme
    /// was found for a tuple the inequality rules out.
    pub fn consistent_with_inequality(&self) -> bool {
        self.inequality_holds || self.outcome == SearchOutcome::None
    }
}

/// Functions on `{0,1}^s` (as masks over the `2^s` points) computable by trees of
/// depth at most `t`, each with a witness tree, in increasing mask order.
pub fn depth_bounded_functions(s: usize, t: usize) -> BTreeMap<u64, DecisionTree> {
    assert!(s <= HARD_MAX_SPACE);
    let points = 1usize << s;
    let full = if points == 64 { u64::MAX } else { (1u64 << points) - 1 };
    let var: Vec<u64> = (0..s)
        .map(|j| (0..points).filter(|p| p >> j & 1 == 1).fold(0u64, |acc, p| acc | 1 << p))
        .collect();
    let mut level: BTreeMap<u64, DecisionTree> =
        [(0, DecisionTree::leaf(false)), (full, DecisionTree::leaf(true))].into_iter().collect();
    for _ in 0..t {
        let mut next = level.clone();
        for (j, &v) in var.iter().enumerate() {
            for (&g0, t0) in &level {
                for (&g1, t1) in &level {
                    let f = (v & g1) | (!v & full & g0);
                    next.entry(f).or_insert_with(|| DecisionTree::probe(j, t0.clone(), t1.clone()));
                }
            }
        }
        if next.len() == level.len() {
            break;
        }
        level = next;
    }
    level
}

struct Search<'a> {
    functions: &'a [u64],
    points: usize,
    m: usize,
    /// `required[k]`: patterns over `k` queries with weight at most `n`, as a bitset.
    required: Vec<u64>,
    patterns: Vec<u8>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, start: usize) -> Result<bool, VerifierError> {
        let k = self.chosen.len();
        if k == self.m {
            return Ok(true);
        }
        for i in start..self.functions.len() {
            if self.functions.len() - i < self.m - k {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(VerifierError::ResourceCap(format!(
                    "search visited more than {} nodes",
                    self.budget
                )));
            }
            let f = self.functions[i];
            let mut covered = 0u64;
            for p in 0..self.points {
                self.patterns[p] |= ((f >> p & 1) as u8) << k;
                covered |= 1 << self.patterns[p];
            }
            if covered & self.required[k + 1] == self.required[k + 1] {
                self.chosen.push(i);
                if self.run(i + 1)? {
                    return Ok(true);
                }
                self.chosen.pop();
            }
            for p in 0..self.points {
                self.patterns[p] &= !(1 << k);
            }
        }
        Ok(false)
    }
}

/// Searches for an exact `(s, t)`-scheme storing sets of size at most `n` from a
/// universe of size `m`.
pub fn exhaustive_search(
    m: usize,
    n: usize,
    s: usize,
    t: usize,
    config: &SearchConfig,
) -> Result<SearchCertificate, VerifierError> {
    if m == 0 || n == 0 || n > m || s == 0 || t == 0 {
        return Err(VerifierError::InvalidInput(format!(
            "need 1 <= n <= m and s, t >= 1 (got m={m} n={n} s={s} t={t})"
        )));
    }
    let over = |what: &str, value: usize, cap: usize| {
        VerifierError::ResourceCap(format!("{what}={value} exceeds the search cap {cap}"))
    };
    if m > config.max_universe.min(HARD_MAX_UNIVERSE) {
        return Err(over("m", m, config.max_universe.min(HARD_MAX_UNIVERSE)));
    }
    if n > config.max_capacity {
        return Err(over("n", n, config.max_capacity));
    }
    if s > config.max_space.min(HARD_MAX_SPACE) {
        return Err(over("s", s, config.max_space.min(HARD_MAX_SPACE)));
    }
    if t > config.max_probes {
        return Err(over("t", t, config.max_probes));
    }
    let started = Instant::now();
    let functions = depth_bounded_functions(s, t);
    let masks: Vec<u64> = functions.keys().copied().collect();
    let required = (0..=m)
        .map(|k| {
            (0..1u64 << k)
                .filter(|p| p.count_ones() as usize <= n)
                .fold(0u64, |acc, p| acc | 1 << p)
        })
        .collect();
    let mut search = Search {
        functions: &masks,
        points: 1 << s,
        m,
        required,
        patterns: vec![0; 1 << s],
        chosen: Vec::new(),
        nodes: 0,
        budget: config.node_budget,
    };
    let found = search.run(0)?;
    let scheme = if found {
        let trees: Vec<DecisionTree> =
            search.chosen.iter().map(|&i| functions[&masks[i]].canonicalize()).collect();
        let storage = subsets_up_to(m, n)
            .into_iter()
            .map(|set| {
                let pattern = set.iter().fold(0u8, |acc, &q| acc | 1 << q);
                let point = (0..1usize << s)
                    .find(|&p| search.patterns[p] == pattern)
                    .expect("every required pattern is realized");
                (set, BitTable::from_mask(point as u64, s))
            })
            .collect();
        let scheme = ExplicitScheme::new(m, n, s, trees, storage)?;
        debug_assert!(scheme.is_exact());
        Some(scheme)
    } else {
        None
    };
    Ok(SearchCertificate {
        universe_size: m,
        capacity: n,
        space: s,
        probes: t,
        function_count: masks.len(),
        nodes_visited: search.nodes,
        outcome: if found { SearchOutcome::Found } else { SearchOutcome::None },
        inequality_holds: tradeoff_feasible(m as u64, n as u64, s as u64, t as u64),
        elapsed_seconds: started.elapsed().as_secs_f64(),
        scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: try every storage assignment of the `2^s` tables to the
    /// sets and every tuple of functions, straight from the definition.
    fn brute_force_exists(m: usize, n: usize, s: usize, t: usize) -> bool {
        let funcs: Vec<u64> = depth_bounded_functions(s, t).into_keys().collect();
        let sets = subsets_up_to(m, n);
        let mut choice = vec![0usize; m];
        loop {
            let ok = sets.iter().all(|set| {
                (0..1usize << s).any(|p| {
                    (0..m).all(|q| (funcs[choice[q]] >> p & 1 == 1) == set.contains(&q))
                })
            });
            if ok {
                return true;
            }
            let mut i = 0;
            loop {
                if i == m {
                    return false;
                }
                choice[i] += 1;
                if choice[i] < funcs.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn function_counts() {
        // depth 1 on s variables: constants plus y_j and its negation
        assert_eq!(depth_bounded_functions(3, 1).len(), 2 + 2 * 3);
        // every function on one variable
        assert_eq!(depth_bounded_functions(1, 5).len(), 4);
        // depth 2 reaches every function of 2 variables
        assert_eq!(depth_bounded_functions(2, 2).len(), 16);
        for (f, tree) in depth_bounded_functions(3, 2) {
            assert!(tree.depth() <= 2);
            for p in 0..8 {
                assert_eq!(tree.evaluate_mask(p), f >> p & 1 == 1);
            }
        }
    }

    #[test]
    fn documented_examples() {
        let cfg = SearchConfig::default();
        let found = exhaustive_search(3, 1, 3, 1, &cfg).unwrap();
        assert_eq!(found.outcome, SearchOutcome::Found);
        assert!(found.scheme.as_ref().unwrap().is_exact());
        let none = exhaustive_search(3, 1, 2, 1, &cfg).unwrap();
        assert_eq!(none.outcome, SearchOutcome::None);
        let c = exhaustive_search(4, 1, 2, 2, &cfg).unwrap();
        assert!(!c.inequality_holds);
        assert_eq!(c.outcome, SearchOutcome::None);
    }

    #[test]
    fn agrees_with_brute_force() {
        let cfg = SearchConfig::default();
        for (m, n, s, t) in [(2, 1, 1, 1), (2, 1, 2, 1), (3, 1, 2, 2), (3, 2, 2, 2), (2, 2, 2, 1), (3, 1, 3, 1)] {
            let c = exhaustive_search(m, n, s, t, &cfg).unwrap();
            assert_eq!(c.outcome == SearchOutcome::Found, brute_force_exists(m, n, s, t), "{m} {n} {s} {t}");
        }
    }

    #[test]
    fn caps_reject() {
        let cfg = SearchConfig::default();
        assert!(matches!(exhaustive_search(6, 1, 3, 1, &cfg), Err(VerifierError::ResourceCap(_))));
        assert!(matches!(exhaustive_search(3, 1, 7, 1, &cfg), Err(VerifierError::ResourceCap(_))));
        assert!(matches!(exhaustive_search(3, 4, 3, 1, &cfg), Err(VerifierError::InvalidInput(_))));
        let tiny = SearchConfig { node_budget: 3, ..cfg };
        assert!(matches!(exhaustive_search(4, 2, 4, 2, &tiny), Err(VerifierError::ResourceCap(_))));
    }

    #[test]
    fn found_schemes_store_and_query() {
        let c = exhaustive_search(3, 2, 3, 2, &SearchConfig::default()).unwrap();
        let scheme = c.scheme.unwrap();
        let mut rng = crate::seed::Seed(0).rng();
        for set in subsets_up_to(3, 2) {
            let inst = MembershipInstance::new(3, 2, set.clone()).unwrap();
            let table = scheme.store(&inst).unwrap();
            for q in 0..3 {
                assert_eq!(scheme.query(&table, q, &mut rng).unwrap().present, set.contains(&q));
            }
        }
        let text = serde_json::to_string(&scheme).unwrap();
        let back: ExplicitScheme = serde_json::from_str(&text).unwrap();
        assert_eq!(back, scheme);
    }
}
