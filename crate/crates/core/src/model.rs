//! Shared parameter types and the combinatorial bound evaluators.
//!
//! All counting is exact (`BigUint`); only the reference formulas at the end
//! of the module use floating point. Logarithms are base 2 unless a formula
//! carries `e` explicitly.

use std::collections::HashSet;
use std::f64::consts::E;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameters outside the supported range: {0}")]
    OutOfRange(String),
}

/// A stored subset `S` of the universe `{0, .., m-1}` with `|S| <= n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MembershipInstance {
    universe_size: usize,
    capacity: usize,
    members: Vec<usize>,
}

impl MembershipInstance {
    /// Builds an instance; `members` may be given in any order but must be distinct.
    pub fn new(
        universe_size: usize,
        capacity: usize,
        mut members: Vec<usize>,
    ) -> Result<Self, ModelError> {
        if universe_size == 0 {
            return Err(ModelError::InvalidInstance("universe size must be positive".into()));
        }
        if capacity == 0 || capacity > universe_size {
            return Err(ModelError::InvalidInstance(format!(
                "capacity {capacity} must lie in [1, {universe_size}]"
            )));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::InvalidInstance("duplicate member".into()));
        }
        if let Some(&last) = members.last() {
            if last >= universe_size {
                return Err(ModelError::InvalidInstance(format!(
                    "member {last} outside universe of size {universe_size}"
                )));
            }
        }
        if members.len() > capacity {
            return Err(ModelError::InvalidInstance(format!(
                "{} members exceed capacity {capacity}",
                members.len()
            )));
        }
        Ok(Self { universe_size, capacity, members })
    }

    /// A uniformly random subset of size exactly `capacity`.
    pub fn random<R: Rng + ?Sized>(
        universe_size: usize,
        capacity: usize,
        rng: &mut R,
    ) -> Result<Self, ModelError> {
        if capacity > universe_size {
            return Err(ModelError::InvalidInstance("capacity exceeds universe".into()));
        }
        let members = index::sample(rng, universe_size, capacity).into_vec();
        Self::new(universe_size, capacity, members)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn non_members(&self) -> Vec<usize> {
        (0..self.universe_size).filter(|x| !self.contains(*x)).collect()
    }
}

/// Sizes of a storage/query scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub universe_size: usize,
    pub capacity: usize,
    /// Number of stored bits `s`.
    pub space: usize,
    /// Worst-case probes per query.
    pub probes: usize,
    /// Allowed error probability per query.
    pub error: f64,
    /// Repetition count for amplified schemes.
    pub repetition: Option<usize>,
}

impl SchemeParams {
    pub fn new(
        universe_size: usize,
        capacity: usize,
        space: usize,
        probes: usize,
        error: f64,
    ) -> Result<Self, ModelError> {
        let params = Self { universe_size, capacity, space, probes, error, repetition: None };
        params.validate()?;
        Ok(params)
    }

    pub fn with_repetition(mut self, k: usize) -> Result<Self, ModelError> {
        self.repetition = Some(k);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.universe_size == 0 || self.capacity == 0 || self.capacity > self.universe_size {
            return Err(ModelError::InvalidParams(format!(
                "need 1 <= n <= m, got m={} n={}",
                self.universe_size, self.capacity
            )));
        }
        if self.space == 0 || self.probes == 0 {
            return Err(ModelError::InvalidParams("space and probes must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.error) {
            return Err(ModelError::InvalidParams(format!("error {} not in [0, 1)", self.error)));
        }
        if self.repetition == Some(0) {
            return Err(ModelError::InvalidParams("repetition must be positive".into()));
        }
        Ok(())
    }
}

/// A family of `n`-subsets of `{0, .., m-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFamily {
    pub universe_size: usize,
    pub set_size: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The intersection threshold `floor(n/2)` the greedy construction enforces.
    pub fn intersection_threshold(&self) -> usize {
        self.set_size / 2
    }

    /// Largest `|S_i ∩ S_j|` over all pairs `i != j`, by direct comparison of every pair.
    pub fn max_pairwise_intersection(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.sets.iter().enumerate() {
            for b in &self.sets[i + 1..] {
                best = best.max(sorted_intersection_len(a, b));
            }
        }
        best
    }
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// `C(a, 0) + C(a, 1) + .. + C(a, min(a, b))`.
pub fn binom_sum(a: u64, b: u64) -> BigUint {
    let top = a.min(b);
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for i in 1..=top {
        term = term * BigUint::from(a - i + 1) / BigUint::from(i);
        total += &term;
    }
    total
}

/// Whether `sum_{i<=n} C(m,i) <= sum_{i<=nt} C(s,i)`, the necessary condition for
/// an exact `(s, t)`-scheme storing `n`-subsets of an `m`-element universe.
pub fn tradeoff_feasible(m: u64, n: u64, s: u64, t: u64) -> bool {
    binom_sum(m, n) <= binom_sum(s, n.saturating_mul(t))
}

/// The smallest `s` for which [`tradeoff_feasible`] holds.
pub fn min_space_lower_bound(m: u64, n: u64, t: u64) -> Result<u64, ModelError> {
    if n == 0 || t == 0 || n > m {
        return Err(ModelError::InvalidParams(format!(
            "need m >= n >= 1 and t >= 1, got m={m} n={n} t={t}"
        )));
    }
    let target = binom_sum(m, n);
    // s = m is always feasible because nt >= n.
    let (mut lo, mut hi) = (1u64, m);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if binom_sum(mid, n * t) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// `ceil((m / 4n)^(n/2))`, computed exactly: the least `K` with `K^2 (4n)^n >= m^n`.
pub fn greedy_family_bound(m: usize, n: usize) -> BigUint {
    let lhs = BigUint::from(m).pow(n as u32);
    let rhs = BigUint::from(4 * n).pow(n as u32);
    // integer square root of ceil(lhs / rhs), then fix up.
    let quotient = (&lhs + &rhs - BigUint::one()) / &rhs;
    let mut k = quotient.sqrt();
    while &k * &k * &rhs < lhs {
        k += BigUint::one();
    }
    while !k.is_zero() {
        let smaller = &k - BigUint::one();
        if &smaller * &smaller * &rhs >= lhs {
            k = smaller;
        } else {
            break;
        }
    }
    k
}

/// Greedy family of `n`-subsets with pairwise intersections at most `floor(n/2)`,
/// stopped as soon as it reaches `ceil((m/4n)^(n/2))` sets.
///
/// Candidates are visited in lexicographic order and accepted when they meet
/// every accepted set in at most `floor(n/2)` elements. Returning fewer sets
/// than the bound means the greedy run exhausted all candidates first.
pub fn greedy_family(m: usize, n: usize) -> Result<SetFamily, ModelError> {
    let bound = greedy_family_bound(m, n);
    let limit = bound.to_usize().ok_or_else(|| {
        ModelError::OutOfRange(format!("family bound {bound} does not fit in memory"))
    })?;
    greedy_family_with_limit(m, n, Some(limit))
}

/// Greedy family in lexicographic order; `None` runs to a maximal family.
pub fn greedy_family_with_limit(
    m: usize,
    n: usize,
    limit: Option<usize>,
) -> Result<SetFamily, ModelError> {
    if n == 0 || m < 4 * n {
        return Err(ModelError::InvalidParams(format!(
            "greedy family needs n >= 1 and m >= 4n, got m={m} n={n}"
        )));
    }
    if m > 1 << 16 || n / 2 + 1 > 8 {
        return Err(ModelError::OutOfRange(format!(
            "greedy family supports m <= 65536 and n <= 15, got m={m} n={n}"
        )));
    }
    let mut search = GreedySearch {
        m,
        n,
        key_len: n / 2 + 1,
        limit: limit.unwrap_or(usize::MAX),
        covered: HashSet::new(),
        current: Vec::with_capacity(n),
        sets: Vec::new(),
    };
    if search.limit > 0 {
        search.extend(0);
    }
    Ok(SetFamily { universe_size: m, set_size: n, sets: search.sets })
}

struct GreedySearch {
    m: usize,
    n: usize,
    /// Two sets share more than floor(n/2) elements iff they share a subset of this size.
    key_len: usize,
    limit: usize,
    covered: HashSet<u128>,
    current: Vec<usize>,
    sets: Vec<Vec<usize>>,
}

impl GreedySearch {
    /// Returns `true` once the limit is reached.
    fn extend(&mut self, start: usize) -> bool {
        if self.current.len() == self.n {
            let set = self.current.clone();
            for_each_subset(&set, self.key_len, |key| {
                self.covered.insert(key);
            });
            self.sets.push(set);
            return self.sets.len() >= self.limit;
        }
        let remaining = self.n - self.current.len();
        for x in start..=(self.m - remaining) {
            self.current.push(x);
            if self.newest_is_free() && self.extend(x + 1) {
                return true;
            }
            self.current.pop();
            // Accepting sets below may have covered a subset of the prefix itself.
            if !self.prefix_is_free() {
                break;
            }
        }
        false
    }

    fn newest_is_free(&self) -> bool {
        let len = self.current.len();
        if len < self.key_len {
            return true;
        }
        let (newest, rest) = self.current.split_last().expect("non-empty");
        let mut free = true;
        for_each_subset(rest, self.key_len - 1, |key| {
            if free && self.covered.contains(&push_key(key, *newest)) {
                free = false;
            }
        });
        free
    }

    fn prefix_is_free(&self) -> bool {
        if self.current.len() < self.key_len {
            return true;
        }
        let mut free = true;
        for_each_subset(&self.current, self.key_len, |key| {
            if free && self.covered.contains(&key) {
                free = false;
            }
        });
        free
    }
}

fn push_key(key: u128, element: usize) -> u128 {
    (key << 16) | element as u128
}

/// Packs every `size`-subset of the sorted slice into a key, 16 bits per element.
fn for_each_subset(items: &[usize], size: usize, mut f: impl FnMut(u128)) {
    fn go(items: &[usize], size: usize, key: u128, f: &mut dyn FnMut(u128)) {
        if size == 0 {
            f(key);
            return;
        }
        for i in 0..items.len() {
            if items.len() - i < size {
                break;
            }
            go(&items[i + 1..], size - 1, push_key(key, items[i]), f);
        }
    }
    go(items, size, 0, &mut f);
}

/// Repetition count and error tails for majority-style amplification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationParams {
    /// `4 log(27m) / (3 log(1/(4 e eps)))` before rounding.
    pub exact_ratio: f64,
    pub k: usize,
    /// `(4 e eps)^(k/4)`: error bound on a member when accepting on more than `3k/4` successes.
    pub bound_positive: f64,
    /// `(4 e eps)^(3k/4)`: error bound on a non-member.
    pub bound_negative: f64,
}

/// Error tails `((4e eps)^(k/4), (4e eps)^(3k/4))` for a fixed repetition count.
pub fn amplification_bounds(epsilon: f64, k: usize) -> (f64, f64) {
    let base = 4.0 * E * epsilon;
    (base.powf(k as f64 / 4.0), base.powf(3.0 * k as f64 / 4.0))
}

pub fn amplification_params(m: u64, epsilon: f64) -> Result<AmplificationParams, ModelError> {
    if m < 2 {
        return Err(ModelError::InvalidParams(format!("need m >= 2, got {m}")));
    }
    if !(epsilon > 0.0 && 4.0 * E * epsilon < 1.0) {
        return Err(ModelError::InvalidParams(format!(
            "need 0 < 4 e eps < 1, got eps={epsilon}"
        )));
    }
    let exact_ratio = 4.0 * (27.0 * m as f64).ln() / (3.0 * (1.0 / (4.0 * E * epsilon)).ln());
    let k = exact_ratio.ceil().max(1.0) as usize;
    let (bound_positive, bound_negative) = amplification_bounds(epsilon, k);
    Ok(AmplificationParams { exact_ratio, k, bound_positive, bound_negative })
}

/// Reference values of the error-dependent space lower bounds, each evaluated
/// with constant 1. These are calculators, not certified bounds; a field is
/// `None` when the parameters fall outside that bound's hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBounds {
    /// `eps^(1/p)`.
    pub delta: f64,
    /// `n log(m/n) / (eps^(1/6) log(1/eps))`, one quantum probe, `n/m < eps < 1/8`.
    pub quantum_one_probe: Option<f64>,
    /// Same with `delta` in place of `eps`, `p` quantum probes, `n/m < eps < 2^(-3p)`.
    pub quantum_multi_probe: Option<f64>,
    /// `n log m / (delta^(2/5) log(1/delta))`, `p` classical probes,
    /// `18^(-p) > eps > m^(-1/3)` and `m^(1/3) > 18 n`.
    pub classical_multi_probe: Option<f64>,
}

pub fn lower_bound_formulas(
    m: u64,
    n: u64,
    epsilon: f64,
    p: u32,
) -> Result<ReferenceBounds, ModelError> {
    let (mf, nf) = (m as f64, n as f64);
    if p == 0 || n == 0 || n > m {
        return Err(ModelError::InvalidParams(format!(
            "need p >= 1 and 1 <= n <= m, got m={m} n={n} p={p}"
        )));
    }
    if !(nf / mf < epsilon && epsilon < 1.0) {
        return Err(ModelError::InvalidParams(format!(
            "need n/m < eps < 1, got n/m={} eps={epsilon}",
            nf / mf
        )));
    }
    let delta = epsilon.powf(1.0 / f64::from(p));
    let quantum = |e: f64| nf * (mf / nf).log2() / (e.powf(1.0 / 6.0) * (1.0 / e).log2());
    let quantum_one_probe = (epsilon < 1.0 / 8.0).then(|| quantum(epsilon));
    let quantum_multi_probe =
        (epsilon < 2f64.powi(-3 * p as i32)).then(|| quantum(delta));
    let cube_root = mf.cbrt();
    let classical_ok =
        18f64.powi(-(p as i32)) > epsilon && epsilon > 1.0 / cube_root && cube_root > 18.0 * nf;
    let classical_multi_probe = classical_ok
        .then(|| nf * mf.log2() / (delta.powf(2.0 / 5.0) * (1.0 / delta).log2()));
    Ok(ReferenceBounds { delta, quantum_one_probe, quantum_multi_probe, classical_multi_probe })
}

/// All subsets of `{0, .., m-1}` with at most `n` elements, by size then lexicographically.
pub fn subsets_up_to(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 0..=n.min(m) {
        let mut current = Vec::with_capacity(size);
        fn go(start: usize, m: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == size {
                out.push(cur.clone());
                return;
            }
            for x in start..m {
                if m - x < size - cur.len() {
                    break;
                }
                cur.push(x);
                go(x + 1, m, size, cur, out);
                cur.pop();
            }
        }
        go(0, m, size, &mut current, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_binom_sum(a: u32, b: u32) -> u64 {
        (0u64..1 << a).filter(|x| x.count_ones() <= b).count() as u64
    }

    #[test]
    fn binom_sum_examples() {
        assert_eq!(binom_sum(4, 1), BigUint::from(5u32));
        assert_eq!(binom_sum(5, 5), BigUint::from(32u32));
        assert_eq!(binom_sum(10, 0), BigUint::from(1u32));
        assert_eq!(binom_sum(3, 10), BigUint::from(8u32));
    }

    #[test]
    fn binom_sum_matches_subset_enumeration() {
        for a in 0..=20u32 {
            for b in 0..=a + 1 {
                assert_eq!(
                    binom_sum(a.into(), b.into()),
                    BigUint::from(brute_force_binom_sum(a, b)),
                    "a={a} b={b}"
                );
            }
        }
    }

    #[test]
    fn tradeoff_examples() {
        assert!(tradeoff_feasible(4, 1, 4, 1));
        assert!(!tradeoff_feasible(4, 1, 3, 1));
        for k in 1..30 {
            assert!(tradeoff_feasible(k, k, k, 1));
        }
    }

    #[test]
    fn min_space_examples() {
        assert_eq!(min_space_lower_bound(5, 1, 1).unwrap(), 5);
        assert_eq!(min_space_lower_bound(8, 1, 3).unwrap(), 4);
        assert_eq!(min_space_lower_bound(1, 1, 1).unwrap(), 1);
        assert!(min_space_lower_bound(2, 3, 1).is_err());
    }

    #[test]
    fn one_probe_needs_m_bits() {
        for m in 1..=64 {
            assert_eq!(min_space_lower_bound(m, 1, 1).unwrap(), m);
        }
    }

    #[test]
    fn min_space_is_smallest_feasible() {
        for m in 1..=12u64 {
            for n in 1..=m {
                for t in 1..=4 {
                    let s = min_space_lower_bound(m, n, t).unwrap();
                    assert!(tradeoff_feasible(m, n, s, t));
                    assert!(s == 1 || !tradeoff_feasible(m, n, s - 1, t));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn tradeoff_is_monotone(m in 1u64..40, n in 1u64..6, s in 1u64..40, t in 1u64..4) {
            prop_assume!(n <= m);
            if tradeoff_feasible(m, n, s, t) {
                prop_assert!(tradeoff_feasible(m, n, s + 1, t));
                prop_assert!(tradeoff_feasible(m, n, s, t + 1));
            } else {
                prop_assert!(!tradeoff_feasible(m + 1, n, s, t));
                if n < m {
                    prop_assert!(!tradeoff_feasible(m, n + 1, s, t));
                }
            }
        }

        #[test]
        fn min_space_nonincreasing_in_probes(m in 1u64..200, n in 1u64..8, t in 1u64..6) {
            prop_assume!(n <= m);
            let a = min_space_lower_bound(m, n, t).unwrap();
            let b = min_space_lower_bound(m, n, t + 1).unwrap();
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn family_bound_values() {
        assert_eq!(greedy_family_bound(256, 4), BigUint::from(256u32));
        assert_eq!(greedy_family_bound(512, 4), BigUint::from(1024u32));
        assert_eq!(greedy_family_bound(8, 2), BigUint::from(1u32));
        // (9/4)^(1/2) = 1.5
        assert_eq!(greedy_family_bound(9, 1), BigUint::from(2u32));
        // (16/4)^(1/2) = 2 exactly
        assert_eq!(greedy_family_bound(16, 1), BigUint::from(2u32));
    }

    #[test]
    fn greedy_family_examples() {
        let f = greedy_family(256, 4).unwrap();
        assert!(f.len() >= 256);
        assert!(f.max_pairwise_intersection() <= 2);
        let f = greedy_family(8, 2).unwrap();
        assert!(!f.is_empty());
        assert!(greedy_family(7, 2).is_err());
    }

    #[test]
    fn greedy_family_starts_lexicographically() {
        let f = greedy_family_with_limit(12, 2, Some(3)).unwrap();
        assert_eq!(f.sets, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
        let f = greedy_family_with_limit(16, 4, Some(3)).unwrap();
        assert_eq!(f.sets, vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![0, 1, 6, 7]]);
    }

    /// Naive greedy: scan every n-subset in lexicographic order.
    fn naive_greedy(m: usize, n: usize) -> Vec<Vec<usize>> {
        let mut accepted: Vec<Vec<usize>> = Vec::new();
        for cand in subsets_up_to(m, n).into_iter().filter(|s| s.len() == n) {
            if accepted.iter().all(|a| sorted_intersection_len(a, &cand) <= n / 2) {
                accepted.push(cand);
            }
        }
        accepted.sort();
        accepted
    }

    #[test]
    fn maximal_greedy_matches_naive_scan() {
        for (m, n) in [(8, 2), (12, 3), (13, 3), (16, 4), (20, 5), (24, 6)] {
            let mut f = greedy_family_with_limit(m, n, None).unwrap().sets;
            f.sort();
            assert_eq!(f, naive_greedy(m, n), "m={m} n={n}");
        }
    }

    #[test]
    fn maximal_greedy_exceeds_bound() {
        let f = greedy_family_with_limit(64, 4, None).unwrap();
        assert!(BigUint::from(f.len()) > greedy_family_bound(64, 4));
        assert!(f.max_pairwise_intersection() <= 2);
    }

    #[test]
    fn amplification_example() {
        let (pos, neg) = amplification_bounds(0.01, 8);
        // 16 e^2 / 10^4
        assert!((pos - 0.011_822_49).abs() < 1e-8, "{pos}");
        assert!((neg - pos.powi(3)).abs() < 1e-15);
        let p = amplification_params(1024, 0.01).unwrap();
        assert!(p.exact_ratio <= p.k as f64 && p.k as f64 <= p.exact_ratio + 1.0);
        assert!(p.bound_negative <= p.bound_positive);
        assert!(amplification_params(1024, 1.0 / (4.0 * E)).is_err());
        assert!(amplification_params(1, 0.01).is_err());
        let (small, _) = amplification_bounds(1e-12, 8);
        assert!(small < 1e-20);
    }

    proptest! {
        #[test]
        fn amplification_sandwich(m in 2u64..1_000_000, eps in 1e-6f64..0.09) {
            let p = amplification_params(m, eps).unwrap();
            prop_assert!(p.exact_ratio <= p.k as f64);
            prop_assert!(p.k as f64 <= p.exact_ratio + 1.0);
        }
    }

    #[test]
    fn lower_bound_reference_values() {
        let r = lower_bound_formulas(1 << 20, 16, 1.0 / 64.0, 1).unwrap();
        // 16 * log2(2^16) / (64^(-1/6) * log2(64)) = 256 / (0.5 * 6)
        let expected = 256.0 / 3.0;
        assert!((r.quantum_one_probe.unwrap() - expected).abs() < 1e-9);
        assert_eq!(r.quantum_one_probe, r.quantum_multi_probe);
        assert_eq!(r.classical_multi_probe, None);

        let r = lower_bound_formulas(1 << 20, 1, 2f64.powi(-6), 2).unwrap();
        assert!((r.delta - 0.125).abs() < 1e-15);
        assert_eq!(r.quantum_multi_probe, None);

        assert!(lower_bound_formulas(100, 50, 0.1, 1).is_err());
        assert!(lower_bound_formulas(100, 1, 0.1, 0).is_err());
    }

    #[test]
    fn instance_validation() {
        let inst = MembershipInstance::new(4, 2, vec![3, 1]).unwrap();
        assert_eq!(inst.members(), &[1, 3]);
        assert!(inst.contains(3) && !inst.contains(2));
        assert_eq!(inst.non_members(), vec![0, 2]);
        assert!(MembershipInstance::new(4, 2, vec![4]).is_err());
        assert!(MembershipInstance::new(4, 1, vec![0, 1]).is_err());
        assert!(MembershipInstance::new(4, 2, vec![1, 1]).is_err());
        assert!(SchemeParams::new(4, 1, 4, 1, 1.0).is_err());
        assert!(SchemeParams::new(4, 1, 0, 1, 0.0).is_err());
    }

    #[test]
    fn subsets_enumeration() {
        let all = subsets_up_to(4, 2);
        assert_eq!(all.len(), 11);
        assert_eq!(all[0], Vec::<usize>::new());
        assert_eq!(all[1], vec![0]);
        assert_eq!(all[5], vec![0, 1]);
    }
}
