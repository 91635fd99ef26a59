use std::collections::HashMap;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{
    check_instance, check_members, check_query, check_table, Answer, BitTable, CoinScheme,
    MembershipScheme, SchemeError, SchemeKind,
};
use crate::model::{MembershipInstance, SchemeParams};
use crate::seed::Seed;

/// Sizing factors for [`oneprobe_random_build`]:
/// `s = ceil(space_factor * n log2 m / eps^2)` and `d = ceil(degree_factor * log2 m / eps)`.
///
/// A non-member's error is roughly the density of set bits, about
/// `(degree_factor / space_factor) * eps`. The defaults were calibrated so that
/// the worst non-member over the whole universe stays below `eps` at
/// `m = 1024, n = 8, eps = 0.1` across many seeds; they are empirical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneProbeConfig {
    pub degree_factor: f64,
    pub space_factor: f64,
}

impl Default for OneProbeConfig {
    fn default() -> Self {
        Self { degree_factor: 4.0, space_factor: 8.0 }
    }
}

/// One-probe randomized scheme: element `x` owns a list of `d` table locations
/// (repeats allowed); storing `S` sets every location owned by a member; a query
/// reads one uniformly chosen location from the list.
#[derive(Clone, Debug)]
pub struct RandomizedOneProbeScheme {
    params: SchemeParams,
    degree: usize,
    /// Row-major `m x d`.
    locations: Vec<u32>,
    planted_member_error: f64,
    seed: Option<Seed>,
    config: Option<OneProbeConfig>,
}

impl RandomizedOneProbeScheme {
    /// Scheme with explicitly given probe lists, all of the same length.
    pub fn from_probe_sets(
        capacity: usize,
        space: usize,
        nominal_error: f64,
        probe_sets: &[Vec<usize>],
    ) -> Result<Self, SchemeError> {
        let universe = probe_sets.len();
        let degree = probe_sets.first().map_or(0, Vec::len);
        if degree == 0 {
            return Err(SchemeError::InvalidParams("probe sets must be non-empty".into()));
        }
        if space > u32::MAX as usize {
            return Err(SchemeError::InvalidParams(format!("space {space} too large")));
        }
        let mut locations = Vec::with_capacity(universe * degree);
        for (x, set) in probe_sets.iter().enumerate() {
            if set.len() != degree {
                return Err(SchemeError::InvalidParams(format!(
                    "element {x} has {} locations, expected {degree}",
                    set.len()
                )));
            }
            for &loc in set {
                if loc >= space {
                    return Err(SchemeError::InvalidParams(format!(
                        "location {loc} outside table of {space} bits"
                    )));
                }
                locations.push(loc as u32);
            }
        }
        let params = SchemeParams::new(universe, capacity, space, 1, nominal_error)?;
        Ok(Self { params, degree, locations, planted_member_error: 0.0, seed: None, config: None })
    }

    /// Scheme whose `d` locations per element are drawn uniformly from `0..space`.
    pub fn random(
        universe: usize,
        capacity: usize,
        space: usize,
        degree: usize,
        nominal_error: f64,
        seed: Seed,
    ) -> Result<Self, SchemeError> {
        if space == 0 || degree == 0 {
            return Err(SchemeError::InvalidParams(format!(
                "need s >= 1 and d >= 1, got s={space} d={degree}"
            )));
        }
        if space > u32::MAX as usize {
            return Err(SchemeError::InvalidParams(format!("space {space} too large")));
        }
        let params = SchemeParams::new(universe, capacity, space, 1, nominal_error)?;
        let stream = seed.split("probe-sets");
        let mut locations = Vec::with_capacity(universe * degree);
        for x in 0..universe {
            let mut rng = stream.split_index(x as u64).rng();
            locations.extend((0..degree).map(|_| rng.random_range(0..space as u32)));
        }
        Ok(Self {
            params,
            degree,
            locations,
            planted_member_error: 0.0,
            seed: Some(seed),
            config: None,
        })
    }

    /// Makes storage leave up to `rate * d` of each member's locations at 0, choosing
    /// only locations no other member owns, so each member errs with probability at
    /// most `rate`. Turns the scheme into a genuinely two-sided one for amplification
    /// experiments.
    pub fn with_planted_member_error(mut self, rate: f64) -> Result<Self, SchemeError> {
        if !(0.0..1.0).contains(&rate) {
            return Err(SchemeError::InvalidParams(format!("planted error {rate} not in [0, 1)")));
        }
        self.planted_member_error = rate;
        Ok(self)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn seed(&self) -> Option<Seed> {
        self.seed
    }

    pub fn config(&self) -> Option<OneProbeConfig> {
        self.config
    }

    pub fn planted_member_error(&self) -> f64 {
        self.planted_member_error
    }

    pub fn probe_set(&self, x: usize) -> &[u32] {
        &self.locations[x * self.degree..(x + 1) * self.degree]
    }

    /// Exact error probability of the one-probe query for `x`: the fraction of its
    /// locations holding the wrong bit.
    pub fn exact_error(&self, table: &BitTable, x: usize, is_member: bool) -> f64 {
        let wrong = self
            .probe_set(x)
            .iter()
            .filter(|&&loc| table.get(loc as usize) != is_member)
            .count();
        wrong as f64 / self.degree as f64
    }

    /// Worst exact error over members and over non-members: `(max_fp, max_fn)`.
    pub fn worst_case_errors(&self, table: &BitTable, instance: &MembershipInstance) -> (f64, f64) {
        let mut worst = (0.0f64, 0.0f64);
        for x in 0..self.params.universe_size {
            if instance.contains(x) {
                worst.1 = worst.1.max(self.exact_error(table, x, true));
            } else {
                worst.0 = worst.0.max(self.exact_error(table, x, false));
            }
        }
        worst
    }

    fn plant_errors(&self, members: &[usize], table: &mut BitTable) {
        let mut owners: HashMap<u32, usize> = HashMap::new();
        for &x in members {
            let mut seen: Vec<u32> = self.probe_set(x).to_vec();
            seen.sort_unstable();
            seen.dedup();
            for loc in seen {
                *owners.entry(loc).or_default() += 1;
            }
        }
        let budget = (self.planted_member_error * self.degree as f64 + 1e-9).floor() as usize;
        for &x in members {
            let set = self.probe_set(x);
            let mut planted = 0;
            let mut done: Vec<u32> = Vec::new();
            for &loc in set {
                if done.contains(&loc) || owners[&loc] != 1 {
                    continue;
                }
                done.push(loc);
                let multiplicity = set.iter().filter(|&&l| l == loc).count();
                if planted + multiplicity <= budget {
                    table.set(loc as usize, false);
                    planted += multiplicity;
                }
                if planted == budget {
                    break;
                }
            }
        }
    }
}

/// Builds the random one-probe scheme sized for error `epsilon`.
pub fn oneprobe_random_build(
    m: usize,
    n: usize,
    epsilon: f64,
    config: OneProbeConfig,
    seed: Seed,
) -> Result<RandomizedOneProbeScheme, SchemeError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(SchemeError::InvalidParams(format!("eps {epsilon} not in (0, 1/2)")));
    }
    if m < 2 || n == 0 {
        return Err(SchemeError::InvalidParams(format!("need m >= 2 and n >= 1, got m={m} n={n}")));
    }
    let log_m = (m as f64).log2();
    let space = (config.space_factor * n as f64 * log_m / (epsilon * epsilon)).ceil();
    let degree = (config.degree_factor * log_m / epsilon).ceil();
    if !(space >= 1.0 && degree >= 1.0) {
        return Err(SchemeError::InvalidParams(format!(
            "factors give s={space} d={degree}; both must be at least 1"
        )));
    }
    let mut scheme =
        RandomizedOneProbeScheme::random(m, n, space as usize, degree as usize, epsilon, seed)?;
    scheme.config = Some(config);
    Ok(scheme)
}

impl CoinScheme for RandomizedOneProbeScheme {
    fn universe_size(&self) -> usize {
        self.params.universe_size
    }

    fn capacity(&self) -> usize {
        self.params.capacity
    }

    fn space(&self) -> usize {
        self.params.space
    }

    fn coin_arity(&self) -> usize {
        self.degree
    }

    fn coin_count(&self) -> usize {
        1
    }

    fn store_set(&self, members: &[usize]) -> Result<BitTable, SchemeError> {
        check_members(members, self.params.universe_size, self.params.capacity)?;
        let mut table = BitTable::zeros(self.params.space);
        for &x in members {
            for &loc in self.probe_set(x) {
                table.set(loc as usize, true);
            }
        }
        if self.planted_member_error > 0.0 {
            self.plant_errors(members, &mut table);
        }
        Ok(table)
    }

    fn answer_with_coins(&self, table: &BitTable, q: usize, coins: &[usize]) -> bool {
        table.get(self.probe_set(q)[coins[0]] as usize)
    }
}

impl MembershipScheme for RandomizedOneProbeScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Oneprobe
    }

    fn params(&self) -> &SchemeParams {
        &self.params
    }

    fn store(&self, instance: &MembershipInstance) -> Result<BitTable, SchemeError> {
        check_instance(instance, &self.params)?;
        self.store_set(instance.members())
    }

    fn query(
        &self,
        table: &BitTable,
        q: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Answer, SchemeError> {
        check_query(q, self.params.universe_size)?;
        check_table(table, self.params.space)?;
        let coin = rng.random_range(0..self.degree);
        Ok(Answer { present: self.answer_with_coins(table, q, &[coin]), probes: 1 })
    }
}

/// `k` independent runs of a one-probe scheme, accepting iff more than `3k/4` accept.
#[derive(Clone, Debug)]
pub struct AmplifiedScheme {
    base: RandomizedOneProbeScheme,
    k: usize,
    params: SchemeParams,
}

pub fn amplify(base: RandomizedOneProbeScheme, k: usize) -> Result<AmplifiedScheme, SchemeError> {
    if k == 0 {
        return Err(SchemeError::InvalidParams("repetition count must be at least 1".into()));
    }
    let mut params = base.params.clone().with_repetition(k)?;
    params.probes = k;
    Ok(AmplifiedScheme { base, k, params })
}

impl AmplifiedScheme {
    pub fn base(&self) -> &RandomizedOneProbeScheme {
        &self.base
    }

    pub fn repetitions(&self) -> usize {
        self.k
    }

    /// Accept iff the number of accepting runs exceeds `floor(3k/4)`.
    pub fn accepts(&self, accepting_runs: usize) -> bool {
        accepting_runs > 3 * self.k / 4
    }
}

impl CoinScheme for AmplifiedScheme {
    fn universe_size(&self) -> usize {
        self.params.universe_size
    }

    fn capacity(&self) -> usize {
        self.params.capacity
    }

    fn space(&self) -> usize {
        self.params.space
    }

    fn coin_arity(&self) -> usize {
        self.base.degree
    }

    fn coin_count(&self) -> usize {
        self.k
    }

    fn store_set(&self, members: &[usize]) -> Result<BitTable, SchemeError> {
        self.base.store_set(members)
    }

    fn answer_with_coins(&self, table: &BitTable, q: usize, coins: &[usize]) -> bool {
        let set = self.base.probe_set(q);
        let accepting = coins.iter().filter(|&&c| table.get(set[c] as usize)).count();
        self.accepts(accepting)
    }
}

impl MembershipScheme for AmplifiedScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Amplified
    }

    fn params(&self) -> &SchemeParams {
        &self.params
    }

    fn store(&self, instance: &MembershipInstance) -> Result<BitTable, SchemeError> {
        self.base.store(instance)
    }

    fn query(
        &self,
        table: &BitTable,
        q: usize,
        rng: &mut dyn RngCore,
    ) -> Result<Answer, SchemeError> {
        check_query(q, self.params.universe_size)?;
        check_table(table, self.params.space)?;
        let coins: Vec<usize> = (0..self.k).map(|_| rng.random_range(0..self.base.degree)).collect();
        Ok(Answer { present: self.answer_with_coins(table, q, &coins), probes: self.k })
    }
}
