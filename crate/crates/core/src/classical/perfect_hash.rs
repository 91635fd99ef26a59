//! Two-level hashing scheme with `O(n log m)` bits and `O(log m)` probes.
//!
//! Table layout, all integers most significant bit first:
//!
//! ```text
//! [a1]                                  first-level multiplier
//! [size_i | a_i | offset_i]  x n        one header per bucket
//! [occupied | key]           x 4n       slot area
//! ```
//!
//! With `P` the least prime above `m`, element `x` goes to bucket
//! `((a1 x) mod P) mod n` and, inside bucket `i`, to slot
//! `offset_i + ((a_i x) mod P) mod size_i^2`. The first level is redrawn until
//! the squared bucket sizes sum to at most `4n`; each second level is redrawn
//! until it is collision free. A query reads `a1`, the bucket header and the
//! slot, comparing the stored key with `x` one bit at a time and stopping at the
//! first mismatch.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{
    check_instance, check_query, check_table, Answer, BitTable, MembershipScheme, SchemeError,
    SchemeKind,
};
use crate::model::{MembershipInstance, SchemeParams};
use crate::seed::Seed;

/// Reseeds allowed per level before the build reports failure.
pub const RETRY_BUDGET: usize = 64;

/// Universes up to this size are checked query by query after every build.
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 1 << 16;

/// Sizing constants: `s <= SPACE_CONSTANT * n * L` once `L >= 5` and
/// `probes <= PROBE_CONSTANT * L` once `L >= 7`, where `L = ceil(log2 m)`.
pub const SPACE_CONSTANT: usize = 10;
pub const PROBE_CONSTANT: usize = 6;

fn bits_for(value: u64) -> usize {
    (64 - value.leading_zeros() as usize).max(1)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Field widths and offsets of the table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectHashLayout {
    pub universe_size: usize,
    pub capacity: usize,
    pub prime: u64,
    pub multiplier_bits: usize,
    pub size_bits: usize,
    pub offset_bits: usize,
    pub key_bits: usize,
    pub slot_count: usize,
}

impl PerfectHashLayout {
    pub fn new(universe_size: usize, capacity: usize) -> Self {
        let mut prime = universe_size as u64 + 1;
        while !is_prime(prime) {
            prime += 1;
        }
        let slot_count = 4 * capacity;
        Self {
            universe_size,
            capacity,
            prime,
            multiplier_bits: bits_for(prime - 1),
            size_bits: bits_for(capacity as u64),
            offset_bits: bits_for(slot_count as u64),
            key_bits: bits_for(universe_size.saturating_sub(1) as u64),
            slot_count,
        }
    }

    fn header_bits(&self) -> usize {
        self.size_bits + self.multiplier_bits + self.offset_bits
    }

    fn header_start(&self, bucket: usize) -> usize {
        self.multiplier_bits + bucket * self.header_bits()
    }

    fn slot_start(&self, slot: usize) -> usize {
        self.multiplier_bits + self.capacity * self.header_bits() + slot * (1 + self.key_bits)
    }

    pub fn space(&self) -> usize {
        self.slot_start(self.slot_count)
    }

    /// Worst-case probes of one query.
    pub fn max_probes(&self) -> usize {
        2 * self.multiplier_bits + self.size_bits + self.offset_bits + 1 + self.key_bits
    }

    fn hash(&self, multiplier: u64, x: usize, range: u64) -> u64 {
        (multiplier as u128 * x as u128 % self.prime as u128) as u64 % range
    }
}

#[derive(Clone, Debug)]
pub struct PerfectHashScheme {
    params: SchemeParams,
    layout: PerfectHashLayout,
    seed: Seed,
}

impl PerfectHashScheme {
    pub fn new(universe_size: usize, capacity: usize, seed: Seed) -> Result<Self, SchemeError> {
        let layout = PerfectHashLayout::new(universe_size, capacity);
        let params = SchemeParams::new(
            universe_size,
            capacity,
            layout.space(),
            layout.max_probes(),
            0.0,
        )?;
        Ok(Self { params, layout, seed })
    }

    pub fn layout(&self) -> &PerfectHashLayout {
        &self.layout
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Deterministic query: reads bits through `read`, counting probes.
    pub fn lookup(&self, table: &BitTable, x: usize) -> Answer {
        let layout = &self.layout;
        let mut probes = 0;
        let mut read_uint = |offset: usize, width: usize| {
            let mut value = 0u64;
            for i in 0..width {
                probes += 1;
                value = value << 1 | u64::from(table.get(offset + i));
            }
            value
        };
        let a1 = read_uint(0, layout.multiplier_bits);
        let bucket = layout.hash(a1, x, layout.capacity as u64) as usize;
        let header = layout.header_start(bucket);
        let size = read_uint(header, layout.size_bits);
        if size == 0 {
            return Answer { present: false, probes };
        }
        let a = read_uint(header + layout.size_bits, layout.multiplier_bits);
        let offset = read_uint(header + layout.size_bits + layout.multiplier_bits, layout.offset_bits);
        let slot = offset + layout.hash(a, x, size * size);
        let start = layout.slot_start(slot as usize);
        probes += 1;
        if !table.get(start) {
            return Answer { present: false, probes };
        }
        for i in 0..layout.key_bits {
            probes += 1;
            let expected = (x >> (layout.key_bits - 1 - i)) & 1 == 1;
            if table.get(start + 1 + i) != expected {
                return Answer { present: false, probes };
            }
        }
        Answer { present: true, probes }
    }

    fn build_table(&self, members: &[usize]) -> Result<BitTable, SchemeError> {
        let layout = &self.layout;
        let n = layout.capacity;
        let mut rng = self.seed.split("perfect-hash").split_index(fingerprint(members)).rng();
        let draw = |rng: &mut crate::seed::SeededRng| rng.random_range(1..layout.prime);

        let mut first_level = None;
        for _ in 0..RETRY_BUDGET {
            let a1 = draw(&mut rng);
            let mut buckets = vec![Vec::new(); n];
            for &x in members {
                buckets[layout.hash(a1, x, n as u64) as usize].push(x);
            }
            let squares: usize = buckets.iter().map(|b| b.len() * b.len()).sum();
            if squares <= layout.slot_count {
                first_level = Some((a1, buckets));
                break;
            }
        }
        let (a1, buckets) = first_level
            .ok_or(SchemeError::RetryBudgetExhausted { level: 1, attempts: RETRY_BUDGET })?;

        let mut table = BitTable::zeros(layout.space());
        table.write_uint(0, layout.multiplier_bits, a1);
        let mut offset = 0usize;
        for (i, bucket) in buckets.iter().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            let range = (bucket.len() * bucket.len()) as u64;
            let mut chosen = None;
            for _ in 0..RETRY_BUDGET {
                let a = draw(&mut rng);
                let mut slots: Vec<u64> = bucket.iter().map(|&x| layout.hash(a, x, range)).collect();
                slots.sort_unstable();
                if slots.windows(2).all(|w| w[0] != w[1]) {
                    chosen = Some(a);
                    break;
                }
            }
            let a = chosen
                .ok_or(SchemeError::RetryBudgetExhausted { level: 2, attempts: RETRY_BUDGET })?;
            let header = layout.header_start(i);
            table.write_uint(header, layout.size_bits, bucket.len() as u64);
            table.write_uint(header + layout.size_bits, layout.multiplier_bits, a);
            table.write_uint(
                header + layout.size_bits + layout.multiplier_bits,
                layout.offset_bits,
                offset as u64,
            );
            for &x in bucket {
                let start = layout.slot_start(offset + layout.hash(a, x, range) as usize);
                table.set(start, true);
                table.write_uint(start + 1, layout.key_bits, x as u64);
            }
            offset += range as usize;
        }
        Ok(table)
    }
}

/// Stable digest of a member list, used to derive the per-set hash stream.
fn fingerprint(members: &[usize]) -> u64 {
    members.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &x| {
        (h ^ x as u64).wrapping_mul(0x0100_0000_01b3).rotate_left(17)
    })
}

/// Builds the table for `instance`; universes up to [`EXHAUSTIVE_CHECK_LIMIT`]
/// are verified against every possible query before returning.
pub fn perfect_hash_build(
    instance: &MembershipInstance,
    seed: Seed,
) -> Result<(PerfectHashScheme, BitTable), SchemeError> {
    let scheme = PerfectHashScheme::new(instance.universe_size(), instance.capacity(), seed)?;
    let table = scheme.store(instance)?;
    if instance.universe_size() <= EXHAUSTIVE_CHECK_LIMIT {
        for q in 0..instance.universe_size() {
            if scheme.lookup(&table, q).present != instance.contains(q) {
                return Err(SchemeError::Inexact { query: q });
            }
        }
    }
    Ok((scheme, table))
}

impl MembershipScheme for PerfectHashScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::PerfectHash
    }

    fn params(&self) -> &SchemeParams {
        &self.params
    }

    fn store(&self, instance: &MembershipInstance) -> Result<BitTable, SchemeError> {
        check_instance(instance, &self.params)?;
        self.build_table(instance.members())
    }

    fn query(&self, table: &BitTable, q: usize, _: &mut dyn RngCore) -> Result<Answer, SchemeError> {
        check_query(q, self.params.universe_size)?;
        check_table(table, self.params.space)?;
        Ok(self.lookup(table, q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ceil_log2(m: usize) -> usize {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }

    #[test]
    fn singleton_sets() {
        for x in [0, 1, 17, 255] {
            let inst = MembershipInstance::new(256, 1, vec![x]).unwrap();
            let (scheme, table) = perfect_hash_build(&inst, Seed(x as u64)).unwrap();
            for q in 0..256 {
                assert_eq!(scheme.lookup(&table, q).present, q == x);
            }
        }
    }

    #[test]
    fn random_sets_are_exact() {
        let mut rng = Seed(21).rng();
        for i in 0..20 {
            let inst = MembershipInstance::random(256, 8, &mut rng).unwrap();
            let (scheme, table) = perfect_hash_build(&inst, Seed(i)).unwrap();
            let found: Vec<usize> = (0..256).filter(|&q| scheme.lookup(&table, q).present).collect();
            assert_eq!(found, inst.members());
        }
        // partially filled sets are fine too
        let inst = MembershipInstance::new(256, 8, vec![4, 5]).unwrap();
        assert!(perfect_hash_build(&inst, Seed(0)).is_ok());
        let empty = MembershipInstance::new(256, 8, vec![]).unwrap();
        let (scheme, table) = perfect_hash_build(&empty, Seed(0)).unwrap();
        assert!((0..256).all(|q| !scheme.lookup(&table, q).present));
    }

    #[test]
    fn documented_constants_hold() {
        for log_m in 5..=16 {
            for m in [(1usize << log_m) - 3, 1 << log_m] {
                let l = ceil_log2(m);
                for n in [1, 2, 3, 8, 16, 33, 100, m / 4, m] {
                    if n == 0 || n > m {
                        continue;
                    }
                    let layout = PerfectHashLayout::new(m, n);
                    assert!(layout.space() <= SPACE_CONSTANT * n * l, "m={m} n={n}");
                    if l >= 7 {
                        assert!(layout.max_probes() <= PROBE_CONSTANT * l, "m={m} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn measured_probes_within_layout_bound() {
        let mut rng = Seed(8).rng();
        let inst = MembershipInstance::random(4096, 16, &mut rng).unwrap();
        let (scheme, table) = perfect_hash_build(&inst, Seed(1)).unwrap();
        let worst = (0..4096).map(|q| scheme.lookup(&table, q).probes).max().unwrap();
        assert!(worst <= scheme.layout().max_probes());
        assert!(worst <= PROBE_CONSTANT * 12);
    }

    #[test]
    fn deterministic_storage() {
        let inst = MembershipInstance::new(1000, 5, vec![1, 2, 500, 900, 999]).unwrap();
        let (_, a) = perfect_hash_build(&inst, Seed(4)).unwrap();
        let (_, b) = perfect_hash_build(&inst, Seed(4)).unwrap();
        assert_eq!(a, b);
    }
}
