use rand::Rng;
use serde::{Deserialize, Serialize};

use super::VerifierError;
use crate::classical::{BitTable, CoinScheme};
use crate::seed::Seed;

/// How coin sequences are chosen: all of them in order when there are at most
/// `budget`, otherwise `budget` sequences drawn from `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinBudget {
    pub budget: u64,
    pub seed: Seed,
}

impl Default for CoinBudget {
    fn default() -> Self {
        Self { budget: 1 << 20, seed: Seed(0) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerandomizeStatus {
    /// A sequence correct on at least half of the sets was found.
    Found,
    /// Every sequence was tried and none is correct on half of the sets.
    NoneExists,
    /// The sampling budget ran out; a good sequence may still exist.
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerandomizeResult {
    pub status: DerandomizeStatus,
    /// The returned sequence, or the best one seen when none qualifies.
    pub coins: Vec<usize>,
    /// `passes[i]`: the sequence answers every query correctly on set `i`.
    pub passes: Vec<bool>,
    pub success_count: usize,
    pub sequences_tried: u64,
    pub exhaustive: bool,
}

/// Fixes the coins of `scheme` so that the resulting deterministic scheme is
/// exact on at least half of `sets`.
pub fn derandomize(
    scheme: &dyn CoinScheme,
    sets: &[Vec<usize>],
    budget: CoinBudget,
) -> Result<DerandomizeResult, VerifierError> {
    if sets.is_empty() {
        return Err(VerifierError::InvalidInput("no sets to derandomize over".into()));
    }
    if budget.budget == 0 {
        return Err(VerifierError::InvalidInput("coin budget must be positive".into()));
    }
    let (arity, count) = (scheme.coin_arity(), scheme.coin_count());
    let tables: Vec<BitTable> =
        sets.iter().map(|s| scheme.store_set(s)).collect::<Result<_, _>>()?;
    let m = scheme.universe_size();
    let evaluate = |coins: &[usize]| -> Vec<bool> {
        sets.iter()
            .zip(&tables)
            .map(|(set, table)| {
                (0..m).all(|q| scheme.answer_with_coins(table, q, coins) == set.contains(&q))
            })
            .collect()
    };
    let total = (arity as u128).checked_pow(count as u32);
    let exhaustive = total.is_some_and(|t| t <= budget.budget as u128);
    let mut best: Option<(Vec<usize>, Vec<bool>, usize)> = None;
    let mut tried = 0u64;
    let mut rng = budget.seed.split("coins").rng();
    let mut coins = vec![0usize; count];
    loop {
        if !exhaustive {
            if tried == budget.budget {
                break;
            }
            for c in coins.iter_mut() {
                *c = rng.random_range(0..arity);
            }
        }
        tried += 1;
        let passes = evaluate(&coins);
        let success = passes.iter().filter(|&&p| p).count();
        if 2 * success >= sets.len() {
            return Ok(DerandomizeResult {
                status: DerandomizeStatus::Found,
                coins,
                passes,
                success_count: success,
                sequences_tried: tried,
                exhaustive,
            });
        }
        if best.as_ref().is_none_or(|b| success > b.2) {
            best = Some((coins.clone(), passes, success));
        }
        if exhaustive && !next_sequence(&mut coins, arity) {
            break;
        }
    }
    let (coins, passes, success_count) = best.expect("at least one sequence tried");
    Ok(DerandomizeResult {
        status: if exhaustive { DerandomizeStatus::NoneExists } else { DerandomizeStatus::BudgetExhausted },
        coins,
        passes,
        success_count,
        sequences_tried: tried,
        exhaustive,
    })
}

/// Advances `coins` in lexicographic order (last coin fastest); false after the last.
fn next_sequence(coins: &mut [usize], arity: usize) -> bool {
    for c in coins.iter_mut().rev() {
        *c += 1;
        if *c < arity {
            return true;
        }
        *c = 0;
    }
    false
}
