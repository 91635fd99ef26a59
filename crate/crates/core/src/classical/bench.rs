use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use super::{MembershipScheme, SchemeError};
use crate::model::MembershipInstance;
use crate::seed::Seed;

/// Monte-Carlo error estimate of a scheme on one stored set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub false_positive_rate: f64,
    pub false_negative_rate: f64,
    /// Largest probe count seen in any single query.
    pub probes_used: usize,
    pub total_probes: u64,
    pub trials: usize,
    pub seed: u64,
}

/// Runs `trials` queries on uniformly drawn members (for the false-negative rate)
/// and `trials` on uniformly drawn non-members (false-positive rate). A side with
/// nothing to draw from reports rate 0.
pub fn empirical_error(
    scheme: &dyn MembershipScheme,
    instance: &MembershipInstance,
    trials: usize,
    seed: Seed,
) -> Result<ErrorEstimate, SchemeError> {
    if trials == 0 {
        return Err(SchemeError::InvalidParams("trials must be at least 1".into()));
    }
    let table = scheme.store(instance)?;
    let members = instance.members().to_vec();
    let non_members = instance.non_members();
    let mut probes_used = 0;
    let mut total_probes = 0u64;
    let mut run_side = |pool: &[usize], want: bool, label: &str| -> Result<f64, SchemeError> {
        if pool.is_empty() {
            return Ok(0.0);
        }
        let mut pick_rng = seed.split(label).split("pick").rng();
        let mut coin_rng = seed.split(label).split("coins").rng();
        let mut errors = 0usize;
        for _ in 0..trials {
            let q = *pool.choose(&mut pick_rng).expect("non-empty pool");
            let answer = scheme.query(&table, q, &mut coin_rng)?;
            probes_used = probes_used.max(answer.probes);
            total_probes += answer.probes as u64;
            if answer.present != want {
                errors += 1;
            }
        }
        Ok(errors as f64 / trials as f64)
    };
    let false_negative_rate = run_side(&members, true, "members")?;
    let false_positive_rate = run_side(&non_members, false, "non-members")?;
    Ok(ErrorEstimate {
        false_positive_rate,
        false_negative_rate,
        probes_used,
        total_probes,
        trials,
        seed: seed.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{bitvector_build, perfect_hash_build};

    #[test]
    fn exact_schemes_have_zero_error() {
        let mut rng = Seed(1).rng();
        let inst = MembershipInstance::random(200, 10, &mut rng).unwrap();
        let (bv, _) = bitvector_build(&inst).unwrap();
        let est = empirical_error(&bv, &inst, 1000, Seed(2)).unwrap();
        assert_eq!((est.false_positive_rate, est.false_negative_rate, est.probes_used), (0.0, 0.0, 1));

        let (ph, _) = perfect_hash_build(&inst, Seed(3)).unwrap();
        let est = empirical_error(&ph, &inst, 1000, Seed(2)).unwrap();
        assert_eq!((est.false_positive_rate, est.false_negative_rate), (0.0, 0.0));
        assert!(est.probes_used <= ph.layout().max_probes());
    }

    #[test]
    fn empty_set_and_reproducibility() {
        let inst = MembershipInstance::new(50, 3, vec![]).unwrap();
        let (bv, _) = bitvector_build(&inst).unwrap();
        let a = empirical_error(&bv, &inst, 100, Seed(5)).unwrap();
        assert_eq!(a.false_negative_rate, 0.0);
        assert_eq!(a, empirical_error(&bv, &inst, 100, Seed(5)).unwrap());
        assert!(empirical_error(&bv, &inst, 0, Seed(5)).is_err());
    }
}
