use rand::RngCore;

use super::{
    check_instance, check_members, check_query, check_table, Answer, BitTable, DecisionTree,
    DeterministicScheme, MembershipScheme, SchemeError, SchemeKind,
};
use crate::model::{MembershipInstance, SchemeParams};

/// Stores the characteristic vector: `s = m`, query `j` reads bit `j`.
#[derive(Clone, Debug)]
pub struct BitVectorScheme {
    params: SchemeParams,
}

impl BitVectorScheme {
    pub fn new(universe_size: usize, capacity: usize) -> Result<Self, SchemeError> {
        let params = SchemeParams::new(universe_size, capacity, universe_size, 1, 0.0)?;
        Ok(Self { params })
    }
}

pub fn bitvector_build(
    instance: &MembershipInstance,
) -> Result<(BitVectorScheme, BitTable), SchemeError> {
    let scheme = BitVectorScheme::new(instance.universe_size(), instance.capacity())?;
    let table = scheme.store(instance)?;
    Ok((scheme, table))
}

impl MembershipScheme for BitVectorScheme {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Bitvector
    }

    fn params(&self) -> &SchemeParams {
        &self.params
    }

    fn store(&self, instance: &MembershipInstance) -> Result<BitTable, SchemeError> {
        check_instance(instance, &self.params)?;
        self.store_set(instance.members())
    }

    fn query(&self, table: &BitTable, q: usize, _: &mut dyn RngCore) -> Result<Answer, SchemeError> {
        check_query(q, self.params.universe_size)?;
        check_table(table, self.params.space)?;
        Ok(Answer { present: table.get(q), probes: 1 })
    }
}

impl DeterministicScheme for BitVectorScheme {
    fn universe_size(&self) -> usize {
        self.params.universe_size
    }

    fn capacity(&self) -> usize {
        self.params.capacity
    }

    fn space(&self) -> usize {
        self.params.space
    }

    fn depth(&self) -> usize {
        1
    }

    fn store_set(&self, members: &[usize]) -> Result<BitTable, SchemeError> {
        check_members(members, self.params.universe_size, self.params.capacity)?;
        let mut table = BitTable::zeros(self.params.space);
        for &x in members {
            table.set(x, true);
        }
        Ok(table)
    }

    fn query_tree(&self, q: usize) -> DecisionTree {
        DecisionTree::read(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Seed;

    #[test]
    fn characteristic_vector() {
        let inst = MembershipInstance::new(4, 1, vec![2]).unwrap();
        let (scheme, table) = bitvector_build(&inst).unwrap();
        assert_eq!(table.to_string(), "0010");
        let mut rng = Seed(1).rng();
        assert!(scheme.query(&table, 2, &mut rng).unwrap().present);
        assert!(!scheme.query(&table, 3, &mut rng).unwrap().present);
        assert!(scheme.query(&table, 4, &mut rng).is_err());

        let empty = MembershipInstance::new(4, 1, vec![]).unwrap();
        let (_, table) = bitvector_build(&empty).unwrap();
        assert_eq!(table.to_string(), "0000");
    }

    #[test]
    fn exhaustive_queries_return_the_set() {
        let mut rng = Seed(3).rng();
        for _ in 0..20 {
            let inst = MembershipInstance::random(40, 7, &mut rng).unwrap();
            let (scheme, table) = bitvector_build(&inst).unwrap();
            let found: Vec<usize> =
                (0..40).filter(|&q| scheme.query_tree(q).evaluate(&table).0).collect();
            assert_eq!(found, inst.members());
        }
    }
}
