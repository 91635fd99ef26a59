use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::{compose_with_oracle, max_abs, oracle_matrix, QuantumError, QuantumScheme, C64};
use crate::classical::BitTable;

/// Largest table length whose `2^s` compositions are inverted.
pub const MAX_PARITY_SPACE: usize = 6;

/// `W_x = sum_T (-1)^{[x]_T} A_T` over parity sets `T` with `|T| <= t`. Sets are
/// bit masks over table locations.
#[derive(Clone, Debug)]
pub struct ParityDecomposition {
    pub address_count: usize,
    pub probes: usize,
    pub terms: BTreeMap<u32, DMatrix<C64>>,
    /// Largest entry of any `A_T` with `|T| > t`; zero in exact arithmetic.
    pub high_degree_max: f64,
    /// Largest entry of `W_x - sum_{|T|<=t} (-1)^{[x]_T} A_T` over all tables.
    pub reconstruction_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParitySummary {
    pub address_count: usize,
    pub probes: usize,
    pub terms_kept: usize,
    pub nonzero_terms: usize,
    pub high_degree_max: f64,
    pub reconstruction_error: f64,
}

impl ParityDecomposition {
    pub fn term(&self, set: u32) -> Option<&DMatrix<C64>> {
        self.terms.get(&set)
    }

    /// `sum_T (-1)^{[x]_T} A_T` for the table whose bit `j` is bit `j` of `mask`.
    pub fn reconstruct(&self, mask: u32) -> DMatrix<C64> {
        let d = self.terms.values().next().map_or(0, |a| a.nrows());
        let mut w = DMatrix::zeros(d, d);
        for (&set, a) in &self.terms {
            if (set & mask).count_ones() % 2 == 1 {
                w -= a;
            } else {
                w += a;
            }
        }
        w
    }

    pub fn summary(&self, threshold: f64) -> ParitySummary {
        ParitySummary {
            address_count: self.address_count,
            probes: self.probes,
            terms_kept: self.terms.len(),
            nonzero_terms: self.terms.values().filter(|a| max_abs(a) > threshold).count(),
            high_degree_max: self.high_degree_max,
            reconstruction_error: self.reconstruction_error,
        }
    }
}

/// Fourier inversion `A_T = 2^{-s} sum_x (-1)^{[x]_T} W_x` over all `2^s` tables.
pub fn parity_decompose(scheme: &QuantumScheme) -> Result<ParityDecomposition, QuantumError> {
    let s = scheme.layout().address_count;
    if s > MAX_PARITY_SPACE {
        return Err(QuantumError::ResourceCap(format!(
            "parity decomposition limited to {MAX_PARITY_SPACE} table bits, got {s}"
        )));
    }
    let t = scheme.probes();
    let count = 1usize << s;
    let compositions: Vec<DMatrix<C64>> = (0..count)
        .map(|mask| {
            let oracle = oracle_matrix(&BitTable::from_mask(mask as u64, s), scheme.layout())?;
            Ok(compose_with_oracle(scheme, &oracle))
        })
        .collect::<Result<_, QuantumError>>()?;
    let mut coeffs = compositions.clone();
    let mut half = 1;
    while half < count {
        for block in (0..count).step_by(2 * half) {
            for i in block..block + half {
                let (a, b) = (coeffs[i].clone(), coeffs[i + half].clone());
                coeffs[i] = &a + &b;
                coeffs[i + half] = a - b;
            }
        }
        half *= 2;
    }
    let scale = C64::new(1.0 / count as f64, 0.0);
    let mut terms = BTreeMap::new();
    let mut high_degree_max: f64 = 0.0;
    for (set, a) in coeffs.into_iter().enumerate() {
        let a = a * scale;
        if set.count_ones() as usize <= t {
            terms.insert(set as u32, a);
        } else {
            high_degree_max = high_degree_max.max(max_abs(&a));
        }
    }
    let mut decomposition = ParityDecomposition {
        address_count: s,
        probes: t,
        terms,
        high_degree_max,
        reconstruction_error: 0.0,
    };
    decomposition.reconstruction_error = compositions
        .iter()
        .enumerate()
        .map(|(mask, w)| max_abs(&(w - decomposition.reconstruct(mask as u32))))
        .fold(0.0, f64::max);
    Ok(decomposition)
}

#[cfg(test)]
mod tests {
    use super::super::{compose_scheme, random_scheme, RegisterLayout};
    use super::*;
    use crate::seed::Seed;

    /// Direct expansion of the alternating product: every oracle is
    /// `sum_{T in {{}, {j}}}` of a sign times a projector, so multiplying out gives
    /// each `A_T` as a sum over choices of one location (or none) per probe.
    fn path_expansion(scheme: &QuantumScheme) -> BTreeMap<u32, DMatrix<C64>> {
        let l = scheme.layout();
        let d = l.dimension();
        let s = l.address_count;
        // O_x = P_0 + sum_j (-1)^{x_j} P_j with P_0 the data-bit-0 projector
        let projector = |which: Option<usize>| {
            DMatrix::from_fn(d, d, |r, c| {
                let (j, b, _) = l.decode(r);
                let on = r == c && match which {
                    None => b == 0,
                    Some(k) => b == 1 && j == k,
                };
                C64::new(on as u8 as f64, 0.0)
            })
        };
        let mut paths: BTreeMap<u32, DMatrix<C64>> = BTreeMap::new();
        paths.insert(0, scheme.layers()[0].clone());
        for u in &scheme.layers()[1..] {
            let mut next: BTreeMap<u32, DMatrix<C64>> = BTreeMap::new();
            for (&set, a) in &paths {
                for which in std::iter::once(None).chain((0..s).map(Some)) {
                    let new_set = match which {
                        None => set,
                        Some(k) => set ^ 1 << k,
                    };
                    let term = u * projector(which) * a;
                    *next.entry(new_set).or_insert_with(|| DMatrix::zeros(d, d)) += term;
                }
            }
            paths = next;
        }
        paths
    }

    #[test]
    fn identity_layers_single_probe() {
        let l = RegisterLayout::new(3, 2).unwrap();
        let id = DMatrix::<C64>::identity(12, 12);
        let scheme = QuantumScheme::new(l, vec![id.clone(), id.clone()], vec![0]).unwrap();
        let p = parity_decompose(&scheme).unwrap();
        let nonzero: Vec<u32> =
            p.terms.iter().filter(|(_, a)| max_abs(a) > 1e-12).map(|(&t, _)| t).collect();
        assert_eq!(nonzero, vec![0, 1, 2, 4]);
        for i in 0..12 {
            let (j, b, _) = l.decode(i);
            assert!((p.terms[&0][(i, i)].re - (b == 0) as u8 as f64).abs() < 1e-12);
            assert!((p.terms[&(1 << j)][(i, i)].re - (b == 1) as u8 as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn no_probe_scheme_is_its_only_layer() {
        let l = RegisterLayout::new(2, 2).unwrap();
        let u = super::super::random_unitary(8, &mut Seed(2).rng());
        let scheme = QuantumScheme::new(l, vec![u.clone()], vec![0]).unwrap();
        let p = parity_decompose(&scheme).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert!(max_abs(&(&p.terms[&0] - u)) < 1e-12);
        assert!(p.high_degree_max < 1e-12);
    }

    #[test]
    fn matches_path_expansion_on_random_schemes() {
        let mut rng = Seed(17).rng();
        for (s, z, t) in [(2, 2, 1), (3, 2, 2), (2, 4, 3), (4, 2, 2)] {
            let l = RegisterLayout::new(s, z).unwrap();
            let scheme = random_scheme(l, t, 1, &mut rng).unwrap();
            let p = parity_decompose(&scheme).unwrap();
            assert!(p.reconstruction_error <= 1e-9);
            assert!(p.high_degree_max <= 1e-9);
            let oracle = path_expansion(&scheme);
            for set in 0..1u32 << s {
                let zero = DMatrix::zeros(l.dimension(), l.dimension());
                let want = oracle.get(&set).unwrap_or(&zero);
                let got = p.terms.get(&set).unwrap_or(&zero);
                assert!(max_abs(&(want - got)) < 1e-9, "s={s} t={t} T={set:b}");
            }
            for mask in 0..1u64 << s {
                let w = compose_scheme(&scheme, &BitTable::from_mask(mask, s)).unwrap();
                assert!(max_abs(&(w - p.reconstruct(mask as u32))) <= 1e-9);
            }
        }
    }

    #[test]
    fn rejects_large_tables() {
        let l = RegisterLayout::new(7, 2).unwrap();
        let id = DMatrix::<C64>::identity(28, 28);
        let scheme = QuantumScheme::new(l, vec![id.clone(), id], vec![0]).unwrap();
        assert!(matches!(parity_decompose(&scheme), Err(QuantumError::ResourceCap(_))));
    }
}
