use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{QuantumError, QuantumScheme, RegisterLayout, C64};

/// On-disk form: each layer is a list of rows, each row a list of `[re, im]`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    format: String,
    address_count: usize,
    work_size: usize,
    probes: usize,
    embedding: Vec<usize>,
    layers: Vec<Vec<Vec<[f64; 2]>>>,
}

const FORMAT: &str = "bitprobe-quantum-scheme/1";

pub fn scheme_to_json(scheme: &QuantumScheme) -> String {
    let layout = scheme.layout();
    let file = SchemeFile {
        format: FORMAT.into(),
        address_count: layout.address_count,
        work_size: layout.work_size,
        probes: scheme.probes(),
        embedding: scheme.embedding().to_vec(),
        layers: scheme
            .layers()
            .iter()
            .map(|u| {
                (0..u.nrows())
                    .map(|r| (0..u.ncols()).map(|c| [u[(r, c)].re, u[(r, c)].im]).collect())
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("scheme serializes")
}

/// Strict reader: rejects unknown fields, ragged matrices, a probe count that
/// disagrees with the layers, and non-unitary layers.
pub fn scheme_from_json(text: &str) -> Result<QuantumScheme, QuantumError> {
    let file: SchemeFile =
        serde_json::from_str(text).map_err(|e| QuantumError::Format(e.to_string()))?;
    if file.format != FORMAT {
        return Err(QuantumError::Format(format!("unsupported format {:?}", file.format)));
    }
    if file.layers.len() != file.probes + 1 {
        return Err(QuantumError::Format(format!(
            "{} layers for {} probes",
            file.layers.len(),
            file.probes
        )));
    }
    let layout = RegisterLayout::new(file.address_count, file.work_size)?;
    let d = layout.dimension();
    let mut layers = Vec::with_capacity(file.layers.len());
    for (k, rows) in file.layers.iter().enumerate() {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(QuantumError::Format(format!("layer {k} is not {d}x{d}")));
        }
        if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(QuantumError::Format(format!("layer {k} has non-finite entries")));
        }
        layers.push(DMatrix::from_fn(d, d, |r, c| C64::new(rows[r][c][0], rows[r][c][1])));
    }
    QuantumScheme::new(layout, layers, file.embedding)
}

#[cfg(test)]
mod tests {
    use super::super::random_scheme;
    use super::*;
    use crate::seed::Seed;

    #[test]
    fn round_trip_is_exact() {
        let l = RegisterLayout::new(2, 2).unwrap();
        let s = random_scheme(l, 2, 2, &mut Seed(4).rng()).unwrap();
        let back = scheme_from_json(&scheme_to_json(&s)).unwrap();
        assert_eq!(back.layers(), s.layers());
        assert_eq!(back.embedding(), s.embedding());
    }

    #[test]
    fn strict_reader() {
        let l = RegisterLayout::new(1, 2).unwrap();
        let s = random_scheme(l, 1, 1, &mut Seed(4).rng()).unwrap();
        let text = scheme_to_json(&s);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["layers"][0][0][0] = serde_json::json!([5.0, 0.0]);
        assert!(matches!(
            scheme_from_json(&v.to_string()),
            Err(QuantumError::NotUnitary { layer: 0, .. })
        ));
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["probes"] = serde_json::json!(3);
        assert!(scheme_from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(scheme_from_json(&v.to_string()).is_err());
        assert!(scheme_from_json("not json").is_err());
    }
}
