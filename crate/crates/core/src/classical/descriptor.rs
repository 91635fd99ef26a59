use serde::{Deserialize, Serialize};

use super::{
    AmplifiedScheme, BitVectorScheme, MembershipScheme, OneProbeConfig, PerfectHashScheme,
    RandomizedOneProbeScheme, SchemeError, SchemeKind,
};
use crate::model::SchemeParams;

/// Serializable summary of how a scheme was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub kind: SchemeKind,
    pub params: SchemeParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<OneProbeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted_member_error: Option<f64>,
}

impl SchemeDescriptor {
    fn plain(scheme: &dyn MembershipScheme) -> Self {
        Self {
            kind: scheme.kind(),
            params: scheme.params().clone(),
            seed: None,
            calibration: None,
            degree: None,
            planted_member_error: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SchemeError> {
        let descriptor: Self =
            serde_json::from_str(text).map_err(|e| SchemeError::Format(e.to_string()))?;
        descriptor.params.validate()?;
        Ok(descriptor)
    }
}

impl From<&BitVectorScheme> for SchemeDescriptor {
    fn from(scheme: &BitVectorScheme) -> Self {
        Self::plain(scheme)
    }
}

impl From<&RandomizedOneProbeScheme> for SchemeDescriptor {
    fn from(scheme: &RandomizedOneProbeScheme) -> Self {
        Self {
            seed: scheme.seed().map(|s| s.0),
            calibration: scheme.config(),
            degree: Some(scheme.degree()),
            planted_member_error: Some(scheme.planted_member_error())
                .filter(|&rate| rate > 0.0),
            ..Self::plain(scheme)
        }
    }
}

impl From<&AmplifiedScheme> for SchemeDescriptor {
    fn from(scheme: &AmplifiedScheme) -> Self {
        Self { kind: SchemeKind::Amplified, params: scheme.params().clone(), ..scheme.base().into() }
    }
}

impl From<&PerfectHashScheme> for SchemeDescriptor {
    fn from(scheme: &PerfectHashScheme) -> Self {
        Self { seed: Some(scheme.seed().0), ..Self::plain(scheme) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{amplify, oneprobe_random_build};
    use crate::seed::Seed;

    #[test]
    fn round_trip_and_fields() {
        let base = oneprobe_random_build(64, 2, 0.05, OneProbeConfig::default(), Seed(3)).unwrap();
        let amp = amplify(base, 4).unwrap();
        let d = SchemeDescriptor::from(&amp);
        assert_eq!(d.kind, SchemeKind::Amplified);
        assert_eq!(d.params.repetition, Some(4));
        assert_eq!(d.seed, Some(3));
        assert_eq!(d.calibration, Some(OneProbeConfig::default()));
        let text = d.to_json();
        assert_eq!(SchemeDescriptor::from_json(&text).unwrap(), d);
        assert!(SchemeDescriptor::from_json("{\"kind\": \"bitvector\"}").is_err());
    }
}
