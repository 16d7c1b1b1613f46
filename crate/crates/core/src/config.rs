//! Every tunable of the toolkit in one JSON-serializable struct.

use serde::{Deserialize, Serialize};

use crate::detections::parse_json;
use crate::error::{Error, Result};
use crate::raster::BinarizeMethod;
use crate::structure::StructureParams;
use crate::transforms::{AugmentParams, DilationParams, SmudgeParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Instances scoring below this are ignored.
    pub score_threshold: f64,
    /// Page binarization before structure recovery.
    pub binarize: BinarizeMethod,
    pub structure: StructureParams,
    pub dilation: DilationParams,
    pub smudge: SmudgeParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            score_threshold: 0.5,
            binarize: BinarizeMethod::Otsu,
            structure: StructureParams::default(),
            dilation: DilationParams::default(),
            smudge: SmudgeParams::default(),
        }
    }
}

impl PipelineConfig {
    /// Parses a (possibly partial) config; missing keys take defaults, unknown keys are errors.
    pub fn from_json(input: &[u8]) -> Result<Self> {
        let cfg: PipelineConfig = parse_json(input).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.score_threshold) {
            return Err(Error::Config(format!(
                "score_threshold must be in [0, 1], got {}",
                self.score_threshold
            )));
        }
        self.structure.validate()?;
        self.dilation.validate()?;
        self.smudge.validate()
    }

    pub fn augment_params(&self) -> AugmentParams {
        AugmentParams {
            dilation: self.dilation,
            smudge: self.smudge,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = PipelineConfig::from_json(
            br#"{"score_threshold":0.7,"structure":{"borderless":{"margin":3}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.score_threshold, 0.7);
        assert_eq!(cfg.structure.borderless.margin, 3);
        assert_eq!(cfg.structure.borderless.overlap_frac, 0.5);
        assert_eq!(cfg.smudge.cap_distance, 15);
    }

    #[test]
    fn unknown_and_out_of_range_keys_fail() {
        assert!(matches!(
            PipelineConfig::from_json(br#"{"score":0.5}"#),
            Err(Error::Config(_))
        ));
        assert!(PipelineConfig::from_json(br#"{"structure":{"bordered":{"tol":1}}}"#).is_err());
        assert!(PipelineConfig::from_json(br#"{"score_threshold":1.5}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = PipelineConfig {
            binarize: BinarizeMethod::Fixed(128),
            ..Default::default()
        };
        let json = serde_json::to_vec(&cfg).unwrap();
        assert_eq!(PipelineConfig::from_json(&json).unwrap(), cfg);
    }
}
