use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use tabstruct_core::raster::BinarizeMethod;
use tabstruct_core::PipelineConfig;

/// Config file plus per-field overrides. Flags win over the file, the file over defaults.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    /// JSON config file; unknown keys are rejected.
    #[arg(long, global = true, env = "TABSTRUCT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Ignore instances scoring below this.
    #[arg(long, global = true)]
    pub score_threshold: Option<f64>,
    /// `otsu` or a fixed threshold 0-255.
    #[arg(long, global = true, value_parser = parse_binarize)]
    pub binarize: Option<BinarizeMethod>,
    /// Band-joining overlap fraction for borderless tables.
    #[arg(long, global = true)]
    pub overlap_frac: Option<f64>,
    /// Span-candidate threshold as a multiple of the median cell extent.
    #[arg(long, global = true)]
    pub span_factor: Option<f64>,
    /// Separator-crossing tolerance in pixels.
    #[arg(long, global = true)]
    pub margin: Option<u32>,
    /// Ruling lines closer than this collapse into one separator.
    #[arg(long, global = true)]
    pub snap_tol: Option<u32>,
    /// Minimum ruling-line length as a fraction of the table size.
    #[arg(long, global = true)]
    pub min_len_frac: Option<f64>,
    /// Smudge ramp saturation distance in pixels.
    #[arg(long, global = true)]
    pub smudge_cap: Option<u32>,
    /// Text detection: minimum component area.
    #[arg(long, global = true)]
    pub min_area: Option<u64>,
    /// Text detection: largest horizontal gap joining two components.
    #[arg(long, global = true)]
    pub merge_gap_x: Option<u32>,
    /// Text detection: largest vertical gap joining two components.
    #[arg(long, global = true)]
    pub merge_gap_y: Option<u32>,
}

fn parse_binarize(s: &str) -> Result<BinarizeMethod, String> {
    if s.eq_ignore_ascii_case("otsu") {
        return Ok(BinarizeMethod::Otsu);
    }
    s.parse::<u8>()
        .map(BinarizeMethod::Fixed)
        .map_err(|_| format!("expected `otsu` or 0-255, got {s:?}"))
}

impl ConfigArgs {
    pub fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let bytes = crate::read_file(path)?;
                PipelineConfig::from_json(&bytes)
                    .with_context(|| format!("config {}", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        let s = &mut cfg.structure;
        set(&mut cfg.score_threshold, self.score_threshold);
        set(&mut cfg.binarize, self.binarize);
        set(&mut s.borderless.overlap_frac, self.overlap_frac);
        set(&mut s.borderless.span_factor, self.span_factor);
        set(&mut s.borderless.margin, self.margin);
        set(&mut s.bordered.snap_tol, self.snap_tol);
        set(&mut s.bordered.min_len_frac, self.min_len_frac);
        set(&mut s.text.min_area, self.min_area);
        set(&mut s.text.merge_gap_x, self.merge_gap_x);
        set(&mut s.text.merge_gap_y, self.merge_gap_y);
        set(&mut cfg.smudge.cap_distance, self.smudge_cap);
        if let Some(b) = self.binarize {
            cfg.dilation.binarize = b;
            cfg.smudge.binarize = b;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            br#"{"score_threshold":0.3,"structure":{"borderless":{"margin":4}}}"#,
        )
        .unwrap();
        let args = ConfigArgs {
            config: Some(path),
            margin: Some(1),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.score_threshold, 0.3);
        assert_eq!(cfg.structure.borderless.margin, 1);
        assert_eq!(cfg.structure.bordered.snap_tol, 5);
    }

    #[test]
    fn invalid_override_is_rejected() {
        let args = ConfigArgs {
            overlap_frac: Some(2.0),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
        assert_eq!(parse_binarize("128"), Ok(BinarizeMethod::Fixed(128)));
        assert!(parse_binarize("dark").is_err());
    }
}
