//! Table structure recovery from instance-segmentation detections.
//!
//! The crate turns detected table regions and cell boxes into row/column grids
//! with spans, provides the dilation and smudge augmentation transforms used to
//! enlarge training corpora, scores detections with the ICDAR-19, TableBank and
//! ICDAR-13 region metrics, and generates synthetic pages with exact ground truth.

pub mod config;
pub mod detections;
pub mod error;
pub mod eval;
pub mod pipeline;
pub mod raster;
pub mod structure;
pub mod synth;
pub mod transforms;

pub use config::PipelineConfig;
pub use error::{Error, Result};
