//! Page rasters and the low-level image operations the pipeline is built on.

pub mod binarize;
pub mod components;
pub mod distance;
pub mod geometry;
pub mod image;
pub mod io;
pub mod morphology;
pub mod text;

pub use binarize::{binarize, otsu_threshold, BinarizeMethod};
pub use components::{connected_components, Component, Connectivity};
pub use distance::{distance_transform, DistanceField, Metric};
pub use geometry::{iou, union_area, union_intersection_area, Axis, BBox};
pub use image::{BinaryImage, GrayImage};
pub use morphology::{dilate_binary, erode_binary, open_binary};
pub use text::{text_regions, TextParams};
