//! Core library for occlusion-aware instance and semantic segmentation
//! tooling: RLE mask algebra, video-annotation backprojection, consistent
//! image/mask augmentation, loss and ROI kernels with analytic gradients,
//! panoptic-quality evaluation, and occlusion-graph pick planning.

pub mod augment;
pub mod dataset;
pub mod gradcheck;
pub mod loss;
pub mod mask;
pub mod planner;
pub mod pq;
pub mod roi;
pub mod tensor_io;

pub use mask::{BBox, BinaryMask, MaskError, MultiClassMask, Polygon, Rasterization};
