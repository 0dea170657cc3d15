//! Classical simulation of adaptive-scaling, histogram-driven quantum image
//! watermarking.
//!
//! * [`image`] and [`pgm`]: square grayscale rasters, bit planes, binary PGM.
//! * [`aqsm`]: scale parameters, plane replication and block aggregation.
//! * [`hdwm`]: histogram statistics and the per-pixel embed/extract rules.
//! * [`pipeline`]: embedding, blind extraction, majority refining, key sidecar.
//! * [`attacks`] and [`metrics`]: robustness attacks and quality metrics.
//! * [`qsim`]: reversible circuits for the sub-operations, checked against
//!   the matrix-level code above.
//! * [`experiment`]: seeded batch evaluation with CSV output.

pub mod aqsm;
pub mod attacks;
pub mod error;
pub mod experiment;
pub mod hdwm;
pub mod image;
pub mod metrics;
pub mod pgm;
pub mod pipeline;
pub mod qsim;

pub use error::{Error, Result};
pub use image::{BinaryImage, BitPlane, GrayImage};
pub use pipeline::{embed, extract, StegoImage, WatermarkKey};
