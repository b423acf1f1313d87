//! MS-lesion segmentation for 2-D brain MR slices.
//!
//! The crate provides:
//! - grid types and convolution ([`image`]), PGM/PNG I/O ([`io`]);
//! - preprocessing: binarization and a brain-mask stage ([`preprocess`],
//!   [`morphology`]);
//! - edge detectors: Sobel, Prewitt, Canny, Marr-Hildreth ([`edge`]);
//! - standard and modified (spatially regularized, bias-field-correcting)
//!   fuzzy c-means ([`fcm`]);
//! - the end-to-end pipeline combining Canny edges with FCM clustering
//!   ([`pipeline`]);
//! - synthetic phantoms and evaluation metrics ([`eval`]).
//!
//! ```
//! use lesionseg::eval::{make_phantom, PhantomSpec};
//! use lesionseg::pipeline::{segment_lesions, PipelineConfig};
//!
//! let (image, truth, _bias) = make_phantom(&PhantomSpec::default()).unwrap();
//! let result = segment_lesions(&image, &PipelineConfig::standard(), None).unwrap();
//! let dice = lesionseg::eval::dice(&result.lesion_mask, &truth).unwrap();
//! assert!(dice > 0.8);
//! ```

pub mod edge;
pub mod error;
pub mod eval;
pub mod fcm;
pub mod image;
pub mod io;
pub mod morphology;
pub mod pipeline;
pub mod preprocess;

pub use error::{Error, Result};
pub use image::{BinaryMask, Image2D, Kernel2D};
