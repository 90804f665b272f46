//! Interest point detection on triangle meshes.
//!
//! The pipeline smooths the mesh at several Gaussian scales, scores every
//! vertex by ring-wise harmonic means of tangent-plane distances and normal
//! angles, multiplies the normalized scores across scales, keeps strict
//! local maxima over ring neighborhoods and finally drops weak maxima by an
//! exact `l0`-penalized selection. The [`eval`] module scores detections
//! against human-annotated ground truth with geodesic matching, IOU and F1.
//!
//! ```
//! use meship_core::{detect, shapes, DetectorConfig};
//!
//! let cube = shapes::subdivided_cube(12);
//! let found = detect(&cube, &DetectorConfig::default()).unwrap();
//! assert_eq!(found.points.len(), 8);
//! ```

pub mod detector;
pub mod error;
pub mod eval;
pub mod io;
pub mod measures;
pub mod mesh;
pub mod refine;
pub mod response;
pub mod scale_space;
pub mod shapes;

pub use detector::{detect, Detection, DetectorConfig};
pub use error::{Error, Result};
pub use mesh::{bbox_diagonal, compute_vertex_normals, k_rings, Mesh, NormalField, RingNeighborhoods};
pub use refine::{brute_force_refine, sparse_refine, InterestPointSet};
pub use response::{Candidate, CandidateSet, ResponseTerms};
