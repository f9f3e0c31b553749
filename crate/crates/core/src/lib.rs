//! Rotation-system embeddings of graphs on orientable surfaces, current-graph
//! derivations, and the machinery for building and certifying snug embeddings
//! of prism graphs `K_n x K_2`.

pub mod current;
pub mod pipeline;
pub mod prism;
pub mod search;
pub mod embedding;
pub mod error;

pub use embedding::{Dart, EdgeId, FaceSet, FaceWalk, RotationSystem, Vertex, VertexId};
pub use error::{Error, Result};
