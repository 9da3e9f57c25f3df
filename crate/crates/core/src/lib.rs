//! Magnetic Schrödinger operators on metric graphs and the inverse problem
//! of recovering a graph from the minimal lengths of its periodic orbits,
//! one homology class at a time.
//!
//! The crate is split along the pipeline:
//!
//! * [`graph`]: metric multigraphs, bonds, cycle bases, blocks and the
//!   purely combinatorial oracles (planarity, spanning trees, isomorphism).
//! * [`homology`]: the edge-length inner product and minimal orbit lengths
//!   computed by shortest paths in the free abelian cover.
//! * [`spectrum`]: the secular equation for the Kirchhoff Laplacian with a
//!   constant magnetic 1-form on each edge.
//! * [`trace`]: periodic orbits, trace-formula amplitudes and the smoothed
//!   trace identity.
//! * [`frequency`]: cosine recovery, frequency tables and their lattice
//!   structure.
//! * [`reconstruct`]: Albanese Gram matrix, block structure, planarity,
//!   duals and edge lengths from a frequency table alone.
//! * [`io`]: text formats and the fixture catalogue used by the CLI.

pub mod error;
pub mod frequency;
pub mod graph;
pub mod homology;
pub mod io;
pub mod real;
pub mod reconstruct;
pub mod spectrum;
pub mod trace;

pub use error::{Error, Result};
pub use graph::MetricGraph;
pub use homology::HomologyClass;
pub use real::Real;
