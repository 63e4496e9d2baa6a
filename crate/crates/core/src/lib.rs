//! Computational laboratory for topological Pach families.
//!
//! The crate covers both directions of the problem at desk scale:
//!
//! * constructions that keep Pach families small: random inverted fillings
//!   for the sphere ([`sphere`]) and two-colored pushed maps ([`coloring`]);
//! * the overlap pipeline that finds a Pach family in any generic planar
//!   map ([`pipeline`]): heavy point, escape path, π-vectors, pigeonhole and
//!   tripartite extraction, with every witness re-verified.
//!
//! Supporting machinery lives in [`join_complex`], [`cochains`],
//! [`geometry`], [`pl_map`] and [`extraction`].

pub mod bits;
pub mod bounds;
pub mod cochains;
pub mod coloring;
pub mod extraction;
pub mod geometry;
pub mod join_complex;
pub mod pipeline;
pub mod pl_map;
pub mod rational;
pub mod sphere;

pub use bits::BitVec;
pub use geometry::{ExactPoint, PointConfiguration, Segment, Triangle};
pub use join_complex::{Face, JoinComplex, Vertex};
pub use cochains::{F2Chain, F2Cochain};
pub use coloring::TwoColoring;
pub use extraction::{PartiteHypergraph, TripartiteGraph};
pub use pipeline::PipelineReport;
pub use pl_map::{PLMap, Polyline};
pub use sphere::PachWitness;
