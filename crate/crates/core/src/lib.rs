//! Finite-level computations on layered infinite graphs: finite cuts and the
//! cut space, quotient multigraphs over cut sets, contraction graphs, edge-end
//! detection with star/comb witnesses, and towers of spanning trees.
//!
//! Everything is computed inside a [`Universe`], a finite exploration of the
//! presented graph with an explicit level budget.

pub mod contraction;
pub mod cutspace;
pub mod ends;
pub mod error;
pub mod exec;
pub mod export;
pub mod laws;
pub mod pipeline;
pub mod presentation;
pub mod quotient;
pub mod tree;
pub mod universe;

pub use cutspace::{FiniteCut, Point, Side};
pub use ends::EndDescriptor;
pub use error::{Error, Result};
pub use exec::Exec;
pub use presentation::{parse_presentation, preset, EdgeId, GraphPresentation, VertexId};
pub use quotient::{QuotientGraph, Word};
pub use universe::{Budget, ComponentId, Universe};
