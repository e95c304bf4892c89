//! Minimum-weight unions of `k` edge-disjoint spanning trees, `k`-deeply
//! connected components, and numerical predictions for random graphs.
//!
//! * [`graph`]: multigraphs, random generators, core peeling, edge-list I/O.
//! * [`matroid`]: the union of `k` graphic matroids as a family of forests.
//! * [`deep`]: `k`-deeply connected components and layered representations.
//! * [`ktrees`]: the generalized Kruskal solver and the random graph process.
//! * [`analytic`]: Poisson fixed points, thresholds and the limit weight.
//! * [`experiment`]: Monte-Carlo comparison of the two, with CSV output.

pub mod analytic;
pub mod deep;
pub mod dsu;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod ktrees;
pub mod matroid;
pub mod rng;

pub use error::{Error, Result};
