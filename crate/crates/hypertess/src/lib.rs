//! Delaunay and Voronoi tessellations of hyperbolic space `H^n`.
//!
//! Points of `H^n` live on the upper sheet of the hyperboloid
//! `{x | x∘x = -1, x0 > 0}` in Minkowski space `R^{n+1}`, where
//! `x∘y = -x0*y0 + x1*y1 + ... + xn*yn`. The Delaunay tessellation of a
//! finite site set is obtained by taking the convex hull of the sites in
//! `R^{n+1}`, keeping the faces visible from the origin, and projecting
//! them back to the hyperboloid along rays through the origin. Each top
//! cell carries a circumsphere that is a metric sphere, a horosphere, or
//! an equidistant hypersurface, depending on the causal type of its
//! support plane.
//!
//! The crate has a dual-mode arithmetic kernel: all combinatorial
//! decisions can run over exact rationals (`num::BigRational`), while a
//! floating kernel with explicit epsilon policies serves rendering and
//! irrational fixtures.
//!
//! Batch workloads (oracle corpora, membership sampling, complex checks)
//! run data-parallel through rayon when the `parallel` feature (default)
//! is enabled, and fall back to sequential iteration otherwise.

pub mod delaunay;
pub mod exec;
pub mod hull;
pub mod linalg;
pub mod lorentz;
pub mod models;
pub mod orbit;
pub mod scalar;
pub mod verify;
pub mod voronoi;

pub mod cli;

pub use scalar::{GeomScalar, Rat, Sign};
