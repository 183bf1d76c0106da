//! Spherical convex polygons on the unit sphere: lune widths, thickness, and
//! executable characterizations of reduced odd-gons.
//!
//! Modules, bottom-up:
//!
//! - [`kernel`]: points, arcs, great circles, hemispheres, lunes.
//! - [`polygon`]: validated convex polygons, opposite sides, feet `t_i`.
//! - [`width`]: side widths `Δ_i` and thickness by support enumeration.
//! - [`oracle`]: brute-force width estimates on a Fibonacci lattice.
//! - [`reducedness`]: conditions (a)–(d), residuals, witnesses `o_i`.
//! - [`generators`]: regular, perturbed, random and searched odd-gons.

pub mod generators;
pub mod kernel;
pub mod oracle;
pub mod polygon;
pub mod reducedness;
pub mod width;

pub use kernel::{SpherePoint, EPS_GEO, EPS_UNIT};
pub use polygon::{validate, SphericalPolygon};
pub use reducedness::{full_report, ReducednessReport, Verdict, DEFAULT_TOLERANCE};
pub use width::{thickness, WidthProfile};

/// Library version, recorded in generated documents.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
