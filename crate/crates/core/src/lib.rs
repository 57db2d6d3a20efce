//! Numerical geometry of submanifolds of `Q^n_ε × R`.
//!
//! Immersions are given as maps on rectangular charts into the flat container
//! `E^{n+2}`. Truncated Taylor jets supply exact derivatives, so curvature
//! identities can be checked to near machine precision.

pub mod ambient;
pub mod catalog;
pub mod derivatives;
pub mod equations;
pub mod error;
pub mod flat_normal;
mod frame;
pub mod immersion;
pub mod jet;
pub mod jet_geometry;
pub mod linalg;
pub mod sampling;
pub mod tolerance;
pub mod warped;

pub use ambient::{AmbientPoint, AmbientSpace};
pub use derivatives::{Chart, ChartMap, GenericMap, ParametricMap};
pub use error::{GeomError, Result};
pub use immersion::{point_geometry, ParametricImmersion, PointGeometry};
pub use jet::{Jet, Scalar};
