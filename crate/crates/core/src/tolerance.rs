//! Numerical thresholds shared by the analysis and verification routines.
//!
//! Jets carry derivatives to machine precision, so residuals of genuine
//! identities land around 1e-12 on O(1) data. The gates below leave several
//! orders of magnitude of headroom while staying far below the size of any
//! real violation.

/// Tangency / normality checks on O(1) coordinates.
pub const TANGENCY: f64 = 1e-9;

/// Relative rank threshold for the Jacobian (times its largest singular value).
pub const RANK_REL: f64 = 1e-8;

/// Below this norm the tangential vertical component `T` counts as zero.
pub const T_ZERO: f64 = 1e-8;

/// Absolute clustering threshold for principal normals after scaling shape
/// operators to unit size.
pub const CLUSTER: f64 = 1e-5;

/// Relative flatness threshold: `max ‖[A_a, A_b]‖ ≤ FLATNESS · max ‖A‖²`.
pub const FLATNESS: f64 = 1e-8;

/// Class-A defect threshold.
pub const CLASS_A: f64 = 1e-6;

/// Maximum entrywise deviation `|Ric − λ g|` accepted as Einstein.
pub const EINSTEIN: f64 = 1e-6;

/// `‖∇⊥H‖` below which the mean curvature counts as parallel.
pub const PARALLEL_MEAN_CURVATURE: f64 = 1e-5;

/// `‖H‖` below which an immersion counts as minimal.
pub const MINIMAL: f64 = 1e-8;

pub const GAUSS: f64 = 1e-6;
pub const CODAZZI: f64 = 1e-5;
pub const RICCI_EQUATION: f64 = 1e-7;
pub const VERTICAL: f64 = 1e-6;
pub const CODAZZI_FLAT: f64 = 1e-5;

/// Extrinsic against intrinsic Ricci tensor, entrywise.
pub const RICCI_TENSOR: f64 = 1e-6;

/// Norm identity for principal normals.
pub const XI_IDENTITY: f64 = 1e-6;

pub const PARALLELISM: f64 = 1e-5;
pub const DISTRIBUTION: f64 = 1e-5;

/// Block form of the second fundamental form of the lifted immersion.
pub const LIFTED_BLOCKS: f64 = 1e-7;

/// Pullback metric of the warped product representation.
pub const WARPED_METRIC: f64 = 1e-9;

/// Minimal angle (radians) between differences of principal normals.
pub const INDEPENDENCE_ANGLE: f64 = 1e-3;
