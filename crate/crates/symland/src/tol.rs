//! Central tolerance constants.
//!
//! All thresholds used for structure certification, clustering and
//! classification live here so that every module and test agrees on them.

/// Symplecticity / orthogonality certification: a candidate matrix `M`
/// passes when `||M^T J M - J||_F <= SYMPLECTIC * (1 + ||M||_F^2)`.
pub const SYMPLECTIC: f64 = 1e-9;

/// Relative reconstruction tolerance for factorizations
/// (`||UDV - S||_F <= RECONSTRUCTION * ||S||_F`).
pub const RECONSTRUCTION: f64 = 1e-9;

/// Singular-value degeneracy grouping: `d_i` and `d_j` belong to one
/// cluster when `|d_i - d_j| <= CLUSTER * max(1, d_i)`; the unit cluster
/// is any `d_i` with `|d_i - 1| <= CLUSTER`.
pub const CLUSTER: f64 = 1e-7;

/// First-order stationarity: a point is accepted as critical when the
/// residual of the critical equation is at most this.
pub const CRITICAL: f64 = 1e-8;

/// Relative zero band for eigenvalue sign counting: an eigenvalue counts
/// as zero when `|lambda| <= HESSIAN_ZERO_BAND * max|lambda|`.
pub const HESSIAN_ZERO_BAND: f64 = 1e-7;

/// Accuracy contract of the matrix exponential for arguments of norm <= 10.
pub const EXPM_ACCURACY: f64 = 1e-12;
