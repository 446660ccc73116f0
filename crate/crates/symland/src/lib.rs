//! Critical-topology analysis for least-squares optimization on the real
//! symplectic group Sp(2N,R).
//!
//! Given a target symplectic matrix `W`, the distance functional
//! `J(S) = ||S - W||_F^2` over Sp(2N,R) has a finite set of critical
//! submanifolds. This crate computes the structured singular value
//! decomposition of `W`, enumerates every critical submanifold, evaluates
//! the quadratic form of second derivatives at each one, and runs
//! Riemannian gradient descent to confirm that the landscape is free of
//! suboptimal local minima.
//!
//! Modules:
//! - [`sympcore`]: symplectic linear algebra (group/algebra types,
//!   structured SVD, stabilizers, sampling).
//! - [`landscape`]: the objective, first-order theory, enumeration and
//!   construction of critical submanifolds.
//! - [`hessian`]: second-order quadratic forms, inertia counts,
//!   minimum/saddle classification.
//! - [`compactland`]: the constrained landscape over the maximal compact
//!   subgroup OSp(2N,R).
//! - [`flowopt`]: gradient descent with multistart harness.
//! - [`io`]: matrix file formats (JSON/CSV) and atomic writes.
//! - [`report`]: full analysis reports consumed by the CLI.
//! - [`sumgate`]: the built-in two-mode SUM gate fixture and its
//!   verification suite.

pub mod compactland;
pub mod flowopt;
pub mod hessian;
pub mod io;
pub mod landscape;
pub mod report;
pub mod sumgate;
pub mod sympcore;
pub mod tol;

pub use sympcore::{
    AlgebraElement, OrthoSymplectic, SymplecticForm, SymplecticMatrix, SymplecticSvd,
};
