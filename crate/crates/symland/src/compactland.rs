//! The landscape constrained to the maximal compact subgroup OSp(2N,R).
//!
//! For an orthogonal symplectic target `W`, the critical points of
//! `J(S) = ||S - W||_F^2` over OSp(2N,R) are the orbits of
//! `S* = W R^T D_m R`, where `D_m = diag(-I_m, I_{N-m}; -I_m, I_{N-m})`
//! and `R` ranges over OSp(2N,R). There are exactly `N + 1` of them with
//! values `8m`, Grassmannian orbit dimension `2m(N-m)`, and inertia
//! `((N-m)^2, m^2, 2m(N-m))` over the `N^2`-dimensional tangent space.
//!
//! Sign convention: the quadratic form here is that of the distance `J`,
//! which on the compact group is `4N - 2 Tr(W^T S)`; the trace-form
//! second-order term is therefore negated so that `m = 0` is the minimum
//! of `J`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::hessian::Inertia;
use crate::sympcore::{j_matrix, OrthoSymplectic, SympError, SymplecticMatrix};
use crate::tol;

#[derive(Debug, Error)]
pub enum CompactError {
    #[error("target is not orthogonal symplectic (orthogonality residual {residual:.3e})")]
    NotCompact { residual: f64 },
    #[error("critical value {value:.6} deviates from 8m = {expected}")]
    ValueMismatch { value: f64, expected: f64 },
    #[error(transparent)]
    Symp(#[from] SympError),
}

/// `D_m = diag(-I_m, I_{N-m}; -I_m, I_{N-m})`.
pub fn d_m_matrix(m: usize, n: usize) -> DMatrix<f64> {
    assert!(m <= n);
    let mut d = DMatrix::<f64>::identity(2 * n, 2 * n);
    for k in 0..m {
        d[(k, k)] = -1.0;
        d[(n + k, n + k)] = -1.0;
    }
    d
}

/// Grassmannian orbit dimension `2m(N-m)` of the `m`-th critical orbit.
pub fn grassmannian_dimension(m: usize, n: usize) -> usize {
    2 * m * (n - m)
}

/// `||W^T S - S^T W||_F`, zero exactly at constrained critical points.
pub fn stationarity_residual(w: &OrthoSymplectic, s: &DMatrix<f64>) -> f64 {
    let wts = w.matrix().transpose() * s;
    (&wts - wts.transpose()).norm()
}

/// One constrained critical orbit.
#[derive(Debug, Clone)]
pub struct CompactCritical {
    /// Count of -1 signs in `D_m`.
    pub m: usize,
    /// `W D_m` (the `R = I` representative).
    pub representative: SymplecticMatrix,
    /// `||S* - W||_F^2 = 8m`.
    pub value: f64,
    /// Orbit dimension `2m(N-m)`.
    pub dimension: usize,
    /// Inertia over the N^2-dimensional compact tangent space.
    pub inertia: Inertia,
}

/// Enumerate all `N + 1` constrained critical orbits of an orthogonal
/// symplectic target.
pub fn compact_enumerate(w: &OrthoSymplectic) -> Result<Vec<CompactCritical>, CompactError> {
    if w.orth_residual() > tol::SYMPLECTIC * (1.0 + w.matrix().norm_squared()) {
        return Err(CompactError::NotCompact {
            residual: w.orth_residual(),
        });
    }
    let n = w.n();
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let s = w.matrix() * d_m_matrix(m, n);
        let value = (&s - w.matrix()).norm_squared();
        let expected = 8.0 * m as f64;
        if (value - expected).abs() > 1e-9 * (1.0 + expected) {
            return Err(CompactError::ValueMismatch { value, expected });
        }
        debug_assert!(stationarity_residual(w, &s) <= 1e-10);
        let representative = SymplecticMatrix::new(s)?;
        out.push(CompactCritical {
            m,
            representative,
            value,
            dimension: grassmannian_dimension(m, n),
            inertia: compact_hqf(m, n).inertia(),
        });
    }
    Ok(out)
}

/// Diagonalized coefficients of the constrained quadratic form of `J` at
/// the `m`-th orbit: `+2 delta_j` on each diagonal variable `a_jj` and
/// `+2 (delta_k + delta_l)` on each of the paired variables
/// `(a_kl, c_kl)`, where `delta` is the sign pattern of `D_m`.
#[derive(Debug, Clone)]
pub struct CompactHqf {
    pub n: usize,
    pub m: usize,
    /// Coefficient of `a_jj^2`, j = 0..N.
    pub diag: Vec<f64>,
    /// Coefficient shared by `a_kl^2` and `c_kl^2` for each k < l.
    pub pairs: Vec<((usize, usize), f64)>,
}

impl CompactHqf {
    /// Sign counts over the N^2 tangent variables.
    pub fn inertia(&self) -> Inertia {
        let mut inertia = Inertia {
            pos: 0,
            neg: 0,
            zero: 0,
            threshold: 0.0,
        };
        let mut add = |c: f64, mult: usize| {
            if c > 0.0 {
                inertia.pos += mult;
            } else if c < 0.0 {
                inertia.neg += mult;
            } else {
                inertia.zero += mult;
            }
        };
        for &c in &self.diag {
            add(c, 1);
        }
        for &(_, c) in &self.pairs {
            add(c, 2);
        }
        inertia
    }
}

/// Closed-form constrained quadratic form at the `m`-th orbit.
pub fn compact_hqf(m: usize, n: usize) -> CompactHqf {
    assert!(m <= n);
    let delta = |j: usize| if j < m { -1.0 } else { 1.0 };
    let diag = (0..n).map(|j| 2.0 * delta(j)).collect();
    let mut pairs = Vec::new();
    for k in 0..n {
        for l in (k + 1)..n {
            pairs.push(((k, l), 2.0 * (delta(k) + delta(l))));
        }
    }
    CompactHqf { n, m, diag, pairs }
}

/// Tangent basis of OSp(2N,R) at the identity, transported to symmetric
/// coordinates: `X = [[A, C], [-C, A]]` with `A` symmetric and `C` skew.
/// Order: `A` upper triangle row-major, then `C` strict upper triangle.
pub fn osp_tangent_basis(n: usize) -> Vec<DMatrix<f64>> {
    let dim = 2 * n;
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in i..n {
            let mut x = DMatrix::<f64>::zeros(dim, dim);
            x[(i, j)] = 1.0;
            x[(j, i)] = 1.0;
            x[(n + i, n + j)] = 1.0;
            x[(n + j, n + i)] = 1.0;
            basis.push(x);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut x = DMatrix::<f64>::zeros(dim, dim);
            x[(i, n + j)] = 1.0;
            x[(j, n + i)] = -1.0;
            x[(n + i, j)] = -1.0;
            x[(n + j, i)] = 1.0;
            basis.push(x);
        }
    }
    basis
}

/// Numerical inertia of the constrained form at the `m`-th orbit,
/// obtained by polarizing `H(X) = -Tr[D_m (J X)^2]` over the compact
/// tangent basis. Independent of the closed form in [`compact_hqf`].
pub fn compact_numerical_inertia(m: usize, n: usize) -> Inertia {
    let d = d_m_matrix(m, n);
    let j = j_matrix(n);
    let h = |x: &DMatrix<f64>| -> f64 {
        let jx = &j * x;
        -(&d * &jx * &jx).trace()
    };
    let basis = osp_tangent_basis(n);
    let dim = basis.len();
    let singles: Vec<f64> = basis.iter().map(&h).collect();
    let mut q = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        q[(k, k)] = singles[k];
        for l in (k + 1)..dim {
            let v = (h(&(&basis[k] + &basis[l])) - singles[k] - singles[l]) / 2.0;
            q[(k, l)] = v;
            q[(l, k)] = v;
        }
    }
    let eig = q.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let band = if max == 0.0 {
        0.0
    } else {
        tol::HESSIAN_ZERO_BAND * max
    };
    let mut inertia = Inertia {
        pos: 0,
        neg: 0,
        zero: 0,
        threshold: tol::HESSIAN_ZERO_BAND,
    };
    for &lambda in eig.eigenvalues.iter() {
        if lambda.abs() <= band {
            inertia.zero += 1;
        } else if lambda > 0.0 {
            inertia.pos += 1;
        } else {
            inertia.neg += 1;
        }
    }
    inertia
}

/// Side-by-side inertia of the constrained and unconstrained problems at
/// the orbit labeled `m`.
#[derive(Debug, Clone, Copy)]
pub struct CompactComparison {
    pub compact: Inertia,
    pub full: Inertia,
    /// `(full - compact)` componentwise; always `(N^2 + N, 0, 0)`.
    pub difference: (i64, i64, i64),
}

pub fn compact_vs_full(m: usize, n: usize) -> CompactComparison {
    let compact = Inertia {
        pos: (n - m) * (n - m),
        neg: m * m,
        zero: 2 * m * (n - m),
        threshold: 0.0,
    };
    let full = Inertia {
        pos: n * n + n + (n - m) * (n - m),
        neg: m * m,
        zero: 2 * m * (n - m),
        threshold: 0.0,
    };
    CompactComparison {
        compact,
        full,
        difference: (
            full.pos as i64 - compact.pos as i64,
            full.neg as i64 - compact.neg as i64,
            full.zero as i64 - compact.zero as i64,
        ),
    }
}
