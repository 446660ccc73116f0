//! Exact-structure symplectic linear algebra.
//!
//! Everything here works over the real symplectic group Sp(2N,R) of
//! matrices `S` with `S^T J S = J`, where `J` is the skew form with `+I_N`
//! in the upper-right block and `-I_N` in the lower-left. Core facts used
//! throughout:
//!
//! - `S^{-1} = J^T S^T J` (no general inversion needed anywhere);
//! - singular values of a symplectic matrix come in reciprocal pairs;
//! - every `S` factors as `S = U D V` with `U, V` orthogonal symplectic
//!   and `D = diag(d, d^{-1})` diagonal symplectic;
//! - the orthogonal symplectic group OSp(2N,R) is isomorphic to U(N) via
//!   `X - iY -> [[X, Y], [-Y, X]]`.
//!
//! All types are immutable after construction and all operations are pure.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::tol;

/// Errors from structure certification and factorization.
#[derive(Debug, Error)]
pub enum SympError {
    #[error("matrix must be square with even dimension, got {rows}x{cols}")]
    Dimension { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not symplectic: residual {residual:.3e} exceeds {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },
    #[error("matrix is not orthogonal: residual {residual:.3e} exceeds {tol:.3e}")]
    NotOrthogonal { residual: f64, tol: f64 },
    #[error("blocks X, Y do not form a unitary X - iY: residual {residual:.3e}")]
    NotUnitary { residual: f64 },
    #[error("singular values cannot be grouped into reciprocal pairs: {detail}")]
    Pairing { detail: String },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("determinant {det:.3e} is not positive; symplectic matrices have det +1")]
    NegativeDeterminant { det: f64 },
}

/// The skew-symmetric form defining Sp(2N,R).
///
/// `J^2 = -I` and `J^T = -J`.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    n: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "mode count must be positive");
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        Self { n, matrix: j }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// `J` as a plain matrix.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    SymplecticForm::new(n).matrix.clone()
}

/// Frobenius norm of `M^T J M - J`.
///
/// Errors on odd or non-square input. The caller compares the returned
/// residual against whatever tolerance is appropriate.
pub fn check_symplectic(m: &DMatrix<f64>) -> Result<f64, SympError> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
        return Err(SympError::Dimension {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(SympError::NonFinite);
    }
    let j = j_matrix(m.nrows() / 2);
    Ok((m.transpose() * &j * m - &j).norm())
}

/// Frobenius norm of `M^T M - I`.
pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let id = DMatrix::identity(m.nrows(), m.ncols());
    (m.transpose() * m - id).norm()
}

/// A certified element of Sp(2N,R).
#[derive(Debug, Clone)]
pub struct SymplecticMatrix {
    n: usize,
    entries: DMatrix<f64>,
    residual: f64,
}

impl SymplecticMatrix {
    /// Certify `m` as symplectic within
    /// `tol::SYMPLECTIC * (1 + ||m||_F^2)` and positive determinant.
    pub fn new(m: DMatrix<f64>) -> Result<Self, SympError> {
        Self::with_tolerance(m, tol::SYMPLECTIC)
    }

    /// Same as [`SymplecticMatrix::new`] with an explicit tolerance.
    pub fn with_tolerance(m: DMatrix<f64>, tol: f64) -> Result<Self, SympError> {
        let residual = check_symplectic(&m)?;
        let bound = tol * (1.0 + m.norm_squared());
        if residual > bound {
            return Err(SympError::NotSymplectic {
                residual,
                tol: bound,
            });
        }
        let det = m.clone().lu().determinant();
        if det <= 0.0 {
            return Err(SympError::NegativeDeterminant { det });
        }
        Ok(Self {
            n: m.nrows() / 2,
            entries: m,
            residual,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: DMatrix::identity(2 * n, 2 * n),
            residual: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension 2N.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Certification residual `||S^T J S - J||_F` recorded at construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Group inverse via `S^{-1} = J^T S^T J`.
pub fn symplectic_inverse(s: &SymplecticMatrix) -> SymplecticMatrix {
    let j = j_matrix(s.n);
    let inv = j.transpose() * s.entries.transpose() * &j;
    SymplecticMatrix {
        n: s.n,
        entries: inv,
        residual: s.residual,
    }
}

/// Inverse of a raw matrix assumed symplectic: `J^T M^T J`.
pub fn symplectic_inverse_raw(m: &DMatrix<f64>) -> DMatrix<f64> {
    let j = j_matrix(m.nrows() / 2);
    j.transpose() * m.transpose() * &j
}

/// A tangent direction: the Lie-algebra element is `J Y` with `Y = Y^T`.
///
/// `Y` is stored exactly symmetrized.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    n: usize,
    y: DMatrix<f64>,
}

impl AlgebraElement {
    pub fn new(y: DMatrix<f64>) -> Result<Self, SympError> {
        if y.nrows() != y.ncols() || !y.nrows().is_multiple_of(2) || y.nrows() == 0 {
            return Err(SympError::Dimension {
                rows: y.nrows(),
                cols: y.ncols(),
            });
        }
        if y.iter().any(|x| !x.is_finite()) {
            return Err(SympError::NonFinite);
        }
        let sym = (&y + y.transpose()) * 0.5;
        Ok(Self {
            n: y.nrows() / 2,
            y: sym,
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            y: DMatrix::zeros(2 * n, 2 * n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The symmetric factor `Y`; the group direction is `J Y`.
    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn norm(&self) -> f64 {
        self.y.norm()
    }
}

/// Matrix exponential of `t * J Y`, certified symplectic.
///
/// Backed by a scaling-and-squaring Pade kernel; accurate to about 1e-12
/// relative error for arguments of norm up to 10.
pub fn exp_algebra(a: &AlgebraElement, t: f64) -> SymplecticMatrix {
    let j = j_matrix(a.n);
    let b = (&j * &a.y) * t;
    let e = b.exp();
    // Overflow for enormous arguments yields an infinite residual; any
    // downstream certification rejects the matrix cleanly.
    let residual = check_symplectic(&e).unwrap_or(f64::INFINITY);
    SymplecticMatrix {
        n: a.n,
        entries: e,
        residual,
    }
}

/// A certified element of OSp(2N,R) = Sp(2N,R) intersected with O(2N).
#[derive(Debug, Clone)]
pub struct OrthoSymplectic {
    base: SymplecticMatrix,
    orth_residual: f64,
}

impl OrthoSymplectic {
    pub fn new(m: DMatrix<f64>) -> Result<Self, SympError> {
        Self::with_tolerance(m, tol::SYMPLECTIC)
    }

    pub fn with_tolerance(m: DMatrix<f64>, tol: f64) -> Result<Self, SympError> {
        let orth_residual = orthogonality_residual(&m);
        if orth_residual > tol * (1.0 + m.norm_squared()) {
            return Err(SympError::NotOrthogonal {
                residual: orth_residual,
                tol: tol * (1.0 + m.norm_squared()),
            });
        }
        let base = SymplecticMatrix::with_tolerance(m, tol)?;
        Ok(Self {
            base,
            orth_residual,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            base: SymplecticMatrix::identity(n),
            orth_residual: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.base.entries
    }

    pub fn base(&self) -> &SymplecticMatrix {
        &self.base
    }

    pub fn orth_residual(&self) -> f64 {
        self.orth_residual
    }
}

/// Embed a unitary `X - iY` as the orthogonal symplectic matrix
/// `[[X, Y], [-Y, X]]`.
///
/// The map is a group isomorphism U(N) -> OSp(2N,R).
pub fn osp_from_unitary(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<OrthoSymplectic, SympError> {
    let n = x.nrows();
    if x.ncols() != n || y.nrows() != n || y.ncols() != n || n == 0 {
        return Err(SympError::Dimension {
            rows: y.nrows(),
            cols: y.ncols(),
        });
    }
    // Unitarity of X - iY: X^T X + Y^T Y = I and X^T Y symmetric.
    let gram = x.transpose() * x + y.transpose() * y - DMatrix::identity(n, n);
    let xty = x.transpose() * y;
    let skew = &xty - xty.transpose();
    let residual = (gram.norm_squared() + skew.norm_squared()).sqrt();
    if residual > tol::SYMPLECTIC * (1.0 + x.norm_squared() + y.norm_squared()) {
        return Err(SympError::NotUnitary { residual });
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(x);
    m.view_mut((0, n), (n, n)).copy_from(y);
    m.view_mut((n, 0), (n, n)).copy_from(&(-y));
    m.view_mut((n, n), (n, n)).copy_from(x);
    OrthoSymplectic::new(m)
}

/// Structured SVD `S = U D V` with `U, V` in OSp(2N,R) and
/// `D = diag(d, d^{-1})`.
///
/// Note the multiplication convention: the right factor is `V` itself,
/// not `V^T`.
#[derive(Debug, Clone)]
pub struct SymplecticSvd {
    u: OrthoSymplectic,
    /// First-half diagonal, descending, each entry >= 1.
    d: DVector<f64>,
    v: OrthoSymplectic,
}

impl SymplecticSvd {
    pub fn from_parts(u: OrthoSymplectic, d: DVector<f64>, v: OrthoSymplectic) -> Result<Self, SympError> {
        let n = u.n();
        if v.n() != n || d.len() != n {
            return Err(SympError::DimensionMismatch {
                left: 2 * n,
                right: d.len(),
            });
        }
        for i in 0..n {
            if d[i] < 1.0 - tol::CLUSTER {
                return Err(SympError::Pairing {
                    detail: format!("d[{i}] = {} is below 1", d[i]),
                });
            }
            if i + 1 < n && d[i + 1] > d[i] + tol::CLUSTER {
                return Err(SympError::Pairing {
                    detail: format!("d is not descending at {i}"),
                });
            }
        }
        Ok(Self { u, d, v })
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn u(&self) -> &OrthoSymplectic {
        &self.u
    }

    /// The N leading singular values (each >= 1, descending).
    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn v(&self) -> &OrthoSymplectic {
        &self.v
    }

    /// `D` as a full 2N x 2N diagonal matrix `diag(d, d^{-1})`.
    pub fn d_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = self.d[i];
            m[(n + i, n + i)] = 1.0 / self.d[i];
        }
        m
    }

    /// `U D V`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.u.matrix() * self.d_matrix() * self.v.matrix()
    }
}

/// Structured SVD of a symplectic matrix.
///
/// Route: `S^T S` is symmetric positive definite and symplectic; its
/// eigenvectors come in `(v, -Jv)` pairs with reciprocal eigenvalue pairs
/// `(lambda, 1/lambda)`. Assembling `R = [v_1 .. v_N | -Jv_1 .. -Jv_N]`
/// gives an orthogonal symplectic congruence diagonalizing `S^T S`, and
/// `U = S R D^{-1}`, `V = R^T`. Eigenvalues inside the unit band
/// `|d - 1| <= tol::CLUSTER` are treated as an exactly degenerate unit
/// cluster (their `d` is set to 1, so reconstruction accuracy degrades
/// gracefully to the band width for borderline inputs).
pub fn symplectic_svd(s: &SymplecticMatrix) -> Result<SymplecticSvd, SympError> {
    symplectic_svd_with(s, tol::CLUSTER)
}

/// [`symplectic_svd`] with an explicit degeneracy band.
pub fn symplectic_svd_with(
    s: &SymplecticMatrix,
    cluster_tol: f64,
) -> Result<SymplecticSvd, SympError> {
    let n = s.n;
    let dim = 2 * n;
    let m = s.entries.transpose() * &s.entries;
    let eig = m.symmetric_eigen();

    // Sort eigenpairs by descending eigenvalue.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let lam = |k: usize| eig.eigenvalues[order[k]];
    let vec = |k: usize| eig.eigenvectors.column(order[k]).into_owned();

    let mut first_half: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut d_vals: Vec<f64> = Vec::with_capacity(n);

    let mut lo = 0usize;
    let mut hi = dim - 1;
    while lo <= hi {
        let d_big = lam(lo).max(0.0).sqrt();
        if d_big > 1.0 + cluster_tol {
            // Reciprocal pair: the small partner must sit at the far end.
            let d_small = lam(hi).max(0.0).sqrt();
            if (d_big * d_small - 1.0).abs() > cluster_tol * d_big.max(1.0) {
                return Err(SympError::Pairing {
                    detail: format!(
                        "singular values {d_big:.12e} and {d_small:.12e} are not reciprocal"
                    ),
                });
            }
            d_vals.push((d_big / d_small).sqrt().max(1.0));
            first_half.push(vec(lo));
            lo += 1;
            hi -= 1;
        } else {
            // Everything remaining lies in the unit band.
            let count = hi - lo + 1;
            if !count.is_multiple_of(2) {
                return Err(SympError::Pairing {
                    detail: format!("unit cluster has odd multiplicity {count}"),
                });
            }
            for k in lo..=hi {
                let d = lam(k).max(0.0).sqrt();
                if (d - 1.0).abs() > cluster_tol {
                    return Err(SympError::Pairing {
                        detail: format!("singular value {d:.12e} is unpaired near the unit band"),
                    });
                }
            }
            let band: Vec<DVector<f64>> = (lo..=hi).map(vec).collect();
            let j = j_matrix(n);
            let mut kept: Vec<DVector<f64>> = Vec::new();
            for cand in &band {
                if kept.len() == count / 2 {
                    break;
                }
                let mut w = cand.clone();
                for u in &kept {
                    let ju = &j * u;
                    w -= u * u.dot(&w);
                    w -= &ju * ju.dot(&w);
                }
                let norm = w.norm();
                if norm > 1e-6 {
                    first_half.push(w / norm);
                    d_vals.push(1.0);
                    kept.push(first_half.last().unwrap().clone());
                }
            }
            if kept.len() != count / 2 {
                return Err(SympError::Pairing {
                    detail: "unit-band eigenspace is not closed under J".to_string(),
                });
            }
            break;
        }
    }
    if d_vals.len() != n {
        return Err(SympError::Pairing {
            detail: format!("assembled {} of {} pairs", d_vals.len(), n),
        });
    }

    // R = [v_1 .. v_N | -J v_1 .. -J v_N] is orthogonal symplectic.
    let j = j_matrix(n);
    let mut r = DMatrix::zeros(dim, dim);
    for (i, v) in first_half.iter().enumerate() {
        r.column_mut(i).copy_from(v);
        r.column_mut(n + i).copy_from(&(-(&j * v)));
    }

    // U = S R D^{-1}; reconstruction U D V = S R R^T is exact up to the
    // orthogonality of R.
    let mut u = &s.entries * &r;
    for (i, &d) in d_vals.iter().enumerate() {
        u.column_mut(i).scale_mut(1.0 / d);
        u.column_mut(n + i).scale_mut(d);
    }
    let mut v = r.transpose();

    // Sign canonicalization: make the first significant entry of each of
    // the N leading U columns positive (flipping the paired column of U
    // and the paired rows of V alongside).
    for i in 0..n {
        let col = u.column(i);
        let lead = col.iter().find(|x| x.abs() > 1e-9).copied().unwrap_or(1.0);
        if lead < 0.0 {
            u.column_mut(i).neg_mut();
            u.column_mut(n + i).neg_mut();
            v.row_mut(i).neg_mut();
            v.row_mut(n + i).neg_mut();
        }
    }

    let u = OrthoSymplectic::new(u)?;
    let v = OrthoSymplectic::new(v)?;
    SymplecticSvd::from_parts(u, DVector::from_vec(d_vals), v)
}

/// One degeneracy cluster of singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueCluster {
    /// Representative value (mean of members).
    pub value: f64,
    /// Positions of the members in the input vector.
    pub members: Vec<usize>,
}

/// Grouping of the N leading singular values into the unit cluster and
/// non-unit clusters (ascending by value).
#[derive(Debug, Clone)]
pub struct Clustering {
    /// Positions whose value is within `tol::CLUSTER` of 1.
    pub unit: Vec<usize>,
    /// Non-unit clusters sorted ascending by representative value.
    pub clusters: Vec<ValueCluster>,
}

/// Union-find clustering with `|d_i - d_j| <= ctol * max(1, d_i)`
/// (symmetrized); the unit cluster collects `|d - 1| <= ctol`.
pub fn cluster_values(d: &[f64], ctol: f64) -> Clustering {
    let n = d.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let close = (d[i] - d[j]).abs() <= ctol * d[i].max(1.0)
                || (d[i] - d[j]).abs() <= ctol * d[j].max(1.0);
            if close {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut unit = Vec::new();
    let mut clusters = Vec::new();
    for (_, members) in groups {
        let mean = members.iter().map(|&i| d[i]).sum::<f64>() / members.len() as f64;
        if (mean - 1.0).abs() <= ctol || members.iter().any(|&i| (d[i] - 1.0).abs() <= ctol) {
            unit.extend(members);
        } else {
            clusters.push(ValueCluster {
                value: mean,
                members,
            });
        }
    }
    unit.sort_unstable();
    clusters.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    Clustering { unit, clusters }
}

/// Which classical group a stabilizer factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// OSp(2n,R), the factor attached to the unit cluster.
    OrthoSymplectic,
    /// O(n), one factor per non-unit cluster.
    Orthogonal,
}

/// Structure of the stabilizer of `D = diag(d, d^{-1})` inside OSp(2N,R):
/// OSp(2 n0, R) for the unit cluster times one O(n_mu) per non-unit
/// cluster.
#[derive(Debug, Clone)]
pub struct StabilizerDescriptor {
    /// Half-multiplicity n0 of the unit cluster (0 when absent).
    pub unit_half_multiplicity: usize,
    /// Factors: the OSp factor first when present, then O(n) factors with
    /// ascending cluster value.
    pub factors: Vec<(GroupKind, usize)>,
    /// Manifold dimension: n0^2 + sum n_mu (n_mu - 1) / 2.
    pub dimension: usize,
}

/// Stabilizer structure of `diag(d, d^{-1})` for the given leading
/// singular values, clustered with `tol::CLUSTER`.
pub fn stabilizer_of(d: &[f64]) -> StabilizerDescriptor {
    let clustering = cluster_values(d, tol::CLUSTER);
    let n0 = clustering.unit.len();
    let mut factors = Vec::new();
    let mut dimension = 0usize;
    if n0 > 0 {
        factors.push((GroupKind::OrthoSymplectic, 2 * n0));
        dimension += n0 * n0;
    }
    for c in &clustering.clusters {
        let k = c.members.len();
        factors.push((GroupKind::Orthogonal, k));
        dimension += k * (k - 1) / 2;
    }
    StabilizerDescriptor {
        unit_half_multiplicity: n0,
        factors,
        dimension,
    }
}

fn symmetric_gaussian(n: usize, spread: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut y = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g: f64 = rng.sample(StandardNormal);
            y[(i, j)] = spread * g;
            y[(j, i)] = y[(i, j)];
        }
    }
    y
}

/// Deterministic random element `exp(J Y)` with `Y` symmetric Gaussian of
/// the given spread. `spread = 0` yields the identity.
pub fn random_symplectic(n: usize, seed: u64, spread: f64) -> SymplecticMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if spread <= 0.0 {
        return SymplecticMatrix::identity(n);
    }
    let y = symmetric_gaussian(2 * n, spread, &mut rng);
    let a = AlgebraElement::new(y).expect("gaussian symmetric matrix is valid");
    exp_algebra(&a, 1.0)
}

/// Random orthogonal matrix (Haar-ish via QR of a Gaussian).
fn random_orthogonal(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    qr.q()
}

/// Random element of the stabilizer of `diag(d, d^{-1})`, built factor by
/// factor: a random O(k) block per non-unit cluster (embedded identically
/// in both halves) and a random OSp(2 n0) block on the unit cluster.
pub fn random_stabilizer(d: &[f64], seed: u64) -> OrthoSymplectic {
    let n = d.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clustering = cluster_values(d, tol::CLUSTER);
    let mut r = DMatrix::<f64>::identity(2 * n, 2 * n);
    for c in &clustering.clusters {
        let k = c.members.len();
        let x = random_orthogonal(k, &mut rng);
        for (a, &pa) in c.members.iter().enumerate() {
            for (b, &pb) in c.members.iter().enumerate() {
                r[(pa, pb)] = x[(a, b)];
                r[(n + pa, n + pb)] = x[(a, b)];
            }
        }
    }
    if !clustering.unit.is_empty() {
        let k = clustering.unit.len();
        // u(k) element: X skew, Y symmetric; embed and exponentiate.
        let mut xs = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in (i + 1)..k {
                let g: f64 = rng.sample(StandardNormal);
                xs[(i, j)] = g;
                xs[(j, i)] = -g;
            }
        }
        let ys = symmetric_gaussian(k, 1.0, &mut rng);
        let mut xi = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for (a, &pa) in clustering.unit.iter().enumerate() {
            for (b, &pb) in clustering.unit.iter().enumerate() {
                xi[(pa, pb)] = xs[(a, b)];
                xi[(n + pa, n + pb)] = xs[(a, b)];
                xi[(pa, n + pb)] = ys[(a, b)];
                xi[(n + pa, pb)] = -ys[(a, b)];
            }
        }
        r *= xi.exp();
    }
    OrthoSymplectic::new(r).expect("constructed stabilizer element is orthogonal symplectic")
}
