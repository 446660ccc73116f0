//! The distance objective on Sp(2N,R), its first-order theory, and the
//! complete enumeration and construction of critical submanifolds.
//!
//! For a symplectic target `W = U0 E V0` (structured SVD), every critical
//! point of `J(S) = ||S - W||_F^2` has the form `S* = U0 R^T P R V0` with
//! `R` in the stabilizer of `E` and `P = D L` a characteristic matrix:
//! `D` diagonal positive symplectic, `L` symmetric orthogonal symplectic
//! commuting with `D`. Characteristic matrices are labeled by index sets:
//! per target singular value `omega > 1` a slot can carry
//!
//! - a type I value `d = omega` with `L = +1`,
//! - a type II value `d = omega^{-1/3}` with `L = -1`, or
//! - together with a partner value (`omega_a <= omega_b`,
//!   admissible when `omega_b^{1/3} <= omega_a`), a paired type III value
//!   `d = (omega_b / omega_a)^{1/2}` with a rotation-like `L` block of
//!   angle `x_ab`;
//!
//! while the unit cluster splits into `+1` and `-1` signs.
//!
//! Slot conventions: the canonical basis orders the leading diagonal of
//! `E` descending (slot `i` pairs with slot `N+i`). Within a cluster,
//! slots are allocated type I first, then type II, then type III
//! participations in lexicographic pair order. In the canonical basis a
//! type III block couples slot `i` (smaller omega) to slot `N+j`; an
//! equivalent "interleaved" basis, used for the second-order analysis,
//! rotates each partner pair so the coupling sits inside the leading
//! half.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sympcore::{
    self, check_symplectic, cluster_values, symplectic_inverse_raw, AlgebraElement,
    OrthoSymplectic, SympError, SymplecticMatrix, SymplecticSvd,
};
use crate::tol;

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("matrix is not in the stabilizer of E: residual {residual:.3e}")]
    StabilizerViolation { residual: f64 },
    #[error(transparent)]
    Symp(#[from] SympError),
}

/// One non-unit degeneracy cluster of the target spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCluster {
    pub omega: f64,
    pub multiplicity: usize,
}

/// Clustered leading singular values of the target: `n0` pairs at 1 plus
/// non-unit clusters with strictly increasing `omega > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    n0: usize,
    clusters: Vec<SpectralCluster>,
}

impl SingularSpectrum {
    pub fn new(n0: usize, clusters: Vec<SpectralCluster>) -> Result<Self, LandscapeError> {
        for w in clusters.windows(2) {
            if w[1].omega <= w[0].omega {
                return Err(LandscapeError::InvalidSpectrum(
                    "cluster values must be strictly increasing".into(),
                ));
            }
        }
        for c in &clusters {
            if c.omega <= 1.0 {
                return Err(LandscapeError::InvalidSpectrum(format!(
                    "cluster value {} must exceed 1",
                    c.omega
                )));
            }
            if c.multiplicity == 0 {
                return Err(LandscapeError::InvalidSpectrum("empty cluster".into()));
            }
        }
        if n0 == 0 && clusters.is_empty() {
            return Err(LandscapeError::InvalidSpectrum("empty spectrum".into()));
        }
        Ok(Self { n0, clusters })
    }

    /// Cluster the leading singular values of a structured SVD.
    pub fn from_values(d: &DVector<f64>) -> Self {
        Self::from_values_with(d, tol::CLUSTER)
    }

    /// [`SingularSpectrum::from_values`] with an explicit degeneracy band.
    pub fn from_values_with(d: &DVector<f64>, cluster_tol: f64) -> Self {
        let vals: Vec<f64> = d.iter().copied().collect();
        let clustering = cluster_values(&vals, cluster_tol);
        let clusters = clustering
            .clusters
            .iter()
            .map(|c| SpectralCluster {
                omega: c.value,
                multiplicity: c.members.len(),
            })
            .collect();
        Self {
            n0: clustering.unit.len(),
            clusters,
        }
    }

    /// Half-multiplicity of the unit cluster.
    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn clusters(&self) -> &[SpectralCluster] {
        &self.clusters
    }

    /// Number of modes N.
    pub fn n(&self) -> usize {
        self.n0 + self.clusters.iter().map(|c| c.multiplicity).sum::<usize>()
    }

    /// Canonical slots of cluster `a` (clusters are laid out descending in
    /// omega, so higher clusters come first; the unit cluster sits last).
    pub fn cluster_slots(&self, a: usize) -> std::ops::Range<usize> {
        let start: usize = self
            .clusters
            .iter()
            .skip(a + 1)
            .map(|c| c.multiplicity)
            .sum();
        start..start + self.clusters[a].multiplicity
    }

    /// Canonical slots of the unit cluster.
    pub fn unit_slots(&self) -> std::ops::Range<usize> {
        let n = self.n();
        n - self.n0..n
    }

    /// The canonical diagonal of `E` as a length-2N vector.
    pub fn e_canonical(&self) -> DVector<f64> {
        let n = self.n();
        let mut e = DVector::from_element(2 * n, 1.0);
        for (a, c) in self.clusters.iter().enumerate() {
            for i in self.cluster_slots(a) {
                e[i] = c.omega;
                e[n + i] = 1.0 / c.omega;
            }
        }
        e
    }

    /// Whether clusters `a <= b` may generate a type III block:
    /// `omega_b^{1/3} <= omega_a` (the unit cluster never participates).
    pub fn pair_admissible(&self, a: usize, b: usize) -> bool {
        if a > b || b >= self.clusters.len() {
            return false;
        }
        if a == b {
            return self.clusters[a].multiplicity >= 2;
        }
        self.clusters[b].omega.cbrt() <= self.clusters[a].omega
    }

    /// All admissible pairs in lexicographic order.
    pub fn admissible_pairs(&self) -> Vec<(usize, usize)> {
        let s = self.clusters.len();
        let mut out = Vec::new();
        for a in 0..s {
            for b in a..s {
                if self.pair_admissible(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Rotation angle of the type III block for clusters `a <= b`, in
    /// `[0, pi/2]`; `pi/2` exactly when `a == b`.
    pub fn pair_angle(&self, a: usize, b: usize) -> f64 {
        let wa = self.clusters[a].omega;
        let wb = self.clusters[b].omega;
        let ratio = wa / wb;
        let g = (wa * wb).sqrt();
        let cos_x = ((1.0 / ratio - ratio) / (g - 1.0 / g)).clamp(-1.0, 1.0);
        cos_x.acos()
    }

    /// True when no two distinct clusters admit a type III pairing.
    pub fn widely_spaced(&self) -> bool {
        let s = self.clusters.len();
        for a in 0..s {
            for b in (a + 1)..s {
                if self.pair_admissible(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// A type III block: `count` partner pairs drawn from clusters `a <= b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBlock {
    pub a: usize,
    pub b: usize,
    pub count: usize,
}

/// Label of one critical submanifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalIndexSet {
    /// Count of `+1` signs on the unit cluster.
    pub m0: usize,
    /// Type I multiplicities, one per cluster (ascending omega).
    pub type_i: Vec<usize>,
    /// Type II multiplicities, one per cluster.
    pub type_ii: Vec<usize>,
    /// Type III blocks with nonzero count, lexicographic in `(a, b)`.
    pub pairs: Vec<PairBlock>,
}

impl CriticalIndexSet {
    /// Consistency with a spectrum: per-cluster budgets add up, pairs are
    /// admissible, `m0 <= n0`.
    pub fn validate(&self, spec: &SingularSpectrum) -> Result<(), LandscapeError> {
        let s = spec.clusters().len();
        if self.type_i.len() != s || self.type_ii.len() != s {
            return Err(LandscapeError::InvalidIndexSet(format!(
                "expected {s} clusters"
            )));
        }
        if self.m0 > spec.n0() {
            return Err(LandscapeError::InvalidIndexSet(format!(
                "m0 = {} exceeds n0 = {}",
                self.m0,
                spec.n0()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &self.pairs {
            if !spec.pair_admissible(p.a, p.b) {
                return Err(LandscapeError::InvalidIndexSet(format!(
                    "pair ({}, {}) is not admissible",
                    p.a, p.b
                )));
            }
            if p.count == 0 || !seen.insert((p.a, p.b)) {
                return Err(LandscapeError::InvalidIndexSet(
                    "pair blocks must be unique with positive count".into(),
                ));
            }
        }
        for a in 0..s {
            let used: usize = self.type_i[a]
                + self.type_ii[a]
                + self
                    .pairs
                    .iter()
                    .map(|p| {
                        if p.a == a && p.b == a {
                            2 * p.count
                        } else if p.a == a || p.b == a {
                            p.count
                        } else {
                            0
                        }
                    })
                    .sum::<usize>();
            if used != spec.clusters()[a].multiplicity {
                return Err(LandscapeError::InvalidIndexSet(format!(
                    "cluster {a} uses {used} of {} slots",
                    spec.clusters()[a].multiplicity
                )));
            }
        }
        Ok(())
    }

    /// The label of the global minimum `S* = W`.
    pub fn is_pure_type_i(&self, spec: &SingularSpectrum) -> bool {
        self.m0 == spec.n0()
            && self.pairs.is_empty()
            && self
                .type_i
                .iter()
                .zip(spec.clusters())
                .all(|(&m, c)| m == c.multiplicity)
    }

    pub fn has_type_iii(&self) -> bool {
        !self.pairs.is_empty()
    }

    fn sort_key(&self, pairs_universe: &[(usize, usize)]) -> Vec<usize> {
        let mut key = vec![self.m0];
        key.extend(&self.type_i);
        key.extend(&self.type_ii);
        for &(a, b) in pairs_universe {
            key.push(
                self.pairs
                    .iter()
                    .find(|p| p.a == a && p.b == b)
                    .map_or(0, |p| p.count),
            );
        }
        key
    }
}

/// Exhaustive, duplicate-free enumeration of all index sets, sorted
/// lexicographically in `(m0, type_i, type_ii, pair counts)`.
pub fn enumerate_critical(spec: &SingularSpectrum) -> Vec<CriticalIndexSet> {
    let s = spec.clusters().len();
    let pairs = spec.admissible_pairs();
    let caps: Vec<usize> = spec.clusters().iter().map(|c| c.multiplicity).collect();

    let mut out = Vec::new();
    let mut counts = vec![0usize; pairs.len()];
    let mut caps_left = caps.clone();

    #[allow(clippy::too_many_arguments)]
    fn split_clusters(
        a: usize,
        caps_left: &[usize],
        type_i: &mut Vec<usize>,
        type_ii: &mut Vec<usize>,
        counts: &[usize],
        pairs: &[(usize, usize)],
        spec: &SingularSpectrum,
        out: &mut Vec<CriticalIndexSet>,
    ) {
        if a == caps_left.len() {
            let blocks: Vec<PairBlock> = pairs
                .iter()
                .zip(counts)
                .filter(|(_, &k)| k > 0)
                .map(|(&(a, b), &k)| PairBlock { a, b, count: k })
                .collect();
            for m0 in 0..=spec.n0() {
                out.push(CriticalIndexSet {
                    m0,
                    type_i: type_i.clone(),
                    type_ii: type_ii.clone(),
                    pairs: blocks.clone(),
                });
            }
            return;
        }
        for mi in 0..=caps_left[a] {
            type_i.push(mi);
            type_ii.push(caps_left[a] - mi);
            split_clusters(a + 1, caps_left, type_i, type_ii, counts, pairs, spec, out);
            type_i.pop();
            type_ii.pop();
        }
    }

    fn assign_pairs(
        idx: usize,
        pairs: &[(usize, usize)],
        caps_left: &mut Vec<usize>,
        counts: &mut Vec<usize>,
        spec: &SingularSpectrum,
        out: &mut Vec<CriticalIndexSet>,
    ) {
        if idx == pairs.len() {
            let mut ti = Vec::new();
            let mut tii = Vec::new();
            split_clusters(0, caps_left, &mut ti, &mut tii, counts, pairs, spec, out);
            return;
        }
        let (a, b) = pairs[idx];
        let max_k = if a == b {
            caps_left[a] / 2
        } else {
            caps_left[a].min(caps_left[b])
        };
        for k in 0..=max_k {
            counts[idx] = k;
            if a == b {
                caps_left[a] -= 2 * k;
            } else {
                caps_left[a] -= k;
                caps_left[b] -= k;
            }
            assign_pairs(idx + 1, pairs, caps_left, counts, spec, out);
            if a == b {
                caps_left[a] += 2 * k;
            } else {
                caps_left[a] += k;
                caps_left[b] += k;
            }
            counts[idx] = 0;
        }
    }

    if s == 0 {
        for m0 in 0..=spec.n0() {
            out.push(CriticalIndexSet {
                m0,
                type_i: vec![],
                type_ii: vec![],
                pairs: vec![],
            });
        }
    } else {
        assign_pairs(0, &pairs, &mut caps_left, &mut counts, spec, &mut out);
    }
    out.sort_by_key(|idx| idx.sort_key(&pairs));
    out.dedup();
    out
}

/// Per-slot layout of an index set in the canonical basis.
#[derive(Debug, Clone)]
struct SlotLayout {
    /// (slot, cluster) for type I slots.
    type_i: Vec<(usize, usize)>,
    /// (slot, cluster) for type II slots.
    type_ii: Vec<(usize, usize)>,
    /// Per pair block: (pair, a-side slots, b-side slots).
    pair_slots: Vec<(PairBlock, Vec<usize>, Vec<usize>)>,
    /// Unit-cluster slots carrying +1 / -1.
    unit_plus: Vec<usize>,
    unit_minus: Vec<usize>,
}

fn slot_layout(idx: &CriticalIndexSet, spec: &SingularSpectrum) -> SlotLayout {
    let s = spec.clusters().len();
    let mut cursor: Vec<usize> = (0..s).map(|a| spec.cluster_slots(a).start).collect();
    let mut layout = SlotLayout {
        type_i: Vec::new(),
        type_ii: Vec::new(),
        pair_slots: Vec::new(),
        unit_plus: Vec::new(),
        unit_minus: Vec::new(),
    };
    #[allow(clippy::needless_range_loop)]
    for a in 0..s {
        for _ in 0..idx.type_i[a] {
            layout.type_i.push((cursor[a], a));
            cursor[a] += 1;
        }
        for _ in 0..idx.type_ii[a] {
            layout.type_ii.push((cursor[a], a));
            cursor[a] += 1;
        }
    }
    // Type III participations in lexicographic pair order; within a
    // diagonal pair the a-side slots precede the b-side slots.
    let mut blocks = idx.pairs.clone();
    blocks.sort_by_key(|p| (p.a, p.b));
    for p in blocks {
        let mut a_side = Vec::new();
        let mut b_side = Vec::new();
        for _ in 0..p.count {
            a_side.push(cursor[p.a]);
            cursor[p.a] += 1;
        }
        for _ in 0..p.count {
            b_side.push(cursor[p.b]);
            cursor[p.b] += 1;
        }
        layout.pair_slots.push((p, a_side, b_side));
    }
    let unit = spec.unit_slots();
    for (k, slot) in unit.enumerate() {
        if k < idx.m0 {
            layout.unit_plus.push(slot);
        } else {
            layout.unit_minus.push(slot);
        }
    }
    layout
}

/// Characteristic matrix `P = D L` of one index set, expressed in the
/// canonical basis of `E`.
#[derive(Debug, Clone)]
pub struct CharacteristicMatrix {
    n: usize,
    p: DMatrix<f64>,
    d_diag: DVector<f64>,
    l: DMatrix<f64>,
    source: CriticalIndexSet,
}

impl CharacteristicMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Diagonal of `D` (length 2N; entry `N+i` is the reciprocal of `i`).
    pub fn d_diag(&self) -> &DVector<f64> {
        &self.d_diag
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn source(&self) -> &CriticalIndexSet {
        &self.source
    }
}

/// One type III block resolved to leading-half slots: `slots[k]` couples
/// an a-side slot to a b-side slot.
#[derive(Debug, Clone)]
pub struct PairGroup {
    pub block: PairBlock,
    pub a_slots: Vec<usize>,
    pub b_slots: Vec<usize>,
}

/// The same data in the interleaved basis used for second-order analysis:
/// each type III partner pair is rotated so that its coupling sits inside
/// the leading half, giving `D = diag(Theta, Theta^{-1})`,
/// `D E = diag(Omega, Omega^{-1})` and `L = diag(Phi, Phi)`.
#[derive(Debug, Clone)]
pub struct HqfParts {
    pub n: usize,
    /// Diagonal of `D` (length 2N).
    pub d: DVector<f64>,
    /// Diagonal of `E` (length 2N).
    pub e: DVector<f64>,
    /// `L` (2N x 2N, block-diagonal over the two halves).
    pub l: DMatrix<f64>,
    /// Which leading slots are rotated relative to the canonical basis.
    pub flipped: Vec<bool>,
    /// Slot groups of the type III blocks.
    pub pair_groups: Vec<PairGroup>,
}

impl HqfParts {
    /// The pair-rotation matrix `T` mapping interleaved to canonical
    /// coordinates (`M_canonical = T M_interleaved T^T`).
    pub fn flip_map(&self) -> DMatrix<f64> {
        pair_flip_matrix(self.n, &self.flipped)
    }
}

/// Plane rotation by pi/2 inside each flagged `(j, N+j)` pair.
pub fn pair_flip_matrix(n: usize, flipped: &[bool]) -> DMatrix<f64> {
    let mut t = DMatrix::<f64>::identity(2 * n, 2 * n);
    for (j, &f) in flipped.iter().enumerate() {
        if f {
            t[(j, j)] = 0.0;
            t[(n + j, n + j)] = 0.0;
            t[(j, n + j)] = 1.0;
            t[(n + j, j)] = -1.0;
        }
    }
    t
}

/// Assemble the interleaved `(D, E, L)` triple of an index set.
pub fn hqf_parts(
    idx: &CriticalIndexSet,
    spec: &SingularSpectrum,
) -> Result<HqfParts, LandscapeError> {
    idx.validate(spec)?;
    let n = spec.n();
    let layout = slot_layout(idx, spec);
    let mut d = DVector::from_element(2 * n, 1.0);
    let mut e = spec.e_canonical();
    let mut l = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut flipped = vec![false; n];

    for &(slot, a) in &layout.type_i {
        let w = spec.clusters()[a].omega;
        d[slot] = w;
        d[n + slot] = 1.0 / w;
        l[(slot, slot)] = 1.0;
        l[(n + slot, n + slot)] = 1.0;
    }
    for &(slot, a) in &layout.type_ii {
        let w = spec.clusters()[a].omega;
        let v = w.powf(-1.0 / 3.0);
        d[slot] = v;
        d[n + slot] = 1.0 / v;
        l[(slot, slot)] = -1.0;
        l[(n + slot, n + slot)] = -1.0;
    }
    for slot in &layout.unit_plus {
        l[(*slot, *slot)] = 1.0;
        l[(n + slot, n + slot)] = 1.0;
    }
    for slot in &layout.unit_minus {
        l[(*slot, *slot)] = -1.0;
        l[(n + slot, n + slot)] = -1.0;
    }
    let mut pair_groups = Vec::new();
    for (p, a_side, b_side) in &layout.pair_slots {
        let wa = spec.clusters()[p.a].omega;
        let wb = spec.clusters()[p.b].omega;
        let dv = (wb / wa).sqrt();
        let x = spec.pair_angle(p.a, p.b);
        let (sin_x, cos_x) = x.sin_cos();
        for (&i, &j) in a_side.iter().zip(b_side) {
            // b-side pair rotated: its leading slot carries omega_b^{-1}.
            flipped[j] = true;
            e[j] = 1.0 / wb;
            e[n + j] = wb;
            d[i] = dv;
            d[n + i] = 1.0 / dv;
            d[j] = dv;
            d[n + j] = 1.0 / dv;
            l[(i, i)] = cos_x;
            l[(j, j)] = -cos_x;
            l[(n + i, n + i)] = cos_x;
            l[(n + j, n + j)] = -cos_x;
            l[(i, j)] = sin_x;
            l[(j, i)] = sin_x;
            l[(n + i, n + j)] = sin_x;
            l[(n + j, n + i)] = sin_x;
        }
        pair_groups.push(PairGroup {
            block: p.clone(),
            a_slots: a_side.clone(),
            b_slots: b_side.clone(),
        });
    }
    Ok(HqfParts {
        n,
        d,
        e,
        l,
        flipped,
        pair_groups,
    })
}

/// Build the characteristic matrix of an index set in the canonical basis.
pub fn build_characteristic(
    idx: &CriticalIndexSet,
    spec: &SingularSpectrum,
) -> Result<CharacteristicMatrix, LandscapeError> {
    let parts = hqf_parts(idx, spec)?;
    let n = parts.n;
    let t = parts.flip_map();
    let mut p_intl = parts.l.clone();
    for r in 0..2 * n {
        for c in 0..2 * n {
            p_intl[(r, c)] *= parts.d[r];
        }
    }
    let p = &t * p_intl * t.transpose();
    let d_intl = DMatrix::from_diagonal(&parts.d);
    let d_can = &t * d_intl * t.transpose();
    let l_can = &t * &parts.l * t.transpose();
    Ok(CharacteristicMatrix {
        n,
        p,
        d_diag: d_can.diagonal(),
        l: l_can,
        source: idx.clone(),
    })
}

/// The objective data: target, structured SVD, clustered spectrum.
#[derive(Debug, Clone)]
pub struct Objective {
    w: SymplecticMatrix,
    svd: SymplecticSvd,
    spectrum: SingularSpectrum,
}

impl Objective {
    pub fn new(w: SymplecticMatrix) -> Result<Self, LandscapeError> {
        Self::with_cluster_tol(w, tol::CLUSTER)
    }

    /// [`Objective::new`] with an explicit degeneracy band for both the
    /// factorization and the spectrum clustering.
    pub fn with_cluster_tol(w: SymplecticMatrix, cluster_tol: f64) -> Result<Self, LandscapeError> {
        let svd = sympcore::symplectic_svd_with(&w, cluster_tol)?;
        let spectrum = SingularSpectrum::from_values_with(svd.d(), cluster_tol);
        Ok(Self { w, svd, spectrum })
    }

    /// Build from an externally supplied factorization (the target is its
    /// reconstruction).
    pub fn from_svd(svd: SymplecticSvd) -> Result<Self, LandscapeError> {
        let w = SymplecticMatrix::new(svd.reconstruct())?;
        let spectrum = SingularSpectrum::from_values(svd.d());
        Ok(Self { w, svd, spectrum })
    }

    pub fn w(&self) -> &SymplecticMatrix {
        &self.w
    }

    pub fn svd(&self) -> &SymplecticSvd {
        &self.svd
    }

    pub fn spectrum(&self) -> &SingularSpectrum {
        &self.spectrum
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }
}

/// `J(S) = ||S - W||_F^2`.
pub fn objective_value(
    s: &SymplecticMatrix,
    w: &SymplecticMatrix,
) -> Result<f64, LandscapeError> {
    if s.dim() != w.dim() {
        return Err(LandscapeError::DimensionMismatch {
            left: s.dim(),
            right: w.dim(),
        });
    }
    Ok((s.matrix() - w.matrix()).norm_squared())
}

/// Gradient factor `G = sym((S^T S - W^T S) J)`: the first derivative of
/// `J` along `S exp(t J Y)` at `t = 0` equals `2 Tr(Y G)` for every
/// symmetric `Y`, and `G = 0` exactly characterizes critical points.
pub fn gradient(
    s: &SymplecticMatrix,
    w: &SymplecticMatrix,
) -> Result<AlgebraElement, LandscapeError> {
    if s.dim() != w.dim() {
        return Err(LandscapeError::DimensionMismatch {
            left: s.dim(),
            right: w.dim(),
        });
    }
    let j = sympcore::j_matrix(s.n());
    let sts = s.matrix().transpose() * s.matrix();
    let wts = w.matrix().transpose() * s.matrix();
    let m = (sts - wts) * &j;
    let g = (&m + m.transpose()) * 0.5;
    Ok(AlgebraElement::new(g)?)
}

/// Residual of the first-order stationarity equation
/// `(S^T S - (S^T S)^{-1}) - (S^T W - (S^T W)^{-1})`, with both inverses
/// taken through the symplectic identity (no general inversion).
pub fn critical_residual(
    s: &SymplecticMatrix,
    w: &SymplecticMatrix,
) -> Result<f64, LandscapeError> {
    if s.dim() != w.dim() {
        return Err(LandscapeError::DimensionMismatch {
            left: s.dim(),
            right: w.dim(),
        });
    }
    let sts = s.matrix().transpose() * s.matrix();
    let stw = s.matrix().transpose() * w.matrix();
    let lhs = &sts - symplectic_inverse_raw(&sts);
    let rhs = &stw - symplectic_inverse_raw(&stw);
    Ok((lhs - rhs).norm())
}

/// `S* = U0 R^T P R V0` for `R` in the stabilizer of `E` (identity when
/// `r` is `None`).
pub fn build_representative(
    idx: &CriticalIndexSet,
    obj: &Objective,
    r: Option<&OrthoSymplectic>,
) -> Result<SymplecticMatrix, LandscapeError> {
    let characteristic = build_characteristic(idx, obj.spectrum())?;
    let e = DMatrix::from_diagonal(&obj.spectrum().e_canonical());
    let middle = match r {
        None => characteristic.p().clone(),
        Some(r) => {
            let moved = r.matrix().transpose() * &e * r.matrix();
            let residual = (moved - &e).norm();
            if residual > tol::SYMPLECTIC * (1.0 + e.norm_squared()) {
                return Err(LandscapeError::StabilizerViolation { residual });
            }
            r.matrix().transpose() * characteristic.p() * r.matrix()
        }
    };
    let s = obj.svd().u().matrix() * middle * obj.svd().v().matrix();
    debug_assert!(check_symplectic(&s).is_ok());
    Ok(SymplecticMatrix::new(s)?)
}

/// Critical value of one index set, by construction and in closed form.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalValue {
    /// `||P - E||_F^2`, identical to `||S* - W||_F^2` by orthogonal
    /// invariance. Authoritative.
    pub constructive: f64,
    /// Closed form with the unit-cluster term `8 (n0 - m0)` (linear).
    pub closed_form: f64,
    /// The same sum with the squared unit-cluster term `8 (n0 - m0)^2`;
    /// disagrees with the constructive value whenever `n0 - m0 > 1`.
    pub closed_form_squared_unit_term: f64,
}

pub fn critical_value(
    idx: &CriticalIndexSet,
    spec: &SingularSpectrum,
) -> Result<CriticalValue, LandscapeError> {
    let characteristic = build_characteristic(idx, spec)?;
    let e = DMatrix::from_diagonal(&spec.e_canonical());
    let constructive = (characteristic.p() - e).norm_squared();

    let unit_deficit = (spec.n0() - idx.m0) as f64;
    let mut sum = 0.0;
    for (a, c) in spec.clusters().iter().enumerate() {
        let w = c.omega;
        sum += idx.type_ii[a] as f64
            * (w.powi(2) + w.powi(-2) + 3.0 * w.powf(2.0 / 3.0) + 3.0 * w.powf(-2.0 / 3.0));
    }
    for p in &idx.pairs {
        let wa = spec.clusters()[p.a].omega;
        let wb = spec.clusters()[p.b].omega;
        sum += p.count as f64 * ((wa + 1.0 / wb).powi(2) + (1.0 / wa + wb).powi(2));
    }
    Ok(CriticalValue {
        constructive,
        closed_form: 8.0 * unit_deficit + sum,
        closed_form_squared_unit_term: 8.0 * unit_deficit * unit_deficit + sum,
    })
}

/// Dimension of one critical submanifold.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DimensionInfo {
    /// `2 m0 (n0 - m0) + sum m'_a m''_a`; `None` when the index set has a
    /// type III block (no closed form).
    pub formula: Option<usize>,
    /// Rank of the linearized stabilizer action `xi -> [P, xi]`, a
    /// numerical estimate of the orbit dimension (valid in all cases).
    pub tangent_rank: usize,
}

/// Basis of the Lie algebra of `Stab(E)` in the canonical basis.
fn stabilizer_algebra_basis(spec: &SingularSpectrum) -> Vec<DMatrix<f64>> {
    let n = spec.n();
    let dim = 2 * n;
    let mut basis = Vec::new();
    for a in 0..spec.clusters().len() {
        let slots: Vec<usize> = spec.cluster_slots(a).collect();
        for p in 0..slots.len() {
            for q in (p + 1)..slots.len() {
                let (sp, sq) = (slots[p], slots[q]);
                let mut m = DMatrix::<f64>::zeros(dim, dim);
                m[(sp, sq)] = 1.0;
                m[(sq, sp)] = -1.0;
                m[(n + sp, n + sq)] = 1.0;
                m[(n + sq, n + sp)] = -1.0;
                basis.push(m);
            }
        }
    }
    let unit: Vec<usize> = spec.unit_slots().collect();
    for p in 0..unit.len() {
        for q in (p + 1)..unit.len() {
            let (sp, sq) = (unit[p], unit[q]);
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            m[(sp, sq)] = 1.0;
            m[(sq, sp)] = -1.0;
            m[(n + sp, n + sq)] = 1.0;
            m[(n + sq, n + sp)] = -1.0;
            basis.push(m);
        }
    }
    for p in 0..unit.len() {
        for q in p..unit.len() {
            let (sp, sq) = (unit[p], unit[q]);
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            m[(sp, n + sq)] = 1.0;
            m[(sq, n + sp)] = 1.0;
            m[(n + sp, sq)] = -1.0;
            m[(n + sq, sp)] = -1.0;
            basis.push(m);
        }
    }
    basis
}

pub fn submanifold_dimension(
    idx: &CriticalIndexSet,
    spec: &SingularSpectrum,
) -> Result<DimensionInfo, LandscapeError> {
    let characteristic = build_characteristic(idx, spec)?;
    let p = characteristic.p();
    let basis = stabilizer_algebra_basis(spec);
    let tangent_rank = if basis.is_empty() {
        0
    } else {
        let dim = p.nrows();
        let mut map = DMatrix::<f64>::zeros(dim * dim, basis.len());
        for (k, xi) in basis.iter().enumerate() {
            let c = p * xi - xi * p;
            for (i, v) in c.iter().enumerate() {
                map[(i, k)] = *v;
            }
        }
        let sv = map.svd(false, false).singular_values;
        let max = sv.max();
        sv.iter().filter(|&&x| x > 1e-9 * max.max(1.0)).count()
    };
    let formula = if idx.has_type_iii() {
        None
    } else {
        let mixed: usize = idx
            .type_i
            .iter()
            .zip(&idx.type_ii)
            .map(|(&a, &b)| a * b)
            .sum();
        Some(2 * idx.m0 * (spec.n0() - idx.m0) + mixed)
    };
    Ok(DimensionInfo {
        formula,
        tangent_rank,
    })
}

/// Submanifold counting: the enumeration is ground truth; the quadratic
/// closed form (valid only for a single fully degenerate cluster) and the
/// super-exponential upper bound are evaluated for comparison and any
/// discrepancy is surfaced by the report layer, never reconciled here.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountRecord {
    pub enumerated: usize,
    /// `(N+2)^2/2` (even N) or `(N+1)(N+3)/2` (odd N); only defined when
    /// the spectrum is one fully degenerate cluster above 1.
    pub quadratic_count: Option<usize>,
    /// `sum_{m=0}^{floor(N/2)} 2^{N-3m} N! / (m! (N-2m)!)`, the summation
    /// extended to `m = 0` so that pure type I/II sets are counted.
    pub upper_bound: f64,
    /// The same sum started at `m = 1` as printed.
    pub upper_bound_from_m1: f64,
}

pub fn count_formula(spec: &SingularSpectrum) -> CountRecord {
    let enumerated = enumerate_critical(spec).len();
    let n = spec.n();
    let quadratic_count = if spec.n0() == 0 && spec.clusters().len() == 1 {
        Some(if n.is_multiple_of(2) {
            (n + 2) * (n + 2) / 2
        } else {
            (n + 1) * (n + 3) / 2
        })
    } else {
        None
    };
    let factorial = |k: usize| -> f64 { (1..=k).map(|x| x as f64).product() };
    let term = |m: usize| -> f64 {
        2f64.powi(n as i32 - 3 * m as i32) * factorial(n) / (factorial(m) * factorial(n - 2 * m))
    };
    let upper_bound: f64 = (0..=n / 2).map(term).sum();
    let upper_bound_from_m1: f64 = (1..=n / 2).map(term).sum();
    CountRecord {
        enumerated,
        quadratic_count,
        upper_bound,
        upper_bound_from_m1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumgate;
    use crate::sympcore::random_symplectic;
    use approx::assert_relative_eq;

    fn sum_objective() -> Objective {
        Objective::new(SymplecticMatrix::new(sumgate::sum_matrix()).unwrap()).unwrap()
    }

    fn spectrum_of(clusters: &[(f64, usize)], n0: usize) -> SingularSpectrum {
        SingularSpectrum::new(
            n0,
            clusters
                .iter()
                .map(|&(omega, multiplicity)| SpectralCluster {
                    omega,
                    multiplicity,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn objective_value_examples() {
        let sum = SymplecticMatrix::new(sumgate::sum_matrix()).unwrap();
        assert_relative_eq!(objective_value(&sum, &sum).unwrap(), 0.0);

        // S = -W for an orthogonal symplectic W: J = ||2W||^2 = 4 Tr(W^T W) = 16.
        let w = sympcore::random_stabilizer(&[1.0, 1.0], 3);
        let minus = SymplecticMatrix::new(-w.matrix().clone()).unwrap();
        assert_relative_eq!(
            objective_value(&minus, w.base()).unwrap(),
            16.0,
            epsilon = 1e-10
        );

        // Direct sum of squared entry differences between I and the SUM
        // gate: the two off-diagonal units give 2.
        let id = SymplecticMatrix::identity(2);
        assert_relative_eq!(objective_value(&id, &sum).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn gradient_vanishes_at_target() {
        let sum = SymplecticMatrix::new(sumgate::sum_matrix()).unwrap();
        let g = gradient(&sum, &sum).unwrap();
        assert!(g.norm() <= 1e-13);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..12 {
            let n = 1 + trial % 3;
            let s = random_symplectic(n, 100 + trial as u64, 0.8);
            let w = random_symplectic(n, 200 + trial as u64, 0.8);
            let g = gradient(&s, &w).unwrap();
            let mut y = DMatrix::<f64>::zeros(2 * n, 2 * n);
            for i in 0..2 * n {
                for j in i..2 * n {
                    let v: f64 = rng.sample(rand_distr::StandardNormal);
                    y[(i, j)] = v;
                    y[(j, i)] = v;
                }
            }
            let a = AlgebraElement::new(y.clone()).unwrap();
            let h = 1e-5;
            let sp = SymplecticMatrix::new(s.matrix() * sympcore::exp_algebra(&a, h).matrix())
                .unwrap();
            let sm = SymplecticMatrix::new(s.matrix() * sympcore::exp_algebra(&a, -h).matrix())
                .unwrap();
            let fd = (objective_value(&sp, &w).unwrap() - objective_value(&sm, &w).unwrap())
                / (2.0 * h);
            let analytic = 2.0 * (a.y() * g.y()).trace();
            assert_relative_eq!(fd, analytic, max_relative = 1e-5, epsilon = 1e-7);
        }
    }

    #[test]
    fn critical_residual_examples() {
        let sum = SymplecticMatrix::new(sumgate::sum_matrix()).unwrap();
        assert!(critical_residual(&sum, &sum).unwrap() <= 1e-13);
        let id = SymplecticMatrix::identity(2);
        assert!(critical_residual(&id, &sum).unwrap() >= 0.1);
    }

    #[test]
    fn enumerate_unit_only_gives_n_plus_one() {
        for n in 1..=4 {
            let spec = spectrum_of(&[], n);
            assert_eq!(enumerate_critical(&spec).len(), n + 1);
        }
    }

    #[test]
    fn enumerate_sum_spectrum() {
        let obj = sum_objective();
        let sets = enumerate_critical(obj.spectrum());
        assert_eq!(sets.len(), 4);
        let shapes: Vec<(usize, usize, usize)> = sets
            .iter()
            .map(|i| {
                (
                    i.type_i[0],
                    i.type_ii[0],
                    i.pairs.first().map_or(0, |p| p.count),
                )
            })
            .collect();
        assert!(shapes.contains(&(2, 0, 0)));
        assert!(shapes.contains(&(0, 2, 0)));
        assert!(shapes.contains(&(1, 1, 0)));
        assert!(shapes.contains(&(0, 0, 1)));
    }

    #[test]
    fn enumerate_nondegenerate_pairable_n2() {
        // Two simple singular values close enough to pair: four type I/II
        // combinations plus the type III set; saturates the corrected
        // upper bound.
        let spec = spectrum_of(&[(1.2, 1), (1.5, 1)], 0);
        assert!(spec.pair_admissible(0, 1));
        let sets = enumerate_critical(&spec);
        assert_eq!(sets.len(), 5);
        let record = count_formula(&spec);
        assert_relative_eq!(record.upper_bound, 5.0);
    }

    #[test]
    fn enumerate_fully_degenerate_counts() {
        // Single cluster of multiplicity N: the recursion gives
        // sum_m (N - 2m + 1), not the quadratic closed form.
        let spec2 = spectrum_of(&[(sumgate::omega(), 2)], 0);
        let rec2 = count_formula(&spec2);
        assert_eq!(rec2.enumerated, 4);
        assert_eq!(rec2.quadratic_count, Some(8));

        let spec4 = spectrum_of(&[(2.0, 4)], 0);
        let rec4 = count_formula(&spec4);
        assert_eq!(rec4.enumerated, 9);
        assert_eq!(rec4.quadratic_count, Some(18));
    }

    #[test]
    fn characteristic_matrices_of_sum() {
        let obj = sum_objective();
        let spec = obj.spectrum();
        let omega = sumgate::omega();
        let sets = enumerate_critical(spec);

        for idx in &sets {
            let c = build_characteristic(idx, spec).unwrap();
            // P = D L structure: D commutes with L, L symmetric orthogonal,
            // P symplectic.
            let d = DMatrix::from_diagonal(c.d_diag());
            assert!((&d * c.l() - c.l() * &d).norm() <= 1e-12);
            assert!((c.l() - c.l().transpose()).norm() <= 1e-12);
            assert!(sympcore::orthogonality_residual(c.l()) <= 1e-12);
            assert!(check_symplectic(c.p()).unwrap() <= 1e-12);
            assert!((c.p() - d * c.l()).norm() <= 1e-12);
        }

        // Pure type I set reproduces E in the canonical ordering.
        let pure = sets.iter().find(|i| i.is_pure_type_i(spec)).unwrap();
        let c = build_characteristic(pure, spec).unwrap();
        let e_expected = [omega, omega, 1.0 / omega, 1.0 / omega];
        for (k, &v) in e_expected.iter().enumerate() {
            assert_relative_eq!(c.p()[(k, k)], v, epsilon = 1e-12);
        }
    }

    #[test]
    fn representatives_are_critical() {
        let obj = sum_objective();
        for idx in enumerate_critical(obj.spectrum()) {
            let s = build_representative(&idx, &obj, None).unwrap();
            let r = critical_residual(&s, obj.w()).unwrap();
            assert!(r <= 1e-8, "index {idx:?} residual {r}");
            let g = gradient(&s, obj.w()).unwrap();
            assert!(g.norm() <= 1e-8);
        }
    }

    #[test]
    fn pure_type_i_reconstructs_target() {
        for seed in [1u64, 5, 9] {
            let w = random_symplectic(3, seed, 0.6);
            let obj = Objective::new(w.clone()).unwrap();
            let sets = enumerate_critical(obj.spectrum());
            let pure = sets
                .iter()
                .find(|i| i.is_pure_type_i(obj.spectrum()))
                .unwrap();
            let s = build_representative(pure, &obj, None).unwrap();
            assert!((s.matrix() - w.matrix()).norm() <= 1e-9 * (1.0 + w.matrix().norm()));
        }
    }

    #[test]
    fn representative_matches_printed_isolated_saddle() {
        // S*_2 is invariant under the whole stabilizer, so any valid SVD
        // gauge must reproduce the printed entries.
        let obj = sum_objective();
        let sets = enumerate_critical(obj.spectrum());
        let idx = sets
            .iter()
            .find(|i| i.type_ii[0] == 2 && i.pairs.is_empty())
            .unwrap();
        let s = build_representative(idx, &obj, None).unwrap();
        let printed = sumgate::printed_type_ii_saddle();
        assert!(
            (s.matrix() - &printed).amax() <= 1e-3,
            "deviation {}",
            (s.matrix() - &printed).amax()
        );
    }

    #[test]
    fn stabilizer_orbit_preserves_value_and_criticality() {
        let obj = sum_objective();
        let d: Vec<f64> = obj.svd().d().iter().copied().collect();
        for idx in enumerate_critical(obj.spectrum()) {
            let base = build_representative(&idx, &obj, None).unwrap();
            let v0 = objective_value(&base, obj.w()).unwrap();
            for seed in 0..50 {
                let r = sympcore::random_stabilizer(&d, 1000 + seed);
                let s = build_representative(&idx, &obj, Some(&r)).unwrap();
                let v = objective_value(&s, obj.w()).unwrap();
                assert_relative_eq!(v, v0, epsilon = 1e-9, max_relative = 1e-9);
                assert!(critical_residual(&s, obj.w()).unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn non_stabilizer_rotation_is_rejected() {
        let obj = sum_objective();
        let idx = &enumerate_critical(obj.spectrum())[0];
        // A generic orthogonal symplectic matrix does not stabilize E.
        let r = sympcore::random_stabilizer(&[1.0, 1.0], 7);
        let err = build_representative(idx, &obj, Some(&r));
        assert!(matches!(
            err,
            Err(LandscapeError::StabilizerViolation { .. })
        ));
    }

    #[test]
    fn critical_values_of_sum_match_published_table() {
        let obj = sum_objective();
        let spec = obj.spectrum();
        let mut values: Vec<f64> = enumerate_critical(spec)
            .iter()
            .map(|idx| critical_value(idx, spec).unwrap().constructive)
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [0.0, 9.311, 10.0, 18.623];
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() <= 1e-3, "value {v} vs {e}");
        }
    }

    #[test]
    fn constructive_equals_closed_form() {
        let obj = sum_objective();
        let spec = obj.spectrum();
        for idx in enumerate_critical(spec) {
            let cv = critical_value(&idx, spec).unwrap();
            assert_relative_eq!(cv.constructive, cv.closed_form, epsilon = 1e-9);
            // Cross-check against the actual representative distance.
            let s = build_representative(&idx, &obj, None).unwrap();
            assert_relative_eq!(
                cv.constructive,
                objective_value(&s, obj.w()).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn unit_cluster_value_is_linear_not_squared() {
        // W orthogonal symplectic at N = 3: values must be 8m, the squared
        // variant overshoots for m >= 2.
        let spec = spectrum_of(&[], 3);
        for idx in enumerate_critical(&spec) {
            let cv = critical_value(&idx, &spec).unwrap();
            let m = spec.n0() - idx.m0;
            assert_relative_eq!(cv.constructive, 8.0 * m as f64, epsilon = 1e-12);
            assert_relative_eq!(cv.closed_form, cv.constructive, epsilon = 1e-12);
            if m >= 2 {
                assert!(cv.closed_form_squared_unit_term > cv.constructive + 1.0);
            }
        }
    }

    #[test]
    fn type_iii_block_data_is_consistent() {
        // Vanishing determinant of the off-diagonal system at
        // d = (e_a e_b)^{-1/2}, and cos x at the admissibility boundary.
        let spec = spectrum_of(&[(1.2, 1), (1.5, 1)], 0);
        let (wa, wb) = (1.2f64, 1.5f64);
        let d = (wb / wa).sqrt();
        let (ea, eb) = (wa, 1.0 / wb);
        let det = d * d * ea * eb - 1.0 / (d * d * ea * eb);
        assert!(det.abs() <= 1e-12);
        let x = spec.pair_angle(0, 1);
        assert!(x.cos().abs() <= 1.0);

        // Exact boundary omega_a = omega_b^{1/3} gives cos x = 1.
        let boundary = spectrum_of(&[(1.3, 1), (1.3f64.powi(3), 1)], 0);
        assert!(boundary.pair_admissible(0, 1));
        let xb = boundary.pair_angle(0, 1);
        assert!(xb.cos() >= 1.0 - 1e-12);

        // Same-cluster pairing sits at x = pi/2.
        let sum_spec = spectrum_of(&[(sumgate::omega(), 2)], 0);
        assert_relative_eq!(
            sum_spec.pair_angle(0, 0),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn dimensions_of_sum_submanifolds() {
        let obj = sum_objective();
        let spec = obj.spectrum();
        for idx in enumerate_critical(spec) {
            let info = submanifold_dimension(&idx, spec).unwrap();
            if idx.pairs.is_empty() {
                let expected = idx.type_i[0] * idx.type_ii[0];
                assert_eq!(info.formula, Some(expected));
                assert_eq!(info.tangent_rank, expected);
            } else {
                assert_eq!(info.formula, None);
                assert_eq!(info.tangent_rank, 0);
            }
        }
    }

    #[test]
    fn dimension_formula_matches_tangent_rank_with_unit_cluster() {
        let spec = spectrum_of(&[], 2);
        for idx in enumerate_critical(&spec) {
            let info = submanifold_dimension(&idx, &spec).unwrap();
            let m = spec.n0() - idx.m0;
            assert_eq!(info.formula, Some(2 * idx.m0 * m));
            assert_eq!(info.tangent_rank, 2 * idx.m0 * m);
        }
    }

    fn objective_for(spec: &SingularSpectrum, seed: u64) -> Objective {
        use crate::sympcore::SymplecticSvd;
        let n = spec.n();
        let u = sympcore::random_stabilizer(&vec![1.0; n], seed);
        let v = sympcore::random_stabilizer(&vec![1.0; n], seed + 1);
        let mut d_vals: Vec<f64> = Vec::new();
        for a in (0..spec.clusters().len()).rev() {
            for _ in 0..spec.clusters()[a].multiplicity {
                d_vals.push(spec.clusters()[a].omega);
            }
        }
        d_vals.extend(std::iter::repeat_n(1.0, spec.n0()));
        let svd = SymplecticSvd::from_parts(u, DVector::from_vec(d_vals), v).unwrap();
        Objective::from_svd(svd).unwrap()
    }

    #[test]
    fn mixed_spectrum_enumeration_is_critical() {
        // Unit cluster plus a non-unit cluster plus a pairable pair.
        let spec = spectrum_of(&[(1.2, 1), (1.5, 2)], 1);
        let obj = objective_for(&spec, 21);
        assert_eq!(obj.spectrum(), &spec);
        let sets = enumerate_critical(&spec);
        assert!(sets.iter().any(|i| i.has_type_iii()));
        for idx in &sets {
            let s = build_representative(idx, &obj, None).unwrap();
            let r = critical_residual(&s, obj.w()).unwrap();
            assert!(r <= 1e-8, "index {idx:?} residual {r}");
        }
    }

    #[test]
    fn rich_spectra_enumerations_are_critical() {
        // Layout stress: repeated same-cluster pairs, cross-cluster pairs
        // of multiplicity two, and a chain where every pair of clusters
        // admits a pairing (one cluster feeding several blocks at once).
        let chain = spectrum_of(&[(1.1, 2), (1.2, 1), (1.3, 1)], 0);
        assert!(chain.pair_admissible(0, 1));
        assert!(chain.pair_admissible(0, 2));
        assert!(chain.pair_admissible(1, 2));
        let cases = [
            (spectrum_of(&[(2.0, 4)], 0), 42u64),
            (spectrum_of(&[(1.2, 2), (1.5, 2)], 0), 43),
            (chain, 44),
        ];
        for (spec, seed) in cases {
            let obj = objective_for(&spec, seed);
            let sets = enumerate_critical(&spec);
            // At least one set carries two type III pairings at once.
            assert!(
                sets.iter()
                    .any(|i| i.pairs.iter().map(|p| p.count).sum::<usize>() >= 2),
                "spectrum {spec:?}"
            );
            for idx in &sets {
                let s = build_representative(idx, &obj, None).unwrap();
                let r = critical_residual(&s, obj.w()).unwrap();
                assert!(r <= 1e-8, "index {idx:?} residual {r}");
                let cv = critical_value(idx, &spec).unwrap();
                assert_relative_eq!(
                    cv.constructive,
                    cv.closed_form,
                    epsilon = 1e-9,
                    max_relative = 1e-9
                );
            }
        }
    }
}
