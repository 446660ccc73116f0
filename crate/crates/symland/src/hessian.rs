//! Second-order analysis: the quadratic form of second derivatives at a
//! critical point, its inertia, closed-form eigenvalue counts for
//! type I/II index sets, and minimum/saddle classification.
//!
//! At a critical point labeled by an index set, the second-order term of
//! `J(S* exp(t J X))` is, in the interleaved basis of
//! [`landscape::hqf_parts`],
//!
//! ```text
//! H(X) = Tr[ JX (D^2 - D E L) JX + JX D^2 (JX)^T ]
//! ```
//!
//! over symmetric `X`. With `X = [[A, C^T], [C, B]]`,
//! `D = diag(Theta, Theta^{-1})`, `DE = diag(Omega, Omega^{-1})` and
//! `L = diag(Phi, Phi)` this collapses to the block form
//!
//! ```text
//! H(A,B,C) = Tr(A Theta^2 A - 2 A Sigma B + B Theta^{-2} B)
//!          + Tr(C Theta^2 C^T + 2 C Sigma C + C^T Theta^{-2} C),
//! ```
//!
//! with `Sigma = Theta^2 - Omega Phi`; the equality of the two routes is
//! asserted numerically on every assembly rather than assumed.
//!
//! Variable ordering of the form matrix `Q` (dimension `N(2N+1)`): the
//! upper triangle of `A` row-major, then the upper triangle of `B`, then
//! all of `C` row-major.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::landscape::{
    self, CriticalIndexSet, HqfParts, LandscapeError, SingularSpectrum,
};
use crate::sympcore::j_matrix;
use crate::tol;

#[derive(Debug, Error)]
pub enum HessianError {
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error("quadratic form is identically zero")]
    DegenerateForm,
    #[error("index set has no type III block")]
    NoTypeIii,
    #[error("trace and block assembly routes disagree by {0:.3e}")]
    RouteDisagreement(f64),
}

/// The quadratic form of second derivatives in tangent coordinates.
#[derive(Debug, Clone)]
pub struct HessianForm {
    n: usize,
    q: DMatrix<f64>,
}

impl HessianForm {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Form dimension `N(2N+1)`.
    pub fn dim(&self) -> usize {
        self.n * (2 * self.n + 1)
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }
}

/// Eigenvalue sign counts of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
    /// Relative zero band used for the counts.
    pub threshold: f64,
}

/// Minimum or saddle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Minimum,
    Saddle,
}

/// Basis of independent symmetric directions in the documented order:
/// `A` upper triangle row-major, `B` upper triangle, `C` full. A basis
/// element carries 1 in each entry tied to its variable.
pub fn variable_basis(n: usize) -> Vec<DMatrix<f64>> {
    let dim = 2 * n;
    let mut basis = Vec::with_capacity(n * (2 * n + 1));
    for i in 0..n {
        for j in i..n {
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
            basis.push(m);
        }
    }
    for i in 0..n {
        for j in i..n {
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            m[(n + i, n + j)] = 1.0;
            m[(n + j, n + i)] = 1.0;
            basis.push(m);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            m[(n + i, j)] = 1.0;
            m[(j, n + i)] = 1.0;
            basis.push(m);
        }
    }
    basis
}

/// Map a coordinate vector in the documented variable order back to a
/// symmetric matrix.
pub fn devectorize(n: usize, coords: &[f64]) -> DMatrix<f64> {
    let basis = variable_basis(n);
    assert_eq!(coords.len(), basis.len());
    let mut x = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for (c, b) in coords.iter().zip(basis) {
        x += b * *c;
    }
    x
}

/// Evaluate `H(X) = Tr[JX (D^2 - D E L) JX + JX D^2 (JX)^T]` on a
/// symmetric direction `X` in the interleaved basis.
pub fn hqf_value(parts: &HqfParts, x: &DMatrix<f64>) -> f64 {
    let dim = 2 * parts.n;
    let j = j_matrix(parts.n);
    let jx = &j * x;
    // M = D^2 - D E L (D, E diagonal).
    let mut m = -&parts.l;
    for r in 0..dim {
        let de = parts.d[r] * parts.e[r];
        for c in 0..dim {
            m[(r, c)] *= de;
        }
        m[(r, r)] += parts.d[r] * parts.d[r];
    }
    let mut jxd2 = jx.clone();
    for c in 0..dim {
        let d2 = parts.d[c] * parts.d[c];
        jxd2.column_mut(c).scale_mut(d2);
    }
    (&jx * m * &jx).trace() + (jxd2 * jx.transpose()).trace()
}

/// Evaluate the block form `H(A, B, C)` on the same direction.
fn hqf_block_value(parts: &HqfParts, x: &DMatrix<f64>) -> f64 {
    let n = parts.n;
    let a = x.view((0, 0), (n, n)).into_owned();
    let b = x.view((n, n), (n, n)).into_owned();
    let c = x.view((n, 0), (n, n)).into_owned();
    let theta2 = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            parts.d[i] * parts.d[i]
        } else {
            0.0
        }
    });
    let theta2_inv = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 / (parts.d[i] * parts.d[i])
        } else {
            0.0
        }
    });
    let phi = parts.l.view((0, 0), (n, n)).into_owned();
    let mut omega_phi = phi.clone();
    for r in 0..n {
        let o = parts.d[r] * parts.e[r];
        for cc in 0..n {
            omega_phi[(r, cc)] *= o;
        }
    }
    let sigma = &theta2 - omega_phi;
    (&a * &theta2 * &a).trace() - 2.0 * (&a * &sigma * &b).trace()
        + (&b * &theta2_inv * &b).trace()
        + (&c * &theta2 * c.transpose()).trace()
        + 2.0 * (&c * &sigma * &c).trace()
        + (c.transpose() * &theta2_inv * &c).trace()
}

fn polarize<F: Fn(&DMatrix<f64>) -> f64>(n: usize, h: F) -> DMatrix<f64> {
    let basis = variable_basis(n);
    let dim = basis.len();
    let singles: Vec<f64> = basis.iter().map(&h).collect();
    let mut q = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        q[(k, k)] = singles[k];
        for l in (k + 1)..dim {
            let mixed = h(&(&basis[k] + &basis[l]));
            let v = (mixed - singles[k] - singles[l]) / 2.0;
            q[(k, l)] = v;
            q[(l, k)] = v;
        }
    }
    q
}

/// Assemble the form matrix from an interleaved triple, checking the two
/// assembly routes against each other.
pub fn hqf_from_parts(parts: &HqfParts) -> Result<HessianForm, HessianError> {
    let q = polarize(parts.n, |x| hqf_value(parts, x));
    let q_block = polarize(parts.n, |x| hqf_block_value(parts, x));
    let scale = q.amax().max(1.0);
    let gap = (&q - &q_block).amax();
    if gap > 1e-10 * scale {
        return Err(HessianError::RouteDisagreement(gap));
    }
    Ok(HessianForm { n: parts.n, q })
}

/// Assemble the quadratic form of an index set over a spectrum.
pub fn assemble_hqf(
    idx: &CriticalIndexSet,
    spec: &SingularSpectrum,
) -> Result<HessianForm, HessianError> {
    let parts = landscape::hqf_parts(idx, spec)?;
    hqf_from_parts(&parts)
}

/// Eigenvalue sign counts with a relative zero band (`tau` defaults to
/// [`tol::HESSIAN_ZERO_BAND`]).
pub fn inertia_of(form: &HessianForm, tau: Option<f64>) -> Result<Inertia, HessianError> {
    let tau = tau.unwrap_or(tol::HESSIAN_ZERO_BAND);
    let eig = form.q.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if max == 0.0 {
        return Err(HessianError::DegenerateForm);
    }
    let band = tau * max;
    let mut inertia = Inertia {
        pos: 0,
        neg: 0,
        zero: 0,
        threshold: tau,
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
    Ok(inertia)
}

/// Closed-form inertia for index sets with no type III block over a
/// spectrum without a unit cluster that is either widely spaced (no
/// cross-cluster pairings admissible) or a single degenerate cluster.
/// Returns `None` outside that regime.
///
/// Cross-term orientation: with clusters ordered by increasing value, a
/// type I slot from a smaller cluster paired with a type II slot from a
/// larger one has both pair discriminants negative, so `m'_a m''_b`
/// (a < b) counts twice toward the negative eigenvalues, while
/// `m''_a m'_b` counts twice toward the positive ones. (The sign-count
/// display usually quoted for this landscape swaps the two cross terms
/// relative to its own discriminant case analysis; the orientation here
/// is the one confirmed by direct diagonalization.)
pub fn analytic_inertia(idx: &CriticalIndexSet, spec: &SingularSpectrum) -> Option<Inertia> {
    if idx.has_type_iii() || spec.n0() != 0 {
        return None;
    }
    if !(spec.widely_spaced() || spec.clusters().len() == 1) {
        return None;
    }
    let n = spec.n();
    let s = spec.clusters().len();
    let np: usize = idx.type_i.iter().sum();
    let npp: usize = idx.type_ii.iter().sum();
    let mixed_same: usize = (0..s).map(|a| idx.type_i[a] * idx.type_ii[a]).sum();
    let mut i_then_ii = 0usize; // pairs m'_a m''_b with a < b
    let mut ii_then_i = 0usize; // pairs m''_a m'_b with a < b
    for a in 0..s {
        for b in (a + 1)..s {
            i_then_ii += idx.type_i[a] * idx.type_ii[b];
            ii_then_i += idx.type_ii[a] * idx.type_i[b];
        }
    }
    Some(Inertia {
        pos: n * n + n + np * np + mixed_same + 2 * ii_then_i,
        neg: npp * npp + 2 * i_then_ii,
        zero: mixed_same,
        threshold: 0.0,
    })
}

/// Inertia over a pure unit-cluster spectrum (orthogonal symplectic
/// target): `(N^2 + N + (N-m)^2, m^2, 2m(N-m))` where `m` counts the -1
/// signs of the index set.
pub fn unit_cluster_inertia(
    idx: &CriticalIndexSet,
    spec: &SingularSpectrum,
) -> Result<Inertia, HessianError> {
    if !spec.clusters().is_empty() {
        return Err(HessianError::Landscape(LandscapeError::InvalidSpectrum(
            "spectrum has non-unit clusters".into(),
        )));
    }
    idx.validate(spec)?;
    let n = spec.n0();
    let m = n - idx.m0;
    Ok(Inertia {
        pos: n * n + n + (n - m) * (n - m),
        neg: m * m,
        zero: 2 * m * (n - m),
        threshold: 0.0,
    })
}

/// A pair of verified tangent directions with `H > 0` / `H < 0` at a
/// type III critical point, both expressed in the interleaved basis.
#[derive(Debug, Clone)]
pub struct SaddleWitness {
    pub positive: DMatrix<f64>,
    pub h_positive: f64,
    pub negative: DMatrix<f64>,
    pub h_negative: f64,
}

/// Construct indefiniteness witnesses on the first type III block: the
/// family `A = I`, `B = lambda I`, `C = 0` restricted to the block gives
/// `H = 2k (1 - lambda)(d^2 - lambda d^{-2})`, positive at `lambda = 0`
/// and negative for `lambda` between 1 and `d^4`. When `d = 1` that
/// interval is empty (the family is a perfect square), so the negative
/// direction falls back to the most negative eigenvector of the
/// assembled form.
pub fn saddle_witness(
    idx: &CriticalIndexSet,
    spec: &SingularSpectrum,
) -> Result<SaddleWitness, HessianError> {
    let parts = landscape::hqf_parts(idx, spec)?;
    let group = parts
        .pair_groups
        .first()
        .ok_or(HessianError::NoTypeIii)?
        .clone();
    let n = parts.n;
    let slots: Vec<usize> = group
        .a_slots
        .iter()
        .chain(&group.b_slots)
        .copied()
        .collect();
    let d = parts.d[group.a_slots[0]];

    let family = |lambda: f64| -> DMatrix<f64> {
        let mut x = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for &s in &slots {
            x[(s, s)] = 1.0;
            x[(n + s, n + s)] = lambda;
        }
        x
    };

    let positive = family(0.0);
    let h_positive = hqf_value(&parts, &positive);

    let (negative, h_negative) = if d > 1.0 + 1e-6 {
        let lambda = (1.0 + d.powi(4)) / 2.0;
        let x = family(lambda);
        let h = hqf_value(&parts, &x);
        (x, h)
    } else {
        // Degenerate family; take the most negative eigendirection.
        let form = hqf_from_parts(&parts)?;
        let eig = form.q.clone().symmetric_eigen();
        let mut k_min = 0;
        for k in 0..eig.eigenvalues.len() {
            if eig.eigenvalues[k] < eig.eigenvalues[k_min] {
                k_min = k;
            }
        }
        let coords: Vec<f64> = eig.eigenvectors.column(k_min).iter().copied().collect();
        let x = devectorize(n, &coords);
        let h = hqf_value(&parts, &x);
        (x, h)
    };

    Ok(SaddleWitness {
        positive,
        h_positive,
        negative,
        h_negative,
    })
}

/// Minimum iff the numerical inertia has no negative directions and the
/// zero count equals the orbit dimension; saddle otherwise.
pub fn classify(idx: &CriticalIndexSet, spec: &SingularSpectrum) -> Result<Kind, HessianError> {
    let inertia = inertia_of(&assemble_hqf(idx, spec)?, None)?;
    let dims = landscape::submanifold_dimension(idx, spec)?;
    let orbit_dim = dims.formula.unwrap_or(dims.tangent_rank);
    if inertia.neg == 0 && inertia.zero == orbit_dim {
        Ok(Kind::Minimum)
    } else {
        Ok(Kind::Saddle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{enumerate_critical, SingularSpectrum, SpectralCluster};
    use crate::sumgate;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

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

    fn find(
        sets: &[CriticalIndexSet],
        ti: usize,
        tii: usize,
        tiii: usize,
    ) -> CriticalIndexSet {
        sets.iter()
            .find(|i| {
                i.type_i[0] == ti
                    && i.type_ii[0] == tii
                    && i.pairs.first().map_or(0, |p| p.count) == tiii
            })
            .unwrap()
            .clone()
    }

    #[test]
    fn sum_type_iii_form_matches_published_entries() {
        let spec = spectrum_of(&[(sumgate::omega(), 2)], 0);
        let sets = enumerate_critical(&spec);
        let idx = find(&sets, 0, 0, 1);
        let form = assemble_hqf(&idx, &spec).unwrap();
        let frozen = sumgate::printed_hessian_q();
        assert!(
            (form.q() - &frozen).amax() <= 1e-12,
            "max deviation {}",
            (form.q() - &frozen).amax()
        );
        let inertia = inertia_of(&form, None).unwrap();
        assert_eq!((inertia.pos, inertia.neg, inertia.zero), (7, 3, 0));
    }

    #[test]
    fn sum_inertia_table() {
        let spec = spectrum_of(&[(sumgate::omega(), 2)], 0);
        let sets = enumerate_critical(&spec);
        let expect = [
            ((2, 0, 0), (10, 0, 0)),
            ((0, 2, 0), (6, 4, 0)),
            ((1, 1, 0), (8, 1, 1)),
            ((0, 0, 1), (7, 3, 0)),
        ];
        for ((ti, tii, tiii), (p, m, z)) in expect {
            let idx = find(&sets, ti, tii, tiii);
            let inertia = inertia_of(&assemble_hqf(&idx, &spec).unwrap(), None).unwrap();
            assert_eq!((inertia.pos, inertia.neg, inertia.zero), (p, m, z));
        }
    }

    #[test]
    fn analytic_inertia_on_sum_cluster() {
        let spec = spectrum_of(&[(sumgate::omega(), 2)], 0);
        let sets = enumerate_critical(&spec);
        for ((ti, tii), expect) in [
            ((2usize, 0usize), (10, 0, 0)),
            ((0, 2), (6, 4, 0)),
            ((1, 1), (8, 1, 1)),
        ] {
            let idx = find(&sets, ti, tii, 0);
            let a = analytic_inertia(&idx, &spec).unwrap();
            assert_eq!((a.pos, a.neg, a.zero), expect);
        }
        // Not covered for the type III set.
        let idx = find(&sets, 0, 0, 1);
        assert!(analytic_inertia(&idx, &spec).is_none());
    }

    #[test]
    fn analytic_matches_numerical_on_widely_spaced_spectrum() {
        // (1.3, 2.5, 17): no two distinct values admit a type III pairing,
        // and omega_max^4 stays far above the relative zero band.
        let spec = spectrum_of(&[(1.3, 1), (2.5, 1), (17.0, 1)], 0);
        assert!(spec.widely_spaced());
        let sets = enumerate_critical(&spec);
        assert_eq!(sets.len(), 8);
        for idx in sets {
            let numerical = inertia_of(&assemble_hqf(&idx, &spec).unwrap(), None).unwrap();
            let closed = analytic_inertia(&idx, &spec).unwrap();
            assert_eq!(
                (numerical.pos, numerical.neg, numerical.zero),
                (closed.pos, closed.neg, closed.zero),
                "index {idx:?}"
            );
        }
    }

    #[test]
    fn pure_type_i_at_identity_target_is_positive_definite() {
        let spec = spectrum_of(&[], 2);
        let sets = enumerate_critical(&spec);
        let idx = sets.iter().find(|i| i.m0 == 2).unwrap();
        let inertia = inertia_of(&assemble_hqf(idx, &spec).unwrap(), None).unwrap();
        assert_eq!((inertia.pos, inertia.neg, inertia.zero), (10, 0, 0));
    }

    #[test]
    fn unit_cluster_inertia_examples() {
        let spec = spectrum_of(&[], 2);
        let sets = enumerate_critical(&spec);
        for (m0, expect) in [(2usize, (10, 0, 0)), (1, (7, 1, 2)), (0, (6, 4, 0))] {
            let idx = sets.iter().find(|i| i.m0 == m0).unwrap();
            let formula = unit_cluster_inertia(idx, &spec).unwrap();
            assert_eq!((formula.pos, formula.neg, formula.zero), expect);
            // Cross-check numerically.
            let numerical = inertia_of(&assemble_hqf(idx, &spec).unwrap(), None).unwrap();
            assert_eq!(
                (numerical.pos, numerical.neg, numerical.zero),
                expect,
                "m0 = {m0}"
            );
        }
    }

    #[test]
    fn zero_count_equals_orbit_dimension_for_type_i_ii() {
        for spec in [
            spectrum_of(&[(sumgate::omega(), 2)], 0),
            spectrum_of(&[(1.5, 2), (30.0, 1)], 1),
            spectrum_of(&[(3.0, 3)], 0),
        ] {
            for idx in enumerate_critical(&spec) {
                if idx.has_type_iii() {
                    continue;
                }
                let inertia = inertia_of(&assemble_hqf(&idx, &spec).unwrap(), None).unwrap();
                let dims = landscape::submanifold_dimension(&idx, &spec).unwrap();
                assert_eq!(inertia.zero, dims.formula.unwrap(), "index {idx:?}");
            }
        }
    }

    #[test]
    fn saddle_witness_on_sum_type_iii() {
        let spec = spectrum_of(&[(sumgate::omega(), 2)], 0);
        let sets = enumerate_critical(&spec);
        let idx = find(&sets, 0, 0, 1);
        let w = saddle_witness(&idx, &spec).unwrap();
        // d = 1 block: the lambda = 0 member gives H = 2 k d^2 = 2.
        assert_relative_eq!(w.h_positive, 2.0, epsilon = 1e-12);
        assert!(w.h_negative < 0.0, "H = {}", w.h_negative);

        let no_pair = find(&sets, 2, 0, 0);
        assert!(matches!(
            saddle_witness(&no_pair, &spec),
            Err(HessianError::NoTypeIii)
        ));
    }

    #[test]
    fn saddle_witness_with_distinct_clusters() {
        let spec = spectrum_of(&[(1.2, 1), (1.5, 1)], 0);
        let sets = enumerate_critical(&spec);
        let idx = sets.iter().find(|i| i.has_type_iii()).unwrap();
        let w = saddle_witness(idx, &spec).unwrap();
        assert!(w.h_positive > 0.0);
        assert!(w.h_negative < 0.0);
        // Witness family values: 2 k (1 - lambda)(d^2 - lambda d^{-2}),
        // so 2 k d^2 at lambda = 0 and exactly zero at lambda = 1.
        let d2 = 1.5 / 1.2;
        assert_relative_eq!(w.h_positive, 2.0 * d2, epsilon = 1e-12);
        let parts = landscape::hqf_parts(idx, &spec).unwrap();
        let n = parts.n;
        let mut at_one = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for s in 0..n {
            at_one[(s, s)] = 1.0;
            at_one[(n + s, n + s)] = 1.0;
        }
        assert_relative_eq!(hqf_value(&parts, &at_one), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn orbit_directions_are_null_for_type_iii_sets() {
        // The zero count of the form is at least the orbit dimension
        // (orbit tangents are null directions), with equality observed on
        // every tested type I/II set.
        for spec in [
            spectrum_of(&[(2.0, 4)], 0),
            spectrum_of(&[(1.2, 2), (1.5, 2)], 0),
            spectrum_of(&[(sumgate::omega(), 2)], 0),
        ] {
            for idx in enumerate_critical(&spec) {
                let inertia = inertia_of(&assemble_hqf(&idx, &spec).unwrap(), None).unwrap();
                let dims = landscape::submanifold_dimension(&idx, &spec).unwrap();
                assert!(
                    inertia.zero >= dims.tangent_rank,
                    "index {idx:?}: zero {} < rank {}",
                    inertia.zero,
                    dims.tangent_rank
                );
            }
        }
    }

    #[test]
    fn classification_of_sum_and_unit_targets() {
        let spec = spectrum_of(&[(sumgate::omega(), 2)], 0);
        let sets = enumerate_critical(&spec);
        assert_eq!(classify(&find(&sets, 2, 0, 0), &spec).unwrap(), Kind::Minimum);
        for shape in [(0, 2, 0), (1, 1, 0), (0, 0, 1)] {
            let idx = find(&sets, shape.0, shape.1, shape.2);
            assert_eq!(classify(&idx, &spec).unwrap(), Kind::Saddle);
        }

        let unit = spectrum_of(&[], 3);
        for idx in enumerate_critical(&unit) {
            let kind = classify(&idx, &unit).unwrap();
            if idx.m0 == 3 {
                assert_eq!(kind, Kind::Minimum);
            } else {
                assert_eq!(kind, Kind::Saddle);
            }
        }
    }

    #[test]
    fn exactly_one_minimum_across_random_targets() {
        // Desk-scale confirmation of the unique-minimum statement: over
        // the enumerated sets of random targets up to N = 3, exactly one
        // minimum; every other set has negative directions or a verified
        // saddle witness pair.
        use crate::sympcore::random_symplectic;
        for seed in 0..10u64 {
            let n = 1 + (seed as usize) % 3;
            let w = random_symplectic(n, 12_000 + seed, 0.7);
            let obj = crate::landscape::Objective::new(w).unwrap();
            let spec = obj.spectrum();
            let mut minima = 0;
            for idx in enumerate_critical(spec) {
                if classify(&idx, spec).unwrap() == Kind::Minimum {
                    minima += 1;
                    assert!(idx.is_pure_type_i(spec));
                } else {
                    let inertia =
                        inertia_of(&assemble_hqf(&idx, spec).unwrap(), None).unwrap();
                    if inertia.neg == 0 {
                        let witness = saddle_witness(&idx, spec).unwrap();
                        assert!(witness.h_negative < 0.0);
                    }
                }
            }
            assert_eq!(minima, 1, "seed {seed}");
        }

        // Fixed degenerate and mixed spectra as well.
        let test_spectra = [
            spectrum_of(&[(1.7, 1)], 0),
            spectrum_of(&[(1.3, 1), (1.9, 1)], 0),
            spectrum_of(&[(1.4, 2)], 1),
            spectrum_of(&[(2.5, 1), (40.0, 2)], 0),
            spectrum_of(&[(1.2, 1), (1.5, 1), (1.8, 1)], 0),
        ];
        for spec in test_spectra {
            let sets = enumerate_critical(&spec);
            let mut minima = 0;
            for idx in &sets {
                if classify(idx, &spec).unwrap() == Kind::Minimum {
                    minima += 1;
                    assert!(idx.is_pure_type_i(&spec));
                }
            }
            assert_eq!(minima, 1, "spectrum {spec:?}");
        }
    }

    #[test]
    fn discriminant_signs_match_extracted_coefficients() {
        // Assemble the form in the convention of the widely-spaced
        // analysis (type II slots rotated so Theta carries omega^{1/3})
        // and compare the pairwise 2x2 sub-form determinant signs with
        // the closed-form discriminants.
        let omegas = [2.0f64, 9.0, 800.0];
        let spec = spectrum_of(&[(2.0, 1), (9.0, 1), (800.0, 1)], 0);
        let sets = enumerate_critical(&spec);
        for idx in sets {
            let n = 3usize;
            // Manual interleaved parts: slot k holds omega_k descending.
            let mut d = DVector::from_element(2 * n, 1.0);
            let mut e = DVector::from_element(2 * n, 1.0);
            let mut l = DMatrix::<f64>::zeros(2 * n, 2 * n);
            let mut sigma = vec![0.0; n];
            for slot in 0..n {
                let a = n - 1 - slot; // cluster index (ascending omega)
                let w = omegas[a];
                let type_i = idx.type_i[a] == 1;
                if type_i {
                    d[slot] = w;
                    e[slot] = w;
                    l[(slot, slot)] = 1.0;
                    sigma[slot] = 0.0;
                } else {
                    // Rotated type II pair: Theta = omega^{1/3}, E = 1/omega.
                    d[slot] = w.powf(1.0 / 3.0);
                    e[slot] = 1.0 / w;
                    l[(slot, slot)] = -1.0;
                    let dd = d[slot];
                    sigma[slot] = dd * dd + 1.0 / (dd * dd);
                }
                d[n + slot] = 1.0 / d[slot];
                e[n + slot] = 1.0 / e[slot];
                l[(n + slot, n + slot)] = l[(slot, slot)];
            }
            let parts = HqfParts {
                n,
                d: d.clone(),
                e,
                l: l.clone(),
                flipped: vec![false; n],
                pair_groups: vec![],
            };
            let form = hqf_from_parts(&parts).unwrap();
            let q = form.q();
            // Variable offsets in the documented ordering.
            let a_off = |i: usize, j: usize| -> usize {
                // upper-triangle row-major index
                i * n - i * (i + 1) / 2 + j
            };
            let b_off = |i: usize, j: usize| n * (n + 1) / 2 + a_off(i, j);
            let c_off = |i: usize, j: usize| n * (n + 1) + i * n + j;
            for i in 0..n {
                for j in (i + 1)..n {
                    let (di, dj) = (d[i], d[j]);
                    let (si, sj) = (sigma[i], sigma[j]);
                    let delta_p = (di * di + 1.0 / (dj * dj)) * (1.0 / (di * di) + dj * dj)
                        - (si + sj) * (si + sj);
                    let delta_pp = (di * di + dj * dj) * (1.0 / (di * di) + 1.0 / (dj * dj))
                        - (si + sj) * (si + sj);
                    // (c_ij, c_ji) sub-block carries the sign of delta'.
                    let det_c = q[(c_off(i, j), c_off(i, j))] * q[(c_off(j, i), c_off(j, i))]
                        - q[(c_off(i, j), c_off(j, i))].powi(2);
                    // (a_ij, b_ij) sub-block carries the sign of delta''.
                    let det_ab = q[(a_off(i, j), a_off(i, j))] * q[(b_off(i, j), b_off(i, j))]
                        - q[(a_off(i, j), b_off(i, j))].powi(2);
                    let sgn = |x: f64| {
                        if x.abs() < 1e-9 {
                            0
                        } else if x > 0.0 {
                            1
                        } else {
                            -1
                        }
                    };
                    assert_eq!(sgn(det_c), sgn(delta_p), "delta' at ({i},{j}), {idx:?}");
                    assert_eq!(sgn(det_ab), sgn(delta_pp), "delta'' at ({i},{j}), {idx:?}");
                    // Factored forms for mixed type I / type II pairs.
                    if l[(i, i)] > 0.0 && l[(j, j)] < 0.0 {
                        let f1 = dj.powi(-4) * (di * di - dj * dj) * (dj.powi(6) - di.powi(-2));
                        assert_relative_eq!(f1, delta_p, max_relative = 1e-10);
                        let f2 = dj.powi(4)
                            * (di * di - dj.powi(-2))
                            * (dj.powi(-6) - di.powi(-2));
                        assert_relative_eq!(f2, delta_pp, max_relative = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn route_agreement_on_mixed_spectra() {
        // Polarization vs block formula across unit, type I/II and
        // type III content.
        let specs = [
            spectrum_of(&[(1.2, 1), (1.5, 2)], 1),
            spectrum_of(&[(sumgate::omega(), 2)], 0),
            spectrum_of(&[(2.0, 2)], 2),
            spectrum_of(&[(1.1, 1), (1.25, 1), (1.6, 1)], 0),
        ];
        for spec in specs {
            for idx in enumerate_critical(&spec) {
                // assemble_hqf errors on route disagreement.
                let form = assemble_hqf(&idx, &spec).unwrap();
                assert_eq!(form.dim(), spec.n() * (2 * spec.n() + 1));
            }
        }
    }

    #[test]
    fn degenerate_form_is_rejected() {
        let form = HessianForm {
            n: 1,
            q: DMatrix::zeros(3, 3),
        };
        assert!(matches!(
            inertia_of(&form, None),
            Err(HessianError::DegenerateForm)
        ));
    }
}
