//! Built-in fixture: the two-mode SUM gate and its complete landscape
//! characterization, used as a verification suite.
//!
//! The SUM gate acts on `(q1, q2; p1, p2)` as `q2 -> q1 + q2`,
//! `p1 -> p1 - p2`. Its two-fold degenerate leading singular value is the
//! golden ratio `omega = (sqrt(5)+1)/2`, the stabilizer of its singular
//! form is O(2), and its landscape has exactly four critical
//! submanifolds with values `{0, 18.623, 9.311, 10}`.
//!
//! A note on the published matrices this fixture freezes: the gate's SVD
//! factors are only determined up to the O(2) stabilizer and paired sign
//! flips, and the gauge used here is pinned analytically so that the
//! frozen saddle representatives come out entrywise. (The factor pair
//! printed alongside the original gate does not reproduce the gate under
//! any transpose convention; the variant used here does, and yields the
//! published representatives and quadratic form verbatim.)

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::hessian;
use crate::landscape::{self, CriticalIndexSet, Objective};
use crate::sympcore::{self, OrthoSymplectic, SymplecticMatrix, SymplecticSvd};
use crate::tol;

/// The SUM gate.
pub fn sum_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            1.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, -1.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Leading singular value of the SUM gate, `(sqrt(5)+1)/2`.
pub fn omega() -> f64 {
    (5f64.sqrt() + 1.0) / 2.0
}

/// `sqrt((5 - sqrt(5)) / 10)`.
pub fn xi() -> f64 {
    ((5.0 - 5f64.sqrt()) / 10.0).sqrt()
}

/// `sqrt((5 + sqrt(5)) / 10)`.
pub fn eta() -> f64 {
    ((5.0 + 5f64.sqrt()) / 10.0).sqrt()
}

/// The plane rotation that maps the canonical singular-value ordering
/// `diag(w, w, 1/w, 1/w)` to the interleaved gauge
/// `diag(w, 1/w, 1/w, w)` used by the published fixtures (a pi/2
/// rotation in the second `(q, p)` pair).
pub fn pair_flip_gauge() -> DMatrix<f64> {
    landscape::pair_flip_matrix(2, &[false, true])
}

fn fixture_svd_with_omega(w: f64) -> SymplecticSvd {
    let (x, e) = (xi(), eta());
    let u_print = DMatrix::from_row_slice(
        4,
        4,
        &[
            x, -e, 0.0, 0.0, //
            e, x, 0.0, 0.0, //
            0.0, 0.0, x, -e, //
            0.0, 0.0, e, x,
        ],
    );
    let v_print = DMatrix::from_row_slice(
        4,
        4,
        &[
            e, x, 0.0, 0.0, //
            -x, e, 0.0, 0.0, //
            0.0, 0.0, e, x, //
            0.0, 0.0, -x, e,
        ],
    );
    let t = pair_flip_gauge();
    // Residual stabilizer reflection pinning the type III representative
    // to the published sign branch; diagonal characteristic matrices are
    // insensitive to it.
    let refl = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0]));
    let u0 = OrthoSymplectic::new(&u_print * t.transpose() * &refl).expect("fixture U is OSp");
    let v0 = OrthoSymplectic::new(refl * &t * v_print).expect("fixture V is OSp");
    SymplecticSvd::from_parts(u0, DVector::from_vec(vec![w, w]), v0)
        .expect("fixture spectrum is valid")
}

/// Analytically pinned structured SVD of the SUM gate in the canonical
/// gauge (`d = (omega, omega)`); reconstructs the gate to machine
/// precision and reproduces the published representatives entrywise.
pub fn fixture_svd() -> SymplecticSvd {
    fixture_svd_with_omega(omega())
}

/// The four published characteristic matrices, in the interleaved gauge
/// `E = diag(w, 1/w, 1/w, w)` of the fixtures, ordered: pure type I,
/// pure type II, mixed I+II, type III.
pub fn printed_p_matrices() -> Vec<DMatrix<f64>> {
    let w = omega();
    let wi = 1.0 / w;
    let c = w.powf(1.0 / 3.0);
    let ci = 1.0 / c;
    vec![
        DMatrix::from_diagonal(&DVector::from_vec(vec![w, wi, wi, w])),
        DMatrix::from_diagonal(&DVector::from_vec(vec![-ci, -c, -c, -ci])),
        DMatrix::from_diagonal(&DVector::from_vec(vec![w, -c, wi, -ci])),
        DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        ),
    ]
}

/// The published isolated pure-type-II saddle, to three decimals.
pub fn printed_type_ii_saddle() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            -0.906, 0.614, 0.0, 0.0, //
            -0.292, -0.906, 0.0, 0.0, //
            0.0, 0.0, -0.906, 0.292, //
            0.0, 0.0, -0.614, -0.906,
        ],
    )
}

/// The published one-dimensional mixed saddle evaluated at orbit
/// parameter zero, to three decimals.
pub fn printed_one_dim_saddle_at_zero() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.199, 1.297, 0.0, 0.0, //
            1.495, 0.199, 0.0, 0.0, //
            0.0, 0.0, -0.105, 0.787, //
            0.0, 0.0, 0.683, -0.105,
        ],
    )
}

/// The published type III saddle point.
pub fn printed_type_iii_saddle() -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0]))
}

/// The published 10 x 10 quadratic form at the type III saddle, in the
/// variable order `(a11, a12, a22, b11, b12, b22, c11, c12, c21, c22)`.
pub fn printed_hessian_q() -> DMatrix<f64> {
    let w = omega();
    let wi = 1.0 / w;
    DMatrix::from_row_slice(
        10,
        10,
        &[
            1.0, 0.0, 0.0, -1.0, w, 0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 2.0, 0.0, wi, -2.0, w, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, wi, -1.0, 0.0, 0.0, 0.0, 0.0, //
            -1.0, wi, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            w, -2.0, wi, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, w, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0, -wi, -w, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -wi, 2.0, 2.0, -wi, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -w, 2.0, 2.0, -w, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -wi, -w, 4.0,
        ],
    )
}

/// One row of the published landscape table, keyed by index-set shape.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SumTableRow {
    pub type_i: usize,
    pub type_ii: usize,
    pub type_iii: usize,
    pub value: f64,
    pub zero: usize,
    pub pos: usize,
    pub neg: usize,
    pub minimum: bool,
}

/// The published landscape characteristics of the SUM gate.
pub fn published_table() -> Vec<SumTableRow> {
    vec![
        SumTableRow {
            type_i: 2,
            type_ii: 0,
            type_iii: 0,
            value: 0.0,
            zero: 0,
            pos: 10,
            neg: 0,
            minimum: true,
        },
        SumTableRow {
            type_i: 0,
            type_ii: 2,
            type_iii: 0,
            value: 18.623,
            zero: 0,
            pos: 6,
            neg: 4,
            minimum: false,
        },
        SumTableRow {
            type_i: 1,
            type_ii: 1,
            type_iii: 0,
            value: 9.311,
            zero: 1,
            pos: 8,
            neg: 1,
            minimum: false,
        },
        SumTableRow {
            type_i: 0,
            type_ii: 0,
            type_iii: 1,
            value: 10.0,
            zero: 0,
            pos: 7,
            neg: 3,
            minimum: false,
        },
    ]
}

/// Configuration of the verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    /// Tolerance for the three-decimal entrywise fixtures.
    pub entry_tol: f64,
    /// Test hook: shift the fixture's internal singular value to force a
    /// failure (negative control).
    pub omega_perturbation: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            entry_tol: 1e-3,
            omega_perturbation: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckGroup {
    pub name: String,
    pub checks: Vec<CheckResult>,
}

impl CheckGroup {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub groups: Vec<CheckGroup>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(|g| g.passed())
    }

    pub fn failures(&self) -> Vec<String> {
        self.groups
            .iter()
            .flat_map(|g| {
                g.checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(move |c| format!("{}/{}: {}", g.name, c.label, c.detail))
            })
            .collect()
    }
}

struct GroupBuilder {
    group: CheckGroup,
}

impl GroupBuilder {
    fn new(name: &str) -> Self {
        Self {
            group: CheckGroup {
                name: name.to_string(),
                checks: Vec::new(),
            },
        }
    }

    fn check(&mut self, label: &str, passed: bool, detail: String) {
        self.group.checks.push(CheckResult {
            label: label.to_string(),
            passed,
            detail,
        });
    }

    fn close(self) -> CheckGroup {
        self.group
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

fn find_index_set(
    sets: &[CriticalIndexSet],
    type_i: usize,
    type_ii: usize,
    type_iii: usize,
) -> CriticalIndexSet {
    sets.iter()
        .find(|i| {
            i.type_i[0] == type_i
                && i.type_ii[0] == type_ii
                && i.pairs.first().map_or(0, |p| p.count) == type_iii
        })
        .expect("index set present")
        .clone()
}

/// Run the full fixture reproduction: SVD structure, characteristic
/// matrices, saddle representatives, landscape values, inertia counts and
/// the quadratic form, in six check groups.
pub fn verify(cfg: &VerifyConfig) -> VerificationReport {
    let mut groups = Vec::new();
    let w_used = omega() + cfg.omega_perturbation;
    let sum = SymplecticMatrix::new(sum_matrix()).expect("SUM gate is symplectic");

    // Fixture objective in the pinned gauge (possibly perturbed).
    let fixture = Objective::from_svd(fixture_svd_with_omega(w_used)).expect("fixture objective");
    let spec = fixture.spectrum().clone();
    let sets = landscape::enumerate_critical(&spec);
    let table = published_table();

    // Group 1: structured SVD of the gate.
    {
        let mut g = GroupBuilder::new("svd");
        match landscape::Objective::new(sum.clone()) {
            Ok(own) => {
                let svd = own.svd();
                let d_err = (svd.d()[0] - omega()).abs().max((svd.d()[1] - omega()).abs());
                g.check(
                    "singular-values",
                    d_err <= 1e-12,
                    format!("|d - omega| = {d_err:.3e}"),
                );
                let recon = (svd.reconstruct() - sum.matrix()).norm();
                g.check("reconstruction", recon <= 1e-12, format!("{recon:.3e}"));
                let orth = svd.u().orth_residual().max(svd.v().orth_residual());
                g.check("factor-structure", orth <= 1e-12, format!("{orth:.3e}"));
                let st = sympcore::stabilizer_of(svd.d().as_slice());
                g.check(
                    "stabilizer",
                    st.dimension == 1
                        && st.factors == vec![(sympcore::GroupKind::Orthogonal, 2)],
                    format!("{st:?}"),
                );
                // Gauge-invariant check of the published xi/eta constants:
                // the leading singular subspaces must match the analytic
                // spans.
                let (x, e) = (xi(), eta());
                let right = [
                    DVector::from_vec(vec![e, x, 0.0, 0.0]),
                    DVector::from_vec(vec![0.0, 0.0, x, -e]),
                ];
                let left = [
                    DVector::from_vec(vec![x, e, 0.0, 0.0]),
                    DVector::from_vec(vec![0.0, 0.0, e, -x]),
                ];
                let proj = |vs: &[DVector<f64>]| -> DMatrix<f64> {
                    let mut p = DMatrix::zeros(4, 4);
                    for v in vs {
                        p += v * v.transpose();
                    }
                    p
                };
                let right_mine = proj(&[
                    svd.v().matrix().row(0).transpose(),
                    svd.v().matrix().row(1).transpose(),
                ]);
                let left_mine = proj(&[
                    svd.u().matrix().column(0).into_owned(),
                    svd.u().matrix().column(1).into_owned(),
                ]);
                let sub_err =
                    (right_mine - proj(&right)).norm() + (left_mine - proj(&left)).norm();
                g.check(
                    "singular-subspaces",
                    sub_err <= 1e-10,
                    format!("projector deviation {sub_err:.3e}"),
                );
            }
            Err(e) => g.check("singular-values", false, format!("svd failed: {e}")),
        }
        groups.push(g.close());
    }

    // Group 2: the four characteristic matrices, compared in the
    // interleaved gauge of the published fixtures.
    {
        let mut g = GroupBuilder::new("characteristic");
        let t = pair_flip_gauge();
        let printed = printed_p_matrices();
        for (row, frozen) in table.iter().zip(&printed) {
            let idx = find_index_set(&sets, row.type_i, row.type_ii, row.type_iii);
            match landscape::build_characteristic(&idx, &spec) {
                Ok(c) => {
                    let mine = t.transpose() * c.p() * &t;
                    let err = max_abs_diff(&mine, frozen);
                    g.check(
                        &format!("p-{}-{}-{}", row.type_i, row.type_ii, row.type_iii),
                        err <= 1e-12 + cfg.omega_perturbation.abs() * 10.0,
                        format!("max entry deviation {err:.3e}"),
                    );
                }
                Err(e) => g.check("build", false, format!("{e}")),
            }
        }
        groups.push(g.close());
    }

    // Group 3: representatives against the published matrices.
    {
        let mut g = GroupBuilder::new("representatives");
        let cases: [(usize, usize, usize, DMatrix<f64>, f64); 4] = [
            (2, 0, 0, sum_matrix(), 1e-9),
            (0, 2, 0, printed_type_ii_saddle(), cfg.entry_tol),
            (1, 1, 0, printed_one_dim_saddle_at_zero(), cfg.entry_tol),
            (0, 0, 1, printed_type_iii_saddle(), cfg.entry_tol),
        ];
        for (ti, tii, tiii, frozen, tol_entry) in cases {
            let idx = find_index_set(&sets, ti, tii, tiii);
            match landscape::build_representative(&idx, &fixture, None) {
                Ok(s) => {
                    let err = max_abs_diff(s.matrix(), &frozen);
                    g.check(
                        &format!("s-{ti}-{tii}-{tiii}"),
                        err <= tol_entry,
                        format!("max entry deviation {err:.3e} (tol {tol_entry:.1e})"),
                    );
                    let res = landscape::critical_residual(&s, fixture.w()).unwrap();
                    g.check(
                        &format!("critical-{ti}-{tii}-{tiii}"),
                        res <= tol::CRITICAL,
                        format!("stationarity residual {res:.3e}"),
                    );
                }
                Err(e) => g.check(&format!("s-{ti}-{tii}-{tiii}"), false, format!("{e}")),
            }
        }
        groups.push(g.close());
    }

    // Group 4: landscape values.
    {
        let mut g = GroupBuilder::new("values");
        for row in &table {
            let idx = find_index_set(&sets, row.type_i, row.type_ii, row.type_iii);
            match landscape::critical_value(&idx, &spec) {
                Ok(cv) => {
                    let err = (cv.constructive - row.value).abs();
                    g.check(
                        &format!("value-{}-{}-{}", row.type_i, row.type_ii, row.type_iii),
                        err <= 1e-3,
                        format!("{:.6} vs published {:.3}", cv.constructive, row.value),
                    );
                    let agree = (cv.constructive - cv.closed_form).abs();
                    g.check(
                        &format!("closed-form-{}-{}-{}", row.type_i, row.type_ii, row.type_iii),
                        agree <= 1e-9,
                        format!("constructive vs closed form differ by {agree:.3e}"),
                    );
                }
                Err(e) => g.check("value", false, format!("{e}")),
            }
        }
        groups.push(g.close());
    }

    // Group 5: inertia counts and optimality kinds.
    {
        let mut g = GroupBuilder::new("inertia");
        for row in &table {
            let idx = find_index_set(&sets, row.type_i, row.type_ii, row.type_iii);
            match hessian::assemble_hqf(&idx, &spec)
                .and_then(|q| hessian::inertia_of(&q, None))
            {
                Ok(inertia) => {
                    let ok = inertia.pos == row.pos
                        && inertia.neg == row.neg
                        && inertia.zero == row.zero;
                    g.check(
                        &format!("inertia-{}-{}-{}", row.type_i, row.type_ii, row.type_iii),
                        ok,
                        format!(
                            "computed ({}, {}, {}) vs published ({}, {}, {})",
                            inertia.zero,
                            inertia.pos,
                            inertia.neg,
                            row.zero,
                            row.pos,
                            row.neg
                        ),
                    );
                }
                Err(e) => g.check("inertia", false, format!("{e}")),
            }
            match hessian::classify(&idx, &spec) {
                Ok(kind) => {
                    let is_min = kind == hessian::Kind::Minimum;
                    g.check(
                        &format!("kind-{}-{}-{}", row.type_i, row.type_ii, row.type_iii),
                        is_min == row.minimum,
                        format!("{kind:?}"),
                    );
                }
                Err(e) => g.check("kind", false, format!("{e}")),
            }
        }
        groups.push(g.close());
    }

    // Group 6: the quadratic form at the type III saddle, entrywise.
    {
        let mut g = GroupBuilder::new("hessian-q");
        let idx = find_index_set(&sets, 0, 0, 1);
        match hessian::assemble_hqf(&idx, &spec) {
            Ok(q) => {
                let err = max_abs_diff(q.q(), &printed_hessian_q());
                g.check(
                    "q-entries",
                    err <= 1e-12 + cfg.omega_perturbation.abs() * 10.0,
                    format!("max entry deviation {err:.3e}"),
                );
                match hessian::inertia_of(&q, None) {
                    Ok(inertia) => g.check(
                        "q-inertia",
                        inertia.pos == 7 && inertia.neg == 3 && inertia.zero == 0,
                        format!("({}, {}, {})", inertia.zero, inertia.pos, inertia.neg),
                    ),
                    Err(e) => g.check("q-inertia", false, format!("{e}")),
                }
            }
            Err(e) => g.check("q-entries", false, format!("{e}")),
        }
        groups.push(g.close());
    }

    VerificationReport { groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fixture_svd_reconstructs_gate() {
        let svd = fixture_svd();
        let err = (svd.reconstruct() - sum_matrix()).norm();
        assert!(err <= 1e-12, "reconstruction error {err}");
        assert!(svd.u().orth_residual() <= 1e-12);
        assert!(svd.v().orth_residual() <= 1e-12);
    }

    #[test]
    fn golden_ratio_identities() {
        let (w, x, e) = (omega(), xi(), eta());
        assert_relative_eq!(w * w - w - 1.0, 0.0, epsilon = 1e-15);
        assert_relative_eq!(x * x + e * e, 1.0, epsilon = 1e-15);
        assert_relative_eq!(x * e * 5f64.sqrt(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn verification_passes_with_defaults() {
        let report = verify(&VerifyConfig::default());
        assert!(report.passed(), "failures: {:?}", report.failures());
        assert_eq!(report.groups.len(), 6);
    }

    #[test]
    fn verification_fails_with_overtight_tolerance() {
        let report = verify(&VerifyConfig {
            entry_tol: 1e-15,
            ..Default::default()
        });
        assert!(!report.passed());
    }

    #[test]
    fn verification_fails_with_perturbed_omega() {
        let report = verify(&VerifyConfig {
            omega_perturbation: 1e-2,
            ..Default::default()
        });
        assert!(!report.passed());
        // The landscape values are among the failing checks.
        assert!(report
            .failures()
            .iter()
            .any(|f| f.starts_with("values/")));
    }
}
