//! Independent correctness oracles: dense reconstruction, residuals,
//! structural audits, a determinant oracle, and the Pfaffian application.
//!
//! Nothing in here shares code with the drivers: the reconstruction is a
//! naive dense triple product, the determinant is a plain partially-pivoted
//! LU. Corrupting a driver must show up here.

use crate::error::{Error, Result};
use crate::factorization::Factorization;
use crate::matrix::DenseSkewMatrix;
use crate::perm::{apply_perm_inverse, perm_sign};

/// Dense P^-1 L T L^T P^-T (identity permutation when no pivots), built by
/// a naive triple product. Column-major m x m.
pub fn reconstruct(fact: &Factorization) -> Vec<f64> {
    let m = fact.order();
    let mut lt = vec![0.0; m * m];
    for j in 0..m {
        for i in 0..m {
            let mut acc = 0.0;
            for t in 0..m {
                acc += fact.l.get(i, t) * fact.t.get(t, j);
            }
            lt[i + j * m] = acc;
        }
    }
    let mut out = vec![0.0; m * m];
    for j in 0..m {
        for i in 0..m {
            let mut acc = 0.0;
            for t in 0..m {
                acc += lt[i + t * m] * fact.l.get(j, t);
            }
            out[i + j * m] = acc;
        }
    }
    if let Some(p) = &fact.p {
        // undo the recorded pivots: rows, then columns via transpose
        apply_perm_inverse(&mut out, m, m, p, 1).expect("valid pivots");
        let mut tr = vec![0.0; m * m];
        for j in 0..m {
            for i in 0..m {
                tr[j + i * m] = out[i + j * m];
            }
        }
        apply_perm_inverse(&mut tr, m, m, p, 1).expect("valid pivots");
        for j in 0..m {
            for i in 0..m {
                out[i + j * m] = tr[j + i * m];
            }
        }
    }
    out
}

/// Normalized reconstruction mismatch:
/// ||X - P^-1 L T L^T P^-T||_F / max(||X||_F, tiny), lower-triangle entries
/// doubled for the implicit mirror.
pub fn residual(xhat: &DenseSkewMatrix, fact: &Factorization) -> f64 {
    let m = xhat.order();
    assert_eq!(m, fact.order(), "order mismatch");
    let r = reconstruct(fact);
    let mut s = 0.0;
    for j in 0..m {
        for i in (j + 1)..m {
            let d = r[i + j * m] - xhat.get(i, j);
            s += 2.0 * d * d;
        }
    }
    s.sqrt() / xhat.frob_norm().max(1e-300)
}

/// Structural audit of a factorization; failures are carried, not raised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub unit_diag: bool,
    pub canonical_first_col: bool,
    pub tridiagonal: bool,
    pub bounded_l: bool,
    pub pivots_valid: bool,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.unit_diag
            && self.canonical_first_col
            && self.tridiagonal
            && self.bounded_l
            && self.pivots_valid
    }
}

/// Check the structural claims: implicit unit diagonal backed by finite
/// entries, canonical first column when applicable, strictly tridiagonal T,
/// bounded multipliers when pivoted, pivots inside their windows.
pub fn audit_structure(fact: &Factorization) -> AuditReport {
    let m = fact.order();
    let mut finite = true;
    for j in 0..m {
        for i in (j + 1)..m {
            finite &= fact.l.get(i, j).is_finite();
        }
    }
    let canonical = if fact.first_col_mode == crate::factorization::FirstColMode::CanonicalE0 {
        (1..m).all(|i| fact.l.get(i, 0) == 0.0)
    } else {
        true
    };
    let tridiagonal =
        fact.t.sub.len() == m.saturating_sub(1) && fact.t.sub.iter().all(|v| v.is_finite());
    let bounded_l = if fact.variant.is_pivoted() {
        fact.l.max_strict_lower_abs() <= 1.0 + 4.0 * f64::EPSILON
    } else {
        true
    };
    let pivots_valid = match &fact.p {
        Some(p) => p.is_valid() && p.len() == m.saturating_sub(1),
        None => true,
    };
    AuditReport {
        unit_diag: finite,
        canonical_first_col: canonical,
        tridiagonal,
        bounded_l,
        pivots_valid,
    }
}

/// Determinant by dense LU with partial pivoting; independent of every
/// driver code path.
pub fn det_oracle(xhat: &DenseSkewMatrix) -> f64 {
    let m = xhat.order();
    let mut a = vec![0.0; m * m];
    for j in 0..m {
        for i in 0..m {
            a[i + j * m] = xhat.get(i, j);
        }
    }
    let mut det = 1.0;
    for k in 0..m {
        let mut piv = k;
        let mut best = a[k + k * m].abs();
        for i in (k + 1)..m {
            if a[i + k * m].abs() > best {
                best = a[i + k * m].abs();
                piv = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in 0..m {
                a.swap(k + j * m, piv + j * m);
            }
            det = -det;
        }
        let d = a[k + k * m];
        det *= d;
        for i in (k + 1)..m {
            let f = a[i + k * m] / d;
            for j in (k + 1)..m {
                a[i + j * m] -= f * a[k + j * m];
            }
        }
    }
    det
}

/// Pfaffian of the factored matrix: the pivot sign times the product of the
/// even-position subdiagonals of T. Rejects odd orders.
///
/// det L = 1 contributes nothing, and pf(P X P^T) = det(P) pf(X) makes the
/// recorded pivot sign the only correction needed.
pub fn pfaffian(fact: &Factorization) -> Result<f64> {
    let m = fact.order();
    if !m.is_multiple_of(2) {
        return Err(Error::OddDimension(m));
    }
    let sign = match &fact.p {
        Some(p) => perm_sign(p) as f64,
        None => 1.0,
    };
    let mut pf = sign;
    for i in 0..m / 2 {
        pf *= fact.t.sub[2 * i];
    }
    Ok(pf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{BlockConfig, FirstColMode, UpdateMode, Variant};
    use crate::matrix::{random_skew, DenseSkewMatrix, SkewTridiagonal, UnitLowerTriangular};
    use crate::pivoted::{ltlt_piv_blk_right, ltlt_piv_unb_right};
    use crate::unblocked::{ltlt_unb_right, tests_support::running_example, PanelScope};

    const EPS: f64 = f64::EPSILON;

    #[test]
    fn reconstruct_identity_l() {
        let f = Factorization {
            l: UnitLowerTriangular::identity(2),
            t: SkewTridiagonal::from_sub(2, vec![2.5]).unwrap(),
            p: None,
            flops: 0,
            variant: Variant::UnbRight,
            first_col_mode: FirstColMode::CanonicalE0,
            trailing_write_passes: 0,
        };
        assert_eq!(reconstruct(&f), vec![0.0, 2.5, -2.5, 0.0]);
    }

    #[test]
    fn reconstruct_running_example_exact() {
        let x = running_example();
        let f = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
        let r = reconstruct(&f);
        for j in 0..4 {
            for i in 0..4 {
                assert_eq!(r[i + 4 * j], x.get(i, j), "({i},{j})");
            }
        }
        assert_eq!(r[3 + 4], 5.0);
        assert_eq!(r[3 + 8], 6.0);
        assert_eq!(residual(&x, &f), 0.0);
        // packed layout of the same factorization: T on the first
        // subdiagonal, L below it
        let packed = crate::factorization::pack_overwrite(&f).unwrap();
        assert_eq!(packed.get(1, 0), 1.0);
        assert_eq!(packed.get(2, 1), 4.0);
        assert_eq!(packed.get(3, 2), 8.0);
        assert_eq!(packed.get(2, 0), 2.0);
        assert_eq!(packed.get(3, 0), 3.0);
        assert_eq!(packed.get(3, 1), 1.25);
        // pack round-trip does not change what reconstructs
        let (l2, t2) = crate::factorization::pack_overwrite(&f).unwrap().unpack();
        let f2 = Factorization {
            l: l2,
            t: t2,
            ..f.clone()
        };
        assert_eq!(reconstruct(&f2), r);
    }

    #[test]
    fn residual_grows_with_perturbation() {
        let x = random_skew(8, 5);
        let mut f = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
        let base = residual(&x, &f);
        assert!(base <= 100.0 * 8.0 * EPS);
        let delta = 1e-6;
        f.t.sub[3] += delta;
        let bumped = residual(&x, &f);
        assert!(bumped > base);
        // the mismatch norm scales linearly with the perturbation:
        // direct-norm oracle for one perturbed subdiagonal entry
        f.t.sub[3] += delta; // total 2 delta
        let doubled = residual(&x, &f);
        assert!((doubled / bumped - 2.0).abs() < 0.2);
    }

    #[test]
    fn residual_of_empty_matrix() {
        let x = DenseSkewMatrix::zero(0);
        let f = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
        assert_eq!(residual(&x, &f), 0.0);
    }

    #[test]
    fn audit_passes_for_driver_output() {
        let x = random_skew(10, 6);
        let f = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
        assert!(audit_structure(&f).all_pass());
        let fp = ltlt_piv_unb_right(&x).unwrap();
        assert!(audit_structure(&fp).all_pass());
        let fb = ltlt_piv_blk_right(&x, &BlockConfig::new(4), UpdateMode::WimmerW).unwrap();
        assert!(audit_structure(&fb).all_pass());
    }

    #[test]
    fn audit_flags_oversized_multiplier_under_pivoted_tag() {
        let x = random_skew(6, 7);
        let mut f = ltlt_piv_unb_right(&x).unwrap();
        f.l.set(1, 0, 2.0).unwrap();
        let report = audit_structure(&f);
        assert!(!report.bounded_l);
        assert!(!report.all_pass());
    }

    #[test]
    fn det_oracle_cases() {
        // 2x2 skew: det = a^2
        let x = crate::matrix::skew_from_strict_lower(2, &[(1, 0, 3.0)]).unwrap();
        assert!((det_oracle(&x) - 9.0).abs() < 1e-12);
        // odd skew matrices are singular
        for m in [1usize, 3, 5, 7] {
            let x = random_skew(m, m as u64 + 9);
            let scale = x.frob_norm().max(1.0).powi(m as i32);
            assert!(det_oracle(&x).abs() <= 1e-10 * scale, "m={m}");
        }
        // desk-scale cofactor value for the running example
        let x = running_example();
        assert!((det_oracle(&x) - 64.0).abs() < 1e-10);
    }

    #[test]
    fn pfaffian_running_example() {
        let x = running_example();
        let f = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
        let pf = pfaffian(&f).unwrap();
        assert_eq!(pf, 8.0, "1 * 8");
        assert!((pf * pf - det_oracle(&x)).abs() < 1e-10);
    }

    #[test]
    fn pfaffian_two_by_two() {
        let x = crate::matrix::skew_from_strict_lower(2, &[(1, 0, -4.5)]).unwrap();
        let f = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
        assert_eq!(pfaffian(&f).unwrap(), -4.5);
    }

    #[test]
    fn pfaffian_rejects_odd_order() {
        let x = random_skew(3, 1);
        let f = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
        assert_eq!(pfaffian(&f), Err(Error::OddDimension(3)));
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        for m in [2usize, 4, 6, 8, 10, 12] {
            for seed in 0..8u64 {
                let x = random_skew(m, 1000 + seed);
                let det = det_oracle(&x);
                let fu = ltlt_unb_right(&x, &PanelScope::full()).unwrap();
                let pf = pfaffian(&fu).unwrap();
                assert!(
                    (pf * pf - det).abs() <= 1e-8 * det.abs().max(1e-30),
                    "unpivoted m={m} seed={seed}"
                );
                let fp = ltlt_piv_unb_right(&x).unwrap();
                let pfp = pfaffian(&fp).unwrap();
                assert!(
                    (pfp * pfp - det).abs() <= 1e-8 * det.abs().max(1e-30),
                    "pivoted m={m} seed={seed}: {} vs {det}",
                    pfp * pfp
                );
            }
        }
    }
}
