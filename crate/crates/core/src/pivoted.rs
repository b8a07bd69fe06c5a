//! Symmetric-pivoted drivers: unblocked right-looking, unblocked
//! left-looking (the only panel factorization that admits pivoting), and the
//! blocked right-looking driver with either trailing-update mode.
//!
//! Every step picks the largest-magnitude entry of the active column,
//! symmetrically swaps it to the subdiagonal, and keeps every multiplier at
//! most one in magnitude. The factorizations satisfy
//! P X P^T = L T L^T with P = blkdiag(1, P(p)); the leading zero pivot of
//! the full permutation is implicit and not stored.

use crate::blocked::wimmer_w_update;
use crate::error::{Error, Result};
use crate::factorization::{BlockConfig, Factorization, FirstColMode, UpdateMode, Variant};
use crate::kernels::{aasen_column, sandwiched_update, skr2_lower};
use crate::matrix::DenseSkewMatrix;
use crate::perm::PermutationVector;
use crate::unblocked::FactorState;

/// Index of the entry of largest magnitude, ties broken by the lowest index.
pub fn iamax(v: &[f64]) -> Result<usize> {
    if v.is_empty() {
        return Err(Error::DimensionMismatch("iamax of an empty column"));
    }
    let mut best = 0;
    let mut mag = v[0].abs();
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x.abs() > mag {
            best = i;
            mag = x.abs();
        }
    }
    Ok(best)
}

/// Symmetric pivot: swap rows and columns `i` and `i + pi`, preserving skew
/// structure in the lower-triangle storage.
pub fn apply_pivot_symmetric(x: &mut DenseSkewMatrix, i: usize, pi: usize) -> Result<()> {
    let m = x.order();
    if i >= m || pi >= m - i {
        return Err(Error::PivotOutOfWindow {
            pivot: pi,
            window: m.saturating_sub(i),
        });
    }
    x.swap_symmetric(i, i + pi);
    Ok(())
}

/// Select, record, and apply the pivot for column `c`: the matrix is swapped
/// symmetrically and the computed rows of L move with it.
fn pivot_column(st: &mut FactorState, p: &mut PermutationVector, c: usize) {
    let m = st.x.order();
    let col: Vec<f64> = ((c + 1)..m).map(|i| st.x.lo(i, c)).collect();
    let pi = iamax(&col).expect("active column is nonempty");
    p.set(c, pi);
    if pi > 0 {
        st.x.swap_symmetric(c + 1, c + 1 + pi);
        st.l.swap_rows_through(c + 1, c + 1 + pi, c);
    }
}

/// Divide out the pivot, or record a zero column (tau = 0, l = 0) and move
/// on: a singular matrix still factors.
fn divide_or_skip(st: &mut FactorState, c: usize) -> bool {
    let m = st.x.order();
    let tau = st.x.lo(c + 1, c);
    st.t.sub[c] = tau;
    if c + 2 < m && tau != 0.0 {
        for i in (c + 2)..m {
            *st.l.lo_mut(i, c + 1) = st.x.lo(i, c) / tau;
        }
        st.instr.flops += (m - c - 2) as u64;
        true
    } else {
        false
    }
}

/// Pivoted right-looking driver.
pub fn ltlt_piv_unb_right(x: &DenseSkewMatrix) -> Result<Factorization> {
    let m = x.order();
    let mut st = FactorState::new(x);
    let mut p = PermutationVector::identity(m.saturating_sub(1));
    for c in 0..m.saturating_sub(1) {
        pivot_column(&mut st, &mut p, c);
        if divide_or_skip(&mut st, c) && c + 2 < m {
            let l: Vec<f64> = ((c + 2)..m).map(|i| st.l.lo(i, c + 1)).collect();
            let xv: Vec<f64> = ((c + 2)..m).map(|i| st.x.lo(i, c + 1)).collect();
            skr2_lower(&mut st.x, c + 2, m, &l, &xv, 1.0, &mut st.instr)?;
        }
    }
    let mut f = st.into_factorization(Variant::PivUnbRight, FirstColMode::CanonicalE0);
    f.p = Some(p);
    Ok(f)
}

/// Pivoted left-looking panel over columns `start .. start + ncols` with
/// history base `hbase` (local first column implicitly zero). Each pivot is
/// applied to the entire remaining matrix and to every computed row of L, so
/// the trailing matrix stays consistently pivoted.
pub(crate) fn panel_piv_left(
    st: &mut FactorState,
    p: &mut PermutationVector,
    start: usize,
    hbase: usize,
    ncols: usize,
) -> Result<()> {
    let m = st.x.order();
    for c in start..(start + ncols) {
        let wlen = c - hbase;
        if wlen > 0 {
            let mut l10 = Vec::with_capacity(wlen);
            l10.push(0.0);
            for t in (hbase + 1)..c {
                l10.push(st.l.lo(c, t));
            }
            let h = aasen_column(&st.t.sub[hbase..c], &l10, &mut st.instr)?.h;
            for i in (c + 1)..m {
                let mut acc = 0.0;
                for (t, &hv) in h.iter().enumerate().skip(1) {
                    acc += st.l.lo(i, hbase + t) * hv;
                }
                *st.x.lo_mut(i, c) -= acc;
            }
            st.instr.flops += 2 * wlen as u64 * (m - c - 1) as u64;
        }
        pivot_column(st, p, c);
        divide_or_skip(st, c);
    }
    Ok(())
}

/// Pivoted left-looking driver; `ncols` limits the factorization to a panel
/// while the pivots still act on all remaining rows.
pub fn ltlt_piv_unb_left(x: &DenseSkewMatrix, ncols: Option<usize>) -> Result<Factorization> {
    let m = x.order();
    let n = ncols
        .unwrap_or(m.saturating_sub(1))
        .min(m.saturating_sub(1));
    let mut st = FactorState::new(x);
    let mut p = PermutationVector::identity(m.saturating_sub(1));
    panel_piv_left(&mut st, &mut p, 0, 0, n)?;
    let mut f = st.into_factorization(Variant::PivUnbLeft, FirstColMode::CanonicalE0);
    f.p = Some(p);
    Ok(f)
}

/// Pivoted blocked right-looking driver. The panel is always the pivoted
/// left-looking factorization over all remaining rows (a right-looking panel
/// cannot be pivoted, and panels never nest); the trailing window is updated
/// either by the sandwiched rank-k form plus the rank-2 fix-up, or by the
/// fused W-form rank-2k update.
pub fn ltlt_piv_blk_right(
    x: &DenseSkewMatrix,
    cfg: &BlockConfig,
    update_mode: UpdateMode,
) -> Result<Factorization> {
    let m = x.order();
    let mut st = FactorState::new(x);
    let mut p = PermutationVector::identity(m.saturating_sub(1));
    let mut k = 0;
    while k + 1 < m {
        let e = cfg.b.min(m - 1 - k);
        panel_piv_left(&mut st, &mut p, k, k, e)?;
        let w0 = k + e;
        if w0 < m {
            match update_mode {
                UpdateMode::Sandwiched => {
                    if e >= 2 {
                        let subs = st.t.sub[(k + 1)..(k + e)].to_vec();
                        sandwiched_update(&mut st.x, w0, &st.l, k + 1, &subs, &mut st.instr)?;
                        if m - (w0 + 1) >= 2 {
                            st.instr.trailing_passes += 1;
                        }
                    }
                    let f0 = w0 + 1;
                    if f0 < m {
                        let l43: Vec<f64> = (f0..m).map(|i| st.l.lo(i, w0)).collect();
                        let x43: Vec<f64> = (f0..m).map(|i| st.x.lo(i, w0)).collect();
                        skr2_lower(&mut st.x, f0, m, &l43, &x43, 1.0, &mut st.instr)?;
                        if m - f0 >= 2 {
                            st.instr.trailing_passes += 1;
                        }
                    }
                }
                UpdateMode::WimmerW => {
                    let subs = st.t.sub[(k + 1)..(k + e)].to_vec();
                    wimmer_w_update(&mut st, w0, k + 1, &subs)?;
                }
            }
        }
        k += e;
    }
    let mut f = st.into_factorization(Variant::PivBlkRight, FirstColMode::CanonicalE0);
    f.p = Some(p);
    Ok(f)
}
