//! Compute kernels shared by every driver: skew rank-2 and rank-2k updates,
//! the S-split of a tridiagonal window, W = L*S work panels, the sandwiched
//! trailing update, two-sided Gauss transforms, and the banded column product
//! of the left-looking algorithm.
//!
//! Kernels mutate caller-owned windows addressed by a global window start
//! `lo` and an exclusive column cap (`cap = m` for an unrestricted window;
//! panel factorizations pass the panel boundary). Vectors are indexed from
//! `lo`, i.e. `l[i - lo]` pairs with row `i`.

use crate::error::{Error, Result};
use crate::matrix::{DenseSkewMatrix, UnitLowerTriangular};

/// Instrumentation threaded through a driver call: a flop counter
/// (multiply = add = divide = 1, negation free) and the number of bulk write
/// passes over the trailing principal window of a blocked driver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Instr {
    pub flops: u64,
    pub trailing_passes: u64,
}

impl Instr {
    pub fn new() -> Self {
        Instr::default()
    }
}

/// Skew rank-2 update on the window starting at `lo`, columns capped at
/// `cap`:  X := X + sign * (l x^T - x l^T), strictly-lower entries only.
///
/// `l` and `x` cover the window (length `m - lo`). The diagonal and upper
/// triangle are never touched.
pub fn skr2_lower(
    x: &mut DenseSkewMatrix,
    lo: usize,
    cap: usize,
    l: &[f64],
    xv: &[f64],
    sign: f64,
    instr: &mut Instr,
) -> Result<()> {
    let m = x.order();
    let n = m - lo;
    if l.len() != n || xv.len() != n {
        return Err(Error::DimensionMismatch("skr2_lower vector length"));
    }
    let jmax = cap.min(m);
    let mut entries = 0u64;
    for j in lo..jmax {
        let (lj, xj) = (l[j - lo], xv[j - lo]);
        for i in (j + 1)..m {
            let d = l[i - lo] * xj - xv[i - lo] * lj;
            *x.lo_mut(i, j) += sign * d;
        }
        entries += (m - 1 - j) as u64;
    }
    instr.flops += 4 * entries;
    Ok(())
}

/// Skew rank-2k update:  X := X + sign * (W Y^T - Y W^T) on strictly-lower
/// entries of the window starting at `lo`, columns capped at `cap`.
///
/// `w` and `y` are column-major `n x c` buffers over the window rows.
#[allow(clippy::too_many_arguments)]
pub fn skr2k_lower(
    x: &mut DenseSkewMatrix,
    lo: usize,
    cap: usize,
    c: usize,
    w: &[f64],
    y: &[f64],
    sign: f64,
    instr: &mut Instr,
) -> Result<()> {
    let m = x.order();
    let n = m - lo;
    if w.len() != n * c || y.len() != n * c {
        return Err(Error::DimensionMismatch("skr2k_lower panel shape"));
    }
    let jmax = cap.min(m);
    let mut entries = 0u64;
    for j in lo..jmax {
        for i in (j + 1)..m {
            // accumulate the whole rank-2k contribution before one store
            let mut acc = 0.0;
            for t in 0..c {
                let wc = &w[t * n..(t + 1) * n];
                let yc = &y[t * n..(t + 1) * n];
                acc += wc[i - lo] * yc[j - lo] - yc[i - lo] * wc[j - lo];
            }
            *x.lo_mut(i, j) += sign * acc;
        }
        entries += (m - 1 - j) as u64;
    }
    instr.flops += 4 * c as u64 * entries;
    Ok(())
}

/// The strictly-lower half S of a skew-tridiagonal window, satisfying
/// T = S - S^T. S carries at most two entries per odd row:
/// S[2i+1, 2i] = tau_{2i+1,2i} and S[2i+1, 2i+2] = -tau_{2i+2,2i+1}.
/// Every column with an odd index is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SSplit {
    order: usize,
    subs: Vec<f64>,
}

impl SSplit {
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Nonzero entries (row, col, value) of S.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        let mut r = 1;
        while r < self.order {
            out.push((r, r - 1, self.subs[r - 1]));
            if r + 1 < self.order {
                out.push((r, r + 1, -self.subs[r]));
            }
            r += 2;
        }
        out
    }

    /// Dense S, column-major (test and oracle use).
    pub fn s_dense(&self) -> Vec<f64> {
        let n = self.order;
        let mut s = vec![0.0; n * n];
        for (r, c, v) in self.entries() {
            s[r + c * n] = v;
        }
        s
    }

    /// Dense S - S^T, column-major. Reconstruction is exact: entries are
    /// copied or negated, never combined arithmetically.
    pub fn t_dense(&self) -> Vec<f64> {
        let n = self.order;
        let mut t = vec![0.0; n * n];
        for (r, c, v) in self.entries() {
            t[r + c * n] += v;
            t[c + r * n] -= v;
        }
        t
    }
}

/// Split a skew-tridiagonal window into its S half.
///
/// `subs` are the window's subdiagonal couplings; `boundary_tau` optionally
/// appends one trailing coupling (the bordered-window form of the blocked
/// trailing updates), enlarging the window order by one.
pub fn split_s(subs: &[f64], boundary_tau: Option<f64>) -> SSplit {
    let mut eff = subs.to_vec();
    if let Some(t) = boundary_tau {
        eff.push(t);
    }
    SSplit {
        order: eff.len() + 1,
        subs: eff,
    }
}

/// Accumulated update columns W = Lpanel * S with the structurally-zero odd
/// columns dropped. `ycols` records which L column pairs with each kept W
/// column.
#[derive(Debug, Clone)]
pub struct WorkPanel {
    pub rows: usize,
    pub w: Vec<f64>, // rows x ycols.len(), column-major
    pub ycols: Vec<usize>,
}

/// Form the compressed W = Lpanel * S for the panel
/// `L[row_from.., col_from .. col_from + s.order()]`.
///
/// Each kept column mixes at most two L columns (S has at most two entries
/// per column), so the cost is O(rows) per kept column pair.
pub fn build_w(
    l: &UnitLowerTriangular,
    row_from: usize,
    col_from: usize,
    s: &SSplit,
    instr: &mut Instr,
) -> Result<WorkPanel> {
    let m = l.order();
    let order = s.order();
    if col_from + order > m || row_from > m {
        return Err(Error::DimensionMismatch("build_w panel out of range"));
    }
    let rows = m - row_from;
    let lcol = |col: usize, i: usize| -> f64 {
        let c = col_from + col;
        let r = row_from + i;
        if r > c {
            l.lo(r, c)
        } else if r == c {
            1.0
        } else {
            0.0
        }
    };
    let mut w = Vec::new();
    let mut ycols = Vec::new();
    let mut c = 0;
    while c < order {
        // column c (even) of S holds subs[c] at row c+1 and -subs[c-1] at row c-1
        let up = if c + 1 < order { Some(s.subs[c]) } else { None };
        let down = if c >= 1 { Some(-s.subs[c - 1]) } else { None };
        let mut col = vec![0.0; rows];
        match (up, down) {
            (Some(a), Some(b)) => {
                for (i, slot) in col.iter_mut().enumerate() {
                    *slot = a * lcol(c + 1, i) + b * lcol(c - 1, i);
                }
                instr.flops += 3 * rows as u64;
            }
            (Some(a), None) => {
                for (i, slot) in col.iter_mut().enumerate() {
                    *slot = a * lcol(c + 1, i);
                }
                instr.flops += rows as u64;
            }
            (None, Some(b)) => {
                for (i, slot) in col.iter_mut().enumerate() {
                    *slot = b * lcol(c - 1, i);
                }
                instr.flops += rows as u64;
            }
            (None, None) => {}
        }
        w.extend_from_slice(&col);
        ycols.push(col_from + c);
        c += 2;
    }
    Ok(WorkPanel { rows, w, ycols })
}

/// Expanded (uncompressed) W = Lpanel * S, for structural checks: every odd
/// column comes out exactly zero.
pub fn build_w_expanded(
    l: &UnitLowerTriangular,
    row_from: usize,
    col_from: usize,
    s: &SSplit,
) -> Vec<f64> {
    let m = l.order();
    let order = s.order();
    let rows = m - row_from;
    let mut w = vec![0.0; rows * order];
    for (r, c, v) in s.entries() {
        let lc = col_from + r;
        for i in 0..rows {
            let row = row_from + i;
            let lv = if row > lc {
                l.lo(row, lc)
            } else if row == lc {
                1.0
            } else {
                0.0
            };
            w[i + c * rows] += v * lv;
        }
    }
    w
}

/// Copy the window rows of L panel columns into a dense buffer conformal
/// with a WorkPanel's compressed columns.
pub(crate) fn gather_l_columns(
    l: &UnitLowerTriangular,
    row_from: usize,
    cols: &[usize],
) -> Vec<f64> {
    let m = l.order();
    let rows = m - row_from;
    let mut y = vec![0.0; rows * cols.len()];
    for (t, &c) in cols.iter().enumerate() {
        for i in 0..rows {
            let r = row_from + i;
            y[i + t * rows] = if r > c {
                l.lo(r, c)
            } else if r == c {
                1.0
            } else {
                0.0
            };
        }
    }
    y
}

/// Sandwiched skew rank-k update of the trailing window starting at `w0`:
///
///   X := X - Lp * M * Lp^T   (strictly-lower entries),
///
/// where Lp = L[w0.., col_from .. col_from + subs.len() + 1] and M is the
/// bordered skew-tridiagonal window with subdiagonal `subs`. Always realized
/// through W = Lp * S followed by a compressed rank-2k update, which is what
/// brings the blocked cost down to ~m^3/3.
pub fn sandwiched_update(
    x: &mut DenseSkewMatrix,
    w0: usize,
    l: &UnitLowerTriangular,
    col_from: usize,
    subs: &[f64],
    instr: &mut Instr,
) -> Result<()> {
    let m = x.order();
    if w0 >= m {
        return Ok(());
    }
    let s = split_s(subs, None);
    let wp = build_w(l, w0, col_from, &s, instr)?;
    if wp.ycols.is_empty() {
        return Ok(());
    }
    let y = gather_l_columns(l, w0, &wp.ycols);
    skr2k_lower(x, w0, m, wp.ycols.len(), &wp.w, &y, -1.0, instr)
}

/// Application direction of a two-sided Gauss transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussDirection {
    Forward,
    Inverse,
}

/// Two-sided Gauss transform on the window starting at `lo`:
/// X := G X G^T with G = [1, 0; -l, I] (forward) or its inverse. For a skew
/// window this reduces to a rank-2 update of the trailing part; the first
/// row and column of the window are unchanged.
pub fn gauss_apply_two_sided(
    x: &mut DenseSkewMatrix,
    lo: usize,
    l: &[f64],
    dir: GaussDirection,
    instr: &mut Instr,
) -> Result<()> {
    let m = x.order();
    if lo >= m {
        return Err(Error::DimensionMismatch("gauss window start out of range"));
    }
    let n = m - lo;
    if l.len() != n - 1 {
        return Err(Error::DimensionMismatch("gauss multiplier length"));
    }
    if n <= 1 {
        return Ok(());
    }
    let xcol: Vec<f64> = ((lo + 1)..m).map(|i| x.lo(i, lo)).collect();
    let sign = match dir {
        GaussDirection::Forward => 1.0,
        GaussDirection::Inverse => -1.0,
    };
    skr2_lower(x, lo + 1, m, l, &xcol, sign, instr)
}

/// One column of the Aasen product H = T L^T, exploiting tridiagonality.
#[derive(Debug, Clone, PartialEq)]
pub struct AasenColumn {
    pub h: Vec<f64>,
}

/// Banded matrix-vector product h = M v where M is the skew-tridiagonal
/// window with subdiagonal `subs` (order subs.len() + 1).
pub(crate) fn aasen_apply(subs: &[f64], v: &[f64], instr: &mut Instr) -> Vec<f64> {
    let n = subs.len() + 1;
    debug_assert_eq!(v.len(), n);
    let mut h = vec![0.0; n];
    let mut flops = 0u64;
    for (i, slot) in h.iter_mut().enumerate() {
        let mut acc = 0.0;
        if i >= 1 {
            acc += subs[i - 1] * v[i - 1];
            flops += 2;
        }
        if i + 1 < n {
            acc -= subs[i] * v[i + 1];
            flops += 2;
        }
        *slot = acc;
    }
    instr.flops += flops;
    h
}

/// The column of H needed by one left-looking step:
/// h = [T00, -tau10 e_l; tau10 e_l^T, 0] * [l10; 1].
///
/// `win_subs` holds the subdiagonals of the bordered window (its last entry
/// is the border coupling tau10); `l10` is the current row of L over the
/// window, the trailing unit entry implicit. Costs O(window) flops, at most
/// 6 per produced entry.
pub fn aasen_column(win_subs: &[f64], l10: &[f64], instr: &mut Instr) -> Result<AasenColumn> {
    if l10.len() != win_subs.len() {
        return Err(Error::DimensionMismatch("aasen_column row length"));
    }
    let mut v = Vec::with_capacity(l10.len() + 1);
    v.extend_from_slice(l10);
    v.push(1.0);
    Ok(AasenColumn {
        h: aasen_apply(win_subs, &v, instr),
    })
}
