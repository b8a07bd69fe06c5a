//! Unblocked drivers: right-looking (modified Parlett-Reid), left-looking
//! (modified Aasen), and the two-step (Wimmer) algorithm, plus the panel
//! (partial factorization) forms the blocked drivers are built on.
//!
//! All drivers factor X = L T L^T with L unit lower triangular (column 0
//! canonical unless a first column is given) and T skew tridiagonal. They
//! work on an internal copy of the operand; the original is never modified.

use crate::error::{Error, Result};
use crate::factorization::{Factorization, FirstColMode, Variant};
use crate::kernels::{aasen_column, skr2_lower, Instr};
use crate::matrix::{DenseSkewMatrix, SkewTridiagonal, UnitLowerTriangular};

/// How a driver treats the first column of L.
#[derive(Debug, Clone, PartialEq)]
pub enum FirstCol {
    /// Canonical: column 0 of L equals e_0.
    Zero,
    /// A caller-supplied strictly-lower column of length m - 1.
    Given(Vec<f64>),
}

/// Scope of a driver call: full factorization or a panel of `ncols` columns.
///
/// In panel mode with `update_beyond_panel = false`, nothing outside the
/// panel's columns is written.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelScope {
    pub ncols: Option<usize>,
    pub update_beyond_panel: bool,
    pub first_col: FirstCol,
}

impl PanelScope {
    /// Factor everything.
    pub fn full() -> Self {
        PanelScope {
            ncols: None,
            update_beyond_panel: true,
            first_col: FirstCol::Zero,
        }
    }

    /// Factor `ncols` columns without touching the rest of the matrix.
    pub fn panel(ncols: usize) -> Self {
        PanelScope {
            ncols: Some(ncols),
            update_beyond_panel: false,
            first_col: FirstCol::Zero,
        }
    }

    pub fn with_first_col(mut self, fc: FirstCol) -> Self {
        self.first_col = fc;
        self
    }
}

impl Default for PanelScope {
    fn default() -> Self {
        PanelScope::full()
    }
}

/// Working state shared by all drivers.
pub(crate) struct FactorState {
    pub x: DenseSkewMatrix,
    pub l: UnitLowerTriangular,
    pub t: SkewTridiagonal,
    pub instr: Instr,
}

impl FactorState {
    pub fn new(x: &DenseSkewMatrix) -> Self {
        let m = x.order();
        FactorState {
            x: x.clone(),
            l: UnitLowerTriangular::identity(m),
            t: SkewTridiagonal::zero(m),
            instr: Instr::new(),
        }
    }

    pub fn into_factorization(self, variant: Variant, mode: FirstColMode) -> Factorization {
        Factorization {
            l: self.l,
            t: self.t,
            p: None,
            flops: self.instr.flops,
            variant,
            first_col_mode: mode,
            trailing_write_passes: self.instr.trailing_passes,
        }
    }

    /// Install a given strictly-lower first column into L.
    fn set_first_col(&mut self, l21: &[f64]) -> Result<()> {
        let m = self.l.order();
        if l21.len() != m.saturating_sub(1) {
            return Err(Error::DimensionMismatch("given first column length"));
        }
        for (i, &v) in l21.iter().enumerate() {
            *self.l.lo_mut(i + 1, 0) = v;
        }
        Ok(())
    }
}

/// Apply the Gauss transform of a given first column:
/// X22 := X22 + (l21 x21^T - x21 l21^T) on the trailing window, the first
/// column itself unchanged. The returned matrix factors canonically into the
/// same (T, trailing L) as the original does with column 0 of L set to
/// (1; l21).
pub fn preprocess_first_column(x: &DenseSkewMatrix, l21: &[f64]) -> Result<DenseSkewMatrix> {
    let m = x.order();
    if l21.len() != m.saturating_sub(1) {
        return Err(Error::DimensionMismatch("preprocess column length"));
    }
    let mut out = x.clone();
    if m >= 2 {
        let xcol: Vec<f64> = (1..m).map(|i| x.get(i, 0)).collect();
        skr2_lower(&mut out, 1, m, l21, &xcol, 1.0, &mut Instr::new())?;
    }
    Ok(out)
}

/// One right-looking elimination step at column `c`, updates capped at `cap`.
fn step_right(st: &mut FactorState, c: usize, cap: usize) -> Result<()> {
    let m = st.x.order();
    let tau = st.x.lo(c + 1, c);
    st.t.sub[c] = tau;
    if c + 2 < m {
        if tau == 0.0 {
            return Err(Error::ZeroPivot { index: c });
        }
        for i in (c + 2)..m {
            *st.l.lo_mut(i, c + 1) = st.x.lo(i, c) / tau;
        }
        st.instr.flops += (m - c - 2) as u64;
        let l: Vec<f64> = ((c + 2)..m).map(|i| st.l.lo(i, c + 1)).collect();
        let xv: Vec<f64> = ((c + 2)..m).map(|i| st.x.lo(i, c + 1)).collect();
        skr2_lower(&mut st.x, c + 2, cap, &l, &xv, 1.0, &mut st.instr)?;
    }
    Ok(())
}

/// Right-looking panel over columns `start .. start + ncols`, rank-2 updates
/// capped at column `cap`. With `given_first`, the transform of the stored
/// column L[.., start] is first applied to the window (capped), after which
/// the panel proceeds canonically.
pub(crate) fn panel_right(
    st: &mut FactorState,
    start: usize,
    ncols: usize,
    cap: usize,
    given_first: bool,
) -> Result<()> {
    let m = st.x.order();
    if given_first && start + 1 < m {
        let lg: Vec<f64> = ((start + 1)..m).map(|i| st.l.lo(i, start)).collect();
        let xg: Vec<f64> = ((start + 1)..m).map(|i| st.x.lo(i, start)).collect();
        skr2_lower(&mut st.x, start + 1, cap, &lg, &xg, 1.0, &mut st.instr)?;
    }
    for c in start..(start + ncols) {
        step_right(st, c, cap)?;
    }
    Ok(())
}

/// Left-looking panel over columns `start .. start + ncols` with history
/// window base `hbase`. With `include_first`, the stored column L[.., hbase]
/// participates in the history product (the given-first-column mode);
/// otherwise it is treated as implicitly zero.
pub(crate) fn panel_left(
    st: &mut FactorState,
    start: usize,
    hbase: usize,
    ncols: usize,
    include_first: bool,
) -> Result<()> {
    let m = st.x.order();
    for c in start..(start + ncols) {
        let wlen = c - hbase;
        if wlen > 0 {
            // h = bordered T window times the current row of L
            let mut l10 = Vec::with_capacity(wlen);
            l10.push(if include_first {
                st.l.lo(c, hbase)
            } else {
                0.0
            });
            for t in (hbase + 1)..c {
                l10.push(st.l.lo(c, t));
            }
            let h = aasen_column(&st.t.sub[hbase..c], &l10, &mut st.instr)?.h;
            let t0 = if include_first { 0 } else { 1 };
            for i in (c + 1)..m {
                let mut acc = 0.0;
                for (t, &hv) in h.iter().enumerate().skip(t0) {
                    acc += st.l.lo(i, hbase + t) * hv;
                }
                *st.x.lo_mut(i, c) -= acc;
            }
            let terms = (wlen + 1 - t0) as u64;
            st.instr.flops += 2 * terms * (m - c - 1) as u64;
        }
        let tau = st.x.lo(c + 1, c);
        st.t.sub[c] = tau;
        if c + 2 < m {
            if tau == 0.0 {
                return Err(Error::ZeroPivot { index: c });
            }
            for i in (c + 2)..m {
                *st.l.lo_mut(i, c + 1) = st.x.lo(i, c) / tau;
            }
            st.instr.flops += (m - c - 2) as u64;
        }
    }
    Ok(())
}

/// Deferred trailing work recorded by a two-step panel.
#[derive(Debug, Default)]
pub(crate) struct WimmerDeferred {
    /// Interior rank-2 pairs: (L column index, stashed update column over
    /// the rows at and beyond the panel boundary).
    pub pairs: Vec<(usize, Vec<f64>)>,
    /// Column fix-up of a final pair: (tau, lambda32, column of l42).
    pub fixup: Option<(f64, f64, usize)>,
    pub has_final: bool,
}

/// Two-step (Wimmer) panel over columns `start .. start + ncols`, writes
/// capped at `cap`. In panel mode (`defer` present, `cap == start + ncols`)
/// the trailing effect of the boundary elimination is recorded instead of
/// applied.
pub(crate) fn panel_wimmer(
    st: &mut FactorState,
    start: usize,
    ncols: usize,
    cap: usize,
    mut defer: Option<&mut WimmerDeferred>,
) -> Result<()> {
    let m = st.x.order();
    let end = start + ncols;
    let mut c = start;
    while c + 1 < end {
        // first half-step: tau_c and the Gauss column it defines
        let tau0 = st.x.lo(c + 1, c);
        st.t.sub[c] = tau0;
        if tau0 == 0.0 {
            return Err(Error::ZeroPivot { index: c });
        }
        for i in (c + 2)..m {
            *st.l.lo_mut(i, c + 1) = st.x.lo(i, c) / tau0;
        }
        st.instr.flops += (m - c - 2) as u64;
        // second half-step
        let tau1 = st.x.lo(c + 2, c + 1);
        st.t.sub[c + 1] = tau1;
        if c + 3 < m {
            if tau1 == 0.0 {
                return Err(Error::ZeroPivot { index: c + 1 });
            }
            for i in (c + 3)..m {
                *st.l.lo_mut(i, c + 2) = st.x.lo(i, c + 1) / tau1;
            }
            st.instr.flops += (m - c - 3) as u64;
        }
        let lambda = st.l.get(c + 2, c + 1);
        if c + 2 < cap {
            // the single rank-2 update of this pair, then the column fix-up
            let y: Vec<f64> = ((c + 3)..m).map(|i| st.l.lo(i, c + 2)).collect();
            let w: Vec<f64> = ((c + 3)..m).map(|i| st.x.lo(i, c + 2)).collect();
            if let Some(d) = defer.as_deref_mut() {
                let stashed: Vec<f64> = (cap..m).map(|i| st.x.lo(i, c + 2)).collect();
                d.pairs.push((c + 2, stashed));
            }
            skr2_lower(&mut st.x, c + 3, cap, &y, &w, 1.0, &mut st.instr)?;
            let scaled = tau1 * lambda;
            for i in (c + 3)..m {
                let adj = tau1 * st.l.lo(i, c + 1) - scaled * st.l.lo(i, c + 2);
                *st.x.lo_mut(i, c + 2) += adj;
            }
            st.instr.flops += 1 + 4 * (m as u64 - c as u64 - 3);
        } else {
            // boundary pair: trailing rank-2 and fix-up are deferred
            let d = defer
                .as_deref_mut()
                .expect("boundary pair only arises in panel mode");
            debug_assert_eq!(c + 2, cap);
            d.fixup = Some((tau1, lambda, c + 1));
            d.has_final = true;
        }
        c += 2;
    }
    if c < end {
        // odd remainder: one right-looking step
        let tau = st.x.lo(c + 1, c);
        st.t.sub[c] = tau;
        if c + 2 < m {
            if tau == 0.0 {
                return Err(Error::ZeroPivot { index: c });
            }
            for i in (c + 2)..m {
                *st.l.lo_mut(i, c + 1) = st.x.lo(i, c) / tau;
            }
            st.instr.flops += (m - c - 2) as u64;
        }
        if let Some(d) = defer {
            debug_assert_eq!(c + 1, cap);
            d.has_final = true;
        } else if c + 2 < m {
            let l: Vec<f64> = ((c + 2)..m).map(|i| st.l.lo(i, c + 1)).collect();
            let xv: Vec<f64> = ((c + 2)..m).map(|i| st.x.lo(i, c + 1)).collect();
            skr2_lower(&mut st.x, c + 2, cap, &l, &xv, 1.0, &mut st.instr)?;
        }
    }
    Ok(())
}

fn scope_params(m: usize, scope: &PanelScope) -> (usize, usize) {
    let ncols = scope
        .ncols
        .unwrap_or(m.saturating_sub(1))
        .min(m.saturating_sub(1));
    let cap = if scope.update_beyond_panel || scope.ncols.is_none() {
        m
    } else {
        ncols
    };
    (ncols, cap)
}

/// Right-looking (modified Parlett-Reid) factorization: eliminate a column,
/// then immediately apply the skew rank-2 update to the whole trailing
/// window. Costs about 2 m^3 / 3 flops.
pub fn ltlt_unb_right(x: &DenseSkewMatrix, scope: &PanelScope) -> Result<Factorization> {
    let m = x.order();
    let (ncols, cap) = scope_params(m, scope);
    let mut st = FactorState::new(x);
    let mode = match &scope.first_col {
        FirstCol::Zero => FirstColMode::CanonicalE0,
        FirstCol::Given(l21) => {
            st.set_first_col(l21)?;
            FirstColMode::Given
        }
    };
    panel_right(&mut st, 0, ncols, cap, mode == FirstColMode::Given)?;
    Ok(st.into_factorization(Variant::UnbRight, mode))
}

/// Left-looking (modified Aasen) factorization: update the current column
/// against all history through one banded column product, then divide.
/// Costs about m^3 / 3 flops and handles a given first column natively.
pub fn ltlt_unb_left(x: &DenseSkewMatrix, scope: &PanelScope) -> Result<Factorization> {
    let m = x.order();
    let (ncols, _) = scope_params(m, scope);
    let mut st = FactorState::new(x);
    let mode = match &scope.first_col {
        FirstCol::Zero => FirstColMode::CanonicalE0,
        FirstCol::Given(l21) => {
            st.set_first_col(l21)?;
            FirstColMode::Given
        }
    };
    panel_left(&mut st, 0, 0, ncols, mode == FirstColMode::Given)?;
    Ok(st.into_factorization(Variant::UnbLeft, mode))
}

/// Two-step (Wimmer) factorization: advance two columns per iteration with a
/// single trailing rank-2 update and a column fix-up, halving the cost of
/// the right-looking algorithm to about m^3 / 3 flops. Unlike the original
/// two-step scheme, every subdiagonal of T and every column of L is
/// produced.
pub fn ltlt_unb_wimmer(x: &DenseSkewMatrix) -> Result<Factorization> {
    let m = x.order();
    let mut st = FactorState::new(x);
    panel_wimmer(&mut st, 0, m.saturating_sub(1), m, None)?;
    Ok(st.into_factorization(Variant::UnbWimmer, FirstColMode::CanonicalE0))
}
