//! The result bundle every driver returns, plus blocked-driver configuration
//! and the packed single-buffer layout.

use crate::error::{Error, Result};
use crate::matrix::{SkewTridiagonal, UnitLowerTriangular};
use crate::perm::PermutationVector;

/// Which algorithm produced a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    UnbRight,
    UnbLeft,
    UnbWimmer,
    BlkRight,
    BlkLeft,
    Blk2b,
    BlkWimmer,
    PivUnbRight,
    PivUnbLeft,
    PivBlkRight,
}

impl Variant {
    /// CLI spelling of the variant.
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::UnbRight => "unb-right",
            Variant::UnbLeft => "unb-left",
            Variant::UnbWimmer => "unb-wimmer",
            Variant::BlkRight => "blk-right",
            Variant::BlkLeft => "blk-left",
            Variant::Blk2b => "blk-2b",
            Variant::BlkWimmer => "blk-wimmer",
            Variant::PivUnbRight => "piv-unb-right",
            Variant::PivUnbLeft => "piv-unb-left",
            Variant::PivBlkRight => "piv-blk-right",
        }
    }

    pub fn is_pivoted(self) -> bool {
        matches!(
            self,
            Variant::PivUnbRight | Variant::PivUnbLeft | Variant::PivBlkRight
        )
    }
}

impl std::str::FromStr for Variant {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Variant> {
        Ok(match s {
            "unb-right" => Variant::UnbRight,
            "unb-left" => Variant::UnbLeft,
            "unb-wimmer" => Variant::UnbWimmer,
            "blk-right" => Variant::BlkRight,
            "blk-left" => Variant::BlkLeft,
            "blk-2b" => Variant::Blk2b,
            "blk-wimmer" => Variant::BlkWimmer,
            "piv-unb-right" => Variant::PivUnbRight,
            "piv-unb-left" => Variant::PivUnbLeft,
            "piv-blk-right" => Variant::PivBlkRight,
            other => return Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        })
    }
}

/// Whether column 0 of L is the canonical e_0 or was supplied by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstColMode {
    CanonicalE0,
    Given,
}

/// Panel algorithm used inside the blocked right-looking driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelAlgo {
    /// Right-looking within the panel, first column implicitly zero.
    Right0,
    /// Left-looking within the panel (the cheaper panel; default).
    Left,
}

/// When the Wimmer-blocked driver accumulates W.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WMode {
    /// Stash columns while the two-step panel runs.
    DuringPanel,
    /// Derive W = L S from the finished panel (default).
    AfterPanel,
}

/// Trailing-update mode of the pivoted blocked driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// Sandwiched rank-k update plus the separate rank-2 fix-up.
    Sandwiched,
    /// Fused W-form rank-2k update.
    WimmerW,
}

/// Blocked-driver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockConfig {
    pub b: usize,
    pub panel_algo: PanelAlgo,
    pub w_mode: WMode,
}

impl BlockConfig {
    /// Block size `b` with the default panel (left-looking) and W mode.
    pub fn new(b: usize) -> Self {
        assert!(b >= 1, "block size must be at least 1");
        BlockConfig {
            b,
            panel_algo: PanelAlgo::Left,
            w_mode: WMode::AfterPanel,
        }
    }

    pub fn with_panel(mut self, p: PanelAlgo) -> Self {
        self.panel_algo = p;
        self
    }

    pub fn with_w_mode(mut self, w: WMode) -> Self {
        self.w_mode = w;
        self
    }
}

/// Bundle (L, T, optional pivots, instrumentation) returned by every driver.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub l: UnitLowerTriangular,
    pub t: SkewTridiagonal,
    pub p: Option<PermutationVector>,
    pub flops: u64,
    pub variant: Variant,
    pub first_col_mode: FirstColMode,
    /// Bulk write passes over the trailing principal window (blocked drivers).
    pub trailing_write_passes: u64,
}

impl Factorization {
    pub fn order(&self) -> usize {
        self.l.order()
    }
}

/// The classic overwrite layout: T's subdiagonal on the first subdiagonal,
/// L's strictly-lower entries below it.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedFactors {
    m: usize,
    buf: Vec<f64>, // column-major m x m
}

impl PackedFactors {
    pub fn order(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.m && j < self.m);
        self.buf[i + j * self.m]
    }

    /// Invert the packing exactly.
    pub fn unpack(&self) -> (UnitLowerTriangular, SkewTridiagonal) {
        let m = self.m;
        let mut l = UnitLowerTriangular::identity(m);
        let mut t = SkewTridiagonal::zero(m);
        for j in 0..m {
            for i in (j + 1)..m {
                if i == j + 1 {
                    t.sub[j] = self.buf[i + j * m];
                } else {
                    *l.lo_mut(i, j + 1) = self.buf[i + j * m];
                }
            }
        }
        (l, t)
    }
}

/// Pack (L, T) into the overwrite layout. Only defined for the canonical
/// first column: column 0 of L is dropped, which would lose a given column.
pub fn pack_overwrite(fact: &Factorization) -> Result<PackedFactors> {
    if fact.first_col_mode != FirstColMode::CanonicalE0 {
        return Err(Error::PackGivenFirstColumn);
    }
    let m = fact.order();
    let mut buf = vec![0.0; m * m];
    for j in 0..m.saturating_sub(1) {
        buf[(j + 1) + j * m] = fact.t.sub[j];
        for i in (j + 2)..m {
            buf[i + j * m] = fact.l.lo(i, j + 1);
        }
    }
    Ok(PackedFactors { m, buf })
}
