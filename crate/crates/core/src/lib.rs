//! LTL^T factorization algorithms for dense skew-symmetric matrices.
//!
//! A skew-symmetric X factors as X = L T L^T with L unit lower triangular
//! and T skew tridiagonal. This crate implements the whole family of
//! factorization drivers over that decomposition:
//!
//! - unblocked: right-looking (modified Parlett-Reid, ~2m^3/3 flops),
//!   left-looking (modified Aasen, ~m^3/3), and the two-step algorithm
//!   (~m^3/3);
//! - blocked: right-looking Variant 1, left-looking, the fused Variant 2b,
//!   and the rank-2k (Wimmer-style) blocked algorithm, all ~m^3/3 with a
//!   reasonable block size;
//! - symmetric pivoting: unblocked right- and left-looking and the blocked
//!   right-looking driver, keeping every multiplier at most 1 in magnitude
//!   with P X P^T = L T L^T.
//!
//! Every driver carries an exact flop count, and [`verify`] supplies
//! driver-independent reconstruction and residual oracles plus the Pfaffian
//! application `pf(X) = sign(P) * prod T.sub[2i]`.

pub mod blocked;
pub mod error;
pub mod factorization;
pub mod kernels;
pub mod matrix;
pub mod mm;
pub mod perm;
pub mod pivoted;
pub mod unblocked;
pub mod verify;

pub use blocked::{ltlt_blk_left, ltlt_blk_right, ltlt_blk_right_2b, ltlt_blk_wimmer};
pub use error::{Error, Result};
pub use factorization::{
    pack_overwrite, BlockConfig, Factorization, FirstColMode, PackedFactors, PanelAlgo, UpdateMode,
    Variant, WMode,
};
pub use matrix::{
    random_skew, skew_from_strict_lower, DenseSkewMatrix, SkewTridiagonal, UnitLowerTriangular,
};
pub use perm::{
    apply_perm_forward, apply_perm_inverse, apply_pivot_rows, perm_sign, PermutationVector,
};
pub use pivoted::{
    apply_pivot_symmetric, iamax, ltlt_piv_blk_right, ltlt_piv_unb_left, ltlt_piv_unb_right,
};
pub use unblocked::{
    ltlt_unb_left, ltlt_unb_right, ltlt_unb_wimmer, preprocess_first_column, FirstCol, PanelScope,
};
pub use verify::{audit_structure, det_oracle, pfaffian, reconstruct, residual, AuditReport};

/// Run the driver named by a [`Variant`] with one configuration.
pub fn factor(
    x: &DenseSkewMatrix,
    variant: Variant,
    cfg: &BlockConfig,
    update_mode: UpdateMode,
) -> Result<Factorization> {
    match variant {
        Variant::UnbRight => ltlt_unb_right(x, &PanelScope::full()),
        Variant::UnbLeft => ltlt_unb_left(x, &PanelScope::full()),
        Variant::UnbWimmer => ltlt_unb_wimmer(x),
        Variant::BlkRight => ltlt_blk_right(x, cfg),
        Variant::BlkLeft => ltlt_blk_left(x, cfg),
        Variant::Blk2b => ltlt_blk_right_2b(x, cfg),
        Variant::BlkWimmer => ltlt_blk_wimmer(x, cfg),
        Variant::PivUnbRight => ltlt_piv_unb_right(x),
        Variant::PivUnbLeft => ltlt_piv_unb_left(x, None),
        Variant::PivBlkRight => ltlt_piv_blk_right(x, cfg, update_mode),
    }
}
