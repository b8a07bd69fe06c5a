//! Storage types for the skew-symmetric operand and the two factors.
//!
//! All matrices use a full square column-major buffer. For the skew operand
//! only the strictly-lower triangle is authoritative; the accessor reflects
//! with a sign flip and the diagonal is exactly zero. The factor `L` keeps an
//! implicit unit diagonal, the factor `T` keeps only its subdiagonal.

use crate::error::{Error, Result};
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Dense m-by-m skew-symmetric matrix, strictly-lower triangle authoritative.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSkewMatrix {
    m: usize,
    elems: Vec<f64>, // column-major, m * m
}

impl DenseSkewMatrix {
    /// Zero matrix of order `m`.
    pub fn zero(m: usize) -> Self {
        DenseSkewMatrix {
            m,
            elems: vec![0.0; m * m],
        }
    }

    /// Order of the matrix.
    #[inline]
    pub fn order(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i + j * self.m
    }

    /// Logical value at (i, j): stored below the diagonal, zero on it,
    /// negated reflection above it.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.m && j < self.m, "index out of range");
        if i > j {
            self.elems[self.idx(i, j)]
        } else if i == j {
            0.0
        } else {
            -self.elems[self.idx(j, i)]
        }
    }

    /// Set a strictly-lower entry. Writing at or above the diagonal is rejected.
    pub fn set_strict(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i >= self.m || j >= self.m {
            return Err(Error::IndexOutOfRange { i, j, m: self.m });
        }
        if i <= j {
            return Err(Error::NotStrictLower { i, j });
        }
        let k = self.idx(i, j);
        self.elems[k] = v;
        Ok(())
    }

    /// Unchecked strictly-lower read used by the kernels.
    #[inline]
    pub(crate) fn lo(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i > j && i < self.m);
        self.elems[i + j * self.m]
    }

    /// Unchecked strictly-lower write used by the kernels.
    #[inline]
    pub(crate) fn lo_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        debug_assert!(i > j && i < self.m);
        let k = i + j * self.m;
        &mut self.elems[k]
    }

    /// Swap rows and columns `a` and `b`, keeping the lower triangle
    /// authoritative. The skew structure is preserved exactly: the entry
    /// coupling the two indices only flips sign.
    pub(crate) fn swap_symmetric(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let m = self.m;
        // entries left of column a: plain row swap
        for j in 0..a {
            let (x, y) = (self.idx(a, j), self.idx(b, j));
            self.elems.swap(x, y);
        }
        // entries below row b: plain column swap
        for i in (b + 1)..m {
            let (x, y) = (self.idx(i, a), self.idx(i, b));
            self.elems.swap(x, y);
        }
        // entries strictly between a and b reflect across the diagonal
        for k in (a + 1)..b {
            let x = self.idx(k, a); // becomes logical (k, b) = -(b, k) reflected
            let y = self.idx(b, k);
            let (va, vb) = (self.elems[x], self.elems[y]);
            self.elems[x] = -vb;
            self.elems[y] = -va;
        }
        // the coupling entry (b, a) maps to logical (a, b) = -(b, a)
        let c = self.idx(b, a);
        self.elems[c] = -self.elems[c];
    }

    /// Frobenius norm of the full logical matrix (lower entries doubled for
    /// the implicit mirror, zero diagonal).
    pub fn frob_norm(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.m {
            for i in (j + 1)..self.m {
                let v = self.elems[self.idx(i, j)];
                s += 2.0 * v * v;
            }
        }
        s.sqrt()
    }

    /// Number of nonzero strictly-lower entries.
    pub fn nnz_strict_lower(&self) -> usize {
        let mut n = 0;
        for j in 0..self.m {
            for i in (j + 1)..self.m {
                if self.elems[self.idx(i, j)] != 0.0 {
                    n += 1;
                }
            }
        }
        n
    }
}

/// Build a skew matrix from strictly-lower (i, j, value) triples.
pub fn skew_from_strict_lower(
    m: usize,
    entries: &[(usize, usize, f64)],
) -> Result<DenseSkewMatrix> {
    let mut x = DenseSkewMatrix::zero(m);
    let mut seen = std::collections::HashSet::new();
    for &(i, j, v) in entries {
        if i >= m || j >= m {
            return Err(Error::IndexOutOfRange { i, j, m });
        }
        if i <= j {
            return Err(Error::NotStrictLower { i, j });
        }
        if !seen.insert((i, j)) {
            return Err(Error::DuplicateEntry { i, j });
        }
        x.set_strict(i, j, v)?;
    }
    Ok(x)
}

/// Seeded random skew matrix with strictly-lower entries i.i.d. uniform on
/// [-1, 1].
///
/// The stream is pinned for cross-language reproducibility: a xoshiro256**
/// generator whose 256-bit state is expanded from the 64-bit seed by
/// SplitMix64 (the generator author's reference seeding, what
/// `Xoshiro256StarStar::seed_from_u64` does). Each strictly-lower entry, in
/// column-major order (column 0 top to bottom, then column 1, ...), consumes
/// one `u64`; the high 53 bits map to [0, 1) as `(w >> 11) * 2^-53` and then
/// affinely to [-1, 1) as `2u - 1`.
pub fn random_skew(m: usize, seed: u64) -> DenseSkewMatrix {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut x = DenseSkewMatrix::zero(m);
    for j in 0..m {
        for i in (j + 1)..m {
            let w = rng.next_u64();
            let u = (w >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            *x.lo_mut(i, j) = 2.0 * u - 1.0;
        }
    }
    x
}

/// The tridiagonal skew factor T, stored as its subdiagonal.
///
/// `sub[i]` holds T[i+1, i]; the superdiagonal is the negated mirror and
/// everything else is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewTridiagonal {
    m: usize,
    pub sub: Vec<f64>,
}

impl SkewTridiagonal {
    /// Zero tridiagonal factor of order `m`.
    pub fn zero(m: usize) -> Self {
        SkewTridiagonal {
            m,
            sub: vec![0.0; m.saturating_sub(1)],
        }
    }

    /// Build from an explicit subdiagonal of length `m - 1` (empty for m <= 1).
    pub fn from_sub(m: usize, sub: Vec<f64>) -> Result<Self> {
        if sub.len() != m.saturating_sub(1) {
            return Err(Error::DimensionMismatch("subdiagonal length must be m - 1"));
        }
        Ok(SkewTridiagonal { m, sub })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.m
    }

    /// Logical value at (i, j).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.m && j < self.m);
        if i == j + 1 {
            self.sub[j]
        } else if j == i + 1 {
            -self.sub[i]
        } else {
            0.0
        }
    }
}

/// The unit lower triangular factor L; unit diagonal implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitLowerTriangular {
    m: usize,
    elems: Vec<f64>, // column-major, strictly-lower entries authoritative
}

impl UnitLowerTriangular {
    /// Identity of order `m`.
    pub fn identity(m: usize) -> Self {
        UnitLowerTriangular {
            m,
            elems: vec![0.0; m * m],
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.m
    }

    /// Logical value at (i, j): 1 on the diagonal, 0 above.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.m && j < self.m);
        if i > j {
            self.elems[i + j * self.m]
        } else if i == j {
            1.0
        } else {
            0.0
        }
    }

    /// Set a strictly-lower entry.
    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i >= self.m || j >= self.m {
            return Err(Error::IndexOutOfRange { i, j, m: self.m });
        }
        if i <= j {
            return Err(Error::NotStrictLower { i, j });
        }
        self.elems[i + j * self.m] = v;
        Ok(())
    }

    #[inline]
    pub(crate) fn lo(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i > j && i < self.m);
        self.elems[i + j * self.m]
    }

    #[inline]
    pub(crate) fn lo_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        debug_assert!(i > j && i < self.m);
        let k = i + j * self.m;
        &mut self.elems[k]
    }

    /// Swap rows `a` and `b` in columns `0..=cmax`. The pivoted drivers call
    /// this with both rows strictly below every touched column, so only
    /// strictly-lower entries move.
    pub(crate) fn swap_rows_through(&mut self, a: usize, b: usize, cmax: usize) {
        if a == b {
            return;
        }
        for c in 0..=cmax {
            debug_assert!(a > c && b > c);
            let (x, y) = (a + c * self.m, b + c * self.m);
            self.elems.swap(x, y);
        }
    }

    /// Largest strictly-lower magnitude (0 for m <= 1).
    pub fn max_strict_lower_abs(&self) -> f64 {
        let mut mx = 0.0f64;
        for j in 0..self.m {
            for i in (j + 1)..self.m {
                mx = mx.max(self.elems[i + j * self.m].abs());
            }
        }
        mx
    }
}
