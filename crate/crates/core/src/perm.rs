//! Windowed symmetric-pivot permutations.
//!
//! A pivot sequence stores one window-relative index per step: entry `i`
//! swaps row `i` with row `i + pivots[i]`. Dense permutation matrices are
//! never materialized outside of test oracles.

use crate::error::{Error, Result};

/// A pivot sequence p = (pi_0, ..., pi_{n-1}) acting on `window` rows.
///
/// Entry `i` must lie in `0..window - i`. Factorizations of order m carry a
/// sequence of length m - 1 over a window of m - 1 rows: the leading zero
/// pivot of the full permutation is implicit, and the recorded pivots act
/// from row 1 of the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationVector {
    pivots: Vec<usize>,
    window: usize,
}

impl PermutationVector {
    /// Build a pivot sequence, validating every window-relative index.
    pub fn new(pivots: Vec<usize>, window: usize) -> Result<Self> {
        if pivots.len() > window {
            return Err(Error::DimensionMismatch("more pivots than window rows"));
        }
        for (i, &pi) in pivots.iter().enumerate() {
            if pi >= window - i {
                return Err(Error::PivotOutOfWindow {
                    pivot: pi,
                    window: window - i,
                });
            }
        }
        Ok(PermutationVector { pivots, window })
    }

    /// All-zero (identity) sequence of length `n` over a window of `n` rows.
    pub fn identity(n: usize) -> Self {
        PermutationVector {
            pivots: vec![0; n],
            window: n,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    #[inline]
    pub fn window(&self) -> usize {
        self.window
    }

    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub(crate) fn set(&mut self, i: usize, pi: usize) {
        self.pivots[i] = pi;
    }

    /// True when every pivot is inside its shrinking window.
    pub fn is_valid(&self) -> bool {
        self.pivots.len() <= self.window
            && self
                .pivots
                .iter()
                .enumerate()
                .all(|(i, &pi)| pi < self.window - i)
    }
}

/// Swap rows `i` and `i + pi` of a column-major `rows x cols` buffer.
pub fn apply_pivot_rows(
    buf: &mut [f64],
    rows: usize,
    cols: usize,
    i: usize,
    pi: usize,
) -> Result<()> {
    assert_eq!(buf.len(), rows * cols, "buffer shape mismatch");
    if i >= rows || pi >= rows - i {
        return Err(Error::PivotOutOfWindow {
            pivot: pi,
            window: rows.saturating_sub(i),
        });
    }
    if pi != 0 {
        let j = i + pi;
        for c in 0..cols {
            buf.swap(i + c * rows, j + c * rows);
        }
    }
    Ok(())
}

/// Apply P(p) to the rows `offset..` of a column-major buffer: pivots in
/// order, each acting on the trailing window.
pub fn apply_perm_forward(
    buf: &mut [f64],
    rows: usize,
    cols: usize,
    p: &PermutationVector,
    offset: usize,
) -> Result<()> {
    for (i, &pi) in p.pivots.iter().enumerate() {
        apply_pivot_rows(buf, rows, cols, offset + i, pi)?;
    }
    Ok(())
}

/// Apply P(p)^-1: the same row swaps in reverse order.
pub fn apply_perm_inverse(
    buf: &mut [f64],
    rows: usize,
    cols: usize,
    p: &PermutationVector,
    offset: usize,
) -> Result<()> {
    for (i, &pi) in p.pivots.iter().enumerate().rev() {
        apply_pivot_rows(buf, rows, cols, offset + i, pi)?;
    }
    Ok(())
}

/// Sign of the permutation matrix P(p): each nonzero pivot is one
/// transposition.
pub fn perm_sign(p: &PermutationVector) -> i32 {
    let swaps = p.pivots.iter().filter(|&&pi| pi != 0).count();
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_xoshiro::rand_core::{RngCore, SeedableRng};
    use rand_xoshiro::Xoshiro256StarStar;

    fn rand_buf(rng: &mut Xoshiro256StarStar, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.next_u64() as f64 / 1e18).collect()
    }

    fn rand_perm(rng: &mut Xoshiro256StarStar, n: usize) -> PermutationVector {
        let pivots = (0..n)
            .map(|i| (rng.next_u64() as usize) % (n - i))
            .collect();
        PermutationVector::new(pivots, n).unwrap()
    }

    /// Dense n x n matrix of P(p) built straight from the definition.
    fn dense_perm(p: &PermutationVector) -> Vec<f64> {
        let n = p.window();
        let mut id = vec![0.0; n * n];
        for k in 0..n {
            id[k + k * n] = 1.0;
        }
        apply_perm_forward(&mut id, n, n, p, 0).unwrap();
        id
    }

    #[test]
    fn single_pivot_cases() {
        let mut b = vec![1.0, 2.0, 3.0];
        apply_pivot_rows(&mut b, 3, 1, 0, 0).unwrap();
        assert_eq!(b, vec![1.0, 2.0, 3.0]);
        apply_pivot_rows(&mut b, 3, 1, 0, 2).unwrap();
        assert_eq!(b, vec![3.0, 2.0, 1.0]);
        apply_pivot_rows(&mut b, 3, 1, 0, 2).unwrap();
        assert_eq!(b, vec![1.0, 2.0, 3.0]);
        assert!(apply_pivot_rows(&mut b, 3, 1, 1, 2).is_err());
    }

    #[test]
    fn empty_perm_is_identity() {
        let p = PermutationVector::identity(0);
        let mut b = vec![4.0, 5.0];
        apply_perm_forward(&mut b, 2, 1, &p, 0).unwrap();
        assert_eq!(b, vec![4.0, 5.0]);
    }

    #[test]
    fn forward_then_inverse_roundtrip() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(11);
        for m in 1..=8usize {
            for _ in 0..100 {
                let p = rand_perm(&mut rng, m);
                let orig = rand_buf(&mut rng, m * 3);
                let mut b = orig.clone();
                apply_perm_forward(&mut b, m, 3, &p, 0).unwrap();
                apply_perm_inverse(&mut b, m, 3, &p, 0).unwrap();
                assert_eq!(b, orig);
            }
        }
    }

    /// Partitioned application: P(p) = blkdiag(I, P(p_B)) * P(p_T) for every
    /// split, exhaustive over small windows.
    #[test]
    fn partitioned_application_law() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(12);
        for m in 1..=6usize {
            for _ in 0..40 {
                let p = rand_perm(&mut rng, m);
                for split in 0..=p.len() {
                    let pt = PermutationVector::new(p.pivots()[..split].to_vec(), m).unwrap();
                    let pb =
                        PermutationVector::new(p.pivots()[split..].to_vec(), m - split).unwrap();
                    let orig = rand_buf(&mut rng, m * 2);
                    let mut full = orig.clone();
                    apply_perm_forward(&mut full, m, 2, &p, 0).unwrap();
                    let mut batched = orig.clone();
                    apply_perm_forward(&mut batched, m, 2, &pt, 0).unwrap();
                    apply_perm_forward(&mut batched, m, 2, &pb, split).unwrap();
                    assert_eq!(full, batched);
                }
            }
        }
    }

    /// P(p_1) * P(p)^-1 = blkdiag(I, P(p_2))^-1 as an action on buffers.
    #[test]
    fn head_cancellation_identity() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(13);
        for m in 1..=8usize {
            for _ in 0..50 {
                let p = rand_perm(&mut rng, m);
                for split in 0..=p.len() {
                    let p1 = PermutationVector::new(p.pivots()[..split].to_vec(), m).unwrap();
                    let p2 =
                        PermutationVector::new(p.pivots()[split..].to_vec(), m - split).unwrap();
                    let orig = rand_buf(&mut rng, m);
                    // left side: P(p1) P(p)^-1 x
                    let mut lhs = orig.clone();
                    apply_perm_inverse(&mut lhs, m, 1, &p, 0).unwrap();
                    apply_perm_forward(&mut lhs, m, 1, &p1, 0).unwrap();
                    // right side: blkdiag(I, P(p2))^-1 x
                    let mut rhs = orig.clone();
                    apply_perm_inverse(&mut rhs, m, 1, &p2, split).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn sign_matches_dense_determinant() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(14);
        for m in 1..=6usize {
            for _ in 0..30 {
                let p = rand_perm(&mut rng, m);
                let d = dense_perm(&p);
                // determinant of a permutation matrix by brute-force expansion
                let det = perm_det(&d, m);
                assert_eq!(perm_sign(&p) as f64, det);
            }
        }
        assert_eq!(perm_sign(&PermutationVector::identity(4)), 1);
        let one = PermutationVector::new(vec![1, 0, 0], 4).unwrap();
        assert_eq!(perm_sign(&one), -1);
    }

    #[test]
    fn sign_multiplies_over_concatenation() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(15);
        for m in 2..=6usize {
            for _ in 0..30 {
                let p = rand_perm(&mut rng, m);
                let s = perm_sign(&p);
                assert_eq!(s * s, 1);
                for split in 0..=p.len() {
                    let p1 = PermutationVector::new(p.pivots()[..split].to_vec(), m).unwrap();
                    let p2 =
                        PermutationVector::new(p.pivots()[split..].to_vec(), m - split).unwrap();
                    assert_eq!(s, perm_sign(&p1) * perm_sign(&p2));
                }
            }
        }
    }

    fn perm_det(a: &[f64], n: usize) -> f64 {
        // cofactor expansion; fine for n <= 6
        if n == 0 {
            return 1.0;
        }
        let mut det = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for c in 1..n {
                for r in 0..n {
                    if r != i {
                        minor.push(a[r + c * n]);
                    }
                }
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * a[i] * perm_det(&minor, n - 1);
        }
        det
    }

    #[test]
    fn validation() {
        assert!(PermutationVector::new(vec![0, 0], 2).is_ok());
        assert!(PermutationVector::new(vec![2, 0], 2).is_err());
        assert!(PermutationVector::new(vec![0, 1], 2).is_err());
        assert!(PermutationVector::new(vec![0, 0, 0], 2).is_err());
    }
}
