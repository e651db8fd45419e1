//! The rank-3 tensor pseudo-determinant
//!
//! ```text
//! T(A) = sum_mu sgn(mu) sum_alpha sgn(alpha) prod_k a[mu_k, alpha_k, k]
//!      = sum_mu sgn(mu) det A^(mu),     A^(mu)[r, j] = a[mu_r, j, r]
//! ```
//!
//! evaluated as a sum of `N!` ordinary determinants, or fewer when a
//! [`GroupedPermutationPlan`] declares blocks of identical slices.

mod det;
mod plan;

use rayon::prelude::*;

pub use det::det_signed_log;
pub use plan::GroupedPermutationPlan;

use crate::error::{Error, Result};
use crate::signed_log::{compensated_sum, SignedLog};
use det::lu_det_in_place;
use plan::{GroupedRepresentatives, Lexicographic, PermutationSource};

/// Largest tensor dimension accepted by the evaluators.
pub const MAX_DIMENSION: usize = 12;

const CHUNK: usize = 1024;
const CHUNKS_PER_BATCH: usize = 64;
const CONSTANCY_TOL: f64 = 1e-12;

/// Dense `N x N x N` tensor of signed-log elements, indexed `(i, j, k)` from 0.
///
/// `k` selects the slice (one row of every `A^(mu)`), `i` the row permuted by
/// `mu`, and `j` the column.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<SignedLog>,
}

impl Tensor3 {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> SignedLog) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { n, data }
    }

    /// Builds the tensor from per-slice matrices, `slices[k][i][j]`.
    pub fn from_slices(slices: &[Vec<Vec<SignedLog>>]) -> Result<Self> {
        let n = slices.len();
        for (k, s) in slices.iter().enumerate() {
            if s.len() != n || s.iter().any(|r| r.len() != n) {
                return Err(Error::arg(format!("slice {k} is not {n} x {n}")));
            }
        }
        Ok(Self::from_fn(n, |i, j, k| slices[k][i][j]))
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> SignedLog {
        self.data[(k * self.n + i) * self.n + j]
    }

    fn check_finite(&self) -> Result<()> {
        for (idx, v) in self.data.iter().enumerate() {
            if v.is_nan() || v.logmag() == f64::INFINITY {
                let n = self.n;
                return Err(Error::NonFiniteElement {
                    i: (idx / n) % n,
                    j: idx % n,
                    k: idx / (n * n),
                });
            }
        }
        Ok(())
    }

    fn slices_equal(&self, k0: usize, k1: usize) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let (a, b) = (self.get(i, j, k0), self.get(i, j, k1));
                a.sign() == b.sign() && a.rel_diff(b) <= CONSTANCY_TOL
            })
        })
    }
}

/// Telemetry from one pseudo-determinant evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PseudoDetStats {
    pub determinants: u64,
}

/// `T(A)` by the full `N!` enumeration.
pub fn pseudo_det(t: &Tensor3) -> Result<SignedLog> {
    pseudo_det_with_stats(t).map(|(v, _)| v)
}

pub fn pseudo_det_with_stats(t: &Tensor3) -> Result<(SignedLog, PseudoDetStats)> {
    validate_dimension(t)?;
    t.check_finite()?;
    let scaled = ScaledTensor::new(t);
    let (sum, count) = scaled.sum_over(Lexicographic::new(t.n));
    Ok((
        sum,
        PseudoDetStats {
            determinants: count,
        },
    ))
}

/// `T(A)` enumerating only the representatives of `plan`, each weighted by the
/// plan multiplicity. Every block must consist of identical slices.
pub fn pseudo_det_grouped(t: &Tensor3, plan: &GroupedPermutationPlan) -> Result<SignedLog> {
    pseudo_det_grouped_with_stats(t, plan).map(|(v, _)| v)
}

pub fn pseudo_det_grouped_with_stats(
    t: &Tensor3,
    plan: &GroupedPermutationPlan,
) -> Result<(SignedLog, PseudoDetStats)> {
    validate_dimension(t)?;
    if plan.dimension() != t.n {
        return Err(Error::InvalidPlan(format!(
            "plan covers {} positions, tensor has dimension {}",
            plan.dimension(),
            t.n
        )));
    }
    t.check_finite()?;
    for block in plan.blocks() {
        if let Some(k) = block
            .clone()
            .skip(1)
            .find(|&k| !t.slices_equal(block.start, k))
        {
            return Err(Error::InvalidPlan(format!(
                "slice {k} differs from slice {} within block {:?}",
                block.start, block
            )));
        }
    }
    let scaled = ScaledTensor::new(t);
    let (sum, count) = scaled.sum_over(GroupedRepresentatives::new(plan));
    let weight = SignedLog::from_f64(plan.multiplicity() as f64);
    Ok((
        sum * weight,
        PseudoDetStats {
            determinants: count,
        },
    ))
}

fn validate_dimension(t: &Tensor3) -> Result<()> {
    if t.n == 0 {
        return Err(Error::arg("pseudo-determinant of a 0-dimensional tensor"));
    }
    if t.n > MAX_DIMENSION {
        return Err(Error::Capability(format!(
            "tensor dimension {} exceeds the supported maximum {MAX_DIMENSION}",
            t.n
        )));
    }
    Ok(())
}

/// Tensor rewritten as f64 mantissas with one log scale per column `j` and
/// one per `(k, i)` row, so each `A^(mu)` is a row selection of mantissas.
struct ScaledTensor {
    n: usize,
    col_total: f64,
    row_scale: Vec<f64>,
    mant: Vec<f64>,
}

impl ScaledTensor {
    fn new(t: &Tensor3) -> Self {
        let n = t.n;
        let mut col = vec![f64::NEG_INFINITY; n];
        for k in 0..n {
            for i in 0..n {
                for (j, c) in col.iter_mut().enumerate() {
                    let v = t.get(i, j, k);
                    if !v.is_zero() {
                        *c = c.max(v.logmag());
                    }
                }
            }
        }
        let col_total = if col.contains(&f64::NEG_INFINITY) {
            // an all-zero column annihilates every determinant
            f64::NEG_INFINITY
        } else {
            col.iter().sum()
        };
        let mut row_scale = vec![f64::NEG_INFINITY; n * n];
        let mut mant = vec![0.0; n * n * n];
        if col_total.is_finite() {
            for k in 0..n {
                for i in 0..n {
                    let rs = (0..n)
                        .map(|j| t.get(i, j, k))
                        .zip(&col)
                        .filter(|(v, _)| !v.is_zero())
                        .map(|(v, c)| v.logmag() - c)
                        .fold(f64::NEG_INFINITY, f64::max);
                    row_scale[k * n + i] = rs;
                    if rs.is_finite() {
                        for j in 0..n {
                            mant[(k * n + i) * n + j] =
                                t.get(i, j, k).scale_exp(-col[j] - rs).to_f64();
                        }
                    }
                }
            }
        }
        Self {
            n,
            col_total,
            row_scale,
            mant,
        }
    }

    fn det(&self, mu: &[u8], buf: &mut [f64]) -> SignedLog {
        let n = self.n;
        let mut log_scale = self.col_total;
        for (r, &m) in mu.iter().enumerate() {
            let row = r * n + m as usize;
            log_scale += self.row_scale[row];
            buf[r * n..(r + 1) * n].copy_from_slice(&self.mant[row * n..(row + 1) * n]);
        }
        if log_scale == f64::NEG_INFINITY {
            return SignedLog::ZERO;
        }
        let (sign, logabs) = lu_det_in_place(buf, n);
        SignedLog::from_parts(sign, logabs + log_scale)
    }

    /// Sums `sign * det` over the source in fixed-size chunks. Chunk sums are
    /// merged in chunk order, so the result does not depend on the pool size.
    fn sum_over(&self, mut src: impl PermutationSource) -> (SignedLog, u64) {
        let n = self.n;
        let mut chunk_sums: Vec<SignedLog> = Vec::new();
        let mut count = 0u64;
        let mut perms: Vec<u8> = Vec::with_capacity(CHUNK * CHUNKS_PER_BATCH * n);
        let mut signs: Vec<i8> = Vec::with_capacity(CHUNK * CHUNKS_PER_BATCH);
        let mut buf = vec![0u8; n];
        loop {
            perms.clear();
            signs.clear();
            while signs.len() < CHUNK * CHUNKS_PER_BATCH {
                match src.next_into(&mut buf) {
                    Some(s) => {
                        perms.extend_from_slice(&buf);
                        signs.push(s);
                    }
                    None => break,
                }
            }
            if signs.is_empty() {
                break;
            }
            count += signs.len() as u64;
            let batch: Vec<SignedLog> = signs
                .par_chunks(CHUNK)
                .zip(perms.par_chunks(CHUNK * n))
                .map(|(sg, pm)| {
                    let mut work = vec![0.0; n * n];
                    let terms: Vec<SignedLog> = sg
                        .iter()
                        .zip(pm.chunks_exact(n))
                        .map(|(&s, mu)| {
                            let d = self.det(mu, &mut work);
                            if s < 0 {
                                -d
                            } else {
                                d
                            }
                        })
                        .collect();
                    compensated_sum(&terms)
                })
                .collect();
            chunk_sums.extend(batch);
        }
        (compensated_sum(&chunk_sums), count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Tensor3 {
        Tensor3::from_fn(n, |i, j, k| SignedLog::from_f64(f(i, j, k)))
    }

    #[test]
    fn single_element() {
        let t = tensor(1, |_, _, _| 5.0);
        assert!((pseudo_det(&t).unwrap().to_f64() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn k_independent_identity_gives_factorial() {
        let t = tensor(3, |i, j, _| f64::from(u8::from(i == j)));
        assert!((pseudo_det(&t).unwrap().to_f64() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn linear_two_by_two() {
        // a = i + 2j + 3k with 1-based indices; double-permutation sum gives -4
        let t = tensor(2, |i, j, k| {
            (i + 1) as f64 + 2.0 * (j + 1) as f64 + 3.0 * (k + 1) as f64
        });
        assert!((pseudo_det(&t).unwrap().to_f64() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            pseudo_det(&tensor(0, |_, _, _| 1.0)),
            Err(Error::InvalidArgument(_))
        ));
        let t = tensor(3, |i, j, k| {
            if (i, j, k) == (1, 2, 0) {
                f64::NAN
            } else {
                1.0
            }
        });
        assert_eq!(
            pseudo_det(&t),
            Err(Error::NonFiniteElement { i: 1, j: 2, k: 0 })
        );
    }

    #[test]
    fn grouped_rejects_varying_block() {
        let t = tensor(3, |i, j, k| (i * 3 + j + k * 7) as f64);
        let plan = GroupedPermutationPlan::new([2], 3).unwrap();
        assert!(matches!(
            pseudo_det_grouped(&t, &plan),
            Err(Error::InvalidPlan(_))
        ));
        let wrong = GroupedPermutationPlan::naive(4);
        assert!(matches!(
            pseudo_det_grouped(&t, &wrong),
            Err(Error::InvalidPlan(_))
        ));
    }

    #[test]
    fn one_block_is_factorial_times_det() {
        let t = tensor(4, |i, j, _| {
            ((i * 4 + j) as f64).sin() + if i == j { 2.0 } else { 0.0 }
        });
        let plan = GroupedPermutationPlan::new([4], 4).unwrap();
        let (v, stats) = pseudo_det_grouped_with_stats(&t, &plan).unwrap();
        assert_eq!(stats.determinants, 1);
        let naive = pseudo_det(&t).unwrap();
        assert!(v.rel_diff(naive) < 1e-12);
    }

    #[test]
    fn zero_column_annihilates() {
        let t = tensor(3, |i, j, k| if j == 1 { 0.0 } else { (i + k + 1) as f64 });
        assert!(pseudo_det(&t).unwrap().is_zero());
    }
}
