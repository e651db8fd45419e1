use crate::error::{Error, Result};
use crate::pseudodet::{det_signed_log, pseudo_det_grouped, GroupedPermutationPlan, Tensor3};
use crate::signed_log::SignedLog;
use crate::specfun::{falling_factorial, hyp0f1, ln_factorial, ln_gamma, ln_pow};

use super::table::{SegmentIntegralTable, Term};
use super::{EnsembleModel, SPIKE_GAP_WARNING};

/// Largest kernel dimension handled by the exact paths.
pub const MAX_SQUARE_DIMENSION: usize = 8;
/// Largest `M` handled when the kernel carries a constant block (`N > M`).
pub const MAX_RECTANGULAR_DIMENSION: usize = 6;

/// The decomposition `K |Phi(x)| |Psi(x)| prod xi(x_i)` of an ordered
/// eigenvalue density, with `Psi` an `N x N` matrix whose columns beyond `M`
/// are the constants `Psi_bar`.
#[derive(Debug, Clone)]
pub struct KernelForm {
    model: EnsembleModel,
    m: usize,
    n: usize,
    support: (f64, f64),
    norm: SignedLog,
    table: SegmentIntegralTable,
    psi_bar: Vec<SignedLog>,
    groups: Vec<(usize, usize)>,
    warnings: Vec<String>,
}

pub fn kernel_form(model: &EnsembleModel) -> Result<KernelForm> {
    KernelForm::new(model)
}

/// `(e(j), d(j))` for every 0-based `psi` row of the correlated kernel.
fn multiplicity_groups(mult: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (g, &m) in mult.iter().enumerate() {
        for r in 0..m {
            out.push((g, m - 1 - r));
        }
    }
    out
}

fn pow_sl(x: f64, p: usize) -> SignedLog {
    let v = SignedLog::exp(ln_pow(x.abs(), p as f64));
    if x < 0.0 && p % 2 == 1 {
        -v
    } else {
        v
    }
}

fn sign_of_parity(k: usize) -> SignedLog {
    if k.is_multiple_of(2) {
        SignedLog::ONE
    } else {
        -SignedLog::ONE
    }
}

fn lf(n: usize) -> f64 {
    ln_factorial(n)
}

impl KernelForm {
    pub fn new(model: &EnsembleModel) -> Result<Self> {
        model.validate()?;
        let m = model.dimension();
        let n = model.kernel_dimension();
        let support = model.support();
        let mut warnings = Vec::new();
        let mut psi_bar = Vec::new();
        let mut groups = Vec::new();
        let one = SignedLog::ONE;
        let lag = |coef: SignedLog, power: usize, rate: f64| Term::Laguerre {
            coef,
            power: power as f64,
            rate,
        };

        let mut terms = Vec::with_capacity(n * n);
        let norm = match model {
            &EnsembleModel::UncorrelatedWishart { dim, n: dof } => {
                for i in 0..n {
                    for j in 0..n {
                        terms.push(lag(one, i + j + dof - dim, 1.0));
                    }
                }
                let ln: f64 = (1..=dim).map(|i| lf(dof - i) + lf(dim - i)).sum();
                SignedLog::exp(-ln)
            }
            &EnsembleModel::Gue { dim } => {
                for i in 0..n {
                    for j in 0..n {
                        terms.push(Term::Hermite {
                            power: (i + j) as u32,
                        });
                    }
                }
                let ln = (dim * (dim - 1)) as f64 / 2.0 * std::f64::consts::LN_2
                    - dim as f64 / 2.0 * std::f64::consts::PI.ln()
                    - (1..=dim).map(|i| ln_gamma(i as f64)).sum::<f64>();
                SignedLog::exp(ln)
            }
            &EnsembleModel::Beta { dim, m: a, n: b } => {
                for i in 0..n {
                    for j in 0..n {
                        terms.push(Term::Jacobi {
                            power: (i + j + a) as u32,
                            tail: b as u32,
                        });
                    }
                }
                // ordered density: M! over the Selberg integral
                let ln_selberg: f64 = (0..dim)
                    .map(|j| lf(a + j) + lf(b + j) + lf(j + 1) - lf(a + b + dim + j))
                    .sum();
                SignedLog::exp(lf(dim) - ln_selberg)
            }
            EnsembleModel::CorrelatedWishart {
                p,
                n: dof,
                phi,
                mult,
            } => {
                let (p, dof) = (*p, *dof);
                groups = multiplicity_groups(mult);
                for i in 0..n {
                    let zeta = if i < m { i } else { 0 };
                    for &(e, d) in &groups {
                        terms.push(lag(sign_of_parity(d), p - m + zeta + d, phi[e]));
                    }
                }
                psi_bar = Vec::with_capacity(n * (n - m));
                for &(e, d) in &groups {
                    for k in m..n {
                        // 1-based column k+1
                        let top = dof - (k + 1);
                        let ff = falling_factorial(top as f64, d);
                        psi_bar.push(if ff.is_zero() {
                            SignedLog::ZERO
                        } else {
                            ff * SignedLog::exp((top - d) as f64 * phi[e].ln())
                        });
                    }
                }
                let gamma_m = |mm: usize, a: usize| -> f64 { (1..=mm).map(|i| lf(a - i)).sum() };
                let mut ln = -gamma_m(m, p);
                for (g, (&f, &mg)) in phi.iter().zip(mult).enumerate() {
                    ln += (mg * p) as f64 * f.ln() - gamma_m(mg, mg);
                    for (&f2, &mh) in phi.iter().zip(mult).skip(g + 1) {
                        ln -= (mg * mh) as f64 * (f - f2).ln();
                    }
                }
                sign_of_parity(p * (dof - m)) * SignedLog::exp(ln)
            }
            &EnsembleModel::SpikedWishart {
                dim,
                n: dof,
                sigma1,
                sigma2,
            } => {
                let gap = (sigma1 - sigma2) / sigma2;
                if gap < SPIKE_GAP_WARNING {
                    let msg = format!(
                        "spiked kernel ill-conditioned: (σ1-σ2)/σ2 = {gap:e} < {SPIKE_GAP_WARNING:e}"
                    );
                    log::warn!("{msg}");
                    warnings.push(msg);
                }
                for i in 0..n {
                    terms.push(lag(one, i + dof - dim, 1.0 / sigma1));
                    for j in 1..n {
                        terms.push(lag(one, dof - 1 + i - j, 1.0 / sigma2));
                    }
                }
                let ln = (dof - dim + 1) as f64 * sigma1.ln()
                    + ((dof - 1) * (dim - 1)) as f64 * sigma2.ln()
                    + (dim - 1) as f64 * (sigma1 - sigma2).ln()
                    + (1..=dim).map(|i| lf(dof - i)).sum::<f64>()
                    + (2..dim.saturating_sub(1)).map(lf).sum::<f64>();
                // |V| with rows x^(i-1) is prod_{i<j}(x_j - x_i); the kernel is
                // written with prod_{i<j}(x_i - x_j)
                sign_of_parity(dim * (dim - 1) / 2) * SignedLog::exp(-ln)
            }
            EnsembleModel::NoncentralWishart { dim, n: dof, mu } => {
                let (dim, dof) = (*dim, *dof);
                let coef = SignedLog::exp(-lf(dof - dim));
                for i in 0..n {
                    for j in 0..n {
                        terms.push(if j < mu.len() {
                            Term::Bessel {
                                coef,
                                power: (dof - 1 - i) as f64,
                                b: (dof - dim + 1) as f64,
                                mu: mu[j],
                            }
                        } else {
                            lag(one, dof + dim - 2 - i - j, 1.0)
                        });
                    }
                }
                // no closed form at hand: K = 1 / det B over the full support
                SignedLog::ONE
            }
        };

        let table = SegmentIntegralTable::new(n, support, terms);
        let mut kf = KernelForm {
            model: model.clone(),
            m,
            n,
            support,
            norm,
            table,
            psi_bar,
            groups,
            warnings,
        };
        if let EnsembleModel::NoncentralWishart { .. } = model {
            let (lo, hi) = support;
            let rows = (0..n)
                .map(|i| (0..n).map(|j| kf.table.segment(i, j, lo, hi)).collect())
                .collect::<Result<Vec<Vec<_>>>>()?;
            let det = det_signed_log(&rows)?;
            if det.is_zero() {
                return Err(Error::numeric(
                    "noncentral normalization matrix is singular",
                ));
            }
            kf.norm = det.recip();
        }
        Ok(kf)
    }

    pub fn model(&self) -> &EnsembleModel {
        &self.model
    }

    /// Number of random eigenvalues `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Kernel dimension `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Normalizing constant `K`, sign included.
    pub fn norm(&self) -> SignedLog {
        self.norm
    }

    pub fn table(&self) -> &SegmentIntegralTable {
        &self.table
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Constant block `Psi_bar[j][k]` for `k` in `M..N` (0-based).
    pub fn psi_bar(&self, j: usize, k: usize) -> SignedLog {
        assert!(k >= self.m && k < self.n, "psi_bar column {k} outside M..N");
        self.psi_bar[j * (self.n - self.m) + (k - self.m)]
    }

    /// Tensor element for a slice `k >= M`: `Psi_bar[j][k]` when `i >= k`, zero
    /// above.
    pub fn constant_entry(&self, i: usize, j: usize, k: usize) -> SignedLog {
        if i >= k {
            self.psi_bar(j, k)
        } else {
            SignedLog::ZERO
        }
    }

    /// Refuses kernels beyond the exact-evaluation limits.
    pub fn check_capability(&self) -> Result<()> {
        if self.n > MAX_SQUARE_DIMENSION {
            return Err(Error::Capability(format!(
                "kernel dimension N={} exceeds {MAX_SQUARE_DIMENSION}",
                self.n
            )));
        }
        if self.n > self.m && self.m > MAX_RECTANGULAR_DIMENSION {
            return Err(Error::Capability(format!(
                "M={} exceeds {MAX_RECTANGULAR_DIMENSION} for kernels with a constant block",
                self.m
            )));
        }
        Ok(())
    }

    /// `Phi_i(x)`, 0-based row.
    pub fn phi_row(&self, i: usize, x: f64) -> SignedLog {
        match self.model {
            EnsembleModel::NoncentralWishart { dim, .. } => pow_sl(x, dim - 1 - i),
            _ => pow_sl(x, i),
        }
    }

    /// `psi_j(x)`, 0-based row.
    pub fn psi_row(&self, j: usize, x: f64) -> Result<SignedLog> {
        Ok(match self.model {
            EnsembleModel::CorrelatedWishart { ref phi, .. } => {
                let (e, d) = self.groups[j];
                pow_sl(-x, d) * SignedLog::exp(-phi[e] * x)
            }
            EnsembleModel::SpikedWishart {
                dim,
                sigma1,
                sigma2,
                ..
            } => {
                if j == 0 {
                    SignedLog::exp(-x / sigma1)
                } else {
                    pow_sl(x, dim - 1 - j) * SignedLog::exp(-x / sigma2)
                }
            }
            EnsembleModel::NoncentralWishart { dim, n, ref mu } => {
                if j < mu.len() {
                    hyp0f1((n - dim + 1) as f64, mu[j] * x)? * SignedLog::exp(-lf(n - dim))
                } else {
                    pow_sl(x, dim - 1 - j)
                }
            }
            _ => pow_sl(x, j),
        })
    }

    /// Weight `xi(x)`.
    pub fn xi(&self, x: f64) -> SignedLog {
        match self.model {
            EnsembleModel::UncorrelatedWishart { dim, n }
            | EnsembleModel::NoncentralWishart { dim, n, .. } => {
                pow_sl(x, n - dim) * SignedLog::exp(-x)
            }
            EnsembleModel::CorrelatedWishart { p, .. } => pow_sl(x, p - self.m),
            EnsembleModel::SpikedWishart { dim, n, .. } => pow_sl(x, n - dim),
            EnsembleModel::Gue { .. } => SignedLog::exp(-x * x),
            EnsembleModel::Beta { m, n, .. } => pow_sl(x, m) * pow_sl(1.0 - x, n),
        }
    }

    /// Direct evaluation of `K |Phi(x)| |Psi(x)| prod xi(x_i)` at `M` points.
    /// Ordering is not checked; points outside the support give zero.
    pub fn joint_density(&self, xs: &[f64]) -> Result<SignedLog> {
        if xs.len() != self.m {
            return Err(Error::arg(format!(
                "expected {} abscissae, got {}",
                self.m,
                xs.len()
            )));
        }
        let (lo, hi) = self.support;
        if xs.iter().any(|&x| x.is_nan() || x < lo || x > hi) {
            return Ok(SignedLog::ZERO);
        }
        let phi: Vec<Vec<SignedLog>> = (0..self.m)
            .map(|i| xs.iter().map(|&x| self.phi_row(i, x)).collect())
            .collect();
        let psi = (0..self.n)
            .map(|j| {
                (0..self.n)
                    .map(|k| {
                        if k < self.m {
                            self.psi_row(j, xs[k])
                        } else {
                            Ok(self.psi_bar(j, k))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let weight = xs.iter().fold(SignedLog::ONE, |acc, &x| acc * self.xi(x));
        Ok(self.norm * det_signed_log(&phi)? * det_signed_log(&psi)? * weight)
    }

    /// Tensor of Theorem-2.1 type with every random slice integrated over
    /// `(a, b)`.
    pub(crate) fn box_tensor(&self, a: f64, b: f64) -> Result<Tensor3> {
        let block = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.table.segment(i, j, a, b))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(Tensor3::from_fn(self.n, |i, j, k| {
            if k < self.m {
                block[i][j]
            } else {
                self.constant_entry(i, j, k)
            }
        }))
    }
}

/// `K T(C) / M!` over the full support; equals 1 for a correctly normalized
/// kernel.
pub fn normalization_check(model: &EnsembleModel) -> Result<f64> {
    let kf = KernelForm::new(model)?;
    if kf.m > 7 {
        return Err(Error::Capability(format!(
            "normalization check limited to M ≤ 7, got M={}",
            kf.m
        )));
    }
    kf.check_capability()?;
    let (lo, hi) = kf.support;
    let t = kf.box_tensor(lo, hi)?;
    let plan = GroupedPermutationPlan::new([kf.m], kf.n)?;
    let total = pseudo_det_grouped(&t, &plan)?;
    Ok((kf.norm * total).scale_exp(-lf(kf.m)).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncorrelated_constants() {
        let kf = KernelForm::new(&EnsembleModel::UncorrelatedWishart { dim: 4, n: 5 }).unwrap();
        assert!((kf.norm().to_f64() - 1.0 / 3456.0).abs() < 1e-18);
        let kf = KernelForm::new(&EnsembleModel::UncorrelatedWishart { dim: 1, n: 1 }).unwrap();
        assert!((kf.norm().to_f64() - 1.0).abs() < 1e-15);
        assert_eq!(kf.support(), (0.0, f64::INFINITY));
        assert!(
            (kf.table()
                .segment(0, 0, 0.0, f64::INFINITY)
                .unwrap()
                .to_f64()
                - 1.0)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn spiked_constant_matches_formula() {
        let kf = KernelForm::new(&EnsembleModel::SpikedWishart {
            dim: 2,
            n: 2,
            sigma1: 2.0,
            sigma2: 1.0,
        })
        .unwrap();
        // 1/K = 2; the orientation sign for M = 2 is -1
        assert!((kf.norm().to_f64() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn spiked_warns_near_degeneracy() {
        let kf = KernelForm::new(&EnsembleModel::SpikedWishart {
            dim: 2,
            n: 3,
            sigma1: 1.0 + 1e-8,
            sigma2: 1.0,
        })
        .unwrap();
        assert_eq!(kf.warnings().len(), 1);
    }

    #[test]
    fn beta_constant_matches_determinant() {
        let model = EnsembleModel::Beta { dim: 3, m: 2, n: 1 };
        let kf = KernelForm::new(&model).unwrap();
        let rows: Vec<Vec<SignedLog>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| kf.table().segment(i, j, 0.0, 1.0).unwrap())
                    .collect()
            })
            .collect();
        let det = det_signed_log(&rows).unwrap();
        assert!(kf.norm().rel_diff(det.recip()) < 1e-12);
    }

    #[test]
    fn correlated_psi_bar() {
        let model = EnsembleModel::CorrelatedWishart {
            p: 2,
            n: 3,
            phi: vec![2.0, 1.0],
            mult: vec![1, 2],
        };
        let kf = KernelForm::new(&model).unwrap();
        assert_eq!((kf.m(), kf.n()), (2, 3));
        // column k=3 (1-based): [0]_d phi^(0-d); d = 0, 1, 0
        assert_eq!(kf.psi_bar(0, 2).to_f64(), 1.0);
        assert!(kf.psi_bar(1, 2).is_zero());
        assert_eq!(kf.psi_bar(2, 2).to_f64(), 1.0);
    }

    #[test]
    fn small_normalizations() {
        for model in [
            EnsembleModel::UncorrelatedWishart { dim: 2, n: 2 },
            EnsembleModel::Gue { dim: 3 },
            EnsembleModel::CorrelatedWishart {
                p: 2,
                n: 3,
                phi: vec![2.0, 1.0],
                mult: vec![1, 2],
            },
        ] {
            let v = normalization_check(&model).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "{model}: {v}");
        }
    }
}
