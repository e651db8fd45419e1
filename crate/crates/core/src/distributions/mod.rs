//! Marginal and joint densities, CDFs, interval probabilities and
//! expectations of ordered and unordered eigenvalues.

mod curve;
mod layout;

use std::sync::OnceLock;

use crate::ensembles::{EnsembleModel, KernelForm, ScalarFn};
use crate::error::{Error, Result};
use crate::pseudodet::{
    det_signed_log, pseudo_det, pseudo_det_grouped_with_stats, GroupedPermutationPlan,
    PseudoDetStats, Tensor3,
};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::signed_log::SignedLog;
use crate::specfun::ln_factorial;

pub use curve::{linspace, CurveGrid, Statistic};
pub use layout::{SegmentLayout, Slot};

/// Tolerances for the one-dimensional integrals behind CDFs and
/// expectations of a single ordered eigenvalue.
pub fn marginal_quad_options() -> QuadOptions {
    QuadOptions::with_tol(1e-12, 1e-10)
}

/// Distribution engine for one ensemble. Construction builds the kernel
/// form and refuses dimensions beyond the exact-evaluation limits.
#[derive(Debug)]
pub struct EigenDistribution {
    kernel: KernelForm,
    bulk: OnceLock<Result<(f64, f64)>>,
}

impl EigenDistribution {
    pub fn new(model: &EnsembleModel) -> Result<Self> {
        let kernel = KernelForm::new(model)?;
        kernel.check_capability()?;
        Ok(Self {
            kernel,
            bulk: OnceLock::new(),
        })
    }

    pub fn kernel(&self) -> &KernelForm {
        &self.kernel
    }

    pub fn model(&self) -> &EnsembleModel {
        self.kernel.model()
    }

    /// Number of random eigenvalues `M`.
    pub fn m(&self) -> usize {
        self.kernel.m()
    }

    pub fn support(&self) -> (f64, f64) {
        self.kernel.support()
    }

    fn check_index(&self, l: usize) -> Result<()> {
        if l == 0 || l > self.m() {
            return Err(Error::arg(format!(
                "eigenvalue index {l} outside 1..={}",
                self.m()
            )));
        }
        Ok(())
    }

    /// Tensor for a layout: point rows at fixed positions, segment integrals
    /// elsewhere, constant block beyond `M`.
    fn layout_tensor(&self, layout: &SegmentLayout) -> Result<Tensor3> {
        let (m, n) = (self.kernel.m(), self.kernel.n());
        let table = self.kernel.table();
        let mut slices: Vec<Vec<Vec<SignedLog>>> = Vec::with_capacity(m);
        let mut last: Option<(Slot, usize)> = None;
        for k in 0..m {
            let slot = layout.slot(k);
            if let Some((prev, idx)) = last {
                if prev == slot && matches!(slot, Slot::Segment(..)) {
                    slices.push(slices[idx].clone());
                    continue;
                }
            }
            let block = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match slot {
                            Slot::Point(x) => table.point(i, j, x),
                            Slot::Segment(lo, hi) => table.segment(i, j, lo, hi),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            slices.push(block);
            last = Some((slot, k));
        }
        Ok(Tensor3::from_fn(n, |i, j, k| {
            if k < m {
                slices[k][i][j]
            } else {
                self.kernel.constant_entry(i, j, k)
            }
        }))
    }

    /// `c(i_1..i_L) K T(A)` in signed-log form, with determinant telemetry.
    fn ordered_signed(&self, layout: &SegmentLayout) -> Result<(SignedLog, PseudoDetStats)> {
        if !layout.is_admissible() {
            return Ok((SignedLog::ZERO, PseudoDetStats::default()));
        }
        let tensor = self.layout_tensor(layout)?;
        let plan = layout.plan(self.kernel.n())?;
        let (t, stats) = pseudo_det_grouped_with_stats(&tensor, &plan)?;
        Ok((
            self.kernel.norm() * t.scale_exp(layout.ln_constant()),
            stats,
        ))
    }

    /// Joint density of the ordered eigenvalues at 1-based positions
    /// `indices` (strictly increasing). Zero when `xs` is not nonincreasing
    /// or leaves the support. Deep in the tails cancellation in the
    /// permutation sum can leave a tiny negative residue; it is reported as 0.
    pub fn joint_pdf_ordered(&self, indices: &[usize], xs: &[f64]) -> Result<f64> {
        Ok(self.joint_pdf_ordered_with_stats(indices, xs)?.0)
    }

    pub fn joint_pdf_ordered_with_stats(
        &self,
        indices: &[usize],
        xs: &[f64],
    ) -> Result<(f64, PseudoDetStats)> {
        if indices.is_empty() {
            return Err(Error::arg("at least one eigenvalue index required"));
        }
        let layout = SegmentLayout::new(self.m(), self.support(), indices, xs)?;
        let (v, stats) = self.ordered_signed(&layout)?;
        Ok((v.to_f64().max(0.0), stats))
    }

    /// Density of the `l`-th largest eigenvalue.
    pub fn pdf_single(&self, l: usize, x: f64) -> Result<f64> {
        Ok(self.pdf_single_with_stats(l, x)?.0)
    }

    pub fn pdf_single_with_stats(&self, l: usize, x: f64) -> Result<(f64, PseudoDetStats)> {
        self.check_index(l)?;
        self.joint_pdf_ordered_with_stats(&[l], &[x])
    }

    /// Joint density of the `l`-th and `s`-th largest eigenvalues, `l < s`.
    pub fn pdf_pair(&self, l: usize, s: usize, xl: f64, xs: f64) -> Result<f64> {
        if l >= s {
            return Err(Error::arg(format!(
                "pair indices must satisfy ℓ < s, got ({l}, {s})"
            )));
        }
        self.check_index(l)?;
        self.check_index(s)?;
        self.joint_pdf_ordered(&[l, s], &[xl, xs])
    }

    fn interval(&self, a: f64, b: f64) -> Result<Option<(f64, f64)>> {
        if a.is_nan() || b.is_nan() {
            return Err(Error::arg("NaN interval bound"));
        }
        if a > b {
            return Err(Error::arg(format!("inverted interval ({a}, {b})")));
        }
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        Ok((a < b).then_some((a, b)))
    }

    /// `P(all eigenvalues in [a, b])`, through the `M x M` determinant when
    /// the kernel is square and the grouped pseudo-determinant otherwise.
    pub fn prob_all_in(&self, a: f64, b: f64) -> Result<f64> {
        if self.kernel.n() == self.kernel.m() {
            self.prob_all_in_det(a, b)
        } else {
            self.box_probability(a, b, true)
        }
    }

    /// `K / M! T(A)` with every random slice integrated over `[a, b]`, by the
    /// full `N!` enumeration. Mostly useful as a cross-check.
    pub fn prob_all_in_tensor(&self, a: f64, b: f64) -> Result<f64> {
        self.box_probability(a, b, false)
    }

    fn box_probability(&self, a: f64, b: f64, grouped: bool) -> Result<f64> {
        let Some((a, b)) = self.interval(a, b)? else {
            return Ok(0.0);
        };
        let tensor = self.kernel.box_tensor(a, b)?;
        let t = if grouped {
            let plan = GroupedPermutationPlan::new([self.m()], self.kernel.n())?;
            pseudo_det_grouped_with_stats(&tensor, &plan)?.0
        } else {
            pseudo_det(&tensor)?
        };
        Ok((self.kernel.norm() * t)
            .scale_exp(-ln_factorial(self.m()))
            .to_f64())
    }

    /// `K det B` with `b_ij = int_a^b Phi_i Psi_j xi`; square kernels only.
    pub fn prob_all_in_det(&self, a: f64, b: f64) -> Result<f64> {
        let n = self.kernel.n();
        if n != self.kernel.m() {
            return Err(Error::arg(
                "determinant form requires a square kernel (N = M)",
            ));
        }
        let Some((a, b)) = self.interval(a, b)? else {
            return Ok(0.0);
        };
        let table = self.kernel.table();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| table.segment(i, j, a, b)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok((self.kernel.norm() * det_signed_log(&rows)?).to_f64())
    }

    /// Mean and standard deviation of one unordered eigenvalue, used to place
    /// quadrature break points over the bulk of the spectrum.
    fn bulk(&self) -> Result<(f64, f64)> {
        self.bulk
            .get_or_init(|| {
                let m1 = self.expect_product_unordered(&[ScalarFn::Power(1)])?;
                let m2 = self.expect_product_unordered(&[ScalarFn::Power(2)])?;
                Ok((m1, (m2 - m1 * m1).max(0.0).sqrt()))
            })
            .clone()
    }

    fn breaks(&self) -> Result<Vec<f64>> {
        let (mean, sd) = self.bulk()?;
        let (lo, hi) = self.support();
        Ok((-4..=10)
            .map(|k| mean + f64::from(k) * sd)
            .filter(|&x| x > lo && x < hi)
            .collect())
    }

    fn integrate_pdf(&self, l: usize, f: &ScalarFn, a: f64, b: f64) -> Result<f64> {
        let breaks = self.breaks()?;
        let mut failure = None;
        let r = integrate_with_breaks(
            |x| match self.pdf_single(l, x) {
                // skip f where the density vanishes (f may blow up outside the bulk)
                Ok(0.0) => 0.0,
                Ok(p) => p * f.eval(x),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            a,
            b,
            &breaks,
            marginal_quad_options(),
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(r?.value)
    }

    /// `P(lambda_l <= x)` by adaptive integration of the marginal density;
    /// points above the bulk mean use the complement `1 - int_x^beta`.
    pub fn cdf_single(&self, l: usize, x: f64) -> Result<f64> {
        self.check_index(l)?;
        if x.is_nan() {
            return Err(Error::arg("NaN abscissa"));
        }
        let (lo, hi) = self.support();
        if x <= lo {
            return Ok(0.0);
        }
        if x >= hi {
            return Ok(1.0);
        }
        let (mean, _) = self.bulk()?;
        let v = if x <= mean {
            self.integrate_pdf(l, &ScalarFn::One, lo, x)?
        } else {
            1.0 - self.integrate_pdf(l, &ScalarFn::One, x, hi)?
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// `P(a < lambda_l <= b)` by direct integration.
    pub fn prob_single_in(&self, l: usize, a: f64, b: f64) -> Result<f64> {
        self.check_index(l)?;
        let Some((a, b)) = self.interval(a, b)? else {
            return Ok(0.0);
        };
        self.integrate_pdf(l, &ScalarFn::One, a, b)
    }

    /// `E[f(lambda_l)]`; moments with `Power`, the MGF with `Exp`.
    pub fn expect_single(&self, l: usize, f: &ScalarFn) -> Result<f64> {
        self.check_index(l)?;
        let (lo, hi) = self.support();
        self.integrate_pdf(l, f, lo, hi)
    }

    /// Joint density of `L = xs.len()` unordered eigenvalues.
    pub fn joint_pdf_unordered(&self, xs: &[f64]) -> Result<f64> {
        let (m, n) = (self.m(), self.kernel.n());
        let l = xs.len();
        if l == 0 || l > m {
            return Err(Error::arg(format!(
                "unordered subset size {l} outside 1..={m}"
            )));
        }
        if xs.iter().any(|x| x.is_nan()) {
            return Err(Error::arg("NaN abscissa"));
        }
        let (lo, hi) = self.support();
        if xs.iter().any(|&x| x < lo || x > hi) {
            return Ok(0.0);
        }
        let table = self.kernel.table();
        let full = (0..n)
            .map(|i| (0..n).map(|j| table.segment(i, j, lo, hi)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let points = xs
            .iter()
            .map(|&x| {
                (0..n)
                    .map(|i| (0..n).map(|j| table.point(i, j, x)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let tensor = Tensor3::from_fn(n, |i, j, k| {
            if k < l {
                points[k][i][j]
            } else if k < m {
                full[i][j]
            } else {
                self.kernel.constant_entry(i, j, k)
            }
        });
        let plan = GroupedPermutationPlan::new(
            std::iter::repeat_n(1, l).chain(std::iter::once(m - l)),
            n,
        )?;
        let (t, _) = pseudo_det_grouped_with_stats(&tensor, &plan)?;
        Ok((self.kernel.norm() * t)
            .scale_exp(-ln_factorial(m))
            .to_f64()
            .max(0.0))
    }

    /// `E[prod_k f_k(lambda_k)]` over unordered eigenvalues. Fewer than `M`
    /// functions are padded with `f = 1`.
    pub fn expect_product_unordered(&self, fs: &[ScalarFn]) -> Result<f64> {
        let (m, n) = (self.m(), self.kernel.n());
        if fs.len() > m {
            return Err(Error::arg(format!(
                "{} functions for {m} eigenvalues",
                fs.len()
            )));
        }
        let one = ScalarFn::One;
        let f_at = |k: usize| fs.get(k).unwrap_or(&one);
        let (lo, hi) = self.support();
        let table = self.kernel.table();

        let mut sizes = Vec::new();
        let mut blocks: Vec<Vec<Vec<SignedLog>>> = Vec::new();
        for k in 0..m {
            let f = f_at(k);
            if k > 0 && f.same_as(f_at(k - 1)) {
                *sizes.last_mut().expect("previous block") += 1;
                continue;
            }
            sizes.push(1);
            blocks.push(
                (0..n)
                    .map(|i| (0..n).map(|j| table.weighted(i, j, f, lo, hi)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()?,
            );
        }
        let mut owner = Vec::with_capacity(m);
        for (b, &s) in sizes.iter().enumerate() {
            owner.extend(std::iter::repeat_n(b, s));
        }
        let tensor = Tensor3::from_fn(n, |i, j, k| {
            if k < m {
                blocks[owner[k]][i][j]
            } else {
                self.kernel.constant_entry(i, j, k)
            }
        });
        let plan = GroupedPermutationPlan::new(sizes, n)?;
        let (t, _) = pseudo_det_grouped_with_stats(&tensor, &plan)?;
        Ok((self.kernel.norm() * t)
            .scale_exp(-ln_factorial(m))
            .to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn wishart22() -> EigenDistribution {
        EigenDistribution::new(&EnsembleModel::UncorrelatedWishart { dim: 2, n: 2 }).unwrap()
    }

    #[test]
    fn exponential_case() {
        let d =
            EigenDistribution::new(&EnsembleModel::UncorrelatedWishart { dim: 1, n: 1 }).unwrap();
        assert!((d.pdf_single(1, 0.7).unwrap() - (-0.7f64).exp()).abs() < 1e-15);
        assert!((d.joint_pdf_unordered(&[0.7]).unwrap() - (-0.7f64).exp()).abs() < 1e-15);
        assert!((d.cdf_single(1, 2f64.ln()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_joint_matches_kernel() {
        let d = wishart22();
        let v = d.joint_pdf_ordered(&[1, 2], &[2.0, 1.0]).unwrap();
        assert!((v - (-3f64).exp()).abs() < 1e-15);
        assert_eq!(d.joint_pdf_ordered(&[1, 2], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(d.pdf_pair(1, 2, 1.0, 1.5).unwrap(), 0.0);
        assert!(d.pdf_pair(2, 1, 1.0, 0.5).is_err());
    }

    #[test]
    fn frozen_values() {
        let d = wishart22();
        assert!((d.pdf_single(1, 1.0).unwrap() - 0.097_208_874_698_216_94).abs() < 1e-13);
        assert!((d.pdf_single(2, 0.5).unwrap() - 0.735_758_882_342_884_6).abs() < 1e-13);
        assert!((d.prob_all_in(0.0, 1.0).unwrap() - 0.031_696_959_722_285_73).abs() < 1e-14);
        assert!((d.cdf_single(2, 0.5).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-10);
        let g = EigenDistribution::new(&EnsembleModel::Gue { dim: 2 }).unwrap();
        assert!((g.prob_all_in(-0.5, 1.0).unwrap() - 0.146_491_364_676_755_35).abs() < 1e-13);
    }

    #[test]
    fn telemetry_counts_grouped_determinants() {
        let d =
            EigenDistribution::new(&EnsembleModel::UncorrelatedWishart { dim: 6, n: 6 }).unwrap();
        let (_, stats) = d.pdf_single_with_stats(3, 4.0).unwrap();
        assert_eq!(stats.determinants, 60);
    }

    #[test]
    fn marginal_integrates_to_one() {
        let d =
            EigenDistribution::new(&EnsembleModel::UncorrelatedWishart { dim: 3, n: 4 }).unwrap();
        for l in 1..=3 {
            let v = integrate(
                |x| d.pdf_single(l, x).unwrap(),
                0.0,
                f64::INFINITY,
                marginal_quad_options(),
            )
            .unwrap()
            .value;
            assert!((v - 1.0).abs() < 1e-9, "ℓ={l}: {v}");
        }
    }

    #[test]
    fn capability_limits() {
        let e = EigenDistribution::new(&EnsembleModel::Gue { dim: 9 }).unwrap_err();
        assert!(matches!(e, Error::Capability(_)));
    }

    #[test]
    fn divergent_mgf_rejected() {
        let d = wishart22();
        let e = d
            .expect_product_unordered(&[ScalarFn::Exp(1.0)])
            .unwrap_err();
        assert!(matches!(e, Error::InvalidArgument(_)));
        let v = d.expect_product_unordered(&[ScalarFn::Exp(0.25)]).unwrap();
        assert!(v.is_finite() && v > 1.0);
    }
}
