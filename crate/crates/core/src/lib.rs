//! Exact distributions of ordered and unordered eigenvalues of finite complex
//! random matrices (Wishart, noncentral Wishart, multivariate beta, GUE),
//! evaluated through a rank-3 tensor pseudo-determinant.

// `!(a < b)` comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod ensembles;
pub mod error;
pub mod oracle;
pub mod pseudodet;
pub mod quad;
pub mod signed_log;
pub mod specfun;

pub use distributions::{CurveGrid, EigenDistribution, SegmentLayout, Statistic};
pub use ensembles::{kernel_form, normalization_check, EnsembleModel, KernelForm, ScalarFn};
pub use error::{Error, Result};
pub use pseudodet::{pseudo_det, pseudo_det_grouped, GroupedPermutationPlan, Tensor3};
pub use signed_log::SignedLog;
