//! Random-matrix ensembles and their kernel decompositions
//! `K |Phi(x)| |Psi(x)| prod xi(x_i)`.

mod kernel;
mod table;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use kernel::{kernel_form, normalization_check, KernelForm};
pub use table::{ScalarFn, SegmentIntegralTable};

/// Relative spike gap below which the spiked kernel is ill-conditioned.
pub const SPIKE_GAP_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleModel {
    /// `X X^H` with `X` an `M x n` matrix of i.i.d. `CN(0,1)` entries.
    UncorrelatedWishart {
        dim: usize,
        n: usize,
    },
    /// `X Sigma X^H` with `X` a `p x n` matrix of i.i.d. `CN(0,1)` entries.
    /// `phi` lists the distinct eigenvalues of `Sigma^-1` in decreasing order,
    /// `mult` their multiplicities.
    CorrelatedWishart {
        p: usize,
        n: usize,
        phi: Vec<f64>,
        mult: Vec<usize>,
    },
    /// `Sigma^(1/2) X X^H Sigma^(1/2)` with `X` an `M x n` matrix and
    /// `Sigma = diag(sigma1, sigma2, ..., sigma2)`.
    SpikedWishart {
        dim: usize,
        n: usize,
        sigma1: f64,
        sigma2: f64,
    },
    /// `X X^H` with `E[X] = Q` and `Q Q^H` having nonzero eigenvalues `mu`.
    NoncentralWishart {
        dim: usize,
        n: usize,
        mu: Vec<f64>,
    },
    Gue {
        dim: usize,
    },
    /// Eigenvalues on `(0,1)` with weight `x^m (1-x)^n`.
    Beta {
        dim: usize,
        m: usize,
        n: usize,
    },
}

impl EnsembleModel {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleModel::UncorrelatedWishart { .. } => "uncorrelated-wishart",
            EnsembleModel::CorrelatedWishart { .. } => "correlated-wishart",
            EnsembleModel::SpikedWishart { .. } => "spiked-wishart",
            EnsembleModel::NoncentralWishart { .. } => "noncentral-wishart",
            EnsembleModel::Gue { .. } => "gue",
            EnsembleModel::Beta { .. } => "beta",
        }
    }

    /// Number of random eigenvalues `M`.
    pub fn dimension(&self) -> usize {
        match *self {
            EnsembleModel::UncorrelatedWishart { dim, .. }
            | EnsembleModel::SpikedWishart { dim, .. }
            | EnsembleModel::NoncentralWishart { dim, .. }
            | EnsembleModel::Gue { dim }
            | EnsembleModel::Beta { dim, .. } => dim,
            EnsembleModel::CorrelatedWishart { p, n, .. } => p.min(n),
        }
    }

    /// Kernel dimension `N >= M`.
    pub fn kernel_dimension(&self) -> usize {
        match *self {
            EnsembleModel::CorrelatedWishart { n, .. } => n,
            _ => self.dimension(),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            EnsembleModel::Gue { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            EnsembleModel::Beta { .. } => (0.0, 1.0),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Checks the parameter constraints, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::model(msg));
        match self {
            &EnsembleModel::UncorrelatedWishart { dim, n } => {
                if dim == 0 {
                    return fail("M ≥ 1 required".into());
                }
                if n < dim {
                    return fail(format!("n ≥ M required (n={n}, M={dim})"));
                }
            }
            EnsembleModel::CorrelatedWishart { p, n, phi, mult } => {
                if *p == 0 || *n == 0 {
                    return fail("p ≥ 1 and n ≥ 1 required".into());
                }
                if phi.is_empty() || phi.len() != mult.len() {
                    return fail(format!(
                        "phi and mult must be nonempty and of equal length ({} vs {})",
                        phi.len(),
                        mult.len()
                    ));
                }
                if let Some(x) = phi.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                    return fail(format!("phi must be positive and finite, got {x}"));
                }
                if phi.windows(2).any(|w| w[0] <= w[1]) {
                    return fail("phi must be strictly decreasing".into());
                }
                if mult.contains(&0) {
                    return fail("multiplicities must be positive".into());
                }
                let total: usize = mult.iter().sum();
                if total != *n {
                    return fail(format!("multiplicities sum {total} ≠ n={n}"));
                }
            }
            &EnsembleModel::SpikedWishart {
                dim,
                n,
                sigma1,
                sigma2,
            } => {
                if dim == 0 {
                    return fail("M ≥ 1 required".into());
                }
                if n < dim {
                    return fail(format!("n ≥ M required (n={n}, M={dim})"));
                }
                if !(sigma2.is_finite() && sigma2 > 0.0) {
                    return fail(format!("σ2 > 0 required, got {sigma2}"));
                }
                if !(sigma1.is_finite() && sigma1 > sigma2) {
                    return fail("σ1 > σ2 required".into());
                }
            }
            EnsembleModel::NoncentralWishart { dim, n, mu } => {
                if *dim == 0 {
                    return fail("M ≥ 1 required".into());
                }
                if n < dim {
                    return fail(format!("n ≥ M required (n={n}, M={dim})"));
                }
                if mu.len() > *dim {
                    return fail(format!("ν ≤ M required (ν={}, M={dim})", mu.len()));
                }
                if let Some(x) = mu.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                    return fail(format!("μ must be positive and finite, got {x}"));
                }
                if mu.windows(2).any(|w| w[0] < w[1]) {
                    return fail("μ must be nonincreasing".into());
                }
                // equal values make two 0F1 columns identical and the kernel singular
                if mu.windows(2).any(|w| w[0] == w[1]) {
                    return fail("μ values must be distinct".into());
                }
            }
            &EnsembleModel::Gue { dim } | &EnsembleModel::Beta { dim, .. } => {
                if dim == 0 {
                    return fail("M ≥ 1 required".into());
                }
            }
        }
        Ok(())
    }

    /// Parses the flat key-value form, e.g.
    /// `correlated-wishart p=4 n=6 phi=2.0,1.0 mult=2,4`. The first token may
    /// also be written `ensemble=<name>`.
    pub fn parse_spec(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let head = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty ensemble spec".into()))?;
        let name = head.strip_prefix("ensemble=").unwrap_or(head);
        let mut keys = KeyValues::default();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{tok}'")))?;
            keys.insert(k, v)?;
        }
        let model = match name {
            "uncorrelated-wishart" => EnsembleModel::UncorrelatedWishart {
                dim: keys.usize("M")?,
                n: keys.usize("n")?,
            },
            "correlated-wishart" => EnsembleModel::CorrelatedWishart {
                p: keys.usize("p")?,
                n: keys.usize("n")?,
                phi: keys.list("phi")?,
                mult: keys.list("mult")?,
            },
            "spiked-wishart" => EnsembleModel::SpikedWishart {
                dim: keys.usize("M")?,
                n: keys.usize("n")?,
                sigma1: keys.f64("sigma1")?,
                sigma2: keys.f64("sigma2")?,
            },
            "noncentral-wishart" => EnsembleModel::NoncentralWishart {
                dim: keys.usize("M")?,
                n: keys.usize("n")?,
                mu: keys.optional_list("mu")?.unwrap_or_default(),
            },
            "gue" => EnsembleModel::Gue {
                dim: keys.usize("M")?,
            },
            "beta" => EnsembleModel::Beta {
                dim: keys.usize("M")?,
                m: keys.usize("m")?,
                n: keys.usize("n")?,
            },
            other => return Err(Error::Parse(format!("unknown ensemble '{other}'"))),
        };
        keys.finish()?;
        model.validate().map_err(|e| match e {
            Error::InvalidModel(msg) => Error::Parse(msg),
            other => other,
        })?;
        Ok(model)
    }
}

impl FromStr for EnsembleModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_spec(s)
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes the same flat form accepted by [`EnsembleModel::parse_spec`].
impl fmt::Display for EnsembleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match self {
            EnsembleModel::UncorrelatedWishart { dim, n } => write!(f, " M={dim} n={n}"),
            EnsembleModel::CorrelatedWishart { p, n, phi, mult } => {
                write!(f, " p={p} n={n} phi={} mult={}", join(phi), join(mult))
            }
            EnsembleModel::SpikedWishart {
                dim,
                n,
                sigma1,
                sigma2,
            } => write!(f, " M={dim} n={n} sigma1={sigma1} sigma2={sigma2}"),
            EnsembleModel::NoncentralWishart { dim, n, mu } => {
                write!(f, " M={dim} n={n}")?;
                if !mu.is_empty() {
                    write!(f, " mu={}", join(mu))?;
                }
                Ok(())
            }
            EnsembleModel::Gue { dim } => write!(f, " M={dim}"),
            EnsembleModel::Beta { dim, m, n } => write!(f, " M={dim} m={m} n={n}"),
        }
    }
}

#[derive(Default)]
struct KeyValues {
    entries: Vec<(String, String, bool)>,
}

impl KeyValues {
    fn insert(&mut self, k: &str, v: &str) -> Result<()> {
        if self.entries.iter().any(|(key, _, _)| key == k) {
            return Err(Error::Parse(format!("duplicate key '{k}'")));
        }
        self.entries.push((k.to_string(), v.to_string(), false));
        Ok(())
    }

    fn take(&mut self, k: &str) -> Option<String> {
        self.entries
            .iter_mut()
            .find(|(key, _, _)| key == k)
            .map(|e| {
                e.2 = true;
                e.1.clone()
            })
    }

    fn raw(&mut self, k: &str) -> Result<String> {
        self.take(k)
            .ok_or_else(|| Error::Parse(format!("missing key '{k}'")))
    }

    fn scalar<T: FromStr>(k: &str, v: &str) -> Result<T> {
        v.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad value for '{k}': '{v}'")))
    }

    fn usize(&mut self, k: &str) -> Result<usize> {
        let v = self.raw(k)?;
        Self::scalar(k, &v)
    }

    fn f64(&mut self, k: &str) -> Result<f64> {
        let v = self.raw(k)?;
        Self::scalar(k, &v)
    }

    fn list<T: FromStr>(&mut self, k: &str) -> Result<Vec<T>> {
        let v = self.raw(k)?;
        v.split(',').map(|x| Self::scalar(k, x)).collect()
    }

    fn optional_list<T: FromStr>(&mut self, k: &str) -> Result<Option<Vec<T>>> {
        match self.take(k) {
            None => Ok(None),
            Some(v) if v.is_empty() => Ok(Some(Vec::new())),
            Some(v) => v
                .split(',')
                .map(|x| Self::scalar(k, x))
                .collect::<Result<_>>()
                .map(Some),
        }
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().find(|(_, _, used)| !used) {
            Some((k, _, _)) => Err(Error::Parse(format!("unknown key '{k}'"))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_correlated() {
        let m: EnsembleModel = "correlated-wishart p=4 n=6 phi=2.0,1.0 mult=2,4"
            .parse()
            .unwrap();
        assert_eq!(
            m,
            EnsembleModel::CorrelatedWishart {
                p: 4,
                n: 6,
                phi: vec![2.0, 1.0],
                mult: vec![2, 4]
            }
        );
        assert_eq!(m.dimension(), 4);
        assert_eq!(m.kernel_dimension(), 6);
        let again: EnsembleModel = m.to_string().parse().unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn parse_errors_cite_invariant() {
        let e = EnsembleModel::parse_spec("correlated-wishart p=4 n=6 phi=2.0,1.0 mult=2,3")
            .unwrap_err();
        assert_eq!(e, Error::Parse("multiplicities sum 5 ≠ n=6".into()));
        let e = EnsembleModel::parse_spec("spiked-wishart M=4 n=5 sigma1=1 sigma2=1").unwrap_err();
        assert_eq!(e, Error::Parse("σ1 > σ2 required".into()));
        let e = EnsembleModel::parse_spec("ensemble=gue M=3 n=2").unwrap_err();
        assert!(e.to_string().contains("'n'"));
        let e = EnsembleModel::parse_spec("uncorrelated-wishart M=3").unwrap_err();
        assert!(e.to_string().contains("missing key 'n'"));
        assert!(EnsembleModel::parse_spec("goe M=2").is_err());
    }

    #[test]
    fn validation() {
        assert!(EnsembleModel::UncorrelatedWishart { dim: 3, n: 2 }
            .validate()
            .is_err());
        assert!(EnsembleModel::NoncentralWishart {
            dim: 2,
            n: 3,
            mu: vec![1.0, 2.0]
        }
        .validate()
        .is_err());
        assert!(EnsembleModel::Beta { dim: 2, m: 0, n: 0 }
            .validate()
            .is_ok());
    }
}
