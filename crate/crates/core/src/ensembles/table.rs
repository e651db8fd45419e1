use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::signed_log::SignedLog;
use crate::specfun::{
    gamma, hyp0f1, incomplete_beta_integer, ln_beta, ln_pow, lower_incomplete_gamma,
    two_limit_gamma,
};

/// A scalar test function applied under the integral, e.g. a moment power or
/// an MGF tilt. Powers and exponential tilts have closed forms for the
/// gamma-type kernels; anything else is integrated numerically.
#[derive(Clone)]
pub enum ScalarFn {
    One,
    Power(u32),
    Exp(f64),
    PowerExp(u32, f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl ScalarFn {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ScalarFn::One => 1.0,
            ScalarFn::Power(m) => x.powi(m as i32),
            ScalarFn::Exp(nu) => (nu * x).exp(),
            ScalarFn::PowerExp(m, nu) => x.powi(m as i32) * (nu * x).exp(),
            ScalarFn::Custom(ref f) => f(x),
        }
    }

    /// Structural equality; custom functions never compare equal.
    pub(crate) fn same_as(&self, other: &ScalarFn) -> bool {
        match (self, other) {
            (ScalarFn::Custom(_), _) | (_, ScalarFn::Custom(_)) => false,
            _ => self.power_exp() == other.power_exp(),
        }
    }

    /// `(power, tilt)` when the function is `x^power e^(tilt x)`.
    fn power_exp(&self) -> Option<(u32, f64)> {
        match *self {
            ScalarFn::One => Some((0, 0.0)),
            ScalarFn::Power(m) => Some((m, 0.0)),
            ScalarFn::Exp(nu) => Some((0, nu)),
            ScalarFn::PowerExp(m, nu) => Some((m, nu)),
            ScalarFn::Custom(_) => None,
        }
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::One => write!(f, "One"),
            ScalarFn::Power(m) => write!(f, "Power({m})"),
            ScalarFn::Exp(nu) => write!(f, "Exp({nu})"),
            ScalarFn::PowerExp(m, nu) => write!(f, "PowerExp({m}, {nu})"),
            ScalarFn::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Closed form of one product `varsigma_i(x) psi_j(x)`.
#[derive(Debug, Clone)]
pub(crate) enum Term {
    /// `coef * x^power * e^(-rate x)` on `(0, inf)`
    Laguerre {
        coef: SignedLog,
        power: f64,
        rate: f64,
    },
    /// `x^power * e^(-x^2)` on the real line
    Hermite { power: u32 },
    /// `x^power * (1-x)^tail` on `(0, 1)`
    Jacobi { power: u32, tail: u32 },
    /// `coef * x^power * e^-x * 0F1(b; mu x)` on `(0, inf)`
    Bessel {
        coef: SignedLog,
        power: f64,
        b: f64,
        mu: f64,
    },
}

impl Term {
    fn point(&self, x: f64) -> Result<SignedLog> {
        Ok(match *self {
            Term::Laguerre { coef, power, rate } => {
                coef * SignedLog::exp(ln_pow(x, power) - rate * x)
            }
            Term::Hermite { power } => {
                let v = SignedLog::exp(ln_pow(x.abs(), f64::from(power)) - x * x);
                if x < 0.0 && power % 2 == 1 {
                    -v
                } else {
                    v
                }
            }
            Term::Jacobi { power, tail } => {
                SignedLog::exp(ln_pow(x, f64::from(power)) + ln_pow(1.0 - x, f64::from(tail)))
            }
            Term::Bessel { coef, power, b, mu } => {
                coef * hyp0f1(b, mu * x)? * SignedLog::exp(ln_pow(x, power) - x)
            }
        })
    }
}

/// Per-ensemble rule for the tensor elements: point values
/// `varsigma_i(x) psi_j(x)` and segment integrals of the same product, with
/// `varsigma_i = Phi_i xi` for `i < M` and `xi` otherwise. Indices are 0-based.
#[derive(Debug, Clone)]
pub struct SegmentIntegralTable {
    n: usize,
    support: (f64, f64),
    terms: Vec<Term>,
}

/// Target accuracy for segment integrals without a closed form.
pub(crate) fn segment_quad_options() -> QuadOptions {
    QuadOptions::with_tol(0.0, 1e-11)
}

impl SegmentIntegralTable {
    pub(crate) fn new(n: usize, support: (f64, f64), terms: Vec<Term>) -> Self {
        debug_assert_eq!(terms.len(), n * n);
        Self { n, support, terms }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    fn term(&self, i: usize, j: usize) -> &Term {
        &self.terms[i * self.n + j]
    }

    /// `varsigma_i(x) psi_j(x)`; zero outside the support.
    pub fn point(&self, i: usize, j: usize, x: f64) -> Result<SignedLog> {
        let (lo, hi) = self.support;
        if x < lo || x > hi {
            return Ok(SignedLog::ZERO);
        }
        self.term(i, j).point(x)
    }

    fn clamp(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if a.is_nan() || b.is_nan() {
            return Err(Error::arg("NaN segment bound"));
        }
        Ok((a.max(self.support.0), b.min(self.support.1)))
    }

    /// `int_a^b varsigma_i psi_j dx`, bounds clipped to the support. Empty or
    /// reversed segments integrate to zero.
    pub fn segment(&self, i: usize, j: usize, a: f64, b: f64) -> Result<SignedLog> {
        self.weighted(i, j, &ScalarFn::One, a, b)
    }

    /// `int_a^b varsigma_i psi_j f dx`.
    pub fn weighted(&self, i: usize, j: usize, f: &ScalarFn, a: f64, b: f64) -> Result<SignedLog> {
        let (a, b) = self.clamp(a, b)?;
        if a >= b {
            return Ok(SignedLog::ZERO);
        }
        let term = self.term(i, j);
        let closed = f
            .power_exp()
            .and_then(|(m, nu)| closed_form(term, m, nu, a, b));
        match closed {
            Some(v) => v,
            None => self.numeric(term, f, a, b),
        }
    }

    fn numeric(&self, term: &Term, f: &ScalarFn, a: f64, b: f64) -> Result<SignedLog> {
        let breaks = match *term {
            Term::Laguerre { power, rate, .. } => {
                vec![(power + 1.0) / rate, 4.0 * (power + 4.0) / rate]
            }
            Term::Bessel { power, mu, .. } => {
                let peak = power + mu + 1.0;
                vec![0.5 * peak, peak, 2.0 * peak + 10.0, 4.0 * peak + 40.0]
            }
            Term::Hermite { .. } => vec![-3.0, 0.0, 3.0],
            Term::Jacobi { .. } => vec![],
        };
        let g = |x: f64| match term.point(x) {
            Ok(v) => v.to_f64() * f.eval(x),
            Err(_) => f64::NAN,
        };
        let r = integrate_with_breaks(g, a, b, &breaks, segment_quad_options())?;
        Ok(SignedLog::from_f64(r.value))
    }
}

/// Closed form of `int_a^b term(x) x^m e^(nu x) dx`, `None` when only
/// quadrature applies. A divergent integral yields `Some(Err(..))`.
fn closed_form(term: &Term, m: u32, nu: f64, a: f64, b: f64) -> Option<Result<SignedLog>> {
    match *term {
        Term::Laguerre { coef, power, rate } => {
            let rate = rate - nu;
            if rate <= 0.0 {
                if b.is_infinite() {
                    return Some(Err(Error::arg(format!(
                        "integral diverges: exponential tilt {nu} against decay rate {}",
                        rate + nu
                    ))));
                }
                return None;
            }
            let shape = power + f64::from(m) + 1.0;
            Some(
                two_limit_gamma(shape, rate * a, rate * b)
                    .map(|g| coef * g * SignedLog::exp(-shape * rate.ln())),
            )
        }
        Term::Hermite { power } if nu == 0.0 => Some(hermite_segment(power + m, a, b)),
        Term::Jacobi { power, tail } if nu == 0.0 => Some(jacobi_segment(power + m, tail, a, b)),
        Term::Bessel { .. } if nu == 0.0 && a == 0.0 && b.is_infinite() => None,
        _ => {
            if b.is_infinite() && nu > 0.0 && matches!(term, Term::Bessel { .. }) {
                // 0F1 grows like e^(2 sqrt(mu x)); the tilt must stay below the e^-x decay
                if nu >= 1.0 {
                    return Some(Err(Error::arg(format!(
                        "integral diverges: exponential tilt {nu} against decay rate 1"
                    ))));
                }
            }
            None
        }
    }
}

/// `int_a^b x^p e^(-x^2) dx` through `int_0^y x^p e^(-x^2) dx = gamma((p+1)/2, y^2) / 2`,
/// reflecting negative ranges with the parity of `p`.
fn hermite_segment(p: u32, a: f64, b: f64) -> Result<SignedLog> {
    let s = (f64::from(p) + 1.0) / 2.0;
    let half = SignedLog::from_f64(0.5);
    let odd = p % 2 == 1;
    let reflect = |v: SignedLog| if odd { -v } else { v };
    if a >= 0.0 {
        Ok(half * two_limit_gamma(s, a * a, b * b)?)
    } else if b <= 0.0 {
        Ok(half * reflect(two_limit_gamma(s, b * b, a * a)?))
    } else {
        let neg = reflect(lower_incomplete_gamma(s, a * a)?);
        let pos = lower_incomplete_gamma(s, b * b)?;
        Ok(half * (pos + neg))
    }
}

/// `int_a^b x^p (1-x)^q dx = B(p+1, q+1) (I_b - I_a)` with the regularized
/// incomplete beta evaluated by finite binomial sums.
fn jacobi_segment(p: u32, q: u32, a: f64, b: f64) -> Result<SignedLog> {
    let (pa, qa) = (p as usize + 1, q as usize + 1);
    let (ia, ca) = incomplete_beta_integer(pa, qa, a)?;
    let (ib, cb) = incomplete_beta_integer(pa, qa, b)?;
    let diff = if a < 0.5 { ib - ia } else { ca - cb };
    Ok(SignedLog::from_f64(diff) * SignedLog::exp(ln_beta(pa as f64, qa as f64)))
}

/// `Gamma(s) / rate^s`, the full-range Laguerre integral.
#[allow(dead_code)]
pub(crate) fn laguerre_total(power: f64, rate: f64) -> SignedLog {
    gamma(power + 1.0) * SignedLog::exp(-(power + 1.0) * rate.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};

    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        integrate(f, a, b, QuadOptions::with_tol(0.0, 1e-13))
            .unwrap()
            .value
    }

    #[test]
    fn hermite_odd_half_line() {
        let v = hermite_segment(1, f64::NEG_INFINITY, 0.0).unwrap().to_f64();
        assert!((v + 0.5).abs() < 1e-15);
        let v = hermite_segment(0, f64::NEG_INFINITY, f64::INFINITY)
            .unwrap()
            .to_f64();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hermite_segments_match_quadrature() {
        for p in 0..7u32 {
            for &(a, b) in &[(-2.0, -0.3), (-1.1, 0.7), (0.2, 2.5), (-0.5, f64::INFINITY)] {
                let cf = hermite_segment(p, a, b).unwrap().to_f64();
                let q = quad(|x| x.powi(p as i32) * (-x * x).exp(), a, b);
                assert!(
                    (cf - q).abs() < 1e-12 * q.abs().max(1e-3),
                    "p={p} ({a},{b}) {cf} {q}"
                );
            }
        }
    }

    #[test]
    fn jacobi_segments_match_quadrature() {
        for p in 0..6u32 {
            for q in 0..4u32 {
                for &(a, b) in &[(0.0, 1.0), (0.1, 0.4), (0.6, 0.95), (0.3, 0.8)] {
                    let cf = jacobi_segment(p, q, a, b).unwrap().to_f64();
                    let o = quad(|x| x.powi(p as i32) * (1.0 - x).powi(q as i32), a, b);
                    assert!((cf - o).abs() < 1e-12 * o.abs(), "{p} {q} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn laguerre_tilt_divergence() {
        let t = Term::Laguerre {
            coef: SignedLog::ONE,
            power: 2.0,
            rate: 1.0,
        };
        assert!(closed_form(&t, 0, 1.0, 0.0, f64::INFINITY)
            .unwrap()
            .is_err());
        assert!(closed_form(&t, 0, 1.5, 0.0, 2.0).is_none());
        let v = closed_form(&t, 1, 0.5, 0.0, f64::INFINITY)
            .unwrap()
            .unwrap()
            .to_f64();
        // int x^3 e^(-x/2) = 3! 2^4
        assert!((v - 96.0).abs() < 1e-11);
    }
}
