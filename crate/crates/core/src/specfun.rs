//! Special functions used by the closed-form tensor elements.
//!
//! Results come back as [`SignedLog`] so that e.g. `Gamma(40, 900)` or a large
//! `0F1` argument stays representable.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::signed_log::{compensated_sum, SignedLog};

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_087_071_713_675_677_f64;
const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 100_000;
/// Above this the erfc seed underflows; the continued fraction takes over.
const ERFC_SEED_LIMIT: f64 = 600.0;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; 400];
        for k in 1..t.len() {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// `ln n!`, tabulated for `n < 400`.
pub fn ln_factorial(n: usize) -> f64 {
    let t = ln_factorial_table();
    if n < t.len() {
        t[n]
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

fn as_small_integer(s: f64) -> Option<usize> {
    (s.fract() == 0.0 && (1.0..1e6).contains(&s)).then_some(s as usize)
}

fn as_half_integer(s: f64) -> Option<usize> {
    let t = s - 0.5;
    (t.fract() == 0.0 && (0.0..1e6).contains(&t)).then_some(t as usize)
}

/// `ln Gamma(s)` for `s > 0`. Integer and half-integer shapes are exact sums of
/// logs; other shapes use the Lanczos approximation.
pub fn ln_gamma(s: f64) -> f64 {
    let t = ln_factorial_table();
    if let Some(n) = as_small_integer(s) {
        if n <= t.len() {
            return t[n - 1];
        }
    }
    if let Some(h) = as_half_integer(s) {
        if 2 * h < t.len() {
            // Gamma(h + 1/2) = (2h)! sqrt(pi) / (4^h h!)
            return t[2 * h] - t[h] - 2.0 * h as f64 * std::f64::consts::LN_2 + LN_SQRT_PI;
        }
    }
    lanczos_ln_gamma(s)
}

fn lanczos_ln_gamma(s: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if s < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * s).sin()).ln() - lanczos_ln_gamma(1.0 - s);
    }
    let x = s - 1.0;
    let mut a = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(s: f64) -> SignedLog {
    SignedLog::exp(ln_gamma(s))
}

fn check_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::arg(format!("gamma shape must be positive, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(Error::arg(format!(
            "gamma limit must be nonnegative, got {x}"
        )));
    }
    Ok(())
}

/// `x^p` as a signed-log value, with `0^0 = 1`.
pub(crate) fn ln_pow(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * x.ln()
    }
}

/// Upper incomplete gamma `Gamma(s, x) = int_x^inf t^(s-1) e^-t dt`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<SignedLog> {
    check_args(s, x)?;
    if x == f64::INFINITY {
        return Ok(SignedLog::ZERO);
    }
    if x == 0.0 {
        return Ok(gamma(s));
    }
    if let Some(n) = as_small_integer(s) {
        return Ok(upper_integer(n, x));
    }
    if let Some(h) = as_half_integer(s) {
        if x < ERFC_SEED_LIMIT {
            return Ok(upper_half_integer(h, x));
        }
    }
    if x < s + 1.0 {
        Ok(gamma(s) - lower_series(s, x))
    } else {
        Ok(upper_continued_fraction(s, x))
    }
}

/// Lower incomplete gamma `gamma(s, x) = int_0^x t^(s-1) e^-t dt`.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<SignedLog> {
    check_args(s, x)?;
    if x == 0.0 {
        return Ok(SignedLog::ZERO);
    }
    if x == f64::INFINITY {
        return Ok(gamma(s));
    }
    if x < s + 1.0 {
        Ok(lower_series(s, x))
    } else {
        Ok(gamma(s) - upper_incomplete_gamma(s, x)?)
    }
}

/// `Gamma(s, x1, x2) = Gamma(s, x1) - Gamma(s, x2)`, negative when `x1 > x2`.
///
/// When both limits sit below the series switchover the difference is taken
/// between lower gammas instead, which avoids subtracting two values close to
/// `Gamma(s)`.
pub fn two_limit_gamma(s: f64, x1: f64, x2: f64) -> Result<SignedLog> {
    check_args(s, x1)?;
    check_args(s, x2)?;
    if x1 == x2 {
        return Ok(SignedLog::ZERO);
    }
    if x1.max(x2) < s + 1.0 {
        Ok(lower_incomplete_gamma(s, x2)? - lower_incomplete_gamma(s, x1)?)
    } else {
        Ok(upper_incomplete_gamma(s, x1)? - upper_incomplete_gamma(s, x2)?)
    }
}

/// `Gamma(n, x) = (n-1)! e^-x sum_{k<n} x^k / k!`
fn upper_integer(n: usize, x: f64) -> SignedLog {
    let terms: Vec<SignedLog> = (0..n)
        .map(|k| SignedLog::exp(ln_pow(x, k as f64) - ln_factorial(k)))
        .collect();
    compensated_sum(&terms).scale_exp(ln_factorial(n - 1) - x)
}

/// `Gamma(h + 1/2, x) = Gamma(h + 1/2) [erfc(sqrt x) + e^-x sum_{k=1..h} x^(k-1/2) / Gamma(k + 1/2)]`
fn upper_half_integer(h: usize, x: f64) -> SignedLog {
    let seed = SignedLog::from_f64(libm::erfc(x.sqrt()));
    let lx = x.ln();
    let mut terms = vec![seed];
    terms.extend((1..=h).map(|k| {
        let kh = k as f64 - 0.5;
        SignedLog::exp(kh * lx - x - ln_gamma(kh + 1.0))
    }));
    compensated_sum(&terms).scale_exp(ln_gamma(h as f64 + 0.5))
}

/// `gamma(s, x) = e^-x x^s sum_k x^k / (s (s+1) ... (s+k))`
fn lower_series(s: f64, x: f64) -> SignedLog {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut comp = 0.0;
    for k in 1..MAX_TERMS {
        term *= x / (s + k as f64);
        let t = sum + term;
        comp += (sum - t) + term;
        sum = t;
        if term < SERIES_EPS * sum {
            break;
        }
    }
    SignedLog::exp((sum + comp).ln() - x + s * x.ln())
}

/// Modified Lentz evaluation of the continued fraction for `Gamma(s, x)`.
fn upper_continued_fraction(s: f64, x: f64) -> SignedLog {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    SignedLog::exp(h.ln() - x + s * x.ln())
}

/// Confluent hypergeometric limit function `0F1(; b; z) = sum_k z^k / ((b)_k k!)`.
///
/// Terms are accumulated in the log domain, so large `z` does not overflow.
pub fn hyp0f1(b: f64, z: f64) -> Result<SignedLog> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::arg(format!(
            "0F1 parameter must be positive, got {b}"
        )));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::arg(format!(
            "0F1 argument must be finite and nonnegative, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(SignedLog::ONE);
    }
    let lz = z.ln();
    let mut logs = vec![0.0_f64];
    let mut lt = 0.0_f64;
    let mut peak = 0.0_f64;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        lt += lz - (b + kf - 1.0).ln() - kf.ln();
        logs.push(lt);
        peak = peak.max(lt);
        // past the peak the ratio z / ((b+k-1) k) keeps shrinking
        let ratio = z / ((b + kf - 1.0) * kf);
        if ratio < 1.0 && lt < peak + SERIES_EPS.ln() {
            break;
        }
    }
    let terms: Vec<SignedLog> = logs.into_iter().map(SignedLog::exp).collect();
    Ok(compensated_sum(&terms))
}

/// Falling factorial `[a]_n = a (a-1) ... (a-n+1)`, with `[a]_0 = 1`.
pub fn falling_factorial(a: f64, n: usize) -> SignedLog {
    (0..n).fold(SignedLog::ONE, |acc, t| {
        acc * SignedLog::from_f64(a - t as f64)
    })
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta `I_x(a, b)` and its complement `1 - I_x(a, b)`
/// for positive integer `a`, `b`, by the finite binomial sums
/// `I_x(a, b) = sum_{j=a}^{a+b-1} C(a+b-1, j) x^j (1-x)^(a+b-1-j)`.
pub fn incomplete_beta_integer(a: usize, b: usize, x: f64) -> Result<(f64, f64)> {
    if a == 0 || b == 0 {
        return Err(Error::arg("incomplete beta parameters must be positive"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::arg(format!(
            "incomplete beta argument {x} outside [0, 1]"
        )));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x == 1.0 {
        return Ok((1.0, 0.0));
    }
    let top = a + b - 1;
    let (lx, l1x) = (x.ln(), (-x).ln_1p());
    let term = |j: usize| {
        SignedLog::exp(
            ln_factorial(top) - ln_factorial(j) - ln_factorial(top - j)
                + j as f64 * lx
                + (top - j) as f64 * l1x,
        )
    };
    let upper: Vec<SignedLog> = (a..=top).map(term).collect();
    let lower: Vec<SignedLog> = (0..a).map(term).collect();
    Ok((
        compensated_sum(&upper).to_f64(),
        compensated_sum(&lower).to_f64(),
    ))
}
