//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! Infinite ends are mapped onto finite parameter intervals with
//! `x = a + t / (1 - t)`; the nodes never touch the singular endpoint.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy, Debug)]
enum Map {
    Finite,
    /// `x = origin + t / (1 - t)`, `t` in `[0, 1)`
    Upper(f64),
    /// `x = origin - t / (1 - t)`
    Lower(f64),
}

impl Map {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Finite => (t, 1.0),
            Map::Upper(o) => {
                let u = 1.0 - t;
                (o + t / u, 1.0 / (u * u))
            }
            Map::Lower(o) => {
                let u = 1.0 - t;
                (o - t / u, 1.0 / (u * u))
            }
        }
    }
}

struct Panel {
    map: Map,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, map: Map, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut eval = |t: f64| {
        let (x, jac) = map.apply(t);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            f64::NAN
        }
    };
    let fc = eval(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = eval(c - dx) + eval(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    (value, error)
}

/// Integrates `f` over `(a, b)`, either end possibly infinite.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    integrate_with_breaks(f, a, b, &[], opts)
}

/// As [`integrate`], seeding the adaptive search with panels split at `breaks`
/// (points outside `(a, b)` are ignored). Swapped limits negate the result.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::arg("NaN integration limit"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let r = integrate_with_breaks(f, b, a, breaks, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }

    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    if a == f64::NEG_INFINITY && b == f64::INFINITY && points.is_empty() {
        points.push(0.0);
    }
    let mut edges = vec![a];
    edges.extend(points);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (map, tlo, thi) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (Map::Finite, lo, hi),
            (true, false) => (Map::Upper(lo), 0.0, 1.0),
            // x = hi - t/(1-t) runs from hi down to -inf; the orientation flip
            // cancels the negative Jacobian
            (false, true) => (Map::Lower(hi), 0.0, 1.0),
            (false, false) => unreachable!("split at a finite point above"),
        };
        let (value, error) = kronrod(&mut f, map, tlo, thi);
        heap.push(Panel {
            map,
            lo: tlo,
            hi: thi,
            value,
            error,
        });
    }

    loop {
        let (total, err) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if total.is_nan() || err.is_nan() {
            return Err(Error::numeric("non-finite integrand value"));
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol {
            return Ok(QuadResult {
                value: total,
                error: err,
                intervals: heap.len(),
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::numeric(format!(
                "quadrature did not converge: estimate {total}, error {err} > {tol} after {} panels",
                heap.len()
            )));
        }
        let panel = heap.pop().expect("at least one panel");
        let mid = 0.5 * (panel.lo + panel.hi);
        if mid <= panel.lo || mid >= panel.hi {
            return Err(Error::numeric(
                "quadrature panel collapsed below machine resolution",
            ));
        }
        for (lo, hi) in [(panel.lo, mid), (mid, panel.hi)] {
            let (value, error) = kronrod(&mut f, panel.map, lo, hi);
            heap.push(Panel {
                map: panel.map,
                lo,
                hi,
                value,
                error,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x| x.powi(7) - 3.0 * x * x,
            -1.0,
            2.0,
            QuadOptions::default(),
        )
        .unwrap();
        let exact = (256.0 - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-12);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn semi_infinite_and_reversed() {
        let r = integrate(|x| (-x).exp(), 0.0, f64::INFINITY, QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate(|x| x.exp(), f64::NEG_INFINITY, 0.0, QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate(|x| (-x).exp(), 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((r.value + (1.0 - (-1.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn gaussian_whole_line() {
        let r = integrate(
            |x| (-x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let r = integrate_with_breaks(
            |x| (-(x - 40.0) * (x - 40.0)).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &[35.0, 45.0],
            QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn nan_integrand_is_numeric_error() {
        let r = integrate(|_| f64::NAN, 0.0, 1.0, QuadOptions::default());
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}
