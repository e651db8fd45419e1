//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

/// All permutations of `0..n` with their signs, by recursive insertion.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // inserting n-1 at position i adds (n-1-i) inversions
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            let sign = if (n - 1 - i).is_multiple_of(2) { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Double-permutation sum `sum_mu sum_alpha sgn(mu) sgn(alpha) prod_k a(mu_k, alpha_k, k)`.
pub fn brute_pseudo_det(n: usize, a: impl Fn(usize, usize, usize) -> f64) -> f64 {
    let perms = permutations(n);
    let mut total = 0.0;
    for (mu, smu) in &perms {
        for (al, sal) in &perms {
            let prod: f64 = (0..n).map(|k| a(mu[k], al[k], k)).product();
            total += smu * sal * prod;
        }
    }
    total
}

/// Determinant by cofactor expansion.
pub fn det(m: &[Vec<f64>]) -> f64 {
    permutations(m.len())
        .iter()
        .map(|(p, s)| s * p.iter().enumerate().map(|(r, &c)| m[r][c]).product::<f64>())
        .sum()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, x);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * x * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let d = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                ws[i] = 2.0 / ((1.0 - x * x) * d * d);
                break;
            }
        }
        xs[i] = x;
    }
    (xs, ws)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels.
pub fn gl_rule(a: f64, b: f64, order: usize, panels: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let (lo, hi) = (a + h * p as f64, a + h * (p + 1) as f64);
        for (x, w) in xs.iter().zip(&ws) {
            out.push((0.5 * (lo + hi) + 0.5 * (hi - lo) * x, 0.5 * (hi - lo) * w));
        }
    }
    out
}

/// `int_a^b f` with a 20-point composite rule; `b` may be infinite through
/// `x = a + t/(1-t)`.
pub fn gl_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b.is_infinite() {
        gl_rule(0.0, 1.0, 20, panels)
            .iter()
            .map(|&(t, w)| {
                let u = 1.0 - t;
                w * f(a + t / u) / (u * u)
            })
            .sum()
    } else {
        gl_rule(a, b, 20, panels)
            .iter()
            .map(|&(x, w)| w * f(x))
            .sum()
    }
}

/// `0F1(; b; z)` by direct summation of its series.
pub fn hyp0f1_series(b: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for k in 0..2000 {
        let k = k as f64;
        term *= z / ((b + k) * (k + 1.0));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
