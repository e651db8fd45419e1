//! Dense complex Hermitian linear algebra for the sampler: cyclic Jacobi
//! eigenvalues, Cholesky factorization and triangular solves.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// `G G^H` for a row-major `rows x cols` matrix `g`.
    pub fn gram(g: &[Complex64], rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, |i, j| {
            (0..cols)
                .map(|k| g[i * cols + k] * g[j * cols + k].conj())
                .sum()
        })
    }

    /// `G^H G` for a row-major `rows x cols` matrix `g`.
    pub fn cogram(g: &[Complex64], rows: usize, cols: usize) -> Self {
        Self::from_fn(cols, |i, j| {
            (0..rows)
                .map(|k| g[k * cols + i].conj() * g[k * cols + j])
                .sum()
        })
    }

    fn off_norm2(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s
    }

    /// Lower Cholesky factor `L` with `self = L L^H`.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self.get(j, j).re;
            for k in 0..j {
                d -= l.get(j, k).norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::numeric("matrix is not positive definite"));
            }
            let d = d.sqrt();
            l.set(j, j, Complex64::new(d, 0.0));
            for i in j + 1..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l.get(i, k) * l.get(j, k).conj();
                }
                l.set(i, j, v / d);
            }
        }
        Ok(l)
    }

    /// `L^-1 B` for lower-triangular `self = L`.
    pub fn forward_solve(&self, b: &Self) -> Self {
        let n = self.n;
        let mut y = b.clone();
        for c in 0..n {
            for i in 0..n {
                let mut v = y.get(i, c);
                for k in 0..i {
                    v -= self.get(i, k) * y.get(k, c);
                }
                y.set(i, c, v / self.get(i, i));
            }
        }
        y
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }
}

/// Eigenvalues of a Hermitian matrix, sorted descending, by cyclic Jacobi
/// sweeps. Each rotation first removes the phase of the pivot element and then
/// applies a real plane rotation.
pub fn hermitian_eigenvalues(mut a: CMatrix) -> Vec<f64> {
    let n = a.dim();
    // enforce exact Hermitian symmetry
    for i in 0..n {
        let d = a.get(i, i).re;
        a.set(i, i, Complex64::new(d, 0.0));
        for j in 0..i {
            let v = 0.5 * (a.get(i, j) + a.get(j, i).conj());
            a.set(i, j, v);
            a.set(j, i, v.conj());
        }
    }
    let total: f64 = a.data.iter().map(|z| z.norm_sqr()).sum();
    let target = 1e-30 * total;
    for _ in 0..100 {
        if a.off_norm2() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn rotate(a: &mut CMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    // phase: column q times e^{-i theta}, row q times e^{i theta}
    let phase = apq / r;
    for k in 0..n {
        if k != q {
            let v = a.get(k, q) * phase.conj();
            a.set(k, q, v);
            a.set(q, k, v.conj());
        }
    }
    let (app, aqq) = (a.get(p, p).re, a.get(q, q).re);
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        if k != p && k != q {
            let (akp, akq) = (a.get(k, p), a.get(k, q));
            let np = akp * c - akq * s;
            let nq = akp * s + akq * c;
            a.set(k, p, np);
            a.set(p, k, np.conj());
            a.set(k, q, nq);
            a.set(q, k, nq.conj());
        }
    }
    a.set(p, p, Complex64::new(app - t * r, 0.0));
    a.set(q, q, Complex64::new(aqq + t * r, 0.0));
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
}
