//! Shared fixtures for the benchmarks.

use ordeig::{SignedLog, Tensor3};

/// Deterministic tensor whose slices are constant over each block of
/// `sizes`, remaining slices all distinct.
pub fn layered_tensor(n: usize, sizes: &[usize]) -> Tensor3 {
    let mut slice_of = Vec::with_capacity(n);
    for (b, &s) in sizes.iter().enumerate() {
        slice_of.extend(std::iter::repeat_n(b, s));
    }
    while slice_of.len() < n {
        slice_of.push(sizes.len() + slice_of.len());
    }
    Tensor3::from_fn(n, |i, j, k| {
        let s = slice_of[k] as f64;
        SignedLog::from_f64((1.3 * i as f64 + 0.7 * j as f64 + 2.1 * s).sin() + 0.1)
    })
}

/// Block sizes of the single-eigenvalue layout for index `l` of `n`.
pub fn single_layout(n: usize, l: usize) -> Vec<usize> {
    vec![l - 1, 1, n - l]
}

pub const FIGURE_MODELS: [&str; 5] = [
    "uncorrelated-wishart M=4 n=5",
    "spiked-wishart M=4 n=5 sigma1=10 sigma2=1",
    "uncorrelated-wishart M=6 n=10",
    "spiked-wishart M=6 n=10 sigma1=10 sigma2=1",
    "gue M=6",
];
