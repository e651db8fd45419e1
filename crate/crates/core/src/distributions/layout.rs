use crate::error::{Error, Result};
use crate::pseudodet::GroupedPermutationPlan;
use crate::specfun::ln_factorial;

/// What slice `k < M` of the tensor holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    /// Point evaluation at a fixed abscissa.
    Point(f64),
    /// Integration over `(lo, hi)`.
    Segment(f64, f64),
}

/// Fixed eigenvalue positions `i_1 < ... < i_L` (1-based) with abscissae,
/// and the integration segment of every other position: position `k` with
/// `i_(e-1) < k < i_e` integrates over `(x_(i_e), x_(i_(e-1)))`, using the
/// support ends beyond the first and last fixed positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentLayout {
    m: usize,
    support: (f64, f64),
    indices: Vec<usize>,
    xs: Vec<f64>,
}

impl SegmentLayout {
    pub fn new(m: usize, support: (f64, f64), indices: &[usize], xs: &[f64]) -> Result<Self> {
        if indices.len() != xs.len() {
            return Err(Error::arg(format!(
                "{} indices but {} abscissae",
                indices.len(),
                xs.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > m) {
            return Err(Error::arg(format!(
                "eigenvalue index {bad} outside 1..={m}"
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("eigenvalue indices must be strictly increasing"));
        }
        if xs.iter().any(|x| x.is_nan()) {
            return Err(Error::arg("NaN abscissa"));
        }
        Ok(Self {
            m,
            support,
            indices: indices.to_vec(),
            xs: xs.to_vec(),
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.xs
    }

    /// Whether the abscissae are nonincreasing and inside the support; the
    /// density vanishes otherwise.
    pub fn is_admissible(&self) -> bool {
        let (lo, hi) = self.support;
        self.xs.windows(2).all(|w| w[0] >= w[1]) && self.xs.iter().all(|&x| x >= lo && x <= hi)
    }

    /// Slot of the 0-based position `k < M`.
    pub fn slot(&self, k: usize) -> Slot {
        let pos = k + 1;
        match self.indices.binary_search(&pos) {
            Ok(r) => Slot::Point(self.xs[r]),
            Err(r) => {
                let hi = if r == 0 {
                    self.support.1
                } else {
                    self.xs[r - 1]
                };
                let lo = self.xs.get(r).copied().unwrap_or(self.support.0);
                Slot::Segment(lo, hi)
            }
        }
    }

    /// `ln c(i_1, ..., i_L) = -sum ln (i_l - i_(l-1) - 1)!` with `i_0 = 0` and
    /// `i_(L+1) = M + 1`.
    pub fn ln_constant(&self) -> f64 {
        let mut prev = 0;
        let mut acc = 0.0;
        for &i in self.indices.iter().chain(std::iter::once(&(self.m + 1))) {
            acc -= ln_factorial(i - prev - 1);
            prev = i;
        }
        acc
    }

    /// Blocks of consecutive positions sharing a segment, the fixed positions
    /// as singletons, and the `N - M` constant slices as residual.
    pub fn plan(&self, n: usize) -> Result<GroupedPermutationPlan> {
        let mut sizes = Vec::with_capacity(2 * self.indices.len() + 1);
        let mut prev = 0;
        for &i in &self.indices {
            sizes.push(i - prev - 1);
            sizes.push(1);
            prev = i;
        }
        sizes.push(self.m - prev);
        GroupedPermutationPlan::new(sizes, n)
    }
}
