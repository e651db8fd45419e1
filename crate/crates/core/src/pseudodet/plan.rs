use std::ops::Range;

use crate::error::{Error, Result};

/// Partition of the slice positions `0..N` into consecutive blocks whose
/// tensor slices are identical, followed by `residual` singleton positions.
///
/// Permuting the `mu` values inside one block permutes rows of the
/// corresponding matrix and flips `sgn(mu)` by the same parity, so each block
/// of size `s` contributes the factor `s!` and only the representatives with
/// increasing `mu` inside every block are enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedPermutationPlan {
    sizes: Vec<usize>,
    residual: usize,
}

impl GroupedPermutationPlan {
    /// Zero-sized blocks are dropped.
    pub fn new(sizes: impl IntoIterator<Item = usize>, dimension: usize) -> Result<Self> {
        let sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
        let covered: usize = sizes.iter().sum();
        if covered > dimension {
            return Err(Error::InvalidPlan(format!(
                "block sizes sum to {covered}, exceeding dimension {dimension}"
            )));
        }
        Ok(Self {
            sizes,
            residual: dimension - covered,
        })
    }

    /// Every position its own block: the plain `N!` enumeration.
    pub fn naive(dimension: usize) -> Self {
        Self {
            sizes: Vec::new(),
            residual: dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.sizes.iter().sum::<usize>() + self.residual
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn residual(&self) -> usize {
        self.residual
    }

    /// Position ranges of all blocks, singletons included.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(self.sizes.len() + self.residual);
        let mut start = 0;
        for &s in self
            .sizes
            .iter()
            .chain(std::iter::repeat_n(&1, self.residual))
        {
            out.push(start..start + s);
            start += s;
        }
        out
    }

    /// Number of representative permutations, `N! / prod(s!)`.
    pub fn representative_count(&self) -> u128 {
        let n = self.dimension();
        let mut count = factorial(n);
        for &s in &self.sizes {
            count /= factorial(s);
        }
        count
    }

    /// Weight applied to every representative, `prod(s!)`.
    pub fn multiplicity(&self) -> u128 {
        self.sizes.iter().map(|&s| factorial(s)).product()
    }

    pub(crate) fn labels(&self) -> Vec<u8> {
        self.blocks()
            .iter()
            .enumerate()
            .flat_map(|(g, r)| std::iter::repeat_n(g as u8, r.len()))
            .collect()
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Yields permutations of `0..n` paired with their signs.
pub(crate) trait PermutationSource {
    /// Writes the next permutation into `out` and returns its sign.
    fn next_into(&mut self, out: &mut [u8]) -> Option<i8>;
}

/// Lexicographic enumeration of all `n!` permutations with the sign updated
/// from the swap and suffix reversal of each step.
pub(crate) struct Lexicographic {
    perm: Vec<u8>,
    sign: i8,
    state: LexState,
}

#[derive(PartialEq)]
enum LexState {
    Fresh,
    Running,
    Done,
}

impl Lexicographic {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            perm: (0..n as u8).collect(),
            sign: 1,
            state: LexState::Fresh,
        }
    }
}

impl PermutationSource for Lexicographic {
    fn next_into(&mut self, out: &mut [u8]) -> Option<i8> {
        match self.state {
            LexState::Done => return None,
            LexState::Fresh => self.state = LexState::Running,
            LexState::Running => {
                let p = &mut self.perm;
                let n = p.len();
                let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
                    self.state = LexState::Done;
                    return None;
                };
                let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
                p.swap(i, j);
                p[i + 1..].reverse();
                let swaps = 1 + (n - i - 1) / 2;
                if swaps % 2 == 1 {
                    self.sign = -self.sign;
                }
            }
        }
        out.copy_from_slice(&self.perm);
        Some(self.sign)
    }
}

/// Representatives of a grouped plan: lexicographic walk over the multiset
/// permutations of block labels assigned to values, expanded to `mu` with
/// increasing values inside each block.
pub(crate) struct GroupedRepresentatives {
    labels: Vec<u8>,
    block_starts: Vec<usize>,
    fill: Vec<usize>,
    started: bool,
    done: bool,
}

impl GroupedRepresentatives {
    pub(crate) fn new(plan: &GroupedPermutationPlan) -> Self {
        let block_starts = plan.blocks().iter().map(|r| r.start).collect::<Vec<_>>();
        Self {
            labels: plan.labels(),
            fill: vec![0; block_starts.len()],
            block_starts,
            started: false,
            done: plan.dimension() == 0,
        }
    }

    fn advance(&mut self) -> bool {
        let l = &mut self.labels;
        let n = l.len();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| l[i] < l[i + 1]) else {
            return false;
        };
        let j = (i + 1..n).rev().find(|&j| l[j] > l[i]).unwrap();
        l.swap(i, j);
        l[i + 1..].reverse();
        true
    }
}

impl PermutationSource for GroupedRepresentatives {
    fn next_into(&mut self, out: &mut [u8]) -> Option<i8> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        self.fill.iter_mut().for_each(|f| *f = 0);
        for (value, &g) in self.labels.iter().enumerate() {
            let g = g as usize;
            out[self.block_starts[g] + self.fill[g]] = value as u8;
            self.fill[g] += 1;
        }
        Some(permutation_sign(out))
    }
}

pub(crate) fn permutation_sign(p: &[u8]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}
