use std::io::{self, Write};

use rayon::prelude::*;

use super::EigenDistribution;
use crate::error::{Error, Result};

/// Statistic evaluated pointwise by [`EigenDistribution::curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// Density of the `index`-th largest eigenvalue.
    Pdf { index: usize },
    /// CDF of the `index`-th largest eigenvalue.
    Cdf { index: usize },
    /// Density of one unordered eigenvalue.
    UnorderedPdf,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Pdf { .. } => "pdf",
            Statistic::Cdf { .. } => "cdf",
            Statistic::UnorderedPdf => "unordered-pdf",
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Statistic::Pdf { index } | Statistic::Cdf { index } => vec![index],
            Statistic::UnorderedPdf => vec![],
        }
    }
}

/// Values of a statistic over a grid, one or two abscissae per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveGrid {
    pub ensemble: String,
    pub statistic: String,
    pub indices: Vec<usize>,
    pub x: Vec<f64>,
    /// Second abscissa for surfaces.
    pub y: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

impl CurveGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn header(&self) -> String {
        let idx = self
            .indices
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "# ensemble={} statistic={} indices={}",
            self.ensemble, self.statistic, idx
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header())?;
        match &self.y {
            None => {
                writeln!(out, "x,value")?;
                for (x, v) in self.x.iter().zip(&self.values) {
                    writeln!(out, "{x:.16e},{v:.16e}")?;
                }
            }
            Some(y) => {
                writeln!(out, "x,y,value")?;
                for ((x, y), v) in self.x.iter().zip(y).zip(&self.values) {
                    writeln!(out, "{x:.16e},{y:.16e},{v:.16e}")?;
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Inclusive grid of `count` points from `lo` to `hi`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        hi
                    } else {
                        lo + step * i as f64
                    }
                })
                .collect()
        }
    }
}

impl EigenDistribution {
    /// Evaluates `stat` at every grid point (sorted ascending), in parallel.
    pub fn curve(&self, stat: Statistic, grid: &[f64]) -> Result<CurveGrid> {
        if grid.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::arg("curve grid must be sorted ascending"));
        }
        let values = grid
            .par_iter()
            .map(|&x| match stat {
                Statistic::Pdf { index } => self.pdf_single(index, x),
                Statistic::Cdf { index } => self.cdf_single(index, x),
                Statistic::UnorderedPdf => self.joint_pdf_unordered(&[x]),
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::numeric(format!(
                "non-finite value at x = {}",
                grid[bad]
            )));
        }
        Ok(CurveGrid {
            ensemble: self.model().to_string(),
            statistic: stat.name().to_string(),
            indices: stat.indices(),
            x: grid.to_vec(),
            y: None,
            values,
        })
    }

    /// Probability of the `l`-th largest eigenvalue per bin, integrating the
    /// marginal density. The end bins extend to the support ends, matching
    /// the clamping of [`crate::oracle::empirical_histogram`]; `x` holds the
    /// lower edges.
    pub fn bin_masses(&self, l: usize, edges: &[f64]) -> Result<CurveGrid> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::arg("bin edges must be increasing, at least two"));
        }
        let (lo, hi) = self.support();
        let bins = edges.len() - 1;
        let values = (0..bins)
            .into_par_iter()
            .map(|b| {
                let a = if b == 0 { lo } else { edges[b] };
                let c = if b + 1 == bins { hi } else { edges[b + 1] };
                self.prob_single_in(l, a, c)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(CurveGrid {
            ensemble: self.model().to_string(),
            statistic: "bin-mass".into(),
            indices: vec![l],
            x: edges[..bins].to_vec(),
            y: None,
            values,
        })
    }

    /// Pair density `f(x_l, x_s)` over the rectangular grid `xl x xs`,
    /// row-major in `xl`.
    pub fn pair_surface(&self, l: usize, s: usize, xl: &[f64], xs: &[f64]) -> Result<CurveGrid> {
        let points: Vec<(f64, f64)> = xl
            .iter()
            .flat_map(|&a| xs.iter().map(move |&b| (a, b)))
            .collect();
        let values = points
            .par_iter()
            .map(|&(a, b)| self.pdf_pair(l, s, a, b))
            .collect::<Result<Vec<f64>>>()?;
        Ok(CurveGrid {
            ensemble: self.model().to_string(),
            statistic: "pair-pdf".into(),
            indices: vec![l, s],
            x: points.iter().map(|p| p.0).collect(),
            y: Some(points.iter().map(|p| p.1).collect()),
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EnsembleModel;

    #[test]
    fn linspace_inclusive() {
        let g = linspace(0.0, 20.0, 400);
        assert_eq!(g.len(), 400);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[399], 20.0);
    }

    #[test]
    fn csv_layout() {
        let d =
            EigenDistribution::new(&EnsembleModel::UncorrelatedWishart { dim: 1, n: 1 }).unwrap();
        let c = d.curve(Statistic::Pdf { index: 1 }, &[0.0, 1.0]).unwrap();
        let text = c.to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "# ensemble=uncorrelated-wishart M=1 n=1 statistic=pdf indices=1"
        );
        assert_eq!(lines[1], "x,value");
        assert_eq!(lines[2], "0.0000000000000000e0,1.0000000000000000e0");
        assert_eq!(lines.len(), 4);
    }
}
