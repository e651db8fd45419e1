//! Datasets for the eleven reference figures: marginal densities of every
//! ordered eigenvalue (figures 1-5) and pair densities for M=4, n=5
//! (figures 6-11).

use std::fs::{self, File};
use std::io::{BufWriter, Write};

use log::info;
use ordeig::distributions::linspace;
use ordeig::{EigenDistribution, EnsembleModel, Statistic};

use crate::args::FigureArgs;
use crate::commands::{CliError, CliResult};

#[derive(Debug, Clone, Copy)]
pub enum Dataset {
    /// All marginal densities on one grid.
    Marginals { lo: f64, hi: f64 },
    /// Joint density of the pair on a square grid.
    Pair {
        l: usize,
        s: usize,
        lo: f64,
        hi: f64,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Figure {
    pub number: usize,
    pub spec: &'static str,
    pub dataset: Dataset,
}

const PAIR_SPEC: &str = "uncorrelated-wishart M=4 n=5";

pub const FIGURES: [Figure; 11] = [
    Figure {
        number: 1,
        spec: "uncorrelated-wishart M=4 n=5",
        dataset: Dataset::Marginals { lo: 0.0, hi: 30.0 },
    },
    Figure {
        number: 2,
        spec: "spiked-wishart M=4 n=5 sigma1=10 sigma2=1",
        dataset: Dataset::Marginals { lo: 0.0, hi: 150.0 },
    },
    Figure {
        number: 3,
        spec: "uncorrelated-wishart M=6 n=10",
        dataset: Dataset::Marginals { lo: 0.0, hi: 40.0 },
    },
    Figure {
        number: 4,
        spec: "spiked-wishart M=6 n=10 sigma1=10 sigma2=1",
        dataset: Dataset::Marginals { lo: 0.0, hi: 250.0 },
    },
    Figure {
        number: 5,
        spec: "gue M=6",
        dataset: Dataset::Marginals { lo: -5.0, hi: 5.0 },
    },
    Figure {
        number: 6,
        spec: PAIR_SPEC,
        dataset: Dataset::Pair {
            l: 1,
            s: 2,
            lo: 0.0,
            hi: 20.0,
        },
    },
    Figure {
        number: 7,
        spec: PAIR_SPEC,
        dataset: Dataset::Pair {
            l: 1,
            s: 3,
            lo: 0.0,
            hi: 20.0,
        },
    },
    Figure {
        number: 8,
        spec: PAIR_SPEC,
        dataset: Dataset::Pair {
            l: 1,
            s: 4,
            lo: 0.0,
            hi: 20.0,
        },
    },
    Figure {
        number: 9,
        spec: PAIR_SPEC,
        dataset: Dataset::Pair {
            l: 2,
            s: 3,
            lo: 0.0,
            hi: 20.0,
        },
    },
    Figure {
        number: 10,
        spec: PAIR_SPEC,
        dataset: Dataset::Pair {
            l: 2,
            s: 4,
            lo: 0.0,
            hi: 20.0,
        },
    },
    Figure {
        number: 11,
        spec: PAIR_SPEC,
        dataset: Dataset::Pair {
            l: 3,
            s: 4,
            lo: 0.0,
            hi: 20.0,
        },
    },
];

impl Figure {
    pub fn file_name(&self) -> String {
        format!("fig{:02}.csv", self.number)
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one figure; returns (statistic, indices, rows) for the manifest.
fn write_figure(
    fig: &Figure,
    args: &FigureArgs,
    w: &mut impl Write,
) -> CliResult<(String, Vec<usize>, usize)> {
    let model: EnsembleModel = fig.spec.parse()?;
    let d = EigenDistribution::new(&model)?;
    match fig.dataset {
        Dataset::Marginals { lo, hi } => {
            let grid = linspace(lo, hi, args.points);
            let curves = (1..=d.m())
                .map(|l| d.curve(Statistic::Pdf { index: l }, &grid))
                .collect::<ordeig::Result<Vec<_>>>()?;
            let indices: Vec<usize> = (1..=d.m()).collect();
            let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
            writeln!(
                w,
                "# ensemble={model} statistic=pdf indices={}",
                idx.join(",")
            )?;
            let cols: Vec<String> = indices.iter().map(|l| format!("value{l}")).collect();
            writeln!(w, "x,{}", cols.join(","))?;
            for (i, &x) in grid.iter().enumerate() {
                let row: Vec<String> = curves.iter().map(|c| fmt_value(c.values[i])).collect();
                writeln!(w, "{},{}", fmt_value(x), row.join(","))?;
            }
            Ok(("pdf".into(), indices, grid.len()))
        }
        Dataset::Pair { l, s, lo, hi } => {
            let grid = linspace(lo, hi, args.pair_points);
            let surface = d.pair_surface(l, s, &grid, &grid)?;
            surface.write_csv(&mut *w)?;
            Ok((surface.statistic.clone(), vec![l, s], surface.len()))
        }
    }
}

pub fn reproduce(args: &FigureArgs) -> CliResult {
    if args.points < 2 || args.pair_points < 2 {
        return Err(CliError::Usage("grid sizes must be at least 2".into()));
    }
    fs::create_dir_all(&args.output_dir)?;
    let mut manifest = BufWriter::new(File::create(args.output_dir.join("manifest.csv"))?);
    writeln!(manifest, "figure,file,ensemble,statistic,indices,rows")?;
    for fig in &FIGURES {
        let path = args.output_dir.join(fig.file_name());
        info!("writing {}", path.display());
        let mut w = BufWriter::new(File::create(&path)?);
        let (stat, indices, rows) = write_figure(fig, args, &mut w)?;
        w.flush()?;
        let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
        writeln!(
            manifest,
            "{},{},{},{stat},{},{rows}",
            fig.number,
            fig.file_name(),
            fig.spec,
            idx.join(" ")
        )?;
    }
    manifest.flush()?;
    println!(
        "wrote {} datasets to {}",
        FIGURES.len(),
        args.output_dir.display()
    );
    Ok(())
}
