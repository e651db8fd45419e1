use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ordeig",
    version,
    about = "Exact eigenvalue distributions of finite complex random matrices"
)]
pub struct Cli {
    /// Worker threads for grid evaluation and sampling (0 = all cores).
    #[arg(long, global = true, env = "ORDEIG_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Marginal density of the l-th largest eigenvalue over a grid.
    Pdf(IndexedGridArgs),
    /// Joint density of several ordered eigenvalues; a rectangular grid for
    /// pairs, a single point otherwise.
    JointPdf(JointArgs),
    /// CDF of the l-th largest eigenvalue over a grid.
    Cdf(IndexedGridArgs),
    /// Probability that every eigenvalue lies in [a, b].
    ProbInterval(IntervalArgs),
    /// Moments of an ordered eigenvalue, or of an unordered one without --index.
    Moments(MomentArgs),
    /// Moment generating function E[exp(nu lambda)].
    Mgf(MgfArgs),
    /// Density of one unordered eigenvalue over a grid.
    UnorderedPdf(GridArgs),
    /// Compare marginal CDFs against a seeded Monte Carlo run.
    McCheck(McArgs),
    /// Write the datasets behind the eleven reference figures.
    ReproduceFigures(FigureArgs),
}

/// Ensemble selection, either as separate flags or as one spec string.
#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    /// uncorrelated-wishart, correlated-wishart, spiked-wishart,
    /// noncentral-wishart, gue or beta.
    #[arg(long, required_unless_present = "spec")]
    pub ensemble: Option<String>,
    /// Full spec, e.g. "spiked-wishart M=4 n=5 sigma1=10 sigma2=1".
    #[arg(long, conflicts_with = "ensemble")]
    pub spec: Option<String>,
    /// Matrix dimension.
    #[arg(long = "M")]
    pub dim: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Rows of the correlated Wishart factor.
    #[arg(long)]
    pub p: Option<usize>,
    /// Distinct inverse covariance eigenvalues, comma separated.
    #[arg(long)]
    pub phi: Option<String>,
    /// Multiplicities of the phi values, comma separated.
    #[arg(long)]
    pub mult: Option<String>,
    #[arg(long)]
    pub sigma1: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Nonzero eigenvalues of the noncentrality matrix, comma separated.
    #[arg(long)]
    pub mu: Option<String>,
    /// Beta ensemble second parameter.
    #[arg(long = "m")]
    pub beta_m: Option<usize>,
}

impl EnsembleArgs {
    /// Assembles the textual spec understood by the core parser.
    pub fn spec_string(&self) -> String {
        if let Some(s) = &self.spec {
            return s.clone();
        }
        let mut parts = vec![self.ensemble.clone().unwrap_or_default()];
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                parts.push(format!("{key}={v}"));
            }
        };
        push("M", self.dim.map(|v| v.to_string()));
        push("n", self.n.map(|v| v.to_string()));
        push("p", self.p.map(|v| v.to_string()));
        push("phi", self.phi.clone());
        push("mult", self.mult.clone());
        push("sigma1", self.sigma1.map(|v| v.to_string()));
        push("sigma2", self.sigma2.map(|v| v.to_string()));
        push("mu", self.mu.clone());
        push("m", self.beta_m.map(|v| v.to_string()));
        parts.join(" ")
    }
}

/// `lo:hi:count`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("grid must be lo:hi:count, got {s:?}"));
        };
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad grid lower bound {lo:?}"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad grid upper bound {hi:?}"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("bad grid size {count:?}"))?;
        if count < 2 {
            return Err(format!("grid size must be at least 2, got {count}"));
        }
        if !(lo < hi) {
            return Err(format!("grid needs lo < hi, got {lo}:{hi}"));
        }
        Ok(GridSpec { lo, hi, count })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Evaluation grid lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: GridSpec,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IndexedGridArgs {
    /// 1-based index of the ordered eigenvalue (1 = largest).
    #[arg(long)]
    pub index: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct JointArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Increasing 1-based indices, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub indices: Vec<usize>,
    /// Grid of the first eigenvalue of a pair.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Grid of the second eigenvalue of a pair; defaults to --grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid2: Option<GridSpec>,
    /// Single evaluation point, one abscissa per index.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "grid"
    )]
    pub point: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IntervalArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Ordered eigenvalue; omit for an unordered eigenvalue.
    #[arg(long)]
    pub index: Option<usize>,
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub orders: Vec<u32>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MgfArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Ordered eigenvalue; omit for an unordered eigenvalue.
    #[arg(long)]
    pub index: Option<usize>,
    /// Arguments of the MGF, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub nu: Vec<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Ordered eigenvalue to check; every index when absent.
    #[arg(long)]
    pub index: Option<usize>,
    /// Comparison grid; sample quantiles at 5% steps when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// Directory receiving fig01.csv .. fig11.csv and manifest.csv.
    #[arg(long, default_value = "figures")]
    pub output_dir: PathBuf,
    /// Points per marginal density curve.
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Points per axis of the pair density surfaces.
    #[arg(long, default_value_t = 60)]
    pub pair_points: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        let g: GridSpec = "-4:4:9".parse().unwrap();
        assert_eq!(
            g,
            GridSpec {
                lo: -4.0,
                hi: 4.0,
                count: 9
            }
        );
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("0:1:1".parse::<GridSpec>().is_err());
        assert!("2:1:5".parse::<GridSpec>().is_err());
        assert!("a:1:5".parse::<GridSpec>().is_err());
    }

    #[test]
    fn flags_become_spec() {
        let cli = Cli::try_parse_from([
            "ordeig",
            "pdf",
            "--ensemble",
            "spiked-wishart",
            "--M",
            "4",
            "--n",
            "5",
            "--sigma1",
            "10",
            "--sigma2",
            "1",
            "--index",
            "1",
            "--grid",
            "0:20:5",
        ])
        .unwrap();
        let Command::Pdf(a) = cli.command else {
            panic!()
        };
        assert_eq!(
            a.grid.ensemble.spec_string(),
            "spiked-wishart M=4 n=5 sigma1=10 sigma2=1"
        );
    }

    #[test]
    fn beta_m_and_dimension_are_distinct_flags() {
        let cli = Cli::try_parse_from([
            "ordeig",
            "prob-interval",
            "--ensemble",
            "beta",
            "--M",
            "3",
            "--m",
            "1",
            "--n",
            "2",
            "--a",
            "0",
            "--b",
            "0.5",
        ])
        .unwrap();
        let Command::ProbInterval(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.ensemble.spec_string(), "beta M=3 n=2 m=1");
    }
}
