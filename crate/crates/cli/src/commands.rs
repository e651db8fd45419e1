use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use log::{info, warn};
use ordeig::distributions::linspace;
use ordeig::oracle::{compare, empirical_cdf, sample};
use ordeig::{CurveGrid, EigenDistribution, EnsembleModel, ScalarFn, Statistic};

use crate::args::{
    EnsembleArgs, GridArgs, GridSpec, IndexedGridArgs, IntervalArgs, JointArgs, McArgs, MgfArgs,
    MomentArgs, OutputArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(ordeig::Error),
    CheckFailed(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ordeig::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Capability(_)) => 3,
            CliError::Core(E::Numeric(_) | E::NonFiniteElement { .. }) => 4,
            CliError::Core(_) => 2,
            CliError::CheckFailed(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::CheckFailed(m) => write!(f, "check failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ordeig::Error> for CliError {
    fn from(e: ordeig::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn parse_model(args: &EnsembleArgs) -> CliResult<EnsembleModel> {
    Ok(EnsembleModel::parse_spec(&args.spec_string())?)
}

pub fn load(args: &EnsembleArgs) -> CliResult<EigenDistribution> {
    let model = parse_model(args)?;
    let d = EigenDistribution::new(&model)?;
    for w in d.kernel().warnings() {
        warn!("{w}");
    }
    info!("loaded {model}");
    Ok(d)
}

pub fn sink(out: &OutputArgs) -> CliResult<Box<dyn Write>> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Grid points, refusing bounds outside the support.
pub fn grid_points(d: &EigenDistribution, g: &GridSpec) -> CliResult<Vec<f64>> {
    let (lo, hi) = d.support();
    if g.lo < lo || g.hi > hi {
        return Err(CliError::Usage(format!(
            "grid {}:{} leaves the support [{lo}, {hi}] of {}",
            g.lo,
            g.hi,
            d.model()
        )));
    }
    Ok(linspace(g.lo, g.hi, g.count))
}

fn write_curve(curve: &CurveGrid, out: &OutputArgs) -> CliResult {
    let mut w = sink(out)?;
    curve.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn header(d: &EigenDistribution, statistic: &str, indices: &[usize]) -> String {
    let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    format!(
        "# ensemble={} statistic={statistic} indices={}",
        d.model(),
        idx.join(",")
    )
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn curve(args: &IndexedGridArgs, stat: Statistic) -> CliResult {
    let d = load(&args.grid.ensemble)?;
    let grid = grid_points(&d, &args.grid.grid)?;
    write_curve(&d.curve(stat, &grid)?, &args.grid.out)
}

pub fn unordered_pdf(args: &GridArgs) -> CliResult {
    let d = load(&args.ensemble)?;
    let grid = grid_points(&d, &args.grid)?;
    write_curve(&d.curve(Statistic::UnorderedPdf, &grid)?, &args.out)
}

pub fn joint_pdf(args: &JointArgs) -> CliResult {
    let d = load(&args.ensemble)?;
    let idx = &args.indices;
    if let Some(point) = &args.point {
        if point.len() != idx.len() {
            return Err(CliError::Usage(format!(
                "{} indices but {} point coordinates",
                idx.len(),
                point.len()
            )));
        }
        let v = d.joint_pdf_ordered(idx, point)?;
        let mut w = sink(&args.out)?;
        writeln!(w, "{}", header(&d, "joint-pdf", idx))?;
        let cols: Vec<String> = (1..=idx.len()).map(|k| format!("x{k}")).collect();
        writeln!(w, "{},value", cols.join(","))?;
        let row: Vec<String> = point.iter().map(|&x| fmt_value(x)).collect();
        writeln!(w, "{},{}", row.join(","), fmt_value(v))?;
        w.flush()?;
        return Ok(());
    }
    let [l, s] = idx[..] else {
        return Err(CliError::Usage(
            "grids are supported for pairs only; use --point for larger index sets".into(),
        ));
    };
    let Some(g1) = &args.grid else {
        return Err(CliError::Usage(
            "pair densities need --grid (and optionally --grid2) or --point".into(),
        ));
    };
    let xl = grid_points(&d, g1)?;
    let xs = grid_points(&d, args.grid2.as_ref().unwrap_or(g1))?;
    write_curve(&d.pair_surface(l, s, &xl, &xs)?, &args.out)
}

pub fn prob_interval(args: &IntervalArgs) -> CliResult {
    let d = load(&args.ensemble)?;
    if !(args.a <= args.b) {
        return Err(CliError::Usage(format!(
            "need a <= b, got a={} b={}",
            args.a, args.b
        )));
    }
    let p = d.prob_all_in(args.a, args.b)?;
    let mut w = sink(&args.out)?;
    writeln!(w, "{}", header(&d, "prob-interval", &[]))?;
    writeln!(w, "a,b,value")?;
    writeln!(
        w,
        "{},{},{}",
        fmt_value(args.a),
        fmt_value(args.b),
        fmt_value(p)
    )?;
    w.flush()?;
    Ok(())
}

fn expectation(d: &EigenDistribution, index: Option<usize>, f: ScalarFn) -> CliResult<f64> {
    Ok(match index {
        Some(l) => d.expect_single(l, &f)?,
        None => d.expect_product_unordered(&[f])?,
    })
}

pub fn moments(args: &MomentArgs) -> CliResult {
    let d = load(&args.ensemble)?;
    let mut rows = Vec::with_capacity(args.orders.len());
    for &k in &args.orders {
        let f = if k == 0 {
            ScalarFn::One
        } else {
            ScalarFn::Power(k)
        };
        rows.push((k, expectation(&d, args.index, f)?));
    }
    let stat = if args.index.is_some() {
        "moments"
    } else {
        "unordered-moments"
    };
    let mut w = sink(&args.out)?;
    writeln!(w, "{}", header(&d, stat, args.index.as_slice()))?;
    writeln!(w, "order,value")?;
    for (k, v) in rows {
        writeln!(w, "{k},{}", fmt_value(v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn mgf(args: &MgfArgs) -> CliResult {
    let d = load(&args.ensemble)?;
    let mut rows = Vec::with_capacity(args.nu.len());
    for &nu in &args.nu {
        rows.push((nu, expectation(&d, args.index, ScalarFn::Exp(nu))?));
    }
    let stat = if args.index.is_some() {
        "mgf"
    } else {
        "unordered-mgf"
    };
    let mut w = sink(&args.out)?;
    writeln!(w, "{}", header(&d, stat, args.index.as_slice()))?;
    writeln!(w, "nu,value")?;
    for (nu, v) in rows {
        writeln!(w, "{},{}", fmt_value(nu), fmt_value(v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn mc_check(args: &McArgs) -> CliResult {
    let d = load(&args.ensemble)?;
    let indices: Vec<usize> = match args.index {
        Some(l) => vec![l],
        None => (1..=d.m()).collect(),
    };
    info!("sampling {} matrices with seed {}", args.samples, args.seed);
    let batch = sample(d.model(), args.samples, args.seed)?;
    let fixed = args.grid.as_ref().map(|g| grid_points(&d, g)).transpose()?;
    let mut csv = args
        .out
        .output
        .as_deref()
        .map(|p: &Path| -> CliResult<BufWriter<File>> { Ok(BufWriter::new(File::create(p)?)) })
        .transpose()?;
    if let Some(w) = csv.as_mut() {
        writeln!(w, "{}", header(&d, "mc-check", &indices))?;
        writeln!(w, "index,x,analytic,empirical,stderr")?;
    }
    let mut failures = Vec::new();
    for &l in &indices {
        let grid = match &fixed {
            Some(g) => g.clone(),
            None => {
                let mut xs = batch.ordered(l)?;
                xs.sort_by(f64::total_cmp);
                let mut g: Vec<f64> = (1..20).map(|k| xs[k * (xs.len() - 1) / 20]).collect();
                g.dedup();
                g
            }
        };
        let analytic = d.curve(Statistic::Cdf { index: l }, &grid)?;
        let empirical = empirical_cdf(&batch, l, &grid)?;
        let report = compare(&analytic, &empirical)?;
        println!("index {l}: {report}");
        if let Some(w) = csv.as_mut() {
            for (i, &x) in grid.iter().enumerate() {
                writeln!(
                    w,
                    "{l},{},{},{},{}",
                    fmt_value(x),
                    fmt_value(analytic.values[i]),
                    fmt_value(empirical.values[i]),
                    fmt_value(empirical.stderr[i])
                )?;
            }
        }
        if !report.passed {
            failures.push(l);
        }
    }
    if let Some(w) = csv.as_mut() {
        w.flush()?;
    }
    println!(
        "{}: {} of {} indices passed with {} samples (seed {})",
        if failures.is_empty() { "PASS" } else { "FAIL" },
        indices.len() - failures.len(),
        indices.len(),
        args.samples,
        args.seed
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "indices {failures:?} deviate from the Monte Carlo estimate"
        )))
    }
}
