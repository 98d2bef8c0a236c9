//! `jacobi-edge`: CSV tables (and optional SVG plots) of exact, asymptotic
//! and corrected extreme-eigenvalue laws, Monte Carlo checks, and the
//! validation suites.
//!
//! Exit status: 0 success, 1 validation failure, 2 usage error, 3 numerical
//! or statistical quality error.

mod svg;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi_edge::asympt::{correction_status, Status};
use jacobi_edge::bessel::{bessel_i, BesselFn};
use jacobi_edge::exactdist::{edge_cdf, model_cdf, moments_alpha1_zero, DistributionQuery, Edge, EnsembleParams, Method, Model};
use jacobi_edge::montecarlo::{
    dkw_epsilon, empirical_scaled_correction, sample_extremes, try_ks_distance, CovarianceSpec, EmpiricalCDF, MCConfig,
};
use jacobi_edge::numerics::Precision;
use jacobi_edge::validation::{run_suite, Suite, SuiteOptions};
use jacobi_edge::Error;

use svg::{line_chart, Series};
use table::OutputTable;

#[derive(Parser, Debug)]
#[command(name = "jacobi-edge", version, about = "Extreme-eigenvalue laws of double-Wishart / Jacobi ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CDF of an extreme eigenvalue on a grid.
    Cdf(CdfArgs),
    /// Empirical scaled first-order correction vs theory.
    Correction(CorrectionArgs),
    /// Monte Carlo ECDF of an extreme eigenvalue, with a KS check.
    Mc(McArgs),
    /// Run a validation suite.
    Validate(ValidateArgs),
}

/// Inclusive `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("grid '{s}' must be start:stop:count"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("grid '{s}': {e}"));
        let (start, stop) = (num(a)?, num(b)?);
        let count: usize = c.trim().parse().map_err(|e| format!("grid '{s}': count: {e}"))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err(format!("grid '{s}': bounds must be finite"));
        }
        if count == 0 || (count == 1 && start != stop) {
            return Err(format!("grid '{s}': count must be >= 2 (or 1 with start = stop)"));
        }
        Ok(Grid { start, stop, count })
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        // pin the last point so the stop value is hit exactly
        (0..self.count).map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 }).collect()
    }
}

#[derive(Args, Debug, Clone)]
struct Ensemble {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    alpha1: u32,
    #[arg(long)]
    alpha2: u32,
}

impl Ensemble {
    fn params(&self) -> Result<EnsembleParams, Error> {
        EnsembleParams::new(self.n, self.alpha1, self.alpha2)
    }

    fn flags(&self) -> String {
        format!("--n {} --alpha1 {} --alpha2 {}", self.n, self.alpha1, self.alpha2)
    }
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a line chart.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CdfArgs {
    #[arg(long, default_value = "w")]
    model: Model,
    #[arg(long, default_value = "min")]
    edge: Edge,
    #[arg(long, default_value = "legendre")]
    method: Method,
    #[command(flatten)]
    ensemble: Ensemble,
    #[arg(long)]
    grid: Grid,
    #[command(flatten)]
    output: Output,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Args, Debug)]
struct CorrectionArgs {
    #[command(flatten)]
    ensemble: Ensemble,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Points `x = n²φ` (all > 0).
    #[arg(long)]
    grid: Grid,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sigma {
    Identity,
    Random,
}

#[derive(Args, Debug)]
struct McArgs {
    #[command(flatten)]
    ensemble: Ensemble,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "min")]
    edge: Edge,
    #[arg(long, value_enum, default_value_t = Sigma::Identity)]
    sigma: Sigma,
    /// Number of sample quantiles in the table.
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Fault {
    Bessel,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    suite: Suite,
    /// Smaller grids and sample counts, same tolerances.
    #[arg(long)]
    fast: bool,
    #[arg(long, default_value_t = SuiteOptions::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mutation test: run the suite against a deliberately broken component.
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::NumericalQuality(_) | Error::StatisticalPower(_) | Error::CholeskyIncidence { .. }) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(p.clone(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(table: &OutputTable, output: &Output, chart: impl FnOnce() -> String) -> Result<(), Failure> {
    let csv = table.to_csv();
    if let Some(p) = &output.svg {
        std::fs::write(p, chart()).map_err(|e| Failure::Io(p.clone(), e))?;
    }
    write_text(output.out.as_ref(), &csv)
}

fn header(table: &mut OutputTable, command: String) {
    table.meta("command", format!("jacobi-edge {command}"));
    table.meta("version", env!("CARGO_PKG_VERSION"));
}

fn series(name: &str, x: &[f64], y: &[f64]) -> Series {
    Series { name: name.into(), points: x.iter().cloned().zip(y.iter().cloned()).collect() }
}

fn cmd_cdf(a: &CdfArgs) -> Result<(), Failure> {
    let params = a.ensemble.params()?;
    let q = DistributionQuery { params, model: a.model, edge: a.edge, method: a.method };
    let corrected = a.method == Method::Corrected;
    let mut t = OutputTable::new(if corrected { &["point", "cdf", "flag"] } else { &["point", "cdf"] });
    header(
        &mut t,
        format!(
            "cdf --model {} --edge {} --method {} {} --grid {}",
            a.model,
            a.edge,
            a.method,
            a.ensemble.flags(),
            a.grid
        ),
    );
    t.meta(
        "precision",
        match Precision::from_env()? {
            Precision::Double => "double",
            Precision::DoubleDouble => "double-double",
            Precision::Auto => "auto",
        },
    );
    let conjectured = corrected && correction_status(params, a.edge) == Status::Conjectured;
    if corrected {
        t.meta("flag", "1 = first-order correction is conjectured for these parameters, 0 = proven");
    }
    for p in a.grid.points() {
        let v = model_cdf(&q, p)?;
        if corrected {
            t.push(vec![p, v, if conjectured { 1.0 } else { 0.0 }]);
        } else {
            t.push(vec![p, v]);
        }
    }
    emit(&t, &a.output, || {
        let (x, y) = (t.column("point").unwrap(), t.column("cdf").unwrap());
        line_chart(&format!("{} CDF, {params}", a.edge), "point", "cdf", &[series(&a.method.to_string(), &x, &y)])
    })
}

fn cmd_correction(a: &CorrectionArgs) -> Result<(), Failure> {
    let params = a.ensemble.params()?;
    let cfg = MCConfig { params, samples: a.samples, seed: a.seed, workers: a.workers };
    let pts = empirical_scaled_correction(&cfg, &a.grid.points())?;
    let mut t = OutputTable::new(&["x", "empirical_scaled_correction", "stderr", "theory"]);
    header(
        &mut t,
        format!("correction {} --samples {} --seed {} --grid {}", a.ensemble.flags(), a.samples, a.seed, a.grid),
    );
    t.meta("seed", a.seed);
    t.meta("samples", a.samples);
    t.meta("status", correction_status(params, Edge::Smallest));
    let mut within = 0;
    let mut present = 0;
    for p in &pts {
        if let (Some(v), Some(se)) = (p.value, p.stderr) {
            present += 1;
            within += usize::from((v - p.theory).abs() <= 3.0 * se);
        }
        t.push(vec![p.x, p.value.unwrap_or(f64::NAN), p.stderr.unwrap_or(f64::NAN), p.theory]);
    }
    t.meta("within_3_stderr", format!("{within} of {present} estimated points ({} missing)", pts.len() - present));
    emit(&t, &a.output, || {
        let x = t.column("x").unwrap();
        line_chart(
            &format!("scaled correction, {params}"),
            "x = n^2 phi",
            "n e^x (f_n - f_inf)",
            &[
                series("empirical", &x, &t.column("empirical_scaled_correction").unwrap()),
                series("theory", &x, &t.column("theory").unwrap()),
            ],
        )
    })
}

fn cmd_mc(a: &McArgs) -> Result<(), Failure> {
    let params = a.ensemble.params()?;
    if a.points < 2 {
        return Err(Error::InvalidInput("--points must be >= 2".into()).into());
    }
    let cfg = MCConfig { params, samples: a.samples, seed: a.seed, workers: a.workers };
    let cov = match a.sigma {
        Sigma::Identity => CovarianceSpec::Identity,
        Sigma::Random => CovarianceSpec::Random(a.seed),
    };
    let s = sample_extremes(&cfg, cov)?;
    let values = match a.edge {
        Edge::Smallest => s.smallest,
        Edge::Largest => s.largest,
    };
    let e = EmpiricalCDF::new(values)?;
    let precision = Precision::from_env()?;
    let ks = try_ks_distance(&e, |v| edge_cdf(params, a.edge, Method::ExactLegendre, v.clamp(0.0, 1.0), precision))?;

    let mut t = OutputTable::new(&["point", "ecdf"]);
    let sigma = match a.sigma {
        Sigma::Identity => "identity",
        Sigma::Random => "random",
    };
    header(
        &mut t,
        format!("mc {} --samples {} --seed {} --edge {} --sigma {sigma} --points {}", a.ensemble.flags(), a.samples, a.seed, a.edge, a.points),
    );
    t.meta("seed", a.seed);
    t.meta("samples", a.samples);
    t.meta("cholesky_failures", s.cholesky_failures);
    t.meta("mean", format!("{:.16e}", e.mean()));
    t.meta("std", format!("{:.16e}", e.std()));
    t.meta("ks_vs_exact", format!("{ks:.16e}"));
    t.meta("dkw_99", format!("{:.16e}", dkw_epsilon(0.01, e.count())));
    if a.edge == Edge::Smallest && params.alpha1 == 0 {
        let (m, sd) = moments_alpha1_zero(params)?;
        t.meta("mean_closed_form", format!("{m:.16e}"));
        t.meta("std_closed_form", format!("{sd:.16e}"));
    }
    for k in 0..a.points {
        let q = e.quantile(k as f64 / (a.points - 1) as f64);
        t.push(vec![q, e.evaluate(q)]);
    }
    emit(&t, &a.output, || {
        let x = t.column("point").unwrap();
        let exact: Vec<f64> = x
            .iter()
            .map(|&v| edge_cdf(params, a.edge, Method::ExactLegendre, v.clamp(0.0, 1.0), precision).unwrap_or(f64::NAN))
            .collect();
        line_chart(
            &format!("{} eigenvalue, {params}", a.edge),
            "phi",
            "cdf",
            &[series("empirical", &x, &t.column("ecdf").unwrap()), series("exact", &x, &exact)],
        )
    })
}

/// Perturbs the `k = 2` series coefficient of `I_2` by one part in a million.
fn corrupted_bessel(l: i64, z: f64) -> jacobi_edge::Result<f64> {
    let v = bessel_i(l, z)?;
    Ok(if l.abs() == 2 { v + 1e-6 * (z / 2.0).powi(6) / 24.0 } else { v })
}

fn cmd_validate(a: &ValidateArgs) -> Result<bool, Failure> {
    let bessel: BesselFn = match a.inject_fault {
        Some(Fault::Bessel) => corrupted_bessel,
        None => bessel_i,
    };
    let opts = SuiteOptions { fast: a.fast, bessel, seed: a.seed, workers: a.workers };
    let checks = run_suite(a.suite, &opts)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut text = String::new();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{status}  {:<width$}  {}\n", c.name, c.detail));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    text.push_str(&format!("{} suite: {passed} of {} checks passed\n", a.suite.name(), checks.len()));
    write_text(a.out.as_ref(), &text)?;
    Ok(passed == checks.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cdf(a) => cmd_cdf(a).map(|_| true),
        Command::Correction(a) => cmd_correction(a).map(|_| true),
        Command::Mc(a) => cmd_mc(a).map(|_| true),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("jacobi-edge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
