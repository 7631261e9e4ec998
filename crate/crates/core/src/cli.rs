//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage and input errors, 3 for domain
//! errors (degenerate design, unknown asymptotics, every replication failed).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::asymptotics::{Model, Population};
use crate::error::Error;
use crate::estimators::{profile_fit, Criterion, Dataset, EstimatorKind, Orientation, SearchOptions};
use crate::kernel::Kernel;
use crate::simulation::{generate, linear_grid, loss_curve_with, run_monte_carlo, ReplicationPlan};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_domain() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "monoindex", version, about = "Monotone single-index regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate α from a CSV dataset with header x1,…,xd,y.
    Fit(FitArgs),
    /// Monte Carlo study: mean and n·cov of α̂ over seeded replications.
    Simulate(SimulateArgs),
    /// Empirical (and optionally population) criterion along α = (α₁, √(1−α₁²)).
    Losscurve(LossCurveArgs),
    /// Asymptotic bread, meat and sandwich covariance matrices.
    Asymptotics(AsymptoticsArgs),
    /// Write a seeded dataset from one of the reference models.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Estimator {
    Lse,
    Sse,
    Ese,
    Spline,
}

impl From<Estimator> for EstimatorKind {
    fn from(e: Estimator) -> Self {
        match e {
            Estimator::Lse => EstimatorKind::Lse,
            Estimator::Sse => EstimatorKind::Sse,
            Estimator::Ese => EstimatorKind::Ese,
            Estimator::Spline => EstimatorKind::Spline,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    /// ψ(u) = u³ with standard normal noise
    #[value(name = "1")]
    Cubic,
    /// Y ~ Bin(10, logistic(u))
    #[value(name = "2")]
    Binomial,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Cubic => Model::Cubic,
            ModelArg::Binomial => Model::Binomial,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Epanechnikov,
    Triweight,
}

#[derive(Debug, Args)]
struct TuningArgs {
    /// Golden-section stopping width (radians)
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Half-width of the search bracket around the LSE angle
    #[arg(long, default_value_t = 0.3)]
    bracket: f64,
    /// Number of coarse grid angles for the LSE start
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = crate::kernel::DEFAULT_BANDWIDTH_CONST)]
    bandwidth_const: f64,
    #[arg(long, default_value_t = crate::spline::DEFAULT_MU_CONST)]
    mu_const: f64,
    #[arg(long, value_enum, default_value_t = KernelArg::Epanechnikov)]
    kernel: KernelArg,
    /// Fit a nonincreasing link instead of a nondecreasing one
    #[arg(long)]
    decreasing: bool,
}

impl TuningArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            tol: self.tol,
            bracket: self.bracket,
            grid: self.grid,
            kernel: match self.kernel {
                KernelArg::Epanechnikov => Kernel::Epanechnikov,
                KernelArg::Triweight => Kernel::Triweight,
            },
            bandwidth_const: self.bandwidth_const,
            mu_const: self.mu_const,
            orientation: if self.decreasing {
                Orientation::Decreasing
            } else {
                Orientation::Increasing
            },
            trace: false,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV file with header x1,…,xd,y
    input: PathBuf,
    #[arg(long, value_enum)]
    estimator: Estimator,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Write CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, value_enum)]
    estimator: Estimator,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = one per core)
    #[arg(long, env = "MONOINDEX_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    tuning: TuningArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LossCurveArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Cubic)]
    model: ModelArg,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Read the dataset from CSV instead of generating it
    #[arg(long, conflicts_with_all = ["n", "seed"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    estimator: Estimator,
    #[arg(long, default_value_t = 0.0)]
    grid_min: f64,
    #[arg(long, default_value_t = 1.0)]
    grid_max: f64,
    #[arg(long, default_value_t = 101)]
    grid_points: usize,
    /// Also emit the population curve (LSE and SSE only)
    #[arg(long)]
    population: bool,
    #[command(flatten)]
    tuning: TuningArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AsymptoticsArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, value_enum)]
    estimator: Estimator,
    /// Gauss–Legendre nodes per quadrature dimension
    #[arg(long, default_value_t = crate::asymptotics::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Losscurve(a) => cmd_losscurve(a),
        Command::Asymptotics(a) => cmd_asymptotics(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

fn cmd_fit(a: FitArgs) -> CliResult<()> {
    let data = read_dataset(&a.input)?;
    let fit = profile_fit(a.estimator.into(), &data, &a.tuning.options())?;
    let mut out = open_output(a.output.as_deref())?;
    let header: Vec<String> = (1..=fit.alpha_hat.dim()).map(|j| format!("alpha{j}")).collect();
    let alpha: Vec<String> = fit.alpha_hat.components().iter().map(f64::to_string).collect();
    let body = format!(
        "estimator,{},loss,evaluations\n{},{},{},{}\n",
        header.join(","),
        fit.kind,
        alpha.join(","),
        fit.loss,
        fit.evaluations
    );
    write_all(&mut out, a.output.as_deref(), &body)
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let plan = ReplicationPlan {
        model: a.model.into(),
        kind: a.estimator.into(),
        n: a.n,
        reps: a.reps,
        master_seed: a.seed,
    };
    let opts = a.tuning.options();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start thread pool: {e}")))?;
    let s = pool.install(|| run_monte_carlo(&plan, &opts))?;
    let mut out = open_output(a.output.as_deref())?;
    let body = format!(
        "mu1,mu2,s11,s22,s12,reps_used,failures\n{},{},{},{},{},{},{}\n",
        s.mu_hat[0],
        s.mu_hat[1],
        s.scaled_cov[0][0],
        s.scaled_cov[1][1],
        s.scaled_cov[0][1],
        s.reps_used,
        s.failures
    );
    write_all(&mut out, a.output.as_deref(), &body)
}

fn cmd_losscurve(a: LossCurveArgs) -> CliResult<()> {
    let kind: EstimatorKind = a.estimator.into();
    let model: Model = a.model.into();
    if a.population && !matches!(kind, EstimatorKind::Lse | EstimatorKind::Sse) {
        return Err(CliError::Input(format!(
            "--population is available for lse and sse, not {kind}"
        )));
    }
    let grid = linear_grid(a.grid_min, a.grid_max, a.grid_points)?;
    let data = match &a.input {
        Some(p) => read_dataset(p)?,
        None => generate(model, a.n, a.seed)?,
    };
    let opts = a.tuning.options();
    let data = match opts.orientation {
        Orientation::Increasing => data,
        Orientation::Decreasing => data.negated(),
    };
    let criterion = Criterion {
        kind,
        kernel: opts.kernel,
        bandwidth_const: opts.bandwidth_const,
        mu_const: opts.mu_const,
    };
    let curve = loss_curve_with(&data, &criterion, &grid)?;
    let population = if a.population {
        Some(Population::new(model).population_loss(kind, &grid)?)
    } else {
        None
    };

    let mut body = String::from(if a.population {
        "alpha1,loss,population\n"
    } else {
        "alpha1,loss\n"
    });
    for (i, (a1, v)) in curve.iter().enumerate() {
        match &population {
            Some(p) => body.push_str(&format!("{a1},{v},{}\n", p[i].1)),
            None => body.push_str(&format!("{a1},{v}\n")),
        }
    }
    let mut out = open_output(a.output.as_deref())?;
    write_all(&mut out, a.output.as_deref(), &body)
}

fn cmd_asymptotics(a: AsymptoticsArgs) -> CliResult<()> {
    let kind: EstimatorKind = a.estimator.into();
    let pop = Population::with_nodes(a.model.into(), a.nodes);
    let cov = pop.asymptotic_covariance(kind)?;
    let (bread, meat) = pop.sandwich_parts(kind)?;
    let (bread_name, meat_name) = match kind {
        EstimatorKind::Sse => ("A", "Sigma"),
        _ => ("A_tilde", "Sigma_tilde"),
    };
    let mut body = String::from("quantity,row,col1,col2\n");
    for (name, m) in [(bread_name, &bread), (meat_name, &meat), ("sandwich", &cov)] {
        for r in 0..m.nrows() {
            body.push_str(&format!("{name},{},{},{}\n", r + 1, m[(r, 0)], m[(r, 1)]));
        }
    }
    let mut out = open_output(a.output.as_deref())?;
    write_all(&mut out, a.output.as_deref(), &body)
}

fn cmd_generate(a: GenerateArgs) -> CliResult<()> {
    let data = generate(a.model.into(), a.n, a.seed)?;
    let mut out = open_output(a.output.as_deref())?;
    let io_err = |source: csv::Error| CliError::Input(format!("cannot write dataset: {source}"));
    let mut w = csv::Writer::from_writer(&mut out);
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header).map_err(io_err)?;
    for (row, y) in data.rows().zip(data.y()) {
        let rec: Vec<String> = row.iter().chain(std::iter::once(y)).map(f64::to_string).collect();
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush()
        .map_err(|source| io_error(a.output.as_deref(), source))?;
    Ok(())
}

/// Reads a dataset with header `x1,…,xd,y`; messages carry 1-based line numbers.
pub fn read_dataset(path: &Path) -> Result<Dataset, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_dataset(file).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses CSV text in the dataset format.
pub fn parse_dataset<R: io::Read>(reader: R) -> Result<Dataset, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| format!("line 1: {e}"))?.clone();
    let cols = header.len();
    let expected: Vec<String> = (1..cols)
        .map(|j| format!("x{j}"))
        .chain(std::iter::once("y".into()))
        .collect();
    if cols < 2 || header.iter().zip(&expected).any(|(h, e)| h != e) {
        return Err(format!(
            "line 1: expected header {}, found '{}'",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let d = cols - 1;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| match e.position() {
            Some(p) => format!("line {}: {e}", p.line()),
            None => e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != cols {
            return Err(format!(
                "line {line}: expected {cols} fields, found {}",
                rec.len()
            ));
        }
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                format!(
                    "line {line}: column {}: cannot parse '{field}' as a number",
                    j + 1
                )
            })?;
            if !v.is_finite() {
                return Err(format!("line {line}: column {}: nonfinite value", j + 1));
            }
            if j < d {
                x.push(v);
            } else {
                y.push(v);
            }
        }
    }
    if y.is_empty() {
        return Err("no observations".into());
    }
    Dataset::new(d, x, y).map_err(|e| e.to_string())
}

impl From<String> for CliError {
    fn from(s: String) -> Self {
        CliError::Input(s)
    }
}

fn io_error(path: Option<&Path>, source: io::Error) -> CliError {
    CliError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    }
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(Some(p), e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_all(out: &mut Box<dyn Write>, path: Option<&Path>, body: &str) -> CliResult<()> {
    out.write_all(body.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| io_error(path, e))
}
