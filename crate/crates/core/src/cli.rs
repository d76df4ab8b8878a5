//! Command-line front end: argument parsing, dispatch and artifact output.
//!
//! Every run prints a JSON document `{"header": …, "result": …}` on stdout.
//! With `--out`, the same document (or, with `--format csv`, the command's
//! table preceded by `# key=value` header lines) is written to that file.
//! Errors go to stderr as JSON; the exit code is 0 on success, 2 on domain
//! errors and 3 when an element budget is exhausted.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::{presets, AlgebraError, AlgebraSpec, GroupElement, NilpotentAlgebra};
use crate::bfs::{self, BfsError, DEFAULT_BUDGET};
use crate::convergence::{self, ConvergenceError, ExperimentConfig};
use crate::lattice::{Elem, GeneratingSet, Lattice, LatticeError, LatticeSpec};
use crate::nonsingular::{self, ClassifyOptions, NonsingularError, Verdict};
use crate::norm::{Norm, NormError, NormSpec};
use crate::pmp::distance::{DistanceEstimator, DistanceOptions};
use crate::pmp::{self, ExtremalState, PmpError};
use crate::space::{HorizontalSpace, SpaceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Bumped whenever the layout of the output documents changes.
pub const OUTPUT_FORMAT: u32 = 1;

const SCHEMAS: &str = "\
File schemas:
  algebra  {\"n\": 3, \"p\": 2, \"brackets\": [{\"i\": 1, \"j\": 2, \"k\": 3, \"c\": 1.0}], \"names\": [\"X\", \"Y\", \"Z\"]}
           1-based constants c_ij^k with i, j <= p < k; the antisymmetric partner is implied.
           Presets: h3, rxh3, h3xh3, h5, quaternionic, free3, abelian<d>.
  norm     {\"variant\": \"l1\" | \"l2\" | \"linf\"} or {\"variant\": \"polytope\", \"vertices\": [[1, 0], [0, 1], ...]}
           A bare variant name may be given instead of a file.
  lattice  {\"n\": 3, \"p\": 2, \"cocycle\": [{\"i\": 1, \"j\": 2, \"k\": 3, \"b\": 1}]}
           Law (x, z)(x', z') = (x + x', z + z' + b(x, x')). Presets: h3z, zxh3z, z<d>.
  config   {\"lattice\": \"h3z\", \"generators\": \"standard\", \"schedule\": [8, 12, 16],
            \"methods\": [\"pointwise\", \"hausdorff\"], \"sampling\": {\"full_threshold\": 100000,
            \"sample\": 10000, \"seed\": 0}, \"estimator\": {\"segments\": 64, \"restarts\": 8},
            \"seed\": 0, \"budget\": 200000000, \"cloud_points\": 0}

Exit codes: 0 success, 2 domain error, 3 element budget exhausted.";

#[derive(Debug, Parser)]
#[command(name = "nilcone", version, about = "Sub-Finsler geometry of 2-step nilpotent groups", after_long_help = SCHEMAS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Artifact file; a directory for `converge`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Artifact format [default: csv for `.csv` paths, json otherwise].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an algebra (and optionally a norm) and summarize it.
    Validate {
        /// Algebra file or preset name.
        #[arg(long)]
        algebra: String,
        /// Norm file or variant name.
        #[arg(long)]
        norm: Option<String>,
    },
    /// Classify an algebra as non-singular, singular or undecidable.
    Nonsingular {
        #[arg(long)]
        algebra: String,
        #[command(flatten)]
        classify: ClassifyArgs,
    },
    /// Build and verify the abnormal extremal of a singular witness.
    Abnormal {
        #[command(flatten)]
        space: SpaceArgs,
        /// Horizontal direction u of the witness; found by classification when omitted.
        #[arg(long, allow_hyphen_values = true, requires = "covector")]
        witness: Option<String>,
        /// Central covector of the witness.
        #[arg(long, allow_hyphen_values = true, requires = "witness")]
        covector: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        /// Number of sample times.
        #[arg(long, default_value_t = 100)]
        times: usize,
        #[command(flatten)]
        classify: ClassifyArgs,
    },
    /// Integrate the normal extremal with a given initial covector.
    Geodesic {
        #[command(flatten)]
        space: SpaceArgs,
        /// Initial covector at the identity, n comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        covector: String,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Two-sided estimate of the distance from the identity to a target.
    Distance {
        #[command(flatten)]
        space: SpaceArgs,
        /// Target in exponential coordinates, n comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 64)]
        segments: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Loops sampled for the K1 estimate.
        #[arg(long, default_value_t = 8)]
        k1_samples: usize,
        /// Skip the shooting solver on generic targets.
        #[arg(long)]
        no_shoot: bool,
        /// Also write the witness path (direction, duration rows) here.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Also write the extremal trajectory (t, x, xi, u) here when shooting won.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Exact word lengths on a ball of a lattice.
    Wordball {
        /// Lattice file or preset name.
        #[arg(long, default_value = "h3z")]
        lattice: String,
        /// Preset name or elements such as "1,0,0;0,1,0".
        #[arg(long, default_value = "standard", allow_hyphen_values = true)]
        gens: String,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Smallest radius used in the growth-degree fit.
        #[arg(long, default_value_t = 8)]
        fit_from: usize,
    },
    /// Run a convergence experiment; writes profile.csv and fit.json.
    Converge {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Algebra file or preset name.
    #[arg(long)]
    pub algebra: String,
    /// Norm on the horizontal layer: file or variant name.
    #[arg(long, default_value = "l2")]
    pub norm: String,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Sphere samples.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Local-descent restarts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Nonsingular(#[from] NonsingularError),
    #[error(transparent)]
    Pmp(#[from] PmpError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Bfs(#[from] BfsError),
    #[error(transparent)]
    Convergence(#[from] ConvergenceError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Domain(_) => "domain",
            Self::Io { .. } => "io",
            Self::Algebra(_) => "algebra",
            Self::Norm(_) => "norm",
            Self::Space(_) => "space",
            Self::Nonsingular(_) => "nonsingular",
            Self::Pmp(_) => "pmp",
            Self::Lattice(_) => "lattice",
            Self::Bfs(_) => "bfs",
            Self::Convergence(_) => "convergence",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Bfs(BfsError::BudgetExceeded { .. }) | Self::Convergence(ConvergenceError::Bfs(BfsError::BudgetExceeded { .. })) => {
                EXIT_BUDGET
            }
            _ => EXIT_DOMAIN,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() })
    }
}

/// Result of one command before it is written out.
struct Report {
    /// Canonical description of every input, hashed into the header.
    inputs: Value,
    seed: u64,
    result: Value,
    table: Option<String>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    EXIT_OK
                }
                _ => {
                    let err = CliError::Usage(e.to_string().trim_end().to_string());
                    eprintln!("{}", err.to_json());
                    err.exit_code()
                }
            };
        }
    };
    match execute(&cli) {
        Ok(doc) => {
            // a closed pipe is the reader's choice, not a failure
            let _ = writeln!(std::io::stdout(), "{}", pretty(&doc));
            EXIT_OK
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

/// Runs a parsed command, writes its artifacts and returns the stdout document.
pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    if let Some(t) = cli.threads {
        // fails only if a pool already exists, which then stays in charge
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let seed = cli.seed.unwrap_or(0);
    let name = command_name(&cli.command);
    let report = match &cli.command {
        Command::Validate { algebra, norm } => validate(algebra, norm.as_deref())?,
        Command::Nonsingular { algebra, classify } => classify_cmd(algebra, classify, seed)?,
        Command::Abnormal {
            space,
            witness,
            covector,
            horizon,
            times,
            classify,
        } => abnormal(space, witness.as_deref(), covector.as_deref(), *horizon, *times, classify, seed)?,
        Command::Geodesic {
            space,
            covector,
            horizon,
            steps,
        } => geodesic(space, covector, *horizon, *steps)?,
        Command::Distance {
            space,
            target,
            segments,
            restarts,
            k1_samples,
            no_shoot,
            path,
            trajectory,
        } => {
            let opts = DistanceOptions {
                segments: *segments,
                restarts: *restarts,
                seed,
                k1_samples: *k1_samples,
                shoot: !no_shoot,
            };
            distance(space, target, opts, path.as_deref(), trajectory.as_deref())?
        }
        Command::Wordball {
            lattice,
            gens,
            radius,
            budget,
            fit_from,
        } => wordball(lattice, gens, *radius, *budget, *fit_from)?,
        Command::Converge { config } => converge(config, cli.seed, cli.out.as_deref())?,
    };
    let header = header(name, &report);
    let doc = json!({ "header": header, "result": report.result });
    match (&cli.command, &cli.out) {
        (Command::Converge { .. }, _) | (_, None) => {}
        (_, Some(out)) => {
            let format = cli.format.unwrap_or_else(|| infer_format(out));
            let text = match format {
                Format::Json => pretty(&doc) + "\n",
                Format::Csv => {
                    let table = report
                        .table
                        .as_deref()
                        .ok_or_else(|| CliError::Usage(format!("`{name}` has no table output; use --format json")))?;
                    csv_header(&header) + table
                }
            };
            write_file(out, &text)?;
        }
    }
    Ok(doc)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate { .. } => "validate",
        Command::Nonsingular { .. } => "nonsingular",
        Command::Abnormal { .. } => "abnormal",
        Command::Geodesic { .. } => "geodesic",
        Command::Distance { .. } => "distance",
        Command::Wordball { .. } => "wordball",
        Command::Converge { .. } => "converge",
    }
}

fn header(name: &str, report: &Report) -> Value {
    let canonical = json!({ "command": name, "inputs": report.inputs, "seed": report.seed });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    let hex = digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    json!({
        "tool": "nilcone",
        "version": env!("CARGO_PKG_VERSION"),
        "output_format": OUTPUT_FORMAT,
        "command": name,
        "seed": report.seed,
        "config_digest": hex,
    })
}

fn csv_header(header: &Value) -> String {
    let mut out = String::new();
    if let Some(map) = header.as_object() {
        for (k, v) in map {
            let v = v.as_str().map_or_else(|| v.to_string(), str::to_string);
            let _ = writeln!(out, "# {k}={v}");
        }
    }
    out
}

fn infer_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Json,
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: impl ToString) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

/// Algebra from a spec file or preset name, with its canonical spec.
pub fn load_algebra(arg: &str) -> Result<(NilpotentAlgebra, Value), CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let spec = AlgebraSpec::load(path)?;
        let alg = spec.validate()?;
        return Ok((alg, to_value(&spec)));
    }
    let alg = algebra_preset(arg).ok_or_else(|| CliError::Usage(format!("no algebra file or preset named {arg:?}")))?;
    let spec = alg.to_spec();
    Ok((alg, to_value(&spec)))
}

/// Named algebras: `h3`, `rxh3`, `h3xh3`, `h5`, `quaternionic`, `free3`, `abelian<d>`.
pub fn algebra_preset(name: &str) -> Option<NilpotentAlgebra> {
    let lower = name.to_ascii_lowercase();
    Some(match lower.as_str() {
        "h3" | "heisenberg" => presets::heisenberg(),
        "rxh3" => presets::r_times_heisenberg(),
        "h3xh3" => presets::heisenberg_squared(),
        "h5" => presets::heisenberg5(),
        "quaternionic" => presets::quaternionic(),
        "free3" => presets::free_rank3(),
        _ => {
            let d = lower.strip_prefix("abelian")?.parse::<usize>().ok().filter(|d| *d >= 1)?;
            presets::abelian(d)
        }
    })
}

/// Norm on `ℝ^dim` from a spec file or variant name, with its canonical spec.
pub fn load_norm(arg: &str, dim: usize) -> Result<(Norm, Value), CliError> {
    let path = Path::new(arg);
    let spec = if path.is_file() {
        NormSpec::load(path)?
    } else {
        NormSpec {
            variant: arg.to_string(),
            vertices: None,
        }
    };
    let norm = spec.build(dim)?;
    let canonical = to_value(&NormSpec::of(&norm));
    Ok((norm, canonical))
}

/// `"a,b,c"` as a vector of `len` numbers.
pub fn parse_vector(text: &str, len: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
    if v.len() != len {
        return Err(CliError::Usage(format!("{what}: expected {len} values, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage(format!("{what}: values must be finite")));
    }
    Ok(v)
}

fn polarized(space: &SpaceArgs) -> Result<(HorizontalSpace, Value), CliError> {
    let (alg, alg_spec) = load_algebra(&space.algebra)?;
    let (norm, norm_spec) = load_norm(&space.norm, alg.p())?;
    let sp = HorizontalSpace::polarized(Arc::new(alg), norm)?;
    Ok((sp, json!({ "algebra": alg_spec, "norm": norm_spec })))
}

fn validate(algebra: &str, norm: Option<&str>) -> Result<Report, CliError> {
    let (alg, alg_spec) = load_algebra(algebra)?;
    let mut result = json!({
        "valid": true,
        "n": alg.n(),
        "p": alg.p(),
        "center_dim": alg.center_dim(),
        "constants": alg.brackets().len(),
        "abelian": alg.is_abelian(),
        "bracket_generating": alg.is_bracket_generating(),
    });
    let mut inputs = json!({ "algebra": alg_spec });
    if let Some(arg) = norm {
        let (norm, spec) = load_norm(arg, alg.p())?;
        HorizontalSpace::polarized(Arc::new(alg), norm)?;
        result["norm"] = spec.clone();
        inputs["norm"] = spec;
    }
    Ok(Report {
        inputs,
        seed: 0,
        result,
        table: None,
    })
}

fn classify_options(args: &ClassifyArgs, seed: u64) -> ClassifyOptions {
    ClassifyOptions {
        samples: args.samples,
        restarts: args.restarts,
        seed,
    }
}

fn classify_cmd(algebra: &str, args: &ClassifyArgs, seed: u64) -> Result<Report, CliError> {
    let (alg, spec) = load_algebra(algebra)?;
    let opts = classify_options(args, seed);
    let report = nonsingular::classify(&alg, &opts);
    Ok(Report {
        inputs: json!({ "algebra": spec, "samples": opts.samples, "restarts": opts.restarts }),
        seed,
        result: to_value(&report),
        table: None,
    })
}

fn abnormal(
    space: &SpaceArgs,
    witness: Option<&str>,
    covector: Option<&str>,
    horizon: f64,
    times: usize,
    classify: &ClassifyArgs,
    seed: u64,
) -> Result<Report, CliError> {
    let (sp, mut inputs) = polarized(space)?;
    let alg = sp.algebra();
    let (n, p) = (alg.n(), alg.p());
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(CliError::Usage(format!("horizon must be positive, got {horizon}")));
    }
    let (u, xi, source) = match (witness, covector) {
        (Some(w), Some(c)) => (parse_vector(w, p, "witness")?, parse_vector(c, n - p, "covector")?, "given"),
        _ => {
            let opts = classify_options(classify, seed);
            inputs["samples"] = json!(opts.samples);
            inputs["restarts"] = json!(opts.restarts);
            match nonsingular::classify(alg, &opts).verdict {
                Verdict::Singular { witness, covector } => (witness, covector, "classified"),
                other => {
                    return Err(CliError::Domain(format!(
                        "no singular witness to build an abnormal extremal from: {}",
                        to_value(&other)
                    )))
                }
            }
        }
    };
    inputs["witness"] = json!(u);
    inputs["covector"] = json!(xi);
    inputs["horizon"] = json!(horizon);
    inputs["times"] = json!(times);
    let (_, ext, _) = nonsingular::abnormal_from_witness(&sp, &u, &xi)?;
    let times = times.max(2);
    let res = ext.residuals(alg, sp.norm(), horizon, times);
    let traj = ext.trajectory(alg, horizon, times - 1);
    let check = pmp::is_abnormal(&traj);
    let result = json!({
        "witness": u,
        "covector": xi,
        "source": source,
        "control": ext.u,
        "horizon": horizon,
        "times": times,
        "residuals": {
            "ode": res.ode,
            "max_hamiltonian": res.max_hamiltonian,
            "maximality": res.maximality,
            "momenta": res.momenta,
        },
        "abnormal": check.abnormal,
        "momenta_residual": check.residual,
        "endpoint": traj.endpoint(),
    });
    Ok(Report {
        inputs,
        seed,
        result,
        table: Some(traj.to_csv()),
    })
}

fn geodesic(space: &SpaceArgs, covector: &str, horizon: f64, steps: usize) -> Result<Report, CliError> {
    let (sp, mut inputs) = polarized(space)?;
    let alg = sp.algebra();
    let xi = parse_vector(covector, alg.n(), "covector")?;
    let s0 = ExtremalState::normal_at_identity(xi.clone());
    let h0 = pmp::horizontal_momenta(alg, &s0);
    let traj = pmp::integrate_extremal(alg, sp.norm(), &s0, horizon, steps)?;
    inputs["covector"] = json!(xi);
    inputs["horizon"] = json!(horizon);
    inputs["steps"] = json!(steps);
    let result = json!({
        "covector": xi,
        "horizon": horizon,
        "steps": steps,
        "initial_hamiltonian": sp.norm().dual_value(&h0),
        "length": horizon,
        "endpoint": traj.endpoint(),
    });
    Ok(Report {
        inputs,
        seed: 0,
        result,
        table: Some(traj.to_csv()),
    })
}

fn distance(
    space: &SpaceArgs,
    target: &str,
    opts: DistanceOptions,
    path_out: Option<&Path>,
    traj_out: Option<&Path>,
) -> Result<Report, CliError> {
    let (sp, mut inputs) = polarized(space)?;
    let alg = sp.algebra();
    let g = GroupElement::new(parse_vector(target, alg.n(), "target")?);
    inputs["target"] = json!(g.coords);
    inputs["segments"] = json!(opts.segments);
    inputs["restarts"] = json!(opts.restarts);
    inputs["k1_samples"] = json!(opts.k1_samples);
    inputs["shoot"] = json!(opts.shoot);
    let est = DistanceEstimator::new(&sp, opts);
    let d = est.estimate(&g)?;
    let mut result = to_value(&d);
    result["target"] = json!(g.coords);
    result["gap"] = json!(d.gap());
    result["segments_used"] = json!(d.path.len());
    result["k1"] = json!(est.k1().value);
    if let Some(out) = path_out {
        write_file(out, &d.path.to_csv())?;
    }
    if let Some(out) = traj_out {
        let written = match &d.covector {
            Some(xi) => {
                let s0 = ExtremalState::normal_at_identity(xi.clone());
                let traj = pmp::integrate_extremal(alg, sp.norm(), &s0, d.upper, 256)?;
                write_file(out, &traj.to_csv())?;
                true
            }
            None => false,
        };
        result["trajectory_written"] = json!(written);
    }
    Ok(Report {
        inputs,
        seed: opts.seed,
        table: Some(d.path.to_csv()),
        result,
    })
}

fn load_lattice(arg: &str) -> Result<(Lattice, Value), CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let spec: LatticeSpec = serde_json::from_str(&text).map_err(|e| io_error(path, e))?;
        return Ok((Lattice::from_spec(&spec)?, to_value(&spec)));
    }
    Ok((Lattice::preset(arg)?, json!(arg.to_ascii_lowercase())))
}

fn parse_generators(lattice: &Lattice, text: &str) -> Result<GeneratingSet, CliError> {
    if !text.contains(',') && !text.contains(';') {
        return Ok(GeneratingSet::preset(lattice, text)?);
    }
    let gens: Vec<Elem> = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Elem, _>>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("gens: {e}")))?;
    Ok(GeneratingSet::new(lattice, &gens)?)
}

fn wordball(lattice: &str, gens: &str, radius: usize, budget: usize, fit_from: usize) -> Result<Report, CliError> {
    let (lat, spec) = load_lattice(lattice)?;
    let set = parse_generators(&lat, gens)?;
    let table = bfs::bfs_ball(&lat, &set, radius, budget)?;
    let spheres = table.sphere_sizes();
    let balls: Vec<usize> = (0..=radius).map(|r| table.ball_size(r)).collect();
    let result = json!({
        "radius": radius,
        "generators": set.elements(),
        "ball_size": table.len(),
        "sphere_sizes": spheres,
        "ball_sizes": balls,
        "growth_fit": { "from": fit_from, "to": radius, "degree": table.growth_degree(fit_from, radius) },
    });
    Ok(Report {
        inputs: json!({ "lattice": spec, "generators": set.elements(), "radius": radius, "budget": budget }),
        seed: 0,
        result,
        table: Some(table.to_csv()),
    })
}

fn converge(config: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<Report, CliError> {
    let text = fs::read_to_string(config).map_err(|e| io_error(config, e))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
        cfg.sampling.seed = s;
    }
    let dir = out.unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let profile = convergence::run_experiment(&cfg, Some(dir))?;
    let report = Report {
        inputs: json!({ "config": to_value(&cfg) }),
        seed: cfg.seed,
        result: json!({ "profile": to_value(&profile), "out_dir": dir.display().to_string() }),
        table: None,
    };
    let head = header("converge", &report);
    write_file(&dir.join("header.json"), &(pretty(&head) + "\n"))?;
    Ok(report)
}
