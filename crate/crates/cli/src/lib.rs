//! Command-line front end.
//!
//! Every subcommand reads coefficient files in the `n,re,im` CSV format and
//! writes either a CSV table or a JSON document. Both carry the effective
//! configuration; wall-clock time goes to stderr so that artifacts from
//! identical runs are byte-identical.
//!
//! Exit codes: 0 success, 2 invalid input, 3 resource cap (partial results
//! are still written), 1 numerical failure, 64 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use dirichlet_core::bohrlift::{lift, sup_norm_polytorus, SupNormMode};
use dirichlet_core::characters::{
    derive_seed, growth_experiment, prime_supported_experiment, sample_character, zeta_chi_explore,
    ExperimentOptions, GridSpec,
};
use dirichlet_core::dilation::{
    completeness_check, construct_alternating, construct_cyclic_example, frame_bounds_estimate, gram_section,
    riesz_check, SineSystemSpec, TailModel,
};
use dirichlet_core::io::{read_coefficients, read_prime_values, write_coefficients, write_prime_values, write_table};
use dirichlet_core::numtheory::FactorTable;
use dirichlet_core::series::{
    carlson_mean, convolve, estimate_sigma_c, euler_norms, evaluate, norm_h, norm_hd, reciprocal, DirichletPoly,
    Tolerances,
};
use dirichlet_core::{Error, PrimeMap};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE_CAP: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "dirichlet", version, about = "Dirichlet series, random characters and dilated sine systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Sieve limit.
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    /// Truncate input series to this many coefficients.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Flat `key=value` configuration file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Absolute tolerance for coefficient comparisons.
    #[arg(long, global = true)]
    pub coeff_tol: Option<f64>,
    /// Relative tolerance for product identities.
    #[arg(long, global = true)]
    pub product_tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SpecArgs {
    /// Coefficient CSV of φ (normalized so a_1 = 1).
    pub input: PathBuf,
    /// Analytic continuation beyond the stored coefficients.
    #[arg(long, value_enum, default_value_t = TailKind::Zero)]
    pub tail: TailKind,
    /// Prime-value CSV for an `euler` or `inverse-euler` tail.
    #[arg(long)]
    pub tail_primes: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    Zero,
    Euler,
    InverseEuler,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupMode {
    Grid,
    MultiStart,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Dirichlet convolution of two coefficient files.
    Convolve { left: PathBuf, right: PathBuf },
    /// Convolution inverse.
    Invert { input: PathBuf },
    /// f(σ + it).
    Eval {
        input: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Hilbert-space norms and abscissa estimate; with --primes the input is
    /// a prime-value file and closed-form Euler-product norms are reported.
    Norms {
        input: PathBuf,
        #[arg(long)]
        primes: bool,
    },
    /// Sup norm of the lifted polynomial on the polytorus.
    Supnorm {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SupMode::Grid)]
        mode: SupMode,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value_t = 32)]
        starts: usize,
    },
    /// Power-series lift in one variable per prime.
    Lift { input: PathBuf },
    /// Growth of character-twisted partial sums.
    McGrowth {
        /// Coefficient file; all ones when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        characters: usize,
        #[arg(long, default_value_t = 100_000)]
        n_max: usize,
        /// Record the running sup at dyadic N.
        #[arg(long)]
        trace: bool,
    },
    /// Prime-supported sums against the maximal inequality.
    McPrimes {
        /// Prime-value file; otherwise a_p = p^{-tau}.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 500)]
        characters: usize,
        #[arg(long, default_value_t = 100_000)]
        n_max: usize,
    },
    /// Partial Euler products of a twisted zeta function (exploratory).
    McZeta {
        /// Character index under the master seed.
        #[arg(long, default_value_t = 0)]
        character: u64,
        #[arg(long, default_value_t = 0.6)]
        sigma_min: f64,
        #[arg(long, default_value_t = 2.0)]
        sigma_max: f64,
        #[arg(long, default_value_t = 8)]
        sigma_steps: usize,
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long, default_value_t = 41)]
        t_steps: usize,
        #[arg(long, default_value_t = 10_000)]
        p_max: u64,
    },
    /// Mean square on a vertical segment against its closed form.
    Carlson {
        input: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long = "T", default_value_t = 1000.0)]
        t_max: f64,
    },
    /// Gram section of the dilated system.
    Gram {
        #[command(flatten)]
        #[serde(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 16)]
        size: usize,
    },
    /// Riesz-basis verdict.
    RieszCheck {
        #[command(flatten)]
        #[serde(flatten)]
        spec: SpecArgs,
    },
    /// Completeness verdict.
    CompleteCheck {
        #[command(flatten)]
        #[serde(flatten)]
        spec: SpecArgs,
    },
    /// Block construction with certified real sign changes.
    #[command(name = "construct-413")]
    #[serde(rename = "construct-413")]
    ConstructAlternating {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 10_000_000)]
        tail_cap: u64,
    },
    /// Complete system whose symbol is not bounded below.
    #[command(name = "construct-55")]
    #[serde(rename = "construct-55")]
    ConstructCyclic {
        #[arg(long, default_value_t = 100_000)]
        p_max: u64,
    },
}

/// Effective configuration after merging the config file and flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub master_seed: u64,
    pub sieve_limit: usize,
    pub truncation: Option<usize>,
    pub tolerances: Tolerances,
    pub format: Option<Format>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            sieve_limit: 1 << 20,
            truncation: None,
            tolerances: Tolerances::default(),
            format: None,
            output: None,
            threads: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Unsupported(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::ResourceCap(_)) => EXIT_RESOURCE_CAP,
            CliError::Core(Error::Numerical(_)) => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_config_file(path: &Path, cfg: &mut RunConfig) -> CliResult<()> {
    let text = fs::read_to_string(path).map_err(Error::from)?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        let bad = |what: &str| CliError::Config(format!("line {}: invalid {what} {v:?}", i + 1));
        match k {
            "seed" | "master_seed" => cfg.master_seed = v.parse().map_err(|_| bad(k))?,
            "limit" | "sieve_limit" => cfg.sieve_limit = v.parse().map_err(|_| bad(k))?,
            "truncation" => cfg.truncation = Some(v.parse().map_err(|_| bad(k))?),
            "threads" => cfg.threads = Some(v.parse().map_err(|_| bad(k))?),
            "coeff_abs" | "coeff_tol" => cfg.tolerances.coeff_abs = v.parse().map_err(|_| bad(k))?,
            "product_rel" | "product_tol" => cfg.tolerances.product_rel = v.parse().map_err(|_| bad(k))?,
            "format" => cfg.format = Some(Format::from_str(v, true).map_err(|_| bad(k))?),
            "output" => cfg.output = Some(PathBuf::from(v)),
            _ => return Err(CliError::Config(format!("line {}: unknown key {k:?}", i + 1))),
        }
    }
    Ok(())
}

pub fn resolve_config(g: &GlobalArgs) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &g.config {
        parse_config_file(path, &mut cfg)?;
    }
    if let Some(v) = g.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = g.limit {
        cfg.sieve_limit = v;
    }
    if let Some(v) = g.truncation {
        cfg.truncation = Some(v);
    }
    if let Some(v) = g.threads {
        cfg.threads = Some(v);
    }
    if let Some(v) = g.coeff_tol {
        cfg.tolerances.coeff_abs = v;
    }
    if let Some(v) = g.product_tol {
        cfg.tolerances.product_rel = v;
    }
    if let Some(v) = g.format {
        cfg.format = Some(v);
    }
    if let Some(v) = &g.output {
        cfg.output = Some(v.clone());
    }
    if cfg.sieve_limit == 0 || cfg.truncation == Some(0) || cfg.threads == Some(0) {
        return Err(CliError::Config("limits must be positive".into()));
    }
    for (name, t) in [("coeff_abs", cfg.tolerances.coeff_abs), ("product_rel", cfg.tolerances.product_rel)] {
        if !(t > 0.0 && t <= 1e-2) {
            return Err(CliError::Config(format!("{name} must lie in (0, 1e-2], got {t}")));
        }
    }
    Ok(cfg)
}

/// What a subcommand produced.
pub struct Artifact {
    pub json: Value,
    pub csv: Option<Table>,
    pub default_format: Format,
    /// Exit status to report after writing (3 for partial results).
    pub status: i32,
}

pub enum Table {
    Coefficients(DirichletPoly),
    Primes(PrimeMap),
    Rows { header: Vec<&'static str>, rows: Vec<Vec<String>> },
}

impl Artifact {
    fn json<T: Serialize>(v: &T) -> CliResult<Self> {
        Ok(Self {
            json: serde_json::to_value(v).map_err(Error::from)?,
            csv: None,
            default_format: Format::Json,
            status: EXIT_OK,
        })
    }

    fn with_csv(mut self, t: Table, default_csv: bool) -> Self {
        self.csv = Some(t);
        if default_csv {
            self.default_format = Format::Csv;
        }
        self
    }
}

fn read_series(path: &Path, cfg: &RunConfig) -> CliResult<DirichletPoly> {
    let f = read_coefficients(fs::File::open(path).map_err(Error::from)?)?;
    Ok(match cfg.truncation {
        Some(n) if n < f.len() => f.truncate(n)?,
        _ => f,
    })
}

fn read_primes(path: &Path) -> CliResult<PrimeMap> {
    Ok(read_prime_values(fs::File::open(path).map_err(Error::from)?)?)
}

fn read_spec(args: &SpecArgs, cfg: &RunConfig) -> CliResult<SineSystemSpec> {
    let coeffs = read_series(&args.input, cfg)?;
    let tail = match (args.tail, &args.tail_primes) {
        (TailKind::Zero, None) => TailModel::Zero,
        (TailKind::Zero, Some(_)) => return Err(CliError::Unsupported("--tail-primes needs --tail euler or inverse-euler".into())),
        (_, None) => return Err(CliError::Unsupported("--tail euler/inverse-euler needs --tail-primes".into())),
        (TailKind::Euler, Some(p)) => TailModel::Euler(read_primes(p)?),
        (TailKind::InverseEuler, Some(p)) => TailModel::InverseEuler(read_primes(p)?),
    };
    Ok(SineSystemSpec::with_tail(coeffs, tail)?)
}

fn table_for(cfg: &RunConfig, needed: usize) -> CliResult<FactorTable> {
    if needed > cfg.sieve_limit {
        return Err(CliError::Core(Error::InvalidArgument(format!(
            "needs a sieve up to {needed}, above --limit {}",
            cfg.sieve_limit
        ))));
    }
    Ok(FactorTable::new(needed.max(2))?)
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn execute(cmd: &Command, cfg: &RunConfig) -> CliResult<Artifact> {
    match cmd {
        Command::Convolve { left, right } => {
            let h = convolve(&read_series(left, cfg)?, &read_series(right, cfg)?);
            Ok(Artifact::json(&h)?.with_csv(Table::Coefficients(h), true))
        }
        Command::Invert { input } => {
            let h = reciprocal(&read_series(input, cfg)?)?;
            Ok(Artifact::json(&h)?.with_csv(Table::Coefficients(h), true))
        }
        Command::Eval { input, sigma, t } => {
            let v = evaluate(&read_series(input, cfg)?, Complex64::new(*sigma, *t));
            let row = vec![sigma.to_string(), t.to_string(), v.re.to_string(), v.im.to_string()];
            Ok(Artifact::json(&json!({ "sigma": sigma, "t": t, "value": complex_json(v) }))?.with_csv(
                Table::Rows {
                    header: vec!["sigma", "t", "re", "im"],
                    rows: vec![row],
                },
                false,
            ))
        }
        Command::Norms { input, primes } => {
            if *primes {
                return Artifact::json(&euler_norms(&read_primes(input)?));
            }
            let f = read_series(input, cfg)?;
            let table = table_for(cfg, f.len())?;
            let sigma = estimate_sigma_c(&f).ok();
            Artifact::json(&json!({
                "norm_h": norm_h(&f),
                "norm_hd": norm_hd(&f, &table)?,
                "sigma_c": sigma,
            }))
        }
        Command::Supnorm {
            input,
            mode,
            resolution,
            starts,
        } => {
            let f = read_series(input, cfg)?;
            let p = lift(&f, &table_for(cfg, f.len())?)?;
            let mode = match mode {
                SupMode::Grid => SupNormMode::Grid { resolution: *resolution },
                SupMode::MultiStart => SupNormMode::MultiStart {
                    starts: *starts,
                    seed: cfg.master_seed,
                },
            };
            Artifact::json(&sup_norm_polytorus(&p, mode)?)
        }
        Command::Lift { input } => {
            let f = read_series(input, cfg)?;
            Artifact::json(&lift(&f, &table_for(cfg, f.len())?)?)
        }
        Command::McGrowth {
            input,
            characters,
            n_max,
            trace,
        } => {
            let f = match input {
                Some(p) => read_series(p, cfg)?,
                None => DirichletPoly::ones(*n_max)?,
            };
            let opts = ExperimentOptions {
                master_seed: cfg.master_seed,
                num_characters: *characters,
                n_max: *n_max,
            };
            let rep = growth_experiment(&f, opts, *trace, &table_for(cfg, *n_max)?)?;
            let rows = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.index.to_string(),
                        r.seed.to_string(),
                        r.exponent.to_string(),
                        r.residual.to_string(),
                        r.sup.to_string(),
                        r.normalized_sup.to_string(),
                    ]
                })
                .collect();
            Ok(Artifact::json(&rep)?.with_csv(
                Table::Rows {
                    header: vec!["index", "seed", "exponent", "residual", "sup", "normalized_sup"],
                    rows,
                },
                false,
            ))
        }
        Command::McPrimes {
            input,
            tau,
            characters,
            n_max,
        } => {
            let values = match input {
                Some(p) => read_primes(p)?,
                None => {
                    let table = table_for(cfg, *n_max)?;
                    table
                        .primes()
                        .iter()
                        .map(|&p| (p, Complex64::new((p as f64).powf(-tau), 0.0)))
                        .collect()
                }
            };
            let opts = ExperimentOptions {
                master_seed: cfg.master_seed,
                num_characters: *characters,
                n_max: *n_max,
            };
            let rep = prime_supported_experiment(&values, opts)?;
            let rows = rep
                .rows
                .iter()
                .map(|r| vec![r.index.to_string(), r.seed.to_string(), r.sup.to_string()])
                .collect();
            Ok(Artifact::json(&rep)?.with_csv(
                Table::Rows {
                    header: vec!["index", "seed", "sup"],
                    rows,
                },
                false,
            ))
        }
        Command::McZeta {
            character,
            sigma_min,
            sigma_max,
            sigma_steps,
            t_min,
            t_max,
            t_steps,
            p_max,
        } => {
            let chi = sample_character(derive_seed(cfg.master_seed, *character));
            let grid = GridSpec {
                sigma_min: *sigma_min,
                sigma_max: *sigma_max,
                sigma_steps: *sigma_steps,
                t_min: *t_min,
                t_max: *t_max,
                t_steps: *t_steps,
            };
            let table = table_for(cfg, *p_max as usize)?;
            Artifact::json(&zeta_chi_explore(&chi, *sigma_min, &grid, *p_max, &table)?)
        }
        Command::Carlson { input, sigma, t_max } => Artifact::json(&carlson_mean(&read_series(input, cfg)?, *sigma, *t_max)?),
        Command::Gram { spec, size } => {
            let s = read_spec(spec, cfg)?;
            let g = gram_section(&s, *size, &table_for(cfg, (*size).max(s.coeffs().len()))?)?;
            let bounds = frame_bounds_estimate(&g)?;
            let mut rows = Vec::with_capacity(g.entries.len());
            for j in 1..=g.size {
                for k in 1..=g.size {
                    let v = g.get(j, k);
                    rows.push(vec![j.to_string(), k.to_string(), v.re.to_string(), v.im.to_string()]);
                }
            }
            Ok(Artifact::json(&json!({ "gram": g, "frame_bounds": bounds }))?.with_csv(
                Table::Rows {
                    header: vec!["j", "k", "re", "im"],
                    rows,
                },
                true,
            ))
        }
        Command::RieszCheck { spec } => {
            let s = read_spec(spec, cfg)?;
            Artifact::json(&riesz_check(&s, &table_for(cfg, s.coeffs().len())?, &cfg.tolerances)?)
        }
        Command::CompleteCheck { spec } => {
            let s = read_spec(spec, cfg)?;
            Artifact::json(&completeness_check(&s, &table_for(cfg, s.coeffs().len())?, &cfg.tolerances)?)
        }
        Command::ConstructAlternating { k, tail_cap } => {
            let r = construct_alternating(*k, *tail_cap)?;
            let coeffs = r.coefficients()?;
            let mut a = Artifact::json(&r)?.with_csv(Table::Coefficients(coeffs), false);
            if !r.complete {
                a.status = EXIT_RESOURCE_CAP;
            }
            Ok(a)
        }
        Command::ConstructCyclic { p_max } => {
            let table = table_for(cfg, *p_max as usize)?;
            let ex = construct_cyclic_example(*p_max, &table)?;
            let verdict = completeness_check(&ex.spec, &table, &cfg.tolerances)?;
            Ok(Artifact::json(&json!({
                "p_max": p_max,
                "primes": ex.prime_values.len(),
                "square_sum_trace": ex.square_sum_trace,
                "last_increment": ex.last_increment,
                "profile": ex.profile,
                "completeness": verdict,
            }))?
            .with_csv(Table::Primes(ex.prime_values), false))
        }
    }
}

fn config_pairs(cmd: &Command, cfg: &RunConfig) -> CliResult<Vec<(String, String)>> {
    let mut pairs = vec![
        ("dirichlet_core".to_string(), dirichlet_core::VERSION.to_string()),
        ("dirichlet_cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("master_seed".to_string(), cfg.master_seed.to_string()),
        ("sieve_limit".to_string(), cfg.sieve_limit.to_string()),
        (
            "truncation".to_string(),
            cfg.truncation.map_or("none".to_string(), |t| t.to_string()),
        ),
        ("coeff_abs".to_string(), cfg.tolerances.coeff_abs.to_string()),
        ("product_rel".to_string(), cfg.tolerances.product_rel.to_string()),
    ];
    if let Value::Object(m) = serde_json::to_value(cmd).map_err(Error::from)? {
        for (k, v) in m {
            let text = match v {
                Value::String(s) => s,
                Value::Null => "none".into(),
                other => other.to_string(),
            };
            pairs.push((k, text));
        }
    }
    Ok(pairs)
}

/// Renders the artifact in the chosen format.
pub fn render(art: &Artifact, cmd: &Command, cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let format = cfg.format.unwrap_or(art.default_format);
    let pairs = config_pairs(cmd, cfg)?;
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            let config: serde_json::Map<String, Value> =
                pairs.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            let doc = json!({ "config": config, "result": art.json });
            serde_json::to_writer_pretty(&mut buf, &doc).map_err(Error::from)?;
            buf.push(b'\n');
        }
        Format::Csv => match &art.csv {
            Some(Table::Coefficients(a)) => write_coefficients(&mut buf, a, &pairs)?,
            Some(Table::Primes(m)) => write_prime_values(&mut buf, m, &pairs)?,
            Some(Table::Rows { header, rows }) => write_table(&mut buf, header, rows, &pairs)?,
            None => return Err(CliError::Unsupported("this subcommand has no CSV output; use --format json".into())),
        },
    }
    Ok(buf)
}

fn run_parsed(cli: &Cli) -> CliResult<i32> {
    let cfg = resolve_config(&cli.global)?;
    let start = Instant::now();
    let work = || execute(&cli.command, &cfg);
    let art = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let bytes = render(&art, &cli.command, &cfg)?;
    match &cfg.output {
        Some(path) => fs::write(path, &bytes).map_err(Error::from)?,
        None => std::io::stdout().write_all(&bytes).map_err(Error::from)?,
    }
    eprintln!(
        "wall_clock_s={:.3} threads={}",
        start.elapsed().as_secs_f64(),
        cfg.threads.unwrap_or_else(rayon::current_num_threads)
    );
    Ok(art.status)
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_parsed(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
