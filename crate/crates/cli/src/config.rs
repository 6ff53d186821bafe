//! Flags, the optional TOML config file, and their merge into a validated
//! [`RunConfig`]. Flags win over the file; the file wins over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use sineq_core::integrate::{DEFAULT_SAMPLES, DEFAULT_SEED};
use sineq_core::verify::DEFAULT_T_GRID;
use sineq_core::{Engine, Family};

pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "sineq", version, about = "S-inequality checks for Reinhardt sets and unconditional bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    /// Closed form when the body has one, Monte Carlo otherwise.
    Auto,
    Exact,
    Mc,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureFamily {
    /// ν_n on ℂⁿ, for Reinhardt bodies.
    #[value(alias = "gaussian")]
    ComplexGaussian,
    /// λ_n on ℝⁿ, for unconditional bodies.
    #[value(alias = "exp")]
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    #[value(name = "1d")]
    #[serde(rename = "1d")]
    OneD,
    Multidim,
    Subadditivity,
}

#[derive(Debug, Default, Clone, Args)]
pub struct CommonArgs {
    /// TOML file with any of the long flags as keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub engine: Option<EngineKind>,
    /// Monte Carlo samples [default: 1000000].
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Gauss rule order for the quadrature engine [default: 16].
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// [default: json]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write records here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure of a body under its natural measure.
    Measure(BodyArgs),
    /// Derivative and moment criteria plus the dilation curve.
    Verify(VerifyArgs),
    /// The one-dimensional tail lemma, its multidimensional form, or
    /// subadditivity of entropy.
    Entropy(EntropyArgs),
    /// Moment ratio of a norm against the sharp constant.
    Moments(MomentArgs),
    /// Verification of random bodies from one family.
    Fuzz(FuzzArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Measure(_) => "measure",
            Command::Verify(_) => "verify",
            Command::Entropy(_) => "entropy",
            Command::Moments(_) => "moments",
            Command::Fuzz(_) => "fuzz",
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct BodyArgs {
    /// Body descriptor, e.g. `polydisc:r=1,2` or `cube:a=1,n=3`.
    #[arg(long)]
    pub body: Vec<String>,
    /// Inferred from the body descriptor when omitted.
    #[arg(long, value_enum)]
    pub measure: Option<MeasureFamily>,
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Dilation factors [default: 1,1.25,1.5,2,3].
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    /// Check the product of all bodies and each factor.
    #[arg(long)]
    pub tensorize: bool,
}

#[derive(Debug, Default, Args)]
pub struct EntropyArgs {
    #[arg(long, value_enum)]
    pub lemma: Option<Lemma>,
    /// Step function `step:x=..,v=..`, optionally followed by `:exp`,
    /// `:radial` or `:atoms:x=..,w=..`. Repeat for a product function.
    #[arg(long)]
    pub f: Vec<String>,
    /// One-dimensional measure: `exp`, `radial` or `atoms:x=..,w=..`.
    #[arg(long)]
    pub mu: Option<String>,
    /// Use `1 - 1_K` for this body as the function.
    #[arg(long)]
    pub body: Option<String>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureFamily>,
}

#[derive(Debug, Default, Args)]
pub struct MomentArgs {
    /// `linf`, `l1`, `coord`, `lp:p=..` or an unconditional body descriptor.
    #[arg(long)]
    pub norm: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct FuzzArgs {
    /// One of polydisc, reinhardt-lp, reinhardt, cube, box,
    /// unconditional-lp, cross, unconditional.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub count: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
}

/// One string or a list of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    engine: Option<EngineKind>,
    samples: Option<u64>,
    seed: Option<u64>,
    order: Option<usize>,
    format: Option<Format>,
    output: Option<PathBuf>,
    body: Option<OneOrMany>,
    measure: Option<MeasureFamily>,
    grid: Option<Vec<f64>>,
    tensorize: Option<bool>,
    lemma: Option<Lemma>,
    f: Option<OneOrMany>,
    mu: Option<String>,
    norm: Option<String>,
    n: Option<usize>,
    p: Option<f64>,
    q: Option<f64>,
    family: Option<String>,
    count: Option<u64>,
}

/// Everything a command needs, with defaults applied and values checked.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub engine: Engine,
    pub samples: u64,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub bodies: Vec<String>,
    pub measure: Option<MeasureFamily>,
    pub t_grid: Vec<f64>,
    pub tensorize: bool,
    pub lemma: Lemma,
    pub f: Vec<String>,
    pub mu: Option<String>,
    pub norm: String,
    pub n: Option<usize>,
    pub p: f64,
    pub q: f64,
    pub family: Option<Family>,
    pub count: u64,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn nonempty(v: Vec<String>, fallback: Option<OneOrMany>) -> Vec<String> {
    if v.is_empty() {
        fallback.map(OneOrMany::into_vec).unwrap_or_default()
    } else {
        v
    }
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<RunConfig, ConfigError> {
        let file = match &cli.common.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let common = cli.common;
        let samples = common.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        let seed = common.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        let order = common.order.or(file.order).unwrap_or(DEFAULT_ORDER);
        if samples == 0 {
            return Err(ConfigError("--samples must be positive".into()));
        }
        if order == 0 {
            return Err(ConfigError("--order must be positive".into()));
        }
        let engine = match common.engine.or(file.engine).unwrap_or(EngineKind::Auto) {
            EngineKind::Auto => Engine::Auto { samples, seed },
            EngineKind::Exact => Engine::Exact,
            EngineKind::Mc => Engine::MonteCarlo { samples, seed },
            EngineKind::Quadrature => Engine::Quadrature { order },
        };
        let command = cli.command.name();
        let mut run = RunConfig {
            command,
            engine,
            samples,
            seed,
            format: common.format.or(file.format).unwrap_or(Format::Json),
            output: common.output.or(file.output),
            bodies: Vec::new(),
            measure: file.measure,
            t_grid: file.grid.clone().unwrap_or_else(|| DEFAULT_T_GRID.to_vec()),
            tensorize: file.tensorize.unwrap_or(false),
            lemma: file.lemma.unwrap_or(Lemma::OneD),
            f: file.f.map(OneOrMany::into_vec).unwrap_or_default(),
            mu: file.mu,
            norm: file.norm.unwrap_or_else(|| "linf".to_string()),
            n: file.n,
            p: file.p.unwrap_or(2.0),
            q: file.q.unwrap_or(1.0),
            family: None,
            count: file.count.unwrap_or(100),
        };
        let grid = |v: Vec<f64>, run: &mut RunConfig| {
            if !v.is_empty() {
                run.t_grid = v;
            }
        };
        match cli.command {
            Command::Measure(a) => {
                run.bodies = nonempty(a.body, file.body);
                run.measure = a.measure.or(run.measure);
                if run.bodies.is_empty() {
                    return Err(ConfigError("measure needs --body".into()));
                }
            }
            Command::Verify(a) => {
                run.bodies = nonempty(a.body.body, file.body);
                run.measure = a.body.measure.or(run.measure);
                run.tensorize |= a.tensorize;
                grid(a.grid, &mut run);
                if run.bodies.is_empty() {
                    return Err(ConfigError("verify needs --body".into()));
                }
            }
            Command::Entropy(a) => {
                run.lemma = a.lemma.unwrap_or(run.lemma);
                if !a.f.is_empty() {
                    run.f = a.f;
                }
                run.mu = a.mu.or(run.mu);
                run.bodies = a.body.map(|b| vec![b]).unwrap_or_else(|| nonempty(Vec::new(), file.body));
                run.measure = a.measure.or(run.measure);
                match run.lemma {
                    Lemma::OneD if run.f.len() != 1 => {
                        return Err(ConfigError("the 1d lemma needs exactly one --f".into()));
                    }
                    Lemma::Multidim | Lemma::Subadditivity if run.f.is_empty() == run.bodies.is_empty() => {
                        return Err(ConfigError("give either --body or one --f per coordinate".into()));
                    }
                    _ => {}
                }
            }
            Command::Moments(a) => {
                run.norm = a.norm.unwrap_or(run.norm);
                run.n = a.n.or(run.n);
                run.p = a.p.unwrap_or(run.p);
                run.q = a.q.unwrap_or(run.q);
                if run.n.is_none() {
                    return Err(ConfigError("moments needs --n".into()));
                }
            }
            Command::Fuzz(a) => {
                let name = a
                    .family
                    .or(file.family)
                    .ok_or_else(|| ConfigError("fuzz needs --family".into()))?;
                run.family = Some(name.parse().map_err(|e: sineq_core::Error| ConfigError(e.to_string()))?);
                run.n = a.n.or(run.n);
                run.count = a.count.unwrap_or(run.count);
                grid(a.grid, &mut run);
                if run.n.is_none() {
                    return Err(ConfigError("fuzz needs --n".into()));
                }
            }
        }
        if run.t_grid.is_empty() || run.t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(ConfigError("--grid must hold positive finite factors".into()));
        }
        Ok(run)
    }
}
