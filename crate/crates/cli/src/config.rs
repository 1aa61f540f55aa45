//! Run configuration: a flat TOML file whose keys match the long flag names,
//! overridden key by key by the command line.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use lmoments::arith::{gcd, is_prime};
use lmoments::character::DEFAULT_Q_MAX;
use lmoments::lfunction::DEFAULT_EPSILON0;
use lmoments::mollifier::{DEFAULT_M, DEFAULT_N, DEFAULT_SUPPORT_CAP};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Moments,
    Lemma21,
    Lemma22,
    Twisted,
    TwistedGeneral,
    Prop24,
    Prop25,
    Prop26,
    AfeProfile,
    Sweep,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Moments => "moments",
            Subcommand::Lemma21 => "lemma21",
            Subcommand::Lemma22 => "lemma22",
            Subcommand::Twisted => "twisted",
            Subcommand::TwistedGeneral => "twisted-general",
            Subcommand::Prop24 => "prop24",
            Subcommand::Prop25 => "prop25",
            Subcommand::Prop26 => "prop26",
            Subcommand::AfeProfile => "afe-profile",
            Subcommand::Sweep => "sweep",
        }
    }

    fn uses_mollifier(self) -> bool {
        matches!(self, Subcommand::Lemma21 | Subcommand::Lemma22 | Subcommand::Prop24 | Subcommand::Prop25 | Subcommand::Prop26)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowModeArg {
    Canonical,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Reference,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MainForm {
    Limit,
    Printed,
}

/// Command-line flags. Every flag except `--config` is also a config-file key.
#[derive(Debug, Default, Parser)]
#[command(name = "lmoments", version, about = "Moments of Dirichlet L-functions to a prime modulus")]
pub struct Cli {
    /// Experiment to run (may also come from the config file)
    #[arg(value_enum)]
    pub subcommand: Option<Subcommand>,
    /// TOML file with flat keys named like the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Prime moduli
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<u64>>,
    /// Moment exponents k
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<f64>>,
    /// Heights t of s = 1/2 + it
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    /// Twist numerators h (paired with --b by position)
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<u64>>,
    /// Twist denominators b
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<u64>>,
    /// Mollifier parameter N
    #[arg(long)]
    pub n: Option<u32>,
    /// Mollifier parameter M (threshold 10^M)
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, value_enum)]
    pub window_mode: Option<WindowModeArg>,
    /// Ascending upper bounds of the custom prime windows
    #[arg(long, value_delimiter = ',')]
    pub window_bounds: Option<Vec<u64>>,
    /// Even ℓ-values of the custom windows (default: the ℓ-recurrence)
    #[arg(long, value_delimiter = ',')]
    pub window_ell: Option<Vec<u32>>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Truncation length X of the truncated method (default q^{3/2}(|t|+1))
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Closed form of the twisted second moment
    #[arg(long, value_enum)]
    pub main_form: Option<MainForm>,
    /// Admissibility exponent ε₀ in |t| <= q^{1/4-ε₀}
    #[arg(long)]
    pub epsilon0: Option<f64>,
    /// Re s for twisted-general
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Re s' for twisted-general
    #[arg(long)]
    pub sigma_prime: Option<f64>,
    /// Im s' values for twisted-general
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t_prime: Option<Vec<f64>>,
    /// Truncation lengths of afe-profile as multiples of q
    #[arg(long, value_delimiter = ',')]
    pub x_factors: Option<Vec<f64>>,
    /// Support budget of Dirichlet-polynomial expansions
    #[arg(long)]
    pub support_cap: Option<usize>,
    /// Largest modulus accepted for the discrete-log table
    #[arg(long)]
    pub q_max: Option<u64>,
    /// Report path (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (0 = one per core)
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    subcommand: Option<Subcommand>,
    q: Option<OneOrMany<u64>>,
    k: Option<OneOrMany<f64>>,
    t: Option<OneOrMany<f64>>,
    h: Option<OneOrMany<u64>>,
    b: Option<OneOrMany<u64>>,
    n: Option<u32>,
    m: Option<u32>,
    window_mode: Option<WindowModeArg>,
    window_bounds: Option<OneOrMany<u64>>,
    window_ell: Option<OneOrMany<u32>>,
    method: Option<MethodArg>,
    truncation: Option<f64>,
    main_form: Option<MainForm>,
    epsilon0: Option<f64>,
    sigma: Option<f64>,
    sigma_prime: Option<f64>,
    t_prime: Option<OneOrMany<f64>>,
    x_factors: Option<OneOrMany<f64>>,
    support_cap: Option<usize>,
    q_max: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    workers: Option<usize>,
}

const FILE_KEYS: [&str; 24] = [
    "subcommand",
    "q",
    "k",
    "t",
    "h",
    "b",
    "n",
    "m",
    "window-mode",
    "window-bounds",
    "window-ell",
    "method",
    "truncation",
    "main-form",
    "epsilon0",
    "sigma",
    "sigma-prime",
    "t-prime",
    "x-factors",
    "support-cap",
    "q-max",
    "out",
    "format",
    "workers",
];

/// The fully resolved configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub q: Vec<u64>,
    pub k: Vec<f64>,
    pub t: Vec<f64>,
    pub h: Vec<u64>,
    pub b: Vec<u64>,
    pub n: u32,
    pub m: u32,
    pub window_mode: WindowModeArg,
    pub window_bounds: Vec<u64>,
    pub window_ell: Option<Vec<u32>>,
    pub method: MethodArg,
    pub truncation: Option<f64>,
    pub main_form: MainForm,
    pub epsilon0: f64,
    pub sigma: f64,
    pub sigma_prime: f64,
    pub t_prime: Vec<f64>,
    pub x_factors: Vec<f64>,
    pub support_cap: usize,
    pub q_max: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

impl RunConfig {
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.h.iter().copied().zip(self.b.iter().copied()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    UnknownKey { key: String },
    Invalid { key: String, message: String },
    Malformed { key: String, message: String },
}

impl ConfigError {
    pub const UNKNOWN_KEY_EXIT: u8 = 3;
    pub const INVALID_EXIT: u8 = 4;
    pub const MALFORMED_EXIT: u8 = 5;

    pub fn exit_code(&self) -> u8 {
        match self {
            ConfigError::UnknownKey { .. } => Self::UNKNOWN_KEY_EXIT,
            ConfigError::Invalid { .. } => Self::INVALID_EXIT,
            ConfigError::Malformed { .. } => Self::MALFORMED_EXIT,
        }
    }

    fn invalid(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid { key: key.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownKey { key } => write!(f, "unknown key `{key}`"),
            ConfigError::Invalid { key, message } => write!(f, "invalid value for `{key}`: {message}"),
            ConfigError::Malformed { key, message } => write!(f, "malformed value for `{key}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::invalid("config", format!("cannot read {}: {e}", path.display())))?;
    parse_file(&text)
}

fn parse_file(text: &str) -> Result<FileConfig, ConfigError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Malformed { key: "config".into(), message: e.message().to_string() })?;
    if let Some(key) = table.keys().find(|k| !FILE_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey { key: key.clone() });
    }
    match table.clone().try_into::<FileConfig>() {
        Ok(cfg) => Ok(cfg),
        Err(whole) => {
            // name the first key that fails on its own
            for (key, value) in &table {
                let single: toml::Table = std::iter::once((key.clone(), value.clone())).collect();
                if let Err(e) = single.try_into::<FileConfig>() {
                    return Err(ConfigError::Malformed { key: key.clone(), message: e.message().to_string() });
                }
            }
            Err(ConfigError::Malformed { key: "config".into(), message: whole.message().to_string() })
        }
    }
}

/// Flags override file values key by key.
pub fn resolve(cli: Cli) -> Result<RunConfig, ConfigError> {
    let file = match &cli.config {
        Some(path) => read_file(path)?,
        None => FileConfig::default(),
    };
    merge(cli, file)
}

/// Parses a config file's text as if it were given with `--config` and no other flags.
pub fn resolve_text(subcommand: Option<Subcommand>, text: &str) -> Result<RunConfig, ConfigError> {
    merge(Cli { subcommand, ..Cli::default() }, parse_file(text)?)
}

fn pick<T>(flag: Option<T>, file: Option<impl Into<T>>, default: T) -> T {
    flag.or(file.map(Into::into)).unwrap_or(default)
}

fn merge(cli: Cli, file: FileConfig) -> Result<RunConfig, ConfigError> {
    let subcommand = cli
        .subcommand
        .or(file.subcommand)
        .ok_or_else(|| ConfigError::invalid("subcommand", "no subcommand given on the command line or in the config file"))?;
    let cfg = RunConfig {
        subcommand,
        q: pick(cli.q, file.q, vec![1009]),
        k: pick(cli.k, file.k, vec![0.5]),
        t: pick(cli.t, file.t, vec![0.0]),
        h: pick(cli.h, file.h, vec![1]),
        b: pick(cli.b, file.b, vec![1]),
        n: pick(cli.n, file.n, DEFAULT_N),
        m: pick(cli.m, file.m, DEFAULT_M),
        window_mode: pick(cli.window_mode, file.window_mode, WindowModeArg::Canonical),
        window_bounds: pick(cli.window_bounds, file.window_bounds, Vec::new()),
        window_ell: cli.window_ell.or(file.window_ell.map(Into::into)),
        method: pick(cli.method, file.method, MethodArg::Reference),
        truncation: cli.truncation.or(file.truncation),
        main_form: pick(cli.main_form, file.main_form, MainForm::Limit),
        epsilon0: pick(cli.epsilon0, file.epsilon0, DEFAULT_EPSILON0),
        sigma: pick(cli.sigma, file.sigma, 0.5),
        sigma_prime: pick(cli.sigma_prime, file.sigma_prime, 0.5),
        t_prime: pick(cli.t_prime, file.t_prime, Vec::new()),
        x_factors: pick(cli.x_factors, file.x_factors, vec![1.0, 4.0, 16.0, 64.0]),
        support_cap: pick(cli.support_cap, file.support_cap, DEFAULT_SUPPORT_CAP),
        q_max: pick(cli.q_max, file.q_max, DEFAULT_Q_MAX),
        out: cli.out.or(file.out),
        format: pick(cli.format, file.format, Format::Csv),
        workers: pick(cli.workers, file.workers, 0),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn nonempty<T>(key: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(ConfigError::invalid(key, "list must not be empty"));
    }
    Ok(())
}

fn finite(key: &str, v: &[f64]) -> Result<(), ConfigError> {
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(ConfigError::invalid(key, format!("{x} is not a finite number")));
    }
    Ok(())
}

pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    use Subcommand::*;
    nonempty("q", &cfg.q)?;
    for &q in &cfg.q {
        if !is_prime(q) {
            return Err(ConfigError::invalid("q", format!("q must be prime (got {q})")));
        }
        if q < 5 {
            return Err(ConfigError::invalid("q", format!("q must be at least 5 (got {q})")));
        }
        if q > cfg.q_max {
            return Err(ConfigError::invalid("q", format!("q = {q} exceeds q-max = {}", cfg.q_max)));
        }
    }
    nonempty("t", &cfg.t)?;
    finite("t", &cfg.t)?;
    if !matches!(cfg.subcommand, Twisted | TwistedGeneral | AfeProfile) {
        nonempty("k", &cfg.k)?;
        finite("k", &cfg.k)?;
    }
    for &k in &cfg.k {
        let ok = match cfg.subcommand {
            Moments | Sweep => k >= 0.0,
            Lemma21 | Prop24 | Prop26 => k > 0.0 && k != 1.0,
            Lemma22 | Prop25 => k > 0.0 && k < 1.0,
            Twisted | TwistedGeneral | AfeProfile => true,
        };
        if !ok {
            let need = match cfg.subcommand {
                Moments | Sweep => "k >= 0",
                Lemma22 | Prop25 => "0 < k < 1",
                _ => "k > 0 and k != 1",
            };
            return Err(ConfigError::invalid("k", format!("{} needs {need} (got {k})", cfg.subcommand.name())));
        }
    }
    if cfg.h.len() != cfg.b.len() {
        return Err(ConfigError::invalid("h", format!("{} values of h for {} values of b", cfg.h.len(), cfg.b.len())));
    }
    nonempty("h", &cfg.h)?;
    for (h, b) in cfg.pairs() {
        if h == 0 || b == 0 || gcd(h, b) != 1 {
            return Err(ConfigError::invalid("h", format!("twist ({h}, {b}) needs positive coprime entries")));
        }
        if let Some(q) = cfg.q.iter().find(|&&q| h % q == 0 || b % q == 0) {
            return Err(ConfigError::invalid("h", format!("twist ({h}, {b}) is not coprime to q = {q}")));
        }
    }
    if cfg.subcommand.uses_mollifier() {
        if cfg.n == 0 {
            return Err(ConfigError::invalid("n", "N must be positive"));
        }
        match cfg.window_mode {
            WindowModeArg::Canonical => {
                if !cfg.window_bounds.is_empty() || cfg.window_ell.is_some() {
                    return Err(ConfigError::invalid("window-bounds", "window bounds and ℓ-values need window-mode = custom"));
                }
            }
            WindowModeArg::Custom => {
                nonempty("window-bounds", &cfg.window_bounds)?;
                if cfg.window_bounds.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ConfigError::invalid("window-bounds", "bounds must be strictly ascending"));
                }
                if let Some(ell) = &cfg.window_ell {
                    if ell.len() != cfg.window_bounds.len() {
                        return Err(ConfigError::invalid(
                            "window-ell",
                            format!("{} ℓ-values for {} windows", ell.len(), cfg.window_bounds.len()),
                        ));
                    }
                    if ell.iter().any(|&l| l == 0 || l % 2 == 1) {
                        return Err(ConfigError::invalid("window-ell", "every ℓ must be a positive even integer"));
                    }
                }
            }
        }
    }
    if let Some(x) = cfg.truncation {
        if !x.is_finite() || x < 1.0 {
            return Err(ConfigError::invalid("truncation", format!("X must be >= 1 (got {x})")));
        }
        if cfg.method != MethodArg::Truncated {
            return Err(ConfigError::invalid("truncation", "a truncation length needs method = truncated"));
        }
    }
    if !(cfg.epsilon0 > 0.0 && cfg.epsilon0 < 0.25) {
        return Err(ConfigError::invalid("epsilon0", format!("must lie in (0, 1/4) (got {})", cfg.epsilon0)));
    }
    if cfg.subcommand == TwistedGeneral {
        for (key, sigma) in [("sigma", cfg.sigma), ("sigma-prime", cfg.sigma_prime)] {
            if !(sigma > 0.0 && sigma < 1.0) {
                return Err(ConfigError::invalid(key, format!("must lie in (0, 1) (got {sigma})")));
            }
        }
        nonempty("t-prime", &cfg.t_prime)?;
        finite("t-prime", &cfg.t_prime)?;
    }
    if cfg.subcommand == AfeProfile {
        nonempty("x-factors", &cfg.x_factors)?;
        if cfg.x_factors.iter().any(|&f| !f.is_finite() || f <= 0.0) || cfg.x_factors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::invalid("x-factors", "factors must be positive and strictly ascending"));
        }
        if cfg.q.iter().any(|&q| cfg.x_factors[0] * (q as f64) < 1.0) {
            return Err(ConfigError::invalid("x-factors", "every truncation length must be >= 1"));
        }
    }
    if cfg.support_cap == 0 {
        return Err(ConfigError::invalid("support-cap", "must be positive"));
    }
    Ok(())
}
