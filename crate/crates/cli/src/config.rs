//! Job configuration: flags, then a key=value file, then `THETAWELL_TOL`,
//! then built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use thetawell::{SystemParams, Truncation};

pub const TOL_ENV: &str = "THETAWELL_TOL";

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => invalid(format!("unknown format `{other}`")),
        }
    }
}

/// Inclusive range of `mu`, written `3` or `1..5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MuRange {
    pub first: u32,
    pub last: u32,
}

impl MuRange {
    pub fn single(&self) -> Option<u32> {
        (self.first == self.last).then_some(self.first)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.first..=self.last
    }
}

impl FromStr for MuRange {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| -> Result<u32, ConfigError> {
            match t.trim().parse::<u32>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => invalid(format!("mu must be a positive integer, got `{t}`")),
            }
        };
        let (first, last) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if first > last {
            return invalid(format!("empty mu range `{s}`"));
        }
        Ok(Self { first, last })
    }
}

impl fmt::Display for MuRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.single() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}..{}", self.first, self.last),
        }
    }
}

/// Linear inclusive sweep `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        thetawell::field::linspace(self.start, self.stop, self.count)
    }
}

impl FromStr for Sweep {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return invalid(format!("sweep must be start:stop:count, got `{s}`"));
        };
        let start = positive(a, "sweep start")?;
        let stop = positive(b, "sweep stop")?;
        let count = match n.trim().parse::<usize>() {
            Ok(c) if c >= 1 => c,
            _ => return invalid(format!("sweep count must be a positive integer, got `{n}`")),
        };
        Ok(Self { start, stop, count })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

fn positive(s: &str, what: &str) -> Result<f64, ConfigError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => invalid(format!("{what} must be a positive number, got `{s}`")),
    }
}

/// Options shared by every subcommand. All optional here so that the config
/// file and defaults can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    /// Quantum number, or an inclusive range such as 1..5 (thermo, verify)
    #[arg(long)]
    pub mu: Option<String>,
    /// Solution parameter beta > 0
    #[arg(long)]
    pub beta: Option<f64>,
    /// Linear beta sweep start:stop:count (thermo)
    #[arg(long)]
    pub beta_sweep: Option<String>,
    /// Number of x samples on [0, l]
    #[arg(long)]
    pub grid_x: Option<usize>,
    /// Number of t samples on [0, t_span T_mu]
    #[arg(long)]
    pub grid_t: Option<usize>,
    /// Time span in periods T_mu
    #[arg(long)]
    pub t_span: Option<f64>,
    /// Particle mass (explicit units)
    #[arg(long)]
    pub m: Option<f64>,
    /// Well width (explicit units)
    #[arg(long)]
    pub l: Option<f64>,
    /// Reduced Planck constant (explicit units)
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Series truncation tolerance in (0, 1e-4]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest admissible series cutoff
    #[arg(long)]
    pub max_index: Option<usize>,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat key=value file supplying any of the options above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved job settings.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub mu: MuRange,
    pub beta: Option<f64>,
    pub beta_sweep: Option<Sweep>,
    pub grid_x: usize,
    pub grid_t: usize,
    pub t_span: f64,
    pub sys: SystemParams,
    pub explicit_units: bool,
    pub trunc: Truncation,
    pub out: Option<PathBuf>,
    pub format: Format,
}

const KEYS: [&str; 13] = [
    "mu", "beta", "beta_sweep", "grid_x", "grid_t", "t_span", "m", "l", "hbar", "tol", "max_index", "out", "format",
];

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return invalid(format!("line {}: expected key=value, got `{raw}`", n + 1));
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return invalid(format!("line {}: unknown key `{key}`", n + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

impl JobArgs {
    /// Resolve against the config file (if any), the tolerance variable
    /// `env_tol` and defaults.
    pub fn resolve(&self, env_tol: Option<String>) -> Result<JobConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let text = |key: &str, flag: Option<String>| flag.or_else(|| file.get(key).cloned());
        let number = |key: &str, flag: Option<f64>| -> Result<Option<f64>, ConfigError> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file.get(key).map(|s| positive(s, key)).transpose(),
            }
        };
        let count = |key: &str, flag: Option<usize>| -> Result<Option<usize>, ConfigError> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file
                    .get(key)
                    .map(|s| s.trim().parse::<usize>().map_err(|_| ConfigError(format!("{key} must be an integer, got `{s}`"))))
                    .transpose(),
            }
        };

        let mu: MuRange = text("mu", self.mu.clone()).unwrap_or_else(|| "1".into()).parse()?;
        let beta = number("beta", self.beta)?;
        if let Some(b) = beta {
            if !(b > 0.0 && b.is_finite()) {
                return invalid(format!("beta must be positive, got {b}"));
            }
        }
        let beta_sweep = text("beta_sweep", self.beta_sweep.clone()).map(|s| s.parse()).transpose()?;

        let grid_x = count("grid_x", self.grid_x)?.unwrap_or(101);
        let grid_t = count("grid_t", self.grid_t)?.unwrap_or(51);
        if grid_x < 2 || grid_t < 2 {
            return invalid(format!("grid sizes must be at least 2, got {grid_x} x {grid_t}"));
        }
        let t_span = number("t_span", self.t_span)?.unwrap_or(1.0);
        if !(t_span > 0.0 && t_span.is_finite()) {
            return invalid(format!("t_span must be positive, got {t_span}"));
        }

        let (m, l, hbar) = (number("m", self.m)?, number("l", self.l)?, number("hbar", self.hbar)?);
        let explicit_units = m.is_some() || l.is_some() || hbar.is_some();
        let sys = SystemParams::new(m.unwrap_or(1.0), l.unwrap_or(1.0), hbar.unwrap_or(1.0))
            .map_err(|e| ConfigError(e.to_string()))?;

        let env_tol = env_tol.map(|s| positive(&s, TOL_ENV)).transpose()?;
        let tol = match self.tol {
            Some(v) => v,
            None => match file.get("tol") {
                Some(s) => positive(s, "tol")?,
                None => env_tol.unwrap_or(Truncation::DEFAULT_TOL),
            },
        };
        if !(tol > 0.0 && tol <= 1e-4) {
            return invalid(format!("tol must lie in (0, 1e-4], got {tol}"));
        }
        let max_index = count("max_index", self.max_index)?.unwrap_or(Truncation::DEFAULT_MAX_INDEX);
        let trunc = Truncation::new(tol, max_index).map_err(|e| ConfigError(e.to_string()))?;

        let out = self.out.clone().or_else(|| file.get("out").map(PathBuf::from));
        let format = match self.format {
            Some(f) => f,
            None => file.get("format").map(|s| s.parse()).transpose()?.unwrap_or(Format::Csv),
        };

        Ok(JobConfig { mu, beta, beta_sweep, grid_x, grid_t, t_span, sys, explicit_units, trunc, out, format })
    }
}

impl JobConfig {
    pub fn single_mu(&self) -> Result<u32, ConfigError> {
        self.mu.single().ok_or_else(|| ConfigError(format!("this command takes a single mu, got {}", self.mu)))
    }

    pub fn require_beta(&self) -> Result<f64, ConfigError> {
        self.beta.ok_or_else(|| ConfigError("beta is required".into()))
    }

    /// The betas a thermo table runs over: the sweep, else the single beta.
    pub fn betas(&self) -> Result<Vec<f64>, ConfigError> {
        match (self.beta_sweep, self.beta) {
            (Some(s), _) => Ok(s.values()),
            (None, Some(b)) => Ok(vec![b]),
            (None, None) => invalid("thermo needs --beta or --beta-sweep"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_ranges() {
        assert_eq!("3".parse::<MuRange>().unwrap().single(), Some(3));
        let r: MuRange = "1..5".parse().unwrap();
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        assert_eq!("2..=4".parse::<MuRange>().unwrap().last, 4);
        assert!("0".parse::<MuRange>().is_err());
        assert!("5..1".parse::<MuRange>().is_err());
        assert!("x".parse::<MuRange>().is_err());
    }

    #[test]
    fn sweeps() {
        let s: Sweep = "0.05:2:40".parse().unwrap();
        let v = s.values();
        assert_eq!(v.len(), 40);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[39], 2.0);
        assert!("1:2".parse::<Sweep>().is_err());
        assert!("-1:2:3".parse::<Sweep>().is_err());
    }

    #[test]
    fn config_text() {
        let map = parse_config("# comment\nmu = 2\ngrid-x=11 # trailing\n\n").unwrap();
        assert_eq!(map["mu"], "2");
        assert_eq!(map["grid_x"], "11");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("mu 2").is_err());
    }

    #[test]
    fn precedence() {
        let dir = std::env::temp_dir().join(format!("thetawell-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("job.cfg");
        std::fs::write(&path, "mu = 4\nbeta = 0.3\ntol = 1e-10\n").unwrap();
        let args = JobArgs { mu: Some("2".into()), config: Some(path), ..Default::default() };
        let cfg = args.resolve(Some("1e-8".into())).unwrap();
        assert_eq!(cfg.mu.single(), Some(2));
        assert_eq!(cfg.beta, Some(0.3));
        assert_eq!(cfg.trunc.tol(), 1e-10);
        let cfg = JobArgs::default().resolve(Some("1e-8".into())).unwrap();
        assert_eq!(cfg.trunc.tol(), 1e-8);
        let cfg = JobArgs::default().resolve(None).unwrap();
        assert_eq!(cfg.trunc.tol(), Truncation::DEFAULT_TOL);
        assert!(!cfg.explicit_units);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |args: JobArgs| args.resolve(None).is_err();
        assert!(bad(JobArgs { grid_x: Some(1), ..Default::default() }));
        assert!(bad(JobArgs { tol: Some(1e-3), ..Default::default() }));
        assert!(bad(JobArgs { beta: Some(-1.0), ..Default::default() }));
        assert!(bad(JobArgs { l: Some(0.0), ..Default::default() }));
        assert!(JobArgs::default().resolve(Some("abc".into())).is_err());
    }
}
