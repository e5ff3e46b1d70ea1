//! Run configuration: an optional flat `key = value` file with command-line
//! flags layered on top.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gsqc_core::adiabatic::ScheduleKind;
use gsqc_core::catalog::Stage;
use gsqc_core::spectral::lambda_grid;
use gsqc_core::Method;

use crate::error::CliError;

/// `start:stop:count` over λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub const fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        lambda_grid(self.start, self.stop, self.count)
            .map_err(|e| CliError::Input(format!("--grid {self}: {e}")))
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected start:stop:count, got '{s}'"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("bad number '{x}' in grid"));
        let count = c.parse::<usize>().map_err(|_| format!("bad count '{c}' in grid"))?;
        Ok(Self::new(num(a)?, num(b)?, count))
    }
}

/// Inclusive `lo:hi` range of step counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRange {
    pub lo: usize,
    pub hi: usize,
}

impl StepRange {
    pub fn values(&self) -> Vec<usize> {
        (self.lo..=self.hi).collect()
    }
}

impl fmt::Display for StepRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for StepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad step count '{x}'"));
        Ok(Self { lo: num(a)?, hi: num(b)? })
    }
}

/// Circuit family for `gap-scan --family`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    BellDisentangle,
    Identity,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::BellDisentangle => "bell-disentangle",
            Family::Identity => "identity",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bell-disentangle" => Ok(Family::BellDisentangle),
            "identity" => Ok(Family::Identity),
            other => Err(format!("unknown family '{other}' (expected bell-disentangle|identity)")),
        }
    }
}

/// One stage of the Bell family, or all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageChoice {
    One(Stage),
    All,
}

impl StageChoice {
    pub fn stages(self) -> Vec<Stage> {
        match self {
            StageChoice::One(s) => vec![s],
            StageChoice::All => Stage::ALL.to_vec(),
        }
    }
}

impl fmt::Display for StageChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageChoice::One(s) => s.fmt(f),
            StageChoice::All => f.write_str("all"),
        }
    }
}

impl FromStr for StageChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(StageChoice::All);
        }
        s.parse().map(StageChoice::One).map_err(|e: gsqc_core::Error| e.to_string())
    }
}

/// Every setting a command may read. `None` means "use the command's default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub circuit: Option<PathBuf>,
    pub lambda: Option<f64>,
    pub grid: Option<GridSpec>,
    pub refine: Option<bool>,
    pub schedule: Option<ScheduleKind>,
    pub total_time: Option<f64>,
    pub dt: Option<f64>,
    pub method: Option<Method>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub operator: Option<PathBuf>,
    pub family: Option<Family>,
    pub n_range: Option<StepRange>,
    pub stage: Option<StageChoice>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("invalid value '{value}' for '{key}': {e}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("invalid value '{value}' for '{key}': expected true or false")),
    }
}

impl RunConfig {
    /// Parse the flat file form. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", k + 1))?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value).map_err(|e| format!("line {}: {e}", k + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "circuit" => self.circuit = Some(value.into()),
            "lambda" => self.lambda = Some(parse_value(key, value)?),
            "grid" => self.grid = Some(parse_value(key, value)?),
            "refine" => self.refine = Some(parse_bool(key, value)?),
            "schedule" => self.schedule = Some(parse_value(key, value)?),
            "T" => self.total_time = Some(parse_value(key, value)?),
            "dt" => self.dt = Some(parse_value(key, value)?),
            "method" => self.method = Some(parse_value(key, value)?),
            "out" => self.out = Some(value.into()),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "threads" => self.threads = Some(parse_value(key, value)?),
            "operator" => self.operator = Some(value.into()),
            "family" => self.family = Some(parse_value(key, value)?),
            "n-range" => self.n_range = Some(parse_value(key, value)?),
            "stage" => self.stage = Some(parse_value(key, value)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Render back to the file form, one line per set field.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push_str(&format!("{k} = {v}\n"));
            }
        };
        put("circuit", self.circuit.as_ref().map(|p| p.display().to_string()));
        put("lambda", self.lambda.map(|v| v.to_string()));
        put("grid", self.grid.map(|v| v.to_string()));
        put("refine", self.refine.map(|v| v.to_string()));
        put("schedule", self.schedule.map(|v| v.to_string()));
        put("T", self.total_time.map(|v| v.to_string()));
        put("dt", self.dt.map(|v| v.to_string()));
        put("method", self.method.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("threads", self.threads.map(|v| v.to_string()));
        put("operator", self.operator.as_ref().map(|p| p.display().to_string()));
        put("family", self.family.map(|v| v.to_string()));
        put("n-range", self.n_range.map(|v| v.to_string()));
        put("stage", self.stage.map(|v| v.to_string()));
        out
    }

    /// Fields set in `flags` replace the ones in `self`.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            circuit: flags.circuit.or(self.circuit),
            lambda: flags.lambda.or(self.lambda),
            grid: flags.grid.or(self.grid),
            refine: flags.refine.or(self.refine),
            schedule: flags.schedule.or(self.schedule),
            total_time: flags.total_time.or(self.total_time),
            dt: flags.dt.or(self.dt),
            method: flags.method.or(self.method),
            out: flags.out.or(self.out),
            seed: flags.seed.or(self.seed),
            threads: flags.threads.or(self.threads),
            operator: flags.operator.or(self.operator),
            family: flags.family.or(self.family),
            n_range: flags.n_range.or(self.n_range),
            stage: flags.stage.or(self.stage),
        }
    }

    /// Range checks shared by every command.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        if let Some(l) = self.lambda {
            if !(0.0..=1.0).contains(&l) {
                return bad(format!("--lambda {l} outside [0, 1]"));
            }
        }
        if let Some(g) = self.grid {
            g.points()?;
        }
        if let Some(t) = self.total_time {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("--T {t} must be finite and >= 0"));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("--dt {dt} must be finite and > 0"));
            }
        }
        if self.threads == Some(0) {
            return bad("--threads must be at least 1".into());
        }
        if let Some(r) = self.n_range {
            if r.lo == 0 || r.lo > r.hi {
                return bad(format!("--n-range {r} must satisfy 1 <= lo <= hi"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parses_and_prints() {
        let g: GridSpec = "0:1:101".parse().unwrap();
        assert_eq!(g, GridSpec::new(0.0, 1.0, 101));
        assert_eq!(g.to_string(), "0:1:101");
        assert_eq!(g.points().unwrap().len(), 101);
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!(GridSpec::new(0.0, 1.0, 0).points().is_err());
        assert!(GridSpec::new(0.5, 0.2, 5).points().is_err());
    }

    #[test]
    fn file_form_round_trips() {
        let cfg = RunConfig {
            circuit: Some("bell.gsqc".into()),
            lambda: Some(0.3),
            grid: Some(GridSpec::new(0.1, 0.9, 17)),
            refine: Some(false),
            schedule: Some(ScheduleKind::GapAdapted),
            total_time: Some(12.5),
            dt: Some(1e-3),
            method: Some(Method::Lanczos),
            out: Some("results".into()),
            seed: Some(42),
            threads: Some(2),
            operator: Some("h.mtx".into()),
            family: Some(Family::BellDisentangle),
            n_range: Some(StepRange { lo: 4, hi: 9 }),
            stage: Some(StageChoice::One(Stage::Middle)),
        };
        let text = cfg.to_text();
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn comments_and_errors() {
        let cfg = RunConfig::parse("# run\nlambda = 0.5  # mid\n\nmethod=dense\n").unwrap();
        assert_eq!(cfg.lambda, Some(0.5));
        assert_eq!(cfg.method, Some(Method::Dense));
        assert!(RunConfig::parse("colour = red").unwrap_err().contains("unknown key"));
        assert!(RunConfig::parse("lambda 0.5").unwrap_err().contains("line 1"));
        assert!(RunConfig::parse("refine = maybe").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file = RunConfig::parse("lambda = 0.2\nseed = 7\n").unwrap();
        let flags = RunConfig {
            lambda: Some(0.9),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.lambda, Some(0.9));
        assert_eq!(merged.seed, Some(7));
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let with = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate()
        };
        assert!(with(|c| c.lambda = Some(1.5)).is_err());
        assert!(with(|c| c.total_time = Some(-1.0)).is_err());
        assert!(with(|c| c.dt = Some(0.0)).is_err());
        assert!(with(|c| c.threads = Some(0)).is_err());
        assert!(with(|c| c.grid = Some(GridSpec::new(0.0, 1.0, 1))).is_err());
        assert!(with(|c| c.n_range = Some(StepRange { lo: 5, hi: 4 })).is_err());
        assert!(with(|c| c.lambda = Some(1.0)).is_ok());
    }
}
