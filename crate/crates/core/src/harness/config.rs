use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::free_group::{format_letters, is_nonbacktracking, parse_letters, Letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Horoballs `𝓑ₙ`, i.e. `|g| ≤ 2n` on the horosphere.
    Ball,
    /// Only `|g| = 2n`; no convergence claim is attached.
    ExploratorySphere,
}

/// Fiber factor of a test function.
#[derive(Debug, Clone, PartialEq)]
pub enum XFunction {
    Const(f64),
    /// Indicator of `{x : ⟨x, axis⟩ ≥ height}` on the sphere.
    Cap { axis: [f64; 3], height: f64 },
    /// `max(0, 1 − |x|²/R²)` on the plane.
    Bump { radius: f64 },
}

impl FromStr for XFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad fiber function `{s}`"));
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(bad)?;
        let rest: Vec<&str> = parts.collect();
        let nums = |text: &str| -> Result<Vec<f64>> {
            text.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        match (kind, rest.as_slice()) {
            ("const", []) => Ok(XFunction::Const(1.0)),
            ("const", [c]) => Ok(XFunction::Const(c.parse().map_err(|_| bad())?)),
            ("cap", [axis, h]) => {
                let a = nums(axis)?;
                if a.len() != 3 {
                    return Err(bad());
                }
                let norm = a.iter().map(|t| t * t).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(bad());
                }
                let height: f64 = h.parse().map_err(|_| bad())?;
                if !(-1.0..=1.0).contains(&height) {
                    return Err(bad());
                }
                Ok(XFunction::Cap {
                    axis: [a[0] / norm, a[1] / norm, a[2] / norm],
                    height,
                })
            }
            ("bump", [r]) => {
                let radius: f64 = r.parse().map_err(|_| bad())?;
                if !(radius > 0.0) {
                    return Err(bad());
                }
                Ok(XFunction::Bump { radius })
            }
            _ => Err(bad()),
        }
    }
}

/// A test function `f(ξ, x) = c(ξ)·h(x)`: `c` is the value of the longest
/// listed cylinder containing `ξ` (or the default), `h` a fiber factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub cylinders: BTreeMap<Vec<Letter>, f64>,
    pub default: f64,
    pub x: XFunction,
}

impl FunctionSpec {
    pub fn constant(c: f64) -> Self {
        FunctionSpec {
            cylinders: BTreeMap::new(),
            default: c,
            x: XFunction::Const(1.0),
        }
    }

    /// Parses `"a1=1; a1.a2=0.5"`.
    pub fn parse_cylinders(text: &str, rank: usize) -> Result<BTreeMap<Vec<Letter>, f64>> {
        let mut out = BTreeMap::new();
        for entry in text.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (prefix, value) = entry
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("cylinder entry `{entry}` needs prefix=value")))?;
            let letters = parse_letters(prefix.trim()).map_err(|e| Error::Config(e.to_string()))?;
            if letters.is_empty() || !is_nonbacktracking(&letters) || letters.iter().any(|l| !l.fits_rank(rank)) {
                return Err(Error::Config(format!("`{}` is not an admissible cylinder", prefix.trim())));
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad cylinder value in `{entry}`")))?;
            out.insert(letters, value);
        }
        Ok(out)
    }

    pub fn boundary_value(&self, prefix: &[Letter]) -> f64 {
        self.cylinders
            .iter()
            .filter(|(c, _)| prefix.len() >= c.len() && prefix[..c.len()] == c[..])
            .max_by_key(|(c, _)| c.len())
            .map_or(self.default, |(_, v)| *v)
    }

    pub fn depth(&self) -> usize {
        self.cylinders.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn describe(&self) -> String {
        let cyl: Vec<String> = self
            .cylinders
            .iter()
            .map(|(c, v)| format!("{}={v}", format_letters(c)))
            .collect();
        format!("[{}] default {} x {:?}", cyl.join("; "), self.default, self.x)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub rank: usize,
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub action: String,
    pub u: FunctionSpec,
    pub v: FunctionSpec,
    pub mode: Mode,
    pub window: i64,
    pub moves: usize,
    pub move_bound: usize,
    pub models: usize,
    pub p_values: Vec<f64>,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rank: 2,
            n_max: 8,
            samples: 100,
            seed: 0,
            action: "trivial".into(),
            u: FunctionSpec::constant(1.0),
            v: FunctionSpec::constant(1.0),
            mode: Mode::Ball,
            window: 6,
            moves: 20,
            move_bound: 4,
            models: 1000,
            p_values: vec![1.5, 2.0, 4.0],
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// Flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            if raw.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{}`", i + 1, k.trim())));
            }
        }
        let mut cfg = ExperimentConfig::default();
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
        }
        if let Some(v) = raw.remove("rank") {
            cfg.rank = num("rank", &v)?;
        }
        if cfg.rank < 1 {
            return Err(Error::Config("rank must be positive".into()));
        }
        let rank = cfg.rank;
        let fspec = |prefix: &str, raw: &mut BTreeMap<String, String>| -> Result<FunctionSpec> {
            let mut f = FunctionSpec::constant(1.0);
            if let Some(v) = raw.remove(&format!("{prefix}_cylinders")) {
                f.cylinders = FunctionSpec::parse_cylinders(&v, rank)?;
            }
            if let Some(v) = raw.remove(&format!("{prefix}_default")) {
                f.default = num(&format!("{prefix}_default"), &v)?;
            } else if !f.cylinders.is_empty() {
                f.default = 0.0;
            }
            if let Some(v) = raw.remove(&format!("{prefix}_x")) {
                f.x = v.parse()?;
            }
            Ok(f)
        };
        cfg.u = fspec("u", &mut raw)?;
        cfg.v = fspec("v", &mut raw)?;
        for (key, value) in std::mem::take(&mut raw) {
            match key.as_str() {
                "n_max" => cfg.n_max = num(&key, &value)?,
                "samples" => cfg.samples = num(&key, &value)?,
                "seed" => cfg.seed = num(&key, &value)?,
                "action" => cfg.action = value,
                "mode" => {
                    cfg.mode = match value.as_str() {
                        "ball" => Mode::Ball,
                        "exploratory-sphere" => Mode::ExploratorySphere,
                        _ => return Err(Error::Config(format!("unknown mode `{value}`"))),
                    }
                }
                "window" => cfg.window = num(&key, &value)?,
                "moves" => cfg.moves = num(&key, &value)?,
                "move_bound" => cfg.move_bound = num(&key, &value)?,
                "models" => cfg.models = num(&key, &value)?,
                "p_values" => {
                    cfg.p_values = value
                        .split(',')
                        .map(|t| num::<f64>(&key, t.trim()))
                        .collect::<Result<_>>()?
                }
                "threads" => cfg.threads = Some(num(&key, &value)?),
                _ => return Err(Error::Config(format!("unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        let v_positive = self.v.default > 0.0
            && self.v.cylinders.values().all(|&c| c > 0.0)
            && matches!(self.v.x, XFunction::Const(c) if c > 0.0);
        if !v_positive {
            return Err(Error::Config(
                "v must be strictly positive: positive cylinder values and default, constant positive fiber factor".into(),
            ));
        }
        if self.window < 0 {
            return Err(Error::Config("window must be nonnegative".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        if self.p_values.iter().any(|&p| !(p > 1.0)) {
            return Err(Error::Config("p values must exceed 1".into()));
        }
        Ok(())
    }
}
