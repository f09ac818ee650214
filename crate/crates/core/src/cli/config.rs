//! Flat `key = value` experiment files; lists are written `[a, b, c]`.

use std::fmt;
use std::str::FromStr;

use crate::enumerate::{Mode, Shape, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub primes: Vec<u32>,
    pub extension_degrees: Vec<u32>,
    pub deltas: Vec<u32>,
    pub ns: Vec<u32>,
    pub shape: Shape,
    pub seeds: Vec<u64>,
    pub budget: u64,
    pub mode: Mode,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            primes: Vec::new(),
            extension_degrees: vec![1],
            deltas: Vec::new(),
            ns: Vec::new(),
            shape: Shape::Weierstrass,
            seeds: vec![0],
            budget: DEFAULT_BUDGET,
            mode: Mode::Hensel,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config line {line}: {msg}")]
pub struct ConfigError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "brute" => Ok(Mode::Brute),
        "hensel" => Ok(Mode::Hensel),
        other => Err(format!("unknown mode '{other}'")),
    }
}

pub fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Brute => "brute",
        Mode::Hensel => "hensel",
    }
}

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>, String> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| format!("expected a list [a, b, ...], got '{value}'"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse()
                .map_err(|_| format!("cannot parse list item '{item}'"))
        })
        .collect()
}

fn scalar<T: FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse value '{value}'"))
}

fn list_text<T: fmt::Display>(xs: &[T]) -> String {
    let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| ConfigError { line, msg };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(err(format!("duplicate key '{key}'")));
            }
            seen.push(key.to_string());
            match key {
                "primes" => cfg.primes = parse_list(value).map_err(err)?,
                "extension_degrees" => cfg.extension_degrees = parse_list(value).map_err(err)?,
                "deltas" => cfg.deltas = parse_list(value).map_err(err)?,
                "ns" => cfg.ns = parse_list(value).map_err(err)?,
                "seeds" => cfg.seeds = parse_list(value).map_err(err)?,
                "shape" => cfg.shape = value.parse().map_err(err)?,
                "budget" => cfg.budget = scalar(value).map_err(err)?,
                "mode" => cfg.mode = parse_mode(value).map_err(err)?,
                "out" => cfg.out = Some(value.to_string()),
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }

    /// Grid cells whose enumeration cost exceeds the budget.
    pub fn over_budget(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for &p in &self.primes {
            for &a in &self.extension_degrees {
                let q = (p as u128).saturating_pow(a);
                for &n in &self.ns {
                    let nx = q.saturating_pow(n);
                    let cost = match self.mode {
                        Mode::Brute => nx.saturating_mul(nx),
                        Mode::Hensel => nx.saturating_mul(q),
                    };
                    if cost > self.budget as u128 {
                        out.push((p, a, n));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "primes = {}", list_text(&self.primes))?;
        writeln!(f, "extension_degrees = {}", list_text(&self.extension_degrees))?;
        writeln!(f, "deltas = {}", list_text(&self.deltas))?;
        writeln!(f, "ns = {}", list_text(&self.ns))?;
        writeln!(f, "shape = {}", self.shape)?;
        writeln!(f, "seeds = {}", list_text(&self.seeds))?;
        writeln!(f, "budget = {}", self.budget)?;
        writeln!(f, "mode = {}", mode_name(self.mode))?;
        if let Some(out) = &self.out {
            writeln!(f, "out = {out}")?;
        }
        Ok(())
    }
}
