//! Network configuration files.
//!
//! One `key = value` per line; `#` starts a comment. Keys:
//!
//! ```text
//! d = 5
//! permutation = [4, 3, 0, 1, 2]   # image of each site
//! logical = [0, 2, 4]             # transfer order, source first
//! schedule = [1/2, 1]             # optional, one fraction per stop
//! tau = 1                         # default 1
//! grid = 512                      # default 512
//! out = trace.csv                 # optional
//! x[0/1:1] = 0                    # x for eigenvalue phase n/d, slot (1-based)
//! mixing[0/1] = [0.6 0 0.8 0; 0.8 0 -0.6 0]   # re im pairs, rows split by `;`
//! ```
//!
//! Without `schedule` the stops are evenly spaced at `j/(L−1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bus::{ScheduleError, Stop, TransferSchedule};
use crate::linalg::CMatrix;
use crate::permutation::Permutation;
use crate::spectral::{group_eigenvalues, SlotKey, SpectrumSpec};
use crate::Ratio;

pub const DEFAULT_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}field `{field}`: {msg}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub msg: String,
}

impl ConfigError {
    fn at(line: usize, field: &str, msg: impl fmt::Display) -> Self {
        ConfigError {
            line: Some(line),
            field: field.to_string(),
            msg: msg.to_string(),
        }
    }

    fn missing(field: &str) -> Self {
        ConfigError {
            line: None,
            field: field.to_string(),
            msg: "required but not given".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub d: usize,
    pub permutation: Permutation,
    /// Source first, then the stops in transfer order. May be empty.
    pub logical: Vec<usize>,
    pub schedule: Option<Vec<Ratio>>,
    pub tau: f64,
    pub grid: usize,
    pub out: Option<String>,
    pub x: BTreeMap<SlotKey, i64>,
    pub mixing: BTreeMap<Ratio, CMatrix>,
}

impl NetworkConfig {
    /// Minimal config: permutation only, defaults elsewhere.
    pub fn new(permutation: Permutation) -> Self {
        NetworkConfig {
            d: permutation.d(),
            permutation,
            logical: Vec::new(),
            schedule: None,
            tau: 1.0,
            grid: DEFAULT_GRID,
            out: None,
            x: BTreeMap::new(),
            mixing: BTreeMap::new(),
        }
    }

    pub fn spec(&self) -> SpectrumSpec {
        let mut spec = SpectrumSpec::new(self.tau);
        for (&k, &v) in &self.x {
            spec.set_x(k, v);
        }
        for (&phase, b) in &self.mixing {
            spec.set_mixing(phase, b.clone());
        }
        spec
    }

    /// Replaces `x` and mixing with those of `spec`; `tau` is kept.
    pub fn set_spec(&mut self, spec: &SpectrumSpec) {
        self.x = spec.x_entries().clone();
        self.mixing = spec.mixing_entries().clone();
    }

    /// Excitation source: the first logical node, or site 0.
    pub fn source(&self) -> usize {
        self.logical.first().copied().unwrap_or(0)
    }

    /// `None` when fewer than two logical nodes are configured.
    pub fn transfer_schedule(&self) -> Option<TransferSchedule> {
        self.build_schedule()
            .map(|s| s.expect("validated at parse time"))
    }

    fn build_schedule(&self) -> Option<Result<TransferSchedule, ScheduleError>> {
        if self.logical.len() < 2 {
            return None;
        }
        Some(match &self.schedule {
            Some(fr) => TransferSchedule::new(
                self.logical[0],
                self.logical[1..]
                    .iter()
                    .zip(fr)
                    .map(|(&s, &f)| Stop::new(s, f))
                    .collect(),
            ),
            None => TransferSchedule::evenly_spaced(&self.logical),
        })
    }

    fn validate(
        &self,
        lines: &BTreeMap<&'static str, usize>,
        x_lines: &BTreeMap<SlotKey, usize>,
    ) -> Result<(), ConfigError> {
        let line = |f: &str| lines.get(f).copied();
        let err = |f: &str, msg: String| ConfigError {
            line: line(f),
            field: f.to_string(),
            msg,
        };
        if self.permutation.d() != self.d {
            return Err(err(
                "permutation",
                format!("has {} entries but d = {}", self.permutation.d(), self.d),
            ));
        }
        for (i, &l) in self.logical.iter().enumerate() {
            if l >= self.d {
                return Err(err(
                    "logical",
                    format!("site {l} out of range for d = {}", self.d),
                ));
            }
            if self.logical[..i].contains(&l) {
                return Err(err("logical", format!("site {l} listed twice")));
            }
        }
        if let Some(fr) = &self.schedule {
            if self.logical.len() < 2 {
                return Err(err("schedule", "needs at least two logical nodes".into()));
            }
            if fr.len() != self.logical.len() - 1 {
                return Err(err(
                    "schedule",
                    format!(
                        "{} fractions for {} stops",
                        fr.len(),
                        self.logical.len() - 1
                    ),
                ));
            }
        }
        if let Some(Err(e)) = self.build_schedule() {
            let field = match e {
                ScheduleError::RepeatedSite(_) | ScheduleError::TooFewNodes(_) => "logical",
                _ => "schedule",
            };
            return Err(err(field, e.to_string()));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(err(
                "tau",
                format!("must be positive and finite, got {}", self.tau),
            ));
        }
        if self.grid == 0 {
            return Err(err("grid", "must be at least 1".into()));
        }
        let classes = group_eigenvalues(self.permutation.cycles());
        for k in self.x.keys() {
            if !classes
                .iter()
                .any(|c| c.phase == k.phase && k.slot < c.multiplicity())
            {
                return Err(ConfigError {
                    line: x_lines.get(k).copied(),
                    field: format!("x[{}]", key_label(*k)),
                    msg: "the permutation has no such eigenvalue slot".into(),
                });
            }
        }
        for (phase, b) in &self.mixing {
            let Some(class) = classes.iter().find(|c| c.phase == *phase) else {
                return Err(err(
                    "mixing",
                    format!("the permutation has no eigenvalue with phase {phase}"),
                ));
            };
            let eta = class.multiplicity();
            if b.shape() != (eta, eta) {
                return Err(err(
                    "mixing",
                    format!(
                        "phase {phase} needs a {eta}x{eta} matrix, got {}x{}",
                        b.nrows(),
                        b.ncols()
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn key_label(k: SlotKey) -> String {
    format!("{}/{}:{}", k.phase.numer(), k.phase.denom(), k.slot + 1)
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{s}`"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("`{}`: {e}", t.trim()))
        })
        .collect()
}

fn parse_ratio(s: &str) -> Result<Ratio, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| format!("malformed rational `{s}`"))?;
    let d: i64 = d.parse().map_err(|_| format!("malformed rational `{s}`"))?;
    if d <= 0 {
        return Err(format!(
            "malformed rational `{s}`: denominator must be positive"
        ));
    }
    Ok(Ratio::new(n, d))
}

fn parse_ratio_list(s: &str) -> Result<Vec<Ratio>, String> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{s}`"))?;
    inner.split(',').map(parse_ratio).collect()
}

fn parse_phase(s: &str) -> Result<Ratio, String> {
    let phase = parse_ratio(s)?;
    if phase < Ratio::zero() || phase >= Ratio::one() {
        return Err(format!("phase {phase} outside [0, 1)"));
    }
    Ok(phase)
}

fn parse_slot_key(s: &str) -> Result<SlotKey, String> {
    let (phase, slot) = s
        .split_once(':')
        .ok_or_else(|| format!("malformed key `{s}`, expected `n/d:slot`"))?;
    let slot: usize = slot
        .trim()
        .parse()
        .map_err(|_| format!("malformed slot `{}`", slot.trim()))?;
    if slot == 0 {
        return Err("slots are numbered from 1".into());
    }
    Ok(SlotKey::new(parse_phase(phase)?, slot - 1))
}

fn parse_matrix(s: &str) -> Result<CMatrix, String> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed matrix, got `{s}`"))?;
    let rows: Vec<Vec<Complex64>> = inner
        .split(';')
        .map(|row| {
            let nums: Vec<f64> = row
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
                .collect::<Result<_, _>>()?;
            if !nums.len().is_multiple_of(2) {
                return Err("each entry needs a real and an imaginary part".to_string());
            }
            Ok(nums.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
        })
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err("rows have different lengths".into());
    }
    let m = rows[0].len();
    Ok(CMatrix::from_fn(n, m, |r, c| rows[r][c]))
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<NetworkConfig, ConfigError> {
    let mut lines: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut d = None;
    let mut image: Option<Vec<usize>> = None;
    let mut logical = Vec::new();
    let mut schedule = None;
    let mut tau = 1.0;
    let mut grid = DEFAULT_GRID;
    let mut out = None;
    let mut x = BTreeMap::new();
    let mut x_lines = BTreeMap::new();
    let mut mixing = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(no, content, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let field: &'static str = match key {
            "d" => "d",
            "permutation" => "permutation",
            "logical" => "logical",
            "schedule" => "schedule",
            "tau" => "tau",
            "grid" => "grid",
            "out" => "out",
            _ if key.starts_with("x[") => "x",
            _ if key.starts_with("mixing[") => "mixing",
            _ => return Err(ConfigError::at(no, key, "unknown key")),
        };
        if !matches!(field, "x" | "mixing") && lines.contains_key(field) {
            return Err(ConfigError::at(no, key, "given more than once"));
        }
        lines.entry(field).or_insert(no);
        let bad = |msg: String| ConfigError::at(no, key, msg);
        match field {
            "d" => d = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "permutation" => image = Some(parse_usize_list(value).map_err(bad)?),
            "logical" => logical = parse_usize_list(value).map_err(bad)?,
            "schedule" => schedule = Some(parse_ratio_list(value).map_err(bad)?),
            "tau" => tau = value.parse::<f64>().map_err(|e| bad(e.to_string()))?,
            "grid" => grid = value.parse::<usize>().map_err(|e| bad(e.to_string()))?,
            "out" => out = Some(value.to_string()),
            "x" => {
                let inner = key[2..]
                    .strip_suffix(']')
                    .ok_or_else(|| bad("missing `]`".into()))?;
                let k = parse_slot_key(inner).map_err(bad)?;
                let v = value.parse::<i64>().map_err(|e| bad(e.to_string()))?;
                if x.insert(k, v).is_some() {
                    return Err(bad("given more than once".into()));
                }
                x_lines.insert(k, no);
            }
            "mixing" => {
                let inner = key[7..]
                    .strip_suffix(']')
                    .ok_or_else(|| bad("missing `]`".into()))?;
                let phase = parse_phase(inner).map_err(bad)?;
                let m = parse_matrix(value).map_err(bad)?;
                if mixing.insert(phase, m).is_some() {
                    return Err(bad("given more than once".into()));
                }
            }
            _ => unreachable!(),
        }
    }

    let image = image.ok_or_else(|| ConfigError::missing("permutation"))?;
    let d = d.unwrap_or(image.len());
    let permutation = Permutation::new(image).map_err(|e| ConfigError {
        line: lines.get("permutation").copied(),
        field: "permutation".into(),
        msg: e.to_string(),
    })?;
    let cfg = NetworkConfig {
        d,
        permutation,
        logical,
        schedule,
        tau,
        grid,
        out,
        x,
        mixing,
    };
    cfg.validate(&lines, &x_lines)?;
    Ok(cfg)
}

impl FromStr for NetworkConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_config(s)
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for NetworkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "permutation = [{}]", join(self.permutation.image()))?;
        writeln!(f, "logical = [{}]", join(&self.logical))?;
        if let Some(fr) = &self.schedule {
            writeln!(f, "schedule = [{}]", join(fr))?;
        }
        writeln!(f, "tau = {}", self.tau)?;
        writeln!(f, "grid = {}", self.grid)?;
        if let Some(out) = &self.out {
            writeln!(f, "out = {out}")?;
        }
        for (k, v) in &self.x {
            writeln!(f, "x[{}] = {v}", key_label(*k))?;
        }
        for (phase, b) in &self.mixing {
            let rows: Vec<String> = b
                .row_iter()
                .map(|r| {
                    r.iter()
                        .map(|z| format!("{} {}", z.re, z.im))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            writeln!(
                f,
                "mixing[{}/{}] = [{}]",
                phase.numer(),
                phase.denom(),
                rows.join("; ")
            )?;
        }
        Ok(())
    }
}
