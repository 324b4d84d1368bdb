//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file, layered over built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use backreaction::dynamics::SolverKind;
use backreaction::Vec3;
use clap::{Args, ValueEnum};

use crate::error::CliError;

pub const CONFIG_ENV: &str = "BACKREACTION_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    ConstField,
    Elastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    ClosedForm,
    IterateTerm,
    IterateSolution,
    Landau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn name_of<T: ValueEnum>(value: &T) -> String {
    value
        .to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&name_of(self))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&name_of(self))
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&name_of(self))
    }
}

/// Flags shared by every subcommand. Everything is optional here so that
/// unset flags fall through to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub system: Option<System>,
    /// Radiation time scale η.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Elastic frequency ω.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Electric acceleration vector.
    #[arg(long, num_args = 3, value_names = ["EX", "EY", "EZ"], allow_negative_numbers = true)]
    pub e: Option<Vec<f64>>,
    /// Magnetic frequency vector.
    #[arg(long, num_args = 3, value_names = ["BX", "BY", "BZ"], allow_negative_numbers = true)]
    pub b: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Maximum number of iteration steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Convergence tolerance, integrator tolerance or residual bound.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long, num_args = 3, value_names = ["VX", "VY", "VZ"], allow_negative_numbers = true)]
    pub v0: Option<Vec<f64>>,
    /// Initial acceleration; selects a Lorentz–Dirac run.
    #[arg(long, num_args = 3, value_names = ["AX", "AY", "AZ"], allow_negative_numbers = true)]
    pub a0: Option<Vec<f64>>,
    /// Integrator: dp45 or gl4.
    #[arg(long)]
    pub solver: Option<String>,
    /// Output sample spacing.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Fixed integrator step; disables error control.
    #[arg(long = "fixed-step")]
    pub fixed_step: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the generation timestamp so repeated runs are byte-identical.
    #[arg(long = "no-timestamp")]
    pub no_timestamp: bool,
    /// Config file; overrides $BACKREACTION_CONFIG.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: System,
    pub eta: f64,
    pub omega: f64,
    pub e_vec: Vec3,
    pub b_vec: Vec3,
    pub method: Option<Method>,
    pub steps: usize,
    pub tol: Option<f64>,
    pub t_end: f64,
    pub x0: Vec3,
    pub v0: Vec3,
    pub a0: Option<Vec3>,
    pub solver: Option<SolverKind>,
    pub dt: f64,
    pub fixed_step: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timestamp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: System::ConstField,
            eta: 1.0,
            omega: 0.0,
            e_vec: Vec3::zeros(),
            b_vec: Vec3::zeros(),
            method: None,
            steps: 200,
            tol: None,
            t_end: 10.0,
            x0: Vec3::zeros(),
            v0: Vec3::x(),
            a0: None,
            solver: None,
            dt: 1e-2,
            fixed_step: None,
            format: Format::Csv,
            out: None,
            timestamp: true,
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;

impl RunConfig {
    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    /// Resolves flags over the config file (explicit `--config`, else the
    /// environment variable) over defaults.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let path = args
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut cfg = RunConfig::default();
        if let Some(path) = path {
            cfg.apply_file(&path)?;
        }
        cfg.apply_args(args)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
        for (key, value) in parse_flat(&text)? {
            self.set(&key, &value)
                .map_err(|msg| CliError::Usage(format!("{}: {key}: {msg}", path.display())))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("'{s}': {e}"));
        match key {
            "system" => self.system = System::from_str(value, true)?,
            "eta" => self.eta = num(value)?,
            "omega" => self.omega = num(value)?,
            "e" => self.e_vec = parse_vec(value)?,
            "b" => self.b_vec = parse_vec(value)?,
            "method" => self.method = Some(Method::from_str(value, true)?),
            "steps" => self.steps = value.parse().map_err(|e| format!("'{value}': {e}"))?,
            "tol" => self.tol = Some(num(value)?),
            "t-end" => self.t_end = num(value)?,
            "x0" => self.x0 = parse_vec(value)?,
            "v0" => self.v0 = parse_vec(value)?,
            "a0" => self.a0 = Some(parse_vec(value)?),
            "solver" => self.solver = Some(value.parse().map_err(|e| format!("{e}"))?),
            "dt" => self.dt = num(value)?,
            "fixed-step" => self.fixed_step = Some(num(value)?),
            "format" => self.format = Format::from_str(value, true)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "no-timestamp" => {
                self.timestamp = !value
                    .parse::<bool>()
                    .map_err(|e| format!("'{value}': {e}"))?
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    fn apply_args(&mut self, a: &CommonArgs) -> Result<(), CliError> {
        let vec = |v: &Vec<f64>| Vec3::new(v[0], v[1], v[2]);
        if let Some(s) = a.system {
            self.system = s;
        }
        if let Some(x) = a.eta {
            self.eta = x;
        }
        if let Some(x) = a.omega {
            self.omega = x;
        }
        if let Some(v) = &a.e {
            self.e_vec = vec(v);
        }
        if let Some(v) = &a.b {
            self.b_vec = vec(v);
        }
        if a.method.is_some() {
            self.method = a.method;
        }
        if let Some(n) = a.steps {
            self.steps = n;
        }
        if a.tol.is_some() {
            self.tol = a.tol;
        }
        if let Some(x) = a.t_end {
            self.t_end = x;
        }
        if let Some(v) = &a.x0 {
            self.x0 = vec(v);
        }
        if let Some(v) = &a.v0 {
            self.v0 = vec(v);
        }
        if let Some(v) = &a.a0 {
            self.a0 = Some(vec(v));
        }
        if let Some(s) = &a.solver {
            self.solver = Some(s.parse().map_err(|e| CliError::Usage(format!("--solver: {e}")))?);
        }
        if let Some(x) = a.dt {
            self.dt = x;
        }
        if a.fixed_step.is_some() {
            self.fixed_step = a.fixed_step;
        }
        if let Some(f) = a.format {
            self.format = f;
        }
        if a.out.is_some() {
            self.out = a.out.clone();
        }
        if a.no_timestamp {
            self.timestamp = false;
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if self.system == System::Elastic && !(self.omega >= 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be non-negative, got {}", self.omega));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return bad(format!("tol must be positive, got {tol}"));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t-end must be positive, got {}", self.t_end));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        Ok(())
    }

    /// `key=value` pairs describing the resolved configuration, in a fixed
    /// order. Only the parameters relevant to the selected system appear.
    pub fn echo(&self) -> Vec<(String, String)> {
        let v = |x: &Vec3| format!("{:?} {:?} {:?}", x.x, x.y, x.z);
        let mut out = vec![("system".to_string(), self.system.to_string()), ("eta".into(), format!("{:?}", self.eta))];
        match self.system {
            System::ConstField => {
                out.push(("e".into(), v(&self.e_vec)));
                out.push(("b".into(), v(&self.b_vec)));
            }
            System::Elastic => out.push(("omega".into(), format!("{:?}", self.omega))),
        }
        if let Some(m) = self.method {
            out.push(("method".into(), m.to_string()));
        }
        out.push(("steps".into(), self.steps.to_string()));
        out.push(("tol".into(), format!("{:?}", self.tol())));
        out.push(("t-end".into(), format!("{:?}", self.t_end)));
        out.push(("x0".into(), v(&self.x0)));
        out.push(("v0".into(), v(&self.v0)));
        if let Some(a) = &self.a0 {
            out.push(("a0".into(), v(a)));
        }
        if let Some(s) = self.solver {
            out.push(("solver".into(), s.name().to_string()));
        }
        out.push(("dt".into(), format!("{:?}", self.dt)));
        if let Some(h) = self.fixed_step {
            out.push(("fixed-step".into(), format!("{:?}", h)));
        }
        out
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// skipped. Keys use the long flag names without dashes in front.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key = value", lineno + 1)));
        };
        map.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(map)
}

/// Three numbers separated by whitespace and/or commas.
fn parse_vec(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(format!("expected three components, got {}", parts.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_file_ignores_comments_and_normalises_keys() {
        let map = parse_flat("# header\nt_end = 3 # trailing\n\nsystem=elastic\n").unwrap();
        assert_eq!(map["t-end"], "3");
        assert_eq!(map["system"], "elastic");
        assert!(parse_flat("no equals sign").is_err());
    }

    #[test]
    fn vectors_accept_commas_or_spaces() {
        assert_eq!(parse_vec("1, -2 3").unwrap(), Vec3::new(1.0, -2.0, 3.0));
        assert!(parse_vec("1 2").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let mut cfg = RunConfig::default();
        cfg.set("eta", "2").unwrap();
        cfg.set("omega", "0.3").unwrap();
        let args = CommonArgs {
            eta: Some(0.5),
            ..Default::default()
        };
        cfg.apply_args(&args).unwrap();
        assert_eq!(cfg.eta, 0.5);
        assert_eq!(cfg.omega, 0.3);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("colour", "blue").is_err());
        assert!(cfg.set("system", "gravity").is_err());
        assert!(cfg.set("solver", "euler").is_err());
    }
}
