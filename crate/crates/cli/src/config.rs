use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::output::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

fn parse_pair(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("'{value}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("'{value}' is not finite"));
    }
    Ok((name.trim().to_string(), v))
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Tolerance override, NAME=VALUE (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_pair)]
    pub tol: Vec<(String, f64)>,
    /// Named parameter set.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Model parameter override, NAME=VALUE (repeatable).
    #[arg(long = "param", global = true, value_name = "NAME=VALUE", value_parser = parse_pair)]
    pub param: Vec<(String, f64)>,
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub tolerances: BTreeMap<String, f64>,
    pub params: BTreeMap<String, f64>,
    pub fixture: Option<String>,
    pub input: Option<String>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(args: &CommonArgs, input: Option<&PathBuf>) -> Self {
        Self {
            seed: args.seed,
            format: args.format,
            tolerances: args.tol.iter().cloned().collect(),
            params: args.param.iter().cloned().collect(),
            fixture: args.fixture.clone(),
            input: input.map(|p| p.display().to_string()),
            out: args.out.clone(),
        }
    }

    /// Rejects tolerance, parameter and fixture names the command does not use.
    pub fn accept(&self, tols: &[&str], params: &[&str], fixtures: &[&str]) -> Result<(), Failure> {
        for name in self.tolerances.keys() {
            if !tols.contains(&name.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown tolerance '{name}' (accepted: {})",
                    tols.join(", ")
                )));
            }
        }
        for name in self.params.keys() {
            if !params.contains(&name.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown parameter '{name}' (accepted: {})",
                    params.join(", ")
                )));
            }
        }
        if let Some(f) = &self.fixture {
            if !fixtures.contains(&f.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown fixture '{f}' (accepted: {})",
                    fixtures.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn positive(&self, name: &str, default: f64) -> Result<f64, Failure> {
        let v = self.param(name).unwrap_or(default);
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Failure::Usage(format!("{name} must be positive, got {v}")))
        }
    }

    pub fn count(&self, name: &str, default: usize) -> Result<usize, Failure> {
        match self.param(name) {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= 1e9 => Ok(v as usize),
            Some(v) => Err(Failure::Usage(format!("{name} must be a non-negative integer, got {v}"))),
        }
    }

    pub fn fixture_or<'a>(&'a self, default: &'a str) -> &'a str {
        self.fixture.as_deref().unwrap_or(default)
    }
}
