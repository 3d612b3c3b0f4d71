//! Resolved settings: built-in defaults, then the `--config` file, then flags.

use std::fs;
use std::path::Path;

use ek_core::verify::DEFAULT_SEED;
use ek_core::{Lattice, PrecisionConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub lattice: [f64; 4],
    pub precision: PrecisionConfig,
    pub seed: u64,
    pub output: Output,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            lattice: [1.0, 0.0, 0.0, 1.0],
            precision: PrecisionConfig::default(),
            seed: DEFAULT_SEED,
            output: Output::Json,
        }
    }
}

/// Flag values that override the file; `None` leaves the setting alone.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub lattice: Option<String>,
    pub truncation_radius_factor: Option<f64>,
    pub quad_tol: Option<f64>,
    pub target_abs_error: Option<f64>,
    pub seed: Option<String>,
    pub output: Option<Output>,
}

impl CliConfig {
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = CliConfig::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        if let Some(v) = &flags.lattice {
            cfg.lattice = parse_lattice(v)?;
        }
        if let Some(v) = flags.truncation_radius_factor {
            cfg.precision.truncation_radius_factor = v;
        }
        if let Some(v) = flags.quad_tol {
            cfg.precision.quad_tol = v;
        }
        if let Some(v) = flags.target_abs_error {
            cfg.precision.target_abs_error = v;
        }
        if let Some(v) = &flags.seed {
            cfg.seed = parse_seed(v)?;
        }
        if let Some(v) = flags.output {
            cfg.output = v;
        }
        cfg.precision.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    /// Flat `key = value` lines; `#` starts a comment.
    fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || CliError::Usage(format!("config line {}: expected key=value, got '{raw}'", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(bad)?;
            let value = value.trim();
            let real = || value.parse::<f64>().map_err(|_| bad());
            match key.trim() {
                "lattice" => self.lattice = parse_lattice(value)?,
                "truncation_radius_factor" => self.precision.truncation_radius_factor = real()?,
                "quad_tol" => self.precision.quad_tol = real()?,
                "target_abs_error" => self.precision.target_abs_error = real()?,
                "seed" => self.seed = parse_seed(value)?,
                "output" => {
                    self.output = match value {
                        "json" => Output::Json,
                        "table" => Output::Table,
                        _ => return Err(bad()),
                    }
                }
                other => return Err(CliError::Usage(format!("config line {}: unknown key '{other}'", i + 1))),
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        Lattice::from_array(self.lattice).map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub fn parse_lattice(s: &str) -> Result<[f64; 4], CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("lattice must be re1,im1,re2,im2, got '{s}'")))?;
    <[f64; 4]>::try_from(v).map_err(|_| CliError::Usage(format!("lattice must have four components, got '{s}'")))
}

/// Decimal or `0x`-prefixed hexadecimal, `_` separators allowed.
pub fn parse_seed(s: &str) -> Result<u64, CliError> {
    let t = s.trim().replace('_', "");
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| CliError::Usage(format!("bad seed '{s}'")))
}
