//! Command-line arguments and their validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kpflow_core::Error;
use serde_json::{json, Value};

use crate::report::CliError;

#[derive(Parser, Debug)]
#[command(name = "kpflow", version, about = "Exact KP hierarchy solver and verifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the first kMax flows from an initial Lax operator and run checks.
    Solve(SolveArgs),
    /// Factorize a group element U = S^-1 Y.
    Factorize(FactorizeArgs),
    /// Build the dressing operator of an initial Lax operator.
    Dressing(DressingArgs),
    /// Coefficient table of (1 + X^-1/n)^n.
    DemoEuler(EulerArgs),
    /// Re-check a stored report.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    Fourier,
    Poly,
    #[value(name = "fourier-z")]
    FourierZ,
}

impl RingKind {
    pub fn tag(self) -> &'static str {
        match self {
            RingKind::Fourier => "fourier",
            RingKind::Poly => "poly",
            RingKind::FourierZ => "fourier-z",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [RingKind::Fourier, RingKind::Poly, RingKind::FourierZ].into_iter().find(|k| k.tag() == tag)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Lax,
    Zs,
    Logderiv,
    Conservation,
    Kp1,
    Shape,
    Dressing,
    All,
}

impl Check {
    pub const EVERY: [Check; 7] = [Check::Lax, Check::Zs, Check::Logderiv, Check::Conservation, Check::Kp1, Check::Shape, Check::Dressing];

    pub fn name(self) -> &'static str {
        match self {
            Check::Lax => "lax",
            Check::Zs => "zs",
            Check::Logderiv => "logderiv",
            Check::Conservation => "conservation",
            Check::Kp1 => "kp1",
            Check::Shape => "shape",
            Check::Dressing => "dressing",
            Check::All => "all",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::EVERY.into_iter().chain([Check::All]).find(|c| c.name() == s)
    }
}

#[derive(Args, Debug, Clone)]
pub struct RingArgs {
    /// Coefficient ring.
    #[arg(long, value_enum, default_value = "fourier")]
    pub ring: RingKind,
    /// z truncation for the fourier-z ring.
    #[arg(long)]
    pub zmax: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Number of flows t_1..t_kMax.
    #[arg(long, default_value_t = 3)]
    pub kmax: u32,
    /// Highest total valuation kept in t.
    #[arg(long, default_value_t = 4)]
    pub vmax: u32,
    /// Lowest d-order reported.
    #[arg(long, default_value_t = -6, allow_negative_numbers = true)]
    pub depth: i64,
    /// Input JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated checks to run.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub checks: Vec<Check>,
}

#[derive(Args, Debug, Clone)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Lowest d-order reported.
    #[arg(long, default_value_t = -6, allow_negative_numbers = true)]
    pub depth: i64,
    /// Input JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DressingArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Lowest d-order reported.
    #[arg(long, default_value_t = -6, allow_negative_numbers = true)]
    pub depth: i64,
    /// Input JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct EulerArgs {
    /// Comma-separated values of n.
    #[arg(long = "n", value_delimiter = ',', default_value = "10,100,1000")]
    pub n_list: Vec<u64>,
    /// Report coefficients of X^0 .. X^-mMax.
    #[arg(long = "mmax", default_value_t = 5)]
    pub m_max: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TableFormat,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Input JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Validated parameters of a solve, as stored in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveParams {
    pub ring: RingKind,
    pub z_max: Option<u32>,
    pub k_max: u32,
    pub v_max: u32,
    pub depth: i64,
    pub checks: Vec<Check>,
}

fn config(code: &str, message: String) -> CliError {
    CliError::new(2, code, message, Value::Null)
}

fn check_ring_args(ring: RingKind, z_max: Option<u32>) -> Result<(), CliError> {
    if z_max.is_some() && ring != RingKind::FourierZ {
        return Err(config("config", "--zmax only applies to --ring fourier-z".into()));
    }
    Ok(())
}

fn check_depth(depth: i64) -> Result<(), CliError> {
    if depth > -1 {
        return Err(config("config", format!("depth must be <= -1, got {depth}")));
    }
    Ok(())
}

impl SolveParams {
    pub fn new(ring: RingKind, z_max: Option<u32>, k_max: u32, v_max: u32, depth: i64, checks: &[Check]) -> Result<Self, CliError> {
        check_ring_args(ring, z_max)?;
        check_depth(depth)?;
        if v_max < 1 {
            return Err(config("config", "vMax must be >= 1".into()));
        }
        if k_max < 1 {
            return Err(config("config", "kMax must be >= 1".into()));
        }
        // `all` means every check that applies to this ring and kMax.
        let mut checks: Vec<Check> = if checks.contains(&Check::All) {
            Check::EVERY
                .into_iter()
                .filter(|c| match c {
                    Check::Kp1 => k_max >= 3 && v_max >= 4,
                    Check::Conservation => ring != RingKind::Poly,
                    _ => true,
                })
                .collect()
        } else {
            checks.to_vec()
        };
        checks.sort();
        checks.dedup();
        let window = |needed: u32| {
            if v_max < needed {
                Err(CliError::from_core(2, &Error::ValuationWindow { needed, v_max }))
            } else {
                Ok(())
            }
        };
        for c in &checks {
            match c {
                Check::Lax | Check::Logderiv => window(k_max)?,
                Check::Zs if k_max >= 2 => window(k_max)?,
                Check::Kp1 => {
                    if k_max < 3 {
                        return Err(CliError::from_core(2, &Error::InsufficientKMax { needed: 3, got: k_max }));
                    }
                    window(4)?;
                }
                Check::Conservation if ring == RingKind::Poly => {
                    return Err(CliError::from_core(2, &Error::UnsupportedRing("integration (conservation check)")));
                }
                _ => {}
            }
        }
        Ok(SolveParams { ring, z_max, k_max, v_max, depth, checks })
    }

    pub fn from_args(a: &SolveArgs) -> Result<Self, CliError> {
        Self::new(a.ring.ring, a.ring.zmax, a.kmax, a.vmax, a.depth, &a.checks)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.tag(),
            "z_max": self.z_max,
            "kMax": self.k_max,
            "vMax": self.v_max,
            "depth": self.depth,
            "checks": self.checks.iter().map(|c| c.name()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let parse = |m: &str| config("parse_error", format!("report parameters: {m}"));
        let ring = v["ring"].as_str().and_then(RingKind::from_tag).ok_or_else(|| parse("ring"))?;
        let z_max = match &v["z_max"] {
            Value::Null => None,
            z => Some(z.as_u64().and_then(|z| u32::try_from(z).ok()).ok_or_else(|| parse("z_max"))?),
        };
        let uint = |k: &str| v[k].as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| parse(k));
        let depth = v["depth"].as_i64().ok_or_else(|| parse("depth"))?;
        let checks = v["checks"]
            .as_array()
            .ok_or_else(|| parse("checks"))?
            .iter()
            .map(|c| c.as_str().and_then(Check::from_name).ok_or_else(|| parse("checks")))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, z_max, uint("kMax")?, uint("vMax")?, depth, &checks)
    }
}

/// Parameters shared by factorize and dressing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicParams {
    pub ring: RingKind,
    pub z_max: Option<u32>,
    pub depth: i64,
}

impl BasicParams {
    pub fn new(ring: RingKind, z_max: Option<u32>, depth: i64) -> Result<Self, CliError> {
        check_ring_args(ring, z_max)?;
        check_depth(depth)?;
        Ok(BasicParams { ring, z_max, depth })
    }

    pub fn to_json(&self) -> Value {
        json!({ "ring": self.ring.tag(), "z_max": self.z_max, "depth": self.depth })
    }

    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let parse = |m: &str| config("parse_error", format!("report parameters: {m}"));
        let ring = v["ring"].as_str().and_then(RingKind::from_tag).ok_or_else(|| parse("ring"))?;
        let z_max = match &v["z_max"] {
            Value::Null => None,
            z => Some(z.as_u64().and_then(|z| u32::try_from(z).ok()).ok_or_else(|| parse("z_max"))?),
        };
        Self::new(ring, z_max, v["depth"].as_i64().ok_or_else(|| parse("depth"))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerParams {
    pub n_list: Vec<u64>,
    pub m_max: u64,
}

impl EulerParams {
    pub fn new(n_list: &[u64], m_max: u64) -> Result<Self, CliError> {
        if n_list.is_empty() || n_list.contains(&0) {
            return Err(config("config", "n values must be >= 1".into()));
        }
        Ok(EulerParams { n_list: n_list.to_vec(), m_max })
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n_list, "mMax": self.m_max })
    }

    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let parse = || config("parse_error", "report parameters: n, mMax".into());
        let n: Vec<u64> = v["n"].as_array().ok_or_else(parse)?.iter().map(|x| x.as_u64().ok_or_else(parse)).collect::<Result<_, _>>()?;
        Self::new(&n, v["mMax"].as_u64().ok_or_else(parse)?)
    }
}
