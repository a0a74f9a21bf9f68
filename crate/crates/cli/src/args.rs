//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kahler_lift::spaceform::SpaceForm;
use kahler_lift::verify::{Suite, Tolerances, VerifyConfig};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "kahler-lift", version, about = "Verify Kähler-Einstein diagonal lifts on the cotangent bundle of a space form")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and write a report.
    Verify(VerifyArgs),
    /// Tabulate profile quantities over a grid in t and write CSV.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// Base dimension, at least 2.
    #[arg(long)]
    pub n: usize,
    /// Sectional curvature of the base.
    #[arg(long)]
    pub c: f64,
    /// Einstein profile constant, positive.
    #[arg(long = "A", value_name = "A")]
    pub a: f64,
    /// Comma-separated suites, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub suites: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Smallest sampled energy density.
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    /// Largest sampled energy density (clipped to the tube when c > 0).
    #[arg(long, default_value_t = 1.5)]
    pub t_max: f64,
    /// Radius of the coordinate ball for base points.
    #[arg(long)]
    pub q_radius: Option<f64>,
    /// Margin kept below the tube bound.
    #[arg(long, default_value_t = 1e-3)]
    pub guard: f64,
    /// Central-difference step for the oracles.
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Output file; defaults to `$KAHLER_LIFT_OUT_DIR/report.<ext>` or stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include wall-clock runtime in the report.
    #[arg(long)]
    pub timing: bool,
}

/// Parses `all` or a list of suite names.
pub fn parse_suites(list: &[String]) -> Result<Vec<Suite>, CliError> {
    let mut out = Vec::new();
    for s in list.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if s == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(s.parse::<Suite>().map_err(|_| CliError::Config(format!("unknown suite `{s}`")))?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("no suites selected".into()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Applies `NAME=VALUE` overrides by field name.
pub fn apply_tolerances(tol: &Tolerances, overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut value = serde_json::to_value(tol).map_err(|e| CliError::Config(e.to_string()))?;
    let map = value.as_object_mut().expect("tolerances serialize as an object");
    for o in overrides {
        let (name, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("tolerance override `{o}` is not NAME=VALUE")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("tolerance `{name}` is not a number")))?;
        let name = name.trim();
        if !map.contains_key(name) {
            let names: Vec<&str> = map.keys().map(String::as_str).collect();
            return Err(CliError::Config(format!("unknown tolerance `{name}`; expected one of {}", names.join(", "))));
        }
        map[name] = serde_json::json!(v);
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

impl VerifyArgs {
    /// Full configuration with every default made explicit.
    pub fn to_config(&self) -> Result<VerifyConfig, CliError> {
        let base = SpaceForm::new(self.n, self.c)?;
        let mut cfg = VerifyConfig::new(self.n, self.c, self.a);
        cfg.suites = parse_suites(&self.suites)?;
        cfg.sample.seed = self.seed;
        cfg.sample.count = self.samples;
        cfg.sample.t_range = (self.t_min, self.t_max);
        cfg.sample.q_radius = Some(self.q_radius.unwrap_or_else(|| base.default_radius()));
        cfg.sample.guard = self.guard;
        if let Some(h) = self.fd_step {
            cfg.fd_step = h;
        }
        cfg.tolerances = apply_tolerances(&cfg.tolerances, &self.tol)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ScanArgs {
    /// Base dimension, used by the Ricci coefficients.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long)]
    pub c: f64,
    /// Einstein profile constant; required unless `--profile` is given.
    #[arg(long = "A", value_name = "A")]
    pub a: Option<f64>,
    /// `einstein`, `sqrt:A,B`, `linear:A0,A1` or `constant:A`; v always follows the integrability relation.
    #[arg(long, default_value = "einstein")]
    pub profile: String,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Output file; defaults to `$KAHLER_LIFT_OUT_DIR/scan.csv` or stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn suites_are_ordered_and_deduplicated() {
        let s = parse_suites(&strings(&["holomorphic", "einstein", "holomorphic"])).unwrap();
        assert_eq!(s, [Suite::Einstein, Suite::Holomorphic]);
        assert_eq!(parse_suites(&strings(&["all"])).unwrap(), Suite::ALL);
        assert!(parse_suites(&strings(&[""])).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let t = apply_tolerances(&Tolerances::default(), &strings(&["einstein=1e-7", "gamma = 2e-10"])).unwrap();
        assert_eq!(t.einstein, 1e-7);
        assert_eq!(t.gamma, 2e-10);
        assert_eq!(t.ode, Tolerances::default().ode);
        assert!(apply_tolerances(&Tolerances::default(), &strings(&["einstein"])).is_err());
        assert!(apply_tolerances(&Tolerances::default(), &strings(&["einstein=x"])).is_err());
    }

    #[test]
    fn negative_curvature_parses() {
        let cli = Cli::try_parse_from(["kahler-lift", "verify", "--n", "3", "--c", "-1", "--A", "1"]).unwrap();
        let Command::Verify(a) = cli.command else { panic!("verify expected") };
        assert_eq!(a.c, -1.0);
        let cfg = a.to_config().unwrap();
        assert_eq!(cfg.sample.q_radius, Some(1.0));
    }
}
