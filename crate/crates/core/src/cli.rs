//! Command-line front end: flag and config-file parsing, report emission and
//! exit codes. The binary is a thin wrapper around [`run`].

use crate::checks::{all_pass, run_suite, CheckRow, Suite, SuiteConfig};
use crate::error::{Error, Result};
use crate::minimize::{
    lambda_sweep, minimize_radial, minimize_sector, sector_compare, MinimizeConfig, SweepConfig, SweepResult,
};
use crate::params::{CHat, ProblemParams, RawParams};
use crate::spectral::GridSpec;
use crate::spherical::eigenpair_degree;
use clap::Parser;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SUBCOMMANDS: [&str; 6] = ["constants", "check", "minimize-radial", "minimize-sector", "sweep", "sector-compare"];

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

/// Every setting of one run. Unset fields take the documented defaults;
/// the config file uses the same names as the flags.
#[derive(Debug, Clone, Default, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "ckn-symbreak", version, about = "Symmetry breaking experiments for fractional CKN minimizers")]
#[command(args_override_self = true)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// One of constants, check, minimize-radial, minimize-sector, sweep, sector-compare
    #[arg(value_parser = SUBCOMMANDS)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,

    /// Flat `key = value` file; flags given on the command line take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Dimension [default: 4]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Fractional order in (0, 1) [default: 0.5]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Exponent in (2, 2n/(n-2s)) [default: 2.5]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Hardy coupling, above -H_s [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Block dimension of the partition n = k*m [default: n]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Number of blocks [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Explicit extension-Hardy constant; required when c_hat = 1 is not known to hold
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_hat: Option<f64>,
    /// Eigenvalue for `constants` [default: that of --mode]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Degree of the destabilizing spherical harmonic [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,

    /// Check suite: constants, halfline, hardy, extension, perturb, algebra, all [default: all]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Radial nodes [default: CKN_GRID_NODES or 4096]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,

    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bisect_tol: Option<f64>,

    /// Sector symmetry order for minimize-sector and sector-compare [default: 2 / 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    /// Refinement factor for sector-compare [default: 2]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    /// Modes kept per sector run, in units of t [default: 8]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_factor: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub el_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Also write the JSON report here
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Also write the CSV table here
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    /// Flat `key = value` lines sorted by key; unset fields are omitted.
    pub fn to_kv(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut out = String::new();
        for (key, v) in value.as_object().expect("object") {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{key} = {text}\n"));
        }
        out
    }

    /// Parses the flat format; `#` starts a comment, blank lines are ignored.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut argv = vec![OsString::from("ckn-symbreak")];
        argv.extend(kv_to_args(text)?);
        RunConfig::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Fills every unset field from `base`.
    pub fn or(self, base: RunConfig) -> RunConfig {
        let mut top = serde_json::to_value(&self).expect("config serializes");
        let bottom = serde_json::to_value(&base).expect("config serializes");
        let obj = top.as_object_mut().expect("object");
        for (k, v) in bottom.as_object().expect("object") {
            obj.entry(k.clone()).or_insert_with(|| v.clone());
        }
        let mut merged: RunConfig = serde_json::from_value(top).expect("merged config deserializes");
        merged.config = self.config.or(base.config);
        merged
    }

    pub fn problem(&self) -> Result<ProblemParams> {
        let n = self.n.unwrap_or(4);
        let mut raw = RawParams::new(n, self.s.unwrap_or(0.5), self.q.unwrap_or(2.5), self.lambda.unwrap_or(0.0));
        raw = raw.with_partition(self.k.unwrap_or(n), self.m.unwrap_or(1));
        if let Some(c) = self.c_hat {
            raw = raw.with_c_hat(CHat::Explicit(c));
        }
        raw.validate()
    }

    pub fn minimize_config(&self, params: &ProblemParams) -> Result<MinimizeConfig> {
        let mut cfg = MinimizeConfig::default();
        if self.r_min.is_some() || self.r_max.is_some() || self.nodes.is_some() {
            let auto = cfg.grid_for(params)?;
            cfg.grid = Some(GridSpec {
                r_min: self.r_min.unwrap_or(auto.r_min),
                r_max: self.r_max.unwrap_or(auto.r_max),
                nodes: self.nodes.unwrap_or(auto.len()),
            });
        }
        if let Some(v) = self.max_iterations {
            cfg.max_iterations = v;
        }
        if let Some(v) = self.el_tol {
            cfg.el_tol = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.mode_factor {
            cfg.mode_factor = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sweep_config(&self) -> SweepConfig {
        let d = SweepConfig::default();
        SweepConfig {
            lambda_min: self.lambda_min.unwrap_or(d.lambda_min),
            lambda_max: self.lambda_max.unwrap_or(d.lambda_max),
            points: self.points.unwrap_or(d.points),
            bisect_tol: self.bisect_tol.unwrap_or(d.bisect_tol),
            scan_degrees: d.scan_degrees,
        }
    }
}

fn kv_to_args(text: &str) -> Result<Vec<OsString>> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`, got `{line}`", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "subcommand" {
            args.push(value.into());
        } else {
            args.push(format!("--{key}={value}").into());
        }
    }
    Ok(args)
}

/// Parses argv, merging a `--config` file under the explicit flags.
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = RunConfig::try_parse_from(args).map_err(ParseOutcome::Clap)?;
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ParseOutcome::Config(format!("cannot read config {}: {e}", path.display())))?;
    let file = RunConfig::from_kv(&text).map_err(|e| ParseOutcome::Config(format!("{}: {e}", path.display())))?;
    Ok(cli.or(file))
}

#[derive(Debug)]
pub enum ParseOutcome {
    Clap(clap::Error),
    Config(String),
}

/// Rendered output of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: String,
    pub csv: Option<String>,
    /// False when a checked inequality or convergence requirement failed.
    pub passed: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config: &'a RunConfig,
    passed: bool,
    result: T,
}

fn envelope<T: Serialize>(cfg: &RunConfig, sub: &str, passed: bool, result: T) -> Result<String> {
    let mut echo = cfg.clone();
    echo.json = None;
    echo.csv = None;
    echo.subcommand = None;
    let env = Envelope { tool: "ckn-symbreak", version: VERSION, subcommand: sub, config: &echo, passed, result };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

/// Shortest round-trip form; scientific outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn csv_header(sub: &str) -> String {
    format!("# ckn-symbreak v{VERSION} {sub}\n")
}

fn csv_body(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn checks_csv(rows: &[CheckRow]) -> Result<String> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.check.clone(),
                num(r.lhs),
                num(r.rhs),
                num(r.margin),
                num(r.tolerance),
                r.pass.to_string(),
            ]
        })
        .collect();
    Ok(csv_header("check") + &csv_body(&["check", "lhs", "rhs", "margin", "tolerance", "pass"], &body)?)
}

pub fn sweep_csv(result: &SweepResult) -> Result<String> {
    let mut out = csv_header("sweep");
    match result.bracket {
        Some((lo, hi)) => out.push_str(&format!("# lambda_hat bracket = ({}, {}]\n", num(lo), num(hi))),
        None => out.push_str("# lambda_hat bracket = none\n"),
    }
    if let Some(t) = result.threshold {
        out.push_str(&format!("# threshold = {}\n", num(t)));
    }
    if result.flagged {
        out.push_str("# flagged: bisection stopped at an inconclusive certificate\n");
    }
    let body: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| match &r.certificate {
            Some(c) => vec![
                num(r.lambda),
                num(c.q_u),
                num(c.q_tilde),
                num(c.margin),
                c.verdict.to_string(),
                num(c.tolerance),
                num(c.el_residual),
            ],
            None => vec![
                num(r.lambda),
                String::new(),
                String::new(),
                String::new(),
                "inconclusive".into(),
                String::new(),
                num(r.residual),
            ],
        })
        .collect();
    out.push_str(&csv_body(&["lambda", "Q_u", "Q_tilde", "margin", "verdict", "tolerance", "el_residual"], &body)?);
    Ok(out)
}

#[derive(Serialize)]
struct ConstantsOut {
    n: usize,
    s: f64,
    q: f64,
    k: usize,
    m: usize,
    c_hat: f64,
    #[serde(flatten)]
    table: crate::params::ConstantsTable,
}

/// Runs one subcommand without touching the filesystem or stdout.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let sub = cfg.subcommand.as_deref().ok_or_else(|| Error::InvalidParameter("missing subcommand".into()))?;
    match sub {
        "constants" => {
            let p = cfg.problem()?;
            let mu = match cfg.mu {
                Some(mu) => mu,
                None => eigenpair_degree(p.k, cfg.mode.unwrap_or(1))?.mu,
            };
            let table = p.constants(mu)?;
            let out = ConstantsOut { n: p.n, s: p.s, q: p.q, k: p.k, m: p.m, c_hat: p.c_hat()?, table };
            Ok(Report { json: envelope(cfg, sub, true, out)?, csv: None, passed: true })
        }
        "check" => {
            let suite: Suite = cfg.suite.as_deref().unwrap_or("all").parse()?;
            let p = cfg.problem()?;
            let sc = SuiteConfig {
                n: p.n,
                s: p.s,
                q: p.q,
                c_hat: p.c_hat.map_or(CHat::Unset, CHat::Explicit),
                seed: cfg.seed.unwrap_or(0),
            };
            let rows = run_suite(suite, &sc)?;
            let passed = all_pass(&rows);
            Ok(Report { csv: Some(checks_csv(&rows)?), json: envelope(cfg, sub, passed, &rows)?, passed })
        }
        "minimize-radial" => {
            let p = cfg.problem()?;
            let r = minimize_radial(&p, &cfg.minimize_config(&p)?)?;
            Ok(Report { json: envelope(cfg, sub, r.converged, &r)?, csv: None, passed: r.converged })
        }
        "minimize-sector" => {
            let p = cfg.problem()?;
            let r = minimize_sector(&p, cfg.t.unwrap_or(2), &cfg.minimize_config(&p)?)?;
            Ok(Report { json: envelope(cfg, sub, r.converged, &r)?, csv: None, passed: r.converged })
        }
        "sweep" => {
            let p = cfg.problem()?;
            let eigen = eigenpair_degree(p.k, cfg.mode.unwrap_or(1))?;
            let r = lambda_sweep(&p, &cfg.sweep_config(), &eigen, &cfg.minimize_config(&p)?)?;
            let passed = r.bracket.is_some() && r.within_threshold != Some(false);
            Ok(Report { csv: Some(sweep_csv(&r)?), json: envelope(cfg, sub, passed, &r)?, passed })
        }
        "sector-compare" => {
            let p = cfg.problem()?;
            let c = sector_compare(&p, cfg.t.unwrap_or(1), cfg.h.unwrap_or(2), &cfg.minimize_config(&p)?)?;
            let passed = c.minimal && c.strict;
            Ok(Report { json: envelope(cfg, sub, passed, &c)?, csv: None, passed })
        }
        other => Err(Error::InvalidParameter(format!("unknown subcommand `{other}`, expected one of {SUBCOMMANDS:?}"))),
    }
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Errors that mean the request itself was malformed.
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::NonFinite(_)
            | Error::QOutOfRange { .. }
            | Error::LambdaBelowHardy { .. }
            | Error::BadFactorization { .. }
            | Error::CHatUnjustified { .. }
            | Error::InvalidParameter(_)
            | Error::MuNonpositive(_)
            | Error::EllZeroRejected
            | Error::FullGroupRejected
            | Error::UnsupportedGroup(_)
            | Error::PartitionMismatch { .. }
            | Error::Parse(_)
    )
}

/// Full CLI behavior; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(args) {
        Ok(c) => c,
        Err(ParseOutcome::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
        Err(ParseOutcome::Config(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    if cfg.subcommand.is_none() {
        let _ = writeln!(err, "error: missing subcommand, expected one of {}", SUBCOMMANDS.join(", "));
        return EXIT_USAGE;
    }
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if is_usage_error(&e) { EXIT_USAGE } else { EXIT_ASSERTION };
        }
    };
    let primary = report.csv.as_deref().unwrap_or(&report.json);
    let _ = out.write_all(primary.as_bytes());
    for (path, body) in [(&cfg.json, Some(&report.json)), (&cfg.csv, report.csv.as_ref())] {
        match (path, body) {
            (Some(p), Some(b)) => {
                if let Err(e) = write_atomic(p, b) {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_USAGE;
                }
            }
            (Some(p), None) => {
                let _ = writeln!(err, "warning: this subcommand has no CSV table, {} not written", p.display());
            }
            _ => {}
        }
    }
    if report.passed {
        EXIT_OK
    } else {
        let _ = writeln!(err, "assertion failed: see `passed` in the report");
        EXIT_ASSERTION
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let mut v = vec!["ckn-symbreak"];
        v.extend_from_slice(args);
        parse_args(v).unwrap()
    }

    #[test]
    fn kv_round_trip() {
        let cfg = parse(&["sweep", "--n", "4", "--s", "0.1", "--lambda", "-0.25", "--seed", "7", "--bisect-tol", "1e-3"]);
        let text = cfg.to_kv();
        assert!(text.contains("lambda = -0.25\n"));
        assert_eq!(RunConfig::from_kv(&text).unwrap(), cfg);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# experiment\nsubcommand = constants\nn = 3\ns = 0.25 # order\nq = 2.2\n").unwrap();
        let cfg = parse(&["--config", path.to_str().unwrap(), "--s", "0.4"]);
        assert_eq!(cfg.subcommand.as_deref(), Some("constants"));
        assert_eq!((cfg.n, cfg.s, cfg.q), (Some(3), Some(0.4), Some(2.2)));
    }

    #[test]
    fn bad_config_lines() {
        assert!(RunConfig::from_kv("n 4").is_err());
        assert!(RunConfig::from_kv("bogus = 1").is_err());
        assert!(RunConfig::from_kv("n = four").is_err());
    }

    #[test]
    fn exit_codes() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["x", "--help"], &mut out, &mut err), EXIT_OK);
        assert_eq!(run(["x", "constants", "--n"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["x", "frobnicate"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["x"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["x", "constants", "--q", "9"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["x", "constants", "--n", "2", "--q", "3"], &mut out, &mut err), EXIT_USAGE);
        let e = String::from_utf8(err).unwrap();
        assert!(e.contains("--n"), "{e}");
    }

    #[test]
    fn constants_json() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(["x", "constants", "--n", "4", "--s", "0.5", "--q", "2.5", "--mu", "3"], &mut out, &mut err);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        let t = v["result"]["threshold"].as_f64().unwrap();
        let hs = crate::params::hardy_constant(4, 0.5).unwrap();
        assert!((t - (4.0 * std::f64::consts::PI - hs)).abs() < 1e-12);
        assert_eq!(v["config"]["mu"], 3.0);
    }

    #[test]
    fn check_csv_is_quoted_and_versioned() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["x", "check", "--suite", "halfline"], &mut out, &mut err), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# ckn-symbreak v{VERSION} check"));
        assert_eq!(lines.next().unwrap(), "check,lhs,rhs,margin,tolerance,pass");
        assert!(lines.next().unwrap().starts_with("\"halfline(s=0.1,x=0.1)\","));
        assert_eq!(text.lines().count(), 2 + 27);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
