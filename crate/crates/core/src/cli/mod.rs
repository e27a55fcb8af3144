//! Command-line front end: `point`, `sweep` and `validate`.
//!
//! Exit codes: 0 ok, 1 a validation check failed, 2 configuration or
//! output-path error, 3 numerical error.

pub mod config;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ConfigError, RunConfig};

use crate::sweep::{evaluate_point, sweep, Execution};
use crate::validation::{run_oracle_suite, CheckStatus};
use output::{format_significant, to_csv, to_svg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mirror-entanglement",
    version,
    about = "Steady-state mirror-mirror entanglement in coupled optomechanical cavities with parametric amplifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one parameter point.
    Point(RunArgs),
    /// Evaluate a 1-D or 2-D grid and write CSV (and optionally SVG).
    Sweep(RunArgs),
    /// Run the oracle checks at one parameter point.
    Validate(RunArgs),
}

/// Shared flags. Every configuration key can be given as `--key value` and
/// overrides the file.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    pub out: Option<String>,
    /// SVG heatmap output path.
    #[arg(long)]
    pub svg: Option<String>,
    /// ln2eta (default) or lneta.
    #[arg(long)]
    pub convention: Option<String>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub threads: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long = "gamma_m")]
    pub gamma_m: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long = "lambda_hop")]
    pub lambda_hop: Option<String>,
    #[arg(long = "drive_E")]
    pub drive_e: Option<String>,
    #[arg(long = "opa_gain")]
    pub opa_gain: Option<String>,
    #[arg(long = "opa_phase", allow_hyphen_values = true)]
    pub opa_phase: Option<String>,
    #[arg(long = "delta_eff", allow_hyphen_values = true)]
    pub delta_eff: Option<String>,
    #[arg(long = "delta0", allow_hyphen_values = true)]
    pub delta0: Option<String>,
    #[arg(long = "n_a")]
    pub n_a: Option<String>,
    #[arg(long = "n_m")]
    pub n_m: Option<String>,
    /// `param start stop count`
    #[arg(long, allow_hyphen_values = true)]
    pub axis1: Option<String>,
    /// `param start stop count`
    #[arg(long, allow_hyphen_values = true)]
    pub axis2: Option<String>,
}

impl RunArgs {
    pub fn overrides(&self) -> Vec<(String, String)> {
        let pairs = [
            ("out", &self.out),
            ("svg", &self.svg),
            ("convention", &self.convention),
            ("threads", &self.threads),
            ("kappa", &self.kappa),
            ("gamma_m", &self.gamma_m),
            ("g", &self.g),
            ("lambda_hop", &self.lambda_hop),
            ("drive_E", &self.drive_e),
            ("opa_gain", &self.opa_gain),
            ("opa_phase", &self.opa_phase),
            ("delta_eff", &self.delta_eff),
            ("delta0", &self.delta0),
            ("n_a", &self.n_a),
            ("n_m", &self.n_m),
            ("axis1", &self.axis1),
            ("axis2", &self.axis2),
        ];
        let mut out: Vec<(String, String)> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        // a detuning flag replaces whichever detuning the file carries
        if self.delta_eff.is_some() && self.delta0.is_none() {
            out.push(("delta0".into(), String::new()));
        }
        if self.delta0.is_some() && self.delta_eff.is_none() {
            out.push(("delta_eff".into(), String::new()));
        }
        out
    }

    /// Reads the config file (if any) and applies flag overrides.
    pub fn load(&self) -> Result<RunConfig, ConfigError> {
        let text = match &self.config {
            Some(path) => fs::read_to_string(path).map_err(|e| ConfigError {
                key: Some("config".into()),
                message: format!("cannot read {}: {e}", path.display()),
            })?,
            None => String::new(),
        };
        let mut entries = config::parse_entries(&text)?;
        let mut overrides = Vec::new();
        for (k, v) in self.overrides() {
            if v.is_empty() {
                entries.remove(&k);
            } else {
                overrides.push((k, v));
            }
        }
        RunConfig::from_entries(entries, &overrides)
    }
}

type Handler = fn(&RunConfig, &mut dyn Write, &mut dyn Write) -> i32;

/// Parses arguments, runs the subcommand and returns the exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (args, cmd): (&RunArgs, Handler) = match &cli.command {
        Command::Point(a) => (a, cmd_point),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::Validate(a) => (a, cmd_validate),
    };
    match args.load() {
        Ok(cfg) => cmd(&cfg, stdout, stderr),
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            EXIT_CONFIG
        }
    }
}

pub fn cmd_point(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match evaluate_point(&cfg.params, cfg.convention) {
        Ok(r) => {
            let opt = |v: Option<f64>| v.map(|x| format_significant(x, 12)).unwrap_or_default();
            let _ = writeln!(stdout, "stable={}", r.stable);
            let _ = writeln!(stdout, "margin={}", format_significant(r.margin, 12));
            let _ = writeln!(stdout, "eta_minus={}", opt(r.eta_minus));
            let _ = writeln!(stdout, "e_n={}", opt(r.e_n));
            let _ = writeln!(stdout, "a_s_abs={}", format_significant(r.a_s_abs, 12));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "numerical error: {e}");
            EXIT_NUMERICAL
        }
    }
}

fn write_all(path: &Path, body: &str) -> std::io::Result<()> {
    let res = fs::write(path, body);
    if res.is_err() {
        let _ = fs::remove_file(path);
    }
    res
}

pub fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if cfg.axes.is_empty() {
        let _ = writeln!(
            stderr,
            "config error: key `axis1`: sweep needs at least one axis"
        );
        return EXIT_CONFIG;
    }
    let execution = cfg.threads.map_or(Execution::Parallel, Execution::Threads);
    let result = match sweep(&cfg.params, &cfg.axes, cfg.convention, execution) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "numerical error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let failed = result.cells.iter().filter(|c| c.outcome.is_err()).count();
    if failed > 0 {
        let _ = writeln!(
            stderr,
            "warning: {failed} cell(s) failed; written with empty fields"
        );
    }

    let csv = to_csv(&result);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = write_all(path, &csv) {
                let _ = writeln!(stderr, "cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => {
            let _ = stdout.write_all(csv.as_bytes());
        }
    }
    if let Some(svg_path) = &cfg.svg {
        if let Err(e) = write_all(svg_path, &to_svg(&result)) {
            let _ = writeln!(stderr, "cannot write {}: {e}", svg_path.display());
            if let Some(csv_path) = &cfg.out {
                let _ = fs::remove_file(csv_path);
            }
            return EXIT_CONFIG;
        }
    }
    EXIT_OK
}

pub fn cmd_validate(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let checks = match run_oracle_suite(&cfg.params, cfg.convention) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "numerical error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let mut failed = false;
    for c in &checks {
        failed |= c.status == CheckStatus::Fail;
        let _ = writeln!(stdout, "{}: {} ({})", c.name, c.status, c.detail);
    }
    if let Ok(r) = evaluate_point(&cfg.params, cfg.convention) {
        let e_n = r.e_n.map(|x| format_significant(x, 12)).unwrap_or_default();
        let _ = writeln!(stdout, "stable={} e_n={e_n}", r.stable);
    }
    if failed {
        EXIT_VALIDATION
    } else {
        EXIT_OK
    }
}
