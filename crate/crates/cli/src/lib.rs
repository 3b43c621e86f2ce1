//! Command-line driver: verification report, density and kinematics tables
//! for plotting, and coherent-state amplitudes by any of three routes.

pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cstates::gk::{gk_wavefunction, GkLabel};
use cstates::lwave::{
    cs_closed, default_r_max, density_rho, ladder_closed_spec, mean_position, velocity, velocity_asymptote,
    LWaveModel, LWaveParams,
};
use cstates::quad::{QuadOptions, MAX_RULE_SIZE};
use cstates::tridiag::cs_wavefunction_numeric;
use cstates::verify::{self, VerifyConfig, VerifyReport};
use serde_json::json;
use thiserror::Error;

use crate::table::{fmt_num, Table};

#[derive(Debug, Parser)]
#[command(name = "cstates", version, about = "Coherent states of the free particle in the l-wave")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification suite; exits 1 if any check fails.
    Verify(CommonArgs),
    /// Position density on a radial grid, one block per gamma.
    Density(CommonArgs),
    /// Mean position, velocity and its asymptote against gamma.
    Kinematics(CommonArgs),
    /// Complex amplitudes of a coherent state on a radial grid.
    State(StateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Angular momentum quantum number.
    #[arg(long, default_value_t = 0)]
    pub ell: u32,
    /// Basis scale (positive).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Evolution parameter; repeat or separate with commas for several values.
    #[arg(long = "gamma", allow_negative_numbers = true, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Smallest radius; by default the grid is r_max*i/n for i = 1..=n.
    #[arg(long)]
    pub r_min: Option<f64>,
    /// Largest radius; defaults to five mean positions at the largest |gamma|.
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub r_points: usize,
    /// Points in fixed quadrature rules.
    #[arg(long, default_value_t = 200)]
    pub rule_size: usize,
    /// Relative tolerance of adaptive energy integrals.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Route::Closed)]
    pub route: Route,
    /// Index of the ladder eigenvalue `c_k` labelling the state.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Tridiagonal,
    Gk,
    Closed,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] cstates::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: LWaveParams,
    pub gammas: Vec<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub r_points: usize,
    pub format: Format,
    pub rule_size: usize,
    pub tol: f64,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs, default_gammas: &[f64]) -> Result<Self, CliError> {
        let params = LWaveParams::new(args.ell, args.lambda)
            .map_err(|_| usage(format!("--lambda must be positive and finite, got {}", args.lambda)))?;
        if !(args.tol > 0.0) || !args.tol.is_finite() {
            return Err(usage(format!("--tol must be positive, got {}", args.tol)));
        }
        if args.r_points < 2 {
            return Err(usage(format!("--r-points must be at least 2, got {}", args.r_points)));
        }
        if args.rule_size < 1 || args.rule_size > MAX_RULE_SIZE {
            return Err(usage(format!("--rule-size must lie in 1..={MAX_RULE_SIZE}, got {}", args.rule_size)));
        }
        if let Some(r) = args.r_min {
            if !(r > 0.0) || !r.is_finite() {
                return Err(usage(format!("--r-min must be positive, got {r}")));
            }
        }
        if let Some(r) = args.r_max {
            if !(r > 0.0) || !r.is_finite() {
                return Err(usage(format!("--r-max must be positive, got {r}")));
            }
        }
        if let (Some(lo), Some(hi)) = (args.r_min, args.r_max) {
            if lo >= hi {
                return Err(usage(format!("--r-min ({lo}) must be below --r-max ({hi})")));
            }
        }
        if let Some(g) = args.gamma.iter().find(|g| !g.is_finite()) {
            return Err(usage(format!("--gamma must be finite, got {g}")));
        }
        let gammas = if args.gamma.is_empty() {
            default_gammas.to_vec()
        } else {
            args.gamma.clone()
        };
        Ok(Self {
            params,
            gammas,
            r_min: args.r_min,
            r_max: args.r_max,
            r_points: args.r_points,
            format: args.format,
            rule_size: args.rule_size,
            tol: args.tol,
        })
    }

    /// Radial grid: `linspace(r_min, r_max, n)` or `r_max·i/n`, `i = 1..=n`.
    pub fn r_grid(&self) -> Result<Vec<f64>, CliError> {
        let r_max = self.r_max.unwrap_or_else(|| default_r_max(&self.params, &self.gammas));
        let n = self.r_points;
        match self.r_min {
            Some(lo) => {
                if lo >= r_max {
                    return Err(usage(format!("--r-min ({lo}) must be below the grid end ({r_max})")));
                }
                Ok((0..n).map(|i| lo + (r_max - lo) * i as f64 / (n - 1) as f64).collect())
            }
            None => Ok((1..=n).map(|i| r_max * i as f64 / n as f64).collect()),
        }
    }

    fn quad(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.tol,
            abs_tol: 1e-14,
            ..QuadOptions::default()
        }
    }

    fn meta(&self, table: Table) -> Table {
        table
            .with_meta("ell", json!(self.params.ell()))
            .with_meta("lambda", json!(self.params.lambda()))
    }
}

const DENSITY_GAMMAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn kinematics_gammas() -> Vec<f64> {
    (0..=40).map(|i| i as f64 * 0.25).collect()
}

pub fn density_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let grid = cfg.r_grid()?;
    let mut table = cfg.meta(Table::new("density", vec!["gamma [1/energy]", "r [length]", "rho [1/length]"]));
    for &g in &cfg.gammas {
        let mut rows = Vec::with_capacity(grid.len());
        for &r in &grid {
            rows.push(vec![g, r, density_rho(&cfg.params, g, r)?]);
        }
        table.blocks.push(rows);
    }
    Ok(table)
}

pub fn kinematics_table(cfg: &RunConfig) -> Table {
    let mut table = cfg.meta(Table::new(
        "kinematics",
        vec![
            "gamma [1/energy]",
            "mean_r [length]",
            "velocity [length*energy]",
            "velocity_asymptote [length*energy]",
        ],
    ));
    let asym = velocity_asymptote(&cfg.params);
    table.blocks.push(
        cfg.gammas
            .iter()
            .map(|&g| vec![g, mean_position(&cfg.params, g), velocity(&cfg.params, g), asym])
            .collect(),
    );
    table
}

pub fn state_table(cfg: &RunConfig, route: Route, k: usize) -> Result<Table, CliError> {
    if route != Route::Tridiagonal && k != 0 {
        return Err(usage(format!(
            "--route {} builds only the k = 0 state; use --route tridiagonal for k = {k}",
            route.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
        )));
    }
    let grid = cfg.r_grid()?;
    let params = cfg.params;
    let model = LWaveModel::new(params);
    let ladder = ladder_closed_spec(&params, k + 1);
    let mut table = cfg
        .meta(Table::new(
            "state",
            vec!["gamma [1/energy]", "r [length]", "re_psi [length^-1/2]", "im_psi [length^-1/2]"],
        ))
        .with_meta("k", json!(k))
        .with_meta(
            "route",
            json!(route.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()),
        );
    for &g in &cfg.gammas {
        let opts = cfg.quad().for_oscillation(g * params.lambda() * params.lambda());
        let label = GkLabel::from_lambda(params.ell(), params.lambda(), g)?;
        let mut rows = Vec::with_capacity(grid.len());
        for &r in &grid {
            let psi = match route {
                Route::Closed => cs_closed(&params, g, r)?,
                Route::Gk => gk_wavefunction(&label, r, &opts)?,
                Route::Tridiagonal => cs_wavefunction_numeric(&model, &ladder, k, g, r, &opts)?,
            };
            rows.push(vec![g, r, psi.re, psi.im]);
        }
        table.blocks.push(rows);
    }
    Ok(table)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_report<W: Write + ?Sized>(report: &VerifyReport, format: Format, out: &mut W) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)
        }
        Format::Csv => {
            let mode = match report.kernel_constant_mode {
                Some(m) => serde_json::to_value(m)?.as_str().unwrap_or_default().to_string(),
                None => "none".to_string(),
            };
            writeln!(out, "# kernel_constant_mode={mode}")?;
            writeln!(out, "# mean_position_constant={}", fmt_num(report.mean_position_constant))?;
            for note in &report.notes {
                writeln!(out, "# note: {note}")?;
            }
            writeln!(out, "check_name,module,paper_ref,observed,tolerance,pass")?;
            for c in &report.checks {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.check_name,
                    c.module,
                    csv_field(&c.paper_ref),
                    fmt_num(c.observed),
                    fmt_num(c.tolerance),
                    c.pass
                )?;
            }
            Ok(())
        }
    }
}

fn emit(table: &Table, format: Format, out: &mut dyn Write) -> io::Result<()> {
    let mut out = out;
    match format {
        Format::Csv => table.write_csv(&mut out),
        Format::Json => table.write_json(&mut out),
    }
}

fn with_output<F>(path: &Option<PathBuf>, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            f(stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Executes a parsed command; `Ok(false)` means verification checks failed.
pub fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<bool, CliError> {
    match cmd {
        Command::Verify(args) => {
            let cfg = RunConfig::from_args(args, &[0.0])?;
            let report = verify::run(&VerifyConfig {
                rule_size: cfg.rule_size,
                quad_rel_tol: cfg.tol,
            });
            with_output(&args.out, stdout, |w| write_report(&report, cfg.format, w))?;
            Ok(report.all_passed())
        }
        Command::Density(args) => {
            let cfg = RunConfig::from_args(args, &DENSITY_GAMMAS)?;
            let table = density_table(&cfg)?;
            with_output(&args.out, stdout, |w| emit(&table, cfg.format, w))?;
            Ok(true)
        }
        Command::Kinematics(args) => {
            let cfg = RunConfig::from_args(args, &kinematics_gammas())?;
            let table = kinematics_table(&cfg);
            with_output(&args.out, stdout, |w| emit(&table, cfg.format, w))?;
            Ok(true)
        }
        Command::State(args) => {
            let cfg = RunConfig::from_args(&args.common, &[0.0])?;
            let table = state_table(&cfg, args.route, args.k)?;
            with_output(&args.common.out, stdout, |w| emit(&table, cfg.format, w))?;
            Ok(true)
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> CommonArgs {
        CommonArgs {
            ell: 0,
            lambda: 1.0,
            gamma: vec![],
            r_min: None,
            r_max: None,
            r_points: 400,
            rule_size: 200,
            tol: 1e-12,
            format: Format::Csv,
            out: None,
        }
    }

    #[test]
    fn default_grid_excludes_origin() {
        let cfg = RunConfig::from_args(&args(), &DENSITY_GAMMAS).unwrap();
        let grid = cfg.r_grid().unwrap();
        assert_eq!(grid.len(), 400);
        assert!(grid[0] > 0.0);
        let expect = 5.0 * mean_position(&cfg.params, 2.0);
        assert!((grid[399] - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn explicit_grid_is_linspace() {
        let a = CommonArgs {
            r_min: Some(0.5),
            r_max: Some(2.5),
            r_points: 5,
            ..args()
        };
        let grid = RunConfig::from_args(&a, &[0.0]).unwrap().r_grid().unwrap();
        assert_eq!(grid, vec![0.5, 1.0, 1.5, 2.0, 2.5]);
    }

    #[test]
    fn invalid_configs_are_usage_errors() {
        let bad = [
            CommonArgs { lambda: 0.0, ..args() },
            CommonArgs { tol: 0.0, ..args() },
            CommonArgs { r_points: 1, ..args() },
            CommonArgs { r_min: Some(0.0), ..args() },
            CommonArgs {
                r_min: Some(2.0),
                r_max: Some(1.0),
                ..args()
            },
            CommonArgs { rule_size: 0, ..args() },
            CommonArgs {
                gamma: vec![f64::NAN],
                ..args()
            },
        ];
        for a in bad {
            let err = RunConfig::from_args(&a, &[0.0]).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{a:?}");
        }
    }

    #[test]
    fn gk_route_rejects_nonzero_k() {
        let cfg = RunConfig::from_args(&args(), &[0.0]).unwrap();
        let err = state_table(&cfg, Route::Gk, 1).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("k = 0"));
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
