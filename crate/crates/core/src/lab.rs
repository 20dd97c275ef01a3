//! The `annulus-lab` command line: configuration resolution, subcommand
//! orchestration and CSV/JSON emission.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::energy::{combined_energy_separable, fmt_num, quasiradial_energy, SeparableMap, ENERGY_CSV_HEADER};
use crate::error::Error;
use crate::euler_lagrange::build_radial_minimizer;
use crate::geometry::Annulus;
use crate::profiles::{load_tabulated_profile, make_boundary_profile, Orientation, RadialProfile};
use crate::quadrature::QuadratureConfig;
use crate::verification::{
    gap_report, run_suite, sweep_lambda, InjectedFault, SuiteConfig, DEFAULT_SEED, SWEEP_CSV_HEADER,
};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NON_CONVERGENCE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "annulus-lab",
    version,
    about = "Energies of radial and quasiradial maps between annuli"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy of one separable map, or its combined energy with --a/--b.
    Energy(EnergyArgs),
    /// Energies along a grid of dilation parameters.
    Sweep(SweepArgs),
    /// Euler-Lagrange radial minimizer and the radial/quasiradial gap (JSON).
    RadialMin(CommonArgs),
    /// Run the property suite; exit status 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Dimension of the ambient space (3..=30).
    #[arg(long)]
    pub n: Option<usize>,
    /// Inner radius of the domain annulus.
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer radius of the domain annulus.
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    /// Inner radius of the target annulus.
    #[arg(long = "r-star")]
    pub r_star: Option<f64>,
    /// Outer radius of the target annulus.
    #[arg(long = "R-star")]
    pub big_r_star: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// TOML file with [annulus], [quadrature] and [output] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// boundary-increasing, boundary-decreasing, el-minimizer or tabulated:<path>.
    #[arg(long, default_value = "boundary-increasing")]
    pub profile: String,
    /// Conformal dilation parameter; 1 is the radial map.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Weight of the spherical part; selects the combined energy.
    #[arg(long)]
    pub a: Option<f64>,
    /// Weight of the radial part; selects the combined energy.
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// boundary-increasing, boundary-decreasing, el-minimizer or tabulated:<path>.
    #[arg(long, default_value = "boundary-increasing")]
    pub profile: String,
    /// geometric:start,ratio,count or a comma-separated list of values.
    #[arg(long, default_value = "geometric:1,0.5,11")]
    pub grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Multiply every closed-form bound by this factor (negative control).
    #[arg(long, hide = true)]
    pub inject_bound_scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    annulus: AnnulusSection,
    #[serde(default)]
    quadrature: QuadratureSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnulusSection {
    n: Option<usize>,
    r: Option<f64>,
    #[serde(rename = "R")]
    big_r: Option<f64>,
    r_star: Option<f64>,
    #[serde(rename = "R_star")]
    big_r_star: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureSection {
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    output: Option<PathBuf>,
    format: Option<Format>,
}

/// Effective configuration after merging flags, config file and defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabConfig {
    pub n: usize,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r_star: f64,
    #[serde(rename = "R_star")]
    pub big_r_star: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for LabConfig {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        Self {
            n: 4,
            r: 1.0,
            big_r: 2.0,
            r_star: 1.0,
            big_r_star: std::f64::consts::E,
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            output: None,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    ChecksFailed(String),
}

impl LabError {
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) => EXIT_INVALID,
            LabError::Library(e) if e.is_non_convergence() => EXIT_NON_CONVERGENCE,
            LabError::Library(Error::InvalidInput { .. } | Error::LambdaOutOfRange { .. }) => EXIT_INVALID,
            LabError::Library(_) | LabError::Io(_) | LabError::ChecksFailed(_) => EXIT_FAILURE,
        }
    }
}

type LabResult<T> = std::result::Result<T, LabError>;

fn config_error(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl LabConfig {
    /// Flags override the config file, which overrides defaults.
    pub fn resolve(args: &CommonArgs) -> LabResult<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
                toml::from_str::<ConfigFile>(&text)
                    .map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let d = LabConfig::default();
        let cfg = LabConfig {
            n: args.n.or(file.annulus.n).unwrap_or(d.n),
            r: args.r.or(file.annulus.r).unwrap_or(d.r),
            big_r: args.big_r.or(file.annulus.big_r).unwrap_or(d.big_r),
            r_star: args.r_star.or(file.annulus.r_star).unwrap_or(d.r_star),
            big_r_star: args.big_r_star.or(file.annulus.big_r_star).unwrap_or(d.big_r_star),
            rel_tol: args.rel_tol.or(file.quadrature.rel_tol).unwrap_or(d.rel_tol),
            abs_tol: args.abs_tol.or(file.quadrature.abs_tol).unwrap_or(d.abs_tol),
            output: args.output.clone().or(file.output.output),
            format: args.format.or(file.output.format).unwrap_or(d.format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> LabResult<()> {
        if !(3..=crate::geometry::MAX_DIMENSION).contains(&self.n) {
            return Err(config_error(format!(
                "invalid n: must lie in 3..={}, got {}",
                crate::geometry::MAX_DIMENSION,
                self.n
            )));
        }
        let radii = [
            ("r", self.r),
            ("R", self.big_r),
            ("r_star", self.r_star),
            ("R_star", self.big_r_star),
        ];
        for (name, v) in radii {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_error(format!(
                    "invalid {name}: must be positive and finite, got {v}"
                )));
            }
        }
        if self.r >= self.big_r {
            return Err(config_error(format!(
                "invalid R: domain needs inner<outer (r < R), got r = {}, R = {}",
                self.r, self.big_r
            )));
        }
        if self.r_star >= self.big_r_star {
            return Err(config_error(format!(
                "invalid R_star: target needs inner<outer (r_star < R_star), got r_star = {}, R_star = {}",
                self.r_star, self.big_r_star
            )));
        }
        self.quadrature().validate().map_err(|e| config_error(e.to_string()))
    }

    pub fn domain(&self) -> Annulus {
        Annulus::new(self.n, self.r, self.big_r).expect("validated")
    }

    pub fn target(&self) -> Annulus {
        Annulus::new(self.n, self.r_star, self.big_r_star).expect("validated")
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..QuadratureConfig::default()
        }
    }

    /// `# key = value` lines describing the effective configuration.
    pub fn provenance(&self, command: &str, extra: &[(&str, String)]) -> Vec<String> {
        let mut lines = vec![
            format!("# annulus-lab {} {command}", env!("CARGO_PKG_VERSION")),
            format!("# n = {}", self.n),
            format!("# r = {}", fmt_num(self.r)),
            format!("# R = {}", fmt_num(self.big_r)),
            format!("# r_star = {}", fmt_num(self.r_star)),
            format!("# R_star = {}", fmt_num(self.big_r_star)),
            format!("# rel_tol = {}", fmt_num(self.rel_tol)),
            format!("# abs_tol = {}", fmt_num(self.abs_tol)),
        ];
        lines.extend(extra.iter().map(|(k, v)| format!("# {k} = {v}")));
        lines
    }
}

/// Parses a profile spec against the configured annuli.
pub fn parse_profile(spec: &str, cfg: &LabConfig) -> LabResult<RadialProfile> {
    let (domain, target) = (cfg.domain(), cfg.target());
    let profile = match spec {
        "boundary-increasing" => make_boundary_profile(&domain, &target, Orientation::Increasing)?,
        "boundary-decreasing" => make_boundary_profile(&domain, &target, Orientation::Decreasing)?,
        "el-minimizer" => build_radial_minimizer(&domain, &target)?.profile,
        other => match other.strip_prefix("tabulated:") {
            Some(path) if !path.is_empty() => load_tabulated_profile(Path::new(path), &domain, &target)
                .map_err(|e| config_error(format!("invalid profile {path}: {e}")))?,
            _ => {
                return Err(config_error(format!(
                    "invalid profile: expected boundary-increasing, boundary-decreasing, el-minimizer or tabulated:<path>, got {other:?}"
                )))
            }
        },
    };
    Ok(profile)
}

/// Expands `geometric:start,ratio,count` or an explicit comma list.
pub fn parse_grid(spec: &str) -> LabResult<Vec<f64>> {
    let bad = |why: String| config_error(format!("invalid grid {spec:?}: {why}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
    let values = if let Some(rest) = spec.strip_prefix("geometric:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(bad("geometric grids take start,ratio,count".into()));
        }
        let start = number(parts[0])?;
        let ratio = number(parts[1])?;
        let count: usize = parts[2].trim().parse().map_err(|e| bad(format!("count: {e}")))?;
        if count == 0 {
            return Err(bad("count must be positive".into()));
        }
        (0..count).map(|k| start * ratio.powi(k as i32)).collect()
    } else {
        spec.split(',').map(number).collect::<LabResult<Vec<f64>>>()?
    };
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(bad(format!("lambda values must be positive, got {v}")));
    }
    Ok(values)
}

fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

fn emit(cfg: &LabConfig, body: &str) -> LabResult<()> {
    match &cfg.output {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn cmd_energy(args: &EnergyArgs) -> LabResult<()> {
    let cfg = LabConfig::resolve(&args.common)?;
    let profile = parse_profile(&args.profile, &cfg)?;
    let map = SeparableMap::new(profile, args.lambda)?;
    let quad = cfg.quadrature();
    let report = match (args.a, args.b) {
        (None, None) => quasiradial_energy(&map, &quad)?,
        (a, b) => combined_energy_separable(a.unwrap_or(1.0), b.unwrap_or(1.0), &map, &quad)?,
    };
    eprintln!(
        "bound = {}, relative gap = {}",
        fmt_num(report.bound),
        fmt_num(report.relative_gap)
    );
    let body = match cfg.format {
        Format::Csv => {
            let mut lines = cfg.provenance(
                "energy",
                &[("profile", args.profile.clone()), ("lambda", fmt_num(args.lambda))],
            );
            lines.push(ENERGY_CSV_HEADER.to_string());
            lines.push(report.csv_row());
            lines.join("\n") + "\n"
        }
        Format::Json => json_text(&serde_json::json!({ "config": cfg, "report": report })),
    };
    emit(&cfg, &body)
}

pub fn cmd_sweep(args: &SweepArgs) -> LabResult<()> {
    let cfg = LabConfig::resolve(&args.common)?;
    let lambdas = parse_grid(&args.grid)?;
    let profile = parse_profile(&args.profile, &cfg)?;
    let table = sweep_lambda(&profile, &lambdas, &cfg.quadrature())?;
    for v in &table.violations {
        eprintln!("warning: {v}");
    }
    let body = match cfg.format {
        Format::Csv => {
            let mut lines = cfg.provenance(
                "sweep",
                &[("profile", args.profile.clone()), ("grid", args.grid.clone())],
            );
            lines.push(SWEEP_CSV_HEADER.to_string());
            lines.extend(table.rows.iter().map(|row| csv_line(&row.csv_fields())));
            lines.join("\n") + "\n"
        }
        Format::Json => json_text(&serde_json::json!({ "config": cfg, "sweep": table })),
    };
    emit(&cfg, &body)
}

pub fn cmd_radial_min(args: &CommonArgs) -> LabResult<()> {
    let cfg = LabConfig::resolve(args)?;
    let (domain, target) = (cfg.domain(), cfg.target());
    let solution = build_radial_minimizer(&domain, &target)?;
    let gap = gap_report(&domain, &target, &cfg.quadrature())?;
    let body = json_text(&serde_json::json!({
        "config": cfg,
        "solution": solution.summary(),
        "gap": gap,
    }));
    emit(&cfg, &body)
}

pub fn cmd_verify(args: &VerifyArgs) -> LabResult<()> {
    let cfg = LabConfig::resolve(&args.common)?;
    if args.common.n.is_some() {
        eprintln!("note: verify runs its own dimension set; --n is ignored");
    }
    let fault = match args.inject_bound_scale {
        Some(s) if s.is_finite() && s > 0.0 => Some(InjectedFault::ScaleBound(s)),
        Some(s) => {
            return Err(config_error(format!(
                "invalid inject-bound-scale: must be positive, got {s}"
            )))
        }
        None => None,
    };
    let suite = SuiteConfig {
        r: cfg.r,
        big_r: cfg.big_r,
        r_star: cfg.r_star,
        big_r_star: cfg.big_r_star,
        quadrature: cfg.quadrature(),
        seed: args.seed,
        fault,
    };
    let report = run_suite(&suite)?;
    let body = match cfg.format {
        Format::Csv => {
            let lines = cfg.provenance("verify", &[("seed", args.seed.to_string())]);
            format!("{}\n{report}\n", lines.join("\n"))
        }
        Format::Json => json_text(&report),
    };
    emit(&cfg, &body)?;
    let failed: Vec<String> = report
        .failures()
        .map(|c| format!("{} [{}]", c.name, c.anchor))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(LabError::ChecksFailed(format!("failed checks: {}", failed.join(", "))))
    }
}

pub fn run(cli: &Cli) -> LabResult<()> {
    match &cli.command {
        Command::Energy(a) => cmd_energy(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::RadialMin(a) => cmd_radial_min(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Parses the process arguments, runs, and maps failures to exit codes.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
