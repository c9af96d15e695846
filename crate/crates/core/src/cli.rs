//! Command-line front end.
//!
//! Every command writes a JSON report carrying `schema_version`, the fully
//! resolved configuration and every measured number with its tolerance.
//! Reports contain no timestamps, so identical invocations produce identical
//! bytes. Exit codes: 0 pass, 1 failed assertion, 2 configuration error,
//! 3 I/O error.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diagnostics::{self, Claim, NamedFit};
use crate::error::{Error, Result};
use crate::frame::{self, ChannelId, FrameChannels, FrameSpec};
use crate::grid::{GridSpec, ScalarField};
use crate::io;
use crate::profiles::{self, ProfileSpec, RadialProfile, WaveletProfile};
use crate::riesz::{self, MultiIndex};
use crate::spectral;
use crate::synth;
use crate::window::{Smoothness, WindowSpec};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RIESZ_FRAMES_OUT";

pub const TIGHTNESS_TOL: f64 = 1e-12;
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
pub const ENERGY_TOL: f64 = 1e-10;
pub const MOMENT_TOL: f64 = 1e-8;
pub const POISSON_RMS_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "riesz-frames",
    version,
    about = "Steerable Riesz wavelet frames and their diagnostics"
)]
pub struct Cli {
    /// Output directory for fields and reports.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a wavelet (or the Poisson kernel) in both domains.
    Build(BuildArgs),
    /// Apply a Riesz transform to a stored field.
    Riesz(RieszArgs),
    /// Run one of the numerical checks.
    Check(CheckArgs),
    /// Decompose a stored field into frame channels.
    Analyze(AnalyzeArgs),
    /// Rebuild a field from stored frame channels.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Spatial dimension.
    #[arg(long = "d", default_value_t = 2)]
    pub dim: usize,
    /// Samples per axis.
    #[arg(long = "N", default_value_t = 256)]
    pub size: usize,
    /// Sample spacing.
    #[arg(long, default_value_t = 1.0)]
    pub dx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileChoice {
    Original,
    Modified,
    Poisson,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[arg(long, value_enum, default_value = "modified")]
    pub profile: ProfileChoice,
    /// Window smoothness: 3, 4, 5 or inf.
    #[arg(long = "n", default_value = "3")]
    pub smoothness: String,
    /// Window transition width.
    #[arg(long, default_value_t = 0.125)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FrameArgs {
    /// Number of dyadic scales.
    #[arg(long = "J", default_value_t = 3)]
    pub scales: usize,
    /// Riesz order of the band channels.
    #[arg(long, default_value_t = 1)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Poisson scale parameter.
    #[arg(long, default_value_t = 4.0)]
    pub s: f64,
    /// File name stem; defaults to the profile name.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    /// Input field (header or payload path, or the common stem).
    pub input: PathBuf,
    /// 1-based axis of a first-order component.
    #[arg(long, required_unless_present = "alpha", conflicts_with = "alpha")]
    pub axis: Option<usize>,
    /// Multi-index such as `1,0` or `2,1`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Compare the output with the Poisson oracle at this scale.
    #[arg(long = "poisson-oracle")]
    pub poisson_oracle: Option<f64>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Tightness,
    Reconstruction,
    Energy,
    Moments,
    Decay,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::Tightness => "tightness",
            CheckKind::Reconstruction => "reconstruction",
            CheckKind::Energy => "energy",
            CheckKind::Moments => "moments",
            CheckKind::Decay => "decay",
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub kind: CheckKind,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    /// Seed for random test fields.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shell width for decay fits; defaults to the spacing.
    #[arg(long = "shell-width")]
    pub shell_width: Option<f64>,
    /// Lower end of the decay fit range; defaults to 8 dx.
    #[arg(long = "fit-min")]
    pub fit_min: Option<f64>,
    /// Upper end of the decay fit range; defaults to N dx / 8.
    #[arg(long = "fit-max")]
    pub fit_max: Option<f64>,
    /// Highest total moment degree.
    #[arg(long = "beta-max", default_value_t = 8)]
    pub beta_max: usize,
    /// Profiles for the decay check, slowest first: original, modified,
    /// modified:n3, modified:n4, modified:n5, modified:inf.
    #[arg(long, value_delimiter = ',', default_value = "original,modified")]
    pub compare: Vec<String>,
    /// Required exponent gap between the original and a modified profile.
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    /// Also fit the first Riesz component of every modified profile and
    /// require its exponent within this distance of the profile's own.
    #[arg(long = "riesz-within")]
    pub riesz_within: Option<f64>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub frame: FrameArgs,
    /// Channel file prefix.
    #[arg(long, default_value = "frame")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    /// Directory holding the channel files.
    pub dir: PathBuf,
    /// Channel file prefix.
    #[arg(long, default_value = "frame")]
    pub tag: String,
    #[arg(long)]
    pub name: Option<String>,
}

/// Fully resolved run configuration, echoed into every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    pub out_dir: String,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poisson_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riesz_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shell_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_range: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_max: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub compare: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riesz_within: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<MultiIndex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
}

#[derive(Debug, Serialize)]
struct Report<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    passed: bool,
    results: T,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub report: PathBuf,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Exit code for an error that stopped a command.
pub fn error_exit_code(e: &Error) -> u8 {
    if e.is_io() {
        3
    } else {
        2
    }
}

/// Parses `args` (including the program name), runs and maps the result to
/// an exit code. Messages go to stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            if !outcome.passed {
                eprintln!("check failed; see {}", outcome.report.display());
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let out = cli.out;
    match cli.command {
        Command::Build(a) => build(&out, a),
        Command::Riesz(a) => riesz_cmd(&out, a),
        Command::Check(a) => check(&out, a),
        Command::Analyze(a) => analyze(&out, a),
        Command::Synthesize(a) => synthesize(&out, a),
    }
}

fn resolve_grid(a: &GridArgs) -> Result<GridSpec> {
    GridSpec::new(a.dim, a.size, a.dx)
}

fn resolve_window(a: &ProfileArgs) -> Result<WindowSpec> {
    let smoothness: Smoothness = a.smoothness.parse()?;
    WindowSpec::new(smoothness, a.eps)
}

/// Wavelet profile for `original` or `modified`; `poisson` is not a wavelet.
fn resolve_profile(a: &ProfileArgs) -> Result<ProfileSpec> {
    match a.profile {
        ProfileChoice::Original => Ok(ProfileSpec::Original),
        ProfileChoice::Modified => Ok(ProfileSpec::Modified(resolve_window(a)?)),
        ProfileChoice::Poisson => Err(Error::Config(
            "the Poisson kernel is only available to `build`".into(),
        )),
    }
}

fn prepare_out(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn base_config(command: &str, out: &Path, name: String) -> RunConfig {
    RunConfig {
        command: command.into(),
        out_dir: out.display().to_string(),
        name,
        ..RunConfig::default()
    }
}

fn write_report<T: Serialize>(
    path: &Path,
    config: &RunConfig,
    passed: bool,
    results: T,
) -> Result<Outcome> {
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        command: &config.command,
        config,
        passed,
        results,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
    Ok(Outcome {
        passed,
        report: path.to_path_buf(),
    })
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Serialize)]
struct Peak {
    omega: f64,
    value: f64,
}

#[derive(Serialize)]
struct BuildResults {
    spectrum: String,
    spatial: String,
    profile_csv: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_outside_support: Option<f64>,
    peak: Peak,
    imaginary_residue: f64,
}

fn build(out: &Path, a: BuildArgs) -> Result<Outcome> {
    let grid = resolve_grid(&a.grid)?;
    let poisson = a.profile.profile == ProfileChoice::Poisson;
    let default_name = match a.profile.profile {
        ProfileChoice::Original => "original",
        ProfileChoice::Modified => "modified",
        ProfileChoice::Poisson => "poisson",
    };
    let mut config = base_config("build", out, a.name.unwrap_or_else(|| default_name.into()));
    config.grid = Some(grid);

    let (spectrum, spatial, residue, radial): (_, _, f64, Box<dyn RadialProfile>) = if poisson {
        let oracle = diagnostics::poisson_oracle(grid, a.s)?;
        config.poisson_s = Some(a.s);
        let s = a.s;
        let spectrum = spectral::forward(&oracle.kernel);
        (
            spectrum,
            oracle.kernel,
            0.0,
            Box::new(move |w: f64| (-s * w).exp()),
        )
    } else {
        let spec = resolve_profile(&a.profile)?;
        config.profile = Some(spec);
        let wavelet = spec.wavelet();
        let spectrum = profiles::sample_radial(&wavelet, &grid);
        let (spatial, residue) = spectral::inverse_with_residue(&spectrum);
        (spectrum, spatial, residue, Box::new(wavelet))
    };

    prepare_out(out)?;
    let stem = out.join(&config.name);
    let spectrum_path = PathBuf::from(format!("{}_spectrum", stem.display()));
    let spatial_path = PathBuf::from(format!("{}_spatial", stem.display()));
    let csv_path = PathBuf::from(format!("{}_profile.csv", stem.display()));
    io::write_spectrum(&spectrum, &spectrum_path)?;
    io::write_scalar(&spatial, &spatial_path)?;
    profiles::write_profile_csv(radial.as_ref(), PI, 1025, &csv_path)?;

    let radii = grid.frequency_radii();
    let (peak_bin, peak_value) = spectrum.values().iter().map(|v| v.norm()).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, v)| if v > best.1 { (i, v) } else { best },
    );
    let (support, outside) = match config.profile {
        Some(spec) => {
            let (lo, hi) = spec.wavelet().support();
            let outside = radii
                .iter()
                .zip(spectrum.values())
                .filter(|(r, _)| **r <= lo || **r > hi)
                .map(|(_, v)| v.norm())
                .fold(0.0, f64::max);
            (Some((lo, hi)), Some(outside))
        }
        None => (None, None),
    };
    let passed = outside.is_none_or(|m| m == 0.0);
    let results = BuildResults {
        spectrum: path_string(&spectrum_path),
        spatial: path_string(&spatial_path),
        profile_csv: path_string(&csv_path),
        support,
        max_outside_support: outside,
        peak: Peak {
            omega: radii[peak_bin],
            value: peak_value,
        },
        imaginary_residue: residue,
    };
    write_report(
        &PathBuf::from(format!("{}_report.json", stem.display())),
        &config,
        passed,
        results,
    )
}

#[derive(Serialize)]
struct RieszResults {
    output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    poisson_oracle: Option<OracleResult>,
}

#[derive(Serialize)]
struct OracleResult {
    comparison: diagnostics::OracleComparison,
    tolerance: f64,
}

fn riesz_cmd(out: &Path, a: RieszArgs) -> Result<Outcome> {
    let (header, _) = io::sidecar_paths(&a.input);
    let field = io::read_scalar(&a.input)?;
    let dim = field.grid().dim();
    let alpha = match (a.axis, &a.alpha) {
        (Some(axis), None) => {
            if axis == 0 || axis > dim {
                return Err(Error::Argument(format!("axis {axis} is outside 1..={dim}")));
            }
            MultiIndex::unit(dim, axis - 1)?
        }
        (None, Some(text)) => text.parse::<MultiIndex>()?,
        _ => {
            return Err(Error::Argument(
                "give exactly one of --axis and --alpha".into(),
            ))
        }
    };
    if alpha.order() == 0 {
        return Err(Error::Argument(
            "Riesz transform order must be at least 1".into(),
        ));
    }
    let stem = header
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "field".into());
    let mut config = base_config(
        "riesz",
        out,
        a.name
            .unwrap_or_else(|| format!("{stem}_riesz_{}", alpha.tag())),
    );
    config.grid = Some(*field.grid());
    config.alpha = Some(alpha.clone());
    config.input = Some(path_string(&a.input));
    config.poisson_s = a.poisson_oracle;

    let result = riesz::riesz_higher(&field, &alpha)?;
    let oracle = match a.poisson_oracle {
        Some(s) => {
            if alpha.order() != 1 {
                return Err(Error::Argument(
                    "the Poisson oracle needs a first-order transform".into(),
                ));
            }
            let axis = alpha
                .components()
                .iter()
                .position(|&c| c == 1)
                .expect("unit index");
            let o = diagnostics::poisson_oracle(*field.grid(), s)?;
            Some(OracleResult {
                comparison: diagnostics::compare_poisson(&o, axis, &result, None)?,
                tolerance: POISSON_RMS_TOL,
            })
        }
        None => None,
    };
    prepare_out(out)?;
    let output = out.join(&config.name);
    io::write_scalar(&result, &output)?;
    let passed = oracle
        .as_ref()
        .is_none_or(|o| o.comparison.relative_rms < o.tolerance);
    let report = PathBuf::from(format!("{}_report.json", output.display()));
    write_report(
        &report,
        &config,
        passed,
        RieszResults {
            output: path_string(&output),
            poisson_oracle: oracle,
        },
    )
}

#[derive(Serialize)]
struct Measured {
    value: f64,
    tolerance: f64,
    passed: bool,
}

impl Measured {
    fn below(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            passed: value < tolerance,
        }
    }
}

fn check(out: &Path, a: CheckArgs) -> Result<Outcome> {
    let grid = resolve_grid(&a.grid)?;
    let mut config = base_config(
        "check",
        out,
        a.name
            .clone()
            .unwrap_or_else(|| format!("check_{}", a.kind.name())),
    );
    config.check = Some(a.kind.name().into());
    config.grid = Some(grid);
    let report = out.join(format!("{}.json", config.name));
    match a.kind {
        CheckKind::Tightness => {
            let spec = frame_spec(&a, grid, &mut config)?;
            let map = frame::tightness_map(&spec)?;
            let dev = map.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let m = Measured::below(dev, TIGHTNESS_TOL);
            prepare_out(out)?;
            write_report(
                &report,
                &config,
                m.passed,
                serde_json::json!({ "max_deviation": m }),
            )
        }
        CheckKind::Reconstruction => {
            let spec = frame_spec(&a, grid, &mut config)?;
            config.seed = Some(a.seed);
            let f = synth::random_field(grid, a.seed);
            let channels = frame::analyze(&f, &spec)?;
            let back = frame::synthesize(&channels)?;
            let err = Measured::below(back.relative_l2_error(&f)?, RECONSTRUCTION_TOL);
            let energy = Measured::below(
                (channels.energy() / f.energy() - 1.0).abs(),
                RECONSTRUCTION_TOL,
            );
            let passed = err.passed && energy.passed;
            prepare_out(out)?;
            write_report(
                &report,
                &config,
                passed,
                serde_json::json!({
                    "channels": channels.len(),
                    "relative_l2_error": err,
                    "energy_ratio_defect": energy,
                }),
            )
        }
        CheckKind::Energy => {
            config.seed = Some(a.seed);
            let max_order = a.frame.order.max(1);
            config.riesz_order = Some(max_order);
            energy_check(&report, out, grid, a.seed, max_order, &config)
        }
        CheckKind::Moments => {
            let spec = frame_spec(&a, grid, &mut config)?;
            config.beta_max = Some(a.beta_max);
            moments_check(&report, out, &spec, a.beta_max, &config)
        }
        CheckKind::Decay => decay_check(&report, out, grid, &a, config),
    }
}

fn frame_spec(a: &CheckArgs, grid: GridSpec, config: &mut RunConfig) -> Result<FrameSpec> {
    let profile = resolve_profile(&a.profile)?;
    let spec = FrameSpec::new(grid, profile, a.frame.scales, a.frame.order)?;
    config.profile = Some(profile);
    config.scales = Some(spec.scales);
    config.riesz_order = Some(spec.riesz_order);
    Ok(spec)
}

fn energy_check(
    report: &Path,
    out: &Path,
    grid: GridSpec,
    seed: u64,
    max_order: usize,
    config: &RunConfig,
) -> Result<Outcome> {
    let f = synth::bandlimited_random_field(grid, seed);
    let total = f.energy();
    let mut orders = Vec::new();
    for n in 1..=max_order {
        let sum: f64 = riesz::riesz_channels(&f, n)?
            .iter()
            .map(|(_, c)| c.energy())
            .sum();
        orders.push(serde_json::json!({
            "order": n,
            "relative_defect": Measured::below((sum - total).abs() / total, ENERGY_TOL),
        }));
    }
    let components = (0..grid.dim())
        .map(|axis| riesz::riesz_component(&f, axis))
        .collect::<Result<Vec<_>>>()?;
    let inversion = Measured::below(
        riesz::riesz_invert(&components)?.relative_l2_error(&f)?,
        ENERGY_TOL,
    );
    let passed = inversion.passed
        && orders
            .iter()
            .all(|o| o["relative_defect"]["passed"].as_bool() == Some(true));
    prepare_out(out)?;
    write_report(
        report,
        config,
        passed,
        serde_json::json!({ "orders": orders, "inversion_relative_error": inversion }),
    )
}

fn moments_check(
    report: &Path,
    out: &Path,
    spec: &FrameSpec,
    beta_max: usize,
    config: &RunConfig,
) -> Result<Outcome> {
    let grid = spec.grid;
    let wavelet = spec.profile.wavelet();
    let spectrum = profiles::sample_radial(&wavelet, &grid);
    let field = spectral::inverse(&spectrum);
    let guard = grid.size() as f64 * grid.spacing() / 4.0;
    let table = diagnostics::moments_within(&field, beta_max, guard)?;
    let moment = Measured::below(table.max_relative(), MOMENT_TOL);

    let (lo, _) = wavelet.support();
    let radius = (0.5 * lo).min(0.999 * PI / 4.0);
    let flatness = diagnostics::spectrum_flatness_near_zero(&spectrum, radius)?;

    let mut dc = Vec::new();
    for scale in 0..spec.scales {
        for alpha in spec.alphas() {
            let id = ChannelId::Band { scale, alpha };
            let value = frame::channel_filter(spec, &id)?.values()[0].norm();
            dc.push(serde_json::json!({ "channel": id.file_stem("band"), "dc": value }));
        }
    }
    let dc_zero = dc.iter().all(|e| e["dc"].as_f64() == Some(0.0));
    let passed = moment.passed && dc_zero && flatness == 0.0;
    prepare_out(out)?;
    write_report(
        report,
        config,
        passed,
        serde_json::json!({
            "guard_radius": guard,
            "max_relative_moment": moment,
            "table": table,
            "spectrum_flatness": { "radius": radius, "max_abs": flatness },
            "band_dc": dc,
            "band_dc_all_zero": dc_zero,
        }),
    )
}

fn parse_compare_entry(entry: &str, eps: f64) -> Result<WaveletProfile> {
    let bad = || Error::Config(format!("unknown profile {entry:?} in --compare"));
    let mut parts = entry.trim().splitn(2, ':');
    match (parts.next(), parts.next()) {
        (Some("original"), None) => Ok(WaveletProfile::Original),
        (Some("modified"), None) => Ok(WaveletProfile::modified(WindowSpec::new(
            Smoothness::Finite(3),
            eps,
        )?)),
        (Some("modified"), Some(n)) => {
            let n = n.strip_prefix('n').unwrap_or(n);
            let s: Smoothness = n.parse().map_err(|_| bad())?;
            Ok(WaveletProfile::modified(WindowSpec::new(s, eps)?))
        }
        _ => Err(bad()),
    }
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn decay_check(
    report: &Path,
    out: &Path,
    grid: GridSpec,
    a: &CheckArgs,
    mut config: RunConfig,
) -> Result<Outcome> {
    if a.compare.len() < 2 {
        return Err(Error::Config(
            "--compare needs at least two profiles".into(),
        ));
    }
    let wavelets = a
        .compare
        .iter()
        .map(|e| parse_compare_entry(e, a.profile.eps))
        .collect::<Result<Vec<_>>>()?;
    let shell_width = a.shell_width.unwrap_or(grid.spacing());
    let (dlo, dhi) = diagnostics::default_fit_range(&grid);
    let range = (a.fit_min.unwrap_or(dlo), a.fit_max.unwrap_or(dhi));
    config.shell_width = Some(shell_width);
    config.fit_range = Some(range);
    config.compare = a.compare.iter().map(|s| s.trim().to_string()).collect();
    config.margin = Some(a.margin);
    config.riesz_within = a.riesz_within;

    let mut fields: Vec<(String, ScalarField)> = Vec::new();
    let mut claims = Vec::new();
    for (label, wavelet) in config.compare.iter().zip(&wavelets) {
        let f = spectral::inverse(&profiles::sample_radial(wavelet, &grid));
        if let (Some(tol), WaveletProfile::Modified(_)) = (a.riesz_within, wavelet) {
            let rlabel = format!("riesz1({label})");
            fields.push((rlabel.clone(), riesz::riesz_component(&f, 0)?));
            claims.push(Claim::Within {
                a: rlabel,
                b: label.clone(),
                tol,
            });
        }
        fields.push((label.clone(), f));
    }
    for (i, pair) in config.compare.windows(2).enumerate() {
        let margin = match (&wavelets[i], &wavelets[i + 1]) {
            (WaveletProfile::Original, WaveletProfile::Modified(_)) => a.margin,
            _ => 0.0,
        };
        claims.insert(
            i,
            Claim::Faster {
                faster: pair[1].clone(),
                slower: pair[0].clone(),
                margin,
            },
        );
    }

    prepare_out(out)?;
    let mut fits = Vec::new();
    let mut tables = Vec::new();
    for (label, f) in &fields {
        let fit = diagnostics::decay_fit(f, shell_width, range)?;
        let csv = out.join(format!("{}_{}.csv", config.name, sanitize(label)));
        diagnostics::write_decay_csv(&diagnostics::decay_table(f, shell_width, range)?, &csv)?;
        tables.push(path_string(&csv));
        fits.push(NamedFit {
            label: label.clone(),
            fit,
        });
    }
    let comparison = diagnostics::decay_comparison(&fits, &claims)?;
    let passed = comparison.passed();
    write_report(
        report,
        &config,
        passed,
        serde_json::json!({
            "fits": fits,
            "verdict": comparison.summary,
            "comparison": comparison,
            "tables": tables,
        }),
    )
}

fn analyze(out: &Path, a: AnalyzeArgs) -> Result<Outcome> {
    let field = io::read_scalar(&a.input)?;
    let profile = resolve_profile(&a.profile)?;
    let spec = FrameSpec::new(*field.grid(), profile, a.frame.scales, a.frame.order)?;
    let mut config = base_config("analyze", out, a.name.clone());
    config.grid = Some(spec.grid);
    config.profile = Some(profile);
    config.scales = Some(spec.scales);
    config.riesz_order = Some(spec.riesz_order);
    config.input = Some(path_string(&a.input));
    let channels = frame::analyze(&field, &spec)?;
    prepare_out(out)?;
    channels.write(out, &a.name)?;
    let defect = (channels.energy() / field.energy() - 1.0).abs();
    write_report(
        &out.join(format!("{}_analyze.json", a.name)),
        &config,
        true,
        serde_json::json!({ "channels": channels.len(), "energy_ratio_defect": defect }),
    )
}

fn synthesize(out: &Path, a: SynthesizeArgs) -> Result<Outcome> {
    let channels = FrameChannels::read(&a.dir, &a.tag)?;
    let name = a.name.unwrap_or_else(|| format!("{}_synthesis", a.tag));
    let mut config = base_config("synthesize", out, name);
    config.grid = Some(channels.spec.grid);
    config.profile = Some(channels.spec.profile);
    config.scales = Some(channels.spec.scales);
    config.riesz_order = Some(channels.spec.riesz_order);
    config.input = Some(path_string(&a.dir));
    let field = frame::synthesize(&channels)?;
    prepare_out(out)?;
    let output = out.join(&config.name);
    io::write_scalar(&field, &output)?;
    write_report(
        &PathBuf::from(format!("{}_report.json", output.display())),
        &config,
        true,
        serde_json::json!({ "output": path_string(&output) }),
    )
}
