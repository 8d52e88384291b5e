//! `scd` — build SCD tiles, tilings and point sets, and analyze their
//! diffraction.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O or schema error.

mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use formats::{fmt, GridSpec};
use scd::angle::AngleSpec;
use scd::diffraction::{
    intensity_map, predicted_axis_spectrum, predicted_commensurate_lines,
    predicted_periodic_spectrum, predicted_support, shell_mass_profile, spectral_classification,
    AxisPeak, PeriodicSupportPoint, SpectralClassification,
};
use scd::geometry::{build_tile, mesh_to_obj, tile_volume, TileParams};
use scd::lattice::{aperiodicity_certificate, csl_index, CslIndex};
use scd::tiling::{extract_points, ShiftSequence, TilingConfig};
use scd::verify::{run_suite, SuiteReport, SUITES};

#[derive(Parser)]
#[command(
    name = "scd",
    about = "SCD tiles, tilings, point sets, and their diffraction spectra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the tile mesh and export it as OBJ.
    Tile(TileArgs),
    /// Generate the tiling point set inside a box and write it to a file.
    Generate(GenerateArgs),
    /// Evaluate the spectrum estimator on a k-grid and write CSV.
    Diffract(DiffractArgs),
    /// Write the analytic predictions (support, axis peaks, classification).
    Predict(PredictArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Coincidence site lattice indices and aperiodicity certificates.
    Csl(CslArgs),
}

#[derive(Args)]
struct TileArgs {
    /// Tile parameter JSON file.
    #[arg(long)]
    params: PathBuf,
    /// Output OBJ path.
    #[arg(long)]
    out: PathBuf,
    /// Also print the tile volume.
    #[arg(long)]
    volume: bool,
    /// Accepted for interface uniformity; this command is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Tiling configuration JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Box side length.
    #[arg(short, long)]
    r: f64,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// Output format.
    #[arg(long, default_value = "xyz", value_parser = ["xyz", "json"])]
    format: String,
    /// Override the random-shift seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DiffractArgs {
    /// Point cloud file (XYZ or JSON, as written by `generate`).
    #[arg(long)]
    cloud: PathBuf,
    /// Grid specification JSON file.
    #[arg(long)]
    grid: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Integrate a slice grid into annular shell masses instead of writing
    /// per-k samples; requires a `slice` grid.
    #[arg(long)]
    profile: bool,
    /// Annulus width for `--profile` (defaults to 4/r).
    #[arg(long)]
    annulus_width: Option<f64>,
    /// Accepted for interface uniformity; this command is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PredictArgs {
    /// Tiling configuration JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Output JSON path.
    #[arg(long)]
    out: PathBuf,
    /// Planar cutoff for support radii.
    #[arg(long, default_value_t = 2.0)]
    cutoff: f64,
    /// Highest axis peak order to report.
    #[arg(long, default_value_t = 5)]
    axis_n: i64,
    /// Require a fully periodic configuration and include its discrete
    /// support (error if the configuration is not periodic).
    #[arg(long)]
    periodic: bool,
    /// Accepted for interface uniformity; this command is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: String,
    /// Optional JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for interface uniformity; this command is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CslArgs {
    /// Rational cosine numerator p (with --q).
    #[arg(long)]
    p: Option<i64>,
    /// Rational cosine denominator q (with --p).
    #[arg(long)]
    q: Option<i64>,
    /// Rational-pi numerator (with --pi-den).
    #[arg(long)]
    pi_num: Option<i64>,
    /// Rational-pi denominator (with --pi-num).
    #[arg(long)]
    pi_den: Option<i64>,
    /// Generic angle in radians.
    #[arg(long)]
    phi: Option<f64>,
    /// Single rotation power: report the CSL index of `Gamma ∩ R^m Gamma`.
    #[arg(long)]
    m: Option<i64>,
    /// Chain depth: report the full aperiodicity certificate.
    #[arg(long)]
    chain: Option<i64>,
    /// Search radius for the certificate.
    #[arg(long, default_value_t = 100.0)]
    radius: f64,
    /// Optional JSON output path (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for interface uniformity; this command is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

/// Failures mapped to exit codes.
enum Failure {
    /// Exit code 1: the inputs were understood but are invalid.
    Validation(anyhow::Error),
    /// Exit code 2: I/O, parse, or schema problems.
    Schema(anyhow::Error),
}

trait Classify<T> {
    fn or_validation(self) -> Result<T, Failure>;
    fn or_schema(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn or_validation(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Validation(e.into()))
    }
    fn or_schema(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Schema(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tile(args) => cmd_tile(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Diffract(args) => cmd_diffract(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Csl(args) => cmd_csl(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Schema(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_tile(args: TileArgs) -> Result<(), Failure> {
    let params: TileParams = formats::read_json(&args.params, "tile parameters").or_schema()?;
    let mesh = build_tile(&params).or_validation()?;
    std::fs::write(&args.out, mesh_to_obj(&mesh))
        .map_err(|e| anyhow!("writing {}: {e}", args.out.display()))
        .or_schema()?;
    println!("wrote {} (8 vertices, 12 triangles)", args.out.display());
    if args.volume {
        println!("volume = {}", fmt(tile_volume(&mesh)));
    }
    Ok(())
}

fn apply_seed(config: &mut TilingConfig, seed: Option<u64>) {
    if let (Some(seed), ShiftSequence::Random { seed: s, .. }) = (seed, &mut config.shifts) {
        *s = seed;
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let mut config: TilingConfig =
        formats::read_json(&args.config, "tiling configuration").or_schema()?;
    apply_seed(&mut config, args.seed);
    config.validate().or_validation()?;
    let cloud = extract_points(&config, args.r).or_validation()?;
    if cloud.is_empty() {
        eprintln!("warning: no layer intersects the box at r = {}", args.r);
    }
    match args.format.as_str() {
        "xyz" => formats::write_cloud_xyz(&args.out, &cloud).or_schema()?,
        "json" => {
            formats::write_cloud_json(&args.out, &cloud, Some(&config), args.seed).or_schema()?
        }
        _ => unreachable!("clap enforces the value set"),
    }
    println!(
        "wrote {} points to {} (density {})",
        cloud.len(),
        args.out.display(),
        fmt(cloud.density())
    );
    Ok(())
}

fn cmd_diffract(args: DiffractArgs) -> Result<(), Failure> {
    let cloud = formats::read_cloud(&args.cloud).or_schema()?;
    let grid: GridSpec = formats::read_json(&args.grid, "grid specification").or_schema()?;
    if args.profile {
        let GridSpec::Slice { k3, extent, step } = grid else {
            return Err(Failure::Validation(anyhow!(
                "--profile requires a slice grid specification"
            )));
        };
        let width = args.annulus_width.unwrap_or(4.0 / cloud.r);
        let profile = shell_mass_profile(&cloud, k3, width, extent, step).or_validation()?;
        formats::write_profile_csv(&args.out, &profile).or_schema()?;
        println!(
            "wrote {} annuli to {} (total mass {})",
            profile.bins.len(),
            args.out.display(),
            fmt(profile.total_mass())
        );
        return Ok(());
    }
    let ks = grid.build();
    let samples = intensity_map(&cloud, &ks);
    formats::write_spectrum_csv(&args.out, &samples).or_schema()?;
    println!("wrote {} samples to {}", samples.len(), args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct PredictionReport {
    schema_version: u32,
    config: TilingConfig,
    cylinder_radii: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    commensurate_lines: Option<Vec<[f64; 2]>>,
    axis_peaks: Vec<AxisPeak>,
    classification: SpectralClassification,
    #[serde(skip_serializing_if = "Option::is_none")]
    periodic_support: Option<Vec<PeriodicSupportPoint>>,
}

fn cmd_predict(args: PredictArgs) -> Result<(), Failure> {
    let config: TilingConfig =
        formats::read_json(&args.config, "tiling configuration").or_schema()?;
    config.validate().or_validation()?;
    let periodic_support = if args.periodic {
        Some(predicted_periodic_spectrum(&config, args.cutoff, args.cutoff).or_validation()?)
    } else {
        None
    };
    let report = PredictionReport {
        schema_version: 1,
        config: config.clone(),
        cylinder_radii: predicted_support(&config.params, args.cutoff),
        commensurate_lines: predicted_commensurate_lines(&config.params, args.cutoff)
            .map(|pts| pts.into_iter().map(|p| [p.x, p.y]).collect()),
        axis_peaks: predicted_axis_spectrum(&config.params, args.axis_n),
        classification: spectral_classification(&config),
        periodic_support,
    };
    formats::write_json(&args.out, &report).or_schema()?;
    println!("wrote prediction report to {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput {
    schema_version: u32,
    reports: Vec<SuiteReport>,
    pass: bool,
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let names: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else {
        vec![args.suite.as_str()]
    };
    let mut reports = Vec::new();
    for name in names {
        let report = run_suite(name).ok_or_else(|| {
            Failure::Schema(anyhow!(
                "unknown suite '{name}'; valid suites: {} (or 'all')",
                SUITES.join(", ")
            ))
        })?;
        for m in &report.metrics {
            println!(
                "  [{}] {}: {} {} {}",
                if m.pass { "ok" } else { "FAIL" },
                m.name,
                fmt(m.value),
                m.relation,
                fmt(m.threshold)
            );
        }
        for n in &report.notes {
            println!("  note: {n}");
        }
        println!(
            "suite {}: {}",
            report.suite,
            if report.pass { "PASS" } else { "FAIL" }
        );
        reports.push(report);
    }
    let pass = reports.iter().all(|r| r.pass);
    if let Some(out) = &args.out {
        formats::write_json(
            out,
            &VerifyOutput {
                schema_version: 1,
                reports,
                pass,
            },
        )
        .or_schema()?;
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Validation(anyhow!("one or more suites failed")))
    }
}

#[derive(Serialize)]
struct CslOutput {
    schema_version: u32,
    angle: AngleSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<String>,
}

fn cmd_csl(args: CslArgs) -> Result<(), Failure> {
    let angle = match (args.p, args.q, args.pi_num, args.pi_den, args.phi) {
        (Some(p), Some(q), None, None, None) => AngleSpec::rational_cos(p, q).or_validation()?,
        (None, None, Some(n), Some(d), None) => AngleSpec::rational_pi(n, d).or_validation()?,
        (None, None, None, None, Some(phi)) => AngleSpec::generic(phi).or_validation()?,
        _ => {
            return Err(Failure::Validation(anyhow!(
                "specify exactly one of: --p/--q, --pi-num/--pi-den, or --phi"
            )))
        }
    };
    let text = match (args.m, args.chain) {
        (Some(m), None) => {
            let index = csl_index(&angle, m).or_validation()?;
            let out = CslOutput {
                schema_version: 1,
                angle,
                m: Some(m),
                index: Some(match index {
                    CslIndex::Finite(n) => n.to_string(),
                    CslIndex::Infinite => "infinite".to_string(),
                }),
            };
            serde_json::to_string_pretty(&out).or_schema()?
        }
        (None, Some(chain)) => {
            let cert = aperiodicity_certificate(&angle, chain, args.radius).or_validation()?;
            serde_json::to_string_pretty(&cert).or_schema()?
        }
        _ => {
            return Err(Failure::Validation(anyhow!(
                "specify exactly one of --m <power> or --chain <depth>"
            )))
        }
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| anyhow!("writing {}: {e}", path.display()))
                .or_schema()?;
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}
