//! Command-line frontend: every toolkit operation plus the suite runner.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 failed check in
//! `check`/`suite`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fracdeg::degree::{winding_degree, CircleTrace};
use fracdeg::geom::QuadratureSpec;
use fracdeg::jacobian::{curl_pairing, default_family, jac_pairing, sign_classify};
use fracdeg::maps::{rotate_distort, GalleryMap, TestFunction};
use fracdeg::sobolev::{gagliardo_seminorm, FractionalParams};
use fracdeg::verify::{
    calibrate, reports_to_csv, reports_to_json, run_suite, suite_passed, SuiteConfig,
};
use fracdeg::{Map, PlaneDomain, Point};

#[derive(Parser)]
#[command(
    name = "fracdeg",
    version,
    about = "Fractional seminorms, Jacobian pairings, and planar degree checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gagliardo seminorm of a gallery map over a domain
    Seminorm(SeminormArgs),
    /// Sample a circle trace of a map and export it as CSV
    Trace(TraceArgs),
    /// Winding degree of a circle trace around a probe point
    Degree(DegreeArgs),
    /// Distributional Jacobian pairing against a smooth bump
    Jacobian(JacobianArgs),
    /// Curl pairing against a smooth bump
    Curl(CurlArgs),
    /// Sign classification over the default bump family
    Classify(ClassifyArgs),
    /// Run a single named check; exits 2 when it fails
    Check(CheckArgs),
    /// Run the verification suite; exits 2 when any check fails
    Suite(SuiteArgs),
    /// Fit the comparability constants over the smooth gallery
    Calibrate(CalibrateArgs),
    /// Gallery inspection
    Gallery(GalleryArgs),
}

fn parse_point(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `x,y`, got `{text}`"));
    }
    let x = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let y = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((x, y))
}

/// Gallery selector shared by the map-consuming subcommands. A `--delta` on
/// a base map other than `rotation` applies the rotation-distortion wrapper.
#[derive(Args, Clone)]
struct MapArgs {
    /// Gallery name: identity, power, conj-power, conjugation, constant,
    /// loglog, gradient-quartic, rotation
    #[arg(long)]
    map: String,
    /// Exponent for power / conj-power
    #[arg(long)]
    k: Option<i32>,
    /// Rotation coefficient, or distortion strength on any other base map
    #[arg(long)]
    delta: Option<f64>,
    /// Value of the constant map
    #[arg(long, value_parser = parse_point)]
    value: Option<(f64, f64)>,
}

impl MapArgs {
    fn build(&self) -> Result<Map> {
        if self.map == "rotation" {
            let spec = GalleryMap::parse(&self.map, self.k, self.delta, self.value)?;
            return Ok(spec.build()?);
        }
        let spec = GalleryMap::parse(&self.map, self.k, None, self.value)?;
        let base: Map = spec.build()?;
        Ok(match self.delta {
            Some(delta) => rotate_distort(&base, delta),
            None => base,
        })
    }
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Domain kind: ball, annulus, rect
    #[arg(long, default_value = "ball")]
    domain: String,
    /// Center of a ball/annulus
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    center: (f64, f64),
    /// Outer radius of a ball/annulus
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Inner radius of an annulus
    #[arg(long, default_value_t = 0.0)]
    r_inner: f64,
    /// Lower corner of a rectangle
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    rect_lo: (f64, f64),
    /// Upper corner of a rectangle
    #[arg(long, value_parser = parse_point, default_value = "1,1")]
    rect_hi: (f64, f64),
}

impl DomainArgs {
    fn build(&self) -> Result<PlaneDomain> {
        let center = Point::new(self.center.0, self.center.1);
        Ok(match self.domain.as_str() {
            "ball" => PlaneDomain::ball(center, self.r)?,
            "annulus" => PlaneDomain::annulus(center, self.r_inner, self.r)?,
            "rect" | "rectangle" => PlaneDomain::rectangle(
                Point::new(self.rect_lo.0, self.rect_lo.1),
                Point::new(self.rect_hi.0, self.rect_hi.1),
            )?,
            other => bail!("unknown domain kind `{other}`"),
        })
    }
}

#[derive(Args)]
struct SeminormArgs {
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    domain: DomainArgs,
    /// Smoothness parameter in (0, 1)
    #[arg(long, default_value_t = 0.75)]
    s: f64,
    /// Integrability exponent; defaults to the critical 2/s
    #[arg(long)]
    p: Option<f64>,
    /// Tensor grid resolution per axis
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Use Monte Carlo pairs instead of the tensor grid
    #[arg(long)]
    mc: bool,
    /// Monte Carlo pair count
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    center: (f64, f64),
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Circle samples (at least 32)
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DegreeArgs {
    #[command(flatten)]
    map: MapArgs,
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    center: (f64, f64),
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Probe point
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    p: (f64, f64),
    #[arg(long, default_value_t = 512)]
    samples: usize,
}

#[derive(Args)]
struct JacobianArgs {
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    phi_center: (f64, f64),
    #[arg(long, default_value_t = 0.25)]
    phi_radius: f64,
    /// Mollification scales, decreasing
    #[arg(long, value_delimiter = ',', default_value = "0.08,0.04,0.02")]
    eps: Vec<f64>,
    /// Pairing quadrature nodes per axis over the bump support
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurlArgs {
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, value_parser = parse_point, default_value = "0,0")]
    phi_center: (f64, f64),
    #[arg(long, default_value_t = 0.25)]
    phi_radius: f64,
    #[arg(long, default_value_t = 32)]
    grid: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.08,0.04,0.02")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    grid: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// Check id or statement selector (e.g. degree-oracle, prop-1.7,
    /// lemma-a.1)
    id: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the summary CSV here
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Canonical output: zero the runtimes for byte-identical reruns
    #[arg(long)]
    strip_timings: bool,
    /// Only run checks matching these prefixes/selectors
    #[arg(long)]
    only: Vec<String>,
    /// Load fitted constants from a calibration file
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Override a fitted constant, `name=value`
    #[arg(long)]
    set: Vec<String>,
    /// Working resolution of the pairwise quadrature
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GalleryArgs {
    #[command(subcommand)]
    action: GalleryAction,
}

#[derive(Subcommand)]
enum GalleryAction {
    /// List the gallery map names
    List,
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
    Ok(())
}

fn suite_config(seed: u64, resolution: usize) -> SuiteConfig {
    let mut config = SuiteConfig {
        seed,
        ..SuiteConfig::default()
    };
    if resolution != *config.resolutions.last().unwrap() {
        config.resolutions = vec![resolution / 4, resolution / 2, resolution]
            .into_iter()
            .filter(|&n| n >= 16)
            .collect();
        if config.resolutions.len() < 2 {
            config.resolutions = vec![resolution.max(17) - 1, resolution.max(17)];
        }
    }
    config
}

fn print_report_lines(reports: &[fracdeg::verify::VerificationReport]) {
    for r in reports {
        let status = if !r.hypothesis_met {
            "GATED"
        } else if r.pass {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "{:<45} [{}] anchor: {} ({} ms)",
            r.check_id, status, r.paper_anchor, r.runtime_ms
        );
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Seminorm(args) => {
            let f = args.map.build()?;
            let domain = args.domain.build()?;
            let params = match args.p {
                Some(p) => FractionalParams::new(args.s, p)?,
                None => FractionalParams::critical(args.s)?,
            };
            let quad = if args.mc {
                let delta = domain.diameter() * 0.01;
                QuadratureSpec::monte_carlo(args.samples, args.seed, delta)?
            } else {
                QuadratureSpec::tensor_for(&domain, args.grid)?
            };
            let est = gagliardo_seminorm(&f, &domain, &params, &quad)?;
            let record = est.to_record(f.label(), &params);
            write_output(&args.out, &serde_json::to_string_pretty(&record)?)?;
            Ok(0)
        }
        Command::Trace(args) => {
            let f = args.map.build()?;
            let trace = CircleTrace::sample(
                &f,
                Point::new(args.center.0, args.center.1),
                args.r,
                args.samples,
            )?;
            write_output(&args.out, &trace.to_csv())?;
            Ok(0)
        }
        Command::Degree(args) => {
            let f = args.map.build()?;
            let trace = CircleTrace::sample(
                &f,
                Point::new(args.center.0, args.center.1),
                args.r,
                args.samples,
            )?;
            let d = winding_degree(&trace, Point::new(args.p.0, args.p.1))?;
            println!(
                "degree {} (trusted: {}, min_distance: {:.6}, angle_residual: {:.2e})",
                d.degree, d.trusted, d.min_distance, d.angle_residual
            );
            Ok(0)
        }
        Command::Jacobian(args) => {
            let f = args.map.build()?;
            let domain = args.domain.build()?;
            let phi = TestFunction::standard(
                Point::new(args.phi_center.0, args.phi_center.1),
                args.phi_radius,
            )?;
            let quad = QuadratureSpec::tensor_for(&domain, args.grid.max(16))?;
            let res = jac_pairing(&f, &phi, &domain, &args.eps, &quad)?;
            let trend: Vec<serde_json::Value> = res
                .epsilon_trend
                .iter()
                .map(|&(e, v)| serde_json::json!({ "eps": e, "pairing": v }))
                .collect();
            let payload = serde_json::json!({
                "map": f.label(),
                "pairing": res.value,
                "converged": res.converged,
                "trend": trend,
                "bump_integral": phi.integral(),
            });
            write_output(&args.out, &serde_json::to_string_pretty(&payload)?)?;
            Ok(0)
        }
        Command::Curl(args) => {
            let f = args.map.build()?;
            let domain = args.domain.build()?;
            let phi = TestFunction::standard(
                Point::new(args.phi_center.0, args.phi_center.1),
                args.phi_radius,
            )?;
            let quad = QuadratureSpec::tensor_for(&domain, args.grid.max(16))?;
            let value = curl_pairing(&f, &phi, &domain, &quad)?;
            println!("curl pairing {value:.8e}");
            Ok(0)
        }
        Command::Classify(args) => {
            let f = args.map.build()?;
            let domain = args.domain.build()?;
            let family = default_family(&domain)?;
            let quad = QuadratureSpec::tensor_for(&domain, args.grid.max(16))?;
            let c = sign_classify(&f, &domain, &family, &args.eps, &quad)?;
            println!(
                "verdict {} (min pairing {:.6e} at bump centered ({}, {}))",
                c.verdict.name(),
                c.min_pairing,
                c.witness.center.x,
                c.witness.center.y
            );
            Ok(0)
        }
        Command::Check(args) => {
            let mut config = suite_config(args.seed, 64);
            config.check_filter = Some(vec![args.id.clone()]);
            let reports = run_suite(&config)?;
            if reports.is_empty() {
                bail!("no check matches `{}`", args.id);
            }
            print_report_lines(&reports);
            if let Some(out) = &args.out {
                write_output(&Some(out.clone()), &reports_to_json(&reports, false))?;
            }
            Ok(if suite_passed(&reports) { 0 } else { 2 })
        }
        Command::Suite(args) => {
            let mut config = suite_config(args.seed, args.resolution);
            if !args.only.is_empty() {
                config.check_filter = Some(args.only.clone());
            }
            if let Some(path) = &args.constants {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                config.constants = Some(fracdeg::calibration::CalibrationConstants::from_json(
                    &text,
                )?);
            }
            let mut overrides = BTreeMap::new();
            for entry in &args.set {
                let (name, value) = entry
                    .split_once('=')
                    .ok_or_else(|| anyhow!("expected name=value, got `{entry}`"))?;
                overrides.insert(name.to_string(), value.parse::<f64>()?);
            }
            config.tolerance_overrides = overrides;

            let reports = run_suite(&config)?;
            print_report_lines(&reports);
            if let Some(out) = &args.out {
                write_output(
                    &Some(out.clone()),
                    &reports_to_json(&reports, args.strip_timings),
                )?;
            }
            if let Some(csv) = &args.csv {
                write_output(&Some(csv.clone()), &reports_to_csv(&reports))?;
            }
            Ok(if suite_passed(&reports) { 0 } else { 2 })
        }
        Command::Calibrate(args) => {
            let config = suite_config(args.seed, args.resolution);
            let constants = calibrate(&config)?;
            write_output(&args.out, &constants.to_json())?;
            Ok(0)
        }
        Command::Gallery(args) => match args.action {
            GalleryAction::List => {
                for name in GalleryMap::names() {
                    println!("{name}");
                }
                Ok(0)
            }
        },
    }
}

fn main() {
    if let Ok(workers) = std::env::var("FRACDEG_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    let _ = e.print();
                    1
                }
            };
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
