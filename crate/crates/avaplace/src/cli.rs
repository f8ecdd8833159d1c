//! Command-line front end.
//!
//! Exit status: 0 success, 1 I/O or runtime failure, 2 malformed input
//! (scene file, flags, placement), 3 unknown or unusable target,
//! 4 infeasible local placement, 5 no feasible remote placement.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use avaplace_core::{optimize_ocp, GuidanceConfig, OcpError, Placement, SamplerParams, ScenePair, TargetError, VisibilityMode};
use clap::{Args, Parser, Subcommand};

use crate::scene_file::load_scene;
use crate::settings::{compute_field, parse_angle, parse_visibility, FieldError, Settings};

#[derive(Debug, Parser)]
#[command(name = "avaplace", version, about = "Placement recommendations for two-room avatar telepresence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every candidate local placement and write the field and sectors.
    Field {
        #[command(flatten)]
        common: Common,
        /// Output file (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimal corresponding remote placement for one local placement.
    Ocp {
        #[command(flatten)]
        common: Common,
        /// Local placement as "x,y,theta" (meters, radians).
        #[arg(long, allow_hyphen_values = true, value_parser = parse_placement)]
        placement: Placement,
    },
    /// Serve the planner API on localhost.
    Serve {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scene-pair JSON file.
    #[arg(long)]
    pub scene: PathBuf,
    /// Comma-separated local target ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub targets: Vec<String>,
    #[command(flatten)]
    pub sampling: Sampling,
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Grid spacing in meters.
    #[arg(long, default_value_t = SamplerParams::DEFAULT_POSITION_STEP)]
    pub pos_step: f64,
    /// Orientation spacing in radians; `pi/4` style fractions are accepted.
    #[arg(long, default_value = "pi/4", value_parser = parse_angle)]
    pub ang_step: f64,
    /// Scores below this render red.
    #[arg(long, default_value_t = GuidanceConfig::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// `mutual` or `source`.
    #[arg(long, default_value = "mutual", value_parser = parse_visibility)]
    pub visibility: VisibilityMode,
}

impl Sampling {
    fn settings(&self) -> Result<Settings, Failure> {
        let guidance = GuidanceConfig::with_threshold(self.threshold)
            .ok_or_else(|| Failure::usage(format!("threshold must be in (0, 1), got {}", self.threshold)))?;
        let mut s = Settings {
            guidance,
            ..Settings::default()
        };
        s.sampler.position_step = self.pos_step;
        s.sampler.angle_step = self.ang_step;
        s.sampler.visibility = self.visibility;
        Ok(s)
    }
}

pub fn parse_placement(s: &str) -> Result<Placement, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x, y, t] = parts[..] else {
        return Err(format!("expected \"x,y,theta\", got '{s}'"));
    };
    let num = |v: &str| v.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("invalid number '{v}'"));
    Ok(Placement::new(num(x)?, num(y)?, parse_angle(t)?))
}

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure { code: 2, message }
    }
}

impl From<TargetError> for Failure {
    fn from(e: TargetError) -> Self {
        Failure { code: 3, message: e.to_string() }
    }
}

impl From<OcpError> for Failure {
    fn from(e: OcpError) -> Self {
        match e {
            OcpError::InfeasibleLocal => Failure { code: 4, message: e.to_string() },
            OcpError::InfeasibleRemote => Failure { code: 5, message: e.to_string() },
            OcpError::Target(t) => t.into(),
        }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Target(t) => t.into(),
            FieldError::Step(s) => Failure::usage(s.to_string()),
        }
    }
}

fn load(path: &std::path::Path) -> Result<ScenePair, Failure> {
    load_scene(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn run_field(common: &Common, out: &std::path::Path) -> Result<String, Failure> {
    let pair = load(&common.scene)?;
    let settings = common.sampling.settings()?;
    let output = compute_field(&pair, &common.targets, &settings, None)?;
    let text = serde_json::to_string(&output.report).expect("field reports always serialize");
    std::fs::write(out, text + "\n").map_err(|e| Failure { code: 1, message: format!("{}: {e}", out.display()) })?;
    let good = output.samples.iter().filter(|s| s.score >= settings.guidance.threshold).count();
    Ok(format!(
        "{} candidates, {good} at or above {}; wrote {}",
        output.samples.len(),
        settings.guidance.threshold,
        out.display()
    ))
}

fn run_ocp(common: &Common, placement: &Placement) -> Result<String, Failure> {
    let pair = load(&common.scene)?;
    let settings = common.sampling.settings()?;
    let r = optimize_ocp(placement, &pair, &common.targets, &settings.optimizer)?;
    let q = r.ocp.ok_or(OcpError::InfeasibleRemote)?;
    Ok(format!("ocp {:.6} {:.6} {:.6}\nscore {:.6}", q.x(), q.y(), q.theta(), r.score))
}

fn run_serve(scene: &std::path::Path, port: u16, sampling: &Sampling) -> Result<String, Failure> {
    let pair = load(scene)?;
    let settings = sampling.settings()?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure { code: 1, message: e.to_string() })?;
    rt.block_on(crate::service::serve(pair, settings, port))
        .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    Ok(String::new())
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> u8 {
    let result = match &cli.command {
        Command::Field { common, out } => run_field(common, out),
        Command::Ocp { common, placement } => run_ocp(common, placement),
        Command::Serve { scene, port, sampling } => run_serve(scene, *port, sampling),
    };
    match result {
        Ok(text) => {
            if !text.is_empty() {
                let _ = writeln!(out, "{text}");
            }
            0
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli, &mut std::io::stdout(), &mut std::io::stderr()))
}
