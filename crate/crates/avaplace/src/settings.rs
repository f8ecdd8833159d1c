//! Sampling and rendering settings shared by the CLI and the service, and the
//! end-to-end field computation both of them run.

use std::f64::consts::PI;
use std::sync::atomic::AtomicUsize;

use avaplace_core::{
    grid_samples, sector_field, transparent_models, GuidanceConfig, OptimizerParams, SamplerParams, ScenePair,
    ScoredSample, StepError, TargetError, TargetSet, VisibilityMode,
};

use crate::field_io::{FieldExport, FieldReport, SectorField};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Settings {
    pub sampler: SamplerParams,
    pub guidance: GuidanceConfig,
    pub optimizer: OptimizerParams,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Parses an angle in radians, also accepting `pi`, `pi/N` and `K*pi/N`
/// (so steps like π/4 can be given exactly).
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| format!("invalid angle '{s}'"))?),
        None => (t.as_str(), 1.0),
    };
    let k = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some("-") => -1.0,
        Some(k) => k.trim_end_matches('*').trim().parse::<f64>().map_err(|_| format!("invalid angle '{s}'"))?,
        None => return Err(format!("invalid angle '{s}'")),
    };
    Ok(k * PI / den)
}

/// Field, sectors and overlay for one target selection.
pub struct FieldOutput {
    pub samples: Vec<ScoredSample>,
    pub report: FieldReport,
}

pub fn compute_field<S: AsRef<str>>(
    pair: &ScenePair,
    targets: &[S],
    settings: &Settings,
    progress: Option<&AtomicUsize>,
) -> Result<FieldOutput, FieldError> {
    let resolved = TargetSet::resolve(pair, targets)?;
    let sp = settings.sampler;
    let grid = grid_samples(&pair.local, sp.position_step, sp.angle_step)?;
    let samples = parallel::recommendation_field(pair, &resolved, &grid, sp.visibility, &settings.optimizer, progress);
    let sectors = sector_field(&samples, &settings.guidance, &grid);
    let overlay = transparent_models(pair, targets)?;
    let ids: Vec<&str> = resolved.ids().collect();
    let report = FieldReport {
        field: FieldExport::new(&samples, sp.position_step, sp.angle_step, &ids),
        guidance: SectorField::new(&sectors, &overlay, settings.guidance.threshold, sp.angle_step, &ids),
    };
    Ok(FieldOutput { samples, report })
}

/// Number of local candidates a field will score.
pub fn candidate_count<S: AsRef<str>>(pair: &ScenePair, targets: &[S], settings: &Settings) -> Result<usize, FieldError> {
    let resolved = TargetSet::resolve(pair, targets)?;
    let sp = settings.sampler;
    let grid = grid_samples(&pair.local, sp.position_step, sp.angle_step)?;
    Ok(avaplace_core::candidate_set(&pair.local, resolved.local(), &grid, &pair.body, sp.visibility).len())
}

pub fn parse_visibility(s: &str) -> Result<VisibilityMode, String> {
    match s {
        "mutual" => Ok(VisibilityMode::Mutual),
        "source" => Ok(VisibilityMode::SourceOnly),
        _ => Err(format!("invalid visibility '{s}' (expected 'mutual' or 'source')")),
    }
}
