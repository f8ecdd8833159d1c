//! Render-ready guidance: colored floor sectors and the remote-object overlay.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use crate::error::TargetError;
use crate::feature::wrap_angle;
use crate::geometry::{Point, RigidTransform};
use crate::math::floor;
use crate::optimizer::ScoredSample;
use crate::sampler::SampleGrid;
use crate::scene::{ObjectKind, ScenePair, SceneObject, TargetSet};

/// Positions closer than this are the same grid position.
pub const POSITION_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceConfig {
    /// Scores below this render red.
    pub threshold: f64,
    /// Hue (degrees) at the threshold.
    pub hue_low: f64,
    /// Hue at a perfect score.
    pub hue_high: f64,
    pub hue_invalid: f64,
}

impl GuidanceConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.8;

    pub fn with_threshold(threshold: f64) -> Option<Self> {
        (threshold > 0.0 && threshold < 1.0).then(|| GuidanceConfig {
            threshold,
            ..Self::default()
        })
    }
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        GuidanceConfig {
            threshold: Self::DEFAULT_THRESHOLD,
            hue_low: 60.0,
            hue_high: 120.0,
            hue_invalid: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const RED: Rgb = Rgb([255, 0, 0]);
    pub const YELLOW: Rgb = Rgb([255, 255, 0]);
    pub const GREEN: Rgb = Rgb([0, 255, 0]);
}

/// A 2D cone at a sampled placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub position: Point,
    pub direction: f64,
    pub central_angle: f64,
    pub score: f64,
    pub color: Rgb,
}

/// Hue in degrees, interpolated linearly from `hue_low` at the threshold to
/// `hue_high` at 1.0. Sub-threshold (and NaN) scores get `hue_invalid`.
pub fn score_to_hue(score: f64, cfg: &GuidanceConfig) -> f64 {
    // NaN lands here too
    if score.partial_cmp(&cfg.threshold).is_none_or(|o| o.is_lt()) {
        return cfg.hue_invalid;
    }
    let t = ((score - cfg.threshold) / (1.0 - cfg.threshold)).min(1.0);
    cfg.hue_low + t * (cfg.hue_high - cfg.hue_low)
}

pub fn score_to_color(score: f64, cfg: &GuidanceConfig) -> Rgb {
    hsv_to_rgb(score_to_hue(score, cfg), 1.0, 1.0)
}

/// HSV (hue in degrees, s and v in [0, 1]) to bytes, rounding half up.
fn hsv_to_rgb(hue: f64, s: f64, v: f64) -> Rgb {
    let h = (hue - 360.0 * floor(hue / 360.0)) / 60.0;
    let sector = floor(h);
    let frac = h - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * frac);
    let t = v * (1.0 - s * (1.0 - frac));
    let (r, g, b) = match sector as u8 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    let byte = |c: f64| floor(c * 255.0 + 0.5).clamp(0.0, 255.0) as u8;
    Rgb([byte(r), byte(g), byte(b)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnknownPosition(pub Point);

impl fmt::Display for UnknownPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no sampled position at ({}, {})", self.0.x, self.0.y)
    }
}

impl core::error::Error for UnknownPosition {}

/// Score at an arbitrary orientation of a sampled position, interpolated
/// linearly between the two angularly adjacent samples (across the ±π seam
/// when needed).
pub fn score_at(
    position: Point,
    orientation: f64,
    field: &[ScoredSample],
) -> Result<f64, UnknownPosition> {
    // (forward angular offset from `orientation`, score)
    let mut offsets: Vec<(f64, f64)> = field
        .iter()
        .filter(|s| s.local.position().distance(position) <= POSITION_TOLERANCE)
        .map(|s| {
            let d = s.local.theta() - orientation;
            let off = d - TAU * floor(d / TAU);
            (if off >= TAU { 0.0 } else { off }, s.score)
        })
        .collect();
    if offsets.is_empty() {
        return Err(UnknownPosition(position));
    }
    offsets.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (ahead, next) = offsets[0];
    if ahead == 0.0 || offsets.len() == 1 {
        return Ok(next);
    }
    let (last, prev) = offsets[offsets.len() - 1];
    let behind = TAU - last;
    Ok(prev + (next - prev) * behind / (behind + ahead))
}

pub fn sector_field(field: &[ScoredSample], cfg: &GuidanceConfig, grid: &SampleGrid) -> Vec<Sector> {
    field
        .iter()
        .map(|s| Sector {
            position: s.local.position(),
            direction: s.local.theta(),
            central_angle: grid.angle_step,
            score: s.score,
            color: score_to_color(s.score, cfg),
        })
        .collect()
}

/// Rigid transform carrying the remote primary target's frame onto the local
/// primary target's frame.
pub fn overlay_transform(local_primary: &SceneObject, remote_primary: &SceneObject) -> RigidTransform {
    let rotation = wrap_angle(local_primary.theta - remote_primary.theta);
    RigidTransform {
        rotation,
        translation: local_primary.center - remote_primary.center.rotated(rotation),
    }
}

/// The screen among the targets, or the first selected one.
pub fn primary_target(targets: &TargetSet) -> Option<(&SceneObject, &SceneObject)> {
    let idx = targets
        .local()
        .iter()
        .position(|o| o.kind == ObjectKind::Screen)
        .unwrap_or(0);
    Some((targets.local().get(idx)?, targets.remote().get(idx)?))
}

/// Every remote object expressed in local coordinates, anchored on the
/// primary target pair.
pub fn transparent_models<S: AsRef<str>>(
    pair: &ScenePair,
    targets: &[S],
) -> Result<Vec<SceneObject>, TargetError> {
    let targets = TargetSet::resolve(pair, targets)?;
    let (local, remote) = primary_target(&targets).ok_or(TargetError::Empty)?;
    let t = overlay_transform(local, remote);
    Ok(pair
        .remote
        .objects()
        .iter()
        .map(|o| SceneObject {
            center: t.apply(o.center),
            theta: t.apply_angle(o.theta),
            ..o.clone()
        })
        .collect())
}
