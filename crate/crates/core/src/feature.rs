//! Four-angle interaction features and their Gaussian-kernel similarity.
//!
//! For a source placement `s` and a target object `t` the feature is
//!
//! ```text
//! [ atan2(t_R - s) - θ_s,  atan2(t_L - s) - θ_s,  atan2(s_R - t) - θ_t,  atan2(s_L - t) - θ_t ]
//! ```
//!
//! where `_R`/`_L` are the right/left endpoints of the respective widths. Using
//! the targets' endpoints rather than only their centers lets the feature
//! capture distance and apparent size as well as direction.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

use crate::geometry::Point;
use crate::math::{atan2, cos, exp, floor, sin};
use crate::scene::{endpoints, BodyParams, Placement, SceneObject};

/// Multiplier on the squared feature distance inside the kernel exponent.
pub const KERNEL_FACTOR: f64 = -2.0;

/// Source and target closer than this are treated as coincident.
pub const DEGENERATE_DISTANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureError {
    DegeneratePlacement { target: String },
    EmptyTargets,
    ShapeMismatch { left: usize, right: usize },
}

impl fmt::Display for FeatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureError::DegeneratePlacement { target } => {
                write!(f, "source coincides with the center of target '{target}'")
            }
            FeatureError::EmptyTargets => f.write_str("no targets to build a feature from"),
            FeatureError::ShapeMismatch { left, right } => {
                write!(f, "feature vectors cover {left} and {right} targets")
            }
        }
    }
}

impl core::error::Error for FeatureError {}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut r = a - TAU * floor(a / TAU);
    // floor rounding can leave r a hair outside [0, 2π)
    if r >= TAU {
        r -= TAU;
    } else if r < 0.0 {
        r += TAU;
    }
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `[φ_s→t^R, φ_s→t^L, φ_t→s^R, φ_t→s^L]`, each in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionFeature {
    pub phi: [f64; 4],
}

/// Per-target features concatenated in selection order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub features: Vec<InteractionFeature>,
    pub target_ids: Vec<String>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// All `4n` angles, flattened.
    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.features.iter().flat_map(|f| f.phi)
    }
}

/// Intermediate quantities shared by the feature and its derivative.
struct Rays {
    /// Vectors source→target-right, source→target-left.
    to_target: [Point; 2],
    /// Vectors target→source-right, target→source-left.
    to_source: [Point; 2],
}

fn rays(source: &Placement, source_width: f64, target: &SceneObject) -> Result<Rays, FeatureError> {
    let s = source.position();
    if s.distance(target.center) < DEGENERATE_DISTANCE {
        return Err(FeatureError::DegeneratePlacement {
            target: target.id.clone(),
        });
    }
    let (t_r, t_l) = target.endpoints();
    let (s_r, s_l) = endpoints(s, source.theta(), source_width);
    Ok(Rays {
        to_target: [t_r - s, t_l - s],
        to_source: [s_r - target.center, s_l - target.center],
    })
}

pub fn interaction_feature(
    source: &Placement,
    source_width: f64,
    target: &SceneObject,
) -> Result<InteractionFeature, FeatureError> {
    let r = rays(source, source_width, target)?;
    Ok(InteractionFeature {
        phi: angles_of(&r, source.theta(), target.theta),
    })
}

fn angles_of(r: &Rays, source_theta: f64, target_theta: f64) -> [f64; 4] {
    let ang = |v: Point, base: f64| wrap_angle(atan2(v.y, v.x) - base);
    [
        ang(r.to_target[0], source_theta),
        ang(r.to_target[1], source_theta),
        ang(r.to_source[0], target_theta),
        ang(r.to_source[1], target_theta),
    ]
}

pub fn feature_vector(
    source: &Placement,
    targets: &[SceneObject],
    body: &BodyParams,
) -> Result<FeatureVector, FeatureError> {
    if targets.is_empty() {
        return Err(FeatureError::EmptyTargets);
    }
    let features = targets
        .iter()
        .map(|t| interaction_feature(source, body.shoulder_width, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FeatureVector {
        features,
        target_ids: targets.iter().map(|t| t.id.clone()).collect(),
    })
}

/// Flat angle buffer used on hot paths; avoids cloning target ids.
pub(crate) fn feature_angles(
    source: &Placement,
    targets: &[SceneObject],
    body: &BodyParams,
    out: &mut Vec<[f64; 4]>,
) -> Result<(), FeatureError> {
    out.clear();
    for t in targets {
        out.push(interaction_feature(source, body.shoulder_width, t)?.phi);
    }
    Ok(())
}

pub(crate) fn squared_distance(a: &[[f64; 4]], b: &[[f64; 4]]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(fa, fb)| fa.iter().zip(fb))
        .map(|(x, y)| {
            let d = wrap_angle(x - y);
            d * d
        })
        .sum()
}

pub(crate) fn kernel(sq_dist: f64) -> f64 {
    exp(KERNEL_FACTOR * sq_dist)
}

/// Gaussian-kernel similarity `exp(-2 Σ wrap(a_k - b_k)²)` over all angles.
pub fn similarity(a: &FeatureVector, b: &FeatureVector) -> Result<f64, FeatureError> {
    if a.len() != b.len() {
        return Err(FeatureError::ShapeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sq: f64 = a
        .angles()
        .zip(b.angles())
        .map(|(x, y)| {
            let d = wrap_angle(x - y);
            d * d
        })
        .sum();
    Ok(kernel(sq))
}

/// Partial derivatives `[∂/∂x, ∂/∂y, ∂/∂θ]` of each of the four angles with
/// respect to the source placement.
fn feature_jacobian(source: &Placement, source_width: f64, r: &Rays) -> [[f64; 3]; 4] {
    let h = source_width / 2.0;
    let (st, ct) = (sin(source.theta()), cos(source.theta()));
    let mut jac = [[0.0; 3]; 4];
    for (row, v) in jac.iter_mut().zip(r.to_target) {
        let r2 = v.dot(v);
        *row = [v.y / r2, -v.x / r2, -1.0];
    }
    // d(endpoint)/dθ for right and left source endpoints
    let dend = [Point::new(h * ct, h * st), Point::new(-h * ct, -h * st)];
    for ((row, v), de) in jac[2..].iter_mut().zip(r.to_source).zip(dend) {
        let r2 = v.dot(v);
        let (du, dv) = (-v.y / r2, v.x / r2);
        *row = [du, dv, du * de.x + dv * de.y];
    }
    jac
}

/// Gradient of the similarity between fixed `local` features and the
/// features of `remote_source` toward `remote_targets`, taken with respect to
/// the remote placement `(x', y', θ')`.
pub fn similarity_gradient(
    local: &FeatureVector,
    remote_source: &Placement,
    remote_targets: &[SceneObject],
    body: &BodyParams,
) -> Result<[f64; 3], FeatureError> {
    if local.len() != remote_targets.len() {
        return Err(FeatureError::ShapeMismatch {
            left: local.len(),
            right: remote_targets.len(),
        });
    }
    let locals: Vec<[f64; 4]> = local.features.iter().map(|f| f.phi).collect();
    similarity_gradient_raw(&locals, remote_source, remote_targets, body).map(|(_, g)| g)
}

/// Returns `(S, ∇S)`.
pub(crate) fn similarity_gradient_raw(
    local: &[[f64; 4]],
    remote_source: &Placement,
    remote_targets: &[SceneObject],
    body: &BodyParams,
) -> Result<(f64, [f64; 3]), FeatureError> {
    let w = body.shoulder_width;
    let mut sq = 0.0;
    // Σ_k d_k ∂φ'_k/∂q'
    let mut acc = [0.0; 3];
    for (loc, target) in local.iter().zip(remote_targets) {
        let r = rays(remote_source, w, target)?;
        let phi = angles_of(&r, remote_source.theta(), target.theta);
        let jac = feature_jacobian(remote_source, w, &r);
        for k in 0..4 {
            let d = wrap_angle(loc[k] - phi[k]);
            sq += d * d;
            for (a, j) in acc.iter_mut().zip(jac[k]) {
                *a += d * j;
            }
        }
    }
    let s = kernel(sq);
    // ∂S/∂q' = S · (-2) · Σ 2 d_k · (-∂φ'_k/∂q')
    let scale = -2.0 * KERNEL_FACTOR * s;
    Ok((s, acc.map(|a| scale * a)))
}
