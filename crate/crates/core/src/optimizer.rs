//! Optimal corresponding placement (OCP) search.
//!
//! For a local placement `q` the OCP is the feasible remote placement `q'`
//! maximizing the feature similarity. The search is a conditional steepest
//! descent: while the avatar footprint collides with an object it follows the
//! negative gradient of a Gaussian collision cost around that object, while it
//! pokes out of the floor it follows the negative gradient of an exponential
//! out-of-space cost, and otherwise it ascends the similarity.
//!
//! The descent starts from the best few well-separated remote grid samples
//! and remembers the best feasible iterate. The similarity branch backtracks
//! when a full step does not improve the score, and every step into
//! infeasibility halves the trust scale so the iterates settle against
//! obstacle boundaries. A final compass search over feasible placements
//! slides the result along the boundary where the gradient steps stall.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::FRAC_PI_4;

use crate::error::OcpError;
use crate::feature::{
    feature_angles, feature_vector, kernel, similarity, similarity_gradient_raw,
    squared_distance, wrap_angle, FeatureError, FeatureVector,
};
use crate::geometry::{OrientedBox, Point};
use crate::math::{abs, exp, signum};
use crate::sampler::{candidate_set, grid_samples, is_feasible, SampleGrid, VisibilityMode};
use crate::scene::{footprint, in_room, BodyParams, Placement, RoomScene, ScenePair, SceneObject, TargetSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerParams {
    /// Step sizes `[γ_x, γ_y, γ_θ]`.
    pub step: [f64; 3],
    pub max_iters: usize,
    pub multistart_k: usize,
    /// Minimum best-score gain over `convergence_window` similarity steps.
    pub convergence_eps: f64,
    pub convergence_window: usize,
    /// Remote grid the starting placements are drawn from.
    pub start_position_step: f64,
    pub start_angle_step: f64,
}

impl OptimizerParams {
    pub const DEFAULT_STEP: [f64; 3] = [0.1, 0.1, 1.0];
    pub const DEFAULT_MAX_ITERS: usize = 180;
}

impl Default for OptimizerParams {
    fn default() -> Self {
        OptimizerParams {
            step: Self::DEFAULT_STEP,
            max_iters: Self::DEFAULT_MAX_ITERS,
            multistart_k: 8,
            convergence_eps: 1e-5,
            convergence_window: 5,
            start_position_step: 0.33,
            start_angle_step: FRAC_PI_4,
        }
    }
}

/// A local placement with its OCP and recommendation score.
///
/// `ocp` is `None` (and `score` 0) when no feasible remote placement exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSample {
    pub local: Placement,
    pub ocp: Option<Placement>,
    pub score: f64,
}

/// Gaussian bump `exp(-½ dᵀ Σ⁻¹ d)` with `Σ` aligned to the object's box:
/// standard deviation `width/2` along its right axis and `depth/2` along its
/// frontal axis.
pub fn collision_cost(p: Point, obj: &SceneObject) -> f64 {
    let (m, _) = mahalanobis(p, obj);
    exp(-0.5 * m)
}

/// `∇_p` of [`collision_cost`].
pub fn collision_cost_gradient(p: Point, obj: &SceneObject) -> [f64; 2] {
    let (m, g) = mahalanobis(p, obj);
    let c = exp(-0.5 * m);
    [-0.5 * c * g.x, -0.5 * c * g.y]
}

/// Squared Mahalanobis distance and its gradient.
fn mahalanobis(p: Point, obj: &SceneObject) -> (f64, Point) {
    let d = p - obj.center;
    let (f, r) = (Point::frontal(obj.theta), Point::right(obj.theta));
    let var_r = (obj.width / 2.0) * (obj.width / 2.0);
    let var_f = (obj.depth / 2.0) * (obj.depth / 2.0);
    let (a_r, a_f) = (d.dot(r), d.dot(f));
    let m = a_r * a_r / var_r + a_f * a_f / var_f;
    let grad = (2.0 * a_r / var_r) * r + (2.0 * a_f / var_f) * f;
    (m, grad)
}

/// Exponential cliff along the four walls of the floor rectangle.
pub fn out_of_space_cost(p: Point, room: &RoomScene) -> f64 {
    let (ex, ey) = cliff_terms(p, room);
    3.0 * (ex + ey)
}

/// `∇_p` of [`out_of_space_cost`]; zero along an axis exactly at the center line.
pub fn out_of_space_cost_gradient(p: Point, room: &RoomScene) -> [f64; 2] {
    let (ex, ey) = cliff_terms(p, room);
    [
        3.0 * (2.0 / room.width) * signum(p.x - room.center.x) * ex,
        3.0 * (2.0 / room.length) * signum(p.y - room.center.y) * ey,
    ]
}

fn cliff_terms(p: Point, room: &RoomScene) -> (f64, f64) {
    let (w, l) = (room.width, room.length);
    (
        exp((2.0 / w) * (abs(p.x - room.center.x) - w / 2.0)),
        exp((2.0 / l) * (abs(p.y - room.center.y) - l / 2.0)),
    )
}

/// Which case of the conditional gradient applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientBranch {
    /// Index into the room's objects of the deepest-penetrated colliding object.
    Collision(usize),
    OutOfSpace,
    Similarity,
}

/// The deepest-penetrated object the footprint collides with; ties go to the
/// smaller id.
fn deepest_collision(fp: &OrientedBox, room: &RoomScene) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, o) in room.objects().iter().enumerate() {
        let depth = fp.penetration_depth(&o.bounding_box());
        if depth < 0.0 {
            continue;
        }
        best = match best {
            Some((j, bd))
                if bd > depth || (bd == depth && room.objects()[j].id <= o.id) =>
            {
                Some((j, bd))
            }
            _ => Some((i, depth)),
        };
    }
    best.map(|(i, _)| i)
}

fn classify(q: &Placement, room: &RoomScene, body: &BodyParams) -> GradientBranch {
    let fp = footprint(q, body);
    if let Some(i) = deepest_collision(&fp, room) {
        GradientBranch::Collision(i)
    } else if fp.corners().iter().any(|&c| !in_room(c, room)) {
        GradientBranch::OutOfSpace
    } else {
        GradientBranch::Similarity
    }
}

/// Push-out direction for a colliding object: `-∇C_col`, or the object's
/// shorter axis when the query sits exactly on its center.
fn collision_push(p: Point, obj: &SceneObject) -> [f64; 2] {
    let g = collision_cost_gradient(p, obj);
    if g[0] != 0.0 || g[1] != 0.0 {
        return [-g[0], -g[1]];
    }
    let (axis, half) = if obj.depth <= obj.width {
        (Point::frontal(obj.theta), obj.depth / 2.0)
    } else {
        (Point::right(obj.theta), obj.width / 2.0)
    };
    let push = (collision_cost(p, obj) / half) * axis;
    [push.x, push.y]
}

/// The conditional ascent direction at `q'`: `-∇C_col`, `-∇C_out` (both with
/// a zero θ component) or `∇S`, depending on the footprint's state.
pub fn conditional_gradient(
    q: &Placement,
    local: &FeatureVector,
    remote: &RoomScene,
    remote_targets: &[SceneObject],
    body: &BodyParams,
) -> Result<(GradientBranch, [f64; 3]), FeatureError> {
    let branch = classify(q, remote, body);
    let dir = match branch {
        GradientBranch::Collision(i) => {
            let [gx, gy] = collision_push(q.position(), &remote.objects()[i]);
            [gx, gy, 0.0]
        }
        GradientBranch::OutOfSpace => {
            let [gx, gy] = out_of_space_cost_gradient(q.position(), remote);
            [-gx, -gy, 0.0]
        }
        GradientBranch::Similarity => {
            crate::feature::similarity_gradient(local, q, remote_targets, body)?
        }
    };
    Ok((branch, dir))
}

/// Prepared OCP search for one scene pair and target selection. Remote grid
/// features are computed once and shared by every local query.
#[derive(Debug, Clone)]
pub struct OcpSolver<'a> {
    pair: &'a ScenePair,
    targets: TargetSet,
    params: OptimizerParams,
    starts: Vec<Placement>,
    /// `starts.len() * targets.len()` features, row per start.
    start_features: Vec<[f64; 4]>,
}

const MAX_BACKTRACKS: usize = 24;
const START_SEPARATION: f64 = 0.5;
const POLISH_INITIAL_STEP: f64 = 0.04;
const POLISH_MIN_STEP: f64 = 1e-4;
/// Axis moves plus rotations combined with a translation, which lets a
/// footprint jammed into a corner turn.
const POLISH_MOVES: [(f64, f64, f64); 14] = [
    (1.0, 0.0, 0.0),
    (-1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, -1.0, 0.0),
    (0.0, 0.0, 1.0),
    (0.0, 0.0, -1.0),
    (1.0, 0.0, 1.0),
    (1.0, 0.0, -1.0),
    (-1.0, 0.0, 1.0),
    (-1.0, 0.0, -1.0),
    (0.0, 1.0, 1.0),
    (0.0, 1.0, -1.0),
    (0.0, -1.0, 1.0),
    (0.0, -1.0, -1.0),
];

impl<'a> OcpSolver<'a> {
    pub fn new(pair: &'a ScenePair, targets: TargetSet, params: OptimizerParams) -> Self {
        let body = &pair.body;
        let grid = grid_samples(&pair.remote, params.start_position_step, params.start_angle_step)
            .unwrap_or_else(|_| {
                grid_samples(&pair.remote, 0.33, FRAC_PI_4).expect("default grid is valid")
            });
        let feasible: Vec<Placement> = grid
            .samples
            .iter()
            .filter(|q| is_feasible(q, &pair.remote, body))
            .copied()
            .collect();
        // With no feasible sample at all, start from infeasible ones and let
        // the cost branches try to push the avatar out.
        let pool = if feasible.is_empty() { grid.samples } else { feasible };
        let mut starts = Vec::with_capacity(pool.len());
        let mut start_features = Vec::with_capacity(pool.len() * targets.len());
        let mut buf = Vec::new();
        for q in pool {
            if feature_angles(&q, targets.remote(), body, &mut buf).is_ok() {
                starts.push(q);
                start_features.extend_from_slice(&buf);
            }
        }
        OcpSolver {
            pair,
            targets,
            params,
            starts,
            start_features,
        }
    }

    pub fn targets(&self) -> &TargetSet {
        &self.targets
    }

    pub fn params(&self) -> &OptimizerParams {
        &self.params
    }

    /// Similarity of `q'` to fixed local features; `None` if degenerate.
    fn score_at(&self, local: &[[f64; 4]], q: &Placement, buf: &mut Vec<[f64; 4]>) -> Option<f64> {
        feature_angles(q, self.targets.remote(), &self.pair.body, buf).ok()?;
        Some(kernel(squared_distance(local, buf)))
    }

    /// Top starts by similarity, skipping any start that sits within
    /// `START_SEPARATION` and one angular grid step of a better one.
    fn ranked_starts(&self, local: &[[f64; 4]]) -> Vec<(usize, f64)> {
        let n = self.targets.len();
        let mut scored: Vec<(usize, f64)> = self
            .start_features
            .chunks_exact(n)
            .map(|f| kernel(squared_distance(local, f)))
            .enumerate()
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        let k = self.params.multistart_k.max(1);
        let mut chosen: Vec<(usize, f64)> = Vec::with_capacity(k);
        for (i, s) in scored {
            if chosen.len() == k {
                break;
            }
            let q = &self.starts[i];
            let near = chosen.iter().any(|(j, _)| {
                let c = &self.starts[*j];
                c.position().distance(q.position()) < START_SEPARATION
                    && abs(wrap_angle(c.theta() - q.theta())) <= self.params.start_angle_step + 1e-9
            });
            if !near {
                chosen.push((i, s));
            }
        }
        chosen
    }

    /// Compass search from a feasible placement, accepting only feasible
    /// improvements. Slides along obstacle and wall boundaries where the
    /// gradient steps stall.
    fn polish(&self, local: &[[f64; 4]], start: (Placement, f64)) -> (Placement, f64) {
        let room = &self.pair.remote;
        let body = &self.pair.body;
        let mut buf = Vec::new();
        let (mut q, mut s) = start;
        let mut step = POLISH_INITIAL_STEP;
        while step >= POLISH_MIN_STEP {
            let mut improved = false;
            for (dx, dy, dt) in POLISH_MOVES {
                let trial = q.offset([dx * step, dy * step, dt * step]);
                if !is_feasible(&trial, room, body) {
                    continue;
                }
                if let Some(st) = self.score_at(local, &trial, &mut buf) {
                    if st > s {
                        q = trial;
                        s = st;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (q, s)
    }

    /// Runs the conditional descent from `start`, returning the best feasible
    /// iterate and its similarity.
    fn descend(&self, local: &[[f64; 4]], start: Placement) -> Option<(Placement, f64)> {
        let room = &self.pair.remote;
        let body = &self.pair.body;
        let gamma = self.params.step;
        let mut buf = Vec::new();
        let mut q = start;
        let mut best = if is_feasible(&q, room, body) {
            self.score_at(local, &q, &mut buf).map(|s| (q, s))
        } else {
            None
        };
        let mut scale = 1.0;
        let mut was_feasible = best.is_some();
        // best score after each consecutive similarity step
        let mut window: Vec<f64> = Vec::new();

        for _ in 0..self.params.max_iters {
            match classify(&q, room, body) {
                GradientBranch::Collision(i) => {
                    window.clear();
                    let [gx, gy] = collision_push(q.position(), &room.objects()[i]);
                    q = q.offset([scale * gamma[0] * gx, scale * gamma[1] * gy, 0.0]);
                }
                GradientBranch::OutOfSpace => {
                    window.clear();
                    let [gx, gy] = out_of_space_cost_gradient(q.position(), room);
                    q = q.offset([-scale * gamma[0] * gx, -scale * gamma[1] * gy, 0.0]);
                }
                GradientBranch::Similarity => {
                    let Ok((s, g)) = similarity_gradient_raw(local, &q, self.targets.remote(), body)
                    else {
                        break;
                    };
                    if best.is_none_or(|(_, b)| s > b) {
                        best = Some((q, s));
                    }
                    let mut alpha = scale;
                    let mut moved = false;
                    for _ in 0..MAX_BACKTRACKS {
                        let trial =
                            q.offset([alpha * gamma[0] * g[0], alpha * gamma[1] * g[1], alpha * gamma[2] * g[2]]);
                        if !is_feasible(&trial, room, body) {
                            q = trial;
                            moved = true;
                            break;
                        }
                        match self.score_at(local, &trial, &mut buf) {
                            Some(st) if st > s => {
                                q = trial;
                                moved = true;
                                if best.is_none_or(|(_, b)| st > b) {
                                    best = Some((trial, st));
                                }
                                break;
                            }
                            _ => alpha *= 0.5,
                        }
                    }
                    if !moved {
                        break;
                    }
                    if let Some((_, b)) = best {
                        window.push(b);
                        let w = self.params.convergence_window;
                        if window.len() > w && window[window.len() - 1] - window[window.len() - 1 - w] < self.params.convergence_eps {
                            break;
                        }
                    }
                }
            }
            let feasible = is_feasible(&q, room, body);
            if was_feasible && !feasible {
                scale *= 0.5;
            }
            if feasible {
                if let Some(s) = self.score_at(local, &q, &mut buf) {
                    if best.is_none_or(|(_, b)| s > b) {
                        best = Some((q, s));
                    }
                }
            }
            was_feasible = feasible;
        }
        best
    }

    /// OCP and recommendation score for a feasible local placement.
    pub fn optimize(&self, local: &Placement) -> Result<ScoredSample, OcpError> {
        let body = &self.pair.body;
        if !is_feasible(local, &self.pair.local, body) {
            return Err(OcpError::InfeasibleLocal);
        }
        let mut local_feats = Vec::new();
        feature_angles(local, self.targets.local(), body, &mut local_feats)
            .map_err(|_| OcpError::InfeasibleLocal)?;

        let mut best: Option<(Placement, f64)> = None;
        for (idx, _) in self.ranked_starts(&local_feats) {
            if let Some(found) = self.descend(&local_feats, self.starts[idx]) {
                let (q, s) = self.polish(&local_feats, found);
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((q, s));
                }
                if s >= 1.0 {
                    break;
                }
            }
        }
        let (ocp, _) = best.ok_or(OcpError::InfeasibleRemote)?;
        Ok(ScoredSample {
            local: *local,
            ocp: Some(ocp),
            score: self.rescore(local, &ocp),
        })
    }

    /// Like [`optimize`](Self::optimize) but maps an infeasible remote room to a
    /// zero score, as used for guidance fields.
    pub fn score_sample(&self, local: &Placement) -> Result<ScoredSample, OcpError> {
        match self.optimize(local) {
            Err(OcpError::InfeasibleRemote) => Ok(ScoredSample {
                local: *local,
                ocp: None,
                score: 0.0,
            }),
            other => other,
        }
    }

    /// Fresh evaluation of the similarity between `local` and `ocp` through
    /// the public feature path.
    fn rescore(&self, local: &Placement, ocp: &Placement) -> f64 {
        let body = &self.pair.body;
        let a = feature_vector(local, self.targets.local(), body);
        let b = feature_vector(ocp, self.targets.remote(), body);
        match (a, b) {
            (Ok(a), Ok(b)) => similarity(&a, &b).unwrap_or(0.0),
            _ => 0.0,
        }
    }
}

pub fn optimize_ocp<S: AsRef<str>>(
    local: &Placement,
    pair: &ScenePair,
    targets: &[S],
    params: &OptimizerParams,
) -> Result<ScoredSample, OcpError> {
    let targets = TargetSet::resolve(pair, targets)?;
    OcpSolver::new(pair, targets, *params).optimize(local)
}

/// One scored sample per candidate local placement, in candidate order.
/// Serial; the `avaplace` crate has a parallel variant with identical output.
pub fn recommendation_field(
    pair: &ScenePair,
    targets: &TargetSet,
    grid: &SampleGrid,
    visibility: VisibilityMode,
    params: &OptimizerParams,
) -> Vec<ScoredSample> {
    let candidates = candidate_set(&pair.local, targets.local(), grid, &pair.body, visibility);
    let solver = OcpSolver::new(pair, targets.clone(), *params);
    candidates
        .iter()
        .filter_map(|q| solver.score_sample(q).ok())
        .collect()
}
