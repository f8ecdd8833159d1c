//! Grid sampling of local placements and the feasibility/visibility filters
//! that turn the grid into the candidate set.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use crate::error::StepError;
use crate::feature::{interaction_feature, wrap_angle, FeatureError};
use crate::geometry::obb_intersects;
use crate::math::{abs, round};
use crate::scene::{footprint, in_room, BodyParams, Placement, RoomScene, SceneObject};

/// Half-width of the horizontal field of view used for visibility.
pub const VISIBILITY_HALF_RANGE: f64 = FRAC_PI_2;

const ANGLE_DIVISION_TOLERANCE: f64 = 1e-9;

/// Which feature angles must fall inside the field of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VisibilityMode {
    /// All four angles: the source sees the target and the target faces the source.
    #[default]
    Mutual,
    /// Only the two source→target angles.
    SourceOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerParams {
    pub position_step: f64,
    pub angle_step: f64,
    pub visibility: VisibilityMode,
}

impl SamplerParams {
    pub const DEFAULT_POSITION_STEP: f64 = 0.33;
    pub const DEFAULT_ANGLE_STEP: f64 = FRAC_PI_4;
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams {
            position_step: Self::DEFAULT_POSITION_STEP,
            angle_step: Self::DEFAULT_ANGLE_STEP,
            visibility: VisibilityMode::Mutual,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub position_step: f64,
    pub angle_step: f64,
    /// Row-major over positions (y outer, x inner), orientations innermost.
    pub samples: Vec<Placement>,
}

impl SampleGrid {
    pub fn orientations_per_position(&self) -> usize {
        round(TAU / self.angle_step) as usize
    }
}

/// Sample coordinates along one axis of length `extent` starting at `min`.
fn axis_samples(min: f64, extent: f64, step: f64) -> Vec<f64> {
    if extent < step {
        return alloc::vec![min + extent / 2.0];
    }
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        let v = min + step / 2.0 + i as f64 * step;
        if v >= min + extent {
            break;
        }
        out.push(v);
        i += 1;
    }
    out
}

/// Orientations `0, step, 2·step, …` wrapped to (−π, π].
pub fn orientations(angle_step: f64) -> Result<Vec<f64>, StepError> {
    if !(angle_step.is_finite() && angle_step > 0.0) {
        return Err(StepError::AngleStep(angle_step));
    }
    let k = round(TAU / angle_step);
    if k < 1.0 || abs(k * angle_step - TAU) > ANGLE_DIVISION_TOLERANCE {
        return Err(StepError::AngleStep(angle_step));
    }
    Ok((0..k as usize)
        .map(|i| wrap_angle(i as f64 * angle_step))
        .collect())
}

pub fn grid_samples(
    room: &RoomScene,
    position_step: f64,
    angle_step: f64,
) -> Result<SampleGrid, StepError> {
    if !(position_step.is_finite() && position_step > 0.0) {
        return Err(StepError::PositionStep(position_step));
    }
    let thetas = orientations(angle_step)?;
    let min = room.min_corner();
    let xs = axis_samples(min.x, room.width, position_step);
    let ys = axis_samples(min.y, room.length, position_step);
    let mut samples = Vec::with_capacity(xs.len() * ys.len() * thetas.len());
    for &y in &ys {
        for &x in &xs {
            samples.extend(thetas.iter().map(|&t| Placement::new(x, y, t)));
        }
    }
    Ok(SampleGrid {
        position_step,
        angle_step,
        samples,
    })
}

/// Footprint inside the floor and clear of every object box.
pub fn is_feasible(p: &Placement, room: &RoomScene, body: &BodyParams) -> bool {
    let fp = footprint(p, body);
    fp.corners().iter().all(|&c| in_room(c, room))
        && room
            .objects()
            .iter()
            .all(|o| !obb_intersects(&fp, &o.bounding_box()))
}

pub fn visibility_ok(
    p: &Placement,
    targets: &[SceneObject],
    body: &BodyParams,
    mode: VisibilityMode,
) -> Result<bool, FeatureError> {
    if targets.is_empty() {
        return Err(FeatureError::EmptyTargets);
    }
    let checked = match mode {
        VisibilityMode::Mutual => 4,
        VisibilityMode::SourceOnly => 2,
    };
    for t in targets {
        let f = interaction_feature(p, body.shoulder_width, t)?;
        if f.phi[..checked]
            .iter()
            .any(|a| abs(*a) >= VISIBILITY_HALF_RANGE)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Grid samples that are feasible and see every target. Order follows the grid.
pub fn candidate_set(
    room: &RoomScene,
    targets: &[SceneObject],
    grid: &SampleGrid,
    body: &BodyParams,
    mode: VisibilityMode,
) -> Vec<Placement> {
    grid.samples
        .iter()
        .filter(|q| {
            // feasible samples never coincide with a target center
            is_feasible(q, room, body) && visibility_ok(q, targets, body, mode).unwrap_or(false)
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::scene::ObjectKind;
    use alloc::vec;
    use core::f64::consts::PI;

    fn empty_room(w: f64, l: f64) -> RoomScene {
        RoomScene::new("r", Point::ORIGIN, w, l, vec![]).unwrap()
    }

    #[test]
    fn small_room_grid_count() {
        let g = grid_samples(&empty_room(0.99, 0.99), 0.33, FRAC_PI_4).unwrap();
        assert_eq!(g.samples.len(), 72);
        let xs: Vec<f64> = g.samples.iter().step_by(8).take(3).map(|p| p.x()).collect();
        for (got, want) in xs.iter().zip([-0.33, 0.0, 0.33]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eight_orientations() {
        let o = orientations(FRAC_PI_4).unwrap();
        let want = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI, -3.0 * PI / 4.0, -PI / 2.0, -PI / 4.0];
        assert_eq!(o.len(), 8);
        for (a, b) in o.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn narrow_room_has_single_row() {
        let g = grid_samples(&empty_room(3.0, 0.2), 0.33, FRAC_PI_4).unwrap();
        assert!(g.samples.iter().all(|p| p.y() == 0.0));
        assert_eq!(g.samples.len(), 9 * 8);
    }

    #[test]
    fn invalid_steps_rejected() {
        let r = empty_room(2.0, 2.0);
        assert_eq!(grid_samples(&r, 0.33, 1.0), Err(StepError::AngleStep(1.0)));
        assert_eq!(grid_samples(&r, 0.0, FRAC_PI_4), Err(StepError::PositionStep(0.0)));
        assert!(grid_samples(&r, 0.33, TAU / 12.0).is_ok());
    }

    fn screen_room() -> (RoomScene, SceneObject) {
        let tv = SceneObject::new("tv", ObjectKind::Screen, Point::new(0.0, 1.95), -FRAC_PI_2, 1.2, 0.1, true)
            .unwrap();
        let table = SceneObject::new("table", ObjectKind::Furniture, Point::new(1.0, -1.0), 0.0, 1.0, 0.6, false)
            .unwrap();
        (RoomScene::new("r", Point::ORIGIN, 4.0, 4.0, vec![tv.clone(), table]).unwrap(), tv)
    }

    #[test]
    fn feasibility_cases() {
        let (room, _) = screen_room();
        let body = BodyParams::default();
        assert!(!is_feasible(&Placement::new(1.0, -1.0, 0.3), &room, &body));
        assert!(is_feasible(&Placement::new(-0.8, 0.3, 0.0), &room, &body));
        // Facing +x the footprint extends 0.15 m along x; the wall is at x = 2.
        assert!(is_feasible(&Placement::new(1.85, 0.3, 0.0), &room, &body));
        assert!(!is_feasible(&Placement::new(1.86, 0.3, 0.0), &room, &body));
    }

    #[test]
    fn visibility_cases() {
        let (_, tv) = screen_room();
        let body = BodyParams::default();
        let t = core::slice::from_ref(&tv);
        let m = VisibilityMode::Mutual;
        assert!(visibility_ok(&Placement::new(0.0, -0.05, FRAC_PI_2), t, &body, m).unwrap());
        assert!(!visibility_ok(&Placement::new(0.0, -0.05, -FRAC_PI_2), t, &body, m).unwrap());
        // Behind the screen, facing it: the screen's own frontal half-plane excludes us.
        let behind = Placement::new(0.0, 3.0, -FRAC_PI_2);
        assert!(!visibility_ok(&behind, t, &body, m).unwrap());
        assert!(visibility_ok(&behind, t, &body, VisibilityMode::SourceOnly).unwrap());
    }

    #[test]
    fn candidates_lie_in_front_of_wall_screen() {
        let (room, tv) = screen_room();
        let body = BodyParams::default();
        let grid = grid_samples(&room, 0.33, FRAC_PI_4).unwrap();
        let c = candidate_set(&room, core::slice::from_ref(&tv), &grid, &body, VisibilityMode::Mutual);
        assert!(!c.is_empty());
        for q in &c {
            assert!(q.y() < tv.center.y);
            assert!(grid.samples.contains(q));
        }
    }

    #[test]
    fn room_filled_by_object_has_no_candidates() {
        let blob = SceneObject::new("blob", ObjectKind::Furniture, Point::ORIGIN, 0.0, 5.0, 5.0, false).unwrap();
        let tv = SceneObject::new("tv", ObjectKind::Screen, Point::new(0.0, 1.9), -FRAC_PI_2, 1.0, 0.1, true).unwrap();
        let room = RoomScene::new("r", Point::ORIGIN, 4.0, 4.0, vec![blob, tv.clone()]).unwrap();
        let grid = grid_samples(&room, 0.33, FRAC_PI_4).unwrap();
        assert!(candidate_set(&room, &[tv], &grid, &BodyParams::default(), VisibilityMode::Mutual).is_empty());
    }
}
