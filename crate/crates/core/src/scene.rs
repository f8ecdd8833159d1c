//! Rooms, objects, placements and the correspondence between two rooms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{SceneError, TargetError};
use crate::feature::wrap_angle;
use crate::geometry::{OrientedBox, Point};

/// A planar pose. `theta` is kept wrapped to (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    x: f64,
    y: f64,
    theta: f64,
}

impl Placement {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Placement {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn at(position: Point, theta: f64) -> Self {
        Placement::new(position.x, position.y, theta)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Moves by `(dx, dy, dtheta)`, re-wrapping the orientation.
    pub fn offset(&self, delta: [f64; 3]) -> Placement {
        Placement::new(self.x + delta[0], self.y + delta[1], self.theta + delta[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectKind {
    Screen,
    Avatar,
    Furniture,
    WallFixture,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 4] = [
        ObjectKind::Screen,
        ObjectKind::Avatar,
        ObjectKind::Furniture,
        ObjectKind::WallFixture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Screen => "screen",
            ObjectKind::Avatar => "avatar",
            ObjectKind::Furniture => "furniture",
            ObjectKind::WallFixture => "wall-fixture",
        }
    }

    pub fn parse(s: &str) -> Option<ObjectKind> {
        ObjectKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

/// An object footprint: `width` along the object's right axis, `depth` along
/// its frontal axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub id: String,
    pub kind: ObjectKind,
    pub center: Point,
    pub theta: f64,
    pub width: f64,
    pub depth: f64,
    pub interactable: bool,
}

impl SceneObject {
    pub fn new(
        id: impl Into<String>,
        kind: ObjectKind,
        center: Point,
        theta: f64,
        width: f64,
        depth: f64,
        interactable: bool,
    ) -> Result<Self, SceneError> {
        finite("center.x", center.x)?;
        finite("center.y", center.y)?;
        finite("theta", theta)?;
        positive("width", width)?;
        positive("depth", depth)?;
        Ok(SceneObject {
            id: id.into(),
            kind,
            center,
            theta: wrap_angle(theta),
            width,
            depth,
            interactable,
        })
    }

    pub fn placement(&self) -> Placement {
        Placement::at(self.center, self.theta)
    }

    pub fn bounding_box(&self) -> OrientedBox {
        OrientedBox::new(self.center, self.theta, self.width, self.depth)
    }

    /// `(right, left)` endpoints of the object's width.
    pub fn endpoints(&self) -> (Point, Point) {
        endpoints(self.center, self.theta, self.width)
    }
}

/// An axis-aligned rectangular floor with its furniture.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomScene {
    pub id: String,
    pub center: Point,
    pub width: f64,
    pub length: f64,
    objects: Vec<SceneObject>,
}

impl RoomScene {
    pub fn new(
        id: impl Into<String>,
        center: Point,
        width: f64,
        length: f64,
        objects: Vec<SceneObject>,
    ) -> Result<Self, SceneError> {
        finite("center.x", center.x)?;
        finite("center.y", center.y)?;
        positive("width", width)?;
        positive("length", length)?;
        let room = RoomScene {
            id: id.into(),
            center,
            width,
            length,
            objects: Vec::new(),
        };
        let mut seen = BTreeSet::new();
        for obj in &objects {
            if !seen.insert(obj.id.as_str()) {
                return Err(SceneError::DuplicateObjectId(obj.id.clone()));
            }
            if !in_room(obj.center, &room) {
                return Err(SceneError::ObjectOutsideRoom(obj.id.clone()));
            }
        }
        Ok(RoomScene { objects, ..room })
    }

    pub fn objects(&self) -> &[SceneObject] {
        &self.objects
    }

    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Returns a copy with `obj` added.
    pub fn with_object(&self, obj: SceneObject) -> Result<Self, SceneError> {
        let mut objects = self.objects.clone();
        objects.push(obj);
        RoomScene::new(self.id.clone(), self.center, self.width, self.length, objects)
    }

    pub fn min_corner(&self) -> Point {
        Point::new(
            self.center.x - self.width / 2.0,
            self.center.y - self.length / 2.0,
        )
    }
}

/// Footprint of the user and, identically, of their avatar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyParams {
    pub shoulder_width: f64,
    pub body_depth: f64,
}

impl BodyParams {
    pub const DEFAULT_SHOULDER_WIDTH: f64 = 0.5;
    pub const DEFAULT_BODY_DEPTH: f64 = 0.3;

    pub fn new(shoulder_width: f64, body_depth: f64) -> Result<Self, SceneError> {
        positive("shoulder_width", shoulder_width)?;
        positive("body_depth", body_depth)?;
        Ok(BodyParams {
            shoulder_width,
            body_depth,
        })
    }
}

impl Default for BodyParams {
    fn default() -> Self {
        BodyParams {
            shoulder_width: Self::DEFAULT_SHOULDER_WIDTH,
            body_depth: Self::DEFAULT_BODY_DEPTH,
        }
    }
}

/// Local and remote rooms plus the preregistered object correspondence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenePair {
    pub local: RoomScene,
    pub remote: RoomScene,
    correspondence: BTreeMap<String, String>,
    pub body: BodyParams,
}

impl ScenePair {
    pub fn new(
        local: RoomScene,
        remote: RoomScene,
        correspondence: BTreeMap<String, String>,
        body: BodyParams,
    ) -> Result<Self, SceneError> {
        let mut images = BTreeSet::new();
        for (l, r) in &correspondence {
            let lo = local.object(l).ok_or_else(|| SceneError::UnknownObject {
                room: "local",
                id: l.clone(),
            })?;
            let ro = remote.object(r).ok_or_else(|| SceneError::UnknownObject {
                room: "remote",
                id: r.clone(),
            })?;
            if lo.kind != ro.kind {
                return Err(SceneError::KindMismatch {
                    local: l.clone(),
                    remote: r.clone(),
                });
            }
            if !images.insert(r.as_str()) {
                return Err(SceneError::NonInjective { remote: r.clone() });
            }
        }
        Ok(ScenePair {
            local,
            remote,
            correspondence,
            body,
        })
    }

    pub fn correspondence(&self) -> &BTreeMap<String, String> {
        &self.correspondence
    }

    pub fn remote_of(&self, local_id: &str) -> Option<&SceneObject> {
        self.correspondence
            .get(local_id)
            .and_then(|r| self.remote.object(r))
    }

    /// Same pair with a different remote room. The correspondence must still hold.
    pub fn with_remote(&self, remote: RoomScene) -> Result<Self, SceneError> {
        ScenePair::new(
            self.local.clone(),
            remote,
            self.correspondence.clone(),
            self.body,
        )
    }
}

/// A validated target selection: local objects in selection order and their
/// remote counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    local: Vec<SceneObject>,
    remote: Vec<SceneObject>,
}

impl TargetSet {
    pub fn resolve<S: AsRef<str>>(pair: &ScenePair, ids: &[S]) -> Result<Self, TargetError> {
        if ids.is_empty() {
            return Err(TargetError::Empty);
        }
        let mut local = Vec::with_capacity(ids.len());
        let mut remote = Vec::with_capacity(ids.len());
        for id in ids {
            let id = id.as_ref();
            if local.iter().any(|o: &SceneObject| o.id == id) {
                return Err(TargetError::Duplicate(id.into()));
            }
            let lo = pair
                .local
                .object(id)
                .ok_or_else(|| TargetError::Unknown(id.into()))?;
            if !lo.interactable {
                return Err(TargetError::NotInteractable(id.into()));
            }
            let ro = pair
                .remote_of(id)
                .ok_or_else(|| TargetError::Unmapped(id.into()))?;
            local.push(lo.clone());
            remote.push(ro.clone());
        }
        Ok(TargetSet { local, remote })
    }

    pub fn local(&self) -> &[SceneObject] {
        &self.local
    }

    pub fn remote(&self) -> &[SceneObject] {
        &self.remote
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.local.iter().map(|o| o.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.local.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local.is_empty()
    }
}

/// Right and left endpoints of a segment of length `width` centered at
/// `center` and perpendicular to the frontal direction `theta`.
pub fn endpoints(center: Point, theta: f64, width: f64) -> (Point, Point) {
    let half = (width / 2.0) * Point::right(theta);
    (center + half, center - half)
}

pub fn footprint(p: &Placement, body: &BodyParams) -> OrientedBox {
    OrientedBox::new(p.position(), p.theta(), body.shoulder_width, body.body_depth)
}

/// Closed floor rectangle test.
pub fn in_room(p: Point, room: &RoomScene) -> bool {
    crate::math::abs(p.x - room.center.x) <= room.width / 2.0
        && crate::math::abs(p.y - room.center.y) <= room.length / 2.0
}

fn positive(field: &'static str, value: f64) -> Result<(), SceneError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(SceneError::NonPositive { field, value })
    }
}

fn finite(field: &'static str, value: f64) -> Result<(), SceneError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(SceneError::NonFinite { field })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{PI, TAU};

    fn close(a: Point, b: Point) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn endpoints_of_screen_facing_back() {
        let (r, l) = endpoints(Point::new(2.0, 0.0), PI, 2.0);
        assert!(close(r, Point::new(2.0, 1.0)));
        assert!(close(l, Point::new(2.0, -1.0)));
    }

    #[test]
    fn endpoints_of_user_at_origin() {
        let (r, l) = endpoints(Point::ORIGIN, 0.0, 0.5);
        assert!(close(r, Point::new(0.0, -0.25)));
        assert!(close(l, Point::new(0.0, 0.25)));
    }

    #[test]
    fn endpoints_midpoint_is_center() {
        for theta in [0.0, 0.3, -2.0, 3.0] {
            let (r, l) = endpoints(Point::new(5.0, 5.0), theta, 1.7);
            assert!(close(0.5 * (r + l), Point::new(5.0, 5.0)));
            assert!(((r - l).norm() - 1.7).abs() < 1e-12);
        }
    }

    #[test]
    fn default_footprint_geometry() {
        let body = BodyParams::default();
        let b = footprint(&Placement::new(0.0, 0.0, 0.0), &body);
        let mut xs: Vec<_> = b.corners().iter().map(|c| (c.x, c.y)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            xs,
            vec![(-0.15, -0.25), (-0.15, 0.25), (0.15, -0.25), (0.15, 0.25)]
        );
        assert!((b.area() - 0.15).abs() < 1e-15);

        let turned = footprint(&Placement::new(0.0, 0.0, TAU), &body);
        for (a, c) in b.corners().iter().zip(turned.corners().iter()) {
            assert!(close(*a, *c));
        }
    }

    #[test]
    fn placement_wraps_theta() {
        assert!((Placement::new(0.0, 0.0, 3.0 * PI / 2.0).theta() + PI / 2.0).abs() < 1e-12);
        assert_eq!(Placement::new(0.0, 0.0, -PI).theta(), PI);
    }

    fn room(objects: Vec<SceneObject>) -> Result<RoomScene, SceneError> {
        RoomScene::new("r", Point::new(1.0, 2.0), 4.0, 3.0, objects)
    }

    fn chair(id: &str, x: f64, y: f64) -> SceneObject {
        SceneObject::new(id, ObjectKind::Furniture, Point::new(x, y), 0.0, 0.5, 0.5, false).unwrap()
    }

    #[test]
    fn in_room_is_closed() {
        let r = room(vec![]).unwrap();
        assert!(in_room(r.center, &r));
        assert!(in_room(Point::new(3.0, 2.0), &r));
        assert!(in_room(Point::new(1.0, 0.5), &r));
        assert!(!in_room(Point::new(3.01, 2.0), &r));
    }

    #[test]
    fn room_rejects_bad_objects() {
        assert_eq!(
            room(vec![chair("a", 0.0, 2.0), chair("a", 1.0, 2.0)]),
            Err(SceneError::DuplicateObjectId("a".into()))
        );
        assert_eq!(
            room(vec![chair("a", 5.0, 2.0)]),
            Err(SceneError::ObjectOutsideRoom("a".into()))
        );
        assert!(matches!(
            SceneObject::new("x", ObjectKind::Screen, Point::ORIGIN, 0.0, 0.0, 1.0, true),
            Err(SceneError::NonPositive { field: "width", .. })
        ));
        assert!(BodyParams::new(0.5, -1.0).is_err());
    }

    #[test]
    fn pair_validates_correspondence() {
        let screen = |id: &str| {
            SceneObject::new(id, ObjectKind::Screen, Point::new(1.0, 3.0), 0.0, 1.0, 0.1, true)
                .unwrap()
        };
        let local = room(vec![screen("tv"), chair("c", 0.0, 1.0)]).unwrap();
        let remote = room(vec![screen("tv2"), chair("c2", 0.0, 1.0)]).unwrap();
        let map = |pairs: &[(&str, &str)]| {
            pairs
                .iter()
                .map(|(a, b)| (String::from(*a), String::from(*b)))
                .collect::<BTreeMap<_, _>>()
        };
        let body = BodyParams::default();
        assert!(ScenePair::new(local.clone(), remote.clone(), map(&[("tv", "tv2")]), body).is_ok());
        assert!(matches!(
            ScenePair::new(local.clone(), remote.clone(), map(&[("tv", "c2")]), body),
            Err(SceneError::KindMismatch { .. })
        ));
        assert!(matches!(
            ScenePair::new(local.clone(), remote.clone(), map(&[("tv", "nope")]), body),
            Err(SceneError::UnknownObject { room: "remote", .. })
        ));
        assert!(matches!(
            ScenePair::new(local, remote, map(&[("tv", "tv2"), ("c", "tv2")]), body),
            Err(SceneError::KindMismatch { .. } | SceneError::NonInjective { .. })
        ));
    }

    #[test]
    fn target_resolution_errors() {
        let screen =
            SceneObject::new("tv", ObjectKind::Screen, Point::new(1.0, 3.0), 0.0, 1.0, 0.1, true)
                .unwrap();
        let lamp = SceneObject::new(
            "lamp",
            ObjectKind::Furniture,
            Point::new(2.0, 3.0),
            0.0,
            0.3,
            0.3,
            true,
        )
        .unwrap();
        let local = room(vec![screen.clone(), chair("c", 0.0, 1.0), lamp]).unwrap();
        let remote = room(vec![SceneObject {
            id: "tv2".into(),
            ..screen
        }])
        .unwrap();
        let mut map = BTreeMap::new();
        map.insert(String::from("tv"), String::from("tv2"));
        let pair = ScenePair::new(local, remote, map, BodyParams::default()).unwrap();

        let t = TargetSet::resolve(&pair, &["tv"]).unwrap();
        assert_eq!(t.remote()[0].id, "tv2");
        assert_eq!(TargetSet::resolve::<&str>(&pair, &[]), Err(TargetError::Empty));
        assert_eq!(TargetSet::resolve(&pair, &["tvv"]), Err(TargetError::Unknown("tvv".into())));
        assert_eq!(TargetSet::resolve(&pair, &["lamp"]), Err(TargetError::Unmapped("lamp".into())));
        assert_eq!(
            TargetSet::resolve(&pair, &["c"]),
            Err(TargetError::NotInteractable("c".into()))
        );
        assert_eq!(
            TargetSet::resolve(&pair, &["tv", "tv"]),
            Err(TargetError::Duplicate("tv".into()))
        );
    }
}
