#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use avaplace_core::{BodyParams, ObjectKind, Point, RoomScene, ScenePair, SceneObject};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn object(id: &str, kind: ObjectKind, x: f64, y: f64, theta: f64, w: f64, d: f64) -> SceneObject {
    let interactable = matches!(kind, ObjectKind::Screen | ObjectKind::Avatar);
    SceneObject::new(id, kind, Point::new(x, y), theta, w, d, interactable).unwrap()
}

/// A screen flush against a random wall, facing into the room.
fn wall_screen(rng: &mut StdRng, id: &str, w: f64, l: f64) -> SceneObject {
    let width = rng.random_range(0.8..1.5);
    let along = |rng: &mut StdRng, extent: f64| rng.random_range(-(extent / 2.0 - width / 2.0 - 0.1)..(extent / 2.0 - width / 2.0 - 0.1));
    let (x, y, theta) = match rng.random_range(0..4) {
        0 => (along(rng, w), l / 2.0 - 0.06, -FRAC_PI_2),
        1 => (along(rng, w), -l / 2.0 + 0.06, FRAC_PI_2),
        2 => (w / 2.0 - 0.06, along(rng, l), PI),
        _ => (-w / 2.0 + 0.06, along(rng, l), 0.0),
    };
    object(id, ObjectKind::Screen, x, y, theta, width, 0.1)
}

fn random_room(rng: &mut StdRng, tag: &str, w: f64, l: f64, with_avatar: bool, extra: usize) -> RoomScene {
    let mut objs = vec![wall_screen(rng, &format!("screen_{tag}"), w, l)];
    if with_avatar {
        objs.push(object(
            &format!("partner_{tag}"),
            ObjectKind::Avatar,
            rng.random_range(-w / 2.0 + 0.4..w / 2.0 - 0.4),
            rng.random_range(-l / 2.0 + 0.4..l / 2.0 - 0.4),
            rng.random_range(-PI..PI),
            0.5,
            0.3,
        ));
    }
    for i in 0..extra {
        objs.push(object(
            &format!("furniture_{tag}{i}"),
            ObjectKind::Furniture,
            rng.random_range(-w / 2.0 + 0.3..w / 2.0 - 0.3),
            rng.random_range(-l / 2.0 + 0.3..l / 2.0 - 0.3),
            rng.random_range(-PI..PI),
            rng.random_range(0.4..1.4),
            rng.random_range(0.4..1.0),
        ));
    }
    RoomScene::new(tag, Point::ORIGIN, w, l, objs).unwrap()
}

/// Random pair of `size × size` rooms with 2–4 objects each. Returns the pair
/// and the local target ids (the screen, plus the partner avatar when present).
pub fn random_pair(rng: &mut StdRng, size: f64) -> (ScenePair, Vec<String>) {
    let with_avatar = rng.random_bool(0.5);
    let base = 1 + with_avatar as usize;
    let extra_local = rng.random_range(2usize..=4) - base;
    let extra_remote = rng.random_range(2usize..=4) - base;
    let local = random_room(rng, "a", size, size, with_avatar, extra_local);
    let remote = random_room(rng, "b", size, size, with_avatar, extra_remote);
    let mut map = BTreeMap::new();
    map.insert("screen_a".to_string(), "screen_b".to_string());
    let mut targets = vec!["screen_a".to_string()];
    if with_avatar {
        map.insert("partner_a".to_string(), "partner_b".to_string());
        targets.push("partner_a".to_string());
    }
    (ScenePair::new(local, remote, map, BodyParams::default()).unwrap(), targets)
}

/// A room with a screen on the north wall and a partner avatar, used as both
/// local and remote room.
pub fn office(size: f64) -> RoomScene {
    RoomScene::new(
        "office",
        Point::ORIGIN,
        size,
        size,
        vec![
            object("tv", ObjectKind::Screen, 0.3, size / 2.0 - 0.06, -FRAC_PI_2, 1.4, 0.1),
            object("partner", ObjectKind::Avatar, 1.0, 0.0, 2.5, 0.5, 0.3),
            object("desk", ObjectKind::Furniture, -1.2, -1.0, 0.2, 1.2, 0.6),
        ],
    )
    .unwrap()
}

pub fn identical_pair(size: f64) -> ScenePair {
    let room = office(size);
    let map = [("tv", "tv"), ("partner", "partner")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    ScenePair::new(room.clone(), room, map, BodyParams::default()).unwrap()
}

/// Central difference of `f` along each of the three placement coordinates.
pub fn central_difference(f: impl Fn([f64; 3]) -> f64, at: [f64; 3], h: f64) -> [f64; 3] {
    let mut g = [0.0; 3];
    for i in 0..3 {
        let (mut plus, mut minus) = (at, at);
        plus[i] += h;
        minus[i] -= h;
        g[i] = (f(plus) - f(minus)) / (2.0 * h);
    }
    g
}
