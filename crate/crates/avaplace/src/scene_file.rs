//! Scene-pair JSON documents.
//!
//! ```json
//! {
//!   "version": 1,
//!   "local":  { "id": "lab", "center": {"x": 0, "y": 0}, "width": 4, "length": 5,
//!               "objects": [ { "id": "tv", "kind": "screen", "center": {"x": 0, "y": 2.4},
//!                              "theta": -1.5708, "width": 1.2, "depth": 0.1 } ] },
//!   "remote": { ... },
//!   "correspondence": { "tv": "tv" },
//!   "body": { "shoulder_width": 0.5, "body_depth": 0.3 }
//! }
//! ```
//!
//! `interactable` defaults to true for screens and avatars, `body` to the
//! default footprint. Unknown fields are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use avaplace_core::{BodyParams, ObjectKind, Point, RoomScene, SceneError, ScenePair, SceneObject};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub x: f64,
    pub y: f64,
}

impl From<Point> for PointDoc {
    fn from(p: Point) -> Self {
        PointDoc { x: p.x, y: p.y }
    }
}

impl From<PointDoc> for Point {
    fn from(p: PointDoc) -> Self {
        Point::new(p.x, p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KindDoc(pub ObjectKind);

impl Serialize for KindDoc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0.as_str())
    }
}

impl<'de> Deserialize<'de> for KindDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ObjectKind::parse(&s).map(KindDoc).ok_or_else(|| {
            let names: Vec<_> = ObjectKind::ALL.iter().map(|k| k.as_str()).collect();
            serde::de::Error::custom(format!("unknown kind '{s}', expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub id: String,
    pub kind: KindDoc,
    pub center: PointDoc,
    pub theta: f64,
    pub width: f64,
    pub depth: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interactable: Option<bool>,
}

impl ObjectDoc {
    pub fn from_object(o: &SceneObject) -> Self {
        ObjectDoc {
            id: o.id.clone(),
            kind: KindDoc(o.kind),
            center: o.center.into(),
            theta: o.theta,
            width: o.width,
            depth: o.depth,
            interactable: Some(o.interactable),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomDoc {
    pub id: String,
    pub center: PointDoc,
    pub width: f64,
    pub length: f64,
    #[serde(default)]
    pub objects: Vec<ObjectDoc>,
}

impl RoomDoc {
    pub fn from_room(r: &RoomScene) -> Self {
        RoomDoc {
            id: r.id.clone(),
            center: r.center.into(),
            width: r.width,
            length: r.length,
            objects: r.objects().iter().map(ObjectDoc::from_object).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDoc {
    pub shoulder_width: f64,
    pub body_depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub local: RoomDoc,
    pub remote: RoomDoc,
    #[serde(default)]
    pub correspondence: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodyDoc>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

/// A scene document that failed to load, with the position of the problem.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneFileError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}{}: {message}", at_path(path))]
    Syntax {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn at_path(path: &str) -> String {
    if path.is_empty() || path == "." {
        String::new()
    } else {
        format!(" at {path}")
    }
}

impl SceneFileError {
    /// JSON path of the offending value, when known.
    pub fn path(&self) -> Option<&str> {
        match self {
            SceneFileError::Io { .. } => None,
            SceneFileError::Syntax { path, .. } | SceneFileError::Invalid { path, .. } => Some(path),
        }
    }
}

fn invalid(path: impl fmt::Display, e: impl fmt::Display) -> SceneFileError {
    SceneFileError::Invalid {
        path: path.to_string(),
        message: e.to_string(),
    }
}

/// Maps a field-level error from a core constructor onto the document path.
fn field_error(prefix: &str, e: SceneError) -> SceneFileError {
    match &e {
        SceneError::NonPositive { field, .. } | SceneError::NonFinite { field } => {
            invalid(format!("{prefix}.{field}"), &e)
        }
        _ => invalid(prefix, &e),
    }
}

fn build_room(doc: &RoomDoc, prefix: &str) -> Result<RoomScene, SceneFileError> {
    let mut objects = Vec::with_capacity(doc.objects.len());
    for (i, o) in doc.objects.iter().enumerate() {
        let at = format!("{prefix}.objects[{i}]");
        let interactable = o
            .interactable
            .unwrap_or(matches!(o.kind.0, ObjectKind::Screen | ObjectKind::Avatar));
        let obj = SceneObject::new(o.id.clone(), o.kind.0, o.center.into(), o.theta, o.width, o.depth, interactable)
            .map_err(|e| field_error(&at, e))?;
        objects.push(obj);
    }
    RoomScene::new(doc.id.clone(), doc.center.into(), doc.width, doc.length, objects).map_err(|e| {
        let index_of = |id: &str, nth: usize| doc.objects.iter().enumerate().filter(|(_, o)| o.id == id).nth(nth).map(|(i, _)| i);
        match &e {
            SceneError::DuplicateObjectId(id) => match index_of(id, 1) {
                Some(i) => invalid(format!("{prefix}.objects[{i}].id"), &e),
                None => invalid(prefix, &e),
            },
            SceneError::ObjectOutsideRoom(id) => match index_of(id, 0) {
                Some(i) => invalid(format!("{prefix}.objects[{i}].center"), &e),
                None => invalid(prefix, &e),
            },
            _ => field_error(prefix, e),
        }
    })
}

impl SceneDoc {
    pub fn from_pair(pair: &ScenePair) -> Self {
        SceneDoc {
            version: FORMAT_VERSION,
            local: RoomDoc::from_room(&pair.local),
            remote: RoomDoc::from_room(&pair.remote),
            correspondence: pair.correspondence().clone(),
            body: Some(BodyDoc {
                shoulder_width: pair.body.shoulder_width,
                body_depth: pair.body.body_depth,
            }),
        }
    }

    /// Semantic validation into a core scene pair.
    pub fn to_pair(&self) -> Result<ScenePair, SceneFileError> {
        if self.version != FORMAT_VERSION {
            return Err(invalid("version", format!("unsupported version {} (expected {FORMAT_VERSION})", self.version)));
        }
        let local = build_room(&self.local, "local")?;
        let remote = build_room(&self.remote, "remote")?;
        let body = match self.body {
            Some(b) => BodyParams::new(b.shoulder_width, b.body_depth).map_err(|e| field_error("body", e))?,
            None => BodyParams::default(),
        };
        let corr = self.correspondence.clone();
        ScenePair::new(local, remote, corr, body).map_err(|e| {
            let key = match &e {
                SceneError::UnknownObject { id, room: "local" } => Some(id.clone()),
                SceneError::UnknownObject { id, .. } | SceneError::NonInjective { remote: id } => self
                    .correspondence
                    .iter()
                    .filter(|(_, r)| *r == id)
                    .nth(matches!(e, SceneError::NonInjective { .. }) as usize)
                    .map(|(l, _)| l.clone()),
                SceneError::KindMismatch { local, .. } => Some(local.clone()),
                _ => None,
            };
            match key {
                Some(k) => invalid(format!("correspondence.{k}"), &e),
                None => invalid("correspondence", &e),
            }
        })
    }
}

pub fn parse_scene(text: &str) -> Result<ScenePair, SceneFileError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: SceneDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SceneFileError::Syntax {
            line: inner.line(),
            column: inner.column(),
            path,
            message: strip_position(&inner.to_string()),
        }
    })?;
    doc.to_pair()
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_scene(path: &Path) -> Result<ScenePair, SceneFileError> {
    let text = fs::read_to_string(path).map_err(|e| SceneFileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scene(&text)
}

pub fn scene_to_json(pair: &ScenePair) -> String {
    serde_json::to_string_pretty(&SceneDoc::from_pair(pair)).expect("scene documents always serialize")
}
