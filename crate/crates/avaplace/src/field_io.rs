//! Recommendation-field export and the sector-field wire document.
//!
//! Field export rows are `[x, y, theta, score, ocp_x, ocp_y, ocp_theta]`:
//! the local sample placement, its recommendation score in [0, 1] and its OCP
//! in remote-room coordinates. The three OCP columns are `null` when the
//! remote room has no feasible placement (score 0). Lengths are meters,
//! angles radians in (−π, π]. Numbers are written with shortest round-trip
//! formatting, so a parsed document reproduces every value bit for bit.

use avaplace_core::{Placement, Rgb, ScoredSample, Sector, SceneObject};
use serde::{Deserialize, Serialize};

use crate::scene_file::{ObjectDoc, PointDoc, FORMAT_VERSION};

pub const FIELD_COLUMNS: [&str; 7] = ["x", "y", "theta", "score", "ocp_x", "ocp_y", "ocp_theta"];

pub type FieldRow = (f64, f64, f64, f64, Option<f64>, Option<f64>, Option<f64>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldExport {
    pub version: u32,
    pub columns: Vec<String>,
    pub position_step: f64,
    pub angle_step: f64,
    pub targets: Vec<String>,
    pub rows: Vec<FieldRow>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldFormatError {
    #[error("unexpected columns {0:?}")]
    Columns(Vec<String>),
    #[error("row {0}: OCP columns must be all numbers or all null")]
    PartialOcp(usize),
}

impl FieldExport {
    pub fn new<S: AsRef<str>>(field: &[ScoredSample], position_step: f64, angle_step: f64, targets: &[S]) -> Self {
        FieldExport {
            version: FORMAT_VERSION,
            columns: FIELD_COLUMNS.iter().map(|c| c.to_string()).collect(),
            position_step,
            angle_step,
            targets: targets.iter().map(|t| t.as_ref().to_string()).collect(),
            rows: field
                .iter()
                .map(|s| {
                    let l = s.local;
                    let o = s.ocp;
                    (l.x(), l.y(), l.theta(), s.score, o.map(|o| o.x()), o.map(|o| o.y()), o.map(|o| o.theta()))
                })
                .collect(),
        }
    }

    pub fn samples(&self) -> Result<Vec<ScoredSample>, FieldFormatError> {
        if self.columns != FIELD_COLUMNS {
            return Err(FieldFormatError::Columns(self.columns.clone()));
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(i, &(x, y, t, score, ox, oy, ot))| {
                let ocp = match (ox, oy, ot) {
                    (Some(ox), Some(oy), Some(ot)) => Some(Placement::new(ox, oy, ot)),
                    (None, None, None) => None,
                    _ => return Err(FieldFormatError::PartialOcp(i)),
                };
                Ok(ScoredSample {
                    local: Placement::new(x, y, t),
                    ocp,
                    score,
                })
            })
            .collect()
    }
}

/// Colors travel as `[r, g, b]` bytes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorDoc {
    pub position: PointDoc,
    pub direction: f64,
    pub central_angle: f64,
    pub score: f64,
    pub color: [u8; 3],
}

impl From<&Sector> for SectorDoc {
    fn from(s: &Sector) -> Self {
        SectorDoc {
            position: s.position.into(),
            direction: s.direction,
            central_angle: s.central_angle,
            score: s.score,
            color: s.color.0,
        }
    }
}

impl From<&SectorDoc> for Sector {
    fn from(s: &SectorDoc) -> Self {
        Sector {
            position: s.position.into(),
            direction: s.direction,
            central_angle: s.central_angle,
            score: s.score,
            color: Rgb(s.color),
        }
    }
}

/// What the planner draws on the local floor: colored sectors plus the remote
/// objects carried into local coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorField {
    pub version: u32,
    pub threshold: f64,
    pub central_angle: f64,
    pub targets: Vec<String>,
    pub sectors: Vec<SectorDoc>,
    pub overlay: Vec<ObjectDoc>,
}

impl SectorField {
    pub fn new<S: AsRef<str>>(sectors: &[Sector], overlay: &[SceneObject], threshold: f64, central_angle: f64, targets: &[S]) -> Self {
        SectorField {
            version: FORMAT_VERSION,
            threshold,
            central_angle,
            targets: targets.iter().map(|t| t.as_ref().to_string()).collect(),
            sectors: sectors.iter().map(SectorDoc::from).collect(),
            overlay: overlay.iter().map(ObjectDoc::from_object).collect(),
        }
    }
}

/// The `field` command's output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldReport {
    pub field: FieldExport,
    pub guidance: SectorField,
}
