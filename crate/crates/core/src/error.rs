use alloc::string::String;
use core::fmt;

/// Violations of scene construction invariants.
#[derive(Debug, Clone, PartialEq)]
pub enum SceneError {
    /// A length that must be strictly positive (and finite) was not.
    NonPositive { field: &'static str, value: f64 },
    /// A coordinate or angle was NaN or infinite.
    NonFinite { field: &'static str },
    DuplicateObjectId(String),
    ObjectOutsideRoom(String),
    UnknownObject { room: &'static str, id: String },
    KindMismatch { local: String, remote: String },
    /// Two local objects map to the same remote object.
    NonInjective { remote: String },
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneError::NonPositive { field, value } => {
                write!(f, "{field} must be > 0 (got {value})")
            }
            SceneError::NonFinite { field } => write!(f, "{field} must be finite"),
            SceneError::DuplicateObjectId(id) => write!(f, "duplicate object id '{id}'"),
            SceneError::ObjectOutsideRoom(id) => {
                write!(f, "object '{id}' has its center outside the floor")
            }
            SceneError::UnknownObject { room, id } => {
                write!(f, "no object '{id}' in the {room} room")
            }
            SceneError::KindMismatch { local, remote } => {
                write!(f, "'{local}' and '{remote}' correspond but differ in kind")
            }
            SceneError::NonInjective { remote } => {
                write!(f, "remote object '{remote}' is the image of more than one local object")
            }
        }
    }
}

impl core::error::Error for SceneError {}

/// Problems resolving a user's target selection against a scene pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetError {
    Empty,
    Unknown(String),
    Unmapped(String),
    NotInteractable(String),
    Duplicate(String),
}

impl TargetError {
    pub fn id(&self) -> Option<&str> {
        match self {
            TargetError::Empty => None,
            TargetError::Unknown(id)
            | TargetError::Unmapped(id)
            | TargetError::NotInteractable(id)
            | TargetError::Duplicate(id) => Some(id),
        }
    }
}

impl fmt::Display for TargetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetError::Empty => f.write_str("no interaction targets selected"),
            TargetError::Unknown(id) => write!(f, "unknown target '{id}'"),
            TargetError::Unmapped(id) => write!(f, "target '{id}' has no remote correspondence"),
            TargetError::NotInteractable(id) => write!(f, "object '{id}' is not interactable"),
            TargetError::Duplicate(id) => write!(f, "target '{id}' selected twice"),
        }
    }
}

impl core::error::Error for TargetError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepError {
    PositionStep(f64),
    /// The angular step does not divide the full turn.
    AngleStep(f64),
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::PositionStep(s) => write!(f, "position step must be > 0 (got {s})"),
            StepError::AngleStep(s) => write!(f, "angle step {s} does not divide 2π"),
        }
    }
}

impl core::error::Error for StepError {}

#[derive(Debug, Clone, PartialEq)]
pub enum OcpError {
    /// The local placement itself collides or leaves the floor.
    InfeasibleLocal,
    /// No feasible avatar placement was found in the remote room.
    InfeasibleRemote,
    Target(TargetError),
}

impl From<TargetError> for OcpError {
    fn from(e: TargetError) -> Self {
        OcpError::Target(e)
    }
}

impl fmt::Display for OcpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OcpError::InfeasibleLocal => f.write_str("local placement is not feasible"),
            OcpError::InfeasibleRemote => {
                f.write_str("no feasible corresponding placement in the remote room")
            }
            OcpError::Target(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for OcpError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            OcpError::Target(e) => Some(e),
            _ => None,
        }
    }
}
