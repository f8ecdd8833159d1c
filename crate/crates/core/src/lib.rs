//! Placement recommendation for avatar telepresence between two dissimilar rooms.
//!
//! A local user picks interaction targets (a screen, the remote partner's
//! avatar, ...). For every sampled local placement the crate finds the remote
//! placement for the user's avatar that best preserves the angular relation to
//! the corresponding remote targets, and scores the local placement by how
//! well that is possible. The scores are turned into colored floor sectors.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and the
//! HTTP service live in the `avaplace` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod math;

pub mod error;
pub mod feature;
pub mod geometry;
pub mod guidance;
pub mod optimizer;
pub mod oracle;
pub mod sampler;
pub mod scene;

pub use error::{OcpError, SceneError, StepError, TargetError};
pub use feature::{
    feature_vector, interaction_feature, similarity, similarity_gradient, wrap_angle,
    FeatureError, FeatureVector, InteractionFeature, KERNEL_FACTOR,
};
pub use geometry::{obb_intersects, OrientedBox, Point, RigidTransform};
pub use guidance::{
    primary_target,
    overlay_transform, score_at, score_to_color, score_to_hue, sector_field, transparent_models,
    GuidanceConfig, Rgb, Sector, UnknownPosition,
};
pub use optimizer::{
    collision_cost, collision_cost_gradient, conditional_gradient, optimize_ocp,
    out_of_space_cost, out_of_space_cost_gradient, recommendation_field, GradientBranch,
    OcpSolver, OptimizerParams, ScoredSample,
};
pub use oracle::{brute_force_ocp, BruteForceOracle};
pub use sampler::{
    candidate_set, grid_samples, is_feasible, visibility_ok, SampleGrid, SamplerParams,
    VisibilityMode, VISIBILITY_HALF_RANGE,
};
pub use scene::{
    endpoints, footprint, in_room, BodyParams, ObjectKind, Placement, RoomScene, ScenePair,
    SceneObject, TargetSet,
};
