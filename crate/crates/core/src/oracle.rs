//! Exhaustive reference search for the OCP over a dense remote grid.
//!
//! Used to check the descent optimizer: it shares only the objective (feature
//! and similarity) and the feasibility predicate with it.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{OcpError, StepError};
use crate::feature::{feature_angles, kernel, squared_distance};
use crate::optimizer::ScoredSample;
use crate::sampler::{grid_samples, is_feasible};
use crate::scene::{Placement, ScenePair, TargetSet};

pub const DEFAULT_POSITION_STEP: f64 = 0.05;
pub const DEFAULT_ANGLE_STEP: f64 = PI / 36.0;

/// Dense feasible remote placements with their features, reusable across
/// local queries.
#[derive(Debug, Clone)]
pub struct BruteForceOracle<'a> {
    pair: &'a ScenePair,
    targets: TargetSet,
    placements: Vec<Placement>,
    features: Vec<[f64; 4]>,
    position_step: f64,
    angle_step: f64,
}

impl<'a> BruteForceOracle<'a> {
    pub fn new(
        pair: &'a ScenePair,
        targets: TargetSet,
        position_step: f64,
        angle_step: f64,
    ) -> Result<Self, StepError> {
        let grid = grid_samples(&pair.remote, position_step, angle_step)?;
        let mut placements = Vec::new();
        let mut features = Vec::new();
        let mut buf = Vec::new();
        for q in grid.samples {
            if is_feasible(&q, &pair.remote, &pair.body)
                && feature_angles(&q, targets.remote(), &pair.body, &mut buf).is_ok()
            {
                placements.push(q);
                features.extend_from_slice(&buf);
            }
        }
        Ok(BruteForceOracle {
            pair,
            targets,
            placements,
            features,
            position_step,
            angle_step,
        })
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn position_step(&self) -> f64 {
        self.position_step
    }

    pub fn angle_step(&self) -> f64 {
        self.angle_step
    }

    /// Remote placements in grid order.
    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    /// Similarity of every dense placement to `local`, in grid order.
    pub fn scores(&self, local: &Placement) -> Result<Vec<f64>, OcpError> {
        let mut lf = Vec::new();
        feature_angles(local, self.targets.local(), &self.pair.body, &mut lf)
            .map_err(|_| OcpError::InfeasibleLocal)?;
        Ok(self
            .features
            .chunks_exact(self.targets.len())
            .map(|f| kernel(squared_distance(&lf, f)))
            .collect())
    }

    /// Argmax over the dense grid; ties resolve to the first placement in grid order.
    pub fn best(&self, local: &Placement) -> Result<ScoredSample, OcpError> {
        let scores = self.scores(local)?;
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in scores.into_iter().enumerate() {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        let (i, score) = best.ok_or(OcpError::InfeasibleRemote)?;
        Ok(ScoredSample {
            local: *local,
            ocp: Some(self.placements[i]),
            score,
        })
    }
}

pub fn brute_force_ocp<S: AsRef<str>>(
    local: &Placement,
    pair: &ScenePair,
    targets: &[S],
    position_step: f64,
    angle_step: f64,
) -> Result<ScoredSample, OcpError> {
    let targets = TargetSet::resolve(pair, targets)?;
    let oracle = BruteForceOracle::new(pair, targets, position_step, angle_step)
        .map_err(|_| OcpError::InfeasibleRemote)?;
    oracle.best(local)
}
