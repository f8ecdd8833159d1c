//! Multi-threaded recommendation field.

use std::sync::atomic::{AtomicUsize, Ordering};

use avaplace_core::{candidate_set, OcpSolver, OptimizerParams, SampleGrid, ScenePair, ScoredSample, TargetSet, VisibilityMode};
use rayon::prelude::*;

/// Same output as `avaplace_core::recommendation_field`, one candidate per
/// rayon task. `progress` counts finished candidates.
pub fn recommendation_field(
    pair: &ScenePair,
    targets: &TargetSet,
    grid: &SampleGrid,
    visibility: VisibilityMode,
    params: &OptimizerParams,
    progress: Option<&AtomicUsize>,
) -> Vec<ScoredSample> {
    let candidates = candidate_set(&pair.local, targets.local(), grid, &pair.body, visibility);
    let solver = OcpSolver::new(pair, targets.clone(), *params);
    candidates
        .par_iter()
        .map(|q| {
            let s = solver.score_sample(q).ok();
            if let Some(p) = progress {
                p.fetch_add(1, Ordering::Relaxed);
            }
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
