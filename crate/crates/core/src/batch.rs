//! Batch selection without refitting: penalised acquisition and a
//! Kriging-believer baseline.
//!
//! Both strategies pick a batch one point at a time from surrogates that
//! stay fixed for the whole batch. The penalised strategy multiplies the
//! acquisition surface by a warped objective-space distance to each point
//! already chosen — candidates whose *predicted objectives* sit on top of
//! an earlier selection are annihilated, far-away candidates are left
//! almost untouched — so later selections spread across the predicted
//! trade-off surface. The Kriging believer instead pretends each selection
//! has already been observed at its posterior mean and conditions the
//! models on that fantasy, which is considerably more expensive per point.

use crate::acquisition::{self, AcquisitionContext, AcquisitionError};
use crate::optimise::{self, OptimiseError, SearchSpace};
use crate::pareto::{self, DesignPoint, ObjectiveVector, ParetoError, ParetoFront};
use crate::sampling::derive_seed;
use crate::surrogate::{GpModel, Posterior, SurrogateError, VARIANCE_FLOOR};
use thiserror::Error;

/// Floor applied to logarithms of acquisition values and penalty factors,
/// keeping the selection objective finite on plateaus where either
/// underflows to zero.
pub const LOG_ACQUISITION_FLOOR: f64 = -1e8;

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("batch size must be at least one")]
    EmptyBatch,
    #[error("penalty state already holds all {capacity} selections of the batch")]
    PenaltyCapacity { capacity: usize },
    #[error("warp inputs are distances and must be non-negative, got {0}")]
    NegativeWarpInput(f64),
    #[error("expected posteriors for {expected} objectives, got {got}")]
    ObjectiveCountMismatch { expected: usize, got: usize },
    #[error("selecting batch point {step} failed")]
    Selection {
        step: usize,
        #[source]
        source: OptimiseError,
    },
    #[error(transparent)]
    Acquisition(#[from] AcquisitionError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
}

/// Monotone map from objective-space distance to a penalty factor in
/// [0, 1]: 0 at zero distance (a repeated prediction is worthless) rising
/// towards 1 (far-away candidates keep their acquisition value). The limit
/// is never reached mathematically but saturates to exactly 1.0 in
/// floating point at extreme distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WarpFunction {
    /// (2/π)·arctan(d) — exactly ½ at unit distance, with a heavy tail
    /// that keeps moderately distant candidates mildly discouraged.
    #[default]
    ScaledArctan,
    /// tanh(d) — saturates faster, penalising only close candidates.
    Tanh,
}

impl WarpFunction {
    /// Applies the warp to a distance.
    ///
    /// # Errors
    ///
    /// Rejects negative (or NaN) inputs: distances cannot be negative, so
    /// such a value indicates a broken caller.
    pub fn apply(self, distance: f64) -> Result<f64, BatchError> {
        if !(distance >= 0.0) {
            return Err(BatchError::NegativeWarpInput(distance));
        }
        Ok(match self {
            WarpFunction::ScaledArctan => std::f64::consts::FRAC_2_PI * distance.atan(),
            WarpFunction::Tanh => distance.tanh(),
        })
    }
}

/// Objective-space distance between a candidate and one frozen selection,
/// on the standardised objective scale: the squared mean differences are
/// scaled by the *selection's* posterior variance per objective, so the
/// distance is asymmetric — uncertainty around the already-chosen point
/// widens its exclusion zone's metric, not the candidate's.
pub fn mahalanobis_distance(
    candidate: &[Posterior],
    frozen: &[Posterior],
) -> Result<f64, BatchError> {
    if candidate.len() != frozen.len() {
        return Err(BatchError::ObjectiveCountMismatch {
            expected: frozen.len(),
            got: candidate.len(),
        });
    }
    let mut sum = 0.0;
    for (c, f) in candidate.iter().zip(frozen) {
        let delta = c.mean - f.mean;
        sum += delta * delta / f.variance.max(VARIANCE_FLOOR);
    }
    Ok(sum.sqrt())
}

/// The frozen per-objective posteriors of the points already chosen within
/// the current batch. Posteriors are captured at selection time and never
/// updated afterwards, which is what makes penalised selection cheap: no
/// model is touched between batch points.
#[derive(Debug, Clone)]
pub struct PenaltyState {
    warp: WarpFunction,
    capacity: usize,
    frozen: Vec<Vec<Posterior>>,
}

impl PenaltyState {
    /// State for assembling one batch; at most `batch_size − 1` selections
    /// are ever frozen because the final point penalises nobody.
    pub fn new(warp: WarpFunction, batch_size: usize) -> Result<Self, BatchError> {
        if batch_size == 0 {
            return Err(BatchError::EmptyBatch);
        }
        Ok(PenaltyState {
            warp,
            capacity: batch_size - 1,
            frozen: Vec::new(),
        })
    }

    /// Freezes the standardised-scale posteriors of a newly selected point.
    pub fn push(&mut self, posteriors: Vec<Posterior>) -> Result<(), BatchError> {
        if self.frozen.len() >= self.capacity {
            return Err(BatchError::PenaltyCapacity {
                capacity: self.capacity,
            });
        }
        if let Some(first) = self.frozen.first() {
            if posteriors.len() != first.len() {
                return Err(BatchError::ObjectiveCountMismatch {
                    expected: first.len(),
                    got: posteriors.len(),
                });
            }
        }
        self.frozen.push(posteriors);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    pub fn warp(&self) -> WarpFunction {
        self.warp
    }

    /// Product of warped distances to every frozen selection; 1 when
    /// nothing is frozen yet.
    pub fn penalty(&self, candidate: &[Posterior]) -> Result<f64, BatchError> {
        let mut product = 1.0;
        for frozen in &self.frozen {
            product *= self
                .warp
                .apply(mahalanobis_distance(candidate, frozen)?)?;
        }
        Ok(product)
    }

    /// Sum of log penalty factors, each floored at
    /// [`LOG_ACQUISITION_FLOOR`] so an exact collision stays finite.
    pub fn log_penalty(&self, candidate: &[Posterior]) -> Result<f64, BatchError> {
        let mut sum = 0.0;
        for frozen in &self.frozen {
            let w = self
                .warp
                .apply(mahalanobis_distance(candidate, frozen)?)?;
            sum += log_floored(w);
        }
        Ok(sum)
    }
}

/// Acquisition value damped by the penalties of all frozen selections.
pub fn penalised_acquisition(
    base: f64,
    state: &PenaltyState,
    candidate: &[Posterior],
) -> Result<f64, BatchError> {
    Ok(base * state.penalty(candidate)?)
}

fn log_floored(value: f64) -> f64 {
    if value > 0.0 {
        value.ln().max(LOG_ACQUISITION_FLOOR)
    } else {
        LOG_ACQUISITION_FLOOR
    }
}

/// Knobs shared by the batch builders.
#[derive(Debug, Clone, Copy)]
pub struct BatchSettings {
    pub batch_size: usize,
    /// Space-filling samples given to the inner acquisition maximiser.
    pub sample_budget: usize,
    /// Compass-refinement restarts of the inner maximiser.
    pub restarts: usize,
    pub warp: WarpFunction,
    /// Seed for this batch; per-point selection streams are derived from
    /// it identically across strategies, so two strategies that share a
    /// seed make bitwise-identical first selections.
    pub seed: u64,
}

/// Stream used for the acquisition context's posterior-sample draws.
const MC_STREAM: u64 = 0;

fn selection_seed(seed: u64, step: usize) -> u64 {
    derive_seed(seed, 1 + step as u64)
}

fn standardised_posteriors(
    models: &[GpModel],
    x: &DesignPoint,
) -> Result<Vec<Posterior>, SurrogateError> {
    models.iter().map(|m| m.predict_standardised(x)).collect()
}

/// Selects a batch by sequentially maximising the log acquisition plus the
/// log penalties of earlier selections. The surrogates are never refit or
/// conditioned inside the batch, so each selection costs one acquisition
/// maximisation regardless of batch size.
pub fn build_hippo_batch(
    models: &[GpModel],
    front: ParetoFront,
    ref_point: ObjectiveVector,
    space: &SearchSpace,
    settings: &BatchSettings,
) -> Result<Vec<DesignPoint>, BatchError> {
    if settings.batch_size == 0 {
        return Err(BatchError::EmptyBatch);
    }
    let ctx = AcquisitionContext::with_mc_settings(
        models,
        front,
        ref_point,
        acquisition::DEFAULT_MC_SAMPLES,
        derive_seed(settings.seed, MC_STREAM),
    )?;
    let mut state = PenaltyState::new(settings.warp, settings.batch_size)?;
    let mut batch = Vec::with_capacity(settings.batch_size);
    for step in 0..settings.batch_size {
        let objective = |x: &DesignPoint| -> Result<f64, optimise::ObjectiveError> {
            // One kernel solve per model serves both scales: the penalty
            // wants the standardised posteriors, EHVI the target-scale ones.
            let internal = standardised_posteriors(models, x)?;
            let natural: Vec<Posterior> = models
                .iter()
                .zip(&internal)
                .map(|(m, p)| m.to_output_scale(p))
                .collect();
            let base = acquisition::ehvi_from_posteriors(&ctx, &natural)?;
            let penalty = if state.is_empty() {
                0.0
            } else {
                state.log_penalty(&internal)?
            };
            Ok(log_floored(base) + penalty)
        };
        let (point, _) = optimise::maximise(
            objective,
            space,
            settings.sample_budget,
            settings.restarts,
            selection_seed(settings.seed, step),
        )
        .map_err(|source| BatchError::Selection { step, source })?;
        if step + 1 < settings.batch_size {
            state.push(standardised_posteriors(models, &point)?)?;
        }
        batch.push(point);
    }
    Ok(batch)
}

/// Selects a batch with the Kriging-believer strategy: after each
/// selection, every objective model is conditioned on a fantasy
/// observation at its own posterior mean, and the fantasy objectives join
/// the working front (when they improve on the reference point). Each step
/// therefore pays for conditioning and works with ever-larger models.
pub fn build_kb_batch(
    models: &[GpModel],
    front: ParetoFront,
    ref_point: ObjectiveVector,
    space: &SearchSpace,
    settings: &BatchSettings,
) -> Result<Vec<DesignPoint>, BatchError> {
    if settings.batch_size == 0 {
        return Err(BatchError::EmptyBatch);
    }
    let mut working_models: Vec<GpModel> = models.to_vec();
    let mut working_front = front;
    let mut batch = Vec::with_capacity(settings.batch_size);
    for step in 0..settings.batch_size {
        let ctx = AcquisitionContext::with_mc_settings(
            &working_models,
            working_front.clone(),
            ref_point.clone(),
            acquisition::DEFAULT_MC_SAMPLES,
            derive_seed(settings.seed, MC_STREAM),
        )?;
        let objective = |x: &DesignPoint| -> Result<f64, optimise::ObjectiveError> {
            Ok(log_floored(acquisition::ehvi(&ctx, x)?))
        };
        let (point, _) = optimise::maximise(
            objective,
            space,
            settings.sample_budget,
            settings.restarts,
            selection_seed(settings.seed, step),
        )
        .map_err(|source| BatchError::Selection { step, source })?;
        drop(ctx);

        if step + 1 < settings.batch_size {
            let fantasy: Vec<f64> = working_models
                .iter()
                .map(|m| m.predict(&point).map(|p| p.mean))
                .collect::<Result<_, _>>()?;
            working_models = working_models
                .iter()
                .map(|m| m.condition_on_fake(&point))
                .collect::<Result<_, _>>()?;
            let fantasy = ObjectiveVector::new(fantasy)?;
            if pareto::dominates(&fantasy, &ref_point)? {
                let mut members = working_front.members().to_vec();
                members.push(fantasy);
                let observations = members;
                working_front = pareto::extract_front(&observations)?;
            } else {
                log::debug!(
                    "fantasy objectives {:?} fall outside the reference box; front unchanged",
                    fantasy.values()
                );
            }
        }
        batch.push(point);
    }
    Ok(batch)
}
