//! Expected hypervolume improvement (EHVI) acquisition for minimisation.
//!
//! The bi-objective case is evaluated in closed form by decomposing the
//! region between the Pareto front and the reference point into vertical
//! strips, so a single evaluation costs O(m) in the front size. Higher
//! objective counts fall back to quasi-Monte-Carlo estimation over
//! posterior samples. Feasibility-weighted variants multiply EHVI by the
//! probability that independently modelled black-box constraints hold.

use crate::pareto::{self, DesignPoint, ObjectiveVector, ParetoFront};
use crate::sampling;
use crate::surrogate::{GpModel, Posterior, SurrogateError};
use statrs::function::erf::{erfc, erfc_inv};
use thiserror::Error;

/// Default number of posterior draws for the quasi-Monte-Carlo estimator
/// used when there are more than two objectives.
pub const DEFAULT_MC_SAMPLES: usize = 512;

/// Uniform box samples per evaluation for four or more objectives, where
/// per-draw improvements must themselves be estimated by Monte Carlo.
const BOX_SAMPLES: usize = 4096;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Error)]
pub enum AcquisitionError {
    #[error("got {models} objective models for a {objectives}-dimensional reference point")]
    ModelCountMismatch { models: usize, objectives: usize },
    #[error("expected at least two objectives, got {0}")]
    TooFewObjectives(usize),
    #[error("front member {index} does not dominate the reference point")]
    RefPointNotDominated { index: usize },
    #[error("objective model {index} expects {expected}-dimensional inputs, others expect {first}")]
    ModelInputMismatch {
        index: usize,
        expected: usize,
        first: usize,
    },
    #[error("constraint threshold must be finite, got {0}")]
    NonFiniteThreshold(f64),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Pareto(#[from] pareto::ParetoError),
}

fn std_normal_pdf(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Standard normal CDF via the complementary error function, which keeps
/// full relative accuracy deep in the lower tail.
fn std_normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / SQRT_2)
}

/// Standard normal quantile, used to warp low-discrepancy points into
/// Gaussian draws.
fn std_normal_inv_cdf(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Antiderivative of the standard normal CDF: Λ(t) = t·Φ(t) + φ(t), with
/// Λ(t) → 0 as t → −∞ and Λ(t) → t as t → +∞. The expected shortfall of a
/// unit Gaussian below a level t is exactly Λ(t).
fn big_lambda(t: f64) -> f64 {
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    t * std_normal_cdf(t) + std_normal_pdf(t)
}

/// Vertical-strip decomposition of the region between a bi-objective front
/// and the reference point, precomputed once per front.
///
/// `bounds` holds the f1 strip edges −∞ = c₀ < c₁ < … < cₘ < c_{m+1} = r₁
/// (the cᵢ are the sorted member f1 values) and `heights[j]` is the f2
/// level below which a point lying in strip j is not dominated by the
/// front: r₂ left of every member, then each member's f2 in turn.
#[derive(Debug, Clone)]
struct Strips {
    bounds: Vec<f64>,
    heights: Vec<f64>,
}

impl Strips {
    fn new(front: &ParetoFront, ref_point: &ObjectiveVector) -> Self {
        let mut members: Vec<&[f64]> = front.members().iter().map(|m| m.values()).collect();
        members.sort_by(|a, b| a[0].partial_cmp(&b[0]).expect("finite objectives"));
        let mut bounds = Vec::with_capacity(members.len() + 2);
        let mut heights = Vec::with_capacity(members.len() + 1);
        bounds.push(f64::NEG_INFINITY);
        heights.push(ref_point.values()[1]);
        for m in &members {
            bounds.push(m[0]);
            heights.push(m[1]);
        }
        bounds.push(ref_point.values()[0]);
        Strips { bounds, heights }
    }
}

#[derive(Debug, Clone)]
enum Estimator {
    /// Closed-form bi-objective evaluation.
    Exact2d(Strips),
    /// Per-draw exact improvement for three objectives.
    Mc3d { normals: Vec<f64>, hv_front: f64 },
    /// Joint draw/box-sample estimator for four or more objectives.
    McBox { normals: Vec<f64>, box_seed: u64 },
}

/// Everything EHVI needs that is fixed while one batch is being assembled:
/// fitted objective models, the current Pareto front, and the reference
/// point the hypervolume is measured against.
#[derive(Debug)]
pub struct AcquisitionContext<'a> {
    models: &'a [GpModel],
    front: ParetoFront,
    ref_point: ObjectiveVector,
    mc_samples: usize,
    estimator: Estimator,
}

impl<'a> AcquisitionContext<'a> {
    /// Builds a context with the default Monte-Carlo settings (only used
    /// when there are more than two objectives).
    pub fn new(
        models: &'a [GpModel],
        front: ParetoFront,
        ref_point: ObjectiveVector,
    ) -> Result<Self, AcquisitionError> {
        Self::with_mc_settings(models, front, ref_point, DEFAULT_MC_SAMPLES, 0)
    }

    /// Builds a context with an explicit posterior sample count and seed
    /// for the quasi-Monte-Carlo estimator.
    ///
    /// # Errors
    ///
    /// Fails when fewer than two objectives are described, the model count
    /// disagrees with the reference point dimension, the models expect
    /// inconsistent input dimensions, or any front member fails to
    /// dominate the reference point.
    pub fn with_mc_settings(
        models: &'a [GpModel],
        front: ParetoFront,
        ref_point: ObjectiveVector,
        mc_samples: usize,
        mc_seed: u64,
    ) -> Result<Self, AcquisitionError> {
        let k = ref_point.len();
        if k < 2 {
            return Err(AcquisitionError::TooFewObjectives(k));
        }
        if models.len() != k {
            return Err(AcquisitionError::ModelCountMismatch {
                models: models.len(),
                objectives: k,
            });
        }
        let first = models[0].input_dim();
        for (index, model) in models.iter().enumerate() {
            if model.input_dim() != first {
                return Err(AcquisitionError::ModelInputMismatch {
                    index,
                    expected: model.input_dim(),
                    first,
                });
            }
        }
        for (index, member) in front.members().iter().enumerate() {
            if !pareto::dominates(member, &ref_point)? {
                return Err(AcquisitionError::RefPointNotDominated { index });
            }
        }
        assert!(mc_samples > 0, "need at least one posterior sample");

        let estimator = match k {
            2 => Estimator::Exact2d(Strips::new(&front, &ref_point)),
            3 => Estimator::Mc3d {
                normals: quasi_normals(mc_samples, k, mc_seed),
                hv_front: {
                    let members: Vec<&[f64]> =
                        front.members().iter().map(|m| m.values()).collect();
                    pareto::hv_points(&members, ref_point.values())
                },
            },
            _ => Estimator::McBox {
                normals: quasi_normals(mc_samples, k, mc_seed),
                box_seed: sampling::derive_seed(mc_seed, 1),
            },
        };
        Ok(AcquisitionContext {
            models,
            front,
            ref_point,
            mc_samples,
            estimator,
        })
    }

    pub fn models(&self) -> &[GpModel] {
        self.models
    }

    pub fn front(&self) -> &ParetoFront {
        &self.front
    }

    pub fn ref_point(&self) -> &ObjectiveVector {
        &self.ref_point
    }

    pub fn objective_count(&self) -> usize {
        self.ref_point.len()
    }

    /// Posterior mean and variance of every objective model at `x`.
    pub fn posteriors(&self, x: &DesignPoint) -> Result<Vec<Posterior>, AcquisitionError> {
        self.models
            .iter()
            .map(|m| m.predict(x).map_err(AcquisitionError::from))
            .collect()
    }
}

/// Fixed-sample standard-normal draws: a scrambled low-discrepancy sequence
/// pushed through the normal quantile, stored row-major (draw s, dim d at
/// s·dims + d).
fn quasi_normals(samples: usize, dims: usize, seed: u64) -> Vec<f64> {
    sampling::unit_samples(samples, dims, seed)
        .into_iter()
        .flat_map(|row| row.into_iter().map(std_normal_inv_cdf))
        .collect()
}

/// Expected hypervolume improvement of sampling `x`, under the convention
/// that every objective is minimised. Non-negative; zero when the
/// posterior mass lies entirely in the region already dominated by the
/// front (or beyond the reference point).
pub fn ehvi(ctx: &AcquisitionContext, x: &DesignPoint) -> Result<f64, AcquisitionError> {
    let posteriors = ctx.posteriors(x)?;
    ehvi_from_posteriors(ctx, &posteriors)
}

/// [`ehvi`] evaluated from per-objective posteriors already in hand, so
/// callers that need the posteriors for their own purposes (batch
/// penalties, feasibility weighting, scoring grids) predict only once.
pub fn ehvi_from_posteriors(
    ctx: &AcquisitionContext,
    posteriors: &[Posterior],
) -> Result<f64, AcquisitionError> {
    if posteriors.len() != ctx.objective_count() {
        return Err(AcquisitionError::ModelCountMismatch {
            models: posteriors.len(),
            objectives: ctx.objective_count(),
        });
    }
    Ok(match &ctx.estimator {
        Estimator::Exact2d(strips) => exact_ehvi_2d(strips, posteriors),
        Estimator::Mc3d { normals, hv_front } => mc_ehvi_3d(ctx, normals, *hv_front, posteriors),
        Estimator::McBox { normals, box_seed } => mc_ehvi_box(ctx, normals, *box_seed, posteriors),
    })
}

/// Closed-form bi-objective EHVI.
///
/// With independent objective posteriors the improvement factorises per
/// strip: the expected newly dominated width in strip j is
/// σ₁·(Λ(t_{j+1}) − Λ(t_j)) with t = (c − μ₁)/σ₁ (a difference of expected
/// shortfalls, which is exactly the expectation of the clamped ramp
/// min(c_{j+1}, max(z₁, c_j)) capped at the strip), and the expected newly
/// dominated height below the attainment level u_j is σ₂·Λ((u_j − μ₂)/σ₂).
fn exact_ehvi_2d(strips: &Strips, posteriors: &[Posterior]) -> f64 {
    let (mu1, sigma1) = (posteriors[0].mean, posteriors[0].variance.sqrt());
    let (mu2, sigma2) = (posteriors[1].mean, posteriors[1].variance.sqrt());
    let mut total = 0.0;
    for j in 0..strips.heights.len() {
        let width = big_lambda((strips.bounds[j + 1] - mu1) / sigma1)
            - big_lambda((strips.bounds[j] - mu1) / sigma1);
        if width <= 0.0 {
            continue;
        }
        total += width * big_lambda((strips.heights[j] - mu2) / sigma2);
    }
    (sigma1 * sigma2 * total).max(0.0)
}

/// Monte-Carlo EHVI for three objectives: each posterior draw's
/// hypervolume improvement is computed exactly by slicing.
fn mc_ehvi_3d(
    ctx: &AcquisitionContext,
    normals: &[f64],
    hv_front: f64,
    posteriors: &[Posterior],
) -> f64 {
    let k = ctx.objective_count();
    let sigmas: Vec<f64> = posteriors.iter().map(|p| p.variance.sqrt()).collect();
    let members: Vec<&[f64]> = ctx.front.members().iter().map(|m| m.values()).collect();
    let mut draw = vec![0.0; k];
    let mut total = 0.0;
    for s in 0..ctx.mc_samples {
        for d in 0..k {
            draw[d] = posteriors[d].mean + sigmas[d] * normals[s * k + d];
        }
        let points: Vec<&[f64]> = members
            .iter()
            .copied()
            .chain(std::iter::once(draw.as_slice()))
            .collect();
        let hv_union = pareto::hv_points(&points, ctx.ref_point.values());
        total += (hv_union - hv_front).max(0.0);
    }
    total / ctx.mc_samples as f64
}

/// Monte-Carlo EHVI for four or more objectives.
///
/// Per-draw improvements have no cheap exact form, so the draw and volume
/// integrals are estimated jointly: with u uniform over the box spanned by
/// the reference point and the componentwise low corner of front ∪ draws,
/// EHVI = V_box · P(draw ⪯ u and no front member ⪯ u). Slower and noisier
/// than the dedicated low-dimensional paths; intended for completeness
/// rather than tight optimisation loops.
fn mc_ehvi_box(
    ctx: &AcquisitionContext,
    normals: &[f64],
    box_seed: u64,
    posteriors: &[Posterior],
) -> f64 {
    let k = ctx.objective_count();
    let samples = ctx.mc_samples;
    let sigmas: Vec<f64> = posteriors.iter().map(|p| p.variance.sqrt()).collect();
    let mut draws = vec![0.0; samples * k];
    for s in 0..samples {
        for d in 0..k {
            draws[s * k + d] = posteriors[d].mean + sigmas[d] * normals[s * k + d];
        }
    }

    let refv = ctx.ref_point.values();
    let mut low = vec![f64::INFINITY; k];
    for member in ctx.front.members() {
        for (l, v) in low.iter_mut().zip(member.values()) {
            *l = l.min(*v);
        }
    }
    for s in 0..samples {
        for d in 0..k {
            low[d] = low[d].min(draws[s * k + d]);
        }
    }
    let mut volume = 1.0;
    for d in 0..k {
        // Draws beyond the reference point cannot improve anything; the
        // box only needs to cover the dominated region inside it.
        low[d] = low[d].min(refv[d]);
        volume *= refv[d] - low[d];
    }
    if volume <= 0.0 || !volume.is_finite() {
        return 0.0;
    }

    let members: Vec<&[f64]> = ctx.front.members().iter().map(|m| m.values()).collect();
    let mut hits = 0u64;
    let mut point = vec![0.0; k];
    for u in sampling::unit_samples(BOX_SAMPLES, k, box_seed) {
        for d in 0..k {
            point[d] = low[d] + (refv[d] - low[d]) * u[d];
        }
        if members
            .iter()
            .any(|m| m.iter().zip(&point).all(|(mv, pv)| mv <= pv))
        {
            continue;
        }
        for s in 0..samples {
            let row = &draws[s * k..(s + 1) * k];
            if row.iter().zip(&point).all(|(dv, pv)| dv <= pv) {
                hits += 1;
            }
        }
    }
    volume * hits as f64 / (samples as f64 * BOX_SAMPLES as f64)
}

/// Which side of the threshold counts as feasible for a modelled
/// constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintDirection {
    /// Feasible when the constraint value is at most the threshold.
    LessEq,
    /// Feasible when the constraint value is at least the threshold.
    GreaterEq,
}

/// A black-box constraint modelled by its own surrogate, judged feasible
/// on one side of a threshold.
#[derive(Debug)]
pub struct ConstraintModel {
    model: GpModel,
    threshold: f64,
    direction: ConstraintDirection,
}

impl ConstraintModel {
    pub fn new(
        model: GpModel,
        threshold: f64,
        direction: ConstraintDirection,
    ) -> Result<Self, AcquisitionError> {
        if !threshold.is_finite() {
            return Err(AcquisitionError::NonFiniteThreshold(threshold));
        }
        Ok(ConstraintModel {
            model,
            threshold,
            direction,
        })
    }

    pub fn model(&self) -> &GpModel {
        &self.model
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn direction(&self) -> ConstraintDirection {
        self.direction
    }
}

/// Probability that the modelled constraint holds at `x` under its
/// Gaussian posterior: Φ((τ − μ)/σ) for a ≤ constraint, mirrored for ≥.
pub fn probability_of_feasibility(
    constraint: &ConstraintModel,
    x: &DesignPoint,
) -> Result<f64, AcquisitionError> {
    let posterior = constraint.model.predict(x)?;
    let t = (constraint.threshold - posterior.mean) / posterior.variance.sqrt();
    Ok(match constraint.direction {
        ConstraintDirection::LessEq => std_normal_cdf(t),
        ConstraintDirection::GreaterEq => std_normal_cdf(-t),
    })
}

/// EHVI weighted by the probability that every constraint holds,
/// constraints being modelled independently. With no constraints this is
/// exactly `ehvi`.
pub fn constrained_ehvi(
    ctx: &AcquisitionContext,
    constraints: &[ConstraintModel],
    x: &DesignPoint,
) -> Result<f64, AcquisitionError> {
    let mut value = ehvi(ctx, x)?;
    for constraint in constraints {
        value *= probability_of_feasibility(constraint, x)?;
    }
    Ok(value)
}
