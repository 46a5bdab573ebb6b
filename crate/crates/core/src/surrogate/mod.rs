//! Gaussian-process regression for one objective at a time.
//!
//! Each surrogate is an independent GP with a constant mean function and a
//! Matérn 5/2 ARD covariance, trained on inputs the caller has normalised to
//! the unit box. [`GpModel::fit`] standardises its targets to zero mean and
//! unit variance internally and undoes that transform on prediction, so
//! posterior means and variances come back in the original objective units;
//! [`GpModel::predict_standardised`] exposes the internal scale, which is
//! what objective-space penalty distances are measured on.
//!
//! The covariance matrix is factorised once per model (Cholesky with an
//! escalating jitter ladder); predictions reuse the cached factor. Fantasy
//! conditioning for greedy batch heuristics appends a pseudo-observation at
//! the current posterior mean without touching the hyperparameters.

mod fit;
mod kernel;

pub use fit::{FitConfig, NoiseModel};
pub use kernel::{KernelHyperparams, DEFAULT_NOISE_VARIANCE, MIN_NOISE_VARIANCE};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::pareto::DesignPoint;

/// Posterior variances are clamped to at least this value so downstream
/// ratios (penalty distances, improvement integrals) never divide by zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Relative jitter ladder tried when the covariance factorisation fails;
/// multiples of the mean covariance diagonal.
const JITTER_LADDER: [f64; 6] = [0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4];

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("need at least 2 training points, got {0}")]
    TooFewPoints(usize),
    #[error("inputs and targets differ in length: {inputs} vs {targets}")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("input dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("target {index} is not finite")]
    NonFiniteTarget { index: usize },
    #[error("invalid hyperparameters: {reason}")]
    InvalidHyperparams { reason: &'static str },
    #[error("covariance matrix is not positive definite even at maximal jitter")]
    NotPositiveDefinite,
    #[error("fit needs at least one restart")]
    NoRestarts,
}

/// Gaussian posterior of one objective at one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub mean: f64,
    /// Latent-function variance (observation noise excluded), clamped to
    /// [`VARIANCE_FLOOR`].
    pub variance: f64,
}

/// A fitted Gaussian-process surrogate for a single objective.
#[derive(Debug, Clone)]
pub struct GpModel {
    /// Hyperparameters on the internal (training) scale.
    hp: KernelHyperparams,
    /// Training inputs, caller-normalised.
    x: Vec<Vec<f64>>,
    /// Training targets on the internal scale.
    y: DVector<f64>,
    /// Lower Cholesky factor of K + (noise + jitter) I.
    chol_l: DMatrix<f64>,
    /// (K + (noise + jitter) I)^{-1} (y − c·1).
    alpha: DVector<f64>,
    /// Output transform: raw = shift + scale · internal.
    y_shift: f64,
    y_scale: f64,
}

/// Gradient of the log marginal likelihood. Positive hyperparameters are
/// differentiated in log space; the constant mean in its natural space.
#[derive(Debug, Clone, PartialEq)]
pub struct LmlGradient {
    pub log_lengthscales: Vec<f64>,
    pub log_signal_variance: f64,
    pub log_noise_variance: f64,
    pub constant_mean: f64,
}

impl GpModel {
    /// Builds a model with explicit hyperparameters and no output transform:
    /// targets are used exactly as given. This is the entry point for
    /// likelihood surface exploration; [`GpModel::fit`] is the entry point
    /// for actually training a surrogate.
    pub fn from_hyperparams(
        inputs: &[DesignPoint],
        targets: &[f64],
        hp: KernelHyperparams,
    ) -> Result<Self, SurrogateError> {
        let x = validate_training_data(inputs, targets, hp.input_dim())?;
        let y = DVector::from_column_slice(targets);
        Self::assemble(hp, x, y, 0.0, 1.0)
    }

    /// Fits hyperparameters by multi-start gradient ascent on the log
    /// marginal likelihood; see [`FitConfig`] for the knobs. Deterministic
    /// for a fixed config.
    pub fn fit(
        inputs: &[DesignPoint],
        targets: &[f64],
        config: &FitConfig,
    ) -> Result<Self, SurrogateError> {
        fit::fit(inputs, targets, config)
    }

    /// Shared assembly: factorises the covariance (escalating jitter) and
    /// caches the weight vector.
    pub(crate) fn assemble(
        hp: KernelHyperparams,
        x: Vec<Vec<f64>>,
        y: DVector<f64>,
        y_shift: f64,
        y_scale: f64,
    ) -> Result<Self, SurrogateError> {
        let n = x.len();
        let mut k = DMatrix::from_fn(n, n, |i, j| hp.covariance(&x[i], &x[j]));
        let mean_diag = hp.signal_variance() + hp.noise_variance();
        for i in 0..n {
            k[(i, i)] += hp.noise_variance();
        }
        let mut factor = None;
        let mut used_jitter = 0.0;
        for &rel in &JITTER_LADDER {
            let jitter = rel * mean_diag;
            let mut attempt = k.clone();
            for i in 0..n {
                attempt[(i, i)] += jitter;
            }
            if let Some(chol) = attempt.cholesky() {
                factor = Some(chol);
                used_jitter = jitter;
                break;
            }
        }
        let chol = factor.ok_or(SurrogateError::NotPositiveDefinite)?;
        if used_jitter > 0.0 {
            log::debug!("covariance factorisation needed jitter {used_jitter:.3e}");
        }
        let centred = DVector::from_fn(n, |i, _| y[i] - hp.constant_mean());
        let alpha = chol.solve(&centred);
        Ok(Self {
            hp,
            x,
            y,
            chol_l: chol.unpack(),
            alpha,
            y_shift,
            y_scale,
        })
    }

    /// Hyperparameters in the units of the targets the model was given
    /// (the internal standardisation of [`GpModel::fit`] is undone).
    pub fn hyperparams(&self) -> KernelHyperparams {
        let s2 = self.y_scale * self.y_scale;
        KernelHyperparams::new(
            self.hp.lengthscales().to_vec(),
            self.hp.signal_variance() * s2,
            (self.hp.noise_variance() * s2).max(MIN_NOISE_VARIANCE),
            self.y_shift + self.y_scale * self.hp.constant_mean(),
        )
        .expect("rescaling preserves hyperparameter validity")
    }

    /// Shift and scale applied to the targets at fit time
    /// (`raw = shift + scale · internal`).
    pub fn output_transform(&self) -> (f64, f64) {
        (self.y_shift, self.y_scale)
    }

    pub fn training_len(&self) -> usize {
        self.x.len()
    }

    pub fn input_dim(&self) -> usize {
        self.hp.input_dim()
    }

    fn check_input(&self, x: &DesignPoint) -> Result<(), SurrogateError> {
        if x.len() != self.input_dim() {
            return Err(SurrogateError::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn posterior_internal(&self, x: &[f64]) -> Posterior {
        let n = self.x.len();
        let kstar = DVector::from_fn(n, |i, _| self.hp.covariance(&self.x[i], x));
        let mean = self.hp.constant_mean() + kstar.dot(&self.alpha);
        let v = self
            .chol_l
            .solve_lower_triangular(&kstar)
            .expect("Cholesky factor has positive diagonal");
        let variance = (self.hp.signal_variance() - v.norm_squared()).max(VARIANCE_FLOOR);
        Posterior { mean, variance }
    }

    /// Posterior of the latent objective at `x`, in the units of the targets
    /// the model was given.
    pub fn predict(&self, x: &DesignPoint) -> Result<Posterior, SurrogateError> {
        self.check_input(x)?;
        Ok(self.to_output_scale(&self.posterior_internal(x.coords())))
    }

    /// Maps an internal-scale posterior (from
    /// [`GpModel::predict_standardised`]) to target units. Bit-for-bit the
    /// same result as [`GpModel::predict`] at the same point, so callers
    /// needing both scales can pay for the kernel solve once.
    pub fn to_output_scale(&self, internal: &Posterior) -> Posterior {
        let s2 = self.y_scale * self.y_scale;
        Posterior {
            mean: self.y_shift + self.y_scale * internal.mean,
            variance: (internal.variance * s2).max(VARIANCE_FLOOR),
        }
    }

    /// Posterior on the internal standardised scale (zero-mean, unit-variance
    /// targets when the model came from [`GpModel::fit`]). Objective-space
    /// penalty distances are computed on this scale so that objectives with
    /// different magnitudes contribute comparably.
    pub fn predict_standardised(&self, x: &DesignPoint) -> Result<Posterior, SurrogateError> {
        self.check_input(x)?;
        Ok(self.posterior_internal(x.coords()))
    }

    /// Log marginal likelihood of the stored training targets under the
    /// stored hyperparameters, together with its gradient. The value refers
    /// to the internal training scale (standardised targets for fitted
    /// models); gradients of the positive hyperparameters are taken in log
    /// space, the constant-mean gradient in its natural space.
    pub fn log_marginal_likelihood(&self) -> (f64, LmlGradient) {
        let n = self.x.len();
        let nf = n as f64;
        let centred = DVector::from_fn(n, |i, _| self.y[i] - self.hp.constant_mean());
        let log_det_half: f64 = (0..n).map(|i| self.chol_l[(i, i)].ln()).sum();
        let value = -0.5 * centred.dot(&self.alpha)
            - log_det_half
            - 0.5 * nf * (2.0 * std::f64::consts::PI).ln();

        // ∂L/∂θ = ½ tr((α αᵀ − K⁻¹) ∂K/∂θ); assemble A = α αᵀ − K⁻¹ once.
        let k_inv = {
            let identity = DMatrix::identity(n, n);
            let lower = self
                .chol_l
                .solve_lower_triangular(&identity)
                .expect("Cholesky factor has positive diagonal");
            self.chol_l
                .transpose()
                .solve_upper_triangular(&lower)
                .expect("Cholesky factor has positive diagonal")
        };
        let a = &self.alpha * self.alpha.transpose() - k_inv;

        let dim = self.hp.input_dim();
        let ls = self.hp.lengthscales();
        let mut grad_ls = vec![0.0; dim];
        let mut grad_signal = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = a[(i, j)];
                let r = self.hp.scaled_distance(&self.x[i], &self.x[j]);
                // ∂K/∂ln σ_f² is the signal covariance itself.
                grad_signal +=
                    w * self.hp.signal_variance() * kernel::matern52_profile(r);
                let factor =
                    self.hp.signal_variance() * kernel::matern52_log_lengthscale_factor(r);
                for d in 0..dim {
                    let delta = self.x[i][d] - self.x[j][d];
                    grad_ls[d] += w * factor * delta * delta / (ls[d] * ls[d]);
                }
            }
        }
        let trace_a: f64 = (0..n).map(|i| a[(i, i)]).sum();
        let gradient = LmlGradient {
            log_lengthscales: grad_ls.iter().map(|g| 0.5 * g).collect(),
            log_signal_variance: 0.5 * grad_signal,
            log_noise_variance: 0.5 * self.hp.noise_variance() * trace_a,
            constant_mean: self.alpha.sum(),
        };
        (value, gradient)
    }

    /// Returns a new model conditioned on a fantasy observation at `x` equal
    /// to the current posterior mean there. Hyperparameters and the output
    /// transform are reused unchanged; only the factorisation is rebuilt.
    /// This is the Kriging-believer update: it collapses predictive variance
    /// near `x` without inventing information about the objective's level.
    pub fn condition_on_fake(&self, x: &DesignPoint) -> Result<GpModel, SurrogateError> {
        self.check_input(x)?;
        let fake = self.posterior_internal(x.coords()).mean;
        let mut x_new = self.x.clone();
        x_new.push(x.coords().to_vec());
        let mut y_new = self.y.as_slice().to_vec();
        y_new.push(fake);
        Self::assemble(
            self.hp.clone(),
            x_new,
            DVector::from_vec(y_new),
            self.y_shift,
            self.y_scale,
        )
    }
}

fn validate_training_data(
    inputs: &[DesignPoint],
    targets: &[f64],
    expected_dim: usize,
) -> Result<Vec<Vec<f64>>, SurrogateError> {
    if inputs.len() != targets.len() {
        return Err(SurrogateError::LengthMismatch {
            inputs: inputs.len(),
            targets: targets.len(),
        });
    }
    if inputs.len() < 2 {
        return Err(SurrogateError::TooFewPoints(inputs.len()));
    }
    if let Some(index) = targets.iter().position(|t| !t.is_finite()) {
        return Err(SurrogateError::NonFiniteTarget { index });
    }
    let mut x = Vec::with_capacity(inputs.len());
    for p in inputs {
        if p.len() != expected_dim {
            return Err(SurrogateError::DimensionMismatch {
                expected: expected_dim,
                got: p.len(),
            });
        }
        x.push(p.coords().to_vec());
    }
    Ok(x)
}
