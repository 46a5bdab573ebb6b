//! Matérn 5/2 covariance with per-dimension (ARD) lengthscales.

use super::SurrogateError;

/// Validation floor for the observation noise: values this small act as pure
/// numerical jitter rather than a noise model.
pub const MIN_NOISE_VARIANCE: f64 = 1e-12;

/// Default observation noise for noiseless benchmark objectives: large
/// enough to keep Cholesky factorisations stable, small enough that the
/// surrogate still interpolates tightly.
pub const DEFAULT_NOISE_VARIANCE: f64 = 1e-6;

const SQRT5: f64 = 2.23606797749978969;

/// Hyperparameters of one Gaussian-process surrogate: Matérn 5/2 covariance
/// with ARD lengthscales, plus a constant mean function.
///
/// Lengthscales live in the (caller-normalised) input units; the variances
/// and the constant mean live in the units of the targets the model was
/// given.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelHyperparams {
    lengthscales: Vec<f64>,
    signal_variance: f64,
    noise_variance: f64,
    constant_mean: f64,
}

impl KernelHyperparams {
    pub fn new(
        lengthscales: Vec<f64>,
        signal_variance: f64,
        noise_variance: f64,
        constant_mean: f64,
    ) -> Result<Self, SurrogateError> {
        if lengthscales.is_empty() {
            return Err(SurrogateError::InvalidHyperparams {
                reason: "at least one lengthscale is required",
            });
        }
        if !lengthscales.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(SurrogateError::InvalidHyperparams {
                reason: "lengthscales must be positive and finite",
            });
        }
        if !(signal_variance.is_finite() && signal_variance > 0.0) {
            return Err(SurrogateError::InvalidHyperparams {
                reason: "signal variance must be positive and finite",
            });
        }
        if !(noise_variance.is_finite() && noise_variance >= MIN_NOISE_VARIANCE) {
            return Err(SurrogateError::InvalidHyperparams {
                reason: "noise variance must be finite and at least the jitter floor",
            });
        }
        if !constant_mean.is_finite() {
            return Err(SurrogateError::InvalidHyperparams {
                reason: "constant mean must be finite",
            });
        }
        Ok(Self {
            lengthscales,
            signal_variance,
            noise_variance,
            constant_mean,
        })
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn constant_mean(&self) -> f64 {
        self.constant_mean
    }

    /// Number of input dimensions the kernel covers.
    pub fn input_dim(&self) -> usize {
        self.lengthscales.len()
    }

    /// Lengthscale-weighted Euclidean distance between two inputs.
    #[inline]
    pub(crate) fn scaled_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut sum = 0.0;
        for ((x, y), l) in a.iter().zip(b).zip(&self.lengthscales) {
            let d = (x - y) / l;
            sum += d * d;
        }
        sum.sqrt()
    }

    /// Matérn 5/2 covariance between two inputs (signal only, no noise).
    #[inline]
    pub(crate) fn covariance(&self, a: &[f64], b: &[f64]) -> f64 {
        let r = self.scaled_distance(a, b);
        self.signal_variance * matern52_profile(r)
    }
}

/// The Matérn 5/2 correlation profile g(r) = (1 + √5 r + 5r²/3) exp(−√5 r).
#[inline]
pub(crate) fn matern52_profile(r: f64) -> f64 {
    let sr = SQRT5 * r;
    (1.0 + sr + 5.0 * r * r / 3.0) * (-sr).exp()
}

/// Derivative of the profile with respect to r:
/// g'(r) = −(5/3) r (1 + √5 r) exp(−√5 r).
///
/// Combined with ∂r/∂ln ℓ_d = −Δ_d²/(ℓ_d² r) this gives the lengthscale
/// gradient used by the evidence computation without any r = 0 singularity:
/// ∂k/∂ln ℓ_d = σ² (5/3)(1 + √5 r) exp(−√5 r) Δ_d²/ℓ_d².
#[inline]
pub(crate) fn matern52_log_lengthscale_factor(r: f64) -> f64 {
    let sr = SQRT5 * r;
    (5.0 / 3.0) * (1.0 + sr) * (-sr).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(ls: &[f64]) -> KernelHyperparams {
        KernelHyperparams::new(ls.to_vec(), 2.0, 1e-6, 0.0).unwrap()
    }

    #[test]
    fn covariance_at_zero_distance_is_signal_variance() {
        let k = hp(&[0.5, 0.5]);
        let x = [0.3, 0.7];
        assert!((k.covariance(&x, &x) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn covariance_is_symmetric_and_decays_with_distance() {
        let k = hp(&[0.5, 0.25]);
        let a = [0.1, 0.2];
        let b = [0.4, 0.9];
        let c = [0.9, 0.9];
        assert_eq!(k.covariance(&a, &b), k.covariance(&b, &a));
        assert!(k.covariance(&a, &b) > k.covariance(&a, &c));
        assert!(k.covariance(&a, &b) > 0.0);
    }

    #[test]
    fn ard_lengthscales_weight_dimensions_independently() {
        // A long lengthscale in one dimension makes moves along it cheap.
        let k = hp(&[10.0, 0.1]);
        let origin = [0.0, 0.0];
        let along_first = [0.5, 0.0];
        let along_second = [0.0, 0.5];
        assert!(k.covariance(&origin, &along_first) > k.covariance(&origin, &along_second));
    }

    #[test]
    fn profile_derivative_matches_finite_differences() {
        for &r in &[0.01, 0.1, 0.5, 1.0, 3.0] {
            let h = 1e-6;
            let fd = (matern52_profile(r + h) - matern52_profile(r - h)) / (2.0 * h);
            let analytic = {
                // g'(r) = −(5/3) r (1 + √5 r) exp(−√5 r)
                let sr = SQRT5 * r;
                -(5.0 / 3.0) * r * (1.0 + sr) * (-sr).exp()
            };
            assert!(
                (fd - analytic).abs() < 1e-8,
                "r = {r}: fd {fd} vs analytic {analytic}"
            );
        }
    }

    #[test]
    fn hyperparams_validation_rejects_degenerate_values() {
        assert!(KernelHyperparams::new(vec![], 1.0, 1e-6, 0.0).is_err());
        assert!(KernelHyperparams::new(vec![0.0], 1.0, 1e-6, 0.0).is_err());
        assert!(KernelHyperparams::new(vec![1.0], -1.0, 1e-6, 0.0).is_err());
        assert!(KernelHyperparams::new(vec![1.0], 1.0, 0.0, 0.0).is_err());
        assert!(KernelHyperparams::new(vec![1.0], 1.0, 1e-6, f64::NAN).is_err());
        assert!(KernelHyperparams::new(vec![1.0], 1.0, 1e-6, 0.0).is_ok());
    }
}
