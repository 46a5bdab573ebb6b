//! Batch multi-objective Bayesian optimisation toolkit.
//!
//! The crate optimises expensive black-box functions with several competing
//! objectives (all minimised) by fitting independent Gaussian-process
//! surrogates per objective and maximising an expected-hypervolume-improvement
//! acquisition function. Batches of candidate points are assembled without
//! refitting the surrogates: each selected point multiplicatively penalises
//! the acquisition surface around its *predicted objective values*, so the
//! remaining selections are pushed towards unexplored parts of the trade-off
//! surface. A Kriging-believer baseline (fantasy conditioning on posterior
//! means), a purely random baseline, and one-at-a-time EHVI are provided for
//! comparison, together with synthetic benchmark problems and an experiment
//! harness that records hypervolume regret and wall-clock cost per step.
//!
//! Module map:
//!
//! * [`pareto`] — objective vectors, dominance, Pareto fronts, hypervolume.
//! * [`surrogate`] — Gaussian-process regression with a Matérn 5/2 kernel.
//! * [`acquisition`] — EHVI, feasibility probabilities, constrained EHVI.
//! * [`batch`] — penalised batch construction and the Kriging-believer loop.
//! * [`optimise`] — derivative-free acquisition maximisation.
//! * [`benchmarks`] — synthetic test problems with known Pareto fronts.
//! * [`harness`] — experiment loop, CSV records, and regret plots.
//! * [`sampling`] — seeded low-discrepancy sequences shared by the above.

pub mod acquisition;
pub mod batch;
pub mod benchmarks;
pub mod harness;
pub mod optimise;
pub mod pareto;
pub mod sampling;
pub mod surrogate;

pub use acquisition::{AcquisitionContext, ConstraintDirection, ConstraintModel};
pub use batch::{BatchSettings, PenaltyState, WarpFunction};
pub use benchmarks::BenchmarkProblem;
pub use harness::{ExperimentConfig, ExperimentOutcome, Method, OptimiserSettings, StepRecord};
pub use optimise::{Dimension, SearchSpace};
pub use pareto::{Dataset, DesignPoint, ObjectiveVector, ParetoFront};
pub use surrogate::{GpModel, KernelHyperparams, Posterior};
