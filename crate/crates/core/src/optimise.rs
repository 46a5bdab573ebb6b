//! Derivative-free maximisation of acquisition surfaces.
//!
//! Acquisition functions are cheap relative to the black box being
//! optimised but have unreliable gradients (plateaus where EHVI underflows,
//! kinks introduced by clamping), so the inner optimiser is deliberately
//! simple and robust: a seeded low-discrepancy sweep of the whole space
//! followed by compass (coordinate pattern) refinement from the best
//! samples. Every run is fully determined by its seed.

use crate::pareto::DesignPoint;
use crate::sampling;
use thiserror::Error;

/// Objective evaluations may fail for reasons the optimiser cannot know;
/// they surface verbatim as [`OptimiseError::Objective`].
pub type ObjectiveError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum OptimiseError {
    #[error("search space needs at least one dimension")]
    EmptySpace,
    #[error("search space supports at most {max} dimensions, got {got}")]
    TooManyDimensions { max: usize, got: usize },
    #[error("dimension {index} has invalid bounds [{lo}, {hi}]")]
    InvalidBounds { index: usize, lo: f64, hi: f64 },
    #[error("discrete dimension {index} needs at least one finite value")]
    EmptyDiscreteDimension { index: usize },
    #[error("discrete dimension {index} contains a non-finite value")]
    NonFiniteDiscreteValue { index: usize },
    #[error("sample budget and restart count must both be at least one")]
    EmptyBudget,
    #[error("every sampled point evaluated to a non-finite value")]
    NoFiniteEvaluations,
    #[error("objective evaluation failed: {0}")]
    Objective(#[source] ObjectiveError),
}

/// One axis of the search space.
#[derive(Debug, Clone)]
pub enum Dimension {
    /// A closed interval.
    Continuous { lo: f64, hi: f64 },
    /// A finite set of levels; stored sorted ascending so that
    /// neighbouring indices are neighbouring values.
    Discrete { values: Vec<f64> },
}

/// A box-shaped design space with continuous and discrete axes.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    dims: Vec<Dimension>,
}

impl SearchSpace {
    /// Validates and normalises the dimensions (discrete level sets are
    /// sorted and deduplicated).
    pub fn new(dims: Vec<Dimension>) -> Result<Self, OptimiseError> {
        if dims.is_empty() {
            return Err(OptimiseError::EmptySpace);
        }
        if dims.len() > sampling::MAX_DIMS {
            return Err(OptimiseError::TooManyDimensions {
                max: sampling::MAX_DIMS,
                got: dims.len(),
            });
        }
        let mut cleaned = Vec::with_capacity(dims.len());
        for (index, dim) in dims.into_iter().enumerate() {
            match dim {
                Dimension::Continuous { lo, hi } => {
                    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                        return Err(OptimiseError::InvalidBounds { index, lo, hi });
                    }
                    cleaned.push(Dimension::Continuous { lo, hi });
                }
                Dimension::Discrete { mut values } => {
                    if values.iter().any(|v| !v.is_finite()) {
                        return Err(OptimiseError::NonFiniteDiscreteValue { index });
                    }
                    values.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
                    values.dedup();
                    if values.is_empty() {
                        return Err(OptimiseError::EmptyDiscreteDimension { index });
                    }
                    cleaned.push(Dimension::Discrete { values });
                }
            }
        }
        Ok(SearchSpace { dims: cleaned })
    }

    /// A purely continuous space from (lo, hi) pairs.
    pub fn continuous(bounds: &[(f64, f64)]) -> Result<Self, OptimiseError> {
        Self::new(
            bounds
                .iter()
                .map(|&(lo, hi)| Dimension::Continuous { lo, hi })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dims
    }

    /// Maps a point of the open unit cube onto the space: affine for
    /// continuous axes, equal-width bins for discrete ones.
    ///
    /// # Panics
    ///
    /// Panics if `unit` has the wrong length — unit samples are produced
    /// by this crate, so a mismatch is a programming error.
    pub fn point_from_unit(&self, unit: &[f64]) -> DesignPoint {
        assert_eq!(unit.len(), self.dims.len(), "unit sample dimension mismatch");
        let coords = self
            .dims
            .iter()
            .zip(unit)
            .map(|(dim, &u)| match dim {
                Dimension::Continuous { lo, hi } => lo + u * (hi - lo),
                Dimension::Discrete { values } => {
                    let idx = ((u * values.len() as f64) as usize).min(values.len() - 1);
                    values[idx]
                }
            })
            .collect();
        DesignPoint::new(coords).expect("mapped coordinates are finite")
    }

    /// Whether a point lies inside the space (discrete coordinates must
    /// match a level exactly).
    pub fn contains(&self, point: &DesignPoint) -> bool {
        point.len() == self.dims.len()
            && self
                .dims
                .iter()
                .zip(point.coords())
                .all(|(dim, &c)| match dim {
                    Dimension::Continuous { lo, hi } => (*lo..=*hi).contains(&c),
                    Dimension::Discrete { values } => values.contains(&c),
                })
    }
}

/// Sample count giving the space-filling sweep roughly constant coverage
/// per axis; callers with tighter time budgets pass something smaller.
pub fn default_sample_budget(dims: usize) -> usize {
    2000 * dims
}

/// Relative step threshold below which compass refinement stops.
const STEP_TOLERANCE: f64 = 1e-4;
/// Safety cap on compass sweeps per restart.
const MAX_SWEEPS: usize = 100;

/// Working representation of a candidate during refinement: continuous
/// coordinates as-is, discrete ones by level index.
#[derive(Clone)]
enum Coord {
    Continuous(f64),
    Discrete(usize),
}

fn to_point(space: &SearchSpace, coords: &[Coord]) -> DesignPoint {
    let values = coords
        .iter()
        .zip(space.dimensions())
        .map(|(c, dim)| match (c, dim) {
            (Coord::Continuous(v), _) => *v,
            (Coord::Discrete(i), Dimension::Discrete { values }) => values[*i],
            (Coord::Discrete(_), Dimension::Continuous { .. }) => {
                unreachable!("coordinate kind tracks its dimension")
            }
        })
        .collect();
    DesignPoint::new(values).expect("refined coordinates stay finite")
}

/// Maximises a black-box objective over the space.
///
/// `budget` seeded low-discrepancy samples are evaluated first; compass
/// refinement then polishes the `restarts` best of them (a bounded number
/// of extra evaluations). Objective *errors* abort the run; non-finite
/// objective *values* are tolerated and simply never selected, unless
/// every sampled point is non-finite.
///
/// Returns the best point found and its objective value. Identical
/// arguments produce bitwise-identical results.
pub fn maximise<F>(
    mut objective: F,
    space: &SearchSpace,
    budget: usize,
    restarts: usize,
    seed: u64,
) -> Result<(DesignPoint, f64), OptimiseError>
where
    F: FnMut(&DesignPoint) -> Result<f64, ObjectiveError>,
{
    if budget == 0 || restarts == 0 {
        return Err(OptimiseError::EmptyBudget);
    }
    let mut eval = |point: &DesignPoint| -> Result<f64, OptimiseError> {
        objective(point).map_err(OptimiseError::Objective)
    };

    // Space-filling sweep.
    let units = sampling::unit_samples(budget, space.len(), seed);
    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(budget);
    let mut points: Vec<DesignPoint> = Vec::with_capacity(budget);
    for (i, unit) in units.iter().enumerate() {
        let point = space.point_from_unit(unit);
        let value = eval(&point)?;
        points.push(point);
        if value.is_finite() {
            scored.push((i, value));
        }
    }
    if scored.is_empty() {
        return Err(OptimiseError::NoFiniteEvaluations);
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite scores").then(a.0.cmp(&b.0)));

    let mut best_point = points[scored[0].0].clone();
    let mut best_value = scored[0].1;

    for &(start_idx, start_value) in scored.iter().take(restarts) {
        let (point, value) = refine(&mut eval, space, &points[start_idx], start_value)?;
        if value > best_value {
            best_value = value;
            best_point = point;
        }
    }
    Ok((best_point, best_value))
}

/// Compass search: repeatedly probes ± one step along each axis, moving
/// greedily to improvements; continuous steps halve when a full sweep
/// fails, discrete axes always probe adjacent levels.
fn refine<E>(
    eval: &mut E,
    space: &SearchSpace,
    start: &DesignPoint,
    start_value: f64,
) -> Result<(DesignPoint, f64), OptimiseError>
where
    E: FnMut(&DesignPoint) -> Result<f64, OptimiseError>,
{
    let mut coords: Vec<Coord> = Vec::with_capacity(space.len());
    let mut steps: Vec<f64> = Vec::with_capacity(space.len());
    for (dim, &c) in space.dimensions().iter().zip(start.coords()) {
        match dim {
            Dimension::Continuous { lo, hi } => {
                coords.push(Coord::Continuous(c));
                steps.push(0.25 * (hi - lo));
            }
            Dimension::Discrete { values } => {
                let idx = values
                    .iter()
                    .position(|v| *v == c)
                    .expect("start point lies on a discrete level");
                coords.push(Coord::Discrete(idx));
                steps.push(1.0);
            }
        }
    }

    let mut value = start_value;
    for _ in 0..MAX_SWEEPS {
        let mut improved = false;
        for d in 0..coords.len() {
            for dir in [1.0, -1.0] {
                let mut trial = coords.clone();
                match (&coords[d], &space.dimensions()[d]) {
                    (Coord::Continuous(c), Dimension::Continuous { lo, hi }) => {
                        let moved = (c + dir * steps[d]).clamp(*lo, *hi);
                        if moved == *c {
                            continue;
                        }
                        trial[d] = Coord::Continuous(moved);
                    }
                    (Coord::Discrete(i), Dimension::Discrete { values }) => {
                        let moved = *i as isize + dir as isize;
                        if moved < 0 || moved as usize >= values.len() {
                            continue;
                        }
                        trial[d] = Coord::Discrete(moved as usize);
                    }
                    _ => unreachable!("coordinate kind tracks its dimension"),
                }
                let trial_value = eval(&to_point(space, &trial))?;
                if trial_value.is_finite() && trial_value > value {
                    coords = trial;
                    value = trial_value;
                    improved = true;
                }
            }
        }
        if !improved {
            let mut live = false;
            for (step, dim) in steps.iter_mut().zip(space.dimensions()) {
                if let Dimension::Continuous { lo, hi } = dim {
                    *step *= 0.5;
                    if *step > STEP_TOLERANCE * (hi - lo) {
                        live = true;
                    }
                }
            }
            if !live {
                break;
            }
        }
    }
    Ok((to_point(space, &coords), value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ok(v: f64) -> Result<f64, ObjectiveError> {
        Ok(v)
    }

    #[test]
    fn finds_the_peak_of_a_smooth_bowl() {
        let space = SearchSpace::continuous(&[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)]).unwrap();
        let (point, value) = maximise(
            |x| ok(-x.coords().iter().map(|c| (c - 0.3).powi(2)).sum::<f64>()),
            &space,
            2000,
            5,
            0,
        )
        .unwrap();
        for c in point.coords() {
            assert!((c - 0.3).abs() <= 1e-3, "coordinate {c} missed the peak");
        }
        assert!(value >= -3e-6, "peak value {value}");
    }

    #[test]
    fn reaches_the_known_optimum_of_a_multimodal_surface() {
        // Classic two-dimensional test surface with three equal minima of
        // value ≈ 0.397887; maximising its negation must land on one.
        let branin = |x: &DesignPoint| {
            let (x1, x2) = (x.coords()[0], x.coords()[1]);
            let b = 5.1 / (4.0 * std::f64::consts::PI.powi(2));
            let c = 5.0 / std::f64::consts::PI;
            let t = 1.0 / (8.0 * std::f64::consts::PI);
            let inner = x2 - b * x1 * x1 + c * x1 - 6.0;
            ok(-(inner * inner + 10.0 * (1.0 - t) * x1.cos() + 10.0))
        };
        let space = SearchSpace::continuous(&[(-5.0, 10.0), (0.0, 15.0)]).unwrap();
        let (_, value) = maximise(branin, &space, 4000, 5, 3).unwrap();
        let known = -0.397_887;
        assert!(
            (value - known).abs() <= 0.01 * known.abs(),
            "got {value}, expected about {known}"
        );
    }

    #[test]
    fn identical_seeds_reproduce_results_exactly() {
        let space = SearchSpace::continuous(&[(-2.0, 2.0), (-2.0, 2.0)]).unwrap();
        let f = |x: &DesignPoint| ok((x.coords()[0] * 3.1).sin() + (x.coords()[1] * 1.7).cos());
        let (p1, v1) = maximise(f, &space, 500, 3, 11).unwrap();
        let (p2, v2) = maximise(f, &space, 500, 3, 11).unwrap();
        assert_eq!(p1.coords(), p2.coords());
        assert_eq!(v1.to_bits(), v2.to_bits());
    }

    #[test]
    fn discrete_axes_are_stepped_between_levels() {
        let space = SearchSpace::new(vec![
            Dimension::Discrete {
                values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            },
            Dimension::Continuous { lo: 0.0, hi: 1.0 },
        ])
        .unwrap();
        let (point, _) = maximise(
            |x| ok(-(x.coords()[0] - 0.7).powi(2) - (x.coords()[1] - 0.2).powi(2)),
            &space,
            800,
            4,
            5,
        )
        .unwrap();
        assert_eq!(point.coords()[0], 0.75, "nearest discrete level to 0.7");
        assert!((point.coords()[1] - 0.2).abs() <= 1e-3);
        assert!(space.contains(&point));
    }

    #[test]
    fn refinement_never_falls_below_the_best_raw_sample() {
        let space = SearchSpace::continuous(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let f = |x: &DesignPoint| {
            let (a, b) = (x.coords()[0], x.coords()[1]);
            (a * 9.3).sin() * (b * 7.1).cos() + 0.3 * a - 0.2 * b
        };
        let budget = 600;
        let seed = 21;
        let (_, refined) = maximise(|x| ok(f(x)), &space, budget, 4, seed).unwrap();
        let raw_best = sampling::unit_samples(budget, space.len(), seed)
            .iter()
            .map(|u| f(&space.point_from_unit(u)))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            refined >= raw_best,
            "refined {refined} lost ground on the sweep best {raw_best}"
        );
    }

    #[test]
    fn constant_surfaces_are_handled() {
        let space = SearchSpace::continuous(&[(0.0, 1.0)]).unwrap();
        let (point, value) = maximise(|_| ok(2.5), &space, 50, 2, 0).unwrap();
        assert_eq!(value, 2.5);
        assert!(space.contains(&point));
    }

    #[test]
    fn non_finite_values_are_skipped_but_total_failure_is_an_error() {
        let space = SearchSpace::continuous(&[(0.0, 1.0)]).unwrap();
        let (point, _) = maximise(
            |x| {
                let c = x.coords()[0];
                ok(if c < 0.5 { f64::NAN } else { -(c - 0.8).powi(2) })
            },
            &space,
            400,
            3,
            1,
        )
        .unwrap();
        assert!((point.coords()[0] - 0.8).abs() <= 1e-3);

        let err = maximise(|_| ok(f64::NAN), &space, 50, 2, 0).unwrap_err();
        assert!(matches!(err, OptimiseError::NoFiniteEvaluations));
    }

    #[test]
    fn objective_errors_abort_the_run() {
        let space = SearchSpace::continuous(&[(0.0, 1.0)]).unwrap();
        let mut calls = 0;
        let err = maximise(
            |_| {
                calls += 1;
                if calls >= 3 {
                    Err("sensor offline".into())
                } else {
                    Ok(0.0)
                }
            },
            &space,
            50,
            2,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, OptimiseError::Objective(_)));
        assert_eq!(calls, 3, "evaluation should stop at the first failure");
    }

    #[test]
    fn invalid_spaces_and_budgets_are_rejected() {
        assert!(matches!(
            SearchSpace::new(Vec::new()),
            Err(OptimiseError::EmptySpace)
        ));
        assert!(matches!(
            SearchSpace::continuous(&[(1.0, 1.0)]),
            Err(OptimiseError::InvalidBounds { .. })
        ));
        assert!(matches!(
            SearchSpace::continuous(&[(0.0, f64::INFINITY)]),
            Err(OptimiseError::InvalidBounds { .. })
        ));
        assert!(matches!(
            SearchSpace::new(vec![Dimension::Discrete { values: vec![] }]),
            Err(OptimiseError::EmptyDiscreteDimension { .. })
        ));
        assert!(matches!(
            SearchSpace::new(vec![Dimension::Discrete {
                values: vec![0.0, f64::NAN]
            }]),
            Err(OptimiseError::NonFiniteDiscreteValue { .. })
        ));
        let space = SearchSpace::continuous(&[(0.0, 1.0)]).unwrap();
        assert!(matches!(
            maximise(|_| ok(0.0), &space, 0, 1, 0),
            Err(OptimiseError::EmptyBudget)
        ));
        assert!(matches!(
            maximise(|_| ok(0.0), &space, 10, 0, 0),
            Err(OptimiseError::EmptyBudget)
        ));
    }

    #[test]
    fn discrete_levels_are_sorted_and_deduplicated() {
        let space = SearchSpace::new(vec![Dimension::Discrete {
            values: vec![0.5, -1.0, 0.5, 2.0],
        }])
        .unwrap();
        match &space.dimensions()[0] {
            Dimension::Discrete { values } => assert_eq!(values, &vec![-1.0, 0.5, 2.0]),
            _ => unreachable!(),
        }
    }

    proptest! {
        #[test]
        fn results_always_lie_inside_the_space(
            seed in 0u64..1000,
            budget in 1usize..200,
            hi in 0.5f64..3.0,
        ) {
            let space = SearchSpace::new(vec![
                Dimension::Continuous { lo: -1.0, hi },
                Dimension::Discrete { values: vec![-0.5, 0.0, 1.5] },
            ]).unwrap();
            let (point, _) = maximise(
                |x| ok((x.coords()[0] - x.coords()[1]).sin()),
                &space,
                budget,
                3,
                seed,
            ).unwrap();
            prop_assert!(space.contains(&point));
        }
    }
}
