//! Objective-space primitives: dominance, Pareto fronts, and hypervolume.
//!
//! Everything in this crate follows the minimisation convention: an objective
//! vector `a` dominates `b` when `a[i] <= b[i]` for every component with a
//! strict improvement in at least one. The hypervolume of a front is the
//! Lebesgue measure of the region dominated by the front and bounded above by
//! a reference point; it is computed exactly for two and three objectives and
//! by Monte-Carlo estimation beyond that.

use log::warn;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Seed used when [`hypervolume`] falls back to Monte-Carlo estimation for
/// four or more objectives, so repeated calls stay deterministic.
const HV_MC_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Default sample count for the Monte-Carlo hypervolume path.
const HV_MC_DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum ParetoError {
    /// Objective vectors describe trade-offs, so fewer than two components is
    /// rejected at construction time.
    #[error("objective vector needs at least 2 components, got {0}")]
    TooFewObjectives(usize),
    #[error("objective vector component {index} is not finite")]
    NonFiniteObjective { index: usize },
    #[error("design point needs at least 1 coordinate")]
    EmptyDesignPoint,
    #[error("design point coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("front members must be mutually non-dominated")]
    DominatedMember,
    #[error("Monte-Carlo hypervolume needs at least one sample")]
    NoSamples,
}

/// A point in objective space (`k >= 2` finite components, all minimised).
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    values: Vec<f64>,
}

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self, ParetoError> {
        if values.len() < 2 {
            return Err(ParetoError::TooFewObjectives(values.len()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(ParetoError::NonFiniteObjective { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of objectives `k`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A point in design space (`n >= 1` finite coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoint {
    coords: Vec<f64>,
}

impl DesignPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, ParetoError> {
        if coords.is_empty() {
            return Err(ParetoError::EmptyDesignPoint);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(ParetoError::NonFiniteCoordinate { index });
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of design dimensions `n`.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Paired design points and their observed objective vectors.
///
/// Rows are kept in insertion order; all points share one design dimension
/// and all observations share one objective dimension.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    points: Vec<DesignPoint>,
    observations: Vec<ObjectiveVector>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one evaluated point.
    ///
    /// # Errors
    ///
    /// Rejects rows whose design or objective dimension disagrees with the
    /// rows already stored.
    pub fn push(
        &mut self,
        point: DesignPoint,
        observation: ObjectiveVector,
    ) -> Result<(), ParetoError> {
        if let Some(first) = self.points.first() {
            if first.len() != point.len() {
                return Err(ParetoError::DimensionMismatch {
                    left: first.len(),
                    right: point.len(),
                });
            }
        }
        if let Some(first) = self.observations.first() {
            if first.len() != observation.len() {
                return Err(ParetoError::DimensionMismatch {
                    left: first.len(),
                    right: observation.len(),
                });
            }
        }
        self.points.push(point);
        self.observations.push(observation);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DesignPoint] {
        &self.points
    }

    pub fn observations(&self) -> &[ObjectiveVector] {
        &self.observations
    }

    /// Observed values of one objective across all rows, in insertion order.
    pub fn objective_column(&self, objective: usize) -> Vec<f64> {
        self.observations
            .iter()
            .map(|o| o.values()[objective])
            .collect()
    }
}

/// A set of mutually non-dominated objective vectors.
///
/// Construct via [`extract_front`], or from pre-screened members with
/// [`ParetoFront::try_from_members`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoFront {
    members: Vec<ObjectiveVector>,
}

impl ParetoFront {
    /// Builds a front from members that are already expected to be mutually
    /// non-dominated and duplicate-free; verifies that expectation.
    pub fn try_from_members(members: Vec<ObjectiveVector>) -> Result<Self, ParetoError> {
        check_uniform_dimension(&members)?;
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate() {
                if i != j && (dominates_unchecked(a.values(), b.values()) || a == b) {
                    return Err(ParetoError::DominatedMember);
                }
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[ObjectiveVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Monte-Carlo hypervolume estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Returns true when `a` dominates `b` under minimisation: no component of
/// `a` is worse and at least one is strictly better.
///
/// # Errors
///
/// The two vectors must have the same number of objectives.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool, ParetoError> {
    if a.len() != b.len() {
        return Err(ParetoError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(dominates_unchecked(a.values(), b.values()))
}

#[inline]
fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

fn check_uniform_dimension(observations: &[ObjectiveVector]) -> Result<(), ParetoError> {
    if let Some(first) = observations.first() {
        for o in observations {
            if o.len() != first.len() {
                return Err(ParetoError::DimensionMismatch {
                    left: first.len(),
                    right: o.len(),
                });
            }
        }
    }
    Ok(())
}

/// Extracts the non-dominated subset of `observations`, dropping exact
/// duplicates so each retained vector appears once.
///
/// An empty input yields an empty front. Two objectives use an
/// `O(n log n)` sort-and-sweep; the general case is a pairwise scan.
pub fn extract_front(observations: &[ObjectiveVector]) -> Result<ParetoFront, ParetoError> {
    check_uniform_dimension(observations)?;
    if observations.is_empty() {
        return Ok(ParetoFront::default());
    }
    let members = if observations[0].len() == 2 {
        extract_front_2d(observations)
    } else {
        extract_front_pairwise(observations)
    };
    Ok(ParetoFront { members })
}

/// Sort by (f1, f2) ascending, then sweep: a point survives iff its f2 is
/// strictly below every earlier survivor's f2.
fn extract_front_2d(observations: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut order: Vec<usize> = (0..observations.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (observations[i].values(), observations[j].values());
        (a[0], a[1]).partial_cmp(&(b[0], b[1])).expect("finite objectives")
    });
    let mut members: Vec<ObjectiveVector> = Vec::new();
    let mut best_f2 = f64::INFINITY;
    for &i in &order {
        let v = observations[i].values();
        if v[1] < best_f2 {
            members.push(observations[i].clone());
            best_f2 = v[1];
        }
    }
    members
}

fn extract_front_pairwise(observations: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut members: Vec<ObjectiveVector> = Vec::new();
    'candidates: for (i, cand) in observations.iter().enumerate() {
        for (j, other) in observations.iter().enumerate() {
            if i == j {
                continue;
            }
            if dominates_unchecked(other.values(), cand.values()) {
                continue 'candidates;
            }
            // Keep only the first copy of duplicated vectors.
            if j < i && other == cand {
                continue 'candidates;
            }
        }
        members.push(cand.clone());
    }
    members
}

/// Hypervolume dominated by `front` and bounded above by `ref_point`.
///
/// Members that fail to improve on the reference point in every component
/// enclose no volume; they are dropped with a warning. Two and three
/// objectives are computed exactly (sweep and slicing respectively); four or
/// more fall back to a seeded Monte-Carlo estimate with
/// 10^6 samples — use [`hypervolume_mc`] directly to control the sample
/// count or inspect the standard error.
pub fn hypervolume(front: &ParetoFront, ref_point: &ObjectiveVector) -> Result<f64, ParetoError> {
    let boxes = dominating_boxes(front, ref_point)?;
    if boxes.is_empty() {
        return Ok(0.0);
    }
    match ref_point.len() {
        2 => Ok(hv_2d(boxes, ref_point.values())),
        3 => Ok(hv_3d(boxes, ref_point.values())),
        _ => {
            let estimate = mc_estimate(&boxes, ref_point.values(), HV_MC_DEFAULT_SAMPLES, HV_MC_SEED)?;
            log::debug!(
                "Monte-Carlo hypervolume for k={}: {} (std error {})",
                ref_point.len(),
                estimate.value,
                estimate.std_error
            );
            Ok(estimate.value)
        }
    }
}

/// Monte-Carlo hypervolume estimate for any number of objectives.
///
/// Samples uniformly inside the bounding box spanned by the front's
/// componentwise minimum and the reference point, and returns the dominated
/// fraction scaled by the box volume together with the binomial standard
/// error of that estimate. Deterministic for a fixed `seed`.
pub fn hypervolume_mc(
    front: &ParetoFront,
    ref_point: &ObjectiveVector,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, ParetoError> {
    let boxes = dominating_boxes(front, ref_point)?;
    if boxes.is_empty() {
        return Ok(McEstimate {
            value: 0.0,
            std_error: 0.0,
        });
    }
    mc_estimate(&boxes, ref_point.values(), samples, seed)
}

/// Validates dimensions and keeps the members that strictly improve on the
/// reference point in every component.
fn dominating_boxes<'a>(
    front: &'a ParetoFront,
    ref_point: &ObjectiveVector,
) -> Result<Vec<&'a [f64]>, ParetoError> {
    for m in front.members() {
        if m.len() != ref_point.len() {
            return Err(ParetoError::DimensionMismatch {
                left: m.len(),
                right: ref_point.len(),
            });
        }
    }
    let (kept, dropped): (Vec<&ObjectiveVector>, Vec<&ObjectiveVector>) = front
        .members()
        .iter()
        .partition(|m| m.values().iter().zip(ref_point.values()).all(|(v, r)| v < r));
    if !dropped.is_empty() {
        warn!(
            "hypervolume: dropped {} front member(s) that do not improve on the reference point",
            dropped.len()
        );
    }
    Ok(kept.into_iter().map(|m| m.values()).collect())
}

/// Exact bi-objective hypervolume by sweeping members in ascending f1.
/// Tolerates dominated members: only the staircase of strictly improving f2
/// values contributes, so the same sweep serves raw point unions.
fn hv_2d(mut members: Vec<&[f64]>, ref_point: &[f64]) -> f64 {
    members.sort_by(|a, b| {
        (a[0], a[1])
            .partial_cmp(&(b[0], b[1]))
            .expect("finite objectives")
    });
    let mut survivors: Vec<&[f64]> = Vec::with_capacity(members.len());
    let mut best_f2 = f64::INFINITY;
    for m in members {
        if m[1] < best_f2 {
            survivors.push(m);
            best_f2 = m[1];
        }
    }
    let mut volume = 0.0;
    for (i, m) in survivors.iter().enumerate() {
        let next_f1 = survivors.get(i + 1).map_or(ref_point[0], |n| n[0]);
        volume += (next_f1 - m[0]) * (ref_point[1] - m[1]);
    }
    volume
}

/// Exact hypervolume of an arbitrary point set (dominated members allowed)
/// against a reference point, for two or three objectives. Used by
/// acquisition estimators that add posterior draws to a front; points that
/// do not improve on the reference point are ignored without warning
/// because tail draws beyond it are expected there.
///
/// # Panics
///
/// Debug-asserts `k` is 2 or 3; callers dispatch Monte-Carlo estimation for
/// higher objective counts themselves.
pub(crate) fn hv_points(points: &[&[f64]], ref_point: &[f64]) -> f64 {
    let kept: Vec<&[f64]> = points
        .iter()
        .filter(|p| p.iter().zip(ref_point).all(|(v, r)| v < r))
        .copied()
        .collect();
    if kept.is_empty() {
        return 0.0;
    }
    match ref_point.len() {
        2 => hv_2d(kept, ref_point),
        3 => hv_3d(kept, ref_point),
        k => {
            debug_assert!(false, "hv_points supports k = 2 or 3, got {k}");
            0.0
        }
    }
}

/// Exact three-objective hypervolume: slice along f3 and integrate the
/// two-objective hypervolume of the points active below each slice.
fn hv_3d(mut members: Vec<&[f64]>, ref_point: &[f64]) -> f64 {
    members.sort_by(|a, b| a[2].partial_cmp(&b[2]).expect("finite objectives"));
    let mut volume = 0.0;
    let mut active: Vec<&[f64]> = Vec::new();
    for (i, m) in members.iter().enumerate() {
        active.push(m);
        let slice_top = members.get(i + 1).map_or(ref_point[2], |n| n[2]);
        let height = slice_top - m[2];
        if height <= 0.0 {
            continue; // ties in f3 collapse into the next slice
        }
        let projected = non_dominated_2d(&active);
        volume += hv_2d(projected, &ref_point[..2]) * height;
    }
    volume
}

/// Non-dominated subset of (f1, f2) projections; points non-dominated in 3-D
/// may still dominate one another once the third objective is sliced away.
fn non_dominated_2d<'a>(points: &[&'a [f64]]) -> Vec<&'a [f64]> {
    let mut kept: Vec<&[f64]> = Vec::with_capacity(points.len());
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let dominated = q[0] <= p[0] && q[1] <= p[1] && (q[0] < p[0] || q[1] < p[1]);
            let duplicate = j < i && q[0] == p[0] && q[1] == p[1];
            if dominated || duplicate {
                continue 'outer;
            }
        }
        kept.push(p);
    }
    kept
}

fn mc_estimate(
    members: &[&[f64]],
    ref_point: &[f64],
    samples: u64,
    seed: u64,
) -> Result<McEstimate, ParetoError> {
    if samples == 0 {
        return Err(ParetoError::NoSamples);
    }
    let k = ref_point.len();
    // The dominated region lies inside the box spanned by the componentwise
    // minimum of the front and the reference point.
    let mut lower = vec![f64::INFINITY; k];
    for m in members {
        for (l, v) in lower.iter_mut().zip(m.iter()) {
            *l = l.min(*v);
        }
    }
    let box_volume: f64 = ref_point
        .iter()
        .zip(&lower)
        .map(|(r, l)| r - l)
        .product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits: u64 = 0;
    let mut sample = vec![0.0_f64; k];
    for _ in 0..samples {
        for (s, (l, r)) in sample.iter_mut().zip(lower.iter().zip(ref_point)) {
            *s = l + (r - l) * rng.gen::<f64>();
        }
        let dominated = members
            .iter()
            .any(|m| m.iter().zip(&sample).all(|(v, s)| v <= s));
        if dominated {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        value: box_volume * p,
        std_error: box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// Hypervolume regret of a discovered front against the true front:
/// `HV(true) - HV(discovered)` under a shared reference point.
///
/// Non-negative (up to Monte-Carlo noise for k > 3) whenever the discovered
/// front lies inside the region dominated by the true front.
pub fn hv_regret(
    discovered: &ParetoFront,
    true_front: &ParetoFront,
    ref_point: &ObjectiveVector,
) -> Result<f64, ParetoError> {
    Ok(hypervolume(true_front, ref_point)? - hypervolume(discovered, ref_point)?)
}
