//! Experiment harness: seeded optimisation loops over the bundled
//! benchmarks, with hypervolume-regret tracking, per-step wall-clock
//! timing, CSV serialisation, and SVG regret plots.
//!
//! A run is described by an [`ExperimentConfig`] (deserialisable from
//! JSON under exactly the documented key names) and replayed once per
//! seed: draw an initial space-filling design, then repeatedly refit one
//! surrogate per objective, build a batch with the configured method,
//! and evaluate it, until the evaluation budget is spent. Recorded step
//! times cover model refitting and batch construction only — objective
//! evaluation is excluded, so the timings compare method overhead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{error, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::batch::{self, BatchSettings, WarpFunction};
use crate::benchmarks::{BenchmarkError, BenchmarkProblem};
use crate::optimise;
use crate::pareto::{self, Dataset, DesignPoint, ObjectiveVector, ParetoError, ParetoFront};
use crate::sampling::{self, derive_seed};
use crate::surrogate::{FitConfig, GpModel, SurrogateError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("init_points must be at least 2, got {got}")]
    InitTooSmall { got: usize },
    #[error("batch_size must be at least 1")]
    ZeroBatchSize,
    #[error("total_budget ({budget}) must cover the initial design ({init})")]
    BudgetTooSmall { budget: usize, init: usize },
    #[error("seeds list is empty")]
    NoSeeds,
    #[error("seed {seed} appears more than once")]
    DuplicateSeed { seed: u64 },
    #[error("unknown method {name:?}; available: hippo, kb, random, sequential-ehvi")]
    UnknownMethod { name: String },
    #[error("CSV line {line}: {reason}")]
    CsvParse { line: usize, reason: String },
    #[error("no series given to plot")]
    NoSeries,
    #[error("series {name:?} has no records")]
    EmptySeries { name: String },
    #[error("seeds of series {name:?} share no common evaluation grid")]
    NoCommonGrid { name: String },
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Batch-construction strategy for one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Penalised-acquisition batches from a single posterior.
    Hippo,
    /// Kriging Believer: refit-free fantasy conditioning per batch point.
    Kb,
    /// Uniform random batches; no surrogates are fitted.
    Random,
    /// One point per step by plain expected-hypervolume-improvement
    /// maximisation; ignores the configured batch size.
    SequentialEhvi,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Hippo => "hippo",
            Self::Kb => "kb",
            Self::Random => "random",
            Self::SequentialEhvi => "sequential-ehvi",
        }
    }

    pub fn all() -> [Method; 4] {
        [Self::Hippo, Self::Kb, Self::Random, Self::SequentialEhvi]
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::all()
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| HarnessError::UnknownMethod {
                name: s.to_owned(),
            })
    }
}

/// Knobs of the inner numerical machinery; the defaults suit the bundled
/// benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimiserSettings {
    /// Space-filling samples per acquisition maximisation; `None` scales
    /// with the problem's input dimension.
    pub sample_budget: Option<usize>,
    /// Compass-refinement restarts of the acquisition maximiser.
    pub restarts: usize,
    /// Multi-start count for each surrogate hyperparameter fit.
    pub fit_restarts: usize,
}

impl Default for OptimiserSettings {
    fn default() -> Self {
        Self {
            sample_budget: None,
            restarts: 5,
            fit_restarts: 3,
        }
    }
}

/// One experiment: a problem, a method, budgets, and replication seeds.
///
/// The JSON representation uses exactly these field names, e.g.
/// `{"problem": "vlmop2", "method": "hippo", "batch_size": 4,
/// "init_points": 10, "total_budget": 90, "seeds": [0, 1]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: String,
    pub method: Method,
    pub batch_size: usize,
    pub init_points: usize,
    pub total_budget: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub optimiser: OptimiserSettings,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// When off, step times are written as zero so reruns of one config
    /// emit byte-identical CSV.
    #[serde(default = "default_record_timing")]
    pub record_timing: bool,
}

fn default_record_timing() -> bool {
    true
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.init_points < 2 {
            return Err(HarnessError::InitTooSmall {
                got: self.init_points,
            });
        }
        if self.batch_size == 0 {
            return Err(HarnessError::ZeroBatchSize);
        }
        if self.total_budget < self.init_points {
            return Err(HarnessError::BudgetTooSmall {
                budget: self.total_budget,
                init: self.init_points,
            });
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::NoSeeds);
        }
        let mut seen = BTreeSet::new();
        for &seed in &self.seeds {
            if !seen.insert(seed) {
                return Err(HarnessError::DuplicateSeed { seed });
            }
        }
        Ok(())
    }
}

/// One row of the result table. Step 0 is the initial design; its wall
/// time covers design generation only.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub seed: u64,
    pub step: usize,
    /// Cumulative objective evaluations after this step.
    pub evaluations: usize,
    pub hv_regret: f64,
    /// Model refitting plus batch construction, excluding objective
    /// evaluation.
    pub step_wall_time_s: f64,
}

/// A seed that aborted mid-run; its partial records are discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedFailure {
    pub seed: u64,
    pub step: usize,
    pub message: String,
}

/// Everything a run produced: the step table, the evaluated designs per
/// surviving seed (in evaluation order), and any per-seed failures.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub records: Vec<StepRecord>,
    pub datasets: Vec<(u64, Dataset)>,
    pub failures: Vec<SeedFailure>,
}

/// Runs the configured experiment over every seed. Config errors fail the
/// whole call; a failure inside one seed is logged, reported in the
/// outcome, and does not stop the remaining seeds.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    cfg.validate()?;
    let problem = BenchmarkProblem::by_name(&cfg.problem)?;
    let leftover = (cfg.total_budget - cfg.init_points) % effective_batch_size(cfg);
    if leftover != 0 {
        warn!("budget leaves a trailing partial batch of {leftover} evaluation(s)");
    }

    let mut outcome = ExperimentOutcome::default();
    for &seed in &cfg.seeds {
        match run_seed(&problem, cfg, seed) {
            Ok((records, dataset)) => {
                outcome.records.extend(records);
                outcome.datasets.push((seed, dataset));
            }
            Err(failure) => {
                error!(
                    "seed {} failed at step {}: {}",
                    failure.seed, failure.step, failure.message
                );
                outcome.failures.push(failure);
            }
        }
    }
    Ok(outcome)
}

fn effective_batch_size(cfg: &ExperimentConfig) -> usize {
    match cfg.method {
        Method::SequentialEhvi => 1,
        _ => cfg.batch_size,
    }
}

/// Stream of the initial design draw; per-step streams start at 1.
const INIT_STREAM: u64 = 0;

fn run_seed(
    problem: &BenchmarkProblem,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(Vec<StepRecord>, Dataset), SeedFailure> {
    let batch_size = effective_batch_size(cfg);
    let sample_budget = cfg
        .optimiser
        .sample_budget
        .unwrap_or_else(|| optimise::default_sample_budget(problem.input_dim()));

    let mut dataset = Dataset::new();
    let mut records = Vec::new();

    let timer = Instant::now();
    let init_design: Vec<DesignPoint> =
        sampling::unit_samples(cfg.init_points, problem.input_dim(), derive_seed(seed, INIT_STREAM))
            .iter()
            .map(|unit| problem.bounds().point_from_unit(unit))
            .collect();
    let overhead = timer.elapsed();
    let fail_at = |step: usize| move |message: String| SeedFailure { seed, step, message };
    evaluate_into(problem, init_design, &mut dataset).map_err(fail_at(0))?;
    records.push(step_record(problem, cfg, seed, 0, &dataset, overhead).map_err(fail_at(0))?);

    let mut step = 0;
    let mut remaining = cfg.total_budget - cfg.init_points;
    while remaining > 0 {
        step += 1;
        let fail = fail_at(step);
        let size = batch_size.min(remaining);
        let step_seed = derive_seed(seed, step as u64);

        let timer = Instant::now();
        let batch = match cfg.method {
            Method::Random => random_batch(problem, size, derive_seed(step_seed, 0)),
            method => {
                let models = fit_models(&dataset, &cfg.optimiser, step_seed, problem)
                    .map_err(|e| fail(e.to_string()))?;
                let front = front_within_reference(&dataset, problem.ref_point())
                    .map_err(|e| fail(e.to_string()))?;
                let settings = BatchSettings {
                    batch_size: size,
                    sample_budget,
                    restarts: cfg.optimiser.restarts,
                    warp: WarpFunction::default(),
                    seed: derive_seed(step_seed, 0),
                };
                let built = match method {
                    Method::Kb => batch::build_kb_batch(
                        &models,
                        front,
                        problem.ref_point().clone(),
                        problem.bounds(),
                        &settings,
                    ),
                    _ => batch::build_hippo_batch(
                        &models,
                        front,
                        problem.ref_point().clone(),
                        problem.bounds(),
                        &settings,
                    ),
                };
                built.map_err(|e| fail(e.to_string()))?
            }
        };
        let overhead = timer.elapsed();

        evaluate_into(problem, batch, &mut dataset).map_err(&fail)?;
        remaining -= size;
        records.push(step_record(problem, cfg, seed, step, &dataset, overhead).map_err(&fail)?);
    }
    Ok((records, dataset))
}

fn evaluate_into(
    problem: &BenchmarkProblem,
    batch: Vec<DesignPoint>,
    dataset: &mut Dataset,
) -> Result<(), String> {
    for x in batch {
        let y = problem.evaluate(&x).map_err(|e| e.to_string())?;
        dataset.push(x, y).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn random_batch(problem: &BenchmarkProblem, size: usize, seed: u64) -> Vec<DesignPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| {
            let unit: Vec<f64> = (0..problem.input_dim()).map(|_| rng.gen()).collect();
            problem.bounds().point_from_unit(&unit)
        })
        .collect()
}

/// Refits one surrogate per objective. Fit seeds are derived per step and
/// objective on streams 1.. (stream 0 belongs to batch construction).
fn fit_models(
    dataset: &Dataset,
    optimiser: &OptimiserSettings,
    step_seed: u64,
    problem: &BenchmarkProblem,
) -> Result<Vec<GpModel>, SurrogateError> {
    (0..problem.objective_count())
        .map(|j| {
            let config = FitConfig {
                restarts: optimiser.fit_restarts,
                seed: derive_seed(step_seed, 1 + j as u64),
                ..FitConfig::default()
            };
            GpModel::fit(dataset.points(), &dataset.objective_column(j), &config)
        })
        .collect()
}

/// The discovered front, restricted to members strictly inside the
/// reference box. Members beyond the reference bound no hypervolume and
/// the acquisition machinery rejects them, so they are dropped here once
/// rather than warned about downstream.
fn front_within_reference(
    dataset: &Dataset,
    ref_point: &ObjectiveVector,
) -> Result<ParetoFront, ParetoError> {
    let full = pareto::extract_front(dataset.observations())?;
    let members: Vec<ObjectiveVector> = full
        .members()
        .iter()
        .filter(|m| m.values().iter().zip(ref_point.values()).all(|(v, r)| v < r))
        .cloned()
        .collect();
    ParetoFront::try_from_members(members)
}

fn step_record(
    problem: &BenchmarkProblem,
    cfg: &ExperimentConfig,
    seed: u64,
    step: usize,
    dataset: &Dataset,
    overhead: Duration,
) -> Result<StepRecord, String> {
    let front = front_within_reference(dataset, problem.ref_point()).map_err(|e| e.to_string())?;
    let hv_regret = pareto::hv_regret(&front, problem.true_front(), problem.ref_point())
        .map_err(|e| e.to_string())?;
    Ok(StepRecord {
        seed,
        step,
        evaluations: dataset.len(),
        hv_regret,
        step_wall_time_s: if cfg.record_timing {
            overhead.as_secs_f64()
        } else {
            0.0
        },
    })
}

pub const CSV_HEADER: &str = "seed,step,evaluations,hv_regret,step_wall_time_s";

/// Renders records as CSV text: the fixed header, one row per record,
/// `\n` newlines, `.` decimal points. Float fields use the shortest
/// representation that parses back to the same value.
pub fn csv_string(records: &[StepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.seed, r.step, r.evaluations, r.hv_regret, r.step_wall_time_s
        ));
    }
    out
}

pub fn write_csv(path: &Path, records: &[StepRecord]) -> Result<(), HarnessError> {
    Ok(std::fs::write(path, csv_string(records))?)
}

/// Parses text produced by [`csv_string`] back into records.
pub fn parse_csv(text: &str) -> Result<Vec<StepRecord>, HarnessError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(HarnessError::CsvParse {
                line: 1,
                reason: format!("expected header {CSV_HEADER:?}, found {other:?}"),
            })
        }
    }
    let mut records = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(HarnessError::CsvParse {
                line: line_no,
                reason: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        fn field<T: FromStr>(raw: &str, what: &str, line: usize) -> Result<T, HarnessError> {
            raw.parse().map_err(|_| HarnessError::CsvParse {
                line,
                reason: format!("invalid {what} {raw:?}"),
            })
        }
        records.push(StepRecord {
            seed: field(fields[0], "seed", line_no)?,
            step: field(fields[1], "step", line_no)?,
            evaluations: field(fields[2], "evaluations", line_no)?,
            hv_regret: field(fields[3], "hv_regret", line_no)?,
            step_wall_time_s: field(fields[4], "step_wall_time_s", line_no)?,
        });
    }
    Ok(records)
}

/// Linear-interpolation percentile (the convention spreadsheets and most
/// numerics libraries default to). `q` is a fraction in [0, 1].
///
/// # Panics
///
/// Panics on an empty slice, a non-finite value, or `q` outside [0, 1].
pub fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty slice");
    assert!((0.0..=1.0).contains(&q), "percentile fraction {q} outside [0, 1]");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let frac = rank - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    }
}

/// Per-step summary of one method's records across seeds.
#[derive(Debug)]
struct Band {
    evaluations: Vec<usize>,
    mean: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Collapses a record set to mean and 25–75 percentile curves over the
/// coarsest evaluation grid common to all its seeds; grid mismatches
/// (e.g. from truncated seeds) are warned about and resampled away.
fn series_band(name: &str, records: &[StepRecord]) -> Result<Band, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptySeries {
            name: name.to_owned(),
        });
    }
    let mut by_seed: BTreeMap<u64, BTreeMap<usize, f64>> = BTreeMap::new();
    for r in records {
        by_seed.entry(r.seed).or_default().insert(r.evaluations, r.hv_regret);
    }
    let mut grid: Vec<usize> = by_seed.values().next().expect("non-empty").keys().copied().collect();
    grid.retain(|e| by_seed.values().all(|m| m.contains_key(e)));
    if grid.is_empty() {
        return Err(HarnessError::NoCommonGrid {
            name: name.to_owned(),
        });
    }
    let longest = by_seed.values().map(BTreeMap::len).max().expect("non-empty");
    if grid.len() < longest {
        warn!(
            "series {name:?}: evaluation grids differ across seeds; \
             resampling to the common grid ({} of {} steps)",
            grid.len(),
            longest
        );
    }
    let mut band = Band {
        evaluations: Vec::with_capacity(grid.len()),
        mean: Vec::with_capacity(grid.len()),
        lower: Vec::with_capacity(grid.len()),
        upper: Vec::with_capacity(grid.len()),
    };
    for &evals in &grid {
        let values: Vec<f64> = by_seed.values().map(|m| m[&evals]).collect();
        band.mean.push(values.iter().sum::<f64>() / values.len() as f64);
        band.lower.push(percentile(&values, 0.25));
        band.upper.push(percentile(&values, 0.75));
    }
    band.evaluations = grid;
    Ok(band)
}

const PLOT_WIDTH: f64 = 800.0;
const PLOT_HEIGHT: f64 = 500.0;
const PLOT_COLOURS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_owned()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Renders labelled regret-versus-evaluations curves as a standalone SVG
/// document: per series a mean line plus a shaded 25–75 percentile band.
pub fn emit_regret_plot(series: &[(String, Vec<StepRecord>)]) -> Result<String, HarnessError> {
    if series.is_empty() {
        return Err(HarnessError::NoSeries);
    }
    let bands: Vec<(&str, Band)> = series
        .iter()
        .map(|(name, records)| series_band(name, records).map(|b| (name.as_str(), b)))
        .collect::<Result<_, _>>()?;

    let (left, right, top, bottom) = (80.0, 180.0, 30.0, 60.0);
    let plot_w = PLOT_WIDTH - left - right;
    let plot_h = PLOT_HEIGHT - top - bottom;

    let x_min = bands.iter().map(|(_, b)| b.evaluations[0]).min().expect("non-empty") as f64;
    let x_max = bands
        .iter()
        .map(|(_, b)| *b.evaluations.last().expect("non-empty grid"))
        .max()
        .expect("non-empty") as f64;
    let x_span = (x_max - x_min).max(1.0);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, b) in &bands {
        for v in b.lower.iter().chain(&b.upper).chain(&b.mean) {
            y_min = y_min.min(*v);
            y_max = y_max.max(*v);
        }
    }
    let y_pad = ((y_max - y_min) * 0.05).max(y_max.abs() * 1e-3).max(1e-12);
    let (y_min, y_max) = (y_min - y_pad, y_max + y_pad);
    let y_span = y_max - y_min;

    let map_x = |e: f64| left + (e - x_min) / x_span * plot_w;
    let map_y = |v: f64| top + (y_max - v) / y_span * plot_h;

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_WIDTH}\" \
         height=\"{PLOT_HEIGHT}\" viewBox=\"0 0 {PLOT_WIDTH} {PLOT_HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    svg.push_str(&format!(
        "<rect width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));

    // Axes with five ticks each.
    let x_axis_y = top + plot_h;
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{x_axis_y}\" x2=\"{:.2}\" y2=\"{x_axis_y}\" stroke=\"#000\"/>\n",
        left + plot_w
    ));
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{x_axis_y}\" stroke=\"#000\"/>\n"
    ));
    for i in 0..5 {
        let t = i as f64 / 4.0;
        let xv = x_min + t * (x_max - x_min);
        let x = map_x(xv);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{x_axis_y}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#000\"/>\n",
            x_axis_y + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            x_axis_y + 20.0,
            tick_label(xv.round())
        ));
        let yv = y_min + t * y_span;
        let y = map_y(yv);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{left}\" y2=\"{y:.2}\" stroke=\"#000\"/>\n",
            left - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            left - 9.0,
            y + 4.0,
            tick_label(yv)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">evaluations</text>\n",
        left + plot_w / 2.0,
        PLOT_HEIGHT - 15.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 20 {:.2})\">hypervolume regret</text>\n",
        top + plot_h / 2.0,
        top + plot_h / 2.0
    ));

    for (i, (name, band)) in bands.iter().enumerate() {
        let colour = PLOT_COLOURS[i % PLOT_COLOURS.len()];
        let mut area = String::from("M");
        for (j, &e) in band.evaluations.iter().enumerate() {
            area.push_str(&format!(" {:.2},{:.2}", map_x(e as f64), map_y(band.upper[j])));
        }
        for (j, &e) in band.evaluations.iter().enumerate().rev() {
            area.push_str(&format!(" {:.2},{:.2}", map_x(e as f64), map_y(band.lower[j])));
        }
        area.push_str(" Z");
        svg.push_str(&format!(
            "<path d=\"{area}\" fill=\"{colour}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n"
        ));
        let line: Vec<String> = band
            .evaluations
            .iter()
            .enumerate()
            .map(|(j, &e)| format!("{:.2},{:.2}", map_x(e as f64), map_y(band.mean[j])))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.8\"/>\n",
            line.join(" ")
        ));
        let legend_y = top + 10.0 + 22.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{legend_y:.2}\" x2=\"{:.2}\" y2=\"{legend_y:.2}\" \
             stroke=\"{colour}\" stroke-width=\"3\"/>\n",
            PLOT_WIDTH - right + 15.0,
            PLOT_WIDTH - right + 43.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
            PLOT_WIDTH - right + 50.0,
            legend_y + 4.0,
            escape_xml(name)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_regret_plot(
    path: &Path,
    series: &[(String, Vec<StepRecord>)],
) -> Result<(), HarnessError> {
    Ok(std::fs::write(path, emit_regret_plot(series)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(method: Method) -> ExperimentConfig {
        ExperimentConfig {
            problem: "vlmop2".to_owned(),
            method,
            batch_size: 2,
            init_points: 6,
            total_budget: 12,
            seeds: vec![7],
            optimiser: OptimiserSettings {
                sample_budget: Some(64),
                restarts: 2,
                fit_restarts: 1,
            },
            output_path: None,
            record_timing: false,
        }
    }

    fn per_seed(records: &[StepRecord], seed: u64) -> Vec<&StepRecord> {
        records.iter().filter(|r| r.seed == seed).collect()
    }

    #[test]
    fn random_runs_shrink_regret_monotonically() {
        let mut cfg = tiny_config(Method::Random);
        cfg.batch_size = 4;
        cfg.total_budget = 30;
        cfg.seeds = vec![1, 2];
        let outcome = run_experiment(&cfg).unwrap();
        assert!(outcome.failures.is_empty());
        for &seed in &cfg.seeds {
            let rows = per_seed(&outcome.records, seed);
            assert_eq!(rows[0].evaluations, 6);
            for pair in rows.windows(2) {
                assert!(pair[1].evaluations > pair[0].evaluations);
                assert!(pair[1].hv_regret <= pair[0].hv_regret);
            }
            assert_eq!(rows.last().unwrap().evaluations, 30);
        }
    }

    #[test]
    fn trailing_partial_batch_completes_the_budget() {
        let mut cfg = tiny_config(Method::Random);
        cfg.batch_size = 4;
        cfg.total_budget = 16;
        let outcome = run_experiment(&cfg).unwrap();
        let evals: Vec<usize> = outcome.records.iter().map(|r| r.evaluations).collect();
        assert_eq!(evals, vec![6, 10, 14, 16]);
    }

    #[test]
    fn zero_step_budget_records_only_the_initial_design() {
        let mut cfg = tiny_config(Method::Random);
        cfg.total_budget = cfg.init_points;
        let outcome = run_experiment(&cfg).unwrap();
        assert_eq!(outcome.records.len(), 1);
        assert_eq!(outcome.records[0].step, 0);
        assert_eq!(outcome.records[0].evaluations, 6);
    }

    #[test]
    fn reruns_emit_byte_identical_csv() {
        let cfg = tiny_config(Method::Hippo);
        let first = csv_string(&run_experiment(&cfg).unwrap().records);
        let second = csv_string(&run_experiment(&cfg).unwrap().records);
        assert_eq!(first, second);
    }

    #[test]
    fn seed_order_does_not_change_trajectories() {
        let mut forward = tiny_config(Method::Random);
        forward.seeds = vec![3, 9];
        let mut reverse = forward.clone();
        reverse.seeds = vec![9, 3];
        let a = run_experiment(&forward).unwrap();
        let b = run_experiment(&reverse).unwrap();
        for seed in [3, 9] {
            assert_eq!(per_seed(&a.records, seed), per_seed(&b.records, seed));
        }
    }

    #[test]
    fn single_point_hippo_and_sequential_ehvi_coincide() {
        let mut hippo = tiny_config(Method::Hippo);
        hippo.batch_size = 1;
        hippo.total_budget = 9;
        hippo.seeds = vec![5];
        let mut sequential = hippo.clone();
        sequential.method = Method::SequentialEhvi;
        sequential.batch_size = 3; // ignored: this method is one-at-a-time
        let a = run_experiment(&hippo).unwrap();
        let b = run_experiment(&sequential).unwrap();
        assert_eq!(a.datasets.len(), 1);
        assert_eq!(a.datasets[0].1.points(), b.datasets[0].1.points());
        assert_eq!(a.datasets[0].1.observations(), b.datasets[0].1.observations());
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn kriging_believer_runs_end_to_end() {
        let outcome = run_experiment(&tiny_config(Method::Kb)).unwrap();
        assert!(outcome.failures.is_empty());
        assert_eq!(outcome.records.last().unwrap().evaluations, 12);
    }

    #[test]
    fn csv_round_trips() {
        let records = vec![
            StepRecord {
                seed: 3,
                step: 0,
                evaluations: 6,
                hv_regret: 0.1,
                step_wall_time_s: 0.0,
            },
            StepRecord {
                seed: 3,
                step: 1,
                evaluations: 10,
                hv_regret: 1.25e-9,
                step_wall_time_s: 0.031_25,
            },
        ];
        let text = csv_string(&records);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(parse_csv(&text).unwrap(), records);

        assert_eq!(csv_string(&[]), format!("{CSV_HEADER}\n"));
        assert_eq!(parse_csv(&format!("{CSV_HEADER}\n")).unwrap(), vec![]);
    }

    #[test]
    fn malformed_csv_is_rejected_with_line_numbers() {
        let missing_header = parse_csv("a,b\n").unwrap_err();
        assert!(matches!(missing_header, HarnessError::CsvParse { line: 1, .. }));

        let bad_field = parse_csv(&format!("{CSV_HEADER}\n1,2,3,x,5\n")).unwrap_err();
        match bad_field {
            HarnessError::CsvParse { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("hv_regret"));
            }
            other => panic!("unexpected error {other:?}"),
        }

        let short_row = parse_csv(&format!("{CSV_HEADER}\n1,2,3\n")).unwrap_err();
        assert!(matches!(short_row, HarnessError::CsvParse { line: 2, .. }));
    }

    #[test]
    fn percentiles_match_a_sort_oracle() {
        let values = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(percentile(&values, 0.0), 1.0);
        assert_eq!(percentile(&values, 0.25), 2.0);
        assert_eq!(percentile(&values, 0.5), 3.0);
        assert_eq!(percentile(&values, 0.75), 4.0);
        assert_eq!(percentile(&values, 1.0), 5.0);
        // Interpolated rank 0.4 between the two smallest values.
        assert!((percentile(&values, 0.1) - 1.4).abs() < 1e-12);
        assert_eq!(percentile(&[2.5], 0.33), 2.5);
    }

    fn fake_record(seed: u64, step: usize, evaluations: usize, regret: f64) -> StepRecord {
        StepRecord {
            seed,
            step,
            evaluations,
            hv_regret: regret,
            step_wall_time_s: 0.0,
        }
    }

    #[test]
    fn single_seed_band_collapses_onto_the_mean() {
        let records = vec![fake_record(1, 0, 6, 3.0), fake_record(1, 1, 8, 2.0)];
        let band = series_band("solo", &records).unwrap();
        assert_eq!(band.evaluations, vec![6, 8]);
        assert_eq!(band.mean, band.lower);
        assert_eq!(band.mean, band.upper);
    }

    #[test]
    fn bands_resample_to_the_common_grid() {
        let records = vec![
            fake_record(1, 0, 6, 3.0),
            fake_record(1, 1, 10, 2.0),
            fake_record(1, 2, 14, 1.0),
            fake_record(2, 0, 6, 5.0),
            fake_record(2, 1, 10, 4.0),
        ];
        let band = series_band("mixed", &records).unwrap();
        assert_eq!(band.evaluations, vec![6, 10]);
        assert_eq!(band.mean, vec![4.0, 3.0]);
        assert_eq!(band.lower, vec![3.5, 2.5]);
        assert_eq!(band.upper, vec![4.5, 3.5]);

        let disjoint = vec![fake_record(1, 0, 6, 3.0), fake_record(2, 0, 8, 5.0)];
        assert!(matches!(
            series_band("disjoint", &disjoint).unwrap_err(),
            HarnessError::NoCommonGrid { .. }
        ));
    }

    #[test]
    fn plots_label_every_series() {
        let series = vec![
            (
                "hippo".to_owned(),
                vec![
                    fake_record(1, 0, 6, 3.0),
                    fake_record(1, 1, 8, 2.0),
                    fake_record(2, 0, 6, 4.0),
                    fake_record(2, 1, 8, 2.5),
                ],
            ),
            (
                "<kb & co>".to_owned(),
                vec![fake_record(1, 0, 6, 3.5), fake_record(1, 1, 8, 3.0)],
            ),
        ];
        let svg = emit_regret_plot(&series).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(">hippo</text>"));
        assert!(svg.contains("&lt;kb &amp; co&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("fill-opacity").count(), 2);
        assert!(svg.contains("hypervolume regret"));

        assert!(matches!(emit_regret_plot(&[]).unwrap_err(), HarnessError::NoSeries));
        let empty = vec![("x".to_owned(), vec![])];
        assert!(matches!(
            emit_regret_plot(&empty).unwrap_err(),
            HarnessError::EmptySeries { .. }
        ));
    }

    #[test]
    fn config_json_uses_documented_keys() {
        let full: ExperimentConfig = serde_json::from_str(
            r#"{
                "problem": "dtlz2",
                "method": "sequential-ehvi",
                "batch_size": 4,
                "init_points": 10,
                "total_budget": 90,
                "seeds": [0, 1, 2],
                "optimiser": {"sample_budget": 500, "restarts": 3, "fit_restarts": 2},
                "output_path": "runs/out.csv",
                "record_timing": false
            }"#,
        )
        .unwrap();
        assert_eq!(full.method, Method::SequentialEhvi);
        assert_eq!(full.optimiser.sample_budget, Some(500));
        assert_eq!(full.output_path, Some(PathBuf::from("runs/out.csv")));
        assert!(!full.record_timing);

        let minimal: ExperimentConfig = serde_json::from_str(
            r#"{
                "problem": "vlmop2",
                "method": "kb",
                "batch_size": 2,
                "init_points": 6,
                "total_budget": 12,
                "seeds": [7]
            }"#,
        )
        .unwrap();
        assert_eq!(minimal.method, Method::Kb);
        assert_eq!(minimal.optimiser, OptimiserSettings::default());
        assert_eq!(minimal.output_path, None);
        assert!(minimal.record_timing);
    }

    #[test]
    fn method_names_round_trip() {
        for method in Method::all() {
            assert_eq!(method.name().parse::<Method>().unwrap(), method);
            let json = serde_json::to_string(&method).unwrap();
            assert_eq!(json, format!("{:?}", method.name()));
        }
        assert!(matches!(
            "believer".parse::<Method>(),
            Err(HarnessError::UnknownMethod { .. })
        ));
    }

    #[test]
    fn configs_are_validated() {
        let good = tiny_config(Method::Random);
        assert!(good.validate().is_ok());

        let mut bad = good.clone();
        bad.init_points = 1;
        assert!(matches!(bad.validate(), Err(HarnessError::InitTooSmall { got: 1 })));

        let mut bad = good.clone();
        bad.batch_size = 0;
        assert!(matches!(bad.validate(), Err(HarnessError::ZeroBatchSize)));

        let mut bad = good.clone();
        bad.total_budget = 4;
        assert!(matches!(bad.validate(), Err(HarnessError::BudgetTooSmall { .. })));

        let mut bad = good.clone();
        bad.seeds.clear();
        assert!(matches!(bad.validate(), Err(HarnessError::NoSeeds)));

        let mut bad = good.clone();
        bad.seeds = vec![4, 2, 4];
        assert!(matches!(bad.validate(), Err(HarnessError::DuplicateSeed { seed: 4 })));

        let mut bad = good;
        bad.problem = "banana".to_owned();
        assert!(matches!(
            run_experiment(&bad).unwrap_err(),
            HarnessError::Benchmark(BenchmarkError::UnknownProblem { .. })
        ));
    }
}
