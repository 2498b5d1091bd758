//! Two-stage Monte Carlo resampling of rating datasets.
//!
//! For a vote count `n`, each simulated run draws `n` votes per condition:
//! first a user with probability proportional to how many votes they gave the
//! condition, then one of that user's scores for the condition. Metrics are
//! computed per run and summarised over runs into [`MetricCurve`]s.
//!
//! # Seeding
//!
//! Every (vote count, run, condition) triple owns an independent ChaCha8
//! stream. The 64-bit seed is `mix(mix(mix(master) ^ n) ^ run)` with `mix` the
//! SplitMix64 finalizer, and the ChaCha stream id is `condition << 1 | purpose`
//! where purpose 0 draws votes and purpose 1 drives the bootstrap. Results do
//! not depend on scheduling or worker count, and selecting more metrics never
//! changes the votes drawn.

use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_ci_counts, DEFAULT_RESAMPLES, MIN_RESAMPLES};
use crate::data::{ConditionTable, RatingDataset, ReferenceMos, Score, ScoreCounts};
use crate::error::{Error, Result};
use crate::special::student_t_quantile;
use crate::stats::{self, mapped_rmse, rmse, srcc, MosKind, MosVector};

/// Vote count whose value is subtracted to form the certainty-gain deltas.
pub const BASELINE_VOTES: u32 = 10;
pub const DEFAULT_REPETITIONS: u32 = 250;
pub const DEFAULT_MIN_CONDITIONS_PER_USER: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// SRCC of the run MOS against the reference MOS.
    ValiditySrcc,
    /// RMSE of the run MOS against the reference MOS.
    ValidityRmse,
    /// SRCC of the run MOS against the full-data MOS.
    GainSrcc,
    /// RMSE of the run MOS against the full-data MOS.
    GainRmse,
    /// Mean bootstrap CI width of the run MOS.
    CiWidth,
    /// Mean leave-one-out SRCC between each user and everyone else.
    Irr,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::ValiditySrcc,
        Metric::ValidityRmse,
        Metric::GainSrcc,
        Metric::GainRmse,
        Metric::CiWidth,
        Metric::Irr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::ValiditySrcc => "validity_srcc",
            Metric::ValidityRmse => "validity_rmse",
            Metric::GainSrcc => "gain_srcc",
            Metric::GainRmse => "gain_rmse",
            Metric::CiWidth => "ci_width",
            Metric::Irr => "irr",
        }
    }

    pub fn needs_reference(self) -> bool {
        matches!(self, Metric::ValiditySrcc | Metric::ValidityRmse)
    }

    /// Name of the baseline-shifted curve, for metrics that have one.
    pub fn delta_name(self) -> Option<&'static str> {
        match self {
            Metric::GainSrcc => Some("gain_srcc_delta"),
            Metric::GainRmse => Some("gain_rmse_delta"),
            _ => None,
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim() {
            "validity_srcc" | "srcc" => Metric::ValiditySrcc,
            "validity_rmse" | "rmse" => Metric::ValidityRmse,
            "gain_srcc" => Metric::GainSrcc,
            "gain_rmse" => Metric::GainRmse,
            "ci_width" | "ci" => Metric::CiWidth,
            "irr" => Metric::Irr,
            other => {
                let known: Vec<_> = Metric::ALL.iter().map(|m| m.name()).collect();
                return Err(Error::Config(format!(
                    "unknown metric `{other}` (known: {})",
                    known.join(", ")
                )));
            }
        };
        Ok(m)
    }
}

/// Inclusive `start:stop:step` range of vote counts.
pub fn parse_sweep(spec: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("vote sweep `{spec}` is not start:stop:step"));
    let nums: Vec<u32> = match parts.len() {
        1 | 3 => parts
            .iter()
            .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?,
        _ => return Err(bad()),
    };
    let (start, stop, step) = match nums[..] {
        [n] => (n, n, 1),
        [a, b, c] => (a, b, c),
        _ => unreachable!(),
    };
    if start == 0 || step == 0 || stop < start {
        return Err(Error::Config(format!(
            "vote sweep `{spec}` needs 0 < start <= stop and step > 0"
        )));
    }
    Ok((start..=stop).step_by(step as usize).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_values: Vec<u32>,
    pub repetitions: u32,
    pub master_seed: u64,
    pub metrics: Vec<Metric>,
    pub bootstrap_resamples: u32,
    pub ci_level: f64,
    pub apply_first_order_map: bool,
    pub min_conditions_per_user: u32,
    /// Aggregation of the full-data MOS that certainty gain compares against.
    #[serde(default)]
    pub full_mos_kind: MosKind,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_values: (10..=200).step_by(10).collect(),
            repetitions: DEFAULT_REPETITIONS,
            master_seed: 0,
            metrics: vec![Metric::GainSrcc, Metric::GainRmse],
            bootstrap_resamples: DEFAULT_RESAMPLES as u32,
            ci_level: 0.95,
            apply_first_order_map: false,
            min_conditions_per_user: DEFAULT_MIN_CONDITIONS_PER_USER,
            full_mos_kind: MosKind::UserBalanced,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n_values.is_empty() {
            return cfg("no vote counts to simulate".into());
        }
        if self.n_values[0] == 0 {
            return cfg("vote counts must be positive".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return cfg("vote counts must be strictly increasing".into());
        }
        if self.repetitions == 0 {
            return cfg("at least one repetition is required".into());
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return cfg(format!("ci level must be in (0, 1), got {}", self.ci_level));
        }
        if self.metrics.is_empty() {
            return cfg("no metrics selected".into());
        }
        let mut seen = self.metrics.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return cfg("metric listed twice".into());
        }
        if self.metrics.contains(&Metric::CiWidth) {
            if (self.bootstrap_resamples as usize) < MIN_RESAMPLES {
                return cfg(format!(
                    "at least {MIN_RESAMPLES} bootstrap resamples are required, got {}",
                    self.bootstrap_resamples
                ));
            }
            if self.n_values[0] < 2 {
                return cfg("CI width needs at least 2 votes per condition".into());
            }
        }
        Ok(())
    }

    fn with_metrics(&self, metrics: Vec<Metric>) -> Self {
        SweepConfig {
            metrics,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: u32,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub std_dev: f64,
    /// Runs that produced a defined value.
    pub runs: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricCurve {
    pub metric: String,
    pub dataset_label: String,
    pub points: Vec<CurvePoint>,
}

impl MetricCurve {
    pub fn point(&self, n: u32) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.n == n)
    }

    /// `(n, mean)` pairs, the input of a power-model fit.
    pub fn xy(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (f64::from(p.n), p.mean))
            .collect()
    }

    /// The curve minus its value at `baseline`.
    pub fn shifted_by(&self, baseline: u32, metric: &str) -> Result<MetricCurve> {
        let base = self
            .point(baseline)
            .ok_or_else(|| {
                Error::Config(format!(
                    "baseline n = {baseline} is not part of the vote sweep"
                ))
            })?
            .mean;
        Ok(MetricCurve {
            metric: metric.to_string(),
            dataset_label: self.dataset_label.clone(),
            points: self
                .points
                .iter()
                .map(|p| CurvePoint {
                    mean: p.mean - base,
                    ci_low: p.ci_low - base,
                    ci_high: p.ci_high - base,
                    ..*p
                })
                .collect(),
        })
    }
}

/// Votes drawn for one condition in one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionSample {
    pub scores: Vec<u8>,
    /// Dataset user index of each vote.
    pub users: Vec<usize>,
}

impl ConditionSample {
    pub fn counts(&self) -> ScoreCounts {
        ScoreCounts::from_votes(&self.scores).expect("sampled scores are on the scale")
    }

    pub fn mos(&self) -> f64 {
        stats::mos_plain(&self.scores).expect("non-empty sample")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSample {
    pub run_index: u32,
    /// One entry per dataset condition, in dataset order.
    pub per_condition_votes: Vec<ConditionSample>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamPurpose {
    Votes = 0,
    Bootstrap = 1,
}

/// RNG for one (vote count, run, condition, purpose).
pub fn substream(
    master_seed: u64,
    n: u32,
    run: u32,
    condition: usize,
    purpose: StreamPurpose,
) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(master_seed) ^ u64::from(n)) ^ u64::from(run));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(((condition as u64) << 1) | purpose as u64);
    rng
}

/// Precomputed two-stage sampling distribution of one condition.
#[derive(Clone, Debug)]
pub struct ConditionSampler {
    users: Vec<usize>,
    pick_user: WeightedIndex<u64>,
    pick_score: Vec<WeightedIndex<u32>>,
}

impl ConditionSampler {
    pub fn new(table: &ConditionTable) -> Self {
        let users = table.users.iter().map(|u| u.user).collect();
        let pick_user = WeightedIndex::new(table.users.iter().map(|u| u.counts.total()))
            .expect("condition has votes");
        let pick_score = table
            .users
            .iter()
            .map(|u| {
                WeightedIndex::new(u.counts.as_array().iter().copied()).expect("user has votes")
            })
            .collect();
        ConditionSampler {
            users,
            pick_user,
            pick_score,
        }
    }

    /// One vote: `(user index, score)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Score) {
        let slot = self.pick_user.sample(rng);
        let q = self.pick_score[slot].sample(rng);
        (self.users[slot], Score::from_index(q))
    }

    pub fn draw_n<R: Rng + ?Sized>(&self, n: u32, rng: &mut R) -> ConditionSample {
        let mut out = ConditionSample {
            scores: Vec::with_capacity(n as usize),
            users: Vec::with_capacity(n as usize),
        };
        for _ in 0..n {
            let (u, s) = self.draw(rng);
            out.users.push(u);
            out.scores.push(s.get());
        }
        out
    }
}

/// Draws `n` votes for one condition, returning scores and user ids.
pub fn sample_condition<R: Rng + ?Sized>(
    ds: &RatingDataset,
    condition: &str,
    n: u32,
    rng: &mut R,
) -> Result<(Vec<u8>, Vec<String>)> {
    let x = ds.require_condition(condition)?;
    let s = ConditionSampler::new(ds.table(x)).draw_n(n, rng);
    let users = s.users.iter().map(|&u| ds.users()[u].clone()).collect();
    Ok((s.scores, users))
}

fn samplers(ds: &RatingDataset) -> Vec<ConditionSampler> {
    ds.tables().iter().map(ConditionSampler::new).collect()
}

fn draw_with(samplers: &[ConditionSampler], master_seed: u64, n: u32, run: u32) -> RunSample {
    RunSample {
        run_index: run,
        per_condition_votes: samplers
            .iter()
            .enumerate()
            .map(|(x, s)| {
                s.draw_n(
                    n,
                    &mut substream(master_seed, n, run, x, StreamPurpose::Votes),
                )
            })
            .collect(),
    }
}

/// The votes of run `run` at vote count `n`, as used by [`run_sweep`].
pub fn draw_run(ds: &RatingDataset, master_seed: u64, n: u32, run: u32) -> RunSample {
    draw_with(&samplers(ds), master_seed, n, run)
}

/// Vote sum and count of one user for one condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tally {
    pub user: usize,
    pub sum: u64,
    pub count: u64,
}

/// Leave-one-out inter-rater reliability.
///
/// For each user, correlates (SRCC) their per-condition MOS with the MOS of
/// all other votes on the same conditions, then averages over users. Users
/// with fewer than `min_conditions` conditions that also have other voters, or
/// for whom the correlation is undefined (constant MOS on either side), are
/// skipped. Returns `None` when no user qualifies.
pub fn inter_rater_reliability(
    tables: &[Vec<Tally>],
    num_users: usize,
    min_conditions: usize,
) -> Option<f64> {
    let mut own: Vec<Vec<f64>> = vec![Vec::new(); num_users];
    let mut others: Vec<Vec<f64>> = vec![Vec::new(); num_users];
    for cond in tables {
        let sum: u64 = cond.iter().map(|t| t.sum).sum();
        let count: u64 = cond.iter().map(|t| t.count).sum();
        for t in cond {
            let rest = count - t.count;
            if t.count == 0 || rest == 0 {
                continue;
            }
            own[t.user].push(t.sum as f64 / t.count as f64);
            others[t.user].push((sum - t.sum) as f64 / rest as f64);
        }
    }
    let values: Vec<f64> = own
        .iter()
        .zip(&others)
        .filter(|(a, _)| a.len() >= min_conditions)
        .filter_map(|(a, b)| srcc(a, b).ok())
        .collect();
    stats::mean(&values)
}

fn dataset_tallies(ds: &RatingDataset) -> Vec<Vec<Tally>> {
    ds.tables()
        .iter()
        .map(|t| {
            t.users
                .iter()
                .map(|u| Tally {
                    user: u.user,
                    sum: u.counts.sum(),
                    count: u.counts.total(),
                })
                .collect()
        })
        .collect()
}

fn sample_tallies(sample: &RunSample) -> Vec<Vec<Tally>> {
    sample
        .per_condition_votes
        .iter()
        .map(|c| {
            let mut pairs: Vec<(usize, u8)> = c
                .users
                .iter()
                .copied()
                .zip(c.scores.iter().copied())
                .collect();
            pairs.sort_unstable();
            let mut out: Vec<Tally> = Vec::new();
            for (u, s) in pairs {
                match out.last_mut() {
                    Some(t) if t.user == u => {
                        t.sum += u64::from(s);
                        t.count += 1;
                    }
                    _ => out.push(Tally {
                        user: u,
                        sum: u64::from(s),
                        count: 1,
                    }),
                }
            }
            out
        })
        .collect()
}

/// IRR of the complete, unsampled dataset.
pub fn irr_full(ds: &RatingDataset, min_conditions_per_user: u32) -> Result<f64> {
    inter_rater_reliability(
        &dataset_tallies(ds),
        ds.num_users(),
        min_conditions_per_user as usize,
    )
    .ok_or_else(|| Error::Undefined("no user qualifies for inter-rater reliability".into()))
}

struct Engine<'a> {
    cfg: &'a SweepConfig,
    num_users: usize,
    samplers: Vec<ConditionSampler>,
    full_mos: Vec<f64>,
    /// Dataset indices of conditions with a reference value, and those values.
    reference: Option<(Vec<usize>, Vec<f64>)>,
}

impl<'a> Engine<'a> {
    fn new(
        ds: &RatingDataset,
        reference: Option<&ReferenceMos>,
        cfg: &'a SweepConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let needs_ref = cfg.metrics.iter().any(|m| m.needs_reference());
        let reference = match (needs_ref, reference) {
            (true, None) => {
                return Err(Error::Config(
                    "validity metrics need a reference MOS table".into(),
                ))
            }
            (true, Some(r)) => {
                let (idx, vals): (Vec<usize>, Vec<f64>) = ds
                    .conditions()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, c)| r.get(c).map(|v| (i, v)))
                    .unzip();
                if idx.len() < 3 {
                    return Err(Error::TooFew {
                        what: "conditions shared with the reference",
                        need: 3,
                        got: idx.len(),
                    });
                }
                Some((idx, vals))
            }
            (false, _) => None,
        };
        let gains = cfg
            .metrics
            .iter()
            .any(|m| matches!(m, Metric::GainSrcc | Metric::GainRmse));
        if gains && ds.num_conditions() < 3 {
            return Err(Error::TooFew {
                what: "conditions",
                need: 3,
                got: ds.num_conditions(),
            });
        }
        Ok(Engine {
            cfg,
            num_users: ds.num_users(),
            samplers: samplers(ds),
            full_mos: MosVector::from_dataset(ds, cfg.full_mos_kind).values,
            reference,
        })
    }

    fn evaluate(&self, n: u32, run: u32) -> Vec<Option<f64>> {
        let cfg = self.cfg;
        let sample = draw_with(&self.samplers, cfg.master_seed, n, run);
        let mos: Vec<f64> = sample
            .per_condition_votes
            .iter()
            .map(ConditionSample::mos)
            .collect();
        let shared = || {
            let (idx, vals) = self.reference.as_ref().expect("reference checked");
            (idx.iter().map(|&i| mos[i]).collect::<Vec<f64>>(), vals)
        };
        cfg.metrics
            .iter()
            .map(|metric| match metric {
                Metric::ValiditySrcc => {
                    let (m, r) = shared();
                    srcc(&m, r).ok()
                }
                Metric::ValidityRmse => {
                    let (m, r) = shared();
                    if cfg.apply_first_order_map {
                        mapped_rmse(&m, r).ok().map(|(v, _)| v)
                    } else {
                        rmse(&m, r).ok()
                    }
                }
                Metric::GainSrcc => srcc(&mos, &self.full_mos).ok(),
                Metric::GainRmse => rmse(&mos, &self.full_mos).ok(),
                Metric::CiWidth => {
                    let widths: Option<Vec<f64>> = sample
                        .per_condition_votes
                        .iter()
                        .enumerate()
                        .map(|(x, c)| {
                            let mut rng =
                                substream(cfg.master_seed, n, run, x, StreamPurpose::Bootstrap);
                            bootstrap_ci_counts(
                                &c.counts(),
                                cfg.bootstrap_resamples as usize,
                                cfg.ci_level,
                                &mut rng,
                            )
                            .ok()
                            .map(|ci| ci.width())
                        })
                        .collect();
                    widths.and_then(|w| stats::mean(&w))
                }
                Metric::Irr => inter_rater_reliability(
                    &sample_tallies(&sample),
                    self.num_users,
                    cfg.min_conditions_per_user as usize,
                ),
            })
            .collect()
    }
}

/// Mean, sample standard deviation and t-based CI of the mean.
fn summarize(n: u32, values: &[f64], level: f64) -> CurvePoint {
    let mean = stats::mean(values).expect("non-empty");
    let std_dev = stats::sample_std(values);
    let half = if values.len() >= 2 {
        let t = student_t_quantile((1.0 + level) / 2.0, (values.len() - 1) as f64);
        t * std_dev / (values.len() as f64).sqrt()
    } else {
        0.0
    };
    CurvePoint {
        n,
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        std_dev,
        runs: values.len() as u32,
    }
}

/// Runs the full simulation and returns one curve per selected metric, plus
/// baseline-shifted certainty-gain curves when the sweep contains
/// [`BASELINE_VOTES`].
///
/// Work is spread over the current rayon pool; see [`with_workers`].
pub fn run_sweep(
    ds: &RatingDataset,
    reference: Option<&ReferenceMos>,
    cfg: &SweepConfig,
) -> Result<Vec<MetricCurve>> {
    let engine = Engine::new(ds, reference, cfg)?;
    let r = cfg.repetitions;
    let jobs: Vec<(u32, u32)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..r).map(move |i| (n, i)))
        .collect();
    let results: Vec<Vec<Option<f64>>> = jobs
        .par_iter()
        .map(|&(n, i)| engine.evaluate(n, i))
        .collect();

    let mut curves = Vec::with_capacity(cfg.metrics.len());
    for (mi, metric) in cfg.metrics.iter().enumerate() {
        let mut points = Vec::with_capacity(cfg.n_values.len());
        for (ni, &n) in cfg.n_values.iter().enumerate() {
            let chunk = &results[ni * r as usize..(ni + 1) * r as usize];
            let values: Vec<f64> = chunk.iter().filter_map(|v| v[mi]).collect();
            if values.is_empty() {
                return Err(Error::Undefined(format!(
                    "{metric} is undefined in every run at n = {n}"
                )));
            }
            points.push(summarize(n, &values, cfg.ci_level));
        }
        curves.push(MetricCurve {
            metric: metric.name().to_string(),
            dataset_label: ds.label().to_string(),
            points,
        });
    }
    if cfg.n_values.contains(&BASELINE_VOTES) {
        let deltas: Vec<MetricCurve> = cfg
            .metrics
            .iter()
            .zip(&curves)
            .filter_map(|(m, c)| m.delta_name().map(|d| c.shifted_by(BASELINE_VOTES, d)))
            .collect::<Result<_>>()?;
        curves.extend(deltas);
    }
    Ok(curves)
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertaintyGain {
    /// `G(n)`: SRCC against the full-data MOS.
    pub srcc: MetricCurve,
    /// `G*(n)`: RMSE against the full-data MOS.
    pub rmse: MetricCurve,
    pub srcc_delta: Option<MetricCurve>,
    pub rmse_delta: Option<MetricCurve>,
}

/// Certainty-gain curves; with `with_delta` the sweep must contain [`BASELINE_VOTES`].
pub fn certainty_gain(
    ds: &RatingDataset,
    cfg: &SweepConfig,
    with_delta: bool,
) -> Result<CertaintyGain> {
    if with_delta && !cfg.n_values.contains(&BASELINE_VOTES) {
        return Err(Error::Config(format!(
            "certainty-gain deltas need n = {BASELINE_VOTES} in the vote sweep"
        )));
    }
    let cfg = cfg.with_metrics(vec![Metric::GainSrcc, Metric::GainRmse]);
    let mut curves = run_sweep(ds, None, &cfg)?.into_iter();
    let srcc = curves.next().expect("gain_srcc");
    let rmse = curves.next().expect("gain_rmse");
    let (srcc_delta, rmse_delta) = if with_delta {
        (curves.next(), curves.next())
    } else {
        (None, None)
    };
    Ok(CertaintyGain {
        srcc,
        rmse,
        srcc_delta,
        rmse_delta,
    })
}

/// Average bootstrap CI width `W(n)`.
pub fn ci_width_curve(ds: &RatingDataset, cfg: &SweepConfig) -> Result<MetricCurve> {
    let cfg = cfg.with_metrics(vec![Metric::CiWidth]);
    Ok(run_sweep(ds, None, &cfg)?.remove(0))
}

/// Inter-rater reliability `Γ(n)`.
pub fn irr_curve(
    ds: &RatingDataset,
    cfg: &SweepConfig,
    min_conditions_per_user: u32,
) -> Result<MetricCurve> {
    let cfg = SweepConfig {
        min_conditions_per_user,
        ..cfg.with_metrics(vec![Metric::Irr])
    };
    Ok(run_sweep(ds, None, &cfg)?.remove(0))
}
