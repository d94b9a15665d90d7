//! Trials, Monte Carlo sweeps over alpha and their persisted outputs.
//!
//! Within a trial every alpha branch consumes the same layout, mobility,
//! fading and k-means streams (common random numbers). Trial seeds come from
//! [`crate::rng::trial_seed`], so a Monte Carlo run with more realizations
//! reproduces the earlier trials exactly.

mod config;
mod output;

use rayon::prelude::*;

pub use config::{ExperimentConfig, HandoverReference};
pub use output::{emit_outputs, metrics_csv, snapshot_csv, summary_csv};

use crate::channel::{channel_gains, complex_channel, ChannelGains};
use crate::clustering::{initial_partition, spectral_partition, temporal_smoothed_partition, Partition};
use crate::error::Result;
use crate::graph::build_graph;
use crate::metrics::{record_step, MetricsRecord};
use crate::rng::{derive_seed, tag, trial_seed};
use crate::topology::{generate_layout, step_waypoint, Layout};

/// Seeds consumed at one instant, shared by every alpha branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepSeeds {
    /// Layout seed at the first instant, mobility seed afterwards.
    pub topology: u64,
    pub fading: Option<u64>,
    pub kmeans: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time_index: usize,
    pub layout: Layout,
    /// One partition per alpha, in grid order.
    pub partitions: Vec<Partition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_seed: u64,
    pub alphas: Vec<f64>,
    /// `records[a][t]` for alpha index `a` and instant `t`.
    pub records: Vec<Vec<MetricsRecord>>,
    pub seeds: Vec<StepSeeds>,
    pub snapshots: Vec<Snapshot>,
}

/// Runs one trajectory for every alpha in the grid.
pub fn run_trial(config: &ExperimentConfig, trial_seed: u64) -> Result<TrialResult> {
    run_trial_inner(config, trial_seed, false)
}

/// As [`run_trial`], additionally keeping positions and partitions of every
/// instant.
pub fn run_trial_with_snapshots(config: &ExperimentConfig, trial_seed: u64) -> Result<TrialResult> {
    run_trial_inner(config, trial_seed, true)
}

fn run_trial_inner(config: &ExperimentConfig, seed: u64, keep_snapshots: bool) -> Result<TrialResult> {
    config.validate()?;
    let radio = config.radio();
    let alphas = config.alpha_grid.clone();
    let mut records: Vec<Vec<MetricsRecord>> = vec![Vec::with_capacity(config.time_steps); alphas.len()];
    let mut seeds = Vec::with_capacity(config.time_steps);
    let mut snapshots = Vec::new();

    let layout_seed = derive_seed(seed, tag::LAYOUT, 0);
    let mut layout = generate_layout(config.num_users, config.num_bs, layout_seed)?;
    let mut previous: Option<(ChannelGains, crate::graph::AffinityGraph)> = None;
    let mut previous_partitions: Vec<Partition> = Vec::new();
    let mut previous_benchmark: Option<Partition> = None;

    for t in 0..config.time_steps {
        let topology_seed = if t == 0 {
            layout_seed
        } else {
            let s = derive_seed(seed, tag::MOBILITY, t as u64);
            layout = step_waypoint(&layout, &config.mobility, s)?;
            s
        };
        let gains = channel_gains(&layout, &radio, None);
        let graph = build_graph(&gains);
        let fading_seed = config.evaluate_zfbf.then(|| derive_seed(seed, tag::FADING, t as u64));
        let faded = fading_seed.map(|s| {
            let h = complex_channel(&layout, &radio, s);
            let g = ChannelGains::from_complex(&h);
            g.map(|g| (g, h))
        });
        let faded = faded.transpose()?;
        let kmeans_seed = derive_seed(seed, tag::KMEANS, t as u64);
        seeds.push(StepSeeds {
            topology: topology_seed,
            fading: fading_seed,
            kmeans: kmeans_seed,
        });

        let benchmark = spectral_partition(&graph, &config.spectral(1.0, kmeans_seed))?;
        let mut partitions = Vec::with_capacity(alphas.len());
        for (a, &alpha) in alphas.iter().enumerate() {
            let cfg = config.spectral(alpha, kmeans_seed);
            let partition = match &previous {
                None => initial_partition(&graph, &cfg)?,
                Some((_, graph_prev)) => temporal_smoothed_partition(graph_prev, &graph, &cfg)?,
            };
            let reference = match config.handover_reference {
                HandoverReference::Own => previous_partitions.get(a),
                HandoverReference::Benchmark => previous_benchmark.as_ref(),
            };
            let record = record_step(
                t,
                &gains,
                previous.as_ref().map(|(g, _)| g),
                reference,
                &partition,
                faded.as_ref().map(|(g, h)| (g, h)),
                &radio,
            )?;
            records[a].push(record);
            partitions.push(partition);
        }
        if keep_snapshots {
            snapshots.push(Snapshot {
                time_index: t,
                layout: layout.clone(),
                partitions: partitions.clone(),
            });
        }
        previous_partitions = partitions;
        previous_benchmark = Some(benchmark);
        previous = Some((gains, graph));
    }
    Ok(TrialResult {
        trial_seed: seed,
        alphas,
        records,
        seeds,
        snapshots,
    })
}

/// Per-trial step averages of one alpha branch. Rates and handovers use
/// instants after the first; a single-instant trial falls back to the
/// first instant for the rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMeans {
    pub sum_rate: f64,
    pub temporal_smoothness: Option<f64>,
    pub handovers: Option<f64>,
    pub zfbf_sum_rate: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

pub fn trial_means(records: &[MetricsRecord]) -> TrialMeans {
    let later = if records.len() > 1 { &records[1..] } else { records };
    TrialMeans {
        sum_rate: mean(later.iter().map(|r| r.sum_rate)).unwrap_or(f64::NAN),
        temporal_smoothness: mean(records.iter().filter_map(|r| r.temporal_smoothness)),
        handovers: mean(records.iter().filter_map(|r| r.handovers.map(|h| h as f64))),
        zfbf_sum_rate: mean(later.iter().filter_map(|r| r.zfbf_sum_rate)),
    }
}

/// Mean and standard error over trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// NaN with fewer than two samples.
    pub std_err: f64,
    pub samples: usize,
}

impl Estimate {
    /// Sequential summation in the given order, so results do not depend
    /// on how trials were scheduled.
    pub fn from_samples(samples: &[f64]) -> Option<Estimate> {
        let n = samples.len();
        if n == 0 {
            return None;
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            f64::NAN
        };
        Some(Estimate {
            mean,
            std_err,
            samples: n,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSummary {
    pub alpha: f64,
    pub sum_rate: Estimate,
    pub temporal_smoothness: Option<Estimate>,
    pub handovers: Option<Estimate>,
    pub zfbf_sum_rate: Option<Estimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub trials: Vec<TrialResult>,
    pub summary: Vec<AlphaSummary>,
}

pub fn summarize(alphas: &[f64], trials: &[TrialResult]) -> Vec<AlphaSummary> {
    alphas
        .iter()
        .enumerate()
        .map(|(a, &alpha)| {
            let means: Vec<TrialMeans> = trials.iter().map(|t| trial_means(&t.records[a])).collect();
            let collect = |f: &dyn Fn(&TrialMeans) -> Option<f64>| -> Option<Estimate> {
                Estimate::from_samples(&means.iter().filter_map(f).collect::<Vec<_>>())
            };
            AlphaSummary {
                alpha,
                sum_rate: collect(&|m| Some(m.sum_rate)).expect("at least one trial"),
                temporal_smoothness: collect(&|m| m.temporal_smoothness),
                handovers: collect(&|m| m.handovers),
                zfbf_sum_rate: collect(&|m| m.zfbf_sum_rate),
            }
        })
        .collect()
}

/// Runs `config.realizations` independent trials in parallel and aggregates
/// them per alpha. Trial 0 keeps its snapshots.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<MonteCarloResult> {
    config.validate()?;
    let trials = (0..config.realizations)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(config.master_seed, i as u64);
            run_trial_inner(config, seed, i == 0)
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&config.alpha_grid, &trials);
    Ok(MonteCarloResult { trials, summary })
}
