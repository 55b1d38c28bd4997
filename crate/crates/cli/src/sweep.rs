//! Seeded sweeps. Each sample draws from its own ChaCha8 stream (stream
//! index = sample index), so samples are independent of evaluation order
//! and of the number of worker threads.

use clustered_vandermonde::dd_bases::graded_singular_values;
use clustered_vandermonde::lsq::perturbation_experiment;
use clustered_vandermonde::nodes::{generate_multi_cluster, measure_stats};
use clustered_vandermonde::subspace::{cluster_angle_matrix, union_spectrum_compare};
use clustered_vandermonde::NodeSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Axis, Config, Experiment, Scale};
use crate::error::{CliError, CliResult};
use crate::record::SweepRecord;

/// Parameters of one sample, fixed before any evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub sample: u64,
    pub n: usize,
    /// Configured size of each cluster.
    pub h: Vec<f64>,
    pub theta: f64,
    pub eps: Option<f64>,
    pub node_seed: u64,
    pub noise_seed: u64,
}

fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

fn round_n(v: f64) -> usize {
    v.round().max(1.0) as usize
}

fn sizes_at(scale: &Scale, n: usize, mut t: impl FnMut() -> f64) -> Vec<f64> {
    match scale {
        Scale::Common(axis) => vec![axis.at(t()) / n as f64],
        Scale::PerCluster(axes) => axes.iter().map(|a| a.map_or(0.0, |a| a.at(t()))).collect(),
    }
}

fn expand(sizes: Vec<f64>, clusters: usize) -> Vec<f64> {
    if sizes.len() == 1 && clusters > 1 {
        vec![sizes[0]; clusters]
    } else {
        sizes
    }
}

/// Sample points of a randomized sweep: `N`, sizes and noise are drawn
/// log-uniformly from their ranges.
pub fn random_plan(cfg: &Config, seed: u64) -> CliResult<Vec<SamplePoint>> {
    let n_axis = cfg.n_axis()?;
    let scale = cfg.scale()?;
    let noise = cfg.noise_eps_range.map(|[lo, hi]| Axis::Range(lo, hi));
    let theta = cfg.thetas()[0];
    Ok((0..cfg.samples as u64)
        .map(|sample| {
            let mut rng = sample_rng(seed, sample);
            let n = round_n(n_axis.at(rng.random()));
            let h = expand(sizes_at(&scale, n, || rng.random()), cfg.clusters.len());
            let u_eps: f64 = rng.random();
            SamplePoint {
                sample,
                n,
                h,
                theta,
                eps: noise.map(|a| a.at(u_eps)),
                node_seed: rng.random(),
                noise_seed: rng.random(),
            }
        })
        .collect())
}

/// Sample points of a grid sweep: for each `theta`, `samples` points
/// log-spaced along whichever axis is a range.
pub fn grid_plan(cfg: &Config, seed: u64) -> CliResult<Vec<SamplePoint>> {
    let n_axis = cfg.n_axis()?;
    let scale = cfg.scale()?;
    let m = cfg.samples;
    let mut points = Vec::new();
    for (k, &theta) in cfg.thetas().iter().enumerate() {
        for i in 0..m {
            let t = if m == 1 { 0.0 } else { i as f64 / (m - 1) as f64 };
            let sample = (k * m + i) as u64;
            let mut rng = sample_rng(seed, sample);
            let n = round_n(n_axis.at(t));
            let h = expand(sizes_at(&scale, n, || t), cfg.clusters.len());
            points.push(SamplePoint { sample, n, h, theta, eps: None, node_seed: rng.random(), noise_seed: 0 });
        }
    }
    Ok(points)
}

fn build_nodes(cfg: &Config, p: &SamplePoint) -> CliResult<NodeSet> {
    Ok(generate_multi_cluster(&cfg.cluster_config(&p.h, p.theta), p.node_seed)?)
}

fn base_record(cfg: &Config, seed: u64, p: &SamplePoint, nodes: &NodeSet) -> CliResult<SweepRecord> {
    let stats = measure_stats(nodes)?;
    let h = stats.h.iter().copied().fold(0.0, f64::max);
    Ok(SweepRecord {
        experiment: cfg.experiment,
        sample: p.sample,
        seed,
        n: p.n,
        h,
        nh: p.n as f64 * h,
        theta: stats.theta,
        s_profile: cfg.multiplicities(),
        eps: p.eps,
        beta: None,
        sigma: Vec::new(),
        delta_a: Vec::new(),
        cluster: Vec::new(),
        kappa: None,
        valid: true,
        bound_ok: None,
    })
}

fn eval_angles(cfg: &Config, seed: u64, p: &SamplePoint) -> CliResult<SweepRecord> {
    let nodes = build_nodes(cfg, p)?;
    let mut rec = base_record(cfg, seed, p, &nodes)?;
    let alpha = cluster_angle_matrix(&nodes, p.n)?.alpha;
    rec.beta = Some(alpha);
    rec.valid = alpha <= 1.0 / nodes.len() as f64;
    Ok(rec)
}

fn eval_spectrum(cfg: &Config, seed: u64, p: &SamplePoint) -> CliResult<SweepRecord> {
    let nodes = build_nodes(cfg, p)?;
    let mut rec = base_record(cfg, seed, p, &nodes)?;
    let sv = graded_singular_values(&nodes, p.n)?;
    let root_n = (p.n as f64).sqrt();
    rec.sigma = sv.values().iter().map(|v| v / root_n).collect();
    rec.kappa = Some(sv.condition_number());
    rec.cluster = nodes.cluster_labels();
    if cfg.clusters.len() == 1 {
        rec.valid = rec.nh / 2.0 < 1.0;
    } else {
        let report = union_spectrum_compare(&nodes, p.n)?;
        rec.beta = Some(report.alpha);
        rec.valid = report.alpha <= 1.0 / nodes.len() as f64;
        rec.bound_ok = report.bounds_ok;
    }
    Ok(rec)
}

fn eval_leastsq(cfg: &Config, seed: u64, p: &SamplePoint) -> CliResult<SweepRecord> {
    let nodes = build_nodes(cfg, p)?;
    let mut rec = base_record(cfg, seed, p, &nodes)?;
    let eps = p.eps.ok_or_else(|| CliError::Config("leastsq sample without noise level".into()))?;
    let r = perturbation_experiment(&nodes, p.n, eps, p.noise_seed, cfg.complex_noise)?;
    rec.delta_a = r.delta_a.clone().unwrap_or_default();
    rec.kappa = Some(r.kappa);
    rec.cluster = r.cluster.clone();
    rec.valid = r.in_regime && r.delta_a.is_some();
    rec.bound_ok = Some(r.holder_violations() == 0);
    Ok(rec)
}

fn evaluate(
    cfg: &Config,
    seed: u64,
    points: &[SamplePoint],
    jobs: usize,
    eval: fn(&Config, u64, &SamplePoint) -> CliResult<SweepRecord>,
) -> CliResult<Vec<SweepRecord>> {
    let run = || points.par_iter().map(|p| eval(cfg, seed, p)).collect::<CliResult<Vec<_>>>();
    let mut records = if jobs == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?
            .install(run)?
    };
    records.sort_by_key(|r| r.sample);
    Ok(records)
}

/// Two-cluster angle sweep over `N` (fixed `N h`) or over `h` (fixed `N`).
pub fn run_angles(cfg: &Config, seed: u64, jobs: usize) -> CliResult<Vec<SweepRecord>> {
    expect(cfg, Experiment::Angles)?;
    evaluate(cfg, seed, &grid_plan(cfg, seed)?, jobs, eval_angles)
}

pub fn run_spectrum(cfg: &Config, seed: u64, jobs: usize) -> CliResult<Vec<SweepRecord>> {
    expect(cfg, Experiment::Spectrum)?;
    evaluate(cfg, seed, &random_plan(cfg, seed)?, jobs, eval_spectrum)
}

pub fn run_leastsq(cfg: &Config, seed: u64, jobs: usize) -> CliResult<Vec<SweepRecord>> {
    expect(cfg, Experiment::Leastsq)?;
    evaluate(cfg, seed, &random_plan(cfg, seed)?, jobs, eval_leastsq)
}

pub fn run(cfg: &Config, seed: u64, jobs: usize) -> CliResult<Vec<SweepRecord>> {
    match cfg.experiment {
        Experiment::Angles => run_angles(cfg, seed, jobs),
        Experiment::Spectrum => run_spectrum(cfg, seed, jobs),
        Experiment::Leastsq => run_leastsq(cfg, seed, jobs),
    }
}

fn expect(cfg: &Config, e: Experiment) -> CliResult<()> {
    if cfg.experiment != e {
        return Err(CliError::Config(format!("config declares {}, expected {e}", cfg.experiment)));
    }
    Ok(())
}
