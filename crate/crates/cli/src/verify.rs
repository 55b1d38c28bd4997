//! Randomized invariant suites with explicit constants. Every suite draws
//! from ChaCha8 seeded by the user seed, on a stream fixed per suite, and
//! keeps the first failing instance for replay.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clustered_vandermonde::cluster_spectrum::{gram_eig_upper_check, kernel_chain, micchelli_cross, micchelli_form};
use clustered_vandermonde::dd_bases::{basis_deviation_check, divided_difference, limit_inner_product_check};
use clustered_vandermonde::linalg::{product_singular_bounds, ComplexVector};
use clustered_vandermonde::lsq::{perturbation_experiment, row_norm_product_bound_check};
use clustered_vandermonde::nodes::{generate_cluster, generate_multi_cluster, measure_stats, wrap_distance};
use clustered_vandermonde::power_sums::{faulhaber, power_sum_bounds_hold, trig_cancellation};
use clustered_vandermonde::subspace::union_spectrum_compare;
use clustered_vandermonde::{ClusterConfig, ClusterSpec, Complex64, ComplexMatrix, Layout};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    /// Instances generated.
    pub instances: usize,
    /// Instances inside the regime where the checked inequality applies.
    pub checked: usize,
    pub violations: usize,
    pub first_failure: Option<Value>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }
}

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(suite: &'static str, seed: u64) -> Self {
        Tally { report: SuiteReport { suite, seed, instances: 0, checked: 0, violations: 0, first_failure: None } }
    }

    fn instance(&mut self) {
        self.report.instances += 1;
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.report.checked += 1;
        if !ok {
            self.report.violations += 1;
            if self.report.first_failure.is_none() {
                let mut v = detail();
                v["instance"] = json!(self.report.instances - 1);
                self.report.first_failure = Some(v);
            }
        }
    }
}

type SuiteFn = fn(&mut ChaCha8Rng, &mut Tally) -> CliResult<()>;

/// Suite names in execution order, with their instance counts.
pub const SUITES: [(&str, usize); 11] = [
    ("limit-inner-product", 1000),
    ("basis-deviation", 300),
    ("gram-eigenvalues", 300),
    ("micchelli", 500),
    ("union-bound", 200),
    ("product-bounds", 500),
    ("row-norm-product", 500),
    ("holder", 200),
    ("faulhaber", 0), // fixed grid, see `faulhaber_exact`
    ("trig-cancellation", 1000),
    ("divided-differences", 500),
];

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "limit-inner-product" => limit_inner_product,
        "basis-deviation" => basis_deviation,
        "gram-eigenvalues" => gram_eigenvalues,
        "micchelli" => micchelli,
        "union-bound" => union_bound,
        "product-bounds" => product_bounds,
        "row-norm-product" => row_norm_product,
        "holder" => holder,
        "faulhaber" => faulhaber_exact,
        "trig-cancellation" => trig,
        "divided-differences" => divided_differences,
        _ => return None,
    })
}

fn count(name: &str) -> usize {
    SUITES.iter().find(|(n, _)| *n == name).map_or(0, |(_, c)| *c)
}

pub fn run_suite(name: &str, seed: u64) -> CliResult<SuiteReport> {
    let idx = SUITES.iter().position(|(n, _)| *n == name);
    let (Some(idx), Some(f)) = (idx, suite_fn(name)) else {
        let known: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
        return Err(CliError::Config(format!("unknown suite {name:?}; known: {}, all", known.join(", "))));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx as u64);
    let mut tally = Tally::new(SUITES[idx].0, seed);
    f(&mut rng, &mut tally)?;
    Ok(tally.report)
}

/// Runs the selected suite, or every suite for `"all"` (concurrently, in
/// the current rayon pool; the report order is fixed).
pub fn run_verify(selector: &str, seed: u64) -> CliResult<Vec<SuiteReport>> {
    if selector == "all" {
        SUITES.par_iter().map(|(n, _)| run_suite(n, seed)).collect()
    } else {
        Ok(vec![run_suite(selector, seed)?])
    }
}

/// Writes `verify_<suite>_failure.json` for every failed suite.
pub fn write_failures(reports: &[SuiteReport], out: &Path) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    for r in reports.iter().filter(|r| !r.passed()) {
        std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
        let path = out.join(format!("verify_{}_failure.json", r.suite));
        let text = serde_json::to_string_pretty(r).map_err(|e| CliError::Csv(e.to_string()))?;
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-PI..PI)
}

fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn layout(rng: &mut ChaCha8Rng) -> Layout {
    if rng.random_bool(0.5) {
        Layout::Equispaced
    } else {
        Layout::UniformRandom
    }
}

/// Distinct points in `[lo, hi]` with pairwise gaps of at least `gap`.
fn spaced_points(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        let mut sorted = pts.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).all(|w| w[1] - w[0] >= gap) {
            pts.shuffle(rng);
            return pts;
        }
    }
}

/// Clusters placed in order from angle 0 with gaps of exactly `theta`.
fn consecutive(mult: &[usize], h: f64, theta: f64, rng: &mut ChaCha8Rng) -> ClusterConfig {
    let mut next = 0.0;
    let clusters = mult
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let center = if j == 0 { 0.0 } else { next + h / 2.0 };
            next = center + h / 2.0 + theta;
            ClusterSpec { center, h, tau: None, s, layout: layout(rng) }
        })
        .collect();
    ClusterConfig { clusters, theta }
}

fn random_multiplicities(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let m = rng.random_range(2..=4usize);
    (0..m).map(|_| rng.random_range(1..=3usize)).collect()
}

fn limit_inner_product(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("limit-inner-product") {
        let (z1, z2) = loop {
            let (a, b) = (angle(rng), angle(rng));
            if wrap_distance(a, b)? > 1e-6 {
                break (a, b);
            }
        };
        let (s1, s2) = (rng.random_range(1..=5usize), rng.random_range(1..=5usize));
        let n = rng.random_range(s1.max(s2)..=500);
        t.instance();
        let r = limit_inner_product_check(z1, s1, z2, s2, n)?;
        t.check(r.ok, || json!({"zeta1": z1, "zeta2": z2, "s1": s1, "s2": s2, "N": n, "max_abs": r.max_abs, "bound": r.bound}));
    }
    Ok(())
}

fn basis_deviation(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("basis-deviation") {
        let s = rng.random_range(2..=5usize);
        let n = rng.random_range(10..=2000usize);
        let nh = log_uniform(rng, 1e-6, 1.0);
        let (center, lay, seed) = (angle(rng), layout(rng), rng.random::<u64>());
        t.instance();
        let nodes = generate_cluster(center, nh / n as f64, s, lay, seed)?;
        let r = basis_deviation_check(&nodes, n, None)?;
        t.check(r.ok, || {
            json!({"center": center, "Nh": nh, "s": s, "N": n, "layout": format!("{lay:?}"), "node_seed": seed,
                   "max_deviation": r.max_deviation(), "bound": r.bound})
        });
    }
    Ok(())
}

fn gram_eigenvalues(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("gram-eigenvalues") {
        let s = rng.random_range(1..=6usize);
        let n = 2 * rng.random_range(5..=1000usize);
        let eps = log_uniform(rng, 1e-3, 0.9);
        let (center, lay, seed) = (angle(rng), layout(rng), rng.random::<u64>());
        t.instance();
        let nodes = generate_cluster(center, 2.0 * eps / n as f64, s, lay, seed)?;
        let r = gram_eig_upper_check(&nodes, n)?;
        t.check(r.ok, || {
            json!({"center": center, "epsilon": eps, "s": s, "N": n, "layout": format!("{lay:?}"), "node_seed": seed,
                   "lambdas": r.lambdas, "bounds": r.bounds})
        });
    }
    Ok(())
}

fn random_in(rng: &mut ChaCha8Rng, basis: &ComplexMatrix) -> ComplexVector {
    basis * random_complex(rng, basis.ncols(), 1).column(0)
}

fn micchelli(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("micchelli") {
        let s = rng.random_range(2..=6usize);
        let y = spaced_points(rng, s, -0.5, 0.5, 0.05);
        let m = rng.random_range(0..s);
        t.instance();
        let chain = kernel_chain(&y)?;
        let level = &chain.levels[m];
        let a = random_in(rng, &level.ker_prev);
        let value = micchelli_form(&y, m, &a)?;
        t.check(value >= -1e-12 * a.norm_squared(), || json!({"y": y, "m": m, "check": "positivity", "value": value}));
        if level.ker.ncols() > 0 {
            let b = random_in(rng, &level.ker);
            let cross = micchelli_cross(&y, m, &a, &b)?.norm();
            t.check(cross <= REL_TOL * a.norm() * b.norm(), || json!({"y": y, "m": m, "check": "cross", "value": cross}));
            let zero = micchelli_form(&y, m, &b)?;
            t.check(zero.abs() <= REL_TOL * b.norm_squared(), || json!({"y": y, "m": m, "check": "kernel", "value": zero}));
        }
    }
    Ok(())
}

fn union_bound(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("union-bound") {
        let mult = random_multiplicities(rng);
        let n = log_uniform(rng, 100.0, 2000.0).round() as usize;
        let nh = log_uniform(rng, 1e-3, 0.05);
        let theta = rng.random_range(0.3..1.0);
        let cfg = consecutive(&mult, nh / n as f64, theta, rng);
        let seed = rng.random::<u64>();
        t.instance();
        let nodes = generate_multi_cluster(&cfg, seed)?;
        let measured = measure_stats(&nodes)?.theta.unwrap_or(0.0);
        let r = union_spectrum_compare(&nodes, n)?;
        let in_regime = n as f64 * measured >= 20.0 && nh <= 0.05 && r.alpha <= 1.0 / nodes.len() as f64;
        if in_regime {
            t.check(r.bounds_ok == Some(true), || {
                json!({"multiplicities": mult, "N": n, "Nh": nh, "theta": theta, "node_seed": seed,
                       "alpha": r.alpha, "ratios": r.ratios})
            });
        }
    }
    Ok(())
}

fn product_bounds(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("product-bounds") {
        let n = rng.random_range(1..=5usize);
        let p = rng.random_range(n..=6);
        let m = rng.random_range(p..=8);
        let (b, a) = (random_complex(rng, m, p), random_complex(rng, p, n));
        t.instance();
        let r = product_singular_bounds(&b, &a)?;
        t.check(r.violations(REL_TOL) == 0, || {
            json!({"m": m, "p": p, "n": n, "lower": r.lower, "product": r.product, "upper": r.upper})
        });
    }
    Ok(())
}

fn row_norm_product(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for i in 0..count("row-norm-product") {
        let (m, p, n) = (rng.random_range(1..=6usize), rng.random_range(1..=6usize), rng.random_range(1..=6usize));
        let b = if i % 5 == 0 {
            // rank one
            random_complex(rng, m, 1) * random_complex(rng, 1, p)
        } else {
            random_complex(rng, m, p)
        };
        let c = random_complex(rng, p, n);
        t.instance();
        let r = row_norm_product_bound_check(&b, &c)?;
        t.check(r.ok(), || json!({"m": m, "p": p, "n": n, "lhs": r.lhs, "rhs": r.rhs}));
    }
    Ok(())
}

fn holder(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("holder") {
        let mult = random_multiplicities(rng);
        let n = log_uniform(rng, 50.0, 1000.0).round() as usize;
        let nh = log_uniform(rng, 1e-3, 0.5);
        let theta = rng.random_range(0.3..1.0);
        let cfg = consecutive(&mult, nh / n as f64, theta, rng);
        let eps = log_uniform(rng, 1e-8, 1e-2);
        let complex_noise = rng.random_bool(0.5);
        let (node_seed, noise_seed) = (rng.random::<u64>(), rng.random::<u64>());
        t.instance();
        let nodes = generate_multi_cluster(&cfg, node_seed)?;
        let r = perturbation_experiment(&nodes, n, eps, noise_seed, complex_noise)?;
        if r.in_regime {
            t.check(r.holder_violations() == 0, || {
                json!({"multiplicities": mult, "N": n, "Nh": nh, "theta": theta, "eps": eps,
                       "complex_noise": complex_noise, "node_seed": node_seed, "noise_seed": noise_seed,
                       "abs_error": r.abs_error, "row_l1": r.row_l1, "noise_inf": r.noise_inf})
            });
        }
    }
    Ok(())
}

/// Exhaustive for `N <= 200`, then 300 random `N <= 10^4` and `N = 10^4`,
/// against running integer sums.
fn faulhaber_exact(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    let mut ns: Vec<u64> = (0..=200).collect();
    ns.extend((0..300).map(|_| rng.random_range(201..10_000u64)));
    ns.push(10_000);
    ns.sort_unstable();
    ns.dedup();
    for p in 0..=10u32 {
        let mut acc = BigAcc::new(p);
        for &n in &ns {
            let sum = acc.advance_to(n);
            t.instance();
            let closed = faulhaber(n, p);
            t.check(closed.is_integer() && closed.to_integer() == sum, || json!({"N": n, "p": p, "sum": sum.to_string()}));
            if p >= 1 && n <= 200 {
                let ok = power_sum_bounds_hold(n, p)?;
                t.check(ok, || json!({"N": n, "p": p, "check": "bounds"}));
            }
        }
    }
    Ok(())
}

fn trig(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    for _ in 0..count("trig-cancellation") {
        let n = rng.random_range(1..=2000u64);
        let m = rng.random_range(0..=5u32);
        let phi = loop {
            let v = rng.random_range(0.0..2.0 * PI);
            if v > 1e-9 {
                break v;
            }
        };
        t.instance();
        let r = trig_cancellation(n, m, Complex64::cis(phi))?;
        t.check(r.holds(REL_TOL), || json!({"N": n, "m": m, "phi": phi, "value": r.value, "bound": r.bound}));
    }
    Ok(())
}

/// Rounding scale of a divided difference, from the explicit formula
/// `sum_i f(t_i) / prod_{j != i} (t_i - t_j)`: a small multiple of the
/// unit roundoff times the sum of the moduli of its terms.
fn rounding_scale(pts: &[f64], abs_f: impl Fn(f64) -> f64) -> f64 {
    let terms: f64 = pts
        .iter()
        .enumerate()
        .map(|(i, &ti)| {
            let denom: f64 = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &tj)| (ti - tj).abs()).product();
            abs_f(ti) / denom
        })
        .sum();
    64.0 * f64::EPSILON * terms
}

fn divided_differences(rng: &mut ChaCha8Rng, t: &mut Tally) -> CliResult<()> {
    let f = |x: f64| Complex64::cis(3.0 * x) + Complex64::new(x.powi(3), 0.0);
    for _ in 0..count("divided-differences") {
        let n = rng.random_range(1..=6usize);
        let pts = spaced_points(rng, n, 0.1, 2.0, 0.05);
        let mut shuffled = pts.clone();
        shuffled.shuffle(rng);
        t.instance();
        let a = divided_difference(&pts, f)?;
        let b = divided_difference(&shuffled, f)?;
        let tol = REL_TOL * (1.0 + a.norm()) + rounding_scale(&pts, |x| f(x).norm());
        t.check((a - b).norm() <= tol, || json!({"points": pts, "shuffled": shuffled, "check": "symmetry"}));

        // monomial t^k: (n-1)! [t_1..t_n] t^k lies between the extreme
        // values of the (n-1)-th derivative on the hull of the points
        let k = rng.random_range(0..=8i32);
        let d = n as i32 - 1;
        let dd = divided_difference(&pts, |x| Complex64::new(x.powi(k), 0.0))?.re;
        let fact = |m: i32| (1..=m).map(f64::from).product::<f64>();
        let scaled = fact(d) * dd;
        let deriv = |x: f64| if k < d { 0.0 } else { fact(k) / fact(k - d) * x.powi(k - d) };
        let lo_t = pts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi_t = pts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = (deriv(lo_t).min(deriv(hi_t)), deriv(lo_t).max(deriv(hi_t)));
        let tol = REL_TOL * (1.0 + hi.abs()) + fact(d) * rounding_scale(&pts, |x| x.powi(k).abs());
        t.check(scaled >= lo - tol && scaled <= hi + tol, || {
            json!({"points": pts, "k": k, "check": "mean-value", "value": scaled, "range": [lo, hi]})
        });
    }
    Ok(())
}

/// Incremental `sum_{k=0}^N k^p`.
struct BigAcc {
    p: u32,
    next: u64,
    total: BigInt,
}

impl BigAcc {
    fn new(p: u32) -> Self {
        // 0^0 = 1
        BigAcc { p, next: 1, total: BigInt::from(u8::from(p == 0)) }
    }

    fn advance_to(&mut self, n: u64) -> BigInt {
        while self.next <= n {
            self.total += BigInt::from(self.next).pow(self.p);
            self.next += 1;
        }
        self.total.clone()
    }
}
