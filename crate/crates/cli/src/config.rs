//! JSON experiment description.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use clustered_vandermonde::nodes::reduce_angle;
use clustered_vandermonde::{ClusterConfig, ClusterSpec, Layout};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Identifier of the only supported generator.
pub const RNG_ID: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Angles,
    Spectrum,
    Leastsq,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Angles => "angles",
            Experiment::Spectrum => "spectrum",
            Experiment::Leastsq => "leastsq",
        })
    }
}

impl std::str::FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "angles" => Ok(Experiment::Angles),
            "spectrum" => Ok(Experiment::Spectrum),
            "leastsq" => Ok(Experiment::Leastsq),
            other => Err(format!("unknown experiment {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutName {
    #[default]
    Equispaced,
    UniformRandom,
}

impl From<LayoutName> for Layout {
    fn from(l: LayoutName) -> Layout {
        match l {
            LayoutName::Equispaced => Layout::Equispaced,
            LayoutName::UniformRandom => Layout::UniformRandom,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_range: Option<[f64; 2]>,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default)]
    pub layout: LayoutName,
}

impl ClusterEntry {
    pub fn equispaced(s: usize) -> Self {
        ClusterEntry { center: None, h: None, h_range: None, s, tau: None, layout: LayoutName::Equispaced }
    }
}

/// A scalar or a list of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn default_samples() -> usize {
    1
}

fn default_rng() -> String {
    RNG_ID.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Experiment,
    pub clusters: Vec<ClusterEntry>,
    pub theta: OneOrMany,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "N_range", default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[f64; 2]>,
    /// Common `N h` for every cluster, overriding per-cluster sizes.
    #[serde(rename = "Nh", default, skip_serializing_if = "Option::is_none")]
    pub nh: Option<f64>,
    #[serde(rename = "Nh_range", default, skip_serializing_if = "Option::is_none")]
    pub nh_range: Option<[f64; 2]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_eps_range: Option<[f64; 2]>,
    #[serde(default = "default_rng")]
    pub rng: String,
    #[serde(default)]
    pub complex_noise: bool,
}

/// Size of the sweep along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Fixed(f64),
    Range(f64, f64),
}

impl Axis {
    /// Log-uniform interpolation at `t` in `[0, 1]`.
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Axis::Fixed(v) => v,
            Axis::Range(lo, hi) => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
        }
    }

    pub fn is_range(&self) -> bool {
        matches!(self, Axis::Range(lo, hi) if lo != hi)
    }
}

/// How cluster sizes are chosen for a sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Scale {
    /// One `N h` shared by every cluster.
    Common(Axis),
    /// Independent `h` per cluster; `None` for singletons without a size.
    PerCluster(Vec<Option<Axis>>),
}

impl Scale {
    pub fn is_range(&self) -> bool {
        match self {
            Scale::Common(a) => a.is_range(),
            Scale::PerCluster(v) => v.iter().flatten().any(Axis::is_range),
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_range(name: &str, r: [f64; 2]) -> CliResult<Axis> {
    let [lo, hi] = r;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
        return Err(cfg_err(format!("{name} = [{lo}, {hi}] must satisfy 0 < lo <= hi")));
    }
    Ok(Axis::Range(lo, hi))
}

fn check_positive(name: &str, v: f64) -> CliResult<Axis> {
    if !(v.is_finite() && v > 0.0) {
        return Err(cfg_err(format!("{name} = {v} must be positive and finite")));
    }
    Ok(Axis::Fixed(v))
}

impl Config {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| {
            cfg_err(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => cfg_err(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.rng != RNG_ID {
            return Err(cfg_err(format!("rng: only {RNG_ID:?} is supported, got {:?}", self.rng)));
        }
        if self.clusters.is_empty() {
            return Err(cfg_err("clusters: at least one cluster is required"));
        }
        if self.samples == 0 {
            return Err(cfg_err("samples must be at least 1"));
        }
        let thetas = self.theta.values();
        if thetas.is_empty() || thetas.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(cfg_err("theta: values must be positive and finite"));
        }
        if thetas.len() > 1 && self.experiment != Experiment::Angles {
            return Err(cfg_err("theta: a list of values is only accepted by the angles experiment"));
        }
        let centered = self.clusters.iter().filter(|c| c.center.is_some()).count();
        if centered != 0 && centered != self.clusters.len() {
            return Err(cfg_err("clusters: give a center for every cluster or for none"));
        }
        for (j, c) in self.clusters.iter().enumerate() {
            if c.s == 0 {
                return Err(cfg_err(format!("clusters[{j}].s must be at least 1")));
            }
            if c.h.is_some() && c.h_range.is_some() {
                return Err(cfg_err(format!("clusters[{j}]: h and h_range are exclusive")));
            }
        }
        self.n_axis()?;
        self.scale()?;
        match (self.experiment, self.noise_eps_range) {
            (Experiment::Leastsq, None) => return Err(cfg_err("noise_eps_range is required for leastsq")),
            (Experiment::Leastsq, Some([lo, hi])) => {
                if lo == 0.0 && hi == 0.0 {
                    return Err(cfg_err(
                        "noise_eps_range = [0, 0]: a zero perturbation leaves delta_a undefined",
                    ));
                }
                check_range("noise_eps_range", [lo, hi])?;
            }
            (_, Some(_)) => return Err(cfg_err("noise_eps_range only applies to leastsq")),
            (_, None) => {}
        }
        if self.complex_noise && self.experiment != Experiment::Leastsq {
            return Err(cfg_err("complex_noise only applies to leastsq"));
        }
        if self.experiment == Experiment::Angles {
            if self.clusters.len() < 2 {
                return Err(cfg_err("angles needs at least two clusters"));
            }
            if self.n_axis()?.is_range() && self.scale()?.is_range() {
                return Err(cfg_err("angles: vary either N or the cluster size, not both"));
            }
        }
        Ok(())
    }

    pub fn n_axis(&self) -> CliResult<Axis> {
        match (self.n, self.n_range) {
            (Some(n), None) => check_positive("N", n as f64),
            (None, Some(r)) => check_range("N_range", r),
            (Some(_), Some(_)) => Err(cfg_err("N and N_range are exclusive")),
            (None, None) => Err(cfg_err("one of N or N_range is required")),
        }
    }

    pub fn scale(&self) -> CliResult<Scale> {
        let common = match (self.nh, self.nh_range) {
            (Some(v), None) => Some(check_positive("Nh", v)?),
            (None, Some(r)) => Some(check_range("Nh_range", r)?),
            (Some(_), Some(_)) => return Err(cfg_err("Nh and Nh_range are exclusive")),
            (None, None) => None,
        };
        if let Some(axis) = common {
            if self.clusters.iter().any(|c| c.h.is_some() || c.h_range.is_some()) {
                return Err(cfg_err("per-cluster h conflicts with Nh / Nh_range"));
            }
            return Ok(Scale::Common(axis));
        }
        let mut axes = Vec::with_capacity(self.clusters.len());
        for (j, c) in self.clusters.iter().enumerate() {
            let axis = match (c.h, c.h_range) {
                (Some(h), None) => Some(check_positive(&format!("clusters[{j}].h"), h)?),
                (None, Some(r)) => Some(check_range(&format!("clusters[{j}].h_range"), r)?),
                _ if c.s == 1 => None,
                _ => return Err(cfg_err(format!("clusters[{j}]: h or h_range is required when s > 1"))),
            };
            axes.push(axis);
        }
        Ok(Scale::PerCluster(axes))
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.theta.values()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.s).collect()
    }

    /// Node-level description for the given sizes. Without configured
    /// centers, clusters are laid out in order with consecutive gaps of
    /// exactly `theta`, the whole group centered on the angle `pi`. That
    /// keeps every cluster away from the zero frequency, which carries the
    /// mean of real-valued data.
    pub fn cluster_config(&self, h: &[f64], theta: f64) -> ClusterConfig {
        let auto = self.clusters.iter().all(|c| c.center.is_none());
        let mut centers = Vec::with_capacity(h.len());
        let mut edge = 0.0;
        for &hj in h {
            centers.push(edge + hj / 2.0);
            edge += hj + theta;
        }
        let shift = PI - (edge - theta) / 2.0;
        let clusters = self
            .clusters
            .iter()
            .zip(h)
            .zip(centers)
            .map(|((c, &hj), auto_center)| {
                let center = if auto { reduce_angle(auto_center + shift) } else { c.center.unwrap_or(0.0) };
                ClusterSpec { center, h: hj, tau: c.tau, s: c.s, layout: c.layout.into() }
            })
            .collect();
        ClusterConfig { clusters, theta }
    }
}
