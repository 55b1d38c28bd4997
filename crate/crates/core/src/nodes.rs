//! Node sets on the unit circle and clustered configurations.
//!
//! Angles are stored reduced into `(-pi, pi]`. Nodes that belong to a cluster
//! additionally carry *local coordinates*: an anchor angle for the cluster
//! plus exact offsets. Sub-Rayleigh clusters with `h` far below machine
//! precision relative to the anchor (e.g. `N h = 1e-10` at `N = 1e5`) can
//! only be represented this way, and every matrix builder in the crate uses
//! the local coordinates when they are available.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// Minimum nearest-neighbour ratio enforced by the uniform-random layout.
pub const DEFAULT_TAU_MIN: f64 = 0.05;
/// Relative slack when re-validating the separation of generated clusters.
pub const SEPARATION_SLACK: f64 = 1e-12;
/// Rejection-sampling budget of the uniform-random layout.
pub const LAYOUT_RETRIES: usize = 10_000;

/// Reduces `x` into `(-pi, pi]`.
pub fn reduce_angle(x: f64) -> f64 {
    // already reduced values pass through untouched so tiny offsets stay exact
    if x > -PI && x <= PI {
        return x;
    }
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Wrap-around distance `|x - y mod (-pi, pi]|`, valued in `[0, pi]`.
pub fn wrap_distance(x: f64, y: f64) -> Result<f64> {
    if !x.is_finite() || !y.is_finite() {
        return Err(invalid("wrap_distance of non-finite angle"));
    }
    Ok(arc(x, y))
}

#[inline]
fn arc(x: f64, y: f64) -> f64 {
    reduce_angle(x - y).abs()
}

/// Placement of nodes inside a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    #[default]
    Equispaced,
    UniformRandom,
}

/// One cluster of the generative description.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    pub center: f64,
    pub h: f64,
    pub tau: Option<f64>,
    pub s: usize,
    pub layout: Layout,
}

impl ClusterSpec {
    pub fn equispaced(center: f64, h: f64, s: usize) -> Self {
        ClusterSpec { center, h, tau: None, s, layout: Layout::Equispaced }
    }

    fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(invalid("cluster must contain at least one node"));
        }
        if !self.center.is_finite() || !self.h.is_finite() || self.h < 0.0 {
            return Err(invalid("cluster center and h must be finite, h >= 0"));
        }
        if self.s >= 2 && self.h == 0.0 {
            return Err(Error::DegenerateCluster(format!("s = {} with h = 0", self.s)));
        }
        if self.h >= PI {
            return Err(invalid(format!("cluster size h = {} must be below pi", self.h)));
        }
        if let Some(t) = self.tau {
            if !(t > 0.0 && t <= 1.0) {
                return Err(invalid(format!("tau = {t} must lie in (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Multi-cluster generative description: clusters plus the minimal
/// separation `theta` required between nodes of different clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub clusters: Vec<ClusterSpec>,
    pub theta: f64,
}

/// One block of a partition, in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    indices: Vec<usize>,
    anchor: f64,
    offsets: Vec<f64>,
}

impl Block {
    /// Global node indices, in block order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Reference angle of the block (reduced).
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// Signed offsets of the nodes from the anchor.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest intra-block distance.
    pub fn diameter(&self) -> f64 {
        let lo = self.offsets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

/// Ordered, distinct angles with an optional cluster partition.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    angles: Vec<f64>,
    blocks: Option<Vec<Block>>,
    // (block, position inside block) for each node, when partitioned
    membership: Vec<(usize, usize)>,
}

impl NodeSet {
    /// Unpartitioned node set. Angles are reduced into `(-pi, pi]`.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(invalid("node set must be nonempty"));
        }
        if angles.iter().any(|x| !x.is_finite()) {
            return Err(invalid("node angles must be finite"));
        }
        let angles: Vec<f64> = angles.into_iter().map(reduce_angle).collect();
        for i in 0..angles.len() {
            for j in 0..i {
                if arc(angles[i], angles[j]) == 0.0 {
                    return Err(invalid(format!("nodes {j} and {i} coincide")));
                }
            }
        }
        Ok(NodeSet { angles, blocks: None, membership: Vec::new() })
    }

    /// Node set with an explicit partition into clusters (0-based indices).
    pub fn with_partition(angles: Vec<f64>, partition: Vec<Vec<usize>>) -> Result<Self> {
        let base = NodeSet::new(angles)?;
        let s = base.angles.len();
        let mut seen = vec![false; s];
        for block in &partition {
            if block.is_empty() {
                return Err(invalid("partition blocks must be nonempty"));
            }
            for &i in block {
                if i >= s {
                    return Err(invalid(format!("partition index {i} out of range")));
                }
                if seen[i] {
                    return Err(invalid(format!("partition index {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|v| !v) {
            return Err(invalid("partition does not cover every node"));
        }
        let blocks = partition
            .into_iter()
            .map(|indices| {
                let first = base.angles[indices[0]];
                let rel: Vec<f64> = indices.iter().map(|&i| reduce_angle(base.angles[i] - first)).collect();
                let lo = rel.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = rel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mid = 0.5 * (lo + hi);
                Block {
                    anchor: reduce_angle(first + mid),
                    offsets: rel.iter().map(|r| r - mid).collect(),
                    indices,
                }
            })
            .collect();
        Ok(Self::assemble(base.angles, blocks))
    }

    /// Builds a partitioned node set from clusters given in local
    /// coordinates `(anchor, offsets)`. Nodes are numbered block by block.
    pub fn from_local(clusters: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        if clusters.is_empty() || clusters.iter().any(|(_, o)| o.is_empty()) {
            return Err(invalid("every cluster must contain at least one node"));
        }
        let mut angles = Vec::new();
        let mut blocks = Vec::new();
        for (anchor, offsets) in clusters {
            if !anchor.is_finite() || offsets.iter().any(|o| !o.is_finite()) {
                return Err(invalid("cluster coordinates must be finite"));
            }
            for i in 0..offsets.len() {
                for j in 0..i {
                    if offsets[i] == offsets[j] {
                        return Err(invalid("nodes inside a cluster coincide"));
                    }
                }
            }
            let start = angles.len();
            angles.extend(offsets.iter().map(|o| reduce_angle(anchor + o)));
            blocks.push(Block {
                indices: (start..angles.len()).collect(),
                anchor: reduce_angle(anchor),
                offsets,
            });
        }
        let set = Self::assemble(angles, blocks);
        let s = set.len();
        for i in 0..s {
            for j in 0..i {
                if set.membership[i].0 != set.membership[j].0 && set.distance(i, j) == 0.0 {
                    return Err(invalid(format!("nodes {j} and {i} of different clusters coincide")));
                }
            }
        }
        Ok(set)
    }

    fn assemble(angles: Vec<f64>, blocks: Vec<Block>) -> Self {
        let mut membership = vec![(0, 0); angles.len()];
        for (b, block) in blocks.iter().enumerate() {
            for (p, &i) in block.indices.iter().enumerate() {
                membership[i] = (b, p);
            }
        }
        NodeSet { angles, blocks: Some(blocks), membership }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn blocks(&self) -> Option<&[Block]> {
        self.blocks.as_deref()
    }

    /// Blocks of the partition, or an error when none is attached.
    pub fn require_blocks(&self) -> Result<&[Block]> {
        self.blocks().ok_or_else(|| invalid("node set has no cluster partition"))
    }

    /// Cluster index of each node (all zero without a partition).
    pub fn cluster_labels(&self) -> Vec<usize> {
        if self.blocks.is_some() {
            self.membership.iter().map(|m| m.0).collect()
        } else {
            vec![0; self.len()]
        }
    }

    /// Sizes `s^(j)` of the clusters.
    pub fn multiplicities(&self) -> Vec<usize> {
        match &self.blocks {
            Some(b) => b.iter().map(Block::len).collect(),
            None => vec![self.len()],
        }
    }

    /// Node `i` as `(anchor, offset)`; unpartitioned nodes are their own
    /// anchor.
    pub fn local(&self, i: usize) -> (f64, f64) {
        match &self.blocks {
            Some(blocks) => {
                let (b, p) = self.membership[i];
                (blocks[b].anchor, blocks[b].offsets[p])
            }
            None => (self.angles[i], 0.0),
        }
    }

    /// Signed difference `x_i - x_j` reduced into `(-pi, pi]`, exact in
    /// local coordinates when both nodes share a cluster.
    pub fn difference(&self, i: usize, j: usize) -> f64 {
        if let Some(blocks) = &self.blocks {
            let (bi, pi) = self.membership[i];
            let (bj, pj) = self.membership[j];
            if bi == bj {
                let o = &blocks[bi].offsets;
                return reduce_angle(o[pi] - o[pj]);
            }
        }
        reduce_angle(self.angles[i] - self.angles[j])
    }

    /// Wrap-around distance between nodes `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.difference(i, j).abs()
    }

    /// The nodes of block `b` as a single-cluster node set.
    pub fn cluster(&self, b: usize) -> Result<NodeSet> {
        let blocks = self.require_blocks()?;
        let block = blocks
            .get(b)
            .ok_or_else(|| invalid(format!("cluster index {b} out of range")))?;
        NodeSet::from_local(vec![(block.anchor, block.offsets.clone())])
    }

    /// The whole set as a single cluster `(anchor, offsets)`.
    ///
    /// A one-block partition is returned as stored; an unpartitioned set is
    /// re-expressed around the midpoint of its hull. More than one block is
    /// an error.
    pub fn single_cluster(&self) -> Result<(f64, Vec<f64>)> {
        match &self.blocks {
            Some(blocks) if blocks.len() == 1 => {
                let b = &blocks[0];
                // block order may differ from node order
                let mut offsets = vec![0.0; self.len()];
                for (p, &i) in b.indices.iter().enumerate() {
                    offsets[i] = b.offsets[p];
                }
                Ok((b.anchor, offsets))
            }
            Some(_) => Err(invalid("expected a single cluster")),
            None => {
                let first = self.angles[0];
                let rel: Vec<f64> = self.angles.iter().map(|&x| reduce_angle(x - first)).collect();
                let lo = rel.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = rel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mid = 0.5 * (lo + hi);
                Ok((reduce_angle(first + mid), rel.iter().map(|r| r - mid).collect()))
            }
        }
    }

    /// Largest pairwise distance among all nodes.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..i {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }
}

/// Measured parameters of a partitioned node set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    /// Largest intra-cluster distance per cluster (0 for singletons).
    pub h: Vec<f64>,
    /// Smallest over largest intra-cluster distance; `None` for singletons.
    pub tau: Vec<Option<f64>>,
    /// Smallest distance between nodes of different clusters.
    pub theta: Option<f64>,
    /// Smallest distance between any two nodes.
    pub eta: Option<f64>,
}

/// Direct evaluation of the cluster parameters by exhaustive pairwise scans.
pub fn measure_stats(nodes: &NodeSet) -> Result<ClusterStats> {
    let blocks = nodes.require_blocks()?;
    let mut h = Vec::with_capacity(blocks.len());
    let mut tau = Vec::with_capacity(blocks.len());
    for block in blocks {
        let idx = block.indices();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for a in 0..idx.len() {
            for b in 0..a {
                let d = nodes.distance(idx[a], idx[b]);
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        h.push(hi);
        tau.push(if idx.len() >= 2 { Some(lo / hi) } else { None });
    }
    let labels = nodes.cluster_labels();
    let mut theta: Option<f64> = None;
    let mut eta: Option<f64> = None;
    for i in 0..nodes.len() {
        for j in 0..i {
            let d = nodes.distance(i, j);
            eta = Some(eta.map_or(d, |e| e.min(d)));
            if labels[i] != labels[j] {
                theta = Some(theta.map_or(d, |t| t.min(d)));
            }
        }
    }
    Ok(ClusterStats { h, tau, theta, eta })
}

fn cluster_offsets(spec: &ClusterSpec, tau_min: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    spec.validate()?;
    let s = spec.s;
    if s == 1 {
        return Ok(vec![0.0]);
    }
    match spec.layout {
        Layout::Equispaced => Ok((0..s)
            .map(|k| spec.h * (k as f64 / (s - 1) as f64 - 0.5))
            .collect()),
        Layout::UniformRandom => {
            let tau = spec.tau.unwrap_or(tau_min);
            for _ in 0..LAYOUT_RETRIES {
                let mut offs: Vec<f64> = (0..s).map(|_| spec.h * (rng.random::<f64>() - 0.5)).collect();
                offs.sort_by(f64::total_cmp);
                let min_gap = offs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                if min_gap >= tau * spec.h {
                    return Ok(offs);
                }
            }
            Err(Error::InfeasibleLayout(format!(
                "no uniform-random layout with tau >= {tau} after {LAYOUT_RETRIES} draws"
            )))
        }
    }
}

/// Generates one `(h, tau, s)` cluster around `center`.
///
/// Equispaced nodes sit at `center + h (k/(s-1) - 1/2)`; uniform-random
/// nodes are rejection-sampled until the nearest-neighbour gap reaches
/// `tau h` (default `tau = 0.05`).
pub fn generate_cluster(center: f64, h: f64, s: usize, layout: Layout, seed: u64) -> Result<NodeSet> {
    let spec = ClusterSpec { center, h, tau: None, s, layout };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets = cluster_offsets(&spec, DEFAULT_TAU_MIN, &mut rng)?;
    NodeSet::from_local(vec![(center, offsets)])
}

/// Generates a multi-cluster configuration and re-validates it.
///
/// Cluster `j` draws from ChaCha8 stream `j` of `seed`, so adding clusters
/// does not perturb the earlier ones.
pub fn generate_multi_cluster(config: &ClusterConfig, seed: u64) -> Result<NodeSet> {
    if config.clusters.is_empty() {
        return Err(invalid("configuration has no clusters"));
    }
    if !config.theta.is_finite() || config.theta <= 0.0 {
        return Err(invalid("theta must be positive and finite"));
    }
    let m = config.clusters.len();
    let arc_total: f64 = config.clusters.iter().map(|c| c.h).sum::<f64>()
        + if m > 1 { m as f64 * config.theta } else { 0.0 };
    if arc_total > TAU {
        return Err(Error::InfeasibleLayout(format!(
            "clusters need arc length {arc_total:.4} > 2 pi"
        )));
    }
    let mut locals = Vec::with_capacity(m);
    for (j, spec) in config.clusters.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        locals.push((spec.center, cluster_offsets(spec, DEFAULT_TAU_MIN, &mut rng)?));
    }
    let nodes = NodeSet::from_local(locals).map_err(|e| Error::InfeasibleLayout(e.to_string()))?;
    let stats = measure_stats(&nodes)?;
    if let Some(theta) = stats.theta {
        if theta < config.theta * (1.0 - SEPARATION_SLACK) {
            return Err(Error::InfeasibleLayout(format!(
                "measured separation {theta:.6e} below required theta {:.6e}",
                config.theta
            )));
        }
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_distance_examples() {
        assert_eq!(wrap_distance(0.5, -0.5).unwrap(), 1.0);
        assert_eq!(wrap_distance(1.3, 1.3).unwrap(), 0.0);
        let d = wrap_distance(3.0, -3.0).unwrap();
        assert!((d - (TAU - 6.0)).abs() < 1e-15);
        assert!((d - 0.2831853).abs() < 1e-7);
        assert!(wrap_distance(f64::NAN, 0.0).is_err());
        assert!(wrap_distance(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn reduction_keeps_pi() {
        assert_eq!(reduce_angle(PI), PI);
        assert_eq!(reduce_angle(-PI), PI);
        assert!((reduce_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn equispaced_cluster() {
        let n = generate_cluster(0.0, 0.1, 3, Layout::Equispaced, 0).unwrap();
        let a = n.angles();
        assert!((a[0] + 0.05).abs() < 1e-17 && a[1] == 0.0 && (a[2] - 0.05).abs() < 1e-17);
        let single = generate_cluster(0.3, 0.2, 1, Layout::Equispaced, 0).unwrap();
        assert_eq!(single.angles(), &[0.3]);
    }

    #[test]
    fn equispaced_tau() {
        for s in 2..8 {
            let n = generate_cluster(1.0, 0.01, s, Layout::Equispaced, 0).unwrap();
            let st = measure_stats(&n).unwrap();
            assert!((st.tau[0].unwrap() - 1.0 / (s - 1) as f64).abs() < 1e-12);
            assert!((st.h[0] - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_and_infeasible() {
        assert!(matches!(
            generate_cluster(0.0, 0.0, 2, Layout::Equispaced, 0),
            Err(Error::DegenerateCluster(_))
        ));
        let spec = ClusterSpec { center: 0.0, h: 0.1, tau: Some(0.9), s: 6, layout: Layout::UniformRandom };
        let cfg = ClusterConfig { clusters: vec![spec], theta: 1.0 };
        assert!(matches!(generate_multi_cluster(&cfg, 1), Err(Error::InfeasibleLayout(_))));
        let crowded = ClusterConfig {
            clusters: (0..4).map(|j| ClusterSpec::equispaced(j as f64, 0.1, 2)).collect(),
            theta: 2.0,
        };
        assert!(matches!(generate_multi_cluster(&crowded, 0), Err(Error::InfeasibleLayout(_))));
    }

    #[test]
    fn measure_stats_examples() {
        let n = NodeSet::with_partition(vec![-0.05, 0.0, 0.05], vec![vec![0, 1, 2]]).unwrap();
        let st = measure_stats(&n).unwrap();
        assert!((st.h[0] - 0.1).abs() < 1e-15);
        assert!((st.tau[0].unwrap() - 0.5).abs() < 1e-14);
        assert!((st.eta.unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(st.theta, None);

        let anti = NodeSet::with_partition(vec![0.0, PI], vec![vec![0], vec![1]]).unwrap();
        let st = measure_stats(&anti).unwrap();
        assert_eq!(st.theta, Some(PI));
        assert_eq!(st.h, vec![0.0, 0.0]);
        assert_eq!(st.tau, vec![None, None]);

        assert!(measure_stats(&NodeSet::new(vec![0.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn two_antipodal_singletons() {
        let cfg = ClusterConfig {
            clusters: vec![ClusterSpec::equispaced(0.0, 0.0, 1), ClusterSpec::equispaced(PI, 0.0, 1)],
            theta: PI,
        };
        let n = generate_multi_cluster(&cfg, 0).unwrap();
        assert_eq!(n.angles(), &[0.0, PI]);
        assert_eq!(n.cluster_labels(), vec![0, 1]);
    }

    #[test]
    fn four_cluster_configuration() {
        let cfg = ClusterConfig {
            clusters: vec![
                ClusterSpec::equispaced(-2.5, 0.01, 2),
                ClusterSpec::equispaced(-1.0, 0.01, 1),
                ClusterSpec::equispaced(0.5, 0.01, 3),
                ClusterSpec::equispaced(2.0, 0.01, 1),
            ],
            theta: 1.0,
        };
        let n = generate_multi_cluster(&cfg, 4).unwrap();
        assert_eq!(n.len(), 7);
        assert_eq!(n.multiplicities(), vec![2, 1, 3, 1]);
        assert!(measure_stats(&n).unwrap().theta.unwrap() >= 1.0);
    }

    #[test]
    fn partition_validation() {
        let a = vec![0.0, 1.0, 2.0];
        assert!(NodeSet::with_partition(a.clone(), vec![vec![0, 1]]).is_err());
        assert!(NodeSet::with_partition(a.clone(), vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(NodeSet::with_partition(a.clone(), vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(NodeSet::with_partition(a, vec![vec![2, 0], vec![1]]).is_ok());
        assert!(NodeSet::new(vec![0.0, TAU]).is_err());
    }

    #[test]
    fn local_coordinates_resolve_tiny_clusters() {
        let h = 1e-15;
        let n = NodeSet::from_local(vec![(1.0, vec![-h / 2.0, h / 2.0]), (2.0, vec![0.0])]).unwrap();
        assert_eq!(n.difference(1, 0), h);
        assert_eq!(n.cluster(0).unwrap().len(), 2);
    }

    proptest! {
        #[test]
        fn wrap_distance_metric(x in -10.0f64..10.0, y in -10.0f64..10.0, z in -10.0f64..10.0) {
            let dxy = wrap_distance(x, y).unwrap();
            prop_assert!((0.0..=PI).contains(&dxy));
            prop_assert!((dxy - wrap_distance(y, x).unwrap()).abs() < 1e-15);
            let dxz = wrap_distance(x, z).unwrap();
            let dyz = wrap_distance(y, z).unwrap();
            prop_assert!(dxz <= dxy + dyz + 1e-12);
        }

        #[test]
        fn wrap_distance_periodic(x in -4.0f64..4.0, y in -4.0f64..4.0, k in -5i32..5) {
            let shifted = wrap_distance(x + TAU * k as f64, y).unwrap();
            prop_assert!((shifted - wrap_distance(x, y).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn generated_configs_revalidate(
            seed in 0u64..1000,
            h in 1e-6f64..0.2,
            sizes in proptest::collection::vec(1usize..5, 1..5),
            random_layout in any::<bool>(),
        ) {
            let m = sizes.len();
            let clusters = sizes.iter().enumerate().map(|(j, &s)| ClusterSpec {
                center: -PI + TAU * (j as f64 + 0.5) / m as f64,
                h,
                tau: None,
                s,
                layout: if random_layout { Layout::UniformRandom } else { Layout::Equispaced },
            }).collect();
            let theta = TAU / m as f64 - 2.0 * h;
            let cfg = ClusterConfig { clusters, theta };
            let nodes = generate_multi_cluster(&cfg, seed).unwrap();
            let st = measure_stats(&nodes).unwrap();
            if m > 1 {
                prop_assert!(st.theta.unwrap() >= theta * (1.0 - SEPARATION_SLACK));
            }
            for (j, &s) in sizes.iter().enumerate() {
                prop_assert!(st.h[j] <= h * (1.0 + 1e-12));
                if s >= 2 {
                    prop_assert!(st.tau[j].unwrap() >= DEFAULT_TAU_MIN * (1.0 - 1e-9));
                    prop_assert!(st.eta.unwrap() <= st.h[j]);
                }
            }
            if let (Some(e), Some(t)) = (st.eta, st.theta) {
                prop_assert!(e <= t);
            }
        }
    }
}
