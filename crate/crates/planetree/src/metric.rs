//! Finite rooted pseudo-metric point clouds sampled from excursion-encoded
//! trees, graph metrics, and looptrees; correspondence-based upper bounds on
//! Gromov-Hausdorff and Gromov-Hausdorff-Prokhorov distances; correlation
//! dimension and local degree statistics.

use crate::cadlag::CadlagFn;
use crate::looptree::LoopMetric;
use crate::rmq::MinSparseTable;
use crate::tree::{AncestorTable, PlaneTree};
use crate::walk::{Interpolation, TimeScaledFn};
use std::collections::HashSet;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("excursion has a negative jump; the quotient need not fill its tree")]
    NegativeJump,
    #[error("not a nonnegative excursion vanishing at both ends: {0}")]
    NotAnExcursion(&'static str),
    #[error("sample times must lead with t = 0 (the root)")]
    MissingRoot,
    #[error("clouds or arrays have mismatched sizes")]
    SizeMismatch,
    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(&'static str),
    #[error("coupling marginal deviates from the point masses by {0:.3e}")]
    MarginalMismatch(f64),
    #[error("cloud is degenerate (zero diameter)")]
    DegenerateCloud,
    #[error("dimension estimation needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("masses must be nonnegative and sum to one")]
    BadMasses,
}

/// Dense symmetric distance matrix.
#[derive(Debug, Clone)]
pub struct DistMatrix {
    m: usize,
    data: Vec<f64>,
}

impl DistMatrix {
    pub fn zeros(m: usize) -> Self {
        DistMatrix { m, data: vec![0.0; m * m] }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, d: f64) {
        self.data[i * self.m + j] = d;
        self.data[j * self.m + i] = d;
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: f64) {
        for d in &mut self.data {
            *d *= factor;
        }
    }
}

/// Finite rooted pseudo-metric point cloud, optionally weighted.
#[derive(Debug, Clone)]
pub struct MetricCloud {
    /// Source times of the samples (empty for graph-metric clouds).
    pub times: Vec<f64>,
    pub dist: DistMatrix,
    pub root: usize,
    pub mass: Option<Vec<f64>>,
}

impl MetricCloud {
    pub fn len(&self) -> usize {
        self.dist.size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn masses_or_uniform(&self) -> Vec<f64> {
        match &self.mass {
            Some(m) => m.clone(),
            None => vec![1.0 / self.len() as f64; self.len()],
        }
    }

    /// CSV distance matrix plus a sidecar JSON carrying times/masses/root.
    pub fn export(&self, dir: &std::path::Path, name: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut csv = std::io::BufWriter::new(std::fs::File::create(
            dir.join(format!("{name}.dist.csv")),
        )?);
        writeln!(csv, "# schema: cloud-dist-v1")?;
        for i in 0..self.len() {
            let row: Vec<String> =
                (0..self.len()).map(|j| format!("{}", self.dist.get(i, j))).collect();
            writeln!(csv, "{}", row.join(","))?;
        }
        let side = serde_json::json!({
            "schema": "cloud-meta-v1",
            "root": self.root,
            "times": self.times,
            "masses": self.mass,
        });
        std::fs::write(dir.join(format!("{name}.meta.json")), side.to_string())?;
        Ok(())
    }
}

/// An excursion-type function prepared for exact pseudo-distance queries.
pub enum Excursion {
    Walk { f: TimeScaledFn, rmq: MinSparseTable<i64> },
    Cadlag(CadlagFn),
}

impl Excursion {
    pub fn from_walk(f: TimeScaledFn) -> Self {
        let rmq = MinSparseTable::new(&f.walk.values);
        Excursion::Walk { f, rmq }
    }

    pub fn from_cadlag(x: CadlagFn) -> Self {
        Excursion::Cadlag(x)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Excursion::Walk { f, .. } => f.eval_f64(t),
            Excursion::Cadlag(x) => x.value(t),
        }
    }

    pub fn has_negative_jump(&self) -> bool {
        match self {
            Excursion::Walk { f, .. } => {
                f.interpolation == Interpolation::Constant
                    && f.walk.values.windows(2).any(|w| w[1] < w[0])
            }
            Excursion::Cadlag(x) => x.has_negative_jump(),
        }
    }

    pub fn is_excursion_shaped(&self) -> Result<(), MetricError> {
        let (lo, first, last) = match self {
            Excursion::Walk { f, .. } => (
                *f.walk.values.iter().min().unwrap() as f64,
                f.walk.values[0] as f64,
                *f.walk.values.last().unwrap() as f64,
            ),
            Excursion::Cadlag(x) => (x.min_value(), x.value(0.0), x.value(1.0)),
        };
        if first != 0.0 || last != 0.0 {
            return Err(MetricError::NotAnExcursion("does not vanish at both ends"));
        }
        if lo < 0.0 {
            return Err(MetricError::NotAnExcursion("takes negative values"));
        }
        Ok(())
    }

    /// Infimum over the closed interval [s, t] (order-free).
    pub fn inf_on(&self, s: f64, t: f64) -> f64 {
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        match self {
            Excursion::Cadlag(x) => x.inf_on(s, t),
            Excursion::Walk { f, rmq } => {
                let p = f.steps();
                if p == 0 {
                    return f.walk.values[0] as f64;
                }
                match f.interpolation {
                    Interpolation::Constant => {
                        let lo = ((s * p as f64).floor() as usize).min(p);
                        let hi = ((t * p as f64).floor() as usize).min(p);
                        rmq.min(lo, hi) as f64
                    }
                    Interpolation::Linear => {
                        let mut inf = f.eval_f64(s).min(f.eval_f64(t));
                        let lo = (s * p as f64).ceil() as usize;
                        let hi = (t * p as f64).floor() as usize;
                        if lo <= hi && lo <= p {
                            inf = inf.min(rmq.min(lo, hi.min(p)) as f64);
                        }
                        inf
                    }
                }
            }
        }
    }

    /// d(s, t) = x(s) + x(t) - 2 inf over [s^t, svt] of x.
    pub fn pseudo_distance(&self, s: f64, t: f64) -> f64 {
        self.value(s) + self.value(t) - 2.0 * self.inf_on(s, t)
    }
}

fn check_masses(mass: &Option<Vec<f64>>, m: usize) -> Result<(), MetricError> {
    if let Some(w) = mass {
        if w.len() != m {
            return Err(MetricError::SizeMismatch);
        }
        if w.iter().any(|&x| x < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(MetricError::BadMasses);
        }
    }
    Ok(())
}

/// Point cloud of the quotient pseudo-metric of an excursion at the given
/// times (no positivity-of-jumps requirement: the quotient always embeds in
/// the encoded tree, without necessarily filling it).
pub fn quotient_cloud(
    x: &Excursion,
    times: &[f64],
    mass: Option<Vec<f64>>,
) -> Result<MetricCloud, MetricError> {
    x.is_excursion_shaped()?;
    if times.is_empty() || times[0] != 0.0 {
        return Err(MetricError::MissingRoot);
    }
    check_masses(&mass, times.len())?;
    let m = times.len();
    let mut dist = DistMatrix::zeros(m);
    let values: Vec<f64> = times.iter().map(|&t| x.value(t)).collect();
    for i in 0..m {
        for j in i + 1..m {
            let d = values[i] + values[j] - 2.0 * x.inf_on(times[i], times[j]);
            dist.set(i, j, d);
        }
    }
    Ok(MetricCloud { times: times.to_vec(), dist, root: 0, mass })
}

/// Empirical cloud of the tree encoded by the excursion.  Requires no
/// negative jumps, under which the quotient realizes the whole tree.
pub fn tree_cloud(
    x: &Excursion,
    times: &[f64],
    mass: Option<Vec<f64>>,
) -> Result<MetricCloud, MetricError> {
    if x.has_negative_jump() {
        return Err(MetricError::NegativeJump);
    }
    quotient_cloud(x, times, mass)
}

/// Graph-metric cloud over sampled vertices of a tree; the first sample must
/// be the root.
pub fn tree_graph_cloud(tree: &PlaneTree, sample: &[usize]) -> Result<MetricCloud, MetricError> {
    if sample.is_empty() || sample[0] != tree.root() {
        return Err(MetricError::MissingRoot);
    }
    let table = AncestorTable::new(tree);
    let m = sample.len();
    let mut dist = DistMatrix::zeros(m);
    for i in 0..m {
        for j in i + 1..m {
            dist.set(i, j, table.distance(sample[i], sample[j]) as f64);
        }
    }
    Ok(MetricCloud { times: Vec::new(), dist, root: 0, mass: None })
}

/// Graph-metric cloud over sampled looptree vertices (unit corner edges,
/// self-loops contribute no shortcuts).  The first sample must be loop
/// vertex 0, the endpoint of the root edge nearer the first corner.
pub fn looptree_cloud(tree: &PlaneTree, sample: &[usize]) -> Result<MetricCloud, MetricError> {
    if sample.is_empty() || sample[0] != 0 {
        return Err(MetricError::MissingRoot);
    }
    let metric = LoopMetric::new(tree);
    let m = sample.len();
    let mut dist = DistMatrix::zeros(m);
    for i in 0..m {
        for j in i + 1..m {
            dist.set(i, j, metric.dist(sample[i], sample[j]) as f64);
        }
    }
    Ok(MetricCloud { times: Vec::new(), dist, root: 0, mass: None })
}

/// A correspondence between two clouds: index pairs covering both sides and
/// containing the root pair.
#[derive(Debug, Clone)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn diagonal(m: usize) -> Self {
        Correspondence { pairs: (0..m).map(|i| (i, i)).collect() }
    }

    fn validate(&self, a: &MetricCloud, b: &MetricCloud) -> Result<(), MetricError> {
        let mut cover_a = vec![false; a.len()];
        let mut cover_b = vec![false; b.len()];
        for &(i, j) in &self.pairs {
            if i >= a.len() || j >= b.len() {
                return Err(MetricError::InvalidCorrespondence("index out of range"));
            }
            cover_a[i] = true;
            cover_b[j] = true;
        }
        if !cover_a.iter().all(|&c| c) || !cover_b.iter().all(|&c| c) {
            return Err(MetricError::InvalidCorrespondence("not surjective on both sides"));
        }
        if !self.pairs.contains(&(a.root, b.root)) {
            return Err(MetricError::InvalidCorrespondence("missing the root pair"));
        }
        Ok(())
    }
}

fn distortion(a: &MetricCloud, b: &MetricCloud, pairs: &[(usize, usize)]) -> f64 {
    let mut dis = 0.0f64;
    for (idx, &(i1, j1)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[idx + 1..] {
            dis = dis.max((a.dist.get(i1, i2) - b.dist.get(j1, j2)).abs());
        }
    }
    dis
}

/// Half the distortion of the given correspondence: an upper bound on the
/// rooted Gromov-Hausdorff distance.
pub fn gh_upper(
    a: &MetricCloud,
    b: &MetricCloud,
    corr: &Correspondence,
) -> Result<f64, MetricError> {
    corr.validate(a, b)?;
    Ok(distortion(a, b, &corr.pairs) / 2.0)
}

/// Diagonal variant for clouds built on shared sample times.
pub fn gh_upper_diag(a: &MetricCloud, b: &MetricCloud) -> Result<f64, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::SizeMismatch);
    }
    if a.root != b.root {
        return Err(MetricError::InvalidCorrespondence("roots not aligned"));
    }
    let m = a.len();
    let mut dis = 0.0f64;
    for i in 0..m {
        for j in i + 1..m {
            dis = dis.max((a.dist.get(i, j) - b.dist.get(i, j)).abs());
        }
    }
    Ok(dis / 2.0)
}

/// Gromov-Hausdorff-Prokhorov upper bound from a correspondence and a
/// coupling: half the distortion, or the coupling mass escaping the
/// correspondence, whichever is larger.
pub fn ghp_upper(
    a: &MetricCloud,
    b: &MetricCloud,
    corr: &Correspondence,
    coupling: &[(usize, usize, f64)],
) -> Result<f64, MetricError> {
    corr.validate(a, b)?;
    let (wa, wb) = (a.masses_or_uniform(), b.masses_or_uniform());
    let mut ma = vec![0.0f64; a.len()];
    let mut mb = vec![0.0f64; b.len()];
    for &(i, j, w) in coupling {
        if i >= a.len() || j >= b.len() || w < 0.0 {
            return Err(MetricError::InvalidCorrespondence("bad coupling entry"));
        }
        ma[i] += w;
        mb[j] += w;
    }
    let err = ma
        .iter()
        .zip(&wa)
        .chain(mb.iter().zip(&wb))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    if err > 1e-9 {
        return Err(MetricError::MarginalMismatch(err));
    }
    let inside: HashSet<(usize, usize)> = corr.pairs.iter().cloned().collect();
    let covered: f64 = coupling
        .iter()
        .filter(|(i, j, _)| inside.contains(&(*i, *j)))
        .map(|(_, _, w)| w)
        .sum();
    Ok((distortion(a, b, &corr.pairs) / 2.0).max(1.0 - covered))
}

/// Both sides of the discrete tree-approximation inequality: the tree with
/// graph distances scaled by `lambda` and uniform vertex weights, against
/// the continuum tree of `lambda * c_T` sampled at the root plus the
/// midpoint of every parent edge with uniform edge weights.  Returns the
/// computed GHP upper bound; the inequality caps it by max(lambda, 1/n).
pub fn tree_approximation_bound(tree: &PlaneTree, lambda: f64) -> Result<f64, MetricError> {
    let n = tree.n();
    assert!(n >= 2);
    let a = {
        let sample: Vec<usize> = (0..n).collect();
        let mut cloud = tree_graph_cloud(tree, &sample)?;
        cloud.dist.scale(lambda);
        cloud.mass = Some(vec![1.0 / n as f64; n]);
        cloud
    };
    let b = {
        let p = 2 * (n - 1);
        let mut times = Vec::with_capacity(n);
        times.push(0.0);
        for v in 1..n {
            let j = crate::walk::height_to_contour_time(tree, v).expect("vertex index");
            times.push((2 * j - 1) as f64 / (2 * p) as f64);
        }
        let x = Excursion::from_walk(TimeScaledFn::new(
            crate::walk::contour_walk(tree),
            Interpolation::Linear,
        ));
        let mut mass = vec![1.0 / (n - 1) as f64; n];
        mass[0] = 0.0;
        let mut cloud = tree_cloud(&x, &times, Some(mass))?;
        cloud.dist.scale(lambda);
        cloud
    };
    // pair every vertex with the midpoint of its parent edge
    let mut pairs = vec![(0usize, 0usize)];
    pairs.extend((1..n).map(|v| (v, v)));
    let corr = Correspondence { pairs };
    let mut coupling: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * n);
    for v in 1..n {
        coupling.push((v, v, 1.0 / n as f64));
        // the root's uniform mass spreads over the leftover edge mass
        coupling.push((0, v, 1.0 / (n as f64 * (n - 1) as f64)));
    }
    ghp_upper(&a, &b, &corr, &coupling)
}

#[derive(Debug, Clone)]
pub struct DimensionEstimate {
    pub dim: f64,
    pub stderr: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    /// (radius, cumulative pair count) at each fitted radius.
    pub counts: Vec<(f64, u64)>,
}

/// Correlation dimension: least-squares slope of log pair-counts against log
/// radius over a window of the unit-normalized diameter
/// (default [diam/100, diam/10]).
pub fn correlation_dimension(
    cloud: &MetricCloud,
    window: Option<(f64, f64)>,
) -> Result<DimensionEstimate, MetricError> {
    const RADII: usize = 16;
    let m = cloud.len();
    if m < 1000 {
        return Err(MetricError::TooFewPoints { needed: 1000, got: m });
    }
    let diam = cloud.dist.max();
    if diam <= 0.0 {
        return Err(MetricError::DegenerateCloud);
    }
    let (w_lo, w_hi) = window.unwrap_or((0.01, 0.1));
    let (r_lo, r_hi) = (w_lo * diam, w_hi * diam);
    let radii: Vec<f64> = (0..RADII)
        .map(|k| r_lo * (r_hi / r_lo).powf(k as f64 / (RADII - 1) as f64))
        .collect();
    let mut counts = vec![0u64; RADII];
    for i in 0..m {
        for j in i + 1..m {
            let d = cloud.dist.get(i, j);
            if d <= r_hi {
                let b = radii.partition_point(|&r| r < d);
                counts[b.min(RADII - 1)] += 1;
            }
        }
    }
    for k in 1..RADII {
        counts[k] += counts[k - 1];
    }
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&r, &c)| (r.ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(MetricError::DegenerateCloud);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = (resid / ((n - 2.0).max(1.0) * sxx)).sqrt();
    Ok(DimensionEstimate {
        dim: slope,
        stderr,
        r_lo,
        r_hi,
        counts: radii.into_iter().zip(counts).collect(),
    })
}

/// Local degree estimate at each point: number of connected components of
/// the shell r <= d <= 2r around the point, with shell points linked when
/// within r of each other.
pub fn degree_stat(cloud: &MetricCloud, r: f64) -> Vec<usize> {
    let m = cloud.len();
    let mut out = Vec::with_capacity(m);
    for c in 0..m {
        let shell: Vec<usize> =
            (0..m).filter(|&i| cloud.dist.get(c, i) >= r && cloud.dist.get(c, i) <= 2.0 * r).collect();
        let mut comp: Vec<usize> = (0..shell.len()).collect();
        fn find(comp: &mut Vec<usize>, mut v: usize) -> usize {
            while comp[v] != v {
                comp[v] = comp[comp[v]];
                v = comp[v];
            }
            v
        }
        for a in 0..shell.len() {
            for b in a + 1..shell.len() {
                if cloud.dist.get(shell[a], shell[b]) <= r {
                    let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                    comp[ra] = rb;
                }
            }
        }
        let mut roots: HashSet<usize> = HashSet::new();
        for a in 0..shell.len() {
            roots.insert(find(&mut comp, a));
        }
        out.push(roots.len());
    }
    out
}

/// Default shell radius: three times the median nearest-neighbour distance.
pub fn default_degree_radius(cloud: &MetricCloud) -> f64 {
    let m = cloud.len();
    let mut nn: Vec<f64> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| j != i)
                .map(|j| cloud.dist.get(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(|a, b| a.partial_cmp(b).unwrap());
    3.0 * nn[m / 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_plane_trees, example_tree};
    use crate::walk::contour_walk;

    fn contour_excursion(tree: &PlaneTree, interp: Interpolation) -> Excursion {
        Excursion::from_walk(TimeScaledFn::new(contour_walk(tree), interp))
    }

    #[test]
    fn pseudo_distance_two_point_quotient() {
        let x = Excursion::from_cadlag(CadlagFn::piecewise_constant(&[
            (0.0, 0.0),
            (1.0 / 3.0, 1.0),
            (2.0 / 3.0, 0.0),
        ]));
        assert_eq!(x.pseudo_distance(0.0, 0.5), 1.0);
        assert_eq!(x.pseudo_distance(0.5, 0.5), 0.0);
        assert_eq!(x.pseudo_distance(0.1, 0.9), 0.0);
    }

    #[test]
    fn pseudo_distance_on_the_example_contour() {
        let x = contour_excursion(&example_tree(), Interpolation::Linear);
        // grid times 2/12 and 4/12 sit at the two leaves under vertex 1
        let d = x.pseudo_distance(2.0 / 12.0, 4.0 / 12.0);
        assert_eq!(d, 2.0);
        assert_eq!(x.pseudo_distance(0.25, 0.25), 0.0);
    }

    #[test]
    fn quotient_cloud_of_constant_view_is_the_graph_metric() {
        for t in enumerate_plane_trees(7).into_iter().chain([example_tree()]) {
            if t.n() < 2 {
                continue;
            }
            let p = 2 * (t.n() - 1);
            let x = contour_excursion(&t, Interpolation::Constant);
            let times: Vec<f64> = (0..=p).map(|k| k as f64 / p as f64).collect();
            let cloud = quotient_cloud(&x, &times, None).unwrap();
            let verts = crate::walk::contour_vertices(&t);
            let table = AncestorTable::new(&t);
            for i in 0..=p {
                for j in 0..=p {
                    assert_eq!(
                        cloud.dist.get(i, j),
                        table.distance(verts[i], verts[j]) as f64,
                        "tree {:?} times {i},{j}",
                        t.degrees()
                    );
                }
            }
        }
    }

    #[test]
    fn tree_cloud_rejects_negative_jumps() {
        let x = contour_excursion(&example_tree(), Interpolation::Constant);
        let err = tree_cloud(&x, &[0.0, 0.5], None).unwrap_err();
        assert_eq!(err, MetricError::NegativeJump);
        // the continuous view is accepted
        let x = contour_excursion(&example_tree(), Interpolation::Linear);
        assert!(tree_cloud(&x, &[0.0, 0.5], None).is_ok());
    }

    #[test]
    fn single_time_cloud() {
        let x = contour_excursion(&example_tree(), Interpolation::Linear);
        let cloud = tree_cloud(&x, &[0.0], None).unwrap();
        assert_eq!(cloud.len(), 1);
        assert_eq!(cloud.dist.get(0, 0), 0.0);
    }

    #[test]
    fn linear_and_constant_views_agree_at_grid_times() {
        let t = example_tree();
        let p = 2 * (t.n() - 1);
        let times: Vec<f64> = (0..=p).map(|k| k as f64 / p as f64).collect();
        let lin = quotient_cloud(&contour_excursion(&t, Interpolation::Linear), &times, None)
            .unwrap();
        let con = quotient_cloud(&contour_excursion(&t, Interpolation::Constant), &times, None)
            .unwrap();
        for i in 0..=p {
            for j in 0..=p {
                assert_eq!(lin.dist.get(i, j), con.dist.get(i, j));
            }
        }
    }

    #[test]
    fn gh_upper_examples() {
        let x = contour_excursion(&example_tree(), Interpolation::Linear);
        let times: Vec<f64> = (0..=12).map(|k| k as f64 / 12.0).collect();
        let cloud = tree_cloud(&x, &times, None).unwrap();
        assert_eq!(gh_upper_diag(&cloud, &cloud).unwrap(), 0.0);

        // rooted unit segment against its root alone: half the diameter
        let seg_times: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let mut seg = DistMatrix::zeros(seg_times.len());
        for i in 0..seg_times.len() {
            for j in 0..seg_times.len() {
                seg.set(i, j, (seg_times[i] - seg_times[j]).abs());
            }
        }
        let seg_cloud =
            MetricCloud { times: seg_times.clone(), dist: seg, root: 0, mass: None };
        let point = MetricCloud {
            times: vec![0.0],
            dist: DistMatrix::zeros(1),
            root: 0,
            mass: None,
        };
        let corr = Correspondence { pairs: (0..seg_cloud.len()).map(|i| (i, 0)).collect() };
        assert_eq!(gh_upper(&seg_cloud, &point, &corr).unwrap(), 0.5);

        // a correspondence missing one side is rejected
        let bad = Correspondence { pairs: vec![(0, 0)] };
        assert!(gh_upper(&seg_cloud, &point, &bad).is_err());
    }

    #[test]
    fn gh_diag_is_bounded_by_uniform_distance() {
        // two continuous excursions sampled at shared times
        let t1 = example_tree();
        let t2 = PlaneTree::from_degrees(vec![2, 1, 0, 2, 0, 0]).unwrap();
        let x = contour_excursion(&t1, Interpolation::Linear);
        let y = contour_excursion(&t2, Interpolation::Linear);
        let times: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
        let a = tree_cloud(&x, &times, None).unwrap();
        let b = tree_cloud(&y, &times, None).unwrap();
        let sup = times
            .iter()
            .map(|&t| (x.value(t) - y.value(t)).abs())
            .fold(0.0f64, f64::max);
        assert!(gh_upper_diag(&a, &b).unwrap() <= 2.0 * sup + 1e-12);
    }

    #[test]
    fn ghp_identical_clouds_vanish() {
        let x = contour_excursion(&example_tree(), Interpolation::Linear);
        let times: Vec<f64> = (0..=12).map(|k| k as f64 / 12.0).collect();
        let cloud = tree_cloud(&x, &times, None).unwrap();
        let corr = Correspondence::diagonal(cloud.len());
        let w = 1.0 / cloud.len() as f64;
        let coupling: Vec<(usize, usize, f64)> =
            (0..cloud.len()).map(|i| (i, i, w)).collect();
        assert!(ghp_upper(&cloud, &cloud, &corr, &coupling).unwrap() <= 1e-12);
        // a broken marginal is rejected
        let bad: Vec<(usize, usize, f64)> = (0..cloud.len()).map(|i| (i, 0, w)).collect();
        assert!(matches!(
            ghp_upper(&cloud, &cloud, &corr, &bad),
            Err(MetricError::MarginalMismatch(_))
        ));
    }

    #[test]
    fn tree_approximation_inequality_small() {
        for t in enumerate_plane_trees(6) {
            if t.n() < 2 {
                continue;
            }
            for lambda in [1.0, 0.25, 0.05] {
                let bound = tree_approximation_bound(&t, lambda).unwrap();
                let cap = lambda.max(1.0 / t.n() as f64);
                assert!(bound <= cap + 1e-12, "bound {bound} cap {cap}");
            }
        }
    }

    #[test]
    fn dimension_of_a_segment_grid() {
        let m = 2000;
        let mut dist = DistMatrix::zeros(m);
        for i in 0..m {
            for j in 0..m {
                dist.set(i, j, (i as f64 - j as f64).abs() / (m - 1) as f64);
            }
        }
        let cloud = MetricCloud { times: Vec::new(), dist, root: 0, mass: None };
        let est = correlation_dimension(&cloud, None).unwrap();
        assert!((est.dim - 1.0).abs() < 0.05, "dim {}", est.dim);
    }

    #[test]
    fn dimension_degenerate_cases() {
        let cloud = MetricCloud {
            times: Vec::new(),
            dist: DistMatrix::zeros(1500),
            root: 0,
            mass: None,
        };
        assert!(matches!(
            correlation_dimension(&cloud, None),
            Err(MetricError::DegenerateCloud)
        ));
        let small = MetricCloud {
            times: Vec::new(),
            dist: DistMatrix::zeros(10),
            root: 0,
            mass: None,
        };
        assert!(matches!(
            correlation_dimension(&small, None),
            Err(MetricError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn degree_stat_segment_and_star() {
        // 101 grid points on a segment: interior points see two shell arcs
        let m = 101;
        let mut dist = DistMatrix::zeros(m);
        for i in 0..m {
            for j in 0..m {
                dist.set(i, j, (i as f64 - j as f64).abs() / (m - 1) as f64);
            }
        }
        let seg = MetricCloud { times: Vec::new(), dist, root: 0, mass: None };
        let deg = degree_stat(&seg, 0.1);
        assert_eq!(deg[50], 2);
        assert_eq!(deg[0], 1);

        // three arms of 30 points glued at a center
        let arm = 30;
        let m = 3 * arm + 1;
        let mut dist = DistMatrix::zeros(m);
        let coord = |idx: usize| -> (usize, f64) {
            if idx == 0 {
                (0, 0.0)
            } else {
                ((idx - 1) / arm + 1, ((idx - 1) % arm + 1) as f64 / arm as f64)
            }
        };
        for i in 0..m {
            for j in 0..m {
                let (ai, ri) = coord(i);
                let (aj, rj) = coord(j);
                let d = if ai == aj || ri == 0.0 || rj == 0.0 {
                    (ri - rj).abs()
                } else {
                    ri + rj
                };
                dist.set(i, j, d);
            }
        }
        let star = MetricCloud { times: Vec::new(), dist, root: 0, mass: None };
        let deg = degree_stat(&star, 0.15);
        assert_eq!(deg[0], 3);
    }

    #[test]
    fn spanning_cloud_dominates_loop_cloud() {
        use crate::looptree::{looptree, spanning_tree_extract};
        for t in enumerate_plane_trees(7) {
            if t.n() < 3 {
                continue;
            }
            let lt = looptree(&t).unwrap();
            let ex = spanning_tree_extract(&lt);
            // same underlying point set: spanning-tree vertices carry loop labels
            let sample: Vec<usize> = (0..ex.tree.n()).collect();
            let span = tree_graph_cloud(&ex.tree, &sample).unwrap();
            let loop_sample: Vec<usize> = ex.labels.clone();
            // reorder so both clouds list the same loop vertices
            let metric = LoopMetric::new(&t);
            for i in 0..span.len() {
                for j in 0..span.len() {
                    assert!(
                        span.dist.get(i, j) >= metric.dist(loop_sample[i], loop_sample[j]) as f64
                    );
                }
            }
        }
    }
}
