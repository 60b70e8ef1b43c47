//! Experiment drivers: identity sweeps, dilation ratios, M1 convergence
//! trends, dimension estimates, and the statistical goodness-of-fit checks.
//! Replicas run on a worker pool, each owning its own seeded stream, so
//! every result is reproducible from (seed, config) alone.

use crate::m1::{discretize, m1_upper_discrete, m1_upper_discrete_with_alignment, DiscreteRep};
use crate::metric::{
    correlation_dimension, gh_upper_diag, looptree_cloud, tree_graph_cloud, DistMatrix,
    MetricCloud, MetricError,
};
use crate::rmq::MinSparseTable;
use crate::sampler::{
    conditional_shape_table, sample_conditioned, OffspringLaw, SampleError, Seeded,
};
use crate::transform::{corotate, lemma_oracles, rotate, IdentityReport};
use crate::tree::{enumerate_plane_trees, PlaneTree};
use crate::walk::{
    contour_vertices, contour_walk, height_walk, lukasiewicz_walk, Interpolation, TimeScaledFn,
    Walk,
};
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper tail of the chi-squared distribution.
pub fn chi_square_pvalue(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    (1.0 - dist.cdf(stat)).clamp(0.0, 1.0)
}

/// Runs the full identity report over every tree with at most `max_n`
/// vertices; returns the per-size tree counts and the first failing report.
pub fn identity_sweep_exhaustive(max_n: usize) -> (Vec<(usize, u64)>, Option<IdentityReport>) {
    let mut counts = Vec::new();
    for n in 1..=max_n {
        let all = enumerate_plane_trees(n);
        counts.push((n, all.len() as u64));
        for t in &all {
            let report = lemma_oracles(t);
            if !report.all_pass() {
                return (counts, Some(report));
            }
        }
    }
    (counts, None)
}

/// Identity reports over random conditioned trees with sizes up to `n_max`.
/// Returns the first failing report (with its tree), if any.
pub fn identity_sweep_random(
    law: &OffspringLaw,
    n_max: usize,
    reps: usize,
    seed: u64,
) -> Result<Option<(PlaneTree, IdentityReport)>, SampleError> {
    let failures: Vec<(PlaneTree, IdentityReport)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = Seeded::new(seed, rep as u64).rng();
            let mut n = rng.random_range(2..=n_max);
            if !law.admissible(n) {
                n += 1;
            }
            let tree = sample_conditioned(law, n, &mut rng)?;
            let report = lemma_oracles(&tree);
            Ok(if report.all_pass() { None } else { Some((tree, report)) })
        })
        .collect::<Result<Vec<_>, SampleError>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(failures.into_iter().next())
}

#[derive(Debug, Clone)]
pub struct DilationResult {
    pub ratios: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
}

/// Per-replica diameter ratio diam(rot T) / diam(T) under a conditioned law.
pub fn dilation_experiment(
    law: &OffspringLaw,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<DilationResult, SampleError> {
    let ratios: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = Seeded::new(seed, rep as u64).rng();
            let tree = sample_conditioned(law, n, &mut rng)?;
            let rot = rotate(&tree);
            let d0 = tree.diameter();
            let d1 = rot.tree.diameter();
            Ok(if d0 == 0 { 1.0 } else { d1 as f64 / d0 as f64 })
        })
        .collect::<Result<Vec<_>, SampleError>>()?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
        / (ratios.len().saturating_sub(1)).max(1) as f64;
    Ok(DilationResult { ratios: ratios.clone(), mean, stderr: (var / ratios.len() as f64).sqrt() })
}

/// Process pairs compared under the M1 bound, each normalized by its own sup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum M1Pair {
    /// Reversed contour of the rotation against the mirror Łukasiewicz walk.
    RotContourVsMirrorLuka,
    /// Łukasiewicz walk of the co-rotation against the source walk.
    CorotLukaVsLuka,
    /// Contour against height of the same tree.
    ContourVsHeight,
}

impl M1Pair {
    pub fn tag(self) -> &'static str {
        match self {
            M1Pair::RotContourVsMirrorLuka => "rot-contour-vs-mirror-luka",
            M1Pair::CorotLukaVsLuka => "corot-luka-vs-luka",
            M1Pair::ContourVsHeight => "contour-vs-height",
        }
    }

    pub fn walks(self, tree: &PlaneTree) -> (Walk, Walk) {
        match self {
            M1Pair::RotContourVsMirrorLuka => {
                let rot = rotate(tree);
                let rev = contour_walk(&rot.tree).reversed();
                let (mirrored, _) = tree.mirror();
                (rev, lukasiewicz_walk(&mirrored))
            }
            M1Pair::CorotLukaVsLuka => {
                let cor = corotate(tree);
                (lukasiewicz_walk(&cor.tree), lukasiewicz_walk(tree))
            }
            M1Pair::ContourVsHeight => (contour_walk(tree), height_walk(tree)),
        }
    }
}

/// Sup-normalized M1 upper bound between the linear views of the two walks.
pub fn normalized_m1_statistic(a: &Walk, b: &Walk, grid: usize) -> f64 {
    let reps: Vec<DiscreteRep> = [a, b]
        .iter()
        .map(|w| {
            let sup = w.max_abs().max(1) as f64;
            let mut rep = crate::cadlag::walk_representation(&TimeScaledFn::new(
                (*w).clone(),
                Interpolation::Linear,
            ));
            rep.scale_spatial(1.0 / sup);
            discretize(&rep, grid)
        })
        .collect();
    m1_upper_discrete(&reps[0], &reps[1])
}

#[derive(Debug, Clone)]
pub struct M1TrendPoint {
    pub n: usize,
    pub median: f64,
    pub median_doubled_grid: Option<f64>,
}

/// Median over replicas of the sup-normalized M1 statistic, for each size in
/// the sweep.  When `two_grids` is set the statistic is reported at the grid
/// and at twice the grid, exposing the discretization slack.
pub fn m1_trend(
    pair: M1Pair,
    law: &OffspringLaw,
    sizes: &[usize],
    reps: usize,
    grid: usize,
    two_grids: bool,
    seed: u64,
) -> Result<Vec<M1TrendPoint>, SampleError> {
    let mut out = Vec::new();
    for (ni, &n) in sizes.iter().enumerate() {
        let stats: Vec<(f64, f64)> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let stream = (ni * 100_000 + rep) as u64;
                let mut rng = Seeded::new(seed, stream).rng();
                let tree = sample_conditioned(law, n, &mut rng)?;
                let (a, b) = pair.walks(&tree);
                let v = normalized_m1_statistic(&a, &b, grid);
                let v2 = if two_grids {
                    normalized_m1_statistic(&a, &b, 2 * grid)
                } else {
                    f64::NAN
                };
                Ok((v, v2))
            })
            .collect::<Result<Vec<_>, SampleError>>()?;
        let median = |mut v: Vec<f64>| -> f64 {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v[v.len() / 2]
        };
        out.push(M1TrendPoint {
            n,
            median: median(stats.iter().map(|s| s.0).collect()),
            median_doubled_grid: two_grids
                .then(|| median(stats.iter().map(|s| s.1).collect())),
        });
    }
    Ok(out)
}

/// M1 bound together with a Gromov-Hausdorff bound for the encoded trees,
/// the latter through the correspondence induced by the optimal alignment:
/// matched alignment pairs become shared sample points of the two trees.
pub fn gh_bound_from_m1_certificate(
    ra: &DiscreteRep,
    rb: &DiscreteRep,
    cloud_cap: usize,
) -> Result<(f64, f64), MetricError> {
    let (m1, path) = m1_upper_discrete_with_alignment(ra, rb);
    let stride = (path.len() / cloud_cap).max(1);
    let mut picks: Vec<(u32, u32)> = path.iter().cloned().step_by(stride).collect();
    if picks.last() != path.last() {
        picks.push(*path.last().unwrap());
    }
    let cloud = |r: &DiscreteRep, side: usize| -> MetricCloud {
        let rmq = MinSparseTable::new(&r.chi);
        let idx: Vec<usize> =
            picks.iter().map(|p| if side == 0 { p.0 as usize } else { p.1 as usize }).collect();
        let m = idx.len();
        let mut dist = DistMatrix::zeros(m);
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (idx[i].min(idx[j]), idx[i].max(idx[j]));
                let d = r.chi[a] + r.chi[b] - 2.0 * rmq.min(a, b);
                dist.set(i, j, d);
            }
        }
        let times = idx.iter().map(|&i| r.tau[i]).collect();
        MetricCloud { times, dist, root: 0, mass: None }
    };
    let ca = cloud(ra, 0);
    let cb = cloud(rb, 1);
    let gh = gh_upper_diag(&ca, &cb)?;
    Ok((m1, gh))
}

#[derive(Debug, Clone)]
pub struct DimensionTriple {
    pub source: f64,
    pub rotated: f64,
    pub looptree: f64,
}

/// Correlation-dimension estimates for the source tree, its rotation, and
/// its looptree, each over `m` sampled points normalized to unit diameter.
pub fn dimension_replica(
    alpha: f64,
    n: usize,
    m: usize,
    seed: Seeded,
) -> Result<DimensionTriple, SampleError> {
    let law = OffspringLaw::stable(alpha)?;
    let mut rng = seed.rng();
    let tree = sample_conditioned(&law, n, &mut rng)?;
    let rot = rotate(&tree);

    let sample_ids = |count: usize, lo: usize, hi: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        let mut ids: Vec<usize> = vec![lo];
        while ids.len() < count {
            ids.push(rng.random_range(lo..hi));
        }
        ids
    };
    let estimate = |cloud: &mut MetricCloud| -> f64 {
        let diam = cloud.dist.max().max(1.0);
        cloud.dist.scale(1.0 / diam);
        correlation_dimension(cloud, None).map(|e| e.dim).unwrap_or(f64::NAN)
    };

    let ids = sample_ids(m, 0, tree.n(), &mut rng);
    let mut cloud = tree_graph_cloud(&tree, &ids).expect("root leads");
    let source = estimate(&mut cloud);

    let ids = sample_ids(m, 0, rot.tree.n(), &mut rng);
    let mut cloud = tree_graph_cloud(&rot.tree, &ids).expect("root leads");
    let rotated = estimate(&mut cloud);

    let ids = sample_ids(m, 0, tree.n() - 1, &mut rng);
    let mut cloud = looptree_cloud(&tree, &ids).expect("root leads");
    let loop_dim = estimate(&mut cloud);

    Ok(DimensionTriple { source, rotated, looptree: loop_dim })
}

/// Median of the triple over replicas.
pub fn dimension_experiment(
    alpha: f64,
    n: usize,
    m: usize,
    reps: usize,
    seed: u64,
) -> Result<(DimensionTriple, Vec<DimensionTriple>), SampleError> {
    let all: Vec<DimensionTriple> = (0..reps)
        .into_par_iter()
        .map(|rep| dimension_replica(alpha, n, m, Seeded::new(seed, rep as u64)))
        .collect::<Result<Vec<_>, SampleError>>()?;
    let median = |pick: fn(&DimensionTriple) -> f64| -> f64 {
        let mut v: Vec<f64> = all.iter().map(pick).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    Ok((
        DimensionTriple {
            source: median(|t| t.source),
            rotated: median(|t| t.rotated),
            looptree: median(|t| t.looptree),
        },
        all,
    ))
}

/// Empirical frequency of each vertex among the projections of uniform times
/// under the piecewise-constant contour view, tested against the full-degree
/// proportions.  Returns the chi-squared p-value.
pub fn degree_bias_pvalue(tree: &PlaneTree, draws: usize, seed: Seeded) -> f64 {
    let n = tree.n();
    assert!(n >= 2);
    let verts = contour_vertices(tree);
    let p = 2 * (n - 1);
    let mut rng = seed.rng();
    let mut counts = vec![0u64; n];
    for _ in 0..draws {
        let t: f64 = rng.random();
        let k = ((t * p as f64).floor() as usize).min(p - 1);
        counts[verts[k]] += 1;
    }
    let mut stat = 0.0;
    for v in 0..n {
        let full_degree = tree.degree(v) as f64 + if v == 0 { 0.0 } else { 1.0 };
        let expected = draws as f64 * full_degree / p as f64;
        stat += (counts[v] as f64 - expected).powi(2) / expected;
    }
    chi_square_pvalue(stat, n - 1)
}

/// Draws `draws` conditioned trees of size n and tests the empirical shape
/// frequencies against the exact conditional distribution.  Returns
/// (p-value, number of admissible shapes).
pub fn sampler_exactness_pvalue(
    law: &OffspringLaw,
    n: usize,
    draws: usize,
    seed: Seeded,
) -> Result<(f64, usize), SampleError> {
    let table = conditional_shape_table(law, n);
    let index: std::collections::HashMap<Vec<u32>, usize> = table
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.degrees().to_vec(), i))
        .collect();
    let mut rng = seed.rng();
    let mut counts = vec![0u64; table.len()];
    for _ in 0..draws {
        let t = sample_conditioned(law, n, &mut rng)?;
        let i = *index
            .get(t.degrees())
            .expect("sampled a shape of probability zero");
        counts[i] += 1;
    }
    if table.len() <= 1 {
        return Ok((1.0, table.len()));
    }
    let mut stat = 0.0;
    for (i, (_, prob)) in table.iter().enumerate() {
        let expected = draws as f64 * prob;
        stat += (counts[i] as f64 - expected).powi(2) / expected;
    }
    Ok((chi_square_pvalue(stat, table.len() - 1), table.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlag::walk_representation;
    use crate::tree::example_tree;

    #[test]
    fn chi_square_tail_values() {
        // P(chi2_1 > 3.841) ~ 0.05
        assert!((chi_square_pvalue(3.841, 1) - 0.05).abs() < 1e-3);
        assert_eq!(chi_square_pvalue(5.0, 0), 1.0);
    }

    #[test]
    fn exhaustive_sweep_reports_catalan_counts() {
        let (counts, failure) = identity_sweep_exhaustive(6);
        assert!(failure.is_none());
        assert_eq!(counts, vec![(1, 1), (2, 1), (3, 2), (4, 5), (5, 14), (6, 42)]);
    }

    #[test]
    fn dilation_smoke() {
        let law = OffspringLaw::geometric();
        let res = dilation_experiment(&law, 2000, 8, 17).unwrap();
        assert_eq!(res.ratios.len(), 8);
        assert!(res.mean > 1.2 && res.mean < 3.0, "mean {}", res.mean);
    }

    #[test]
    fn m1_statistic_zero_for_identical_walks() {
        let c = contour_walk(&example_tree());
        assert_eq!(normalized_m1_statistic(&c, &c, 256), 0.0);
    }

    #[test]
    fn gh_certificate_bound_controls_the_pair() {
        let mut rng = Seeded::new(23, 0).rng();
        let law = OffspringLaw::geometric();
        for _ in 0..5 {
            let t = sample_conditioned(&law, 60, &mut rng).unwrap();
            let u = sample_conditioned(&law, 60, &mut rng).unwrap();
            let grid = 512;
            let ca = discretize(
                &walk_representation(&TimeScaledFn::new(
                    contour_walk(&t),
                    Interpolation::Linear,
                )),
                grid,
            );
            let cb = discretize(
                &walk_representation(&TimeScaledFn::new(
                    contour_walk(&u),
                    Interpolation::Linear,
                )),
                grid,
            );
            let (m1, gh) = gh_bound_from_m1_certificate(&ca, &cb, 400).unwrap();
            assert!(gh <= 2.0 * m1 + 4.0 / grid as f64, "gh {gh} m1 {m1}");
        }
    }

    #[test]
    fn degree_bias_matches_on_the_example() {
        let p = degree_bias_pvalue(&example_tree(), 100_000, Seeded::new(5, 0));
        assert!(p > 1e-3, "p = {p}");
    }

    #[test]
    fn sampler_exactness_smoke() {
        let (p, shapes) =
            sampler_exactness_pvalue(&OffspringLaw::geometric(), 4, 20_000, Seeded::new(3, 0))
                .unwrap();
        assert_eq!(shapes, 5);
        assert!(p > 1e-3, "p = {p}");
        let (p, shapes) =
            sampler_exactness_pvalue(&OffspringLaw::binary(), 3, 500, Seeded::new(3, 1)).unwrap();
        assert_eq!(shapes, 1);
        assert_eq!(p, 1.0);
    }
}
