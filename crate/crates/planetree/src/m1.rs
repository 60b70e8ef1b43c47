//! Upper bounds on the M1 distance between càdlàg functions: a minimax
//! dynamic-programming alignment of discretized one-to-one parametric
//! representations.  The cost of a monotone alignment is the largest of the
//! spatial and temporal gaps over its matched pairs; since both polylines
//! are affine between the matched points, any alignment cost is a true upper
//! bound on the infimum over representation pairs.

use crate::cadlag::{CadlagFn, ParamRep};
use crate::walk::TimeScaledFn;

/// A representation sampled at finitely many parameter values.
#[derive(Debug, Clone)]
pub struct DiscreteRep {
    pub chi: Vec<f64>,
    pub tau: Vec<f64>,
}

impl DiscreteRep {
    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }
}

/// Keeps every polyline point when there are at most `max_points`, otherwise
/// resamples the representation at uniformly spaced parameter values (which
/// allocates points to each jump in proportion to its size).
pub fn discretize(rep: &ParamRep, max_points: usize) -> DiscreteRep {
    assert!(max_points >= 2);
    if rep.len() <= max_points {
        DiscreteRep {
            chi: rep.points.iter().map(|p| p.chi).collect(),
            tau: rep.points.iter().map(|p| p.tau).collect(),
        }
    } else {
        let mut chi = Vec::with_capacity(max_points);
        let mut tau = Vec::with_capacity(max_points);
        for i in 0..max_points {
            let u = i as f64 / (max_points - 1) as f64;
            let (x, t) = rep.eval(u);
            chi.push(x);
            tau.push(t);
        }
        DiscreteRep { chi, tau }
    }
}

fn gap(a: &DiscreteRep, b: &DiscreteRep, i: usize, j: usize) -> f64 {
    (a.chi[i] - b.chi[j]).abs().max((a.tau[i] - b.tau[j]).abs())
}

/// Minimax alignment cost: an upper bound on the M1 distance.
pub fn m1_upper_discrete(a: &DiscreteRep, b: &DiscreteRep) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    let mut prev = vec![0.0f64; n2];
    let mut cur = vec![0.0f64; n2];
    prev[0] = gap(a, b, 0, 0);
    for j in 1..n2 {
        prev[j] = prev[j - 1].max(gap(a, b, 0, j));
    }
    for i in 1..n1 {
        cur[0] = prev[0].max(gap(a, b, i, 0));
        for j in 1..n2 {
            let reach = prev[j].min(prev[j - 1]).min(cur[j - 1]);
            cur[j] = reach.max(gap(a, b, i, j));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n2 - 1]
}

/// Like `m1_upper_discrete` but also returns the optimal monotone alignment
/// (index pairs from (0,0) to (n1-1,n2-1)).
pub fn m1_upper_discrete_with_alignment(
    a: &DiscreteRep,
    b: &DiscreteRep,
) -> (f64, Vec<(u32, u32)>) {
    let (n1, n2) = (a.len(), b.len());
    assert!(n1 * n2 <= 1 << 28, "alignment table too large");
    let mut cost = vec![0.0f64; n1 * n2];
    let mut mv = vec![0u8; n1 * n2];
    cost[0] = gap(a, b, 0, 0);
    for j in 1..n2 {
        cost[j] = cost[j - 1].max(gap(a, b, 0, j));
        mv[j] = 1; // from the left
    }
    for i in 1..n1 {
        cost[i * n2] = cost[(i - 1) * n2].max(gap(a, b, i, 0));
        mv[i * n2] = 2; // from above
        for j in 1..n2 {
            let diag = cost[(i - 1) * n2 + j - 1];
            let up = cost[(i - 1) * n2 + j];
            let left = cost[i * n2 + j - 1];
            let (reach, m) = if diag <= up && diag <= left {
                (diag, 3u8)
            } else if up <= left {
                (up, 2u8)
            } else {
                (left, 1u8)
            };
            cost[i * n2 + j] = reach.max(gap(a, b, i, j));
            mv[i * n2 + j] = m;
        }
    }
    let mut path = Vec::new();
    let (mut i, mut j) = (n1 - 1, n2 - 1);
    loop {
        path.push((i as u32, j as u32));
        if i == 0 && j == 0 {
            break;
        }
        match mv[i * n2 + j] {
            1 => j -= 1,
            2 => i -= 1,
            _ => {
                i -= 1;
                j -= 1;
            }
        }
    }
    path.reverse();
    (cost[n1 * n2 - 1], path)
}

pub const DEFAULT_GRID: usize = 4096;

/// Upper bound on the M1 distance between two càdlàg functions via their
/// canonical representations discretized to at most `grid` points each.
pub fn m1_upper(x: &CadlagFn, y: &CadlagFn, grid: usize) -> f64 {
    let ra = discretize(&x.parametric_representation(), grid);
    let rb = discretize(&y.parametric_representation(), grid);
    m1_upper_discrete(&ra, &rb)
}

/// Upper bound between time-scaled walk views.
pub fn m1_upper_walks(f: &TimeScaledFn, g: &TimeScaledFn, grid: usize) -> f64 {
    m1_upper(&CadlagFn::from_walk(f), &CadlagFn::from_walk(g), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlag::{Knot, SegmentKind};
    use crate::sampler::{sample_conditioned, OffspringLaw, Seeded};
    use crate::walk::{contour_walk, height_walk, Interpolation};

    fn ramp(a: f64, b: f64) -> CadlagFn {
        // continuous, 0 before a, rising affinely to 1 at b, then 1
        CadlagFn::from_knots(
            vec![
                Knot { t: 0.0, left: 0.0, right: 0.0 },
                Knot { t: a, left: 0.0, right: 0.0 },
                Knot { t: b, left: 1.0, right: 1.0 },
                Knot { t: 1.0, left: 1.0, right: 1.0 },
            ],
            vec![SegmentKind::Constant, SegmentKind::Affine, SegmentKind::Constant],
        )
        .unwrap()
    }

    #[test]
    fn identical_inputs_have_zero_bound() {
        let x = CadlagFn::step_indicator(0.5);
        assert_eq!(m1_upper(&x, &x, 128), 0.0);
        let tree = crate::tree::example_tree();
        let h = TimeScaledFn::new(height_walk(&tree), Interpolation::Linear);
        assert_eq!(m1_upper_walks(&h, &h, 512), 0.0);
    }

    #[test]
    fn step_vs_steep_ramp_is_small() {
        // a jump and a steep ramp finishing at the jump time are M1-close
        let eps = 1.0 / 64.0;
        let x = CadlagFn::step_indicator(0.5);
        let y = ramp(0.5 - eps, 0.5);
        let bound = m1_upper(&x, &y, 512);
        assert!(bound <= eps + 1e-9, "bound {bound}");
        // ... while the uniform distance stays near 1
        assert!((x.value(0.5 - eps / 2.0) - y.value(0.5 - eps / 2.0)).abs() > 0.4);
    }

    #[test]
    fn step_vs_flat_is_half_no_less() {
        // against the constant 1/2, the best spatial alignment still must
        // traverse the whole unit jump
        let x = CadlagFn::step_indicator(0.5);
        let y = CadlagFn::constant(0.5);
        let bound = m1_upper(&x, &y, 512);
        assert!((bound - 0.5).abs() < 1e-9, "bound {bound}");
        // sanity lower bound: half the largest jump of x
        assert!(bound >= 0.5 - 1e-12);
    }

    #[test]
    fn linear_vs_constant_view_within_one_over_p() {
        let mut rng = Seeded::new(5, 0).rng();
        for law in [OffspringLaw::geometric(), OffspringLaw::stable(1.5).unwrap()] {
            for n in [8usize, 33, 120] {
                let t = sample_conditioned(&law, n, &mut rng).unwrap();
                let c = contour_walk(&t);
                let p = (c.len() - 1).max(1);
                let lin = TimeScaledFn::new(c.clone(), Interpolation::Linear);
                let con = TimeScaledFn::new(c, Interpolation::Constant);
                let bound = m1_upper_walks(&lin, &con, 4096);
                assert!(
                    bound <= 1.0 / p as f64 + 1e-9,
                    "law {} n {n}: bound {bound} > 1/{p}",
                    law.tag()
                );
            }
        }
    }

    #[test]
    fn triangle_inequality_with_grid_slack() {
        let mut rng = Seeded::new(6, 0).rng();
        let law = OffspringLaw::geometric();
        let grid = 512;
        for _ in 0..10 {
            let trees: Vec<_> =
                (0..3).map(|_| sample_conditioned(&law, 40, &mut rng).unwrap()).collect();
            let fns: Vec<CadlagFn> = trees
                .iter()
                .map(|t| {
                    CadlagFn::from_walk(&TimeScaledFn::new(
                        contour_walk(t),
                        Interpolation::Linear,
                    ))
                })
                .collect();
            let d01 = m1_upper(&fns[0], &fns[1], grid);
            let d12 = m1_upper(&fns[1], &fns[2], grid);
            let d02 = m1_upper(&fns[0], &fns[2], grid);
            assert!(d02 <= d01 + d12 + 2.0 / grid as f64, "{d02} vs {d01}+{d12}");
        }
    }

    #[test]
    fn alignment_endpoints_and_monotonicity() {
        let x = CadlagFn::step_indicator(0.25);
        let y = CadlagFn::step_indicator(0.3);
        let ra = discretize(&x.parametric_representation(), 64);
        let rb = discretize(&y.parametric_representation(), 64);
        let (value, path) = m1_upper_discrete_with_alignment(&ra, &rb);
        assert_eq!(path.first(), Some(&(0, 0)));
        assert_eq!(path.last(), Some(&((ra.len() - 1) as u32, (rb.len() - 1) as u32)));
        for w in path.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
            assert!(w[1].0 - w[0].0 <= 1 && w[1].1 - w[0].1 <= 1);
        }
        assert!((value - 0.05).abs() < 0.02, "two nearby steps align temporally: {value}");
        assert_eq!(m1_upper_discrete(&ra, &rb), value);
    }

    #[test]
    fn refining_the_grid_does_not_hurt() {
        let x = CadlagFn::step_indicator(0.5);
        let y = ramp(0.4, 0.55);
        let coarse = m1_upper(&x, &y, 64);
        let fine = m1_upper(&x, &y, 1024);
        assert!(fine <= coarse + 1e-9, "coarse {coarse} fine {fine}");
    }
}
