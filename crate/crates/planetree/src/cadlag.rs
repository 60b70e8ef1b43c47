//! Càdlàg functions on [0,1] with finitely many breakpoints, their completed
//! graphs, parametric representations, time reversal, and moduli of
//! continuity.

use crate::walk::{Interpolation, TimeScaledFn};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CadlagError {
    #[error("breakpoints must start at 0, end at 1 and strictly increase")]
    BadBreakpoints,
    #[error("segment {0} is marked constant but its endpoint values differ")]
    BrokenConstantSegment(usize),
    #[error("modulus window must be positive, got {0}")]
    BadWindow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    /// Left limit at `t` (equals `right` when the function is continuous here).
    pub left: f64,
    /// Value at `t` (right-continuity).
    pub right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Constant,
    Affine,
}

/// Piecewise constant or affine càdlàg function on [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct CadlagFn {
    knots: Vec<Knot>,
    segments: Vec<SegmentKind>,
}

impl CadlagFn {
    pub fn from_knots(knots: Vec<Knot>, segments: Vec<SegmentKind>) -> Result<Self, CadlagError> {
        if knots.len() < 2
            || segments.len() + 1 != knots.len()
            || knots[0].t != 0.0
            || knots[knots.len() - 1].t != 1.0
            || knots.windows(2).any(|w| w[0].t >= w[1].t)
        {
            return Err(CadlagError::BadBreakpoints);
        }
        for (i, seg) in segments.iter().enumerate() {
            if *seg == SegmentKind::Constant && knots[i].right != knots[i + 1].left {
                return Err(CadlagError::BrokenConstantSegment(i));
            }
        }
        Ok(CadlagFn { knots, segments })
    }

    pub fn constant(c: f64) -> Self {
        CadlagFn {
            knots: vec![Knot { t: 0.0, left: c, right: c }, Knot { t: 1.0, left: c, right: c }],
            segments: vec![SegmentKind::Constant],
        }
    }

    /// Piecewise constant function: value `pieces[i].1` on
    /// [pieces[i].0, pieces[i+1].0), the last piece running through t = 1.
    pub fn piecewise_constant(pieces: &[(f64, f64)]) -> Self {
        assert!(!pieces.is_empty() && pieces[0].0 == 0.0);
        let mut knots = Vec::new();
        let mut segments = Vec::new();
        let mut prev = pieces[0].1;
        knots.push(Knot { t: 0.0, left: prev, right: prev });
        for &(t, v) in &pieces[1..] {
            if v != prev {
                debug_assert!(t > knots.last().unwrap().t);
                knots.push(Knot { t, left: prev, right: v });
                segments.push(SegmentKind::Constant);
                prev = v;
            }
        }
        if knots.last().unwrap().t < 1.0 {
            knots.push(Knot { t: 1.0, left: prev, right: prev });
            segments.push(SegmentKind::Constant);
        }
        CadlagFn { knots, segments }
    }

    /// Indicator of [a, 1].
    pub fn step_indicator(a: f64) -> Self {
        Self::piecewise_constant(&[(0.0, 0.0), (a, 1.0)])
    }

    /// Either interpolation view of an integer walk scaled to unit time.
    pub fn from_walk(f: &TimeScaledFn) -> Self {
        let p = f.steps();
        if p == 0 {
            return Self::constant(f.walk.values[0] as f64);
        }
        match f.interpolation {
            Interpolation::Linear => {
                let knots = (0..=p)
                    .map(|k| {
                        let v = f.walk.values[k] as f64;
                        Knot { t: k as f64 / p as f64, left: v, right: v }
                    })
                    .collect();
                CadlagFn { knots, segments: vec![SegmentKind::Affine; p] }
            }
            Interpolation::Constant => {
                let pieces: Vec<(f64, f64)> = (0..=p)
                    .map(|k| (k as f64 / p as f64, f.walk.values[k.min(p)] as f64))
                    .collect();
                Self::piecewise_constant(&pieces)
            }
        }
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    fn segment_of(&self, t: f64) -> usize {
        debug_assert!((0.0..=1.0).contains(&t));
        // index i with knots[i].t <= t < knots[i+1].t (last segment owns t=1)
        let i = self.knots.partition_point(|k| k.t <= t);
        i.clamp(1, self.knots.len() - 1) - 1
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.segment_of(t);
        let (a, b) = (&self.knots[i], &self.knots[i + 1]);
        if t == a.t {
            return a.right;
        }
        if t >= b.t {
            return b.right;
        }
        match self.segments[i] {
            SegmentKind::Constant => a.right,
            SegmentKind::Affine => {
                let frac = (t - a.t) / (b.t - a.t);
                a.right + (b.left - a.right) * frac
            }
        }
    }

    pub fn left_value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.knots[0].right;
        }
        let i = self.segment_of(t);
        let (a, b) = (&self.knots[i], &self.knots[i + 1]);
        if t == a.t {
            return a.left;
        }
        if t >= b.t {
            return b.left;
        }
        self.value(t) // continuous inside a segment
    }

    /// Jump times with their (nonzero) sizes.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        self.knots
            .iter()
            .filter(|k| k.left != k.right)
            .map(|k| (k.t, k.right - k.left))
            .collect()
    }

    pub fn has_negative_jump(&self) -> bool {
        self.knots.iter().any(|k| k.right < k.left)
    }

    pub fn total_jump(&self) -> f64 {
        self.knots.iter().map(|k| (k.right - k.left).abs()).sum()
    }

    pub fn sup_abs(&self) -> f64 {
        self.knots
            .iter()
            .flat_map(|k| [k.left.abs(), k.right.abs()])
            .fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.knots
            .iter()
            .flat_map(|k| [k.left, k.right])
            .fold(f64::INFINITY, f64::min)
    }

    /// Infimum of the function over the closed interval [s, t].
    pub fn inf_on(&self, s: f64, t: f64) -> f64 {
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        let mut inf = self.value(s).min(self.value(t));
        for k in &self.knots {
            if k.t > s && k.t <= t {
                inf = inf.min(k.left);
            }
            if k.t > s && k.t < t {
                inf = inf.min(k.right);
            }
        }
        inf
    }

    /// Time reversal t -> left limit at 1 - t.  Positive jumps become
    /// negative ones; exact at the breakpoint level.
    pub fn time_reverse(&self) -> CadlagFn {
        let m = self.knots.len();
        let mut knots: Vec<Knot> = self
            .knots
            .iter()
            .rev()
            .map(|k| Knot { t: 1.0 - k.t, left: k.right, right: k.left })
            .collect();
        knots[0].left = knots[0].right;
        knots[m - 1].right = knots[m - 1].left;
        let segments = self.segments.iter().rev().cloned().collect();
        CadlagFn { knots, segments }
    }

    /// sup |x(u) - x(v)| over |u - v| <= delta, exact over the breakpoint
    /// structure (the sup is attained in the closure for this class).
    pub fn modulus_of_continuity(&self, delta: f64) -> Result<f64, CadlagError> {
        if delta <= 0.0 {
            return Err(CadlagError::BadWindow(delta));
        }
        let mut anchors: Vec<(f64, f64)> = Vec::new();
        for k in &self.knots {
            anchors.push((k.t, k.left));
            anchors.push((k.t, k.right));
        }
        let mut best = 0.0f64;
        for &(t, v) in &anchors {
            for &(t2, v2) in &anchors {
                if (t - t2).abs() <= delta {
                    best = best.max((v - v2).abs());
                }
            }
            for shifted in [t - delta, t + delta] {
                if (0.0..=1.0).contains(&shifted) {
                    best = best.max((v - self.value(shifted)).abs());
                    best = best.max((v - self.left_value(shifted)).abs());
                }
            }
        }
        Ok(best)
    }

    /// Vertex polyline of the completed graph: the graph of the function with
    /// every jump filled by a vertical segment, traced left to right as
    /// (value, time) pairs.
    pub fn completed_graph(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let push = |p: (f64, f64), out: &mut Vec<(f64, f64)>| {
            if out.last() != Some(&p) {
                out.push(p);
            }
        };
        for k in &self.knots {
            push((k.left, k.t), &mut out);
            push((k.right, k.t), &mut out);
        }
        out
    }

    /// One-to-one parametric representation.  Jump times receive parameter
    /// intervals with mass proportional to the jump size (half the total
    /// parameter length is split among jumps); continuity stretches advance
    /// the parameter at half speed.  Jump-free functions are represented by
    /// (x, identity).
    pub fn parametric_representation(&self) -> ParamRep {
        let total = self.total_jump();
        if total == 0.0 {
            let mut points = Vec::with_capacity(self.knots.len());
            for k in &self.knots {
                points.push(RepPoint { u: k.t, chi: k.right, tau: k.t });
            }
            return ParamRep { points };
        }
        let mut points = Vec::new();
        let mut u = 0.0f64;
        points.push(RepPoint { u, chi: self.knots[0].right, tau: 0.0 });
        for i in 1..self.knots.len() {
            let k = &self.knots[i];
            u += (k.t - self.knots[i - 1].t) / 2.0;
            points.push(RepPoint { u, chi: k.left, tau: k.t });
            if k.left != k.right {
                u += (k.right - k.left).abs() / (2.0 * total);
                points.push(RepPoint { u, chi: k.right, tau: k.t });
            }
        }
        // close any floating-point slack so the parameter ends exactly at 1
        let last = points.len() - 1;
        points[last].u = 1.0;
        ParamRep { points }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepPoint {
    pub u: f64,
    pub chi: f64,
    pub tau: f64,
}

/// A parametric representation of a càdlàg function: a monotone continuous
/// parametrization (spatial, temporal) of its completed graph, stored as a
/// polyline that is affine in the parameter between points.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRep {
    pub points: Vec<RepPoint>,
}

impl ParamRep {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn eval(&self, u: f64) -> (f64, f64) {
        let pts = &self.points;
        if u <= pts[0].u {
            return (pts[0].chi, pts[0].tau);
        }
        if u >= pts[pts.len() - 1].u {
            let p = pts[pts.len() - 1];
            return (p.chi, p.tau);
        }
        let i = pts.partition_point(|p| p.u <= u) - 1;
        let (a, b) = (pts[i], pts[i + 1]);
        if b.u == a.u {
            return (b.chi, b.tau);
        }
        let frac = (u - a.u) / (b.u - a.u);
        (a.chi + (b.chi - a.chi) * frac, a.tau + (b.tau - a.tau) * frac)
    }

    pub fn scale_spatial(&mut self, factor: f64) {
        for p in &mut self.points {
            p.chi *= factor;
        }
    }

    /// Machine check that this is a parametric representation of `x`:
    /// endpoints pinned, temporal component monotone onto [0,1], and the
    /// trace on the completed graph, exactly at polyline points and within
    /// `tol` on a dense parameter grid.
    pub fn validate(&self, x: &CadlagFn, grid: usize, tol: f64) -> Result<(), String> {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if first.tau != 0.0 || last.tau != 1.0 {
            return Err("temporal endpoints are not 0 and 1".into());
        }
        if first.chi != x.value(0.0) || last.chi != x.value(1.0) {
            return Err("spatial endpoints do not match the function".into());
        }
        for w in pts.windows(2) {
            if w[1].tau < w[0].tau {
                return Err("temporal component decreases".into());
            }
            if w[1].u < w[0].u {
                return Err("parameter decreases".into());
            }
        }
        for p in pts {
            let lo = x.left_value(p.tau).min(x.value(p.tau));
            let hi = x.left_value(p.tau).max(x.value(p.tau));
            if !(lo..=hi).contains(&p.chi) {
                return Err(format!("point at tau={} leaves the completed graph", p.tau));
            }
        }
        for g in 0..=grid {
            let u = g as f64 / grid as f64;
            let (chi, tau) = self.eval(u);
            let lo = x.left_value(tau).min(x.value(tau)) - tol;
            let hi = x.left_value(tau).max(x.value(tau)) + tol;
            if !(lo..=hi).contains(&chi) {
                return Err(format!("trace leaves the completed graph near u={u}"));
            }
        }
        Ok(())
    }
}

/// Representation of a time-scaled walk without materializing the function:
/// the linear view is its own parametrization; the constant view dwells on
/// value plateaus and spends parameter mass on each jump proportional to the
/// step size.
pub fn walk_representation(f: &TimeScaledFn) -> ParamRep {
    CadlagFn::from_walk(f).parametric_representation()
}
