//! Encoding walks of a plane tree (height, contour, Łukasiewicz), spine
//! counts, the height-to-contour change of time, and time-scaled function
//! views of integer walks.

use crate::tree::{PlaneTree, TreeError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("index {k} out of range for a tree with {n} vertices")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("not a valid {kind} walk: {reason}")]
    InvalidWalk { kind: &'static str, reason: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    Height,
    Contour,
    Lukasiewicz,
    Custom,
}

/// An integer sequence together with what it encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub values: Vec<i64>,
    pub kind: WalkKind,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> i64 {
        *self.values.iter().max().expect("nonempty walk")
    }

    pub fn max_abs(&self) -> i64 {
        self.values.iter().map(|v| v.abs()).max().expect("nonempty walk")
    }

    /// Values read right to left; the time-reversed process.
    pub fn reversed(&self) -> Walk {
        let mut values = self.values.clone();
        values.reverse();
        Walk { values, kind: WalkKind::Custom }
    }
}

/// Height process: depth of the k-th vertex in depth-first order, with an
/// extra terminal 0.  Length n+1.
pub fn height_walk(tree: &PlaneTree) -> Walk {
    let mut values: Vec<i64> = tree.depths().iter().map(|&d| i64::from(d)).collect();
    values.push(0);
    Walk { values, kind: WalkKind::Height }
}

/// Vertices visited by the depth-first contour traversal,
/// x_0 = root, ..., x_{2(n-1)} = root.
pub fn contour_vertices(tree: &PlaneTree) -> Vec<usize> {
    let n = tree.n();
    let mut seq = Vec::with_capacity(2 * n.saturating_sub(1) + 1);
    let mut next_child = vec![0u32; n];
    let mut v = tree.root();
    seq.push(v);
    if n == 1 {
        return seq;
    }
    loop {
        if next_child[v] < tree.degree(v) {
            let c = tree.children(v)[next_child[v] as usize];
            next_child[v] += 1;
            v = c;
        } else if v == tree.root() {
            break;
        } else {
            v = tree.parent(v).unwrap();
        }
        seq.push(v);
    }
    seq
}

/// Contour process: height of the contour particle at each step.
/// Length 2(n-1)+1, a single 0 for the one-vertex tree.
pub fn contour_walk(tree: &PlaneTree) -> Walk {
    let values = contour_vertices(tree)
        .into_iter()
        .map(|v| i64::from(tree.depth(v)))
        .collect();
    Walk { values, kind: WalkKind::Contour }
}

/// Łukasiewicz walk: partial sums of (out-degree - 1) in depth-first order.
/// Length n+1, ends at -1.
pub fn lukasiewicz_walk(tree: &PlaneTree) -> Walk {
    let mut values = Vec::with_capacity(tree.n() + 1);
    let mut s = 0i64;
    values.push(s);
    for v in 0..tree.n() {
        s += i64::from(tree.degree(v)) - 1;
        values.push(s);
    }
    Walk { values, kind: WalkKind::Lukasiewicz }
}

/// Number of edges grafted strictly left of the root path of `v`:
/// elder siblings of each vertex on the path from the root to `v`.
pub fn left_count(tree: &PlaneTree, v: usize) -> u64 {
    let mut total = 0u64;
    let mut u = v;
    while let Some(_) = tree.parent(u) {
        total += u64::from(tree.birth_rank(u) - 1);
        u = tree.parent(u).unwrap();
    }
    total
}

/// Number of edges grafted strictly right of the root path of `v`.
pub fn right_count(tree: &PlaneTree, v: usize) -> u64 {
    let mut total = 0u64;
    let mut u = v;
    while let Some(p) = tree.parent(u) {
        total += u64::from(tree.degree(p) - tree.birth_rank(u));
        u = p;
    }
    total
}

/// First contour time visiting the k-th depth-first vertex: 2k - H(k),
/// with the total contour time 2n-2 for k = n.
pub fn height_to_contour_time(tree: &PlaneTree, k: usize) -> Result<usize, WalkError> {
    let n = tree.n();
    if k > n {
        return Err(WalkError::IndexOutOfRange { k, n });
    }
    if k == n {
        return Ok(2 * n - 2);
    }
    Ok(2 * k - tree.depth(k) as usize)
}

/// Rebuilds the tree from its height process.
pub fn tree_from_height(values: &[i64]) -> Result<PlaneTree, WalkError> {
    let bad = |reason: String| WalkError::InvalidWalk { kind: "height", reason };
    if values.len() < 2 {
        return Err(bad("needs at least two entries".into()));
    }
    let n = values.len() - 1;
    if values[0] != 0 || values[n] != 0 {
        return Err(bad("must start and end at 0".into()));
    }
    let mut degrees = vec![0u32; n];
    let mut path: Vec<usize> = Vec::new(); // path[d] = current vertex at depth d
    path.push(0);
    for k in 1..n {
        let h = values[k];
        if h < 1 || h > path.len() as i64 {
            return Err(bad(format!("step to depth {h} at index {k} is not reachable")));
        }
        let parent = path[(h - 1) as usize];
        degrees[parent] += 1;
        path.truncate(h as usize);
        path.push(k);
    }
    Ok(PlaneTree::from_degrees(degrees)?)
}

/// Rebuilds the tree from its contour process.
pub fn tree_from_contour(values: &[i64]) -> Result<PlaneTree, WalkError> {
    let bad = |reason: String| WalkError::InvalidWalk { kind: "contour", reason };
    if values.is_empty() || values.len() % 2 == 0 {
        return Err(bad("length must be odd".into()));
    }
    if values[0] != 0 || values[values.len() - 1] != 0 {
        return Err(bad("must start and end at 0".into()));
    }
    let n = (values.len() + 1) / 2;
    let mut degrees = vec![0u32; n];
    let mut stack: Vec<usize> = vec![0];
    let mut created = 0usize;
    for k in 1..values.len() {
        match values[k] - values[k - 1] {
            1 => {
                created += 1;
                let parent = *stack.last().unwrap();
                degrees[parent] += 1;
                stack.push(created);
            }
            -1 => {
                if stack.len() <= 1 {
                    return Err(bad(format!("walk dips below the root at index {k}")));
                }
                stack.pop();
            }
            _ => return Err(bad(format!("step at index {k} is not +/-1"))),
        }
    }
    if created != n - 1 || stack.len() != 1 {
        return Err(bad("traversal does not close at the root".into()));
    }
    // degrees were counted in visit order, which is depth-first order
    Ok(PlaneTree::from_degrees(degrees)?)
}

/// Rebuilds the tree from its Łukasiewicz walk.
pub fn tree_from_lukasiewicz(values: &[i64]) -> Result<PlaneTree, WalkError> {
    let bad = |reason: String| WalkError::InvalidWalk { kind: "lukasiewicz", reason };
    if values.len() < 2 || values[0] != 0 {
        return Err(bad("must start at 0 with at least one step".into()));
    }
    let mut degrees = Vec::with_capacity(values.len() - 1);
    for k in 1..values.len() {
        let step = values[k] - values[k - 1];
        if step < -1 {
            return Err(bad(format!("step at index {k} is below -1")));
        }
        degrees.push((step + 1) as u32);
    }
    Ok(PlaneTree::from_degrees(degrees)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    Constant,
}

/// Exact rational value, used for grid-exact evaluation of time-scaled walks.
#[derive(Debug, Clone, Copy)]
pub struct Rational {
    pub num: i128,
    pub den: i128,
}

impl Rational {
    pub fn integer(v: i64) -> Self {
        Rational { num: i128::from(v), den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.num * other.den == other.num * self.den
    }
}

/// A walk of length p+1 viewed as a function on [0,1]: affine on each
/// [k/p, (k+1)/p] (linear view) or equal to the value at floor(p t)
/// (right-continuous constant view).  Evaluation at rational times is exact.
#[derive(Debug, Clone)]
pub struct TimeScaledFn {
    pub walk: Walk,
    pub interpolation: Interpolation,
}

impl TimeScaledFn {
    pub fn new(walk: Walk, interpolation: Interpolation) -> Self {
        assert!(!walk.values.is_empty());
        TimeScaledFn { walk, interpolation }
    }

    /// Number of steps p (0 for a single-entry walk, which is constant).
    pub fn steps(&self) -> usize {
        self.walk.len() - 1
    }

    /// Exact value at t = num/den with 0 <= num <= den.
    pub fn eval_exact(&self, num: u64, den: u64) -> Rational {
        assert!(den > 0 && num <= den);
        let p = self.steps() as u128;
        if p == 0 {
            return Rational::integer(self.walk.values[0]);
        }
        let pos = p * u128::from(num); // p * t, scaled by den
        let q = (pos / u128::from(den)) as usize;
        let r = (pos % u128::from(den)) as i128;
        if q >= self.steps() {
            return Rational::integer(self.walk.values[self.steps()]);
        }
        match self.interpolation {
            Interpolation::Constant => Rational::integer(self.walk.values[q]),
            Interpolation::Linear => {
                let a = i128::from(self.walk.values[q]);
                let b = i128::from(self.walk.values[q + 1]);
                Rational { num: a * (i128::from(den) - r) + b * r, den: i128::from(den) }
            }
        }
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let p = self.steps();
        if p == 0 {
            return self.walk.values[0] as f64;
        }
        let pos = (t.clamp(0.0, 1.0)) * p as f64;
        let q = (pos.floor() as usize).min(p);
        match self.interpolation {
            Interpolation::Constant => self.walk.values[q] as f64,
            Interpolation::Linear => {
                if q == p {
                    self.walk.values[p] as f64
                } else {
                    let frac = pos - q as f64;
                    let a = self.walk.values[q] as f64;
                    let b = self.walk.values[q + 1] as f64;
                    a + (b - a) * frac
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_plane_trees, example_tree, PlaneTree};

    #[test]
    fn height_walk_examples() {
        assert_eq!(height_walk(&example_tree()).values, vec![0, 1, 2, 2, 1, 1, 2, 0]);
        assert_eq!(height_walk(&PlaneTree::singleton()).values, vec![0, 0]);
        let path3 = PlaneTree::from_degrees(vec![1, 1, 0]).unwrap();
        assert_eq!(height_walk(&path3).values, vec![0, 1, 2, 0]);
    }

    #[test]
    fn contour_walk_examples() {
        assert_eq!(
            contour_walk(&example_tree()).values,
            vec![0, 1, 2, 1, 2, 1, 0, 1, 0, 1, 2, 1, 0]
        );
        assert_eq!(contour_walk(&PlaneTree::singleton()).values, vec![0]);
        let cherry = PlaneTree::from_degrees(vec![2, 0, 0]).unwrap();
        assert_eq!(contour_walk(&cherry).values, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn lukasiewicz_walk_examples() {
        assert_eq!(
            lukasiewicz_walk(&example_tree()).values,
            vec![0, 2, 3, 2, 1, 0, 0, -1]
        );
        assert_eq!(lukasiewicz_walk(&PlaneTree::singleton()).values, vec![0, -1]);
        let cherry = PlaneTree::from_degrees(vec![2, 0, 0]).unwrap();
        assert_eq!(lukasiewicz_walk(&cherry).values, vec![0, 1, 0, -1]);
    }

    #[test]
    fn spine_counts() {
        let t = example_tree();
        // vertex 5 carries the word "3": both elder siblings sit on its left
        assert_eq!(left_count(&t, 5), 2);
        assert_eq!(left_count(&t, 0), 0);
        assert_eq!(right_count(&t, 0), 0);
        // vertex 3 carries the word "12"
        assert_eq!(left_count(&t, 3), 1);
        assert_eq!(right_count(&t, 3), 2);
        // right counts agree with the Łukasiewicz walk at each rank
        let s = lukasiewicz_walk(&t);
        for v in 0..t.n() {
            assert_eq!(right_count(&t, v) as i64, s.values[v]);
        }
    }

    #[test]
    fn contour_time_change() {
        let t = example_tree();
        let c = contour_walk(&t);
        let h = height_walk(&t);
        for k in 0..t.n() {
            let j = height_to_contour_time(&t, k).unwrap();
            assert_eq!(c.values[j], h.values[k]);
        }
        assert_eq!(height_to_contour_time(&t, 4).unwrap(), 7);
        assert_eq!(height_to_contour_time(&t, 0).unwrap(), 0);
        assert_eq!(height_to_contour_time(&t, 7).unwrap(), 12);
        assert!(matches!(
            height_to_contour_time(&t, 8),
            Err(WalkError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn walks_reconstruct_the_tree_exhaustively() {
        for n in 1..=10 {
            for t in enumerate_plane_trees(n) {
                assert_eq!(tree_from_height(&height_walk(&t).values).unwrap(), t);
                assert_eq!(tree_from_contour(&contour_walk(&t).values).unwrap(), t);
                assert_eq!(
                    tree_from_lukasiewicz(&lukasiewicz_walk(&t).values).unwrap(),
                    t
                );
            }
        }
    }

    #[test]
    fn invalid_walks_are_rejected() {
        assert!(tree_from_height(&[0, 2, 0]).is_err());
        assert!(tree_from_contour(&[0, 1, 0, 1]).is_err());
        assert!(tree_from_contour(&[0, -1, 0]).is_err());
        assert!(tree_from_lukasiewicz(&[0, -2]).is_err());
        assert!(tree_from_lukasiewicz(&[0, 1, 0]).is_err());
    }

    #[test]
    fn time_scaled_evaluation() {
        let t = example_tree();
        let h = TimeScaledFn::new(height_walk(&t), Interpolation::Linear);
        // grid value at t = 1/7
        assert_eq!(h.eval_exact(1, 7), Rational::integer(1));
        assert_eq!(h.eval_exact(0, 1), Rational::integer(0));
        // halfway between H(1)=1 and H(2)=2
        assert_eq!(h.eval_exact(3, 14), Rational { num: 3, den: 2 });
        let c = TimeScaledFn::new(contour_walk(&t), Interpolation::Constant);
        // just below 1/12 the constant view still reads C(0) = 0
        assert_eq!(c.eval_exact(1, 13), Rational::integer(0));
        assert_eq!(c.eval_exact(1, 12), Rational::integer(1));
        assert_eq!(c.eval_exact(12, 12), Rational::integer(0));
        // f64 view agrees at representable points
        assert_eq!(h.eval_f64(0.5), h.eval_exact(1, 2).to_f64());
    }

    #[test]
    fn single_vertex_views_are_constant() {
        let f = TimeScaledFn::new(contour_walk(&PlaneTree::singleton()), Interpolation::Linear);
        assert_eq!(f.eval_exact(1, 3), Rational::integer(0));
        assert_eq!(f.eval_f64(0.7), 0.0);
    }
}
