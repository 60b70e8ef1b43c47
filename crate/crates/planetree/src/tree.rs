//! Rooted plane trees with integer vertex ids.
//!
//! Vertices are numbered by depth-first left-to-right rank, so vertex id and
//! lexicographic rank coincide and the root is always 0.  The canonical
//! serialized form of a tree is its out-degree sequence in that order; a
//! sequence is valid exactly when the partial sums of (degree - 1) stay
//! nonnegative until the final step brings them to -1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("empty degree sequence")]
    Empty,
    #[error("degree walk closes after {placed} of {expected} vertices")]
    EarlyStop { placed: usize, expected: usize },
    #[error("degree walk ends with {open} unfilled child slots")]
    OpenSlots { open: u64 },
    #[error("tree file declares n={declared} but carries {actual} degrees")]
    LengthMismatch { declared: usize, actual: usize },
}

#[derive(Debug, Clone)]
pub struct PlaneTree {
    degrees: Vec<u32>,
    parent: Vec<usize>,
    child_off: Vec<usize>,
    child_idx: Vec<usize>,
    depth: Vec<u32>,
    birth: Vec<u32>,
}

impl PartialEq for PlaneTree {
    fn eq(&self, other: &Self) -> bool {
        self.degrees == other.degrees
    }
}
impl Eq for PlaneTree {}

impl PlaneTree {
    /// Builds a tree from its out-degree sequence in depth-first order.
    pub fn from_degrees(degrees: Vec<u32>) -> Result<Self, TreeError> {
        let n = degrees.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut parent = vec![NO_PARENT; n];
        let mut depth = vec![0u32; n];
        let mut birth = vec![0u32; n];
        // stack of (vertex, children attached so far)
        let mut stack: Vec<(usize, u32)> = Vec::new();
        for v in 0..n {
            if v > 0 {
                match stack.last_mut() {
                    None => return Err(TreeError::EarlyStop { placed: v, expected: n }),
                    Some((p, used)) => {
                        *used += 1;
                        parent[v] = *p;
                        birth[v] = *used;
                        depth[v] = depth[*p] + 1;
                    }
                }
            }
            stack.push((v, 0));
            while let Some(&(top, used)) = stack.last() {
                if used == degrees[top] {
                    stack.pop();
                } else {
                    break;
                }
            }
        }
        if !stack.is_empty() {
            let open: u64 = stack
                .iter()
                .map(|&(v, used)| u64::from(degrees[v] - used))
                .sum();
            return Err(TreeError::OpenSlots { open });
        }

        let mut child_off = vec![0usize; n + 1];
        for v in 0..n {
            child_off[v + 1] = child_off[v] + degrees[v] as usize;
        }
        let mut child_idx = vec![0usize; n.saturating_sub(1)];
        for v in 1..n {
            child_idx[child_off[parent[v]] + (birth[v] - 1) as usize] = v;
        }
        Ok(PlaneTree { degrees, parent, child_off, child_idx, depth, birth })
    }

    pub fn singleton() -> Self {
        PlaneTree::from_degrees(vec![0]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    /// Canonical serialization: out-degrees in depth-first order.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        if v == 0 {
            None
        } else {
            Some(self.parent[v])
        }
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.child_idx[self.child_off[v]..self.child_off[v + 1]]
    }

    /// 1-based rank of `v` among its siblings (0 for the root).
    pub fn birth_rank(&self, v: usize) -> u32 {
        self.birth[v]
    }

    pub fn depth(&self, v: usize) -> u32 {
        self.depth[v]
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.degrees[v] == 0
    }

    pub fn leaf_count(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 0).count()
    }

    pub fn internal_count(&self) -> usize {
        self.n() - self.leaf_count()
    }

    /// Word of 1-based child ranks along the root path; empty for the root.
    pub fn ulam_word(&self, v: usize) -> Vec<u32> {
        let mut word = Vec::with_capacity(self.depth[v] as usize);
        let mut u = v;
        while u != 0 {
            word.push(self.birth[u]);
            u = self.parent[u];
        }
        word.reverse();
        word
    }

    /// Mirror tree (every sibling order reversed) together with the vertex
    /// identification: `perm[v]` is the id in the mirror of the image of `v`.
    pub fn mirror(&self) -> (PlaneTree, Vec<usize>) {
        let n = self.n();
        let mut perm = vec![0usize; n];
        let mut degrees = Vec::with_capacity(n);
        let mut stack = vec![0usize];
        let mut rank = 0usize;
        while let Some(v) = stack.pop() {
            perm[v] = rank;
            degrees.push(self.degrees[v]);
            rank += 1;
            // pushed in birth order, so popped (visited) in reversed order
            stack.extend_from_slice(self.children(v));
        }
        let mirrored = PlaneTree::from_degrees(degrees).expect("mirror of a valid tree is valid");
        (mirrored, perm)
    }

    pub fn lex_enumeration(&self) -> Enumeration {
        Enumeration { order: (0..self.n()).collect(), kind: EnumerationKind::Lexicographic }
    }

    /// Vertex order induced by the lexicographic enumeration of the mirror
    /// tree, pulled back through the vertex identification.
    pub fn mirrored_enumeration(&self) -> Enumeration {
        let (_, perm) = self.mirror();
        let mut order = vec![0usize; self.n()];
        for (v, &r) in perm.iter().enumerate() {
            order[r] = v;
        }
        Enumeration { order, kind: EnumerationKind::Mirrored }
    }

    /// Graph-distance eccentricity sweep from `src`: (distances, farthest vertex).
    fn bfs(&self, src: usize) -> (Vec<u32>, usize) {
        let n = self.n();
        let mut dist = vec![u32::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        let mut far = src;
        while let Some(v) = queue.pop_front() {
            if dist[v] > dist[far] {
                far = v;
            }
            let push = |w: usize, dist: &mut Vec<u32>, queue: &mut std::collections::VecDeque<usize>| {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            };
            if v != 0 {
                push(self.parent[v], &mut dist, &mut queue);
            }
            for &c in self.children(v) {
                push(c, &mut dist, &mut queue);
            }
        }
        (dist, far)
    }

    /// Exact graph diameter via a double breadth-first sweep.
    pub fn diameter(&self) -> u64 {
        if self.n() == 1 {
            return 0;
        }
        let (_, far) = self.bfs(0);
        let (dist, far2) = self.bfs(far);
        u64::from(dist[far2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationKind {
    Lexicographic,
    Mirrored,
    Rightmost,
}

/// A vertex ordering of a tree; `order[k]` is the vertex visited k-th.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub order: Vec<usize>,
    pub kind: EnumerationKind,
}

impl Enumeration {
    pub fn is_bijection(&self, n: usize) -> bool {
        if self.order.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in &self.order {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }
}

/// JSON tree file; the degree sequence is the source of truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeFile {
    pub n: usize,
    pub degrees: Vec<u32>,
    #[serde(default)]
    pub meta: serde_json::Value,
}

impl TreeFile {
    pub fn new(tree: &PlaneTree, meta: serde_json::Value) -> Self {
        TreeFile { n: tree.n(), degrees: tree.degrees().to_vec(), meta }
    }

    pub fn into_tree(self) -> Result<PlaneTree, TreeError> {
        if self.n != self.degrees.len() {
            return Err(TreeError::LengthMismatch { declared: self.n, actual: self.degrees.len() });
        }
        PlaneTree::from_degrees(self.degrees)
    }
}

/// All plane trees with exactly `n` vertices, as degree sequences in
/// lexicographic order of generation (Catalan(n-1) of them).
pub fn enumerate_plane_trees(n: usize) -> Vec<PlaneTree> {
    fn forests(m: usize, memo_trees: &mut Vec<Option<Vec<Vec<u32>>>>) -> Vec<(u32, Vec<u32>)> {
        if m == 0 {
            return vec![(0, Vec::new())];
        }
        let mut out = Vec::new();
        for first in 1..=m {
            let first_trees = trees(first, memo_trees);
            let rest = forests(m - first, memo_trees);
            for t in &first_trees {
                for (count, seq) in &rest {
                    let mut s = t.clone();
                    s.extend_from_slice(seq);
                    out.push((count + 1, s));
                }
            }
        }
        out
    }
    fn trees(m: usize, memo: &mut Vec<Option<Vec<Vec<u32>>>>) -> Vec<Vec<u32>> {
        if let Some(cached) = &memo[m] {
            return cached.clone();
        }
        let result: Vec<Vec<u32>> = forests(m - 1, memo)
            .into_iter()
            .map(|(count, seq)| {
                let mut s = Vec::with_capacity(m);
                s.push(count);
                s.extend_from_slice(&seq);
                s
            })
            .collect();
        memo[m] = Some(result.clone());
        result
    }
    let mut memo = vec![None; n + 1];
    trees(n, &mut memo)
        .into_iter()
        .map(|d| PlaneTree::from_degrees(d).expect("generated sequence is valid"))
        .collect()
}

/// All full binary plane trees with exactly `leaves` leaves
/// (every vertex has out-degree 0 or 2).
pub fn enumerate_full_binary(leaves: usize) -> Vec<PlaneTree> {
    fn gen(leaves: usize, memo: &mut Vec<Option<Vec<Vec<u32>>>>) -> Vec<Vec<u32>> {
        if let Some(cached) = &memo[leaves] {
            return cached.clone();
        }
        let result: Vec<Vec<u32>> = if leaves == 1 {
            vec![vec![0]]
        } else {
            let mut out = Vec::new();
            for left in 1..leaves {
                let ls = gen(left, memo);
                let rs = gen(leaves - left, memo);
                for l in &ls {
                    for r in &rs {
                        let mut s = Vec::with_capacity(2 * leaves - 1);
                        s.push(2);
                        s.extend_from_slice(l);
                        s.extend_from_slice(r);
                        out.push(s);
                    }
                }
            }
            out
        };
        memo[leaves] = Some(result.clone());
        result
    }
    let mut memo = vec![None; leaves + 1];
    gen(leaves, &mut memo)
        .into_iter()
        .map(|d| PlaneTree::from_degrees(d).expect("generated sequence is valid"))
        .collect()
}

/// Catalan numbers C_0.. (C_k counts plane trees with k+1 vertices).
pub fn catalan(k: usize) -> u64 {
    let mut c = 1u64;
    for i in 0..k {
        c = c * 2 * (2 * i as u64 + 1) / (i as u64 + 2);
    }
    c
}

/// Binary-lifting ancestor structure: lowest common ancestors, level
/// ancestors, and path distances in O(log n) per query.
pub struct AncestorTable {
    up: Vec<Vec<u32>>,
    depth: Vec<u32>,
}

impl AncestorTable {
    pub fn new(tree: &PlaneTree) -> Self {
        let n = tree.n();
        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut up = Vec::with_capacity(levels);
        let mut base = vec![0u32; n];
        for v in 1..n {
            base[v] = tree.parent(v).unwrap() as u32;
        }
        up.push(base);
        for level in 1..levels {
            let prev = &up[level - 1];
            let next: Vec<u32> = (0..n).map(|v| prev[prev[v] as usize]).collect();
            up.push(next);
        }
        AncestorTable { up, depth: tree.depths().to_vec() }
    }

    pub fn ancestor_at_depth(&self, v: usize, d: u32) -> usize {
        debug_assert!(d <= self.depth[v]);
        let mut v = v;
        let mut delta = self.depth[v] - d;
        let mut level = 0;
        while delta > 0 {
            if delta & 1 == 1 {
                v = self.up[level][v] as usize;
            }
            delta >>= 1;
            level += 1;
        }
        v
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let d = self.depth[a].min(self.depth[b]);
        let mut a = self.ancestor_at_depth(a, d);
        let mut b = self.ancestor_at_depth(b, d);
        if a == b {
            return a;
        }
        for level in (0..self.up.len()).rev() {
            if self.up[level][a] != self.up[level][b] {
                a = self.up[level][a] as usize;
                b = self.up[level][b] as usize;
            }
        }
        self.up[0][a] as usize
    }

    pub fn distance(&self, a: usize, b: usize) -> u64 {
        let m = self.lca(a, b);
        u64::from(self.depth[a]) + u64::from(self.depth[b]) - 2 * u64::from(self.depth[m])
    }
}

/// The seven-vertex tree used as a worked example throughout the test
/// suites: root with children (a, b, c) where a has two leaf children and c
/// has one.
pub fn example_tree() -> PlaneTree {
    PlaneTree::from_degrees(vec![3, 2, 0, 0, 0, 1, 0]).unwrap()
}
