//! The looptree (medial graph) of a plane tree: one vertex per tree edge,
//! one edge per corner, corners listed in contour order starting from the
//! root corner.  Includes the spanning-tree extraction that recovers the
//! internal subtree of the rotation, an exact shortest-path metric based on
//! the cycle decomposition, and a breadth-first oracle.

use crate::transform::TransformError;
use crate::tree::{AncestorTable, PlaneTree};
use crate::walk::contour_vertices;

/// Loop vertices are the non-root vertices of the source tree (vertex v of
/// the source, v >= 1, is loop vertex v - 1: the far endpoint of its parent
/// edge).
#[derive(Debug, Clone)]
pub struct Looptree {
    /// Corner edges in contour order; entry k joins the edge entered at
    /// contour step k-1 to the edge left along at step k.  The root corner
    /// is entry 0, and the cyclic sequence closes back onto it.
    pub corners: Vec<(usize, usize)>,
    pub n_vertices: usize,
    pub root_edge: usize,
}

impl Looptree {
    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    pub fn is_self_loop(&self, k: usize) -> bool {
        self.corners[k].0 == self.corners[k].1
    }
}

pub fn looptree(tree: &PlaneTree) -> Result<Looptree, TransformError> {
    let n = tree.n();
    if n == 1 {
        return Err(TransformError::Degenerate("looptree"));
    }
    let xs = contour_vertices(tree);
    let steps = 2 * n - 2;
    debug_assert_eq!(xs.len(), steps + 1);
    // loop vertex crossed at each contour step: the deeper endpoint
    let f: Vec<usize> = (0..steps)
        .map(|k| {
            let (a, b) = (xs[k], xs[k + 1]);
            (if tree.depth(a) > tree.depth(b) { a } else { b }) - 1
        })
        .collect();
    let corners = (0..steps).map(|k| (f[(k + steps - 1) % steps], f[k])).collect();
    Ok(Looptree { corners, n_vertices: n - 1, root_edge: 0 })
}

#[derive(Debug, Clone)]
pub struct SpanningExtract {
    /// The spanning tree as a plane tree, rooted at the common endpoint of
    /// the root corner and its successor, children ordered by discovery.
    pub tree: PlaneTree,
    /// Loop vertex carried by each extracted-tree vertex, in depth-first order.
    pub labels: Vec<usize>,
    /// Corner indices that became tree edges.
    pub tree_edges: Vec<usize>,
    /// Corner indices discarded as self-loops.
    pub self_loops: Vec<usize>,
    /// Corner indices discarded because they closed a cycle.
    pub cycle_closers: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.parent[ra] = rb;
    }
}

/// Walks the corner sequence once (successors of the root corner first, the
/// root corner itself last).  Self-loops are discarded, corners closing a
/// cycle are discarded, everything else becomes a tree edge attached as the
/// next child of the walk's current vertex.  A final self-loop can only be
/// the root corner of a unary root, which closes its degenerate cycle.
pub fn spanning_tree_extract(lt: &Looptree) -> SpanningExtract {
    let m = lt.corner_count();
    let mut uf = UnionFind::new(lt.n_vertices);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); lt.n_vertices];
    let mut in_tree = vec![false; lt.n_vertices];
    let mut tree_edges = Vec::new();
    let mut self_loops = Vec::new();
    let mut cycle_closers = Vec::new();

    let root = lt.corners[1 % m].0;
    in_tree[root] = true;
    let mut cur = root;
    for step in 0..m {
        let k = if step + 1 < m { step + 1 } else { 0 };
        let (a, b) = lt.corners[k];
        debug_assert_eq!(a, cur);
        let last = k == 0;
        if a == b && !last {
            self_loops.push(k);
        } else if uf.find(a) == uf.find(b) {
            cycle_closers.push(k);
            cur = b;
        } else {
            debug_assert!(!in_tree[b]);
            uf.union(a, b);
            in_tree[b] = true;
            children[a].push(b);
            tree_edges.push(k);
            cur = b;
        }
    }

    // assemble as a plane tree in depth-first order
    let mut degrees = Vec::with_capacity(tree_edges.len() + 1);
    let mut labels = Vec::with_capacity(tree_edges.len() + 1);
    let mut stack = vec![root];
    let mut dfs: Vec<usize> = Vec::new();
    while let Some(v) = stack.pop() {
        dfs.push(v);
        for &c in children[v].iter().rev() {
            stack.push(c);
        }
    }
    for &v in &dfs {
        degrees.push(children[v].len() as u32);
        labels.push(v);
    }
    SpanningExtract {
        tree: PlaneTree::from_degrees(degrees).expect("spanning extraction is a tree"),
        labels,
        tree_edges,
        self_loops,
        cycle_closers,
    }
}

/// Breadth-first shortest paths over the corner adjacency (unit edge
/// lengths; parallel edges and self-loops are harmless).  Oracle-grade.
pub fn bfs_distances(lt: &Looptree, src: usize) -> Vec<u64> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); lt.n_vertices];
    for &(a, b) in &lt.corners {
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut dist = vec![u64::MAX; lt.n_vertices];
    let mut queue = std::collections::VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == u64::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Exact looptree distances in O(log n) per pair.  The looptree is a cactus
/// whose cycles sit at the source vertices (the ring at an internal vertex w
/// has length d_w + 1, or d_root at the root); a shortest path follows the
/// source tree path and takes the shorter arc around each ring.
pub struct LoopMetric<'a> {
    tree: &'a PlaneTree,
    anc: AncestorTable,
    /// climb[v]: arc cost from loop vertex v-1 up to the loop vertex of its
    /// depth-1 ancestor (v a non-root source vertex).
    climb: Vec<u64>,
}

impl<'a> LoopMetric<'a> {
    pub fn new(tree: &'a PlaneTree) -> Self {
        assert!(tree.n() >= 2);
        let n = tree.n();
        let mut climb = vec![0u64; n];
        for v in 1..n {
            let p = tree.parent(v).unwrap();
            if p != tree.root() {
                let ring = u64::from(tree.degree(p)) + 1;
                let pos = u64::from(tree.birth_rank(v));
                climb[v] = climb[p] + pos.min(ring - pos);
            }
        }
        LoopMetric { tree, anc: AncestorTable::new(tree), climb }
    }

    fn ring_arc(&self, at: usize, i: u64, j: u64) -> u64 {
        let ring = if at == self.tree.root() {
            u64::from(self.tree.degree(at))
        } else {
            u64::from(self.tree.degree(at)) + 1
        };
        let d = i.abs_diff(j);
        d.min(ring - d)
    }

    /// Distance between loop vertices (0-based; loop vertex v-1 is source
    /// vertex v).
    pub fn dist(&self, a: usize, b: usize) -> u64 {
        if a == b {
            return 0;
        }
        let (u, v) = (a + 1, b + 1);
        let m = self.anc.lca(u, v);
        if m == u {
            return self.climb[v] - self.climb[u];
        }
        if m == v {
            return self.climb[u] - self.climb[v];
        }
        let cu = self.anc.ancestor_at_depth(u, self.tree.depth(m) + 1);
        let cv = self.anc.ancestor_at_depth(v, self.tree.depth(m) + 1);
        let base = (self.climb[u] - self.climb[cu]) + (self.climb[v] - self.climb[cv]);
        base + self.ring_arc(
            m,
            u64::from(self.tree.birth_rank(cu)),
            u64::from(self.tree.birth_rank(cv)),
        )
    }
}
