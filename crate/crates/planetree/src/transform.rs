//! The rotation correspondence between plane trees with n vertices and full
//! binary trees with n leaves, its mirror conjugate (the co-rotation), the
//! internal subtree with its left/right edge labels, the mirrored-order
//! height process, the rightmost enumeration, and an exact verifier for the
//! combinatorial identities tying all of these together.

use crate::rmq::MinSparseTable;
use crate::tree::{Enumeration, EnumerationKind, PlaneTree};
use crate::walk::{
    contour_walk, height_walk, left_count, lukasiewicz_walk, right_count, Walk, WalkKind,
};
use thiserror::Error;

pub const NO_ORIGIN: usize = usize::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("the one-vertex tree has no {0}")]
    Degenerate(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafSide {
    Left,
    Right,
}

/// A full binary tree obtained by rotating (or co-rotating) a plane tree,
/// together with the identification of its internal vertices with the
/// non-root vertices of the source tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotatedTree {
    pub tree: PlaneTree,
    /// Per vertex: the source vertex it identifies with (`NO_ORIGIN` for leaves).
    pub origin: Vec<usize>,
    /// Per vertex: `Some(side)` for leaves other than an isolated root.
    pub leaf_side: Vec<Option<LeafSide>>,
}

impl RotatedTree {
    pub fn left_leaf_count(&self) -> usize {
        self.leaf_side.iter().filter(|s| **s == Some(LeafSide::Left)).count()
    }

    pub fn right_leaf_count(&self) -> usize {
        self.leaf_side.iter().filter(|s| **s == Some(LeafSide::Right)).count()
    }
}

/// Rotation correspondence.  The Łukasiewicz walk of the result is the
/// contour walk of the input followed by one final down-step, which makes
/// the construction a linear scan; the identification sends the k-th
/// depth-first non-root vertex of the source to the k-th internal vertex of
/// the image in depth-first order.
pub fn rotate(tree: &PlaneTree) -> RotatedTree {
    let n = tree.n();
    if n == 1 {
        return RotatedTree {
            tree: PlaneTree::singleton(),
            origin: vec![NO_ORIGIN],
            leaf_side: vec![None],
        };
    }
    let contour = contour_walk(tree);
    let mut degrees = Vec::with_capacity(2 * n - 1);
    for k in 1..contour.len() {
        degrees.push(if contour.values[k] > contour.values[k - 1] { 2 } else { 0 });
    }
    degrees.push(0); // the appended final down-step
    let rot = PlaneTree::from_degrees(degrees).expect("rotated walk is valid");
    let mut origin = vec![NO_ORIGIN; rot.n()];
    let mut leaf_side = vec![None; rot.n()];
    let mut next_internal = 0usize;
    for v in 0..rot.n() {
        if rot.degree(v) == 2 {
            next_internal += 1;
            origin[v] = next_internal;
        } else {
            leaf_side[v] = Some(if rot.birth_rank(v) == 1 { LeafSide::Left } else { LeafSide::Right });
        }
    }
    debug_assert_eq!(next_internal, n - 1);
    RotatedTree { tree: rot, origin, leaf_side }
}

/// Rotation built from its recursive definition: the subtrees of the root
/// become a spine, each rotated subtree grafted on the left of its spine
/// vertex.  Kept as an independent oracle for moderate sizes (the recursion
/// depth is the source height).
pub fn rotate_recursive(tree: &PlaneTree) -> RotatedTree {
    fn emit(
        tree: &PlaneTree,
        v: usize,
        deg: &mut Vec<u32>,
        origin: &mut Vec<usize>,
        side: &mut Vec<Option<LeafSide>>,
    ) {
        let children = tree.children(v);
        if children.is_empty() {
            deg.push(0);
            origin.push(NO_ORIGIN);
            side.push(None); // caller decides the side
            return;
        }
        for &c in children {
            deg.push(2);
            origin.push(c);
            side.push(None);
            let at = deg.len();
            emit(tree, c, deg, origin, side);
            if deg[at] == 0 {
                side[at] = Some(LeafSide::Left);
            }
        }
        deg.push(0);
        origin.push(NO_ORIGIN);
        side.push(Some(LeafSide::Right));
    }
    if tree.n() == 1 {
        return rotate(tree);
    }
    let mut deg = Vec::with_capacity(2 * tree.n() - 1);
    let mut origin = Vec::with_capacity(2 * tree.n() - 1);
    let mut side = Vec::with_capacity(2 * tree.n() - 1);
    emit(tree, tree.root(), &mut deg, &mut origin, &mut side);
    RotatedTree {
        tree: PlaneTree::from_degrees(deg).expect("recursive rotation is valid"),
        origin,
        leaf_side: side,
    }
}

/// Co-rotation: the mirror conjugate of the rotation,
/// corot(T) = mirror(rotate(mirror(T))), with the vertex identification and
/// leaf sides carried through both mirrors.
pub fn corotate(tree: &PlaneTree) -> RotatedTree {
    let n = tree.n();
    let (mirrored, perm) = tree.mirror();
    let mut perm_inv = vec![0usize; n];
    for (v, &img) in perm.iter().enumerate() {
        perm_inv[img] = v;
    }
    let rot = rotate(&mirrored);
    let (corot_tree, rot_perm) = rot.tree.mirror();
    let m = corot_tree.n();
    let mut origin = vec![NO_ORIGIN; m];
    let mut leaf_side = vec![None; m];
    for v in 0..m {
        let img = rot_perm[v];
        if rot.origin[v] != NO_ORIGIN {
            origin[img] = perm_inv[rot.origin[v]];
        }
        leaf_side[img] = rot.leaf_side[v].map(|s| match s {
            // mirroring a full binary tree swaps first and second children
            LeafSide::Left => LeafSide::Right,
            LeafSide::Right => LeafSide::Left,
        });
    }
    RotatedTree { tree: corot_tree, origin, leaf_side }
}

/// Degree sequence of the co-rotation obtained by unrolling its recursive
/// definition: each source vertex of out-degree d contributes the block
/// (2 repeated d times, then 0), blocks concatenated in depth-first order.
pub fn corotate_block_degrees(tree: &PlaneTree) -> Vec<u32> {
    let mut deg = Vec::with_capacity(2 * tree.n() - 1);
    for v in 0..tree.n() {
        for _ in 0..tree.degree(v) {
            deg.push(2);
        }
        deg.push(0);
    }
    deg
}

/// Co-rotation from its recursive definition (depth-bound recursion; used as
/// an oracle on small trees).
pub fn corotate_recursive(tree: &PlaneTree) -> PlaneTree {
    fn emit(tree: &PlaneTree, v: usize, deg: &mut Vec<u32>) {
        let children = tree.children(v);
        // spine of k+1 vertices; corot of the i-th last subtree grafted on
        // the right of the i-th spine vertex
        for _ in children {
            deg.push(2);
        }
        deg.push(0);
        for &c in children {
            emit(tree, c, deg);
        }
    }
    let mut deg = Vec::with_capacity(2 * tree.n() - 1);
    emit(tree, tree.root(), &mut deg);
    PlaneTree::from_degrees(deg).expect("recursive co-rotation is valid")
}

/// The subtree of internal vertices of a rotated tree, as a plane tree in
/// its own right, with each non-root vertex labelled by whether the edge to
/// its parent came from a first child (left) or second child (right).
#[derive(Debug, Clone)]
pub struct InternalSubtree {
    pub tree: PlaneTree,
    /// Internal-subtree vertex -> vertex id inside the rotated tree.
    pub rot_index: Vec<usize>,
    /// Internal-subtree vertex -> source-tree vertex (the identification).
    pub origin: Vec<usize>,
    /// True when the edge to the parent is a left edge; false for the root.
    pub left_edge: Vec<bool>,
}

pub fn internal_subtree(rot: &RotatedTree) -> Result<InternalSubtree, TransformError> {
    let m = rot.tree.n();
    if m == 1 {
        return Err(TransformError::Degenerate("internal subtree"));
    }
    let mut rot_index = Vec::new();
    let mut rank = vec![usize::MAX; m];
    for v in 0..m {
        if rot.tree.degree(v) == 2 {
            rank[v] = rot_index.len();
            rot_index.push(v);
        }
    }
    let mut degrees = vec![0u32; rot_index.len()];
    let mut left_edge = vec![false; rot_index.len()];
    for (i, &v) in rot_index.iter().enumerate() {
        for &c in rot.tree.children(v) {
            if rot.tree.degree(c) == 2 {
                degrees[i] += 1;
            }
        }
        if let Some(p) = rot.tree.parent(v) {
            debug_assert_eq!(rot.tree.degree(p), 2);
            left_edge[i] = rot.tree.birth_rank(v) == 1;
        }
    }
    let origin = rot_index.iter().map(|&v| rot.origin[v]).collect();
    Ok(InternalSubtree {
        tree: PlaneTree::from_degrees(degrees).expect("internal subtree is valid"),
        rot_index,
        origin,
        left_edge,
    })
}

/// Height process of the rotated internal vertices taken in the mirrored
/// order of the source tree: value at k is depth(source k-th mirrored
/// vertex) - 1 + left_count of that vertex, computed through the mirror
/// tree's height and Łukasiewicz walks.  Zero at both ends; length n+1.
pub fn h_star(tree: &PlaneTree) -> Result<Walk, TransformError> {
    let n = tree.n();
    if n == 1 {
        return Err(TransformError::Degenerate("mirrored internal height process"));
    }
    let (mirrored, _) = tree.mirror();
    let h = height_walk(&mirrored);
    let s = lukasiewicz_walk(&mirrored);
    let mut values = Vec::with_capacity(n + 1);
    values.push(0);
    for k in 1..n {
        values.push(h.values[k] + s.values[k] - 1);
    }
    values.push(0);
    Ok(Walk { values, kind: WalkKind::Custom })
}

/// Same process computed structurally: depth in the rotated tree of the
/// internal vertex identified with each mirrored-order source vertex.
pub fn h_star_from_rotation(tree: &PlaneTree) -> Result<Walk, TransformError> {
    let n = tree.n();
    if n == 1 {
        return Err(TransformError::Degenerate("mirrored internal height process"));
    }
    let rot = rotate(tree);
    let mut by_origin = vec![usize::MAX; n];
    for v in 0..rot.tree.n() {
        if rot.origin[v] != NO_ORIGIN {
            by_origin[rot.origin[v]] = v;
        }
    }
    let w = tree.mirrored_enumeration();
    let mut values = Vec::with_capacity(n + 1);
    values.push(0);
    for k in 1..n {
        values.push(i64::from(rot.tree.depth(by_origin[w.order[k]])));
    }
    values.push(0);
    Ok(Walk { values, kind: WalkKind::Custom })
}

/// Rightmost enumeration of an internal subtree: a particle starting at the
/// root first exhausts right edges; from each enumerated vertex it either
/// steps through a left edge and exhausts right edges again, or climbs the
/// ancestral line to the nearest vertex not yet enumerated.
pub fn rightmost_enumeration(sub: &InternalSubtree) -> Enumeration {
    let m = sub.tree.n();
    let mut left_child = vec![usize::MAX; m];
    let mut right_child = vec![usize::MAX; m];
    for v in 0..m {
        for &c in sub.tree.children(v) {
            if sub.left_edge[c] {
                left_child[v] = c;
            } else {
                right_child[v] = c;
            }
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut seen = vec![false; m];
    let mut cur = sub.tree.root();
    while right_child[cur] != usize::MAX {
        cur = right_child[cur];
    }
    seen[cur] = true;
    order.push(cur);
    while order.len() < m {
        if left_child[cur] != usize::MAX && !seen[left_child[cur]] {
            cur = left_child[cur];
            while right_child[cur] != usize::MAX {
                cur = right_child[cur];
            }
        } else {
            loop {
                cur = sub.tree.parent(cur).expect("enumeration climbs past the root");
                if !seen[cur] {
                    break;
                }
            }
        }
        seen[cur] = true;
        order.push(cur);
    }
    Enumeration { order, kind: EnumerationKind::Rightmost }
}

/// First index m >= k where the walk drops strictly below its value at k;
/// E(k) - k is the size of the subtree of descendants of the k-th vertex.
pub fn descendant_exit(luka: &[i64]) -> Vec<usize> {
    let n = luka.len() - 1;
    let mut exit = vec![n; n];
    let mut stack: Vec<usize> = Vec::new();
    for m in 0..=n {
        while let Some(&k) = stack.last() {
            if luka[m] < luka[k] {
                exit[k] = m;
                stack.pop();
            } else {
                break;
            }
        }
        if m < n {
            stack.push(m);
        }
    }
    exit
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub pass: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub n: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

impl std::fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "identity report for a tree with {} vertices:", self.n)?;
        for c in &self.checks {
            match (&c.pass, &c.counterexample) {
                (true, _) => writeln!(f, "  [ ok ] {}", c.name)?,
                (false, Some(ce)) => writeln!(f, "  [FAIL] {}: {}", c.name, ce)?,
                (false, None) => writeln!(f, "  [FAIL] {}", c.name)?,
            }
        }
        Ok(())
    }
}

struct Reporter {
    checks: Vec<IdentityCheck>,
}

impl Reporter {
    fn add(&mut self, name: &'static str, counterexample: Option<String>) {
        self.checks.push(IdentityCheck { name, pass: counterexample.is_none(), counterexample });
    }
}

/// Re-derives every combinatorial identity used by the rotation machinery on
/// one tree, with exact integer arithmetic.  Any failure is a bug, reported
/// with its first counterexample index.  Recursion-based cross-checks run
/// only up to `RECURSIVE_ORACLE_LIMIT` vertices to keep the call depth flat.
pub fn lemma_oracles(tree: &PlaneTree) -> IdentityReport {
    const RECURSIVE_ORACLE_LIMIT: usize = 4096;
    let n = tree.n();
    let mut r = Reporter { checks: Vec::new() };

    let h = height_walk(tree);
    let c = contour_walk(tree);
    let s = lukasiewicz_walk(tree);
    let rot = rotate(tree);
    let s_rot = lukasiewicz_walk(&rot.tree);

    // Łukasiewicz walk of the rotation = contour walk plus a final down-step.
    {
        let mut expected = c.values.clone();
        expected.push(-1);
        r.add(
            "luka_of_rotation_is_contour_plus_down_step",
            (s_rot.values != expected).then(|| {
                let k = s_rot
                    .values
                    .iter()
                    .zip(&expected)
                    .position(|(a, b)| a != b)
                    .unwrap_or(expected.len().min(s_rot.values.len()));
                format!("first mismatch at index {k}")
            }),
        );
    }

    // The rotation image is a full binary tree with n leaves.
    {
        let bad = (0..rot.tree.n()).find(|&v| rot.tree.degree(v) != 0 && rot.tree.degree(v) != 2);
        let leaves = rot.tree.leaf_count();
        r.add(
            "rotation_image_is_full_binary_with_n_leaves",
            bad.map(|v| format!("vertex {v} has degree {}", rot.tree.degree(v)))
                .or_else(|| (leaves != n).then(|| format!("{leaves} leaves for {n} vertices"))),
        );
    }

    // Mirror is an involution; double mirror re-reads the lexicographic order.
    {
        let (mirrored, perm) = tree.mirror();
        let (back, _) = mirrored.mirror();
        let mut ce = (&back != tree).then(|| "double mirror changed the tree".to_string());
        if ce.is_none() {
            let w2 = mirrored.mirrored_enumeration();
            ce = (0..n)
                .find(|&k| w2.order[k] != perm[k])
                .map(|k| format!("k={k}: mirrored order of the mirror deviates from lex order"));
        }
        r.add("mirror_is_involution", ce);
    }

    if n == 1 {
        r.add(
            "rotation_fixes_the_singleton",
            (rot.tree != PlaneTree::singleton()).then(|| "image is not the singleton".into()),
        );
        return IdentityReport { n, checks: r.checks };
    }

    let (mirrored, perm) = tree.mirror();
    let h_mir = height_walk(&mirrored);
    let s_mir = lukasiewicz_walk(&mirrored);
    let w = tree.mirrored_enumeration();
    let hs = h_star(tree).expect("n >= 2");
    let sub = internal_subtree(&rot).expect("n >= 2");
    let h_int = height_walk(&sub.tree);
    let c_int = contour_walk(&sub.tree);
    let h_rot = height_walk(&rot.tree);

    // Recursion oracles.
    if n <= RECURSIVE_ORACLE_LIMIT {
        let rec = rotate_recursive(tree);
        r.add(
            "rotation_matches_recursive_definition",
            (rec != rot).then(|| "walk-based and recursive rotations differ".into()),
        );
        let cor = corotate(tree);
        let block = corotate_block_degrees(tree);
        let rec_cor = corotate_recursive(tree);
        r.add(
            "corotation_routes_agree",
            (cor.tree.degrees() != block.as_slice() || rec_cor.degrees() != block.as_slice())
                .then(|| "mirror-conjugate, block and recursive co-rotations differ".into()),
        );
    } else {
        let cor = corotate(tree);
        let block = corotate_block_degrees(tree);
        r.add(
            "corotation_routes_agree",
            (cor.tree.degrees() != block.as_slice())
                .then(|| "mirror-conjugate and block co-rotations differ".into()),
        );
    }

    // Height of a rotated vertex = source depth - 1 + left spine count.
    {
        let ce = (0..rot.tree.n()).find_map(|v| {
            let u = rot.origin[v];
            if u == NO_ORIGIN {
                return None;
            }
            let want = i64::from(tree.depth(u)) - 1 + left_count(tree, u) as i64;
            (i64::from(rot.tree.depth(v)) != want)
                .then(|| format!("source vertex {u}: depth {} != {want}", rot.tree.depth(v)))
        });
        r.add("rotated_height_is_depth_plus_left_count", ce);
    }

    // The identification preserves depth-first order (internal subtree
    // origins are exactly 1..n-1) and the right count matches the walk.
    {
        let ce = (0..sub.tree.n())
            .find(|&i| sub.origin[i] != i + 1)
            .map(|i| format!("internal vertex {i} originates from {}", sub.origin[i]));
        r.add("identification_preserves_lex_order", ce);
        let ce = (0..n)
            .find(|&k| s.values[k] != right_count(tree, k) as i64)
            .map(|k| format!("k={k}"));
        r.add("luka_value_is_right_count", ce);
    }

    // Mirrored enumeration swaps left and right and preserves depth.
    {
        let ce = (0..n).find_map(|k| {
            let v = w.order[k];
            if s_mir.values[k] != left_count(tree, v) as i64 {
                Some(format!("k={k}: mirror walk {} != left count", s_mir.values[k]))
            } else if h_mir.values[k] != i64::from(tree.depth(v)) {
                Some(format!("k={k}: mirror height differs"))
            } else {
                None
            }
        });
        r.add("mirror_luka_counts_left_edges", ce);
    }

    // Mirrored internal height process: formula route vs structural route.
    {
        let hs2 = h_star_from_rotation(tree).expect("n >= 2");
        let ce = (hs.values != hs2.values).then(|| {
            let k = hs.values.iter().zip(&hs2.values).position(|(a, b)| a != b).unwrap();
            format!("k={k}: {} vs {}", hs.values[k], hs2.values[k])
        });
        r.add("mirrored_internal_height_two_routes", ce);
    }

    // First-visit contour times: j(k) = 2k - H(k), with the three-case
    // description of the contour in between.
    {
        let j = |k: usize| -> usize {
            if k == n {
                2 * n - 2
            } else {
                2 * k - tree.depth(k) as usize
            }
        };
        let mut ce = (0..n)
            .find(|&k| c.values[j(k)] != h.values[k])
            .map(|k| format!("contour at j({k}) misses the height"));
        if ce.is_none() {
            ce = (0..n).find(|&k| j(k) >= j(k + 1)).map(|k| format!("j not increasing at {k}"));
        }
        if ce.is_none() {
            'outer: for k in 0..n - 1 {
                if h.values[k + 1] == h.values[k] + 1 {
                    if j(k + 1) != j(k) + 1 {
                        ce = Some(format!("up-step at {k} but contour time jump"));
                        break;
                    }
                } else {
                    for m in j(k)..j(k + 1) {
                        if c.values[m] != h.values[k] - (m - j(k)) as i64 {
                            ce = Some(format!("descale between j({k}) and j({}) at {m}", k + 1));
                            break 'outer;
                        }
                    }
                    if c.values[j(k + 1)] != c.values[j(k + 1) - 1] + 1 {
                        ce = Some(format!("missing up-step before j({})", k + 1));
                        break;
                    }
                }
            }
            if ce.is_none() {
                for m in j(n - 1)..=j(n) {
                    if c.values[m] != h.values[n - 1] - (m - j(n - 1)) as i64 {
                        ce = Some("final descent is not affine".into());
                        break;
                    }
                }
            }
        }
        r.add("contour_extraction_cases", ce);
    }

    // Total-variation times of the mirrored internal height process trace the
    // reversed contour of the internal subtree.
    let jstar: Vec<usize> = {
        let mut j = vec![0usize; n + 1];
        for k in 1..=n {
            j[k] = j[k - 1] + hs.values[k].abs_diff(hs.values[k - 1]) as usize;
        }
        j
    };
    {
        let rev_c_int = |m: usize| c_int.values[c_int.len() - 1 - m];
        let mut ce = (jstar[n] != 2 * n - 4).then(|| format!("total time {} != 2n-4", jstar[n]));
        if ce.is_none() {
            'outer: for k in 0..n {
                let sign = (hs.values[k + 1] - hs.values[k]).signum();
                for m in jstar[k]..=jstar[k + 1] {
                    let want = hs.values[k] + (m - jstar[k]) as i64 * sign;
                    if rev_c_int(m) != want {
                        ce = Some(format!("window {k} deviates at contour time {m}"));
                        break 'outer;
                    }
                }
            }
        }
        r.add("reversed_internal_contour_cases", ce);
    }

    // Closed form for those times: sum of |increments| up to k equals
    // 2k - 1 + mirror-Łukasiewicz - mirror-height.
    {
        let ce = (1..n)
            .find(|&k| jstar[k] as i64 != 2 * k as i64 - 1 + s_mir.values[k] - h_mir.values[k])
            .map(|k| format!("k={k}: {} vs formula", jstar[k]));
        r.add("internal_contour_time_closed_form", ce);
    }

    // Extraction of internal vertices inside the rotated tree:
    // j(k) = 2k - H(k+1) + 1 locates the (k+1)-th internal vertex, and the
    // rotated height interpolates by the three leaf-insertion cases.
    {
        let j: Vec<usize> =
            (0..n).map(|k| 2 * k + 1 - h.values[k + 1] as usize).collect();
        let mut ce = (j[0] != 0 || j[n - 1] != 2 * n - 1)
            .then(|| format!("endpoints j(0)={} j(n-1)={}", j[0], j[n - 1]));
        if ce.is_none() {
            ce = (0..n - 1).find(|&k| j[k] >= j[k + 1]).map(|k| format!("not increasing at {k}"));
        }
        if ce.is_none() {
            ce = (0..n - 1)
                .find(|&k| sub.rot_index[k] != j[k])
                .map(|k| format!("internal vertex {k} sits at {} not j(k)={}", sub.rot_index[k], j[k]));
        }
        if ce.is_none() {
            'outer: for k in 0..n - 1 {
                let (a, b) = (j[k], j[k + 1]);
                if h_rot.values[a] != h_int.values[k] || h_rot.values[b] != h_int.values[k + 1] {
                    ce = Some(format!("window {k}: endpoint heights differ"));
                    break;
                }
                if b == a + 2 {
                    if h_rot.values[a + 1] != h_int.values[k + 1] {
                        ce = Some(format!("window {k}: lone left leaf height"));
                        break;
                    }
                } else if b > a + 2 {
                    if h_rot.values[a + 1] != h_int.values[k] + 1
                        || h_rot.values[a + 2] != h_int.values[k] + 1
                    {
                        ce = Some(format!("window {k}: twin leaves height"));
                        break;
                    }
                    for m in a + 2..b {
                        if h_rot.values[m + 1] >= h_rot.values[m] {
                            ce = Some(format!("window {k}: not strictly decreasing at {m}"));
                            break 'outer;
                        }
                    }
                }
            }
        }
        r.add("internal_vertex_extraction_cases", ce);
    }

    // Łukasiewicz walk of the co-rotation interpolates the source walk at
    // times j(k) = 2k + S(k).
    {
        let cor = corotate(tree);
        let s_cor = lukasiewicz_walk(&cor.tree);
        let j: Vec<usize> = (0..=n).map(|k| (2 * k as i64 + s.values[k]) as usize).collect();
        let mut ce = (j[n] != 2 * n - 1).then(|| format!("total time {}", j[n]));
        if ce.is_none() {
            'outer: for k in 0..n {
                let (a, b) = (j[k], j[k + 1]);
                if a >= b {
                    ce = Some(format!("not increasing at {k}"));
                    break;
                }
                if s_cor.values[a] != s.values[k] || s_cor.values[b] != s.values[k + 1] {
                    ce = Some(format!("window {k}: endpoints differ"));
                    break;
                }
                if b > a + 1 {
                    for m in a..b {
                        if s_cor.values[m] != s.values[k] + (m - a) as i64 {
                            ce = Some(format!("window {k}: climb deviates at {m}"));
                            break 'outer;
                        }
                    }
                }
            }
        }
        r.add("corotation_luka_cases", ce);
    }

    // Rightmost enumeration of the internal subtree is the mirrored order.
    {
        let rm = rightmost_enumeration(&sub);
        let ce = (1..n)
            .find(|&k| rm.order[k - 1] != w.order[k] - 1)
            .map(|k| format!("k={k}: rightmost visits {} expected {}", rm.order[k - 1], w.order[k] - 1));
        r.add("rightmost_enumeration_is_mirrored_order", ce);
    }

    // Leaf sides of the rotation classify source leaves and last children.
    {
        let mut ce = None;
        let mut lefts = 0usize;
        let mut rights = 0usize;
        for v in 0..rot.tree.n() {
            match rot.leaf_side[v] {
                None => continue,
                Some(side) => {
                    let p = rot.tree.parent(v).expect("leaf has a parent when n >= 2");
                    let u = rot.origin[p];
                    match side {
                        LeafSide::Left => {
                            lefts += 1;
                            if !tree.is_leaf(u) {
                                ce = Some(format!("left leaf {v} above non-leaf source {u}"));
                                break;
                            }
                        }
                        LeafSide::Right => {
                            rights += 1;
                            let pu = tree.parent(u).expect("origin is never the root");
                            if tree.birth_rank(u) != tree.degree(pu) {
                                ce = Some(format!("right leaf {v} above non-last child {u}"));
                                break;
                            }
                        }
                    }
                }
            }
        }
        if ce.is_none() && (lefts != tree.leaf_count() || rights != tree.internal_count()) {
            ce = Some(format!("leaf side counts {lefts}/{rights}"));
        }
        r.add("leaf_sides_classify_source_vertices", ce);
    }

    // Mirrored rank permutation k -> n - E(k) + H(k) and the jump exchange.
    let exit = descendant_exit(&s.values);
    {
        let mut ce = None;
        for k in 0..n {
            let k2 = n - exit[k] + tree.depth(k) as usize;
            if k2 >= n || w.order[k2] != k {
                ce = Some(format!("k={k}: mirrored rank {k2}"));
                break;
            }
            if s_mir.values[k2 + 1] - s_mir.values[k2] != s.values[k + 1] - s.values[k] {
                ce = Some(format!("k={k}: jump exchange fails at rank {k2}"));
                break;
            }
        }
        r.add("mirrored_rank_permutation_exchanges_jumps", ce);
    }

    // Left spine counts from either Łukasiewicz walk: ancestor sums over the
    // source walk and over the mirror walk produce the same value, which is
    // the mirror walk read at the permuted rank.
    {
        let rmq_s = MinSparseTable::new(&s.values);
        let rmq_m = MinSparseTable::new(&s_mir.values);
        let mut ce = None;
        for k in 0..n {
            let k2 = n - exit[k] + tree.depth(k) as usize;
            let direct = s_mir.values[k2];
            if direct != left_count(tree, k) as i64 {
                ce = Some(format!("k={k}: mirror walk vs left count"));
                break;
            }
            if perm[k] != k2 {
                ce = Some(format!("k={k}: mirrored rank disagrees with the permutation"));
                break;
            }
            let mut left_sum = 0i64;
            let mut a = k;
            while let Some(p) = tree.parent(a) {
                left_sum += s.values[p + 1] - rmq_s.min(p + 1, k);
                a = p;
            }
            if left_sum != direct {
                ce = Some(format!("k={k}: source-walk sum {left_sum} != {direct}"));
                break;
            }
            let mut right_sum = 0i64;
            let mut b = k2;
            while let Some(p) = mirrored.parent(b) {
                right_sum += rmq_m.min(p + 1, k2) - s_mir.values[p];
                b = p;
            }
            if right_sum != direct {
                ce = Some(format!("k={k}: mirror-walk sum {right_sum} != {direct}"));
                break;
            }
        }
        r.add("left_count_sum_identities", ce);
    }

    // Spanning-tree extraction from the looptree.
    {
        use crate::looptree::{looptree, spanning_tree_extract};
        let lt = looptree(tree).expect("n >= 2");
        let ex = spanning_tree_extract(&lt);
        let mut ce = None;
        if ex.tree != sub.tree {
            ce = Some("extracted tree differs from the internal subtree".into());
        } else if ex.labels.iter().enumerate().any(|(i, &l)| l + 1 != sub.origin[i]) {
            ce = Some("extracted labels disagree with the identification".into());
        } else if ex.self_loops.len() != rot.left_leaf_count()
            || ex.cycle_closers.len() != rot.right_leaf_count()
        {
            ce = Some(format!(
                "corner classes {}/{} vs leaf sides {}/{}",
                ex.self_loops.len(),
                ex.cycle_closers.len(),
                rot.left_leaf_count(),
                rot.right_leaf_count()
            ));
        } else if ex.tree_edges.len() + ex.self_loops.len() + ex.cycle_closers.len() != 2 * n - 2 {
            ce = Some("corner classes do not partition the corner set".into());
        }
        r.add("looptree_spanning_tree_extraction", ce);
    }

    IdentityReport { n, checks: r.checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_plane_trees, example_tree, PlaneTree};

    #[test]
    fn rotate_singleton_and_edge() {
        let single = rotate(&PlaneTree::singleton());
        assert_eq!(single.tree, PlaneTree::singleton());
        let edge = PlaneTree::from_degrees(vec![1, 0]).unwrap();
        let rot = rotate(&edge);
        assert_eq!(lukasiewicz_walk(&rot.tree).values, vec![0, 1, 0, -1]);
        assert_eq!(rot.tree.degrees(), &[2, 0, 0]);
        assert_eq!(rot.left_leaf_count(), 1);
        assert_eq!(rot.right_leaf_count(), 1);
    }

    #[test]
    fn rotate_example_walk() {
        let rot = rotate(&example_tree());
        assert_eq!(rot.tree.n(), 13);
        assert_eq!(
            lukasiewicz_walk(&rot.tree).values,
            vec![0, 1, 2, 1, 2, 1, 0, 1, 0, 1, 2, 1, 0, -1]
        );
    }

    #[test]
    fn recursive_rotation_agrees_exhaustively() {
        for n in 1..=9 {
            for t in enumerate_plane_trees(n) {
                assert_eq!(rotate(&t), rotate_recursive(&t), "tree {:?}", t.degrees());
            }
        }
    }

    #[test]
    fn corotation_of_small_trees() {
        let cherry = PlaneTree::from_degrees(vec![2, 0, 0]).unwrap();
        let cor = corotate(&cherry);
        assert_eq!(cor.tree.degrees(), &[2, 2, 0, 0, 0]);
        assert_eq!(cor.tree.degrees(), corotate_block_degrees(&cherry).as_slice());
        assert_eq!(corotate_recursive(&cherry).degrees(), cor.tree.degrees());
        assert_eq!(corotate(&PlaneTree::singleton()).tree, PlaneTree::singleton());
    }

    #[test]
    fn corotation_routes_agree_exhaustively() {
        for n in 1..=9 {
            for t in enumerate_plane_trees(n) {
                let cor = corotate(&t);
                assert_eq!(cor.tree.degrees(), corotate_block_degrees(&t).as_slice());
                assert_eq!(corotate_recursive(&t), cor.tree);
            }
        }
    }

    #[test]
    fn internal_subtree_of_example() {
        let rot = rotate(&example_tree());
        let sub = internal_subtree(&rot).unwrap();
        assert_eq!(sub.tree.n(), 6);
        assert_eq!(sub.origin, vec![1, 2, 3, 4, 5, 6]);
        // unary-binary: degrees at most 2
        assert!(sub.tree.degrees().iter().all(|&d| d <= 2));
        assert!(internal_subtree(&rotate(&PlaneTree::singleton())).is_err());
        let edge = PlaneTree::from_degrees(vec![1, 0]).unwrap();
        assert_eq!(internal_subtree(&rotate(&edge)).unwrap().tree.n(), 1);
    }

    #[test]
    fn h_star_example_values() {
        let hs = h_star(&example_tree()).unwrap();
        assert_eq!(hs.values, vec![0, 2, 3, 1, 0, 2, 1, 0]);
        let edge = PlaneTree::from_degrees(vec![1, 0]).unwrap();
        assert_eq!(h_star(&edge).unwrap().values, vec![0, 0, 0]);
        assert!(h_star(&PlaneTree::singleton()).is_err());
    }

    #[test]
    fn h_star_routes_agree_exhaustively() {
        for n in 2..=9 {
            for t in enumerate_plane_trees(n) {
                assert_eq!(h_star(&t).unwrap(), h_star_from_rotation(&t).unwrap());
            }
        }
    }

    #[test]
    fn rightmost_enumeration_examples() {
        let rot = rotate(&example_tree());
        let sub = internal_subtree(&rot).unwrap();
        let rm = rightmost_enumeration(&sub);
        let w = example_tree().mirrored_enumeration();
        for k in 1..7 {
            assert_eq!(rm.order[k - 1], w.order[k] - 1);
        }
        let edge = PlaneTree::from_degrees(vec![1, 0]).unwrap();
        let sub = internal_subtree(&rotate(&edge)).unwrap();
        assert_eq!(rightmost_enumeration(&sub).order, vec![0]);
    }

    #[test]
    fn rightmost_on_the_eleven_vertex_tree() {
        // root children (a, b); a has children (c, d, e) with c bearing two
        // leaves and e one; b has two leaves
        let t = PlaneTree::from_degrees(vec![2, 3, 2, 0, 0, 0, 1, 0, 2, 0, 0]).unwrap();
        let report = lemma_oracles(&t);
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn descendant_exit_example() {
        let s = lukasiewicz_walk(&example_tree());
        let exit = descendant_exit(&s.values);
        // subtree sizes: root 7, vertex 1 has 3 descendants (itself included)
        assert_eq!(exit[0], 7);
        assert_eq!(exit[1] - 1, 3);
        assert_eq!(exit[5] - 5, 2);
    }

    #[test]
    fn oracles_pass_exhaustively_small() {
        for n in 1..=8 {
            for t in enumerate_plane_trees(n) {
                let report = lemma_oracles(&t);
                assert!(report.all_pass(), "tree {:?}\n{report}", t.degrees());
            }
        }
    }

    #[test]
    fn oracle_report_lists_every_identity() {
        let report = lemma_oracles(&example_tree());
        assert!(report.all_pass(), "{report}");
        assert!(report.checks.len() >= 15);
        let rendered = format!("{report}");
        assert!(rendered.contains("luka_of_rotation_is_contour_plus_down_step"));
    }
}
