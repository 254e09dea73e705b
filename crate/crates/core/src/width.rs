//! Exact rank-width and treewidth of small graphs.
//!
//! Rank-width is computed by dynamic programming over vertex subsets of each
//! connected component. With `cut(S) = rho(S, V \ S)`,
//!
//! ```text
//! w({v}) = cut({v})
//! w(S)   = max(cut(S), min over splits S = T + (S \ T) of max(w(T), w(S \ T)))
//! ```
//!
//! and the rank-width is `w(V)` (`cut(V) = 0`). Every rooted binary tree over
//! `S` is one choice of splits, and un-rooting the tree at `V` merges the two
//! root edges into one, whose cut is already counted in `w(T)`.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{components, mask_of, vertices_of, Graph, MaskIter};

/// Default vertex cap for the exponential routines.
pub const DEFAULT_CAP: usize = 20;

/// Hard limit: subsets are `u64` masks.
pub const HARD_LIMIT: usize = 64;

const PARALLEL_TABLE_FROM: usize = 14;

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(HARD_LIMIT);
    if n > cap {
        return Err(Error::Capacity { what, n, cap });
    }
    Ok(())
}

/// A subcubic tree with a bijection from graph vertices to its leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDecomposition {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    /// `leaf_of[v]` is the tree node holding vertex `v`.
    leaf_of: Vec<usize>,
}

impl RankDecomposition {
    /// Checks the tree shape (connected, acyclic, degrees 1 or 3) and that
    /// `leaf_of` is a bijection onto the leaves.
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>, leaf_of: Vec<usize>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDecomposition(m));
        if leaf_of.len() < 2 {
            return bad("a decomposition needs at least two vertices".into());
        }
        if edges.len() + 1 != node_count {
            return bad(format!("{} edges cannot form a tree on {node_count} nodes", edges.len()));
        }
        let mut adj = vec![Vec::new(); node_count];
        for &(a, b) in &edges {
            if a >= node_count || b >= node_count || a == b {
                return bad(format!("bad tree edge ({a},{b})"));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; node_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != node_count {
            return bad("tree is not connected".into());
        }
        if let Some(u) = (0..node_count).find(|&u| adj[u].len() != 1 && adj[u].len() != 3) {
            return bad(format!("node {u} has degree {}", adj[u].len()));
        }
        let leaves = (0..node_count).filter(|&u| adj[u].len() == 1).count();
        let mut used = vec![false; node_count];
        for (v, &node) in leaf_of.iter().enumerate() {
            if node >= node_count || adj[node].len() != 1 {
                return bad(format!("vertex {v} is mapped to non-leaf node {node}"));
            }
            if std::mem::replace(&mut used[node], true) {
                return bad(format!("leaf {node} holds more than one vertex"));
            }
        }
        if leaves != leaf_of.len() {
            return bad(format!("{leaves} leaves but {} vertices", leaf_of.len()));
        }
        Ok(RankDecomposition {
            node_count,
            edges,
            leaf_of,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn leaf_of(&self) -> &[usize] {
        &self.leaf_of
    }

    pub fn vertex_count(&self) -> usize {
        self.leaf_of.len()
    }

    /// For each tree edge `(a, b)`, the sorted vertices whose leaves lie on
    /// the `a` side once the edge is removed.
    pub fn edge_sides(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut vertex_at = vec![usize::MAX; self.node_count];
        for (v, &node) in self.leaf_of.iter().enumerate() {
            vertex_at[node] = v;
        }
        self.edges
            .iter()
            .map(|&(a, b)| {
                let mut side = Vec::new();
                let mut stack = vec![(a, b)];
                while let Some((u, from)) = stack.pop() {
                    if vertex_at[u] != usize::MAX {
                        side.push(vertex_at[u]);
                    }
                    stack.extend(adj[u].iter().filter(|&&w| w != from).map(|&w| (w, u)));
                }
                side.sort_unstable();
                side
            })
            .collect()
    }

    /// Text form: `a b` per tree edge, then `leaf node vertex` per vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# rank-decomposition: {} nodes, {} vertices", self.node_count, self.leaf_of.len());
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        for (v, node) in self.leaf_of.iter().enumerate() {
            let _ = writeln!(out, "leaf {node} {v}");
        }
        out
    }
}

impl FromStr for RankDecomposition {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut leaves: Vec<(usize, usize)> = Vec::new();
        let mut max_node = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| Error::Parse {
                line: idx + 1,
                message: m.to_string(),
            };
            let nums = |fields: &[&str]| -> Result<Vec<usize>> {
                fields
                    .iter()
                    .map(|f| f.parse::<usize>().map_err(|_| err(&format!("not a nonnegative integer: {f:?}"))))
                    .collect()
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[..] {
                ["leaf", ..] if fields.len() == 3 => {
                    let v = nums(&fields[1..])?;
                    max_node = max_node.max(v[0]);
                    leaves.push((v[1], v[0]));
                }
                [_, _] => {
                    let v = nums(&fields)?;
                    max_node = max_node.max(v[0]).max(v[1]);
                    edges.push((v[0], v[1]));
                }
                _ => return Err(err("expected \"a b\" or \"leaf node vertex\"")),
            }
        }
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(i, &(v, _))| i != v) {
            return Err(Error::InvalidDecomposition(
                "leaf lines must cover vertices 0..n exactly once".into(),
            ));
        }
        let node_count = if edges.is_empty() && leaves.is_empty() { 0 } else { max_node + 1 };
        RankDecomposition::new(node_count, edges, leaves.into_iter().map(|(_, node)| node).collect())
    }
}

/// Result of [`rank_width`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWidth {
    pub width: usize,
    /// Present when requested and the graph has at least two vertices.
    pub decomposition: Option<RankDecomposition>,
}

/// Rooted binary tree used while assembling a decomposition.
struct RootedForest {
    /// `Err(vertex)` for leaves, `Ok((left, right))` for internal nodes.
    nodes: Vec<std::result::Result<(usize, usize), usize>>,
}

impl RootedForest {
    fn leaf(&mut self, v: usize) -> usize {
        self.nodes.push(Err(v));
        self.nodes.len() - 1
    }

    fn join(&mut self, a: usize, b: usize) -> usize {
        self.nodes.push(Ok((a, b)));
        self.nodes.len() - 1
    }

    /// Drops the root and links its two children directly.
    fn unroot(self, root: usize, n: usize) -> RankDecomposition {
        let mut id = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for (i, slot) in id.iter_mut().enumerate() {
            if i != root {
                *slot = next;
                next += 1;
            }
        }
        let mut edges = Vec::with_capacity(next.saturating_sub(1));
        let mut leaf_of = vec![0; n];
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                Err(v) => leaf_of[v] = id[i],
                Ok((a, b)) if i == root => edges.push((id[a], id[b])),
                Ok((a, b)) => {
                    edges.push((id[i], id[a]));
                    edges.push((id[i], id[b]));
                }
            }
        }
        RankDecomposition::new(next, edges, leaf_of).expect("assembled tree is a valid decomposition")
    }
}

/// Subset DP for one connected graph on at most 64 vertices.
struct ComponentDp {
    width: Vec<u8>,
    split: Vec<u32>,
}

fn cut_table(g: &Graph) -> Vec<u8> {
    let n = g.n();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let size = 1usize << n;
    let f = |s: usize| g.cutrank_mask(s as u64, full ^ s as u64) as u8;
    if n >= PARALLEL_TABLE_FROM {
        (0..size).into_par_iter().map(f).collect()
    } else {
        (0..size).map(f).collect()
    }
}

impl ComponentDp {
    fn run(g: &Graph) -> ComponentDp {
        let n = g.n();
        let cut = cut_table(g);
        let size = 1usize << n;
        let mut width = vec![0u8; size];
        let mut split = vec![0u32; size];
        for s in 1..size {
            if s & (s - 1) == 0 {
                width[s] = cut[s];
                continue;
            }
            let top = 1usize << (usize::BITS - 1 - s.leading_zeros());
            let rest = s ^ top;
            let floor = cut[s];
            let mut best = u8::MAX;
            let mut best_t = 0;
            // Ascending submasks of `rest`: T never holds the top bit, so T
            // is the numerically smaller side of each unordered split.
            let mut t = 0usize;
            loop {
                t = t.wrapping_sub(rest) & rest;
                if t == 0 {
                    break;
                }
                let v = width[t].max(width[s ^ t]);
                if v < best {
                    best = v;
                    best_t = t;
                    if best <= floor {
                        break;
                    }
                }
            }
            width[s] = best.max(floor);
            split[s] = best_t as u32;
        }
        ComponentDp { width, split }
    }

    /// Appends the rooted tree for subset `s` (local indices mapped through
    /// `global`) and returns its root.
    fn build(&self, s: usize, global: &[usize], forest: &mut RootedForest) -> usize {
        if s & (s - 1) == 0 {
            return forest.leaf(global[s.trailing_zeros() as usize]);
        }
        let t = self.split[s] as usize;
        let a = self.build(t, global, forest);
        let b = self.build(s ^ t, global, forest);
        forest.join(a, b)
    }
}

/// Exact rank-width with the default cap.
pub fn rank_width(g: &Graph, want_tree: bool) -> Result<RankWidth> {
    rank_width_capped(g, want_tree, DEFAULT_CAP)
}

/// Exact rank-width. The cap bounds the largest connected component; each
/// component is solved separately and the decompositions are joined by
/// edges whose cuts are empty.
pub fn rank_width_capped(g: &Graph, want_tree: bool, cap: usize) -> Result<RankWidth> {
    let comps = components(g);
    if let Some(big) = comps.iter().map(Vec::len).max() {
        check_cap("rank-width", big, cap)?;
    }
    let mut width = 0;
    let mut forest = RootedForest { nodes: Vec::new() };
    let mut root: Option<usize> = None;
    for comp in &comps {
        let sub = g.induced_subgraph(comp);
        let dp = ComponentDp::run(&sub);
        let full = (1usize << comp.len()) - 1;
        width = width.max(dp.width[full] as usize);
        if want_tree {
            let r = dp.build(full, comp, &mut forest);
            root = Some(match root {
                None => r,
                Some(prev) => forest.join(prev, r),
            });
        }
    }
    let decomposition = match root {
        Some(r) if g.n() >= 2 => Some(forest.unroot(r, g.n())),
        _ => None,
    };
    Ok(RankWidth { width, decomposition })
}

fn check_decomposition(g: &Graph, d: &RankDecomposition) -> Result<()> {
    if d.vertex_count() != g.n() {
        return Err(Error::InvalidDecomposition(format!(
            "decomposition has {} leaves but the graph has {} vertices",
            d.vertex_count(),
            g.n()
        )));
    }
    Ok(())
}

fn side_cutrank(g: &Graph, side: &[usize]) -> Result<usize> {
    if g.n() <= 64 {
        let full = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
        let a = mask_of(side);
        return Ok(g.cutrank_mask(a, full ^ a));
    }
    let mut inside = vec![false; g.n()];
    side.iter().for_each(|&v| inside[v] = true);
    let other: Vec<usize> = (0..g.n()).filter(|&v| !inside[v]).collect();
    g.cutrank(side, &other)
}

/// Largest cutrank over the tree edges of `d`.
pub fn width_of_decomposition(g: &Graph, d: &RankDecomposition) -> Result<usize> {
    check_decomposition(g, d)?;
    d.edge_sides()
        .iter()
        .map(|side| side_cutrank(g, side))
        .try_fold(0, |acc, r| r.map(|r| acc.max(r)))
}

/// Output of [`balanced_separation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    /// Tree edge whose removal gave the balanced bipartition.
    pub edge: (usize, usize),
    /// Side of the bipartition with at least half of the vertices.
    pub large_side: Vec<usize>,
    pub small_side: Vec<usize>,
    /// Lowest `ceil(n/2)` vertices of the large side.
    pub v1: Vec<usize>,
    /// Lowest `ceil(n/3)` vertices of the small side.
    pub v2: Vec<usize>,
    pub rho: usize,
}

/// Extracts disjoint `V1`, `V2` of sizes `ceil(n/2)` and `ceil(n/3)` whose
/// cutrank is at most the width of `d`.
///
/// Some tree edge splits the leaves into two parts of at least `n/3` each:
/// otherwise orient every edge toward its side with fewer than `n/3` leaves
/// and a sink node would see at most three parts, each below `n/3`. The
/// walk below follows that orientation from an arbitrary node and stops at
/// the first balanced edge it meets.
pub fn balanced_separation(g: &Graph, d: &RankDecomposition) -> Result<Separation> {
    let n = g.n();
    if n < 2 {
        return Err(Error::invalid("balanced separation needs at least two vertices"));
    }
    check_decomposition(g, d)?;
    let sides = d.edge_sides();
    let mut incident = vec![Vec::new(); d.node_count()];
    for (i, &(a, b)) in d.edges().iter().enumerate() {
        incident[a].push(i);
        incident[b].push(i);
    }
    // Leaves on the far side when leaving `node` through edge `i`.
    let far_side = |node: usize, i: usize| -> usize {
        let (a, _) = d.edges()[i];
        if node == a {
            n - sides[i].len()
        } else {
            sides[i].len()
        }
    };
    let balanced = |count: usize| 3 * count >= n && 3 * (n - count) >= n;
    let mut node = 0;
    let mut came_from = usize::MAX;
    let chosen = loop {
        if let Some(&i) = incident[node].iter().find(|&&i| balanced(sides[i].len())) {
            break i;
        }
        // No balanced edge here: step through the edge whose far side holds
        // more than 2n/3 leaves. It exists unless this node is a sink.
        let next = incident[node]
            .iter()
            .copied()
            .find(|&i| i != came_from && 3 * far_side(node, i) > 2 * n)
            .ok_or_else(|| Error::InvariantViolation("sink without a balanced edge".into()))?;
        let (a, b) = d.edges()[next];
        node = if a == node { b } else { a };
        came_from = next;
    };
    let edge = d.edges()[chosen];
    let a_side = sides[chosen].clone();
    let in_a = {
        let mut m = vec![false; n];
        a_side.iter().for_each(|&v| m[v] = true);
        m
    };
    let b_side: Vec<usize> = (0..n).filter(|&v| !in_a[v]).collect();
    let (large_side, small_side) = if 2 * a_side.len() >= n { (a_side, b_side) } else { (b_side, a_side) };
    let v1 = large_side[..n.div_ceil(2)].to_vec();
    let v2 = small_side[..n.div_ceil(3)].to_vec();
    let rho = g.cutrank(&v1, &v2)?;
    Ok(Separation {
        edge,
        large_side,
        small_side,
        v1,
        v2,
        rho,
    })
}

/// Exact treewidth with the default cap.
pub fn tree_width(g: &Graph) -> Result<usize> {
    tree_width_capped(g, DEFAULT_CAP)
}

/// Exact treewidth by DP over elimination prefixes, per component:
/// `f(S) = min over v in S of max(f(S - v), |Q(S - v, v)|)`, where
/// `Q(S, v)` is the set of vertices outside `S + v` reachable from `v`
/// through `S`.
pub fn tree_width_capped(g: &Graph, cap: usize) -> Result<usize> {
    let comps = components(g);
    if let Some(big) = comps.iter().map(Vec::len).max() {
        check_cap("tree-width", big, cap)?;
    }
    Ok(comps
        .iter()
        .map(|comp| component_tree_width(&g.induced_subgraph(comp)))
        .max()
        .unwrap_or(0))
}

fn component_tree_width(g: &Graph) -> usize {
    let n = g.n();
    let adj: Vec<u64> = (0..n).map(|v| g.adj_mask(v)).collect();
    let q_size = |s: u64, v: usize| -> u32 {
        let mut reach = 1u64 << v;
        let mut frontier = reach;
        let mut seen_nb = 0u64;
        while frontier != 0 {
            let nb = MaskIter(frontier).fold(0, |m, u| m | adj[u]);
            seen_nb |= nb;
            frontier = nb & s & !reach;
            reach |= frontier;
        }
        (seen_nb & !s & !(1u64 << v)).count_ones()
    };
    let size = 1usize << n;
    let mut f = vec![0i16; size];
    f[0] = -1;
    for s in 1..size {
        let mut best = i16::MAX;
        for v in MaskIter(s as u64) {
            let prev = s & !(1 << v);
            let val = f[prev].max(q_size(prev as u64, v) as i16);
            best = best.min(val);
        }
        f[s] = best;
    }
    f[size - 1].max(0) as usize
}

/// All widths the crate computes exactly, with the clique-width bounds
/// `rw <= cw <= 2^(rw+1) - 1` propagated from the rank-width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    pub n: usize,
    pub rank_width: usize,
    pub tree_width: usize,
    pub cw_lower: usize,
    pub cw_upper: u64,
    pub decomposition: Option<RankDecomposition>,
}

pub fn width_report(g: &Graph) -> Result<WidthReport> {
    width_report_capped(g, DEFAULT_CAP)
}

pub fn width_report_capped(g: &Graph, cap: usize) -> Result<WidthReport> {
    let rw = rank_width_capped(g, true, cap)?;
    let tw = tree_width_capped(g, cap)?;
    let n = g.n();
    let r = rw.width;
    if r > n.div_ceil(3) {
        return Err(Error::InvariantViolation(format!("rank-width {r} exceeds ceil(n/3) for n = {n}")));
    }
    if r > tw + 1 {
        return Err(Error::InvariantViolation(format!("rank-width {r} exceeds tree-width {tw} + 1")));
    }
    if let Some(d) = &rw.decomposition {
        let w = width_of_decomposition(g, d)?;
        if w != r {
            return Err(Error::InvariantViolation(format!("decomposition has width {w}, expected {r}")));
        }
    }
    Ok(WidthReport {
        n,
        rank_width: r,
        tree_width: tw,
        cw_lower: r,
        cw_upper: (1u64 << (r + 1)) - 1,
        decomposition: rw.decomposition,
    })
}

/// Exhaustive rank-width over every subcubic tree with `n` labeled leaves.
///
/// Trees are generated by inserting leaf `k` into every edge of each tree on
/// leaves `0..k`, which produces each labeled tree exactly once
/// (`(2n-5)!!` of them). Cutranks go through [`Graph::cutrank`], the
/// general matrix route, not the word-packed one the DP uses.
pub struct BruteForceRankWidth {
    n: usize,
    /// Per tree, the leaf mask on one side of each edge.
    tree_cuts: Vec<Vec<u64>>,
}

impl BruteForceRankWidth {
    pub const MAX_N: usize = 7;

    pub fn new(n: usize) -> Result<Self> {
        if !(2..=Self::MAX_N).contains(&n) {
            return Err(Error::invalid(format!(
                "brute-force rank-width needs 2 <= n <= {}, got {n}",
                Self::MAX_N
            )));
        }
        // Leaves are nodes 0..n; internal nodes are numbered from n.
        let mut trees: Vec<(Vec<(usize, usize)>, usize)> = vec![(vec![(0, 1)], n)];
        for k in 2..n {
            trees = trees
                .into_iter()
                .flat_map(|(edges, next)| {
                    (0..edges.len()).map(move |i| {
                        let mut e = edges.clone();
                        let (a, b) = e[i];
                        e[i] = (a, next);
                        e.push((next, b));
                        e.push((next, k));
                        (e, next + 1)
                    }).collect::<Vec<_>>()
                })
                .collect();
        }
        let tree_cuts = trees
            .iter()
            .map(|(edges, nodes)| {
                let mut adj = vec![Vec::new(); *nodes];
                for &(a, b) in edges {
                    adj[a].push(b);
                    adj[b].push(a);
                }
                edges
                    .iter()
                    .map(|&(a, b)| {
                        let mut mask = 0u64;
                        let mut stack = vec![(a, b)];
                        while let Some((u, from)) = stack.pop() {
                            if u < n {
                                mask |= 1 << u;
                            }
                            stack.extend(adj[u].iter().filter(|&&w| w != from).map(|&w| (w, u)));
                        }
                        mask
                    })
                    .collect()
            })
            .collect();
        Ok(BruteForceRankWidth { n, tree_cuts })
    }

    pub fn tree_count(&self) -> usize {
        self.tree_cuts.len()
    }

    pub fn rank_width(&self, g: &Graph) -> Result<usize> {
        if g.n() != self.n {
            return Err(Error::invalid(format!("oracle built for n = {}, graph has {}", self.n, g.n())));
        }
        let full = (1u64 << self.n) - 1;
        let cut = (0..=full)
            .map(|s| g.cutrank(&vertices_of(s), &vertices_of(full ^ s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .tree_cuts
            .iter()
            .map(|masks| masks.iter().map(|&m| cut[m as usize]).max().unwrap_or(0))
            .min()
            .unwrap_or(0))
    }
}

/// One-shot brute-force rank-width for `2 <= n <= 7`.
pub fn brute_force_rank_width(g: &Graph) -> Result<usize> {
    BruteForceRankWidth::new(g.n())?.rank_width(g)
}

/// Permutation oracle for treewidth: minimum over elimination orders of the
/// largest back-degree in the fill-in graph. Test-sized inputs only.
#[cfg(test)]
pub(crate) fn brute_force_tree_width(g: &Graph) -> usize {
    fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permutations(items, k + 1, out);
            items.swap(k, i);
        }
    }
    use crate::graph::Adjacency;
    let n = g.n();
    let mut orders = Vec::new();
    permutations(&mut (0..n).collect(), 0, &mut orders);
    orders
        .into_iter()
        .map(|order| {
            let mut h = g.clone();
            let mut alive = vec![true; n];
            let mut worst = 0;
            for &v in &order {
                let nb: Vec<usize> = h.neighbors(v).filter(|&w| alive[w]).collect();
                worst = worst.max(nb.len());
                for (i, &a) in nb.iter().enumerate() {
                    for &b in &nb[i + 1..] {
                        if !h.has_edge(a, b) {
                            h.add_edge(a, b);
                        }
                    }
                }
                alive[v] = false;
            }
            worst
        })
        .min()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_gnp, GnpConfig};

    fn c5() -> Graph {
        Graph::cycle(5)
    }

    #[test]
    fn oracle_tree_counts() {
        let counts: Vec<usize> = (2..=7).map(|n| BruteForceRankWidth::new(n).unwrap().tree_count()).collect();
        assert_eq!(counts, vec![1, 1, 3, 15, 105, 945]);
        assert!(BruteForceRankWidth::new(1).is_err());
        assert!(BruteForceRankWidth::new(8).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(brute_force_rank_width(&Graph::complete(3)).unwrap(), 1);
        assert_eq!(brute_force_rank_width(&Graph::new(4)).unwrap(), 0);
        assert_eq!(brute_force_rank_width(&c5()).unwrap(), 2);
        assert_eq!(brute_force_rank_width(&Graph::complete(5)).unwrap(), 1);
        assert_eq!(brute_force_rank_width(&Graph::path(4)).unwrap(), 1);
    }

    #[test]
    fn rank_width_examples() {
        assert_eq!(rank_width(&Graph::new(1), true).unwrap(), RankWidth { width: 0, decomposition: None });
        assert_eq!(rank_width(&Graph::new(0), true).unwrap().width, 0);
        assert_eq!(rank_width(&Graph::complete(5), false).unwrap().width, 1);
        assert_eq!(rank_width(&Graph::path(4), false).unwrap().width, 1);
        assert_eq!(rank_width(&c5(), false).unwrap().width, 2);
        let union = c5().disjoint_union(&Graph::complete(3));
        let rw = rank_width(&union, true).unwrap();
        assert_eq!(rw.width, 2);
        assert_eq!(width_of_decomposition(&union, rw.decomposition.as_ref().unwrap()).unwrap(), 2);
    }

    #[test]
    fn capacity_error_names_the_cap() {
        let err = rank_width(&Graph::path(21), false).unwrap_err();
        assert!(matches!(err, Error::Capacity { n: 21, cap: 20, .. }), "{err}");
        assert!(err.to_string().contains("20"));
        assert!(tree_width(&Graph::path(21)).is_err());
        // The cap bounds components, not the whole graph.
        assert_eq!(rank_width(&Graph::new(40), false).unwrap().width, 0);
    }

    #[test]
    fn decomposition_widths() {
        let edge = RankDecomposition::new(2, vec![(0, 1)], vec![0, 1]).unwrap();
        assert_eq!(width_of_decomposition(&Graph::complete(2), &edge).unwrap(), 1);
        assert_eq!(width_of_decomposition(&Graph::new(2), &edge).unwrap(), 0);
        let d = rank_width(&c5(), true).unwrap().decomposition.unwrap();
        assert_eq!(width_of_decomposition(&c5(), &d).unwrap(), 2);
        assert!(width_of_decomposition(&Graph::complete(3), &edge).is_err());
    }

    #[test]
    fn decomposition_validation() {
        assert!(RankDecomposition::new(3, vec![(0, 1), (1, 2)], vec![0, 2]).is_err()); // degree 2
        assert!(RankDecomposition::new(4, vec![(0, 3), (1, 3), (2, 3)], vec![0, 0, 2]).is_err());
        assert!(RankDecomposition::new(4, vec![(0, 3), (1, 3), (2, 3)], vec![0, 3, 2]).is_err());
        assert!(RankDecomposition::new(4, vec![(0, 3), (1, 3), (2, 3)], vec![0, 1]).is_err());
        assert!(RankDecomposition::new(4, vec![(0, 3), (1, 3), (2, 3)], vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn decomposition_text_round_trip() {
        let g = sample_gnp(&GnpConfig::new(9, 0.4, 3).unwrap());
        let d = rank_width(&g, true).unwrap().decomposition.unwrap();
        let parsed: RankDecomposition = d.to_text().parse().unwrap();
        assert_eq!(parsed, d);
        assert!("0 1\nleaf 0 0\nleaf 1 0\n".parse::<RankDecomposition>().is_err());
        assert!("0 x\n".parse::<RankDecomposition>().is_err());
    }

    #[test]
    fn reconstruction_is_deterministic() {
        let g = sample_gnp(&GnpConfig::new(10, 0.5, 11).unwrap());
        let a = rank_width(&g, true).unwrap();
        let b = rank_width(&g, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn balanced_separation_sizes() {
        let k2 = Graph::complete(2);
        let d = rank_width(&k2, true).unwrap().decomposition.unwrap();
        let s = balanced_separation(&k2, &d).unwrap();
        assert_eq!((s.v1.len(), s.v2.len(), s.rho), (1, 1, 1));

        let g6 = sample_gnp(&GnpConfig::new(6, 0.5, 4).unwrap());
        let rw = rank_width(&g6, true).unwrap();
        let s = balanced_separation(&g6, rw.decomposition.as_ref().unwrap()).unwrap();
        assert_eq!((s.v1.len(), s.v2.len()), (3, 2));
        assert!(s.rho <= rw.width);

        for seed in 0..20 {
            let g = sample_gnp(&GnpConfig::new(7, 0.5, seed).unwrap());
            let rw = rank_width(&g, true).unwrap();
            let s = balanced_separation(&g, rw.decomposition.as_ref().unwrap()).unwrap();
            assert!(s.rho <= rw.width);
        }
        assert!(balanced_separation(&Graph::new(1), &d).is_err());
    }

    #[test]
    fn balanced_separation_on_a_caterpillar() {
        // Caterpillar over 8 leaves: the walk has to move along the spine.
        let n = 8;
        let mut edges = Vec::new();
        let spine: Vec<usize> = (n..2 * n - 2).collect();
        edges.push((0, spine[0]));
        for (i, &s) in spine.iter().enumerate() {
            edges.push((s, i + 1));
            if i + 1 < spine.len() {
                edges.push((s, spine[i + 1]));
            }
        }
        edges.push((spine[spine.len() - 1], n - 1));
        let d = RankDecomposition::new(2 * n - 2, edges, (0..n).collect()).unwrap();
        let g = Graph::path(n);
        let s = balanced_separation(&g, &d).unwrap();
        assert!(3 * s.small_side.len() >= n && 2 * s.large_side.len() >= n);
        assert_eq!((s.v1.len(), s.v2.len()), (4, 3));
        assert!(s.rho <= width_of_decomposition(&g, &d).unwrap());
    }

    #[test]
    fn tree_width_examples() {
        assert_eq!(tree_width(&Graph::new(3)).unwrap(), 0);
        assert_eq!(tree_width(&Graph::star(5)).unwrap(), 1);
        assert_eq!(tree_width(&Graph::path(7)).unwrap(), 1);
        for n in 1..=7 {
            assert_eq!(tree_width(&Graph::complete(n)).unwrap(), n - 1);
        }
        let c6 = Graph::cycle(6);
        assert_eq!(brute_force_tree_width(&c6), 2);
        assert_eq!(tree_width(&c6).unwrap(), 2);
    }

    #[test]
    fn tree_width_matches_permutation_oracle() {
        for seed in 0..40 {
            let g = sample_gnp(&GnpConfig::new(7, 0.45, seed).unwrap());
            assert_eq!(tree_width(&g).unwrap(), brute_force_tree_width(&g), "{g:?}");
        }
    }

    #[test]
    fn width_report_examples() {
        let k5 = width_report(&Graph::complete(5)).unwrap();
        assert_eq!((k5.rank_width, k5.tree_width, k5.cw_lower, k5.cw_upper), (1, 4, 1, 3));
        let p4 = width_report(&Graph::path(4)).unwrap();
        assert_eq!((p4.rank_width, p4.tree_width, p4.cw_lower, p4.cw_upper), (1, 1, 1, 3));
        let one = width_report(&Graph::new(1)).unwrap();
        assert_eq!((one.rank_width, one.tree_width, one.cw_lower, one.cw_upper), (0, 0, 0, 1));
    }
}
