//! Simple undirected graphs, G(n,p) sampling, cut matrices and cutrank,
//! structural predicates and the edge-list file format.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::distributions::{Bernoulli, Distribution};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::gf2::{rank_of_words, BitMatrix};
use crate::rng::rng_from_seed;

/// Read access shared by the dense and sparse graph representations.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn degree(&self, v: usize) -> usize;
    /// Neighbors of `v` in ascending order.
    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_;

    fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }
}

/// Simple graph with adjacency stored as packed bit rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        Graph {
            n,
            stride,
            rows: vec![0; n * stride],
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::invalid(format!("duplicate edge ({u},{v})")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    /// Cycle `0-1-...-(n-1)-0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut g = Graph::path(n);
        g.add_edge(n - 1, 0);
        g
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut g = Graph::new(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.row(u)[v / 64] >> (v % 64)) & 1 == 1
    }

    /// # Panics
    /// Panics on a self-loop or an out-of-range endpoint.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        self.rows[u * self.stride + v / 64] |= 1 << (v % 64);
        self.rows[v * self.stride + u / 64] |= 1 << (u % 64);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u * self.stride + v / 64] &= !(1 << (v % 64));
        self.rows[v * self.stride + u / 64] &= !(1 << (u % 64));
    }

    /// Neighborhood of `v` as a bitmask. Only for graphs with at most 64 vertices.
    #[inline]
    pub fn adj_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.rows[v]
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Subgraph induced on `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = Graph::new(self.n + other.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + self.n, v + self.n);
        }
        g
    }

    /// The matrix `N_{V1,V2}`: rows `v1`, columns `v2`, both in ascending
    /// vertex order.
    pub fn cut_matrix(&self, v1: &[usize], v2: &[usize]) -> Result<BitMatrix> {
        let (v1, v2) = disjoint_sets(self.n, v1, v2)?;
        let mut m = BitMatrix::zeros(v1.len(), v2.len());
        for (i, &a) in v1.iter().enumerate() {
            for (j, &b) in v2.iter().enumerate() {
                if self.has_edge(a, b) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Cutrank `rho_G(V1, V2)`.
    pub fn cutrank(&self, v1: &[usize], v2: &[usize]) -> Result<usize> {
        Ok(self.cut_matrix(v1, v2)?.rank())
    }

    /// Cutrank between two disjoint bitmask sets, graphs with at most 64 vertices.
    #[inline]
    pub fn cutrank_mask(&self, a: u64, b: u64) -> usize {
        debug_assert_eq!(a & b, 0);
        rank_of_words(MaskIter(a).map(|v| self.rows[v] & b))
    }

    pub fn to_sparse(&self) -> SparseGraph {
        let mut s = SparseGraph::new(self.n);
        for (u, v) in self.edges() {
            s.add_edge(u, v);
        }
        s
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges().collect::<Vec<_>>())
    }
}

impl Adjacency for Graph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(wi, &w)| MaskIter(w).map(move |b| wi * 64 + b))
    }
}

/// Adjacency-list graph for large sparse instances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGraph {
    adj: Vec<Vec<u32>>,
    edges: usize,
}

impl SparseGraph {
    pub fn new(n: usize) -> Self {
        SparseGraph {
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    /// Appends an edge without duplicate checks; call [`SparseGraph::normalize`]
    /// afterwards if neighbor lists must be sorted.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self-loops are not allowed");
        self.adj[u].push(v as u32);
        self.adj[v].push(u as u32);
        self.edges += 1;
    }

    fn normalize(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    /// Dense copy.
    pub fn to_dense(&self) -> Graph {
        let mut g = Graph::new(self.adj.len());
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        g
    }

    /// Induced subgraph on `vertices` as a dense graph; `vertices[i]` becomes `i`.
    pub fn induced_dense(&self, vertices: &[usize]) -> Graph {
        let mut index = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i);
        }
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for w in self.neighbors(u) {
                if let Some(&j) = index.get(&w) {
                    if i < j {
                        g.add_edge(i, j);
                    }
                }
            }
        }
        g
    }
}

impl Adjacency for SparseGraph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&w| w as usize)
    }

    fn edge_count(&self) -> usize {
        self.edges
    }
}

/// Iterator over set bits of a word, ascending.
#[derive(Clone, Copy)]
pub struct MaskIter(pub u64);

impl Iterator for MaskIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

pub fn mask_of(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

pub fn vertices_of(mask: u64) -> Vec<usize> {
    MaskIter(mask).collect()
}

fn normalize_set(n: usize, set: &[usize]) -> Result<Vec<usize>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    if let Some(&v) = s.last() {
        if v >= n {
            return Err(Error::invalid(format!("vertex {v} out of range for n = {n}")));
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("vertex set contains duplicates"));
    }
    Ok(s)
}

fn disjoint_sets(n: usize, v1: &[usize], v2: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let a = normalize_set(n, v1)?;
    let b = normalize_set(n, v2)?;
    if let Some(v) = a.iter().find(|v| b.binary_search(v).is_ok()) {
        return Err(Error::invalid(format!("vertex sets are not disjoint (both contain {v})")));
    }
    Ok((a, b))
}

/// Parameters of the Erdős–Rényi model G(n, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnpConfig {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl GnpConfig {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("edge probability {p} not in [0, 1]")));
        }
        Ok(GnpConfig { n, p, seed })
    }
}

/// Samples G(n, p) as a dense graph.
///
/// Pairs `(i, j)`, `i < j`, are visited in row-major order and each consumes
/// exactly one `u64` from a ChaCha8 stream seeded with `cfg.seed`; the pair is
/// an edge iff the draw is below `p * 2^64` (`rand`'s `Bernoulli`).
pub fn sample_gnp(cfg: &GnpConfig) -> Graph {
    let coin = Bernoulli::new(cfg.p).expect("GnpConfig validates p");
    let mut rng = rng_from_seed(cfg.seed);
    let mut g = Graph::new(cfg.n);
    for i in 0..cfg.n {
        for j in i + 1..cfg.n {
            if coin.sample(&mut rng) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Samples G(n, p) by geometric skipping over the pairs, so the cost is
/// proportional to `n + |E|`. The pair order is `(1,0), (2,0), (2,1), ...`;
/// gaps between successive edges are `floor(ln(1-u) / ln(1-p))` with `u`
/// uniform in `[0, 1)` from a ChaCha8 stream seeded with `cfg.seed`.
///
/// Same distribution as [`sample_gnp`], different stream consumption.
pub fn sample_gnp_sparse(cfg: &GnpConfig) -> SparseGraph {
    let n = cfg.n;
    let mut g = SparseGraph::new(n);
    if cfg.p <= 0.0 || n < 2 {
        return g;
    }
    if cfg.p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g.normalize();
        return g;
    }
    let mut rng = rng_from_seed(cfg.seed);
    let log_q = (-cfg.p).ln_1p();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let u: f64 = rng.gen();
        let skip = ((-u).ln_1p() / log_q).floor();
        // Skips beyond the remaining pair count end the loop either way.
        w = w.saturating_add(1).saturating_add(skip.min(i64::MAX as f64 / 4.0) as i64);
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            g.add_edge(v, w as usize);
        }
    }
    g.normalize();
    g
}

/// Connected components, each sorted, listed by minimum vertex.
pub fn components<G: Adjacency>(g: &G) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// True if the subgraph induced on `set` is connected (and `set` nonempty).
pub fn is_connected_subset<G: Adjacency>(g: &G, set: &[usize]) -> bool {
    let Some(&start) = set.first() else {
        return false;
    };
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let mut seen = vec![false; sorted.len()];
    let idx = |v: usize| sorted.binary_search(&v).ok();
    let mut stack = vec![start];
    seen[idx(start).expect("start is in the set")] = true;
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for w in g.neighbors(u) {
            if let Some(i) = idx(w) {
                if !seen[i] {
                    seen[i] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
    }
    reached == sorted.len()
}

/// Number of edges with both endpoints in the sorted set `set`.
pub fn edges_within<G: Adjacency>(g: &G, set: &[usize]) -> usize {
    set.iter()
        .map(|&u| g.neighbors(u).filter(|&w| w > u && set.binary_search(&w).is_ok()).count())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Tree,
    Unicyclic,
    Complex,
}

impl ComponentKind {
    pub fn from_counts(vertices: usize, edges: usize) -> Self {
        match edges + 1 {
            e if e <= vertices => ComponentKind::Tree,
            e if e == vertices + 1 => ComponentKind::Unicyclic,
            _ => ComponentKind::Complex,
        }
    }
}

/// Classifies a connected component by its edge surplus.
pub fn classify_component<G: Adjacency>(g: &G, comp: &[usize]) -> Result<ComponentKind> {
    let comp = normalize_set(g.vertex_count(), comp)?;
    if !is_connected_subset(g, &comp) {
        return Err(Error::Disconnected);
    }
    Ok(ComponentKind::from_counts(comp.len(), edges_within(g, &comp)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub max: usize,
    pub min: usize,
    pub sum: usize,
}

pub fn degree_stats<G: Adjacency>(g: &G) -> DegreeStats {
    let degrees: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    DegreeStats {
        max: degrees.iter().copied().max().unwrap_or(0),
        min: degrees.iter().copied().min().unwrap_or(0),
        sum: degrees.iter().sum(),
        degrees,
    }
}

/// Vertices of the 2-core (repeatedly strip vertices of degree below 2), sorted.
pub fn two_core<G: Adjacency>(g: &G) -> Vec<usize> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < 2).collect();
    while let Some(u) = stack.pop() {
        if removed[u] {
            continue;
        }
        removed[u] = true;
        for w in g.neighbors(u) {
            if !removed[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    (0..n).filter(|&v| !removed[v]).collect()
}

/// Parsed edge list before it is committed to a representation.
struct EdgeList {
    n: usize,
    edges: Vec<(usize, usize)>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_edge_list_raw(text: &str) -> Result<EdgeList> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(parse_error(line_no, format!("expected two integers, found {line:?}")));
        };
        let a: usize = a
            .parse()
            .map_err(|_| parse_error(line_no, format!("not a nonnegative integer: {a:?}")))?;
        let b: usize = b
            .parse()
            .map_err(|_| parse_error(line_no, format!("not a nonnegative integer: {b:?}")))?;
        let Some((n, m)) = header else {
            header = Some((a, b));
            continue;
        };
        if edges.len() == m {
            return Err(parse_error(line_no, format!("more than the declared {m} edges")));
        }
        if a == b {
            return Err(parse_error(line_no, format!("self-loop at vertex {a}")));
        }
        if a >= n || b >= n {
            return Err(parse_error(line_no, format!("vertex index out of range for n = {n}")));
        }
        if a > b {
            return Err(parse_error(line_no, format!("edge must be written as u < v, got {a} {b}")));
        }
        if !seen.insert((a, b)) {
            return Err(parse_error(line_no, format!("duplicate edge {a} {b}")));
        }
        edges.push((a, b));
    }
    let Some((n, m)) = header else {
        return Err(parse_error(last_line.max(1), "missing \"n m\" header"));
    };
    if edges.len() != m {
        return Err(parse_error(
            last_line.max(1),
            format!("declared {m} edges but found {}", edges.len()),
        ));
    }
    Ok(EdgeList { n, edges })
}

/// Parses the edge-list text format into a dense graph.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let el = parse_edge_list_raw(text)?;
    let mut g = Graph::new(el.n);
    for (u, v) in el.edges {
        g.add_edge(u, v);
    }
    Ok(g)
}

pub fn parse_edge_list_sparse(text: &str) -> Result<SparseGraph> {
    let el = parse_edge_list_raw(text)?;
    let mut g = SparseGraph::new(el.n);
    for (u, v) in el.edges {
        g.add_edge(u, v);
    }
    g.normalize();
    Ok(g)
}

/// Header line followed by edges in lexicographic order.
pub fn to_edge_list<G: Adjacency>(g: &G) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

pub fn read_sparse_graph(path: impl AsRef<Path>) -> Result<SparseGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list_sparse(&text)
}

pub fn write_graph<G: Adjacency>(g: &G, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_edge_list(g)).map_err(|e| Error::io(path, e))
}
