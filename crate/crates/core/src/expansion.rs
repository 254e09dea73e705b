//! Edge expansion and the expansion-based rank-width lower bound.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{is_connected_subset, Adjacency, Graph, MaskIter};

/// Largest vertex count for exhaustive cut enumeration.
pub const CHEEGER_CAP: usize = 24;

/// Exact Cheeger constant of a connected graph and a set attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    pub phi: Ratio<u64>,
    /// Lexicographically smallest minimizing set; always contains vertex 0.
    pub witness: Vec<usize>,
    pub cut_edges: usize,
    pub d_s: usize,
    pub d_comp: usize,
}

fn check_cheeger_input(g: &Graph) -> Result<()> {
    let n = g.n();
    if n > CHEEGER_CAP {
        return Err(Error::Capacity {
            what: "cheeger",
            n,
            cap: CHEEGER_CAP,
        });
    }
    if n < 2 {
        return Err(Error::invalid("the Cheeger constant needs at least two vertices"));
    }
    let all: Vec<usize> = (0..n).collect();
    if !is_connected_subset(g, &all) {
        return Err(Error::Disconnected);
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct Cut {
    mask: u32,
    cut: u64,
    small: u64,
}

impl Cut {
    fn ratio_cmp(&self, other: &Cut) -> Ordering {
        (self.cut * other.small).cmp(&(other.cut * self.small))
    }
}

/// Set order by sorted vertex lists: the set with the smaller first
/// difference wins, and a proper prefix comes first.
fn lex_cmp(a: u32, b: u32) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let low = diff.trailing_zeros();
    let below = (1u32 << low) - 1;
    // The set holding the lowest differing vertex is smaller unless the
    // other set has no elements past the common part.
    let lacks = if a >> low & 1 == 1 { b } else { a };
    let ord = if lacks & !below == 0 {
        Ordering::Greater
    } else {
        Ordering::Less
    };
    if a >> low & 1 == 1 {
        ord
    } else {
        ord.reverse()
    }
}

fn better(a: Cut, b: Cut) -> Cut {
    match a.ratio_cmp(&b) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => {
            if lex_cmp(a.mask, b.mask) == Ordering::Greater {
                b
            } else {
                a
            }
        }
    }
}

/// Minimum of `e(S, V \ S) / min(d(S), d(V \ S))` over all nonempty proper
/// `S`, by enumerating the sets that contain vertex 0.
pub fn cheeger_exact(g: &Graph) -> Result<ExpansionReport> {
    check_cheeger_input(g)?;
    let n = g.n();
    let adj: Vec<u32> = (0..n).map(|v| g.adj_mask(v) as u32).collect();
    let deg: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();
    let total: u64 = deg.iter().sum();
    let full = (1u32 << n) - 1;
    let eval = |rest: u32| -> Cut {
        let mask = 1 | (rest << 1);
        let mut d = 0;
        let mut cut = 0;
        for v in MaskIter(mask as u64) {
            d += deg[v];
            cut += (adj[v] & !mask & full).count_ones() as u64;
        }
        Cut {
            mask,
            cut,
            small: d.min(total - d),
        }
    };
    // Vertex 0 is always in S; `rest` ranges over subsets of 1..n, minus
    // the one making S the whole vertex set.
    let count = (1u32 << (n - 1)) - 1;
    let best = (0..count)
        .into_par_iter()
        .with_min_len(1 << 12)
        .map(eval)
        .reduce_with(better)
        .expect("at least one proper subset");
    let d_s: u64 = MaskIter(best.mask as u64).map(|v| deg[v]).sum();
    Ok(ExpansionReport {
        phi: Ratio::new(best.cut, best.small),
        witness: MaskIter(best.mask as u64).collect(),
        cut_edges: best.cut as usize,
        d_s: d_s as usize,
        d_comp: (total - d_s) as usize,
    })
}

/// The stationary-distribution form: minimum over `S` with
/// `0 < pi(S) <= 1/2` of `sum_{i in S, j not in S} pi_i p_ij / pi(S)`, where
/// `pi_v = deg(v) / 2|E|` and `p_ij = 1 / deg(i)` on edges. Every set is
/// visited, so both orientations of a `pi(S) = 1/2` split are considered.
pub fn cheeger_alternative(g: &Graph) -> Result<Ratio<u64>> {
    check_cheeger_input(g)?;
    let n = g.n();
    let two_m = 2 * g.edge_count() as u64;
    let pi: Vec<Ratio<u64>> = (0..n).map(|v| Ratio::new(g.degree(v) as u64, two_m)).collect();
    let half = Ratio::new(1, 2);
    let mut best: Option<Ratio<u64>> = None;
    for mask in 1u64..(1u64 << n) - 1 {
        let mut pi_s = Ratio::from_integer(0);
        for v in MaskIter(mask) {
            pi_s += pi[v];
        }
        if pi_s > half {
            continue;
        }
        let mut flow = Ratio::from_integer(0);
        for i in MaskIter(mask) {
            let p_ij = Ratio::new(1, g.degree(i) as u64);
            for j in g.neighbors(i) {
                if mask >> j & 1 == 0 {
                    flow += pi[i] * p_ij;
                }
            }
        }
        let value = flow / pi_s;
        if best.is_none_or(|b| value < b) {
            best = Some(value);
        }
    }
    Ok(best.expect("a connected graph on two or more vertices has a set with pi(S) <= 1/2"))
}

/// Result of [`degree_tail_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailThreshold {
    pub m: usize,
    /// Certified upper bound on `sum_{k >= m} k c^k / (k-1)!`.
    pub tail_at_m: f64,
    /// Lower bound on the same sum started at `m - 1` (`None` when `m = 1`).
    pub tail_before: Option<f64>,
    pub target: f64,
    /// `target / tail_at_m`; values below 10 mean the comparison is within
    /// the documented safety factor of floating-point evaluation.
    pub margin: f64,
}

/// Bounds on `sum_{k >= from} k c^k / (k-1)!` as `(lower, upper)`.
///
/// Terms follow `t_1 = c`, `t_{k+1} = t_k (k+1) c / k^2`. The ratio
/// `(k+1)c/k^2` decreases in `k`, so once it is below 1/2 with `k > 2c`, the
/// remainder after `t_K` is at most `t_{K+1} / (1 - r_K)`. Summation runs
/// until that remainder is negligible next to the partial sum.
pub fn degree_tail_sum(c: f64, from: usize) -> (f64, f64) {
    assert!(from >= 1);
    let ratio = |k: usize| (k as f64 + 1.0) * c / (k as f64 * k as f64);
    let mut t = c;
    let mut k = 1;
    while k < from {
        t *= ratio(k);
        k += 1;
    }
    let mut partial = 0.0;
    loop {
        partial += t;
        let r = ratio(k);
        let next = t * r;
        if k as f64 > 2.0 * c && r < 0.5 {
            let rest = next / (1.0 - r);
            if rest <= partial * 1e-17 || next == 0.0 {
                return (partial, partial + rest);
            }
        }
        t = next;
        k += 1;
    }
}

/// Smallest `M >= 1` with `sum_{k >= M} k c^k / (k-1)! < eps / 2`.
pub fn degree_tail_threshold(c: f64, eps: f64) -> Result<TailThreshold> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::invalid(format!("c must be a finite number above 1, got {c}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let target = eps / 2.0;
    let mut prev_lower = None;
    let mut m = 1;
    loop {
        let (lower, upper) = degree_tail_sum(c, m);
        if upper < target {
            return Ok(TailThreshold {
                m,
                tail_at_m: upper,
                tail_before: prev_lower,
                target,
                margin: target / upper,
            });
        }
        prev_lower = Some(lower);
        m += 1;
    }
}

/// Vertices of degree at least `m` and the number of edges touching them.
pub fn high_degree_filter<G: Adjacency>(g: &G, m: usize) -> (Vec<usize>, usize) {
    let n = g.vertex_count();
    let high: Vec<bool> = (0..n).map(|v| g.degree(v) >= m).collect();
    let x: Vec<usize> = (0..n).filter(|&v| high[v]).collect();
    let incident = g.edges().filter(|&(u, v)| high[u] || high[v]).count();
    (x, incident)
}

/// Lower bound on rank-width derived from the expansion of an induced core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub n: usize,
    pub core: Vec<usize>,
    pub alpha: Ratio<u64>,
    pub delta: Ratio<u64>,
    pub degree_cap: usize,
    pub high_degree: Vec<usize>,
    pub filtered_edge_count: usize,
    pub bound: usize,
}

impl Certificate {
    /// `alpha |W| / 3`, the least number of edges across any split of the
    /// core into two parts of at least `|W|/3` vertices.
    pub fn crossing_edges(&self) -> Ratio<u64> {
        self.alpha * self.core.len() as u64 / 3
    }

    /// `alpha |W| / 6`, the most edges the high-degree vertices may touch.
    pub fn edge_budget(&self) -> Ratio<u64> {
        self.alpha * self.core.len() as u64 / 6
    }

    pub fn applicable(&self) -> bool {
        Ratio::from_integer(self.filtered_edge_count as u64) <= self.edge_budget()
    }

    /// `key: value` lines; see the README for the field list.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "core_size: {}", self.core.len());
        let _ = writeln!(s, "core: {}", join(&self.core));
        let _ = writeln!(s, "alpha: {}", self.alpha);
        let _ = writeln!(s, "delta: {}", self.delta);
        let _ = writeln!(s, "degree_cap: {}", self.degree_cap);
        let _ = writeln!(s, "high_degree: {}", join(&self.high_degree));
        let _ = writeln!(s, "filtered_edges: {}", self.filtered_edge_count);
        let _ = writeln!(s, "edge_budget: {}", self.edge_budget());
        let _ = writeln!(s, "crossing_edges_min: {}", self.crossing_edges());
        let _ = writeln!(s, "applicable: {}", self.applicable());
        let _ = writeln!(s, "bound: {}", self.bound);
        s
    }
}

/// Sorted, deduplicated core with the checks shared by the certificate
/// entry points, plus the core's exact Cheeger constant.
fn prepare_core<G: Adjacency>(g: &G, w: &[usize]) -> Result<(Vec<usize>, Ratio<u64>)> {
    let n = g.vertex_count();
    let mut core = w.to_vec();
    core.sort_unstable();
    core.dedup();
    if let Some(&v) = core.iter().find(|&&v| v >= n) {
        return Err(Error::invalid(format!("core vertex {v} out of range for n = {n}")));
    }
    if core.len() > CHEEGER_CAP {
        return Err(Error::Capacity {
            what: "certificate core",
            n: core.len(),
            cap: CHEEGER_CAP,
        });
    }
    if core.len() < 2 {
        return Err(Error::invalid("the core needs at least two vertices"));
    }
    if !is_connected_subset(g, &core) {
        return Err(Error::Disconnected);
    }
    let h = induced(g, &core);
    let alpha = cheeger_exact(&h)?.phi;
    Ok((core, alpha))
}

fn induced<G: Adjacency>(g: &G, set: &[usize]) -> Graph {
    let mut h = Graph::new(set.len());
    for (i, &u) in set.iter().enumerate() {
        for v in g.neighbors(u) {
            if let Ok(j) = set.binary_search(&v) {
                if i < j {
                    h.add_edge(i, j);
                }
            }
        }
    }
    h
}

fn certificate_for<G: Adjacency>(g: &G, core: &[usize], alpha: Ratio<u64>, m: usize) -> Certificate {
    let (high_degree, filtered) = high_degree_filter(g, m);
    let mut cert = Certificate {
        n: g.vertex_count(),
        core: core.to_vec(),
        alpha,
        delta: Ratio::new(core.len() as u64, g.vertex_count() as u64),
        degree_cap: m,
        high_degree,
        filtered_edge_count: filtered,
        bound: 0,
    };
    if cert.applicable() {
        let raw = alpha * core.len() as u64 / (6 * (m as u64).pow(2));
        cert.bound = raw.ceil().to_integer() as usize;
    }
    cert
}

/// Certified lower bound on the rank-width of `g` from the induced core `w`
/// and degree cap `m`; the bound is 0 when the high-degree vertices touch
/// more than `alpha |W| / 6` edges.
pub fn certified_rw_lower_bound<G: Adjacency>(g: &G, w: &[usize], m: usize) -> Result<Certificate> {
    if m == 0 {
        return Err(Error::invalid("degree cap must be at least 1"));
    }
    let (core, alpha) = prepare_core(g, w)?;
    Ok(certificate_for(g, &core, alpha, m))
}

/// The certificate with the smallest applicable degree cap, which carries
/// the largest bound. A cap above the maximum degree always applies.
pub fn best_certificate<G: Adjacency>(g: &G, w: &[usize]) -> Result<Certificate> {
    let (core, alpha) = prepare_core(g, w)?;
    let max_deg = (0..g.vertex_count()).map(|v| g.degree(v)).max().unwrap_or(0);
    for m in 1..=max_deg + 1 {
        let cert = certificate_for(g, &core, alpha, m);
        if cert.applicable() {
            return Ok(cert);
        }
    }
    unreachable!("no vertex has degree above the maximum degree")
}
