//! Seeded sampling runs over G(n, p) in the dense, near-dense, and
//! `p = c/n` regimes, with results as CSV rows.

use std::collections::VecDeque;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{best_certificate, CHEEGER_CAP};
use crate::graph::{
    components, edges_within, sample_gnp, sample_gnp_sparse, two_core, Adjacency, ComponentKind, GnpConfig,
    Graph, SparseGraph,
};
use crate::rng::derive_seed;
use crate::width::{rank_width_capped, tree_width_capped, DEFAULT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Dense,
    Neardense,
    Supercritical,
    Critical,
    Subcritical,
}

impl Regime {
    pub const ALL: [Regime; 5] = [
        Regime::Dense,
        Regime::Neardense,
        Regime::Supercritical,
        Regime::Critical,
        Regime::Subcritical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Dense => "dense",
            Regime::Neardense => "neardense",
            Regime::Supercritical => "supercritical",
            Regime::Critical => "critical",
            Regime::Subcritical => "subcritical",
        }
    }

    /// Whether `p` is given as `c / n`.
    pub fn is_sparse(self) -> bool {
        matches!(self, Regime::Supercritical | Regime::Critical | Regime::Subcritical)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown regime {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeConfig {
    pub regime: Regime,
    pub n: usize,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub exact_width_cap: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Fill `runtime_ms`. Off by default so that output is reproducible.
    pub timing: bool,
}

impl RegimeConfig {
    pub fn new(regime: Regime, n: usize, p: f64, samples: u64, seed: u64) -> Result<Self> {
        let cfg = RegimeConfig {
            regime,
            n,
            p,
            samples,
            seed,
            exact_width_cap: DEFAULT_CAP,
            workers: None,
            timing: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sparse regimes with `p = c / n`.
    pub fn with_c(regime: Regime, n: usize, c: f64, samples: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        RegimeConfig::new(regime, n, c / n as f64, samples, seed)
    }

    pub fn c(&self) -> f64 {
        self.p * self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(format!("p = {} not in [0, 1]", self.p)));
        }
        let c = self.c();
        let ok = match self.regime {
            Regime::Dense => self.p > 0.0 && self.p < 1.0,
            Regime::Neardense => self.p > 0.0 && self.p <= 0.5,
            Regime::Supercritical => c > 1.0,
            Regime::Critical => (c - 1.0).abs() <= 1e-9,
            Regime::Subcritical => c < 1.0,
        };
        if !ok {
            let why = match self.regime {
                Regime::Dense => "dense needs 0 < p < 1".to_string(),
                Regime::Neardense => "neardense needs 0 < p <= 1/2".to_string(),
                Regime::Supercritical => format!("supercritical needs c > 1, got c = {c}"),
                Regime::Critical => format!("critical needs c = 1, got c = {c}"),
                Regime::Subcritical => format!("subcritical needs c < 1, got c = {c}"),
            };
            return Err(Error::invalid(why));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        Ok(())
    }
}

/// One sampled graph. Widths that were not computed are -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub regime: Regime,
    pub n: usize,
    pub p: f64,
    /// Seed of this sample, derived from the master seed and the index.
    pub seed: u64,
    pub sample_index: u64,
    pub rw: i64,
    pub tw: i64,
    pub ceil_n3: usize,
    pub gap: i64,
    pub largest_component: usize,
    pub all_simple: bool,
    pub certified_lb: i64,
    pub runtime_ms: u64,
    pub rw_complement: i64,
    /// `largest_component / n^(2/3)`.
    pub largest_ratio: f64,
}

pub const COLUMNS: [&str; 15] = [
    "regime",
    "n",
    "p",
    "seed",
    "sample_index",
    "rw",
    "tw",
    "ceil_n3",
    "gap",
    "largest_component",
    "all_simple",
    "certified_lb",
    "runtime_ms",
    "rw_complement",
    "largest_ratio",
];

impl ExperimentRecord {
    fn check(&self) -> Result<()> {
        if self.rw > self.ceil_n3 as i64 {
            return Err(Error::InvariantViolation(format!(
                "sample {}: rank-width {} exceeds ceil(n/3) = {}",
                self.sample_index, self.rw, self.ceil_n3
            )));
        }
        if self.all_simple && self.rw > 2 {
            return Err(Error::InvariantViolation(format!(
                "sample {}: forest-like graph with rank-width {}",
                self.sample_index, self.rw
            )));
        }
        if self.rw >= 0 && self.certified_lb > self.rw {
            return Err(Error::InvariantViolation(format!(
                "sample {}: certified bound {} exceeds rank-width {}",
                self.sample_index, self.certified_lb, self.rw
            )));
        }
        Ok(())
    }
}

fn width(w: usize) -> i64 {
    w as i64
}

/// Component summary shared by the dense and sparse paths.
fn component_stats<G: Adjacency>(g: &G, comps: &[Vec<usize>]) -> (usize, bool) {
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
    let simple = comps
        .iter()
        .all(|c| ComponentKind::from_counts(c.len(), edges_within(g, c)) != ComponentKind::Complex);
    (largest, simple)
}

/// Rank-width and tree-width of a tree or unicyclic component, from its
/// shape alone. Trees with an edge have rank-width 1. A unicyclic graph has
/// rank-width 2 when its cycle has length at least 5 (it then contains an
/// induced long cycle) and 1 otherwise.
pub fn simple_component_widths(kind: ComponentKind, vertices: usize, cycle_len: usize) -> Option<(usize, usize)> {
    match kind {
        ComponentKind::Tree => Some((usize::from(vertices > 1), usize::from(vertices > 1))),
        ComponentKind::Unicyclic => Some((if cycle_len >= 5 { 2 } else { 1 }, 2)),
        ComponentKind::Complex => None,
    }
}

/// Widths of a sparse graph, component by component. Trees and unicyclic
/// components use [`simple_component_widths`]; other components are solved
/// exactly when they fit under `cap` and make the result -1 otherwise.
fn sparse_widths(g: &SparseGraph, comps: &[Vec<usize>], cap: usize) -> Result<(i64, i64)> {
    let mut in_core = vec![false; g.vertex_count()];
    for v in two_core(g) {
        in_core[v] = true;
    }
    let (mut rw, mut tw) = (0i64, 0i64);
    for comp in comps {
        let kind = ComponentKind::from_counts(comp.len(), edges_within(g, comp));
        let cycle_len = comp.iter().filter(|&&v| in_core[v]).count();
        let (r, t) = match simple_component_widths(kind, comp.len(), cycle_len) {
            Some((r, t)) => (width(r), width(t)),
            None if comp.len() <= cap => {
                let h = g.induced_dense(comp);
                (
                    width(rank_width_capped(&h, false, cap)?.width),
                    width(tree_width_capped(&h, cap)?),
                )
            }
            None => (-1, -1),
        };
        rw = if rw < 0 || r < 0 { -1 } else { rw.max(r) };
        tw = if tw < 0 || t < 0 { -1 } else { tw.max(t) };
    }
    Ok((rw, tw))
}

/// Breadth-first ball of at most `limit` vertices inside the 2-core of the
/// largest component, rooted at a core vertex of maximum core degree
/// (lowest index on ties). Neighbors are visited in increasing order.
pub fn core_ball(g: &SparseGraph, limit: usize) -> Vec<usize> {
    let comps = components(g);
    let Some(giant) = comps.iter().max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0]))) else {
        return Vec::new();
    };
    let mut in_core = vec![false; g.vertex_count()];
    for v in two_core(g) {
        in_core[v] = true;
    }
    let core: Vec<usize> = giant.iter().copied().filter(|&v| in_core[v]).collect();
    let core_degree = |v: usize| g.neighbors(v).filter(|&u| in_core[u]).count();
    let Some(&root) = core.iter().max_by(|&&a, &&b| core_degree(a).cmp(&core_degree(b)).then(b.cmp(&a))) else {
        return Vec::new();
    };
    let mut seen = vec![false; g.vertex_count()];
    let mut ball = vec![root];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for u in g.neighbors(v) {
            if ball.len() == limit {
                ball.sort_unstable();
                return ball;
            }
            if in_core[u] && !seen[u] {
                seen[u] = true;
                ball.push(u);
                queue.push_back(u);
            }
        }
    }
    ball.sort_unstable();
    ball
}

fn dense_record(cfg: &RegimeConfig, index: u64, seed: u64) -> Result<ExperimentRecord> {
    let g: Graph = sample_gnp(&GnpConfig::new(cfg.n, cfg.p, seed)?);
    let cap = cfg.exact_width_cap;
    let rw = width(rank_width_capped(&g, false, cap)?.width);
    let tw = width(tree_width_capped(&g, cap)?);
    let rw_complement = width(rank_width_capped(&g.complement(), false, cap)?.width);
    let (largest, all_simple) = component_stats(&g, &components(&g));
    let ceil_n3 = cfg.n.div_ceil(3);
    Ok(ExperimentRecord {
        regime: cfg.regime,
        n: cfg.n,
        p: cfg.p,
        seed,
        sample_index: index,
        rw,
        tw,
        ceil_n3,
        gap: ceil_n3 as i64 - rw,
        largest_component: largest,
        all_simple,
        certified_lb: -1,
        runtime_ms: 0,
        rw_complement,
        largest_ratio: largest as f64 / (cfg.n as f64).powf(2.0 / 3.0),
    })
}

fn sparse_record(cfg: &RegimeConfig, index: u64, seed: u64) -> Result<ExperimentRecord> {
    let g = sample_gnp_sparse(&GnpConfig::new(cfg.n, cfg.p, seed)?);
    let cap = cfg.exact_width_cap;
    let comps = components(&g);
    let (largest, all_simple) = component_stats(&g, &comps);
    let (rw, tw) = if cfg.n <= cap {
        let d = g.to_dense();
        (
            width(rank_width_capped(&d, false, cap)?.width),
            width(tree_width_capped(&d, cap)?),
        )
    } else {
        sparse_widths(&g, &comps, cap)?
    };
    let certified_lb = if cfg.regime == Regime::Supercritical {
        let ball = core_ball(&g, CHEEGER_CAP);
        if ball.len() >= 2 {
            width(best_certificate(&g, &ball)?.bound)
        } else {
            -1
        }
    } else {
        -1
    };
    let ceil_n3 = cfg.n.div_ceil(3);
    Ok(ExperimentRecord {
        regime: cfg.regime,
        n: cfg.n,
        p: cfg.p,
        seed,
        sample_index: index,
        rw,
        tw,
        ceil_n3,
        gap: if rw >= 0 { ceil_n3 as i64 - rw } else { -1 },
        largest_component: largest,
        all_simple,
        certified_lb,
        runtime_ms: 0,
        rw_complement: -1,
        largest_ratio: largest as f64 / (cfg.n as f64).powf(2.0 / 3.0),
    })
}

fn sample(cfg: &RegimeConfig, index: u64) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let seed = derive_seed(cfg.seed, index);
    let mut rec = if cfg.regime.is_sparse() {
        sparse_record(cfg, index, seed)?
    } else {
        dense_record(cfg, index, seed)?
    };
    rec.check()?;
    if cfg.timing {
        rec.runtime_ms = start.elapsed().as_millis() as u64;
    }
    Ok(rec)
}

/// Runs every sample of `cfg`; records come back ordered by sample index
/// whatever the number of workers.
pub fn run_experiment(cfg: &RegimeConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    if !cfg.regime.is_sparse() && cfg.n > cfg.exact_width_cap {
        return Err(Error::Capacity {
            what: "rank-width",
            n: cfg.n,
            cap: cfg.exact_width_cap,
        });
    }
    let run = || (0..cfg.samples).into_par_iter().map(|i| sample(cfg, i)).collect::<Result<Vec<_>>>();
    match cfg.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {k} workers: {e}")))?
            .install(run),
        None => run(),
    }
}

fn run_checked(cfg: &RegimeConfig, regime: Regime) -> Result<Vec<ExperimentRecord>> {
    if cfg.regime != regime {
        return Err(Error::invalid(format!("expected a {regime} configuration, got {}", cfg.regime)));
    }
    run_experiment(cfg)
}

pub fn run_dense(cfg: &RegimeConfig) -> Result<Vec<ExperimentRecord>> {
    run_checked(cfg, Regime::Dense)
}

pub fn run_neardense(cfg: &RegimeConfig) -> Result<Vec<ExperimentRecord>> {
    run_checked(cfg, Regime::Neardense)
}

pub fn run_subcritical(cfg: &RegimeConfig) -> Result<Vec<ExperimentRecord>> {
    run_checked(cfg, Regime::Subcritical)
}

pub fn run_critical(cfg: &RegimeConfig) -> Result<Vec<ExperimentRecord>> {
    run_checked(cfg, Regime::Critical)
}

pub fn run_supercritical(cfg: &RegimeConfig) -> Result<Vec<ExperimentRecord>> {
    run_checked(cfg, Regime::Supercritical)
}

/// Median and maximum of the computed gaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSummary {
    pub count: usize,
    pub median: f64,
    pub max: i64,
}

pub fn gap_summary(records: &[ExperimentRecord]) -> Option<GapSummary> {
    let mut gaps: Vec<i64> = records.iter().filter(|r| r.rw >= 0).map(|r| r.gap).collect();
    if gaps.is_empty() {
        return None;
    }
    gaps.sort_unstable();
    let k = gaps.len();
    let median = if k % 2 == 1 {
        gaps[k / 2] as f64
    } else {
        (gaps[k / 2 - 1] + gaps[k / 2]) as f64 / 2.0
    };
    Some(GapSummary {
        count: k,
        median,
        max: gaps[k - 1],
    })
}

pub fn write_records_to<W: Write>(records: &[ExperimentRecord], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a header row and one row per record, sorted by sample index.
pub fn write_records(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| r.sample_index);
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_records_to(&sorted, file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_records_from<R: Read>(input: R) -> std::result::Result<Vec<ExperimentRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_records_from(file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}
