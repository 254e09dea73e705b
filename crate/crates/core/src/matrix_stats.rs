//! Random GF(2) vectors and matrices: subspace membership, rank defects and
//! the dense-graph width sweep.

use std::io::Write;
use std::path::Path;

use rand::distributions::{Bernoulli, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::gf2::{rank_of_words, BitMatrix, BitVector, Gf2Basis};
use crate::graph::{sample_gnp, GnpConfig};
use crate::rng::{derive_seed, rng_from_seed};
use crate::width::{rank_width_capped, DEFAULT_CAP};

/// Largest subspace dimension [`membership_probability`] enumerates.
pub const MEMBERSHIP_DIM_CAP: usize = 24;

/// Absolute slack when comparing a probability with its bound.
pub const BOUND_SLACK: f64 = 1e-12;

/// Vectors in `F_2^n` with independent entries, each 1 with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedVectorModel {
    pub n: usize,
    pub p: f64,
    pub eta: f64,
}

impl BiasedVectorModel {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("entry probability {p} not in (0, 1)")));
        }
        Ok(BiasedVectorModel {
            n,
            p,
            eta: p.max(1.0 - p),
        })
    }
}

/// Number of vectors of each Hamming weight in the span of `basis`.
pub fn span_weight_counts(basis: &Gf2Basis) -> Result<Vec<u64>> {
    let k = basis.dimension();
    if k > MEMBERSHIP_DIM_CAP {
        return Err(Error::Capacity {
            what: "subspace enumeration",
            n: k,
            cap: MEMBERSHIP_DIM_CAP,
        });
    }
    let mut counts = vec![0u64; basis.len() + 1];
    let mut cur = BitVector::zeros(basis.len());
    counts[0] += 1;
    // Gray code order: step i flips the basis vector at the lowest set bit.
    for i in 1u64..(1u64 << k) {
        cur.xor_assign(&basis.vectors()[i.trailing_zeros() as usize]);
        counts[cur.count_ones()] += 1;
    }
    Ok(counts)
}

/// `P(v in U)` for `v` drawn from `model`, summed over the span of `basis`
/// grouped by weight. The terms are nonnegative, so the relative rounding
/// error stays below `2^k` machine epsilons.
pub fn membership_probability(model: &BiasedVectorModel, basis: &Gf2Basis) -> Result<f64> {
    if basis.len() != model.n {
        return Err(Error::LengthMismatch {
            expected: model.n,
            got: basis.len(),
        });
    }
    let counts = span_weight_counts(basis)?;
    let (p, q, n) = (model.p, 1.0 - model.p, model.n as i32);
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(w, &c)| c as f64 * p.powi(w as i32) * q.powi(n - w as i32))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipCheck {
    pub probability: f64,
    /// `eta^(n - k)`.
    pub bound: f64,
    pub holds: bool,
}

pub fn check_membership_bound(model: &BiasedVectorModel, basis: &Gf2Basis) -> Result<MembershipCheck> {
    let probability = membership_probability(model, basis)?;
    let bound = model.eta.powi((model.n - basis.dimension()) as i32);
    Ok(MembershipCheck {
        probability,
        bound,
        holds: probability <= bound + BOUND_SLACK,
    })
}

/// A `k1 x k2` matrix with independent entries, each 1 with probability `p`,
/// filled row by row from a ChaCha8 stream.
pub fn sample_random_matrix(k1: usize, k2: usize, p: f64, seed: u64) -> Result<BitMatrix> {
    let coin = Bernoulli::new(p).map_err(|_| Error::invalid(format!("entry probability {p} not in [0, 1]")))?;
    let mut rng = rng_from_seed(seed);
    let mut m = BitMatrix::zeros(k1, k2);
    for i in 0..k1 {
        for j in 0..k2 {
            if coin.sample(&mut rng) {
                m.set(i, j, true);
            }
        }
    }
    Ok(m)
}

/// A `k`-dimensional subspace of `F_2^n`: rows of uniform `k x n` matrices,
/// redrawn with the next derived seed until the rank is `k`.
pub fn random_subspace(n: usize, k: usize, seed: u64) -> Result<Gf2Basis> {
    if k > n {
        return Err(Error::invalid(format!("dimension {k} exceeds ambient dimension {n}")));
    }
    for attempt in 0.. {
        let m = sample_random_matrix(k, n, 0.5, derive_seed(seed, attempt))?;
        let basis = m.echelonize();
        if basis.dimension() == k {
            return Ok(basis);
        }
    }
    unreachable!()
}

fn matrix_rank(m: &BitMatrix) -> usize {
    if m.n_cols() <= 64 {
        rank_of_words((0..m.n_rows()).map(|i| m.row(i).first().copied().unwrap_or(0)))
    } else {
        m.rank()
    }
}

/// One-sided upper confidence limit for a binomial proportion after
/// `successes` out of `trials`, at the given confidence (e.g. 0.99).
pub fn clopper_pearson_upper(successes: u64, trials: u64, confidence: f64) -> f64 {
    assert!(trials > 0 && successes <= trials);
    if successes == trials {
        return 1.0;
    }
    if successes == 0 {
        return 1.0 - (1.0 - confidence).powf(1.0 / trials as f64);
    }
    Beta::new(successes as f64 + 1.0, (trials - successes) as f64)
        .expect("positive shape parameters")
        .inverse_cdf(confidence)
}

/// Parameters of the rank-defect experiment on `ceil(n/3) x ceil(n/2)`
/// random matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectTailConfig {
    pub n: usize,
    pub p: f64,
    pub c: f64,
    /// `ceil(c / log2(1/eta))`.
    pub alpha: usize,
    pub samples: u64,
    pub seed: u64,
}

impl DefectTailConfig {
    pub fn new(n: usize, p: f64, c: f64, samples: u64, seed: u64) -> Result<Self> {
        let model = BiasedVectorModel::new(n, p)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("C must be positive, got {c}")));
        }
        if samples == 0 {
            return Err(Error::invalid("need at least one sample"));
        }
        let alpha = (c / (1.0 / model.eta).log2()).ceil() as usize;
        if alpha > n.div_ceil(3) {
            return Err(Error::invalid(format!(
                "alpha = {alpha} exceeds ceil(n/3) = {} for n = {n}",
                n.div_ceil(3)
            )));
        }
        Ok(DefectTailConfig {
            n,
            p,
            c,
            alpha,
            samples,
            seed,
        })
    }

    pub fn rows(&self) -> usize {
        self.n.div_ceil(3)
    }

    pub fn cols(&self) -> usize {
        self.n.div_ceil(2)
    }

    /// Largest rank counted as a defect.
    pub fn defect_rank(&self) -> usize {
        self.rows() - self.alpha
    }

    /// `2^((1/2 - C/6) n)`.
    pub fn tail_bound(&self) -> f64 {
        ((0.5 - self.c / 6.0) * self.n as f64).exp2()
    }
}

/// One CSV row of a defect-tail or dense-sweep run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRecord {
    pub n: usize,
    pub p: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub alpha: usize,
    pub samples: u64,
    pub empirical_freq: f64,
    pub clopper_pearson_ucl: f64,
    pub paper_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectTailResult {
    pub config: DefectTailConfig,
    pub defects: u64,
    pub empirical_freq: f64,
    pub clopper_pearson_ucl: f64,
    pub paper_bound: f64,
}

impl DefectTailResult {
    pub fn record(&self) -> DefectRecord {
        DefectRecord {
            n: self.config.n,
            p: self.config.p,
            c: self.config.c,
            alpha: self.config.alpha,
            samples: self.config.samples,
            empirical_freq: self.empirical_freq,
            clopper_pearson_ucl: self.clopper_pearson_ucl,
            paper_bound: self.paper_bound,
        }
    }
}

/// Counts samples whose rank is at most `ceil(n/3) - alpha`. Sample `i` uses
/// seed `derive_seed(cfg.seed, i)`, so the count does not depend on how the
/// samples are scheduled.
pub fn defect_tail_experiment(cfg: &DefectTailConfig) -> Result<DefectTailResult> {
    let limit = cfg.defect_rank();
    let defects = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let m = sample_random_matrix(cfg.rows(), cfg.cols(), cfg.p, derive_seed(cfg.seed, i))?;
            Ok(u64::from(matrix_rank(&m) <= limit))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(DefectTailResult {
        config: *cfg,
        defects,
        empirical_freq: defects as f64 / cfg.samples as f64,
        clopper_pearson_ucl: clopper_pearson_upper(defects, cfg.samples, 0.99),
        paper_bound: cfg.tail_bound(),
    })
}

/// Frequency of `rw(G(n, p)) <= ceil(n/3) - c / log2(1/eta)` for each `n`,
/// next to `2^(-0.015 n)`. Graph `i` at size `n` is sampled with seed
/// `derive_seed(derive_seed(seed, n), i)`. When the threshold is negative no
/// width is computed: the frequency is 0.
pub fn dense_defect_sweep(n_list: &[usize], p: f64, c: f64, samples: u64, seed: u64) -> Result<Vec<DefectRecord>> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n > DEFAULT_CAP {
            return Err(Error::Capacity {
                what: "rank-width",
                n,
                cap: DEFAULT_CAP,
            });
        }
        let model = BiasedVectorModel::new(n, p)?;
        let shift = c / (1.0 / model.eta).log2();
        let threshold = n.div_ceil(3) as f64 - shift;
        let base = derive_seed(seed, n as u64);
        let hits = if threshold < 0.0 {
            0
        } else {
            (0..samples)
                .into_par_iter()
                .map(|i| {
                    let g = sample_gnp(&GnpConfig::new(n, p, derive_seed(base, i))?);
                    let rw = rank_width_capped(&g, false, DEFAULT_CAP)?.width;
                    Ok(u64::from(rw as f64 <= threshold))
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?
        };
        out.push(DefectRecord {
            n,
            p,
            c,
            alpha: shift.ceil() as usize,
            samples,
            empirical_freq: hits as f64 / samples as f64,
            clopper_pearson_ucl: clopper_pearson_upper(hits, samples, 0.99),
            paper_bound: (-0.015 * n as f64).exp2(),
        });
    }
    Ok(out)
}

pub fn write_defect_records_to<W: Write>(records: &[DefectRecord], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(["n", "p", "C", "alpha", "samples", "empirical_freq", "clopper_pearson_ucl", "paper_bound"])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_defect_records(records: &[DefectRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_defect_records_to(records, file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Number of `k1 x k2` matrices of each rank, by enumerating all of them.
pub fn exhaustive_rank_counts(k1: usize, k2: usize) -> Result<Vec<u64>> {
    let cells = k1 * k2;
    if cells > 24 || k2 > 64 {
        return Err(Error::Capacity {
            what: "rank enumeration cells",
            n: cells,
            cap: 24,
        });
    }
    let mut counts = vec![0u64; k1.min(k2) + 1];
    let row_mask = if k2 == 64 { u64::MAX } else { (1u64 << k2) - 1 };
    for bits in 0u64..(1u64 << cells) {
        let rank = rank_of_words((0..k1).map(|i| bits >> (i * k2) & row_mask));
        counts[rank] += 1;
    }
    Ok(counts)
}

/// Pearson chi-square comparison of sampled ranks against exact counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub df: usize,
    /// 99.9% quantile of the chi-square distribution with `df` degrees.
    pub critical: f64,
}

impl ChiSquareTest {
    pub fn passes(&self) -> bool {
        self.statistic <= self.critical
    }
}

/// Samples `samples` uniform `k1 x k2` matrices (sample `i` with seed
/// `derive_seed(seed, i)`) and tests their rank histogram.
pub fn rank_distribution_test(k1: usize, k2: usize, samples: u64, seed: u64) -> Result<ChiSquareTest> {
    let exact = exhaustive_rank_counts(k1, k2)?;
    let total: u64 = exact.iter().sum();
    let observed = (0..samples)
        .into_par_iter()
        .map(|i| {
            let m = sample_random_matrix(k1, k2, 0.5, derive_seed(seed, i))?;
            let mut h = vec![0u64; exact.len()];
            h[matrix_rank(&m)] += 1;
            Ok(h)
        })
        .try_reduce(
            || vec![0u64; exact.len()],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let expected: Vec<f64> = exact.iter().map(|&c| c as f64 / total as f64 * samples as f64).collect();
    let statistic = observed
        .iter()
        .zip(&expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let df = exact.iter().filter(|&&c| c > 0).count().saturating_sub(1).max(1);
    let critical = ChiSquared::new(df as f64).expect("positive degrees of freedom").inverse_cdf(0.999);
    Ok(ChiSquareTest {
        observed,
        expected,
        statistic,
        df,
        critical,
    })
}
