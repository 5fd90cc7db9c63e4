//! Monte Carlo accumulators and a deterministic parallel trial runner.
//!
//! Trials are cut into fixed-size chunks. Each chunk is accumulated
//! sequentially and the chunk results are merged in chunk order, so estimates
//! are bit-identical whatever the worker count.

use rayon::prelude::*;
use serde::Serialize;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "ALLOC2MECH_WORKERS";

const CHUNK: u64 = 4096;

/// Streaming mean and variance (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.n as f64 * w;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance; zero below two observations.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self) -> MCEstimate {
        MCEstimate {
            mean: self.mean(),
            stderr: self.stderr(),
            trials: self.n,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl MCEstimate {
    /// `|mean - target| <= k · stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }

    /// Signed distance to `target` in standard errors.
    pub fn z(&self, target: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.mean == target {
                0.0
            } else {
                (self.mean - target).signum() * f64::INFINITY
            }
        } else {
            (self.mean - target) / self.stderr
        }
    }
}

/// Two independent estimates agree within `k` combined standard errors.
pub fn agree(a: &MCEstimate, b: &MCEstimate, k: f64) -> bool {
    (a.mean - b.mean).abs() <= k * a.stderr.hypot(b.stderr)
}

/// State that can absorb another chunk's state.
pub trait Merge: Send {
    fn merge(&mut self, other: Self);
}

impl Merge for Welford {
    fn merge(&mut self, other: Self) {
        Welford::merge(self, &other);
    }
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, other: Self) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

impl Merge for u64 {
    fn merge(&mut self, other: Self) {
        *self += other;
    }
}

impl<A: Merge, B: Merge> Merge for (A, B) {
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
    }
}

/// Empirical CDF on a fixed grid of `bins` equal cells over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedCdf {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    total: u64,
}

impl BinnedCdf {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        BinnedCdf {
            lo,
            hi,
            counts: vec![0; bins],
            total: 0,
        }
    }

    pub fn push(&mut self, v: f64) {
        let bins = self.counts.len();
        let k = ((v - self.lo) / (self.hi - self.lo) * bins as f64).floor();
        let k = if k.is_nan() {
            0.0
        } else {
            k.clamp(0.0, (bins - 1) as f64)
        };
        self.counts[k as usize] += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// CDF at the right edge of every cell.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0u64;
        self.counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / self.total.max(1) as f64
            })
            .collect()
    }

    /// Sup distance between two binned CDFs on the same grid.
    pub fn sup_distance(&self, other: &BinnedCdf) -> f64 {
        self.cdf()
            .iter()
            .zip(other.cdf())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Sup distance to an exact CDF evaluated at the cell edges.
    pub fn sup_distance_to(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let width = (self.hi - self.lo) / self.counts.len() as f64;
        self.cdf()
            .iter()
            .enumerate()
            .map(|(k, f)| (f - cdf(self.lo + width * (k + 1) as f64)).abs())
            .fold(0.0, f64::max)
    }
}

impl Merge for BinnedCdf {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.total += other.total;
    }
}

/// Two-sample sup distance between empirical CDFs of sorted samples. Ties
/// and atoms are handled exactly.
pub fn sup_distance_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() || j < b.len() {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Runs Monte Carlo trials on a dedicated pool.
pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    pub fn with_workers(workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        Runner { pool, workers }
    }

    /// Worker count from the environment, defaulting to the available
    /// parallelism.
    pub fn from_env() -> Result<Self, String> {
        let workers = match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&w| w > 0)
                .ok_or_else(|| format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(Self::with_workers(workers))
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Folds `step` over trials `0..trials`. The result does not depend on
    /// the worker count.
    pub fn fold<A, I, F>(&self, trials: u64, init: I, step: F) -> A
    where
        A: Merge,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, u64) + Sync,
    {
        let chunks = trials.div_ceil(CHUNK);
        let parts: Vec<A> = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = init();
                    for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                        step(&mut acc, t);
                    }
                    acc
                })
                .collect()
        });
        let mut it = parts.into_iter();
        let mut acc = it.next().unwrap_or_else(&init);
        for p in it {
            acc.merge(p);
        }
        acc
    }

    /// Like [`Runner::fold`] but stops at the first failing trial. The error
    /// reported is the one with the smallest trial index.
    pub fn try_fold<A, E, I, F>(&self, trials: u64, init: I, step: F) -> Result<A, (u64, E)>
    where
        A: Merge,
        E: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, u64) -> Result<(), E> + Sync,
    {
        let chunks = trials.div_ceil(CHUNK);
        let parts: Vec<Result<A, (u64, E)>> = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = init();
                    for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                        step(&mut acc, t).map_err(|e| (t, e))?;
                    }
                    Ok(acc)
                })
                .collect()
        });
        let mut acc = init();
        for p in parts {
            acc.merge(p?);
        }
        Ok(acc)
    }

    /// Parallel map preserving order.
    pub fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }
}
