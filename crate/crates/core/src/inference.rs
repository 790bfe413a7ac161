//! Comparing the variability of two samples that share a metric.
//!
//! The statistic is the ratio of the two p = 2 Fréchet variabilities. Its
//! null distribution is built by pooling both samples and re-splitting them
//! at random (or exhaustively, for small pools), re-minimizing each side.
//!
//! Extremity is two-sided on the log scale: a resample counts when
//! `|ln r*| >= |ln r_obs|`. Monte Carlo p-values use the add-one correction
//! `(hits + 1) / (valid + 1)` so they are never zero; exhaustive enumeration
//! includes the observed split and reports `hits / valid`.
//!
//! Randomness is a ChaCha8 stream per fixed-size batch of resamples, keyed
//! by the master seed and the batch number, so results do not depend on how
//! batches are scheduled across threads.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::frechet::{exact_sum_from, minimize_over_candidates, pow_distance};
use crate::metric::Metric;

/// Largest number of splits enumerated in exact mode.
pub const EXACT_LIMIT: u128 = 100_000;
/// Resamples drawn from one RNG stream.
pub const BATCH_SIZE: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum Candidates<T> {
    /// Each (pseudo-)sample is minimized over its own points.
    OwnPoints,
    /// Every (pseudo-)sample is minimized over this fixed set.
    Fixed(Vec<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Minimizer {
    /// Numerator and denominator each use their own minimizer.
    #[default]
    PerSample,
    /// Experimental: one minimizer of the pooled sample is shared by
    /// numerator and denominator.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermMode {
    /// Exact when the number of splits is at most [`EXACT_LIMIT`].
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermTestConfig<T> {
    pub resamples: usize,
    pub seed: u64,
    pub mode: PermMode,
    pub candidates: Candidates<T>,
    pub minimizer: Minimizer,
    pub exec: Exec,
}

impl<T> PermTestConfig<T> {
    pub fn new(resamples: usize, seed: u64) -> Self {
        PermTestConfig {
            resamples,
            seed,
            mode: PermMode::MonteCarlo,
            candidates: Candidates::OwnPoints,
            minimizer: Minimizer::PerSample,
            exec: Exec::default(),
        }
    }

    pub fn mode(mut self, mode: PermMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn candidates(mut self, candidates: Candidates<T>) -> Self {
        self.candidates = candidates;
        self
    }

    pub fn minimizer(mut self, minimizer: Minimizer) -> Self {
        self.minimizer = minimizer;
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermTestResult {
    pub observed: f64,
    /// Resamples drawn, or splits enumerated in exact mode.
    pub resamples: usize,
    /// Resamples dropped because one side had zero variability.
    pub skipped: usize,
    pub p_value: f64,
    pub seed: u64,
    pub exact: bool,
}

impl PermTestResult {
    /// Single-line JSON record.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain record")
    }
}

/// `min_c Σ d(xᵢ, c)² / min_c Σ d(yⱼ, c)²`, each side over its own candidates.
pub fn ratio_statistic<T, M>(
    x: &[T],
    y: &[T],
    metric: &M,
    candidates_x: &[T],
    candidates_y: &[T],
) -> Result<f64>
where
    T: Clone + Sync,
    M: Metric<T> + ?Sized,
{
    let num = minimize_over_candidates(x, candidates_x, metric, 2.0)?.value;
    let den = minimize_over_candidates(y, candidates_y, metric, 2.0)?.value;
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(num / den)
}

pub fn permutation_test<T, M>(x: &[T], y: &[T], metric: &M, resamples: usize, seed: u64) -> Result<PermTestResult>
where
    T: Clone + Sync,
    M: Metric<T> + ?Sized,
{
    permutation_test_with(x, y, metric, &PermTestConfig::new(resamples, seed))
}

/// Number of ways to choose `k` of `n`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Squared distances from each pooled point to each candidate.
struct SplitEvaluator {
    pool: usize,
    cands: usize,
    sq: Vec<f64>,
    exact: Option<Vec<u64>>,
    /// Candidate `k` is pool point `k` (own-points rule).
    own: bool,
    minimizer: Minimizer,
    pooled_choice: usize,
}

impl SplitEvaluator {
    fn new<T, M>(pool: &[T], cands: Option<&[T]>, metric: &M, minimizer: Minimizer, exec: Exec) -> Self
    where
        T: Sync,
        M: Metric<T> + ?Sized,
    {
        let cand_list = cands.unwrap_or(pool);
        let k = cand_list.len();
        let rows: Vec<Vec<(f64, Option<u64>)>> = exec.map_range(pool.len(), |i| {
            cand_list
                .iter()
                .map(|c| match metric.exact_distance(&pool[i], c) {
                    Some(e) => (e as f64, Some(e)),
                    None => (metric.distance(&pool[i], c), None),
                })
                .collect()
        });
        let flat: Vec<(f64, Option<u64>)> = rows.concat();
        let exact = flat
            .iter()
            .map(|&(_, e)| e.and_then(|e| e.checked_mul(e)))
            .collect::<Option<Vec<u64>>>();
        let mut ev = SplitEvaluator {
            pool: pool.len(),
            cands: k,
            sq: flat.iter().map(|&(d, _)| pow_distance(d, 2.0)).collect(),
            exact,
            own: cands.is_none(),
            minimizer,
            pooled_choice: 0,
        };
        if minimizer == Minimizer::Pooled {
            let everyone: Vec<usize> = (0..ev.pool).collect();
            ev.pooled_choice = ev.best_candidate(&everyone).0;
        }
        ev
    }

    fn side_sum(&self, members: &[usize], c: usize) -> (f64, Option<u128>) {
        if let Some(ex) = &self.exact {
            if let Some(s) = exact_sum_from(members.iter().map(|&i| Some(ex[i * self.cands + c])), 1) {
                return (s as f64, Some(s));
            }
        }
        (members.iter().map(|&i| self.sq[i * self.cands + c]).sum(), None)
    }

    /// First candidate minimizing the side sum, and that sum.
    fn best_candidate(&self, members: &[usize]) -> (usize, f64) {
        let range: Box<dyn Iterator<Item = usize>> = if self.own {
            Box::new(members.iter().copied())
        } else {
            Box::new(0..self.cands)
        };
        let mut best: Option<(usize, f64, Option<u128>)> = None;
        for c in range {
            let (s, e) = self.side_sum(members, c);
            let better = match best {
                None => true,
                Some((_, bs, be)) => match (e, be) {
                    (Some(e), Some(be)) => e < be,
                    _ => s < bs,
                },
            };
            if better {
                best = Some((c, s, e));
            }
        }
        let (c, s, _) = best.expect("nonempty side");
        (c, s)
    }

    fn side(&self, members: &[usize]) -> f64 {
        match self.minimizer {
            Minimizer::PerSample => self.best_candidate(members).1,
            Minimizer::Pooled => self.side_sum(members, self.pooled_choice).0,
        }
    }

    /// `(numerator, denominator)` for the split where `in_x` marks pseudo-x.
    fn split(&self, in_x: &[bool]) -> (f64, f64) {
        let (xs, ys): (Vec<usize>, Vec<usize>) = (0..self.pool).partition(|&i| in_x[i]);
        (self.side(&xs), self.side(&ys))
    }
}

fn log_extremity(r: f64) -> f64 {
    r.ln().abs()
}

fn is_extreme(candidate: f64, observed: f64) -> bool {
    if observed.is_infinite() {
        return candidate.is_infinite();
    }
    candidate >= observed - 1e-9 * observed.max(1.0)
}

pub fn permutation_test_with<T, M>(x: &[T], y: &[T], metric: &M, config: &PermTestConfig<T>) -> Result<PermTestResult>
where
    T: Clone + Sync,
    M: Metric<T> + ?Sized,
{
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Candidates::Fixed(c) = &config.candidates {
        if c.is_empty() {
            return Err(Error::NoCandidates);
        }
    }
    let (m, n) = (x.len(), y.len());
    let total = m + n;
    let splits = binomial(total, m);
    let exact = match config.mode {
        PermMode::Exact if splits > EXACT_LIMIT => {
            return Err(Error::InvalidPermTest(format!(
                "exact mode needs at most {EXACT_LIMIT} splits, this pool has {splits}"
            )))
        }
        PermMode::Exact => true,
        PermMode::Auto => splits <= EXACT_LIMIT,
        PermMode::MonteCarlo => false,
    };
    if !exact && config.resamples == 0 {
        return Err(Error::InvalidPermTest("resamples must be at least 1".into()));
    }

    let pool: Vec<T> = x.iter().chain(y).cloned().collect();
    let cands = match &config.candidates {
        Candidates::OwnPoints => None,
        Candidates::Fixed(c) => Some(c.as_slice()),
    };
    let ev = SplitEvaluator::new(&pool, cands, metric, config.minimizer, config.exec);

    let observed_mask: Vec<bool> = (0..total).map(|i| i < m).collect();
    let (num, den) = ev.split(&observed_mask);
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let observed = num / den;
    let obs_ext = log_extremity(observed);

    // Some(extremity) per resample, None when degenerate
    let stat = |mask: &[bool]| -> Option<f64> {
        let (a, b) = ev.split(mask);
        (a > 0.0 && b > 0.0).then(|| log_extremity(a / b))
    };

    let outcomes: Vec<Option<f64>> = if exact {
        let combos = combinations(total, m);
        config.exec.map(&combos, |c| {
            let mut mask = vec![false; total];
            for &i in c {
                mask[i as usize] = true;
            }
            stat(&mask)
        })
    } else {
        let batches = config.resamples.div_ceil(BATCH_SIZE);
        config
            .exec
            .map_range(batches, |b| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(b as u64);
                let count = BATCH_SIZE.min(config.resamples - b * BATCH_SIZE);
                (0..count)
                    .map(|_| {
                        let mut mask = vec![false; total];
                        for i in index::sample(&mut rng, total, m) {
                            mask[i] = true;
                        }
                        stat(&mask)
                    })
                    .collect::<Vec<_>>()
            })
            .concat()
    };

    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let valid = outcomes.len() - skipped;
    let hits = outcomes
        .iter()
        .flatten()
        .filter(|&&e| is_extreme(e, obs_ext))
        .count();
    let p_value = if exact {
        if valid == 0 {
            1.0
        } else {
            hits as f64 / valid as f64
        }
    } else {
        (hits + 1) as f64 / (valid + 1) as f64
    };
    Ok(PermTestResult {
        observed,
        resamples: outcomes.len(),
        skipped,
        p_value,
        seed: config.seed,
        exact,
    })
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut c: Vec<u32> = (0..k as u32).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] as usize != i + n - k) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}
