//! The Fréchet functional `f(c) = Σ d(xᵢ, c)^p` and its minimization over a
//! finite candidate set.
//!
//! The minimizers of `f` generalize the mean (p = 2) and the median (p = 1)
//! to any metric space; the minimum value is the variability of the sample.
//! Values are unnormalized unless [`FrechetOptions::normalized`] is set, in
//! which case they are divided by the sample size.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::metric::Metric;

/// Relative tolerance under which two functional values are considered tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// True when `value` ties with the reference minimum `min`.
pub fn ties_with(min: f64, value: f64) -> bool {
    (value - min).abs() <= TIE_TOLERANCE * min.abs().max(1.0)
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetOptions {
    pub exponent: f64,
    pub normalized: bool,
    pub exec: Exec,
}

impl FrechetOptions {
    pub fn new(exponent: f64) -> Self {
        FrechetOptions {
            exponent,
            normalized: false,
            exec: Exec::default(),
        }
    }

    pub fn normalized(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

/// Minimizers and minimum of the Fréchet functional over a candidate set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrechetResult<L> {
    /// Every candidate attaining the minimum, in candidate order.
    pub minimizers: Vec<L>,
    /// Positions of the minimizers in the candidate list.
    pub indices: Vec<usize>,
    pub value: f64,
    pub exponent: f64,
    pub normalized: bool,
    /// Unnormalized minimum in exact integer arithmetic, when the metric is
    /// integer-valued and p is 1 or 2.
    pub exact_sum: Option<u128>,
}

impl<L> FrechetResult<L> {
    pub fn map_minimizers<M>(self, f: impl FnMut(L) -> M) -> FrechetResult<M> {
        FrechetResult {
            minimizers: self.minimizers.into_iter().map(f).collect(),
            indices: self.indices,
            value: self.value,
            exponent: self.exponent,
            normalized: self.normalized,
            exact_sum: self.exact_sum,
        }
    }
}

/// One evaluation of the functional, before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Functional {
    pub sum: f64,
    pub exact: Option<u128>,
}

#[inline]
pub(crate) fn pow_distance(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

pub(crate) fn integer_exponent(p: f64) -> Option<u32> {
    if p == 1.0 {
        Some(1)
    } else if p == 2.0 {
        Some(2)
    } else {
        None
    }
}

pub(crate) fn exact_sum_from<I: IntoIterator<Item = Option<u64>>>(
    distances: I,
    power: u32,
) -> Option<u128> {
    let mut acc: u128 = 0;
    for d in distances {
        let d = d? as u128;
        acc = acc.checked_add(d.checked_pow(power)?)?;
    }
    Some(acc)
}

pub(crate) fn functional<T, M: Metric<T> + ?Sized>(
    sample: &[T],
    c: &T,
    metric: &M,
    p: f64,
) -> Functional {
    if let Some(power) = integer_exponent(p) {
        if let Some(exact) = exact_sum_from(sample.iter().map(|x| metric.exact_distance(x, c)), power)
        {
            return Functional {
                sum: exact as f64,
                exact: Some(exact),
            };
        }
    }
    let sum = sample
        .iter()
        .map(|x| pow_distance(metric.distance(x, c), p))
        .sum();
    Functional { sum, exact: None }
}

fn normalize(sum: f64, n: usize, normalized: bool) -> f64 {
    if normalized {
        sum / n as f64
    } else {
        sum
    }
}

/// `Σᵢ d(xᵢ, c)^p`, divided by n when `normalized`.
pub fn frechet_value<T, M: Metric<T> + ?Sized>(
    sample: &[T],
    c: &T,
    metric: &M,
    p: f64,
    normalized: bool,
) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    check_exponent(p)?;
    Ok(normalize(functional(sample, c, metric, p).sum, sample.len(), normalized))
}

/// Minimizes the unnormalized functional over `candidates`.
pub fn minimize_over_candidates<T: Clone + Sync, M: Metric<T> + ?Sized>(
    sample: &[T],
    candidates: &[T],
    metric: &M,
    p: f64,
) -> Result<FrechetResult<T>> {
    minimize_over_candidates_with(sample, candidates, metric, FrechetOptions::new(p))
}

pub fn minimize_over_candidates_with<T: Clone + Sync, M: Metric<T> + ?Sized>(
    sample: &[T],
    candidates: &[T],
    metric: &M,
    opts: FrechetOptions,
) -> Result<FrechetResult<T>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    check_exponent(opts.exponent)?;
    let values = opts
        .exec
        .map(candidates, |c| functional(sample, c, metric, opts.exponent));
    let indices = select_minimizers(&values);
    let best = values[indices[0]];
    Ok(FrechetResult {
        minimizers: indices.iter().map(|&i| candidates[i].clone()).collect(),
        value: normalize(best.sum, sample.len(), opts.normalized),
        exponent: opts.exponent,
        normalized: opts.normalized,
        exact_sum: best.exact,
        indices,
    })
}

/// Indices of all tied minima, in order. Exact values compare exactly; any
/// missing exact value falls back to the float tie tolerance.
pub(crate) fn select_minimizers(values: &[Functional]) -> Vec<usize> {
    if let Some(exact) = values.iter().map(|v| v.exact).collect::<Option<Vec<u128>>>() {
        let min = *exact.iter().min().expect("nonempty");
        return (0..exact.len()).filter(|&i| exact[i] == min).collect();
    }
    let min = values
        .iter()
        .map(|v| v.sum)
        .fold(f64::INFINITY, f64::min);
    (0..values.len())
        .filter(|&i| ties_with(min, values[i].sum))
        .collect()
}

/// Symmetric pairwise-distance matrix over an ordered candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix<L> {
    labels: Vec<L>,
    entries: Vec<f64>,
    exact: Option<Vec<u64>>,
}

/// First failure found by [`MetricMatrix::check_metric`].
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixViolation {
    NotSquare,
    Negative { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    ZeroOffDiagonal { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
}

/// Builds the matrix `M[i][j] = d(cᵢ, cⱼ)`, evaluating each unordered pair once.
pub fn distance_matrix<T, M>(candidates: &[T], metric: &M) -> Result<MetricMatrix<T>>
where
    T: Clone + PartialEq + Sync,
    M: Metric<T> + ?Sized,
{
    distance_matrix_with(candidates, metric, Exec::default())
}

pub fn distance_matrix_with<T, M>(candidates: &[T], metric: &M, exec: Exec) -> Result<MetricMatrix<T>>
where
    T: Clone + PartialEq + Sync,
    M: Metric<T> + ?Sized,
{
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let n = candidates.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if candidates[i] == candidates[j] {
                return Err(Error::DuplicateCandidate(i, j));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let computed = exec.map(&pairs, |&(i, j)| {
        let (a, b) = (&candidates[i], &candidates[j]);
        match metric.exact_distance(a, b) {
            Some(e) => (e as f64, Some(e)),
            None => (metric.distance(a, b), None),
        }
    });
    let all_exact = computed.iter().all(|(_, e)| e.is_some());
    let mut entries = vec![0.0; n * n];
    let mut exact = all_exact.then(|| vec![0u64; n * n]);
    for (&(i, j), &(d, e)) in pairs.iter().zip(&computed) {
        entries[i * n + j] = d;
        entries[j * n + i] = d;
        if let (Some(ex), Some(e)) = (exact.as_mut(), e) {
            ex[i * n + j] = e;
            ex[j * n + i] = e;
        }
    }
    Ok(MetricMatrix {
        labels: candidates.to_vec(),
        entries,
        exact,
    })
}

impl<L> MetricMatrix<L> {
    /// Builds a matrix from explicit row-major entries. No invariants are
    /// enforced; use [`MetricMatrix::check_metric`].
    pub fn from_entries(labels: Vec<L>, entries: Vec<f64>) -> Self {
        MetricMatrix {
            labels,
            entries,
            exact: None,
        }
    }

    pub(crate) fn from_exact(labels: Vec<L>, exact: Vec<u64>) -> Self {
        MetricMatrix {
            labels,
            entries: exact.iter().map(|&e| e as f64).collect(),
            exact: Some(exact),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.len() + j]
    }

    pub fn exact(&self, i: usize, j: usize) -> Option<u64> {
        self.exact.as_ref().map(|e| e[i * self.len() + j])
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn is_integral(&self) -> bool {
        self.exact.is_some()
    }

    pub fn map_labels<M>(self, f: impl FnMut(L) -> M) -> MetricMatrix<M> {
        MetricMatrix {
            labels: self.labels.into_iter().map(f).collect(),
            entries: self.entries,
            exact: self.exact,
        }
    }

    /// Principal submatrix on the given rows/columns, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> MetricMatrix<L>
    where
        L: Clone,
    {
        let n = self.len();
        let pick = |src: &[f64]| -> Vec<f64> {
            idx.iter()
                .flat_map(|&i| idx.iter().map(move |&j| src[i * n + j]))
                .collect()
        };
        MetricMatrix {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            entries: pick(&self.entries),
            exact: self.exact.as_ref().map(|ex| {
                idx.iter()
                    .flat_map(|&i| idx.iter().map(move |&j| ex[i * n + j]))
                    .collect()
            }),
        }
    }

    /// `Σⱼ M[i][j]^p` for every row, i.e. the functional with the matrix
    /// labels as both sample and candidates.
    pub fn row_functional(&self, p: f64) -> Result<Vec<f64>> {
        Ok(self.row_values(p)?.into_iter().map(|v| v.sum).collect())
    }

    fn row_values(&self, p: f64) -> Result<Vec<Functional>> {
        check_exponent(p)?;
        let n = self.len();
        Ok((0..n)
            .map(|i| {
                let exact = match (&self.exact, integer_exponent(p)) {
                    (Some(ex), Some(power)) => {
                        exact_sum_from(ex[i * n..(i + 1) * n].iter().map(|&e| Some(e)), power)
                    }
                    _ => None,
                };
                match exact {
                    Some(e) => Functional {
                        sum: e as f64,
                        exact: Some(e),
                    },
                    None => Functional {
                        sum: self.row(i).iter().map(|&d| pow_distance(d, p)).sum(),
                        exact: None,
                    },
                }
            })
            .collect())
    }

    /// Row-minimum convention: the labels serve as both sample and candidates.
    pub fn minimize_rows(&self, opts: FrechetOptions) -> Result<FrechetResult<L>>
    where
        L: Clone,
    {
        if self.is_empty() {
            return Err(Error::NoCandidates);
        }
        let values = self.row_values(opts.exponent)?;
        let indices = select_minimizers(&values);
        let best = values[indices[0]];
        Ok(FrechetResult {
            minimizers: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            value: normalize(best.sum, self.len(), opts.normalized),
            exponent: opts.exponent,
            normalized: opts.normalized,
            exact_sum: best.exact,
            indices,
        })
    }

    /// Checks symmetry, zero diagonal, positivity off the diagonal, and the
    /// triangle inequality over every triple.
    pub fn check_metric(&self) -> std::result::Result<(), MatrixViolation> {
        let n = self.len();
        if self.entries.len() != n * n {
            return Err(MatrixViolation::NotSquare);
        }
        let scale = self.entries.iter().fold(1.0f64, |m, &d| m.max(d.abs()));
        let slack = 1e-12 * scale;
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(MatrixViolation::NonzeroDiagonal { i });
            }
            for j in 0..n {
                let d = self.get(i, j);
                if d < 0.0 || d.is_nan() {
                    return Err(MatrixViolation::Negative { i, j });
                }
                if i != j && d == 0.0 {
                    return Err(MatrixViolation::ZeroOffDiagonal { i, j });
                }
                if d != self.get(j, i) {
                    return Err(MatrixViolation::Asymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.get(i, j);
                for k in 0..n {
                    if self.get(i, k) > dij + self.get(j, k) + slack {
                        return Err(MatrixViolation::Triangle { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }
}

impl<L: std::fmt::Display> MetricMatrix<L> {
    /// Tab-separated matrix with a header row and a leading label column.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            out.push('\t');
            out.push_str(&l.to_string());
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&l.to_string());
            for j in 0..self.len() {
                out.push('\t');
                match self.exact(i, j) {
                    Some(e) => out.push_str(&e.to_string()),
                    None => out.push_str(&crate::format::number(self.get(i, j))),
                }
            }
            out.push('\n');
        }
        out
    }
}
