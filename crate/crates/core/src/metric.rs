//! Distance functions over a point domain.

/// A pure distance function `d(a, b)`.
///
/// Implementations must be stateless: the same pair always yields the same
/// distance, from any thread. Metrics whose distances are always whole
/// numbers (edit distance, word metric) override [`Metric::exact_distance`]
/// so that functionals at p = 1 and p = 2 can be summed exactly.
pub trait Metric<T>: Sync {
    fn distance(&self, a: &T, b: &T) -> f64;

    fn exact_distance(&self, _a: &T, _b: &T) -> Option<u64> {
        None
    }
}

impl<T, M: Metric<T> + ?Sized> Metric<T> for &M {
    fn distance(&self, a: &T, b: &T) -> f64 {
        (**self).distance(a, b)
    }

    fn exact_distance(&self, a: &T, b: &T) -> Option<u64> {
        (**self).exact_distance(a, b)
    }
}

/// `|a - b|` on the real line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Line;

impl Metric<f64> for Line {
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
}

/// Wraps a closure as a metric. The caller vouches for the metric axioms.
#[derive(Clone, Copy)]
pub struct FnMetric<F>(pub F);

impl<T, F> Metric<T> for FnMetric<F>
where
    F: Fn(&T, &T) -> f64 + Sync,
{
    fn distance(&self, a: &T, b: &T) -> f64 {
        (self.0)(a, b)
    }
}

/// Wraps an integer-valued closure; distances participate in exact sums.
#[derive(Clone, Copy)]
pub struct IntMetric<F>(pub F);

impl<T, F> Metric<T> for IntMetric<F>
where
    F: Fn(&T, &T) -> u64 + Sync,
{
    fn distance(&self, a: &T, b: &T) -> f64 {
        (self.0)(a, b) as f64
    }

    fn exact_distance(&self, a: &T, b: &T) -> Option<u64> {
        Some((self.0)(a, b))
    }
}
