//! Angles on the circle: shortest-arc distance, the classical resultant
//! mean, and continuous minimization of the Fréchet functional.
//!
//! The functional is sampled on a uniform grid over (−π, π]; each grid basin
//! is then refined by golden-section search. For p = 1 the functional can be
//! flat between data points; such basins are reported as arcs whose
//! endpoints are located by bisection, or read off the breakpoints of the
//! piecewise-linear functional when the arc is narrower than the grid.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::frechet::{self, check_exponent, pow_distance, ties_with, FrechetOptions, FrechetResult};
use crate::metric::Metric;

pub const MIN_RESOLUTION: usize = 360;
pub const DEFAULT_RESOLUTION: usize = 3600;
/// Golden-section stopping width, in radians.
pub const REFINE_TOLERANCE: f64 = 1e-6;
/// Resultant length at or below which no mean direction exists.
pub const NO_DIRECTION_THRESHOLD: f64 = 1e-12;

/// An angle in radians, canonicalized to (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Self {
        Angle(canonicalize(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn rotate(self, delta: f64) -> Self {
        Angle::new(self.0 + delta)
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle::new(radians)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::number(self.0))
    }
}

pub fn canonicalize(radians: f64) -> f64 {
    let r = radians.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn raw_distance(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs().rem_euclid(TAU);
    diff.min(TAU - diff)
}

/// `min(|θ₁ − θ₂|, 2π − |θ₁ − θ₂|)`, always in [0, π].
pub fn circ_distance(a: Angle, b: Angle) -> f64 {
    raw_distance(a.0, b.0)
}

/// Shortest-arc metric on the circle.
#[derive(Debug, Clone, Copy, Default)]
pub struct Circular;

impl Metric<Angle> for Circular {
    fn distance(&self, a: &Angle, b: &Angle) -> f64 {
        circ_distance(*a, *b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resultant {
    pub x: f64,
    pub y: f64,
}

impl Resultant {
    pub fn length(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    Angle(Angle),
    NoDirection,
}

/// Sum of the unit vectors `e^{iθ}`.
pub fn resultant(sample: &[Angle]) -> Result<Resultant> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let (x, y) = sample
        .iter()
        .fold((0.0, 0.0), |(x, y), a| (x + a.0.cos(), y + a.0.sin()));
    Ok(Resultant { x, y })
}

/// Direction of the resultant vector, or `NoDirection` when it vanishes.
pub fn resultant_mean(sample: &[Angle]) -> Result<Direction> {
    let r = resultant(sample)?;
    if r.length() <= NO_DIRECTION_THRESHOLD {
        Ok(Direction::NoDirection)
    } else {
        Ok(Direction::Angle(Angle::new(r.y.atan2(r.x))))
    }
}

/// Arithmetic mean of the raw angle values, ignoring circularity. Only
/// useful as a contrast with the intrinsic estimates.
pub fn naive_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// The functional sampled over a full period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularProfile {
    pub points: Vec<(f64, f64)>,
}

impl CircularProfile {
    /// One `angle<TAB>value` line per grid point.
    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 20);
        for &(a, v) in &self.points {
            out.push_str(&crate::format::number(a));
            out.push('\t');
            out.push_str(&crate::format::number(v));
            out.push('\n');
        }
        out
    }
}

/// A global minimizer: an isolated point or a flat arc running
/// counterclockwise from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CircularMinimum {
    Point { angle: Angle },
    Arc { start: Angle, end: Angle },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMinimum {
    pub angle: Angle,
    pub value: f64,
    pub flat: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularFrechet {
    /// Point minimizers, or both endpoints of each minimizing arc.
    pub result: FrechetResult<Angle>,
    pub minima: Vec<CircularMinimum>,
    /// Every refined basin of the profile, global or not.
    pub local_minima: Vec<LocalMinimum>,
    pub profile: CircularProfile,
}

pub fn circular_frechet(sample: &[Angle], p: f64, resolution: usize) -> Result<CircularFrechet> {
    circular_frechet_with(sample, FrechetOptions::new(p), resolution)
}

pub fn circular_frechet_with(
    sample: &[Angle],
    opts: FrechetOptions,
    resolution: usize,
) -> Result<CircularFrechet> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    check_exponent(opts.exponent)?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidResolution(resolution));
    }
    let p = opts.exponent;
    let f = |theta: f64| -> f64 {
        sample
            .iter()
            .map(|x| pow_distance(raw_distance(x.0, theta), p))
            .sum()
    };

    let step = TAU / resolution as f64;
    let grid_angle = |k: usize| -PI + step * (k + 1) as f64;
    let values = profile_values(opts.exec, resolution, &grid_angle, &f);

    let basins = find_basins(&values);
    let (local, shapes): (Vec<LocalMinimum>, Vec<CircularMinimum>) = opts
        .exec
        .map(&basins, |basin| refine_basin(basin, &values, step, &grid_angle, sample, &f, p == 1.0))
        .into_iter()
        .unzip();

    let global = local
        .iter()
        .map(|m| m.value)
        .fold(f64::INFINITY, f64::min);
    let mut minima = Vec::new();
    let mut minimizers = Vec::new();
    let mut indices = Vec::new();
    for ((m, shape), basin) in local.iter().zip(&shapes).zip(&basins) {
        if !ties_with(global, m.value) {
            continue;
        }
        minima.push(*shape);
        match *shape {
            CircularMinimum::Point { angle } => {
                minimizers.push(angle);
                indices.push(basin.start);
            }
            CircularMinimum::Arc { start, end } => {
                minimizers.extend([start, end]);
                indices.extend([basin.start, basin.end]);
            }
        }
    }

    let scale = if opts.normalized { sample.len() as f64 } else { 1.0 };
    Ok(CircularFrechet {
        result: FrechetResult {
            minimizers,
            indices,
            value: global / scale,
            exponent: p,
            normalized: opts.normalized,
            exact_sum: None,
        },
        minima,
        local_minima: local
            .into_iter()
            .map(|m| LocalMinimum {
                value: m.value / scale,
                ..m
            })
            .collect(),
        profile: CircularProfile {
            points: values
                .iter()
                .enumerate()
                .map(|(k, &v)| (grid_angle(k), v / scale))
                .collect(),
        },
    })
}

fn profile_values(
    exec: Exec,
    resolution: usize,
    grid_angle: &(impl Fn(usize) -> f64 + Sync),
    f: &(impl Fn(f64) -> f64 + Sync),
) -> Vec<f64> {
    exec.map_range(resolution, |k| f(grid_angle(k)))
}

/// A maximal cyclic run of tied grid values lying strictly below both
/// neighbours. `start..=end` may wrap past the last grid index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Basin {
    start: usize,
    end: usize,
    len: usize,
}

fn find_basins(values: &[f64]) -> Vec<Basin> {
    let n = values.len();
    let tied = |i: usize, j: usize| ties_with(values[i].min(values[j]), values[i].max(values[j]));
    let prev = |i: usize| (i + n - 1) % n;
    let Some(first) = (0..n).find(|&i| !tied(prev(i), i)) else {
        // constant profile: the whole circle minimizes
        return vec![Basin {
            start: 0,
            end: n - 1,
            len: n,
        }];
    };
    let mut runs = Vec::new();
    let mut offset = 0;
    while offset < n {
        let start = (first + offset) % n;
        let mut len = 1;
        while offset + len < n && tied((start + len - 1) % n, (start + len) % n) {
            len += 1;
        }
        runs.push(Basin {
            start,
            end: (start + len - 1) % n,
            len,
        });
        offset += len;
    }
    runs.into_iter()
        .filter(|r| {
            let v = values[r.start];
            values[prev(r.start)] > v && values[(r.end + 1) % n] > v
        })
        .collect()
}

fn golden_section(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > REFINE_TOLERANCE {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Pushes `inside` (which ties with `level`) towards `outside` (which does
/// not) until the boundary of the flat region is pinned to 1e-12 radians.
fn flat_boundary(f: &impl Fn(f64) -> f64, level: f64, mut inside: f64, mut outside: f64) -> f64 {
    while (outside - inside).abs() > 1e-12 {
        let mid = 0.5 * (inside + outside);
        if ties_with(level, f(mid)) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Replaces `theta` by a data point within `radius` when that point does at
/// least as well; the functional has kinks at data points for p = 1.
fn snap_to_data(f: &impl Fn(f64) -> f64, sample: &[Angle], theta: f64, value: f64, radius: f64) -> (f64, f64) {
    let mut best = (theta, value);
    for x in sample {
        let gap = raw_distance(x.0, theta);
        if gap <= radius {
            let fx = f(x.0);
            if fx <= best.1 || ties_with(fx, best.1) && gap <= REFINE_TOLERANCE {
                best = (x.0, fx);
            }
        }
    }
    best
}

/// Finds the flat run through the best point of a basin window, which the
/// grid cannot resolve when it is narrower than two steps. At p = 1 the
/// functional is linear between data points and their antipodes, so the run
/// is a chain of such breakpoints inside the window whose values and
/// midpoints all tie. Returns `lo == hi` for an isolated minimum; otherwise
/// the run goes counterclockwise from `lo` to `hi`.
fn breakpoint_run(
    f: &impl Fn(f64) -> f64,
    sample: &[Angle],
    x: f64,
    fx: f64,
    window_lo: f64,
    window_hi: f64,
) -> (f64, f64, f64) {
    let centre = 0.5 * (window_lo + window_hi);
    let unwrap = |theta: f64| centre + canonicalize(theta - centre);
    // (unwrapped position, original angle, value)
    let mut points: Vec<(f64, f64, f64)> = sample
        .iter()
        .flat_map(|a| [a.0, canonicalize(a.0 + PI)])
        .map(|t| (unwrap(t), t))
        .filter(|&(u, _)| window_lo < u && u < window_hi)
        .map(|(u, t)| (u, t, f(t)))
        .collect();
    points.push((unwrap(x), x, fx));
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    let level = points.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let best = points.iter().position(|p| p.2 == level).unwrap_or(0);
    let flat = |i: usize, j: usize| {
        ties_with(level, points[j].2) && ties_with(level, f(0.5 * (points[i].0 + points[j].0)))
    };
    let mut lo = best;
    while lo > 0 && flat(lo, lo - 1) {
        lo -= 1;
    }
    let mut hi = best;
    while hi + 1 < points.len() && flat(hi, hi + 1) {
        hi += 1;
    }
    (points[lo].1, points[hi].1, level)
}

fn refine_basin(
    basin: &Basin,
    values: &[f64],
    step: f64,
    grid_angle: &impl Fn(usize) -> f64,
    sample: &[Angle],
    f: &impl Fn(f64) -> f64,
    piecewise_linear: bool,
) -> (LocalMinimum, CircularMinimum) {
    let start = grid_angle(basin.start);
    if basin.len == values.len() {
        let level = values[basin.start];
        let a = Angle::new(start);
        let b = Angle::new(grid_angle(basin.end));
        return (
            LocalMinimum { angle: a, value: level, flat: true },
            CircularMinimum::Arc { start: a, end: b },
        );
    }
    // unwrap so that `end` follows `start` counterclockwise
    let end = start + step * (basin.len - 1) as f64;
    let level = (0..basin.len)
        .map(|i| values[(basin.start + i) % values.len()])
        .fold(f64::INFINITY, f64::min);
    let (x, fx) = golden_section(f, start - step, end + step);
    let (x, fx) = if level < fx { (start, level) } else { (x, fx) };
    let (x, fx) = snap_to_data(f, sample, x, fx, step);
    // a tied pair of grid values can straddle an isolated minimum
    if basin.len == 1 || !ties_with(fx, level) {
        let (lo, hi, fx) = if piecewise_linear {
            breakpoint_run(f, sample, x, fx, start - step, end + step)
        } else {
            (x, x, fx)
        };
        let (a, b) = (Angle::new(lo), Angle::new(hi));
        let shape = if lo != hi {
            CircularMinimum::Arc { start: a, end: b }
        } else {
            CircularMinimum::Point { angle: a }
        };
        return (LocalMinimum { angle: a, value: fx, flat: lo != hi }, shape);
    }
    let lo = flat_boundary(f, level, start, start - step);
    let hi = flat_boundary(f, level, end, end + step);
    let (lo, _) = snap_to_data(f, sample, lo, f(lo), REFINE_TOLERANCE);
    let (hi, _) = snap_to_data(f, sample, hi, f(hi), REFINE_TOLERANCE);
    let (a, b) = (Angle::new(lo), Angle::new(hi));
    (
        LocalMinimum { angle: a, value: f(lo).min(level), flat: true },
        CircularMinimum::Arc { start: a, end: b },
    )
}

/// Parses one radian value per line; blank lines and `#` comments are skipped.
pub fn parse_angles(text: &str) -> Result<Vec<Angle>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("not a number: {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("not a finite angle: {line:?}"),
            });
        }
        out.push(Angle::new(v));
    }
    Ok(out)
}

/// Fréchet functional evaluated at one angle; convenience over
/// [`frechet::frechet_value`] with the circular metric.
pub fn circular_value(sample: &[Angle], c: Angle, p: f64, normalized: bool) -> Result<f64> {
    frechet::frechet_value(sample, &c, &Circular, p, normalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;

    fn pennec() -> Vec<Angle> {
        datasets::angles("pennec6").unwrap()
    }

    #[test]
    fn canonical_range() {
        assert_eq!(Angle::new(PI).radians(), PI);
        assert_eq!(Angle::new(-PI).radians(), PI);
        assert!((Angle::new(3.0 * PI / 2.0).radians() + PI / 2.0).abs() < 1e-12);
        for k in -3..=3 {
            let a = Angle::new(1.234 + TAU * k as f64).radians();
            assert!((a - 1.234).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_examples() {
        // |1.5 − (−1.5)| = 3 < 2π − 3, so the direct arc is the short one
        let d = circ_distance(Angle::new(1.5), Angle::new(-1.5));
        assert!((d - 3.0).abs() < 1e-12);
        let d = circ_distance(Angle::new(1.6), Angle::new(-1.6));
        assert!((d - (TAU - 3.2)).abs() < 1e-12);
        assert_eq!(circ_distance(Angle::new(0.3), Angle::new(0.3)), 0.0);
        assert!((circ_distance(Angle::new(0.0), Angle::new(PI)) - PI).abs() < 1e-15);
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant_mean(&[Angle::new(0.7)]).unwrap(), Direction::Angle(Angle::new(0.7)));
        match resultant_mean(&[Angle::new(0.0), Angle::new(PI / 2.0)]).unwrap() {
            Direction::Angle(a) => assert!((a.radians() - PI / 4.0).abs() < 1e-12),
            Direction::NoDirection => panic!(),
        }
        assert_eq!(
            resultant_mean(&[Angle::new(0.0), Angle::new(PI)]).unwrap(),
            Direction::NoDirection
        );
        let r = resultant(&pennec()).unwrap();
        assert!(r.length() < 0.02 && r.length() > NO_DIRECTION_THRESHOLD);
        assert!(matches!(resultant_mean(&pennec()).unwrap(), Direction::Angle(_)));
        assert_eq!(resultant(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn single_point_minimizes_to_itself() {
        let r = circular_frechet(&[Angle::new(0.4)], 2.0, 720).unwrap();
        assert_eq!(r.result.minimizers, vec![Angle::new(0.4)]);
        assert_eq!(r.result.value, 0.0);
    }

    #[test]
    fn pennec_mean_and_median() {
        let r = circular_frechet(&pennec(), 2.0, DEFAULT_RESOLUTION).unwrap();
        assert_eq!(r.result.minimizers.len(), 1);
        assert!((r.result.minimizers[0].radians() + 1.59).abs() < 0.05);
        assert!((r.result.value - 19.0).abs() < 0.2);
        assert_eq!(r.local_minima.len(), 6);

        let r = circular_frechet(&pennec(), 1.0, DEFAULT_RESOLUTION).unwrap();
        assert_eq!(
            r.minima,
            vec![CircularMinimum::Arc {
                start: Angle::new(-2.12),
                end: Angle::new(-1.08)
            }]
        );
        assert!((r.result.value - 9.392370614359).abs() < 1e-9);
    }

    #[test]
    fn antipodal_pair_is_flat_everywhere_at_p1() {
        let r = circular_frechet(&[Angle::new(0.0), Angle::new(PI)], 1.0, 360).unwrap();
        assert_eq!(r.minima.len(), 1);
        assert!(matches!(r.minima[0], CircularMinimum::Arc { .. }));
        assert!((r.result.value - PI).abs() < 1e-9);
    }

    #[test]
    fn arc_narrower_than_grid_step() {
        let sample: Vec<Angle> = [0.0, 0.7456, 0.6461, 0.0, 1.4599, 0.6555].map(Angle::new).to_vec();
        for resolution in [360, 720, 3600] {
            let r = circular_frechet(&sample, 1.0, resolution).unwrap();
            assert_eq!(
                r.minima,
                vec![CircularMinimum::Arc { start: Angle::new(0.6461), end: Angle::new(0.6555) }]
            );
        }
        let across = [Angle::new(3.138), Angle::new(-3.138)];
        let r = circular_frechet(&across, 1.0, 720).unwrap();
        assert_eq!(r.minima, vec![CircularMinimum::Arc { start: across[0], end: across[1] }]);
    }

    #[test]
    fn point_midway_between_grid_points() {
        let step = TAU / 720.0;
        let x = -PI + 10.5 * step;
        for p in [1.0, 2.0, 3.0] {
            let r = circular_frechet(&[Angle::new(x)], p, 720).unwrap();
            assert_eq!(r.minima, vec![CircularMinimum::Point { angle: Angle::new(x) }]);
            assert_eq!(r.result.value, 0.0);
        }
    }

    #[test]
    fn normalization_and_profile() {
        let r = circular_frechet_with(&pennec(), FrechetOptions::new(2.0).normalized(true), 360).unwrap();
        assert!((r.result.value * 6.0 - 19.0177580).abs() < 1e-5);
        assert_eq!(r.profile.points.len(), 360);
        assert!((r.profile.points.last().unwrap().0 - PI).abs() < 1e-12);
        assert!(r.profile.points[0].0 > -PI);
        let tsv = r.profile.to_tsv();
        assert_eq!(tsv.lines().count(), 360);
        assert!(tsv.lines().all(|l| l.split('\t').count() == 2));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(circular_frechet(&[], 2.0, 3600), Err(Error::EmptySample));
        assert_eq!(
            circular_frechet(&[Angle::new(0.0)], 2.0, 100),
            Err(Error::InvalidResolution(100))
        );
        assert!(parse_angles("1.0\nfoo\n").is_err());
        assert_eq!(parse_angles("# c\n1.5\n\n -0.5 # x\n").unwrap(), vec![Angle::new(1.5), Angle::new(-0.5)]);
    }

    #[test]
    fn naive_mean_contrast() {
        let raw = datasets::PENNEC6;
        assert!((naive_mean(&raw).unwrap() - 0.504).abs() < 0.001);
    }
}
