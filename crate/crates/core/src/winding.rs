//! Argument-principle machinery for an arbitrary analytic function on an
//! axis-aligned rectangle.
//!
//! The boundary is sampled counterclockwise with `c` points per side and the
//! argument of `f` is unwrapped into a continuous angle sequence. The
//! winding of the closed sequence counts the enclosed zeros; a first moment
//! of `d log f` locates a single enclosed zero.
//!
//! The four sides always share the same parameters, so the angles can also
//! be read as a four-side sum ([`BoundaryTrace::side_sum_view`]): row `t`
//! adds the angles at parameter `t` on each side. Jumps of that sum drive
//! refinement and the gap metric `fo`.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmath;
use crate::error::{Error, Result};
use crate::special::ComplexPoint;

/// A function assumed analytic, finite and nonvanishing on every contour it
/// is probed on. Must be deterministic.
pub trait AnalyticFunction: Sync {
    fn eval(&self, k: ComplexPoint) -> Result<ComplexPoint>;

    /// Size of the floating-point error in `eval(k)`; `|f(k)|` at or below
    /// it says nothing about the distance to a zero. Zero when unknown.
    fn rounding_floor(&self, _k: ComplexPoint) -> Result<f64> {
        Ok(0.0)
    }
}

impl<F> AnalyticFunction for F
where
    F: Fn(ComplexPoint) -> ComplexPoint + Sync,
{
    fn eval(&self, k: ComplexPoint) -> Result<ComplexPoint> {
        Ok(self(k))
    }
}

/// `|f|` below this on a sample means the contour passes through a zero.
pub const CONTOUR_ZERO: f64 = 1e-280;
/// Angle jump (radians) that triggers bisection and counts toward `fo`.
pub const GAP_THRESHOLD: f64 = 1.0;
pub const MAX_REFINE_DEPTH: u32 = 3;

/// Depth of the first subdivision of a base interval (into quarters).
pub const FIRST_SPLIT_DEPTH: u32 = 2;

/// Finest dyadic subdivision of one base interval that a parameter key can express.
const KEY_BITS: u32 = 30;
const KEY_UNIT: u64 = 1 << KEY_BITS;

/// Rectangle `center +- rd +- i rad`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub center: ComplexPoint,
    pub rd: f64,
    pub rad: f64,
}

impl Rectangle {
    pub fn new(center: ComplexPoint, rd: f64, rad: f64) -> Result<Self> {
        if !(rd > 0.0 && rad > 0.0)
            || !rd.is_finite()
            || !rad.is_finite()
            || !cmath::is_finite(center)
        {
            return Err(Error::InvalidParameter(format!(
                "rectangle needs finite center and positive half sides, got rd = {rd}, rad = {rad}"
            )));
        }
        Ok(Self { center, rd, rad })
    }

    /// Point at parameter `t` in `[0, 1]` on `side` (0 bottom, 1 right,
    /// 2 top, 3 left), counterclockwise from the lower-left corner.
    pub fn boundary_point(&self, side: u8, t: f64) -> ComplexPoint {
        let (rd, rad) = (self.rd, self.rad);
        let offset = match side {
            0 => Complex64::new(-rd + 2.0 * rd * t, -rad),
            1 => Complex64::new(rd, -rad + 2.0 * rad * t),
            2 => Complex64::new(rd - 2.0 * rd * t, rad),
            3 => Complex64::new(-rd, rad - 2.0 * rad * t),
            _ => unreachable!("rectangle has four sides"),
        };
        self.center + offset
    }

    /// Strictly inside.
    pub fn contains(&self, z: ComplexPoint) -> bool {
        let w = z - self.center;
        w.re.abs() < self.rd && w.im.abs() < self.rad
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.rd.hypot(self.rad)
    }
}

/// Position of a sample along one side: base interval plus a dyadic
/// fraction of that interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamKey(u64);

impl ParamKey {
    fn new(interval: usize, depth: u32, step: u64) -> Self {
        ParamKey(interval as u64 * KEY_UNIT + step * (KEY_UNIT >> depth))
    }

    /// Index of the base interval this key falls in.
    pub fn interval(self) -> usize {
        (self.0 / KEY_UNIT) as usize
    }

    pub fn is_base(self) -> bool {
        self.0.is_multiple_of(KEY_UNIT)
    }

    fn t(self, c: usize) -> f64 {
        self.0 as f64 / (KEY_UNIT as f64 * c as f64)
    }
}

/// One boundary sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub side: u8,
    pub key: ParamKey,
    pub point: ComplexPoint,
    pub value: ComplexPoint,
    /// Continuous (unwrapped) argument of `value`.
    pub angle: f64,
}

/// Counterclockwise boundary samples of one rectangle. The last sample
/// repeats the first point, so `angle_last - angle_first` is `2 pi` times
/// the discrete winding number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub rect: Rectangle,
    /// Base points per side.
    pub c: usize,
    pub samples: Vec<Sample>,
    /// Dyadic subdivision depth of each base interval, shared by the four sides.
    pub depths: Vec<u32>,
}

/// One row of the four-side angle sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideSumRow {
    /// 1-based base point; the last row (`c + 1`) closes the contour.
    pub point: usize,
    /// 0 for base points, otherwise the 1-based ordinal of an inserted
    /// point inside the interval after `point`.
    pub inserted: usize,
    pub angle: f64,
}

fn parameter_keys(depths: &[u32]) -> Vec<ParamKey> {
    depths
        .iter()
        .enumerate()
        .flat_map(|(interval, &depth)| {
            (0..1u64 << depth).map(move |step| ParamKey::new(interval, depth, step))
        })
        .collect()
}

impl BoundaryTrace {
    pub fn winding(&self) -> f64 {
        let first = self.samples.first().map_or(0.0, |s| s.angle);
        let last = self.samples.last().map_or(0.0, |s| s.angle);
        (last - first) / TAU
    }

    /// For every sampled parameter, the sum of the unwrapped angles at that
    /// parameter on the four sides, plus a closing row. The first-to-last
    /// change equals the full boundary winding, since the four sides
    /// partition the contour.
    pub fn side_sum_view(&self) -> Vec<SideSumRow> {
        let per_side = (self.samples.len() - 1) / 4;
        // flat index side * per_side + per_side is the start of the next side
        let angle_at = |side: usize, index: usize| self.samples[side * per_side + index].angle;
        let mut rows = Vec::with_capacity(per_side + 1);
        let mut ordinal = 0;
        for (index, sample) in self.samples[..per_side].iter().enumerate() {
            ordinal = if sample.key.is_base() { 0 } else { ordinal + 1 };
            rows.push(SideSumRow {
                point: sample.key.interval() + 1,
                inserted: ordinal,
                angle: (0..4).map(|side| angle_at(side, index)).sum(),
            });
        }
        rows.push(SideSumRow {
            point: self.c + 1,
            inserted: 0,
            angle: (1..5).map(|side| angle_at(side, 0)).sum(),
        });
        rows
    }

    /// Absolute consecutive differences of the four-side sum, each tagged
    /// with the base interval it lies in.
    pub fn gaps(&self) -> Vec<(usize, f64)> {
        let rows = self.side_sum_view();
        rows.windows(2)
            .map(|w| (w[0].point - 1, (w[1].angle - w[0].angle).abs()))
            .collect()
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps().into_iter().fold(0.0, |m, (_, g)| m.max(g))
    }
}

fn evaluate_checked<F: AnalyticFunction + ?Sized>(f: &F, k: ComplexPoint) -> Result<ComplexPoint> {
    let v = f.eval(k)?;
    if !cmath::is_finite(v) {
        return Err(Error::NonFiniteResult { re: k.re, im: k.im });
    }
    if v.norm() < CONTOUR_ZERO {
        return Err(Error::ZeroOnContour { re: k.re, im: k.im });
    }
    Ok(v)
}

/// Wrap into `(-pi, pi]`.
fn principal(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn assemble<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: Rectangle,
    depths: Vec<u32>,
    cache: &mut HashMap<(u8, ParamKey), ComplexPoint>,
) -> Result<BoundaryTrace> {
    let c = depths.len();
    let keys = parameter_keys(&depths);
    let mut samples = Vec::with_capacity(4 * keys.len() + 1);
    for side in 0..4u8 {
        for &key in &keys {
            let point = rect.boundary_point(side, key.t(c));
            let value = match cache.get(&(side, key)) {
                Some(v) => *v,
                None => {
                    let v = evaluate_checked(f, point)?;
                    cache.insert((side, key), v);
                    v
                }
            };
            samples.push(Sample {
                side,
                key,
                point,
                value,
                angle: 0.0,
            });
        }
    }
    let mut closing = samples[0];
    closing.side = 4;
    samples.push(closing);

    let mut prev = samples[0].value.arg();
    samples[0].angle = prev;
    for s in samples.iter_mut().skip(1) {
        let angle = prev + principal(s.value.arg() - prev);
        s.angle = angle;
        prev = angle;
    }
    Ok(BoundaryTrace {
        rect,
        c,
        samples,
        depths,
    })
}

/// Evaluate `f` at `c` equally spaced points per side plus the closing point.
pub fn sample_boundary<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: Rectangle,
    c: usize,
) -> Result<BoundaryTrace> {
    if c < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 points per side, got {c}"
        )));
    }
    assemble(f, rect, vec![0; c], &mut HashMap::new())
}

/// Resample every base interval containing a four-side-sum jump above
/// `gap_threshold`: first into quarters, then into eighths, and so on up
/// to depth `max_depth`. Gaps still too wide afterwards are left for [`compute_fo`].
pub fn refine_trace<F: AnalyticFunction + ?Sized>(
    f: &F,
    trace: BoundaryTrace,
    gap_threshold: f64,
    max_depth: u32,
) -> Result<BoundaryTrace> {
    let mut cache: HashMap<(u8, ParamKey), ComplexPoint> = trace
        .samples
        .iter()
        .filter(|s| s.side < 4)
        .map(|s| ((s.side, s.key), s.value))
        .collect();
    let mut trace = trace;
    loop {
        let mut depths = trace.depths.clone();
        let mut changed = false;
        for (interval, gap) in trace.gaps() {
            if gap <= gap_threshold || depths[interval] != trace.depths[interval] {
                continue;
            }
            let next = if depths[interval] == 0 {
                FIRST_SPLIT_DEPTH
            } else {
                depths[interval] + 1
            };
            if next <= max_depth {
                depths[interval] = next;
                changed = true;
            }
        }
        if !changed {
            return Ok(trace);
        }
        trace = assemble(f, trace.rect, depths, &mut cache)?;
    }
}

/// Worst-gap metric: 0 if every consecutive angle jump is at most one
/// radian, else the max of `1 + floor(2 (gap - 1))` over offending jumps.
pub fn compute_fo(trace: &BoundaryTrace) -> u32 {
    fo_of_gaps(trace.gaps().into_iter().map(|(_, g)| g))
}

fn fo_of_gaps(gaps: impl Iterator<Item = f64>) -> u32 {
    gaps.filter(|&g| g > 1.0)
        .map(|g| 1 + (2.0 * (g - 1.0)).floor() as u32)
        .max()
        .unwrap_or(0)
}

/// `1 - winding`: 0 for one enclosed simple zero, 1 for none. Not rounded.
pub fn compute_char(trace: &BoundaryTrace) -> f64 {
    1.0 - trace.winding()
}

/// `center + (1 / 2 pi i) sum_j (k_j - center) Delta_j` with `k_j` the
/// start of segment `j` and `Delta_j` the log-increment of `f` along it.
/// Discretizes the first moment `(1 / 2 pi i) \oint (k - center) f'/f dk`,
/// which is the enclosed zero when exactly one simple zero is inside.
/// The rule is first order in the segment length; the residual bias toward
/// the center is what the shrinking-rectangle search feeds on.
pub fn moment_zero_estimate(trace: &BoundaryTrace) -> ComplexPoint {
    let center = trace.rect.center;
    let moment: Complex64 = trace
        .samples
        .windows(2)
        .map(|w| {
            let delta = Complex64::new(
                (w[1].value.norm() / w[0].value.norm()).ln(),
                w[1].angle - w[0].angle,
            );
            (w[0].point - center) * delta
        })
        .sum();
    center + moment / Complex64::new(0.0, TAU)
}

/// Everything learned from one contour integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub rect: Rectangle,
    pub c: usize,
    pub char: f64,
    pub fo: u32,
    pub z_estimate: ComplexPoint,
    /// `|f(z_estimate)| / |f(center)|`
    pub vv: f64,
    /// `|f(z_estimate)|`
    pub abs_at_estimate: f64,
    /// [`AnalyticFunction::rounding_floor`] at `z_estimate`.
    pub floor_at_estimate: f64,
    pub inside: bool,
    pub trace: BoundaryTrace,
}

/// Sample, refine, and measure one rectangle.
pub fn integrate<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: Rectangle,
    c: usize,
) -> Result<IntegrationResult> {
    let trace = sample_boundary(f, rect, c)?;
    let trace = refine_trace(f, trace, GAP_THRESHOLD, MAX_REFINE_DEPTH)?;
    let char = compute_char(&trace);
    let fo = compute_fo(&trace);
    let z_estimate = moment_zero_estimate(&trace);
    let at_center = f.eval(rect.center)?.norm();
    let (abs_at_estimate, floor_at_estimate) = if cmath::is_finite(z_estimate) {
        (f.eval(z_estimate)?.norm(), f.rounding_floor(z_estimate)?)
    } else {
        (f64::INFINITY, 0.0)
    };
    let vv = if at_center > 0.0 {
        abs_at_estimate / at_center
    } else if abs_at_estimate == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(IntegrationResult {
        rect,
        c,
        char,
        fo,
        z_estimate,
        vv,
        abs_at_estimate,
        floor_at_estimate,
        inside: rect.contains(z_estimate),
        trace,
    })
}
