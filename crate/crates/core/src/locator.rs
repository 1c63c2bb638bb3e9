//! Automated search for one zero per seed: shrinking rectangles around the
//! running estimate, a two-level `c` schedule per variant, Newton polish,
//! and deferral of unfinished seeds to a later variant with more points.
//!
//! The state machine for one seed within one variant:
//!
//! * a *level* is a run of integrations at a fixed `c`; it completes after
//!   two consecutive good integrations;
//! * the first level of a variant completing at the run's initial `c`
//!   escalates to the next `c` ("second try"), recentred on the last good
//!   estimate;
//! * at an escalated `c` the search ends as soon as an integration passes
//!   the very-good gate; a level completing without one escalates again;
//! * a level that runs out of attempts escalates, or defers if it was the
//!   variant's last level.
//!
//! Residuals at the function's rounding floor carry no information, so an
//! estimate there passes the good test without the `vv` and monotonicity
//! conditions and does not shrink the rectangle, and Newton steps are
//! credited only down to that floor.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ComplexPoint;
use crate::winding::{integrate, AnalyticFunction, IntegrationResult, Rectangle};

/// Knobs of the search protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Points per side in the first variant.
    pub c_initial: usize,
    /// Points per side available to later levels and variants; only entries
    /// above `c_initial` are used.
    pub c_schedule: Vec<usize>,
    /// Initial half width as a fraction of the distance from the seed to the
    /// classical zero `iy`.
    pub kappa: f64,
    pub rd_cap: f64,
    pub rd_floor: f64,
    pub vv_max: f64,
    pub fo_good_max: u32,
    pub fo_verygood_max: u32,
    pub char_tol: f64,
    pub de_admissible: f64,
    /// Very good also needs `|f(z)| <= seed_residual_max |f(za)|`.
    pub seed_residual_max: f64,
    /// `de = max(de_floor, de_factor * distance)`.
    pub de_factor: f64,
    pub de_floor: f64,
    /// Integration budget of one seed in one variant.
    pub max_integrations_per_zero: usize,
    /// Integrations allowed at one level before it counts as failed.
    pub level_attempts: usize,
    pub newton_max_iters: usize,
    /// Minimum factor by which one Newton step must reduce `|f|` to count.
    pub newton_min_gain: f64,
    /// An estimate with `|f|` at most this multiple of the function's
    /// rounding floor counts as resolved: its `vv` carries no information,
    /// and shrinking the rectangle further would only sample noise. Zero
    /// disables the rule.
    pub floor_margin: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            c_initial: 4,
            c_schedule: vec![4, 6, 9],
            kappa: 0.365,
            rd_cap: 0.5,
            rd_floor: 1e-3,
            vv_max: 0.8,
            fo_good_max: 2,
            fo_verygood_max: 1,
            char_tol: 0.05,
            de_admissible: 2e-4,
            seed_residual_max: 0.0175,
            de_factor: 0.1,
            de_floor: 1e-6,
            max_integrations_per_zero: 12,
            level_attempts: 4,
            newton_max_iters: 5,
            newton_min_gain: 10.0,
            floor_margin: 2.0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.c_initial < 3 {
            return fail(format!(
                "c_initial must be at least 3, got {}",
                self.c_initial
            ));
        }
        if self.c_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!(
                "c_schedule must be strictly increasing, got {:?}",
                self.c_schedule
            ));
        }
        if !(self.vv_max > 0.0 && self.vv_max < 1.0) {
            return fail(format!("vv_max must lie in (0, 1), got {}", self.vv_max));
        }
        if !(self.char_tol > 0.0 && self.char_tol < 0.5) {
            return fail(format!(
                "char_tol must lie in (0, 0.5), got {}",
                self.char_tol
            ));
        }
        let positive = [
            ("kappa", self.kappa),
            ("rd_cap", self.rd_cap),
            ("rd_floor", self.rd_floor),
            ("de_admissible", self.de_admissible),
            ("seed_residual_max", self.seed_residual_max),
            ("de_factor", self.de_factor),
            ("de_floor", self.de_floor),
            ("newton_min_gain", self.newton_min_gain),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {value}"));
            }
        }
        if !(self.floor_margin >= 0.0 && self.floor_margin.is_finite()) {
            return fail(format!(
                "floor_margin must be non-negative and finite, got {}",
                self.floor_margin
            ));
        }
        if self.max_integrations_per_zero == 0 || self.level_attempts < 2 {
            return fail(
                "need a positive integration budget and at least two attempts per level".into(),
            );
        }
        Ok(())
    }

    /// Points per side of every variant, ascending: `c_initial` then the
    /// larger schedule entries.
    pub fn variant_points(&self) -> Vec<usize> {
        std::iter::once(self.c_initial)
            .chain(
                self.c_schedule
                    .iter()
                    .copied()
                    .filter(|&c| c > self.c_initial),
            )
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Good,
    VeryGood,
    NotGood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVerdict {
    VeryGood,
    GoodOnly,
    Failed,
}

/// Mutable state of one seed's search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub y: f64,
    pub za: ComplexPoint,
    /// Last good estimate, or `za` before the first one.
    pub zna: ComplexPoint,
    pub zn: ComplexPoint,
    pub rd: f64,
    pub rad: f64,
    pub c: usize,
    pub consecutive_good: usize,
    /// Smallest `|f|` at a good estimate so far; `|f(za)|` initially.
    pub best_abs_value: f64,
    /// `|f(za)|`
    pub seed_abs_value: f64,
    /// Accepted estimates, oldest first.
    pub good_estimates: Vec<ComplexPoint>,
    /// Index into the variant's `c` list.
    pub level: usize,
    pub attempts_at_level: usize,
}

/// One integration as it happened during a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub variant: usize,
    /// Set on the first integration after an escalation of `c`.
    pub second_try: bool,
    pub zna: ComplexPoint,
    pub result: IntegrationResult,
    pub verdict: Verdict,
}

/// Outcome of the Newton polish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOutcome {
    pub z: ComplexPoint,
    pub accepted: bool,
    /// Steps that reduced `|f|` by at least the configured gain.
    pub steps: usize,
}

/// Final result for one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub index: usize,
    pub y: f64,
    pub za: ComplexPoint,
    pub z: ComplexPoint,
    pub de: f64,
    /// `|f(z)| / |f(za)|`
    pub vv_final: f64,
    pub verdict: ZeroVerdict,
    pub newton_applied: bool,
    /// Variant (1-based) that finished the search; `None` unless very good.
    pub completed_in_variant: Option<usize>,
    pub trace_log: Vec<SearchStep>,
    /// Evaluation errors that cut a variant short.
    pub errors: Vec<String>,
}

/// A zero to look for: the classical ordinate, the seed and the function
/// whose zero deforms from it.
#[derive(Debug, Clone)]
pub struct Seed<F> {
    pub index: usize,
    pub y: f64,
    pub za: ComplexPoint,
    pub function: F,
}

/// Rectangle centred at the seed with half width proportional to the
/// seed's drift from the classical zero.
pub fn initial_rectangle(za: ComplexPoint, y: f64, cfg: &SearchConfig) -> Result<Rectangle> {
    if !(y > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ordinate must be positive, got {y}"
        )));
    }
    let drift = (za - Complex64::new(0.0, y)).norm();
    let rd = (cfg.kappa * drift).min(cfg.rd_cap).max(cfg.rd_floor);
    Rectangle::new(za, rd, rd / 2.0)
}

/// `max(de_floor, de_factor |z_last - z_prev|)` over the accepted estimates.
pub fn estimate_de(estimates: &[ComplexPoint], cfg: &SearchConfig) -> Result<f64> {
    match estimates {
        [.., prev, last] => Ok((cfg.de_factor * (last - prev).norm()).max(cfg.de_floor)),
        _ => Err(Error::InsufficientHistory),
    }
}

/// `|f|` at the estimate is within `floor_margin` of the rounding floor.
pub fn at_rounding_floor(result: &IntegrationResult, cfg: &SearchConfig) -> bool {
    result.abs_at_estimate <= cfg.floor_margin * result.floor_at_estimate
}

fn is_good(result: &IntegrationResult, state: &SearchState, cfg: &SearchConfig) -> bool {
    let decreasing = result.vv < cfg.vv_max && result.abs_at_estimate <= state.best_abs_value;
    result.char.abs() <= cfg.char_tol
        && result.fo <= cfg.fo_good_max
        && result.inside
        && (decreasing || at_rounding_floor(result, cfg))
}

/// Classify one integration. Very good needs a good integration closing a
/// level at an escalated `c` (`escalated`), following another good one, with
/// small `fo`, a small step-to-step movement and a residual well below the
/// seed's.
pub fn assess(
    result: &IntegrationResult,
    state: &SearchState,
    escalated: bool,
    cfg: &SearchConfig,
) -> Verdict {
    if !is_good(result, state, cfg) {
        return Verdict::NotGood;
    }
    if !escalated
        || state.consecutive_good < 1
        || result.fo > cfg.fo_verygood_max
        || (result.vv > cfg.vv_max && !at_rounding_floor(result, cfg))
        || result.abs_at_estimate > cfg.seed_residual_max * state.seed_abs_value
    {
        return Verdict::Good;
    }
    let mut estimates = state.good_estimates.clone();
    estimates.push(result.z_estimate);
    match estimate_de(&estimates, cfg) {
        Ok(de) if de <= cfg.de_admissible => Verdict::VeryGood,
        _ => Verdict::Good,
    }
}

/// What the search does after one integration.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Continue(SearchState),
    /// The integration closed the search as very good.
    Done(SearchState),
    /// Budget or levels exhausted; retry in the next variant.
    Deferred(SearchState),
}

/// Advance the state machine. `levels` are the variant's `c` values.
pub fn step_policy(
    mut state: SearchState,
    verdict: Verdict,
    result: &IntegrationResult,
    levels: &[usize],
    cfg: &SearchConfig,
) -> (Step, bool) {
    state.attempts_at_level += 1;
    let z = result.z_estimate;
    let vv = result.vv;
    match verdict {
        Verdict::VeryGood => {
            state.good_estimates.push(z);
            state.zna = z;
            state.best_abs_value = state.best_abs_value.min(result.abs_at_estimate);
            state.consecutive_good += 1;
            return (Step::Done(state), false);
        }
        Verdict::Good => {
            state.good_estimates.push(z);
            state.zna = z;
            state.best_abs_value = state.best_abs_value.min(result.abs_at_estimate);
            state.consecutive_good += 1;
            // pull the centre toward the estimate, the more so the better it is
            state.zn = (z + vv * state.zn) / (1.0 + vv);
            if !at_rounding_floor(result, cfg) {
                state.rd /= 2.0;
                state.rad /= 2.0;
            }
            if state.consecutive_good >= 2 {
                return escalate(state, levels);
            }
        }
        Verdict::NotGood => {
            state.consecutive_good = 0;
            if (result.char - 1.0).abs() <= cfg.char_tol {
                // nothing enclosed: look wider, a quarter of the way toward the estimate
                state.zn += (z - state.zn) / 4.0;
                state.rd *= 2.0;
                state.rad *= 2.0;
            } else if result.char.abs() <= cfg.char_tol && result.inside && z.re.is_finite() {
                // one zero enclosed but the estimate is poor: lean toward it, shrink a little
                state.zn = (state.zn + vv.min(1e6) * z) / (1.0 + vv.min(1e6));
                state.rd *= 0.75;
                state.rad *= 0.75;
            } else {
                // several zeros, a pole, or an unresolved contour: shrink around the last good estimate
                state.zn = state.zna;
                state.rd *= FRAC_1_SQRT_2;
                state.rad *= FRAC_1_SQRT_2;
            }
        }
    }
    if state.attempts_at_level >= cfg.level_attempts {
        return escalate(state, levels);
    }
    (Step::Continue(state), false)
}

fn escalate(mut state: SearchState, levels: &[usize]) -> (Step, bool) {
    if state.level + 1 >= levels.len() {
        return (Step::Deferred(state), false);
    }
    state.level += 1;
    state.c = levels[state.level];
    state.attempts_at_level = 0;
    state.consecutive_good = 0;
    state.zn = state.zna;
    (Step::Continue(state), true)
}

/// Newton steps with a central-difference derivative, kept while each step
/// cuts `|f|` by at least `newton_min_gain`. Accepted if at least one step
/// was kept and the total move stays within `10 de`.
pub fn newton_refine<F: AnalyticFunction + ?Sized>(
    f: &F,
    z0: ComplexPoint,
    de: f64,
    cfg: &SearchConfig,
) -> NewtonOutcome {
    let mut z = z0;
    let mut steps = 0;
    let Ok(mut fz) = f.eval(z) else {
        return NewtonOutcome {
            z: z0,
            accepted: false,
            steps: 0,
        };
    };
    for _ in 0..cfg.newton_max_iters {
        let Ok(slope) = central_difference(f, z) else {
            break;
        };
        if slope.norm() == 0.0 || !slope.re.is_finite() || !slope.im.is_finite() {
            break;
        }
        let correction = fz / slope;
        if correction.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
        let next = z - correction;
        let Ok(f_next) = f.eval(next) else { break };
        // a residual under the rounding floor is credited only down to it
        let floor = f.rounding_floor(next).unwrap_or(0.0) * cfg.floor_margin;
        if !(f_next.norm().max(floor) * cfg.newton_min_gain <= fz.norm()) {
            break;
        }
        z = next;
        fz = f_next;
        steps += 1;
        if fz.norm() == 0.0 {
            break;
        }
    }
    let accepted = steps > 0 && (z - z0).norm() <= 10.0 * de;
    if accepted {
        NewtonOutcome { z, accepted, steps }
    } else {
        NewtonOutcome {
            z: z0,
            accepted,
            steps,
        }
    }
}

fn central_difference<F: AnalyticFunction + ?Sized>(
    f: &F,
    z: ComplexPoint,
) -> Result<ComplexPoint> {
    let h = 1e-6 * (1.0 + z.norm());
    Ok((f.eval(z + h)? - f.eval(z - h)?) / (2.0 * h))
}

/// Error bound from the residual: a fraction of the next Newton correction
/// length `|f(z) / f'(z)|`, floored. Used once the estimate history no
/// longer describes `z`.
fn newton_de<F: AnalyticFunction + ?Sized>(f: &F, z: ComplexPoint, cfg: &SearchConfig) -> f64 {
    let correction = match (f.eval(z), central_difference(f, z)) {
        (Ok(v), Ok(d)) if d.norm() > 0.0 => (v / d).norm(),
        _ => f64::INFINITY,
    };
    (cfg.de_factor * correction).max(cfg.de_floor)
}

/// Integrate, retrying on a slightly enlarged rectangle if the contour hits a zero.
fn integrate_with_retry<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: Rectangle,
    c: usize,
) -> Result<IntegrationResult> {
    let mut rect = rect;
    for _ in 0..3 {
        match integrate(f, rect, c) {
            Err(Error::ZeroOnContour { .. }) => {
                rect = Rectangle::new(rect.center, rect.rd * 1.01, rect.rad * 1.01)?;
            }
            other => return other,
        }
    }
    integrate(f, rect, c)
}

enum VariantEnd {
    Done,
    Deferred,
}

fn run_one_variant<F: AnalyticFunction + ?Sized>(
    f: &F,
    mut state: SearchState,
    variant: usize,
    levels: &[usize],
    run_c_initial: usize,
    cfg: &SearchConfig,
    log: &mut Vec<SearchStep>,
) -> Result<(VariantEnd, SearchState)> {
    let mut second_try = false;
    for _ in 0..cfg.max_integrations_per_zero {
        let rect = Rectangle::new(state.zn, state.rd, state.rad)?;
        let result = integrate_with_retry(f, rect, state.c)?;
        let escalated = state.c > run_c_initial;
        let verdict = assess(&result, &state, escalated, cfg);
        let (step, escalating) = step_policy(state, verdict, &result, levels, cfg);
        log.push(SearchStep {
            variant,
            second_try,
            zna: match &step {
                Step::Continue(s) | Step::Done(s) | Step::Deferred(s) => s.zna,
            },
            result,
            verdict,
        });
        second_try = escalating;
        match step {
            Step::Continue(s) => state = s,
            Step::Done(s) => return Ok((VariantEnd::Done, s)),
            Step::Deferred(s) => return Ok((VariantEnd::Deferred, s)),
        }
    }
    Ok((VariantEnd::Deferred, state))
}

/// State at the start of `variant` (1-based) for a seed, resuming from its
/// last good estimate when there is one.
fn variant_start<F: AnalyticFunction + ?Sized>(
    f: &F,
    y: f64,
    za: ComplexPoint,
    previous: Option<&SearchState>,
    c: usize,
    cfg: &SearchConfig,
) -> Result<SearchState> {
    let initial = initial_rectangle(za, y, cfg)?;
    let seed_abs_value = f.eval(za)?.norm();
    let (zna, rd, best, goods) = match previous {
        Some(prev) if !prev.good_estimates.is_empty() => {
            let rd = match estimate_de(&prev.good_estimates, cfg) {
                Ok(de) => (10.0 * de).max(1e-4),
                Err(_) => prev.rd,
            };
            (
                prev.zna,
                rd,
                prev.best_abs_value,
                prev.good_estimates.clone(),
            )
        }
        _ => (za, initial.rd, seed_abs_value, Vec::new()),
    };
    Ok(SearchState {
        y,
        za,
        zna,
        zn: zna,
        rd,
        rad: rd / 2.0,
        c,
        consecutive_good: 0,
        best_abs_value: best,
        seed_abs_value,
        good_estimates: goods,
        level: 0,
        attempts_at_level: 0,
    })
}

/// Search every seed, variant by variant. Seeds not finished very good in
/// one variant are retried in the next with more points per side. Records
/// come back in seed order.
pub fn run_variants<F: AnalyticFunction>(
    seeds: &[Seed<F>],
    cfg: &SearchConfig,
) -> Result<Vec<ZeroRecord>> {
    cfg.validate()?;
    let points = cfg.variant_points();
    let run_c_initial = points[0];
    let mut states: Vec<Option<SearchState>> = vec![None; seeds.len()];
    let mut logs: Vec<Vec<SearchStep>> = vec![Vec::new(); seeds.len()];
    let mut errors: Vec<Vec<String>> = vec![Vec::new(); seeds.len()];
    let mut done: Vec<Option<usize>> = vec![None; seeds.len()];

    for (v, _) in points.iter().enumerate() {
        let variant = v + 1;
        let levels = &points[v..(v + 2).min(points.len())];
        for (i, seed) in seeds.iter().enumerate() {
            if done[i].is_some() {
                continue;
            }
            let start = variant_start(
                &seed.function,
                seed.y,
                seed.za,
                states[i].as_ref(),
                levels[0],
                cfg,
            );
            let outcome = start.and_then(|s| {
                run_one_variant(
                    &seed.function,
                    s,
                    variant,
                    levels,
                    run_c_initial,
                    cfg,
                    &mut logs[i],
                )
            });
            match outcome {
                Ok((VariantEnd::Done, s)) => {
                    done[i] = Some(variant);
                    states[i] = Some(s);
                }
                Ok((VariantEnd::Deferred, s)) => states[i] = Some(s),
                Err(e) => errors[i].push(format!("variant {variant}: {e}")),
            }
        }
    }

    let records = seeds
        .iter()
        .enumerate()
        .map(|(i, seed)| {
            finish(
                seed,
                states[i].take(),
                done[i],
                std::mem::take(&mut logs[i]),
                std::mem::take(&mut errors[i]),
                cfg,
            )
        })
        .collect();
    Ok(records)
}

fn finish<F: AnalyticFunction>(
    seed: &Seed<F>,
    state: Option<SearchState>,
    completed_in_variant: Option<usize>,
    trace_log: Vec<SearchStep>,
    errors: Vec<String>,
    cfg: &SearchConfig,
) -> ZeroRecord {
    let f = &seed.function;
    let goods = state
        .as_ref()
        .map(|s| s.good_estimates.as_slice())
        .unwrap_or(&[]);
    let verdict = match (completed_in_variant, goods.is_empty()) {
        (Some(_), _) => ZeroVerdict::VeryGood,
        (None, false) => ZeroVerdict::GoodOnly,
        (None, true) => ZeroVerdict::Failed,
    };
    let history_de = estimate_de(goods, cfg).ok();
    let (z, newton_applied) = match (verdict, goods.last()) {
        (ZeroVerdict::VeryGood, Some(&z0)) => {
            let polished = newton_refine(f, z0, history_de.unwrap_or(cfg.de_floor), cfg);
            (polished.z, polished.accepted)
        }
        (_, Some(&z0)) => (z0, false),
        (_, None) => (seed.za, false),
    };
    // after an accepted polish the history no longer describes z
    let de = match history_de {
        Some(de) if !newton_applied => de,
        _ => newton_de(f, z, cfg),
    };
    let vv_final = match (f.eval(z), f.eval(seed.za)) {
        (Ok(fz), Ok(fa)) if fa.norm() > 0.0 => fz.norm() / fa.norm(),
        _ => f64::NAN,
    };
    ZeroRecord {
        index: seed.index,
        y: seed.y,
        za: seed.za,
        z,
        de,
        vv_final,
        verdict,
        newton_applied,
        completed_in_variant,
        trace_log,
        errors,
    }
}

/// Search a single seed through all variants.
pub fn locate_zero<F: AnalyticFunction + Clone>(
    f: &F,
    y: f64,
    za: ComplexPoint,
    cfg: &SearchConfig,
) -> Result<ZeroRecord> {
    let seed = Seed {
        index: 1,
        y,
        za,
        function: f.clone(),
    };
    let record = run_variants(std::slice::from_ref(&seed), cfg)?
        .pop()
        .expect("one record per seed");
    if record.verdict == ZeroVerdict::Failed {
        return Err(Error::SearchFailed { index: 1, y });
    }
    Ok(record)
}
