//! The plus-sharp q-zeta function
//!
//! ```text
//! zeta#(k) = sum_{j>=0} prod_{l=1}^{j}
//!     (1 - e^{-(l+2k-1)/a}) (1 - e^{(l+k)/a}) / ((1 - e^{-(l+k-1)/a}) (1 - e^{l/a}))
//!   * (e^{d k^2 / 4a} + 1) / (e^{d (k+j)^2 / 4a} + 1)
//! ```
//!
//! with `q = e^{-1/a}`, truncated after `B = floor(b sqrt(a/d))` terms, the
//! strip `0 < Im k < 2 eps`, `eps = sqrt(pi a / 2d)`, in which its zeros
//! live, and the first-order prediction of those zeros from the classical
//! zeta zeros.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cmath;
use crate::error::{Error, Result};
use crate::special::{self, ComplexPoint, EtaConfig};
use crate::winding::AnalyticFunction;

/// Real part of a Gaussian exponent above which `e^x + 1` is replaced by `e^x`.
pub const GAUSSIAN_GUARD: f64 = 700.0;

/// Relative size of the estimated last term below which a truncation
/// multiplier is accepted by [`select_truncation`].
pub const TRUNCATION_TAIL_TOL: f64 = 1e-3;

const DEGENERATE: f64 = 1e-300;

/// Parameters of one q-zeta evaluation. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpParams {
    a: f64,
    d: f64,
    q: f64,
    b: u32,
    terms: usize,
    epsilon: f64,
}

/// The strip `lower < Im k < upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripBounds {
    pub lower: f64,
    pub upper: f64,
}

impl SharpParams {
    pub fn new(a: f64, d: f64, b: u32) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "a and d must be positive and finite, got a = {a}, d = {d}"
            )));
        }
        if b == 0 {
            return Err(Error::InvalidParameter(
                "truncation multiplier b must be positive".into(),
            ));
        }
        let terms = (b as f64 * (a / d).sqrt()).floor() as usize;
        if terms == 0 {
            return Err(Error::InvalidParameter(format!(
                "b sqrt(a/d) < 1 leaves no terms (a = {a}, d = {d}, b = {b})"
            )));
        }
        Ok(Self {
            a,
            d,
            q: (-1.0 / a).exp(),
            b,
            terms,
            epsilon: (PI * a / (2.0 * d)).sqrt(),
        })
    }

    /// Parameters with `b` chosen by [`select_truncation`] for evaluations up to `|k| = region_top`.
    pub fn automatic(a: f64, d: f64, region_top: f64) -> Result<Self> {
        Self::new(a, d, select_truncation(a, d, region_top))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// Number of series terms `B`; the sum runs over `j = 0..B`.
    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn strip(&self) -> StripBounds {
        StripBounds {
            lower: 0.0,
            upper: 2.0 * self.epsilon,
        }
    }

    fn check_domain(&self, k: Complex64) -> Result<()> {
        if !cmath::is_finite(k) || k.im < -self.epsilon || k.im > 3.0 * self.epsilon {
            return Err(Error::RangeUnsupported { re: k.re, im: k.im });
        }
        Ok(())
    }
}

/// `(e^upper + 1) / (e^lower + 1)`. Large exponents are factored out first
/// so that neither `e^x` nor the complex division overflows.
fn gaussian_quotient(upper: Complex64, lower: Complex64, guard: f64) -> Complex64 {
    let shift = cmath::exp(upper - lower);
    if upper.re > guard || lower.re > guard {
        shift
    } else if upper.re.max(lower.re) > 0.0 {
        shift * (cmath::exp(-upper) + 1.0) / (cmath::exp(-lower) + 1.0)
    } else {
        (cmath::exp(upper) + 1.0) / (cmath::exp(lower) + 1.0)
    }
}

fn ratio_with_guard(params: &SharpParams, k: Complex64, j: usize, guard: f64) -> Result<Complex64> {
    assert!(j >= 1, "term_ratio is defined for j >= 1");
    let (a, d) = (params.a, params.d);
    let jf = j as f64;
    // the four (1 - e^x) factors, written as -expm1(x); the signs cancel
    let num_a = cmath::expm1(-(jf + 2.0 * k - 1.0) / a);
    let num_b = cmath::expm1((jf + k) / a);
    let den_a = cmath::expm1(-(jf + k - 1.0) / a);
    let den_b = libm::expm1(jf / a);
    if den_a.norm() < DEGENERATE || den_b.abs() < DEGENERATE {
        return Err(Error::DegenerateDenominator { j });
    }
    let product = num_a * num_b / (den_a * den_b);
    let scale = d / (4.0 * a);
    let prev = k + (jf - 1.0);
    let next = k + jf;
    Ok(product * gaussian_quotient(scale * prev * prev, scale * next * next, guard))
}

/// Multiplicative update `term_j / term_{j-1}` of the series, `j >= 1`.
pub fn term_ratio(params: &SharpParams, k: ComplexPoint, j: usize) -> Result<ComplexPoint> {
    ratio_with_guard(params, k, j, GAUSSIAN_GUARD)
}

/// Sum of the first `n_terms` terms `j = 0..n_terms`.
pub fn partial_sum(params: &SharpParams, k: ComplexPoint, n_terms: usize) -> Result<ComplexPoint> {
    params.check_domain(k)?;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for j in 1..n_terms {
        term *= term_ratio(params, k, j)?;
        sum += term;
    }
    if !cmath::is_finite(sum) {
        return Err(Error::NonFiniteResult { re: k.re, im: k.im });
    }
    Ok(sum)
}

/// `eps * sum |term_j|` over the evaluated terms: the scale of the rounding
/// error of [`evaluate`], which cancellation can make far larger than the
/// sum itself.
pub fn rounding_floor(params: &SharpParams, k: ComplexPoint) -> Result<f64> {
    params.check_domain(k)?;
    let mut term = Complex64::new(1.0, 0.0);
    let mut scale = 1.0;
    for j in 1..params.terms {
        term *= term_ratio(params, k, j)?;
        scale += term.norm();
    }
    Ok(f64::EPSILON * scale)
}

/// `zeta#(k)` truncated to `params.terms()` terms.
pub fn evaluate(params: &SharpParams, k: ComplexPoint) -> Result<ComplexPoint> {
    partial_sum(params, k, params.terms)
}

fn log10_tail_estimate(a: f64, d: f64, b: u32, region_top: f64) -> f64 {
    let terms = (b as f64 * (a / d).sqrt()).floor();
    let k = Complex64::new(0.0, region_top);
    let mut log_mag = -d * terms * terms / (4.0 * a);
    for l in 1..=terms as usize {
        let lf = l as f64;
        log_mag += cmath::expm1((lf + k) / a).norm().ln() - (lf / a).exp_m1().ln();
    }
    log_mag / std::f64::consts::LN_10
}

/// Smallest `b` in `5, 10, 15, ...` whose estimated last-term magnitude
/// (Gaussian decay times the growth of the `(1 - e^{(l+k)/a}) / (1 - e^{l/a})`
/// product at `k = i region_top`) falls below [`TRUNCATION_TAIL_TOL`].
pub fn select_truncation(a: f64, d: f64, region_top: f64) -> u32 {
    const STEP: u32 = 5;
    const MAX_B: u32 = 1000;
    let target = TRUNCATION_TAIL_TOL.log10();
    let mut b = STEP;
    while b < MAX_B && log10_tail_estimate(a, d, b, region_top) >= target {
        b += STEP;
    }
    b
}

/// First-order prediction `z_a` of the q-zeta zero deforming the classical
/// zero `1/2 + iy`:
///
/// ```text
/// z_a = iy (1 - [4/d (1/2+iy) zeta+(3/2+iy) - d (-1+iy) zeta+(-1/2+iy)] / [12 a zeta+'(1/2+iy)])
/// ```
pub fn linear_approximation(y: f64, a: f64, d: f64, cfg: &EtaConfig) -> Result<ComplexPoint> {
    if !(y > 0.0) || !(a > 0.0) || !(d > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "linear approximation needs y, a, d > 0 (y = {y}, a = {a}, d = {d})"
        )));
    }
    let iy = Complex64::new(0.0, y);
    let derivative = special::zeta_plus_derivative(0.5 + iy, cfg)?;
    if derivative.norm() < 1e-10 {
        return Err(Error::DerivativeNearZero { y });
    }
    let upper = (4.0 / d) * (0.5 + iy) * special::zeta_plus(1.5 + iy, cfg)?;
    let lower = d * (iy - 1.0) * special::zeta_plus(iy - 0.5, cfg)?;
    Ok(iy * (1.0 - (upper - lower) / (12.0 * a * derivative)))
}

/// `zeta#` as an [`AnalyticFunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpZeta {
    pub params: SharpParams,
}

impl SharpZeta {
    pub fn new(params: SharpParams) -> Self {
        Self { params }
    }
}

impl AnalyticFunction for SharpZeta {
    fn eval(&self, k: ComplexPoint) -> Result<ComplexPoint> {
        evaluate(&self.params, k)
    }

    fn rounding_floor(&self, k: ComplexPoint) -> Result<f64> {
        rounding_floor(&self.params, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reference_params(b: u32) -> SharpParams {
        SharpParams::new(750.0, 2.0, b).unwrap()
    }

    /// Term `j` rebuilt from scratch: every factor of the product and the
    /// Gaussian quotient evaluated directly, no recurrence.
    fn direct_term(a: f64, d: f64, k: Complex64, j: usize) -> Complex64 {
        let mut prod = c(1.0, 0.0);
        for l in 1..=j {
            let l = l as f64;
            let one = c(1.0, 0.0);
            prod *= (one - (-(l + 2.0 * k - 1.0) / a).exp()) * (one - ((l + k) / a).exp())
                / ((one - (-(l + k - 1.0) / a).exp()) * (1.0 - (l / a).exp()));
        }
        let g = |x: Complex64| (d * x * x / (4.0 * a)).exp() + 1.0;
        prod * g(k) / g(k + j as f64)
    }

    #[test]
    fn params_invariants() {
        let p = reference_params(15);
        assert_eq!(p.terms(), (15.0 * 375f64.sqrt()).floor() as usize);
        assert_eq!(p.terms(), 290);
        assert!((p.epsilon().powi(2) - PI * 750.0 / 4.0).abs() < 1e-12 * p.epsilon().powi(2));
        assert!(p.q() > 0.0 && p.q() < 1.0);
        assert_eq!(p.strip().upper, 2.0 * p.epsilon());
        assert!(SharpParams::new(0.0, 2.0, 15).is_err());
        assert!(SharpParams::new(750.0, -1.0, 15).is_err());
        assert!(SharpParams::new(750.0, 2.0, 0).is_err());
    }

    #[test]
    fn first_ratio_matches_direct_terms() {
        // k = 0 is a removable 0/0 in the l = 1 factor, see degenerate test
        for k in [c(0.5, 0.0), c(0.25, 3.0), c(0.1303, 14.1465)] {
            let p = reference_params(15);
            let ratio = term_ratio(&p, k, 1).unwrap();
            let oracle = direct_term(750.0, 2.0, k, 1) / direct_term(750.0, 2.0, k, 0);
            assert!(
                (ratio - oracle).norm() <= 1e-13 * oracle.norm(),
                "{ratio} vs {oracle}"
            );
        }
    }

    #[test]
    fn ratio_at_origin_is_degenerate() {
        let p = reference_params(15);
        assert_eq!(
            term_ratio(&p, c(0.0, 0.0), 1),
            Err(Error::DegenerateDenominator { j: 1 })
        );
    }

    #[test]
    fn guard_branches_agree_near_threshold() {
        let p = reference_params(15);
        // Re of d (k + j)^2 / 4a is about 689 for k = 1016, j = 1
        let k = c(1016.0, 1.0);
        let unguarded = ratio_with_guard(&p, k, 1, f64::INFINITY).unwrap();
        let forced = ratio_with_guard(&p, k, 1, 0.0).unwrap();
        let rel = (unguarded - forced).norm() / unguarded.norm();
        assert!(rel <= 1e-12, "{rel:e}");
    }

    #[test]
    fn guard_inactive_below_threshold() {
        let p = reference_params(15);
        let k = c(0.7, 20.0);
        for j in [1, 10, 100, 289] {
            let guarded = term_ratio(&p, k, j).unwrap();
            let plain = ratio_with_guard(&p, k, j, f64::INFINITY).unwrap();
            assert_eq!(guarded, plain);
        }
    }

    #[test]
    fn fifth_term_matches_cumulative_product() {
        let p = reference_params(15);
        let k = c(0.1303, 14.1465);
        let mut term = c(1.0, 0.0);
        for j in 1..=5 {
            term *= term_ratio(&p, k, j).unwrap();
        }
        let oracle = direct_term(750.0, 2.0, k, 5);
        assert!((term - oracle).norm() <= 1e-12 * oracle.norm());
    }

    #[test]
    fn single_term_series_is_one() {
        let p = SharpParams::new(750.0, 2.0, 1).unwrap();
        let one_term = SharpParams { terms: 1, ..p };
        for k in [c(0.0, 0.0), c(3.0, 40.0), c(-1.0, -2.0)] {
            assert_eq!(evaluate(&one_term, k).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn evaluation_domain_is_checked() {
        let p = reference_params(15);
        assert!(evaluate(&p, c(0.0, 3.0 * p.epsilon() + 0.1)).is_err());
        assert!(evaluate(&p, c(0.0, -p.epsilon() - 0.1)).is_err());
        assert!(evaluate(&p, c(0.3, -p.epsilon() + 0.1)).is_ok());
    }

    #[test]
    fn converged_zero_is_tiny_relative_to_seed() {
        let p = reference_params(15);
        // high-precision root of the b = 15 truncation
        let root = c(0.130_389_125_879_038, 14.145_005_917_167_339);
        let seed = evaluate(&p, c(0.1303, 14.1465)).unwrap().norm();
        let at_root = evaluate(&p, root).unwrap().norm();
        assert!(at_root / seed <= 1e-5, "{}", at_root / seed);
    }

    #[test]
    fn longer_truncation_changes_nothing() {
        let k = c(0.5, 20.0);
        let short = evaluate(&reference_params(15), k).unwrap();
        let long = evaluate(&reference_params(25), k).unwrap();
        assert!((short - long).norm() <= 1e-9 * long.norm());
    }

    #[test]
    fn truncation_matches_reported_multipliers() {
        assert_eq!(select_truncation(750.0, 2.0, 14.15), 15);
        assert_eq!(select_truncation(750.0, 2.0, 33.1), 15);
        assert_eq!(select_truncation(750.0, 2.0, 34.0), 15);
        assert_eq!(select_truncation(750.0, 2.0, 37.0), 20);
        assert_eq!(select_truncation(750.0, 2.0, 48.1), 20);
        assert_eq!(select_truncation(750.0, 2.0, 49.0), 20);
    }

    #[test]
    fn linear_approximation_first_and_last() {
        let cfg = EtaConfig::default();
        let z1 = linear_approximation(14.1347, 750.0, 2.0, &cfg).unwrap();
        assert!((z1 - c(0.1303, 14.1465)).norm() < 5e-4, "{z1}");
        let z9 = linear_approximation(48.0052, 750.0, 2.0, &cfg).unwrap();
        assert!((z9 - c(3.1103, 47.5578)).norm() < 5e-4, "{z9}");
    }

    #[test]
    fn linear_correction_scales_like_inverse_a() {
        let cfg = EtaConfig::default();
        let y = 14.1347;
        let iy = c(0.0, y);
        let small = (linear_approximation(y, 750.0, 2.0, &cfg).unwrap() - iy).norm();
        let large = (linear_approximation(y, 7500.0, 2.0, &cfg).unwrap() - iy).norm();
        assert!((small / large - 10.0).abs() <= 1e-3 * 10.0);
    }

    #[test]
    fn linear_approximation_tends_to_classical_zero() {
        let z = linear_approximation(14.1347, 1e6, 2.0, &EtaConfig::default()).unwrap();
        assert!(z.re.abs() < 2e-4);
        assert!((z.im - 14.1347).abs() < 2e-4);
    }

    #[test]
    fn linear_approximation_rejects_bad_input() {
        let cfg = EtaConfig::default();
        assert!(linear_approximation(-1.0, 750.0, 2.0, &cfg).is_err());
        assert!(linear_approximation(14.0, 0.0, 2.0, &cfg).is_err());
    }

    #[test]
    fn rounding_floor_bounds_cancellation_noise() {
        // near the ninth zero the terms are some 1e13 times the sum
        let p = SharpParams::new(750.0, 2.0, 20).unwrap();
        let root = c(2.92590201469, 47.8422588676);
        let floor = rounding_floor(&p, root).unwrap();
        let seed = evaluate(&p, c(3.11028, 47.5578)).unwrap().norm();
        assert!(
            floor > 1e-4 * seed && floor < 1e-2 * seed,
            "{floor} vs {seed}"
        );
        let worst = (1..50)
            .map(|i| {
                evaluate(&p, root + c(i as f64 * 1e-13, 0.0))
                    .unwrap()
                    .norm()
            })
            .fold(0.0, f64::max);
        assert!(worst < 3.0 * floor, "{worst} vs {floor}");
        assert!(worst > 0.1 * floor, "{worst} vs {floor}");
    }
}
