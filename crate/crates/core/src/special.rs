//! Riemann zeta, the alternating zeta `zeta_plus(s) = (1 - 2^{1-s}) zeta(s)`
//! (Dirichlet eta) and its derivative at complex arguments, plus the
//! ordinates of the first nontrivial zeta zeros.
//!
//! Everything is evaluated with Euler-Maclaurin summation
//!
//! ```text
//! zeta(s) = sum_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
//!         + sum_{k=1}^{m} B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{1-s-2k}
//! ```
//!
//! which is uniformly accurate on `Re s >= -2`, `|Im s| <= 200` once `N`
//! exceeds a small multiple of `|s|`. The number of direct terms `N` is
//! picked per argument so that the first omitted correction is below the
//! configured target error.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::cmath;
use crate::error::{Error, Result};

pub type ComplexPoint = Complex64;

/// `B_{2k} / (2k)!` for `k = 1..=9`. The last entry is only used to bound
/// the truncation error of an order-16 expansion.
const BERNOULLI_OVER_FACTORIAL: [f64; 9] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
];

/// Ordinates of the first nine nontrivial zeros of zeta, used to validate
/// the Hardy-Z search.
pub const REFERENCE_ORDINATES: [f64; 9] = [
    14.134_725_141_734_694,
    21.022_039_638_771_555,
    25.010_857_580_145_69,
    30.424_876_125_859_513,
    32.935_061_587_739_19,
    37.586_178_158_825_67,
    40.918_719_012_147_5,
    43.327_073_280_915,
    48.005_150_881_167_16,
];

const MAX_IM: f64 = 200.0;
const MIN_RE: f64 = -2.0;
const HARDY_GRID_STEP: f64 = 0.05;
const HARDY_GRID_START: f64 = 1.0;

/// Accuracy controls for the zeta family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaConfig {
    pub target_abs_error: f64,
    pub max_terms: usize,
    /// Highest Bernoulli index used in the correction sum.
    pub euler_maclaurin_order: usize,
}

impl Default for EtaConfig {
    fn default() -> Self {
        Self {
            target_abs_error: 1e-12,
            max_terms: 10_000,
            euler_maclaurin_order: 8,
        }
    }
}

impl EtaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_error > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "target_abs_error must be positive, got {}",
                self.target_abs_error
            )));
        }
        let order = self.euler_maclaurin_order;
        if !(2..=16).contains(&order) || !order.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "euler_maclaurin_order must be even and in 2..=16, got {order}"
            )));
        }
        if self.max_terms < 20 {
            return Err(Error::InvalidParameter(format!(
                "max_terms must be at least 20, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }

    fn corrections(&self) -> usize {
        self.euler_maclaurin_order / 2
    }
}

fn check_region(s: Complex64) -> Result<()> {
    if !cmath::is_finite(s) || s.re < MIN_RE || s.im.abs() > MAX_IM {
        return Err(Error::RangeUnsupported { re: s.re, im: s.im });
    }
    Ok(())
}

/// `s(s+1)...(s+2k-2)` and its derivative, for `k = 1..=count`.
fn rising_products(s: Complex64, count: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::with_capacity(count);
    let (mut p, mut dp) = (s, Complex64::new(1.0, 0.0));
    out.push((p, dp));
    for k in 2..=count {
        for shift in [2 * k - 3, 2 * k - 2] {
            let factor = s + shift as f64;
            dp = dp * factor + p;
            p *= factor;
        }
        out.push((p, dp));
    }
    out
}

/// Smallest `N` (and the order actually used) for which the first omitted
/// correction is below budget. The configured order is a floor: when the
/// direct sum would be large enough for rounding to dominate (far left of
/// the critical line), the order is raised, up to 16, to keep `N` small.
fn direct_terms(s: Complex64, cfg: &EtaConfig) -> Result<(usize, usize)> {
    let budget = 0.25 * cfg.target_abs_error;
    let products = rising_products(s, BERNOULLI_OVER_FACTORIAL.len());
    let start = (s.im.abs().ceil() as usize).max(20);
    let mut fallback = None;
    for m in (cfg.corrections()..=8).filter(|m| *m >= 1) {
        let next = products[m].0.norm() * BERNOULLI_OVER_FACTORIAL[m].abs();
        let mut n = start;
        let found = loop {
            if n > cfg.max_terms {
                break None;
            }
            let nf = n as f64;
            let omitted = next * nf.powf(1.0 - s.re - 2.0 * (m as f64 + 1.0));
            if omitted <= budget {
                break Some(n);
            }
            n = ((nf * 1.25).ceil() as usize).max(n + 1);
        };
        let Some(n) = found else { continue };
        // rounding in the direct sum: eps * sum_{n<N} n^{-Re s}
        let magnitude = (n as f64).powf(1.0 - s.re).max(n as f64);
        if magnitude * f64::EPSILON <= budget {
            return Ok((n, m));
        }
        if fallback.is_none_or(|(best, _)| n < best) {
            fallback = Some((n, m));
        }
    }
    fallback.ok_or(Error::TermBudgetExceeded {
        re: s.re,
        im: s.im,
        max_terms: cfg.max_terms,
    })
}

/// The pole-free part of the Euler-Maclaurin expansion together with its
/// derivative: everything except `N^{1-s}/(s-1)`.
struct Expansion {
    n: f64,
    log_n: f64,
    /// `N^{1-s}`
    n_pow: Complex64,
    regular: Complex64,
    regular_deriv: Complex64,
}

impl Expansion {
    fn new(s: Complex64, cfg: &EtaConfig) -> Result<Self> {
        let (n_terms, m) = direct_terms(s, cfg)?;
        let mut regular = Complex64::new(0.0, 0.0);
        let mut regular_deriv = Complex64::new(0.0, 0.0);
        for n in 1..n_terms {
            let ln = (n as f64).ln();
            let term = cmath::exp(-s * ln);
            regular += term;
            regular_deriv -= term * ln;
        }
        let n = n_terms as f64;
        let log_n = n.ln();
        let n_pow_neg_s = cmath::exp(-s * log_n);
        regular += 0.5 * n_pow_neg_s;
        regular_deriv -= 0.5 * log_n * n_pow_neg_s;

        let products = rising_products(s, m);
        for (k, (p, dp)) in products.into_iter().enumerate() {
            let power = n_pow_neg_s * n.powi(1 - 2 * (k as i32 + 1));
            let coeff = BERNOULLI_OVER_FACTORIAL[k];
            regular += coeff * p * power;
            regular_deriv += coeff * (dp - log_n * p) * power;
        }
        Ok(Self {
            n,
            log_n,
            n_pow: n_pow_neg_s * n,
            regular,
            regular_deriv,
        })
    }
}

/// Riemann zeta at a complex argument with `Re s >= -2`, `|Im s| <= 200`.
pub fn riemann_zeta(s: ComplexPoint, cfg: &EtaConfig) -> Result<ComplexPoint> {
    cfg.validate()?;
    check_region(s)?;
    let w = s - 1.0;
    if w.norm() < 1e-12 {
        return Err(Error::PoleAtOne);
    }
    let e = Expansion::new(s, cfg)?;
    debug_assert!(e.n >= 20.0);
    Ok(e.regular + e.n_pow / w)
}

/// `(1 - 2^{-w}) / w` and its derivative, analytic through `w = 0`.
fn eta_pole_factor(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() < 0.1 {
        // sum_{n>=0} (-1)^n L^{n+1} w^n / (n+1)!
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        let mut coeff = LN_2;
        let mut w_pow = Complex64::new(1.0, 0.0);
        let mut w_pow_prev = Complex64::new(0.0, 0.0);
        for n in 0..16 {
            let signed = if n % 2 == 0 { coeff } else { -coeff };
            g += signed * w_pow;
            dg += signed * n as f64 * w_pow_prev;
            w_pow_prev = w_pow;
            w_pow *= w;
            coeff *= LN_2 / (n as f64 + 2.0);
        }
        (g, dg)
    } else {
        let em1 = cmath::expm1(-w * LN_2);
        let g = -em1 / w;
        let dg = (LN_2 * (em1 + 1.0) * w + em1) / (w * w);
        (g, dg)
    }
}

fn zeta_plus_with_derivative(s: Complex64, cfg: &EtaConfig) -> Result<(Complex64, Complex64)> {
    cfg.validate()?;
    check_region(s)?;
    let e = Expansion::new(s, cfg)?;
    let w = s - 1.0;
    // A(s) = 1 - 2^{1-s}
    let two_pow = cmath::exp(-w * LN_2);
    let a = -cmath::expm1(-w * LN_2);
    let da = LN_2 * two_pow;
    let (g, dg) = eta_pole_factor(w);
    let value = a * e.regular + e.n_pow * g;
    let deriv = da * e.regular + a * e.regular_deriv - e.log_n * e.n_pow * g + e.n_pow * dg;
    Ok((value, deriv))
}

/// `zeta_plus(s) = (1 - 2^{1-s}) zeta(s)`; finite at `s = 1` where it equals `ln 2`.
pub fn zeta_plus(s: ComplexPoint, cfg: &EtaConfig) -> Result<ComplexPoint> {
    zeta_plus_with_derivative(s, cfg).map(|(v, _)| v)
}

/// Analytic derivative of [`zeta_plus`], from the termwise differentiated expansion.
pub fn zeta_plus_derivative(s: ComplexPoint, cfg: &EtaConfig) -> Result<ComplexPoint> {
    zeta_plus_with_derivative(s, cfg).map(|(_, d)| d)
}

/// Riemann-Siegel theta by its Stirling asymptotic; accurate to ~1e-4 at
/// `t = 1` and far better beyond.
fn riemann_siegel_theta(t: f64) -> f64 {
    let t3 = t * t * t;
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t3)
        + 31.0 / (80_640.0 * t3 * t * t)
}

/// Hardy's function `Z(t) = e^{i theta(t)} zeta(1/2 + it)`, real for real `t`.
pub fn hardy_z(t: f64, cfg: &EtaConfig) -> Result<f64> {
    let z = riemann_zeta(Complex64::new(0.5, t), cfg)?;
    Ok((cmath::unit(riemann_siegel_theta(t)) * z).re)
}

/// Ordinates `0 < y <= y_max` of nontrivial zeta zeros, increasing.
///
/// Sign changes of [`hardy_z`] on a 0.05 grid are refined by bisection and
/// checked against [`REFERENCE_ORDINATES`].
pub fn classical_zeros(y_max: f64, cfg: &EtaConfig) -> Result<Vec<f64>> {
    if !(y_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "y_max must be positive, got {y_max}"
        )));
    }
    if y_max > 100.0 {
        return Err(Error::RangeUnsupported { re: 0.5, im: y_max });
    }
    let mut zeros = Vec::new();
    if y_max <= HARDY_GRID_START {
        return Ok(zeros);
    }
    let steps = ((y_max - HARDY_GRID_START) / HARDY_GRID_STEP).ceil() as usize;
    let mut lo = HARDY_GRID_START;
    let mut z_lo = hardy_z(lo, cfg)?;
    for i in 1..=steps {
        let hi = (HARDY_GRID_START + i as f64 * HARDY_GRID_STEP).min(y_max);
        let z_hi = hardy_z(hi, cfg)?;
        if z_lo == 0.0 {
            zeros.push(lo);
        } else if z_lo * z_hi < 0.0 {
            zeros.push(bisect_hardy(lo, hi, z_lo, cfg)?);
        }
        lo = hi;
        z_lo = z_hi;
    }
    if z_lo == 0.0 {
        zeros.push(lo);
    }
    for &reference in REFERENCE_ORDINATES.iter().filter(|&&r| r <= y_max) {
        let nearest = zeros
            .iter()
            .copied()
            .min_by(|a, b| (a - reference).abs().total_cmp(&(b - reference).abs()));
        match nearest {
            Some(y) if (y - reference).abs() <= 1e-6 => {}
            other => {
                return Err(Error::ReferenceMismatch {
                    computed: other.unwrap_or(f64::NAN),
                    reference,
                })
            }
        }
    }
    Ok(zeros)
}

fn bisect_hardy(mut lo: f64, mut hi: f64, mut z_lo: f64, cfg: &EtaConfig) -> Result<f64> {
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        let z_mid = hardy_z(mid, cfg)?;
        if z_mid == 0.0 {
            return Ok(mid);
        }
        if z_lo * z_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            z_lo = z_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
