use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use qzeros::locator::{initial_rectangle, SearchConfig};
use qzeros::poly::Polynomial;
use qzeros::sharp::{
    linear_approximation, partial_sum, select_truncation, term_ratio, SharpParams,
};
use qzeros::special::{zeta_plus, zeta_plus_derivative, EtaConfig, REFERENCE_ORDINATES};
use qzeros::winding::{
    compute_char, integrate, moment_zero_estimate, refine_trace, sample_boundary, Rectangle,
    GAP_THRESHOLD, MAX_REFINE_DEPTH,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_point(rng: &mut ChaCha8Rng, half: f64) -> Complex64 {
    c(rng.gen_range(-half..half), rng.gen_range(-half..half))
}

/// Distance from `z` to the boundary of `rect`.
fn boundary_distance(rect: &Rectangle, z: Complex64) -> f64 {
    let dx = (z.re - rect.center.re).abs() - rect.rd;
    let dy = (z.im - rect.center.im).abs() - rect.rad;
    if dx <= 0.0 && dy <= 0.0 {
        (-dx).min(-dy)
    } else {
        dx.max(0.0).hypot(dy.max(0.0))
    }
}

#[test]
fn winding_is_integral_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked_counts = 0;
    for _ in 0..200 {
        let degree = rng.gen_range(1..=6);
        let roots: Vec<Complex64> = (0..degree).map(|_| random_point(&mut rng, 2.0)).collect();
        let p = Polynomial::from_roots(&roots);
        let rd = rng.gen_range(0.3..1.5);
        let rect = Rectangle::new(random_point(&mut rng, 1.0), rd, rd / 2.0).unwrap();
        let c_points = rng.gen_range(4..=12);
        let trace = sample_boundary(&p, rect, c_points).unwrap();
        let trace = refine_trace(&p, trace, GAP_THRESHOLD, MAX_REFINE_DEPTH).unwrap();
        let char = compute_char(&trace);
        assert!((char - char.round()).abs() < 0.02, "char {char}");

        // with every root well away from the contour the count is also right
        if roots
            .iter()
            .all(|&r| boundary_distance(&rect, r) > 0.25 * rect.rad)
        {
            let inside = roots.iter().filter(|&&r| rect.contains(r)).count() as f64;
            assert!(
                (trace.winding() - inside).abs() < 0.02,
                "winding {} vs {inside}",
                trace.winding()
            );
            checked_counts += 1;
        }
    }
    assert!(checked_counts > 50, "only {checked_counts} count checks");
}

#[test]
fn refinement_never_widens_gaps_when_every_root_is_enclosed() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..100 {
        let rd = rng.gen_range(0.3..1.5);
        let rect = Rectangle::new(random_point(&mut rng, 1.0), rd, rd / 2.0).unwrap();
        let degree = rng.gen_range(1..=5);
        let roots: Vec<Complex64> = (0..degree)
            .map(|_| {
                rect.center
                    + c(
                        rng.gen_range(-0.9..0.9) * rect.rd,
                        rng.gen_range(-0.9..0.9) * rect.rad,
                    )
            })
            .collect();
        let p = Polynomial::from_roots(&roots);
        let base = sample_boundary(&p, rect, rng.gen_range(4..=8)).unwrap();
        let refined = refine_trace(&p, base.clone(), GAP_THRESHOLD, MAX_REFINE_DEPTH).unwrap();
        assert!(
            refined.max_gap() <= base.max_gap() + 1e-12,
            "{} > {}",
            refined.max_gap(),
            base.max_gap()
        );
    }
}

#[test]
fn boundary_runs_counterclockwise() {
    let rect = Rectangle::new(c(0.3, 0.7), 0.4, 0.2).unwrap();
    let result = integrate(&|k: Complex64| k - c(0.35, 0.68), rect, 4).unwrap();
    assert!((result.trace.winding() - 1.0).abs() < 1e-9);
    let reversed = integrate(&|k: Complex64| 1.0 / (k - c(0.35, 0.68)), rect, 4).unwrap();
    assert!((reversed.trace.winding() + 1.0).abs() < 1e-9);
    let first = result.trace.samples[0].point;
    assert_eq!(first, c(0.3 - 0.4, 0.7 - 0.2));
}

#[test]
fn argument_principle_counts_zeros_minus_poles() {
    let zeros = [c(0.1, 0.05), c(-0.2, -0.03), c(3.0, 3.0)];
    let poles = [c(0.15, -0.05), c(-4.0, 1.0)];
    let f = move |k: Complex64| {
        let num = zeros.iter().fold(c(1.0, 0.0), |acc, z| acc * (k - z));
        let den = poles.iter().fold(c(1.0, 0.0), |acc, p| acc * (k - p));
        num / den
    };
    let rect = Rectangle::new(c(0.0, 0.0), 0.5, 0.25).unwrap();
    let result = integrate(&f, rect, 8).unwrap();
    assert!((result.trace.winding() - 1.0).abs() < 1e-9);
    assert!((result.char - 0.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moment_recovers_cubic_roots(
        center in (-1.0f64..1.0, -1.0f64..1.0),
        offset in (-0.3f64..0.3, -0.3f64..0.3),
        rd in 0.2f64..1.0,
        far in (0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::TAU),
    ) {
        let rect = Rectangle::new(c(center.0, center.1), rd, rd / 2.0).unwrap();
        let inside = rect.center + c(offset.0 * rd, offset.1 * rd / 2.0);
        let diam = rect.diameter();
        let roots = [
            inside,
            rect.center + Complex64::from_polar(3.0 * diam, far.0),
            rect.center + Complex64::from_polar(4.0 * diam, far.1),
        ];
        let p = Polynomial::from_roots(&roots);
        let result = integrate(&p, rect, 4000).unwrap();
        prop_assert!((result.char).abs() < 0.02);
        let estimate = moment_zero_estimate(&result.trace);
        prop_assert!((estimate - inside).norm() < 1e-4 * diam, "error {}", (estimate - inside).norm() / diam);
    }
}

#[test]
fn eta_identities() {
    let cfg = EtaConfig::default();
    assert!((zeta_plus(c(1.0, 0.0), &cfg).unwrap() - LN_2).norm() < 1e-10);
    assert!((zeta_plus(c(0.0, 0.0), &cfg).unwrap() - 0.5).norm() < 1e-10);
    let slope = zeta_plus_derivative(c(0.0, 0.0), &cfg).unwrap();
    assert!((slope - 0.5 * (PI / 2.0).ln()).norm() < 1e-10);
}

#[test]
fn eta_derivative_matches_central_differences() {
    let cfg = EtaConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-5;
    for _ in 0..50 {
        let s = c(rng.gen_range(-1.0..2.5), rng.gen_range(0.0..50.0));
        let exact = zeta_plus_derivative(s, &cfg).unwrap();
        let numeric =
            (zeta_plus(s + h, &cfg).unwrap() - zeta_plus(s - h, &cfg).unwrap()) / (2.0 * h);
        let err = (exact - numeric).norm() / exact.norm().max(1.0);
        assert!(err < 1e-6, "s = {s}: {err}");
    }
}

/// `sum |term_j|` over the first `n` terms: the magnitude scale of the series at `k`.
fn term_scale(params: &SharpParams, k: Complex64, n: usize) -> f64 {
    let mut term = c(1.0, 0.0);
    let mut scale = 1.0;
    for j in 1..n {
        term *= term_ratio(params, k, j).unwrap();
        scale += term.norm();
    }
    scale
}

#[test]
fn series_tail_is_negligible_on_search_rectangles() {
    let (a, d) = (750.0, 2.0);
    let eta = EtaConfig::default();
    let cfg = SearchConfig::default();
    for y in REFERENCE_ORDINATES {
        let za = linear_approximation(y, a, d, &eta).unwrap();
        let params = SharpParams::new(a, d, select_truncation(a, d, za.norm() + 0.5)).unwrap();
        let rect = initial_rectangle(za, y, &cfg).unwrap();
        let points = 16;
        for side in 0..4u8 {
            for i in 0..points {
                let k = rect.boundary_point(side, i as f64 / points as f64);
                let short = partial_sum(&params, k, params.terms()).unwrap();
                let long = partial_sum(&params, k, params.terms() + 50).unwrap();
                let rel = (long - short).norm() / term_scale(&params, k, params.terms());
                assert!(rel < 1e-8, "y = {y}, k = {k}: {rel}");
            }
        }
    }
}
