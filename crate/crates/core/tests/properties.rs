use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use mbios_bounds::channels::{Channel, LlrDensity};
use mbios_bounds::ensembles::{builtin, EnsembleSpec, BUILTIN_NAMES};
use mbios_bounds::numerics::{h2, h2_series_truncated, integrate, Interval, ToleranceSpec};
use mbios_bounds::quantized::{
    density_bound_coeffs, optimize_levels, rate_upper_bound_2level, rate_upper_bound_quantized, DensityMethod,
};
use mbios_bounds::unquantized::{rate_upper_bound_unquantized, SeriesConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn truncated_series_stays_above_h2(x in 0.0f64..=1.0, m in 1usize..30) {
        let exact = h2(x).unwrap();
        let a = h2_series_truncated(x, m).unwrap();
        let b = h2_series_truncated(x, m + 1).unwrap();
        prop_assert!(a >= exact - 1e-15);
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn integration_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let tol = ToleranceSpec::default();
        let dom = Interval { lo: 0.0, hi: f64::INFINITY };
        let f = |x: f64| (-x).exp();
        let g = |x: f64| (-x * x).exp();
        let lhs = integrate(|x| a * f(x) + b * g(x), dom, &tol).unwrap();
        let rhs = a * integrate(f, dom, &tol).unwrap() + b * integrate(g, dom, &tol).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }
}

#[test]
fn truncation_gap_is_small_away_from_endpoints() {
    for i in 0..=1000 {
        let x = i as f64 / 1000.0;
        // at 0.02 itself the gap is about 6.5e-3
        if x < 0.025 || x > 0.975 {
            continue;
        }
        let gap = h2_series_truncated(x, 10).unwrap() - h2(x).unwrap();
        assert!(gap < 5e-3, "x = {x}: gap {gap}");
    }
}

#[test]
fn builtins_reproduce_their_design_rates() {
    for name in BUILTIN_NAMES {
        let spec = builtin(name).unwrap();
        assert!(spec.design_rate > 0.0 && spec.design_rate < 1.0, "{name}");
        let dk = spec.dk();
        let total: f64 = dk.fractions().values().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }
    assert!(builtin("gallager_9_9").is_err());
}

#[test]
fn ensemble_file_matches_builtin() {
    let text = r#"{"name": "g36", "lambda": [[3, 1.0]], "rho": [[6, 1.0]]}"#;
    let spec = EnsembleSpec::from_json(text).unwrap();
    let reference = builtin("gallager_3_6").unwrap();
    assert_abs_diff_eq!(spec.design_rate, reference.design_rate, epsilon = 1e-12);
    assert_eq!(spec.dk(), reference.dk());
}

#[test]
fn custom_gaussian_density_behaves_like_biawgn() {
    let sigma: f64 = 0.9;
    let var = 4.0 / (sigma * sigma);
    let text = format!(r#"{{"continuous": {{"type": "gaussian", "mean": {}, "var": {var}}}}}"#, var / 2.0);
    let custom = Channel::custom(LlrDensity::from_json(&text).unwrap()).unwrap();
    let reference = Channel::biawgn(sigma).unwrap();
    assert_abs_diff_eq!(custom.capacity().unwrap(), reference.capacity().unwrap(), epsilon = 1e-9);
    assert_abs_diff_eq!(custom.error_weight_w(), reference.error_weight_w(), epsilon = 1e-12);
    assert_abs_diff_eq!(custom.quantity_a().unwrap(), reference.quantity_a().unwrap(), epsilon = 1e-9);
}

#[test]
fn asymmetric_density_is_rejected() {
    let text = r#"{"atoms": [[1.0, 0.5], [-1.0, 0.5]]}"#;
    assert!(LlrDensity::from_json(text).is_err());
}

#[test]
fn bsc_quantizer_collapses_to_hard_decisions() {
    let eps = 0.08;
    let ch = Channel::bsc(eps).unwrap();
    let q = optimize_levels(&ch, 2).unwrap();
    assert_abs_diff_eq!(q.chi, (1.0 - 2.0 * eps).powi(2), epsilon = 1e-12);
    let dk = builtin("gallager_3_6").unwrap().dk();
    let two = rate_upper_bound_2level(&ch, &dk).unwrap();
    let quant = rate_upper_bound_quantized(&ch, &dk, 2).unwrap();
    assert!(quant <= two + 1e-12);
    let a = density_bound_coeffs(&ch, DensityMethod::Quantized(2)).unwrap();
    let b = density_bound_coeffs(&ch, DensityMethod::TwoLevel).unwrap();
    assert_abs_diff_eq!(a.k1, b.k1, epsilon = 1e-9);
    assert_abs_diff_eq!(a.k2, b.k2, epsilon = 1e-9);
}

#[test]
fn bounds_never_exceed_capacity() {
    let dk = builtin("table2_row1").unwrap().dk();
    for sigma in [0.5, 0.8, 1.1, 1.5] {
        let ch = Channel::biawgn(sigma).unwrap();
        let c = ch.capacity().unwrap();
        assert!(rate_upper_bound_2level(&ch, &dk).unwrap() <= c + 1e-12);
        assert!(rate_upper_bound_unquantized(&ch, &dk, SeriesConfig::default()).unwrap() <= c + 1e-12);
    }
}
