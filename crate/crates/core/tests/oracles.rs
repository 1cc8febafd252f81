//! Expected values from routes that do not share code with the pipeline.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rootcert::rational::{int, rat, to_f64};
use rootcert::root_maps::{halley_identity_holds, map_eval, root, weights_for};
use rootcert::verification::{binomial_root_series_by_recurrence, iterate_series};
use rootcert::{
    binomial_root_series, compute_b, halley_weights, map_series, newton_weights, MapKind, Method,
    Rational, RootParameter, Series, SeriesRoute,
};

fn one_minus_z(order: usize) -> Series<Rational> {
    Series::from_polynomial(vec![int(1), int(-1)], order).unwrap()
}

fn binomial(n: u64, k: u64) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| {
        acc * rat((n - i) as i64, (i + 1) as i64)
    })
}

#[test]
fn halley_weight_identity_up_to_200() {
    for p in [2, 3, 5, 10] {
        for n in 2..=200 {
            assert!(halley_identity_holds(&root(p), n), "p={p} n={n}");
        }
    }
}

#[test]
fn halley_weights_by_hand() {
    let a = halley_weights(&root(2));
    assert_eq!(a.prefix(4), vec![int(1), int(1), rat(13, 16), rat(5, 8)]);
    let a = halley_weights(&root(3));
    assert_eq!(a.value(3), rat(7, 9));
}

#[test]
fn newton_b_is_negative_binomial() {
    // exp(Σ p^{1-n} z^n / n) = (1 - z/p)^{-p}
    for p in [2u64, 3, 5, 10] {
        let b = compute_b(&newton_weights(&root(p as u32)), 80).unwrap();
        for (n, bn) in b.iter().enumerate() {
            let expected = binomial(n as u64 + p - 1, p - 1) / int(p as i64).pow(n as i32);
            assert_eq!(bn, &expected, "p={p} n={n}");
        }
    }
}

#[test]
fn binomial_series_raised_to_p_is_one_minus_z() {
    for p in 2..=10u32 {
        let s = binomial_root_series(&root(p), 64).unwrap();
        assert_eq!(s.pow(p), one_minus_z(64), "p={p}");
        assert_eq!(
            s,
            binomial_root_series_by_recurrence(&root(p), 64).unwrap(),
            "p={p}"
        );
    }
}

#[test]
fn map_series_routes_agree() {
    for p in [2, 3, 5] {
        for which in [MapKind::F, MapKind::G] {
            let closed = map_series(&root(p), which, 64, SeriesRoute::ClosedForm).unwrap();
            let weights = map_series(&root(p), which, 64, SeriesRoute::Weights).unwrap();
            assert_eq!(closed, weights, "{which} p={p}");
        }
    }
}

#[test]
fn g_cubic_coefficient_is_weight_drop_over_three() {
    for p in 2..=10 {
        let a = halley_weights(&root(p));
        let g = map_series(&root(p), MapKind::G, 6, SeriesRoute::ClosedForm).unwrap();
        assert!(g.coeff(1).is_zero() && g.coeff(2).is_zero());
        assert_eq!(g.coeff(3), &((a.value(2) - a.value(3)) / int(3)), "p={p}");
    }
}

/// Residual series `1 - (1 - z) / X^p` of an iterate series `X`.
fn residual_series(x: &Series<Rational>, p: u32) -> Series<Rational> {
    let order = x.order();
    let ratio = one_minus_z(order)
        .mul(&x.pow(p).reciprocal().unwrap())
        .unwrap();
    Series::one(order).sub(&ratio).unwrap()
}

#[test]
fn composed_maps_are_iterate_residuals() {
    let f = map_series(&root(2), MapKind::F, 8, SeriesRoute::ClosedForm).unwrap();
    let u2 = iterate_series(&root(2), Method::Newton, 2, 8).unwrap();
    assert_eq!(f.compose(&f).unwrap(), residual_series(&u2, 2));

    let g = map_series(&root(3), MapKind::G, 12, SeriesRoute::ClosedForm).unwrap();
    let v2 = iterate_series(&root(3), Method::Halley, 2, 12).unwrap();
    assert_eq!(g.compose(&g).unwrap(), residual_series(&v2, 3));
}

/// Cauchy-integral coefficients `(1 / M r^n) Σ_j F(r ω^j) ω^{-jn}`.
fn numeric_coefficients(p: &RootParameter, which: MapKind, count: usize) -> Vec<f64> {
    const M: usize = 256;
    const R: f64 = 0.5;
    let values: Vec<Complex64> = (0..M)
        .map(|j| {
            let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / M as f64);
            map_eval(p, which, w * R).unwrap()
        })
        .collect();
    (0..count)
        .map(|n| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * Complex64::from_polar(
                        1.0,
                        -std::f64::consts::TAU * (j * n) as f64 / M as f64,
                    )
                })
                .sum();
            sum.re / (M as f64 * R.powi(n as i32))
        })
        .collect()
}

#[test]
fn exact_coefficients_match_cauchy_integrals() {
    for p in ["2", "3", "5/2", "7/3"] {
        let p = RootParameter::parse(p).unwrap();
        for which in [MapKind::F, MapKind::G] {
            let exact = map_series(&p, which, 16, SeriesRoute::Weights).unwrap();
            let numeric = numeric_coefficients(&p, which, 17);
            for (n, (e, x)) in exact.coeffs().iter().zip(&numeric).enumerate() {
                assert!(
                    (to_f64(e) - x).abs() < 1e-9,
                    "{which} p={p} n={n}: {e} vs {x}"
                );
            }
        }
    }
}

#[test]
fn weights_for_picks_the_method_weights() {
    let p = root(4);
    assert_eq!(
        weights_for(&p, MapKind::F).prefix(6),
        newton_weights(&p).prefix(6)
    );
    assert_eq!(
        weights_for(&p, MapKind::G).prefix(6),
        halley_weights(&p).prefix(6)
    );
    assert_eq!(newton_weights(&p).value(3), rat(1, 16));
}
