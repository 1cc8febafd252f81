//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use rootcert::rational::{int, rat};
use rootcert::root_maps::{halley_weights, map_series, root, weights_for};
use rootcert::theorem::{
    certify, compute_b, compute_c_from_convolution, compute_c_from_differences,
};
use rootcert::verification::{
    binomial_root_series, check_map_contraction, check_no_pole_no_zero, check_prefix_agreement,
    check_residual_bounds, estimate_convergence_order, iterate_series, DiskSamplingPlan,
};
use rootcert::{MapKind, Method, Rational, SeriesRoute};

const CERT_PS: [u32; 6] = [2, 3, 4, 5, 7, 10];
const CERT_ORDER: usize = 200;
const CERT_BUDGET_SECS: f64 = 10.0;
const CONTRACTION_PS: [u32; 4] = [2, 3, 5, 10];
const SMALL_PS: [u32; 3] = [2, 3, 5];
const MIN_SAMPLES: usize = 12_000;
const SERIES_ORDER: usize = 64;
const NEWTON_K_MAX: usize = 4;
const HALLEY_K_MAX: usize = 3;
const NEWTON_WINDOW: (f64, f64) = (1.8, 2.2);
const HALLEY_WINDOW: (f64, f64) = (2.8, 3.2);
const MODULUS_FLOOR: f64 = 0.1;

type Criterion<'a> = (&'a str, Box<dyn Fn() -> Verdict>);

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn methods() -> [Method; 2] {
    [Method::Newton, Method::Halley]
}

fn criterion_1() -> Verdict {
    let cases: Vec<(u32, Method)> = CERT_PS
        .iter()
        .flat_map(|&p| methods().map(|m| (p, m)))
        .collect();
    let start = Instant::now();
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|&(p, m)| {
            let a = weights_for(&root(p), m.residual_map());
            match certify(&a, CERT_ORDER) {
                Ok(c) if c.all_passed() && c.ell == m.residual_map().ell() => None,
                Ok(c) => Some(format!(
                    "{} ell={} failed {:?}",
                    c.label,
                    c.ell,
                    c.failed_checks()
                )),
                Err(e) => Some(format!("{}: {e}", a.label())),
            }
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(
        failures.is_empty() && secs < CERT_BUDGET_SECS,
        format!(
            "{} certificates at N={CERT_ORDER} in {secs:.2}s (budget {CERT_BUDGET_SECS}s); failures: {failures:?}",
            cases.len()
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut mismatches = Vec::new();
    for &p in &CERT_PS {
        for m in methods() {
            let a = weights_for(&root(p), m.residual_map());
            let b = compute_b(&a, CERT_ORDER).expect("weights are positive");
            if compute_c_from_differences(&b) != compute_c_from_convolution(&a, &b, CERT_ORDER) {
                mismatches.push(format!("c routes differ for {}", a.label()));
            }
        }
    }
    for &p in &SMALL_PS {
        for which in [MapKind::F, MapKind::G] {
            let closed =
                map_series(&root(p), which, SERIES_ORDER, SeriesRoute::ClosedForm).unwrap();
            let weights = map_series(&root(p), which, SERIES_ORDER, SeriesRoute::Weights).unwrap();
            if closed != weights {
                mismatches.push(format!("map_series routes differ for {which} p={p}"));
            }
        }
    }
    Verdict::new(
        mismatches.is_empty(),
        format!("12 c-vector pairs at N={CERT_ORDER}, 6 map_series pairs at N={SERIES_ORDER}; mismatches: {mismatches:?}"),
    )
}

fn criterion_3() -> Verdict {
    let p = root(2);
    let f = map_series(&p, MapKind::F, 8, SeriesRoute::ClosedForm).unwrap();
    let g = map_series(&p, MapKind::G, 8, SeriesRoute::ClosedForm).unwrap();
    let binomial = binomial_root_series(&p, 8).unwrap();
    let expected_binomial: Vec<Rational> =
        vec![int(1), rat(-1, 2), rat(-1, 8), rat(-1, 16), rat(-5, 128)];
    let checks = [
        ("f c_2 = 1/4", *f.coeff(2) == rat(1, 4)),
        ("f c_3 = 1/4", *f.coeff(3) == rat(1, 4)),
        ("g c_3 = 1/16", *g.coeff(3) == rat(1, 16)),
        (
            "halley a_3 = 13/16",
            halley_weights(&p).value(3) == rat(13, 16),
        ),
        (
            "binomial prefix",
            binomial.coeffs()[..5] == expected_binomial[..],
        ),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
    Verdict::new(
        failed.is_empty(),
        format!("{} exact spot values; failed: {failed:?}", checks.len()),
    )
}

fn criterion_4(plan: &DiskSamplingPlan) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for &p in &CONTRACTION_PS {
        for which in [MapKind::F, MapKind::G] {
            let r = check_map_contraction(&root(p), which, plan).unwrap();
            ok &= r.holds() && r.sample_count >= MIN_SAMPLES;
            parts.push(format!(
                "{which} p={p}: {} samples, {} violations, max log ratio {:.4}",
                r.sample_count,
                r.violations.len(),
                r.max_log_ratio
            ));
        }
    }
    Verdict::new(ok, parts.join("; "))
}

fn criterion_5(plan: &DiskSamplingPlan) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for &p in &SMALL_PS {
        for (m, k_max) in [
            (Method::Newton, NEWTON_K_MAX),
            (Method::Halley, HALLEY_K_MAX),
        ] {
            for r in check_residual_bounds(&root(p), m, k_max, plan).unwrap() {
                ok &= r.holds();
                parts.push(format!(
                    "{m} p={p} k={}: {} violations, {} underflowed",
                    r.k,
                    r.violations.len(),
                    r.underflow_count
                ));
            }
        }
    }
    Verdict::new(ok, parts.join("; "))
}

fn criterion_6() -> Verdict {
    let mut ok = true;
    let mut short = Vec::new();
    for &p in &SMALL_PS {
        for (m, k_max) in [
            (Method::Newton, NEWTON_K_MAX),
            (Method::Halley, HALLEY_K_MAX),
        ] {
            for k in 1..=k_max {
                let r = check_prefix_agreement(&root(p), m, k, SERIES_ORDER).unwrap();
                if !r.holds() {
                    ok = false;
                    short.push(format!(
                        "{m} p={p} k={k}: {} < {}",
                        r.prefix_len, r.required
                    ));
                }
            }
        }
    }
    let v1 = iterate_series(&root(2), Method::Halley, 1, 8)
        .unwrap()
        .coeff(3)
        .clone();
    let target = binomial_root_series(&root(2), 8).unwrap().coeff(3).clone();
    let sharp = v1 == rat(-1, 32) && target == rat(-1, 16);
    ok &= sharp;
    Verdict::new(
        ok,
        format!("short prefixes: {short:?}; halley p=2 k=1 z^3: {v1} vs {target}"),
    )
}

fn criterion_7() -> Verdict {
    let z = Complex64::new(0.5, 0.0);
    let p = root(2);
    let newton = estimate_convergence_order(&p, Method::Newton, z, 4).unwrap();
    let halley = estimate_convergence_order(&p, Method::Halley, z, 3).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (est, ks, (lo, hi)) in [
        (&newton, 1..=3, NEWTON_WINDOW),
        (&halley, 1..=2, HALLEY_WINDOW),
    ] {
        for k in ks {
            let ratio = est.ratio_at(k);
            let inside = ratio.is_some_and(|r| (lo..=hi).contains(&r));
            ok &= inside;
            parts.push(format!(
                "{} k={k}: {} in [{lo}, {hi}] {}",
                est.method,
                ratio.map_or("missing".to_string(), |r| format!("{r:.4}")),
                if inside { "yes" } else { "no" }
            ));
        }
    }
    Verdict::new(ok, parts.join("; "))
}

fn criterion_8(plan: &DiskSamplingPlan) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for &p in &SMALL_PS {
        for (m, k_max) in [
            (Method::Newton, NEWTON_K_MAX),
            (Method::Halley, HALLEY_K_MAX),
        ] {
            let r = check_no_pole_no_zero(&root(p), m, k_max, plan, MODULUS_FLOOR).unwrap();
            ok &= r.holds();
            parts.push(format!(
                "{m} p={p}: min |iterate| {:.4}, min |denominator| {:.4}, {} below floor",
                r.min_iterate_modulus.unwrap_or(f64::NAN),
                r.min_denominator_modulus.unwrap_or(f64::NAN),
                r.violations.len()
            ));
        }
    }
    Verdict::new(
        ok,
        format!(
            "sampled evidence, not a proof; floor {MODULUS_FLOOR}; {}",
            parts.join("; ")
        ),
    )
}

fn main() -> ExitCode {
    let plan = DiskSamplingPlan::default();
    let criteria: Vec<Criterion> = vec![
        ("exact positivity certificates", Box::new(criterion_1)),
        ("dual-route coefficient equality", Box::new(criterion_2)),
        ("exact spot values", Box::new(criterion_3)),
        (
            "contraction bounds on the sampled disk",
            Box::new(move || criterion_4(&plan)),
        ),
        ("residual bounds", Box::new(move || criterion_5(&plan))),
        ("exact prefix agreement", Box::new(criterion_6)),
        ("convergence order at z = 0.5", Box::new(criterion_7)),
        (
            "no-pole/no-zero evidence",
            Box::new(move || criterion_8(&plan)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.passed {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
