//! Checkable consequences of the coefficient positivity: contraction of the
//! residual maps on the closed unit disk, the `2^k` / `3^k` residual bounds,
//! absence of zeros and poles of the iterates, and exact agreement of the
//! iterates' Taylor prefixes with the binomial series of `(1 - z)^{1/p}`.
//!
//! Disk claims are checked on a seeded sample and are evidence, not proof.
//! All inequalities are compared in the log domain.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitDisc};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::rational::{serialize_complex, serialize_float, to_fraction_string, Rational};
use crate::root_maps::{linear, map_eval, MapError, MapKind, Method, RootIteration, RootParameter};
use crate::series::{Series, SeriesError};

/// Allowed gap between the directly evaluated residual and the one carried by
/// the residual map before a trace is considered inconsistent.
pub const TRACE_CONSISTENCY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("exclusion radius must be positive (got {0})")]
    InvalidExclusion(f64),
    #[error("k_max must be at least 1")]
    ZeroSteps,
    #[error("order {order} is too small to compare {needed} coefficients")]
    OrderTooSmall { order: usize, needed: usize },
    #[error("z = {0} must satisfy 0 < |z| < 1")]
    PointOutsideDisk(Complex64),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskSamplingPlan {
    pub radii_count: usize,
    pub angle_count: usize,
    pub random_count: usize,
    pub seed: u64,
    pub exclusion_radius: f64,
}

impl Default for DiskSamplingPlan {
    fn default() -> Self {
        Self {
            radii_count: 64,
            angle_count: 128,
            random_count: 4096,
            seed: 42,
            exclusion_radius: 1e-3,
        }
    }
}

impl DiskSamplingPlan {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.exclusion_radius.is_nan() || self.exclusion_radius <= 0.0 {
            return Err(VerifyError::InvalidExclusion(self.exclusion_radius));
        }
        Ok(())
    }

    fn keeps(&self, z: Complex64) -> bool {
        z.norm() > self.exclusion_radius && (z - 1.0).norm() > self.exclusion_radius
    }
}

fn clamp_to_disk(mut z: Complex64) -> Complex64 {
    while z.norm() > 1.0 {
        z *= 1.0 - f64::EPSILON;
    }
    z
}

/// Polar grid (radii `i/R`, `i = 1..=R`, so the unit circle is included;
/// angles `2πj/A`) followed by seeded uniform points, with the neighbourhoods
/// of 0 and 1 removed.
pub fn sample_disk(plan: &DiskSamplingPlan) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(plan.radii_count * plan.angle_count + plan.random_count);
    for i in 1..=plan.radii_count {
        let r = i as f64 / plan.radii_count as f64;
        for j in 0..plan.angle_count {
            let theta = TAU * j as f64 / plan.angle_count as f64;
            out.push(clamp_to_disk(Complex64::from_polar(r, theta)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    for _ in 0..plan.random_count {
        let [x, y]: [f64; 2] = UnitDisc.sample(&mut rng);
        out.push(clamp_to_disk(Complex64::new(x, y)));
    }
    out.retain(|&z| plan.keeps(z));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    #[serde(serialize_with = "serialize_complex")]
    pub z: Complex64,
    pub k: usize,
    #[serde(serialize_with = "serialize_float")]
    pub log_ratio: f64,
    pub reason: String,
}

/// One CSV row: a sample point, the step, and the two sides of the inequality in logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub z: Complex64,
    pub k: usize,
    pub log_value: f64,
    pub bound_log: f64,
}

impl SampleRecord {
    pub fn margin(&self) -> f64 {
        self.log_value - self.bound_log
    }
}

/// Outcome of checking one strict inequality over a sample set.
///
/// The claim holds on the sample set iff `violations` is empty iff
/// `max_log_ratio < 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub claim: String,
    pub p: String,
    pub subject: String,
    pub k: usize,
    pub exponent: f64,
    pub seed: u64,
    pub exclusion_radius: f64,
    pub sample_count: usize,
    #[serde(serialize_with = "serialize_float")]
    pub max_log_ratio: f64,
    #[serde(serialize_with = "serialize_complex")]
    pub worst_sample: Complex64,
    pub violations: Vec<Violation>,
    /// Samples whose value underflowed to exactly 0; counted as satisfying the bound.
    pub underflow_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_iterate_modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_denominator_modulus: Option<f64>,
    #[serde(skip)]
    pub records: Vec<SampleRecord>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// What one sample contributed to a report: its log ratio, or why it failed.
enum Outcome {
    Value {
        log_value: f64,
        bound_log: f64,
        underflow: bool,
    },
    Failed(String),
}

struct ReportBuilder {
    report: BoundReport,
}

impl ReportBuilder {
    fn new(
        claim: String,
        p: &RootParameter,
        subject: String,
        k: usize,
        exponent: f64,
        plan: &DiskSamplingPlan,
    ) -> Self {
        Self {
            report: BoundReport {
                claim,
                p: p.to_string(),
                subject,
                k,
                exponent,
                seed: plan.seed,
                exclusion_radius: plan.exclusion_radius,
                sample_count: 0,
                max_log_ratio: f64::NEG_INFINITY,
                worst_sample: Complex64::zero(),
                violations: Vec::new(),
                underflow_count: 0,
                min_iterate_modulus: None,
                min_denominator_modulus: None,
                records: Vec::new(),
            },
        }
    }

    fn push(&mut self, z: Complex64, outcome: Outcome) {
        let r = &mut self.report;
        r.sample_count += 1;
        let k = r.k;
        let (ratio, reason) = match outcome {
            Outcome::Value {
                log_value,
                bound_log,
                underflow,
            } => {
                r.underflow_count += usize::from(underflow);
                r.records.push(SampleRecord {
                    z,
                    k,
                    log_value,
                    bound_log,
                });
                let ratio = log_value - bound_log;
                if ratio.is_nan() {
                    (f64::INFINITY, Some("non-finite evaluation".to_string()))
                } else if ratio >= 0.0 {
                    (ratio, Some("strict inequality fails".to_string()))
                } else {
                    (ratio, None)
                }
            }
            Outcome::Failed(reason) => (f64::INFINITY, Some(reason)),
        };
        if ratio > r.max_log_ratio || r.sample_count == 1 {
            r.max_log_ratio = r.max_log_ratio.max(ratio);
            r.worst_sample = z;
        }
        if let Some(reason) = reason {
            r.violations.push(Violation {
                z,
                k,
                log_ratio: ratio,
                reason,
            });
        }
    }

    fn finish(self) -> BoundReport {
        self.report
    }
}

fn log_comparison(value: Complex64, exponent: f64, z: Complex64) -> Outcome {
    let modulus = value.norm();
    Outcome::Value {
        log_value: modulus.ln(),
        bound_log: exponent * z.norm().ln(),
        underflow: modulus == 0.0,
    }
}

/// `|f_p(z)| < |z|^2` or `|g_p(z)| < |z|^3` on the sampled disk, closed-form evaluation.
pub fn check_map_contraction(
    p: &RootParameter,
    which: MapKind,
    plan: &DiskSamplingPlan,
) -> Result<BoundReport, VerifyError> {
    plan.validate()?;
    let exponent = which.ell() as f64;
    let samples = sample_disk(plan);
    let outcomes: Vec<Outcome> = samples
        .par_iter()
        .map(|&z| match map_eval(p, which, z) {
            Ok(v) => log_comparison(v, exponent, z),
            Err(e) => Outcome::Failed(e.to_string()),
        })
        .collect();
    let claim = format!(
        "|{which}_p(z)| < |z|^{} on the closed unit disk minus {{0, 1}}",
        which.ell()
    );
    let mut builder = ReportBuilder::new(claim, p, which.to_string(), 1, exponent, plan);
    for (z, o) in samples.into_iter().zip(outcomes) {
        builder.push(z, o);
    }
    Ok(builder.finish())
}

fn residual_exponent(method: Method, k: usize) -> f64 {
    (method.order() as f64).powi(k as i32)
}

/// `log|N_k(z)| < 2^k log|z|` (Newton) or `log|H_k(z)| < 3^k log|z|` (Halley),
/// one report per `k = 1..=k_max`.
pub fn check_residual_bounds(
    p: &RootParameter,
    method: Method,
    k_max: usize,
    plan: &DiskSamplingPlan,
) -> Result<Vec<BoundReport>, VerifyError> {
    plan.validate()?;
    if k_max == 0 {
        return Err(VerifyError::ZeroSteps);
    }
    let iteration = RootIteration::new(p, method)?;
    let samples = sample_disk(plan);
    let per_sample: Vec<Vec<Outcome>> = samples
        .par_iter()
        .map(|&z| {
            let trace = iteration.run(z, k_max);
            (1..=k_max)
                .map(|k| match &trace {
                    Err(e) => Outcome::Failed(e.to_string()),
                    Ok(t) => {
                        let step = &t.steps[k];
                        let gap = (step.residual - step.direct_residual).norm();
                        if gap.is_nan() || gap > TRACE_CONSISTENCY_TOLERANCE {
                            Outcome::Failed(format!(
                                "trace inconsistency: |direct - propagated| = {gap:e}"
                            ))
                        } else {
                            log_comparison(step.residual, residual_exponent(method, k), z)
                        }
                    }
                })
                .collect()
        })
        .collect();
    let symbol = if method == Method::Newton { 'N' } else { 'H' };
    let mut builders: Vec<ReportBuilder> = (1..=k_max)
        .map(|k| {
            let exponent = residual_exponent(method, k);
            let claim = format!(
                "log|{symbol}_{k}(z)| < {exponent} log|z| for {method} on the closed unit disk minus {{0, 1}}"
            );
            ReportBuilder::new(claim, p, method.to_string(), k, exponent, plan)
        })
        .collect();
    for (z, outcomes) in samples.into_iter().zip(per_sample) {
        for (b, o) in builders.iter_mut().zip(outcomes) {
            b.push(z, o);
        }
    }
    Ok(builders.into_iter().map(ReportBuilder::finish).collect())
}

/// Smallest `|iterate_k|` and step denominator over `k = 1..=k_max` and the
/// sample set, compared against `floor`. Each sample's log ratio is
/// `log(floor) - log(min modulus)`.
pub fn check_no_pole_no_zero(
    p: &RootParameter,
    method: Method,
    k_max: usize,
    plan: &DiskSamplingPlan,
    floor: f64,
) -> Result<BoundReport, VerifyError> {
    plan.validate()?;
    if k_max == 0 {
        return Err(VerifyError::ZeroSteps);
    }
    let iteration = RootIteration::new(p, method)?;
    let samples = sample_disk(plan);
    let mins: Vec<Result<(f64, f64), String>> = samples
        .par_iter()
        .map(|&z| {
            let t = iteration.run(z, k_max).map_err(|e| e.to_string())?;
            let steps = &t.steps[1..];
            let iter_min = steps
                .iter()
                .map(|s| s.iterate.norm())
                .fold(f64::INFINITY, f64::min);
            let den_min = steps
                .iter()
                .filter_map(|s| s.denominator)
                .fold(f64::INFINITY, f64::min);
            Ok((iter_min, den_min))
        })
        .collect();
    let claim = format!(
        "{method} iterates and step denominators stay above {floor} in modulus for k <= {k_max} (sampled evidence, not a proof)"
    );
    let mut builder = ReportBuilder::new(claim, p, method.to_string(), k_max, 0.0, plan);
    let mut iter_min = f64::INFINITY;
    let mut den_min = f64::INFINITY;
    for (z, m) in samples.into_iter().zip(mins) {
        let outcome = match m {
            Ok((i, d)) => {
                iter_min = iter_min.min(i);
                den_min = den_min.min(d);
                let smallest = i.min(d);
                Outcome::Value {
                    log_value: floor.ln(),
                    bound_log: smallest.ln(),
                    underflow: false,
                }
            }
            Err(e) => Outcome::Failed(e),
        };
        builder.push(z, outcome);
    }
    let mut report = builder.finish();
    if report.sample_count > 0 {
        report.min_iterate_modulus = Some(iter_min);
        report.min_denominator_modulus = Some(den_min);
    }
    Ok(report)
}

/// `(1 - z)^{1/p}` from the product formula:
/// `t_0 = 1`, `t_n = -[∏_{r=1}^{n-1} (rp - 1)] / (n! p^n)`.
pub fn binomial_root_series(
    p: &RootParameter,
    order: usize,
) -> Result<Series<Rational>, VerifyError> {
    let m = p.require_integer()? as i64;
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(Rational::one());
    let mut product = Rational::one();
    let mut scale = Rational::one(); // n! p^n
    for n in 1..=order as i64 {
        if n >= 2 {
            product *= Rational::from_integer(((n - 1) * m - 1).into());
        }
        scale *= Rational::from_integer((n * m).into());
        coeffs.push(-(&product / &scale));
    }
    let series = Series::from_coeffs(coeffs)?;
    debug_assert_eq!(
        Ok(&series),
        binomial_root_series_by_recurrence(p, order).as_ref()
    );
    Ok(series)
}

/// `(1 - z)^{1/p}` from `C(1/p, n) (-1)^n`, i.e. `s_n = s_{n-1} ((n-1) - 1/p) / n`.
pub fn binomial_root_series_by_recurrence(
    p: &RootParameter,
    order: usize,
) -> Result<Series<Rational>, VerifyError> {
    let inv_p = p.value().recip();
    let mut coeffs: Vec<Rational> = Vec::with_capacity(order + 1);
    coeffs.push(Rational::one());
    for n in 1..=order {
        let factor =
            (Rational::from_integer((n - 1).into()) - &inv_p) / Rational::from_integer(n.into());
        let next = &coeffs[n - 1] * factor;
        coeffs.push(next);
    }
    Ok(Series::from_coeffs(coeffs)?)
}

/// Taylor series of `U_k` (Newton) or `V_k` (Halley), in exact arithmetic.
pub fn iterate_series(
    p: &RootParameter,
    method: Method,
    k: usize,
    order: usize,
) -> Result<Series<Rational>, VerifyError> {
    let m = p.require_integer()?;
    let pv = p.value();
    let one = Rational::one();
    let one_minus_z = linear(one.clone(), -one.clone(), order);
    let mut current = Series::one(order);
    for _ in 0..k {
        current = match method {
            Method::Newton => {
                let correction = one_minus_z.mul(&current.reciprocal()?.pow(m - 1))?;
                current
                    .scale(&(pv - &one))
                    .add(&correction)?
                    .scale(&pv.recip())
            }
            Method::Halley => {
                let vp = current.pow(m);
                let num = vp
                    .scale(&(pv - &one))
                    .add(&one_minus_z.scale(&(pv + &one)))?;
                let den = vp
                    .scale(&(pv + &one))
                    .add(&one_minus_z.scale(&(pv - &one)))?;
                current.mul(&num)?.mul(&den.reciprocal()?)?
            }
        };
    }
    Ok(current)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefixAgreement {
    pub method: Method,
    pub p: String,
    pub k: usize,
    pub order: usize,
    /// Number of leading coefficients on which the iterate equals the binomial series.
    pub prefix_len: usize,
    /// `2^k` or `3^k`.
    pub required: usize,
    /// `(index, iterate coefficient, binomial coefficient)` at the first difference.
    pub first_mismatch: Option<(usize, String, String)>,
}

impl PrefixAgreement {
    pub fn holds(&self) -> bool {
        self.prefix_len >= self.required
    }
}

/// Compares `iterate_series` with `binomial_root_series` coefficient by coefficient.
pub fn check_prefix_agreement(
    p: &RootParameter,
    method: Method,
    k: usize,
    order: usize,
) -> Result<PrefixAgreement, VerifyError> {
    let required = (method.order() as usize).pow(k as u32);
    if order < required {
        return Err(VerifyError::OrderTooSmall {
            order,
            needed: required,
        });
    }
    let iterate = iterate_series(p, method, k, order)?;
    let binomial = binomial_root_series(p, order)?;
    let mismatch = iterate
        .coeffs()
        .iter()
        .zip(binomial.coeffs())
        .position(|(a, b)| a != b);
    let prefix_len = mismatch.unwrap_or(order + 1);
    let first_mismatch = mismatch.map(|i| {
        (
            i,
            to_fraction_string(iterate.coeff(i)),
            to_fraction_string(binomial.coeff(i)),
        )
    });
    Ok(PrefixAgreement {
        method,
        p: p.to_string(),
        k,
        order,
        prefix_len,
        required,
        first_mismatch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderRatio {
    pub k: usize,
    /// `log|r_{k+1}| / log|r_k|`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub method: Method,
    pub p: String,
    #[serde(serialize_with = "serialize_complex")]
    pub z: Complex64,
    pub k_max: usize,
    pub log_residuals: Vec<f64>,
    pub ratios: Vec<OrderRatio>,
    /// Set when some step pairs were dropped because a residual underflowed.
    pub truncated: bool,
}

impl OrderEstimate {
    pub fn ratio_at(&self, k: usize) -> Option<f64> {
        self.ratios.iter().find(|r| r.k == k).map(|r| r.ratio)
    }
}

/// Empirical convergence order from consecutive residuals at one point.
pub fn estimate_convergence_order(
    p: &RootParameter,
    method: Method,
    z: Complex64,
    k_max: usize,
) -> Result<OrderEstimate, VerifyError> {
    let r = z.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(VerifyError::PointOutsideDisk(z));
    }
    let trace = RootIteration::new(p, method)?.run(z, k_max)?;
    let logs: Vec<f64> = trace.steps.iter().map(|s| s.residual.norm().ln()).collect();
    let mut ratios = Vec::new();
    let mut truncated = false;
    for k in 0..k_max {
        let (a, b) = (logs[k], logs[k + 1]);
        if a.is_finite() && b.is_finite() && a != 0.0 {
            ratios.push(OrderRatio { k, ratio: b / a });
        } else {
            truncated = true;
        }
    }
    Ok(OrderEstimate {
        method,
        p: p.to_string(),
        z,
        k_max,
        log_residuals: logs,
        ratios,
        truncated,
    })
}

/// CSV with header `re(z),im(z),k,log_residual,bound_log,margin`.
pub fn write_csv<W: Write>(reports: &[BoundReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re(z)", "im(z)", "k", "log_residual", "bound_log", "margin"])?;
    for report in reports {
        for rec in &report.records {
            w.write_record([
                rec.z.re.to_string(),
                rec.z.im.to_string(),
                rec.k.to_string(),
                rec.log_value.to_string(),
                rec.bound_log.to_string(),
                rec.margin().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::root_maps::root;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_point_plan() -> DiskSamplingPlan {
        DiskSamplingPlan {
            radii_count: 1,
            angle_count: 2,
            random_count: 0,
            seed: 1,
            exclusion_radius: 1e-3,
        }
    }

    #[test]
    fn fourth_roots_of_unity_minus_one() {
        let plan = DiskSamplingPlan {
            radii_count: 1,
            angle_count: 4,
            random_count: 0,
            seed: 0,
            exclusion_radius: 1e-3,
        };
        let s = sample_disk(&plan);
        assert_eq!(s.len(), 3);
        for (got, want) in s.iter().zip([c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]) {
            assert!((got - want).norm() < 1e-15);
        }
    }

    #[test]
    fn fully_excluded_grid_is_empty() {
        let plan = DiskSamplingPlan {
            radii_count: 1,
            angle_count: 1,
            random_count: 0,
            seed: 0,
            exclusion_radius: 1e-3,
        };
        assert!(sample_disk(&plan).is_empty());
        let report = check_map_contraction(&root(2), MapKind::F, &plan).unwrap();
        assert_eq!(report.sample_count, 0);
        assert!(report.holds() && report.max_log_ratio < 0.0);
    }

    #[test]
    fn sampling_is_deterministic_and_inside() {
        let plan = DiskSamplingPlan {
            random_count: 500,
            radii_count: 5,
            angle_count: 7,
            ..Default::default()
        };
        let a = sample_disk(&plan);
        assert_eq!(a, sample_disk(&plan));
        for z in &a {
            assert!(z.norm() <= 1.0);
            assert!(z.norm() > plan.exclusion_radius && (z - 1.0).norm() > plan.exclusion_radius);
        }
        let other = sample_disk(&DiskSamplingPlan { seed: 7, ..plan });
        assert_ne!(a, other);
    }

    #[test]
    fn plan_rejects_nonpositive_exclusion() {
        let plan = DiskSamplingPlan {
            exclusion_radius: 0.0,
            ..Default::default()
        };
        assert_eq!(plan.validate(), Err(VerifyError::InvalidExclusion(0.0)));
        assert!(check_map_contraction(&root(2), MapKind::F, &plan).is_err());
    }

    #[test]
    fn contraction_at_minus_one() {
        // angle_count 2 gives {1, -1}; 1 is excluded
        let plan = single_point_plan();
        let f = check_map_contraction(&root(2), MapKind::F, &plan).unwrap();
        assert_eq!(f.sample_count, 1);
        assert!((f.max_log_ratio - (1.0f64 / 9.0).ln()).abs() < 1e-12);
        assert!(f.holds());
        let g = check_map_contraction(&root(2), MapKind::G, &plan).unwrap();
        assert!((g.max_log_ratio - (1.0f64 / 49.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn boundary_circle_stays_strict() {
        let plan = DiskSamplingPlan {
            radii_count: 1,
            angle_count: 720,
            random_count: 0,
            ..Default::default()
        };
        for p in ["2", "7/2", "10"] {
            let p = RootParameter::parse(p).unwrap();
            for which in [MapKind::F, MapKind::G] {
                let r = check_map_contraction(&p, which, &plan).unwrap();
                assert!(r.holds(), "{which} p={p}: {:?}", r.violations.first());
            }
        }
    }

    #[test]
    fn residual_bounds_at_minus_one() {
        let plan = single_point_plan();
        let n = check_residual_bounds(&root(2), Method::Newton, 1, &plan).unwrap();
        assert_eq!(n.len(), 1);
        assert!((n[0].max_log_ratio - (1.0f64 / 9.0).ln()).abs() < 1e-12);
        let h = check_residual_bounds(&root(2), Method::Halley, 1, &plan).unwrap();
        assert!((h[0].max_log_ratio - (1.0f64 / 49.0).ln()).abs() < 1e-12);
        assert_eq!(
            check_residual_bounds(&root(2), Method::Newton, 0, &plan).unwrap_err(),
            VerifyError::ZeroSteps
        );
    }

    #[test]
    fn violation_makes_ratio_nonnegative() {
        let plan = single_point_plan();
        let mut b = ReportBuilder::new("x".into(), &root(2), "t".into(), 1, 1.0, &plan);
        b.push(
            c(0.5, 0.0),
            Outcome::Value {
                log_value: -1.0,
                bound_log: -0.5,
                underflow: false,
            },
        );
        b.push(
            c(0.5, 0.5),
            Outcome::Value {
                log_value: -0.1,
                bound_log: -0.2,
                underflow: false,
            },
        );
        let r = b.finish();
        assert!(!r.holds());
        assert!(r.max_log_ratio >= 0.0);
        assert_eq!(r.worst_sample, c(0.5, 0.5));
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn underflow_counts_as_pass() {
        let plan = single_point_plan();
        let mut b = ReportBuilder::new("x".into(), &root(2), "t".into(), 1, 1.0, &plan);
        b.push(
            c(0.01, 0.0),
            log_comparison(c(0.0, 0.0), 27.0, c(0.01, 0.0)),
        );
        let r = b.finish();
        assert!(r.holds());
        assert_eq!(r.underflow_count, 1);
        assert!(r.to_json().contains("\"max_log_ratio\": \"-inf\""));
    }

    #[test]
    fn first_iterates_are_bounded_away_from_zero() {
        let plan = DiskSamplingPlan {
            random_count: 256,
            radii_count: 8,
            angle_count: 16,
            ..Default::default()
        };
        let r = check_no_pole_no_zero(&root(2), Method::Newton, 1, &plan, 0.1).unwrap();
        // U_1 = 1 - z/2
        let m = r.min_iterate_modulus.unwrap();
        assert!((0.5 - 1e-12..0.55).contains(&m), "{m}");
        assert!(r.holds());
        let r = check_no_pole_no_zero(&root(2), Method::Halley, 1, &plan, 0.1).unwrap();
        // V_1 = (4 - 3z)/(4 - z) has its pole at 4 and zero at 4/3
        assert!(r.min_iterate_modulus.unwrap() > 0.2);
        assert!(r.holds());
    }

    #[test]
    fn binomial_examples() {
        let s = binomial_root_series(&root(2), 4).unwrap();
        assert_eq!(
            s.coeffs(),
            &[int(1), rat(-1, 2), rat(-1, 8), rat(-1, 16), rat(-5, 128)]
        );
        for p in 2..=7 {
            assert_eq!(
                binomial_root_series(&root(p), 3).unwrap().coeff(1),
                &rat(-1, p as i64)
            );
        }
        assert_eq!(
            binomial_root_series(&root(3), 2).unwrap().coeff(2),
            &rat(-1, 9)
        );
    }

    #[test]
    fn iterate_series_examples() {
        let u1 = iterate_series(&root(2), Method::Newton, 1, 5).unwrap();
        assert_eq!(
            u1.coeffs(),
            &[int(1), rat(-1, 2), int(0), int(0), int(0), int(0)]
        );
        for method in [Method::Newton, Method::Halley] {
            assert_eq!(
                iterate_series(&root(3), method, 0, 4).unwrap(),
                Series::one(4)
            );
        }
        let v1 = iterate_series(&root(2), Method::Halley, 1, 3).unwrap();
        assert_eq!(v1.coeffs(), &[int(1), rat(-1, 2), rat(-1, 8), rat(-1, 32)]);
    }

    #[test]
    fn prefix_examples() {
        let r = check_prefix_agreement(&root(2), Method::Newton, 1, 8).unwrap();
        assert!(r.prefix_len >= 2 && r.holds());
        let r = check_prefix_agreement(&root(2), Method::Halley, 1, 8).unwrap();
        assert_eq!(r.prefix_len, 3);
        assert_eq!(r.first_mismatch, Some((3, "-1/32".into(), "-1/16".into())));
        for method in [Method::Newton, Method::Halley] {
            assert!(
                check_prefix_agreement(&root(5), method, 0, 4)
                    .unwrap()
                    .prefix_len
                    >= 1
            );
        }
        assert_eq!(
            check_prefix_agreement(&root(2), Method::Halley, 2, 8).unwrap_err(),
            VerifyError::OrderTooSmall {
                order: 8,
                needed: 9
            }
        );
    }

    #[test]
    fn order_estimate_requires_open_disk() {
        for z in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.5)] {
            assert!(matches!(
                estimate_convergence_order(&root(2), Method::Newton, z, 3),
                Err(VerifyError::PointOutsideDisk(_))
            ));
        }
    }

    #[test]
    fn order_estimate_tends_to_method_order() {
        let e = estimate_convergence_order(&root(2), Method::Newton, c(0.5, 0.0), 6).unwrap();
        assert!(!e.truncated);
        assert!((e.ratio_at(5).unwrap() - 2.0).abs() < 0.05);
        let e = estimate_convergence_order(&root(2), Method::Halley, c(0.5, 0.0), 4).unwrap();
        assert!((e.ratio_at(3).unwrap() - 3.0).abs() < 0.1);
    }

    #[test]
    fn order_estimate_flags_underflow() {
        let e = estimate_convergence_order(&root(2), Method::Halley, c(0.5, 0.0), 9).unwrap();
        assert!(e.truncated);
        assert!(e.ratios.len() < 9);
    }

    #[test]
    fn csv_has_fixed_header() {
        let plan = single_point_plan();
        let reports = check_residual_bounds(&root(2), Method::Newton, 2, &plan).unwrap();
        let mut buf = Vec::new();
        write_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("re(z),im(z),k,log_residual,bound_log,margin")
        );
        assert_eq!(lines.count(), 2);
    }
}
