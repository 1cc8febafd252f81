//! Exact positivity certificates for the coefficients of
//! `F(z) = 1 - (1 - z) exp(Σ a_n z^n / n)`.
//!
//! Given weights `a_1 = 1 ≥ a_2 ≥ … > 0`, the expansion `H = exp(Σ a_n z^n/n) = Σ b_n z^n`
//! satisfies `(n+1) b_{n+1} = Σ_{k=0..n} a_{k+1} b_{n-k}`, and the coefficients of
//! `F = Σ c_n z^n` are obtained two ways:
//!
//! * by differences, `c_{n+1} = b_n - b_{n+1}`;
//! * by convolution, `c_n = (1/n) Σ_{k=2..n} (a_{k-1} - a_k) b_{n-k}`.
//!
//! [`certify`] runs both in exact arithmetic and records every identity it checked.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{dot, serialize_rationals, to_fraction_string, Rational};

type Generator = dyn Fn(usize) -> Rational + Send + Sync;

/// The sequence `n ↦ a_n` for `n ≥ 1`, given by an exact generator.
///
/// Nothing about the sequence is trusted: [`certify`] re-checks the
/// hypotheses on every prefix it uses.
#[derive(Clone)]
pub struct WeightSequence {
    label: String,
    generator: Arc<Generator>,
    declared_ell: Option<usize>,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("label", &self.label)
            .field("declared_ell", &self.declared_ell)
            .finish_non_exhaustive()
    }
}

impl WeightSequence {
    pub fn new(
        label: impl Into<String>,
        declared_ell: Option<usize>,
        generator: impl Fn(usize) -> Rational + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            generator: Arc::new(generator),
            declared_ell,
        }
    }

    /// A finite list `a_1, a_2, …`; queries past the end repeat the last value.
    pub fn from_prefix(label: impl Into<String>, values: Vec<Rational>) -> Self {
        assert!(!values.is_empty(), "weight prefix must be nonempty");
        Self::new(label, None, move |n| {
            values[(n - 1).min(values.len() - 1)].clone()
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn declared_ell(&self) -> Option<usize> {
        self.declared_ell
    }

    /// `a_n`; `n` starts at 1.
    pub fn value(&self, n: usize) -> Rational {
        assert!(n >= 1, "weights are indexed from 1");
        (self.generator)(n)
    }

    /// `[a_1, …, a_len]`.
    pub fn prefix(&self, len: usize) -> Vec<Rational> {
        (1..=len).map(|n| self.value(n)).collect()
    }
}

/// A hypothesis on the weights that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    FirstWeightIsOne,
    Positive,
    NonIncreasing,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::FirstWeightIsOne => "a_1 is not 1",
            Hypothesis::Positive => "not positive",
            Hypothesis::NonIncreasing => "not non-increasing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error("certificate refused: weights {property} (first failure at n = {index})")]
    Refused { property: Hypothesis, index: usize },
    #[error("weight a_{index} = {value} is not positive")]
    NonPositiveWeight { index: usize, value: String },
    #[error("sequence constant to horizon: no a_k < 1 for k <= {horizon}")]
    ConstantToHorizon { horizon: usize },
    #[error("order {order} is below ell = {ell}; strict positivity would not be exercised")]
    OrderBelowEll { order: usize, ell: usize },
}

fn b_from_prefix(a: &[Rational], order: usize) -> Result<Vec<Rational>, TheoremError> {
    if let Some(i) = a[..order].iter().position(|x| !x.is_positive()) {
        return Err(TheoremError::NonPositiveWeight {
            index: i + 1,
            value: to_fraction_string(&a[i]),
        });
    }
    let mut b = Vec::with_capacity(order + 1);
    b.push(Rational::one());
    for n in 0..order {
        // a[k] holds a_{k+1}
        let sum = dot((0..=n).map(|k| (&a[k], &b[n - k])));
        b.push(sum / Rational::from_integer((n + 1).into()));
    }
    Ok(b)
}

fn c_by_convolution(a: &[Rational], b: &[Rational], order: usize) -> Vec<Rational> {
    let drops: Vec<Rational> = a.windows(2).map(|w| &w[0] - &w[1]).collect();
    let mut c = vec![Rational::zero(); order + 1];
    for (n, cn) in c.iter_mut().enumerate().skip(2) {
        // drops[k - 2] = a_{k-1} - a_k
        let sum = dot((2..=n).map(|k| (&drops[k - 2], &b[n - k])));
        *cn = sum / Rational::from_integer(n.into());
    }
    c
}

/// `b_0..=b_N` of `exp(Σ a_n z^n / n)`.
pub fn compute_b(a: &WeightSequence, order: usize) -> Result<Vec<Rational>, TheoremError> {
    b_from_prefix(&a.prefix(order), order)
}

/// `c_0 = 0`, `c_{n+1} = b_n - b_{n+1}`.
pub fn compute_c_from_differences(b: &[Rational]) -> Vec<Rational> {
    if b.is_empty() {
        return Vec::new();
    }
    std::iter::once(Rational::zero())
        .chain(b.windows(2).map(|w| &w[0] - &w[1]))
        .collect()
}

/// `c_n = (1/n) Σ_{k=2..n} (a_{k-1} - a_k) b_{n-k}` with `c_0 = c_1 = 0`.
pub fn compute_c_from_convolution(
    a: &WeightSequence,
    b: &[Rational],
    order: usize,
) -> Vec<Rational> {
    assert!(
        b.len() > order.saturating_sub(2),
        "b is too short for order {order}"
    );
    c_by_convolution(&a.prefix(order.max(1)), b, order)
}

fn ell_from_prefix(a: &[Rational]) -> Option<usize> {
    a.iter().position(|x| x < &Rational::one()).map(|i| i + 1)
}

/// `ℓ = min{k ≥ 1 : a_k < 1}`, searched up to `horizon`.
pub fn detect_ell(a: &WeightSequence, horizon: usize) -> Result<usize, TheoremError> {
    ell_from_prefix(&a.prefix(horizon)).ok_or(TheoremError::ConstantToHorizon { horizon })
}

/// Exact record of the coefficient identities verified for one weight sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub label: String,
    pub ell: usize,
    pub order: usize,
    #[serde(serialize_with = "serialize_rationals")]
    pub b: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub c: Vec<Rational>,
    pub checks: BTreeMap<String, bool>,
}

impl PositivityCertificate {
    pub fn all_passed(&self) -> bool {
        self.checks.values().all(|&ok| ok)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

fn check_hypotheses(a: &[Rational]) -> Result<(), TheoremError> {
    if !a[0].is_one() {
        return Err(TheoremError::Refused {
            property: Hypothesis::FirstWeightIsOne,
            index: 1,
        });
    }
    if let Some(i) = a.iter().position(|x| !x.is_positive()) {
        return Err(TheoremError::Refused {
            property: Hypothesis::Positive,
            index: i + 1,
        });
    }
    if let Some(i) = a.windows(2).position(|w| w[1] > w[0]) {
        return Err(TheoremError::Refused {
            property: Hypothesis::NonIncreasing,
            index: i + 2,
        });
    }
    Ok(())
}

/// Runs the whole exact pipeline up to order `N` and returns the certificate.
///
/// The hypotheses (`a_1 = 1`, positivity, monotonicity on `a_1..=a_{N+1}`) are
/// preconditions: a violation refuses the certificate and names the property.
/// The coefficient identities are recorded in `checks`; a `false` there means
/// the conclusion failed for these weights.
pub fn certify(a: &WeightSequence, order: usize) -> Result<PositivityCertificate, TheoremError> {
    let weights = a.prefix(order + 1);
    check_hypotheses(&weights)?;
    let ell =
        ell_from_prefix(&weights).ok_or(TheoremError::ConstantToHorizon { horizon: order + 1 })?;
    if order < ell {
        return Err(TheoremError::OrderBelowEll { order, ell });
    }

    let b = b_from_prefix(&weights, order)?;
    let c = compute_c_from_differences(&b);
    let c_conv = c_by_convolution(&weights, &b, order);

    let zero = Rational::zero();
    let one = Rational::one();
    let mut checks = BTreeMap::new();
    let mut record = |name: &str, ok: bool| {
        checks.insert(name.to_string(), ok);
    };

    record("a1_equals_one", true);
    record("weights_positive", true);
    record("weights_non_increasing", true);
    record(
        "declared_ell_matches",
        a.declared_ell().is_none_or(|d| d == ell),
    );

    record(
        "b_initial_values",
        b[0].is_one() && (order == 0 || b[1].is_one()),
    );
    record("b_positive", b.iter().all(Signed::is_positive));
    record("routes_agree", c == c_conv);
    record("c_zero_at_origin", c[0].is_zero());
    record(
        "c_in_unit_interval",
        c.iter().all(|x| x >= &zero && x < &one),
    );

    let mut partial = Rational::zero();
    let mut telescopes = true;
    let mut monotone_bounded = true;
    for m in 1..=order {
        let next = &partial + &c[m];
        telescopes &= &next + &b[m] == one;
        monotone_bounded &= next >= partial && next <= one;
        partial = next;
    }
    record("partial_sums_telescope", telescopes);
    record("partial_sums_bounded", monotone_bounded);

    record("vanishing_below_ell", c[1..ell].iter().all(Zero::is_zero));
    record(
        "positive_from_ell",
        c[ell..].iter().all(Signed::is_positive),
    );

    // c_n ≥ (a_{ℓ-1} - a_ℓ) b_{n-ℓ} / n
    let drop = &weights[ell - 2] - &weights[ell - 1];
    let lower_bound_ok =
        (ell..=order).all(|n| c[n] >= &drop * &b[n - ell] / Rational::from_integer(n.into()));
    record("lower_bound_from_ell", lower_bound_ok);

    Ok(PositivityCertificate {
        label: a.label().to_string(),
        ell,
        order,
        b,
        c,
        checks,
    })
}
