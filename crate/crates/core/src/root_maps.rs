//! Newton and Halley iterations for `x^p = 1 - z` started at `1`, and the maps
//! that carry one residual to the next:
//!
//! ```text
//! f_p(t) = 1 - (1 - t) (1 - t/p)^{-p}                          (Newton)
//! g_p(t) = 1 - (1 - t) ((2p - (p-1)t) / (2p - (p+1)t))^p       (Halley)
//! ```
//!
//! With `N_k = 1 - (1 - z)/U_k^p` the residuals obey `N_{k+1} = f_p(N_k)`,
//! and likewise `H_{k+1} = g_p(H_k)` for Halley.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{parse_rational, serialize_complex, to_f64, Rational};
use crate::series::{Series, SeriesError};
use crate::theorem::WeightSequence;

/// Moduli below this count as a pole or a division by zero.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Below this modulus residual maps are summed from their Taylor coefficients,
/// which keeps tiny residuals accurate to full relative precision.
const TAYLOR_RADIUS: f64 = 0.5;
const TAYLOR_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("p must exceed 1 (got {0})")]
    InvalidParameter(String),
    #[error("could not parse p from {0:?}")]
    Unparsable(String),
    #[error("p = {0} must be an integer >= 2 here")]
    NonIntegerParameter(String),
    #[error("pole: denominator modulus {modulus:e} is below tolerance")]
    Pole { modulus: f64 },
    #[error("division by an iterate of modulus {modulus:e}")]
    Division { modulus: f64 },
    #[error("|t| = {modulus} lies outside the disk of radius {radius} where the non-integer power is defined")]
    OutsideDomain { modulus: f64, radius: f64 },
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<MapError>,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The exponent `p > 1` of the root being computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootParameter {
    p: Rational,
}

impl RootParameter {
    pub fn new(p: Rational) -> Result<Self, MapError> {
        if p <= Rational::one() {
            return Err(MapError::InvalidParameter(display_rational(&p)));
        }
        Ok(Self { p })
    }

    pub fn integer(p: u32) -> Result<Self, MapError> {
        Self::new(Rational::from_integer(p.into()))
    }

    /// Accepts `"3"` or `"5/2"`.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let p = parse_rational(text).ok_or_else(|| MapError::Unparsable(text.to_string()))?;
        Self::new(p)
    }

    pub fn value(&self) -> &Rational {
        &self.p
    }

    pub fn as_f64(&self) -> f64 {
        to_f64(&self.p)
    }

    /// `Some(p)` when `p` is an integer (necessarily `≥ 2`).
    pub fn integer_p(&self) -> Option<u32> {
        if self.p.is_integer() {
            self.p.to_integer().to_u32()
        } else {
            None
        }
    }

    pub fn require_integer(&self) -> Result<u32, MapError> {
        self.integer_p()
            .ok_or_else(|| MapError::NonIntegerParameter(self.to_string()))
    }
}

impl fmt::Display for RootParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&display_rational(&self.p))
    }
}

fn display_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    F,
    G,
}

impl MapKind {
    /// Vanishing order at 0, and the contraction exponent on the disk.
    pub fn ell(self) -> usize {
        match self {
            MapKind::F => 2,
            MapKind::G => 3,
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::F => "f",
            MapKind::G => "g",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Halley,
}

impl Method {
    pub fn residual_map(self) -> MapKind {
        match self {
            Method::Newton => MapKind::F,
            Method::Halley => MapKind::G,
        }
    }

    /// 2 for Newton, 3 for Halley.
    pub fn order(self) -> u32 {
        self.residual_map().ell() as u32
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Newton => "newton",
            Method::Halley => "halley",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesRoute {
    /// Expand the closed form with reciprocals and integer powers.
    ClosedForm,
    /// `1 - (1 - z) exp(Σ a_n z^n / n)` from the weight sequence.
    Weights,
}

/// `a_n = p^{1-n}`.
pub fn newton_weights(p: &RootParameter) -> WeightSequence {
    let inv = p.value().recip();
    WeightSequence::new(format!("newton p={p}"), Some(2), move |n| {
        inv.pow((n - 1) as i32)
    })
}

fn halley_alpha_beta(p: &Rational) -> (Rational, Rational) {
    let two_p = p * Rational::from_integer(2.into());
    let one = Rational::one();
    ((p + &one) / &two_p, (p - &one) / &two_p)
}

/// `a_n = p (α^n - β^n)` with `α = (p+1)/(2p)`, `β = (p-1)/(2p)`.
pub fn halley_weights(p: &RootParameter) -> WeightSequence {
    let (alpha, beta) = halley_alpha_beta(p.value());
    let pv = p.value().clone();
    WeightSequence::new(format!("halley p={p}"), Some(3), move |n| {
        let n = n as i32;
        &pv * (alpha.pow(n) - beta.pow(n))
    })
}

pub fn weights_for(p: &RootParameter, which: MapKind) -> WeightSequence {
    match which {
        MapKind::F => newton_weights(p),
        MapKind::G => halley_weights(p),
    }
}

/// Checks `a_n - a_{n+1} = αβ a_{n-1}` exactly (meaningful for `n ≥ 2`).
pub fn halley_identity_holds(p: &RootParameter, n: usize) -> bool {
    assert!(n >= 2);
    let (alpha, beta) = halley_alpha_beta(p.value());
    let a = halley_weights(p);
    a.value(n) - a.value(n + 1) == alpha * beta * a.value(n - 1)
}

fn complex_power(base: Complex64, p: &RootParameter, sign: i32) -> Complex64 {
    match p.integer_p() {
        Some(m) => base.powi(sign * m as i32),
        None => base.powf(sign as f64 * p.as_f64()),
    }
}

/// Closed form of `f_p`. Non-integer `p` uses the principal branch on `|t| < p`.
pub fn f_eval(p: &RootParameter, t: Complex64) -> Result<Complex64, MapError> {
    let pf = p.as_f64();
    if p.integer_p().is_none() && t.norm() >= pf {
        return Err(MapError::OutsideDomain {
            modulus: t.norm(),
            radius: pf,
        });
    }
    let base = Complex64::new(1.0, 0.0) - t / pf;
    let modulus = base.norm();
    if modulus < POLE_TOLERANCE {
        return Err(MapError::Pole { modulus });
    }
    Ok(Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - t) * complex_power(base, p, -1))
}

/// Closed form of `g_p`. Non-integer `p` uses the principal branch on `|t| < 2p/(p+1)`.
pub fn g_eval(p: &RootParameter, t: Complex64) -> Result<Complex64, MapError> {
    let pf = p.as_f64();
    if p.integer_p().is_none() {
        let radius = 2.0 * pf / (pf + 1.0);
        if t.norm() >= radius {
            return Err(MapError::OutsideDomain {
                modulus: t.norm(),
                radius,
            });
        }
    }
    let num = 2.0 * pf - (pf - 1.0) * t;
    let den = 2.0 * pf - (pf + 1.0) * t;
    let modulus = den.norm();
    if modulus < POLE_TOLERANCE {
        return Err(MapError::Pole { modulus });
    }
    Ok(Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - t) * complex_power(num / den, p, 1))
}

pub fn map_eval(p: &RootParameter, which: MapKind, t: Complex64) -> Result<Complex64, MapError> {
    match which {
        MapKind::F => f_eval(p, t),
        MapKind::G => g_eval(p, t),
    }
}

/// Exact value of `f_p` or `g_p` at a rational point, for integer `p`.
pub fn map_eval_exact(
    p: &RootParameter,
    which: MapKind,
    t: &Rational,
) -> Result<Rational, MapError> {
    let m = p.require_integer()? as i32;
    let pv = p.value();
    let one = Rational::one();
    let factor = match which {
        MapKind::F => {
            let base = &one - t / pv;
            if base.is_zero() {
                return Err(MapError::Pole { modulus: 0.0 });
            }
            base.pow(-m)
        }
        MapKind::G => {
            let two_p = pv * Rational::from_integer(2.into());
            let den = &two_p - (pv + &one) * t;
            if den.is_zero() {
                return Err(MapError::Pole { modulus: 0.0 });
            }
            ((&two_p - (pv - &one) * t) / den).pow(m)
        }
    };
    Ok(&one - (&one - t) * factor)
}

/// `c0 + c1 z`, truncated at `order` (which may be 0).
pub(crate) fn linear(c0: Rational, c1: Rational, order: usize) -> Series<Rational> {
    let mut s = Series::constant(c0, order);
    if order >= 1 {
        s = s
            .add(&Series::variable(order).scale(&c1))
            .expect("same order");
    }
    s
}

/// Exact Taylor coefficients of `f_p` or `g_p` up to `order`.
pub fn map_series(
    p: &RootParameter,
    which: MapKind,
    order: usize,
    route: SeriesRoute,
) -> Result<Series<Rational>, MapError> {
    let one_minus_z = linear(Rational::one(), -Rational::one(), order);
    let h = match route {
        SeriesRoute::Weights => {
            let a = weights_for(p, which);
            let mut g = vec![Rational::zero(); order + 1];
            for (n, gn) in g.iter_mut().enumerate().skip(1) {
                *gn = a.value(n) / Rational::from_integer(n.into());
            }
            Series::from_coeffs(g)?.exp()?
        }
        SeriesRoute::ClosedForm => {
            let m = p.require_integer()?;
            let pv = p.value();
            let one = Rational::one();
            match which {
                MapKind::F => linear(one.clone(), -(&one / pv), order)
                    .reciprocal()?
                    .pow(m),
                MapKind::G => {
                    let two_p = pv * Rational::from_integer(2.into());
                    let num = linear(two_p.clone(), -(pv - &one), order);
                    let den = linear(two_p, -(pv + &one), order);
                    num.mul(&den.reciprocal()?)?.pow(m)
                }
            }
        }
    };
    Ok(Series::one(order).sub(&one_minus_z.mul(&h)?)?)
}

/// Evaluates `f_p` or `g_p` for integer `p` with full relative precision near 0.
///
/// Inside `|t| ≤ 1/2` the value is summed from exact Taylor coefficients as
/// `t^ℓ Σ c_{ℓ+j} t^j`; elsewhere the closed form is used.
#[derive(Debug, Clone)]
pub struct ResidualMap {
    p: RootParameter,
    which: MapKind,
    tail: Vec<Complex64>,
}

impl ResidualMap {
    pub fn new(p: &RootParameter, which: MapKind) -> Result<Self, MapError> {
        p.require_integer()?;
        let series = map_series(p, which, TAYLOR_ORDER, SeriesRoute::Weights)?;
        let ell = which.ell();
        let tail = series.coeffs()[ell..]
            .iter()
            .map(|c| Complex64::new(to_f64(c), 0.0))
            .collect();
        Ok(Self {
            p: p.clone(),
            which,
            tail,
        })
    }

    pub fn eval(&self, t: Complex64) -> Result<Complex64, MapError> {
        if t.norm() > TAYLOR_RADIUS {
            return map_eval(&self.p, self.which, t);
        }
        let inner = self
            .tail
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * t + c);
        Ok(inner * t.powu(self.which.ell() as u32))
    }
}

/// Newton update and the modulus of `U^{p-1}`, the quantity divided by.
fn newton_update(p: u32, u: Complex64, z: Complex64) -> Result<(Complex64, f64), MapError> {
    let modulus = u.norm();
    if modulus < POLE_TOLERANCE {
        return Err(MapError::Division { modulus });
    }
    let pf = p as f64;
    let den = u.powu(p - 1);
    Ok((((pf - 1.0) * u + (1.0 - z) / den) / pf, den.norm()))
}

/// Halley update and the modulus of `(p+1)V^p + (p-1)(1-z)`.
fn halley_update(p: u32, v: Complex64, z: Complex64) -> Result<(Complex64, f64), MapError> {
    let pf = p as f64;
    let vp = v.powu(p);
    let den = (pf + 1.0) * vp + (pf - 1.0) * (1.0 - z);
    let modulus = den.norm();
    if modulus < POLE_TOLERANCE {
        return Err(MapError::Pole { modulus });
    }
    let num = (pf - 1.0) * vp + (pf + 1.0) * (1.0 - z);
    Ok((num / den * v, modulus))
}

/// `U_{k+1}` from `U_k = u`.
pub fn newton_step(p: &RootParameter, u: Complex64, z: Complex64) -> Result<Complex64, MapError> {
    newton_update(p.require_integer()?, u, z).map(|(next, _)| next)
}

/// `V_{k+1}` from `V_k = v`.
pub fn halley_step(p: &RootParameter, v: Complex64, z: Complex64) -> Result<Complex64, MapError> {
    halley_update(p.require_integer()?, v, z).map(|(next, _)| next)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStep {
    pub k: usize,
    #[serde(serialize_with = "serialize_complex")]
    pub iterate: Complex64,
    /// Residual carried by the residual map from `residual_0 = z`.
    #[serde(serialize_with = "serialize_complex")]
    pub residual: Complex64,
    /// `1 - (1 - z)/iterate^p` evaluated directly.
    #[serde(serialize_with = "serialize_complex")]
    pub direct_residual: Complex64,
    /// `|direct_residual_k - map(direct_residual_{k-1})|`; absent at step 0.
    pub discrepancy: Option<f64>,
    /// Modulus of the denominator of the update that produced this iterate.
    pub denominator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub method: Method,
    pub p: String,
    #[serde(serialize_with = "serialize_complex")]
    pub z: Complex64,
    pub k_max: usize,
    pub steps: Vec<IterationStep>,
}

impl IterationTrace {
    pub fn max_discrepancy(&self) -> f64 {
        self.steps
            .iter()
            .filter_map(|s| s.discrepancy)
            .fold(0.0, f64::max)
    }
}

/// A prepared iteration; reuse it across many points.
#[derive(Debug, Clone)]
pub struct RootIteration {
    p: RootParameter,
    p_int: u32,
    method: Method,
    residual_map: ResidualMap,
}

impl RootIteration {
    pub fn new(p: &RootParameter, method: Method) -> Result<Self, MapError> {
        let p_int = p.require_integer()?;
        Ok(Self {
            p: p.clone(),
            p_int,
            method,
            residual_map: ResidualMap::new(p, method.residual_map())?,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn parameter(&self) -> &RootParameter {
        &self.p
    }

    pub fn run(&self, z: Complex64, k_max: usize) -> Result<IterationTrace, MapError> {
        let one = Complex64::new(1.0, 0.0);
        let mut steps = Vec::with_capacity(k_max + 1);
        steps.push(IterationStep {
            k: 0,
            iterate: one,
            residual: z,
            direct_residual: z,
            discrepancy: None,
            denominator: None,
        });
        let at = |step: usize| {
            move |e: MapError| MapError::AtStep {
                step,
                source: Box::new(e),
            }
        };
        for k in 1..=k_max {
            let prev = &steps[k - 1];
            let (iterate, den) = match self.method {
                Method::Newton => newton_update(self.p_int, prev.iterate, z),
                Method::Halley => halley_update(self.p_int, prev.iterate, z),
            }
            .map_err(at(k))?;
            let residual = self.residual_map.eval(prev.residual).map_err(at(k))?;
            let direct_residual = one - (one - z) / iterate.powu(self.p_int);
            let expected = map_eval(&self.p, self.method.residual_map(), prev.direct_residual)
                .map_err(at(k))?;
            steps.push(IterationStep {
                k,
                iterate,
                residual,
                direct_residual,
                discrepancy: Some((direct_residual - expected).norm()),
                denominator: Some(den),
            });
        }
        Ok(IterationTrace {
            method: self.method,
            p: self.p.to_string(),
            z,
            k_max,
            steps,
        })
    }
}

pub fn run_iteration(
    p: &RootParameter,
    method: Method,
    z: Complex64,
    k_max: usize,
) -> Result<IterationTrace, MapError> {
    RootIteration::new(p, method)?.run(z, k_max)
}

/// Small helper for tests and callers that think in integers.
pub fn root(p: u32) -> RootParameter {
    RootParameter::integer(p).expect("p >= 2")
}
