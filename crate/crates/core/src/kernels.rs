//! Reproducing kernels of the Sobolev, Korobov, half-period cosine and
//! Korobov-plus-cosine spaces, together with the weight sequence `r`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::special::{bernoulli_unchecked, closed_form_order, factorial, frac};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Sobolev,
    Korobov,
    Cosine,
    KorobovPlusCosine,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Sobolev => "sobolev",
            Family::Korobov => "korobov",
            Family::Cosine => "cosine",
            Family::KorobovPlusCosine => "korcos",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sobolev" => Ok(Family::Sobolev),
            "korobov" => Ok(Family::Korobov),
            "cosine" => Ok(Family::Cosine),
            "korcos" | "korobov-cosine" => Ok(Family::KorobovPlusCosine),
            other => Err(Error::Parse(format!("unknown kernel family {other:?}"))),
        }
    }
}

/// A weighted tensor-product space: kernel family, smoothness and product weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    family: Family,
    alpha: f64,
    gammas: Vec<f64>,
}

impl SpaceSpec {
    pub fn new(family: Family, alpha: f64, gammas: Vec<f64>) -> Result<Self> {
        validate_weights(&gammas)?;
        match family {
            Family::Sobolev => {
                if closed_form_order(alpha).is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "Sobolev kernel needs integer smoothness in 1..=3, got {alpha}"
                    )));
                }
            }
            _ => validate_alpha(alpha)?,
        }
        Ok(Self { family, alpha, gammas })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn dim(&self) -> usize {
        self.gammas.len()
    }
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.5 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("smoothness alpha = {alpha} must exceed 1/2")))
    }
}

pub(crate) fn validate_weights(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("at least one weight is required".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidParameter(format!("weight gamma = {g} must be positive")));
    }
    Ok(())
}

/// Truncation control for series-evaluated kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_terms: u64,
}

impl TruncationPolicy {
    pub fn new(tol: f64, max_terms: u64) -> Result<Self> {
        if !(tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidParameter(format!(
                "truncation policy needs tol > 0 and max_terms >= 1 (got {tol}, {max_terms})"
            )));
        }
        Ok(Self { tol, max_terms })
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { tol: 1e-10, max_terms: 10_000_000 }
    }
}

/// Kernel value with the bound on the error from truncating its series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl KernelValue {
    pub fn exact(value: f64) -> Self {
        Self { value, tail_bound: 0.0 }
    }

    /// Product with rigorous propagation: |prod(v+e) - prod(v)| <= prod(|v|+b) - prod(|v|).
    pub fn product<I: IntoIterator<Item = KernelValue>>(factors: I) -> Self {
        let mut value = 1.0;
        let mut abs = 1.0;
        let mut widened = 1.0;
        for f in factors {
            value *= f.value;
            abs *= f.value.abs();
            widened *= f.value.abs() + f.tail_bound;
        }
        Self { value, tail_bound: (widened - abs).max(0.0) }
    }
}

/// `r(h) = 1` for `h = 0`, `gamma |h|^{-2 alpha}` otherwise.
#[inline]
pub fn r_weight(alpha: f64, gamma: f64, h: i64) -> f64 {
    if h == 0 {
        1.0
    } else {
        gamma * (h.unsigned_abs() as f64).powf(-2.0 * alpha)
    }
}

/// Product weight `r(h) = prod_j r(h_j)`.
pub fn r_weight_product(alpha: f64, gammas: &[f64], h: &[i64]) -> f64 {
    gammas.iter().zip(h).map(|(&g, &hj)| r_weight(alpha, g, hj)).product()
}

/// `(-1)^{a+1} (2 pi)^{2a} B_{2a}({z}) / (2a)!`, which equals
/// `sum_{h != 0} |h|^{-2a} e^{2 pi i h z}`.
#[inline]
pub fn korobov_omega(order: u32, z: f64) -> f64 {
    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
    let two_a = 2 * order;
    sign * (2.0 * PI).powi(two_a as i32) * bernoulli_unchecked(two_a, frac(z)) / factorial(two_a)
}

/// Omega for lattice node numerators: `korobov_omega(order, k / N)` for `k = 0..N`.
///
/// Entries `k` and `N - k` are bitwise equal, so mirrored generators tie exactly.
pub fn korobov_omega_table(order: u32, n: u64) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n).map(|k| korobov_omega(order, k as f64 / n as f64)).collect();
    for k in 1..(n as usize).div_ceil(2) {
        t[n as usize - k] = t[k];
    }
    t
}

/// Number of series terms so that `2 gamma K^{1-2a} / (2a - 1) <= tol`.
fn terms_for(alpha: f64, gamma: f64, policy: &TruncationPolicy) -> Result<u64> {
    let p = 2.0 * alpha - 1.0;
    let k = (2.0 * gamma / (p * policy.tol)).powf(1.0 / p).ceil();
    if !k.is_finite() || k > policy.max_terms as f64 {
        return Err(Error::TruncationBudget {
            terms: if k.is_finite() { k as u64 } else { u64::MAX },
            max_terms: policy.max_terms,
            tol: policy.tol,
        });
    }
    let mut k = (k as u64).max(1);
    // pow rounding can leave the bound a hair above tol
    while series_tail_bound(alpha, gamma, k) > policy.tol {
        k += 1;
    }
    if k > policy.max_terms {
        return Err(Error::TruncationBudget { terms: k, max_terms: policy.max_terms, tol: policy.tol });
    }
    Ok(k)
}

/// Bound on `sum_{k > K} 2 gamma k^{-2 alpha}`.
pub fn series_tail_bound(alpha: f64, gamma: f64, terms: u64) -> f64 {
    let p = 2.0 * alpha - 1.0;
    2.0 * gamma * (terms as f64).powf(-p) / p
}

#[inline]
fn coefficient(alpha: f64, k: u64) -> f64 {
    let kf = k as f64;
    if alpha.fract() == 0.0 && alpha <= 16.0 {
        kf.powi(-2 * alpha as i32)
    } else {
        kf.powf(-2.0 * alpha)
    }
}

/// `sum_{k=1}^{K} c_k cos(k theta_1) + c_k cos(k theta_2)` with rotation
/// recurrences resynchronised every 256 steps.
fn paired_cosine_series(alpha: f64, theta1: f64, theta2: f64, terms: u64) -> f64 {
    let (s1, c1) = theta1.sin_cos();
    let (s2, c2) = theta2.sin_cos();
    let (mut a_re, mut a_im) = (1.0f64, 0.0f64);
    let (mut b_re, mut b_im) = (1.0f64, 0.0f64);
    let mut acc = 0.0;
    for k in 1..=terms {
        if k % 256 == 0 {
            let (si, co) = (k as f64 * theta1).sin_cos();
            a_re = co;
            a_im = si;
            let (si, co) = (k as f64 * theta2).sin_cos();
            b_re = co;
            b_im = si;
        } else {
            let t = a_re * c1 - a_im * s1;
            a_im = a_re * s1 + a_im * c1;
            a_re = t;
            let t = b_re * c2 - b_im * s2;
            b_im = b_re * s2 + b_im * c2;
            b_re = t;
        }
        acc += coefficient(alpha, k) * (a_re + b_re);
    }
    acc
}

/// Truncated half-period cosine kernel factor
/// `1 + sum_{k<=K} gamma k^{-2 alpha} 2 cos(pi k x) cos(pi k y)`.
pub fn cosine_series(alpha: f64, gamma: f64, x: f64, y: f64, terms: u64) -> KernelValue {
    // 2 cos a cos b = cos(a - b) + cos(a + b)
    let sum = paired_cosine_series(alpha, PI * (x - y), PI * (x + y), terms);
    KernelValue { value: 1.0 + gamma * sum, tail_bound: series_tail_bound(alpha, gamma, terms) }
}

/// Truncated Korobov kernel factor `1 + 2 gamma sum_{h<=K} h^{-2 alpha} cos(2 pi h (x - y))`.
pub fn korobov_series(alpha: f64, gamma: f64, x: f64, y: f64, terms: u64) -> KernelValue {
    let theta = 2.0 * PI * (x - y);
    let sum = paired_cosine_series(alpha, theta, theta, terms);
    KernelValue { value: 1.0 + gamma * sum, tail_bound: series_tail_bound(alpha, gamma, terms) }
}

fn sobolev_factor(order: u32, gamma: f64, x: f64, y: f64) -> f64 {
    let mut acc = 0.0;
    for tau in 1..=order {
        let f = factorial(tau);
        acc += bernoulli_unchecked(tau, x) * bernoulli_unchecked(tau, y) / (f * f);
    }
    let sign = if order.is_multiple_of(2) { -1.0 } else { 1.0 };
    let two_a = 2 * order;
    1.0 + gamma * acc + sign * gamma * bernoulli_unchecked(two_a, (x - y).abs()) / factorial(two_a)
}

#[inline]
fn korobov_closed(order: u32, gamma: f64, x: f64, y: f64) -> f64 {
    1.0 + gamma * korobov_omega(order, x - y)
}

#[inline]
fn cosine_closed(order: u32, gamma: f64, x: f64, y: f64) -> f64 {
    1.0 + 0.5 * gamma * (korobov_omega(order, 0.5 * (x - y)) + korobov_omega(order, 0.5 * (x + y)))
}

/// One-dimensional kernel factor of the given family.
///
/// Integer smoothness 1..=3 uses closed forms for every family; other
/// smoothness values fall back to the truncated series with a tail bound
/// of at most `policy.tol`.
pub fn kernel_factor(
    family: Family,
    alpha: f64,
    gamma: f64,
    x: f64,
    y: f64,
    policy: &TruncationPolicy,
) -> Result<KernelValue> {
    if let Some(order) = closed_form_order(alpha) {
        let v = match family {
            Family::Sobolev => sobolev_factor(order, gamma, x, y),
            Family::Korobov => korobov_closed(order, gamma, x, y),
            Family::Cosine => cosine_closed(order, gamma, x, y),
            Family::KorobovPlusCosine => {
                0.5 * (korobov_closed(order, gamma, x, y) + cosine_closed(order, gamma, x, y))
            }
        };
        return Ok(KernelValue::exact(v));
    }
    series_factor(family, alpha, gamma, x, y, policy)
}

/// One-dimensional kernel factor from the defining series regardless of smoothness.
pub fn series_factor(
    family: Family,
    alpha: f64,
    gamma: f64,
    x: f64,
    y: f64,
    policy: &TruncationPolicy,
) -> Result<KernelValue> {
    match family {
        Family::Sobolev => Err(Error::InvalidParameter(
            "the Sobolev kernel has no series evaluation path".into(),
        )),
        Family::Korobov => Ok(korobov_series(alpha, gamma, x, y, terms_for(alpha, gamma, policy)?)),
        Family::Cosine => Ok(cosine_series(alpha, gamma, x, y, terms_for(alpha, gamma, policy)?)),
        Family::KorobovPlusCosine => {
            let terms = terms_for(alpha, gamma, policy)?;
            let k = korobov_series(alpha, gamma, x, y, terms);
            let c = cosine_series(alpha, gamma, x, y, terms);
            Ok(KernelValue {
                value: 0.5 * (k.value + c.value),
                tail_bound: 0.5 * (k.tail_bound + c.tail_bound),
            })
        }
    }
}

fn check_points(spec: &SpaceSpec, x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != spec.dim() || y.len() != spec.dim() {
        return Err(Error::InvalidParameter(format!(
            "points of dimension {} and {} for a {}-dimensional space",
            x.len(),
            y.len(),
            spec.dim()
        )));
    }
    Ok(())
}

/// Tensor-product kernel `prod_j K(x_j, y_j)`.
pub fn kernel_eval(spec: &SpaceSpec, x: &[f64], y: &[f64], policy: &TruncationPolicy) -> Result<KernelValue> {
    check_points(spec, x, y)?;
    let factors = spec
        .gammas
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&g, (&xj, &yj))| kernel_factor(spec.family, spec.alpha, g, xj, yj, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelValue::product(factors))
}

/// Tensor-product kernel evaluated from the truncated defining series.
pub fn kernel_eval_series(
    spec: &SpaceSpec,
    x: &[f64],
    y: &[f64],
    policy: &TruncationPolicy,
) -> Result<KernelValue> {
    check_points(spec, x, y)?;
    let factors = spec
        .gammas
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&g, (&xj, &yj))| series_factor(spec.family, spec.alpha, g, xj, yj, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelValue::product(factors))
}
