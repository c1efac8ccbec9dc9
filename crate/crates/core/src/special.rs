//! Bernoulli polynomials, the Riemann zeta function and small numeric helpers.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Monomial coefficients of B_1..B_6, constant term first.
const BERNOULLI_COEFFS: [&[f64]; 6] = [
    &[-0.5, 1.0],
    &[1.0 / 6.0, -1.0, 1.0],
    &[0.0, 0.5, -1.5, 1.0],
    &[-1.0 / 30.0, 0.0, 1.0, -2.0, 1.0],
    &[0.0, -1.0 / 6.0, 0.0, 5.0 / 3.0, -2.5, 1.0],
    &[1.0 / 42.0, 0.0, -0.5, 0.0, 2.5, -3.0, 1.0],
];

pub const MAX_BERNOULLI_DEGREE: u32 = 6;

/// Bernoulli polynomial B_tau(x) for 1 <= tau <= 6.
pub fn bernoulli_poly(tau: u32, x: f64) -> Result<f64> {
    if !(1..=MAX_BERNOULLI_DEGREE).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "Bernoulli degree {tau} outside supported range 1..={MAX_BERNOULLI_DEGREE}"
        )));
    }
    Ok(horner(BERNOULLI_COEFFS[tau as usize - 1], x))
}

/// Same as [`bernoulli_poly`] for callers that have already validated `tau`.
#[inline]
pub(crate) fn bernoulli_unchecked(tau: u32, x: f64) -> f64 {
    horner(BERNOULLI_COEFFS[tau as usize - 1], x)
}

#[inline]
fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Fractional part {x} = x - floor(x), always in [0, 1).
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Returns `Some(a)` when `alpha` is an integer in 1..=3, the range with closed-form kernels.
pub fn closed_form_order(alpha: f64) -> Option<u32> {
    if alpha.fract() == 0.0 && (1.0..=3.0).contains(&alpha) {
        Some(alpha as u32)
    } else {
        None
    }
}

/// Even Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta function for real x > 1.
///
/// Even arguments 2, 4 and 6 use the classical closed forms. Large arguments
/// sum directly; everything else goes through Euler-Maclaurin summation with
/// 20 leading terms and ten Bernoulli corrections.
pub fn zeta(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "zeta({x}) is undefined: argument must exceed 1"
        )));
    }
    if x == 2.0 {
        return Ok(PI * PI / 6.0);
    }
    if x == 4.0 {
        return Ok(PI.powi(4) / 90.0);
    }
    if x == 6.0 {
        return Ok(PI.powi(6) / 945.0);
    }
    if x >= 40.0 {
        // 2^-40 < 1e-12; a handful of terms reach full precision.
        let mut sum = 0.0;
        for n in (1..=8).rev() {
            sum += (n as f64).powf(-x);
        }
        return Ok(sum);
    }

    const HEAD: u32 = 20;
    let n = HEAD as f64;
    let mut sum = 0.0;
    for k in (1..HEAD).rev() {
        sum += (k as f64).powf(-x);
    }
    sum += n.powf(1.0 - x) / (x - 1.0);
    sum += 0.5 * n.powf(-x);

    // Running rising factorial x(x+1)...(x+2k-2) / (2k)! * N^{-x-2k+1}.
    let mut coeff = x * n.powf(-x - 1.0) / 2.0;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = k as f64 + 1.0;
        if k > 1.0 {
            let a = x + 2.0 * k - 3.0;
            let c = x + 2.0 * k - 2.0;
            coeff *= a * c / ((2.0 * k - 1.0) * (2.0 * k) * n * n);
        }
        sum += b * coeff;
    }
    Ok(sum)
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Pairwise summation with a fixed split, independent of thread count.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}

/// Pairwise summation of `term(0) + ... + term(len - 1)`.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(len: usize, term: F) -> f64 {
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        if hi - lo <= 8 {
            (lo..hi).map(term).sum()
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    go(0, len, &term)
}
