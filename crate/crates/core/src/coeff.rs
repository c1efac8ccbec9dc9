//! Numerical cosine and Fourier coefficients by composite Gauss-Legendre quadrature.
//!
//! Used as an oracle for closed-form coefficients. The panel count grows
//! with the highest frequency so that every half-period spans at least five
//! panels; accuracy is estimated by comparing against a run with twice as
//! many panels.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use crate::error::{Error, Result};

const GL_ORDER: usize = 16;
const MIN_PANELS: usize = 8;
const PANELS_PER_HALF_PERIOD: usize = 5;

/// Absolute accuracy target for the panel-doubling check.
pub const ACCURACY_TARGET: f64 = 1e-10;

/// Complex number as a (re, im) pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl std::ops::Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Composite rule on [0, 1] with `panels` equal panels.
fn composite_nodes(panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = rule16();
    let h = 1.0 / panels as f64;
    let mut xs = Vec::with_capacity(panels * GL_ORDER);
    let mut ws = Vec::with_capacity(panels * GL_ORDER);
    for p in 0..panels {
        let a = p as f64 * h;
        for (ti, wi) in t.iter().zip(w) {
            xs.push(a + 0.5 * h * (ti + 1.0));
            ws.push(0.5 * h * wi);
        }
    }
    (xs, ws)
}

/// Tensor-product quadrature of `f` over [0,1]^s.
fn tensor_quad<F: Fn(&[f64]) -> Complex>(f: &F, s: usize, panels: usize) -> Complex {
    let (xs, ws) = composite_nodes(panels);
    let m = xs.len();
    let mut idx = vec![0usize; s];
    let mut x = vec![0.0; s];
    let mut acc_re = crate::special::CompensatedSum::new();
    let mut acc_im = crate::special::CompensatedSum::new();
    loop {
        let mut w = 1.0;
        for j in 0..s {
            x[j] = xs[idx[j]];
            w *= ws[idx[j]];
        }
        let v = f(&x);
        acc_re.add(w * v.re);
        acc_im.add(w * v.im);
        let mut j = s;
        loop {
            if j == 0 {
                return Complex::new(acc_re.value(), acc_im.value());
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < m {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn panels_for(half_periods: u64) -> usize {
    MIN_PANELS.max(PANELS_PER_HALF_PERIOD * half_periods as usize)
}

fn doubled<F: Fn(&[f64]) -> Complex>(f: &F, s: usize, panels: usize) -> Result<Complex> {
    let coarse = tensor_quad(f, s, panels);
    let fine = tensor_quad(f, s, 2 * panels);
    let estimate = (fine - coarse).abs();
    if !(estimate <= ACCURACY_TARGET) {
        return Err(Error::AccuracyTarget { estimate, target: ACCURACY_TARGET });
    }
    Ok(fine)
}

/// Cosine coefficient `int f(x) prod_j c_{k_j}(x_j) dx` with `c_0 = 1` and
/// `c_k(x) = sqrt(2) cos(pi k x)`.
pub fn cosine_coeff<F: Fn(&[f64]) -> f64>(f: F, k: &[u64]) -> Result<f64> {
    let s = k.len();
    if s == 0 {
        return Err(Error::InvalidParameter("frequency vector is empty".into()));
    }
    let kmax = k.iter().copied().max().unwrap_or(0);
    let integrand = |x: &[f64]| {
        let basis: f64 = k
            .iter()
            .zip(x)
            .map(|(&kj, &xj)| if kj == 0 { 1.0 } else { SQRT_2 * (PI * kj as f64 * xj).cos() })
            .product();
        Complex::new(f(x) * basis, 0.0)
    };
    Ok(doubled(&integrand, s, panels_for(kmax))?.re)
}

/// Fourier coefficient `int f(x) exp(-2 pi i h . x) dx`.
pub fn fourier_coeff<F: Fn(&[f64]) -> Complex>(f: F, h: &[i64]) -> Result<Complex> {
    let s = h.len();
    if s == 0 {
        return Err(Error::InvalidParameter("frequency vector is empty".into()));
    }
    let hmax = h.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let integrand = |x: &[f64]| {
        let phase: f64 = -2.0 * PI * h.iter().zip(x).map(|(&hj, &xj)| hj as f64 * xj).sum::<f64>();
        let (si, co) = phase.sin_cos();
        let v = f(x);
        Complex::new(v.re * co - v.im * si, v.re * si + v.im * co)
    };
    doubled(&integrand, s, panels_for(2 * hmax))
}
