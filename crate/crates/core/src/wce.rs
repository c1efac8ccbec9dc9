//! Squared worst-case errors.
//!
//! Three independent routes are available:
//!
//! * the kernel double sum over any weighted point set,
//! * the single sum over lattice nodes for the Korobov kernel with integer
//!   smoothness, which uses that differences of lattice nodes are lattice
//!   nodes again,
//! * a truncated sum of `r(h)` over the dual lattice.
//!
//! For the cosine space with tent-transformed nodes and the Korobov-plus-cosine
//! space with symmetrized nodes, the theorem paths return the Korobov value of
//! the plain lattice. That value bounds the true squared error from above. It
//! is exact for tent nodes in one dimension, and strict in general: the
//! cosine/tent error is `sum_k r(k) 2^{-|k|_0} m(k)^2` with `m(k)` the number
//! of sign patterns of `k` in the dual lattice, against `sum_k r(k) m(k)` for
//! Korobov. `verify_*` recomputes the true value by double sum.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{
    kernel_factor, korobov_omega_table, r_weight_product, validate_alpha, validate_weights, Family,
    SpaceSpec, TruncationPolicy,
};
use crate::points::{
    for_each_dual_vector, lattice_points, symmetrize, tent_transform, LatticeRule, WeightedPointSet,
};
use crate::special::{closed_form_order, pairwise_sum, zeta};

/// Node cap for the quadratic double-sum route.
pub const MAX_DOUBLE_SUM_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WceMethod {
    KernelDoubleSum,
    ClosedFormSingleSum,
    DualLatticeTruncated,
    TheoremEquivalence,
}

impl WceMethod {
    pub fn name(self) -> &'static str {
        match self {
            WceMethod::KernelDoubleSum => "kernel-double-sum",
            WceMethod::ClosedFormSingleSum => "closed-form-single-sum",
            WceMethod::DualLatticeTruncated => "dual-lattice-truncated",
            WceMethod::TheoremEquivalence => "theorem-equivalence",
        }
    }
}

impl fmt::Display for WceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Squared worst-case error with the method used and its truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WceResult {
    pub e2: f64,
    pub method: WceMethod,
    pub tail_bound: f64,
}

impl WceResult {
    fn with_method(self, method: WceMethod) -> Self {
        Self { method, ..self }
    }
}

/// `e^2 = -1 + sum_{n,n'} w_n w_n' K(x_n, x_n')`.
///
/// Every kernel here integrates to one in each variable, so the two integral
/// terms of the general formula collapse to the constant -1. Rows are summed
/// in parallel and combined with a fixed pairwise tree.
pub fn wce_double_sum(spec: &SpaceSpec, ps: &WeightedPointSet, policy: &TruncationPolicy) -> Result<WceResult> {
    if ps.dim() != spec.dim() {
        return Err(Error::InvalidParameter(format!(
            "{}-dimensional points for a {}-dimensional space",
            ps.dim(),
            spec.dim()
        )));
    }
    let m = ps.len();
    if m > MAX_DOUBLE_SUM_NODES {
        return Err(Error::InvalidParameter(format!(
            "double sum is limited to {MAX_DOUBLE_SUM_NODES} nodes, got {m}"
        )));
    }
    let gammas = spec.gammas();
    let rows: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let xi = ps.point(i);
            let wi = ps.weight(i);
            let mut vals = Vec::with_capacity(m);
            let mut tails = Vec::with_capacity(m);
            for k in 0..m {
                let xk = ps.point(k);
                let mut value = 1.0;
                let mut abs = 1.0;
                let mut widened = 1.0;
                for j in 0..gammas.len() {
                    let f = kernel_factor(spec.family(), spec.alpha(), gammas[j], xi[j], xk[j], policy)?;
                    value *= f.value;
                    abs *= f.value.abs();
                    widened *= f.value.abs() + f.tail_bound;
                }
                let w = wi * ps.weight(k);
                vals.push(w * value);
                tails.push(w * (widened - abs).max(0.0));
            }
            Ok((pairwise_sum(&vals), pairwise_sum(&tails)))
        })
        .collect::<Result<Vec<_>>>()?;
    let sums: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let tails: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(WceResult {
        e2: pairwise_sum(&sums) - 1.0,
        method: WceMethod::KernelDoubleSum,
        tail_bound: pairwise_sum(&tails),
    })
}

fn check_rule_weights(rule: &LatticeRule, alpha: f64, gammas: &[f64]) -> Result<()> {
    validate_alpha(alpha)?;
    validate_weights(gammas)?;
    if gammas.len() != rule.dim() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for a {}-dimensional rule",
            gammas.len(),
            rule.dim()
        )));
    }
    Ok(())
}

/// Squared worst-case error of a lattice rule in the Korobov space.
///
/// Integer smoothness 1..=3 uses the exact single sum
/// `-1 + (1/N) sum_n prod_j (1 + gamma_j omega({n g_j / N}))`; other
/// smoothness values use the truncated dual-lattice sum.
pub fn wce_korobov_lattice(
    rule: &LatticeRule,
    alpha: f64,
    gammas: &[f64],
    policy: &TruncationPolicy,
) -> Result<WceResult> {
    check_rule_weights(rule, alpha, gammas)?;
    match closed_form_order(alpha) {
        Some(order) => Ok(korobov_single_sum(rule, order, gammas)),
        None => wce_korobov_dual(rule, alpha, gammas, policy),
    }
}

fn korobov_single_sum(rule: &LatticeRule, order: u32, gammas: &[f64]) -> WceResult {
    let n = rule.modulus();
    let omega = korobov_omega_table(order, n);
    let mut prods = vec![1.0; n as usize];
    for (j, &gamma) in gammas.iter().enumerate() {
        let g = rule.generator()[j];
        for (k, p) in prods.iter_mut().enumerate() {
            let idx = crate::points::mul_mod(k as u64, g, n) as usize;
            *p *= 1.0 + gamma * omega[idx];
        }
    }
    WceResult {
        e2: -1.0 + pairwise_sum(&prods) / n as f64,
        method: WceMethod::ClosedFormSingleSum,
        tail_bound: 0.0,
    }
}

/// Truncated dual-lattice sum `sum_{h in L^perp \ 0, |h_j| <= H} r(h)`.
///
/// The box is the smallest `H` with per-dimension tail
/// `2 gamma_j H^{1-2a}/(2a-1) <= tol / (s max(3, prod_j (1 + 2 gamma_j zeta(2a))))`. The reported bound is the exact
/// mass of `r` outside the box, `prod_j (1 + 2 gamma_j zeta(2a)) -
/// prod_j (1 + 2 gamma_j sum_{h<=H} h^{-2a})`, which dominates the
/// dual-lattice terms left out.
pub fn wce_korobov_dual(
    rule: &LatticeRule,
    alpha: f64,
    gammas: &[f64],
    policy: &TruncationPolicy,
) -> Result<WceResult> {
    check_rule_weights(rule, alpha, gammas)?;
    let s = gammas.len() as f64;
    let p = 2.0 * alpha - 1.0;
    let gmax = gammas.iter().copied().fold(0.0, f64::max);
    let z = zeta(2.0 * alpha)?;
    let full: f64 = gammas.iter().map(|g| 1.0 + 2.0 * g * z).product();
    // Each dimension's tail is multiplied by at most the full mass of the others.
    let target = policy.tol / (s * full.max(3.0));
    let h = (2.0 * gmax / (p * target)).powf(1.0 / p).ceil().max(1.0);
    if !h.is_finite() || h > policy.max_terms as f64 {
        return Err(Error::TruncationBudget {
            terms: if h.is_finite() { h as u64 } else { u64::MAX },
            max_terms: policy.max_terms,
            tol: policy.tol,
        });
    }
    let bound = h as u64;
    let e2 = dual_lattice_sum(rule, alpha, gammas, bound, policy.max_terms)?;

    let partial: f64 = (1..=bound).rev().map(|k| (k as f64).powf(-2.0 * alpha)).sum();
    let boxed: f64 = gammas.iter().map(|g| 1.0 + 2.0 * g * partial).product();
    Ok(WceResult {
        e2,
        method: WceMethod::DualLatticeTruncated,
        tail_bound: (full - boxed).max(0.0),
    })
}

/// Sum of `r(h)` over nonzero dual-lattice vectors in the box `|h_j| <= bound`.
pub fn dual_lattice_sum(rule: &LatticeRule, alpha: f64, gammas: &[f64], bound: u64, cap: u64) -> Result<f64> {
    let mut acc = crate::special::CompensatedSum::new();
    for_each_dual_vector(rule, bound, cap, |h| acc.add(r_weight_product(alpha, gammas, h)))?;
    Ok(acc.value())
}

/// Cosine space with the tent-transformed lattice, via the Korobov value.
///
/// Exact for `s = 1`, an upper bound otherwise.
pub fn wce_cosine_tent(
    rule: &LatticeRule,
    alpha: f64,
    gammas: &[f64],
    policy: &TruncationPolicy,
) -> Result<WceResult> {
    Ok(wce_korobov_lattice(rule, alpha, gammas, policy)?.with_method(WceMethod::TheoremEquivalence))
}

/// Korobov-plus-cosine space with the symmetrized lattice, via the Korobov value.
///
/// An upper bound; in one dimension the true value is the mean of this and
/// [`wce_cosine_sym`].
pub fn wce_korcos_sym(
    rule: &LatticeRule,
    alpha: f64,
    gammas: &[f64],
    policy: &TruncationPolicy,
) -> Result<WceResult> {
    Ok(wce_korobov_lattice(rule, alpha, gammas, policy)?.with_method(WceMethod::TheoremEquivalence))
}

/// Cosine space with the symmetrized lattice: `sum_{h in L^perp \ 0} r(2h)`,
/// computed as the Korobov value with weights `gamma_j 4^{-alpha}`.
///
/// Exact in one dimension; the sign-pattern argument above makes it an upper
/// bound for `s > 1`.
pub fn wce_cosine_sym(
    rule: &LatticeRule,
    alpha: f64,
    gammas: &[f64],
    policy: &TruncationPolicy,
) -> Result<WceResult> {
    check_rule_weights(rule, alpha, gammas)?;
    let scale = 4f64.powf(-alpha);
    let scaled: Vec<f64> = gammas.iter().map(|g| g * scale).collect();
    Ok(wce_korobov_lattice(rule, alpha, &scaled, policy)?.with_method(WceMethod::TheoremEquivalence))
}

/// Outcome of checking an equality between two independently computed errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub theorem: WceResult,
    pub oracle: WceResult,
    pub discrepancy: f64,
    pub tolerance: f64,
}

impl Verification {
    fn new(theorem: WceResult, oracle: WceResult, abs_tol: f64) -> Self {
        Self {
            theorem,
            oracle,
            discrepancy: (theorem.e2 - oracle.e2).abs(),
            tolerance: abs_tol + theorem.tail_bound + oracle.tail_bound,
        }
    }

    pub fn holds(&self) -> bool {
        self.discrepancy <= self.tolerance
    }
}

/// Recomputes the cosine/tent value by the cosine-kernel double sum on tent-transformed nodes.
pub fn verify_cosine_tent(
    rule: &LatticeRule,
    alpha: f64,
    gammas: &[f64],
    policy: &TruncationPolicy,
    abs_tol: f64,
) -> Result<Verification> {
    let theorem = wce_cosine_tent(rule, alpha, gammas, policy)?;
    let spec = SpaceSpec::new(Family::Cosine, alpha, gammas.to_vec())?;
    let oracle = wce_double_sum(&spec, &tent_transform(&lattice_points(rule)), policy)?;
    Ok(Verification::new(theorem, oracle, abs_tol))
}

/// Recomputes the symmetrized value by the Korobov-plus-cosine double sum on
/// deduplicated symmetrized nodes.
pub fn verify_korcos_sym(
    rule: &LatticeRule,
    alpha: f64,
    gammas: &[f64],
    policy: &TruncationPolicy,
    abs_tol: f64,
) -> Result<Verification> {
    let theorem = wce_korcos_sym(rule, alpha, gammas, policy)?;
    let spec = SpaceSpec::new(Family::KorobovPlusCosine, alpha, gammas.to_vec())?;
    let oracle = wce_double_sum(&spec, &symmetrize(rule, true), policy)?;
    Ok(Verification::new(theorem, oracle, abs_tol))
}

/// `C = (-1 + prod_j (1 + 2 zeta(2 alpha / tau) gamma_j^{1/tau}))^{tau/2}`.
pub fn cbc_bound_constant(alpha: f64, gammas: &[f64], tau: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    validate_weights(gammas)?;
    if !(tau >= 1.0 && tau < 2.0 * alpha) {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} must lie in [1, 2 alpha) = [1, {})",
            2.0 * alpha
        )));
    }
    let z = zeta(2.0 * alpha / tau)?;
    let prod: f64 = gammas.iter().map(|g| 1.0 + 2.0 * z * g.powf(1.0 / tau)).product();
    Ok((prod - 1.0).powf(tau / 2.0))
}
