//! Component-by-component construction of generating vectors.
//!
//! Each component is chosen greedily to minimise the squared Korobov
//! worst-case error, which also bounds the error of the tent-transformed rule
//! in the cosine space and of the symmetrized rule in the Korobov-plus-cosine
//! space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{korobov_omega_table, validate_weights};
use crate::points::{mul_mod, LatticeRule};
use crate::special::{closed_form_order, pairwise_sum_by};
use crate::wce::cbc_bound_constant;

#[derive(Debug, Clone, PartialEq)]
pub struct CbcResult {
    pub rule: LatticeRule,
    /// Squared worst-case error of the first `d` components, `d = 1..=s`.
    pub per_dim_e2: Vec<f64>,
    /// `per_dim_e2[d] <= C^2 / (N - 1)` with the bound constant at `tau = 1`.
    pub bound_ok: Vec<bool>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Relative gap below which two candidate errors count as a tie.
const TIE_RTOL: f64 = 1e-13;

/// Units modulo `n` in ascending order.
pub fn candidate_set(n: u64) -> Vec<u64> {
    (1..n).filter(|&z| gcd(z, n) == 1).collect()
}

/// Greedy CBC construction for integer smoothness `alpha` in 1..=3.
///
/// Per-node products `prod_{j<d} (1 + gamma_j omega({n g_j / N}))` are kept
/// between dimensions, so each candidate costs O(N). Ties, up to a relative
/// rounding slack, go to the smallest candidate.
pub fn cbc_construct(n: u64, s: usize, alpha: f64, gammas: &[f64]) -> Result<CbcResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("modulus N = {n} must be at least 2")));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let order = closed_form_order(alpha).ok_or_else(|| {
        Error::InvalidParameter(format!("CBC needs integer smoothness in 1..=3, got {alpha}"))
    })?;
    validate_weights(gammas)?;
    if gammas.len() != s {
        return Err(Error::InvalidParameter(format!("{} weights for dimension {s}", gammas.len())));
    }
    let candidates = candidate_set(n);
    if candidates.is_empty() {
        return Err(Error::InvalidParameter(format!("no units modulo {n}")));
    }

    let omega = korobov_omega_table(order, n);
    let len = n as usize;
    let nf = n as f64;
    let mut prods = vec![1.0f64; len];
    let mut g = Vec::with_capacity(s);
    let mut per_dim_e2 = Vec::with_capacity(s);
    let mut bound_ok = Vec::with_capacity(s);

    for (d, &gamma) in gammas.iter().enumerate() {
        let score = |z: u64| -> f64 {
            let sum = pairwise_sum_by(len, |k| {
                prods[k] * (1.0 + gamma * omega[mul_mod(k as u64, z, n) as usize])
            });
            -1.0 + sum / nf
        };
        let scores: Vec<f64> = candidates.par_iter().map(|&z| score(z)).collect();
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        // Candidates that agree with the minimum up to the rounding of the
        // summed terms are ties; the bound on the mean term magnitude sets
        // that scale.
        let omega_max = omega.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        let scale = pairwise_sum_by(len, |k| prods[k].abs()) / nf * (1.0 + gamma * omega_max);
        let (best_e2, best_z) = scores
            .iter()
            .zip(&candidates)
            .find(|(&e, _)| e <= min + TIE_RTOL * scale)
            .map(|(&e, &z)| (e, z))
            .expect("candidate set is nonempty");
        for (k, p) in prods.iter_mut().enumerate() {
            *p *= 1.0 + gamma * omega[mul_mod(k as u64, best_z, n) as usize];
        }
        g.push(best_z);
        per_dim_e2.push(best_e2);
        let c = cbc_bound_constant(alpha, &gammas[..=d], 1.0)?;
        bound_ok.push(best_e2 <= c * c / (nf - 1.0));
    }

    Ok(CbcResult { rule: LatticeRule::new(n, g)?, per_dim_e2, bound_ok })
}
