//! Test integrands, lattice-rule integration and convergence studies.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cbc::cbc_construct;
use crate::error::{Error, Result};
use crate::points::{fmt_sig17, tent, visit_reflections, LatticeRule};
use crate::special::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFamily {
    G,
    H,
}

impl FromStr for TestFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" | "G" => Ok(TestFamily::G),
            "h" | "H" => Ok(TestFamily::H),
            other => Err(Error::Parse(format!("unknown test function family {other:?}"))),
        }
    }
}

/// Product test functions with weight parameter `w`; both integrate to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub family: TestFamily,
    pub s: usize,
    pub w: f64,
}

impl TestFunction {
    pub fn new(family: TestFamily, s: usize, w: f64) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("test function dimension must be at least 1".into()));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidParameter(format!("weight parameter w = {w} must be positive")));
        }
        Ok(Self { family, s, w })
    }

    pub fn exact_integral(&self) -> f64 {
        1.0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.family {
            TestFamily::G => eval_g(self.s, self.w, x),
            TestFamily::H => eval_h(self.s, self.w, x),
        }
    }
}

/// `prod_j (1 + w^j/21 (-10 + 42 x^2 - 42 x^5 + 21 x^6))`.
pub fn eval_g(s: usize, w: f64, x: &[f64]) -> f64 {
    let mut wj = 1.0;
    let mut prod = 1.0;
    for &xj in &x[..s] {
        wj *= w;
        let x2 = xj * xj;
        let poly = -10.0 + x2 * (42.0 + xj * xj * xj * (-42.0 + 21.0 * xj));
        prod *= 1.0 + wj / 21.0 * poly;
    }
    prod
}

/// `prod_j (1 + w^j/8 (31 - 84 x^2 + 8 x^3 + 70 x^4 - 28 x^6 + 8 x^7 - 16 cos 1 - 16 sin x))`.
pub fn eval_h(s: usize, w: f64, x: &[f64]) -> f64 {
    let c1 = 1f64.cos();
    let mut wj = 1.0;
    let mut prod = 1.0;
    for &xj in &x[..s] {
        wj *= w;
        let x2 = xj * xj;
        let poly = 31.0
            + x2 * (-84.0 + xj * (8.0 + xj * (70.0 + x2 * (-28.0 + 8.0 * xj))))
            - 16.0 * c1
            - 16.0 * xj.sin();
        prod *= 1.0 + wj / 8.0 * poly;
    }
    prod
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleVariant {
    Plain,
    Tent,
    Symmetrized,
}

impl RuleVariant {
    pub fn name(self) -> &'static str {
        match self {
            RuleVariant::Plain => "plain",
            RuleVariant::Tent => "tent",
            RuleVariant::Symmetrized => "sym",
        }
    }
}

impl fmt::Display for RuleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(RuleVariant::Plain),
            "tent" => Ok(RuleVariant::Tent),
            "sym" | "symmetrized" => Ok(RuleVariant::Symmetrized),
            other => Err(Error::Parse(format!("unknown rule variant {other:?}"))),
        }
    }
}

/// Largest symmetrized node count a study will evaluate.
pub const MAX_SYMMETRIZED_NODES: u64 = 1 << 24;
pub const MAX_SYMMETRIZED_DIM: usize = 10;

const CHUNK: u64 = 512;

/// Quadrature estimate and the number of distinct nodes evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub nodes: u64,
}

/// Equal-weight lattice average of `f` over the variant's node set.
pub fn integrate<F: Fn(&[f64]) -> f64 + Sync>(rule: &LatticeRule, variant: RuleVariant, f: F) -> f64 {
    integrate_counted(rule, variant, f).value
}

/// Like [`integrate`], also reporting the node count.
///
/// Nodes are streamed in fixed chunks whose compensated partial sums are
/// merged in chunk order, so the result does not depend on the thread count.
pub fn integrate_counted<F: Fn(&[f64]) -> f64 + Sync>(rule: &LatticeRule, variant: RuleVariant, f: F) -> Estimate {
    let n = rule.modulus();
    let s = rule.dim();
    let nf = n as f64;
    match variant {
        RuleVariant::Plain | RuleVariant::Tent => {
            let fold = variant == RuleVariant::Tent;
            let chunks: Vec<CompensatedSum> = (0..n.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut x = vec![0.0; s];
                    let mut acc = CompensatedSum::new();
                    for k in c * CHUNK..((c + 1) * CHUNK).min(n) {
                        for (j, xj) in x.iter_mut().enumerate() {
                            let v = rule.numerator(k, j) as f64 / nf;
                            *xj = if fold { tent(v) } else { v };
                        }
                        acc.add(f(&x));
                    }
                    acc
                })
                .collect();
            let mut total = CompensatedSum::new();
            chunks.iter().for_each(|c| total.merge(c));
            Estimate { value: total.value() / nf, nodes: n }
        }
        RuleVariant::Symmetrized => {
            let last = n / 2;
            let chunks: Vec<(CompensatedSum, u64)> = (0..(last + 1).div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut x = vec![0.0; s];
                    let mut acc = CompensatedSum::new();
                    let mut count = 0u64;
                    for k in c * CHUNK..((c + 1) * CHUNK).min(last + 1) {
                        visit_reflections(rule, k, &mut |num: &[u64], mult: u64| {
                            for (xj, &v) in x.iter_mut().zip(num) {
                                *xj = v as f64 / nf;
                            }
                            acc.add(mult as f64 * f(&x));
                            count += 1;
                        });
                    }
                    (acc, count)
                })
                .collect();
            let mut total = CompensatedSum::new();
            let mut nodes = 0;
            for (c, k) in &chunks {
                total.merge(c);
                nodes += k;
            }
            let denom = (1u64 << s) as f64 * nf;
            Estimate { value: total.value() / denom, nodes }
        }
    }
}

/// Weights and smoothness used to build a CBC vector for each `N` of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct CbcParams {
    pub alpha: f64,
    pub gammas: Vec<f64>,
}

/// Default CBC weights for a study of a test function with parameter `w`: `gamma_j = w^j`.
pub fn default_cbc_weights(s: usize, w: f64) -> Vec<f64> {
    (1..=s as i32).map(|j| w.powi(j)).collect()
}

/// One point of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub variant: RuleVariant,
    pub n: u64,
    pub nodes: u64,
    pub estimate: f64,
    pub abs_error: f64,
}

/// Integrates `f` with CBC lattices of every size in `n_list` under each variant.
///
/// Records are grouped by variant in the order given, each group ordered like `n_list`.
pub fn converge_study(
    f: &TestFunction,
    variants: &[RuleVariant],
    n_list: &[u64],
    cbc: &CbcParams,
) -> Result<Vec<ConvergenceRecord>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("N list must be strictly ascending".into()));
    }
    if cbc.gammas.len() != f.s {
        return Err(Error::InvalidParameter(format!(
            "{} CBC weights for a {}-dimensional integrand",
            cbc.gammas.len(),
            f.s
        )));
    }
    if variants.contains(&RuleVariant::Symmetrized) {
        if f.s > MAX_SYMMETRIZED_DIM {
            return Err(Error::InvalidParameter(format!(
                "symmetrized studies are limited to s <= {MAX_SYMMETRIZED_DIM}"
            )));
        }
        if let Some(&nmax) = n_list.last() {
            if (1u64 << (f.s - 1)).saturating_mul(nmax) > MAX_SYMMETRIZED_NODES {
                return Err(Error::InvalidParameter(format!(
                    "symmetrized rule with s = {} and N = {nmax} exceeds {MAX_SYMMETRIZED_NODES} nodes",
                    f.s
                )));
            }
        }
    }
    let rules = n_list
        .iter()
        .map(|&n| Ok(cbc_construct(n, f.s, cbc.alpha, &cbc.gammas)?.rule))
        .collect::<Result<Vec<_>>>()?;
    let exact = f.exact_integral();
    let mut out = Vec::with_capacity(variants.len() * n_list.len());
    for &variant in variants {
        for rule in &rules {
            let est = integrate_counted(rule, variant, |x| f.eval(x));
            out.push(ConvergenceRecord {
                variant,
                n: rule.modulus(),
                nodes: est.nodes,
                estimate: est.value,
                abs_error: (est.value - exact).abs(),
            });
        }
    }
    Ok(out)
}

/// `2^m` for `m` in `mmin..=mmax`.
pub fn powers_of_two(mmin: u32, mmax: u32) -> Result<Vec<u64>> {
    if mmin < 1 || mmin > mmax || mmax > 40 {
        return Err(Error::InvalidParameter(format!("bad exponent range {mmin}..={mmax}")));
    }
    Ok((mmin..=mmax).map(|m| 1u64 << m).collect())
}

/// Errors at or below this level sit on the floating-point floor and are not fitted.
pub const SLOPE_ERROR_FLOOR: f64 = 1e-13;

/// Least-squares slope of `log2(abs_error)` against `log2(N)`.
pub fn fit_slope(records: &[ConvergenceRecord]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.abs_error > SLOPE_ERROR_FLOOR)
        .map(|r| ((r.n as f64).log2(), r.abs_error.log2()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewRecords { usable: pts.len() });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

pub const CSV_HEADER: &str = "variant,N,nodes,estimate,abs_error";

pub fn to_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.variant,
            r.n,
            r.nodes,
            fmt_sig17(r.estimate),
            fmt_sig17(r.abs_error)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::symmetrized_node_count;
    use std::f64::consts::PI;

    fn rule(n: u64, g: &[u64]) -> LatticeRule {
        LatticeRule::new(n, g.to_vec()).unwrap()
    }

    #[test]
    fn g_spot_values() {
        assert!((eval_g(1, 0.1, &[0.0]) - (1.0 - 0.1 * 10.0 / 21.0)).abs() < 1e-15);
        assert!((eval_g(1, 0.1, &[1.0]) - (1.0 + 0.1 * 11.0 / 21.0)).abs() < 1e-15);
        assert!((eval_g(1, 0.1, &[0.0]) - 0.952381).abs() < 1e-6);
    }

    #[test]
    fn h_spot_values() {
        let base = (31.0 - 16.0 * 1f64.cos()) / 8.0;
        assert!((eval_h(1, 0.1, &[0.0]) - (1.0 + 0.1 * base)).abs() < 1e-15);
        assert!((eval_h(1, 0.1, &[0.0]) - 1.279440).abs() < 1e-6);
        let v = eval_h(2, 0.5, &[0.0, 0.0]);
        assert!((v - (1.0 + 0.5 * base) * (1.0 + 0.25 * base)).abs() < 1e-14);
    }

    #[test]
    fn test_functions_integrate_to_one() {
        // 16-point Gauss-Legendre per dimension is exact for the g polynomial.
        let (t, w) = crate::coeff::gauss_legendre(16);
        for &wp in &[0.1, 0.9, 2.0] {
            for fam in [TestFamily::G, TestFamily::H] {
                let one: f64 = t
                    .iter()
                    .zip(&w)
                    .map(|(ti, wi)| 0.5 * wi * TestFunction::new(fam, 1, wp).unwrap().eval(&[0.5 * (ti + 1.0)]))
                    .sum();
                assert!((one - 1.0).abs() < 1e-14, "{fam:?} w={wp}");
                let mut two = 0.0;
                for (ti, wi) in t.iter().zip(&w) {
                    for (tk, wk) in t.iter().zip(&w) {
                        let x = [0.5 * (ti + 1.0), 0.5 * (tk + 1.0)];
                        two += 0.25 * wi * wk * TestFunction::new(fam, 2, wp).unwrap().eval(&x);
                    }
                }
                assert!((two - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn constants_exact_for_all_variants() {
        for r in [rule(7, &[1, 3]), rule(16, &[1, 7, 5]), rule(2, &[1])] {
            for v in [RuleVariant::Plain, RuleVariant::Tent, RuleVariant::Symmetrized] {
                assert!((integrate(&r, v, |_| 1.0) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn symmetrized_integrates_odd_terms_exactly() {
        for r in [rule(5, &[2]), rule(8, &[3]), rule(13, &[1, 5])] {
            let c = integrate(&r, RuleVariant::Symmetrized, |x| (PI * x[0]).cos());
            assert!(c.abs() < 1e-14);
            let lin = integrate(&r, RuleVariant::Symmetrized, |x| x[0]);
            assert!((lin - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetrized_node_count_reported() {
        let r = rule(64, &[1, 19, 27]);
        let e = integrate_counted(&r, RuleVariant::Symmetrized, |_| 1.0);
        assert_eq!(e.nodes, symmetrized_node_count(64, 3));
        let r = rule(63, &[1, 5]);
        let e = integrate_counted(&r, RuleVariant::Symmetrized, |_| 1.0);
        assert_eq!(e.nodes, symmetrized_node_count(63, 2));
    }

    #[test]
    fn symmetrized_stream_matches_materialized() {
        let r = rule(30, &[1, 7, 11]);
        let f = |x: &[f64]| eval_h(3, 0.7, x);
        let streamed = integrate(&r, RuleVariant::Symmetrized, f);
        let materialized = crate::points::symmetrize(&r, true).apply(f);
        assert!((streamed - materialized).abs() < 1e-14);
    }

    #[test]
    fn tent_and_plain_agree_on_even_cosines() {
        let r = rule(37, &[1, 10]);
        for k in 0..6 {
            let f = |x: &[f64]| (2.0 * PI * k as f64 * x[0]).cos() * (2.0 * PI * (k + 1) as f64 * x[1]).cos();
            let a = integrate(&r, RuleVariant::Plain, f);
            let b = integrate(&r, RuleVariant::Tent, f);
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_study() {
        let f = TestFunction::new(TestFamily::G, 2, 1e-300).unwrap();
        let recs = converge_study(
            &f,
            &[RuleVariant::Plain, RuleVariant::Tent, RuleVariant::Symmetrized],
            &[8, 16, 32],
            &CbcParams { alpha: 1.0, gammas: vec![1.0, 0.5] },
        )
        .unwrap();
        assert_eq!(recs.len(), 9);
        assert!(recs.iter().all(|r| r.abs_error <= 1e-14));
        assert_eq!(recs[6].nodes, symmetrized_node_count(8, 2));
    }

    #[test]
    fn study_rejects_bad_input() {
        let f = TestFunction::new(TestFamily::G, 2, 0.5).unwrap();
        let p = CbcParams { alpha: 1.0, gammas: vec![1.0, 1.0] };
        assert!(converge_study(&f, &[RuleVariant::Plain], &[16, 8], &p).is_err());
        let p1 = CbcParams { alpha: 1.0, gammas: vec![1.0] };
        assert!(converge_study(&f, &[RuleVariant::Plain], &[8], &p1).is_err());
        let f11 = TestFunction::new(TestFamily::G, 11, 0.5).unwrap();
        let p11 = CbcParams { alpha: 1.0, gammas: vec![1.0; 11] };
        assert!(converge_study(&f11, &[RuleVariant::Symmetrized], &[8], &p11).is_err());
        assert!(TestFunction::new(TestFamily::G, 0, 0.5).is_err());
        assert!(TestFunction::new(TestFamily::G, 1, -0.5).is_err());
    }

    fn synthetic(c: f64, p: f64) -> Vec<ConvergenceRecord> {
        (6..=14)
            .map(|m| {
                let n = 1u64 << m;
                ConvergenceRecord {
                    variant: RuleVariant::Plain,
                    n,
                    nodes: n,
                    estimate: 1.0,
                    abs_error: c * (n as f64).powf(-p),
                }
            })
            .collect()
    }

    #[test]
    fn slope_of_exact_power_laws() {
        assert!((fit_slope(&synthetic(3.0, 1.0)).unwrap() + 1.0).abs() < 1e-9);
        assert!((fit_slope(&synthetic(0.2, 3.0)).unwrap() + 3.0).abs() < 1e-9);
    }

    #[test]
    fn slope_excludes_floor() {
        let mut recs = synthetic(1.0, 3.0);
        // Three records are not enough; a zero error is dropped from the fit.
        assert!(matches!(fit_slope(&recs[..3]), Err(Error::TooFewRecords { .. })));
        recs[8].abs_error = 0.0;
        assert!((fit_slope(&recs).unwrap() + 3.0).abs() < 1e-9);
    }

    #[test]
    fn csv_layout() {
        let recs = vec![ConvergenceRecord {
            variant: RuleVariant::Symmetrized,
            n: 8,
            nodes: 9,
            estimate: 0.5,
            abs_error: 0.5,
        }];
        assert_eq!(
            to_csv(&recs),
            "variant,N,nodes,estimate,abs_error\nsym,8,9,5.0000000000000000e-1,5.0000000000000000e-1\n"
        );
    }
}
