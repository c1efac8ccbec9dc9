//! Rank-1 lattice node sets, the tent transformation and symmetrization.
//!
//! Node coordinates are produced from integer numerators `k` with
//! `0 <= k <= N`, so every coordinate is exactly `k / N` after a single
//! division. Symmetrization reflects numerators (`k -> N - k`) and
//! deduplicates on the integer representation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Rank-1 lattice rule with modulus `N` and generating vector `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeRule {
    n: u64,
    g: Vec<u64>,
}

impl LatticeRule {
    pub fn new(n: u64, g: Vec<u64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRule(format!("modulus N = {n} must be at least 2")));
        }
        if g.is_empty() {
            return Err(Error::InvalidRule("generating vector is empty".into()));
        }
        if let Some((j, &gj)) = g.iter().enumerate().find(|(_, &gj)| gj == 0 || gj >= n) {
            return Err(Error::InvalidRule(format!(
                "g[{}] = {gj} is outside [1, {}]",
                j + 1,
                n - 1
            )));
        }
        Ok(Self { n, g })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn generator(&self) -> &[u64] {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// Numerator of coordinate `j` of node `k`, i.e. `k * g_j mod N`.
    #[inline]
    pub fn numerator(&self, k: u64, j: usize) -> u64 {
        mul_mod(k, self.g[j], self.n)
    }

    /// Restriction to the first `d` components.
    pub fn truncate(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.dim() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate a {}-dimensional rule to {d} components",
                self.dim()
            )));
        }
        Ok(Self { n: self.n, g: self.g[..d].to_vec() })
    }

    /// Generating-vector file: `"N s"` on the first line, `g_1 ... g_s` on the second.
    pub fn to_vector_file(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LatticeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.g.len())?;
        let parts: Vec<String> = self.g.iter().map(|g| g.to_string()).collect();
        writeln!(f, "{}", parts.join(" "))
    }
}

impl FromStr for LatticeRule {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("generating-vector file is empty".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::Parse(format!("expected \"N s\" on line 1, found {header:?}")));
        }
        let n: u64 = head[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus {:?}", head[0])))?;
        let s: usize = head[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension {:?}", head[1])))?;
        let body = lines
            .next()
            .ok_or_else(|| Error::Parse("missing generating vector on line 2".into()))?;
        let g = body
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad component {t:?}"))))
            .collect::<Result<Vec<u64>>>()?;
        if g.len() != s {
            return Err(Error::Parse(format!(
                "header announces {s} components, line 2 has {}",
                g.len()
            )));
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("unexpected trailing line {extra:?}")));
        }
        LatticeRule::new(n, g)
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// Quadrature nodes in `[0,1]^s` with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point set dimension must be at least 1".into()));
        }
        if coords.len() != dim * weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not form {} points of dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidParameter("point set is empty".into()));
        }
        if let Some(x) = coords.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("coordinate {x} outside [0,1]")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { dim, coords, weights })
    }

    /// Equal weights `1/M` for `M` points.
    pub fn equal_weight(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        let m = coords.len() / dim;
        Self::new(dim, coords, vec![1.0 / m as f64; m])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.coords.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    /// Weighted sum `sum_i w_i f(x_i)`.
    pub fn apply<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        let mut acc = crate::special::CompensatedSum::new();
        for (x, w) in self.iter() {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// Points file: one node per line, coordinates then the weight,
    /// each printed with 17 significant digits.
    pub fn to_points_file(&self) -> String {
        let mut out = String::new();
        for (x, w) in self.iter() {
            let mut cols: Vec<String> = x.iter().map(|v| fmt_sig17(*v)).collect();
            cols.push(fmt_sig17(w));
            out.push_str(&cols.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses a points file of dimension `dim`. Lines with `dim` columns are
    /// unweighted, lines with `dim + 1` columns carry a trailing weight; a
    /// file must not mix the two.
    pub fn from_points_file(text: &str, dim: usize) -> Result<Self> {
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        let mut weighted: Option<bool> = None;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: bad number {t:?}", lineno + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            let has_weight = if vals.len() == dim {
                false
            } else if vals.len() == dim + 1 {
                true
            } else {
                return Err(Error::Parse(format!(
                    "line {}: expected {dim} or {} columns, found {}",
                    lineno + 1,
                    dim + 1,
                    vals.len()
                )));
            };
            if *weighted.get_or_insert(has_weight) != has_weight {
                return Err(Error::Parse(format!(
                    "line {}: weighted and unweighted lines are mixed",
                    lineno + 1
                )));
            }
            coords.extend_from_slice(&vals[..dim]);
            if has_weight {
                weights.push(vals[dim]);
            }
        }
        match weighted {
            None => Err(Error::Parse("points file is empty".into())),
            Some(true) => Self::new(dim, coords, weights),
            Some(false) => Self::equal_weight(dim, coords),
        }
    }
}

/// Formats a real with 17 significant digits.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rank-1 lattice nodes `{n g / N}`, `n = 0..N`, each with weight `1/N`.
pub fn lattice_points(rule: &LatticeRule) -> WeightedPointSet {
    let n = rule.modulus();
    let s = rule.dim();
    let nf = n as f64;
    let coords: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|k| (0..s).map(move |j| rule.numerator(k, j) as f64 / nf))
        .collect();
    WeightedPointSet {
        dim: s,
        coords,
        weights: vec![1.0 / nf; n as usize],
    }
}

/// Tent map `1 - |2x - 1|`.
#[inline]
pub fn tent(x: f64) -> f64 {
    1.0 - (2.0 * x - 1.0).abs()
}

/// Applies the tent map to every coordinate; weights are unchanged.
pub fn tent_transform(ps: &WeightedPointSet) -> WeightedPointSet {
    WeightedPointSet {
        dim: ps.dim,
        coords: ps.coords.iter().map(|&x| tent(x)).collect(),
        weights: ps.weights.clone(),
    }
}

/// Node count of the deduplicated symmetrized rule for a generating vector
/// whose components are units modulo `N`.
pub fn symmetrized_node_count(n: u64, s: usize) -> u64 {
    let half = 1u64 << (s - 1);
    if n % 2 == 1 {
        half * (n + 1)
    } else {
        half * n + 1
    }
}

/// Visits the symmetrized node set with multiplicities.
///
/// Only `0 <= k <= N/2` is enumerated: node `N - k` is the full reflection of
/// node `k`, so each reflection of an interior node is counted twice. The
/// reflections of one node are produced in Gray-code order, skipping
/// coordinates that are their own mirror image (numerator `N/2`) and
/// doubling the multiplicity for each of them instead. The callback gets the
/// integer numerators of the node and its multiplicity out of `2^s N`.
///
/// Nodes with distinct `k` may coincide when `g` has components sharing a
/// factor with `N`; such nodes are visited separately here and merged by
/// [`symmetrize`].
pub fn visit_symmetrized<F: FnMut(&[u64], u64)>(rule: &LatticeRule, mut visit: F) {
    let n = rule.modulus();
    for k in 0..=n / 2 {
        visit_reflections(rule, k, &mut visit);
    }
}

pub(crate) fn visit_reflections<F: FnMut(&[u64], u64)>(rule: &LatticeRule, k: u64, visit: &mut F) {
    let n = rule.modulus();
    let s = rule.dim();
    let mut num: Vec<u64> = (0..s).map(|j| rule.numerator(k, j)).collect();
    let flippable: Vec<usize> = (0..s).filter(|&j| 2 * num[j] != n).collect();
    let fixed = (s - flippable.len()) as u32;
    let interior = k != 0 && 2 * k != n;
    let mult = (1u64 << fixed) * if interior { 2 } else { 1 };
    visit(&num, mult);
    let count = 1u64 << flippable.len();
    for i in 1..count {
        let j = flippable[i.trailing_zeros() as usize];
        num[j] = n - num[j];
        visit(&num, mult);
    }
}

/// Symmetrized lattice rule.
///
/// With `dedupe` off this is the full multiset of `2^s N` reflected nodes,
/// each with weight `1 / (2^s N)`. With `dedupe` on, coincident nodes are
/// merged (exactly, on integer numerators) and carry the summed weight.
pub fn symmetrize(rule: &LatticeRule, dedupe: bool) -> WeightedPointSet {
    let n = rule.modulus();
    let s = rule.dim();
    let nf = n as f64;
    let total = (1u64 << s) as f64 * nf;
    if !dedupe {
        let mut coords = Vec::with_capacity((1usize << s) * n as usize * s);
        for k in 0..n {
            let base: Vec<u64> = (0..s).map(|j| rule.numerator(k, j)).collect();
            for u in 0..(1u64 << s) {
                for (j, &b) in base.iter().enumerate() {
                    let v = if u >> j & 1 == 1 { n - b } else { b };
                    coords.push(v as f64 / nf);
                }
            }
        }
        let m = coords.len() / s;
        return WeightedPointSet { dim: s, coords, weights: vec![1.0 / total; m] };
    }

    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut nodes: Vec<Vec<u64>> = Vec::new();
    let mut mults: Vec<u64> = Vec::new();
    visit_symmetrized(rule, |num, mult| match index.get(num) {
        Some(&i) => mults[i] += mult,
        None => {
            index.insert(num.to_vec(), nodes.len());
            nodes.push(num.to_vec());
            mults.push(mult);
        }
    });
    let coords = nodes.iter().flat_map(|v| v.iter().map(|&c| c as f64 / nf)).collect();
    let weights = mults.iter().map(|&m| m as f64 / total).collect();
    WeightedPointSet { dim: s, coords, weights }
}

/// Default cap on the number of candidates scanned by [`dual_lattice`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 50_000_000;

/// Nonzero dual-lattice vectors `h` with `|h_j| <= bound` and `h . g = 0 (mod N)`,
/// found by an exhaustive scan of the box in lexicographic order.
pub fn dual_lattice(rule: &LatticeRule, bound: u64, cap: u64) -> Result<Vec<Vec<i64>>> {
    if bound == 0 {
        return Err(Error::InvalidParameter("dual lattice box bound must be at least 1".into()));
    }
    let mut out = Vec::new();
    for_each_dual_vector(rule, bound, cap, |h| out.push(h.to_vec()))?;
    Ok(out)
}

/// Streams the vectors that [`dual_lattice`] would return.
pub fn for_each_dual_vector<F: FnMut(&[i64])>(
    rule: &LatticeRule,
    bound: u64,
    cap: u64,
    mut visit: F,
) -> Result<()> {
    let s = rule.dim();
    let side = 2 * bound as u128 + 1;
    let count = side.checked_pow(s as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::EnumerationBudget { count, cap });
    }
    let n = rule.modulus() as i128;
    let b = bound as i64;
    let g: Vec<i128> = rule.generator().iter().map(|&v| v as i128).collect();
    let mut h = vec![-b; s];
    loop {
        let dot: i128 = h.iter().zip(&g).map(|(&hj, &gj)| hj as i128 * gj).sum();
        if dot.rem_euclid(n) == 0 && h.iter().any(|&v| v != 0) {
            visit(&h);
        }
        // odometer
        let mut j = s;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            if h[j] < b {
                h[j] += 1;
                break;
            }
            h[j] = -b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rule(n: u64, g: &[u64]) -> LatticeRule {
        LatticeRule::new(n, g.to_vec()).unwrap()
    }

    #[test]
    fn rule_validation() {
        assert!(LatticeRule::new(1, vec![1]).is_err());
        assert!(LatticeRule::new(4, vec![0]).is_err());
        assert!(LatticeRule::new(4, vec![4]).is_err());
        assert!(LatticeRule::new(4, vec![]).is_err());
        assert!(LatticeRule::new(4, vec![2, 3]).is_ok());
    }

    #[test]
    fn lattice_spot_values() {
        let ps = lattice_points(&rule(4, &[1, 3]));
        assert_eq!(ps.len(), 4);
        assert_eq!(ps.point(0), &[0.0, 0.0]);
        assert_eq!(ps.point(1), &[0.25, 0.75]);
        assert!(ps.weights().iter().all(|&w| w == 0.25));

        let ps = lattice_points(&rule(5, &[2]));
        let xs: Vec<f64> = ps.iter().map(|(x, _)| x[0]).collect();
        assert_eq!(xs, vec![0.0, 0.4, 0.8, 0.2, 0.6]);
    }

    #[test]
    fn tent_spot_values() {
        assert_eq!(tent(0.0), 0.0);
        assert_eq!(tent(0.5), 1.0);
        assert_eq!(tent(0.25), 0.5);
        assert_eq!(tent(1.0), 0.0);

        let ps = WeightedPointSet::equal_weight(2, vec![0.25, 0.75]).unwrap();
        assert_eq!(tent_transform(&ps).point(0), &[0.5, 0.5]);
        let ps = tent_transform(&lattice_points(&rule(2, &[1])));
        assert_eq!(ps.point(0), &[0.0]);
        assert_eq!(ps.point(1), &[1.0]);
        let ps = WeightedPointSet::equal_weight(3, vec![0.0; 3]).unwrap();
        assert_eq!(tent_transform(&ps).point(0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn tent_reflection_symmetry_on_grid() {
        let m = 10_000;
        for i in 0..=m {
            let x = i as f64 / m as f64;
            let y = (m - i) as f64 / m as f64;
            assert!((tent(x) - tent(y)).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn tent_periodizes_cosines() {
        use std::f64::consts::PI;
        for k in 0..=20 {
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                let a = (PI * k as f64 * tent(x)).cos();
                let b = (2.0 * PI * k as f64 * x).cos();
                assert!((a - b).abs() < 1e-12, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn symmetrized_spot_counts() {
        assert_eq!(symmetrize(&rule(3, &[1, 2]), true).len(), 8);
        assert_eq!(symmetrize(&rule(4, &[1, 3]), true).len(), 9);
        let ps = symmetrize(&rule(5, &[1]), true);
        let mut xs: Vec<f64> = ps.iter().map(|(x, _)| x[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
        assert_eq!(symmetrize(&rule(5, &[2, 3]), false).len(), 20);
    }

    /// Brute-force sym_u over every n and u with a sorted-key count.
    fn brute_force_symmetrized(r: &LatticeRule) -> Vec<(Vec<u64>, u64)> {
        let n = r.modulus();
        let s = r.dim();
        let mut all: Vec<Vec<u64>> = Vec::new();
        for k in 0..n {
            for u in 0..(1u64 << s) {
                all.push(
                    (0..s)
                        .map(|j| {
                            let c = (k * r.generator()[j]) % n;
                            if u >> j & 1 == 1 { n - c } else { c }
                        })
                        .collect(),
                );
            }
        }
        all.sort();
        let mut out: Vec<(Vec<u64>, u64)> = Vec::new();
        for v in all {
            match out.last_mut() {
                Some((last, c)) if *last == v => *c += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    #[test]
    fn dedupe_matches_brute_force_including_non_units() {
        for (n, g) in [(5, vec![1]), (6, vec![2, 3]), (8, vec![4, 2, 1]), (7, vec![1, 3, 5]), (4, vec![2])] {
            let r = rule(n, &g);
            let oracle = brute_force_symmetrized(&r);
            let ps = symmetrize(&r, true);
            assert_eq!(ps.len(), oracle.len(), "N={n} g={g:?}");
            let total = (1u64 << r.dim()) as f64 * n as f64;
            for (x, w) in ps.iter() {
                let key: Vec<u64> = x.iter().map(|v| (v * n as f64).round() as u64).collect();
                let (_, m) = oracle.iter().find(|(k, _)| *k == key).expect("node in oracle");
                assert_eq!(w, *m as f64 / total);
            }
        }
    }

    #[test]
    fn node_count_small_range() {
        for n in 2..=32u64 {
            for s in 1..=4usize {
                let g: Vec<u64> = (0..s as u64).map(|j| [1, n - 1, 1, n - 1][j as usize]).collect();
                let r = rule(n, &g);
                assert_eq!(symmetrize(&r, true).len() as u64, symmetrized_node_count(n, s));
            }
        }
    }

    #[test]
    fn dual_lattice_spot_values() {
        assert_eq!(dual_lattice(&rule(4, &[1]), 5, 1000).unwrap(), vec![vec![-4], vec![4]]);
        let mut d = dual_lattice(&rule(2, &[1, 1]), 1, 1000).unwrap();
        d.sort();
        assert_eq!(d, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
        let mut d = dual_lattice(&rule(3, &[1, 2]), 1, 1000).unwrap();
        d.sort();
        assert_eq!(d, vec![vec![-1, -1], vec![1, 1]]);
    }

    #[test]
    fn dual_lattice_budget() {
        let err = dual_lattice(&rule(7, &[1, 2, 3]), 100, 1000).unwrap_err();
        assert!(matches!(err, Error::EnumerationBudget { .. }));
        assert!(dual_lattice(&rule(7, &[1]), 0, 1000).is_err());
    }

    #[test]
    fn vector_file_round_trip_and_rejects() {
        let r = rule(1021, &[1, 306, 388]);
        let text = r.to_vector_file();
        assert_eq!(text, "1021 3\n1 306 388\n");
        assert_eq!(text.parse::<LatticeRule>().unwrap(), r);
        assert!("4 2\n1\n".parse::<LatticeRule>().is_err());
        assert!("4 1\n4\n".parse::<LatticeRule>().is_err());
        assert!("4\n1\n".parse::<LatticeRule>().is_err());
        assert!("4 1\n1\n1\n".parse::<LatticeRule>().is_err());
        assert!("".parse::<LatticeRule>().is_err());
        assert!("x 1\n1\n".parse::<LatticeRule>().is_err());
    }

    #[test]
    fn points_file_parsing() {
        let ps = WeightedPointSet::from_points_file("0 0.5\n0.5 1\n", 2).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.weight(1), 0.5);
        let ps = WeightedPointSet::from_points_file("0.1 0.25\n0.9 0.75\n", 1).unwrap();
        assert_eq!(ps.weights(), &[0.25, 0.75]);
        assert!(WeightedPointSet::from_points_file("0.1 0.25\n0.9\n", 1).is_err());
        assert!(WeightedPointSet::from_points_file("0.1 0.2 0.3 0.4\n", 1).is_err());
        assert!(WeightedPointSet::from_points_file("1.5\n", 1).is_err());
        assert!(WeightedPointSet::from_points_file("0.5 0.3\n", 1).is_err());
        assert!(WeightedPointSet::from_points_file("\n", 1).is_err());
    }

    proptest! {
        #[test]
        fn coordinates_are_exact_rationals(n in 2u64..500, g in proptest::collection::vec(1u64..10_000, 1..5)) {
            let g: Vec<u64> = g.into_iter().map(|v| 1 + v % (n - 1)).collect();
            let r = LatticeRule::new(n, g).unwrap();
            let ps = lattice_points(&r);
            for (k, (x, _)) in ps.iter().enumerate() {
                for (j, &v) in x.iter().enumerate() {
                    let num = (v * n as f64).round() as u64;
                    prop_assert_eq!(num, r.numerator(k as u64, j));
                    prop_assert_eq!(num as f64 / n as f64, v);
                }
            }
        }

        #[test]
        fn symmetrized_weights_conserved(n in 2u64..40, g in proptest::collection::vec(1u64..1000, 1..4)) {
            let g: Vec<u64> = g.into_iter().map(|v| 1 + v % (n - 1)).collect();
            let r = LatticeRule::new(n, g).unwrap();
            let full = symmetrize(&r, false);
            let dedup = symmetrize(&r, true);
            let f = |x: &[f64]| x.iter().enumerate().map(|(j, v)| (3.0 * v + j as f64).sin()).product::<f64>() + x[0] * x[0];
            prop_assert!((full.weights().iter().sum::<f64>() - 1.0).abs() < 1e-13);
            prop_assert!((dedup.weights().iter().sum::<f64>() - 1.0).abs() < 1e-13);
            prop_assert!((full.apply(f) - dedup.apply(f)).abs() < 1e-13);
        }

        #[test]
        fn dual_lattice_membership(n in 2u64..=8, g in proptest::collection::vec(1u64..8, 1..=3), bound in 1u64..=3) {
            let g: Vec<u64> = g.into_iter().map(|v| 1 + v % (n - 1)).collect();
            let r = LatticeRule::new(n, g.clone()).unwrap();
            let found = dual_lattice(&r, bound, 1_000_000).unwrap();
            // Independent oracle: nested loops over the box via base-(2H+1) digits.
            let side = 2 * bound as i64 + 1;
            let mut expect = Vec::new();
            for code in 0..side.pow(g.len() as u32) {
                let mut c = code;
                let h: Vec<i64> = (0..g.len()).map(|_| { let d = c % side - bound as i64; c /= side; d }).rev().collect();
                let dot: i64 = h.iter().zip(&g).map(|(a, b)| a * *b as i64).sum();
                if h.iter().any(|&v| v != 0) && dot.rem_euclid(n as i64) == 0 {
                    expect.push(h);
                }
            }
            expect.sort();
            let mut found_sorted = found.clone();
            found_sorted.sort();
            prop_assert_eq!(found_sorted, expect);
        }
    }
}
