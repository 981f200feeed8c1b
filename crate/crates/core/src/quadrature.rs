//! Nested Clenshaw-Curtis rules and isotropic Smolyak sparse grids on
//! `[-1, 1]^n`, with weights normalized against the uniform probability
//! density (they sum to one).
//!
//! Level `l` of the 1D rule has `m(0) = 1` and `m(l) = 2^l + 1` nodes at
//! `cos(j pi / (m - 1))`. Every node is identified by its angle as a reduced
//! dyadic fraction of `pi`, which is the same at every level the node
//! appears in. Node coordinates are computed from that angle only, so a node
//! has bit-identical coordinates in every grid and deduplication is exact.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

/// Angle `num / 2^exp` (in units of pi), reduced so `num` is odd unless the
/// angle is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicAngle {
    pub num: u32,
    pub exp: u8,
}

impl DyadicAngle {
    pub fn new(mut num: u32, mut exp: u8) -> Self {
        if num == 0 {
            return DyadicAngle { num: 0, exp: 0 };
        }
        while exp > 0 && num.is_multiple_of(2) {
            num /= 2;
            exp -= 1;
        }
        DyadicAngle { num, exp }
    }

    /// `cos(pi * angle)` for angles in `[0, 1]`, exactly 1, 0 and -1 at the
    /// ends and the middle, and exactly antisymmetric about `pi / 2`.
    pub fn cos(self) -> f64 {
        let den = 1u64 << self.exp;
        let num = self.num as u64;
        if num == 0 {
            1.0
        } else if num == den {
            -1.0
        } else if 2 * num == den {
            0.0
        } else if 2 * num > den {
            -((PI * (den - num) as f64) / den as f64).cos()
        } else {
            ((PI * num as f64) / den as f64).cos()
        }
    }

    fn pack(self) -> u64 {
        ((self.exp as u64) << 32) | self.num as u64
    }
}

/// Canonical identity of a sparse-grid node, shared across levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeKey(pub Vec<u64>);

pub fn rule_size(level: u32) -> usize {
    if level == 0 {
        1
    } else {
        (1usize << level) + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    pub level: u32,
    /// Ascending.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub angles: Vec<DyadicAngle>,
}

impl QuadratureRule1D {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Clenshaw-Curtis rule of the given level, normalized to integrate the
/// uniform density on `[-1, 1]`.
pub fn clenshaw_curtis(level: u32) -> QuadratureRule1D {
    assert!(level < 31, "level {level} is beyond the supported range");
    if level == 0 {
        return QuadratureRule1D {
            level,
            nodes: vec![0.0],
            weights: vec![1.0],
            angles: vec![DyadicAngle::new(1, 1)],
        };
    }
    let n = 1u32 << level; // intervals
                           // classical weights, j = 0..=n, node j at angle j/n
    let half = n / 2;
    let mut w = vec![0.0; n as usize + 1];
    for j in 0..=half {
        let mut s = 0.0;
        for k in 1..=half {
            let b = if k == half { 1.0 } else { 2.0 };
            // cos(2 pi k j / n) as a dyadic angle folded into [0, 1]
            let a = (2 * k as u64 * j as u64) % (2 * n as u64);
            let a = if a > n as u64 { 2 * n as u64 - a } else { a };
            let c = DyadicAngle::new(a as u32, level as u8).cos();
            s += b * c / (4.0 * (k as f64) * (k as f64) - 1.0);
        }
        let c = if j == 0 || j == n { 1.0 } else { 2.0 };
        let wj = c / n as f64 * (1.0 - s);
        w[j as usize] = wj;
        w[(n - j) as usize] = wj;
    }
    // ascending nodes run over decreasing angle
    let angles: Vec<DyadicAngle> =
        (0..=n).rev().map(|j| DyadicAngle::new(j, level as u8)).collect();
    let nodes = angles.iter().map(|a| a.cos()).collect();
    let weights = (0..=n).rev().map(|j| 0.5 * w[j as usize]).collect();
    QuadratureRule1D { level, nodes, weights, angles }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseGrid {
    pub dim: usize,
    pub level: u32,
    /// Sorted lexicographically by coordinates.
    pub nodes: Vec<Vec<f64>>,
    pub keys: Vec<NodeKey>,
    /// Combination weights; may be negative, sum to one.
    pub weights: Vec<f64>,
}

impl SparseGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest total degree integrated exactly.
    pub fn exactness_degree(&self) -> u32 {
        2 * self.level + 1
    }

    /// CSV with columns `xi1..xin,weight`.
    pub fn to_csv(&self) -> String {
        let mut out: String =
            (1..=self.dim).map(|i| format!("xi{i},")).collect::<String>() + "weight\n";
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            for v in x {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{w}\n"));
        }
        out
    }
}

/// Number of distinct nodes of the level-`level` grid in `dim` dimensions,
/// counted as the sum over `|l| <= level` of the new nodes each rule adds.
pub fn smolyak_node_count(dim: usize, level: u32) -> u128 {
    let new_nodes = |l: u32| -> u128 {
        match l {
            0 => 1,
            1 => 2,
            _ => 1u128 << (l - 1),
        }
    };
    // ways[s] = sum over multi-indices with |l| = s of the product of new nodes
    let lv = level as usize;
    let mut ways = vec![0u128; lv + 1];
    ways[0] = 1;
    for _ in 0..dim {
        let mut next = vec![0u128; lv + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for l in 0..=(lv - s) {
                next[s + l] = next[s + l].saturating_add(w.saturating_mul(new_nodes(l as u32)));
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

pub fn smolyak_grid(dim: usize, level: u32) -> Result<SparseGrid> {
    smolyak_grid_capped(dim, level, DEFAULT_NODE_CAP)
}

pub fn smolyak_grid_capped(dim: usize, level: u32, cap: usize) -> Result<SparseGrid> {
    if dim == 0 {
        return Err(Error::Validation("sparse grid dimension must be at least 1".into()));
    }
    let count = smolyak_node_count(dim, level);
    if count > cap as u128 {
        return Err(Error::Resource(format!(
            "sparse grid with dim {dim}, level {level} has {count} nodes (cap {cap})"
        )));
    }
    let rules: Vec<QuadratureRule1D> = (0..=level).map(clenshaw_curtis).collect();
    let lo = (level as i64 - dim as i64 + 1).max(0) as u32;
    let mut acc: HashMap<NodeKey, (Vec<f64>, f64)> = HashMap::with_capacity(count as usize);
    let mut index = vec![0u32; dim];
    for_each_multi_index(dim, level, &mut index, 0, 0, &mut |ell: &[u32], total: u32| {
        if total < lo {
            return;
        }
        let gap = level - total;
        let coeff =
            if gap.is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(dim as u64 - 1, gap as u64);
        tensor_accumulate(&rules, ell, coeff, &mut acc);
    });
    let mut entries: Vec<(NodeKey, Vec<f64>, f64)> =
        acc.into_iter().map(|(k, (x, w))| (k, x, w)).collect();
    entries.sort_by(|a, b| {
        a.1.iter()
            .zip(&b.1)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut grid = SparseGrid { dim, level, nodes: vec![], keys: vec![], weights: vec![] };
    for (k, x, w) in entries {
        grid.keys.push(k);
        grid.nodes.push(x);
        grid.weights.push(w);
    }
    Ok(grid)
}

fn for_each_multi_index(
    dim: usize,
    budget: u32,
    index: &mut Vec<u32>,
    d: usize,
    used: u32,
    f: &mut impl FnMut(&[u32], u32),
) {
    if d == dim {
        f(index, used);
        return;
    }
    for l in 0..=(budget - used) {
        index[d] = l;
        for_each_multi_index(dim, budget, index, d + 1, used + l, f);
    }
    index[d] = 0;
}

fn tensor_accumulate(
    rules: &[QuadratureRule1D],
    ell: &[u32],
    coeff: f64,
    acc: &mut HashMap<NodeKey, (Vec<f64>, f64)>,
) {
    let dim = ell.len();
    let sizes: Vec<usize> = ell.iter().map(|&l| rules[l as usize].nodes.len()).collect();
    let mut pos = vec![0usize; dim];
    loop {
        let mut w = coeff;
        let mut key = Vec::with_capacity(dim);
        for d in 0..dim {
            let r = &rules[ell[d] as usize];
            w *= r.weights[pos[d]];
            key.push(r.angles[pos[d]].pack());
        }
        let entry = acc.entry(NodeKey(key)).or_insert_with(|| {
            let x = (0..dim).map(|d| rules[ell[d] as usize].nodes[pos[d]]).collect();
            (x, 0.0)
        });
        entry.1 += w;
        // odometer
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            pos[d] += 1;
            if pos[d] < sizes[d] {
                break;
            }
            pos[d] = 0;
            d += 1;
        }
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `sum_i w_i f(x_i)` in node order; a failure is reported with its node.
pub fn integrate<F>(grid: &SparseGrid, mut f: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut sum = 0.0;
    for (i, (x, w)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
        let v =
            f(x).map_err(|e| Error::AtNode { index: i, point: x.clone(), source: Box::new(e) })?;
        sum += w * v;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_midpoint() {
        let r = clenshaw_curtis(0);
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn level_one_simpson() {
        let r = clenshaw_curtis(1);
        assert_eq!(r.nodes, vec![-1.0, 0.0, 1.0]);
        for (w, e) in r.weights.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((w - e).abs() < 1e-15);
        }
        assert!((r.integrate(|x| x * x) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rules_are_nested_and_normalized() {
        for l in 0..10 {
            let r = clenshaw_curtis(l);
            assert_eq!(r.nodes.len(), rule_size(l));
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            let finer = clenshaw_curtis(l + 1);
            for x in &r.nodes {
                assert!(finer.nodes.contains(x), "level {l} node {x} missing at level {}", l + 1);
            }
            // exact up to degree m - 1 against the uniform density
            let m = rule_size(l);
            for deg in 0..m {
                let exact = if deg % 2 == 1 { 0.0 } else { 1.0 / (deg as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "level {l} degree {deg}: {got}");
            }
        }
    }

    #[test]
    fn one_dimensional_grid_is_the_rule() {
        let g = smolyak_grid(1, 1).unwrap();
        assert_eq!(g.nodes, vec![vec![-1.0], vec![0.0], vec![1.0]]);
        for (w, e) in g.weights.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((w - e).abs() < 1e-15);
        }
    }

    #[test]
    fn integrate_cases() {
        let g = smolyak_grid(3, 2).unwrap();
        assert!((integrate(&g, |_| Ok(1.0)).unwrap() - 1.0).abs() < 1e-12);
        let g = smolyak_grid(2, 2).unwrap();
        assert!(integrate(&g, |x| Ok(x[0])).unwrap().abs() < 1e-15);
        let g = smolyak_grid(2, 3).unwrap();
        let v = integrate(&g, |x| Ok(x[0] * x[0] * x[1] * x[1])).unwrap();
        assert!((v - 1.0 / 9.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn integrate_reports_node() {
        let g = smolyak_grid(2, 1).unwrap();
        let err =
            integrate(&g, |x| if x[0] > 0.5 { Err(Error::Solver("boom".into())) } else { Ok(0.0) })
                .unwrap_err();
        assert!(matches!(err, Error::AtNode { .. }));
    }

    #[test]
    fn node_cap() {
        assert!(matches!(smolyak_grid_capped(6, 5, 1000), Err(Error::Resource(_))));
        assert!(matches!(smolyak_grid(40, 8), Err(Error::Resource(_))));
    }

    #[test]
    fn dyadic_cos_symmetry() {
        for exp in 1..8u8 {
            let den = 1u32 << exp;
            for num in 0..=den {
                let a = DyadicAngle::new(num, exp).cos();
                let b = DyadicAngle::new(den - num, exp).cos();
                assert_eq!(a, -b);
            }
        }
    }
}
