//! Independent reference implementations shared by the integration tests.
//! None of these call into the algorithms they check.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashSet;

use edchaos::case::evaluate_cost;
use edchaos::{CaseDefinition, GeneratorUnit, LoadBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Sparse-grid node counts

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// 1D Clenshaw-Curtis nodes of a level as reduced angle fractions of pi.
fn cc_angles(level: u32) -> Vec<(u64, u64)> {
    if level == 0 {
        return vec![(1, 2)];
    }
    let den = 1u64 << level;
    (0..=den)
        .map(|j| {
            let g = gcd(j, den).max(1);
            if j == 0 {
                (0, 1)
            } else {
                (j / g, den / g)
            }
        })
        .collect()
}

/// Size of the union of all tensor grids in the Smolyak combination.
pub fn union_node_count(dim: usize, level: u32) -> usize {
    let lo = (level as i64 - dim as i64 + 1).max(0) as u32;
    let mut set: HashSet<Vec<(u64, u64)>> = HashSet::new();
    let mut ell = vec![0u32; dim];
    loop {
        let s: u32 = ell.iter().sum();
        if s >= lo && s <= level {
            let axes: Vec<Vec<(u64, u64)>> = ell.iter().map(|&l| cc_angles(l)).collect();
            let mut pos = vec![0usize; dim];
            'tensor: loop {
                set.insert((0..dim).map(|d| axes[d][pos[d]]).collect());
                let mut d = 0;
                loop {
                    if d == dim {
                        break 'tensor;
                    }
                    pos[d] += 1;
                    if pos[d] < axes[d].len() {
                        break;
                    }
                    pos[d] = 0;
                    d += 1;
                }
            }
        }
        // next multi-index with sum <= level
        let mut d = 0;
        loop {
            if d == dim {
                return set.len();
            }
            ell[d] += 1;
            if ell.iter().sum::<u32>() <= level {
                break;
            }
            ell[d] = 0;
            d += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomial stubs

/// `sum_i coef_i * prod_d xi_d^exps_i[d]`.
#[derive(Debug, Clone)]
pub struct Poly {
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Poly {
    pub fn random(r: &mut impl Rng, dim: usize, degree: u32) -> Poly {
        let mut terms = vec![];
        let mut e = vec![0u32; dim];
        all_exponents(&mut e, 0, degree, &mut |exps| {
            if r.random_bool(0.7) {
                terms.push((r.random_range(-2.0..2.0), exps.to_vec()));
            }
        });
        // guarantee the top degree appears
        let mut top = vec![0u32; dim];
        top[r.random_range(0..dim)] = degree;
        terms.push((1.0, top));
        Poly { terms }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(xi).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).sum()
    }
}

fn all_exponents(e: &mut Vec<u32>, d: usize, budget: u32, f: &mut impl FnMut(&[u32])) {
    if d == e.len() {
        f(e);
        return;
    }
    for k in 0..=budget {
        e[d] = k;
        all_exponents(e, d + 1, budget - k, f);
    }
    e[d] = 0;
}

/// `E[xi^alpha]` for iid U(-1, 1) coordinates.
pub fn uniform_moment(alpha: &[u32]) -> f64 {
    alpha.iter().map(|&k| if k % 2 == 1 { 0.0 } else { 1.0 / (k as f64 + 1.0) }).product()
}

pub fn exponents_up_to(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![];
    let mut e = vec![0u32; dim];
    all_exponents(&mut e, 0, degree, &mut |x| out.push(x.to_vec()));
    out
}

// ---------------------------------------------------------------------------
// Two-generator, two-period dispatch by exhaustive search

pub const TICK: f64 = 0.01;

fn ticks(v: f64) -> i64 {
    (v / TICK).round() as i64
}

/// A random all-on instance whose data lie on the 0.01 MW grid.
pub fn random_small_case(r: &mut impl Rng) -> (CaseDefinition, [f64; 2]) {
    let gens: Vec<GeneratorUnit> = (0..2)
        .map(|i| {
            let p_min = r.random_range(0..=200) as f64 * TICK;
            let span = r.random_range(50..=100) as f64 * 4.0 * TICK;
            let p_max = p_min + span;
            let initial = p_min + r.random_range(0..=ticks(span)) as f64 * TICK;
            let ramp = |r: &mut dyn rand::RngCore| r.random_range(20..=300) as f64 * TICK;
            GeneratorUnit {
                id: format!("g{i}"),
                p_min,
                p_max,
                ramp_up: ramp(r),
                ramp_down: ramp(r),
                startup_ramp: p_max,
                shutdown_ramp: p_max,
                cost_a: r.random_range(0.0..5.0),
                cost_b: r.random_range(1.0..20.0),
                cost_c: r.random_range(0.0..2.0),
                startup_cost: 0.0,
                shutdown_cost: 0.0,
                min_up: 1,
                min_down: 1,
                initial_on: true,
                initial_power: initial,
                initial_state_duration: None,
            }
        })
        .collect();
    let demand = [r.random_range(0..=1000) as f64 * TICK, r.random_range(0..=1000) as f64 * TICK];
    let nominal = demand.to_vec();
    let loads = LoadBox::new(nominal, vec![0.0; 2], vec![10.0; 2]).unwrap();
    (CaseDefinition::new(gens, loads, 1e4, 4).unwrap(), demand)
}

/// Minimum all-on dispatch cost over output grids of 0.01 MW. Period-1
/// outputs of both units and the period-2 output of the first unit are
/// enumerated; the second unit then takes the residual clamped to its
/// feasible window, which is optimal because the penalty exceeds every
/// marginal cost. `None` when no grid point meets the ramp limits.
pub fn grid_search_ed(case: &CaseDefinition, demand: [f64; 2]) -> Option<f64> {
    let plc = case.linearized_costs();
    let m = case.shed_penalty;
    let g = &case.generators;
    let lo: Vec<i64> = g.iter().map(|u| ticks(u.p_min)).collect();
    let hi: Vec<i64> = g.iter().map(|u| ticks(u.p_max)).collect();
    let table: Vec<Vec<f64>> = (0..2)
        .map(|i| {
            (lo[i]..=hi[i])
                .map(|k| {
                    evaluate_cost(&plc[i], (k as f64 * TICK).clamp(g[i].p_min, g[i].p_max), true)
                        .unwrap()
                })
                .collect()
        })
        .collect();
    let cost = |i: usize, k: i64| table[i][(k - lo[i]) as usize];
    let window = |i: usize, prev: i64| {
        let up = ticks(g[i].ramp_up);
        let down = ticks(g[i].ramp_down);
        ((prev - down).max(lo[i]), (prev + up).min(hi[i]))
    };
    let d1 = ticks(demand[0]);
    let d2 = ticks(demand[1]);
    let mismatch = |d: i64, a: i64, b: i64| m * ((d - a - b).abs() as f64 * TICK);
    let p0: Vec<i64> = g.iter().map(|u| ticks(u.initial_power)).collect();
    let (w0a, w0b) = (window(0, p0[0]), window(1, p0[1]));
    let mut best: Option<f64> = None;
    for a in w0a.0..=w0a.1 {
        let wa = window(0, a);
        for b in w0b.0..=w0b.1 {
            let first = cost(0, a) + cost(1, b) + mismatch(d1, a, b);
            let wb = window(1, b);
            if wa.0 > wa.1 || wb.0 > wb.1 {
                continue;
            }
            for a2 in wa.0..=wa.1 {
                let b2 = (d2 - a2).clamp(wb.0, wb.1);
                let total = first + cost(0, a2) + cost(1, b2) + mismatch(d2, a2, b2);
                if best.is_none_or(|v| total < v) {
                    best = Some(total);
                }
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Commitment enumeration

/// Minimum up/down check written directly from the run-length definition.
pub fn min_times_ok(min_up: usize, min_down: usize, initial_on: bool, row: &[u8]) -> bool {
    let mut runs: Vec<(bool, usize, bool)> = vec![]; // (state, length, closed)
    for &v in row {
        let on = v == 1;
        match runs.last_mut() {
            Some(r) if r.0 == on => r.1 += 1,
            _ => runs.push((on, 1, false)),
        }
    }
    let n = runs.len();
    for (i, r) in runs.iter_mut().enumerate() {
        r.2 = i + 1 < n;
    }
    runs.iter().enumerate().all(|(i, &(on, len, closed))| {
        // the first run may continue a state held before the horizon
        let credited = i == 0 && on == initial_on;
        if !closed || credited {
            return true;
        }
        len >= if on { min_up } else { min_down }
    })
}

// ---------------------------------------------------------------------------
// LP by vertex enumeration

/// Dense `min c·x` over `lo <= x <= hi` (finite) and rows `a·x (rel) b`
/// where `rel` is -1 for <=, 0 for =, +1 for >=.
#[derive(Debug, Clone)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub rows: Vec<(Vec<f64>, i8, f64)>,
}

impl DenseLp {
    pub fn feasible(&self, x: &[f64], tol: f64) -> bool {
        let n = self.c.len();
        (0..n).all(|j| x[j] >= self.lo[j] - tol && x[j] <= self.hi[j] + tol)
            && self.rows.iter().all(|(a, rel, b)| {
                let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                let t = tol * (1.0 + b.abs());
                match rel {
                    -1 => lhs <= b + t,
                    1 => lhs >= b - t,
                    _ => (lhs - b).abs() <= t,
                }
            })
    }
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Optimal objective, or `None` when infeasible. Every basic solution is
/// formed from `n` of the row and bound hyperplanes.
pub fn vertex_enumeration(lp: &DenseLp) -> Option<f64> {
    let n = lp.c.len();
    let mut planes: Vec<(Vec<f64>, f64)> =
        lp.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lp.lo[j]));
        planes.push((e, lp.hi[j]));
    }
    let mut best: Option<f64> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a = pick.iter().map(|&i| planes[i].0.clone()).collect();
        let b = pick.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.feasible(&x, 1e-9) {
                let v: f64 = lp.c.iter().zip(&x).map(|(p, q)| p * q).sum();
                if best.is_none_or(|b| v < b) {
                    best = Some(v);
                }
            }
        }
        // next n-combination of planes
        let m = planes.len();
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < m - n + i {
                pick[i] += 1;
                for k in i + 1..n {
                    pick[k] = pick[k - 1] + 1;
                }
                break;
            }
        }
    }
}
