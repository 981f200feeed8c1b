//! Bounded-variable revised simplex.
//!
//! Every row `a·x (<=|=|>=) b` is scaled by its largest coefficient and given
//! a slack column `e_i`, so it reads `a·x + s = b` with `s` in `[0, inf)`,
//! `(-inf, 0]` or `[0, 0]`. Structural variables keep their own bounds and a
//! nonbasic variable always sits at one of them. The basis inverse is dense
//! and updated with eta pivots, with periodic refactorization.
//!
//! Rows that cannot be satisfied by their slack at the starting point are
//! first given a singleton column from the model if one fits ("crash"), and
//! otherwise an artificial variable that phase 1 drives to zero.

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-11;
pub const FEAS_TOL: f64 = 1e-7;
pub const OPT_TOL: f64 = 1e-9;

const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse coefficients `(variable, value)`; variables not listed are zero.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min c·x + offset` subject to bounds and linear rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    /// Constant added to the reported objective value.
    pub objective_offset: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Adds a constraint given as a dense row of exactly `n_vars` entries.
    pub fn add_dense_constraint(
        &mut self,
        row: &[f64],
        relation: Relation,
        rhs: f64,
    ) -> Result<()> {
        if row.len() != self.n_vars() {
            return Err(Error::Dimension(format!(
                "constraint row has {} coefficients, program has {} variables",
                row.len(),
                self.n_vars()
            )));
        }
        let coeffs =
            row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect();
        self.add_constraint(coeffs, relation, rhs);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension("bound vectors must match the objective length".into()));
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if !lo.is_finite() || hi.is_nan() || hi == f64::NEG_INFINITY || lo > hi {
                return Err(Error::Validation(format!(
                    "variable {j}: bounds [{lo}, {hi}] must have finite lower <= upper"
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::Validation(format!("variable {j}: non-finite cost")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::Validation(format!("constraint {i}: non-finite rhs")));
            }
            for &(j, v) in &c.coeffs {
                if j >= n {
                    return Err(Error::Dimension(format!(
                        "constraint {i} references variable {j} of {n}"
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::Validation(format!(
                        "constraint {i}: non-finite coefficient"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest bound or row violation of `x`, rows measured after scaling by
    /// their largest coefficient.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.n_vars() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for c in &self.constraints {
            let scale = c.coeffs.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            let scale = if scale > 0.0 { scale } else { 1.0 };
            let lhs: f64 = c.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
            let r = (lhs - c.rhs) / scale;
            worst = worst.max(match c.relation {
                Relation::Le => r,
                Relation::Ge => -r,
                Relation::Eq => r.abs(),
            });
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// `+inf` when infeasible, `-inf` when unbounded.
    pub objective_value: f64,
    pub iterations: usize,
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let mut s = Simplex::new(lp);
    s.run(lp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Structural,
    Slack,
    Artificial { sign: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pricing {
    Dantzig,
    Bland,
}

struct Simplex {
    m: usize,
    n: usize,
    /// Structural columns, scaled: `(row, value)`.
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    kind: Vec<Kind>,
    /// Row owning a slack or artificial column.
    row_of: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    /// `basis[k]` is the variable basic in position k; `pos[j]` the inverse.
    basis: Vec<usize>,
    pos: Vec<Option<usize>>,
    binv: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Simplex {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.n_vars();
        let m = lp.n_constraints();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut rhs = Vec::with_capacity(m);
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        let mut kind = vec![Kind::Structural; n];
        let mut row_of = vec![usize::MAX; n];
        for (i, c) in lp.constraints.iter().enumerate() {
            let scale = c.coeffs.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            let scale = if scale > 0.0 { scale } else { 1.0 };
            for &(j, v) in &c.coeffs {
                if v != 0.0 {
                    cols[j].push((i, v / scale));
                }
            }
            rhs.push(c.rhs / scale);
            let (lo, hi) = match c.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
            kind.push(Kind::Slack);
            row_of.push(i);
        }
        // merge duplicate entries of a column within one row
        for col in &mut cols {
            col.sort_by_key(|e| e.0);
            col.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            col.retain(|e| e.1 != 0.0);
        }
        let total = n + m;
        Simplex {
            m,
            n,
            cols,
            rhs,
            kind,
            row_of,
            lower,
            upper,
            cost: vec![0.0; total],
            x: vec![0.0; total],
            basis: Vec::with_capacity(m),
            pos: vec![None; total],
            binv: Vec::new(),
            since_refactor: 0,
            iterations: 0,
        }
    }

    fn n_total(&self) -> usize {
        self.kind.len()
    }

    fn column(&self, j: usize) -> ColumnRef<'_> {
        match self.kind[j] {
            Kind::Structural => ColumnRef::Sparse(&self.cols[j]),
            Kind::Slack => ColumnRef::Unit(self.row_of[j], 1.0),
            Kind::Artificial { sign } => ColumnRef::Unit(self.row_of[j], sign),
        }
    }

    fn run(&mut self, lp: &LinearProgram) -> Result<LpSolution> {
        self.initial_basis();
        let artificials: Vec<usize> = (self.n + self.m..self.n_total()).collect();
        if !artificials.is_empty() {
            self.cost.iter_mut().for_each(|c| *c = 0.0);
            for &a in &artificials {
                self.cost[a] = 1.0;
            }
            if let Step::Unbounded = self.optimize()? {
                return Err(Error::Numerical("phase 1 reported an unbounded ray".into()));
            }
            let infeas: f64 = artificials.iter().map(|&a| self.x[a]).sum();
            if infeas > FEAS_TOL {
                return Ok(self.finish(lp, LpStatus::Infeasible));
            }
            for &a in &artificials {
                self.lower[a] = 0.0;
                self.upper[a] = 0.0;
                if self.pos[a].is_none() {
                    self.x[a] = 0.0;
                }
            }
        }
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        self.cost[..self.n].copy_from_slice(&lp.objective);
        let status = match self.optimize()? {
            Step::Unbounded => LpStatus::Unbounded,
            _ => LpStatus::Optimal,
        };
        self.refactor()?;
        if status == LpStatus::Optimal {
            let viol = self.basic_violation();
            if viol > FEAS_TOL {
                return Err(Error::Numerical(format!("final basis violates bounds by {viol:e}")));
            }
        }
        Ok(self.finish(lp, status))
    }

    fn finish(&self, lp: &LinearProgram, status: LpStatus) -> LpSolution {
        let x: Vec<f64> = (0..self.n)
            .map(|j| {
                let v = self.x[j];
                if self.pos[j].is_some() {
                    v.clamp(self.lower[j], self.upper[j])
                } else {
                    v
                }
            })
            .collect();
        let objective_value = match status {
            LpStatus::Optimal => {
                lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>() + lp.objective_offset
            }
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
        };
        LpSolution { status, x, objective_value, iterations: self.iterations }
    }

    fn basic_violation(&self) -> f64 {
        self.basis
            .iter()
            .fold(0.0f64, |w, &j| w.max(self.lower[j] - self.x[j]).max(self.x[j] - self.upper[j]))
    }

    /// Nonbasic structurals at their lower bound, slacks basic where feasible,
    /// singleton crash, then artificials for whatever rows remain.
    fn initial_basis(&mut self) {
        let (n, m) = (self.n, self.m);
        for j in 0..n {
            self.x[j] = self.lower[j];
        }
        let mut resid = self.rhs.clone();
        for j in 0..n {
            let v = self.x[j];
            if v != 0.0 {
                for &(i, a) in &self.cols[j] {
                    resid[i] -= a * v;
                }
            }
        }
        let mut row_basic: Vec<Option<usize>> = vec![None; m];
        let mut needs_help = Vec::new();
        for i in 0..m {
            let s = n + i;
            if self.lower[s] <= resid[i] && resid[i] <= self.upper[s] {
                self.x[s] = resid[i];
                row_basic[i] = Some(s);
            } else {
                self.x[s] = resid[i].clamp(self.lower[s], self.upper[s]);
                needs_help.push(i);
            }
        }
        if !needs_help.is_empty() {
            let mut singletons: Vec<Vec<usize>> = vec![Vec::new(); m];
            for j in 0..n {
                if self.cols[j].len() == 1 && self.lower[j] < self.upper[j] {
                    singletons[self.cols[j][0].0].push(j);
                }
            }
            for &i in &needs_help {
                let excess = resid[i] - self.x[n + i];
                for &j in &singletons[i] {
                    let a = self.cols[j][0].1;
                    let v = self.x[j] + excess / a;
                    if a.abs() > PIVOT_TOL && self.lower[j] <= v && v <= self.upper[j] {
                        self.x[j] = v;
                        row_basic[i] = Some(j);
                        break;
                    }
                }
            }
        }
        for i in 0..m {
            if row_basic[i].is_none() {
                let excess = resid[i] - self.x[n + i];
                let sign = if excess >= 0.0 { 1.0 } else { -1.0 };
                let a = self.kind.len();
                self.kind.push(Kind::Artificial { sign });
                self.row_of.push(i);
                self.lower.push(0.0);
                self.upper.push(f64::INFINITY);
                self.cost.push(0.0);
                self.x.push(excess.abs());
                self.pos.push(None);
                row_basic[i] = Some(a);
            }
        }
        self.basis = row_basic.into_iter().map(|b| b.expect("every row covered")).collect();
        for (k, &j) in self.basis.iter().enumerate() {
            self.pos[j] = Some(k);
        }
        // the starting basis is diagonal
        self.binv = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            let d = match self.column(j) {
                ColumnRef::Unit(_, s) => s,
                ColumnRef::Sparse(c) => c[0].1,
            };
            self.binv[k * m + k] = 1.0 / d;
        }
    }

    fn optimize(&mut self) -> Result<Step> {
        let m = self.m;
        let total = self.n_total();
        let stall_limit = 2 * (m + total);
        let max_iter = 50 * (m + total) + 1000;
        let mut stall = 0usize;
        let mut pricing = Pricing::Dantzig;
        let mut y = vec![0.0; m];
        let mut d = vec![0.0; total];
        let mut alpha = vec![0.0; m];
        let mut dual_stale = true;
        let mut local_iter = 0usize;
        loop {
            if dual_stale {
                self.compute_duals(&mut y);
                for j in 0..total {
                    d[j] = if self.pos[j].is_some() {
                        0.0
                    } else {
                        self.cost[j] - self.column(j).dot(&y)
                    };
                }
                dual_stale = false;
            }
            let Some((q, dir)) = self.price(&d, pricing) else {
                return Ok(Step::Optimal);
            };
            local_iter += 1;
            self.iterations += 1;
            if local_iter > max_iter {
                return Err(Error::Numerical(format!("iteration limit {max_iter} reached")));
            }
            self.ftran(q, &mut alpha);
            let (theta, leave) = self.ratio_test(q, dir, &alpha, pricing);
            if theta.is_infinite() {
                return Ok(Step::Unbounded);
            }
            if theta == 0.0 {
                stall += 1;
                if stall > stall_limit {
                    pricing = Pricing::Bland;
                }
            } else {
                stall = 0;
                pricing = Pricing::Dantzig;
            }
            // move along the edge
            if theta > 0.0 {
                self.x[q] += dir * theta;
                for k in 0..m {
                    if alpha[k] != 0.0 {
                        let j = self.basis[k];
                        self.x[j] -= dir * theta * alpha[k];
                    }
                }
            }
            match leave {
                None => {
                    // bound flip, the basis is unchanged
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.x[out] = if to_upper { self.upper[out] } else { self.lower[out] };
                    self.pivot(r, q, &alpha);
                    dual_stale = true;
                    self.since_refactor += 1;
                    if self.since_refactor >= REFACTOR_EVERY.max(m) {
                        self.refactor()?;
                    }
                }
            }
        }
    }

    fn compute_duals(&self, y: &mut [f64]) {
        let m = self.m;
        y.iter_mut().for_each(|v| *v = 0.0);
        for (k, &j) in self.basis.iter().enumerate() {
            let c = self.cost[j];
            if c != 0.0 {
                let row = &self.binv[k * m..(k + 1) * m];
                for (yi, b) in y.iter_mut().zip(row) {
                    *yi += c * b;
                }
            }
        }
    }

    /// Entering variable and its direction (+1 increase, -1 decrease).
    fn price(&self, d: &[f64], pricing: Pricing) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for (j, &dj) in d.iter().enumerate() {
            if self.pos[j].is_some() || self.lower[j] == self.upper[j] {
                continue;
            }
            let x = self.x[j];
            let dir = if dj < -OPT_TOL && x < self.upper[j] {
                1.0
            } else if dj > OPT_TOL && x > self.lower[j] {
                -1.0
            } else {
                continue;
            };
            match pricing {
                Pricing::Bland => return Some((j, dir)),
                Pricing::Dantzig => {
                    if dj.abs() > best_score {
                        best_score = dj.abs();
                        best = Some((j, dir));
                    }
                }
            }
        }
        best
    }

    /// `alpha = B^-1 a_q`.
    fn ftran(&self, q: usize, alpha: &mut [f64]) {
        let m = self.m;
        match self.column(q) {
            ColumnRef::Unit(i, s) => {
                for k in 0..m {
                    alpha[k] = s * self.binv[k * m + i];
                }
            }
            ColumnRef::Sparse(col) => {
                for k in 0..m {
                    let row = &self.binv[k * m..(k + 1) * m];
                    alpha[k] = col.iter().map(|&(i, a)| a * row[i]).sum();
                }
            }
        }
        for a in alpha.iter_mut() {
            if a.abs() < PIVOT_TOL {
                *a = 0.0;
            }
        }
    }

    /// Step length and the leaving position (with the bound it reaches);
    /// `None` means the entering variable reaches its own opposite bound.
    fn ratio_test(
        &self,
        q: usize,
        dir: f64,
        alpha: &[f64],
        pricing: Pricing,
    ) -> (f64, Option<(usize, bool)>) {
        let mut theta = self.upper[q] - self.lower[q];
        let mut leave = None;
        let mut best_pivot = 0.0;
        for (k, &a) in alpha.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let j = self.basis[k];
            // x_j changes at rate -dir * a
            let rate = -dir * a;
            let (limit, to_upper) = if rate < 0.0 {
                if self.lower[j] == f64::NEG_INFINITY {
                    continue;
                }
                (((self.x[j] - self.lower[j]) / -rate).max(0.0), false)
            } else {
                if self.upper[j] == f64::INFINITY {
                    continue;
                }
                (((self.upper[j] - self.x[j]) / rate).max(0.0), true)
            };
            let better = limit < theta
                || (limit == theta
                    && leave.is_some()
                    && match pricing {
                        Pricing::Dantzig => a.abs() > best_pivot,
                        Pricing::Bland => j < self.basis[leave.map(|(r, _)| r).unwrap_or(0)],
                    });
            if better {
                theta = limit;
                leave = Some((k, to_upper));
                best_pivot = a.abs();
            }
        }
        (theta, leave)
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let out = self.basis[r];
        self.pos[out] = None;
        self.basis[r] = q;
        self.pos[q] = Some(r);
        let inv = 1.0 / alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        pivot_row.iter_mut().for_each(|v| *v *= inv);
        for (k, &a) in alpha.iter().enumerate() {
            if k == r || a == 0.0 {
                continue;
            }
            let row = if k < r {
                &mut before[k * m..(k + 1) * m]
            } else {
                &mut after[(k - r - 1) * m..(k - r) * m]
            };
            for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                *v -= a * p;
            }
        }
    }

    /// Rebuilds `B^-1` by Gauss-Jordan elimination and recomputes basic values.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            match self.column(j) {
                ColumnRef::Unit(i, s) => b[i * m + k] = s,
                ColumnRef::Sparse(col) => {
                    for &(i, a) in col {
                        b[i * m + k] = a;
                    }
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b2| b[a * m + c].abs().total_cmp(&b[b2 * m + c].abs()))
                .expect("non-empty");
            let pv = b[p * m + c];
            if pv.abs() < PIVOT_TOL {
                return Err(Error::Numerical(format!(
                    "singular basis (pivot {pv:e} in column {c})"
                )));
            }
            if p != c {
                for k in 0..m {
                    b.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let s = 1.0 / pv;
            for k in 0..m {
                b[c * m + k] *= s;
                inv[c * m + k] *= s;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = b[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        b[r * m + k] -= f * b[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        // inv now maps row space to basis positions: B^-1 = inv
        self.binv = inv;
        let mut resid = self.rhs.clone();
        for j in 0..self.n_total() {
            if self.pos[j].is_none() && self.x[j] != 0.0 {
                let v = self.x[j];
                match self.column(j) {
                    ColumnRef::Unit(i, s) => resid[i] -= s * v,
                    ColumnRef::Sparse(col) => {
                        for &(i, a) in col {
                            resid[i] -= a * v;
                        }
                    }
                }
            }
        }
        for k in 0..m {
            let row = &self.binv[k * m..(k + 1) * m];
            let v: f64 = row.iter().zip(&resid).map(|(a, b)| a * b).sum();
            self.x[self.basis[k]] = v;
        }
        Ok(())
    }
}

enum ColumnRef<'a> {
    Sparse(&'a [(usize, f64)]),
    Unit(usize, f64),
}

impl ColumnRef<'_> {
    fn dot(&self, y: &[f64]) -> f64 {
        match *self {
            ColumnRef::Sparse(col) => col.iter().map(|&(i, a)| a * y[i]).sum(),
            ColumnRef::Unit(i, s) => s * y[i],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_bound() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, 10.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.objective_value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn triangle() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, 1.0);
        let y = lp.add_var(-1.0, 0.0, 1.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value + 1.0).abs() < 1e-12);
        assert!((sol.x[0] + sol.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(0.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 2.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert_eq!(sol.objective_value, f64::INFINITY);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(0.0, 0.0, 1.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Ge, 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_offset() {
        // min 2a + 3b + 5, a + b = 4, a <= 3
        let mut lp = LinearProgram::new();
        lp.objective_offset = 5.0;
        let a = lp.add_var(2.0, 0.0, 3.0);
        let b = lp.add_var(3.0, 0.0, 10.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 4.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - (6.0 + 3.0 + 5.0)).abs() < 1e-12);
    }

    #[test]
    fn dense_row_length_checked() {
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 0.0, 1.0);
        assert!(lp.add_dense_constraint(&[1.0, 2.0], Relation::Le, 1.0).is_err());
        assert!(lp.add_dense_constraint(&[1.0], Relation::Le, 1.0).is_ok());
    }

    #[test]
    fn invalid_bounds_rejected() {
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 2.0, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::Validation(_))));
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, f64::NEG_INFINITY, 1.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn degenerate_cycling_candidate() {
        // Beale's classic cycling example, with an upper bound row.
        let mut lp = LinearProgram::new();
        let x1 = lp.add_var(-0.75, 0.0, f64::INFINITY);
        let x2 = lp.add_var(150.0, 0.0, f64::INFINITY);
        let x3 = lp.add_var(-0.02, 0.0, f64::INFINITY);
        let x4 = lp.add_var(6.0, 0.0, f64::INFINITY);
        lp.add_constraint(vec![(x1, 0.25), (x2, -60.0), (x3, -0.04), (x4, 9.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(x1, 0.5), (x2, -90.0), (x3, -0.02), (x4, 3.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(x3, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value + 0.05).abs() < 1e-9, "{}", sol.objective_value);
    }
}
