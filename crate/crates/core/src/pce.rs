//! Legendre-uniform polynomial chaos: total-degree multi-index sets, basis
//! evaluation, Galerkin projection on a sparse grid, and the resulting
//! surrogate of the dispatch cost.
//!
//! The basis is the unnormalized Legendre family (`psi_j(1) = 1`) and inner
//! products are taken against the uniform probability density on
//! `[-1, 1]^n`, so `<Psi_k^2> = prod_i 1 / (2 k_i + 1)` and `c_0` is the mean.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case::{CaseDefinition, LoadBox};
use crate::dispatch::{CommitmentSchedule, CostModel, DispatchModel};
use crate::error::{Error, Result};
use crate::quadrature::{smolyak_grid, NodeKey, SparseGrid};

pub const MAX_TERMS: usize = 1_000_000;

const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    pub n: usize,
    pub p: u32,
    /// Graded by total degree; within a degree, lexicographically descending
    /// so `(1, 0)` precedes `(0, 1)`.
    pub indices: Vec<Vec<u32>>,
}

impl MultiIndexSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `(n + p)! / (n! p!)`, saturating.
pub fn term_count(n: usize, p: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 1..=p as u128 {
        c = c.saturating_mul(n as u128 + i) / i;
    }
    c
}

pub fn total_degree_indices(n: usize, p: u32) -> Result<MultiIndexSet> {
    if n == 0 {
        return Err(Error::Validation("expansion dimension must be at least 1".into()));
    }
    let count = term_count(n, p);
    if count > MAX_TERMS as u128 {
        return Err(Error::Resource(format!(
            "{count} terms for dimension {n}, order {p} (cap {MAX_TERMS})"
        )));
    }
    let mut indices = Vec::with_capacity(count as usize);
    let mut cur = vec![0u32; n];
    for degree in 0..=p {
        fill_degree(&mut cur, 0, degree, &mut indices);
    }
    Ok(MultiIndexSet { n, p, indices })
}

fn fill_degree(cur: &mut Vec<u32>, d: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if d + 1 == cur.len() {
        cur[d] = remaining;
        out.push(cur.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        cur[d] = k;
        fill_degree(cur, d + 1, remaining - k, out);
    }
    cur[d] = 0;
}

/// Nonzero `(dimension, degree)` pairs of every multi-index, flattened, with
/// the offset of each index's run.
fn sparse_factors(index_set: &MultiIndexSet) -> (Vec<(u32, u32)>, Vec<usize>) {
    let mut factors = Vec::new();
    let mut offsets = vec![0];
    for idx in &index_set.indices {
        for (d, &k) in idx.iter().enumerate() {
            if k > 0 {
                factors.push((d as u32, k));
            }
        }
        offsets.push(factors.len());
    }
    (factors, offsets)
}

fn check_xi(xi: f64) -> Result<()> {
    if xi.is_nan() || xi.abs() > 1.0 + DOMAIN_TOL {
        return Err(Error::Range { value: xi, lo: -1.0, hi: 1.0 });
    }
    Ok(())
}

/// Writes `psi_0(xi) .. psi_p(xi)` into `out`.
fn legendre_all(xi: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = xi;
    }
    for j in 2..out.len() {
        let jf = j as f64;
        out[j] = ((2.0 * jf - 1.0) * xi * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf;
    }
}

pub fn legendre_eval(degree: u32, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    let mut v = vec![0.0; degree as usize + 1];
    legendre_all(xi, &mut v);
    Ok(v[degree as usize])
}

pub fn basis_eval(idx: &[u32], xi: &[f64]) -> Result<f64> {
    if idx.len() != xi.len() {
        return Err(Error::Dimension(format!(
            "multi-index has {} entries, point has {}",
            idx.len(),
            xi.len()
        )));
    }
    idx.iter().zip(xi).try_fold(1.0, |acc, (&k, &x)| Ok(acc * legendre_eval(k, x)?))
}

pub fn basis_norm_sq(idx: &[u32]) -> f64 {
    idx.iter().map(|&k| 1.0 / (2.0 * k as f64 + 1.0)).product()
}

/// `xi_t = (2 D_t - (d_max + d_min)) / (d_max - d_min)`; degenerate periods
/// map to 0.
pub fn xi_from_demand(load_box: &LoadBox, demand: &[f64]) -> Result<Vec<f64>> {
    load_box.check_contains(demand)?;
    Ok(demand
        .iter()
        .enumerate()
        .map(|(t, &d)| {
            let (lo, hi) = (load_box.d_min[t], load_box.d_max[t]);
            if hi > lo {
                ((2.0 * d - (hi + lo)) / (hi - lo)).clamp(-1.0, 1.0)
            } else {
                0.0
            }
        })
        .collect())
}

pub fn demand_from_xi(load_box: &LoadBox, xi: &[f64]) -> Result<Vec<f64>> {
    if xi.len() != load_box.periods() {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, box has {} periods",
            xi.len(),
            load_box.periods()
        )));
    }
    xi.iter()
        .enumerate()
        .map(|(t, &z)| {
            check_xi(z)?;
            let (lo, hi) = (load_box.d_min[t], load_box.d_max[t]);
            let z = z.clamp(-1.0, 1.0);
            // endpoints land exactly on the box faces
            Ok(if z == -1.0 {
                lo
            } else if z == 1.0 {
                hi
            } else {
                0.5 * (hi + lo) + 0.5 * (hi - lo) * z
            })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpansionMeta {
    pub grid_level: Option<u32>,
    pub node_count: usize,
    pub case_hash: Option<String>,
    pub commitment: Option<CommitmentSchedule>,
    pub commitment_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// A truncated expansion `sum_k c_k Psi_k(xi)` over a load box.
#[derive(Debug, Clone)]
pub struct PCExpansion {
    index_set: MultiIndexSet,
    coefficients: Vec<f64>,
    load_box: LoadBox,
    pub meta: ExpansionMeta,
    // sparse (dimension, degree) factors of each term
    factors: Vec<(u32, u32)>,
    offsets: Vec<usize>,
}

impl PartialEq for PCExpansion {
    fn eq(&self, other: &Self) -> bool {
        self.index_set == other.index_set
            && self.coefficients == other.coefficients
            && self.load_box == other.load_box
            && self.meta == other.meta
    }
}

impl PCExpansion {
    pub fn new(
        index_set: MultiIndexSet,
        coefficients: Vec<f64>,
        load_box: LoadBox,
        meta: ExpansionMeta,
    ) -> Result<Self> {
        if coefficients.len() != index_set.len() {
            return Err(Error::Validation(format!(
                "{} coefficients for {} basis terms",
                coefficients.len(),
                index_set.len()
            )));
        }
        if load_box.periods() != index_set.n {
            return Err(Error::Dimension(format!(
                "expansion dimension {} but box has {} periods",
                index_set.n,
                load_box.periods()
            )));
        }
        load_box.validate()?;
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::Numerical(format!("non-finite coefficient {c}")));
        }
        let (factors, offsets) = sparse_factors(&index_set);
        Ok(PCExpansion { index_set, coefficients, load_box, meta, factors, offsets })
    }

    pub fn index_set(&self) -> &MultiIndexSet {
        &self.index_set
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn load_box(&self) -> &LoadBox {
        &self.load_box
    }

    pub fn dim(&self) -> usize {
        self.index_set.n
    }

    pub fn order(&self) -> u32 {
        self.index_set.p
    }

    pub fn eval_xi(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expansion has {}",
                xi.len(),
                self.dim()
            )));
        }
        for &z in xi {
            check_xi(z)?;
        }
        Ok(self.eval_unchecked(xi))
    }

    fn eval_unchecked(&self, xi: &[f64]) -> f64 {
        let stride = self.order() as usize + 1;
        let mut table = vec![0.0; stride * xi.len()];
        for (d, &z) in xi.iter().enumerate() {
            legendre_all(z, &mut table[d * stride..(d + 1) * stride]);
        }
        let mut sum = 0.0;
        for (k, &c) in self.coefficients.iter().enumerate() {
            let mut term = c;
            for &(d, j) in &self.factors[self.offsets[k]..self.offsets[k + 1]] {
                term *= table[d as usize * stride + j as usize];
            }
            sum += term;
        }
        sum
    }

    pub fn surrogate_eval(&self, demand: &[f64]) -> Result<f64> {
        let xi = xi_from_demand(&self.load_box, demand)?;
        Ok(self.eval_unchecked(&xi))
    }

    pub fn mean(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn variance(&self) -> f64 {
        self.index_set
            .indices
            .iter()
            .zip(&self.coefficients)
            .skip(1)
            .fold(0.0, |acc, (idx, c)| acc + c * c * basis_norm_sq(idx))
    }

    /// Rejects use with a case or commitment other than the one the expansion
    /// was built for.
    pub fn check_provenance(&self, case: &CaseDefinition, x: &CommitmentSchedule) -> Result<()> {
        if case.loads.d_min != self.load_box.d_min || case.loads.d_max != self.load_box.d_max {
            return Err(Error::Validation("surrogate was built for a different load box".into()));
        }
        if let Some(h) = &self.meta.case_hash {
            if *h != case.hash() {
                return Err(Error::Validation("surrogate was built for a different case".into()));
            }
        }
        if let Some(h) = &self.meta.commitment_hash {
            if *h != x.hash() {
                return Err(Error::Validation(
                    "surrogate was built for a different commitment".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = ExpansionFile {
            n: self.dim(),
            p: self.order(),
            indices: self.index_set.indices.clone(),
            coefficients: self.coefficients.clone(),
            load_box: self.load_box.clone(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&file).expect("expansion serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ExpansionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("surrogate: {e}")))?;
        let index_set = total_degree_indices(file.n, file.p)?;
        if index_set.indices != file.indices {
            return Err(Error::Validation(format!(
                "indices are not the total-degree set for n = {}, p = {}",
                file.n, file.p
            )));
        }
        PCExpansion::new(index_set, file.coefficients, file.load_box, file.meta)
    }
}

impl CostModel for PCExpansion {
    fn periods(&self) -> usize {
        self.dim()
    }

    fn cost(&self, demand: &[f64]) -> Result<f64> {
        self.surrogate_eval(demand)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpansionFile {
    n: usize,
    p: u32,
    indices: Vec<Vec<u32>>,
    coefficients: Vec<f64>,
    #[serde(rename = "box")]
    load_box: LoadBox,
    meta: ExpansionMeta,
}

/// Warning text when the grid cannot integrate products of basis terms
/// exactly.
pub fn exactness_warning(order: u32, grid: &SparseGrid) -> Option<String> {
    (2 * order > grid.exactness_degree()).then(|| {
        format!(
            "order {order} needs exactness degree {} but the level-{} grid has {}",
            2 * order,
            grid.level,
            grid.exactness_degree()
        )
    })
}

/// Galerkin coefficients from function values at the grid nodes.
pub fn project_values(
    index_set: &MultiIndexSet,
    grid: &SparseGrid,
    values: &[f64],
) -> Result<Vec<f64>> {
    if grid.dim != index_set.n {
        return Err(Error::Dimension(format!(
            "grid dimension {} but index set dimension {}",
            grid.dim, index_set.n
        )));
    }
    if values.len() != grid.len() {
        return Err(Error::Dimension(format!("{} values for {} nodes", values.len(), grid.len())));
    }
    let (factors, offsets) = sparse_factors(index_set);
    let stride = index_set.p as usize + 1;
    let mut table = vec![0.0; stride * grid.dim];
    let mut acc = vec![0.0; index_set.len()];
    for ((x, &w), &f) in grid.nodes.iter().zip(&grid.weights).zip(values) {
        for (d, &z) in x.iter().enumerate() {
            legendre_all(z, &mut table[d * stride..(d + 1) * stride]);
        }
        let wf = w * f;
        for (k, a) in acc.iter_mut().enumerate() {
            let mut psi = 1.0;
            for &(d, j) in &factors[offsets[k]..offsets[k + 1]] {
                psi *= table[d as usize * stride + j as usize];
            }
            *a += wf * psi;
        }
    }
    Ok(acc.into_iter().zip(&index_set.indices).map(|(a, idx)| a / basis_norm_sq(idx)).collect())
}

/// Projects an arbitrary function of the germ. `f` is evaluated at every node
/// (in parallel) and failures are reported with the node.
pub fn project_fn<F>(
    index_set: &MultiIndexSet,
    grid: &SparseGrid,
    load_box: &LoadBox,
    f: F,
) -> Result<PCExpansion>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let values = eval_nodes(grid, |_, x| f(x))?;
    let coefficients = project_values(index_set, grid, &values)?;
    let meta = ExpansionMeta {
        grid_level: Some(grid.level),
        node_count: grid.len(),
        warnings: exactness_warning(index_set.p, grid).into_iter().collect(),
        ..Default::default()
    };
    PCExpansion::new(index_set.clone(), coefficients, load_box.clone(), meta)
}

fn eval_nodes<F>(grid: &SparseGrid, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize, &[f64]) -> Result<f64> + Sync,
{
    grid.nodes
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            f(i, x).map_err(|e| Error::AtNode { index: i, point: x.clone(), source: Box::new(e) })
        })
        .collect()
}

/// Builds surrogates of one case and commitment, caching dispatch solves by
/// node identity so nested grids reuse earlier evaluations.
#[derive(Debug)]
pub struct SurrogateBuilder {
    model: DispatchModel,
    cache: HashMap<NodeKey, f64>,
    solves: usize,
}

impl SurrogateBuilder {
    pub fn new(case: &CaseDefinition, x: &CommitmentSchedule) -> Result<Self> {
        Ok(SurrogateBuilder {
            model: DispatchModel::new(case, x)?,
            cache: HashMap::new(),
            solves: 0,
        })
    }

    pub fn model(&self) -> &DispatchModel {
        &self.model
    }

    /// Dispatch solves performed so far.
    pub fn solves(&self) -> usize {
        self.solves
    }

    /// Dispatch cost at every grid node, solving only nodes not seen before.
    pub fn node_costs(&mut self, grid: &SparseGrid) -> Result<Vec<f64>> {
        let load_box = &self.model.case().loads;
        if grid.dim != load_box.periods() {
            return Err(Error::Dimension(format!(
                "grid dimension {} but case has {} periods",
                grid.dim,
                load_box.periods()
            )));
        }
        let missing: Vec<usize> =
            (0..grid.len()).filter(|&i| !self.cache.contains_key(&grid.keys[i])).collect();
        let model = &self.model;
        let solved: Vec<f64> = missing
            .par_iter()
            .map(|&i| {
                let x = &grid.nodes[i];
                demand_from_xi(load_box, x)
                    .and_then(|d| model.cost(&d))
                    .map_err(|e| Error::AtNode { index: i, point: x.clone(), source: Box::new(e) })
            })
            .collect::<Result<_>>()?;
        self.solves += missing.len();
        for (&i, v) in missing.iter().zip(solved) {
            self.cache.insert(grid.keys[i].clone(), v);
        }
        Ok(grid.keys.iter().map(|k| self.cache[k]).collect())
    }

    pub fn project(&mut self, index_set: &MultiIndexSet, grid: &SparseGrid) -> Result<PCExpansion> {
        let values = self.node_costs(grid)?;
        let coefficients = project_values(index_set, grid, &values)?;
        let case = self.model.case();
        let x = self.model.commitment();
        let meta = ExpansionMeta {
            grid_level: Some(grid.level),
            node_count: grid.len(),
            case_hash: Some(case.hash()),
            commitment: Some(x.clone()),
            commitment_hash: Some(x.hash()),
            warnings: exactness_warning(index_set.p, grid).into_iter().collect(),
        };
        PCExpansion::new(index_set.clone(), coefficients, case.loads.clone(), meta)
    }

    /// Order-`order` expansion on the level-`level` Smolyak grid.
    pub fn build(&mut self, order: u32, level: u32) -> Result<PCExpansion> {
        let n = self.model.case().n_periods();
        let index_set = total_degree_indices(n, order)?;
        let grid = smolyak_grid(n, level)?;
        self.project(&index_set, &grid)
    }
}

pub fn project(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    index_set: &MultiIndexSet,
    grid: &SparseGrid,
) -> Result<PCExpansion> {
    SurrogateBuilder::new(case, x)?.project(index_set, grid)
}
