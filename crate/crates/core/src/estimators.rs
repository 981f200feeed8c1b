//! Monte Carlo estimation of the expected dispatch cost, surrogate sampling,
//! surrogate error metrics and the MC-versus-PCE convergence harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case::{CaseDefinition, LoadBox};
use crate::dispatch::{CommitmentSchedule, CostModel, DispatchModel};
use crate::error::{Error, Result};
use crate::pce::{PCExpansion, SurrogateBuilder};
use crate::quadrature::SparseGrid;

/// Relative errors below this magnitude of `Q` fall back to absolute.
const REL_FLOOR: f64 = 1e-9;

/// Demand sample `index` of the stream for `seed`. Each sample has its own
/// ChaCha stream, so draws do not depend on evaluation order.
pub fn sample_demand(load_box: &LoadBox, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    load_box
        .d_min
        .iter()
        .zip(&load_box.d_max)
        .map(|(&lo, &hi)| {
            let u: f64 = rng.random();
            if hi > lo {
                lo + u * (hi - lo)
            } else {
                lo
            }
        })
        .collect()
}

pub fn sample_demands(load_box: &LoadBox, n: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..n as u64).map(|i| sample_demand(load_box, seed, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Mean and standard error of `values`, reduced in index order.
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::Validation(format!("need at least 2 samples, got {n}")));
        }
        // shifted sums keep constant data exact
        let shift = values[0];
        let (mut s1, mut s2) = (0.0, 0.0);
        for &v in values {
            let d = v - shift;
            s1 += d;
            s2 += d * d;
        }
        let nf = n as f64;
        let mean_shift = s1 / nf;
        let var = ((s2 - s1 * mean_shift) / (nf - 1.0)).max(0.0);
        Ok(McEstimate {
            mean: shift + mean_shift,
            std_error: (var / nf).sqrt(),
            n_samples: n,
            seed,
        })
    }
}

/// Plain MC average of `model` over `n` uniform draws from the box.
pub fn mc_estimate<M: CostModel + ?Sized>(
    model: &M,
    load_box: &LoadBox,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if model.periods() != load_box.periods() {
        return Err(Error::Dimension(format!(
            "model has {} periods, box has {}",
            model.periods(),
            load_box.periods()
        )));
    }
    if n < 2 {
        return Err(Error::Validation(format!("need at least 2 samples, got {n}")));
    }
    let values: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| model.cost(&sample_demand(load_box, seed, i)))
        .collect::<Result<_>>()?;
    McEstimate::from_values(&values, seed)
}

pub fn mc_expected_cost(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    let model = DispatchModel::new(case, x)?;
    mc_estimate(&model, &case.loads, n, seed)
}

pub fn surrogate_mc(pce: &PCExpansion, n: usize, seed: u64) -> Result<McEstimate> {
    mc_estimate(pce, pce.load_box(), n, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingError {
    /// `||Q - Q_PC|| / ||Q||` over the nodes.
    pub unweighted: f64,
    /// Same ratio with quadrature weights; negative weights enter through
    /// their magnitude.
    pub weighted: f64,
}

/// Relative L2 discrepancy between `pce` and known values at the grid nodes.
pub fn training_error_from_values(
    pce: &PCExpansion,
    grid: &SparseGrid,
    values: &[f64],
) -> Result<TrainingError> {
    if values.len() != grid.len() {
        return Err(Error::Dimension(format!("{} values for {} nodes", values.len(), grid.len())));
    }
    let (mut num, mut den, mut wnum, mut wden) = (0.0, 0.0, 0.0, 0.0);
    for ((x, &w), &q) in grid.nodes.iter().zip(&grid.weights).zip(values) {
        let r = q - pce.eval_xi(x)?;
        num += r * r;
        den += q * q;
        wnum += w.abs() * r * r;
        wden += w.abs() * q * q;
    }
    let ratio = |a: f64, b: f64| if b > 0.0 { (a / b).sqrt() } else { a.sqrt() };
    Ok(TrainingError { unweighted: ratio(num, den), weighted: ratio(wnum, wden) })
}

/// Unweighted relative L2 training error of `pce` on `grid`.
pub fn relative_l2_training_error(
    pce: &PCExpansion,
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    grid: &SparseGrid,
) -> Result<f64> {
    training_error(&mut SurrogateBuilder::new(case, x)?, pce, grid).map(|e| e.unweighted)
}

/// Training error reusing the builder's cached dispatch solves.
pub fn training_error(
    builder: &mut SurrogateBuilder,
    pce: &PCExpansion,
    grid: &SparseGrid,
) -> Result<TrainingError> {
    let values = builder.node_costs(grid)?;
    training_error_from_values(pce, grid, &values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub max_rel: f64,
    pub rms_rel: f64,
    pub n: usize,
}

pub fn cross_validate_models<A, B>(
    surrogate: &A,
    truth: &B,
    load_box: &LoadBox,
    n: usize,
    seed: u64,
) -> Result<CrossValidation>
where
    A: CostModel + ?Sized,
    B: CostModel + ?Sized,
{
    if n == 0 {
        return Err(Error::Validation("cross-validation needs at least one sample".into()));
    }
    let errs: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let d = sample_demand(load_box, seed, i);
            let q = truth.cost(&d)?;
            let s = surrogate.cost(&d)?;
            let diff = (s - q).abs();
            Ok(if q.abs() < REL_FLOOR { diff } else { diff / q.abs() })
        })
        .collect::<Result<_>>()?;
    let max_rel = errs.iter().fold(0.0f64, |a, &b| a.max(b));
    let rms_rel = (errs.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();
    Ok(CrossValidation { max_rel, rms_rel, n })
}

/// Pointwise comparison of `pce` against the dispatch LP at `n` random
/// in-box demands.
pub fn cross_validate(
    pce: &PCExpansion,
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    n: usize,
    seed: u64,
) -> Result<CrossValidation> {
    let model = DispatchModel::new(case, x)?;
    cross_validate_models(pce, &model, pce.load_box(), n, seed)
}

/// Reference value for relative errors in a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truth {
    DirectMc { n: usize, seed: u64 },
    Pce { order: u32, level: u32 },
}

impl Truth {
    pub fn describe(&self) -> String {
        match self {
            Truth::DirectMc { n, seed } => format!("direct MC, n = {n}, seed = {seed}"),
            Truth::Pce { order, level } => format!("PCE mean, order {order}, level {level}"),
        }
    }
}

impl Default for Truth {
    fn default() -> Self {
        Truth::DirectMc { n: 1_000_000, seed: u64::MAX }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub mc_sizes: Vec<usize>,
    /// `(order, level)` pairs.
    pub pce_configs: Vec<(u32, u32)>,
    pub seeds: Vec<u64>,
    pub truth: Truth,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            mc_sizes: vec![100, 1000, 10_000],
            pce_configs: vec![(1, 1), (2, 2), (2, 3), (3, 3)],
            seeds: (1..=20).collect(),
            truth: Truth::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    Pce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub method: Method,
    pub n_evals: usize,
    pub estimate: f64,
    pub rel_error: f64,
    /// MC replicate seed; empty for PCE rows.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    pub truth: f64,
    pub truth_source: String,
    /// Sorted by `n_evals`.
    pub rows: Vec<ConvergenceRow>,
    pub mc_slope: Option<f64>,
    /// 95% interval from the spread of per-seed slopes; needs two seeds.
    pub mc_slope_ci: Option<(f64, f64)>,
    pub pce_slope: Option<f64>,
}

impl ConvergenceSeries {
    /// CSV `method,n_evals,estimate,rel_error,seed`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(vec![]);
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }

    /// Mean MC relative error per sample size, ascending in size.
    pub fn mc_mean_errors(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64, usize)> = vec![];
        for r in self.rows.iter().filter(|r| r.method == Method::Mc) {
            match out.iter_mut().find(|e| e.0 == r.n_evals) {
                Some(e) => {
                    e.1 += r.rel_error;
                    e.2 += 1;
                }
                None => out.push((r.n_evals, r.rel_error, 1)),
            }
        }
        out.into_iter().map(|(n, s, k)| (n, s / k as f64)).collect()
    }

    /// MC sample count at which the fitted error line reaches `target`.
    pub fn mc_samples_for(&self, target: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .mc_mean_errors()
            .into_iter()
            .filter(|&(_, e)| e > 0.0)
            .map(|(n, e)| ((n as f64).ln(), e.ln()))
            .collect();
        let (slope, intercept) = fit_line(&pts)?;
        (slope < 0.0).then(|| ((target.ln() - intercept) / slope).exp())
    }

    /// Fewest PCE model evaluations among configurations within `target`.
    pub fn pce_evals_for(&self, target: f64) -> Option<usize> {
        self.rows
            .iter()
            .filter(|r| r.method == Method::Pce && r.rel_error <= target)
            .map(|r| r.n_evals)
            .min()
    }
}

/// Least-squares `(slope, intercept)`; needs two distinct abscissae.
pub fn fit_line(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn log_slope(pts: &[(usize, f64)]) -> Option<f64> {
    if pts.iter().any(|p| p.1 <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(n, e)| ((n as f64).ln(), e.ln())).collect();
    fit_line(&logs).map(|l| l.0)
}

fn rel_error(estimate: f64, truth: f64) -> f64 {
    let diff = (estimate - truth).abs();
    if truth.abs() < REL_FLOOR {
        diff
    } else {
        diff / truth.abs()
    }
}

/// MC replicates and PCE builds against a common reference value.
pub fn convergence_study(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    config: &ConvergenceConfig,
) -> Result<ConvergenceSeries> {
    if config.seeds.is_empty() && !config.mc_sizes.is_empty() {
        return Err(Error::Validation("MC rows need at least one seed".into()));
    }
    let mut builder = SurrogateBuilder::new(case, x)?;
    if case.loads.is_degenerate() {
        return degenerate_study(case, x, config);
    }
    let truth = match config.truth {
        Truth::DirectMc { n, seed } => mc_estimate(builder.model(), &case.loads, n, seed)?.mean,
        Truth::Pce { order, level } => builder.build(order, level)?.mean(),
    };
    let mut rows = vec![];
    for &n in &config.mc_sizes {
        for &seed in &config.seeds {
            let est = mc_estimate(builder.model(), &case.loads, n, seed)?.mean;
            rows.push(ConvergenceRow {
                method: Method::Mc,
                n_evals: n,
                estimate: est,
                rel_error: rel_error(est, truth),
                seed: Some(seed),
            });
        }
    }
    let mut pce_pts = vec![];
    for &(order, level) in &config.pce_configs {
        let e = builder.build(order, level)?;
        let err = rel_error(e.mean(), truth);
        pce_pts.push((e.meta.node_count, err));
        rows.push(ConvergenceRow {
            method: Method::Pce,
            n_evals: e.meta.node_count,
            estimate: e.mean(),
            rel_error: err,
            seed: None,
        });
    }
    rows.sort_by_key(|r| r.n_evals);

    let mut series = ConvergenceSeries {
        truth,
        truth_source: config.truth.describe(),
        rows,
        mc_slope: None,
        mc_slope_ci: None,
        pce_slope: None,
    };
    series.mc_slope = log_slope(&series.mc_mean_errors());
    if config.seeds.len() >= 2 {
        let slopes: Vec<f64> = config
            .seeds
            .iter()
            .filter_map(|&s| {
                let pts: Vec<(usize, f64)> = series
                    .rows
                    .iter()
                    .filter(|r| r.seed == Some(s))
                    .map(|r| (r.n_evals, r.rel_error))
                    .collect();
                log_slope(&pts)
            })
            .collect();
        if slopes.len() >= 2 {
            let k = slopes.len() as f64;
            let m = slopes.iter().sum::<f64>() / k;
            let sd = (slopes.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
            let half = 1.96 * sd / k.sqrt();
            series.mc_slope_ci = Some((m - half, m + half));
        }
    }
    series.pce_slope = log_slope(&pce_pts);
    Ok(series)
}

fn degenerate_study(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    config: &ConvergenceConfig,
) -> Result<ConvergenceSeries> {
    let q = DispatchModel::new(case, x)?.cost(&case.loads.nominal)?;
    let mut rows = vec![];
    for _ in &config.mc_sizes {
        for &seed in &config.seeds {
            rows.push(ConvergenceRow {
                method: Method::Mc,
                n_evals: 1,
                estimate: q,
                rel_error: 0.0,
                seed: Some(seed),
            });
        }
    }
    for _ in &config.pce_configs {
        rows.push(ConvergenceRow {
            method: Method::Pce,
            n_evals: 1,
            estimate: q,
            rel_error: 0.0,
            seed: None,
        });
    }
    Ok(ConvergenceSeries {
        truth: q,
        truth_source: "degenerate box, single dispatch".into(),
        rows,
        mc_slope: None,
        mc_slope_ci: None,
        pce_slope: None,
    })
}
