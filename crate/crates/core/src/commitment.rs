//! Unit commitment: minimum up/down feasibility, transition costs, and an
//! exhaustive extensive-form solver for desk-scale instances.

use rayon::prelude::*;

use crate::case::CaseDefinition;
use crate::dispatch::{CommitmentSchedule, CostModel, DispatchModel};
use crate::error::{Error, Result};
use crate::estimators::{mc_expected_cost, sample_demand};
use crate::pce::SurrogateBuilder;

/// Largest `|G| * |T|` that [`solve_extensive_form`] will enumerate.
pub const ENUMERATION_GUARD: usize = 20;

/// True iff every completed on-run lasts at least `min_up` periods and every
/// completed off-run at least `min_down`. A run touching the start of the
/// horizon is credited with `initial_state_duration`; a run still open at the
/// end of the horizon is never penalized.
pub fn is_feasible_commitment(case: &CaseDefinition, x: &CommitmentSchedule) -> bool {
    if x.check_dims(case).is_err() {
        return false;
    }
    case.generators.iter().enumerate().all(|(g, gen)| {
        let mut state = gen.initial_on;
        // None: settled long enough before the horizon
        let mut run: Option<usize> = gen.initial_state_duration;
        for t in 0..case.n_periods() {
            let now = x.is_on(g, t);
            if now == state {
                run = run.map(|r| r + 1);
                continue;
            }
            let needed = if state { gen.min_up } else { gen.min_down };
            if run.is_some_and(|r| r < needed) {
                return false;
            }
            state = now;
            run = Some(1);
        }
        true
    })
}

/// Start-up plus shut-down cost of a schedule, counting a transition out of
/// the initial state in the first period.
pub fn transition_costs(case: &CaseDefinition, x: &CommitmentSchedule) -> f64 {
    let mut total = 0.0;
    for (g, gen) in case.generators.iter().enumerate() {
        let mut prev = gen.initial_on;
        for t in 0..x.periods() {
            let now = x.is_on(g, t);
            match (prev, now) {
                (false, true) => total += gen.startup_cost,
                (true, false) => total += gen.shutdown_cost,
                _ => {}
            }
            prev = now;
        }
    }
    total
}

/// Transition costs plus the scenario-average dispatch cost, or `None` when
/// the schedule is infeasible (minimum times, or ramps the dispatch cannot meet).
pub fn score_commitment(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    scenarios: &[Vec<f64>],
) -> Result<Option<f64>> {
    if !is_feasible_commitment(case, x) {
        return Ok(None);
    }
    let model = DispatchModel::new(case, x)?;
    let mut sum = 0.0;
    for d in scenarios {
        match model.cost(d) {
            Ok(c) => sum += c,
            Err(Error::Infeasible(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(transition_costs(case, x) + sum / scenarios.len() as f64))
}

/// Minimizes transition cost plus mean dispatch cost over every feasible
/// schedule. Ties go to the lexicographically smallest schedule.
pub fn solve_extensive_form(
    case: &CaseDefinition,
    scenarios: &[Vec<f64>],
) -> Result<(CommitmentSchedule, f64)> {
    let (ng, nt) = (case.n_generators(), case.n_periods());
    let bits = ng * nt;
    if bits > ENUMERATION_GUARD {
        return Err(Error::Size(format!(
            "{ng} generators x {nt} periods = {bits} binaries, limit is {ENUMERATION_GUARD}"
        )));
    }
    if scenarios.is_empty() {
        return Err(Error::Validation("at least one scenario is required".into()));
    }
    for d in scenarios {
        case.loads.check_contains(d)?;
    }
    let scores: Vec<Option<f64>> = (0..1u64 << bits)
        .into_par_iter()
        .map(|mask| score_commitment(case, &CommitmentSchedule::from_mask(mask, ng, nt), scenarios))
        .collect::<Result<_>>()?;
    let mut best: Option<(u64, f64)> = None;
    for (mask, score) in scores.into_iter().enumerate() {
        if let Some(s) = score {
            if best.is_none_or(|(_, b)| s < b) {
                best = Some((mask as u64, s));
            }
        }
    }
    let (mask, score) = best.ok_or(Error::NoFeasibleCommitment)?;
    Ok((CommitmentSchedule::from_mask(mask, ng, nt), score))
}

/// How the expected dispatch cost of a commitment is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectationMethod {
    MonteCarlo { n: usize, seed: u64 },
    Pce { order: u32, level: u32 },
}

pub fn expected_cost_of_commitment(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    method: ExpectationMethod,
) -> Result<f64> {
    if !is_feasible_commitment(case, x) {
        return Err(Error::Validation("commitment violates minimum up/down times".into()));
    }
    let expected = match method {
        ExpectationMethod::MonteCarlo { n: 1, seed } => {
            DispatchModel::new(case, x)?.cost(&sample_demand(&case.loads, seed, 0))?
        }
        ExpectationMethod::MonteCarlo { n, seed } => mc_expected_cost(case, x, n, seed)?.mean,
        ExpectationMethod::Pce { order, level } => {
            SurrogateBuilder::new(case, x)?.build(order, level)?.mean()
        }
    };
    Ok(transition_costs(case, x) + expected)
}
