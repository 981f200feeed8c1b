//! Multi-period economic dispatch under a fixed commitment.
//!
//! Generator output is `p = p_min * x + sum(segments)`, with one LP column per
//! piecewise-linear cost segment. Because segment slopes are nondecreasing the
//! LP fills cheaper segments first without ordering constraints. Each period
//! has a shed variable `q` and a surplus variable, both priced at the shed
//! penalty, so every demand vector has a finite dispatch cost.

use serde::{Deserialize, Serialize};

use crate::case::{hex_digest, CaseDefinition, GeneratorUnit, PiecewiseLinearCost};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};

/// Binary on/off decisions indexed `[generator][period]`. Period 0 of the
/// schedule is the first period of the horizon; the state before it comes
/// from each generator's `initial_on`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CommitmentSchedule {
    pub x: Vec<Vec<u8>>,
}

impl CommitmentSchedule {
    pub fn new(x: Vec<Vec<u8>>) -> Result<Self> {
        let width = x.first().map_or(0, Vec::len);
        for (g, row) in x.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Dimension(format!(
                    "commitment row {g} has {} periods, expected {width}",
                    row.len()
                )));
            }
            if let Some(t) = row.iter().position(|&b| b > 1) {
                return Err(Error::Validation(format!(
                    "commitment entry ({g}, period {}) must be 0 or 1",
                    t + 1
                )));
            }
        }
        Ok(CommitmentSchedule { x })
    }

    pub fn all_on(generators: usize, periods: usize) -> Self {
        CommitmentSchedule { x: vec![vec![1; periods]; generators] }
    }

    pub fn all_off(generators: usize, periods: usize) -> Self {
        CommitmentSchedule { x: vec![vec![0; periods]; generators] }
    }

    /// Schedule whose concatenated rows, read as a big-endian bit string,
    /// equal `mask`. Numeric order of masks is lexicographic order of schedules.
    pub fn from_mask(mask: u64, generators: usize, periods: usize) -> Self {
        let total = generators * periods;
        let x = (0..generators)
            .map(|g| {
                (0..periods)
                    .map(|t| ((mask >> (total - 1 - (g * periods + t))) & 1) as u8)
                    .collect()
            })
            .collect();
        CommitmentSchedule { x }
    }

    pub fn generators(&self) -> usize {
        self.x.len()
    }

    pub fn periods(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn is_on(&self, g: usize, t: usize) -> bool {
        self.x[g][t] == 1
    }

    /// State in period `t`, where `t = None` is the pre-horizon state.
    pub fn state(&self, case: &CaseDefinition, g: usize, t: Option<usize>) -> bool {
        match t {
            Some(t) => self.is_on(g, t),
            None => case.generators[g].initial_on,
        }
    }

    pub fn check_dims(&self, case: &CaseDefinition) -> Result<()> {
        if self.generators() != case.n_generators() || self.periods() != case.n_periods() {
            return Err(Error::Dimension(format!(
                "commitment is {}x{}, case has {} generators and {} periods",
                self.generators(),
                self.periods(),
                case.n_generators(),
                case.n_periods()
            )));
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        hex_digest(serde_json::to_string(self).expect("schedule serializes").as_bytes())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CommitmentSchedule =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("commitment: {e}")))?;
        CommitmentSchedule::new(raw.x)
    }
}

fn bit(on: bool) -> f64 {
    if on {
        1.0
    } else {
        0.0
    }
}

/// Upper limit on `p[t] - p[t-1]`.
pub fn ramp_up_limit(g: &GeneratorUnit, prev_on: bool, now_on: bool) -> f64 {
    let (xp, xn) = (bit(prev_on), bit(now_on));
    g.ramp_up * xp + g.startup_ramp * (xn - xp) + g.p_max * (1.0 - xn)
}

/// Upper limit on `p[t-1] - p[t]`.
pub fn ramp_down_limit(g: &GeneratorUnit, prev_on: bool, now_on: bool) -> f64 {
    let (xp, xn) = (bit(prev_on), bit(now_on));
    g.ramp_down * xn + g.shutdown_ramp * (xp - xn) + g.p_max * (1.0 - xp)
}

/// Column layout of the dispatch LP.
#[derive(Debug, Clone, Copy)]
pub struct EdLayout {
    pub generators: usize,
    pub periods: usize,
    pub segments: usize,
}

impl EdLayout {
    pub fn segment(&self, g: usize, t: usize, k: usize) -> usize {
        (g * self.periods + t) * self.segments + k
    }

    pub fn shed(&self, t: usize) -> usize {
        self.generators * self.periods * self.segments + t
    }

    pub fn surplus(&self, t: usize) -> usize {
        self.shed(0) + self.periods + t
    }

    pub fn n_vars(&self) -> usize {
        self.shed(0) + 2 * self.periods
    }
}

/// Builds the dispatch LP. Rows are the `|T|` balance equalities followed by
/// ramp-up and ramp-down rows for every (generator, period).
pub fn build_ed_lp(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    demand: &[f64],
) -> Result<LinearProgram> {
    x.check_dims(case)?;
    if demand.len() != case.n_periods() {
        return Err(Error::Dimension(format!(
            "demand has {} periods, case has {}",
            demand.len(),
            case.n_periods()
        )));
    }
    Ok(build_template(case, x, &case.linearized_costs(), demand))
}

fn build_template(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    costs: &[PiecewiseLinearCost],
    demand: &[f64],
) -> LinearProgram {
    let layout = EdLayout {
        generators: case.n_generators(),
        periods: case.n_periods(),
        segments: case.n_segments,
    };
    let mut lp = LinearProgram::new();
    for (g, plc) in costs.iter().enumerate() {
        for t in 0..layout.periods {
            let on = x.is_on(g, t);
            for (slope, width) in plc.slopes.iter().zip(plc.widths()) {
                lp.add_var(*slope, 0.0, if on { width } else { 0.0 });
            }
            if on {
                lp.objective_offset += plc.fixed_cost;
            }
        }
    }
    for _ in 0..layout.periods {
        lp.add_var(case.shed_penalty, 0.0, f64::INFINITY);
    }
    for _ in 0..layout.periods {
        lp.add_var(case.shed_penalty, 0.0, f64::INFINITY);
    }
    debug_assert_eq!(lp.n_vars(), layout.n_vars());

    let segs = |g: usize, t: usize, sign: f64| {
        (0..layout.segments).map(move |k| (layout.segment(g, t, k), sign))
    };
    for t in 0..layout.periods {
        let mut row: Vec<(usize, f64)> =
            (0..layout.generators).flat_map(|g| segs(g, t, 1.0)).collect();
        row.push((layout.shed(t), 1.0));
        row.push((layout.surplus(t), -1.0));
        let base: f64 = case
            .generators
            .iter()
            .enumerate()
            .filter(|(g, _)| x.is_on(*g, t))
            .map(|(_, gen)| gen.p_min)
            .sum();
        lp.add_constraint(row, Relation::Eq, demand[t] - base);
    }
    for (g, gen) in case.generators.iter().enumerate() {
        for t in 0..layout.periods {
            let now = x.is_on(g, t);
            let prev = if t == 0 { gen.initial_on } else { x.is_on(g, t - 1) };
            let base_now = gen.p_min * bit(now);
            // p[t-1] = base_prev + segments, or the fixed initial output
            let (base_prev, prev_terms): (f64, Vec<(usize, f64)>) = if t == 0 {
                (gen.initial_output(), Vec::new())
            } else {
                (gen.p_min * bit(prev), segs(g, t - 1, 1.0).collect())
            };
            let ru = ramp_up_limit(gen, prev, now);
            let rd = ramp_down_limit(gen, prev, now);
            let mut up: Vec<(usize, f64)> = segs(g, t, 1.0).collect();
            up.extend(prev_terms.iter().map(|&(j, v)| (j, -v)));
            lp.add_constraint(up, Relation::Le, ru - base_now + base_prev);
            let mut down: Vec<(usize, f64)> = segs(g, t, -1.0).collect();
            down.extend(prev_terms.iter().copied());
            lp.add_constraint(down, Relation::Le, rd - base_prev + base_now);
        }
    }
    lp
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    /// Output `[generator][period]` in MW.
    pub p: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    pub surplus: Vec<f64>,
    pub production_cost: f64,
    pub penalty_cost: f64,
    pub total: f64,
}

/// Anything that maps a demand vector to a cost: the dispatch LP itself or a
/// surrogate of it.
pub trait CostModel: Sync {
    fn periods(&self) -> usize;
    fn cost(&self, demand: &[f64]) -> Result<f64>;
}

/// A case and commitment with the LP structure prebuilt; only the balance
/// right-hand sides change between demand vectors.
///
/// Without ramp rows the dispatch separates by period and is solved exactly
/// by filling segments in slope order. When that dispatch also satisfies
/// every ramp row it is optimal for the full LP; otherwise the full LP is
/// solved.
#[derive(Debug, Clone)]
pub struct DispatchModel {
    case: CaseDefinition,
    commitment: CommitmentSchedule,
    layout: EdLayout,
    template: LinearProgram,
    base: Vec<f64>,
    // committed segment columns of each period in slope order
    merit: Vec<Vec<usize>>,
}

impl DispatchModel {
    pub fn new(case: &CaseDefinition, commitment: &CommitmentSchedule) -> Result<Self> {
        commitment.check_dims(case)?;
        let zeros = vec![0.0; case.n_periods()];
        let template = build_template(case, commitment, &case.linearized_costs(), &zeros);
        let base = (0..case.n_periods()).map(|t| -template.constraints[t].rhs).collect();
        let layout = EdLayout {
            generators: case.n_generators(),
            periods: case.n_periods(),
            segments: case.n_segments,
        };
        let merit = (0..layout.periods)
            .map(|t| {
                let mut cols: Vec<usize> = (0..layout.generators)
                    .filter(|&g| commitment.is_on(g, t))
                    .flat_map(|g| (0..layout.segments).map(move |k| layout.segment(g, t, k)))
                    .filter(|&j| template.upper[j] > 0.0)
                    .collect();
                cols.sort_by(|&a, &b| {
                    template.objective[a].total_cmp(&template.objective[b]).then(a.cmp(&b))
                });
                cols
            })
            .collect();
        Ok(DispatchModel {
            case: case.clone(),
            commitment: commitment.clone(),
            layout,
            template,
            base,
            merit,
        })
    }

    pub fn case(&self) -> &CaseDefinition {
        &self.case
    }

    pub fn commitment(&self) -> &CommitmentSchedule {
        &self.commitment
    }

    fn check_demand(&self, demand: &[f64]) -> Result<()> {
        if demand.len() != self.layout.periods {
            return Err(Error::Dimension(format!(
                "demand has {} periods, case has {}",
                demand.len(),
                self.layout.periods
            )));
        }
        if let Some(d) = demand.iter().find(|d| !d.is_finite()) {
            return Err(Error::Validation(format!("demand {d} is not finite")));
        }
        Ok(())
    }

    pub fn solve(&self, demand: &[f64]) -> Result<DispatchSolution> {
        self.check_demand(demand)?;
        let x = self.merit_order(demand);
        if self.ramps_hold(&x) {
            return Ok(self.solution(&x));
        }
        self.solve_full(demand)
    }

    /// Solves the full LP with the simplex method, skipping the merit-order
    /// shortcut.
    pub fn solve_full(&self, demand: &[f64]) -> Result<DispatchSolution> {
        self.check_demand(demand)?;
        let mut lp = self.template.clone();
        for t in 0..self.layout.periods {
            lp.constraints[t].rhs = demand[t] - self.base[t];
        }
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Optimal => Ok(self.solution(&sol.x)),
            LpStatus::Infeasible => {
                Err(Error::Infeasible("ramp limits cannot be met under this commitment".into()))
            }
            LpStatus::Unbounded => Err(Error::Solver("dispatch LP is unbounded".into())),
        }
    }

    fn merit_order(&self, demand: &[f64]) -> Vec<f64> {
        let l = self.layout;
        let mut x = vec![0.0; l.n_vars()];
        for t in 0..l.periods {
            let mut residual = demand[t] - self.base[t];
            if residual < 0.0 {
                x[l.surplus(t)] = -residual;
                continue;
            }
            for &j in &self.merit[t] {
                if residual <= 0.0 {
                    break;
                }
                let take = residual.min(self.template.upper[j]);
                x[j] = take;
                residual -= take;
            }
            x[l.shed(t)] = residual.max(0.0);
        }
        x
    }

    fn ramps_hold(&self, x: &[f64]) -> bool {
        self.template.constraints[self.layout.periods..].iter().all(|c| {
            let lhs: f64 = c.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
            lhs <= c.rhs + 1e-9 * (1.0 + c.rhs.abs())
        })
    }

    fn solution(&self, x: &[f64]) -> DispatchSolution {
        let l = self.layout;
        let periods = l.periods;
        let p = (0..l.generators)
            .map(|g| {
                let gen = &self.case.generators[g];
                (0..periods)
                    .map(|t| {
                        if self.commitment.is_on(g, t) {
                            gen.p_min + (0..l.segments).map(|k| x[l.segment(g, t, k)]).sum::<f64>()
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let q: Vec<f64> = (0..periods).map(|t| x[l.shed(t)]).collect();
        let surplus: Vec<f64> = (0..periods).map(|t| x[l.surplus(t)]).collect();
        let penalty_cost =
            self.case.shed_penalty * (q.iter().sum::<f64>() + surplus.iter().sum::<f64>());
        let mut production_cost = self.template.objective_offset;
        for g in 0..l.generators {
            for t in 0..periods {
                for k in 0..l.segments {
                    let j = l.segment(g, t, k);
                    production_cost += self.template.objective[j] * x[j];
                }
            }
        }
        DispatchSolution {
            p,
            q,
            surplus,
            production_cost,
            penalty_cost,
            total: production_cost + penalty_cost,
        }
    }
}

impl CostModel for DispatchModel {
    fn periods(&self) -> usize {
        self.layout.periods
    }

    fn cost(&self, demand: &[f64]) -> Result<f64> {
        self.solve(demand).map(|s| s.total)
    }
}

/// Solves one dispatch; prefer [`DispatchModel`] for repeated solves.
pub fn solve_ed(
    case: &CaseDefinition,
    x: &CommitmentSchedule,
    demand: &[f64],
) -> Result<DispatchSolution> {
    DispatchModel::new(case, x)?.solve(demand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::LoadBox;

    pub(crate) fn gen(id: &str, lo: f64, hi: f64, b: f64) -> GeneratorUnit {
        GeneratorUnit {
            id: id.into(),
            p_min: lo,
            p_max: hi,
            ramp_up: hi,
            ramp_down: hi,
            startup_ramp: hi,
            shutdown_ramp: hi,
            cost_a: 0.0,
            cost_b: b,
            cost_c: 0.0,
            startup_cost: 0.0,
            shutdown_cost: 0.0,
            min_up: 1,
            min_down: 1,
            initial_on: true,
            initial_power: lo,
            initial_state_duration: None,
        }
    }

    fn case(gens: Vec<GeneratorUnit>, nominal: Vec<f64>, segments: usize) -> CaseDefinition {
        let lb = LoadBox::new(
            nominal.clone(),
            vec![0.0; nominal.len()],
            nominal.iter().map(|d| d * 2.0).collect(),
        )
        .unwrap();
        CaseDefinition::new(gens, lb, 1e4, segments).unwrap()
    }

    fn ramp_gen() -> GeneratorUnit {
        let mut g = gen("g", 0.0, 10.0, 1.0);
        g.ramp_up = 2.0;
        g.ramp_down = 3.0;
        g.startup_ramp = 5.0;
        g.shutdown_ramp = 7.0;
        g
    }

    #[test]
    fn ramp_up_cases() {
        let g = ramp_gen();
        assert_eq!(ramp_up_limit(&g, true, true), 2.0);
        assert_eq!(ramp_up_limit(&g, false, true), 5.0);
        assert_eq!(ramp_up_limit(&g, true, false), 2.0 - 5.0 + 10.0);
        assert_eq!(ramp_up_limit(&g, false, false), 10.0);
    }

    #[test]
    fn ramp_down_cases() {
        let g = ramp_gen();
        assert_eq!(ramp_down_limit(&g, true, true), 3.0);
        assert_eq!(ramp_down_limit(&g, true, false), 7.0);
        assert_eq!(ramp_down_limit(&g, false, false), 10.0);
        assert_eq!(ramp_down_limit(&g, false, true), 3.0 - 7.0 + 10.0);
    }

    #[test]
    fn lp_shape_one_by_one() {
        let c = case(vec![gen("g", 0.0, 10.0, 1.0)], vec![5.0], 1);
        let lp = build_ed_lp(&c, &CommitmentSchedule::all_on(1, 1), &[5.0]).unwrap();
        assert_eq!(lp.n_vars(), 3);
        let eq = lp.constraints.iter().filter(|r| r.relation == Relation::Eq).count();
        assert_eq!(eq, 1);
        assert_eq!(lp.n_constraints() - eq, 2);
    }

    #[test]
    fn lp_shape_two_by_two() {
        let c = case(vec![gen("a", 0.0, 10.0, 1.0), gen("b", 0.0, 10.0, 2.0)], vec![5.0, 6.0], 3);
        let lp = build_ed_lp(&c, &CommitmentSchedule::all_on(2, 2), &[5.0, 6.0]).unwrap();
        let eq = lp.constraints.iter().filter(|r| r.relation == Relation::Eq).count();
        assert_eq!(eq, 2);
        assert_eq!(lp.n_constraints() - eq, 8);
        assert_eq!(lp.n_vars(), 2 * 2 * 3 + 4);
    }

    #[test]
    fn dimension_mismatch() {
        let c = case(vec![gen("g", 0.0, 10.0, 1.0)], vec![5.0], 1);
        assert!(matches!(
            build_ed_lp(&c, &CommitmentSchedule::all_on(1, 2), &[5.0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            build_ed_lp(&c, &CommitmentSchedule::all_on(1, 1), &[5.0, 1.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn all_off_forces_shedding() {
        let mut g = gen("g", 0.0, 10.0, 1.0);
        g.initial_on = false;
        g.initial_power = 0.0;
        let c = case(vec![g], vec![5.0], 2);
        let x = CommitmentSchedule::all_off(1, 1);
        let lp = build_ed_lp(&c, &x, &[5.0]).unwrap();
        assert!(lp.upper[..2].iter().all(|&u| u == 0.0));
        let sol = solve_ed(&c, &x, &[5.0]).unwrap();
        assert_eq!(sol.q, vec![5.0]);
        assert_eq!(sol.total, 5.0 * 1e4);
    }

    #[test]
    fn single_unit_balance() {
        let c = case(vec![gen("g", 0.0, 10.0, 1.0)], vec![5.0], 1);
        let x = CommitmentSchedule::all_on(1, 1);
        let sol = solve_ed(&c, &x, &[5.0]).unwrap();
        assert!((sol.p[0][0] - 5.0).abs() < 1e-9);
        assert!(sol.q[0].abs() < 1e-9);
        assert!((sol.total - 5.0).abs() < 1e-9);
        let sol = solve_ed(&c, &x, &[15.0]).unwrap();
        assert!((sol.p[0][0] - 10.0).abs() < 1e-9);
        assert!((sol.q[0] - 5.0).abs() < 1e-9);
        assert!((sol.total - (10.0 + 5.0e4)).abs() < 1e-6);
        assert_eq!(sol.surplus, vec![0.0]);
    }

    #[test]
    fn ramp_caps_second_period() {
        let mut g = gen("g", 0.0, 10.0, 1.0);
        g.ramp_up = 2.0;
        g.initial_power = 2.0;
        let c = case(vec![g], vec![2.0, 8.0], 4);
        let sol = solve_ed(&c, &CommitmentSchedule::all_on(1, 2), &[2.0, 8.0]).unwrap();
        assert!(
            (sol.p[0][0] - 2.0).abs() < 1e-9 && (sol.p[0][1] - 4.0).abs() < 1e-9,
            "{:?}",
            sol.p
        );
        assert!((sol.q[1] - 4.0).abs() < 1e-9);
        assert!((sol.total - (6.0 + 4.0e4)).abs() < 1e-6);
    }

    #[test]
    fn surplus_absorbs_min_output() {
        let c = case(vec![gen("g", 4.0, 10.0, 1.0)], vec![2.0], 2);
        let sol = solve_ed(&c, &CommitmentSchedule::all_on(1, 1), &[1.0]).unwrap();
        assert!((sol.surplus[0] - 3.0).abs() < 1e-9);
        assert!((sol.p[0][0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn impossible_shutdown_is_reported() {
        let mut g = gen("g", 5.0, 10.0, 1.0);
        g.initial_power = 10.0;
        g.shutdown_ramp = 6.0;
        let c = case(vec![g], vec![1.0], 1);
        let err = solve_ed(&c, &CommitmentSchedule::all_off(1, 1), &[1.0]).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }

    #[test]
    fn mask_order_is_lexicographic() {
        let a = CommitmentSchedule::from_mask(0b10_01, 2, 2);
        assert_eq!(a.x, vec![vec![1, 0], vec![0, 1]]);
        let mut prev: Option<CommitmentSchedule> = None;
        for m in 0..16 {
            let s = CommitmentSchedule::from_mask(m, 2, 2);
            if let Some(p) = prev {
                assert!(p.x < s.x);
            }
            prev = Some(s);
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(CommitmentSchedule::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(CommitmentSchedule::new(vec![vec![0, 2]]).is_err());
        let s = CommitmentSchedule::from_json(r#"{"x": [[1, 0, 1]]}"#).unwrap();
        assert_eq!(s.periods(), 3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn unit() -> impl Strategy<Value = GeneratorUnit> {
            (
                0.0..20.0f64,
                5.0..60.0f64,
                0.0..30.0f64,
                0.0..0.2f64,
                1.0..40.0f64,
                1.0..40.0f64,
                any::<bool>(),
            )
                .prop_map(|(lo, span, b, c, ru, rd, on)| {
                    let mut g = gen("u", lo, lo + span, b);
                    g.cost_c = c;
                    g.ramp_up = ru;
                    g.ramp_down = rd;
                    g.startup_ramp = lo.max(ru);
                    g.shutdown_ramp = lo.max(rd);
                    g.initial_on = on;
                    g.initial_power = if on { lo + span / 2.0 } else { 0.0 };
                    g
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn shortcut_matches_full_lp(
                units in prop::collection::vec(unit(), 1..4),
                demand in prop::collection::vec(0.0..150.0f64, 1..4),
                mask in any::<u64>(),
            ) {
                let units: Vec<GeneratorUnit> = units
                    .into_iter()
                    .enumerate()
                    .map(|(i, mut g)| { g.id = format!("u{i}"); g })
                    .collect();
                let (ng, nt) = (units.len(), demand.len());
                let c = case(units, demand.iter().map(|d| d + 1.0).collect(), 3);
                let x = CommitmentSchedule::from_mask(mask % (1 << (ng * nt)), ng, nt);
                let m = DispatchModel::new(&c, &x).unwrap();
                match (m.solve(&demand), m.solve_full(&demand)) {
                    (Ok(a), Ok(b)) => {
                        prop_assert!((a.total - b.total).abs() <= 1e-7 * b.total.abs().max(1.0),
                            "{} vs {}", a.total, b.total);
                    }
                    (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {}
                    (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
                }
            }
        }
    }
}
