//! Problem instances: generating units, the uncertain load box, and the
//! piecewise linearization of quadratic production cost.
//!
//! Case files are JSON. Periods are reported 1-based in every message, which
//! is also how the CSV load format numbers them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_SHED_PENALTY: f64 = 1.0e4;
pub const DEFAULT_SEGMENTS: usize = 10;

/// A thermal generating unit. Powers in MW, ramps in MW per period,
/// costs in $ per period with `cost_b` in $/MWh and `cost_c` in $/MW²h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorUnit {
    pub id: String,
    pub p_min: f64,
    pub p_max: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub startup_ramp: f64,
    pub shutdown_ramp: f64,
    pub cost_a: f64,
    pub cost_b: f64,
    pub cost_c: f64,
    #[serde(default)]
    pub startup_cost: f64,
    #[serde(default)]
    pub shutdown_cost: f64,
    #[serde(default = "one")]
    pub min_up: usize,
    #[serde(default = "one")]
    pub min_down: usize,
    #[serde(default)]
    pub initial_on: bool,
    #[serde(default)]
    pub initial_power: f64,
    /// Periods the unit has already spent in its initial on/off state. When
    /// absent the unit is taken to have been there long enough to satisfy
    /// any minimum up or down time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state_duration: Option<usize>,
}

fn one() -> usize {
    1
}

impl GeneratorUnit {
    /// Marginal cost of the exact quadratic at `p`.
    pub fn marginal_cost(&self, p: f64) -> f64 {
        self.cost_b + 2.0 * self.cost_c * p
    }

    /// Exact quadratic cost of a committed unit producing `p`.
    pub fn quadratic_cost(&self, p: f64) -> f64 {
        self.cost_a + self.cost_b * p + self.cost_c * p * p
    }

    /// Output at t = 0, zero when the unit starts offline.
    pub fn initial_output(&self) -> f64 {
        if self.initial_on {
            self.initial_power
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Validation(format!("generator '{}': {what}", self.id)));
        let finite = [
            self.p_min,
            self.p_max,
            self.ramp_up,
            self.ramp_down,
            self.startup_ramp,
            self.shutdown_ramp,
            self.cost_a,
            self.cost_b,
            self.cost_c,
            self.startup_cost,
            self.shutdown_cost,
            self.initial_power,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("all numeric fields must be finite");
        }
        if !(0.0 <= self.p_min && self.p_min <= self.p_max) {
            return fail("requires 0 <= p_min <= p_max");
        }
        if self.ramp_up < 0.0 || self.ramp_down < 0.0 {
            return fail("ramp rates must be non-negative");
        }
        if self.startup_ramp < 0.0 || self.shutdown_ramp < 0.0 {
            return fail("startup/shutdown ramp rates must be non-negative");
        }
        if self.cost_c < 0.0 {
            return fail("cost_c must be non-negative (convex cost)");
        }
        if self.min_up < 1 || self.min_down < 1 {
            return fail("min_up and min_down must be at least 1");
        }
        if self.initial_on
            && !(self.p_min <= self.initial_power && self.initial_power <= self.p_max)
        {
            return fail("initial_on requires p_min <= initial_power <= p_max");
        }
        Ok(())
    }
}

/// Per-period nominal load and the hyper-rectangle `[d_min, d_max]` it may
/// range over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadBox {
    pub nominal: Vec<f64>,
    pub d_min: Vec<f64>,
    pub d_max: Vec<f64>,
}

impl LoadBox {
    pub fn new(nominal: Vec<f64>, d_min: Vec<f64>, d_max: Vec<f64>) -> Result<Self> {
        let b = LoadBox { nominal, d_min, d_max };
        b.validate()?;
        Ok(b)
    }

    /// Box of `nominal * (1 - fraction) ..= nominal * (1 + fraction)`.
    pub fn from_fraction(nominal: Vec<f64>, fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::Validation(format!(
                "uncertainty_fraction {fraction} must lie in [0, 1]"
            )));
        }
        let d_min = nominal.iter().map(|d| d * (1.0 - fraction)).collect();
        let d_max = nominal.iter().map(|d| d * (1.0 + fraction)).collect();
        LoadBox::new(nominal, d_min, d_max)
    }

    /// A degenerate box pinned at `nominal`.
    pub fn fixed(nominal: Vec<f64>) -> Result<Self> {
        LoadBox::new(nominal.clone(), nominal.clone(), nominal)
    }

    pub fn periods(&self) -> usize {
        self.nominal.len()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.d_min.iter().zip(&self.d_max).map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.d_min.iter().zip(&self.d_max).all(|(lo, hi)| lo == hi)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nominal.len();
        if n == 0 {
            return Err(Error::Validation("load box needs at least one period".into()));
        }
        if self.d_min.len() != n || self.d_max.len() != n {
            return Err(Error::Validation(format!(
                "load vectors disagree in length: nominal {n}, d_min {}, d_max {}",
                self.d_min.len(),
                self.d_max.len()
            )));
        }
        for t in 0..n {
            let (lo, mid, hi) = (self.d_min[t], self.nominal[t], self.d_max[t]);
            if !(lo.is_finite() && mid.is_finite() && hi.is_finite()) {
                return Err(Error::Validation(format!("period {}: non-finite load", t + 1)));
            }
            if lo > hi {
                return Err(Error::Validation(format!(
                    "period {}: d_min {lo} exceeds d_max {hi}",
                    t + 1
                )));
            }
            if !(0.0 <= lo && lo <= mid && mid <= hi) {
                return Err(Error::Validation(format!(
                    "period {}: requires 0 <= d_min <= nominal <= d_max, got {lo} / {mid} / {hi}",
                    t + 1
                )));
            }
        }
        Ok(())
    }

    /// Checks that `demand` lies in the closed box, naming the first
    /// offending period.
    pub fn check_contains(&self, demand: &[f64]) -> Result<()> {
        if demand.len() != self.periods() {
            return Err(Error::Dimension(format!(
                "demand has {} periods, box has {}",
                demand.len(),
                self.periods()
            )));
        }
        for (t, &d) in demand.iter().enumerate() {
            if !(self.d_min[t] <= d && d <= self.d_max[t]) {
                return Err(Error::OutOfBox {
                    period: t + 1,
                    message: format!(
                        "demand {d} outside load box [{}, {}]",
                        self.d_min[t], self.d_max[t]
                    ),
                });
            }
        }
        Ok(())
    }

    /// Reads the CSV load format: one row per period with columns
    /// `t,nominal,d_min,d_max`.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            t: usize,
            nominal: f64,
            d_min: f64,
            d_max: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let (mut nominal, mut d_min, mut d_max) = (vec![], vec![], vec![]);
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Parse(format!("load csv: {e}")))?;
            if row.t != i + 1 {
                return Err(Error::Parse(format!(
                    "load csv: expected t = {} on row {}, found {}",
                    i + 1,
                    i + 1,
                    row.t
                )));
            }
            nominal.push(row.nominal);
            d_min.push(row.d_min);
            d_max.push(row.d_max);
        }
        LoadBox::new(nominal, d_min, d_max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,nominal,d_min,d_max\n");
        for t in 0..self.periods() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                t + 1,
                self.nominal[t],
                self.d_min[t],
                self.d_max[t]
            ));
        }
        out
    }
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseDefinition {
    pub generators: Vec<GeneratorUnit>,
    pub loads: LoadBox,
    pub shed_penalty: f64,
    pub n_segments: usize,
}

impl CaseDefinition {
    pub fn new(
        generators: Vec<GeneratorUnit>,
        loads: LoadBox,
        shed_penalty: f64,
        n_segments: usize,
    ) -> Result<Self> {
        let case = CaseDefinition { generators, loads, shed_penalty, n_segments };
        case.validate()?;
        Ok(case)
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn n_periods(&self) -> usize {
        self.loads.periods()
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(Error::Validation("case has no generators".into()));
        }
        for g in &self.generators {
            g.validate()?;
        }
        for (i, g) in self.generators.iter().enumerate() {
            if self.generators[..i].iter().any(|h| h.id == g.id) {
                return Err(Error::Validation(format!("duplicate generator id '{}'", g.id)));
            }
        }
        self.loads.validate()?;
        if self.n_segments < 1 {
            return Err(Error::Validation("n_segments must be at least 1".into()));
        }
        let worst = self
            .generators
            .iter()
            .map(|g| (g, g.marginal_cost(g.p_max)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if !(self.shed_penalty.is_finite() && self.shed_penalty > worst.1) {
            return Err(Error::Validation(format!(
                "shed_penalty {} must exceed the largest marginal cost at p_max ({} for generator '{}')",
                self.shed_penalty, worst.1, worst.0.id
            )));
        }
        Ok(())
    }

    /// Piecewise-linear costs for every generator at the case's segment count.
    pub fn linearized_costs(&self) -> Vec<PiecewiseLinearCost> {
        self.generators.iter().map(|g| linearize_cost(g, self.n_segments)).collect()
    }

    /// Same case with a different uncertainty box.
    pub fn with_loads(&self, loads: LoadBox) -> Result<Self> {
        CaseDefinition::new(self.generators.clone(), loads, self.shed_penalty, self.n_segments)
    }

    /// Canonical JSON; explicit `d_min`/`d_max` are always written.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("case serializes")
    }

    /// Hex SHA-256 of the canonical compact JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.to_file()).expect("case serializes");
        hex_digest(json.as_bytes())
    }

    fn to_file(&self) -> CaseFile {
        CaseFile {
            generators: self.generators.clone(),
            loads: LoadsFile {
                periods: Some(self.n_periods()),
                nominal: Some(self.loads.nominal.clone()),
                d_min: Some(self.loads.d_min.clone()),
                d_max: Some(self.loads.d_max.clone()),
                uncertainty_fraction: None,
                csv: None,
            },
            shed_penalty: Some(self.shed_penalty),
            n_segments: Some(self.n_segments),
        }
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    generators: Vec<GeneratorUnit>,
    loads: LoadsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shed_penalty: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_segments: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    periods: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nominal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_min: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_max: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uncertainty_fraction: Option<f64>,
    /// Path of a `t,nominal,d_min,d_max` CSV, relative to the case file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    csv: Option<PathBuf>,
}

impl LoadsFile {
    fn resolve(self, base: Option<&Path>) -> Result<LoadBox> {
        let loads = if let Some(csv_path) = self.csv {
            if self.nominal.is_some() || self.d_min.is_some() || self.d_max.is_some() {
                return Err(Error::Parse(
                    "loads: `csv` cannot be combined with inline load vectors".into(),
                ));
            }
            let path = match base {
                Some(dir) if csv_path.is_relative() => dir.join(&csv_path),
                _ => csv_path,
            };
            let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
            LoadBox::from_csv_reader(file)?
        } else {
            let nominal =
                self.nominal.ok_or_else(|| Error::Parse("loads: missing `nominal`".into()))?;
            match (self.d_min, self.d_max, self.uncertainty_fraction) {
                (Some(lo), Some(hi), None) => LoadBox::new(nominal, lo, hi)?,
                (None, None, Some(f)) => LoadBox::from_fraction(nominal, f)?,
                (None, None, None) => LoadBox::fixed(nominal)?,
                _ => {
                    return Err(Error::Parse(
                        "loads: give either both `d_min` and `d_max` or `uncertainty_fraction`"
                            .into(),
                    ))
                }
            }
        };
        if let Some(p) = self.periods {
            if p != loads.periods() {
                return Err(Error::Validation(format!(
                    "loads: `periods` is {p} but {} load values were given",
                    loads.periods()
                )));
            }
        }
        Ok(loads)
    }
}

/// Parses and validates a case from JSON text. Relative CSV load paths are
/// resolved against `base_dir` (or the working directory when `None`).
pub fn parse_case(json: &str, base_dir: Option<&Path>) -> Result<CaseDefinition> {
    let file: CaseFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let loads = file.loads.resolve(base_dir)?;
    CaseDefinition::new(
        file.generators,
        loads,
        file.shed_penalty.unwrap_or(DEFAULT_SHED_PENALTY),
        file.n_segments.unwrap_or(DEFAULT_SEGMENTS),
    )
}

pub fn load_case(path: impl AsRef<Path>) -> Result<CaseDefinition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_case(&text, path.parent())
}

/// Convex piecewise-linear production cost of one generator.
///
/// The committed cost at output `p` is `fixed_cost` plus the segment
/// integral from `breakpoints[0]` (= `p_min`) up to `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearCost {
    pub fixed_cost: f64,
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl PiecewiseLinearCost {
    pub fn p_min(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn p_max(&self) -> f64 {
        *self.breakpoints.last().expect("at least two breakpoints")
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }
}

/// Equal-width secant linearization of `b p + c p²` on `[p_min, p_max]`.
pub fn linearize_cost(g: &GeneratorUnit, n_segments: usize) -> PiecewiseLinearCost {
    assert!(n_segments >= 1, "n_segments must be at least 1");
    let (lo, hi) = (g.p_min, g.p_max);
    let width = (hi - lo) / n_segments as f64;
    let mut breakpoints: Vec<f64> = (0..n_segments).map(|i| lo + width * i as f64).collect();
    breakpoints.push(hi);
    let variable = |p: f64| g.cost_b * p + g.cost_c * p * p;
    let slopes = breakpoints
        .windows(2)
        .map(|w| {
            if w[1] > w[0] {
                // b + c (p0 + p1) is the exact secant of b p + c p²
                g.cost_b + g.cost_c * (w[0] + w[1])
            } else {
                g.marginal_cost(w[0])
            }
        })
        .collect();
    PiecewiseLinearCost { fixed_cost: g.cost_a + variable(lo), breakpoints, slopes }
}

pub fn evaluate_cost(plc: &PiecewiseLinearCost, p: f64, committed: bool) -> Result<f64> {
    if !committed {
        if p != 0.0 {
            return Err(Error::Range { value: p, lo: 0.0, hi: 0.0 });
        }
        return Ok(0.0);
    }
    let (lo, hi) = (plc.p_min(), plc.p_max());
    if !(lo <= p && p <= hi) {
        return Err(Error::Range { value: p, lo, hi });
    }
    let mut cost = plc.fixed_cost;
    for (w, slope) in plc.breakpoints.windows(2).zip(&plc.slopes) {
        if p <= w[0] {
            break;
        }
        cost += slope * (p.min(w[1]) - w[0]);
    }
    Ok(cost)
}
