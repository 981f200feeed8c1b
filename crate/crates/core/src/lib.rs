//! Expected generation cost for economic dispatch and unit commitment under
//! box-bounded load uncertainty, estimated with Legendre polynomial chaos
//! surrogates on Clenshaw-Curtis sparse grids and compared against plain
//! Monte Carlo.
//!
//! ```
//! use edchaos::{bundled, CommitmentSchedule, SurrogateBuilder};
//!
//! let case = bundled::case6();
//! let x = CommitmentSchedule::all_on(case.n_generators(), case.n_periods());
//! let pce = SurrogateBuilder::new(&case, &x).unwrap().build(1, 1).unwrap();
//! assert_eq!(pce.meta.node_count, 13);
//! assert!(pce.mean() > 0.0);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod case;
pub mod commitment;
pub mod dispatch;
pub mod error;
pub mod estimators;
pub mod lp;
pub mod pce;
pub mod quadrature;

pub use case::{
    linearize_cost, load_case, parse_case, CaseDefinition, GeneratorUnit, LoadBox,
    PiecewiseLinearCost,
};
pub use commitment::{
    expected_cost_of_commitment, is_feasible_commitment, solve_extensive_form, ExpectationMethod,
};
pub use dispatch::{solve_ed, CommitmentSchedule, CostModel, DispatchModel, DispatchSolution};
pub use error::{Error, Result};
pub use estimators::{
    convergence_study, cross_validate, mc_expected_cost, relative_l2_training_error,
    sample_demands, surrogate_mc, ConvergenceConfig, ConvergenceSeries, McEstimate, Truth,
};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
pub use pce::{total_degree_indices, MultiIndexSet, PCExpansion, SurrogateBuilder};
pub use quadrature::{clenshaw_curtis, integrate, smolyak_grid, SparseGrid};

/// Example cases shipped with the library.
pub mod bundled {
    use crate::case::{parse_case, CaseDefinition};

    pub const CASE6_JSON: &str = include_str!("../cases/case6.json");
    pub const CASE24_JSON: &str = include_str!("../cases/case24.json");

    /// Three generators, six periods, loads within 20% of nominal.
    pub fn case6() -> CaseDefinition {
        parse_case(CASE6_JSON, None).expect("bundled case6 is valid")
    }

    /// Ten generators, 24 periods.
    pub fn case24() -> CaseDefinition {
        parse_case(CASE24_JSON, None).expect("bundled case24 is valid")
    }

    pub fn by_name(name: &str) -> Option<CaseDefinition> {
        match name {
            "case6" => Some(case6()),
            "case24" => Some(case24()),
            _ => None,
        }
    }
}
