//! `edchaos` command-line front end.
//!
//! Exit codes: 0 success, 1 internal or solver failure (and failed
//! validation), 2 bad input, 3 demand outside the uncertainty box.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use edchaos::estimators::{cross_validate, training_error};
use edchaos::{
    bundled, convergence_study, load_case, mc_expected_cost, smolyak_grid, solve_ed, surrogate_mc,
    CaseDefinition, CommitmentSchedule, ConvergenceConfig, Error, PCExpansion, SurrogateBuilder,
    Truth,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "edchaos",
    version,
    about = "Polynomial chaos surrogates for stochastic economic dispatch"
)]
struct Cli {
    /// Worker threads for model evaluations (default: all cores).
    #[arg(long, global = true, env = "EDCHAOS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project the dispatch cost onto a Legendre basis and save the expansion.
    BuildSurrogate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the surrogate or the dispatch LP at one demand vector.
    Eval {
        #[arg(long)]
        surrogate: Option<PathBuf>,
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        commitment: Option<String>,
        /// CSV file with one value per period, or one of nominal, mid,
        /// d_min, d_max.
        #[arg(long)]
        demand: String,
        /// Print surrogate and direct values with their relative discrepancy.
        #[arg(long)]
        compare: bool,
    },
    /// Plain Monte Carlo estimate of the expected cost, printed as JSON.
    Mc {
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        commitment: Option<String>,
        /// Sample this expansion instead of solving the dispatch LP.
        #[arg(long)]
        surrogate: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// MC replicates and PCE builds against a common reference value.
    Convergence {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        mc_sizes: Vec<usize>,
        /// Comma-separated order:level pairs.
        #[arg(long, value_delimiter = ',', default_value = "1:1,2:2,2:3,3:3")]
        pce: Vec<String>,
        /// Replicates per MC size, seeded 1..=k.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 1_000_000)]
        truth_n: usize,
        #[arg(long, default_value_t = u64::MAX)]
        truth_seed: u64,
        /// Use this order:level PCE mean as the reference instead of MC.
        #[arg(long)]
        truth_pce: Option<String>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Training-grid and cross-validation errors of a saved surrogate.
    Validate {
        #[arg(long)]
        surrogate: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10_000)]
        cv_n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-4)]
        tol_l2: f64,
        #[arg(long, default_value_t = 0.005)]
        tol_cv: f64,
    },
    /// Write the nodes and weights of a Smolyak grid as CSV.
    Grid {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Case file, or a bundled case name (case6, case24).
    #[arg(long)]
    case: String,
    /// Commitment JSON file, or all-on.
    #[arg(long, default_value = "all-on")]
    commitment: String,
}

#[derive(Serialize)]
struct McJson {
    mean: f64,
    std_error: f64,
    n: usize,
    seed: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_out_of_box() {
            3
        } else {
            match root(&e) {
                Error::NotFound(_)
                | Error::Io { .. }
                | Error::Parse(_)
                | Error::Validation(_)
                | Error::Dimension(_)
                | Error::Resource(_)
                | Error::Size(_) => 2,
                Error::Range { .. } => 3,
                _ => 1,
            }
        };
        Failure { code, message: e.to_string() }
    }
}

fn root(e: &Error) -> &Error {
    match e {
        Error::AtNode { source, .. } => root(source),
        _ => e,
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn resolve_case(name: &str) -> Result<CaseDefinition, Failure> {
    let path = Path::new(name);
    if !path.exists() {
        let stem = name.strip_suffix(".json").unwrap_or(name);
        if let Some(case) = bundled::by_name(stem) {
            return Ok(case);
        }
    }
    Ok(load_case(path)?)
}

fn resolve_commitment(arg: &str, case: &CaseDefinition) -> Result<CommitmentSchedule, Failure> {
    let x = if arg == "all-on" {
        CommitmentSchedule::all_on(case.n_generators(), case.n_periods())
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| input(format!("commitment file {arg}: {e}")))?;
        CommitmentSchedule::from_json(&text)?
    };
    x.check_dims(case)?;
    Ok(x)
}

fn read_surrogate(path: &Path) -> Result<PCExpansion, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("surrogate file {}: {e}", path.display())))?;
    Ok(PCExpansion::from_json(&text)?)
}

fn parse_demand(arg: &str, load_box: &edchaos::LoadBox) -> Result<Vec<f64>, Failure> {
    let d = match arg {
        "nominal" => load_box.nominal.clone(),
        "mid" => load_box.midpoint(),
        "d_min" => load_box.d_min.clone(),
        "d_max" => load_box.d_max.clone(),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input(format!("demand file {path}: {e}")))?;
            let mut values = vec![];
            for (i, line) in text.lines().enumerate() {
                let fields: Vec<&str> =
                    line.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                let parsed: Result<Vec<f64>, _> = fields.iter().map(|s| s.parse::<f64>()).collect();
                match parsed {
                    Ok(v) => values.extend(v),
                    Err(_) if i == 0 => {} // header
                    Err(e) => {
                        return Err(input(format!("demand file {path}, line {}: {e}", i + 1)))
                    }
                }
            }
            values
        }
    };
    if d.len() != load_box.periods() {
        return Err(input(format!(
            "demand has {} values, expected {}",
            d.len(),
            load_box.periods()
        )));
    }
    Ok(d)
}

fn parse_pair(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || input(format!("expected order:level, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure { code: 1, message: format!("writing {}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    }
    match cli.command {
        Command::BuildSurrogate { model, order, level, out } => {
            let case = resolve_case(&model.case)?;
            let x = resolve_commitment(&model.commitment, &case)?;
            let start = Instant::now();
            let pce = SurrogateBuilder::new(&case, &x)?.build(order, level)?;
            let took = start.elapsed();
            write_or_print(Some(&out), &pce.to_json())?;
            for w in &pce.meta.warnings {
                eprintln!("warning: {w}");
            }
            println!("nodes {}", pce.meta.node_count);
            println!("terms {}", pce.index_set().len());
            println!("c0 {}", pce.mean());
            println!("variance {}", pce.variance());
            println!("build_seconds {:.3}", took.as_secs_f64());
        }
        Command::Eval { surrogate, case, commitment, demand, compare } => {
            let pce = surrogate.as_deref().map(read_surrogate).transpose()?;
            let case = case.as_deref().map(resolve_case).transpose()?;
            if compare && (pce.is_none() || case.is_none()) {
                return Err(input("--compare needs both --surrogate and --case"));
            }
            let direct = |case: &CaseDefinition, d: &[f64]| -> Result<f64, Failure> {
                let x = match (&commitment, pce.as_ref().and_then(|p| p.meta.commitment.clone())) {
                    (Some(arg), _) => resolve_commitment(arg, case)?,
                    (None, Some(x)) => x,
                    (None, None) => resolve_commitment("all-on", case)?,
                };
                if let Some(p) = &pce {
                    p.check_provenance(case, &x)?;
                }
                case.loads.check_contains(d)?;
                Ok(solve_ed(case, &x, d)?.total)
            };
            match (&pce, &case) {
                (Some(p), Some(c)) if compare => {
                    let d = parse_demand(&demand, p.load_box())?;
                    let s = p.surrogate_eval(&d)?;
                    let q = direct(c, &d)?;
                    println!("surrogate {s}");
                    println!("direct {q}");
                    println!("rel_discrepancy {:e}", rel(s, q));
                }
                (Some(p), _) => {
                    let d = parse_demand(&demand, p.load_box())?;
                    println!("{}", p.surrogate_eval(&d)?);
                }
                (None, Some(c)) => {
                    let d = parse_demand(&demand, &c.loads)?;
                    println!("{}", direct(c, &d)?);
                }
                (None, None) => return Err(input("eval needs --surrogate or --case")),
            }
        }
        Command::Mc { case, commitment, surrogate, n, seed } => {
            let est = match (surrogate, case) {
                (Some(path), case) => {
                    let pce = read_surrogate(&path)?;
                    if let Some(name) = case {
                        let case = resolve_case(&name)?;
                        let x =
                            resolve_commitment(commitment.as_deref().unwrap_or("all-on"), &case)?;
                        pce.check_provenance(&case, &x)?;
                    }
                    surrogate_mc(&pce, n, seed)?
                }
                (None, Some(name)) => {
                    let case = resolve_case(&name)?;
                    let x = resolve_commitment(commitment.as_deref().unwrap_or("all-on"), &case)?;
                    mc_expected_cost(&case, &x, n, seed)?
                }
                (None, None) => return Err(input("mc needs --case or --surrogate")),
            };
            let json = McJson {
                mean: est.mean,
                std_error: est.std_error,
                n: est.n_samples,
                seed: est.seed,
            };
            println!("{}", serde_json::to_string(&json).expect("estimate serializes"));
        }
        Command::Convergence {
            model,
            mc_sizes,
            pce,
            seeds,
            truth_n,
            truth_seed,
            truth_pce,
            out,
        } => {
            let case = resolve_case(&model.case)?;
            let x = resolve_commitment(&model.commitment, &case)?;
            let pce_configs = pce.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
            let truth = match truth_pce {
                Some(s) => {
                    let (order, level) = parse_pair(&s)?;
                    Truth::Pce { order, level }
                }
                None => Truth::DirectMc { n: truth_n, seed: truth_seed },
            };
            let config =
                ConvergenceConfig { mc_sizes, pce_configs, seeds: (1..=seeds).collect(), truth };
            let s = convergence_study(&case, &x, &config)?;
            let mut summary = format!("truth {} ({})\n", s.truth, s.truth_source);
            if let Some(m) = s.mc_slope {
                summary += &format!("mc_slope {m:.4}");
                if let Some((lo, hi)) = s.mc_slope_ci {
                    summary += &format!(" 95% CI [{lo:.4}, {hi:.4}]");
                }
                summary.push('\n');
            }
            if let Some(p) = s.pce_slope {
                summary += &format!("pce_slope {p:.4}\n");
            }
            match out {
                Some(path) => {
                    write_or_print(Some(&path), &s.to_csv())?;
                    print!("{summary}");
                }
                None => {
                    print!("{}", s.to_csv());
                    eprint!("{summary}");
                }
            }
        }
        Command::Validate { surrogate, model, cv_n, seed, tol_l2, tol_cv } => {
            let pce = read_surrogate(&surrogate)?;
            let case = resolve_case(&model.case)?;
            let x = resolve_commitment(&model.commitment, &case)?;
            pce.check_provenance(&case, &x)?;
            let level = pce
                .meta
                .grid_level
                .ok_or_else(|| input("surrogate does not record its grid level"))?;
            let grid = smolyak_grid(pce.dim(), level)?;
            let train = training_error(&mut SurrogateBuilder::new(&case, &x)?, &pce, &grid)?;
            let cv = cross_validate(&pce, &case, &x, cv_n, seed)?;
            let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
            let l2_ok = train.unweighted <= tol_l2;
            let cv_ok = cv.max_rel <= tol_cv;
            println!("nodes {}", grid.len());
            println!(
                "training_l2 {:e} (weighted {:e}) tol {tol_l2:e} {}",
                train.unweighted,
                train.weighted,
                verdict(l2_ok)
            );
            println!("cv_max_rel {:e} tol {tol_cv:e} {}", cv.max_rel, verdict(cv_ok));
            println!("cv_rms_rel {:e} over {} samples, seed {seed}", cv.rms_rel, cv.n);
            if !(l2_ok && cv_ok) {
                return Err(Failure { code: 1, message: "validation failed".into() });
            }
        }
        Command::Grid { dim, level, out } => {
            let grid = smolyak_grid(dim, level)?;
            write_or_print(out.as_deref(), &grid.to_csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
