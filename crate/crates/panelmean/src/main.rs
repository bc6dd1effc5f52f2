//! Command-line surface: `estimate`, `predict`, `recommend`, `plan`,
//! `simulate`, `validate`.
//!
//! Every command is a pure function of its input files, flags, and seed;
//! each output file gets a `<output>.manifest.json` sidecar recording the
//! run. Exit codes: 0 success, 2 input error, 3 degenerate design,
//! 4 calibration failure (`validate` only).

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use panelmean::allocation::{
    benchmark_variance, recommend_strategy, scenario_floor, strategy_variance, AllocationError,
    Strategy, VarianceProfile,
};
use panelmean::assignment::{all_judges_plan, cyclic_plan, random_plan, AssignmentPlan};
use panelmean::estimator::{estimate_components, judge_f_test, EstimatorError, FTestResult,
    VarianceComponents};
use panelmean::manifest::RunManifest;
use panelmean::montecarlo::{
    simulate_tensor, variance_curve, MonteCarloError, SimulationConfig, VarianceCurve,
};
use panelmean::score::{Design, IngestError, ScoreTensor};

#[derive(Parser)]
#[command(
    name = "panelmean",
    version,
    about = "Variance-aware planning for multi-judge evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate variance components and the judge effect from a score file.
    Estimate(EstimateArgs),
    /// Predict strategy variances over a budget grid from component values.
    Predict(PredictArgs),
    /// Rank the allocation strategies at one budget.
    Recommend(RecommendArgs),
    /// Emit a concrete judge-assignment plan.
    Plan(PlanArgs),
    /// Draw a synthetic score file from the additive model.
    Simulate(SimulateArgs),
    /// Check closed-form predictions against the subsampling harness.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Score file (CSV with scenario_id,generation_id,judge_id,score or a
    /// JSON record array).
    #[arg(long)]
    scores: PathBuf,
    /// Judge pool size; defaults to the number of judges in the file.
    #[arg(long)]
    ktot: Option<usize>,
    /// Operating point "m,K" for the contribution table.
    #[arg(long, default_value = "1,1", value_parser = parse_operating_point)]
    operating_point: (usize, usize),
    #[arg(long, default_value_t = f64::NEG_INFINITY)]
    scale_min: f64,
    #[arg(long, default_value_t = f64::INFINITY)]
    scale_max: f64,
    /// Output JSON path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Component JSON: either `estimate` output or a bare profile object
    /// with sigma2_alpha/sigma2_beta/sigma2_gamma/sigma2_eps.
    #[arg(long)]
    components: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    ktot: usize,
    /// Comma-separated per-scenario budgets.
    #[arg(long, value_delimiter = ',', required = true)]
    budgets: Vec<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RecommendArgs {
    #[arg(long)]
    components: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    ktot: usize,
    #[arg(long)]
    budget: usize,
    /// Output JSON path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long)]
    ktot: usize,
    /// cyclic | random | all-judges
    #[arg(long)]
    strategy: Strategy,
    /// Required for cyclic and random plans.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; `.json` emits the full plan object, anything else a
    /// scenario_id,generation_id,judge_id CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation config JSON (see the book's simulation chapter).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output score CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Score CSV containing the full judge panel.
    #[arg(long, conflicts_with = "config")]
    scores: Option<PathBuf>,
    /// Simulation config JSON to generate the tensor instead.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    budgets: Vec<usize>,
    /// Subsampling repetitions per (strategy, budget) point.
    #[arg(long, default_value_t = 5000)]
    reps: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = f64::NEG_INFINITY)]
    scale_min: f64,
    #[arg(long, default_value_t = f64::INFINITY)]
    scale_max: f64,
    /// Output CSV path; the pass/fail summary lands next to it as
    /// `<out>.summary.json`.
    #[arg(long)]
    out: PathBuf,
}

fn parse_operating_point(s: &str) -> Result<(usize, usize), String> {
    let (m, k) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"m,K\", got {s:?}"))?;
    let m = m.trim().parse().map_err(|e| format!("bad m: {e}"))?;
    let k = k.trim().parse().map_err(|e| format!("bad K: {e}"))?;
    if m == 0 || k == 0 {
        return Err("operating point needs m >= 1 and K >= 1".into());
    }
    Ok((m, k))
}

/// Error wrapper that knows its process exit code.
#[derive(Debug)]
enum CliError {
    Input(String),
    Design(String),
    Calibration(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Design(msg) => write!(f, "design error: {msg}"),
            CliError::Calibration(msg) => write!(f, "calibration failure: {msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Design(_) => 3,
            CliError::Calibration(_) => 4,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        CliError::Design(e.to_string())
    }
}

impl From<AllocationError> for CliError {
    fn from(e: AllocationError) -> Self {
        match e {
            AllocationError::IndeterminateGeneration | AllocationError::NegativeComponent(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Design(e.to_string()),
        }
    }
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        match e {
            MonteCarloError::InvalidConfig(_) | MonteCarloError::TooFewReps(_) => {
                CliError::Input(e.to_string())
            }
            MonteCarloError::Ingest(inner) => CliError::Input(inner.to_string()),
            _ => CliError::Design(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("panelmean: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Recommend(args) => cmd_recommend(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn read_tensor(path: &Path, scale_min: f64, scale_max: f64) -> Result<ScoreTensor, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let tensor = if path.extension().is_some_and(|ext| ext == "json") {
        ScoreTensor::read_json(file, scale_min, scale_max)?
    } else {
        ScoreTensor::read_csv(file, scale_min, scale_max)?
    };
    Ok(tensor)
}

/// Accepts `estimate` output, a bare VarianceComponents object, or a bare
/// profile object.
fn read_profile(path: &Path) -> Result<VarianceProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let candidate = value.get("components").unwrap_or(&value);
    if let Ok(components) = serde_json::from_value::<VarianceComponents>(candidate.clone()) {
        return Ok(components.profile()?);
    }
    let profile: VarianceProfile = serde_json::from_value(candidate.clone())
        .map_err(|e| CliError::Input(format!("{}: not a component file: {e}", path.display())))?;
    profile.validate()?;
    Ok(profile)
}

#[derive(Serialize)]
struct ContributionReport {
    n: usize,
    m: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "K_tot")]
    k_tot: usize,
    scenario: f64,
    generation: Option<f64>,
    judge: f64,
    residual: f64,
    total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn contribution_report(
    components: &VarianceComponents,
    n: usize,
    m_op: usize,
    k_op: usize,
    k_tot: usize,
) -> Result<ContributionReport, CliError> {
    let design = Design::new(n, m_op, k_op, k_tot)
        .map_err(|e| CliError::Design(e.to_string()))?;
    match components.profile() {
        Ok(profile) => {
            let b = benchmark_variance(&profile, &design)?;
            Ok(ContributionReport {
                n,
                m: m_op,
                k: k_op,
                k_tot,
                scenario: b.scenario,
                generation: Some(b.generation),
                judge: b.judge,
                residual: b.residual,
                total: Some(b.total),
                note: None,
            })
        }
        Err(AllocationError::IndeterminateGeneration) => {
            // Single-generation fit: the scenario estimate is an upper bound
            // that already absorbs the generation component.
            let profile = VarianceProfile::new(
                components.sigma2_alpha,
                0.0,
                components.sigma2_gamma,
                components.sigma2_eps,
            )?;
            let b = benchmark_variance(&profile, &design)?;
            Ok(ContributionReport {
                n,
                m: m_op,
                k: k_op,
                k_tot,
                scenario: b.scenario,
                generation: None,
                judge: b.judge,
                residual: b.residual,
                total: None,
                note: Some(
                    "generation variance indeterminate at m = 1; the scenario term absorbs it"
                        .into(),
                ),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let tensor = read_tensor(&args.scores, args.scale_min, args.scale_max)?;
    let k_tot = args.ktot.unwrap_or_else(|| tensor.k());
    let components = estimate_components(&tensor, k_tot)?;
    // Constant-after-centering data has no residual; report the fit without
    // an F statistic instead of failing the whole command.
    let f_test = match judge_f_test(&tensor) {
        Ok(f) => Some(f),
        Err(EstimatorError::ZeroResidual) => None,
        Err(e) => return Err(e.into()),
    };
    let (m_op, k_op) = args.operating_point;
    let contribution = contribution_report(&components, tensor.n(), m_op, k_op, k_tot)?;

    print_estimate_tables(&components, f_test.as_ref(), &contribution);

    let output = json!({
        "components": components,
        "f_test": f_test,
        "contribution": contribution,
    });
    write_json_file(&args.out, &output)?;
    let manifest = RunManifest::new(
        "estimate",
        json!({
            "scores": args.scores.display().to_string(),
            "ktot": k_tot,
            "operating_point": {"m": m_op, "K": k_op},
            "scale_min": args.scale_min,
            "scale_max": args.scale_max,
            "out": args.out.display().to_string(),
        }),
        Some(&args.scores),
        None,
    )?;
    manifest.write_alongside(&args.out)?;
    Ok(())
}

fn print_estimate_tables(
    components: &VarianceComponents,
    f_test: Option<&FTestResult>,
    contribution: &ContributionReport,
) {
    println!("per-observation variance components");
    println!("  mu_hat       {:>12.6}", components.mu_hat);
    println!("  sigma2_alpha {:>12.6}", components.sigma2_alpha);
    match components.sigma2_beta {
        Some(b) => println!("  sigma2_beta  {b:>12.6}"),
        None => println!("  sigma2_beta  indeterminate (m = 1)"),
    }
    println!("  sigma2_gamma {:>12.6}", components.sigma2_gamma);
    println!("  sigma2_eps   {:>12.6}", components.sigma2_eps);
    if !components.truncated.is_empty() {
        let names: Vec<String> = components
            .truncated
            .iter()
            .map(|c| serde_json::to_value(c).unwrap().as_str().unwrap().to_string())
            .collect();
        println!("  truncated at zero: {}", names.join(", "));
    }
    println!("judge offsets (gamma_hat)");
    for (id, g) in components.gamma_hat.iter().enumerate() {
        println!("  judge {id:>3} {g:>12.6}");
    }
    match f_test {
        Some(f_test) => println!(
            "judge effect: F({}, {}) = {:.3}, p = {:.3e}",
            f_test.df1, f_test.df2, f_test.f, f_test.p_value
        ),
        None => println!("judge effect: undefined (no residual variation)"),
    }
    println!(
        "contribution to Var(benchmark mean) at n={}, m={}, K={} (pool {})",
        contribution.n, contribution.m, contribution.k, contribution.k_tot
    );
    println!("  scenario   {:>14.6e}", contribution.scenario);
    match contribution.generation {
        Some(g) => println!("  generation {g:>14.6e}"),
        None => println!("  generation indeterminate (m = 1 fit)"),
    }
    println!("  judge      {:>14.6e}", contribution.judge);
    println!("  residual   {:>14.6e}", contribution.residual);
    if let Some(total) = contribution.total {
        println!("  total      {total:>14.6e}");
    }
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let profile = read_profile(&args.components)?;
    if args.n == 0 || args.ktot == 0 {
        return Err(CliError::Input("--n and --ktot must be at least 1".into()));
    }
    let mut writer = csv::Writer::from_path(&args.out)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    writer.write_record(["strategy", "B", "variance_predicted", "note"])?;
    for strategy in Strategy::ALL {
        for &budget in &args.budgets {
            match strategy_variance(strategy, &profile, args.n, budget, args.ktot) {
                Ok(v) => writer.write_record([
                    strategy.name(),
                    &budget.to_string(),
                    &v.variance.to_string(),
                    "",
                ])?,
                Err(AllocationError::IndivisibleBudget { .. }) => writer.write_record([
                    strategy.name(),
                    &budget.to_string(),
                    "",
                    &format!("skipped: budget not divisible by k_tot={}", args.ktot),
                ])?,
                Err(e) => return Err(e.into()),
            }
        }
    }
    writer.flush().map_err(|e| CliError::Input(e.to_string()))?;
    println!(
        "scenario floor sigma2_alpha/n = {:.6e} (add to every row for the total)",
        scenario_floor(&profile, args.n)
    );
    let manifest = RunManifest::new(
        "predict",
        json!({
            "components": args.components.display().to_string(),
            "n": args.n,
            "ktot": args.ktot,
            "budgets": args.budgets,
            "out": args.out.display().to_string(),
        }),
        Some(&args.components),
        None,
    )?;
    manifest.write_alongside(&args.out)?;
    Ok(())
}

fn cmd_recommend(args: RecommendArgs) -> Result<(), CliError> {
    let profile = read_profile(&args.components)?;
    let recommendation = recommend_strategy(&profile, args.n, args.budget, args.ktot)?;
    println!(
        "ranking: {} (ratio {}, threshold {})",
        recommendation
            .ranking
            .iter()
            .map(|s| s.name())
            .collect::<Vec<_>>()
            .join(" > "),
        if recommendation.ratio.is_finite() {
            format!("{:.3}", recommendation.ratio)
        } else {
            "+inf".to_string()
        },
        recommendation.threshold
    );
    println!(
        "scenario floor sigma2_alpha/n = {:.6e}",
        scenario_floor(&profile, args.n)
    );
    write_json_file(&args.out, &recommendation)?;
    let manifest = RunManifest::new(
        "recommend",
        json!({
            "components": args.components.display().to_string(),
            "n": args.n,
            "ktot": args.ktot,
            "budget": args.budget,
            "out": args.out.display().to_string(),
        }),
        Some(&args.components),
        None,
    )?;
    manifest.write_alongside(&args.out)?;
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> Result<(), CliError> {
    if args.n == 0 || args.m == 0 || args.ktot == 0 {
        return Err(CliError::Input("--n, --m, and --ktot must be at least 1".into()));
    }
    let plan = match args.strategy {
        Strategy::AllJudges => all_judges_plan(args.n, args.m, args.ktot),
        Strategy::RandomSingle => {
            let seed = args.seed.ok_or_else(|| {
                CliError::Input("random plans require an explicit --seed".into())
            })?;
            random_plan(args.n, args.m, args.ktot, seed)
        }
        Strategy::Cyclic => {
            let seed = args.seed.ok_or_else(|| {
                CliError::Input("cyclic plans require an explicit --seed".into())
            })?;
            cyclic_plan(args.n, args.m, args.ktot, seed)
        }
    };
    if args.out.extension().is_some_and(|ext| ext == "json") {
        write_json_file(&args.out, &plan)?;
    } else {
        write_plan_csv(&args.out, &plan)?;
    }
    println!(
        "{} plan: {} calls, per-judge counts {:?}, max imbalance {}",
        plan.strategy,
        plan.total_calls(),
        plan.counts,
        plan.max_imbalance
    );
    let manifest = RunManifest::new(
        "plan",
        json!({
            "n": args.n,
            "m": args.m,
            "ktot": args.ktot,
            "strategy": plan.strategy,
            "out": args.out.display().to_string(),
        }),
        None,
        plan.seed,
    )?;
    manifest.write_alongside(&args.out)?;
    Ok(())
}

fn write_plan_csv(path: &Path, plan: &AssignmentPlan) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    writer.write_record(["scenario_id", "generation_id", "judge_id"])?;
    for &(i, j, l) in &plan.cells {
        writer.write_record([&i.to_string(), &j.to_string(), &l.to_string()])?;
    }
    writer.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let mut config: SimulationConfig = serde_json::from_str(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let tensor = simulate_tensor(&config)?;
    tensor.write_csv_path(&args.out)?;
    println!(
        "simulated {} scenarios x {} generations x {} judges -> {}",
        tensor.n(),
        tensor.m(),
        tensor.k(),
        args.out.display()
    );
    let manifest = RunManifest::new(
        "simulate",
        json!({
            "config": serde_json::to_value(&config)?,
            "out": args.out.display().to_string(),
        }),
        Some(&args.config),
        Some(config.seed),
    )?;
    manifest.write_alongside(&args.out)?;
    Ok(())
}

#[derive(Serialize)]
struct CalibrationCheck {
    name: String,
    strategy: Option<Strategy>,
    #[serde(rename = "B")]
    budget: usize,
    pass: bool,
    detail: String,
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let (tensor, input_path, config_json) = match (&args.scores, &args.config) {
        (Some(path), None) => (
            read_tensor(path, args.scale_min, args.scale_max)?,
            Some(path.clone()),
            None,
        ),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let config: SimulationConfig = serde_json::from_str(&text)?;
            (
                simulate_tensor(&config)?,
                Some(path.clone()),
                Some(serde_json::to_value(&config)?),
            )
        }
        _ => {
            return Err(CliError::Input(
                "validate needs exactly one of --scores or --config".into(),
            ))
        }
    };

    let curve = variance_curve(&tensor, &args.budgets, args.reps, args.seed)?;
    write_curve_csv(&args.out, &curve)?;

    let checks = calibration_checks(&curve);
    let passed = checks.iter().all(|c| c.pass);
    let summary = json!({
        "passed": passed,
        "reps": args.reps,
        "seed": args.seed,
        "checks": checks,
        "skipped": curve.skipped,
    });
    let summary_path = summary_path_for(&args.out);
    write_json_file(&summary_path, &summary)?;

    for check in &checks {
        println!(
            "{} B={} {}: {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.budget,
            check.name,
            check.detail
        );
    }

    let manifest = RunManifest::new(
        "validate",
        json!({
            "scores": args.scores.as_ref().map(|p| p.display().to_string()),
            "config": config_json,
            "budgets": args.budgets,
            "reps": args.reps,
            "out": args.out.display().to_string(),
        }),
        input_path.as_deref(),
        Some(args.seed),
    )?;
    manifest.write_alongside(&args.out)?;
    manifest.write_alongside(&summary_path)?;

    if passed {
        Ok(())
    } else {
        Err(CliError::Calibration(format!(
            "{} of {} checks failed; see {}",
            checks.iter().filter(|c| !c.pass).count(),
            checks.len(),
            summary_path.display()
        )))
    }
}

fn summary_path_for(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".summary.json");
    PathBuf::from(name)
}

fn write_curve_csv(path: &Path, curve: &VarianceCurve) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    writer.write_record([
        "strategy",
        "B",
        "variance_empirical",
        "variance_predicted",
        "stderr",
    ])?;
    for r in &curve.results {
        writer.write_record([
            r.strategy.name(),
            &r.budget.to_string(),
            &r.empirical_variance.to_string(),
            &r.predicted_variance.to_string(),
            &r.standard_error.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}

/// The harness's own calibration gates: every point must sit within four
/// standard errors of its exact prediction, and cycling must not lose to
/// either alternative by more than two standard errors at any budget.
fn calibration_checks(curve: &VarianceCurve) -> Vec<CalibrationCheck> {
    let mut checks = Vec::new();
    for r in &curve.results {
        let gap = (r.empirical_variance - r.predicted_variance).abs();
        checks.push(CalibrationCheck {
            name: "empirical within 4 SE of pool prediction".into(),
            strategy: Some(r.strategy),
            budget: r.budget,
            pass: gap <= 4.0 * r.standard_error,
            detail: format!(
                "empirical {:.6e}, predicted {:.6e}, |diff| {:.3e}, SE {:.3e}",
                r.empirical_variance, r.predicted_variance, gap, r.standard_error
            ),
        });
    }
    let budgets: std::collections::BTreeSet<usize> =
        curve.results.iter().map(|r| r.budget).collect();
    for budget in budgets {
        let find = |s: Strategy| {
            curve
                .results
                .iter()
                .find(|r| r.strategy == s && r.budget == budget)
        };
        let (Some(cyclic), others) = (
            find(Strategy::Cyclic),
            [find(Strategy::AllJudges), find(Strategy::RandomSingle)],
        ) else {
            continue;
        };
        let Some(best_other) = others
            .into_iter()
            .flatten()
            .min_by(|a, b| a.empirical_variance.total_cmp(&b.empirical_variance))
        else {
            continue;
        };
        let slack = 2.0
            * (cyclic.standard_error.powi(2) + best_other.standard_error.powi(2)).sqrt();
        checks.push(CalibrationCheck {
            name: "cyclic no worse than alternatives (2 SE slack)".into(),
            strategy: None,
            budget,
            pass: cyclic.empirical_variance <= best_other.empirical_variance + slack,
            detail: format!(
                "cyclic {:.6e} vs best alternative {:.6e} ({})",
                cyclic.empirical_variance,
                best_other.empirical_variance,
                best_other.strategy
            ),
        });
    }
    checks
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let json = serde_json::to_string_pretty(value)?;
    file.write_all(json.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}
