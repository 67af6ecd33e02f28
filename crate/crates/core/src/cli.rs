//! The `fitkit` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or flag error, 2 data or parse error,
//! 3 no model converged (the report is still written), 4 domain error while
//! evaluating a curve. Diagnostics go to standard error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::data::TimeSeries;
use crate::io::{self, DatasetInfo, IoError, Report, ReportEntry};
use crate::metrics::rank_models;
use crate::models::{ModelError, ModelId};
use crate::scenarios::{self, NoiseConfig, Scenario, ScenarioError};
use crate::solver::{multi_start_fit, FitError, FitOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fitkit",
    version,
    about = "Generate, fit and rank time-series models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a closed-form scenario on a grid, optionally with Gaussian noise.
    Generate(GenerateArgs),
    /// Fit one model to a CSV series.
    Fit(FitArgs),
    /// Fit several models to one series and rank them.
    Compare(CompareArgs),
    /// Evaluate a model with given parameters on a grid.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_parser = Scenario::NAMES)]
    scenario: String,
    /// Built-in preset name or path to a JSON configuration.
    #[arg(long)]
    preset: String,
    /// `start:end:count` with count the number of points.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    #[arg(long, default_value_t = 0.0)]
    noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = FitOptions::default().starts)]
    starts: usize,
    #[arg(long, default_value_t = FitOptions::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = FitOptions::default().max_iterations)]
    max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> FitOptions {
        FitOptions {
            starts: self.starts,
            seed: self.seed,
            max_iterations: self.max_iter,
            ..FitOptions::default()
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_parser = parse_model)]
    model: ModelId,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output report (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated model ids, or `all`.
    #[arg(long, value_parser = parse_models)]
    models: ModelList,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory receiving one `<model>.csv` of fitted values per model.
    #[arg(long)]
    curves_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_parser = parse_model)]
    model: ModelId,
    /// Inline JSON object or path to a JSON file.
    #[arg(long)]
    params: String,
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

#[derive(Debug, Clone)]
struct ModelList(Vec<ModelId>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    io::parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    s.parse().map_err(|e: ModelError| e.to_string())
}

fn parse_models(s: &str) -> Result<ModelList, String> {
    if s.trim() == "all" {
        return Ok(ModelList(ModelId::ALL.to_vec()));
    }
    let mut ids = Vec::new();
    for part in s.split(',') {
        let id = parse_model(part.trim())?;
        if ids.contains(&id) {
            return Err(format!("model `{id}` listed twice"));
        }
        ids.push(id);
    }
    Ok(ModelList(ids))
}

/// A failed command: the exit code plus an optional message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn io_failure(e: IoError) -> Failure {
    let code = match &e {
        IoError::Model(m) if m.is_domain() => EXIT_DOMAIN,
        IoError::Scenario(s) if is_scenario_domain(s) => EXIT_DOMAIN,
        _ => EXIT_DATA,
    };
    Failure::new(code, e.to_string())
}

fn is_scenario_domain(e: &ScenarioError) -> bool {
    matches!(
        e,
        ScenarioError::Pole { .. } | ScenarioError::NonFinite { .. }
    )
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Fit(a) => fit(a),
        Command::Compare(a) => compare(a),
        Command::Eval(a) => eval(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("fitkit: {}", f.message);
            }
            f.code
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_DATA, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(name: &str, preset: &str) -> Result<Scenario, Failure> {
    let json = match scenarios::preset(preset) {
        Some(p) => {
            if Scenario::config_kind(name) != Some(p.kind) {
                return Err(Failure::new(
                    EXIT_USAGE,
                    format!("preset `{preset}` does not configure scenario `{name}`"),
                ));
            }
            p.json.to_string()
        }
        None => fs::read_to_string(preset)
            .map_err(|e| Failure::new(EXIT_DATA, format!("cannot read preset `{preset}`: {e}")))?,
    };
    Scenario::from_json(name, &json)
        .map_err(|e| Failure::new(EXIT_DATA, format!("preset `{preset}`: {e}")))
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&a.scenario, &a.preset)?;
    let noise = NoiseConfig {
        sd: a.noise_sd,
        seed: a.seed,
    };
    let series = scenarios::generate(&scenario, &a.grid.0, noise).map_err(|e| {
        let code = if is_scenario_domain(&e) {
            EXIT_DOMAIN
        } else {
            EXIT_DATA
        };
        Failure::new(code, e.to_string())
    })?;
    write_output(a.out.as_deref(), &io::write_series_csv(&series))
}

fn load_series(path: &Path) -> Result<TimeSeries, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| Failure::new(EXIT_DATA, format!("cannot open {}: {e}", path.display())))?;
    io::read_csv(file).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn check_options(opts: &FitOptions) -> Result<(), Failure> {
    opts.validate()
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}

fn check_variance(s: &TimeSeries, path: &Path) -> Result<(), Failure> {
    if s.stats().sst > 0.0 {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_DATA,
            format!("{}: observations have zero variance", path.display()),
        ))
    }
}

fn warn_literal(models: &[ModelId]) {
    let literal: Vec<&str> = models
        .iter()
        .filter(|m| m.spec().literal_rendering)
        .map(|m| m.as_str())
        .collect();
    if !literal.is_empty() {
        eprintln!(
            "fitkit: warning: {} use formulas implemented exactly as published; \
             they are poorly identified and their parameters are not physically meaningful",
            literal.join(", ")
        );
    }
}

fn build_report(path: &Path, s: &TimeSeries, seed: u64, entries: Vec<ReportEntry>) -> Report {
    let ranking = if entries.is_empty() {
        Vec::new()
    } else {
        rank_models(&entries)
            .expect("entries share one dataset")
            .into_iter()
            .map(|e| e.model_id.clone())
            .collect()
    };
    Report {
        toolkit_version: crate::VERSION.to_string(),
        seed,
        dataset: DatasetInfo {
            source: path.display().to_string(),
            n: s.len(),
            sst: s.stats().sst,
        },
        entries,
        ranking,
    }
}

/// Errors that end a fit before any result exists but say nothing about
/// the data itself.
fn no_result(e: &FitError) -> bool {
    matches!(
        e,
        FitError::InitDomain(_) | FitError::AllStartsFailed { .. } | FitError::Model(_)
    )
}

fn fit(a: FitArgs) -> Result<(), Failure> {
    let opts = a.solver.options();
    check_options(&opts)?;
    let s = load_series(&a.data)?;
    check_variance(&s, &a.data)?;
    warn_literal(&[a.model]);
    let entries = match multi_start_fit(a.model, &s, &opts) {
        Ok(res) => vec![ReportEntry::from(&res)],
        Err(e) if no_result(&e) => {
            eprintln!("fitkit: {}: {e}", a.model);
            Vec::new()
        }
        Err(e) => return Err(Failure::new(EXIT_DATA, e.to_string())),
    };
    finish(&a.data, &s, opts.seed, entries, a.out.as_deref()).map(|_| ())
}

/// Writes the report and fails with exit code 3 when nothing converged.
fn finish(
    path: &Path,
    s: &TimeSeries,
    seed: u64,
    entries: Vec<ReportEntry>,
    out: Option<&Path>,
) -> Result<Report, Failure> {
    let report = build_report(path, s, seed, entries);
    write_output(out, &io::write_report(&report))?;
    if report.entries.iter().any(|e| e.converged) {
        Ok(report)
    } else {
        Err(Failure::new(EXIT_NOT_CONVERGED, "no model converged"))
    }
}

fn compare(a: CompareArgs) -> Result<(), Failure> {
    let opts = a.solver.options();
    check_options(&opts)?;
    let s = load_series(&a.data)?;
    check_variance(&s, &a.data)?;
    let models = a.models.0;
    warn_literal(&models);
    let outcomes: Vec<(ModelId, Result<ReportEntry, FitError>)> = models
        .par_iter()
        .map(|&m| {
            (
                m,
                multi_start_fit(m, &s, &opts).map(|r| ReportEntry::from(&r)),
            )
        })
        .collect();
    let mut entries = Vec::new();
    for (model, outcome) in outcomes {
        match outcome {
            Ok(entry) => entries.push(entry),
            Err(e) => eprintln!("fitkit: skipping {model}: {e}"),
        }
    }
    // Curves are written even when nothing converged, alongside the report.
    let report = build_report(&a.data, &s, opts.seed, entries);
    if let Some(dir) = &a.curves_dir {
        write_curves(dir, &report, &s)?;
    }
    write_output(a.out.as_deref(), &io::write_report(&report))?;
    if report.entries.iter().any(|e| e.converged) {
        Ok(())
    } else {
        Err(Failure::new(EXIT_NOT_CONVERGED, "no model converged"))
    }
}

/// Fitted values at the observed times, which the fit already checked lie
/// inside every model's domain.
fn write_curves(dir: &Path, report: &Report, s: &TimeSeries) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::new(EXIT_DATA, format!("cannot create {}: {e}", dir.display())))?;
    for entry in &report.entries {
        let model: ModelId = entry.model_id.parse().expect("report holds catalog ids");
        let params = crate::models::ParamVector::from_map(model, &entry.params)
            .map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
        let rows = io::curve_rows(&params, s.times()).map_err(io_failure)?;
        let path = dir.join(format!("{}.csv", entry.model_id));
        write_output(Some(&path), &rows)?;
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<(), Failure> {
    let text = if a.params.trim_start().starts_with('{') {
        a.params.clone()
    } else {
        fs::read_to_string(&a.params)
            .map_err(|e| Failure::new(EXIT_DATA, format!("cannot read {}: {e}", a.params)))?
    };
    let params = io::read_params(a.model, &text).map_err(io_failure)?;
    warn_literal(&[a.model]);
    let rows = io::curve_rows(&params, &a.grid.0).map_err(io_failure)?;
    write_output(a.out.as_deref(), &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("fitkit".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(
            run(argv("fit --data x.csv --model nosuchmodel")),
            EXIT_USAGE
        );
        assert_eq!(
            run(argv("fit --data x.csv --model yang1989 --bogus 1")),
            EXIT_USAGE
        );
        assert_eq!(run(argv("frobnicate")), EXIT_USAGE);
        assert_eq!(
            run(argv("eval --model exp2 --params {} --grid 0:1")),
            EXIT_USAGE
        );
        assert_eq!(
            run(argv(
                "generate --scenario temperature --preset eq7 --grid 0:1:3"
            )),
            EXIT_USAGE
        );
        assert_eq!(
            run(argv("compare --data x.csv --models exp2,exp2")),
            EXIT_USAGE
        );
        assert_eq!(
            run(argv("fit --data x.csv --model exp2 --starts 0")),
            EXIT_USAGE
        );
    }

    #[test]
    fn version_and_help_exit_0() {
        assert_eq!(run(argv("--version")), EXIT_OK);
        assert_eq!(run(argv("--help")), EXIT_OK);
    }

    #[test]
    fn model_lists() {
        assert_eq!(parse_models("all").unwrap().0.len(), 13);
        assert_eq!(
            parse_models("exp2, gauss2").unwrap().0,
            vec![ModelId::Exp2, ModelId::Gauss2]
        );
        assert!(parse_models("exp2,nope").is_err());
    }

    #[test]
    fn data_errors_exit_2() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.csv");
        fs::write(&empty, "").unwrap();
        let cmd = format!("fit --data {} --model yang1989", empty.display());
        assert_eq!(run(argv(&cmd)), EXIT_DATA);
        let missing = dir.path().join("missing.csv");
        let cmd = format!("fit --data {} --model yang1989", missing.display());
        assert_eq!(run(argv(&cmd)), EXIT_DATA);
        let flat = dir.path().join("flat.csv");
        fs::write(&flat, "0,1\n1,1\n2,1\n3,1\n4,1\n5,1\n").unwrap();
        let cmd = format!("fit --data {} --model exp2", flat.display());
        assert_eq!(run(argv(&cmd)), EXIT_DATA);
    }

    #[test]
    fn eval_domain_error_exits_4() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.csv");
        let cmd = format!(
            "eval --model rat21 --params {{\"p1\":1,\"p2\":0,\"p3\":0,\"q1\":-1}} --grid 0:2:3 --out {}",
            out.display()
        );
        assert_eq!(run(argv(&cmd)), EXIT_DOMAIN);
        let cmd = format!(
            "eval --model exp2 --params {{\"a\":1,\"b\":0.1,\"c\":2,\"d\":-0.2}} --grid 0:2:3 --out {}",
            out.display()
        );
        assert_eq!(run(argv(&cmd)), EXIT_OK);
        let text = fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("0,3\n"));
    }

    #[test]
    fn generate_then_fit() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("pop.csv");
        let report = dir.path().join("fit.json");
        let cmd = format!(
            "generate --scenario logistic --preset eq7 --grid 0:123:124 --noise-sd 0 --seed 1 --out {}",
            data.display()
        );
        assert_eq!(run(argv(&cmd)), EXIT_OK);
        let cmd = format!(
            "fit --data {} --model mcmillan1980 --starts 4 --out {}",
            data.display(),
            report.display()
        );
        assert_eq!(run(argv(&cmd)), EXIT_OK);
        let r = io::read_report(&fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(r.ranking, ["mcmillan1980"]);
        assert_eq!(r.dataset.n, 124);
    }
}
