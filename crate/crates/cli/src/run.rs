use std::path::PathBuf;
use std::process::ExitCode;

use cvbell::bell::{
    BellFunctional, BellResult, EvalPath, Formalism, FunctionalOptions, MeasurementSetting, StateModel,
};
use cvbell::figures::{figure, FigureOptions};
use cvbell::fock::{make_displacement, FockCutoff};
use cvbell::observables::parity_rotation_fidelity;
use cvbell::optimize::{linspace, optimize, sweep, Direction, OptimizeSpec};
use cvbell::verify::{self, VerifyOptions};
use cvbell::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{destination, emit, extension, render_csv, render_json, settings_columns, Table};
use crate::{Cli, Command, FidelityArgs, FigureArgs, Format, OptimizeArgs, ProblemArgs, StateKind, SweepArgs, VerifyArgs};

/// Largest matrix dimension for which diagnostics re-evaluate on the
/// truncated-matrix path.
const DIAGNOSTIC_DIM: usize = 200;

enum Failure {
    Usage(String),
    Numeric { message: String, config: Value },
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn classify(e: Error, config: &Value) -> Failure {
    match e {
        Error::Unsupported(_) | Error::InvalidParameter { .. } | Error::InvalidCutoff(_) | Error::EmptyGrid(_) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Numeric {
            message: e.to_string(),
            config: config.clone(),
        },
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    let stamp = !cli.no_timestamp;
    let outcome = match &cli.command {
        Command::Optimize(a) => run_optimize(a, stamp),
        Command::Sweep(a) => run_sweep(a, stamp),
        Command::Figure(a) => run_figure(a, stamp),
        Command::Fidelity(a) => run_fidelity(a, stamp),
        Command::Verify(a) => run_verify(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun 'cvbell help' for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Numeric { message, config }) => {
            let diag = json!({ "error": message, "config": config });
            eprintln!("{}", serde_json::to_string_pretty(&diag).unwrap_or(message));
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[derive(Debug, Serialize)]
struct ProblemConfig {
    command: &'static str,
    state: StateKind,
    formalism: Formalism,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<(f64, f64, usize)>,
    cutoff: Option<usize>,
    restarts: usize,
    seed: u64,
    direction: Direction,
    options: FunctionalOptions,
    format: Format,
}

fn model(state: StateKind, param: f64) -> StateModel {
    match state {
        StateKind::Tmss => StateModel::Tmss { r: param },
        StateKind::Ecs => StateModel::Ecs { gamma: param },
        StateKind::SinglePhoton => StateModel::SinglePhoton,
    }
}

fn functional_options(p: &ProblemArgs) -> Result<FunctionalOptions, Failure> {
    let cutoff = p
        .cutoff
        .map(FockCutoff::new)
        .transpose()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(FunctionalOptions {
        path: p.path.into(),
        domain: p.domain.into(),
        cutoff,
        displacement_box: p.displacement_box,
        ..FunctionalOptions::default()
    })
}

fn spec(p: &ProblemArgs, sample: StateModel) -> OptimizeSpec {
    let direction = p
        .direction
        .map(Direction::from)
        .unwrap_or_else(|| Direction::default_for(p.formalism, Some(sample)));
    OptimizeSpec::new(direction)
        .with_restarts(p.restarts)
        .with_seed(p.seed)
}

fn problem_config(
    command: &'static str,
    p: &ProblemArgs,
    param: Option<f64>,
    grid: Option<(f64, f64, usize)>,
    spec: &OptimizeSpec,
    options: FunctionalOptions,
) -> Value {
    let c = ProblemConfig {
        command,
        state: p.state,
        formalism: p.formalism,
        param,
        grid,
        cutoff: p.cutoff,
        restarts: p.restarts,
        seed: p.seed,
        direction: spec.direction,
        options,
        format: p.output.format,
    };
    serde_json::to_value(c).expect("config serializes")
}

#[derive(Debug, Serialize)]
struct StateDiagnostics {
    cutoff: usize,
    tail_mass: Option<f64>,
    unitarity_defect: Option<f64>,
    analytic_vs_matrix: Option<f64>,
    within_quantum_bounds: bool,
}

/// Cutoff, truncation and oracle residuals at the optimum. Matrix quantities
/// are skipped when the truncated space is too large to build.
fn diagnostics(m: StateModel, options: FunctionalOptions, result: &BellResult) -> Result<StateDiagnostics, Error> {
    let cutoff = options.cutoff.unwrap_or_else(|| m.default_cutoff());
    let small = cutoff.dim() <= DIAGNOSTIC_DIM;
    let tail_mass = match m {
        StateModel::Tmss { r } => Some(r.tanh().powi(2 * cutoff.dim() as i32)),
        _ if small => Some(m.build(cutoff)?.tail_mass()),
        _ => None,
    };
    let unitarity_defect = if small {
        let amps: Vec<_> = [result.settings.a, result.settings.a_prime, result.settings.b, result.settings.b_prime]
            .into_iter()
            .filter_map(|s| match s {
                MeasurementSetting::Displacement(d) => Some(d.alpha),
                _ => None,
            })
            .collect();
        amps.iter()
            .map(|&a| make_displacement(a, cutoff.with_displacement_margin(a.norm())).unitarity_defect())
            .reduce(f64::max)
    } else {
        None
    };
    let analytic_vs_matrix = if small && options.path == EvalPath::Analytic {
        let a = BellFunctional::new(m, result.formalism, options)?;
        let b = BellFunctional::new(
            m,
            result.formalism,
            FunctionalOptions {
                path: EvalPath::Matrix,
                ..options
            },
        )?;
        Some((a.eval_settings(&result.settings) - b.eval_settings(&result.settings)).abs())
    } else {
        None
    };
    Ok(StateDiagnostics {
        cutoff: cutoff.n_max(),
        tail_mass,
        unitarity_defect,
        analytic_vs_matrix,
        within_quantum_bounds: result.within_quantum_bounds(1e-9),
    })
}

fn result_table(params: &[f64], results: &[BellResult]) -> Table {
    let (names, _) = settings_columns(&results[0].settings);
    let mut columns = vec!["param".to_string(), "value".to_string()];
    columns.extend(names);
    columns.push("converged".into());
    let rows = params
        .iter()
        .zip(results)
        .map(|(&p, r)| {
            let mut row = vec![p, r.value];
            row.extend(settings_columns(&r.settings).1);
            row.push(if r.diagnostics.converged { 1.0 } else { 0.0 });
            row
        })
        .collect();
    Table { columns, rows }
}

fn results_json(params: &[f64], results: &[BellResult]) -> Value {
    Value::Array(
        params
            .iter()
            .zip(results)
            .map(|(&p, r)| {
                let mut v = serde_json::to_value(r).expect("result serializes");
                v["param"] = Value::from(p);
                v
            })
            .collect(),
    )
}

fn write(
    format: Format,
    out: Option<&PathBuf>,
    default_stem: String,
    stamp: bool,
    table: impl FnOnce() -> Table,
    json: impl FnOnce() -> (Value, Value, Value),
) -> Result<(), Failure> {
    let bytes = match format {
        Format::Csv => render_csv(&table(), stamp)?,
        Format::Json => {
            let (c, r, d) = json();
            render_json(c, r, d, stamp)?
        }
    };
    let dest = destination(out.map(PathBuf::as_path), &format!("{default_stem}.{}", extension(format)));
    emit(&bytes, dest)?;
    Ok(())
}

fn run_optimize(a: &OptimizeArgs, stamp: bool) -> Result<ExitCode, Failure> {
    let p = &a.problem;
    let options = functional_options(p)?;
    let m = model(p.state, a.param);
    let s = spec(p, m);
    let param = m.param();
    let config = problem_config("optimize", p, param, None, &s, options);
    let go = || -> Result<(BellResult, StateDiagnostics), Error> {
        let f = BellFunctional::new(m, p.formalism, options)?;
        let r = optimize(&f, &s)?;
        let d = diagnostics(m, options, &r)?;
        Ok((r, d))
    };
    let (result, diag) = go().map_err(|e| classify(e, &config))?;
    let x = [param.unwrap_or(f64::NAN)];
    write(
        p.output.format,
        p.output.out.as_ref(),
        format!("optimize-{}-{}", m.name(), p.formalism.name()),
        stamp,
        || result_table(&x, std::slice::from_ref(&result)),
        || {
            let d = serde_json::to_value(&diag).expect("diagnostics serialize");
            (config.clone(), results_json(&x, std::slice::from_ref(&result)), d)
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(a: &SweepArgs, stamp: bool) -> Result<ExitCode, Failure> {
    let p = &a.problem;
    if p.state == StateKind::SinglePhoton {
        return Err(Failure::Usage("sweep needs a parameterized state (tmss or ecs)".into()));
    }
    let options = functional_options(p)?;
    let grid = linspace(a.from, a.to, a.points);
    let s = spec(p, model(p.state, a.from));
    let config = problem_config("sweep", p, None, Some((a.from, a.to, a.points)), &s, options);
    let results = sweep(|x| BellFunctional::new(model(p.state, x), p.formalism, options), &grid, &s)
        .map_err(|e| classify(e, &config))?;
    write(
        p.output.format,
        p.output.out.as_ref(),
        format!("sweep-{}-{}", p.state_name(), p.formalism.name()),
        stamp,
        || result_table(&grid, &results),
        || {
            let cutoffs: Vec<usize> = grid
                .iter()
                .map(|&x| options.cutoff.unwrap_or_else(|| model(p.state, x).default_cutoff()).n_max())
                .collect();
            let d = json!({ "cutoffs": cutoffs });
            (config.clone(), results_json(&grid, &results), d)
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

impl ProblemArgs {
    fn state_name(&self) -> &'static str {
        model(self.state, 1.0).name()
    }
}

fn run_figure(a: &FigureArgs, stamp: bool) -> Result<ExitCode, Failure> {
    let opts = FigureOptions {
        points: a.points,
        restarts: a.restarts,
        seed: a.seed,
    };
    let config = json!({
        "command": "figure",
        "id": a.id,
        "points": a.points,
        "restarts": a.restarts,
        "seed": a.seed,
        "format": a.output.format,
    });
    let d = figure(a.id, &opts).map_err(|e| classify(e, &config))?;
    write(
        a.output.format,
        a.output.out.as_ref(),
        format!("figure-{}", a.id),
        stamp,
        || Table {
            columns: d.columns.clone(),
            rows: d.rows.clone(),
        },
        || {
            let r = serde_json::to_value(&d).expect("dataset serializes");
            (config.clone(), r, json!({ "rows": d.rows.len() }))
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run_fidelity(a: &FidelityArgs, stamp: bool) -> Result<ExitCode, Failure> {
    let config = json!({
        "command": "fidelity",
        "param": a.param,
        "cutoff": a.cutoff,
        "format": a.output.format,
    });
    let rows = a
        .param
        .iter()
        .map(|&g| -> Result<Vec<f64>, Error> {
            let cutoff = match a.cutoff {
                Some(n) => FockCutoff::new(n)?,
                None => FockCutoff::for_ecs(g),
            };
            let f = parity_rotation_fidelity(g, cutoff)?;
            let k = cvbell::bell::k_of_gamma(g)?;
            Ok(vec![g, f, k, (f - k).abs(), cutoff.n_max() as f64])
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| classify(e, &config))?;
    let table = Table {
        columns: ["gamma", "fidelity", "k", "abs_diff", "cutoff"].map(String::from).to_vec(),
        rows,
    };
    write(
        a.output.format,
        a.output.out.as_ref(),
        "fidelity".into(),
        stamp,
        || table.clone(),
        || {
            let results: Vec<Value> = table
                .rows
                .iter()
                .map(|r| json!({ "gamma": r[0], "fidelity": r[1], "k": r[2] }))
                .collect();
            let diag: Vec<Value> = table
                .rows
                .iter()
                .map(|r| json!({ "gamma": r[0], "abs_diff": r[3], "cutoff": r[4] }))
                .collect();
            (config.clone(), Value::Array(results), Value::Array(diag))
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(a: &VerifyArgs) -> Result<ExitCode, Failure> {
    let opts = VerifyOptions {
        seed: a.seed,
        restarts: a.restarts,
    };
    let config = json!({ "command": "verify", "seed": a.seed, "restarts": a.restarts });
    let report = if a.checks.is_empty() {
        verify::run(&opts)
    } else {
        a.checks
            .iter()
            .map(|&id| verify::check(id, &opts))
            .collect::<Result<Vec<_>, _>>()
            .map(|checks| verify::Report { options: opts, checks })
    }
    .map_err(|e| classify(e, &config))?;
    let bytes = if a.json {
        let mut b = serde_json::to_vec_pretty(&report).expect("report serializes");
        b.push(b'\n');
        b
    } else {
        report.table().into_bytes()
    };
    emit(&bytes, a.out.clone())?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
