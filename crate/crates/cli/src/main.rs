mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use auxetikit::dataset::{dataset_path, generate_with_progress, Dataset, GenerateOptions};
use auxetikit::forest::{model_path, train_with_split, Hyperparams, Surrogate, Target};
use auxetikit::inverse::{brute_force, InverseOptions, InverseTarget, DEFAULT_EVALUATIONS};
use auxetikit::sweep::{
    run_sweep, size_study, study_sizes, sweep_homogenize_options, Evaluator, SweepSpec, DESK_FACTOR,
};
use auxetikit::{homogenize, par, BaseMaterial, Error, HomogenizeOptions, Method, Regime, UnitCellSpec, VoidShape};
use auxetikit_service::ServiceConfig;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{Config, FileConfig, DEFAULT_CONFIG_FILE};

#[derive(Parser, Debug)]
#[command(name = "auxetikit", version, about = "Homogenization, surrogates and inverse design of 2D auxetic cells")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Config file (default: ./auxetikit.toml if present)
    #[arg(long, global = true, env = "AUXETIKIT_CONFIG")]
    config: Option<PathBuf>,
    /// plane_strain or plane_stress
    #[arg(long, global = true, env = "AUXETIKIT_REGIME")]
    regime: Option<Regime>,
    /// FFT grid size
    #[arg(long = "n", global = true, env = "AUXETIKIT_GRID_N")]
    grid_n: Option<usize>,
    /// Solver tolerance
    #[arg(long, global = true, env = "AUXETIKIT_TOL")]
    tol: Option<f64>,
    #[arg(long, global = true, env = "AUXETIKIT_MODEL_DIR")]
    model_dir: Option<PathBuf>,
    #[arg(long, global = true, env = "AUXETIKIT_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[arg(long, global = true, env = "AUXETIKIT_SEED")]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores
    #[arg(long, global = true, env = "AUXETIKIT_WORKERS")]
    workers: Option<usize>,
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Paper-scale defaults (n = 256, 48k rows, full size study)
    #[arg(long, global = true, env = "AUXETIKIT_PAPER_SCALE")]
    paper_scale: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Effective stiffness of one cell with the FFT solver
    Homogenize {
        #[arg(long)]
        shape: VoidShape,
        #[arg(long = "d")]
        d_rel: f64,
        #[arg(long = "D")]
        big_d_rel: f64,
        #[arg(long = "E", default_value_t = 1.0)]
        youngs_modulus: f64,
        #[arg(long, default_value_t = 0.3)]
        nu: f64,
        #[arg(long, default_value = "sensitivity")]
        method: Method,
    },
    /// Sample and homogenize a training dataset
    Generate {
        /// A shape, or `all`
        #[arg(long, default_value = "all")]
        shape: String,
        /// Rows per shape (default 3000, 48000 at paper scale)
        #[arg(long)]
        count: Option<usize>,
    },
    /// Train random-forest surrogates on a dataset
    Train {
        #[arg(long, default_value = "all")]
        shape: String,
        /// c11, c12, c33 or `all`
        #[arg(long, default_value = "all")]
        target: String,
        #[arg(long, default_value_t = 100)]
        n_trees: usize,
        #[arg(long, default_value_t = 2)]
        min_leaf: usize,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Predict constants with trained surrogates
    Predict {
        #[arg(long)]
        shape: VoidShape,
        #[arg(long = "d")]
        d_rel: f64,
        #[arg(long = "D")]
        big_d_rel: f64,
        #[arg(long = "E", default_value_t = 1.0)]
        youngs_modulus: f64,
        #[arg(long, default_value_t = 0.3)]
        nu: f64,
    },
    /// Find void diameters that match target constants (stress units)
    Inverse {
        #[arg(long, default_value = "rect")]
        shape: VoidShape,
        #[arg(long)]
        c11: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c12: Option<f64>,
        #[arg(long)]
        c33: Option<f64>,
        #[arg(long = "E", default_value_t = 1.0)]
        youngs_modulus: f64,
        #[arg(long, default_value_t = 0.3)]
        nu: f64,
        #[arg(long, default_value_t = DEFAULT_EVALUATIONS)]
        evals: usize,
    },
    /// Constants along D_rel at fixed d_rel and nu
    Sweep {
        #[arg(long)]
        shape: VoidShape,
        #[command(flatten)]
        range: SweepRange,
        #[arg(long, default_value = "fft")]
        evaluator: Evaluator,
        /// CSV destination (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Surrogate error along a sweep versus training-set size
    Study {
        #[arg(long)]
        shape: VoidShape,
        #[arg(long, default_value = "c11")]
        target: Target,
        #[command(flatten)]
        range: SweepRange,
        /// Paper sizes are divided by this (default 16, 1 at paper scale)
        #[arg(long)]
        factor: Option<usize>,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of built web UI assets
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Concurrent FFT requests
        #[arg(long, default_value_t = 2)]
        fft_workers: usize,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct SweepRange {
    #[arg(long = "d", default_value_t = 0.05)]
    d_rel: f64,
    #[arg(long, default_value_t = 0.3)]
    nu: f64,
    #[arg(long = "from", default_value_t = 0.05)]
    big_d_min: f64,
    #[arg(long = "to", default_value_t = 0.9)]
    big_d_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

impl SweepRange {
    fn spec(&self, shape: VoidShape, evaluator: Evaluator) -> SweepSpec {
        SweepSpec {
            shape,
            d_rel: self.d_rel,
            nu: self.nu,
            big_d_min: self.big_d_min,
            big_d_max: self.big_d_max,
            step: self.step,
            evaluator,
        }
    }
}

enum CliError {
    Usage(String),
    Core(Error),
    Other(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Invalid(_) | Error::Row { .. } | Error::Format(_) | Error::Json(_) | Error::Csv(_) => 2,
                Error::NotConverged { .. }
                | Error::NonFinite { .. }
                | Error::SingularAcoustic(..)
                | Error::TooManyFailures { .. } => 3,
                _ => 1,
            },
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Other(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn shapes_arg(s: &str) -> CliResult<Vec<VoidShape>> {
    if s.eq_ignore_ascii_case("all") {
        Ok(VoidShape::ALL.to_vec())
    } else {
        s.split(',')
            .map(|p| p.parse().map_err(CliError::Core))
            .collect()
    }
}

fn targets_arg(s: &str) -> CliResult<Vec<Target>> {
    if s.eq_ignore_ascii_case("all") {
        Ok(Target::ALL.to_vec())
    } else {
        s.split(',')
            .map(|p| p.parse().map_err(CliError::Core))
            .collect()
    }
}

/// Print `value` as one JSON line with `--json`, otherwise the human text.
fn emit(json: bool, value: &Value, human: impl FnOnce() -> String) {
    if json {
        println!("{value}");
    } else {
        println!("{}", human());
    }
}

fn matrix_json(m: &auxetikit::VoigtMatrix3) -> Value {
    json!((0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

#[allow(clippy::too_many_arguments)]
fn cmd_homogenize(
    cfg: &Config,
    json: bool,
    shape: VoidShape,
    d_rel: f64,
    big_d_rel: f64,
    e: f64,
    nu: f64,
    method: Method,
) -> CliResult<()> {
    let material = BaseMaterial::new(e, nu)?;
    let spec = UnitCellSpec::new(shape, d_rel, big_d_rel, material)?;
    let opts = HomogenizeOptions {
        n: cfg.grid_n,
        tol: cfg.tol,
        method,
        regime: cfg.regime,
        ..HomogenizeOptions::default()
    };
    let (c, report) = par::with_workers(cfg.workers, || homogenize(&spec, &opts))?;
    let out = json!({
        "shape": shape,
        "d_rel": d_rel,
        "D_rel": big_d_rel,
        "E": e,
        "nu": nu,
        "regime": cfg.regime,
        "n": cfg.grid_n,
        "method": method,
        "stiffness": matrix_json(&c.full),
        "c11": c.c11,
        "c12": c.c12,
        "c33": c.c33,
        "nu_eff": c.nu_eff().ok(),
        "iterations": report.iterations,
        "residual": report.residual,
    });
    // JSON either way; --json makes it a single line
    if json {
        println!("{out}");
    } else {
        println!("{}", serde_json::to_string_pretty(&out).expect("plain JSON value"));
    }
    Ok(())
}

fn cmd_generate(cfg: &Config, json: bool, shape: &str, count: Option<usize>) -> CliResult<()> {
    let count = count.unwrap_or(if cfg.paper_scale { 48_000 } else { 3_000 });
    std::fs::create_dir_all(&cfg.data_dir)?;
    for shape in shapes_arg(shape)? {
        let opts = GenerateOptions {
            tol: cfg.tol,
            workers: cfg.workers,
            regime: cfg.regime,
            ..GenerateOptions::new(shape, count, cfg.grid_n, cfg.seed)
        };
        let start = Instant::now();
        let step = (count / 20).max(1);
        let report = generate_with_progress(&opts, |done| {
            if done % step == 0 || done == count {
                log::info!("{shape}: {done}/{count}");
            }
        })?;
        let path = dataset_path(&cfg.data_dir, shape);
        report.dataset.write(&path)?;
        let elapsed = start.elapsed().as_secs_f64();
        let out = json!({
            "shape": shape,
            "rows": report.dataset.len(),
            "failed": report.failures.len(),
            "path": path,
            "fingerprint": report.dataset.fingerprint(),
            "elapsed_s": elapsed,
        });
        emit(json, &out, || {
            format!(
                "{shape}: {} rows ({} failed) -> {} in {elapsed:.1} s",
                report.dataset.len(),
                report.failures.len(),
                path.display()
            )
        });
    }
    Ok(())
}

fn cmd_train(cfg: &Config, json: bool, shape: &str, target: &str, hp: Hyperparams) -> CliResult<()> {
    hp.validate()?;
    std::fs::create_dir_all(&cfg.model_dir)?;
    for shape in shapes_arg(shape)? {
        let ds = Dataset::read_expecting(dataset_path(&cfg.data_dir, shape), shape)?;
        for t in targets_arg(target)? {
            let (model, report) = par::with_workers(cfg.workers, || train_with_split(&ds, t, &hp, cfg.seed))?;
            let path = model_path(&cfg.model_dir, shape, t);
            model.save(&path)?;
            let out = json!({
                "shape": shape,
                "target": t,
                "rows": ds.len(),
                "r2_train": report.r2_train,
                "r2_test": report.r2_test,
                "mse_train": report.mse_train,
                "mse_test": report.mse_test,
                "path": path,
            });
            emit(json, &out, || {
                format!(
                    "{shape} {t}: r2_train {:.6} r2_test {:.6} mse_test {:.3e} -> {}",
                    report.r2_train,
                    report.r2_test,
                    report.mse_test,
                    path.display()
                )
            });
        }
    }
    Ok(())
}

fn cmd_predict(cfg: &Config, json: bool, shape: VoidShape, d_rel: f64, big_d_rel: f64, e: f64, nu: f64) -> CliResult<()> {
    let material = BaseMaterial::new(e, nu)?;
    UnitCellSpec::new(shape, d_rel, big_d_rel, material)?;
    let s = Surrogate::load(&cfg.model_dir, shape)?;
    let [c11, c12, c33] = s.predict(d_rel, big_d_rel, nu).map(|c| c * e);
    let nu_eff = (c11 != 0.0).then(|| c12 / c11);
    let out = json!({"shape": shape, "c11": c11, "c12": c12, "c33": c33, "nu_eff": nu_eff});
    emit(json, &out, || {
        format!(
            "C11 {c11:.6e}  C12 {c12:.6e}  C33 {c33:.6e}  nu_eff {}",
            nu_eff.map_or("undefined".into(), |v| format!("{v:.4}"))
        )
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_inverse(
    cfg: &Config,
    json: bool,
    shape: VoidShape,
    c: [Option<f64>; 3],
    e: f64,
    nu: f64,
    evals: usize,
) -> CliResult<()> {
    let material = BaseMaterial::new(e, nu)?;
    let target = InverseTarget::from_stress(c[0], c[1], c[2], &material)?;
    let s = Surrogate::load(&cfg.model_dir, shape)?;
    let opts = InverseOptions {
        eval_count: evals,
        ..InverseOptions::default()
    };
    let r = par::with_workers(cfg.workers, || brute_force(&s, &target, nu, &opts))?;
    let p = s.predict(r.d_rel, r.big_d_rel, nu).map(|v| v * e);
    let out = json!({
        "shape": shape,
        "d_rel": r.d_rel,
        "D_rel": r.big_d_rel,
        "loss": r.loss,
        "evaluations": r.evaluations,
        "elapsed_s": r.elapsed_s,
        "feasible": r.feasible,
        "predicted": {"c11": p[0], "c12": p[1], "c33": p[2]},
    });
    emit(json, &out, || {
        format!(
            "d/L {:.4}  D/L {:.4}  loss {:.3e}  {}\npredicted C11 {:.2}  C12 {:.2}  C33 {:.2}  ({} evaluations, {:.3} s)",
            r.d_rel,
            r.big_d_rel,
            r.loss,
            if r.feasible { "feasible" } else { "above threshold" },
            p[0],
            p[1],
            p[2],
            r.evaluations,
            r.elapsed_s
        )
    });
    Ok(())
}

fn cmd_sweep(
    cfg: &Config,
    json: bool,
    shape: VoidShape,
    range: SweepRange,
    evaluator: Evaluator,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let spec = range.spec(shape, evaluator);
    let surrogate = match evaluator {
        Evaluator::Fft => None,
        _ => Some(Surrogate::load(&cfg.model_dir, shape)?),
    };
    let mut hopts = sweep_homogenize_options(cfg.grid_n, cfg.tol);
    hopts.regime = cfg.regime;
    let table = par::with_workers(cfg.workers, || run_sweep(&spec, &hopts, surrogate.as_ref()))?;

    let onsets: Vec<(Evaluator, Option<f64>)> = [Evaluator::Fft, Evaluator::Surrogate]
        .into_iter()
        .filter(|&e| !table.series(e).is_empty())
        .map(|e| (e, table.onset(e).ok()))
        .collect();
    match &out {
        Some(path) => table.write_csv(BufWriter::new(File::create(path)?))?,
        None if !json => table.write_csv(io::stdout().lock())?,
        None => {}
    }
    let summary = json!({
        "shape": shape,
        "rows": table.rows.len(),
        "failed": table.failures().len(),
        "onset": onsets.iter().map(|(e, o)| (e.name().to_string(), json!(o))).collect::<serde_json::Map<_, _>>(),
        "out": out,
    });
    if json {
        println!("{summary}");
    } else {
        for (e, o) in &onsets {
            match o {
                Some(v) => eprintln!("{shape} {e}: nu_eff <= 0 from D/L = {v}"),
                None => eprintln!("{shape} {e}: no onset of auxeticity in range"),
            }
        }
    }
    Ok(())
}

fn cmd_study(cfg: &Config, json: bool, shape: VoidShape, target: Target, range: SweepRange, factor: Option<usize>) -> CliResult<()> {
    let factor = factor.unwrap_or(if cfg.paper_scale { 1 } else { DESK_FACTOR });
    let sizes = study_sizes(factor);
    let full = Dataset::read_expecting(dataset_path(&cfg.data_dir, shape), shape)?;
    let largest = *sizes.last().unwrap();
    if full.len() < largest {
        return Err(CliError::Usage(format!(
            "the study needs {largest} rows of {shape} data, found {}",
            full.len()
        )));
    }
    let datasets: Vec<Dataset> = sizes.iter().map(|&n| full.prefix(n)).collect();
    let spec = range.spec(shape, Evaluator::Fft);
    let mut hopts = sweep_homogenize_options(cfg.grid_n, cfg.tol);
    hopts.regime = cfg.regime;
    let hp = Hyperparams {
        seed: cfg.seed,
        ..Hyperparams::default()
    };
    let rows = par::with_workers(cfg.workers, || -> auxetikit::Result<_> {
        let reference = run_sweep(&spec, &hopts, None)?;
        size_study(&datasets, &reference, target, &hp)
    })?;
    if json {
        println!("{}", json!({"shape": shape, "target": target, "rows": rows}));
    } else {
        println!("size,median,q1,q3,whisker_low,whisker_high,min,max,outliers");
        for r in &rows {
            let s = r.stats;
            println!(
                "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
                r.size, s.median, s.q1, s.q3, s.whisker_low, s.whisker_high, s.min, s.max, s.outliers
            );
        }
    }
    Ok(())
}

fn cmd_serve(cfg: &Config, host: IpAddr, port: u16, static_dir: Option<PathBuf>, fft_workers: usize) -> CliResult<()> {
    let config = ServiceConfig {
        model_dir: cfg.model_dir.clone(),
        static_dir,
        fft_grid_n: cfg.grid_n,
        fft_tol: cfg.tol,
        fft_workers,
        regime: cfg.regime,
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(auxetikit_service::serve(config, SocketAddr::new(host, port)))
        .map_err(|e| CliError::Other(format!("server error: {e}")))
}

fn resolve_config(g: &GlobalArgs) -> CliResult<Config> {
    let (path, explicit) = match &g.config {
        Some(p) => (p.clone(), true),
        None => (PathBuf::from(DEFAULT_CONFIG_FILE), false),
    };
    let file = FileConfig::load(&path, explicit).map_err(CliError::Usage)?;
    let flags = FileConfig {
        regime: g.regime,
        grid_n: g.grid_n,
        tol: g.tol,
        model_dir: g.model_dir.clone(),
        data_dir: g.data_dir.clone(),
        seed: g.seed,
        workers: g.workers,
    };
    Config::resolve(&flags, &file, g.paper_scale).map_err(CliError::Usage)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = resolve_config(&cli.global)?;
    let json = cli.global.json;
    match cli.command {
        Command::Homogenize {
            shape,
            d_rel,
            big_d_rel,
            youngs_modulus,
            nu,
            method,
        } => cmd_homogenize(&cfg, json, shape, d_rel, big_d_rel, youngs_modulus, nu, method),
        Command::Generate { shape, count } => cmd_generate(&cfg, json, &shape, count),
        Command::Train {
            shape,
            target,
            n_trees,
            min_leaf,
            max_depth,
        } => {
            let hp = Hyperparams {
                n_trees,
                min_leaf,
                max_depth,
                seed: cfg.seed,
                ..Hyperparams::default()
            };
            cmd_train(&cfg, json, &shape, &target, hp)
        }
        Command::Predict {
            shape,
            d_rel,
            big_d_rel,
            youngs_modulus,
            nu,
        } => cmd_predict(&cfg, json, shape, d_rel, big_d_rel, youngs_modulus, nu),
        Command::Inverse {
            shape,
            c11,
            c12,
            c33,
            youngs_modulus,
            nu,
            evals,
        } => cmd_inverse(&cfg, json, shape, [c11, c12, c33], youngs_modulus, nu, evals),
        Command::Sweep {
            shape,
            range,
            evaluator,
            out,
        } => cmd_sweep(&cfg, json, shape, range, evaluator, out),
        Command::Study {
            shape,
            target,
            range,
            factor,
        } => cmd_study(&cfg, json, shape, target, range, factor),
        Command::Serve {
            host,
            port,
            static_dir,
            fft_workers,
        } => cmd_serve(&cfg, host, port, static_dir, fft_workers),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
