use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfpce::ensemble::{self, StoredEnsemble};
use mfpce::lf_spec::LfSpec;
use mfpce::{io, parallel, Error, Result};
use mfpce_core::benchmarks::{self, BenchmarkPair, ConvergenceConfig, ConvergenceStudy, CoverageConfig, CoverageStudy};
use mfpce_core::bootstrap::{BootstrapPlan, DEFAULT_N_B};
use mfpce_core::fusion::{train_mf, LowFidelity, MfConfig, MfModel};
use mfpce_core::rng::{derive_seed, domain};
use mfpce_core::{PceConfig, PceModel, RandomVector};
use serde::Deserialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "mfpce", version, about = "Multi-fidelity PCE surrogates with bootstrap confidence and prediction intervals")]
struct Cli {
    /// JSON file with default settings; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to $MFPCE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Latin hypercube sample of an input model, written as CSV.
    Sample {
        /// Input model JSON, or `pair:<name>` for a benchmark input model.
        #[arg(long)]
        rv: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a multi-fidelity model from an HF CSV (x1..xM,y) and an LF source.
    TrainMf {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        pce: PceArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Confidence and prediction intervals at query points; builds and
    /// stores the bootstrap ensemble first when the directory has none.
    Intervals {
        /// Ensemble directory.
        #[arg(long)]
        ensemble: PathBuf,
        /// CSV of query inputs.
        #[arg(long)]
        query: PathBuf,
        /// Comma-separated alphas; each gives a (1 - 2 alpha) interval.
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long)]
        nb: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        data: OptDataArgs,
        #[command(flatten)]
        pce: PceArgs,
    },
    /// Reproduce a benchmark study.
    Benchmark {
        study: Study,
        pair: Pair,
        #[command(flatten)]
        args: BenchArgs,
        #[command(flatten)]
        pce: PceArgs,
    },
    /// Summarise a model file, an ensemble directory or a study output.
    Report { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Study {
    Convergence,
    Coverage,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pair {
    #[value(name = "oneD")]
    OneD,
    Truss,
}

impl Pair {
    fn get(self) -> BenchmarkPair {
        match self {
            Pair::OneD => benchmarks::one_d_pair(),
            Pair::Truss => benchmarks::truss_pair(),
        }
    }
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    hf: PathBuf,
    /// `builtin:<name>`, `csv:<path>` or `model:<path>`.
    #[arg(long)]
    lf: LfSpec,
    /// Input model JSON, or `pair:<name>`.
    #[arg(long)]
    rv: String,
    /// LF sampling budget for a builtin LF (0: use the model directly).
    #[arg(long = "n-lf")]
    n_lf: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OptDataArgs {
    #[arg(long)]
    hf: Option<PathBuf>,
    #[arg(long)]
    lf: Option<LfSpec>,
    #[arg(long)]
    rv: Option<String>,
    #[arg(long = "n-lf")]
    n_lf: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Default)]
struct PceArgs {
    #[arg(long = "min-degree")]
    min_degree: Option<u32>,
    #[arg(long = "max-degree")]
    max_degree: Option<u32>,
    #[arg(long = "q-norm")]
    q_norm: Option<f64>,
    /// Use the standard-deviation ratio when the scaling-factor guard trips.
    #[arg(long = "rho-fallback")]
    rho_fallback: bool,
    /// Keep LF and discrepancy expansions separate.
    #[arg(long = "no-merge")]
    no_merge: bool,
    /// Compute full LARS paths instead of stopping once the LOO error stalls.
    #[arg(long = "full-path")]
    full_path: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// HF design size(s), comma-separated.
    #[arg(long, value_delimiter = ',')]
    nh: Vec<usize>,
    /// LF design size.
    #[arg(long)]
    nl: Option<usize>,
    /// HF noise standard deviation as a fraction of the reference HF std.
    #[arg(long, conflicts_with = "noise_abs")]
    noise: Option<f64>,
    /// HF noise standard deviation in output units.
    #[arg(long = "noise-abs")]
    noise_abs: Option<f64>,
    /// Nominal coverage levels, comma-separated.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<f64>,
    #[arg(long)]
    nrep: Option<usize>,
    #[arg(long)]
    nb: Option<usize>,
    #[arg(long)]
    ntest: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
}

/// Settings accepted from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    n_b: Option<usize>,
    n_lf: Option<usize>,
    n_rep: Option<usize>,
    n_test: Option<usize>,
    min_degree: Option<u32>,
    max_degree: Option<u32>,
    q_norm: Option<f64>,
    rho_fallback: Option<bool>,
    merge: Option<bool>,
    early_stop: Option<bool>,
    alpha: Option<Vec<f64>>,
    levels: Option<Vec<f64>>,
    threads: Option<usize>,
}

struct Ctx {
    file: FileConfig,
}

impl Ctx {
    fn seed(&self, flag: Option<u64>) -> Result<u64> {
        flag.or(self.file.seed)
            .ok_or_else(|| Error::Usage("--seed is required for this command".into()))
    }

    fn mf_config(&self, base: PceConfig, a: &PceArgs) -> Result<MfConfig> {
        let f = &self.file;
        let pce = PceConfig {
            min_degree: a.min_degree.or(f.min_degree).unwrap_or(base.min_degree),
            max_degree: a.max_degree.or(f.max_degree).unwrap_or(base.max_degree),
            q_norm: a.q_norm.or(f.q_norm).unwrap_or(base.q_norm),
            early_stop: !a.full_path && f.early_stop.unwrap_or(base.early_stop),
            ..base
        };
        pce.validate().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(MfConfig {
            lf: pce,
            delta: pce,
            rho_fallback: a.rho_fallback || f.rho_fallback.unwrap_or(false),
            merge: !a.no_merge && f.merge.unwrap_or(true),
        })
    }
}

fn load_rv(spec: &str) -> Result<(RandomVector, PceConfig)> {
    match spec.strip_prefix("pair:") {
        Some(name) => {
            let p = benchmarks::pair(name).map_err(|e| Error::Usage(e.to_string()))?;
            Ok((p.rv, p.pce))
        }
        None => Ok((io::read_rv(Path::new(spec))?, PceConfig::default())),
    }
}

fn print_json(v: &serde_json::Value) {
    use std::io::Write;
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("serialisable"));
}

fn model_report(m: &MfModel) -> serde_json::Value {
    let lf = match &m.lf {
        LowFidelity::Analytic(a) => json!({ "builtin": a.name() }),
        LowFidelity::Pce(p) => json!({ "pce_degree": p.degree_used(), "pce_terms": p.len(), "pce_loo": p.loo_error() }),
    };
    json!({
        "rho": m.rho,
        "rho_method": m.rho_method,
        "lf": lf,
        "delta_degree": m.delta.degree_used(),
        "delta_terms": m.delta.len(),
        "delta_loo": m.delta.loo_error(),
        "merged_terms": m.merged.as_ref().map(PceModel::len),
        "hf_lf_pearson": m.diagnostic.map(|d| d.pearson),
        "hf_lf_nrmse": m.diagnostic.map(|d| d.nrmse),
    })
}

fn cmd_sample(ctx: &Ctx, rv: &str, n: usize, seed: Option<u64>, out: &Path) -> Result<()> {
    let seed = ctx.seed(seed)?;
    let (rv, _) = load_rv(rv)?;
    if n == 0 {
        return Err(Error::Usage("--n must be positive".into()));
    }
    let samples = rv.lhs_sample(n, derive_seed(seed, domain::LHS, 0))?;
    io::write_samples(out, &samples)
}

struct Training {
    hf: mfpce_core::ExperimentalDesign,
    source: mfpce_core::LowFidelitySource,
    rv: RandomVector,
    config: MfConfig,
    seed: u64,
}

#[allow(clippy::too_many_arguments)]
fn training(
    ctx: &Ctx,
    hf: &Path,
    lf: &LfSpec,
    rv: &str,
    n_lf: Option<usize>,
    seed: Option<u64>,
    pce: &PceArgs,
    seed_required: bool,
) -> Result<Training> {
    let (rv, base) = load_rv(rv)?;
    let n_lf = n_lf.or(ctx.file.n_lf).unwrap_or(0);
    let seed = if seed_required || n_lf > 0 { ctx.seed(seed)? } else { seed.or(ctx.file.seed).unwrap_or(0) };
    let hf = io::read_design(hf)?;
    if hf.dim() != rv.dim() {
        return Err(Error::Usage(format!("HF data have {} inputs, the input model {}", hf.dim(), rv.dim())));
    }
    let source = lf.resolve(n_lf)?;
    Ok(Training { hf, source, rv, config: ctx.mf_config(base, pce)?, seed })
}

fn cmd_train_mf(ctx: &Ctx, d: &DataArgs, pce: &PceArgs, out: &Path) -> Result<()> {
    let t = training(ctx, &d.hf, &d.lf, &d.rv, d.n_lf, d.seed, pce, false)?;
    let model = train_mf(&t.hf, &t.source, &t.rv, &t.config, t.seed)?;
    io::write_json(out, &model)?;
    print_json(&model_report(&model));
    Ok(())
}

fn alpha_label(a: f64) -> String {
    format!("{a}")
}

#[allow(clippy::too_many_arguments)]
fn cmd_intervals(
    ctx: &Ctx,
    dir: &Path,
    query: &Path,
    alphas: &[f64],
    nb: Option<usize>,
    out: &Path,
    d: &OptDataArgs,
    pce: &PceArgs,
) -> Result<()> {
    let alphas: Vec<f64> = if alphas.is_empty() {
        ctx.file.alpha.clone().unwrap_or_else(|| vec![0.05])
    } else {
        alphas.to_vec()
    };
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 0.5)) {
        return Err(Error::Usage(format!("alpha {a} outside (0, 0.5)")));
    }
    let mut stored = if ensemble::exists(dir) {
        ensemble::load(dir)?
    } else {
        let (Some(hf), Some(lf), Some(rv)) = (&d.hf, &d.lf, &d.rv) else {
            return Err(Error::Usage(format!(
                "{} holds no ensemble; pass --hf, --lf and --rv to build one",
                dir.display()
            )));
        };
        let t = training(ctx, hf, lf, rv, d.n_lf, d.seed, pce, true)?;
        let n_b = nb.or(ctx.file.n_b).unwrap_or(DEFAULT_N_B);
        let base = train_mf(&t.hf, &t.source, &t.rv, &t.config, t.seed)?;
        let plan = BootstrapPlan::new(&t.hf, &t.source, &t.rv, &t.config, n_b, t.seed)?;
        let ensemble = parallel::train_ensemble(plan)?;
        StoredEnsemble { ensemble, base: Some(base), noise: None }
    };
    if stored.noise.is_none() {
        stored.noise = Some(stored.ensemble.fit_noise()?);
        ensemble::save(dir, &stored)?;
    }
    let noise = stored.noise.expect("fitted above");
    let ens = &stored.ensemble;
    let points = io::read_table(query)?;
    let dim = ens.rv().dim();
    if points[0].len() != dim {
        return Err(Error::Usage(format!("query has {} columns, the model {dim} inputs", points[0].len())));
    }
    let seed = derive_seed(d.seed.or(ctx.file.seed).unwrap_or(ens.seed), domain::PI_NOISE, 0);
    let res = parallel::intervals(ens, &points, &alphas, Some(&noise), seed)?;

    let mut header = io::input_header(dim);
    header.push("mean".into());
    if stored.base.is_some() {
        header.push("prediction".into());
    }
    for a in &alphas {
        let l = alpha_label(*a);
        header.extend([format!("ci_lo_{l}"), format!("ci_hi_{l}"), format!("pi_lo_{l}"), format!("pi_hi_{l}")]);
    }
    let mut rows = Vec::with_capacity(points.len());
    for (x, r) in points.iter().zip(&res) {
        let mut row = x.clone();
        row.push(r.mean);
        if let Some(b) = &stored.base {
            row.push(b.predict(x)?);
        }
        for (c, p) in r.ci.iter().zip(&r.pi) {
            row.extend([c.lower, c.upper, p.lower, p.upper]);
        }
        rows.push(row);
    }
    io::write_atomic(out, io::table_csv(&header, rows).as_bytes())?;
    print_json(&json!({ "noise": noise, "n_b": ens.n_b(), "points": points.len() }));
    Ok(())
}

fn noise_std(pair: &BenchmarkPair, a: &BenchArgs, default_fraction: f64) -> f64 {
    match (a.noise_abs, a.noise, &pair.noise) {
        (Some(abs), _, _) => abs,
        (None, Some(f), _) => f * pair.reference_std,
        (None, None, Some(m)) => m.std(),
        (None, None, None) => default_fraction * pair.reference_std,
    }
}

fn cmd_benchmark(ctx: &Ctx, study: Study, pair: Pair, a: &BenchArgs, pce: &PceArgs) -> Result<()> {
    let seed = ctx.seed(a.seed)?;
    let pair_name = pair;
    let pair = pair.get();
    let mf = ctx.mf_config(pair.pce, pce)?;
    let truss = matches!(pair_name, Pair::Truss);
    let n_lf = a.nl.or(ctx.file.n_lf).unwrap_or(if truss { 300 } else { 100 });
    let n_rep = a.nrep.or(ctx.file.n_rep);
    let n_test = a.ntest.or(ctx.file.n_test);
    let mut files = Vec::new();
    let config = match study {
        Study::Convergence => {
            let hf_sizes = if !a.nh.is_empty() {
                a.nh.clone()
            } else if truss {
                vec![5, 10, 20, 40, 80, 160]
            } else {
                (10..=50).step_by(5).collect()
            };
            let cfg = ConvergenceConfig {
                hf_sizes,
                n_lf,
                noise_std: noise_std(&pair, a, 0.05),
                n_rep: n_rep.unwrap_or(50),
                n_test: n_test.unwrap_or(100_000),
                seed,
                mf,
            };
            let s = ConvergenceStudy::new(&pair, cfg.clone())?;
            let rows = parallel::run_convergence(&s)?;
            let mut text = String::from("size,replication,eps_mf,eps_hf,eps_lf\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.size,
                    r.replication,
                    io::fmt_f64(r.eps_mf),
                    io::fmt_f64(r.eps_hf),
                    io::fmt_f64(r.eps_lf)
                ));
            }
            let path = a.out_dir.join("convergence.csv");
            io::write_atomic(&path, text.as_bytes())?;
            files.push(path);
            serde_json::to_value(&cfg).expect("serialisable")
        }
        Study::Coverage => {
            let levels = if !a.levels.is_empty() {
                a.levels.clone()
            } else {
                ctx.file.levels.clone().unwrap_or_else(|| vec![0.1, 0.5, 0.9, 0.95])
            };
            let cfg = CoverageConfig {
                n_h: a.nh.first().copied().unwrap_or(if truss { 80 } else { 50 }),
                n_lf,
                noise_std: noise_std(&pair, a, 0.1),
                levels,
                n_rep: n_rep.unwrap_or(10),
                n_b: a.nb.or(ctx.file.n_b).unwrap_or(DEFAULT_N_B),
                n_test: n_test.unwrap_or(10_000),
                seed,
                mf,
            };
            let s = CoverageStudy::new(&pair, cfg.clone()).map_err(|e| Error::Usage(e.to_string()))?;
            let result = parallel::run_coverage(&s)?;
            let mut text = format!("{}\n", mfpce_core::CoverageReport::CSV_HEADER);
            for r in &result.reports {
                text.push_str(&r.csv_row());
                text.push('\n');
            }
            let csv = a.out_dir.join("coverage.csv");
            io::write_atomic(&csv, text.as_bytes())?;
            let full = a.out_dir.join("coverage.json");
            io::write_json(&full, &result)?;
            files.extend([csv, full]);
            {
                use std::io::Write;
                let _ = write!(std::io::stdout(), "{text}");
            }
            serde_json::to_value(&cfg).expect("serialisable")
        }
    };
    let manifest = json!({
        "tool": "mfpce",
        "version": env!("CARGO_PKG_VERSION"),
        "study": match study { Study::Convergence => "convergence", Study::Coverage => "coverage" },
        "pair": pair.name,
        "reference_std": pair.reference_std,
        "seed": seed,
        "config": config,
        "files": files.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect::<Vec<_>>(),
    });
    io::write_json(&a.out_dir.join("manifest.json"), &manifest)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    mfpce_core::math::median(&v)
}

fn cmd_report(path: &Path) -> Result<()> {
    if path.is_dir() {
        let s = ensemble::load(path)?;
        print_json(&json!({
            "n_b": s.ensemble.n_b(),
            "seed": s.ensemble.seed,
            "n_hf": s.ensemble.base_hf.len(),
            "n_lf": s.ensemble.base_lf.as_ref().map(|e| e.len()),
            "noise": s.noise,
            "base_model": s.base.as_ref().map(model_report),
        }));
        return Ok(());
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if ext == "csv" {
        let rows = io::read_table(path)?;
        if rows[0].len() != 5 {
            return Err(Error::Usage("expected a convergence table".into()));
        }
        let mut sizes: Vec<usize> = rows.iter().map(|r| r[0] as usize).collect();
        sizes.dedup();
        sizes.sort_unstable();
        sizes.dedup();
        let summary: Vec<_> = sizes
            .iter()
            .map(|&n| {
                let col = |k: usize| median(rows.iter().filter(|r| r[0] as usize == n).map(|r| r[k]).collect());
                json!({ "size": n, "median_eps_mf": col(2), "median_eps_hf": col(3), "median_eps_lf": col(4) })
            })
            .collect();
        print_json(&json!(summary));
        return Ok(());
    }
    let value: serde_json::Value = io::read_json(path)?;
    if let Ok(m) = serde_json::from_value::<MfModel>(value.clone()) {
        print_json(&model_report(&m));
    } else if let Ok(p) = serde_json::from_value::<PceModel>(value.clone()) {
        let (mean, var) = p.moments();
        print_json(&json!({ "degree": p.degree_used(), "terms": p.len(), "loo": p.loo_error(), "mean": mean, "std": var.sqrt() }));
    } else {
        print_json(&value);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => io::read_json(p)?,
        None => FileConfig::default(),
    };
    parallel::init_threads(cli.threads.or(file.threads));
    let ctx = Ctx { file };
    match &cli.command {
        Command::Sample { rv, n, seed, out } => cmd_sample(&ctx, rv, *n, *seed, out),
        Command::TrainMf { data, pce, out } => cmd_train_mf(&ctx, data, pce, out),
        Command::Intervals { ensemble, query, alpha, nb, out, data, pce } => {
            cmd_intervals(&ctx, ensemble, query, alpha, *nb, out, data, pce)
        }
        Command::Benchmark { study, pair, args, pce } => cmd_benchmark(&ctx, *study, *pair, args, pce),
        Command::Report { path } => cmd_report(path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
