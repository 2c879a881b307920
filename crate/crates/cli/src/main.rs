use clap::{Args, Parser, Subcommand};
use eps2_cli::config::RunConfig;
use eps2_cli::suites::run_suite;
use eps2_cli::tasks::{run_named, write_manifest};
use std::path::PathBuf;
use std::process::ExitCode;

/// Computational toolkit for square-function coefficients, capacities,
/// and corona decompositions of planar and spatial scenes.
#[derive(Parser)]
#[command(name = "eps2", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker count override (values never depend on it). Env: EPS2_JOBS.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory override. Env: EPS2_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise coefficient batch (eps, a, gamma, g, a_psi).
    Coeff(Common),
    /// Dini-integral chain verification on a scene.
    Dini(Common),
    /// Jones beta-infinity numbers of a point cloud.
    Beta(Common),
    /// Corona / stopping-time Lipschitz-graph construction.
    Corona(Common),
    /// Riesz capacity of a point net.
    Capacity(Common),
    /// Capacity slicing comparison.
    Slice(Common),
    /// Planar arc-profile spectral bounds.
    Spectral(Common),
    /// Fourier-side square-function identities.
    Fourier(Common),
    /// End-to-end verification suites.
    Verify {
        /// One of: chain, smoothed, fourier, corona, capacity, akn, all.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn env_jobs() -> Option<usize> {
    std::env::var("EPS2_JOBS").ok().and_then(|v| v.parse().ok())
}

fn env_out() -> Option<PathBuf> {
    std::env::var("EPS2_OUT").ok().map(PathBuf::from)
}

fn init_pool(jobs: Option<usize>) {
    if let Some(k) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
}

fn run_task(name: &str, common: &Common) -> ExitCode {
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let de = &mut serde_json::Deserializer::from_str(&text);
    let mut cfg: RunConfig = match serde_path_to_error::deserialize(de) {
        Ok(c) => c,
        Err(e) => {
            eprintln!(
                "config error at `{}`: {}",
                e.path(),
                e.inner()
            );
            return ExitCode::from(2);
        }
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.jobs = common.jobs.or(env_jobs()).or(cfg.jobs);
    let out = common
        .out
        .clone()
        .or(env_out())
        .or(cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    cfg.out = Some(out.clone());
    init_pool(cfg.jobs);
    if let Err(e) = write_manifest(&cfg, name, &out) {
        eprintln!("config error: {e}");
        return ExitCode::from(2);
    }
    match run_named(&cfg, name, &out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            // distinguish missing/invalid configuration from task failure
            let msg = e.to_string();
            eprintln!("error: {msg}");
            if msg.contains("config") || msg.contains("scene") || msg.contains("section") {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Coeff(c) => run_task("coeff", c),
        Command::Dini(c) => run_task("dini", c),
        Command::Beta(c) => run_task("beta", c),
        Command::Corona(c) => run_task("corona", c),
        Command::Capacity(c) => run_task("capacity", c),
        Command::Slice(c) => run_task("slice", c),
        Command::Spectral(c) => run_task("spectral", c),
        Command::Fourier(c) => run_task("fourier", c),
        Command::Verify { suite, seed, jobs, out } => {
            init_pool(jobs.or(env_jobs()));
            let seed = seed.unwrap_or(0);
            match run_suite(suite, seed) {
                Ok(checks) => {
                    let mut all_pass = true;
                    for c in &checks {
                        c.print();
                        all_pass &= c.pass;
                    }
                    if let Some(dir) = out.clone().or(env_out()) {
                        if std::fs::create_dir_all(&dir).is_ok() {
                            let rows: Vec<Vec<String>> = checks
                                .iter()
                                .map(|c| {
                                    vec![
                                        c.name.clone(),
                                        c.pass.to_string(),
                                        c.detail.replace(',', ";"),
                                    ]
                                })
                                .collect();
                            let _ = eps2_cli::io::write_csv(
                                &dir.join(format!("verify_{suite}.csv")),
                                "check,pass,detail",
                                &rows,
                            );
                        }
                    }
                    if all_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(msg) => {
                    eprintln!("config error: {msg}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
