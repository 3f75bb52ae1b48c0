use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use grf_swarm::experiments::{
    build_scenario, l_corridor_waypoints, run_batch, run_suite, run_trial_observed, ScenarioConfig,
    ScenarioKind, ShapeKind, SuiteOptions, BASE_MASS,
};
use grf_swarm::trace::{summary_csv, time_series_csv, trial_times_csv, write_atomic, TraceWriter};
use grf_swarm::Error;

/// Gibbs random field swarm simulator for cooperative object transport.
#[derive(Parser, Debug)]
#[command(name = "grf-swarm", version)]
struct Cli {
    /// Worker threads for trials and per-robot sampling.
    #[arg(long, global = true, env = "GRF_SWARM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one trial and optionally write its per-tick trace.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSONL trace output.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Directory for the manifest and the trial summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch of trials with consecutive seeds.
    Batch {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 30)]
        trials: u64,
        /// First seed of the batch.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run the full experiment suite and check the expected trends.
    Suite {
        #[arg(long, default_value_t = 30)]
        trials: u64,
        /// Trials per robustness cell.
        #[arg(long, default_value_t = 10)]
        robustness_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tick_limit: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Check a scenario config file.
    Validate { config: PathBuf },
    /// Print the built-in config of a scenario as JSON.
    Show {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScenarioName {
    Scalability,
    Ideal,
    Failure,
    GoalChange,
    Robustness,
    Waypoints,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "scalability")]
    scenario: ScenarioName,
    /// Robot count (scalability only).
    #[arg(long, default_value_t = 10)]
    robots: usize,
    /// Object shape (robustness only).
    #[arg(long, default_value = "rect")]
    shape: String,
    /// Linear object scale (robustness only).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Object mass in kg (robustness only).
    #[arg(long, default_value_t = BASE_MASS)]
    mass: f64,
    /// Scenario config file; overrides --scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tick_limit: Option<u64>,
}

impl ScenarioArgs {
    fn resolve(&self) -> grf_swarm::Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path).map_err(|e| with_file(path, e))?,
            None => {
                let kind = match self.scenario {
                    ScenarioName::Scalability => ScenarioKind::Scalability(self.robots),
                    ScenarioName::Ideal => ScenarioKind::IdealAdaptability,
                    ScenarioName::Failure => ScenarioKind::FailureAdaptability,
                    ScenarioName::GoalChange => ScenarioKind::GoalChangeAdaptability,
                    ScenarioName::Robustness => ScenarioKind::Robustness {
                        shape: self.shape.parse::<ShapeKind>()?,
                        scale: self.scale,
                        mass: self.mass,
                    },
                    ScenarioName::Waypoints => ScenarioKind::Waypoints(l_corridor_waypoints()),
                };
                build_scenario(&kind)?
            }
        };
        if let Some(t) = self.tick_limit {
            cfg.tick_limit = t;
            cfg.validate()?;
        }
        Ok(cfg)
    }

    fn source(&self) -> Option<String> {
        self.config.as_ref().map(|p| p.display().to_string())
    }
}

fn with_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Config {
            path: path.display().to_string(),
            reason: io.to_string(),
        },
        other => other,
    }
}

#[derive(Serialize)]
struct RunManifest {
    config_path: Option<String>,
    config_sha256: String,
    seeds: Vec<u64>,
    output_dir: String,
    tool_version: &'static str,
}

fn config_hash(cfg: &ScenarioConfig) -> grf_swarm::Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_manifest(
    out: &Path,
    source: Option<String>,
    cfgs: &[&ScenarioConfig],
    seeds: Vec<u64>,
) -> grf_swarm::Result<()> {
    let mut hasher = Sha256::new();
    for cfg in cfgs {
        hasher.update(config_hash(cfg)?.as_bytes());
    }
    let manifest = RunManifest {
        config_path: source,
        config_sha256: if cfgs.len() == 1 {
            config_hash(cfgs[0])?
        } else {
            hex::encode(hasher.finalize())
        },
        seeds,
        output_dir: out.display().to_string(),
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    write_atomic(
        &out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )
}

enum Outcome {
    Ok,
    TrendFailed,
}

fn execute(cli: Cli) -> grf_swarm::Result<Outcome> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            trace,
            out,
        } => {
            let cfg = scenario.resolve()?;
            if let Some(out) = &out {
                write_manifest(out, scenario.source(), &[&cfg], vec![seed])?;
            }
            let result = match &trace {
                Some(path) => {
                    // stream to a temp file, rename at the end
                    let dir = path
                        .parent()
                        .filter(|p| !p.as_os_str().is_empty())
                        .unwrap_or(Path::new("."));
                    std::fs::create_dir_all(dir)?;
                    let tmp = dir.join(format!(
                        ".{}.{}.tmp",
                        path.file_name()
                            .map(|n| n.to_string_lossy().into_owned())
                            .unwrap_or_default(),
                        std::process::id()
                    ));
                    let mut writer = TraceWriter::new(BufWriter::new(std::fs::File::create(&tmp)?));
                    let result = run_trial_observed(&cfg, seed, |w| writer.write_world(w));
                    let result = result.and_then(|r| writer.finish().map(|_| r));
                    match result {
                        Ok(r) => {
                            std::fs::rename(&tmp, path)?;
                            r
                        }
                        Err(e) => {
                            let _ = std::fs::remove_file(&tmp);
                            return Err(e);
                        }
                    }
                }
                None => run_trial_observed(&cfg, seed, |_| Ok(()))?,
            };
            if let Some(out) = &out {
                write_atomic(
                    &out.join("trial.json"),
                    serde_json::to_string(&result)?.as_bytes(),
                )?;
            }
            println!(
                "{} seed {}: {:?} after {:.1} s",
                cfg.name, seed, result.outcome, result.transport_time
            );
            Ok(Outcome::Ok)
        }
        Command::Batch {
            scenario,
            trials,
            seed,
            out,
        } => {
            let mut cfg = scenario.resolve()?;
            let seeds: Vec<u64> = (seed..seed + trials).collect();
            cfg.seeds = seeds.clone();
            cfg.validate()?;
            write_manifest(&out, scenario.source(), &[&cfg], seeds.clone())?;
            let (results, stats) = run_batch(&cfg, &seeds)?;
            write_atomic(
                &out.join("summary.csv"),
                summary_csv(&[(cfg.clone(), stats.clone())]).as_bytes(),
            )?;
            write_atomic(
                &out.join("trials.csv"),
                trial_times_csv(&results).as_bytes(),
            )?;
            write_atomic(
                &out.join("series.csv"),
                time_series_csv(&results, cfg.dt).as_bytes(),
            )?;
            let mut jsonl = String::new();
            for r in &results {
                jsonl.push_str(&serde_json::to_string(r)?);
                jsonl.push('\n');
            }
            write_atomic(&out.join("trials.jsonl"), jsonl.as_bytes())?;
            println!(
                "{} ({} robots): n={} success_rate={:.3} mean={:.1}s ci95={:.1}s",
                cfg.name,
                cfg.robot_count,
                stats.n,
                stats.success_rate,
                stats.mean_time,
                stats.ci95_halfwidth
            );
            Ok(Outcome::Ok)
        }
        Command::Suite {
            trials,
            robustness_trials,
            seed,
            tick_limit,
            out,
        } => {
            let seeds: Vec<u64> = (seed..seed + trials).collect();
            let rob_seeds: Vec<u64> = (seed..seed + robustness_trials).collect();
            let opts = SuiteOptions { tick_limit };
            let report = run_suite(&seeds, &rob_seeds, &opts)?;
            let cfgs: Vec<&ScenarioConfig> = report.rows.iter().map(|(c, _)| c).collect();
            write_manifest(&out, None, &cfgs, seeds)?;
            write_atomic(
                &out.join("summary.csv"),
                summary_csv(&report.rows).as_bytes(),
            )?;
            for check in &report.checks {
                println!("{check}");
            }
            Ok(if report.passed() {
                Outcome::Ok
            } else {
                Outcome::TrendFailed
            })
        }
        Command::Validate { config } => {
            ScenarioConfig::load(&config).map_err(|e| with_file(&config, e))?;
            println!("{}: ok", config.display());
            Ok(Outcome::Ok)
        }
        Command::Show { scenario } => {
            writeln!(
                std::io::stdout().lock(),
                "{}",
                scenario.resolve()?.to_json()?
            )?;
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| execute(cli)) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::TrendFailed) => ExitCode::from(1),
        Err(e @ (Error::Config { .. } | Error::InvalidParam { .. } | Error::InvalidPolygon(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
