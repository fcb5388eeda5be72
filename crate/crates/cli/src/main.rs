use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use mosbd_core::engine::{time_saving_counts, Algorithm, Engine, RunResult};
use mosbd_core::io::{
    load_archive_csv, parse_config, save_archive_csv, Compromise, ConfigFile, Summary, TraceWriter,
};
use mosbd_core::problems::error_index;
use mosbd_core::{mmd_select_objectives, ObjectiveVector};

#[derive(Parser)]
#[command(name = "mosbd", version, about = "Surrogate-assisted multi-objective optimizer")]
struct Cli {
    /// Log filter (error, warn, info, debug, trace).
    #[arg(long, global = true, env = "MOSBD_LOG", default_value = "info")]
    log: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization and write its artifacts to a directory.
    Run(RunArgs),
    /// Run several seeds and aggregate the error index.
    Benchmark(BenchmarkArgs),
    /// Pick the best-compromise member of an archive CSV.
    Select {
        #[arg(long)]
        archive: PathBuf,
    },
    /// Time saving of one run over a baseline run, from their counters.
    Compare {
        /// Baseline run directory or summary.json.
        baseline: PathBuf,
        /// Surrogate-assisted run directory or summary.json.
        candidate: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the algorithm of the configuration.
    #[arg(long)]
    algo: Option<Algorithm>,
    /// Output directory.
    #[arg(long, env = "MOSBD_OUT_DIR", default_value = "runs/latest")]
    out: PathBuf,
    /// Write a per-iteration trace (trace.ndjson).
    #[arg(long)]
    trace: bool,
    /// Save the final surrogate (surrogate.json).
    #[arg(long)]
    dump_model: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Overrides the seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    common: Common,
    /// Seeds to run, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
}

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log)
        .format_timestamp_secs()
        .init();
    if let Err(e) = dispatch(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => {
            let mut config = load_config(&args.common)?;
            if let Some(seed) = args.seed {
                config.run.seed = seed;
            }
            let summary = run_one(&config, &args.common, &args.common.out)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Benchmark(args) => benchmark(&args),
        Command::Select { archive } => {
            let rows = load_archive_csv(&archive)
                .with_context(|| format!("reading {}", archive.display()))?;
            let objectives: Vec<ObjectiveVector> = rows.iter().map(|r| r.phi.clone()).collect();
            let report = mmd_select_objectives(&objectives)?;
            let out = serde_json::json!({
                "chosen": Compromise::from_report(&report, &rows),
                "normalized_costs": report.normalized_costs,
                "ideal": report.ideal,
                "l1_distances": report.l1_distances,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(())
        }
        Command::Compare { baseline, candidate } => {
            let b = load_summary(&baseline)?;
            let c = load_summary(&candidate)?;
            if !(b.complete && c.complete) {
                bail!("both runs must be complete");
            }
            let wall = if b.wall_time_s > 0.0 {
                Some((b.wall_time_s - c.wall_time_s) / b.wall_time_s)
            } else {
                None
            };
            let out = serde_json::json!({
                "c_fw_baseline": b.c_fw,
                "c_fw_candidate": c.c_fw,
                "time_saving": time_saving_counts(b.c_fw, c.c_fw),
                "wall_time_saving": wall,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(())
        }
    }
}

fn load_config(common: &Common) -> Result<ConfigFile> {
    let mut config = parse_config(&common.config)
        .with_context(|| format!("loading {}", common.config.display()))?;
    if let Some(algo) = common.algo {
        config.run.algo = algo;
    }
    Ok(config)
}

fn load_summary(path: &Path) -> Result<Summary> {
    let file = if path.is_dir() { path.join("summary.json") } else { path.to_path_buf() };
    Summary::load(&file).with_context(|| format!("reading {}", file.display()))
}

/// Runs one configuration into `out`. On failure a summary flagged
/// incomplete is still written before the error is returned.
fn run_one(config: &ConfigFile, common: &Common, out: &Path) -> Result<Summary> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("config.json"), serde_json::to_string_pretty(config)? + "\n")?;
    let seed = config.run.seed;
    let algo = config.run.algo;
    match execute(config, common, out) {
        Ok(summary) => {
            summary.save(out.join("summary.json"))?;
            Ok(summary)
        }
        Err(e) => {
            Summary::incomplete(algo, seed, format!("{e:#}")).save(out.join("summary.json"))?;
            Err(e)
        }
    }
}

fn execute(config: &ConfigFile, common: &Common, out: &Path) -> Result<Summary> {
    let problem = config.problem.build()?;
    info!("{} run, seed {} -> {}", config.run.algo, config.run.seed, out.display());
    let mut trace = if common.trace {
        let file = fs::File::create(out.join("trace.ndjson"))?;
        Some(TraceWriter::new(BufWriter::new(file)))
    } else {
        None
    };
    let mut trace_error = None;
    let mut model_json = None;
    let result: RunResult = {
        let mut engine = Engine::new(config.run.clone(), &problem)?;
        let mut observe = |engine: &Engine<_>| {
            if let Some(t) = trace.as_mut() {
                if let Err(e) = t.write(&engine.trace_record()) {
                    trace_error.get_or_insert(e);
                }
            }
        };
        observe(&engine);
        while engine.step()?.is_none() {
            observe(&engine);
        }
        if engine.iteration() > 0 {
            observe(&engine);
        }
        if common.dump_model {
            model_json = engine.model().map(|m| m.to_json()).transpose()?;
        }
        engine.finish()
    };
    if let Some(t) = trace {
        t.finish()?;
    }
    if let Some(e) = trace_error {
        warn!("trace incomplete: {e}");
    }
    if let Some(json) = model_json {
        fs::write(out.join("surrogate.json"), json)?;
    }
    save_archive_csv(&result.archive, out.join("archive.csv"))?;
    let mut summary = Summary::from_result(&result, config.run.seed);
    let objectives = result.archive.objectives();
    if let Some(front) = config.problem.true_front()? {
        summary.xi = Some(error_index(&objectives, &front)?);
    }
    if !objectives.is_empty() {
        let rows = load_archive_csv(out.join("archive.csv"))?;
        let report = mmd_select_objectives(&objectives)?;
        summary.compromise = Some(Compromise::from_report(&report, &rows));
    }
    Ok(summary)
}

fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    let base = load_config(&args.common)?;
    if args.seeds.is_empty() {
        bail!("no seeds given");
    }
    let mut rows = Vec::new();
    for &seed in &args.seeds {
        let mut config = base.clone();
        config.run.seed = seed;
        let dir = args.common.out.join(format!("seed-{seed}"));
        let summary = run_one(&config, &args.common, &dir)?;
        rows.push(summary);
    }
    let mut xi: Vec<f64> = rows.iter().filter_map(|s| s.xi).collect();
    xi.sort_by(f64::total_cmp);
    let median = |v: &[f64]| -> Option<f64> {
        match v.len() {
            0 => None,
            n if n % 2 == 1 => Some(v[n / 2]),
            n => Some(0.5 * (v[n / 2 - 1] + v[n / 2])),
        }
    };
    let mut c_fw: Vec<f64> = rows.iter().map(|s| s.c_fw as f64).collect();
    c_fw.sort_by(f64::total_cmp);
    let out = serde_json::json!({
        "algo": base.run.algo,
        "seeds": args.seeds,
        "xi": xi,
        "xi_median": median(&xi),
        "xi_min": xi.first(),
        "xi_max": xi.last(),
        "c_fw_median": median(&c_fw),
        "runs": rows,
    });
    let text = serde_json::to_string_pretty(&out)?;
    fs::write(args.common.out.join("benchmark.json"), text.clone() + "\n")?;
    println!("{text}");
    Ok(())
}
