use clap::{Parser, Subcommand};
use polyscat::experiments::{
    far_field_of, run_nodal_pipeline, run_oracle_check, run_path_pipeline, run_solve, run_uniqueness, write,
    ExperimentConfig, ExperimentError,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Sound-soft scattering by polygons: solves, far fields, nodal sets and hidden paths.
#[derive(Parser)]
#[command(name = "polyscat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomised choices; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Progress and timings on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the selected scatterer and write a summary and its far field.
    Solve,
    /// Far-field patterns of every scatterer.
    Farfield,
    /// Nodal decomposition, flat-point report and boundedness radius.
    Nodal,
    /// Hidden path, its certification report and the flat-point walk.
    Path,
    /// Pairwise far-field distances between all scatterers.
    Uniqueness,
    /// Solver checks against the disk series, the radial limit and reciprocity.
    OracleCheck,
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    let path = cli
        .config
        .ok_or_else(|| ExperimentError::Config("--config <file> is required".into()))?;
    let (mut cfg, base) = ExperimentConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .or_else(|| cfg.output_dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| PathBuf::from("out"));
    let t0 = Instant::now();
    let log = |msg: String| {
        if cli.verbose {
            eprintln!("[{:8.2}s] {msg}", t0.elapsed().as_secs_f64());
        }
    };
    match cli.command {
        Command::Solve => {
            let (summary, pattern) = run_solve(&cfg, &base)?;
            log(format!(
                "{}: {} unknowns, residual {:.2e}, condition {:.2e}",
                summary.scatterer, summary.dimension, summary.residual, summary.condition_estimate
            ));
            write(&out, "solve.json", &serde_json::to_string_pretty(&summary).expect("serialisable"))?;
            write(&out, "farfield.csv", &pattern.to_csv())?;
        }
        Command::Farfield => {
            let wave = cfg.wave.params()?;
            let mut failed = 0;
            for (entry, loaded) in cfg.scatterers.iter().zip(cfg.load_scatterers(&base)) {
                match loaded.and_then(|s| far_field_of(&s, &wave, cfg.directions)) {
                    Ok(p) => {
                        log(format!("{}: max |u∞| = {:.6e}", entry.name, p.max_abs()));
                        write(&out, &format!("farfield_{}.csv", entry.name), &p.to_csv())?;
                    }
                    Err(e) => {
                        failed += 1;
                        eprintln!("{}: {e}", entry.name);
                    }
                }
            }
            if failed == cfg.scatterers.len() {
                return Err(ExperimentError::Config("every scatterer failed".into()));
            }
        }
        Command::Nodal => {
            let a = run_nodal_pipeline(&cfg, &base)?;
            log(format!(
                "{} domains, {} flat segments, R_nodal = {:.4}",
                a.report.domains,
                a.report.flat_segments.len(),
                a.report.boundedness.r_nodal
            ));
            a.emit(&out)?;
        }
        Command::Path => {
            let a = run_path_pipeline(&cfg, &base)?;
            match &a.report.error {
                Some(e) => eprintln!("path construction failed: {e}"),
                None => log(format!(
                    "certified: {}, {} flat visits",
                    a.report.certified,
                    a.report.walk.len()
                )),
            }
            a.emit(&out)?;
        }
        Command::Uniqueness => {
            let r = run_uniqueness(&cfg, &base)?;
            for f in &r.failures {
                eprintln!("{}: {}", f.label, f.error);
            }
            log(format!("{} scatterers, {} failed", r.matrix.labels.len(), r.failures.len()));
            r.emit(&out, &cfg.wave.params()?)?;
        }
        Command::OracleCheck => {
            let r = run_oracle_check(&cfg, &base)?;
            for row in &r.disk {
                log(format!("disk ka = {}: max relative error {:.3e}", row.ka, row.max_relative_error));
            }
            write(&out, "oracle_report.json", &serde_json::to_string_pretty(&r).expect("serialisable"))?;
        }
    }
    log(format!("wrote {}", out.display()));
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
