use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use isoband_core::pipeline::{bench, builtin, builtin_specs, run_pipeline, ProblemSpec, VerifyLevel};

#[derive(Parser)]
#[command(
    name = "isoband",
    about = "Reduces 2D periodic elliptic operators to constant-metric form and computes Floquet-Bloch bands"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run the reduction pipeline for a problem description.
    Run {
        /// Path to a problem JSON, or the name of a built-in preset.
        spec: String,
        /// Output directory (bands.csv, report.json, map.isob, coeffs.isob).
        #[arg(long)]
        out: PathBuf,
        /// Cap the worker thread count.
        #[arg(long)]
        jobs: Option<usize>,
        /// Verification depth: fast (residual checks) or full (equivalences).
        #[arg(long, value_enum, default_value = "fast")]
        verify: VerifyArg,
    },
    /// Time the pipeline stages over repeated runs.
    Bench {
        /// Path to a problem JSON, or the name of a built-in preset.
        spec: String,
        /// Number of repetitions (median is reported).
        #[arg(long, default_value_t = 3)]
        repeat: usize,
        /// Scratch directory for run outputs.
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the built-in problem presets.
    Presets {
        /// Print the JSON of one preset instead of the list.
        #[arg(long)]
        dump: Option<String>,
    },
}

fn load_spec(arg: &str) -> anyhow::Result<ProblemSpec> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading problem description {}", path.display()))?;
        return serde_json::from_str(&text)
            .with_context(|| format!("parsing problem description {}", path.display()));
    }
    if let Some(spec) = builtin(arg) {
        return Ok(spec);
    }
    bail!(
        "'{arg}' is neither a readable file nor a built-in preset (see `isoband presets`)"
    );
}

fn configure_jobs(jobs: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            spec,
            out,
            jobs,
            verify,
        } => {
            configure_jobs(jobs)?;
            let spec = load_spec(&spec)?;
            let level = match verify {
                VerifyArg::Fast => VerifyLevel::Fast,
                VerifyArg::Full => VerifyLevel::Full,
            };
            let report = run_pipeline(&spec, &out, level)?;
            for s in &report.stages {
                println!("stage {:<22} {:>10.2} ms", s.stage, s.millis);
            }
            if let Some(k) = report.kappa {
                println!("kappa = {:+.12e} {:+.12e}i", k[0], k[1]);
            }
            if let Some(a) = report.a_matrix {
                println!(
                    "A = [[{:+.12e}, {:+.12e}], [{:+.12e}, {:+.12e}]]",
                    a[0][0], a[0][1], a[1][0], a[1][1]
                );
            }
            for c in &report.checks {
                println!(
                    "{} {:<32} value {:>12.4e}  threshold {:>9.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.threshold
                );
            }
            if let Some(csv) = &report.bands_csv {
                println!("bands written to {csv}");
            }
            println!(
                "report written to {}",
                out.join("report.json").display()
            );
            Ok(report.all_passed)
        }
        Command::Bench {
            spec,
            repeat,
            out,
            jobs,
        } => {
            configure_jobs(jobs)?;
            let spec = load_spec(&spec)?;
            let table = bench(&spec, &out, repeat)?;
            println!("{:<22} {:>12}", "stage", "median ms");
            for row in table {
                println!("{:<22} {:>12.2}", row.stage, row.millis);
            }
            Ok(true)
        }
        Command::Presets { dump } => {
            match dump {
                Some(name) => {
                    let spec = builtin(&name)
                        .with_context(|| format!("unknown preset '{name}'"))?;
                    println!("{}", serde_json::to_string_pretty(&spec)?);
                }
                None => {
                    for (name, spec) in builtin_specs() {
                        let geom = match spec.geometry {
                            isoband_core::pipeline::Geometry::Torus => "torus",
                            isoband_core::pipeline::Geometry::Strip => "strip",
                        };
                        println!(
                            "{name:<24} {geom:<6} grid {}x{}, M = {}, {} k-points",
                            spec.solver.grid[0],
                            spec.solver.grid[1],
                            spec.solver.cutoff,
                            spec.solver.k_points
                        );
                    }
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more verification checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
