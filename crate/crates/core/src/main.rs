use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use elashift::ela::{compute_all, Dataset};
use elashift::error::{Error, Result};
use elashift::report::{self, ColorScale};
use elashift::runner::{self, ExperimentConfig, RunOptions};
use elashift::{doe, embed, io, suite};

/// Landscape features under random Gaussian embeddings.
#[derive(Parser)]
#[command(name = "elashift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark functions.
    #[command(subcommand)]
    Suite(SuiteCmd),
    /// Sampling designs.
    #[command(subcommand)]
    Doe(DoeCmd),
    /// Project points through a seeded Gaussian embedding.
    Embed(EmbedArgs),
    /// Compute all 61 features of a sample.
    Features(FeaturesArgs),
    /// Run an experiment described by a config file.
    Run(RunArgs),
    /// Tables and figures from shifts.csv.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Evaluate one instance at one point.
    Eval {
        #[arg(long)]
        fid: u32,
        #[arg(long)]
        iid: u32,
        #[arg(long)]
        dim: usize,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Subcommand)]
enum DoeCmd {
    /// Latin hypercube sample of [-5, 5]^dim.
    Sample {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    dim_in: usize,
    #[arg(long)]
    dim_out: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Points CSV with a header row.
    #[arg(long = "in")]
    input: PathBuf,
    /// Single-column objective CSV with a header row.
    #[arg(long)]
    obj: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Skip cells already on disk.
    #[arg(long)]
    resume: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum ReportCmd {
    Heatmap {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Violin {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        fid: u32,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Suite(SuiteCmd::Eval { fid, iid, dim, point }) => {
            let x = point
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Domain(format!("cannot parse point `{point}`")))?;
            if x.len() != dim {
                return Err(Error::Domain(format!(
                    "point has {} coordinates, --dim is {dim}",
                    x.len()
                )));
            }
            println!("{}", suite::make_instance(fid, iid, dim)?.evaluate(&x)?);
        }
        Command::Doe(DoeCmd::Sample { size, dim, seed, out }) => {
            let d = doe::lhs(size, dim, seed)?;
            emit(out.as_deref(), &io::matrix_to_csv(&d.points, "x"))?;
        }
        Command::Embed(a) => {
            let x = io::read_matrix(&a.input)?;
            if x.ncols() != a.dim_in {
                return Err(Error::Domain(format!(
                    "input has {} columns, --dim-in is {}",
                    x.ncols(),
                    a.dim_in
                )));
            }
            let e = embed::sample_embedding(a.dim_out, a.dim_in, a.seed)?;
            emit(a.out.as_deref(), &io::matrix_to_csv(&e.project(&x)?, "z"))?;
        }
        Command::Features(a) => {
            let ds = Dataset::new(io::read_matrix(&a.input)?, io::read_column(&a.obj)?)?;
            emit(a.out.as_deref(), &io::feature_vector_to_csv(&compute_all(&ds, a.seed)))?;
        }
        Command::Run(a) => {
            let cfg = ExperimentConfig::load(&a.config)?;
            let s = runner::execute(
                &cfg,
                &RunOptions {
                    workers: a.workers,
                    resume: a.resume,
                },
            )?;
            eprintln!(
                "{} cells planned, {} computed, {} reused; {} feature rows, {} shift rows ({} without a delta) in {}",
                s.planned_cells,
                s.computed_cells,
                s.skipped_cells,
                s.feature_rows,
                s.shift_rows,
                s.missing_shifts,
                cfg.output_dir.display()
            );
        }
        Command::Report(ReportCmd::Heatmap { input, size, dim, out }) => {
            let t = report::build_heatmap(&input, size, dim)?;
            if t.is_empty() {
                eprintln!("warning: no shift records for S = {size}, d = {dim}; nothing written");
                return Ok(());
            }
            let name = report::emit_heatmap(&t, &out, &ColorScale::default())?;
            eprintln!("wrote {name}.csv and {name}.svg to {}", out.display());
        }
        Command::Report(ReportCmd::Violin {
            input,
            fid,
            size,
            dim,
            out,
        }) => {
            let t = report::build_violin(&input, fid, size, dim)?;
            if t.is_empty() {
                eprintln!("warning: no shift records for f{fid}, S = {size}, d = {dim}; nothing written");
                return Ok(());
            }
            let name = report::emit_violin(&t, &out)?;
            eprintln!("wrote {name}.csv and {name}.svg to {}", out.display());
        }
    }
    Ok(())
}

/// 1 for bad arguments or data, 2 for configuration, 3 for file trouble.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Degenerate(_) => 1,
        Error::Config { .. } => 2,
        Error::Io { .. } | Error::Parse { .. } => 3,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
