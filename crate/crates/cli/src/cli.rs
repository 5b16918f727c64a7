//! Command-line definitions and command implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use breathing_kmeans::datagen::{separated_centers, GRID_SIGMA_X, GRID_SIGMA_Y, GRID_SPACING};
use breathing_kmeans::rng::stream;
use breathing_kmeans::{
    bkm_fit, generate, seed_and_fit, Codebook, FitResult, GenSpec, Generated, MixtureSpec,
    Norm25Params,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{report_table, run_campaign, write_reports};
use crate::error::{CliError, CliResult};
use crate::format::{read_codebook, read_data, write_codebook, write_data, write_file};
use crate::plot::{render_svg, PlotOptions};
use crate::spec::{AlgoSettings, BenchSpec};

#[derive(Debug, Parser)]
#[command(
    name = "bkm",
    version,
    about = "Breathing k-means: generate data, fit, benchmark, plot"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic data set.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Fit a codebook to a data file.
    Fit(FitArgs),
    /// Run paired k-means++ / breathing k-means campaigns from a spec file.
    Bench(BenchArgs),
    /// Draw data and codebooks as an SVG scatter plot.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GenCommon {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum GenFamily {
    /// Points uniform on the unit square.
    Uniform {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Axis-aligned Gaussians on a regular 2-D grid.
    GaussianGrid {
        #[arg(long, default_value_t = 5)]
        rows: usize,
        #[arg(long, default_value_t = 5)]
        cols: usize,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = GRID_SIGMA_X)]
        sigma_x: f64,
        #[arg(long, default_value_t = GRID_SIGMA_Y)]
        sigma_y: f64,
        #[arg(long, default_value_t = GRID_SPACING)]
        spacing: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Isotropic Gaussians around centers drawn uniformly in a hypercube.
    Norm25 {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 15)]
        d: usize,
        #[arg(long, default_value_t = 25)]
        g: usize,
        #[arg(long, default_value_t = 500.0)]
        side: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Also write the true centers here.
        #[arg(long)]
        centers_out: Option<PathBuf>,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Well-separated circular Gaussians (random centers at least
    /// `separation` apart in `[0, side]^d`).
    Mixture {
        #[arg(long, default_value_t = 14)]
        g: usize,
        #[arg(long, default_value_t = 4000)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 100.0)]
        side: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 12.0)]
        separation: f64,
        #[arg(long)]
        centers_out: Option<PathBuf>,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// k-means++ seeding plus Lloyd, best of n_init.
    Kmpp,
    /// Breathing k-means seeded by k-means++.
    Bkm,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Whitespace-separated data file.
    pub data: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Algo::Bkm)]
    pub algo: Algo,
    #[arg(long, default_value_t = 5)]
    pub m: usize,
    #[arg(long, default_value_t = 1.1)]
    pub theta: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10)]
    pub n_init: usize,
    /// kmeanspp, random or file:PATH
    #[arg(long, default_value = "kmeanspp")]
    pub init: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    /// Write the fitted codebook here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark spec (TOML).
    pub spec: PathBuf,
    #[arg(long, default_value = "bench-out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Override every problem's run count.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Override the spec's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub data: PathBuf,
    /// Codebook file; repeat for several codebooks.
    #[arg(long = "codebook")]
    pub codebooks: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub x_axis: usize,
    #[arg(long, default_value_t = 1)]
    pub y_axis: usize,
    #[arg(long, default_value_t = 640.0)]
    pub width: f64,
    #[arg(long, default_value_t = 640.0)]
    pub height: f64,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Runtime(format!("stdout: {e}")))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Gen { family } => cmd_gen(family, out),
        Command::Fit(args) => cmd_fit(args, out),
        Command::Bench(args) => cmd_bench(args, out),
        Command::Plot(args) => cmd_plot(args, out),
    }
}

/// Data set for a `gen` invocation; a pure function of the flags.
pub fn generate_family(family: &GenFamily) -> CliResult<Generated<f64>> {
    let usage = |e: breathing_kmeans::Error| CliError::Usage(e.to_string());
    match family {
        GenFamily::Uniform { n, common } => {
            generate(&GenSpec::UniformSquare { n: *n }, common.seed).map_err(usage)
        }
        GenFamily::GaussianGrid {
            rows,
            cols,
            n,
            sigma_x,
            sigma_y,
            spacing,
            common,
        } => generate(
            &GenSpec::GaussianGrid {
                rows: *rows,
                cols: *cols,
                n: *n,
                sigma_x: *sigma_x,
                sigma_y: *sigma_y,
                spacing: *spacing,
            },
            common.seed,
        )
        .map_err(usage),
        GenFamily::Norm25 {
            n,
            d,
            g,
            side,
            sigma,
            common,
            ..
        } => generate(
            &GenSpec::Norm25Style(Norm25Params {
                n: *n,
                d: *d,
                g: *g,
                side: *side,
                sigma: *sigma,
            }),
            common.seed,
        )
        .map_err(usage),
        GenFamily::Mixture {
            g,
            n,
            d,
            side,
            sigma,
            separation,
            common,
            ..
        } => {
            let centers =
                separated_centers(*g, *d, *side, *separation, &mut stream(common.seed, &[0]))
                    .map_err(usage)?;
            let spec = GenSpec::GaussianMixture(MixtureSpec::isotropic(centers, *sigma, *n));
            generate(&spec, common.seed).map_err(usage)
        }
    }
}

fn cmd_gen(family: GenFamily, out: &mut dyn Write) -> CliResult<()> {
    let generated = generate_family(&family)?;
    let (common, centers_out) = match &family {
        GenFamily::Uniform { common, .. } | GenFamily::GaussianGrid { common, .. } => {
            (common, None)
        }
        GenFamily::Norm25 {
            common,
            centers_out,
            ..
        }
        | GenFamily::Mixture {
            common,
            centers_out,
            ..
        } => (common, centers_out.as_ref()),
    };
    write_data(&common.output, &generated.data).map_err(|e| io_err(&common.output, e))?;
    if let (Some(path), Some(centers)) = (centers_out, &generated.centers) {
        write_codebook(path, centers).map_err(|e| io_err(path, e))?;
    }
    emit(
        out,
        &format!(
            "n = {}\nd = {}\nseed = {}\nwrote {}\n",
            generated.data.n(),
            generated.data.dim(),
            common.seed,
            common.output.display()
        ),
    )
}

fn fit_settings(args: &FitArgs) -> AlgoSettings {
    AlgoSettings {
        m: Some(args.m),
        theta: Some(args.theta),
        tol: Some(args.tol),
        epsilon: Some(args.epsilon),
        n_init: Some(args.n_init),
        max_iter: Some(args.max_iter),
        init: Some(args.init.clone()),
    }
}

/// Runs `fit` and returns the result without printing.
pub fn fit(args: &FitArgs) -> CliResult<FitResult<f64>> {
    let x = read_data::<f64>(&args.data).map_err(data_err)?;
    let cfg = fit_settings(args).to_config(args.seed, Path::new("."))?;
    if args.k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    if args.k > x.n() {
        return Err(CliError::Data(format!(
            "k = {} exceeds n = {}",
            args.k,
            x.n()
        )));
    }
    match args.algo {
        Algo::Bkm => Ok(bkm_fit(&x, args.k, &cfg)?),
        Algo::Kmpp => {
            let start = std::time::Instant::now();
            let r = seed_and_fit(&x, args.k, &cfg.seeding, &cfg.lloyd)?;
            Ok(FitResult {
                sse: r.sse,
                seeding_sse: r.sse,
                breathing_cycles: 0,
                lloyd_iterations_total: r.iterations,
                wall_time: start.elapsed(),
                rng_seed: args.seed,
                codebook: r.codebook,
            })
        }
    }
}

fn cmd_fit(args: FitArgs, out: &mut dyn Write) -> CliResult<()> {
    let r = fit(&args)?;
    if let Some(path) = &args.output {
        write_codebook(path, &r.codebook).map_err(|e| io_err(path, e))?;
    }
    let algo = match args.algo {
        Algo::Kmpp => "kmpp",
        Algo::Bkm => "bkm",
    };
    emit(
        out,
        &format!(
            "algorithm = {algo}\nk = {}\nsse = {:.10e}\nseeding_sse = {:.10e}\nbreathing_cycles = {}\nlloyd_iterations = {}\nwall_time_s = {:.6}\nseed = {}\n",
            r.codebook.k(),
            r.sse,
            r.seeding_sse,
            r.breathing_cycles,
            r.lloyd_iterations_total,
            r.wall_time.as_secs_f64(),
            r.rng_seed
        ),
    )
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = BenchSpec::load(&args.spec)?;
    let base = args.spec.parent().unwrap_or(Path::new("."));
    let mut problems = spec.problems(base)?;
    if let Some(runs) = args.runs {
        if runs == 0 {
            return Err(CliError::Usage("--runs must be at least 1".into()));
        }
        problems.iter_mut().for_each(|p| p.runs = runs);
    }
    let master = args.seed.unwrap_or(spec.seed);
    let reports = run_campaign(&problems, master, base, args.workers)?;
    let files = write_reports(&args.out_dir, &reports)?;
    emit(out, &report_table(&reports))?;
    emit(
        out,
        &format!(
            "\nwrote {}, {}, {}, {}\n",
            files.runs.display(),
            files.summary.display(),
            files.timings.display(),
            files.table.display()
        ),
    )
}

fn cmd_plot(args: PlotArgs, out: &mut dyn Write) -> CliResult<()> {
    let data = read_data::<f64>(&args.data).map_err(data_err)?;
    let codebooks: Vec<Codebook<f64>> = args
        .codebooks
        .iter()
        .map(|p| read_codebook(p).map_err(data_err))
        .collect::<CliResult<_>>()?;
    let opts = PlotOptions {
        x_axis: args.x_axis,
        y_axis: args.y_axis,
        width: args.width,
        height: args.height,
        ..PlotOptions::default()
    };
    let svg = render_svg(&data, &codebooks, &opts)?;
    write_file(&args.output, &svg).map_err(|e| io_err(&args.output, e))?;
    emit(out, &format!("wrote {}\n", args.output.display()))
}
