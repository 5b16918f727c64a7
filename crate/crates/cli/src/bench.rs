//! Paired k-means++ / breathing k-means benchmark campaigns.
//!
//! Run `r` of problem `p` uses the seed `derive_path(master, [p, r])`; the
//! problem's generated data set uses `derive_path(master, [p, DATA_STREAM])`.
//! Each run first fits k-means++ and then breathes from exactly that
//! solution, so both algorithms see the same seeding. Runs may execute on a
//! worker pool; results are reassembled in (problem, run) order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use breathing_kmeans::rng::derive_path;
use breathing_kmeans::{
    breathe_from, generate, seed_and_fit, BreathingConfig, DataMatrix, ExperimentReport, PairedRun,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::format::{read_data, write_file};
use crate::spec::{Problem, Source};

/// Stream index reserved for problem data generation.
pub const DATA_STREAM: u64 = u64::MAX;

pub fn run_seed(master: u64, problem: usize, run: usize) -> u64 {
    derive_path(master, &[problem as u64, run as u64])
}

pub fn data_seed(master: u64, problem: usize) -> u64 {
    derive_path(master, &[problem as u64, DATA_STREAM])
}

pub fn load_problem_data(
    problem: &Problem,
    master: u64,
    index: usize,
) -> CliResult<DataMatrix<f64>> {
    match &problem.source {
        Source::Generator(spec) => Ok(generate(spec, data_seed(master, index))
            .map_err(|e| CliError::Usage(format!("problem `{}`: {e}", problem.name)))?
            .data),
        Source::File(path) => read_data(path).map_err(|e| CliError::Data(e.to_string())),
    }
}

/// One paired run: k-means++ followed by breathing from its result.
pub fn paired_run(
    x: &DataMatrix<f64>,
    k: usize,
    cfg: &BreathingConfig<f64>,
) -> CliResult<PairedRun> {
    let start = Instant::now();
    let seeded = seed_and_fit(x, k, &cfg.seeding, &cfg.lloyd)?;
    let cpu_kmpp = start.elapsed();
    let sse_kmpp = seeded.sse;
    let fit = breathe_from(x, seeded, cfg)?;
    let cpu_bkm = start.elapsed();
    Ok(PairedRun {
        sse_kmpp,
        sse_bkm: fit.sse,
        cpu_kmpp,
        cpu_bkm,
        rng_seed: cfg.seeding.rng_seed,
    })
}

/// Runs every problem of a campaign on `workers` threads.
pub fn run_campaign(
    problems: &[Problem],
    master: u64,
    base: &Path,
    workers: usize,
) -> CliResult<Vec<ExperimentReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        problems
            .iter()
            .enumerate()
            .map(|(pi, problem)| run_problem(problem, pi, master, base))
            .collect()
    })
}

fn run_problem(
    problem: &Problem,
    index: usize,
    master: u64,
    base: &Path,
) -> CliResult<ExperimentReport> {
    let x = load_problem_data(problem, master, index)?;
    // validate settings once before spawning runs
    problem.algo.to_config(0, base)?;
    let runs: Vec<PairedRun> = (0..problem.runs)
        .into_par_iter()
        .map(|r| {
            let cfg = problem.algo.to_config(run_seed(master, index, r), base)?;
            paired_run(&x, problem.k, &cfg)
                .map_err(|e| CliError::Runtime(format!("problem `{}` run {r}: {e}", problem.name)))
        })
        .collect::<CliResult<_>>()?;
    Ok(ExperimentReport::new(
        &problem.name,
        x.n(),
        x.dim(),
        problem.k,
        runs,
    )?)
}

fn pct(v: f64) -> String {
    format!("{:.2}%", 100.0 * v)
}

/// Per-run results without timings; byte-identical for a fixed master seed.
pub fn runs_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from("problem,run,seed,sse_kmpp,sse_bkm,delta_sse\n");
    for rep in reports {
        for (i, r) in rep.runs.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                rep.problem,
                i,
                r.rng_seed,
                r.sse_kmpp,
                r.sse_bkm,
                r.delta_sse().value
            )
            .unwrap();
        }
    }
    out
}

/// Per-problem SSE statistics without timings; deterministic like [`runs_csv`].
pub fn summary_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from(
        "problem,n,d,k,runs,mean_sse_kmpp,rel_std_kmpp,mean_sse_bkm,rel_std_bkm,mean_delta_sse\n",
    );
    for rep in reports {
        let s = &rep.stats;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            rep.problem,
            rep.n,
            rep.d,
            rep.k,
            s.runs,
            s.sse_kmpp.mean,
            s.sse_kmpp.rel_std,
            s.sse_bkm.mean,
            s.sse_bkm.rel_std,
            s.mean_delta_sse
        )
        .unwrap();
    }
    out
}

/// Wall-clock times per run (seconds); varies between executions.
pub fn timings_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from("problem,run,cpu_kmpp_s,cpu_bkm_s,delta_cpu\n");
    for rep in reports {
        for (i, r) in rep.runs.iter().enumerate() {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6}",
                rep.problem,
                i,
                r.cpu_kmpp.as_secs_f64(),
                r.cpu_bkm.as_secs_f64(),
                r.delta_cpu().value
            )
            .unwrap();
        }
    }
    out
}

/// Aligned text table, one row per problem.
pub fn report_table(reports: &[ExperimentReport]) -> String {
    let header = [
        "data set",
        "n",
        "d",
        "k",
        "SSE(km++)",
        "±",
        "SSE(bkm)",
        "±",
        "ΔSSE",
        "ΔCPU",
    ];
    let rows: Vec<[String; 10]> = reports
        .iter()
        .map(|r| {
            let s = &r.stats;
            [
                r.problem.clone(),
                r.n.to_string(),
                r.d.to_string(),
                r.k.to_string(),
                format!("{:.4e}", s.sse_kmpp.mean),
                pct(s.sse_kmpp.rel_std),
                format!("{:.4e}", s.sse_bkm.mean),
                pct(s.sse_bkm.rel_std),
                pct(s.mean_delta_sse),
                pct(s.mean_delta_cpu),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (j, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if j > 0 {
                s.push_str("  ");
            }
            let pad = w - cell.chars().count();
            if j == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&header);
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        out.push_str(&line(&cells));
    }
    out
}

/// Files written by [`write_reports`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub runs: PathBuf,
    pub summary: PathBuf,
    pub timings: PathBuf,
    pub table: PathBuf,
}

pub fn write_reports(dir: &Path, reports: &[ExperimentReport]) -> CliResult<ReportFiles> {
    let files = ReportFiles {
        runs: dir.join("runs.csv"),
        summary: dir.join("summary.csv"),
        timings: dir.join("timings.csv"),
        table: dir.join("report.txt"),
    };
    let io = |p: &Path, e: std::io::Error| CliError::Runtime(format!("{}: {e}", p.display()));
    write_file(&files.runs, &runs_csv(reports)).map_err(|e| io(&files.runs, e))?;
    write_file(&files.summary, &summary_csv(reports)).map_err(|e| io(&files.summary, e))?;
    write_file(&files.timings, &timings_csv(reports)).map_err(|e| io(&files.timings, e))?;
    write_file(&files.table, &report_table(reports)).map_err(|e| io(&files.table, e))?;
    Ok(files)
}
