//! Wall-clock scaling of the parallel engine over worker counts.

use std::io::Write;
use std::time::{Duration, Instant};

use crate::generator::{generate_parallel, GeneratorError};
use crate::model::{GeneratorParams, LpInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub worker_count: usize,
    /// Median over the repetitions.
    pub wall_time: Duration,
    /// Baseline median over this median. The baseline is the one-worker
    /// entry when present, otherwise the first entry.
    pub speedup: f64,
    pub runs: Vec<Duration>,
}

pub fn median(samples: &[Duration]) -> Duration {
    assert!(!samples.is_empty(), "median of nothing");
    let mut sorted = samples.to_vec();
    sorted.sort();
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2
    }
}

/// Runs the parallel engine `repetitions` times per worker count with the
/// seed of `p`, handing every produced instance to `inspect`.
pub fn run_benchmark_with<F>(
    p: &GeneratorParams,
    worker_counts: &[usize],
    repetitions: usize,
    mut inspect: F,
) -> Result<Vec<BenchResult>, GeneratorError>
where
    F: FnMut(usize, &LpInstance),
{
    let repetitions = repetitions.max(1);
    let mut results = Vec::with_capacity(worker_counts.len());
    for &workers in worker_counts {
        let params = GeneratorParams {
            workers,
            ..p.clone()
        };
        let mut runs = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let started = Instant::now();
            let (inst, _) = generate_parallel(&params)?;
            runs.push(started.elapsed());
            inspect(workers, &inst);
        }
        results.push(BenchResult {
            worker_count: workers,
            wall_time: median(&runs),
            speedup: 1.0,
            runs,
        });
    }
    let baseline = results
        .iter()
        .find(|r| r.worker_count == 1)
        .or(results.first())
        .map(|r| r.wall_time.as_secs_f64());
    if let Some(baseline) = baseline {
        for r in &mut results {
            let t = r.wall_time.as_secs_f64();
            r.speedup = if r.worker_count == 1 {
                1.0
            } else if t > 0.0 {
                baseline / t
            } else {
                f64::INFINITY
            };
        }
    }
    Ok(results)
}

pub fn run_benchmark(
    p: &GeneratorParams,
    worker_counts: &[usize],
    repetitions: usize,
) -> Result<Vec<BenchResult>, GeneratorError> {
    run_benchmark_with(p, worker_counts, repetitions, |_, _| {})
}

/// `key = value` lines, two per worker count.
pub fn write_bench_table<W: Write>(results: &[BenchResult], w: &mut W) -> std::io::Result<()> {
    for r in results {
        writeln!(
            w,
            "wall_time_ms[{}] = {:.3}",
            r.worker_count,
            r.wall_time.as_secs_f64() * 1e3
        )?;
        writeln!(w, "speedup[{}] = {:.3}", r.worker_count, r.speedup)?;
    }
    w.flush()
}
