//! Command-line front end: `gen`, `validate`, `render` and `bench`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_benchmark, write_bench_table};
use crate::generator::{generate, Engine};
use crate::io::{read_instance, render_svg, write_instance, write_stats};
use crate::model::{describe_violations, validate_params, GeneratorParams, DEFAULT_MAX_ATTEMPTS};
use crate::validator::validate_instance;

#[derive(Debug, Parser)]
#[command(
    name = "lpgen",
    version,
    about = "Random feasible bounded LP problem generator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Check an instance file against every generation condition.
    Validate(ValidateArgs),
    /// Draw a two-dimensional instance as SVG.
    Render(RenderArgs),
    /// Time the parallel engine over several worker counts.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Seq,
    Par,
}

/// Bounds that shape candidates; shared by every subcommand.
#[derive(Debug, Args)]
struct ShapeArgs {
    #[arg(long, default_value_t = 200.0)]
    alpha: f64,
    #[arg(long, default_value_t = 100.0)]
    theta: f64,
    #[arg(long, default_value_t = 50.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.35)]
    lmax: f64,
    #[arg(long, default_value_t = 100.0)]
    smin: f64,
    #[arg(long, default_value_t = 1000.0)]
    amax: f64,
    #[arg(long, default_value_t = 10000.0)]
    bmax: f64,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    d: usize,
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Seq)]
    engine: EngineArg,
    /// Instance file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    stats_out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u64,
}

/// Parameters an instance file does not carry.
#[derive(Debug, Args)]
struct FileParamArgs {
    #[arg(long, default_value_t = 50.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.35)]
    lmax: f64,
    #[arg(long, default_value_t = 100.0)]
    smin: f64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    params: FileParamArgs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// SVG file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: FileParamArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    d: usize,
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    workers_list: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u64,
}

impl ShapeArgs {
    fn params(
        &self,
        n: usize,
        d: usize,
        seed: u64,
        workers: usize,
        max_attempts: u64,
    ) -> GeneratorParams {
        GeneratorParams {
            n,
            d,
            alpha: self.alpha,
            theta: self.theta,
            rho: self.rho,
            l_max: self.lmax,
            s_min: self.smin,
            a_max: self.amax,
            b_max: self.bmax,
            seed,
            workers,
            max_attempts,
        }
    }
}

impl FileParamArgs {
    fn template(&self) -> GeneratorParams {
        GeneratorParams {
            rho: self.rho,
            l_max: self.lmax,
            s_min: self.smin,
            ..Default::default()
        }
    }
}

type CliResult = Result<i32, String>;

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, String> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn check_params(p: &GeneratorParams) -> Result<(), String> {
    validate_params(p).map_err(|v| format!("invalid parameters: {}", describe_violations(&v)))
}

fn run_gen(args: GenArgs) -> CliResult {
    let p = args
        .shape
        .params(args.n, args.d, args.seed, args.workers, args.max_attempts);
    check_params(&p)?;
    let engine = match args.engine {
        EngineArg::Seq => Engine::Sequential,
        EngineArg::Par => Engine::Parallel,
    };
    let (inst, stats) = generate(&p, engine).map_err(|e| e.to_string())?;
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_instance(&inst, &mut w).map_err(|e| e.to_string())?;
        }
        None => write_instance(&inst, &mut io::stdout().lock()).map_err(|e| e.to_string())?,
    }
    if let Some(path) = &args.stats_out {
        let mut w = create(path)?;
        write_stats(&stats, &mut w).map_err(|e| e.to_string())?;
    }
    Ok(0)
}

fn run_validate(args: ValidateArgs) -> CliResult {
    let inst = read_instance(open(&args.input)?, &args.params.template())
        .map_err(|e| format!("{}: {e}", args.input.display()))?;
    let report = validate_instance(&inst);
    if report.ok() {
        println!("ok: {} constraints, all conditions hold", inst.m());
        Ok(0)
    } else {
        for v in &report.violations {
            println!("{v}");
        }
        println!("{} violation(s)", report.violations.len());
        Ok(1)
    }
}

fn run_render(args: RenderArgs) -> CliResult {
    let inst = read_instance(open(&args.input)?, &args.params.template())
        .map_err(|e| format!("{}: {e}", args.input.display()))?;
    let svg = render_svg(&inst).map_err(|e| e.to_string())?;
    let write = |w: &mut dyn Write| w.write_all(svg.as_bytes()).and_then(|_| w.flush());
    match &args.out {
        Some(path) => write(&mut create(path)?),
        None => write(&mut io::stdout().lock()),
    }
    .map_err(|e| e.to_string())?;
    Ok(0)
}

fn run_bench(args: BenchArgs) -> CliResult {
    let p = args
        .shape
        .params(args.n, args.d, args.seed, 1, args.max_attempts);
    check_params(&p)?;
    if args.workers_list.contains(&0) {
        return Err("invalid parameters: workers ≥ 1".into());
    }
    let results =
        run_benchmark(&p, &args.workers_list, args.repetitions).map_err(|e| e.to_string())?;
    write_bench_table(&results, &mut io::stdout().lock()).map_err(|e| e.to_string())?;
    Ok(0)
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Validate(args) => run_validate(args),
        Command::Render(args) => run_render(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("lpgen: {message}");
            1
        }
    }
}
