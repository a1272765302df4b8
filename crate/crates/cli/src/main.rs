//! `heapmerge merge | gen | bench`.
//!
//! Exit status: 0 on success, 1 for usage errors, 2 for invalid input and
//! I/O failures, 3 when an internal invariant is violated.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heapmerge::datagen::{generate, GenSpec};
use heapmerge::harness::{run_specs, BenchRow, RunConfig, TSV_HEADER};
use heapmerge::{merge, open_sources, Algo, Alphabet, Error, InputFile, MergeOptions};

#[derive(Parser)]
#[command(name = "heapmerge", version, about = "Merge sorted string lists")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Merge sorted, duplicate-free files into one sorted, duplicate-free list.
    Merge(MergeArgs),
    /// Generate a synthetic dataset and its manifest.
    Gen(GenArgs),
    /// Run every backend over a matrix of generated datasets.
    Bench(BenchArgs),
}

#[derive(Args)]
struct MergeArgs {
    #[arg(long, default_value = "sheap")]
    algo: Algo,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append a tab and the number of input lists holding each value.
    #[arg(long)]
    counts: bool,
    /// Write a one-row stats table here.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Trie alphabet, e.g. ACGT. Learned from the inputs when absent.
    #[arg(long)]
    alphabet: Option<String>,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Uniform,
    Shotgun,
}

#[derive(Args)]
struct DataArgs {
    /// String length.
    #[arg(short, default_value_t = 20)]
    k: usize,
    /// Alphabet size.
    #[arg(short = 's', long = "sigma", default_value_t = 4)]
    sigma: usize,
    /// Total elements before within-list deduplication.
    #[arg(short = 'M', default_value_t = 1_000_000)]
    m: u64,
    /// Fraction of k-mers that occur once (shotgun).
    #[arg(long, default_value_t = 0.0)]
    error_fraction: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    scenario: Scenario,
    /// Number of lists.
    #[arg(short = 'T', default_value_t = 8)]
    lists: usize,
    /// Coverage (shotgun).
    #[arg(short = 'c', long = "coverage", default_value_t = 10)]
    coverage: u32,
    #[command(flatten)]
    data: DataArgs,
    /// Directory for the list files and manifest.json.
    #[arg(long, default_value = "data")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    scenario: Scenario,
    /// List counts; 4 to 256 for uniform, 4,8,16 for shotgun.
    #[arg(short = 'T', value_delimiter = ',')]
    lists: Vec<usize>,
    /// Coverage as a multiple of T (shotgun).
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,3")]
    ratios: Vec<f64>,
    #[command(flatten)]
    data: DataArgs,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "heap,sheap,cheap,scheap,trie"
    )]
    algos: Vec<Algo>,
    /// Timed repetitions; the median is reported.
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// Include reading the input files in the timings.
    #[arg(long)]
    timed_io: bool,
    /// Cells run in parallel. Timings are unreliable above 1.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// TSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let r = match cli.cmd {
        Cmd::Merge(a) => cmd_merge(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heapmerge: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unsupported(_) => 1,
        Error::Invariant(_) | Error::EmptyTrie => 3,
        _ => 2,
    }
}

fn create(path: &Path) -> Result<File, Error> {
    File::create(path).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn cmd_merge(a: MergeArgs) -> Result<(), Error> {
    let alphabet = a
        .alphabet
        .as_deref()
        .map(|s| Alphabet::from_symbols(s.as_bytes()))
        .transpose()?;
    let opts = MergeOptions {
        track_lcp: a.stats.is_some(),
        alphabet,
        ..Default::default()
    };
    let files = open_sources(&a.files)?;
    let sources = files.iter().map(InputFile::source).collect();
    let (mut out, out_path): (Box<dyn Write>, PathBuf) = match &a.out {
        Some(p) => (Box::new(BufWriter::new(create(p)?)), p.clone()),
        None => (
            Box::new(BufWriter::new(io::stdout().lock())),
            "<stdout>".into(),
        ),
    };
    let mut failed = None;
    let st = merge(a.algo, sources, &opts, |x, e| {
        if failed.is_some() {
            return;
        }
        let r = if a.counts {
            out.write_all(x).and_then(|_| writeln!(out, "\t{e}"))
        } else {
            out.write_all(x).and_then(|_| out.write_all(b"\n"))
        };
        failed = r.err();
    })?;
    if let Some(e) = failed {
        return Err(io_error(&out_path, e));
    }
    out.flush().map_err(|e| io_error(&out_path, e))?;
    if let Some(path) = &a.stats {
        let row = BenchRow::from_stats(a.algo, &st);
        let mut f = create(path)?;
        writeln!(f, "{TSV_HEADER}\n{}", row.tsv()).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

fn spec(scenario: Scenario, lists: usize, coverage: u32, d: &DataArgs, seed: u64) -> GenSpec {
    match scenario {
        Scenario::Uniform => GenSpec::uniform(lists, d.k, d.sigma, d.m, seed),
        Scenario::Shotgun => GenSpec {
            error_fraction: d.error_fraction,
            ..GenSpec::shotgun(lists, d.k, d.sigma, d.m, coverage, seed)
        },
    }
}

fn cmd_gen(a: GenArgs) -> Result<(), Error> {
    let spec = spec(a.scenario, a.lists, a.coverage, &a.data, a.data.seed);
    spec.validate()?;
    let ds = generate(&spec)?;
    let paths = ds.write(&a.out)?;
    let m = ds.manifest();
    eprint!(
        "wrote {} lists, M = {}, to {}",
        paths.len(),
        m.m_realized,
        a.out.display()
    );
    match m.e_bar_realized {
        Some(e) => eprintln!(" (e_bar {e:.3}, expected {:.3})", m.e_bar_expected),
        None => eprintln!(),
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Error> {
    if a.algos.is_empty() {
        return Err(Error::Unsupported("--algos needs at least one backend"));
    }
    let lists = match (a.lists.is_empty(), a.scenario) {
        (false, _) => a.lists.clone(),
        (true, Scenario::Uniform) => (2..=8).map(|i| 1 << i).collect(),
        (true, Scenario::Shotgun) => vec![4, 8, 16],
    };
    let mut specs = Vec::new();
    for &t in &lists {
        match a.scenario {
            Scenario::Uniform => specs.push(spec(a.scenario, t, 1, &a.data, a.data.seed)),
            Scenario::Shotgun => {
                for &r in &a.ratios {
                    let c = (r * t as f64).round().max(1.0) as u32;
                    specs.push(spec(a.scenario, t, c, &a.data, a.data.seed));
                }
            }
        }
    }
    for s in &specs {
        s.validate()?;
    }
    let io_dir = if a.timed_io {
        Some(tempfile::tempdir().map_err(|e| io_error(&std::env::temp_dir(), e))?)
    } else {
        None
    };
    let cfg = RunConfig {
        algos: a.algos.clone(),
        repeat: a.repeat,
        io_dir: io_dir.as_ref().map(|d| d.path().to_path_buf()),
    };
    let table = run_specs(&specs, &cfg, a.jobs)?;
    let (mut out, out_path): (Box<dyn Write>, PathBuf) = match &a.out {
        Some(p) => (Box::new(BufWriter::new(create(p)?)), p.clone()),
        None => (Box::new(io::stdout().lock()), "<stdout>".into()),
    };
    let mut text = format!("{TSV_HEADER}\n");
    for row in table.iter().flatten() {
        text.push_str(&row.tsv());
        text.push('\n');
    }
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| io_error(&out_path, e))
}
