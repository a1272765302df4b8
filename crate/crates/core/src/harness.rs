//! Benchmark harness: runs backends over generated datasets, checks that
//! every backend produced the same output, and reports one row per backend.

use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::datagen::{generate, Dataset, GenSpec};
use crate::error::{Error, Result};
use crate::source::{InputFile, LineSource};
use crate::stats::LcpTracker;
use crate::{merge, Algo, MergeOptions, MergeStats};

/// Column names of the stats table.
pub const TSV_HEADER: &str = "backend\tT\tM\tN\tmean_lcp\te_bar\twall_ns\tchar_probes\tsift_steps";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub backend: Algo,
    pub lists: usize,
    pub m: u64,
    pub n: u64,
    pub mean_lcp: f64,
    pub e_bar: f64,
    pub wall_ns: u64,
    pub char_probes: u64,
    pub sift_steps: u64,
}

impl BenchRow {
    pub fn from_stats(backend: Algo, st: &MergeStats) -> Self {
        BenchRow {
            backend,
            lists: st.lists,
            m: st.m_in,
            n: st.n_out,
            mean_lcp: st.mean_lcp.unwrap_or(0.0),
            e_bar: st.e_bar(),
            wall_ns: st.wall_ns,
            char_probes: st.char_probes,
            sift_steps: st.sift_steps,
        }
    }

    /// One TSV line, without the newline.
    pub fn tsv(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{}\t{}\t{}",
            self.backend,
            self.lists,
            self.m,
            self.n,
            self.mean_lcp,
            self.e_bar,
            self.wall_ns,
            self.char_probes,
            self.sift_steps
        )
        .unwrap();
        s
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algos: Vec<Algo>,
    /// Timed repetitions per backend; the median by wall time is reported.
    pub repeat: usize,
    /// When set, datasets are written below this directory and file reading
    /// is included in the timings.
    pub io_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algos: Algo::ALL.to_vec(),
            repeat: 3,
            io_dir: None,
        }
    }
}

fn digest(out: &[(&[u8], u32)]) -> u64 {
    let mut h = DefaultHasher::new();
    out.hash(&mut h);
    h.finish()
}

/// Runs every configured backend on `ds`.
///
/// Outputs are compared across backends and a disagreement is reported as
/// [`Error::Invariant`]. `mean_lcp` is measured once on the agreed output.
pub fn run_dataset(ds: &Dataset, cfg: &RunConfig) -> Result<Vec<BenchRow>> {
    let paths = match &cfg.io_dir {
        Some(dir) => Some(ds.write(dir)?),
        None => None,
    };
    let opts = MergeOptions::default();
    let reps = cfg.repeat.max(1);
    let mut rows = Vec::with_capacity(cfg.algos.len());
    let mut reference: Option<(Algo, u64)> = None;
    let mut mean_lcp = None;
    let mut out: Vec<(&[u8], u32)> = Vec::new();
    // Rounds interleave the backends so drift in machine load is shared.
    let mut runs: Vec<Vec<MergeStats>> = vec![Vec::with_capacity(reps); cfg.algos.len()];
    for rep in 0..reps {
        for (k, &algo) in cfg.algos.iter().enumerate() {
            let st = match &paths {
                None => {
                    out.clear();
                    let sink = |x, e| out.push((x, e));
                    let st = merge(algo, ds.sources(), &opts, sink)?;
                    if rep == 0 {
                        let d = digest(&out);
                        check_agreement(&mut reference, algo, d)?;
                        if mean_lcp.is_none() {
                            let mut t = LcpTracker::default();
                            for &(x, e) in &out {
                                t.push(x, e);
                            }
                            mean_lcp = Some(t.mean().unwrap_or(0.0));
                        }
                    }
                    st
                }
                Some(paths) => {
                    timed_from_files(algo, paths, &opts, rep == 0, &mut reference, &mut mean_lcp)?
                }
            };
            runs[k].push(st);
        }
    }
    for (mut r, &algo) in runs.into_iter().zip(&cfg.algos) {
        r.sort_by_key(|s| s.wall_ns);
        let mut st = r.swap_remove(r.len() / 2);
        st.mean_lcp = mean_lcp;
        rows.push(BenchRow::from_stats(algo, &st));
    }
    let first = rows.first().map(|r| (r.m, r.n));
    if let Some(bad) = rows.iter().find(|r| Some((r.m, r.n)) != first) {
        return Err(Error::Invariant(format!(
            "{} consumed {} and emitted {} records, disagreeing with {}",
            bad.backend, bad.m, bad.n, rows[0].backend
        )));
    }
    Ok(rows)
}

fn check_agreement(reference: &mut Option<(Algo, u64)>, algo: Algo, d: u64) -> Result<()> {
    match *reference {
        None => {
            *reference = Some((algo, d));
            Ok(())
        }
        Some((_, r)) if r == d => Ok(()),
        Some((first, _)) => Err(Error::Invariant(format!(
            "{algo} output differs from {first} output"
        ))),
    }
}

fn timed_from_files(
    algo: Algo,
    paths: &[PathBuf],
    opts: &MergeOptions,
    verify: bool,
    reference: &mut Option<(Algo, u64)>,
    mean_lcp: &mut Option<f64>,
) -> Result<MergeStats> {
    let start = Instant::now();
    let files = paths
        .iter()
        .map(InputFile::read)
        .collect::<Result<Vec<_>>>()?;
    let sources: Vec<LineSource<'_>> = files.iter().map(InputFile::source).collect();
    let mut out = Vec::new();
    let mut st = merge(algo, sources, opts, |x, e| out.push((x, e)))?;
    st.wall_ns = start.elapsed().as_nanos() as u64;
    if verify {
        check_agreement(reference, algo, digest(&out))?;
        if mean_lcp.is_none() {
            let mut t = LcpTracker::default();
            for &(x, e) in &out {
                t.push(x, e);
            }
            *mean_lcp = Some(t.mean().unwrap_or(0.0));
        }
    }
    Ok(st)
}

/// Generates and runs each spec, `jobs` at a time. Results keep the order
/// of `specs`. Parallel runs share the machine, so their timings are only
/// good for correctness sweeps.
pub fn run_specs(specs: &[GenSpec], cfg: &RunConfig, jobs: usize) -> Result<Vec<Vec<BenchRow>>> {
    let results: Mutex<Vec<Option<Result<Vec<BenchRow>>>>> =
        Mutex::new((0..specs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= specs.len() {
            break;
        }
        let cell_cfg = RunConfig {
            io_dir: cfg.io_dir.as_deref().map(|d| cell_dir(d, i)),
            ..cfg.clone()
        };
        let r = generate(&specs[i]).and_then(|ds| run_dataset(&ds, &cell_cfg));
        results.lock().unwrap()[i] = Some(r);
    };
    let jobs = jobs.clamp(1, specs.len().max(1));
    if jobs == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(worker);
            }
        });
    }
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect()
}

fn cell_dir(base: &Path, i: usize) -> PathBuf {
    base.join(format!("cell_{i:03}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::GenSpec;

    #[test]
    fn rows_agree_across_backends() {
        let ds = generate(&GenSpec::shotgun(4, 12, 4, 2000, 4, 11)).unwrap();
        let cfg = RunConfig {
            repeat: 1,
            ..Default::default()
        };
        let rows = run_dataset(&ds, &cfg).unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            assert_eq!((r.m, r.n), (rows[0].m, rows[0].n));
            assert_eq!(r.mean_lcp, rows[0].mean_lcp);
            assert_eq!(r.tsv().split('\t').count(), TSV_HEADER.split('\t').count());
        }
        assert_eq!(rows[0].n, 500);
    }

    #[test]
    fn parallel_cells_keep_order() {
        let specs: Vec<GenSpec> = (1..=3)
            .map(|t| GenSpec::uniform(t, 8, 4, 300, t as u64))
            .collect();
        let cfg = RunConfig {
            algos: vec![Algo::Heap, Algo::Trie],
            repeat: 1,
            io_dir: None,
        };
        let rows = run_specs(&specs, &cfg, 2).unwrap();
        let lists: Vec<usize> = rows.iter().map(|r| r[0].lists).collect();
        assert_eq!(lists, vec![1, 2, 3]);
    }
}
