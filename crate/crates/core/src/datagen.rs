//! Seeded generators for the two synthetic regimes.
//!
//! *Uniform*: every list holds `⌈M/T⌉` i.i.d. uniform k-mers, sorted and
//! deduplicated. *Shotgun*: `M/c` distinct k-mers are each copied `c` times
//! (or once, for the error fraction) and every copy is dropped into a uniformly
//! chosen list; lists are then sorted and deduplicated, so a k-mer appears in
//! `T(1 - (1 - 1/T)^c)` lists on average.

use std::fs;
use std::path::{Path, PathBuf};

use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::source::LineSource;

/// Symbol pool; an alphabet of size σ uses its first σ bytes.
pub const SYMBOLS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Uniform,
    Shotgun,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub scenario: Scenario,
    /// Number of lists T.
    pub lists: usize,
    /// String length k.
    pub k: usize,
    pub sigma: usize,
    /// Total elements M before within-list deduplication.
    pub m_target: u64,
    /// Copies per k-mer (shotgun only).
    pub coverage: u32,
    /// Fraction of k-mers that occur once instead of `coverage` times (shotgun only).
    pub error_fraction: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn uniform(lists: usize, k: usize, sigma: usize, m_target: u64, seed: u64) -> Self {
        GenSpec {
            scenario: Scenario::Uniform,
            lists,
            k,
            sigma,
            m_target,
            coverage: 1,
            error_fraction: 0.0,
            seed,
        }
    }

    pub fn shotgun(
        lists: usize,
        k: usize,
        sigma: usize,
        m_target: u64,
        coverage: u32,
        seed: u64,
    ) -> Self {
        GenSpec {
            scenario: Scenario::Shotgun,
            coverage,
            ..Self::uniform(lists, k, sigma, m_target, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.lists == 0 {
            return bad("at least one list is required".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if !(2..=SYMBOLS.len()).contains(&self.sigma) {
            return bad(format!("sigma must be in 2..={}", SYMBOLS.len()));
        }
        if self.m_target < self.lists as u64 {
            return bad("M must be at least T".into());
        }
        if self.scenario == Scenario::Shotgun {
            if self.coverage == 0 {
                return bad("coverage must be at least 1".into());
            }
            if !(0.0..=1.0).contains(&self.error_fraction) {
                return bad("error fraction must be in [0, 1]".into());
            }
            let space = (self.sigma as f64).powi(self.k.min(64) as i32);
            if (self.distinct_target() as f64) > space / 2.0 {
                return bad(format!(
                    "{} distinct {}-mers requested over {} symbols; the space is too small",
                    self.distinct_target(),
                    self.k,
                    self.sigma
                ));
            }
        }
        Ok(())
    }

    /// Number of distinct k-mers a shotgun dataset draws.
    pub fn distinct_target(&self) -> usize {
        (self.m_target / self.coverage.max(1) as u64).max(1) as usize
    }

    /// Expected number of lists holding a k-mer: `T(1 - (1 - 1/T)^c)`, mixed
    /// with weight `f` for once-only k-mers. 1 for the uniform scenario.
    pub fn expected_e_bar(&self) -> f64 {
        match self.scenario {
            Scenario::Uniform => 1.0,
            Scenario::Shotgun => {
                let f = self.error_fraction;
                (1.0 - f) * expected_occupancy(self.lists, self.coverage) + f
            }
        }
    }
}

/// `T(1 - (1 - 1/T)^c)`.
pub fn expected_occupancy(lists: usize, coverage: u32) -> f64 {
    let t = lists as f64;
    t * (1.0 - (1.0 - 1.0 / t).powi(coverage as i32))
}

/// Expected mean lcp between neighbours in the sorted set of `n` distinct
/// uniform k-mers over `sigma` symbols. Two neighbours agree on their first `d`
/// characters unless a length-`d` prefix boundary falls between them, and
/// `σ^d(1 - (1 - σ^-d)^n)` prefixes of length `d` are expected to occur.
pub fn uniform_expected_mean_lcp(n: u64, sigma: usize, k: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let s = sigma as f64;
    let mut total = 0.0;
    for d in 1..=k {
        let cells = s.powi(d as i32);
        let occupied = -cells * (nf * (-1.0 / cells).ln_1p()).exp_m1();
        total += nf - occupied.min(nf);
    }
    total / (nf - 1.0)
}

/// One generated dataset, held in memory as file images.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub spec: GenSpec,
    /// Newline-terminated file contents per list.
    pub files: Vec<Vec<u8>>,
    /// Strings per list after deduplication.
    pub counts: Vec<u64>,
    /// Distinct k-mers drawn (shotgun) or `None` when not known without merging.
    pub distinct: Option<u64>,
}

impl Dataset {
    /// Realized M.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn sources(&self) -> Vec<LineSource<'_>> {
        self.files
            .iter()
            .enumerate()
            .map(|(i, f)| LineSource::new(file_name(i), f))
            .collect()
    }

    /// Realized ē when the distinct count is known.
    pub fn realized_e_bar(&self) -> Option<f64> {
        self.distinct.map(|n| self.total() as f64 / n as f64)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            spec: self.spec.clone(),
            files: (0..self.files.len()).map(file_name).collect(),
            counts: self.counts.clone(),
            m_realized: self.total(),
            distinct: self.distinct,
            e_bar_expected: self.spec.expected_e_bar(),
            e_bar_realized: self.realized_e_bar(),
        }
    }

    /// Writes `list_000.txt`, ... and `manifest.json` into `dir`, creating it
    /// if needed. Returns the list file paths.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::with_capacity(self.files.len());
        for (i, bytes) in self.files.iter().enumerate() {
            let path = dir.join(file_name(i));
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            paths.push(path);
        }
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest())
            .map_err(|e| Error::Invariant(format!("manifest serialization: {e}")))?;
        fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(paths)
    }
}

pub fn file_name(i: usize) -> String {
    format!("list_{i:03}.txt")
}

/// Sidecar record of how a dataset was generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: GenSpec,
    pub files: Vec<String>,
    pub counts: Vec<u64>,
    pub m_realized: u64,
    pub distinct: Option<u64>,
    pub e_bar_expected: f64,
    pub e_bar_realized: Option<f64>,
}

pub fn generate(spec: &GenSpec) -> Result<Dataset> {
    match spec.scenario {
        Scenario::Uniform => gen_uniform(spec),
        Scenario::Shotgun => gen_shotgun(spec),
    }
}

struct KmerDraw {
    k: usize,
    symbol: Uniform<usize>,
}

impl KmerDraw {
    fn new(spec: &GenSpec) -> Self {
        KmerDraw {
            k: spec.k,
            symbol: Uniform::new(0, spec.sigma).expect("sigma >= 2"),
        }
    }

    fn fill(&self, rng: &mut ChaCha8Rng, out: &mut Vec<u8>) {
        for _ in 0..self.k {
            out.push(SYMBOLS[self.symbol.sample(rng)]);
        }
    }
}

/// Sorts fixed-width records in `flat` and removes repeats.
fn sort_dedup_kmers(flat: Vec<u8>, k: usize) -> Vec<u8> {
    let mut recs: Vec<&[u8]> = flat.chunks_exact(k).collect();
    recs.sort_unstable();
    recs.dedup();
    recs.concat()
}

fn file_image(kmers: &[u8], k: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(kmers.len() / k * (k + 1));
    for rec in kmers.chunks_exact(k) {
        out.extend_from_slice(rec);
        out.push(b'\n');
    }
    out
}

pub fn gen_uniform(spec: &GenSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = KmerDraw::new(spec);
    let per_list = spec.m_target.div_ceil(spec.lists as u64) as usize;
    let mut files = Vec::with_capacity(spec.lists);
    let mut counts = Vec::with_capacity(spec.lists);
    for _ in 0..spec.lists {
        let mut flat = Vec::with_capacity(per_list * spec.k);
        for _ in 0..per_list {
            draw.fill(&mut rng, &mut flat);
        }
        let kmers = sort_dedup_kmers(flat, spec.k);
        counts.push((kmers.len() / spec.k) as u64);
        files.push(file_image(&kmers, spec.k));
    }
    Ok(Dataset {
        spec: spec.clone(),
        files,
        counts,
        distinct: None,
    })
}

pub fn gen_shotgun(spec: &GenSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = KmerDraw::new(spec);
    let k = spec.k;
    let want = spec.distinct_target();

    let mut universe = Vec::with_capacity(want * k);
    loop {
        let have = universe.len() / k;
        if have == want {
            break;
        }
        for _ in have..want {
            draw.fill(&mut rng, &mut universe);
        }
        universe = sort_dedup_kmers(universe, k);
    }

    let list = Uniform::new(0, spec.lists).expect("lists >= 1");
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); spec.lists];
    for i in 0..want {
        let copies = if spec.error_fraction > 0.0 && rng.random_bool(spec.error_fraction) {
            1
        } else {
            spec.coverage
        };
        for _ in 0..copies {
            members[list.sample(&mut rng)].push(i as u32);
        }
    }

    let mut files = Vec::with_capacity(spec.lists);
    let mut counts = Vec::with_capacity(spec.lists);
    for mut idx in members {
        // Indices follow the sorted universe, so sorting them sorts the strings.
        idx.sort_unstable();
        idx.dedup();
        let mut file = Vec::with_capacity(idx.len() * (k + 1));
        for &i in &idx {
            let i = i as usize;
            file.extend_from_slice(&universe[i * k..(i + 1) * k]);
            file.push(b'\n');
        }
        counts.push(idx.len() as u64);
        files.push(file);
    }
    Ok(Dataset {
        spec: spec.clone(),
        files,
        counts,
        distinct: Some(want as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::drain;

    #[test]
    fn occupancy_formula_matches_quoted_values() {
        let got: Vec<f64> = [10, 20, 30, 40]
            .iter()
            .map(|&c| expected_occupancy(10, c))
            .collect();
        for (g, w) in got.iter().zip([6.513, 8.784, 9.576, 9.852]) {
            assert!((g - w).abs() < 1e-3, "{g} vs {w}");
        }
        assert!((expected_occupancy(7, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_lcp_oracle_values() {
        assert!((uniform_expected_mean_lcp(100_000, 4, 20) - 7.4998).abs() < 1e-3);
        assert!((uniform_expected_mean_lcp(10_000_000, 4, 20) - 10.8216).abs() < 1e-3);
        // Every prefix collides when the space is exhausted.
        assert!((uniform_expected_mean_lcp(1 << 20, 2, 3) - 3.0).abs() < 1e-3);
    }

    #[test]
    fn uniform_files_are_sorted_and_deterministic() {
        let spec = GenSpec::uniform(4, 20, 4, 4000, 9);
        let a = gen_uniform(&spec).unwrap();
        let b = gen_uniform(&spec).unwrap();
        assert_eq!(a.files, b.files);
        for src in a.sources() {
            let v = drain(src).unwrap();
            assert!(v.iter().all(|s| s.len() == 20));
        }
        assert_eq!(a.counts.len(), 4);
        assert!(a.total() <= 4000);
    }

    #[test]
    fn tiny_space_forces_collisions() {
        let spec = GenSpec::uniform(2, 3, 2, 64, 1);
        let d = gen_uniform(&spec).unwrap();
        for (src, &n) in d.sources().into_iter().zip(&d.counts) {
            assert_eq!(drain(src).unwrap().len() as u64, n);
            assert!(n <= 8);
        }
    }

    #[test]
    fn single_coverage_puts_each_kmer_in_one_list() {
        let spec = GenSpec::shotgun(5, 12, 4, 10_000, 1, 3);
        let d = gen_shotgun(&spec).unwrap();
        assert_eq!(d.total(), 10_000);
        assert_eq!(d.realized_e_bar(), Some(1.0));
    }

    #[test]
    fn seeds_differ() {
        let a = gen_uniform(&GenSpec::uniform(1, 8, 4, 10, 1)).unwrap();
        let b = gen_uniform(&GenSpec::uniform(1, 8, 4, 10, 2)).unwrap();
        assert_ne!(a.files, b.files);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let mut s = GenSpec::uniform(4, 20, 4, 100, 0);
        s.sigma = 1;
        assert!(s.validate().is_err());
        s.sigma = 63;
        assert!(s.validate().is_err());
        let s = GenSpec::uniform(4, 20, 4, 3, 0);
        assert!(s.validate().is_err());
        let s = GenSpec::shotgun(4, 2, 2, 1000, 1, 0);
        assert!(s.validate().is_err());
        let mut s = GenSpec::shotgun(4, 20, 4, 1000, 4, 0);
        s.error_fraction = 1.5;
        assert!(s.validate().is_err());
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let d = gen_shotgun(&GenSpec::shotgun(3, 10, 4, 3000, 3, 5)).unwrap();
        let paths = d.write(dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        assert_eq!(fs::read(&paths[1]).unwrap(), d.files[1]);
        let text = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let m: Manifest = serde_json::from_str(&text).unwrap();
        assert_eq!(m, d.manifest());
        assert_eq!(m.files[0], "list_000.txt");
    }
}
