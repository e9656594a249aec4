//! Prime tables and smallest-prime-factor tables.
//!
//! [`PrimeTable`] holds every prime up to a bound together with its χ₄ value
//! and natural logarithm; every prime sum and Euler product in the crate runs
//! over one. [`SpfTable`] stores the smallest prime factor of each integer up
//! to a bound and can be cached on disk.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::arith::chi4;
use crate::error::{Error, Result};

/// Magic prefix of the on-disk smallest-prime-factor table.
pub const SPF_MAGIC: [u8; 8] = *b"SCSPF\x00v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeEntry {
    pub p: u64,
    pub chi: i8,
    pub logp: f64,
}

#[derive(Debug, Clone)]
pub struct PrimeTable {
    y_limit: u64,
    entries: Vec<PrimeEntry>,
}

impl PrimeTable {
    /// All primes `p <= y_limit`.
    pub fn new(y_limit: u64) -> Self {
        let entries = sieve_primes(y_limit)
            .into_iter()
            .map(|p| PrimeEntry {
                p,
                chi: chi4(p),
                logp: (p as f64).ln(),
            })
            .collect();
        PrimeTable { y_limit, entries }
    }

    pub fn y_limit(&self) -> u64 {
        self.y_limit
    }

    pub fn entries(&self) -> &[PrimeEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of primes `<= x`.
    pub fn count_upto(&self, x: u64) -> usize {
        self.entries.partition_point(|e| e.p <= x)
    }

    /// Entries with `p <= x` (x may exceed the table bound; the result is then the whole table).
    pub fn upto(&self, x: u64) -> &[PrimeEntry] {
        &self.entries[..self.count_upto(x)]
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.p)
    }
}

/// Sieve of Eratosthenes over odd numbers.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = usize::try_from(limit).expect("prime bound exceeds address space");
    // index i represents 2i+1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(approx_prime_count(limit));
    out.push(2);
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|&(i, &c)| !c && 2 * i < limit)
            .map(|(i, _)| (2 * i + 1) as u64),
    );
    out
}

fn approx_prime_count(n: usize) -> usize {
    if n < 10 {
        4
    } else {
        let x = n as f64;
        (1.3 * x / x.ln()) as usize
    }
}

/// Deterministic trial-division primality test; only used on small inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime factor of every integer in `[0, len)`; entries 0 and 1 are 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    /// Table covering `0..=n`.
    pub fn build(n: u32) -> Self {
        let len = n as usize + 1;
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m >= len {
                    break;
                }
                spf[m] = p;
            }
        }
        SpfTable { spf }
    }

    /// Largest integer covered.
    pub fn limit(&self) -> u64 {
        self.spf.len().saturating_sub(1) as u64
    }

    pub fn spf(&self, n: u64) -> Option<u32> {
        self.spf.get(n as usize).copied()
    }

    /// Prime factorization `[(p, e)]` in increasing `p`, or `None` when `n` is out of range.
    pub fn factorize(&self, mut n: u64) -> Option<Vec<(u64, u32)>> {
        if n == 0 || n > self.limit() {
            return None;
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Some(out)
    }

    /// Writes the table as: magic, u64 LE entry count, one u32 LE per entry.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&SPF_MAGIC)?;
        w.write_all(&(self.spf.len() as u64).to_le_bytes())?;
        for &v in &self.spf {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if magic != SPF_MAGIC {
            return Err(Error::Io(format!("{}: bad magic", path.display())));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len) as usize;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != len * 4 {
            return Err(Error::Io(format!(
                "{}: expected {} entries, found {} bytes",
                path.display(),
                len,
                bytes.len()
            )));
        }
        let spf = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(SpfTable { spf })
    }

    /// Loads `spf-<n>.bin` from `dir` if present, otherwise builds and writes it.
    pub fn load_or_build(dir: &Path, n: u32) -> Result<Self> {
        let path = Self::cache_path(dir, n);
        if path.exists() {
            if let Ok(t) = Self::load(&path) {
                if t.limit() >= n as u64 {
                    return Ok(t);
                }
            }
        }
        let t = Self::build(n);
        std::fs::create_dir_all(dir)?;
        t.save(&path)?;
        Ok(t)
    }

    pub fn cache_path(dir: &Path, n: u32) -> PathBuf {
        dir.join(format!("spf-{n}.bin"))
    }
}
