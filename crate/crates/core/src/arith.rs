//! Exact arithmetic: χ₄, r(n)/4, the lattice-count oracle and the exact
//! smooth-weighted circle sum Ψ_G(x, y) = Σ_{n ≤ x, P(n) ≤ y} r(n).
//!
//! Ψ_G is computed two independent ways: a segmented cofactor sieve that
//! divides every prime `p <= y` out of each `n <= x` (so `n` is y-smooth iff
//! the cofactor reaches 1), and a depth-first enumeration of y-smooth `n`
//! over primes in descending order. `n = 1` is counted with `r(1) = 4`.
//! Both return exact `u128` totals.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{is_prime, sieve_primes, SpfTable};

/// The non-principal character modulo 4.
pub fn chi4(n: u64) -> i8 {
    match n % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Local factor of r(n)/4 at a prime power `p^e` (`e >= 1`).
#[inline]
pub fn local_weight(p: u64, e: u32) -> u64 {
    match p % 4 {
        1 => e as u64 + 1,
        3 => u64::from(e.is_multiple_of(2)),
        _ => 1,
    }
}

/// r(n)/4 from a complete prime factorization of `n`.
///
/// The factorization must list distinct primes with positive exponents whose
/// product is exactly `n`; the empty factorization stands for `n = 1`.
pub fn r_over_4(n: u64, factorization: &[(u64, u32)]) -> Result<u64> {
    let bad = |reason: &str| Error::BadFactorization {
        n,
        reason: reason.to_string(),
    };
    if n == 0 {
        return Err(bad("n must be positive"));
    }
    let mut prod: u64 = 1;
    let mut weight: u64 = 1;
    let mut seen: Vec<u64> = Vec::with_capacity(factorization.len());
    for &(p, e) in factorization {
        if e == 0 {
            return Err(bad("zero exponent"));
        }
        if seen.contains(&p) {
            return Err(bad("repeated prime"));
        }
        if !is_prime(p) {
            return Err(bad(&format!("{p} is not prime")));
        }
        seen.push(p);
        let pe = p.checked_pow(e).ok_or_else(|| bad("product overflows"))?;
        prod = prod.checked_mul(pe).ok_or_else(|| bad("product overflows"))?;
        weight *= local_weight(p, e);
    }
    if prod != n {
        return Err(bad(&format!("product of factors is {prod}")));
    }
    Ok(weight)
}

/// r(n)/4 using a smallest-prime-factor table for the factorization.
pub fn r_over_4_spf(n: u64, spf: &SpfTable) -> Result<u64> {
    let f = spf
        .factorize(n)
        .ok_or_else(|| Error::domain(format!("{n} outside the factor table")))?;
    r_over_4(n, &f)
}

/// r(n) by counting lattice points `(a, b)` with `a² + b² = n`, signs and order distinct.
pub fn lattice_r(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let mut a: u64 = 0;
    let mut b: u64 = isqrt(n);
    let mut count = 0;
    while a <= b {
        let s = a * a + b * b;
        match s.cmp(&n) {
            std::cmp::Ordering::Greater => b -= 1,
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Equal => {
                count += if a == 0 || a == b { 4 } else { 8 };
                a += 1;
            }
        }
    }
    count
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sieve,
    Recursive,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Sieve => "sieve",
            Method::Recursive => "recursive",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sieve" => Ok(Method::Sieve),
            "recursive" => Ok(Method::Recursive),
            _ => Err(Error::domain(format!("unknown method {s:?}"))),
        }
    }
}

/// Budgets for the exact oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Entries per sieve segment.
    pub segment_size: usize,
    /// Largest `x` the sieve will accept.
    pub sieve_limit: u64,
    /// Maximum recursion nodes for the enumerator.
    pub node_budget: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            segment_size: 1 << 20,
            sieve_limit: 1_000_000_000,
            node_budget: 1_000_000_000,
        }
    }
}

/// Exact Ψ_G(x, y).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactCount {
    pub x: u128,
    pub y: u64,
    pub value: u128,
    /// Number of y-smooth `n <= x` with `r(n) != 0`.
    pub terms: u64,
    pub method: Method,
}

pub fn exact_psi_g(x: u128, y: u64, method: Method, opts: &ExactOptions) -> Result<ExactCount> {
    if x < 1 {
        return Err(Error::domain("x must be at least 1"));
    }
    if y < 2 {
        return Err(Error::domain("y must be at least 2"));
    }
    let (sum, terms) = match method {
        Method::Sieve => sieve_sum(x, y, opts)?,
        Method::Recursive => recursive_sum(x, y, opts)?,
    };
    let value = sum
        .checked_mul(4)
        .ok_or_else(|| Error::Overflow(format!("4 * {sum}")))?;
    Ok(ExactCount {
        x,
        y,
        value,
        terms,
        method,
    })
}

fn sieve_sum(x: u128, y: u64, opts: &ExactOptions) -> Result<(u128, u64)> {
    if x > opts.sieve_limit as u128 {
        return Err(Error::ResourceLimit(format!(
            "x = {x} exceeds the sieve limit {}",
            opts.sieve_limit
        )));
    }
    let x = x as u64;
    let primes = sieve_primes(y.min(x));
    let seg = opts.segment_size.max(1) as u64;
    let nseg = x.div_ceil(seg);
    let parts: Vec<(u128, u64)> = (0..nseg)
        .into_par_iter()
        .map(|s| {
            let lo = 1 + s * seg;
            let hi = (lo + seg - 1).min(x);
            sieve_segment(lo, hi, &primes)
        })
        .collect();
    let mut sum: u128 = 0;
    let mut terms: u64 = 0;
    for (s, t) in parts {
        sum = sum
            .checked_add(s)
            .ok_or_else(|| Error::Overflow("sieve total".into()))?;
        terms += t;
    }
    Ok((sum, terms))
}

/// Sums r(n)/4 over y-smooth `n` in `[lo, hi]`, `primes` being all primes `<= y`.
fn sieve_segment(lo: u64, hi: u64, primes: &[u64]) -> (u128, u64) {
    let len = (hi - lo + 1) as usize;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut weight = vec![1u32; len];
    for &p in primes {
        if p > hi {
            break;
        }
        let first = lo.div_ceil(p) * p;
        let mut m = first;
        while m <= hi {
            let i = (m - lo) as usize;
            let mut e = 0u32;
            while rem[i].is_multiple_of(p) {
                rem[i] /= p;
                e += 1;
            }
            weight[i] *= local_weight(p, e) as u32;
            m += p;
        }
    }
    let mut sum: u128 = 0;
    let mut terms = 0u64;
    for i in 0..len {
        if rem[i] == 1 && weight[i] > 0 {
            sum += weight[i] as u128;
            terms += 1;
        }
    }
    (sum, terms)
}

const FLUSH: u64 = 1 << 12;

struct Enumerator<'a> {
    primes: &'a [u64],
    budget: u64,
    nodes: &'a AtomicU64,
}

struct Tally {
    sum: u128,
    terms: u64,
    local_nodes: u64,
}

impl Enumerator<'_> {
    fn charge(&self, t: &mut Tally) -> Result<()> {
        t.local_nodes += 1;
        if t.local_nodes >= FLUSH {
            let total = self.nodes.fetch_add(t.local_nodes, Ordering::Relaxed) + t.local_nodes;
            t.local_nodes = 0;
            if total > self.budget {
                return Err(self.over_budget());
            }
        }
        Ok(())
    }

    fn over_budget(&self) -> Error {
        Error::ResourceLimit(format!("enumeration exceeded {} nodes", self.budget))
    }

    /// Adds `mult * Σ_{n <= q, P(n) <= primes[k-1]} r(n)/4` into `t`.
    fn walk(&self, q: u128, k: usize, mult: u128, t: &mut Tally) -> Result<()> {
        self.charge(t)?;
        let kk = k.min(self.primes.partition_point(|&p| (p as u128) <= q));
        if kk <= 1 {
            // only powers of 2 (or just n = 1) remain, each with weight 1
            let count = if kk == 0 { 1 } else { 128 - q.leading_zeros() as u128 };
            t.sum = count
                .checked_mul(mult)
                .and_then(|c| t.sum.checked_add(c))
                .ok_or_else(|| Error::Overflow("enumeration total".into()))?;
            t.terms += count as u64;
            return Ok(());
        }
        t.sum = t
            .sum
            .checked_add(mult)
            .ok_or_else(|| Error::Overflow("enumeration total".into()))?;
        t.terms += 1;
        for i in (0..kk).rev() {
            let p = self.primes[i];
            let mut pe = p as u128;
            let mut e = 1u32;
            while pe <= q {
                let w = local_weight(p, e) as u128;
                if w > 0 {
                    let m = mult
                        .checked_mul(w)
                        .ok_or_else(|| Error::Overflow("weight".into()))?;
                    self.walk(q / pe, i, m, t)?;
                }
                match pe.checked_mul(p as u128) {
                    Some(v) => pe = v,
                    None => break,
                }
                e += 1;
            }
        }
        Ok(())
    }
}

fn recursive_sum(x: u128, y: u64, opts: &ExactOptions) -> Result<(u128, u64)> {
    let ymax = if x < y as u128 { x as u64 } else { y };
    let primes = sieve_primes(ymax);
    let nodes = AtomicU64::new(1);
    let en = Enumerator {
        primes: &primes,
        budget: opts.node_budget,
        nodes: &nodes,
    };
    // top level: n = 1 plus one task per (largest prime, exponent)
    let mut tasks: Vec<(u128, usize, u128)> = Vec::new();
    for (i, &p) in primes.iter().enumerate().rev() {
        let mut pe = p as u128;
        let mut e = 1;
        while pe <= x {
            let w = local_weight(p, e) as u128;
            if w > 0 {
                tasks.push((x / pe, i, w));
            }
            match pe.checked_mul(p as u128) {
                Some(v) => pe = v,
                None => break,
            }
            e += 1;
        }
    }
    let parts: Vec<Result<Tally>> = tasks
        .into_par_iter()
        .map(|(q, k, w)| {
            let mut t = Tally {
                sum: 0,
                terms: 0,
                local_nodes: 0,
            };
            en.walk(q, k, w, &mut t)?;
            Ok(t)
        })
        .collect();
    let mut sum: u128 = 1;
    let mut terms: u64 = 1;
    let mut first_err = None;
    for part in parts {
        match part {
            Ok(t) => {
                nodes.fetch_add(t.local_nodes, Ordering::Relaxed);
                sum = sum
                    .checked_add(t.sum)
                    .ok_or_else(|| Error::Overflow("enumeration total".into()))?;
                terms += t.terms;
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_err {
        return Err(e);
    }
    if nodes.load(Ordering::Relaxed) > opts.node_budget {
        return Err(en.over_budget());
    }
    Ok((sum, terms))
}
