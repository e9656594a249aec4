//! The truncated Euler product H(s) = Π_{p ≤ y} (1 − p^{−s})^{−1}(1 − χ₄(p)p^{−s})^{−1}
//! and the derivatives of φ = log H in σ.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::primes::PrimeTable;
use crate::tolerances::PHI_SERIES_CUTOFF;

/// −log(1 − z) on |z| < 1, principal branch.
fn neg_log_1m(z: Complex64) -> Complex64 {
    if z.norm_sqr() < 0.0625 {
        let mut sum = z;
        let mut pow = z;
        for k in 2..64 {
            pow *= z;
            let term = pow / k as f64;
            sum += term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        -(Complex64::new(1.0, 0.0) - z).ln()
    }
}

/// log H(s), principal branch summed over the primes of `table`.
pub fn log_h(s: Complex64, table: &PrimeTable) -> Result<Complex64> {
    if !(s.re > 0.0) || !s.im.is_finite() {
        return Err(Error::domain(format!("Re(s) = {} must be positive", s.re)));
    }
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for e in table.entries() {
        let z = (-s * e.logp).exp();
        let mut v = neg_log_1m(z);
        if e.chi != 0 {
            v += neg_log_1m(z * e.chi as f64);
        }
        re.add(v.re);
        im.add(v.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

pub fn h_value(s: Complex64, table: &PrimeTable) -> Result<Complex64> {
    Ok(log_h(s, table)?.exp())
}

/// Real log H(σ).
pub fn log_h_real(sigma: f64, table: &PrimeTable) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma = {sigma} must be positive")));
    }
    let mut acc = KahanSum::new();
    for e in table.entries() {
        let z = (-sigma * e.logp).exp();
        acc.add(-(-z).ln_1p());
        if e.chi != 0 {
            acc.add(-(-(e.chi as f64) * z).ln_1p());
        }
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiDerivatives {
    pub sigma: f64,
    pub y: u64,
    /// log H(σ).
    pub phi: f64,
    /// φ₁ … φ₄.
    pub d: [f64; 4],
    /// Bound on the discarded ν-tail, maximised over the five series.
    pub truncation_error_bound: f64,
}

/// φ and φ₁…φ₄ at σ from the prime-power series
/// φ_k(σ) = Σ_p Σ_ν (1 + χ₄(p)^ν)(−ν log p)^k p^{−νσ}/ν.
pub fn phi_derivatives(sigma: f64, table: &PrimeTable) -> Result<PhiDerivatives> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("sigma = {sigma} must be positive")));
    }
    let mut acc = [KahanSum::new(); 5];
    let mut tail = [0.0f64; 5];
    for e in table.entries() {
        let q = (-sigma * e.logp).exp();
        let mut local = [0.0f64; 5];
        let mut pw = 1.0;
        let mut nu = 1u32;
        loop {
            pw *= q;
            let w = match e.chi {
                0 => 1.0,
                1 => 2.0,
                _ => {
                    if nu.is_multiple_of(2) {
                        2.0
                    } else {
                        0.0
                    }
                }
            };
            let nl = nu as f64 * e.logp;
            let mut t = w * pw / nu as f64;
            for l in local.iter_mut() {
                *l += t;
                t *= -nl;
            }
            // successive-term ratio bound from here on; decreasing in ν
            let r = q * ((nu + 1) as f64 / nu as f64).powi(3);
            // magnitudes of the next (ν+1) terms with weight ≤ 2
            let next_nl = (nu + 1) as f64 * e.logp;
            let mut nxt = 2.0 * pw * q / (nu + 1) as f64;
            let mut small = r < 1.0;
            let mut bounds = [0.0f64; 5];
            for k in 0..5 {
                bounds[k] = if r < 1.0 { nxt / (1.0 - r) } else { f64::INFINITY };
                if bounds[k] > PHI_SERIES_CUTOFF * local[k].abs() {
                    small = false;
                }
                nxt *= next_nl;
            }
            if small || pw == 0.0 {
                for k in 0..5 {
                    tail[k] += if pw == 0.0 { 0.0 } else { bounds[k] };
                }
                break;
            }
            nu += 1;
        }
        for k in 0..5 {
            acc[k].add(local[k]);
        }
    }
    let v: Vec<f64> = acc.iter().map(|a| a.value()).collect();
    Ok(PhiDerivatives {
        sigma,
        y: table.y_limit(),
        phi: v[0],
        d: [v[1], v[2], v[3], v[4]],
        truncation_error_bound: tail.iter().cloned().fold(0.0, f64::max),
    })
}

/// φ₁(σ) alone; cheaper than the full set.
pub fn phi1(sigma: f64, table: &PrimeTable) -> Result<f64> {
    Ok(phi_derivatives(sigma, table)?.d[0])
}

/// (t, |H(α + it)| / H(α)) for each t.
pub fn h_ratio_profile(alpha: f64, table: &PrimeTable, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let base = log_h_real(alpha, table)?;
    t_grid
        .iter()
        .map(|&t| {
            let l = log_h(Complex64::new(alpha, t), table)?;
            Ok((t, (l.re - base).exp()))
        })
        .collect()
}
