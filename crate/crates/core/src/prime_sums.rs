//! Chebyshev-type prime sums, the twisted Mertens product and von Mangoldt
//! partial sums, each reported next to its asymptotic main term.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::primes::{PrimeEntry, PrimeTable};
use crate::tolerances::EULER_GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimeSumReport {
    pub x: f64,
    pub value: f64,
    pub main_term: f64,
    pub deviation: f64,
}

impl PrimeSumReport {
    fn new(x: f64, value: f64, main_term: f64) -> Self {
        PrimeSumReport {
            x,
            value,
            main_term,
            deviation: value - main_term,
        }
    }
}

fn check_table(table: &PrimeTable, x: f64) -> Result<&[PrimeEntry]> {
    if !(x >= 2.0) {
        return Err(Error::domain(format!("x = {x} must be at least 2")));
    }
    if x.floor() > table.y_limit() as f64 {
        return Err(Error::domain(format!(
            "x = {x} beyond the prime table bound {}",
            table.y_limit()
        )));
    }
    Ok(table.upto(x.floor() as u64))
}

/// θ(x) = Σ_{p ≤ x} log p.
pub fn theta(table: &PrimeTable, x: f64) -> Result<f64> {
    let ps = check_table(table, x)?;
    Ok(ps.iter().map(|e| e.logp).sum::<KahanSum>().value())
}

/// Σ_{p ≤ x} χ₄(p) log p.
pub fn theta_chi4(table: &PrimeTable, x: f64) -> Result<f64> {
    let ps = check_table(table, x)?;
    Ok(ps
        .iter()
        .map(|e| e.chi as f64 * e.logp)
        .sum::<KahanSum>()
        .value())
}

/// ∫₁^x u^{−σ} du.
pub fn power_integral(x: f64, sigma: f64) -> f64 {
    let a = 1.0 - sigma;
    let lx = x.ln();
    if a.abs() * lx < 1e-8 {
        // series of (x^a − 1)/a around a = 0
        lx * (1.0 + a * lx / 2.0 + (a * lx).powi(2) / 6.0)
    } else {
        (a * lx).exp_m1() / a
    }
}

/// Σ_{p ≤ x} w(p) log p / p^σ with w = χ₄ when `twist`, else 1.
///
/// The main term is ∫₁^x u^{−σ} du untwisted and 0 twisted. σ must lie in
/// `[0, 1 + c/log x]`.
pub fn weighted_prime_sum(
    table: &PrimeTable,
    x: f64,
    sigma: f64,
    twist: bool,
    c: f64,
) -> Result<PrimeSumReport> {
    let ps = check_table(table, x)?;
    let upper = 1.0 + c / x.ln();
    if !(0.0..=upper).contains(&sigma) {
        return Err(Error::domain(format!(
            "sigma = {sigma} outside [0, {upper}]"
        )));
    }
    let value = ps
        .iter()
        .map(|e| {
            let w = if twist { e.chi as f64 } else { 1.0 };
            w * e.logp * (-sigma * e.logp).exp()
        })
        .sum::<KahanSum>()
        .value();
    let main = if twist { 0.0 } else { power_integral(x, sigma) };
    Ok(PrimeSumReport::new(x, value, main))
}

/// Π_{p ≤ x} (1 − 1/p)^{−1}(1 − χ₄(p)/p)^{−1} against (π/4)e^{γ₀} log x.
pub fn mertens_product(table: &PrimeTable, x: f64) -> Result<PrimeSumReport> {
    let ps = check_table(table, x)?;
    let log_value = ps
        .iter()
        .map(|e| {
            let inv = 1.0 / e.p as f64;
            -(-inv).ln_1p() - (-(e.chi as f64) * inv).ln_1p()
        })
        .sum::<KahanSum>()
        .value();
    let main = std::f64::consts::FRAC_PI_4 * EULER_GAMMA.exp() * x.ln();
    Ok(PrimeSumReport::new(x, log_value.exp(), main))
}

/// Partial sum of Λ(n)χ(n)^ε / n^s over `n <= y`, s = 1 − β + it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSum {
    pub value: Complex64,
    /// y^{β−it}/(β−it), the untwisted main term.
    pub main_term: Complex64,
}

fn check_lambda(table: &PrimeTable, y: f64, beta: f64) -> Result<&[PrimeEntry]> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain(format!("beta = {beta} must lie in (0, 1)")));
    }
    check_table(table, y)
}

/// Visits every prime power `p^ν <= y` as `(entry, ν, log p^ν)`.
fn for_prime_powers(ps: &[PrimeEntry], y: f64, mut f: impl FnMut(&PrimeEntry, u32, f64)) {
    let ly = y.ln();
    for e in ps {
        let mut nu = 1u32;
        loop {
            let ln = nu as f64 * e.logp;
            if ln > ly * (1.0 + 1e-15) {
                break;
            }
            // guard against rounding at exact prime powers
            let exact = (e.p as u128).checked_pow(nu).map(|v| v as f64 <= y.floor());
            if exact == Some(false) {
                break;
            }
            f(e, nu, ln);
            nu += 1;
        }
    }
}

pub fn lambda_partial_sum(
    table: &PrimeTable,
    y: f64,
    beta: f64,
    t: f64,
    twist: bool,
) -> Result<LambdaSum> {
    let ps = check_lambda(table, y, beta)?;
    let s = Complex64::new(1.0 - beta, t);
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for_prime_powers(ps, y, |e, nu, ln| {
        let w = if twist {
            (e.chi as f64).powi(nu as i32)
        } else {
            1.0
        };
        if w != 0.0 {
            let term = (-s * ln).exp() * (w * e.logp);
            re.add(term.re);
            im.add(term.im);
        }
    });
    let z = Complex64::new(beta, -t);
    let main_term = (z * y.ln()).exp() / z;
    Ok(LambdaSum {
        value: Complex64::new(re.value(), im.value()),
        main_term,
    })
}

/// Σ_{n ≤ y} Λ(n)(1 + χ₄(n)) n^{β−1} (1 − cos(t log n)) with its main term
/// (y^β/β)(1 − β·η/√(β² + t²)), η = t log y − arctan(t/β).
pub fn lambda_cos_sum(table: &PrimeTable, y: f64, beta: f64, t: f64) -> Result<(f64, f64)> {
    let ps = check_lambda(table, y, beta)?;
    let mut acc = KahanSum::new();
    for_prime_powers(ps, y, |e, nu, ln| {
        let w = 1.0 + (e.chi as f64).powi(nu as i32);
        if w != 0.0 {
            acc.add(e.logp * w * ((beta - 1.0) * ln).exp() * (1.0 - (t * ln).cos()));
        }
    });
    let ly = y.ln();
    let eta = t * ly - (t / beta).atan();
    let main = (beta * ly).exp() / beta * (1.0 - beta * eta / (beta * beta + t * t).sqrt());
    Ok((acc.value(), main))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table() -> PrimeTable {
        PrimeTable::new(1000)
    }

    #[test]
    fn theta_examples() {
        let t = table();
        assert_relative_eq!(theta(&t, 10.0).unwrap(), 210f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(theta(&t, 2.0).unwrap(), 2f64.ln(), max_relative = 1e-15);
        let direct: f64 = (2..=100u64)
            .filter(|&n| crate::primes::is_prime(n))
            .map(|n| (n as f64).ln())
            .sum();
        assert_relative_eq!(theta(&t, 100.0).unwrap(), direct, max_relative = 1e-14);
        assert!((theta(&t, 100.0).unwrap() - 83.7284).abs() < 1e-4);
    }

    #[test]
    fn theta_chi_examples() {
        let t = table();
        assert_eq!(theta_chi4(&t, 2.0).unwrap(), 0.0);
        assert_relative_eq!(
            theta_chi4(&t, 5.0).unwrap(),
            5f64.ln() - 3f64.ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            theta_chi4(&t, 10.0).unwrap(),
            5f64.ln() - 3f64.ln() - 7f64.ln(),
            max_relative = 1e-14
        );
        assert!((theta_chi4(&t, 10.0).unwrap() + 1.4351).abs() < 1e-4);
    }

    #[test]
    fn weighted_examples() {
        let t = table();
        let r = weighted_prime_sum(&t, 2.0, 0.0, false, 2.0).unwrap();
        assert_relative_eq!(r.value, 2f64.ln());
        assert_relative_eq!(r.main_term, 1.0, max_relative = 1e-15);
        let r = weighted_prime_sum(&t, 10.0, 1.0, false, 2.0).unwrap();
        let direct = [2.0f64, 3.0, 5.0, 7.0].iter().map(|p| p.ln() / p).sum::<f64>();
        assert_relative_eq!(r.value, direct, max_relative = 1e-15);
        assert!((r.value - 1.3127).abs() < 1e-4);
        assert_relative_eq!(r.main_term, 10f64.ln(), max_relative = 1e-15);
        let r = weighted_prime_sum(&t, 10.0, 1.0, true, 2.0).unwrap();
        let direct = -3f64.ln() / 3.0 + 5f64.ln() / 5.0 - 7f64.ln() / 7.0;
        assert_relative_eq!(r.value, direct, max_relative = 1e-14);
        assert!((r.value + 0.3223).abs() < 1e-4);
        assert_eq!(r.main_term, 0.0);
    }

    #[test]
    fn weighted_domain() {
        let t = table();
        assert!(weighted_prime_sum(&t, 100.0, -0.1, false, 2.0).is_err());
        assert!(weighted_prime_sum(&t, 100.0, 1.0 + 2.0 / 100f64.ln() + 1e-9, false, 2.0).is_err());
        assert!(weighted_prime_sum(&t, 100.0, 1.0 + 2.0 / 100f64.ln(), false, 2.0).is_ok());
        assert!(theta(&t, 1.5).is_err());
        assert!(theta(&t, 5000.0).is_err());
    }

    #[test]
    fn power_integral_branches() {
        assert_relative_eq!(power_integral(10.0, 1.0), 10f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(power_integral(10.0, 0.0), 9.0, max_relative = 1e-15);
        let near = power_integral(10.0, 1.0 + 1e-10);
        assert_relative_eq!(near, 10f64.ln(), max_relative = 1e-9);
    }

    #[test]
    fn mertens_examples() {
        let t = table();
        assert_relative_eq!(mertens_product(&t, 2.0).unwrap().value, 2.0, max_relative = 1e-15);
        assert_relative_eq!(mertens_product(&t, 3.0).unwrap().value, 2.25, max_relative = 1e-15);
    }

    #[test]
    fn lambda_examples() {
        let t = table();
        let v = lambda_partial_sum(&t, 3.0, 0.5, 0.0, false).unwrap().value;
        let want = 2f64.ln() / 2f64.sqrt() + 3f64.ln() / 3f64.sqrt();
        assert_relative_eq!(v.re, want, max_relative = 1e-15);
        assert!((v.re - 1.1244).abs() < 1e-4);
        assert_eq!(v.im, 0.0);
        let v = lambda_partial_sum(&t, 4.0, 0.5, 0.0, false).unwrap().value;
        assert_relative_eq!(v.re, want + 2f64.ln() / 2.0, max_relative = 1e-15);
        assert!((v.re - 1.4710).abs() < 1e-4);
        let v = lambda_partial_sum(&t, 2.0, 0.5, 0.0, true).unwrap().value;
        assert_eq!(v, Complex64::new(0.0, 0.0));
        assert!(lambda_partial_sum(&t, 10.0, 1.0, 0.0, false).is_err());
    }

    fn mangoldt(n: u64) -> Option<(u64, f64)> {
        let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
        let mut m = n;
        while m.is_multiple_of(p) {
            m /= p;
        }
        (m == 1).then(|| (p, (p as f64).ln()))
    }

    #[test]
    fn lambda_sums_match_direct_loop() {
        let t = table();
        for &(y, beta, tt) in &[(97.0, 0.3, 2.5), (500.0, 0.6, -7.0), (64.0, 0.5, 0.1)] {
            let s = Complex64::new(1.0 - beta, tt);
            let mut plain = Complex64::new(0.0, 0.0);
            let mut twisted = Complex64::new(0.0, 0.0);
            let mut cos_sum = 0.0;
            for n in 2..=(y as u64) {
                if let Some((p, lam)) = mangoldt(n) {
                    let ln = (n as f64).ln();
                    let chi = chi_of(n, p);
                    plain += (-s * ln).exp() * lam;
                    twisted += (-s * ln).exp() * (lam * chi);
                    cos_sum += lam * (1.0 + chi) * ((beta - 1.0) * ln).exp() * (1.0 - (tt * ln).cos());
                }
            }
            let a = lambda_partial_sum(&t, y, beta, tt, false).unwrap().value;
            let b = lambda_partial_sum(&t, y, beta, tt, true).unwrap().value;
            let (c, _) = lambda_cos_sum(&t, y, beta, tt).unwrap();
            assert!((a - plain).norm() < 1e-12 * plain.norm().max(1.0));
            assert!((b - twisted).norm() < 1e-12 * twisted.norm().max(1.0));
            assert_relative_eq!(c, cos_sum, max_relative = 1e-12);
        }
    }

    fn chi_of(n: u64, _p: u64) -> f64 {
        crate::arith::chi4(n) as f64
    }

    #[test]
    fn lambda_cos_examples() {
        let t = table();
        assert_eq!(lambda_cos_sum(&t, 10.0, 0.3, 0.0).unwrap().0, 0.0);
        let tt = std::f64::consts::PI / 5f64.ln();
        let (v, _) = lambda_cos_sum(&t, 5.0, 0.5, tt).unwrap();
        let dominant = 4.0 * 5f64.ln() / 5f64.sqrt();
        let l2 = 2f64.ln();
        let rest = l2 / 2f64.sqrt() * (1.0 - (tt * l2).cos()) + l2 / 2.0 * (1.0 - (tt * 4f64.ln()).cos());
        assert_relative_eq!(v, dominant + rest, max_relative = 1e-14);
        assert!(v > dominant);
        let (v, _) = lambda_cos_sum(&t, 2.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(v, l2 / 2f64.sqrt() * (1.0 - l2.cos()), max_relative = 1e-14);
    }
}
