//! The saddle point α: the root of log x + φ₁(α) = 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::euler::phi_derivatives;
use crate::primes::PrimeTable;
use crate::special::xi;

#[derive(Debug, Clone, Copy)]
pub struct SaddleOptions {
    /// Residual target relative to log x.
    pub residual_tol: f64,
    pub max_iters: usize,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions {
            residual_tol: 1e-12,
            max_iters: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleResult {
    pub log_x: f64,
    pub y: u64,
    pub u: f64,
    pub alpha: f64,
    /// log x + φ₁(α).
    pub residual: f64,
    pub iters: usize,
    pub bracket: (f64, f64),
    /// φ₂(α), a by-product of the last Newton step.
    pub phi2: f64,
}

/// Solves log x + φ₁(α) = 0 over the primes of `table` (y = its bound).
///
/// Newton steps are kept inside a sign-changing bracket, with bisection
/// whenever a step leaves it. Needs x > 1.
pub fn solve_alpha(log_x: f64, table: &PrimeTable, opts: &SaddleOptions) -> Result<SaddleResult> {
    let y = table.y_limit();
    if y < 2 || table.is_empty() {
        return Err(Error::domain(format!("y = {y} must be at least 2")));
    }
    if !(log_x > 0.0) || !log_x.is_finite() {
        return Err(Error::domain(format!("log x = {log_x} must be positive and finite")));
    }
    let ly = (y as f64).ln();
    let g = |s: f64| -> Result<(f64, f64)> {
        let d = phi_derivatives(s, table)?;
        Ok((log_x + d.d[0], d.d[1]))
    };
    let (mut lo, mut hi) = (1.0 / ly, 1.0 + 3.0 / ly);
    let mut iters = 0;
    while g(lo)?.0 >= 0.0 {
        lo /= 2.0;
        iters += 1;
        if iters > opts.max_iters || lo < 1e-300 {
            return Err(Error::NoConvergence { what: "saddle bracket (low end)".into(), iters });
        }
    }
    while g(hi)?.0 <= 0.0 {
        hi *= 2.0;
        iters += 1;
        if iters > opts.max_iters || !hi.is_finite() {
            return Err(Error::NoConvergence { what: "saddle bracket (high end)".into(), iters });
        }
    }
    let tol = opts.residual_tol * log_x;
    let mut s = 0.5 * (lo + hi);
    for it in 1..=opts.max_iters {
        let (r, d2) = g(s)?;
        if r.abs() <= tol {
            return Ok(SaddleResult {
                log_x,
                y,
                u: log_x / ly,
                alpha: s,
                residual: r,
                iters: it,
                bracket: (lo, hi),
                phi2: d2,
            });
        }
        if r < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - r / d2;
        s = if d2 > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            // bracket exhausted before the residual target
            break;
        }
    }
    Err(Error::NoConvergence {
        what: format!("saddle point for log x = {log_x}, y = {y}"),
        iters: opts.max_iters,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCheck {
    Holds,
    Fails,
    Skipped(String),
}

impl BoundCheck {
    fn from_bool(ok: bool) -> Self {
        if ok {
            BoundCheck::Holds
        } else {
            BoundCheck::Fails
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBounds {
    pub u: f64,
    pub alpha: f64,
    /// α ≥ 2/log y for 1 ≤ u ≤ y/(8 log y).
    pub lower: BoundCheck,
    /// α ≤ 1 − 4/log y for u ≥ 14.
    pub upper: BoundCheck,
}

pub fn alpha_bounds_check(sr: &SaddleResult, y_floor: f64) -> AlphaBounds {
    let y = sr.y as f64;
    let ly = y.ln();
    let u = sr.u;
    let small_y = (y < y_floor).then(|| format!("y < {y_floor}"));
    let lower = match &small_y {
        Some(r) => BoundCheck::Skipped(r.clone()),
        None if u < 1.0 || u > y / (8.0 * ly) => BoundCheck::Skipped("u outside [1, y/(8 log y)]".into()),
        None => BoundCheck::from_bool(sr.alpha >= 2.0 / ly),
    };
    let upper = match &small_y {
        Some(r) => BoundCheck::Skipped(r.clone()),
        None if u < 14.0 => BoundCheck::Skipped("u < 14".into()),
        None => BoundCheck::from_bool(sr.alpha <= 1.0 - 4.0 / ly),
    };
    AlphaBounds { u, alpha: sr.alpha, lower, upper }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaApprox {
    pub alpha: f64,
    /// 1 − ξ(u)/log y.
    pub approx: f64,
    pub gap: f64,
    /// 1 − log(u log u)/log y, for u ≥ 3.
    pub loglog: Option<f64>,
    /// log(1 + y/log x)/log y.
    pub thm2_form: f64,
}

pub fn alpha_xi_approx(sr: &SaddleResult) -> Result<AlphaApprox> {
    let ly = (sr.y as f64).ln();
    let u = sr.u;
    if u < 1.0 {
        return Err(Error::domain(format!("alpha_xi_approx needs u >= 1, got {u}")));
    }
    let approx = 1.0 - xi(u)? / ly;
    let loglog = (u >= 3.0).then(|| 1.0 - (u * u.ln()).ln() / ly);
    let thm2_form = (sr.y as f64 / sr.log_x).ln_1p() / ly;
    Ok(AlphaApprox { alpha: sr.alpha, approx, gap: sr.alpha - approx, loglog, thm2_form })
}
