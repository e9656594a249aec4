//! Estimates of Ψ_G(x, y) set against the exact count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{exact_psi_g, ExactCount, ExactOptions, Method};
use crate::error::{Error, Result};
use crate::euler::{log_h, log_h_real, phi_derivatives};
use crate::kahan::KahanSum;
use crate::primes::PrimeTable;
use crate::quadrature;
use crate::saddle::{solve_alpha, SaddleOptions, SaddleResult};
use crate::special::{log_rho_saddle_form, rho_checked};

#[derive(Debug, Clone, Copy)]
pub struct EstimatorOptions {
    pub saddle: SaddleOptions,
    pub exact: ExactOptions,
    /// ε₀ in the applicability windows.
    pub epsilon0: f64,
    /// λ in the difference-check window Y(λ) = exp((log y)^{3/2 − λ}).
    pub lambda: f64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            saddle: SaddleOptions::default(),
            exact: ExactOptions::default(),
            epsilon0: 0.1,
            lambda: 0.25,
        }
    }
}

/// A positive estimate with its natural log; `value` is infinite when the
/// estimate exceeds the float range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub log_value: f64,
}

impl Estimate {
    fn from_log(log_value: f64) -> Self {
        Estimate { value: log_value.exp(), log_value }
    }

    pub fn overflowed(&self) -> bool {
        self.value.is_infinite()
    }

    /// estimate / exact, computed in log space.
    pub fn ratio_to(&self, exact: u128) -> f64 {
        (self.log_value - (exact as f64).ln()).exp()
    }
}

/// An upper threshold x, with its exact integer value when it has one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub log_x: f64,
    pub int: Option<u128>,
}

impl Threshold {
    pub fn from_int(x: u128) -> Self {
        Threshold { log_x: (x as f64).ln(), int: Some(x) }
    }

    pub fn from_f64(x: f64) -> Self {
        let int = (x.fract() == 0.0 && x >= 1.0 && x < 2f64.powi(128)).then_some(x as u128);
        Threshold { log_x: x.ln(), int }
    }

    /// x = y^u, exact when u is a whole number and the power fits.
    pub fn from_y_u(y: u64, u: f64) -> Self {
        let int = if u.fract() == 0.0 && (0.0..=128.0).contains(&u) {
            (y as u128).checked_pow(u as u32)
        } else {
            None
        };
        Threshold { log_x: (y as f64).ln() * u, int }
    }

    pub fn x(&self) -> f64 {
        match self.int {
            Some(v) => v as f64,
            None => self.log_x.exp(),
        }
    }

    /// Integer part of x, for the exact count.
    pub fn floor(&self) -> Result<u128> {
        if let Some(v) = self.int {
            return Ok(v);
        }
        let x = self.log_x.exp();
        if x < 2f64.powi(128) {
            Ok(x.floor() as u128)
        } else {
            Err(Error::Overflow(format!("x = e^{} does not fit 128 bits", self.log_x)))
        }
    }
}

/// Parses a threshold: plain integers and `<int>e<k>` exactly, anything else as a float.
pub fn parse_threshold(s: &str) -> Result<Threshold> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u128>() {
        return Ok(Threshold::from_int(v));
    }
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        if let (Ok(m), Ok(e)) = (m.parse::<u128>(), e.parse::<u32>()) {
            if let Some(v) = 10u128.checked_pow(e).and_then(|p| p.checked_mul(m)) {
                return Ok(Threshold::from_int(v));
            }
        }
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Threshold::from_f64(v)),
        _ => Err(Error::domain(format!("cannot read x = {s:?}"))),
    }
}

pub fn saddle(th: &Threshold, table: &PrimeTable, opts: &EstimatorOptions) -> Result<SaddleResult> {
    solve_alpha(th.log_x, table, &opts.saddle)
}

/// 4x^α H(α)/(α √(2π φ₂(α))).
pub fn thm1_main_term(sr: &SaddleResult, table: &PrimeTable) -> Result<Estimate> {
    let d = phi_derivatives(sr.alpha, table)?;
    let log = 4f64.ln() + sr.alpha * sr.log_x + d.phi
        - sr.alpha.ln()
        - 0.5 * (2.0 * std::f64::consts::PI * d.d[1]).ln();
    Ok(Estimate::from_log(log))
}

/// πx(ξ'/2π)^{1/2} exp(γ₀ − uξ + ∫₀^ξ (e^s − 1)/s ds); needs x ≥ y.
pub fn thm2_estimate(log_x: f64, y: u64) -> Result<Estimate> {
    let u = log_x / (y as f64).ln();
    Ok(Estimate::from_log(
        std::f64::consts::PI.ln() + log_x + log_rho_saddle_form(u)?,
    ))
}

/// (log x)^{2+ε₀} < y < x.
pub fn thm2_in_window(log_x: f64, y: u64, epsilon0: f64) -> bool {
    let y = y as f64;
    log_x.powf(2.0 + epsilon0) < y && y.ln() < log_x
}

/// (log log y)² ≤ u ≤ y^{1/(2+ε₀)}/log y with x ≥ y.
pub fn thm1_in_window(log_x: f64, y: u64, epsilon0: f64) -> bool {
    let ly = (y as f64).ln();
    let u = log_x / ly;
    u >= 1.0 && u >= ly.ln().powi(2) && u <= (y as f64).powf(1.0 / (2.0 + epsilon0)) / ly
}

/// πρ(u)x, with the clamp flag of ρ.
pub fn goswami_estimate(log_x: f64, y: u64) -> Result<(Estimate, bool)> {
    let u = log_x / (y as f64).ln();
    let (r, clamped) = rho_checked(u)?;
    Ok((Estimate::from_log(std::f64::consts::PI.ln() + r.ln() + log_x), clamped))
}

/// 4x^α H(α). `None` for the saddle means x = 1, where the bound is 4.
pub fn rankin_bound(sr: Option<&SaddleResult>, table: &PrimeTable) -> Result<Estimate> {
    match sr {
        None => Ok(Estimate::from_log(4f64.ln())),
        Some(sr) => Ok(Estimate::from_log(
            4f64.ln() + sr.alpha * sr.log_x + log_h_real(sr.alpha, table)?,
        )),
    }
}

/// Exact Ψ_G by enumeration, falling back to the sieve when the node budget
/// runs out and x is small enough.
pub fn auto_exact(x: u128, y: u64, opts: &ExactOptions) -> Result<ExactCount> {
    match exact_psi_g(x, y, Method::Recursive, opts) {
        Err(Error::ResourceLimit(msg)) => {
            if x <= opts.sieve_limit as u128 {
                exact_psi_g(x, y, Method::Sieve, opts)
            } else {
                Err(Error::ResourceLimit(msg))
            }
        }
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronReport {
    pub x: f64,
    pub y: u64,
    pub t_max: f64,
    pub alpha: f64,
    pub integral: f64,
    pub exact: u128,
    pub abs_error: f64,
    pub rel_error: f64,
}

/// (4/π)∫₀^T Re[H(α + it) x^{α+it}/(α + it)] dt against Ψ_G(x, y).
///
/// x must not be an integer. The integral runs over panels of width 1/log y.
pub fn perron_verify(x: f64, table: &PrimeTable, t_max: f64, opts: &EstimatorOptions) -> Result<PerronReport> {
    if !(x > 1.0) || x.fract() == 0.0 || !x.is_finite() {
        return Err(Error::domain(format!("x = {x} must be a non-integer above 1")));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::domain(format!("T = {t_max} must be positive")));
    }
    let y = table.y_limit();
    let lx = x.ln();
    let sr = solve_alpha(lx, table, &opts.saddle)?;
    let a = sr.alpha;
    let base = log_h_real(a, table)?;
    let mut err = None;
    let mut f = |t: f64| -> f64 {
        let s = Complex64::new(a, t);
        match log_h(s, table) {
            Ok(l) => {
                let w = (l - base + Complex64::new(0.0, t * lx)).exp() / s;
                w.re
            }
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let width = 1.0 / (y as f64).ln();
    let panels = (t_max / width).ceil() as usize;
    let mut acc = KahanSum::new();
    for k in 0..panels {
        let lo = k as f64 * width;
        let hi = ((k + 1) as f64 * width).min(t_max);
        if hi > lo {
            let (v, _) = quadrature::integrate(&mut f, lo, hi, 1e-12 * width, 1e-12, 200)?;
            acc.add(v);
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    let integral = 4.0 / std::f64::consts::PI * acc.value() * (a * lx + base).exp();
    let exact = auto_exact(x.floor() as u128, y, &opts.exact)?.value;
    let abs_error = (integral - exact as f64).abs();
    Ok(PerronReport {
        x,
        y,
        t_max,
        alpha: a,
        integral,
        exact,
        abs_error,
        rel_error: abs_error / exact as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceReport {
    pub x: u128,
    pub y: u64,
    pub z: f64,
    pub z_max: f64,
    /// Ψ_G(x + x/z, y) − Ψ_G(x, y).
    pub lhs: u128,
    /// x^α H(α)/z.
    pub scale: f64,
    pub ratio: f64,
}

/// Y(λ) = exp((log y)^{3/2 − λ}).
pub fn z_window(y: u64, lambda: f64) -> f64 {
    (y as f64).ln().powf(1.5 - lambda).exp()
}

pub fn difference_check(x: u128, table: &PrimeTable, z: f64, opts: &EstimatorOptions) -> Result<DifferenceReport> {
    let y = table.y_limit();
    let z_max = z_window(y, opts.lambda);
    if !(z >= 1.0 && z <= z_max) {
        return Err(Error::domain(format!("z = {z} outside [1, {z_max}]")));
    }
    if x < 2 {
        return Err(Error::domain(format!("x = {x} must be at least 2")));
    }
    let step = (x as f64 / z).floor() as u128;
    let x2 = x.checked_add(step).ok_or_else(|| Error::Overflow("x + x/z".into()))?;
    let lo = auto_exact(x, y, &opts.exact)?.value;
    let hi = auto_exact(x2, y, &opts.exact)?.value;
    let lx = (x as f64).ln();
    let sr = solve_alpha(lx, table, &opts.saddle)?;
    let scale = (sr.alpha * lx + log_h_real(sr.alpha, table)?).exp() / z;
    let lhs = hi - lo;
    Ok(DifferenceReport { x, y, z, z_max, lhs, scale, ratio: lhs as f64 / scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    OutsideThm1Range,
    OutsideThm2Range,
    OracleSkipped,
    OverflowLogspace,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::OutsideThm1Range => "outside-thm1-range",
            Flag::OutsideThm2Range => "outside-thm2-range",
            Flag::OracleSkipped => "oracle-skipped",
            Flag::OverflowLogspace => "overflow-logspace",
        }
    }
}

/// One (x, y) cell of a comparison sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub x: Threshold,
    pub y: u64,
    pub u: f64,
    pub alpha: Option<f64>,
    pub residual: Option<f64>,
    pub exact: Option<u128>,
    pub thm1: Option<Estimate>,
    pub thm2: Option<Estimate>,
    pub goswami: Option<Estimate>,
    pub rankin: Option<Estimate>,
    pub ratio_thm1: Option<f64>,
    pub ratio_thm2: Option<f64>,
    pub ratio_goswami: Option<f64>,
    pub flags: Vec<Flag>,
    /// Errors met in this cell, joined; the sweep goes on regardless.
    pub errors: Vec<String>,
}

fn evaluate_cell(th: Threshold, table: &PrimeTable, with_exact: bool, opts: &EstimatorOptions) -> ComparisonRow {
    let y = table.y_limit();
    let ly = (y as f64).ln();
    let mut row = ComparisonRow {
        x: th,
        y,
        u: th.log_x / ly,
        alpha: None,
        residual: None,
        exact: None,
        thm1: None,
        thm2: None,
        goswami: None,
        rankin: None,
        ratio_thm1: None,
        ratio_thm2: None,
        ratio_goswami: None,
        flags: Vec::new(),
        errors: Vec::new(),
    };
    let note = |row: &mut ComparisonRow, what: &str, e: Error| row.errors.push(format!("{what}: {e}"));

    if !thm1_in_window(th.log_x, y, opts.epsilon0) {
        row.flags.push(Flag::OutsideThm1Range);
    }
    if !thm2_in_window(th.log_x, y, opts.epsilon0) {
        row.flags.push(Flag::OutsideThm2Range);
    }

    let sr = if th.log_x > 0.0 {
        match saddle(&th, table, opts) {
            Ok(sr) => Some(sr),
            Err(e) => {
                note(&mut row, "alpha", e);
                None
            }
        }
    } else {
        None
    };
    if let Some(sr) = &sr {
        row.alpha = Some(sr.alpha);
        row.residual = Some(sr.residual);
        match thm1_main_term(sr, table) {
            Ok(v) => row.thm1 = Some(v),
            Err(e) => note(&mut row, "thm1", e),
        }
    }
    match thm2_estimate(th.log_x, y) {
        Ok(v) => row.thm2 = Some(v),
        Err(e) => note(&mut row, "thm2", e),
    }
    match goswami_estimate(th.log_x, y) {
        Ok((v, _)) => row.goswami = Some(v),
        Err(e) => note(&mut row, "goswami", e),
    }
    if sr.is_some() || th.log_x == 0.0 {
        match rankin_bound(sr.as_ref(), table) {
            Ok(v) => row.rankin = Some(v),
            Err(e) => note(&mut row, "rankin", e),
        }
    }

    if with_exact {
        match th.floor().and_then(|x| auto_exact(x, y, &opts.exact)) {
            Ok(c) => row.exact = Some(c.value),
            Err(e) => {
                row.flags.push(Flag::OracleSkipped);
                note(&mut row, "exact", e);
            }
        }
    } else {
        row.flags.push(Flag::OracleSkipped);
    }
    if let Some(ex) = row.exact.filter(|&v| v > 0) {
        row.ratio_thm1 = row.thm1.map(|e| e.ratio_to(ex));
        row.ratio_thm2 = row.thm2.map(|e| e.ratio_to(ex));
        row.ratio_goswami = row.goswami.map(|e| e.ratio_to(ex));
    }
    let overflow = [row.thm1, row.thm2, row.goswami, row.rankin]
        .iter()
        .flatten()
        .any(|e| e.overflowed());
    if overflow {
        row.flags.push(Flag::OverflowLogspace);
    }
    row
}

/// Rows for every (x, y), x outer and y inner, in input order.
pub fn compare_grid(
    xs: &[Threshold],
    ys: &[u64],
    with_exact: bool,
    opts: &EstimatorOptions,
) -> Result<Vec<ComparisonRow>> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::domain("grid lists must be nonempty"));
    }
    if let Some(&y) = ys.iter().find(|&&y| y < 2) {
        return Err(Error::domain(format!("y = {y} must be at least 2")));
    }
    let tables: Vec<PrimeTable> = ys.par_iter().map(|&y| PrimeTable::new(y)).collect();
    let cells: Vec<(Threshold, usize)> = xs
        .iter()
        .flat_map(|&x| (0..ys.len()).map(move |j| (x, j)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(x, j)| evaluate_cell(x, &tables[j], with_exact, opts))
        .collect())
}
