//! ξ(u), ξ'(u), the Dickman function ρ(u) and ∫₀^ξ (e^s − 1)/s ds.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::tolerances::{EULER_GAMMA, RHO_UNDERFLOW};

/// E(ξ) = (e^ξ − 1 − ξ)/ξ and E'(ξ), accurate near 0.
fn e_ratio(xi: f64) -> (f64, f64) {
    if xi < 0.5 {
        // Σ ξ^k/(k+1)!, Σ k ξ^{k−1}/(k+1)!
        let (mut e, mut de) = (0.0, 0.0);
        let mut fact = 1.0; // (k+1)!
        let mut pw = 1.0; // ξ^{k−1}
        for k in 1..30 {
            fact *= (k + 1) as f64;
            de += k as f64 * pw / fact;
            pw *= xi;
            e += pw / fact;
        }
        (e, de)
    } else {
        let em1 = xi.exp_m1();
        let e = (em1 - xi) / xi;
        let de = (xi * (em1 + 1.0) - em1) / (xi * xi);
        (e, de)
    }
}

/// Positive root of e^ξ = 1 + uξ; ξ(1) = 0.
pub fn xi(u: f64) -> Result<f64> {
    if !(u >= 1.0) || !u.is_finite() {
        return Err(Error::domain(format!("xi needs u >= 1, got {u}")));
    }
    if u == 1.0 {
        return Ok(0.0);
    }
    // Solve E(ξ) = u − 1; E is increasing and convex, so Newton from the
    // right of the root decreases monotonically onto it.
    let target = u - 1.0;
    let mut x = (u * u.ln() + 1.0).ln().max(1e-300);
    while e_ratio(x).0 <= target {
        x *= 2.0;
    }
    for _ in 0..200 {
        let (e, de) = e_ratio(x);
        let step = (e - target) / de;
        let nx = x - step;
        if !(nx < x) || nx <= 0.0 {
            break;
        }
        x = nx;
        if step <= 1e-16 * x {
            break;
        }
    }
    Ok(x)
}

/// ξ'(u) = ξ/(1 + uξ − u), for u > 1.
pub fn xi_prime(u: f64) -> Result<f64> {
    if !(u > 1.0) {
        return Err(Error::domain(format!("xi_prime needs u > 1, got {u}")));
    }
    let x = xi(u)?;
    Ok(x / (1.0 + u * x - u))
}

/// ∫₀^ξ (e^s − 1)/s ds.
pub fn exp_integral(xi_val: f64) -> Result<f64> {
    if !(xi_val >= 0.0) {
        return Err(Error::domain(format!("exp_integral needs xi >= 0, got {xi_val}")));
    }
    let head = xi_val.min(30.0);
    // Σ ξ^k/(k·k!)
    let mut sum = 0.0;
    let mut term = 1.0; // ξ^k/k!
    let mut k = 1;
    loop {
        term *= head / k as f64;
        let add = term / k as f64;
        sum += add;
        if add <= 1e-17 * sum || k > 500 {
            break;
        }
        k += 1;
    }
    if xi_val > 30.0 {
        let (tail, _) = quadrature::integrate(
            |s: f64| s.exp_m1() / s,
            30.0,
            xi_val,
            0.0,
            1e-14,
            10_000,
        )?;
        sum += tail;
    }
    Ok(sum)
}

/// log of (ξ'/2π)^{1/2} exp(γ₀ − uξ + ∫₀^ξ (e^s − 1)/s ds), for u ≥ 1.
///
/// At u = 1 the limits ξ = 0 and ξ' = 2 are used.
pub fn log_rho_saddle_form(u: f64) -> Result<f64> {
    if !(u >= 1.0) {
        return Err(Error::domain(format!("saddle form needs u >= 1, got {u}")));
    }
    let (x, xp) = if u == 1.0 { (0.0, 2.0) } else { (xi(u)?, xi_prime(u)?) };
    Ok(0.5 * (xp / (2.0 * std::f64::consts::PI)).ln() + EULER_GAMMA - u * x + exp_integral(x)?)
}

pub fn rho_saddle_form(u: f64) -> Result<f64> {
    if !(u > 1.0) {
        return Err(Error::domain(format!("rho_saddle_form needs u > 1, got {u}")));
    }
    Ok(log_rho_saddle_form(u)?.exp())
}

/// ρ on the grid u = j·step, 0 ≤ u ≤ u_max.
///
/// Built from uρ(u) = ∫_{u−1}^{u} ρ(t) dt with Hermite-cubic panels that use
/// the exact derivative ρ'(t) = −ρ(t−1)/t. The table stops before values
/// drop under the underflow floor.
#[derive(Debug, Clone)]
pub struct DickmanTable {
    step: f64,
    n: usize,
    values: Vec<f64>,
    u_max: f64,
}

impl DickmanTable {
    /// `step` must be 1/n for an integer n ≥ 2.
    pub fn new(step: f64, u_max: f64) -> Result<Self> {
        let nf = (1.0 / step).round();
        if !(nf >= 2.0) || ((1.0 / step) - nf).abs() > 1e-9 * nf || !(u_max >= 1.0) {
            return Err(Error::domain(format!(
                "Dickman grid needs step = 1/n and u_max >= 1, got step={step}, u_max={u_max}"
            )));
        }
        let n = nf as usize;
        let h = 1.0 / nf;
        let m = (u_max * nf).floor() as usize;
        let mut v = vec![1.0f64; n.min(m) + 1];
        if m <= n {
            return Ok(DickmanTable { step: h, n, values: v, u_max: m as f64 * h });
        }
        v.reserve(m - n);
        // derivative at node i, from the right and from the left
        let t = |i: usize| i as f64 * h;
        let d_right = |v: &[f64], i: usize| if i < n { 0.0 } else { -v[i - n] / t(i) };
        let d_left = |v: &[f64], i: usize| if i <= n { 0.0 } else { -v[i - n] / t(i) };
        let panel = |v: &[f64], i: usize| {
            h / 2.0 * (v[i] + v[i + 1]) + h * h / 12.0 * (d_right(v, i) - d_left(v, i + 1))
        };
        // panels I_i, and sums over fixed blocks of them
        let b = (n as f64).sqrt().ceil() as usize;
        let mut panels: Vec<f64> = (0..n).map(|i| panel(&v, i)).collect();
        let mut blocks: Vec<f64> = Vec::new();
        let refresh = |panels: &[f64], blocks: &mut Vec<f64>| {
            while (blocks.len() + 1) * b <= panels.len() {
                let s = blocks.len() * b;
                blocks.push(panels[s..s + b].iter().sum());
            }
        };
        refresh(&panels, &mut blocks);
        for j in n + 1..=m {
            // W = Σ_{i=j−n}^{j−2} I_i
            let (lo, hi) = (j - n, j - 1);
            let mut w = 0.0;
            let mut i = lo;
            while i < hi {
                if i % b == 0 && i + b <= hi && i / b < blocks.len() {
                    w += blocks[i / b];
                    i += b;
                } else {
                    w += panels[i];
                    i += 1;
                }
            }
            let rhs = w + h / 2.0 * v[j - 1] + h * h / 12.0 * (d_right(&v, j - 1) - d_left(&v, j));
            let val = rhs / (t(j) - h / 2.0);
            if !(val >= RHO_UNDERFLOW) {
                break;
            }
            v.push(val);
            panels.push(panel(&v, j - 1));
            refresh(&panels, &mut blocks);
        }
        let u_max = (v.len() - 1) as f64 * h;
        Ok(DickmanTable { step: h, n, values: v, u_max })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Largest u held; beyond it ρ is below the underflow floor.
    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn deriv(&self, i: usize, from_right: bool) -> f64 {
        let n = self.n;
        if i < n || (i == n && !from_right) {
            0.0
        } else {
            -self.values[i - n] / (i as f64 * self.step)
        }
    }

    /// ρ(u) and whether it was clamped to zero.
    pub fn eval(&self, u: f64) -> Result<(f64, bool)> {
        if !(u >= 0.0) {
            return Err(Error::domain(format!("rho needs u >= 0, got {u}")));
        }
        if u <= 1.0 {
            return Ok((1.0, false));
        }
        if u > self.u_max {
            return Ok((0.0, true));
        }
        let pos = u / self.step;
        let mut i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            i = self.values.len() - 2;
        }
        let s = pos - i as f64;
        if s == 0.0 {
            return Ok((self.values[i], false));
        }
        let h = self.step;
        let (p0, p1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.deriv(i, true) * h, self.deriv(i + 1, false) * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let val = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1;
        if val < RHO_UNDERFLOW {
            Ok((0.0, true))
        } else {
            Ok((val, false))
        }
    }
}

/// Shared default table: step 10⁻³ up to the underflow floor (u ≈ 125).
pub fn default_table() -> &'static DickmanTable {
    static TABLE: OnceLock<DickmanTable> = OnceLock::new();
    TABLE.get_or_init(|| DickmanTable::new(1e-3, 150.0).expect("valid default grid"))
}

/// ρ(u) with the clamp flag.
pub fn rho_checked(u: f64) -> Result<(f64, bool)> {
    default_table().eval(u)
}

pub fn rho(u: f64) -> Result<f64> {
    Ok(rho_checked(u)?.0)
}
