//! Acceptance criteria 1–12, one PASS/FAIL line each. Exits non-zero when any fails.

use std::time::Instant;

use smoothcircle::arith::r_over_4_spf;
use smoothcircle::estimators::{
    compare_grid, perron_verify, rankin_bound, thm1_main_term, EstimatorOptions, Threshold,
};
use smoothcircle::euler::{log_h, log_h_real, phi_derivatives, PhiDerivatives};
use smoothcircle::prime_sums::mertens_product;
use smoothcircle::report::write_csv;
use smoothcircle::saddle::{solve_alpha, SaddleOptions};
use smoothcircle::special::{exp_integral, rho, rho_saddle_form, xi};
use smoothcircle::tolerances::*;
use smoothcircle::{exact_psi_g, lattice_r, Complex64, ExactOptions, Method, PrimeTable, SpfTable};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_oracle_equivalence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let n_max = 1_000_000u32;
    // first call builds and caches the table, second reads it back
    SpfTable::load_or_build(dir.path(), n_max).map_err(|e| e.to_string())?;
    let spf = SpfTable::load_or_build(dir.path(), n_max).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for n in 1..=n_max as u64 {
        let r = r_over_4_spf(n, &spf).map_err(|e| e.to_string())?;
        if 4 * r != lattice_r(n) {
            bad.push(n);
        }
    }
    check(bad.is_empty(), format!("n <= {n_max}, mismatches: {}", bad.len()))
}

fn c2_gauss_identity() -> Outcome {
    let o = ExactOptions::default();
    let v100 = exact_psi_g(100, 100, Method::Recursive, &o).map_err(|e| e.to_string())?.value;
    let mut ok = v100 == 316;
    let mut detail = format!("psi(100,100)={v100}");
    for &x in &[1000u64, 10_000] {
        let lattice: u128 = (1..=x).map(|n| lattice_r(n) as u128).sum::<u128>();
        for m in [Method::Sieve, Method::Recursive] {
            let v = exact_psi_g(x as u128, x, m, &o).map_err(|e| e.to_string())?.value;
            ok &= v == lattice;
            detail += &format!(" psi({x},{x},{m})={v} lattice={lattice}");
        }
    }
    check(ok, detail)
}

fn c3_saddle() -> Outcome {
    let opts = SaddleOptions::default();
    let a = solve_alpha(4f64.ln(), &PrimeTable::new(2), &opts).map_err(|e| e.to_string())?.alpha;
    let closed_err = (a - 1.5f64.log2()).abs();
    let ys = [2u64, 3, 5, 10, 30, 100, 300, 1000, 10_000, 100_000];
    let us = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 14.0, 20.0];
    let mut worst = 0.0f64;
    let mut cells = 0;
    for &y in &ys {
        let t = PrimeTable::new(y);
        for &u in &us {
            let lx = (y as f64).ln() * u;
            let r = solve_alpha(lx, &t, &opts).map_err(|e| e.to_string())?;
            worst = worst.max(r.residual.abs() / lx);
            cells += 1;
        }
    }
    check(
        closed_err <= 1e-12 && worst <= SADDLE_RESIDUAL,
        format!("|alpha(4,2)-log2(3/2)|={closed_err:.2e}, max residual/log x={worst:.2e} over {cells} cells"),
    )
}

fn c4_rankin() -> Outcome {
    let opts = EstimatorOptions::default();
    let xs: [u128; 12] = [
        1, 2, 10, 99, 1000, 4321, 10_000, 65_537, 100_000, 1_000_000, 3_141_592, 10_000_000,
    ];
    let mut violations = 0;
    let mut cells = 0;
    for &y in &[2u64, 3, 5, 10, 30, 100, 300] {
        let t = PrimeTable::new(y);
        for &x in &xs {
            let ex = exact_psi_g(x, y, Method::Recursive, &opts.exact).map_err(|e| e.to_string())?.value;
            let sr = if x == 1 {
                None
            } else {
                Some(solve_alpha((x as f64).ln(), &t, &opts.saddle).map_err(|e| e.to_string())?)
            };
            let rb = rankin_bound(sr.as_ref(), &t).map_err(|e| e.to_string())?;
            if rb.value.is_nan() || rb.value < ex as f64 {
                violations += 1;
            }
            cells += 1;
        }
    }
    check(violations == 0, format!("{cells} cells, {violations} violations"))
}

fn c5_derivatives() -> Outcome {
    let h = FD_STEP;
    let mut worst = 0.0f64;
    let mut min_phi2 = f64::INFINITY;
    for &y in &[100u64, 1000] {
        let t = PrimeTable::new(y);
        for &s in &[0.6, 0.8, 1.0, 1.2] {
            let get = |s| phi_derivatives(s, &t).map_err(|e| e.to_string());
            let (c, p, m) = (get(s)?, get(s + h)?, get(s - h)?);
            let prev = |d: &PhiDerivatives, k: usize| if k == 0 { d.phi } else { d.d[k - 1] };
            for k in 0..3 {
                let fd = (prev(&p, k) - prev(&m, k)) / (2.0 * h);
                worst = worst.max(((fd - c.d[k]) / c.d[k]).abs());
            }
            let second = (p.phi - 2.0 * c.phi + m.phi) / (h * h);
            worst = worst.max(((second - c.d[1]) / c.d[1]).abs());
        }
        for i in 1..=200 {
            min_phi2 = min_phi2.min(get_phi2(0.01 * i as f64, &t)?);
        }
    }
    check(
        worst <= FD_REL_LOW_ORDER && min_phi2 >= 0.0,
        format!("max rel err={worst:.2e}, min phi2={min_phi2:.3e}"),
    )
}

fn get_phi2(s: f64, t: &PrimeTable) -> Result<f64, String> {
    Ok(phi_derivatives(s, t).map_err(|e| e.to_string())?.d[1])
}

fn c6_special() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..=500 {
        let u = 1.01 * (1e3f64 / 1.01).powf(i as f64 / 500.0);
        let x = xi(u).map_err(|e| e.to_string())?;
        worst = worst.max((x.exp_m1() - u * x).abs() / (u * x).max(1.0));
    }
    let r2 = (rho(2.0).map_err(|e| e.to_string())? - (1.0 - 2f64.ln())).abs();
    let r3 = (rho(3.0).map_err(|e| e.to_string())? - RHO_THREE_REF).abs();
    // Σ 2^k/(k·k!) to 30 digits
    let ei = (exp_integral(2.0).map_err(|e| e.to_string())? - 3.683_871_510_540_412).abs();
    check(
        worst <= XI_ROUND_TRIP && r2 <= RHO_TWO && r3 <= RHO_THREE && ei <= EXP_INTEGRAL,
        format!("xi residual={worst:.2e}, |rho(2)-(1-log2)|={r2:.2e}, |rho(3)-ref|={r3:.2e}, |Ei(2)-series|={ei:.2e}"),
    )
}

fn c7_saddle_form() -> Outcome {
    let ratio = |u: f64| -> Result<f64, String> {
        Ok(rho_saddle_form(u).map_err(|e| e.to_string())? / rho(u).map_err(|e| e.to_string())?)
    };
    let (r10, r20, r40) = (ratio(10.0)?, ratio(20.0)?, ratio(40.0)?);
    let d = |r: f64| (r - 1.0).abs();
    check(
        (0.9..=1.1).contains(&r10) && d(r20) < d(r10) && d(r40) < d(r20),
        format!("ratios u=10: {r10:.6}, u=20: {r20:.6}, u=40: {r40:.6}"),
    )
}

fn c8_thm1_trend() -> Outcome {
    let y = 1000u64;
    let t = PrimeTable::new(y);
    let opts = EstimatorOptions::default();
    let mut devs = Vec::new();
    let mut notes = Vec::new();
    for &u in &[8.0, 12.0, 16.0] {
        let th = Threshold::from_y_u(y, u);
        let started = Instant::now();
        let sr = solve_alpha(th.log_x, &t, &opts.saddle).map_err(|e| e.to_string())?;
        let est = thm1_main_term(&sr, &t).map_err(|e| e.to_string())?;
        let exact = th.floor().and_then(|x| exact_psi_g(x, y, Method::Recursive, &opts.exact));
        match exact {
            Ok(c) => {
                let dev = (est.ratio_to(c.value) - 1.0).abs();
                notes.push(format!("u={u}: |thm1/exact-1|={dev:.4}"));
                devs.push(dev);
            }
            Err(e) => {
                notes.push(format!("u={u}: exact unavailable after {:.0}s ({e})", started.elapsed().as_secs_f64()));
            }
        }
    }
    let ok = devs.len() == 3 && devs[1] <= devs[0] && devs[2] <= devs[1] && devs[2] <= THM1_TREND_MAX;
    check(ok, notes.join("; "))
}

fn c9_mertens() -> Outcome {
    let t = PrimeTable::new(1_000_000);
    let mut prev = f64::INFINITY;
    let mut ok = true;
    let mut detail = Vec::new();
    for &x in &[1e3, 1e4, 1e5, 1e6] {
        let r = mertens_product(&t, x).map_err(|e| e.to_string())?;
        let ratio = r.value / r.main_term;
        let dev = (ratio - 1.0).abs();
        ok &= dev <= MERTENS_C / f64::ln(x) && dev < prev;
        prev = dev;
        detail.push(format!("{x:e}: {ratio:.6}"));
    }
    check(ok, detail.join(", "))
}

fn c10_perron() -> Outcome {
    let t = PrimeTable::new(100);
    let opts = EstimatorOptions::default();
    let mut errs = Vec::new();
    for &tt in &[10.0, 25.0, 50.0] {
        errs.push(perron_verify(100.5, &t, tt, &opts).map_err(|e| e.to_string())?.rel_error);
    }
    let at50 = errs[2] <= PERRON_REL;
    let decaying = errs[1] <= errs[0] && errs[2] <= errs[1];
    check(
        at50 && decaying,
        format!(
            "rel errors T=10: {:.4}, T=25: {:.4}, T=50: {:.4}; <=5% at T=50: {at50}; nonincreasing: {decaying}",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn c11_ratio_bound() -> Outcome {
    let opts = SaddleOptions::default();
    let mut violations = 0;
    let mut cells = 0;
    let mut worst = f64::NEG_INFINITY;
    for &y in &[10u64, 100, 1000, 10_000] {
        let t = PrimeTable::new(y);
        for &u in &[1.0, 2.0, 4.0, 8.0, 16.0] {
            let sr = solve_alpha((y as f64).ln() * u, &t, &opts).map_err(|e| e.to_string())?;
            let base = log_h_real(sr.alpha, &t).map_err(|e| e.to_string())?;
            for i in 0..1000 {
                let tt = -100.0 + 200.0 * i as f64 / 999.0;
                let l = log_h(Complex64::new(sr.alpha, tt), &t).map_err(|e| e.to_string())?;
                let excess = l.re - base;
                worst = worst.max(excess);
                if excess > ROUNDING_SLACK {
                    violations += 1;
                }
            }
            cells += 1;
        }
    }
    check(
        violations == 0,
        format!("{cells} cells x 1000 t, {violations} violations, max log-excess {worst:.2e}"),
    )
}

fn c12_determinism() -> Outcome {
    let xs: Vec<Threshold> = ["1000", "12345", "1e5", "1e6", "1e7"]
        .iter()
        .map(|s| smoothcircle::estimators::parse_threshold(s).unwrap())
        .collect();
    let ys = [2u64, 10, 100, 1000];
    let run = |threads: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| {
            compare_grid(&xs, &ys, true, &EstimatorOptions::default())
                .map(|rows| write_csv(&rows))
                .map_err(|e| e.to_string())
        })
    };
    let a = run(1)?;
    let b = run(4)?;
    let c = run(4)?;
    check(
        a == b && b == c,
        format!("{} CSV bytes, 1 vs 4 threads and repeat identical: {}", a.len(), a == b && b == c),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("Gauss circle identity", c2_gauss_identity),
        ("saddle closed form and residuals", c3_saddle),
        ("Rankin inequality", c4_rankin),
        ("derivative consistency", c5_derivatives),
        ("special functions", c6_special),
        ("saddle form of rho", c7_saddle_form),
        ("main-term trend", c8_thm1_trend),
        ("Mertens product", c9_mertens),
        ("Perron verification", c10_perron),
        ("ratio bound", c11_ratio_bound),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} criterion {:>2} ({name}): {detail} [{:.1}s]",
            i + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
