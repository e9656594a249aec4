use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::{Serialize, SerializeMap, Serializer};
use sha2::{Digest, Sha256};

use smoothcircle::config::{Config, OutputFormat};
use smoothcircle::estimators::{self, parse_threshold, Threshold};
use smoothcircle::report::{self, fmt_f64};
use smoothcircle::{euler, prime_sums, saddle, special, Complex64, Error, Method, PrimeTable};

#[derive(Parser)]
#[command(name = "smoothcircle", version, about = "Smooth-weighted Gauss circle sums")]
struct Cli {
    /// key=value config file; defaults to $SMOOTHCIRCLE_CONFIG
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format, overriding the config
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Point {
    /// Upper threshold x (integers and forms like 1e12 are read exactly)
    #[arg(long, conflicts_with = "u")]
    x: Option<String>,
    /// Use x = y^u
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    y: u64,
}

impl Point {
    fn threshold(&self) -> Result<Threshold, Error> {
        match (&self.x, self.u) {
            (Some(x), _) => parse_threshold(x),
            (None, Some(u)) if u >= 0.0 => Ok(Threshold::from_y_u(self.y, u)),
            (None, Some(u)) => Err(Error::Domain(format!("u = {u} must be nonnegative"))),
            (None, None) => Err(Error::Domain("one of --x or --u is required".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Sieve,
    Recursive,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Ψ_G(x, y)
    Exact {
        #[command(flatten)]
        p: Point,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Saddle point α and the inequality checks on it
    Alpha {
        #[command(flatten)]
        p: Point,
    },
    /// H(σ + it), φ and φ₁…φ₄
    Hval {
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        y: u64,
    },
    /// All estimates for one cell
    Estimate {
        #[command(flatten)]
        p: Point,
        #[arg(long)]
        with_exact: bool,
    },
    /// Estimates over a grid of x and y
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        grid_x: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        grid_y: Vec<u64>,
        #[arg(long)]
        with_exact: bool,
    },
    /// Truncated Perron integral against the exact count
    Perron {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: u64,
        #[arg(long = "T")]
        t_max: f64,
    },
    /// ξ(u) and ξ'(u)
    Xi {
        #[arg(long)]
        u: f64,
    },
    /// Dickman ρ(u) and its saddle form
    Rho {
        #[arg(long)]
        u: f64,
    },
    /// Weighted prime sums, plain and twisted
    Primesums {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Ψ_G(x + x/z, y) − Ψ_G(x, y) against x^α H(α)/z
    Diffcheck {
        #[arg(long)]
        x: u128,
        #[arg(long)]
        y: u64,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
    },
}

enum Cell {
    Int(u128),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_u128(*v),
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(v) => s.serialize_str(&v.to_string()),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Empty => s.serialize_none(),
        }
    }
}

struct Record<'a>(&'a [&'a str], &'a [Cell]);

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Output {
    Table(Table),
    Grid(Vec<estimators::ComparisonRow>),
}

fn f(v: f64) -> Cell {
    Cell::Float(v)
}

fn opt_f(v: Option<f64>) -> Cell {
    v.map(Cell::Float).unwrap_or(Cell::Empty)
}

fn table(columns: &[&'static str], rows: Vec<Vec<Cell>>) -> Output {
    Output::Table(Table { columns: columns.to_vec(), rows })
}

fn check_y(y: u64) -> Result<PrimeTable, Error> {
    if y < 2 {
        return Err(Error::Domain(format!("y = {y} must be at least 2")));
    }
    Ok(PrimeTable::new(y))
}

fn bound_text(b: &saddle::BoundCheck) -> String {
    match b {
        saddle::BoundCheck::Holds => "holds".into(),
        saddle::BoundCheck::Fails => "fails".into(),
        saddle::BoundCheck::Skipped(_) => "skipped".into(),
    }
}

fn execute(cmd: &Cmd, cfg: &Config) -> Result<Output, Error> {
    let opts = cfg.estimator_options();
    match cmd {
        Cmd::Exact { p, method } => {
            let x = p.threshold()?.floor()?;
            let c = match method {
                MethodArg::Auto => estimators::auto_exact(x, p.y, &opts.exact)?,
                MethodArg::Sieve => smoothcircle::exact_psi_g(x, p.y, Method::Sieve, &opts.exact)?,
                MethodArg::Recursive => {
                    smoothcircle::exact_psi_g(x, p.y, Method::Recursive, &opts.exact)?
                }
            };
            Ok(table(
                &["x", "y", "value", "terms", "method"],
                vec![vec![
                    Cell::Int(c.x),
                    Cell::Int(c.y as u128),
                    Cell::Int(c.value),
                    Cell::Int(c.terms as u128),
                    Cell::Text(c.method.to_string()),
                ]],
            ))
        }
        Cmd::Alpha { p } => {
            let t = check_y(p.y)?;
            let th = p.threshold()?;
            let sr = estimators::saddle(&th, &t, &opts)?;
            let b = saddle::alpha_bounds_check(&sr, cfg.y_floor);
            let approx = if sr.u >= 1.0 { Some(saddle::alpha_xi_approx(&sr)?) } else { None };
            Ok(table(
                &[
                    "x", "y", "u", "alpha", "residual", "iters", "bracket_lo", "bracket_hi",
                    "lower_bound", "upper_bound", "xi_approx", "gap",
                ],
                vec![vec![
                    Cell::Text(report::fmt_threshold(&th)),
                    Cell::Int(p.y as u128),
                    f(sr.u),
                    f(sr.alpha),
                    f(sr.residual),
                    Cell::Int(sr.iters as u128),
                    f(sr.bracket.0),
                    f(sr.bracket.1),
                    Cell::Text(bound_text(&b.lower)),
                    Cell::Text(bound_text(&b.upper)),
                    opt_f(approx.as_ref().map(|a| a.approx)),
                    opt_f(approx.as_ref().map(|a| a.gap)),
                ]],
            ))
        }
        Cmd::Hval { sigma, t, y } => {
            let tab = check_y(*y)?;
            let h = euler::h_value(Complex64::new(*sigma, *t), &tab)?;
            let d = euler::phi_derivatives(*sigma, &tab)?;
            Ok(table(
                &["sigma", "t", "y", "re", "im", "phi", "phi1", "phi2", "phi3", "phi4", "truncation_error_bound"],
                vec![vec![
                    f(*sigma),
                    f(*t),
                    Cell::Int(*y as u128),
                    f(h.re),
                    f(h.im),
                    f(d.phi),
                    f(d.d[0]),
                    f(d.d[1]),
                    f(d.d[2]),
                    f(d.d[3]),
                    f(d.truncation_error_bound),
                ]],
            ))
        }
        Cmd::Estimate { p, with_exact } => {
            check_y(p.y)?;
            let th = p.threshold()?;
            Ok(Output::Grid(estimators::compare_grid(&[th], &[p.y], *with_exact, &opts)?))
        }
        Cmd::Compare { grid_x, grid_y, with_exact } => {
            let xs = grid_x
                .iter()
                .map(|s| parse_threshold(s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output::Grid(estimators::compare_grid(&xs, grid_y, *with_exact, &opts)?))
        }
        Cmd::Perron { x, y, t_max } => {
            let tab = check_y(*y)?;
            let r = estimators::perron_verify(*x, &tab, *t_max, &opts)?;
            Ok(table(
                &["x", "y", "T", "alpha", "integral", "exact", "abs_error", "rel_error"],
                vec![vec![
                    f(r.x),
                    Cell::Int(r.y as u128),
                    f(r.t_max),
                    f(r.alpha),
                    f(r.integral),
                    Cell::Int(r.exact),
                    f(r.abs_error),
                    f(r.rel_error),
                ]],
            ))
        }
        Cmd::Xi { u } => {
            let xi = special::xi(*u)?;
            let xp = if *u > 1.0 { Some(special::xi_prime(*u)?) } else { None };
            Ok(table(&["u", "xi", "xi_prime"], vec![vec![f(*u), f(xi), opt_f(xp)]]))
        }
        Cmd::Rho { u } => {
            let (r, clamped) = special::rho_checked(*u)?;
            let sf = if *u > 1.0 { Some(special::rho_saddle_form(*u)?) } else { None };
            Ok(table(
                &["u", "rho", "saddle_form", "clamped"],
                vec![vec![f(*u), f(r), opt_f(sf), Cell::Text(clamped.to_string())]],
            ))
        }
        Cmd::Primesums { x, sigma } => {
            if !(2.0..=1e10).contains(x) {
                return Err(Error::Domain(format!("x = {x} must lie in [2, 1e10]")));
            }
            let tab = PrimeTable::new(x.floor() as u64);
            let c = smoothcircle::tolerances::PRIME_SUM_C;
            let rows = [false, true]
                .iter()
                .map(|&tw| {
                    let r = prime_sums::weighted_prime_sum(&tab, *x, *sigma, tw, c)?;
                    Ok(vec![
                        f(r.x),
                        f(*sigma),
                        Cell::Text(tw.to_string()),
                        f(r.value),
                        f(r.main_term),
                        f(r.deviation),
                    ])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(table(&["x", "sigma", "twist", "value", "main_term", "deviation"], rows))
        }
        Cmd::Diffcheck { x, y, z } => {
            let tab = check_y(*y)?;
            let r = estimators::difference_check(*x, &tab, *z, &opts)?;
            Ok(table(
                &["x", "y", "z", "z_max", "lhs", "scale", "ratio"],
                vec![vec![
                    Cell::Int(r.x),
                    Cell::Int(r.y as u128),
                    f(r.z),
                    f(r.z_max),
                    Cell::Int(r.lhs),
                    f(r.scale),
                    f(r.ratio),
                ]],
            ))
        }
    }
}

fn render(out: &Output, format: OutputFormat, header: &str) -> String {
    match (out, format) {
        (Output::Table(t), OutputFormat::Csv) => {
            let mut s = format!("{header}\n{}\n", t.columns.join(","));
            for r in &t.rows {
                s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        (Output::Grid(rows), OutputFormat::Csv) => format!("{header}\n{}", report::write_csv(rows)),
        (Output::Table(t), OutputFormat::Json) => {
            let recs: Vec<Record> = t.rows.iter().map(|r| Record(&t.columns, r)).collect();
            json_doc(header, &recs)
        }
        (Output::Grid(rows), OutputFormat::Json) => {
            let recs: Vec<report::JsonRow> = rows.iter().map(report::JsonRow::from).collect();
            json_doc(header, &recs)
        }
    }
}

fn json_doc<T: Serialize>(header: &str, rows: &T) -> String {
    #[derive(serde::Serialize)]
    struct Doc<'a, T> {
        header: &'a str,
        rows: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Doc { header, rows }).expect("document serializes");
    s.push('\n');
    s
}

fn load_config(cli: &Cli) -> Result<Config, Error> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("SMOOTHCIRCLE_CONFIG").map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => Config::load(&p)?,
        None => Config::default(),
    };
    if let Some(fm) = cli.format {
        cfg.output_format = match fm {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    if e.is_resource() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("smoothcircle: {e}");
            return ExitCode::from(1);
        }
    };
    let hash = format!("{:x}", Sha256::digest(cfg.canonical().as_bytes()));
    let header = format!("# smoothcircle {} config={}", env!("CARGO_PKG_VERSION"), &hash[..16]);
    match execute(&cli.cmd, &cfg) {
        Ok(out) => {
            if let Output::Grid(rows) = &out {
                for r in rows {
                    for e in &r.errors {
                        eprintln!("smoothcircle: x={} y={}: {e}", report::fmt_threshold(&r.x), r.y);
                    }
                }
            }
            print!("{}", render(&out, cfg.output_format, &header));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("smoothcircle: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
