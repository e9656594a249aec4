//! CSV and JSON rendering of comparison rows.

use serde::Serialize;

use crate::estimators::{ComparisonRow, Estimate, Threshold};

pub const CSV_HEADER: &str =
    "x,y,u,alpha,residual,exact,thm1,thm2,goswami,rankin,ratio_thm1,ratio_thm2,ratio_goswami,flags";

/// 17 significant digits, scientific.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Scientific notation from a natural log, for values past the float range.
pub fn fmt_from_log(log_value: f64) -> String {
    let l10 = log_value / std::f64::consts::LN_10;
    let mut exp = l10.floor();
    let mut mant = 10f64.powf(l10 - exp);
    // digits lost to the size of the exponent are not printed
    let err = l10.abs().max(1.0) * f64::EPSILON * 20.0;
    let prec = (-err.log10()).floor().clamp(1.0, 16.0) as usize;
    if format!("{mant:.prec$}").starts_with("10") {
        mant /= 10.0;
        exp += 1.0;
    }
    format!("{mant:.prec$}e{}", exp as i64)
}

pub fn fmt_estimate(e: &Estimate) -> String {
    if e.overflowed() {
        fmt_from_log(e.log_value)
    } else {
        fmt_f64(e.value)
    }
}

pub fn fmt_threshold(t: &Threshold) -> String {
    match t.int {
        Some(v) => v.to_string(),
        None if t.log_x.exp().is_finite() => fmt_f64(t.log_x.exp()),
        None => fmt_from_log(t.log_x),
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn flags_string(row: &ComparisonRow) -> String {
    row.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(";")
}

pub fn csv_row(row: &ComparisonRow) -> String {
    [
        fmt_threshold(&row.x),
        row.y.to_string(),
        fmt_f64(row.u),
        opt(row.alpha, fmt_f64),
        opt(row.residual, fmt_f64),
        opt(row.exact, |v| v.to_string()),
        opt(row.thm1, |e| fmt_estimate(&e)),
        opt(row.thm2, |e| fmt_estimate(&e)),
        opt(row.goswami, |e| fmt_estimate(&e)),
        opt(row.rankin, |e| fmt_estimate(&e)),
        opt(row.ratio_thm1, fmt_f64),
        opt(row.ratio_thm2, fmt_f64),
        opt(row.ratio_goswami, fmt_f64),
        flags_string(row),
    ]
    .join(",")
}

pub fn write_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

/// A number, or its scientific string when it does not fit a float.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum JsonNum {
    Int(u128),
    Float(f64),
    Text(String),
}

fn jnum_estimate(e: Estimate) -> JsonNum {
    if e.overflowed() {
        JsonNum::Text(fmt_from_log(e.log_value))
    } else {
        JsonNum::Float(e.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonRow {
    pub x: JsonNum,
    pub y: u64,
    pub u: f64,
    pub alpha: Option<f64>,
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<u128>,
    pub thm1: Option<JsonNum>,
    pub thm2: Option<JsonNum>,
    pub goswami: Option<JsonNum>,
    pub rankin: Option<JsonNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_thm1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_thm2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_goswami: Option<f64>,
    pub flags: String,
}

impl From<&ComparisonRow> for JsonRow {
    fn from(r: &ComparisonRow) -> Self {
        let x = match r.x.int {
            Some(v) => JsonNum::Int(v),
            None if r.x.log_x.exp().is_finite() => JsonNum::Float(r.x.log_x.exp()),
            None => JsonNum::Text(fmt_from_log(r.x.log_x)),
        };
        JsonRow {
            x,
            y: r.y,
            u: r.u,
            alpha: r.alpha,
            residual: r.residual,
            exact: r.exact,
            thm1: r.thm1.map(jnum_estimate),
            thm2: r.thm2.map(jnum_estimate),
            goswami: r.goswami.map(jnum_estimate),
            rankin: r.rankin.map(jnum_estimate),
            ratio_thm1: r.ratio_thm1,
            ratio_thm2: r.ratio_thm2,
            ratio_goswami: r.ratio_goswami,
            flags: flags_string(r),
        }
    }
}

pub fn write_json(rows: &[ComparisonRow]) -> String {
    let rows: Vec<JsonRow> = rows.iter().map(JsonRow::from).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}
