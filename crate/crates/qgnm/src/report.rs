//! Report rows and their CSV, JSON-lines and plain-table renderings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "instance_id",
    "group_order",
    "subgroup_order",
    "is_member",
    "epsilon",
    "k",
    "step1_pass",
    "accept",
    "bound",
    "optimal",
];

/// One verification run. `bound` is present for member instances and
/// `optimal` when the top eigenvalue of the acceptance operator was computed.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub instance_id: String,
    pub group_order: usize,
    pub subgroup_order: usize,
    pub is_member: bool,
    pub epsilon: f64,
    pub k: u32,
    pub step1_pass: f64,
    pub accept: f64,
    pub bound: Option<f64>,
    pub optimal: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format `{other}` (csv, json, table)")),
        }
    }
}

/// `printf("%.12g")`.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The value a 12-significant-digit rendering denotes, so JSON numbers agree
/// with the CSV text.
fn rounded(x: f64) -> f64 {
    format_g12(x).parse().unwrap_or(x)
}

#[derive(Serialize)]
struct JsonRow<'a> {
    instance_id: &'a str,
    group_order: usize,
    subgroup_order: usize,
    is_member: bool,
    epsilon: f64,
    k: u32,
    step1_pass: f64,
    accept: f64,
    bound: Option<f64>,
    optimal: Option<f64>,
}

impl ReportRow {
    fn cells(&self) -> [String; 10] {
        let opt = |v: Option<f64>| v.map(format_g12).unwrap_or_default();
        [
            self.instance_id.clone(),
            self.group_order.to_string(),
            self.subgroup_order.to_string(),
            self.is_member.to_string(),
            format_g12(self.epsilon),
            self.k.to_string(),
            format_g12(self.step1_pass),
            format_g12(self.accept),
            opt(self.bound),
            opt(self.optimal),
        ]
    }

    fn json(&self) -> JsonRow<'_> {
        JsonRow {
            instance_id: &self.instance_id,
            group_order: self.group_order,
            subgroup_order: self.subgroup_order,
            is_member: self.is_member,
            epsilon: rounded(self.epsilon),
            k: self.k,
            step1_pass: rounded(self.step1_pass),
            accept: rounded(self.accept),
            bound: self.bound.map(rounded),
            optimal: self.optimal.map(rounded),
        }
    }
}

pub fn render(rows: &[ReportRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let out = |e: csv::Error| Error::Output(e.to_string());
            w.write_record(CSV_HEADER).map_err(out)?;
            for r in rows {
                w.write_record(r.cells()).map_err(out)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Output(e.to_string()))
        }
        Format::Json => {
            let mut s = String::new();
            for r in rows {
                s.push_str(
                    &serde_json::to_string(&r.json()).map_err(|e| Error::Output(e.to_string()))?,
                );
                s.push('\n');
            }
            Ok(s)
        }
        Format::Table => {
            let cells: Vec<[String; 10]> = rows.iter().map(|r| r.cells()).collect();
            let mut widths = CSV_HEADER.map(str::len);
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let mut s = String::new();
            let mut line = |fields: &mut dyn Iterator<Item = &str>| {
                let parts: Vec<String> = fields
                    .zip(widths)
                    .map(|(f, w)| format!("{f:<w$}"))
                    .collect();
                let _ = writeln!(s, "{}", parts.join("  ").trim_end());
            };
            line(&mut CSV_HEADER.iter().copied());
            for row in &cells {
                line(&mut row.iter().map(String::as_str));
            }
            Ok(s)
        }
    }
}
