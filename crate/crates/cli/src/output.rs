//! Rendering of command results as CSV or JSON.

use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// `%.17g`-style rendering: 17 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-5, 1e17)`.
pub fn full(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Three-decimal echo used for diffing against printed tables.
pub fn echo3(x: f64) -> String {
    format!("{x:.3}")
}

/// A header plus rows of already-formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// A command result that renders in either format.
pub trait Render {
    fn table(&self) -> Table;
    fn json(&self) -> Result<serde_json::Value, CliError>;
}

pub fn to_json_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

pub fn render<R: Render + ?Sized>(r: &R, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => r.table().to_csv_string(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&r.json()?)?;
            s.push('\n');
            Ok(s)
        }
    }
}
