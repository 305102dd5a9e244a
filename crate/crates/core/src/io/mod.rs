//! Sweep serialization (CSV, JSON), run-config files and SVG plots.

pub mod config;
pub mod svg;

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sweep::{SweepConfig, SweepOutput, SweepRecord};

pub const CSV_HEADER: &str =
    "theta_deg,T_deg,N_A,N_B,N_C,Sl_A,Sl_B,Sl_C,purity_A,purity_B,purity_C,norm_error,leakage";

/// Formats with 12 significant digits, `%.12g` style: fixed notation for
/// decimal exponents in `[-5, 12)`, scientific otherwise, trailing zeros
/// dropped.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let row: Vec<String> = r.values().iter().map(|&v| format_float(v)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Parses a CSV written by [`write_csv`]; the header must match exactly.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != SweepRecord::FIELDS {
        return Err(Error::Schema(format!(
            "expected header '{CSV_HEADER}', found '{}'",
            header.join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let mut vals = [0.0; 13];
        for (k, field) in row.iter().enumerate() {
            vals[k] = field.trim().parse().map_err(|_| {
                Error::Schema(format!(
                    "row {}: field {} is not a number: '{field}'",
                    line + 1,
                    SweepRecord::FIELDS[k]
                ))
            })?;
        }
        out.push(SweepRecord::from_values(vals));
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    config: &'a SweepConfig,
    effective_d: [usize; 3],
    notes: &'a [String],
    records: &'a [SweepRecord],
}

pub fn write_json<W: Write>(mut w: W, config: &SweepConfig, output: &SweepOutput) -> Result<()> {
    let doc = JsonDocument {
        config,
        effective_d: output.effective_d,
        notes: &output.notes,
        records: &output.records,
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
