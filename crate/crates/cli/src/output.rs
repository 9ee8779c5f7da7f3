//! CSV and JSON writers.
//!
//! CSV floats carry 17 significant digits; JSON floats use the shortest
//! representation that parses back to the same `f64`. `+inf` is the string
//! `inf` in CSV and `{"inf": true}` in JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use adiabatic_core::sweep::SweepTable;
use adiabatic_core::{FidelityTrace, FieldParams};
use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const TRACE_SCHEMA: &str = "adiabatic-probe/trace/1";
pub const SWEEP_SCHEMA: &str = "adiabatic-probe/sweep/1";
pub const CONDITIONS_SCHEMA: &str = "adiabatic-probe/conditions/1";

pub const SWEEP_HEADER: [&str; 5] = ["k", "r", "quantity", "value", "resonant"];
pub const TRACE_HEADER: [&str; 2] = ["t", "fidelity"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn csv_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn json_float(x: f64) -> Result<Value> {
    if x.is_finite() {
        Ok(Value::from(x))
    } else if x == f64::INFINITY {
        Ok(json!({ "inf": true }))
    } else {
        bail!("cannot serialize non-finite value {x}")
    }
}

/// Opens `path`, or stdout when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn params_json(p: &FieldParams) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("omega0".into(), Value::from(p.omega0()));
    m.insert("omega1".into(), Value::from(p.omega1()));
    m.insert("omega_prime".into(), Value::from(p.omega_prime()));
    m.insert("k".into(), Value::from(p.k()));
    m.insert("r".into(), Value::from(p.r()));
    m
}

/// One top-level object `{schema, params, provenance, rows}`.
pub fn write_record(
    w: &mut dyn Write,
    schema: &str,
    params: Map<String, Value>,
    provenance: Value,
    rows: Vec<Value>,
) -> Result<()> {
    let doc = json!({
        "schema": schema,
        "params": params,
        "provenance": provenance,
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_trace(
    w: &mut dyn Write,
    format: Format,
    trace: &FidelityTrace,
    mut params: Map<String, Value>,
    provenance: Value,
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv_writer(w);
            out.write_record(TRACE_HEADER)?;
            for (t, f) in trace.iter() {
                out.write_record([csv_float(t), csv_float(f)])?;
            }
            out.flush()?;
        }
        Format::Json => {
            params.insert("samples".into(), Value::from(trace.len()));
            let rows = trace
                .iter()
                .map(|(t, f)| Ok(json!({ "t": json_float(t)?, "fidelity": json_float(f)? })))
                .collect::<Result<Vec<_>>>()?;
            write_record(w, TRACE_SCHEMA, params, provenance, rows)?;
        }
    }
    Ok(())
}

/// Rows in table order. `k_values`/`r_values` declare the grid dimensions.
pub fn write_table(
    w: &mut dyn Write,
    format: Format,
    table: &SweepTable,
    k_values: &[f64],
    r_values: &[f64],
    quantities: &[String],
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv_writer(w);
            out.write_record(SWEEP_HEADER)?;
            for row in &table.rows {
                out.write_record([
                    csv_float(row.k),
                    csv_float(row.r),
                    row.quantity.name().to_string(),
                    csv_float(row.value),
                    row.resonant.to_string(),
                ])?;
            }
            out.flush()?;
        }
        Format::Json => {
            let mut params = Map::new();
            params.insert("omega1".into(), Value::from(table.omega1));
            params.insert("k_values".into(), Value::from(k_values.to_vec()));
            params.insert("r_values".into(), Value::from(r_values.to_vec()));
            params.insert("quantities".into(), Value::from(quantities.to_vec()));
            let rows = table
                .rows
                .iter()
                .map(|row| {
                    Ok(json!({
                        "k": row.k,
                        "r": row.r,
                        "quantity": row.quantity.name(),
                        "value": json_float(row.value)?,
                        "resonant": row.resonant,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            write_record(w, SWEEP_SCHEMA, params, json!({ "method": "closed-form" }), rows)?;
        }
    }
    Ok(())
}
