//! Number formatting and the CSV, JSON and OBJ writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use helicoid_core::helicoid::Mesh;
use serde_json::{Number, Value};

use crate::error::CliError;

/// A double with 17 significant digits, which round-trips exactly.
pub fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// A JSON number with 17 significant digits; non-finite values become null.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&fmt(v)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn nums(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}

/// Write to the file at `path`, or to stdout.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::invalid("io", format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub struct Csv {
    out: csv::Writer<Box<dyn Write>>,
}

impl Csv {
    pub fn new(path: Option<&Path>, header: &[&str]) -> Result<Csv, CliError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink(path)?);
        out.write_record(header).map_err(csv_err)?;
        Ok(Csv { out })
    }

    pub fn row(&mut self, fields: &[f64]) -> Result<(), CliError> {
        self.out.write_record(fields.iter().map(|&v| fmt(v))).map_err(csv_err)
    }

    /// A row of numbers followed by text fields.
    pub fn row_with(&mut self, fields: &[f64], text: &[&str]) -> Result<(), CliError> {
        let rec: Vec<String> = fields
            .iter()
            .map(|&v| fmt(v))
            .chain(text.iter().map(|s| s.to_string()))
            .collect();
        self.out.write_record(&rec).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e.into(),
        other => CliError::invalid("io", format!("{other:?}")),
    }
}

pub fn write_json(path: Option<&Path>, v: &Value) -> Result<(), CliError> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| CliError::invalid("io", e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Wavefront OBJ with `v`, `vn` and 1-based `f v//vn` records.
pub fn write_obj(path: Option<&Path>, mesh: &Mesh) -> Result<(), CliError> {
    let mut w = sink(path)?;
    writeln!(w, "# helicoid mesh {} x {}", mesh.rows, mesh.cols)?;
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", fmt(v[0]), fmt(v[1]), fmt(v[2]))?;
    }
    for n in &mesh.normals {
        writeln!(w, "vn {} {} {}", fmt(n[0]), fmt(n[1]), fmt(n[2]))?;
    }
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|i| i + 1);
        writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
    }
    w.flush()?;
    Ok(())
}
