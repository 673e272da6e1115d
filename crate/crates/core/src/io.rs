//! Coefficient files.
//!
//! CSV files have a header `n,re,im` and one row per index starting at 1.
//! Lines beginning with `#` are comments; writers use them to echo the
//! configuration as `# key=value`.

use std::io::{BufRead, BufReader, Read, Write};

use serde::Deserialize;

use crate::series::DirichletPoly;
use crate::{Complex64, Error, PrimeMap, Result};

#[derive(Deserialize)]
struct Row {
    n: u64,
    re: f64,
    #[serde(default)]
    im: f64,
}

fn strip_comments<R: Read>(reader: R) -> Result<String> {
    let mut body = String::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        if !line.trim_start().starts_with('#') && !line.trim().is_empty() {
            body.push_str(&line);
            body.push('\n');
        }
    }
    Ok(body)
}

fn read_rows<R: Read>(reader: R) -> Result<Vec<Row>> {
    let body = strip_comments(reader)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for r in rdr.deserialize() {
        let row: Row = r?;
        if !row.re.is_finite() || !row.im.is_finite() {
            return Err(Error::Parse(format!("non-finite coefficient at n = {}", row.n)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads `n,re,im` rows; `n` must run 1, 2, 3, … without gaps.
pub fn read_coefficients<R: Read>(reader: R) -> Result<DirichletPoly> {
    let rows = read_rows(reader)?;
    let mut coeffs = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.n != i as u64 + 1 {
            return Err(Error::Parse(format!("expected n = {}, found {}", i + 1, row.n)));
        }
        coeffs.push(Complex64::new(row.re, row.im));
    }
    DirichletPoly::new(coeffs)
}

/// Reads `n,re,im` rows where every `n` is prime.
pub fn read_prime_values<R: Read>(reader: R) -> Result<PrimeMap> {
    let mut map = PrimeMap::new();
    for row in read_rows(reader)? {
        if !crate::numtheory::is_prime_u64(row.n) {
            return Err(Error::Parse(format!("{} is not prime", row.n)));
        }
        if map.insert(row.n, Complex64::new(row.re, row.im)).is_some() {
            return Err(Error::Parse(format!("prime {} listed twice", row.n)));
        }
    }
    Ok(map)
}

fn write_header<W: Write>(out: &mut W, config: &[(String, String)]) -> Result<()> {
    for (k, v) in config {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn write_rows<'a, W: Write>(
    mut out: W,
    config: &[(String, String)],
    rows: impl Iterator<Item = (u64, &'a Complex64)>,
) -> Result<()> {
    write_header(&mut out, config)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "re", "im"])?;
    for (n, v) in rows {
        // Adding +0 turns -0 into 0.
        w.write_record([n.to_string(), (v.re + 0.0).to_string(), (v.im + 0.0).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients<W: Write>(out: W, a: &DirichletPoly, config: &[(String, String)]) -> Result<()> {
    write_rows(out, config, a.coeffs().iter().enumerate().map(|(i, v)| (i as u64 + 1, v)))
}

pub fn write_prime_values<W: Write>(out: W, values: &PrimeMap, config: &[(String, String)]) -> Result<()> {
    write_rows(out, config, values.iter().map(|(&p, v)| (p, v)))
}

/// Generic CSV table with a header row and config comments.
pub fn write_table<W: Write>(mut out: W, header: &[&str], rows: &[Vec<String>], config: &[(String, String)]) -> Result<()> {
    write_header(&mut out, config)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
