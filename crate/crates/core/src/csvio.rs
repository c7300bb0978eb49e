//! Matrix CSV files: one line per matrix row, no header.
//!
//! Complex entries are written as `re+imj` (for example `0.5-0.25j`) using
//! the shortest decimal form that round-trips the `f64`. Real matrices use
//! plain decimal entries.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::state::{CMatrix, GateMatrix};
use crate::{Error, Result};

/// Formats a complex number as `re+imj`.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

/// Parses the `re+imj` form written by [`format_complex`].
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s = text.trim();
    let body = s
        .strip_suffix('j')
        .ok_or_else(|| Error::Parse(format!("complex entry {s:?} must end in 'j'")))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| {
            matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E')
        })
        .ok_or_else(|| Error::Parse(format!("complex entry {s:?} has no imaginary part")))?;
    let (re, im) = body.split_at(split);
    let re: f64 = re
        .parse()
        .map_err(|_| Error::Parse(format!("bad real part {re:?} in {s:?}")))?;
    let im: f64 = im
        .strip_prefix('+')
        .unwrap_or(im)
        .parse()
        .map_err(|_| Error::Parse(format!("bad imaginary part {im:?} in {s:?}")))?;
    Ok(Complex64::new(re, im))
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r)
}

fn read_grid<R: Read, T>(r: R, parse: impl Fn(&str) -> Result<T>) -> Result<(usize, usize, Vec<T>)> {
    let mut rdr = reader(r);
    let mut cols = None;
    let mut rows = 0;
    let mut data = Vec::new();
    for record in rdr.records() {
        let record = record?;
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {c}",
                    rows + 1,
                    record.len()
                )))
            }
            _ => {}
        }
        for field in record.iter() {
            data.push(parse(field)?);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty matrix".into()))?;
    Ok((rows, cols, data))
}

pub fn write_complex_matrix<W: Write>(w: W, m: &CMatrix) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for row in m.row_iter() {
        wtr.write_record(row.iter().map(|z| format_complex(*z)))?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_complex_matrix<R: Read>(r: R) -> Result<CMatrix> {
    let (rows, cols, data) = read_grid(r, parse_complex)?;
    Ok(CMatrix::from_row_slice(rows, cols, &data))
}

pub fn write_real_matrix<W: Write>(w: W, m: &DMatrix<f64>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for row in m.row_iter() {
        wtr.write_record(row.iter().map(|x| x.to_string()))?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_real_matrix<R: Read>(r: R) -> Result<DMatrix<f64>> {
    let (rows, cols, data) = read_grid(r, |s| {
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad real entry {s:?}")))
    })?;
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

impl GateMatrix {
    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        write_complex_matrix(&mut buf, self.entries()).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn from_csv_str(text: &str) -> Result<GateMatrix> {
        GateMatrix::new(read_complex_matrix(text.as_bytes())?)
    }
}
