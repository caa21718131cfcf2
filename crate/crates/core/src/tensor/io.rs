//! Plain-text tensor and factor-matrix files.
//!
//! Tensor files:
//!
//! ```text
//! order 3
//! 2 2 1
//! real
//! 1
//! 2
//! 3
//! 4
//! ```
//!
//! Line 1 is `order N`, line 2 the N extents, line 3 the field tag (`real` or
//! `complex`), followed by one entry per line in column-major order. Complex
//! entries are written `re im`.
//!
//! Factor files start with a `rows cols field` header followed by one line per
//! matrix row; complex rows interleave `re im` pairs.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{AnyTensor, DenseTensor};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::Mat;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self {
            inner: r.lines(),
            number: 0,
        }
    }

    /// Next non-blank line, trimmed.
    fn next_line(&mut self) -> Result<Option<String>> {
        for line in self.inner.by_ref() {
            self.number += 1;
            let line = line?;
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                return Ok(Some(trimmed.to_string()));
            }
        }
        Ok(None)
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| parse_err(self.number + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a number")))
}

fn parse_entry(line: &str, field: Field, number: usize) -> Result<Complex64> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match (field, toks.as_slice()) {
        (Field::Real, [re]) => Ok(Complex64::new(parse_f64(re, number)?, 0.0)),
        (Field::Complex, [re, im]) => Ok(Complex64::new(
            parse_f64(re, number)?,
            parse_f64(im, number)?,
        )),
        _ => Err(parse_err(
            number,
            format!("expected one {field} entry, found `{line}`"),
        )),
    }
}

/// Reads a tensor in the text format.
pub fn read_tensor<R: BufRead>(reader: R) -> Result<AnyTensor> {
    let mut lines = Lines::new(reader);

    let header = lines.expect_line("`order N`")?;
    let order = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["order", n] => n
            .parse::<usize>()
            .map_err(|_| parse_err(lines.number, format!("bad order `{n}`")))?,
        _ => return Err(parse_err(lines.number, "expected `order N`")),
    };

    let extents_line = lines.expect_line("the extents")?;
    let shape = extents_line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| parse_err(lines.number, format!("bad extent `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if shape.len() != order {
        return Err(parse_err(
            lines.number,
            format!("order {order} but {} extents", shape.len()),
        ));
    }

    let field: Field = lines
        .expect_line("the field tag")?
        .parse()
        .map_err(|e: String| parse_err(lines.number, e))?;

    let len: usize = shape.iter().product();
    let mut entries = Vec::with_capacity(len);
    while let Some(line) = lines.next_line()? {
        if entries.len() == len {
            return Err(parse_err(lines.number, "more entries than the shape allows"));
        }
        entries.push(parse_entry(&line, field, lines.number)?);
    }
    if entries.len() != len {
        return Err(parse_err(
            lines.number,
            format!("expected {len} entries, found {}", entries.len()),
        ));
    }

    Ok(match field {
        Field::Real => AnyTensor::Real(DenseTensor::new(
            shape,
            entries.into_iter().map(|z| z.re).collect(),
        )?),
        Field::Complex => AnyTensor::Complex(DenseTensor::new(shape, entries)?),
    })
}

fn write_entry<W: Write, T: Scalar>(w: &mut W, x: T) -> std::io::Result<()> {
    let z = x.to_c64();
    match T::FIELD {
        Field::Real => write!(w, "{:e}", z.re),
        Field::Complex => write!(w, "{:e} {:e}", z.re, z.im),
    }
}

/// Writes a tensor in the text format. Values round-trip exactly.
pub fn write_tensor<W: Write, T: Scalar>(mut w: W, t: &DenseTensor<T>) -> Result<()> {
    writeln!(w, "order {}", t.order())?;
    let extents: Vec<String> = t.shape().iter().map(|e| e.to_string()).collect();
    writeln!(w, "{}", extents.join(" "))?;
    writeln!(w, "{}", T::FIELD)?;
    for &x in t.data() {
        write_entry(&mut w, x)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_any_tensor<W: Write>(w: W, t: &AnyTensor) -> Result<()> {
    match t {
        AnyTensor::Real(t) => write_tensor(w, t),
        AnyTensor::Complex(t) => write_tensor(w, t),
    }
}

/// Writes a factor matrix: header `rows cols field`, then one row per line.
pub fn write_matrix<W: Write, T: Scalar>(mut w: W, m: &Mat<T>) -> Result<()> {
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), T::FIELD)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                write!(w, " ")?;
            }
            write_entry(&mut w, m[(i, j)])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads a factor matrix written by [`write_matrix`], promoted to complex.
pub fn read_matrix<R: BufRead>(reader: R) -> Result<(Mat<Complex64>, Field)> {
    let mut lines = Lines::new(reader);
    let header = lines.expect_line("`rows cols field`")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [rows, cols, field] = toks.as_slice() else {
        return Err(parse_err(lines.number, "expected `rows cols field`"));
    };
    let rows: usize = rows
        .parse()
        .map_err(|_| parse_err(lines.number, "bad row count"))?;
    let cols: usize = cols
        .parse()
        .map_err(|_| parse_err(lines.number, "bad column count"))?;
    let field: Field = field.parse().map_err(|e: String| parse_err(lines.number, e))?;
    let per = if field == Field::Complex { 2 } else { 1 };
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        let line = lines.expect_line("a matrix row")?;
        let vals = line
            .split_whitespace()
            .map(|t| parse_f64(t, lines.number))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != per * cols {
            return Err(parse_err(lines.number, "wrong number of entries in row"));
        }
        for j in 0..cols {
            m[(i, j)] = if per == 2 {
                Complex64::new(vals[2 * j], vals[2 * j + 1])
            } else {
                Complex64::new(vals[j], 0.0)
            };
        }
    }
    Ok((m, field))
}
