use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::LatticeMatrix;
use crate::codec::{fmt_f64, parse_f64, put_complex, Reader};
use crate::error::{Error, Result};
use crate::weights_lattices::Lattice;

const MAGIC: &[u8; 4] = b"LMAT";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

/// CSV text: an optional `# lattice theta=… lo=… hi=…` line, then one line
/// per row holding `re,im` pairs. Without the lattice line the matrix lives on
/// the counting lattice `{0..n-1}`.
pub fn write_matrix_csv(a: &LatticeMatrix) -> String {
    let l = &a.lattice;
    let join = |v: Vec<String>| v.join(",");
    let mut s = format!(
        "# lattice theta={} lo={} hi={}\n",
        join(l.theta().iter().map(|&t| fmt_f64(t)).collect()),
        join(l.lo().iter().map(|v| v.to_string()).collect()),
        join(l.hi().iter().map(|v| v.to_string()).collect()),
    );
    for j in 0..a.n() {
        let row: Vec<String> = (0..a.n())
            .map(|k| {
                let v = a.entries[(j, k)];
                format!("{},{}", fmt_f64(v.re), fmt_f64(v.im))
            })
            .collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| f(x.trim()).ok_or_else(|| Error::Parse(format!("bad lattice field `{s}`"))))
        .collect()
}

fn parse_lattice_line(line: &str) -> Result<Lattice> {
    let mut theta = None;
    let mut lo = None;
    let mut hi = None;
    for tok in line.split_whitespace() {
        if let Some(v) = tok.strip_prefix("theta=") {
            theta = Some(parse_list(v, |x| x.parse::<f64>().ok())?);
        } else if let Some(v) = tok.strip_prefix("lo=") {
            lo = Some(parse_list(v, |x| x.parse::<i64>().ok())?);
        } else if let Some(v) = tok.strip_prefix("hi=") {
            hi = Some(parse_list(v, |x| x.parse::<i64>().ok())?);
        }
    }
    match (theta, lo, hi) {
        (Some(t), Some(l), Some(h)) => Lattice::new(t, l, h),
        _ => Err(Error::Parse("lattice line needs theta=, lo= and hi=".into())),
    }
}

pub fn read_matrix_csv(text: &str) -> Result<LatticeMatrix> {
    let mut lattice = None;
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(l) = rest.trim().strip_prefix("lattice") {
                lattice = Some(parse_lattice_line(l)?);
            }
            continue;
        }
        let nums = line
            .split(',')
            .map(|s| parse_f64(s, i + 1))
            .collect::<Result<Vec<f64>>>()?;
        if nums.len() % 2 != 0 {
            return Err(Error::Parse(format!("line {}: odd number of fields", i + 1)));
        }
        rows.push(nums.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("matrix file has no rows".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Parse(format!(
            "row {} has {} entries, expected {n}",
            bad + 1,
            rows[bad].len()
        )));
    }
    let lattice = match lattice {
        Some(l) => l,
        None => Lattice::counting(&[n])?,
    };
    LatticeMatrix::new(lattice, DMatrix::from_fn(n, n, |j, k| rows[j][k]))
}

/// Binary layout (little endian): `LMAT`, version `u32`, dimension `u32`,
/// per axis `theta: f64, lo: i64, hi: i64`, then row-major `(re, im)` pairs.
pub fn write_matrix_binary(a: &LatticeMatrix) -> Vec<u8> {
    let l = &a.lattice;
    let mut out = Vec::with_capacity(16 + 16 * a.n() * a.n());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(l.dim() as u32).to_le_bytes());
    for ax in 0..l.dim() {
        out.extend_from_slice(&l.theta()[ax].to_le_bytes());
        out.extend_from_slice(&l.lo()[ax].to_le_bytes());
        out.extend_from_slice(&l.hi()[ax].to_le_bytes());
    }
    for j in 0..a.n() {
        for k in 0..a.n() {
            put_complex(&mut out, a.entries[(j, k)]);
        }
    }
    out
}

pub fn read_matrix_binary(buf: &[u8]) -> Result<LatticeMatrix> {
    let mut r = Reader::new(buf);
    r.expect_magic(MAGIC, VERSION)?;
    let d = r.u32()? as usize;
    let (mut theta, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..d {
        theta.push(r.f64()?);
        lo.push(r.i64()?);
        hi.push(r.i64()?);
    }
    let lattice = Lattice::new(theta, lo, hi)?;
    let n = lattice.len();
    let mut vals = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        vals.push(r.complex()?);
    }
    r.finish()?;
    LatticeMatrix::new(lattice, DMatrix::from_row_slice(n, n, &vals))
}

pub fn write_matrix(path: &Path, a: &LatticeMatrix, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Csv => std::fs::write(path, write_matrix_csv(a))?,
        MatrixFormat::Binary => std::fs::write(path, write_matrix_binary(a))?,
    }
    Ok(())
}

/// Reads either format, detected from the leading magic bytes.
pub fn read_matrix(path: &Path) -> Result<LatticeMatrix> {
    let buf = std::fs::read(path)?;
    if buf.starts_with(MAGIC) {
        read_matrix_binary(&buf)
    } else {
        let text = String::from_utf8(buf).map_err(|_| Error::Parse("matrix CSV is not UTF-8".into()))?;
        read_matrix_csv(&text)
    }
}
