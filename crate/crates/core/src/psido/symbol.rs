use std::path::Path;

use num_complex::Complex64;

use crate::codec::{fmt_f64, parse_f64, put_complex, Reader};
use crate::error::{invalid, Error, Result};
use crate::gabor::CyclicGridFunction;

const MAGIC: &[u8; 4] = b"SYMB";
const VERSION: u32 = 1;

/// A symbol `a(x, ξ)` on `ℤ_N × ℤ_N`, stored row-major in `(x, ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    n: usize,
    values: Vec<Complex64>,
}

impl Symbol {
    pub fn new(n: usize, values: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "grid size must be positive"));
        }
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                context: "symbol samples",
                expected: n * n,
                found: values.len(),
            });
        }
        Ok(Symbol { n, values })
    }

    pub fn zeros(n: usize) -> Self {
        Symbol::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Symbol { n, values: vec![c; n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Symbol { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Sample at `(x mod N, ξ mod N)`.
    pub fn at(&self, x: i64, xi: i64) -> Complex64 {
        let n = self.n as i64;
        self.values[(x.rem_euclid(n) * n + xi.rem_euclid(n)) as usize]
    }

    /// `ℓ²` norm with counting measure.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Symbol {
            n: self.n,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Symbol) -> Result<Self> {
        self.check_same(other)?;
        Ok(Symbol {
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Symbol) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest pointwise deviation.
    pub fn max_abs_diff(&self, other: &Symbol) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub(crate) fn check_same(&self, other: &Symbol) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                context: "symbol grid size",
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// View as a two-axis grid function.
    pub fn to_grid(&self) -> CyclicGridFunction {
        CyclicGridFunction::with_shape(vec![self.n, self.n], self.values.clone()).expect("square shape")
    }

    pub fn from_grid(g: &CyclicGridFunction) -> Result<Self> {
        match g.shape() {
            [a, b] if a == b => Symbol::new(*a, g.values().to_vec()),
            _ => Err(invalid("grid", "a symbol needs a square two-axis grid")),
        }
    }
}

/// CSV with a `# symbol n=…` line followed by `x,xi,re,im` rows.
pub fn write_symbol_csv(a: &Symbol) -> String {
    let mut s = format!("# symbol n={}\nx,xi,re,im\n", a.n);
    for (i, v) in a.values.iter().enumerate() {
        s.push_str(&format!("{},{},{},{}\n", i / a.n, i % a.n, fmt_f64(v.re), fmt_f64(v.im)));
    }
    s
}

pub fn read_symbol_csv(text: &str) -> Result<Symbol> {
    let mut n: Option<usize> = None;
    let mut rows: Vec<(usize, usize, Complex64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("x,") {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("symbol n=") {
                n = Some(v.trim().parse().map_err(|_| Error::Parse(format!("bad symbol size `{v}`")))?);
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected x,xi,re,im", i + 1)));
        }
        let idx = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {}: bad index `{}`", i + 1, s.trim())))
        };
        rows.push((
            idx(cols[0])?,
            idx(cols[1])?,
            Complex64::new(parse_f64(cols[2], i + 1)?, parse_f64(cols[3], i + 1)?),
        ));
    }
    let n = n.ok_or_else(|| Error::Parse("missing `# symbol n=` header".into()))?;
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    let mut seen = vec![false; n * n];
    for (x, xi, v) in rows {
        if x >= n || xi >= n || seen[x * n + xi] {
            return Err(Error::Parse(format!("sample ({x},{xi}) is out of range or repeated")));
        }
        seen[x * n + xi] = true;
        values[x * n + xi] = v;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse("symbol file is missing samples".into()));
    }
    Symbol::new(n, values)
}

/// Binary layout (little endian): `SYMB`, version `u32`, `N` as `u64`, then `(re, im)` pairs.
pub fn write_symbol_binary(a: &Symbol) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * a.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(a.n as u64).to_le_bytes());
    for v in &a.values {
        put_complex(&mut out, *v);
    }
    out
}

pub fn read_symbol_binary(buf: &[u8]) -> Result<Symbol> {
    let mut r = Reader::new(buf);
    r.expect_magic(MAGIC, VERSION)?;
    let n = r.u64()? as usize;
    let values = (0..n * n).map(|_| r.complex()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Symbol::new(n, values)
}

pub fn read_symbol(path: &Path) -> Result<Symbol> {
    let buf = std::fs::read(path)?;
    if buf.starts_with(MAGIC) {
        read_symbol_binary(&buf)
    } else {
        read_symbol_csv(&String::from_utf8(buf).map_err(|_| Error::Parse("symbol CSV is not UTF-8".into()))?)
    }
}

pub fn write_symbol(path: &Path, a: &Symbol, binary: bool) -> Result<()> {
    if binary {
        std::fs::write(path, write_symbol_binary(a))?;
    } else {
        std::fs::write(path, write_symbol_csv(a))?;
    }
    Ok(())
}
