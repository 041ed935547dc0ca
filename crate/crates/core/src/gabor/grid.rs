use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::dft_unitary;
use crate::codec::{fmt_f64, parse_f64, put_complex, Reader};
use crate::error::{invalid, Error, Result};

/// Centered representative of `k mod n` in `[-⌊n/2⌋, n-1-⌊n/2⌋]`.
pub fn centered(k: usize, n: usize) -> i64 {
    let k = (k % n) as i64;
    let n = n as i64;
    if k >= n - n / 2 {
        k - n
    } else {
        k
    }
}

/// Spacing `√(2π/N)` that turns grid indices into continuum coordinates,
/// chosen so that `⟨x, ξ⟩ = 2π xξ/N`.
pub fn grid_spacing(n: usize) -> f64 {
    (2.0 * PI / n as f64).sqrt()
}

/// Complex samples on the cyclic group `ℤ_{N_1} × … × ℤ_{N_d}`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicGridFunction {
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl CyclicGridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        CyclicGridFunction::with_shape(vec![n], values)
    }

    pub fn with_shape(shape: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(invalid("shape", format!("{shape:?} must be nonempty with positive sizes")));
        }
        let total: usize = shape.iter().product();
        if values.len() != total {
            return Err(Error::DimensionMismatch {
                context: "grid values",
                expected: total,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "grid values must be finite"));
        }
        Ok(CyclicGridFunction { shape, values })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let total = shape.iter().product();
        CyclicGridFunction {
            shape,
            values: vec![Complex64::new(0.0, 0.0); total],
        }
    }

    pub fn from_fn(shape: Vec<usize>, f: impl Fn(&[usize]) -> Complex64) -> Self {
        let total: usize = shape.iter().product();
        let mut idx = vec![0usize; shape.len()];
        let mut values = Vec::with_capacity(total);
        for flat in 0..total {
            unflatten(flat, &shape, &mut idx);
            values.push(f(&idx));
        }
        CyclicGridFunction { shape, values }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at an arbitrary integer index, reduced mod the shape.
    pub fn at(&self, idx: &[i64]) -> Complex64 {
        let mut flat = 0usize;
        for (ax, &i) in idx.iter().enumerate() {
            let n = self.shape[ax] as i64;
            flat = flat * self.shape[ax] + i.rem_euclid(n) as usize;
        }
        self.values[flat]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &CyclicGridFunction) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CyclicGridFunction {
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &CyclicGridFunction) -> Result<Self> {
        self.check_same(other)?;
        Ok(CyclicGridFunction {
            shape: self.shape.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CyclicGridFunction) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(Complex64::new(1.0 / n, 0.0))
        }
    }

    pub(crate) fn check_same(&self, other: &CyclicGridFunction) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                context: "grid shapes",
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    /// Unitary DFT with kernel `e^{-2πi x·ξ/N}`.
    pub fn fourier(&self) -> Self {
        let mut v = self.values.clone();
        dft_unitary(&mut v, &self.shape, false);
        CyclicGridFunction { shape: self.shape.clone(), values: v }
    }

    pub fn inverse_fourier(&self) -> Self {
        let mut v = self.values.clone();
        dft_unitary(&mut v, &self.shape, true);
        CyclicGridFunction { shape: self.shape.clone(), values: v }
    }

    /// `x ↦ f(-x)`.
    pub fn reflect(&self) -> Self {
        let shape = self.shape.clone();
        CyclicGridFunction::from_fn(shape, |i| {
            let neg: Vec<i64> = i.iter().map(|&v| -(v as i64)).collect();
            self.at(&neg)
        })
    }

    /// `π(J, I) f(x) = e^{2πi I·x/N} f(x - J)`.
    pub fn time_frequency_shift(&self, shift: &[i64], modulation: &[i64]) -> Self {
        let shape = self.shape.clone();
        CyclicGridFunction::from_fn(shape.clone(), |x| {
            let src: Vec<i64> = x.iter().zip(shift).map(|(&a, &b)| a as i64 - b).collect();
            let phase: f64 = x
                .iter()
                .zip(modulation)
                .zip(&shape)
                .map(|((&a, &m), &n)| (a as i64 * m).rem_euclid(n as i64) as f64 / n as f64)
                .sum();
            self.at(&src) * Complex64::from_polar(1.0, 2.0 * PI * phase)
        })
    }
}

pub(crate) fn unflatten(mut flat: usize, shape: &[usize], out: &mut [usize]) {
    for ax in (0..shape.len()).rev() {
        out[ax] = flat % shape[ax];
        flat /= shape[ax];
    }
}

/// Window families available from the CLI and config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowSpec {
    /// Periodized `e^{-x²/(2w²)}` in continuum units.
    Gaussian { width: f64 },
    /// Hann bump supported on `length` samples centered at 0.
    Hann { length: usize },
    Delta,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec::Gaussian { width: 1.0 }
    }
}

impl WindowSpec {
    /// Unit-norm window on `ℤ_N`.
    pub fn build(&self, n: usize) -> Result<CyclicGridFunction> {
        Ok(match self {
            WindowSpec::Gaussian { width } => gaussian(n, *width)?,
            WindowSpec::Hann { length } => hann(n, *length)?,
            WindowSpec::Delta => delta(n),
        }
        .normalized())
    }
}

/// Periodized Gaussian atom `e^{-(x-c)²/(2w²)} e^{iνx}` in continuum coordinates `x = Δ·k`.
pub fn gaussian_atom(n: usize, center: f64, freq: f64, width: f64) -> Result<CyclicGridFunction> {
    if !(width.is_finite() && width > 0.0) {
        return Err(invalid("width", "Gaussian width must be positive"));
    }
    let h = grid_spacing(n);
    let period = n as f64 * h;
    let images = (6.0 * width / period).ceil() as i64 + 1;
    let v = (0..n)
        .map(|k| {
            let x = centered(k, n) as f64 * h;
            let mut s = Complex64::new(0.0, 0.0);
            for m in -images..=images {
                let y = x + m as f64 * period - center;
                s += Complex64::from_polar((-y * y / (2.0 * width * width)).exp(), freq * (x + m as f64 * period));
            }
            s
        })
        .collect();
    CyclicGridFunction::new(v)
}

/// Periodized Gaussian centered at 0; width 1 is a fixed point of the DFT.
pub fn gaussian(n: usize, width: f64) -> Result<CyclicGridFunction> {
    gaussian_atom(n, 0.0, 0.0, width)
}

pub fn hann(n: usize, length: usize) -> Result<CyclicGridFunction> {
    if length < 2 || length > n {
        return Err(invalid("length", format!("Hann length must be in 2..={n}")));
    }
    let half = length as f64 / 2.0;
    let v = (0..n)
        .map(|k| {
            let x = centered(k, n) as f64;
            if x.abs() < half {
                Complex64::new(0.5 * (1.0 + (PI * x / half).cos()), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    CyclicGridFunction::new(v)
}

pub fn delta(n: usize) -> CyclicGridFunction {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[0] = Complex64::new(1.0, 0.0);
    CyclicGridFunction { shape: vec![n], values: v }
}

/// Tensor product `f₁(x₁) ⋯ f_d(x_d)` of one-dimensional functions.
pub fn tensor(factors: &[&CyclicGridFunction]) -> Result<CyclicGridFunction> {
    let mut shape = Vec::new();
    for f in factors {
        if f.dim() != 1 {
            return Err(invalid("factors", "tensor factors must be one-dimensional"));
        }
        shape.push(f.len());
    }
    Ok(CyclicGridFunction::from_fn(shape, |i| {
        factors.iter().zip(i).map(|(f, &k)| f.values[k]).product()
    }))
}

const MAGIC: &[u8; 4] = b"GRID";
const VERSION: u32 = 1;

/// CSV with a `# shape …` line followed by `index,re,im` rows (flat row-major index).
pub fn write_grid_csv(f: &CyclicGridFunction) -> String {
    let dims: Vec<String> = f.shape.iter().map(|n| n.to_string()).collect();
    let mut s = format!("# shape {}\nindex,re,im\n", dims.join(","));
    for (i, v) in f.values.iter().enumerate() {
        s.push_str(&format!("{i},{},{}\n", fmt_f64(v.re), fmt_f64(v.im)));
    }
    s
}

pub fn read_grid_csv(text: &str) -> Result<CyclicGridFunction> {
    let mut shape: Option<Vec<usize>> = None;
    let mut rows: Vec<(usize, Complex64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("index") {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(dims) = rest.trim().strip_prefix("shape") {
                let parsed = dims
                    .trim()
                    .split(',')
                    .map(|d| d.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad shape `{dims}`"))))
                    .collect::<Result<Vec<usize>>>()?;
                shape = Some(parsed);
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected index,re,im", i + 1)));
        }
        let idx = cols[0]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("line {}: bad index", i + 1)))?;
        rows.push((idx, Complex64::new(parse_f64(cols[1], i + 1)?, parse_f64(cols[2], i + 1)?)));
    }
    let shape = shape.unwrap_or_else(|| vec![rows.len()]);
    let total: usize = shape.iter().product();
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    let mut seen = vec![false; total];
    for (idx, v) in rows {
        if idx >= total || seen[idx] {
            return Err(Error::Parse(format!("index {idx} is out of range or repeated")));
        }
        seen[idx] = true;
        values[idx] = v;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse("grid file is missing samples".into()));
    }
    CyclicGridFunction::with_shape(shape, values)
}

/// Binary layout (little endian): `GRID`, version `u32`, dimension `u32`,
/// sizes as `u64`, then `(re, im)` pairs.
pub fn write_grid_binary(f: &CyclicGridFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * f.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(f.dim() as u32).to_le_bytes());
    for &n in &f.shape {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for v in &f.values {
        put_complex(&mut out, *v);
    }
    out
}

pub fn read_grid_binary(buf: &[u8]) -> Result<CyclicGridFunction> {
    let mut r = Reader::new(buf);
    r.expect_magic(MAGIC, VERSION)?;
    let d = r.u32()? as usize;
    let shape = (0..d).map(|_| r.u64().map(|v| v as usize)).collect::<Result<Vec<usize>>>()?;
    let total: usize = shape.iter().product();
    let values = (0..total).map(|_| r.complex()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    CyclicGridFunction::with_shape(shape, values)
}

pub fn read_grid(path: &Path) -> Result<CyclicGridFunction> {
    let buf = std::fs::read(path)?;
    if buf.starts_with(MAGIC) {
        read_grid_binary(&buf)
    } else {
        read_grid_csv(&String::from_utf8(buf).map_err(|_| Error::Parse("grid CSV is not UTF-8".into()))?)
    }
}

pub fn write_grid(path: &Path, f: &CyclicGridFunction, binary: bool) -> Result<()> {
    if binary {
        std::fs::write(path, write_grid_binary(f))?;
    } else {
        std::fs::write(path, write_grid_csv(f))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_reps() {
        assert_eq!((0..5).map(|k| centered(k, 5)).collect::<Vec<_>>(), vec![0, 1, 2, -2, -1]);
        assert_eq!((0..4).map(|k| centered(k, 4)).collect::<Vec<_>>(), vec![0, 1, -2, -1]);
    }

    #[test]
    fn gaussian_is_fourier_fixed_point() {
        for n in [63, 64, 128] {
            let g = gaussian(n, 1.0).unwrap();
            let d = g.fourier().sub(&g).unwrap().norm() / g.norm();
            assert!(d < 1e-12, "n={n} deviation {d}");
        }
    }

    #[test]
    fn unitary_dft() {
        let f = CyclicGridFunction::from_fn(vec![6, 5], |i| Complex64::new(i[0] as f64, (i[1] * i[0]) as f64 - 1.0));
        assert!((f.fourier().norm() - f.norm()).abs() < 1e-12 * f.norm());
        assert!(f.fourier().inverse_fourier().sub(&f).unwrap().norm() < 1e-12 * f.norm());
    }

    #[test]
    fn grid_roundtrips() {
        let f = CyclicGridFunction::from_fn(vec![3, 4], |i| Complex64::new(i[0] as f64 / 7.0, -(i[1] as f64) * 1e-310));
        assert_eq!(read_grid_csv(&write_grid_csv(&f)).unwrap(), f);
        assert_eq!(read_grid_binary(&write_grid_binary(&f)).unwrap(), f);
        assert!(read_grid_csv("0,1,0\n0,1,0\n").is_err());
    }

    #[test]
    fn window_specs() {
        for spec in [WindowSpec::Gaussian { width: 0.7 }, WindowSpec::Hann { length: 9 }, WindowSpec::Delta] {
            let w = spec.build(32).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-14);
        }
        assert!(WindowSpec::Hann { length: 64 }.build(32).is_err());
    }
}
