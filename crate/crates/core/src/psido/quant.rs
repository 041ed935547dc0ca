use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::symbol::Symbol;
use crate::error::{invalid, Error, Result};
use crate::gabor::fft::fft_nd;
use crate::gabor::{centered, CyclicGridFunction};
use crate::matrix_bank::LatticeMatrix;
use crate::weights_lattices::Lattice;

/// Kohn–Nirenberg quantization: kernel `K(x,y) = N^{-1} Σ_ξ a(x,ξ) e^{2πi (x-y)ξ/N}`.
pub fn op0(a: &Symbol) -> LatticeMatrix {
    let n = a.n();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut g = a.values()[x * n..(x + 1) * n].to_vec();
            fft_nd(&mut g, &[n], true);
            let inv = 1.0 / n as f64;
            (0..n).map(|y| g[(x + n - y) % n] * inv).collect()
        })
        .collect();
    let m = DMatrix::from_fn(n, n, |x, y| rows[x][y]);
    LatticeMatrix::new(Lattice::counting(&[n]).expect("positive size"), m).expect("square kernel")
}

/// `e^{i(t₁-t₂)⟨D_x, D_ξ⟩} a`, as a phase on the two-axis DFT of `a`.
///
/// Dual indices are taken as centered representatives, so the map is exact
/// and the group law holds for every `N`.
pub fn calculus_transform(a: &Symbol, t1: f64, t2: f64) -> Symbol {
    let s = t1 - t2;
    if s == 0.0 {
        return a.clone();
    }
    let n = a.n();
    let mut buf = a.values().to_vec();
    fft_nd(&mut buf, &[n, n], false);
    let inv = 1.0 / (n * n) as f64;
    let r: Vec<f64> = (0..n).map(|k| centered(k, n) as f64).collect();
    for (i, v) in buf.iter_mut().enumerate() {
        let theta = 2.0 * PI * s * r[i / n] * r[i % n] / n as f64;
        *v *= Complex64::from_polar(inv, theta);
    }
    fft_nd(&mut buf, &[n, n], true);
    Symbol::new(n, buf).expect("same size")
}

/// `Op_t(a) = Op₀(e^{it⟨D_x, D_ξ⟩} a)`.
pub fn op_t(a: &Symbol, t: f64) -> Result<LatticeMatrix> {
    if !t.is_finite() {
        return Err(invalid("t", "quantization parameter must be finite"));
    }
    Ok(op0(&calculus_transform(a, t, 0.0)))
}

/// Applies an operator matrix on `ℤ_N` to a grid function.
pub fn apply_operator(m: &LatticeMatrix, f: &CyclicGridFunction) -> Result<CyclicGridFunction> {
    if f.dim() != 1 || f.len() != m.n() {
        return Err(Error::DimensionMismatch {
            context: "operator and function",
            expected: m.n(),
            found: f.len(),
        });
    }
    let v = &m.entries * DVector::from_column_slice(f.values());
    CyclicGridFunction::new(v.as_slice().to_vec())
}
