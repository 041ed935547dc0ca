use std::f64::consts::PI;

use num_complex::Complex64;

use super::quant::calculus_transform;
use super::symbol::Symbol;
use crate::error::{invalid, Error, Result};
use crate::gabor::CyclicGridFunction;

fn check_pair(f1: &CyclicGridFunction, f2: &CyclicGridFunction) -> Result<usize> {
    if f1.dim() != 1 || f2.dim() != 1 {
        return Err(invalid("f", "Wigner distributions are formed from one-dimensional grids"));
    }
    if f1.len() != f2.len() {
        return Err(Error::DimensionMismatch {
            context: "Wigner pair",
            expected: f1.len(),
            found: f2.len(),
        });
    }
    Ok(f1.len())
}

/// `f₁(x) conj f̂₂(ξ) e^{-2πi xξ/N}`; its `Op₀` is `f ↦ N^{-1/2} (f, f₂) f₁`.
pub fn rihaczek(f1: &CyclicGridFunction, f2: &CyclicGridFunction) -> Result<Symbol> {
    let n = check_pair(f1, f2)?;
    let h2 = f2.fourier();
    Ok(Symbol::from_fn(n, |x, xi| {
        let phase = ((x * xi) % n) as f64 / n as f64;
        f1.values()[x] * h2.values()[xi].conj() * Complex64::from_polar(1.0, -2.0 * PI * phase)
    }))
}

/// Window `Φ(x,ξ) = φ₁(x) conj φ̂₂(ξ) e^{-2πi xξ/N}` of the phase-space Gabor system.
pub fn rihaczek_window(phi1: &CyclicGridFunction, phi2: &CyclicGridFunction) -> Result<Symbol> {
    rihaczek(phi1, phi2)
}

/// `W^t_{f₁,f₂}`, normalized so that `Op_t(W^t_{f₁,f₂}) f = N^{-1/2} (f, f₂) f₁`.
pub fn wigner_t(f1: &CyclicGridFunction, f2: &CyclicGridFunction, t: f64) -> Result<Symbol> {
    if !t.is_finite() {
        return Err(invalid("t", "quantization parameter must be finite"));
    }
    Ok(calculus_transform(&rihaczek(f1, f2)?, 0.0, t))
}

/// `(ℱ_σ a)(x,ξ) = â(-2ξ, 2x)` with the unitary two-axis DFT; needs odd `N`.
pub fn symplectic_ft(a: &Symbol) -> Result<Symbol> {
    let n = a.n();
    if n.is_multiple_of(2) {
        return Err(invalid("n", format!("index doubling is not invertible mod {n}")));
    }
    let hat = a.to_grid().fourier();
    let n64 = n as i64;
    Ok(Symbol::from_fn(n, |x, xi| {
        let eta = (-2 * xi as i64).rem_euclid(n64) as usize;
        let y = (2 * x as i64).rem_euclid(n64) as usize;
        hat.values()[eta * n + y]
    }))
}
