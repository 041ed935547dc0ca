//! Growth probe for the Schatten embedding beyond its range.
//!
//! The symbol `a = Σ_{m<M} c(m) φ(X) e^{2πi⟨X,κ_m⟩/N}` modulates one Gaussian
//! atom by lattice frequencies `κ_m`, ordered by size. With `c ∈ ℓ^q ∖ ℓ^r` the
//! `ℐ_r` norm of `Op^w(a)` keeps growing with `M` while the `M^{p,q}` norm of the
//! symbol stays bounded.

use num_complex::Complex64;
use serde::Serialize;

use crate::codec::fmt_f64;
use crate::error::{invalid, Result};
use crate::gabor::{centered, Sampling};
use crate::mixed_norms::lp_norm;
use crate::psido::{op_t, symbol_modulation_norm, symbol_window, Symbol};
use crate::schatten::{schatten_norm, singular_values_dense};
use crate::weights_lattices::{Exponent, Weight};

/// Spacing of the modulation lattice on `ℤ_N × ℤ_N`.
pub const PROBE_STEP: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub terms: usize,
    pub coeff_q: f64,
    pub coeff_r: f64,
    pub symbol_norm: f64,
    pub schatten_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTable {
    pub n: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    /// Coefficients `⟨m⟩^{-2/r}`, which lie in `ℓ^r`.
    pub control: bool,
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("terms,coeff_q,coeff_r,symbol_norm,schatten_r\n");
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{}\n",
                r.terms,
                fmt_f64(r.coeff_q),
                fmt_f64(r.coeff_r),
                fmt_f64(r.symbol_norm),
                fmt_f64(r.schatten_r)
            );
        }
        s
    }
}

/// Lattice frequencies `κ ∈ (PROBE_STEP ℤ_N)²` by increasing `|κ|`, ties broken lexicographically.
fn frequencies(n: usize) -> Vec<(i64, i64)> {
    let ks: Vec<i64> = (0..n).step_by(PROBE_STEP).map(|k| centered(k, n)).collect();
    let mut out: Vec<(i64, i64)> = ks.iter().flat_map(|&a| ks.iter().map(move |&b| (a, b))).collect();
    out.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
    out
}

fn coefficient(m: usize, q: Exponent, r: Exponent, control: bool) -> f64 {
    let bracket = (1.0 + (m * m) as f64).sqrt();
    if control {
        bracket.powf(-2.0 * r.recip())
    } else {
        bracket.powf(-q.recip()) * (1.0 + bracket.ln()).powf(-2.0 * q.recip())
    }
}

/// Tabulates `‖Op^w(a_M)‖_{ℐ_r}` and `‖a_M‖_{M^{p,q}}` for each truncation size `M`.
pub fn sharpness_probe(p: Exponent, q: Exponent, r: Exponent, sizes: &[usize], n: usize, control: bool) -> Result<ProbeTable> {
    if q.recip() >= r.recip() {
        return Err(invalid("q", "the probe needs q > r"));
    }
    if n == 0 || !n.is_multiple_of(PROBE_STEP) {
        return Err(invalid("n", format!("must be a positive multiple of {PROBE_STEP}")));
    }
    let freqs = frequencies(n);
    if let Some(&m) = sizes.iter().find(|&&m| m == 0 || m > freqs.len()) {
        return Err(invalid("sizes", format!("{m} is outside 1..={}", freqs.len())));
    }
    let atom = Symbol::from_grid(&symbol_window(n)?)?;
    let sampling = Sampling::continuum(n);
    let mut rows = Vec::with_capacity(sizes.len());
    for &terms in sizes {
        let c: Vec<f64> = (0..terms).map(|m| coefficient(m, q, r, control)).collect();
        let a = Symbol::from_fn(n, |x, xi| {
            let base = atom.values()[x * n + xi];
            let sum: Complex64 = freqs[..terms]
                .iter()
                .zip(&c)
                .map(|(&(k1, k2), &cm)| {
                    let phase = 2.0 * std::f64::consts::PI * ((x as i64 * k1 + xi as i64 * k2).rem_euclid(n as i64)) as f64
                        / n as f64;
                    Complex64::from_polar(cm, phase)
                })
                .sum();
            base * sum
        });
        let sv = singular_values_dense(&op_t(&a, 0.5)?.entries)?;
        rows.push(ProbeRow {
            terms,
            coeff_q: lp_norm(&c, q, 1.0),
            coeff_r: lp_norm(&c, r, 1.0),
            symbol_norm: symbol_modulation_norm(&a, p, q, &Weight::unit(), sampling)?,
            schatten_r: schatten_norm(&sv, r),
        });
    }
    Ok(ProbeTable {
        n,
        p,
        q,
        r,
        control,
        rows,
    })
}
