use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fft::fft_nd;
use super::grid::{centered, grid_spacing, unflatten, CyclicGridFunction};
use super::system::{analysis, GaborSystem};
use crate::error::{invalid, Error, Result};
use crate::mixed_norms::{mixed_norm_abs, mixed_seq_norm, SequenceArray};
use crate::weights_lattices::{Exponent, Lattice, MixedExponent, Weight};

/// Full short-time Fourier transform `V_φ f(m, n)` on `ℤ_N × ℤ_N`, row-major in `(m, n)`.
pub fn stft(f: &CyclicGridFunction, window: &CyclicGridFunction) -> Result<Vec<Complex64>> {
    if f.dim() != 1 {
        return Err(invalid("f", "the full STFT is provided for one-dimensional grids"));
    }
    let sys = GaborSystem::new(window.clone(), 1, 1)?;
    super::system::analysis_with(&sys, f, window)
}

/// How phase space is sampled for a modulation norm.
///
/// Samples sit at centered indices that are multiples of `stride`; weights see
/// the coordinate `index · unit`, and every axis carries the Riemann step `stride · unit`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sampling {
    pub stride: usize,
    pub unit: f64,
}

impl Sampling {
    /// Every grid point, unit spacing, counting measure.
    pub fn counting() -> Self {
        Sampling { stride: 1, unit: 1.0 }
    }

    /// Continuum units `Δ = √(2π/N)` with the largest power-of-two stride `s` such that `sΔ <= 1`.
    ///
    /// Keeps the effective sample spacing roughly independent of `N`, so
    /// ratios of norms are comparable across grid sizes.
    pub fn continuum(n: usize) -> Self {
        let h = grid_spacing(n);
        let mut s = 1usize;
        while (2 * s) as f64 * h <= 1.0 {
            s *= 2;
        }
        Sampling { stride: s, unit: h }
    }

    /// Rescales `g` to unit `L²` norm in these units, `unit^d Σ|g|² = 1`.
    ///
    /// Reference windows for sampled modulation norms are taken in this
    /// normalization so norms of sampled continuum functions do not drift with `N`.
    pub fn normalize(&self, g: &CyclicGridFunction) -> CyclicGridFunction {
        g.normalized().scale(Complex64::new(self.unit.powf(-(g.dim() as f64) / 2.0), 0.0))
    }

    fn axis(&self, n: usize) -> Vec<(usize, i64)> {
        let mut v: Vec<(usize, i64)> = (0..n)
            .map(|k| (k, centered(k, n)))
            .filter(|(_, c)| c.rem_euclid(self.stride as i64) == 0)
            .collect();
        v.sort_by_key(|&(_, c)| c);
        v
    }
}

/// Sampled `|V_φ f|·ω` on phase space with axes `(x_1…x_d, ξ_1…ξ_d)`.
fn sampled_stft_abs(
    f: &CyclicGridFunction,
    window: &CyclicGridFunction,
    w: &Weight,
    sampling: Sampling,
) -> Result<(Vec<f64>, Vec<usize>)> {
    f.check_same(window)?;
    if sampling.stride == 0 || !(sampling.unit > 0.0) {
        return Err(invalid("sampling", "stride and unit must be positive"));
    }
    let shape = f.shape().to_vec();
    let d = shape.len();
    let total: usize = shape.iter().product();
    let axes: Vec<Vec<(usize, i64)>> = shape.iter().map(|&n| sampling.axis(n)).collect();
    let counts: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let nx: usize = counts.iter().product();
    let scale = 1.0 / (total as f64).sqrt();
    let unit = w.is_unit();
    let rows: Vec<Result<Vec<f64>>> = (0..nx)
        .into_par_iter()
        .map(|xi| {
            let mut xs = vec![0usize; d];
            unflatten(xi, &counts, &mut xs);
            let grid_x: Vec<i64> = (0..d).map(|ax| axes[ax][xs[ax]].0 as i64).collect();
            let coord_x: Vec<f64> = (0..d).map(|ax| axes[ax][xs[ax]].1 as f64 * sampling.unit).collect();
            let mut buf = vec![Complex64::new(0.0, 0.0); total];
            let mut y = vec![0usize; d];
            let mut src = vec![0i64; d];
            for (flat, b) in buf.iter_mut().enumerate() {
                unflatten(flat, &shape, &mut y);
                for ax in 0..d {
                    src[ax] = y[ax] as i64 - grid_x[ax];
                }
                *b = f.values()[flat] * window.at(&src).conj();
            }
            fft_nd(&mut buf, &shape, false);
            let mut out = Vec::with_capacity(nx);
            let mut zs = vec![0usize; d];
            let mut point = coord_x.clone();
            point.resize(2 * d, 0.0);
            for zi in 0..nx {
                unflatten(zi, &counts, &mut zs);
                let flat = (0..d).fold(0, |acc, ax| acc * shape[ax] + axes[ax][zs[ax]].0);
                let v = (buf[flat] * scale).norm();
                if unit {
                    out.push(v);
                } else {
                    for ax in 0..d {
                        point[d + ax] = axes[ax][zs[ax]].1 as f64 * sampling.unit;
                    }
                    out.push(v * w.eval(&point)?);
                }
            }
            Ok(out)
        })
        .collect();
    let mut data = Vec::with_capacity(nx * nx);
    for r in rows {
        data.extend(r?);
    }
    let mut full_shape = counts.clone();
    full_shape.extend(counts);
    Ok((data, full_shape))
}

/// `‖V_φ f · ω‖_{L^𝒑}` on the sampled phase-space grid.
pub fn modulation_norm_sampled(
    f: &CyclicGridFunction,
    p: &MixedExponent,
    w: &Weight,
    window: &CyclicGridFunction,
    sampling: Sampling,
) -> Result<f64> {
    if p.dim() != 2 * f.dim() {
        return Err(Error::DimensionMismatch {
            context: "modulation exponent",
            expected: 2 * f.dim(),
            found: p.dim(),
        });
    }
    let (data, shape) = sampled_stft_abs(f, window, w, sampling)?;
    let step = sampling.stride as f64 * sampling.unit;
    mixed_norm_abs(&data, &shape, p, &vec![step; shape.len()])
}

/// Modulation norm with counting measure over the full STFT.
pub fn modulation_norm(f: &CyclicGridFunction, p: &MixedExponent, w: &Weight, window: &CyclicGridFunction) -> Result<f64> {
    modulation_norm_sampled(f, p, w, window, Sampling::counting())
}

/// Lattice samples `V_φ f(a⊙j, b⊙ι)` as a sequence on a centered lattice with spacing `(a, b)`.
pub fn lattice_coefficients(sys: &GaborSystem, f: &CyclicGridFunction) -> Result<SequenceArray> {
    let coeffs = analysis(sys, f)?;
    let cshape = sys.coefficient_shape();
    let theta: Vec<f64> = sys.time_steps().iter().chain(sys.freq_steps()).map(|&s| s as f64).collect();
    let lattice = Lattice::centered(theta, &cshape)?;
    let values = (0..lattice.len())
        .map(|i| {
            let m = lattice.multi_index(i);
            let flat = m
                .iter()
                .zip(&cshape)
                .fold(0usize, |acc, (&v, &n)| acc * n + v.rem_euclid(n as i64) as usize);
            coeffs[flat]
        })
        .collect();
    SequenceArray::new(lattice, values)
}

/// `‖V_φ f‖_{ℓ^𝒑_{(ω)}}` over the lattice of the system.
pub fn modulation_norm_lattice(sys: &GaborSystem, f: &CyclicGridFunction, p: &MixedExponent, w: &Weight) -> Result<f64> {
    mixed_seq_norm(&lattice_coefficients(sys, f)?, p, w)
}

/// Spread of a family of ratios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalConstant {
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl EmpiricalConstant {
    pub fn new(ratios: Vec<f64>) -> Self {
        let finite: Vec<f64> = ratios.iter().copied().filter(|r| *r > 0.0 && r.is_finite()).collect();
        let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(0.0, f64::max);
        EmpiricalConstant { ratios, min, max }
    }

    /// `max / min` over the positive ratios.
    pub fn spread(&self) -> f64 {
        if self.min.is_finite() && self.min > 0.0 {
            self.max / self.min
        } else {
            f64::INFINITY
        }
    }
}

/// Grid-to-lattice ratios `‖f‖_{M^𝒑} / ‖V_φ f‖_{ℓ^𝒑(Λ²)}` over a family, both with counting measure.
pub fn modulation_equivalence(
    sys: &GaborSystem,
    family: &[CyclicGridFunction],
    p: &MixedExponent,
    w: &Weight,
) -> Result<EmpiricalConstant> {
    let ratios = family
        .iter()
        .map(|f| {
            let g = modulation_norm(f, p, w, sys.window())?;
            let l = modulation_norm_lattice(sys, f, p, w)?;
            Ok(if l == 0.0 { 0.0 } else { g / l })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EmpiricalConstant::new(ratios))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowBoundReport {
    /// `‖V_φ f‖_{L^p_{(ω)}}`.
    pub lhs: f64,
    /// `‖f‖_{M^p_{(ω₁)}} ‖φ‖_{M^p_{(ω₂)}}` with the reference window.
    pub rhs: f64,
    pub ratio: f64,
}

/// Compares the STFT with window `φ` against modulation norms of `f` and `φ` taken with a fixed reference window.
#[allow(clippy::too_many_arguments)]
pub fn check_stft_window_bound(
    f: &CyclicGridFunction,
    phi: &CyclicGridFunction,
    p: Exponent,
    w: &Weight,
    w1: &Weight,
    w2: &Weight,
    reference: &CyclicGridFunction,
    sampling: Sampling,
) -> Result<WindowBoundReport> {
    if p.recip() < 0.5 {
        return Err(invalid("p", format!("the window bound is stated for p <= 2, got {p}")));
    }
    let e = MixedExponent::uniform(p, 2 * f.dim())?;
    let lhs = modulation_norm_sampled(f, &e, w, phi, sampling)?;
    let rhs = modulation_norm_sampled(f, &e, w1, reference, sampling)? * modulation_norm_sampled(phi, &e, w2, reference, sampling)?;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(WindowBoundReport { lhs, rhs, ratio })
}
