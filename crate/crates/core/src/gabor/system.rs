use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fft::fft_nd;
use super::grid::{unflatten, CyclicGridFunction};
use crate::error::{invalid, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest admissible ratio of extreme frame-operator eigenvalues.
pub const FRAME_FLOOR: f64 = 1e-10;

/// Gabor system on `ℤ_{N_1} × … × ℤ_{N_d}` with translations in `∏ a_iℤ` and
/// modulations in `∏ b_iℤ`.
///
/// Coefficient arrays are row-major with shape `[N_1/a_1, …, N_d/a_d, N_1/b_1, …, N_d/b_d]`.
#[derive(Clone, Debug)]
pub struct GaborSystem {
    shape: Vec<usize>,
    time_steps: Vec<usize>,
    freq_steps: Vec<usize>,
    window: CyclicGridFunction,
    dual: Option<CyclicGridFunction>,
}

impl GaborSystem {
    /// One-dimensional system with time step `a` and frequency step `b`.
    pub fn new(window: CyclicGridFunction, a: usize, b: usize) -> Result<Self> {
        GaborSystem::with_steps(window, vec![a], vec![b])
    }

    pub fn with_steps(window: CyclicGridFunction, time_steps: Vec<usize>, freq_steps: Vec<usize>) -> Result<Self> {
        let shape = window.shape().to_vec();
        for (name, steps) in [("time_steps", &time_steps), ("freq_steps", &freq_steps)] {
            if steps.len() != shape.len() {
                return Err(Error::DimensionMismatch {
                    context: "lattice steps",
                    expected: shape.len(),
                    found: steps.len(),
                });
            }
            for (s, n) in steps.iter().zip(&shape) {
                if *s == 0 || n % s != 0 {
                    return Err(invalid(name, format!("step {s} must divide {n}")));
                }
            }
        }
        Ok(GaborSystem {
            shape,
            time_steps,
            freq_steps,
            window,
            dual: None,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn time_steps(&self) -> &[usize] {
        &self.time_steps
    }

    pub fn freq_steps(&self) -> &[usize] {
        &self.freq_steps
    }

    pub fn window(&self) -> &CyclicGridFunction {
        &self.window
    }

    pub fn dual(&self) -> Option<&CyclicGridFunction> {
        self.dual.as_ref()
    }

    pub fn translation_counts(&self) -> Vec<usize> {
        self.shape.iter().zip(&self.time_steps).map(|(n, a)| n / a).collect()
    }

    pub fn modulation_counts(&self) -> Vec<usize> {
        self.shape.iter().zip(&self.freq_steps).map(|(n, b)| n / b).collect()
    }

    pub fn coefficient_shape(&self) -> Vec<usize> {
        let mut s = self.translation_counts();
        s.extend(self.modulation_counts());
        s
    }

    pub fn coefficient_len(&self) -> usize {
        self.coefficient_shape().iter().product()
    }

    /// `∏ a_i b_i < ∏ N_i`.
    pub fn is_oversampled(&self) -> bool {
        let ab: usize = self.time_steps.iter().zip(&self.freq_steps).map(|(a, b)| a * b).product();
        ab < self.shape.iter().product()
    }

    /// Computes the canonical dual window by the direct block solve and stores it.
    pub fn with_canonical_dual(mut self) -> Result<Self> {
        let d = canonical_dual(&self)?;
        self.dual = Some(d);
        Ok(self)
    }

    /// Stores a dual window computed elsewhere.
    pub fn set_dual(&mut self, dual: CyclicGridFunction) -> Result<()> {
        self.window.check_same(&dual)?;
        if !self.is_oversampled() {
            return Err(invalid("steps", "a dual window needs an oversampled lattice"));
        }
        self.dual = Some(dual);
        Ok(())
    }

    fn total(&self) -> usize {
        self.shape.iter().product()
    }

    fn norm_factor(&self) -> f64 {
        1.0 / (self.total() as f64).sqrt()
    }
}

/// Coefficients `V_g f(a⊙j, b⊙ι)` on the lattice.
pub fn analysis_with(sys: &GaborSystem, f: &CyclicGridFunction, g: &CyclicGridFunction) -> Result<Vec<Complex64>> {
    sys.window.check_same(f)?;
    sys.window.check_same(g)?;
    let shape = &sys.shape;
    let d = shape.len();
    let total = sys.total();
    let tcounts = sys.translation_counts();
    let mcounts = sys.modulation_counts();
    let nt: usize = tcounts.iter().product();
    let nm: usize = mcounts.iter().product();
    let scale = sys.norm_factor();
    // Flat grid index of each sampled modulation `b⊙ι`.
    let mod_index: Vec<usize> = (0..nm)
        .map(|m| {
            let mut idx = vec![0; d];
            unflatten(m, &mcounts, &mut idx);
            idx.iter()
                .enumerate()
                .fold(0, |acc, (ax, &i)| acc * shape[ax] + i * sys.freq_steps[ax])
        })
        .collect();
    let blocks: Vec<Vec<Complex64>> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let mut j = vec![0usize; d];
            unflatten(t, &tcounts, &mut j);
            let shift: Vec<i64> = j.iter().zip(&sys.time_steps).map(|(&j, &a)| (j * a) as i64).collect();
            let mut buf = shifted_product(f, g, &shift, total);
            fft_nd(&mut buf, shape, false);
            mod_index.iter().map(|&m| buf[m] * scale).collect()
        })
        .collect();
    Ok(blocks.concat())
}

/// `y ↦ f(y) conj(g(y - shift))`.
fn shifted_product(f: &CyclicGridFunction, g: &CyclicGridFunction, shift: &[i64], total: usize) -> Vec<Complex64> {
    let shape = f.shape();
    let mut y = vec![0usize; shape.len()];
    let mut src = vec![0i64; shape.len()];
    (0..total)
        .map(|flat| {
            unflatten(flat, shape, &mut y);
            for ax in 0..shape.len() {
                src[ax] = y[ax] as i64 - shift[ax];
            }
            f.values()[flat] * g.at(&src).conj()
        })
        .collect()
}

/// Analysis with the system window.
pub fn analysis(sys: &GaborSystem, f: &CyclicGridFunction) -> Result<Vec<Complex64>> {
    analysis_with(sys, f, &sys.window)
}

/// `Σ c(j,ι) e^{2πi (b⊙ι)·x/N} h(x - a⊙j)`.
pub fn synthesis_with(sys: &GaborSystem, c: &[Complex64], h: &CyclicGridFunction) -> Result<CyclicGridFunction> {
    sys.window.check_same(h)?;
    if c.len() != sys.coefficient_len() {
        return Err(Error::DimensionMismatch {
            context: "coefficient array",
            expected: sys.coefficient_len(),
            found: c.len(),
        });
    }
    let shape = &sys.shape;
    let d = shape.len();
    let total = sys.total();
    let tcounts = sys.translation_counts();
    let mcounts = sys.modulation_counts();
    let nt: usize = tcounts.iter().product();
    let nm: usize = mcounts.iter().product();
    let mod_index: Vec<usize> = (0..nm)
        .map(|m| {
            let mut idx = vec![0; d];
            unflatten(m, &mcounts, &mut idx);
            idx.iter()
                .enumerate()
                .fold(0, |acc, (ax, &i)| acc * shape[ax] + i * sys.freq_steps[ax])
        })
        .collect();
    let parts: Vec<Vec<Complex64>> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let coeffs = &c[t * nm..(t + 1) * nm];
            if coeffs.iter().all(|v| *v == ZERO) {
                return vec![ZERO; total];
            }
            let mut buf = vec![ZERO; total];
            for (m, &idx) in mod_index.iter().enumerate() {
                buf[idx] = coeffs[m];
            }
            fft_nd(&mut buf, shape, true);
            let mut j = vec![0usize; d];
            unflatten(t, &tcounts, &mut j);
            let mut x = vec![0usize; d];
            let mut src = vec![0i64; d];
            for (flat, v) in buf.iter_mut().enumerate() {
                unflatten(flat, shape, &mut x);
                for ax in 0..d {
                    src[ax] = x[ax] as i64 - (j[ax] * sys.time_steps[ax]) as i64;
                }
                *v *= h.at(&src);
            }
            buf
        })
        .collect();
    // Fixed-order accumulation keeps the result independent of thread scheduling.
    let mut out = vec![ZERO; total];
    for p in &parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    CyclicGridFunction::with_shape(shape.clone(), out)
}

/// Synthesis with the system window.
pub fn synthesis(sys: &GaborSystem, c: &[Complex64]) -> Result<CyclicGridFunction> {
    synthesis_with(sys, c, &sys.window)
}

/// `S_{g,h} f = D_h C_g f`.
pub fn frame_operator_with(
    sys: &GaborSystem,
    f: &CyclicGridFunction,
    g: &CyclicGridFunction,
    h: &CyclicGridFunction,
) -> Result<CyclicGridFunction> {
    synthesis_with(sys, &analysis_with(sys, f, g)?, h)
}

/// `S_{φ,φ} f`.
pub fn frame_operator(sys: &GaborSystem, f: &CyclicGridFunction) -> Result<CyclicGridFunction> {
    frame_operator_with(sys, f, &sys.window, &sys.window)
}

/// The frame operator restricted to the cosets of `H = ∏ (N_i/b_i)ℤ_{N_i}`.
///
/// `S` maps functions supported on a coset to the same coset, so it splits
/// into `|ℤ_N / H|` blocks of size `∏ b_i`.
pub struct WalnutBlocks {
    /// Flat grid indices of each coset, in block order.
    pub cosets: Vec<Vec<usize>>,
    pub blocks: Vec<DMatrix<Complex64>>,
}

pub fn walnut_blocks(sys: &GaborSystem, g: &CyclicGridFunction, h: &CyclicGridFunction) -> Result<WalnutBlocks> {
    sys.window.check_same(g)?;
    sys.window.check_same(h)?;
    let shape = &sys.shape;
    let d = shape.len();
    let period: Vec<usize> = sys.modulation_counts();
    let reps: usize = period.iter().product();
    let members: usize = sys.freq_steps.iter().product();
    let tcounts = sys.translation_counts();
    let nt: usize = tcounts.iter().product();
    let c = sys.norm_factor() * reps as f64;
    let shifts: Vec<Vec<i64>> = (0..nt)
        .map(|t| {
            let mut j = vec![0usize; d];
            unflatten(t, &tcounts, &mut j);
            j.iter().zip(&sys.time_steps).map(|(&j, &a)| (j * a) as i64).collect()
        })
        .collect();
    let cosets: Vec<Vec<usize>> = (0..reps)
        .map(|r| {
            let mut rep = vec![0usize; d];
            unflatten(r, &period, &mut rep);
            (0..members)
                .map(|m| {
                    let mut t = vec![0usize; d];
                    unflatten(m, &sys.freq_steps, &mut t);
                    (0..d).fold(0, |acc, ax| acc * shape[ax] + rep[ax] + period[ax] * t[ax])
                })
                .collect()
        })
        .collect();
    let blocks = cosets
        .par_iter()
        .map(|pts| {
            let coords: Vec<Vec<usize>> = pts
                .iter()
                .map(|&p| {
                    let mut x = vec![0; d];
                    unflatten(p, shape, &mut x);
                    x
                })
                .collect();
            // hv[t][u] = h(x_u - J_t), gv[t][u] = conj g(x_u - J_t).
            let mut hv = vec![vec![ZERO; members]; nt];
            let mut gv = vec![vec![ZERO; members]; nt];
            let mut src = vec![0i64; d];
            for (t, s) in shifts.iter().enumerate() {
                for (u, x) in coords.iter().enumerate() {
                    for ax in 0..d {
                        src[ax] = x[ax] as i64 - s[ax];
                    }
                    hv[t][u] = h.at(&src);
                    gv[t][u] = g.at(&src).conj();
                }
            }
            DMatrix::from_fn(members, members, |u, v| {
                let s: Complex64 = (0..nt).map(|t| hv[t][u] * gv[t][v]).sum();
                s * c
            })
        })
        .collect();
    Ok(WalnutBlocks { cosets, blocks })
}

/// Extreme eigenvalues of `S_{φ,φ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn condition(&self) -> f64 {
        if self.lower <= 0.0 {
            f64::INFINITY
        } else {
            self.upper / self.lower
        }
    }
}

pub fn frame_bounds(sys: &GaborSystem) -> Result<FrameBounds> {
    let wb = walnut_blocks(sys, &sys.window, &sys.window)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for b in &wb.blocks {
        let e = nalgebra::SymmetricEigen::new(b.clone()).eigenvalues;
        for &v in e.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(FrameBounds { lower: lo, upper: hi })
}

/// `ψ = S_{φ,φ}^{-1} φ`, solved block by block.
pub fn canonical_dual(sys: &GaborSystem) -> Result<CyclicGridFunction> {
    let bounds = frame_bounds(sys)?;
    if !(bounds.lower > FRAME_FLOOR * bounds.upper) {
        return Err(Error::FrameCondition {
            condition: bounds.condition(),
        });
    }
    let wb = walnut_blocks(sys, &sys.window, &sys.window)?;
    let phi = sys.window.values();
    let mut out = vec![ZERO; phi.len()];
    for (pts, b) in wb.cosets.iter().zip(wb.blocks) {
        let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|&p| phi[p]));
        let sol = match b.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => b.lu().solve(&rhs).ok_or(Error::FrameCondition {
                condition: bounds.condition(),
            })?,
        };
        for (&p, v) in pts.iter().zip(sol.iter()) {
            out[p] = *v;
        }
    }
    CyclicGridFunction::with_shape(sys.shape.clone(), out)
}

/// Conjugate-gradient solve of `S_{φ,φ} ψ = φ` using only analysis and synthesis.
///
/// Stops at relative residual `1e-12` or after `10·∏N_i` iterations.
pub fn canonical_dual_cg(sys: &GaborSystem) -> Result<(CyclicGridFunction, usize)> {
    let phi = &sys.window;
    let b_norm = phi.norm();
    let cap = 10 * sys.total();
    let mut x = CyclicGridFunction::zeros(sys.shape.clone());
    if b_norm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = phi.clone();
    let mut p = r.clone();
    let mut rr = r.norm().powi(2);
    for it in 0..cap {
        if rr.sqrt() <= 1e-12 * b_norm {
            return Ok((x, it));
        }
        let ap = frame_operator(sys, &p)?;
        let pap = p.inner(&ap).re;
        if pap <= 0.0 {
            return Err(Error::FrameCondition { condition: f64::INFINITY });
        }
        let alpha = Complex64::new(rr / pap, 0.0);
        x = x.add(&p.scale(alpha))?;
        r = r.sub(&ap.scale(alpha))?;
        let rr_new = r.norm().powi(2);
        p = r.add(&p.scale(Complex64::new(rr_new / rr, 0.0)))?;
        rr = rr_new;
    }
    if rr.sqrt() <= 1e-12 * b_norm {
        return Ok((x, cap));
    }
    Err(Error::NoConvergence {
        residual: rr.sqrt() / b_norm,
        iterations: cap,
    })
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// `D_ψ C_φ f`.
    pub synthesis_dual: CyclicGridFunction,
    /// `D_φ C_ψ f`.
    pub analysis_dual: CyclicGridFunction,
    pub residual_synthesis_dual: f64,
    pub residual_analysis_dual: f64,
}

/// Both Gabor expansions of `f`, with relative residuals (absolute when `f = 0`).
pub fn reconstruct(sys: &GaborSystem, f: &CyclicGridFunction) -> Result<Reconstruction> {
    let psi = sys.dual.as_ref().ok_or(Error::MissingDual)?;
    let a = frame_operator_with(sys, f, &sys.window, psi)?;
    let b = frame_operator_with(sys, f, psi, &sys.window)?;
    let nf = f.norm();
    let rel = |g: &CyclicGridFunction| -> Result<f64> {
        let e = g.sub(f)?.norm();
        Ok(if nf == 0.0 { e } else { e / nf })
    };
    Ok(Reconstruction {
        residual_synthesis_dual: rel(&a)?,
        residual_analysis_dual: rel(&b)?,
        synthesis_dual: a,
        analysis_dual: b,
    })
}
