use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gmatrix::symbol_modulation_norm;
use super::quant::{apply_operator, op_t};
use super::symbol::Symbol;
use super::wigner::wigner_t;
use crate::error::{invalid, Error, Result};
use crate::gabor::fft::fft_nd;
use crate::gabor::{centered, modulation_norm_sampled, stft, CyclicGridFunction, EmpiricalConstant, Sampling};
use crate::mixed_norms::lp_norm;
use crate::schatten::{schatten_norm, singular_values_dense};
use crate::weights_lattices::{check_pq_conditions, recip_eq, Exponent, MixedExponent, Weight, RECIP_TOL};

/// Largest `ω₂(x,ξ) / (ω₁(y,η) ω₀((1-t)x+ty, tξ+(1-t)η, ξ-η, y-x))` over a sample box.
///
/// The continuity and Schatten estimates need this to be bounded; the value is the implied constant.
pub fn op_weight_constant(t: f64, w0: &Weight, w1: &Weight, w2: &Weight, radius: f64, per_axis: usize) -> Result<f64> {
    let pts = crate::weights_lattices::sample_box(2, radius, per_axis);
    let mut worst = 0.0f64;
    for x in &pts {
        let a = w2.eval(x)?;
        for y in &pts {
            let m = [
                (1.0 - t) * x[0] + t * y[0],
                t * x[1] + (1.0 - t) * y[1],
                x[1] - y[1],
                y[0] - x[0],
            ];
            worst = worst.max(a / (w1.eval(y)? * w0.eval(&m)?));
        }
    }
    Ok(worst)
}

/// Largest `ω₀((1-t)x+ty, tξ+(1-t)η, ξ-η, y-x) / (ω₁(x,ξ) ω₂(y,η))` over a sample box.
pub fn wigner_weight_constant(t: f64, w0: &Weight, w1: &Weight, w2: &Weight, radius: f64, per_axis: usize) -> Result<f64> {
    let pts = crate::weights_lattices::sample_box(2, radius, per_axis);
    let mut worst = 0.0f64;
    for x in &pts {
        let a = w1.eval(x)?;
        for y in &pts {
            let m = [
                (1.0 - t) * x[0] + t * y[0],
                t * x[1] + (1.0 - t) * y[1],
                x[1] - y[1],
                y[0] - x[0],
            ];
            worst = worst.max(w0.eval(&m)? / (a * w2.eval(y)?));
        }
    }
    Ok(worst)
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpContinuityReport {
    /// `‖a‖_{M^{p,q}_{(ω₀)}}`.
    pub norm_a: f64,
    /// `‖Op_t(a)f‖_{M^{𝒑₂}_{(ω₂)}} / (‖a‖_{M^{p,q}_{(ω₀)}} ‖f‖_{M^{𝒑₁}_{(ω₁)}})` per `f`.
    pub constant: EmpiricalConstant,
    pub weight_constant: f64,
}

/// Operator continuity ratios on modulation spaces over the given functions.
///
/// `window` is the reference window for the function norms; symbol norms use
/// the tensor Gaussian. Fails if the exponents violate the continuity relations.
#[allow(clippy::too_many_arguments)]
pub fn check_op_continuity(
    a: &Symbol,
    t: f64,
    p1: &MixedExponent,
    p2: &MixedExponent,
    p: Exponent,
    q: Exponent,
    weights: [&Weight; 3],
    fs: &[CyclicGridFunction],
    window: &CyclicGridFunction,
    sampling: Sampling,
) -> Result<OpContinuityReport> {
    if p1.dim() != 2 {
        return Err(invalid("p1", "function exponents need one entry per phase-space axis"));
    }
    check_pq_conditions(p1, p2, p, q)?;
    let [w0, w1, w2] = weights;
    let weight_constant = op_weight_constant(t, w0, w1, w2, 4.0, 9)?;
    let norm_a = symbol_modulation_norm(a, p, q, w0, sampling)?;
    let op = op_t(a, t)?;
    let ratios = fs
        .par_iter()
        .map(|f| {
            let lhs = modulation_norm_sampled(&apply_operator(&op, f)?, p2, w2, window, sampling)?;
            let rhs = norm_a * modulation_norm_sampled(f, p1, w1, window, sampling)?;
            Ok(ratio(lhs, rhs))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(OpContinuityReport {
        norm_a,
        constant: EmpiricalConstant::new(ratios),
        weight_constant,
    })
}

/// Gram matrix of `‖f‖²_{M²_{(ω)}}` on the sampled phase space.
pub fn modulation_gram(window: &CyclicGridFunction, w: &Weight, sampling: Sampling) -> Result<DMatrix<Complex64>> {
    let n = window.len();
    if window.dim() != 1 {
        return Err(invalid("window", "the Gram matrix is built for one-dimensional grids"));
    }
    let axis: Vec<i64> = (0..n)
        .map(|k| centered(k, n))
        .filter(|c| c.rem_euclid(sampling.stride as i64) == 0)
        .collect();
    let step = sampling.stride as f64 * sampling.unit;
    let scale = step * step / n as f64;
    let unit = w.is_unit();
    let parts: Vec<Result<DMatrix<Complex64>>> = axis
        .par_iter()
        .map(|&m| {
            // h(d) = Σ_n ω(m,n)² e^{2πi n d/N}
            let mut h = vec![Complex64::new(0.0, 0.0); n];
            for &nu in &axis {
                let wv = if unit {
                    1.0
                } else {
                    w.eval(&[m as f64 * sampling.unit, nu as f64 * sampling.unit])?
                };
                h[nu.rem_euclid(n as i64) as usize] += wv * wv;
            }
            fft_nd(&mut h, &[n], true);
            let phi: Vec<Complex64> = (0..n).map(|x| window.at(&[x as i64 - m])).collect();
            Ok(DMatrix::from_fn(n, n, |x, y| phi[x] * phi[y].conj() * h[(x + n - y) % n] * scale))
        })
        .collect();
    let mut g = DMatrix::zeros(n, n);
    for p in parts {
        g += p?;
    }
    Ok(g)
}

/// `G^{s}` for a Hermitian positive definite `G`.
fn hermitian_power(g: &DMatrix<Complex64>, s: f64) -> Result<DMatrix<Complex64>> {
    let h = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if !(min > 1e-12 * max) {
        return Err(Error::FrameCondition {
            condition: if min > 0.0 { max / min } else { f64::INFINITY },
        });
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(v.powf(s), 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// `‖T‖_{ℐ_p(M²_{(ω₁)} → M²_{(ω₂)})}` for an operator matrix on `ℤ_N`.
pub fn weighted_schatten_norm(
    t_mat: &DMatrix<Complex64>,
    p: Exponent,
    window: &CyclicGridFunction,
    w1: &Weight,
    w2: &Weight,
    sampling: Sampling,
) -> Result<f64> {
    let g1 = hermitian_power(&modulation_gram(window, w1, sampling)?, -0.5)?;
    let g2 = hermitian_power(&modulation_gram(window, w2, sampling)?, 0.5)?;
    let m = g2 * t_mat * g1;
    Ok(schatten_norm(&singular_values_dense(&m)?, p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpSchattenReport {
    /// `‖Op_t(a)‖_{ℐ_p} / ‖a‖_{M^{p,p}_{(ω₀)}}` per symbol.
    pub constant: EmpiricalConstant,
    pub weight_constant: f64,
}

/// Schatten-to-modulation ratios over a symbol family for `p <= 2`.
pub fn check_op_schatten(
    family: &[Symbol],
    t: f64,
    p: Exponent,
    weights: [&Weight; 3],
    window: &CyclicGridFunction,
    sampling: Sampling,
) -> Result<OpSchattenReport> {
    if p.recip() < 0.5 - RECIP_TOL {
        return Err(invalid("p", format!("the Schatten estimate needs p <= 2, got {p}")));
    }
    let [w0, w1, w2] = weights;
    let weight_constant = op_weight_constant(t, w0, w1, w2, 4.0, 9)?;
    let g1 = hermitian_power(&modulation_gram(window, w1, sampling)?, -0.5)?;
    let g2 = hermitian_power(&modulation_gram(window, w2, sampling)?, 0.5)?;
    let ratios = family
        .iter()
        .map(|a| {
            let m = &g2 * &op_t(a, t)?.entries * &g1;
            let lhs = schatten_norm(&singular_values_dense(&m)?, p);
            Ok(ratio(lhs, symbol_modulation_norm(a, p, p, w0, sampling)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(OpSchattenReport {
        constant: EmpiricalConstant::new(ratios),
        weight_constant,
    })
}

/// Exponents of the Wigner bound: `W^t` in `M^{p,q}`, `f_j` in `M^{p_j,q_j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerExponents {
    pub p: Exponent,
    pub q: Exponent,
    pub p1: Exponent,
    pub q1: Exponent,
    pub p2: Exponent,
    pub q2: Exponent,
}

impl WignerExponents {
    /// Requires `p <= p_j, q_j <= q` and `1/p₁+1/p₂ = 1/q₁+1/q₂ = 1/p+1/q`.
    pub fn validate(&self) -> Result<()> {
        let s = self.p.recip() + self.q.recip();
        let a = self.p1.recip() + self.p2.recip();
        let b = self.q1.recip() + self.q2.recip();
        if !recip_eq(a, s) || !recip_eq(b, s) {
            return Err(Error::ExponentRelation(format!(
                "need 1/p1+1/p2 = 1/q1+1/q2 = 1/p+1/q, got {a}, {b}, {s}"
            )));
        }
        for e in [self.p1, self.q1, self.p2, self.q2] {
            if e.recip() > self.p.recip() + RECIP_TOL || e.recip() < self.q.recip() - RECIP_TOL {
                return Err(Error::ExponentRelation(format!(
                    "need p <= {e} <= q with p={}, q={}",
                    self.p, self.q
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WignerBoundReport {
    /// `‖W^t_{f₁,f₂}‖_{M^{p,q}_{(ω₀)}}`.
    pub lhs: f64,
    /// `‖f₁‖_{M^{p₁,q₁}_{(ω₁)}} ‖f₂‖_{M^{p₂,q₂}_{(ω₂)}}`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Compares the modulation norm of `W^t_{f₁,f₂}` with the product of the factor norms.
#[allow(clippy::too_many_arguments)]
pub fn check_wigner_modulation_bound(
    f1: &CyclicGridFunction,
    f2: &CyclicGridFunction,
    t: f64,
    e: &WignerExponents,
    weights: [&Weight; 3],
    window: &CyclicGridFunction,
    sampling: Sampling,
) -> Result<WignerBoundReport> {
    e.validate()?;
    let [w0, w1, w2] = weights;
    let w = wigner_t(f1, f2, t)?;
    let lhs = symbol_modulation_norm(&w, e.p, e.q, w0, sampling)?;
    let n1 = modulation_norm_sampled(f1, &MixedExponent::identity(vec![e.p1, e.q1])?, w1, window, sampling)?;
    let n2 = modulation_norm_sampled(f2, &MixedExponent::identity(vec![e.p2, e.q2])?, w2, window, sampling)?;
    let rhs = n1 * n2;
    Ok(WignerBoundReport {
        lhs,
        rhs,
        ratio: ratio(lhs, rhs),
    })
}

/// Tolerance for the pointwise Wigner convolution identity.
pub const CONVOLUTION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvolutionReport {
    /// Least-squares `C` in `|W*W| = C |V V|`.
    pub fitted_c: f64,
    /// `max |lhs - C rhs| / max lhs` over the grid.
    pub deviation: f64,
    pub identity_pass: bool,
    /// `‖a * b‖_{L^p}` in continuum units.
    pub conv_norm: f64,
    /// `∏ ‖·‖_{M^{2p}}` over the four factors.
    pub factor_norms: f64,
    pub norm_ratio: f64,
}

/// Weyl-symbol convolution `W_{f₁,f₂} * W_{g₁,g₂}` against `|V_{f̌₂} g₁| |V_{f̌₁} g₂|`.
///
/// The convolution is the cyclic sum; for the `L^p` comparison it is scaled to
/// continuum units, and factor norms use the continuum sampling of `window`.
pub fn check_wigner_convolution(
    f1: &CyclicGridFunction,
    f2: &CyclicGridFunction,
    g1: &CyclicGridFunction,
    g2: &CyclicGridFunction,
    p: Exponent,
    window: &CyclicGridFunction,
) -> Result<ConvolutionReport> {
    if p.recip() < 1.0 - RECIP_TOL {
        return Err(invalid("p", format!("the convolution estimate is stated for p <= 1, got {p}")));
    }
    let a = wigner_t(f1, f2, 0.5)?;
    let b = wigner_t(g1, g2, 0.5)?;
    let n = a.n();
    b.check_same(&a)?;
    let mut fa = a.values().to_vec();
    let mut fb = b.values().to_vec();
    fft_nd(&mut fa, &[n, n], false);
    fft_nd(&mut fb, &[n, n], false);
    let inv = 1.0 / (n * n) as f64;
    let mut conv: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y * inv).collect();
    fft_nd(&mut conv, &[n, n], true);
    let lhs: Vec<f64> = conv.iter().map(|v| v.norm()).collect();
    let v1 = stft(g1, &f2.reflect())?;
    let v2 = stft(g2, &f1.reflect())?;
    let rhs: Vec<f64> = v1.iter().zip(&v2).map(|(x, y)| x.norm() * y.norm()).collect();
    let num: f64 = lhs.iter().zip(&rhs).map(|(l, r)| l * r).sum();
    let den: f64 = rhs.iter().map(|r| r * r).sum();
    let fitted_c = if den == 0.0 { 0.0 } else { num / den };
    let top = lhs.iter().fold(0.0f64, |m, &v| m.max(v));
    let dev = lhs
        .iter()
        .zip(&rhs)
        .fold(0.0f64, |m, (l, r)| m.max((l - fitted_c * r).abs()));
    let deviation = if top == 0.0 { dev } else { dev / top };
    let sampling = Sampling::continuum(n);
    let window = sampling.normalize(window);
    let h = sampling.unit;
    let scaled: Vec<f64> = lhs.iter().map(|v| v * h * h).collect();
    let conv_norm = lp_norm(&scaled, p, h * h);
    let e = MixedExponent::uniform(Exponent::new(2.0 * p.value())?, 2)?;
    let mut factor_norms = 1.0;
    for f in [f1, f2, g1, g2] {
        factor_norms *= modulation_norm_sampled(f, &e, &Weight::unit(), &window, sampling)?;
    }
    Ok(ConvolutionReport {
        fitted_c,
        deviation,
        identity_pass: deviation <= CONVOLUTION_TOL,
        conv_norm,
        factor_norms,
        norm_ratio: ratio(conv_norm, factor_norms),
    })
}
