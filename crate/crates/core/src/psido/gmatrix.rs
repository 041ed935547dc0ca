use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quant::{apply_operator, op0};
use super::symbol::Symbol;
use super::wigner::rihaczek_window;
use crate::error::{invalid, Error, Result};
use crate::gabor::{
    analysis, analysis_with, centered, modulation_norm_sampled, synthesis, tensor, CyclicGridFunction,
    EmpiricalConstant, GaborSystem, Sampling,
};
use crate::matrix_bank::{u_norm, LatticeMatrix};
use crate::weights_lattices::{Exponent, Lattice, MixedExponent, PairFn, Weight};

/// Gabor system on `ℤ_N × ℤ_N` built from the Rihaczek window of `(φ₁, φ₂)`.
///
/// The symbol lattice is `Λ² × Λ²` with `Λ = aℤ × bℤ`: translations
/// `(a, b)` and modulations `(b, a)` on the axes `(x, ξ)`.
#[derive(Clone, Debug)]
pub struct PhaseSpaceSystem {
    n: usize,
    a: usize,
    b: usize,
    phi1: CyclicGridFunction,
    phi2: CyclicGridFunction,
    system: GaborSystem,
}

impl PhaseSpaceSystem {
    /// Builds the system and its canonical dual.
    pub fn new(phi1: CyclicGridFunction, phi2: CyclicGridFunction, a: usize, b: usize) -> Result<Self> {
        let window = rihaczek_window(&phi1, &phi2)?;
        let n = window.n();
        if a == 0 || b == 0 || n % a != 0 || n % b != 0 {
            return Err(invalid("steps", format!("steps ({a}, {b}) must divide {n}")));
        }
        let system = GaborSystem::with_steps(window.to_grid(), vec![a, b], vec![b, a])?.with_canonical_dual()?;
        Ok(PhaseSpaceSystem {
            n,
            a,
            b,
            phi1,
            phi2,
            system,
        })
    }

    /// Both windows equal to the unit-norm Gaussian.
    pub fn gaussian(n: usize, a: usize, b: usize) -> Result<Self> {
        let g = crate::gabor::gaussian(n, 1.0)?.normalized();
        PhaseSpaceSystem::new(g.clone(), g, a, b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn system(&self) -> &GaborSystem {
        &self.system
    }

    /// `Λ` in grid units, ordered `(time, frequency)`.
    pub fn lattice(&self) -> Lattice {
        Lattice::new(
            vec![self.a as f64, self.b as f64],
            vec![0, 0],
            vec![(self.n / self.a) as i64 - 1, (self.n / self.b) as i64 - 1],
        )
        .expect("valid lattice")
    }

    /// System of `φ₁` on `Λ`, used for `D_{φ₁}`.
    pub fn synthesis_system(&self) -> GaborSystem {
        GaborSystem::new(self.phi1.clone(), self.a, self.b).expect("steps checked")
    }

    /// System of `φ₂` on `Λ`, used for `C_{φ₂}`.
    pub fn analysis_system(&self) -> GaborSystem {
        GaborSystem::new(self.phi2.clone(), self.a, self.b).expect("steps checked")
    }

    /// `D_{φ₁} A C_{φ₂} f`.
    pub fn apply_factored(&self, a_mat: &LatticeMatrix, f: &CyclicGridFunction) -> Result<CyclicGridFunction> {
        let c = analysis(&self.analysis_system(), f)?;
        let v = &a_mat.entries * nalgebra::DVector::from_column_slice(&c);
        synthesis(&self.synthesis_system(), v.as_slice())
    }
}

/// Matrix `A(𝒋,𝒌) = V_Ψ a(j, κ, ι-κ, k-j) e^{2πi (k-j)κ/N}` over `Λ`, with `𝒋 = (j, ι)`, `𝒌 = (k, κ)`.
///
/// `Ψ` is the canonical dual of the Rihaczek window. Then `Op₀(a) = D_{φ₁} A C_{φ₂}`.
pub fn gabor_matrix(a: &Symbol, ps: &PhaseSpaceSystem) -> Result<LatticeMatrix> {
    if a.n() != ps.n {
        return Err(Error::DimensionMismatch {
            context: "symbol and phase-space system",
            expected: ps.n,
            found: a.n(),
        });
    }
    let dual = ps.system.dual().ok_or(Error::MissingDual)?;
    let c = analysis_with(&ps.system, &a.to_grid(), dual)?;
    let n = ps.n;
    let (sa, sb) = (ps.a, ps.b);
    let (na, nb) = (n / sa, n / sb);
    let len = na * nb;
    let rows: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|row| {
            let (jj, ii) = (row / nb, row % nb);
            (0..len)
                .map(|col| {
                    let (kk, ll) = (col / nb, col % nb);
                    let dk = (kk + na - jj) % na;
                    let di = (ii + nb - ll) % nb;
                    let v = c[((jj * nb + ll) * nb + di) * na + dk];
                    let phase = ((sa * dk) * (sb * ll)) % n;
                    v * Complex64::from_polar(1.0, 2.0 * PI * phase as f64 / n as f64)
                })
                .collect()
        })
        .collect();
    LatticeMatrix::new(ps.lattice(), DMatrix::from_fn(len, len, |j, k| rows[j][k]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationIdentityReport {
    /// `‖Op₀(a)f - D A C f‖₂ / ‖Op₀(a)f‖₂` per trial.
    pub residuals: Vec<f64>,
    pub worst: f64,
    pub pass: bool,
}

/// Tolerance for the factorization identity.
pub const FACTORIZATION_TOL: f64 = 1e-6;

/// Compares `Op₀(a) f` with `D_{φ₁} A C_{φ₂} f` on every given `f`.
pub fn check_factorization_identity(
    a: &Symbol,
    ps: &PhaseSpaceSystem,
    fs: &[CyclicGridFunction],
) -> Result<FactorizationIdentityReport> {
    let direct = op0(a);
    let a_mat = gabor_matrix(a, ps)?;
    let residuals = fs
        .iter()
        .map(|f| {
            let lhs = apply_operator(&direct, f)?;
            let rhs = ps.apply_factored(&a_mat, f)?;
            let den = lhs.norm();
            let num = lhs.sub(&rhs)?.norm();
            Ok(if den == 0.0 { num } else { num / den })
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = residuals.iter().fold(0.0f64, |m, &r| m.max(r));
    Ok(FactorizationIdentityReport {
        residuals,
        worst,
        pass: worst <= FACTORIZATION_TOL,
    })
}

/// Tensor Gaussian window on `ℤ_N × ℤ_N` used for symbol modulation norms.
pub fn symbol_window(n: usize) -> Result<CyclicGridFunction> {
    let g = crate::gabor::gaussian(n, 1.0)?;
    Ok(tensor(&[&g, &g])?.normalized())
}

/// `‖a‖_{M^{p,q}_{(ω₀)}}` with the tensor Gaussian window normalized in the sampling units: `L^p` over `(x,ξ)`, then `L^q` over the dual pair.
pub fn symbol_modulation_norm(a: &Symbol, p: Exponent, q: Exponent, w0: &Weight, sampling: Sampling) -> Result<f64> {
    let e = MixedExponent::identity(vec![p, p, q, q])?;
    modulation_norm_sampled(&a.to_grid(), &e, w0, &sampling.normalize(&symbol_window(a.n())?), sampling)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `‖A‖_{𝕌^{p,q}(ω)} / ‖a‖_{M^{p,q}_{(ω₀)}}` per symbol.
    pub constant: EmpiricalConstant,
    pub pass: bool,
}

/// Largest admissible `max/min` spread of the equivalence ratios.
pub const EQUIVALENCE_SPREAD: f64 = 1e2;

/// Ratios `‖A‖_{𝕌^{p,q}(ω)} / ‖a‖_{M^{p,q}_{(ω₀)}}` over a symbol family, with
/// `ω(𝒋,𝒌) = ω₀(j, κ, ι-κ, k-j)` in the units of `sampling`.
pub fn check_unorm_modnorm_equiv(
    family: &[Symbol],
    p: Exponent,
    q: Exponent,
    w0: &Weight,
    ps: &PhaseSpaceSystem,
    sampling: Sampling,
) -> Result<EquivalenceReport> {
    let n = ps.n;
    let unit = sampling.unit;
    let c = |v: f64| centered((v.round() as i64).rem_euclid(n as i64) as usize, n) as f64 * unit;
    let omega = PairFn(|row: &[f64], col: &[f64]| {
        let (j, iota, k, kappa) = (row[0], row[1], col[0], col[1]);
        w0.eval(&[c(j), c(kappa), c(iota - kappa), c(k - j)]).unwrap_or(f64::NAN)
    });
    let ratios = family
        .iter()
        .map(|a| {
            let m = symbol_modulation_norm(a, p, q, w0, sampling)?;
            let u = u_norm(&gabor_matrix(a, ps)?, p, q, &omega)?;
            Ok(if m == 0.0 { 0.0 } else { u / m })
        })
        .collect::<Result<Vec<f64>>>()?;
    let constant = EmpiricalConstant::new(ratios);
    let pass = constant.spread() <= EQUIVALENCE_SPREAD;
    Ok(EquivalenceReport { constant, pass })
}
