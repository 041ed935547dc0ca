//! Singular values and Schatten quasi-norms of weighted matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::matrix_bank::{u_norm, LatticeMatrix};
use crate::mixed_norms::{lp_norm, InequalityReport};
use crate::weights_lattices::{recip_eq, Exponent, Weight};

/// Relative level below which singular values count as zero for rank statements.
pub const RANK_TOL: f64 = 1e-13;

/// Non-increasing list of singular values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("values", "singular values must be finite and nonnegative"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(SingularSpectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self) -> usize {
        let cut = RANK_TOL * self.largest();
        self.values.iter().filter(|&&v| v > cut).count()
    }
}

/// Singular values of a dense complex matrix.
pub fn singular_values_dense(m: &DMatrix<Complex64>) -> Result<SingularSpectrum> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(invalid("matrix", "entries must be finite"));
    }
    if m.is_empty() {
        return SingularSpectrum::new(Vec::new());
    }
    SingularSpectrum::new(m.clone().singular_values().as_slice().to_vec())
}

/// Spectrum of `A` as a map `ℓ²_{(ω₁)} → ℓ²_{(ω₂)}`, i.e. of `D_{ω₂} A D_{ω₁}^{-1}`.
pub fn singular_values(a: &LatticeMatrix, w1: &Weight, w2: &Weight) -> Result<SingularSpectrum> {
    singular_values_dense(&conjugated(a, w1, w2)?)
}

/// `D_{ω₂} A D_{ω₁}^{-1}`.
pub fn conjugated(a: &LatticeMatrix, w1: &Weight, w2: &Weight) -> Result<DMatrix<Complex64>> {
    let pts = a.lattice.points();
    let v1 = pts.iter().map(|x| w1.eval(x)).collect::<Result<Vec<f64>>>()?;
    let v2 = pts.iter().map(|x| w2.eval(x)).collect::<Result<Vec<f64>>>()?;
    let m = DMatrix::from_fn(a.n(), a.n(), |j, k| a.entries[(j, k)] * (v2[j] / v1[k]));
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::WeightNotPositive {
            point: Vec::new(),
            value: f64::INFINITY,
        });
    }
    Ok(m)
}

/// `ℓ^p` quasi-norm of the spectrum; `p = ∞` is the operator norm.
pub fn schatten_norm(s: &SingularSpectrum, p: Exponent) -> f64 {
    lp_norm(&s.values, p, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    /// `‖A‖_{ℐ_p(ℓ²_{(ω₁)}, ℓ²_{(ω₂)})}`.
    pub i_p: f64,
    /// `‖A‖_{𝕌^p(ω₀)}` with `ω₀(j,k) = ω₂(j)/ω₁(k)`.
    pub u_p: f64,
    pub ratio: f64,
    pub pass: bool,
}

fn embedding(a: &LatticeMatrix, p: Exponent, w1: &Weight, w2: &Weight) -> Result<EmbeddingReport> {
    let w0 = Weight::split_quotient(w2.clone(), w1.clone());
    let i_p = schatten_norm(&singular_values(a, w1, w2)?, p);
    let u_p = u_norm(a, p, p, &w0)?;
    let ratio = if u_p == 0.0 { 0.0 } else { i_p / u_p };
    Ok(EmbeddingReport {
        i_p,
        u_p,
        ratio,
        pass: i_p <= u_p * (1.0 + 1e-10),
    })
}

/// `‖A‖_{ℐ_p} <= ‖A‖_{𝕌^p(ω₀)}` for `p <= 2`.
pub fn verify_schatten_embedding(a: &LatticeMatrix, p: Exponent, w1: &Weight, w2: &Weight) -> Result<EmbeddingReport> {
    if p.recip() < 0.5 {
        return Err(invalid("p", format!("the embedding holds for p <= 2, got {p}; use probe_schatten_embedding")));
    }
    embedding(a, p, w1, w2)
}

/// Same quantities for `p > 2`, where the inclusion is not expected; `pass` is informational.
pub fn probe_schatten_embedding(a: &LatticeMatrix, p: Exponent, w1: &Weight, w2: &Weight) -> Result<EmbeddingReport> {
    embedding(a, p, w1, w2)
}

/// `‖T₂T₁‖_{ℐ_{p₀}} <= ‖T₁‖_{ℐ_{p₁}} ‖T₂‖_{ℐ_{p₂}}` with `1/p₀ = 1/p₁ + 1/p₂`.
pub fn check_holder_composition(
    t1: &DMatrix<Complex64>,
    t2: &DMatrix<Complex64>,
    p0: Exponent,
    p1: Exponent,
    p2: Exponent,
) -> Result<InequalityReport> {
    if !recip_eq(p0.recip(), p1.recip() + p2.recip()) {
        return Err(Error::ExponentRelation(format!(
            "composition needs 1/p0 = 1/p1 + 1/p2, got p0={p0}, p1={p1}, p2={p2}"
        )));
    }
    if t2.ncols() != t1.nrows() {
        return Err(Error::DimensionMismatch {
            context: "composition",
            expected: t1.nrows(),
            found: t2.ncols(),
        });
    }
    let lhs = schatten_norm(&singular_values_dense(&(t2 * t1))?, p0);
    let rhs = schatten_norm(&singular_values_dense(t1)?, p1) * schatten_norm(&singular_values_dense(t2)?, p2);
    Ok(InequalityReport::new(lhs, rhs, 1e-10))
}

/// `‖Σ T_k‖^p_{ℐ_p} <= Σ ‖T_k‖^p_{ℐ_p}` for `p <= 1`.
pub fn check_p_triangle(summands: &[DMatrix<Complex64>], p: Exponent) -> Result<InequalityReport> {
    if p.recip() < 1.0 {
        return Err(invalid("p", format!("the p-triangle inequality needs p <= 1, got {p}")));
    }
    let first = summands.first().ok_or_else(|| invalid("summands", "need at least one matrix"))?;
    let shape = first.shape();
    let mut sum = DMatrix::zeros(shape.0, shape.1);
    let mut rhs = 0.0;
    let pv = p.value();
    for t in summands {
        if t.shape() != shape {
            return Err(Error::DimensionMismatch {
                context: "summand shape",
                expected: shape.0 * shape.1,
                found: t.len(),
            });
        }
        sum += t;
        rhs += schatten_norm(&singular_values_dense(t)?, p).powf(pv);
    }
    let lhs = schatten_norm(&singular_values_dense(&sum)?, p).powf(pv);
    Ok(InequalityReport::new(lhs, rhs, 1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights_lattices::Lattice;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn spectra() {
        let l = Lattice::counting(&[3]).unwrap();
        let u = Weight::unit();
        let s = singular_values(&LatticeMatrix::identity(l.clone()), &u, &u).unwrap();
        assert!(s.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let d = LatticeMatrix::diagonal(l.clone(), &[c(3.0), c(1.0), c(2.0)]).unwrap();
        let s = singular_values(&d, &u, &u).unwrap();
        for (a, b) in s.values().iter().zip([3.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let uvec = [c(1.0), Complex64::new(0.0, 2.0), c(-1.0)];
        let vvec = [c(0.5), c(1.0), Complex64::new(1.0, 1.0)];
        let r1 = LatticeMatrix::from_fn(l, |j, k| uvec[j] * vvec[k].conj()).unwrap();
        let s = singular_values(&r1, &u, &u).unwrap();
        let nu: f64 = uvec.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let nv: f64 = vvec.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((s.largest() - nu * nv).abs() < 1e-13);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn identity_norms() {
        let n = 5;
        let s = SingularSpectrum::new(vec![1.0; n]).unwrap();
        for p in [0.5, 1.0, 2.0, 3.5] {
            let v = schatten_norm(&s, Exponent::Finite(p));
            assert!((v - (n as f64).powf(1.0 / p)).abs() < 1e-13);
        }
        assert_eq!(schatten_norm(&s, Exponent::Infinity), 1.0);
    }

    #[test]
    fn embedding_identity_and_rejection() {
        let l = Lattice::counting(&[6]).unwrap();
        let id = LatticeMatrix::identity(l);
        let u = Weight::unit();
        for p in [0.5, 1.0, 2.0] {
            let r = verify_schatten_embedding(&id, Exponent::Finite(p), &u, &u).unwrap();
            assert!((r.i_p - r.u_p).abs() < 1e-12 * r.u_p && r.pass);
        }
        assert!(verify_schatten_embedding(&id, Exponent::Finite(3.0), &u, &u).is_err());
        let ones = LatticeMatrix::from_fn(Lattice::counting(&[4]).unwrap(), |_, _| c(1.0)).unwrap();
        let r = probe_schatten_embedding(&ones, Exponent::Finite(4.0), &u, &u).unwrap();
        assert!(r.ratio > 1.0);
    }

    #[test]
    fn triangle_and_holder_edge_cases() {
        let a = DMatrix::from_fn(3, 3, |j, k| c((j * 3 + k) as f64));
        let r = check_p_triangle(std::slice::from_ref(&a), Exponent::Finite(0.7)).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12 * r.rhs);
        let e = |i: usize| DMatrix::from_fn(3, 3, |j, k| if j == i && k == i { c(i as f64 + 1.0) } else { c(0.0) });
        let r = check_p_triangle(&[e(0), e(1), e(2)], Exponent::ONE).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-13);
        assert!(check_p_triangle(std::slice::from_ref(&a), Exponent::TWO).is_err());
        let id = DMatrix::<Complex64>::identity(4, 4);
        let r = check_holder_composition(&id, &id, Exponent::ONE, Exponent::TWO, Exponent::TWO).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-13);
        assert!(check_holder_composition(&id, &id, Exponent::ONE, Exponent::ONE, Exponent::TWO).is_err());
    }
}
