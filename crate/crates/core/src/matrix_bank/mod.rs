//! Matrices indexed by a finite lattice, the classes `𝕌^{p,q}(ω)` and their factorizations.

mod io;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub use io::{
    read_matrix, read_matrix_binary, read_matrix_csv, write_matrix, write_matrix_binary, write_matrix_csv,
    MatrixFormat,
};

use crate::error::{invalid, Error, Result};
use crate::mixed_norms::{lp_norm, mixed_seq_norm, SequenceArray};
use crate::weights_lattices::{
    check_pair_weight_condition, check_pq_conditions, recip_eq, Exponent, Lattice, MixedExponent,
    PairCondition, PairWeight, Weight,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square matrix `(a(j,k))_{j,k∈Λ}` with rows and columns in lattice order.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMatrix {
    pub lattice: Lattice,
    pub entries: DMatrix<Complex64>,
}

impl LatticeMatrix {
    pub fn new(lattice: Lattice, entries: DMatrix<Complex64>) -> Result<Self> {
        let n = lattice.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "lattice matrix",
                expected: n,
                found: entries.nrows().max(entries.ncols()),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("entries", "matrix entries must be finite"));
        }
        Ok(LatticeMatrix { lattice, entries })
    }

    pub fn from_fn(lattice: Lattice, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let n = lattice.len();
        LatticeMatrix::new(lattice, DMatrix::from_fn(n, n, f))
    }

    pub fn identity(lattice: Lattice) -> Self {
        let n = lattice.len();
        LatticeMatrix {
            lattice,
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(lattice: Lattice, d: &[Complex64]) -> Result<Self> {
        if d.len() != lattice.len() {
            return Err(Error::DimensionMismatch {
                context: "diagonal",
                expected: lattice.len(),
                found: d.len(),
            });
        }
        LatticeMatrix::from_fn(lattice, |j, k| if j == k { d[j] } else { ZERO })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|j| (0..n).all(|k| j == k || self.entries[(j, k)] == ZERO))
    }

    pub fn transpose(&self) -> Self {
        LatticeMatrix {
            lattice: self.lattice.clone(),
            entries: self.entries.transpose(),
        }
    }

    pub fn mul(&self, rhs: &LatticeMatrix) -> Result<Self> {
        if self.lattice != rhs.lattice {
            return Err(invalid("lattice", "product of matrices on different lattices"));
        }
        Ok(LatticeMatrix {
            lattice: self.lattice.clone(),
            entries: &self.entries * &rhs.entries,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// `(Af)(j) = Σ_k a(j,k) f(k)`.
pub fn apply(a: &LatticeMatrix, f: &SequenceArray) -> Result<SequenceArray> {
    if a.lattice != f.lattice {
        return Err(invalid("lattice", "matrix and sequence live on different lattices"));
    }
    let v = nalgebra::DVector::from_column_slice(&f.values);
    let out = &a.entries * v;
    SequenceArray::new(f.lattice.clone(), out.as_slice().to_vec())
}

/// Values `ω(j,k)` of a pair weight over `Λ × Λ`.
pub fn weight_matrix<W: PairWeight + ?Sized>(lattice: &Lattice, w: &W) -> Result<DMatrix<f64>> {
    let pts = lattice.points();
    let n = pts.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = w.eval_pair(&pts[j], &pts[k])?;
        }
    }
    Ok(m)
}

/// `‖A‖_{𝕌^{p,q}(ω)}`: `ℓ^p` along each diagonal `k = j - m` of `|aω|`, then `ℓ^q` over `k`.
pub fn u_norm<W: PairWeight + ?Sized>(a: &LatticeMatrix, p: Exponent, q: Exponent, w: &W) -> Result<f64> {
    let wm = weight_matrix(&a.lattice, w)?;
    Ok(u_norm_weighted(a, p, q, Some(&wm)))
}

/// [`u_norm`] with precomputed weight values; `None` means `ω ≡ 1`.
pub fn u_norm_weighted(a: &LatticeMatrix, p: Exponent, q: Exponent, wm: Option<&DMatrix<f64>>) -> f64 {
    let l = &a.lattice;
    let n = a.n();
    let shape = l.shape();
    let diff_shape: Vec<usize> = shape.iter().map(|&s| 2 * s - 1).collect();
    let total: usize = diff_shape.iter().product();
    let multi: Vec<Vec<i64>> = (0..n).map(|i| l.multi_index(i)).collect();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); total];
    for j in 0..n {
        for m in 0..n {
            let v = a.entries[(j, m)];
            if v == ZERO {
                continue;
            }
            let w = wm.map_or(1.0, |wm| wm[(j, m)]);
            let mut idx = 0usize;
            for ax in 0..shape.len() {
                let k = multi[j][ax] - multi[m][ax] + shape[ax] as i64 - 1;
                idx = idx * diff_shape[ax] + k as usize;
            }
            buckets[idx].push(v.norm() * w);
        }
    }
    let h: Vec<f64> = buckets.iter().map(|b| lp_norm(b, p, 1.0)).collect();
    lp_norm(&h, q, 1.0)
}

/// Output of a two-factor decomposition `A₀ = A₁ A₂`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub a1: LatticeMatrix,
    pub a2: LatticeMatrix,
    /// `‖A₀‖_{𝕌^{p₀}(ω₀)}`.
    pub norm_a0: f64,
    /// `‖A₁‖_{𝕌^{p₁}(ω₁)}`.
    pub norm_a1: f64,
    /// `‖A₂‖_{𝕌^{p₂}(ω₂)}`.
    pub norm_a2: f64,
}

impl Factorization {
    /// `‖A₁‖ ‖A₂‖ <= ‖A₀‖` up to the relative slack.
    pub fn multcont_holds(&self, slack: f64) -> bool {
        self.norm_a1 * self.norm_a2 <= self.norm_a0 * (1.0 + slack)
    }
}

fn check_factor_exponents(p0: Exponent, p1: Exponent, p2: Exponent) -> Result<()> {
    if !recip_eq(p0.recip(), p1.recip() + p2.recip()) {
        return Err(Error::ExponentRelation(format!(
            "factorization needs 1/p0 = 1/p1 + 1/p2, got p0={p0}, p1={p1}, p2={p2}"
        )));
    }
    if p0.is_infinite() && !(p1.is_infinite() && p2.is_infinite()) {
        return Err(Error::ExponentRelation("p0 = inf forces p1 = p2 = inf".into()));
    }
    Ok(())
}

/// Left-diagonal split on precomputed weights. `w1d[j]` is `ω₁(j,j)`.
fn left_core(
    a0: &LatticeMatrix,
    p: [Exponent; 3],
    w0: &DMatrix<f64>,
    w1d: &[f64],
    w2: &DMatrix<f64>,
) -> Result<Factorization> {
    let [p0, p1, p2] = p;
    check_factor_exponents(p0, p1, p2)?;
    let n = a0.n();
    for j in 0..n {
        for k in 0..n {
            let r = w1d[j] * w2[(j, k)] / w0[(j, k)];
            if r > 1.0 + 1e-12 {
                return Err(Error::WeightCondition {
                    kind: PairCondition::LeftDiagonal.name().into(),
                    ratio: r,
                    witness: [a0.lattice.point(j), a0.lattice.point(k)].concat(),
                });
            }
        }
    }
    // b(j) = ω₁(j,j)^{-1} ‖(aω₀)(j,·)‖_{p₀}^{p₀/p₁}; the exponent is 0 when p₀ = ∞.
    let expo = if p0.is_infinite() { 0.0 } else { p0.value() * p1.recip() };
    let mut b = vec![0.0f64; n];
    let mut row = vec![0.0f64; n];
    for j in 0..n {
        for k in 0..n {
            row[k] = a0.entries[(j, k)].norm() * w0[(j, k)];
        }
        let r = lp_norm(&row, p0, 1.0);
        if r > 0.0 {
            b[j] = r.powf(expo) / w1d[j];
        }
    }
    let c = DMatrix::from_fn(n, n, |j, k| {
        if b[j] > 0.0 {
            a0.entries[(j, k)] / b[j]
        } else {
            ZERO
        }
    });
    let bd: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let a1 = LatticeMatrix::diagonal(a0.lattice.clone(), &bd)?;
    let a2 = LatticeMatrix::new(a0.lattice.clone(), c)?;
    let w1m = DMatrix::from_fn(n, n, |j, k| if j == k { w1d[j] } else { 1.0 });
    Ok(Factorization {
        norm_a0: u_norm_weighted(a0, p0, p0, Some(w0)),
        norm_a1: u_norm_weighted(&a1, p1, p1, Some(&w1m)),
        norm_a2: u_norm_weighted(&a2, p2, p2, Some(w2)),
        a1,
        a2,
    })
}

/// `A₀ = A₁ A₂` with `A₁` diagonal, `1/p₀ = 1/p₁ + 1/p₂`, and
/// `ω₁(j,j) ω₂(j,k) <= ω₀(j,k)`.
pub fn factorize_left_diagonal(
    a0: &LatticeMatrix,
    p0: Exponent,
    p1: Exponent,
    p2: Exponent,
    w0: &Weight,
    w1: &Weight,
    w2: &Weight,
) -> Result<Factorization> {
    let l = &a0.lattice;
    let w0m = weight_matrix(l, w0)?;
    let w1m = weight_matrix(l, w1)?;
    let w2m = weight_matrix(l, w2)?;
    let w1d: Vec<f64> = (0..a0.n()).map(|j| w1m[(j, j)]).collect();
    left_core(a0, [p0, p1, p2], &w0m, &w1d, &w2m)
}

/// `A₀ = A₁ A₂` with `A₂` diagonal and `ω₁(j,k) ω₂(k,k) <= ω₀(j,k)`.
///
/// Computed by factorizing the transpose from the left.
pub fn factorize_right_diagonal(
    a0: &LatticeMatrix,
    p0: Exponent,
    p1: Exponent,
    p2: Exponent,
    w0: &Weight,
    w1: &Weight,
    w2: &Weight,
) -> Result<Factorization> {
    let l = &a0.lattice;
    let w0t = weight_matrix(l, w0)?.transpose();
    let w1t = weight_matrix(l, w1)?.transpose();
    let w2m = weight_matrix(l, w2)?;
    let w2d: Vec<f64> = (0..a0.n()).map(|j| w2m[(j, j)]).collect();
    let t = left_core(&a0.transpose(), [p0, p2, p1], &w0t, &w2d, &w1t).map_err(|e| match e {
        Error::WeightCondition { ratio, witness, .. } => Error::WeightCondition {
            kind: PairCondition::RightDiagonal.name().into(),
            ratio,
            witness,
        },
        other => other,
    })?;
    Ok(Factorization {
        a1: t.a2.transpose(),
        a2: t.a1.transpose(),
        norm_a0: t.norm_a0,
        norm_a1: t.norm_a2,
        norm_a2: t.norm_a1,
    })
}

/// `A = A₁ ⋯ A_N` with every factor in `𝕌²`.
#[derive(Clone, Debug)]
pub struct ChainFactorization {
    pub factors: Vec<LatticeMatrix>,
    /// Weight `ϑ_m` on pairs under which factor `m` is measured.
    pub weights: Vec<Weight>,
    /// `‖A_m‖_{𝕌²(ϑ_m)}`.
    pub norms: Vec<f64>,
    /// `‖A‖_{𝕌^{2/N}(ω₀)}` with `ω₀(j,k) = ω₂(j)/ω₁(k)`.
    pub norm_a: f64,
}

impl ChainFactorization {
    pub fn product(&self) -> Result<LatticeMatrix> {
        let mut it = self.factors.iter();
        let mut acc = it.next().expect("at least two factors").clone();
        for f in it {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }
}

/// Splits `A: ℓ²_{(ω₁)} → ℓ²_{(ω₂)}` into `N` Hilbert–Schmidt factors.
///
/// The first factor carries `ω₂(j)`, the last carries `1/ω₁(k)`, the middle ones are unweighted.
pub fn factorize_chain(a: &LatticeMatrix, n_factors: usize, w1: &Weight, w2: &Weight) -> Result<ChainFactorization> {
    if n_factors < 2 {
        return Err(invalid("N", format!("chain needs at least two factors, got {n_factors}")));
    }
    let l = &a.lattice;
    let n = a.n();
    let pts = l.points();
    let v1 = pts.iter().map(|x| w1.eval(x)).collect::<Result<Vec<f64>>>()?;
    let v2 = pts.iter().map(|x| w2.eval(x)).collect::<Result<Vec<f64>>>()?;
    let w0 = DMatrix::from_fn(n, n, |j, k| v2[j] / v1[k]);
    let tail = DMatrix::from_fn(n, n, |_, k| 1.0 / v1[k]);
    let ones = vec![1.0; n];
    let two = Exponent::TWO;
    let nf = n_factors as f64;
    let norm_a = u_norm_weighted(a, Exponent::Finite(2.0 / nf), Exponent::Finite(2.0 / nf), Some(&w0));

    let mut factors = Vec::with_capacity(n_factors);
    let mut norms = Vec::with_capacity(n_factors);
    let mut rest = a.clone();
    let mut rest_w = w0;
    for m in 1..n_factors {
        let p0 = Exponent::Finite(2.0 / (n_factors - m + 1) as f64);
        let p2 = Exponent::Finite(2.0 / (n_factors - m) as f64);
        let diag_w = if m == 1 { &v2 } else { &ones };
        let f = left_core(&rest, [p0, two, p2], &rest_w, diag_w, &tail)?;
        norms.push(f.norm_a1);
        factors.push(f.a1);
        rest = f.a2;
        rest_w = tail.clone();
        if m == n_factors - 1 {
            norms.push(f.norm_a2);
        }
    }
    factors.push(rest);

    let mut weights = vec![Weight::unit(); n_factors];
    weights[0] = Weight::split_quotient(w2.clone(), Weight::unit());
    weights[n_factors - 1] = Weight::split_quotient(Weight::unit(), w1.clone());
    Ok(ChainFactorization {
        factors,
        weights,
        norms,
        norm_a,
    })
}

/// Worst observed ratio in a continuity check.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    /// `‖A‖_{𝕌^{p,q}(ω₀)}`.
    pub norm_a: f64,
    pub worst_ratio: f64,
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// Checks `‖Af‖_{ℓ^{𝒑₂}_{(ω₂)}} <= ‖A‖_{𝕌^{p,q}(ω₀)} ‖f‖_{ℓ^{𝒑₁}_{(ω₁)}}` for every given `f`.
///
/// Exponents must satisfy `1/𝒑₂ - 1/𝒑₁ = 1/p + min(0, 1/q - 1)` and
/// `q <= min 𝒑₂ <= max 𝒑₂ <= p`; weights must satisfy `ω₂(j)/ω₁(k) <= ω₀(j,k)`.
/// The reduction order is taken from the exponent tuples.
#[allow(clippy::too_many_arguments)]
pub fn check_continuity(
    a: &LatticeMatrix,
    p1: &MixedExponent,
    p2: &MixedExponent,
    p: Exponent,
    q: Exponent,
    w0: &Weight,
    w1: &Weight,
    w2: &Weight,
    fs: &[SequenceArray],
) -> Result<ContinuityReport> {
    check_pq_conditions(p1, p2, p, q)?;
    let cond = check_pair_weight_condition(PairCondition::Lifted, w0, w1, w2, &a.lattice)?;
    if !cond.pass {
        return Err(Error::WeightCondition {
            kind: cond.kind.name().into(),
            ratio: cond.worst_ratio,
            witness: cond.witness,
        });
    }
    let norm_a = u_norm(a, p, q, w0)?;
    let mut ratios = Vec::with_capacity(fs.len());
    for f in fs {
        let lhs = mixed_seq_norm(&apply(a, f)?, p2, w2)?;
        let rhs = norm_a * mixed_seq_norm(f, p1, w1)?;
        ratios.push(if rhs == 0.0 { if lhs == 0.0 { 0.0 } else { f64::INFINITY } } else { lhs / rhs });
    }
    let worst_ratio = ratios.iter().fold(0.0f64, |m, &r| m.max(r));
    Ok(ContinuityReport {
        norm_a,
        worst_ratio,
        pass: worst_ratio <= 1.0 + 1e-10,
        ratios,
    })
}
