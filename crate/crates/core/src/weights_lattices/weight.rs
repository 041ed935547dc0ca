use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::weights_lattices::Lattice;

/// Positive weight on `ℝ^d`, built from a small closed algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    /// Constant `c > 0`.
    Constant { c: f64 },
    /// `⟨x⟩^s = (1 + |x|²)^{s/2}`.
    #[serde(rename = "poly", alias = "polynomial")]
    Polynomial { s: f64 },
    /// `e^{r|x|}`.
    #[serde(rename = "exp", alias = "exponential")]
    Exponential { r: f64 },
    /// `∏_i w_i(x_i)`; each factor sees one coordinate.
    Tensor { axes: Vec<Weight> },
    /// Pointwise product of weights on the same space.
    Product { factors: Vec<Weight> },
    /// Pointwise quotient.
    Quotient { num: Box<Weight>, den: Box<Weight> },
    /// On `x = (j, k)` split in halves: `num(j) / den(k)`.
    SplitQuotient { num: Box<Weight>, den: Box<Weight> },
}

impl Default for Weight {
    fn default() -> Self {
        Weight::unit()
    }
}

impl Weight {
    pub fn unit() -> Self {
        Weight::Constant { c: 1.0 }
    }

    pub fn poly(s: f64) -> Self {
        Weight::Polynomial { s }
    }

    pub fn tensor(axes: Vec<Weight>) -> Self {
        Weight::Tensor { axes }
    }

    pub fn product(a: Weight, b: Weight) -> Self {
        Weight::Product { factors: vec![a, b] }
    }

    pub fn quotient(num: Weight, den: Weight) -> Self {
        Weight::Quotient {
            num: Box::new(num),
            den: Box::new(den),
        }
    }

    /// `ω₂(j)/ω₁(k)` on pairs; the building block for the lifted weight condition.
    pub fn split_quotient(num: Weight, den: Weight) -> Self {
        Weight::SplitQuotient {
            num: Box::new(num),
            den: Box::new(den),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Weight::Constant { c } if *c == 1.0)
    }

    /// Evaluates the weight; fails if the value is not finite and positive.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = self.raw(x)?;
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::WeightNotPositive {
                point: x.to_vec(),
                value: v,
            })
        }
    }

    fn raw(&self, x: &[f64]) -> Result<f64> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("point", format!("{x:?} is not finite")));
        }
        Ok(match self {
            Weight::Constant { c } => *c,
            Weight::Polynomial { s } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                (0.5 * s * r2.ln_1p()).exp()
            }
            Weight::Exponential { r } => {
                let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                (r * n).exp()
            }
            Weight::Tensor { axes } => {
                if axes.len() != x.len() {
                    return Err(Error::DimensionMismatch {
                        context: "tensor weight",
                        expected: axes.len(),
                        found: x.len(),
                    });
                }
                let mut v = 1.0;
                for (w, xi) in axes.iter().zip(x) {
                    v *= w.raw(std::slice::from_ref(xi))?;
                }
                v
            }
            Weight::Product { factors } => {
                let mut v = 1.0;
                for w in factors {
                    v *= w.raw(x)?;
                }
                v
            }
            Weight::Quotient { num, den } => num.raw(x)? / den.raw(x)?,
            Weight::SplitQuotient { num, den } => {
                if !x.len().is_multiple_of(2) {
                    return Err(invalid("point", "split quotient needs an even dimension"));
                }
                let (j, k) = x.split_at(x.len() / 2);
                num.raw(j)? / den.raw(k)?
            }
        })
    }
}

/// Weight on pairs of lattice points `(row, col)`.
pub trait PairWeight: Sync {
    fn eval_pair(&self, row: &[f64], col: &[f64]) -> Result<f64>;
}

/// A [`Weight`] on `ℝ^{2d}` is a pair weight through concatenation.
impl PairWeight for Weight {
    fn eval_pair(&self, row: &[f64], col: &[f64]) -> Result<f64> {
        if self.is_unit() {
            return Ok(1.0);
        }
        let mut x = Vec::with_capacity(row.len() + col.len());
        x.extend_from_slice(row);
        x.extend_from_slice(col);
        self.eval(&x)
    }
}

/// Pair weight given by a closure.
pub struct PairFn<F>(pub F);

impl<F: Fn(&[f64], &[f64]) -> f64 + Sync> PairWeight for PairFn<F> {
    fn eval_pair(&self, row: &[f64], col: &[f64]) -> Result<f64> {
        let v = (self.0)(row, col);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            let mut point = row.to_vec();
            point.extend_from_slice(col);
            Err(Error::WeightNotPositive { point, value: v })
        }
    }
}

/// `(j, k) ↦ w(k, j)`.
pub struct Transposed<'a, W: ?Sized>(pub &'a W);

impl<W: PairWeight + ?Sized> PairWeight for Transposed<'_, W> {
    fn eval_pair(&self, row: &[f64], col: &[f64]) -> Result<f64> {
        self.0.eval_pair(col, row)
    }
}

/// Outcome of a moderateness check over a finite sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModerateReport {
    /// `max ω(x+y) / (ω(x) v(y))` over the sample.
    pub max_ratio: f64,
    pub witness_x: Vec<f64>,
    pub witness_y: Vec<f64>,
    pub constant: f64,
    pub pass: bool,
}

/// Measures the best constant `C` in `ω(x+y) <= C ω(x) v(y)` over all pairs of sample points.
pub fn check_moderate(
    omega: &Weight,
    v: &Weight,
    sample: &[Vec<f64>],
    constant: f64,
) -> Result<ModerateReport> {
    let mut best = (0.0f64, Vec::new(), Vec::new());
    for x in sample {
        let wx = omega.eval(x)?;
        for y in sample {
            if y.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    context: "moderateness sample",
                    expected: x.len(),
                    found: y.len(),
                });
            }
            let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let r = omega.eval(&s)? / (wx * v.eval(y)?);
            if r > best.0 {
                best = (r, x.clone(), y.clone());
            }
        }
    }
    Ok(ModerateReport {
        max_ratio: best.0,
        witness_x: best.1,
        witness_y: best.2,
        constant,
        pass: best.0 <= constant * (1.0 + 1e-12),
    })
}

/// Grid of points `{-r, -r+h, …, r}^d`.
pub fn sample_box(d: usize, radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let n = per_axis.max(2);
    let axis: Vec<f64> = (0..n)
        .map(|i| -radius + 2.0 * radius * i as f64 / (n - 1) as f64)
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// The weight conditions relating the three weights of a matrix factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCondition {
    /// `ω₁(j,j) ω₂(j,k) <= ω₀(j,k)`.
    LeftDiagonal,
    /// `ω₁(j,k) ω₂(k,k) <= ω₀(j,k)`.
    RightDiagonal,
    /// `ω₁(j,m) ω₂(m,k) <= ω₀(j,k)` for every `m`.
    Composition,
    /// `ω₂(j) / ω₁(k) <= ω₀(j,k)` with `ω₁, ω₂` weights on `ℝ^d`.
    Lifted,
}

impl PairCondition {
    pub fn name(self) -> &'static str {
        match self {
            PairCondition::LeftDiagonal => "left-diagonal",
            PairCondition::RightDiagonal => "right-diagonal",
            PairCondition::Composition => "composition",
            PairCondition::Lifted => "lifted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub kind: PairCondition,
    /// Largest `lhs / ω₀` found.
    pub worst_ratio: f64,
    /// Concatenated lattice points where the worst ratio occurs.
    pub witness: Vec<f64>,
    pub pass: bool,
}

/// Checks one of the pair weight conditions on every point of a finite lattice.
pub fn check_pair_weight_condition(
    kind: PairCondition,
    w0: &Weight,
    w1: &Weight,
    w2: &Weight,
    lattice: &Lattice,
) -> Result<ConditionReport> {
    let pts = lattice.points();
    let mut worst = 0.0f64;
    let mut witness = Vec::new();
    let mut note = |r: f64, w: &[&[f64]]| {
        if r > worst {
            worst = r;
            witness = w.concat();
        }
    };
    for j in &pts {
        for k in &pts {
            let rhs = w0.eval_pair(j, k)?;
            match kind {
                PairCondition::LeftDiagonal => {
                    let l = w1.eval_pair(j, j)? * w2.eval_pair(j, k)?;
                    note(l / rhs, &[j, k]);
                }
                PairCondition::RightDiagonal => {
                    let l = w1.eval_pair(j, k)? * w2.eval_pair(k, k)?;
                    note(l / rhs, &[j, k]);
                }
                PairCondition::Composition => {
                    for m in &pts {
                        let l = w1.eval_pair(j, m)? * w2.eval_pair(m, k)?;
                        note(l / rhs, &[j, m, k]);
                    }
                }
                PairCondition::Lifted => {
                    let l = w2.eval(j)? / w1.eval(k)?;
                    note(l / rhs, &[j, k]);
                }
            }
        }
    }
    Ok(ConditionReport {
        kind,
        worst_ratio: worst,
        witness,
        pass: worst <= 1.0 + 1e-12,
    })
}
