//! Mixed quasi-norms on finite lattices and uniform grids.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::weights_lattices::{Exponent, Lattice, MixedExponent, Weight};

/// Sum with pairwise splitting so the result does not depend on scheduling.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// `(Σ |v|^p · step)^{1/p}`, or `max |v|` for `p = ∞`.
///
/// Values are scaled by their maximum first, so tiny and huge entries neither
/// underflow nor overflow for any `p`.
pub fn lp_norm(values: &[f64], p: Exponent, step: f64) -> f64 {
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match p {
        Exponent::Infinity => m,
        Exponent::Finite(p) => {
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            let scaled: Vec<f64> = values.iter().map(|v| (v.abs() / m).powf(p)).collect();
            m * (pairwise_sum(&scaled) * step).powf(1.0 / p)
        }
    }
}

/// Reduces one axis of a row-major array with the `ℓ^p` quasi-norm.
pub fn reduce_axis(data: &[f64], shape: &[usize], axis: usize, p: Exponent, step: f64) -> (Vec<f64>, Vec<usize>) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = Vec::with_capacity(outer * inner);
    let mut line = vec![0.0; n];
    for o in 0..outer {
        for i in 0..inner {
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[(o * n + k) * inner + i];
            }
            out.push(lp_norm(&line, p, step));
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape.remove(axis);
    (out, new_shape)
}

/// Nested reduction of nonnegative data: `e.order[k]` is reduced with `e.p[k]`.
pub fn mixed_norm_abs(data: &[f64], shape: &[usize], e: &MixedExponent, steps: &[f64]) -> Result<f64> {
    if e.dim() != shape.len() {
        return Err(Error::DimensionMismatch {
            context: "mixed exponent",
            expected: shape.len(),
            found: e.dim(),
        });
    }
    if data.len() != shape.iter().product::<usize>() {
        return Err(Error::DimensionMismatch {
            context: "array size",
            expected: shape.iter().product(),
            found: data.len(),
        });
    }
    let mut cur = data.to_vec();
    let mut cur_shape = shape.to_vec();
    // Original axis ids still present in `cur`, in storage order.
    let mut alive: Vec<usize> = (0..shape.len()).collect();
    for (k, &ax) in e.order.iter().enumerate() {
        let pos = alive.iter().position(|&a| a == ax).expect("permutation");
        let (next, next_shape) = reduce_axis(&cur, &cur_shape, pos, e.p[k], steps[ax]);
        cur = next;
        cur_shape = next_shape;
        alive.remove(pos);
    }
    Ok(cur[0])
}

/// Complex values on the points of a finite lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceArray {
    pub lattice: Lattice,
    pub values: Vec<Complex64>,
}

impl SequenceArray {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::DimensionMismatch {
                context: "sequence values",
                expected: lattice.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "entries must be finite"));
        }
        Ok(SequenceArray { lattice, values })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        let n = lattice.len();
        SequenceArray {
            lattice,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn delta(lattice: Lattice, at: &[i64]) -> Result<Self> {
        let idx = lattice
            .flat_index(at)
            .ok_or_else(|| invalid("at", format!("{at:?} is outside the lattice box")))?;
        let mut s = SequenceArray::zeros(lattice);
        s.values[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }
}

/// Complex samples of a function on a uniform grid.
///
/// Sample `k` along axis `i` sits at `origin[i] + k·step[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub n: Vec<usize>,
    pub step: Vec<f64>,
    pub origin: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(n: Vec<usize>, step: Vec<f64>, origin: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if step.len() != n.len() || origin.len() != n.len() {
            return Err(Error::DimensionMismatch {
                context: "grid axes",
                expected: n.len(),
                found: step.len().min(origin.len()),
            });
        }
        if step.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(invalid("step", "grid spacing must be positive"));
        }
        let total: usize = n.iter().product();
        if values.len() != total {
            return Err(Error::DimensionMismatch {
                context: "grid values",
                expected: total,
                found: values.len(),
            });
        }
        Ok(GridFunction { n, step, origin, values })
    }

    /// Midpoint samples of `f` on the box `[lo, hi]`.
    pub fn sample_box(lo: &[f64], hi: &[f64], n: &[usize], f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let step: Vec<f64> = (0..n.len()).map(|i| (hi[i] - lo[i]) / n[i] as f64).collect();
        let origin: Vec<f64> = (0..n.len()).map(|i| lo[i] + 0.5 * step[i]).collect();
        let total: usize = n.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut x = vec![0.0; n.len()];
        for idx in 0..total {
            let mut r = idx;
            for ax in (0..n.len()).rev() {
                x[ax] = origin[ax] + (r % n[ax]) as f64 * step[ax];
                r /= n[ax];
            }
            values.push(f(&x));
        }
        GridFunction::new(n.to_vec(), step, origin, values)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.n.len()];
        for ax in (0..self.n.len()).rev() {
            x[ax] = self.origin[ax] + (idx % self.n[ax]) as f64 * self.step[ax];
            idx /= self.n[ax];
        }
        x
    }
}

/// `‖f‖_{ℓ^𝒑_{σ,(ω)}}` with counting measure.
pub fn mixed_seq_norm(f: &SequenceArray, e: &MixedExponent, w: &Weight) -> Result<f64> {
    let l = &f.lattice;
    if e.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            context: "mixed exponent",
            expected: l.dim(),
            found: e.dim(),
        });
    }
    let unit = w.is_unit();
    let data = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| Ok(if unit { v.norm() } else { v.norm() * w.eval(&l.point(i))? }))
        .collect::<Result<Vec<f64>>>()?;
    mixed_norm_abs(&data, &l.shape(), e, &vec![1.0; l.dim()])
}

/// Riemann-sum analogue of [`mixed_seq_norm`] for grid samples.
pub fn mixed_grid_norm(f: &GridFunction, e: &MixedExponent, w: &Weight) -> Result<f64> {
    if e.dim() != f.n.len() {
        return Err(Error::DimensionMismatch {
            context: "mixed exponent",
            expected: f.n.len(),
            found: e.dim(),
        });
    }
    let unit = w.is_unit();
    let data = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| Ok(if unit { v.norm() } else { v.norm() * w.eval(&f.coords(i))? }))
        .collect::<Result<Vec<f64>>>()?;
    mixed_norm_abs(&data, &f.n, e, &f.step)
}

/// `(h*c)(j) = Σ_k h(k) c(j-k)` on the sum box.
pub fn convolve(h: &SequenceArray, c: &SequenceArray) -> Result<SequenceArray> {
    let (lh, lc) = (&h.lattice, &c.lattice);
    if lh.dim() != lc.dim() || !lh.same_spacing(lc) {
        return Err(invalid("lattice", "convolution needs identical spacing"));
    }
    let lo: Vec<i64> = lh.lo().iter().zip(lc.lo()).map(|(a, b)| a + b).collect();
    let hi: Vec<i64> = lh.hi().iter().zip(lc.hi()).map(|(a, b)| a + b).collect();
    let out_l = Lattice::new(lh.theta().to_vec(), lo, hi)?;
    let mut out = SequenceArray::zeros(out_l);
    for (i, hv) in h.values.iter().enumerate() {
        if *hv == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mi = lh.multi_index(i);
        for (k, cv) in c.values.iter().enumerate() {
            let mk = lc.multi_index(k);
            let s: Vec<i64> = mi.iter().zip(&mk).map(|(a, b)| a + b).collect();
            let idx = out.lattice.flat_index(&s).expect("inside sum box");
            out.values[idx] += hv * cv;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, rel_tol: f64) -> Self {
        InequalityReport {
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + rel_tol),
        }
    }

    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// `‖h*c‖_{ℓ^𝒑} <= ‖h‖_{ℓ^q} ‖c‖_{ℓ^𝒑}` for `q <= min(1, 𝒑)`.
pub fn check_young_quasi(h: &SequenceArray, c: &SequenceArray, p: &MixedExponent, q: Exponent) -> Result<InequalityReport> {
    if q.recip() < 1.0 {
        return Err(invalid("q", format!("quasi Young needs q <= 1, got {q}; use check_young")));
    }
    if q.recip() < p.min().recip() {
        return Err(invalid("q", format!("need q <= min(p), got q={q}, min(p)={}", p.min())));
    }
    let unit = Weight::unit();
    let conv = convolve(h, c)?;
    let lhs = mixed_seq_norm(&conv, p, &unit)?;
    let hq = mixed_seq_norm(h, &MixedExponent::uniform(q, h.lattice.dim())?, &unit)?;
    let rhs = hq * mixed_seq_norm(c, p, &unit)?;
    Ok(InequalityReport::new(lhs, rhs, 1e-12))
}

/// Classical Young: `‖h*c‖_{ℓ^p} <= ‖h‖_{ℓ^r} ‖c‖_{ℓ^s}` with `1 + 1/p = 1/r + 1/s`, `r, s >= 1`.
pub fn check_young(h: &SequenceArray, c: &SequenceArray, r: Exponent, s: Exponent) -> Result<InequalityReport> {
    if r.recip() > 1.0 || s.recip() > 1.0 {
        return Err(invalid("r, s", "classical Young needs r, s >= 1"));
    }
    let pr = r.recip() + s.recip() - 1.0;
    if pr < -1e-15 {
        return Err(invalid("r, s", "1/r + 1/s must be at least 1"));
    }
    let p = Exponent::from_recip(pr.max(0.0))?;
    let d = h.lattice.dim();
    let unit = Weight::unit();
    let lhs = mixed_seq_norm(&convolve(h, c)?, &MixedExponent::uniform(p, d)?, &unit)?;
    let rhs = mixed_seq_norm(h, &MixedExponent::uniform(r, d)?, &unit)?
        * mixed_seq_norm(c, &MixedExponent::uniform(s, d)?, &unit)?;
    Ok(InequalityReport::new(lhs, rhs, 1e-12))
}
