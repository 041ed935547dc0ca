use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Finite box `{lo..=hi}` of a diagonal lattice `θ_1ℤ × … × θ_dℤ`.
///
/// Points are enumerated row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    theta: Vec<f64>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Lattice {
    pub fn new(theta: Vec<f64>, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        let d = theta.len();
        if d == 0 {
            return Err(invalid("theta", "lattice needs at least one axis"));
        }
        for (name, len) in [("lo", lo.len()), ("hi", hi.len())] {
            if len != d {
                return Err(Error::DimensionMismatch {
                    context: name_ctx(name),
                    expected: d,
                    found: len,
                });
            }
        }
        if theta.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(invalid("theta", format!("{theta:?} must be positive")));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(invalid("box", format!("lo {lo:?} exceeds hi {hi:?}")));
        }
        Ok(Lattice { theta, lo, hi })
    }

    /// Box `{0..n_i-1}` with unit spacing.
    pub fn counting(shape: &[usize]) -> Result<Self> {
        Lattice::new(
            vec![1.0; shape.len()],
            vec![0; shape.len()],
            shape.iter().map(|&n| n as i64 - 1).collect(),
        )
    }

    /// Box of `n_i` points centered at the origin: `{-⌊n/2⌋ ..= n-1-⌊n/2⌋}`.
    pub fn centered(theta: Vec<f64>, shape: &[usize]) -> Result<Self> {
        let lo: Vec<i64> = shape.iter().map(|&n| -((n / 2) as i64)).collect();
        let hi = shape
            .iter()
            .zip(&lo)
            .map(|(&n, &l)| l + n as i64 - 1)
            .collect();
        Lattice::new(theta, lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as usize)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integer coordinates of the point with flat index `idx`.
    pub fn multi_index(&self, mut idx: usize) -> Vec<i64> {
        let shape = self.shape();
        let mut out = vec![0i64; shape.len()];
        for ax in (0..shape.len()).rev() {
            out[ax] = self.lo[ax] + (idx % shape[ax]) as i64;
            idx /= shape[ax];
        }
        out
    }

    pub fn flat_index(&self, m: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ax in 0..self.dim() {
            if m[ax] < self.lo[ax] || m[ax] > self.hi[ax] {
                return None;
            }
            let n = (self.hi[ax] - self.lo[ax] + 1) as usize;
            idx = idx * n + (m[ax] - self.lo[ax]) as usize;
        }
        Some(idx)
    }

    /// Coordinates `θ ⊙ m` of the point with flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .zip(&self.theta)
            .map(|(&m, &t)| m as f64 * t)
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn same_spacing(&self, other: &Lattice) -> bool {
        self.theta == other.theta
    }
}

fn name_ctx(name: &str) -> &'static str {
    if name == "lo" {
        "lattice lower corner"
    } else {
        "lattice upper corner"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_roundtrip() {
        let l = Lattice::new(vec![0.5, 2.0], vec![-1, 3], vec![1, 6]).unwrap();
        assert_eq!(l.shape(), vec![3, 4]);
        for i in 0..l.len() {
            assert_eq!(l.flat_index(&l.multi_index(i)), Some(i));
        }
        assert_eq!(l.point(0), vec![-0.5, 6.0]);
        assert_eq!(l.point(l.len() - 1), vec![0.5, 12.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Lattice::new(vec![0.0], vec![0], vec![1]).is_err());
        assert!(Lattice::new(vec![1.0], vec![2], vec![1]).is_err());
        assert!(Lattice::new(vec![1.0, 1.0], vec![0], vec![1, 1]).is_err());
    }

    #[test]
    fn centered_box() {
        let l = Lattice::centered(vec![1.0], &[5]).unwrap();
        assert_eq!((l.lo()[0], l.hi()[0]), (-2, 2));
        let l = Lattice::centered(vec![1.0], &[4]).unwrap();
        assert_eq!((l.lo()[0], l.hi()[0]), (-2, 1));
    }
}
