use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::gabor::{gaussian_atom, grid_spacing, CyclicGridFunction};
use crate::matrix_bank::LatticeMatrix;
use crate::mixed_norms::SequenceArray;
use crate::psido::Symbol;
use crate::weights_lattices::Lattice;

/// Seed of instance `index` of `stream` under the master seed.
pub fn derive_seed(master: u64, stream: &str, index: usize) -> u64 {
    let h = Sha256::digest(format!("{master}:{stream}:{index}").as_bytes());
    u64::from_le_bytes(h[..8].try_into().expect("8 bytes"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with i.i.d. standard normal parts, scaled by `1/√2`.
pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, lattice: Lattice) -> LatticeMatrix {
    let n = lattice.len();
    let m = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    LatticeMatrix::new(lattice, m).expect("square")
}

pub fn gaussian_sequence(rng: &mut ChaCha8Rng, lattice: Lattice) -> SequenceArray {
    let v = (0..lattice.len()).map(|_| complex_normal(rng)).collect();
    SequenceArray::new(lattice, v).expect("sized to lattice")
}

pub fn gaussian_function(rng: &mut ChaCha8Rng, n: usize) -> CyclicGridFunction {
    CyclicGridFunction::new((0..n).map(|_| complex_normal(rng)).collect()).expect("nonempty")
}

/// Gaussian atom in continuum coordinates; sampled identically on every grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub center: f64,
    pub freq: f64,
    pub width: f64,
}

impl Atom {
    /// Center and frequency in `[-spread, spread]`, width in `[0.7, 1.3]`.
    pub fn random(rng: &mut ChaCha8Rng, spread: f64) -> Self {
        Atom {
            center: spread * (2.0 * rng.random::<f64>() - 1.0),
            freq: spread * (2.0 * rng.random::<f64>() - 1.0),
            width: 0.7 + 0.6 * rng.random::<f64>(),
        }
    }

    pub fn sample(&self, n: usize) -> Result<CyclicGridFunction> {
        gaussian_atom(n, self.center, self.freq, self.width)
    }
}

/// `Σ c_k g_k(x) h_k(ξ)`: a superposition of tensor atoms in phase space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSymbol {
    pub terms: Vec<(f64, f64, Atom, Atom)>,
}

impl AtomSymbol {
    /// `terms` atoms with summable random coefficients.
    pub fn random(rng: &mut ChaCha8Rng, terms: usize, spread: f64) -> Self {
        let terms = (0..terms)
            .map(|k| {
                let scale = 1.0 / (1.0 + k as f64);
                let c = complex_normal(rng) * scale;
                (c.re, c.im, Atom::random(rng, spread), Atom::random(rng, spread))
            })
            .collect();
        AtomSymbol { terms }
    }

    pub fn sample(&self, n: usize) -> Result<Symbol> {
        let mut a = Symbol::zeros(n);
        for (re, im, gx, gxi) in &self.terms {
            let (u, v) = (gx.sample(n)?, gxi.sample(n)?);
            let c = Complex64::new(*re, *im);
            let s = Symbol::from_fn(n, |x, xi| c * u.values()[x] * v.values()[xi]);
            a = a.add(&s)?;
        }
        Ok(a)
    }
}

/// Spread of atom parameters that keeps atoms inside the grid `N`.
pub fn safe_spread(n: usize) -> f64 {
    (0.15 * n as f64 * grid_spacing(n)).min(2.0)
}
