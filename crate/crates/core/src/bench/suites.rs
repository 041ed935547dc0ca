use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::instances::{
    derive_seed, gaussian_function, gaussian_matrix, gaussian_sequence, rng, safe_spread, Atom, AtomSymbol,
};
use super::report::{Case, CaseError, Measurement, Record, Report};
use crate::error::{Error, Result};
use crate::gabor::{
    check_stft_window_bound, frame_operator, gaussian, reconstruct, CyclicGridFunction, GaborSystem, Sampling,
};
use crate::matrix_bank::{check_continuity, factorize_left_diagonal, factorize_right_diagonal};
use crate::psido::{
    calculus_transform, check_factorization_identity, check_op_continuity, check_op_schatten,
    check_wigner_convolution, check_wigner_modulation_bound, gabor_matrix, op0, op_t, apply_operator, symplectic_ft,
    wigner_t, PhaseSpaceSystem, Symbol, WignerExponents,
};
use crate::schatten::{probe_schatten_embedding, verify_schatten_embedding};
use crate::weights_lattices::{Exponent, Lattice, MixedExponent, Weight};

fn exp(p: f64) -> Exponent {
    Exponent::new(p).expect("valid exponent")
}

fn case<P: Serialize>(suite: &str, kind: &str, seed: u64, params: &P) -> Case {
    Case {
        suite: suite.into(),
        kind: kind.into(),
        seed,
        params: serde_json::to_value(params).expect("params serialize"),
    }
}

fn params<P: DeserializeOwned>(case: &Case) -> Result<P> {
    serde_json::from_value(case.params.clone()).map_err(|e| Error::Parse(format!("case `{}`: {e}", case.kind)))
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.norm()))
}

/// `ω(j,k) = ⟨j⟩^a ⟨k⟩^b`, coordinatewise, on `ℝ^d × ℝ^d`.
fn pair_tensor(d: usize, a: f64, b: f64) -> Weight {
    let mut axes = vec![Weight::poly(a); d];
    axes.extend(vec![Weight::poly(b); d]);
    Weight::tensor(axes)
}

/// `⟨x⟩^s ⟨ξ⟩^s` on phase space.
fn phase_weight(s: f64) -> Weight {
    if s == 0.0 {
        Weight::unit()
    } else {
        Weight::tensor(vec![Weight::poly(s), Weight::poly(s)])
    }
}

/// Symbol weight matching [`phase_weight`]: `⟨ζ₁⟩^{|s|} ⟨ζ₂⟩^{|s|}` on the dual variables.
fn symbol_weight(s: f64) -> Weight {
    if s == 0.0 {
        Weight::unit()
    } else {
        let a = s.abs();
        Weight::tensor(vec![Weight::unit(), Weight::unit(), Weight::poly(a), Weight::poly(a)])
    }
}

/// Gaussian with unit `L²` norm in continuum units.
fn reference_window(n: usize) -> Result<CyclicGridFunction> {
    Ok(Sampling::continuum(n).normalize(&gaussian(n, 1.0)?))
}

// ---------------------------------------------------------------- factorization

#[derive(Serialize, Deserialize)]
struct SplitParams {
    shape: Vec<usize>,
    p0: Exponent,
    p1: Exponent,
    p2: Exponent,
    left: bool,
    /// `(s, t, u)` for polynomial weights, absent for trivial ones.
    weights: Option<(f64, f64, f64)>,
    tol_product: f64,
    tol_norm_law: f64,
    slack: f64,
}

fn random_shape(r: &mut ChaCha8Rng, max_n: usize) -> Vec<usize> {
    if r.random::<bool>() {
        vec![r.random_range(2..=max_n)]
    } else {
        let rows = r.random_range(2..=(max_n / 2).max(2));
        let cols = r.random_range(1..=(max_n / rows).max(1));
        vec![rows, cols]
    }
}

fn build_factorization(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "factorization";
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    (0..cfg.trials.factorization)
        .map(|i| {
            let p0v = [0.5, 1.0, 1.5][i % 3];
            let u = 0.1 + 0.8 * r.random::<f64>();
            let weights = if i % 2 == 0 {
                None
            } else {
                Some((2.0 * r.random::<f64>() - 1.0, 2.0 * r.random::<f64>() - 1.0, 2.0 * r.random::<f64>() - 1.0))
            };
            let p = SplitParams {
                shape: random_shape(&mut r, cfg.sizes.factorization_max_n),
                p0: exp(p0v),
                p1: Exponent::from_recip(u / p0v).expect("positive"),
                p2: Exponent::from_recip((1.0 - u) / p0v).expect("positive"),
                left: r.random::<bool>(),
                weights,
                tol_product: cfg.tolerances.factorization_product,
                tol_norm_law: cfg.tolerances.norm_law,
                slack: cfg.tolerances.multcont_slack,
            };
            case(suite, "split", derive_seed(cfg.seed, suite, i), &p)
        })
        .collect()
}

fn eval_split(c: &Case) -> Result<Vec<Measurement>> {
    let p: SplitParams = params(c)?;
    let lattice = Lattice::counting(&p.shape)?;
    let d = lattice.dim();
    let a0 = gaussian_matrix(&mut rng(c.seed), lattice);
    let (w0, w1, w2) = match p.weights {
        None => (Weight::unit(), Weight::unit(), Weight::unit()),
        Some((s, t, u)) => {
            let w0 = pair_tensor(d, s, t);
            let diag_neutral = pair_tensor(d, u, -u);
            if p.left {
                (w0.clone(), diag_neutral, w0)
            } else {
                (w0.clone(), w0, diag_neutral)
            }
        }
    };
    let f = if p.left {
        factorize_left_diagonal(&a0, p.p0, p.p1, p.p2, &w0, &w1, &w2)?
    } else {
        factorize_right_diagonal(&a0, p.p0, p.p1, p.p2, &w0, &w1, &w2)?
    };
    let prod = f.a1.mul(&f.a2)?;
    let err = rel(max_abs(&(&prod.entries - &a0.entries)), a0.max_abs());
    // The diagonal factor carries the norm law.
    let (diag_norm, pd) = if p.left { (f.norm_a1, p.p1) } else { (f.norm_a2, p.p2) };
    let expect = f.norm_a0.powf(p.p0.value() * pd.recip());
    Ok(vec![
        Measurement::small("factorization-product", "max|A1 A2 - A0| / max|A0| <= tol", err, p.tol_product),
        Measurement::small(
            "factorization-norm-law",
            "|‖D‖_U^pd - ‖A0‖_U^p0^(p0/pd)| / ‖A0‖^(p0/pd) <= tol",
            rel((diag_norm - expect).abs(), expect),
            p.tol_norm_law,
        ),
        Measurement::le(
            "factorization-multcont",
            "‖A1‖_U^p1 ‖A2‖_U^p2 <= ‖A0‖_U^p0",
            f.norm_a1 * f.norm_a2,
            f.norm_a0,
            p.slack,
        ),
    ])
}

// ---------------------------------------------------------------- matrix-schatten

#[derive(Serialize, Deserialize)]
struct EmbeddingParams {
    shape: Vec<usize>,
    p: Exponent,
    w1: Weight,
    w2: Weight,
    /// Rank-one all-ones matrix instead of a Gaussian one.
    ones: bool,
    tol: f64,
}

fn random_weight(r: &mut ChaCha8Rng) -> Weight {
    match r.random_range(0..3) {
        0 => Weight::unit(),
        1 => Weight::poly(2.0 * r.random::<f64>() - 1.0),
        _ => Weight::Exponential {
            r: 0.1 * (2.0 * r.random::<f64>() - 1.0),
        },
    }
}

fn build_matrix_schatten(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "matrix-schatten";
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let max_n = cfg.sizes.embedding_max_n;
    let mut out = Vec::new();
    let mut idx = 0;
    let mut push = |kind: &str, p: EmbeddingParams, out: &mut Vec<Case>| {
        out.push(case(suite, kind, derive_seed(cfg.seed, suite, idx), &p));
        idx += 1;
    };
    for _ in 0..cfg.trials.hilbert_schmidt {
        let p = EmbeddingParams {
            shape: random_shape(&mut r, max_n),
            p: Exponent::TWO,
            w1: random_weight(&mut r),
            w2: random_weight(&mut r),
            ones: false,
            tol: cfg.tolerances.hilbert_schmidt,
        };
        push("hilbert-schmidt", p, &mut out);
    }
    for pv in [0.5, 2.0 / 3.0, 1.0, 1.5, 2.0] {
        for _ in 0..cfg.trials.embedding {
            let p = EmbeddingParams {
                shape: random_shape(&mut r, max_n),
                p: exp(pv),
                w1: random_weight(&mut r),
                w2: random_weight(&mut r),
                ones: false,
                tol: cfg.tolerances.embedding_slack,
            };
            push("embedding", p, &mut out);
        }
    }
    for pv in [3.0, 4.0] {
        for i in 0..cfg.trials.embedding_probe {
            let p = EmbeddingParams {
                shape: random_shape(&mut r, max_n),
                p: exp(pv),
                w1: Weight::unit(),
                w2: Weight::unit(),
                ones: i % 2 == 0,
                tol: 0.0,
            };
            push("embedding-probe", p, &mut out);
        }
    }
    out
}

fn eval_embedding(c: &Case) -> Result<Vec<Measurement>> {
    let p: EmbeddingParams = params(c)?;
    let lattice = Lattice::counting(&p.shape)?;
    let a = if p.ones {
        crate::matrix_bank::LatticeMatrix::from_fn(lattice, |_, _| Complex64::new(1.0, 0.0))?
    } else {
        gaussian_matrix(&mut rng(c.seed), lattice)
    };
    Ok(match c.kind.as_str() {
        "hilbert-schmidt" => {
            let e = verify_schatten_embedding(&a, Exponent::TWO, &p.w1, &p.w2)?;
            vec![Measurement::small(
                "hilbert-schmidt",
                "|‖A‖_I2 - ‖A‖_U2(ω0)| / ‖A‖_U2(ω0) <= tol",
                rel((e.i_p - e.u_p).abs(), e.u_p),
                p.tol,
            )]
        }
        "embedding" => {
            let e = verify_schatten_embedding(&a, p.p, &p.w1, &p.w2)?;
            vec![Measurement::le("schatten-embedding", "‖A‖_Ip <= ‖A‖_Up(ω0)", e.i_p, e.u_p, p.tol)]
        }
        _ => {
            let e = probe_schatten_embedding(&a, p.p, &p.w1, &p.w2)?;
            vec![Measurement::info("schatten-probe", "‖A‖_Ip vs ‖A‖_Up for p > 2", e.i_p, e.u_p)]
        }
    })
}

// ---------------------------------------------------------------- matrix-continuity

#[derive(Clone, Serialize, Deserialize)]
struct ContinuityTuple {
    p1: MixedExponent,
    p2: MixedExponent,
    p: Exponent,
    q: Exponent,
}

/// Exponent tuples satisfying the continuity relations on a two-axis lattice.
fn continuity_tuples() -> Vec<ContinuityTuple> {
    let inf = Exponent::Infinity;
    let t = |p1: [Exponent; 2], p2: [Exponent; 2], order: [usize; 2], p: Exponent, q: Exponent| ContinuityTuple {
        p1: MixedExponent::new(p1.to_vec(), order.to_vec()).expect("valid"),
        p2: MixedExponent::new(p2.to_vec(), order.to_vec()).expect("valid"),
        p,
        q,
    };
    let (half, one, two) = (exp(0.5), exp(1.0), exp(2.0));
    vec![
        t([two, two], [two, two], [0, 1], inf, one),
        t([one, exp(3.0)], [one, exp(3.0)], [1, 0], inf, one),
        t([inf, inf], [inf, inf], [0, 1], inf, one),
        t([inf, inf], [one, one], [0, 1], one, one),
        t([inf, inf], [two, two], [0, 1], two, one),
        t([two, two], [one, one], [0, 1], two, one),
        t([one, one], [two, two], [0, 1], inf, two),
        t([two, two], [inf, inf], [0, 1], inf, two),
        t([exp(4.0 / 3.0), exp(4.0 / 3.0)], [two, two], [0, 1], exp(4.0), two),
        t([inf, inf], [half, half], [0, 1], half, half),
        t([exp(3.0), exp(3.0)], [one, one], [0, 1], exp(1.5), half),
        t([half, two], [half, two], [1, 0], inf, half),
        t([one, one], [exp(1.5), exp(1.5)], [0, 1], inf, exp(1.5)),
    ]
}

#[derive(Serialize, Deserialize)]
struct ContinuityParams {
    shape: Vec<usize>,
    tuple: ContinuityTuple,
    /// 0 trivial, 1 weight on the output, 2 weight on the input.
    variant: u8,
    s: f64,
    vectors: usize,
    slack: f64,
}

fn build_matrix_continuity(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "matrix-continuity";
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let mut out = Vec::new();
    for tuple in continuity_tuples() {
        for i in 0..cfg.trials.continuity_matrices {
            let p = ContinuityParams {
                shape: vec![5, 4],
                tuple: tuple.clone(),
                variant: (i % 3) as u8,
                s: 0.25 + r.random::<f64>(),
                vectors: cfg.trials.continuity_vectors,
                slack: cfg.tolerances.continuity_slack,
            };
            out.push(case(suite, "continuity", derive_seed(cfg.seed, suite, out.len()), &p));
        }
    }
    out
}

fn eval_continuity(c: &Case) -> Result<Vec<Measurement>> {
    let p: ContinuityParams = params(c)?;
    let lattice = Lattice::counting(&p.shape)?;
    let mut r = rng(c.seed);
    let a = gaussian_matrix(&mut r, lattice.clone());
    let fs: Vec<_> = (0..p.vectors).map(|_| gaussian_sequence(&mut r, lattice.clone())).collect();
    let u = Weight::unit();
    let ws = |a: f64| Weight::tensor(vec![Weight::poly(a), Weight::poly(a)]);
    let (w0, w1, w2) = match p.variant {
        0 => (u.clone(), u.clone(), u),
        1 => (pair_tensor(2, p.s, 0.0), u, ws(p.s)),
        _ => (pair_tensor(2, 0.0, p.s), ws(-p.s), u),
    };
    let t = &p.tuple;
    let rep = check_continuity(&a, &t.p1, &t.p2, t.p, t.q, &w0, &w1, &w2, &fs)?;
    Ok(rep
        .ratios
        .iter()
        .map(|&ratio| {
            Measurement::le(
                "matrix-continuity",
                "‖Af‖_l^p2(ω2) <= ‖A‖_U^{p,q}(ω0) ‖f‖_l^p1(ω1)",
                ratio,
                1.0,
                p.slack,
            )
        })
        .collect())
}

// ---------------------------------------------------------------- gabor-reconstruction

#[derive(Serialize, Deserialize)]
struct GaborParams {
    n: usize,
    a: usize,
    b: usize,
    tol: f64,
}

fn build_gabor(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "gabor-reconstruction";
    let mut out = Vec::new();
    for &n in &cfg.sizes.gabor_n {
        for &s in &cfg.sizes.gabor_steps {
            // Critical sampling `ab = N` is excluded.
            if n % s != 0 || s * s >= n {
                continue;
            }
            for _ in 0..cfg.trials.reconstruction {
                let p = GaborParams {
                    n,
                    a: s,
                    b: s,
                    tol: cfg.tolerances.reconstruction,
                };
                out.push(case(suite, "reconstruction", derive_seed(cfg.seed, suite, out.len()), &p));
            }
            let p = GaborParams {
                n,
                a: s,
                b: s,
                tol: cfg.tolerances.commutation,
            };
            out.push(case(suite, "commutation", derive_seed(cfg.seed, suite, out.len()), &p));
        }
    }
    out
}

fn eval_gabor(c: &Case) -> Result<Vec<Measurement>> {
    let p: GaborParams = params(c)?;
    let sys = GaborSystem::new(gaussian(p.n, 1.0)?.normalized(), p.a, p.b)?;
    let f = gaussian_function(&mut rng(c.seed), p.n);
    if c.kind == "reconstruction" {
        let sys = sys.with_canonical_dual()?;
        let r = reconstruct(&sys, &f)?;
        return Ok(vec![
            Measurement::small("reconstruction-dual-synthesis", "‖D_ψ C_φ f - f‖ / ‖f‖ <= tol", r.residual_synthesis_dual, p.tol),
            Measurement::small("reconstruction-dual-analysis", "‖D_φ C_ψ f - f‖ / ‖f‖ <= tol", r.residual_analysis_dual, p.tol),
        ]);
    }
    let sf = frame_operator(&sys, &f)?;
    let (na, nb) = ((p.n / p.a) as i64, (p.n / p.b) as i64);
    let mut worst = 0.0f64;
    for (j, i) in [(1, 0), (0, 1), (3, 5), (na - 1, nb - 1)] {
        let (j, i) = (j * p.a as i64, i * p.b as i64);
        let lhs = frame_operator(&sys, &f.time_frequency_shift(&[j], &[i]))?;
        let rhs = sf.time_frequency_shift(&[j], &[i]);
        worst = worst.max(rel(lhs.sub(&rhs)?.norm(), rhs.norm()));
    }
    Ok(vec![Measurement::small(
        "frame-commutation",
        "‖S π(λ) f - π(λ) S f‖ / ‖S f‖ <= tol",
        worst,
        p.tol,
    )])
}

// ---------------------------------------------------------------- stability helpers

fn stability(
    out: &mut Vec<Measurement>,
    name: &str,
    relation: &str,
    sizes: &[usize],
    constants: &[f64],
    factor: f64,
) {
    for (&n, &c) in sizes.iter().zip(constants) {
        out.push(Measurement::info(&format!("{name}-constant"), &format!("{relation} at N={n}"), c, 1.0));
    }
    let max = constants.iter().copied().fold(0.0, f64::max);
    let min = constants.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(Measurement::within(
        &format!("{name}-stability"),
        "max_N C_N / min_N C_N <= factor",
        max,
        min,
        factor,
    ));
}

fn worst(ratios: impl IntoIterator<Item = f64>) -> f64 {
    ratios.into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------- window-bound

#[derive(Serialize, Deserialize)]
struct WindowParams {
    sizes: Vec<usize>,
    p: Exponent,
    s: f64,
    functions: Vec<Atom>,
    windows: Vec<Atom>,
    factor: f64,
}

fn build_window(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "window-bound";
    let sizes = cfg.sizes.stability_even.clone();
    let spread = safe_spread(*sizes.iter().min().expect("nonempty"));
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let functions: Vec<Atom> = (0..cfg.trials.family).map(|_| Atom::random(&mut r, spread)).collect();
    let windows: Vec<Atom> = (0..cfg.trials.family.min(3)).map(|_| Atom::random(&mut r, spread / 2.0)).collect();
    let mut out = Vec::new();
    for (p, s) in [(1.0, 0.0), (2.0, 0.0), (1.0, 1.0), (0.5, 0.0)] {
        let params = WindowParams {
            sizes: sizes.clone(),
            p: exp(p),
            s,
            functions: functions.clone(),
            windows: windows.clone(),
            factor: cfg.tolerances.stability_factor,
        };
        out.push(case(suite, "window-stability", derive_seed(cfg.seed, suite, out.len()), &params));
    }
    out
}

fn eval_window(c: &Case) -> Result<Vec<Measurement>> {
    let p: WindowParams = params(c)?;
    let w = phase_weight(p.s);
    let mut constants = Vec::new();
    for &n in &p.sizes {
        let s = Sampling::continuum(n);
        let reference = reference_window(n)?;
        let mut ratios = Vec::new();
        for f in &p.functions {
            let f = f.sample(n)?;
            for phi in &p.windows {
                let phi = phi.sample(n)?.normalized();
                ratios.push(check_stft_window_bound(&f, &phi, p.p, &w, &w, &w, &reference, s)?.ratio);
            }
        }
        constants.push(worst(ratios));
    }
    let mut out = Vec::new();
    stability(&mut out, "window-bound", "‖V_φ f‖_Lp(ω) / (‖f‖_Mp(ω1) ‖φ‖_Mp(ω2))", &p.sizes, &constants, p.factor);
    Ok(out)
}

// ---------------------------------------------------------------- op-factorization

#[derive(Serialize, Deserialize)]
struct OpFactorParams {
    n: usize,
    step: usize,
    /// Absent for the constant symbol `1`.
    symbol: Option<AtomSymbol>,
    functions: usize,
    tol: f64,
}

fn build_op_factorization(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "op-factorization";
    let (n, step) = (cfg.sizes.op_n, cfg.sizes.op_step);
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let mut out = Vec::new();
    for _ in 0..cfg.trials.op_symbols {
        let p = OpFactorParams {
            n,
            step,
            symbol: Some(AtomSymbol::random(&mut r, 4, safe_spread(n))),
            functions: cfg.trials.op_functions,
            tol: cfg.tolerances.op_factorization,
        };
        out.push(case(suite, "op-factorization", derive_seed(cfg.seed, suite, out.len()), &p));
    }
    let p = OpFactorParams {
        n,
        step,
        symbol: None,
        functions: cfg.trials.op_functions,
        tol: cfg.tolerances.op_identity,
    };
    out.push(case(suite, "op-identity", derive_seed(cfg.seed, suite, out.len()), &p));
    out
}

fn eval_op_factorization(c: &Case) -> Result<Vec<Measurement>> {
    let p: OpFactorParams = params(c)?;
    let ps = PhaseSpaceSystem::gaussian(p.n, p.step, p.step)?;
    let mut r = rng(c.seed);
    let fs: Vec<_> = (0..p.functions).map(|_| gaussian_function(&mut r, p.n)).collect();
    match &p.symbol {
        Some(sym) => {
            let rep = check_factorization_identity(&sym.sample(p.n)?, &ps, &fs)?;
            Ok(rep
                .residuals
                .iter()
                .map(|&e| Measurement::small("op-factorization", "‖Op0(a)f - D A C f‖ / ‖Op0(a)f‖ <= tol", e, p.tol))
                .collect())
        }
        None => {
            let a = gabor_matrix(&Symbol::constant(p.n, Complex64::new(1.0, 0.0)), &ps)?;
            fs.iter()
                .map(|f| {
                    let g = ps.apply_factored(&a, f)?;
                    let e = rel(g.sub(f)?.norm(), f.norm());
                    Ok(Measurement::small("op-identity", "‖D A(1) C f - f‖ / ‖f‖ <= tol", e, p.tol))
                })
                .collect()
        }
    }
}

// ---------------------------------------------------------------- op-schatten

#[derive(Serialize, Deserialize)]
struct OpSchattenParams {
    sizes: Vec<usize>,
    t: f64,
    p: Exponent,
    s: f64,
    family: Vec<AtomSymbol>,
    factor: f64,
}

#[derive(Serialize, Deserialize)]
struct BridgeParams {
    n: usize,
    tol: f64,
}

fn symbol_family(r: &mut ChaCha8Rng, count: usize, sizes: &[usize]) -> Vec<AtomSymbol> {
    let spread = safe_spread(*sizes.iter().min().expect("nonempty"));
    (0..count).map(|_| AtomSymbol::random(r, 3, spread)).collect()
}

fn build_op_schatten(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "op-schatten";
    let sizes = cfg.sizes.stability_even.clone();
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let family = symbol_family(&mut r, cfg.trials.family, &sizes);
    let mut out = Vec::new();
    for (t, p, s) in [(0.0, 1.0, 0.0), (0.5, 1.0, 0.0), (0.5, 2.0, 0.0), (0.5, 0.5, 0.0), (0.5, 1.0, 1.0)] {
        let params = OpSchattenParams {
            sizes: sizes.clone(),
            t,
            p: exp(p),
            s,
            family: family.clone(),
            factor: cfg.tolerances.stability_factor,
        };
        out.push(case(suite, "op-schatten-stability", derive_seed(cfg.seed, suite, out.len()), &params));
    }
    for i in 0..cfg.trials.identities {
        let params = BridgeParams {
            n: [32, 33][i % 2],
            tol: cfg.tolerances.hs_bridge,
        };
        out.push(case(suite, "hs-bridge", derive_seed(cfg.seed, suite, out.len()), &params));
    }
    out
}

fn random_symbol(r: &mut ChaCha8Rng, n: usize) -> Symbol {
    Symbol::new(n, (0..n * n).map(|_| super::instances::complex_normal(r)).collect()).expect("sized")
}

fn eval_op_schatten(c: &Case) -> Result<Vec<Measurement>> {
    if c.kind == "hs-bridge" {
        let p: BridgeParams = params(c)?;
        let a = random_symbol(&mut rng(c.seed), p.n);
        let hs = op0(&a).entries.norm();
        let expect = a.norm() / (p.n as f64).sqrt();
        return Ok(vec![Measurement::small(
            "hs-bridge",
            "|‖Op0(a)‖_I2 - N^(-1/2) ‖a‖_2| / ‖Op0(a)‖_I2 <= tol",
            rel((hs - expect).abs(), hs),
            p.tol,
        )]);
    }
    let p: OpSchattenParams = params(c)?;
    let (w0, w) = (symbol_weight(p.s), phase_weight(p.s));
    let mut constants = Vec::new();
    for &n in &p.sizes {
        let fam = p.family.iter().map(|a| a.sample(n)).collect::<Result<Vec<_>>>()?;
        let rep = check_op_schatten(&fam, p.t, p.p, [&w0, &w, &w], &reference_window(n)?, Sampling::continuum(n))?;
        constants.push(rep.constant.max);
    }
    let mut out = Vec::new();
    stability(&mut out, "op-schatten", "‖Op_t(a)‖_Ip(ω1,ω2) / ‖a‖_M^{p,p}(ω0)", &p.sizes, &constants, p.factor);
    Ok(out)
}

// ---------------------------------------------------------------- op-continuity

#[derive(Serialize, Deserialize)]
struct OpContinuityParams {
    sizes: Vec<usize>,
    t: f64,
    tuple: ContinuityTuple,
    s: f64,
    symbols: Vec<AtomSymbol>,
    functions: Vec<Atom>,
    factor: f64,
}

fn build_op_continuity(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "op-continuity";
    let sizes = cfg.sizes.stability_even.clone();
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let symbols = symbol_family(&mut r, cfg.trials.family, &sizes);
    let spread = safe_spread(*sizes.iter().min().expect("nonempty"));
    let functions: Vec<Atom> = (0..cfg.trials.family).map(|_| Atom::random(&mut r, spread)).collect();
    let (one, two, inf) = (exp(1.0), exp(2.0), Exponent::Infinity);
    let uni = |p: Exponent| MixedExponent::uniform(p, 2).expect("valid");
    let tuples = [
        ContinuityTuple { p1: uni(two), p2: uni(two), p: inf, q: one },
        ContinuityTuple { p1: uni(inf), p2: uni(one), p: one, q: one },
        ContinuityTuple { p1: uni(one), p2: uni(two), p: inf, q: two },
    ];
    let mut out = Vec::new();
    let push = |t: f64, tuple: &ContinuityTuple, s: f64, out: &mut Vec<Case>| {
        let params = OpContinuityParams {
            sizes: sizes.clone(),
            t,
            tuple: tuple.clone(),
            s,
            symbols: symbols.clone(),
            functions: functions.clone(),
            factor: cfg.tolerances.stability_factor,
        };
        out.push(case(suite, "op-continuity-stability", derive_seed(cfg.seed, suite, out.len()), &params));
    };
    for tuple in &tuples {
        for t in [0.0, 0.5] {
            push(t, tuple, 0.0, &mut out);
        }
    }
    push(0.5, &tuples[0], 1.0, &mut out);
    out
}

fn eval_op_continuity(c: &Case) -> Result<Vec<Measurement>> {
    let p: OpContinuityParams = params(c)?;
    let (w0, w) = (symbol_weight(p.s), phase_weight(p.s));
    let tu = &p.tuple;
    let mut constants = Vec::new();
    for &n in &p.sizes {
        let s = Sampling::continuum(n);
        let window = reference_window(n)?;
        let fs = p.functions.iter().map(|f| f.sample(n)).collect::<Result<Vec<_>>>()?;
        let mut ratios = Vec::new();
        for a in &p.symbols {
            let rep = check_op_continuity(&a.sample(n)?, p.t, &tu.p1, &tu.p2, tu.p, tu.q, [&w0, &w, &w], &fs, &window, s)?;
            ratios.push(rep.constant.max);
        }
        constants.push(worst(ratios));
    }
    let mut out = Vec::new();
    stability(
        &mut out,
        "op-continuity",
        "‖Op_t(a)f‖_M^p2(ω2) / (‖a‖_M^{p,q}(ω0) ‖f‖_M^p1(ω1))",
        &p.sizes,
        &constants,
        p.factor,
    );
    Ok(out)
}

// ---------------------------------------------------------------- wigner

#[derive(Serialize, Deserialize)]
struct IdentityParams {
    n: usize,
    ts: Vec<f64>,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
struct WignerStabilityParams {
    sizes: Vec<usize>,
    t: f64,
    exponents: WignerExponents,
    s: f64,
    pairs: Vec<(Atom, Atom)>,
    factor: f64,
}

fn build_wigner(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "wigner";
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let tol = &cfg.tolerances;
    let mut out = Vec::new();
    for i in 0..cfg.trials.identities {
        let n = [32, 33][i % 2];
        let p = IdentityParams {
            n,
            ts: vec![0.0, 0.25, 0.5, 1.0],
            tol: tol.rank_one,
        };
        out.push(case(suite, "rank-one", derive_seed(cfg.seed, suite, out.len()), &p));
        let p = IdentityParams {
            n,
            ts: vec![r.random::<f64>(), r.random::<f64>()],
            tol: tol.covariance,
        };
        out.push(case(suite, "covariance", derive_seed(cfg.seed, suite, out.len()), &p));
        let p = IdentityParams {
            n: cfg.sizes.involution_n,
            ts: Vec::new(),
            tol: tol.involution,
        };
        out.push(case(suite, "involution", derive_seed(cfg.seed, suite, out.len()), &p));
    }
    let sizes = cfg.sizes.stability_odd.clone();
    let spread = safe_spread(*sizes.iter().min().expect("nonempty"));
    let pairs: Vec<(Atom, Atom)> = (0..cfg.trials.family)
        .map(|_| (Atom::random(&mut r, spread), Atom::random(&mut r, spread)))
        .collect();
    let two = exp(2.0);
    let moyal = WignerExponents { p: two, q: two, p1: two, q1: two, p2: two, q2: two };
    let wide = WignerExponents { p: exp(1.0), q: Exponent::Infinity, ..moyal };
    for (t, e, s) in [(0.0, moyal, 0.0), (0.5, moyal, 0.0), (0.0, wide, 0.0), (0.5, wide, 0.0), (0.5, wide, 1.0)] {
        let p = WignerStabilityParams {
            sizes: sizes.clone(),
            t,
            exponents: e,
            s,
            pairs: pairs.clone(),
            factor: tol.stability_factor,
        };
        out.push(case(suite, "wigner-stability", derive_seed(cfg.seed, suite, out.len()), &p));
    }
    out
}

fn eval_wigner(c: &Case) -> Result<Vec<Measurement>> {
    let mut r = rng(c.seed);
    match c.kind.as_str() {
        "rank-one" => {
            let p: IdentityParams = params(c)?;
            let (f1, f2, f) = (gaussian_function(&mut r, p.n), gaussian_function(&mut r, p.n), gaussian_function(&mut r, p.n));
            let expect = f1.scale(f.inner(&f2) / (p.n as f64).sqrt());
            p.ts.iter()
                .map(|&t| {
                    let got = apply_operator(&op_t(&wigner_t(&f1, &f2, t)?, t)?, &f)?;
                    let e = rel(got.sub(&expect)?.norm(), expect.norm());
                    Ok(Measurement::small("rank-one", "‖Op_t(W^t) f - N^(-1/2)(f,f2) f1‖ / ‖·‖ <= tol", e, p.tol))
                })
                .collect()
        }
        "covariance" => {
            let p: IdentityParams = params(c)?;
            let a = random_symbol(&mut r, p.n);
            let (t1, t2) = (p.ts[0], p.ts[1]);
            let lhs = op_t(&a, t1)?;
            let rhs = op_t(&calculus_transform(&a, t1, t2), t2)?;
            let e = max_abs(&(&lhs.entries - &rhs.entries));
            Ok(vec![Measurement::small(
                "calculus-covariance",
                "max|Op_t1(a) - Op_t2(T(t1,t2) a)| <= tol",
                e,
                p.tol,
            )])
        }
        "involution" => {
            let p: IdentityParams = params(c)?;
            let a = random_symbol(&mut r, p.n);
            let e = symplectic_ft(&symplectic_ft(&a)?)?.max_abs_diff(&a)?;
            Ok(vec![Measurement::small("symplectic-involution", "max|F_σ F_σ a - a| <= tol", e, p.tol)])
        }
        _ => {
            let p: WignerStabilityParams = params(c)?;
            let (w0, w) = (symbol_weight(p.s), phase_weight(p.s));
            let mut constants = Vec::new();
            for &n in &p.sizes {
                let s = Sampling::continuum(n);
                let window = reference_window(n)?;
                let mut ratios = Vec::new();
                for (a, b) in &p.pairs {
                    let rep = check_wigner_modulation_bound(&a.sample(n)?, &b.sample(n)?, p.t, &p.exponents, [&w0, &w, &w], &window, s)?;
                    ratios.push(rep.ratio);
                }
                constants.push(worst(ratios));
            }
            let mut out = Vec::new();
            stability(
                &mut out,
                "wigner-bound",
                "‖W^t‖_M^{p,q}(ω0) / (‖f1‖_M^{p1,q1}(ω1) ‖f2‖_M^{p2,q2}(ω2))",
                &p.sizes,
                &constants,
                p.factor,
            );
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------- convolution

#[derive(Serialize, Deserialize)]
struct ConvolutionParams {
    n: usize,
    atoms: Vec<Atom>,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
struct ConvolutionStabilityParams {
    sizes: Vec<usize>,
    p: Exponent,
    quads: Vec<Vec<Atom>>,
    factor: f64,
}

fn build_convolution(cfg: &ExperimentConfig) -> Vec<Case> {
    let suite = "convolution";
    let mut r = rng(derive_seed(cfg.seed, suite, usize::MAX));
    let n = cfg.sizes.convolution_n;
    let mut out = Vec::new();
    for _ in 0..cfg.trials.convolution {
        let p = ConvolutionParams {
            n,
            atoms: (0..4).map(|_| Atom::random(&mut r, safe_spread(n))).collect(),
            tol: cfg.tolerances.convolution,
        };
        out.push(case(suite, "convolution-identity", derive_seed(cfg.seed, suite, out.len()), &p));
    }
    let sizes = cfg.sizes.convolution_stability.clone();
    let spread = safe_spread(*sizes.iter().min().expect("nonempty"));
    let quads: Vec<Vec<Atom>> = (0..cfg.trials.family)
        .map(|_| (0..4).map(|_| Atom::random(&mut r, spread)).collect())
        .collect();
    for p in [1.0, 0.5] {
        let params = ConvolutionStabilityParams {
            sizes: sizes.clone(),
            p: exp(p),
            quads: quads.clone(),
            factor: cfg.tolerances.convolution_stability_factor,
        };
        out.push(case(suite, "convolution-stability", derive_seed(cfg.seed, suite, out.len()), &params));
    }
    out
}

fn eval_convolution(c: &Case) -> Result<Vec<Measurement>> {
    if c.kind == "convolution-identity" {
        let p: ConvolutionParams = params(c)?;
        let f = p.atoms.iter().map(|a| a.sample(p.n)).collect::<Result<Vec<_>>>()?;
        let rep = check_wigner_convolution(&f[0], &f[1], &f[2], &f[3], Exponent::ONE, &reference_window(p.n)?)?;
        return Ok(vec![
            Measurement::small(
                "convolution-identity",
                "max| |W*W| - C |V V| | / max|W*W| <= tol",
                rep.deviation,
                p.tol,
            ),
            Measurement::info("convolution-fitted-c", "fitted C against N", rep.fitted_c, p.n as f64),
        ]);
    }
    let p: ConvolutionStabilityParams = params(c)?;
    let mut constants = Vec::new();
    for &n in &p.sizes {
        let window = reference_window(n)?;
        let mut ratios = Vec::new();
        for q in &p.quads {
            let f = q.iter().map(|a| a.sample(n)).collect::<Result<Vec<_>>>()?;
            ratios.push(check_wigner_convolution(&f[0], &f[1], &f[2], &f[3], p.p, &window)?.norm_ratio);
        }
        constants.push(worst(ratios));
    }
    let mut out = Vec::new();
    stability(&mut out, "convolution-norm", "‖a*b‖_Lp / ∏‖·‖_M^2p", &p.sizes, &constants, p.factor);
    Ok(out)
}

// ---------------------------------------------------------------- driver

/// Cases of one suite under a config.
pub fn build_cases(suite: &str, cfg: &ExperimentConfig) -> Result<Vec<Case>> {
    Ok(match suite {
        "factorization" => build_factorization(cfg),
        "matrix-schatten" => build_matrix_schatten(cfg),
        "matrix-continuity" => build_matrix_continuity(cfg),
        "gabor-reconstruction" => build_gabor(cfg),
        "window-bound" => build_window(cfg),
        "op-factorization" => build_op_factorization(cfg),
        "op-schatten" => build_op_schatten(cfg),
        "op-continuity" => build_op_continuity(cfg),
        "wigner" => build_wigner(cfg),
        "convolution" => build_convolution(cfg),
        other => return Err(Error::UnknownSuite(other.into())),
    })
}

/// Recomputes the measurements of one case from its inputs alone.
pub fn evaluate(case: &Case) -> Result<Vec<Measurement>> {
    match case.suite.as_str() {
        "factorization" => eval_split(case),
        "matrix-schatten" => eval_embedding(case),
        "matrix-continuity" => eval_continuity(case),
        "gabor-reconstruction" => eval_gabor(case),
        "window-bound" => eval_window(case),
        "op-factorization" => eval_op_factorization(case),
        "op-schatten" => eval_op_schatten(case),
        "op-continuity" => eval_op_continuity(case),
        "wigner" => eval_wigner(case),
        "convolution" => eval_convolution(case),
        other => Err(Error::UnknownSuite(other.into())),
    }
}

/// Wall-clock time per suite; kept out of the report so reports stay reproducible.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteTiming {
    pub suite: String,
    pub cases: usize,
    pub seconds: f64,
}

pub struct RunOutput {
    pub report: Report,
    pub timing: Vec<SuiteTiming>,
}

/// Runs every configured suite; cases run in parallel, records are sorted by digest.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut timing = Vec::new();
    for suite in &cfg.suites {
        let start = Instant::now();
        let cases = build_cases(suite, cfg)?;
        let results: Vec<(Case, Result<Vec<Measurement>>)> =
            cases.into_par_iter().map(|c| {
                let r = evaluate(&c);
                (c, r)
            }).collect();
        let n = results.len();
        for (c, r) in results {
            match r {
                Ok(ms) => records.extend(ms.into_iter().enumerate().map(|(i, m)| Record::new(&c, i, m))),
                Err(e) => errors.push(CaseError {
                    digest: c.digest(),
                    inputs: c,
                    error: e.to_string(),
                }),
            }
        }
        timing.push(SuiteTiming {
            suite: suite.clone(),
            cases: n,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(RunOutput {
        report: Report::assemble(cfg.seed, cfg.suites.clone(), records, errors),
        timing,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayOutcome {
    pub cases: usize,
    pub records: usize,
    /// Digests of records whose `(lhs, rhs)` were not reproduced bit for bit.
    pub mismatches: Vec<String>,
}

/// Recomputes every record of a report from its persisted inputs.
pub fn replay(report: &Report) -> Result<ReplayOutcome> {
    let mut groups: BTreeMap<String, (Case, Vec<&Record>)> = BTreeMap::new();
    for r in &report.records {
        groups
            .entry(r.inputs.digest())
            .or_insert_with(|| (r.inputs.clone(), Vec::new()))
            .1
            .push(r);
    }
    let groups: Vec<(Case, Vec<&Record>)> = groups.into_values().collect();
    let outcomes: Vec<Vec<String>> = groups
        .par_iter()
        .map(|(c, recs)| match evaluate(c) {
            Ok(ms) => recs
                .iter()
                .filter(|r| {
                    ms.get(r.item).is_none_or(|m| {
                        m.check != r.measurement.check
                            || m.lhs.to_bits() != r.measurement.lhs.to_bits()
                            || m.rhs.to_bits() != r.measurement.rhs.to_bits()
                    })
                })
                .map(|r| r.digest.clone())
                .collect(),
            Err(_) => recs.iter().map(|r| r.digest.clone()).collect(),
        })
        .collect();
    let mut mismatches: Vec<String> = outcomes.into_iter().flatten().collect();
    mismatches.sort();
    Ok(ReplayOutcome {
        cases: groups.len(),
        records: report.records.len(),
        mismatches,
    })
}
