use modschatten::gabor::{gaussian, gaussian_atom, grid_spacing, CyclicGridFunction, Sampling};
use modschatten::psido::*;
use modschatten::weights_lattices::{Exponent, MixedExponent, Weight};
use modschatten::Complex64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_fn(rng: &mut ChaCha8Rng, n: usize) -> CyclicGridFunction {
    CyclicGridFunction::new((0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()).unwrap()
}

fn random_symbol(rng: &mut ChaCha8Rng, n: usize) -> Symbol {
    Symbol::new(n, (0..n * n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()).unwrap()
}

fn random_atom(rng: &mut ChaCha8Rng, n: usize) -> CyclicGridFunction {
    let half = 0.3 * n as f64 * grid_spacing(n);
    let x0 = (rng.random::<f64>() - 0.5) * half;
    let xi0 = (rng.random::<f64>() - 0.5) * half;
    gaussian_atom(n, x0, xi0, 0.7 + 0.6 * rng.random::<f64>()).unwrap()
}

/// Superposition of a few tensor Gaussian atoms in phase space.
fn atom_symbol(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> Symbol {
    let mut a = Symbol::zeros(n);
    for _ in 0..terms {
        let gx = random_atom(rng, n);
        let gxi = random_atom(rng, n);
        let coef = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let s = Symbol::from_fn(n, |x, xi| coef * gx.values()[x] * gxi.values()[xi]);
        a = a.add(&s).unwrap();
    }
    a
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().fold(0.0, |m, v| m.max(v.norm()))
}

#[test]
fn constant_symbol_quantizes_to_identity() {
    for n in [16, 17] {
        let one = Symbol::constant(n, c(1.0, 0.0));
        for t in [0.0, 0.25, 0.5, 1.0] {
            let m = op_t(&one, t).unwrap();
            assert!(max_diff(&m.entries, &DMatrix::identity(n, n)) < 1e-12, "t={t}");
        }
        for (t1, t2) in [(0.0, 1.0), (0.3, -0.7)] {
            assert!(calculus_transform(&one, t1, t2).max_abs_diff(&one).unwrap() < 1e-13);
        }
    }
}

#[test]
fn calculus_transform_group_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [16, 21] {
        let a = random_symbol(&mut rng, n);
        assert_eq!(calculus_transform(&a, 0.4, 0.4), a);
        for (t1, t2, t3) in [(0.0, 0.5, 1.0), (0.25, 1.0, 0.1), (1.0, 0.0, 0.5)] {
            let two = calculus_transform(&calculus_transform(&a, t2, t3), t1, t2);
            let one = calculus_transform(&a, t1, t3);
            assert!(two.max_abs_diff(&one).unwrap() < 1e-12);
        }
    }
}

#[test]
fn quantization_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [16, 15] {
        let a = random_symbol(&mut rng, n);
        for (t1, t2) in [(0.0, 0.5), (0.25, 1.0), (1.0, 0.0)] {
            let lhs = op_t(&a, t1).unwrap();
            let rhs = op_t(&calculus_transform(&a, t1, t2), t2).unwrap();
            assert!(max_diff(&lhs.entries, &rhs.entries) < 1e-12);
        }
        assert_eq!(op_t(&a, 0.0).unwrap(), op0(&a));
    }
}

#[test]
fn rank_one_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [32, 33] {
        let (f1, f2, f) = (random_fn(&mut rng, n), random_fn(&mut rng, n), random_fn(&mut rng, n));
        let expect = f1.scale(f.inner(&f2) / (n as f64).sqrt());
        for t in [0.0, 0.25, 0.5, 1.0] {
            let w = wigner_t(&f1, &f2, t).unwrap();
            let got = apply_operator(&op_t(&w, t).unwrap(), &f).unwrap();
            assert!(got.sub(&expect).unwrap().norm() <= 1e-10 * expect.norm(), "t={t}");
        }
    }
}

#[test]
fn rihaczek_direct_formula() {
    let n = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (f1, f2) = (random_fn(&mut rng, n), random_fn(&mut rng, n));
    let w = wigner_t(&f1, &f2, 0.0).unwrap();
    for x in 0..n {
        for xi in 0..n {
            let mut hat = c(0.0, 0.0);
            for y in 0..n {
                hat += f2.values()[y] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (y * xi) as f64 / n as f64);
            }
            hat /= (n as f64).sqrt();
            let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (x * xi) as f64 / n as f64);
            let direct = f1.values()[x] * hat.conj() * phase;
            assert!((w.at(x as i64, xi as i64) - direct).norm() < 1e-13);
        }
    }
    let zero = CyclicGridFunction::new(vec![c(0.0, 0.0); n]).unwrap();
    assert!(wigner_t(&f1, &zero, 0.5).unwrap().norm() == 0.0);
    let g = gaussian(n, 1.0).unwrap();
    let phi = rihaczek_window(&g, &f2).unwrap();
    let h2 = f2.fourier();
    for x in 0..n {
        for xi in 0..n {
            let m = g.values()[x].norm() * h2.values()[xi].norm();
            assert!((phi.at(x as i64, xi as i64).norm() - m).abs() < 1e-14);
        }
    }
}

#[test]
fn gaussian_weyl_symbol_matches_continuum() {
    // For φ = e^{-x²/2}: W_{φ,φ}(x,ξ) = √2 e^{-(x²+ξ²)}.
    let n = 64;
    let g = gaussian(n, 1.0).unwrap();
    let w = wigner_t(&g, &g, 0.5).unwrap();
    let h = grid_spacing(n);
    let mut worst = 0.0f64;
    for x in 0..n {
        for xi in 0..n {
            let (u, v) = (modschatten::gabor::centered(x, n) as f64 * h, modschatten::gabor::centered(xi, n) as f64 * h);
            let exact = 2f64.sqrt() * (-(u * u + v * v)).exp();
            if exact > 1e-3 {
                worst = worst.max((w.at(x as i64, xi as i64).norm() - exact).abs() / exact);
            }
        }
    }
    assert!(worst < 1e-3, "worst relative error {worst}");
}

#[test]
fn weyl_quantization_is_symmetric_for_real_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 63;
    let a = Symbol::new(n, random_symbol(&mut rng, n).values().iter().map(|v| c(v.re, 0.0)).collect()).unwrap();
    let m = op_t(&a, 0.5).unwrap().entries;
    assert!(max_diff(&m, &m.adjoint()) < 1e-10);
    let even = Symbol::from_fn(n, |x, xi| a.at(x as i64, xi as i64) + a.at(x as i64, -(xi as i64)));
    let m = op_t(&even, 0.5).unwrap().entries;
    assert!(max_diff(&m, &m.adjoint()) < 1e-10);
}

#[test]
fn x_only_symbols_multiply() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 20;
    let m = random_fn(&mut rng, n);
    let a = Symbol::from_fn(n, |x, _| m.values()[x]);
    for t in [0.0, 1.0] {
        let k = op_t(&a, t).unwrap().entries;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(m.values()));
        assert!(max_diff(&k, &d) < 1e-13);
    }
}

#[test]
fn symplectic_fourier_transform() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 63;
    let a = random_symbol(&mut rng, n);
    let back = symplectic_ft(&symplectic_ft(&a).unwrap()).unwrap();
    assert!(back.max_abs_diff(&a).unwrap() < 1e-12);
    let one = symplectic_ft(&Symbol::constant(n, c(1.0, 0.0))).unwrap();
    let mut delta = Symbol::zeros(n);
    delta.values_mut()[0] = c(n as f64, 0.0);
    assert!(one.max_abs_diff(&delta).unwrap() < 1e-11);
    assert!(symplectic_ft(&Symbol::zeros(64)).is_err());
}

#[test]
fn hilbert_schmidt_bridge() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [16, 31] {
        let a = random_symbol(&mut rng, n);
        let hs = op0(&a).entries.norm();
        assert!((hs - a.norm() / (n as f64).sqrt()).abs() < 1e-10 * hs);
    }
}

#[test]
fn gabor_matrix_of_constant_symbol_reproduces() {
    let n = 64;
    let ps = PhaseSpaceSystem::gaussian(n, 4, 4).unwrap();
    let one = Symbol::constant(n, c(1.0, 0.0));
    let a_mat = gabor_matrix(&one, &ps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let f = random_fn(&mut rng, n);
        let g = ps.apply_factored(&a_mat, &f).unwrap();
        assert!(g.sub(&f).unwrap().norm() <= 1e-8 * f.norm());
    }
}

#[test]
fn factorization_identity_random_symbols() {
    let n = 64;
    let ps = PhaseSpaceSystem::gaussian(n, 4, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let fs: Vec<_> = (0..5).map(|_| random_fn(&mut rng, n)).collect();
    for _ in 0..3 {
        let a = atom_symbol(&mut rng, n, 4);
        let r = check_factorization_identity(&a, &ps, &fs).unwrap();
        assert!(r.pass, "worst residual {}", r.worst);
    }
    let a = atom_symbol(&mut rng, n, 2);
    let b = atom_symbol(&mut rng, n, 2);
    let sum = gabor_matrix(&a.add(&b.scale(c(0.0, 2.0))).unwrap(), &ps).unwrap().entries;
    let lin = gabor_matrix(&a, &ps).unwrap().entries + gabor_matrix(&b, &ps).unwrap().entries * c(0.0, 2.0);
    assert!(max_diff(&sum, &lin) < 1e-12);
}

#[test]
fn factorization_identity_rank_one_symbol() {
    let n = 64;
    let ps = PhaseSpaceSystem::gaussian(n, 4, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (f1, f2) = (random_atom(&mut rng, n), random_atom(&mut rng, n));
    let w = wigner_t(&f1, &f2, 0.0).unwrap();
    let a_mat = gabor_matrix(&w, &ps).unwrap();
    for _ in 0..3 {
        let f = random_fn(&mut rng, n);
        let expect = f1.scale(f.inner(&f2) / (n as f64).sqrt());
        let got = ps.apply_factored(&a_mat, &f).unwrap();
        assert!(got.sub(&expect).unwrap().norm() <= 1e-8 * expect.norm());
    }
}

#[test]
fn unorm_modnorm_ratios_are_homogeneous() {
    let n = 32;
    let ps = PhaseSpaceSystem::gaussian(n, 4, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let a = atom_symbol(&mut rng, n, 3);
    let family = vec![a.clone(), a.scale(c(0.0, -7.5))];
    let s = Sampling::continuum(n);
    let r = check_unorm_modnorm_equiv(&family, Exponent::ONE, Exponent::TWO, &Weight::unit(), &ps, s).unwrap();
    assert!((r.constant.ratios[0] / r.constant.ratios[1] - 1.0).abs() < 1e-10);
    let fam: Vec<_> = (0..6).map(|_| atom_symbol(&mut rng, n, 2)).collect();
    let w0 = Weight::tensor(vec![Weight::poly(0.5), Weight::poly(0.5), Weight::poly(0.5), Weight::poly(0.5)]);
    let r = check_unorm_modnorm_equiv(&fam, Exponent::ONE, Exponent::ONE, &w0, &ps, s).unwrap();
    assert!(r.pass, "spread {}", r.constant.spread());
}

#[test]
fn moyal_case_of_wigner_bound() {
    // With counting sampling both sides are Parseval identities, so the ratio
    // is exactly ‖Φ‖/‖φ‖² whatever f₁, f₂ are.
    let n = 24;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let two = Exponent::TWO;
    let e = WignerExponents { p: two, q: two, p1: two, q1: two, p2: two, q2: two };
    let u = Weight::unit();
    let win = gaussian(n, 1.0).unwrap().normalized();
    let mut ratios = Vec::new();
    for t in [0.0, 0.5, 1.0] {
        let (f1, f2) = (random_fn(&mut rng, n), random_fn(&mut rng, n));
        let r = check_wigner_modulation_bound(&f1, &f2, t, &e, [&u, &u, &u], &win, Sampling::counting()).unwrap();
        ratios.push(r.ratio);
    }
    for r in &ratios {
        assert!((r / ratios[0] - 1.0).abs() < 1e-10);
    }
    let zero = CyclicGridFunction::new(vec![c(0.0, 0.0); n]).unwrap();
    let r = check_wigner_modulation_bound(&zero, &win, 0.5, &e, [&u, &u, &u], &win, Sampling::counting()).unwrap();
    assert_eq!(r.lhs, 0.0);
    let bad = WignerExponents { p1: Exponent::ONE, ..e };
    assert!(bad.validate().is_err());
}

#[test]
fn wigner_convolution_identity() {
    let n = 63;
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let win = gaussian(n, 1.0).unwrap().normalized();
    for _ in 0..3 {
        let fs: Vec<_> = (0..4).map(|_| random_atom(&mut rng, n)).collect();
        let r = check_wigner_convolution(&fs[0], &fs[1], &fs[2], &fs[3], Exponent::ONE, &win).unwrap();
        assert!(r.identity_pass, "deviation {}", r.deviation);
        assert!((r.fitted_c - n as f64).abs() < 1e-6 * n as f64, "C = {}", r.fitted_c);
    }
    assert!(check_wigner_convolution(&win, &win, &win, &win, Exponent::TWO, &win).is_err());
}

#[test]
fn operator_checks_run() {
    let n = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = Sampling::continuum(n);
    let win = gaussian(n, 1.0).unwrap().normalized();
    let u = Weight::unit();
    let fam: Vec<_> = (0..3).map(|_| atom_symbol(&mut rng, n, 2)).collect();
    let r = check_op_schatten(&fam, 0.5, Exponent::ONE, [&u, &u, &u], &win, s).unwrap();
    assert!(r.constant.max.is_finite() && r.constant.min > 0.0);
    assert!(check_op_schatten(&fam, 0.5, Exponent::new(3.0).unwrap(), [&u, &u, &u], &win, s).is_err());
    let zero = check_op_schatten(&[Symbol::zeros(n)], 0.0, Exponent::ONE, [&u, &u, &u], &win, s).unwrap();
    assert_eq!(zero.constant.ratios, vec![0.0]);
    let two = MixedExponent::uniform(Exponent::TWO, 2).unwrap();
    let fs: Vec<_> = (0..4).map(|_| random_fn(&mut rng, n)).collect();
    let r = check_op_continuity(&fam[0], 0.0, &two, &two, Exponent::Infinity, Exponent::ONE, [&u, &u, &u], &fs, &win, s)
        .unwrap();
    assert!(r.constant.max.is_finite() && r.constant.max > 0.0);
    let one = MixedExponent::uniform(Exponent::ONE, 2).unwrap();
    assert!(check_op_continuity(&fam[0], 0.0, &one, &two, Exponent::ONE, Exponent::ONE, [&u, &u, &u], &fs, &win, s).is_err());
}

#[test]
fn weighted_gram_reduces_to_norm() {
    let n = 32;
    let win = gaussian(n, 1.0).unwrap().normalized();
    let s = Sampling::continuum(n);
    let w = Weight::tensor(vec![Weight::poly(1.0), Weight::poly(-0.5)]);
    let g = modulation_gram(&win, &w, s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let f = random_fn(&mut rng, n);
    let v = nalgebra::DVector::from_column_slice(f.values());
    let quad = (v.adjoint() * &g * &v)[(0, 0)].re.sqrt();
    let direct = modschatten::gabor::modulation_norm_sampled(&f, &MixedExponent::uniform(Exponent::TWO, 2).unwrap(), &w, &win, s).unwrap();
    assert!((quad - direct).abs() < 1e-10 * direct);
}

#[test]
fn symbol_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let a = random_symbol(&mut rng, 6);
    let dir = tempfile::tempdir().unwrap();
    for binary in [false, true] {
        let p = dir.path().join(format!("a{binary}"));
        write_symbol(&p, &a, binary).unwrap();
        assert_eq!(read_symbol(&p).unwrap(), a);
    }
}
