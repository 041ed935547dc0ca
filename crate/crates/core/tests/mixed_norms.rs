use modschatten::mixed_norms::{
    check_young, check_young_quasi, convolve, lp_norm, mixed_grid_norm, mixed_seq_norm, GridFunction, SequenceArray,
};
use modschatten::weights_lattices::{Exponent, Lattice, MixedExponent, Weight};
use modschatten::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn seq(shape: &[usize], v: &[f64]) -> SequenceArray {
    SequenceArray::new(Lattice::counting(shape).unwrap(), v.iter().map(|&x| c(x)).collect()).unwrap()
}

fn random_seq(rng: &mut ChaCha8Rng, shape: &[usize]) -> SequenceArray {
    let l = Lattice::counting(shape).unwrap();
    let v = (0..l.len())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    SequenceArray::new(l, v).unwrap()
}

#[test]
fn two_step_reduction() {
    // f = [[1,2],[3,4]] with f(j0, j1); step k reduces axis order[k] with p[k].
    // ℓ¹ over axis 1 first gives (3, 7), then sup gives 7.
    let f = seq(&[2, 2], &[1.0, 2.0, 3.0, 4.0]);
    let m = MixedExponent::new(vec![e(1.0), Exponent::Infinity], vec![1, 0]).unwrap();
    assert_eq!(mixed_seq_norm(&f, &m, &Weight::unit()).unwrap(), 7.0);
    // Reducing axis 0 first by ℓ¹ gives (4, 6), then sup gives 6.
    let m = MixedExponent::new(vec![e(1.0), Exponent::Infinity], vec![0, 1]).unwrap();
    assert_eq!(mixed_seq_norm(&f, &m, &Weight::unit()).unwrap(), 6.0);
}

#[test]
fn all_sup_and_single_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_seq(&mut rng, &[4, 3]);
    let w = Weight::poly(1.0);
    let l = &f.lattice;
    let expect = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm() * w.eval(&l.point(i)).unwrap())
        .fold(0.0f64, f64::max);
    let m = MixedExponent::uniform(Exponent::Infinity, 2).unwrap();
    assert_eq!(mixed_seq_norm(&f, &m, &w).unwrap(), expect);

    let one = SequenceArray::new(Lattice::new(vec![1.0], vec![3], vec![3]).unwrap(), vec![c(-2.5)]).unwrap();
    let got = mixed_seq_norm(&one, &MixedExponent::uniform(e(0.5), 1).unwrap(), &w).unwrap();
    assert!((got - 2.5 * 10f64.sqrt()).abs() < 1e-12);
}

#[test]
fn flat_exponents_ignore_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = random_seq(&mut rng, &[3, 4, 2]);
    for p in [0.5, 1.0, 2.5] {
        let a = mixed_seq_norm(&f, &MixedExponent::identity(vec![e(p); 3]).unwrap(), &Weight::unit()).unwrap();
        let b = mixed_seq_norm(&f, &MixedExponent::new(vec![e(p); 3], vec![2, 0, 1]).unwrap(), &Weight::unit()).unwrap();
        assert!((a - b).abs() <= 1e-13 * a);
    }
}

#[test]
fn lp_norm_scaling() {
    assert_eq!(lp_norm(&[3.0, 4.0], e(2.0), 1.0), 5.0);
    assert_eq!(lp_norm(&[], e(2.0), 1.0), 0.0);
    // Large and tiny entries survive without overflow or underflow.
    let big = lp_norm(&[1e300, 1e300], e(2.0), 1.0);
    assert!((big / 1e300 - 2f64.sqrt()).abs() < 1e-14);
    let tiny = lp_norm(&[1e-300, 1e-300], e(0.5), 1.0);
    assert!((tiny / 1e-300 - 4.0).abs() < 1e-13);
}

#[test]
fn grid_norms() {
    let ones = GridFunction::new(vec![10], vec![0.25], vec![0.0], vec![c(1.0); 10]).unwrap();
    let got = mixed_grid_norm(&ones, &MixedExponent::uniform(e(1.0), 1).unwrap(), &Weight::unit()).unwrap();
    assert!((got - 2.5).abs() < 1e-14);

    let half: Vec<Complex64> = (0..10).map(|i| c(if i < 5 { 1.0 } else { 0.0 })).collect();
    let h = GridFunction::new(vec![10], vec![0.25], vec![0.0], half).unwrap();
    let sup = MixedExponent::uniform(Exponent::Infinity, 1).unwrap();
    assert_eq!(mixed_grid_norm(&h, &sup, &Weight::unit()).unwrap(), 1.0);

    let g = GridFunction::sample_box(&[-10.0], &[10.0], &[1024], |x| c((-x[0] * x[0] / 2.0).exp())).unwrap();
    let l2 = mixed_grid_norm(&g, &MixedExponent::uniform(e(2.0), 1).unwrap(), &Weight::unit()).unwrap();
    assert!((l2 - std::f64::consts::PI.powf(0.25)).abs() < 1e-6);
}

#[test]
fn convolution_examples() {
    let c0 = seq(&[5], &[0.3, -1.0, 2.0, 0.0, 4.0]);
    let delta = SequenceArray::delta(Lattice::counting(&[1]).unwrap(), &[0]).unwrap();
    let d = convolve(&delta, &c0).unwrap();
    assert_eq!(d.values, c0.values);

    let ind = seq(&[2], &[1.0, 1.0]);
    let r = convolve(&ind, &ind).unwrap();
    assert_eq!(r.values, vec![c(1.0), c(2.0), c(1.0)]);
    assert_eq!(r.lattice.lo(), &[0]);
    assert_eq!(r.lattice.hi(), &[2]);

    let z = convolve(&seq(&[3], &[0.0; 3]), &c0).unwrap();
    assert!(z.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn young_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let delta = SequenceArray::delta(Lattice::counting(&[1]).unwrap(), &[0]).unwrap();
    let f = random_seq(&mut rng, &[16]);
    let r = check_young_quasi(&delta, &f, &MixedExponent::uniform(e(1.0), 1).unwrap(), e(1.0)).unwrap();
    assert!(r.pass);
    assert!((r.lhs - r.rhs).abs() <= 1e-14 * r.rhs);

    for _ in 0..20 {
        let h = random_seq(&mut rng, &[64]);
        let g = random_seq(&mut rng, &[64]);
        assert!(check_young(&h, &g, e(1.0), e(2.0)).unwrap().pass);
        assert!(check_young_quasi(&h, &g, &MixedExponent::uniform(e(1.0), 1).unwrap(), e(0.5)).unwrap().pass);
    }
    let h = random_seq(&mut rng, &[4, 4]);
    let g = random_seq(&mut rng, &[4, 4]);
    assert!(check_young_quasi(&h, &g, &MixedExponent::uniform(e(1.0), 2).unwrap(), e(2.0)).is_err());
    assert!(check_young_quasi(&h, &g, &MixedExponent::uniform(e(0.5), 2).unwrap(), e(1.0)).is_err());
}
