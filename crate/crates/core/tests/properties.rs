use modschatten::gabor::{stft, CyclicGridFunction};
use modschatten::matrix_bank::{factorize_left_diagonal, factorize_right_diagonal, u_norm, LatticeMatrix};
use modschatten::mixed_norms::{mixed_seq_norm, SequenceArray};
use modschatten::psido::{calculus_transform, op_t, Symbol};
use modschatten::schatten::verify_schatten_embedding;
use modschatten::weights_lattices::{Exponent, Lattice, MixedExponent, Weight};
use modschatten::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (0.25f64..6.0).prop_map(|p| Exponent::new(p).unwrap()),
        Just(Exponent::Infinity),
    ]
}

fn shape() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![(1usize..12).prop_map(|n| vec![n]), (1usize..5, 1usize..5).prop_map(|(a, b)| vec![a, b])]
}

fn matrix() -> impl Strategy<Value = LatticeMatrix> {
    shape().prop_flat_map(|s| {
        let n: usize = s.iter().product();
        prop::collection::vec(complex(), n * n).prop_map(move |v| {
            let l = Lattice::counting(&s).unwrap();
            LatticeMatrix::new(l, DMatrix::from_vec(n, n, v)).unwrap()
        })
    })
}

fn sequence() -> impl Strategy<Value = SequenceArray> {
    shape().prop_flat_map(|s| {
        let n: usize = s.iter().product();
        prop::collection::vec(complex(), n)
            .prop_map(move |v| SequenceArray::new(Lattice::counting(&s).unwrap(), v).unwrap())
    })
}

fn grid(n: usize) -> impl Strategy<Value = CyclicGridFunction> {
    prop::collection::vec(complex(), n).prop_map(|v| CyclicGridFunction::new(v).unwrap())
}

fn symbol(n: usize) -> impl Strategy<Value = Symbol> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| Symbol::new(n, v).unwrap())
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().fold(0.0, |m, v| m.max(v.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixed_norm_is_homogeneous(f in sequence(), p in exponent(), alpha in -50.0f64..50.0, s in -2.0f64..2.0) {
        let e = MixedExponent::uniform(p, f.lattice.dim()).unwrap();
        let w = Weight::poly(s);
        let scaled = SequenceArray::new(
            f.lattice.clone(),
            f.values.iter().map(|v| v * alpha).collect(),
        ).unwrap();
        let a = mixed_seq_norm(&f, &e, &w).unwrap();
        let b = mixed_seq_norm(&scaled, &e, &w).unwrap();
        prop_assert!((b - alpha.abs() * a).abs() <= 1e-13 * (alpha.abs() * a).max(1e-300));
    }

    #[test]
    fn mixed_norms_decrease_in_p(f in sequence(), p in 0.3f64..3.0, dp in 0.0f64..3.0) {
        let d = f.lattice.dim();
        let lo = mixed_seq_norm(&f, &MixedExponent::uniform(Exponent::new(p + dp).unwrap(), d).unwrap(), &Weight::unit()).unwrap();
        let hi = mixed_seq_norm(&f, &MixedExponent::uniform(Exponent::new(p).unwrap(), d).unwrap(), &Weight::unit()).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn u2_is_frobenius(a in matrix()) {
        let got = u_norm(&a, Exponent::TWO, Exponent::TWO, &Weight::unit()).unwrap();
        prop_assert!((got - a.entries.norm()).abs() <= 1e-13 * got.max(1e-300));
    }

    #[test]
    fn factorizations_reproduce(a in matrix(), p0 in prop::sample::select(vec![0.5, 1.0, 1.5]), u in 0.1f64..0.9, left in any::<bool>()) {
        let p1 = Exponent::from_recip(u / p0).unwrap();
        let p2 = Exponent::from_recip((1.0 - u) / p0).unwrap();
        let p0 = Exponent::new(p0).unwrap();
        let w = Weight::unit();
        let f = if left {
            factorize_left_diagonal(&a, p0, p1, p2, &w, &w, &w).unwrap()
        } else {
            factorize_right_diagonal(&a, p0, p1, p2, &w, &w, &w).unwrap()
        };
        let diagonal = if left { f.a1.is_diagonal() } else { f.a2.is_diagonal() };
        prop_assert!(diagonal);
        let prod = f.a1.mul(&f.a2).unwrap();
        prop_assert!(max_diff(&prod.entries, &a.entries) <= 1e-12 * a.max_abs().max(1e-300));
        prop_assert!(f.multcont_holds(1e-10));
    }

    #[test]
    fn schatten_below_u_norm(a in matrix(), p in 0.3f64..2.0, s1 in -1.0f64..1.0, s2 in -1.0f64..1.0) {
        let r = verify_schatten_embedding(&a, Exponent::new(p).unwrap(), &Weight::poly(s1), &Weight::poly(s2)).unwrap();
        prop_assert!(r.pass, "ratio {}", r.ratio);
    }

    #[test]
    fn exponent_display_round_trips(p in exponent()) {
        let back: Exponent = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn exponential_weights_are_submultiplicative(r in 0.0f64..2.0, x in prop::collection::vec(-5.0f64..5.0, 3), y in prop::collection::vec(-5.0f64..5.0, 3)) {
        let w = Weight::Exponential { r };
        let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(w.eval(&s).unwrap() <= w.eval(&x).unwrap() * w.eval(&y).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn stft_moyal(f in grid(16), g in grid(16)) {
        let v = stft(&f, &g).unwrap();
        let lhs: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let rhs = f.norm().powi(2) * g.norm().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn calculus_transform_composes(a in symbol(9), t1 in -1.0f64..1.0, t2 in -1.0f64..1.0, t3 in -1.0f64..1.0) {
        let direct = calculus_transform(&a, t1, t3);
        let two_step = calculus_transform(&calculus_transform(&a, t1, t2), t2, t3);
        prop_assert!(direct.max_abs_diff(&two_step).unwrap() <= 1e-12);
    }

    #[test]
    fn quantizations_agree(a in symbol(10), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let lhs = op_t(&a, t1).unwrap();
        let rhs = op_t(&calculus_transform(&a, t1, t2), t2).unwrap();
        prop_assert!(max_diff(&lhs.entries, &rhs.entries) <= 1e-12);
    }
}
