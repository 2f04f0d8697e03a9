use degenfrac::symbol_algebra::{
    choose_kprime, cutoff, random_poly_matrix, recurrence_residual, regularizer, smooth_step, symbol_iterate, CutoffSpec,
    Polynomial, PolynomialMatrix, RegularizerSpec,
};
use degenfrac::{Error, C64};
use proptest::prelude::*;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn norm_power_is_radial() {
    let p = Polynomial::norm_power(3, c(2.0), 2);
    assert!((p.eval(&[1.0, 2.0, 2.0]) - c(2.0 * 81.0)).norm() < 1e-12);
    assert_eq!(p.degree(), 4);
}

#[test]
fn matrix_json_roundtrip() {
    let p = random_poly_matrix(2, 3, 2, 11).unwrap();
    let q = PolynomialMatrix::from_json(&p.to_json()).unwrap();
    let x = [0.3, -1.2, 0.7];
    assert!((p.eval(&x).unwrap() - q.eval(&x).unwrap()).norm() < 1e-14);
    assert!(PolynomialMatrix::from_json("{\"m\": 1}").is_err());
}

#[test]
fn shape_mismatch_rejected() {
    assert!(PolynomialMatrix::new(2, 1, vec![Polynomial::zero(1)]).is_err());
    assert!(Polynomial::new(2, vec![(vec![1], c(1.0))]).is_err());
}

#[test]
fn singular_symbol_is_reported() {
    let p2 = PolynomialMatrix::scalar(Polynomial::norm_power(2, c(1.0), 1));
    let p1 = PolynomialMatrix::identity(1, 2);
    assert!(matches!(symbol_iterate(&p1, &p2, &[0.0, 0.0], 2), Err(Error::SingularSymbol { .. })));
    let m2 = symbol_iterate(&p1, &p2, &[1.0, 1.0], 2).unwrap();
    assert!((m2[(0, 0)] - c(0.25)).norm() < 1e-15);
}

#[test]
fn regularizer_and_cutoff() {
    let spec = RegularizerSpec::new(0.01, 2, 2).unwrap();
    assert_eq!(regularizer(&spec, &[0.0, 0.0]), 1.0);
    assert!((regularizer(&spec, &[2.0, 0.0]) - (-0.16f64).exp()).abs() < 1e-15);
    assert!(RegularizerSpec::new(0.01, 3, 1).is_err());
    assert!(RegularizerSpec::new(-1.0, 2, 1).is_err());

    let cut = CutoffSpec::new(0.5, 1.5).unwrap();
    assert_eq!(cutoff(&cut, &[0.2]), 0.0);
    assert_eq!(cutoff(&cut, &[2.0]), 1.0);
    assert!(CutoffSpec::new(1.5, 0.5).is_err());
    assert_eq!(smooth_step(0.0), 0.0);
    assert_eq!(smooth_step(1.0), 1.0);
    assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
}

#[test]
fn kprime_is_even() {
    let k = choose_kprime(2, 2, 1.0, 1.0, 3).unwrap();
    assert!(k >= 2 && k % 2 == 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_a_ring_map(seed in 0u64..1000, x in prop::array::uniform2(-2.0f64..2.0)) {
        let a = random_poly_matrix(1, 2, 3, seed).unwrap().entry(0, 0).clone();
        let b = random_poly_matrix(1, 2, 2, seed + 1).unwrap().entry(0, 0).clone();
        let (va, vb) = (a.eval(&x), b.eval(&x));
        prop_assert!((a.add(&b).eval(&x) - (va + vb)).norm() <= 1e-12 * (1.0 + va.norm() + vb.norm()));
        prop_assert!((a.mul(&b).eval(&x) - va * vb).norm() <= 1e-12 * (1.0 + (va * vb).norm()));
    }

    #[test]
    fn iterates_satisfy_recurrence(seed in 0u64..500, x in prop::array::uniform2(0.5f64..2.0), l in 0usize..5) {
        let p1 = random_poly_matrix(2, 2, 2, seed).unwrap();
        let p2 = random_poly_matrix(2, 2, 2, seed + 7).unwrap();
        match recurrence_residual(&p1, &p2, &x, l) {
            Ok(r) => {
                let scale = p1.eval(&x).unwrap().norm() * symbol_iterate(&p1, &p2, &x, l).unwrap().norm();
                prop_assert!(r <= 1e-9 * (1.0 + scale));
            }
            Err(Error::SingularSymbol { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
