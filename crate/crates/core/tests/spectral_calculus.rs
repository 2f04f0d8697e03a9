use degenfrac::spectral_calculus::{
    apply_scalar_multiplier, l1_norm_bound_check, read_snapshot, write_snapshot, Space, SpectralField, SpectralGrid,
};
use degenfrac::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn grid_validation() {
    assert!(SpectralGrid::new(vec![8, 6], vec![1.0, 1.0]).is_err());
    assert!(SpectralGrid::new(vec![8], vec![1.0, 1.0]).is_err());
    assert!(SpectralGrid::new(vec![8], vec![0.0]).is_err());
    let g = SpectralGrid::cube(2, 8, 2.0 * PI).unwrap();
    assert_eq!(g.total(), 64);
    for idx in 0..g.total() {
        assert_eq!(g.flat_index(&g.multi_index(idx)), idx);
    }
}

#[test]
fn signed_modes() {
    assert_eq!(SpectralGrid::signed_mode(0, 8), 0);
    assert_eq!(SpectralGrid::signed_mode(3, 8), 3);
    assert_eq!(SpectralGrid::signed_mode(5, 8), -3);
}

#[test]
fn derivative_multiplier_on_sine() {
    let g = SpectralGrid::cube(1, 32, 2.0 * PI).unwrap();
    let f = SpectralField::from_fn(&g, 1, |x| vec![C64::new((3.0 * x[0]).sin(), 0.0)]);
    let d = apply_scalar_multiplier(|xi| C64::new(0.0, xi[0]), &f).unwrap().to_physical().unwrap();
    let exact = SpectralField::from_fn(&g, 1, |x| vec![C64::new(3.0 * (3.0 * x[0]).cos(), 0.0)]);
    assert!(d.rel_diff(&exact) < 1e-13);
}

#[test]
fn field_length_checked() {
    let g = SpectralGrid::cube(1, 8, 1.0).unwrap();
    assert!(SpectralField::new(&g, 2, vec![C64::new(0.0, 0.0); 8], Space::Physical).is_err());
}

#[test]
fn snapshot_roundtrip() {
    let g = SpectralGrid::new(vec![8, 4], vec![2.0 * PI, 3.0]).unwrap();
    let f = SpectralField::random(&g, 2, 5);
    let mut buf = Vec::new();
    write_snapshot(&f, &mut buf).unwrap();
    let back = read_snapshot(buf.as_slice(), g.extent.clone()).unwrap();
    assert_eq!(back, f);
    assert!(read_snapshot(&b"NOPE!"[..], vec![1.0]).is_err());
    assert!(read_snapshot(&buf[..buf.len() - 3], g.extent.clone()).is_err());
}

#[test]
fn gaussian_multiplier_norm_bound() {
    let g = SpectralGrid::cube(2, 32, 2.0 * PI).unwrap();
    let rep = l1_norm_bound_check(|xi| C64::new((-0.1 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0), &g, 5, 2, 3).unwrap();
    assert!(rep.ratio <= 1.01, "{rep:?}");
    assert!(rep.operator_norm > 0.99);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transform_roundtrip(seed in 0u64..10_000, m in 1usize..3) {
        let g = SpectralGrid::new(vec![16, 8], vec![2.0 * PI, 5.0]).unwrap();
        let f = SpectralField::random(&g, m, seed);
        let back = f.to_frequency().unwrap().to_physical().unwrap();
        prop_assert!(back.rel_diff(&f) < 1e-13);
    }

    #[test]
    fn parseval(seed in 0u64..10_000) {
        let g = SpectralGrid::cube(2, 16, 2.0 * PI).unwrap();
        let f = SpectralField::random(&g, 1, seed);
        let fh = f.to_frequency().unwrap();
        // Any consistent normalization makes the ratio a seed-independent constant.
        let ratio = fh.l2_norm() / f.l2_norm();
        let unit = SpectralField::from_fn(&g, 1, |_| vec![C64::new(1.0, 0.0)]);
        let ratio_unit = unit.to_frequency().unwrap().l2_norm() / unit.l2_norm();
        prop_assert!((ratio / ratio_unit - 1.0).abs() < 1e-12);
    }
}
