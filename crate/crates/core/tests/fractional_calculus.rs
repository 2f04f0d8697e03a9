use degenfrac::fractional_calculus::{caputo, frac_integral, g_kernel, FracOrder, Trajectory};
use degenfrac::special_functions::gamma;
use degenfrac::C64;
use proptest::prelude::*;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn kernel_values_and_domain() {
    assert!((g_kernel(1.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((g_kernel(2.0, 3.0).unwrap() - 3.0).abs() < 1e-14);
    assert!(g_kernel(0.0, 1.0).is_err());
    assert!(g_kernel(0.5, 0.0).is_err());
    assert!(FracOrder::new(-1.0).is_err());
    assert!(FracOrder::new(2.0).unwrap().is_integer());
    assert_eq!(FracOrder::new(1.3).unwrap().ceil, 2);
}

#[test]
fn trajectory_shape_checks() {
    assert!(Trajectory::new(0.1, vec![vec![re(1.0)], vec![re(1.0), re(2.0)]]).is_err());
    assert!(Trajectory::scalar(0.0, vec![re(1.0); 4]).is_err());
    let tr = Trajectory::sample_scalar(0.25, 8, |t| re(t)).unwrap();
    assert_eq!(tr.len(), 9);
    assert_eq!(tr.time(4), 1.0);
}

#[test]
fn caputo_needs_initial_derivatives() {
    let tr = Trajectory::sample_scalar(0.01, 100, |t| re(t * t)).unwrap();
    assert!(caputo(FracOrder::new(1.5).unwrap(), &tr, &[vec![re(0.0)]]).is_err());
}

#[test]
fn first_derivative_of_sine() {
    let dt = 1.0 / 128.0;
    let tr = Trajectory::sample_scalar(dt, 256, |t| re(t.sin())).unwrap();
    let d = caputo(FracOrder::new(1.0).unwrap(), &tr, &[vec![re(0.0)]]).unwrap();
    let worst = (0..tr.len()).map(|k| (d.component(0)[k].re - tr.time(k).cos()).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn second_derivative_of_exponential() {
    let dt = 1.0 / 128.0;
    let tr = Trajectory::sample_scalar(dt, 256, |t| re((-t).exp())).unwrap();
    let d = caputo(FracOrder::new(2.0).unwrap(), &tr, &[vec![re(1.0)], vec![re(-1.0)]]).unwrap();
    let worst = (0..tr.len()).map(|k| (d.component(0)[k].re - (-tr.time(k)).exp()).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integral_of_linear_is_exact(alpha in 0.1f64..2.5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        // g_α ∗ (a + b t) = a t^α/Γ(α+1) + b t^{α+1}/Γ(α+2)
        let tr = Trajectory::sample_scalar(1.0 / 64.0, 64, |t| re(a + b * t)).unwrap();
        let out = frac_integral(alpha, &tr).unwrap();
        for k in 0..tr.len() {
            let t = tr.time(k);
            let exact = a * t.powf(alpha) / gamma(alpha + 1.0) + b * t.powf(alpha + 1.0) / gamma(alpha + 2.0);
            prop_assert!((out.component(0)[k].re - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn caputo_of_linear(zeta in 0.05f64..0.95, b in -2.0f64..2.0) {
        // D^ζ (1 + b t) = b t^{1−ζ}/Γ(2−ζ)
        let tr = Trajectory::sample_scalar(1.0 / 64.0, 64, |t| re(1.0 + b * t)).unwrap();
        let d = caputo(FracOrder::new(zeta).unwrap(), &tr, &[vec![re(1.0)]]).unwrap();
        for k in 1..tr.len() {
            let t = tr.time(k);
            let exact = b * t.powf(1.0 - zeta) / gamma(2.0 - zeta);
            prop_assert!((d.component(0)[k].re - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
        }
    }
}
