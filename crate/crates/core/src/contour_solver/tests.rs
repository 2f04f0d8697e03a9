use std::f64::consts::PI;

use super::*;
use crate::special_functions::{CMatrix, MittagLeffler};
use crate::{Error, C64};

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

#[test]
fn nu_bound_examples() {
    assert_eq!(admissible_nu_bound(&[0, 1]).unwrap(), 0.0);
    assert_eq!(admissible_nu_bound(&[0, 1, 2]).unwrap(), -1.0);
    assert_eq!(admissible_nu_bound(&[0, 2]).unwrap(), -1.0);
    assert_eq!(admissible_nu_bound(&[0, 1, 1, 3]).unwrap(), -2.0);
    assert!(matches!(admissible_nu_bound(&[1, 2]), Err(Error::BadExponents(_))));
    assert!(matches!(admissible_nu_bound(&[0, 0, 1]), Err(Error::BadExponents(_))));
    assert!(matches!(admissible_nu_bound(&[0, 2, 1]), Err(Error::BadExponents(_))));
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let (x, w) = gauss_legendre(16);
    let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
    assert!((s - 2.0 / 31.0).abs() < 1e-14);
    assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
}

#[test]
fn b_midpoint_and_membership() {
    let (p, _) = scalar_scenario().unwrap();
    let q = build_contour(&p, 16, 0.01).unwrap();
    assert!((q.b - 1.5).abs() < 1e-15);
    for l in &q.nodes {
        assert!(l.norm() >= p.r * (1.0 - 1e-12));
        assert!(l.arg().abs() <= p.psi() + 1e-12);
    }
    let outer = C64::from_polar(q.truncation_radius, p.psi());
    assert!(damping(0.01, p.a, q.b, p.zeta, outer).norm() <= 1e-16);
    assert!(matches!(b_interval(1.0, PI / 2.0), Err(Error::EmptyInterval(_))));
}

#[test]
fn node_doubling_sanity() {
    let (p, _) = scalar_scenario().unwrap();
    let q = build_contour(&p, 16, 0.01).unwrap();
    let f = |l: C64| damping(0.05, p.a, q.b, p.zeta, l) / (l * l);
    let a = q.integrate(f);
    let b = q.with_points(32).integrate(f);
    assert!((a - b).norm() <= 1e-10, "{a} vs {b}");
}

#[test]
fn scalar_matches_damped_exponential() {
    let (p, data) = scalar_scenario().unwrap();
    let q = build_contour(&p, 16, 1e-3).unwrap();
    let ev = ContourEvaluator::new(&p, &q, &data).unwrap();
    for eps in [1e-3, 1e-2, 0.1] {
        for t in [0.0, 0.5, 1.0, 2.0] {
            let u = ev.eval(eps, c(t), 0).unwrap()[0];
            // Residue at λ = −α₀ carries the damping factor exactly.
            let damp = damping(eps, p.a, q.b, 1.0, c(-0.5));
            let exact = damp * (-0.5 * t).exp();
            assert!((u - exact).norm() < 1e-11, "eps {eps} t {t}: {u} vs {exact}");
        }
    }
    let u = ev.eval(1e-3, c(1.0), 0).unwrap()[0];
    assert!((u - c((-0.5f64).exp())).norm() / (-0.5f64).exp() <= 1e-2);
}

#[test]
fn zero_data_gives_zero() {
    let (p, _) = scalar_scenario().unwrap();
    let q = build_contour(&p, 16, 0.01).unwrap();
    let zero = ContourData::new(vec![vec![c(0.0)]], None);
    for t in [0.0, 1.0] {
        assert_eq!(u_epsilon(&p, &q, &zero, 0.05, c(t), 1).unwrap()[0], c(0.0));
    }
}

#[test]
fn degenerate_second_component_vanishes() {
    let (p, data) = degenerate_scenario([1.0, 0.7]).unwrap();
    let q = build_contour(&p, 16, 0.01).unwrap();
    let (ps, ds) = scalar_scenario().unwrap();
    let qs = build_contour(&ps, 16, 0.01).unwrap();
    for t in [0.0, 0.7, 1.5] {
        let u = u_epsilon(&p, &q, &data, 0.02, c(t), 0).unwrap();
        let s = u_epsilon(&ps, &qs, &ds, 0.02, c(t), 0).unwrap();
        assert!(u[1].norm() < 1e-13, "{}", u[1]);
        assert!((u[0] - s[0]).norm() < 1e-12);
    }
}

#[test]
fn pde_residual_on_scenarios() {
    let times = [0.25, 0.5, 1.0, 2.0];
    for (p, d) in [
        scalar_scenario().unwrap(),
        degenerate_scenario([1.0, 0.7]).unwrap(),
        diagonal_scenario(7).unwrap(),
        second_order_scenario().unwrap(),
    ] {
        let q = build_contour(&p, 16, 0.01).unwrap();
        let rep = verify_pde(&p, &q, &d, 0.01, &times).unwrap();
        assert!(rep.max_residual <= 1e-10 * rep.data_norm, "{rep:?}");
        assert!(rep.max_doubling_shift <= 1e-8);
    }
}

#[test]
fn fractional_scalar_tracks_mittag_leffler() {
    // D^ζ u = −α₀u: the limit is E_ζ(−α₀t^ζ)x₀ (+ t E_{ζ,2}(−α₀t^ζ) y₀ when ζ > 1).
    for (zeta, theta) in [(0.8, 0.4 * PI), (1.5, PI / 8.0)] {
        let d = |v: f64| CMatrix::from_element(1, 1, c(v));
        let p = PencilProblem::new(vec![0, 1], zeta, vec![d(0.5), d(1.0)], d(1.0), 0.0, theta, 1.0, 1.2, -0.5).unwrap();
        let q = build_contour(&p, 16, 0.01).unwrap();
        let y = (zeta > 1.0).then(|| vec![vec![c(0.3)]]);
        let data = ContourData::new(vec![vec![c(1.0)]], y);
        let ev = ContourEvaluator::new(&p, &q, &data).unwrap();
        let e1 = MittagLeffler::with(zeta, 1.0).unwrap();
        let e2 = MittagLeffler::with(zeta, 2.0).unwrap();
        let eps = 0.02;
        let damp = damping(eps, p.a, q.b, zeta, c(-0.5));
        for t in [0.3f64, 1.0, 2.0] {
            let w = c(-0.5 * t.powf(zeta));
            let mut exact = e1.eval(w).unwrap();
            if zeta > 1.0 {
                exact += c(0.3 * t) * e2.eval(w).unwrap();
            }
            let u = ev.eval(eps, c(t), 0).unwrap()[0];
            assert!((u - damp * exact).norm() < 1e-10, "zeta {zeta} t {t}: {u} vs {}", damp * exact);
            let du = ev.eval(eps, c(t), 1).unwrap()[0];
            assert!((du + 0.5 * u).norm() < 1e-10);
        }
    }
}

#[test]
fn initial_limit_scalar_and_second_order() {
    let eps = [0.1, 0.05, 0.025, 0.0125];
    let (p, d) = scalar_scenario().unwrap();
    let q = build_contour(&p, 16, 0.0125).unwrap();
    let rep = initial_limit_check(&p, &q, &d, &eps, 0, 0).unwrap();
    assert!(rep.monotone, "{rep:?}");
    assert!(rep.limit_error <= 1e-4 * rep.scale, "{rep:?}");

    let (p, d) = second_order_scenario().unwrap();
    let q = build_contour(&p, 16, 0.0125).unwrap();
    for (l, w) in [(0, 0), (1, 1), (1, 0), (0, 1)] {
        let rep = initial_limit_check(&p, &q, &d, &eps, l, w).unwrap();
        assert!(rep.limit_error <= 1e-4 * rep.scale.max(1.0), "l {l} w {w}: {rep:?}");
    }
    let zero = ContourData::new(vec![vec![c(0.0)], vec![c(0.5)]], None);
    let rep = initial_limit_check(&p, &q, &zero, &eps, 0, 0).unwrap();
    assert!(rep.deviations.iter().all(|&d| d == 0.0));
}

#[test]
fn damping_constant_is_moderate() {
    let (p, _) = scalar_scenario().unwrap();
    let q = build_contour(&p, 16, 0.01).unwrap();
    let zs = [c(0.5), c(2.0), C64::new(1.0, 1.0), C64::from_polar(2.0, PI / 4.0)];
    let k = damping_constant(&p, &q, 0.05, &zs).unwrap();
    assert!(k <= 10.0, "{k}");
}

#[test]
fn linear_in_data() {
    let (p, d) = diagonal_scenario(3).unwrap();
    let q = build_contour(&p, 16, 0.01).unwrap();
    let twice = ContourData::new(d.x.iter().map(|v| v.iter().map(|x| x * 2.0).collect()).collect(), None);
    let a = u_epsilon(&p, &q, &d, 0.05, c(1.0), 0).unwrap();
    let b = u_epsilon(&p, &q, &twice, 0.05, c(1.0), 0).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x * 2.0 - y).norm() <= 1e-14 * (1.0 + y.norm()));
    }
}

#[test]
fn resolvent_scenarios() {
    let g = Geometry { zeta: 1.0, phi: 0.0, theta: PI / 4.0, r: 3.0, a: 4.0, nu_prime: -0.5 };
    let nil = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let p = resolvent_scenario(&nil, &[vec![c(0.0), c(1.0)], vec![c(1.0)]], vec![0, 1], c(1.0), g).unwrap();
    let expect = CMatrix::identity(2, 2) + &nil * c(2.0);
    assert!((&p.c - expect).norm() < 1e-14);

    let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0), c(-2.0)]));
    let p = resolvent_scenario(&a, &[vec![c(0.0), c(1.0)], vec![c(1.0)]], vec![0, 1], c(1.0), g).unwrap();
    assert!(p.sector_constant.is_finite());
    assert!(matches!(
        resolvent_scenario(&a, &[vec![c(0.0), c(1.0)], vec![c(1.0)]], vec![0, 1], c(-2.0), g),
        Err(Error::NotResolvent(_))
    ));
    let tight = Geometry { r: 1.0, a: 2.0, ..g };
    assert!(matches!(
        resolvent_scenario(&a, &[vec![c(0.0), c(1.0)], vec![c(1.0)]], vec![0, 1], c(1.0), tight),
        Err(Error::RootEscape(_))
    ));
}

#[test]
fn pencil_resolvent_is_analytic_off_the_poles() {
    let (p, _) = diagonal_scenario(11).unwrap();
    let x = [c(1.0), c(-0.5), C64::new(0.2, 0.3)];
    for center in [C64::from_polar(2.0, 0.3), C64::from_polar(3.0, -1.0), c(5.0)] {
        let rep = crate::degenerate_solver::analyticity_check(|l| p.resolvent_map(l, &x), center, 0.5, 32, false).unwrap();
        assert!(rep.defect <= 1e-8, "{rep:?}");
    }
}

#[test]
fn json_round_trip() {
    let (p, _) = diagonal_scenario(5).unwrap();
    let back = PencilProblem::from_json(&p.to_json()).unwrap();
    assert_eq!(back.q, p.q);
    assert_eq!(back.ops, p.ops);
    assert_eq!(back.c, p.c);
    assert_eq!(back.sector_constant, p.sector_constant);
}

#[test]
fn invariants_rejected() {
    let d = |v: f64| CMatrix::from_element(1, 1, c(v));
    let mk = |theta: f64, r: f64, a: f64, nu: f64, cc: f64| {
        PencilProblem::new(vec![0, 1], 1.0, vec![d(0.5), d(1.0)], d(cc), 0.0, theta, r, a, nu)
    };
    assert!(mk(PI / 4.0, 1.0, 1.2, -0.5, 1.0).is_ok());
    assert!(mk(PI / 2.0, 1.0, 1.2, -0.5, 1.0).is_err());
    assert!(mk(PI / 4.0, 1.0, 0.9, -0.5, 1.0).is_err());
    assert!(mk(PI / 4.0, 1.0, 1.2, 0.0, 1.0).is_err());
    assert!(mk(PI / 4.0, 1.0, 1.2, -0.5, 0.0).is_err());
    // A pole on a sampled arc point.
    let psi = PI / 2.0 + PI / 4.0;
    let pole = C64::from_polar(1.0, -psi + 2.0 * psi * 0.5 / 40.0);
    let a0 = CMatrix::from_element(1, 1, -pole);
    assert!(matches!(
        PencilProblem::new(vec![0, 1], 1.0, vec![a0, d(1.0)], d(1.0), 0.0, PI / 4.0, 1.0, 1.2, -0.5),
        Err(Error::PencilSingular(_))
    ));
}
