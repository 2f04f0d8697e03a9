use degenfrac::physics_models::{
    build_model, closed_form_dispersion, default_grid, default_params, dispersion, named_model, spectrum_mismatch,
    Formulation, MODEL_NAMES,
};
use degenfrac::Error;
use proptest::prelude::*;
use std::collections::BTreeMap;

#[test]
fn every_model_builds() {
    for name in MODEL_NAMES {
        let m = named_model(name).unwrap();
        let g = default_grid(name).unwrap();
        assert_eq!(m.spec.n(), g.n, "{name}");
        m.spec.validate_on_grid(&g).unwrap();
    }
}

#[test]
fn unknown_model_names_alternatives() {
    match named_model("rosby") {
        Err(Error::UnknownModel { valid, .. }) => assert!(valid.contains("rossby")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn parameter_validation() {
    let mut p = BTreeMap::new();
    p.insert("gravity".to_string(), 1.0);
    assert!(matches!(build_model("sobolev", &p, Formulation::MatricialFirstOrder), Err(Error::BadParams(_))));
    let mut p = BTreeMap::new();
    p.insert("nu".to_string(), -0.1);
    assert!(matches!(build_model("rotating_viscous", &p, Formulation::MatricialFirstOrder), Err(Error::BadParams(_))));
    assert!(Formulation::parse("scalar_alpha2").is_ok());
    assert!(Formulation::parse("other").is_err());
    assert_eq!(default_params("boussinesq").unwrap()["N"], 2.0);
}

#[test]
fn mismatch_metric() {
    use degenfrac::C64;
    let a = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
    let b = [C64::new(0.0, 2.0), C64::new(1.0, 0.0)];
    assert_eq!(spectrum_mismatch(&a, &b), 0.0);
    assert!(spectrum_mismatch(&a, &b[..1]).is_infinite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dispersion_matches_closed_form(
        idx in 0usize..5,
        scalar in any::<bool>(),
        xi in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let name = MODEL_NAMES[idx];
        prop_assume!(xi.iter().map(|v| v * v).sum::<f64>() > 0.25);
        let form = if scalar && !matches!(name, "rossby" | "rotating_viscous") {
            Formulation::ScalarAlpha2
        } else {
            Formulation::MatricialFirstOrder
        };
        let model = build_model(name, &BTreeMap::new(), form).unwrap();
        let x = &xi[..model.spec.n()];
        let numeric = dispersion(&model, x).unwrap();
        let exact = closed_form_dispersion(&model, x).unwrap();
        prop_assert!(spectrum_mismatch(&numeric, &exact) <= 1e-10, "{name}: {numeric:?} vs {exact:?}");
    }
}
