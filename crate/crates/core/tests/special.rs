use std::f64::consts::PI;

use hardylab::quad::gauss_legendre_on;
use hardylab::special::{bessel_k1, constant, gamma_fn, sphere_area, t_k1, NamedConstant};
use proptest::prelude::*;

fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let step = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let (x, w) = gauss_legendre_on(24, a + k as f64 * step, a + (k + 1) as f64 * step);
            x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum::<f64>()
        })
        .sum()
}

#[test]
fn gamma_against_its_integral() {
    let oracle = composite(|t| t.powf(6.3) * (-t).exp(), 0.0, 90.0, 90);
    let g = gamma_fn(7.3).unwrap();
    assert!(((g - oracle) / oracle).abs() < 1e-12, "{g} vs {oracle}");
}

#[test]
fn gamma_half_integers() {
    assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-15);
    assert!((gamma_fn(1.5).unwrap() - 0.5 * PI.sqrt()).abs() < 1e-15);
    assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
}

#[test]
fn k1_small_argument() {
    let v = t_k1(1e-4);
    assert!((v - 1.0).abs() < 1e-3);
}

#[test]
fn k1_against_integral_representation() {
    for t in [1.0, 0.3, 2.5, 7.0] {
        let oracle = composite(|s| (-t * s.cosh()).exp() * s.cosh(), 0.0, 8.0, 64);
        let k = bessel_k1(t).unwrap();
        assert!(((k - oracle) / oracle).abs() < 1e-10, "t = {t}: {k} vs {oracle}");
    }
}

#[test]
fn k1_is_decreasing() {
    let samples: Vec<f64> = (1..2000).map(|k| bessel_k1(0.01 * k as f64).unwrap()).collect();
    assert!(samples.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn named_constants() {
    let c = |k, n| constant(k, n).unwrap();
    assert!((c(NamedConstant::Thm3iiiConst, 3) - 1.0 / (4.0 * PI * PI)).abs() < 1e-12);
    assert!((c(NamedConstant::Thm3iiiConst, 3) - c(NamedConstant::Thm4Const, 3)).abs() < 1e-12);
    assert!((c(NamedConstant::Thm3iConst, 2) - 1.0 / (4.0 * PI)).abs() < 1e-15);
    assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
    for n in [2, 3] {
        let cor = c(NamedConstant::CorollaryConst, n);
        assert!((cor * cor * (n as f64 - 1.0) - c(NamedConstant::Thm3iiiConst, n)).abs() < 1e-15);
        let cr = c(NamedConstant::CrScale, n);
        assert!((cr - 2f64.powi(1 - n as i32) * PI.powf(-0.5 * n as f64) / gamma_fn(0.5 * n as f64).unwrap()).abs() < 1e-15);
    }
    assert!(constant(NamedConstant::SphereArea, 1).is_err());
}

#[test]
fn constant_names_serialize_in_snake_case() {
    assert_eq!(serde_json::to_string(&NamedConstant::Thm3iiiConst).unwrap(), "\"thm3iii_const\"");
    assert_eq!(serde_json::to_string(&NamedConstant::CrScale).unwrap(), "\"cr_scale\"");
}

proptest! {
    #[test]
    fn gamma_recurrence(z in 0.05f64..40.0) {
        let a = gamma_fn(z + 1.0).unwrap();
        let b = z * gamma_fn(z).unwrap();
        prop_assert!(((a - b) / a).abs() < 1e-12);
    }

    #[test]
    fn t_k1_at_most_one(t in 0.0f64..60.0) {
        let v = t_k1(t);
        prop_assert!(v <= 1.0 && v >= 0.0);
    }
}
