use std::f64::consts::PI;

use hardylab::recipe::{generate, mean_subtract, mean_subtract_vec, random_vector, unit_bump_mass};
use hardylab::{Error, FieldRecipe, Grid, RecipeKind, ScalarField};

#[test]
fn grid_2d_spacing() {
    let g = Grid::new(2, 16.0, 64).unwrap();
    assert_eq!(g.spacing(), 0.25);
    assert_eq!(g.len(), 4096);
}

#[test]
fn grid_3d_spacing() {
    let g = Grid::new(3, 8.0, 24).unwrap();
    assert!((g.spacing() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(g.len(), 13824);
}

#[test]
fn odd_points_rejected() {
    assert_eq!(Grid::new(2, 16.0, 63), Err(Error::OddGridSize(63)));
}

#[test]
fn gaussian_bump_mass() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let r = FieldRecipe::new(RecipeKind::GaussianBump).with("width", 1.0).with("amp", 1.0).with("cutoff", 4.0);
    let f = generate(&r, &grid).unwrap().into_scalar().unwrap();
    let want = 2.0 * PI;
    assert!((f.integral() - want).abs() < 1e-3 * want, "{}", f.integral());
}

#[test]
fn dipole_pair_has_zero_mass() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let r = FieldRecipe::new(RecipeKind::DipolePair).with("sep", 2.0).with("width", 0.5);
    let f = generate(&r, &grid).unwrap().into_scalar().unwrap();
    assert!(f.integral().abs() <= 1e-14 * f.l1_norm());
}

#[test]
fn extremizer_lives_in_annulus_on_last_component() {
    let grid = Grid::new(3, 8.0, 24).unwrap();
    let r = FieldRecipe::new(RecipeKind::ExtremizerNorthpole)
        .with("r_in", 1.0)
        .with("r_out", 2.0)
        .with("rho", 0.2)
        .with("align", 0.0);
    let g = generate(&r, &grid).unwrap().into_vector().unwrap();
    assert!(g.component(0).iter().chain(g.component(1)).all(|&v| v == 0.0));
    let last = g.component(2);
    assert!(last.iter().any(|&v| v != 0.0));
    for (i, v) in last.iter().enumerate() {
        if *v != 0.0 {
            let p = grid.point(i);
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!(r > 1.0 && r < 2.0, "sample at radius {r}");
        }
    }
}

#[test]
fn mean_subtract_of_constant_on_support() {
    // the correction is a multiple of one bump, so a constant on its own
    // support is removed only in the mean
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let f = ScalarField::from_fn(grid, |p| if p[0].hypot(p[1]) < 2.0 { 1.0 } else { 0.0 }).with_support(Some(2.0));
    let m = mean_subtract(&f);
    assert!(m.integral().abs() < 1e-14 * f.l1_norm());
    assert!(m.values().iter().zip(f.values()).all(|(a, b)| *b != 0.0 || *a == 0.0));
}

#[test]
fn mean_subtract_is_idempotent() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let g = random_vector(&grid, 5, 4, 1.5, 0.8, 1.2).unwrap();
    let again = mean_subtract_vec(&g);
    let diff = again.sub(&g).unwrap().l2_norm();
    assert!(diff <= 1e-14 * g.l2_norm(), "{diff}");
}

#[test]
fn mean_subtract_gaussian() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let r = FieldRecipe::new(RecipeKind::GaussianBump).with("width", 1.0).with("cx", 0.5).with("cutoff", 3.0);
    let f = generate(&r, &grid).unwrap().into_scalar().unwrap();
    let m = mean_subtract(&f);
    let sum: f64 = m.values().iter().sum();
    let l1: f64 = m.values().iter().map(|v| v.abs()).sum();
    assert!(sum.abs() < 1e-14 * l1, "{sum} vs {l1}");
}

#[test]
fn bump_mass_matches_reference_values() {
    // reference values from adaptive quadrature of the radial integral
    assert!((unit_bump_mass(2) - 0.466_512_393_178_33).abs() < 1e-12);
    assert!((unit_bump_mass(3) - 0.441_088_887_276_604_3).abs() < 1e-12);
}

#[test]
fn support_overflow_is_reported() {
    let grid = Grid::new(2, 8.0, 32).unwrap();
    let r = FieldRecipe::new(RecipeKind::GaussianBump).with("width", 1.0).with("cutoff", 4.0);
    assert!(matches!(generate(&r, &grid), Err(Error::SupportOverflow { .. })));
}

#[test]
fn recipe_json_schema() {
    let json = r#"{"kind":"random_bumps","params":{"count":3,"spread":1.0},"seed":7}"#;
    let r: FieldRecipe = serde_json::from_str(json).unwrap();
    assert_eq!(r, FieldRecipe::new(RecipeKind::RandomBumps).with("count", 3.0).with("spread", 1.0).seed(7));
    assert!(serde_json::from_str::<FieldRecipe>(r#"{"kind":"random_bumps","extra":1}"#).is_err());
}

#[test]
fn same_seed_same_field() {
    let grid = Grid::new(3, 12.0, 24).unwrap();
    let a = random_vector(&grid, 11, 4, 1.5, 1.0, 1.4).unwrap();
    let b = random_vector(&grid, 11, 4, 1.5, 1.0, 1.4).unwrap();
    let c = random_vector(&grid, 12, 4, 1.5, 1.0, 1.4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
