use std::f64::consts::PI;

use hardylab::quad::gauss_legendre_on;
use hardylab::recipe::{generate, random_vector};
use hardylab::spectral::{self, EpsProfile};
use hardylab::{FieldRecipe, FrequencyQuadrature, Grid, RecipeKind, ScalarField, VectorField};

fn gaussian(grid: Grid) -> ScalarField {
    ScalarField::from_fn(grid, |p| (-0.5 * p.iter().map(|x| x * x).sum::<f64>()).exp())
}

fn dipole(grid: &Grid) -> ScalarField {
    let r = FieldRecipe::new(RecipeKind::DipolePair).with("sep", 1.0).with("width", 0.4);
    generate(&r, grid).unwrap().into_scalar().unwrap()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let s: f64 = b.iter().map(|y| y * y).sum();
    (d / s).sqrt()
}

#[test]
fn gaussian_transform_closed_form() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let s = spectral::dft(&gaussian(grid));
    let cap = 0.5 * PI / grid.spacing();
    let mut checked = 0;
    for (i, c) in s.coeffs().iter().enumerate() {
        let xi = s.frequency(i);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if r2.sqrt() <= cap {
            let want = 2.0 * PI * (-0.5 * r2).exp();
            // absolute slack for coefficients far below the peak
            assert!((c - want).norm() < 1e-3 * want + 1e-12, "xi = {xi:?}: {c} vs {want}");
            checked += 1;
        }
    }
    assert!(checked > 700);
}

#[test]
fn single_cell_has_flat_spectrum() {
    let grid = Grid::new(2, 8.0, 16).unwrap();
    let mut f = ScalarField::zeros(grid);
    f.values_mut()[grid.ravel(&[8, 8])] = 1.0;
    let s = spectral::dft(&f);
    let m0 = s.coeffs()[0].norm();
    assert!(s.coeffs().iter().all(|c| (c.norm() - m0).abs() < 1e-14 * m0));
}

#[test]
fn round_trip() {
    for (n, l, m) in [(2, 16.0, 64), (3, 12.0, 24)] {
        let grid = Grid::new(n, l, m).unwrap();
        let g = random_vector(&grid, 3, 4, 1.5, 1.0, 1.4).unwrap();
        let f = g.component_field(0);
        let back = spectral::idft(&spectral::dft(&f));
        assert!(rel_l2(back.values(), f.values()) < 1e-12);
    }
}

#[test]
fn power_zero_is_identity() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let f = random_vector(&grid, 1, 4, 1.5, 0.8, 1.2).unwrap().component_field(1);
    let g = spectral::frac_laplacian_power(&f, 0.0).unwrap();
    assert!(rel_l2(g.values(), f.values()) < 1e-12);
}

#[test]
fn single_mode_inverse_laplacian() {
    let l = 16.0;
    let grid = Grid::new(2, l, 64).unwrap();
    let k = 2.0 * PI / l;
    let f = ScalarField::from_fn(grid, |p| (k * p[0]).sin());
    let u = spectral::frac_laplacian_power(&f, -2.0).unwrap();
    let want: Vec<f64> = f.values().iter().map(|v| v / (k * k)).collect();
    assert!(rel_l2(u.values(), &want) < 1e-12);
}

#[test]
fn spectral_and_kernel_newtonian_potentials_agree() {
    // the periodic solution is fixed only up to a constant, and its images
    // add a field of size ~ p / L^2
    let grid = Grid::new(2, 32.0, 256).unwrap();
    let f = dipole(&grid);
    let us = spectral::frac_laplacian_power(&f, -2.0).unwrap();
    let uk = hardylab::kernel::newtonian_potential(&f).unwrap();
    let support: Vec<usize> = (0..grid.len()).filter(|&i| f.values()[i] != 0.0).collect();
    let pick = |u: &ScalarField| {
        let mean = support.iter().map(|&i| u.values()[i]).sum::<f64>() / support.len() as f64;
        support.iter().map(|&i| u.values()[i] - mean).collect::<Vec<f64>>()
    };
    let d = rel_l2(&pick(&us), &pick(&uk));
    assert!(d < 0.02, "relative L2 difference {d}");
}

#[test]
fn gaussian_l2_norm_closed_form() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let v = spectral::sobolev_norm_homog(&gaussian(grid), 0.0).unwrap().powi(2);
    let want = 4.0 * PI.powi(3);
    assert!((v - want).abs() < 0.01 * want, "{v} vs {want}");
}

#[test]
fn zero_field_has_zero_norm() {
    let grid = Grid::new(3, 12.0, 24).unwrap();
    let z = ScalarField::zeros(grid);
    assert_eq!(spectral::sobolev_norm_homog(&z, -1.5).unwrap(), 0.0);
    assert_eq!(spectral::sobolev_norm_inhomog(&z, -3.0), 0.0);
}

#[test]
fn critical_norm_is_refinement_stable() {
    let coarse = Grid::new(2, 16.0, 64).unwrap();
    let fine = coarse.refined().unwrap();
    let a = spectral::sobolev_norm_homog_with(&dipole(&coarse), -1.0, FrequencyQuadrature::FreeSpace).unwrap();
    let b = spectral::sobolev_norm_homog_with(&dipole(&fine), -1.0, FrequencyQuadrature::FreeSpace).unwrap();
    assert!(a.is_finite() && a > 0.0);
    assert!((a - b).abs() < 0.03 * b, "{a} vs {b}");
}

#[test]
fn critical_norm_needs_mean_zero() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    assert!(matches!(
        spectral::sobolev_norm_homog(&gaussian(grid), -1.0),
        Err(hardylab::Error::MeanNotZero { .. })
    ));
}

#[test]
fn inhomogeneous_order_zero_matches_homogeneous() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let f = dipole(&grid);
    let a = spectral::sobolev_norm_inhomog(&f, 0.0);
    let b = spectral::sobolev_norm_homog(&f, 0.0).unwrap();
    assert!((a - b).abs() < 1e-12 * b);
}

#[test]
fn inhomogeneous_weight_on_unit_mode() {
    // box 2 pi: the lowest mode has |xi| = 1 and weight 2^{l/2}
    let grid = Grid::new(2, 2.0 * PI, 32).unwrap();
    let f = ScalarField::from_fn(grid, |p| p[0].cos());
    let h = spectral::sobolev_norm_homog(&f, 0.0).unwrap();
    for l in [-3.0, -1.0, 2.0] {
        let v = spectral::sobolev_norm_inhomog(&f, l);
        let want = 2f64.powf(0.25 * l) * h;
        assert!((v - want).abs() < 1e-12 * want, "l = {l}");
    }
}

#[test]
fn inhomogeneous_gaussian_matches_radial_integral() {
    let mut oracle = 0.0;
    for k in 0..16 {
        let (r, w) = gauss_legendre_on(20, 0.5 * k as f64, 0.5 * (k + 1) as f64);
        oracle += r.iter().zip(&w).map(|(r, w)| w * (r * r + 1.0).powf(-0.5) * (-r * r).exp() * r).sum::<f64>();
    }
    oracle *= (2.0 * PI).powi(3);
    let a = spectral::sobolev_norm_inhomog(&gaussian(Grid::new(2, 16.0, 64).unwrap()), -1.0).powi(2);
    let b = spectral::sobolev_norm_inhomog(&gaussian(Grid::new(2, 16.0, 128).unwrap()), -1.0).powi(2);
    assert!((a - b).abs() < 0.02 * b);
    assert!((b - oracle).abs() < 0.01 * oracle, "{b} vs {oracle}");
}

#[test]
fn riesz_of_radial_field_is_radial() {
    let grid = Grid::new(2, 16.0, 128).unwrap();
    let r = FieldRecipe::new(RecipeKind::RadialRing).with("radius", 1.5).with("width", 1.0);
    let f = generate(&r, &grid).unwrap().into_scalar().unwrap();
    let g = spectral::riesz_transform(&f).unwrap();
    let mag = g.magnitude();
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in (0..grid.len()).step_by(37) {
        let p = grid.point(i);
        let rad = p[0].hypot(p[1]);
        if rad > 0.5 && rad < 3.0 && mag[i] > 0.05 * peak {
            let cross = g.component(0)[i] * p[1] - g.component(1)[i] * p[0];
            worst = worst.max(cross.abs() / (mag[i] * rad));
        }
    }
    assert!(worst < 0.02, "angular deviation {worst}");
}

#[test]
fn riesz_of_single_mode() {
    let grid = Grid::new(2, 2.0 * PI, 32).unwrap();
    let f = ScalarField::from_fn(grid, |p| p[0].cos());
    let g = spectral::riesz_transform(&f).unwrap();
    // symbol +i xi/|xi| turns cos(x1) into -sin(x1)
    let want: Vec<f64> = grid.points().iter().map(|p| -p[0].sin()).collect();
    assert!(rel_l2(g.component(0), &want) < 1e-12);
    assert!(g.component(1).iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn riesz_l1_norm_is_refinement_stable() {
    let coarse = Grid::new(2, 16.0, 64).unwrap();
    let norm = |grid: &Grid| {
        let r = spectral::riesz_transform(&dipole(grid)).unwrap();
        r.magnitude().iter().sum::<f64>() * grid.cell_volume()
    };
    let (a, b) = (norm(&coarse), norm(&coarse.refined().unwrap()));
    assert!(a.is_finite() && (a - b).abs() < 0.03 * b, "{a} vs {b}");
}

#[test]
fn leray_kills_gradients() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let u = dipole(&grid);
    let g = spectral::gradient(&u);
    let p = spectral::leray_project(&g).unwrap();
    assert!(p.l2_norm() < 1e-10 * g.l2_norm());
}

#[test]
fn leray_is_idempotent() {
    let grid = Grid::new(3, 12.0, 24).unwrap();
    let g = random_vector(&grid, 8, 4, 1.5, 1.0, 1.4).unwrap();
    let p = spectral::leray_project(&g).unwrap();
    let pp = spectral::leray_project(&p).unwrap();
    assert!(pp.sub(&p).unwrap().l2_norm() < 1e-10 * p.l2_norm());
}

#[test]
fn leray_output_is_divergence_free() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let g = random_vector(&grid, 2, 4, 1.5, 0.8, 1.2).unwrap();
    let p = spectral::leray_project(&g).unwrap();
    let d = spectral::divergence(&p);
    let hn = spectral::sobolev_norm_homog(&d, -2.0).unwrap();
    let out = spectral::sobolev_norm_homog_vec(&p, 0.0, FrequencyQuadrature::Lattice).unwrap();
    assert!(hn < 1e-10 * out, "{hn} vs {out}");
}

#[test]
fn regularization_leaves_mean_zero_fields_alone() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let g = random_vector(&grid, 4, 4, 1.5, 0.8, 1.2).unwrap();
    // the random field has a tiny but nonzero rounding mean; zero it exactly
    let exact = VectorField::zeros(grid);
    assert_eq!(spectral::regularize_eps(&exact, 1.0, EpsProfile::Gaussian).unwrap(), exact);
    let r = spectral::regularize_eps(&g, 1.0, EpsProfile::Gaussian).unwrap();
    assert!(r.sub(&g).unwrap().l2_norm() < 1e-14 * g.l2_norm());
}

#[test]
fn regularization_correction_is_scaled_gaussian() {
    let grid = Grid::new(2, 16.0, 64).unwrap();
    let r = FieldRecipe::new(RecipeKind::GaussianBump).with("width", 0.5).with("cx", 1.0).with("cutoff", 4.0);
    let b = generate(&r, &grid).unwrap().into_scalar().unwrap();
    let b = b.scaled(1.0 / b.integral());
    let g = VectorField::from_scalars(vec![b.clone(), ScalarField::zeros(grid)]).unwrap();
    let ge = spectral::regularize_eps(&g, 1.0, EpsProfile::Gaussian).unwrap();
    for i in 0..grid.len() {
        let p = grid.point(i);
        let want = (2.0 * PI).recip() * (-0.5 * (p[0] * p[0] + p[1] * p[1])).exp();
        assert!((b.values()[i] - ge.component(0)[i] - want).abs() < 1e-14);
    }
    assert!(ge.component(1).iter().all(|&v| v == 0.0));
}

#[test]
fn regularized_mean_is_small() {
    let r = FieldRecipe::new(RecipeKind::GaussianBump).with("width", 0.5).with("dir_x", 1.0).with("cutoff", 4.0);
    for l in [14.0, 16.0, 24.0] {
        let grid = Grid::new(2, l, 64).unwrap();
        let g = generate(&r, &grid).unwrap().into_vector().unwrap();
        let ge = spectral::regularize_eps(&g, 1.0, EpsProfile::Gaussian).unwrap();
        let m = ge.integral();
        assert!(m[0].abs() < 1e-8 * g.l1_norm(), "L = {l}: {m:?}");
    }
}

#[test]
fn gaussian_profile_needs_a_big_enough_box() {
    let grid = Grid::new(2, 8.0, 32).unwrap();
    let g = VectorField::zeros(grid);
    assert!(matches!(
        spectral::regularize_eps(&g, 1.0, EpsProfile::Gaussian),
        Err(hardylab::Error::EpsilonTooSmallForBox { .. })
    ));
}
