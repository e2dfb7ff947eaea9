use std::f64::consts::PI;

use hardylab::kernel::{matrix_kernel_form, weighted_lq_norm, HomogeneousIntegrand, KernelPath, MatrixKernel};
use hardylab::lab::*;
use hardylab::recipe::{generate, mean_subtract, random_scalar, random_vector};
use hardylab::spectral::{self, FrequencyQuadrature};
use hardylab::{FieldRecipe, Grid, RecipeKind, ScalarField, VectorField};
use proptest::prelude::*;

fn small_grid(n: usize) -> Grid {
    Grid::new(n, 4.0, if n == 2 { 16 } else { 8 }).unwrap()
}

fn scalar_from(grid: Grid, vals: &[f64]) -> ScalarField {
    ScalarField::new(grid, vals[..grid.len()].to_vec()).unwrap()
}

fn centred(grid: Grid, vals: &[f64]) -> ScalarField {
    let v = &vals[..grid.len()];
    let m = v.iter().sum::<f64>() / v.len() as f64;
    ScalarField::new(grid, v.iter().map(|x| x - m).collect()).unwrap()
}

fn dot(a: &VectorField, b: &VectorField) -> f64 {
    a.components().iter().zip(b.components()).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q)).sum()
}

fn diff_l2(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() * a.grid().cell_volume().sqrt()
}

/// Drop the Nyquist rows, where derivative symbols are set to zero.
fn band_limited(u: &ScalarField) -> ScalarField {
    let grid = *u.grid();
    let s = spectral::dft(u).map(|i, c| if grid.is_nyquist(i) { c * 0.0 } else { c });
    spectral::idft(&s)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn unit(v: [f64; 3], n: usize) -> Option<Vec<f64>> {
    let r = v[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
    (r > 1e-6).then(|| v[..n].iter().map(|x| x / r).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plancherel(vals in prop::collection::vec(-1.0f64..1.0, 512), three in any::<bool>()) {
        let grid = small_grid(if three { 3 } else { 2 });
        let f = scalar_from(grid, &vals);
        let s = spectral::dft(&f);
        let dxi = grid.freq_spacing().powi(grid.dim() as i32);
        let lhs = f.l2_norm().powi(2);
        let rhs = (2.0 * PI).powi(-(grid.dim() as i32)) * dxi * s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
        prop_assert!(rel(rhs, lhs) < 1e-10);
        let back = spectral::idft(&s);
        let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10 * f.max_abs());
    }

    #[test]
    fn multipliers_compose(vals in prop::collection::vec(-1.0f64..1.0, 512), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = centred(small_grid(2), &vals);
        let two = spectral::frac_laplacian_power(&spectral::frac_laplacian_power(&f, a).unwrap(), b).unwrap();
        let one = spectral::frac_laplacian_power(&f, a + b).unwrap();
        prop_assert!(diff_l2(&two, &one) <= 1e-10 * one.l2_norm().max(f.l2_norm()));
    }

    #[test]
    fn leray_is_an_orthogonal_projection(u in prop::collection::vec(-1.0f64..1.0, 512), v in prop::collection::vec(-1.0f64..1.0, 512)) {
        let grid = small_grid(2);
        let field = |w: &[f64]| VectorField::from_scalars(vec![centred(grid, &w[..256]), centred(grid, &w[256..])]).unwrap();
        let (u, v) = (field(&u), field(&v));
        let pu = spectral::leray_project(&u).unwrap();
        let pv = spectral::leray_project(&v).unwrap();
        let ppu = spectral::leray_project(&pu).unwrap();
        prop_assert!(ppu.sub(&pu).unwrap().l2_norm() <= 1e-10 * pu.l2_norm());
        let scale = u.l2_norm() * v.l2_norm() / grid.cell_volume();
        prop_assert!((dot(&pu, &v) - dot(&u, &pv)).abs() <= 1e-10 * scale);
    }

    #[test]
    fn divergence_of_gradient_is_minus_laplacian(seed in 0u64..1000) {
        let grid = Grid::new(2, 16.0, 64).unwrap();
        let u = band_limited(&random_scalar(&grid, seed, 4, 1.5, 0.8, 1.2).unwrap());
        let lhs = spectral::divergence(&spectral::gradient(&u));
        let rhs = spectral::frac_laplacian_power(&u, 2.0).unwrap().scaled(-1.0);
        prop_assert!(diff_l2(&lhs, &rhs) <= 1e-10 * rhs.l2_norm());
    }

    #[test]
    fn corollary_norms_agree(seed in 0u64..1000, three in any::<bool>()) {
        let grid = if three { Grid::new(3, 12.0, 24).unwrap() } else { Grid::new(2, 16.0, 64).unwrap() };
        let n = grid.dim() as f64;
        let u = band_limited(&mean_subtract(&random_scalar(&grid, seed, 4, 1.5, 1.0, 1.4).unwrap()));
        let g = spectral::gradient(&u);
        let a = spectral::sobolev_norm_homog_vec(&g, -0.5 * n, FrequencyQuadrature::Lattice).unwrap();
        let b = spectral::sobolev_norm_homog(&u, 1.0 - 0.5 * n).unwrap();
        prop_assert!(rel(a, b) < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn generated_fields_respect_their_contract(seed in any::<u64>(), count in 1usize..6, spread in 0.0f64..1.5) {
        let grid = Grid::new(2, 16.0, 64).unwrap();
        let g = random_vector(&grid, seed, count, spread, 0.6, 1.0).unwrap();
        for c in g.components() {
            let sum: f64 = c.iter().sum();
            let l1: f64 = c.iter().map(|v| v.abs()).sum();
            prop_assert!(sum.abs() <= 1e-12 * l1);
        }
        let r = g.support_radius().unwrap();
        for (i, m) in g.magnitude().iter().enumerate() {
            let p = grid.point(i);
            if p[0].hypot(p[1]) > r {
                prop_assert_eq!(*m, 0.0);
            }
        }
        prop_assert_eq!(&g, &random_vector(&grid, seed, count, spread, 0.6, 1.0).unwrap());
    }

    #[test]
    fn integrand_is_positively_homogeneous(v in prop::array::uniform3(-3.0f64..3.0), t in 0.01f64..50.0, q in 1.0f64..1.5) {
        let phi = HomogeneousIntegrand::AbsPowerCombo { coeffs: vec![1.0, -2.0, 0.5], q };
        let tv = v.map(|x| t * x);
        let (a, b) = (phi.eval(&tv), t.powf(q) * phi.eval(&v));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn kernel_norm_bounds(v in prop::array::uniform3(-1.0f64..1.0), three in any::<bool>()) {
        let n = if three { 3 } else { 2 };
        if let Some(w) = unit(v, n) {
            let nf = n as f64;
            prop_assert!(MatrixKernel::M.operator_norm(&w) <= (nf - 1.0) / nf + 1e-12);
            prop_assert!((MatrixKernel::MHalf.operator_norm(&w) - 0.5).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kernel_form_is_rotation_invariant(seed in 0u64..1000, three in any::<bool>()) {
        let g = if three {
            random_vector(&Grid::new(3, 12.0, 24).unwrap(), seed, 4, 1.5, 1.0, 1.4).unwrap()
        } else {
            random_vector(&Grid::new(2, 16.0, 64).unwrap(), seed, 4, 1.5, 0.8, 1.2).unwrap()
        };
        let a = matrix_kernel_form(&g, MatrixKernel::M, KernelPath::Fft);
        let b = matrix_kernel_form(&g.rotate_quarter(), MatrixKernel::M, KernelPath::Fft);
        prop_assert!(rel(b, a) < 0.02, "{} vs {}", a, b);
    }

    #[test]
    fn weighted_norm_interpolates(seed in 0u64..1000, q in 1.01f64..1.99) {
        let grid = Grid::new(2, 16.0, 64).unwrap();
        let f = random_scalar(&grid, seed, 4, 1.5, 0.8, 1.2).unwrap();
        let theta = 2.0 * (1.0 - 1.0 / q);
        let lhs = weighted_lq_norm(&f, q, false).unwrap();
        let low = weighted_lq_norm(&f, 1.0, false).unwrap();
        let high = weighted_lq_norm(&f, 2.0, true).unwrap();
        prop_assert!(lhs <= low.powf(1.0 - theta) * high.powf(theta) * (1.0 + 1e-12));
    }

    #[test]
    fn checker_ratios_are_homogeneous(seed in 0u64..1000, lambda in 0.01f64..100.0) {
        let grid = Grid::new(2, 16.0, 64).unwrap();
        let g = random_vector(&grid, seed, 4, 1.5, 0.8, 1.2).unwrap();
        let gl = g.scaled(lambda);
        let f = divfree(&grid, seed);
        let fl = f.scaled(lambda);
        let u = random_scalar(&grid, seed, 4, 1.5, 0.8, 1.2).unwrap();
        let ul = u.scaled(lambda);
        let s = mean_subtract(&u);
        let sl = s.scaled(lambda);
        let phi = HomogeneousIntegrand::AbsPowerCombo { coeffs: vec![1.0, -1.0], q: 1.0 };
        let pairs = [
            (theorem1_check(&s, &phi, 1.0).unwrap().ratio, theorem1_check(&sl, &phi, 1.0).unwrap().ratio),
            (theorem2_check(&f, 1.0).unwrap().ratio, theorem2_check(&fl, 1.0).unwrap().ratio),
            (lemma10x_check(&f, 1.2).unwrap().ratio, lemma10x_check(&fl, 1.2).unwrap().ratio),
            (prop1_check(&g, 1.5).unwrap().ratio, prop1_check(&gl, 1.5).unwrap().ratio),
            (prop2_check(&g).unwrap().ratio, prop2_check(&gl).unwrap().ratio),
            (theorem3_identity_check(&g).unwrap().ratio, theorem3_identity_check(&gl).unwrap().ratio),
            (theorem3iii_check(&g).unwrap().ratio, theorem3iii_check(&gl).unwrap().ratio),
            (corollary_check(&u).unwrap().ratio, corollary_check(&ul).unwrap().ratio),
            (cr_identity_check(&g).unwrap().ratio, cr_identity_check(&gl).unwrap().ratio),
            (cre_identity_check(&u).unwrap().ratio, cre_identity_check(&ul).unwrap().ratio),
            (prop4_check(&g).unwrap().ratio, prop4_check(&gl).unwrap().ratio),
            (remark5_check(&g, 1.0).unwrap().ratio, remark5_check(&gl, 1.0).unwrap().ratio),
        ];
        for (k, (a, b)) in pairs.iter().enumerate() {
            prop_assert!(rel(b.unwrap(), a.unwrap()) < 1e-10, "checker {}: {:?} vs {:?}", k, a, b);
        }
    }

    #[test]
    fn t3iii_dilation_covariance(seed in 0u64..1000) {
        // same samples on a box half the size: x -> 2x with amplitude 2^n
        let grid = Grid::new(2, 16.0, 64).unwrap();
        let g = random_vector(&grid, seed, 4, 1.5, 0.8, 1.2).unwrap();
        let half = Grid::new(2, 8.0, 64).unwrap();
        let comps = g.components().iter().map(|c| c.iter().map(|v| 4.0 * v).collect()).collect();
        let gd = VectorField::new(half, comps).unwrap();
        assert!((gd.l1_norm() - g.l1_norm()).abs() < 1e-12 * g.l1_norm());
        let a = theorem3iii_check(&g).unwrap().ratio.unwrap();
        let b = theorem3iii_check(&gd).unwrap().ratio.unwrap();
        prop_assert!(rel(b, a) < 0.05, "{} vs {}", a, b);
    }
}

fn divfree(grid: &Grid, seed: u64) -> VectorField {
    let r = FieldRecipe::new(RecipeKind::DivfreeProjected)
        .with("spread", 1.5)
        .with("wmin", 0.8)
        .with("wmax", 1.2)
        .seed(seed);
    generate(&r, grid).unwrap().into_vector().unwrap()
}

#[test]
fn forcing_grows_off_the_sharp_coefficient() {
    let grid = Grid::new(2, 6.4, 128).unwrap();
    let widths = [0.4, 0.2, 0.1, 0.05];
    let off = forcing_trend(&grid, 1.0, &widths, 1.0).unwrap();
    let sharp = forcing_trend(&grid, 2.0, &widths, 1.0).unwrap();
    assert!(off.strictly_increasing(), "{:?}", off.values);
    // logarithmic growth in 1/width
    let x: Vec<f64> = widths.iter().map(|w| (1.0 / w).ln()).collect();
    let fit = linear_fit(&x, &off.values);
    assert!(fit.slope > 0.0 && fit.r_squared > 0.95, "{fit:?}");
    let c = hardylab::special::constant(hardylab::special::NamedConstant::Thm3iiiConst, 2).unwrap();
    assert!(sharp.max_abs() <= 1.02 * c, "{:?}", sharp.values);
    let growth_off = off.values[3] - off.values[0];
    let growth_sharp = sharp.values[3] - sharp.values[0];
    assert!(growth_sharp.abs() < 0.25 * growth_off, "{:?} vs {:?}", sharp.values, off.values);
}
