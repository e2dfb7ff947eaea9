use std::f64::consts::PI;

use num_complex::Complex64;

use super::{linear_fit, InequalityReport, ResultId, TrendArm, TrendReport};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{norm, Grid};
use crate::kernel::{
    check_q, matrix_kernel_form, radius_ladder, truncated_phi_integrals, weighted_lq_norm_of,
    HomogeneousIntegrand, KernelPath, MatrixKernel,
};
use crate::recipe::{bump, generate, FieldRecipe, RecipeKind};
use crate::reduce::pairwise_sum;
use crate::special::{constant, sphere_area, t_k1, NamedConstant};
use crate::spectral::{
    self, check_mean_zero_vec, div_norm_sq, div_norm_sq_inhomog, homog_norm_sq, inhomog_norm_sq,
    EpsProfile, FrequencyQuadrature, SpectralSampler, MEAN_TOL,
};

const FREE: FrequencyQuadrature = FrequencyQuadrature::FreeSpace;

/// Sphere-mean tolerance for T1 integrands.
pub const SPHERE_MEAN_TOL: f64 = 1e-8;
/// Divergence tolerance, relative to `||f||_2 / h`.
pub const DIVFREE_TOL: f64 = 1e-10;
/// Mean tolerance after the Gaussian regularization (its tail is cut by the box).
pub const EPS_MEAN_TOL: f64 = 1e-6;

fn two_pi_n(n: usize) -> f64 {
    (2.0 * PI).powi(-(n as i32))
}

fn l2_rel(a: &[f64], b: &[f64]) -> f64 {
    let num: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    let den: Vec<f64> = b.iter().map(|y| y * y).collect();
    (pairwise_sum(&num) / pairwise_sum(&den)).sqrt()
}

fn require_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 3 {
        return Err(Error::LadderTooShort { min: 3, got: ladder.len() });
    }
    if ladder.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidParameter("ladder entries must be positive".into()));
    }
    Ok(())
}

fn check_divfree(f: &VectorField) -> Result<f64> {
    let div = spectral::divergence(f);
    let scale = f.l2_norm() / f.grid().spacing();
    let defect = if scale > 0.0 { div.l2_norm() / scale } else { 0.0 };
    if defect > DIVFREE_TOL {
        return Err(Error::NotDivergenceFree(defect));
    }
    Ok(defect)
}

// ---------------------------------------------------------------------------
// quadratic forms shared by several checkers

/// Parts of `(2 pi)^{-n} (||g||^2_{H^{-n/2}} - n ||div g||^2_{H^{-1-n/2}})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm {
    pub norm_sq: f64,
    pub div_sq: f64,
    /// Normalized difference.
    pub value: f64,
}

fn quadratic_form_of(sampler: &SpectralSampler, n: usize) -> QuadraticForm {
    let nf = n as f64;
    let norm_sq = homog_norm_sq(sampler, -0.5 * nf);
    let div_sq = div_norm_sq(sampler, -1.0 - 0.5 * nf);
    QuadraticForm { norm_sq, div_sq, value: two_pi_n(n) * (norm_sq - nf * div_sq) }
}

/// Spectral side of the T3 identity, free-space quadrature.
pub fn theorem3_form(g: &VectorField) -> Result<QuadraticForm> {
    check_mean_zero_vec(g, MEAN_TOL)?;
    Ok(quadratic_form_of(&SpectralSampler::from_vector(g, FREE), g.dim()))
}

/// `|S^{n-1}| (2 pi)^{-n} int int (M(x - y) g(y), g(x))`.
pub fn theorem3_kernel_side(g: &VectorField, path: KernelPath) -> f64 {
    let n = g.dim();
    sphere_area(n) * two_pi_n(n) * matrix_kernel_form(g, MatrixKernel::M, path)
}

// ---------------------------------------------------------------------------
// T1

/// Weighted truncated integrals of `Phi(grad u)`, `u = Gamma * f`, on the
/// default radius ladder.
fn phi_profile(f: &ScalarField, phi: &HomogeneousIntegrand, q: f64, probe: bool) -> Result<Vec<f64>> {
    let grad = spectral::grad_inverse_laplacian(f)?;
    truncated_phi_integrals(&grad, phi, q, &radius_ladder(f.grid()), probe)
}

pub fn theorem1_check(f: &ScalarField, phi: &HomogeneousIntegrand, q: f64) -> Result<InequalityReport> {
    let n = f.grid().dim();
    check_q(n, q, false)?;
    let mean = phi.sphere_integral(n)?;
    if mean.abs() > SPHERE_MEAN_TOL {
        return Err(Error::SphereMeanNonzero(mean));
    }
    let prof = phi_profile(f, phi, q, false)?;
    let lhs = prof.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rhs = f.l1_norm().powf(q);
    Ok(InequalityReport::new(ResultId::T1, f.grid(), Some(q), lhs, rhs).note("phi_sphere_integral", mean))
}

/// Unit-mass mollified delta pair `phi_rho(x) - phi_rho(x - a)`, `a` along
/// the first axis, snapped to a whole number of cells.
pub fn delta_pair(grid: &Grid, rho: f64, sep: f64) -> Result<ScalarField> {
    let n = grid.dim();
    let h = grid.spacing();
    let shift = (sep / h).round().max(1.0);
    let a = shift * h;
    if a + rho > grid.padding_radius() * (1.0 + 1e-12) {
        return Err(Error::SupportOverflow { radius: a + rho, limit: grid.padding_radius() });
    }
    let plus: Vec<f64> = (0..grid.len()).map(|i| bump(norm(&grid.point(i)[..n]) / rho)).collect();
    let mass = pairwise_sum(&plus) * grid.cell_volume();
    if mass == 0.0 {
        return Err(Error::InvalidParameter(format!("rho = {rho} is below the grid spacing")));
    }
    let vals = (0..grid.len())
        .map(|i| {
            let mut p = grid.point(i);
            p[0] -= a;
            (plus[i] - bump(norm(&p[..n]) / rho)) / mass
        })
        .collect();
    Ok(ScalarField::new(*grid, vals)?.with_support(Some(a + rho)))
}

fn pair_trend(
    id: ResultId,
    grid: &Grid,
    phi: &HomogeneousIntegrand,
    q: f64,
    rhos: &[f64],
    sep: f64,
    probe: bool,
) -> Result<TrendReport> {
    require_ladder(rhos)?;
    let n = grid.dim();
    check_q(n, q, probe)?;
    let mut arm = TrendArm { label: "ratio".into(), params: rhos.to_vec(), lhs: vec![], rhs: vec![], values: vec![] };
    for &rho in rhos {
        let f = delta_pair(grid, rho, sep)?;
        let prof = phi_profile(&f, phi, q, probe)?;
        let lhs = prof.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let rhs = f.l1_norm().powf(q);
        arm.lhs.push(lhs);
        arm.rhs.push(rhs);
        arm.values.push(lhs / rhs);
    }
    let x: Vec<f64> = rhos.iter().map(|r| (1.0 / r).ln()).collect();
    let fit = linear_fit(&x, &arm.values);
    let mut report = TrendReport {
        result_id: id,
        n,
        pts_per_axis: grid.pts_per_axis(),
        box_len: grid.box_len(),
        arms: vec![arm],
        log_fit: Some(fit),
        target: None,
        extra: Default::default(),
    };
    report.extra.insert("phi_sphere_integral".into(), phi.sphere_integral(n)?);
    report.extra.insert("q".into(), q);
    Ok(report)
}

/// Ratios for a shrinking ladder of mollified delta pairs.
pub fn theorem1_necessity_probe(
    grid: &Grid,
    phi: &HomogeneousIntegrand,
    q: f64,
    rhos: &[f64],
    sep: f64,
) -> Result<TrendReport> {
    pair_trend(ResultId::T1Necessity, grid, phi, q, rhos, sep, false)
}

/// Critical exponent `q = n/(n-1)`, reported without a gate.
pub fn conjecture_probe(grid: &Grid, phi: &HomogeneousIntegrand, rhos: &[f64], sep: f64) -> Result<TrendReport> {
    let n = grid.dim() as f64;
    pair_trend(ResultId::ConjProbe, grid, phi, n / (n - 1.0), rhos, sep, true)
}

// ---------------------------------------------------------------------------
// T2, LEMMA_10x, P1, P2

/// Weighted norm of the Jacobi matrix of `u = (-Delta)^{-1} f`.
fn jacobian_weighted_norm(f: &VectorField, q: f64, probe: bool) -> Result<f64> {
    let u = spectral::inverse_laplacian_vec(f)?;
    let du = spectral::jacobian(&u);
    weighted_lq_norm_of(&du.frobenius(), f.grid(), q, probe)
}

pub fn theorem2_check(f: &VectorField, q: f64) -> Result<InequalityReport> {
    check_q(f.dim(), q, false)?;
    let defect = check_divfree(f)?;
    let lhs = jacobian_weighted_norm(f, q, false)?;
    Ok(InequalityReport::new(ResultId::T2, f.grid(), Some(q), lhs, f.l1_norm()).note("div_defect", defect))
}

/// Matrix version: `F = curl (-Delta)^{-1} f`, bounded by `||Div F||_1`.
pub fn lemma10x_check(f: &VectorField, q: f64) -> Result<InequalityReport> {
    let grid = *f.grid();
    check_q(grid.dim(), q, false)?;
    let defect = check_divfree(f)?;
    let big_f = spectral::curl_inverse_laplacian(f)?;
    let skew = big_f.skew_defect();
    let div = spectral::row_divergence(&big_f);
    let scale = f.l2_norm();
    let residual = if scale > 0.0 { div.sub(f)?.l2_norm() / scale } else { div.l2_norm() };
    let lhs = weighted_lq_norm_of(&big_f.frobenius(), &grid, q, false)?;
    let rhs = div.l1_norm();
    Ok(InequalityReport::new(ResultId::Lemma10x, &grid, Some(q), lhs, rhs)
        .note("div_defect", defect)
        .note("skew_defect", skew)
        .note("row_divergence_residual", residual))
}

pub fn prop1_check(f: &VectorField, q: f64) -> Result<InequalityReport> {
    let grid = *f.grid();
    let critical = grid.dim() as f64 / (grid.dim() as f64 - 1.0);
    if !(q > 1.0) {
        return Err(Error::QOutOfRange { q, critical });
    }
    check_q(grid.dim(), q, false)?;
    check_mean_zero_vec(f, MEAN_TOL)?;
    let lhs = jacobian_weighted_norm(f, q, false)?;
    let h = spectral::divergence(f);
    let second = spectral::grad_inverse_laplacian(&h)?.l1_norm();
    let first = f.l1_norm();
    Ok(InequalityReport::new(ResultId::P1, &grid, Some(q), lhs, first + second)
        .note("rhs_f", first)
        .note("rhs_grad_inv_lap_div", second))
}

pub fn prop2_check(f: &VectorField) -> Result<InequalityReport> {
    let grid = *f.grid();
    check_mean_zero_vec(f, MEAN_TOL)?;
    let lhs = jacobian_weighted_norm(f, 1.0, false)?;
    let h = spectral::divergence(f);
    let phi = spectral::frac_laplacian_power(&h, -1.0)?;
    let riesz = spectral::grad_inverse_laplacian(&h)?.l1_norm();
    let first = f.l1_norm();
    let hardy = phi.l1_norm() + riesz;
    Ok(InequalityReport::new(ResultId::P2, &grid, Some(1.0), lhs, first + hardy)
        .note("rhs_f", first)
        .note("rhs_hardy", hardy))
}

// ---------------------------------------------------------------------------
// T3 and what follows from it

/// Spectral and kernel sides of the identity; `ratio` is spectral / kernel.
pub fn theorem3_identity_check(g: &VectorField) -> Result<InequalityReport> {
    let form = theorem3_form(g)?;
    let kernel = theorem3_kernel_side(g, KernelPath::Fft);
    let n = g.dim();
    let l = -0.5 * n as f64;
    Ok(InequalityReport::new(ResultId::T3Identity, g.grid(), Some(l), form.value, kernel)
        .note("rel_diff", (form.value - kernel).abs() / kernel.abs())
        .note("scaled_diff", (form.value - kernel).abs() / (two_pi_n(n) * (form.norm_sq + n as f64 * form.div_sq)))
        .note("norm_sq", form.norm_sq)
        .note("div_norm_sq", form.div_sq))
}

fn bound_report(id: ResultId, grid: &Grid, l: f64, lhs: f64, l1_sq: f64, c: f64) -> InequalityReport {
    let mut r = InequalityReport::new(id, grid, Some(l), lhs, c * l1_sq).with_constant(c);
    r.degenerate = l1_sq == 0.0;
    if r.degenerate {
        r.ratio = None;
    }
    r
}

/// `ratio = |form| / (C ||g||_1^2)` with `C = (2 sqrt(pi))^{-n} / Gamma(n/2)`.
pub fn theorem3iii_check(g: &VectorField) -> Result<InequalityReport> {
    let n = g.dim();
    let c = constant(NamedConstant::Thm3iiiConst, n)?;
    let l1 = g.l1_norm();
    if l1 == 0.0 {
        return Ok(bound_report(ResultId::T3iii, g.grid(), -0.5 * n as f64, 0.0, 0.0, c));
    }
    let form = theorem3_form(g)?;
    Ok(bound_report(ResultId::T3iii, g.grid(), -0.5 * n as f64, form.value.abs(), l1 * l1, c)
        .note("signed_form", form.value))
}

/// `g = grad u` in the T3iii bound, stated for `u`.
pub fn corollary_check(u: &ScalarField) -> Result<InequalityReport> {
    let grid = *u.grid();
    let n = grid.dim();
    let c = constant(NamedConstant::CorollaryConst, n)?;
    let l = 1.0 - 0.5 * n as f64;
    let grad = spectral::gradient(u);
    let rhs = grad.l1_norm();
    let sampler = SpectralSampler::from_scalar(u, FREE);
    let lhs = (two_pi_n(n) * homog_norm_sq(&sampler, l)).max(0.0).sqrt();
    let mut r = InequalityReport::new(ResultId::Corollary, &grid, Some(l), lhs, c * rhs).with_constant(c);
    if rhs == 0.0 {
        r.ratio = None;
        r.degenerate = true;
    }
    Ok(r)
}

/// Smallest `eps` whose Gaussian tail at the box edge is below [`spectral::EPS_TAIL`].
pub fn min_eps(grid: &Grid) -> f64 {
    (2.0 * (1.0 / spectral::EPS_TAIL).ln()).sqrt() * 2.0 / grid.box_len()
}

/// Four halvings ending just above [`min_eps`].
pub fn default_eps_ladder(grid: &Grid) -> Vec<f64> {
    let e = min_eps(grid) * (1.0 + 1e-6);
    [8.0, 4.0, 2.0, 1.0].iter().map(|k| k * e).collect()
}

/// Quadratic form of `g_eps` along a decreasing `eps` ladder, Richardson
/// extrapolated to `eps = 0` assuming `O(eps^2)` convergence.
pub fn theorem3i_limit_check(g: &VectorField, eps_ladder: &[f64], profile: EpsProfile) -> Result<InequalityReport> {
    require_ladder(eps_ladder)?;
    if eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps ladder must decrease".into()));
    }
    let grid = *g.grid();
    let n = grid.dim();
    let mut values = Vec::with_capacity(eps_ladder.len());
    for &eps in eps_ladder {
        let ge = spectral::regularize_eps(g, eps, profile)?;
        check_mean_zero_vec(&ge, EPS_MEAN_TOL)?;
        values.push(quadratic_form_of(&SpectralSampler::from_vector(&ge, FREE), n).value);
    }
    let k = values.len() - 1;
    let r = eps_ladder[k - 1] / eps_ladder[k];
    let limit = values[k] + (values[k] - values[k - 1]) / (r * r - 1.0);
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let shrink = diffs.windows(2).map(|w| if w[1] == 0.0 { f64::INFINITY } else { w[0] / w[1] }).fold(f64::INFINITY, f64::min);
    let kernel = theorem3_kernel_side(g, KernelPath::Fft);
    let c = constant(NamedConstant::Thm3iConst, n)?;
    let l1 = g.l1_norm();
    let mut rep = bound_report(ResultId::T3i, &grid, -0.5 * n as f64, limit.abs(), l1 * l1, c)
        .note("limit", limit)
        .note("kernel_side", kernel)
        .note("kernel_rel_diff", (limit - kernel).abs() / kernel.abs())
        .note("min_diff_shrink", shrink);
    for (i, v) in values.iter().enumerate() {
        rep = rep.note(&format!("value_{i}"), *v);
    }
    Ok(rep)
}

/// Ratio `|S^{n-1}| (2 pi)^{-n} |form_M(g)| / ||g||_1^2` of the north-pole
/// extremizer along a ladder of mollifier widths.
pub fn theorem3ii_sharpness(grid: &Grid, r_in: f64, r_out: f64, rhos: &[f64]) -> Result<TrendReport> {
    require_ladder(rhos)?;
    let n = grid.dim();
    let s = sphere_area(n) * two_pi_n(n);
    let mut arm = TrendArm { label: "ratio".into(), params: rhos.to_vec(), lhs: vec![], rhs: vec![], values: vec![] };
    for &rho in rhos {
        let recipe = FieldRecipe::new(RecipeKind::ExtremizerNorthpole)
            .with("r_in", r_in)
            .with("r_out", r_out)
            .with("rho", rho);
        let g = generate(&recipe, grid)?.into_vector()?;
        let lhs = s * matrix_kernel_form(&g, MatrixKernel::M, KernelPath::Fft).abs();
        let l1 = g.l1_norm();
        arm.lhs.push(lhs);
        arm.rhs.push(l1 * l1);
        arm.values.push(lhs / (l1 * l1));
    }
    let target = constant(NamedConstant::Thm3iConst, n)?;
    let best = arm.values.iter().copied().fold(0.0, f64::max);
    let mut report = TrendReport {
        result_id: ResultId::T3iiSharpness,
        n,
        pts_per_axis: grid.pts_per_axis(),
        box_len: grid.box_len(),
        arms: vec![arm],
        log_fit: None,
        target: Some(target),
        extra: Default::default(),
    };
    report.extra.insert("best_fraction".into(), best / target);
    Ok(report)
}

/// Spectral `(-Delta)^{-n/2}(g + n (-Delta)^{-1} grad div g)` against the
/// kernel convolution; relative L2 difference on the support of `g`.
pub fn cr_identity_check(g: &VectorField) -> Result<InequalityReport> {
    check_mean_zero_vec(g, MEAN_TOL)?;
    let n = g.dim();
    let nf = n as f64;
    let sampler = SpectralSampler::from_vector(g, FREE);
    let symbol = |xi: &[f64; 3], v: &[Complex64]| -> Vec<Complex64> {
        let k2: f64 = xi[..n].iter().map(|x| x * x).sum();
        let kd = v.iter().zip(xi).fold(Complex64::new(0.0, 0.0), |a, (c, k)| a + c * *k);
        let w = k2.powf(-0.5 * nf);
        (0..n).map(|j| (v[j] - kd * (nf * xi[j] / k2)) * w).collect()
    };
    let scale = constant(NamedConstant::CrScale, n)?;
    let rep = identity_on_support(ResultId::CrIdentity, g, &sampler, symbol, scale)?;
    Ok(rep.with_constant(scale))
}

/// Gradient version for a scalar `u`; the kernel side carries `1/(1 - n)`.
pub fn cre_identity_check(u: &ScalarField) -> Result<InequalityReport> {
    let grid = *u.grid();
    let n = grid.dim();
    let nf = n as f64;
    let grad = spectral::gradient(u);
    let sampler = SpectralSampler::from_vector(&grad, FREE);
    let symbol = |xi: &[f64; 3], v: &[Complex64]| -> Vec<Complex64> {
        let k2: f64 = xi[..n].iter().map(|x| x * x).sum();
        v.iter().map(|c| c * k2.powf(-0.5 * nf)).collect()
    };
    let scale = constant(NamedConstant::CrScale, n)? / (1.0 - nf);
    let support = u.values().iter().map(|v| *v != 0.0).collect::<Vec<_>>();
    let rep = identity_on_cells(ResultId::CreIdentity, &grad, &support, &sampler, symbol, scale)?;
    Ok(rep.with_constant(scale))
}

fn identity_on_support(
    id: ResultId,
    g: &VectorField,
    sampler: &SpectralSampler,
    symbol: impl Fn(&[f64; 3], &[Complex64]) -> Vec<Complex64>,
    scale: f64,
) -> Result<InequalityReport> {
    let support: Vec<bool> = g.magnitude().iter().map(|m| *m != 0.0).collect();
    identity_on_cells(id, g, &support, sampler, symbol, scale)
}

fn identity_on_cells(
    id: ResultId,
    g: &VectorField,
    support: &[bool],
    sampler: &SpectralSampler,
    symbol: impl Fn(&[f64; 3], &[Complex64]) -> Vec<Complex64>,
    scale: f64,
) -> Result<InequalityReport> {
    let cells: Vec<usize> = (0..support.len()).filter(|&i| support[i]).collect();
    if cells.is_empty() {
        let mut r = InequalityReport::new(id, g.grid(), None, 0.0, 0.0);
        r.degenerate = true;
        return Ok(r);
    }
    let spec = sampler.synthesize_at(symbol, &cells);
    let kern = crate::kernel::kernel_convolution(g, MatrixKernel::N, scale);
    let a: Vec<f64> = spec.iter().flatten().copied().collect();
    let b: Vec<f64> = kern.components().iter().flat_map(|c| cells.iter().map(move |&i| c[i])).collect();
    let lhs = pairwise_sum(&a.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
    let rhs = pairwise_sum(&b.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
    Ok(InequalityReport::new(id, g.grid(), None, lhs, rhs)
        .note("rel_l2_diff", l2_rel(&a, &b))
        .note("support_cells", cells.len() as f64))
}

/// `|| (-Delta)^{-1} f ||^2_{H^{2-n/2}} - n ||div f||^2_{H^{-1-n/2}}`,
/// normalized as in [`theorem3iii_check`].
pub fn prop4_check(f: &VectorField) -> Result<InequalityReport> {
    let n = f.dim();
    let nf = n as f64;
    check_mean_zero_vec(f, MEAN_TOL)?;
    let c = constant(NamedConstant::Thm3iiiConst, n)?;
    let sampler = SpectralSampler::from_vector(f, FREE);
    // symbol of (-Delta)^{-1} is |xi|^{-2}; weight |xi|^{2(2 - n/2)}
    let potential_sq = sampler.integrate(|xi, v| {
        let k = norm(&xi[..n]);
        v.iter().map(|c| c.norm_sqr()).sum::<f64>() * k.powi(-4) * k.powf(4.0 - nf)
    });
    let div_sq = div_norm_sq(&sampler, -1.0 - 0.5 * nf);
    let value = two_pi_n(n) * (potential_sq - nf * div_sq);
    let l1 = f.l1_norm();
    Ok(bound_report(ResultId::P4, f.grid(), 2.0 - 0.5 * nf, value.abs(), l1 * l1, c).note("signed_form", value))
}

/// Backward-constructed triple in three dimensions: `f = f_s - Q g` with
/// `Q` the gradient projection, so that `f + g` is solenoidal, and
/// `w = (-Delta)^{-1} curl(f + g)`.
pub struct Theorem4Triple {
    pub w: VectorField,
    pub f: VectorField,
    pub g: VectorField,
}

pub fn theorem4_triple(g: &VectorField, f_solenoidal: &VectorField) -> Result<Theorem4Triple> {
    if g.dim() != 3 {
        return Err(Error::UnsupportedDimension(g.dim()));
    }
    let proj = spectral::leray_project(g)?;
    let grad_part = g.sub(&proj)?;
    let f = f_solenoidal.sub(&grad_part)?;
    let w = spectral::inverse_laplacian_vec(&spectral::curl3(&f.add(g)?)?)?;
    Ok(Theorem4Triple { w, f, g: g.clone() })
}

fn laplacian_vec(w: &VectorField) -> Result<VectorField> {
    spectral::frac_laplacian_power_vec(w, 2.0).map(|v| v.scaled(-1.0))
}

pub fn theorem4_check(t: &Theorem4Triple) -> Result<InequalityReport> {
    let grid = *t.g.grid();
    if grid.dim() != 3 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    check_mean_zero_vec(&t.g, MEAN_TOL)?;
    let curl_f = spectral::curl3(&t.f)?;
    let lap_w = laplacian_vec(&t.w)?;
    let e = lap_w.add(&curl_f)?;
    let div_f = spectral::divergence(&t.f);
    let l = -2.5;
    let comps: Vec<&[f64]> = e.components().iter().map(|c| c.as_slice()).chain([div_f.values()]).collect();
    let sampler = SpectralSampler::new(&comps, grid, FREE);
    let density = |sel: &dyn Fn(&[Complex64]) -> f64| {
        sampler.integrate(|xi, v| sel(v) * norm(&xi[..3]).powf(2.0 * l))
    };
    let e_sq = density(&|v| v[..3].iter().map(|c| c.norm_sqr()).sum());
    let d_sq = density(&|v| v[3].norm_sqr());
    let lhs = two_pi_n(3) * (e_sq - 2.0 * d_sq).abs();
    let w_scale = two_pi_n(3)
        * homog_norm_sq(&SpectralSampler::from_vector(&lap_w, FREE), l).max(homog_norm_sq(
            &SpectralSampler::from_vector(&curl_f, FREE),
            l,
        ));
    let c = constant(NamedConstant::Thm4Const, 3)?;
    let l1 = t.g.l1_norm();
    let mut r = bound_report(ResultId::T4, &grid, l, lhs, l1 * l1, c).note("w_scale", w_scale);
    r = r.note("w_divergence", spectral::divergence(&t.w).l2_norm());
    Ok(r)
}

/// REMARK5 with a given normalization `c` of the Bessel kernel form.
pub fn remark5_check(g: &VectorField, c: f64) -> Result<InequalityReport> {
    let n = g.dim();
    let nf = n as f64;
    check_mean_zero_vec(g, MEAN_TOL)?;
    let spec = remark5_spectral(g);
    let kern = matrix_kernel_form(g, MatrixKernel::Bessel, KernelPath::Fft);
    let l1 = g.l1_norm();
    let h = g.grid().spacing();
    Ok(InequalityReport::new(ResultId::Remark5, g.grid(), Some(-nf), spec, c * kern)
        .with_constant(c)
        .note("rel_diff", (spec - c * kern).abs() / (c * kern).abs())
        .note("bound_constant", spec.abs() / (l1 * l1))
        .note("analytic_c", remark5_analytic_c(n))
        .note("max_tk1", t_k1(h).max(t_k1(0.0))))
}

/// `(2 pi)^{-n}` times the inhomogeneous difference at orders `-n`, `-n-2`.
pub fn remark5_spectral(g: &VectorField) -> f64 {
    let n = g.dim();
    let nf = n as f64;
    let sampler = SpectralSampler::from_vector(g, FREE);
    two_pi_n(n) * (inhomog_norm_sq(&sampler, -nf) - nf * div_norm_sq_inhomog(&sampler, -nf - 2.0))
}

/// Fit `c` on one field: spectral side over the Bessel kernel form.
pub fn remark5_calibrate(g: &VectorField) -> Result<f64> {
    check_mean_zero_vec(g, MEAN_TOL)?;
    Ok(remark5_spectral(g) / matrix_kernel_form(g, MatrixKernel::Bessel, KernelPath::Fft))
}

/// `|S^{n-1}| (2 pi)^{-n}`, the value the calibration should recover.
pub fn remark5_analytic_c(n: usize) -> f64 {
    sphere_area(n) * two_pi_n(n)
}

/// The form with `c1` in place of `n` in front of the divergence term, on
/// the field `e_1 (phi_w(x) - phi_w(x - a))` for shrinking widths `w`.
pub fn forcing_trend(grid: &Grid, c1: f64, widths: &[f64], sep: f64) -> Result<TrendArm> {
    require_ladder(widths)?;
    let n = grid.dim();
    let nf = n as f64;
    let mut arm = TrendArm { label: format!("c1={c1}"), params: widths.to_vec(), lhs: vec![], rhs: vec![], values: vec![] };
    for &w in widths {
        let pair = delta_pair(grid, w, sep)?;
        let mut comps = vec![vec![0.0; grid.len()]; n];
        comps[0] = pair.into_values();
        let g = VectorField::new(*grid, comps)?;
        let sampler = SpectralSampler::from_vector(&g, FREE);
        let v = two_pi_n(n) * (homog_norm_sq(&sampler, -0.5 * nf) - c1 * div_norm_sq(&sampler, -1.0 - 0.5 * nf));
        let l1 = g.l1_norm();
        arm.lhs.push(v.abs());
        arm.rhs.push(l1 * l1);
        arm.values.push(v.abs() / (l1 * l1));
    }
    Ok(arm)
}
