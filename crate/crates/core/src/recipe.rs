//! Test-field generators.
//!
//! A [`FieldRecipe`] is a kind, a flat map of numeric parameters and a seed.
//! Generated fields carry a support radius about the origin and every sample
//! outside it is exactly zero (projected fields excepted).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::reduce::pairwise_sum;
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeKind {
    GaussianBump,
    DipolePair,
    RadialRing,
    DivfreeProjected,
    GradientOf,
    ExtremizerNorthpole,
    RandomBumps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRecipe {
    pub kind: RecipeKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratedField {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl GeneratedField {
    pub fn into_scalar(self) -> Result<ScalarField> {
        match self {
            Self::Scalar(f) => Ok(f),
            Self::Vector(_) => Err(Error::InvalidParameter("expected a scalar field".into())),
        }
    }

    pub fn into_vector(self) -> Result<VectorField> {
        match self {
            Self::Vector(v) => Ok(v),
            Self::Scalar(_) => Err(Error::InvalidParameter("expected a vector field".into())),
        }
    }
}

impl FieldRecipe {
    pub fn new(kind: RecipeKind) -> Self {
        Self { kind, params: BTreeMap::new(), seed: 0 }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self.kind {
            RecipeKind::GaussianBump => &["cx", "cy", "cz", "width", "amp", "cutoff", "dir_x", "dir_y", "dir_z"],
            RecipeKind::DipolePair => &["sep", "width", "amp", "cutoff"],
            RecipeKind::RadialRing => &["radius", "width", "amp"],
            RecipeKind::ExtremizerNorthpole => &["r_in", "r_out", "rho", "align"],
            RecipeKind::DivfreeProjected | RecipeKind::GradientOf | RecipeKind::RandomBumps => {
                &["count", "spread", "wmin", "wmax", "components", "mean_zero"]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let allowed = self.allowed();
        if let Some(k) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!("unknown parameter `{k}` for {:?}", self.kind)));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("parameter `{k}` = {v}")));
        }
        Ok(())
    }
}

/// `exp(-1/(1-t^2))` for `|t| < 1`, else 0.
pub fn bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// `d/dt bump(t)`.
pub fn bump_derivative(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s > 0.0 {
        -2.0 * t / (s * s) * (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// `int_{R^n} bump(|x|) dx`, by Gauss–Legendre in the radius.
pub fn unit_bump_mass(n: usize) -> f64 {
    // composite rule: the essential singularity at r = 1 defeats a single panel
    let panels = 32;
    let mut radial = 0.0;
    for k in 0..panels {
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        let (r, w) = crate::quad::gauss_legendre_on(32, a, b);
        radial += r.iter().zip(&w).map(|(r, w)| w * bump(*r) * r.powi(n as i32 - 1)).sum::<f64>();
    }
    radial * crate::special::sphere_area(n)
}

fn dist(p: &[f64], c: &[f64]) -> f64 {
    p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn check_support(grid: &Grid, radius: f64) -> Result<()> {
    let limit = grid.padding_radius();
    if radius > limit * (1.0 + 1e-12) {
        return Err(Error::SupportOverflow { radius, limit });
    }
    Ok(())
}

/// Truncated Gaussian `amp exp(-|x-c|^2/(2 w^2))` for `|x-c| < cutoff w`.
fn gaussian(grid: &Grid, c: &[f64], w: f64, amp: f64, cutoff: f64) -> Vec<f64> {
    let n = grid.dim();
    (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            let r = dist(&p[..n], c);
            if r < cutoff * w {
                amp * (-0.5 * r * r / (w * w)).exp()
            } else {
                0.0
            }
        })
        .collect()
}

/// Subtract a scaled copy of the reference bump `bump(|x|/R)` so that the
/// discrete sum vanishes. `R` is the declared support radius, or `L/4`.
pub fn mean_subtract(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let radius = f.support_radius().filter(|r| *r > 0.0).unwrap_or(grid.padding_radius());
    let reference = reference_bump(&grid, radius);
    let mut values = f.values().to_vec();
    subtract_reference(&mut values, &reference);
    ScalarField::new(grid, values).expect("same grid").with_support(f.support_radius())
}

pub fn mean_subtract_vec(g: &VectorField) -> VectorField {
    let grid = *g.grid();
    let radius = g.support_radius().filter(|r| *r > 0.0).unwrap_or(grid.padding_radius());
    let reference = reference_bump(&grid, radius);
    let comps = g
        .components()
        .iter()
        .map(|c| {
            let mut v = c.clone();
            subtract_reference(&mut v, &reference);
            v
        })
        .collect();
    VectorField::new(grid, comps).expect("same grid").with_support(g.support_radius())
}

fn reference_bump(grid: &Grid, radius: f64) -> Vec<f64> {
    let n = grid.dim();
    (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            bump(crate::grid::norm(&p[..n]) / radius)
        })
        .collect()
}

fn subtract_reference(values: &mut [f64], reference: &[f64]) {
    let rsum = pairwise_sum(reference);
    // second pass removes the rounding residue of the first
    for _ in 0..2 {
        let c = pairwise_sum(values) / rsum;
        if c == 0.0 {
            break;
        }
        for (v, r) in values.iter_mut().zip(reference) {
            *v -= c * r;
        }
    }
}

struct RandomBumps {
    centers: Vec<[f64; 3]>,
    radii: Vec<f64>,
    amps: Vec<Vec<f64>>,
}

impl RandomBumps {
    fn draw(recipe: &FieldRecipe, n: usize, components: usize) -> Result<Self> {
        let count = recipe.get("count", 4.0);
        if !(count >= 1.0 && count.fract() == 0.0) {
            return Err(Error::InvalidParameter(format!("count = {count}")));
        }
        let spread = recipe.get("spread", 1.0);
        let (wmin, wmax) = (recipe.get("wmin", 1.0), recipe.get("wmax", 1.5));
        if !(spread >= 0.0 && wmin > 0.0 && wmax >= wmin) {
            return Err(Error::InvalidParameter("need spread >= 0 and 0 < wmin <= wmax".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
        let mut out = Self { centers: Vec::new(), radii: Vec::new(), amps: Vec::new() };
        for _ in 0..count as usize {
            // uniform in the ball of radius `spread`
            let c = loop {
                let mut c = [0.0; 3];
                for x in c.iter_mut().take(n) {
                    *x = rng.gen_range(-1.0..=1.0);
                }
                if crate::grid::norm(&c) <= 1.0 {
                    break c.map(|x| x * spread);
                }
            };
            out.centers.push(c);
            out.radii.push(if wmax > wmin { rng.gen_range(wmin..wmax) } else { wmin });
            out.amps.push((0..components).map(|_| rng.sample(StandardNormal)).collect());
        }
        Ok(out)
    }

    fn support(&self) -> f64 {
        self.centers.iter().zip(&self.radii).map(|(c, r)| crate::grid::norm(c) + r).fold(0.0, f64::max)
    }

    fn sample(&self, grid: &Grid, comp: usize) -> Vec<f64> {
        let n = grid.dim();
        (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                self.centers
                    .iter()
                    .zip(&self.radii)
                    .zip(&self.amps)
                    .map(|((c, r), a)| a[comp] * bump(dist(&p[..n], &c[..n]) / r))
                    .sum()
            })
            .collect()
    }

    /// Analytic gradient of the scalar sum, component `d`.
    fn gradient(&self, grid: &Grid, d: usize) -> Vec<f64> {
        let n = grid.dim();
        (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                self.centers
                    .iter()
                    .zip(&self.radii)
                    .zip(&self.amps)
                    .map(|((c, r), a)| {
                        let rr = dist(&p[..n], &c[..n]);
                        if rr == 0.0 {
                            0.0
                        } else {
                            a[0] * bump_derivative(rr / r) / r * (p[d] - c[d]) / rr
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

pub fn generate(recipe: &FieldRecipe, grid: &Grid) -> Result<GeneratedField> {
    recipe.validate()?;
    let n = grid.dim();
    match recipe.kind {
        RecipeKind::GaussianBump => {
            let c = [recipe.get("cx", 0.0), recipe.get("cy", 0.0), recipe.get("cz", 0.0)];
            let w = recipe.get("width", 1.0);
            let cutoff = recipe.get("cutoff", 4.0);
            if !(w > 0.0 && cutoff > 0.0) {
                return Err(Error::InvalidParameter("width and cutoff must be positive".into()));
            }
            let radius = crate::grid::norm(&c[..n]) + cutoff * w;
            check_support(grid, radius)?;
            let vals = gaussian(grid, &c[..n], w, recipe.get("amp", 1.0), cutoff);
            let dir: Vec<f64> = ["dir_x", "dir_y", "dir_z"][..n].iter().map(|k| recipe.get(k, 0.0)).collect();
            let profile = ScalarField::new(*grid, vals)?.with_support(Some(radius));
            if dir.iter().any(|&d| d != 0.0) {
                Ok(GeneratedField::Vector(VectorField::from_profile(&profile, &dir)?))
            } else {
                Ok(GeneratedField::Scalar(profile))
            }
        }
        RecipeKind::DipolePair => {
            let sep = recipe.get("sep", 2.0);
            let w = recipe.get("width", 0.5);
            let cutoff = recipe.get("cutoff", 4.0);
            let amp = recipe.get("amp", 1.0);
            let radius = sep.abs() + cutoff * w;
            check_support(grid, radius)?;
            let mut a = [0.0; 3];
            a[0] = sep;
            let b = a.map(|x| -x);
            let plus = gaussian(grid, &a[..n], w, amp, cutoff);
            let minus = gaussian(grid, &b[..n], w, amp, cutoff);
            let vals = plus.iter().zip(&minus).map(|(p, m)| p - m).collect();
            let f = ScalarField::new(*grid, vals)?.with_support(Some(radius));
            Ok(GeneratedField::Scalar(mean_subtract(&f)))
        }
        RecipeKind::RadialRing => {
            let r0 = recipe.get("radius", 2.0);
            let w = recipe.get("width", 0.5);
            let amp = recipe.get("amp", 1.0);
            if !(w > 0.0 && r0 > w) {
                return Err(Error::InvalidParameter("ring needs radius > width > 0".into()));
            }
            let radius = r0 + w;
            check_support(grid, radius)?;
            let f = ScalarField::from_fn(*grid, |x| amp * bump((crate::grid::norm(x) - r0) / w))
                .with_support(Some(radius));
            Ok(GeneratedField::Scalar(mean_subtract(&f)))
        }
        RecipeKind::ExtremizerNorthpole => {
            let (r_in, r_out) = (recipe.get("r_in", 1.0), recipe.get("r_out", 2.0));
            let rho = recipe.get("rho", 0.2);
            if !(0.0 <= r_in && r_in < r_out && rho > 0.0) {
                return Err(Error::InvalidParameter("need 0 <= r_in < r_out and rho > 0".into()));
            }
            // translate onto a cell centre so the axis ray runs through a
            // line of samples
            let shift = if recipe.get("align", 1.0) != 0.0 { 0.5 * grid.spacing() } else { 0.0 };
            let radius = r_out + shift * (n as f64).sqrt();
            check_support(grid, radius)?;
            let mid = 0.5 * (r_in + r_out);
            let half = 0.5 * (r_out - r_in);
            let mut comps = vec![vec![0.0; grid.len()]; n];
            comps[n - 1] = (0..grid.len())
                .map(|i| {
                    let p = grid.point(i).map(|x| x - shift);
                    let r = crate::grid::norm(&p[..n]);
                    let eta = bump((r - mid) / half);
                    if eta == 0.0 {
                        return 0.0;
                    }
                    // chordal distance from x/|x| to the north pole
                    let mut d2 = 0.0;
                    for (k, x) in p[..n].iter().enumerate() {
                        let t = if k == n - 1 { 1.0 } else { 0.0 };
                        d2 += (x / r - t).powi(2);
                    }
                    eta * bump(d2.sqrt() / rho)
                })
                .collect();
            Ok(GeneratedField::Vector(VectorField::new(*grid, comps)?.with_support(Some(radius))))
        }
        RecipeKind::RandomBumps | RecipeKind::DivfreeProjected | RecipeKind::GradientOf => {
            let components = match recipe.kind {
                RecipeKind::RandomBumps => recipe.get("components", n as f64),
                _ => n as f64,
            };
            let mean_zero = recipe.get("mean_zero", 1.0) != 0.0;
            let scalar_source = recipe.kind == RecipeKind::GradientOf;
            if !(components == 1.0 || components == n as f64) {
                return Err(Error::InvalidParameter(format!("components must be 1 or {n}")));
            }
            let draw = RandomBumps::draw(recipe, n, if scalar_source { 1 } else { components as usize })?;
            let radius = draw.support();
            check_support(grid, radius)?;
            match recipe.kind {
                RecipeKind::GradientOf => {
                    let comps = (0..n).map(|d| draw.gradient(grid, d)).collect();
                    let g = VectorField::new(*grid, comps)?.with_support(Some(radius));
                    Ok(GeneratedField::Vector(mean_subtract_vec(&g)))
                }
                RecipeKind::DivfreeProjected => {
                    let comps = (0..n).map(|d| draw.sample(grid, d)).collect();
                    let g = mean_subtract_vec(&VectorField::new(*grid, comps)?.with_support(Some(radius)));
                    Ok(GeneratedField::Vector(spectral::leray_project(&g)?.with_support(None)))
                }
                _ if components == 1.0 => {
                    let f = ScalarField::new(*grid, draw.sample(grid, 0))?.with_support(Some(radius));
                    Ok(GeneratedField::Scalar(if mean_zero { mean_subtract(&f) } else { f }))
                }
                _ => {
                    let comps = (0..n).map(|d| draw.sample(grid, d)).collect();
                    let g = VectorField::new(*grid, comps)?.with_support(Some(radius));
                    Ok(GeneratedField::Vector(if mean_zero { mean_subtract_vec(&g) } else { g }))
                }
            }
        }
    }
}

/// Random compactly supported scalar from C-infinity bumps; used where only
/// compact support (not a zero mean) is required.
pub fn random_scalar(grid: &Grid, seed: u64, count: usize, spread: f64, wmin: f64, wmax: f64) -> Result<ScalarField> {
    let r = FieldRecipe::new(RecipeKind::RandomBumps)
        .with("count", count as f64)
        .with("spread", spread)
        .with("wmin", wmin)
        .with("wmax", wmax)
        .with("components", 1.0)
        .with("mean_zero", 0.0)
        .seed(seed);
    generate(&r, grid)?.into_scalar()
}

/// Random mean-zero compactly supported vector field.
pub fn random_vector(grid: &Grid, seed: u64, count: usize, spread: f64, wmin: f64, wmax: f64) -> Result<VectorField> {
    let r = FieldRecipe::new(RecipeKind::RandomBumps)
        .with("count", count as f64)
        .with("spread", spread)
        .with("wmin", wmin)
        .with("wmax", wmax)
        .seed(seed);
    generate(&r, grid)?.into_vector()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_vanishes_outside_unit_interval() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
        assert!((bump(0.0) - (-1f64).exp()).abs() < 1e-16);
        let h = 1e-6;
        let fd = (bump(0.3 + h) - bump(0.3 - h)) / (2.0 * h);
        assert!((fd - bump_derivative(0.3)).abs() < 1e-8);
    }

    #[test]
    fn unknown_parameter_rejected() {
        let grid = Grid::new(2, 16.0, 32).unwrap();
        let r = FieldRecipe::new(RecipeKind::DipolePair).with("sigma", 1.0);
        assert!(matches!(generate(&r, &grid), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn recipe_json_roundtrip() {
        let r = FieldRecipe::new(RecipeKind::ExtremizerNorthpole).with("rho", 0.2).seed(9);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"extremizer_northpole\""));
        let back: FieldRecipe = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
