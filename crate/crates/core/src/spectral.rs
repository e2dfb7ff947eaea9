//! Fourier transforms, multipliers and Sobolev norms.
//!
//! Convention: `f^(xi) = int f(x) e^{-i<x,xi>} dx`, with `(2 pi)^{-n}` on the
//! inverse. On a grid the transform is approximated by the midpoint rule,
//! `f^(xi_m) = h^n e^{-i xi_m . x_0} DFT[f](m)`, where `x_0` is the first cell
//! centre, so spectra approximate the continuum transform at `xi_m = 2 pi m / L`.
//!
//! Directional symbols (`i xi`, Riesz, Leray, curl) use the wave vector with
//! Nyquist components set to zero; radial symbols `|xi|^a` use the true `|xi|`.
//! Real parts are taken on the way back.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::CubeFft;
use crate::field::{MatrixField, ScalarField, VectorField};
use crate::grid::Grid;
use crate::quad::gauss_legendre_on;
use crate::reduce::{map_indexed, pairwise_sum};
use crate::sphere::SphereQuadrature;

/// Relative tolerance `|int f| <= MEAN_TOL * ||f||_1` for operators with a
/// singular zero mode.
pub const MEAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn check_mean_zero(values: &[f64], grid: &Grid, tol: f64) -> Result<()> {
    let vol = grid.cell_volume();
    let mean = pairwise_sum(values) * vol;
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let l1 = pairwise_sum(&abs) * vol;
    if mean.abs() > tol * l1 {
        return Err(Error::MeanNotZero { mean, l1 });
    }
    Ok(())
}

pub fn check_mean_zero_vec(g: &VectorField, tol: f64) -> Result<()> {
    g.components().iter().try_for_each(|c| check_mean_zero(c, g.grid(), tol))
}

/// How frequency-space integrals `int F(xi) dxi` are discretized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyQuadrature {
    /// Rectangle rule over the frequency lattice; the zero mode counts only
    /// where the integrand is finite.
    #[default]
    Lattice,
    /// Lattice rule away from the origin blended with a polar rule inside a
    /// few lattice spacings. Inside the polar region the transform is taken
    /// directly at off-lattice frequencies, which removes the periodic-image
    /// error of the lattice rule for singular symbols.
    FreeSpace,
}

/// Complex coefficients `f^(xi_m)` on the frequency lattice of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn frequency(&self, idx: usize) -> [f64; 3] {
        self.grid.frequency(idx)
    }

    /// Storage index of `-k`.
    pub fn negated_index(&self, idx: usize) -> usize {
        let m = self.grid.pts_per_axis();
        let mut multi = self.grid.unravel(idx);
        for k in multi.iter_mut().take(self.grid.dim()) {
            *k = (m - *k) % m;
        }
        self.grid.ravel(&multi)
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        Self { grid: self.grid, coeffs: self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect() }
    }
}

/// Transform plan for one grid. Holds FFT scratch state, so share it only
/// through `&` from a single thread or build one per worker.
pub struct Transform {
    grid: Grid,
    fft: CubeFft,
    axis_phase: Vec<Complex64>,
}

impl Transform {
    pub fn new(grid: Grid) -> Self {
        let x0 = grid.axis_coord(0);
        let dk = grid.freq_spacing();
        let axis_phase = (0..grid.pts_per_axis())
            .map(|k| Complex64::from_polar(1.0, -(grid.freq_index(k) as f64) * dk * x0))
            .collect();
        Self { grid, fft: CubeFft::new(grid.dim(), grid.pts_per_axis()), axis_phase }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn phase(&self, idx: usize) -> Complex64 {
        let multi = self.grid.unravel(idx);
        multi[..self.grid.dim()].iter().fold(Complex64::new(1.0, 0.0), |acc, &k| acc * self.axis_phase[k])
    }

    pub fn forward(&self, values: &[f64]) -> SpectralField {
        let vol = self.grid.cell_volume();
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut data);
        for (i, c) in data.iter_mut().enumerate() {
            *c *= self.phase(i) * vol;
        }
        SpectralField { grid: self.grid, coeffs: data }
    }

    pub fn inverse(&self, spec: &SpectralField) -> Vec<f64> {
        let scale = 1.0 / (self.grid.cell_volume() * self.grid.len() as f64);
        let mut data: Vec<Complex64> =
            spec.coeffs.iter().enumerate().map(|(i, &c)| c * self.phase(i).conj()).collect();
        self.fft.inverse(&mut data);
        data.iter().map(|c| c.re * scale).collect()
    }
}

pub fn dft(f: &ScalarField) -> SpectralField {
    Transform::new(*f.grid()).forward(f.values())
}

pub fn dft_vector(g: &VectorField) -> Vec<SpectralField> {
    let t = Transform::new(*g.grid());
    g.components().iter().map(|c| t.forward(c)).collect()
}

pub fn idft(s: &SpectralField) -> ScalarField {
    let values = Transform::new(s.grid).inverse(s);
    ScalarField::new(s.grid, values).expect("grid-shaped")
}

/// Wave vector with Nyquist components zeroed, used for directional symbols.
pub fn derivative_wavevector(grid: &Grid, idx: usize) -> [f64; 3] {
    let multi = grid.unravel(idx);
    let mut k = grid.frequency(idx);
    for d in 0..grid.dim() {
        if multi[d] == grid.pts_per_axis() / 2 {
            k[d] = 0.0;
        }
    }
    k
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn radial_power(r: f64, a: f64) -> f64 {
    if r == 0.0 {
        if a == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        r.powf(a)
    }
}

/// Multiply by `|xi|^a`; zero mode set to 0 unless `a = 0`.
pub fn frac_laplacian_power_spec(s: &SpectralField, a: f64) -> SpectralField {
    let g = s.grid;
    s.map(|i, c| c * radial_power(norm3(&g.frequency(i)), a))
}

/// `(-Delta)^{a/2} f`, the multiplier `|xi|^a`.
pub fn frac_laplacian_power(f: &ScalarField, a: f64) -> Result<ScalarField> {
    if a < 0.0 {
        check_mean_zero(f.values(), f.grid(), MEAN_TOL)?;
    }
    if a == 0.0 {
        return Ok(f.clone().with_support(f.support_radius()));
    }
    let t = Transform::new(*f.grid());
    let out = t.inverse(&frac_laplacian_power_spec(&t.forward(f.values()), a));
    Ok(ScalarField::new(*f.grid(), out)?)
}

pub fn frac_laplacian_power_vec(g: &VectorField, a: f64) -> Result<VectorField> {
    let comps = (0..g.dim())
        .map(|i| frac_laplacian_power(&g.component_field(i), a))
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorField::from_scalars(comps)?.with_support(None))
}

/// Gradient spectra `i k s`.
pub fn gradient_spec(s: &SpectralField) -> Vec<SpectralField> {
    let g = s.grid;
    (0..g.dim())
        .map(|d| s.map(|i, c| c * Complex64::new(0.0, derivative_wavevector(&g, i)[d])))
        .collect()
}

/// Divergence spectrum `i k . s`.
pub fn divergence_spec(comps: &[SpectralField]) -> SpectralField {
    let g = comps[0].grid;
    let coeffs = (0..g.len())
        .map(|i| {
            let k = derivative_wavevector(&g, i);
            comps.iter().enumerate().fold(ZERO, |acc, (d, s)| acc + s.coeffs[i] * Complex64::new(0.0, k[d]))
        })
        .collect();
    SpectralField { grid: g, coeffs }
}

pub fn gradient(u: &ScalarField) -> VectorField {
    let t = Transform::new(*u.grid());
    let comps = gradient_spec(&t.forward(u.values())).iter().map(|s| t.inverse(s)).collect();
    VectorField::new(*u.grid(), comps).expect("grid-shaped")
}

pub fn divergence(g: &VectorField) -> ScalarField {
    let t = Transform::new(*g.grid());
    let spec: Vec<_> = g.components().iter().map(|c| t.forward(c)).collect();
    ScalarField::new(*g.grid(), t.inverse(&divergence_spec(&spec))).expect("grid-shaped")
}

/// `grad (-Delta)^{-1/2} f`. Under the forward sign used here the symbol is
/// `+i xi / |xi|`.
pub fn riesz_transform(f: &ScalarField) -> Result<VectorField> {
    check_mean_zero(f.values(), f.grid(), MEAN_TOL)?;
    let t = Transform::new(*f.grid());
    let s = frac_laplacian_power_spec(&t.forward(f.values()), -1.0);
    let comps = gradient_spec(&s).iter().map(|c| t.inverse(c)).collect();
    Ok(VectorField::new(*f.grid(), comps)?)
}

/// `grad (-Delta)^{-1} h`.
pub fn grad_inverse_laplacian(h: &ScalarField) -> Result<VectorField> {
    check_mean_zero(h.values(), h.grid(), MEAN_TOL)?;
    let t = Transform::new(*h.grid());
    let s = frac_laplacian_power_spec(&t.forward(h.values()), -2.0);
    let comps = gradient_spec(&s).iter().map(|c| t.inverse(c)).collect();
    Ok(VectorField::new(*h.grid(), comps)?)
}

/// Spectral solution of `-Delta u = f` on the periodic box (zero mode dropped).
pub fn inverse_laplacian(f: &ScalarField) -> Result<ScalarField> {
    frac_laplacian_power(f, -2.0)
}

pub fn inverse_laplacian_vec(f: &VectorField) -> Result<VectorField> {
    frac_laplacian_power_vec(f, -2.0)
}

/// Projection onto divergence-free fields, symbol `I - k k^T / |k|^2`.
/// Modes on a Nyquist row are removed.
pub fn leray_project(g: &VectorField) -> Result<VectorField> {
    check_mean_zero_vec(g, MEAN_TOL)?;
    let grid = *g.grid();
    let n = grid.dim();
    let t = Transform::new(grid);
    let spec: Vec<_> = g.components().iter().map(|c| t.forward(c)).collect();
    let mut out = vec![vec![ZERO; grid.len()]; n];
    for i in 0..grid.len() {
        let k = derivative_wavevector(&grid, i);
        let k2: f64 = k[..n].iter().map(|v| v * v).sum();
        // Nyquist rows have no consistent derivative; drop them
        if grid.is_nyquist(i) || grid.frequency(i)[..n].iter().all(|&v| v == 0.0) {
            continue;
        }
        let kg = if k2 > 0.0 { (0..n).fold(ZERO, |acc, d| acc + spec[d].coeffs[i] * k[d]) / k2 } else { ZERO };
        for d in 0..n {
            out[d][i] = spec[d].coeffs[i] - kg * k[d];
        }
    }
    let comps = out.into_iter().map(|coeffs| t.inverse(&SpectralField { grid, coeffs })).collect();
    Ok(VectorField::new(grid, comps)?)
}

/// Matrix curl `F_ij = d_j u_i - d_i u_j`, skew-symmetric by construction.
pub fn matrix_curl(u: &VectorField) -> MatrixField {
    let grid = *u.grid();
    let n = grid.dim();
    let t = Transform::new(grid);
    let grads: Vec<Vec<Vec<f64>>> = u
        .components()
        .iter()
        .map(|c| gradient_spec(&t.forward(c)).iter().map(|s| t.inverse(s)).collect())
        .collect();
    let mut entries = vec![vec![0.0; grid.len()]; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let fij: Vec<f64> = grads[i][j].iter().zip(&grads[j][i]).map(|(a, b)| a - b).collect();
            entries[j * n + i] = fij.iter().map(|v| -v).collect();
            entries[i * n + j] = fij;
        }
    }
    MatrixField::new(grid, entries, true).expect("skew by construction")
}

/// Vector curl of a three-dimensional field.
pub fn curl3(u: &VectorField) -> Result<VectorField> {
    if u.dim() != 3 {
        return Err(Error::DimensionMismatch(format!("vector curl needs n = 3, got {}", u.dim())));
    }
    let f = matrix_curl(u);
    let comps = [(2, 1), (0, 2), (1, 0)].iter().map(|&(i, j)| f.entry(i, j).to_vec()).collect();
    VectorField::new(*u.grid(), comps)
}

/// Row divergence `(div F_1, ..., div F_n)` with `F_j` the `j`-th column.
pub fn row_divergence(f: &MatrixField) -> VectorField {
    let n = f.grid().dim();
    let comps = (0..n).map(|j| divergence(&f.column(j)).into_values()).collect();
    VectorField::new(*f.grid(), comps).expect("grid-shaped")
}

/// `curl (-Delta)^{-1} f`.
pub fn curl_inverse_laplacian(f: &VectorField) -> Result<MatrixField> {
    Ok(matrix_curl(&inverse_laplacian_vec(f)?))
}

/// Jacobi matrix `(d u_i / d x_j)` of a vector field.
pub fn jacobian(u: &VectorField) -> MatrixField {
    let grid = *u.grid();
    let n = grid.dim();
    let t = Transform::new(grid);
    let mut entries = Vec::with_capacity(n * n);
    for c in u.components() {
        for s in gradient_spec(&t.forward(c)) {
            entries.push(t.inverse(&s));
        }
    }
    MatrixField::new(grid, entries, false).expect("grid-shaped")
}

// ---------------------------------------------------------------------------
// frequency-space quadrature

/// Smooth partition: 1 on `[0, 1/2]`, 0 on `[1, inf)`, C-infinity between.
pub fn smooth_cutoff(t: f64) -> f64 {
    let s = ((t - 0.5) / 0.5).clamp(0.0, 1.0);
    let psi = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let (a, b) = (psi(1.0 - s), psi(s));
    a / (a + b)
}

/// Polar region radius in lattice spacings.
const INNER_CELLS: f64 = 6.0;
const INNER_RADIAL: usize = 16;

struct InnerNode {
    xi: [f64; 3],
    weight: f64,
    /// Per-axis phase tables `e^{-i xi_d x_k}`.
    phases: Vec<Vec<Complex64>>,
}

/// Continuum transform of grid samples at an arbitrary frequency, by direct
/// summation over cells.
pub fn transform_at(values: &[f64], grid: &Grid, xi: &[f64]) -> Complex64 {
    let phases = axis_phases(grid, xi, -1.0);
    nudft(values, grid, &phases)
}

fn axis_phases(grid: &Grid, xi: &[f64], sign: f64) -> Vec<Vec<Complex64>> {
    let coords = grid.axis_coords();
    (0..grid.dim())
        .map(|d| coords.iter().map(|&x| Complex64::from_polar(1.0, sign * xi[d] * x)).collect())
        .collect()
}

fn nudft(values: &[f64], grid: &Grid, phases: &[Vec<Complex64>]) -> Complex64 {
    let m = grid.pts_per_axis();
    let vol = grid.cell_volume();
    let last = &phases[grid.dim() - 1];
    let mut lines = Vec::with_capacity(values.len() / m);
    for row in values.chunks_exact(m) {
        let mut acc = ZERO;
        for (v, p) in row.iter().zip(last) {
            if *v != 0.0 {
                acc += p * *v;
            }
        }
        lines.push(acc);
    }
    // contract remaining axes from the innermost outwards
    for ph in phases[..grid.dim() - 1].iter().rev() {
        lines = lines
            .chunks_exact(m)
            .map(|blk| blk.iter().zip(ph).fold(ZERO, |a, (v, p)| a + v * p))
            .collect();
    }
    lines[0] * vol
}

/// Transforms of a set of component arrays, ready for frequency-space
/// integrals under a chosen [`FrequencyQuadrature`].
pub struct SpectralSampler {
    grid: Grid,
    quad: FrequencyQuadrature,
    kappa: f64,
    lattice: Vec<SpectralField>,
    inner: Vec<InnerNode>,
    inner_values: Vec<Vec<Complex64>>,
}

impl SpectralSampler {
    pub fn new(comps: &[&[f64]], grid: Grid, quad: FrequencyQuadrature) -> Self {
        let t = Transform::new(grid);
        let lattice = comps.iter().map(|c| t.forward(c)).collect();
        let dk = grid.freq_spacing();
        let kappa = INNER_CELLS.min(grid.pts_per_axis() as f64 / 4.0) * dk;
        let (inner, inner_values) = match quad {
            FrequencyQuadrature::Lattice => (Vec::new(), Vec::new()),
            FrequencyQuadrature::FreeSpace => {
                let n = grid.dim();
                let sphere = SphereQuadrature::inner_rule(n);
                let (rs, wr) = gauss_legendre_on(INNER_RADIAL, 0.0, kappa);
                let mut nodes = Vec::new();
                for (r, w) in rs.iter().zip(&wr) {
                    let radial = w * r.powi(n as i32 - 1) * smooth_cutoff(r / kappa);
                    for (om, wo) in sphere.nodes().iter().zip(sphere.weights()) {
                        let mut xi = [0.0; 3];
                        for d in 0..n {
                            xi[d] = r * om[d];
                        }
                        nodes.push(InnerNode { xi, weight: radial * wo, phases: axis_phases(&grid, &xi, -1.0) });
                    }
                }
                let vals = map_indexed(nodes.len(), |i| {
                    comps.iter().map(|c| nudft(c, &grid, &nodes[i].phases)).collect::<Vec<_>>()
                });
                (nodes, vals)
            }
        };
        Self { grid, quad, kappa, lattice, inner, inner_values }
    }

    pub fn from_vector(g: &VectorField, quad: FrequencyQuadrature) -> Self {
        let comps: Vec<&[f64]> = g.components().iter().map(|c| c.as_slice()).collect();
        Self::new(&comps, *g.grid(), quad)
    }

    pub fn from_scalar(f: &ScalarField, quad: FrequencyQuadrature) -> Self {
        Self::new(&[f.values()], *f.grid(), quad)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lattice(&self) -> &[SpectralField] {
        &self.lattice
    }

    fn outer_weight(&self, xi: &[f64; 3]) -> f64 {
        match self.quad {
            FrequencyQuadrature::Lattice => 1.0,
            FrequencyQuadrature::FreeSpace => 1.0 - smooth_cutoff(norm3(xi) / self.kappa),
        }
    }

    /// `int density(xi, g^(xi)) dxi`. The lattice rule keeps the zero mode
/// only where the density is finite there.
    pub fn integrate(&self, density: impl Fn(&[f64; 3], &[Complex64]) -> f64) -> f64 {
        let g = self.grid;
        let nc = self.lattice.len();
        let mut buf = vec![ZERO; nc];
        let mut terms = Vec::with_capacity(g.len());
        for i in 0..g.len() {
            let xi = g.frequency(i);
            if xi.iter().all(|&v| v == 0.0) && self.quad == FrequencyQuadrature::FreeSpace {
                terms.push(0.0);
                continue;
            }
            let w = self.outer_weight(&xi);
            if w == 0.0 {
                terms.push(0.0);
                continue;
            }
            for (b, s) in buf.iter_mut().zip(&self.lattice) {
                *b = s.coeffs[i];
            }
            let v = w * density(&xi, &buf);
            // a singular weight at the zero mode drops it
            terms.push(if v.is_finite() { v } else { 0.0 });
        }
        let outer = pairwise_sum(&terms) * g.freq_spacing().powi(g.dim() as i32);
        let inner_terms: Vec<f64> =
            self.inner.iter().zip(&self.inner_values).map(|(node, v)| node.weight * density(&node.xi, v)).collect();
        outer + pairwise_sum(&inner_terms)
    }

    /// Values at the given cells of the field with spectrum
    /// `symbol(xi, g^(xi))`, i.e. `(2 pi)^{-n} int symbol e^{i xi x} dxi`.
    pub fn synthesize_at(
        &self,
        symbol: impl Fn(&[f64; 3], &[Complex64]) -> Vec<Complex64>,
        cells: &[usize],
    ) -> Vec<Vec<f64>> {
        let g = self.grid;
        let n_out = symbol(&[1.0, 0.0, 0.0], &vec![ZERO; self.lattice.len()]).len();
        let t = Transform::new(g);
        let mut outer = vec![vec![ZERO; g.len()]; n_out];
        let mut buf = vec![ZERO; self.lattice.len()];
        for i in 0..g.len() {
            let xi = g.frequency(i);
            if xi.iter().all(|&v| v == 0.0) {
                continue;
            }
            let w = self.outer_weight(&xi);
            for (b, s) in buf.iter_mut().zip(&self.lattice) {
                *b = s.coeffs[i];
            }
            for (o, v) in outer.iter_mut().zip(symbol(&xi, &buf)) {
                o[i] = v * w;
            }
        }
        let mut result: Vec<Vec<f64>> = outer
            .into_iter()
            .map(|coeffs| {
                let full = t.inverse(&SpectralField { grid: g, coeffs });
                cells.iter().map(|&c| full[c]).collect()
            })
            .collect();
        if !self.inner.is_empty() {
            let norm = (2.0 * std::f64::consts::PI).powi(-(g.dim() as i32));
            let contrib: Vec<Vec<Complex64>> =
                self.inner.iter().zip(&self.inner_values).map(|(node, v)| symbol(&node.xi, v)).collect();
            let per_cell = map_indexed(cells.len(), |ci| {
                let multi = g.unravel(cells[ci]);
                let mut acc = vec![Vec::with_capacity(self.inner.len()); n_out];
                for (node, s) in self.inner.iter().zip(&contrib) {
                    // e^{+i xi x} is the conjugate of the stored forward phase
                    let mut ph = Complex64::new(1.0, 0.0);
                    for d in 0..g.dim() {
                        ph *= node.phases[d][multi[d]].conj();
                    }
                    for (a, v) in acc.iter_mut().zip(s) {
                        a.push(node.weight * (v * ph).re);
                    }
                }
                acc.iter().map(|a| pairwise_sum(a) * norm).collect::<Vec<f64>>()
            });
            for (ci, vals) in per_cell.iter().enumerate() {
                for (r, v) in result.iter_mut().zip(vals) {
                    r[ci] += v;
                }
            }
        }
        result
    }
}

fn sum_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `||f||^2_{H^l}` (homogeneous) of the components, `int |f^|^2 |xi|^{2l}`.
pub fn homog_norm_sq(sampler: &SpectralSampler, l: f64) -> f64 {
    sampler.integrate(|xi, v| sum_sq(v) * norm3(xi).powf(2.0 * l))
}

/// `||div g||^2_{H^l}`, evaluated as `int |xi . g^|^2 |xi|^{2l}`.
pub fn div_norm_sq(sampler: &SpectralSampler, l: f64) -> f64 {
    sampler.integrate(|xi, v| {
        let d = v.iter().zip(xi).fold(ZERO, |a, (c, k)| a + c * *k);
        d.norm_sqr() * norm3(xi).powf(2.0 * l)
    })
}

/// `||div g||^2` with inhomogeneous weight `(|xi|^2 + 1)^{l/2}`.
pub fn div_norm_sq_inhomog(sampler: &SpectralSampler, l: f64) -> f64 {
    sampler.integrate(|xi, v| {
        let d = v.iter().zip(xi).fold(ZERO, |a, (c, k)| a + c * *k);
        d.norm_sqr() * (norm3(xi).powi(2) + 1.0).powf(0.5 * l)
    })
}

fn norm_precondition(values: &[&[f64]], grid: &Grid, l: f64) -> Result<()> {
    // the integrand |f^|^2 |xi|^{2l} is integrable at 0 when 2l > -n
    if 2.0 * l <= -(grid.dim() as f64) {
        for v in values {
            check_mean_zero(v, grid, MEAN_TOL)?;
        }
    }
    Ok(())
}

/// `||f||_{H^l} = (int |f^(xi)|^2 |xi|^{2l} dxi)^{1/2}`, lattice rule.
pub fn sobolev_norm_homog(f: &ScalarField, l: f64) -> Result<f64> {
    sobolev_norm_homog_with(f, l, FrequencyQuadrature::Lattice)
}

pub fn sobolev_norm_homog_with(f: &ScalarField, l: f64, quad: FrequencyQuadrature) -> Result<f64> {
    norm_precondition(&[f.values()], f.grid(), l)?;
    Ok(homog_norm_sq(&SpectralSampler::from_scalar(f, quad), l).max(0.0).sqrt())
}

/// Root of the sum of squared component norms.
pub fn sobolev_norm_homog_vec(g: &VectorField, l: f64, quad: FrequencyQuadrature) -> Result<f64> {
    let comps: Vec<&[f64]> = g.components().iter().map(|c| c.as_slice()).collect();
    norm_precondition(&comps, g.grid(), l)?;
    Ok(homog_norm_sq(&SpectralSampler::from_vector(g, quad), l).max(0.0).sqrt())
}

/// `||f||_{H^l} = (int |f^(xi)|^2 (|xi|^2 + 1)^{l/2} dxi)^{1/2}`.
pub fn sobolev_norm_inhomog(f: &ScalarField, l: f64) -> f64 {
    inhomog_norm_sq(&SpectralSampler::from_scalar(f, FrequencyQuadrature::Lattice), l).sqrt()
}

pub fn sobolev_norm_inhomog_vec(g: &VectorField, l: f64) -> f64 {
    inhomog_norm_sq(&SpectralSampler::from_vector(g, FrequencyQuadrature::Lattice), l).sqrt()
}

pub fn inhomog_norm_sq(sampler: &SpectralSampler, l: f64) -> f64 {
    sampler.integrate(|xi, v| sum_sq(v) * (norm3(xi).powi(2) + 1.0).powf(0.5 * l))
}

// ---------------------------------------------------------------------------
// regularization

/// Profile used to carry the mean in [`regularize_eps`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsProfile {
    /// `(2 pi)^{-n/2} e^{-|x|^2/2}`.
    #[default]
    Gaussian,
    /// `exp(-1/(1-|x|^2))` on the unit ball, unit discrete mass.
    Bump,
}

/// Tail threshold of the Gaussian at the box edge.
pub const EPS_TAIL: f64 = 1e-8;

/// `g_eps = g - eps^n eta(eps x) int g`.
pub fn regularize_eps(g: &VectorField, eps: f64, profile: EpsProfile) -> Result<VectorField> {
    let grid = *g.grid();
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let edge = 0.5 * grid.box_len() * eps;
    match profile {
        EpsProfile::Gaussian => {
            let tail = (-0.5 * edge * edge).exp();
            if tail >= EPS_TAIL {
                return Err(Error::EpsilonTooSmallForBox { eps, box_len: grid.box_len(), tail });
            }
        }
        EpsProfile::Bump => {
            if edge < 1.0 {
                return Err(Error::EpsilonTooSmallForBox { eps, box_len: grid.box_len(), tail: 1.0 });
            }
        }
    }
    let mass = g.integral();
    if mass.iter().all(|&m| m == 0.0) {
        return Ok(g.clone());
    }
    let prof = eps_profile_values(&grid, eps, profile);
    let comps = g
        .components()
        .iter()
        .zip(&mass)
        .map(|(c, m)| c.iter().zip(&prof).map(|(v, p)| v - m * p).collect())
        .collect();
    Ok(VectorField::new(grid, comps)?)
}

/// `eps^n eta(eps x)` sampled on the grid.
pub fn eps_profile_values(grid: &Grid, eps: f64, profile: EpsProfile) -> Vec<f64> {
    let n = grid.dim();
    let nf = n as f64;
    match profile {
        EpsProfile::Gaussian => {
            let c = (2.0 * std::f64::consts::PI).powf(-0.5 * nf) * eps.powi(n as i32);
            (0..grid.len())
                .map(|i| {
                    let p = grid.point(i);
                    let r2: f64 = p[..n].iter().map(|x| x * x).sum();
                    c * (-0.5 * eps * eps * r2).exp()
                })
                .collect()
        }
        EpsProfile::Bump => {
            // normalized by the discrete sum: the trapezoid error of a
            // barely resolved bump is far above the mean tolerance
            let raw: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let p = grid.point(i);
                    let r: f64 = p[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
                    crate::recipe::bump(eps * r)
                })
                .collect();
            let mass = pairwise_sum(&raw) * grid.cell_volume();
            raw.iter().map(|v| v / mass).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_partition() {
        assert_eq!(smooth_cutoff(0.2), 1.0);
        assert_eq!(smooth_cutoff(0.5), 1.0);
        assert_eq!(smooth_cutoff(1.0), 0.0);
        assert!((smooth_cutoff(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..100 {
            let v = smooth_cutoff(0.5 + 0.005 * k as f64);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn nudft_matches_lattice_transform() {
        let grid = Grid::new(2, 6.0, 16).unwrap();
        let f = ScalarField::from_fn(grid, |x| (-(x[0] - 0.3).powi(2) - 2.0 * x[1] * x[1]).exp());
        let s = dft(&f);
        for idx in [1usize, 17, 40, 200] {
            let xi = grid.frequency(idx);
            let direct = transform_at(f.values(), &grid, &xi[..2]);
            assert!((direct - s.coeffs()[idx]).norm() < 1e-12);
        }
    }

    #[test]
    fn negated_index_wraps() {
        let grid = Grid::new(2, 1.0, 8).unwrap();
        let s = dft(&ScalarField::zeros(grid));
        assert_eq!(s.negated_index(0), 0);
        assert_eq!(s.negated_index(grid.ravel(&[1, 2])), grid.ravel(&[7, 6]));
        assert_eq!(s.negated_index(grid.ravel(&[4, 0])), grid.ravel(&[4, 0]));
    }
}
