//! Real-space potential theory on the grid: the fundamental solution,
//! gradient kernels, bounded matrix kernels and their quadratic forms,
//! weighted norms and sphere fluxes.
//!
//! Convolutions are linear (not periodic): arrays are zero-padded to `2N`
//! points per axis before the FFT, so a field supported in `|x| <= L/4`
//! never sees its images.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::CubeFft;
use crate::field::{MatrixField, ScalarField, VectorField};
use crate::grid::{norm, Grid};
use crate::reduce::{map_indexed, pairwise_sum};
use crate::special::{sphere_area, t_k1};
use crate::sphere::SphereQuadrature;

/// `int_{[-1/2,1/2]^2} log|x| dx`.
pub const CELL_LOG_MEAN_2D: f64 = -1.061_175_426_882_524_3;
/// `int_{[-1/2,1/2]^3} |x|^{-1} dx`.
pub const CELL_INV_MEAN_3D: f64 = 2.380_077_363_979_553_5;

/// Fundamental solution of `-Delta`: `-(1/2pi) log|x|` or `1/(4 pi |x|)`.
pub fn fundamental_solution(n: usize, r: f64) -> f64 {
    if n == 2 {
        -(r.ln()) / (2.0 * PI)
    } else {
        1.0 / (4.0 * PI * r)
    }
}

/// Cell average of the fundamental solution over the cell centred at 0.
pub fn fundamental_solution_cell_mean(n: usize, h: f64) -> f64 {
    if n == 2 {
        -(h.ln() + CELL_LOG_MEAN_2D) / (2.0 * PI)
    } else {
        CELL_INV_MEAN_3D / (4.0 * PI * h)
    }
}

/// Bounded direction kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKernel {
    /// `w_j w_k - delta_jk / n`
    M,
    /// `w_j w_k - delta_jk / 2`
    MHalf,
    /// `w_j w_k`
    N,
    /// `w_j w_k t K_1(t)` with `t = |x - y|`
    Bessel,
}

impl MatrixKernel {
    /// Entry `(j, k)` at offset `z != 0`.
    pub fn entry(&self, z: &[f64], j: usize, k: usize) -> f64 {
        let n = z.len();
        let r = norm(z);
        let ww = z[j] * z[k] / (r * r);
        let d = if j == k { 1.0 } else { 0.0 };
        match self {
            MatrixKernel::M => ww - d / n as f64,
            MatrixKernel::MHalf => ww - 0.5 * d,
            MatrixKernel::N => ww,
            MatrixKernel::Bessel => ww * t_k1(r),
        }
    }

    /// Value used for the self cell: the cell average of the kernel, which
    /// by cubic symmetry is `c delta_jk` (with `t K_1 ~ 1` on the cell).
    pub fn self_entry(&self, n: usize, j: usize, k: usize) -> f64 {
        if j != k {
            return 0.0;
        }
        let nf = n as f64;
        match self {
            MatrixKernel::M => 0.0,
            MatrixKernel::MHalf => 1.0 / nf - 0.5,
            MatrixKernel::N | MatrixKernel::Bessel => 1.0 / nf,
        }
    }

    /// Spectral norm of the matrix at direction `w` (symmetric `n x n`).
    pub fn operator_norm(&self, w: &[f64]) -> f64 {
        let n = w.len();
        let mut a = [[0.0; 3]; 3];
        for j in 0..n {
            for k in 0..n {
                a[j][k] = self.entry(w, j, k);
            }
        }
        sym_spectral_norm(&a, n)
    }
}

/// Largest absolute eigenvalue of a symmetric 2x2 or 3x3 matrix (Jacobi sweeps).
fn sym_spectral_norm(a: &[[f64; 3]; 3], n: usize) -> f64 {
    let mut m = *a;
    for _ in 0..50 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i].abs()).fold(0.0, f64::max)
}

/// Zero-padded convolution with kernels sampled on the doubled offset grid.
pub struct PaddedConvolver {
    grid: Grid,
    fft: CubeFft,
    side: usize,
}

impl PaddedConvolver {
    pub fn new(grid: Grid) -> Self {
        let side = 2 * grid.pts_per_axis();
        Self { grid, fft: CubeFft::new(grid.dim(), side), side }
    }

    fn offset(&self, multi: &[usize]) -> [f64; 3] {
        let m = self.grid.pts_per_axis() as i64;
        let h = self.grid.spacing();
        let mut z = [0.0; 3];
        for d in 0..self.grid.dim() {
            let k = multi[d] as i64;
            z[d] = (if k < m { k } else { k - 2 * m }) as f64 * h;
        }
        z
    }

    fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for d in (0..self.grid.dim()).rev() {
            out[d] = idx % self.side;
            idx /= self.side;
        }
        out
    }

    /// Transform of `k(z)` on the padded grid; `origin` replaces `k(0)`.
    pub fn kernel_transform(&self, k: impl Fn(&[f64]) -> f64, origin: f64) -> Vec<Complex64> {
        let n = self.grid.dim();
        let mut data: Vec<Complex64> = (0..self.fft.len())
            .map(|i| {
                let z = self.offset(&self.unravel(i));
                let v = if z[..n].iter().all(|&c| c == 0.0) { origin } else { k(&z[..n]) };
                Complex64::new(v, 0.0)
            })
            .collect();
        self.fft.forward(&mut data);
        data
    }

    pub fn field_transform(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.grid.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        for (i, &v) in values.iter().enumerate() {
            let multi = self.grid.unravel(i);
            let j = multi[..n].iter().fold(0, |acc, &k| acc * self.side + k);
            data[j] = Complex64::new(v, 0.0);
        }
        self.fft.forward(&mut data);
        data
    }

    /// `sum_y k(x - y) f(y)` on the original cells, from a product spectrum.
    pub fn back(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.fft.inverse(&mut spec);
        let scale = 1.0 / self.fft.len() as f64;
        let n = self.grid.dim();
        (0..self.grid.len())
            .map(|i| {
                let multi = self.grid.unravel(i);
                let j = multi[..n].iter().fold(0, |acc, &k| acc * self.side + k);
                spec[j].re * scale
            })
            .collect()
    }
}

/// `u = Gamma * f` by padded convolution, self cell from the cell average.
pub fn newtonian_potential(f: &ScalarField) -> Result<ScalarField> {
    let grid = *f.grid();
    let n = grid.dim();
    if n == 2 {
        crate::spectral::check_mean_zero(f.values(), &grid, crate::spectral::MEAN_TOL)?;
    }
    let conv = PaddedConvolver::new(grid);
    let kh = conv.kernel_transform(|z| fundamental_solution(n, norm(z)), fundamental_solution_cell_mean(n, grid.spacing()));
    let fh = conv.field_transform(f.values());
    let vol = grid.cell_volume();
    let out = conv.back(kh.iter().zip(&fh).map(|(a, b)| a * b * vol).collect());
    ScalarField::new(grid, out)
}

fn support_cells(comps: &[&[f64]]) -> Vec<usize> {
    (0..comps[0].len()).filter(|&i| comps.iter().any(|c| c[i] != 0.0)).collect()
}

/// `grad u(x) = |S|^{-1} int (y - x)/|y - x|^n f(y) dy`, midpoint rule,
/// cells closer than `1e-9 h` to `x` skipped.
pub fn gradient_kernel_apply(f: &ScalarField, x: &[f64]) -> [f64; 3] {
    let grid = f.grid();
    let n = grid.dim();
    let s = sphere_area(n);
    let tiny = 1e-9 * grid.spacing();
    let cells = support_cells(&[f.values()]);
    let mut out = [0.0; 3];
    for (d, o) in out.iter_mut().enumerate().take(n) {
        let terms: Vec<f64> = cells
            .iter()
            .map(|&i| {
                let p = grid.point(i);
                let mut z = [0.0; 3];
                for k in 0..n {
                    z[k] = p[k] - x[k];
                }
                let r = norm(&z[..n]);
                if r < tiny {
                    0.0
                } else {
                    z[d] / r.powi(n as i32) * f.values()[i]
                }
            })
            .collect();
        *o = pairwise_sum(&terms) * grid.cell_volume() / s;
    }
    out
}

/// Split of `grad u(x)` into the near/intermediate/far parts and the
/// monopole term, with the majorants of each of the first three parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ADecomposition {
    pub parts: [[f64; 3]; 4],
    /// `|x|^{-n} int_{|y|<|x|/2} |f| |y|`, `int_{mid} |f| |y-x|^{1-n}`,
    /// `int_{|y|>2|x|} |f| |y|^{1-n}`.
    pub majorants: [f64; 3],
}

impl ADecomposition {
    pub fn sum(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for p in &self.parts {
            for d in 0..3 {
                s[d] += p[d];
            }
        }
        s
    }

    /// `|A_j| / majorant_j`; `None` where the majorant vanishes.
    pub fn measured_constants(&self) -> [Option<f64>; 3] {
        let mut out = [None; 3];
        for j in 0..3 {
            if self.majorants[j] > 0.0 {
                out[j] = Some(norm(&self.parts[j]) / self.majorants[j]);
            }
        }
        out
    }
}

pub fn a_decomposition(f: &ScalarField, x: &[f64]) -> Result<ADecomposition> {
    let grid = f.grid();
    let n = grid.dim();
    let rx = norm(&x[..n]);
    if rx == 0.0 {
        return Err(Error::InvalidParameter("decomposition point must be nonzero".into()));
    }
    let s = sphere_area(n);
    let vol = grid.cell_volume();
    let tiny = 1e-9 * grid.spacing();
    let mono: Vec<f64> = (0..n).map(|d| x[d] / rx.powi(n as i32)).collect();
    let cells = support_cells(&[f.values()]);
    // per region: vector terms and majorant terms
    let mut vecs = vec![vec![Vec::new(); n]; 3];
    let mut majs = vec![Vec::new(); 3];
    let mut near_mass = Vec::new();
    for &i in &cells {
        let p = grid.point(i);
        let fy = f.values()[i];
        let ry = norm(&p[..n]);
        let mut z = [0.0; 3];
        for k in 0..n {
            z[k] = p[k] - x[k];
        }
        let r = norm(&z[..n]);
        let region = if ry < 0.5 * rx {
            0
        } else if ry <= 2.0 * rx {
            1
        } else {
            2
        };
        for d in 0..n {
            let k = if r < tiny { 0.0 } else { z[d] / r.powi(n as i32) };
            let k = if region == 0 { k + mono[d] } else { k };
            vecs[region][d].push(k * fy);
        }
        majs[region].push(match region {
            0 => fy.abs() * ry / rx.powi(n as i32),
            1 => {
                if r < tiny {
                    0.0
                } else {
                    fy.abs() / r.powi(n as i32 - 1)
                }
            }
            _ => fy.abs() / ry.powi(n as i32 - 1),
        });
        if region == 0 {
            near_mass.push(fy);
        }
    }
    let mut parts = [[0.0; 3]; 4];
    let mut majorants = [0.0; 3];
    for j in 0..3 {
        for d in 0..n {
            parts[j][d] = pairwise_sum(&vecs[j][d]) * vol / s;
        }
        majorants[j] = pairwise_sum(&majs[j]) * vol;
    }
    let m = pairwise_sum(&near_mass) * vol;
    for d in 0..n {
        parts[3][d] = -mono[d] * m / s;
    }
    Ok(ADecomposition { parts, majorants })
}

/// Exponent of the weight `|x|^{n(q-1) - q}`.
pub fn weight_exponent(n: usize, q: f64) -> f64 {
    n as f64 * (q - 1.0) - q
}

pub fn check_q(n: usize, q: f64, probe_mode: bool) -> Result<()> {
    let critical = n as f64 / (n as f64 - 1.0);
    if !(q >= 1.0) || (!probe_mode && q >= critical) || !q.is_finite() {
        return Err(Error::QOutOfRange { q, critical });
    }
    Ok(())
}

/// `(sum |f|^q |x|^{n(q-1)-q} h^n)^{1/q}` for pointwise magnitudes `values`.
pub fn weighted_lq_norm_of(values: &[f64], grid: &Grid, q: f64, probe_mode: bool) -> Result<f64> {
    let n = grid.dim();
    check_q(n, q, probe_mode)?;
    let a = weight_exponent(n, q);
    let terms: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if *v == 0.0 {
                0.0
            } else {
                v.abs().powf(q) * norm(&grid.point(i)[..n]).powf(a)
            }
        })
        .collect();
    Ok((pairwise_sum(&terms) * grid.cell_volume()).powf(1.0 / q))
}

pub fn weighted_lq_norm(f: &ScalarField, q: f64, probe_mode: bool) -> Result<f64> {
    weighted_lq_norm_of(f.values(), f.grid(), q, probe_mode)
}

/// Unweighted `L^p` norm of pointwise magnitudes.
pub fn lp_norm_of(values: &[f64], grid: &Grid, p: f64) -> f64 {
    let terms: Vec<f64> = values.iter().map(|v| v.abs().powf(p)).collect();
    (pairwise_sum(&terms) * grid.cell_volume()).powf(1.0 / p)
}

/// Positively homogeneous integrands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HomogeneousIntegrand {
    /// `sum_j a_j |v_j|^q`
    AbsPowerCombo { coeffs: Vec<f64>, q: f64 },
    /// `a |v|^q`
    EuclideanPower { scale: f64, q: f64 },
    /// `sum_ij a_ij v_i v_j`, degree 2, row-major `a`
    QuadraticForm { coeffs: Vec<f64> },
}

impl HomogeneousIntegrand {
    pub fn degree(&self) -> f64 {
        match self {
            Self::AbsPowerCombo { q, .. } | Self::EuclideanPower { q, .. } => *q,
            Self::QuadraticForm { .. } => 2.0,
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Self::AbsPowerCombo { coeffs, q } => coeffs.iter().zip(v).map(|(a, x)| a * x.abs().powf(*q)).sum(),
            Self::EuclideanPower { scale, q } => scale * norm(v).powf(*q),
            Self::QuadraticForm { coeffs } => {
                let n = v.len();
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += coeffs[i * n + j] * v[i] * v[j];
                    }
                }
                s
            }
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        let ok = match self {
            Self::AbsPowerCombo { coeffs, .. } => coeffs.len() == n,
            Self::EuclideanPower { .. } => true,
            Self::QuadraticForm { coeffs } => coeffs.len() == n * n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("integrand coefficients for dimension {n}")))
        }
    }

    /// `int_{S^{n-1}} Phi dw`.
    pub fn sphere_integral(&self, n: usize) -> Result<f64> {
        self.check_dim(n)?;
        Ok(SphereQuadrature::standard(n)?.integrate(|w| self.eval(w)))
    }
}

/// Geometric ladder of 64 radii from `2h` to `L/2`.
pub fn radius_ladder(grid: &Grid) -> Vec<f64> {
    let (a, b) = (2.0 * grid.spacing(), 0.5 * grid.box_len());
    (0..64).map(|k| a * (b / a).powf(k as f64 / 63.0)).collect()
}

/// `int_{|x|<R} Phi(grad u) |x|^{n(q-1)-q} dx` for each `R` in `radii`,
/// given the gradient field.
pub fn truncated_phi_integrals(
    grad: &VectorField,
    phi: &HomogeneousIntegrand,
    q: f64,
    radii: &[f64],
    probe_mode: bool,
) -> Result<Vec<f64>> {
    let grid = grad.grid();
    let n = grid.dim();
    check_q(n, q, probe_mode)?;
    phi.check_dim(n)?;
    let a = weight_exponent(n, q);
    let mut cells: Vec<(f64, f64)> = (0..grid.len())
        .map(|i| {
            let r = norm(&grid.point(i)[..n]);
            let v = grad.value_at(i);
            (r, phi.eval(&v[..n]) * r.powf(a))
        })
        .collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    let vol = grid.cell_volume();
    // ball sums as differences of one ordered cumulative pass
    let mut out = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    let mut idx = 0;
    let mut sorted: Vec<(usize, f64)> = radii.iter().copied().enumerate().collect();
    sorted.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut vals = vec![0.0; radii.len()];
    for (slot, r) in sorted {
        while idx < cells.len() && cells[idx].0 < r {
            acc += cells[idx].1;
            idx += 1;
        }
        vals[slot] = acc * vol;
    }
    out.extend(vals);
    Ok(out)
}

/// Single-radius version with the gradient taken from the spectral engine.
pub fn truncated_phi_integral(
    f: &ScalarField,
    phi: &HomogeneousIntegrand,
    q: f64,
    radius: f64,
    probe_mode: bool,
) -> Result<f64> {
    let max = 0.5 * f.grid().box_len();
    if !(radius > 0.0 && radius <= max) {
        return Err(Error::RadiusOutOfRange { radius, max });
    }
    let grad = crate::spectral::grad_inverse_laplacian(f)?;
    Ok(truncated_phi_integrals(&grad, phi, q, &[radius], probe_mode)?[0])
}

/// Which evaluation path a kernel form takes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPath {
    /// Pairwise sum over support cells.
    Direct,
    /// Padded FFT convolution.
    #[default]
    Fft,
}

/// `sum_{x,y} (K(x - y) g(y), g(x)) h^{2n}`.
pub fn matrix_kernel_form(g: &VectorField, kernel: MatrixKernel, path: KernelPath) -> f64 {
    let grid = *g.grid();
    let n = grid.dim();
    let vol = grid.cell_volume();
    match path {
        KernelPath::Fft => {
            let kg = kernel_apply_fft(g, kernel);
            let terms: Vec<f64> =
                (0..n).flat_map(|j| kg[j].iter().zip(g.component(j)).map(|(a, b)| a * b)).collect();
            pairwise_sum(&terms) * vol * vol
        }
        KernelPath::Direct => {
            let comps: Vec<&[f64]> = g.components().iter().map(|c| c.as_slice()).collect();
            let cells = support_cells(&comps);
            let pts: Vec<[f64; 3]> = cells.iter().map(|&i| grid.point(i)).collect();
            let vals: Vec<[f64; 3]> = cells.iter().map(|&i| g.value_at(i)).collect();
            let rows = map_indexed(cells.len(), |a| {
                let terms: Vec<f64> = (0..cells.len())
                    .map(|b| {
                        let mut z = [0.0; 3];
                        for d in 0..n {
                            z[d] = pts[a][d] - pts[b][d];
                        }
                        let mut s = 0.0;
                        for j in 0..n {
                            for k in 0..n {
                                let kv = if a == b { kernel.self_entry(n, j, k) } else { kernel.entry(&z[..n], j, k) };
                                s += vals[a][j] * kv * vals[b][k];
                            }
                        }
                        s
                    })
                    .collect();
                pairwise_sum(&terms)
            });
            pairwise_sum(&rows) * vol * vol
        }
    }
}

/// `(K * g)_j(x) = sum_y K_jk(x - y) g_k(y)` without the `h^n` factor.
fn kernel_apply_fft(g: &VectorField, kernel: MatrixKernel) -> Vec<Vec<f64>> {
    let grid = *g.grid();
    let n = grid.dim();
    let conv = PaddedConvolver::new(grid);
    let gh: Vec<Vec<Complex64>> = g.components().iter().map(|c| conv.field_transform(c)).collect();
    let mut khat = vec![Vec::new(); n * n];
    for j in 0..n {
        for k in j..n {
            let t = conv.kernel_transform(|z| kernel.entry(z, j, k), kernel.self_entry(n, j, k));
            if k != j {
                khat[k * n + j] = t.clone();
            }
            khat[j * n + k] = t;
        }
    }
    (0..n)
        .map(|j| {
            let mut acc = vec![Complex64::new(0.0, 0.0); gh[0].len()];
            for k in 0..n {
                for (a, (kk, gg)) in acc.iter_mut().zip(khat[j * n + k].iter().zip(&gh[k])) {
                    *a += kk * gg;
                }
            }
            conv.back(acc)
        })
        .collect()
}

/// `scale * sum_y K(x - y) g(y) h^n` on every cell.
pub fn kernel_convolution(g: &VectorField, kernel: MatrixKernel, scale: f64) -> VectorField {
    let vol = g.grid().cell_volume();
    let comps = kernel_apply_fft(g, kernel).into_iter().map(|c| c.iter().map(|v| v * scale * vol).collect()).collect();
    VectorField::new(*g.grid(), comps).expect("grid-shaped")
}

/// Multilinear interpolation of a periodic sample array at `x`.
pub fn interpolate(values: &[f64], grid: &Grid, x: &[f64]) -> f64 {
    let n = grid.dim();
    let m = grid.pts_per_axis();
    let h = grid.spacing();
    let mut base = [0usize; 3];
    let mut frac = [0.0; 3];
    for d in 0..n {
        let s = (x[d] + 0.5 * grid.box_len()) / h - 0.5;
        let i0 = s.floor();
        frac[d] = s - i0;
        base[d] = (i0 as i64).rem_euclid(m as i64) as usize;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut multi = [0usize; 3];
        for d in 0..n {
            let up = (corner >> d) & 1 == 1;
            w *= if up { frac[d] } else { 1.0 - frac[d] };
            multi[d] = if up { (base[d] + 1) % m } else { base[d] };
        }
        if w != 0.0 {
            acc += w * values[grid.ravel(&multi)];
        }
    }
    acc
}

/// `P(v; r) = int_{|y|=r} (y/|y|) . v(y) dw_y` with the unit-sphere measure.
pub fn flux_functional(v: &VectorField, r: f64, quad: &SphereQuadrature) -> Result<f64> {
    let grid = v.grid();
    let n = grid.dim();
    let max = 0.5 * grid.box_len();
    if !(r > 0.0 && r < max) {
        return Err(Error::RadiusOutOfRange { radius: r, max });
    }
    if quad.dim() != n {
        return Err(Error::DimensionMismatch("sphere rule dimension".into()));
    }
    let terms: Vec<f64> = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(w, wt)| {
            let mut y = [0.0; 3];
            for d in 0..n {
                y[d] = r * w[d];
            }
            let dot: f64 = (0..n).map(|d| w[d] * interpolate(v.component(d), grid, &y)).sum();
            wt * dot
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Both sides of the flux recursion at radius `r` for each column `F_j`:
/// `G` is built on `|z| = r` from the fluxes of `F` at `2r`, then
/// `(P(G_j; r), 2^{n-1} (n-1)/n P(F_j; 2r))` is returned.
pub fn flux_recursion(f: &MatrixField, r: f64, quad: &SphereQuadrature) -> Result<Vec<(f64, f64)>> {
    let n = f.grid().dim();
    let s = sphere_area(n);
    let fluxes: Vec<f64> = (0..n).map(|j| flux_functional(&f.column(j), 2.0 * r, quad)).collect::<Result<_>>()?;
    let c = 2f64.powi(n as i32 - 1) / s;
    let nf = n as f64;
    Ok((0..n)
        .map(|j| {
            // column j of G at direction w: G_ij = c (w_i P_j - w_j P_i)
            let lhs = quad.integrate(|w| (0..n).map(|i| w[i] * c * (w[i] * fluxes[j] - w[j] * fluxes[i])).sum());
            (lhs, 2f64.powi(n as i32 - 1) * (nf - 1.0) / nf * fluxes[j])
        })
        .collect())
}
