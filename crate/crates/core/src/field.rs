//! Real-valued sample containers on a [`Grid`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::reduce::pairwise_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    /// Radius of a centred ball outside which every value is exactly zero.
    /// `None` for fields without compact support (e.g. projected fields).
    support_radius: Option<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, support_radius: None })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], support_radius: Some(0.0) }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let n = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..n])).collect();
        Self { grid, values, support_radius: None }
    }

    pub fn with_support(mut self, radius: Option<f64>) -> Self {
        self.support_radius = radius;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    /// Midpoint-rule integral `sum(values) h^n`.
    pub fn integral(&self) -> f64 {
        pairwise_sum(&self.values) * self.grid.cell_volume()
    }

    pub fn l1_norm(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        pairwise_sum(&abs) * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        (pairwise_sum(&sq) * self.grid.cell_volume()).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            support_radius: self.support_radius,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    grid: Grid,
    components: Vec<Vec<f64>>,
    support_radius: Option<f64>,
}

impl VectorField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} components in dimension {}",
                components.len(),
                grid.dim()
            )));
        }
        if components.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::DimensionMismatch("component length".into()));
        }
        Ok(Self { grid, components, support_radius: None })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            components: vec![vec![0.0; grid.len()]; grid.dim()],
            support_radius: Some(0.0),
        }
    }

    pub fn from_scalars(fields: Vec<ScalarField>) -> Result<Self> {
        let grid = *fields
            .first()
            .ok_or_else(|| Error::DimensionMismatch("no components".into()))?
            .grid();
        if fields.iter().any(|f| *f.grid() != grid) {
            return Err(Error::DimensionMismatch("components on different grids".into()));
        }
        let support = fields.iter().try_fold(0.0f64, |acc, f| f.support_radius().map(|r| acc.max(r)));
        let mut v = Self::new(grid, fields.into_iter().map(ScalarField::into_values).collect())?;
        v.support_radius = support;
        Ok(v)
    }

    /// Scalar profile times a constant direction.
    pub fn from_profile(profile: &ScalarField, direction: &[f64]) -> Result<Self> {
        let grid = *profile.grid();
        if direction.len() != grid.dim() {
            return Err(Error::DimensionMismatch("direction length".into()));
        }
        let components =
            direction.iter().map(|&d| profile.values().iter().map(|v| v * d).collect()).collect();
        let mut v = Self::new(grid, components)?;
        v.support_radius = profile.support_radius();
        Ok(v)
    }

    pub fn with_support(mut self, radius: Option<f64>) -> Self {
        self.support_radius = radius;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component_field(&self, i: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.components[i].clone(),
            support_radius: self.support_radius,
        }
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }

    pub fn value_at(&self, idx: usize) -> [f64; 3] {
        let mut v = [0.0; 3];
        for (d, c) in self.components.iter().enumerate() {
            v[d] = c[idx];
        }
        v
    }

    /// `int |g(x)| dx` with the Euclidean norm of the vector.
    pub fn l1_norm(&self) -> f64 {
        pairwise_sum(&self.magnitude()) * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.magnitude().iter().map(|m| m * m).collect();
        (pairwise_sum(&sq) * self.grid.cell_volume()).sqrt()
    }

    /// Componentwise integrals.
    pub fn integral(&self) -> Vec<f64> {
        let vol = self.grid.cell_volume();
        self.components.iter().map(|c| pairwise_sum(c) * vol).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            components: self.components.iter().map(|c| c.iter().map(|v| v * s).collect()).collect(),
            support_radius: self.support_radius,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch("different grids".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        let support = match (self.support_radius, other.support_radius) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Ok(Self { grid: self.grid, components, support_radius: support })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    /// Rotation by 90 degrees in the `(x_1, x_2)` plane, applied to both the
    /// sample positions and the vector components. Exact on the lattice.
    pub fn rotate_quarter(&self) -> Self {
        let grid = self.grid;
        let m = grid.pts_per_axis();
        let mut components = vec![vec![0.0; grid.len()]; grid.dim()];
        for idx in 0..grid.len() {
            let src = grid.unravel(idx);
            // (x1, x2) -> (-x2, x1); cell k maps to m-1-k under negation
            let mut dst = src;
            dst[0] = m - 1 - src[1];
            dst[1] = src[0];
            let j = grid.ravel(&dst);
            let v = self.value_at(idx);
            components[0][j] = -v[1];
            components[1][j] = v[0];
            for (d, comp) in components.iter_mut().enumerate().skip(2) {
                comp[j] = v[d];
            }
        }
        Self { grid, components, support_radius: self.support_radius }
    }
}

/// `n x n` matrix of sample arrays stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: Grid,
    entries: Vec<Vec<f64>>,
    skew_symmetric: bool,
}

impl MatrixField {
    pub fn new(grid: Grid, entries: Vec<Vec<f64>>, skew_symmetric: bool) -> Result<Self> {
        let n = grid.dim();
        if entries.len() != n * n || entries.iter().any(|e| e.len() != grid.len()) {
            return Err(Error::DimensionMismatch("matrix entries".into()));
        }
        let m = Self { grid, entries, skew_symmetric };
        if skew_symmetric && m.skew_defect() != 0.0 {
            return Err(Error::InvalidParameter("entries are not skew-symmetric".into()));
        }
        Ok(m)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn entry(&self, i: usize, j: usize) -> &[f64] {
        &self.entries[i * self.grid.dim() + j]
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.skew_symmetric
    }

    /// Largest `|F_ij + F_ji|` over all entries and cells.
    pub fn skew_defect(&self) -> f64 {
        let n = self.grid.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                for (a, b) in self.entry(i, j).iter().zip(self.entry(j, i)) {
                    worst = worst.max((a + b).abs());
                }
            }
        }
        worst
    }

    /// Pointwise Frobenius norm.
    pub fn frobenius(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|c| self.entries.iter().map(|e| e[c] * e[c]).sum::<f64>().sqrt())
            .collect()
    }

    /// Column `j` as a vector field, `(F_1j, ..., F_nj)`.
    pub fn column(&self, j: usize) -> VectorField {
        let n = self.grid.dim();
        let comps = (0..n).map(|i| self.entry(i, j).to_vec()).collect();
        VectorField::new(self.grid, comps).expect("column has grid shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_rotation_four_times_is_identity() {
        let grid = Grid::new(2, 4.0, 8).unwrap();
        let a = ScalarField::from_fn(grid, |x| x[0] + 2.0 * x[1] * x[1]);
        let b = ScalarField::from_fn(grid, |x| x[0] * x[1] - 1.0);
        let v = VectorField::from_scalars(vec![a, b]).unwrap();
        let r = v.rotate_quarter().rotate_quarter().rotate_quarter().rotate_quarter();
        assert_eq!(r, v);
    }

    #[test]
    fn quarter_rotation_moves_samples() {
        let grid = Grid::new(2, 4.0, 8).unwrap();
        let v = VectorField::from_profile(&ScalarField::from_fn(grid, |x| x[0]), &[1.0, 0.0]).unwrap();
        let r = v.rotate_quarter();
        // rotated field: R v(R^{-1} x) with R^{-1}(x1,x2) = (x2,-x1)
        for idx in 0..grid.len() {
            let p = grid.point(idx);
            let expect = [0.0, p[1]];
            let got = r.value_at(idx);
            assert!((got[0] - expect[0]).abs() < 1e-15 && (got[1] - expect[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn skew_flag_is_validated() {
        let grid = Grid::new(2, 4.0, 8).unwrap();
        let z = vec![0.0; grid.len()];
        let one = vec![1.0; grid.len()];
        let minus = vec![-1.0; grid.len()];
        assert!(MatrixField::new(grid, vec![z.clone(), one.clone(), minus, z.clone()], true).is_ok());
        assert!(MatrixField::new(grid, vec![z.clone(), one.clone(), one, z], true).is_err());
    }
}
