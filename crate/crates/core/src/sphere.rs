//! Quadrature on the unit sphere `S^{n-1}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    n: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    /// Default rule: 512 uniform angles on the circle; on `S^2` a product of
    /// 32 Gauss–Legendre nodes in `z` and 32 uniform azimuths (1024 nodes).
    pub fn standard(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Self::circle(512)),
            3 => Ok(Self::gauss_product(32, 32)),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }

    /// Cheaper rule used inside frequency-space polar regions.
    pub(crate) fn inner_rule(n: usize) -> Self {
        if n == 2 {
            Self::circle(64)
        } else {
            Self::gauss_product(16, 32)
        }
    }

    pub fn circle(m: usize) -> Self {
        let w = 2.0 * PI / m as f64;
        let nodes = (0..m)
            .map(|k| {
                let th = w * (k as f64 + 0.5);
                [th.cos(), th.sin(), 0.0]
            })
            .collect();
        Self { n: 2, nodes, weights: vec![w; m] }
    }

    /// Gauss–Legendre in `z = cos(theta)` times uniform azimuths.
    pub fn gauss_product(mz: usize, mphi: usize) -> Self {
        let (z, wz) = gauss_legendre(mz);
        let dphi = 2.0 * PI / mphi as f64;
        let mut nodes = Vec::with_capacity(mz * mphi);
        let mut weights = Vec::with_capacity(mz * mphi);
        for (zi, wi) in z.iter().zip(&wz) {
            let s = (1.0 - zi * zi).sqrt();
            for k in 0..mphi {
                let ph = dphi * (k as f64 + 0.5);
                nodes.push([s * ph.cos(), s * ph.sin(), *zi]);
                weights.push(wi * dphi);
            }
        }
        Self { n: 3, nodes, weights }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(w, wt)| wt * f(&w[..self.n])).collect();
        crate::reduce::pairwise_sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        assert_eq!(SphereQuadrature::standard(2).unwrap().len(), 512);
        assert_eq!(SphereQuadrature::standard(3).unwrap().len(), 1024);
        assert!(SphereQuadrature::standard(4).is_err());
    }

    #[test]
    fn nodes_are_unit_vectors() {
        for n in [2, 3] {
            let q = SphereQuadrature::standard(n).unwrap();
            assert!(q.nodes().iter().all(|w| (crate::grid::norm(w) - 1.0).abs() < 1e-14));
        }
    }
}
