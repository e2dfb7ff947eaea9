//! Uniform cell-centred lattice over a box centred at the origin.
//!
//! Sample `k` along an axis sits at `(k + 1/2) h - L/2`, so no sample ever
//! coincides with the origin and kernels singular at `x = 0` can be evaluated
//! at every cell centre.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    box_len: f64,
    pts_per_axis: usize,
}

impl Grid {
    pub fn new(n: usize, box_len: f64, pts_per_axis: usize) -> Result<Self> {
        let max = match n {
            2 => 256,
            3 => 64,
            other => return Err(Error::UnsupportedDimension(other)),
        };
        if pts_per_axis % 2 != 0 {
            return Err(Error::OddGridSize(pts_per_axis));
        }
        if !(8..=max).contains(&pts_per_axis) {
            return Err(Error::GridSizeOutOfRange { n, got: pts_per_axis, min: 8, max });
        }
        if !(box_len.is_finite() && box_len > 0.0) {
            return Err(Error::InvalidBoxLength(box_len));
        }
        Ok(Self { n, box_len, pts_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    pub fn pts_per_axis(&self) -> usize {
        self.pts_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / self.pts_per_axis as f64
    }

    /// Volume of one cell, `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    pub fn len(&self) -> usize {
        self.pts_per_axis.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest support radius allowed for compactly supported fields.
    pub fn padding_radius(&self) -> f64 {
        self.box_len / 4.0
    }

    /// Cell-centre coordinate along one axis.
    pub fn axis_coord(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.spacing() - 0.5 * self.box_len
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.pts_per_axis).map(|k| self.axis_coord(k)).collect()
    }

    /// Row-major multi-index of a flat index (last axis fastest).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let m = self.pts_per_axis;
        let mut out = [0usize; 3];
        for d in (0..self.n).rev() {
            out[d] = idx % m;
            idx /= m;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi[..self.n].iter().fold(0, |acc, &k| acc * self.pts_per_axis + k)
    }

    /// Cell centre of a flat index; unused trailing components are zero.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let multi = self.unravel(idx);
        let mut p = [0.0; 3];
        for d in 0..self.n {
            p[d] = self.axis_coord(multi[d]);
        }
        p
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Signed frequency index in `[-N/2, N/2)` for FFT storage position `k`.
    pub fn freq_index(&self, k: usize) -> i64 {
        let m = self.pts_per_axis as i64;
        let k = k as i64;
        if k < m / 2 {
            k
        } else {
            k - m
        }
    }

    /// Frequency spacing `2 pi / L`.
    pub fn freq_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_len
    }

    /// Angular frequency vector of a flat spectral index.
    pub fn frequency(&self, idx: usize) -> [f64; 3] {
        let multi = self.unravel(idx);
        let dk = self.freq_spacing();
        let mut xi = [0.0; 3];
        for d in 0..self.n {
            xi[d] = self.freq_index(multi[d]) as f64 * dk;
        }
        xi
    }

    /// True when any axis of the spectral index sits on the Nyquist row.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let multi = self.unravel(idx);
        let half = self.pts_per_axis / 2;
        multi[..self.n].iter().any(|&k| k == half)
    }

    /// Same lattice with twice the points over the same box.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n, self.box_len, self.pts_per_axis * 2)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
