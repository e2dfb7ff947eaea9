//! Checkers: each computes both sides of one inequality or identity on
//! concrete fields and reports the ratio.

mod case;
mod checks;

pub use case::*;
pub use checks::*;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ResultId {
    T1,
    #[serde(rename = "T1_necessity")]
    T1Necessity,
    T2,
    #[serde(rename = "LEMMA_10x")]
    Lemma10x,
    P1,
    P2,
    T3i,
    #[serde(rename = "T3ii_sharpness")]
    T3iiSharpness,
    T3iii,
    #[serde(rename = "T3_IDENTITY")]
    T3Identity,
    #[serde(rename = "COROLLARY")]
    Corollary,
    #[serde(rename = "CR_IDENTITY")]
    CrIdentity,
    #[serde(rename = "CRE_IDENTITY")]
    CreIdentity,
    P4,
    T4,
    #[serde(rename = "REMARK5")]
    Remark5,
    #[serde(rename = "CONJ_PROBE")]
    ConjProbe,
}

impl ResultId {
    pub const ALL: [ResultId; 17] = [
        Self::T1,
        Self::T1Necessity,
        Self::T2,
        Self::Lemma10x,
        Self::P1,
        Self::P2,
        Self::T3i,
        Self::T3iiSharpness,
        Self::T3iii,
        Self::T3Identity,
        Self::Corollary,
        Self::CrIdentity,
        Self::CreIdentity,
        Self::P4,
        Self::T4,
        Self::Remark5,
        Self::ConjProbe,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::T1 => "T1",
            Self::T1Necessity => "T1_necessity",
            Self::T2 => "T2",
            Self::Lemma10x => "LEMMA_10x",
            Self::P1 => "P1",
            Self::P2 => "P2",
            Self::T3i => "T3i",
            Self::T3iiSharpness => "T3ii_sharpness",
            Self::T3iii => "T3iii",
            Self::T3Identity => "T3_IDENTITY",
            Self::Corollary => "COROLLARY",
            Self::CrIdentity => "CR_IDENTITY",
            Self::CreIdentity => "CRE_IDENTITY",
            Self::P4 => "P4",
            Self::T4 => "T4",
            Self::Remark5 => "REMARK5",
            Self::ConjProbe => "CONJ_PROBE",
        }
    }

    /// One-line description of what the case needs.
    pub fn requirements(&self) -> &'static str {
        match self {
            Self::T1 => "scalar mean-zero recipe; phi (zero sphere mean); q in [1, n/(n-1))",
            Self::T1Necessity => "phi; q; ladder of >= 3 mollifier widths",
            Self::T2 => "vector recipe (projected to divergence free); q in [1, n/(n-1))",
            Self::Lemma10x => "vector recipe (projected to divergence free); q in [1, n/(n-1))",
            Self::P1 => "vector mean-zero recipe; q in (1, n/(n-1))",
            Self::P2 => "vector mean-zero recipe",
            Self::T3i => "vector recipe with nonzero mean; ladder of >= 3 eps values",
            Self::T3iiSharpness => "extremizer parameters r_in, r_out; ladder of >= 3 widths",
            Self::T3iii => "vector mean-zero recipe",
            Self::T3Identity => "vector mean-zero recipe",
            Self::Corollary => "scalar recipe (compact support)",
            Self::CrIdentity => "vector mean-zero recipe",
            Self::CreIdentity => "scalar recipe (compact support)",
            Self::P4 => "vector mean-zero recipe",
            Self::T4 => "n = 3; vector mean-zero recipe g; second vector recipe for the solenoidal part of f",
            Self::Remark5 => "vector mean-zero recipe; calibration seed",
            Self::ConjProbe => "ladder of >= 3 mollifier widths; quadratic coefficients (probe mode)",
        }
    }
}

impl fmt::Display for ResultId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResultId {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| crate::Error::InvalidParameter(format!("unknown result id `{s}`")))
    }
}

/// Ratio at `N` and at `2N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub coarse: f64,
    pub fine: f64,
}

impl Refinement {
    /// `|fine - coarse| / |fine|`.
    pub fn drift(&self) -> f64 {
        (self.fine - self.coarse).abs() / self.fine.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub result_id: ResultId,
    pub n: usize,
    pub pts_per_axis: usize,
    pub box_len: f64,
    pub q_or_l: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` for 0/0 cases.
    pub ratio: Option<f64>,
    /// Constant the ratio is measured against, when one is known.
    pub constant: Option<f64>,
    pub degenerate: bool,
    pub refinement: Option<Refinement>,
    pub seed: u64,
    /// Named diagnostics (component norms, residuals, measured constants).
    pub extra: BTreeMap<String, f64>,
}

impl InequalityReport {
    pub(crate) fn new(result_id: ResultId, grid: &crate::Grid, q_or_l: Option<f64>, lhs: f64, rhs: f64) -> Self {
        let degenerate = rhs == 0.0;
        Self {
            result_id,
            n: grid.dim(),
            pts_per_axis: grid.pts_per_axis(),
            box_len: grid.box_len(),
            q_or_l,
            lhs,
            rhs,
            ratio: if degenerate { None } else { Some(lhs / rhs) },
            constant: None,
            degenerate,
            refinement: None,
            seed: 0,
            extra: BTreeMap::new(),
        }
    }

    pub(crate) fn with_constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub(crate) fn note(mut self, key: &str, v: f64) -> Self {
        self.extra.insert(key.to_string(), v);
        self
    }

    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extra.get(key).copied()
    }
}

/// Least-squares fit `y = c1 + c2 x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    LinearFit { intercept, slope, r_squared }
}

/// One arm of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendArm {
    pub label: String,
    pub params: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `lhs / rhs`
    pub values: Vec<f64>,
}

impl TrendArm {
    pub fn strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub result_id: ResultId,
    pub n: usize,
    pub pts_per_axis: usize,
    pub box_len: f64,
    pub arms: Vec<TrendArm>,
    /// Fit of the first arm against `log(1/param)`, when requested.
    pub log_fit: Option<LinearFit>,
    pub target: Option<f64>,
    pub extra: BTreeMap<String, f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_ids_roundtrip_through_strings() {
        for r in ResultId::ALL {
            assert_eq!(r.as_str().parse::<ResultId>().unwrap(), r);
            let json = serde_json::to_string(&r).unwrap();
            assert_eq!(json, format!("\"{}\"", r.as_str()));
        }
    }

    #[test]
    fn exact_line_fit() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = linear_fit(&x, &y);
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }
}
