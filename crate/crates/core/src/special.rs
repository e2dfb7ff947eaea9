//! Gamma, the modified Bessel function `K_1`, and the dimension-dependent
//! constants used by the checkers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real `z > 0` (Lanczos, g = 7).
pub fn gamma_fn(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain { func: "gamma", arg: z });
    }
    Ok(gamma_pos(z))
}

fn gamma_pos(z: f64) -> f64 {
    if z < 0.5 {
        // reflection keeps the series in its accurate range
        return PI / ((PI * z).sin() * gamma_pos(1.0 - z));
    }
    if z == z.floor() && z <= 171.0 {
        return (1..z as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = z - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// Switch point between the ascending series and the continued fraction.
pub const K1_SWITCH: f64 = 2.0;

/// Modified Bessel function of the second kind, order one, for `t > 0`.
///
/// Ascending series for `t <= 2`. Above that, Steed's continued fraction
/// (Temme's CF2) for the large-argument form `sqrt(pi/2t) e^{-t} (...)`.
pub fn bessel_k1(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain { func: "bessel_k1", arg: t });
    }
    Ok(if t <= K1_SWITCH { k1_series(t) } else { k1_large(t) })
}

/// `t K_1(t)`, extended by its limit 1 at `t = 0`.
pub fn t_k1(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t * bessel_k1(t).expect("t > 0")
    }
}

pub(crate) fn k1_series(t: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    let y = 0.25 * t * t;
    // I_1(t) = (t/2) sum y^k / (k! (k+1)!)
    // psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
    let mut term = 1.0;
    let mut i1 = 0.0;
    let mut rest = 0.0;
    let mut hk = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term *= y / (kf * (kf + 1.0));
            hk += 1.0 / kf;
        }
        let hk1 = hk + 1.0 / (kf + 1.0);
        i1 += term;
        rest += term * (hk + hk1 - 2.0 * EULER);
        if term < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * t * i1;
    1.0 / t + (0.5 * t).ln() * i1 - 0.25 * t * rest
}

pub(crate) fn k1_large(t: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + t);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * t)).sqrt() * (-t).exp() / s;
    k0 * (t + 0.5 - h) / t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedConstant {
    /// `(n-1)(2 sqrt(pi))^{-n} / Gamma(1 + n/2)`, sharp constant of the
    /// non-mean-zero bound.
    Thm3iConst,
    /// `(2 sqrt(pi))^{-n} / Gamma(n/2)`.
    Thm3iiiConst,
    /// `((2 sqrt(pi))^{-n} / (Gamma(n/2)(n-1)))^{1/2}`.
    CorollaryConst,
    /// `1/(4 pi^2)`, stated independently for the three-dimensional bound.
    Thm4Const,
    /// `2^{1-n} pi^{-n/2} / Gamma(n/2)`.
    CrScale,
    /// `|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)`.
    SphereArea,
}

impl NamedConstant {
    pub const ALL: [NamedConstant; 6] = [
        Self::Thm3iConst,
        Self::Thm3iiiConst,
        Self::CorollaryConst,
        Self::Thm4Const,
        Self::CrScale,
        Self::SphereArea,
    ];
}

pub fn constant(name: NamedConstant, n: usize) -> Result<f64> {
    if !(n == 2 || n == 3) {
        return Err(Error::UnsupportedDimension(n));
    }
    let nf = n as f64;
    let half = gamma_pos(0.5 * nf);
    let base = (2.0 * PI.sqrt()).powi(-(n as i32));
    Ok(match name {
        NamedConstant::Thm3iConst => (nf - 1.0) * base / gamma_pos(1.0 + 0.5 * nf),
        NamedConstant::Thm3iiiConst => base / half,
        NamedConstant::CorollaryConst => (base / (half * (nf - 1.0))).sqrt(),
        NamedConstant::Thm4Const => 1.0 / (4.0 * PI * PI),
        NamedConstant::CrScale => 2f64.powi(1 - n as i32) * PI.powf(-0.5 * nf) / half,
        NamedConstant::SphereArea => 2.0 * PI.powf(0.5 * nf) / half,
    })
}

pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(0.5 * n as f64) / gamma_pos(0.5 * n as f64)
}
