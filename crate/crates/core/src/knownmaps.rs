//! Closed-form maps of the earlier 15-qubit H-type and 5-qubit T-type
//! procedures, used as comparison curves and for reference thresholds.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use serde::Serialize;

use crate::distill::ErrorMap;
use crate::error::{Error, Result};

fn check_p(p: f64) -> Result<()> {
    if (0.0..=0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange { value: p, range: "[0, 1/2]" })
    }
}

/// Output error of the 15-qubit procedure after one accepted round.
pub fn bk15_pout(p: f64) -> Result<f64> {
    check_p(p)?;
    let q = 1.0 - 2.0 * p;
    let q7 = q.powi(7);
    let q8 = q7 * q;
    Ok((1.0 - 15.0 * q7 + 15.0 * q8 - q.powi(15)) / (2.0 * (1.0 + 15.0 * q8)))
}

/// `t = p / (1 - p)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TParameter(f64);

impl TParameter {
    pub fn from_p(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self(p / (1.0 - p)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Output error of the 5-qubit T-direction procedure,
/// `(t^5 + 5t^2) / (1 + 5t^2 + 5t^3 + t^5)`.
pub fn t5_map(p: f64) -> Result<f64> {
    let t = TParameter::from_p(p)?.value();
    let t2 = t * t;
    let t3 = t2 * t;
    let t5 = t3 * t2;
    Ok((t5 + 5.0 * t2) / (1.0 + 5.0 * t2 + 5.0 * t3 + t5))
}

/// First crossing of `f(p) = p` above zero, by grid scan and bisection.
pub fn p_space_threshold(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<Option<f64>> {
    let steps = 10_000;
    let g = |p: f64| f(p).map(|v| v - p);
    let mut a = lo;
    let mut ga = g(a)?;
    for i in 1..=steps {
        let b = lo + (hi - lo) * i as f64 / steps as f64;
        let gb = g(b)?;
        if ga < 0.0 && gb >= 0.0 {
            let (mut l, mut r) = (a, b);
            while r - l > 1e-15 {
                let mid = 0.5 * (l + r);
                if g(mid)? < 0.0 {
                    l = mid;
                } else {
                    r = mid;
                }
            }
            return Ok(Some(0.5 * (l + r)));
        }
        a = b;
        ga = gb;
    }
    Ok(None)
}

/// Threshold of the 15-qubit map, about 14.148%.
pub fn bk15_threshold() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| p_space_threshold(bk15_pout, 1e-6, 0.5).ok().flatten().expect("15-qubit map has a threshold"))
}

/// Threshold of the 5-qubit T map, `(1 - sqrt(3/7)) / 2`.
pub fn t5_threshold() -> f64 {
    p_space_threshold(t5_map, 1e-6, 0.45).ok().flatten().expect("5-qubit map has a threshold")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnownThresholds {
    pub f_h_star: f64,
    pub p_h_new: f64,
    pub p_h_bk: f64,
    pub p_t: f64,
    pub d_t_plane: f64,
    pub d_o_face: f64,
}

pub fn known_thresholds() -> KnownThresholds {
    KnownThresholds {
        f_h_star: ((1.0 + FRAC_1_SQRT_2) / 2.0).sqrt(),
        p_h_new: (1.0 - FRAC_1_SQRT_2) / 2.0,
        p_h_bk: bk15_threshold(),
        p_t: (1.0 - (3.0f64 / 7.0).sqrt()) / 2.0,
        d_t_plane: (3.0f64 / 7.0).sqrt(),
        d_o_face: 1.0 / 3f64.sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownMap {
    Bk15,
    T5,
}

impl ErrorMap for KnownMap {
    fn apply(&self, p: f64) -> Result<(f64, Option<f64>)> {
        match self {
            KnownMap::Bk15 => Ok((bk15_pout(p)?, None)),
            KnownMap::T5 => Ok((t5_map(p)?, None)),
        }
    }
}
