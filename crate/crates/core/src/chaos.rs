//! Li–Yorke and distributional chaos diagnostics for the induced set
//! dynamics, computed from the orbit-set distance series
//! `D[i] = d_H(F^i(x), F^i(y))`.
//!
//! All asymptotic quantities are replaced by final-half window extremes of
//! a finite series; results are numerical evidence only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{image_of_set, Family, DEFAULT_ORBIT_CAP};
use crate::error::{contract, Error, Result};
use crate::geometry::Point;
use crate::pointset::{hausdorff_raw, FiniteSet};

/// Shortest series accepted by [`distributional_profile`].
pub const MIN_SERIES_LEN: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct PairSeries {
    pub x: Point,
    pub y: Point,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Tail maximum at or above this counts as "limsup > 0".
    pub sep: f64,
    /// Tail minimum at or below this counts as "liminf = 0".
    pub prox: f64,
    /// Minimum `φ* − φ` gap that counts as a distributional gap.
    pub dc_gap_tol: f64,
    /// `φ(τ₀)` at or below this counts as zero.
    pub dc_zero_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            sep: 0.05,
            prox: 0.005,
            dc_gap_tol: 0.1,
            dc_zero_tol: 0.02,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.prox > 0.0 && self.sep > self.prox) {
            return Err(contract("need 0 < prox < sep"));
        }
        if !(self.dc_gap_tol > 0.0 && self.dc_zero_tol >= 0.0) {
            return Err(contract("distributional tolerances must be positive"));
        }
        Ok(())
    }
}

/// `D[i] = d_H(F^i(x), F^i(y))` for `i = 0..n`, streaming the two orbit
/// sets level by level.
pub fn pair_series(family: &Family, x: &Point, y: &Point, n: usize) -> Result<PairSeries> {
    if n == 0 {
        return Err(contract("series length must be positive"));
    }
    let space = family.space();
    let mut a = FiniteSet::singleton(space, x)?;
    let mut b = FiniteSet::singleton(space, y)?;
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        d.push(hausdorff_raw(space, a.raw(), b.raw()));
        if i + 1 == n {
            break;
        }
        let needed = a.len().max(b.len()) as u128 * family.len() as u128;
        if needed > DEFAULT_ORBIT_CAP as u128 {
            return Err(Error::SizeLimit {
                what: "orbit set",
                needed,
                cap: DEFAULT_ORBIT_CAP,
                hint: "shorten the series",
            });
        }
        a = image_of_set(family, &a, 0.0)?;
        b = image_of_set(family, &b, 0.0)?;
    }
    Ok(PairSeries {
        x: x.clone(),
        y: y.clone(),
        d,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionalProfile {
    pub t_grid: Vec<f64>,
    /// Window minimum of `φⁿ(t)`, standing in for `φ_xy(t)`.
    pub phi_lower: Vec<f64>,
    /// Window maximum of `φⁿ(t)`, standing in for `φ*_xy(t)`.
    pub phi_upper: Vec<f64>,
}

impl DistributionalProfile {
    pub fn max_gap(&self) -> f64 {
        self.phi_upper
            .iter()
            .zip(&self.phi_lower)
            .map(|(u, l)| u - l)
            .fold(0.0, f64::max)
    }
}

/// Extremes of `φⁿ(t) = (1/n)·#{i < n : D[i] < t}` over prefix lengths `n`
/// in the final half of the series.
pub fn distributional_profile(series: &PairSeries, t_grid: &[f64]) -> Result<DistributionalProfile> {
    let len = series.d.len();
    if len < MIN_SERIES_LEN {
        return Err(Error::Estimation(format!(
            "series of length {len} is shorter than {MIN_SERIES_LEN}"
        )));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(contract("t grid must be positive and strictly increasing"));
    }
    let start = len.div_ceil(2).max(1);
    let mut phi_lower = Vec::with_capacity(t_grid.len());
    let mut phi_upper = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut below = 0usize;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (i, &v) in series.d.iter().enumerate() {
            if v < t {
                below += 1;
            }
            let n = i + 1;
            if n >= start {
                let phi = below as f64 / n as f64;
                lo = lo.min(phi);
                hi = hi.max(phi);
            }
        }
        phi_lower.push(lo);
        phi_upper.push(hi);
    }
    Ok(DistributionalProfile {
        t_grid: t_grid.to_vec(),
        phi_lower,
        phi_upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DcClass {
    Hdc1,
    Hdc2,
    Dc3,
    None,
}

impl DcClass {
    pub fn label(self) -> &'static str {
        match self {
            DcClass::Hdc1 => "HDC1",
            DcClass::Hdc2 => "HDC2",
            DcClass::Dc3 => "DC3",
            DcClass::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairClassification {
    pub li_yorke: bool,
    pub dc_class: DcClass,
    pub tail_max: f64,
    pub tail_min: f64,
    pub max_phi_gap: f64,
    /// Always "numerical evidence": finite data cannot prove chaos.
    pub status: &'static str,
}

const PHI_ONE_TOL: f64 = 1e-12;

/// Finite-horizon Li–Yorke test and distributional class of one pair.
pub fn classify_pair(
    series: &PairSeries,
    profile: &DistributionalProfile,
    tau_grid: &[f64],
    thresholds: &Thresholds,
) -> Result<PairClassification> {
    thresholds.validate()?;
    let len = series.d.len();
    let tail = &series.d[len / 2..];
    let tail_max = tail.iter().cloned().fold(0.0, f64::max);
    let tail_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let li_yorke = tail_max >= thresholds.sep && tail_min <= thresholds.prox;

    let upper_is_one = profile.phi_upper.iter().all(|&u| u >= 1.0 - PHI_ONE_TOL);
    let max_phi_gap = profile.max_gap();
    let gap = max_phi_gap > thresholds.dc_gap_tol;
    let lower_hits_zero = if tau_grid.is_empty() {
        false
    } else {
        let at_tau = distributional_profile(series, tau_grid)?;
        at_tau.phi_lower.iter().any(|&l| l <= thresholds.dc_zero_tol)
    };
    let dc_class = if upper_is_one && lower_hits_zero {
        DcClass::Hdc1
    } else if upper_is_one && gap {
        DcClass::Hdc2
    } else if gap {
        DcClass::Dc3
    } else {
        DcClass::None
    };
    Ok(PairClassification {
        li_yorke,
        dc_class,
        tail_max,
        tail_min,
        max_phi_gap,
        status: "numerical evidence",
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub x: Point,
    pub y: Point,
    pub classification: PairClassification,
}

/// Classifies every pair in parallel; output order follows `pairs`.
pub fn scan_pairs(
    family: &Family,
    pairs: &[(Point, Point)],
    n: usize,
    t_grid: &[f64],
    tau_grid: &[f64],
    thresholds: &Thresholds,
) -> Result<Vec<PairReport>> {
    thresholds.validate()?;
    pairs
        .par_iter()
        .map(|(x, y)| {
            let s = pair_series(family, x, y, n)?;
            let p = distributional_profile(&s, t_grid)?;
            Ok(PairReport {
                x: x.clone(),
                y: y.clone(),
                classification: classify_pair(&s, &p, tau_grid, thresholds)?,
            })
        })
        .collect()
}
