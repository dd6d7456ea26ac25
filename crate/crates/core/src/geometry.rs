//! Compact state spaces built from unit intervals and circles.
//!
//! A [`SpaceSpec`] is a finite product of factors under the max metric.
//! Interval coordinates live in `[0, 1]`; circle coordinates are stored in
//! canonical form in `[0, 1)` and measured by arc length.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// Default cap on the number of points a grid may contain.
pub const DEFAULT_GRID_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    /// `[0, 1]` with the Euclidean metric.
    Interval,
    /// `R / Z` with the arc metric.
    Circle,
}

impl Factor {
    #[inline]
    pub fn distance(self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self {
            Factor::Interval => d,
            Factor::Circle => d.min(1.0 - d),
        }
    }

    /// Maps a raw coordinate to its canonical representative.
    #[inline]
    pub fn canonical(self, x: f64) -> f64 {
        match self {
            Factor::Interval => x.clamp(0.0, 1.0),
            Factor::Circle => wrap_unit(x),
        }
    }

    pub fn diameter(self) -> f64 {
        match self {
            Factor::Interval => 1.0,
            Factor::Circle => 0.5,
        }
    }

    fn lattice(self, resolution: f64) -> Vec<f64> {
        // Shave a little off so that 1/0.0025 does not round up to 401 cells.
        let cells = ((1.0 / resolution) - 1e-9).ceil().max(1.0) as usize;
        let count = match self {
            Factor::Interval => cells + 1,
            Factor::Circle => cells,
        };
        (0..count).map(|k| k as f64 / cells as f64).collect()
    }
}

/// Reduces `x` modulo 1 into `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    // x.floor() can leave r == 1.0 for tiny negative x.
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// An ordered product of interval and circle factors with the max metric.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    factors: Arc<[Factor]>,
}

impl SpaceSpec {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(contract("a space needs at least one factor"));
        }
        Ok(SpaceSpec {
            factors: factors.into(),
        })
    }

    pub fn interval() -> Self {
        SpaceSpec::new(vec![Factor::Interval]).expect("nonempty")
    }

    pub fn circle() -> Self {
        SpaceSpec::new(vec![Factor::Circle]).expect("nonempty")
    }

    /// The product space `self × other`.
    pub fn product(&self, other: &SpaceSpec) -> Self {
        let mut factors = self.factors.to_vec();
        factors.extend_from_slice(&other.factors);
        SpaceSpec::new(factors).expect("nonempty")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    /// Max-metric diameter: the largest factor diameter.
    pub fn diameter(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.diameter())
            .fold(0.0, f64::max)
    }

    /// Distance between raw coordinate slices. Callers guarantee lengths.
    #[inline]
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.factors.len() == 1 {
            return self.factors[0].distance(a[0], b[0]);
        }
        let mut m = 0.0f64;
        for ((f, &x), &y) in self.factors.iter().zip(a).zip(b) {
            m = m.max(f.distance(x, y));
        }
        m
    }

    /// Checked distance between two points of this space.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dist(a.coords(), b.coords()))
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(contract(format!(
                "point has {} coordinates but the space has {} factors",
                p.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Builds a point, reducing circle coordinates and clamping interval ones.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.dim() {
            return Err(contract(format!(
                "{} coordinates given for a {}-factor space",
                coords.len(),
                self.dim()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(contract("point coordinates must be finite"));
        }
        Ok(Point(
            self.factors
                .iter()
                .zip(coords)
                .map(|(f, &c)| f.canonical(c))
                .collect(),
        ))
    }

    pub(crate) fn canonicalize(&self, coords: &mut [f64]) {
        for (f, c) in self.factors.iter().zip(coords.iter_mut()) {
            *c = f.canonical(*c);
        }
    }

    pub fn grid(&self, resolution: f64) -> Result<Vec<Point>> {
        self.grid_capped(resolution, DEFAULT_GRID_CAP)
    }

    /// Uniform lattice with spacing at most `resolution` in every factor,
    /// in lexicographic order (first factor most significant).
    pub fn grid_capped(&self, resolution: f64, cap: usize) -> Result<Vec<Point>> {
        if !(resolution > 0.0 && resolution <= 1.0) {
            return Err(contract(format!(
                "grid resolution must lie in (0, 1], got {resolution}"
            )));
        }
        let axes: Vec<Vec<f64>> = self.factors.iter().map(|f| f.lattice(resolution)).collect();
        let needed = axes
            .iter()
            .fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128));
        if needed > cap as u128 {
            return Err(Error::SizeLimit {
                what: "grid",
                needed,
                cap,
                hint: "raise the grid resolution",
            });
        }
        let mut out = Vec::with_capacity(needed as usize);
        let mut idx = vec![0usize; axes.len()];
        loop {
            out.push(Point(idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect()));
            let mut k = axes.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

impl fmt::Debug for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factors.iter()).finish()
    }
}

/// A point of a [`SpaceSpec`], one coordinate per factor.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct Point(Vec<f64>);

impl Point {
    /// A point on a one-factor space. The coordinate is not canonicalized;
    /// use [`SpaceSpec::point`] for that.
    pub fn scalar(x: f64) -> Self {
        Point(vec![x])
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// First coordinate; convenient for one-dimensional spaces.
    pub fn x(&self) -> f64 {
        self.0[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn interval_endpoints() {
        let s = SpaceSpec::interval();
        let d = s.distance(&Point::scalar(0.0), &Point::scalar(1.0)).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn circle_wraps() {
        let s = SpaceSpec::circle();
        let d = s.distance(&Point::scalar(0.1), &Point::scalar(0.9)).unwrap();
        assert!(approx(d, 0.2));
    }

    #[test]
    fn product_takes_max() {
        let s = SpaceSpec::new(vec![Factor::Interval, Factor::Circle]).unwrap();
        let a = s.point(&[0.0, 0.1]).unwrap();
        let b = s.point(&[0.3, 0.9]).unwrap();
        assert!(approx(s.distance(&a, &b).unwrap(), 0.3));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let s = SpaceSpec::interval();
        let p = Point::from_raw(vec![0.0, 0.0]);
        assert!(matches!(s.distance(&p, &p), Err(Error::Contract(_))));
        assert!(SpaceSpec::new(vec![]).is_err());
    }

    #[test]
    fn circle_points_are_canonical() {
        let s = SpaceSpec::circle();
        assert_eq!(s.point(&[1.25]).unwrap().x(), 0.25);
        assert_eq!(s.point(&[-0.25]).unwrap().x(), 0.75);
        assert_eq!(s.point(&[1.0]).unwrap().x(), 0.0);
        assert_eq!(wrap_unit(-1e-20), 0.0);
    }

    #[test]
    fn grids() {
        let xs: Vec<f64> = SpaceSpec::interval()
            .grid(0.5)
            .unwrap()
            .iter()
            .map(Point::x)
            .collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);

        let cs: Vec<f64> = SpaceSpec::circle()
            .grid(0.25)
            .unwrap()
            .iter()
            .map(Point::x)
            .collect();
        assert_eq!(cs, vec![0.0, 0.25, 0.5, 0.75]);

        let sq = SpaceSpec::new(vec![Factor::Interval, Factor::Interval]).unwrap();
        let g = sq.grid(0.5).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));

        assert_eq!(SpaceSpec::interval().grid(0.0025).unwrap().len(), 401);
    }

    #[test]
    fn grid_cap() {
        let sq = SpaceSpec::new(vec![Factor::Interval, Factor::Interval]).unwrap();
        assert!(matches!(
            sq.grid_capped(0.001, 10_000),
            Err(Error::SizeLimit { .. })
        ));
        assert!(SpaceSpec::interval().grid(0.0).is_err());
        assert!(SpaceSpec::interval().grid(1.5).is_err());
    }

    #[test]
    fn diameters() {
        assert_eq!(SpaceSpec::interval().diameter(), 1.0);
        assert_eq!(SpaceSpec::circle().diameter(), 0.5);
        let s = SpaceSpec::new(vec![Factor::Circle, Factor::Interval]).unwrap();
        assert_eq!(s.diameter(), 1.0);
    }
}
