//! Continuous self-maps of interval, circle and product spaces.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::geometry::{wrap_unit, Factor, SpaceSpec};

const JUNCTION_TOL: f64 = 1e-12;

/// A continuous piecewise-linear self-map of `[0, 1]` given by its graph
/// vertices `(x_i, y_i)` with `0 = x_0 < … < x_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPwl", into = "RawPwl")]
pub struct PiecewiseLinear {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPwl {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TryFrom<RawPwl> for PiecewiseLinear {
    type Error = Error;
    fn try_from(r: RawPwl) -> Result<Self> {
        PiecewiseLinear::new(r.x, r.y)
    }
}

impl From<PiecewiseLinear> for RawPwl {
    fn from(p: PiecewiseLinear) -> Self {
        RawPwl { x: p.x, y: p.y }
    }
}

/// One affine branch `x ↦ slope·x + intercept` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Branch {
    pub fn new(lo: f64, hi: f64, slope: f64, intercept: f64) -> Self {
        Branch {
            lo,
            hi,
            slope,
            intercept,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

impl PiecewiseLinear {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != y.len() {
            return Err(contract(
                "piecewise-linear map needs at least two vertices and matching x/y lengths",
            ));
        }
        if x[0] != 0.0 || x[x.len() - 1] != 1.0 {
            return Err(contract(
                "piecewise-linear breakpoints must start at 0 and end at 1",
            ));
        }
        if x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(contract(
                "piecewise-linear breakpoints must be strictly increasing",
            ));
        }
        if y.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(contract("piecewise-linear values must lie in [0, 1]"));
        }
        let slopes = x
            .windows(2)
            .zip(y.windows(2))
            .map(|(xs, ys)| (ys[1] - ys[0]) / (xs[1] - xs[0]))
            .collect();
        Ok(PiecewiseLinear { x, y, slopes })
    }

    /// Builds the map from affine branches on consecutive intervals,
    /// asserting that adjacent branches agree at their shared breakpoint.
    pub fn from_branches(branches: &[Branch]) -> Result<Self> {
        if branches.is_empty() {
            return Err(contract("no branches given"));
        }
        let mut x = vec![branches[0].lo];
        let mut y = vec![branches[0].eval(branches[0].lo)];
        for (i, b) in branches.iter().enumerate() {
            if i > 0 {
                let prev = &branches[i - 1];
                if prev.hi != b.lo {
                    return Err(contract(format!(
                        "branch {i} does not start where branch {} ends",
                        i - 1
                    )));
                }
                let (left, right) = (prev.eval(b.lo), b.eval(b.lo));
                if (left - right).abs() > JUNCTION_TOL {
                    return Err(contract(format!(
                        "branches disagree at x = {}: {left} vs {right}",
                        b.lo
                    )));
                }
            }
            x.push(b.hi);
            y.push(b.eval(b.hi));
        }
        for v in y.iter_mut() {
            // Rounding in the branch formulas can leave 1 + 1ulp.
            if (*v - v.clamp(0.0, 1.0)).abs() <= JUNCTION_TOL {
                *v = v.clamp(0.0, 1.0);
            }
        }
        Self::new(x, y)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.x.partition_point(|&b| b <= t);
        if k == 0 {
            return self.y[0];
        }
        if k >= self.x.len() {
            return self.y[self.y.len() - 1];
        }
        let i = k - 1;
        self.y[i] + (t - self.x[i]) * self.slopes[i]
    }

    pub fn lipschitz(&self) -> f64 {
        self.slopes.iter().map(|s| s.abs()).fold(0.0, f64::max)
    }

    pub fn strictly_increasing(&self) -> bool {
        self.y.windows(2).all(|w| w[0] < w[1])
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.y.windows(2).all(|w| w[0] > w[1])
    }

    /// Homeomorphism of `[0, 1]`: strictly monotone and onto.
    pub fn is_homeomorphism(&self) -> bool {
        let (first, last) = (self.y[0], self.y[self.y.len() - 1]);
        (self.strictly_increasing() && first == 0.0 && last == 1.0)
            || (self.strictly_decreasing() && first == 1.0 && last == 0.0)
    }

    /// Swaps the roles of breakpoints and values.
    pub fn inverse(&self) -> Option<PiecewiseLinear> {
        if !self.is_homeomorphism() {
            return None;
        }
        let (mut x, mut y) = (self.y.clone(), self.x.clone());
        if self.strictly_decreasing() {
            x.reverse();
            y.reverse();
        }
        PiecewiseLinear::new(x, y).ok()
    }

    /// `f^{-1}([a, b])` for a strictly increasing map; `None` when empty.
    pub fn preimage_increasing(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        let (lo, hi) = (a.max(self.y[0]), b.min(self.y[self.y.len() - 1]));
        if lo > hi {
            return None;
        }
        Some((self.inverse_value(lo), self.inverse_value(hi)))
    }

    fn inverse_value(&self, v: f64) -> f64 {
        let k = self.y.partition_point(|&b| b < v);
        if k == 0 {
            return self.x[0];
        }
        if k >= self.y.len() {
            return self.x[self.x.len() - 1];
        }
        if self.y[k] == v {
            return self.x[k];
        }
        let i = k - 1;
        self.x[i] + (v - self.y[i]) / self.slopes[i]
    }

    /// Image of `[a, b]`: extremes over the endpoints and interior vertices.
    pub fn interval_image(&self, a: f64, b: f64) -> (f64, f64) {
        let (fa, fb) = (self.eval(a), self.eval(b));
        let (mut lo, mut hi) = (fa.min(fb), fa.max(fb));
        for (xv, yv) in self.x.iter().zip(&self.y) {
            if *xv > a && *xv < b {
                lo = lo.min(*yv);
                hi = hi.max(*yv);
            }
        }
        (lo, hi)
    }
}

/// A continuous self-map of a product of intervals and circles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapSpec {
    #[serde(rename = "pwl")]
    PiecewiseLinear(PiecewiseLinear),
    /// `x ↦ x + alpha (mod 1)` on a circle.
    Rotation { alpha: f64 },
    /// `x ↦ a·x + c (mod 1)` on a circle.
    AffineMod1 { a: i64, c: f64 },
    Identity,
    /// Acts factor by factor. Each entry consumes one coordinate unless it
    /// is itself a product (or wraps one).
    Product { factors: Vec<MapSpec> },
    /// `x ↦ x^exponent` on `[0, 1]`.
    Power { exponent: f64 },
    /// `forward ∘ inner ∘ inverse`.
    Conjugated {
        inner: Box<MapSpec>,
        forward: Box<MapSpec>,
        inverse: Box<MapSpec>,
    },
    /// Applies `steps[0]` first, then `steps[1]`, and so on.
    Composed { steps: Vec<MapSpec> },
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::PiecewiseLinear(p) => write!(f, "pwl[{} pieces]", p.slopes.len()),
            MapSpec::Rotation { alpha } => write!(f, "rotation({alpha})"),
            MapSpec::AffineMod1 { a, c } => write!(f, "affine_mod1({a}x+{c})"),
            MapSpec::Identity => write!(f, "identity"),
            MapSpec::Product { factors } => {
                write!(f, "product(")?;
                for (i, m) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
            MapSpec::Power { exponent } => write!(f, "power({exponent})"),
            MapSpec::Conjugated { inner, .. } => write!(f, "conjugated({inner})"),
            MapSpec::Composed { steps } => write!(f, "composed[{}]", steps.len()),
        }
    }
}

impl MapSpec {
    pub fn pwl(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Ok(MapSpec::PiecewiseLinear(PiecewiseLinear::new(x, y)?))
    }

    /// `x ↦ 1 − x` on the interval.
    pub fn flip() -> Self {
        MapSpec::pwl(vec![0.0, 1.0], vec![1.0, 0.0]).expect("valid")
    }

    /// Checks that the map acts on `space`.
    pub fn fits(&self, space: &SpaceSpec) -> Result<()> {
        let ok = match self {
            MapSpec::PiecewiseLinear(_) | MapSpec::Power { .. } => {
                space.factors() == [Factor::Interval]
            }
            MapSpec::Rotation { .. } | MapSpec::AffineMod1 { .. } => {
                space.factors() == [Factor::Circle]
            }
            MapSpec::Identity => true,
            MapSpec::Product { factors } => {
                let mut at = 0usize;
                for m in factors {
                    let w = m.width();
                    if at + w > space.dim() {
                        return Err(self.misfit(space));
                    }
                    let sub = SpaceSpec::new(space.factors()[at..at + w].to_vec())?;
                    m.fits(&sub)?;
                    at += w;
                }
                at == space.dim()
            }
            MapSpec::Conjugated {
                inner,
                forward,
                inverse,
            } => {
                inner.fits(space)?;
                forward.fits(space)?;
                inverse.fits(space)?;
                true
            }
            MapSpec::Composed { steps } => {
                for m in steps {
                    m.fits(space)?;
                }
                true
            }
        };
        if ok {
            Ok(())
        } else {
            Err(self.misfit(space))
        }
    }

    fn misfit(&self, space: &SpaceSpec) -> Error {
        contract(format!("map {self} does not act on space {space:?}"))
    }

    /// Number of coordinates consumed when used as a product entry.
    fn width(&self) -> usize {
        match self {
            MapSpec::Product { factors } => factors.iter().map(MapSpec::width).sum(),
            MapSpec::Conjugated { inner, .. } => inner.width(),
            MapSpec::Composed { steps } => steps.iter().map(MapSpec::width).max().unwrap_or(1),
            _ => 1,
        }
    }

    /// Evaluates on one coordinate. Only meaningful for one-dimensional maps.
    #[inline]
    pub fn apply1(&self, x: f64) -> f64 {
        match self {
            MapSpec::PiecewiseLinear(p) => p.eval(x),
            MapSpec::Rotation { alpha } => wrap_unit(x + alpha),
            MapSpec::AffineMod1 { a, c } => wrap_unit(*a as f64 * x + c),
            MapSpec::Identity => x,
            MapSpec::Product { factors } => factors[0].apply1(x),
            MapSpec::Power { exponent } => x.powf(*exponent).clamp(0.0, 1.0),
            MapSpec::Conjugated {
                inner,
                forward,
                inverse,
            } => forward.apply1(inner.apply1(inverse.apply1(x))),
            MapSpec::Composed { steps } => steps.iter().fold(x, |v, m| m.apply1(v)),
        }
    }

    /// Evaluates on a coordinate slice, writing into `out`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        if x.len() == 1 {
            out[0] = self.apply1(x[0]);
            return;
        }
        match self {
            MapSpec::Identity => out.copy_from_slice(x),
            MapSpec::Product { factors } => {
                let mut at = 0;
                for m in factors {
                    let w = m.width();
                    m.apply_into(&x[at..at + w], &mut out[at..at + w]);
                    at += w;
                }
            }
            MapSpec::Conjugated {
                inner,
                forward,
                inverse,
            } => {
                let mut a = vec![0.0; x.len()];
                inverse.apply_into(x, &mut a);
                inner.apply_into(&a, out);
                a.copy_from_slice(out);
                forward.apply_into(&a, out);
            }
            MapSpec::Composed { steps } => {
                out.copy_from_slice(x);
                let mut tmp = vec![0.0; x.len()];
                for m in steps {
                    tmp.copy_from_slice(out);
                    m.apply_into(&tmp, out);
                }
            }
            _ => unreachable!(
                "one-dimensional map applied to a {}-coordinate point",
                x.len()
            ),
        }
    }

    /// Upper bound on the Lipschitz constant. Roots `x^e` with `e < 1` are
    /// not Lipschitz at 0 and report infinity.
    pub fn lipschitz(&self) -> f64 {
        match self {
            MapSpec::PiecewiseLinear(p) => p.lipschitz(),
            MapSpec::Rotation { .. } | MapSpec::Identity => 1.0,
            MapSpec::AffineMod1 { a, .. } => a.unsigned_abs() as f64,
            MapSpec::Product { factors } => {
                factors.iter().map(MapSpec::lipschitz).fold(0.0, f64::max)
            }
            MapSpec::Power { exponent } => {
                if *exponent >= 1.0 {
                    *exponent
                } else {
                    f64::INFINITY
                }
            }
            MapSpec::Conjugated {
                inner,
                forward,
                inverse,
            } => forward.lipschitz() * inner.lipschitz() * inverse.lipschitz(),
            MapSpec::Composed { steps } => steps.iter().map(MapSpec::lipschitz).product(),
        }
    }

    /// The inverse map, when one exists in closed form.
    pub fn inverse(&self) -> Option<MapSpec> {
        Some(match self {
            MapSpec::PiecewiseLinear(p) => MapSpec::PiecewiseLinear(p.inverse()?),
            MapSpec::Rotation { alpha } => MapSpec::Rotation {
                alpha: wrap_unit(-alpha),
            },
            MapSpec::AffineMod1 { a: 1, c } => MapSpec::Rotation {
                alpha: wrap_unit(-c),
            },
            // x ↦ c − x is an involution.
            MapSpec::AffineMod1 { a: -1, c } => MapSpec::AffineMod1 { a: -1, c: *c },
            MapSpec::AffineMod1 { .. } => return None,
            MapSpec::Identity => MapSpec::Identity,
            MapSpec::Product { factors } => MapSpec::Product {
                factors: factors
                    .iter()
                    .map(MapSpec::inverse)
                    .collect::<Option<_>>()?,
            },
            MapSpec::Power { exponent } if *exponent > 0.0 => MapSpec::Power {
                exponent: 1.0 / exponent,
            },
            MapSpec::Power { .. } => return None,
            MapSpec::Conjugated {
                inner,
                forward,
                inverse,
            } => MapSpec::Conjugated {
                inner: Box::new(inner.inverse()?),
                forward: forward.clone(),
                inverse: inverse.clone(),
            },
            MapSpec::Composed { steps } => MapSpec::Composed {
                steps: steps
                    .iter()
                    .rev()
                    .map(MapSpec::inverse)
                    .collect::<Option<_>>()?,
            },
        })
    }

    /// Image of the interval `[a, b]` under a one-dimensional interval map.
    pub fn interval_image(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        match self {
            MapSpec::PiecewiseLinear(p) => Some(p.interval_image(a, b)),
            MapSpec::Identity => Some((a, b)),
            MapSpec::Power { exponent } if *exponent > 0.0 => {
                Some((a.powf(*exponent), b.powf(*exponent)))
            }
            MapSpec::Conjugated {
                inner,
                forward,
                inverse,
            } => {
                let (a, b) = inverse.interval_image(a, b)?;
                let (a, b) = inner.interval_image(a, b)?;
                forward.interval_image(a, b)
            }
            MapSpec::Composed { steps } => steps
                .iter()
                .try_fold((a, b), |(a, b), m| m.interval_image(a, b)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pwl_validation() {
        assert!(MapSpec::pwl(vec![0.0, 1.0], vec![0.0, 1.5]).is_err());
        assert!(MapSpec::pwl(vec![0.0, 0.5], vec![0.0, 1.0]).is_err());
        assert!(MapSpec::pwl(vec![0.0, 0.5, 0.5, 1.0], vec![0.0, 0.1, 0.2, 1.0]).is_err());
        assert!(MapSpec::pwl(vec![0.0, 1.0], vec![0.0]).is_err());
    }

    #[test]
    fn junction_mismatch_rejected() {
        let bad = [
            Branch::new(0.0, 0.5, 1.0, 0.0),
            Branch::new(0.5, 1.0, 1.0, 0.1),
        ];
        assert!(PiecewiseLinear::from_branches(&bad).is_err());
    }

    #[test]
    fn tent_and_flip() {
        let tent = MapSpec::pwl(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(tent.apply1(0.25), 0.5);
        assert_eq!(tent.apply1(0.75), 0.5);
        assert_eq!(tent.lipschitz(), 2.0);
        assert!(tent.inverse().is_none());
        let flip = MapSpec::flip();
        assert_eq!(flip.apply1(0.25), 0.75);
        assert_eq!(flip.inverse(), Some(flip.clone()));
    }

    #[test]
    fn circle_maps() {
        let r = MapSpec::Rotation { alpha: 0.75 };
        assert_eq!(r.apply1(0.5), 0.25);
        let d = MapSpec::AffineMod1 { a: 2, c: 0.0 };
        assert_eq!(d.apply1(0.75), 0.5);
        assert_eq!(d.lipschitz(), 2.0);
        assert!(d.inverse().is_none());
        let neg = MapSpec::AffineMod1 { a: -1, c: 0.0 };
        assert_eq!(neg.apply1(0.25), 0.75);
        assert_eq!(neg.apply1(0.0), 0.0);
    }

    #[test]
    fn product_apply_and_fit() {
        let space = SpaceSpec::new(vec![Factor::Interval, Factor::Circle]).unwrap();
        let m = MapSpec::Product {
            factors: vec![MapSpec::flip(), MapSpec::Rotation { alpha: 0.5 }],
        };
        m.fits(&space).unwrap();
        let mut out = [0.0; 2];
        m.apply_into(&[0.25, 0.75], &mut out);
        assert_eq!(out, [0.75, 0.25]);
        assert!(MapSpec::flip().fits(&space).is_err());
        assert!(MapSpec::Identity.fits(&space).is_ok());
        let swapped = MapSpec::Product {
            factors: vec![MapSpec::Rotation { alpha: 0.5 }, MapSpec::flip()],
        };
        assert!(swapped.fits(&space).is_err());
    }

    #[test]
    fn power_map() {
        let sq = MapSpec::Power { exponent: 2.0 };
        assert_eq!(sq.apply1(0.5), 0.25);
        let root = sq.inverse().unwrap();
        assert!((root.apply1(0.25) - 0.5).abs() < 1e-15);
        assert!(root.lipschitz().is_infinite());
    }

    #[test]
    fn interval_images() {
        let tent = MapSpec::pwl(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(tent.interval_image(0.25, 0.75), Some((0.5, 1.0)));
        assert_eq!(
            MapSpec::Rotation { alpha: 0.1 }.interval_image(0.0, 1.0),
            None
        );
    }
}
