//! Finite point sets standing in for elements of the hyperspace `K(X)`.
//!
//! Points are stored flat (`dim` coordinates per point) in lexicographic
//! order. Near-duplicates closer than the dedup tolerance are merged at
//! construction, keeping the lexicographically first representative.

use std::cmp::Ordering;

use crate::error::{contract, Result};
use crate::geometry::{Factor, Point, SpaceSpec};

pub const DEFAULT_DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSet {
    space: SpaceSpec,
    coords: Vec<f64>,
    dedup_tol: f64,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl FiniteSet {
    pub fn singleton(space: &SpaceSpec, p: &Point) -> Result<Self> {
        space.check(p)?;
        Ok(FiniteSet {
            space: space.clone(),
            coords: p.coords().to_vec(),
            dedup_tol: DEFAULT_DEDUP_TOL,
        })
    }

    pub fn new(space: &SpaceSpec, points: &[Point]) -> Result<Self> {
        Self::with_tolerance(space, points, DEFAULT_DEDUP_TOL)
    }

    pub fn with_tolerance(space: &SpaceSpec, points: &[Point], dedup_tol: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(contract("finite sets must be nonempty"));
        }
        if !(dedup_tol >= 0.0) {
            return Err(contract("dedup tolerance must be nonnegative"));
        }
        let mut coords = Vec::with_capacity(points.len() * space.dim());
        for p in points {
            space.check(p)?;
            coords.extend_from_slice(p.coords());
        }
        space.canonicalize(&mut coords);
        Ok(Self::from_coords(space.clone(), coords, dedup_tol))
    }

    /// Builds a set from flat canonical coordinates, sorting and deduplicating.
    pub(crate) fn from_coords(space: SpaceSpec, mut coords: Vec<f64>, dedup_tol: f64) -> Self {
        let dim = space.dim();
        debug_assert!(!coords.is_empty() && coords.len().is_multiple_of(dim));
        if dim == 1 {
            coords.sort_unstable_by(f64::total_cmp);
        } else {
            let mut rows: Vec<&[f64]> = coords.chunks_exact(dim).collect();
            rows.sort_unstable_by(|a, b| lex_cmp(a, b));
            coords = rows.concat();
        }
        let coords = absorb(&space, &coords, dedup_tol);
        FiniteSet {
            space,
            coords,
            dedup_tol,
        }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.space.dim()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim())
    }

    pub fn raw(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> Vec<Point> {
        self.rows().map(|r| Point::from_raw(r.to_vec())).collect()
    }

    fn same_space(&self, other: &FiniteSet) -> Result<()> {
        if self.space != other.space {
            return Err(contract(format!(
                "sets live in different spaces: {:?} vs {:?}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// `max_{a∈A} min_{b∈B} d(a, b)`.
    pub fn directed_dist(&self, other: &FiniteSet) -> Result<f64> {
        self.same_space(other)?;
        Ok(directed(&self.space, &self.coords, &other.coords))
    }

    /// Hausdorff distance: the larger of the two directed distances.
    pub fn hausdorff(&self, other: &FiniteSet) -> Result<f64> {
        self.same_space(other)?;
        Ok(hausdorff_raw(&self.space, &self.coords, &other.coords))
    }

    /// Greedy left-to-right absorption: every point within `delta` of an
    /// already kept point is dropped. The result is a subset of `self`
    /// within Hausdorff distance `delta` of it.
    pub fn coalesce(&self, delta: f64) -> FiniteSet {
        if delta <= 0.0 {
            return self.clone();
        }
        FiniteSet {
            space: self.space.clone(),
            coords: absorb(&self.space, &self.coords, delta),
            dedup_tol: self.dedup_tol,
        }
    }

    /// Cartesian product in the product space. Lexicographic order and
    /// separation are inherited from the factors, so no re-sorting is needed.
    pub fn product_set(&self, other: &FiniteSet) -> FiniteSet {
        let space = self.space.product(&other.space);
        let mut coords = Vec::with_capacity(self.len() * other.len() * space.dim());
        for a in self.rows() {
            for b in other.rows() {
                coords.extend_from_slice(a);
                coords.extend_from_slice(b);
            }
        }
        FiniteSet {
            space,
            coords,
            dedup_tol: self.dedup_tol.max(other.dedup_tol),
        }
    }

    /// `self ⊆ other` up to `tol`.
    pub fn is_subset_of(&self, other: &FiniteSet, tol: f64) -> Result<bool> {
        Ok(self.directed_dist(other)? <= tol)
    }
}

/// Merges points of a sorted flat list that lie within `delta` of a kept point.
fn absorb(space: &SpaceSpec, sorted: &[f64], delta: f64) -> Vec<f64> {
    let dim = space.dim();
    let first = space.factors()[0];
    let mut kept: Vec<f64> = Vec::with_capacity(sorted.len());
    if dim == 1 {
        for &x in sorted {
            let near = match kept.last() {
                None => false,
                Some(&last) => {
                    x - last <= delta || (first == Factor::Circle && first.distance(x, kept[0]) <= delta)
                }
            };
            if !near {
                kept.push(x);
            }
        }
        return kept;
    }
    for row in sorted.chunks_exact(dim) {
        let n = kept.len() / dim;
        let mut near = false;
        // Kept rows are sorted, so only those whose first coordinate is
        // within delta can be close.
        for k in (0..n).rev() {
            let q = &kept[k * dim..(k + 1) * dim];
            if row[0] - q[0] > delta {
                break;
            }
            if space.dist(row, q) <= delta {
                near = true;
                break;
            }
        }
        if !near && first == Factor::Circle {
            for k in 0..n {
                let q = &kept[k * dim..(k + 1) * dim];
                if q[0] + 1.0 - row[0] > delta {
                    break;
                }
                if space.dist(row, q) <= delta {
                    near = true;
                    break;
                }
            }
        }
        if !near {
            kept.extend_from_slice(row);
        }
    }
    kept
}

pub(crate) fn hausdorff_raw(space: &SpaceSpec, a: &[f64], b: &[f64]) -> f64 {
    directed(space, a, b).max(directed(space, b, a))
}

/// Directed distance on flat sorted coordinate lists, dispatching to the
/// one-dimensional merge kernels when possible.
pub(crate) fn directed(space: &SpaceSpec, a: &[f64], b: &[f64]) -> f64 {
    if space.dim() == 1 {
        match space.factors()[0] {
            Factor::Interval => directed_interval_sorted(a, b),
            Factor::Circle => directed_circle_sorted(a, b),
        }
    } else {
        directed_general(space, a, b)
    }
}

/// Two-pointer directed distance between sorted subsets of `[0, 1]`.
pub fn directed_interval_sorted(a: &[f64], b: &[f64]) -> f64 {
    let mut j = 0;
    let mut worst = 0.0f64;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        let mut best = f64::INFINITY;
        if j < b.len() {
            best = b[j] - x;
        }
        if j > 0 {
            best = best.min(x - b[j - 1]);
        }
        worst = worst.max(best);
    }
    worst
}

/// Two-pointer directed distance between sorted subsets of the circle in
/// `[0, 1)`; the nearest point is always one of the two cyclic neighbours.
pub fn directed_circle_sorted(a: &[f64], b: &[f64]) -> f64 {
    let n = b.len();
    let mut j = 0;
    let mut worst = 0.0f64;
    for &x in a {
        while j < n && b[j] < x {
            j += 1;
        }
        let hi = b[j % n];
        let lo = b[(j + n - 1) % n];
        let best = Factor::Circle
            .distance(x, hi)
            .min(Factor::Circle.distance(x, lo));
        worst = worst.max(best);
    }
    worst
}

fn directed_general(space: &SpaceSpec, a: &[f64], b: &[f64]) -> f64 {
    let dim = space.dim();
    let mut worst = 0.0f64;
    for x in a.chunks_exact(dim) {
        let mut best = f64::INFINITY;
        for y in b.chunks_exact(dim) {
            let d = space.dist(x, y);
            if d < best {
                best = d;
                // This row can no longer raise the maximum.
                if best <= worst {
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Plain quadratic directed distance over all pairs, without pruning.
/// Used as the reference for the fast kernels.
pub fn directed_all_pairs(space: &SpaceSpec, a: &[f64], b: &[f64]) -> f64 {
    let dim = space.dim();
    a.chunks_exact(dim)
        .map(|x| {
            b.chunks_exact(dim)
                .map(|y| space.dist(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iset(xs: &[f64]) -> FiniteSet {
        let pts: Vec<Point> = xs.iter().map(|&x| Point::scalar(x)).collect();
        FiniteSet::new(&SpaceSpec::interval(), &pts).unwrap()
    }

    fn cset(xs: &[f64]) -> FiniteSet {
        let pts: Vec<Point> = xs.iter().map(|&x| Point::scalar(x)).collect();
        FiniteSet::new(&SpaceSpec::circle(), &pts).unwrap()
    }

    #[test]
    fn directed_examples() {
        assert_eq!(iset(&[0.0, 1.0]).directed_dist(&iset(&[0.0])).unwrap(), 1.0);
        assert_eq!(iset(&[0.0]).directed_dist(&iset(&[0.0, 1.0])).unwrap(), 0.0);
        let d = iset(&[0.2, 0.4]).directed_dist(&iset(&[0.3])).unwrap();
        assert!((d - 0.1).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_examples() {
        let a = iset(&[0.1, 0.7]);
        assert_eq!(a.hausdorff(&a).unwrap(), 0.0);
        assert_eq!(iset(&[0.0]).hausdorff(&iset(&[1.0])).unwrap(), 1.0);
        assert_eq!(iset(&[0.0, 1.0]).hausdorff(&iset(&[0.5])).unwrap(), 0.5);
    }

    #[test]
    fn space_mismatch() {
        assert!(iset(&[0.0]).hausdorff(&cset(&[0.0])).is_err());
        assert!(iset(&[0.0]).directed_dist(&cset(&[0.0])).is_err());
    }

    #[test]
    fn empty_rejected() {
        assert!(FiniteSet::new(&SpaceSpec::interval(), &[]).is_err());
    }

    #[test]
    fn dedup_and_sort() {
        let a = iset(&[0.5, 0.1, 0.5, 0.1 + 1e-13]);
        assert_eq!(a.raw(), &[0.1, 0.5]);
        // 1 - 1e-13 and 0 coincide on the circle.
        let c = cset(&[0.0, 1.0 - 1e-13, 0.5]);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn coalesce_examples() {
        let a = iset(&[0.0, 0.3, 1.0]);
        assert_eq!(a.coalesce(0.0), a);

        let b = FiniteSet::with_tolerance(
            &SpaceSpec::interval(),
            &[Point::scalar(0.0), Point::scalar(1e-9), Point::scalar(1.0)],
            0.0,
        )
        .unwrap();
        assert_eq!(b.len(), 3);
        let c = b.coalesce(1e-6);
        assert_eq!(c.raw(), &[0.0, 1.0]);
        assert!(c.hausdorff(&b).unwrap() <= 1e-9);
    }

    #[test]
    fn coalesce_two_dimensional_circle_wrap() {
        let s = SpaceSpec::new(vec![Factor::Circle, Factor::Interval]).unwrap();
        let pts = vec![
            s.point(&[0.0, 0.5]).unwrap(),
            s.point(&[0.999, 0.5]).unwrap(),
            s.point(&[0.5, 0.5]).unwrap(),
        ];
        let a = FiniteSet::new(&s, &pts).unwrap();
        assert_eq!(a.len(), 3);
        let c = a.coalesce(0.01);
        assert_eq!(c.len(), 2);
        assert!(c.hausdorff(&a).unwrap() <= 0.01);
    }

    #[test]
    fn products() {
        let z = iset(&[0.0]);
        let p = z.product_set(&z);
        assert_eq!(p.len(), 1);
        assert_eq!(p.point(0), &[0.0, 0.0]);
        let q = iset(&[0.0, 1.0]).product_set(&cset(&[0.1, 0.2, 0.3]));
        assert_eq!(q.len(), 6);
        assert_eq!(q.dim(), 2);
    }

    #[test]
    fn circle_kernel_wraps() {
        let d = cset(&[0.95]).hausdorff(&cset(&[0.05, 0.5])).unwrap();
        // 0.95 -> 0.05 is 0.1 away; 0.5 -> 0.95 is 0.45 away.
        assert!((d - 0.45).abs() < 1e-15);
    }
}
