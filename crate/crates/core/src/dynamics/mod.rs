//! Generating families of maps, word enumeration and orbit sets `F^n(x)`.
//!
//! Orbit sets are computed by iterating the induced set map
//! `A ↦ ⋃_j f_j(A)`, so words that land on the same point are merged as
//! early as possible. Explicit word enumeration is only used where the
//! word itself matters (witness points, power families, Biś metrics).

mod maps;
pub mod presets;

use std::fmt;
use std::sync::Arc;

pub use maps::{Branch, MapSpec, PiecewiseLinear};

use crate::error::{contract, Error, Result};
use crate::geometry::{Point, SpaceSpec};
use crate::pointset::{FiniteSet, DEFAULT_DEDUP_TOL};

/// Default cap on the number of points in a single orbit set.
pub const DEFAULT_ORBIT_CAP: usize = 2_000_000;
/// Default cap on the number of words enumerated at once.
pub const DEFAULT_WORD_CAP: usize = 1 << 22;

const CONJUGACY_TOL: f64 = 1e-9;

/// The generating set `F = {f_1, …, f_p}` of a semigroup acting on `space`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    name: String,
    space: SpaceSpec,
    maps: Arc<[MapSpec]>,
}

impl Family {
    pub fn new(name: impl Into<String>, space: SpaceSpec, maps: Vec<MapSpec>) -> Result<Self> {
        if maps.is_empty() {
            return Err(contract("a family needs at least one map"));
        }
        for (i, m) in maps.iter().enumerate() {
            m.fits(&space)
                .map_err(|e| contract(format!("map {} of family: {e}", i + 1)))?;
        }
        Ok(Family {
            name: name.into(),
            space,
            maps: maps.into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn maps(&self) -> &[MapSpec] {
        &self.maps
    }

    /// Number of generators `p`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_name(&self, name: impl Into<String>) -> Family {
        Family {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Largest Lipschitz bound among the generators.
    pub fn lipschitz(&self) -> f64 {
        self.maps.iter().map(MapSpec::lipschitz).fold(0.0, f64::max)
    }

    /// The one-map family `{f_index}`.
    pub fn singleton(&self, index: usize) -> Family {
        Family {
            name: format!("{}[f{}]", self.name, index + 1),
            space: self.space.clone(),
            maps: vec![self.maps[index].clone()].into(),
        }
    }

    #[inline]
    pub(crate) fn apply(&self, j: usize, x: &[f64], out: &mut [f64]) {
        self.maps[j].apply_into(x, out);
    }

    /// Evaluates the word's composition `g_n ∘ … ∘ g_1` at `x`.
    pub fn apply_word(&self, word: &Word, x: &Point) -> Result<Point> {
        self.space.check(x)?;
        word.check(self.len())?;
        let mut cur = x.coords().to_vec();
        let mut next = cur.clone();
        for &j in word.letters() {
            self.apply(j, &cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(Point::from_raw(cur))
    }

    /// `{f × g : f ∈ self, g ∈ other}` on the product space, ordered with
    /// `self`'s index most significant.
    pub fn product(&self, other: &Family) -> Family {
        let mut maps = Vec::with_capacity(self.len() * other.len());
        for f in self.maps.iter() {
            for g in other.maps.iter() {
                maps.push(MapSpec::Product {
                    factors: vec![f.clone(), g.clone()],
                });
            }
        }
        Family {
            name: format!("{}x{}", self.name, other.name),
            space: self.space.product(&other.space),
            maps: maps.into(),
        }
    }
}

/// A word `(j_1, …, j_n)` standing for `f_{j_n} ∘ … ∘ f_{j_1}`.
/// Letters are stored zero-based and displayed one-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, p: usize) -> Result<()> {
        if let Some(&j) = self.0.iter().find(|&&j| j >= p) {
            return Err(contract(format!(
                "word letter {} out of range for a family of {p} maps",
                j + 1
            )));
        }
        Ok(())
    }

    /// All `p^n` words of length `n` in lexicographic order.
    pub fn all(p: usize, n: usize, cap: usize) -> Result<Vec<Word>> {
        let count = word_count(p, n);
        if count > cap as u128 {
            return Err(Error::SizeLimit {
                what: "word enumeration",
                needed: count,
                cap,
                hint: "lower n or use fewer generators",
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut cur = vec![0usize; n];
        loop {
            out.push(Word(cur.clone()));
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < p {
                    break;
                }
                cur[k] = 0;
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", j + 1)?;
        }
        Ok(())
    }
}

pub(crate) fn word_count(p: usize, n: usize) -> u128 {
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(p as u128))
}

/// `F^0(x), …, F^n(x)` for one base point.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    pub base: Point,
    pub family: Family,
    pub sets: Vec<FiniteSet>,
    /// Lipschitz-propagated bound on the Hausdorff error introduced by
    /// coalescing; zero for exact tables.
    pub accumulated_coalesce_error: f64,
}

impl OrbitTable {
    pub fn depth(&self) -> usize {
        self.sets.len() - 1
    }
}

/// One step of the induced set map: dedup of `⋃_j f_j(A)`, coalesced with
/// `delta` when positive.
pub fn image_of_set(family: &Family, set: &FiniteSet, delta: f64) -> Result<FiniteSet> {
    if set.space() != family.space() {
        return Err(contract("set and family live in different spaces"));
    }
    Ok(image_unchecked(family, set, delta))
}

fn image_unchecked(family: &Family, set: &FiniteSet, delta: f64) -> FiniteSet {
    let dim = set.dim();
    let mut coords = vec![0.0; set.raw().len() * family.len()];
    let mut at = 0;
    for j in 0..family.len() {
        for row in set.rows() {
            family.apply(j, row, &mut coords[at..at + dim]);
            at += dim;
        }
    }
    let img = FiniteSet::from_coords(set.space().clone(), coords, set.dedup_tol());
    if delta > 0.0 {
        img.coalesce(delta)
    } else {
        img
    }
}

pub fn orbit_set(family: &Family, x: &Point, n: usize, delta: f64) -> Result<OrbitTable> {
    orbit_set_capped(family, x, n, delta, DEFAULT_ORBIT_CAP)
}

pub fn orbit_set_capped(
    family: &Family,
    x: &Point,
    n: usize,
    delta: f64,
    cap: usize,
) -> Result<OrbitTable> {
    if !(delta >= 0.0) {
        return Err(contract("coalescing radius must be nonnegative"));
    }
    let start = FiniteSet::singleton(family.space(), x)?;
    let mut sets = Vec::with_capacity(n + 1);
    sets.push(start);
    let lip = family.lipschitz();
    let mut err = 0.0;
    for _ in 0..n {
        let last = sets.last().expect("nonempty");
        let needed = last.len() as u128 * family.len() as u128;
        if needed > cap as u128 {
            return Err(Error::SizeLimit {
                what: "orbit set",
                needed,
                cap,
                hint: "raise the coalescing radius or lower n",
            });
        }
        let next = image_unchecked(family, last, delta);
        if delta > 0.0 {
            err = lip * err + delta;
        }
        sets.push(next);
    }
    Ok(OrbitTable {
        base: x.clone(),
        family: family.clone(),
        sets,
        accumulated_coalesce_error: err,
    })
}

/// `F^m`: every length-`m` composition as an explicit map, words in
/// lexicographic order.
pub fn power_family(family: &Family, m: usize) -> Result<Family> {
    power_family_capped(family, m, DEFAULT_WORD_CAP)
}

pub fn power_family_capped(family: &Family, m: usize, cap: usize) -> Result<Family> {
    if m == 0 {
        return Err(contract("power must be positive"));
    }
    if m == 1 {
        return Ok(family.clone());
    }
    let words = Word::all(family.len(), m, cap)?;
    let maps = words
        .iter()
        .map(|w| MapSpec::Composed {
            steps: w.letters().iter().map(|&j| family.maps[j].clone()).collect(),
        })
        .collect();
    Family::new(format!("{}^{m}", family.name), family.space.clone(), maps)
}

fn verification_points(space: &SpaceSpec) -> Result<Vec<Point>> {
    let per_axis = (1000f64).powf(1.0 / space.dim() as f64).floor().max(2.0);
    space.grid(1.0 / per_axis)
}

/// `{T ∘ f_j ∘ T^{-1}}`, after checking `T ∘ T^{-1} = id` on a grid.
pub fn conjugate_family(family: &Family, t: &MapSpec, t_inv: &MapSpec) -> Result<Family> {
    t.fits(family.space())?;
    t_inv.fits(family.space())?;
    let grid = verification_points(family.space())?;
    let space = family.space();
    let mut buf = vec![0.0; space.dim()];
    let mut back = vec![0.0; space.dim()];
    for p in &grid {
        t_inv.apply_into(p.coords(), &mut buf);
        t.apply_into(&buf, &mut back);
        let err = space.dist(&back, p.coords());
        if err > CONJUGACY_TOL {
            return Err(contract(format!(
                "conjugating map and its inverse disagree by {err} at {:?}",
                p.coords()
            )));
        }
    }
    if *t == MapSpec::Identity && *t_inv == MapSpec::Identity {
        return Ok(family.clone());
    }
    let maps = family
        .maps
        .iter()
        .map(|f| MapSpec::Conjugated {
            inner: Box::new(f.clone()),
            forward: Box::new(t.clone()),
            inverse: Box::new(t_inv.clone()),
        })
        .collect();
    let conj = Family::new(format!("T.{}.T^-1", family.name), space.clone(), maps)?;
    let defect = conjugacy_defect(family, &conj, t, &grid)?;
    if defect > CONJUGACY_TOL {
        return Err(Error::Invariant(format!(
            "conjugated family violates T F(x) = F'(T x) by {defect}"
        )));
    }
    Ok(conj)
}

/// Largest Hausdorff gap between the image sets `T F(x)` and `F'(T x)` over
/// `points`. The two families may have different sizes; only the image
/// sets are compared.
pub fn conjugacy_defect(
    original: &Family,
    other: &Family,
    t: &MapSpec,
    points: &[Point],
) -> Result<f64> {
    let space = original.space();
    if other.space() != space {
        return Err(contract("conjugate families must share a space"));
    }
    let dim = space.dim();
    let mut worst = 0.0f64;
    let mut tmp = vec![0.0; dim];
    let mut tx = vec![0.0; dim];
    for p in points {
        space.check(p)?;
        let mut lhs = vec![0.0; dim * original.len()];
        for j in 0..original.len() {
            original.apply(j, p.coords(), &mut tmp);
            t.apply_into(&tmp, &mut lhs[j * dim..(j + 1) * dim]);
        }
        t.apply_into(p.coords(), &mut tx);
        let mut rhs = vec![0.0; dim * other.len()];
        for k in 0..other.len() {
            other.apply(k, &tx, &mut rhs[k * dim..(k + 1) * dim]);
        }
        let a = FiniteSet::from_coords(space.clone(), lhs, DEFAULT_DEDUP_TOL);
        let b = FiniteSet::from_coords(space.clone(), rhs, DEFAULT_DEDUP_TOL);
        worst = worst.max(a.hausdorff(&b)?);
    }
    Ok(worst)
}

/// `F^{-1} = {f_1^{-1}, …, f_p^{-1}}`.
pub fn invert_family(family: &Family) -> Result<Family> {
    let maps = family
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| {
            m.inverse().ok_or_else(|| Error::NotInvertible {
                index: i + 1,
                kind: m.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Family::new(format!("{}^-1", family.name), family.space.clone(), maps)
}

/// `g^{-1}([a, b])` for the word's composition `g`, pulled back one letter
/// at a time. Every generator must be a strictly increasing piecewise-linear
/// map (or the identity), so the result is at most one interval.
pub fn preimage_intervals(word: &Word, family: &Family, target: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    word.check(family.len())?;
    let pieces = family
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| match m {
            MapSpec::Identity => Ok(None),
            MapSpec::PiecewiseLinear(p) if p.strictly_increasing() => Ok(Some(p)),
            _ => Err(contract(format!(
                "map {} ({m}) is not a strictly increasing piecewise-linear map",
                i + 1
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut a, mut b) = target;
    if a > b {
        return Ok(Vec::new());
    }
    for &j in word.letters().iter().rev() {
        if let Some(p) = pieces[j] {
            match p.preimage_increasing(a, b) {
                Some((lo, hi)) => {
                    a = lo;
                    b = hi;
                }
                None => return Ok(Vec::new()),
            }
        }
    }
    Ok(vec![(a, b)])
}

/// One point `z_g ∈ g^{-1}(target)` per length-`n` word `g`: the midpoint of
/// the preimage interval.
pub fn witness_points(family: &Family, n: usize, target: (f64, f64)) -> Result<Vec<(Word, Point)>> {
    if n == 0 {
        return Err(contract("witness depth must be positive"));
    }
    Word::all(family.len(), n, DEFAULT_WORD_CAP)?
        .into_iter()
        .map(|w| {
            let iv = preimage_intervals(&w, family, target)?;
            let (lo, hi) = *iv.first().ok_or_else(|| {
                Error::Invariant(format!("word {w} has an empty preimage of the target"))
            })?;
            Ok((w, Point::scalar(0.5 * (lo + hi))))
        })
        .collect()
}

/// Closed subintervals `[a, b]` with endpoints drawn from `endpoints` that
/// every generator maps into themselves.
pub fn invariant_subintervals(family: &Family, endpoints: &[f64]) -> Result<Vec<(f64, f64)>> {
    const TOL: f64 = 1e-12;
    let mut out = Vec::new();
    for (i, &a) in endpoints.iter().enumerate() {
        for &b in &endpoints[i + 1..] {
            let mut inside = true;
            for m in family.maps.iter() {
                let (lo, hi) = m
                    .interval_image(a, b)
                    .ok_or_else(|| contract(format!("map {m} is not an interval map")))?;
                if lo < a - TOL || hi > b + TOL {
                    inside = false;
                    break;
                }
            }
            if inside {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}
