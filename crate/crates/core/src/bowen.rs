//! Dynamical metrics and spanning/separated counting.
//!
//! Two `n`-metrics are supported: the Hausdorff–Bowen metric
//! `d_H^n(x, y) = max_{i≤n} d_H(F^i(x), F^i(y))` and Biś's metric
//! `d_max^n(x, y) = max_{k≤n} max_{g∈F^k} d(g(x), g(y))`.
//!
//! Counting works on a fixed candidate list. For each candidate the
//! per-level data (orbit sets or word images) is cached once, and for each
//! `ε` a [`SeparationMatrix`] records, per pair, the first level at which
//! the pair is `ε`-apart. Both metrics are running maxima over levels, so a
//! pair is `(n, ε)`-separated exactly when that level is `≤ n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{orbit_set_capped, word_count, Family, DEFAULT_ORBIT_CAP};
use crate::error::{contract, Error, Result};
use crate::geometry::Point;
use crate::pointset::{hausdorff_raw, FiniteSet};

/// Largest candidate count accepted by the exhaustive oracle.
pub const EXACT_CANDIDATE_LIMIT: usize = 20;
/// Deepest level a separation matrix can record.
pub const MAX_DEPTH: usize = 254;
/// Default cap on cached coordinates across all candidates.
pub const DEFAULT_CACHE_CAP: usize = 400_000_000;

const NEVER: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    HausdorffBowen,
    BisMax,
}

impl MetricKind {
    pub fn label(self) -> &'static str {
        match self {
            MetricKind::HausdorffBowen => "hausdorff_bowen",
            MetricKind::BisMax => "bis_max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Greedy,
    Exact,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub n: usize,
    pub epsilon: f64,
    pub kind: MetricKind,
    pub method: Method,
    pub spanning: usize,
    pub separated: usize,
    pub candidates: usize,
}

/// Images of `x` under every word of length `0..=n`, level by level, words
/// in lexicographic order.
fn word_images(family: &Family, x: &Point, n: usize, cap: usize) -> Result<Vec<Vec<f64>>> {
    family.space().check(x)?;
    let total: u128 = (0..=n).map(|k| word_count(family.len(), k)).sum();
    if total > cap as u128 {
        return Err(Error::SizeLimit {
            what: "word images",
            needed: total,
            cap,
            hint: "lower n",
        });
    }
    let dim = family.space().dim();
    let mut levels = vec![x.coords().to_vec()];
    for _ in 0..n {
        let prev = levels.last().expect("nonempty");
        let mut next = vec![0.0; prev.len() * family.len()];
        let mut at = 0;
        for row in prev.chunks_exact(dim) {
            for j in 0..family.len() {
                family.apply(j, row, &mut next[at..at + dim]);
                at += dim;
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// `max_{0≤i≤n} d_H(F^i(x), F^i(y))` from exact orbit sets.
pub fn dhn(family: &Family, x: &Point, y: &Point, n: usize) -> Result<f64> {
    let a = orbit_set_capped(family, x, n, 0.0, DEFAULT_ORBIT_CAP)?;
    let b = orbit_set_capped(family, y, n, 0.0, DEFAULT_ORBIT_CAP)?;
    a.sets
        .iter()
        .zip(&b.sets)
        .try_fold(0.0f64, |m, (s, t)| Ok(m.max(s.hausdorff(t)?)))
}

/// `max_{0≤k≤n} max_{|g|=k} d(g(x), g(y))` by explicit word enumeration.
pub fn dmaxn(family: &Family, x: &Point, y: &Point, n: usize) -> Result<f64> {
    let cap = crate::dynamics::DEFAULT_WORD_CAP;
    let a = word_images(family, x, n, cap)?;
    let b = word_images(family, y, n, cap)?;
    let space = family.space();
    let dim = space.dim();
    Ok(a.iter()
        .zip(&b)
        .flat_map(|(u, v)| u.chunks_exact(dim).zip(v.chunks_exact(dim)))
        .map(|(p, q)| space.dist(p, q))
        .fold(0.0, f64::max))
}

enum Levels {
    /// `F^k(x)` per candidate and level.
    Orbits(Vec<Vec<FiniteSet>>),
    /// Flat word images per candidate and level.
    Words(Vec<Vec<Vec<f64>>>),
}

/// Per-candidate dynamics cached to depth `n_max` for one metric kind.
pub struct CandidateCache {
    family: Family,
    kind: MetricKind,
    n_max: usize,
    candidates: Vec<Point>,
    levels: Levels,
}

impl CandidateCache {
    pub fn build(
        family: &Family,
        candidates: &[Point],
        n_max: usize,
        kind: MetricKind,
    ) -> Result<Self> {
        Self::build_capped(family, candidates, n_max, kind, DEFAULT_CACHE_CAP)
    }

    pub fn build_capped(
        family: &Family,
        candidates: &[Point],
        n_max: usize,
        kind: MetricKind,
        cap: usize,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(contract("candidate list is empty"));
        }
        if n_max > MAX_DEPTH {
            return Err(contract(format!("depth {n_max} exceeds {MAX_DEPTH}")));
        }
        for p in candidates {
            family.space().check(p)?;
        }
        let levels = match kind {
            MetricKind::HausdorffBowen => {
                let orbits: Vec<Vec<FiniteSet>> = candidates
                    .par_iter()
                    .map(|p| orbit_set_capped(family, p, n_max, 0.0, DEFAULT_ORBIT_CAP).map(|t| t.sets))
                    .collect::<Result<_>>()?;
                let stored: u128 = orbits
                    .iter()
                    .flat_map(|o| o.iter().map(|s| s.raw().len() as u128))
                    .sum();
                if stored > cap as u128 {
                    return Err(Error::SizeLimit {
                        what: "orbit cache",
                        needed: stored,
                        cap,
                        hint: "use fewer candidates or a smaller n",
                    });
                }
                Levels::Orbits(orbits)
            }
            MetricKind::BisMax => {
                let per: u128 = (0..=n_max).map(|k| word_count(family.len(), k)).sum::<u128>()
                    * family.space().dim() as u128;
                let stored = per.saturating_mul(candidates.len() as u128);
                if stored > cap as u128 {
                    return Err(Error::SizeLimit {
                        what: "word-image cache",
                        needed: stored,
                        cap,
                        hint: "use fewer candidates or a smaller n",
                    });
                }
                Levels::Words(
                    candidates
                        .par_iter()
                        .map(|p| word_images(family, p, n_max, usize::MAX))
                        .collect::<Result<_>>()?,
                )
            }
        };
        Ok(CandidateCache {
            family: family.clone(),
            kind,
            n_max,
            candidates: candidates.to_vec(),
            levels,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn candidates(&self) -> &[Point] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Orbit set of candidate `i` at level `k` (Hausdorff–Bowen caches only).
    pub fn orbit(&self, i: usize, k: usize) -> Option<&FiniteSet> {
        match &self.levels {
            Levels::Orbits(o) => Some(&o[i][k]),
            Levels::Words(_) => None,
        }
    }

    /// Distance contributed by level `k` alone: `d_H(F^k x_i, F^k x_j)` or
    /// `max_{|g|=k} d(g x_i, g x_j)`.
    pub fn level_distance(&self, i: usize, j: usize, k: usize) -> f64 {
        let space = self.family.space();
        match &self.levels {
            Levels::Orbits(o) => hausdorff_raw(space, o[i][k].raw(), o[j][k].raw()),
            Levels::Words(w) => {
                let dim = space.dim();
                w[i][k]
                    .chunks_exact(dim)
                    .zip(w[j][k].chunks_exact(dim))
                    .map(|(p, q)| space.dist(p, q))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// The `n`-metric between candidates `i` and `j`.
    pub fn n_distance(&self, i: usize, j: usize, n: usize) -> f64 {
        (0..=n.min(self.n_max))
            .map(|k| self.level_distance(i, j, k))
            .fold(0.0, f64::max)
    }

    fn first_separation(&self, i: usize, j: usize, eps: f64) -> u8 {
        for k in 0..=self.n_max {
            if self.level_distance(i, j, k) >= eps {
                return k as u8;
            }
        }
        NEVER
    }

    /// First-separation levels for every pair at scale `eps`.
    pub fn separation_matrix(&self, eps: f64) -> Result<SeparationMatrix> {
        if !(eps > 0.0) {
            return Err(contract("epsilon must be positive"));
        }
        let c = self.len();
        let rows: Vec<Vec<u8>> = (0..c)
            .into_par_iter()
            .map(|i| ((i + 1)..c).map(|j| self.first_separation(i, j, eps)).collect())
            .collect();
        Ok(SeparationMatrix {
            size: c,
            n_max: self.n_max,
            epsilon: eps,
            levels: rows.concat(),
        })
    }
}

/// For each unordered candidate pair, the first level at which the pair is
/// `ε`-separated (or never, up to `n_max`).
#[derive(Debug, Clone)]
pub struct SeparationMatrix {
    size: usize,
    n_max: usize,
    epsilon: f64,
    levels: Vec<u8>,
}

impl SeparationMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    fn level(&self, i: usize, j: usize) -> u8 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.levels[a * self.size - a * (a + 1) / 2 + (b - a - 1)]
    }

    /// `d^n(x_i, x_j) ≥ ε`.
    #[inline]
    pub fn separated(&self, i: usize, j: usize, n: usize) -> bool {
        i != j && {
            let l = self.level(i, j);
            l != NEVER && (l as usize) <= n
        }
    }

    /// `d^n(x_i, x_j) < ε`; every candidate is close to itself.
    #[inline]
    pub fn close(&self, i: usize, j: usize, n: usize) -> bool {
        !self.separated(i, j, n)
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(contract(format!(
                "depth {n} exceeds the cached depth {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// Scans candidates in order, keeping each one that is separated from
    /// everything kept so far. The result is maximal, hence also spanning.
    pub fn greedy_separated(&self, n: usize) -> Result<Vec<usize>> {
        self.check_depth(n)?;
        let mut kept: Vec<usize> = Vec::new();
        for i in 0..self.size {
            if kept.iter().all(|&k| self.separated(i, k, n)) {
                kept.push(i);
            }
        }
        Ok(kept)
    }

    /// Greedy set cover: repeatedly take the candidate covering the most
    /// still-uncovered candidates, lowest index on ties.
    pub fn greedy_spanning(&self, n: usize) -> Result<Vec<usize>> {
        self.check_depth(n)?;
        let c = self.size;
        let mut gain: Vec<usize> = (0..c)
            .map(|i| (0..c).filter(|&j| self.close(i, j, n)).count())
            .collect();
        let mut covered = vec![false; c];
        let mut remaining = c;
        let mut chosen = Vec::new();
        while remaining > 0 {
            let mut best = 0;
            for i in 1..c {
                if gain[i] > gain[best] {
                    best = i;
                }
            }
            chosen.push(best);
            for (j, cov) in covered.iter_mut().enumerate() {
                if !*cov && self.close(best, j, n) {
                    *cov = true;
                    remaining -= 1;
                    for (i, g) in gain.iter_mut().enumerate() {
                        if self.close(i, j, n) {
                            *g -= 1;
                        }
                    }
                }
            }
        }
        Ok(chosen)
    }

    pub fn greedy_counts(&self, n: usize, kind: MetricKind) -> Result<CountResult> {
        Ok(CountResult {
            n,
            epsilon: self.epsilon,
            kind,
            method: Method::Greedy,
            spanning: self.greedy_spanning(n)?.len(),
            separated: self.greedy_separated(n)?.len(),
            candidates: self.size,
        })
    }

    /// Exhaustive minimum spanning and maximum separated cardinalities over
    /// all candidate subsets.
    pub fn exact_counts(&self, n: usize, kind: MetricKind) -> Result<CountResult> {
        self.check_depth(n)?;
        let c = self.size;
        if c > EXACT_CANDIDATE_LIMIT {
            return Err(Error::SizeLimit {
                what: "exact subset search",
                needed: c as u128,
                cap: EXACT_CANDIDATE_LIMIT,
                hint: "use at most 20 candidates",
            });
        }
        // close[i]: candidates within ε of i, including i.
        let close: Vec<u32> = (0..c)
            .map(|i| {
                (0..c)
                    .filter(|&j| self.close(i, j, n))
                    .fold(0u32, |m, j| m | (1 << j))
            })
            .collect();
        let full: u32 = if c == 32 { u32::MAX } else { (1u32 << c) - 1 };
        let subsets = 1usize << c;
        let mut cover = vec![0u32; subsets];
        let mut indep = vec![true; subsets];
        let mut r = c;
        let mut s = 1;
        for mask in 1..subsets {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            cover[mask] = cover[rest] | close[low];
            indep[mask] = indep[rest] && (close[low] & rest as u32) == 0;
            let size = mask.count_ones() as usize;
            if cover[mask] == full && size < r {
                r = size;
            }
            if indep[mask] && size > s {
                s = size;
            }
        }
        Ok(CountResult {
            n,
            epsilon: self.epsilon,
            kind,
            method: Method::Exact,
            spanning: r,
            separated: s,
            candidates: c,
        })
    }
}

/// Maximal `(n, ε)`-separated subset of `candidates`, scanning in order.
pub fn greedy_separated(
    family: &Family,
    candidates: &[Point],
    n: usize,
    eps: f64,
    kind: MetricKind,
) -> Result<Vec<Point>> {
    let cache = CandidateCache::build(family, candidates, n, kind)?;
    let kept = cache.separation_matrix(eps)?.greedy_separated(n)?;
    Ok(kept.into_iter().map(|i| candidates[i].clone()).collect())
}

/// Greedy `(n, ε)`-spanning subset of `candidates`.
pub fn greedy_spanning(
    family: &Family,
    candidates: &[Point],
    n: usize,
    eps: f64,
    kind: MetricKind,
) -> Result<Vec<Point>> {
    let cache = CandidateCache::build(family, candidates, n, kind)?;
    let chosen = cache.separation_matrix(eps)?.greedy_spanning(n)?;
    Ok(chosen.into_iter().map(|i| candidates[i].clone()).collect())
}

/// Exact `r` and `s` over at most 20 candidates.
pub fn exact_counts(
    family: &Family,
    candidates: &[Point],
    n: usize,
    eps: f64,
    kind: MetricKind,
) -> Result<CountResult> {
    if candidates.len() > EXACT_CANDIDATE_LIMIT {
        return Err(Error::SizeLimit {
            what: "exact subset search",
            needed: candidates.len() as u128,
            cap: EXACT_CANDIDATE_LIMIT,
            hint: "use at most 20 candidates",
        });
    }
    let cache = CandidateCache::build(family, candidates, n, kind)?;
    cache.separation_matrix(eps)?.exact_counts(n, kind)
}
