//! Growth tables of spanning/separated counts and entropy estimates.
//!
//! The `limsup_n (1/n) log count` is approximated by a least-squares slope
//! of `log count` against `n` over the final half of the `n` range, and
//! the `ε → 0` limit by the smallest `ε` in the table. Every per-`ε` slope
//! is kept so saturation stays visible.

use serde::{Deserialize, Serialize};

use crate::bowen::{CandidateCache, CountResult, MetricKind, Method};
use crate::dynamics::Family;
use crate::error::{contract, Error, Result};
use crate::geometry::Point;

/// Slack allowed when checking sign and ordering properties of fitted slopes.
pub const FIT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub n_min: usize,
    pub n_max: usize,
    pub epsilons: Vec<f64>,
    pub kind: MetricKind,
    pub method: Method,
    pub grid_resolution: f64,
}

impl GrowthParams {
    pub fn n_values(&self) -> impl Iterator<Item = usize> {
        self.n_min..=self.n_max
    }

    fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(contract("epsilon list must be nonempty and positive"));
        }
        if self.n_min > self.n_max {
            return Err(contract("n_min exceeds n_max"));
        }
        let smallest = self.epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.grid_resolution > smallest / 4.0 + 1e-15 {
            return Err(contract(format!(
                "grid resolution {} is coarser than min(epsilon)/4 = {}",
                self.grid_resolution,
                smallest / 4.0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub family: String,
    pub kind: MetricKind,
    pub method: Method,
    pub grid_resolution: f64,
    pub counts: Vec<CountResult>,
}

impl GrowthRecord {
    /// Distinct epsilons, in the order they first appear.
    pub fn epsilons(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for c in &self.counts {
            if !out.contains(&c.epsilon) {
                out.push(c.epsilon);
            }
        }
        out
    }

    pub fn series(&self, eps: f64) -> Vec<&CountResult> {
        self.counts.iter().filter(|c| c.epsilon == eps).collect()
    }
}

/// Counts for every `(n, ε)` over the uniform grid of the family's space.
pub fn growth_table(family: &Family, params: &GrowthParams) -> Result<GrowthRecord> {
    params.validate()?;
    let candidates = family.space().grid(params.grid_resolution)?;
    growth_table_on(family, &candidates, params)
}

/// Counts for every `(n, ε)` over an explicit candidate list.
pub fn growth_table_on(
    family: &Family,
    candidates: &[Point],
    params: &GrowthParams,
) -> Result<GrowthRecord> {
    if params.epsilons.is_empty() || params.n_min > params.n_max {
        return Err(contract("empty epsilon list or n range"));
    }
    let cache = CandidateCache::build(family, candidates, params.n_max, params.kind)?;
    let mut counts = Vec::new();
    for &eps in &params.epsilons {
        let m = cache.separation_matrix(eps)?;
        for n in params.n_values() {
            counts.push(match params.method {
                Method::Greedy => m.greedy_counts(n, params.kind)?,
                Method::Exact => m.exact_counts(n, params.kind)?,
            });
        }
    }
    Ok(GrowthRecord {
        family: family.name().to_string(),
        kind: params.kind,
        method: params.method,
        grid_resolution: params.grid_resolution,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSlope {
    pub epsilon: f64,
    /// Fitted growth rate of the separated counts (the headline estimator).
    pub slope_separated: f64,
    /// Fitted growth rate of the spanning counts (cross-check).
    pub slope_spanning: f64,
    /// RMS residual of the separated-count fit.
    pub residual: f64,
    /// `max (1/n) log s` over the window, the running-ratio alternative.
    pub running_ratio: f64,
    pub window: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub per_epsilon: Vec<EpsilonSlope>,
    pub headline: f64,
    pub headline_epsilon: f64,
    /// Slopes do not decrease as ε shrinks (up to [`FIT_TOLERANCE`]).
    pub monotone_in_epsilon: bool,
    /// Some ε has spanning and separated slopes further apart than
    /// [`FIT_TOLERANCE`].
    pub spanning_separated_gap: bool,
}

/// Least-squares slope of `ys` against `xs` and the RMS residual.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (my + slope * (x - mx));
            r * r
        })
        .sum();
    (slope, (rss / n).sqrt())
}

/// Fits the tail window `n ≥ (n_first + n_last)/2` of one ε series.
fn fit_series(series: &[&CountResult]) -> Result<EpsilonSlope> {
    if series.len() < 4 {
        return Err(Error::Estimation(format!(
            "need at least 4 n-values per epsilon, got {}",
            series.len()
        )));
    }
    let first = series[0].n as f64;
    let last = series[series.len() - 1].n as f64;
    let mid = 0.5 * (first + last);
    let window: Vec<&&CountResult> = series.iter().filter(|c| c.n as f64 >= mid).collect();
    let xs: Vec<f64> = window.iter().map(|c| c.n as f64).collect();
    let ls: Vec<f64> = window.iter().map(|c| (c.separated as f64).ln()).collect();
    let lr: Vec<f64> = window.iter().map(|c| (c.spanning as f64).ln()).collect();
    let (slope_separated, residual) = least_squares(&xs, &ls);
    let (slope_spanning, _) = least_squares(&xs, &lr);
    let running_ratio = window
        .iter()
        .filter(|c| c.n > 0)
        .map(|c| (c.separated as f64).ln() / c.n as f64)
        .fold(0.0, f64::max);
    Ok(EpsilonSlope {
        epsilon: series[0].epsilon,
        slope_separated,
        slope_spanning,
        residual,
        running_ratio,
        window: (window[0].n, window[window.len() - 1].n),
    })
}

pub fn estimate_entropy(record: &GrowthRecord) -> Result<EntropyEstimate> {
    let mut per_epsilon = Vec::new();
    for eps in record.epsilons() {
        let mut series = record.series(eps);
        series.sort_by_key(|c| c.n);
        if series.windows(2).any(|w| w[0].n == w[1].n) {
            return Err(Error::Estimation(format!(
                "repeated n in the series for epsilon {eps}"
            )));
        }
        per_epsilon.push(fit_series(&series)?);
    }
    if per_epsilon.is_empty() {
        return Err(Error::Estimation("empty growth record".into()));
    }
    // Largest ε first.
    per_epsilon.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let head = per_epsilon.last().expect("nonempty");
    let headline = head.slope_separated;
    let headline_epsilon = head.epsilon;
    if headline < -FIT_TOLERANCE {
        return Err(Error::Invariant(format!(
            "negative entropy estimate {headline}"
        )));
    }
    let monotone_in_epsilon = per_epsilon
        .windows(2)
        .all(|w| w[1].slope_separated >= w[0].slope_separated - FIT_TOLERANCE);
    let spanning_separated_gap = per_epsilon
        .iter()
        .any(|e| (e.slope_separated - e.slope_spanning).abs() > FIT_TOLERANCE);
    Ok(EntropyEstimate {
        per_epsilon,
        headline,
        headline_epsilon,
        monotone_in_epsilon,
        spanning_separated_gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub family: String,
    pub h_hausdorff: f64,
    pub h_bis: f64,
    /// Headline estimate for each singleton subfamily `{f_i}`.
    pub singles: Vec<f64>,
    pub tolerance: f64,
    /// `h_hausdorff ≤ h_bis + tolerance`.
    pub hausdorff_below_bis: bool,
    /// `h_bis ≥ max singles − tolerance`.
    pub bis_above_singles: bool,
    /// `(n, ε)` cells where a Hausdorff count exceeds the Biś count.
    pub count_violations: usize,
    pub hausdorff_record: GrowthRecord,
    pub bis_record: GrowthRecord,
}

/// Estimates `h_H`, Biś's `h`, and every single-map entropy with the same
/// grid and schedule, and checks their expected ordering.
pub fn compare_entropies(
    family: &Family,
    params: &GrowthParams,
    tolerance: f64,
) -> Result<ComparisonReport> {
    let hb_params = GrowthParams {
        kind: MetricKind::HausdorffBowen,
        ..params.clone()
    };
    let bis_params = GrowthParams {
        kind: MetricKind::BisMax,
        ..params.clone()
    };
    let hausdorff_record = growth_table(family, &hb_params)?;
    let bis_record = growth_table(family, &bis_params)?;
    let h_hausdorff = estimate_entropy(&hausdorff_record)?.headline;
    let h_bis = estimate_entropy(&bis_record)?.headline;
    let singles = (0..family.len())
        .map(|i| {
            let rec = growth_table(&family.singleton(i), &hb_params)?;
            Ok(estimate_entropy(&rec)?.headline)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_single = singles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let count_violations = count_violations(&hausdorff_record, &bis_record);
    Ok(ComparisonReport {
        family: family.name().to_string(),
        h_hausdorff,
        h_bis,
        hausdorff_below_bis: h_hausdorff <= h_bis + tolerance,
        bis_above_singles: h_bis >= max_single - tolerance,
        singles,
        tolerance,
        count_violations,
        hausdorff_record,
        bis_record,
    })
}

/// Cells where `s_H > s_Bis` or `r_H > r_Bis`, matching records cell by cell.
pub fn count_violations(hausdorff: &GrowthRecord, bis: &GrowthRecord) -> usize {
    hausdorff
        .counts
        .iter()
        .zip(&bis.counts)
        .filter(|(h, b)| {
            debug_assert!(h.n == b.n && h.epsilon == b.epsilon);
            h.separated > b.separated || h.spanning > b.spanning
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::presets;

    fn record(counts: &[(usize, usize)], eps: f64) -> GrowthRecord {
        GrowthRecord {
            family: "synthetic".into(),
            kind: MetricKind::HausdorffBowen,
            method: Method::Greedy,
            grid_resolution: 0.01,
            counts: counts
                .iter()
                .map(|&(n, c)| CountResult {
                    n,
                    epsilon: eps,
                    kind: MetricKind::HausdorffBowen,
                    method: Method::Greedy,
                    spanning: c,
                    separated: c,
                    candidates: 1 << 20,
                })
                .collect(),
        }
    }

    #[test]
    fn powers_of_two_give_log_two() {
        let r = record(&(1..=10).map(|n| (n, 1usize << n)).collect::<Vec<_>>(), 0.1);
        let e = estimate_entropy(&r).unwrap();
        assert!((e.headline - 2f64.ln()).abs() < 1e-12);
        assert!(e.per_epsilon[0].residual < 1e-12);
        assert_eq!(e.per_epsilon[0].window, (6, 10));
    }

    #[test]
    fn constant_counts_give_zero() {
        let r = record(&(1..=8).map(|n| (n, 7)).collect::<Vec<_>>(), 0.1);
        assert_eq!(estimate_entropy(&r).unwrap().headline, 0.0);
    }

    #[test]
    fn rescaling_counts_does_not_move_the_slope() {
        let base: Vec<(usize, usize)> = (1..=9).map(|n| (n, 3usize.pow(n as u32 / 2) + n)).collect();
        let scaled: Vec<(usize, usize)> = base.iter().map(|&(n, c)| (n, 5 * c)).collect();
        let a = estimate_entropy(&record(&base, 0.1)).unwrap().headline;
        let b = estimate_entropy(&record(&scaled, 0.1)).unwrap().headline;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn too_short_series() {
        let r = record(&[(1, 2), (2, 4), (3, 8)], 0.1);
        assert!(matches!(estimate_entropy(&r), Err(Error::Estimation(_))));
    }

    #[test]
    fn identity_family_is_flat() {
        let params = GrowthParams {
            n_min: 1,
            n_max: 6,
            epsilons: vec![0.1, 0.05],
            kind: MetricKind::HausdorffBowen,
            method: Method::Greedy,
            grid_resolution: 0.0125,
        };
        let rec = growth_table(&presets::identity(), &params).unwrap();
        for eps in rec.epsilons() {
            let s = rec.series(eps);
            assert!(s.iter().all(|c| c.separated == s[0].separated));
        }
        assert_eq!(estimate_entropy(&rec).unwrap().headline, 0.0);
    }

    #[test]
    fn grid_must_resolve_epsilon() {
        let params = GrowthParams {
            n_min: 1,
            n_max: 4,
            epsilons: vec![0.1],
            kind: MetricKind::HausdorffBowen,
            method: Method::Greedy,
            grid_resolution: 0.05,
        };
        assert!(matches!(
            growth_table(&presets::identity(), &params),
            Err(Error::Contract(_))
        ));
    }
}
