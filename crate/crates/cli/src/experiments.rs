//! One function per experiment; each writes its files into `dir`.

use std::path::Path;

use hyperentropy::bowen::{exact_counts, greedy_separated, greedy_spanning, MetricKind};
use hyperentropy::chaos::{scan_pairs, DcClass};
use hyperentropy::dynamics::{conjugate_family, orbit_set, power_family, witness_points, Family};
use hyperentropy::entropy::{compare_entropies, estimate_entropy, growth_table, EntropyEstimate, GrowthRecord};
use hyperentropy::geometry::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{self, GrowthRow};
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let family = cfg.family.resolve()?;
    match cfg.experiment {
        Experiment::Entropy => entropy(cfg, &family, dir),
        Experiment::Compare => compare(cfg, &family, dir),
        Experiment::Witness41 => witness41(cfg, &family, dir),
        Experiment::Product => product(cfg, &family, dir),
        Experiment::Power => power(cfg, &family, dir),
        Experiment::Conjugacy => conjugacy(cfg, &family, dir),
        Experiment::Chaos => chaos(cfg, &family, dir),
        Experiment::Oracle => oracle(cfg, &family, dir),
    }
}

fn estimate_json(e: &EntropyEstimate) -> Value {
    json!({
        "headline": e.headline,
        "headline_epsilon": e.headline_epsilon,
        "monotone_in_epsilon": e.monotone_in_epsilon,
        "spanning_separated_gap": e.spanning_separated_gap,
        "per_epsilon": e.per_epsilon,
    })
}

fn write_growth(dir: &Path, records: &[&GrowthRecord]) -> Result<(), CliError> {
    let mut rows: Vec<GrowthRow> = records
        .iter()
        .flat_map(|r| r.counts.iter().map(|c| GrowthRow { family: &r.family, count: c }))
        .collect();
    output::write_text(dir, "growth.csv", &output::growth_csv(&mut rows))?;
    Ok(())
}

fn estimated(cfg: &ExperimentConfig, family: &Family) -> Result<(GrowthRecord, EntropyEstimate), CliError> {
    let rec = growth_table(family, &cfg.growth_params(cfg.kind))?;
    let est = estimate_entropy(&rec)?;
    Ok((rec, est))
}

fn relative_gap(value: f64, reference: f64) -> Value {
    if reference == 0.0 {
        if value == 0.0 {
            json!(0.0)
        } else {
            Value::Null
        }
    } else {
        json!((value - reference).abs() / reference.abs())
    }
}

fn entropy(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let (rec, est) = estimated(cfg, family)?;
    write_growth(dir, &[&rec])?;
    let summary = json!({
        "experiment": "entropy",
        "family": family.name(),
        "kind": cfg.kind.label(),
        "method": cfg.method.label(),
        "grid_resolution": cfg.grid_resolution,
        "estimate": estimate_json(&est),
    });
    output::write_json(dir, "summary.json", summary)?;
    Ok(())
}

fn compare(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let report = compare_entropies(family, &cfg.growth_params(cfg.kind), cfg.tolerance)?;
    write_growth(dir, &[&report.hausdorff_record, &report.bis_record])?;
    let summary = json!({
        "experiment": "compare",
        "family": family.name(),
        "h_hausdorff": report.h_hausdorff,
        "h_bis": report.h_bis,
        "singles": report.singles,
        "tolerance": report.tolerance,
        "hausdorff_below_bis": report.hausdorff_below_bis,
        "bis_above_singles": report.bis_above_singles,
        "count_violations": report.count_violations,
    });
    output::write_json(dir, "summary.json", summary)?;
    if report.count_violations > 0 {
        return Err(CliError::Invariant(format!(
            "{} cells with a Hausdorff count above the Bis count",
            report.count_violations
        )));
    }
    Ok(())
}

fn witness41(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let n = cfg.n_max;
    let target = (cfg.target[0], cfg.target[1]);
    let witnesses = witness_points(family, n, target)?;
    let tables = witnesses
        .par_iter()
        .map(|(_, z)| orbit_set(family, z, n, cfg.coalesce_delta))
        .collect::<Result<Vec<_>, _>>()?;
    let coalesce_error = tables
        .iter()
        .map(|t| t.accumulated_coalesce_error)
        .fold(0.0, f64::max);
    // Exact minimum of d_H^n; a pair is dropped once its running maximum
    // reaches the smallest value already seen from the same row.
    let min = (0..tables.len())
        .into_par_iter()
        .map(|i| {
            let mut best = f64::INFINITY;
            for j in i + 1..tables.len() {
                let mut d: f64 = 0.0;
                for k in (0..=n).rev() {
                    let h = tables[i].sets[k]
                        .hausdorff(&tables[j].sets[k])
                        .expect("orbit sets share a space");
                    d = d.max(h);
                    if d >= best {
                        break;
                    }
                }
                best = best.min(d);
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    let min_json = if min.is_finite() { json!(min) } else { Value::Null };
    output::write_text(dir, "witnesses.csv", &output::witnesses_csv(&witnesses))?;
    let bound = 1.0 / 15.0;
    let summary = json!({
        "experiment": "witness41",
        "family": family.name(),
        "n": n,
        "target": cfg.target,
        "witnesses": witnesses.len(),
        "min_pairwise_dhn": min_json,
        "coalesce_error_bound": 2.0 * coalesce_error,
        "separation_bound": bound,
        "meets_bound": min.is_finite() && min - 2.0 * coalesce_error >= bound - 1e-9,
    });
    output::write_json(dir, "summary.json", summary)?;
    Ok(())
}

fn product(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let other = cfg
        .second_family
        .as_ref()
        .ok_or_else(|| CliError::Config("product needs second_family".into()))?
        .resolve()?;
    let both = family.product(&other);
    let (ra, ea) = estimated(cfg, family)?;
    let (rb, eb) = estimated(cfg, &other)?;
    let (rp, ep) = estimated(cfg, &both)?;
    write_growth(dir, &[&ra, &rb, &rp])?;
    let sum = ea.headline + eb.headline;
    let summary = json!({
        "experiment": "product",
        "families": [family.name(), other.name(), both.name()],
        "headline_first": ea.headline,
        "headline_second": eb.headline,
        "headline_product": ep.headline,
        "headline_sum": sum,
        "relative_gap": relative_gap(ep.headline, sum),
        "estimates": [estimate_json(&ea), estimate_json(&eb), estimate_json(&ep)],
    });
    output::write_json(dir, "summary.json", summary)?;
    Ok(())
}

fn power(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let fm = power_family(family, cfg.power)?;
    let (rf, ef) = estimated(cfg, family)?;
    let (rm, em) = estimated(cfg, &fm)?;
    write_growth(dir, &[&rf, &rm])?;
    let scaled = cfg.power as f64 * ef.headline;
    let summary = json!({
        "experiment": "power",
        "family": family.name(),
        "power": cfg.power,
        "headline": ef.headline,
        "headline_power": em.headline,
        "scaled_headline": scaled,
        "relative_gap": relative_gap(em.headline, scaled),
        "estimates": [estimate_json(&ef), estimate_json(&em)],
    });
    output::write_json(dir, "summary.json", summary)?;
    Ok(())
}

fn conjugacy(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let g = conjugate_family(family, &cfg.conjugacy.forward, &cfg.conjugacy.inverse)?;
    let (rf, ef) = estimated(cfg, family)?;
    let (rg, eg) = estimated(cfg, &g)?;
    write_growth(dir, &[&rf, &rg])?;
    let summary = json!({
        "experiment": "conjugacy",
        "family": family.name(),
        "conjugate": g.name(),
        "forward": cfg.conjugacy.forward.to_string(),
        "headline": ef.headline,
        "headline_conjugate": eg.headline,
        "relative_gap": relative_gap(eg.headline, ef.headline),
        "estimates": [estimate_json(&ef), estimate_json(&eg)],
    });
    output::write_json(dir, "summary.json", summary)?;
    Ok(())
}

/// Distinct unordered pairs of grid points, drawn with the config seed and
/// returned in grid order.
fn sample_pairs(cfg: &ExperimentConfig, family: &Family) -> Result<Vec<(Point, Point)>, CliError> {
    let grid = family.space().grid(cfg.grid_resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut idx: Vec<(usize, usize)> = (0..cfg.pairs)
        .map(|_| {
            let a = rng.gen_range(0..grid.len());
            let b = rng.gen_range(0..grid.len());
            (a.min(b), a.max(b))
        })
        .collect();
    idx.sort_unstable();
    idx.dedup();
    Ok(idx
        .into_iter()
        .map(|(a, b)| (grid[a].clone(), grid[b].clone()))
        .collect())
}

fn chaos(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let pairs = sample_pairs(cfg, family)?;
    let reports = scan_pairs(
        family,
        &pairs,
        cfg.series_length,
        &cfg.t_grid,
        &cfg.tau_grid,
        &cfg.thresholds,
    )?;
    output::write_text(dir, "pairs.csv", &output::pairs_csv(&reports))?;
    let count = |c: DcClass| reports.iter().filter(|r| r.classification.dc_class == c).count();
    let li_yorke = reports.iter().filter(|r| r.classification.li_yorke).count();
    let total = reports.len();
    let summary = json!({
        "experiment": "chaos",
        "family": family.name(),
        "series_length": cfg.series_length,
        "pairs": total,
        "li_yorke": li_yorke,
        "li_yorke_fraction": li_yorke as f64 / total as f64,
        "hdc1": count(DcClass::Hdc1),
        "hdc2": count(DcClass::Hdc2),
        "dc3": count(DcClass::Dc3),
        "thresholds": cfg.thresholds,
        "status": "numerical evidence",
    });
    output::write_json(dir, "summary.json", summary)?;
    Ok(())
}

#[derive(Default)]
struct OracleTally {
    checks: usize,
    sandwich: usize,
    greedy_separated_above_exact: usize,
    greedy_spanning_below_exact: usize,
    hausdorff_above_bis: usize,
}

fn oracle(cfg: &ExperimentConfig, family: &Family, dir: &Path) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let space = family.space().clone();
    let instances: Vec<Vec<Point>> = (0..cfg.oracle_instances)
        .map(|_| {
            (0..cfg.oracle_candidates)
                .map(|_| {
                    let coords: Vec<f64> = (0..space.dim()).map(|_| rng.gen()).collect();
                    space.point(&coords)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut tally = OracleTally::default();
    let mut records = Vec::new();
    for (i, cands) in instances.iter().enumerate() {
        let label = format!("{}#{i}", family.name());
        let mut counts = Vec::new();
        for &eps in &cfg.epsilons {
            for n in cfg.n_min..=cfg.n_max {
                let h = exact_counts(family, cands, n, eps, MetricKind::HausdorffBowen)?;
                let b = exact_counts(family, cands, n, eps, MetricKind::BisMax)?;
                let half = exact_counts(family, cands, n, eps / 2.0, MetricKind::HausdorffBowen)?;
                let gs = greedy_separated(family, cands, n, eps, MetricKind::HausdorffBowen)?;
                let gr = greedy_spanning(family, cands, n, eps, MetricKind::HausdorffBowen)?;
                tally.checks += 1;
                if !(h.spanning <= h.separated && h.separated <= half.spanning) {
                    tally.sandwich += 1;
                }
                if gs.len() > h.separated {
                    tally.greedy_separated_above_exact += 1;
                }
                if gr.len() < h.spanning {
                    tally.greedy_spanning_below_exact += 1;
                }
                if h.separated > b.separated || h.spanning > b.spanning {
                    tally.hausdorff_above_bis += 1;
                }
                counts.push(h);
                counts.push(b);
            }
        }
        records.push(GrowthRecord {
            family: label,
            kind: MetricKind::HausdorffBowen,
            method: hyperentropy::bowen::Method::Exact,
            grid_resolution: 0.0,
            counts,
        });
    }
    let refs: Vec<&GrowthRecord> = records.iter().collect();
    write_growth(dir, &refs)?;
    let violations = tally.sandwich
        + tally.greedy_separated_above_exact
        + tally.greedy_spanning_below_exact
        + tally.hausdorff_above_bis;
    let summary = json!({
        "experiment": "oracle",
        "family": family.name(),
        "instances": cfg.oracle_instances,
        "candidates": cfg.oracle_candidates,
        "checks": tally.checks,
        "violations": {
            "sandwich": tally.sandwich,
            "greedy_separated_above_exact": tally.greedy_separated_above_exact,
            "greedy_spanning_below_exact": tally.greedy_spanning_below_exact,
            "hausdorff_above_bis": tally.hausdorff_above_bis,
        },
    });
    output::write_json(dir, "summary.json", summary)?;
    if violations > 0 {
        return Err(CliError::Invariant(format!("{violations} oracle violations")));
    }
    Ok(())
}
