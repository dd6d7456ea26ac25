//! Spanning/separated counts checked against a brute-force oracle that
//! evaluates every pairwise `n`-distance directly and searches all subsets.

use hyperentropy::bowen::{dhn, dmaxn, exact_counts, greedy_separated, greedy_spanning, CandidateCache, MetricKind};
use hyperentropy::dynamics::{conjugate_family, power_family, presets, Family, MapSpec};
use hyperentropy::geometry::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn metric(kind: MetricKind, f: &Family, x: &Point, y: &Point, n: usize) -> f64 {
    match kind {
        MetricKind::HausdorffBowen => dhn(f, x, y, n).unwrap(),
        MetricKind::BisMax => dmaxn(f, x, y, n).unwrap(),
    }
}

/// (minimum spanning, maximum separated) by exhaustive search.
fn brute_force(kind: MetricKind, f: &Family, c: &[Point], n: usize, eps: f64) -> (usize, usize) {
    let k = c.len();
    let mut d = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            d[i][j] = metric(kind, f, &c[i], &c[j], n);
        }
    }
    let (mut r, mut s) = (k, 1);
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let spans = (0..k).all(|j| members.iter().any(|&i| d[i][j] < eps));
        if spans {
            r = r.min(members.len());
        }
        let separated = members
            .iter()
            .all(|&i| members.iter().all(|&j| i == j || d[i][j] >= eps));
        if separated {
            s = s.max(members.len());
        }
    }
    (r, s)
}

fn random_candidates(rng: &mut ChaCha8Rng, k: usize) -> Vec<Point> {
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
    xs.sort_by(f64::total_cmp);
    xs.into_iter().map(Point::scalar).collect()
}

#[test]
fn exact_counts_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for fam in [presets::example41(), presets::rotation_id()] {
        for _ in 0..12 {
            let k = rng.gen_range(2..10);
            let c = random_candidates(&mut rng, k);
            let n = rng.gen_range(0..4);
            let eps = rng.gen_range(0.02..0.4);
            for kind in [MetricKind::HausdorffBowen, MetricKind::BisMax] {
                let got = exact_counts(&fam, &c, n, eps, kind).unwrap();
                assert_eq!((got.spanning, got.separated), brute_force(kind, &fam, &c, n, eps));
            }
        }
    }
}

#[test]
fn greedy_bounds_against_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fam = presets::example41();
    for _ in 0..30 {
        let c = random_candidates(&mut rng, 16);
        let eps = rng.gen_range(0.02..0.3);
        for kind in [MetricKind::HausdorffBowen, MetricKind::BisMax] {
            let exact = exact_counts(&fam, &c, 2, eps, kind).unwrap();
            let sep = greedy_separated(&fam, &c, 2, eps, kind).unwrap();
            let span = greedy_spanning(&fam, &c, 2, eps, kind).unwrap();
            assert!(sep.len() <= exact.separated);
            assert!(span.len() >= exact.spanning);
            // A maximal separated set also spans.
            assert!(sep.len() >= exact.spanning);
        }
    }
}

#[test]
fn metrics_are_monotone_and_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for fam in [presets::example41(), presets::rotation_id(), presets::tent()] {
        for _ in 0..20 {
            let (x, y) = (Point::scalar(rng.gen()), Point::scalar(rng.gen()));
            let mut prev = (0.0, 0.0);
            for n in 0..6 {
                let h = dhn(&fam, &x, &y, n).unwrap();
                let b = dmaxn(&fam, &x, &y, n).unwrap();
                assert!(h <= b + 1e-15);
                assert!(h >= prev.0 && b >= prev.1);
                prev = (h, b);
            }
        }
    }
}

#[test]
fn count_level_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for fam in [presets::example41(), presets::rotation_id()] {
        for _ in 0..15 {
            let c = random_candidates(&mut rng, 12);
            let n = rng.gen_range(1..4);
            let eps = rng.gen_range(0.03..0.3);
            let h = exact_counts(&fam, &c, n, eps, MetricKind::HausdorffBowen).unwrap();
            let b = exact_counts(&fam, &c, n, eps, MetricKind::BisMax).unwrap();
            assert!(h.separated <= b.separated);
            assert!(h.spanning <= b.spanning);
            let half = exact_counts(&fam, &c, n, eps / 2.0, MetricKind::HausdorffBowen).unwrap();
            assert!(h.spanning <= h.separated && h.separated <= half.spanning);
        }
    }
}

#[test]
fn power_rule_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let fam = presets::example41();
    for m in [2usize, 3] {
        let fm = power_family(&fam, m).unwrap();
        for _ in 0..10 {
            let c = random_candidates(&mut rng, 10);
            let eps = rng.gen_range(0.03..0.3);
            for n in 1..=2 {
                let lhs = exact_counts(&fm, &c, n, eps, MetricKind::HausdorffBowen).unwrap();
                let rhs = exact_counts(&fam, &c, m * n, eps, MetricKind::HausdorffBowen).unwrap();
                assert!(lhs.spanning <= rhs.spanning);
            }
        }
    }
}

#[test]
fn subsystem_counts_are_smaller() {
    use hyperentropy::dynamics::invariant_subintervals;
    let fam = presets::example41();
    let all: Vec<Point> = (0..16).map(|k| Point::scalar(k as f64 / 15.0)).collect();
    let ends: Vec<f64> = (0..=6).map(|k| k as f64 / 6.0).collect();
    for (a, b) in invariant_subintervals(&fam, &ends).unwrap() {
        let sub: Vec<Point> = all.iter().filter(|p| p.x() >= a && p.x() <= b).cloned().collect();
        if sub.is_empty() {
            continue;
        }
        for eps in [0.05, 0.1, 0.2] {
            let sy = exact_counts(&fam, &sub, 2, eps, MetricKind::HausdorffBowen).unwrap();
            let sx = exact_counts(&fam, &all, 2, eps, MetricKind::HausdorffBowen).unwrap();
            assert!(sy.separated <= sx.separated);
        }
    }
}

#[test]
fn isometric_conjugacy_preserves_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let fam = presets::example41();
    let t = MapSpec::flip();
    let conj = conjugate_family(&fam, &t, &t).unwrap();
    for _ in 0..10 {
        let c = random_candidates(&mut rng, 10);
        let mapped: Vec<Point> = c.iter().map(|p| Point::scalar(t.apply1(p.x()))).collect();
        let eps = rng.gen_range(0.03..0.3);
        let a = exact_counts(&fam, &c, 2, eps, MetricKind::HausdorffBowen).unwrap();
        let b = exact_counts(&conj, &mapped, 2, eps, MetricKind::HausdorffBowen).unwrap();
        assert_eq!((a.spanning, a.separated), (b.spanning, b.separated));
    }
}

#[test]
fn cached_distance_equals_direct() {
    let fam = presets::rotation_id();
    let c: Vec<Point> = (0..12).map(|k| Point::scalar(k as f64 / 12.0)).collect();
    let cache = CandidateCache::build(&fam, &c, 20, MetricKind::HausdorffBowen).unwrap();
    for i in 0..c.len() {
        for j in 0..c.len() {
            assert_eq!(cache.n_distance(i, j, 20), dhn(&fam, &c[i], &c[j], 20).unwrap());
        }
    }
}
