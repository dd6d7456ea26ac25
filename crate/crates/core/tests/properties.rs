use hyperentropy::dynamics::{image_of_set, orbit_set, presets, Family};
use hyperentropy::geometry::{Factor, Point, SpaceSpec};
use hyperentropy::pointset::{directed_all_pairs, directed_circle_sorted, directed_interval_sorted, FiniteSet};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    0.0f64..1.0
}

fn space_strategy() -> impl Strategy<Value = SpaceSpec> {
    prop::collection::vec(prop_oneof![Just(Factor::Interval), Just(Factor::Circle)], 1..4)
        .prop_map(|f| SpaceSpec::new(f).unwrap())
}

fn point_in(space: &SpaceSpec) -> impl Strategy<Value = Point> {
    let s = space.clone();
    prop::collection::vec(unit(), space.dim()).prop_map(move |c| s.point(&c).unwrap())
}

fn set_in(space: &SpaceSpec, max: usize) -> impl Strategy<Value = FiniteSet> {
    let s = space.clone();
    prop::collection::vec(point_in(space), 1..max).prop_map(move |p| FiniteSet::new(&s, &p).unwrap())
}

proptest! {
    #[test]
    fn metric_axioms((space, a, b, c) in space_strategy().prop_flat_map(|s| {
        (Just(s.clone()), point_in(&s), point_in(&s), point_in(&s))
    })) {
        let d = |p: &Point, q: &Point| space.distance(p, q).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        if a != b {
            prop_assert!(d(&a, &b) > 0.0);
        }
        prop_assert!(d(&a, &b) <= space.diameter());
    }

    #[test]
    fn circle_metric_at_most_half(x in unit(), y in unit()) {
        prop_assert!(Factor::Circle.distance(x, y) <= 0.5);
    }

    #[test]
    fn grid_covers_space((space, p) in space_strategy().prop_flat_map(|s| (Just(s.clone()), point_in(&s))),
                         cells in 2usize..12) {
        let res = 1.0 / cells as f64;
        let grid = space.grid(res).unwrap();
        let nearest = grid.iter().map(|g| space.distance(g, &p).unwrap()).fold(f64::INFINITY, f64::min);
        prop_assert!(nearest <= res / 2.0 + 1e-12);
    }

    #[test]
    fn hausdorff_is_a_metric((space, a, b, c) in space_strategy().prop_flat_map(|s| {
        (Just(s.clone()), set_in(&s, 12), set_in(&s, 12), set_in(&s, 12))
    })) {
        let h = |p: &FiniteSet, q: &FiniteSet| p.hausdorff(q).unwrap();
        prop_assert_eq!(h(&a, &b), h(&b, &a));
        prop_assert_eq!(h(&a, &a), 0.0);
        prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + 1e-12);
        // Pruned kernels agree with plain all-pairs evaluation.
        prop_assert_eq!(a.directed_dist(&b).unwrap(), directed_all_pairs(&space, a.raw(), b.raw()));
    }

    #[test]
    fn singleton_isometry((space, x, y) in space_strategy().prop_flat_map(|s| {
        (Just(s.clone()), point_in(&s), point_in(&s))
    })) {
        let a = FiniteSet::singleton(&space, &x).unwrap();
        let b = FiniteSet::singleton(&space, &y).unwrap();
        prop_assert_eq!(a.hausdorff(&b).unwrap(), space.distance(&x, &y).unwrap());
    }

    #[test]
    fn coalesce_stays_within_radius(xs in prop::collection::vec(unit(), 1..300), delta in 0.0f64..0.2) {
        let s = SpaceSpec::circle();
        let pts: Vec<Point> = xs.iter().map(|&x| Point::scalar(x)).collect();
        let a = FiniteSet::new(&s, &pts).unwrap();
        let c = a.coalesce(delta);
        prop_assert!(c.hausdorff(&a).unwrap() <= delta);
        prop_assert!(c.is_subset_of(&a, 0.0).unwrap());
    }

    #[test]
    fn induced_map_is_lipschitz(xs in prop::collection::vec(unit(), 1..20), ys in prop::collection::vec(unit(), 1..20)) {
        for fam in [presets::example41(), presets::tent()] {
            let s = fam.space().clone();
            let a = FiniteSet::new(&s, &xs.iter().map(|&x| Point::scalar(x)).collect::<Vec<_>>()).unwrap();
            let b = FiniteSet::new(&s, &ys.iter().map(|&x| Point::scalar(x)).collect::<Vec<_>>()).unwrap();
            let fa = image_of_set(&fam, &a, 0.0).unwrap();
            let fb = image_of_set(&fam, &b, 0.0).unwrap();
            let bound = fam.lipschitz() * a.hausdorff(&b).unwrap() + 2.0 * a.dedup_tol();
            prop_assert!(fa.hausdorff(&fb).unwrap() <= bound + 1e-12);
        }
    }

    #[test]
    fn orbit_sets_grow_by_at_most_p(x in unit(), n in 0usize..9) {
        for fam in [presets::example41(), presets::rotation_id()] {
            let t = orbit_set(&fam, &Point::scalar(x), n, 0.0).unwrap();
            for (i, s) in t.sets.iter().enumerate() {
                prop_assert!(s.len() <= fam.len().pow(i as u32));
            }
        }
    }

    #[test]
    fn identity_member_nests_orbits(x in unit()) {
        let t = orbit_set(&presets::rotation_id(), &Point::scalar(x), 30, 0.0).unwrap();
        for k in 0..=30 {
            for n in k..=30 {
                prop_assert_eq!(t.sets[k].directed_dist(&t.sets[n]).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn product_metric_identity() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let x = SpaceSpec::interval();
    let y = SpaceSpec::circle();
    let mut random_set = |s: &SpaceSpec| {
        let k = rng.gen_range(1..8);
        let pts: Vec<Point> = (0..k).map(|_| s.point(&[rng.gen::<f64>()]).unwrap()).collect();
        FiniteSet::new(s, &pts).unwrap()
    };
    for _ in 0..500 {
        let (a, c) = (random_set(&x), random_set(&x));
        let (b, d) = (random_set(&y), random_set(&y));
        let lhs = a.product_set(&b).hausdorff(&c.product_set(&d)).unwrap();
        let rhs = a.hausdorff(&c).unwrap().max(b.hausdorff(&d).unwrap());
        assert!((lhs - rhs).abs() <= 1e-12);
        assert_eq!(a.product_set(&b).len(), a.len() * b.len());
    }
}

#[test]
fn one_dimensional_kernels_match_all_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let mut a: Vec<f64> = (0..rng.gen_range(1..40)).map(|_| rng.gen()).collect();
        let mut b: Vec<f64> = (0..rng.gen_range(1..40)).map(|_| rng.gen()).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let i = SpaceSpec::interval();
        let c = SpaceSpec::circle();
        assert_eq!(directed_interval_sorted(&a, &b), directed_all_pairs(&i, &a, &b));
        assert_eq!(directed_circle_sorted(&a, &b), directed_all_pairs(&c, &a, &b));
    }
}

#[test]
fn orbit_sets_match_word_enumeration() {
    use hyperentropy::dynamics::Word;
    let fams: Vec<Family> = vec![presets::example41(), presets::rotation_id()];
    for fam in fams {
        for &x in &[0.05, 0.37, 0.5, 0.81] {
            let p = Point::scalar(x);
            let t = orbit_set(&fam, &p, 6, 0.0).unwrap();
            for n in 0..=6 {
                let pts: Vec<Point> = Word::all(fam.len(), n, 1 << 10)
                    .unwrap()
                    .iter()
                    .map(|w| fam.apply_word(w, &p).unwrap())
                    .collect();
                let brute = FiniteSet::new(fam.space(), &pts).unwrap();
                assert!(brute.hausdorff(&t.sets[n]).unwrap() <= 1e-12);
            }
        }
    }
}
