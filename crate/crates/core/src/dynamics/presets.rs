//! Built-in families.

use super::{Branch, Family, MapSpec, PiecewiseLinear};
use crate::geometry::SpaceSpec;

/// Name and one-line description of every preset.
pub const PRESETS: &[(&str, &str)] = &[
    (
        "example41",
        "two zero-entropy interval homeomorphisms whose semigroup has Hausdorff-metric entropy >= log 2",
    ),
    (
        "rotation_id",
        "golden-mean circle rotation together with the identity (entropy 0)",
    ),
    ("rotation", "golden-mean circle rotation alone (entropy 0)"),
    ("doubling", "the doubling map x -> 2x mod 1 on the circle"),
    ("tent", "the full tent map on [0, 1]"),
    ("identity", "the identity on [0, 1]"),
];

pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `f_1` and `f_2` built from their affine branches.
pub fn example41() -> Family {
    let f1 = PiecewiseLinear::from_branches(&[
        Branch::new(0.0, 1.0 / 3.0, 1.0, 0.0),
        Branch::new(1.0 / 3.0, 4.0 / 9.0, 3.0, -2.0 / 3.0),
        Branch::new(4.0 / 9.0, 1.0, 3.0 / 5.0, 2.0 / 5.0),
    ])
    .expect("f1 branches join");
    let f2 = PiecewiseLinear::from_branches(&[
        Branch::new(0.0, 5.0 / 9.0, 3.0 / 5.0, 0.0),
        Branch::new(5.0 / 9.0, 2.0 / 3.0, 3.0, -4.0 / 3.0),
        Branch::new(2.0 / 3.0, 1.0, 1.0, 0.0),
    ])
    .expect("f2 branches join");
    Family::new(
        "example41",
        SpaceSpec::interval(),
        vec![MapSpec::PiecewiseLinear(f1), MapSpec::PiecewiseLinear(f2)],
    )
    .expect("valid family")
}

pub fn rotation_id() -> Family {
    Family::new(
        "rotation_id",
        SpaceSpec::circle(),
        vec![
            MapSpec::Rotation {
                alpha: golden_alpha(),
            },
            MapSpec::Identity,
        ],
    )
    .expect("valid family")
}

pub fn golden_rotation() -> Family {
    Family::new(
        "rotation",
        SpaceSpec::circle(),
        vec![MapSpec::Rotation {
            alpha: golden_alpha(),
        }],
    )
    .expect("valid family")
}

pub fn doubling() -> Family {
    Family::new(
        "doubling",
        SpaceSpec::circle(),
        vec![MapSpec::AffineMod1 { a: 2, c: 0.0 }],
    )
    .expect("valid family")
}

pub fn tent() -> Family {
    Family::new(
        "tent",
        SpaceSpec::interval(),
        vec![MapSpec::pwl(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).expect("valid")],
    )
    .expect("valid family")
}

pub fn identity() -> Family {
    Family::new("identity", SpaceSpec::interval(), vec![MapSpec::Identity]).expect("valid family")
}

pub fn preset(name: &str) -> Option<Family> {
    Some(match name {
        "example41" => example41(),
        "rotation_id" => rotation_id(),
        "rotation" => golden_rotation(),
        "doubling" => doubling(),
        "tent" => tent(),
        "identity" => identity(),
        _ => return None,
    })
}
