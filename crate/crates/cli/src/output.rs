//! CSV and JSON emission with fixed columns and 12 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use hyperentropy::bowen::CountResult;
use hyperentropy::chaos::PairReport;
use hyperentropy::dynamics::Word;
use hyperentropy::geometry::Point;
use serde_json::Value;

/// Rounds to 12 significant digits so that printed values are stable.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn float(x: f64) -> String {
    format!("{}", sig12(x))
}

fn point(p: &Point) -> String {
    p.coords().iter().map(|&c| float(c)).collect::<Vec<_>>().join(" ")
}

/// Replaces every float in a JSON tree by its 12-digit rounding.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            serde_json::Number::from_f64(sig12(n.as_f64().expect("f64")))
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub struct GrowthRow<'a> {
    pub family: &'a str,
    pub count: &'a CountResult,
}

pub fn growth_csv(rows: &mut [GrowthRow<'_>]) -> String {
    rows.sort_by(|a, b| {
        (a.family, a.count.kind.label(), a.count.method.label())
            .cmp(&(b.family, b.count.kind.label(), b.count.method.label()))
            .then(b.count.epsilon.total_cmp(&a.count.epsilon))
            .then(a.count.n.cmp(&b.count.n))
    });
    let mut out = String::from("family,kind,method,n,epsilon,count_r,count_s\n");
    for r in rows.iter() {
        let c = r.count;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.family,
            c.kind.label(),
            c.method.label(),
            c.n,
            float(c.epsilon),
            c.spanning,
            c.separated
        );
    }
    out
}

pub fn pairs_csv(reports: &[PairReport]) -> String {
    let mut out = String::from("x,y,liyorke,dc_class,tail_max,tail_min,max_phi_gap\n");
    for r in reports {
        let c = &r.classification;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            point(&r.x),
            point(&r.y),
            c.li_yorke,
            c.dc_class.label(),
            float(c.tail_max),
            float(c.tail_min),
            float(c.max_phi_gap)
        );
    }
    out
}

pub fn witnesses_csv(witnesses: &[(Word, Point)]) -> String {
    let mut out = String::from("word,x\n");
    for (w, p) in witnesses {
        let _ = writeln!(out, "{w},{}", point(p));
    }
    out
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> io::Result<()> {
    fs::write(dir.join(name), text)
}

pub fn write_json(dir: &Path, name: &str, value: Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(&round_json(value)).expect("json serializes");
    text.push('\n');
    fs::write(dir.join(name), text)
}
