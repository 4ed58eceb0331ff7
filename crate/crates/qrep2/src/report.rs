//! JSON renderings of reports and diagrams.

use qrep2_core::diagram::Diagram;
use qrep2_core::oracle::InvariantReport;
use qrep2_core::primitive::Arbitration;
use qrep2_core::verify::{Location, VerificationReport};
use qrep2_core::Region;
use serde_json::{json, Value};

fn location(loc: &Location) -> Value {
    match *loc {
        Location::None => Value::Null,
        Location::Entry { row, col } => json!({"row": row, "col": col}),
        Location::Point { k, s } => json!({"k": k, "s": s}),
        Location::Coefficient { s, i } => json!({"s": s, "i": i}),
    }
}

pub fn verification(rep: &VerificationReport) -> Value {
    json!({
        "passed": rep.passed(),
        "dim": rep.dim,
        "base_tolerance": rep.base_tolerance,
        "scaled_tolerance": rep.scaled_tolerance(),
        "checks": rep.checks.iter().map(|c| json!({
            "name": c.name,
            "residual": c.residual,
            "tolerance": c.tolerance,
            "passed": c.passed,
            "location": location(&c.location),
        })).collect::<Vec<_>>(),
    })
}

pub fn diagram(d: &Diagram) -> Value {
    let points: Vec<_> = d
        .points
        .iter()
        .map(|pt| {
            let u = d.user_point(pt);
            json!({"k": u.k, "s": u.s, "h1": u.h1, "h2": u.h2, "mult": u.mult, "region": d.region(pt.s).name()})
        })
        .collect();
    json!({
        "label": {"p": d.input.p, "q": d.input.q},
        "swapped": d.swapped,
        "dim": d.dimension(),
        "points": points,
    })
}

pub fn invariants(rep: &InvariantReport) -> Value {
    json!({
        "passed": rep.passed(),
        "tolerance": rep.tolerance,
        "entries": rep.entries.iter().map(|e| json!({
            "name": e.name, "left": e.left, "right": e.right, "deviation": e.deviation, "passed": e.passed,
        })).collect::<Vec<_>>(),
    })
}

pub fn arbitration(arb: &Arbitration) -> Value {
    let regions: Vec<_> = [Region::Left, Region::Right]
        .iter()
        .map(|&r| {
            json!({
                "region": r.name(),
                "survivors": arb.survivors(r).iter().map(|v| v.name()).collect::<Vec<_>>(),
                "scores": arb.scores.iter().filter(|s| s.region == r).map(|s| json!({
                    "variant": s.variant.name(),
                    "max_distance": s.max_distance,
                    "transitions": s.transitions,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"tolerance": arb.tolerance, "decided": arb.decided(), "regions": regions})
}
