//! Acceptance gate. Prints one line per criterion and exits nonzero if any
//! of them fails. Runs without the libtest harness so the lines always show.

use std::time::Instant;

use qrep2::artifact;
use qrep2_core::diagram::build_diagram;
use qrep2_core::oracle::{gt_multiplicities, invariant_compare, pbw_construct};
use qrep2_core::primitive::{arbitrate, Primitives};
use qrep2_core::verify::{
    check_columns_and_spectra, check_irreducibility, check_recursion, default_tolerance, verify_generators,
    VerificationReport,
};
use qrep2_core::{assemble, assemble_with, QParam, Region, RepLabel, Variant};

const TS: [f64; 3] = [0.0, 0.3, 1.0];

fn labels(max_sum: u32) -> Vec<RepLabel> {
    let mut out = Vec::new();
    for p in 0..=max_sum {
        for q in 0..=max_sum - p {
            out.push(RepLabel::new(p, q));
        }
    }
    out
}

fn q(t: f64) -> QParam {
    QParam::new(t).unwrap()
}

fn residual(rep: &VerificationReport, name: &str) -> f64 {
    rep.get(name).unwrap_or_else(|| panic!("check {name} missing")).residual
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn relations_sweep() -> Outcome {
    let start = Instant::now();
    let mut worst_pair = 0.0f64;
    let mut worst_cartan = 0.0f64;
    let mut bad = Vec::new();
    for label in labels(6) {
        for t in TS {
            let t = q(t);
            let bound = if t.is_classical() { 1e-12 } else { 1e-9 };
            let gen = assemble(label, t).unwrap();
            let rep = verify_generators(&gen, default_tolerance(t));
            let cartan = residual(&rep, "cartan_weights");
            let pairs = ["cartan_pair_1", "cartan_pair_2", "cartan_pair_exp_1", "cartan_pair_exp_2", "mixed_12", "mixed_21"]
                .iter()
                .map(|n| residual(&rep, n))
                .fold(0.0, f64::max);
            worst_cartan = worst_cartan.max(cartan);
            worst_pair = worst_pair.max(pairs);
            if cartan != 0.0 || !(pairs < bound) {
                bad.push(format!("({},{}) t={}", label.p, label.q, t.t()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 60.0,
        format!("cartan {worst_cartan:.1e}, pairs/mixed {worst_pair:.2e}, {secs:.1}s, failing {bad:?}"),
    )
}

fn multiplicities() -> Outcome {
    let mut bad = Vec::new();
    for p in 0..=5 {
        for qq in 0..=5 {
            let label = RepLabel::new(p, qq);
            let d = build_diagram(label);
            let total: usize = d.points.iter().map(|pt| pt.mult as usize).sum();
            let gt = gt_multiplicities(label);
            let mut ok = total == label.dimension() && gt.len() == d.points.len();
            for pt in &d.points {
                let u = d.user_point(pt);
                ok &= gt.get(&(u.h1, u.h2)).copied() == Some(u.mult);
            }
            if !ok {
                bad.push((p, qq));
            }
        }
    }
    outcome(bad.is_empty(), format!("36 labels, failing {bad:?}"))
}

fn recursion() -> Outcome {
    let mut worst = 0.0f64;
    for label in labels(6) {
        for t in TS {
            let prims = Primitives::new(build_diagram(label), Variant::NumericSolver, q(t)).unwrap();
            let rep = check_recursion(&prims, 1e-10);
            worst = worst.max(residual(&rep, "recursion_left")).max(residual(&rep, "recursion_right"));
        }
    }
    outcome(worst < 1e-10, format!("max residual {worst:.2e}"))
}

fn columns_and_spectra() -> Outcome {
    let mut kernel = 0.0f64;
    let mut spectrum = 0.0f64;
    for (p, qq) in [(2, 1), (2, 2)] {
        for t in TS {
            let prims = Primitives::new(build_diagram(RepLabel::new(p, qq)), Variant::NumericSolver, q(t)).unwrap();
            let rep = check_columns_and_spectra(&prims, 1e-10);
            kernel = kernel.max(residual(&rep, "column_kernel"));
            spectrum = spectrum.max(residual(&rep, "gram_spectrum"));
        }
    }
    outcome(kernel < 1e-10 && spectrum < 1e-9, format!("kernel {kernel:.2e}, spectrum {spectrum:.2e}"))
}

fn oracle_and_variants() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for label in labels(5) {
        for t in TS {
            let a = assemble(label, q(t)).unwrap();
            let b = pbw_construct(label, q(t)).unwrap();
            let rep = invariant_compare(&a, &b, 1e-9).unwrap();
            worst = worst.max(rep.max_deviation());
            if !rep.passed() {
                bad.push(format!("({},{}) t={t}", label.p, label.q));
            }
        }
    }
    let ts: Vec<QParam> = TS.iter().map(|&t| q(t)).collect();
    let arb = arbitrate(&labels(5), &ts, 1e-9).unwrap();
    let left = arb.survivors(Region::Left);
    let right = arb.survivors(Region::Right);
    let names = |v: &[Variant]| v.iter().map(|x| x.name()).collect::<Vec<_>>().join(",");
    outcome(
        bad.is_empty() && arb.decided(),
        format!(
            "max deviation {worst:.2e}, failing {bad:?}, survivors left [{}] right [{}]",
            names(&left),
            names(&right)
        ),
    )
}

fn orbit_rank() -> Outcome {
    let mut bad = Vec::new();
    for label in labels(6) {
        for t in TS {
            let irr = check_irreducibility(&assemble(label, q(t)).unwrap());
            if !(irr.irreducible && irr.rank == irr.dim) {
                bad.push(format!("({},{}) t={t}: {}/{}", label.p, label.q, irr.rank, irr.dim));
            }
        }
    }
    outcome(bad.is_empty(), format!("failing {bad:?}"))
}

fn perturbation() -> Outcome {
    let label = RepLabel::new(2, 1);
    let mut tried = 0;
    let mut survived = Vec::new();
    for t in TS {
        let t = q(t);
        let tol = default_tolerance(t);
        let gen = assemble_with(label, t, Variant::NumericSolver).unwrap();
        assert!(verify_generators(&gen, tol).passed());
        for (root, name) in [(1u8, "xm1"), (2u8, "xm2")] {
            let m = gen.generator(name).unwrap().clone();
            for &(row, col, v) in m.entries() {
                tried += 1;
                let bent = gen.with_lowering_entry(root, row, col, v + 1e-3).unwrap();
                if verify_generators(&bent, tol).passed() {
                    survived.push(format!("{name}({row},{col}) t={}", t.t()));
                }
            }
        }
    }
    outcome(survived.is_empty() && tried > 0, format!("{tried} perturbations, undetected {survived:?}"))
}

fn round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    let mut count = 0;
    for label in labels(4) {
        for t in TS {
            let t = q(t);
            let tol = default_tolerance(t);
            let gen = assemble(label, t).unwrap();
            let direct = verify_generators(&gen, tol);
            let stem = dir.path().join(format!("r{}_{}_{}", label.p, label.q, count));
            let json = stem.with_extension("json");
            artifact::write_json(&gen, None, &json).unwrap();
            artifact::write_mtx(&gen, &stem).unwrap();
            for (kind, loaded) in [("json", artifact::read_artifact(&json)), ("mtx", artifact::read_mtx(&stem))] {
                let rep = verify_generators(&loaded.unwrap(), tol);
                let same = rep.checks.len() == direct.checks.len()
                    && rep.checks.iter().zip(&direct.checks).all(|(a, b)| {
                        a.name == b.name && a.residual.to_bits() == b.residual.to_bits() && a.passed == b.passed
                    });
                if !same {
                    bad.push(format!("{kind} ({},{}) t={}", label.p, label.q, t.t()));
                }
            }
            count += 1;
        }
    }
    outcome(bad.is_empty(), format!("{count} artifacts in two formats, mismatching {bad:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("relations over p+q<=6", relations_sweep),
        ("multiplicities against pattern count", multiplicities),
        ("primitive recursion", recursion),
        ("boundary columns and gram spectra", columns_and_spectra),
        ("oracle agreement and variant arbitration", oracle_and_variants),
        ("orbit rank", orbit_rank),
        ("single-entry perturbations of (2,1)", perturbation),
        ("artifact round trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {status} ({})", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
