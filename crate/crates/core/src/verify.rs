//! Residual engine.
//!
//! Every residual is a max-abs entry, reported with its location. Checks
//! marked exact use tolerance 0; all others pass when the residual is at
//! most `tol * (1 + dim/100)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::assembly::{cartan_r, GeneratorSet};
use crate::diagram::Region;
use crate::error::Result;
use crate::linalg::{self, GramSchmidt};
use crate::primitive::{self, transition_region, Primitives};
use crate::qnum::{norm_bracket, QParam};
use crate::sparse::SparseMatrix;

/// Where the worst violation of a check occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Location {
    #[default]
    None,
    Entry { row: usize, col: usize },
    Point { k: u32, s: u32 },
    Coefficient { s: u32, i: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::None => f.write_str("-"),
            Location::Entry { row, col } => write!(f, "entry ({row},{col})"),
            Location::Point { k, s } => write!(f, "point (k={k},s={s})"),
            Location::Coefficient { s, i } => write!(f, "coefficient (s={s},i={i})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub dim: usize,
    /// Tolerance before dimension scaling.
    pub base_tolerance: f64,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(dim: usize, base_tolerance: f64) -> Self {
        VerificationReport { dim, base_tolerance, checks: Vec::new() }
    }

    pub fn scaled_tolerance(&self) -> f64 {
        self.base_tolerance * (1.0 + self.dim as f64 / 100.0)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.residual))
    }

    fn push(&mut self, name: &str, worst: Worst, exact: bool) {
        let tolerance = if exact { 0.0 } else { self.scaled_tolerance() };
        let residual = worst.value;
        self.checks.push(CheckResult {
            name: String::from(name),
            residual,
            tolerance,
            passed: residual <= tolerance,
            location: worst.location,
        });
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "dim {}  tolerance {:e} x (1 + dim/100) = {:e}",
            self.dim,
            self.base_tolerance,
            self.scaled_tolerance()
        )?;
        writeln!(f, "{:<28} {:>12} {:>12}  {:<6} worst at", "check", "residual", "tolerance", "status")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<28} {:>12.3e} {:>12.3e}  {:<6} {}",
                c.name,
                c.residual,
                c.tolerance,
                if c.passed { "pass" } else { "FAIL" },
                c.location
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Worst {
    value: f64,
    location: Location,
}

impl Worst {
    fn update(&mut self, value: f64, location: Location) {
        // a NaN residual sticks, so that it fails `residual <= tol`
        if self.value.is_nan() {
            return;
        }
        if value.is_nan() || value > self.value {
            self.value = value;
            self.location = location;
        }
    }

    fn of_matrix(m: &SparseMatrix) -> Worst {
        let mut w = Worst::default();
        for &(r, c, v) in m.entries() {
            w.update(libm::fabs(v), Location::Entry { row: r, col: c });
        }
        w
    }
}

fn residual(result: Result<SparseMatrix>, n: usize) -> Worst {
    match result {
        Ok(m) => Worst::of_matrix(&m),
        Err(_) => Worst { value: f64::INFINITY, location: Location::Entry { row: n, col: n } },
    }
}

/// Cartan commutators through integer weight bookkeeping: `h_1`, `h_2`
/// must be diagonal with integer entries, and every nonzero entry of
/// `X+-_j` must shift the weights by `+-` the `j`-th column of the Cartan
/// matrix. The residual is the size of the offending entry.
fn cartan_weights(gen: &GeneratorSet) -> Worst {
    let mut w = Worst::default();
    for h in [&gen.h1, &gen.h2] {
        for &(r, c, v) in h.entries() {
            if r != c || v != libm::round(v) {
                w.update(libm::fabs(v).max(f64::MIN_POSITIVE), Location::Entry { row: r, col: c });
            }
        }
    }
    let (d1, d2) = (gen.h1.diag(), gen.h2.diag());
    let cartan: [(i64, i64); 2] = [(2, -1), (-1, 2)];
    for (j, (xp, xm)) in [(&gen.xp1, &gen.xm1), (&gen.xp2, &gen.xm2)].into_iter().enumerate() {
        for (sign, x) in [(1i64, xp), (-1, xm)] {
            for &(r, c, v) in x.entries() {
                let shift = ((d1[r] - d1[c]) as i64, (d2[r] - d2[c]) as i64);
                let want = (sign * cartan[j].0, sign * cartan[j].1);
                if shift != want {
                    w.update(libm::fabs(v), Location::Entry { row: r, col: c });
                }
            }
        }
    }
    w
}

/// All relations of the algebra on an assembled set: Cartan commutators
/// (exact), transposition pairs (exact), both forms of the Cartan pairs,
/// mixed commutators and the quantum Serre relations.
pub fn check_defining_relations(gen: &GeneratorSet, tol: f64) -> VerificationReport {
    let n = gen.dim();
    let t = gen.t;
    let mut rep = VerificationReport::new(n, tol);
    rep.push("cartan_weights", cartan_weights(gen), true);
    rep.push("transpose_1", residual(gen.xp1.sub(&gen.xm1.transpose()), n), true);
    rep.push("transpose_2", residual(gen.xp2.sub(&gen.xm2.transpose()), n), true);

    let pairs = [(&gen.xp1, &gen.xm1, &gen.h1, 1u8), (&gen.xp2, &gen.xm2, &gen.h2, 2)];
    for &(xp, xm, h, i) in &pairs {
        let target = SparseMatrix::diagonal(&h.diag().iter().map(|&x| t.bracket_real(x)).collect::<Vec<_>>());
        let r = xp.commutator(xm).and_then(|c| c.sub(&target));
        rep.push(&format!("cartan_pair_{i}"), residual(r, n), false);
    }
    for &(xp, xm, h, i) in &pairs {
        let target = if t.is_classical() {
            h.clone()
        } else {
            let r = cartan_r(gen, i).expect("root index valid");
            let rinv = SparseMatrix::diagonal(&r.diag().iter().map(|x| 1.0 / x).collect::<Vec<_>>());
            r.sub(&rinv).expect("same shape").scale(1.0 / (2.0 * libm::sinh(t.t())))
        };
        let r = xp.commutator(xm).and_then(|c| c.sub(&target));
        rep.push(&format!("cartan_pair_exp_{i}"), residual(r, n), false);
    }
    rep.push("mixed_12", residual(gen.xp1.commutator(&gen.xm2), n), false);
    rep.push("mixed_21", residual(gen.xp2.commutator(&gen.xm1), n), false);

    let two = norm_bracket(2, t);
    let serre = |a: &SparseMatrix, b: &SparseMatrix| -> Result<SparseMatrix> {
        let aa = a.mul(a)?;
        let aab = aa.mul(b)?;
        let aba = a.mul(b)?.mul(a)?;
        let baa = b.mul(&aa)?;
        aab.lin_comb(1.0, &aba, -two)?.add(&baa)
    };
    rep.push("serre_plus_12", residual(serre(&gen.xp1, &gen.xp2), n), false);
    rep.push("serre_plus_21", residual(serre(&gen.xp2, &gen.xp1), n), false);
    rep.push("serre_minus_12", residual(serre(&gen.xm1, &gen.xm2), n), false);
    rep.push("serre_minus_21", residual(serre(&gen.xm2, &gen.xm1), n), false);
    rep
}

/// The commutation of `X+_2` with `X-_1`, written per plaquette of the
/// diagram: `lambda(k,s+1)^T L(k+1,s) = L(k,s) lambda(k,s)^T` at every
/// `(k, s)` whose three neighbours exist, split by the region of the
/// transition `s -> s+1`.
pub fn check_recursion(prims: &Primitives, tol: f64) -> VerificationReport {
    let d = &prims.diagram;
    let mut rep = VerificationReport::new(d.dimension(), tol);
    let mut left = Worst::default();
    let mut right = Worst::default();
    for pt in &d.points {
        let (k, s) = (pt.k, pt.s);
        if !(d.contains(k + 1, s) && d.contains(k, s + 1) && d.contains(k + 1, s + 1)) {
            continue;
        }
        let value = (|| -> Result<f64> {
            let lhs = prims.lambda_block(k, s + 1)?.entries.transpose().mul(&prims.l_block(k + 1, s)?.entries);
            let rhs = prims.l_block(k, s)?.entries.mul(&prims.lambda_block(k, s)?.entries.transpose());
            Ok(lhs.sub(&rhs).max_abs())
        })()
        .unwrap_or(f64::INFINITY);
        let w = if transition_region(d, s) == Region::Left { &mut left } else { &mut right };
        w.update(value, Location::Point { k, s });
    }
    rep.push("recursion_left", left, false);
    rep.push("recursion_right", right, false);
    rep
}

/// Boundary-column identities and the spectral identity of the gram block.
///
/// * `column_kernel`: `a_i l_i + b_i l_{i+1} = 0` for left transitions.
/// * `column_propagation`: `sqrt([s+1]) m_i(s) = b_{i-1} m_{i-1}(s-1) + a_i m_i(s-1)`.
/// * `ratio_l`, `ratio_m`: closed ratio identities of consecutive coefficients.
/// * `column_norms`: unit norm of first and last columns at every point.
/// * `columns_closed_vs_numeric`: closed-form columns against columns
///   propagated through the L-blocks.
/// * `right_column_lead`: leading first-column entry in the right region.
/// * `gram_spectrum`: eigenvalues of the gram block against the squared
///   slanting-line `sl2` elements at each point.
pub fn check_columns_and_spectra(prims: &Primitives, tol: f64) -> VerificationReport {
    let d = &prims.diagram;
    let t = prims.t;
    let q = d.label.q;
    let mut rep = VerificationReport::new(d.dimension(), tol);

    let mut kernel = Worst::default();
    let mut propagation = Worst::default();
    let mut ratio_l = Worst::default();
    let mut ratio_m = Worst::default();
    for s in 0..q {
        let Ok(co) = prims.coefficients(s) else { continue };
        let si = s as i64;
        let l = primitive::left_l_coefficients(d, si, t);
        let m = primitive::left_m_coefficients(d, si, t);
        let m_prev = primitive::left_m_coefficients(d, si - 1, t);
        for i in 0..=s as usize {
            let r = co.a[i] * l[i] + co.b[i] * l[i + 1];
            kernel.update(libm::fabs(r), Location::Coefficient { s, i });
            let (u, w) = (l[i] / l[i + 1], m[i] / m[i + 1]);
            let ru = primitive::left_l_ratio_sq(d, si, i as i64 + 1, t);
            let rw = primitive::left_m_ratio_sq(d, si, i as i64 + 1, t);
            ratio_l.update(libm::fabs(u * u - ru) / ru.max(1.0), Location::Coefficient { s, i });
            ratio_m.update(libm::fabs(w * w - rw) / rw.max(1.0), Location::Coefficient { s, i });
        }
        let root = libm::sqrt(norm_bracket(si + 1, t));
        for i in 0..m.len() {
            let mut rhs = 0.0;
            if i > 0 && i - 1 < m_prev.len() {
                rhs += co.b[i - 1] * m_prev[i - 1];
            }
            if i < m_prev.len() {
                rhs += co.a[i] * m_prev[i];
            }
            propagation.update(libm::fabs(root * m[i] - rhs), Location::Coefficient { s, i });
        }
    }
    rep.push("column_kernel", kernel, false);
    rep.push("column_propagation", propagation, false);
    rep.push("ratio_l", ratio_l, false);
    rep.push("ratio_m", ratio_m, false);

    let mut norms = Worst::default();
    let mut closed = Worst::default();
    let mut lead = Worst::default();
    let mut spectrum = Worst::default();
    for pt in &d.points {
        let (k, s) = (pt.k, pt.s);
        let at = Location::Point { k, s };
        match (prims.boundary_columns(k, s), prims.numeric_columns(k, s)) {
            (Ok(bc), Ok(nc)) => {
                norms.update(libm::fabs(linalg::norm(&bc.first) - 1.0), at);
                if let Some(last) = &bc.last {
                    norms.update(libm::fabs(linalg::norm(last) - 1.0), at);
                }
                if bc.closed_form {
                    let dist = |x: &[f64], y: &[f64]| {
                        if x.len() != y.len() {
                            return f64::INFINITY;
                        }
                        x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max(libm::fabs(a - b)))
                    };
                    closed.update(dist(&bc.first, &nc.first), at);
                    match (&bc.last, &nc.last) {
                        (Some(x), Some(y)) => closed.update(dist(x, y), at),
                        (None, None) => {}
                        _ => closed.update(f64::INFINITY, at),
                    }
                }
                if let Some(want) = primitive::right_first_column_lead(d, k, s, t) {
                    lead.update(libm::fabs(libm::fabs(nc.first[0]) - want), at);
                }
            }
            _ => norms.update(f64::INFINITY, at),
        }
        match prims.gram_block(k, s) {
            Ok(g) => {
                let ev = linalg::symmetric_eigenvalues(&g.entries);
                let want = prims.q_line_spectrum(k, s);
                let r = if ev.len() == want.len() {
                    ev.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max(libm::fabs(a - b)))
                } else {
                    f64::INFINITY
                };
                spectrum.update(r, at);
            }
            Err(_) => spectrum.update(f64::INFINITY, at),
        }
    }
    rep.push("column_norms", norms, false);
    rep.push("columns_closed_vs_numeric", closed, false);
    rep.push("right_column_lead", lead, false);
    rep.push("gram_spectrum", spectrum, false);
    rep
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Irreducibility {
    pub irreducible: bool,
    pub rank: usize,
    pub dim: usize,
}

/// Span of repeated lowering from the highest-weight state (the basis state
/// at `(0, 0)`, or state 0 if there is none).
pub fn check_irreducibility(gen: &GeneratorSet) -> Irreducibility {
    let n = gen.dim();
    if n == 0 {
        return Irreducibility { irreducible: false, rank: 0, dim: 0 };
    }
    let start = gen.highest_index().unwrap_or(0);
    let mut seed = vec![0.0; n];
    seed[start] = 1.0;
    let mut gs = GramSchmidt::new(1e-8);
    let mut queue = alloc::collections::VecDeque::new();
    if let Some(v) = gs.insert(&seed) {
        queue.push_back(v.to_vec());
    }
    while let Some(v) = queue.pop_front() {
        if gs.rank() == n {
            break;
        }
        for x in [&gen.xm1, &gen.xm2] {
            let mut w = vec![0.0; n];
            for &(r, c, val) in x.entries() {
                w[r] += val * v[c];
            }
            if let Some(u) = gs.insert(&w) {
                queue.push_back(u.to_vec());
            }
        }
    }
    Irreducibility { irreducible: gs.rank() == n, rank: gs.rank(), dim: n }
}

/// Relation checks plus irreducibility as a single report entry whose
/// residual is the rank deficit.
pub fn verify_generators(gen: &GeneratorSet, tol: f64) -> VerificationReport {
    let mut rep = check_defining_relations(gen, tol);
    let irr = check_irreducibility(gen);
    rep.checks.push(CheckResult {
        name: String::from("irreducibility"),
        residual: (irr.dim - irr.rank) as f64,
        tolerance: 0.0,
        passed: irr.irreducible,
        location: Location::None,
    });
    rep
}

/// Every check: relations and irreducibility on the assembled set, then the
/// primitive-layer identities.
pub fn verify_all(gen: &GeneratorSet, prims: &Primitives, tol: f64) -> VerificationReport {
    let mut rep = verify_generators(gen, tol);
    rep.extend(check_recursion(prims, tol));
    rep.extend(check_columns_and_spectra(prims, tol));
    rep
}

/// Tolerance used when none is given: `1e-9`, or `1e-12` at `t = 0`.
pub fn default_tolerance(t: QParam) -> f64 {
    if t.is_classical() {
        1e-12
    } else {
        1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, assemble_primitives, direct_sum};
    use crate::diagram::{build_diagram, RepLabel};
    use crate::primitive::Variant;

    fn q(t: f64) -> QParam {
        QParam::new(t).unwrap()
    }

    fn prims(p: u32, qq: u32, t: f64, v: Variant) -> Primitives {
        Primitives::new(build_diagram(RepLabel::new(p, qq)), v, q(t)).unwrap()
    }

    #[test]
    fn fundamental_is_exact() {
        let g = assemble(RepLabel::new(1, 0), q(0.0)).unwrap();
        let rep = check_defining_relations(&g, 1e-12);
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.max_residual(), 0.0);
    }

    #[test]
    fn adjoint_and_deformed() {
        let g = assemble(RepLabel::new(1, 1), q(0.0)).unwrap();
        assert!(verify_generators(&g, 1e-12).passed());
        for (p, qq, t) in [(2, 1, 0.5), (2, 2, 1.0), (1, 3, 0.3)] {
            let g = assemble(RepLabel::new(p, qq), q(t)).unwrap();
            let rep = verify_generators(&g, 1e-9);
            assert!(rep.passed(), "({p},{qq}) t={t}\n{rep}");
        }
    }

    #[test]
    fn every_check_appears_once() {
        let pr = prims(2, 1, 0.3, Variant::NumericSolver);
        let g = assemble_primitives(&pr);
        let rep = verify_all(&g, &pr, 1e-9);
        let mut names: Vec<_> = rep.checks.iter().map(|c| c.name.as_str()).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
        assert!(rep.passed(), "{rep}");
        assert!(rep.checks.iter().all(|c| c.residual >= 0.0));
    }

    #[test]
    fn corrupted_l_entry_fails_mixed() {
        let g = assemble(RepLabel::new(2, 1), q(0.5)).unwrap();
        let (r, c, v) = g.xm2.entries()[3];
        let bad = g.with_lowering_entry(2, r, c, v + 1e-3).unwrap();
        let rep = check_defining_relations(&bad, 1e-9);
        assert!(!rep.passed());
        let failing: Vec<_> = rep.failures().map(|c| c.name.as_str()).collect();
        assert!(failing.iter().any(|n| n.starts_with("mixed") || n.starts_with("cartan_pair")), "{failing:?}");
        assert!(rep.checks.iter().filter(|c| !c.passed).any(|c| c.residual >= 1e-4));
    }

    #[test]
    fn one_sided_corruption_breaks_transpose() {
        let g = assemble(RepLabel::new(2, 1), q(0.5)).unwrap();
        let (r, c, v) = g.xm1.entries()[0];
        let bad = g.with_entry("xm1", r, c, v * 1.5).unwrap();
        assert!(!check_defining_relations(&bad, 1e-9).get("transpose_1").unwrap().passed);
    }

    #[test]
    fn recursion_examples() {
        let rep = check_recursion(&prims(1, 0, 0.0, Variant::NumericSolver), 1e-12);
        assert!(rep.passed());
        assert_eq!(rep.max_residual(), 0.0);
        assert!(check_recursion(&prims(2, 1, 0.0, Variant::NumericSolver), 1e-12).passed());
        assert!(check_recursion(&prims(3, 2, 0.7, Variant::NumericSolver), 1e-9).passed());
    }

    #[test]
    fn columns_and_spectra_examples() {
        for (p, qq, t) in [(2, 1, 0.0), (2, 2, 0.3), (4, 3, 1.0)] {
            let rep = check_columns_and_spectra(&prims(p, qq, t, Variant::NumericSolver), 1e-10);
            assert!(rep.passed(), "({p},{qq}) t={t}\n{rep}");
        }
        let rep = check_columns_and_spectra(&prims(1, 0, 0.0, Variant::NumericSolver), 1e-12);
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn printed_family_is_rejected_by_the_suite() {
        let pr = prims(3, 2, 0.3, Variant::PrintedClosedForm);
        let g = assemble_primitives(&pr);
        assert!(!verify_all(&g, &pr, 1e-9).passed());
        let pr = prims(3, 2, 0.3, Variant::GramClosedForm);
        let g = assemble_primitives(&pr);
        let rep = verify_all(&g, &pr, 1e-9);
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn irreducibility_examples() {
        let g = assemble(RepLabel::new(1, 0), q(0.0)).unwrap();
        assert_eq!(check_irreducibility(&g), Irreducibility { irreducible: true, rank: 3, dim: 3 });
        let g8 = assemble(RepLabel::new(1, 1), q(0.0)).unwrap();
        assert_eq!(check_irreducibility(&g8).rank, 8);
        let sum = direct_sum(&g, &g).unwrap();
        let irr = check_irreducibility(&sum);
        assert_eq!((irr.irreducible, irr.rank, irr.dim), (false, 3, 6));
    }

    #[test]
    fn nan_entries_fail() {
        let g = assemble(RepLabel::new(1, 1), q(0.3)).unwrap();
        let (r, c, _) = g.xm1.entries()[0];
        let bad = g.with_lowering_entry(1, r, c, f64::NAN).unwrap();
        assert!(!check_defining_relations(&bad, 1e-9).passed());
    }

    #[test]
    fn report_table_renders() {
        let g = assemble(RepLabel::new(1, 0), q(0.0)).unwrap();
        let s = alloc::format!("{}", check_defining_relations(&g, 1e-12));
        assert!(s.contains("cartan_pair_1") && s.contains("pass"));
    }
}
