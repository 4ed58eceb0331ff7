//! Ground truth that shares nothing with the primitive layer.
//!
//! * Gelfand-Tsetlin patterns count the classical weight multiplicities.
//! * [`pbw_construct`] builds the representation for any `t` from the
//!   highest-weight vector alone: weight space by weight space, it spans the
//!   images of the two lowering operators, evaluates their inner products
//!   with the algebra relations (moving raising operators to the right), and
//!   orthonormalizes.
//! * [`invariant_compare`] compares two generator sets through
//!   basis-independent quantities.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::assembly::{BasisEntry, BasisIndex, GeneratorSet};
use crate::diagram::RepLabel;
use crate::error::{Error, Result};
use crate::linalg::{self, Dense};
use crate::qnum::{norm_bracket, QParam};
use crate::sparse::SparseMatrix;

/// Gelfand-Tsetlin pattern with top row `(p+q, q, 0)`:
/// `m13 >= m12 >= m23 >= m22 >= m33` and `m12 >= m11 >= m22`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GTPattern {
    pub top: [u32; 3],
    pub m12: u32,
    pub m22: u32,
    pub m11: u32,
}

impl GTPattern {
    /// `gl(3)` weight `(m11, m12+m22-m11, |top|-m12-m22)`.
    pub fn gl3_weight(&self) -> [i64; 3] {
        let total: i64 = self.top.iter().map(|&x| x as i64).sum();
        let (m11, m12, m22) = (self.m11 as i64, self.m12 as i64, self.m22 as i64);
        [m11, m12 + m22 - m11, total - m12 - m22]
    }

    /// `sl3` weight `(h1, h2)`.
    pub fn weight(&self) -> (i64, i64) {
        let mu = self.gl3_weight();
        (mu[0] - mu[1], mu[1] - mu[2])
    }
}

pub fn gt_enumerate(label: RepLabel) -> Vec<GTPattern> {
    let (p, q) = (label.p, label.q);
    let top = [p + q, q, 0];
    let mut out = Vec::new();
    for m12 in q..=p + q {
        for m22 in 0..=q {
            for m11 in m22..=m12 {
                out.push(GTPattern { top, m12, m22, m11 });
            }
        }
    }
    out
}

/// Multiplicity of every weight `(h1, h2)` by pattern count.
pub fn gt_multiplicities(label: RepLabel) -> BTreeMap<(i64, i64), u32> {
    let mut m = BTreeMap::new();
    for pat in gt_enumerate(label) {
        *m.entry(pat.weight()).or_insert(0) += 1;
    }
    m
}

/// Largest dimension [`pbw_construct`] accepts.
pub const PBW_DIMENSION_CAP: usize = 500;

/// Eigenvalues of a Gram matrix below this fraction of its largest diagonal
/// (or of 1, if larger) are treated as null directions.
const PIVOT: f64 = 1e-8;

/// Coordinates `(k, s)` of the weight spaces, and for each the lowering
/// blocks into it.
struct WeightSpace {
    dim: usize,
    /// `X-_1` from `(k-1, s)`, `dim x dim(k-1, s)`.
    from1: Option<Dense>,
    /// `X-_2` from `(k, s-1)`.
    from2: Option<Dense>,
}

/// The representation built from the relations alone.
pub fn pbw_construct(label: RepLabel, t: QParam) -> Result<GeneratorSet> {
    let (p, q) = (label.p as i64, label.q as i64);
    let expected = ((p + 1) * (q + 1) * (p + q + 2) / 2) as usize;
    if expected > PBW_DIMENSION_CAP {
        return Err(Error::TooLarge { dim: expected, cap: PBW_DIMENSION_CAP });
    }
    let h1 = |k: i64, s: i64| p - 2 * k + s;
    let h2 = |k: i64, s: i64| q + k - 2 * s;
    let n = p + q;
    let mut spaces: BTreeMap<(i64, i64), WeightSpace> = BTreeMap::new();
    spaces.insert((0, 0), WeightSpace { dim: 1, from1: None, from2: None });

    for level in 1..=2 * n {
        for k in 0..=level.min(n) {
            let s = level - k;
            if s > n {
                continue;
            }
            let d1 = spaces.get(&(k - 1, s)).map_or(0, |w| w.dim);
            let d2 = spaces.get(&(k, s - 1)).map_or(0, |w| w.dim);
            let m = d1 + d2;
            if m == 0 {
                continue;
            }
            let mut g = Dense::zeros(m, m);
            if d1 > 0 {
                // <X-_1 e_a, X-_1 e_b> = <e_a, (X-_1 X+_1 + [h1]) e_b>
                let hb = norm_bracket(h1(k - 1, s), t);
                for a in 0..d1 {
                    g[(a, a)] += hb;
                }
                if let Some(a_blk) = spaces.get(&(k - 1, s)).and_then(|w| w.from1.as_ref()) {
                    let aat = a_blk.mul(&a_blk.transpose());
                    for a in 0..d1 {
                        for b in 0..d1 {
                            g[(a, b)] += aat[(a, b)];
                        }
                    }
                }
            }
            if d2 > 0 {
                let hb = norm_bracket(h2(k, s - 1), t);
                for a in 0..d2 {
                    g[(d1 + a, d1 + a)] += hb;
                }
                if let Some(b_blk) = spaces.get(&(k, s - 1)).and_then(|w| w.from2.as_ref()) {
                    let bbt = b_blk.mul(&b_blk.transpose());
                    for a in 0..d2 {
                        for b in 0..d2 {
                            g[(d1 + a, d1 + b)] += bbt[(a, b)];
                        }
                    }
                }
            }
            if d1 > 0 && d2 > 0 {
                // <X-_1 e, X-_2 f> = <e, X-_2 X+_1 f>, since [X+_1, X-_2] = 0
                let c_blk = spaces.get(&(k - 1, s)).and_then(|w| w.from2.as_ref());
                let d_blk = spaces.get(&(k, s - 1)).and_then(|w| w.from1.as_ref());
                if let (Some(c_blk), Some(d_blk)) = (c_blk, d_blk) {
                    let cross = c_blk.mul(&d_blk.transpose());
                    for a in 0..d1 {
                        for b in 0..d2 {
                            g[(a, d1 + b)] = cross[(a, b)];
                            g[(d1 + b, a)] = cross[(a, b)];
                        }
                    }
                }
            }
            let (vals, vecs) = linalg::symmetric_eigen(&g);
            // floored at 1: for real t the squared norm of a genuine state
            // is a sum of brackets [n] >= 1, so an all-null space stays null
            let scale = (0..m).fold(1.0f64, |x, i| x.max(g[(i, i)]));
            if vals.iter().any(|&v| v > 1e-2 * PIVOT * scale && v <= PIVOT * scale) {
                return Err(Error::Degenerate { s: s as u32, i: k as usize, what: "ambiguous Gram rank" });
            }
            let keep: Vec<usize> = (0..m).filter(|&j| vals[j] > PIVOT * scale).collect();
            if keep.is_empty() {
                continue;
            }
            // rows of C G give the candidates in the new orthonormal basis
            let mut cg = Dense::zeros(keep.len(), m);
            for (r, &j) in keep.iter().enumerate() {
                let inv = 1.0 / libm::sqrt(vals[j]);
                for c in 0..m {
                    let mut acc = 0.0;
                    for x in 0..m {
                        acc += vecs[(x, j)] * g[(x, c)];
                    }
                    cg[(r, c)] = inv * acc;
                }
            }
            let take = |lo: usize, hi: usize| {
                let mut out = Dense::zeros(keep.len(), hi - lo);
                for r in 0..keep.len() {
                    for c in lo..hi {
                        out[(r, c - lo)] = cg[(r, c)];
                    }
                }
                out
            };
            let from1 = (d1 > 0).then(|| take(0, d1));
            let from2 = (d2 > 0).then(|| take(d1, m));
            spaces.insert((k, s), WeightSpace { dim: keep.len(), from1, from2 });
        }
    }

    let mut order: Vec<(i64, i64)> = spaces.keys().copied().collect();
    order.sort_by_key(|&(k, s)| (s, k));
    let mut offset = BTreeMap::new();
    let mut entries = Vec::new();
    for &(k, s) in &order {
        offset.insert((k, s), entries.len());
        for r in 0..spaces[&(k, s)].dim {
            entries.push(BasisEntry { k: k as u32, s: s as u32, strand: r as u32, index: entries.len() });
        }
    }
    let dim = entries.len();
    let (mut xm1, mut xm2, mut d1, mut d2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &(k, s) in &order {
        let w = &spaces[&(k, s)];
        let base = offset[&(k, s)];
        for _ in 0..w.dim {
            d1.push(h1(k, s) as f64);
            d2.push(h2(k, s) as f64);
        }
        for (blk, src, out) in [(&w.from1, (k - 1, s), &mut xm1), (&w.from2, (k, s - 1), &mut xm2)] {
            if let Some(blk) = blk {
                let sb = offset[&src];
                for r in 0..blk.rows {
                    for c in 0..blk.cols {
                        if blk[(r, c)] != 0.0 {
                            out.push((base + r, sb + c, blk[(r, c)]));
                        }
                    }
                }
            }
        }
    }
    let xm1 = SparseMatrix::from_triplets(dim, dim, xm1);
    let xm2 = SparseMatrix::from_triplets(dim, dim, xm2);
    let mats = [
        SparseMatrix::diagonal(&d1),
        SparseMatrix::diagonal(&d2),
        xm1.transpose(),
        xm1,
        xm2.transpose(),
        xm2,
    ];
    GeneratorSet::from_parts(label, t, BasisIndex::from_entries(entries)?, mats)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantEntry {
    pub name: String,
    pub left: f64,
    pub right: f64,
    /// `|left - right| / max(1, |left|, |right|)`.
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub tolerance: f64,
    pub entries: Vec<InvariantEntry>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.deviation))
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {:>22} {:>22} {:>10}  status", "invariant", "left", "right", "deviation")?;
        for e in &self.entries {
            writeln!(
                f,
                "{:<22} {:>22.15e} {:>22.15e} {:>10.2e}  {}",
                e.name,
                e.left,
                e.right,
                e.deviation,
                if e.passed { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn trace_powers(m: &SparseMatrix, upto: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(upto);
    let mut acc = m.clone();
    for n in 1..=upto {
        if n > 1 {
            acc = acc.mul(m)?;
        }
        out.push(acc.trace());
    }
    Ok(out)
}

/// Singular values of a weight-graded operator, collected blockwise by the
/// weight of the source state, sorted descending.
fn graded_singular_values(x: &SparseMatrix, weights: &[(f64, f64)]) -> Vec<f64> {
    let mut by_weight: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, &(a, b)) in weights.iter().enumerate() {
        by_weight.entry((a as i64, b as i64)).or_default().push(i);
    }
    // every nonzero entry maps one weight space into one other
    let mut pairs: BTreeMap<((i64, i64), (i64, i64)), ()> = BTreeMap::new();
    for &(r, c, _) in x.entries() {
        let wr = (weights[r].0 as i64, weights[r].1 as i64);
        let wc = (weights[c].0 as i64, weights[c].1 as i64);
        pairs.insert((wr, wc), ());
    }
    let mut out = Vec::new();
    for (wr, wc) in pairs.keys() {
        let blk = x.submatrix(&by_weight[wr], &by_weight[wc]);
        out.extend(linalg::singular_values(&blk).into_iter().filter(|&v| v > 1e-13));
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Compares weight multisets, traces of `(X+_1 X-_1)^n`, `(X+_2 X-_2)^n`,
/// `(X+_1 X+_2 X-_2 X-_1)^n` for `n = 1..3`, and the singular values of
/// `X-_1`, `X-_2`. Deviations are relative: `|a - b| <= tol max(1,|a|,|b|)`.
pub fn invariant_compare(g1: &GeneratorSet, g2: &GeneratorSet, tol: f64) -> Result<InvariantReport> {
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch { left: (g1.dim(), g1.dim()), right: (g2.dim(), g2.dim()) });
    }
    let mut entries = Vec::new();
    let mut push = |name: String, a: f64, b: f64| {
        let deviation = libm::fabs(a - b) / 1f64.max(libm::fabs(a)).max(libm::fabs(b));
        entries.push(InvariantEntry { name, left: a, right: b, deviation, passed: deviation <= tol || (a == b) });
    };

    let (w1, w2) = (g1.weights(), g2.weights());
    let sorted = |w: &[(f64, f64)]| {
        let mut v: Vec<(i64, i64)> = w.iter().map(|&(a, b)| (a as i64, b as i64)).collect();
        v.sort();
        v
    };
    let mismatched = sorted(&w1).iter().zip(sorted(&w2).iter()).filter(|(a, b)| a != b).count();
    push(String::from("weight_multiset"), 0.0, mismatched as f64);

    let words = |g: &GeneratorSet| -> Result<[SparseMatrix; 3]> {
        Ok([
            g.xp1.mul(&g.xm1)?,
            g.xp2.mul(&g.xm2)?,
            g.xp1.mul(&g.xp2)?.mul(&g.xm2)?.mul(&g.xm1)?,
        ])
    };
    let (ws1, ws2) = (words(g1)?, words(g2)?);
    for (idx, name) in ["x1", "x2", "x12"].iter().enumerate() {
        let (a, b) = (trace_powers(&ws1[idx], 3)?, trace_powers(&ws2[idx], 3)?);
        for n in 0..3 {
            push(format!("trace_{name}^{}", n + 1), a[n], b[n]);
        }
    }
    for (name, x1, x2) in [("xm1", &g1.xm1, &g2.xm1), ("xm2", &g1.xm2, &g2.xm2)] {
        let (a, b) = (graded_singular_values(x1, &w1), graded_singular_values(x2, &w2));
        if a.len() != b.len() {
            push(format!("singular_{name}_count"), a.len() as f64, b.len() as f64);
            continue;
        }
        let worst = a.iter().zip(&b).fold((0.0f64, 0.0, 0.0), |best, (&x, &y)| {
            let d = libm::fabs(x - y) / 1f64.max(x).max(y);
            if d > best.0 {
                (d, x, y)
            } else {
                best
            }
        });
        let (x, y) = if worst.0 > 0.0 { (worst.1, worst.2) } else { (a.first().copied().unwrap_or(0.0), b.first().copied().unwrap_or(0.0)) };
        push(format!("singular_{name}"), x, y);
    }
    Ok(InvariantReport { tolerance: tol, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::verify::verify_generators;

    fn q(t: f64) -> QParam {
        QParam::new(t).unwrap()
    }

    #[test]
    fn gt_counts() {
        assert_eq!(gt_enumerate(RepLabel::new(1, 0)).len(), 3);
        assert_eq!(gt_enumerate(RepLabel::new(1, 1)).len(), 8);
        assert_eq!(gt_enumerate(RepLabel::new(2, 1)).len(), 15);
        assert_eq!(gt_multiplicities(RepLabel::new(1, 1))[&(0, 0)], 2);
        for p in 0..=5 {
            for qq in 0..=5 {
                let l = RepLabel::new(p, qq);
                assert_eq!(gt_enumerate(l).len(), l.dimension());
            }
        }
    }

    #[test]
    fn gt_highest_weight() {
        let pats = gt_enumerate(RepLabel::new(3, 2));
        assert!(pats.iter().any(|pt| pt.weight() == (3, 2)));
        assert!(pats.iter().all(|pt| pt.m12 >= pt.m11 && pt.m11 >= pt.m22));
    }

    #[test]
    fn pbw_fundamental() {
        let g = pbw_construct(RepLabel::new(1, 0), q(0.0)).unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.xm1.nnz(), 1);
        assert!((libm::fabs(g.xm1.entries()[0].2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pbw_satisfies_relations() {
        for (p, qq, t) in [(1, 1, 0.5), (2, 1, 0.0), (2, 2, 1.0), (1, 3, 0.3)] {
            let g = pbw_construct(RepLabel::new(p, qq), q(t)).unwrap();
            assert_eq!(g.dim(), RepLabel::new(p, qq).dimension());
            let rep = verify_generators(&g, 1e-9);
            assert!(rep.passed(), "({p},{qq}) t={t}\n{rep}");
        }
    }

    #[test]
    fn pbw_cap() {
        assert!(matches!(pbw_construct(RepLabel::new(9, 9), q(0.0)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn self_comparison_is_exact() {
        let g = assemble(RepLabel::new(2, 1), q(0.3)).unwrap();
        let rep = invariant_compare(&g, &g, 1e-9).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.max_deviation(), 0.0);
    }

    #[test]
    fn assembly_matches_oracle() {
        for (p, qq, t) in [(1, 1, 0.0), (2, 1, 0.3), (3, 1, 1.0)] {
            let a = assemble(RepLabel::new(p, qq), q(t)).unwrap();
            let b = pbw_construct(RepLabel::new(p, qq), q(t)).unwrap();
            let rep = invariant_compare(&a, &b, 1e-9).unwrap();
            assert!(rep.passed(), "({p},{qq}) t={t}\n{rep}");
        }
    }

    #[test]
    fn continuity_towards_classical() {
        let a = assemble(RepLabel::new(2, 1), q(1e-4)).unwrap();
        let b = pbw_construct(RepLabel::new(2, 1), QParam::CLASSICAL).unwrap();
        assert!(invariant_compare(&a, &b, 1e-3).unwrap().passed());
        assert!(!invariant_compare(&a, &b, 1e-12).unwrap().passed());
    }

    #[test]
    fn different_deformations_are_told_apart() {
        let a = assemble(RepLabel::new(2, 1), q(0.3)).unwrap();
        let b = pbw_construct(RepLabel::new(2, 1), q(0.31)).unwrap();
        assert!(!invariant_compare(&a, &b, 1e-9).unwrap().passed());
        let c = pbw_construct(RepLabel::new(1, 0), q(0.3)).unwrap();
        assert!(invariant_compare(&a, &c, 1e-9).is_err());
    }
}
