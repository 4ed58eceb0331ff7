//! Global basis and the six generator matrices.
//!
//! Basis states are `(point, strand)` pairs ordered by `(s, k, strand)` in
//! the normalized (`q <= p`) frame. When the requested label has `q > p` the
//! representation is built for `(q, p)` and the two roots exchange roles on
//! output: basis coordinates `(k, s)` are swapped, `h1 <-> h2`,
//! `X_1 <-> X_2`. The strand number then refers to the slanting lines of the
//! requested frame.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::diagram::{build_diagram, RepLabel};
use crate::error::{domain, Error, Result};
use crate::primitive::{Primitives, Variant};
use crate::qnum::QParam;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisEntry {
    pub k: u32,
    pub s: u32,
    pub strand: u32,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisIndex {
    entries: Vec<BasisEntry>,
    lookup: BTreeMap<(u32, u32, u32), usize>,
}

impl BasisIndex {
    /// Entries must carry indices `0..n` in order.
    pub fn from_entries(entries: Vec<BasisEntry>) -> Result<Self> {
        let mut lookup = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.index != i {
                return Err(domain(alloc::format!("basis entry {i} carries index {}", e.index)));
            }
            if lookup.insert((e.k, e.s, e.strand), i).is_some() {
                return Err(domain(alloc::format!("duplicate basis state (k={}, s={}, strand={})", e.k, e.s, e.strand)));
            }
        }
        Ok(BasisIndex { entries, lookup })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BasisEntry] {
        &self.entries
    }

    pub fn index(&self, k: u32, s: u32, strand: u32) -> Option<usize> {
        self.lookup.get(&(k, s, strand)).copied()
    }

    /// Global indices of all states at one point, by strand.
    pub fn point_indices(&self, k: u32, s: u32) -> Vec<usize> {
        self.lookup.range((k, s, 0)..=(k, s, u32::MAX)).map(|(_, &i)| i).collect()
    }

    fn swapped(&self) -> BasisIndex {
        let entries: Vec<_> = self.entries.iter().map(|e| BasisEntry { k: e.s, s: e.k, ..*e }).collect();
        BasisIndex::from_entries(entries).expect("swap preserves uniqueness")
    }
}

/// Deterministic `(s, k, strand)` enumeration of a diagram.
pub fn enumerate_basis(diagram: &crate::diagram::Diagram) -> BasisIndex {
    let mut entries = Vec::with_capacity(diagram.dimension());
    for pt in &diagram.points {
        for st in diagram.strands_at(pt.k, pt.s) {
            entries.push(BasisEntry { k: pt.k, s: pt.s, strand: st.index, index: entries.len() });
        }
    }
    BasisIndex::from_entries(entries).expect("diagram points are distinct")
}

/// Names of the stored matrices, in canonical order.
pub const GENERATOR_NAMES: [&str; 6] = ["h1", "h2", "xp1", "xm1", "xp2", "xm2"];

/// The representation: Cartan diagonals and the four root generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub label: RepLabel,
    pub t: QParam,
    pub basis: BasisIndex,
    pub h1: SparseMatrix,
    pub h2: SparseMatrix,
    pub xp1: SparseMatrix,
    pub xm1: SparseMatrix,
    pub xp2: SparseMatrix,
    pub xm2: SparseMatrix,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn generator(&self, name: &str) -> Option<&SparseMatrix> {
        Some(match name {
            "h1" => &self.h1,
            "h2" => &self.h2,
            "xp1" => &self.xp1,
            "xm1" => &self.xm1,
            "xp2" => &self.xp2,
            "xm2" => &self.xm2,
            _ => return None,
        })
    }

    fn generator_mut(&mut self, name: &str) -> Option<&mut SparseMatrix> {
        Some(match name {
            "h1" => &mut self.h1,
            "h2" => &mut self.h2,
            "xp1" => &mut self.xp1,
            "xm1" => &mut self.xm1,
            "xp2" => &mut self.xp2,
            "xm2" => &mut self.xm2,
            _ => return None,
        })
    }

    /// Generators in canonical order.
    pub fn generators(&self) -> [(&'static str, &SparseMatrix); 6] {
        [
            ("h1", &self.h1),
            ("h2", &self.h2),
            ("xp1", &self.xp1),
            ("xm1", &self.xm1),
            ("xp2", &self.xp2),
            ("xm2", &self.xm2),
        ]
    }

    /// Builds a set from its parts, checking shapes only.
    pub fn from_parts(label: RepLabel, t: QParam, basis: BasisIndex, mats: [SparseMatrix; 6]) -> Result<Self> {
        let n = basis.len();
        for m in &mats {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch { left: (n, n), right: (m.rows(), m.cols()) });
            }
        }
        let [h1, h2, xp1, xm1, xp2, xm2] = mats;
        Ok(GeneratorSet { label, t, basis, h1, h2, xp1, xm1, xp2, xm2 })
    }

    /// Weights `(h1, h2)` per basis state, read from the Cartan diagonals.
    pub fn weights(&self) -> Vec<(f64, f64)> {
        self.h1.diag().into_iter().zip(self.h2.diag()).collect()
    }

    /// Index of the highest-weight state `(k, s) = (0, 0)`.
    pub fn highest_index(&self) -> Option<usize> {
        self.basis.index(0, 0, 0)
    }

    /// Replaces one entry of a lowering generator by `value` and updates the
    /// raising partner consistently.
    pub fn with_lowering_entry(&self, root: u8, row: usize, col: usize, value: f64) -> Result<Self> {
        let (xm, xp) = match root {
            1 => ("xm1", "xp1"),
            2 => ("xm2", "xp2"),
            _ => return Err(domain(alloc::format!("no root {root}"))),
        };
        let mut out = self.clone();
        let m = out.generator_mut(xm).expect("known name").with_entry(row, col, value);
        *out.generator_mut(xm).expect("known name") = m;
        let m = out.generator_mut(xp).expect("known name").with_entry(col, row, value);
        *out.generator_mut(xp).expect("known name") = m;
        Ok(out)
    }

    /// Replaces a single named matrix entry, leaving all others untouched.
    pub fn with_entry(&self, name: &str, row: usize, col: usize, value: f64) -> Result<Self> {
        let mut out = self.clone();
        let g = out.generator_mut(name).ok_or_else(|| domain(alloc::format!("unknown generator {name}")))?;
        *g = g.with_entry(row, col, value);
        Ok(out)
    }
}

/// `exp(t h_i)` as a diagonal matrix.
pub fn cartan_r(gen: &GeneratorSet, i: u8) -> Result<SparseMatrix> {
    let h = match i {
        1 => &gen.h1,
        2 => &gen.h2,
        _ => return Err(domain(alloc::format!("no Cartan generator h{i}"))),
    };
    let vals: Vec<f64> = h.diag().iter().map(|&x| libm::exp(gen.t.t() * x)).collect();
    Ok(SparseMatrix::diagonal(&vals))
}

/// Representation `(p, q)` at deformation `t` with numerically solved
/// coefficients.
pub fn assemble(label: RepLabel, t: QParam) -> Result<GeneratorSet> {
    assemble_with(label, t, Variant::NumericSolver)
}

pub fn assemble_with(label: RepLabel, t: QParam, variant: Variant) -> Result<GeneratorSet> {
    let prims = Primitives::new(build_diagram(label), variant, t)?;
    Ok(assemble_primitives(&prims))
}

/// Places every lambda-block and L-block of the table into global matrices.
pub fn assemble_primitives(prims: &Primitives) -> GeneratorSet {
    let d = &prims.diagram;
    let basis = enumerate_basis(d);
    let n = basis.len();
    let mut xm1 = Vec::new();
    let mut xm2 = Vec::new();
    let mut h1 = Vec::with_capacity(n);
    let mut h2 = Vec::with_capacity(n);
    for pt in &d.points {
        let here = basis.point_indices(pt.k, pt.s);
        for _ in &here {
            h1.push(pt.h1 as f64);
            h2.push(pt.h2 as f64);
        }
        for (step, out) in [((1u32, 0u32), &mut xm1), ((0, 1), &mut xm2)] {
            let (k2, s2) = (pt.k + step.0, pt.s + step.1);
            if !d.contains(k2, s2) {
                continue;
            }
            let blk = if step.0 == 1 { prims.lambda_block(pt.k, pt.s) } else { prims.l_block(pt.k, pt.s) }
                .expect("both points exist");
            let there = basis.point_indices(k2, s2);
            for r in 0..blk.rows() {
                for c in 0..blk.cols() {
                    let v = blk.entries[(r, c)];
                    if v != 0.0 {
                        out.push((there[r], here[c], v));
                    }
                }
            }
        }
    }
    let xm1 = SparseMatrix::from_triplets(n, n, xm1);
    let xm2 = SparseMatrix::from_triplets(n, n, xm2);
    let gen = GeneratorSet {
        label: d.label,
        t: prims.t,
        basis,
        h1: SparseMatrix::diagonal(&h1),
        h2: SparseMatrix::diagonal(&h2),
        xp1: xm1.transpose(),
        xm1,
        xp2: xm2.transpose(),
        xm2,
    };
    if d.swapped {
        swap_roots(gen)
    } else {
        gen
    }
}

/// Exchanges the roles of the two simple roots.
pub fn swap_roots(gen: GeneratorSet) -> GeneratorSet {
    GeneratorSet {
        label: gen.label.swapped(),
        t: gen.t,
        basis: gen.basis.swapped(),
        h1: gen.h2,
        h2: gen.h1,
        xp1: gen.xp2,
        xm1: gen.xm2,
        xp2: gen.xp1,
        xm2: gen.xm1,
    }
}

/// Block-diagonal direct sum; the basis of `b` is relabelled with strand
/// numbers shifted past those of `a` so that states stay distinct.
pub fn direct_sum(a: &GeneratorSet, b: &GeneratorSet) -> Result<GeneratorSet> {
    let n = a.dim();
    let shift = a.basis.entries().iter().map(|e| e.strand + 1).max().unwrap_or(0);
    let mut entries: Vec<BasisEntry> = a.basis.entries().to_vec();
    entries.extend(b.basis.entries().iter().map(|e| BasisEntry { strand: e.strand + shift, index: e.index + n, ..*e }));
    let basis = BasisIndex::from_entries(entries)?;
    let m = n + b.dim();
    let sum = |x: &SparseMatrix, y: &SparseMatrix| {
        SparseMatrix::from_triplets(
            m,
            m,
            x.entries().iter().copied().chain(y.entries().iter().map(|&(r, c, v)| (r + n, c + n, v))),
        )
    };
    let mats = [
        sum(&a.h1, &b.h1),
        sum(&a.h2, &b.h2),
        sum(&a.xp1, &b.xp1),
        sum(&a.xm1, &b.xm1),
        sum(&a.xp2, &b.xp2),
        sum(&a.xm2, &b.xm2),
    ];
    GeneratorSet::from_parts(a.label, a.t, basis, mats)
}
