//! Hexagonal weight diagram of the `(p, q)` representation.
//!
//! Coordinates are root-lattice step counts from the highest weight: a point
//! `(k, s)` has weight `(p, q) - k*alpha_1 - s*alpha_2`, i.e.
//! `h1 = p - 2k + s`, `h2 = q + k - 2s`. Vertical lines ("p-lines") have fixed
//! `s` and are strings of the first `sl2`; slanting lines ("q-lines") have
//! fixed `k`. Internally `q <= p`; a label with `q > p` is built as `(q, p)`
//! and the swap is recorded.

use alloc::vec::Vec;

use crate::error::{domain, Result};

/// Highest weight `(p, q)`: `h1 = p`, `h2 = q` on the highest vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepLabel {
    pub p: u32,
    pub q: u32,
}

impl RepLabel {
    pub fn new(p: u32, q: u32) -> Self {
        RepLabel { p, q }
    }

    /// `(p+1)(q+1)(p+q+2)/2`.
    pub fn dimension(self) -> usize {
        let (p, q) = (self.p as usize, self.q as usize);
        (p + 1) * (q + 1) * (p + q + 2) / 2
    }

    /// The equivalent label with `q <= p`, and whether a swap happened.
    pub fn normalized(self) -> (RepLabel, bool) {
        if self.q > self.p {
            (RepLabel::new(self.q, self.p), true)
        } else {
            (self, false)
        }
    }

    pub fn swapped(self) -> RepLabel {
        RepLabel::new(self.q, self.p)
    }

    /// Weight `(h1, h2)` at root coordinates `(k, s)`.
    pub fn weight(self, k: u32, s: u32) -> (i64, i64) {
        let (p, q, k, s) = (self.p as i64, self.q as i64, k as i64, s as i64);
        (p - 2 * k + s, q + k - 2 * s)
    }

    /// Root coordinates of a weight, if it lies in the root-lattice coset of
    /// the highest weight with nonnegative coordinates.
    pub fn coordinates(self, h1: i64, h2: i64) -> Option<(u32, u32)> {
        let (p, q) = (self.p as i64, self.q as i64);
        let k3 = 2 * p + q - 2 * h1 - h2;
        let s3 = p + 2 * q - h1 - 2 * h2;
        if k3 < 0 || s3 < 0 || k3 % 3 != 0 || s3 % 3 != 0 {
            return None;
        }
        Some(((k3 / 3) as u32, (s3 / 3) as u32))
    }
}

/// Position of a point relative to the vertical through the widest section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Left,
    Seam,
    Right,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Left => "left",
            Region::Seam => "seam",
            Region::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramPoint {
    pub k: u32,
    pub s: u32,
    pub h1: i64,
    pub h2: i64,
    pub mult: u32,
}

/// An irreducible `sl2` string inside one line of the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strand {
    /// 0-based position within the line; strand `i` starts `i` steps below
    /// the top of the line.
    pub index: u32,
    /// `sl2` highest index `P` of the string (it has `P + 1` points).
    pub top: u32,
    pub start_depth: u32,
}

impl Strand {
    pub fn end_depth(&self) -> u32 {
        self.start_depth + self.top
    }

    pub fn covers(&self, depth: u32) -> bool {
        depth >= self.start_depth && depth <= self.end_depth()
    }

    /// Depth counted from the start of this strand.
    pub fn local_depth(&self, line_depth: u32) -> u32 {
        line_depth - self.start_depth
    }
}

/// `sl2` indices of the strands of line `n` for a line family whose own
/// label entry is `own` and whose transverse entry is `other`.
///
/// Derived from the branching of the Gelfand-Tsetlin middle row: line `n`
/// collects middle rows with `m12 + m22 = own + 2*other - n`.
pub fn line_strand_tops(own: u32, other: u32, n: u32) -> Vec<u32> {
    let (a, b, n) = (own as i64, other as i64, n as i64);
    if n > a + b {
        return Vec::new();
    }
    let lo = (b - n).max(0);
    let hi = b.min(a + b - n);
    (lo..=hi).map(|m22| (a + 2 * b - n - 2 * m22) as u32).collect()
}

fn make_strands(tops: &[u32]) -> Vec<Strand> {
    tops.iter()
        .enumerate()
        .map(|(i, &top)| Strand { index: i as u32, top, start_depth: i as u32 })
        .collect()
}

/// Weight diagram of a representation, in normalized (`q <= p`) coordinates.
#[derive(Debug, Clone)]
pub struct Diagram {
    /// Normalized label.
    pub label: RepLabel,
    /// Label as requested by the caller.
    pub input: RepLabel,
    pub swapped: bool,
    /// Sorted by `(s, k)`.
    pub points: Vec<DiagramPoint>,
    /// Per vertical line `s`, indices into `points` ordered by `k`.
    pub p_lines: Vec<Vec<usize>>,
    /// Per slanting line `k`, indices into `points` ordered by `s`.
    pub q_lines: Vec<Vec<usize>>,
}

/// Builds the diagram from the vertical-line strand decomposition and
/// cross-checks every multiplicity against the layered-hexagon rule.
pub fn build_diagram(input: RepLabel) -> Diagram {
    let (label, swapped) = input.normalized();
    let (p, q) = (label.p, label.q);
    let mut points = Vec::with_capacity(label.dimension());
    let mut p_lines = Vec::with_capacity((p + q + 1) as usize);
    for s in 0..=p + q {
        let strands = make_strands(&line_strand_tops(p, q, s));
        let k_top = s.saturating_sub(q);
        let len = strands[0].top + 1;
        let mut line = Vec::with_capacity(len as usize);
        for depth in 0..len {
            let k = k_top + depth;
            let mult = strands.iter().filter(|st| st.covers(depth)).count() as u32;
            debug_assert_eq!(Some(mult), layered_multiplicity(label, k, s));
            let (h1, h2) = label.weight(k, s);
            line.push(points.len());
            points.push(DiagramPoint { k, s, h1, h2, mult });
        }
        p_lines.push(line);
    }
    let kmax = points.iter().map(|pt| pt.k).max().unwrap_or(0);
    let mut q_lines = alloc::vec![Vec::new(); kmax as usize + 1];
    for (idx, pt) in points.iter().enumerate() {
        q_lines[pt.k as usize].push(idx);
    }
    for line in &mut q_lines {
        line.sort_by_key(|&i| points[i].s);
    }
    Diagram { label, input, swapped, points, p_lines, q_lines }
}

impl Diagram {
    pub fn point(&self, k: u32, s: u32) -> Option<&DiagramPoint> {
        let line = self.p_lines.get(s as usize)?;
        let first = self.points[*line.first()?].k;
        if k < first {
            return None;
        }
        line.get((k - first) as usize).map(|&i| &self.points[i])
    }

    pub fn contains(&self, k: u32, s: u32) -> bool {
        self.point(k, s).is_some()
    }

    pub fn mult(&self, k: u32, s: u32) -> u32 {
        self.point(k, s).map_or(0, |pt| pt.mult)
    }

    pub fn dimension(&self) -> usize {
        self.points.iter().map(|pt| pt.mult as usize).sum()
    }

    pub fn num_lines(&self) -> u32 {
        self.p_lines.len() as u32
    }

    /// First `k` on vertical line `s`.
    pub fn line_top(&self, s: u32) -> u32 {
        s.saturating_sub(self.label.q)
    }

    /// Vertical-line strands, all of them, in index order.
    pub fn line_strands(&self, s: u32) -> Vec<Strand> {
        make_strands(&line_strand_tops(self.label.p, self.label.q, s))
    }

    /// Strands of vertical line `s` passing through `(k, s)`, in index order.
    pub fn strands_at(&self, k: u32, s: u32) -> Vec<Strand> {
        if !self.contains(k, s) {
            return Vec::new();
        }
        let depth = k - self.line_top(s);
        self.line_strands(s).into_iter().filter(|st| st.covers(depth)).collect()
    }

    /// Strands of slanting line `k` (the `sl2` of the second root).
    pub fn q_line_strands(&self, k: u32) -> Vec<Strand> {
        make_strands(&line_strand_tops(self.label.q, self.label.p, k))
    }

    /// First `s` on slanting line `k`.
    pub fn q_line_top(&self, k: u32) -> u32 {
        k.saturating_sub(self.label.p)
    }

    /// Slanting-line strands through `(k, s)`.
    pub fn q_strands_at(&self, k: u32, s: u32) -> Vec<Strand> {
        if !self.contains(k, s) {
            return Vec::new();
        }
        let depth = s - self.q_line_top(k);
        self.q_line_strands(k).into_iter().filter(|st| st.covers(depth)).collect()
    }

    pub fn region(&self, s: u32) -> Region {
        use core::cmp::Ordering::*;
        match s.cmp(&self.label.q) {
            Less => Region::Left,
            Equal => Region::Seam,
            Greater => Region::Right,
        }
    }

    /// Point transported to the caller's labelling: when the label was
    /// swapped, the two roots exchange roles.
    pub fn user_point(&self, pt: &DiagramPoint) -> DiagramPoint {
        if self.swapped {
            DiagramPoint { k: pt.s, s: pt.k, h1: pt.h2, h2: pt.h1, mult: pt.mult }
        } else {
            *pt
        }
    }
}

/// Strand list of vertical line `s`.
pub fn strand_structure(diagram: &Diagram, s: u32) -> Result<Vec<Strand>> {
    if s >= diagram.num_lines() {
        return Err(domain(alloc::format!(
            "line s={s} outside diagram with {} lines",
            diagram.num_lines()
        )));
    }
    Ok(diagram.line_strands(s))
}

/// Weyl-group images: `s1 (h1,h2) = (-h1, h1+h2)`, `s2 (h1,h2) = (h1+h2, -h2)`.
pub fn weyl_orbit(h1: i64, h2: i64) -> [(i64, i64); 6] {
    let s1 = |(a, b): (i64, i64)| (-a, a + b);
    let s2 = |(a, b): (i64, i64)| (a + b, -b);
    let e = (h1, h2);
    [e, s1(e), s2(e), s1(s2(e)), s2(s1(e)), s1(s2(s1(e)))]
}

/// Dominant representative of the Weyl orbit of a weight.
pub fn dominant(h1: i64, h2: i64) -> (i64, i64) {
    weyl_orbit(h1, h2)
        .into_iter()
        .find(|&(a, b)| a >= 0 && b >= 0)
        .unwrap_or((h1, h2))
}

/// Whether `mu` lies in the convex hull of the Weyl orbit of the dominant
/// weight `lambda` (same root-lattice coset assumed).
fn in_hull(lambda: (i64, i64), mu: (i64, i64)) -> bool {
    let (a, b) = dominant(mu.0, mu.1);
    let (d1, d2) = (lambda.0 - a, lambda.1 - b);
    2 * d1 + d2 >= 0 && d1 + 2 * d2 >= 0
}

/// Multiplicity by the layered-hexagon rule: one plus the number of inner
/// hexagons `(p-j, q-j)`, `1 <= j <= min(p,q)`, whose hull contains the point.
/// `None` outside the diagram.
pub fn layered_multiplicity(label: RepLabel, k: u32, s: u32) -> Option<u32> {
    let mu = label.weight(k, s);
    let (p, q) = (label.p as i64, label.q as i64);
    if !in_hull((p, q), mu) {
        return None;
    }
    let shells = (1..=p.min(q)).filter(|&j| in_hull((p - j, q - j), mu)).count();
    Some(1 + shells as u32)
}

/// Multiplicity of `(k, s)` in the representation `label` (coordinates in the
/// label's own root basis).
pub fn multiplicity(label: RepLabel, k: u32, s: u32) -> Result<u32> {
    layered_multiplicity(label, k, s)
        .ok_or_else(|| domain(alloc::format!("point (k={k}, s={s}) not in diagram {label:?}")))
}

/// Total dimension as the sum of multiplicities.
pub fn dimension(label: RepLabel) -> usize {
    build_diagram(label).dimension()
}
