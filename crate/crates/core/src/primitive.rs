//! Primitive matrix elements between neighbouring diagram points.
//!
//! In the working gauge `X-_1` is the canonical `sl2` matrix on every strand
//! of every vertical line (the lambda-blocks), and `X-_2` between vertical
//! lines `s` and `s+1` is a bidiagonal L-block: a source strand of index `P`
//! feeds the target strand of index `P+1` with weight `a` (the "up" channel)
//! and the target strand of index `P-1` with weight `b` (the "down" channel).
//!
//! Strand indices below are 0-based; `i` in the closed forms is 1-based.

use alloc::vec;
use alloc::vec::Vec;

use crate::diagram::{Diagram, DiagramPoint, Region, Strand};
use crate::error::{domain, Error, Result};
use crate::linalg::{self, Dense};
use crate::qnum::{a1_element, bracket_product, norm_bracket, qbinomial, QParam};

/// Source of the L-block coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Fitted from the Cartan-pair relation of the second root, line by line.
    #[default]
    NumericSolver,
    /// General closed forms exactly as printed in the source: left family
    /// with denominators `[p+s+3-2i][p+s+2-2i]` on `a`, right family with
    /// positive `b`.
    PrintedClosedForm,
    /// Closed forms consistent with the explicitly evaluated low-index values
    /// `a_1`, `b_1`, `a_2`, `b_2`: left family with the denominators of `a`
    /// and `b` exchanged, right family with `b <= 0`.
    GramClosedForm,
}

impl Variant {
    pub const ALL: [Variant; 3] =
        [Variant::NumericSolver, Variant::PrintedClosedForm, Variant::GramClosedForm];
    pub const CLOSED_FORMS: [Variant; 2] = [Variant::PrintedClosedForm, Variant::GramClosedForm];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NumericSolver => "numeric_solver",
            Variant::PrintedClosedForm => "closed_form_31",
            Variant::GramClosedForm => "closed_form_4",
        }
    }

    pub fn from_name(name: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == name)
    }
}

impl core::fmt::Display for Variant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Region of the transition `s -> s+1`.
pub fn transition_region(diagram: &Diagram, s: u32) -> Region {
    if s < diagram.label.q {
        Region::Left
    } else {
        Region::Right
    }
}

/// Dense block of a generator between two diagram points.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub from: DiagramPoint,
    pub to: DiagramPoint,
    /// Strand indices labelling the rows (strands at `to`).
    pub row_strands: Vec<u32>,
    /// Strand indices labelling the columns (strands at `from`).
    pub col_strands: Vec<u32>,
    pub entries: Dense,
}

impl Block {
    pub fn rows(&self) -> usize {
        self.entries.rows
    }

    pub fn cols(&self) -> usize {
        self.entries.cols
    }
}

/// L-block coefficients of the transition `s -> s+1`, one pair per source
/// strand of line `s`. A channel whose target strand does not exist has
/// coefficient 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ABCoefficients {
    pub s: u32,
    pub region: Region,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Channel targets of source strand `top` on the next line.
fn channels(next_tops: &[u32], top: u32) -> (Option<usize>, Option<usize>) {
    let up = next_tops.iter().position(|&x| x == top + 1);
    let down = if top == 0 { None } else { next_tops.iter().position(|&x| x == top - 1) };
    (up, down)
}

/// `sqrt(prod [num] / prod [den])`; zero when a numerator argument is
/// nonpositive, `None` when instead a denominator argument is.
fn bracket_ratio_sqrt(num: &[i64], den: &[i64], t: QParam) -> Option<f64> {
    if num.iter().any(|&x| x <= 0) {
        return Some(0.0);
    }
    if den.iter().any(|&x| x <= 0) {
        return None;
    }
    let n: f64 = num.iter().map(|&x| norm_bracket(x, t)).product();
    let d: f64 = den.iter().map(|&x| norm_bracket(x, t)).product();
    Some(libm::sqrt(n / d))
}

/// Left-family `(a_i, b_i)` for 1-based strand `i` of the transition `s`.
fn left_pair(printed: bool, p: i64, q: i64, s: i64, i: i64, t: QParam) -> Option<(f64, f64)> {
    let (da, db) = if printed {
        ([p + s + 3 - 2 * i, p + s + 2 - 2 * i], [p + s + 3 - 2 * i, p + s + 4 - 2 * i])
    } else {
        ([p + s + 3 - 2 * i, p + s + 4 - 2 * i], [p + s + 2 - 2 * i, p + s + 3 - 2 * i])
    };
    let a = bracket_ratio_sqrt(&[s + 2 - i, q - s + i - 1, p + s + 3 - i], &da, t)?;
    let b = bracket_ratio_sqrt(&[i, p + q + 2 - i, p + 1 - i], &db, t)?;
    Some((a, -b))
}

/// Right-family `(a_i, b_i)`.
fn right_pair(printed: bool, p: i64, q: i64, s: i64, i: i64, t: QParam) -> Option<(f64, f64)> {
    let r = p + 2 * q - s;
    let a = bracket_ratio_sqrt(&[i - 1, p + q + 3 - i, q + 2 - i], &[r + 3 - 2 * i, r + 4 - 2 * i], t)?;
    let b = bracket_ratio_sqrt(&[s - q + i, r + 2 - i, p + q - s + 1 - i], &[r + 3 - 2 * i, r + 2 - 2 * i], t)?;
    Some((a, if printed { b } else { -b }))
}

fn closed_form_pair(variant: Variant, p: i64, q: i64, s: i64, i: i64, t: QParam) -> Option<(f64, f64)> {
    let printed = variant == Variant::PrintedClosedForm;
    if s < q {
        left_pair(printed, p, q, s, i, t)
    } else {
        right_pair(printed, p, q, s, i, t)
    }
}

/// Closed-form coefficients of the transition `s -> s+1`.
pub fn ab_closed_form(diagram: &Diagram, s: u32, variant: Variant, t: QParam) -> Result<ABCoefficients> {
    if variant == Variant::NumericSolver {
        return Err(domain("numeric solver has no closed form"));
    }
    let label = diagram.label;
    if s + 1 >= diagram.num_lines() {
        return Err(domain(alloc::format!("no transition out of line s={s}")));
    }
    let tops = diagram.line_strands(s);
    let next: Vec<u32> = diagram.line_strands(s + 1).iter().map(|st| st.top).collect();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for st in &tops {
        let i = st.index as usize;
        let (up, down) = channels(&next, st.top);
        let (ai, bi) = closed_form_pair(variant, label.p as i64, label.q as i64, s as i64, i as i64 + 1, t)
            .ok_or(Error::Degenerate { s, i, what: "closed-form denominator vanishes" })?;
        a.push(if up.is_some() { ai } else { 0.0 });
        b.push(if down.is_some() { bi } else { 0.0 });
    }
    Ok(ABCoefficients { s, region: transition_region(diagram, s), a, b })
}

/// Coefficients for every transition, solved from the diagonal of
/// `[X+_2, X-_2] = [h_2]` one vertical line at a time.
///
/// At a point of line `s` on a strand of index `P` and local depth `j`,
/// the diagonal reads
/// `a^2 [P-j+1] + b^2 [j] - (terms entering from line s-1) = [h_2]`,
/// which is overdetermined in `(a^2, b^2)` over the `P+1` depths; it is
/// solved in the least-squares sense and the fit residual is checked.
/// Signs are fixed to `a >= 0`, `b <= 0`.
pub fn solve_all_numeric(diagram: &Diagram, t: QParam) -> Result<Vec<ABCoefficients>> {
    let q = diagram.label.q as i64;
    let lines = diagram.num_lines();
    let mut out: Vec<ABCoefficients> = Vec::with_capacity(lines as usize);
    let mut prev_tops: Vec<u32> = Vec::new();
    for s in 0..lines.saturating_sub(1) {
        let tops: Vec<u32> = diagram.line_strands(s).iter().map(|st| st.top).collect();
        let next: Vec<u32> = diagram.line_strands(s + 1).iter().map(|st| st.top).collect();
        let k_top = diagram.line_top(s) as i64;
        let (mut a, mut b) = (Vec::with_capacity(tops.len()), Vec::with_capacity(tops.len()));
        for (i, &top) in tops.iter().enumerate() {
            let (up, down) = channels(&next, top);
            let mut rows = Vec::with_capacity(top as usize + 1);
            for j in 0..=top as i64 {
                let k = k_top + i as i64 + j;
                let mut rhs = norm_bracket(q + k - 2 * s as i64, t);
                if let Some(prev) = out.last() {
                    for (c, &pc) in prev_tops.iter().enumerate() {
                        if pc + 1 == top {
                            rhs += prev.a[c] * prev.a[c] * norm_bracket(top as i64 - j, t);
                        }
                        if pc == top + 1 {
                            rhs += prev.b[c] * prev.b[c] * norm_bracket(j + 1, t);
                        }
                    }
                }
                let cu = if up.is_some() { norm_bracket(top as i64 - j + 1, t) } else { 0.0 };
                let cd = if down.is_some() { norm_bracket(j, t) } else { 0.0 };
                rows.push((cu, cd, rhs));
            }
            let (x, y) = least_squares_2(&rows).ok_or(Error::Degenerate { s, i, what: "singular fit" })?;
            let scale = rows.iter().fold(1.0f64, |m, r| m.max(libm::fabs(r.2)));
            let resid = rows.iter().fold(0.0f64, |m, r| m.max(libm::fabs(r.0 * x + r.1 * y - r.2)));
            if resid > 1e-8 * scale {
                return Err(Error::Degenerate { s, i, what: "inconsistent fit" });
            }
            a.push(libm::sqrt(x.max(0.0)));
            b.push(-libm::sqrt(y.max(0.0)));
        }
        out.push(ABCoefficients { s, region: transition_region(diagram, s), a, b });
        prev_tops = tops;
    }
    Ok(out)
}

/// Least squares for `c0 x + c1 y = r`; a column that is identically zero
/// pins its unknown to 0.
fn least_squares_2(rows: &[(f64, f64, f64)]) -> Option<(f64, f64)> {
    let (mut s00, mut s01, mut s11, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(c0, c1, r) in rows {
        s00 += c0 * c0;
        s01 += c0 * c1;
        s11 += c1 * c1;
        r0 += c0 * r;
        r1 += c1 * r;
    }
    match (s00 > 0.0, s11 > 0.0) {
        (false, false) => Some((0.0, 0.0)),
        (true, false) => Some((r0 / s00, 0.0)),
        (false, true) => Some((0.0, r1 / s11)),
        (true, true) => {
            let det = s00 * s11 - s01 * s01;
            if libm::fabs(det) <= 1e-14 * s00 * s11 {
                return None;
            }
            Some(((r0 * s11 - r1 * s01) / det, (s00 * r1 - s01 * r0) / det))
        }
    }
}

/// Coefficients of the one transition `s -> s+1` from the numeric solver.
pub fn solve_ab_numeric(diagram: &Diagram, s: u32, t: QParam) -> Result<ABCoefficients> {
    if s + 1 >= diagram.num_lines() {
        return Err(domain(alloc::format!("no transition out of line s={s}")));
    }
    let mut all = solve_all_numeric(diagram, t)?;
    all.truncate(s as usize + 1);
    Ok(all.pop().expect("transition exists"))
}

/// Coefficients of transition `s` in the selected variant.
pub fn ab_coefficients(diagram: &Diagram, s: u32, variant: Variant, t: QParam) -> Result<ABCoefficients> {
    match variant {
        Variant::NumericSolver => solve_ab_numeric(diagram, s, t),
        _ => ab_closed_form(diagram, s, variant, t),
    }
}

/// Left-region coefficients recovered from the boundary columns alone:
/// `a_i` from the first-column propagation identity and then `b_i` from the
/// last-column kernel identity `a_i l_i + b_i l_{i+1} = 0`.
pub fn solve_ab_from_columns(diagram: &Diagram, s: u32, t: QParam) -> Result<ABCoefficients> {
    if s >= diagram.label.q {
        return Err(domain(alloc::format!("column route covers left transitions only, got s={s}")));
    }
    let l = left_l_coefficients(diagram, s as i64, t);
    let m = left_m_coefficients(diagram, s as i64, t);
    let m_prev = left_m_coefficients(diagram, s as i64 - 1, t);
    let root = libm::sqrt(norm_bracket(s as i64 + 1, t));
    let n = s as usize + 1;
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let carried = if i > 0 { b[i - 1] * m_prev[i - 1] } else { 0.0 };
        if m_prev[i] == 0.0 || l[i + 1] == 0.0 {
            return Err(Error::Degenerate { s, i, what: "vanishing boundary coefficient" });
        }
        let ai = (root * m[i] - carried) / m_prev[i];
        a.push(ai);
        b.push(-ai * l[i] / l[i + 1]);
    }
    Ok(ABCoefficients { s, region: Region::Left, a, b })
}

/// Last-column coefficients `l_1..l_{s+2}` of the orthogonal matrices on
/// line `s+1`, left region.
pub fn left_l_coefficients(diagram: &Diagram, s: i64, t: QParam) -> Vec<f64> {
    let (p, q) = (diagram.label.p as i64, diagram.label.q as i64);
    if s < 0 {
        return vec![1.0];
    }
    (1..=s + 2)
        .map(|i| {
            let num = qbinomial(s + 1, i - 1, t)
                * bracket_product(q - s, q - s + i - 2, t)
                * bracket_product(p + q - s + 1, p + q + 2 - i, t)
                * norm_bracket(p + s + 4 - 2 * i, t);
            libm::sqrt(num / bracket_product(p + 2 - i, p + s + 3 - i, t))
        })
        .collect()
}

/// First-column coefficients `m_1..m_{s+2}`, alternating in sign; `s = -1`
/// gives the line-0 column `[1]`.
pub fn left_m_coefficients(diagram: &Diagram, s: i64, t: QParam) -> Vec<f64> {
    let (p, q) = (diagram.label.p as i64, diagram.label.q as i64);
    if s < 0 {
        return vec![1.0];
    }
    (1..=s + 2)
        .map(|i| {
            let num = qbinomial(s + 1, i - 1, t)
                * bracket_product(p + q + 3 - i, p + q + 1, t)
                * bracket_product(q - s + i - 1, q, t)
                * norm_bracket(p + s + 4 - 2 * i, t);
            let mag = libm::sqrt(num / bracket_product(p + 2 - i, p + s + 3 - i, t));
            if i % 2 == 0 {
                -mag
            } else {
                mag
            }
        })
        .collect()
}

/// `(l_i / l_{i+1})^2` as predicted by the closed ratio identity.
pub fn left_l_ratio_sq(diagram: &Diagram, s: i64, i: i64, t: QParam) -> f64 {
    let (p, q) = (diagram.label.p as i64, diagram.label.q as i64);
    let br = |j| norm_bracket(j, t);
    br(i) * br(p + q + 2 - i) * br(p + 1 - i) * br(p + s + 4 - 2 * i)
        / (br(p + s + 2 - 2 * i) * br(p + s + 3 - i) * br(s + 2 - i) * br(q - s + i - 1))
}

/// `(m_i / m_{i+1})^2` by the same identity with `[q-s+i-1]` and
/// `[p+q+2-i]` exchanged.
pub fn left_m_ratio_sq(diagram: &Diagram, s: i64, i: i64, t: QParam) -> f64 {
    let (p, q) = (diagram.label.p as i64, diagram.label.q as i64);
    let br = |j| norm_bracket(j, t);
    br(i) * br(q - s + i - 1) * br(p + 1 - i) * br(p + s + 4 - 2 * i)
        / (br(p + s + 2 - 2 * i) * br(p + s + 3 - i) * br(s + 2 - i) * br(p + q + 2 - i))
}

/// Magnitude of the leading first-column entry at a right-region point
/// `(k, s)`, `q <= s <= p`, `s <= k <= p`; `None` outside that domain.
pub fn right_first_column_lead(diagram: &Diagram, k: u32, s: u32, t: QParam) -> Option<f64> {
    let (p, q) = (diagram.label.p as i64, diagram.label.q as i64);
    let (k, s) = (k as i64, s as i64);
    if !(q <= s && s <= p && s <= k && k <= p) {
        return None;
    }
    let m1_sq = bracket_product(s - q + 1, s, t) / bracket_product(p + q - s + 1, p + 2 * q - s, t);
    let kf = bracket_product(p - k + 1, p + q - k, t) / bracket_product(k + 1, q + k, t);
    Some(libm::sqrt(m1_sq * kf))
}

/// First and last columns of the orthogonal matrix at one point, in the
/// strand basis of the vertical line.
///
/// The first column is the image of the top of the slanting line through the
/// point; the last column spans the vectors at the point killed by `X+_2`
/// (the start of a new slanting strand), when that space is one-dimensional.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryColumns {
    pub k: u32,
    pub s: u32,
    /// Empty when the columns were computed numerically.
    pub l: Vec<f64>,
    pub m: Vec<f64>,
    pub first: Vec<f64>,
    pub last: Option<Vec<f64>>,
    pub closed_form: bool,
}

/// The per-representation table of primitive elements for one variant.
#[derive(Debug, Clone)]
pub struct Primitives {
    pub diagram: Diagram,
    pub t: QParam,
    pub variant: Variant,
    coeffs: Vec<ABCoefficients>,
}

impl Primitives {
    pub fn new(diagram: Diagram, variant: Variant, t: QParam) -> Result<Self> {
        let coeffs = match variant {
            Variant::NumericSolver => solve_all_numeric(&diagram, t)?,
            _ => (0..diagram.num_lines().saturating_sub(1))
                .map(|s| ab_closed_form(&diagram, s, variant, t))
                .collect::<Result<_>>()?,
        };
        Ok(Primitives { diagram, t, variant, coeffs })
    }

    /// Uses the given coefficients verbatim.
    pub fn with_coefficients(diagram: Diagram, t: QParam, coeffs: Vec<ABCoefficients>) -> Result<Self> {
        if coeffs.len() + 1 != diagram.num_lines() as usize {
            return Err(domain("coefficient table does not match the diagram"));
        }
        Ok(Primitives { diagram, t, variant: Variant::NumericSolver, coeffs })
    }

    pub fn coefficients(&self, s: u32) -> Result<&ABCoefficients> {
        self.coeffs
            .get(s as usize)
            .ok_or_else(|| domain(alloc::format!("no transition out of line s={s}")))
    }

    pub fn all_coefficients(&self) -> &[ABCoefficients] {
        &self.coeffs
    }

    fn point(&self, k: u32, s: u32) -> Result<DiagramPoint> {
        self.diagram
            .point(k, s)
            .copied()
            .ok_or_else(|| domain(alloc::format!("point (k={k}, s={s}) not in diagram")))
    }

    /// `X-_1` from `(k, s)` to `(k+1, s)`.
    pub fn lambda_block(&self, k: u32, s: u32) -> Result<Block> {
        let from = self.point(k, s)?;
        let to = self.point(k + 1, s)?;
        let cols = self.diagram.strands_at(k, s);
        let rows = self.diagram.strands_at(k + 1, s);
        let depth = k - self.diagram.line_top(s);
        let mut entries = Dense::zeros(rows.len(), cols.len());
        for (c, st) in cols.iter().enumerate() {
            if let Some(r) = rows.iter().position(|x| x.index == st.index) {
                entries[(r, c)] = a1_element(st.top, st.local_depth(depth), self.t)?;
            }
        }
        Ok(Block { from, to, row_strands: indices(&rows), col_strands: indices(&cols), entries })
    }

    /// Nonzero L-block entries of the column of source strand `st` at
    /// `(k, s)`: `(target strand index, value)`.
    fn l_column(&self, k: u32, s: u32, st: &Strand) -> Result<Vec<(u32, f64)>> {
        let co = self.coefficients(s)?;
        let targets = self.diagram.strands_at(k, s + 1);
        let j = st.local_depth(k - self.diagram.line_top(s)) as i64;
        let i = st.index as usize;
        let top = st.top as i64;
        let mut out = Vec::with_capacity(2);
        if let Some(tg) = targets.iter().find(|x| x.top as i64 == top + 1) {
            out.push((tg.index, co.a[i] * libm::sqrt(norm_bracket(top - j + 1, self.t))));
        }
        if let Some(tg) = targets.iter().find(|x| x.top as i64 == top - 1) {
            out.push((tg.index, co.b[i] * libm::sqrt(norm_bracket(j, self.t))));
        }
        Ok(out)
    }

    /// `X-_2` from `(k, s)` to `(k, s+1)`.
    pub fn l_block(&self, k: u32, s: u32) -> Result<Block> {
        let from = self.point(k, s)?;
        let to = self.point(k, s + 1)?;
        let cols = self.diagram.strands_at(k, s);
        let rows = self.diagram.strands_at(k, s + 1);
        let mut entries = Dense::zeros(rows.len(), cols.len());
        for (c, st) in cols.iter().enumerate() {
            for (target, v) in self.l_column(k, s, st)? {
                let r = rows.iter().position(|x| x.index == target).expect("target strand present");
                entries[(r, c)] = v;
            }
        }
        Ok(Block { from, to, row_strands: indices(&rows), col_strands: indices(&cols), entries })
    }

    /// `L^T L` at `(k, s)` from entry formulas, without forming the L-block.
    /// In the left region the entries are written in the explicit bracket
    /// arguments `a_i^2 [p+s-k+2-i] + b_i^2 [k+1-i]` and
    /// `b_i a_{i+1} sqrt([k+1-i][p+s-k+1-i])`. Zero when `(k, s+1)` is not
    /// in the diagram.
    pub fn gram_block(&self, k: u32, s: u32) -> Result<Block> {
        let from = self.point(k, s)?;
        let cols = self.diagram.strands_at(k, s);
        let n = cols.len();
        let mut entries = Dense::zeros(n, n);
        if self.diagram.contains(k, s + 1) {
            if transition_region(&self.diagram, s) == Region::Left {
                let co = self.coefficients(s)?;
                let (p, kk, ss) = (self.diagram.label.p as i64, k as i64, s as i64);
                let br = |j| norm_bracket(j, self.t);
                for c in 0..n {
                    let i0 = cols[c].index as usize;
                    let i = i0 as i64 + 1;
                    let (a, b) = (co.a[i0], co.b[i0]);
                    entries[(c, c)] = a * a * br(p + ss - kk + 2 - i) + b * b * br(kk + 1 - i).max(0.0);
                    if c + 1 < n {
                        let v = b * co.a[i0 + 1] * libm::sqrt(br(kk + 1 - i) * br(p + ss - kk + 1 - i));
                        entries[(c, c + 1)] = v;
                        entries[(c + 1, c)] = v;
                    }
                }
            } else {
                let columns: Vec<_> = cols.iter().map(|st| self.l_column(k, s, st)).collect::<Result<_>>()?;
                for c1 in 0..n {
                    for c2 in 0..n {
                        entries[(c1, c2)] = columns[c1]
                            .iter()
                            .flat_map(|&(r1, v1)| columns[c2].iter().filter(move |e| e.0 == r1).map(move |e| v1 * e.1))
                            .sum();
                    }
                }
            }
        }
        let strands = indices(&cols);
        Ok(Block { from, to: from, row_strands: strands.clone(), col_strands: strands, entries })
    }

    /// Eigenvalues `[e+1][Q-e]` of `X+_2 X-_2` at `(k, s)` predicted by the
    /// slanting-line strands through the point, ascending.
    pub fn q_line_spectrum(&self, k: u32, s: u32) -> Vec<f64> {
        let depth = s - self.diagram.q_line_top(k);
        let mut v: Vec<f64> = self
            .diagram
            .q_strands_at(k, s)
            .iter()
            .map(|st| {
                let e = st.local_depth(depth);
                if e == st.top {
                    0.0
                } else {
                    let x = a1_element(st.top, e, self.t).expect("depth below strand end");
                    x * x
                }
            })
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Boundary columns: closed form in the left region where the point has
    /// full multiplicity `s+1`, numerical otherwise.
    pub fn boundary_columns(&self, k: u32, s: u32) -> Result<BoundaryColumns> {
        let (p, q) = (self.diagram.label.p, self.diagram.label.q);
        self.point(k, s)?;
        if s == 0 {
            return Ok(BoundaryColumns { k, s, l: vec![1.0], m: vec![1.0], first: vec![1.0], last: Some(vec![1.0]), closed_form: true });
        }
        if s <= q && s <= k && k <= p {
            let sp = s as i64 - 1;
            let l = left_l_coefficients(&self.diagram, sp, self.t);
            let m = left_m_coefficients(&self.diagram, sp, self.t);
            let (first, last) = left_columns(&self.diagram, &l, &m, k as i64, sp, self.t);
            return Ok(BoundaryColumns { k, s, l, m, first, last: Some(last), closed_form: true });
        }
        self.numeric_columns(k, s)
    }

    /// Boundary columns from the assembled L-blocks alone.
    pub fn numeric_columns(&self, k: u32, s: u32) -> Result<BoundaryColumns> {
        let s_top = self.diagram.q_line_top(k);
        if self.diagram.mult(k, s_top) != 1 {
            return Err(Error::Degenerate { s, i: 0, what: "slanting line top is degenerate" });
        }
        let mut v = vec![1.0];
        for sp in s_top..s {
            let blk = self.l_block(k, sp)?;
            v = (0..blk.rows()).map(|r| (0..blk.cols()).map(|c| blk.entries[(r, c)] * v[c]).sum()).collect();
        }
        let nv = linalg::norm(&v);
        if nv == 0.0 {
            return Err(Error::Degenerate { s, i: 0, what: "top strand vanishes" });
        }
        let first: Vec<f64> = v.iter().map(|x| x / nv).collect();
        let last = if s == s_top {
            Some(vec![1.0])
        } else {
            let blk = self.l_block(k, s - 1)?;
            let ns = linalg::null_space(&blk.entries.transpose(), 1e-10);
            if ns.len() == 1 {
                let mut x = ns.into_iter().next().expect("one vector");
                let lead = x.iter().copied().find(|y| libm::fabs(*y) > 1e-12).unwrap_or(1.0);
                if lead < 0.0 {
                    x.iter_mut().for_each(|y| *y = -*y);
                }
                Some(x)
            } else {
                None
            }
        };
        Ok(BoundaryColumns { k, s, l: Vec::new(), m: Vec::new(), first, last, closed_form: false })
    }
}

/// Closed-form first and last columns at `(k, s+1)` in the left region.
fn left_columns(diagram: &Diagram, l: &[f64], m: &[f64], k: i64, s: i64, t: QParam) -> (Vec<f64>, Vec<f64>) {
    let (p, q) = (diagram.label.p as i64, diagram.label.q as i64);
    let br = |j| norm_bracket(j, t);
    let prod = |f: &dyn Fn(i64) -> i64, lo: i64, hi: i64| (lo..=hi).map(|r| br(f(r))).product::<f64>();
    let last_den = prod(&|r| q + k - s - r, 0, s);
    let first_den = prod(&|r| q + k - r, 0, s);
    let mut first = Vec::with_capacity(l.len());
    let mut last = Vec::with_capacity(l.len());
    for i in 1..=s + 2 {
        let lf = prod(&|r| p + s - k + 1 - r, 0, i - 2) * prod(&|r| k - r, i - 1, s);
        last.push(l[i as usize - 1] * libm::sqrt(lf / last_den));
        let mf = prod(&|r| k - r, 0, i - 2) * prod(&|r| p - k + s + 1 - r, i - 1, s);
        first.push(m[i as usize - 1] * libm::sqrt(mf / first_den));
    }
    (first, last)
}

fn indices(strands: &[Strand]) -> Vec<u32> {
    strands.iter().map(|st| st.index).collect()
}

/// Largest coefficient difference between `x` and `y` over a transition.
pub fn coefficient_distance(x: &ABCoefficients, y: &ABCoefficients) -> f64 {
    x.a.iter()
        .zip(&y.a)
        .chain(x.b.iter().zip(&y.b))
        .fold(0.0, |m, (u, v)| m.max(libm::fabs(u - v)))
}

/// Agreement of one closed-form family with the numeric solver over one
/// region of the transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyScore {
    pub variant: Variant,
    pub region: Region,
    /// Largest coefficient difference; 0 when no transition was seen.
    pub max_distance: f64,
    /// Number of transitions compared.
    pub transitions: usize,
}

/// Verdict over a sweep of representations and deformations.
#[derive(Debug, Clone, PartialEq)]
pub struct Arbitration {
    pub tolerance: f64,
    pub scores: Vec<FamilyScore>,
}

impl Arbitration {
    /// Closed-form variants that matched everywhere in the region; empty
    /// when the region had no transitions.
    pub fn survivors(&self, region: Region) -> Vec<Variant> {
        self.scores
            .iter()
            .filter(|sc| sc.region == region && sc.transitions > 0 && sc.max_distance <= self.tolerance)
            .map(|sc| sc.variant)
            .collect()
    }

    pub fn score(&self, variant: Variant, region: Region) -> Option<&FamilyScore> {
        self.scores.iter().find(|sc| sc.variant == variant && sc.region == region)
    }

    /// Exactly one survivor in each region.
    pub fn decided(&self) -> bool {
        [Region::Left, Region::Right].iter().all(|&r| self.survivors(r).len() == 1)
    }
}

/// Scores both closed-form families against the numeric solver for every
/// label and deformation given. The comparison covers all channels with a
/// target strand; a family whose denominator vanishes scores infinity.
pub fn arbitrate(labels: &[crate::diagram::RepLabel], ts: &[QParam], tol: f64) -> Result<Arbitration> {
    let mut scores: Vec<FamilyScore> = Vec::new();
    for v in Variant::CLOSED_FORMS {
        for region in [Region::Left, Region::Right] {
            scores.push(FamilyScore { variant: v, region, max_distance: 0.0, transitions: 0 });
        }
    }
    for &label in labels {
        let d = crate::diagram::build_diagram(label);
        for &t in ts {
            let numeric = solve_all_numeric(&d, t)?;
            for num in &numeric {
                for sc in scores.iter_mut().filter(|sc| sc.region == num.region) {
                    let dist = match ab_closed_form(&d, num.s, sc.variant, t) {
                        Ok(cf) => coefficient_distance(&cf, num),
                        Err(_) => f64::INFINITY,
                    };
                    sc.max_distance = sc.max_distance.max(dist);
                    sc.transitions += 1;
                }
            }
        }
    }
    Ok(Arbitration { tolerance: tol, scores })
}
