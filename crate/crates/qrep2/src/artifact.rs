//! On-disk forms of a [`GeneratorSet`].
//!
//! JSON: `{label:{p,q}, t, dim, basis:[{k,s,strand,index}],
//! generators:{name:[{row,col,value}]}}`, doubles written in shortest
//! round-trip form.
//!
//! Matrix Market: one `coordinate real general` file per generator named
//! `<stem>.<gen>.mtx`, 1-based indices, with the label and `t` in comment
//! lines so that each file is self-describing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qrep2_core::assembly::{BasisEntry, BasisIndex, GeneratorSet, GENERATOR_NAMES};
use qrep2_core::{QParam, RepLabel, SparseMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON artifact: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("inconsistent artifact: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Core(#[from] qrep2_core::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelJson {
    pub p: u32,
    pub q: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisJson {
    pub k: u32,
    pub s: u32,
    pub strand: u32,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactJson {
    pub label: LabelJson,
    pub t: f64,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub basis: Vec<BasisJson>,
    pub generators: BTreeMap<String, Vec<EntryJson>>,
}

impl ArtifactJson {
    pub fn from_generators(gen: &GeneratorSet, variant: Option<&str>) -> Self {
        let basis = gen
            .basis
            .entries()
            .iter()
            .map(|e| BasisJson { k: e.k, s: e.s, strand: e.strand, index: e.index })
            .collect();
        let generators = gen
            .generators()
            .iter()
            .map(|(name, m)| {
                let entries = m.entries().iter().map(|&(row, col, value)| EntryJson { row, col, value }).collect();
                (name.to_string(), entries)
            })
            .collect();
        ArtifactJson {
            label: LabelJson { p: gen.label.p, q: gen.label.q },
            t: gen.t.t(),
            dim: gen.dim(),
            variant: variant.map(str::to_owned),
            basis,
            generators,
        }
    }

    pub fn to_generators(&self) -> Result<GeneratorSet, ArtifactError> {
        let basis = BasisIndex::from_entries(
            self.basis
                .iter()
                .map(|b| BasisEntry { k: b.k, s: b.s, strand: b.strand, index: b.index })
                .collect(),
        )?;
        if basis.len() != self.dim {
            return Err(ArtifactError::Inconsistent(format!(
                "dim {} but {} basis entries",
                self.dim,
                basis.len()
            )));
        }
        let mut mats = Vec::with_capacity(6);
        for name in GENERATOR_NAMES {
            let entries = self
                .generators
                .get(name)
                .ok_or_else(|| ArtifactError::Inconsistent(format!("generator {name} missing")))?;
            for e in entries {
                if e.row >= self.dim || e.col >= self.dim {
                    return Err(ArtifactError::Inconsistent(format!(
                        "{name} entry ({},{}) outside dimension {}",
                        e.row, e.col, self.dim
                    )));
                }
            }
            mats.push(SparseMatrix::from_triplets(
                self.dim,
                self.dim,
                entries.iter().map(|e| (e.row, e.col, e.value)),
            ));
        }
        let mats: [SparseMatrix; 6] = mats.try_into().expect("six generators");
        let label = RepLabel::new(self.label.p, self.label.q);
        Ok(GeneratorSet::from_parts(label, QParam::new(self.t)?, basis, mats)?)
    }
}

pub fn to_json_string(gen: &GeneratorSet, variant: Option<&str>) -> String {
    serde_json::to_string_pretty(&ArtifactJson::from_generators(gen, variant)).expect("artifact serializes")
}

pub fn from_json_str(text: &str) -> Result<GeneratorSet, ArtifactError> {
    serde_json::from_str::<ArtifactJson>(text)?.to_generators()
}

pub fn write_json(gen: &GeneratorSet, variant: Option<&str>, path: &Path) -> Result<(), ArtifactError> {
    fs::write(path, to_json_string(gen, variant)).map_err(io_err(path))
}

pub fn read_json(path: &Path) -> Result<GeneratorSet, ArtifactError> {
    from_json_str(&fs::read_to_string(path).map_err(io_err(path))?)
}

/// Path of one generator file of a Matrix Market artifact.
pub fn mtx_path(stem: &Path, name: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(format!(".{name}.mtx"));
    PathBuf::from(s)
}

/// Recovers the stem from either the stem itself or one of its files.
pub fn mtx_stem(path: &Path) -> PathBuf {
    let text = path.to_string_lossy();
    for name in GENERATOR_NAMES {
        if let Some(stem) = text.strip_suffix(&format!(".{name}.mtx")) {
            return PathBuf::from(stem);
        }
    }
    path.to_path_buf()
}

pub fn mtx_string(gen: &GeneratorSet, name: &str, m: &SparseMatrix) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "% generator {name}");
    let _ = writeln!(out, "% label {} {}", gen.label.p, gen.label.q);
    let _ = writeln!(out, "% t {:?}", gen.t.t());
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz());
    for &(r, c, v) in m.entries() {
        let _ = writeln!(out, "{} {} {:?}", r + 1, c + 1, v);
    }
    out
}

/// Writes the six files and returns their paths.
pub fn write_mtx(gen: &GeneratorSet, stem: &Path) -> Result<Vec<PathBuf>, ArtifactError> {
    let mut paths = Vec::with_capacity(6);
    for (name, m) in gen.generators() {
        let path = mtx_path(stem, name);
        fs::write(&path, mtx_string(gen, name, m)).map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Debug)]
struct MtxFile {
    label: Option<RepLabel>,
    t: Option<f64>,
    matrix: SparseMatrix,
}

fn parse_mtx(path: &Path, text: &str) -> Result<MtxFile, ArtifactError> {
    let err = |line: usize, msg: &str| ArtifactError::Parse { path: path.to_path_buf(), line, msg: msg.to_owned() };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let fields: Vec<_> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields != ["%%matrixmarket", "matrix", "coordinate", "real", "general"] {
        return Err(err(1, "expected a coordinate real general MatrixMarket header"));
    }
    let (mut label, mut t) = (None, None);
    let mut size = None;
    let mut triplets = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('%') {
            let parts: Vec<_> = comment.split_whitespace().collect();
            match parts.as_slice() {
                ["label", p, q] => {
                    label = Some(RepLabel::new(
                        p.parse().map_err(|_| err(ln, "bad label"))?,
                        q.parse().map_err(|_| err(ln, "bad label"))?,
                    ))
                }
                ["t", v] => t = Some(v.parse().map_err(|_| err(ln, "bad t"))?),
                _ => {}
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parts: Vec<_> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(err(ln, "expected three fields"));
        }
        match size {
            None => {
                let n: Vec<usize> =
                    parts.iter().map(|x| x.parse()).collect::<Result<_, _>>().map_err(|_| err(ln, "bad size line"))?;
                size = Some((n[0], n[1], n[2]));
            }
            Some((rows, cols, _)) => {
                let r: usize = parts[0].parse().map_err(|_| err(ln, "bad row index"))?;
                let c: usize = parts[1].parse().map_err(|_| err(ln, "bad column index"))?;
                let v: f64 = parts[2].parse().map_err(|_| err(ln, "bad value"))?;
                if r == 0 || c == 0 || r > rows || c > cols {
                    return Err(err(ln, "index out of range"));
                }
                triplets.push((r - 1, c - 1, v));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| err(0, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(err(0, "entry count does not match the size line"));
    }
    Ok(MtxFile { label, t, matrix: SparseMatrix::from_triplets(rows, cols, triplets) })
}

/// Loads a Matrix Market artifact and rebuilds the basis from the Cartan
/// diagonals: the weight of each state gives its point, and states of one
/// point are numbered in index order.
pub fn read_mtx(stem: &Path) -> Result<GeneratorSet, ArtifactError> {
    let mut files = Vec::with_capacity(6);
    for name in GENERATOR_NAMES {
        let path = mtx_path(stem, name);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        files.push(parse_mtx(&path, &text)?);
    }
    let label = files[0].label.ok_or_else(|| ArtifactError::Inconsistent("label comment missing".into()))?;
    let t = files[0].t.ok_or_else(|| ArtifactError::Inconsistent("t comment missing".into()))?;
    if files.iter().any(|f| f.label != Some(label) || f.t.map(f64::to_bits) != Some(t.to_bits())) {
        return Err(ArtifactError::Inconsistent("files disagree on label or t".into()));
    }
    let n = files[0].matrix.rows();
    let (d1, d2) = (files[0].matrix.diag(), files[1].matrix.diag());
    let mut seen: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let (k, s) = label
            .coordinates(d1[i] as i64, d2[i] as i64)
            .ok_or_else(|| ArtifactError::Inconsistent(format!("state {i} has a weight outside the root lattice")))?;
        let strand = seen.entry((k, s)).or_insert(0);
        entries.push(BasisEntry { k, s, strand: *strand, index: i });
        *strand += 1;
    }
    let mats: [SparseMatrix; 6] =
        files.into_iter().map(|f| f.matrix).collect::<Vec<_>>().try_into().expect("six generators");
    Ok(GeneratorSet::from_parts(label, QParam::new(t)?, BasisIndex::from_entries(entries)?, mats)?)
}

/// Reads either form, by extension: `.json` is JSON, anything else is a
/// Matrix Market stem or one of its files.
pub fn read_artifact(path: &Path) -> Result<GeneratorSet, ArtifactError> {
    if path.extension().is_some_and(|e| e == "json") {
        read_json(path)
    } else {
        read_mtx(&mtx_stem(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qrep2_core::assemble;

    #[test]
    fn json_round_trip_is_exact() {
        let g = assemble(RepLabel::new(2, 1), QParam::new(0.3).unwrap()).unwrap();
        let back = from_json_str(&to_json_string(&g, Some("numeric_solver"))).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn mtx_text_round_trip() {
        let g = assemble(RepLabel::new(1, 1), QParam::new(0.7).unwrap()).unwrap();
        let text = mtx_string(&g, "xm2", &g.xm2);
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n"));
        let f = parse_mtx(Path::new("x"), &text).unwrap();
        assert_eq!(f.matrix, g.xm2);
        assert_eq!(f.label, Some(g.label));
        assert_eq!(f.t, Some(0.7));
    }

    #[test]
    fn stems() {
        assert_eq!(mtx_stem(Path::new("a/rep.xm1.mtx")), PathBuf::from("a/rep"));
        assert_eq!(mtx_stem(Path::new("a/rep")), PathBuf::from("a/rep"));
        assert_eq!(mtx_path(Path::new("a/rep"), "h1"), PathBuf::from("a/rep.h1.mtx"));
    }

    #[test]
    fn malformed_inputs() {
        assert!(from_json_str("{").is_err());
        assert!(parse_mtx(Path::new("x"), "%%MatrixMarket matrix array real general\n").is_err());
        let bad = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(parse_mtx(Path::new("x"), bad).is_err());
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n";
        assert!(parse_mtx(Path::new("x"), short).is_err());
    }
}
