//! Bundled point sets and case specifications, with their text formats.
//!
//! Point file: one point per line, four signed integers `a b c d` followed
//! by an optional label; `#` starts a comment. Case file: `seed <label>
//! <red|blue>`, `chain <label>...` (order significant, lines concatenate) and
//! an optional `variant <identity|mirror|swap|mirror-swap>`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::coloring::Color;
use crate::field::{PlanePoint, Quadruple};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("label `{label}` appears twice (lines {first} and {second})")]
    DuplicateLabel { label: String, first: usize, second: usize },
    #[error("point {quad:?} appears twice (lines {first} and {second})")]
    DuplicatePoint { quad: Quadruple, first: usize, second: usize },
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("label `{0}` is not in the point set")]
    UnknownLabel(String),
    #[error("label `{0}` is both seeded and in the chain")]
    SeedInChain(String),
    #[error("label `{0}` is seeded twice")]
    DuplicateSeed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledQuad {
    pub quad: Quadruple,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointSetFile {
    pub name: String,
    pub points: Vec<LabeledQuad>,
}

impl PointSetFile {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn plane_points(&self) -> Vec<PlanePoint> {
        self.points.iter().map(|p| PlanePoint::from_quadruple(p.quad)).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p.label.as_deref() == Some(label))
    }

    /// Display names: the label, or `#<index>` for unlabeled points.
    pub fn display_labels(&self) -> Vec<String> {
        self.points.iter().enumerate().map(|(i, p)| p.label.clone().unwrap_or_else(|| format!("#{i}"))).collect()
    }

    /// Canonical text form; bundled files are stored exactly like this.
    pub fn serialize(&self) -> String {
        let mut out = format!("# {}\n", self.name);
        for p in &self.points {
            let [a, b, c, d] = p.quad;
            let _ = write!(out, "{a} {b} {c} {d}");
            if let Some(l) = &p.label {
                let _ = write!(out, " {l}");
            }
            out.push('\n');
        }
        out
    }

    /// The point set restricted to `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PointSetFile {
        PointSetFile {
            name: format!("{}-subset", self.name),
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    /// Reflection across the x-axis, `[a,b,c,d] -> [a,b,-c,-d]`, with base
    /// labels renamed to their mirror partners (see [`mirror_label`]).
    pub fn mirrored(&self) -> PointSetFile {
        PointSetFile {
            name: format!("{}-mirror", self.name),
            points: self
                .points
                .iter()
                .map(|p| LabeledQuad {
                    quad: [p.quad[0], p.quad[1], -p.quad[2], -p.quad[3]],
                    label: p.label.as_deref().map(|l| mirror_label(l).to_string()),
                })
                .collect(),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

pub fn parse_pointset(name: &str, text: &str) -> Result<PointSetFile, DatasetError> {
    let mut points = Vec::new();
    let mut labels: HashMap<String, usize> = HashMap::new();
    let mut quads: HashMap<Quadruple, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 4 || tokens.len() > 5 {
            return Err(DatasetError::Syntax {
                line,
                message: format!("expected four integers and an optional label, got {} tokens", tokens.len()),
            });
        }
        let mut quad = [0i64; 4];
        for (slot, tok) in quad.iter_mut().zip(&tokens[..4]) {
            *slot = tok
                .parse()
                .map_err(|_| DatasetError::Syntax { line, message: format!("`{tok}` is not an integer") })?;
        }
        let label = tokens.get(4).map(|s| s.to_string());
        if let Some(l) = &label {
            if let Some(&first) = labels.get(l) {
                return Err(DatasetError::DuplicateLabel { label: l.clone(), first, second: line });
            }
            labels.insert(l.clone(), line);
        }
        if let Some(&first) = quads.get(&quad) {
            return Err(DatasetError::DuplicatePoint { quad, first, second: line });
        }
        quads.insert(quad, line);
        points.push(LabeledQuad { quad, label });
    }
    Ok(PointSetFile { name: name.to_string(), points })
}

/// Symmetry applied to a case's seed labels before checking it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Identity,
    /// Reflection across the x-axis: p3↔p4, q1↔q2, q3↔q3', q4↔q5.
    Mirror,
    /// Red↔blue on every seed.
    Swap,
    MirrorSwap,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Identity, Variant::Mirror, Variant::Swap, Variant::MirrorSwap];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Identity => "identity",
            Variant::Mirror => "mirror",
            Variant::Swap => "swap",
            Variant::MirrorSwap => "mirror-swap",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn apply(self, label: &str, color: Color) -> (String, Color) {
        let mirror = matches!(self, Variant::Mirror | Variant::MirrorSwap);
        let swap = matches!(self, Variant::Swap | Variant::MirrorSwap);
        let label = if mirror { mirror_label(label) } else { label };
        let color = if swap { color.opposite() } else { color };
        (label.to_string(), color)
    }
}

/// The base configuration is symmetric under reflection across the x-axis;
/// this is the induced relabeling. Other labels map to themselves.
pub fn mirror_label(label: &str) -> &str {
    match label {
        "p3" => "p4",
        "p4" => "p3",
        "q1" => "q2",
        "q2" => "q1",
        "q3" => "q3'",
        "q3'" => "q3",
        "q4" => "q5",
        "q5" => "q4",
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseSpec {
    pub name: String,
    pub variant: Variant,
    /// Seeds in file order, before the variant is applied.
    pub seeds: Vec<(String, Color)>,
    pub chain: Vec<String>,
}

impl CaseSpec {
    pub fn base_points(&self) -> Vec<&str> {
        self.seeds.iter().map(|(l, _)| l.as_str()).collect()
    }

    /// Seeds with the recorded variant applied.
    pub fn effective_seeds(&self) -> Vec<(String, Color)> {
        self.seeds.iter().map(|(l, c)| self.variant.apply(l, *c)).collect()
    }

    pub fn with_variant(&self, variant: Variant) -> CaseSpec {
        CaseSpec { variant, ..self.clone() }
    }

    /// Effective seeds resolved to point indices. Seeds naming labels absent
    /// from `points` do not constrain anything; they are returned separately
    /// so callers can report them.
    pub fn resolve_seed(&self, points: &PointSetFile) -> (Vec<(usize, Color)>, Vec<String>) {
        let mut seed = Vec::new();
        let mut unused = Vec::new();
        for (label, color) in self.effective_seeds() {
            match points.index_of(&label) {
                Some(i) => seed.push((i, color)),
                None => unused.push(label),
            }
        }
        (seed, unused)
    }

    pub fn validate(&self, points: &PointSetFile) -> Result<(), DatasetError> {
        let mut seen = HashMap::new();
        for (l, _) in &self.seeds {
            if seen.insert(l.as_str(), ()).is_some() {
                return Err(DatasetError::DuplicateSeed(l.clone()));
            }
        }
        for l in &self.chain {
            if points.index_of(l).is_none() {
                return Err(DatasetError::UnknownLabel(l.clone()));
            }
            let seeded = self.effective_seeds().iter().any(|(s, _)| s == l) || self.seeds.iter().any(|(s, _)| s == l);
            if seeded {
                return Err(DatasetError::SeedInChain(l.clone()));
            }
        }
        Ok(())
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("# {}\nvariant {}\n", self.name, self.variant.name());
        for (l, c) in &self.seeds {
            let _ = writeln!(out, "seed {l} {c}");
        }
        if !self.chain.is_empty() {
            let _ = writeln!(out, "chain {}", self.chain.join(" "));
        }
        out
    }
}

pub fn parse_case(name: &str, text: &str) -> Result<CaseSpec, DatasetError> {
    let mut case =
        CaseSpec { name: name.to_string(), variant: Variant::Identity, seeds: Vec::new(), chain: Vec::new() };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let syntax = |message: String| DatasetError::Syntax { line, message };
        match tokens.as_slice() {
            [] => {}
            [first, ..] if first.starts_with('#') => {}
            ["seed", label, color] => {
                let color = color.parse::<Color>().map_err(syntax)?;
                case.seeds.push((label.to_string(), color));
            }
            ["chain", labels @ ..] => case.chain.extend(labels.iter().map(|s| s.to_string())),
            ["variant", v] => {
                case.variant = Variant::parse(v).ok_or_else(|| syntax(format!("unknown variant `{v}`")))?;
            }
            _ => return Err(syntax(format!("cannot parse `{}`", raw.trim()))),
        }
    }
    Ok(case)
}

pub const DATASET_NAMES: [&str; 7] = ["fig1", "case1", "case2", "case3", "case4", "case5", "case6"];

/// Raw text of a bundled dataset: `(point file, case file)`.
pub fn bundled_text(name: &str) -> Option<(&'static str, &'static str)> {
    Some(match name {
        "fig1" => (include_str!("../data/fig1.pts"), include_str!("../data/fig1.case")),
        "case1" => (include_str!("../data/case1.pts"), include_str!("../data/case1.case")),
        "case2" => (include_str!("../data/case2.pts"), include_str!("../data/case2.case")),
        "case3" => (include_str!("../data/case3.pts"), include_str!("../data/case3.case")),
        "case4" => (include_str!("../data/case4.pts"), include_str!("../data/case4.case")),
        "case5" => (include_str!("../data/case5.pts"), include_str!("../data/case5.case")),
        "case6" => (include_str!("../data/case6.pts"), include_str!("../data/case6.case")),
        _ => return None,
    })
}

pub fn bundled(name: &str) -> Result<(PointSetFile, CaseSpec), DatasetError> {
    let (pts, case) = bundled_text(name).ok_or_else(|| DatasetError::UnknownDataset(name.to_string()))?;
    let points = parse_pointset(name, pts)?;
    let case = parse_case(name, case)?;
    case.validate(&points)?;
    Ok((points, case))
}

/// The shared coloring of the base unit triangle {p1, p3, p4} and its
/// centroid p2 that every case starts from.
pub fn base_seed() -> Vec<(String, Color)> {
    vec![("p1".into(), Color::Red), ("p2".into(), Color::Red), ("p3".into(), Color::Blue), ("p4".into(), Color::Blue)]
}
