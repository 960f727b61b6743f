//! Checking hand-written forcing chains.
//!
//! A case fixes colors on the base points and lists chain points
//! `s1 … sm`. Each `sk` with `k < m` must be forced by a triple whose other
//! two members are already colored alike, drawing only on seeded points and
//! `s1 … s(k-1)`. The last point must be forced both ways. Only Ell3, Eq1 and
//! Eq2 triples count as forcing here.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::coloring::{Color, Reason};
use crate::constraint::{Constraint, ConstraintKind, KindSet};
use crate::datasets::{bundled, mirror_label, CaseSpec, DatasetError, PointSetFile, Variant, DATASET_NAMES};
use crate::geometry::{enumerate_constraints, GeometryError};
use crate::solver::certificate::{replay, CertEvent, DerivationCertificate, Outcome, ReplayError};
use crate::solver::{normalize_seed, solve, Conflict, SolveError, Verdict};

/// Labels whose colors the case split ranges over.
pub const SPLIT_LABELS: [&str; 6] = ["q1", "q2", "q3", "q3'", "q4", "q5"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    /// 1-based position in the chain.
    pub k: usize,
    pub label: String,
    pub point: usize,
    pub color: Color,
    pub constraint: usize,
    pub kind: ConstraintKind,
    pub witnesses: Vec<String>,
    /// Every constraint that forces this step, ascending.
    pub candidates: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contradiction {
    pub label: String,
    pub point: usize,
    pub red_by: usize,
    pub red_kind: ConstraintKind,
    pub red_witnesses: Vec<String>,
    pub blue_by: usize,
    pub blue_kind: ConstraintKind,
    pub blue_witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainVerdict {
    pub case: String,
    pub variant: Variant,
    pub seed: Vec<(usize, Color)>,
    /// Seed labels absent from the point set.
    pub unused_seeds: Vec<String>,
    pub steps: Vec<ChainStep>,
    pub contradiction: Contradiction,
    #[serde(skip)]
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProofError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("case {0} has an empty chain")]
    EmptyChain(String),
    #[error("s_{k} ({label}) is not forced; touching constraints:\n{}", diagnostics.join("\n"))]
    StepNotForced { k: usize, label: String, diagnostics: Vec<String> },
    #[error("s_{k} ({label}) is already forced both ways before the end of the chain")]
    PrematureContradiction { k: usize, label: String },
    #[error("final point {label} can still be colored {admits}")]
    NoContradiction { label: String, admits: Color },
    #[error("s_{k} is justified by C#{constraint}, which uses a point not yet colored")]
    OutOfOrderWitness { k: usize, constraint: usize },
    #[error("s_{k}: C#{constraint} does not force {label} {color}")]
    BadJustification { k: usize, label: String, constraint: usize, color: Color },
    #[error("certificate replay failed: {0}")]
    Replay(#[from] ReplayError),
    #[error("no symmetry variant makes case {0} verify")]
    NoVariant(String),
    #[error("colorings not covered by any case: {0:?}")]
    NotExhaustive(Vec<String>),
}

fn pattern(c: &Constraint, colors: &[Option<Color>]) -> String {
    c.members
        .iter()
        .map(|&m| match colors[m] {
            Some(Color::Red) => 'R',
            Some(Color::Blue) => 'B',
            None => '?',
        })
        .collect()
}

fn witness_labels(c: &Constraint, point: usize, labels: &[String]) -> Vec<String> {
    c.members.iter().filter(|&&m| m != point).map(|&m| labels[m].clone()).collect()
}

/// Check a case against its point set using the triple constraints present.
pub fn check_chain(case: &CaseSpec, points: &PointSetFile) -> Result<ChainVerdict, ProofError> {
    let constraints = enumerate_constraints(&points.plane_points(), KindSet::triples())?;
    check_chain_with(case, points, constraints)
}

/// As [`check_chain`] with an explicit constraint list. Centroid entries are
/// dropped and the rest sorted into canonical order, so ids and tie-breaks
/// do not depend on how the list was produced.
pub fn check_chain_with(
    case: &CaseSpec,
    points: &PointSetFile,
    mut constraints: Vec<Constraint>,
) -> Result<ChainVerdict, ProofError> {
    if case.chain.is_empty() {
        return Err(ProofError::EmptyChain(case.name.clone()));
    }
    case.validate(points)?;
    constraints.retain(|c| c.kind != ConstraintKind::Centroid);
    constraints.sort();
    constraints.dedup();

    let n = points.len();
    let labels = points.display_labels();
    let (seed, unused_seeds) = case.resolve_seed(points);
    let seed = normalize_seed(n, &seed)?;
    let mut colors: Vec<Option<Color>> = vec![None; n];
    for &(p, c) in &seed {
        colors[p] = Some(c);
    }
    if let Some(id) = constraints.iter().position(|c| {
        c.members.iter().all(|&m| colors[m].is_some())
            && !c.holds(&c.members.iter().map(|&m| colors[m].unwrap()).collect::<Vec<_>>())
    }) {
        return Err(SolveError::SeedConflict { constraint: id }.into());
    }
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, c) in constraints.iter().enumerate() {
        for &m in &c.members {
            occurs[m].push(id);
        }
    }

    let mut steps = Vec::new();
    let m = case.chain.len();
    for (i, label) in case.chain.iter().enumerate() {
        let k = i + 1;
        let point = points.index_of(label).expect("validated");
        let mut red = Vec::new();
        let mut blue = Vec::new();
        for &id in &occurs[point] {
            match constraints[id].forced_color_of(point, &colors) {
                Some(Color::Red) => red.push(id),
                Some(Color::Blue) => blue.push(id),
                None => {}
            }
        }
        if k == m && !(red.is_empty() && blue.is_empty()) {
            return match (red.first(), blue.first()) {
                (Some(&r), Some(&b)) => {
                    let contradiction = Contradiction {
                        label: label.clone(),
                        point,
                        red_by: r,
                        red_kind: constraints[r].kind,
                        red_witnesses: witness_labels(&constraints[r], point, &labels),
                        blue_by: b,
                        blue_kind: constraints[b].kind,
                        blue_witnesses: witness_labels(&constraints[b], point, &labels),
                    };
                    Ok(ChainVerdict {
                        case: case.name.clone(),
                        variant: case.variant,
                        seed,
                        unused_seeds,
                        steps,
                        contradiction,
                        constraints,
                    })
                }
                (None, _) => Err(ProofError::NoContradiction { label: label.clone(), admits: Color::Red }),
                (_, None) => Err(ProofError::NoContradiction { label: label.clone(), admits: Color::Blue }),
            };
        }
        let (color, candidates) = match (red.is_empty(), blue.is_empty()) {
            (false, true) => (Color::Red, red),
            (true, false) => (Color::Blue, blue),
            (false, false) => return Err(ProofError::PrematureContradiction { k, label: label.clone() }),
            (true, true) => {
                let diagnostics = occurs[point]
                    .iter()
                    .map(|&id| {
                        let c = &constraints[id];
                        let members: Vec<&str> = c.members.iter().map(|&x| labels[x].as_str()).collect();
                        format!("  C#{id} {} {{{}}} {}", c.kind, members.join(", "), pattern(c, &colors))
                    })
                    .collect();
                return Err(ProofError::StepNotForced { k, label: label.clone(), diagnostics });
            }
        };
        let id = candidates[0];
        steps.push(ChainStep {
            k,
            label: label.clone(),
            point,
            color,
            constraint: id,
            kind: constraints[id].kind,
            witnesses: witness_labels(&constraints[id], point, &labels),
            candidates,
        });
        colors[point] = Some(color);
    }
    unreachable!("chain is nonempty")
}

impl ChainVerdict {
    /// Recompute every step from its recorded justification alone.
    pub fn replay(&self) -> Result<(), ProofError> {
        let n = self.constraints.iter().flat_map(|c| c.members.iter()).max().map_or(0, |&m| m + 1);
        let n = n.max(self.contradiction.point + 1);
        let mut colors: Vec<Option<Color>> = vec![None; n];
        for &(p, c) in &self.seed {
            if p < n {
                colors[p] = Some(c);
            }
        }
        let lookup =
            |k: usize, id: usize| self.constraints.get(id).ok_or(ProofError::OutOfOrderWitness { k, constraint: id });
        for s in &self.steps {
            let c = lookup(s.k, s.constraint)?;
            if c.members.iter().any(|&m| m != s.point && colors[m].is_none()) {
                return Err(ProofError::OutOfOrderWitness { k: s.k, constraint: s.constraint });
            }
            if c.kind == ConstraintKind::Centroid || c.forced_color_of(s.point, &colors) != Some(s.color) {
                return Err(ProofError::BadJustification {
                    k: s.k,
                    label: s.label.clone(),
                    constraint: s.constraint,
                    color: s.color,
                });
            }
            colors[s.point] = Some(s.color);
        }
        let k = self.steps.len() + 1;
        let f = &self.contradiction;
        for (id, color) in [(f.red_by, Color::Red), (f.blue_by, Color::Blue)] {
            let c = lookup(k, id)?;
            if c.members.iter().any(|&m| m != f.point && colors[m].is_none()) {
                return Err(ProofError::OutOfOrderWitness { k, constraint: id });
            }
            if c.forced_color_of(f.point, &colors) != Some(color) {
                return Err(ProofError::BadJustification { k, label: f.label.clone(), constraint: id, color });
            }
        }
        Ok(())
    }

    /// The chain as a solver certificate: seeds, one forced step per chain
    /// point, then the double-forced final point.
    pub fn certificate(&self) -> DerivationCertificate {
        let mut events = Vec::new();
        for &(point, color) in &self.seed {
            events.push(CertEvent::Step { n: events.len() + 1, point, color, reason: Reason::Seed });
        }
        for s in &self.steps {
            events.push(CertEvent::Step {
                n: events.len() + 1,
                point: s.point,
                color: s.color,
                reason: Reason::Forced(s.constraint),
            });
        }
        events.push(CertEvent::Conflict(Conflict::DoubleForced {
            point: self.contradiction.point,
            red_by: self.contradiction.red_by,
            blue_by: self.contradiction.blue_by,
        }));
        DerivationCertificate { outcome: Outcome::Unsat, events }
    }

    /// Replay [`ChainVerdict::certificate`] with the generic checker.
    pub fn replay_certificate(&self, num_points: usize) -> Result<(), ProofError> {
        let cert = self.certificate();
        replay(num_points, &self.constraints, &self.seed, &cert.events, Verdict::Unsat)?;
        Ok(())
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "case {} (variant {})", self.case, self.variant.name());
        for s in &self.steps {
            let _ = writeln!(out, "s_{} <- {} via {{{}}} [{}]", s.k, s.color, s.witnesses.join(", "), s.kind);
        }
        let f = &self.contradiction;
        let _ = writeln!(
            out,
            "s_{} <- red via {{{}}} [{}] and blue via {{{}}} [{}]: contradiction at {}",
            self.steps.len() + 1,
            f.red_witnesses.join(", "),
            f.red_kind,
            f.blue_witnesses.join(", "),
            f.blue_kind,
            f.label
        );
        out
    }
}

/// The first variant, in [`Variant::ALL`] order, under which the case
/// verifies.
pub fn resolve_variant(case: &CaseSpec, points: &PointSetFile) -> Result<(Variant, ChainVerdict), ProofError> {
    let constraints = enumerate_constraints(&points.plane_points(), KindSet::triples())?;
    for v in Variant::ALL {
        if let Ok(verdict) = check_chain_with(&case.with_variant(v), points, constraints.clone()) {
            return Ok((v, verdict));
        }
    }
    Err(ProofError::NoVariant(case.name.clone()))
}

/// Colorings of [`SPLIT_LABELS`] that no case refutes, directly or after
/// reflection. Each is written as `label=color` pairs.
pub fn uncovered_colorings(cases: &[CaseSpec]) -> Vec<String> {
    let hypotheses: Vec<HashMap<String, Color>> = cases
        .iter()
        .map(|c| c.effective_seeds().into_iter().filter(|(l, _)| SPLIT_LABELS.contains(&l.as_str())).collect())
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << SPLIT_LABELS.len()) {
        let coloring: HashMap<&str, Color> =
            SPLIT_LABELS.iter().enumerate().map(|(i, &l)| (l, Color::from_bit(mask >> i & 1 == 1))).collect();
        let covered = hypotheses.iter().any(|h| {
            let direct = h.iter().all(|(l, c)| coloring[l.as_str()] == *c);
            let mirrored = h.iter().all(|(l, c)| coloring[mirror_label(l)] == *c);
            direct || mirrored
        });
        if !covered {
            out.push(SPLIT_LABELS.iter().map(|l| format!("{l}={}", coloring[l])).collect::<Vec<_>>().join(" "));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseSummary {
    pub verdict: ChainVerdict,
    /// Search over the same points and seed also finds no coloring.
    pub solver_unsat: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AllCases {
    pub cases: Vec<CaseSummary>,
    pub exhaustive: bool,
}

pub fn check_case(points: &PointSetFile, case: &CaseSpec) -> Result<CaseSummary, ProofError> {
    let verdict = check_chain(case, points)?;
    verdict.replay()?;
    verdict.replay_certificate(points.len())?;
    let cert = solve(points.len(), &verdict.constraints, &verdict.seed)?;
    Ok(CaseSummary { verdict, solver_unsat: cert.verdict() == Verdict::Unsat })
}

/// Check the six bundled cases and that together they cover every coloring
/// of the split points.
pub fn check_all_cases() -> Result<AllCases, ProofError> {
    let mut cases = Vec::new();
    let mut specs = Vec::new();
    for name in DATASET_NAMES.iter().filter(|n| n.starts_with("case")) {
        let (points, case) = bundled(name)?;
        cases.push(check_case(&points, &case)?);
        specs.push(case);
    }
    let missing = uncovered_colorings(&specs);
    if !missing.is_empty() {
        return Err(ProofError::NotExhaustive(missing));
    }
    Ok(AllCases { cases, exhaustive: true })
}

/// Points touched by a verdict's justifications.
pub fn support(verdict: &ChainVerdict) -> BTreeSet<usize> {
    let mut s: BTreeSet<usize> = verdict.seed.iter().map(|&(p, _)| p).collect();
    for st in &verdict.steps {
        s.extend(verdict.constraints[st.constraint].members.iter().copied());
    }
    for id in [verdict.contradiction.red_by, verdict.contradiction.blue_by] {
        s.extend(verdict.constraints[id].members.iter().copied());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::LabeledQuad;

    #[test]
    fn case_lengths() {
        for (name, len) in [("case1", 18), ("case2", 21), ("case3", 14), ("case4", 25), ("case5", 18), ("case6", 19)] {
            let (pts, case) = bundled(name).unwrap();
            let v = check_chain(&case, &pts).unwrap();
            assert_eq!(v.steps.len() + 1, len, "{name}");
            assert_eq!(v.contradiction.label, format!("s{len}"));
            v.replay().unwrap();
            v.replay_certificate(pts.len()).unwrap();
        }
    }

    #[test]
    fn lone_point_is_not_forced() {
        let pts = PointSetFile {
            name: "x".into(),
            points: vec![LabeledQuad { quad: [0, 0, 0, 0], label: Some("s1".into()) }],
        };
        let case = CaseSpec { name: "x".into(), variant: Variant::Identity, seeds: vec![], chain: vec!["s1".into()] };
        assert!(matches!(check_chain(&case, &pts), Err(ProofError::StepNotForced { k: 1, .. })));
    }

    #[test]
    fn truncated_chain_has_no_contradiction() {
        let (pts, mut case) = bundled("case3").unwrap();
        case.chain.pop();
        assert!(matches!(check_chain(&case, &pts), Err(ProofError::NoContradiction { .. })));
    }

    #[test]
    fn mirrored_variants_resolve() {
        for (name, want) in [("case1", Variant::Mirror), ("case2", Variant::Identity), ("case5", Variant::Mirror)] {
            let (pts, case) = bundled(name).unwrap();
            let (v, _) = resolve_variant(&case.with_variant(Variant::Identity), &pts).unwrap();
            assert_eq!(v, want, "{name}");
        }
    }

    #[test]
    fn tampered_verdict_fails_replay() {
        let (pts, case) = bundled("case2").unwrap();
        let v = check_chain(&case, &pts).unwrap();
        let mut bad = v.clone();
        bad.steps[3].color = bad.steps[3].color.opposite();
        assert!(bad.replay().is_err());
        // justify step 1 with a constraint that needs the last step's point
        let mut bad = v.clone();
        let late = bad.contradiction.point;
        let id = bad.constraints.iter().position(|c| c.contains(late)).unwrap();
        bad.steps[0].constraint = id;
        assert!(matches!(
            bad.replay(),
            Err(ProofError::OutOfOrderWitness { k: 1, .. }) | Err(ProofError::BadJustification { .. })
        ));
    }

    #[test]
    fn report_format() {
        let (pts, case) = bundled("case1").unwrap();
        let r = check_chain(&case, &pts).unwrap().report();
        let first = r.lines().nth(1).unwrap();
        assert!(first.starts_with("s_1 <- "), "{first}");
        assert!(first.contains(" via {") && first.ends_with(']'));
    }

    #[test]
    fn split_is_exhaustive() {
        let specs: Vec<CaseSpec> = (1..=6).map(|i| bundled(&format!("case{i}")).unwrap().1).collect();
        assert!(uncovered_colorings(&specs).is_empty());
        let missing = uncovered_colorings(&specs[1..]);
        assert!(!missing.is_empty());
    }
}
