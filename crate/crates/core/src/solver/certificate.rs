//! Derivation certificates: serialization, parsing and independent replay.
//!
//! Text form, one event per line:
//!
//! ```text
//! step <n> point <label> <red|blue> <seed|decision|forced:C#id>
//! conflict point <label> forced-red-by C#i forced-blue-by C#j
//! conflict constraint C#i
//! ```
//!
//! `n` is the 1-based position of the step in the current trail, so after a
//! refutation the numbering resumes from the branch point. The search tree
//! is written depth first: a refuted first branch is followed by the second
//! branch on the same point. The last line is `sat`, or the final
//! refutation written with `unsat` in place of `conflict`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use super::{normalize_seed, verify_coloring, Conflict, SolveError, Verdict};
use crate::coloring::{Color, Reason};
use crate::constraint::{Constraint, Implication};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Sat(Vec<Color>),
    Unsat,
}

impl Outcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            Outcome::Sat(_) => Verdict::Sat,
            Outcome::Unsat => Verdict::Unsat,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum CertEvent {
    Step { n: usize, point: usize, color: Color, reason: Reason },
    Conflict(Conflict),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationCertificate {
    pub outcome: Outcome,
    pub events: Vec<CertEvent>,
}

impl DerivationCertificate {
    pub fn verdict(&self) -> Verdict {
        self.outcome.verdict()
    }

    pub fn decisions(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, CertEvent::Step { reason: Reason::Decision, .. })).count()
    }

    pub fn to_text(&self, labels: &[String]) -> String {
        let mut out = String::new();
        let last = self.events.len();
        for (i, ev) in self.events.iter().enumerate() {
            match *ev {
                CertEvent::Step { n, point, color, reason } => {
                    let reason = match reason {
                        Reason::Seed => "seed".to_string(),
                        Reason::Decision => "decision".to_string(),
                        Reason::Forced(id) => format!("forced:C#{id}"),
                    };
                    let _ = writeln!(out, "step {n} point {} {color} {reason}", labels[point]);
                }
                CertEvent::Conflict(c) => {
                    let head = if i + 1 == last && self.outcome == Outcome::Unsat { "unsat" } else { "conflict" };
                    match c {
                        Conflict::DoubleForced { point, red_by, blue_by } => {
                            let _ = writeln!(
                                out,
                                "{head} point {} forced-red-by C#{red_by} forced-blue-by C#{blue_by}",
                                labels[point]
                            );
                        }
                        Conflict::Violated { constraint } => {
                            let _ = writeln!(out, "{head} constraint C#{constraint}");
                        }
                    }
                }
            }
        }
        if let Outcome::Sat(_) = self.outcome {
            out.push_str("sat\n");
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown point label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("certificate has no terminal `sat` or `unsat` line")]
    MissingTerminal,
    #[error("line {line}: content after the terminal line")]
    TrailingContent { line: usize },
}

/// A parsed certificate: events plus the claimed verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedCertificate {
    pub events: Vec<CertEvent>,
    pub claimed: Verdict,
}

fn parse_cid(tok: &str) -> Option<usize> {
    tok.strip_prefix("C#")?.parse().ok()
}

pub fn parse_certificate(text: &str, labels: &[String]) -> Result<ParsedCertificate, CertificateError> {
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut events = Vec::new();
    let mut claimed = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if claimed.is_some() {
            return Err(CertificateError::TrailingContent { line });
        }
        let syntax = |message: &str| CertificateError::Syntax { line, message: message.to_string() };
        let point_of = |label: &str| {
            index.get(label).copied().ok_or_else(|| CertificateError::UnknownLabel { line, label: label.to_string() })
        };
        match tokens.as_slice() {
            ["step", n, "point", label, color, reason] => {
                let n = n.parse().map_err(|_| syntax("bad step number"))?;
                let color = color.parse().map_err(|_| syntax("bad color"))?;
                let reason = match *reason {
                    "seed" => Reason::Seed,
                    "decision" => Reason::Decision,
                    r => Reason::Forced(
                        r.strip_prefix("forced:").and_then(parse_cid).ok_or_else(|| syntax("bad reason"))?,
                    ),
                };
                events.push(CertEvent::Step { n, point: point_of(label)?, color, reason });
            }
            [head @ ("conflict" | "unsat"), "point", label, "forced-red-by", r, "forced-blue-by", b] => {
                let red_by = parse_cid(r).ok_or_else(|| syntax("bad constraint id"))?;
                let blue_by = parse_cid(b).ok_or_else(|| syntax("bad constraint id"))?;
                events.push(CertEvent::Conflict(Conflict::DoubleForced { point: point_of(label)?, red_by, blue_by }));
                if *head == "unsat" {
                    claimed = Some(Verdict::Unsat);
                }
            }
            [head @ ("conflict" | "unsat"), "constraint", id] => {
                let constraint = parse_cid(id).ok_or_else(|| syntax("bad constraint id"))?;
                events.push(CertEvent::Conflict(Conflict::Violated { constraint }));
                if *head == "unsat" {
                    claimed = Some(Verdict::Unsat);
                }
            }
            ["sat"] => claimed = Some(Verdict::Sat),
            _ => return Err(syntax("unrecognized line")),
        }
    }
    let claimed = claimed.ok_or(CertificateError::MissingTerminal)?;
    Ok(ParsedCertificate { events, claimed })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error(transparent)]
    Seed(#[from] SolveError),
    #[error("event {event}: {message}")]
    Invalid { event: usize, message: String },
    #[error("seed point {point} never assigned")]
    MissingSeed { point: usize },
    #[error("certificate ends before the search tree is closed")]
    Incomplete,
    #[error("claimed {claimed:?} but the replay establishes otherwise")]
    WrongVerdict { claimed: Verdict },
    #[error("final coloring violates constraints {0:?}")]
    InvalidColoring(Vec<usize>),
}

struct Frame {
    trail_len: usize,
    point: usize,
    color: Color,
    second: bool,
}

/// Re-check every event of a certificate against the constraint list.
///
/// Forced steps must be implied by their constraint under the colors
/// assigned earlier; conflicts must name a point forced both ways (or a
/// constraint with no satisfying completion); every decision must have both
/// branches refuted before the search backs out past it. Returns the
/// established outcome.
pub fn replay(
    num_points: usize,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
    events: &[CertEvent],
    claimed: Verdict,
) -> Result<Outcome, ReplayError> {
    let seed = normalize_seed(num_points, seed)?;
    let seed_map: HashMap<usize, Color> = seed.iter().copied().collect();
    let mut colors: Vec<Option<Color>> = vec![None; num_points];
    let mut trail: Vec<usize> = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();
    let mut retry: Option<(usize, usize, Color)> = None;
    let mut seeds_open = true;
    let mut refuted_at: Option<usize> = None;

    let invalid = |event: usize, message: String| ReplayError::Invalid { event, message };
    let constraint =
        |event: usize, id: usize| constraints.get(id).ok_or_else(|| invalid(event, format!("no constraint C#{id}")));

    for (i, ev) in events.iter().enumerate() {
        if refuted_at.is_some() {
            return Err(invalid(i, "event after the root was refuted".into()));
        }
        match *ev {
            CertEvent::Step { n, point, color, reason } => {
                if point >= num_points {
                    return Err(invalid(i, format!("point {point} out of range")));
                }
                if n != trail.len() + 1 {
                    return Err(invalid(i, format!("step number {n}, expected {}", trail.len() + 1)));
                }
                if colors[point].is_some() {
                    return Err(invalid(i, format!("point {point} is already colored")));
                }
                if reason != Reason::Seed && seeds_open {
                    seeds_open = false;
                    if let Some(&(p, _)) = seed.iter().find(|(p, _)| colors[*p].is_none()) {
                        return Err(ReplayError::MissingSeed { point: p });
                    }
                }
                if let Some((p, len, c)) = retry {
                    if reason != Reason::Decision || point != p || color != c || trail.len() != len {
                        return Err(invalid(i, format!("expected the second branch on point {p}")));
                    }
                }
                match reason {
                    Reason::Seed => {
                        if !seeds_open || seed_map.get(&point) != Some(&color) {
                            return Err(invalid(i, format!("point {point} is not seeded {color}")));
                        }
                    }
                    Reason::Decision => {
                        frames.push(Frame { trail_len: trail.len(), point, color, second: retry.is_some() });
                        retry = None;
                    }
                    Reason::Forced(id) => {
                        if constraint(i, id)?.forced_color_of(point, &colors) != Some(color) {
                            return Err(invalid(i, format!("C#{id} does not force point {point} {color}")));
                        }
                    }
                }
                colors[point] = Some(color);
                trail.push(point);
            }
            CertEvent::Conflict(c) => {
                if retry.is_some() {
                    return Err(invalid(i, "conflict where a second branch was expected".into()));
                }
                if seeds_open {
                    seeds_open = false;
                    if let Some(&(p, _)) = seed.iter().find(|(p, _)| colors[*p].is_none()) {
                        return Err(ReplayError::MissingSeed { point: p });
                    }
                }
                match c {
                    Conflict::DoubleForced { point, red_by, blue_by } => {
                        if point >= num_points || colors[point].is_some() {
                            return Err(invalid(i, format!("conflict point {point} is not open")));
                        }
                        let red = constraint(i, red_by)?.forced_color_of(point, &colors);
                        let blue = constraint(i, blue_by)?.forced_color_of(point, &colors);
                        if red != Some(Color::Red) || blue != Some(Color::Blue) {
                            return Err(invalid(i, format!("point {point} is not forced both ways")));
                        }
                    }
                    Conflict::Violated { constraint: id } => {
                        if constraint(i, id)?.implications(&colors) != Implication::Violated {
                            return Err(invalid(i, format!("C#{id} is satisfiable")));
                        }
                    }
                }
                // the current node is refuted; back out to the innermost
                // decision whose second branch is still open
                loop {
                    match frames.pop() {
                        None => {
                            refuted_at = Some(i);
                            break;
                        }
                        Some(f) => {
                            for p in trail.drain(f.trail_len..) {
                                colors[p] = None;
                            }
                            if !f.second {
                                retry = Some((f.point, f.trail_len, f.color.opposite()));
                                break;
                            }
                        }
                    }
                }
            }
        }
    }

    if seeds_open {
        if let Some(&(p, _)) = seed.iter().find(|(p, _)| colors[*p].is_none()) {
            return Err(ReplayError::MissingSeed { point: p });
        }
    }
    match claimed {
        Verdict::Unsat => {
            if refuted_at.is_some() {
                Ok(Outcome::Unsat)
            } else if retry.is_some() {
                Err(ReplayError::Incomplete)
            } else {
                Err(ReplayError::WrongVerdict { claimed })
            }
        }
        Verdict::Sat => {
            if refuted_at.is_some() || retry.is_some() {
                return Err(ReplayError::WrongVerdict { claimed });
            }
            let total: Option<Vec<Color>> = colors.into_iter().collect();
            let total = total.ok_or(ReplayError::Incomplete)?;
            let bad = verify_coloring(&total, constraints);
            if !bad.is_empty() {
                return Err(ReplayError::InvalidColoring(bad));
            }
            Ok(Outcome::Sat(total))
        }
    }
}

/// Replay a certificate produced in memory.
pub fn replay_certificate(
    num_points: usize,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
    cert: &DerivationCertificate,
) -> Result<Outcome, ReplayError> {
    replay(num_points, constraints, seed, &cert.events, cert.verdict())
}

/// The colors a certificate's trail ends with: the final coloring for a
/// satisfiable certificate, or the assignments made before the first
/// decision otherwise.
pub fn final_colors(num_points: usize, events: &[CertEvent]) -> Vec<Option<Color>> {
    let mut colors = vec![None; num_points];
    let mut trail: Vec<usize> = Vec::new();
    let mut root_len = None;
    for ev in events {
        if let CertEvent::Step { n, point, color, reason } = *ev {
            if reason == Reason::Decision && root_len.is_none() {
                root_len = Some(trail.len());
            }
            for p in trail.drain(n.saturating_sub(1).min(trail.len())..) {
                colors[p] = None;
            }
            colors[point] = Some(color);
            trail.push(point);
        }
    }
    let ends_in_conflict = matches!(events.last(), Some(CertEvent::Conflict(_)));
    if ends_in_conflict {
        if let Some(len) = root_len {
            for p in trail.drain(len.min(trail.len())..) {
                colors[p] = None;
            }
        }
    }
    colors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::ConstraintKind::Eq1;
    use crate::solver::solve;

    fn all_triples(n: usize) -> Vec<Constraint> {
        let mut cs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    cs.push(Constraint::new(Eq1, vec![i, j, k]));
                }
            }
        }
        cs
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn text_round_trip_and_replay() {
        let cs = all_triples(5);
        let cert = solve(5, &cs, &[(0, Color::Red)]).unwrap();
        assert_eq!(cert.outcome, Outcome::Unsat);
        let text = cert.to_text(&labels(5));
        assert!(text.lines().last().unwrap().starts_with("unsat point"));
        let parsed = parse_certificate(&text, &labels(5)).unwrap();
        assert_eq!(parsed.events, cert.events);
        assert_eq!(parsed.claimed, Verdict::Unsat);
        assert_eq!(replay(5, &cs, &[(0, Color::Red)], &parsed.events, parsed.claimed), Ok(Outcome::Unsat));
    }

    #[test]
    fn tampered_certificates_fail() {
        let cs = all_triples(5);
        let cert = solve(5, &cs, &[]).unwrap();
        // dropping the final refutation leaves an open branch
        let short = &cert.events[..cert.events.len() - 1];
        assert!(replay(5, &cs, &[], short, Verdict::Unsat).is_err());
        // a forced step with the wrong color
        let mut bad = cert.events.clone();
        let pos = bad.iter().position(|e| matches!(e, CertEvent::Step { reason: Reason::Forced(_), .. })).unwrap();
        if let CertEvent::Step { color, .. } = &mut bad[pos] {
            *color = color.opposite();
        }
        assert!(matches!(replay(5, &cs, &[], &bad, Verdict::Unsat), Err(ReplayError::Invalid { .. })));
        // claiming sat for an unsat run
        assert!(replay(5, &cs, &[], &cert.events, Verdict::Sat).is_err());
    }

    #[test]
    fn sat_certificate_replays() {
        let cs = all_triples(4);
        let cert = solve(4, &cs, &[(1, Color::Blue)]).unwrap();
        let text = cert.to_text(&labels(4));
        assert!(text.ends_with("sat\n"));
        let parsed = parse_certificate(&text, &labels(4)).unwrap();
        let out = replay(4, &cs, &[(1, Color::Blue)], &parsed.events, parsed.claimed).unwrap();
        assert_eq!(out, cert.outcome);
        let Outcome::Sat(col) = out else { panic!() };
        assert_eq!(final_colors(4, &cert.events), col.iter().map(|&c| Some(c)).collect::<Vec<_>>());
    }

    #[test]
    fn missing_seed_is_rejected() {
        let cs = all_triples(4);
        let cert = solve(4, &cs, &[]).unwrap();
        assert_eq!(
            replay(4, &cs, &[(2, Color::Red)], &cert.events, cert.verdict()),
            Err(ReplayError::MissingSeed { point: 2 })
        );
    }

    #[test]
    fn parse_errors() {
        let l = labels(2);
        assert_eq!(parse_certificate("", &l), Err(CertificateError::MissingTerminal));
        assert!(matches!(
            parse_certificate("step 1 point zz red seed\nsat\n", &l),
            Err(CertificateError::UnknownLabel { line: 1, .. })
        ));
        assert!(matches!(parse_certificate("sat\nsat\n", &l), Err(CertificateError::TrailingContent { line: 2 })));
        assert!(matches!(
            parse_certificate("step 1 point v0 red forced:X\nsat\n", &l),
            Err(CertificateError::Syntax { line: 1, .. })
        ));
    }
}
