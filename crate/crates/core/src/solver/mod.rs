//! Forced-move propagation with depth-first search, plus an exhaustive
//! brute-force oracle.
//!
//! The search is deterministic: constraints are processed in ascending id
//! order, branching picks the lowest-index unset point that occurs in the
//! most constraints with exactly one colored member, and red is tried
//! first. Every assignment and refutation is recorded so the result can be
//! replayed by [`certificate::replay`] without running the search again.

pub mod certificate;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::coloring::{Color, PartialColoring, Reason};
use crate::constraint::{Constraint, Implication};

pub use certificate::{CertEvent, DerivationCertificate, Outcome};

/// Largest number of unseeded points [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("seed violates constraint C#{constraint}")]
    SeedConflict { constraint: usize },
    #[error("point {point} is seeded with both colors")]
    ContradictorySeed { point: usize },
    #[error("seed names point {point}, but there are only {len} points")]
    SeedOutOfRange { point: usize, len: usize },
    #[error("{free} free points exceed the enumeration limit of {limit}")]
    TooLarge { free: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
}

/// A point forced to both colors, or a constraint no completion satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Conflict {
    DoubleForced { point: usize, red_by: usize, blue_by: usize },
    Violated { constraint: usize },
}

/// A coloring problem: `num_points` points, the constraints over them and
/// the seed assignment.
#[derive(Clone, Copy, Debug)]
pub struct Problem<'a> {
    pub num_points: usize,
    pub constraints: &'a [Constraint],
    pub seed: &'a [(usize, Color)],
}

impl<'a> Problem<'a> {
    pub fn new(num_points: usize, constraints: &'a [Constraint], seed: &'a [(usize, Color)]) -> Self {
        Self { num_points, constraints, seed }
    }
}

/// Seed entries sorted by point, duplicates merged.
pub(crate) fn normalize_seed(n: usize, seed: &[(usize, Color)]) -> Result<Vec<(usize, Color)>, SolveError> {
    let mut out: Vec<(usize, Color)> = seed.to_vec();
    out.sort();
    out.dedup();
    for w in out.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(SolveError::ContradictorySeed { point: w[0].0 });
        }
    }
    if let Some(&(point, _)) = out.iter().find(|(p, _)| *p >= n) {
        return Err(SolveError::SeedOutOfRange { point, len: n });
    }
    Ok(out)
}

pub(crate) fn occurrence_lists(n: usize, constraints: &[Constraint]) -> Vec<Vec<usize>> {
    let mut occurs = vec![Vec::new(); n];
    for (id, c) in constraints.iter().enumerate() {
        for &m in &c.members {
            occurs[m].push(id);
        }
    }
    occurs
}

/// Search state shared by [`solve`] and the grid completion enumerator.
pub(crate) struct Engine<'a> {
    constraints: &'a [Constraint],
    occurs: Vec<Vec<usize>>,
    pub(crate) state: PartialColoring,
    events: Option<Vec<CertEvent>>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(n: usize, constraints: &'a [Constraint], record: bool) -> Self {
        Self {
            constraints,
            occurs: occurrence_lists(n, constraints),
            state: PartialColoring::new(n),
            events: record.then(Vec::new),
        }
    }

    /// Apply a normalized seed and check that no constraint is violated by
    /// it alone.
    pub(crate) fn seed(&mut self, seed: &[(usize, Color)]) -> Result<(), SolveError> {
        for &(p, c) in seed {
            self.assign(p, c, Reason::Seed);
        }
        for (id, c) in self.constraints.iter().enumerate() {
            if c.implications(self.state.colors()) == Implication::Violated {
                return Err(SolveError::SeedConflict { constraint: id });
            }
        }
        Ok(())
    }

    pub(crate) fn assign(&mut self, point: usize, color: Color, reason: Reason) {
        self.state.assign(point, color, reason);
        if let Some(ev) = &mut self.events {
            ev.push(CertEvent::Step { n: self.state.trail().len(), point, color, reason });
        }
    }

    fn record_conflict(&mut self, c: Conflict) {
        if let Some(ev) = &mut self.events {
            ev.push(CertEvent::Conflict(c));
        }
    }

    pub(crate) fn all_constraints(&self) -> BTreeSet<usize> {
        (0..self.constraints.len()).collect()
    }

    pub(crate) fn touching(&self, point: usize) -> BTreeSet<usize> {
        self.occurs[point].iter().copied().collect()
    }

    /// Lowest-id constraints forcing `point` to red and to blue.
    fn forcers(&self, point: usize) -> (Option<usize>, Option<usize>) {
        let mut red = None;
        let mut blue = None;
        for &id in &self.occurs[point] {
            match self.constraints[id].forced_color_of(point, self.state.colors()) {
                Some(Color::Red) if red.is_none() => red = Some(id),
                Some(Color::Blue) if blue.is_none() => blue = Some(id),
                _ => {}
            }
        }
        (red, blue)
    }

    /// Run forced moves to a fixpoint, starting from the constraints in
    /// `queue` and always taking the lowest pending id next.
    pub(crate) fn propagate(&mut self, mut queue: BTreeSet<usize>) -> Result<(), Conflict> {
        while let Some(id) = queue.pop_first() {
            let forced = match self.constraints[id].implications(self.state.colors()) {
                Implication::Nothing => continue,
                Implication::Violated => {
                    let c = Conflict::Violated { constraint: id };
                    self.record_conflict(c);
                    return Err(c);
                }
                Implication::Forces(f) => f,
            };
            for (point, color) in forced {
                if self.state.get(point).is_some() {
                    continue;
                }
                if let (Some(red_by), Some(blue_by)) = self.forcers(point) {
                    let c = Conflict::DoubleForced { point, red_by, blue_by };
                    self.record_conflict(c);
                    return Err(c);
                }
                self.assign(point, color, Reason::Forced(id));
                queue.extend(self.occurs[point].iter().copied());
            }
        }
        Ok(())
    }

    /// Lowest-index unset point occurring in the most constraints that have
    /// exactly one colored member.
    fn branch_point(&self) -> Option<usize> {
        let colors = self.state.colors();
        let mut best: Option<(usize, usize)> = None;
        for p in (0..colors.len()).filter(|&p| colors[p].is_none()) {
            let score = self.occurs[p]
                .iter()
                .filter(|&&id| self.constraints[id].members.iter().filter(|&&m| colors[m].is_some()).count() == 1)
                .count();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, p));
            }
        }
        best.map(|(_, p)| p)
    }

    /// Depth-first search below the current state. Returns true with the
    /// state left at a total valid coloring, or false with the state
    /// restored to how it was on entry.
    pub(crate) fn search(&mut self, queue: BTreeSet<usize>) -> bool {
        let mark = self.state.trail().len();
        if self.propagate(queue).is_err() {
            self.state.backtrack(mark);
            return false;
        }
        let Some(p) = self.branch_point() else {
            return true;
        };
        let inner = self.state.trail().len();
        for color in [Color::Red, Color::Blue] {
            self.assign(p, color, Reason::Decision);
            let queue = self.touching(p);
            if self.search(queue) {
                return true;
            }
            self.state.backtrack(inner);
        }
        self.state.backtrack(mark);
        false
    }

    pub(crate) fn take_events(&mut self) -> Vec<CertEvent> {
        self.events.take().unwrap_or_default()
    }
}

/// Propagate forced moves on `state` to a fixpoint. Forced assignments are
/// appended to the state's trail; on conflict the state keeps whatever was
/// assigned before the conflict was found.
pub fn propagate(state: &mut PartialColoring, constraints: &[Constraint]) -> Result<(), Conflict> {
    let mut engine = Engine::new(state.len(), constraints, false);
    engine.state = state.clone();
    let result = engine.propagate(engine.all_constraints());
    *state = engine.state;
    result
}

/// Decide whether the seed extends to a coloring violating no constraint.
pub fn solve(
    num_points: usize,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
) -> Result<DerivationCertificate, SolveError> {
    let seed = normalize_seed(num_points, seed)?;
    let mut engine = Engine::new(num_points, constraints, true);
    engine.seed(&seed)?;
    let queue = engine.all_constraints();
    let outcome = if engine.search(queue) {
        Outcome::Sat(engine.state.to_total().expect("search returned a partial coloring"))
    } else {
        Outcome::Unsat
    };
    Ok(DerivationCertificate { outcome, events: engine.take_events() })
}

/// Ids of the constraints a total coloring violates.
pub fn verify_coloring(coloring: &[Color], constraints: &[Constraint]) -> Vec<usize> {
    constraints.iter().enumerate().filter(|(_, c)| !c.holds_in(coloring)).map(|(id, _)| id).collect()
}

/// Exhaustive enumeration over all colorings of the unseeded points.
pub fn brute_force(
    num_points: usize,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
) -> Result<Verdict, SolveError> {
    Ok(match brute_force_witness(num_points, constraints, seed)? {
        Some(_) => Verdict::Sat,
        None => Verdict::Unsat,
    })
}

/// Like [`brute_force`], returning the first valid coloring found.
pub fn brute_force_witness(
    num_points: usize,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
) -> Result<Option<Vec<Color>>, SolveError> {
    let seed = normalize_seed(num_points, seed)?;
    let mut coloring = vec![Color::Red; num_points];
    let mut seeded = vec![false; num_points];
    for &(p, c) in &seed {
        coloring[p] = c;
        seeded[p] = true;
    }
    let free: Vec<usize> = (0..num_points).filter(|&p| !seeded[p]).collect();
    if free.len() > BRUTE_FORCE_LIMIT {
        return Err(SolveError::TooLarge { free: free.len(), limit: BRUTE_FORCE_LIMIT });
    }
    for mask in 0u64..(1u64 << free.len()) {
        for (bit, &p) in free.iter().enumerate() {
            coloring[p] = Color::from_bit(mask >> bit & 1 == 1);
        }
        if constraints.iter().all(|c| c.holds_in(&coloring)) {
            return Ok(Some(coloring));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::ConstraintKind::*;
    use Color::*;

    fn c(kind: crate::constraint::ConstraintKind, m: &[usize]) -> Constraint {
        Constraint::new(kind, m.to_vec())
    }

    #[test]
    fn propagate_forces_opposite() {
        let cs = [c(Ell3, &[0, 1, 2])];
        let mut st = PartialColoring::new(3);
        st.assign(0, Red, Reason::Seed);
        st.assign(1, Red, Reason::Seed);
        propagate(&mut st, &cs).unwrap();
        assert_eq!(st.get(2), Some(Blue));
        assert_eq!(st.trail().last().unwrap().reason, Reason::Forced(0));
    }

    #[test]
    fn propagate_fixpoint_unchanged() {
        let cs = [c(Ell3, &[0, 1, 2]), c(Eq1, &[2, 3, 4])];
        let mut st = PartialColoring::new(5);
        st.assign(0, Red, Reason::Seed);
        st.assign(3, Blue, Reason::Seed);
        let before = st.clone();
        propagate(&mut st, &cs).unwrap();
        assert_eq!(st, before);
    }

    #[test]
    fn propagate_centroid_majority() {
        let cs = [c(Centroid, &[0, 1, 2, 3])];
        let mut st = PartialColoring::new(4);
        st.assign(0, Red, Reason::Seed);
        st.assign(1, Blue, Reason::Seed);
        st.assign(2, Blue, Reason::Seed);
        propagate(&mut st, &cs).unwrap();
        assert_eq!(st.get(3), Some(Blue));
    }

    #[test]
    fn propagate_reports_double_forcing() {
        // 0,1 red force 2 blue; 3,4 blue force 2 red
        let cs = [c(Ell3, &[0, 2, 1]), c(Eq1, &[2, 3, 4])];
        let mut st = PartialColoring::new(5);
        for (p, col) in [(0, Red), (1, Red), (3, Blue), (4, Blue)] {
            st.assign(p, col, Reason::Seed);
        }
        assert_eq!(propagate(&mut st, &cs), Err(Conflict::DoubleForced { point: 2, red_by: 1, blue_by: 0 }));
    }

    #[test]
    fn solve_small_cases() {
        let cs = [c(Eq1, &[0, 1, 2])];
        let cert = solve(3, &cs, &[(0, Red)]).unwrap();
        let Outcome::Sat(col) = &cert.outcome else { panic!("expected sat") };
        assert!(verify_coloring(col, &cs).is_empty());
        assert_eq!(col[0], Red);

        let cert = solve(0, &[], &[]).unwrap();
        assert_eq!(cert.outcome, Outcome::Sat(vec![]));
        assert!(cert.events.is_empty());
    }

    #[test]
    fn solve_seed_errors() {
        let cs = [c(Ell3, &[0, 1, 2])];
        assert_eq!(
            solve(3, &cs, &[(0, Red), (1, Red), (2, Red)]).unwrap_err(),
            SolveError::SeedConflict { constraint: 0 }
        );
        assert_eq!(solve(3, &cs, &[(0, Red), (0, Blue)]).unwrap_err(), SolveError::ContradictorySeed { point: 0 });
        assert_eq!(solve(3, &cs, &[(7, Red)]).unwrap_err(), SolveError::SeedOutOfRange { point: 7, len: 3 });
    }

    #[test]
    fn solve_needs_search() {
        // K4 of Eq1-style triples on 4 points: every 2-coloring of 4 points
        // has a monochromatic triple.
        let cs = [c(Eq1, &[0, 1, 2]), c(Eq1, &[0, 1, 3]), c(Eq1, &[0, 2, 3]), c(Eq1, &[1, 2, 3])];
        let cert = solve(4, &cs, &[]).unwrap();
        // two reds and two blues avoid every monochromatic triple
        let Outcome::Sat(col) = cert.outcome else { panic!() };
        assert!(verify_coloring(&col, &cs).is_empty());

        // all triples of 5 points: pigeonhole gives three of one color
        let mut cs = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                for k in j + 1..5 {
                    cs.push(c(Eq1, &[i, j, k]));
                }
            }
        }
        let cert = solve(5, &cs, &[]).unwrap();
        assert_eq!(cert.outcome, Outcome::Unsat);
        assert!(cert.events.iter().any(|e| matches!(e, CertEvent::Step { reason: Reason::Decision, .. })));
    }

    #[test]
    fn brute_force_examples() {
        let cs = [c(Ell3, &[0, 1, 2])];
        assert_eq!(brute_force(3, &cs, &[]).unwrap(), Verdict::Sat);
        let count = (0u32..8)
            .filter(|m| {
                let col: Vec<Color> = (0..3).map(|b| Color::from_bit(m >> b & 1 == 1)).collect();
                cs[0].holds_in(&col)
            })
            .count();
        assert_eq!(count, 6);
        assert_eq!(brute_force(3, &cs, &[(0, Red), (1, Red), (2, Red)]).unwrap(), Verdict::Unsat);
        assert_eq!(brute_force(7, &[], &[]).unwrap(), Verdict::Sat);
        assert!(matches!(brute_force(30, &[], &[]), Err(SolveError::TooLarge { free: 30, .. })));
    }

    #[test]
    fn verify_examples() {
        let cs = [c(Eq1, &[0, 1, 2])];
        assert_eq!(verify_coloring(&[Red, Red, Red], &cs), vec![0]);
        // two overlapping progressions 0-1-2 and 1-2-3 on a line
        let cs = [c(Ell3, &[0, 1, 2]), c(Ell3, &[1, 2, 3])];
        assert!(verify_coloring(&[Red, Blue, Red, Blue], &cs).is_empty());
        assert!(verify_coloring(&[Red, Red, Blue, Red], &cs).is_empty());
        assert_eq!(verify_coloring(&[Red, Blue, Blue, Blue], &cs), vec![1]);
    }
}
