//! DIMACS CNF export for cross-checking with external solvers.
//!
//! Point `i` is variable `i + 1`; a true variable means red.

use std::fmt::Write as _;

use thiserror::Error;

use crate::coloring::Color;
use crate::constraint::{Constraint, ConstraintKind};
use crate::datasets::LabeledQuad;
use crate::solver::{brute_force, normalize_seed, SolveError, Verdict};

/// Largest point count [`cnf_selfcheck`] accepts.
pub const SELFCHECK_LIMIT: usize = 15;

pub type Clause = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error("literal {literal} exceeds the declared {num_vars} variables")]
    LiteralRange { literal: i64, num_vars: usize },
}

fn lit(point: usize, red: bool) -> i64 {
    let v = point as i64 + 1;
    if red {
        v
    } else {
        -v
    }
}

/// The clauses contributed by one constraint, positive polarity first.
pub fn constraint_clauses(c: &Constraint) -> Vec<Clause> {
    let m = &c.members;
    match c.kind {
        ConstraintKind::Ell3 | ConstraintKind::Eq1 | ConstraintKind::Eq2 => {
            vec![m.iter().map(|&p| lit(p, true)).collect(), m.iter().map(|&p| lit(p, false)).collect()]
        }
        ConstraintKind::Centroid => {
            // two equal vertices fix the centroid's color
            let (t, ctr) = (&m[..3], m[3]);
            let pairs = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])];
            let mut out = Vec::with_capacity(6);
            for red in [true, false] {
                for &(a, b) in &pairs {
                    out.push(vec![lit(a, !red), lit(b, !red), lit(ctr, red)]);
                }
            }
            out
        }
    }
}

impl CnfInstance {
    pub fn build(num_points: usize, constraints: &[Constraint], seed: &[(usize, Color)]) -> Result<Self, SolveError> {
        let seed = normalize_seed(num_points, seed)?;
        let mut clauses: Vec<Clause> = constraints.iter().flat_map(constraint_clauses).collect();
        clauses.extend(seed.iter().map(|&(p, c)| vec![lit(p, c.is_red())]));
        Ok(Self { num_vars: num_points, clauses })
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|cl| cl.iter().any(|&l| assignment[(l.unsigned_abs() - 1) as usize] == (l > 0)))
    }

    /// Exhaustive search over variables not fixed by unit clauses. Errors
    /// when more than `limit` variables remain free.
    pub fn solve_exhaustive(&self, limit: usize) -> Result<Option<Vec<bool>>, SolveError> {
        let mut fixed: Vec<Option<bool>> = vec![None; self.num_vars];
        for cl in self.clauses.iter().filter(|cl| cl.len() == 1) {
            let v = (cl[0].unsigned_abs() - 1) as usize;
            match fixed[v] {
                Some(b) if b != (cl[0] > 0) => return Ok(None),
                _ => fixed[v] = Some(cl[0] > 0),
            }
        }
        let free: Vec<usize> = (0..self.num_vars).filter(|&v| fixed[v].is_none()).collect();
        if free.len() > limit {
            return Err(SolveError::TooLarge { free: free.len(), limit });
        }
        let mut assignment: Vec<bool> = fixed.iter().map(|f| f.unwrap_or(false)).collect();
        for mask in 0u64..(1u64 << free.len()) {
            for (bit, &v) in free.iter().enumerate() {
                assignment[v] = mask >> bit & 1 == 1;
            }
            if self.satisfied_by(&assignment) {
                return Ok(Some(assignment));
            }
        }
        Ok(None)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        self.write_body(&mut out);
        out
    }

    fn write_body(&self, out: &mut String) {
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for cl in &self.clauses {
            for l in cl {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
    }
}

/// DIMACS text with one `c point` comment per point ahead of the header.
pub fn to_dimacs(
    points: &[LabeledQuad],
    constraints: &[Constraint],
    seed: &[(usize, Color)],
) -> Result<String, SolveError> {
    let cnf = CnfInstance::build(points.len(), constraints, seed)?;
    let mut out = String::new();
    for (i, p) in points.iter().enumerate() {
        let [a, b, c, d] = p.quad;
        let label = p.label.as_deref().unwrap_or("-");
        let _ = writeln!(out, "c point {i} {label} {a} {b} {c} {d}");
    }
    cnf.write_body(&mut out);
    Ok(out)
}

pub fn parse_dimacs(text: &str) -> Result<CnfInstance, EncodeError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Clause = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let syntax = |m: &str| EncodeError::Syntax { line, message: m.to_string() };
        if t.starts_with('p') {
            let tok: Vec<&str> = t.split_whitespace().collect();
            match tok.as_slice() {
                ["p", "cnf", v, c] if header.is_none() => {
                    let v = v.parse().map_err(|_| syntax("bad variable count"))?;
                    let c = c.parse().map_err(|_| syntax("bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(syntax("bad header")),
            }
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| syntax("clause before header"))?;
        for tok in t.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| syntax("bad literal"))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > num_vars {
                return Err(EncodeError::LiteralRange { literal: l, num_vars });
            } else {
                current.push(l);
            }
        }
    }
    let (num_vars, declared) = header.ok_or(EncodeError::Syntax { line: 0, message: "missing header".into() })?;
    if !current.is_empty() {
        return Err(EncodeError::Syntax { line: 0, message: "unterminated clause".into() });
    }
    if clauses.len() != declared {
        return Err(EncodeError::ClauseCount { declared, found: clauses.len() });
    }
    Ok(CnfInstance { num_vars, clauses })
}

/// Compare exhaustive satisfiability of the emitted CNF with the brute-force
/// verdict on the original instance. Returns true when they agree.
pub fn cnf_selfcheck(
    num_points: usize,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
) -> Result<bool, SolveError> {
    if num_points > SELFCHECK_LIMIT {
        return Err(SolveError::TooLarge { free: num_points, limit: SELFCHECK_LIMIT });
    }
    let cnf = CnfInstance::build(num_points, constraints, seed)?;
    // enumerate every variable, seeded or not, so the unit clauses are tested too
    let mut cnf_sat = false;
    let mut assignment = vec![false; num_points];
    for mask in 0u64..(1u64 << num_points) {
        for (v, a) in assignment.iter_mut().enumerate() {
            *a = mask >> v & 1 == 1;
        }
        if cnf.satisfied_by(&assignment) {
            cnf_sat = true;
            break;
        }
    }
    let oracle = match brute_force(num_points, constraints, seed) {
        Ok(v) => v == Verdict::Sat,
        // a seed that breaks a constraint outright has no valid coloring
        Err(SolveError::SeedConflict { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(cnf_sat == oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::ConstraintKind::*;

    fn quads(n: usize) -> Vec<LabeledQuad> {
        (0..n).map(|i| LabeledQuad { quad: [i as i64, 0, 0, 0], label: None }).collect()
    }

    #[test]
    fn single_triple() {
        let cs = [Constraint::new(Ell3, vec![0, 1, 2])];
        let text = to_dimacs(&quads(3), &cs, &[]).unwrap();
        assert!(text.ends_with("p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n"));
        assert!(text.starts_with("c point 0 - 0 0 0 0\n"));
    }

    #[test]
    fn empty_instance() {
        assert_eq!(to_dimacs(&[], &[], &[]).unwrap(), "p cnf 0 0\n");
        assert_eq!(cnf_selfcheck(0, &[], &[]), Ok(true));
    }

    #[test]
    fn seeds_become_units_after_constraints() {
        let cs = [Constraint::new(Eq1, vec![0, 1, 2])];
        let cnf = CnfInstance::build(3, &cs, &[(2, Color::Blue), (0, Color::Red)]).unwrap();
        assert_eq!(cnf.clauses[2..], [vec![1], vec![-3]]);
    }

    #[test]
    fn centroid_clauses_encode_majority() {
        let c = Constraint::new(Centroid, vec![0, 1, 2, 3]);
        let cnf = CnfInstance { num_vars: 4, clauses: constraint_clauses(&c) };
        assert_eq!(cnf.clauses.len(), 6);
        for mask in 0u32..16 {
            let a: Vec<bool> = (0..4).map(|b| mask >> b & 1 == 1).collect();
            let colors: Vec<Color> = a.iter().map(|&r| Color::from_bit(r)).collect();
            assert_eq!(cnf.satisfied_by(&a), c.holds(&colors), "mask {mask}");
        }
    }

    #[test]
    fn round_trip() {
        let cs = [Constraint::new(Ell3, vec![0, 1, 2]), Constraint::new(Centroid, vec![0, 1, 2, 3])];
        let text = to_dimacs(&quads(4), &cs, &[(1, Color::Red)]).unwrap();
        let parsed = parse_dimacs(&text).unwrap();
        assert_eq!(parsed, CnfInstance::build(4, &cs, &[(1, Color::Red)]).unwrap());
        assert_eq!(parsed.to_dimacs(), text.lines().skip(4).map(|l| format!("{l}\n")).collect::<String>());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_dimacs("p cnf 1 2\n1 0\n"), Err(EncodeError::ClauseCount { .. })));
        assert!(matches!(parse_dimacs("p cnf 1 1\n2 0\n"), Err(EncodeError::LiteralRange { .. })));
        assert!(matches!(parse_dimacs("1 0\n"), Err(EncodeError::Syntax { .. })));
    }

    #[test]
    fn selfcheck_examples() {
        let cs = [Constraint::new(Ell3, vec![0, 1, 2])];
        let mono = [(0, Color::Red), (1, Color::Red), (2, Color::Red)];
        assert_eq!(cnf_selfcheck(3, &cs, &mono), Ok(true));
        assert_eq!(cnf_selfcheck(5, &[], &[]), Ok(true));
        assert!(matches!(cnf_selfcheck(16, &[], &[]), Err(SolveError::TooLarge { .. })));
    }

    #[test]
    fn exhaustive_respects_units() {
        let cs = [Constraint::new(Eq1, vec![0, 1, 2])];
        let cnf = CnfInstance::build(3, &cs, &[(0, Color::Red), (1, Color::Red)]).unwrap();
        let a = cnf.solve_exhaustive(25).unwrap().unwrap();
        assert_eq!(a, vec![true, true, false]);
    }
}
