//! Squared distances, midpoints, centroids and constraint enumeration.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::constraint::{Constraint, ConstraintKind, KindSet};
use crate::field::{FieldScalar, PlanePoint, Quadruple};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PairClass {
    /// Squared distance exactly 1.
    Unit,
    /// Squared distance exactly 4.
    Double,
    Other,
}

pub fn sqdist(p: &PlanePoint, q: &PlanePoint) -> FieldScalar {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    &(&dx * &dx) + &(&dy * &dy)
}

/// Squared distance between two quadruple-form points as `(u, v)` with
/// `sqdist = (u + v√33) / 144`.
///
/// With differences `(Δa, Δb, Δc, Δd)`:
/// `u = 3Δa² + 11Δb² + Δc² + 33Δd²` and `v = 2(ΔaΔb + ΔcΔd)`.
pub fn sqdist_quadruple(p: &Quadruple, q: &Quadruple) -> (i64, i64) {
    let [da, db, dc, dd] = [p[0] - q[0], p[1] - q[1], p[2] - q[2], p[3] - q[3]];
    let u = 3 * da * da + 11 * db * db + dc * dc + 33 * dd * dd;
    let v = 2 * (da * db + dc * dd);
    (u, v)
}

/// `(u + v√33) / 144` as a field element.
pub fn uv_to_field(u: i64, v: i64) -> FieldScalar {
    FieldScalar::from_fractions([(u, 144), (0, 1), (0, 1), (v, 144)])
}

pub fn classify_sqdist(d: &FieldScalar) -> PairClass {
    if d.eq_int(1) {
        PairClass::Unit
    } else if d.eq_int(4) {
        PairClass::Double
    } else {
        PairClass::Other
    }
}

pub fn classify_pair(p: &PlanePoint, q: &PlanePoint) -> PairClass {
    classify_sqdist(&sqdist(p, q))
}

pub fn midpoint(p: &PlanePoint, q: &PlanePoint) -> PlanePoint {
    PlanePoint::new((&p.x + &q.x).div_int(2), (&p.y + &q.y).div_int(2))
}

pub fn centroid(p: &PlanePoint, q: &PlanePoint, r: &PlanePoint) -> PlanePoint {
    PlanePoint::new((&(&p.x + &q.x) + &r.x).div_int(3), (&(&p.y + &q.y) + &r.y).div_int(3))
}

pub fn one_third() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(3))
}

/// Pairwise classification table for a point list.
pub struct PairTable {
    n: usize,
    classes: Vec<PairClass>,
    /// Indices `j > i` with a Unit or Double class, ascending.
    near: Vec<Vec<usize>>,
}

impl PairTable {
    pub fn build(points: &[PlanePoint]) -> Self {
        let n = points.len();
        let mut classes = vec![PairClass::Other; n * n];
        let mut near = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                let c = classify_pair(&points[i], &points[j]);
                classes[i * n + j] = c;
                classes[j * n + i] = c;
                if c != PairClass::Other {
                    near[i].push(j);
                }
            }
        }
        Self { n, classes, near }
    }

    pub fn get(&self, i: usize, j: usize) -> PairClass {
        self.classes[i * self.n + j]
    }
}

fn check_distinct(points: &[PlanePoint]) -> Result<(), GeometryError> {
    let mut seen: HashMap<&PlanePoint, usize> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if let Some(&first) = seen.get(p) {
            return Err(GeometryError::DuplicatePoint { first, second: i });
        }
        seen.insert(p, i);
    }
    Ok(())
}

/// Every constraint of the requested kinds present in `points`, in
/// canonical order: sorted by kind, then by member indices. Ell3 members are
/// `(outer, midpoint, outer)` with the outer points ascending; triangle
/// members are ascending, with a centroid appended last.
pub fn enumerate_constraints(points: &[PlanePoint], kinds: KindSet) -> Result<Vec<Constraint>, GeometryError> {
    check_distinct(points)?;
    let table = PairTable::build(points);
    let index: HashMap<&PlanePoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut out = Vec::new();

    for i in 0..points.len() {
        for (a, &j) in table.near[i].iter().enumerate() {
            for &k in &table.near[i][a + 1..] {
                let cjk = table.get(j, k);
                if cjk == PairClass::Other {
                    continue;
                }
                let (cij, cik) = (table.get(i, j), table.get(i, k));
                let units = [cij, cik, cjk].iter().filter(|&&c| c == PairClass::Unit).count();
                match units {
                    3 => {
                        if kinds.contains(ConstraintKind::Eq1) {
                            out.push(Constraint::new(ConstraintKind::Eq1, vec![i, j, k]));
                        }
                        if kinds.contains(ConstraintKind::Centroid) {
                            let c = centroid(&points[i], &points[j], &points[k]);
                            if let Some(&ci) = index.get(&c) {
                                out.push(Constraint::new(ConstraintKind::Centroid, vec![i, j, k, ci]));
                            }
                        }
                    }
                    0 => {
                        if kinds.contains(ConstraintKind::Eq2) {
                            out.push(Constraint::new(ConstraintKind::Eq2, vec![i, j, k]));
                        }
                    }
                    2 if kinds.contains(ConstraintKind::Ell3) => {
                        // the midpoint is the vertex opposite the length-2 side
                        let (lo, mid, hi) = if cjk == PairClass::Double {
                            (j, i, k)
                        } else if cik == PairClass::Double {
                            (i, j, k)
                        } else {
                            (i, k, j)
                        };
                        assert_eq!(
                            midpoint(&points[lo], &points[hi]),
                            points[mid],
                            "distances (1, 1, 2) without collinearity"
                        );
                        out.push(Constraint::new(ConstraintKind::Ell3, vec![lo, mid, hi]));
                    }
                    _ => {}
                }
            }
        }
    }
    out.sort();
    Ok(out)
}
