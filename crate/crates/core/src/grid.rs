//! The triangular lattice refined by triangle centroids, and its colorings.
//!
//! Points are kept in third-coordinates `(X, Y)`: the point is
//! `(X/3)·(1, 0) + (Y/3)·(1/2, √3/2)`. Lattice vertices have `X ≡ Y ≡ 0`,
//! up-triangle centroids `X ≡ Y ≡ 1` and down-triangle centroids
//! `X ≡ Y ≡ 2 (mod 3)`. In these coordinates `9·sqdist = X² + XY + Y²`.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::coloring::{Color, Reason};
use crate::constraint::{Constraint, KindSet};
use crate::field::{FieldScalar, PlanePoint};
use crate::geometry::{enumerate_constraints, sqdist};
use crate::solver::{normalize_seed, verify_coloring, Engine, SolveError};

pub const DEFAULT_RADIUS: u32 = 6;

/// The six offsets of length 4/√3, in third-coordinates.
pub const CIRCLE_OFFSETS: [(i64, i64); 6] = [(4, 4), (-4, 8), (-8, 4), (-4, -4), (4, -8), (8, -4)];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error(transparent)]
    Seed(#[from] SolveError),
    #[error("the seed has no valid completion in the region")]
    NoCompletion,
    #[error("point {center} has only {found} of 6 neighbors at distance 4/√3 inside the region")]
    CenterTooCloseToBoundary { center: usize, found: usize },
    #[error("coloring has {got} entries for a region of {want} points")]
    WrongLength { got: usize, want: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GridPoint {
    pub x3: i64,
    pub y3: i64,
}

impl GridPoint {
    pub fn is_vertex(self) -> bool {
        self.x3.rem_euclid(3) == 0
    }

    /// Squared distance to the origin, times 9.
    pub fn norm9(self) -> i64 {
        self.x3 * self.x3 + self.x3 * self.y3 + self.y3 * self.y3
    }

    pub fn plane(self) -> PlanePoint {
        PlanePoint::new(
            FieldScalar::from_fractions([(2 * self.x3 + self.y3, 6), (0, 1), (0, 1), (0, 1)]),
            FieldScalar::from_fractions([(0, 1), (self.y3, 6), (0, 1), (0, 1)]),
        )
    }

    /// Coordinates in the basis `(1, 1)`, `(-1, 2)` of the refined lattice.
    pub fn fine(self) -> (i64, i64) {
        let b = (self.y3 - self.x3) / 3;
        (self.x3 + b, b)
    }

    fn offset(self, d: (i64, i64)) -> Self {
        GridPoint { x3: self.x3 + d.0, y3: self.y3 + d.1 }
    }
}

#[derive(Clone, Debug)]
pub struct GridRegion {
    pub radius: u32,
    /// Sorted by `(y3, x3)`.
    pub points: Vec<GridPoint>,
    index: HashMap<GridPoint, usize>,
}

/// Lattice vertices `m·(1,0) + n·(1/2, √3/2)` with `|m|, |n|, |m+n| ≤ radius`,
/// plus the centroid of every unit triangle whose three vertices are among
/// them. That is `9r² + 3r + 1` points.
pub fn generate_grid(radius: u32) -> GridRegion {
    let r = radius as i64;
    let inside = |m: i64, n: i64| m.abs() <= r && n.abs() <= r && (m + n).abs() <= r;
    let mut points = Vec::new();
    for m in -r - 1..=r {
        for n in -r - 1..=r {
            if inside(m, n) {
                points.push(GridPoint { x3: 3 * m, y3: 3 * n });
            }
            if inside(m, n) && inside(m + 1, n) && inside(m, n + 1) {
                points.push(GridPoint { x3: 3 * m + 1, y3: 3 * n + 1 });
            }
            if inside(m + 1, n) && inside(m, n + 1) && inside(m + 1, n + 1) {
                points.push(GridPoint { x3: 3 * m + 2, y3: 3 * n + 2 });
            }
        }
    }
    points.sort_by_key(|p| (p.y3, p.x3));
    let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    GridRegion { radius, points, index }
}

impl GridRegion {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: GridPoint) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn vertex(&self, m: i64, n: i64) -> Option<usize> {
        self.index_of(GridPoint { x3: 3 * m, y3: 3 * n })
    }

    pub fn plane_points(&self) -> Vec<PlanePoint> {
        self.points.iter().map(|p| p.plane()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.points.iter().map(|p| format!("g{}_{}", p.x3, p.y3)).collect()
    }

    /// Region indices at distance 4/√3 from `i`.
    pub fn circle_neighbors(&self, i: usize) -> Vec<usize> {
        let p = self.points[i];
        CIRCLE_OFFSETS.iter().filter_map(|&d| self.index_of(p.offset(d))).collect()
    }

    /// Points whose six neighbors at distance 4/√3 all lie in the region.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.circle_neighbors(i).len() == 6).collect()
    }

    /// The unit triangle at the origin colored red, blue, blue.
    pub fn default_seed(&self) -> Vec<(usize, Color)> {
        [((0, 0), Color::Red), ((1, 0), Color::Blue), ((0, 1), Color::Blue)]
            .into_iter()
            .filter_map(|((m, n), c)| self.vertex(m, n).map(|i| (i, c)))
            .collect()
    }
}

/// Every Ell3, Eq1, Eq2 and Centroid constraint inside the region.
pub fn grid_constraints(region: &GridRegion) -> Vec<Constraint> {
    enumerate_constraints(&region.plane_points(), KindSet::all()).expect("grid points are distinct")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    /// Colors on the projected points, in projection order.
    pub colors: Vec<Color>,
    /// A valid total coloring of the region with these colors.
    pub witness: Vec<Color>,
}

/// Distinct colorings of `projection` that extend to a valid total
/// coloring, each with one witness, in red-first lexicographic order.
pub fn enumerate_projected(
    num_points: usize,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
    projection: &[usize],
) -> Result<Vec<Pattern>, SolveError> {
    let seed = normalize_seed(num_points, seed)?;
    let mut engine = Engine::new(num_points, constraints, false);
    engine.seed(&seed)?;
    let mut out = Vec::new();
    let queue = engine.all_constraints();
    if engine.propagate(queue).is_ok() {
        projected_dfs(&mut engine, projection, &mut out);
    }
    Ok(out)
}

fn projected_dfs(engine: &mut Engine<'_>, projection: &[usize], out: &mut Vec<Pattern>) {
    // prune subtrees with no completion at all
    let mark = engine.state.trail().len();
    let witness = if engine.search(BTreeSet::new()) { engine.state.to_total() } else { None };
    engine.state.backtrack(mark);
    let Some(witness) = witness else { return };

    let Some(&p) = projection.iter().find(|&&p| engine.state.get(p).is_none()) else {
        let colors = projection.iter().map(|&p| witness[p]).collect();
        out.push(Pattern { colors, witness });
        return;
    };
    for color in [Color::Red, Color::Blue] {
        engine.assign(p, color, Reason::Decision);
        let queue = engine.touching(p);
        if engine.propagate(queue).is_ok() {
            projected_dfs(engine, projection, out);
        }
        engine.state.backtrack(mark);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridCompletions {
    pub interior: Vec<usize>,
    /// Distinct interior colorings, each with a total witness.
    pub patterns: Vec<Pattern>,
}

/// All distinct interior colorings among the valid completions of `seed`.
pub fn propagate_grid(
    region: &GridRegion,
    constraints: &[Constraint],
    seed: &[(usize, Color)],
) -> Result<GridCompletions, GridError> {
    let interior = region.interior();
    let patterns = enumerate_projected(region.len(), constraints, seed, &interior)?;
    if patterns.is_empty() {
        return Err(GridError::NoCompletion);
    }
    debug_assert!(patterns.iter().all(|p| verify_coloring(&p.witness, constraints).is_empty()));
    Ok(GridCompletions { interior, patterns })
}

/// Whether every region point at squared distance exactly 16/3 from
/// `center` has the center's color.
pub fn check_monochromatic_circle(coloring: &[Color], region: &GridRegion, center: usize) -> Result<bool, GridError> {
    if coloring.len() != region.len() {
        return Err(GridError::WrongLength { got: coloring.len(), want: region.len() });
    }
    let c = region.points[center].plane();
    let target = FieldScalar::from_fractions([(16, 3), (0, 1), (0, 1), (0, 1)]);
    let ring: Vec<usize> = (0..region.len())
        .filter(|&j| {
            let d = region.points[j].offset((-region.points[center].x3, -region.points[center].y3));
            // cheap integer filter before the exact check
            d.norm9() == 48 && sqdist(&c, &region.points[j].plane()) == target
        })
        .collect();
    if ring.len() < 6 {
        return Err(GridError::CenterTooCloseToBoundary { center, found: ring.len() });
    }
    Ok(ring.iter().all(|&j| coloring[j] == coloring[center]))
}

/// Whether colors repeat under the three translations of length 4/√3
/// wherever both ends are interior.
pub fn translation_invariant(region: &GridRegion, coloring: &[Color]) -> bool {
    let interior: BTreeSet<usize> = region.interior().into_iter().collect();
    interior.iter().all(|&i| {
        CIRCLE_OFFSETS[..3].iter().all(|&d| match region.index_of(region.points[i].offset(d)) {
            Some(j) if interior.contains(&j) => coloring[i] == coloring[j],
            _ => true,
        })
    })
}

/// A coloring of the refined lattice modulo 4 in fine coordinates, as 16
/// bits indexed `4·(a mod 4) + (b mod 4)`; `None` if the given points do not
/// determine a consistent periodic coloring.
pub fn torus_pattern(region: &GridRegion, points: &[usize], coloring: &[Color]) -> Option<[Option<Color>; 16]> {
    let mut t = [None; 16];
    for &i in points {
        let (a, b) = region.points[i].fine();
        let slot = (4 * a.rem_euclid(4) + b.rem_euclid(4)) as usize;
        match t[slot] {
            Some(c) if c != coloring[i] => return None,
            _ => t[slot] = Some(coloring[i]),
        }
    }
    Some(t)
}

fn rotate((a, b): (i64, i64)) -> (i64, i64) {
    (-b, a + b)
}

/// Smallest image of a full torus pattern under the lattice's rotations,
/// reflections and translations.
pub fn canonical_form(t: &[Color; 16]) -> [Color; 16] {
    let key = |c: &[Color; 16]| c.map(|x| x.is_red());
    let mut best = *t;
    for reflect in [false, true] {
        for rot in 0..6 {
            for (ta, tb) in (0..4).flat_map(|a| (0..4).map(move |b| (a, b))) {
                let mut img = [Color::Red; 16];
                for a in 0..4i64 {
                    for b in 0..4i64 {
                        let mut p = if reflect { (b, a) } else { (a, b) };
                        for _ in 0..rot {
                            p = rotate(p);
                        }
                        let (x, y) = ((p.0 + ta).rem_euclid(4), (p.1 + tb).rem_euclid(4));
                        img[(4 * a + b) as usize] = t[(4 * x + y) as usize];
                    }
                }
                if key(&img) < key(&best) {
                    best = img;
                }
            }
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub radius: u32,
    pub points: usize,
    pub constraints: usize,
    pub interior: usize,
    pub patterns: usize,
    /// Every interior pattern is 4/√3-periodic and all share one canonical
    /// form.
    pub unique_up_to_isometry: bool,
    /// Every interior point of every witness passes the circle check.
    pub circle_property: bool,
    pub witness: Vec<Color>,
}

/// Seed the default triangle, enumerate interior patterns and check
/// uniqueness up to isometry and the circle property.
pub fn verify_grid(radius: u32) -> Result<GridReport, GridError> {
    let region = generate_grid(radius);
    let constraints = grid_constraints(&region);
    let seed = region.default_seed();
    let done = propagate_grid(&region, &constraints, &seed)?;

    let mut forms = BTreeSet::new();
    let mut periodic = true;
    let mut circle = true;
    for p in &done.patterns {
        match torus_pattern(&region, &done.interior, &p.witness) {
            Some(t) if t.iter().all(Option::is_some) => {
                forms.insert(canonical_form(&t.map(Option::unwrap)).map(|c| c.is_red()));
            }
            _ => periodic = false,
        }
        for &i in &done.interior {
            circle &= check_monochromatic_circle(&p.witness, &region, i)?;
        }
    }
    Ok(GridReport {
        radius,
        points: region.len(),
        constraints: constraints.len(),
        interior: done.interior.len(),
        patterns: done.patterns.len(),
        unique_up_to_isometry: periodic && forms.len() == 1,
        circle_property: circle && !done.interior.is_empty(),
        witness: done.patterns[0].witness.clone(),
    })
}
