//! Independent re-derivations checked against the library.

mod common;

use std::collections::HashMap;

use ell3_core::datasets::{bundled, DATASET_NAMES};
use ell3_core::geometry::enumerate_constraints;
use ell3_core::grid::{generate_grid, grid_constraints};
use ell3_core::solver::{brute_force, verify_coloring};
use ell3_core::{Color, Constraint, ConstraintKind, KindSet};

/// 144·sqdist as (rational part, √33 part), from the quadruples directly.
fn d144(p: [i64; 4], q: [i64; 4]) -> (i64, i64) {
    let x = [p[0] - q[0], p[1] - q[1]];
    let y = [p[2] - q[2], p[3] - q[3]];
    // (x0√3 + x1√11)² + (y0 + y1√33)²
    (3 * x[0] * x[0] + 11 * x[1] * x[1] + y[0] * y[0] + 33 * y[1] * y[1], 2 * x[0] * x[1] + 2 * y[0] * y[1])
}

fn oracle_constraints(quads: &[[i64; 4]]) -> Vec<Constraint> {
    let n = quads.len();
    let at: HashMap<[i64; 4], usize> = quads.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let d = [d144(quads[i], quads[j]), d144(quads[i], quads[k]), d144(quads[j], quads[k])];
                let units = d.iter().filter(|&&x| x == (144, 0)).count();
                let doubles = d.iter().filter(|&&x| x == (576, 0)).count();
                if units == 3 {
                    out.push(Constraint::new(ConstraintKind::Eq1, vec![i, j, k]));
                    let s: Vec<i64> = (0..4).map(|c| quads[i][c] + quads[j][c] + quads[k][c]).collect();
                    if s.iter().all(|v| v % 3 == 0) {
                        if let Some(&c) = at.get(&[s[0] / 3, s[1] / 3, s[2] / 3, s[3] / 3]) {
                            out.push(Constraint::new(ConstraintKind::Centroid, vec![i, j, k, c]));
                        }
                    }
                } else if doubles == 3 {
                    out.push(Constraint::new(ConstraintKind::Eq2, vec![i, j, k]));
                } else if units == 2 && doubles == 1 {
                    // the long side is opposite the midpoint
                    let mid = if d[2] == (576, 0) {
                        i
                    } else if d[1] == (576, 0) {
                        j
                    } else {
                        k
                    };
                    let ends: Vec<usize> = [i, j, k].into_iter().filter(|&x| x != mid).collect();
                    out.push(Constraint::new(ConstraintKind::Ell3, vec![ends[0], mid, ends[1]]));
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn enumeration_matches_integer_oracle() {
    for name in DATASET_NAMES {
        let (pts, _) = bundled(name).unwrap();
        let quads: Vec<[i64; 4]> = pts.points.iter().map(|p| p.quad).collect();
        let lib = enumerate_constraints(&pts.plane_points(), KindSet::all()).unwrap();
        assert_eq!(lib, oracle_constraints(&quads), "{name}");
    }
}

#[test]
fn fig1_constraint_counts() {
    let (pts, _) = bundled("fig1").unwrap();
    let cs = enumerate_constraints(&pts.plane_points(), KindSet::triples()).unwrap();
    let count = |k| cs.iter().filter(|c| c.kind == k).count();
    assert_eq!(pts.len(), 56);
    assert_eq!((count(ConstraintKind::Ell3), count(ConstraintKind::Eq1), count(ConstraintKind::Eq2)), (48, 79, 9));
}

#[test]
fn single_triple_has_six_valid_colorings() {
    let c = Constraint::new(ConstraintKind::Ell3, vec![0, 1, 2]);
    let valid = (0u8..8)
        .filter(|m| {
            let col: Vec<Color> = (0..3).map(|b| Color::from_bit(m >> b & 1 == 1)).collect();
            verify_coloring(&col, std::slice::from_ref(&c)).is_empty()
        })
        .count();
    assert_eq!(valid, 6);
    assert_eq!(brute_force(3, &[c], &[]).unwrap(), ell3_core::Verdict::Sat);
}

#[test]
fn alternating_chain_is_valid() {
    // 0-1-2-3 on a line: two overlapping progressions
    let cs =
        [Constraint::new(ConstraintKind::Ell3, vec![0, 1, 2]), Constraint::new(ConstraintKind::Ell3, vec![1, 2, 3])];
    let col = [Color::Red, Color::Blue, Color::Red, Color::Blue];
    assert!(verify_coloring(&col, &cs).is_empty());
    assert_eq!(verify_coloring(&[Color::Red; 4], &cs), vec![0, 1]);
}

#[test]
fn grid_geometry_by_floating_point() {
    // neighbor counts at 4/√3, computed from plain coordinates
    for (r, want) in [(3, 1), (4, 19), (5, 55), (6, 109)] {
        let region = generate_grid(r);
        let xy: Vec<(f64, f64)> = region
            .points
            .iter()
            .map(|p| {
                let (x3, y3) = (p.x3 as f64, p.y3 as f64);
                (x3 / 3.0 + y3 / 6.0, y3 * 3f64.sqrt() / 6.0)
            })
            .collect();
        let target = 16.0 / 3.0;
        let interior = (0..xy.len())
            .filter(|&i| {
                xy.iter().filter(|q| ((q.0 - xy[i].0).powi(2) + (q.1 - xy[i].1).powi(2) - target).abs() < 1e-9).count()
                    == 6
            })
            .count();
        assert_eq!(interior, want, "radius {r}");
        assert_eq!(region.interior().len(), want);
    }
}

#[test]
fn grid_triangles_match_lattice_count() {
    // a hexagon of radius r holds 6r² unit triangles, each with a centroid
    for r in 1..=4u32 {
        let region = generate_grid(r);
        let cs = grid_constraints(&region);
        let centroids = region.points.iter().filter(|p| !p.is_vertex()).count();
        assert_eq!(centroids as u32, 6 * r * r);
        let tri =
            cs.iter().filter(|c| c.kind == ConstraintKind::Centroid && region.points[c.members[0]].is_vertex()).count();
        assert_eq!(tri as u32, 6 * r * r);
    }
}
