#![allow(dead_code)]

use ell3_core::datasets::{bundled, PointSetFile};
use ell3_core::geometry::{enumerate_constraints, sqdist};
use ell3_core::solver::{brute_force, solve, SolveError};
use ell3_core::{Color, Constraint, ConstraintKind, FieldScalar, KindSet, PlanePoint, Verdict};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fig1() -> PointSetFile {
    bundled("fig1").unwrap().0
}

pub fn rational() -> impl Strategy<Value = BigRational> {
    (-1000i64..1000, 1i64..50).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

pub fn scalar() -> impl Strategy<Value = FieldScalar> {
    (rational(), rational(), rational(), rational()).prop_map(|(a, b, c, d)| FieldScalar::new(a, b, c, d))
}

pub fn quad() -> impl Strategy<Value = [i64; 4]> {
    [-40i64..40, -40i64..40, -40i64..40, -40i64..40]
}

pub fn ring_axioms(a: &FieldScalar, b: &FieldScalar, c: &FieldScalar) -> Result<(), TestCaseError> {
    let zero = FieldScalar::zero();
    let one = FieldScalar::from_int(1);
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + &zero, a.clone());
    prop_assert_eq!(a * &one, a.clone());
    prop_assert!((a + &(-a)).is_zero());
    prop_assert_eq!(&(a - b) + b, a.clone());
    Ok(())
}

pub fn sqdist_symmetric(p: [i64; 4], q: [i64; 4]) -> Result<(), TestCaseError> {
    let (a, b) = (PlanePoint::from_quadruple(p), PlanePoint::from_quadruple(q));
    let d = sqdist(&a, &b);
    prop_assert_eq!(&d, &sqdist(&b, &a));
    prop_assert_eq!(d.is_zero(), p == q);
    Ok(())
}

/// Random subset of `points` of size `lo..=hi`, in random order.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, lo: usize, hi: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(rng.gen_range(lo..=hi.min(n)));
    idx
}

pub fn random_seed<R: Rng>(rng: &mut R, n: usize, max: usize) -> Vec<(usize, Color)> {
    if n == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(rng.gen_range(0..=max.min(n)));
    idx.into_iter().map(|i| (i, Color::from_bit(rng.gen()))).collect()
}

pub struct Instance {
    pub n: usize,
    pub points: Vec<PlanePoint>,
    pub constraints: Vec<Constraint>,
    pub seed: Vec<(usize, Color)>,
}

/// Random subset grown along fig1's constraints, so it is densely
/// constrained.
pub fn grown_subset<R: Rng>(rng: &mut R, size: usize) -> Vec<usize> {
    let set = fig1();
    let cs = enumerate_constraints(&set.plane_points(), KindSet::triples()).unwrap();
    let mut idx: Vec<usize> = cs.choose(rng).unwrap().members.clone();
    while idx.len() < size {
        let touching: Vec<&Constraint> = cs
            .iter()
            .filter(|c| c.members.iter().any(|m| idx.contains(m)) && c.members.iter().any(|m| !idx.contains(m)))
            .collect();
        let Some(c) = touching.choose(rng) else { break };
        for &m in &c.members {
            if !idx.contains(&m) && idx.len() < size {
                idx.push(m);
            }
        }
    }
    idx.shuffle(rng);
    idx
}

/// Half uniform subsets, half grown ones.
pub fn subset_instance<R: Rng>(rng: &mut R, max_points: usize, max_seed: usize) -> Instance {
    let set = fig1();
    let idx = if rng.gen() {
        random_subset(rng, set.len(), 3, max_points)
    } else {
        let size = rng.gen_range(3..=max_points);
        grown_subset(rng, size)
    };
    let points: Vec<PlanePoint> = idx.iter().map(|&i| PlanePoint::from_quadruple(set.points[i].quad)).collect();
    let constraints = enumerate_constraints(&points, KindSet::triples()).unwrap();
    let seed = random_seed(rng, points.len(), max_seed);
    Instance { n: points.len(), points, constraints, seed }
}

/// Verdict of the search, reading a seed that breaks a constraint as UNSAT.
pub fn search_verdict(n: usize, cs: &[Constraint], seed: &[(usize, Color)]) -> Verdict {
    match solve(n, cs, seed) {
        Ok(c) => c.verdict(),
        Err(SolveError::SeedConflict { .. }) => Verdict::Unsat,
        Err(e) => panic!("{e}"),
    }
}

pub fn oracle_agrees(inst: &Instance) -> bool {
    search_verdict(inst.n, &inst.constraints, &inst.seed) == brute_force(inst.n, &inst.constraints, &inst.seed).unwrap()
}

pub fn swap_symmetric(inst: &Instance) -> bool {
    let swapped: Vec<(usize, Color)> = inst.seed.iter().map(|&(p, c)| (p, c.opposite())).collect();
    search_verdict(inst.n, &inst.constraints, &inst.seed) == search_verdict(inst.n, &inst.constraints, &swapped)
}

/// Enumeration on a permuted point list yields the same constraints after
/// mapping indices back.
pub fn permutation_invariant(points: &[PlanePoint], perm: &[usize]) -> bool {
    let base = enumerate_constraints(points, KindSet::all()).unwrap();
    let shuffled: Vec<PlanePoint> = perm.iter().map(|&i| points[i].clone()).collect();
    let mut mapped: Vec<Constraint> = enumerate_constraints(&shuffled, KindSet::all())
        .unwrap()
        .into_iter()
        .map(|c| canonical(Constraint::new(c.kind, c.members.iter().map(|&m| perm[m]).collect())))
        .collect();
    mapped.sort();
    base == mapped
}

/// Reorder members into the canonical layout for their kind.
pub fn canonical(mut c: Constraint) -> Constraint {
    match c.kind {
        ConstraintKind::Ell3 => {
            if c.members[0] > c.members[2] {
                c.members.swap(0, 2);
            }
        }
        ConstraintKind::Eq1 | ConstraintKind::Eq2 => c.members.sort(),
        ConstraintKind::Centroid => c.members[..3].sort(),
    }
    c
}
