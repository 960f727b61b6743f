//! Forbidden configurations and their coloring semantics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::coloring::Color;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    /// Three collinear points at unit spacing; the midpoint is stored second.
    Ell3,
    /// Equilateral triangle of side 1.
    Eq1,
    /// Equilateral triangle of side 2.
    Eq2,
    /// Unit equilateral triangle plus its centroid, stored last.
    Centroid,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 4] = [Self::Ell3, Self::Eq1, Self::Eq2, Self::Centroid];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ell3 => "ell3",
            Self::Eq1 => "eq1",
            Self::Eq2 => "eq2",
            Self::Centroid => "centroid",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Self::Centroid => 4,
            _ => 3,
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstraintKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown constraint kind `{s}`"))
    }
}

/// A set of constraint kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KindSet(u8);

impl KindSet {
    pub const fn empty() -> Self {
        KindSet(0)
    }

    pub fn all() -> Self {
        Self::of(&ConstraintKind::ALL)
    }

    /// Ell3, Eq1 and Eq2: the configurations a coloring must avoid outright.
    pub fn triples() -> Self {
        Self::of(&[ConstraintKind::Ell3, ConstraintKind::Eq1, ConstraintKind::Eq2])
    }

    pub fn of(kinds: &[ConstraintKind]) -> Self {
        KindSet(kinds.iter().fold(0, |acc, k| acc | k.bit()))
    }

    pub fn contains(self, kind: ConstraintKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn with(self, kind: ConstraintKind) -> Self {
        KindSet(self.0 | kind.bit())
    }

    pub fn kinds(self) -> impl Iterator<Item = ConstraintKind> {
        ConstraintKind::ALL.into_iter().filter(move |k| self.contains(*k))
    }
}

impl FromStr for KindSet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',').filter(|t| !t.trim().is_empty()).try_fold(KindSet::empty(), |set, t| Ok(set.with(t.parse()?)))
    }
}

/// What evaluating a constraint against a partial coloring yields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Implication {
    /// No completion of the unset members satisfies the constraint.
    Violated,
    /// Every satisfying completion agrees on these `(point, color)` pairs.
    Forces(Vec<(usize, Color)>),
    Nothing,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub members: Vec<usize>,
}

impl Constraint {
    pub fn new(kind: ConstraintKind, members: Vec<usize>) -> Self {
        debug_assert_eq!(members.len(), kind.arity());
        Self { kind, members }
    }

    /// Triples must not be monochromatic. A centroid must carry the majority
    /// color of its triangle.
    pub fn holds(&self, colors: &[Color]) -> bool {
        match self.kind {
            ConstraintKind::Ell3 | ConstraintKind::Eq1 | ConstraintKind::Eq2 => {
                !(colors[0] == colors[1] && colors[1] == colors[2])
            }
            ConstraintKind::Centroid => colors[3] == Color::majority(colors[0], colors[1], colors[2]),
        }
    }

    /// Same as [`Constraint::holds`], reading member colors from a total
    /// coloring indexed by point.
    pub fn holds_in(&self, coloring: &[Color]) -> bool {
        let colors: Vec<Color> = self.members.iter().map(|&m| coloring[m]).collect();
        self.holds(&colors)
    }

    /// Generalized arc consistency on one constraint: enumerate the
    /// completions of the unset members and report which assignments every
    /// satisfying completion shares.
    pub fn implications(&self, colors: &[Option<Color>]) -> Implication {
        let k = self.members.len();
        let mut current = [None; 4];
        let mut free = [0usize; 4];
        let mut nfree = 0;
        for (i, &m) in self.members.iter().enumerate() {
            current[i] = colors[m];
            if current[i].is_none() {
                free[nfree] = i;
                nfree += 1;
            }
        }

        let mut buf = [Color::Red; 4];
        for i in 0..k {
            if let Some(c) = current[i] {
                buf[i] = c;
            }
        }
        // bit b of `seen_*` is set when member free[b] takes that color in
        // some satisfying completion.
        let mut seen_red = 0u32;
        let mut seen_blue = 0u32;
        let mut any = false;
        for mask in 0u32..(1 << nfree) {
            for (bit, &slot) in free[..nfree].iter().enumerate() {
                buf[slot] = Color::from_bit(mask >> bit & 1 == 1);
            }
            if self.holds(&buf[..k]) {
                any = true;
                seen_red |= mask;
                seen_blue |= !mask;
            }
        }
        if !any {
            return Implication::Violated;
        }
        let forced: Vec<(usize, Color)> = (0..nfree)
            .filter_map(|bit| {
                let r = seen_red >> bit & 1 == 1;
                let b = seen_blue >> bit & 1 == 1;
                let member = self.members[free[bit]];
                match (r, b) {
                    (true, false) => Some((member, Color::Red)),
                    (false, true) => Some((member, Color::Blue)),
                    _ => None,
                }
            })
            .collect();
        if forced.is_empty() {
            Implication::Nothing
        } else {
            Implication::Forces(forced)
        }
    }

    /// The color this constraint forces on `point` under `colors`, if any.
    pub fn forced_color_of(&self, point: usize, colors: &[Option<Color>]) -> Option<Color> {
        match self.implications(colors) {
            Implication::Forces(f) => f.into_iter().find(|&(p, _)| p == point).map(|(_, c)| c),
            _ => None,
        }
    }

    pub fn contains(&self, point: usize) -> bool {
        self.members.contains(&point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Color::*;

    fn partial(v: &[Option<Color>]) -> Vec<Option<Color>> {
        v.to_vec()
    }

    #[test]
    fn triple_forces_opposite() {
        let c = Constraint::new(ConstraintKind::Ell3, vec![0, 1, 2]);
        let imp = c.implications(&partial(&[Some(Red), Some(Red), None]));
        assert_eq!(imp, Implication::Forces(vec![(2, Blue)]));
        assert_eq!(c.implications(&partial(&[Some(Red), None, None])), Implication::Nothing);
        assert_eq!(c.implications(&partial(&[Some(Red), Some(Blue), None])), Implication::Nothing);
        assert_eq!(c.implications(&partial(&[Some(Blue), Some(Blue), Some(Blue)])), Implication::Violated);
    }

    #[test]
    fn centroid_takes_majority() {
        let c = Constraint::new(ConstraintKind::Centroid, vec![0, 1, 2, 3]);
        let imp = c.implications(&partial(&[Some(Red), Some(Blue), Some(Blue), None]));
        assert_eq!(imp, Implication::Forces(vec![(3, Blue)]));
        assert!(c.holds(&[Red, Red, Blue, Red]));
        assert!(!c.holds(&[Red, Red, Blue, Blue]));
        // two equal vertices already fix the majority
        let imp = c.implications(&partial(&[Some(Red), Some(Red), None, None]));
        assert_eq!(imp, Implication::Forces(vec![(3, Red)]));
        assert_eq!(c.implications(&partial(&[Some(Blue), Some(Blue), None, Some(Red)])), Implication::Violated);
    }

    #[test]
    fn kind_set_parsing() {
        let s: KindSet = "ell3,eq1".parse().unwrap();
        assert!(s.contains(ConstraintKind::Ell3));
        assert!(s.contains(ConstraintKind::Eq1));
        assert!(!s.contains(ConstraintKind::Centroid));
        assert!("ell3,bogus".parse::<KindSet>().is_err());
        assert_eq!("".parse::<KindSet>().unwrap(), KindSet::empty());
        assert_eq!(KindSet::all().kinds().count(), 4);
    }
}
