//! Colors, partial colorings and the justification trail.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn opposite(self) -> Self {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    /// `true` is red, matching positive DIMACS literals.
    pub fn from_bit(red: bool) -> Self {
        if red {
            Color::Red
        } else {
            Color::Blue
        }
    }

    pub fn is_red(self) -> bool {
        self == Color::Red
    }

    pub fn majority(a: Color, b: Color, c: Color) -> Color {
        let reds = [a, b, c].iter().filter(|c| c.is_red()).count();
        Color::from_bit(reds >= 2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Color {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "red" | "r" => Ok(Color::Red),
            "blue" | "b" => Ok(Color::Blue),
            _ => Err(format!("unknown color `{s}`")),
        }
    }
}

/// Why a point received its color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reason {
    Seed,
    Decision,
    /// Forced by the constraint with this id.
    Forced(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub point: usize,
    pub color: Color,
    pub reason: Reason,
}

/// Colors over point indices together with the ordered trail that produced
/// them. The trail always replays to exactly `colors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
    trail: Vec<Step>,
}

impl PartialColoring {
    pub fn new(n: usize) -> Self {
        Self { colors: vec![None; n], trail: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, point: usize) -> Option<Color> {
        self.colors[point]
    }

    pub fn colors(&self) -> &[Option<Color>] {
        &self.colors
    }

    pub fn trail(&self) -> &[Step] {
        &self.trail
    }

    /// Color an unset point and record why.
    ///
    /// Panics if the point already has a color: callers decide conflicts
    /// before assigning.
    pub fn assign(&mut self, point: usize, color: Color, reason: Reason) {
        assert!(self.colors[point].is_none(), "point {point} is already colored");
        self.colors[point] = Some(color);
        self.trail.push(Step { point, color, reason });
    }

    /// Undo assignments until the trail has `len` steps.
    pub fn backtrack(&mut self, len: usize) {
        while self.trail.len() > len {
            let step = self.trail.pop().expect("trail longer than len");
            self.colors[step.point] = None;
        }
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    /// The total coloring, if every point is set.
    pub fn to_total(&self) -> Option<Vec<Color>> {
        self.colors.iter().copied().collect()
    }
}
