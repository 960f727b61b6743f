//! Exact arithmetic in Q(√3, √11) with basis {1, √3, √11, √33}.
//!
//! Every coordinate, midpoint, centroid and squared distance the toolkit
//! touches lives in this field, so all verification is done with exact
//! rational equality. Floating point only appears in [`FieldScalar::approx`],
//! which exists for rendering.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const SQRT3: f64 = 1.732_050_807_568_877_2;
const SQRT11: f64 = 3.316_624_790_355_4;
const SQRT33: f64 = 5.744_562_646_538_029;

/// `r0 + r3·√3 + r11·√11 + r33·√33` with rational coefficients.
///
/// `BigRational` keeps every coefficient reduced with a positive
/// denominator, so the derived `Eq`/`Hash` are componentwise rational
/// equality. That is exact equality of field elements because the basis is
/// linearly independent over Q.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldScalar {
    pub r0: BigRational,
    pub r3: BigRational,
    pub r11: BigRational,
    pub r33: BigRational,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FieldScalar {
    pub fn new(r0: BigRational, r3: BigRational, r11: BigRational, r33: BigRational) -> Self {
        Self { r0, r3, r11, r33 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(int(v))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self { r0: q, ..Self::default() }
    }

    /// Coefficients given as `(numerator, denominator)` pairs, in basis order.
    pub fn from_fractions(parts: [(i64, i64); 4]) -> Self {
        let [a, b, c, d] = parts;
        Self::new(frac(a.0, a.1), frac(b.0, b.1), frac(c.0, c.1), frac(d.0, d.1))
    }

    /// Integer coefficients, in basis order.
    pub fn from_ints(parts: [i64; 4]) -> Self {
        Self::new(int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]))
    }

    pub fn sqrt3() -> Self {
        Self::from_ints([0, 1, 0, 0])
    }

    pub fn sqrt11() -> Self {
        Self::from_ints([0, 0, 1, 0])
    }

    pub fn sqrt33() -> Self {
        Self::from_ints([0, 0, 0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.r0.is_zero() && self.r3.is_zero() && self.r11.is_zero() && self.r33.is_zero()
    }

    /// True iff this element is exactly the rational `q`.
    pub fn eq_rational(&self, q: &BigRational) -> bool {
        self.r3.is_zero() && self.r11.is_zero() && self.r33.is_zero() && &self.r0 == q
    }

    pub fn eq_int(&self, v: i64) -> bool {
        self.eq_rational(&int(v))
    }

    /// Multiply every coefficient by a rational.
    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(&self.r0 * q, &self.r3 * q, &self.r11 * q, &self.r33 * q)
    }

    pub fn div_int(&self, d: i64) -> Self {
        self.scale(&frac(1, d))
    }

    /// Double-precision value, for rendering only.
    ///
    /// Each coefficient is rounded to the nearest double and combined with
    /// correctly rounded surd constants, so the absolute error is a few ulps
    /// of `|r0| + 1.74|r3| + 3.32|r11| + 5.75|r33|`. For coefficients of
    /// magnitude ≤ 10⁶ that is a relative error below 1e-12.
    pub fn approx(&self) -> f64 {
        let f = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
        f(&self.r0) + f(&self.r3) * SQRT3 + f(&self.r11) * SQRT11 + f(&self.r33) * SQRT33
    }

    pub fn coefficients(&self) -> [&BigRational; 4] {
        [&self.r0, &self.r3, &self.r11, &self.r33]
    }
}

impl Add for &FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: &FieldScalar) -> FieldScalar {
        FieldScalar::new(&self.r0 + &rhs.r0, &self.r3 + &rhs.r3, &self.r11 + &rhs.r11, &self.r33 + &rhs.r33)
    }
}

impl Sub for &FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: &FieldScalar) -> FieldScalar {
        FieldScalar::new(&self.r0 - &rhs.r0, &self.r3 - &rhs.r3, &self.r11 - &rhs.r11, &self.r33 - &rhs.r33)
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar::new(-&self.r0, -&self.r3, -&self.r11, -&self.r33)
    }
}

// √3·√11 = √33, √3·√33 = 3√11, √11·√33 = 11√3.
impl Mul for &FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: &FieldScalar) -> FieldScalar {
        let (a0, a3, a11, a33) = (&self.r0, &self.r3, &self.r11, &self.r33);
        let (b0, b3, b11, b33) = (&rhs.r0, &rhs.r3, &rhs.r11, &rhs.r33);
        let three = int(3);
        let eleven = int(11);
        let r0 = a0 * b0 + &three * (a3 * b3) + &eleven * (a11 * b11) + int(33) * (a33 * b33);
        let r3 = a0 * b3 + a3 * b0 + &eleven * (a11 * b33 + a33 * b11);
        let r11 = a0 * b11 + a11 * b0 + &three * (a3 * b33 + a33 * b3);
        let r33 = a0 * b33 + a33 * b0 + a3 * b11 + a11 * b3;
        FieldScalar::new(r0, r3, r11, r33)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldScalar {
            type Output = FieldScalar;
            fn $m(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (coef, unit) in [(&self.r0, ""), (&self.r3, "√3"), (&self.r11, "√11"), (&self.r33, "√33")] {
            if coef.is_zero() {
                continue;
            }
            let neg = coef.is_negative();
            if wrote {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let mag = coef.abs();
            if unit.is_empty() || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            f.write_str(unit)?;
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldScalar({self})")
    }
}

/// A point of the plane with exact coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PlanePoint {
    pub x: FieldScalar,
    pub y: FieldScalar,
}

/// Integer coordinates `[a, b, c, d]` of a point
/// `((a√3 + b√11)/12, (c + d√33)/12)`.
pub type Quadruple = [i64; 4];

impl PlanePoint {
    pub fn new(x: FieldScalar, y: FieldScalar) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_quadruple(q: Quadruple) -> Self {
        let [a, b, c, d] = q;
        Self {
            x: FieldScalar::from_fractions([(0, 1), (a, 12), (b, 12), (0, 1)]),
            y: FieldScalar::from_fractions([(c, 12), (0, 1), (0, 1), (d, 12)]),
        }
    }

    pub fn translate(&self, dx: &FieldScalar, dy: &FieldScalar) -> Self {
        Self::new(&self.x + dx, &self.y + dy)
    }

    pub fn approx(&self) -> (f64, f64) {
        (self.x.approx(), self.y.approx())
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}
