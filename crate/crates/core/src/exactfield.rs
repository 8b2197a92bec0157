//! Exact arithmetic in ℚ(√2, √5) and unit quaternions over that field.
//!
//! An element is stored as `a + b√2 + c√5 + d√10` with arbitrary-precision
//! rational coordinates. The field is large enough to hold every coordinate
//! of the binary tetrahedral, octahedral and icosahedral groups.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FieldElement {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        FieldElement { a, b, c, d }
    }

    pub fn zero() -> Self {
        Self::from_ratio(0, 1)
    }

    pub fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        FieldElement::new(rat(n, d), BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    pub fn sqrt2() -> Self {
        FieldElement::new(BigRational::zero(), BigRational::one(), BigRational::zero(), BigRational::zero())
    }

    pub fn sqrt5() -> Self {
        FieldElement::new(BigRational::zero(), BigRational::zero(), BigRational::one(), BigRational::zero())
    }

    /// The golden ratio (1+√5)/2.
    pub fn phi() -> Self {
        FieldElement::new(rat(1, 2), BigRational::zero(), rat(1, 2), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        FieldElement::new(&self.a * r, &self.b * r, &self.c * r, &self.d * r)
    }

    /// Image under √2 ↦ −√2.
    fn conj2(&self) -> Self {
        FieldElement::new(self.a.clone(), -&self.b, self.c.clone(), -&self.d)
    }

    /// Image under √5 ↦ −√5.
    fn conj5(&self) -> Self {
        FieldElement::new(self.a.clone(), self.b.clone(), -&self.c, -&self.d)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("division by zero in ℚ(√2,√5)".into()));
        }
        // x·σ₂(x) lies in ℚ(√5); multiplying by its √5-conjugate lands in ℚ.
        let s2 = self.conj2();
        let y = self * &s2;
        let s5 = y.conj5();
        let n = &y * &s5;
        debug_assert!(n.b.is_zero() && n.c.is_zero() && n.d.is_zero());
        let inv_n = n.a.recip();
        Ok((&s2 * &s5).scale(&inv_n))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn to_f64(&self) -> f64 {
        let s2 = std::f64::consts::SQRT_2;
        let s5 = 5f64.sqrt();
        let s10 = 10f64.sqrt();
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        f(&self.a) + f(&self.b) * s2 + f(&self.c) * s5 + f(&self.d) * s10
    }

    /// Coordinates as rational strings, in the order 1, √2, √5, √10.
    pub fn coordinate_strings(&self) -> [String; 4] {
        [self.a.to_string(), self.b.to_string(), self.c.to_string(), self.d.to_string()]
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coordinate_strings().serialize(s)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [(&self.a, ""), (&self.b, "√2"), (&self.c, "√5"), (&self.d, "√10")];
        let mut wrote = false;
        for (coef, unit) in terms {
            if coef.is_zero() {
                continue;
            }
            let sign = if coef.is_negative() { "-" } else if wrote { "+" } else { "" };
            let mag = coef.abs();
            if unit.is_empty() {
                write!(f, "{sign}{mag}")?;
            } else if mag.is_one() {
                write!(f, "{sign}{unit}")?;
            } else {
                write!(f, "{sign}{mag}{unit}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        FieldElement::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        FieldElement::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&o.a, &o.b, &o.c, &o.d);
        let two = rat(2, 1);
        let five = rat(5, 1);
        let ten = rat(10, 1);
        // √2·√2=2, √5·√5=5, √10·√10=10, √2·√5=√10, √2·√10=2√5, √5·√10=5√2.
        let a = a1 * a2 + &two * (b1 * b2) + &five * (c1 * c2) + &ten * (d1 * d2);
        let b = a1 * b2 + b1 * a2 + &five * (c1 * d2 + d1 * c2);
        let c = a1 * c2 + c1 * a2 + &two * (b1 * d2 + d1 * b2);
        let d = a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2;
        FieldElement::new(a, b, c, d)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// `w + xi + yj + zk`, identified with the SU(2) matrix `[[α, −β̄], [β, ᾱ]]`
/// where `α = w + xi` and `β = y − zi`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Quaternion {
    pub w: FieldElement,
    pub x: FieldElement,
    pub y: FieldElement,
    pub z: FieldElement,
}

impl Quaternion {
    pub fn new(w: FieldElement, x: FieldElement, y: FieldElement, z: FieldElement) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_ratios(c: [(i64, i64); 4]) -> Self {
        let f = |(n, d)| FieldElement::from_ratio(n, d);
        Quaternion::new(f(c[0]), f(c[1]), f(c[2]), f(c[3]))
    }

    pub fn one() -> Self {
        Self::from_ratios([(1, 1), (0, 1), (0, 1), (0, 1)])
    }

    pub fn i() -> Self {
        Self::from_ratios([(0, 1), (1, 1), (0, 1), (0, 1)])
    }

    pub fn j() -> Self {
        Self::from_ratios([(0, 1), (0, 1), (1, 1), (0, 1)])
    }

    pub fn k() -> Self {
        Self::from_ratios([(0, 1), (0, 1), (0, 1), (1, 1)])
    }

    pub fn norm_sq(&self) -> FieldElement {
        &(&(&self.w * &self.w) + &(&self.x * &self.x)) + &(&(&self.y * &self.y) + &(&self.z * &self.z))
    }

    pub fn conjugate(&self) -> Self {
        Quaternion::new(self.w.clone(), -&self.x, -&self.y, -&self.z)
    }

    pub fn neg(&self) -> Self {
        Quaternion::new(-&self.w, -&self.x, -&self.y, -&self.z)
    }

    pub fn to_numeric(&self) -> [f64; 4] {
        [self.w.to_f64(), self.x.to_f64(), self.y.to_f64(), self.z.to_f64()]
    }

    /// The pair (α, β) of the associated SU(2) matrix.
    pub fn to_su2(&self) -> (Complex64, Complex64) {
        let [w, x, y, z] = self.to_numeric();
        (Complex64::new(w, x), Complex64::new(y, -z))
    }

    /// Rotation matrix of `v ↦ q v q̄`, the image under SU(2) → SO(3).
    pub fn rotation(&self) -> [[FieldElement; 3]; 3] {
        let (w, x, y, z) = (&self.w, &self.x, &self.y, &self.z);
        let two = FieldElement::from_ratio(2, 1);
        let m = |a: &FieldElement, b: &FieldElement| a * b;
        let (ww, xx, yy, zz) = (m(w, w), m(x, x), m(y, y), m(z, z));
        let (wx, wy, wz) = (m(w, x), m(w, y), m(w, z));
        let (xy, xz, yz) = (m(x, y), m(x, z), m(y, z));
        [
            [
                &(&ww + &xx) - &(&yy + &zz),
                &two * &(&xy - &wz),
                &two * &(&wy + &xz),
            ],
            [
                &two * &(&xy + &wz),
                &(&ww - &xx) + &(&yy - &zz),
                &two * &(&yz - &wx),
            ],
            [
                &two * &(&xz - &wy),
                &two * &(&wx + &yz),
                &(&ww - &xx) - &(&yy - &zz),
            ],
        ]
    }
}

/// Hamilton product.
impl Mul for &Quaternion {
    type Output = Quaternion;
    fn mul(self, q: &Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (&self.w, &self.x, &self.y, &self.z);
        let (a2, b2, c2, d2) = (&q.w, &q.x, &q.y, &q.z);
        let w = &(&(a1 * a2) - &(b1 * b2)) - &(&(c1 * c2) + &(d1 * d2));
        let x = &(&(a1 * b2) + &(b1 * a2)) + &(&(c1 * d2) - &(d1 * c2));
        let y = &(&(a1 * c2) - &(b1 * d2)) + &(&(c1 * a2) + &(d1 * b2));
        let z = &(&(a1 * d2) + &(b1 * c2)) - &(&(c1 * b2) - &(d1 * a2));
        Quaternion::new(w, x, y, z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        &self * &q
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.w, self.x, self.y, self.z)
    }
}
