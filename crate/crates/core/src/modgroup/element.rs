use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of SL2(Z), `(a b; c d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = i128::from(a) * i128::from(d) - i128::from(b) * i128::from(c);
        if det != 1 {
            return Err(Error::Domain(format!("matrix ({a} {b}; {c} {d}) has determinant {det}")));
        }
        Ok(Self { a, b, c, d })
    }

    pub(crate) const fn raw(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Self::raw(1, 0, 0, 1)
    }

    pub const fn minus_identity() -> Self {
        Self::raw(-1, 0, 0, -1)
    }

    /// `S = (0 -1; 1 0)`.
    pub const fn s() -> Self {
        Self::raw(0, -1, 1, 0)
    }

    /// `U^n = (1 n; 0 1)`.
    pub const fn u(n: i64) -> Self {
        Self::raw(1, n, 0, 1)
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d, -self.b, -self.c, self.a)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    /// `j(g, z) = cz + d`.
    pub fn j(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.c as f64 * z.re + self.d as f64, self.c as f64 * z.im)
    }

    /// Mobius action `(az + b)/(cz + d)`; the imaginary part is formed as
    /// `y/|cz+d|^2` so it stays positive.
    pub fn act(&self, z: Complex64) -> Complex64 {
        if self.c == 0 {
            let d = self.d as f64;
            return Complex64::new((self.a as f64 * z.re + self.b as f64) / d, z.im / (d * d));
        }
        let j = self.j(z);
        let n = j.norm_sqr();
        let num = Complex64::new(self.a as f64 * z.re + self.b as f64, self.a as f64 * z.im);
        let re = (num * j.conj()).re / n;
        Complex64::new(re, z.im / n)
    }

    pub fn pow(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inverse() } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `g h g^{-1}`.
    pub fn conjugate(&self, h: &Self) -> Self {
        *self * *h * self.inverse()
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for GroupElement {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::raw(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Neg for GroupElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self::raw(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// `(g, x, y)` with `g = gcd(a, b) >= 0` and `a x + b y = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m > 0`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// Completes a coprime bottom row `(c, d)` to a matrix `(a b; c d)`.
pub fn complete_bottom_row(c: i64, d: i64) -> Option<GroupElement> {
    // a d - b c = 1
    let (g, x, y) = ext_gcd(d, c);
    if g != 1 {
        return None;
    }
    // x d + y c = 1  =>  a = x, b = -y
    Some(GroupElement::raw(x, -y, c, d))
}

/// Completes a coprime left column `(a, c)` to a matrix `(a b; c d)`.
pub fn complete_left_column(a: i64, c: i64) -> Option<GroupElement> {
    let (g, x, y) = ext_gcd(a, c);
    if g != 1 {
        return None;
    }
    // a x + c y = 1 => d = x, b = -y
    Some(GroupElement::raw(a, -y, c, x))
}

/// Reduces `z` into the standard fundamental domain. Returns `(g, g z)`.
pub fn reduce_to_fd(z: Complex64) -> (GroupElement, Complex64) {
    const EPS: f64 = 1e-13;
    let mut g = GroupElement::identity();
    let mut w = z;
    for _ in 0..10_000 {
        if w.re.abs() > 0.5 + EPS {
            let n = w.re.round() as i64;
            g = GroupElement::u(-n) * g;
            w = g.act(z);
        }
        if w.norm_sqr() < 1.0 - EPS {
            g = GroupElement::s() * g;
            w = g.act(z);
            continue;
        }
        break;
    }
    (g, g.act(z))
}
