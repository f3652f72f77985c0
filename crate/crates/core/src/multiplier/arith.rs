//! Exact arithmetic behind the eta and theta multipliers.

use crate::modgroup::gcd;

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: i128,
    pub den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd128(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Self { num: s * num / g, den: s * den / g }
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn neg(self) -> Self {
        Self { num: -self.num, den: self.den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Dedekind sum `s(h, k)` for `k >= 1`, `gcd(h, k) = 1`, by the reciprocity
/// law `s(h,k) + s(k,h) = (h^2 + k^2 + 1)/(12hk) - 1/4`.
pub fn dedekind_sum(h: i64, k: i64) -> Rational {
    assert!(k >= 1, "dedekind_sum needs k >= 1");
    debug_assert_eq!(gcd(h, k), 1);
    let mut h = i128::from(h).rem_euclid(i128::from(k));
    let mut k = i128::from(k);
    let mut sign = 1i128;
    let mut acc = Rational::new(0, 1);
    while h != 0 {
        let term = Rational::new(h * h + k * k + 1, 12 * h * k).add(Rational::new(-1, 4));
        acc = acc.add(Rational::new(sign * term.num, term.den));
        sign = -sign;
        let r = k.rem_euclid(h);
        k = h;
        h = r;
    }
    acc
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`, any integer `a`.
pub fn jacobi(a: i64, n: i64) -> i32 {
    assert!(n >= 1 && n % 2 == 1, "jacobi needs odd positive n");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Shimura's extension of the Jacobi symbol to odd `d` of either sign:
/// `(c/d) = (c/|d|)`, times `-1` when both `c < 0` and `d < 0`; `(0/+-1) = 1`.
pub fn shimura_symbol(c: i64, d: i64) -> i32 {
    assert!(d % 2 != 0, "shimura symbol needs odd d");
    if c == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let j = jacobi(c, d.abs());
    if c < 0 && d < 0 {
        -j
    } else {
        j
    }
}
