//! Exact points of the extended real line: rationals, quadratic surds
//! `a + b*sqrt(d)` and the two infinities.
//!
//! Comparison is exact. Two surds over different radicands are ordered by
//! at most two squarings, never by numerical approximation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `a + b*sqrt(d)` with `b != 0` and `d > 1` squarefree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Rational,
    b: Rational,
    d: u64,
}

impl Surd {
    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtReal {
    NegInf,
    Rat(Rational),
    Surd(Surd),
    PosInf,
}

/// Splits `d` into `s^2 * r` with `r` squarefree.
fn square_part(d: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut r = d;
    let mut p = 2u64;
    while p * p <= r {
        while r % (p * p) == 0 {
            r /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, r)
}

/// Sign of `x + y*sqrt(d)` for squarefree `d > 1`.
fn sign_surd(x: &Rational, y: &Rational, d: u64) -> Ordering {
    let sx = x.cmp(&Rational::zero());
    let sy = y.cmp(&Rational::zero());
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    let lhs = x * x;
    let rhs = y * y * Rational::from_integer(BigInt::from(d));
    match lhs.cmp(&rhs) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `r + s*sqrt(d1) + t*sqrt(d2)`, `d1 != d2`.
fn sign_two_radicands(r: &Rational, s: &Rational, d1: u64, t: &Rational, d2: u64) -> Ordering {
    let sa = sign_surd(r, s, d1);
    let sb = t.cmp(&Rational::zero());
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // |A| vs |B| where A = r + s*sqrt(d1), B = t*sqrt(d2)
    let d1r = Rational::from_integer(BigInt::from(d1));
    let d2r = Rational::from_integer(BigInt::from(d2));
    let x = r * r + s * s * &d1r - t * t * &d2r;
    let y = r * s * Rational::from_integer(BigInt::from(2));
    match sign_surd(&x, &y, d1) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

impl ExtReal {
    pub fn zero() -> Self {
        ExtReal::Rat(Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExtReal::Rat(int(n))
    }

    /// Builds `a + b*sqrt(d)`, canonicalizing square factors of `d` and
    /// collapsing to a rational when the radical part vanishes.
    pub fn surd(a: Rational, b: Rational, d: u64) -> Result<Self> {
        if d == 0 {
            return Ok(ExtReal::Rat(a));
        }
        let (s, r) = square_part(d);
        let b = b * Rational::from_integer(BigInt::from(s));
        if r == 1 {
            return Ok(ExtReal::Rat(a + b));
        }
        if b.is_zero() {
            return Ok(ExtReal::Rat(a));
        }
        Ok(ExtReal::Surd(Surd { a, b, d: r }))
    }

    /// `sqrt(d)` scaled by `b`.
    pub fn sqrt_times(b: Rational, d: u64) -> Self {
        ExtReal::surd(Rational::zero(), b, d).expect("nonnegative radicand")
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Rat(_) | ExtReal::Surd(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExtReal::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExtReal::Rat(_))
    }

    pub fn is_surd(&self) -> bool {
        matches!(self, ExtReal::Surd(_))
    }

    pub fn neg(&self) -> Self {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::Rat(r) => ExtReal::Rat(-r),
            ExtReal::Surd(s) => ExtReal::Surd(Surd { a: -&s.a, b: -&s.b, d: s.d }),
        }
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        match self {
            ExtReal::Rat(r) => ExtReal::Rat(r + q),
            ExtReal::Surd(s) => ExtReal::Surd(Surd { a: &s.a + q, b: s.b.clone(), d: s.d }),
            inf => inf.clone(),
        }
    }

    /// `k * self`; a negative factor swaps the infinities.
    pub fn mul_rational(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return ExtReal::zero();
        }
        let neg = k.is_negative();
        match self {
            ExtReal::Rat(r) => ExtReal::Rat(r * k),
            ExtReal::Surd(s) => ExtReal::Surd(Surd { a: &s.a * k, b: &s.b * k, d: s.d }),
            ExtReal::PosInf if neg => ExtReal::NegInf,
            ExtReal::NegInf if neg => ExtReal::PosInf,
            inf => inf.clone(),
        }
    }

    /// `slope * self + offset`.
    pub fn affine(&self, slope: &Rational, offset: &Rational) -> Self {
        self.mul_rational(slope).add_rational(offset)
    }

    /// Sum of two finite points, when it is again a rational or a surd.
    pub fn checked_add(&self, other: &ExtReal) -> Option<ExtReal> {
        match (self, other) {
            (ExtReal::Rat(r), e) | (e, ExtReal::Rat(r)) if e.is_finite() => Some(e.add_rational(r)),
            (ExtReal::Surd(x), ExtReal::Surd(y)) if x.d == y.d => {
                ExtReal::surd(&x.a + &y.a, &x.b + &y.b, x.d).ok()
            }
            _ => None,
        }
    }

    /// Largest integer not above a finite point.
    pub fn floor(&self) -> Option<BigInt> {
        match self {
            ExtReal::Rat(r) => Some(r.floor().to_integer()),
            ExtReal::Surd(s) => {
                // a + b*sqrt(d) lies within |b|*(isqrt(d)+1) of a
                let approx = s.a.floor().to_integer();
                let spread = s.b.abs().ceil().to_integer() * BigInt::from(isqrt(s.d) + 1) + 1;
                let mut lo = &approx - &spread;
                let mut hi = &approx + &spread + 1;
                // invariant: lo <= self < hi
                while &hi - &lo > BigInt::one() {
                    let sum: BigInt = &lo + &hi;
                    let mid = sum.div_floor(&BigInt::from(2));
                    if compare(&ExtReal::Rat(Rational::from_integer(mid.clone())), self) != Ordering::Greater {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(lo)
            }
            _ => None,
        }
    }

    pub fn ceil(&self) -> Option<BigInt> {
        self.neg().floor().map(|f| -f)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::PosInf => f64::INFINITY,
            ExtReal::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            ExtReal::Surd(s) => {
                s.a.to_f64().unwrap_or(f64::NAN) + s.b.to_f64().unwrap_or(f64::NAN) * (s.d as f64).sqrt()
            }
        }
    }

    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        match self {
            ExtReal::NegInf => Ordering::Less,
            ExtReal::PosInf => Ordering::Greater,
            ExtReal::Rat(r) => r.cmp(q),
            ExtReal::Surd(s) => sign_surd(&(&s.a - q), &s.b, s.d),
        }
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl From<Rational> for ExtReal {
    fn from(r: Rational) -> Self {
        ExtReal::Rat(r)
    }
}

/// Exact order of the extended reals.
pub fn compare(x: &ExtReal, y: &ExtReal) -> Ordering {
    use ExtReal::*;
    match (x, y) {
        (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
        (NegInf, _) | (_, PosInf) => Ordering::Less,
        (_, NegInf) | (PosInf, _) => Ordering::Greater,
        (Rat(p), Rat(q)) => p.cmp(q),
        (Surd(_), Rat(q)) => x.cmp_rational(q),
        (Rat(p), Surd(_)) => y.cmp_rational(p).reverse(),
        (Surd(s), Surd(t)) => {
            let da = &s.a - &t.a;
            if s.d == t.d {
                sign_surd(&da, &(&s.b - &t.b), s.d)
            } else {
                sign_two_radicands(&da, &s.b, s.d, &(-&t.b), t.d)
            }
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

/// `(num/den) ? x` without building a normalized rational first.
fn frac_vs(num: &BigInt, den: &BigInt, x: &ExtReal) -> Ordering {
    x.cmp_rational(&Rational::new(num.clone(), den.clone())).reverse()
}

/// Simplest rational strictly inside `(lo, hi)`: smallest denominator,
/// then smallest absolute numerator. This is the first node of the
/// Stern–Brocot tree (mirrored for negatives, rooted at 0) that falls in the gap.
pub fn rational_between(lo: &ExtReal, hi: &ExtReal) -> Result<Rational> {
    if compare(lo, hi) != Ordering::Less {
        return Err(Error::EmptyGap);
    }
    let zero = ExtReal::zero();
    if *lo < zero && zero < *hi {
        return Ok(Rational::zero());
    }
    if *hi <= zero {
        return Ok(-simplest_positive(&hi.neg(), &lo.neg()));
    }
    Ok(simplest_positive(lo, hi))
}

/// Stern–Brocot descent for `0 <= lo < hi`, with runs in one direction
/// taken in a single exponential/binary search.
fn simplest_positive(lo: &ExtReal, hi: &ExtReal) -> Rational {
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    loop {
        let pm = &p0 + &p1;
        let qm = &q0 + &q1;
        if frac_vs(&pm, &qm, lo) != Ordering::Greater {
            // left bound advances: largest k with (p0 + k p1)/(q0 + k q1) <= lo
            let ok = |k: &BigInt| frac_vs(&(&p0 + k * &p1), &(&q0 + k * &q1), lo) != Ordering::Greater;
            let k = largest_true(ok);
            p0 = &p0 + &k * &p1;
            q0 = &q0 + &k * &q1;
        } else if frac_vs(&pm, &qm, hi) != Ordering::Less {
            let ok = |k: &BigInt| frac_vs(&(k * &p0 + &p1), &(k * &q0 + &q1), hi) != Ordering::Less;
            let k = largest_true(ok);
            p1 = &k * &p0 + &p1;
            q1 = &k * &q0 + &q1;
        } else {
            return Rational::new(pm, qm);
        }
    }
}

/// Largest `k >= 1` with `ok(k)`, given `ok(1)` and monotonicity.
fn largest_true(ok: impl Fn(&BigInt) -> bool) -> BigInt {
    let mut lo = BigInt::one();
    let mut hi = BigInt::from(2);
    while ok(&hi) {
        lo = hi.clone();
        hi = &hi * 2;
    }
    // ok(lo), !ok(hi)
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if ok(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Rank in the simplicity order used by [`rational_between`].
pub fn simplicity_key(q: &Rational) -> (BigInt, BigInt) {
    (q.denom().clone(), q.numer().abs())
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::Rat(r) => write!(f, "{}", fmt_rational(r)),
            ExtReal::Surd(s) => write!(f, "{} + {}*sqrt({})", fmt_rational(&s.a), fmt_rational(&s.b), s.d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ext;

    fn e(s: &str) -> ExtReal {
        parse_ext(s).unwrap()
    }

    #[test]
    fn infinity_rule() {
        assert_eq!(compare(&ExtReal::NegInf, &e("7/10")), Ordering::Less);
        assert_eq!(compare(&ExtReal::PosInf, &e("1 + 1*sqrt(2)")), Ordering::Greater);
    }

    #[test]
    fn surd_versus_rational() {
        assert_eq!(compare(&e("7/10"), &e("0 + 1/2*sqrt(2)")), Ordering::Less);
        assert_eq!(compare(&e("sqrt(2)"), &e("3/2")), Ordering::Less);
        assert_eq!(compare(&e("-sqrt(2)"), &e("-3/2")), Ordering::Greater);
    }

    #[test]
    fn mixed_radicands() {
        assert_eq!(compare(&e("sqrt(2)"), &e("sqrt(3)")), Ordering::Less);
        assert_eq!(compare(&e("1 + 1*sqrt(3)"), &e("0 + 1*sqrt(7)")), Ordering::Greater);
        assert_eq!(compare(&e("3 + -1*sqrt(3)"), &e("0 + 1*sqrt(2)")), Ordering::Less);
    }

    #[test]
    fn zero_coefficient_collapses() {
        let x = ExtReal::surd(int(1), int(0), 2).unwrap();
        assert_eq!(x, ExtReal::Rat(int(1)));
        assert_eq!(compare(&x, &e("1")), Ordering::Equal);
        let y = ExtReal::surd(int(0), int(1), 8).unwrap();
        assert_eq!(y, e("2*sqrt(2)"));
        assert_eq!(ExtReal::surd(int(1), int(1), 9).unwrap(), e("4"));
    }

    #[test]
    fn between_examples() {
        assert_eq!(rational_between(&e("0"), &e("1")).unwrap(), rat(1, 2));
        assert_eq!(rational_between(&e("sqrt(2)"), &e("3/2")).unwrap(), rat(10, 7));
        assert_eq!(rational_between(&e("sqrt(2)"), &e("sqrt(2)")), Err(Error::EmptyGap));
        assert_eq!(rational_between(&ExtReal::NegInf, &ExtReal::PosInf).unwrap(), int(0));
        assert_eq!(rational_between(&ExtReal::NegInf, &e("-5/2")).unwrap(), int(-3));
        assert_eq!(rational_between(&e("1000000"), &ExtReal::PosInf).unwrap(), int(1000001));
        assert_eq!(rational_between(&e("0"), &e("1/1000000")).unwrap(), rat(1, 1000001));
    }

    #[test]
    fn floor_of_surds() {
        assert_eq!(e("sqrt(2)").floor().unwrap(), BigInt::from(1));
        assert_eq!(e("-sqrt(2)").floor().unwrap(), BigInt::from(-2));
        assert_eq!(e("100 + -7/3*sqrt(5)").floor().unwrap(), BigInt::from(94));
        assert_eq!(e("-sqrt(2)").ceil().unwrap(), BigInt::from(-1));
    }
}
