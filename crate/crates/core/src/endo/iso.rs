//! Canonical order-isomorphisms between intervals of Q.
//!
//! Every interval with nonempty interior carries a ladder of rational
//! anchors: a center `c`, then repeated simplest rationals toward each
//! endpoint (integer steps toward an infinite one). Rung `k` of one
//! interval maps affinely onto rung `k` of the other.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{rational_between, ExtReal, Rational};
use crate::qset::QInterval;

/// Anchors `s_0 < s_1 < ...` climbing from a start toward `bound`.
#[derive(Clone, Debug)]
struct Ladder {
    prefix: Vec<Rational>,
    bound: ExtReal,
    tail: Tail,
}

#[derive(Clone, Debug)]
enum Tail {
    /// no closed form known yet; extend by `rational_between`
    Open,
    /// `s_{n-1+j} = last + j`
    Integer,
    /// `s_{n-1+j} = (a + j p) / (b + j q)` with `a/b` adjacent to `p/q`
    Farey { a: BigInt, b: BigInt, p: BigInt, q: BigInt },
}

impl Ladder {
    fn new(start: Rational, bound: ExtReal) -> Self {
        let mut l = Ladder { prefix: vec![start], bound, tail: Tail::Open };
        l.settle();
        l
    }

    /// Switches to a closed form once one is available.
    fn settle(&mut self) {
        let last = self.prefix.last().expect("nonempty ladder");
        match &self.bound {
            ExtReal::PosInf => {
                if self.prefix.len() == 1 {
                    let next = last.floor() + Rational::one();
                    self.prefix.push(next);
                }
                self.tail = Tail::Integer;
            }
            ExtReal::Rat(r) => {
                let (p, q) = (r.numer().clone(), r.denom().clone());
                let (a, b) = (last.numer().clone(), last.denom().clone());
                if &p * &b - &a * &q == BigInt::one() {
                    self.tail = Tail::Farey { a, b, p, q };
                }
            }
            _ => {}
        }
    }

    fn tail_at(&self, j: &BigInt) -> Rational {
        let last = self.prefix.last().expect("nonempty ladder");
        match &self.tail {
            Tail::Integer => last + Rational::from_integer(j.clone()),
            Tail::Farey { a, b, p, q } => Rational::new(a + j * p, b + j * q),
            Tail::Open => unreachable!("open tail has no closed form"),
        }
    }

    fn extend_to(&mut self, k: usize) {
        while self.prefix.len() <= k && matches!(self.tail, Tail::Open) {
            let last = self.prefix.last().expect("nonempty ladder");
            let next = rational_between(&ExtReal::Rat(last.clone()), &self.bound).expect("bound above anchors");
            self.prefix.push(next);
            self.settle();
        }
    }

    fn anchor(&mut self, k: usize) -> Rational {
        self.extend_to(k);
        if k < self.prefix.len() {
            return self.prefix[k].clone();
        }
        self.tail_at(&BigInt::from(k + 1 - self.prefix.len()))
    }

    /// Largest `k` with `s_k <= x`, for `s_0 <= x < bound`.
    fn locate(&mut self, x: &ExtReal) -> usize {
        loop {
            let n = self.prefix.len();
            let idx = self.prefix.partition_point(|s| x.cmp_rational(s).is_ge());
            if idx < n {
                return idx - 1;
            }
            if matches!(self.tail, Tail::Open) {
                self.extend_to(n);
                continue;
            }
            let ok = |j: &BigInt| x.cmp_rational(&self.tail_at(j)).is_ge();
            let mut lo = BigInt::zero();
            let mut hi = BigInt::one();
            while ok(&hi) {
                lo = hi.clone();
                hi *= 2;
            }
            while &hi - &lo > BigInt::one() {
                let mid: BigInt = (&lo + &hi) / 2;
                if ok(&mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let j: usize = lo.try_into().expect("rung index fits in usize");
            return n - 1 + j;
        }
    }
}

type LadderKey = (Rational, ExtReal);

type Shared = Arc<Mutex<Ladder>>;

fn ladders() -> &'static Mutex<HashMap<LadderKey, Shared>> {
    static CACHE: OnceLock<Mutex<HashMap<LadderKey, Shared>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn with_ladder<T>(start: &Rational, bound: &ExtReal, f: impl FnOnce(&mut Ladder) -> T) -> T {
    let shared = {
        let mut cache = ladders().lock().unwrap_or_else(|e| e.into_inner());
        cache
            .entry((start.clone(), bound.clone()))
            .or_insert_with(|| Arc::new(Mutex::new(Ladder::new(start.clone(), bound.clone()))))
            .clone()
    };
    let mut ladder = shared.lock().unwrap_or_else(|e| e.into_inner());
    f(&mut ladder)
}

/// The anchor structure of the open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rungs {
    lo: ExtReal,
    hi: ExtReal,
    center: Rational,
}

impl Rungs {
    pub fn new(lo: &ExtReal, hi: &ExtReal) -> Result<Self> {
        let center = rational_between(lo, hi)?;
        Ok(Rungs { lo: lo.clone(), hi: hi.clone(), center })
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    /// Anchor `i`; negative indices walk toward `lo`.
    pub fn anchor(&self, i: i64) -> Rational {
        if i >= 0 {
            with_ladder(&self.center, &self.hi, |l| l.anchor(i as usize))
        } else {
            -with_ladder(&-&self.center, &self.lo.neg(), |l| l.anchor(i.unsigned_abs() as usize))
        }
    }

    /// The `i` with `anchor(i) <= x < anchor(i + 1)`, for `x` strictly inside.
    pub fn locate(&self, x: &ExtReal) -> i64 {
        if x.cmp_rational(&self.center).is_ge() {
            return with_ladder(&self.center, &self.hi, |l| l.locate(x)) as i64;
        }
        let nx = x.neg();
        with_ladder(&-&self.center, &self.lo.neg(), |l| {
            let m = l.locate(&nx);
            if m >= 1 && nx.cmp_rational(&l.anchor(m)).is_eq() {
                -(m as i64)
            } else {
                -(m as i64) - 1
            }
        })
    }

    /// Affine coefficients carrying rung `i` of `self` onto rung `i` of `other`.
    fn rung_affine(&self, other: &Rungs, i: i64) -> (Rational, Rational) {
        let (a0, a1) = (self.anchor(i), self.anchor(i + 1));
        let (b0, b1) = (other.anchor(i), other.anchor(i + 1));
        let slope = (&b1 - &b0) / (&a1 - &a0);
        let offset = &b0 - &slope * &a0;
        (slope, offset)
    }
}

/// The canonical isomorphism `src -> dst`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonIso {
    src: QInterval,
    dst: QInterval,
}

/// Builds the canonical isomorphism between two intervals of the same type.
pub fn canon_iso(src: &QInterval, dst: &QInterval) -> Result<CanonIso> {
    let compatible = src.has_min() == dst.has_min()
        && src.has_max() == dst.has_max()
        && src.is_singleton() == dst.is_singleton();
    if !compatible {
        return Err(Error::TypeMismatch(src.to_string(), dst.to_string()));
    }
    Ok(CanonIso { src: src.clone(), dst: dst.clone() })
}

impl CanonIso {
    pub fn src(&self) -> &QInterval {
        &self.src
    }

    pub fn dst(&self) -> &QInterval {
        &self.dst
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst
    }

    pub fn inverse(&self) -> CanonIso {
        CanonIso { src: self.dst.clone(), dst: self.src.clone() }
    }

    fn rungs(&self) -> (Rungs, Rungs) {
        let s = Rungs::new(self.src.lo(), self.src.hi()).expect("interval with interior");
        let d = Rungs::new(self.dst.lo(), self.dst.hi()).expect("interval with interior");
        (s, d)
    }

    /// Continuous extension to the closure of `src` in the extended reals.
    pub fn point(&self, x: &ExtReal) -> ExtReal {
        if self.src.is_singleton() || x == self.src.lo() {
            return self.dst.lo().clone();
        }
        if x == self.src.hi() {
            return self.dst.hi().clone();
        }
        if self.is_identity() {
            return x.clone();
        }
        let (s, d) = self.rungs();
        let (a, b) = s.rung_affine(&d, s.locate(x));
        x.affine(&a, &b)
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        match self.point(&ExtReal::Rat(q.clone())) {
            ExtReal::Rat(r) => r,
            other => unreachable!("rational mapped to {other}"),
        }
    }

    /// The affine formula of `self` on `[lo, hi]`, if that range sits inside one rung.
    pub fn affine_on(&self, lo: &ExtReal, hi: &ExtReal) -> Option<(Rational, Rational)> {
        if self.src.is_singleton() || !lo.is_finite() || !hi.is_finite() {
            return None;
        }
        if lo <= self.src.lo() || hi >= self.src.hi() {
            return None;
        }
        if self.is_identity() {
            return Some((Rational::one(), Rational::zero()));
        }
        let (s, d) = self.rungs();
        let i = s.locate(lo);
        if hi.cmp_rational(&s.anchor(i + 1)).is_gt() {
            return None;
        }
        Some(s.rung_affine(&d, i))
    }
}

/// Canonical probe points of an interval: its included endpoints, its
/// anchors in the order `0, 1, -1, 2, -2, ...`, and a point inside each
/// of the visited rungs.
pub fn probe_points(i: &QInterval, depth: usize) -> Vec<Rational> {
    if let Some(q) = i.singleton_value() {
        return vec![q.clone()];
    }
    let mut out: Vec<Rational> = i.min().into_iter().chain(i.max()).cloned().collect();
    let r = Rungs::new(i.lo(), i.hi()).expect("interval with interior");
    out.push(r.center().clone());
    let mut k = 1i64;
    while out.len() < depth.max(3) {
        for idx in [k, -k] {
            let a = r.anchor(idx);
            let (near, far) = if idx > 0 { (r.anchor(idx - 1), a.clone()) } else { (a.clone(), r.anchor(idx + 1)) };
            out.push(a);
            out.push(rational_between(&ExtReal::Rat(near), &ExtReal::Rat(far)).expect("distinct anchors"));
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::parse::{parse_ext, parse_interval};

    fn iv(s: &str) -> QInterval {
        parse_interval(s).unwrap()
    }

    #[test]
    fn anchors_of_the_line_are_integers() {
        let r = Rungs::new(&ExtReal::NegInf, &ExtReal::PosInf).unwrap();
        let got: Vec<_> = (-3..=3).map(|i| r.anchor(i)).collect();
        assert_eq!(got, (-3..=3).map(int).collect::<Vec<_>>());
        assert_eq!(r.locate(&ExtReal::Rat(rat(-1, 2))), -1);
        assert_eq!(r.locate(&ExtReal::Rat(int(-1))), -1);
        assert_eq!(r.locate(&ExtReal::Rat(rat(5, 2))), 2);
    }

    #[test]
    fn anchors_toward_rational_bounds() {
        let r = Rungs::new(&ExtReal::zero(), &ExtReal::from_int(1)).unwrap();
        assert_eq!(r.anchor(0), rat(1, 2));
        assert_eq!(r.anchor(1), rat(2, 3));
        assert_eq!(r.anchor(4), rat(5, 6));
        assert_eq!(r.anchor(-1), rat(1, 3));
        assert_eq!(r.anchor(-3), rat(1, 5));
        assert_eq!(r.locate(&ExtReal::Rat(rat(999, 1000))), 998);
    }

    #[test]
    fn anchors_toward_a_surd() {
        let r = Rungs::new(&ExtReal::from_int(1), &parse_ext("sqrt(2)").unwrap()).unwrap();
        assert_eq!(r.anchor(0), rat(4, 3));
        assert_eq!(r.anchor(1), rat(7, 5));
        for k in 0..8 {
            assert!(r.anchor(k) < r.anchor(k + 1));
            assert!(parse_ext("sqrt(2)").unwrap().cmp_rational(&r.anchor(k + 1)).is_gt());
        }
    }

    #[test]
    fn iso_carries_anchors_to_anchors() {
        let src = iv("(0,1)");
        let dst = iv("(0,sqrt(2))");
        let f = canon_iso(&src, &dst).unwrap();
        let rs = Rungs::new(src.lo(), src.hi()).unwrap();
        let rd = Rungs::new(dst.lo(), dst.hi()).unwrap();
        for k in -5..=5 {
            assert_eq!(f.eval(&rs.anchor(k)), rd.anchor(k));
        }
        let probes = probe_points(&src, 100);
        let mut sorted = probes.clone();
        sorted.sort();
        let images: Vec<_> = sorted.iter().map(|q| f.eval(q)).collect();
        assert!(images.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn iso_type_mismatch() {
        assert!(matches!(canon_iso(&iv("[0,1)"), &iv("(0,1)")), Err(Error::TypeMismatch(_, _))));
    }

    #[test]
    fn included_endpoints_match() {
        let f = canon_iso(&iv("[0,1)"), &iv("[5,inf)")).unwrap();
        assert_eq!(f.eval(&int(0)), int(5));
        assert_eq!(f.point(&ExtReal::from_int(1)), ExtReal::PosInf);
    }
}
