//! Finitely presented subsets of Q.
//!
//! Intervals always denote sets of rationals; their endpoints may be
//! irrational or infinite. A [`QSet`] is kept in a canonical form so that
//! equal sets of rationals compare equal structurally.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{fmt_rational, rational_between, simplicity_key, ExtReal, Rational};

/// `{x in Q : lo <| x <| hi}` with `<|` strict or not per flag.
///
/// A closed flag is only ever set at a finite rational endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QInterval {
    lo: ExtReal,
    lo_closed: bool,
    hi: ExtReal,
    hi_closed: bool,
}

impl QInterval {
    /// Normalizes flags; `None` when the interval holds no rational.
    pub fn new(lo: ExtReal, lo_closed: bool, hi: ExtReal, hi_closed: bool) -> Option<Self> {
        let lo_closed = lo_closed && lo.is_rational();
        let hi_closed = hi_closed && hi.is_rational();
        match lo.cmp(&hi) {
            Ordering::Greater => None,
            Ordering::Equal if !(lo_closed && hi_closed) => None,
            _ => Some(QInterval { lo, lo_closed, hi, hi_closed }),
        }
    }

    pub fn try_new(lo: ExtReal, lo_closed: bool, hi: ExtReal, hi_closed: bool) -> Result<Self> {
        Self::new(lo, lo_closed, hi, hi_closed).ok_or(Error::EmptyInterval)
    }

    pub fn open(lo: ExtReal, hi: ExtReal) -> Option<Self> {
        Self::new(lo, false, hi, false)
    }

    pub fn closed(lo: ExtReal, hi: ExtReal) -> Option<Self> {
        Self::new(lo, true, hi, true)
    }

    pub fn full() -> Self {
        QInterval { lo: ExtReal::NegInf, lo_closed: false, hi: ExtReal::PosInf, hi_closed: false }
    }

    pub fn point(q: Rational) -> Self {
        let e = ExtReal::Rat(q);
        QInterval { lo: e.clone(), lo_closed: true, hi: e, hi_closed: true }
    }

    pub fn lo(&self) -> &ExtReal {
        &self.lo
    }

    pub fn hi(&self) -> &ExtReal {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn has_min(&self) -> bool {
        self.lo_closed
    }

    pub fn has_max(&self) -> bool {
        self.hi_closed
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_full(&self) -> bool {
        self.lo == ExtReal::NegInf && self.hi == ExtReal::PosInf
    }

    pub fn singleton_value(&self) -> Option<&Rational> {
        if self.is_singleton() {
            self.lo.as_rational()
        } else {
            None
        }
    }

    pub fn min(&self) -> Option<&Rational> {
        if self.lo_closed {
            self.lo.as_rational()
        } else {
            None
        }
    }

    pub fn max(&self) -> Option<&Rational> {
        if self.hi_closed {
            self.hi.as_rational()
        } else {
            None
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        let above = match self.lo.cmp_rational(q) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        above
            && match self.hi.cmp_rational(q) {
                Ordering::Greater => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Less => false,
            }
    }

    /// Whether `self` is a subset of `other`.
    pub fn is_subset(&self, other: &QInterval) -> bool {
        lower_cmp(&other.lo, other.lo_closed, &self.lo, self.lo_closed) != Ordering::Greater
            && upper_cmp(&self.hi, self.hi_closed, &other.hi, other.hi_closed) != Ordering::Greater
    }

    pub fn intersect(&self, other: &QInterval) -> Option<QInterval> {
        let (lo, lo_closed) =
            if lower_cmp(&self.lo, self.lo_closed, &other.lo, other.lo_closed) == Ordering::Less {
                (other.lo.clone(), other.lo_closed)
            } else {
                (self.lo.clone(), self.lo_closed)
            };
        let (hi, hi_closed) =
            if upper_cmp(&self.hi, self.hi_closed, &other.hi, other.hi_closed) == Ordering::Greater {
                (other.hi.clone(), other.hi_closed)
            } else {
                (self.hi.clone(), self.hi_closed)
            };
        QInterval::new(lo, lo_closed, hi, hi_closed)
    }

    /// Closed in the subspace topology of Q: writable as `[p,q]` with
    /// extended-real `p, q`.
    pub fn is_closed_in_q(&self) -> bool {
        let lo_ok = self.lo_closed || !self.lo.is_rational();
        let hi_ok = self.hi_closed || !self.hi.is_rational();
        lo_ok && hi_ok
    }

    /// Simplest rational of the interval (included endpoints count).
    pub fn simplest(&self) -> Rational {
        if let Some(q) = self.singleton_value() {
            return q.clone();
        }
        let mut best = rational_between(&self.lo, &self.hi).expect("nonempty interior");
        for end in [self.min(), self.max()].into_iter().flatten() {
            if simplicity_key(end) < simplicity_key(&best) {
                best = end.clone();
            }
        }
        best
    }

    /// Whether every point of `self` lies strictly below every point of `other`.
    pub fn entirely_below(&self, other: &QInterval) -> bool {
        match self.hi.cmp(&other.lo) {
            Ordering::Less => true,
            Ordering::Equal => !(self.hi_closed && other.lo_closed),
            Ordering::Greater => false,
        }
    }
}

/// Order on lower bounds: a closed bound at `x` sits before an open one.
fn lower_cmp(a: &ExtReal, ac: bool, b: &ExtReal, bc: bool) -> Ordering {
    a.cmp(b).then_with(|| bc.cmp(&ac))
}

/// Order on upper bounds: an open bound at `x` sits before a closed one.
fn upper_cmp(a: &ExtReal, ac: bool, b: &ExtReal, bc: bool) -> Ordering {
    a.cmp(b).then_with(|| ac.cmp(&bc))
}

impl fmt::Display for QInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.singleton_value() {
            return write!(f, "{{{}}}", fmt_rational(q));
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Canonical finite union of intervals of Q.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QSet {
    components: Vec<QInterval>,
}

impl QSet {
    pub fn empty() -> Self {
        QSet { components: Vec::new() }
    }

    pub fn full() -> Self {
        QSet { components: vec![QInterval::full()] }
    }

    pub fn from_interval(i: QInterval) -> Self {
        QSet { components: vec![i] }
    }

    /// Sorts and merges. `(0,sqrt(2)) u (sqrt(2),1)` becomes `(0,1)`.
    pub fn normalize(raw: impl IntoIterator<Item = QInterval>) -> Self {
        let mut items: Vec<QInterval> = raw.into_iter().collect();
        items.sort_by(|a, b| lower_cmp(&a.lo, a.lo_closed, &b.lo, b.lo_closed));
        let mut out: Vec<QInterval> = Vec::with_capacity(items.len());
        for next in items {
            if let Some(cur) = out.last_mut() {
                let touches = match next.lo.cmp(&cur.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => !cur.hi.is_rational() || cur.hi_closed || next.lo_closed,
                    Ordering::Greater => false,
                };
                if touches {
                    if upper_cmp(&next.hi, next.hi_closed, &cur.hi, cur.hi_closed) == Ordering::Greater {
                        cur.hi = next.hi;
                        cur.hi_closed = next.hi_closed;
                    }
                    continue;
                }
            }
            out.push(next);
        }
        QSet { components: out }
    }

    pub fn components(&self) -> &[QInterval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.components.len() == 1 && self.components[0].is_full()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        // components are sorted; first one whose upper end is not below q
        let idx = self.components.partition_point(|c| match c.hi.cmp_rational(q) {
            Ordering::Less => true,
            Ordering::Equal => !c.hi_closed,
            Ordering::Greater => false,
        });
        self.components.get(idx).is_some_and(|c| c.contains(q))
    }

    pub fn complement(&self) -> QSet {
        let mut out = Vec::new();
        let mut lo = ExtReal::NegInf;
        let mut lo_closed = false;
        for c in &self.components {
            if let Some(gap) = QInterval::new(lo, lo_closed, c.lo.clone(), !c.lo_closed) {
                out.push(gap);
            }
            lo = c.hi.clone();
            lo_closed = !c.hi_closed;
        }
        if let Some(gap) = QInterval::new(lo, lo_closed, ExtReal::PosInf, false) {
            out.push(gap);
        }
        QSet { components: out }
    }

    pub fn union(&self, other: &QSet) -> QSet {
        QSet::normalize(self.components.iter().chain(&other.components).cloned())
    }

    pub fn intersect(&self, other: &QSet) -> QSet {
        let mut out = Vec::new();
        for a in &self.components {
            for b in &other.components {
                if let Some(c) = a.intersect(b) {
                    out.push(c);
                }
            }
        }
        QSet::normalize(out)
    }

    pub fn intersect_interval(&self, i: &QInterval) -> QSet {
        QSet::normalize(self.components.iter().filter_map(|c| c.intersect(i)))
    }

    /// The classes of the convexity relation: the components themselves.
    pub fn maximal_intervals(&self) -> Vec<QInterval> {
        self.components.clone()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(QInterval::is_singleton)
    }

    pub fn max(&self) -> Option<&Rational> {
        self.components.last().and_then(QInterval::max)
    }

    pub fn min(&self) -> Option<&Rational> {
        self.components.first().and_then(QInterval::min)
    }

    pub fn sup(&self) -> Option<&ExtReal> {
        self.components.last().map(QInterval::hi)
    }

    pub fn inf(&self) -> Option<&ExtReal> {
        self.components.first().map(QInterval::lo)
    }

    /// Largest member strictly below `x`, if the set has one there.
    pub fn max_below(&self, x: &Rational) -> Option<Rational> {
        let below = QInterval::new(ExtReal::NegInf, false, ExtReal::Rat(x.clone()), false)?;
        self.intersect_interval(&below).max().cloned()
    }

    pub fn min_above(&self, x: &Rational) -> Option<Rational> {
        let above = QInterval::new(ExtReal::Rat(x.clone()), false, ExtReal::PosInf, false)?;
        self.intersect_interval(&above).min().cloned()
    }

    /// Order type of the set, as a reduced word over `{P, D}`.
    pub fn signature(&self) -> Signature {
        Signature::reduce(&self.atoms())
    }

    /// Unreduced decomposition: included endpoints are `P`, open interiors `D`.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut word = Vec::new();
        for c in &self.components {
            if c.is_singleton() {
                word.push(Atom::P);
                continue;
            }
            if c.lo_closed {
                word.push(Atom::P);
            }
            word.push(Atom::D);
            if c.hi_closed {
                word.push(Atom::P);
            }
        }
        word
    }
}

impl fmt::Display for QSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// a single point
    P,
    /// a dense block without endpoints
    D,
}

/// Reduced `{P, D}` word: no factor `DD`, no factor `DPD`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(Vec<Atom>);

impl Signature {
    pub fn reduce(word: &[Atom]) -> Signature {
        let mut stack: Vec<Atom> = Vec::with_capacity(word.len());
        for &a in word {
            stack.push(a);
            loop {
                let n = stack.len();
                if n >= 2 && stack[n - 1] == Atom::D && stack[n - 2] == Atom::D {
                    stack.pop();
                } else if n >= 3 && stack[n - 1] == Atom::D && stack[n - 2] == Atom::P && stack[n - 3] == Atom::D {
                    stack.truncate(n - 2);
                } else {
                    break;
                }
            }
        }
        Signature(stack)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn is_reduced(word: &[Atom]) -> bool {
        !word.windows(2).any(|w| w == [Atom::D, Atom::D])
            && !word.windows(3).any(|w| w == [Atom::D, Atom::P, Atom::D])
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "empty");
        }
        for a in &self.0 {
            write!(f, "{}", if *a == Atom::P { 'P' } else { 'D' })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::parse::{parse_interval, parse_qset};

    fn q(s: &str) -> QSet {
        parse_qset(s).unwrap()
    }

    fn iv(s: &str) -> QInterval {
        parse_interval(s).unwrap()
    }

    #[test]
    fn merges_across_irrational_gap() {
        assert_eq!(q("(0,1/2*sqrt(2)) u (1/2*sqrt(2),1)"), q("(0,1)"));
        // sqrt(2) > 1, so the second part holds no rational
        assert_eq!(q("(0,sqrt(2)) u (sqrt(2),1)"), q("(0,sqrt(2))"));
        assert_eq!(q("[0,1] u (1,2)"), q("[0,2)"));
        assert_eq!(q("(0,1) u (1,2)").components().len(), 2);
        assert!(QSet::normalize(Vec::new()).is_empty());
    }

    #[test]
    fn closed_flags_demoted_at_irrational_ends() {
        let i = QInterval::new(ExtReal::sqrt_times(int(1), 2), true, ExtReal::PosInf, true).unwrap();
        assert!(!i.lo_closed() && !i.hi_closed());
        assert!(QInterval::new(ExtReal::sqrt_times(int(1), 2), true, ExtReal::sqrt_times(int(1), 2), true).is_none());
    }

    #[test]
    fn membership() {
        assert!(q("(0,1)").contains(&rat(1, 2)));
        assert!(!q("(0,1)").contains(&int(1)));
        assert!(q("[0,2)").contains(&int(0)));
        assert!(q("(-inf,0] u {1/2} u (1, 1+1*sqrt(2))").contains(&rat(1, 2)));
        assert!(!q("(-inf,0] u {1/2} u (1, 1+1*sqrt(2))").contains(&rat(5, 2)));
    }

    #[test]
    fn complements() {
        assert!(QSet::full().complement().is_empty());
        assert_eq!(q("(0,1)").complement(), q("(-inf,0] u [1,inf)"));
        assert_eq!(q("[0,1]").complement(), q("(-inf,0) u (1,inf)"));
        assert_eq!(QSet::empty().complement(), QSet::full());
    }

    #[test]
    fn closedness_rule() {
        assert!(iv("[0,1]").is_closed_in_q());
        assert!(iv("(sqrt(2),sqrt(3))").is_closed_in_q());
        assert!(!iv("[0,1)").is_closed_in_q());
        assert!(iv("(-inf,0]").is_closed_in_q());
        assert!(!iv("(-inf,0)").is_closed_in_q());
    }

    #[test]
    fn signatures() {
        assert_eq!(QSet::full().signature().to_string(), "D");
        assert_eq!(q("[0,1]").signature().to_string(), "PDP");
        assert_eq!(q("(0,1) u (2,3)").signature().to_string(), "D");
        assert_eq!(q("{0} u {1}").signature().to_string(), "PP");
        assert_eq!(q("(0,1] u (1,2)").signature().to_string(), "D");
        assert_eq!(q("(0,1] u [2,3)").signature().to_string(), "DPPD");
    }

    #[test]
    fn max_and_neighbours() {
        let x = q("[0,1] u {2}");
        assert_eq!(x.max(), Some(&int(2)));
        assert_eq!(x.max_below(&int(2)), Some(int(1)));
        assert_eq!(x.min_above(&int(1)), Some(int(2)));
        assert_eq!(x.min_above(&int(0)), None);
    }
}
