//! Countable linear orders given by comparison queries: Q, subsets of Q,
//! the rigid orders `C_x`, finite chains and ordered sums.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::endo::probe_points;
use crate::error::{Error, Result};
use crate::exact::{fmt_rational, rational_between, ExtReal, Rational};
use crate::qset::{QInterval, QSet};

/// A bijection `N -> Q` with exact inverse: the canonical enumeration with
/// positions `2i` and `2i+1` swapped for every `i` in `swaps`.
///
/// The canonical enumeration starts `0, 1, -1, 2, -2, 1/2, -1/2, 3, …`:
/// block `k >= 1` sits at offset `2^k - 1` and lists `k`, `-k`, then the
/// non-integer Stern–Brocot nodes of depth `k` in increasing order, each
/// followed by its negative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Enumeration {
    swaps: BTreeSet<u64>,
}

impl Enumeration {
    pub fn canonical() -> Self {
        Enumeration::default()
    }

    pub fn swaps(&self) -> &BTreeSet<u64> {
        &self.swaps
    }

    fn permute(&self, n: &BigUint) -> BigUint {
        match (n >> 1u32).to_u64() {
            Some(i) if self.swaps.contains(&i) => n ^ BigUint::one(),
            _ => n.clone(),
        }
    }

    pub fn forward(&self, n: &BigUint) -> Rational {
        canonical_forward(&self.permute(n))
    }

    pub fn forward_u64(&self, n: u64) -> Rational {
        self.forward(&BigUint::from(n))
    }

    pub fn rank(&self, q: &Rational) -> BigUint {
        self.permute(&canonical_rank(q))
    }
}

impl fmt::Display for Enumeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.swaps.iter().map(u64::to_string).collect();
        write!(f, "e{{{}}}", s.join(","))
    }
}

/// The enumeration `x π_A`, where `π_A` swaps `2i` and `2i+1` for `i` in `a`.
pub fn mask_enumeration(e: &Enumeration, a: &BTreeSet<u64>) -> Enumeration {
    Enumeration { swaps: e.swaps.symmetric_difference(a).copied().collect() }
}

/// Stern–Brocot node reached by `k - 1` moves, read from the bits of `path`
/// most significant first, 1 for right.
fn sb_node(k: u64, path: &BigUint) -> Rational {
    let (mut ln, mut ld) = (BigInt::zero(), BigInt::one());
    let (mut hn, mut hd) = (BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (BigInt::one(), BigInt::one());
    for b in (0..k - 1).rev() {
        if path.bit(b) {
            (ln, ld) = (n.clone(), d.clone());
        } else {
            (hn, hd) = (n.clone(), d.clone());
        }
        n = &ln + &hn;
        d = &ld + &hd;
    }
    Rational::new(n, d)
}

fn canonical_forward(n: &BigUint) -> Rational {
    if n.is_zero() {
        return Rational::zero();
    }
    let m = n + 1u32;
    let k = m.bits() - 1;
    let r = m - (BigUint::one() << k);
    let kr = Rational::from_integer(BigInt::from(k));
    if r.is_zero() {
        return kr;
    }
    if r.is_one() {
        return -kr;
    }
    let t = r - 2u32;
    let node = sb_node(k, &(&t >> 1u32));
    if t.bit(0) {
        -node
    } else {
        node
    }
}

/// Depth and path bits of a positive rational, from its continued fraction.
fn sb_path(q: &Rational) -> (u64, BigUint) {
    let (mut p, mut d) = (q.numer().magnitude().clone(), q.denom().magnitude().clone());
    let mut runs = Vec::new();
    while !d.is_zero() {
        let (a, r) = p.div_rem(&d);
        runs.push(a);
        p = d;
        d = r;
    }
    let last = runs.len() - 1;
    runs[last] -= 1u32;
    let mut path = BigUint::zero();
    let mut depth = 1u64;
    for (i, a) in runs.iter().enumerate() {
        let len = a.to_u64().expect("continued fraction term fits in u64");
        path <<= len;
        if i % 2 == 0 {
            path += (BigUint::one() << len) - 1u32;
        }
        depth += len;
    }
    (depth, path)
}

fn canonical_rank(q: &Rational) -> BigUint {
    if q.is_zero() {
        return BigUint::zero();
    }
    let (k, path) = sb_path(&q.abs());
    let offset = (BigUint::one() << k) - 1u32;
    let sign = u32::from(q.is_negative());
    if q.is_integer() {
        return offset + sign;
    }
    offset + 2u32 + (path << 1u32) + sign
}

/// An element of a [`LazyOrder`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    Rat(Rational),
    /// `(n, i)`: the `i`-th point of the block replacing `x_n`.
    Pair(BigUint, BigUint),
    Index(usize),
    Left(Box<Code>),
    Right(Box<Code>),
}

impl Code {
    pub fn pair(n: u64, i: u64) -> Code {
        Code::Pair(n.into(), i.into())
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::Rat(q) => write!(f, "{}", fmt_rational(q)),
            Code::Pair(n, i) => write!(f, "({n},{i})"),
            Code::Index(i) => write!(f, "{i}"),
            Code::Left(c) => write!(f, "L:{c}"),
            Code::Right(c) => write!(f, "R:{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LazyOrder {
    Q,
    Subset(QSet),
    Cx(Enumeration),
    Sum(Box<LazyOrder>, Box<LazyOrder>),
    Chain(usize),
}

pub fn ordered_sum(a: LazyOrder, b: LazyOrder) -> LazyOrder {
    LazyOrder::Sum(Box::new(a), Box::new(b))
}

fn bad(c: &Code) -> Error {
    Error::InvalidCode(c.to_string())
}

fn rat_bound(c: Option<&Code>, neg: bool) -> ExtReal {
    match c {
        Some(Code::Rat(q)) => ExtReal::Rat(q.clone()),
        _ if neg => ExtReal::NegInf,
        _ => ExtReal::PosInf,
    }
}

fn wrap(side: fn(Box<Code>) -> Code, codes: Vec<Code>) -> Vec<Code> {
    codes.into_iter().map(|c| side(Box::new(c))).collect()
}

impl LazyOrder {
    pub fn validate(&self, c: &Code) -> Result<()> {
        let ok = match (self, c) {
            (LazyOrder::Q, Code::Rat(_)) => true,
            (LazyOrder::Subset(x), Code::Rat(q)) => x.contains(q),
            (LazyOrder::Cx(_), Code::Pair(n, i)) => i <= n,
            (LazyOrder::Chain(n), Code::Index(i)) => i < n,
            (LazyOrder::Sum(a, _), Code::Left(c)) => return a.validate(c).map_err(|_| bad(c)),
            (LazyOrder::Sum(_, b), Code::Right(c)) => return b.validate(c).map_err(|_| bad(c)),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(bad(c))
        }
    }

    fn cmp_valid(&self, a: &Code, b: &Code) -> Ordering {
        match (self, a, b) {
            (LazyOrder::Cx(e), Code::Pair(m, i), Code::Pair(n, j)) => {
                if m == n {
                    i.cmp(j)
                } else {
                    e.forward(m).cmp(&e.forward(n))
                }
            }
            (LazyOrder::Sum(l, _), Code::Left(x), Code::Left(y)) => l.cmp_valid(x, y),
            (LazyOrder::Sum(_, r), Code::Right(x), Code::Right(y)) => r.cmp_valid(x, y),
            (LazyOrder::Sum(..), Code::Left(_), Code::Right(_)) => Ordering::Less,
            (LazyOrder::Sum(..), Code::Right(_), Code::Left(_)) => Ordering::Greater,
            (_, Code::Rat(p), Code::Rat(q)) => p.cmp(q),
            (_, Code::Index(i), Code::Index(j)) => i.cmp(j),
            _ => unreachable!("validated codes"),
        }
    }

    pub fn compare_elems(&self, a: &Code, b: &Code) -> Result<Ordering> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.cmp_valid(a, b))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            LazyOrder::Subset(x) => x.is_empty(),
            LazyOrder::Chain(n) => *n == 0,
            LazyOrder::Sum(a, b) => a.is_empty() && b.is_empty(),
            _ => false,
        }
    }

    pub fn min(&self) -> Option<Code> {
        match self {
            LazyOrder::Subset(x) => x.min().cloned().map(Code::Rat),
            LazyOrder::Chain(n) => (*n > 0).then_some(Code::Index(0)),
            LazyOrder::Sum(a, b) if a.is_empty() => b.min().map(|c| Code::Right(Box::new(c))),
            LazyOrder::Sum(a, _) => a.min().map(|c| Code::Left(Box::new(c))),
            _ => None,
        }
    }

    pub fn max(&self) -> Option<Code> {
        match self {
            LazyOrder::Subset(x) => x.max().cloned().map(Code::Rat),
            LazyOrder::Chain(n) => n.checked_sub(1).map(Code::Index),
            LazyOrder::Sum(a, b) if b.is_empty() => a.max().map(|c| Code::Left(Box::new(c))),
            LazyOrder::Sum(_, b) => b.max().map(|c| Code::Right(Box::new(c))),
            _ => None,
        }
    }

    /// The immediate successor, when there is one.
    pub fn succ(&self, c: &Code) -> Option<Code> {
        match (self, c) {
            (LazyOrder::Subset(x), Code::Rat(q)) => x.min_above(q).map(Code::Rat),
            (LazyOrder::Chain(n), Code::Index(i)) => (i + 1 < *n).then_some(Code::Index(i + 1)),
            (LazyOrder::Cx(_), Code::Pair(n, i)) => (i < n).then(|| Code::Pair(n.clone(), i + 1u32)),
            (LazyOrder::Sum(a, b), Code::Left(x)) => match a.succ(x) {
                Some(s) => Some(Code::Left(Box::new(s))),
                None if a.max().as_ref() == Some(x) => b.min().map(|m| Code::Right(Box::new(m))),
                None => None,
            },
            (LazyOrder::Sum(_, b), Code::Right(x)) => b.succ(x).map(|s| Code::Right(Box::new(s))),
            _ => None,
        }
    }

    /// The immediate predecessor, when there is one.
    pub fn pred(&self, c: &Code) -> Option<Code> {
        match (self, c) {
            (LazyOrder::Subset(x), Code::Rat(q)) => x.max_below(q).map(Code::Rat),
            (LazyOrder::Chain(_), Code::Index(i)) => i.checked_sub(1).map(Code::Index),
            (LazyOrder::Cx(_), Code::Pair(n, i)) => (!i.is_zero()).then(|| Code::Pair(n.clone(), i - 1u32)),
            (LazyOrder::Sum(_, b), Code::Right(x)) => match b.pred(x) {
                Some(p) => Some(Code::Right(Box::new(p))),
                None if b.min().as_ref() == Some(x) => self_left_max(self),
                None => None,
            },
            (LazyOrder::Sum(a, _), Code::Left(x)) => a.pred(x).map(|p| Code::Left(Box::new(p))),
            _ => None,
        }
    }

    /// Representatives of the elements strictly between two bounds (`None`
    /// is unbounded). For Q, subsets of Q and finite chains every element in
    /// range is carried to one of these by an automorphism fixing
    /// everything outside the range.
    pub fn candidates(&self, lo: Option<&Code>, hi: Option<&Code>) -> Vec<Code> {
        match self {
            LazyOrder::Q => rational_between(&rat_bound(lo, true), &rat_bound(hi, false))
                .map(|q| vec![Code::Rat(q)])
                .unwrap_or_default(),
            LazyOrder::Subset(x) => {
                let Some(range) = QInterval::open(rat_bound(lo, true), rat_bound(hi, false)) else { return Vec::new() };
                let mut out = Vec::new();
                for c in x.intersect_interval(&range).components() {
                    out.extend(c.min().cloned());
                    if !c.is_singleton() {
                        out.push(rational_between(c.lo(), c.hi()).expect("open interior"));
                    }
                    out.extend(c.max().cloned());
                }
                out.dedup();
                out.into_iter().map(Code::Rat).collect()
            }
            LazyOrder::Chain(n) => {
                let start = match lo {
                    Some(Code::Index(i)) => i + 1,
                    _ => 0,
                };
                let end = match hi {
                    Some(Code::Index(j)) => *j,
                    _ => *n,
                };
                (start..end).map(Code::Index).collect()
            }
            LazyOrder::Cx(e) => cx_candidates(e, lo, hi),
            LazyOrder::Sum(a, b) => match (lo, hi) {
                (Some(Code::Right(_)), _) | (_, Some(Code::Left(_))) => {
                    let (side, inner, l, h): (fn(Box<Code>) -> Code, &LazyOrder, _, _) = match (lo, hi) {
                        (Some(Code::Right(x)), h) => (Code::Right, b, Some(&**x), inner_of(h)),
                        (l, Some(Code::Left(y))) => (Code::Left, a, inner_of(l), Some(&**y)),
                        _ => unreachable!(),
                    };
                    wrap(side, inner.candidates(l, h))
                }
                _ => {
                    let mut out = wrap(Code::Left, a.candidates(inner_of(lo), None));
                    out.extend(wrap(Code::Right, b.candidates(None, inner_of(hi))));
                    out
                }
            },
        }
    }

    /// Whether some element lies strictly between `a < b`.
    pub fn exists_between(&self, a: &Code, b: &Code) -> Result<bool> {
        if self.compare_elems(a, b)? != Ordering::Less {
            return Err(Error::NotOrdered);
        }
        Ok(match (self, a, b) {
            (LazyOrder::Cx(_), Code::Pair(m, i), Code::Pair(n, j)) if m == n => j - i > BigUint::one(),
            (LazyOrder::Cx(_), ..) => true,
            _ => !self.candidates(Some(a), Some(b)).is_empty(),
        })
    }

    /// The first `k` elements of a fixed enumeration of the order.
    pub fn elements(&self, k: usize) -> Vec<Code> {
        match self {
            LazyOrder::Q => (0..k as u64).map(|n| Code::Rat(canonical_forward(&n.into()))).collect(),
            LazyOrder::Subset(x) => {
                let mut lists: Vec<Vec<Rational>> = x
                    .components()
                    .iter()
                    .map(|c| {
                        let mut l: Vec<Rational> = c.min().into_iter().chain(c.max()).cloned().collect();
                        l.extend(probe_points(c, k));
                        l.dedup();
                        l
                    })
                    .collect();
                let mut out = Vec::new();
                let mut round = 0;
                while out.len() < k && lists.iter().any(|l| round < l.len()) {
                    for l in &mut lists {
                        if let Some(q) = l.get(round) {
                            if out.len() < k && !out.contains(&Code::Rat(q.clone())) {
                                out.push(Code::Rat(q.clone()));
                            }
                        }
                    }
                    round += 1;
                }
                out
            }
            LazyOrder::Cx(_) => {
                let mut out = Vec::new();
                let mut n = 0u64;
                while out.len() < k {
                    for i in 0..=n {
                        if out.len() < k {
                            out.push(Code::pair(n, i));
                        }
                    }
                    n += 1;
                }
                out
            }
            LazyOrder::Chain(n) => (0..k.min(*n)).map(Code::Index).collect(),
            LazyOrder::Sum(a, b) => {
                let (xs, ys) = (wrap(Code::Left, a.elements(k)), wrap(Code::Right, b.elements(k)));
                let mut out = Vec::new();
                for i in 0..k {
                    out.extend(xs.get(i).cloned());
                    out.extend(ys.get(i).cloned());
                }
                out.truncate(k);
                out
            }
        }
    }
}

fn self_left_max(o: &LazyOrder) -> Option<Code> {
    match o {
        LazyOrder::Sum(a, _) => a.max().map(|m| Code::Left(Box::new(m))),
        _ => None,
    }
}

fn inner_of(c: Option<&Code>) -> Option<&Code> {
    match c {
        Some(Code::Left(x)) | Some(Code::Right(x)) => Some(x),
        _ => None,
    }
}

fn cx_candidates(e: &Enumeration, lo: Option<&Code>, hi: Option<&Code>) -> Vec<Code> {
    let pair = |c: Option<&Code>| match c {
        Some(Code::Pair(n, i)) => Some((n.clone(), i.clone())),
        _ => None,
    };
    let (lo, hi) = (pair(lo), pair(hi));
    let mut out = Vec::new();
    if let (Some((m, i)), Some((n, j))) = (&lo, &hi) {
        if m == n {
            let mut k = i + 1u32;
            while &k < j && out.len() < 3 {
                out.push(Code::Pair(m.clone(), k.clone()));
                k += 1u32;
            }
            return out;
        }
    }
    if let Some((m, i)) = &lo {
        if i < m {
            out.push(Code::Pair(m.clone(), i + 1u32));
            out.push(Code::Pair(m.clone(), m.clone()));
        }
    }
    if let Some((n, j)) = &hi {
        if !j.is_zero() {
            out.push(Code::Pair(n.clone(), BigUint::zero()));
            out.push(Code::Pair(n.clone(), j - 1u32));
        }
    }
    let x = |b: &Option<(BigUint, BigUint)>, neg: bool| match b {
        Some((n, _)) => ExtReal::Rat(e.forward(n)),
        None if neg => ExtReal::NegInf,
        None => ExtReal::PosInf,
    };
    if let Ok(q) = rational_between(&x(&lo, true), &x(&hi, false)) {
        let k = e.rank(&q);
        out.push(Code::Pair(k.clone(), BigUint::zero()));
        if !k.is_zero() {
            out.push(Code::Pair(k.clone(), BigUint::one()));
            out.push(Code::Pair(k.clone(), k));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Which order an element was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A finite order-isomorphism between parts of two orders, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialIso {
    pub pairs: Vec<(Code, Code)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackAndForth {
    Iso(PartialIso),
    /// No extension exists once `element` (from `side`) has to be matched
    /// after the pairs in `matched`; every choice of earlier partners was
    /// tried.
    Obstruction { side: Side, element: Code, matched: Vec<(Code, Code)> },
    /// The search hit its node budget without settling.
    Exhausted(usize),
}

impl BackAndForth {
    pub fn is_iso(&self) -> bool {
        matches!(self, BackAndForth::Iso(_))
    }

    pub fn is_obstruction(&self) -> bool {
        matches!(self, BackAndForth::Obstruction { .. })
    }
}

impl fmt::Display for BackAndForth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackAndForth::Iso(p) => {
                write!(f, "partial isomorphism of size {}:", p.pairs.len())?;
                for (a, b) in &p.pairs {
                    write!(f, " {a}->{b}")?;
                }
                Ok(())
            }
            BackAndForth::Obstruction { side, element, matched } => {
                let side = if *side == Side::Left { "left" } else { "right" };
                write!(f, "obstruction: {side} element {element} has no partner after {} pairs", matched.len())
            }
            BackAndForth::Exhausted(n) => write!(f, "undecided after {n} search nodes"),
        }
    }
}

const NODE_BUDGET: usize = 2_000_000;

struct Search<'a> {
    a: &'a LazyOrder,
    b: &'a LazyOrder,
    moves: Vec<(Side, Code)>,
    nodes: usize,
    deepest: Option<(usize, Side, Code, Vec<(Code, Code)>)>,
}

/// Neighbours of `x` among already matched elements, as indices.
fn bracket(o: &LazyOrder, pairs: &[(Code, Code)], x: &Code, pick: fn(&(Code, Code)) -> &Code) -> std::result::Result<(Option<usize>, Option<usize>), ()> {
    let mut lo = None;
    let mut hi = None;
    for (k, p) in pairs.iter().enumerate() {
        match o.cmp_valid(pick(p), x) {
            Ordering::Equal => return Err(()),
            Ordering::Less => lo = Some(k),
            Ordering::Greater => {
                hi = Some(k);
                break;
            }
        }
    }
    Ok((lo, hi))
}

/// `(has predecessor, has successor, is successor of lo, is predecessor of hi)`.
fn profile(o: &LazyOrder, x: &Code, lo: Option<&Code>, hi: Option<&Code>) -> (bool, bool, bool, bool) {
    let s = o.succ(x);
    let p = o.pred(x);
    let after_lo = match lo {
        Some(l) => o.succ(l).as_ref() == Some(x),
        None => o.min().as_ref() == Some(x),
    };
    let before_hi = match hi {
        Some(h) => o.pred(h).as_ref() == Some(x),
        None => o.max().as_ref() == Some(x),
    };
    (p.is_some(), s.is_some(), after_lo, before_hi)
}

impl Search<'_> {
    fn run(&mut self, step: usize, pairs: &mut Vec<(Code, Code)>) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return None;
        }
        if step == self.moves.len() {
            return Some(true);
        }
        let (side, x) = self.moves[step].clone();
        let (here, there, pick_here, pick_there): (&LazyOrder, &LazyOrder, fn(&(Code, Code)) -> &Code, fn(&(Code, Code)) -> &Code) =
            match side {
                Side::Left => (self.a, self.b, |p| &p.0, |p| &p.1),
                Side::Right => (self.b, self.a, |p| &p.1, |p| &p.0),
            };
        let Ok((lo, hi)) = bracket(here, pairs, &x, pick_here) else {
            return self.run(step + 1, pairs);
        };
        let (xlo, xhi) = (lo.map(|k| pick_here(&pairs[k])), hi.map(|k| pick_here(&pairs[k])));
        let (ylo, yhi) = (lo.map(|k| pick_there(&pairs[k]).clone()), hi.map(|k| pick_there(&pairs[k]).clone()));
        let want = profile(here, &x, xlo, xhi);
        let at = hi.unwrap_or(pairs.len());
        for y in there.candidates(ylo.as_ref(), yhi.as_ref()) {
            if profile(there, &y, ylo.as_ref(), yhi.as_ref()) != want {
                continue;
            }
            let pair = match side {
                Side::Left => (x.clone(), y),
                Side::Right => (y, x.clone()),
            };
            pairs.insert(at, pair);
            let r = self.run(step + 1, pairs);
            pairs.remove(at);
            match r {
                Some(false) => {}
                other => return other,
            }
        }
        if self.deepest.as_ref().is_none_or(|d| d.0 < step) {
            self.deepest = Some((step, side, x, pairs.clone()));
        }
        Some(false)
    }
}

/// Cantor's back-and-forth over the first `depth` elements of each order,
/// searching all representative partners.
pub fn back_and_forth(a: &LazyOrder, b: &LazyOrder, depth: usize) -> BackAndForth {
    let (xs, ys) = (a.elements(depth), b.elements(depth));
    let mut moves = Vec::new();
    for k in 0..depth {
        if let Some(x) = xs.get(k) {
            moves.push((Side::Left, x.clone()));
        }
        if let Some(y) = ys.get(k) {
            moves.push((Side::Right, y.clone()));
        }
    }
    let mut s = Search { a, b, moves, nodes: 0, deepest: None };
    let mut pairs = Vec::new();
    match s.run(0, &mut pairs) {
        None => BackAndForth::Exhausted(s.nodes),
        Some(false) => {
            let (_, side, element, matched) = s.deepest.expect("failure records its step");
            BackAndForth::Obstruction { side, element, matched }
        }
        Some(true) => {
            let mut pairs = Vec::new();
            let mut s2 = Search { a, b, moves: s.moves.clone(), nodes: 0, deepest: None };
            s2.collect(0, &mut pairs);
            BackAndForth::Iso(PartialIso { pairs })
        }
    }
}

impl Search<'_> {
    /// Replays a successful search, leaving the final matching in `pairs`.
    fn collect(&mut self, step: usize, pairs: &mut Vec<(Code, Code)>) -> bool {
        if step == self.moves.len() {
            return true;
        }
        let saved = pairs.clone();
        let (side, x) = self.moves[step].clone();
        let (here, there, pick_here, pick_there): (&LazyOrder, &LazyOrder, fn(&(Code, Code)) -> &Code, fn(&(Code, Code)) -> &Code) =
            match side {
                Side::Left => (self.a, self.b, |p| &p.0, |p| &p.1),
                Side::Right => (self.b, self.a, |p| &p.1, |p| &p.0),
            };
        let Ok((lo, hi)) = bracket(here, pairs, &x, pick_here) else {
            return self.collect(step + 1, pairs);
        };
        let (xlo, xhi) = (lo.map(|k| pick_here(&pairs[k])), hi.map(|k| pick_here(&pairs[k])));
        let (ylo, yhi) = (lo.map(|k| pick_there(&pairs[k]).clone()), hi.map(|k| pick_there(&pairs[k]).clone()));
        let want = profile(here, &x, xlo, xhi);
        let at = hi.unwrap_or(pairs.len());
        for y in there.candidates(ylo.as_ref(), yhi.as_ref()) {
            if profile(there, &y, ylo.as_ref(), yhi.as_ref()) != want {
                continue;
            }
            let pair = match side {
                Side::Left => (x.clone(), y),
                Side::Right => (y, x.clone()),
            };
            pairs.insert(at, pair);
            if self.collect(step + 1, pairs) {
                return true;
            }
            *pairs = saved.clone();
        }
        false
    }
}

/// Outcome of checking the map forced between two `C_x` orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rigidity {
    ForcedMapOk,
    /// `x_m < x_n` but `y_m > y_n`.
    Contradiction(u64, u64),
}

/// An isomorphism `C_x -> C_y` must send `x_n` to `y_n`; looks for a pair
/// below `n_max` on which that map reverses order.
pub fn cx_rigidity_probe(e1: &Enumeration, e2: &Enumeration, n_max: u64) -> Rigidity {
    let xs: Vec<Rational> = (0..n_max).map(|n| e1.forward_u64(n)).collect();
    let ys: Vec<Rational> = (0..n_max).map(|n| e2.forward_u64(n)).collect();
    for m in (0..n_max.saturating_sub(1)).rev() {
        for n in m + 1..n_max {
            let (mu, nu) = (m as usize, n as usize);
            if (xs[mu] < xs[nu]) != (ys[mu] < ys[nu]) {
                return if xs[mu] < xs[nu] { Rigidity::Contradiction(m, n) } else { Rigidity::Contradiction(n, m) };
            }
        }
    }
    Rigidity::ForcedMapOk
}

/// Parses an element code: a rational, a chain index, `(n,i)`, or
/// `L:`/`R:` followed by a code.
pub fn parse_code(o: &LazyOrder, s: &str) -> Result<Code> {
    let s = s.trim();
    let code = match o {
        LazyOrder::Sum(a, b) => {
            if let Some(rest) = s.strip_prefix("L:") {
                Code::Left(Box::new(parse_code(a, rest)?))
            } else if let Some(rest) = s.strip_prefix("R:") {
                Code::Right(Box::new(parse_code(b, rest)?))
            } else {
                return Err(Error::InvalidCode(s.to_string()));
            }
        }
        LazyOrder::Cx(_) => {
            let inner = s
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::InvalidCode(s.to_string()))?;
            let (n, i) = inner.split_once(',').ok_or_else(|| Error::InvalidCode(s.to_string()))?;
            let num = |t: &str| t.trim().parse::<BigUint>().map_err(|_| Error::InvalidCode(s.to_string()));
            Code::Pair(num(n)?, num(i)?)
        }
        LazyOrder::Chain(_) => Code::Index(s.parse().map_err(|_| Error::InvalidCode(s.to_string()))?),
        LazyOrder::Q | LazyOrder::Subset(_) => Code::Rat(crate::parse::parse_rational(s)?),
    };
    o.validate(&code)?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::parse::parse_qset;

    fn e() -> Enumeration {
        Enumeration::canonical()
    }

    fn mask(a: &[u64]) -> Enumeration {
        mask_enumeration(&e(), &a.iter().copied().collect())
    }

    fn set(s: &str) -> LazyOrder {
        LazyOrder::Subset(parse_qset(s).unwrap())
    }

    #[test]
    fn enumeration_prefix() {
        let first: Vec<Rational> = (0..15).map(|n| e().forward_u64(n)).collect();
        let want = [
            int(0), int(1), int(-1), int(2), int(-2), rat(1, 2), rat(-1, 2), int(3), int(-3),
            rat(1, 3), rat(-1, 3), rat(2, 3), rat(-2, 3), rat(3, 2), rat(-3, 2),
        ];
        assert_eq!(first, want);
    }

    #[test]
    fn rank_inverts_forward() {
        for n in 0..2000u64 {
            let q = e().forward_u64(n);
            assert_eq!(e().rank(&q), BigUint::from(n));
        }
        for q in [rat(355, 113), rat(-1, 1000), int(64), rat(13, 21)] {
            assert_eq!(e().forward(&e().rank(&q)), q);
        }
    }

    #[test]
    fn masks() {
        assert_eq!(mask(&[]), e());
        assert_eq!(mask(&[0]).forward_u64(0), e().forward_u64(1));
        assert_eq!(mask(&[1]).forward_u64(3), e().forward_u64(2));
        let m = mask(&[0, 5]);
        for n in 0..200u64 {
            assert_eq!(m.rank(&m.forward_u64(n)), BigUint::from(n));
        }
    }

    #[test]
    fn cx_comparisons() {
        let cx = LazyOrder::Cx(e());
        assert_eq!(cx.compare_elems(&Code::pair(1, 0), &Code::pair(1, 1)).unwrap(), Ordering::Less);
        assert_eq!(cx.compare_elems(&Code::pair(2, 0), &Code::pair(1, 0)).unwrap(), Ordering::Less);
        assert!(!cx.exists_between(&Code::pair(1, 0), &Code::pair(1, 1)).unwrap());
        assert!(cx.exists_between(&Code::pair(0, 0), &Code::pair(1, 0)).unwrap());
        assert_eq!(cx.exists_between(&Code::pair(1, 1), &Code::pair(1, 0)).unwrap_err(), Error::NotOrdered);
        assert!(cx.compare_elems(&Code::pair(1, 2), &Code::pair(1, 0)).is_err());
        assert!(LazyOrder::Q.exists_between(&Code::Rat(int(0)), &Code::Rat(int(1))).unwrap());
    }

    #[test]
    fn sums() {
        let s = ordered_sum(LazyOrder::Chain(2), LazyOrder::Chain(3));
        let a = Code::Left(Box::new(Code::Index(1)));
        let b = Code::Right(Box::new(Code::Index(0)));
        assert_eq!(s.compare_elems(&a, &b).unwrap(), Ordering::Less);
        assert!(!s.exists_between(&a, &b).unwrap());
        assert!(back_and_forth(&s, &LazyOrder::Chain(5), 5).is_iso());
        let qq = ordered_sum(LazyOrder::Q, LazyOrder::Q);
        match back_and_forth(&qq, &LazyOrder::Q, 10) {
            BackAndForth::Iso(p) => assert!(p.pairs.len() >= 10),
            other => panic!("{other}"),
        }
        let qc = ordered_sum(LazyOrder::Q, LazyOrder::Cx(e()));
        let l = Code::Left(Box::new(Code::Rat(int(100))));
        let r = Code::Right(Box::new(Code::pair(2, 0)));
        assert_eq!(qc.compare_elems(&l, &r).unwrap(), Ordering::Less);
    }

    #[test]
    fn back_and_forth_examples() {
        match back_and_forth(&LazyOrder::Q, &set("(0,1)"), 10) {
            BackAndForth::Iso(p) => assert!(p.pairs.len() >= 10),
            other => panic!("{other}"),
        }
        assert!(back_and_forth(&LazyOrder::Chain(2), &LazyOrder::Chain(3), 3).is_obstruction());
        assert!(back_and_forth(&set("[0,1]"), &set("[2,5]"), 10).is_iso());
        assert!(back_and_forth(&set("(0,1) u {2} u {3} u (4,5)"), &set("(10,11) u {12} u {13} u (14,15)"), 10).is_iso());
        assert!(back_and_forth(&set("[0,1] u [2,3]"), &set("[5,6] u [7,8]"), 10).is_iso());
        assert!(back_and_forth(&set("(0,1) u {2} u {3} u (4,5)"), &set("(0,1) u {2} u {3} u {4} u (5,6)"), 10).is_obstruction());
        assert!(back_and_forth(&set("[0,1]"), &set("[0,1)"), 10).is_obstruction());
    }

    #[test]
    fn rigidity() {
        assert_eq!(cx_rigidity_probe(&e(), &e(), 50), Rigidity::ForcedMapOk);
        assert_eq!(cx_rigidity_probe(&e(), &mask(&[1]), 4), Rigidity::Contradiction(2, 3));
        assert_eq!(cx_rigidity_probe(&e(), &mask(&[0]), 2), Rigidity::Contradiction(0, 1));
    }

    #[test]
    fn codes() {
        let s = ordered_sum(LazyOrder::Q, LazyOrder::Cx(e()));
        assert_eq!(parse_code(&s, "R:(3,1)").unwrap(), Code::Right(Box::new(Code::pair(3, 1))));
        assert!(parse_code(&s, "R:(1,3)").is_err());
        assert_eq!(parse_code(&s, "L:-1/2").unwrap().to_string(), "L:-1/2");
    }
}
