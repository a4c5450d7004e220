//! Finitely piecewise order-preserving self-maps of Q.
//!
//! Maps compose on the right: `compose(f, g)` applies `f` first.

mod iso;
mod map;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

pub use iso::{canon_iso, probe_points, CanonIso, Rungs};
pub use map::{Link, PieceMap};

use crate::error::{Error, Result};
use crate::exact::{fmt_rational, ExtReal, Rational};
use crate::qset::{QInterval, QSet};

/// Probe depth used when a decision falls back to sampling.
pub const DEFAULT_DEPTH: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub domain: QInterval,
    pub map: PieceMap,
}

impl Piece {
    pub fn new(domain: QInterval, map: PieceMap) -> Self {
        Piece { domain, map }
    }

    pub fn image(&self) -> QInterval {
        self.map.image_of(&self.domain)
    }

    pub fn is_injective(&self) -> bool {
        !self.map.is_const() || self.domain.is_singleton()
    }

    fn can_take(&self, b: &Rational) -> bool {
        if self.map.is_const() {
            return false;
        }
        let point = QInterval::point(b.clone());
        self.map.valid_on(&point).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tristate {
    True,
    False,
    Undecided(usize),
}

impl Tristate {
    pub fn is_true(self) -> bool {
        self == Tristate::True
    }

    pub fn is_false(self) -> bool {
        self == Tristate::False
    }
}

impl fmt::Display for Tristate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tristate::True => write!(f, "true"),
            Tristate::False => write!(f, "false"),
            Tristate::Undecided(k) => write!(f, "undecided (depth {k})"),
        }
    }
}

/// Kernel classes with more than one element, with their common values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct KernelDescriptor {
    pub classes: Vec<(Rational, QInterval)>,
}

impl KernelDescriptor {
    pub fn class_of(&self, v: &Rational) -> Option<&QInterval> {
        self.classes.iter().find(|(w, _)| w == v).map(|(_, c)| c)
    }

    pub fn intervals(&self) -> Vec<&QInterval> {
        self.classes.iter().map(|(_, c)| c).collect()
    }
}

impl fmt::Display for KernelDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (v, c)) in self.classes.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} <- {}", fmt_rational(v), c)?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endo {
    pieces: Vec<Piece>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidEndo(msg.into())
}

impl Endo {
    /// Validates and normalizes a piecewise presentation.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let mut pieces = pieces;
        pieces.sort_by(|a, b| a.domain.lo().cmp(b.domain.lo()).then_with(|| b.domain.lo_closed().cmp(&a.domain.lo_closed())));
        check_partition(&pieces)?;
        for p in &mut pieces {
            p.map.valid_on(&p.domain).map_err(invalid)?;
            p.map = p.map.simplify_on(&p.domain);
        }
        for w in pieces.windows(2) {
            let (a, b) = (w[0].image(), w[1].image());
            if a.hi() > b.lo() {
                return Err(invalid(format!("not monotone across {} and {}", w[0].domain, w[1].domain)));
            }
        }
        Ok(Endo { pieces: canonicalize(pieces) })
    }

    pub fn identity() -> Self {
        Endo { pieces: vec![Piece::new(QInterval::full(), PieceMap::Identity)] }
    }

    pub fn constant(q: Rational) -> Self {
        Endo { pieces: vec![Piece::new(QInterval::full(), PieceMap::Const(q))] }
    }

    pub fn affine(a: Rational, b: Rational) -> Result<Self> {
        Endo::new(vec![Piece::new(QInterval::full(), PieceMap::Affine(a, b))])
    }

    pub fn translation(t: Rational) -> Self {
        Endo::affine(Rational::one(), t).expect("translation is monotone")
    }

    /// The canonical isomorphism `Q -> J` as a whole map.
    pub fn iso_from_line(dst: &QInterval) -> Result<Self> {
        let i = canon_iso(&QInterval::full(), dst)?;
        Endo::new(vec![Piece::new(QInterval::full(), PieceMap::Iso(i))])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece_at(&self, q: &Rational) -> &Piece {
        let idx = self.pieces.partition_point(|p| match p.domain.hi().cmp_rational(q) {
            Ordering::Less => true,
            Ordering::Equal => !p.domain.hi_closed(),
            Ordering::Greater => false,
        });
        &self.pieces[idx]
    }

    pub fn apply(&self, q: &Rational) -> Rational {
        self.piece_at(q).map.eval(q)
    }

    pub fn image(&self) -> QSet {
        QSet::normalize(self.pieces.iter().map(Piece::image))
    }

    /// `{x : f(x) = v}`.
    pub fn preimage(&self, v: &Rational) -> QSet {
        let mut parts = Vec::new();
        let target = ExtReal::Rat(v.clone());
        for p in &self.pieces {
            match &p.map {
                PieceMap::Const(q) if q == v => parts.push(p.domain.clone()),
                PieceMap::Const(_) => {}
                m => {
                    if p.image().contains(v) {
                        if let ExtReal::Rat(x) = m.inverse_point(&target) {
                            parts.push(QInterval::point(x));
                        }
                    }
                }
            }
        }
        QSet::normalize(parts)
    }

    pub fn kernel_classes(&self) -> KernelDescriptor {
        let mut values: Vec<Rational> = self
            .pieces
            .iter()
            .filter(|p| !p.domain.is_singleton())
            .filter_map(|p| match &p.map {
                PieceMap::Const(q) => Some(q.clone()),
                _ => None,
            })
            .collect();
        values.sort();
        values.dedup();
        let classes = values
            .into_iter()
            .map(|v| {
                let pre = self.preimage(&v);
                let class = pre.components()[0].clone();
                debug_assert_eq!(pre.components().len(), 1, "kernel classes are convex");
                (v, class)
            })
            .collect();
        KernelDescriptor { classes }
    }

    /// Kernel class of an image value, as an interval.
    pub fn kernel_class(&self, v: &Rational) -> Option<QInterval> {
        self.preimage(v).components().first().cloned()
    }

    pub fn is_bijective(&self) -> bool {
        self.pieces.iter().all(Piece::is_injective) && self.image().is_full()
    }

    pub fn has_iso(&self) -> bool {
        self.pieces.iter().any(|p| p.map.has_iso())
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

/// Domains must tile Q without gaps or overlaps.
fn check_partition(pieces: &[Piece]) -> Result<()> {
    let first = pieces.first().ok_or_else(|| invalid("no pieces"))?;
    if *first.domain.lo() != ExtReal::NegInf {
        return Err(invalid(format!("nothing covers points below {}", first.domain)));
    }
    let last = pieces.last().expect("nonempty");
    if *last.domain.hi() != ExtReal::PosInf {
        return Err(invalid(format!("nothing covers points above {}", last.domain)));
    }
    for w in pieces.windows(2) {
        let (a, b) = (&w[0].domain, &w[1].domain);
        let joined = a.hi() == b.lo() && (!a.hi().is_rational() || a.hi_closed() != b.lo_closed());
        if !joined {
            return Err(invalid(format!("domains {a} and {b} do not abut")));
        }
    }
    Ok(())
}

fn same_map(a: &Piece, b: &Piece) -> bool {
    match (&a.map, &b.map) {
        (PieceMap::Const(p), PieceMap::Const(q)) => p == q,
        (x, y) => x == y,
    }
}

fn join(a: &QInterval, b: &QInterval) -> QInterval {
    QInterval::new(a.lo().clone(), a.lo_closed(), b.hi().clone(), b.hi_closed()).expect("adjacent domains")
}

fn without_hi(d: &QInterval) -> Option<QInterval> {
    QInterval::new(d.lo().clone(), d.lo_closed(), d.hi().clone(), false)
}

fn without_lo(d: &QInterval) -> Option<QInterval> {
    QInterval::new(d.lo().clone(), false, d.hi().clone(), d.hi_closed())
}

fn with_hi(d: &QInterval) -> QInterval {
    QInterval::new(d.lo().clone(), d.lo_closed(), d.hi().clone(), true).expect("grown domain")
}

fn with_lo(d: &QInterval) -> QInterval {
    QInterval::new(d.lo().clone(), true, d.hi().clone(), d.hi_closed()).expect("grown domain")
}

/// Boundary points go to an injective neighbour whose formula agrees
/// there (the right one when both do); equal neighbours merge.
fn canonicalize(mut pieces: Vec<Piece>) -> Vec<Piece> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < pieces.len() {
            let b = match pieces[i].domain.hi() {
                ExtReal::Rat(b) => b.clone(),
                _ => {
                    i += 1;
                    continue;
                }
            };
            let left_has = pieces[i].domain.hi_closed();
            let value = if left_has { pieces[i].map.eval(&b) } else { pieces[i + 1].map.eval(&b) };
            let right_agrees = pieces[i + 1].can_take(&b) && pieces[i + 1].map.eval(&b) == value;
            let left_agrees = pieces[i].can_take(&b) && pieces[i].map.eval(&b) == value;
            if left_has && right_agrees {
                pieces[i + 1].domain = with_lo(&pieces[i + 1].domain);
                match without_hi(&pieces[i].domain) {
                    Some(d) => pieces[i].domain = d,
                    None => {
                        pieces.remove(i);
                    }
                }
                changed = true;
                continue;
            }
            if !left_has && left_agrees && !right_agrees && pieces[i + 1].map.is_const() {
                pieces[i].domain = with_hi(&pieces[i].domain);
                match without_lo(&pieces[i + 1].domain) {
                    Some(d) => pieces[i + 1].domain = d,
                    None => {
                        pieces.remove(i + 1);
                    }
                }
                changed = true;
                continue;
            }
            i += 1;
        }
        let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces.drain(..) {
            if let Some(last) = merged.last_mut() {
                if same_map(last, &p) {
                    last.domain = join(&last.domain, &p.domain);
                    last.map = last.map.simplify_on(&last.domain);
                    changed = true;
                    continue;
                }
            }
            merged.push(p);
        }
        for p in &mut merged {
            if p.domain.is_singleton() && !p.map.is_const() {
                p.map = p.map.simplify_on(&p.domain);
                changed = true;
            }
        }
        pieces = merged;
        if !changed {
            return pieces;
        }
    }
}

/// `f` then `g`.
pub fn compose(f: &Endo, g: &Endo) -> Endo {
    let mut out = Vec::new();
    for p in &f.pieces {
        if let PieceMap::Const(q) = &p.map {
            out.push(Piece::new(p.domain.clone(), PieceMap::Const(g.apply(q))));
            continue;
        }
        let img = p.image();
        for gp in &g.pieces {
            let Some(part) = gp.domain.intersect(&img) else { continue };
            let inv = p.map.inverse();
            let dom = QInterval::new(inv.point(part.lo()), part.lo_closed(), inv.point(part.hi()), part.hi_closed())
                .expect("pullback of a nonempty interval");
            out.push(Piece::new(dom, p.map.then(&gp.map)));
        }
    }
    Endo::new(out).expect("composite of endomorphisms")
}

pub fn invert(f: &Endo) -> Result<Endo> {
    if !f.is_bijective() {
        return Err(Error::NotBijective);
    }
    let pieces = f
        .pieces
        .iter()
        .map(|p| {
            let map = match (&p.map, p.domain.singleton_value()) {
                (PieceMap::Const(_), Some(x)) => PieceMap::Const(x.clone()),
                (m, _) => m.inverse(),
            };
            Piece::new(p.image(), map)
        })
        .collect();
    Endo::new(pieces)
}

/// Refines two piece lists to their common partition.
fn overlay<'a>(f: &'a Endo, g: &'a Endo) -> Vec<(QInterval, &'a PieceMap, &'a PieceMap)> {
    let mut out = Vec::new();
    for p in &f.pieces {
        for q in &g.pieces {
            if let Some(r) = p.domain.intersect(&q.domain) {
                out.push((r, &p.map, &q.map));
            }
        }
    }
    out
}

pub fn equal(f: &Endo, g: &Endo) -> Tristate {
    equal_with_witness(f, g, DEFAULT_DEPTH).0
}

/// Equality with a point where the maps differ, when one was found.
pub fn equal_with_witness(f: &Endo, g: &Endo, depth: usize) -> (Tristate, Option<Rational>) {
    if f == g {
        return (Tristate::True, None);
    }
    let mut undecided = false;
    for (r, m, n) in overlay(f, g) {
        let (m, n) = (m.simplify_on(&r), n.simplify_on(&r));
        if m == n {
            continue;
        }
        if let (Some(a), Some(b)) = (m.as_affine(), n.as_affine()) {
            if r.is_singleton() {
                let x = r.singleton_value().expect("singleton");
                if m.eval(x) != n.eval(x) {
                    return (Tristate::False, Some(x.clone()));
                }
                continue;
            }
            if a != b {
                let w = probe_points(&r, 3).into_iter().find(|x| m.eval(x) != n.eval(x));
                return (Tristate::False, w);
            }
            continue;
        }
        if let Some(x) = probe_points(&r, depth).into_iter().find(|x| m.eval(x) != n.eval(x)) {
            return (Tristate::False, Some(x));
        }
        undecided = true;
    }
    if undecided {
        (Tristate::Undecided(depth), None)
    } else {
        (Tristate::True, None)
    }
}

pub fn is_idempotent(f: &Endo) -> Tristate {
    idempotency_witness(f, DEFAULT_DEPTH).0
}

/// Idempotency, with an `x` satisfying `f(f(x)) != f(x)` when it fails.
///
/// A monotone map is idempotent exactly when it fixes its image pointwise.
pub fn idempotency_witness(f: &Endo, depth: usize) -> (Tristate, Option<Rational>) {
    let mut undecided = false;
    let moved = |y: Rational| f.preimage(&y).components().first().map(QInterval::simplest);
    for c in f.image().components() {
        for p in &f.pieces {
            let Some(r) = c.intersect(&p.domain) else { continue };
            let m = p.map.simplify_on(&r);
            let fixes = |x: &Rational| m.eval(x) == *x;
            match m.as_affine() {
                Some((a, b)) => {
                    let identity = a.is_one() && b.is_zero();
                    if identity || (r.is_singleton() && fixes(r.singleton_value().expect("singleton"))) {
                        continue;
                    }
                    let w = probe_points(&r, 3).into_iter().find(|x| !fixes(x));
                    return (Tristate::False, w.and_then(moved));
                }
                None => {
                    if let Some(y) = probe_points(&r, depth).into_iter().find(|x| !fixes(x)) {
                        return (Tristate::False, moved(y));
                    }
                    undecided = true;
                }
            }
        }
    }
    if undecided {
        (Tristate::Undecided(depth), None)
    } else {
        (Tristate::True, None)
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "piece on {}: {}", p.domain, p.map)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Endo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::parse::parse_endo(s)
    }
}

/// Two affine formulas split at `at`; the point itself takes the lower one.
pub fn split_affine(at: &Rational, below: (Rational, Rational), above: (Rational, Rational)) -> Result<Endo> {
    let p = ExtReal::Rat(at.clone());
    Endo::new(vec![
        Piece::new(QInterval::new(ExtReal::NegInf, false, p.clone(), true).expect("ray"), PieceMap::Affine(below.0, below.1)),
        Piece::new(QInterval::new(p, false, ExtReal::PosInf, false).expect("ray"), PieceMap::Affine(above.0, above.1)),
    ])
}

impl Default for Endo {
    fn default() -> Self {
        Endo::identity()
    }
}
