use std::fmt;

use num_traits::{One, Signed, Zero};

use super::iso::CanonIso;
use crate::exact::{fmt_rational, ExtReal, Rational};
use crate::qset::QInterval;

/// One stage of an [`PieceMap::Chain`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Link {
    Affine(Rational, Rational),
    Iso(CanonIso),
}

impl Link {
    fn point(&self, x: &ExtReal) -> ExtReal {
        match self {
            Link::Affine(a, b) => x.affine(a, b),
            Link::Iso(i) => i.point(x),
        }
    }

    fn inverse(&self) -> Link {
        match self {
            Link::Affine(a, b) => {
                let inv = a.recip();
                Link::Affine(inv.clone(), -(b * inv))
            }
            Link::Iso(i) => Link::Iso(i.inverse()),
        }
    }

    fn is_identity(&self) -> bool {
        match self {
            Link::Affine(a, b) => a.is_one() && b.is_zero(),
            Link::Iso(i) => i.is_identity(),
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Link::Affine(a, b) => write!(f, "affine {} {}", fmt_rational(a), fmt_rational(b)),
            Link::Iso(i) => write!(f, "iso {} -> {}", i.src(), i.dst()),
        }
    }
}

/// The formula a piece of an endomorphism applies on its domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PieceMap {
    Identity,
    Const(Rational),
    /// `x -> a x + b`, `a > 0`
    Affine(Rational, Rational),
    Iso(CanonIso),
    /// links applied left to right
    Chain(Vec<Link>),
}

impl PieceMap {
    pub fn is_const(&self) -> bool {
        matches!(self, PieceMap::Const(_))
    }

    pub fn has_iso(&self) -> bool {
        matches!(self, PieceMap::Iso(_) | PieceMap::Chain(_))
    }

    /// Continuous extension to endpoints of the domain.
    pub fn point(&self, x: &ExtReal) -> ExtReal {
        match self {
            PieceMap::Identity => x.clone(),
            PieceMap::Const(q) => ExtReal::Rat(q.clone()),
            PieceMap::Affine(a, b) => x.affine(a, b),
            PieceMap::Iso(i) => i.point(x),
            PieceMap::Chain(links) => links.iter().fold(x.clone(), |acc, l| l.point(&acc)),
        }
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        match self.point(&ExtReal::Rat(q.clone())) {
            ExtReal::Rat(r) => r,
            other => unreachable!("rational mapped to {other}"),
        }
    }

    /// Inverse of an injective formula, as a formula.
    pub fn inverse(&self) -> PieceMap {
        match self {
            PieceMap::Const(_) => panic!("constant formula has no inverse"),
            other => PieceMap::from_links(other.links().iter().rev().map(Link::inverse).collect()),
        }
    }

    pub fn inverse_point(&self, y: &ExtReal) -> ExtReal {
        self.inverse().point(y)
    }

    /// The formula as a sequence of links; empty for the identity.
    pub fn links(&self) -> Vec<Link> {
        match self {
            PieceMap::Identity => Vec::new(),
            PieceMap::Affine(a, b) => vec![Link::Affine(a.clone(), b.clone())],
            PieceMap::Iso(i) => vec![Link::Iso(i.clone())],
            PieceMap::Chain(l) => l.clone(),
            PieceMap::Const(_) => panic!("constant formula is not a chain"),
        }
    }

    /// Folds identity links, adjacent affine links, and `I -> J -> K` isos.
    pub fn from_links(links: Vec<Link>) -> PieceMap {
        let mut stack: Vec<Link> = Vec::with_capacity(links.len());
        for link in links {
            if link.is_identity() {
                continue;
            }
            let merged = match (stack.last(), &link) {
                (Some(Link::Affine(a1, b1)), Link::Affine(a2, b2)) => Some(Link::Affine(a1 * a2, b1 * a2 + b2)),
                (Some(Link::Iso(i)), Link::Iso(j)) if i.dst() == j.src() => {
                    Some(Link::Iso(super::iso::canon_iso(i.src(), j.dst()).expect("chained isos share type")))
                }
                _ => None,
            };
            match merged {
                Some(m) => {
                    stack.pop();
                    if !m.is_identity() {
                        stack.push(m);
                    }
                }
                None => stack.push(link),
            }
        }
        match stack.len() {
            0 => PieceMap::Identity,
            1 => match stack.pop().expect("one link") {
                Link::Affine(a, b) => PieceMap::Affine(a, b),
                Link::Iso(i) => PieceMap::Iso(i),
            },
            _ => PieceMap::Chain(stack),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PieceMap) -> PieceMap {
        match (self, next) {
            (_, PieceMap::Const(r)) => PieceMap::Const(r.clone()),
            (PieceMap::Const(q), n) => PieceMap::Const(n.eval(q)),
            (m, n) => PieceMap::from_links(m.links().into_iter().chain(n.links()).collect()),
        }
    }

    /// Replaces iso links by affine ones wherever the relevant range sits in
    /// a single rung. `dom` is the range the formula is applied to.
    pub fn simplify_on(&self, dom: &QInterval) -> PieceMap {
        if let Some(q) = dom.singleton_value() {
            return PieceMap::Const(self.eval(q));
        }
        let links = match self {
            PieceMap::Iso(_) | PieceMap::Chain(_) => self.links(),
            PieceMap::Affine(a, b) if a.is_one() && b.is_zero() => return PieceMap::Identity,
            other => return other.clone(),
        };
        let mut lo = dom.lo().clone();
        let mut hi = dom.hi().clone();
        let mut out = Vec::with_capacity(links.len());
        for link in links {
            let replaced = match &link {
                Link::Iso(i) => i.affine_on(&lo, &hi).map(|(a, b)| Link::Affine(a, b)),
                _ => None,
            };
            let link = replaced.unwrap_or(link);
            lo = link.point(&lo);
            hi = link.point(&hi);
            out.push(link);
        }
        PieceMap::from_links(out)
    }

    /// Whether the formula can be applied on `dom`.
    pub fn valid_on(&self, dom: &QInterval) -> Result<(), String> {
        match self {
            PieceMap::Identity | PieceMap::Const(_) => Ok(()),
            PieceMap::Affine(a, _) if !a.is_positive() => Err(format!("affine slope {} is not positive", fmt_rational(a))),
            PieceMap::Affine(..) => Ok(()),
            PieceMap::Iso(_) | PieceMap::Chain(_) => {
                let mut range = dom.clone();
                for link in self.links() {
                    match &link {
                        Link::Iso(i) if !range.is_subset(i.src()) => {
                            return Err(format!("{range} is not inside iso source {}", i.src()));
                        }
                        Link::Affine(a, _) if !a.is_positive() => {
                            return Err(format!("affine slope {} is not positive", fmt_rational(a)));
                        }
                        _ => {}
                    }
                    range = QInterval::new(
                        link.point(range.lo()),
                        range.lo_closed(),
                        link.point(range.hi()),
                        range.hi_closed(),
                    )
                    .expect("monotone image of an interval");
                }
                Ok(())
            }
        }
    }

    /// Image of a domain interval.
    pub fn image_of(&self, dom: &QInterval) -> QInterval {
        match self {
            PieceMap::Const(q) => QInterval::point(q.clone()),
            m => QInterval::new(m.point(dom.lo()), dom.lo_closed(), m.point(dom.hi()), dom.hi_closed())
                .expect("injective image of an interval"),
        }
    }

    /// The formula as `x -> a x + b` when it is one.
    pub fn as_affine(&self) -> Option<(Rational, Rational)> {
        match self {
            PieceMap::Identity => Some((Rational::one(), Rational::zero())),
            PieceMap::Const(q) => Some((Rational::zero(), q.clone())),
            PieceMap::Affine(a, b) => Some((a.clone(), b.clone())),
            _ => None,
        }
    }
}

impl fmt::Display for PieceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceMap::Identity => write!(f, "id"),
            PieceMap::Const(q) => write!(f, "const {}", fmt_rational(q)),
            PieceMap::Affine(a, b) => write!(f, "affine {} {}", fmt_rational(a), fmt_rational(b)),
            PieceMap::Iso(i) => write!(f, "iso {} -> {}", i.src(), i.dst()),
            PieceMap::Chain(links) => {
                write!(f, "chain [")?;
                for (k, l) in links.iter().enumerate() {
                    if k > 0 {
                        write!(f, " >> ")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, "]")
            }
        }
    }
}
