//! Orbitals of automorphisms of Q.
//!
//! For an automorphism the orbital of a moved point is the component of
//! the non-fixed set around it, so everything is read off the fixed set.

use std::fmt;

use num_traits::One;

use crate::endo::{compose, equal, invert, Endo, PieceMap, Tristate};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::qset::{QInterval, QSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Up,
    Down,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orbital {
    pub support: QInterval,
    pub sign: Sign,
    /// A member of the support.
    pub anchor: Rational,
}

impl fmt::Display for Orbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Up => write!(f, "{} ↑", self.support),
            Sign::Down => write!(f, "{} ↓", self.support),
            Sign::Fixed => write!(f, "{} fixed", self.support),
        }
    }
}

fn check_automorphism(f: &Endo) -> Result<()> {
    if f.is_bijective() {
        Ok(())
    } else {
        Err(Error::NotAutomorphism)
    }
}

/// `{q : f(q) = q}`.
pub fn fixed_set(f: &Endo) -> Result<QSet> {
    check_automorphism(f)?;
    let mut parts = Vec::new();
    for p in f.pieces() {
        match &p.map {
            PieceMap::Identity => parts.push(p.domain.clone()),
            PieceMap::Const(v) => {
                if p.domain.singleton_value() == Some(v) {
                    parts.push(p.domain.clone());
                }
            }
            PieceMap::Affine(a, b) => {
                if !a.is_one() {
                    let x = b / (Rational::one() - a);
                    if p.domain.contains(&x) {
                        parts.push(QInterval::point(x));
                    }
                }
            }
            PieceMap::Iso(_) | PieceMap::Chain(_) => {
                if p.domain.intersect(&p.image()).is_some() {
                    return Err(Error::IsoFixedSetUnsupported);
                }
            }
        }
    }
    Ok(QSet::normalize(parts))
}

fn sign_at(f: &Endo, x: &Rational) -> Sign {
    match f.apply(x).cmp(x) {
        std::cmp::Ordering::Greater => Sign::Up,
        std::cmp::Ordering::Less => Sign::Down,
        std::cmp::Ordering::Equal => Sign::Fixed,
    }
}

fn moving(f: &Endo, support: QInterval) -> Orbital {
    let anchor = support.simplest();
    Orbital { sign: sign_at(f, &anchor), support, anchor }
}

/// The orbital of `x`: `{x}` when fixed, else the fixed-point-free
/// interval around it.
pub fn orbital(f: &Endo, x: &Rational) -> Result<Orbital> {
    let fixed = fixed_set(f)?;
    if fixed.contains(x) {
        return Ok(Orbital { support: QInterval::point(x.clone()), sign: Sign::Fixed, anchor: x.clone() });
    }
    let support = fixed
        .complement()
        .components()
        .iter()
        .find(|c| c.contains(x))
        .cloned()
        .expect("moved point lies in the non-fixed set");
    let mut o = moving(f, support);
    o.anchor = x.clone();
    Ok(o)
}

/// The infinite orbitals in order, and the fixed set.
pub fn orbital_partition(f: &Endo) -> Result<(Vec<Orbital>, QSet)> {
    let fixed = fixed_set(f)?;
    let orbitals = fixed.complement().components().iter().cloned().map(|c| moving(f, c)).collect();
    Ok((orbitals, fixed))
}

/// The image of an interval under an automorphism.
pub fn image_of_interval(g: &Endo, i: &QInterval) -> QSet {
    QSet::normalize(g.pieces().iter().filter_map(|p| p.domain.intersect(i).map(|r| p.map.image_of(&r))))
}

/// `U_f(x) g = U_{g⁻¹ f g}(x g)`, with both sides computed separately.
pub fn check_conjugation(f: &Endo, g: &Endo, x: &Rational) -> Result<bool> {
    check_automorphism(g)?;
    let left = image_of_interval(g, &orbital(f, x)?.support);
    let conj = compose(&compose(&invert(g)?, f), g);
    let right = QSet::from_interval(orbital(&conj, &g.apply(x))?.support);
    Ok(left == right)
}

/// For commuting `f` and `g`, whether `g` maps every infinite orbital of
/// `f` onto itself.
pub fn check_commuting_preserves(f: &Endo, g: &Endo) -> Result<bool> {
    check_automorphism(g)?;
    match equal(&compose(f, g), &compose(g, f)) {
        Tristate::True => {}
        Tristate::False => return Err(Error::NotCommuting),
        Tristate::Undecided(_) => return Err(Error::CommutationUndecided),
    }
    let (orbitals, _) = orbital_partition(f)?;
    Ok(orbitals.iter().all(|o| image_of_interval(g, &o.support) == QSet::from_interval(o.support.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::parse::{parse_endo, parse_interval, parse_qset};

    fn doubling() -> Endo {
        parse_endo("piece on (-inf,0]: id; piece on (0,inf): affine 2 0").unwrap()
    }

    #[test]
    fn fixed_sets() {
        assert!(fixed_set(&Endo::identity()).unwrap().is_full());
        assert!(fixed_set(&Endo::translation(int(1))).unwrap().is_empty());
        assert_eq!(fixed_set(&doubling()).unwrap(), parse_qset("(-inf,0]").unwrap());
        assert_eq!(fixed_set(&Endo::constant(int(0))).unwrap_err(), Error::NotAutomorphism);
        let swap = parse_endo("piece on (-inf,0]: id; piece on (0,sqrt(3)): iso (0,sqrt(3)) -> (0,sqrt(2)); piece on (sqrt(3),inf): iso (sqrt(3),inf) -> (sqrt(2),inf)").unwrap();
        assert_eq!(fixed_set(&swap).unwrap_err(), Error::IsoFixedSetUnsupported);
    }

    #[test]
    fn orbitals() {
        let o = orbital(&Endo::translation(int(1)), &int(0)).unwrap();
        assert_eq!((o.support.is_full(), o.sign), (true, Sign::Up));
        let o = orbital(&doubling(), &int(1)).unwrap();
        assert_eq!((o.support, o.sign), (parse_interval("(0,inf)").unwrap(), Sign::Up));
        let o = orbital(&Endo::identity(), &int(5)).unwrap();
        assert_eq!(o.to_string(), "{5} fixed");
        assert_eq!((o.support, o.sign), (QInterval::point(int(5)), Sign::Fixed));
    }

    #[test]
    fn partitions() {
        let (os, fixed) = orbital_partition(&Endo::identity()).unwrap();
        assert!(os.is_empty() && fixed.is_full());
        let (os, _) = orbital_partition(&Endo::translation(int(1))).unwrap();
        assert_eq!(os.len(), 1);
        let f = parse_endo("piece on (-inf,0]: id; piece on (0,1]: affine 2 0; piece on (1,inf): affine 1 1").unwrap();
        let (os, fixed) = orbital_partition(&f).unwrap();
        assert_eq!(fixed, parse_qset("(-inf,0]").unwrap());
        assert_eq!(os.iter().map(ToString::to_string).collect::<Vec<_>>(), ["(0,inf) ↑"]);
        let g = parse_endo("piece on (-inf,0]: affine 2 0; piece on (0,inf): id").unwrap();
        assert_eq!(orbital_partition(&g).unwrap().0[0].sign, Sign::Down);
    }

    #[test]
    fn conjugation() {
        assert!(check_conjugation(&Endo::translation(int(1)), &Endo::identity(), &int(0)).unwrap());
        let g = Endo::translation(int(1));
        assert!(check_conjugation(&doubling(), &g, &int(1)).unwrap());
        let conj = compose(&compose(&invert(&g).unwrap(), &doubling()), &g);
        assert_eq!(fixed_set(&conj).unwrap(), parse_qset("(-inf,1]").unwrap());
        assert!(check_conjugation(&doubling(), &doubling(), &rat(-3, 2)).unwrap());
    }

    #[test]
    fn commuting() {
        assert!(check_commuting_preserves(&Endo::translation(int(1)), &Endo::translation(int(2))).unwrap());
        let tripling = parse_endo("piece on (-inf,0]: id; piece on (0,inf): affine 3 0").unwrap();
        assert!(check_commuting_preserves(&doubling(), &tripling).unwrap());
        assert_eq!(check_commuting_preserves(&doubling(), &Endo::translation(int(1))).unwrap_err(), Error::NotCommuting);
    }
}
