//! Retracts, idempotent variants and non-regular maps.
//!
//! Every construction returns plain [`Endo`] values, so the results can be
//! composed, printed and checked with the rest of the library.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::endo::{canon_iso, compose, equal, invert, is_idempotent, probe_points, Endo, Piece, PieceMap, Tristate};
use crate::error::{Error, Result};
use crate::exact::{int, rat, rational_between, ExtReal, Rational};
use crate::qset::{QInterval, QSet};

/// Ok when `x` is the image of some idempotent, otherwise the first gap
/// of the complement that is closed in Q.
pub fn retract_image_criterion(x: &QSet) -> Result<()> {
    match x.complement().components().iter().find(|g| g.is_closed_in_q()) {
        Some(g) => Err(Error::ClosedGap(Box::new(g.clone()))),
        None => Ok(()),
    }
}

/// The idempotent fixing `x` that sends each gap to an adjacent rational
/// endpoint: the lower one when it is rational and outside the gap, else
/// the upper one.
pub fn retract_onto(x: &QSet) -> Result<Endo> {
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    retract_image_criterion(x)?;
    let mut pieces: Vec<Piece> = x.components().iter().map(|c| Piece::new(c.clone(), PieceMap::Identity)).collect();
    for gap in x.complement().components() {
        let target = match (gap.lo(), gap.hi()) {
            (ExtReal::Rat(q), _) if !gap.lo_closed() => q.clone(),
            (_, ExtReal::Rat(r)) if !gap.hi_closed() => r.clone(),
            _ => unreachable!("criterion rules out closed gaps"),
        };
        pieces.push(Piece::new(gap.clone(), PieceMap::Const(target)));
    }
    Endo::new(pieces)
}

/// Which rule produced an `L_x` or `U_x` interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GapCase {
    /// The kernel class is unbounded on that side.
    Unbounded,
    /// The class bound is itself an image value.
    BoundInImage,
    /// The nearest image value on that side exists.
    NearestImage,
    /// Image values accumulate at the class bound.
    Accumulating,
    /// The class ends at `x` on that side.
    Empty,
}

impl fmt::Display for GapCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GapCase::Unbounded => "i",
            GapCase::BoundInImage => "ii",
            GapCase::NearestImage => "iii",
            GapCase::Accumulating => "iv",
            GapCase::Empty => "empty",
        };
        write!(f, "{s}")
    }
}

/// The two gaps of the image flanking a non-trivial kernel class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapAttribution {
    pub x: Rational,
    pub class: QInterval,
    pub lower: Option<QInterval>,
    pub lower_case: GapCase,
    pub upper: Option<QInterval>,
    pub upper_case: GapCase,
    /// Largest image value below `x`.
    pub m_x: Option<Rational>,
    /// Smallest image value above `x`.
    pub n_x: Option<Rational>,
}

impl GapAttribution {
    /// The non-empty gaps, lower first.
    pub fn gaps(&self) -> Vec<&QInterval> {
        self.lower.iter().chain(self.upper.iter()).collect()
    }
}

impl fmt::Display for GapAttribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |i: &Option<QInterval>| i.as_ref().map_or_else(|| "{}".to_string(), ToString::to_string);
        write!(
            f,
            "x = {}  class {}  L = {} ({})  U = {} ({})",
            crate::exact::fmt_rational(&self.x),
            self.class,
            show(&self.lower),
            self.lower_case,
            show(&self.upper),
            self.upper_case
        )
    }
}

fn attribute(x: &Rational, class: &QInterval, img: &QSet) -> GapAttribution {
    let xr = ExtReal::Rat(x.clone());
    let m_x = img.max_below(x);
    let n_x = img.min_above(x);
    let (lower, lower_case) = match class.lo() {
        a if *a == xr => (None, GapCase::Empty),
        ExtReal::NegInf => (QInterval::open(ExtReal::NegInf, xr.clone()), GapCase::Unbounded),
        ExtReal::Rat(a) if img.contains(a) => (QInterval::open(ExtReal::Rat(a.clone()), xr.clone()), GapCase::BoundInImage),
        a => match &m_x {
            Some(m) => (QInterval::open(ExtReal::Rat(m.clone()), xr.clone()), GapCase::NearestImage),
            None => (QInterval::new(a.clone(), true, xr.clone(), false), GapCase::Accumulating),
        },
    };
    let (upper, upper_case) = match class.hi() {
        b if *b == xr => (None, GapCase::Empty),
        ExtReal::PosInf => (QInterval::open(xr.clone(), ExtReal::PosInf), GapCase::Unbounded),
        ExtReal::Rat(b) if img.contains(b) => (QInterval::open(xr.clone(), ExtReal::Rat(b.clone())), GapCase::BoundInImage),
        b => match &n_x {
            Some(n) => (QInterval::open(xr.clone(), ExtReal::Rat(n.clone())), GapCase::NearestImage),
            None => (QInterval::new(xr.clone(), false, b.clone(), true), GapCase::Accumulating),
        },
    };
    GapAttribution { x: x.clone(), class: class.clone(), lower, lower_case, upper, upper_case, m_x, n_x }
}

/// `L_x` and `U_x` for every image value with a non-trivial kernel class.
pub fn analyze_idempotent(f: &Endo) -> Result<Vec<GapAttribution>> {
    if is_idempotent(f) != Tristate::True {
        return Err(Error::NotIdempotent);
    }
    let img = f.image();
    Ok(f.kernel_classes().classes.iter().map(|(x, class)| attribute(x, class, &img)).collect())
}

/// The distinct gaps named by an attribution, sorted.
pub fn attributed_gaps(attr: &[GapAttribution]) -> Vec<QInterval> {
    let mut gaps: Vec<QInterval> = attr.iter().flat_map(|a| a.gaps().into_iter().cloned()).collect();
    gaps.sort_by(|a, b| a.lo().cmp(b.lo()).then_with(|| b.lo_closed().cmp(&a.lo_closed())));
    gaps.dedup();
    gaps
}

/// Parameters of a variant, by the position of `β = sup I` relative to
/// the kernel class `I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VariantCase {
    /// `β` irrational; `δ` is an irrational point of `(α, β)`.
    Case1 { alpha: ExtReal, beta: ExtReal, gamma: ExtReal, delta: ExtReal },
    /// `β` rational and in `I`.
    Case2 { alpha: ExtReal, beta: ExtReal, gamma: ExtReal },
    /// `β` rational and outside `I`; `δ` is a rational above `γ`.
    Case3 { alpha: ExtReal, beta: ExtReal, gamma: ExtReal, delta: Rational },
}

impl VariantCase {
    pub fn number(&self) -> u8 {
        match self {
            VariantCase::Case1 { .. } => 1,
            VariantCase::Case2 { .. } => 2,
            VariantCase::Case3 { .. } => 3,
        }
    }

    pub fn alpha(&self) -> &ExtReal {
        match self {
            VariantCase::Case1 { alpha, .. } | VariantCase::Case2 { alpha, .. } | VariantCase::Case3 { alpha, .. } => alpha,
        }
    }

    pub fn gamma(&self) -> &ExtReal {
        match self {
            VariantCase::Case1 { gamma, .. } | VariantCase::Case2 { gamma, .. } | VariantCase::Case3 { gamma, .. } => gamma,
        }
    }
}

impl fmt::Display for VariantCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantCase::Case1 { alpha, beta, gamma, delta } => {
                write!(f, "case 1: alpha = {alpha}, beta = {beta}, gamma = {gamma}, delta = {delta}")
            }
            VariantCase::Case2 { alpha, beta, gamma } => write!(f, "case 2: alpha = {alpha}, beta = {beta}, gamma = {gamma}"),
            VariantCase::Case3 { alpha, beta, gamma, delta } => write!(
                f,
                "case 3: alpha = {alpha}, beta = {beta}, gamma = {gamma}, delta = {}",
                crate::exact::fmt_rational(delta)
            ),
        }
    }
}

/// An idempotent `g = ξ f η` whose kernel class at `value` stretches the
/// class of `q` under `f` up to `γ`.
#[derive(Clone, Debug)]
pub struct Variant {
    pub case: VariantCase,
    pub xi: Endo,
    pub eta: Endo,
    pub g: Endo,
    /// `q η`, the value `g` takes on the stretched class.
    pub value: Rational,
    pub class: QInterval,
}

/// `h = ξ f`, which has the image of `f` and a stretched kernel class.
#[derive(Clone, Debug)]
pub struct RVariant {
    pub case: VariantCase,
    pub xi: Endo,
    pub eta: Endo,
    pub h: Endo,
}

fn piece(dom: Option<QInterval>, map: PieceMap) -> Option<Piece> {
    dom.map(|d| Piece::new(d, map))
}

fn iso_piece(src: Option<QInterval>, dst: Option<QInterval>) -> Result<Option<Piece>> {
    match (src, dst) {
        (Some(s), Some(d)) => Ok(Some(Piece::new(s.clone(), PieceMap::Iso(canon_iso(&s, &d)?)))),
        _ => Ok(None),
    }
}

fn endo_of(parts: Vec<Option<Piece>>) -> Result<Endo> {
    Endo::new(parts.into_iter().flatten().collect())
}

/// An irrational point of `(α, β)`: the midpoint when it is a surd, else a
/// rational of the interval nudged up by a power-of-two multiple of `√2`.
fn irrational_between(alpha: &ExtReal, beta: &ExtReal) -> ExtReal {
    if let Some(m) = alpha.checked_add(beta).map(|s| s.mul_rational(&rat(1, 2))) {
        if m.is_surd() {
            return m;
        }
    }
    let r = rational_between(alpha, beta).expect("alpha < beta");
    let mut step = rat(1, 2);
    loop {
        let d = ExtReal::sqrt_times(step.clone(), 2).add_rational(&r);
        if d < *beta {
            return d;
        }
        step /= int(2);
    }
}

/// Checks `q` against the image of `f` and returns its kernel class.
fn class_of(f: &Endo, q: &Rational) -> Result<QInterval> {
    let img = f.image();
    if !img.contains(q) {
        return Err(Error::NotInImage);
    }
    if img.max() == Some(q) {
        return Err(Error::MaxElement);
    }
    Ok(f.kernel_class(q).expect("image value has a preimage"))
}

/// `ξ` and `η` with `η ξ = 1` that stretch the class `i` up to `γ`.
fn stretch(i: &QInterval, gamma: &ExtReal) -> Result<(VariantCase, Endo, Endo)> {
    let (alpha, beta) = (i.lo().clone(), i.hi().clone());
    if !gamma.is_finite() {
        return Err(Error::BadGamma(format!("gamma = {gamma} is not a real number")));
    }
    if *gamma < beta {
        return Err(Error::BadGamma(format!("gamma = {gamma} is below beta = {beta}")));
    }
    let inf = ExtReal::PosInf;
    let ninf = ExtReal::NegInf;
    match &beta {
        ExtReal::Surd(_) => {
            if !gamma.is_surd() {
                return Err(Error::BadGamma(format!("gamma = {gamma} must be irrational when beta = {beta} is")));
            }
            let delta = irrational_between(&alpha, &beta);
            let xi = endo_of(vec![
                piece(QInterval::open(ninf, delta.clone()), PieceMap::Identity),
                iso_piece(QInterval::open(delta.clone(), gamma.clone()), QInterval::open(delta.clone(), beta.clone()))?,
                iso_piece(QInterval::open(gamma.clone(), inf.clone()), QInterval::open(beta.clone(), inf))?,
            ])?;
            let eta = invert(&xi)?;
            Ok((VariantCase::Case1 { alpha, beta, gamma: gamma.clone(), delta }, xi, eta))
        }
        ExtReal::Rat(b) if i.contains(b) => {
            let xi = endo_of(vec![
                piece(QInterval::new(ninf.clone(), false, beta.clone(), true), PieceMap::Identity),
                piece(QInterval::new(beta.clone(), false, gamma.clone(), true), PieceMap::Const(b.clone())),
                iso_piece(QInterval::open(gamma.clone(), inf.clone()), QInterval::open(beta.clone(), inf.clone()))?,
            ])?;
            let eta = endo_of(vec![
                piece(QInterval::new(ninf, false, beta.clone(), true), PieceMap::Identity),
                iso_piece(QInterval::open(beta.clone(), inf.clone()), QInterval::open(gamma.clone(), inf))?,
            ])?;
            Ok((VariantCase::Case2 { alpha, beta, gamma: gamma.clone() }, xi, eta))
        }
        ExtReal::Rat(b) => {
            let delta = rational_between(gamma, &gamma.add_rational(&Rational::one()))?;
            let d = ExtReal::Rat(delta.clone());
            let xi = endo_of(vec![
                piece(QInterval::new(ninf.clone(), false, alpha.clone(), true), PieceMap::Identity),
                iso_piece(QInterval::open(alpha.clone(), gamma.clone()), QInterval::open(alpha.clone(), beta.clone()))?,
                piece(QInterval::new(gamma.clone(), true, d.clone(), true), PieceMap::Const(b.clone())),
                iso_piece(QInterval::open(d.clone(), inf.clone()), QInterval::open(beta.clone(), inf.clone()))?,
            ])?;
            let eta = endo_of(vec![
                piece(QInterval::new(ninf, false, alpha.clone(), true), PieceMap::Identity),
                iso_piece(QInterval::open(alpha.clone(), beta.clone()), QInterval::open(alpha.clone(), gamma.clone()))?,
                piece(Some(QInterval::point(b.clone())), PieceMap::Const(delta.clone())),
                iso_piece(QInterval::open(beta.clone(), inf.clone()), QInterval::open(d, inf))?,
            ])?;
            Ok((VariantCase::Case3 { alpha, beta, gamma: gamma.clone(), delta }, xi, eta))
        }
        _ => Err(Error::MaxElement),
    }
}

/// The idempotent `g_γ = ξ f η` built from an idempotent `f`, a non-maximal
/// image value `q` and `γ ≥ sup(q f⁻¹)`.
pub fn idempotent_variant(f: &Endo, q: &Rational, gamma: &ExtReal) -> Result<Variant> {
    if is_idempotent(f) != Tristate::True {
        return Err(Error::NotIdempotent);
    }
    let i = class_of(f, q)?;
    let (case, xi, eta) = stretch(&i, gamma)?;
    let g = compose(&compose(&xi, f), &eta);
    let value = eta.apply(q);
    let class = g.kernel_class(&value).expect("value is in the image of g");
    Ok(Variant { case, xi, eta, g, value, class })
}

/// `h = ξ f` for any endomorphism `f`: same image, kernel class of `q`
/// stretched up to `γ`. `η h = f` and `ξ f = h` witness the L-relation.
pub fn r_class_variant(f: &Endo, q: &Rational, gamma: &ExtReal) -> Result<RVariant> {
    let i = class_of(f, q)?;
    let (case, xi, eta) = stretch(&i, gamma)?;
    let h = compose(&xi, f);
    Ok(RVariant { case, xi, eta, h })
}

/// Parameters of an L-class variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LParams {
    /// New positions `q₁ > q₂ > …` for the top isolated maxima of the image.
    Shift(Vec<Rational>),
    /// Squeeze the image below its isolated maxima under `β`; `γ` is the
    /// rational the gap `[β, γ]` is sent back to.
    Squeeze { beta: ExtReal, gamma: Rational },
}

/// `h = f ξ` with the kernel of `f` and a different image, plus `η` with
/// `h η = f`.
#[derive(Clone, Debug)]
pub struct LVariant {
    pub xi: Endo,
    pub eta: Endo,
    pub h: Endo,
}

/// `x₁ > x₂ > …`: each the maximum of the image minus its predecessors.
pub fn isolated_maxima(x: &QSet) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut rest = x.clone();
    while let Some(m) = rest.max().cloned() {
        let above = QInterval::new(ExtReal::Rat(m.clone()), true, ExtReal::PosInf, false).expect("ray");
        rest = rest.intersect(&QSet::from_interval(above).complement());
        out.push(m);
    }
    out
}

fn without_top(x: &QSet, k: usize, maxima: &[Rational]) -> QSet {
    match k {
        0 => x.clone(),
        _ => {
            let cut = QInterval::new(ExtReal::Rat(maxima[k - 1].clone()), true, ExtReal::PosInf, false).expect("ray");
            x.intersect(&QSet::from_interval(cut).complement())
        }
    }
}

/// Piecewise automorphism fixing `(-inf, α]` and moving each `from[i]` to `to[i]`.
/// Both lists are decreasing and lie above `α`.
fn interpolate_above(alpha: &ExtReal, from: &[Rational], to: &[Rational]) -> Result<Endo> {
    let mut pieces = Vec::new();
    let last = from.len() - 1;
    let (xk, qk) = (ExtReal::Rat(from[last].clone()), ExtReal::Rat(to[last].clone()));
    match alpha {
        ExtReal::NegInf => pieces.push(Piece::new(
            QInterval::new(ExtReal::NegInf, false, xk, true).expect("ray"),
            PieceMap::Affine(Rational::one(), &to[last] - &from[last]),
        )),
        ExtReal::Rat(a) => {
            pieces.push(Piece::new(QInterval::new(ExtReal::NegInf, false, alpha.clone(), true).expect("ray"), PieceMap::Identity));
            let slope = (&to[last] - a) / (&from[last] - a);
            let shift = a - &slope * a;
            pieces.push(Piece::new(QInterval::new(alpha.clone(), false, xk, true).expect("interval"), PieceMap::Affine(slope, shift)));
        }
        _ => {
            pieces.push(Piece::new(QInterval::open(ExtReal::NegInf, alpha.clone()).expect("ray"), PieceMap::Identity));
            let src = QInterval::new(alpha.clone(), false, xk, true).expect("interval");
            let dst = QInterval::new(alpha.clone(), false, qk, true).expect("interval");
            pieces.push(Piece::new(src.clone(), PieceMap::Iso(canon_iso(&src, &dst)?)));
        }
    }
    for k in (0..last).rev() {
        let (x0, x1) = (&from[k + 1], &from[k]);
        let (y0, y1) = (&to[k + 1], &to[k]);
        let slope = (y1 - y0) / (x1 - x0);
        let shift = y0 - &slope * x0;
        let dom = QInterval::new(ExtReal::Rat(x0.clone()), false, ExtReal::Rat(x1.clone()), true).expect("interval");
        pieces.push(Piece::new(dom, PieceMap::Affine(slope, shift)));
    }
    pieces.push(Piece::new(
        QInterval::new(ExtReal::Rat(from[0].clone()), false, ExtReal::PosInf, false).expect("ray"),
        PieceMap::Affine(Rational::one(), &to[0] - &from[0]),
    ));
    Endo::new(pieces)
}

/// An R-related map `f ξ` with a different image and the same kernel.
pub fn l_class_variant(f: &Endo, params: &LParams) -> Result<LVariant> {
    let x = f.image();
    if x.is_finite() {
        return Err(Error::FiniteImage);
    }
    let maxima = isolated_maxima(&x);
    let (xi, eta) = match params {
        LParams::Shift(qs) => {
            let k = qs.len();
            if k == 0 || k > maxima.len() {
                return Err(Error::BadParams(format!("expected between 1 and {} positions", maxima.len())));
            }
            if qs.windows(2).any(|w| w[0] <= w[1]) {
                return Err(Error::BadParams("positions must be strictly decreasing".into()));
            }
            if qs[..] == maxima[..k] {
                return Err(Error::BadParams("positions equal the current maxima".into()));
            }
            let y = without_top(&x, k, &maxima);
            let alpha = y.sup().cloned().unwrap_or(ExtReal::NegInf);
            if ExtReal::Rat(qs[k - 1].clone()) <= alpha {
                return Err(Error::BadParams(format!("positions must lie above {alpha}")));
            }
            let xi = interpolate_above(&alpha, &maxima[..k], qs)?;
            let eta = invert(&xi)?;
            (xi, eta)
        }
        LParams::Squeeze { beta, gamma } => {
            let y = without_top(&x, maxima.len(), &maxima);
            let alpha = y.sup().cloned().expect("infinite image keeps a dense part");
            if !alpha.is_finite() {
                return Err(Error::BadParams("the image has no isolated maxima above a bounded part".into()));
            }
            if *beta >= alpha {
                return Err(Error::BadParams(format!("beta must lie below {alpha}")));
            }
            let g = ExtReal::Rat(gamma.clone());
            if g < alpha || maxima.last().is_some_and(|xn| gamma > xn) {
                return Err(Error::BadParams("gamma must lie between alpha and the lowest isolated maximum".into()));
            }
            let ninf = ExtReal::NegInf;
            let xi = endo_of(vec![
                iso_piece(QInterval::open(ninf.clone(), alpha.clone()), QInterval::open(ninf.clone(), beta.clone()))?,
                piece(QInterval::new(alpha.clone(), true, ExtReal::PosInf, false), PieceMap::Identity),
            ])?;
            let eta = endo_of(vec![
                iso_piece(QInterval::open(ninf.clone(), beta.clone()), QInterval::open(ninf, alpha.clone()))?,
                piece(QInterval::new(beta.clone(), true, g.clone(), true), PieceMap::Const(gamma.clone())),
                piece(QInterval::new(g, false, ExtReal::PosInf, false), PieceMap::Identity),
            ])?;
            (xi, eta)
        }
    };
    let h = compose(f, &xi);
    Ok(LVariant { xi, eta, h })
}

/// Evidence that no `h` satisfies `f h f = f`: the image splits as
/// `A ∪ B` with `A < q < B`, `A` without a maximum and `B` without a
/// minimum. Any such `h` would put `q h f` on both sides of `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Straddle {
    pub lower_sup: ExtReal,
    pub upper_inf: ExtReal,
    pub q: Rational,
}

impl fmt::Display for Straddle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "image below {} and above {}, q = {}", self.lower_sup, self.upper_inf, crate::exact::fmt_rational(&self.q))
    }
}

/// Finds a straddle of the image of `f` across the split point `alpha`.
pub fn straddle_certificate(f: &Endo, alpha: &ExtReal) -> Option<Straddle> {
    let img = f.image();
    let below = img.intersect_interval(&QInterval::open(ExtReal::NegInf, alpha.clone())?);
    let above = img.intersect_interval(&QInterval::open(alpha.clone(), ExtReal::PosInf)?);
    if below.is_empty() || above.is_empty() || below.max().is_some() || above.min().is_some() {
        return None;
    }
    let (lo, hi) = (below.sup()?.clone(), above.inf()?.clone());
    let q = rational_between(&lo, &hi).ok()?;
    Some(Straddle { lower_sup: lo, upper_inf: hi, q })
}

/// An endomorphism with image exactly `x`, one block of Q per component.
pub fn onto(x: &QSet) -> Result<Endo> {
    let comps = x.components();
    if comps.is_empty() {
        return Err(Error::EmptySet);
    }
    let cut = |k: usize| ExtReal::sqrt_times(rat(1, 2), 2).add_rational(&int(k as i64));
    let mut pieces = Vec::new();
    for (k, c) in comps.iter().enumerate() {
        let lo = if k == 0 { ExtReal::NegInf } else { cut(k - 1) };
        let hi = if k + 1 == comps.len() { ExtReal::PosInf } else { cut(k) };
        if let Some(v) = c.singleton_value() {
            pieces.push(Piece::new(QInterval::open(lo, hi).expect("block"), PieceMap::Const(v.clone())));
            continue;
        }
        let a = rational_between(&lo, &hi)?;
        let b = rational_between(&ExtReal::Rat(a.clone()), &hi)?;
        let (a, b) = (ExtReal::Rat(a), ExtReal::Rat(b));
        let mut src_lo = lo.clone();
        let mut src_hi = hi.clone();
        if let Some(m) = c.min() {
            pieces.push(Piece::new(QInterval::open(lo, a.clone()).expect("block"), PieceMap::Const(m.clone())));
            src_lo = a;
        }
        if let Some(m) = c.max() {
            pieces.push(Piece::new(QInterval::open(b.clone(), hi).expect("block"), PieceMap::Const(m.clone())));
            src_hi = b;
        }
        let src = QInterval::new(src_lo, c.has_min(), src_hi, c.has_max()).expect("block");
        pieces.push(Piece::new(src.clone(), PieceMap::Iso(canon_iso(&src, c)?)));
    }
    Endo::new(pieces)
}

/// A non-regular map.
#[derive(Clone, Debug)]
pub struct NonRegular {
    /// A map with image exactly `X`.
    pub g: Endo,
    /// Squeezes `(-inf, α)` onto `(-inf, δ)`, identity above `α`.
    pub xi: Endo,
    pub delta: Rational,
    pub f: Endo,
    pub certificate: Straddle,
}

/// Splits `x` at the irrational point `alpha` and pulls the lower half
/// down below a rational `δ < α`, leaving a gap no `h` can bridge.
pub fn nonregular_endo(x: &QSet, alpha: &ExtReal) -> Result<NonRegular> {
    if !alpha.is_surd() {
        return Err(Error::BadSplit(format!("{alpha} is not irrational")));
    }
    let comp = x
        .components()
        .iter()
        .find(|c| c.lo() < alpha && alpha < c.hi())
        .ok_or_else(|| Error::BadSplit(format!("{alpha} is not inside a component")))?;
    let delta = rational_between(comp.lo(), alpha)?;
    let g = onto(x)?;
    let d = ExtReal::Rat(delta.clone());
    let ninf = ExtReal::NegInf;
    let xi = endo_of(vec![
        iso_piece(QInterval::open(ninf.clone(), alpha.clone()), QInterval::open(ninf, d))?,
        piece(QInterval::open(alpha.clone(), ExtReal::PosInf), PieceMap::Identity),
    ])?;
    let f = compose(&g, &xi);
    let certificate = straddle_certificate(&f, alpha).expect("the split leaves a straddle");
    Ok(NonRegular { g, xi, delta, f, certificate })
}

/// Searches piecewise-constant-or-identity maps with at most `max_pieces`
/// pieces, breakpoints and values from `pool`, for an `h` with `f h f = f`
/// on `probes`. Returns the number of candidates tried and the first hit.
pub fn search_inner_inverse(
    f: &Endo,
    pool: &[Rational],
    max_pieces: usize,
    probes: &[Rational],
) -> (usize, Option<Endo>) {
    let mut cache: HashMap<Rational, Rational> = HashMap::new();
    let mut fx = |x: &Rational| cache.entry(x.clone()).or_insert_with(|| f.apply(x)).clone();
    let targets: Vec<(Rational, Rational)> = probes.iter().map(|p| (p.clone(), fx(p))).collect();
    let mut pool = pool.to_vec();
    pool.sort();
    pool.dedup();
    let mut maps: Vec<PieceMap> = pool.iter().cloned().map(PieceMap::Const).collect();
    maps.push(PieceMap::Identity);
    maps.push(PieceMap::Affine(int(2), Rational::zero()));
    let mut tried = 0;
    for k in 1..=max_pieces {
        for cuts in choose(pool.len(), k - 1) {
            let mut choice = vec![0usize; k];
            loop {
                let pieces = (0..k)
                    .map(|j| {
                        let lo = if j == 0 { ExtReal::NegInf } else { ExtReal::Rat(pool[cuts[j - 1]].clone()) };
                        let hi = if j + 1 == k { ExtReal::PosInf } else { ExtReal::Rat(pool[cuts[j]].clone()) };
                        Piece::new(QInterval::new(lo, false, hi, j + 1 < k).expect("cut"), maps[choice[j]].clone())
                    })
                    .collect();
                if let Ok(h) = Endo::new(pieces) {
                    tried += 1;
                    if targets.iter().all(|(_, y)| fx(&h.apply(y)) == *y) {
                        return (tried, Some(h));
                    }
                }
                let mut j = 0;
                while j < k && choice[j] + 1 == maps.len() {
                    choice[j] = 0;
                    j += 1;
                }
                if j == k {
                    break;
                }
                choice[j] += 1;
            }
        }
    }
    (tried, None)
}

/// Increasing `k`-subsets of `0..n`.
fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Canonical probes of Q followed by probes of each image component.
pub fn image_probes(f: &Endo, depth: usize) -> Vec<Rational> {
    let mut out = probe_points(&QInterval::full(), depth);
    for c in f.image().components() {
        out.extend(probe_points(c, depth));
    }
    out.sort();
    out.dedup();
    out
}

/// Whether `compose(compose(f, g), h)` equals `target`.
pub fn check_triple(f: &Endo, g: &Endo, h: &Endo, target: &Endo) -> Tristate {
    equal(&compose(&compose(f, g), h), target)
}
