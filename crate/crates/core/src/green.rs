//! Green's relations: a brute-force oracle on finite chains and the
//! image/kernel criteria on endomorphisms of Q.

use std::collections::HashMap;
use std::fmt;

use crate::endo::{compose, is_idempotent, Endo, Piece, PieceMap, Tristate, DEFAULT_DEPTH};
use crate::error::{Error, Result};
use crate::exact::{ExtReal, Rational};
use crate::qset::QInterval;

pub const MAX_ENUMERATE: usize = 8;
pub const MAX_CLASSIFY: usize = 6;

/// An order-preserving self-map of `{1, …, n}`, as its value list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinChainMap {
    pub values: Vec<u8>,
}

impl FinChainMap {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn apply(&self, i: u8) -> u8 {
        self.values[i as usize - 1]
    }

    /// `self` then `other`.
    pub fn then(&self, other: &FinChainMap) -> FinChainMap {
        FinChainMap { values: self.values.iter().map(|&v| other.apply(v)).collect() }
    }

    pub fn image(&self) -> Vec<u8> {
        let mut v = self.values.clone();
        v.dedup();
        v
    }

    /// Sizes of the kernel blocks, left to right.
    pub fn kernel(&self) -> Vec<usize> {
        let mut blocks: Vec<usize> = Vec::new();
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 && self.values[k - 1] == *v {
                *blocks.last_mut().expect("block") += 1;
            } else {
                blocks.push(1);
            }
        }
        blocks
    }
}

impl fmt::Display for FinChainMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(u8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_size(n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::BadParams("chain size must be positive".into()));
    }
    if n > max {
        return Err(Error::TooLarge(n, max));
    }
    Ok(())
}

/// All monotone self-maps of an `n`-chain, in lexicographic order.
pub fn enumerate_chain_endos(n: usize) -> Result<Vec<FinChainMap>> {
    check_size(n, MAX_ENUMERATE)?;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, lo: u8, cur: &mut Vec<u8>, out: &mut Vec<FinChainMap>) {
        if cur.len() == n {
            out.push(FinChainMap { values: cur.clone() });
            return;
        }
        for v in lo..=n as u8 {
            cur.push(v);
            rec(n, v, cur, out);
            cur.pop();
        }
    }
    rec(n, 1, &mut cur, &mut out);
    Ok(out)
}

/// Green's relations of the monoid of monotone self-maps of an `n`-chain,
/// found from the definitions. Classes are lists of element indices,
/// sorted, and ordered by their first member.
#[derive(Clone, Debug)]
pub struct GreenTable {
    pub n: usize,
    pub elements: Vec<FinChainMap>,
    pub idempotent: Vec<bool>,
    /// `g` with `f g f = f`, when one exists.
    pub regular_witness: Vec<Option<usize>>,
    pub l_classes: Vec<Vec<usize>>,
    pub r_classes: Vec<Vec<usize>>,
    pub h_classes: Vec<Vec<usize>>,
    pub d_classes: Vec<Vec<usize>>,
    /// `(u, v)` with `f = u·rep` and `rep = v·f` for the L-class representative.
    pub l_witness: Vec<(usize, usize)>,
    /// `(u, v)` with `f = rep·u` and `rep = f·v` for the R-class representative.
    pub r_witness: Vec<(usize, usize)>,
    /// `mult[a][b]` is the index of `a` then `b`.
    pub mult: Vec<Vec<u16>>,
}

fn classes_of(keys: &[usize]) -> Vec<Vec<usize>> {
    let mut by_key: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &k) in keys.iter().enumerate() {
        by_key.entry(k).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = by_key.into_values().collect();
    out.sort();
    out
}

fn rep_of(classes: &[Vec<usize>], len: usize) -> Vec<usize> {
    let mut rep = vec![0; len];
    for c in classes {
        for &i in c {
            rep[i] = c[0];
        }
    }
    rep
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

pub fn green_classify(n: usize) -> Result<GreenTable> {
    check_size(n, MAX_CLASSIFY)?;
    let elements = enumerate_chain_endos(n)?;
    let m = elements.len();
    let index: HashMap<&FinChainMap, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mult: Vec<Vec<u16>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&a.then(b)] as u16).collect())
        .collect();

    // Principal one-sided ideals as bitsets, with a multiplier for each member.
    let words = m.div_ceil(64);
    let mut left = vec![vec![0u64; words]; m];
    let mut right = vec![vec![0u64; words]; m];
    let mut left_by: Vec<HashMap<usize, usize>> = vec![HashMap::new(); m];
    let mut right_by: Vec<HashMap<usize, usize>> = vec![HashMap::new(); m];
    for f in 0..m {
        for u in 0..m {
            let lf = mult[u][f] as usize;
            if left[f][lf / 64] & (1 << (lf % 64)) == 0 {
                left[f][lf / 64] |= 1 << (lf % 64);
                left_by[f].insert(lf, u);
            }
            let fr = mult[f][u] as usize;
            if right[f][fr / 64] & (1 << (fr % 64)) == 0 {
                right[f][fr / 64] |= 1 << (fr % 64);
                right_by[f].insert(fr, u);
            }
        }
    }
    let key = |sets: &Vec<Vec<u64>>| {
        let mut ids: HashMap<&Vec<u64>, usize> = HashMap::new();
        sets.iter().map(|s| { let next = ids.len(); *ids.entry(s).or_insert(next) }).collect::<Vec<usize>>()
    };
    let l_key = key(&left);
    let r_key = key(&right);
    let l_classes = classes_of(&l_key);
    let r_classes = classes_of(&r_key);
    let h_key: Vec<usize> = (0..m).map(|i| l_key[i] * m + r_key[i]).collect();
    let h_classes = classes_of(&h_key);

    let mut parent: Vec<usize> = (0..m).collect();
    for c in l_classes.iter().chain(r_classes.iter()) {
        for &i in &c[1..] {
            let (a, b) = (find(&mut parent, c[0]), find(&mut parent, i));
            parent[a.max(b)] = a.min(b);
        }
    }
    let d_key: Vec<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
    let d_classes = classes_of(&d_key);

    let l_rep = rep_of(&l_classes, m);
    let r_rep = rep_of(&r_classes, m);
    let l_witness = (0..m).map(|f| (left_by[l_rep[f]][&f], left_by[f][&l_rep[f]])).collect();
    let r_witness = (0..m).map(|f| (right_by[r_rep[f]][&f], right_by[f][&r_rep[f]])).collect();
    let idempotent = (0..m).map(|f| mult[f][f] as usize == f).collect();
    let regular_witness = (0..m).map(|f| (0..m).find(|&g| mult[mult[f][g] as usize][f] as usize == f)).collect();
    Ok(GreenTable {
        n,
        elements,
        idempotent,
        regular_witness,
        l_classes,
        r_classes,
        h_classes,
        d_classes,
        l_witness,
        r_witness,
        mult,
    })
}

impl GreenTable {
    fn rep(classes: &[Vec<usize>], i: usize) -> usize {
        classes.iter().find(|c| c.contains(&i)).map(|c| c[0]).expect("partition")
    }

    pub fn l_rep(&self, i: usize) -> usize {
        Self::rep(&self.l_classes, i)
    }

    pub fn r_rep(&self, i: usize) -> usize {
        Self::rep(&self.r_classes, i)
    }

    pub fn d_rep(&self, i: usize) -> usize {
        Self::rep(&self.d_classes, i)
    }

    pub fn h_class_of(&self, i: usize) -> &[usize] {
        self.h_classes.iter().find(|c| c.contains(&i)).expect("partition")
    }

    pub fn is_regular(&self, i: usize) -> bool {
        self.regular_witness[i].is_some()
    }

    /// `element, image, kernel, Lrep, Rrep, Drep, idempotent?, regular?` per element.
    pub fn rows(&self) -> Vec<[String; 8]> {
        (0..self.elements.len())
            .map(|i| {
                let e = &self.elements[i];
                let image: Vec<String> = e.image().iter().map(u8::to_string).collect();
                let kernel: Vec<String> = e.kernel().iter().map(usize::to_string).collect();
                [
                    e.to_string(),
                    format!("{{{}}}", image.join(",")),
                    format!("[{}]", kernel.join("|")),
                    self.elements[self.l_rep(i)].to_string(),
                    self.elements[self.r_rep(i)].to_string(),
                    self.elements[self.d_rep(i)].to_string(),
                    yes_no(self.idempotent[i]).into(),
                    yes_no(self.is_regular(i)).into(),
                ]
            })
            .collect()
    }

    /// The rows as comma-separated lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("element,image,kernel,Lrep,Rrep,Drep,idempotent,regular\n");
        for r in self.rows() {
            let quoted: Vec<String> = r.iter().map(|c| if c.contains(',') { format!("\"{c}\"") } else { c.clone() }).collect();
            out.push_str(&quoted.join(","));
            out.push('\n');
        }
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for GreenTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = ["element", "image", "kernel", "L-rep", "R-rep", "D-rep", "idempotent", "regular"];
        let rows = self.rows();
        let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &rows {
            for (w, c) in width.iter_mut().zip(r.iter()) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(f, "{}", line(header.to_vec()))?;
        for r in &rows {
            writeln!(f, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        write!(
            f,
            "{} elements, {} idempotents, {} L-classes, {} R-classes, {} H-classes, {} D-classes",
            self.elements.len(),
            self.idempotent.iter().filter(|&&b| b).count(),
            self.l_classes.len(),
            self.r_classes.len(),
            self.h_classes.len(),
            self.d_classes.len()
        )
    }
}

pub fn same_image(f: &Endo, g: &Endo) -> bool {
    f.image() == g.image()
}

/// Equal kernels as equivalence relations; the class values are ignored.
pub fn same_kernel(f: &Endo, g: &Endo) -> bool {
    f.kernel_classes().intervals() == g.kernel_classes().intervals()
}

/// For `f` with finite image, an automorphism `g` with `f g f = f`: it
/// sends each image value to the simplest point of its kernel class.
pub fn is_regular_finite_image(f: &Endo) -> Result<Endo> {
    let img = f.image();
    if !img.is_finite() {
        return Err(Error::InfiniteImage);
    }
    let xs: Vec<Rational> = img.components().iter().map(|c| c.singleton_value().expect("finite").clone()).collect();
    let qs: Vec<Rational> = xs.iter().map(|x| f.kernel_class(x).expect("image value").simplest()).collect();
    interpolate(&xs, &qs)
}

/// Piecewise-affine automorphism sending `xs[i]` to `ys[i]`; both increasing.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Result<Endo> {
    let k = xs.len();
    if k == 0 || k != ys.len() {
        return Err(Error::BadParams("need equally many points on both sides".into()));
    }
    let x = |i: usize| ExtReal::Rat(xs[i].clone());
    let one = Rational::from_integer(1.into());
    let mut pieces = vec![Piece::new(
        QInterval::new(ExtReal::NegInf, false, x(0), true).expect("ray"),
        PieceMap::Affine(one.clone(), &ys[0] - &xs[0]),
    )];
    for i in 1..k {
        let slope = (&ys[i] - &ys[i - 1]) / (&xs[i] - &xs[i - 1]);
        let shift = &ys[i - 1] - &slope * &xs[i - 1];
        pieces.push(Piece::new(QInterval::new(x(i - 1), false, x(i), true).expect("interval"), PieceMap::Affine(slope, shift)));
    }
    pieces.push(Piece::new(
        QInterval::new(x(k - 1), false, ExtReal::PosInf, false).expect("ray"),
        PieceMap::Affine(one, &ys[k - 1] - &xs[k - 1]),
    ));
    Endo::new(pieces)
}

/// Regular by a criterion the library can check: idempotent, invertible,
/// or with finite image.
pub fn known_regular(f: &Endo) -> bool {
    f.image().is_finite() || f.is_bijective() || is_idempotent(f) == Tristate::True
}

/// D-relation through the order type of the images. Equal order types
/// decide it only when both maps are known to be regular.
pub fn d_related(f: &Endo, g: &Endo) -> Tristate {
    if f.image().signature() != g.image().signature() {
        return Tristate::False;
    }
    if known_regular(f) && known_regular(g) {
        Tristate::True
    } else {
        Tristate::Undecided(DEFAULT_DEPTH)
    }
}

/// Whether `compose(compose(f, g), f)` is `f`.
pub fn is_inner_inverse(f: &Endo, g: &Endo) -> Tristate {
    crate::endo::equal(&compose(&compose(f, g), f), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{nonregular_endo, r_class_variant, retract_onto};
    use crate::exact::{int, rat};
    use crate::parse::{parse_endo, parse_qset};

    fn binom(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_chain_endos(1).unwrap(), vec![FinChainMap { values: vec![1] }]);
        let two: Vec<String> = enumerate_chain_endos(2).unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(two, ["(1,1)", "(1,2)", "(2,2)"]);
        for n in 1..=8u64 {
            assert_eq!(enumerate_chain_endos(n as usize).unwrap().len() as u64, binom(2 * n - 1, n - 1));
        }
        assert_eq!(enumerate_chain_endos(9).unwrap_err(), Error::TooLarge(9, 8));
    }

    #[test]
    fn chain_of_two() {
        let t = green_classify(2).unwrap();
        assert_eq!(t.d_classes, vec![vec![0, 2], vec![1]]);
        assert_eq!(t.l_classes, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(t.r_classes, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn chain_of_three() {
        let t = green_classify(3).unwrap();
        assert_eq!(t.elements.len(), 10);
        assert_eq!(t.d_classes.len(), 3);
        for d in &t.d_classes {
            let k = t.elements[d[0]].image().len() as u64;
            let ls = t.l_classes.iter().filter(|c| d.contains(&c[0])).count() as u64;
            let rs = t.r_classes.iter().filter(|c| d.contains(&c[0])).count() as u64;
            assert_eq!((ls, rs), (binom(3, k), binom(2, k - 1)));
        }
        assert!((0..10).all(|i| t.is_regular(i)));
        assert!(t.h_classes.iter().all(|c| c.len() == 1));
        for i in 0..10 {
            let (u, v) = t.l_witness[i];
            assert_eq!(t.mult[u][t.l_rep(i)] as usize, i);
            assert_eq!(t.mult[v][i] as usize, t.l_rep(i));
        }
        assert!(t.to_string().ends_with("3 D-classes"));
    }

    #[test]
    fn endo_criteria() {
        let clamp = retract_onto(&parse_qset("[0,1]").unwrap()).unwrap();
        let h = r_class_variant(&clamp, &int(0), &ExtReal::Rat(rat(1, 2))).unwrap().h;
        assert!(same_image(&clamp, &h));
        assert!(!same_kernel(&clamp, &h));
        assert!(same_image(&clamp, &clamp));
    }

    #[test]
    fn finite_image_witness() {
        let f = parse_endo("piece on (-inf,0): const 0; piece on [0,inf): const 1").unwrap();
        let g = is_regular_finite_image(&f).unwrap();
        assert_eq!(g, Endo::translation(int(-1)));
        assert_eq!(is_inner_inverse(&f, &g), Tristate::True);
        let c = Endo::constant(int(5));
        assert_eq!(is_inner_inverse(&c, &is_regular_finite_image(&c).unwrap()), Tristate::True);
        let clamp = retract_onto(&parse_qset("[0,1]").unwrap()).unwrap();
        assert_eq!(is_regular_finite_image(&clamp).unwrap_err(), Error::InfiniteImage);
    }

    #[test]
    fn d_relation() {
        let a = retract_onto(&parse_qset("[0,1]").unwrap()).unwrap();
        let b = retract_onto(&parse_qset("[2,5]").unwrap()).unwrap();
        assert_eq!(d_related(&a, &b), Tristate::True);
        assert_eq!(d_related(&Endo::constant(int(0)), &Endo::identity()), Tristate::False);
        let alpha = ExtReal::sqrt_times(rat(1, 2), 2);
        let f = nonregular_endo(&parse_qset("(0,1)").unwrap(), &alpha).unwrap().f;
        let g = nonregular_endo(&parse_qset("(0,1) u (2,3)").unwrap(), &alpha).unwrap().f;
        assert!(matches!(d_related(&f, &g), Tristate::Undecided(_)));
    }
}
