//! Text grammars shared by the library and the command line.
//!
//! ```text
//! ext      := "inf" | "-inf" | rational | surd
//! surd     := rational ("+" | "-") [rational "*"] "sqrt(" int ")"
//!           | ["-"] [rational "*"] "sqrt(" int ")"
//! interval := ("(" | "[") ext "," ext (")" | "]") | "{" rational "}"
//! qset     := "Q" | "{}" | interval ("u" interval)* | "~" qset
//! piece    := "piece on" interval ":" map
//! map      := "id" | "const" q | "affine" a b | "iso" interval "->" interval
//!           | "chain [" link (">>" link)* "]"
//! ```
//!
//! Endo pieces are separated by newlines or `;`. A bare map with no
//! `piece on` prefix applies to all of Q.

use num_bigint::BigInt;
use num_traits::One;

use crate::endo::{canon_iso, Endo, Link, Piece, PieceMap};
use crate::error::{Error, Result};
use crate::exact::{ExtReal, Rational};
use crate::qset::{QInterval, QSet};

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { s, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{token}`")))
        }
    }

    fn error(&self, what: &str) -> Error {
        let near: String = self.rest().chars().take(16).collect();
        Error::Parse(format!("{what} at offset {} near `{near}`", self.pos))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.s.len()
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let n = rest.bytes().take_while(u8::is_ascii_digit).count();
        if n == 0 {
            return None;
        }
        self.pos += n;
        Some(&rest[..n])
    }

    /// Unsigned `p` or `p/q`.
    fn unsigned_rational(&mut self) -> Result<Option<Rational>> {
        let Some(p) = self.digits() else { return Ok(None) };
        let num: BigInt = p.parse().expect("digits");
        let save = self.pos;
        if self.eat("/") {
            let Some(q) = self.digits() else {
                self.pos = save;
                return Err(self.error("expected denominator"));
            };
            let den: BigInt = q.parse().expect("digits");
            if den == BigInt::from(0) {
                return Err(self.error("zero denominator"));
            }
            return Ok(Some(Rational::new(num, den)));
        }
        Ok(Some(Rational::from_integer(num)))
    }

    fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat("-");
        let r = self.unsigned_rational()?.ok_or_else(|| self.error("expected a rational"))?;
        Ok(if neg { -r } else { r })
    }

    /// `sqrt(d)` after its coefficient, if present.
    fn sqrt_tail(&mut self) -> Result<Option<u64>> {
        if !self.eat("sqrt") {
            return Ok(None);
        }
        self.expect("(")?;
        let d = self.digits().ok_or_else(|| self.error("expected radicand"))?;
        let d: u64 = d.parse().map_err(|_| self.error("radicand too large"))?;
        self.expect(")")?;
        Ok(Some(d))
    }

    /// `[coef "*"] "sqrt(" d ")"` with the sign already consumed.
    fn radical_term(&mut self) -> Result<Option<(Rational, u64)>> {
        let save = self.pos;
        if let Some(d) = self.sqrt_tail()? {
            return Ok(Some((Rational::one(), d)));
        }
        if let Some(c) = self.unsigned_rational()? {
            if self.eat("*") {
                if let Some(d) = self.sqrt_tail()? {
                    return Ok(Some((c, d)));
                }
                return Err(self.error("expected sqrt"));
            }
        }
        self.pos = save;
        Ok(None)
    }

    fn ext(&mut self) -> Result<ExtReal> {
        if self.eat("+inf") || self.eat("inf") {
            return Ok(ExtReal::PosInf);
        }
        let save = self.pos;
        let neg = self.eat("-");
        if self.eat("inf") {
            return Ok(ExtReal::NegInf);
        }
        if let Some((c, d)) = self.radical_term()? {
            let c = if neg { -c } else { c };
            return ExtReal::surd(Rational::from_integer(0.into()), c, d);
        }
        self.pos = save;
        let a = self.rational()?;
        let save = self.pos;
        let sign = if self.eat("+") {
            Some(false)
        } else if self.eat("-") {
            Some(true)
        } else {
            None
        };
        if let Some(minus) = sign {
            let minus = minus ^ self.eat("-");
            if let Some((c, d)) = self.radical_term()? {
                return ExtReal::surd(a, if minus { -c } else { c }, d);
            }
            self.pos = save;
        }
        Ok(ExtReal::Rat(a))
    }

    fn interval(&mut self) -> Result<QInterval> {
        self.maybe_interval()?.ok_or_else(|| self.error("empty interval"))
    }

    /// An interval literal, `None` when it holds no rational.
    fn maybe_interval(&mut self) -> Result<Option<QInterval>> {
        if self.eat("{") {
            let q = self.rational()?;
            self.expect("}")?;
            return Ok(Some(QInterval::point(q)));
        }
        let lo_closed = if self.eat("[") {
            true
        } else if self.eat("(") {
            false
        } else {
            return Err(self.error("expected an interval"));
        };
        let lo = self.ext()?;
        self.expect(",")?;
        let hi = self.ext()?;
        let hi_closed = if self.eat("]") {
            true
        } else if self.eat(")") {
            false
        } else {
            return Err(self.error("expected `)` or `]`"));
        };
        Ok(QInterval::new(lo, lo_closed, hi, hi_closed))
    }

    fn qset(&mut self) -> Result<QSet> {
        if self.eat("~") {
            return Ok(self.qset()?.complement());
        }
        if self.eat("{}") {
            return Ok(QSet::empty());
        }
        if self.peek() == Some('Q') {
            self.pos += 1;
            return Ok(QSet::full());
        }
        let mut parts = vec![self.maybe_interval()?];
        while self.eat("u ") || self.eat("U ") || self.eat("∪") {
            parts.push(self.maybe_interval()?);
        }
        Ok(QSet::normalize(parts.into_iter().flatten()))
    }

    fn link(&mut self) -> Result<Link> {
        if self.eat("affine") {
            let a = self.rational()?;
            let b = self.rational()?;
            return Ok(Link::Affine(a, b));
        }
        if self.eat("iso") {
            let src = self.interval()?;
            self.expect("->")?;
            let dst = self.interval()?;
            return Ok(Link::Iso(canon_iso(&src, &dst)?));
        }
        Err(self.error("expected `affine` or `iso`"))
    }

    fn map(&mut self) -> Result<PieceMap> {
        if self.eat("id") {
            return Ok(PieceMap::Identity);
        }
        if self.eat("const") {
            return Ok(PieceMap::Const(self.rational()?));
        }
        if self.eat("chain") {
            self.expect("[")?;
            let mut links = vec![self.link()?];
            while self.eat(">>") {
                links.push(self.link()?);
            }
            self.expect("]")?;
            return Ok(PieceMap::Chain(links));
        }
        Ok(match self.link()? {
            Link::Affine(a, b) => PieceMap::Affine(a, b),
            Link::Iso(i) => PieceMap::Iso(i),
        })
    }
}

fn finish<T>(mut c: Cursor<'_>, v: T) -> Result<T> {
    if c.at_end() {
        Ok(v)
    } else {
        Err(c.error("trailing input"))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let mut c = Cursor::new(s);
    let v = c.rational()?;
    finish(c, v)
}

pub fn parse_ext(s: &str) -> Result<ExtReal> {
    let mut c = Cursor::new(s);
    let v = c.ext()?;
    finish(c, v)
}

pub fn parse_interval(s: &str) -> Result<QInterval> {
    let mut c = Cursor::new(s);
    let v = c.interval()?;
    finish(c, v)
}

pub fn parse_qset(s: &str) -> Result<QSet> {
    let mut c = Cursor::new(s);
    let v = c.qset()?;
    finish(c, v)
}

pub fn parse_endo(s: &str) -> Result<Endo> {
    let mut pieces = Vec::new();
    for line in s.split(['\n', ';']).map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let mut c = Cursor::new(line);
        let domain = if c.eat("piece on") {
            let d = c.interval()?;
            c.expect(":")?;
            d
        } else {
            QInterval::full()
        };
        let map = c.map()?;
        pieces.push(finish(c, Piece::new(domain, map))?);
    }
    Endo::new(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn extended_reals() {
        assert_eq!(parse_ext("-inf").unwrap(), ExtReal::NegInf);
        assert_eq!(parse_ext("inf").unwrap(), ExtReal::PosInf);
        assert_eq!(parse_ext("-7/14").unwrap(), ExtReal::Rat(rat(-1, 2)));
        let s = parse_ext("1 + 1*sqrt(2)").unwrap();
        assert_eq!(s, ExtReal::surd(int(1), int(1), 2).unwrap());
        assert_eq!(parse_ext("1 - 1/2*sqrt(2)").unwrap(), ExtReal::surd(int(1), rat(-1, 2), 2).unwrap());
        assert_eq!(parse_ext("1 + -1*sqrt(3)").unwrap(), ExtReal::surd(int(1), int(-1), 3).unwrap());
        assert_eq!(parse_ext("-sqrt(2)").unwrap(), ExtReal::sqrt_times(int(-1), 2));
        assert!(parse_ext("1/0").is_err());
        assert!(parse_ext("1 +").is_err());
    }

    #[test]
    fn printed_values_reparse() {
        for s in ["0 + 1/2*sqrt(2)", "-3/4", "inf", "-inf", "5 + -2*sqrt(7)"] {
            let v = parse_ext(s).unwrap();
            assert_eq!(parse_ext(&v.to_string()).unwrap(), v);
        }
    }

    #[test]
    fn sets() {
        let x = parse_qset("(-inf,0] u {1/2} u (1, 1+1*sqrt(2))").unwrap();
        assert_eq!(x.components().len(), 3);
        assert_eq!(parse_qset(&x.to_string()).unwrap(), x);
        assert!(parse_qset("Q").unwrap().is_full());
        assert!(parse_qset("{}").unwrap().is_empty());
        assert_eq!(parse_qset("~(0,1)").unwrap().to_string(), "(-inf,0] u [1,inf)");
        assert!(parse_qset("(1,0)").unwrap().is_empty());
        assert!(parse_interval("(1,0)").is_err());
    }

    #[test]
    fn endos() {
        let f = parse_endo("piece on (-inf,0): const 0; piece on [0,1]: id; piece on (1,inf): const 1").unwrap();
        assert_eq!(parse_endo(&f.to_string()).unwrap(), f);
        assert!(parse_endo("affine 2 1").is_ok());
        assert!(parse_endo("affine -2 1").is_err());
        assert!(parse_endo("piece on (-inf,0): id").is_err());
    }
}
