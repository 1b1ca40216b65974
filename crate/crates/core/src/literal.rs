//! Text format for p-adic literals.
//!
//! Printing is canonical: `d0 + d1*5^1 + d3*5^3 + O(5^6)` over Q_p, digits in
//! [0, p), zero digits omitted. Ramified fields print in powers of `pi`, and
//! residue digits of f > 1 fields print as `[a0,a1]`.
//! Parsing accepts any arithmetic expression in integers, `p`, `pi`, residue
//! vectors, `+ - * / ^` and parentheses, plus at most one `O(...)` term.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::padic::PadicElem;

pub fn format_padic(x: &PadicElem) -> String {
    let field = x.field();
    let k = field.residue_field();
    let base = if field.e() == 1 {
        field.p().to_string()
    } else {
        "pi".to_string()
    };
    // over Q_p the uniformizer is p itself, so pi-digits are p-digits
    let digits = x.digits();
    let mut parts = Vec::new();
    for (j, d) in digits.iter().enumerate() {
        if *d == 0 {
            continue;
        }
        let ds = k.format(*d);
        if j == 0 {
            parts.push(ds);
        } else if ds == "1" {
            parts.push(format!("{base}^{j}"));
        } else {
            parts.push(format!("{ds}*{base}^{j}"));
        }
    }
    parts.push(format!("O({base}^{})", x.precision()));
    parts.join(" + ")
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Int(cs[st..i].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()[],".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' in '{s}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a Field,
    hi: u32,
    cap: Option<u32>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}'")))
        }
    }

    fn int_elem(&self, digits: &str) -> PadicElem {
        let m = self.field.modulus() as u128;
        let mut v: u128 = 0;
        for d in digits.bytes() {
            v = (v * 10 + (d - b'0') as u128) % m;
        }
        PadicElem::from_int(self.field, v as i64, self.hi)
    }

    fn expr(&mut self) -> Result<Option<PadicElem>> {
        let mut neg = false;
        if self.eat('-') {
            neg = true;
        } else {
            self.eat('+');
        }
        let mut acc = self.term()?.map(|t| if neg { t.neg() } else { t });
        loop {
            let sign = if self.eat('+') {
                1
            } else if self.eat('-') {
                -1
            } else {
                break;
            };
            if let Some(t) = self.term()? {
                let t = if sign < 0 { t.neg() } else { t };
                acc = Some(match acc {
                    Some(a) => a.add(&t)?,
                    None => t,
                });
            }
        }
        Ok(acc)
    }

    /// None means the term was an O(...) marker.
    fn term(&mut self) -> Result<Option<PadicElem>> {
        if let Some(Tok::Ident(name)) = self.peek() {
            if name == "O" {
                self.pos += 1;
                self.expect('(')?;
                let inner = self
                    .expr()?
                    .ok_or_else(|| Error::Parse("empty O()".into()))?;
                self.expect(')')?;
                let v = inner
                    .valuation()
                    .ok_or_else(|| Error::Parse("O() argument too large".into()))?;
                if self.cap.is_some() {
                    return Err(Error::Parse("more than one O() term".into()));
                }
                self.cap = Some(v);
                return Ok(None);
            }
        }
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let f = self.factor()?;
                acc = acc.mul(&f)?;
            } else if self.eat('/') {
                let f = self.factor()?;
                acc = acc.div(&f)?;
            } else {
                break;
            }
        }
        Ok(Some(acc))
    }

    fn factor(&mut self) -> Result<PadicElem> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let n: u32 = n
                        .parse()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(n).with_precision(self.hi))
                }
                _ => Err(Error::Parse(
                    "exponent must be a non-negative integer".into(),
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PadicElem> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Int(d)) => {
                self.pos += 1;
                Ok(self.int_elem(&d))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "p" => Ok(PadicElem::from_int(
                        self.field,
                        self.field.p() as i64,
                        self.hi,
                    )),
                    "pi" => Ok(PadicElem::pi(self.field, self.hi)),
                    _ => Err(Error::Parse(format!("unknown symbol '{name}'"))),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self
                    .expr()?
                    .ok_or_else(|| Error::Parse("empty parentheses".into()))?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Tok::Sym('[')) => {
                self.pos += 1;
                let mut digits = Vec::new();
                loop {
                    let neg = self.eat('-');
                    match self.toks.get(self.pos).cloned() {
                        Some(Tok::Int(d)) => {
                            self.pos += 1;
                            let v: i64 = d.parse().map_err(|_| Error::Parse("bad digit".into()))?;
                            digits.push(if neg { -v } else { v });
                        }
                        _ => return Err(Error::Parse("expected residue digit".into())),
                    }
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(']')?;
                let k = self.field.residue_field();
                if digits.len() > k.f() {
                    return Err(Error::Parse("too many residue digits".into()));
                }
                let p = self.field.p() as i64;
                let d: Vec<u32> = digits.iter().map(|v| v.rem_euclid(p) as u32).collect();
                Ok(PadicElem::from_residue(
                    self.field,
                    k.from_digits(&d),
                    self.hi,
                ))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_padic(field: &Field, s: &str) -> Result<PadicElem> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty literal".into()));
    }
    let mut ps = Parser {
        toks,
        pos: 0,
        field,
        hi: field.max_precision(),
        cap: None,
    };
    let v = ps.expr()?;
    if ps.pos != ps.toks.len() {
        return Err(Error::Parse(format!("trailing input in '{s}'")));
    }
    let prec = ps
        .cap
        .unwrap_or(field.params().pi_precision)
        .min(field.max_precision());
    let v = v.unwrap_or_else(|| PadicElem::zero(field, prec));
    if v.precision() < prec {
        return Err(Error::Parse(format!(
            "literal '{s}' is only known mod pi^{}",
            v.precision()
        )));
    }
    Ok(v.with_precision(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    #[test]
    fn round_trip_qp() {
        let k = Field::qp(5).unwrap();
        let x = parse_padic(&k, "5 + O(5^6)").unwrap();
        assert_eq!(x.precision(), 6);
        assert_eq!(x.to_u64(), Some(5));
        assert_eq!(x.to_string(), "5^1 + O(5^6)");
        let y = parse_padic(&k, "3 + 2*5^1 + 4*5^3 + O(5^5)").unwrap();
        assert_eq!(y.to_string(), "3 + 2*5^1 + 4*5^3 + O(5^5)");
        assert_eq!(parse_padic(&k, &y.to_string()).unwrap(), y);
        let z = parse_padic(&k, "-1 + O(p^3)").unwrap();
        assert_eq!(z.to_u64(), Some(124));
        assert_eq!(parse_padic(&k, "O(5^4)").unwrap().to_string(), "O(5^4)");
    }

    #[test]
    fn ramified_literals() {
        let k = Field::new(FieldParams::ramified_quadratic(3, 1, 8).unwrap()).unwrap();
        let x = parse_padic(&k, "pi^1*(1 + 2*pi) + O(pi^6)").unwrap();
        assert_eq!(x.valuation(), Some(1));
        assert_eq!(x.to_string(), "pi^1 + 2*pi^2 + O(pi^6)");
        assert_eq!(parse_padic(&k, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn rejects_garbage() {
        let k = Field::qp(3).unwrap();
        assert!(parse_padic(&k, "1.5").is_err());
        assert!(parse_padic(&k, "x + 1").is_err());
        assert!(parse_padic(&k, "").is_err());
    }
}
