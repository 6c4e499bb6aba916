//! Recursive-descent parser for the plain-text expression grammar.
//!
//! Accepts sums of `coeff * var^exp ...` terms and, more generally, full
//! expressions with `+ - * / ^` and parentheses, evaluated exactly into a
//! [`RatFunc`]. Numeric literals are decimal integers; `a/b` is ordinary
//! division, so `3/2` parses to the exact rational.

use super::{var_index, MultiPoly, RatFunc};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn parse_rat<C: Scalar>(src: &str) -> Result<RatFunc<C>> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

pub fn parse_poly<C: Scalar>(src: &str) -> Result<MultiPoly<C>> {
    let r = parse_rat::<C>(src)?;
    r.as_poly()
        .cloned()
        .ok_or_else(|| Error::Parse(format!("expected a polynomial, got {}", r)))
}

/// Exact scalar literal, e.g. `-3/2`.
pub fn parse_scalar<C: Scalar>(src: &str) -> Result<C> {
    let r = parse_rat::<C>(src)?;
    let p = r
        .as_poly()
        .ok_or_else(|| Error::Parse("not a constant".into()))?;
    if p.is_zero() {
        return Ok(C::zero());
    }
    p.as_constant()
        .cloned()
        .ok_or_else(|| Error::Parse("not a constant".into()))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser<C: Scalar> {
    toks: Vec<Tok>,
    pos: usize,
    _marker: std::marker::PhantomData<C>,
}

impl<C: Scalar> Parser<C> {
    fn new(src: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let bytes: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let ch = bytes[i];
            match ch {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    toks.push(Tok::Plus);
                    i += 1;
                }
                '-' | '\u{2212}' => {
                    toks.push(Tok::Minus);
                    i += 1;
                }
                '*' => {
                    toks.push(Tok::Star);
                    i += 1;
                }
                '/' => {
                    toks.push(Tok::Slash);
                    i += 1;
                }
                '^' => {
                    toks.push(Tok::Caret);
                    i += 1;
                }
                '(' => {
                    toks.push(Tok::LParen);
                    i += 1;
                }
                ')' => {
                    toks.push(Tok::RParen);
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    toks.push(Tok::Num(bytes[start..i].iter().collect()));
                }
                'a'..='z' | 'A'..='Z' | '_' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                        i += 1;
                    }
                    toks.push(Tok::Ident(bytes[start..i].iter().collect()));
                }
                _ => return Err(Error::Parse(format!("unexpected character '{}'", ch))),
            }
        }
        Ok(Parser { toks, pos: 0, _marker: std::marker::PhantomData })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "trailing input at token {:?}",
                self.toks[self.pos]
            )))
        }
    }

    fn expr(&mut self) -> Result<RatFunc<C>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc<C>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.div(&self.unary()?)?;
                }
                // juxtaposition: `u(u+t2)` or `2t1` multiply implicitly
                Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc<C>> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc<C>> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let mut neg = false;
            if let Some(Tok::Minus) = self.peek() {
                self.bump();
                neg = true;
            }
            let e = match self.bump() {
                Some(Tok::Num(s)) => s
                    .parse::<i64>()
                    .map_err(|_| Error::Parse("bad exponent".into()))?,
                t => return Err(Error::Parse(format!("expected exponent, got {:?}", t))),
            };
            return base.pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc<C>> {
        match self.bump() {
            Some(Tok::Num(s)) => {
                let mut c = C::zero();
                let ten = C::from_int(10);
                for ch in s.chars() {
                    c = c * ten.clone() + C::from_int((ch as u8 - b'0') as i64);
                }
                Ok(RatFunc::constant(c))
            }
            Some(Tok::Ident(name)) => {
                if name == "h" || name == "hbar" {
                    return Ok(RatFunc::hbar());
                }
                match var_index(&name) {
                    Some(i) => Ok(RatFunc::var(i)),
                    None => Err(Error::Parse(format!("unknown variable '{}'", name))),
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    t => Err(Error::Parse(format!("expected ')', got {:?}", t))),
                }
            }
            t => Err(Error::Parse(format!("unexpected token {:?}", t))),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::rat;

    #[test]
    fn grammar_round_trip() {
        for src in [
            "u/(u + t1 + t2)",
            "1",
            "0",
            "-3/2*t1^2*t2 + u",
            "(u1 - c)*(u2 - c - t1 - t2)",
        ] {
            let f = rat(src);
            let printed = f.to_string();
            assert_eq!(rat(&printed), f, "round trip failed for {}", src);
        }
    }

    #[test]
    fn hbar_is_expanded_on_input() {
        assert_eq!(rat("hbar"), rat("t1 + t2"));
        assert_eq!(rat("u/(u+h)"), rat("u/(u + t1 + t2)"));
    }

    #[test]
    fn substitution_examples() {
        use crate::ring::vars;
        // (u2 - c) with c -> u1
        let f = rat("u2 - c");
        let got = f.subst_var(vars::C, &rat("u1")).unwrap();
        assert_eq!(got, rat("u2 - u1"));
        // empty bindings: identity
        let g = rat("u/(u + t1)");
        assert_eq!(g.substitute(&Default::default()).unwrap(), g);
        // pole: 1/(c - u1) with c -> u1
        let h = rat("1/(c - u1)");
        assert!(h.subst_var(vars::C, &rat("u1")).is_err());
    }
}
