//! Recursive-descent parser for the canonical polynomial syntax.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (factor | '*' factor)*      -- '*' only after a number or ')'
//! factor := "-" factor | number | number "j" | ident "*"? | "(" expr ")"
//! ```
//!
//! A `*` directly after an identifier marks the starred generator; anywhere
//! else it is an explicit product. Whitespace is insignificant, so `x*y`,
//! `x* y` and `x * y` all read as `x*·y`.

use super::{Alphabet, GradedPoly, Letter, Word};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Scalar),
    Ident(String),
    Star,
    Plus,
    Minus,
    Open,
    Close,
}

pub(super) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when digits follow
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut k = i + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        i = k;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let value: f64 = text[start..i]
                    .parse()
                    .map_err(|_| err(start, format!("bad number `{}`", &text[start..i])))?;
                let imaginary = i < bytes.len()
                    && bytes[i] == b'j'
                    && !(i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_'));
                if imaginary {
                    i += 1;
                    out.push((start, Tok::Num(Scalar::new(0.0, value))));
                } else {
                    out.push((start, Tok::Num(scalar::real(value))));
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => return Err(err(i, format!("unexpected character `{}`", text[i..].chars().next().unwrap_or('?')))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expr(&mut self) -> Result<GradedPoly> {
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => scalar::one(),
                Some(Tok::Minus) => -scalar::one(),
                _ => return Ok(acc),
            };
            self.pos += 1;
            let t = self.term()?;
            acc.add_scaled(&t, sign);
        }
    }

    fn starts_factor(&self) -> bool {
        // a bare '-' between factors is a binary minus, so it is not listed
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Open))
    }

    fn term(&mut self) -> Result<GradedPoly> {
        let (mut acc, mut may_star) = self.factor()?;
        loop {
            if self.peek() == Some(&Tok::Star) {
                if !may_star {
                    return Err(err(self.offset(), "`*` here is ambiguous; a product sign may only follow a number or `)`"));
                }
                self.pos += 1;
                if !self.starts_factor() {
                    return Err(err(self.offset(), "expected a factor after `*`"));
                }
            } else if !self.starts_factor() {
                return Ok(acc);
            }
            let (f, star_ok) = self.factor()?;
            acc = &acc * &f;
            may_star = star_ok;
        }
    }

    /// Returns the factor and whether a following `*` is a product sign.
    fn factor(&mut self) -> Result<(GradedPoly, bool)> {
        let at = self.offset();
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Num(z))) => {
                self.pos += 1;
                Ok((GradedPoly::scalar(z), true))
            }
            Some((_, Tok::Ident(name))) => {
                self.pos += 1;
                let gen = self
                    .alphabet
                    .lookup(&name)
                    .ok_or_else(|| err(at, format!("unknown generator `{name}`")))?;
                let starred = self.peek() == Some(&Tok::Star);
                if starred {
                    self.pos += 1;
                }
                let letter = Letter { gen, starred };
                Ok((GradedPoly::word(Word::new(vec![letter])), false))
            }
            Some((_, Tok::Minus)) => {
                // unary minus, as in the rendered `a + -2 * x`
                self.pos += 1;
                let (inner, star_ok) = self.factor()?;
                Ok((inner.scale(-scalar::one()), star_ok))
            }
            Some((_, Tok::Open)) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(err(self.offset(), "expected `)`"));
                }
                self.pos += 1;
                Ok((inner, true))
            }
            Some((_, t)) => Err(err(at, format!("unexpected token {t:?}"))),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

/// Parses an expression over `alphabet` into a free-algebra element.
pub fn parse_poly(text: &str, alphabet: &Alphabet) -> Result<GradedPoly> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        alphabet,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(p.offset(), "trailing input"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::AbelianGroup;
    use crate::scalar::real;

    fn alphabet() -> Alphabet {
        Alphabet::new(AbelianGroup::free(1), vec![("x".into(), vec![1]), ("y".into(), vec![1])]).unwrap()
    }

    #[test]
    fn star_binds_to_identifier() {
        let a = alphabet();
        let p = parse_poly("x* x", &a).unwrap();
        assert_eq!(p.render(&a), "1 * x* x");
        assert_eq!(parse_poly("x*x", &a).unwrap(), p);
        assert_eq!(parse_poly("x * x", &a).unwrap(), p);
    }

    #[test]
    fn coefficients_and_sums() {
        let a = alphabet();
        let p = parse_poly("2 * x x* + 1 - 0.5 y", &a).unwrap();
        assert_eq!(p.render(&a), "1 + 2 * x x* + -0.5 * y");
        let c = parse_poly("(1+2j) * x", &a).unwrap();
        assert_eq!(c.terms().next().unwrap().1, &Scalar::new(1.0, 2.0));
        let e = parse_poly("1e-1 x", &a).unwrap();
        assert_eq!(e.terms().next().unwrap().1, &real(0.1));
    }

    #[test]
    fn canonical_output_round_trips() {
        let a = alphabet();
        let text = "1 + (0.5-0.25j) * x y* + -3 * y* y* x";
        let p = parse_poly(text, &a).unwrap();
        assert_eq!(parse_poly(&p.render(&a), &a).unwrap(), p);
    }

    #[test]
    fn errors_carry_positions() {
        let a = alphabet();
        assert_eq!(
            parse_poly("x + z", &a),
            Err(Error::Parse { position: 4, message: "unknown generator `z`".into() })
        );
        assert!(matches!(parse_poly("x**", &a), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_poly("(x", &a), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("", &a), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("x $", &a), Err(Error::Parse { position: 2, .. })));
    }
}
