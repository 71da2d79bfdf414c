//! Text encodings: "t^2+t+1", "(u+1)*t+u", or bracket lists "[1,u,u+1]".

use super::poly::{APoly, PolyRing};
use crate::error::{Error, Result};

/// Joins `(exponent, coefficient)` terms, highest exponent first.
pub(crate) fn format_terms(terms: &[(usize, String)], var: &str, is_one: impl Fn(&str) -> bool) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::with_capacity(terms.len());
    for (i, c) in terms.iter().rev() {
        let mon = match i {
            0 => String::new(),
            1 => var.to_string(),
            k => format!("{var}^{k}"),
        };
        parts.push(if mon.is_empty() {
            c.clone()
        } else if is_one(c) {
            mon
        } else {
            format!("{c}*{mon}")
        });
    }
    parts.join("+")
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    ring: &'a PolyRing,
    var: u8,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<APoly> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            let t = self.product()?;
            self.ring.neg_p(&t)
        } else {
            self.product()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.product()?;
                    acc = self.ring.add_p(&acc, &t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.product()?;
                    acc = self.ring.sub_p(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<APoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = self.ring.mul_p(&acc, &f);
                }
                Some(c) if c == b'(' || c == self.var || c == b'u' || c.is_ascii_digit() => {
                    let f = self.power()?;
                    acc = self.ring.mul_p(&acc, &f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<APoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.peek();
            let e = self.number()?;
            return Ok(self.ring.pow_p(&base, e));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn atom(&mut self) -> Result<APoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                let p = self.ring.fq().p() as u64;
                Ok(APoly::constant(self.ring.fq().elem((n % p) as u32)))
            }
            Some(b'u') if self.ring.fq().e() > 1 => {
                self.pos += 1;
                Ok(APoly::constant(self.ring.fq().u()))
            }
            Some(c) if c == self.var => {
                self.pos += 1;
                Ok(APoly::t())
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

fn parse_expr(ring: &PolyRing, s: &str, var: char) -> Result<APoly> {
    let mut p = Parser { s: s.as_bytes(), pos: 0, ring, var: var as u8 };
    let v = p.sum()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Parses a polynomial in `var` with coefficients in F_q.
pub(crate) fn parse_poly(ring: &PolyRing, s: &str, var: char) -> Result<APoly> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or_else(|| Error::Parse(format!("unterminated list {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(APoly::zero());
        }
        let mut coeffs = Vec::new();
        for item in inner.split(',') {
            let c = parse_expr(ring, item, '\0')?;
            if c.deg0() > 0 {
                return Err(Error::Parse(format!("list entry {item:?} is not a constant")));
            }
            coeffs.push(c.coeff(0));
        }
        return Ok(APoly::from_coeffs(coeffs));
    }
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    parse_expr(ring, s, var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_and_expression_agree() {
        let a = PolyRing::with_q(2).unwrap();
        assert_eq!(a.parse("t^2+t+1").unwrap(), a.parse("[1,1,1]").unwrap());
        assert_eq!(a.format(&a.parse("[1,1,1]").unwrap()), "t^2+t+1");
        assert_eq!(a.parse("(t+1)^2").unwrap(), a.parse("t^2+1").unwrap());
        assert_eq!(a.format(&APoly::zero()), "0");
    }

    #[test]
    fn non_prime_coefficients() {
        let a = PolyRing::with_q(4).unwrap();
        let f = a.parse("[1,u,u+1]").unwrap();
        assert_eq!(a.format(&f), "(u+1)*t^2+u*t+1");
        assert_eq!(a.parse("(u+1)t^2 + u t + 1").unwrap(), f);
    }

    #[test]
    fn bad_input() {
        let a = PolyRing::with_q(3).unwrap();
        assert!(a.parse("t^").is_err());
        assert!(a.parse("u").is_err());
        assert!(a.parse("[t]").is_err());
        assert!(a.parse("").is_err());
        assert_eq!(a.parse("2t-t").unwrap(), a.parse("t").unwrap());
    }
}
