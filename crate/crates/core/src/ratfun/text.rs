//! Printing and parsing of polynomials, functions, places and divisors.
//!
//! Prime-field coefficients print as signed representatives in (-p/2, p/2];
//! coefficients outside the prime subfield print as base-p digit lists `[d0,d1,..]`.

use crate::error::{Error, Result};
use crate::ffield::{FieldElem, FiniteField, Gf};
use crate::ratfun::func::RatFunc;
use crate::ratfun::place::{RatDivisor, RatPlace};
use crate::ratfun::poly::Poly;

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

/// Signed representative of a prime-subfield element, or None outside it.
fn signed(field: &FiniteField, c: FieldElem) -> Option<i64> {
    let p = field.characteristic();
    if c.0 >= p {
        return None;
    }
    let v = c.0 as i64;
    Some(if 2 * v > p as i64 { v - p as i64 } else { v })
}

fn digit_list(field: &FiniteField, c: FieldElem) -> String {
    let d: Vec<String> = field.digits(c).iter().map(|v| v.to_string()).collect();
    format!("[{}]", d.join(","))
}

pub fn format_poly(f: &Poly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let k = f.field();
    let mut out = String::new();
    for i in (0..=f.degree()).rev() {
        let c = f.coeff(i);
        if c.0 == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        let (neg, body) = match signed(k, c) {
            Some(v) => {
                let a = v.unsigned_abs();
                let body = if i == 0 {
                    a.to_string()
                } else if a == 1 {
                    mono.clone()
                } else {
                    format!("{a}*{mono}")
                };
                (v < 0, body)
            }
            None => {
                let d = digit_list(k, c);
                (false, if i == 0 { d } else { format!("{d}*{mono}") })
            }
        };
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        out.push_str(&body);
    }
    out
}

fn is_single_term(f: &Poly) -> bool {
    f.coeffs().iter().filter(|c| c.0 != 0).count() <= 1
}

fn wrap(f: &Poly) -> String {
    let s = format_poly(f);
    if is_single_term(f) && !s.starts_with('-') {
        s
    } else {
        format!("({s})")
    }
}

/// Function body without the field suffix.
pub fn format_func_body(f: &RatFunc) -> String {
    if f.den().is_one() {
        format_poly(f.num())
    } else {
        format!("{}/{}", wrap(f.num()), wrap(f.den()))
    }
}

pub fn format_field(k: &FiniteField) -> String {
    format!("GF({})", k.order())
}

pub fn format_func(f: &RatFunc) -> String {
    format!("{} over {}", format_func_body(f), format_field(f.field()))
}

pub fn format_place(p: &RatPlace) -> String {
    match p {
        RatPlace::Finite(pi) => format!("({})", format_poly(pi)),
        RatPlace::Infinity => "inf".into(),
    }
}

pub fn format_divisor(d: &RatDivisor) -> String {
    let parts: Vec<String> =
        d.terms().map(|(p, k)| format!("{}:{}", format_place(p), k)).collect();
    format!("[{}]", parts.join(", "))
}

/// Parse "GF(q)".
pub fn parse_field(s: &str) -> Result<Gf> {
    let s = s.trim();
    let inner = s
        .strip_prefix("GF(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected GF(q), got {s:?}")))?;
    let q: u32 = inner.trim().parse().map_err(|_| Error::Parse(format!("bad field order {inner:?}")))?;
    FiniteField::of_order(q).map_err(|e| Error::Parse(e.to_string()))
}

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer { s: s.as_bytes(), i: 0 }
    }
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }
    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }
    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return parse_err(format!("expected a number at offset {start}"));
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse("number too large".into()))
    }
    fn done(&mut self) -> bool {
        self.peek().is_none()
    }
}

fn coefficient(k: &Gf, lx: &mut Lexer) -> Result<FieldElem> {
    if lx.eat(b'[') {
        let mut digits = Vec::new();
        loop {
            digits.push(lx.number()? as u32);
            if lx.eat(b']') {
                break;
            }
            if !lx.eat(b',') {
                return parse_err("expected ',' or ']' in digit list");
            }
        }
        k.from_digits(&digits).map_err(|e| Error::Parse(e.to_string()))
    } else {
        let v = lx.number()?;
        Ok(k.from_int((v % k.characteristic() as u64) as i64))
    }
}

/// Sum of terms; a term is `c`, `c*x^e`, `x^e`, `c*x`, `x`, or a parenthesized
/// polynomial, optionally multiplied by further factors and raised to powers.
fn poly_expr(k: &Gf, lx: &mut Lexer) -> Result<Poly> {
    let mut acc = Poly::zero(k);
    let mut first = true;
    loop {
        let neg = if lx.eat(b'-') {
            true
        } else if lx.eat(b'+') {
            false
        } else if first {
            false
        } else {
            break;
        };
        first = false;
        let t = product(k, lx)?;
        acc = if neg { acc.sub(&t) } else { acc.add(&t) };
        match lx.peek() {
            Some(b'+') | Some(b'-') => continue,
            _ => break,
        }
    }
    Ok(acc)
}

fn product(k: &Gf, lx: &mut Lexer) -> Result<Poly> {
    let mut acc = power(k, lx)?;
    while lx.eat(b'*') {
        acc = acc.mul(&power(k, lx)?);
    }
    Ok(acc)
}

fn power(k: &Gf, lx: &mut Lexer) -> Result<Poly> {
    let base = atom(k, lx)?;
    if lx.eat(b'^') {
        let e = lx.number()?;
        return Ok(base.pow(e));
    }
    Ok(base)
}

fn atom(k: &Gf, lx: &mut Lexer) -> Result<Poly> {
    match lx.peek() {
        Some(b'x') => {
            lx.i += 1;
            Ok(Poly::x(k))
        }
        Some(b'(') => {
            lx.i += 1;
            let p = poly_expr(k, lx)?;
            if !lx.eat(b')') {
                return parse_err("unbalanced parenthesis");
            }
            Ok(p)
        }
        Some(c) if c == b'[' || c.is_ascii_digit() => Ok(Poly::constant(k, coefficient(k, lx)?)),
        other => parse_err(format!("unexpected {:?}", other.map(|c| c as char))),
    }
}

pub fn parse_poly(k: &Gf, s: &str) -> Result<Poly> {
    let mut lx = Lexer::new(s);
    let p = poly_expr(k, &mut lx)?;
    if !lx.done() {
        return parse_err(format!("trailing input in {s:?}"));
    }
    Ok(p)
}

/// Function body (no field suffix): `num` or `num/den`.
pub fn parse_func_body(k: &Gf, s: &str) -> Result<RatFunc> {
    let mut lx = Lexer::new(s);
    let num = poly_expr(k, &mut lx)?;
    let den = if lx.eat(b'/') { product(k, &mut lx)? } else { Poly::one(k) };
    if !lx.done() {
        return parse_err(format!("trailing input in {s:?}"));
    }
    RatFunc::new(num, den).map_err(|e| Error::Parse(e.to_string()))
}

/// "<function> over GF(q)".
pub fn parse_func(s: &str) -> Result<RatFunc> {
    let (body, field) = s
        .rsplit_once(" over ")
        .ok_or_else(|| Error::Parse("expected '<function> over GF(q)'".into()))?;
    let k = parse_field(field)?;
    parse_func_body(&k, body)
}

pub fn parse_place(k: &Gf, s: &str) -> Result<RatPlace> {
    let s = s.trim();
    if s == "inf" {
        return Ok(RatPlace::Infinity);
    }
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (poly) or inf, got {s:?}")))?;
    let p = parse_poly(k, inner)?;
    RatPlace::finite(p).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_divisor(k: &Gf, s: &str) -> Result<RatDivisor> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..], got {s:?}")))?;
    let mut d = RatDivisor::zero();
    if inner.trim().is_empty() {
        return Ok(d);
    }
    // split on commas at parenthesis/bracket depth 0
    let mut depth = 0i32;
    let mut start = 0;
    let mut items = Vec::new();
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&inner[start..]);
    for it in items {
        let (p, m) = it
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("expected place:mult, got {it:?}")))?;
        let m: i64 = m.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity {m:?}")))?;
        d.add_term(parse_place(k, p)?, m);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for s in [
            "(x^4+2*x)/(x-1) over GF(5)",
            "x/(x-1) over GF(5)",
            "x^2+1 over GF(3)",
            "-x over GF(7)",
            "2 over GF(5)",
            "x^2+[1,2]*x+[0,1] over GF(9)",
            "(-x+1)/x^2 over GF(7)",
        ] {
            let f = parse_func(s).unwrap();
            assert_eq!(format_func(&f), s);
        }
        let k = FiniteField::prime(5).unwrap();
        for s in ["[(x-1):1, inf:-1]", "[]", "[(x):2, (x^2+2):-3]"] {
            assert_eq!(format_divisor(&parse_divisor(&k, s).unwrap()), s);
        }
        assert_eq!(format_place(&parse_place(&k, "inf").unwrap()), "inf");
    }

    #[test]
    fn parses_products() {
        let f = parse_func("x^4*(x-1) over GF(5)").unwrap();
        assert_eq!(format_func(&f), "x^5-x^4 over GF(5)");
        assert!(parse_func("x^2+ over GF(5)").is_err());
        assert!(parse_func("x over GF(6)").is_err());
        let k = FiniteField::prime(5).unwrap();
        assert!(parse_place(&k, "(x^2+1)").is_err());
    }
}
