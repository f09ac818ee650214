//! Text format for polynomials over `F_q[t]` and `F_q[t][x, y]`.
//!
//! Grammar (whitespace ignored, `*` optional between factors):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*'? unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 't' | 'x' | 'y' | '(' expr ')'
//! ```
//!
//! Integer literals map through `Z -> F_p` for prime fields. Over `F_{p^a}`
//! with `a > 1` a literal names the element with that base-`p` encoding and
//! must be below `q`.

use crate::arith::{ArithError, Field, FqElem, PolyT};
use crate::bivar::BivarPoly;

struct Parser<'a> {
    field: &'a Field,
    src: &'a [u8],
    pos: usize,
    allow_xy: bool,
}

fn err(pos: usize, msg: impl Into<String>) -> ArithError {
    ArithError::Parse {
        pos,
        msg: msg.into(),
    }
}

/// Converts an integer literal to a field element.
pub fn literal(field: &Field, n: u64, pos: usize) -> Result<FqElem, ArithError> {
    if field.a() == 1 {
        Ok(field.from_int((n % field.p() as u64) as i64))
    } else {
        u32::try_from(n)
            .ok()
            .and_then(|v| field.elem(v))
            .ok_or_else(|| err(pos, format!("literal {n} is not an element of F_{}", field.q())))
    }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<BivarPoly, ArithError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' {
                acc.checked_add(&rhs)?
            } else {
                acc.checked_sub(&rhs)?
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BivarPoly, ArithError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_digit() || c.is_ascii_alphabetic() || c == b'(' => {}
                _ => return Ok(acc),
            }
            let rhs = self.unary()?;
            acc = acc.checked_mul(&rhs)?;
        }
    }

    fn unary(&mut self) -> Result<BivarPoly, ArithError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<BivarPoly, ArithError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let e = self.integer()?;
            let e = u32::try_from(e)
                .ok()
                .filter(|&e| e <= 4096)
                .ok_or_else(|| err(at, "exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64, ArithError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(start, "expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse::<u64>()
            .map_err(|_| err(start, "integer literal overflows"))
    }

    fn atom(&mut self) -> Result<BivarPoly, ArithError> {
        let f = self.field;
        let at = match self.peek() {
            None => return Err(err(self.pos, "unexpected end of input")),
            Some(_) => self.pos,
        };
        let c = self.src[at];
        if c.is_ascii_digit() {
            let n = self.integer()?;
            let e = literal(f, n, at)?;
            return Ok(BivarPoly::constant(&PolyT::constant(f, e)));
        }
        self.pos += 1;
        match c {
            b'(' => {
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(err(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            b't' => Ok(BivarPoly::constant(&PolyT::t(f))),
            b'x' if self.allow_xy => Ok(BivarPoly::x(f)),
            b'y' if self.allow_xy => Ok(BivarPoly::y(f)),
            _ => Err(err(at, format!("unexpected character '{}'", c as char))),
        }
    }
}

fn run(field: &Field, s: &str, allow_xy: bool) -> Result<BivarPoly, ArithError> {
    let mut p = Parser {
        field,
        src: s.as_bytes(),
        pos: 0,
        allow_xy,
    };
    let out = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(err(p.pos, format!("unexpected character '{}'", c as char)));
    }
    Ok(out)
}

pub fn parse_poly_t(field: &Field, s: &str) -> Result<PolyT, ArithError> {
    Ok(run(field, s, false)?.coeff(0, 0))
}

pub fn parse_bivar(field: &Field, s: &str) -> Result<BivarPoly, ArithError> {
    run(field, s, true)
}
