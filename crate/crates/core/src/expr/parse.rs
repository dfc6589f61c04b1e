//! Lexer and recursive-descent parser for the phase expression language.
//!
//! Precedence (tightest first): `^` > unary `-` > `* /` > `+ -`.
//! `^` takes an integer-literal exponent, optionally negative or
//! parenthesized. Errors carry the byte position of the offending token.

use super::{add, div, fun, lit_int, lit_real, mul, neg, pow, sub, var};
use super::{Expr, ExprError, Func, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Dec(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ExprError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let start = self.pos;
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((start, Tok::Plus));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((start, Tok::Minus));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((start, Tok::Star));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((start, Tok::Slash));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((start, Tok::Caret));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((start, Tok::LParen));
                    self.pos += 1;
                }
                b')' => {
                    out.push((start, Tok::RParen));
                    self.pos += 1;
                }
                b'0'..=b'9' => out.push((start, self.number()?)),
                c if c.is_ascii_alphabetic() => {
                    let mut end = self.pos;
                    while end < self.src.len()
                        && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let name = std::str::from_utf8(&self.src[self.pos..end])
                        .unwrap()
                        .to_string();
                    self.pos = end;
                    out.push((start, Tok::Ident(name)));
                }
                other => {
                    return Err(ExprError::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{}`", other as char),
                    })
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<Tok, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let mut is_real = false;
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            is_real = true;
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                is_real = true;
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if is_real {
            let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                pos: start,
                msg: format!("invalid number `{text}`"),
            })?;
            Ok(Tok::Dec(v))
        } else {
            match text.parse::<i64>() {
                Ok(n) => Ok(Tok::Int(n)),
                // integer too large for exact arithmetic; keep it as a float
                Err(_) => Ok(Tok::Dec(text.parse::<f64>().map_err(|_| {
                    ExprError::Syntax {
                        pos: start,
                        msg: format!("invalid number `{text}`"),
                    }
                })?)),
            }
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    d: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.idx)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        match self.next() {
            Some((_, t)) if t == tok => Ok(()),
            Some((p, t)) => Err(ExprError::Syntax {
                pos: p,
                msg: format!("expected {what}, found {t:?}"),
            }),
            None => Err(ExprError::Syntax {
                pos: self.len,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.term()?;
        while let Some((_, t)) = self.peek() {
            match t {
                Tok::Plus => {
                    self.idx += 1;
                    e = add(e, self.term()?);
                }
                Tok::Minus => {
                    self.idx += 1;
                    e = sub(e, self.term()?);
                }
                _ => break,
            }
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.unary()?;
        while let Some((_, t)) = self.peek() {
            match t {
                Tok::Star => {
                    self.idx += 1;
                    e = mul(e, self.unary()?);
                }
                Tok::Slash => {
                    self.idx += 1;
                    e = div(e, self.unary()?);
                }
                _ => break,
            }
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some((_, Tok::Minus)) = self.peek() {
            self.idx += 1;
            return Ok(neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.atom()?;
        while let Some((_, Tok::Caret)) = self.peek() {
            self.idx += 1;
            let n = self.exponent()?;
            e = pow(e, n);
        }
        Ok(e)
    }

    fn exponent(&mut self) -> Result<i64, ExprError> {
        let mut parens = false;
        if let Some((_, Tok::LParen)) = self.peek() {
            self.idx += 1;
            parens = true;
        }
        let mut sign = 1i64;
        if let Some((_, Tok::Minus)) = self.peek() {
            self.idx += 1;
            sign = -1;
        }
        let n = match self.next() {
            Some((_, Tok::Int(n))) => n,
            Some((p, other)) => {
                return Err(ExprError::Syntax {
                    pos: p,
                    msg: format!("exponent must be an integer literal, found {other:?}"),
                })
            }
            None => {
                return Err(ExprError::Syntax {
                    pos: self.len,
                    msg: "exponent must be an integer literal, found end of input".into(),
                })
            }
        };
        if parens {
            self.expect(Tok::RParen, "`)` after exponent")?;
        }
        Ok(sign * n)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.next() {
            Some((_, Tok::Int(n))) => Ok(lit_int(n)),
            Some((_, Tok::Dec(v))) => Ok(lit_real(v)),
            Some((_, Tok::LParen)) => {
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some((p, Tok::Ident(name))) => self.ident(p, name),
            Some((p, other)) => Err(ExprError::Syntax {
                pos: p,
                msg: format!("expected an expression, found {other:?}"),
            }),
            None => Err(ExprError::Syntax {
                pos: self.len,
                msg: "expected an expression, found end of input".into(),
            }),
        }
    }

    fn ident(&mut self, pos: usize, name: String) -> Result<Expr, ExprError> {
        let func = match name.as_str() {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
            let arg = self.sum()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(fun(f, arg));
        }
        if name == "t" {
            return Ok(var(Var::T));
        }
        let (head, rest) = name.split_at(1);
        if (head == "x" || head == "y")
            && !rest.is_empty()
            && rest.bytes().all(|b| b.is_ascii_digit())
        {
            let k: usize = rest.parse().map_err(|_| ExprError::Syntax {
                pos,
                msg: format!("invalid variable index in `{name}`"),
            })?;
            if k == 0 || k > self.d - 1 {
                return Err(ExprError::IndexOutOfRange {
                    pos,
                    name,
                    d: self.d,
                });
            }
            return Ok(if head == "x" {
                var(Var::X(k - 1))
            } else {
                var(Var::Y(k - 1))
            });
        }
        Err(ExprError::UnknownIdentifier { pos, name })
    }
}

/// Parse a phase expression for ambient dimension `d` (so `x` and `y` carry
/// indices 1..d−1).
pub fn parse_phase(src: &str, d: usize) -> Result<Expr, ExprError> {
    if src.trim().is_empty() {
        return Err(ExprError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    if d < 2 {
        return Err(ExprError::InvalidPhase(format!(
            "dimension d must be at least 2, got {d}"
        )));
    }
    let toks = Lexer::new(src).tokens()?;
    let mut parser = Parser {
        toks,
        idx: 0,
        d,
        len: src.len(),
    };
    let e = parser.sum()?;
    match parser.peek() {
        None => Ok(e),
        Some((p, t)) => Err(ExprError::Syntax {
            pos: *p,
            msg: format!("unexpected trailing {t:?}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Literal, PhasePoint};

    #[test]
    fn bourgain_example_parses() {
        let e = parse_phase("x1*y1 + x2*y2 + t*y1*y2 + (t^2/2)*y1^2", 3).unwrap();
        assert!(e.variables().len() == 5);
    }

    #[test]
    fn constant_zero_parses() {
        assert_eq!(parse_phase("0", 3).unwrap(), Expr::Lit(Literal::int(0)));
    }

    #[test]
    fn y_index_out_of_range() {
        let err = parse_phase("x1*y3", 3).unwrap_err();
        assert!(matches!(err, ExprError::IndexOutOfRange { ref name, d: 3, .. } if name == "y3"));
    }

    #[test]
    fn unknown_identifier_rejected() {
        let err = parse_phase("x1 + z2", 3).unwrap_err();
        assert!(matches!(err, ExprError::UnknownIdentifier { ref name, .. } if name == "z2"));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_phase("x1 + * y1", 3).unwrap_err();
        match err {
            ExprError::Syntax { pos, .. } => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn non_integer_exponent_rejected() {
        assert!(parse_phase("x1^t", 3).is_err());
        assert!(parse_phase("x1^1.5", 3).is_err());
    }

    #[test]
    fn precedence_matches_convention() {
        // -x1^2 is -(x1^2); evaluated at x1 = 2 gives -4
        let e = parse_phase("-x1^2", 2).unwrap();
        let p = PhasePoint::new(vec![2.0], 0.0, vec![0.0]);
        assert_eq!(e.eval(&p).unwrap(), -4.0);
        // 1 + 2*3 = 7 folds exactly
        assert_eq!(
            parse_phase("1 + 2*3", 2).unwrap(),
            Expr::Lit(Literal::int(7))
        );
    }

    #[test]
    fn negative_exponent_forms() {
        for src in ["t^-2", "t^(-2)"] {
            let e = parse_phase(src, 2).unwrap();
            let p = PhasePoint::new(vec![0.0], 2.0, vec![0.0]);
            assert_eq!(e.eval(&p).unwrap(), 0.25);
        }
    }

    #[test]
    fn x_without_index_is_unknown() {
        assert!(matches!(
            parse_phase("x", 3).unwrap_err(),
            ExprError::UnknownIdentifier { .. }
        ));
    }
}
