//! Lexer and single-lookahead recursive-descent parser.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::expr::{BinOp, Expr};
use super::{ParseError, SymbolSpec, TailMeta};

/// Nesting depth beyond which the parser gives up instead of recursing.
const MAX_NESTING: usize = 200;
/// Largest iterated-log index accepted by `ell(j, x)`.
pub const MAX_ELL_INDEX: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
    text: String,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'\n' => Some(Tok::Newline),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token {
                tok,
                pos: start,
                text: src[start..i].to_string(),
            });
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError::new(src, start, "number", text))?;
            if !value.is_finite() {
                return Err(ParseError::new(src, start, "finite number", text));
            }
            let imag = i < bytes.len() && bytes[i] == b'i' && !is_ident_byte(bytes.get(i + 1));
            if imag {
                i += 1;
            }
            out.push(Token {
                tok: if imag { Tok::Imag(value) } else { Tok::Num(value) },
                pos: start,
                text: src[start..i].to_string(),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while is_ident_byte(bytes.get(i)) {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                pos: start,
                text: src[start..i].to_string(),
            });
            continue;
        }
        let ch = src[start..].chars().next().expect("in bounds");
        return Err(ParseError::new(src, start, "token", &ch.to_string()));
    }
    // End-of-input errors point at the last non-blank byte.
    out.push(Token {
        tok: Tok::Eof,
        pos: src.trim_end().len().saturating_sub(1),
        text: String::new(),
    });
    Ok(out)
}

fn is_ident_byte(b: Option<&u8>) -> bool {
    matches!(b, Some(b) if b.is_ascii_alphanumeric() || *b == b'_')
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    at: usize,
    depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'s> Parser<'s> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> PResult<T> {
        let t = &self.toks[self.at];
        let found = if t.tok == Tok::Eof {
            "end of input"
        } else if t.tok == Tok::Newline {
            "newline"
        } else {
            &t.text
        };
        Err(ParseError::new(self.src, t.pos, expected, found))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn at_separator(&self) -> bool {
        matches!(self.peek(), Tok::Newline | Tok::Comma)
    }

    fn spec(&mut self) -> PResult<SymbolSpec> {
        let mut expr = None;
        let mut root = None;
        let mut tail = None;
        let mut patches = BTreeMap::new();
        while self.at_separator() {
            self.bump();
        }
        if *self.peek() == Tok::Eof {
            return self.fail("line");
        }
        loop {
            let kw = self.toks[self.at].clone();
            let name = match &kw.tok {
                Tok::Ident(s) => s.clone(),
                _ => return self.fail("line keyword (expr, root, patch, tail)"),
            };
            let src = self.src;
            let duplicate = |what: &str| ParseError::new(src, kw.pos, &format!("at most one '{what}' line"), &kw.text);
            match name.as_str() {
                "expr" => {
                    self.bump();
                    self.expect(Tok::Eq, "'='")?;
                    if expr.is_some() {
                        return Err(duplicate("expr"));
                    }
                    expr = Some(self.expr()?);
                }
                "root" => {
                    self.bump();
                    self.expect(Tok::Eq, "'='")?;
                    if root.is_some() {
                        return Err(duplicate("root"));
                    }
                    root = Some(self.complex()?);
                }
                "tail" => {
                    self.bump();
                    self.expect(Tok::Eq, "'='")?;
                    if tail.is_some() {
                        return Err(duplicate("tail"));
                    }
                    tail = Some(self.tail_class()?);
                }
                "patch" => {
                    self.bump();
                    let id_tok = self.toks[self.at].clone();
                    let id = match (&id_tok.tok, id_tok.text.parse::<usize>()) {
                        (Tok::Num(_), Ok(id)) if is_plain_int(&id_tok.text) => id,
                        _ => return self.fail("vertex id"),
                    };
                    self.bump();
                    self.expect(Tok::Eq, "'='")?;
                    let value = self.complex()?;
                    if patches.insert(id, value).is_some() {
                        return Err(ParseError::new(self.src, id_tok.pos, "distinct patch vertex", &id_tok.text));
                    }
                }
                _ => return self.fail("line keyword (expr, root, patch, tail)"),
            }
            match self.peek() {
                Tok::Eof => break,
                Tok::Newline | Tok::Comma => {
                    while self.at_separator() {
                        self.bump();
                    }
                    if *self.peek() == Tok::Eof {
                        break;
                    }
                }
                _ => return self.fail("end of line"),
            }
        }
        Ok(SymbolSpec {
            radial_expr: expr.unwrap_or(Expr::Const(Complex64::new(0.0, 0.0))),
            value_at_root: root.unwrap_or(Complex64::new(0.0, 0.0)),
            patches,
            tail_meta: tail.unwrap_or(TailMeta::Unknown),
        })
    }

    /// An imaginary literal: `2i`, or `i` alone for the unit.
    fn imaginary(&mut self) -> Option<f64> {
        let y = match self.peek() {
            Tok::Imag(y) => *y,
            Tok::Ident(s) if s == "i" => 1.0,
            _ => return None,
        };
        self.bump();
        Some(y)
    }

    fn complex(&mut self) -> PResult<Complex64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let sign = if neg { -1.0 } else { 1.0 };
        if let Some(y) = self.imaginary() {
            return Ok(Complex64::new(0.0, sign * y));
        }
        match *self.peek() {
            Tok::Num(x) => {
                self.bump();
                let re = sign * x;
                let im_sign = match self.peek() {
                    Tok::Plus => 1.0,
                    Tok::Minus => -1.0,
                    _ => return Ok(Complex64::new(re, 0.0)),
                };
                self.bump();
                match self.imaginary() {
                    Some(y) => Ok(Complex64::new(re, im_sign * y)),
                    None => self.fail("imaginary part"),
                }
            }
            _ => self.fail("complex number"),
        }
    }

    fn tail_class(&mut self) -> PResult<TailMeta> {
        let start = self.toks[self.at].clone();
        let mut name = String::new();
        loop {
            match self.peek() {
                Tok::Ident(s) => name.push_str(s),
                _ => return self.fail("tail class"),
            }
            self.bump();
            if *self.peek() == Tok::Minus {
                self.bump();
                name.push('-');
            } else {
                break;
            }
        }
        let limit = if matches!(self.peek(), Tok::Ident(s) if s == "to") {
            self.bump();
            Some(self.complex()?)
        } else {
            None
        };
        let meta = match name.as_str() {
            "unknown" => TailMeta::Unknown,
            "eventually-zero" => TailMeta::EventuallyZero,
            "eventually-constant" => TailMeta::EventuallyConstant { value: limit },
            "monotone-decreasing-modulus" => TailMeta::MonotoneDecreasingModulus {
                limit: limit.unwrap_or(Complex64::new(0.0, 0.0)),
            },
            _ => {
                return Err(ParseError::new(
                    self.src,
                    start.pos,
                    "tail class (eventually-zero, eventually-constant, monotone-decreasing-modulus, unknown)",
                    &name,
                ))
            }
        };
        if limit.is_some() && matches!(meta, TailMeta::Unknown | TailMeta::EventuallyZero) {
            return Err(ParseError::new(self.src, start.pos, "tail class that takes a limit", &name));
        }
        Ok(meta)
    }

    fn nest(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return self.fail("shallower nesting");
        }
        Ok(())
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.nest()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        self.nest()?;
        let t = self.toks[self.at].clone();
        let e = match t.tok {
            Tok::Num(x) => {
                self.bump();
                Expr::Const(Complex64::new(x, 0.0))
            }
            Tok::Imag(y) => {
                self.bump();
                Expr::Const(Complex64::new(0.0, y))
            }
            Tok::Minus => {
                self.bump();
                Expr::Neg(Box::new(self.factor()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                e
            }
            Tok::Ident(ref name) => match name.as_str() {
                "n" => {
                    self.bump();
                    Expr::Depth
                }
                "i" => {
                    self.bump();
                    Expr::Const(Complex64::new(0.0, 1.0))
                }
                "ln" | "exp" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let a = Box::new(self.expr()?);
                    self.expect(Tok::RParen, "')'")?;
                    if name == "ln" {
                        Expr::Ln(a)
                    } else {
                        Expr::Exp(a)
                    }
                }
                "pow" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let a = Box::new(self.expr()?);
                    self.expect(Tok::Comma, "','")?;
                    let b = Box::new(self.expr()?);
                    self.expect(Tok::RParen, "')'")?;
                    Expr::Pow(a, b)
                }
                "ell" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let jt = self.toks[self.at].clone();
                    let j = match jt.tok {
                        Tok::Num(x) if is_plain_int(&jt.text) && x <= MAX_ELL_INDEX as f64 => x as u32,
                        _ => return self.fail(&format!("integer 0..={MAX_ELL_INDEX}")),
                    };
                    self.bump();
                    self.expect(Tok::Comma, "','")?;
                    let a = Box::new(self.expr()?);
                    self.expect(Tok::RParen, "')'")?;
                    Expr::Ell(j, a)
                }
                _ => return self.fail("factor"),
            },
            _ => return self.fail("factor"),
        };
        self.depth -= 1;
        Ok(e)
    }
}

fn is_plain_int(text: &str) -> bool {
    !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit())
}

pub fn parse(src: &str) -> Result<SymbolSpec, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        at: 0,
        depth: 0,
    };
    p.spec()
}

/// Parses a bare expression such as `1/pow(n,2)`.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        at: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.fail("end of input");
    }
    Ok(e)
}

/// Parses a single complex literal (`-1`, `2i`, `0.5-3i`).
pub fn parse_complex(src: &str) -> Result<Complex64, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        at: 0,
        depth: 0,
    };
    let c = p.complex()?;
    if *p.peek() != Tok::Eof {
        return p.fail("end of input");
    }
    Ok(c)
}
