//! Expression trees in the depth variable `n`.

use std::fmt;

use num_complex::Complex64;

use crate::weights::ell_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    /// The depth `n = |v|`.
    Depth,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Ell(u32, Box<Expr>),
}

/// Why an expression could not be evaluated at a given depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalFault {
    DivisionByZero,
    LogDomain,
    EllDomain,
    PowDomain,
    NonFinite,
}

impl fmt::Display for EvalFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalFault::DivisionByZero => "division by zero",
            EvalFault::LogDomain => "ln needs a positive real argument",
            EvalFault::EllDomain => "ell needs a real argument >= 1",
            EvalFault::PowDomain => "pow argument outside its domain",
            EvalFault::NonFinite => "value is not finite",
        })
    }
}

fn real_part(z: Complex64) -> Option<f64> {
    (z.im == 0.0).then_some(z.re)
}

fn pow(base: Complex64, exp: Complex64) -> Result<Complex64, EvalFault> {
    let int_exp = real_part(exp).filter(|e| e.fract() == 0.0 && e.abs() <= i32::MAX as f64);
    match (real_part(base), real_part(exp)) {
        (Some(b), Some(e)) if b > 0.0 => Ok(Complex64::new(b.powf(e), 0.0)),
        (Some(b), Some(e)) if b == 0.0 => match e {
            e if e > 0.0 => Ok(Complex64::new(0.0, 0.0)),
            e if e == 0.0 => Ok(Complex64::new(1.0, 0.0)),
            _ => Err(EvalFault::DivisionByZero),
        },
        (Some(b), Some(e)) if int_exp.is_some() => Ok(Complex64::new(b.powf(e), 0.0)),
        (Some(_), Some(_)) => Err(EvalFault::PowDomain),
        (Some(b), None) if b > 0.0 => Ok((exp * b.ln()).exp()),
        (None, Some(_)) if int_exp.is_some() => {
            if base == Complex64::new(0.0, 0.0) {
                return Err(EvalFault::DivisionByZero);
            }
            Ok(base.powi(int_exp.expect("checked") as i32))
        }
        _ => Err(EvalFault::PowDomain),
    }
}

impl Expr {
    pub fn eval(&self, n: f64) -> Result<Complex64, EvalFault> {
        let z = match self {
            Expr::Const(c) => *c,
            Expr::Depth => Complex64::new(n, 0.0),
            Expr::Neg(a) => -a.eval(n)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(n)?, b.eval(n)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == Complex64::new(0.0, 0.0) {
                            return Err(EvalFault::DivisionByZero);
                        }
                        a / b
                    }
                }
            }
            Expr::Ln(a) => match real_part(a.eval(n)?) {
                Some(x) if x > 0.0 => Complex64::new(x.ln(), 0.0),
                _ => return Err(EvalFault::LogDomain),
            },
            Expr::Exp(a) => a.eval(n)?.exp(),
            Expr::Pow(a, b) => pow(a.eval(n)?, b.eval(n)?)?,
            Expr::Ell(j, a) => match real_part(a.eval(n)?) {
                Some(x) if x >= 1.0 => Complex64::new(ell_unchecked(*j as usize, x), 0.0),
                _ => return Err(EvalFault::EllDomain),
            },
        };
        if z.is_finite() {
            Ok(z)
        } else {
            Err(EvalFault::NonFinite)
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) => match (c.re != 0.0 || c.re.is_sign_negative(), c.im != 0.0) {
                (true, true) => 1,
                (true, false) if c.re.is_sign_negative() => 3,
                (false, true) if c.im < 0.0 => 3,
                _ => 4,
            },
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let wrap = self.precedence() < min_prec;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Expr::Const(c) => write_complex(f, *c)?,
            Expr::Depth => f.write_str("n")?,
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, 3)?;
            }
            Expr::Bin(op, a, b) => {
                let (sym, lp) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                a.write_at(f, lp)?;
                f.write_str(sym)?;
                b.write_at(f, lp + 1)?;
            }
            Expr::Ln(a) => {
                f.write_str("ln(")?;
                a.write_at(f, 0)?;
                f.write_str(")")?;
            }
            Expr::Exp(a) => {
                f.write_str("exp(")?;
                a.write_at(f, 0)?;
                f.write_str(")")?;
            }
            Expr::Pow(a, b) => {
                f.write_str("pow(")?;
                a.write_at(f, 0)?;
                f.write_str(",")?;
                b.write_at(f, 0)?;
                f.write_str(")")?;
            }
            Expr::Ell(j, a) => {
                write!(f, "ell({j},")?;
                a.write_at(f, 0)?;
                f.write_str(")")?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// Writes `re`, `im i` or `re±im i` in a form the parser reads back to the
/// same value.
pub(crate) fn write_complex(f: &mut impl fmt::Write, c: Complex64) -> fmt::Result {
    let has_re = c.re != 0.0 || c.re.is_sign_negative();
    match (has_re, c.im != 0.0) {
        (_, false) => write!(f, "{}", c.re),
        (false, true) => write!(f, "{}i", c.im),
        (true, true) if c.im < 0.0 => write!(f, "{}-{}i", c.re, -c.im),
        (true, true) => write!(f, "{}+{}i", c.re, c.im),
    }
}
