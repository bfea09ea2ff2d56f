//! Expression DSL over a single variable `t`.
//!
//! Grammar (whitespace-insensitive, precedence low to high):
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?        exponent must fold to a constant
//! atom   := number | 't' | name '(' expr ')' | '(' expr ')'
//! name   := exp | ln | sin | cos | abs
//! ```
//!
//! Power binds tighter than unary minus, so `-t^2` is `-(t^2)`, and the
//! exponent position accepts a sign, so `t^-1` is `1/t`. Exponents are
//! restricted to constants; `t^t` is rejected at parse time.
//!
//! Evaluation reports domain faults (log of a nonpositive value,
//! division by zero, non-integer power of a negative base) as errors
//! rather than producing NaN. Symbolic differentiation covers every
//! node except `abs`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a constant real exponent.
    Pow(Box<Expr>, f64),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Abs(Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = ExprParser { src: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Syntax {
                offset: p.pos,
                message: "unexpected trailing input".into(),
            });
        }
        Ok(e)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var => Ok(t),
            Expr::Neg(e) => Ok(-e.eval(t)?),
            Expr::Add(a, b) => Ok(a.eval(t)? + b.eval(t)?),
            Expr::Sub(a, b) => Ok(a.eval(t)? - b.eval(t)?),
            Expr::Mul(a, b) => Ok(a.eval(t)? * b.eval(t)?),
            Expr::Div(a, b) => {
                let d = b.eval(t)?;
                if d == 0.0 {
                    return Err(Error::Domain(format!("division by zero at t = {t}")));
                }
                Ok(a.eval(t)? / d)
            }
            Expr::Pow(b, c) => pow_checked(b.eval(t)?, *c, t),
            Expr::Exp(e) => Ok(e.eval(t)?.exp()),
            Expr::Ln(e) => {
                let x = e.eval(t)?;
                if x <= 0.0 {
                    return Err(Error::Domain(format!(
                        "log of nonpositive value {x} at t = {t}"
                    )));
                }
                Ok(x.ln())
            }
            Expr::Sin(e) => Ok(e.eval(t)?.sin()),
            Expr::Cos(e) => Ok(e.eval(t)?.cos()),
            Expr::Abs(e) => Ok(e.eval(t)?.abs()),
        }
    }

    /// Symbolic derivative with respect to `t`. `abs` is rejected.
    pub fn diff(&self) -> Result<Expr> {
        Ok(match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Neg(e) => neg(e.diff()?),
            Expr::Add(a, b) => add(a.diff()?, b.diff()?),
            Expr::Sub(a, b) => sub(a.diff()?, b.diff()?),
            Expr::Mul(a, b) => add(
                mul(a.diff()?, (**b).clone()),
                mul((**a).clone(), b.diff()?),
            ),
            Expr::Div(a, b) => div(
                sub(mul(a.diff()?, (**b).clone()), mul((**a).clone(), b.diff()?)),
                pow((**b).clone(), 2.0),
            ),
            Expr::Pow(b, c) => mul(
                mul(Expr::Const(*c), pow((**b).clone(), c - 1.0)),
                b.diff()?,
            ),
            Expr::Exp(e) => mul(Expr::Exp(e.clone()), e.diff()?),
            Expr::Ln(e) => div(e.diff()?, (**e).clone()),
            Expr::Sin(e) => mul(Expr::Cos(e.clone()), e.diff()?),
            Expr::Cos(e) => neg(mul(Expr::Sin(e.clone()), e.diff()?)),
            Expr::Abs(_) => {
                return Err(Error::NotDifferentiable(
                    "abs(...) has no symbolic derivative".into(),
                ))
            }
        })
    }

    /// Canonical simplification: constant folding plus the identity
    /// rewrites `x*1`, `x*0`, `x+0`, `x-0`, `x/1`, `x^1`, `x^0`.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var => self.clone(),
            Expr::Neg(e) => neg(e.simplify()),
            Expr::Add(a, b) => add(a.simplify(), b.simplify()),
            Expr::Sub(a, b) => sub(a.simplify(), b.simplify()),
            Expr::Mul(a, b) => mul(a.simplify(), b.simplify()),
            Expr::Div(a, b) => div(a.simplify(), b.simplify()),
            Expr::Pow(b, c) => pow(b.simplify(), *c),
            Expr::Exp(e) => unary_fold(Expr::Exp, e.simplify(), f64::exp),
            Expr::Ln(e) => match e.simplify() {
                Expr::Const(c) if c > 0.0 => Expr::Const(c.ln()),
                s => Expr::Ln(Box::new(s)),
            },
            Expr::Sin(e) => unary_fold(Expr::Sin, e.simplify(), f64::sin),
            Expr::Cos(e) => unary_fold(Expr::Cos, e.simplify(), f64::cos),
            Expr::Abs(e) => unary_fold(Expr::Abs, e.simplify(), f64::abs),
        }
    }

    /// Replaces the variable with `inner`, producing the composition.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var => inner.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(inner))),
            Expr::Add(a, b) => {
                Expr::Add(Box::new(a.substitute(inner)), Box::new(b.substitute(inner)))
            }
            Expr::Sub(a, b) => {
                Expr::Sub(Box::new(a.substitute(inner)), Box::new(b.substitute(inner)))
            }
            Expr::Mul(a, b) => {
                Expr::Mul(Box::new(a.substitute(inner)), Box::new(b.substitute(inner)))
            }
            Expr::Div(a, b) => {
                Expr::Div(Box::new(a.substitute(inner)), Box::new(b.substitute(inner)))
            }
            Expr::Pow(b, c) => Expr::Pow(Box::new(b.substitute(inner)), *c),
            Expr::Exp(e) => Expr::Exp(Box::new(e.substitute(inner))),
            Expr::Ln(e) => Expr::Ln(Box::new(e.substitute(inner))),
            Expr::Sin(e) => Expr::Sin(Box::new(e.substitute(inner))),
            Expr::Cos(e) => Expr::Cos(Box::new(e.substitute(inner))),
            Expr::Abs(e) => Expr::Abs(Box::new(e.substitute(inner))),
        }
    }

    pub fn contains_abs(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => false,
            Expr::Abs(_) => true,
            Expr::Neg(e) | Expr::Exp(e) | Expr::Ln(e) | Expr::Sin(e) | Expr::Cos(e) => {
                e.contains_abs()
            }
            Expr::Pow(b, _) => b.contains_abs(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_abs() || b.contains_abs()
            }
        }
    }

    fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Neg(e) | Expr::Exp(e) | Expr::Ln(e) | Expr::Sin(e) | Expr::Cos(e)
            | Expr::Abs(e) => e.contains_var(),
            Expr::Pow(b, _) => b.contains_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }
}

fn pow_checked(base: f64, c: f64, t: f64) -> Result<f64> {
    if base == 0.0 && c < 0.0 {
        return Err(Error::Domain(format!(
            "zero base with negative exponent {c} at t = {t}"
        )));
    }
    if base < 0.0 && c.fract() != 0.0 {
        return Err(Error::Domain(format!(
            "non-integer power {c} of negative base {base} at t = {t}"
        )));
    }
    if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
        Ok(base.powi(c as i32))
    } else {
        Ok(base.powf(c))
    }
}

fn unary_fold(node: fn(Box<Expr>) -> Expr, inner: Expr, f: fn(f64) -> f64) -> Expr {
    match inner {
        Expr::Const(c) => {
            let v = f(c);
            if v.is_finite() {
                Expr::Const(v)
            } else {
                node(Box::new(Expr::Const(c)))
            }
        }
        other => node(Box::new(other)),
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(z), e) | (e, Expr::Const(z)) if z == 0.0 => e,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (e, Expr::Const(0.0)) => e,
        (Expr::Const(0.0), e) => neg(e),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(0.0), _) | (_, Expr::Const(0.0)) => Expr::Const(0.0),
        (Expr::Const(1.0), e) | (e, Expr::Const(1.0)) => e,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) if y != 0.0 => Expr::Const(x / y),
        (e, Expr::Const(1.0)) => e,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(b: Expr, c: f64) -> Expr {
    if c == 1.0 {
        return b;
    }
    if c == 0.0 {
        return Expr::Const(1.0);
    }
    match b {
        Expr::Const(x) => match pow_checked(x, c, f64::NAN) {
            Ok(v) if v.is_finite() => Expr::Const(v),
            _ => Expr::Pow(Box::new(Expr::Const(x)), c),
        },
        other => Expr::Pow(Box::new(other), c),
    }
}

// Precedence levels used by the printer; atoms are 5. A leading minus
// (unary or a folded negative constant) prints at the additive level:
// `-x*y` would read back as `-(x*y)`, so products and powers put
// parentheses around negated operands.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) => 1,
        Expr::Const(c) if *c < 0.0 => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn group(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
            if prec(e) < min {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "t"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                group(f, e, 3)
            }
            Expr::Add(a, b) => {
                group(f, a, 1)?;
                write!(f, " + ")?;
                group(f, b, 2)
            }
            Expr::Sub(a, b) => {
                group(f, a, 1)?;
                write!(f, " - ")?;
                group(f, b, 2)
            }
            Expr::Mul(a, b) => {
                group(f, a, 2)?;
                write!(f, "*")?;
                group(f, b, 3)
            }
            Expr::Div(a, b) => {
                group(f, a, 2)?;
                write!(f, "/")?;
                group(f, b, 3)
            }
            Expr::Pow(b, c) => {
                group(f, b, 5)?;
                write!(f, "^{c}")
            }
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Ln(e) => write!(f, "ln({e})"),
            Expr::Sin(e) => write!(f, "sin({e})"),
            Expr::Cos(e) => write!(f, "cos({e})"),
            Expr::Abs(e) => write!(f, "abs({e})"),
        }
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let exp_offset = self.pos;
            let exponent = self.factor()?;
            if exponent.contains_var() {
                return Err(Error::Syntax {
                    offset: exp_offset,
                    message: "exponent must be a constant expression".into(),
                });
            }
            let folded = exponent.simplify();
            let c = match folded {
                Expr::Const(c) => c,
                // Constant subtree that would not fold to a finite value.
                _ => {
                    return Err(Error::Syntax {
                        offset: exp_offset,
                        message: "exponent does not evaluate to a finite constant".into(),
                    })
                }
            };
            return Ok(Expr::Pow(Box::new(base), c));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let offset = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Syntax {
                        offset: self.pos,
                        message: "expected `)`".into(),
                    });
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let name = self.identifier();
                match name.as_str() {
                    "t" => Ok(Expr::Var),
                    "exp" | "ln" | "sin" | "cos" | "abs" => {
                        if self.peek() != Some(b'(') {
                            return Err(Error::Syntax {
                                offset: self.pos,
                                message: format!("expected `(` after `{name}`"),
                            });
                        }
                        self.pos += 1;
                        let arg = Box::new(self.expr()?);
                        if self.peek() != Some(b')') {
                            return Err(Error::Syntax {
                                offset: self.pos,
                                message: "expected `)`".into(),
                            });
                        }
                        self.pos += 1;
                        Ok(match name.as_str() {
                            "exp" => Expr::Exp(arg),
                            "ln" => Expr::Ln(arg),
                            "sin" => Expr::Sin(arg),
                            "cos" => Expr::Cos(arg),
                            _ => Expr::Abs(arg),
                        })
                    }
                    _ => Err(Error::UnknownIdentifier { offset, name }),
                }
            }
            _ => Err(Error::Syntax {
                offset,
                message: "expected a number, `t`, a function, or `(`".into(),
            }),
        }
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut seen_digit = false;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() {
                seen_digit = true;
                self.pos += 1;
            } else if c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && seen_digit {
                let save = self.pos;
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
                if !matches!(self.src.get(self.pos), Some(d) if d.is_ascii_digit()) {
                    self.pos = save;
                    break;
                }
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map(Expr::Const).map_err(|_| Error::Syntax {
            offset: start,
            message: format!("invalid number `{text}`"),
        })
    }
}

/// A real function of one variable: either an expression or a table of
/// `(point, value)` pairs total on the discrete points of some scale.
#[derive(Debug, Clone, PartialEq)]
pub enum Func {
    Expr(Expr),
    Tabulated(Vec<(f64, f64)>),
}

impl Func {
    pub fn from_text(text: &str) -> Result<Func> {
        Ok(Func::Expr(Expr::parse(text)?))
    }

    /// Builds a table; the pairs are sorted by point.
    pub fn tabulated(mut pairs: Vec<(f64, f64)>) -> Result<Func> {
        if pairs.is_empty() {
            return Err(Error::Domain("tabulated function has no points".into()));
        }
        if pairs.iter().any(|(p, v)| !p.is_finite() || !v.is_finite()) {
            return Err(Error::Domain("tabulated function has non-finite entries".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Func::Tabulated(pairs))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Func::Expr(e) => e.eval(t),
            Func::Tabulated(pairs) => {
                let j = match pairs.binary_search_by(|(p, _)| p.total_cmp(&t)) {
                    Ok(j) => j,
                    Err(0) => 0,
                    Err(j) if j == pairs.len() => pairs.len() - 1,
                    Err(j) => {
                        if (t - pairs[j - 1].0).abs() <= (pairs[j].0 - t).abs() {
                            j - 1
                        } else {
                            j
                        }
                    }
                };
                if (pairs[j].0 - t).abs() <= crate::timescale::MEMBERSHIP_TOL {
                    Ok(pairs[j].1)
                } else {
                    Err(Error::Domain(format!("point {t} is not tabulated")))
                }
            }
        }
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            Func::Expr(e) => Some(e),
            Func::Tabulated(_) => None,
        }
    }

    /// Composition `outer(inner(.))`. An expression inner function is
    /// substituted symbolically; a tabulated inner function has `outer`
    /// mapped over its values.
    pub fn compose_outer(outer: &Expr, inner: &Func) -> Result<Func> {
        match inner {
            Func::Expr(g) => Ok(Func::Expr(outer.substitute(g))),
            Func::Tabulated(pairs) => {
                let mut out = Vec::with_capacity(pairs.len());
                for (p, v) in pairs {
                    out.push((*p, outer.eval(*v)?));
                }
                Ok(Func::Tabulated(out))
            }
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Func::Expr(e) => write!(f, "{e}"),
            Func::Tabulated(pairs) => write!(f, "tabulated({} points)", pairs.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(text: &str, t: f64) -> f64 {
        Expr::parse(text).unwrap().eval(t).unwrap()
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(ev("2+3*4", 0.0), 14.0);
        assert_eq!(ev("-t^2", 2.0), -4.0);
        assert_eq!(ev("(2+3)*4", 0.0), 20.0);
        assert_eq!(ev("2*t - 1", 3.0), 5.0);
        assert_eq!(ev("t^-1", 4.0), 0.25);
        assert_eq!(ev("2^3^1", 0.0), 8.0);
    }

    #[test]
    fn eval_matches_std_functions() {
        assert_eq!(ev("t^0.5", 2.0), 2.0_f64.sqrt());
        assert_eq!(ev("exp(t)", 1.5), 1.5_f64.exp());
        assert_eq!(ev("ln(t)", 3.0), 3.0_f64.ln());
        assert_eq!(ev("sin(t) + cos(t)", 0.7), 0.7_f64.sin() + 0.7_f64.cos());
        assert_eq!(ev("abs(1 - t)", 3.0), 2.0);
    }

    #[test]
    fn domain_faults_are_errors() {
        let pole = Expr::parse("1/(t-1)").unwrap();
        assert!(matches!(pole.eval(1.0), Err(Error::Domain(_))));
        assert!(pole.eval(2.0).is_ok());
        assert!(matches!(ev_err("ln(t)", 0.0), Error::Domain(_)));
        assert!(matches!(ev_err("ln(t)", -1.0), Error::Domain(_)));
        assert!(matches!(ev_err("t^0.5", -1.0), Error::Domain(_)));
        assert!(matches!(ev_err("t^-2", 0.0), Error::Domain(_)));
        // Negative base with integer exponent is fine.
        assert_eq!(ev("t^3", -2.0), -8.0);
    }

    fn ev_err(text: &str, t: f64) -> Error {
        Expr::parse(text).unwrap().eval(t).unwrap_err()
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match Expr::parse("2*+3") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match Expr::parse("t^t") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected constant-exponent rejection, got {other:?}"),
        }
        match Expr::parse("foo(t)") {
            Err(Error::UnknownIdentifier { offset, name }) => {
                assert_eq!(offset, 0);
                assert_eq!(name, "foo");
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
        assert!(Expr::parse("2*(t+1").is_err());
        assert!(Expr::parse("").is_err());
    }

    #[test]
    fn diff_basic_rules() {
        let d = Expr::parse("t^2").unwrap().diff().unwrap();
        assert_eq!(d, Expr::parse("2*t").unwrap());
        let d = Expr::parse("exp(t)").unwrap().diff().unwrap();
        assert_eq!(d, Expr::parse("exp(t)").unwrap());
        let d = Expr::parse("sin(t)").unwrap().diff().unwrap();
        assert_eq!(d, Expr::parse("cos(t)").unwrap());
        // d/dt exp(t^2) at 1 is 2e.
        let d = Expr::parse("exp(t^2)").unwrap().diff().unwrap();
        let v = d.eval(1.0).unwrap();
        assert!((v - 2.0 * std::f64::consts::E).abs() < 1e-12);
        assert!(matches!(
            Expr::parse("abs(t)").unwrap().diff(),
            Err(Error::NotDifferentiable(_))
        ));
    }

    #[test]
    fn diff_matches_central_differences() {
        let cases = ["t^3 - 2*t", "exp(t^2)", "sin(t)*cos(t)", "ln(t+2)", "t/(t+1)", "t^0.5"];
        for text in cases {
            let e = Expr::parse(text).unwrap();
            let d = e.diff().unwrap();
            for t in [0.5, 1.0, 1.7] {
                let h = 1e-6;
                let fd = (e.eval(t + h).unwrap() - e.eval(t - h).unwrap()) / (2.0 * h);
                let sym = d.eval(t).unwrap();
                assert!(
                    (fd - sym).abs() <= 1e-6 * (1.0 + sym.abs()),
                    "{text} at {t}: fd {fd} vs sym {sym}"
                );
            }
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let cases = [
            "t^2",
            "-t^2",
            "2*t - 1",
            "t^-0.5",
            "(t+1)*(t-1)",
            "exp(t^2)/(1+t)",
            "sin(cos(t))",
            "abs(t - 2)",
            "1 - -t",
            "(2*t)^2",
        ];
        for text in cases {
            let e = Expr::parse(text).unwrap();
            let printed = e.to_string();
            let back = Expr::parse(&printed).unwrap();
            assert_eq!(
                back.simplify(),
                e.simplify(),
                "round trip failed: {text} -> {printed}"
            );
        }
    }

    #[test]
    fn simplify_is_minimal() {
        assert_eq!(Expr::parse("t*1").unwrap().simplify(), Expr::Var);
        assert_eq!(Expr::parse("t+0").unwrap().simplify(), Expr::Var);
        assert_eq!(Expr::parse("t^1").unwrap().simplify(), Expr::Var);
        assert_eq!(Expr::parse("2+3").unwrap().simplify(), Expr::Const(5.0));
        // Structure is otherwise preserved.
        let e = Expr::parse("t+t").unwrap();
        assert_eq!(e.simplify(), e);
    }

    #[test]
    fn tabulated_lookup_uses_membership_tolerance() {
        let f = Func::tabulated(vec![(2.0, 10.0), (1.0, 5.0)]).unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 5.0);
        assert_eq!(f.eval(2.0 + 1e-13).unwrap(), 10.0);
        assert!(f.eval(1.5).is_err());
    }

    #[test]
    fn composition_substitutes_or_maps() {
        let outer = Expr::parse("exp(t)").unwrap();
        let inner = Func::from_text("t^2").unwrap();
        let comp = Func::compose_outer(&outer, &inner).unwrap();
        assert_eq!(comp.eval(2.0).unwrap(), 4.0_f64.exp());

        let table = Func::tabulated(vec![(1.0, 2.0), (2.0, 3.0)]).unwrap();
        let comp = Func::compose_outer(&outer, &table).unwrap();
        assert_eq!(comp.eval(1.0).unwrap(), 2.0_f64.exp());
    }
}
