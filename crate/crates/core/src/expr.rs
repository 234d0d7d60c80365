//! Expression language for `f(z, t)`, `h(z)` and test functions.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := power (('*' | '/') power)*
//! power   := unary ('^' power)?          right-associative
//! unary   := '-' unary | primary         so -z^2 = (-z)^2
//! primary := number | 'i' | z | t | x | y | q | b
//!          | ('exp' | 'gamma') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Powers use the principal branch. `gamma` takes a real argument built from
//! literals and `q` only; literal arguments are folded while parsing, the
//! rest once `q` is bound.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{gamma, ppow, PrincipalArg};
use crate::{AnalyticFn, AnalyticFn2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z,
    T,
    /// Real-line variable, mapped to `z` by [`Expr::extend_to_complex`].
    X,
    /// Real-line state, mapped to `t` by [`Expr::extend_to_complex`].
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Q,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Gamma,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Var(Var),
    Param(Param),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Values bound during evaluation. Unset entries are unbound.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env {
    pub z: Option<Complex64>,
    pub t: Option<Complex64>,
    pub x: Option<Complex64>,
    pub y: Option<Complex64>,
    pub q: Option<f64>,
    pub b: Option<Complex64>,
}

impl Env {
    pub fn zt(z: Complex64, t: Complex64) -> Self {
        Self {
            z: Some(z),
            t: Some(t),
            ..Self::default()
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_b(mut self, b: Complex64) -> Self {
        self.b = Some(b);
        self
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' | b'.' => {
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
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!(
                        "unexpected character `{}`",
                        src[start..].chars().next().unwrap_or('?')
                    ),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, o)| o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.power()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp = self.power()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn parenthesized(&mut self, open: usize) -> Result<Expr> {
        let inner = match self.expr() {
            Ok(e) => e,
            Err(Error::Syntax { offset, .. }) if offset == self.end => {
                return Err(Error::Syntax {
                    offset: open,
                    message: "unclosed parenthesis".into(),
                })
            }
            Err(e) => return Err(e),
        };
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(inner)
            }
            Some(Tok::Comma) => self.err("functions take exactly one argument"),
            None => Err(Error::Syntax {
                offset: open,
                message: "unclosed parenthesis".into(),
            }),
            Some(_) => self.err("expected `)`"),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input, expected an expression"),
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => self.parenthesized(offset),
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Expr::I),
                "z" => Ok(Expr::Var(Var::Z)),
                "t" => Ok(Expr::Var(Var::T)),
                "x" => Ok(Expr::Var(Var::X)),
                "y" => Ok(Expr::Var(Var::Y)),
                "q" => Ok(Expr::Param(Param::Q)),
                "b" => Ok(Expr::Param(Param::B)),
                "exp" | "gamma" => {
                    let func = if name == "exp" {
                        Func::Exp
                    } else {
                        Func::Gamma
                    };
                    let open = self.offset();
                    if self.peek() != Some(&Tok::LParen) {
                        return self.err(format!("expected `(` after `{name}`"));
                    }
                    self.pos += 1;
                    let arg = self.parenthesized(open)?;
                    if func == Func::Gamma {
                        return gamma_node(arg, open + 1);
                    }
                    Ok(Expr::Call(func, Box::new(arg)))
                }
                _ => Err(Error::Syntax {
                    offset,
                    message: format!("unknown identifier `{name}`"),
                }),
            },
            _ => Err(Error::Syntax {
                offset,
                message: "expected an expression".into(),
            }),
        }
    }
}

fn gamma_node(arg: Expr, offset: usize) -> Result<Expr> {
    if !arg.is_real_constant_in_q() {
        return Err(Error::Syntax {
            offset,
            message: "gamma needs a real constant argument (literals and q only)".into(),
        });
    }
    let node = Expr::Call(Func::Gamma, Box::new(arg));
    if node.mentions_param(Param::Q) {
        return Ok(node);
    }
    match node.fold_constants() {
        Expr::Num(v) => Ok(Expr::Num(v)),
        _ => Err(Error::Syntax {
            offset,
            message: "gamma argument must be positive".into(),
        }),
    }
}

/// Parses an expression.
pub fn parse(text: &str) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Evaluation

fn complex_pow(base: Complex64, exp: Complex64) -> Result<Complex64> {
    if exp.im == 0.0 {
        return ppow(base, exp.re);
    }
    if base == Complex64::new(0.0, 0.0) {
        return if exp.re > 0.0 {
            Ok(base)
        } else {
            Err(Error::Singularity(
                "0 raised to a complex power with Re <= 0".into(),
            ))
        };
    }
    let log = Complex64::new(base.norm().ln(), PrincipalArg::of(base).value());
    Ok((exp * log).exp())
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<Complex64> {
        let c = |v: f64| Complex64::new(v, 0.0);
        match self {
            Expr::Num(v) => Ok(c(*v)),
            Expr::I => Ok(Complex64::new(0.0, 1.0)),
            Expr::Var(v) => {
                let (val, name) = match v {
                    Var::Z => (env.z, "z"),
                    Var::T => (env.t, "t"),
                    Var::X => (env.x, "x"),
                    Var::Y => (env.y, "y"),
                };
                val.ok_or_else(|| Error::Unbound(name.into()))
            }
            Expr::Param(Param::Q) => env.q.map(c).ok_or_else(|| Error::Unbound("q".into())),
            Expr::Param(Param::B) => env.b.ok_or_else(|| Error::Unbound("b".into())),
            Expr::Neg(a) => Ok(-a.eval(env)?),
            Expr::Bin(op, a, b) => {
                let x = a.eval(env)?;
                let y = b.eval(env)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y == c(0.0) {
                            Err(Error::Singularity(format!("division by zero in `{self}`")))
                        } else {
                            Ok(x / y)
                        }
                    }
                    BinOp::Pow => complex_pow(x, y).map_err(|e| match e {
                        Error::Singularity(m) => Error::Singularity(format!("{m} in `{self}`")),
                        other => other,
                    }),
                }
            }
            Expr::Call(Func::Exp, a) => Ok(a.eval(env)?.exp()),
            Expr::Call(Func::Gamma, a) => {
                let x = a.eval(env)?;
                if x.im != 0.0 {
                    return Err(Error::Domain {
                        what: "gamma of a non-real value",
                        value: x.im,
                    });
                }
                Ok(c(gamma(x.re)?))
            }
        }
    }

    fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Neg(a) | Expr::Call(_, a) => a.any(pred),
            Expr::Bin(_, a, b) => a.any(pred) || b.any(pred),
            _ => false,
        }
    }

    pub fn mentions_var(&self, v: Var) -> bool {
        self.any(&|e| *e == Expr::Var(v))
    }

    pub fn mentions_param(&self, p: Param) -> bool {
        self.any(&|e| *e == Expr::Param(p))
    }

    /// True if the tree contains the imaginary unit.
    pub fn mentions_i(&self) -> bool {
        self.any(&|e| *e == Expr::I)
    }

    fn is_real_constant_in_q(&self) -> bool {
        !self.any(&|e| matches!(e, Expr::Var(_) | Expr::Param(Param::B) | Expr::I))
    }

    fn map(&self, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        if let Some(e) = f(self) {
            return e;
        }
        match self {
            Expr::Neg(a) => Expr::Neg(Box::new(a.map(f))),
            Expr::Call(g, a) => Expr::Call(*g, Box::new(a.map(f))),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.map(f)), Box::new(b.map(f))),
            other => other.clone(),
        }
    }

    /// Replaces the variable `v` by `with`.
    pub fn substitute(&self, v: Var, with: &Expr) -> Expr {
        self.map(&|e| (*e == Expr::Var(v)).then(|| with.clone()))
    }

    /// The syntactic extension `x → z`, `y → t` of a real-line expression.
    pub fn extend_to_complex(&self) -> Expr {
        self.substitute(Var::X, &Expr::Var(Var::Z))
            .substitute(Var::Y, &Expr::Var(Var::T))
    }

    /// Substitutes a numeric `q` and folds real constant subtrees.
    pub fn bind_q(&self, q: f64) -> Expr {
        self.map(&|e| (*e == Expr::Param(Param::Q)).then_some(Expr::Num(q)))
            .fold_constants()
    }

    /// Folds subtrees that evaluate to a finite real number without any
    /// variable, parameter or `i`.
    pub fn fold_constants(&self) -> Expr {
        let folded = match self {
            Expr::Neg(a) => Expr::Neg(Box::new(a.fold_constants())),
            Expr::Call(g, a) => Expr::Call(*g, Box::new(a.fold_constants())),
            Expr::Bin(op, a, b) => Expr::Bin(
                *op,
                Box::new(a.fold_constants()),
                Box::new(b.fold_constants()),
            ),
            other => return other.clone(),
        };
        let literal = folded.any(&|e| matches!(e, Expr::Var(_) | Expr::Param(_) | Expr::I));
        if literal {
            return folded;
        }
        match folded.eval(&Env::default()) {
            Ok(v) if v.im == 0.0 && v.re.is_finite() => Expr::Num(v.re),
            _ => folded,
        }
    }

    /// Multiplies by `z^power`, merging with explicit powers of `z` in the
    /// top-level product so that `z^q · z^(−q)` cancels symbolically.
    ///
    /// Merging is exact under the principal branch for real exponents
    /// (`|z|^a e^{ia Arg z} · |z|^b e^{ib Arg z} = |z|^(a+b) e^{i(a+b) Arg z}`),
    /// so the result has the same values away from `z = 0` and may extend
    /// continuously to it.
    pub fn times_z_power(&self, power: f64) -> Expr {
        let mut num = Vec::new();
        let mut den = Vec::new();
        let mut negate = false;
        let mut exponent = power;
        collect_factors(self, true, &mut num, &mut den, &mut negate, &mut exponent);

        let rounded = exponent.round();
        if (exponent - rounded).abs() < 1e-12 {
            exponent = rounded;
        }
        if exponent != 0.0 {
            num.insert(
                0,
                Expr::Bin(
                    BinOp::Pow,
                    Box::new(Expr::Var(Var::Z)),
                    Box::new(Expr::Num(exponent)),
                ),
            );
        }
        let product = |fs: Vec<Expr>| {
            fs.into_iter()
                .reduce(|a, b| Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b)))
        };
        let mut out = product(num).unwrap_or(Expr::Num(1.0));
        if let Some(d) = product(den) {
            out = Expr::Bin(BinOp::Div, Box::new(out), Box::new(d));
        }
        if negate {
            out = Expr::Neg(Box::new(out));
        }
        out
    }
}

fn z_exponent(e: &Expr) -> Option<f64> {
    match e {
        Expr::Var(Var::Z) => Some(1.0),
        Expr::Bin(BinOp::Pow, base, exp) if **base == Expr::Var(Var::Z) => {
            match exp.fold_constants() {
                Expr::Num(v) => Some(v),
                _ => None,
            }
        }
        _ => None,
    }
}

fn collect_factors(
    e: &Expr,
    upper: bool,
    num: &mut Vec<Expr>,
    den: &mut Vec<Expr>,
    negate: &mut bool,
    exponent: &mut f64,
) {
    match e {
        Expr::Bin(BinOp::Mul, a, b) => {
            collect_factors(a, upper, num, den, negate, exponent);
            collect_factors(b, upper, num, den, negate, exponent);
        }
        Expr::Bin(BinOp::Div, a, b) => {
            collect_factors(a, upper, num, den, negate, exponent);
            collect_factors(b, !upper, num, den, negate, exponent);
        }
        Expr::Neg(a) => {
            *negate = !*negate;
            collect_factors(a, upper, num, den, negate, exponent);
        }
        other => match z_exponent(other) {
            Some(p) => *exponent += if upper { p } else { -p },
            None => {
                if upper {
                    num.push(other.clone())
                } else {
                    den.push(other.clone())
                }
            }
        },
    }
}

impl fmt::Display for Expr {
    /// Canonical, fully parenthesized form; parsing it reproduces the tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if v.is_sign_negative() => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::I => write!(f, "i"),
            Expr::Var(Var::Z) => write!(f, "z"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Y) => write!(f, "y"),
            Expr::Param(Param::Q) => write!(f, "q"),
            Expr::Param(Param::B) => write!(f, "b"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Call(Func::Exp, a) => write!(f, "exp({a})"),
            Expr::Call(Func::Gamma, a) => write!(f, "gamma({a})"),
        }
    }
}

/// An expression in `z` with `q` and `b` bound, usable as [`AnalyticFn`].
#[derive(Debug, Clone)]
pub struct ExprFn {
    pub expr: Expr,
    pub q: Option<f64>,
    pub b: Option<Complex64>,
}

impl AnalyticFn for ExprFn {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.expr.eval(&Env {
            z: Some(z),
            q: self.q,
            b: self.b,
            ..Env::default()
        })
    }
}

/// An expression in `(z, t)` with `q` and `b` bound, usable as [`AnalyticFn2`].
#[derive(Debug, Clone)]
pub struct ExprFn2 {
    pub expr: Expr,
    pub q: Option<f64>,
    pub b: Option<Complex64>,
}

impl AnalyticFn2 for ExprFn2 {
    fn eval2(&self, z: Complex64, t: Complex64) -> Result<Complex64> {
        self.expr.eval(&Env {
            z: Some(z),
            t: Some(t),
            q: self.q,
            b: self.b,
            ..Env::default()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_node() {
        let e = parse("z*t").unwrap();
        assert_eq!(
            e,
            Expr::Bin(
                BinOp::Mul,
                Box::new(Expr::Var(Var::Z)),
                Box::new(Expr::Var(Var::T))
            )
        );
        assert_eq!(
            e.eval(&Env::zt(c(2.0, 0.0), c(3.0, 0.0))).unwrap(),
            c(6.0, 0.0)
        );
    }

    #[test]
    fn unclosed_paren_offset_zero() {
        match parse("(") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
        match parse("1 + (z * (t)") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse("exp(1, 2)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("gamma(z)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("gamma(i)"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse("sin(z)"),
            Err(Error::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse("z $ t"),
            Err(Error::Syntax { offset: 2, .. })
        ));
        assert!(matches!(parse("z t"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("gamma(-1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
    }

    #[test]
    fn principal_square_root_of_minus_one() {
        let v = parse("(-1)^0.5").unwrap().eval(&Env::default()).unwrap();
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn precedence_rules() {
        let env = Env::zt(c(2.0, 0.0), c(3.0, 0.0));
        // right-associative: 2^3^2 = 2^9
        assert_eq!(parse("2^3^2").unwrap().eval(&env).unwrap(), c(512.0, 0.0));
        // unary minus binds to the base
        assert_eq!(parse("-z^2").unwrap().eval(&env).unwrap(), c(4.0, 0.0));
        assert_eq!(parse("z^-1").unwrap().eval(&env).unwrap(), c(0.5, 0.0));
        assert_eq!(
            parse("1 - z*t/2").unwrap().eval(&env).unwrap(),
            c(-2.0, 0.0)
        );
        assert_eq!(
            parse("1.5e1 + .5").unwrap().eval(&env).unwrap(),
            c(15.5, 0.0)
        );
    }

    #[test]
    fn gamma_folding() {
        assert_eq!(parse("gamma(2.5)").unwrap(), Expr::Num(gamma(2.5).unwrap()));
        let e = parse("gamma(1-q)").unwrap();
        assert!(matches!(e, Expr::Call(Func::Gamma, _)));
        assert_eq!(e.bind_q(0.5), Expr::Num(gamma(0.5).unwrap()));
    }

    #[test]
    fn example_f_identity() {
        // z^q f(z, b) = (b + (q/(1-q)) z)/Γ(1-q)
        let f = parse("z^(-q)*(t + (q/(1-q))*z)/gamma(1-q)").unwrap();
        let (q, z, b) = (0.5, c(0.25, 0.0), c(1.0, 0.0));
        let fv = f.eval(&Env::zt(z, b).with_q(q)).unwrap();
        let lhs = ppow(z, q).unwrap() * fv;
        let rhs = (b + q / (1.0 - q) * z) / gamma(1.0 - q).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
        assert!((lhs.re - 0.705_236_979_434_695).abs() < 1e-13);
    }

    #[test]
    fn singularities_name_the_subexpression() {
        let e = parse("1/(z - 1)").unwrap();
        match e.eval(&Env::zt(c(1.0, 0.0), c(0.0, 0.0))) {
            Err(Error::Singularity(m)) => assert!(m.contains("(z - 1.0)"), "{m}"),
            other => panic!("{other:?}"),
        }
        let e = parse("z^(-0.5)").unwrap();
        assert!(matches!(
            e.eval(&Env::zt(c(0.0, 0.0), c(0.0, 0.0))),
            Err(Error::Singularity(_))
        ));
        assert!(matches!(
            parse("b").unwrap().eval(&Env::default()),
            Err(Error::Unbound(_))
        ));
    }

    #[test]
    fn times_z_power_cancels() {
        let f = parse("z^(-q)*(t + (q/(1-q))*z)/gamma(1-q)")
            .unwrap()
            .bind_q(0.5);
        let big_f = f.times_z_power(0.5);
        assert!(!big_f.to_string().contains('^'), "{big_f}");
        let v = big_f.eval(&Env::zt(c(0.0, 0.0), c(1.0, 0.0))).unwrap();
        assert!((v.re - 1.0 / gamma(0.5).unwrap()).abs() < 1e-15);

        let g = parse("t").unwrap().times_z_power(0.3);
        assert_eq!(g.to_string(), "((z ^ 0.3) * t)");

        let h = parse("-2*z/(z^0.5*t)").unwrap().times_z_power(0.5);
        let (z, t) = (c(0.3, -0.4), c(1.1, 0.2));
        let direct = ppow(z, 0.5).unwrap() * (-2.0 * z / (ppow(z, 0.5).unwrap() * t));
        assert!((h.eval(&Env::zt(z, t)).unwrap() - direct).norm() < 1e-15);
    }

    #[test]
    fn extension_substitutes_real_variables() {
        let e = parse("x^(-q)*(y + x)").unwrap().extend_to_complex();
        assert!(!e.mentions_var(Var::X) && !e.mentions_var(Var::Y));
        assert!(e.mentions_var(Var::Z) && e.mentions_var(Var::T));
    }

    #[test]
    fn printed_form_reparses() {
        let e = parse("z^(-q)*(t + (q/(1-q))*z)/gamma(1-q) - exp(i*z)^2").unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e);
        assert_eq!(parse(&printed).unwrap().to_string(), printed);
    }

    #[test]
    fn complex_exponent() {
        // i^i = e^{-π/2}
        let v = parse("i^i").unwrap().eval(&Env::default()).unwrap();
        assert!((v - c((-std::f64::consts::FRAC_PI_2).exp(), 0.0)).norm() < 1e-15);
    }
}
