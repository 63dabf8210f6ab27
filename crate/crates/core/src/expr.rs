//! Expressions in one real variable `t`.
//!
//! Profile curves and frame angles are written in a small infix language:
//! numbers, `t`, `pi`, `e`, the operators `+ - * / ^`, and the functions
//! `sin cos tan atan atan2 sqrt exp log abs sign`. Expressions can be
//! evaluated, differentiated symbolically, and expanded as truncated Taylor
//! series ("jets") for exact higher derivatives at a point.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },
    #[error("`{expr}` is not smooth where its argument vanishes")]
    NonSmooth { expr: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Sqrt,
    Exp,
    Log,
    Abs,
    Sign,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    T,
    Num(f64),
    Pi,
    E,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Atan2(Box<Expr>, Box<Expr>),
}

// Smart constructors with constant folding. They are the only place where
// any simplification happens.
impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn t() -> Expr {
        Expr::T
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn is_num(&self, v: f64) -> bool {
        self.as_num() == Some(v)
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Num(v) => Expr::Num(-v),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::Num(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::Num(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::Num(x * y),
            (Some(x), _) if x == 0.0 => Expr::Num(0.0),
            (_, Some(y)) if y == 0.0 => Expr::Num(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Num(x / y),
            (Some(x), _) if x == 0.0 => Expr::Num(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (_, Some(y)) if y == 0.0 => Expr::Num(1.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::Pow(Box::new(a), Box::new(b)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn atan2(y: Expr, x: Expr) -> Expr {
        Expr::Atan2(Box::new(y), Box::new(x))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::call(Func::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::call(Func::Cos, a)
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::call(Func::Sqrt, a)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if ch.is_ascii_digit() || ch == b'.' {
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
            let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                expected: vec!["number".into()],
                found: format!("`{text}`"),
            })?;
            out.push((Tok::Num(v), start));
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&ch) {
            out.push((Tok::Op(ch as char), start));
            i += 1;
        } else {
            let c = src[start..].chars().next().unwrap_or('?');
            return Err(ExprError::Syntax {
                offset: start,
                expected: vec!["operand".into(), "operator".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, op: char) -> Result<(), ExprError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("\"{op}\"")])
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // `-t^2` is `-(t^2)`; the exponent may itself carry a sign: `t^-1`.
    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if *self.peek() == Tok::Op('+') {
            self.bump();
            return self.unary();
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "t" => return Ok(Expr::T),
                    "pi" => return Ok(Expr::Pi),
                    "e" => return Ok(Expr::E),
                    _ => {}
                }
                if name == "atan2" {
                    self.expect('(')?;
                    let y = self.expr()?;
                    self.expect(',')?;
                    let x = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::atan2(y, x));
                }
                match Func::from_name(&name) {
                    Some(f) => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::call(f, a))
                    }
                    None => Err(ExprError::UnknownIdentifier { name, offset }),
                }
            }
            _ => self.fail(&["number", "identifier", "\"(\""]),
        }
    }
}

/// Parse an expression in the variable `t`.
pub fn parse(source: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(source)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// --------------------------------------------------------------- printing

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => 3,
        _ => 5,
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v.is_finite() {
        write!(f, "{v:?}")
    } else if v.is_nan() {
        write!(f, "(0/0)")
    } else if v > 0.0 {
        write!(f, "(1/0)")
    } else {
        write!(f, "(-1/0)")
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::T => write!(f, "t"),
            Expr::Pi => write!(f, "pi"),
            Expr::E => write!(f, "e"),
            Expr::Num(v) => write_num(f, *v),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_wrapped(f, a, 3)
            }
            Expr::Add(a, b) => {
                write_wrapped(f, a, 1)?;
                write!(f, " + ")?;
                write_wrapped(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_wrapped(f, a, 1)?;
                write!(f, " - ")?;
                write_wrapped(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_wrapped(f, a, 2)?;
                write!(f, "*")?;
                write_wrapped(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_wrapped(f, a, 2)?;
                write!(f, "/")?;
                write_wrapped(f, b, 3)
            }
            Expr::Pow(a, b) => {
                write_wrapped(f, a, 5)?;
                write!(f, "^")?;
                write_wrapped(f, b, 4)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Atan2(y, x) => write!(f, "atan2({y}, {x})"),
        }
    }
}

// ------------------------------------------------------------- evaluation

fn domain(e: &Expr, reason: impl Into<String>) -> ExprError {
    ExprError::Domain {
        expr: e.to_string(),
        reason: reason.into(),
    }
}

fn integer_exponent(b: &Expr) -> Option<i32> {
    let v = match b {
        Expr::Num(v) => *v,
        Expr::Neg(inner) => -inner.as_num()?,
        _ => return None,
    };
    (v.fract() == 0.0 && v.abs() <= 64.0).then_some(v as i32)
}

impl Expr {
    /// Evaluate at `t`. Division by zero, logarithms and square roots of
    /// invalid arguments, and non-finite results are errors.
    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        let v = match self {
            Expr::T => t,
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::E => std::f64::consts::E,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => {
                let num = a.eval(t)?;
                let den = b.eval(t)?;
                if den == 0.0 {
                    return Err(domain(self, "division by zero"));
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(t)?;
                if let Some(n) = integer_exponent(b) {
                    if base == 0.0 && n < 0 {
                        return Err(domain(self, "zero to a negative power"));
                    }
                    base.powi(n)
                } else {
                    let p = b.eval(t)?;
                    if p.fract() == 0.0 && p.abs() <= 64.0 {
                        if base == 0.0 && p < 0.0 {
                            return Err(domain(self, "zero to a negative power"));
                        }
                        base.powi(p as i32)
                    } else {
                        if base < 0.0 || (base == 0.0 && p <= 0.0) {
                            return Err(domain(self, "non-integer power of a non-positive base"));
                        }
                        base.powf(p)
                    }
                }
            }
            Expr::Call(func, a) => {
                let u = a.eval(t)?;
                match func {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => u.tan(),
                    Func::Atan => u.atan(),
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(domain(self, "square root of a negative number"));
                        }
                        u.sqrt()
                    }
                    Func::Exp => u.exp(),
                    Func::Log => {
                        if u <= 0.0 {
                            return Err(domain(self, "logarithm of a non-positive number"));
                        }
                        u.ln()
                    }
                    Func::Abs => u.abs(),
                    Func::Sign => {
                        if u > 0.0 {
                            1.0
                        } else if u < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
            Expr::Atan2(y, x) => {
                let yv = y.eval(t)?;
                let xv = x.eval(t)?;
                if yv == 0.0 && xv == 0.0 {
                    return Err(domain(self, "atan2 of the origin"));
                }
                yv.atan2(xv)
            }
        };
        if !v.is_finite() {
            return Err(domain(self, "non-finite result"));
        }
        Ok(v)
    }

    /// Exact symbolic derivative with respect to `t`.
    ///
    /// `abs` and `sign` are differentiated as if their argument were nonzero;
    /// [`Expr::check_smooth_at`] tells whether that is legitimate at a point.
    pub fn diff(&self) -> Expr {
        match self {
            Expr::T => Expr::Num(1.0),
            Expr::Num(_) | Expr::Pi | Expr::E => Expr::Num(0.0),
            Expr::Neg(a) => Expr::neg(a.diff()),
            Expr::Add(a, b) => Expr::add(a.diff(), b.diff()),
            Expr::Sub(a, b) => Expr::sub(a.diff(), b.diff()),
            Expr::Mul(a, b) => Expr::add(Expr::mul(a.diff(), (**b).clone()), Expr::mul((**a).clone(), b.diff())),
            Expr::Div(a, b) => {
                // (a/b)' = a'/b - a b'/b^2
                let db = b.diff();
                let first = Expr::div(a.diff(), (**b).clone());
                if db.is_num(0.0) {
                    return first;
                }
                Expr::sub(
                    first,
                    Expr::div(Expr::mul((**a).clone(), db), Expr::mul((**b).clone(), (**b).clone())),
                )
            }
            Expr::Pow(a, b) => {
                let da = a.diff();
                if let Some(n) = integer_exponent(b) {
                    // n a^(n-1) a', expanded without logarithms
                    let lower = match n - 1 {
                        0 => Expr::Num(1.0),
                        1 => (**a).clone(),
                        m => Expr::Pow(a.clone(), Box::new(Expr::Num(m as f64))),
                    };
                    return Expr::mul(Expr::mul(Expr::Num(n as f64), lower), da);
                }
                let db = b.diff();
                if db.is_num(0.0) {
                    // b a^(b-1) a' for a constant exponent
                    let lower = Expr::pow((**a).clone(), Expr::sub((**b).clone(), Expr::Num(1.0)));
                    return Expr::mul(Expr::mul((**b).clone(), lower), da);
                }
                // a^b (b' log a + b a'/a)
                Expr::mul(
                    self.clone(),
                    Expr::add(
                        Expr::mul(db, Expr::call(Func::Log, (**a).clone())),
                        Expr::div(Expr::mul((**b).clone(), da), (**a).clone()),
                    ),
                )
            }
            Expr::Call(func, a) => {
                let da = a.diff();
                if da.is_num(0.0) {
                    return Expr::Num(0.0);
                }
                let u = (**a).clone();
                let outer = match func {
                    Func::Sin => Expr::cos(u),
                    Func::Cos => Expr::neg(Expr::sin(u)),
                    Func::Tan => {
                        let c = Expr::cos(u);
                        Expr::div(Expr::Num(1.0), Expr::mul(c.clone(), c))
                    }
                    Func::Atan => Expr::div(Expr::Num(1.0), Expr::add(Expr::Num(1.0), Expr::mul(u.clone(), u))),
                    Func::Sqrt => Expr::div(Expr::Num(0.5), self.clone()),
                    Func::Exp => self.clone(),
                    Func::Log => Expr::div(Expr::Num(1.0), u),
                    Func::Abs => Expr::call(Func::Sign, u),
                    Func::Sign => return Expr::Num(0.0),
                };
                Expr::mul(outer, da)
            }
            Expr::Atan2(y, x) => {
                // (y' x - x' y) / (x^2 + y^2)
                let (y, x) = ((**y).clone(), (**x).clone());
                let num = Expr::sub(Expr::mul(y.diff(), x.clone()), Expr::mul(x.diff(), y.clone()));
                let den = Expr::add(Expr::mul(x.clone(), x), Expr::mul(y.clone(), y));
                Expr::div(num, den)
            }
        }
    }

    /// The `n`-th derivative by repeated symbolic differentiation.
    pub fn diff_n(&self, n: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.diff();
        }
        e
    }

    /// Error if some `abs` or `sign` in the tree has a vanishing argument at `t`.
    pub fn check_smooth_at(&self, t: f64) -> Result<(), ExprError> {
        match self {
            Expr::T | Expr::Num(_) | Expr::Pi | Expr::E => Ok(()),
            Expr::Neg(a) => a.check_smooth_at(t),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Atan2(a, b) => {
                a.check_smooth_at(t)?;
                b.check_smooth_at(t)
            }
            Expr::Call(func, a) => {
                a.check_smooth_at(t)?;
                if matches!(func, Func::Abs | Func::Sign) && a.eval(t)? == 0.0 {
                    return Err(ExprError::NonSmooth { expr: self.to_string() });
                }
                Ok(())
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::T | Expr::Num(_) | Expr::Pi | Expr::E => 1,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Atan2(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Taylor coefficients `c_0..=c_order` of the expression around `t0`,
    /// so that `f(t0 + h) = Σ c_k h^k + O(h^(order+1))`.
    pub fn taylor(&self, t0: f64, order: usize) -> Result<Vec<f64>, ExprError> {
        let mut c = self.jet(t0, order + 1)?.0;
        c.resize(order + 1, 0.0);
        Ok(c)
    }

    /// Derivatives `f(t0), f'(t0), ..., f^(order)(t0)`, computed from the
    /// Taylor expansion rather than from expression growth.
    pub fn derivatives(&self, t0: f64, order: usize) -> Result<Vec<f64>, ExprError> {
        let coeffs = self.taylor(t0, order)?;
        let mut fact = 1.0;
        Ok(coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect())
    }

    fn jet(&self, t0: f64, n: usize) -> Result<Jet, ExprError> {
        Ok(match self {
            Expr::T => {
                let mut j = Jet::constant(t0, n);
                if n > 1 {
                    j.0[1] = 1.0;
                }
                j
            }
            Expr::Num(v) => Jet::constant(*v, n),
            Expr::Pi => Jet::constant(std::f64::consts::PI, n),
            Expr::E => Jet::constant(std::f64::consts::E, n),
            Expr::Neg(a) => a.jet(t0, n)?.scale(-1.0),
            Expr::Add(a, b) => a.jet(t0, n)?.add(&b.jet(t0, n)?),
            Expr::Sub(a, b) => a.jet(t0, n)?.add(&b.jet(t0, n)?.scale(-1.0)),
            Expr::Mul(a, b) => a.jet(t0, n)?.mul(&b.jet(t0, n)?),
            Expr::Div(a, b) => {
                let den = b.jet(t0, n)?;
                if den.0[0] == 0.0 {
                    return Err(domain(self, "division by zero"));
                }
                a.jet(t0, n)?.div(&den)
            }
            Expr::Pow(a, b) => {
                let base = a.jet(t0, n)?;
                if let Some(k) = integer_exponent(b) {
                    if k < 0 && base.0[0] == 0.0 {
                        return Err(domain(self, "zero to a negative power"));
                    }
                    base.powi(k)
                } else {
                    let exp = b.jet(t0, n)?;
                    if base.0[0] <= 0.0 {
                        return Err(domain(self, "non-integer power of a non-positive base"));
                    }
                    if exp.is_constant() {
                        base.powf(exp.0[0])
                    } else {
                        exp.mul(&base.ln()).exp()
                    }
                }
            }
            Expr::Call(func, a) => {
                let u = a.jet(t0, n)?;
                let u0 = u.0[0];
                match func {
                    Func::Sin => u.sin_cos().0,
                    Func::Cos => u.sin_cos().1,
                    Func::Tan => {
                        let (s, c) = u.sin_cos();
                        if c.0[0] == 0.0 {
                            return Err(domain(self, "tangent pole"));
                        }
                        s.div(&c)
                    }
                    Func::Atan => {
                        let one_plus = Jet::constant(1.0, n).add(&u.mul(&u));
                        u.derivative().div(&one_plus.truncate(n - 1)).integrate(u0.atan())
                    }
                    Func::Sqrt => {
                        if u0 <= 0.0 {
                            return Err(domain(self, "square root expanded at a non-positive point"));
                        }
                        u.sqrt()
                    }
                    Func::Exp => u.exp(),
                    Func::Log => {
                        if u0 <= 0.0 {
                            return Err(domain(self, "logarithm of a non-positive number"));
                        }
                        u.ln()
                    }
                    Func::Abs | Func::Sign => {
                        if u0 == 0.0 {
                            return Err(ExprError::NonSmooth { expr: self.to_string() });
                        }
                        if *func == Func::Abs {
                            u.scale(u0.signum())
                        } else {
                            Jet::constant(u0.signum(), n)
                        }
                    }
                }
            }
            Expr::Atan2(y, x) => {
                let yj = y.jet(t0, n)?;
                let xj = x.jet(t0, n)?;
                if yj.0[0] == 0.0 && xj.0[0] == 0.0 {
                    return Err(domain(self, "atan2 of the origin"));
                }
                let num = yj
                    .derivative()
                    .mul(&xj.truncate(n - 1))
                    .add(&xj.derivative().mul(&yj.truncate(n - 1)).scale(-1.0));
                let den = xj.mul(&xj).add(&yj.mul(&yj)).truncate(n - 1);
                num.div(&den).integrate(yj.0[0].atan2(xj.0[0]))
            }
        })
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// ------------------------------------------------------------------- jets

/// Truncated power series: coefficient `k` multiplies `h^k`.
#[derive(Debug, Clone)]
struct Jet(Vec<f64>);

impl Jet {
    fn constant(v: f64, n: usize) -> Jet {
        let mut c = vec![0.0; n];
        c[0] = v;
        Jet(c)
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn is_constant(&self) -> bool {
        self.0[1..].iter().all(|c| *c == 0.0)
    }

    fn truncate(&self, n: usize) -> Jet {
        Jet(self.0[..n.max(1)].to_vec())
    }

    fn scale(mut self, s: f64) -> Jet {
        for c in &mut self.0 {
            *c *= s;
        }
        self
    }

    fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn mul(&self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut s = 0.0;
            for j in 0..=k {
                s += self.0[j] * o.0[k - j];
            }
            out[k] = s;
        }
        Jet(out)
    }

    fn div(&self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        let mut w = vec![0.0; n];
        for k in 0..n {
            let mut s = self.0[k];
            for j in 1..=k {
                s -= o.0[j] * w[k - j];
            }
            w[k] = s / o.0[0];
        }
        Jet(w)
    }

    /// Series of the derivative; one coefficient shorter.
    fn derivative(&self) -> Jet {
        if self.len() == 1 {
            return Jet(vec![0.0]);
        }
        Jet((1..self.len()).map(|k| k as f64 * self.0[k]).collect())
    }

    /// Antiderivative with the given constant term; one coefficient longer.
    fn integrate(&self, c0: f64) -> Jet {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(c0);
        for (k, c) in self.0.iter().enumerate() {
            out.push(c / (k + 1) as f64);
        }
        Jet(out)
    }

    fn exp(&self) -> Jet {
        let n = self.len();
        let mut w = vec![0.0; n];
        w[0] = self.0[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.0[j] * w[k - j];
            }
            w[k] = s / k as f64;
        }
        Jet(w)
    }

    fn ln(&self) -> Jet {
        let n = self.len();
        self.derivative().div(&self.truncate(n - 1)).integrate(self.0[0].ln())
    }

    fn sqrt(&self) -> Jet {
        let n = self.len();
        let mut w = vec![0.0; n];
        w[0] = self.0[0].sqrt();
        for k in 1..n {
            let mut s = self.0[k];
            for j in 1..k {
                s -= w[j] * w[k - j];
            }
            w[k] = s / (2.0 * w[0]);
        }
        Jet(w)
    }

    fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.0[0].sin();
        c[0] = self.0[0].cos();
        for k in 1..n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                let ju = j as f64 * self.0[j];
                ss += ju * c[k - j];
                cc -= ju * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Jet(s), Jet(c))
    }

    fn powf(&self, p: f64) -> Jet {
        let n = self.len();
        let u0 = self.0[0];
        let mut w = vec![0.0; n];
        w[0] = u0.powf(p);
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += (p * j as f64 - (k - j) as f64) * self.0[j] * w[k - j];
            }
            w[k] = s / (k as f64 * u0);
        }
        Jet(w)
    }

    fn powi(&self, k: i32) -> Jet {
        let n = self.len();
        let mut result = Jet::constant(1.0, n);
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        if k < 0 {
            Jet::constant(1.0, n).div(&result)
        } else {
            result
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, t: f64) -> f64 {
        parse(s).unwrap().eval(t).unwrap()
    }

    #[test]
    fn parses_and_evaluates() {
        assert_eq!(ev("t^2/2", 2.0), 2.0);
        assert_eq!(ev("sin(t)*cos(t)", 0.0), 0.0);
        assert_eq!(ev("t+2", 0.0), 2.0);
        assert!((ev("atan2(-1, t)", 1.0) + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(ev("-t^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("t^-1", 4.0), 0.25);
        assert_eq!(ev("1.5e1 + .5", 0.0), 15.5);
        assert_eq!(ev("2*pi - 2*pi + e - e", 0.0), 0.0);
    }

    #[test]
    fn power_node_shape() {
        let e = parse("t^2/2").unwrap();
        assert_eq!(
            e,
            Expr::Div(
                Box::new(Expr::Pow(Box::new(Expr::T), Box::new(Expr::Num(2.0)))),
                Box::new(Expr::Num(2.0))
            )
        );
    }

    #[test]
    fn syntax_errors_report_offset() {
        match parse("(t+1") {
            Err(ExprError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 4);
                assert_eq!(expected, vec!["\")\"".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("t +* 2"), Err(ExprError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("t t"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("t $"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(
            parse("foo(t)"),
            Err(ExprError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(parse("atan2(t)"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn domain_errors() {
        let e = parse("sqrt(t)").unwrap();
        assert!(matches!(e.eval(-1.0), Err(ExprError::Domain { .. })));
        assert!(matches!(parse("1/t").unwrap().eval(0.0), Err(ExprError::Domain { .. })));
        assert!(matches!(
            parse("log(t)").unwrap().eval(0.0),
            Err(ExprError::Domain { .. })
        ));
        assert!(matches!(
            parse("(-2)^0.5").unwrap().eval(0.0),
            Err(ExprError::Domain { .. })
        ));
        match parse("1 + log(t - 1)").unwrap().eval(0.5) {
            Err(ExprError::Domain { expr, .. }) => assert_eq!(expr, "log(t - 1.0)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn derivatives() {
        assert_eq!(parse("sin(t)").unwrap().diff().eval(0.0).unwrap(), 1.0);
        assert_eq!(parse("t^3/3").unwrap().diff_n(2).eval(1.0).unwrap(), 2.0);
        let d = parse("atan(t)").unwrap().diff().eval(0.0).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let d = parse("atan2(t, 1 + t^2)").unwrap().diff().eval(0.3).unwrap();
        let f = |t: f64| t.atan2(1.0 + t * t);
        let fd = (f(0.3 + 1e-6) - f(0.3 - 1e-6)) / 2e-6;
        assert!((d - fd).abs() < 1e-8);
    }

    #[test]
    fn integer_powers_do_not_use_logarithms() {
        let d = parse("t^3").unwrap().diff();
        assert_eq!(d.eval(-2.0).unwrap(), 12.0);
        assert!(!d.to_string().contains("log"));
    }

    #[test]
    fn nonsmooth_flag() {
        let d = parse("abs(t)").unwrap().diff();
        assert!(d.check_smooth_at(1.0).is_ok());
        assert!(matches!(d.check_smooth_at(0.0), Err(ExprError::NonSmooth { .. })));
        assert!(matches!(
            parse("abs(t)").unwrap().taylor(0.0, 2),
            Err(ExprError::NonSmooth { .. })
        ));
    }

    #[test]
    fn print_round_trip() {
        for s in [
            "-t^2",
            "(t+1)*(t-1)/(2-t)",
            "2^-t",
            "-(t - 3)^2",
            "atan2(-1, t) + -3",
            "t - (t - t)",
        ] {
            let e = parse(s).unwrap();
            let printed = e.to_string();
            let back = parse(&printed).unwrap();
            for t in [0.3, 1.7, -0.4] {
                assert_eq!(e.eval(t).unwrap(), back.eval(t).unwrap(), "{s} -> {printed}");
            }
        }
    }

    #[test]
    fn taylor_matches_repeated_diff() {
        let sources = [
            "t*sqrt(1+t^2)",
            "atan2(-1, t^2) + exp(sin(t))",
            "log(2 + cos(t))/(3 + t^3)",
            "tan(t/3)^2 - atan(t)",
            "(1+t^2)^1.5",
            "2^t",
        ];
        for s in sources {
            let e = parse(s).unwrap();
            let jets = e.derivatives(0.4, 4).unwrap();
            for (k, jv) in jets.iter().enumerate() {
                let dv = e.diff_n(k).eval(0.4).unwrap();
                assert!(
                    (jv - dv).abs() <= 1e-9 * (1.0 + dv.abs()),
                    "{s} order {k}: {jv} vs {dv}"
                );
            }
        }
    }

    #[test]
    fn taylor_of_odd_function_at_zero() {
        let d = parse("t*sqrt(1+t^2)").unwrap().derivatives(0.0, 3).unwrap();
        assert_eq!(d[0], 0.0);
        assert!((d[1] - 1.0).abs() < 1e-15);
        assert!(d[2].abs() < 1e-15);
        assert!((d[3] - 3.0).abs() < 1e-12);
    }
}
