//! The ε-expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | atom ['^' exponent]
//! atom   := number | 'eps' | param | '(' expr ')' | ('log'|'exp'|'sin'|'-') '(' expr ')'
//! exponent := integer | '(' ['-'] integer ['/' integer] ')'
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EpsExpr {
    /// Nonnegative decimal literal, kept verbatim.
    Num(String),
    Eps,
    Param(String),
    Neg(Box<EpsExpr>),
    Log(Box<EpsExpr>),
    Exp(Box<EpsExpr>),
    Sin(Box<EpsExpr>),
    Add(Box<EpsExpr>, Box<EpsExpr>),
    Sub(Box<EpsExpr>, Box<EpsExpr>),
    Mul(Box<EpsExpr>, Box<EpsExpr>),
    Div(Box<EpsExpr>, Box<EpsExpr>),
    /// Power with exponent p/q, q > 0 and gcd(p, q) = 1.
    Pow(Box<EpsExpr>, i64, i64),
}

/// Named constants that expressions may reference.
pub type Params = BTreeMap<String, EpsExpr>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut k = i + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    i = k;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push((start, Tok::Num(chars[start..i].iter().collect())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    known: &'a dyn Fn(&str) -> bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<EpsExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = EpsExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = EpsExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<EpsExpr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = EpsExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = EpsExpr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<EpsExpr> {
        let neg_call =
            self.peek() == Some(&Tok::Op('-')) && self.toks.get(self.pos + 1).map(|t| &t.1) == Some(&Tok::Op('('));
        if !neg_call && self.eat('-') {
            return Ok(EpsExpr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let (p, q) = self.exponent()?;
            return Ok(EpsExpr::Pow(Box::new(base), p, q));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) if s.chars().all(|c| c.is_ascii_digit()) => {
                self.pos += 1;
                s.parse().or_else(|_| self.err("exponent too large"))
            }
            _ => self.err("expected an integer exponent"),
        }
    }

    fn exponent(&mut self) -> Result<(i64, i64)> {
        if self.eat('(') {
            let sign = if self.eat('-') { -1 } else { 1 };
            let p = self.integer()?;
            let q = if self.eat('/') { self.integer()? } else { 1 };
            self.expect(')')?;
            if q == 0 {
                return self.err("zero denominator in exponent");
            }
            let g = gcd(p, q);
            Ok((sign * p / g, q / g))
        } else {
            Ok((self.integer()?, 1))
        }
    }

    fn atom(&mut self) -> Result<EpsExpr> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(EpsExpr::Num(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(EpsExpr::Neg(Box::new(e)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "eps" => return Ok(EpsExpr::Eps),
                    "log" => EpsExpr::Log,
                    "exp" => EpsExpr::Exp,
                    "sin" => EpsExpr::Sin,
                    _ => {
                        if (self.known)(&name) {
                            return Ok(EpsExpr::Param(name));
                        }
                        return Err(Error::UnknownIdentifier(name));
                    }
                };
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(func(Box::new(e)))
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Parse with no parameters allowed.
pub fn parse_weight_expr(text: &str) -> Result<EpsExpr> {
    parse_with_params(text, &|_| false)
}

/// Parse, accepting identifiers for which `known` returns true as parameters.
pub fn parse_with_params(text: &str, known: &dyn Fn(&str) -> bool) -> Result<EpsExpr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), known };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl EpsExpr {
    fn prec(&self) -> u8 {
        match self {
            EpsExpr::Add(..) | EpsExpr::Sub(..) => 1,
            EpsExpr::Mul(..) | EpsExpr::Div(..) => 2,
            EpsExpr::Pow(..) => 3,
            _ => 4,
        }
    }

    pub fn mentions_eps(&self) -> bool {
        self.any(&|e| matches!(e, EpsExpr::Eps))
    }

    pub fn mentions_sin(&self) -> bool {
        self.any(&|e| matches!(e, EpsExpr::Sin(_)))
    }

    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let EpsExpr::Param(p) = e {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
        out
    }

    fn any(&self, f: &dyn Fn(&EpsExpr) -> bool) -> bool {
        let mut hit = false;
        self.walk(&mut |e| hit |= f(e));
        hit
    }

    fn walk(&self, f: &mut dyn FnMut(&EpsExpr)) {
        f(self);
        match self {
            EpsExpr::Num(_) | EpsExpr::Eps | EpsExpr::Param(_) => {}
            EpsExpr::Neg(a) | EpsExpr::Log(a) | EpsExpr::Exp(a) | EpsExpr::Sin(a) | EpsExpr::Pow(a, ..) => a.walk(f),
            EpsExpr::Add(a, b) | EpsExpr::Sub(a, b) | EpsExpr::Mul(a, b) | EpsExpr::Div(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    /// Evaluate at `eps`. Parameters are looked up in `params` and evaluated
    /// recursively (they may not mention `eps`).
    pub fn eval<T: Real>(&self, eps: &T, params: &Params) -> Result<T> {
        let v = self.eval_raw(eps, params, 0)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { expr: self.to_string() })
        }
    }

    fn eval_raw<T: Real>(&self, eps: &T, params: &Params, depth: usize) -> Result<T> {
        if depth > 64 {
            return Err(Error::Domain("parameter definitions are cyclic".into()));
        }
        let check =
            |v: T, e: &EpsExpr| if v.is_finite() { Ok(v) } else { Err(Error::NonFinite { expr: e.to_string() }) };
        let r = |e: &EpsExpr| e.eval_raw(eps, params, depth);
        let v = match self {
            EpsExpr::Num(s) => {
                T::parse_decimal(s).ok_or_else(|| Error::Syntax { pos: 0, msg: format!("bad number {s}") })?
            }
            EpsExpr::Eps => eps.clone(),
            EpsExpr::Param(p) => {
                let def = params.get(p).ok_or_else(|| Error::UnknownIdentifier(p.clone()))?;
                def.eval_raw(eps, params, depth + 1)?
            }
            EpsExpr::Neg(a) => -r(a)?,
            EpsExpr::Log(a) => {
                let x = r(a)?;
                if x <= T::zero() {
                    return Err(Error::NonFinite { expr: self.to_string() });
                }
                x.ln()
            }
            EpsExpr::Exp(a) => r(a)?.exp(),
            EpsExpr::Sin(a) => r(a)?.sin(),
            EpsExpr::Add(a, b) => r(a)? + r(b)?,
            EpsExpr::Sub(a, b) => r(a)? - r(b)?,
            EpsExpr::Mul(a, b) => r(a)? * r(b)?,
            EpsExpr::Div(a, b) => {
                let d = r(b)?;
                if d.is_zero() {
                    return Err(Error::NonFinite { expr: self.to_string() });
                }
                r(a)? / d
            }
            EpsExpr::Pow(a, p, q) => {
                let x = r(a)?;
                if *q == 1 {
                    x.powi(*p as i32)
                } else if x > T::zero() {
                    x.powf(&T::from_ratio(*p, *q))
                } else if x.is_zero() && *p > 0 {
                    T::zero()
                } else if q % 2 == 1 && x < T::zero() {
                    let m = x.abs().powf(&T::from_ratio(*p, *q));
                    if p % 2 == 0 {
                        m
                    } else {
                        -m
                    }
                } else {
                    return Err(Error::NonFinite { expr: self.to_string() });
                }
            }
        };
        check(v, self)
    }
}

impl fmt::Display for EpsExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &EpsExpr, need: bool| -> fmt::Result {
            if need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            EpsExpr::Num(s) => write!(f, "{s}"),
            EpsExpr::Eps => write!(f, "eps"),
            EpsExpr::Param(p) => write!(f, "{p}"),
            EpsExpr::Neg(a) => write!(f, "-({a})"),
            EpsExpr::Log(a) => write!(f, "log({a})"),
            EpsExpr::Exp(a) => write!(f, "exp({a})"),
            EpsExpr::Sin(a) => write!(f, "sin({a})"),
            EpsExpr::Add(a, b) | EpsExpr::Sub(a, b) | EpsExpr::Mul(a, b) | EpsExpr::Div(a, b) => {
                let (op, p) = match self {
                    EpsExpr::Add(..) => ('+', 1),
                    EpsExpr::Sub(..) => ('-', 1),
                    EpsExpr::Mul(..) => ('*', 2),
                    _ => ('/', 2),
                };
                wrap(f, a, a.prec() < p)?;
                write!(f, " {op} ")?;
                wrap(f, b, b.prec() <= p)
            }
            EpsExpr::Pow(a, p, q) => {
                wrap(f, a, a.prec() <= 3)?;
                if *q == 1 && *p >= 0 {
                    write!(f, "^{p}")
                } else if *q == 1 {
                    write!(f, "^({p})")
                } else {
                    write!(f, "^({p}/{q})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Mp;

    fn p(s: &str) -> EpsExpr {
        parse_weight_expr(s).unwrap()
    }

    #[test]
    fn parses_log_eps() {
        assert_eq!(p("log(eps)"), EpsExpr::Log(Box::new(EpsExpr::Eps)));
    }

    #[test]
    fn parses_oscillating_weight() {
        let e = p("(sin(1/eps)/3+1)*log(eps)");
        let sin = EpsExpr::Sin(Box::new(EpsExpr::Div(Box::new(EpsExpr::Num("1".into())), Box::new(EpsExpr::Eps))));
        let inner = EpsExpr::Add(
            Box::new(EpsExpr::Div(Box::new(sin), Box::new(EpsExpr::Num("3".into())))),
            Box::new(EpsExpr::Num("1".into())),
        );
        assert_eq!(e, EpsExpr::Mul(Box::new(inner), Box::new(EpsExpr::Log(Box::new(EpsExpr::Eps)))));
    }

    #[test]
    fn parses_shifted_log() {
        let e = p("log(11/10*eps+2)");
        let v: f64 = e.eval(&0.1, &Params::new()).unwrap();
        assert!((v - 2.11f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn evaluation_examples() {
        let none = Params::new();
        assert_eq!(p("log(eps)").eval(&1.0, &none).unwrap(), 0.0);
        let v: f64 = p("4*log(eps)").eval(&0.1, &none).unwrap();
        assert!((v - (-9.210340371976184)).abs() < 1e-14);
        let v: f64 = p("sin(1/eps)").eval(&(2.0 / std::f64::consts::PI), &none).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_names_subexpression() {
        let err = p("2 + log(eps - eps)").eval(&0.5f64, &Params::new()).unwrap_err();
        assert_eq!(err, Error::NonFinite { expr: "log(eps - eps)".into() });
    }

    #[test]
    fn syntax_error_reports_position() {
        match parse_weight_expr("log(eps +)") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_weight_expr("foo(eps)"), Err(Error::UnknownIdentifier(_))));
    }

    #[test]
    fn params_and_rational_powers() {
        let mut params = Params::new();
        params.insert("s".into(), p("7/9"));
        let e = parse_with_params("eps^((1+s)/2)", &|n| n == "s");
        assert!(e.is_err(), "exponents are literal rationals only");
        let e = parse_with_params("s*log(eps)", &|n| n == "s").unwrap();
        let v: f64 = e.eval(&0.5, &params).unwrap();
        assert!((v - 7.0 / 9.0 * 0.5f64.ln()).abs() < 1e-15);
        let e = p("eps^(5/2) + eps^(-1) + eps^2");
        let v: f64 = e.eval(&4.0, &Params::new()).unwrap();
        assert!((v - (32.0 + 0.25 + 16.0)).abs() < 1e-12);
    }

    #[test]
    fn mp_evaluation_uses_exact_decimals() {
        let v: Mp = p("11/10*eps").eval(&Mp::parse_decimal("1e-3").unwrap(), &Params::new()).unwrap();
        let want = Mp::parse_decimal("0.0011").unwrap();
        assert!((v - want).abs().to_f64() < 1e-70);
    }

    #[test]
    fn printer_round_trip_examples() {
        for s in [
            "1 - (2 - 3)",
            "-(eps)^2",
            "-(eps^2)",
            "2 / (3 * eps)",
            "(1 + eps)^(-3/2)",
            "exp(-(log(eps)))",
            "- eps * 3",
        ] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} -> {e}");
        }
    }
}
