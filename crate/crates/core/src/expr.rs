//! Univariate expressions in `t`, evaluable on floats and on jets.
//!
//! Grammar: numbers, `t`, `pi`, `e`, `+ - * / ^`, parentheses, unary minus and
//! the functions `exp ln log sqrt sin cos sinh cosh`.

use std::fmt;

use crate::error::{Error, Result};
use crate::jets::{Jet, Primitive};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Primitive, Box<Expr>),
}

fn function(name: &str) -> Option<Primitive> {
    Some(match name {
        "exp" => Primitive::Exp,
        "ln" | "log" => Primitive::Ln,
        "sqrt" => Primitive::Sqrt,
        "sin" => Primitive::Sin,
        "cos" => Primitive::Cos,
        "sinh" => Primitive::Sinh,
        "cosh" => Primitive::Cosh,
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            Ok(Expr::Pow(Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "t" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    _ => {
                        let prim = function(&name).ok_or_else(|| Error::Parse(format!("unknown name `{name}`")))?;
                        if !self.eat('(') {
                            return Err(Error::Parse(format!("expected `(` after `{name}`")));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(Error::Parse("missing `)`".into()));
                        }
                        Ok(Expr::Call(prim, Box::new(arg)))
                    }
                }
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            Some(tok) => Err(Error::Parse(format!("unexpected token {tok:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{src}`")));
        }
        Ok(e)
    }

    fn constant(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Neg(a) => a.constant().map(|v| -v),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var => t,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => a.eval(t)? / b.eval(t)?,
            Expr::Pow(a, b) => a.eval(t)?.powf(b.eval(t)?),
            Expr::Call(p, a) => p.eval(a.eval(t)?)?,
        })
    }

    /// Evaluates with `t` replaced by the jet `t`.
    pub fn eval_jet(&self, t: &Jet) -> Result<Jet> {
        let n = t.dim();
        Ok(match self {
            Expr::Num(v) => Jet::constant(n, *v),
            Expr::Var => t.clone(),
            Expr::Neg(a) => -a.eval_jet(t)?,
            Expr::Add(a, b) => a.eval_jet(t)? + b.eval_jet(t)?,
            Expr::Sub(a, b) => a.eval_jet(t)? - b.eval_jet(t)?,
            Expr::Mul(a, b) => a.eval_jet(t)? * b.eval_jet(t)?,
            Expr::Div(a, b) => a.eval_jet(t)?.div(&b.eval_jet(t)?)?,
            Expr::Pow(a, b) => {
                let base = a.eval_jet(t)?;
                match b.constant() {
                    Some(p) if p >= 0.0 && p.fract() == 0.0 && p <= 64.0 => base.powi(p as u32),
                    Some(p) => base.powf(p)?,
                    None => (base.ln()? * b.eval_jet(t)?).exp()?,
                }
            }
            Expr::Call(p, a) => a.eval_jet(t)?.compose(*p)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "t"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(p, a) => write!(f, "{}({a})", p.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_unary_minus() {
        let e = Expr::parse("1 + 2*t^2 - -t").unwrap();
        assert_eq!(e.eval(3.0).unwrap(), 1.0 + 18.0 + 3.0);
        assert_eq!(Expr::parse("-t^2").unwrap().eval(2.0).unwrap(), -4.0);
        assert_eq!(Expr::parse("2^3^2").unwrap().eval(0.0).unwrap(), 512.0);
    }

    #[test]
    fn functions_and_constants() {
        let e = Expr::parse("sqrt((exp(2*t)+1)/exp(2*t))").unwrap();
        assert!((e.eval(0.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((Expr::parse("sin(pi/2)").unwrap().eval(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((Expr::parse("1.5e-1*t").unwrap().eval(2.0).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn jet_evaluation_matches_derivatives() {
        let e = Expr::parse("log(t^2 + 1)").unwrap();
        let t = Jet::variable(0, 0.0, 1).unwrap();
        let j = e.eval_jet(&t).unwrap();
        assert!((j.coeffs()[2] - 1.0).abs() < 1e-15);
        assert!((j.coeffs()[4] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1 +", "foo(t)", "sin t", "(t", "t)", "3 $ 4", "x"] {
            assert!(matches!(Expr::parse(bad), Err(Error::Parse(_))), "{bad}");
        }
    }
}
