//! Symbolic expression trees over the domain variables `x1 … xn`, with exact
//! differentiation and a small prefix-notation parser.
//!
//! The node set is deliberately small: constants, variables, the four
//! arithmetic operations, real powers with a constant exponent, and the
//! elementary functions sin, cos, exp, sinh, cosh, log. That is enough to
//! express every catalog map, its derivatives, and unit normal fields.
//!
//! # Grammar
//!
//! ```text
//! expr   := number | var | '(' head expr… ')'
//! var    := 'x' digits                       (1-based: x1, x2, …)
//! head   := '+' | '-' | '*' | '/'            (binary; '-' also unary)
//!         | 'pow'                            (pow <expr> <number>)
//!         | 'neg' | 'sin' | 'cos' | 'exp' | 'sinh' | 'cosh' | 'log'
//! ```
//!
//! Example: `(- (cos x1) (cos x2))`.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    /// Real power with constant exponent; non-integer exponents are
    /// domain-restricted to positive bases.
    Pow(Arc<Expr>, f64),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Exp(Arc<Expr>),
    Sinh(Arc<Expr>),
    Cosh(Arc<Expr>),
    Log(Arc<Expr>),
}

use Expr::*;

impl Expr {
    pub fn constant(v: f64) -> Arc<Expr> {
        Arc::new(Const(v))
    }

    /// Variable by 0-based index.
    pub fn var(i: usize) -> Arc<Expr> {
        Arc::new(Var(i))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Const(v) => Some(*v),
            _ => None,
        }
    }

    /// Evaluate at a point. Division by zero, `log` of a non-positive value,
    /// fractional powers of negative bases and non-finite results are domain
    /// errors.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = match self {
            Const(c) => *c,
            Var(i) => {
                if *i >= x.len() {
                    return Err(Error::Domain(format!(
                        "variable x{} out of range for a {}-dimensional point",
                        i + 1,
                        x.len()
                    )));
                }
                x[*i]
            }
            Add(a, b) => a.eval(x)? + b.eval(x)?,
            Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Div(a, b) => {
                let den = b.eval(x)?;
                if den == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval(x)? / den
            }
            Pow(a, e) => {
                let base = a.eval(x)?;
                if *e == e.round() && e.abs() < 64.0 {
                    if base == 0.0 && *e < 0.0 {
                        return Err(Error::Domain("zero raised to a negative power".into()));
                    }
                    base.powi(*e as i32)
                } else {
                    if base < 0.0 {
                        return Err(Error::Domain(
                            "fractional power of a negative base".into(),
                        ));
                    }
                    if base == 0.0 && *e < 0.0 {
                        return Err(Error::Domain("zero raised to a negative power".into()));
                    }
                    base.powf(*e)
                }
            }
            Sin(a) => a.eval(x)?.sin(),
            Cos(a) => a.eval(x)?.cos(),
            Exp(a) => a.eval(x)?.exp(),
            Sinh(a) => a.eval(x)?.sinh(),
            Cosh(a) => a.eval(x)?.cosh(),
            Log(a) => {
                let v = a.eval(x)?;
                if v <= 0.0 {
                    return Err(Error::Domain("log of a non-positive value".into()));
                }
                v.ln()
            }
        };
        if !v.is_finite() {
            return Err(Error::Domain("expression evaluated to a non-finite value".into()));
        }
        Ok(v)
    }

    /// Exact partial derivative with respect to variable `i` (0-based).
    pub fn diff(self: &Arc<Expr>, i: usize) -> Arc<Expr> {
        match self.as_ref() {
            Const(_) => Expr::constant(0.0),
            Var(j) => Expr::constant(if *j == i { 1.0 } else { 0.0 }),
            Add(a, b) => add(a.diff(i), b.diff(i)),
            Sub(a, b) => sub(a.diff(i), b.diff(i)),
            Mul(a, b) => add(mul(a.diff(i), b.clone()), mul(a.clone(), b.diff(i))),
            Div(a, b) => {
                let num = sub(mul(a.diff(i), b.clone()), mul(a.clone(), b.diff(i)));
                div(num, pow(b.clone(), 2.0))
            }
            Pow(a, e) => {
                // d(a^e) = e·a^(e-1)·a'
                mul(mul(Expr::constant(*e), pow(a.clone(), e - 1.0)), a.diff(i))
            }
            Sin(a) => mul(Arc::new(Cos(a.clone())), a.diff(i)),
            Cos(a) => mul(Expr::constant(-1.0), mul(Arc::new(Sin(a.clone())), a.diff(i))),
            Exp(a) => mul(Arc::new(Exp(a.clone())), a.diff(i)),
            Sinh(a) => mul(Arc::new(Cosh(a.clone())), a.diff(i)),
            Cosh(a) => mul(Arc::new(Sinh(a.clone())), a.diff(i)),
            Log(a) => div(a.diff(i), a.clone()),
        }
    }

    /// Substitute each variable `xk` by `replacements[k]`.
    pub fn substitute(self: &Arc<Expr>, replacements: &[Arc<Expr>]) -> Arc<Expr> {
        match self.as_ref() {
            Const(_) => self.clone(),
            Var(j) => replacements[*j].clone(),
            Add(a, b) => add(a.substitute(replacements), b.substitute(replacements)),
            Sub(a, b) => sub(a.substitute(replacements), b.substitute(replacements)),
            Mul(a, b) => mul(a.substitute(replacements), b.substitute(replacements)),
            Div(a, b) => div(a.substitute(replacements), b.substitute(replacements)),
            Pow(a, e) => pow(a.substitute(replacements), *e),
            Sin(a) => Arc::new(Sin(a.substitute(replacements))),
            Cos(a) => Arc::new(Cos(a.substitute(replacements))),
            Exp(a) => Arc::new(Exp(a.substitute(replacements))),
            Sinh(a) => Arc::new(Sinh(a.substitute(replacements))),
            Cosh(a) => Arc::new(Cosh(a.substitute(replacements))),
            Log(a) => Arc::new(Log(a.substitute(replacements))),
        }
    }

    /// Render in the prefix syntax accepted by [`parse`].
    pub fn to_prefix(&self) -> String {
        let mut s = String::new();
        self.write_prefix(&mut s);
        s
    }

    fn write_prefix(&self, out: &mut String) {
        match self {
            Const(v) => out.push_str(&format_number(*v)),
            Var(i) => out.push_str(&format!("x{}", i + 1)),
            Add(a, b) => write_binary(out, "+", a, b),
            Sub(a, b) => write_binary(out, "-", a, b),
            Mul(a, b) => write_binary(out, "*", a, b),
            Div(a, b) => write_binary(out, "/", a, b),
            Pow(a, e) => {
                out.push_str("(pow ");
                a.write_prefix(out);
                out.push(' ');
                out.push_str(&format_number(*e));
                out.push(')');
            }
            Sin(a) => write_unary(out, "sin", a),
            Cos(a) => write_unary(out, "cos", a),
            Exp(a) => write_unary(out, "exp", a),
            Sinh(a) => write_unary(out, "sinh", a),
            Cosh(a) => write_unary(out, "cosh", a),
            Log(a) => write_unary(out, "log", a),
        }
    }
}

fn format_number(v: f64) -> String {
    // Round-trippable literal.
    let s = format!("{}", v);
    if s.parse::<f64>() == Ok(v) {
        s
    } else {
        format!("{:?}", v)
    }
}

fn write_binary(out: &mut String, op: &str, a: &Expr, b: &Expr) {
    out.push('(');
    out.push_str(op);
    out.push(' ');
    a.write_prefix(out);
    out.push(' ');
    b.write_prefix(out);
    out.push(')');
}

fn write_unary(out: &mut String, op: &str, a: &Expr) {
    out.push('(');
    out.push_str(op);
    out.push(' ');
    a.write_prefix(out);
    out.push(')');
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_prefix())
    }
}

// Smart constructors with light inline simplification. Without these,
// second derivatives of catalog maps blow up in size.

pub fn add(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Arc::new(Add(a, b)),
    }
}

pub fn sub(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x - y),
        (_, Some(0.0)) => a,
        _ => Arc::new(Sub(a, b)),
    }
}

pub fn mul(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::constant(x * y),
        (Some(0.0), _) | (_, Some(0.0)) => Expr::constant(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        _ => Arc::new(Mul(a, b)),
    }
}

pub fn div(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    if let Some(0.0) = a.as_const() {
        return Expr::constant(0.0);
    }
    if let Some(1.0) = b.as_const() {
        return a;
    }
    Arc::new(Div(a, b))
}

pub fn pow(a: Arc<Expr>, e: f64) -> Arc<Expr> {
    if e == 0.0 {
        return Expr::constant(1.0);
    }
    if e == 1.0 {
        return a;
    }
    if let Some(v) = a.as_const() {
        if v > 0.0 || (e == e.round() && e.abs() < 64.0) {
            return Expr::constant(if e == e.round() { v.powi(e as i32) } else { v.powf(e) });
        }
    }
    Arc::new(Pow(a, e))
}

pub fn sin(a: Arc<Expr>) -> Arc<Expr> {
    Arc::new(Sin(a))
}
pub fn cos(a: Arc<Expr>) -> Arc<Expr> {
    Arc::new(Cos(a))
}
pub fn exp(a: Arc<Expr>) -> Arc<Expr> {
    Arc::new(Exp(a))
}
pub fn sinh(a: Arc<Expr>) -> Arc<Expr> {
    Arc::new(Sinh(a))
}
pub fn cosh(a: Arc<Expr>) -> Arc<Expr> {
    Arc::new(Cosh(a))
}
pub fn log(a: Arc<Expr>) -> Arc<Expr> {
    Arc::new(Log(a))
}
pub fn neg(a: Arc<Expr>) -> Arc<Expr> {
    mul(Expr::constant(-1.0), a)
}

/// Parse an expression in the module's prefix syntax. `max_var` bounds the
/// variable indices (`x1 … x{max_var}`).
pub fn parse(input: &str, max_var: usize) -> Result<Arc<Expr>> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let e = parse_expr(&tokens, &mut pos, max_var)?;
    if pos != tokens.len() {
        return Err(Error::Parse(format!("trailing tokens after expression in `{input}`")));
    }
    Ok(e)
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Number(f64),
    Symbol(String),
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                tokens.push(Token::Open);
                chars.next();
            }
            ')' => {
                tokens.push(Token::Close);
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '(' || c == ')' || c.is_whitespace() {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                let first = word.chars().next().unwrap();
                let numeric_start = first.is_ascii_digit()
                    || first == '.'
                    || ((first == '-' || first == '+') && word.len() > 1);
                if numeric_start {
                    match word.parse::<f64>() {
                        Ok(v) => tokens.push(Token::Number(v)),
                        Err(_) => {
                            return Err(Error::Parse(format!("bad numeric literal `{word}`")))
                        }
                    }
                } else {
                    tokens.push(Token::Symbol(word));
                }
            }
        }
    }
    Ok(tokens)
}

fn parse_expr(tokens: &[Token], pos: &mut usize, max_var: usize) -> Result<Arc<Expr>> {
    match tokens.get(*pos) {
        None => Err(Error::Parse("unexpected end of input".into())),
        Some(Token::Number(v)) => {
            *pos += 1;
            Ok(Expr::constant(*v))
        }
        Some(Token::Symbol(s)) => {
            *pos += 1;
            parse_var(s, max_var)
        }
        Some(Token::Close) => Err(Error::Parse("unexpected `)`".into())),
        Some(Token::Open) => {
            *pos += 1;
            let head = match tokens.get(*pos) {
                Some(Token::Symbol(s)) => s.clone(),
                other => {
                    return Err(Error::Parse(format!(
                        "expected operator after `(`, found {other:?}"
                    )))
                }
            };
            *pos += 1;
            let mut args = Vec::new();
            while !matches!(tokens.get(*pos), Some(Token::Close)) {
                if tokens.get(*pos).is_none() {
                    return Err(Error::Parse("missing `)`".into()));
                }
                args.push(parse_expr(tokens, pos, max_var)?);
            }
            *pos += 1; // consume ')'
            build_node(&head, args)
        }
    }
}

fn parse_var(s: &str, max_var: usize) -> Result<Arc<Expr>> {
    let idx = s
        .strip_prefix('x')
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Parse(format!("unknown symbol `{s}`")))?;
    if idx > max_var {
        return Err(Error::Parse(format!("variable `{s}` exceeds domain dimension {max_var}")));
    }
    Ok(Expr::var(idx - 1))
}

fn build_node(head: &str, args: Vec<Arc<Expr>>) -> Result<Arc<Expr>> {
    let arity_err = |want: &str| {
        Err(Error::Parse(format!("`{head}` expects {want} argument(s), got {}", args.len())))
    };
    match head {
        "+" | "*" | "/" if args.len() != 2 => arity_err("2"),
        "+" => Ok(add(args[0].clone(), args[1].clone())),
        "*" => Ok(mul(args[0].clone(), args[1].clone())),
        "/" => Ok(div(args[0].clone(), args[1].clone())),
        "-" => match args.len() {
            1 => Ok(neg(args[0].clone())),
            2 => Ok(sub(args[0].clone(), args[1].clone())),
            _ => arity_err("1 or 2"),
        },
        "pow" => {
            if args.len() != 2 {
                return arity_err("2");
            }
            let e = args[1]
                .as_const()
                .ok_or_else(|| Error::Parse("`pow` exponent must be a number literal".into()))?;
            Ok(pow(args[0].clone(), e))
        }
        "neg" | "sin" | "cos" | "exp" | "sinh" | "cosh" | "log" => {
            if args.len() != 1 {
                return arity_err("1");
            }
            let a = args[0].clone();
            Ok(match head {
                "neg" => neg(a),
                "sin" => sin(a),
                "cos" => cos(a),
                "exp" => exp(a),
                "sinh" => sinh(a),
                "cosh" => cosh(a),
                _ => log(a),
            })
        }
        _ => Err(Error::Parse(format!("unknown operator `{head}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_eval_roundtrip() {
        let e = parse("(- (cos x1) (cos x2))", 2).unwrap();
        let v = e.eval(&[0.3, 0.7]).unwrap();
        assert!((v - (0.3f64.cos() - 0.7f64.cos())).abs() < 1e-15);
        let back = parse(&e.to_prefix(), 2).unwrap();
        assert!((back.eval(&[0.3, 0.7]).unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse("(plus x1 x2)", 2).is_err());
        assert!(parse("(+ x1)", 2).is_err());
        assert!(parse("(+ x1 x3)", 2).is_err());
        assert!(parse("(+ x1 x2", 2).is_err());
        assert!(parse("x1 x2", 2).is_err());
        assert!(parse("(pow x1 x2)", 2).is_err());
    }

    #[test]
    fn diff_product_rule_matches_numeric() {
        let e = parse("(* (sin x1) (exp x2))", 2).unwrap();
        let dx = e.diff(0);
        let x = [0.4, -0.2];
        let h = 1e-6;
        let num = (e.eval(&[x[0] + h, x[1]]).unwrap() - e.eval(&[x[0] - h, x[1]]).unwrap())
            / (2.0 * h);
        assert!((dx.eval(&x).unwrap() - num).abs() < 1e-9);
    }

    #[test]
    fn diff_power_rule_fractional() {
        let e = pow(Expr::var(0), 4.0 / 3.0);
        let d = e.diff(0);
        let x = [1.7];
        let expect = (4.0 / 3.0) * 1.7f64.powf(1.0 / 3.0);
        assert!((d.eval(&x).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn domain_errors_propagate() {
        let e = parse("(/ 1 x1)", 1).unwrap();
        assert!(e.eval(&[0.0]).is_err());
        let l = parse("(log x1)", 1).unwrap();
        assert!(l.eval(&[-1.0]).is_err());
        let p = parse("(pow x1 0.5)", 1).unwrap();
        assert!(p.eval(&[-2.0]).is_err());
    }

    #[test]
    fn substitution_composes() {
        // f(x) = x^2 composed with x = 2t gives 4t^2.
        let f = pow(Expr::var(0), 2.0);
        let g = f.substitute(&[mul(Expr::constant(2.0), Expr::var(0))]);
        assert!((g.eval(&[3.0]).unwrap() - 36.0).abs() < 1e-14);
    }
}
