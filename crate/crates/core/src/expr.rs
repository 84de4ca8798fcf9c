//! Test-function expressions for `g`, `h`, `f`, `u`, `v`.
//!
//! Grammar, loosest first: `+ −` (left), `* /` (left), unary `−`, `^`
//! (right). So `−2^2 = −4` and `2^−1 = 0.5`. A leading minus is either ASCII
//! `-` or U+2212.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::jet::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    Rho,
    Zr,
    Zi,
    R,
    X(u8),
}

impl Var {
    fn parse(name: &str) -> Option<Var> {
        Some(match name {
            "rho" => Var::Rho,
            "zr" => Var::Zr,
            "zi" => Var::Zi,
            "R" => Var::R,
            "x1" => Var::X(1),
            "x2" => Var::X(2),
            "x3" => Var::X(3),
            "x4" => Var::X(4),
            _ => return None,
        })
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Rho => write!(f, "rho"),
            Var::Zr => write!(f, "zr"),
            Var::Zi => write!(f, "zi"),
            Var::R => write!(f, "R"),
            Var::X(k) => write!(f, "x{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn parse(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn prec(&self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Parsed test function.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFnExpr {
    Num(f64),
    Var(Var),
    Neg(Box<TestFnExpr>),
    Bin(BinOp, Box<TestFnExpr>, Box<TestFnExpr>),
    Call(Func, Box<TestFnExpr>),
}

const NEG_PREC: u8 = 3;
const ATOM_PREC: u8 = 5;

impl TestFnExpr {
    fn prec(&self) -> u8 {
        match self {
            TestFnExpr::Bin(op, ..) => op.prec(),
            TestFnExpr::Neg(_) => NEG_PREC,
            _ => ATOM_PREC,
        }
    }

    /// Variables in first-use order, without repeats.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            TestFnExpr::Num(_) => {}
            TestFnExpr::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            TestFnExpr::Neg(a) | TestFnExpr::Call(_, a) => a.collect_vars(out),
            TestFnExpr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Evaluate with a variable lookup.
    pub fn eval(&self, lookup: &dyn Fn(Var) -> Result<Jet>, like: &Jet) -> Result<Jet> {
        Ok(match self {
            TestFnExpr::Num(c) => like.scale(0.0).add_scalar(*c),
            TestFnExpr::Var(v) => lookup(*v)?,
            TestFnExpr::Neg(a) => -a.eval(lookup, like)?,
            TestFnExpr::Call(f, a) => {
                let x = a.eval(lookup, like)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => x.ln()?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt()?,
                }
            }
            TestFnExpr::Bin(op, a, b) => {
                let x = a.eval(lookup, like)?;
                if let (BinOp::Pow, TestFnExpr::Num(k)) = (op, b.as_ref()) {
                    return pow_const(&x, *k);
                }
                let y = b.eval(lookup, like)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x.div_jet(&y)?,
                    BinOp::Pow => {
                        if y.is_constant() {
                            pow_const(&x, y.value().re)?
                        } else {
                            (x.ln()? * y).exp()
                        }
                    }
                }
            }
        })
    }
}

fn pow_const(x: &Jet, k: f64) -> Result<Jet> {
    if k.fract() == 0.0 && k.abs() <= 64.0 {
        let n = k as i32;
        return if n >= 0 { Ok(x.powi(n)) } else { x.powi(-n).recip() };
    }
    x.powf(k)
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &TestFnExpr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for TestFnExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFnExpr::Num(c) => write!(f, "{c}"),
            TestFnExpr::Var(v) => write!(f, "{v}"),
            TestFnExpr::Call(func, a) => write!(f, "{}({a})", func.name()),
            TestFnExpr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, a.prec() < NEG_PREC)
            }
            TestFnExpr::Bin(op, a, b) => {
                let p = op.prec();
                if *op == BinOp::Pow {
                    write_child(f, a, a.prec() <= p)?;
                    write!(f, "^")?;
                    write_child(f, b, b.prec() < NEG_PREC)
                } else {
                    write_child(f, a, a.prec() < p)?;
                    write!(f, "{}", op.symbol())?;
                    write_child(f, b, b.prec() <= p)
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset,
            message: message.into(),
        })
    }

    /// Consume one of `chars` after whitespace.
    fn eat(&mut self, chars: &[char]) -> Option<char> {
        self.skip_ws();
        match self.peek() {
            Some(c) if chars.contains(&c) => {
                self.pos += c.len_utf8();
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<TestFnExpr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat(&['+', '-', '−']) {
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            let rhs = self.term()?;
            lhs = TestFnExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<TestFnExpr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat(&['*', '/']) {
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            let rhs = self.unary()?;
            lhs = TestFnExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<TestFnExpr> {
        if self.eat(&['-', '−']).is_some() {
            return Ok(TestFnExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<TestFnExpr> {
        let base = self.atom()?;
        if self.eat(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(TestFnExpr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<TestFnExpr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => self.err(start, "unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.eat(&[')']).is_none() {
                    return self.err(self.pos, "expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.identifier(),
            Some(c) => self.err(start, format!("unexpected `{c}`")),
        }
    }

    fn number(&mut self) -> Result<TestFnExpr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = end;
                Ok(TestFnExpr::Num(v))
            }
            _ => self.err(start, format!("invalid number `{text}`")),
        }
    }

    fn identifier(&mut self) -> Result<TestFnExpr> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let name = &self.src[start..self.pos];
        if let Some(func) = Func::parse(name) {
            if self.eat(&['(']).is_none() {
                return Err(Error::Arity {
                    name: name.into(),
                    found: 0,
                    offset: start,
                });
            }
            let mut args = vec![self.expr()?];
            while self.eat(&[',']).is_some() {
                args.push(self.expr()?);
            }
            if self.eat(&[')']).is_none() {
                return self.err(self.pos, "expected `)`");
            }
            if args.len() != 1 {
                return Err(Error::Arity {
                    name: name.into(),
                    found: args.len(),
                    offset: start,
                });
            }
            return Ok(TestFnExpr::Call(func, Box::new(args.remove(0))));
        }
        if let Some(v) = Var::parse(name) {
            self.skip_ws();
            if self.peek() == Some('(') {
                return self.err(self.pos, format!("variable `{name}` cannot be called"));
            }
            return Ok(TestFnExpr::Var(v));
        }
        Err(Error::UnknownIdentifier {
            name: name.into(),
            offset: start,
        })
    }
}

pub fn parse_testfn(src: &str) -> Result<TestFnExpr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return p.err(p.pos, "unexpected trailing input");
    }
    Ok(e)
}

/// Which function an expression defines, and so which variables it may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// `g(ζ)` on `[Re ζ, Im ζ]`: `zr`, `zi`.
    G,
    /// `h` on `N` at `[x1, x2, x3, x4]`: `x1..x4`, `rho`.
    H,
    /// A profile of the fiber norm at `[R]`: `R`.
    Profile,
    /// `u`, `v` on a one-dimensional base at `[Re z, Im z]`: `zr`, `zi`.
    Base,
    /// A radial profile at `[ρ]`: `rho`.
    Radial,
}

impl Role {
    fn lookup(&self, v: Var, x: &[Jet]) -> Option<Jet> {
        match (self, v) {
            (Role::G | Role::Base, Var::Zr) => Some(x[0].clone()),
            (Role::G | Role::Base, Var::Zi) => Some(x[1].clone()),
            (Role::H, Var::X(k)) => Some(x[k as usize - 1].clone()),
            (Role::H, Var::Rho) => x[..4].iter().map(|a| a * a).reduce(|a, b| a + b),
            (Role::Profile, Var::R) | (Role::Radial, Var::Rho) => Some(x[0].clone()),
            _ => None,
        }
    }

    fn allows(&self, v: Var) -> bool {
        matches!(
            (self, v),
            (Role::G | Role::Base, Var::Zr | Var::Zi)
                | (Role::H, Var::X(_) | Var::Rho)
                | (Role::Profile, Var::R)
                | (Role::Radial, Var::Rho)
        )
    }

    pub fn arity(&self) -> usize {
        match self {
            Role::G | Role::Base => 2,
            Role::H => 4,
            Role::Profile | Role::Radial => 1,
        }
    }
}

/// Bind an expression to a role.
pub fn compile(expr: &TestFnExpr, role: Role) -> Result<ScalarField> {
    if let Some(v) = expr.variables().into_iter().find(|v| !role.allows(*v)) {
        return Err(Error::UnboundVariable(format!("`{v}` is not available for {role:?}")));
    }
    let e = expr.clone();
    Ok(ScalarField::new(expr.to_string(), move |x: &[Jet]| {
        if x.len() != role.arity() {
            return Err(Error::ChartMismatch(format!("{role:?} expects {} inputs", role.arity())));
        }
        let lookup = |v: Var| {
            role.lookup(v, x)
                .ok_or_else(|| Error::UnboundVariable(v.to_string()))
        };
        e.eval(&lookup, &x[0])
    }))
}

pub fn compile_str(src: &str, role: Role) -> Result<ScalarField> {
    compile(&parse_testfn(src)?, role)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;
    use proptest::prelude::*;

    fn eval_num(src: &str) -> f64 {
        let f = compile_str(src, Role::Radial).unwrap();
        let sp = JetSpace::shared(1, 0);
        f.eval(&[Jet::constant(&sp, 2.0)]).unwrap().re()
    }

    #[test]
    fn precedence() {
        assert_eq!(eval_num("-2^2"), -4.0);
        assert_eq!(eval_num("2^3^2"), 512.0);
        assert_eq!(eval_num("2^-1"), 0.5);
        assert_eq!(eval_num("1 - 2 - 3"), -4.0);
        assert_eq!(eval_num("8/4/2"), 1.0);
        assert_eq!(eval_num("1 + 2*3"), 7.0);
        assert_eq!(eval_num("−rho + 1"), -1.0);
    }

    #[test]
    fn reference_expressions() {
        let g = parse_testfn("0.5*log(0.5)").unwrap();
        assert!(g.variables().is_empty());
        let h = compile_str("-1.5*log(rho)", Role::H).unwrap();
        let sp = JetSpace::shared(4, 1);
        let x = Jet::coordinates(&sp, &[1.0, 0.5, -0.3, 0.2]);
        let rho: f64 = 1.0 + 0.25 + 0.09 + 0.04;
        let v = h.eval(&x).unwrap();
        assert!((v.re() + 1.5 * rho.ln()).abs() < 1e-15);
        // ∂h/∂x1 = −3/(2ρ) · 2x1
        assert!((v.partial_value(&[0]).unwrap().re + 3.0 / rho).abs() < 1e-14);
    }

    #[test]
    fn errors_carry_offsets() {
        assert!(matches!(parse_testfn("log("), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse_testfn("1 + foo"), Err(Error::UnknownIdentifier { offset: 4, .. })));
        assert!(matches!(parse_testfn("exp(1, 2)"), Err(Error::Arity { found: 2, offset: 0, .. })));
        assert!(matches!(parse_testfn("2 * sin"), Err(Error::Arity { found: 0, offset: 4, .. })));
        assert!(matches!(parse_testfn("(1 + 2"), Err(Error::Syntax { offset: 6, .. })));
        assert!(matches!(parse_testfn("1 2"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(compile_str("zr + rho", Role::G), Err(Error::UnboundVariable(_))));
    }

    #[test]
    fn domain_violations_surface() {
        let f = compile_str("log(R - 5)", Role::Profile).unwrap();
        let sp = JetSpace::shared(1, 0);
        assert!(matches!(f.eval(&[Jet::constant(&sp, 1.0)]), Err(Error::DomainViolation(_))));
    }

    fn arb_expr() -> impl Strategy<Value = TestFnExpr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(TestFnExpr::Num),
            prop::sample::select(vec![Var::Rho, Var::Zr, Var::R, Var::X(3)]).prop_map(TestFnExpr::Var),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| TestFnExpr::Neg(Box::new(a))),
                (
                    prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]),
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, a, b)| TestFnExpr::Bin(op, Box::new(a), Box::new(b))),
                (
                    prop::sample::select(vec![Func::Exp, Func::Log, Func::Sin, Func::Cos, Func::Sqrt]),
                    inner
                )
                    .prop_map(|(f, a)| TestFnExpr::Call(f, Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trips(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse_testfn(&printed).unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(back.to_string(), printed);
        }
    }
}
