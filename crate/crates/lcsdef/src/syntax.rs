//! Text syntax for scalars and forms, inverse to the canonical printers.
//!
//! Accepted: rational literals, `pi`/`π`, `I`, coordinate names, covectors `dq1`,
//! `sin(…)`/`cos(…)` of `2π·(integer combination of torus coordinates)`, the
//! products `*`, `·`, `^`, `∧` and juxtaposition, `/` by constants, and integer
//! powers written `^n` or with superscript digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::forms::DifferentialForm;
use crate::ring::{CoordKind, CoordinateRoster, FourierScalar, Gq, PiPolynomial, RingError};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Pi,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Wedge,
    LParen,
    RParen,
    Sup(u32),
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> RingError {
    RingError::Parse { line, col, msg: msg.into() }
}

fn sup_digit(c: char) -> Option<u32> {
    "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c).map(|p| p as u32)
}

fn lex(src: &str) -> Result<Vec<Spanned>, RingError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                adv = j - i;
                Some(Tok::Num(s.parse().map_err(|_| err(l0, c0, "bad number"))?))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                adv = j - i;
                Some(if s == "pi" { Tok::Pi } else { Tok::Ident(s) })
            }
            'π' => Some(Tok::Pi),
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '∧' => Some(Tok::Wedge),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            c if sup_digit(c).is_some() => {
                let mut j = i;
                let mut v = 0u32;
                while j < chars.len() {
                    match sup_digit(chars[j]) {
                        Some(d) => v = v * 10 + d,
                        None => break,
                    }
                    j += 1;
                }
                adv = j - i;
                Some(Tok::Sup(v))
            }
            _ => return Err(err(l0, c0, format!("unexpected character `{}`", c))),
        };
        if let Some(tok) = tok {
            out.push(Spanned { tok, line: l0, col: c0 });
        }
        i += adv;
        col += adv;
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(BigInt),
    Pi,
    Imag,
    Var(usize, (usize, usize)),
    Cov(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, (usize, usize)),
    Pow(Box<Expr>, u32),
    Trig(bool, Box<Expr>, (usize, usize)),
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    roster: &'a CoordinateRoster,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].line, self.toks[self.pos].col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, RingError> {
        let (l, c) = self.here();
        Err(err(l, c, msg))
    }

    fn expr(&mut self) -> Result<Expr, RingError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn starts_atom(t: &Tok) -> bool {
        matches!(t, Tok::Num(_) | Tok::Ident(_) | Tok::Pi | Tok::LParen)
    }

    fn term(&mut self) -> Result<Expr, RingError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star | Tok::Wedge | Tok::Caret => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let at = self.here();
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), at);
                }
                t if Self::starts_atom(t) => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, RingError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if *self.peek() == Tok::Plus {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, RingError> {
        let base = self.atom()?;
        match (self.peek().clone(), self.peek2().clone()) {
            (Tok::Sup(n), _) => {
                self.bump();
                Ok(Expr::Pow(Box::new(base), n))
            }
            (Tok::Caret, Tok::Num(n)) => {
                self.bump();
                self.bump();
                let n = n.to_u32().ok_or_else(|| err(self.here().0, self.here().1, "exponent too large"))?;
                Ok(Expr::Pow(Box::new(base), n))
            }
            _ => Ok(base),
        }
    }

    fn atom(&mut self) -> Result<Expr, RingError> {
        let at = self.here();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Num(n)),
            Tok::Pi => Ok(Expr::Pi),
            Tok::LParen => {
                let e = self.expr()?;
                if self.bump() != Tok::RParen {
                    return Err(err(at.0, at.1, "unclosed parenthesis"));
                }
                Ok(e)
            }
            Tok::Ident(s) if s == "I" => Ok(Expr::Imag),
            Tok::Ident(s) if s == "sin" || s == "cos" => {
                if self.bump() != Tok::LParen {
                    return Err(err(at.0, at.1, "expected `(` after trig function"));
                }
                let e = self.expr()?;
                if self.bump() != Tok::RParen {
                    return Err(err(at.0, at.1, "unclosed trig argument"));
                }
                Ok(Expr::Trig(s == "sin", Box::new(e), at))
            }
            Tok::Ident(s) => {
                if let Some(i) = self.roster.index_of(&s) {
                    return Ok(Expr::Var(i, at));
                }
                if let Some(rest) = s.strip_prefix('d') {
                    if let Some(i) = self.roster.index_of(rest) {
                        return Ok(Expr::Cov(i));
                    }
                }
                Err(err(at.0, at.1, format!("unknown coordinate `{}`", s)))
            }
            t => Err(err(at.0, at.1, format!("unexpected token {:?}", t))),
        }
    }
}

/// Inhomogeneous intermediate value: degree-indexed forms.
#[derive(Clone)]
struct Value(Vec<DifferentialForm>);

impl Value {
    fn scalar(f: FourierScalar) -> Self {
        Value(vec![DifferentialForm::scalar(f)])
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let shape = self.0[0].shape();
        Value(
            (0..n)
                .map(|d| {
                    let a = self.0.get(d).cloned().unwrap_or_else(|| DifferentialForm::zero(shape, d));
                    let b = o.0.get(d).cloned().unwrap_or_else(|| DifferentialForm::zero(shape, d));
                    &a + &b
                })
                .collect(),
        )
    }

    fn neg(&self) -> Self {
        Value(self.0.iter().map(|f| -f).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        let shape = self.0[0].shape();
        let n = self.0.len() + o.0.len() - 1;
        let mut out: Vec<DifferentialForm> = (0..n).map(|d| DifferentialForm::zero(shape, d)).collect();
        for a in &self.0 {
            for b in &o.0 {
                let d = a.degree() + b.degree();
                out[d] = &out[d] + &a.wedge(b);
            }
        }
        Value(out)
    }

    fn as_constant(&self) -> Option<PiPolynomial> {
        if self.0.iter().skip(1).any(|f| !f.is_zero()) {
            return None;
        }
        self.0[0].coefficient(0).as_constant()
    }
}

fn eval(e: &Expr, roster: &CoordinateRoster) -> Result<Value, RingError> {
    let shape = roster.shape();
    Ok(match e {
        Expr::Num(n) => Value::scalar(FourierScalar::constant(shape, PiPolynomial::constant(Gq::real(BigRational::from_integer(n.clone()))))),
        Expr::Pi => Value::scalar(FourierScalar::constant(shape, PiPolynomial::monomial(1, Gq::one()))),
        Expr::Imag => Value::scalar(FourierScalar::constant(shape, PiPolynomial::constant(Gq::i()))),
        Expr::Var(i, at) => match shape.kind(*i) {
            CoordKind::Fiber => Value::scalar(FourierScalar::fiber_var(shape, *i)),
            _ => {
                return Err(err(at.0, at.1, format!("torus coordinate `{}` may only appear inside sin/cos", roster.name(*i))));
            }
        },
        Expr::Cov(i) => {
            let z = DifferentialForm::zero(shape, 0);
            Value(vec![z, DifferentialForm::covector(shape, *i)])
        }
        Expr::Neg(a) => eval(a, roster)?.neg(),
        Expr::Add(a, b) => eval(a, roster)?.add(&eval(b, roster)?),
        Expr::Sub(a, b) => eval(a, roster)?.add(&eval(b, roster)?.neg()),
        Expr::Mul(a, b) => eval(a, roster)?.mul(&eval(b, roster)?),
        Expr::Div(a, b, at) => {
            let d = eval(b, roster)?.as_constant().ok_or_else(|| err(at.0, at.1, "division by a non-constant"))?;
            let inv = d.inv().ok_or_else(|| err(at.0, at.1, "divisor must be a nonzero monomial in pi"))?;
            let v = eval(a, roster)?;
            Value(v.0.iter().map(|f| f.scale(&inv)).collect())
        }
        Expr::Pow(a, n) => {
            let v = eval(a, roster)?;
            let mut acc = Value::scalar(FourierScalar::one(shape));
            for _ in 0..*n {
                acc = acc.mul(&v);
            }
            acc
        }
        Expr::Trig(is_sin, arg, at) => {
            let freq = linear_arg(arg, roster).map_err(|m| err(at.0, at.1, m))?;
            let f = if *is_sin { FourierScalar::sin_mode(shape, &freq) } else { FourierScalar::cos_mode(shape, &freq) };
            Value::scalar(f)
        }
    })
}

/// Linear combination `Σ c_{e,v} π^e x_v` (v = None for constants).
type Lin = std::collections::BTreeMap<(i32, Option<usize>), BigRational>;

fn lin_const(l: &Lin) -> Option<(i32, BigRational)> {
    if l.is_empty() {
        return Some((0, BigRational::zero()));
    }
    if l.len() == 1 {
        let ((e, v), c) = l.iter().next()?;
        if v.is_none() {
            return Some((*e, c.clone()));
        }
    }
    None
}

fn lin_eval(e: &Expr, roster: &CoordinateRoster) -> Result<Lin, String> {
    let single = |k: (i32, Option<usize>), c: BigRational| {
        let mut m = Lin::new();
        if !c.is_zero() {
            m.insert(k, c);
        }
        m
    };
    let addm = |mut a: Lin, b: Lin, s: i32| {
        for (k, c) in b {
            let v = a.entry(k).or_insert_with(BigRational::zero);
            if s > 0 {
                *v += c;
            } else {
                *v -= c;
            }
            if v.is_zero() {
                a.remove(&k);
            }
        }
        a
    };
    Ok(match e {
        Expr::Num(n) => single((0, None), BigRational::from_integer(n.clone())),
        Expr::Pi => single((1, None), BigRational::one()),
        Expr::Var(i, _) if *i < roster.shape().torus() => single((0, Some(*i)), BigRational::one()),
        Expr::Neg(a) => addm(Lin::new(), lin_eval(a, roster)?, -1),
        Expr::Add(a, b) => addm(lin_eval(a, roster)?, lin_eval(b, roster)?, 1),
        Expr::Sub(a, b) => addm(lin_eval(a, roster)?, lin_eval(b, roster)?, -1),
        Expr::Mul(a, b) => {
            let (x, y) = (lin_eval(a, roster)?, lin_eval(b, roster)?);
            let (k, other) = match (lin_const(&x), lin_const(&y)) {
                (Some(k), _) => (k, y),
                (_, Some(k)) => (k, x),
                _ => return Err("trig argument must be linear in the coordinates".into()),
            };
            other.into_iter().map(|((e, v), c)| ((e + k.0, v), c * &k.1)).filter(|(_, c)| !c.is_zero()).collect()
        }
        Expr::Div(a, b, _) => {
            let k = lin_const(&lin_eval(b, roster)?).ok_or("trig argument divisor must be constant")?;
            if k.1.is_zero() {
                return Err("division by zero".into());
            }
            lin_eval(a, roster)?.into_iter().map(|((e, v), c)| ((e - k.0, v), c / &k.1)).collect()
        }
        Expr::Pow(a, n) => {
            let k = lin_const(&lin_eval(a, roster)?).ok_or("only constants may be raised to powers in a trig argument")?;
            single((k.0 * *n as i32, None), num_traits::pow(k.1, *n as usize))
        }
        _ => return Err("unsupported trig argument".into()),
    })
}

fn linear_arg(e: &Expr, roster: &CoordinateRoster) -> Result<Vec<i32>, String> {
    let lin = lin_eval(e, roster)?;
    let mut freq = vec![0i32; roster.shape().torus()];
    for ((pe, v), c) in lin {
        let v = match (pe, v) {
            (1, Some(v)) => v,
            _ => return Err("trig argument must be 2*pi times an integer combination of torus coordinates".into()),
        };
        let half = c / BigRational::from_integer(2.into());
        if !half.is_integer() {
            return Err("trig frequencies must be integers".into());
        }
        let k = half.to_integer();
        freq[v] = k.to_i32().filter(|x| x.abs() < 1 << 20).ok_or("frequency too large")?;
    }
    Ok(freq)
}

/// Parses a homogeneous form (degree 0 allowed).
pub fn parse_form(src: &str, roster: &CoordinateRoster) -> Result<DifferentialForm, RingError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, roster };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    let v = eval(&e, roster)?;
    let nonzero: Vec<&DifferentialForm> = v.0.iter().filter(|f| !f.is_zero()).collect();
    match nonzero.len() {
        0 => Ok(DifferentialForm::zero(roster.shape(), 0)),
        1 => Ok(nonzero[0].clone()),
        _ => Err(err(1, 1, "expression mixes forms of different degrees")),
    }
}

/// Parses a form and checks its degree (a literal `0` is accepted for any degree).
pub fn parse_form_of_degree(src: &str, roster: &CoordinateRoster, degree: usize) -> Result<DifferentialForm, RingError> {
    let f = parse_form(src, roster)?;
    if f.is_zero() {
        return Ok(DifferentialForm::zero(roster.shape(), degree));
    }
    if f.degree() != degree {
        return Err(err(1, 1, format!("expected a {}-form, found degree {}", degree, f.degree())));
    }
    Ok(f)
}

pub fn parse_scalar(src: &str, roster: &CoordinateRoster) -> Result<FourierScalar, RingError> {
    Ok(parse_form_of_degree(src, roster, 0)?.coefficient(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roster() -> CoordinateRoster {
        CoordinateRoster::standard(2, 2, true)
    }

    #[test]
    fn parses_examples() {
        let r = roster();
        let f = parse_scalar("p1*cos(2*pi*q2)", &r).unwrap();
        assert_eq!(f.to_text(&r), "p1*cos(2*pi*q2)");
        let g = parse_scalar("3/4", &r).unwrap();
        assert_eq!(g, FourierScalar::ratio(r.shape(), 3, 4));
        let w = parse_form("sin(2*pi*y1) * dq1 ^ dy2", &r).unwrap();
        assert_eq!(w.degree(), 2);
        assert_eq!(w.to_text(&r), "-sin(2*pi*y1)*dy2^dq1");
    }

    #[test]
    fn pretty_round_trip() {
        let r = roster();
        let src = "−4π²·cos(2π·y1)·cos(2π·y2)·dq1∧dq2";
        let w = parse_form(src, &r).unwrap();
        assert_eq!(w.to_pretty(&r), src);
        assert_eq!(parse_form(&w.to_text(&r), &r).unwrap(), w);
    }

    #[test]
    fn reports_positions() {
        let r = roster();
        match parse_scalar("1 + sin(2*pi*z)", &r) {
            Err(RingError::Parse { line, col, .. }) => assert_eq!((line, col), (1, 14)),
            other => panic!("unexpected {:?}", other),
        }
        assert!(parse_scalar("cos(pi*y1)", &r).is_err());
        assert!(parse_scalar("y1", &r).is_err());
    }
}
