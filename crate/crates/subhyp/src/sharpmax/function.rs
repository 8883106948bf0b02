//! Analytic test functions with exact derivatives: sums of products of
//! monomials in x and y and sine/cosine factors with fixed frequencies.
//! The expression language covers `x^a`, `y^b`, `sin(c*x)`, `cos(c*y)`,
//! products with `*`, sums with `+`/`-`, and numeric coefficients.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrigKind {
    Sin,
    Cos,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrigFactor {
    pub kind: TrigKind,
    pub var: Var,
    pub freq: f64,
}

impl TrigFactor {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let u = self.freq * match self.var {
            Var::X => x,
            Var::Y => y,
        };
        match self.kind {
            TrigKind::Sin => u.sin(),
            TrigKind::Cos => u.cos(),
        }
    }

    /// (coefficient, factor) of the derivative with respect to `var`.
    fn derivative(&self, var: Var) -> Option<(f64, TrigFactor)> {
        if self.var != var {
            return None;
        }
        match self.kind {
            TrigKind::Sin => {
                Some((self.freq, TrigFactor { kind: TrigKind::Cos, var: self.var, freq: self.freq }))
            }
            TrigKind::Cos => {
                Some((-self.freq, TrigFactor { kind: TrigKind::Sin, var: self.var, freq: self.freq }))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProdTerm {
    pub coef: f64,
    pub px: u32,
    pub py: u32,
    pub trig: Vec<TrigFactor>,
}

impl ProdTerm {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let mut v = self.coef * x.powi(self.px as i32) * y.powi(self.py as i32);
        for t in &self.trig {
            v *= t.eval(x, y);
        }
        v
    }
}

/// Sum of product terms, closed under partial differentiation.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticField {
    pub terms: Vec<ProdTerm>,
}

impl AnalyticField {
    pub fn constant(c: f64) -> Self {
        AnalyticField { terms: vec![ProdTerm { coef: c, px: 0, py: 0, trig: vec![] }] }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x, y)).sum()
    }

    pub fn derivative(&self, var: Var) -> AnalyticField {
        let mut terms = Vec::new();
        for t in &self.terms {
            // power rule on the monomial part
            let p = match var {
                Var::X => t.px,
                Var::Y => t.py,
            };
            if p > 0 {
                let mut d = t.clone();
                d.coef *= p as f64;
                match var {
                    Var::X => d.px -= 1,
                    Var::Y => d.py -= 1,
                }
                terms.push(d);
            }
            // product rule over the trig factors
            for (j, tf) in t.trig.iter().enumerate() {
                if let Some((c, df)) = tf.derivative(var) {
                    let mut d = t.clone();
                    d.coef *= c;
                    d.trig[j] = df;
                    terms.push(d);
                }
            }
        }
        if terms.is_empty() {
            terms.push(ProdTerm { coef: 0.0, px: 0, py: 0, trig: vec![] });
        }
        AnalyticField { terms }
    }

    /// D^β f for β = (bx, by).
    pub fn d_beta(&self, bx: u32, by: u32) -> AnalyticField {
        let mut f = self.clone();
        for _ in 0..bx {
            f = f.derivative(Var::X);
        }
        for _ in 0..by {
            f = f.derivative(Var::Y);
        }
        f
    }

    /// ‖∇^k f‖(x, y) = (Σ_{|β|=k} (D^β f)²)^{1/2}.
    pub fn grad_norm(&self, k: u32, x: f64, y: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..=k {
            let v = self.d_beta(i, k - i).eval(x, y);
            s += v * v;
        }
        s.sqrt()
    }

    /// All D^β f for |β| = k, in the order β = (k,0), (k−1,1), ..., (0,k).
    pub fn grad_components(&self, k: u32) -> Vec<AnalyticField> {
        (0..=k).map(|i| self.d_beta(k - i, i)).collect()
    }

    /// Taylor polynomial value: D^β T_y^{deg}(f)(x) for the expansion of f at
    /// y, evaluated at x.
    pub fn taylor_deriv_at(&self, beta: (u32, u32), center: (f64, f64), deg: u32, at: (f64, f64)) -> f64 {
        let mut total = 0.0;
        let rem = deg.saturating_sub(beta.0 + beta.1);
        for ex in 0..=rem {
            for ey in 0..=(rem - ex) {
                let d = self.d_beta(beta.0 + ex, beta.1 + ey).eval(center.0, center.1);
                let fact = factorial(ex) * factorial(ey);
                total += d / fact
                    * (at.0 - center.0).powi(ex as i32)
                    * (at.1 - center.1).powi(ey as i32);
            }
        }
        total
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product::<f64>().max(1.0)
}

impl fmt::Display for AnalyticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coef)?;
            if t.px > 0 {
                write!(f, "*x^{}", t.px)?;
            }
            if t.py > 0 {
                write!(f, "*y^{}", t.py)?;
            }
            for tf in &t.trig {
                let name = match tf.kind {
                    TrigKind::Sin => "sin",
                    TrigKind::Cos => "cos",
                };
                let var = match tf.var {
                    Var::X => "x",
                    Var::Y => "y",
                };
                write!(f, "*{name}({}*{var})", tf.freq)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn err(&self, msg: &str) -> Error {
        Error::InvalidParameter(format!("function spec: {msg} at byte {}", self.pos))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| self.err("malformed number"))
    }

    fn exponent(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer exponent"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| self.err("malformed exponent"))
    }

    fn trig(&mut self, kind: TrigKind) -> Result<TrigFactor> {
        self.skip_ws();
        if self.bump() != Some(b'(') {
            return Err(self.err("expected '('"));
        }
        // either `c*x` or a bare variable with frequency 1
        let freq = match self.peek() {
            Some(b'x') | Some(b'y') => 1.0,
            _ => {
                let f = self.number()?;
                self.skip_ws();
                if self.bump() != Some(b'*') {
                    return Err(self.err("expected '*' between frequency and variable"));
                }
                f
            }
        };
        let var = match self.bump() {
            Some(b'x') => Var::X,
            Some(b'y') => Var::Y,
            _ => return Err(self.err("expected 'x' or 'y'")),
        };
        self.skip_ws();
        if self.bump() != Some(b')') {
            return Err(self.err("expected ')'"));
        }
        Ok(TrigFactor { kind, var, freq })
    }

    fn factor(&mut self, term: &mut ProdTerm) -> Result<()> {
        match self.peek() {
            Some(b'x') => {
                self.bump();
                let e = if self.peek() == Some(b'^') {
                    self.bump();
                    self.exponent()?
                } else {
                    1
                };
                term.px += e;
            }
            Some(b'y') => {
                self.bump();
                let e = if self.peek() == Some(b'^') {
                    self.bump();
                    self.exponent()?
                } else {
                    1
                };
                term.py += e;
            }
            Some(b's') | Some(b'c') => {
                let kind = if self.src[self.pos..].starts_with(b"sin") {
                    self.pos += 3;
                    TrigKind::Sin
                } else if self.src[self.pos..].starts_with(b"cos") {
                    self.pos += 3;
                    TrigKind::Cos
                } else {
                    return Err(self.err("expected 'sin' or 'cos'"));
                };
                let t = self.trig(kind)?;
                term.trig.push(t);
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                term.coef *= self.number()?;
            }
            _ => return Err(self.err("expected a factor")),
        }
        Ok(())
    }

    fn term(&mut self, sign: f64) -> Result<ProdTerm> {
        let mut t = ProdTerm { coef: sign, px: 0, py: 0, trig: vec![] };
        self.factor(&mut t)?;
        while self.peek() == Some(b'*') {
            self.bump();
            self.factor(&mut t)?;
        }
        Ok(t)
    }

    fn expr(&mut self) -> Result<AnalyticField> {
        let mut terms = Vec::new();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.bump();
                -1.0
            }
            Some(b'+') => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        loop {
            terms.push(self.term(sign)?);
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.bump();
                    sign = -1.0;
                }
                None => break,
                _ => return Err(self.err("expected '+', '-' or end of input")),
            }
        }
        Ok(AnalyticField { terms })
    }
}

/// Parse a function spec like `x^2*y + 0.5*sin(3*x)*cos(2*y) - 1`.
pub fn parse(src: &str) -> Result<AnalyticField> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}
