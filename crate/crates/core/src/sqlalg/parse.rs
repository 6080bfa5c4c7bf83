use num_bigint::BigInt;

use super::ast::{AggFn, Expr, Formula, Pred, Quantifier, Query, Select};
use crate::data::{ArithOp, SqlValue};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Quoted(String),
    Int(BigInt),
    Double(f64),
    Str(String),
    Sym(&'static str),
}

const SYMS: &[&str] = &["||", "<>", "<=", ">=", "(", ")", "[", "]", ",", ";", "+", "-", "*", "/", "=", "<", ">"];

fn err(msg: impl Into<String>) -> Error {
    Error::Syntax { line: 1, col: 0, msg: msg.into() }
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '-' && i + 1 < cs.len() && cs[i + 1].is_ascii_digit()) {
            let start = i;
            i += 1;
            let mut is_double = false;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.' || cs[i] == 'e' || cs[i] == 'E'
                || ((cs[i] == '-' || cs[i] == '+') && (cs[i - 1] == 'e' || cs[i - 1] == 'E')))
            {
                if !cs[i].is_ascii_digit() {
                    is_double = true;
                }
                i += 1;
            }
            let text: String = cs[start..i].iter().collect();
            if is_double {
                out.push(Tok::Double(text.parse().map_err(|_| err(format!("bad number {}", text)))?));
            } else {
                out.push(Tok::Int(text.parse().map_err(|_| err(format!("bad number {}", text)))?));
            }
        } else if c == '-' && cs[i..].starts_with(&['-', 'i', 'n', 'f']) {
            out.push(Tok::Double(f64::NEG_INFINITY));
            i += 4;
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || "_$.".contains(cs[i])) {
                i += 1;
            }
            out.push(Tok::Name(cs[start..i].iter().collect()));
        } else if c == '\'' {
            let mut v = String::new();
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err(err("unterminated string")),
                    Some('\'') if cs.get(i + 1) == Some(&'\'') => {
                        v.push('\'');
                        i += 2;
                    }
                    Some('\'') => {
                        i += 1;
                        break;
                    }
                    Some(ch) => {
                        v.push(*ch);
                        i += 1;
                    }
                }
            }
            out.push(Tok::Str(v));
        } else if c == '"' {
            let start = i;
            i += 1;
            while i < cs.len() && cs[i] != '"' {
                if cs[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            let text: String = cs[start..i.min(cs.len())].iter().collect();
            let v: String = serde_json::from_str(&text).map_err(|_| err("bad quoted name"))?;
            out.push(Tok::Quoted(v));
        } else {
            let rest: String = cs[i..cs.len().min(i + 2)].iter().collect();
            let sym = SYMS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| err(format!("unexpected character `{}`", c)))?;
            out.push(Tok::Sym(sym));
            i += sym.len();
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1)
    }

    fn next(&mut self) -> Result<Tok> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(x)) if x == k)
    }

    fn sym(&mut self, s: &str) -> Result<()> {
        match self.next()? {
            Tok::Sym(x) if x == s => Ok(()),
            t => Err(err(format!("expected `{}`, found {:?}", s, t))),
        }
    }

    fn kw(&mut self, k: &str) -> Result<()> {
        match self.next()? {
            Tok::Name(x) if x == k => Ok(()),
            t => Err(err(format!("expected `{}`, found {:?}", k, t))),
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.next()? {
            Tok::Name(x) | Tok::Quoted(x) => Ok(x),
            t => Err(err(format!("expected a name, found {:?}", t))),
        }
    }

    fn comma_list<T>(&mut self, close: &str, mut item: impl FnMut(&mut P) -> Result<T>) -> Result<Vec<T>> {
        let mut v = Vec::new();
        if self.is_sym(close) {
            return Ok(v);
        }
        loop {
            v.push(item(self)?);
            if self.is_sym(",") {
                self.pos += 1;
            } else {
                return Ok(v);
            }
        }
    }

    fn query(&mut self) -> Result<Query> {
        if self.is_sym("(") {
            self.pos += 1;
            self.sym(")")?;
            return Ok(Query::Empty);
        }
        let followed_by = |p: &P, s: &str| matches!(p.peek2(), Some(Tok::Sym(x)) if *x == s);
        if let Some(Tok::Name(k)) = self.peek().cloned() {
            let bin = match k.as_str() {
                "union" | "intersect" | "except" | "join" if followed_by(self, "(") => Some(k.clone()),
                _ => None,
            };
            if let Some(k) = bin {
                self.pos += 2;
                let a = Box::new(self.query()?);
                self.sym(",")?;
                let b = Box::new(self.query()?);
                self.sym(")")?;
                return Ok(match k.as_str() {
                    "union" => Query::Union(a, b),
                    "intersect" => Query::Intersect(a, b),
                    "except" => Query::Except(a, b),
                    _ => Query::Join(a, b),
                });
            }
            if followed_by(self, "[") {
                match k.as_str() {
                    "pi" => {
                        self.pos += 2;
                        let s = self.comma_list("]", P::select)?;
                        self.sym("]")?;
                        let q = self.paren_query()?;
                        return Ok(Query::Project(s, Box::new(q)));
                    }
                    "sigma" => {
                        self.pos += 2;
                        let f = self.formula()?;
                        self.sym("]")?;
                        let q = self.paren_query()?;
                        return Ok(Query::Filter(f, Box::new(q)));
                    }
                    "gamma" => {
                        self.pos += 2;
                        let select = self.comma_list(";", P::select)?;
                        self.sym(";")?;
                        let keys = self.comma_list(";", P::name)?;
                        self.sym(";")?;
                        let having = self.formula()?;
                        self.sym("]")?;
                        let input = Box::new(self.paren_query()?);
                        return Ok(Query::Group { select, keys, having, input });
                    }
                    _ => {}
                }
            }
        }
        Ok(Query::Table(self.name()?))
    }

    fn paren_query(&mut self) -> Result<Query> {
        self.sym("(")?;
        let q = self.query()?;
        self.sym(")")?;
        Ok(q)
    }

    fn select(&mut self) -> Result<Select> {
        let e = self.expr()?;
        self.kw("as")?;
        Ok(Select { expr: e, name: self.name()? })
    }

    fn pred(&mut self) -> Result<Pred> {
        match self.next()? {
            Tok::Sym(s) => Pred::ALL
                .into_iter()
                .find(|p| p.symbol() == s)
                .ok_or_else(|| err(format!("expected a comparison, found `{}`", s))),
            t => Err(err(format!("expected a comparison, found {:?}", t))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.is_kw("true") {
            self.pos += 1;
            return Ok(Formula::True);
        }
        if self.is_kw("not") {
            self.pos += 1;
            self.sym("(")?;
            let f = self.formula()?;
            self.sym(")")?;
            return Ok(Formula::not(f));
        }
        if self.is_kw("exists") {
            self.pos += 1;
            return Ok(Formula::exists(self.paren_query()?));
        }
        if (self.is_kw("all") || self.is_kw("any")) && matches!(self.peek2(), Some(Tok::Sym("["))) {
            let quant = if self.is_kw("all") { Quantifier::All } else { Quantifier::Any };
            self.pos += 2;
            let p = self.pred()?;
            self.sym("]")?;
            self.sym("(")?;
            let s = self.select()?;
            self.sym(",")?;
            let q = self.query()?;
            self.sym(")")?;
            return Ok(Formula::Quant(p, quant, s, Box::new(q)));
        }
        if self.is_kw("in") && matches!(self.peek2(), Some(Tok::Sym("["))) {
            self.pos += 2;
            let s = self.comma_list("]", P::select)?;
            self.sym("]")?;
            let q = self.paren_query()?;
            return Ok(Formula::In(s, Box::new(q)));
        }
        // parenthesised: binary connective or comparison
        self.sym("(")?;
        let save = self.pos;
        if let Ok(a) = self.formula() {
            if self.is_kw("and") || self.is_kw("or") {
                let and = self.is_kw("and");
                self.pos += 1;
                let b = self.formula()?;
                self.sym(")")?;
                return Ok(if and { Formula::and(a, b) } else { Formula::or(a, b) });
            }
        }
        self.pos = save;
        let a = self.expr()?;
        let p = self.pred()?;
        let b = self.expr()?;
        self.sym(")")?;
        Ok(Formula::Pred(p, a, b))
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.next()? {
            Tok::Int(i) => Ok(Expr::Const(SqlValue::Int(i))),
            Tok::Double(d) => Ok(Expr::Const(SqlValue::Double(d))),
            Tok::Str(s) => Ok(Expr::Const(SqlValue::Text(s))),
            Tok::Quoted(a) => Ok(Expr::Attr(a)),
            Tok::Sym("(") => {
                let a = self.expr()?;
                let op = match self.next()? {
                    Tok::Sym("+") => ArithOp::Add,
                    Tok::Sym("-") => ArithOp::Sub,
                    Tok::Sym("*") => ArithOp::Mul,
                    Tok::Sym("/") => ArithOp::Div,
                    Tok::Sym("||") => ArithOp::Concat,
                    t => return Err(err(format!("expected an operator, found {:?}", t))),
                };
                let b = self.expr()?;
                self.sym(")")?;
                Ok(Expr::arith(op, a, b))
            }
            Tok::Name(n) => match n.as_str() {
                "null" => Ok(Expr::Const(SqlValue::Null)),
                "TRUE" => Ok(Expr::Const(SqlValue::Bool(true))),
                "FALSE" => Ok(Expr::Const(SqlValue::Bool(false))),
                "nan" => Ok(Expr::Const(SqlValue::Double(f64::NAN))),
                "inf" => Ok(Expr::Const(SqlValue::Double(f64::INFINITY))),
                "neg" => {
                    self.sym("(")?;
                    let e = self.expr()?;
                    self.sym(")")?;
                    Ok(Expr::Neg(Box::new(e)))
                }
                "sum" | "count" | "avg" | "min" | "max" => {
                    self.sym("(")?;
                    if n == "count" && self.is_sym("*") {
                        self.pos += 1;
                        self.sym(")")?;
                        return Ok(Expr::count_star());
                    }
                    let e = self.expr()?;
                    self.sym(")")?;
                    let f = match n.as_str() {
                        "sum" => AggFn::Sum,
                        "count" => AggFn::Count,
                        "avg" => AggFn::Avg,
                        "min" => AggFn::Min,
                        _ => AggFn::Max,
                    };
                    Ok(Expr::agg(f, e))
                }
                _ => Ok(Expr::Attr(n)),
            },
            t => Err(err(format!("unexpected token {:?}", t))),
        }
    }
}

/// Parses the ASCII algebra notation produced by `Display for Query`.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut p = P { toks: lex(text)?, pos: 0 };
    let q = p.query()?;
    if p.pos != p.toks.len() {
        return Err(err(format!("trailing input at token {}", p.pos)));
    }
    Ok(q)
}
