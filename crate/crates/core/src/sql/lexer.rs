use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Quoted(String),
    Int(BigInt),
    Double(f64),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMS: &[&str] = &[
    "<>", "!=", "<=", ">=", "||", "(", ")", ",", ";", ".", "+", "-", "*", "/", "=", "<", ">",
];

pub fn lex(src: &str) -> Result<Vec<Token>> {
    let cs: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    let err = |line, col, msg: String| Error::Syntax { line, col, msg };
    macro_rules! bump {
        () => {{
            if cs[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < cs.len() {
        let c = cs[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            bump!();
        } else if c == '-' && cs.get(i + 1) == Some(&'-') {
            while i < cs.len() && cs[i] != '\n' {
                bump!();
            }
        } else if c == '/' && cs.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= cs.len() {
                    return Err(err(l0, c0, "unterminated comment".into()));
                }
                if cs[i] == '*' && cs.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
        } else if c.is_ascii_digit() || (c == '.' && cs.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut double = false;
            while i < cs.len() && cs[i].is_ascii_digit() {
                bump!();
            }
            if i < cs.len() && cs[i] == '.' {
                double = true;
                bump!();
                while i < cs.len() && cs[i].is_ascii_digit() {
                    bump!();
                }
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let save = (i, line, col);
                bump!();
                if i < cs.len() && (cs[i] == '+' || cs[i] == '-') {
                    bump!();
                }
                if i < cs.len() && cs[i].is_ascii_digit() {
                    double = true;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        bump!();
                    }
                } else {
                    (i, line, col) = save;
                }
            }
            let text: String = cs[start..i].iter().collect();
            let tok = if double {
                Tok::Double(text.parse().map_err(|_| err(l0, c0, format!("bad number `{}`", text)))?)
            } else {
                Tok::Int(text.parse().map_err(|_| err(l0, c0, format!("bad number `{}`", text)))?)
            };
            out.push(Token { tok, line: l0, col: c0 });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                bump!();
            }
            out.push(Token { tok: Tok::Ident(cs[start..i].iter().collect()), line: l0, col: c0 });
        } else if c == '\'' || c == '"' {
            let q = c;
            let mut s = String::new();
            bump!();
            loop {
                if i >= cs.len() {
                    return Err(err(l0, c0, "unterminated quoted text".into()));
                }
                if cs[i] == q {
                    if cs.get(i + 1) == Some(&q) {
                        s.push(q);
                        bump!();
                        bump!();
                        continue;
                    }
                    bump!();
                    break;
                }
                s.push(cs[i]);
                bump!();
            }
            let tok = if q == '\'' { Tok::Str(s) } else { Tok::Quoted(s) };
            out.push(Token { tok, line: l0, col: c0 });
        } else {
            let rest: String = cs[i..cs.len().min(i + 2)].iter().collect();
            let Some(sym) = SYMS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(err(l0, c0, format!("unexpected character `{}`", c)));
            };
            for _ in 0..sym.len() {
                bump!();
            }
            out.push(Token { tok: Tok::Sym(sym), line: l0, col: c0 });
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
