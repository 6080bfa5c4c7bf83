//! JavaScript generation from Imp over EJson: a small target AST and a
//! deterministic printer.

mod print;

pub use print::{print_function, print_js};

use num_bigint::BigInt;

use crate::data::EJson;
use crate::imp::ejson::{EJsonExpr, EJsonOp, EJsonProgram, EJsonStmt};
use crate::imp::{ImpExpr, ImpStmt};

/// Name of the runtime namespace in emitted code.
pub const RUNTIME: &str = "rt";
/// Module path the emitted code loads the runtime from.
pub const RUNTIME_MODULE: &str = "./dbxRuntime.js";

#[derive(Debug, Clone, PartialEq)]
pub enum JsExpr {
    Ident(String),
    BigInt(BigInt),
    Number(f64),
    Str(String),
    Bool(bool),
    Null,
    Object(Vec<(String, JsExpr)>),
    /// `object.name`.
    Member(Box<JsExpr>, String),
    Call(Box<JsExpr>, Vec<JsExpr>),
    Not(Box<JsExpr>),
    /// `&&` or `||`.
    Logical(&'static str, Box<JsExpr>, Box<JsExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum JsStmt {
    Let(String, Option<JsExpr>),
    Assign(String, JsExpr),
    Block(Vec<JsStmt>),
    ForOf(String, JsExpr, Vec<JsStmt>),
    If(JsExpr, Vec<JsStmt>, Vec<JsStmt>),
    Return(JsExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsFunction {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<JsStmt>,
}

/// A CommonJS module: loads the runtime, defines one function and exports
/// it.
#[derive(Debug, Clone, PartialEq)]
pub struct JsModule {
    pub runtime: String,
    pub function: JsFunction,
}

const RESERVED: &[&str] = &[
    "arguments", "await", "break", "case", "catch", "class", "const", "continue", "debugger",
    "default", "delete", "do", "else", "enum", "eval", "export", "extends", "false", "finally",
    "for", "function", "if", "implements", "import", "in", "instanceof", "interface", "let", "new",
    "null", "package", "private", "protected", "public", "return", "static", "super", "switch",
    "this", "throw", "true", "try", "typeof", "undefined", "var", "void", "while", "with", "yield",
];

pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
        && !RESERVED.contains(&s)
}

/// Maps a variable name to a legal identifier; `$` is kept and any other
/// illegal character becomes `_xx_` with its code point in hex.
fn mangle(s: &str) -> String {
    if is_identifier(s) {
        return s.to_string();
    }
    let mut out = String::from("v_");
    for c in s.chars() {
        if c.is_ascii_alphanumeric() || c == '$' {
            out.push(c);
        } else {
            out.push_str(&format!("_{:x}_", c as u32));
        }
    }
    out
}

struct Emitter {
    used: std::collections::BTreeSet<String>,
    scope: Vec<(String, String)>,
}

fn rt(name: &str, args: Vec<JsExpr>) -> JsExpr {
    JsExpr::Call(Box::new(JsExpr::Member(Box::new(JsExpr::Ident(RUNTIME.into())), name.into())), args)
}

/// Constants: objects become object literals, arrays go through the
/// runtime's array constructor.
pub fn constant(v: &EJson) -> JsExpr {
    match v {
        EJson::Null => JsExpr::Null,
        EJson::Bool(b) => JsExpr::Bool(*b),
        EJson::Number(x) => JsExpr::Number(*x),
        EJson::BigInt(i) => JsExpr::BigInt(i.clone()),
        EJson::String(s) => JsExpr::Str(s.clone()),
        EJson::Array(items) => rt("array", items.iter().map(constant).collect()),
        EJson::Object(o) => JsExpr::Object(o.iter().map(|(k, v)| (k.clone(), constant(v))).collect()),
    }
}

impl Emitter {
    /// A JavaScript name for a new binding of `x`, distinct from every
    /// name already emitted in the function.
    fn bind(&mut self, x: &str) -> String {
        let base = mangle(x);
        let mut name = base.clone();
        let mut k = 0;
        while !self.used.insert(name.clone()) {
            k += 1;
            name = format!("{}_{}", base, k);
        }
        self.scope.push((x.to_string(), name.clone()));
        name
    }

    fn lookup(&self, x: &str) -> String {
        match self.scope.iter().rev().find(|(y, _)| y == x) {
            Some((_, n)) => n.clone(),
            None => mangle(x),
        }
    }

    fn expr(&self, e: &EJsonExpr) -> JsExpr {
        match e {
            ImpExpr::Const(v) => constant(v),
            ImpExpr::Var(x) => JsExpr::Ident(self.lookup(x)),
            ImpExpr::Op(op, args) => {
                let mut a: Vec<JsExpr> = args.iter().map(|x| self.expr(x)).collect();
                match (op, a.len()) {
                    (EJsonOp::Not, 1) => JsExpr::Not(Box::new(a.pop().unwrap())),
                    (EJsonOp::And | EJsonOp::Or, 2) => {
                        let b = a.pop().unwrap();
                        let sym = if *op == EJsonOp::And { "&&" } else { "||" };
                        JsExpr::Logical(sym, Box::new(a.pop().unwrap()), Box::new(b))
                    }
                    _ => rt(&op.to_string(), a),
                }
            }
            ImpExpr::Call(f, args) => rt(f.name(), args.iter().map(|x| self.expr(x)).collect()),
        }
    }

    /// Statements of a block; the declarations are scoped to it.
    fn block(&mut self, s: &EJsonStmt) -> Vec<JsStmt> {
        let depth = self.scope.len();
        let out = match s {
            ImpStmt::Block(decls, body) => {
                let mut out = Vec::new();
                for (x, init) in decls {
                    let init = init.as_ref().map(|e| self.expr(e));
                    let name = self.bind(x);
                    out.push(JsStmt::Let(name, init));
                }
                for s in body {
                    out.push(self.stmt(s));
                }
                out
            }
            s => vec![self.stmt(s)],
        };
        self.scope.truncate(depth);
        out
    }

    fn stmt(&mut self, s: &EJsonStmt) -> JsStmt {
        match s {
            ImpStmt::Block(..) => JsStmt::Block(self.block(s)),
            ImpStmt::Assign(x, e) => JsStmt::Assign(self.lookup(x), self.expr(e)),
            ImpStmt::For(x, e, body) => {
                let src = rt("iter", vec![self.expr(e)]);
                let depth = self.scope.len();
                let name = self.bind(x);
                let body = self.block(body);
                self.scope.truncate(depth);
                JsStmt::ForOf(name, src, body)
            }
            ImpStmt::If(c, a, b) => {
                let c = rt("toBool", vec![self.expr(c)]);
                JsStmt::If(c, self.block(a), self.block(b))
            }
        }
    }
}

/// Translates a program into `function query(input) { ... return ret; }`.
/// Every binding gets a distinct JavaScript name, so `let` never hits a
/// temporal dead zone or a duplicate declaration.
pub fn imp_to_js(p: &EJsonProgram) -> JsModule {
    let mut em = Emitter { used: Default::default(), scope: vec![] };
    em.used.insert(RUNTIME.to_string());
    em.used.insert("query".to_string());
    let input = em.bind(&p.input);
    let mut body = em.block_keep(&p.body);
    body.push(JsStmt::Return(JsExpr::Ident(em.lookup(&p.ret))));
    JsModule {
        runtime: RUNTIME_MODULE.to_string(),
        function: JsFunction { name: "query".into(), params: vec![input], body },
    }
}

impl Emitter {
    /// Like [`Emitter::block`] but keeps the block's bindings visible so
    /// the return statement can name them.
    fn block_keep(&mut self, s: &EJsonStmt) -> Vec<JsStmt> {
        match s {
            ImpStmt::Block(decls, body) => {
                let mut out = Vec::new();
                for (x, init) in decls {
                    let init = init.as_ref().map(|e| self.expr(e));
                    let name = self.bind(x);
                    out.push(JsStmt::Let(name, init));
                }
                for s in body {
                    out.push(self.stmt(s));
                }
                out
            }
            s => vec![self.stmt(s)],
        }
    }
}
