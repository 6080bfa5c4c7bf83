use std::fmt::Write;

use super::{JsExpr, JsFunction, JsModule, JsStmt};
use crate::data::json::js_number;

fn quote(s: &str) -> String {
    serde_json::to_string(s).unwrap()
}

fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "Infinity".into() } else { "(-Infinity)".into() }
    } else if x == 0.0 && x.is_sign_negative() {
        "(-0)".into()
    } else if x < 0.0 {
        format!("({})", js_number(x))
    } else {
        js_number(x)
    }
}

fn expr(e: &JsExpr, out: &mut String) {
    match e {
        JsExpr::Ident(x) => out.push_str(x),
        JsExpr::BigInt(i) if i.sign() == num_bigint::Sign::Minus => {
            write!(out, "({}n)", i).unwrap()
        }
        JsExpr::BigInt(i) => write!(out, "{}n", i).unwrap(),
        JsExpr::Number(x) => out.push_str(&number(*x)),
        JsExpr::Str(s) => out.push_str(&quote(s)),
        JsExpr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        JsExpr::Null => out.push_str("null"),
        JsExpr::Object(fields) => {
            if fields.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{ ");
            for (i, (k, v)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&quote(k));
                out.push_str(": ");
                expr(v, out);
            }
            out.push_str(" }");
        }
        JsExpr::Member(o, name) => {
            expr(o, out);
            out.push('.');
            out.push_str(name);
        }
        JsExpr::Call(f, args) => {
            expr(f, out);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(a, out);
            }
            out.push(')');
        }
        JsExpr::Not(a) => {
            out.push_str("!(");
            expr(a, out);
            out.push(')');
        }
        JsExpr::Logical(op, a, b) => {
            out.push('(');
            expr(a, out);
            write!(out, " {} ", op).unwrap();
            expr(b, out);
            out.push(')');
        }
    }
}

fn indent(n: usize, out: &mut String) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn body(stmts: &[JsStmt], n: usize, out: &mut String) {
    out.push_str("{\n");
    for s in stmts {
        stmt(s, n + 1, out);
    }
    indent(n, out);
    out.push('}');
}

fn stmt(s: &JsStmt, n: usize, out: &mut String) {
    indent(n, out);
    match s {
        JsStmt::Let(x, None) => writeln!(out, "let {};", x).unwrap(),
        JsStmt::Let(x, Some(e)) => {
            write!(out, "let {} = ", x).unwrap();
            expr(e, out);
            out.push_str(";\n");
        }
        JsStmt::Assign(x, e) => {
            write!(out, "{} = ", x).unwrap();
            expr(e, out);
            out.push_str(";\n");
        }
        JsStmt::Block(stmts) => {
            body(stmts, n, out);
            out.push('\n');
        }
        JsStmt::ForOf(x, src, stmts) => {
            write!(out, "for (let {} of ", x).unwrap();
            expr(src, out);
            out.push_str(") ");
            body(stmts, n, out);
            out.push('\n');
        }
        JsStmt::If(c, a, b) => {
            out.push_str("if (");
            expr(c, out);
            out.push_str(") ");
            body(a, n, out);
            out.push_str(" else ");
            body(b, n, out);
            out.push('\n');
        }
        JsStmt::Return(e) => {
            out.push_str("return ");
            expr(e, out);
            out.push_str(";\n");
        }
    }
}

/// Prints a function declaration with two-space indentation.
pub fn print_function(f: &JsFunction) -> String {
    let mut out = String::new();
    write!(out, "function {}({}) ", f.name, f.params.join(", ")).unwrap();
    body(&f.body, 0, &mut out);
    out
}

/// Prints the whole module.
pub fn print_js(m: &JsModule) -> String {
    format!(
        "\"use strict\";\nconst rt = require({});\n\n{}\n\nmodule.exports = {{ {} }};\n",
        quote(&m.runtime),
        print_function(&m.function),
        m.function.name
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_function() {
        let f = JsFunction {
            name: "query".into(),
            params: vec!["db".into()],
            body: vec![JsStmt::Let("ret".into(), None), JsStmt::Return(JsExpr::Ident("ret".into()))],
        };
        assert_eq!(print_function(&f), "function query(db) {\n  let ret;\n  return ret;\n}");
    }

    #[test]
    fn literals() {
        let mut s = String::new();
        expr(&JsExpr::BigInt((-5).into()), &mut s);
        s.push(' ');
        expr(&JsExpr::Number(2.5), &mut s);
        s.push(' ');
        expr(&JsExpr::Number(-0.0), &mut s);
        s.push(' ');
        expr(&JsExpr::Str("a\"b".into()), &mut s);
        assert_eq!(s, "(-5n) 2.5 (-0) \"a\\\"b\"");
    }
}
