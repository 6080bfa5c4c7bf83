use super::ast::{Cond, FromItem, FromSource, SelectBlock, SelectItem, SetOp, SqlExpr, SqlQuery, Statement};
use super::lexer::{lex, Tok, Token};
use crate::data::{ArithOp, ColumnType, SqlValue, TableSchema};
use crate::error::{Error, Result};
use crate::sqlalg::{AggFn, Pred, Quantifier};

/// Words that cannot be used as bare identifiers.
const RESERVED: &[&str] = &[
    "select", "from", "where", "group", "by", "having", "union", "intersect", "except", "all", "any",
    "some", "and", "or", "not", "in", "exists", "as", "null", "true", "false", "create", "table",
    "distinct", "order", "limit", "with", "is", "on", "join",
];

/// Keywords of recognised but unsupported features.
const UNSUPPORTED: &[(&str, &str)] = &[
    ("distinct", "distinct"),
    ("order", "order by"),
    ("limit", "limit"),
    ("with", "with (recursive) queries"),
    ("is", "is [not] null"),
    ("join", "explicit join syntax"),
    ("on", "explicit join syntax"),
    ("like", "like"),
    ("between", "between"),
    ("case", "case expressions"),
];

pub(super) fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s.to_ascii_lowercase().as_str())
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let t = self.peek();
        Error::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Quoted(s) => format!("\"{}\"", s),
            Tok::Int(i) => format!("`{}`", i),
            Tok::Double(d) => format!("`{}`", d),
            Tok::Str(s) => format!("'{}'", s),
            Tok::Sym(s) => format!("`{}`", s),
            Tok::Eof => "end of input".into(),
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let t = self.peek();
        if let Tok::Ident(s) = &t.tok {
            let lower = s.to_ascii_lowercase();
            if let Some((_, feature)) = UNSUPPORTED.iter().find(|(k, _)| *k == lower) {
                return Error::Unsupported { line: t.line, col: t.col, feature: feature.to_string() };
            }
        }
        self.error(format!("expected {}, found {}", what, Self::describe(&t.tok)))
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s.eq_ignore_ascii_case(k))
    }

    fn kw_at(&self, off: usize, k: &str) -> bool {
        matches!(self.peek_at(off), Tok::Ident(s) if s.eq_ignore_ascii_case(k))
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<()> {
        if self.eat_kw(k) { Ok(()) } else { Err(self.unexpected(&format!("`{}`", k))) }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) { Ok(()) } else { Err(self.unexpected(&format!("`{}`", s))) }
    }

    fn ident(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_reserved(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            Tok::Quoted(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn is_ident(&self) -> bool {
        match &self.peek().tok {
            Tok::Ident(s) => !is_reserved(s),
            Tok::Quoted(_) => true,
            _ => false,
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        if self.is_kw("create") {
            self.advance();
            self.expect_kw("table")?;
            let name = self.ident()?;
            self.expect_sym("(")?;
            let mut columns = Vec::new();
            loop {
                let c = self.ident()?;
                columns.push((c, self.column_type()?));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
            Ok(Statement::CreateTable(TableSchema { name, columns }))
        } else {
            Ok(Statement::Query(self.query()?))
        }
    }

    fn column_type(&mut self) -> Result<ColumnType> {
        let t = self.peek().clone();
        let Tok::Ident(word) = &t.tok else { return Err(self.unexpected("a column type")) };
        self.advance();
        let ty = match word.to_ascii_lowercase().as_str() {
            "int" | "integer" | "bigint" | "smallint" => ColumnType::Int,
            "text" | "varchar" | "char" | "string" => ColumnType::Text,
            "boolean" | "bool" => ColumnType::Bool,
            "float" | "real" | "double" => {
                self.eat_kw("precision");
                ColumnType::Double
            }
            _ => {
                return Err(Error::Syntax { line: t.line, col: t.col, msg: format!("unknown column type `{}`", word) })
            }
        };
        if self.eat_sym("(") {
            while !self.eat_sym(")") {
                if matches!(self.peek().tok, Tok::Eof) {
                    return Err(self.unexpected("`)`"));
                }
                self.advance();
            }
        }
        Ok(ty)
    }

    fn query(&mut self) -> Result<SqlQuery> {
        let mut q = self.query_term()?;
        loop {
            let op = if self.is_kw("union") {
                SetOp::Union
            } else if self.is_kw("except") {
                SetOp::Except
            } else {
                return Ok(q);
            };
            self.advance();
            let all = self.eat_kw("all");
            let r = self.query_term()?;
            q = SqlQuery::SetOp(op, all, Box::new(q), Box::new(r));
        }
    }

    fn query_term(&mut self) -> Result<SqlQuery> {
        let mut q = self.query_primary()?;
        while self.eat_kw("intersect") {
            let all = self.eat_kw("all");
            let r = self.query_primary()?;
            q = SqlQuery::SetOp(SetOp::Intersect, all, Box::new(q), Box::new(r));
        }
        Ok(q)
    }

    fn query_primary(&mut self) -> Result<SqlQuery> {
        if self.eat_sym("(") {
            let q = self.query()?;
            self.expect_sym(")")?;
            return Ok(q);
        }
        if self.is_kw("table") {
            // `table R` stands for `select * from R`
            let t = self.advance();
            let name = self.ident()?;
            return Ok(SqlQuery::Select(Box::new(SelectBlock {
                items: vec![SelectItem::Star(None)],
                from: vec![FromItem { source: FromSource::Table(name), alias: None, columns: None, line: t.line, col: t.col }],
                where_: None,
                group_by: vec![],
                having: None,
                line: t.line,
                col: t.col,
            })));
        }
        let start = self.peek().clone();
        if !self.is_kw("select") {
            return Err(self.unexpected("a query"));
        }
        self.advance();
        if self.is_kw("distinct") {
            return Err(self.unexpected("a select list"));
        }
        self.eat_kw("all");
        let mut items = Vec::new();
        loop {
            items.push(self.select_item()?);
            if !self.eat_sym(",") {
                break;
            }
        }
        if !self.is_kw("from") {
            return Err(self.unexpected("`from`"));
        }
        self.advance();
        let mut from = Vec::new();
        loop {
            from.push(self.source_item()?);
            if !self.eat_sym(",") {
                break;
            }
        }
        let where_ = if self.eat_kw("where") { Some(self.cond()?) } else { None };
        let mut group_by = Vec::new();
        if self.eat_kw("group") {
            self.expect_kw("by")?;
            loop {
                let e = self.expr()?;
                if !matches!(e, SqlExpr::Column { .. }) {
                    return Err(Error::Unsupported {
                        line: start.line,
                        col: start.col,
                        feature: "grouping by an expression other than a column".into(),
                    });
                }
                group_by.push(e);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        let having = if self.eat_kw("having") { Some(self.cond()?) } else { None };
        if self.is_kw("order") || self.is_kw("limit") {
            return Err(self.unexpected("end of query"));
        }
        Ok(SqlQuery::Select(Box::new(SelectBlock {
            items,
            from,
            where_,
            group_by,
            having,
            line: start.line,
            col: start.col,
        })))
    }

    fn select_item(&mut self) -> Result<SelectItem> {
        if self.eat_sym("*") {
            return Ok(SelectItem::Star(None));
        }
        if self.is_ident() && matches!(self.peek_at(1), Tok::Sym(".")) && matches!(self.peek_at(2), Tok::Sym("*")) {
            let q = self.ident()?;
            self.advance();
            self.advance();
            return Ok(SelectItem::Star(Some(q)));
        }
        let e = self.expr()?;
        let alias = if self.eat_kw("as") || self.is_ident() { Some(self.ident()?) } else { None };
        Ok(SelectItem::Expr(e, alias))
    }

    fn source_item(&mut self) -> Result<FromItem> {
        let t = self.peek().clone();
        let source = if self.eat_sym("(") {
            let q = self.query()?;
            self.expect_sym(")")?;
            FromSource::Query(q)
        } else if self.eat_kw("table") {
            FromSource::Table(self.ident()?)
        } else {
            FromSource::Table(self.ident()?)
        };
        let alias = if self.eat_kw("as") || self.is_ident() { Some(self.ident()?) } else { None };
        let columns = if alias.is_some() && self.eat_sym("(") {
            let mut cs = vec![self.ident()?];
            while self.eat_sym(",") {
                cs.push(self.ident()?);
            }
            self.expect_sym(")")?;
            Some(cs)
        } else {
            None
        };
        Ok(FromItem { source, alias, columns, line: t.line, col: t.col })
    }

    fn cond(&mut self) -> Result<Cond> {
        let mut c = self.cond_and()?;
        while self.eat_kw("or") {
            c = Cond::Or(Box::new(c), Box::new(self.cond_and()?));
        }
        Ok(c)
    }

    fn cond_and(&mut self) -> Result<Cond> {
        let mut c = self.cond_not()?;
        while self.eat_kw("and") {
            c = Cond::And(Box::new(c), Box::new(self.cond_not()?));
        }
        Ok(c)
    }

    fn cond_not(&mut self) -> Result<Cond> {
        if self.eat_kw("not") {
            return Ok(Cond::Not(Box::new(self.cond_not()?)));
        }
        self.cond_atom()
    }

    fn sub_query(&mut self) -> Result<SqlQuery> {
        self.expect_sym("(")?;
        let q = self.query()?;
        self.expect_sym(")")?;
        Ok(q)
    }

    fn cond_atom(&mut self) -> Result<Cond> {
        if self.eat_kw("exists") {
            return Ok(Cond::Exists(Box::new(self.sub_query()?)));
        }
        if (self.is_kw("true") || self.is_kw("false")) && self.ends_condition(1) {
            let t = self.eat_kw("true");
            if !t {
                self.advance();
            }
            return Ok(if t { Cond::True } else { Cond::False });
        }
        if self.is_sym("(") && !(self.kw_at(1, "select") || self.kw_at(1, "table")) {
            // a parenthesised condition, or an expression (list) starting with `(`
            let save = self.pos;
            self.advance();
            if let Ok(c) = self.cond() {
                if self.eat_sym(")") && self.ends_condition(0) {
                    return Ok(c);
                }
            }
            self.pos = save;
            if let Some(c) = self.try_tuple_in()? {
                return Ok(c);
            }
            self.pos = save;
        }
        let lhs = self.expr()?;
        self.predicate(lhs)
    }

    /// True when the token `off` ahead cannot continue an expression.
    fn ends_condition(&self, off: usize) -> bool {
        match self.peek_at(off) {
            Tok::Sym(s) => matches!(*s, ")" | ";" | ","),
            Tok::Eof => true,
            Tok::Ident(s) => {
                let s = s.to_ascii_lowercase();
                matches!(
                    s.as_str(),
                    "and" | "or" | "group" | "having" | "union" | "intersect" | "except" | "order" | "limit"
                )
            }
            _ => false,
        }
    }

    fn try_tuple_in(&mut self) -> Result<Option<Cond>> {
        self.expect_sym("(")?;
        let mut es = vec![match self.expr() {
            Ok(e) => e,
            Err(_) => return Ok(None),
        }];
        if !self.is_sym(",") {
            return Ok(None);
        }
        while self.eat_sym(",") {
            es.push(self.expr()?);
        }
        self.expect_sym(")")?;
        let negated = self.eat_kw("not");
        self.expect_kw("in")?;
        let q = self.sub_query()?;
        let c = Cond::In(es, Box::new(q));
        Ok(Some(if negated { Cond::Not(Box::new(c)) } else { c }))
    }

    fn comparison(&mut self) -> Option<Pred> {
        let p = match &self.peek().tok {
            Tok::Sym("=") => Pred::Eq,
            Tok::Sym("<>") | Tok::Sym("!=") => Pred::Ne,
            Tok::Sym("<") => Pred::Lt,
            Tok::Sym("<=") => Pred::Le,
            Tok::Sym(">") => Pred::Gt,
            Tok::Sym(">=") => Pred::Ge,
            _ => return None,
        };
        self.advance();
        Some(p)
    }

    fn predicate(&mut self, lhs: SqlExpr) -> Result<Cond> {
        if let Some(p) = self.comparison() {
            let quant = if self.eat_kw("all") {
                Some(Quantifier::All)
            } else if self.eat_kw("any") || self.eat_kw("some") {
                Some(Quantifier::Any)
            } else {
                None
            };
            if let Some(qt) = quant {
                let q = self.sub_query()?;
                return Ok(Cond::Quant(p, qt, lhs, Box::new(q)));
            }
            if self.is_sym("(") && (self.kw_at(1, "select") || self.kw_at(1, "table")) {
                return Err(Error::Unsupported {
                    line: self.peek().line,
                    col: self.peek().col,
                    feature: "scalar sub-queries".into(),
                });
            }
            let rhs = self.expr()?;
            return Ok(Cond::Cmp(p, lhs, rhs));
        }
        let negated = self.is_kw("not") && self.kw_at(1, "in");
        if negated {
            self.advance();
        }
        if self.eat_kw("in") {
            if !(self.is_sym("(") && (self.kw_at(1, "select") || self.kw_at(1, "table") || matches!(self.peek_at(1), Tok::Sym("(")))) {
                return Err(Error::Unsupported {
                    line: self.peek().line,
                    col: self.peek().col,
                    feature: "in with a value list".into(),
                });
            }
            let q = self.sub_query()?;
            let c = Cond::In(vec![lhs], Box::new(q));
            return Ok(if negated { Cond::Not(Box::new(c)) } else { c });
        }
        if self.ends_condition(0) {
            // a bare boolean expression
            return Ok(Cond::Cmp(Pred::Eq, lhs, SqlExpr::Const(SqlValue::Bool(true))));
        }
        Err(self.unexpected("a comparison"))
    }

    fn expr(&mut self) -> Result<SqlExpr> {
        let mut e = self.additive()?;
        while self.eat_sym("||") {
            e = SqlExpr::Arith(ArithOp::Concat, Box::new(e), Box::new(self.additive()?));
        }
        Ok(e)
    }

    fn additive(&mut self) -> Result<SqlExpr> {
        let mut e = self.multiplicative()?;
        loop {
            let op = if self.eat_sym("+") {
                ArithOp::Add
            } else if self.eat_sym("-") {
                ArithOp::Sub
            } else {
                return Ok(e);
            };
            e = SqlExpr::Arith(op, Box::new(e), Box::new(self.multiplicative()?));
        }
    }

    fn multiplicative(&mut self) -> Result<SqlExpr> {
        let mut e = self.unary()?;
        loop {
            let op = if self.eat_sym("*") {
                ArithOp::Mul
            } else if self.eat_sym("/") {
                ArithOp::Div
            } else {
                return Ok(e);
            };
            e = SqlExpr::Arith(op, Box::new(e), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<SqlExpr> {
        if self.eat_sym("-") {
            return Ok(SqlExpr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<SqlExpr> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(i) => {
                self.advance();
                Ok(SqlExpr::Const(SqlValue::Int(i.clone())))
            }
            Tok::Double(d) => {
                self.advance();
                Ok(SqlExpr::Const(SqlValue::Double(*d)))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(SqlExpr::Const(SqlValue::Text(s.clone())))
            }
            Tok::Sym("(") => {
                if self.kw_at(1, "select") {
                    return Err(Error::Unsupported { line: t.line, col: t.col, feature: "scalar sub-queries".into() });
                }
                self.advance();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(w) => {
                let lower = w.to_ascii_lowercase();
                match lower.as_str() {
                    "null" => {
                        self.advance();
                        return Ok(SqlExpr::Const(SqlValue::Null));
                    }
                    "true" | "false" => {
                        self.advance();
                        return Ok(SqlExpr::Const(SqlValue::Bool(lower == "true")));
                    }
                    "sum" | "count" | "avg" | "min" | "max" if matches!(self.peek_at(1), Tok::Sym("(")) => {
                        self.advance();
                        self.advance();
                        if self.is_kw("distinct") {
                            return Err(self.unexpected("an aggregate argument"));
                        }
                        self.eat_kw("all");
                        if lower == "count" && self.eat_sym("*") {
                            self.expect_sym(")")?;
                            return Ok(SqlExpr::Agg(AggFn::CountStar, Box::new(SqlExpr::Const(SqlValue::int(1)))));
                        }
                        let e = self.expr()?;
                        self.expect_sym(")")?;
                        let f = match lower.as_str() {
                            "sum" => AggFn::Sum,
                            "count" => AggFn::Count,
                            "avg" => AggFn::Avg,
                            "min" => AggFn::Min,
                            _ => AggFn::Max,
                        };
                        return Ok(SqlExpr::Agg(f, Box::new(e)));
                    }
                    "case" => return Err(self.unexpected("an expression")),
                    _ => {}
                }
                self.column()
            }
            Tok::Quoted(_) => self.column(),
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn column(&mut self) -> Result<SqlExpr> {
        let t = self.peek().clone();
        let first = self.ident()?;
        if matches!(self.peek_at(1), Tok::Ident(_) | Tok::Quoted(_)) && self.eat_sym(".") {
            let name = self.ident()?;
            return Ok(SqlExpr::Column { qualifier: Some(first), name, line: t.line, col: t.col });
        }
        if self.is_sym("(") {
            return Err(Error::Unsupported { line: t.line, col: t.col, feature: format!("function `{}`", first) });
        }
        Ok(SqlExpr::Column { qualifier: None, name: first, line: t.line, col: t.col })
    }
}

/// Parses a script: `create table` statements and queries, separated by
/// semicolons.
pub fn parse(src: &str) -> Result<Vec<Statement>> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut out = Vec::new();
    loop {
        while p.eat_sym(";") {}
        if matches!(p.peek().tok, Tok::Eof) {
            return Ok(out);
        }
        out.push(p.statement()?);
        if !p.eat_sym(";") && !matches!(p.peek().tok, Tok::Eof) {
            return Err(p.unexpected("`;`"));
        }
    }
}
