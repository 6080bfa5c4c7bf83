//! The stage chain against results computed directly from the rows.

use std::collections::BTreeMap;

use dbx_core::data::{bag_eq, value_to_data, ColumnType, Data, SqlValue};
use dbx_core::pipeline::{compile_sqlalg, Options, Stage};
use dbx_core::sqlalg::{check_query, Expr, Formula, Pred, Query, Select};
use dbx_harness::difftest::case_seed;
use dbx_harness::fuzz::{gen_case, Config};

fn as_f64(v: &SqlValue) -> Option<f64> {
    match v {
        SqlValue::Int(i) => Some(i.to_string().parse().unwrap()),
        SqlValue::Double(d) => Some(*d),
        _ => None,
    }
}

fn holds(p: Pred, x: f64, y: f64) -> bool {
    match p {
        Pred::Eq => x == y,
        Pred::Ne => x != y,
        Pred::Lt => x < y,
        Pred::Le => x <= y,
        Pred::Gt => x > y,
        Pred::Ge => x >= y,
    }
}

fn check_all_stages(q: &Query, inst: &dbx_core::data::Instance, want: &[Data]) {
    check_query(&inst.schema, &[], q).unwrap();
    for optimize in [false, true] {
        let c = compile_sqlalg(&inst.schema, q, Options { optimize }).unwrap();
        for s in Stage::ALL {
            let got = c.eval(s, inst).unwrap();
            assert!(bag_eq(got.as_bag().unwrap(), want), "{} at {}: got {} want {:?}", q, s, got, want);
        }
    }
}

#[test]
fn filters_match_row_by_row_evaluation() {
    let mut checked = 0;
    for i in 0..60 {
        let inst = gen_case(case_seed(11, i), Config::default()).instance;
        for t in &inst.schema.tables {
            if t.column_type("a") == Some(ColumnType::Text) {
                continue;
            }
            let col = t.qualified("a");
            let rows = inst.table(&t.name).unwrap();
            for p in Pred::ALL {
                for c in [Expr::int(0), Expr::double(-0.5)] {
                    let cv = match &c {
                        Expr::Const(v) => as_f64(v).unwrap(),
                        _ => unreachable!(),
                    };
                    let q = Query::filter(Formula::Pred(p, Expr::attr(&col), c), Query::table(&t.name));
                    let want: Vec<Data> = rows
                        .iter()
                        .filter(|r| as_f64(&r[&col]).is_some_and(|x| holds(p, x, cv)))
                        .map(|r| Data::record(r.iter().map(|(k, v)| (k.clone(), value_to_data(v)))))
                        .collect();
                    check_all_stages(&q, &inst, &want);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 300, "{}", checked);
}

#[test]
fn group_counts_match_a_hash_count() {
    for i in 0..60 {
        let inst = gen_case(case_seed(12, i), Config::default()).instance;
        for t in &inst.schema.tables {
            let col = t.qualified("a");
            let mut counts: BTreeMap<String, (SqlValue, i64)> = BTreeMap::new();
            for r in inst.table(&t.name).unwrap() {
                let v = r[&col].clone();
                counts.entry(format!("{:?}", v)).or_insert((v, 0)).1 += 1;
            }
            let want: Vec<Data> = counts
                .into_values()
                .map(|(k, n)| Data::record([("k".to_string(), value_to_data(&k)), ("n".to_string(), Data::left(Data::int(n)))]))
                .collect();
            let q = Query::Group {
                select: vec![Select::rename(&col, "k"), Select::new(Expr::count_star(), "n")],
                keys: vec![col.clone()],
                having: Formula::True,
                input: Box::new(Query::table(&t.name)),
            };
            check_all_stages(&q, &inst, &want);
        }
    }
}
