use std::fmt::Write;

use super::ast::{Clause, Connective, Operator, RqlQuery};

fn quote(p: &str, out: &mut String) {
    out.push('"');
    for c in p.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

pub fn render_clause(c: &Clause) -> String {
    let mut out = c.label.as_str().to_string();
    let mut relation = None;
    for op in &c.operators {
        if op.is_relation() {
            relation = Some(*op);
        } else if *op != Operator::Eq {
            let _ = write!(out, " {}", op.keyword());
        }
    }
    match relation {
        Some(op) => {
            let (open, close) = if op == Operator::InSet { ('{', '}') } else { ('[', ']') };
            out.push_str(" in ");
            out.push(open);
            for (i, p) in c.terminal.phrases.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                quote(p, &mut out);
            }
            out.push(close);
        }
        None => {
            let modifiers = c.operators.iter().any(|o| *o != Operator::Eq);
            if !modifiers {
                out.push('=');
            } else if c.has(Operator::Near) || c.has(Operator::Similar) {
                out.push(' ');
            } else {
                out.push_str(" = ");
            }
            quote(c.phrase(), &mut out);
        }
    }
    out
}

fn render_tree(q: &RqlQuery, t: &Connective, out: &mut String) {
    match t {
        Connective::Leaf(i) => out.push_str(&render_clause(&q.clauses[*i])),
        Connective::And(l, r) => {
            wrap(q, l, matches!(**l, Connective::Or(..)), out);
            out.push_str(" & ");
            wrap(q, r, !matches!(**r, Connective::Leaf(_)), out);
        }
        Connective::Or(l, r) => {
            wrap(q, l, false, out);
            out.push_str(" | ");
            wrap(q, r, matches!(**r, Connective::Or(..)), out);
        }
    }
}

fn wrap(q: &RqlQuery, t: &Connective, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
    }
    render_tree(q, t, out);
    if parens {
        out.push(')');
    }
}

/// Canonical text form. `parse_rql(&render_rql(q)) == q` for valid `q`.
pub fn render_rql(q: &RqlQuery) -> String {
    let mut out = String::from("select x where ");
    render_tree(q, &q.tree, &mut out);
    out
}
