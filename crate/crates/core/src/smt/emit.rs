use std::collections::BTreeSet;
use std::fmt::Write;

use chrono::Datelike;

use super::encode::Encoding;
use super::formula::{Atom, FormulaId, Node};
use crate::model::{AttrKind, Value};

pub(crate) fn var(name: &impl std::fmt::Display) -> String {
    format!("|{name}|")
}

pub(crate) fn present_var(name: &impl std::fmt::Display) -> String {
    format!("|present:{name}|")
}

pub(crate) fn member_var(name: &impl std::fmt::Display, j: usize) -> String {
    format!("|{name}#{j}|")
}

pub(crate) fn real(x: f64) -> String {
    let magnitude = x.abs().to_string();
    let magnitude = if magnitude.contains('.') { magnitude } else { format!("{magnitude}.0") };
    if x.is_sign_negative() && x != 0.0 {
        format!("(- {magnitude})")
    } else {
        magnitude
    }
}

fn nary(op: &str, items: Vec<String>, empty: &str) -> String {
    match items.len() {
        0 => empty.to_owned(),
        1 => items.into_iter().next().expect("one item"),
        _ => format!("({op} {})", items.join(" ")),
    }
}

impl Encoding {
    /// String constants of the `Str` sort, in symbol order.
    pub(crate) fn string_constants(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .attrs()
            .iter()
            .filter(|(_, d)| d.kind() == AttrKind::String)
            .flat_map(|(_, d)| d.universe().iter().filter_map(Value::as_str))
            .collect();
        set.into_iter().map(str::to_owned).collect()
    }

    fn constant(&self, strings: &[String], v: &Value) -> String {
        match v {
            Value::Bool(b) => b.to_string(),
            Value::Double(x) => real(*x),
            Value::Str(s) => {
                let i = strings.binary_search(s).expect("string constant declared");
                format!("s{i}")
            }
            Value::Date(d) => {
                let days = d.num_days_from_ce();
                if days < 0 {
                    format!("(- {})", -i64::from(days))
                } else {
                    days.to_string()
                }
            }
        }
    }

    fn atom_term(&self, strings: &[String], atom: Atom) -> String {
        let attrs = self.attrs();
        match atom {
            Atom::Present(a) => present_var(&attrs[a].0),
            Atom::Eq(a, i) => {
                let (name, domain) = &attrs[a];
                format!("(= {} {})", var(name), self.constant(strings, &domain.universe()[i]))
            }
            Atom::Member(a, j) => member_var(&attrs[a].0, j),
        }
    }

    fn term(&self, strings: &[String], f: FormulaId) -> String {
        match self.arena().node(f) {
            Node::True => "true".into(),
            Node::False => "false".into(),
            Node::Atom(a) => self.atom_term(strings, *a),
            _ => format!("f{}", f.index()),
        }
    }

    /// A complete SMT-LIB 2 script asserting `goal` over the domain.
    pub fn emit(&self, goal: FormulaId) -> String {
        let strings = self.string_constants();
        let mut out = String::new();
        out.push_str("(set-option :produce-models true)\n(set-logic QF_LIRA)\n");
        if !strings.is_empty() {
            let ctors: Vec<String> = (0..strings.len()).map(|i| format!("(s{i})")).collect();
            let _ = writeln!(out, "(declare-datatypes ((Str 0)) (({})))", ctors.join(" "));
            for (i, s) in strings.iter().enumerate() {
                let _ = writeln!(out, "; s{i} = {}", Value::Str(s.clone()));
            }
        }
        for (name, domain) in self.attrs() {
            let sort = match domain.kind() {
                AttrKind::Boolean => Some("Bool"),
                AttrKind::Double => Some("Real"),
                AttrKind::String => Some("Str"),
                AttrKind::Date => Some("Int"),
                AttrKind::StringSet => None,
            };
            if domain.allow_absent() {
                let _ = writeln!(out, "(declare-const {} Bool)", present_var(name));
            }
            match sort {
                Some(sort) => {
                    let _ = writeln!(out, "(declare-const {} {sort})", var(name));
                    let options: Vec<String> = domain
                        .universe()
                        .iter()
                        .map(|v| format!("(= {} {})", var(name), self.constant(&strings, v)))
                        .collect();
                    let _ = writeln!(out, "(assert {})", nary("or", options, "false"));
                }
                None => {
                    let flags: Vec<String> =
                        (0..domain.universe().len()).map(|j| member_var(name, j)).collect();
                    for f in &flags {
                        let _ = writeln!(out, "(declare-const {f} Bool)");
                    }
                    let some = nary("or", flags.clone(), "false");
                    if domain.allow_absent() {
                        let none: Vec<String> = flags.iter().map(|f| format!("(not {f})")).collect();
                        let p = present_var(name);
                        let _ = writeln!(out, "(assert (=> {p} {some}))");
                        let _ = writeln!(out, "(assert (=> (not {p}) {}))", nary("and", none, "true"));
                    } else {
                        let _ = writeln!(out, "(assert {some})");
                    }
                }
            }
        }
        for f in self.arena().reachable(&[goal]) {
            let body = match self.arena().node(f) {
                Node::Not(g) => format!("(not {})", self.term(&strings, *g)),
                Node::And(gs) => format!("(and {})", self.terms(&strings, gs)),
                Node::Or(gs) => format!("(or {})", self.terms(&strings, gs)),
                _ => continue,
            };
            let _ = writeln!(out, "(define-fun f{} () Bool {body})", f.index());
        }
        let _ = writeln!(out, "(assert {})", self.term(&strings, goal));
        out.push_str("(check-sat)\n(get-model)\n");
        out
    }

    fn terms(&self, strings: &[String], fs: &[FormulaId]) -> String {
        fs.iter().map(|&g| self.term(strings, g)).collect::<Vec<_>>().join(" ")
    }
}
