//! Canonical text form. Everything printed here parses back to an equal AST.

use std::fmt::{self, Display, Formatter, Write};

use crate::model::{Document, Expr, Pdp, Policy, PolicySet, Rule};

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Name(n) => write!(f, "{n}"),
            Expr::Literal(v) => write!(f, "{v}"),
            Expr::Set(s) => write!(f, "{s}"),
            Expr::Not(e) => write!(f, "not({e})"),
            Expr::Call(func, a, b) => write!(f, "{}({a}, {b})", func.name()),
        }
    }
}

impl Display for Rule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "( {} target: {} )", self.effect, self.target)
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_policy(out: &mut String, policy: &Policy, depth: usize) {
    indent(out, depth);
    match policy {
        Policy::Rule(r) => {
            let _ = write!(out, "{r}");
        }
        Policy::Set(s) => write_set(out, s, depth),
    }
    out.push('\n');
}

fn write_children(out: &mut String, children: &[Policy], depth: usize) {
    indent(out, depth + 1);
    out.push_str("policies:\n");
    for child in children {
        write_policy(out, child, depth + 2);
    }
    indent(out, depth);
    out.push('}');
}

fn write_set(out: &mut String, set: &PolicySet, depth: usize) {
    let _ = writeln!(out, "{{ {}", set.alg());
    if let Some(t) = set.target() {
        indent(out, depth + 1);
        let _ = writeln!(out, "target: {t}");
    }
    write_children(out, set.children(), depth);
}

impl Display for PolicySet {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_set(&mut out, self, 0);
        f.write_str(&out)
    }
}

impl Display for Policy {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Rule(r) => r.fmt(f),
            Policy::Set(s) => s.fmt(f),
        }
    }
}

impl Display for Pdp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut out = format!("pdp {{ {}\n", self.alg());
        write_children(&mut out, self.policies(), 0);
        f.write_str(&out)
    }
}

impl Display for Document {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Document::Pdp(p) => p.fmt(f),
            Document::Policy(p) => p.fmt(f),
        }
    }
}
