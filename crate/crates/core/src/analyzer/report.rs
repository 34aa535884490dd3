use std::fmt::Write;

use super::{CheckReport, Witness};
use crate::model::Decision;

fn decisions(ds: &[Decision]) -> String {
    if ds.is_empty() {
        return "-".into();
    }
    ds.iter().map(|d| d.name()).collect::<Vec<_>>().join(",")
}

impl CheckReport {
    /// Human-readable report. Timing is left out so output is reproducible.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.holds { "holds" } else { "violated" };
        let _ = writeln!(out, "{}: {verdict}", self.property);
        let s = &self.stats;
        let _ = writeln!(out, "  examined {} requests, {} violation(s)", s.examined, s.violations);
        if s.constraint_errors > 0 {
            let _ = writeln!(out, "  {} request(s) where a set constraint failed to evaluate", s.constraint_errors);
        }
        if s.constraint_absent > 0 {
            let _ = writeln!(
                out,
                "  warning: {} request(s) where a set constraint was absent (treated as non-members)",
                s.constraint_absent
            );
        }
        let total = s.violations + s.constraint_errors;
        for (i, w) in self.witnesses.iter().enumerate() {
            let _ = writeln!(
                out,
                "  witness {} of {total}: observed {}, expected {}",
                i + 1,
                decisions(&w.observed),
                decisions(&w.expected)
            );
            if let Some(note) = &w.note {
                let _ = writeln!(out, "    note: {note}");
            }
            write_request(&mut out, w);
        }
        out
    }

    /// Line-oriented report: a `PROPERTY HOLDS WITNESS_COUNT` header, then
    /// `witness`, `binding` and `note` rows keyed by witness number.
    pub fn render_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}\t{}\t{}", self.property, self.holds, self.witnesses.len());
        for (i, w) in self.witnesses.iter().enumerate() {
            let n = i + 1;
            let _ = writeln!(out, "witness\t{n}\t{}\t{}", decisions(&w.observed), decisions(&w.expected));
            for (name, binding) in w.request.iter() {
                let _ = writeln!(out, "binding\t{n}\t{name}\t{binding}");
            }
            if let Some(note) = &w.note {
                let _ = writeln!(out, "note\t{n}\t{}", note.replace(['\t', '\n'], " "));
            }
        }
        out
    }
}

fn write_request(out: &mut String, w: &Witness) {
    if w.request.is_empty() {
        out.push_str("    (no attributes)\n");
    }
    for (name, binding) in w.request.iter() {
        let _ = writeln!(out, "    ({name}, {binding})");
    }
}
