//! Human-readable explanations of verdicts.

use std::fmt::Write as _;

use super::ast::RuleDef;
use super::eval::{Verdict, Witness};

fn head(rule: &RuleDef) -> String {
    format!("{} ({}, {})", rule.id, rule.right, rule.perspective)
}

fn describe_witness(w: &Witness) -> String {
    let mut parts = Vec::new();
    if !w.bindings.is_empty() {
        let b: Vec<String> = w
            .bindings
            .iter()
            .map(|b| format!("{} = {}", b.var, b.entity.name))
            .collect();
        parts.push(format!("with {}", b.join(", ")));
    }
    for a in &w.atoms {
        let detail = if a.observed.is_empty() {
            String::new()
        } else {
            format!(" [{}]", a.observed.join("; "))
        };
        parts.push(format!("{} is {}{}", a.atom, a.holds, detail));
    }
    for f in &w.flows {
        parts.push(format!("flow {f}"));
    }
    if parts.is_empty() {
        "the rule's condition fails outright".to_string()
    } else {
        parts.join("; ")
    }
}

/// Explains `verdict`, which must come from evaluating `rule`.
pub fn explain(verdict: &Verdict, rule: &RuleDef) -> String {
    match verdict {
        Verdict::Compliant => format!("{} holds.", head(rule)),
        Verdict::Violated(ws) => {
            let mut out = format!(
                "{} is violated ({} witness{}):",
                head(rule),
                ws.len(),
                if ws.len() == 1 { "" } else { "es" }
            );
            for w in ws {
                let _ = write!(out, "\n  - {}", describe_witness(w));
            }
            out
        }
        Verdict::Indeterminate(atoms) => {
            let mut out = format!(
                "{} cannot be decided; the model does not settle:",
                head(rule)
            );
            for a in atoms {
                let _ = write!(out, "\n  - {}", a.atom);
                if !a.bindings.is_empty() {
                    let b: Vec<String> = a
                        .bindings
                        .iter()
                        .map(|b| format!("{} = {}", b.var, b.entity.name))
                        .collect();
                    let _ = write!(out, " (with {})", b.join(", "));
                }
            }
            out.push_str(
                "\n  Supply the missing facts in a .facts file (for example \
                 `flow <source> -> <dest> : <payload> consent=denied`), \
                 or judge with --world closed if the flows listed are complete.",
            );
            out
        }
    }
}
