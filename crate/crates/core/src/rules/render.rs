//! Canonical rule-language text for rules, expressions and terms.
//!
//! The output re-parses to the identical AST: parentheses are inserted only
//! where precedence requires them, and literals that would otherwise read as
//! keywords or numbers are quoted.

use std::fmt::{self, Write as _};

use super::ast::*;
use super::parser::KEYWORDS;
use crate::syntax::lexer::{is_bare_word, quote};

const QUANT: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &RuleExpr) -> u8 {
    match e {
        RuleExpr::Forall { .. } | RuleExpr::Exists { .. } => QUANT,
        RuleExpr::Implies(..) => IMPLIES,
        RuleExpr::Or(..) => OR,
        RuleExpr::And(..) => AND,
        RuleExpr::Not(_) => NOT,
        _ => ATOM,
    }
}

fn word(s: &str) -> String {
    if is_bare_word(s) && !KEYWORDS.contains(&s) && s != "consent" {
        s.to_string()
    } else {
        quote(s)
    }
}

pub fn render_value(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Count(n) => n.to_string(),
        Value::Name(t) | Value::Neighborhood(t) => word(t.as_str()),
        Value::Text(s) => quote(s),
        Value::Movement(x) => x.as_str().to_string(),
        Value::Interaction(x) => x.as_str().to_string(),
        Value::Risk(x) => x.as_str().to_string(),
        Value::Economic(x) => x.as_str().to_string(),
        Value::Scale(x) => x.as_str().to_string(),
        Value::Goal(x) => x.as_str().to_string(),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Field { var, field } => write!(f, "{var}.{}", field.name()),
            Term::Literal(v) => f.write_str(&render_value(v)),
            Term::SetLiteral { items, .. } => {
                let parts: Vec<String> = items.iter().map(render_value).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            Term::Universe => f.write_str("universe"),
            Term::Card(inner) => write!(f, "card({inner})"),
        }
    }
}

impl fmt::Display for EndpointPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndpointPattern::Any => f.write_str("*"),
            EndpointPattern::Kinds(ks) if ks.len() == 1 => f.write_str(ks[0].as_str()),
            EndpointPattern::Kinds(ks) => {
                let parts: Vec<&str> = ks.iter().map(|k| k.as_str()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

impl fmt::Display for FlowPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "flow({} -> {} : {}", self.source, self.dest, self.payload)?;
        if let ConsentPattern::Is(c) = self.consent {
            write!(f, ", consent={c}")?;
        }
        f.write_str(")")
    }
}

fn scaled(coeff: u64, term: &Term, force: bool) -> String {
    if coeff != 1 || force {
        format!("{coeff} * {term}")
    } else {
        term.to_string()
    }
}

fn write_expr(out: &mut String, e: &RuleExpr, min: u8) {
    let paren = level(e) < min;
    if paren {
        out.push('(');
    }
    match e {
        RuleExpr::Forall { .. } | RuleExpr::Exists { .. } => {
            let forall = matches!(e, RuleExpr::Forall { .. });
            out.push_str(if forall { "forall " } else { "exists " });
            let mut cur = e;
            let mut first = true;
            loop {
                let (var, domain, body) = match cur {
                    RuleExpr::Forall { var, domain, body } if forall => (var, domain, body),
                    RuleExpr::Exists { var, domain, body } if !forall => (var, domain, body),
                    _ => break,
                };
                if !first {
                    out.push_str(", ");
                }
                first = false;
                let _ = write!(out, "{var} in {}", domain_keyword(*domain));
                cur = body;
            }
            out.push_str(": ");
            write_expr(out, cur, QUANT);
        }
        RuleExpr::Implies(a, b) => {
            write_expr(out, a, OR);
            out.push_str(" implies ");
            write_expr(out, b, IMPLIES);
        }
        RuleExpr::Or(a, b) => {
            write_expr(out, a, OR);
            out.push_str(" or ");
            write_expr(out, b, AND);
        }
        RuleExpr::And(a, b) => {
            write_expr(out, a, AND);
            out.push_str(" and ");
            write_expr(out, b, NOT);
        }
        RuleExpr::Not(a) => {
            out.push_str("not ");
            write_expr(out, a, NOT);
        }
        RuleExpr::Compare { op, lhs, rhs } => {
            let _ = write!(out, "{lhs} {} {rhs}", op.symbol());
        }
        RuleExpr::ScaledCompare {
            lhs_coeff,
            lhs,
            op,
            rhs_coeff,
            rhs,
        } => {
            let force = *lhs_coeff == 1 && *rhs_coeff == 1;
            let _ = write!(
                out,
                "{} {} {}",
                scaled(*lhs_coeff, lhs, force),
                op.symbol(),
                scaled(*rhs_coeff, rhs, false)
            );
        }
        RuleExpr::Member { elem, set } => {
            let _ = write!(out, "{elem} in {set}");
        }
        RuleExpr::Flow(p) => {
            let _ = write!(out, "{p}");
        }
        RuleExpr::Field { var, field } => {
            let _ = write!(out, "{var}.{}", field.name());
        }
        RuleExpr::Literal(b) => {
            let _ = write!(out, "{b}");
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for RuleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_expr(&mut out, self, QUANT);
        f.write_str(&out)
    }
}

impl fmt::Display for RuleDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} right={} perspective={}", self.id, self.right, self.perspective)?;
        if !self.statement.is_empty() {
            write!(f, "\n    statement={}", quote(&self.statement))?;
        }
        write!(f, " :\n    {}\n", self.expr)
    }
}

/// Renders a whole rule set as a `.rules` file.
pub fn render_rules(set: &RuleSet) -> String {
    set.rules
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_rule;

    fn roundtrip(body: &str) -> String {
        let src = format!("rule X right=safety perspective=residents-iot_service: {body}");
        let rule = parse_rule(&src).unwrap();
        let again = parse_rule(&rule.to_string()).unwrap();
        assert_eq!(rule, again, "{}", rule);
        rule.expr.to_string()
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(roundtrip("true and (false or true)"), "true and (false or true)");
        assert_eq!(roundtrip("(true and false) or true"), "true and false or true");
        assert_eq!(roundtrip("(true implies false) implies true"), "(true implies false) implies true");
        assert_eq!(roundtrip("not (true or false)"), "not (true or false)");
    }

    #[test]
    fn merged_binders_and_nested_quantifiers() {
        assert_eq!(
            roundtrip("forall g in governments, d in devices: g.oversight_iot_safety or d.agreement_violated"),
            "forall g in governments, d in devices: g.oversight_iot_safety or d.agreement_violated"
        );
        assert_eq!(
            roundtrip("true and (exists d in devices: d.transmits_harmful)"),
            "true and (exists d in devices: d.transmits_harmful)"
        );
    }

    #[test]
    fn literals_that_look_like_keywords_are_quoted() {
        let out = roundtrip("forall d in devices: \"universe\" in d.deploy_neighborhoods or \"Old City\" in d.deploy_neighborhoods");
        assert!(out.contains("\"universe\" in"), "{out}");
        assert!(out.contains("\"Old City\""), "{out}");
    }

    #[test]
    fn scaled_with_unit_coefficients() {
        let out = roundtrip("forall d in devices: 1 * card(d.deploy_neighborhoods) >= 1 * card(universe)");
        assert_eq!(out, "forall d in devices: 1 * card(d.deploy_neighborhoods) >= card(universe)");
    }
}
