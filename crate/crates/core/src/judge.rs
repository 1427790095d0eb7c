//! Judgment pipeline: apply facts, evaluate every rule, assemble a report.

use std::fmt::Write as _;

use serde::Serialize;

use crate::facts::{apply_facts, FactError, FactSet};
use crate::model::CityModel;
use crate::rules::ast::RuleSet;
use crate::rules::eval::{eval_rule, UnknownAtom, Verdict, Witness};
use crate::rules::explain::explain;
use crate::vocab::{Perspective, Right};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WorldMode {
    Open,
    Closed,
}

impl WorldMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WorldMode::Open => "open",
            WorldMode::Closed => "closed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentEntry {
    pub rule: String,
    pub right: Right,
    pub perspective: Perspective,
    pub verdict: Verdict,
    pub explanation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub compliant: usize,
    pub violated: usize,
    pub indeterminate: usize,
}

impl Summary {
    fn add(&mut self, v: &Verdict) {
        match v {
            Verdict::Compliant => self.compliant += 1,
            Verdict::Violated(_) => self.violated += 1,
            Verdict::Indeterminate(_) => self.indeterminate += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.compliant + self.violated + self.indeterminate
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentReport {
    pub scenario_name: String,
    pub world_mode: WorldMode,
    pub entries: Vec<JudgmentEntry>,
    pub summary: Summary,
    pub facts_applied: usize,
}

/// Orders ids so that digit runs compare numerically: P2 before P10.
fn natural_key(id: &str) -> Vec<(u8, u64, String)> {
    let mut out = Vec::new();
    let mut chars = id.chars().peekable();
    while let Some(&c) = chars.peek() {
        let digit = c.is_ascii_digit();
        let mut run = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_digit() != digit {
                break;
            }
            run.push(c);
            chars.next();
        }
        if digit {
            out.push((0, run.parse().unwrap_or(u64::MAX), String::new()));
        } else {
            out.push((1, 0, run.to_lowercase()));
        }
    }
    out
}

/// Judges `model` against every rule in `ruleset`.
pub fn judge(
    model: &CityModel,
    ruleset: &RuleSet,
    facts: Option<&FactSet>,
    world: WorldMode,
) -> Result<JudgmentReport, FactError> {
    let mut working = match facts {
        Some(f) => apply_facts(model, f)?,
        None => model.clone(),
    };
    if world == WorldMode::Closed {
        working.flows_complete = true;
    }
    let mut entries: Vec<JudgmentEntry> = ruleset
        .rules
        .iter()
        .map(|rule| {
            let verdict = eval_rule(rule, &working);
            JudgmentEntry {
                rule: rule.id.clone(),
                right: rule.right,
                perspective: rule.perspective,
                explanation: explain(&verdict, rule),
                verdict,
            }
        })
        .collect();
    entries.sort_by_cached_key(|e| natural_key(&e.rule));
    let mut summary = Summary::default();
    for e in &entries {
        summary.add(&e.verdict);
    }
    Ok(JudgmentReport {
        scenario_name: model.scenario_name.clone(),
        world_mode: world,
        entries,
        summary,
        facts_applied: facts.map_or(0, FactSet::len),
    })
}

/// Verdict counts grouped by right and by perspective.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Aggregate {
    pub by_right: Vec<(Right, Summary)>,
    pub by_perspective: Vec<(Perspective, Summary)>,
}

/// Groups a report's verdicts. Rights follow their declaration order,
/// perspectives the principle table order; empty groups are omitted.
pub fn aggregate(report: &JudgmentReport) -> Aggregate {
    let mut by_right = Vec::new();
    for right in Right::ALL.iter().copied() {
        let mut s = Summary::default();
        for e in report.entries.iter().filter(|e| e.right == right) {
            s.add(&e.verdict);
        }
        if s.total() > 0 {
            by_right.push((right, s));
        }
    }
    let mut order: Vec<Perspective> = Perspective::TABLE_ORDER.to_vec();
    for e in &report.entries {
        if !order.contains(&e.perspective) {
            order.push(e.perspective);
        }
    }
    let mut by_perspective = Vec::new();
    for p in order {
        let mut s = Summary::default();
        for e in report.entries.iter().filter(|e| e.perspective == p) {
            s.add(&e.verdict);
        }
        if s.total() > 0 {
            by_perspective.push((p, s));
        }
    }
    Aggregate {
        by_right,
        by_perspective,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    rule: &'a str,
    right: Right,
    perspective: Perspective,
    verdict: &'static str,
    witnesses: &'a [Witness],
    unknowns: &'a [UnknownAtom],
    explanation: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    scenario: &'a str,
    world_mode: WorldMode,
    facts_applied: usize,
    entries: Vec<JsonEntry<'a>>,
    summary: Summary,
}

fn to_json(report: &JudgmentReport) -> String {
    let entries = report
        .entries
        .iter()
        .map(|e| {
            let (witnesses, unknowns): (&[Witness], &[UnknownAtom]) = match &e.verdict {
                Verdict::Compliant => (&[], &[]),
                Verdict::Violated(ws) => (ws, &[]),
                Verdict::Indeterminate(us) => (&[], us),
            };
            JsonEntry {
                rule: &e.rule,
                right: e.right,
                perspective: e.perspective,
                verdict: e.verdict.label(),
                witnesses,
                unknowns,
                explanation: &e.explanation,
            }
        })
        .collect();
    let doc = JsonReport {
        scenario: &report.scenario_name,
        world_mode: report.world_mode,
        facts_applied: report.facts_applied,
        entries,
        summary: report.summary,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

struct Style {
    on: bool,
}

impl Style {
    fn paint(&self, code: &str, s: &str) -> String {
        if self.on {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    fn verdict(&self, v: &Verdict) -> String {
        let (code, label) = match v {
            Verdict::Compliant => ("32", "COMPLIANT"),
            Verdict::Violated(_) => ("1;31", "VIOLATED"),
            Verdict::Indeterminate(_) => ("33", "INDETERMINATE"),
        };
        self.paint(code, &format!("{label:<13}"))
    }
}

/// Text report grouped by right, optionally with ANSI colors.
pub fn render_text(report: &JudgmentReport, styled: bool) -> String {
    let style = Style { on: styled };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} ({} world, {} fact{} applied)",
        style.paint("1", "Scenario"),
        report.scenario_name,
        report.world_mode.as_str(),
        report.facts_applied,
        if report.facts_applied == 1 { "" } else { "s" }
    );
    for right in Right::ALL.iter().copied() {
        let group: Vec<&JudgmentEntry> = report.entries.iter().filter(|e| e.right == right).collect();
        if group.is_empty() {
            continue;
        }
        let _ = writeln!(out, "\n{}", style.paint("1", right.as_str()));
        for e in group {
            let _ = writeln!(
                out,
                "  {:<5} {} {}",
                e.rule,
                style.verdict(&e.verdict),
                e.perspective
            );
            for line in e.explanation.lines().skip(1) {
                let _ = writeln!(out, "        {}", line.trim_start());
            }
        }
    }
    let s = report.summary;
    let _ = writeln!(
        out,
        "\n{} compliant, {} violated, {} indeterminate",
        s.compliant, s.violated, s.indeterminate
    );
    out
}

/// Renders a report; identical reports render to identical bytes.
pub fn render_report(report: &JudgmentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report, false),
        ReportFormat::Json => to_json(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::parser::parse_rules;

    #[test]
    fn natural_order() {
        let mut ids = vec!["P10", "P2", "P1", "SafetyPrinciple", "P13"];
        ids.sort_by_key(|s| natural_key(s));
        assert_eq!(ids, vec!["P1", "P2", "P10", "P13", "SafetyPrinciple"]);
    }

    #[test]
    fn empty_ruleset() {
        let rs = RuleSet {
            name: "none".into(),
            rules: vec![],
        };
        let r = judge(&CityModel::new("x"), &rs, None, WorldMode::Open).unwrap();
        assert!(r.entries.is_empty());
        assert_eq!(r.summary, Summary::default());
        assert_eq!(aggregate(&r), Aggregate::default());
        let json: serde_json::Value = serde_json::from_str(&render_report(&r, ReportFormat::Json)).unwrap();
        assert_eq!(json["entries"], serde_json::json!([]));
    }

    #[test]
    fn closed_world_forces_flow_knowledge() {
        let rs = parse_rules(
            "t",
            "rule T right=truth perspective=residents-government: exists flow(government -> residents : project_goals)",
        )
        .unwrap();
        let m = CityModel::new("x");
        let open = judge(&m, &rs, None, WorldMode::Open).unwrap();
        assert!(matches!(open.entries[0].verdict, Verdict::Indeterminate(_)));
        let closed = judge(&m, &rs, None, WorldMode::Closed).unwrap();
        assert!(closed.entries[0].verdict.is_violated());
        assert!(!m.flows_complete);
    }

    #[test]
    fn all_compliant_groups_have_no_violations() {
        let rs = parse_rules(
            "t",
            "rule A right=safety perspective=residents-iot_service: true\nrule B right=privacy perspective=residents-government: true\n",
        )
        .unwrap();
        let r = judge(&CityModel::new("x"), &rs, None, WorldMode::Open).unwrap();
        let agg = aggregate(&r);
        assert_eq!(agg.by_right.len(), 2);
        assert!(agg.by_right.iter().all(|(_, s)| s.violated == 0));
        assert!(agg.by_perspective.iter().all(|(_, s)| s.violated == 0));
    }
}
