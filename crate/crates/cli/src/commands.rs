use std::fs;
use std::io::{IsTerminal, Write};
use std::path::Path;

use civitas::facts::FactError;
use civitas::judge::render_text;
use civitas::rules::render_rules;
use civitas::*;

use crate::exit::Status;

/// A failure already formatted for the error stream.
#[derive(Debug)]
pub struct Failure(pub String);

type Outcome = Result<Status, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("error: cannot read {}: {e}", path.display())))
}

fn diagnose(path: &Path, src: &str, e: ParseError) -> Failure {
    Failure(e.render(&path.display().to_string(), src))
}

fn fact_failure(path: &Path, src: &str, e: FactError) -> Failure {
    match e.span() {
        Some(span) => {
            let full = e.to_string();
            let message = full.strip_prefix(&format!("{span}: ")).unwrap_or(&full);
            diagnose(path, src, ParseError::new(message, span))
        }
        None => Failure(format!("error: {}: {e}", path.display())),
    }
}

fn load_rules(path: &Path) -> Result<RuleSet, Failure> {
    let src = read(path)?;
    let name = path.file_stem().map_or("rules".into(), |s| s.to_string_lossy().into_owned());
    parse_rules(&name, &src).map_err(|e| diagnose(path, &src, e))
}

fn color_enabled() -> bool {
    std::env::var_os("CIVITAS_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure(format!("error: cannot write output: {e}")))
}

pub struct CheckArgs<'a> {
    pub scenario: &'a Path,
    pub rules: Option<&'a Path>,
    pub facts: Option<&'a Path>,
    pub world: WorldMode,
    pub format: ReportFormat,
    pub out: Option<&'a Path>,
}

pub fn check(args: CheckArgs<'_>) -> Outcome {
    let src = read(args.scenario)?;
    let model = parse_scenario(&src).map_err(|e| diagnose(args.scenario, &src, e))?;
    let owned;
    let ruleset = match args.rules {
        Some(p) => {
            owned = load_rules(p)?;
            &owned
        }
        None => builtin_ruleset(),
    };
    let facts = match args.facts {
        Some(p) => {
            let fsrc = read(p)?;
            let set = parse_facts(&fsrc).map_err(|e| diagnose(p, &fsrc, e))?;
            Some((p, fsrc, set))
        }
        None => None,
    };
    let report = judge(&model, ruleset, facts.as_ref().map(|(_, _, s)| s), args.world)
        .map_err(|e| {
            let (p, fsrc, _) = facts.as_ref().expect("fact errors need facts");
            fact_failure(p, fsrc, e)
        })?;
    match args.out {
        Some(path) => {
            let text = render_report(&report, args.format);
            fs::write(path, text).map_err(|e| Failure(format!("error: cannot write {}: {e}", path.display())))?;
        }
        None => {
            let text = match args.format {
                ReportFormat::Text => render_text(&report, color_enabled()),
                ReportFormat::Json => render_report(&report, ReportFormat::Json),
            };
            emit(&text)?;
        }
    }
    Ok(Status::from_summary(&report.summary))
}

fn resolve_rule(spec: &str) -> Result<RuleDef, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let set = load_rules(path)?;
        return match <[RuleDef; 1]>::try_from(set.rules) {
            Ok([rule]) => Ok(rule),
            Err(rules) => Err(Failure(format!(
                "error: {} holds {} rules; `find` checks exactly one",
                path.display(),
                rules.len()
            ))),
        };
    }
    builtin_rule(spec).cloned().ok_or_else(|| {
        Failure(format!(
            "error: unknown rule `{spec}`\n  = help: use P1 to P13, SafetyPrinciple, or a path to a .rules file"
        ))
    })
}

fn candidates(n: u64) -> String {
    format!("{n} candidate{}", if n == 1 { "" } else { "s" })
}

pub fn find(rule: &str, scope: Option<&str>) -> Outcome {
    let rule = resolve_rule(rule)?;
    let scope = match scope {
        Some(s) => Scope::parse(s).map_err(|e| Failure(format!("error: {e}")))?,
        None => Scope::default(),
    };
    match find_counterexample(&rule, &scope) {
        CheckResult::Counterexample { model, examined } => {
            let small = minimize_witness(&model, &rule).unwrap_or(model);
            let verdict = eval_rule(&rule, &small);
            emit(&format!(
                "counterexample to {} after {}:\n\n{}\n{}\n",
                rule.id,
                candidates(examined),
                render_scenario(&small),
                explain(&verdict, &rule).trim_end()
            ))?;
            Ok(Status::Violated)
        }
        CheckResult::HoldsWithinScope(n) => {
            emit(&format!("{} holds within scope {scope} ({} examined)\n", rule.id, candidates(n)))?;
            Ok(Status::Compliant)
        }
        CheckResult::BudgetExhausted(n) => {
            emit(&format!(
                "{} undecided: search budget exhausted after {} in scope {scope}\n",
                rule.id,
                candidates(n)
            ))?;
            Ok(Status::Indeterminate)
        }
    }
}

pub fn rules_list() -> Outcome {
    let mut out = String::new();
    for r in &builtin_ruleset().rules {
        out.push_str(&format!(
            "{:<4} {:<15} {:<28} {}\n",
            r.id,
            r.right.as_str(),
            r.perspective.to_string(),
            r.statement
        ));
    }
    emit(&out)?;
    Ok(Status::Compliant)
}

pub fn rules_show(id: &str) -> Outcome {
    let src = rule_source(id).map_err(|e| Failure(format!("error: {e}")))?;
    emit(&src)?;
    Ok(Status::Compliant)
}

fn canonical(path: &Path, src: &str) -> Result<String, Failure> {
    let is_rules = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("rules"));
    if is_rules {
        parse_rules("fmt", src)
            .map(|set| render_rules(&set))
            .map_err(|e| diagnose(path, src, e))
    } else {
        parse_scenario(src)
            .map(|m| render_scenario(&m))
            .map_err(|e| diagnose(path, src, e))
    }
}

pub fn fmt(path: &Path, check_only: bool) -> Outcome {
    let src = read(path)?;
    let formatted = canonical(path, &src)?;
    if formatted == src {
        return Ok(Status::Compliant);
    }
    if check_only {
        eprintln!("{} is not canonically formatted", path.display());
        return Ok(Status::Violated);
    }
    fs::write(path, formatted).map_err(|e| Failure(format!("error: cannot write {}: {e}", path.display())))?;
    Ok(Status::Compliant)
}
