//! `.city` scenario files and `.facts` override files.
//!
//! ```text
//! scenario "FLASH parking" {
//!   device Parking_device {
//!     title: "FLASH Parking"
//!     neighborhoods: ["Center City", Fairmount]
//!     movement: still
//!     interaction: physical
//!     risk: high
//!     collects_resident_data: true
//!     transmits_harmful: false
//!     agreement_violated: false
//!   }
//!   flow Parking_device -> Government : resident_personal_data consent=denied
//!   flows_complete: false
//!   total_neighborhoods: 10
//! }
//! ```

use std::fmt::Write as _;

use super::lexer::{is_bare_word, quote, Tok};
use super::{suggest, Cursor, ParseError, SourceSpan};
use crate::facts::{FactSet, FieldOverride, FlowFact, RefPattern};
use crate::fields::{field_table, BuiltEntity, EntityBuilder, FieldError, RawValue, RawWord};
use crate::model::{CityModel, DataFlow, EntityRef, ProjectGoal, ValidationIssue};
use crate::token::Token;
use crate::vocab::{Consent, EntityKind, PayloadKind, Provenance, UnknownVariant};

const ENTITY_KEYWORDS: [(&str, EntityKind); 4] = [
    ("device", EntityKind::Device),
    ("residents", EntityKind::Residents),
    ("government", EntityKind::Government),
    ("business", EntityKind::Business),
];

fn variant_error(err: UnknownVariant, span: SourceSpan) -> ParseError {
    let help = format!("expected one of {{{}}}", err.expected.join(", "));
    let mut e = ParseError::new(err.to_string(), span).with_help(help);
    if let Some(s) = suggest(&err.found, &err.expected) {
        e = e.with_help(format!("did you mean `{s}`?"));
    }
    e
}

fn field_error(err: FieldError, span: SourceSpan) -> ParseError {
    match err {
        FieldError::Variant(v) => variant_error(v, span),
        FieldError::UnknownField {
            kind,
            ref field,
            suggestion,
        } => {
            let names: Vec<&str> = field_table(kind).iter().map(|(n, _)| *n).collect();
            let e = ParseError::new(format!("unknown field `{field}` on {kind}"), span);
            match suggestion {
                Some(s) => e.with_help(format!("did you mean `{s}`?")),
                None => e.with_help(format!("known fields: {}", names.join(", "))),
            }
        }
        other => ParseError::new(other.to_string(), span),
    }
}

fn parse_value(cur: &mut Cursor) -> Result<RawValue, ParseError> {
    if cur.eat(&Tok::LBracket) {
        let mut items = Vec::new();
        loop {
            if cur.eat(&Tok::RBracket) {
                break;
            }
            items.push(parse_word(cur)?);
            if !cur.eat(&Tok::Comma) {
                cur.expect(&Tok::RBracket)?;
                break;
            }
        }
        Ok(RawValue::List(items))
    } else {
        Ok(RawValue::Word(parse_word(cur)?))
    }
}

fn parse_word(cur: &mut Cursor) -> Result<RawWord, ParseError> {
    match cur.peek() {
        Some(Tok::Ident(s)) => {
            let w = RawWord::bare(s.clone());
            cur.next();
            Ok(w)
        }
        Some(Tok::Str(s)) => {
            let w = RawWord::quoted(s.clone());
            cur.next();
            Ok(w)
        }
        Some(Tok::Number(n)) => {
            let w = RawWord::bare(n.to_string());
            cur.next();
            Ok(w)
        }
        _ => Err(cur.unexpected("a value")),
    }
}

fn parse_token(cur: &mut Cursor, what: &str) -> Result<(Token, SourceSpan), ParseError> {
    let (text, span) = cur.word(what)?;
    let token = Token::new(&text).map_err(|e| ParseError::new(e.to_string(), span))?;
    Ok((token, span))
}

/// `[kind:]name`
fn parse_ref(cur: &mut Cursor) -> Result<(RefPattern, SourceSpan), ParseError> {
    let span = cur.span();
    if let (Some(Tok::Ident(k)), Some(Tok::Colon)) = (cur.peek(), cur.peek_at(1)) {
        // `name : payload` also occurs (flow destinations), so `kind:name` is
        // only a qualifier when the name is itself followed by `->`, `:` or `.`.
        let qualified = matches!(cur.peek_at(2), Some(Tok::Ident(_)) | Some(Tok::Str(_)))
            && matches!(cur.peek_at(3), Some(Tok::Arrow) | Some(Tok::Colon) | Some(Tok::Dot));
        if qualified {
            if let Ok(kind) = EntityKind::parse(k) {
                cur.next();
                cur.next();
                let (name, _) = parse_token(cur, "an entity name")?;
                return Ok((RefPattern { kind: Some(kind), name }, span));
            }
        }
    }
    let (name, span) = parse_token(cur, "an entity name")?;
    Ok((RefPattern { kind: None, name }, span))
}

/// `src -> dst : payload [consent=<c>]`, after the `flow` keyword.
fn parse_flow_body(
    cur: &mut Cursor,
) -> Result<(RefPattern, SourceSpan, RefPattern, SourceSpan, PayloadKind, Consent), ParseError> {
    let (source, s_span) = parse_ref(cur)?;
    cur.expect(&Tok::Arrow)?;
    let (dest, d_span) = parse_ref(cur)?;
    cur.expect(&Tok::Colon)?;
    let (payload_text, p_span) = cur.word("a payload kind")?;
    let payload = PayloadKind::parse(&payload_text).map_err(|e| variant_error(e, p_span))?;
    let mut consent = Consent::Unknown;
    if cur.is_keyword("consent") && cur.peek_at(1) == Some(&Tok::Eq) {
        cur.next();
        cur.next();
        let (c, c_span) = cur.word("a consent value")?;
        consent = Consent::parse(&c).map_err(|e| variant_error(e, c_span))?;
    }
    Ok((source, s_span, dest, d_span, payload, consent))
}

fn parse_bool(cur: &mut Cursor) -> Result<bool, ParseError> {
    let (w, span) = cur.word("`true` or `false`")?;
    match w.to_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(variant_error(
            UnknownVariant {
                what: "boolean",
                found: w,
                expected: vec!["true", "false"],
            },
            span,
        )),
    }
}

struct PendingFlow {
    source: RefPattern,
    source_span: SourceSpan,
    dest: RefPattern,
    dest_span: SourceSpan,
    payload: PayloadKind,
    consent: Consent,
    span: SourceSpan,
}

/// Parses a `.city` scenario into a validated model.
pub fn parse_scenario(src: &str) -> Result<CityModel, ParseError> {
    let mut cur = Cursor::new(src)?;
    if cur.at_end() {
        return Err(ParseError::new("no scenario block", SourceSpan::START)
            .with_help("a scenario file starts with `scenario \"<name>\" {`"));
    }
    cur.expect_keyword("scenario")?;
    let (name, _) = cur.word("a scenario name")?;
    cur.expect(&Tok::LBrace)?;

    let mut model = CityModel::new(name);
    let mut entity_spans: Vec<(EntityRef, SourceSpan)> = Vec::new();
    let mut flows: Vec<PendingFlow> = Vec::new();
    let mut flows_complete: Option<bool> = None;
    let mut total: Option<u64> = None;

    loop {
        if cur.eat(&Tok::RBrace) {
            break;
        }
        let (kw, kw_span) = match cur.peek() {
            Some(Tok::Ident(s)) => (s.to_lowercase(), cur.span()),
            _ => return Err(cur.unexpected("a declaration or `}`")),
        };
        if let Some(&(_, kind)) = ENTITY_KEYWORDS.iter().find(|(k, _)| *k == kw) {
            cur.next();
            let (ename, name_span) = parse_token(&mut cur, "an entity name")?;
            let mut builder = EntityBuilder::new(kind, ename.clone()).expect("declared kind");
            cur.expect(&Tok::LBrace)?;
            while !cur.eat(&Tok::RBrace) {
                let (field, f_span) = cur.ident("a field name")?;
                cur.expect(&Tok::Colon)?;
                let v_span = cur.span();
                let value = parse_value(&mut cur)?;
                builder.assign(&field, &value).map_err(|e| match e {
                    FieldError::UnknownField { .. } | FieldError::Duplicate(_) => {
                        field_error(e, f_span)
                    }
                    _ => field_error(e, v_span),
                })?;
                cur.eat(&Tok::Comma);
            }
            let built = builder
                .finish()
                .map_err(|e| ParseError::new(e.to_string(), name_span))?;
            entity_spans.push((EntityRef::new(kind, ename), name_span));
            match built {
                BuiltEntity::Device(d) => model.devices.push(d),
                BuiltEntity::Residents(r) => model.resident_groups.push(r),
                BuiltEntity::Government(g) => model.governments.push(g),
                BuiltEntity::Business(b) => model.businesses.push(b),
            }
        } else if kw == "flow" {
            cur.next();
            let (source, source_span, dest, dest_span, payload, consent) =
                parse_flow_body(&mut cur)?;
            flows.push(PendingFlow {
                source,
                source_span,
                dest,
                dest_span,
                payload,
                consent,
                span: kw_span,
            });
        } else if kw == "flows_complete" {
            cur.next();
            cur.expect(&Tok::Colon)?;
            if flows_complete.replace(parse_bool(&mut cur)?).is_some() {
                return Err(ParseError::new("duplicate `flows_complete`", kw_span));
            }
        } else if kw == "total_neighborhoods" {
            cur.next();
            cur.expect(&Tok::Colon)?;
            let (n, _) = cur.number("a neighborhood count")?;
            if total.replace(n).is_some() {
                return Err(ParseError::new("duplicate `total_neighborhoods`", kw_span));
            }
        } else {
            let mut known: Vec<&str> = ENTITY_KEYWORDS.iter().map(|(k, _)| *k).collect();
            known.extend(["flow", "flows_complete", "total_neighborhoods"]);
            let mut e = ParseError::new(format!("unknown declaration `{kw}`"), kw_span);
            if let Some(s) = suggest(&kw, &known) {
                e = e.with_help(format!("did you mean `{s}`?"));
            }
            return Err(e);
        }
    }
    if !cur.at_end() {
        return Err(cur.unexpected("end of input after the scenario block"));
    }

    model.flows_complete = flows_complete.unwrap_or(false);
    model.declared_total_neighborhoods = total;

    for f in &flows {
        let source = resolve_in_scenario(&model, &f.source, f.source_span)?;
        let dest = resolve_in_scenario(&model, &f.dest, f.dest_span)?;
        model.flows.push(DataFlow {
            source,
            dest,
            payload: f.payload,
            consent: f.consent,
            provenance: Provenance::Scenario,
        });
    }

    if let Some(issue) = model.validate().into_iter().next() {
        let span = issue_span(&issue, &entity_spans, &flows);
        return Err(ParseError::new(issue.to_string(), span));
    }
    Ok(model)
}

fn resolve_in_scenario(
    model: &CityModel,
    pattern: &RefPattern,
    span: SourceSpan,
) -> Result<EntityRef, ParseError> {
    if let Some(kind) = pattern.kind {
        let r = EntityRef::new(kind, pattern.name.clone());
        if model.resolves(&r) {
            return Ok(r);
        }
        return Err(ParseError::new(
            format!("undeclared {kind} `{}`", pattern.name),
            span,
        ));
    }
    let hits: Vec<EntityKind> = EntityKind::DECLARED
        .into_iter()
        .filter(|k| model.names(*k).iter().any(|n| **n == pattern.name))
        .collect();
    match hits.as_slice() {
        [kind] => Ok(EntityRef::new(*kind, pattern.name.clone())),
        [] => Err(ParseError::new(
            format!("`{}` does not name a declared entity", pattern.name),
            span,
        )
        .with_help("declare it, or write `external:<name>` for an outside party")),
        _ => Err(ParseError::new(
            format!("`{}` is ambiguous", pattern.name),
            span,
        )
        .with_help("qualify it as <kind>:<name>")),
    }
}

fn issue_span(
    issue: &ValidationIssue,
    entities: &[(EntityRef, SourceSpan)],
    flows: &[PendingFlow],
) -> SourceSpan {
    let entity_span = |kind: crate::vocab::EntityKind, name: &Token| {
        entities
            .iter()
            .rev()
            .find(|(r, _)| r.kind == kind && &r.name == name)
            .map(|(_, s)| *s)
    };
    let span = match issue {
        ValidationIssue::DuplicateName { entity } => entity_span(entity.kind, &entity.name),
        ValidationIssue::DanglingRef { flow_index, .. }
        | ValidationIssue::SelfFlow { flow_index, .. }
        | ValidationIssue::ExternalProjectGoals { flow_index } => {
            flows.get(*flow_index).map(|f| f.span)
        }
        ValidationIssue::FavoredNotLiving { group, .. }
        | ValidationIssue::EmptyEconomicStatus { group } => {
            entity_span(EntityKind::Residents, group)
        }
        ValidationIssue::EmptyBusinessNeighborhoods { business } => {
            entity_span(EntityKind::Business, business)
        }
        ValidationIssue::UniverseTooSmall { .. } => None,
    };
    span.unwrap_or(SourceSpan::START)
}

/// Parses a `.facts` file. Every entry is tagged as a human override.
///
/// ```text
/// flow Parking_device -> Government : resident_personal_data consent=denied
/// set Government.oversight_iot_safety = false
/// ```
pub fn parse_facts(src: &str) -> Result<FactSet, ParseError> {
    let mut cur = Cursor::new(src)?;
    let mut facts = FactSet::default();
    let mut seen: Vec<(RefPattern, String)> = Vec::new();
    while !cur.at_end() {
        let span = cur.span();
        if cur.eat_keyword("flow") {
            let (source, _, dest, _, payload, consent) = parse_flow_body(&mut cur)?;
            facts.flow_facts.push(FlowFact {
                source,
                dest,
                payload,
                consent,
                provenance: Provenance::HumanOverride,
                span,
            });
        } else if cur.eat_keyword("set") {
            let (target, _) = parse_ref(&mut cur)?;
            cur.expect(&Tok::Dot)?;
            let (field, _) = cur.ident("a field name")?;
            cur.expect(&Tok::Eq)?;
            let value = parse_value(&mut cur)?;
            let key = (target.clone(), field.to_lowercase());
            if seen.contains(&key) {
                return Err(ParseError::new(
                    format!("conflicting override of {target}.{field}"),
                    span,
                ));
            }
            seen.push(key);
            facts.field_overrides.push(FieldOverride {
                target,
                field,
                value,
                provenance: Provenance::HumanOverride,
                span,
            });
        } else {
            return Err(cur.unexpected("`flow` or `set`"));
        }
    }
    Ok(facts)
}

fn write_token(out: &mut String, t: &Token) {
    write_word(out, t.as_str());
}

fn write_word(out: &mut String, s: &str) {
    if is_bare_word(s) {
        out.push_str(s);
    } else {
        out.push_str(&quote(s));
    }
}

fn write_list<I, T>(out: &mut String, items: I, mut each: impl FnMut(&mut String, T))
where
    I: IntoIterator<Item = T>,
{
    out.push('[');
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        each(out, item);
    }
    out.push(']');
}

fn write_ref(out: &mut String, model: &CityModel, r: &EntityRef) {
    let clashes = EntityKind::DECLARED
        .into_iter()
        .filter(|k| model.names(*k).iter().any(|n| **n == r.name))
        .count();
    // A bare name that spells a kind followed by `:` would read as a qualifier.
    let needs_kind = r.kind == EntityKind::External || clashes != 1;
    if needs_kind {
        let _ = write!(out, "{}:", r.kind);
    }
    write_token(out, &r.name);
}

/// Canonical text for a model; `parse_scenario` reads it back to an equal model.
pub fn render_scenario(model: &CityModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {} {{", quote(&model.scenario_name));
    let mut first_block = true;
    let mut gap = |out: &mut String| {
        if !first_block {
            out.push('\n');
        }
        first_block = false;
    };

    for d in &model.devices {
        gap(&mut out);
        out.push_str("  device ");
        write_token(&mut out, &d.name);
        out.push_str(" {\n");
        let _ = writeln!(out, "    title: {}", quote(&d.device_title));
        out.push_str("    neighborhoods: ");
        write_list(&mut out, &d.deploy_neighborhoods, write_token);
        let _ = writeln!(out, "\n    movement: {}", d.movement_type);
        let _ = writeln!(out, "    interaction: {}", d.interaction_type);
        let _ = writeln!(out, "    risk: {}", d.risk_type);
        let _ = writeln!(out, "    collects_resident_data: {}", d.collects_resident_data);
        let _ = writeln!(out, "    transmits_harmful: {}", d.transmits_harmful);
        let _ = writeln!(out, "    agreement_violated: {}", d.agreement_violated);
        out.push_str("  }\n");
    }

    for r in &model.resident_groups {
        gap(&mut out);
        out.push_str("  residents ");
        write_token(&mut out, &r.name);
        out.push_str(" {\n    living: ");
        write_list(&mut out, &r.living_neighborhoods, write_token);
        out.push_str("\n    favored: ");
        write_list(&mut out, &r.favored_neighborhoods, write_token);
        out.push_str("\n    economic_status: ");
        write_list(&mut out, &r.economic_status, |o, e| o.push_str(e.as_str()));
        out.push_str("\n    professions: ");
        write_list(&mut out, &r.professions, |o, s| o.push_str(&quote(s)));
        out.push_str("\n    iot_usage_preferences: ");
        write_list(&mut out, &r.iot_usage_preferences, |o, s| o.push_str(&quote(s)));
        let _ = writeln!(
            out,
            "\n    has_legitimate_authority: {}",
            r.has_legitimate_authority
        );
        out.push_str("  }\n");
    }

    for g in &model.governments {
        gap(&mut out);
        out.push_str("  government ");
        write_token(&mut out, &g.name);
        out.push_str(" {\n");
        let _ = writeln!(out, "    gov_type: {}", quote(&g.gov_type));
        out.push_str("    goals: ");
        write_list(&mut out, &g.project_goals, |o, goal| match goal {
            ProjectGoal::Tag(t) => o.push_str(t.as_str()),
            ProjectGoal::Label(l) => o.push_str(&quote(l)),
        });
        let _ = writeln!(out, "\n    oversight_iot_safety: {}", g.oversight_iot_safety);
        let _ = writeln!(
            out,
            "    enforce_safety_standards: {}",
            g.enforce_safety_standards
        );
        out.push_str("  }\n");
    }

    for b in &model.businesses {
        gap(&mut out);
        out.push_str("  business ");
        write_token(&mut out, &b.name);
        out.push_str(" {\n");
        let _ = writeln!(out, "    scale: {}", b.scale);
        out.push_str("    neighborhoods: ");
        write_list(&mut out, &b.neighborhoods, write_token);
        out.push_str("\n    business_types: ");
        write_list(&mut out, &b.business_types, |o, s| o.push_str(&quote(s)));
        out.push_str("\n  }\n");
    }

    if !model.flows.is_empty() {
        gap(&mut out);
        for f in &model.flows {
            out.push_str("  flow ");
            write_ref(&mut out, model, &f.source);
            out.push_str(" -> ");
            write_ref(&mut out, model, &f.dest);
            let _ = write!(out, " : {}", f.payload);
            if f.consent != Consent::Unknown {
                let _ = write!(out, " consent={}", f.consent);
            }
            out.push('\n');
        }
    }

    if model.flows_complete || model.declared_total_neighborhoods.is_some() {
        gap(&mut out);
        if model.flows_complete {
            out.push_str("  flows_complete: true\n");
        }
        if let Some(n) = model.declared_total_neighborhoods {
            let _ = writeln!(out, "  total_neighborhoods: {n}");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::tok;
    use crate::vocab::{InteractionType, MovementType, RiskType};

    const DEVICE: &str = r#"
scenario "s" {
  device Kiosk {
    title: "Pay station"
    neighborhoods: ["Center City", Fairmount]
    movement: still
    interaction: "physical"
    risk: High
    collects_resident_data: true
    transmits_harmful: false
    agreement_violated: False
  }
}
"#;

    #[test]
    fn parses_device_block_with_synonyms() {
        let m = parse_scenario(DEVICE).unwrap();
        let d = &m.devices[0];
        assert_eq!(d.name, tok("kiosk"));
        assert_eq!(d.movement_type, MovementType::Stationary);
        assert_eq!(d.interaction_type, InteractionType::Physical);
        assert_eq!(d.risk_type, RiskType::High);
        assert_eq!(d.deploy_neighborhoods.len(), 2);
        assert!(!m.flows_complete);
        assert_eq!(m.declared_total_neighborhoods, None);
    }

    #[test]
    fn empty_input_has_no_scenario_block() {
        for src in ["", "   \n# only a comment\n"] {
            let err = parse_scenario(src).unwrap_err();
            assert_eq!(err.message, "no scenario block");
        }
    }

    #[test]
    fn unknown_enum_value_lists_choices() {
        let src = DEVICE.replace("risk: High", "risk: extreme");
        let err = parse_scenario(&src).unwrap_err();
        assert!(err.message.contains("{low, medium, high}"), "{}", err.message);
        assert_eq!(err.span.line, 8);
        assert_eq!(err.span.column, 11);
    }

    #[test]
    fn unknown_field_suggests() {
        let src = DEVICE.replace("risk: High", "riskk: High");
        let err = parse_scenario(&src).unwrap_err();
        assert!(err.message.contains("riskk"));
        assert_eq!(err.help.as_deref(), Some("did you mean `risk`?"));
    }

    #[test]
    fn missing_field_reported_at_entity_name() {
        let src = DEVICE.replace("    risk: High\n", "");
        let err = parse_scenario(&src).unwrap_err();
        assert!(err.message.contains("risk"));
        assert_eq!((err.span.line, err.span.column), (3, 10));
    }

    #[test]
    fn flow_resolution_and_qualifiers() {
        let src = DEVICE.replace(
            "\n}\n",
            "\n  flow Kiosk -> external:hackers : resident_personal_data consent=denied\n  flow device:Kiosk -> Kiosk : generic_message\n  flows_complete: true\n}\n",
        );
        let m = parse_scenario(&src).unwrap();
        assert_eq!(m.flows.len(), 2);
        assert_eq!(m.flows[0].dest.kind, EntityKind::External);
        assert_eq!(m.flows[0].consent, Consent::Denied);
        assert_eq!(m.flows[1].consent, Consent::Unknown);
        assert!(m.flows_complete);
    }

    #[test]
    fn undeclared_flow_endpoint_is_error() {
        let src = DEVICE.replace("\n}\n", "\n  flow Kiosk -> Nobody : arrival_time\n}\n");
        let err = parse_scenario(&src).unwrap_err();
        assert!(err.message.contains("Nobody"));
    }

    #[test]
    fn validation_issues_become_errors() {
        let src = r#"scenario "s" {
  residents R {
    living: [a]
    favored: [b]
    economic_status: [low]
    has_legitimate_authority: true
  }
}"#;
        let err = parse_scenario(src).unwrap_err();
        assert!(err.message.contains("favor"));
        assert_eq!(err.span.line, 2);
    }

    #[test]
    fn render_empty_model_is_minimal_header() {
        let text = render_scenario(&CityModel::new("empty"));
        assert_eq!(text, "scenario \"empty\" {\n}\n");
        assert_eq!(parse_scenario(&text).unwrap(), CityModel::new("empty"));
    }

    #[test]
    fn render_is_reparseable_with_unicode_names() {
        let src = DEVICE.replace("Fairmount", "Śródmieście").replace("Kiosk", "\"Kiosk Ü\"");
        let m = parse_scenario(&src).unwrap();
        let text = render_scenario(&m);
        assert!(text.contains("Śródmieście"));
        let again = parse_scenario(&text).unwrap();
        assert_eq!(again, m);
        assert_eq!(render_scenario(&again), text);
    }

    #[test]
    fn crlf_accepted() {
        let src = DEVICE.replace('\n', "\r\n");
        assert_eq!(parse_scenario(&src).unwrap(), parse_scenario(DEVICE).unwrap());
    }

    #[test]
    fn facts_parse() {
        let facts = parse_facts(
            "flow Parking_device -> G : resident_personal_data consent=denied\n",
        )
        .unwrap();
        assert_eq!(facts.flow_facts.len(), 1);
        assert_eq!(facts.flow_facts[0].consent, Consent::Denied);
        assert_eq!(facts.flow_facts[0].provenance, Provenance::HumanOverride);
        assert!(parse_facts("").unwrap().is_empty());
    }

    #[test]
    fn facts_conflicting_override() {
        let err = parse_facts(
            "set G.oversight_iot_safety = false\nset G.oversight_iot_safety = true\n",
        )
        .unwrap_err();
        assert!(err.message.contains("conflicting override"));
        assert_eq!(err.span.line, 2);
    }

    #[test]
    fn facts_syntax_error_has_span() {
        let err = parse_facts("flow a -> : arrival_time").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 1, column: 11, length: 1 });
    }
}
