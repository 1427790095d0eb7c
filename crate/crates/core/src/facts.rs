//! Human-supplied facts: extra flows and field overrides layered on a model.

use std::fmt;

use crate::fields::{canonical_field, BuiltEntity, EntityBuilder, FieldError, RawValue};
use crate::fields::{BusinessBuilder, DeviceBuilder, GovernmentBuilder, ResidentsBuilder};
use crate::model::{CityModel, DataFlow, EntityRef, ValidationIssue};
use crate::syntax::SourceSpan;
use crate::token::Token;
use crate::vocab::{Consent, EntityKind, PayloadKind, Provenance};

/// An entity reference as written in a fact file: an optional kind qualifier
/// plus a name, resolved against a model when the facts are applied.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RefPattern {
    pub kind: Option<EntityKind>,
    pub name: Token,
}

impl fmt::Display for RefPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Some(k) => write!(f, "{k}:{}", self.name),
            None => write!(f, "{}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowFact {
    pub source: RefPattern,
    pub dest: RefPattern,
    pub payload: PayloadKind,
    pub consent: Consent,
    pub provenance: Provenance,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldOverride {
    pub target: RefPattern,
    pub field: String,
    pub value: RawValue,
    pub provenance: Provenance,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactSet {
    pub flow_facts: Vec<FlowFact>,
    pub field_overrides: Vec<FieldOverride>,
}

impl FactSet {
    pub fn is_empty(&self) -> bool {
        self.flow_facts.is_empty() && self.field_overrides.is_empty()
    }

    pub fn len(&self) -> usize {
        self.flow_facts.len() + self.field_overrides.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactError {
    #[error("{span}: `{reference}` does not name any declared entity")]
    Dangling { reference: String, span: SourceSpan },
    #[error("{span}: `{reference}` is ambiguous ({}); qualify it as <kind>:<name>", .kinds.join(", "))]
    Ambiguous {
        reference: String,
        kinds: Vec<&'static str>,
        span: SourceSpan,
    },
    #[error("{span}: {reference}: {source}")]
    Field {
        reference: String,
        source: FieldError,
        span: SourceSpan,
    },
    #[error("{span}: conflicting override of {reference}.{field}")]
    Conflict {
        reference: String,
        field: String,
        span: SourceSpan,
    },
    #[error("facts leave the model ill-formed: {0}")]
    Invalid(ValidationIssue),
}

impl FactError {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            FactError::Dangling { span, .. }
            | FactError::Ambiguous { span, .. }
            | FactError::Field { span, .. }
            | FactError::Conflict { span, .. } => Some(*span),
            FactError::Invalid(_) => None,
        }
    }
}

fn resolve(model: &CityModel, pattern: &RefPattern, span: SourceSpan) -> Result<EntityRef, FactError> {
    if let Some(kind) = pattern.kind {
        let entity = EntityRef::new(kind, pattern.name.clone());
        return if model.resolves(&entity) {
            Ok(entity)
        } else {
            Err(FactError::Dangling {
                reference: pattern.to_string(),
                span,
            })
        };
    }
    let hits: Vec<EntityKind> = EntityKind::DECLARED
        .into_iter()
        .filter(|k| model.names(*k).iter().any(|n| **n == pattern.name))
        .collect();
    match hits.as_slice() {
        [] => Err(FactError::Dangling {
            reference: pattern.to_string(),
            span,
        }),
        [kind] => Ok(EntityRef::new(*kind, pattern.name.clone())),
        many => Err(FactError::Ambiguous {
            reference: pattern.to_string(),
            kinds: many.iter().map(|k| k.as_str()).collect(),
            span,
        }),
    }
}

/// Returns `model` with the facts layered on. The input is left untouched.
///
/// Flow facts are appended after the scenario's own flows; overrides replace
/// single fields. Two overrides of the same field of the same entity are rejected
/// even when spelled differently (aliases, qualified vs. bare names).
pub fn apply_facts(model: &CityModel, facts: &FactSet) -> Result<CityModel, FactError> {
    let mut out = model.clone();

    let mut touched: Vec<(EntityRef, &'static str)> = Vec::new();
    for ov in &facts.field_overrides {
        let entity = resolve(model, &ov.target, ov.span)?;
        let field_err = |source: FieldError| FactError::Field {
            reference: ov.target.to_string(),
            source,
            span: ov.span,
        };
        if entity.kind == EntityKind::External {
            return Err(field_err(FieldError::UnknownField {
                kind: EntityKind::External,
                field: ov.field.clone(),
                suggestion: None,
            }));
        }
        let canonical = canonical_field(entity.kind, &ov.field).map_err(field_err)?;
        if touched.contains(&(entity.clone(), canonical)) {
            return Err(FactError::Conflict {
                reference: ov.target.to_string(),
                field: canonical.to_string(),
                span: ov.span,
            });
        }
        touched.push((entity.clone(), canonical));

        let name = &entity.name;
        let mut builder = match entity.kind {
            EntityKind::Device => {
                EntityBuilder::Device(DeviceBuilder::from(find(&out.devices, name, |d| &d.name)))
            }
            EntityKind::Residents => EntityBuilder::Residents(ResidentsBuilder::from(find(
                &out.resident_groups,
                name,
                |r| &r.name,
            ))),
            EntityKind::Government => EntityBuilder::Government(GovernmentBuilder::from(find(
                &out.governments,
                name,
                |g| &g.name,
            ))),
            EntityKind::Business => EntityBuilder::Business(BusinessBuilder::from(find(
                &out.businesses,
                name,
                |b| &b.name,
            ))),
            EntityKind::External => unreachable!(),
        };
        builder.overwrite(canonical, &ov.value).map_err(field_err)?;
        let built = builder
            .finish()
            .expect("overwriting a complete entity keeps it complete");
        match built {
            BuiltEntity::Device(d) => replace(&mut out.devices, name, |x| &x.name, d),
            BuiltEntity::Residents(r) => replace(&mut out.resident_groups, name, |x| &x.name, r),
            BuiltEntity::Government(g) => replace(&mut out.governments, name, |x| &x.name, g),
            BuiltEntity::Business(b) => replace(&mut out.businesses, name, |x| &x.name, b),
        }
    }

    for fact in &facts.flow_facts {
        let source = resolve(model, &fact.source, fact.span)?;
        let dest = resolve(model, &fact.dest, fact.span)?;
        out.flows.push(DataFlow {
            source,
            dest,
            payload: fact.payload,
            consent: fact.consent,
            provenance: Provenance::HumanOverride,
        });
    }

    if let Some(issue) = out.validate().into_iter().next() {
        return Err(FactError::Invalid(issue));
    }
    Ok(out)
}

fn find<'a, T>(items: &'a [T], name: &Token, key: impl Fn(&T) -> &Token) -> &'a T {
    items
        .iter()
        .find(|x| key(x) == name)
        .expect("resolved reference names a declared entity")
}

fn replace<T>(items: &mut [T], name: &Token, key: impl Fn(&T) -> &Token, value: T) {
    if let Some(slot) = items.iter_mut().find(|x| key(x) == name) {
        *slot = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::RawWord;
    use crate::model::GovernmentInstance;
    use crate::token::tok;

    fn model() -> CityModel {
        let mut m = CityModel::new("t");
        m.governments.push(GovernmentInstance {
            name: tok("Government"),
            gov_type: "Transportation Dept".into(),
            project_goals: Default::default(),
            oversight_iot_safety: true,
            enforce_safety_standards: true,
        });
        m
    }

    fn ov(target: &str, field: &str, value: &str) -> FieldOverride {
        FieldOverride {
            target: RefPattern {
                kind: None,
                name: tok(target),
            },
            field: field.into(),
            value: RawValue::Word(RawWord::bare(value)),
            provenance: Provenance::HumanOverride,
            span: SourceSpan::START,
        }
    }

    #[test]
    fn empty_facts_are_identity() {
        let m = model();
        assert_eq!(apply_facts(&m, &FactSet::default()).unwrap(), m);
    }

    #[test]
    fn override_flips_field_and_leaves_input_alone() {
        let m = model();
        let facts = FactSet {
            flow_facts: vec![],
            field_overrides: vec![ov("government", "oversight_iot_safety", "false")],
        };
        let out = apply_facts(&m, &facts).unwrap();
        assert!(!out.governments[0].oversight_iot_safety);
        assert!(m.governments[0].oversight_iot_safety);
        assert!(out.governments[0].enforce_safety_standards);
    }

    #[test]
    fn dangling_reference_is_named() {
        let facts = FactSet {
            flow_facts: vec![],
            field_overrides: vec![ov("Mayor", "oversight_iot_safety", "false")],
        };
        let err = apply_facts(&model(), &facts).unwrap_err();
        assert!(err.to_string().contains("Mayor"), "{err}");
    }

    #[test]
    fn aliased_double_override_conflicts() {
        let mut facts = FactSet {
            flow_facts: vec![],
            field_overrides: vec![
                ov("Government", "goals", ""),
                ov("Government", "project_goals", ""),
            ],
        };
        facts.field_overrides[1].target.kind = Some(EntityKind::Government);
        for o in &mut facts.field_overrides {
            o.value = RawValue::List(vec![]);
        }
        assert!(matches!(
            apply_facts(&model(), &facts),
            Err(FactError::Conflict { .. })
        ));
    }
}
