//! Field-by-field construction of entities from raw text values.
//!
//! Both the scenario parser and fact overrides go through these builders, so
//! a field accepts exactly the same spellings in `.city` and `.facts` files.

use crate::model::{
    BusinessInstance, DeviceInstance, GovernmentInstance, ProjectGoal, ResidentGroup, Set,
};
use crate::token::Token;
use crate::vocab::{
    BusinessScale, EconomicStatus, EntityKind, GoalTag, InteractionType, MovementType, RiskType,
    UnknownVariant,
};

/// One scalar as written in source: a bare word or a quoted string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawWord {
    pub text: String,
    pub quoted: bool,
}

impl RawWord {
    pub fn bare(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            quoted: false,
        }
    }

    pub fn quoted(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            quoted: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawValue {
    Word(RawWord),
    List(Vec<RawWord>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("unknown field `{field}` on {kind}")]
    UnknownField {
        kind: EntityKind,
        field: String,
        suggestion: Option<&'static str>,
    },
    #[error("field `{field}` expects {expected}")]
    Shape { field: &'static str, expected: &'static str },
    #[error("{0}")]
    Variant(#[from] UnknownVariant),
    #[error("field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("duplicate field `{0}`")]
    Duplicate(&'static str),
    #[error("field `{0}` cannot be overridden")]
    Immutable(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} `{name}` is missing required field(s): {}", .fields.join(", "))]
pub struct MissingFields {
    pub kind: EntityKind,
    pub name: String,
    pub fields: Vec<&'static str>,
}

/// Canonical field names (as rendered) and their accepted aliases, per kind.
pub fn field_table(kind: EntityKind) -> &'static [(&'static str, &'static [&'static str])] {
    match kind {
        EntityKind::Device => &[
            ("title", &["device_title"]),
            ("neighborhoods", &["deploy_neighborhoods", "deploy_neighborhood"]),
            ("movement", &["movement_type"]),
            ("interaction", &["interaction_type"]),
            ("risk", &["risk_type"]),
            ("collects_resident_data", &["collect_residents_data"]),
            ("transmits_harmful", &[]),
            ("agreement_violated", &["iot_usage_agreement_violated"]),
        ],
        EntityKind::Residents => &[
            ("living", &["living_neighborhoods", "all_living_neighborhoods"]),
            ("favored", &["favored_neighborhoods"]),
            ("economic_status", &[]),
            ("professions", &[]),
            ("iot_usage_preferences", &["preference_for_iot_usage"]),
            ("has_legitimate_authority", &["has_right_for_protection"]),
        ],
        EntityKind::Government => &[
            ("gov_type", &["gov_types"]),
            ("goals", &["project_goals", "iot_project_goals"]),
            ("oversight_iot_safety", &[]),
            ("enforce_safety_standards", &["enforce_safety_standard"]),
        ],
        EntityKind::Business => &[
            ("scale", &[]),
            ("neighborhoods", &[]),
            ("business_types", &["type_of_business"]),
        ],
        EntityKind::External => &[],
    }
}

/// Resolves a field spelling to its canonical name.
pub fn canonical_field(kind: EntityKind, raw: &str) -> Result<&'static str, FieldError> {
    let key = raw.trim().to_lowercase();
    for (name, aliases) in field_table(kind) {
        if *name == key || aliases.contains(&key.as_str()) {
            return Ok(name);
        }
    }
    let names: Vec<&'static str> = field_table(kind).iter().map(|(n, _)| *n).collect();
    Err(FieldError::UnknownField {
        kind,
        field: raw.to_string(),
        suggestion: crate::syntax::suggest(&key, &names),
    })
}

fn word<'a>(field: &'static str, v: &'a RawValue) -> Result<&'a RawWord, FieldError> {
    match v {
        RawValue::Word(w) => Ok(w),
        RawValue::List(_) => Err(FieldError::Shape {
            field,
            expected: "a single value",
        }),
    }
}

fn list<'a>(field: &'static str, v: &'a RawValue) -> Result<&'a [RawWord], FieldError> {
    match v {
        RawValue::List(items) => Ok(items),
        RawValue::Word(_) => Err(FieldError::Shape {
            field,
            expected: "a bracketed list",
        }),
    }
}

fn boolean(field: &'static str, v: &RawValue) -> Result<bool, FieldError> {
    let w = word(field, v)?;
    match w.text.trim().to_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(FieldError::Variant(UnknownVariant {
            what: "boolean",
            found: w.text.clone(),
            expected: vec!["true", "false"],
        })),
    }
}

fn text(field: &'static str, v: &RawValue) -> Result<String, FieldError> {
    Ok(word(field, v)?.text.clone())
}

fn token(field: &'static str, w: &RawWord) -> Result<Token, FieldError> {
    Token::new(&w.text).map_err(|e| FieldError::Invalid {
        field,
        message: e.to_string(),
    })
}

fn token_set(field: &'static str, v: &RawValue) -> Result<Set<Token>, FieldError> {
    list(field, v)?.iter().map(|w| token(field, w)).collect()
}

fn text_set(field: &'static str, v: &RawValue) -> Result<Set<String>, FieldError> {
    Ok(list(field, v)?.iter().map(|w| w.text.clone()).collect())
}

fn enum_value<T>(
    field: &'static str,
    v: &RawValue,
    parse: fn(&str) -> Result<T, UnknownVariant>,
) -> Result<T, FieldError> {
    Ok(parse(&word(field, v)?.text)?)
}

fn enum_set<T: std::hash::Hash + Eq>(
    field: &'static str,
    v: &RawValue,
    parse: fn(&str) -> Result<T, UnknownVariant>,
) -> Result<Set<T>, FieldError> {
    list(field, v)?
        .iter()
        .map(|w| parse(&w.text).map_err(FieldError::from))
        .collect()
}

fn goals(field: &'static str, v: &RawValue) -> Result<Set<ProjectGoal>, FieldError> {
    list(field, v)?
        .iter()
        .map(|w| {
            if w.quoted {
                Ok(ProjectGoal::Label(w.text.clone()))
            } else {
                Ok(ProjectGoal::Tag(GoalTag::parse(&w.text)?))
            }
        })
        .collect()
}

fn put<T>(slot: &mut Option<T>, field: &'static str, value: T) -> Result<(), FieldError> {
    if slot.is_some() {
        return Err(FieldError::Duplicate(field));
    }
    *slot = Some(value);
    Ok(())
}

/// Builds one entity of any declared kind.
#[derive(Debug, Clone)]
pub enum EntityBuilder {
    Device(DeviceBuilder),
    Residents(ResidentsBuilder),
    Government(GovernmentBuilder),
    Business(BusinessBuilder),
}

#[derive(Debug, Clone)]
pub enum BuiltEntity {
    Device(DeviceInstance),
    Residents(ResidentGroup),
    Government(GovernmentInstance),
    Business(BusinessInstance),
}

impl EntityBuilder {
    pub fn new(kind: EntityKind, name: Token) -> Option<Self> {
        Some(match kind {
            EntityKind::Device => EntityBuilder::Device(DeviceBuilder {
                name,
                ..Default::default()
            }),
            EntityKind::Residents => EntityBuilder::Residents(ResidentsBuilder {
                name,
                ..Default::default()
            }),
            EntityKind::Government => EntityBuilder::Government(GovernmentBuilder {
                name,
                ..Default::default()
            }),
            EntityKind::Business => EntityBuilder::Business(BusinessBuilder {
                name,
                ..Default::default()
            }),
            EntityKind::External => return None,
        })
    }

    pub fn kind(&self) -> EntityKind {
        match self {
            EntityBuilder::Device(_) => EntityKind::Device,
            EntityBuilder::Residents(_) => EntityKind::Residents,
            EntityBuilder::Government(_) => EntityKind::Government,
            EntityBuilder::Business(_) => EntityKind::Business,
        }
    }

    /// Sets one field. Setting the same field twice is an error.
    pub fn assign(&mut self, raw_field: &str, value: &RawValue) -> Result<(), FieldError> {
        let field = canonical_field(self.kind(), raw_field)?;
        match self {
            EntityBuilder::Device(b) => b.assign(field, value),
            EntityBuilder::Residents(b) => b.assign(field, value),
            EntityBuilder::Government(b) => b.assign(field, value),
            EntityBuilder::Business(b) => b.assign(field, value),
        }
    }

    /// Replaces one field of a finished entity, leaving the rest untouched.
    pub fn overwrite(&mut self, raw_field: &str, value: &RawValue) -> Result<(), FieldError> {
        let field = canonical_field(self.kind(), raw_field)?;
        match self {
            EntityBuilder::Device(b) => b.clear(field),
            EntityBuilder::Residents(b) => b.clear(field),
            EntityBuilder::Government(b) => b.clear(field),
            EntityBuilder::Business(b) => b.clear(field),
        }
        self.assign(field, value)
    }

    pub fn finish(self) -> Result<BuiltEntity, MissingFields> {
        match self {
            EntityBuilder::Device(b) => b.finish().map(BuiltEntity::Device),
            EntityBuilder::Residents(b) => b.finish().map(BuiltEntity::Residents),
            EntityBuilder::Government(b) => b.finish().map(BuiltEntity::Government),
            EntityBuilder::Business(b) => b.finish().map(BuiltEntity::Business),
        }
    }
}

fn missing(kind: EntityKind, name: &Token, fields: Vec<&'static str>) -> MissingFields {
    MissingFields {
        kind,
        name: name.to_string(),
        fields,
    }
}

#[derive(Debug, Clone)]
pub struct DeviceBuilder {
    name: Token,
    title: Option<String>,
    neighborhoods: Option<Set<Token>>,
    movement: Option<MovementType>,
    interaction: Option<InteractionType>,
    risk: Option<RiskType>,
    collects: Option<bool>,
    transmits: Option<bool>,
    agreement: Option<bool>,
}

impl Default for DeviceBuilder {
    fn default() -> Self {
        Self {
            name: Token::new("_").expect("non-empty"),
            title: None,
            neighborhoods: None,
            movement: None,
            interaction: None,
            risk: None,
            collects: None,
            transmits: None,
            agreement: None,
        }
    }
}

impl DeviceBuilder {
    fn assign(&mut self, field: &'static str, v: &RawValue) -> Result<(), FieldError> {
        match field {
            "title" => put(&mut self.title, field, text(field, v)?),
            "neighborhoods" => put(&mut self.neighborhoods, field, token_set(field, v)?),
            "movement" => put(&mut self.movement, field, enum_value(field, v, MovementType::parse)?),
            "interaction" => put(
                &mut self.interaction,
                field,
                enum_value(field, v, InteractionType::parse)?,
            ),
            "risk" => put(&mut self.risk, field, enum_value(field, v, RiskType::parse)?),
            "collects_resident_data" => put(&mut self.collects, field, boolean(field, v)?),
            "transmits_harmful" => put(&mut self.transmits, field, boolean(field, v)?),
            "agreement_violated" => put(&mut self.agreement, field, boolean(field, v)?),
            _ => unreachable!("canonical device field {field}"),
        }
    }

    fn clear(&mut self, field: &str) {
        match field {
            "title" => self.title = None,
            "neighborhoods" => self.neighborhoods = None,
            "movement" => self.movement = None,
            "interaction" => self.interaction = None,
            "risk" => self.risk = None,
            "collects_resident_data" => self.collects = None,
            "transmits_harmful" => self.transmits = None,
            "agreement_violated" => self.agreement = None,
            _ => {}
        }
    }

    fn finish(self) -> Result<DeviceInstance, MissingFields> {
        let mut absent = Vec::new();
        if self.movement.is_none() {
            absent.push("movement");
        }
        if self.interaction.is_none() {
            absent.push("interaction");
        }
        if self.risk.is_none() {
            absent.push("risk");
        }
        if self.collects.is_none() {
            absent.push("collects_resident_data");
        }
        if self.transmits.is_none() {
            absent.push("transmits_harmful");
        }
        if self.agreement.is_none() {
            absent.push("agreement_violated");
        }
        if !absent.is_empty() {
            return Err(missing(EntityKind::Device, &self.name, absent));
        }
        Ok(DeviceInstance {
            name: self.name,
            device_title: self.title.unwrap_or_default(),
            deploy_neighborhoods: self.neighborhoods.unwrap_or_default(),
            movement_type: self.movement.unwrap(),
            interaction_type: self.interaction.unwrap(),
            risk_type: self.risk.unwrap(),
            transmits_harmful: self.transmits.unwrap(),
            collects_resident_data: self.collects.unwrap(),
            agreement_violated: self.agreement.unwrap(),
        })
    }
}

impl From<&DeviceInstance> for DeviceBuilder {
    fn from(d: &DeviceInstance) -> Self {
        Self {
            name: d.name.clone(),
            title: Some(d.device_title.clone()),
            neighborhoods: Some(d.deploy_neighborhoods.clone()),
            movement: Some(d.movement_type),
            interaction: Some(d.interaction_type),
            risk: Some(d.risk_type),
            collects: Some(d.collects_resident_data),
            transmits: Some(d.transmits_harmful),
            agreement: Some(d.agreement_violated),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResidentsBuilder {
    name: Token,
    living: Option<Set<Token>>,
    favored: Option<Set<Token>>,
    economic: Option<Set<EconomicStatus>>,
    professions: Option<Set<String>>,
    preferences: Option<Set<String>>,
    authority: Option<bool>,
}

impl Default for ResidentsBuilder {
    fn default() -> Self {
        Self {
            name: Token::new("_").expect("non-empty"),
            living: None,
            favored: None,
            economic: None,
            professions: None,
            preferences: None,
            authority: None,
        }
    }
}

impl ResidentsBuilder {
    fn assign(&mut self, field: &'static str, v: &RawValue) -> Result<(), FieldError> {
        match field {
            "living" => put(&mut self.living, field, token_set(field, v)?),
            "favored" => put(&mut self.favored, field, token_set(field, v)?),
            "economic_status" => put(
                &mut self.economic,
                field,
                enum_set(field, v, EconomicStatus::parse)?,
            ),
            "professions" => put(&mut self.professions, field, text_set(field, v)?),
            "iot_usage_preferences" => put(&mut self.preferences, field, text_set(field, v)?),
            "has_legitimate_authority" => put(&mut self.authority, field, boolean(field, v)?),
            _ => unreachable!("canonical residents field {field}"),
        }
    }

    fn clear(&mut self, field: &str) {
        match field {
            "living" => self.living = None,
            "favored" => self.favored = None,
            "economic_status" => self.economic = None,
            "professions" => self.professions = None,
            "iot_usage_preferences" => self.preferences = None,
            "has_legitimate_authority" => self.authority = None,
            _ => {}
        }
    }

    fn finish(self) -> Result<ResidentGroup, MissingFields> {
        let mut absent = Vec::new();
        if self.economic.is_none() {
            absent.push("economic_status");
        }
        if self.authority.is_none() {
            absent.push("has_legitimate_authority");
        }
        if !absent.is_empty() {
            return Err(missing(EntityKind::Residents, &self.name, absent));
        }
        Ok(ResidentGroup {
            name: self.name,
            living_neighborhoods: self.living.unwrap_or_default(),
            favored_neighborhoods: self.favored.unwrap_or_default(),
            economic_status: self.economic.unwrap(),
            professions: self.professions.unwrap_or_default(),
            iot_usage_preferences: self.preferences.unwrap_or_default(),
            has_legitimate_authority: self.authority.unwrap(),
        })
    }
}

impl From<&ResidentGroup> for ResidentsBuilder {
    fn from(r: &ResidentGroup) -> Self {
        Self {
            name: r.name.clone(),
            living: Some(r.living_neighborhoods.clone()),
            favored: Some(r.favored_neighborhoods.clone()),
            economic: Some(r.economic_status.clone()),
            professions: Some(r.professions.clone()),
            preferences: Some(r.iot_usage_preferences.clone()),
            authority: Some(r.has_legitimate_authority),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GovernmentBuilder {
    name: Token,
    gov_type: Option<String>,
    goals: Option<Set<ProjectGoal>>,
    oversight: Option<bool>,
    enforce: Option<bool>,
}

impl Default for GovernmentBuilder {
    fn default() -> Self {
        Self {
            name: Token::new("_").expect("non-empty"),
            gov_type: None,
            goals: None,
            oversight: None,
            enforce: None,
        }
    }
}

impl GovernmentBuilder {
    fn assign(&mut self, field: &'static str, v: &RawValue) -> Result<(), FieldError> {
        match field {
            "gov_type" => put(&mut self.gov_type, field, text(field, v)?),
            "goals" => put(&mut self.goals, field, goals(field, v)?),
            "oversight_iot_safety" => put(&mut self.oversight, field, boolean(field, v)?),
            "enforce_safety_standards" => put(&mut self.enforce, field, boolean(field, v)?),
            _ => unreachable!("canonical government field {field}"),
        }
    }

    fn clear(&mut self, field: &str) {
        match field {
            "gov_type" => self.gov_type = None,
            "goals" => self.goals = None,
            "oversight_iot_safety" => self.oversight = None,
            "enforce_safety_standards" => self.enforce = None,
            _ => {}
        }
    }

    fn finish(self) -> Result<GovernmentInstance, MissingFields> {
        let mut absent = Vec::new();
        if self.oversight.is_none() {
            absent.push("oversight_iot_safety");
        }
        if self.enforce.is_none() {
            absent.push("enforce_safety_standards");
        }
        if !absent.is_empty() {
            return Err(missing(EntityKind::Government, &self.name, absent));
        }
        Ok(GovernmentInstance {
            name: self.name,
            gov_type: self.gov_type.unwrap_or_default(),
            project_goals: self.goals.unwrap_or_default(),
            oversight_iot_safety: self.oversight.unwrap(),
            enforce_safety_standards: self.enforce.unwrap(),
        })
    }
}

impl From<&GovernmentInstance> for GovernmentBuilder {
    fn from(g: &GovernmentInstance) -> Self {
        Self {
            name: g.name.clone(),
            gov_type: Some(g.gov_type.clone()),
            goals: Some(g.project_goals.clone()),
            oversight: Some(g.oversight_iot_safety),
            enforce: Some(g.enforce_safety_standards),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BusinessBuilder {
    name: Token,
    scale: Option<BusinessScale>,
    neighborhoods: Option<Set<Token>>,
    types: Option<Set<String>>,
}

impl Default for BusinessBuilder {
    fn default() -> Self {
        Self {
            name: Token::new("_").expect("non-empty"),
            scale: None,
            neighborhoods: None,
            types: None,
        }
    }
}

impl BusinessBuilder {
    fn assign(&mut self, field: &'static str, v: &RawValue) -> Result<(), FieldError> {
        match field {
            "scale" => put(&mut self.scale, field, enum_value(field, v, BusinessScale::parse)?),
            "neighborhoods" => put(&mut self.neighborhoods, field, token_set(field, v)?),
            "business_types" => put(&mut self.types, field, text_set(field, v)?),
            _ => unreachable!("canonical business field {field}"),
        }
    }

    fn clear(&mut self, field: &str) {
        match field {
            "scale" => self.scale = None,
            "neighborhoods" => self.neighborhoods = None,
            "business_types" => self.types = None,
            _ => {}
        }
    }

    fn finish(self) -> Result<BusinessInstance, MissingFields> {
        let mut absent = Vec::new();
        if self.scale.is_none() {
            absent.push("scale");
        }
        if self.neighborhoods.is_none() {
            absent.push("neighborhoods");
        }
        if !absent.is_empty() {
            return Err(missing(EntityKind::Business, &self.name, absent));
        }
        Ok(BusinessInstance {
            name: self.name,
            scale: self.scale.unwrap(),
            neighborhoods: self.neighborhoods.unwrap(),
            business_types: self.types.unwrap_or_default(),
        })
    }
}

impl From<&BusinessInstance> for BusinessBuilder {
    fn from(b: &BusinessInstance) -> Self {
        Self {
            name: b.name.clone(),
            scale: Some(b.scale),
            neighborhoods: Some(b.neighborhoods.clone()),
            types: Some(b.business_types.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::tok;

    fn w(s: &str) -> RawValue {
        RawValue::Word(RawWord::bare(s))
    }

    #[test]
    fn device_requires_enum_and_flag_fields() {
        let mut b = EntityBuilder::new(EntityKind::Device, tok("d")).unwrap();
        b.assign("movement", &w("still")).unwrap();
        let err = b.finish().unwrap_err();
        assert_eq!(
            err.fields,
            vec![
                "interaction",
                "risk",
                "collects_resident_data",
                "transmits_harmful",
                "agreement_violated"
            ]
        );
    }

    #[test]
    fn aliases_resolve_to_canonical_names() {
        assert_eq!(canonical_field(EntityKind::Device, "risk_type"), Ok("risk"));
        assert_eq!(
            canonical_field(EntityKind::Residents, "has_right_for_protection"),
            Ok("has_legitimate_authority")
        );
        match canonical_field(EntityKind::Device, "riskk") {
            Err(FieldError::UnknownField { suggestion, .. }) => assert_eq!(suggestion, Some("risk")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_assignment_rejected() {
        let mut b = EntityBuilder::new(EntityKind::Business, tok("b")).unwrap();
        b.assign("scale", &w("small")).unwrap();
        assert_eq!(b.assign("scale", &w("large")), Err(FieldError::Duplicate("scale")));
    }

    #[test]
    fn goals_split_tags_from_labels() {
        let mut b = EntityBuilder::new(EntityKind::Government, tok("g")).unwrap();
        b.assign(
            "goals",
            &RawValue::List(vec![
                RawWord::bare("transform_physical_living_environment"),
                RawWord::quoted("Technological Reform"),
            ]),
        )
        .unwrap();
        b.assign("oversight_iot_safety", &w("True")).unwrap();
        b.assign("enforce_safety_standards", &w("false")).unwrap();
        let BuiltEntity::Government(g) = b.finish().unwrap() else {
            panic!()
        };
        assert_eq!(
            g.goal_tags().collect::<Vec<_>>(),
            vec![GoalTag::TransformPhysicalLivingEnvironment]
        );
        assert!(g.oversight_iot_safety);
        assert!(g
            .project_goals
            .contains(&ProjectGoal::Label("Technological Reform".into())));
    }

    #[test]
    fn unregistered_bare_goal_is_rejected() {
        let mut b = EntityBuilder::new(EntityKind::Government, tok("g")).unwrap();
        let err = b
            .assign("goals", &RawValue::List(vec![RawWord::bare("world_peace")]))
            .unwrap_err();
        assert!(matches!(err, FieldError::Variant(_)));
    }
}
