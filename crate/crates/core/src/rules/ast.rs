use crate::model::{CityModel, ProjectGoal};
use crate::token::Token;
use crate::vocab::{
    BusinessScale, Consent, EconomicStatus, EntityKind, GoalTag, InteractionType, MovementType,
    PayloadKind, Perspective, Right, RiskType,
};

/// Types of scalar values a rule can mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarType {
    Bool,
    Count,
    Name,
    Text,
    Neighborhood,
    Movement,
    Interaction,
    Risk,
    Economic,
    Scale,
    Goal,
}

impl ScalarType {
    pub fn describe(self) -> &'static str {
        match self {
            ScalarType::Bool => "boolean",
            ScalarType::Count => "count",
            ScalarType::Name => "entity name",
            ScalarType::Text => "text",
            ScalarType::Neighborhood => "neighborhood",
            ScalarType::Movement => "movement type",
            ScalarType::Interaction => "interaction type",
            ScalarType::Risk => "risk type",
            ScalarType::Economic => "economic status",
            ScalarType::Scale => "business scale",
            ScalarType::Goal => "goal tag",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    Scalar(ScalarType),
    Set(ScalarType),
}

impl ValueType {
    pub fn describe(self) -> String {
        match self {
            ValueType::Scalar(s) => s.describe().to_string(),
            ValueType::Set(s) => format!("set of {}", s.describe()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Count(u64),
    Name(Token),
    Text(String),
    Neighborhood(Token),
    Movement(MovementType),
    Interaction(InteractionType),
    Risk(RiskType),
    Economic(EconomicStatus),
    Scale(BusinessScale),
    Goal(GoalTag),
}

impl Value {
    pub fn scalar_type(&self) -> ScalarType {
        match self {
            Value::Bool(_) => ScalarType::Bool,
            Value::Count(_) => ScalarType::Count,
            Value::Name(_) => ScalarType::Name,
            Value::Text(_) => ScalarType::Text,
            Value::Neighborhood(_) => ScalarType::Neighborhood,
            Value::Movement(_) => ScalarType::Movement,
            Value::Interaction(_) => ScalarType::Interaction,
            Value::Risk(_) => ScalarType::Risk,
            Value::Economic(_) => ScalarType::Economic,
            Value::Scale(_) => ScalarType::Scale,
            Value::Goal(_) => ScalarType::Goal,
        }
    }
}

/// Every field a rule can read, tagged with its owning kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    DeviceName,
    DeviceTitle,
    DeployNeighborhoods,
    MovementType,
    InteractionType,
    RiskType,
    TransmitsHarmful,
    CollectsResidentData,
    AgreementViolated,
    ResidentsName,
    LivingNeighborhoods,
    FavoredNeighborhoods,
    EconomicStatus,
    Professions,
    IotUsagePreferences,
    HasLegitimateAuthority,
    GovernmentName,
    GovType,
    ProjectGoals,
    OversightIotSafety,
    EnforceSafetyStandards,
    BusinessName,
    Scale,
    BusinessNeighborhoods,
    BusinessTypes,
}

impl Field {
    pub const ALL: [Field; 25] = [
        Field::DeviceName,
        Field::DeviceTitle,
        Field::DeployNeighborhoods,
        Field::MovementType,
        Field::InteractionType,
        Field::RiskType,
        Field::TransmitsHarmful,
        Field::CollectsResidentData,
        Field::AgreementViolated,
        Field::ResidentsName,
        Field::LivingNeighborhoods,
        Field::FavoredNeighborhoods,
        Field::EconomicStatus,
        Field::Professions,
        Field::IotUsagePreferences,
        Field::HasLegitimateAuthority,
        Field::GovernmentName,
        Field::GovType,
        Field::ProjectGoals,
        Field::OversightIotSafety,
        Field::EnforceSafetyStandards,
        Field::BusinessName,
        Field::Scale,
        Field::BusinessNeighborhoods,
        Field::BusinessTypes,
    ];

    pub fn kind(self) -> EntityKind {
        use Field::*;
        match self {
            DeviceName | DeviceTitle | DeployNeighborhoods | MovementType | InteractionType
            | RiskType | TransmitsHarmful | CollectsResidentData | AgreementViolated => {
                EntityKind::Device
            }
            ResidentsName | LivingNeighborhoods | FavoredNeighborhoods | EconomicStatus
            | Professions | IotUsagePreferences | HasLegitimateAuthority => EntityKind::Residents,
            GovernmentName | GovType | ProjectGoals | OversightIotSafety
            | EnforceSafetyStandards => EntityKind::Government,
            BusinessName | Scale | BusinessNeighborhoods | BusinessTypes => EntityKind::Business,
        }
    }

    pub fn name(self) -> &'static str {
        use Field::*;
        match self {
            DeviceName | ResidentsName | GovernmentName | BusinessName => "name",
            DeviceTitle => "device_title",
            DeployNeighborhoods => "deploy_neighborhoods",
            MovementType => "movement_type",
            InteractionType => "interaction_type",
            RiskType => "risk_type",
            TransmitsHarmful => "transmits_harmful",
            CollectsResidentData => "collects_resident_data",
            AgreementViolated => "agreement_violated",
            LivingNeighborhoods => "living_neighborhoods",
            FavoredNeighborhoods => "favored_neighborhoods",
            EconomicStatus => "economic_status",
            Professions => "professions",
            IotUsagePreferences => "iot_usage_preferences",
            HasLegitimateAuthority => "has_legitimate_authority",
            GovType => "gov_type",
            ProjectGoals => "project_goals",
            OversightIotSafety => "oversight_iot_safety",
            EnforceSafetyStandards => "enforce_safety_standards",
            Scale => "scale",
            BusinessNeighborhoods => "neighborhoods",
            BusinessTypes => "business_types",
        }
    }

    pub fn value_type(self) -> ValueType {
        use Field::*;
        use ValueType::{Scalar, Set};
        match self {
            DeviceName | ResidentsName | GovernmentName | BusinessName => {
                Scalar(ScalarType::Name)
            }
            DeviceTitle | GovType => Scalar(ScalarType::Text),
            DeployNeighborhoods | LivingNeighborhoods | FavoredNeighborhoods
            | BusinessNeighborhoods => Set(ScalarType::Neighborhood),
            MovementType => Scalar(ScalarType::Movement),
            InteractionType => Scalar(ScalarType::Interaction),
            RiskType => Scalar(ScalarType::Risk),
            TransmitsHarmful | CollectsResidentData | AgreementViolated
            | HasLegitimateAuthority | OversightIotSafety | EnforceSafetyStandards => {
                Scalar(ScalarType::Bool)
            }
            EconomicStatus => Set(ScalarType::Economic),
            Professions | IotUsagePreferences | BusinessTypes => Set(ScalarType::Text),
            ProjectGoals => Set(ScalarType::Goal),
            Scale => Scalar(ScalarType::Scale),
        }
    }

    /// Looks up a field by rule-language spelling.
    pub fn lookup(kind: EntityKind, name: &str) -> Option<Field> {
        let name = match name {
            "has_right_for_protection" => "has_legitimate_authority",
            other => other,
        };
        Field::ALL
            .into_iter()
            .find(|f| f.kind() == kind && f.name() == name)
    }

    pub fn names_for(kind: EntityKind) -> Vec<&'static str> {
        Field::ALL
            .into_iter()
            .filter(|f| f.kind() == kind)
            .map(Field::name)
            .collect()
    }

    /// Reads this field from entity `index` of the field's kind.
    pub fn read(self, model: &CityModel, index: usize) -> FieldValue {
        use Field::*;
        let one = FieldValue::Scalar;
        let toks = |s: &crate::model::Set<Token>| {
            FieldValue::Set(s.iter().cloned().map(Value::Neighborhood).collect())
        };
        let texts = |s: &crate::model::Set<String>| {
            FieldValue::Set(s.iter().cloned().map(Value::Text).collect())
        };
        match self.kind() {
            EntityKind::Device => {
                let d = &model.devices[index];
                match self {
                    DeviceName => one(Value::Name(d.name.clone())),
                    DeviceTitle => one(Value::Text(d.device_title.clone())),
                    DeployNeighborhoods => toks(&d.deploy_neighborhoods),
                    MovementType => one(Value::Movement(d.movement_type)),
                    InteractionType => one(Value::Interaction(d.interaction_type)),
                    RiskType => one(Value::Risk(d.risk_type)),
                    TransmitsHarmful => one(Value::Bool(d.transmits_harmful)),
                    CollectsResidentData => one(Value::Bool(d.collects_resident_data)),
                    AgreementViolated => one(Value::Bool(d.agreement_violated)),
                    _ => unreachable!(),
                }
            }
            EntityKind::Residents => {
                let r = &model.resident_groups[index];
                match self {
                    ResidentsName => one(Value::Name(r.name.clone())),
                    LivingNeighborhoods => toks(&r.living_neighborhoods),
                    FavoredNeighborhoods => toks(&r.favored_neighborhoods),
                    EconomicStatus => FieldValue::Set(
                        r.economic_status.iter().map(|e| Value::Economic(*e)).collect(),
                    ),
                    Professions => texts(&r.professions),
                    IotUsagePreferences => texts(&r.iot_usage_preferences),
                    HasLegitimateAuthority => one(Value::Bool(r.has_legitimate_authority)),
                    _ => unreachable!(),
                }
            }
            EntityKind::Government => {
                let g = &model.governments[index];
                match self {
                    GovernmentName => one(Value::Name(g.name.clone())),
                    GovType => one(Value::Text(g.gov_type.clone())),
                    ProjectGoals => FieldValue::Set(
                        g.project_goals
                            .iter()
                            .filter_map(|p| match p {
                                ProjectGoal::Tag(t) => Some(Value::Goal(*t)),
                                ProjectGoal::Label(_) => None,
                            })
                            .collect(),
                    ),
                    OversightIotSafety => one(Value::Bool(g.oversight_iot_safety)),
                    EnforceSafetyStandards => one(Value::Bool(g.enforce_safety_standards)),
                    _ => unreachable!(),
                }
            }
            EntityKind::Business => {
                let b = &model.businesses[index];
                match self {
                    BusinessName => one(Value::Name(b.name.clone())),
                    Scale => one(Value::Scale(b.scale)),
                    BusinessNeighborhoods => toks(&b.neighborhoods),
                    BusinessTypes => texts(&b.business_types),
                    _ => unreachable!(),
                }
            }
            EntityKind::External => unreachable!("external entities carry no fields"),
        }
    }
}

/// A field read at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Scalar(Value),
    Set(Vec<Value>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Ge,
    Le,
    Gt,
    Lt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn holds<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Ge => a >= b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Lt => a < b,
        }
    }
}

/// A value-producing sub-expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Field { var: String, field: Field },
    Literal(Value),
    SetLiteral { elem: ScalarType, items: Vec<Value> },
    /// The model's neighborhood universe.
    Universe,
    Card(Box<Term>),
}

/// Which endpoints a flow pattern accepts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EndpointPattern {
    Any,
    Kinds(Vec<EntityKind>),
}

impl EndpointPattern {
    pub fn matches(&self, kind: EntityKind) -> bool {
        match self {
            EndpointPattern::Any => true,
            EndpointPattern::Kinds(ks) => ks.contains(&kind),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsentPattern {
    Any,
    Is(Consent),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowPattern {
    pub source: EndpointPattern,
    pub dest: EndpointPattern,
    pub payload: PayloadKind,
    pub consent: ConsentPattern,
}

/// A typed first-order rule body.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleExpr {
    Forall {
        var: String,
        domain: EntityKind,
        body: Box<RuleExpr>,
    },
    Exists {
        var: String,
        domain: EntityKind,
        body: Box<RuleExpr>,
    },
    And(Box<RuleExpr>, Box<RuleExpr>),
    Or(Box<RuleExpr>, Box<RuleExpr>),
    Not(Box<RuleExpr>),
    /// `a implies b`, evaluated as `not a or b`.
    Implies(Box<RuleExpr>, Box<RuleExpr>),
    Compare { op: CmpOp, lhs: Term, rhs: Term },
    /// `a * x op b * y` over counts.
    ScaledCompare {
        lhs_coeff: u64,
        lhs: Term,
        op: CmpOp,
        rhs_coeff: u64,
        rhs: Term,
    },
    Member { elem: Term, set: Term },
    Flow(FlowPattern),
    /// A boolean field used directly as a condition.
    Field { var: String, field: Field },
    Literal(bool),
}

impl RuleExpr {
    pub fn not(e: RuleExpr) -> RuleExpr {
        RuleExpr::Not(Box::new(e))
    }

    pub fn and(a: RuleExpr, b: RuleExpr) -> RuleExpr {
        RuleExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: RuleExpr, b: RuleExpr) -> RuleExpr {
        RuleExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: RuleExpr, b: RuleExpr) -> RuleExpr {
        RuleExpr::Implies(Box::new(a), Box::new(b))
    }

    /// Atoms are the leaves whose truth value is read from the model.
    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            RuleExpr::Compare { .. }
                | RuleExpr::ScaledCompare { .. }
                | RuleExpr::Member { .. }
                | RuleExpr::Flow(_)
                | RuleExpr::Field { .. }
                | RuleExpr::Literal(_)
        )
    }

    /// Calls `f` on this node and every descendant expression, pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a RuleExpr)) {
        f(self);
        match self {
            RuleExpr::Forall { body, .. } | RuleExpr::Exists { body, .. } => body.walk(f),
            RuleExpr::And(a, b) | RuleExpr::Or(a, b) | RuleExpr::Implies(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            RuleExpr::Not(a) => a.walk(f),
            _ => {}
        }
    }

    /// Every term in this expression tree, including nested ones under `card`.
    pub fn terms(&self) -> Vec<&Term> {
        fn push<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            out.push(t);
            if let Term::Card(inner) = t {
                push(inner, out);
            }
        }
        let mut out = Vec::new();
        self.walk(&mut |e| match e {
            RuleExpr::Compare { lhs, rhs, .. } | RuleExpr::ScaledCompare { lhs, rhs, .. } => {
                push(lhs, &mut out);
                push(rhs, &mut out);
            }
            RuleExpr::Member { elem, set } => {
                push(elem, &mut out);
                push(set, &mut out);
            }
            _ => {}
        });
        out
    }
}

/// A named rule with its rights classification.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleDef {
    pub id: String,
    pub right: Right,
    pub perspective: Perspective,
    pub statement: String,
    pub expr: RuleExpr,
}

/// An ordered collection of rules with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub name: String,
    pub rules: Vec<RuleDef>,
}

impl RuleSet {
    pub fn get(&self, id: &str) -> Option<&RuleDef> {
        self.rules.iter().find(|r| r.id.eq_ignore_ascii_case(id))
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Domain keyword used after `in` in a quantifier.
pub fn domain_keyword(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Device => "devices",
        EntityKind::Residents => "resident_groups",
        EntityKind::Government => "governments",
        EntityKind::Business => "businesses",
        EntityKind::External => "external",
    }
}

pub fn parse_domain(word: &str) -> Option<EntityKind> {
    match word {
        "devices" | "device" => Some(EntityKind::Device),
        "resident_groups" | "residents" => Some(EntityKind::Residents),
        "governments" | "government" => Some(EntityKind::Government),
        "businesses" | "business" => Some(EntityKind::Business),
        _ => None,
    }
}
