//! The finite socio-technical instance: devices, resident groups, government
//! agencies, businesses and the data flows between them.

use std::fmt;

use indexmap::IndexSet;

use crate::token::{NeighborhoodId, Token};
use crate::vocab::{
    BusinessScale, Consent, EconomicStatus, EntityKind, GoalTag, InteractionType, MovementType,
    PayloadKind, Provenance, RiskType,
};

/// Insertion-ordered set. Equality ignores order; rendering follows it.
pub type Set<T> = IndexSet<T>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityRef {
    pub kind: EntityKind,
    pub name: Token,
}

impl EntityRef {
    pub fn new(kind: EntityKind, name: Token) -> Self {
        Self { kind, name }
    }
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceInstance {
    pub name: Token,
    pub device_title: String,
    pub deploy_neighborhoods: Set<NeighborhoodId>,
    pub movement_type: MovementType,
    pub interaction_type: InteractionType,
    pub risk_type: RiskType,
    pub transmits_harmful: bool,
    pub collects_resident_data: bool,
    pub agreement_violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidentGroup {
    pub name: Token,
    pub living_neighborhoods: Set<NeighborhoodId>,
    pub favored_neighborhoods: Set<NeighborhoodId>,
    pub economic_status: Set<EconomicStatus>,
    pub professions: Set<String>,
    pub iot_usage_preferences: Set<String>,
    pub has_legitimate_authority: bool,
}

/// A government project goal: either a registered tag that rules can match,
/// or a free-text label carried for display only.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProjectGoal {
    Tag(GoalTag),
    Label(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GovernmentInstance {
    pub name: Token,
    pub gov_type: String,
    pub project_goals: Set<ProjectGoal>,
    pub oversight_iot_safety: bool,
    pub enforce_safety_standards: bool,
}

impl GovernmentInstance {
    pub fn goal_tags(&self) -> impl Iterator<Item = GoalTag> + '_ {
        self.project_goals.iter().filter_map(|g| match g {
            ProjectGoal::Tag(t) => Some(*t),
            ProjectGoal::Label(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusinessInstance {
    pub name: Token,
    pub scale: BusinessScale,
    pub neighborhoods: Set<NeighborhoodId>,
    pub business_types: Set<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DataFlow {
    pub source: EntityRef,
    pub dest: EntityRef,
    pub payload: PayloadKind,
    pub consent: Consent,
    pub provenance: Provenance,
}

impl fmt::Display for DataFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} : {} (consent {})",
            self.source, self.dest, self.payload, self.consent
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CityModel {
    pub scenario_name: String,
    pub devices: Vec<DeviceInstance>,
    pub resident_groups: Vec<ResidentGroup>,
    pub governments: Vec<GovernmentInstance>,
    pub businesses: Vec<BusinessInstance>,
    pub flows: Vec<DataFlow>,
    pub flows_complete: bool,
    pub declared_total_neighborhoods: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    DuplicateName { entity: EntityRef },
    DanglingRef { flow_index: usize, entity: EntityRef },
    SelfFlow { flow_index: usize, entity: EntityRef },
    ExternalProjectGoals { flow_index: usize },
    FavoredNotLiving { group: Token, neighborhood: NeighborhoodId },
    EmptyEconomicStatus { group: Token },
    EmptyBusinessNeighborhoods { business: Token },
    UniverseTooSmall { declared: u64, observed: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::DuplicateName { entity } => {
                write!(f, "duplicate {} name `{}`", entity.kind, entity.name)
            }
            ValidationIssue::DanglingRef { flow_index, entity } => write!(
                f,
                "flow #{} references undeclared {} `{}`",
                flow_index + 1,
                entity.kind,
                entity.name
            ),
            ValidationIssue::SelfFlow { flow_index, entity } => write!(
                f,
                "flow #{} sends from `{}` to itself; only generic_message may do that",
                flow_index + 1,
                entity.name
            ),
            ValidationIssue::ExternalProjectGoals { flow_index } => write!(
                f,
                "flow #{} has an external source carrying project_goals",
                flow_index + 1
            ),
            ValidationIssue::FavoredNotLiving { group, neighborhood } => write!(
                f,
                "residents `{group}` favor `{neighborhood}` but do not live there"
            ),
            ValidationIssue::EmptyEconomicStatus { group } => {
                write!(f, "residents `{group}` have an empty economic_status")
            }
            ValidationIssue::EmptyBusinessNeighborhoods { business } => {
                write!(f, "business `{business}` has no neighborhoods")
            }
            ValidationIssue::UniverseTooSmall { declared, observed } => write!(
                f,
                "total_neighborhoods is {declared} but {observed} distinct neighborhoods are used"
            ),
        }
    }
}

impl CityModel {
    pub fn new(scenario_name: impl Into<String>) -> Self {
        Self {
            scenario_name: scenario_name.into(),
            ..Self::default()
        }
    }

    /// Entity names of one declared kind, in declaration order.
    pub fn names(&self, kind: EntityKind) -> Vec<&Token> {
        match kind {
            EntityKind::Device => self.devices.iter().map(|d| &d.name).collect(),
            EntityKind::Residents => self.resident_groups.iter().map(|r| &r.name).collect(),
            EntityKind::Government => self.governments.iter().map(|g| &g.name).collect(),
            EntityKind::Business => self.businesses.iter().map(|b| &b.name).collect(),
            EntityKind::External => Vec::new(),
        }
    }

    pub fn count(&self, kind: EntityKind) -> usize {
        match kind {
            EntityKind::Device => self.devices.len(),
            EntityKind::Residents => self.resident_groups.len(),
            EntityKind::Government => self.governments.len(),
            EntityKind::Business => self.businesses.len(),
            EntityKind::External => 0,
        }
    }

    /// Every declared entity in canonical order (devices, residents, governments, businesses).
    pub fn entity_refs(&self) -> Vec<EntityRef> {
        EntityKind::DECLARED
            .iter()
            .flat_map(|&kind| {
                self.names(kind)
                    .into_iter()
                    .map(move |n| EntityRef::new(kind, n.clone()))
            })
            .collect()
    }

    /// Whether `entity` names a declared entity. External references always resolve.
    pub fn resolves(&self, entity: &EntityRef) -> bool {
        entity.kind == EntityKind::External
            || self.names(entity.kind).iter().any(|n| **n == entity.name)
    }

    /// Union of every neighborhood set across all entities, first-seen order.
    pub fn observed_neighborhoods(&self) -> Set<NeighborhoodId> {
        let mut out = Set::new();
        for d in &self.devices {
            out.extend(d.deploy_neighborhoods.iter().cloned());
        }
        for r in &self.resident_groups {
            out.extend(r.living_neighborhoods.iter().cloned());
            out.extend(r.favored_neighborhoods.iter().cloned());
        }
        for b in &self.businesses {
            out.extend(b.neighborhoods.iter().cloned());
        }
        out
    }

    /// The neighborhood universe used by rules that compare against the city total.
    ///
    /// With a declared total, observed names are padded with synthetic
    /// `#1`, `#2`, ... members until the declared count is reached.
    pub fn neighborhood_universe(&self) -> Set<NeighborhoodId> {
        let mut universe = self.observed_neighborhoods();
        if let Some(total) = self.declared_total_neighborhoods {
            let mut next = 1usize;
            while (universe.len() as u64) < total {
                let synthetic = Token::new(&format!("#{next}")).expect("non-empty");
                next += 1;
                universe.insert(synthetic);
            }
        }
        universe
    }

    /// Reports every well-formedness issue; an empty list means the model is valid.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();

        for kind in EntityKind::DECLARED {
            let mut seen = Set::new();
            for name in self.names(kind) {
                if !seen.insert(name) {
                    issues.push(ValidationIssue::DuplicateName {
                        entity: EntityRef::new(kind, name.clone()),
                    });
                }
            }
        }

        for (idx, flow) in self.flows.iter().enumerate() {
            for end in [&flow.source, &flow.dest] {
                if !self.resolves(end) {
                    issues.push(ValidationIssue::DanglingRef {
                        flow_index: idx,
                        entity: end.clone(),
                    });
                }
            }
            if flow.source == flow.dest && flow.payload != PayloadKind::GenericMessage {
                issues.push(ValidationIssue::SelfFlow {
                    flow_index: idx,
                    entity: flow.source.clone(),
                });
            }
            if flow.source.kind == EntityKind::External && flow.payload == PayloadKind::ProjectGoals
            {
                issues.push(ValidationIssue::ExternalProjectGoals { flow_index: idx });
            }
        }

        for r in &self.resident_groups {
            for n in &r.favored_neighborhoods {
                if !r.living_neighborhoods.contains(n) {
                    issues.push(ValidationIssue::FavoredNotLiving {
                        group: r.name.clone(),
                        neighborhood: n.clone(),
                    });
                }
            }
            if r.economic_status.is_empty() {
                issues.push(ValidationIssue::EmptyEconomicStatus {
                    group: r.name.clone(),
                });
            }
        }

        for b in &self.businesses {
            if b.neighborhoods.is_empty() {
                issues.push(ValidationIssue::EmptyBusinessNeighborhoods {
                    business: b.name.clone(),
                });
            }
        }

        if let Some(declared) = self.declared_total_neighborhoods {
            let observed = self.observed_neighborhoods().len();
            if (observed as u64) > declared {
                issues.push(ValidationIssue::UniverseTooSmall { declared, observed });
            }
        }

        issues
    }
}

/// Free-function form of [`CityModel::validate`].
pub fn validate_model(model: &CityModel) -> Vec<ValidationIssue> {
    model.validate()
}

/// Free-function form of [`CityModel::neighborhood_universe`].
pub fn neighborhood_universe(model: &CityModel) -> Set<NeighborhoodId> {
    model.neighborhood_universe()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::tok;

    fn device(name: &str, hoods: &[&str]) -> DeviceInstance {
        DeviceInstance {
            name: tok(name),
            device_title: String::new(),
            deploy_neighborhoods: hoods.iter().map(|h| tok(h)).collect(),
            movement_type: MovementType::Stationary,
            interaction_type: InteractionType::Physical,
            risk_type: RiskType::Low,
            transmits_harmful: false,
            collects_resident_data: false,
            agreement_violated: false,
        }
    }

    fn flow(src: EntityRef, dest: EntityRef, payload: PayloadKind) -> DataFlow {
        DataFlow {
            source: src,
            dest,
            payload,
            consent: Consent::Unknown,
            provenance: Provenance::Scenario,
        }
    }

    #[test]
    fn empty_model_is_valid_with_empty_universe() {
        let m = CityModel::default();
        assert!(m.validate().is_empty());
        assert!(m.neighborhood_universe().is_empty());
    }

    #[test]
    fn dangling_flow_reference() {
        let mut m = CityModel::new("t");
        let x = EntityRef::new(EntityKind::Device, tok("X"));
        let ext = EntityRef::new(EntityKind::External, tok("hackers"));
        m.flows.push(flow(x.clone(), ext, PayloadKind::ResidentPersonalData));
        assert_eq!(
            m.validate(),
            vec![ValidationIssue::DanglingRef {
                flow_index: 0,
                entity: x
            }]
        );
    }

    #[test]
    fn universe_too_small() {
        let mut m = CityModel::new("t");
        m.devices.push(device("d", &["a", "b", "c", "d", "e"]));
        m.declared_total_neighborhoods = Some(3);
        assert_eq!(
            m.validate(),
            vec![ValidationIssue::UniverseTooSmall {
                declared: 3,
                observed: 5
            }]
        );
    }

    #[test]
    fn declared_total_dominates_universe() {
        let mut m = CityModel::new("t");
        m.devices.push(device("d", &["a", "b"]));
        assert_eq!(m.neighborhood_universe().len(), 2);
        m.declared_total_neighborhoods = Some(12);
        let u = m.neighborhood_universe();
        assert_eq!(u.len(), 12);
        assert!(u.contains(&tok("A")));
    }

    #[test]
    fn duplicate_names_are_case_insensitive() {
        let mut m = CityModel::new("t");
        m.devices.push(device("Kiosk", &[]));
        m.devices.push(device("kiosk", &[]));
        assert!(matches!(
            m.validate().as_slice(),
            [ValidationIssue::DuplicateName { .. }]
        ));
    }

    #[test]
    fn self_flow_only_for_generic_message() {
        let mut m = CityModel::new("t");
        m.devices.push(device("d", &[]));
        let d = EntityRef::new(EntityKind::Device, tok("d"));
        m.flows.push(flow(d.clone(), d.clone(), PayloadKind::GenericMessage));
        assert!(m.validate().is_empty());
        m.flows.push(flow(d.clone(), d, PayloadKind::ArrivalTime));
        assert_eq!(m.validate().len(), 1);
    }

    #[test]
    fn external_cannot_send_project_goals() {
        let mut m = CityModel::new("t");
        m.devices.push(device("d", &[]));
        m.flows.push(flow(
            EntityRef::new(EntityKind::External, tok("x")),
            EntityRef::new(EntityKind::Device, tok("d")),
            PayloadKind::ProjectGoals,
        ));
        assert_eq!(
            m.validate(),
            vec![ValidationIssue::ExternalProjectGoals { flow_index: 0 }]
        );
    }

    #[test]
    fn universe_is_monotone_under_added_entities() {
        let mut m = CityModel::new("t");
        m.devices.push(device("d", &["a", "b"]));
        let before = m.neighborhood_universe();
        m.devices.push(device("e", &["c"]));
        let after = m.neighborhood_universe();
        assert!(before.iter().all(|n| after.contains(n)));
    }
}
