//! Random well-formed city models and random boolean rule bodies.

use civitas::model::{
    BusinessInstance, CityModel, DataFlow, DeviceInstance, EntityRef, GovernmentInstance,
    ProjectGoal, ResidentGroup, Set,
};
use civitas::rules::ast::{ConsentPattern, EndpointPattern, Field, FlowPattern, RuleExpr};
use civitas::token::Token;
use civitas::vocab::{
    BusinessScale, Consent, EconomicStatus, EntityKind, GoalTag, InteractionType, MovementType,
    PayloadKind, Provenance, RiskType,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Bounds for [`random_model`].
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_per_kind: usize,
    pub max_flows: usize,
    pub max_universe: usize,
    /// Draw names and text from a pool with spaces, quotes and non-ASCII.
    pub exotic_text: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_per_kind: 3,
            max_flows: 4,
            max_universe: 5,
            exotic_text: false,
        }
    }
}

const PLAIN_HOODS: &[&str] = &["Center City", "Fairmount", "Queen Village", "Brewerytown", "Fishtown"];
const EXOTIC_HOODS: &[&str] = &["Zürich Nord", "東区", "Old \"Town\"", "Ñuñoa", "a-b_c"];
const TEXTS: &[&str] = &["Cafe", "Gas Station", "Parking Access & Payment", "Nurse", "t0"];
const EXOTIC_TEXTS: &[&str] = &["Café", "line\\slash", "tab\there", "\"quoted\"", "école"];

fn pick<'a, R: Rng, T>(rng: &mut R, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty pool")
}

fn subset<R: Rng, T: Clone + std::hash::Hash + Eq>(rng: &mut R, items: &[T], max: usize) -> Set<T> {
    let n = rng.gen_range(0..=max.min(items.len()));
    items.choose_multiple(rng, n).cloned().collect()
}

fn tok(s: &str) -> Token {
    Token::new(s).expect("pool entries are non-empty")
}

/// A random model that passes validation.
pub fn random_model<R: Rng>(rng: &mut R, cfg: &GenConfig) -> CityModel {
    let hood_pool = if cfg.exotic_text { EXOTIC_HOODS } else { PLAIN_HOODS };
    let text_pool = if cfg.exotic_text { EXOTIC_TEXTS } else { TEXTS };
    let universe_size = rng.gen_range(0..=cfg.max_universe.min(hood_pool.len()));
    let hoods: Vec<Token> = hood_pool[..universe_size].iter().map(|s| tok(s)).collect();
    let texts: Vec<String> = text_pool.iter().map(|s| s.to_string()).collect();
    let mut m = CityModel::new(if cfg.exotic_text { "Ünïcode \"city\"" } else { "random" });

    for i in 0..rng.gen_range(0..=cfg.max_per_kind) {
        m.devices.push(DeviceInstance {
            name: tok(&format!("dev{i}")),
            device_title: pick(rng, &texts).clone(),
            deploy_neighborhoods: subset(rng, &hoods, 3),
            movement_type: *pick(rng, MovementType::ALL),
            interaction_type: *pick(rng, InteractionType::ALL),
            risk_type: *pick(rng, RiskType::ALL),
            transmits_harmful: rng.gen(),
            collects_resident_data: rng.gen(),
            agreement_violated: rng.gen(),
        });
    }
    for i in 0..rng.gen_range(0..=cfg.max_per_kind) {
        let living = subset(rng, &hoods, 3);
        let living_vec: Vec<Token> = living.iter().cloned().collect();
        let mut econ = subset(rng, EconomicStatus::ALL, 3);
        if econ.is_empty() {
            econ.insert(*pick(rng, EconomicStatus::ALL));
        }
        m.resident_groups.push(ResidentGroup {
            name: tok(&format!("res{i}")),
            favored_neighborhoods: subset(rng, &living_vec, 2),
            living_neighborhoods: living,
            economic_status: econ,
            professions: subset(rng, &texts, 2),
            iot_usage_preferences: subset(rng, &texts, 3),
            has_legitimate_authority: rng.gen(),
        });
    }
    for i in 0..rng.gen_range(0..=cfg.max_per_kind) {
        let mut goals: Set<ProjectGoal> = subset(rng, GoalTag::ALL, 3)
            .into_iter()
            .map(ProjectGoal::Tag)
            .collect();
        if rng.gen_bool(0.3) {
            goals.insert(ProjectGoal::Label(pick(rng, &texts).clone()));
        }
        m.governments.push(GovernmentInstance {
            name: tok(&format!("gov{i}")),
            gov_type: pick(rng, &texts).clone(),
            project_goals: goals,
            oversight_iot_safety: rng.gen(),
            enforce_safety_standards: rng.gen(),
        });
    }
    if !hoods.is_empty() {
        for i in 0..rng.gen_range(0..=cfg.max_per_kind) {
            let mut nb = subset(rng, &hoods, 3);
            if nb.is_empty() {
                nb.insert(pick(rng, &hoods).clone());
            }
            m.businesses.push(BusinessInstance {
                name: tok(&format!("biz{i}")),
                scale: *pick(rng, BusinessScale::ALL),
                neighborhoods: nb,
                business_types: subset(rng, &texts, 2),
            });
        }
    }

    let mut ends = m.entity_refs();
    ends.push(EntityRef::new(EntityKind::External, tok("hackers")));
    ends.push(EntityRef::new(EntityKind::External, tok("broker")));
    for _ in 0..rng.gen_range(0..=cfg.max_flows) {
        let source = pick(rng, &ends).clone();
        let dest = pick(rng, &ends).clone();
        let mut payload = *pick(rng, PayloadKind::ALL);
        if source == dest {
            payload = PayloadKind::GenericMessage;
        }
        if source.kind == EntityKind::External && payload == PayloadKind::ProjectGoals {
            payload = PayloadKind::HarmfulContent;
        }
        m.flows.push(DataFlow {
            source,
            dest,
            payload,
            consent: *pick(rng, Consent::ALL),
            provenance: Provenance::Scenario,
        });
    }

    m.flows_complete = rng.gen();
    if rng.gen_bool(0.3) {
        let observed = m.observed_neighborhoods().len() as u64;
        m.declared_total_neighborhoods = Some(observed + rng.gen_range(0..=3));
    }
    debug_assert!(m.validate().is_empty(), "{:?}", m.validate());
    m
}

fn random_endpoint<R: Rng>(rng: &mut R) -> EndpointPattern {
    if rng.gen_bool(0.3) {
        EndpointPattern::Any
    } else {
        EndpointPattern::Kinds(vec![*pick(rng, EntityKind::ALL)])
    }
}

fn random_atom<R: Rng>(rng: &mut R) -> RuleExpr {
    match rng.gen_range(0..4) {
        0 => RuleExpr::Literal(rng.gen()),
        1 | 2 => RuleExpr::Flow(FlowPattern {
            source: random_endpoint(rng),
            dest: random_endpoint(rng),
            payload: *pick(rng, PayloadKind::ALL),
            consent: match rng.gen_range(0..3) {
                0 => ConsentPattern::Any,
                1 => ConsentPattern::Is(Consent::Granted),
                _ => ConsentPattern::Is(Consent::Denied),
            },
        }),
        _ => {
            let (domain, field) = *pick(
                rng,
                &[
                    (EntityKind::Device, Field::TransmitsHarmful),
                    (EntityKind::Device, Field::CollectsResidentData),
                    (EntityKind::Residents, Field::HasLegitimateAuthority),
                    (EntityKind::Government, Field::OversightIotSafety),
                ],
            );
            let body = RuleExpr::Field { var: "x".into(), field };
            if rng.gen() {
                RuleExpr::Forall { var: "x".into(), domain, body: Box::new(body) }
            } else {
                RuleExpr::Exists { var: "x".into(), domain, body: Box::new(body) }
            }
        }
    }
}

/// A closed boolean expression tree of at most `depth` connective levels.
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize) -> RuleExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_atom(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => RuleExpr::and(random_expr(rng, d), random_expr(rng, d)),
        1 => RuleExpr::or(random_expr(rng, d), random_expr(rng, d)),
        2 => RuleExpr::implies(random_expr(rng, d), random_expr(rng, d)),
        _ => RuleExpr::not(random_expr(rng, d)),
    }
}
