//! Generate-and-test over micro scopes, judged by the reference checkers.
//!
//! Every combination of the fields a rule reads, every flow set of size at
//! most one (all payloads, all consents) and every universe size up to the
//! bound is built and checked under complete flow knowledge.

use civitas::model::{
    BusinessInstance, CityModel, DataFlow, DeviceInstance, EntityRef, GovernmentInstance,
    ProjectGoal, ResidentGroup, Set,
};
use civitas::token::Token;
use civitas::vocab::{
    BusinessScale, Consent, EconomicStatus, EntityKind, GoalTag, InteractionType, MovementType,
    PayloadKind, Provenance, RiskType,
};

use crate::reference;

/// Upper bounds of zero or one entity per kind, so each bound is a flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MicroScope {
    pub device: bool,
    pub residents: bool,
    pub government: bool,
    pub business: bool,
    pub universe: usize,
}

impl MicroScope {
    /// Every scope with at most one entity per kind and universe at most 2.
    pub fn all() -> Vec<MicroScope> {
        let mut out = Vec::new();
        for bits in 0..16u8 {
            for universe in 0..=2 {
                out.push(MicroScope {
                    device: bits & 1 != 0,
                    residents: bits & 2 != 0,
                    government: bits & 4 != 0,
                    business: bits & 8 != 0,
                    universe,
                });
            }
        }
        out
    }
}

pub const MAX_SET_CARD: usize = 2;
pub const MAX_FLOWS: usize = 1;

fn tok(s: &str) -> Token {
    Token::new(s).unwrap()
}

fn power_set<T: Clone + std::hash::Hash + Eq>(items: &[T], min: usize) -> Vec<Set<T>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << items.len()) {
        let n = mask.count_ones() as usize;
        if n >= min && n <= MAX_SET_CARD {
            out.push(items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, x)| x.clone()).collect());
        }
    }
    out
}

/// The fields of each kind that rule `id` reads, named as in the rule language.
fn read_set(id: &str) -> &'static [&'static str] {
    match id {
        "P1" => &["movement_type", "risk_type", "transmits_harmful"],
        "P2" => &["interaction_type", "project_goals"],
        "P4" | "P5" | "P6" => &["collects_resident_data"],
        "P8" => &["iot_usage_preferences"],
        "P9" => &["deploy_neighborhoods"],
        "P11" => &["agreement_violated"],
        "P12" => &["has_legitimate_authority"],
        "P13" => &["oversight_iot_safety", "enforce_safety_standards"],
        "SafetyPrinciple" => &["movement_type", "interaction_type"],
        _ => &[],
    }
}

fn vary<T: Clone>(reads: &[&str], field: &str, all: Vec<T>) -> Vec<T> {
    if reads.contains(&field) {
        all
    } else {
        all.into_iter().take(1).collect()
    }
}

fn devices(reads: &[&str], hoods: &[Token]) -> Vec<DeviceInstance> {
    let mut out = Vec::new();
    for deploy in vary(reads, "deploy_neighborhoods", power_set(hoods, 0)) {
        for &movement in &vary(reads, "movement_type", MovementType::ALL.to_vec()) {
            for &interaction in &vary(reads, "interaction_type", InteractionType::ALL.to_vec()) {
                for &risk in &vary(reads, "risk_type", RiskType::ALL.to_vec()) {
                    for &harm in &vary(reads, "transmits_harmful", vec![false, true]) {
                        for &collects in &vary(reads, "collects_resident_data", vec![false, true]) {
                            for &agreement in &vary(reads, "agreement_violated", vec![false, true]) {
                                out.push(DeviceInstance {
                                    name: tok("dev"),
                                    device_title: "title".into(),
                                    deploy_neighborhoods: deploy.clone(),
                                    movement_type: movement,
                                    interaction_type: interaction,
                                    risk_type: risk,
                                    transmits_harmful: harm,
                                    collects_resident_data: collects,
                                    agreement_violated: agreement,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn residents(reads: &[&str]) -> Vec<ResidentGroup> {
    let texts = ["a".to_string(), "b".to_string()];
    let mut out = Vec::new();
    for prefs in vary(reads, "iot_usage_preferences", power_set(&texts, 0)) {
        for &authority in &vary(reads, "has_legitimate_authority", vec![false, true]) {
            out.push(ResidentGroup {
                name: tok("res"),
                living_neighborhoods: Set::new(),
                favored_neighborhoods: Set::new(),
                economic_status: [EconomicStatus::Middle].into_iter().collect(),
                professions: Set::new(),
                iot_usage_preferences: prefs.clone(),
                has_legitimate_authority: authority,
            });
        }
    }
    out
}

fn governments(reads: &[&str]) -> Vec<GovernmentInstance> {
    let mut out = Vec::new();
    for goals in vary(reads, "project_goals", power_set(GoalTag::ALL, 0)) {
        for &oversight in &vary(reads, "oversight_iot_safety", vec![false, true]) {
            for &enforce in &vary(reads, "enforce_safety_standards", vec![false, true]) {
                out.push(GovernmentInstance {
                    name: tok("gov"),
                    gov_type: "agency".into(),
                    project_goals: goals.iter().map(|g| ProjectGoal::Tag(*g)).collect(),
                    oversight_iot_safety: oversight,
                    enforce_safety_standards: enforce,
                });
            }
        }
    }
    out
}

/// The empty list, plus one singleton per option when the kind is allowed.
fn at_most_one<T: Clone>(allowed: bool, options: Vec<T>) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    if allowed {
        out.extend(options.into_iter().map(|x| vec![x]));
    }
    out
}

fn flow_sets(m: &CityModel) -> Vec<Vec<DataFlow>> {
    let mut ends = m.entity_refs();
    ends.push(EntityRef::new(EntityKind::External, tok("outsider")));
    let mut out = vec![vec![]];
    for s in &ends {
        for d in &ends {
            for &payload in PayloadKind::ALL {
                if s == d && payload != PayloadKind::GenericMessage {
                    continue;
                }
                if s.kind == EntityKind::External && payload == PayloadKind::ProjectGoals {
                    continue;
                }
                for &consent in Consent::ALL {
                    out.push(vec![DataFlow {
                        source: s.clone(),
                        dest: d.clone(),
                        payload,
                        consent,
                        provenance: Provenance::Scenario,
                    }]);
                }
            }
        }
    }
    debug_assert!(out.iter().all(|f| f.len() <= MAX_FLOWS));
    out
}

/// Whether some model within `scope` violates builtin rule `id`, and the number of models tried.
pub fn naive_can_violate(id: &str, scope: MicroScope) -> (bool, u64) {
    let reads = read_set(id);
    let mut tried = 0u64;
    for u in 0..=scope.universe {
        let hoods: Vec<Token> = (0..u).map(|i| tok(&format!("hood{i}"))).collect();
        let business: Vec<BusinessInstance> = hoods
            .first()
            .map(|h| BusinessInstance {
                name: tok("biz"),
                scale: BusinessScale::Small,
                neighborhoods: [h.clone()].into_iter().collect(),
                business_types: Set::new(),
            })
            .into_iter()
            .collect();
        for ds in at_most_one(scope.device, devices(reads, &hoods)) {
            for rs in at_most_one(scope.residents, residents(reads)) {
                for gs in at_most_one(scope.government, governments(reads)) {
                    for bs in at_most_one(scope.business, business.clone()) {
                        let mut m = CityModel::new("naive");
                        m.devices = ds.clone();
                        m.resident_groups = rs.clone();
                        m.governments = gs.clone();
                        m.businesses = bs;
                        m.flows_complete = true;
                        m.declared_total_neighborhoods = Some(u as u64);
                        for flows in flow_sets(&m) {
                            m.flows = flows;
                            tried += 1;
                            debug_assert!(m.validate().is_empty());
                            if reference::check(id, &m) == Some(false) {
                                return (true, tried);
                            }
                        }
                    }
                }
            }
        }
    }
    (false, tried)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forty_eight_scopes() {
        assert_eq!(MicroScope::all().len(), 48);
    }

    #[test]
    fn empty_scope_violates_only_flow_existence() {
        let empty = MicroScope { device: false, residents: false, government: false, business: false, universe: 0 };
        for id in reference::RULE_IDS {
            let (violated, _) = naive_can_violate(id, empty);
            assert_eq!(violated, id == "P10", "{id}");
        }
    }
}
