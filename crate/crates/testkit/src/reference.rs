//! Hand-written checkers for the builtin principles, working directly on
//! model structs with `Option<bool>` as the three-valued truth type.
//!
//! `Some(true)` is compliant, `Some(false)` violated, `None` unknown.

use civitas::model::{CityModel, DataFlow, ProjectGoal};
use civitas::vocab::{Consent, EntityKind, GoalTag, InteractionType, MovementType, PayloadKind, RiskType};

pub const RULE_IDS: [&str; 14] = [
    "P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10", "P11", "P12", "P13",
    "SafetyPrinciple",
];

fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn not(a: Option<bool>) -> Option<bool> {
    a.map(|x| !x)
}

fn or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    not(and(not(a), not(b)))
}

fn all<I: IntoIterator<Item = Option<bool>>>(items: I) -> Option<bool> {
    items.into_iter().fold(Some(true), and)
}

/// Is there a flow between these kinds with this payload (and consent, if given)?
fn flow(
    m: &CityModel,
    from: Option<&[EntityKind]>,
    to: &[EntityKind],
    payload: PayloadKind,
    consent: Option<Consent>,
) -> Option<bool> {
    let shape = |f: &DataFlow| {
        from.is_none_or(|ks| ks.contains(&f.source.kind)) && to.contains(&f.dest.kind) && f.payload == payload
    };
    let mut maybe = false;
    for f in m.flows.iter().filter(|f| shape(f)) {
        match consent {
            None => return Some(true),
            Some(c) if f.consent == c => return Some(true),
            Some(_) if f.consent == Consent::Unknown => maybe = true,
            Some(_) => {}
        }
    }
    if maybe || !m.flows_complete {
        None
    } else {
        Some(false)
    }
}

fn personal_data_rule(m: &CityModel, to: &[EntityKind]) -> Option<bool> {
    let leak = flow(
        m,
        Some(&[EntityKind::Device]),
        to,
        PayloadKind::ResidentPersonalData,
        Some(Consent::Denied),
    );
    all(m.devices.iter().map(|d| or(Some(!d.collects_resident_data), not(leak))))
}

fn universe_size(m: &CityModel) -> u64 {
    let observed = m.observed_neighborhoods().len() as u64;
    observed.max(m.declared_total_neighborhoods.unwrap_or(0))
}

/// Evaluates builtin rule `id` by hand. Panics on an unknown id.
pub fn check(id: &str, m: &CityModel) -> Option<bool> {
    match id {
        "P1" => Some(m.devices.iter().all(|d| {
            !(matches!(d.movement_type, MovementType::Mobile | MovementType::Hazardous)
                || d.risk_type == RiskType::High
                || d.transmits_harmful)
        })),
        "P2" => Some(m.governments.iter().all(|g| {
            let transforms = g
                .project_goals
                .contains(&ProjectGoal::Tag(GoalTag::TransformPhysicalLivingEnvironment));
            m.devices
                .iter()
                .all(|d| !transforms || d.interaction_type == InteractionType::NonPhysical)
        })),
        "P3" => not(flow(m, None, &[EntityKind::Residents], PayloadKind::ResidentLocation, None)),
        "P4" => personal_data_rule(m, &[EntityKind::Government]),
        "P5" => personal_data_rule(m, &[EntityKind::Residents]),
        "P6" => personal_data_rule(m, &[EntityKind::Business, EntityKind::External]),
        "P7" => and(
            not(flow(m, None, &[EntityKind::Business], PayloadKind::ArrivalTime, None)),
            not(flow(m, None, &[EntityKind::Business], PayloadKind::EconomicStatus, None)),
        ),
        "P8" => Some(m.resident_groups.iter().all(|r| r.iot_usage_preferences.len() == 1)),
        "P9" => {
            let u = universe_size(m) as u128;
            Some(m.devices.iter().all(|d| 5 * d.deploy_neighborhoods.len() as u128 >= 2 * u))
        }
        "P10" => flow(
            m,
            Some(&[EntityKind::Government]),
            &[EntityKind::Residents],
            PayloadKind::ProjectGoals,
            None,
        ),
        "P11" => Some(m.devices.iter().all(|d| !d.agreement_violated)),
        "P12" => Some(m.resident_groups.iter().all(|r| r.has_legitimate_authority)),
        "P13" => Some(
            m.governments
                .iter()
                .all(|g| g.oversight_iot_safety && g.enforce_safety_standards),
        ),
        "SafetyPrinciple" => Some(m.devices.iter().all(|d| {
            d.movement_type == MovementType::Hazardous || d.interaction_type != InteractionType::Physical
        })),
        other => panic!("no reference checker for `{other}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectives_follow_strong_kleene() {
        let vals = [Some(false), None, Some(true)];
        for a in vals {
            for b in vals {
                assert_eq!(and(a, b), and(b, a));
                assert_eq!(or(a, b), not(and(not(a), not(b))));
            }
        }
        assert_eq!(and(None, Some(false)), Some(false));
        assert_eq!(or(None, Some(true)), Some(true));
        assert_eq!(all([]), Some(true));
    }

    #[test]
    fn empty_model() {
        let mut m = CityModel::new("e");
        let open: Vec<Option<bool>> = RULE_IDS.iter().map(|id| check(id, &m)).collect();
        assert_eq!(open[2], None);
        assert_eq!(open[9], None);
        m.flows_complete = true;
        assert_eq!(check("P10", &m), Some(false));
        assert_eq!(check("P3", &m), Some(true));
    }
}
