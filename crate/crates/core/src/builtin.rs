//! The thirteen ethical principles P1–P13 and the `SafetyPrinciple`
//! assertion, shipped as rule-language source.

use std::sync::OnceLock;

use crate::rules::ast::{RuleDef, RuleSet};
use crate::rules::parser::{parse_rule, parse_rules};

const SOURCE: &str = r#"
rule P1 right=safety perspective=residents-iot_service
    statement="The service should not be based on a device that involves high-risk physical movement, change, or transmission of harmful substances or information." :
    forall d in devices: not (d.movement_type in {mobile, hazardous} or d.risk_type = high or d.transmits_harmful = true)

rule P2 right=safety perspective=residents-government
    statement="Government should not intend to apply an IoT device to transform the physical living environment of residents while residents may interact directly with the device under safety threats." :
    forall g in governments, d in devices: not (transform_physical_living_environment in g.project_goals) or d.interaction_type = non_physical

rule P3 right=safety perspective=residents-residents
    statement="Residents should not get information about the physical locations of other residents or have increased opportunity of physical interactions with other residents by using the IoT device." :
    not flow(* -> residents : resident_location)

rule P4 right=privacy perspective=residents-government
    statement="The IoT device should not collect and/or analyze user data and make that information available to government agencies without consent." :
    forall d in devices: not d.collects_resident_data or not flow(device -> government : resident_personal_data, consent=denied)

rule P5 right=privacy perspective=residents-residents
    statement="The IoT device should not collect and/or analyze user data and make that information public or available to other residents without consent." :
    forall d in devices: not d.collects_resident_data or not flow(device -> residents : resident_personal_data, consent=denied)

rule P6 right=privacy perspective=residents-business
    statement="The IoT device should not collect and/or analyze user data and make that information used by businesses or obtained by hackers without consent." :
    forall d in devices: not d.collects_resident_data or not flow(device -> {business, external} : resident_personal_data, consent=denied)

rule P7 right=fairness perspective=residents-business
    statement="Business such as restaurants should not obtain information such as the arrival time and possible class of customers via the smart city technology." :
    not flow(* -> business : arrival_time) and not flow(* -> business : economic_status)

rule P8 right=fairness perspective=residents-residents
    statement="The IoT device should not bring up competing preferences towards its usage among residents, so that the device will not be beneficial to certain residents while causing disadvantages to others." :
    forall r in resident_groups: card(r.iot_usage_preferences) = 1

rule P9 right=fairness perspective=business-business
    statement="The smart city technology should not only be deployed in a small subset of neighborhoods or privileged neighborhoods to facilitate nearby businesses." :
    forall d in devices: 5 * card(d.deploy_neighborhoods) >= 2 * card(universe)

rule P10 right=truth perspective=residents-government
    statement="Residents should be informed about the goals and purposes of the smart city project as well as matters that may affect their rights." :
    exists flow(government -> residents : project_goals)

rule P11 right=what_is_agreed perspective=residents-iot_service
    statement="The IoT device should not collect more data or perform actions beyond what has been consented by the residents." :
    forall d in devices: d.agreement_violated = false

rule P12 right=authority perspective=residents-iot_service
    statement="Residents should have the legitimate authority to request actions to avoid undesirable or unlawful outcomes caused by the IoT service." :
    forall r in resident_groups: r.has_legitimate_authority = true

rule P13 right=authority perspective=residents-government
    statement="Government should oversight or enforce minimum safety standards for the IoT device, or increase security in public to protect the safety, privacy, and well-being of residents." :
    forall g in governments: g.oversight_iot_safety = true and g.enforce_safety_standards = true
"#;

const SAFETY_ASSERTION: &str = r#"
rule SafetyPrinciple right=safety perspective=residents-iot_service
    statement="A device that is not hazardous must not interact physically." :
    forall d in devices: d.movement_type != hazardous implies d.interaction_type != physical
"#;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown builtin rule `{0}`; known ids are P1 to P13 and SafetyPrinciple")]
pub struct UnknownRule(pub String);

fn split_blocks(src: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for chunk in src.split("\nrule ").filter(|c| !c.trim().is_empty()) {
        let text = format!("rule {}", chunk.trim_start_matches("rule ").trim());
        let id = text.split_whitespace().nth(1).unwrap_or_default().to_string();
        out.push((id, format!("{text}\n")));
    }
    out
}

/// The P1–P13 rule set, in order.
pub fn builtin_ruleset() -> &'static RuleSet {
    static SET: OnceLock<RuleSet> = OnceLock::new();
    SET.get_or_init(|| parse_rules("EthicalPrinciples", SOURCE).expect("builtin rules parse"))
}

/// The `SafetyPrinciple` assertion over devices.
pub fn safety_assertion() -> &'static RuleDef {
    static RULE: OnceLock<RuleDef> = OnceLock::new();
    RULE.get_or_init(|| parse_rule(SAFETY_ASSERTION).expect("safety assertion parses"))
}

/// Rule-language source of a builtin rule or the safety assertion.
pub fn rule_source(id: &str) -> Result<String, UnknownRule> {
    split_blocks(SOURCE)
        .into_iter()
        .chain(split_blocks(SAFETY_ASSERTION))
        .find(|(rid, _)| rid.eq_ignore_ascii_case(id))
        .map(|(_, text)| text)
        .ok_or_else(|| UnknownRule(id.to_string()))
}

/// Looks up a builtin rule or the safety assertion by id.
pub fn builtin_rule(id: &str) -> Option<&'static RuleDef> {
    builtin_ruleset().get(id).or_else(|| {
        let s = safety_assertion();
        s.id.eq_ignore_ascii_case(id).then_some(s)
    })
}
