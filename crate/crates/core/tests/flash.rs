use civitas::rules::eval::Verdict;
use civitas::{
    aggregate, builtin_ruleset, eval_rule, find_counterexample, judge, minimize_witness,
    neighborhood_universe, parse_facts, parse_scenario, render_scenario, safety_assertion,
    validate_model, CheckResult, CityModel, WorldMode,
};
use civitas::vocab::{Right, RiskType};

const FLASH: &str = include_str!("../../../scenarios/flash.city");
const FACTS: &str = include_str!("../../../scenarios/flash_consentless.facts");

fn flash() -> CityModel {
    parse_scenario(FLASH).expect("fixture parses")
}

fn labels(model: &CityModel, world: WorldMode, facts: Option<&str>) -> Vec<(String, &'static str)> {
    let facts = facts.map(|f| parse_facts(f).unwrap());
    let report = judge(model, builtin_ruleset(), facts.as_ref(), world).unwrap();
    report
        .entries
        .iter()
        .map(|e| (e.rule.clone(), e.verdict.label()))
        .collect()
}

fn expect(got: &[(String, &str)], want: &[(&str, &str)]) {
    for (id, label) in want {
        let found = got.iter().find(|(r, _)| r == id).map(|(_, l)| *l);
        assert_eq!(found, Some(*label), "{id}");
    }
}

#[test]
fn fixture_shape() {
    let m = flash();
    assert_eq!(m.devices.len(), 1);
    assert_eq!(m.resident_groups.len(), 1);
    assert_eq!(m.governments.len(), 1);
    assert_eq!(m.businesses.len(), 1);
    assert!(validate_model(&m).is_empty());
    assert_eq!(neighborhood_universe(&m).len(), 10);
    assert_eq!(parse_scenario(&render_scenario(&m)).unwrap(), m);
}

#[test]
fn open_world_verdicts() {
    let got = labels(&flash(), WorldMode::Open, None);
    expect(
        &got,
        &[
            ("P1", "violated"),
            ("P2", "compliant"),
            ("P3", "indeterminate"),
            ("P4", "indeterminate"),
            ("P5", "indeterminate"),
            ("P6", "indeterminate"),
            ("P7", "indeterminate"),
            ("P8", "compliant"),
            ("P9", "compliant"),
            ("P10", "indeterminate"),
            ("P11", "compliant"),
            ("P12", "compliant"),
            ("P13", "compliant"),
        ],
    );
    let ids: Vec<&str> = got.iter().map(|(r, _)| r.as_str()).collect();
    assert_eq!(ids[..3], ["P1", "P2", "P3"]);
    assert_eq!(ids[12], "P13");
}

#[test]
fn closed_world_verdicts() {
    let got = labels(&flash(), WorldMode::Closed, None);
    expect(
        &got,
        &[
            ("P3", "compliant"),
            ("P4", "compliant"),
            ("P5", "compliant"),
            ("P6", "compliant"),
            ("P7", "compliant"),
            ("P10", "violated"),
        ],
    );
}

#[test]
fn human_facts() {
    let got = labels(&flash(), WorldMode::Open, Some(FACTS));
    expect(
        &got,
        &[("P1", "violated"), ("P4", "violated"), ("P6", "violated"), ("P5", "indeterminate")],
    );
}

#[test]
fn p1_witness_names_the_high_risk_atom() {
    let m = flash();
    let p1 = builtin_ruleset().get("P1").unwrap();
    let Verdict::Violated(ws) = eval_rule(p1, &m) else { panic!() };
    assert_eq!(ws.len(), 1);
    assert_eq!(ws[0].bindings[0].entity.name.as_str(), "Parking_device");
    assert!(ws[0].atoms.iter().any(|a| a.atom.contains("risk_type = high") && a.holds));
    let text = civitas::explain(&Verdict::Violated(ws), p1);
    assert!(text.contains("P1") && text.contains("safety") && text.contains("risk_type = high"), "{text}");
}

#[test]
fn p4_indeterminate_on_the_flow_atom() {
    let m = flash();
    let p4 = builtin_ruleset().get("P4").unwrap();
    let v = eval_rule(p4, &m);
    let Verdict::Indeterminate(atoms) = &v else { panic!() };
    assert_eq!(atoms.len(), 1);
    assert!(atoms[0].atom.starts_with("flow(device -> government : resident_personal_data"));
    assert!(civitas::explain(&v, p4).contains(".facts"));
}

#[test]
fn safety_aggregate() {
    let report = judge(&flash(), builtin_ruleset(), None, WorldMode::Open).unwrap();
    let agg = aggregate(&report);
    let (right, s) = agg.by_right[0];
    assert_eq!(right, Right::Safety);
    assert_eq!((s.violated, s.compliant, s.indeterminate), (1, 1, 1));
}

#[test]
fn safety_assertion_on_flash() {
    assert!(eval_rule(safety_assertion(), &flash()).is_violated());
    let r = find_counterexample(safety_assertion(), &civitas::Scope::parse("devices=1").unwrap());
    assert!(matches!(r, CheckResult::Counterexample { .. }));
}

#[test]
fn minimized_p1_keeps_only_the_high_risk_device() {
    let p1 = builtin_ruleset().get("P1").unwrap();
    let min = minimize_witness(&flash(), p1).unwrap();
    assert_eq!(min.devices.len(), 1);
    assert!(min.resident_groups.is_empty() && min.governments.is_empty() && min.businesses.is_empty());
    assert_eq!(min.devices[0].risk_type, RiskType::High);
    assert!(eval_rule(p1, &min).is_violated());
    assert_eq!(minimize_witness(&min, p1).unwrap(), min);
}
