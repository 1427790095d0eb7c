use std::time::Instant;

use civitas::finder::Scope;
use civitas::*;
use civitas_testkit::naive::{MAX_FLOWS, MAX_SET_CARD};
use civitas_testkit::{naive_can_violate, MicroScope, RULE_IDS};

fn finder_scope(m: MicroScope) -> Scope {
    Scope {
        max_devices: m.device as usize,
        max_resident_groups: m.residents as usize,
        max_governments: m.government as usize,
        max_businesses: m.business as usize,
        neighborhood_universe_size: m.universe,
        max_flows: MAX_FLOWS,
        max_set_card: MAX_SET_CARD,
        candidate_budget: u64::MAX,
    }
}

#[test]
fn finder_agrees_with_generate_and_test() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut violable = 0;
    for scope in MicroScope::all() {
        for id in RULE_IDS {
            let rule = builtin_rule(id).unwrap();
            let found = match find_counterexample(rule, &finder_scope(scope)) {
                CheckResult::Counterexample { model, .. } => {
                    assert!(model.validate().is_empty(), "{id}: invalid counterexample");
                    assert!(eval_rule(rule, &model).is_violated());
                    true
                }
                CheckResult::HoldsWithinScope(_) => false,
                CheckResult::BudgetExhausted(_) => panic!("unbounded budget exhausted"),
            };
            let (naive, _) = naive_can_violate(id, scope);
            violable += naive as usize;
            if found != naive {
                mismatches.push(format!("{id} {scope:?}: finder {found}, naive {naive}"));
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
    assert!(violable > 0);
    assert!(start.elapsed().as_secs() < 60);
}
