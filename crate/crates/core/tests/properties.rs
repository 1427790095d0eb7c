use civitas::facts::FactSet;
use civitas::rules::ast::RuleExpr;
use civitas::rules::eval::Bindings;
use civitas::vocab::{Perspective, Right, Role};
use civitas::*;
use civitas_testkit::{random_expr, random_model, reference, GenConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FLASH: &str = include_str!("../../../scenarios/flash.city");

fn all_rules() -> Vec<&'static RuleDef> {
    let mut rules: Vec<&RuleDef> = builtin_ruleset().rules.iter().collect();
    rules.push(safety_assertion());
    rules
}

#[test]
fn builtin_rules_agree_with_reference_checkers() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC171);
    let mut mismatches = Vec::new();
    let mut seen = [0usize; 3];
    for i in 0..1500 {
        let cfg = GenConfig { exotic_text: i % 5 == 0, ..GenConfig::default() };
        let model = random_model(&mut rng, &cfg);
        assert!(model.validate().is_empty());
        for rule in all_rules() {
            let got = eval_rule(rule, &model).truth();
            let want = reference::check(&rule.id, &model);
            seen[got as usize] += 1;
            if got.to_bool() != want {
                mismatches.push(format!("model {i} rule {}: engine {got}, reference {want:?}", rule.id));
            }
        }
    }
    assert!(mismatches.is_empty(), "{} mismatches, first: {}", mismatches.len(), mismatches[0]);
    assert!(seen.iter().all(|&n| n > 0), "every verdict kind should occur: {seen:?}");
}

#[test]
fn scenarios_round_trip_through_text() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..150 {
        let cfg = GenConfig { exotic_text: i % 2 == 1, ..GenConfig::default() };
        let model = random_model(&mut rng, &cfg);
        let text = render_scenario(&model);
        let back = parse_scenario(&text).unwrap_or_else(|e| panic!("{}", e.render("gen.city", &text)));
        assert_eq!(back, model, "\n{text}");
        assert_eq!(render_scenario(&back), text);
    }
}

#[test]
fn rules_round_trip_through_text() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for rule in all_rules() {
        assert_eq!(&parse_rule(&rule.to_string()).unwrap(), rule);
    }
    for i in 0..300 {
        let rule = RuleDef {
            id: format!("R{i}"),
            right: Right::Safety,
            perspective: Perspective(Role::Residents, Role::Government),
            statement: if i % 3 == 0 { String::new() } else { format!("say \"{i}\"") },
            expr: random_expr(&mut rng, 4),
        };
        let text = rule.to_string();
        assert_eq!(parse_rule(&text).unwrap_or_else(|e| panic!("{e}\n{text}")), rule, "\n{text}");
    }
}

#[test]
fn kleene_truth_tables() {
    use TruthValue::{False as F, True as T, Unknown as U};
    let and = [[F, F, F], [F, U, U], [F, U, T]];
    let or = [[F, U, T], [U, U, T], [T, T, T]];
    let implies = [[T, T, T], [U, U, T], [F, U, T]];
    for (i, a) in TruthValue::ALL.into_iter().enumerate() {
        for (j, b) in TruthValue::ALL.into_iter().enumerate() {
            assert_eq!(a.and(b), and[i][j], "{a} and {b}");
            assert_eq!(a.or(b), or[i][j], "{a} or {b}");
            assert_eq!(a.implies(b), implies[i][j], "{a} implies {b}");
        }
        assert_eq!(!!a, a);
    }
}

fn eval(e: &RuleExpr, m: &CityModel) -> TruthValue {
    eval_expr(e, m, &Bindings::new())
}

#[test]
fn kleene_identities_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut values = [0usize; 3];
    for _ in 0..800 {
        let model = random_model(&mut rng, &GenConfig::default());
        let a = random_expr(&mut rng, 3);
        let b = random_expr(&mut rng, 3);
        let (va, vb) = (eval(&a, &model), eval(&b, &model));
        values[va as usize] += 1;
        assert_eq!(eval(&RuleExpr::not(RuleExpr::not(a.clone())), &model), va);
        assert_eq!(
            eval(&RuleExpr::not(RuleExpr::and(a.clone(), b.clone())), &model),
            eval(&RuleExpr::or(RuleExpr::not(a.clone()), RuleExpr::not(b.clone())), &model)
        );
        assert_eq!(
            eval(&RuleExpr::not(RuleExpr::or(a.clone(), b.clone())), &model),
            eval(&RuleExpr::and(RuleExpr::not(a.clone()), RuleExpr::not(b.clone())), &model)
        );
        assert_eq!(
            eval(&RuleExpr::implies(a.clone(), b.clone()), &model),
            eval(&RuleExpr::or(RuleExpr::not(a.clone()), b.clone()), &model)
        );
        assert_eq!(eval(&RuleExpr::and(a.clone(), b.clone()), &model), va.and(vb));
        assert_eq!(eval(&RuleExpr::or(a, b), &model), va.or(vb));
    }
    assert!(values.iter().all(|&n| n > 0), "{values:?}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let model = random_model(&mut rng, &GenConfig::default());
        let world = if rng.gen() { WorldMode::Open } else { WorldMode::Closed };
        let first = judge(&model, builtin_ruleset(), None, world).unwrap();
        let again = judge(&model.clone(), builtin_ruleset(), None, world).unwrap();
        for format in [ReportFormat::Json, ReportFormat::Text] {
            assert_eq!(render_report(&first, format), render_report(&again, format));
        }
    }
}

#[test]
fn empty_facts_change_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let model = random_model(&mut rng, &GenConfig::default());
        assert_eq!(apply_facts(&model, &FactSet::default()).unwrap(), model);
    }
}

fn span_in_bounds(src: &str, e: &ParseError) -> bool {
    let lines: Vec<&str> = src.split('\n').collect();
    e.span.line >= 1
        && e.span.line <= lines.len().max(1)
        && e.span.column >= 1
        && e.span.column <= lines.get(e.span.line - 1).map_or(0, |l| l.chars().count()) + 1
}

proptest! {
    #[test]
    fn scenario_errors_point_inside_the_source(cut in 0usize..FLASH.len(), junk in "[ {}=:\",a-z0-9\\[\\]]{0,4}") {
        let cut = (0..=cut).rev().find(|&i| FLASH.is_char_boundary(i)).unwrap();
        let src = format!("{}{}{}", &FLASH[..cut], junk, &FLASH[(cut + 1).min(FLASH.len())..]);
        if let Err(e) = parse_scenario(&src) {
            prop_assert!(span_in_bounds(&src, &e), "{:?} in\n{}", e, src);
            prop_assert!(!e.render("x.city", &src).is_empty());
        }
    }

    #[test]
    fn rule_errors_point_inside_the_source(src in "rule [A-Z][0-9] right=[a-z]{3,8} perspective=[a-z_-]{5,20} ?: ?[a-z .(){}=*<>!-]{0,30}") {
        if let Err(e) = parse_rule(&src) {
            prop_assert!(span_in_bounds(&src, &e), "{:?} in {}", e, src);
        }
    }
}
