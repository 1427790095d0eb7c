use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn civitas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_civitas"))
        .args(args)
        .env("CIVITAS_NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn verdict_of(report: &serde_json::Value, rule: &str) -> String {
    report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["rule"] == rule)
        .map(|e| e["verdict"].as_str().unwrap().to_string())
        .unwrap_or_else(|| panic!("{rule} missing"))
}

fn flash() -> String {
    scenario("flash.city").display().to_string()
}

#[test]
fn check_flash_reports_p1_and_exits_2() {
    let o = civitas(&["check", &flash()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("P1    VIOLATED"), "{text}");
    assert!(text.contains("risk_type = high"));
    assert!(!text.contains('\x1b'));
    assert!(stderr(&o).is_empty());
}

#[test]
fn check_with_consentless_facts() {
    let facts = scenario("flash_consentless.facts").display().to_string();
    let o = civitas(&["check", &flash(), "--facts", &facts, "--format", "json"]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    for id in ["P1", "P4", "P6"] {
        assert_eq!(verdict_of(&r, id), "violated", "{id}");
    }
    assert_eq!(r["facts_applied"], 2);
}

#[test]
fn empty_scenario_is_indeterminate_only() {
    let o = civitas(&["check", &scenario("empty.city").display().to_string(), "--format", "json"]);
    assert_eq!(code(&o), 3);
    let r = json(&o);
    assert_eq!(verdict_of(&r, "P10"), "indeterminate");
    assert_eq!(r["summary"]["violated"], 0);
    let closed = civitas(&["check", &scenario("empty.city").display().to_string(), "--world", "closed"]);
    assert_eq!(code(&closed), 2);
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = civitas(&["check", &flash(), "--format", "json", "--out", &out.display().to_string()]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    let again = civitas(&["check", &flash(), "--format", "json"]);
    assert_eq!(fs::read(&out).unwrap(), again.stdout);
}

#[test]
fn custom_rules_replace_the_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("mine.rules");
    fs::write(
        &rules,
        "rule Low right=safety perspective=residents-iot_service:\n    forall d in devices: d.risk_type != high\n",
    )
    .unwrap();
    let o = civitas(&["check", &flash(), "--rules", &rules.display().to_string(), "--format", "json"]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    assert_eq!(r["entries"].as_array().unwrap().len(), 1);
    assert_eq!(verdict_of(&r, "Low"), "violated");
}

#[test]
fn parse_errors_go_to_stderr_with_a_span() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.city");
    fs::write(&bad, "scenario \"x\" {\n  device d {\n    riskk: high\n  }\n}\n").unwrap();
    let o = civitas(&["check", &bad.display().to_string()]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
    let err = stderr(&o);
    assert!(err.contains("bad.city:3:5"), "{err}");
    assert!(err.contains("did you mean `risk`"), "{err}");

    let rules = dir.path().join("bad.rules");
    fs::write(&rules, "rule X right=safety perspective=residents-iot_service: forall d in devices: d.colour\n").unwrap();
    let o = civitas(&["check", &flash(), "--rules", &rules.display().to_string()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));
}

#[test]
fn dangling_fact_reference_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("bad.facts");
    fs::write(&facts, "flow Nobody -> Government : resident_personal_data consent=denied\n").unwrap();
    let o = civitas(&["check", &flash(), "--facts", &facts.display().to_string()]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("Nobody") && err.contains("bad.facts:1:"), "{err}");
}

#[test]
fn missing_file_and_bad_flags_exit_1() {
    assert_eq!(code(&civitas(&["check", "/nonexistent.city"])), 1);
    assert_eq!(code(&civitas(&["check", &flash(), "--world", "sideways"])), 1);
    assert_eq!(code(&civitas(&["frobnicate"])), 1);
    assert_eq!(code(&civitas(&["--help"])), 0);
}

#[test]
fn find_safety_counterexample() {
    let o = civitas(&["find", "--rule", "SafetyPrinciple", "--scope", "devices=1"]);
    assert_eq!(code(&o), 2);
    let text = stdout(&o);
    assert!(text.contains("interaction: physical"), "{text}");
    assert!(!text.contains("movement: hazardous"), "{text}");
}

#[test]
fn find_p11_flips_the_agreement_flag() {
    let o = civitas(&["find", "--rule", "P11", "--scope", "devices=1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("agreement_violated: true"), "{}", stdout(&o));
}

#[test]
fn find_p12_holds_vacuously() {
    let o = civitas(&["find", "--rule", "P12", "--scope", "devices=0,residents=0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("holds within scope"));
}

#[test]
fn find_budget_and_errors() {
    let o = civitas(&["find", "--rule", "P12", "--scope", "residents=3,budget=1"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert_eq!(code(&civitas(&["find", "--rule", "P99"])), 1);
    assert_eq!(code(&civitas(&["find", "--rule", "P1", "--scope", "gadgets=2"])), 1);

    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.rules");
    fs::write(&one, "rule T right=truth perspective=residents-government: exists flow(government -> residents : project_goals)\n").unwrap();
    let o = civitas(&["find", "--rule", &one.display().to_string(), "--scope", "governments=0,residents=0"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn rules_listing_and_source() {
    let o = civitas(&["rules", "list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().next().unwrap().starts_with("P1 "));

    let o = civitas(&["rules", "show", "P9"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("5 * card(d.deploy_neighborhoods) >= 2 * card(universe)"));
    assert_eq!(code(&civitas(&["rules", "show", "P0"])), 1);
}

#[test]
fn fmt_rewrites_to_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.city");
    fs::copy(scenario("flash.city"), &path).unwrap();
    let p = path.display().to_string();

    let before = fs::read(&path).unwrap();
    assert_eq!(code(&civitas(&["fmt", "--check", &p])), 2);
    assert_eq!(fs::read(&path).unwrap(), before);

    assert_eq!(code(&civitas(&["fmt", &p])), 0);
    let canonical = fs::read_to_string(&path).unwrap();
    assert_eq!(code(&civitas(&["fmt", "--check", &p])), 0);
    assert_eq!(code(&civitas(&["fmt", &p])), 0);
    assert_eq!(fs::read_to_string(&path).unwrap(), canonical);

    let odd = canonical.replace("\n  ", "\n\t   ").replace(": ", " :   ");
    fs::write(&path, &odd).unwrap();
    assert_eq!(code(&civitas(&["fmt", &p])), 0);
    assert_eq!(fs::read_to_string(&path).unwrap(), canonical);

    fs::write(&path, "scenario \"x\" {\n  device d {\n").unwrap();
    assert_eq!(code(&civitas(&["fmt", &p])), 1);
}

#[test]
fn fmt_handles_rule_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.rules");
    fs::write(&path, "rule   A right=safety perspective=residents-iot_service :  ((true)) and (false)\n").unwrap();
    assert_eq!(code(&civitas(&["fmt", &path.display().to_string()])), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("true and false"), "{text}");
    assert_eq!(code(&civitas(&["fmt", "--check", &path.display().to_string()])), 0);
}
