//! Civitas: a rights-based compliance engine for smart-city models.
//!
//! A [`CityModel`] describes devices, resident groups, government agencies,
//! businesses and the data flows between them. Rules written in a small
//! first-order language are evaluated against it under three-valued logic,
//! producing a [`Verdict`] per rule. The [`finder`] searches bounded scopes
//! for counterexamples, and [`judge`] assembles reports.

pub mod builtin;
pub mod facts;
pub mod fields;
pub mod finder;
pub mod judge;
pub mod model;
pub mod rules;
pub mod syntax;
pub mod token;
pub mod vocab;

pub use builtin::{builtin_rule, builtin_ruleset, rule_source, safety_assertion};
pub use finder::{find_counterexample, minimize_witness, CheckResult, Scope};
pub use judge::{aggregate, judge, render_report, JudgmentReport, ReportFormat, WorldMode};
pub use facts::{apply_facts, FactError, FactSet};
pub use model::{neighborhood_universe, validate_model, CityModel, DataFlow, EntityRef, ValidationIssue};
pub use rules::{eval_expr, eval_rule, explain, parse_rule, parse_rules, RuleDef, RuleExpr, RuleSet, TruthValue, Verdict};
pub use syntax::{parse_facts, parse_scenario, render_scenario, ParseError, SourceSpan};
pub use token::Token;
