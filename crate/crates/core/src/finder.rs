//! Bounded counterexample search.
//!
//! Candidate models are enumerated in a fixed canonical order and evaluated
//! with complete flow knowledge, so every reported counterexample is a
//! definite violation:
//!
//! 1. entity counts, by ascending total and then lexicographically
//!    (devices, resident groups, governments, businesses);
//! 2. neighborhood universe size, ascending, when the rule reads `universe`;
//! 3. entity field assignments, each kind as a multiset of prototypes so that
//!    renamings of the same model are visited once;
//! 4. flow sets, by size and then lexicographically.
//!
//! Only what the rule can observe is enumerated. Fields the rule never reads
//! keep a fixed default, kinds the rule neither quantifies over nor mentions in
//! a flow pattern stay empty, and flows are drawn from the payloads the rule
//! tests. This keeps desk-scale scopes fast without hiding any violation.

use std::collections::HashSet;
use std::fmt;

use crate::model::{
    BusinessInstance, CityModel, DataFlow, DeviceInstance, EntityRef, GovernmentInstance,
    ProjectGoal, ResidentGroup, Set,
};
use crate::rules::ast::{ConsentPattern, FlowPattern, RuleDef, RuleExpr, Term, Value};
use crate::rules::ast::Field;
use crate::rules::eval::{eval_expr, eval_rule, Bindings, Verdict};
use crate::rules::kleene::TruthValue;
use crate::token::Token;
use crate::vocab::{
    BusinessScale, Consent, EconomicStatus, EntityKind, GoalTag, InteractionType, MovementType,
    PayloadKind, Provenance, RiskType,
};

/// Finite bounds for counterexample search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scope {
    pub max_devices: usize,
    pub max_resident_groups: usize,
    pub max_governments: usize,
    pub max_businesses: usize,
    pub neighborhood_universe_size: usize,
    pub max_flows: usize,
    pub max_set_card: usize,
    pub candidate_budget: u64,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            max_devices: 3,
            max_resident_groups: 3,
            max_governments: 3,
            max_businesses: 3,
            neighborhood_universe_size: 5,
            max_flows: 4,
            max_set_card: 3,
            candidate_budget: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScopeError {
    #[error("malformed scope entry `{0}`; expected key=value")]
    Malformed(String),
    #[error("unknown scope key `{0}`; expected devices, residents, governments, businesses, neighborhoods, flows, set_card or budget")]
    UnknownKey(String),
    #[error("scope value for `{key}` must be a non-negative integer, found `{value}`")]
    BadValue { key: String, value: String },
    #[error("candidate budget must be at least 1")]
    ZeroBudget,
}

impl Scope {
    /// Parses `devices=1,residents=1,neighborhoods=3,flows=2`. Keys left out
    /// keep their defaults.
    pub fn parse(spec: &str) -> Result<Scope, ScopeError> {
        let mut scope = Scope::default();
        for entry in spec.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| ScopeError::Malformed(entry.to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            let n: u64 = value.parse().map_err(|_| ScopeError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
            })?;
            let slot = match key {
                "devices" | "device" => &mut scope.max_devices,
                "residents" | "resident_groups" => &mut scope.max_resident_groups,
                "governments" | "government" => &mut scope.max_governments,
                "businesses" | "business" => &mut scope.max_businesses,
                "neighborhoods" | "universe" => &mut scope.neighborhood_universe_size,
                "flows" => &mut scope.max_flows,
                "set_card" | "card" => &mut scope.max_set_card,
                "budget" => {
                    if n == 0 {
                        return Err(ScopeError::ZeroBudget);
                    }
                    scope.candidate_budget = n;
                    continue;
                }
                other => return Err(ScopeError::UnknownKey(other.to_string())),
            };
            *slot = n as usize;
        }
        Ok(scope)
    }

    fn max_count(&self, kind: EntityKind) -> usize {
        match kind {
            EntityKind::Device => self.max_devices,
            EntityKind::Residents => self.max_resident_groups,
            EntityKind::Government => self.max_governments,
            EntityKind::Business => self.max_businesses,
            EntityKind::External => 0,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "devices={},residents={},governments={},businesses={},neighborhoods={},flows={},set_card={},budget={}",
            self.max_devices,
            self.max_resident_groups,
            self.max_governments,
            self.max_businesses,
            self.neighborhood_universe_size,
            self.max_flows,
            self.max_set_card,
            self.candidate_budget
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckResult {
    HoldsWithinScope(u64),
    Counterexample { model: CityModel, examined: u64 },
    BudgetExhausted(u64),
}

impl CheckResult {
    pub fn examined(&self) -> u64 {
        match self {
            CheckResult::HoldsWithinScope(n) | CheckResult::BudgetExhausted(n) => *n,
            CheckResult::Counterexample { examined, .. } => *examined,
        }
    }
}

/// Name of the single external endpoint available to candidate flows.
pub const EXTERNAL_NAME: &str = "ext0";

/// What the rule can observe, computed once per search.
struct Plan {
    kinds: HashSet<EntityKind>,
    fields: HashSet<Field>,
    universe_read: bool,
    goal_domain: Vec<GoalTag>,
    patterns: Vec<FlowPattern>,
    payloads: Vec<(PayloadKind, Vec<Consent>)>,
}

impl Plan {
    fn new(rule: &RuleDef) -> Plan {
        let mut kinds = HashSet::new();
        let mut fields = HashSet::new();
        let mut patterns = Vec::new();
        let mut goals = HashSet::new();
        rule.expr.walk(&mut |e| match e {
            RuleExpr::Forall { domain, .. } | RuleExpr::Exists { domain, .. } => {
                kinds.insert(*domain);
            }
            RuleExpr::Field { field, .. } => {
                fields.insert(*field);
            }
            RuleExpr::Flow(p) => patterns.push(p.clone()),
            _ => {}
        });
        let mut universe_read = false;
        for t in rule.expr.terms() {
            match t {
                Term::Field { field, .. } => {
                    fields.insert(*field);
                }
                Term::Universe => universe_read = true,
                Term::Literal(Value::Goal(g)) => {
                    goals.insert(*g);
                }
                Term::SetLiteral { items, .. } => {
                    for v in items {
                        if let Value::Goal(g) = v {
                            goals.insert(*g);
                        }
                    }
                }
                _ => {}
            }
        }
        for p in &patterns {
            for k in EntityKind::DECLARED {
                if p.source.matches(k) || p.dest.matches(k) {
                    kinds.insert(k);
                }
            }
        }
        // Tags the rule names, plus one it does not, stand for every goal set.
        let mut goal_domain: Vec<GoalTag> =
            GoalTag::ALL.iter().copied().filter(|g| goals.contains(g)).collect();
        if let Some(other) = GoalTag::ALL.iter().copied().find(|g| !goals.contains(g)) {
            goal_domain.push(other);
        }
        let mut payloads: Vec<(PayloadKind, Vec<Consent>)> = Vec::new();
        for payload in PayloadKind::ALL.iter().copied() {
            let relevant: Vec<&FlowPattern> =
                patterns.iter().filter(|p| p.payload == payload).collect();
            if relevant.is_empty() {
                continue;
            }
            let consents = if relevant
                .iter()
                .any(|p| matches!(p.consent, ConsentPattern::Is(_)))
            {
                vec![Consent::Granted, Consent::Denied]
            } else {
                vec![Consent::Unknown]
            };
            payloads.push((payload, consents));
        }
        Plan {
            kinds,
            fields,
            universe_read,
            goal_domain,
            patterns,
            payloads,
        }
    }

    fn reads(&self, f: Field) -> bool {
        self.fields.contains(&f)
    }

    fn bools(&self, f: Field) -> Vec<bool> {
        if self.reads(f) {
            vec![false, true]
        } else {
            vec![false]
        }
    }

    fn options<T: Copy>(&self, f: Field, all: &[T]) -> Vec<T> {
        if self.reads(f) {
            all.to_vec()
        } else {
            all[..1].to_vec()
        }
    }
}

/// All subsets of `items` with size in `min..=max`, by size then lexicographic index order.
fn subsets<T: Clone>(items: &[T], min: usize, max: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for k in min..=max.min(items.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i].clone()).collect());
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < items.len() - k + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

fn expand<P: Clone, V: Clone>(protos: Vec<P>, options: &[V], set: impl Fn(&mut P, V)) -> Vec<P> {
    let mut out = Vec::with_capacity(protos.len() * options.len());
    for p in &protos {
        for o in options {
            let mut q = p.clone();
            set(&mut q, o.clone());
            out.push(q);
        }
    }
    out
}

fn token(s: &str) -> Token {
    Token::new(s).expect("generated names are non-empty")
}

fn text_alphabet() -> Vec<String> {
    vec!["t0".to_string(), "t1".to_string()]
}

/// Entity prototypes for one kind in canonical field-assignment order.
enum Protos {
    Devices(Vec<DeviceInstance>),
    Residents(Vec<ResidentGroup>),
    Governments(Vec<GovernmentInstance>),
    Businesses(Vec<BusinessInstance>),
}

impl Protos {
    fn len(&self) -> usize {
        match self {
            Protos::Devices(v) => v.len(),
            Protos::Residents(v) => v.len(),
            Protos::Governments(v) => v.len(),
            Protos::Businesses(v) => v.len(),
        }
    }

    fn build(kind: EntityKind, plan: &Plan, hoods: &[Token], card: usize) -> Protos {
        let texts = text_alphabet();
        let text_sets = |f: Field| -> Vec<Set<String>> {
            if plan.reads(f) {
                subsets(&texts, 0, card).into_iter().map(|s| s.into_iter().collect()).collect()
            } else {
                vec![Set::new()]
            }
        };
        let hood_sets = |min: usize| -> Vec<Set<Token>> {
            subsets(hoods, min, card).into_iter().map(|s| s.into_iter().collect()).collect()
        };
        match kind {
            EntityKind::Device => {
                let base = DeviceInstance {
                    name: token("d"),
                    device_title: texts[0].clone(),
                    deploy_neighborhoods: Set::new(),
                    movement_type: MovementType::ALL[0],
                    interaction_type: InteractionType::ALL[0],
                    risk_type: RiskType::ALL[0],
                    transmits_harmful: false,
                    collects_resident_data: false,
                    agreement_violated: false,
                };
                let titles = if plan.reads(Field::DeviceTitle) { texts.clone() } else { vec![texts[0].clone()] };
                let mut v = expand(vec![base], &titles, |d, t| d.device_title = t);
                let deploy = if plan.reads(Field::DeployNeighborhoods) {
                    hood_sets(0)
                } else {
                    vec![Set::new()]
                };
                v = expand(v, &deploy, |d, s| d.deploy_neighborhoods = s);
                v = expand(v, &plan.options(Field::MovementType, MovementType::ALL), |d, x| d.movement_type = x);
                v = expand(v, &plan.options(Field::InteractionType, InteractionType::ALL), |d, x| {
                    d.interaction_type = x
                });
                v = expand(v, &plan.options(Field::RiskType, RiskType::ALL), |d, x| d.risk_type = x);
                v = expand(v, &plan.bools(Field::TransmitsHarmful), |d, x| d.transmits_harmful = x);
                v = expand(v, &plan.bools(Field::CollectsResidentData), |d, x| d.collects_resident_data = x);
                v = expand(v, &plan.bools(Field::AgreementViolated), |d, x| d.agreement_violated = x);
                Protos::Devices(v)
            }
            EntityKind::Residents => {
                let living_read = plan.reads(Field::LivingNeighborhoods);
                let favored_read = plan.reads(Field::FavoredNeighborhoods);
                let mut pairs: Vec<(Set<Token>, Set<Token>)> = Vec::new();
                match (living_read, favored_read) {
                    (true, true) => {
                        for living in hood_sets(0) {
                            let items: Vec<Token> = living.iter().cloned().collect();
                            for fav in subsets(&items, 0, card) {
                                pairs.push((living.clone(), fav.into_iter().collect()));
                            }
                        }
                    }
                    (true, false) => {
                        for living in hood_sets(0) {
                            pairs.push((living, Set::new()));
                        }
                    }
                    (false, true) => {
                        for fav in hood_sets(0) {
                            pairs.push((fav.clone(), fav));
                        }
                    }
                    (false, false) => pairs.push((Set::new(), Set::new())),
                }
                let base = ResidentGroup {
                    name: token("r"),
                    living_neighborhoods: Set::new(),
                    favored_neighborhoods: Set::new(),
                    economic_status: [EconomicStatus::Low].into_iter().collect(),
                    professions: Set::new(),
                    iot_usage_preferences: Set::new(),
                    has_legitimate_authority: false,
                };
                let mut v = expand(vec![base], &pairs, |r, (l, f)| {
                    r.living_neighborhoods = l;
                    r.favored_neighborhoods = f;
                });
                let econ: Vec<Set<EconomicStatus>> = if plan.reads(Field::EconomicStatus) {
                    subsets(EconomicStatus::ALL, 1, card)
                        .into_iter()
                        .map(|s| s.into_iter().collect())
                        .collect()
                } else {
                    vec![[EconomicStatus::Low].into_iter().collect()]
                };
                v = expand(v, &econ, |r, s| r.economic_status = s);
                v = expand(v, &text_sets(Field::Professions), |r, s| r.professions = s);
                v = expand(v, &text_sets(Field::IotUsagePreferences), |r, s| r.iot_usage_preferences = s);
                v = expand(v, &plan.bools(Field::HasLegitimateAuthority), |r, x| {
                    r.has_legitimate_authority = x
                });
                Protos::Residents(v)
            }
            EntityKind::Government => {
                let base = GovernmentInstance {
                    name: token("g"),
                    gov_type: texts[0].clone(),
                    project_goals: Set::new(),
                    oversight_iot_safety: false,
                    enforce_safety_standards: false,
                };
                let types = if plan.reads(Field::GovType) { texts.clone() } else { vec![texts[0].clone()] };
                let mut v = expand(vec![base], &types, |g, t| g.gov_type = t);
                let goals: Vec<Set<ProjectGoal>> = if plan.reads(Field::ProjectGoals) {
                    subsets(&plan.goal_domain, 0, card)
                        .into_iter()
                        .map(|s| s.into_iter().map(ProjectGoal::Tag).collect())
                        .collect()
                } else {
                    vec![Set::new()]
                };
                v = expand(v, &goals, |g, s| g.project_goals = s);
                v = expand(v, &plan.bools(Field::OversightIotSafety), |g, x| g.oversight_iot_safety = x);
                v = expand(v, &plan.bools(Field::EnforceSafetyStandards), |g, x| {
                    g.enforce_safety_standards = x
                });
                Protos::Governments(v)
            }
            EntityKind::Business => {
                let base = BusinessInstance {
                    name: token("b"),
                    scale: BusinessScale::ALL[0],
                    neighborhoods: Set::new(),
                    business_types: Set::new(),
                };
                let mut v = expand(vec![base], &plan.options(Field::Scale, BusinessScale::ALL), |b, x| b.scale = x);
                let hoods_opts: Vec<Set<Token>> = if plan.reads(Field::BusinessNeighborhoods) {
                    hood_sets(1)
                } else {
                    hoods.first().map(|n| vec![[n.clone()].into_iter().collect()]).unwrap_or_default()
                };
                v = expand(v, &hoods_opts, |b, s| b.neighborhoods = s);
                v = expand(v, &text_sets(Field::BusinessTypes), |b, s| b.business_types = s);
                Protos::Businesses(v)
            }
            EntityKind::External => unreachable!("external entities are not enumerated"),
        }
    }

    /// Places prototypes `choice` into the model as entities of this kind.
    fn place(&self, model: &mut CityModel, choice: &[usize]) {
        match self {
            Protos::Devices(p) => {
                model.devices = choice
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| DeviceInstance { name: token(&format!("d{i}")), ..p[c].clone() })
                    .collect()
            }
            Protos::Residents(p) => {
                model.resident_groups = choice
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| ResidentGroup { name: token(&format!("r{i}")), ..p[c].clone() })
                    .collect()
            }
            Protos::Governments(p) => {
                model.governments = choice
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| GovernmentInstance { name: token(&format!("g{i}")), ..p[c].clone() })
                    .collect()
            }
            Protos::Businesses(p) => {
                model.businesses = choice
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| BusinessInstance { name: token(&format!("b{i}")), ..p[c].clone() })
                    .collect()
            }
        }
    }
}

/// Advances a non-decreasing index sequence over `0..n`; false when exhausted.
fn next_multiset(idx: &mut [usize], n: usize) -> bool {
    let Some(pos) = (0..idx.len()).rev().find(|&i| idx[i] + 1 < n) else {
        return false;
    };
    idx[pos] += 1;
    let v = idx[pos];
    for x in &mut idx[pos + 1..] {
        *x = v;
    }
    true
}

/// Advances a strictly increasing index sequence over `0..n`; false when exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[pos] += 1;
    for j in pos + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

enum Stop {
    Found(CityModel),
    Budget,
}

struct Search<'a> {
    rule: &'a RuleDef,
    plan: Plan,
    scope: Scope,
    examined: u64,
}

const ORDER: [EntityKind; 4] = EntityKind::DECLARED;

impl Search<'_> {
    fn count_vectors(&self) -> Vec<[usize; 4]> {
        let max: Vec<usize> = ORDER
            .iter()
            .map(|k| if self.plan.kinds.contains(k) { self.scope.max_count(*k) } else { 0 })
            .collect();
        let mut all = Vec::new();
        for a in 0..=max[0] {
            for b in 0..=max[1] {
                for c in 0..=max[2] {
                    for d in 0..=max[3] {
                        all.push([a, b, c, d]);
                    }
                }
            }
        }
        all.sort_by_key(|v| (v.iter().sum::<usize>(), *v));
        all
    }

    fn run(&mut self) -> Result<(), Stop> {
        let n = self.scope.neighborhood_universe_size;
        let sizes: Vec<usize> = if self.plan.universe_read { (0..=n).collect() } else { vec![n] };
        for counts in self.count_vectors() {
            for &u in &sizes {
                let hoods: Vec<Token> = (0..u).map(|i| token(&format!("n{i}"))).collect();
                let protos: Vec<Protos> = ORDER
                    .iter()
                    .map(|k| Protos::build(*k, &self.plan, &hoods, self.scope.max_set_card))
                    .collect();
                if counts.iter().zip(&protos).any(|(c, p)| *c > 0 && p.len() == 0) {
                    continue;
                }
                let mut model = CityModel::new("counterexample");
                model.flows_complete = true;
                model.declared_total_neighborhoods = Some(u as u64);
                self.kind(0, &counts, &protos, &mut model)?;
            }
        }
        Ok(())
    }

    fn kind(&mut self, k: usize, counts: &[usize; 4], protos: &[Protos], model: &mut CityModel) -> Result<(), Stop> {
        if k == ORDER.len() {
            return self.flows(model);
        }
        let mut idx = vec![0usize; counts[k]];
        loop {
            protos[k].place(model, &idx);
            self.kind(k + 1, counts, protos, model)?;
            if !next_multiset(&mut idx, protos[k].len()) {
                return Ok(());
            }
        }
    }

    fn flow_atoms(&self, model: &CityModel) -> Vec<DataFlow> {
        let mut ends = model.entity_refs();
        ends.push(EntityRef::new(EntityKind::External, token(EXTERNAL_NAME)));
        let mut out = Vec::new();
        for source in &ends {
            for dest in &ends {
                for (payload, consents) in &self.plan.payloads {
                    if source == dest && *payload != PayloadKind::GenericMessage {
                        continue;
                    }
                    if source.kind == EntityKind::External && *payload == PayloadKind::ProjectGoals {
                        continue;
                    }
                    let observable = self.plan.patterns.iter().any(|p| {
                        p.payload == *payload && p.source.matches(source.kind) && p.dest.matches(dest.kind)
                    });
                    if !observable {
                        continue;
                    }
                    for &consent in consents {
                        out.push(DataFlow {
                            source: source.clone(),
                            dest: dest.clone(),
                            payload: *payload,
                            consent,
                            provenance: Provenance::Scenario,
                        });
                    }
                }
            }
        }
        out
    }

    fn flows(&mut self, model: &mut CityModel) -> Result<(), Stop> {
        let atoms = self.flow_atoms(model);
        for k in 0..=self.scope.max_flows.min(atoms.len()) {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                model.flows = idx.iter().map(|&i| atoms[i].clone()).collect();
                self.check(model)?;
                if k == 0 || !next_combination(&mut idx, atoms.len()) {
                    break;
                }
            }
        }
        Ok(())
    }

    fn check(&mut self, model: &CityModel) -> Result<(), Stop> {
        if self.examined >= self.scope.candidate_budget {
            return Err(Stop::Budget);
        }
        self.examined += 1;
        if eval_expr(&self.rule.expr, model, &Bindings::new()) == TruthValue::False {
            return Err(Stop::Found(model.clone()));
        }
        Ok(())
    }
}

/// Searches `scope` for a model on which `rule` is violated.
pub fn find_counterexample(rule: &RuleDef, scope: &Scope) -> CheckResult {
    let mut search = Search {
        rule,
        plan: Plan::new(rule),
        scope: *scope,
        examined: 0,
    };
    match search.run() {
        Ok(()) => CheckResult::HoldsWithinScope(search.examined),
        Err(Stop::Found(model)) => CheckResult::Counterexample {
            model,
            examined: search.examined,
        },
        Err(Stop::Budget) => CheckResult::BudgetExhausted(search.examined),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("rule {0} is not violated by this model under closed-world evaluation; nothing to minimize")]
pub struct NotViolated(pub String);

/// Shrinks a violating model while keeping the violation.
///
/// Flows, then entities, then set elements are removed one at a time, each
/// pass walking its candidates from last to first. The result is evaluated
/// with complete flow knowledge and no single further removal keeps it
/// violated.
pub fn minimize_witness(model: &CityModel, rule: &RuleDef) -> Result<CityModel, NotViolated> {
    let mut current = model.clone();
    current.flows_complete = true;
    let violated = |m: &CityModel| m.validate().is_empty() && matches!(eval_rule(rule, m), Verdict::Violated(_));
    if !violated(&current) {
        return Err(NotViolated(rule.id.clone()));
    }
    'outer: loop {
        for candidate in removals(&current) {
            if violated(&candidate) {
                current = candidate;
                continue 'outer;
            }
        }
        return Ok(current);
    }
}

/// Every model reachable by one removal, in reverse canonical order.
fn removals(m: &CityModel) -> Vec<CityModel> {
    let mut out = Vec::new();
    for i in (0..m.flows.len()).rev() {
        let mut c = m.clone();
        c.flows.remove(i);
        out.push(c);
    }
    for kind in ORDER.iter().rev() {
        for i in (0..m.count(*kind)).rev() {
            let mut c = m.clone();
            let gone = EntityRef::new(*kind, m.names(*kind)[i].clone());
            match kind {
                EntityKind::Device => drop(c.devices.remove(i)),
                EntityKind::Residents => drop(c.resident_groups.remove(i)),
                EntityKind::Government => drop(c.governments.remove(i)),
                EntityKind::Business => drop(c.businesses.remove(i)),
                EntityKind::External => {}
            }
            c.flows.retain(|f| f.source != gone && f.dest != gone);
            out.push(c);
        }
    }
    fn drop_each<T: Clone + std::hash::Hash + Eq>(
        set: &Set<T>,
        mut rebuild: impl FnMut(Set<T>),
    ) {
        for j in (0..set.len()).rev() {
            let mut s = set.clone();
            s.shift_remove_index(j);
            rebuild(s);
        }
    }
    for i in (0..m.businesses.len()).rev() {
        let b = &m.businesses[i];
        drop_each(&b.business_types, |s| {
            let mut c = m.clone();
            c.businesses[i].business_types = s;
            out.push(c);
        });
        drop_each(&b.neighborhoods, |s| {
            let mut c = m.clone();
            c.businesses[i].neighborhoods = s;
            out.push(c);
        });
    }
    for i in (0..m.governments.len()).rev() {
        drop_each(&m.governments[i].project_goals, |s| {
            let mut c = m.clone();
            c.governments[i].project_goals = s;
            out.push(c);
        });
    }
    for i in (0..m.resident_groups.len()).rev() {
        let r = &m.resident_groups[i];
        drop_each(&r.iot_usage_preferences, |s| {
            let mut c = m.clone();
            c.resident_groups[i].iot_usage_preferences = s;
            out.push(c);
        });
        drop_each(&r.professions, |s| {
            let mut c = m.clone();
            c.resident_groups[i].professions = s;
            out.push(c);
        });
        drop_each(&r.economic_status, |s| {
            let mut c = m.clone();
            c.resident_groups[i].economic_status = s;
            out.push(c);
        });
        drop_each(&r.favored_neighborhoods, |s| {
            let mut c = m.clone();
            c.resident_groups[i].favored_neighborhoods = s;
            out.push(c);
        });
        drop_each(&r.living_neighborhoods, |s| {
            let mut c = m.clone();
            c.resident_groups[i].living_neighborhoods = s;
            out.push(c);
        });
    }
    for i in (0..m.devices.len()).rev() {
        drop_each(&m.devices[i].deploy_neighborhoods, |s| {
            let mut c = m.clone();
            c.devices[i].deploy_neighborhoods = s;
            out.push(c);
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{builtin_rule, safety_assertion};
    use crate::rules::parser::parse_rule;

    fn scope(spec: &str) -> Scope {
        Scope::parse(spec).unwrap()
    }

    #[test]
    fn scope_parsing() {
        let s = scope("devices=1,residents=2, neighborhoods=3,flows=2");
        assert_eq!(s.max_devices, 1);
        assert_eq!(s.max_resident_groups, 2);
        assert_eq!(s.neighborhood_universe_size, 3);
        assert_eq!(s.max_flows, 2);
        assert_eq!(s.max_governments, 3);
        assert!(matches!(Scope::parse("devics=1"), Err(ScopeError::UnknownKey(_))));
        assert!(matches!(Scope::parse("devices=x"), Err(ScopeError::BadValue { .. })));
        assert!(matches!(Scope::parse("devices"), Err(ScopeError::Malformed(_))));
        assert_eq!(Scope::parse(&Scope::default().to_string()).unwrap(), Scope::default());
    }

    #[test]
    fn subsets_in_canonical_order() {
        let s = subsets(&[0, 1, 2], 0, 2);
        assert_eq!(s, vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert!(subsets(&[0], 2, 3).is_empty());
    }

    #[test]
    fn multisets_are_non_decreasing() {
        let mut idx = vec![0, 0];
        let mut seen = vec![idx.clone()];
        while next_multiset(&mut idx, 3) {
            seen.push(idx.clone());
        }
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]]);
    }

    #[test]
    fn safety_assertion_counterexample() {
        let r = find_counterexample(safety_assertion(), &scope("devices=1"));
        let CheckResult::Counterexample { model, examined } = r else { panic!("{r:?}") };
        assert_eq!(model.devices.len(), 1);
        assert_eq!(model.devices[0].movement_type, MovementType::Stationary);
        assert_eq!(model.devices[0].interaction_type, InteractionType::Physical);
        assert!(examined < 5_000);
    }

    #[test]
    fn trivial_rule_holds() {
        let rule = parse_rule("rule T right=safety perspective=residents-iot_service: forall d in devices: true").unwrap();
        assert!(matches!(find_counterexample(&rule, &Scope::default()), CheckResult::HoldsWithinScope(_)));
    }

    #[test]
    fn p11_flips_the_agreement_flag() {
        let r = find_counterexample(builtin_rule("P11").unwrap(), &scope("devices=1"));
        let CheckResult::Counterexample { model, .. } = r else { panic!() };
        assert!(model.devices[0].agreement_violated);
    }

    #[test]
    fn p12_vacuous_with_no_residents() {
        let r = find_counterexample(builtin_rule("P12").unwrap(), &scope("devices=0,residents=0"));
        assert!(matches!(r, CheckResult::HoldsWithinScope(_)));
    }

    #[test]
    fn p10_needs_a_government_and_residents_absent_flow() {
        let r = find_counterexample(builtin_rule("P10").unwrap(), &Scope::default());
        let CheckResult::Counterexample { model, examined } = r else { panic!() };
        assert!(model.flows.is_empty());
        assert_eq!(examined, 1);
    }

    #[test]
    fn budget_is_respected() {
        let rule = parse_rule("rule T right=safety perspective=residents-iot_service: forall d in devices: d.agreement_violated or not d.agreement_violated").unwrap();
        let mut s = Scope::default();
        s.candidate_budget = 3;
        assert_eq!(find_counterexample(&rule, &s), CheckResult::BudgetExhausted(3));
    }

    #[test]
    fn deterministic() {
        let rule = builtin_rule("P6").unwrap();
        let s = scope("devices=1,residents=1,governments=1,businesses=1,flows=2");
        assert_eq!(find_counterexample(rule, &s), find_counterexample(rule, &s));
    }

    #[test]
    fn minimize_rejects_compliant() {
        let m = CityModel::new("empty");
        assert!(minimize_witness(&m, builtin_rule("P1").unwrap()).is_err());
    }
}
