//! Three-valued evaluation of typed rules, with witnesses for violations and
//! the list of undecided atoms for indeterminate results.

use serde::{Serialize, Serializer};

use super::ast::*;
use super::kleene::TruthValue;
use super::render::render_value;
use crate::model::{CityModel, DataFlow, EntityRef};
use crate::vocab::{Consent, EntityKind};

/// Cap on witnesses retained per violated rule.
pub const WITNESS_CAP: usize = 32;

/// Variable environment: each variable names an entity by kind and index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    slots: Vec<(String, EntityKind, usize)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&self, var: &str, kind: EntityKind, index: usize) -> Bindings {
        let mut next = self.clone();
        next.slots.retain(|(v, _, _)| v != var);
        next.slots.push((var.to_string(), kind, index));
        next
    }

    pub fn get(&self, var: &str) -> Option<(EntityKind, usize)> {
        self.slots
            .iter()
            .rev()
            .find(|(v, _, _)| v == var)
            .map(|(_, k, i)| (*k, *i))
    }
}

fn display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn display_all<T: std::fmt::Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessBinding {
    pub var: String,
    #[serde(serialize_with = "display")]
    pub entity: EntityRef,
}

/// One atom in a witness, with the value it took and the model facts it read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomWitness {
    pub atom: String,
    pub holds: bool,
    pub observed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Witness {
    pub bindings: Vec<WitnessBinding>,
    pub atoms: Vec<AtomWitness>,
    #[serde(serialize_with = "display_all")]
    pub flows: Vec<DataFlow>,
}

impl Witness {
    fn merge(&self, other: &Witness) -> Witness {
        let mut out = self.clone();
        for b in &other.bindings {
            if !out.bindings.contains(b) {
                out.bindings.push(b.clone());
            }
        }
        for a in &other.atoms {
            if !out.atoms.contains(a) {
                out.atoms.push(a.clone());
            }
        }
        for f in &other.flows {
            if !out.flows.contains(f) {
                out.flows.push(f.clone());
            }
        }
        out
    }

    fn with_binding(mut self, binding: WitnessBinding) -> Witness {
        self.bindings.insert(0, binding);
        self
    }
}

/// An atomic condition that evaluated unknown, with the bindings it read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnknownAtom {
    pub atom: String,
    pub bindings: Vec<WitnessBinding>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Compliant,
    Violated(Vec<Witness>),
    Indeterminate(Vec<UnknownAtom>),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Compliant => "compliant",
            Verdict::Violated(_) => "violated",
            Verdict::Indeterminate(_) => "indeterminate",
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated(_))
    }

    pub fn truth(&self) -> TruthValue {
        match self {
            Verdict::Compliant => TruthValue::True,
            Verdict::Violated(_) => TruthValue::False,
            Verdict::Indeterminate(_) => TruthValue::Unknown,
        }
    }
}

#[derive(Debug, Clone)]
enum Eval {
    Scalar(Value),
    Set(Vec<Value>),
}

fn entity_ref(model: &CityModel, kind: EntityKind, index: usize) -> EntityRef {
    EntityRef::new(kind, model.names(kind)[index].clone())
}

fn term(t: &Term, model: &CityModel, env: &Bindings) -> Eval {
    match t {
        Term::Field { var, field } => {
            let (_, index) = env.get(var).expect("well-typed rule binds every variable");
            match field.read(model, index) {
                FieldValue::Scalar(v) => Eval::Scalar(v),
                FieldValue::Set(vs) => Eval::Set(vs),
            }
        }
        Term::Literal(v) => Eval::Scalar(v.clone()),
        Term::SetLiteral { items, .. } => Eval::Set(items.clone()),
        Term::Universe => Eval::Set(
            model
                .neighborhood_universe()
                .into_iter()
                .map(Value::Neighborhood)
                .collect(),
        ),
        Term::Card(inner) => Eval::Scalar(Value::Count(match term(inner, model, env) {
            Eval::Set(vs) => distinct(&vs).len() as u64,
            Eval::Scalar(_) => 1,
        })),
    }
}

fn distinct(vs: &[Value]) -> Vec<&Value> {
    let mut out: Vec<&Value> = Vec::with_capacity(vs.len());
    for v in vs {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn same_set(a: &[Value], b: &[Value]) -> bool {
    let (a, b) = (distinct(a), distinct(b));
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

fn compare(op: CmpOp, l: &Eval, r: &Eval) -> bool {
    match (l, r) {
        (Eval::Scalar(Value::Count(a)), Eval::Scalar(Value::Count(b))) => op.holds(a, b),
        (Eval::Scalar(a), Eval::Scalar(b)) => match op {
            CmpOp::Ne => a != b,
            _ => a == b,
        },
        (Eval::Set(a), Eval::Set(b)) => match op {
            CmpOp::Ne => !same_set(a, b),
            _ => same_set(a, b),
        },
        _ => false,
    }
}

fn count(e: &Eval) -> u128 {
    match e {
        Eval::Scalar(Value::Count(n)) => u128::from(*n),
        _ => 0,
    }
}

fn flow_matches(p: &FlowPattern, f: &DataFlow) -> bool {
    p.source.matches(f.source.kind) && p.dest.matches(f.dest.kind) && p.payload == f.payload
}

fn eval_flow(p: &FlowPattern, model: &CityModel) -> TruthValue {
    let mut undecided = false;
    for f in model.flows.iter().filter(|f| flow_matches(p, f)) {
        match p.consent {
            ConsentPattern::Any => return TruthValue::True,
            ConsentPattern::Is(c) if f.consent == c => return TruthValue::True,
            ConsentPattern::Is(_) if f.consent == Consent::Unknown => undecided = true,
            ConsentPattern::Is(_) => {}
        }
    }
    if undecided || !model.flows_complete {
        TruthValue::Unknown
    } else {
        TruthValue::False
    }
}

/// Evaluates `expr` under strong Kleene semantics.
pub fn eval_expr(expr: &RuleExpr, model: &CityModel, env: &Bindings) -> TruthValue {
    use TruthValue::*;
    match expr {
        RuleExpr::Forall { var, domain, body } => {
            let mut acc = True;
            for i in 0..model.count(*domain) {
                acc = acc.and(eval_expr(body, model, &env.bind(var, *domain, i)));
                if acc == False {
                    break;
                }
            }
            acc
        }
        RuleExpr::Exists { var, domain, body } => {
            let mut acc = False;
            for i in 0..model.count(*domain) {
                acc = acc.or(eval_expr(body, model, &env.bind(var, *domain, i)));
                if acc == True {
                    break;
                }
            }
            acc
        }
        RuleExpr::And(a, b) => {
            let l = eval_expr(a, model, env);
            if l == False {
                return False;
            }
            l.and(eval_expr(b, model, env))
        }
        RuleExpr::Or(a, b) => {
            let l = eval_expr(a, model, env);
            if l == True {
                return True;
            }
            l.or(eval_expr(b, model, env))
        }
        RuleExpr::Not(a) => !eval_expr(a, model, env),
        RuleExpr::Implies(a, b) => {
            let l = eval_expr(a, model, env);
            if l == False {
                return True;
            }
            l.implies(eval_expr(b, model, env))
        }
        RuleExpr::Compare { op, lhs, rhs } => {
            compare(*op, &term(lhs, model, env), &term(rhs, model, env)).into()
        }
        RuleExpr::ScaledCompare {
            lhs_coeff,
            lhs,
            op,
            rhs_coeff,
            rhs,
        } => {
            let l = u128::from(*lhs_coeff) * count(&term(lhs, model, env));
            let r = u128::from(*rhs_coeff) * count(&term(rhs, model, env));
            op.holds(&l, &r).into()
        }
        RuleExpr::Member { elem, set } => match (term(elem, model, env), term(set, model, env)) {
            (Eval::Scalar(v), Eval::Set(vs)) => vs.contains(&v).into(),
            _ => False,
        },
        RuleExpr::Flow(p) => eval_flow(p, model),
        RuleExpr::Field { var, field } => {
            let (_, index) = env.get(var).expect("well-typed rule binds every variable");
            matches!(field.read(model, index), FieldValue::Scalar(Value::Bool(true))).into()
        }
        RuleExpr::Literal(b) => (*b).into(),
    }
}

/// Evaluates a rule to a verdict, collecting witnesses or unknown atoms.
pub fn eval_rule(rule: &RuleDef, model: &CityModel) -> Verdict {
    let env = Bindings::new();
    let ex = Explainer { model };
    match eval_expr(&rule.expr, model, &env) {
        TruthValue::True => Verdict::Compliant,
        TruthValue::False => {
            let mut ws = ex.why(&rule.expr, false, &env);
            ws.truncate(WITNESS_CAP);
            Verdict::Violated(ws)
        }
        TruthValue::Unknown => {
            let mut atoms = Vec::new();
            ex.unknowns(&rule.expr, &env, &mut atoms);
            Verdict::Indeterminate(atoms)
        }
    }
}

struct Explainer<'m> {
    model: &'m CityModel,
}

fn product(a: Vec<Witness>, b: Vec<Witness>) -> Vec<Witness> {
    let mut out = Vec::new();
    for x in &a {
        for y in &b {
            out.push(x.merge(y));
            if out.len() >= WITNESS_CAP {
                return out;
            }
        }
    }
    out
}

fn merge_all(ws: impl IntoIterator<Item = Witness>) -> Witness {
    ws.into_iter()
        .fold(Witness::default(), |acc, w| acc.merge(&w))
}

impl Explainer<'_> {
    fn value(&self, e: &Eval) -> String {
        match e {
            Eval::Scalar(v) => render_value(v),
            Eval::Set(vs) => {
                let parts: Vec<String> = vs.iter().map(render_value).collect();
                format!("{{{}}}", parts.join(", "))
            }
        }
    }

    fn binding(&self, var: &str, env: &Bindings) -> Option<WitnessBinding> {
        env.get(var).map(|(k, i)| WitnessBinding {
            var: var.to_string(),
            entity: entity_ref(self.model, k, i),
        })
    }

    fn observed(&self, atom: &RuleExpr, env: &Bindings) -> Vec<String> {
        let mut out = Vec::new();
        let mut note = |s: String| {
            if !out.contains(&s) {
                out.push(s);
            }
        };
        if let RuleExpr::Field { var, field } = atom {
            let (k, i) = env.get(var).expect("bound");
            let v = term(
                &Term::Field {
                    var: var.clone(),
                    field: *field,
                },
                self.model,
                env,
            );
            note(format!("{}.{} = {}", entity_ref(self.model, k, i).name, field.name(), self.value(&v)));
        }
        for t in atom.terms() {
            match t {
                Term::Field { var, field } => {
                    let (k, i) = env.get(var).expect("bound");
                    let v = term(t, self.model, env);
                    note(format!(
                        "{}.{} = {}",
                        entity_ref(self.model, k, i).name,
                        field.name(),
                        self.value(&v)
                    ));
                }
                Term::Universe => {
                    let v = term(t, self.model, env);
                    note(format!("universe = {}", self.value(&v)));
                }
                _ => {}
            }
        }
        out
    }

    fn atom(&self, e: &RuleExpr, holds: bool, env: &Bindings) -> Witness {
        let flows = match e {
            RuleExpr::Flow(p) if holds => self
                .model
                .flows
                .iter()
                .filter(|f| {
                    flow_matches(p, f)
                        && match p.consent {
                            ConsentPattern::Any => true,
                            ConsentPattern::Is(c) => f.consent == c,
                        }
                })
                .cloned()
                .collect(),
            _ => Vec::new(),
        };
        Witness {
            bindings: Vec::new(),
            atoms: vec![AtomWitness {
                atom: e.to_string(),
                holds,
                observed: self.observed(e, env),
            }],
            flows,
        }
    }

    /// Witnesses explaining why `e` evaluates to `target`. Alternatives are
    /// separate entries; joint causes are merged into one entry.
    fn why(&self, e: &RuleExpr, target: bool, env: &Bindings) -> Vec<Witness> {
        let m = self.model;
        let want = TruthValue::from_bool(target);
        let holds = |x: &RuleExpr, env: &Bindings| eval_expr(x, m, env) == want;
        match e {
            RuleExpr::Forall { var, domain, body } | RuleExpr::Exists { var, domain, body } => {
                let universal = matches!(e, RuleExpr::Forall { .. });
                let per_binding = |i: usize| {
                    let inner = env.bind(var, *domain, i);
                    let b = WitnessBinding {
                        var: var.clone(),
                        entity: entity_ref(m, *domain, i),
                    };
                    (inner, b)
                };
                if universal != target {
                    // Forall false / exists true: each qualifying binding is a witness.
                    let mut out = Vec::new();
                    for i in 0..m.count(*domain) {
                        let (inner, b) = per_binding(i);
                        if holds(body, &inner) {
                            for w in self.why(body, target, &inner) {
                                out.push(w.with_binding(b.clone()));
                                if out.len() >= WITNESS_CAP {
                                    return out;
                                }
                            }
                        }
                    }
                    out
                } else {
                    // Forall true / exists false: every binding contributes.
                    vec![merge_all((0..m.count(*domain)).filter_map(|i| {
                        let (inner, b) = per_binding(i);
                        self.why(body, target, &inner)
                            .into_iter()
                            .next()
                            .map(|w| w.with_binding(b))
                    }))]
                }
            }
            RuleExpr::And(a, b) | RuleExpr::Or(a, b) => {
                let conj = matches!(e, RuleExpr::And(..));
                let (ha, hb) = (holds(a, env), holds(b, env));
                if conj == target {
                    // And true / or false: both sides are needed together.
                    product(self.why(a, target, env), self.why(b, target, env))
                } else if conj {
                    // And false: each false side is an alternative.
                    let mut out = Vec::new();
                    if ha {
                        out.extend(self.why(a, target, env));
                    }
                    if hb {
                        out.extend(self.why(b, target, env));
                    }
                    out.truncate(WITNESS_CAP);
                    out
                } else {
                    // Or true: all true disjuncts shown together.
                    match (ha, hb) {
                        (true, true) => product(self.why(a, target, env), self.why(b, target, env)),
                        (true, false) => self.why(a, target, env),
                        _ => self.why(b, target, env),
                    }
                }
            }
            RuleExpr::Implies(a, b) => {
                if target {
                    let na = eval_expr(a, m, env) == TruthValue::False;
                    let hb = holds(b, env);
                    match (na, hb) {
                        (true, true) => product(self.why(a, false, env), self.why(b, true, env)),
                        (true, false) => self.why(a, false, env),
                        _ => self.why(b, true, env),
                    }
                } else {
                    product(self.why(a, true, env), self.why(b, false, env))
                }
            }
            RuleExpr::Not(a) => self.why(a, !target, env),
            atom => vec![self.atom(atom, target, env)],
        }
    }

    fn unknowns(&self, e: &RuleExpr, env: &Bindings, out: &mut Vec<UnknownAtom>) {
        let m = self.model;
        let unknown = |x: &RuleExpr, env: &Bindings| eval_expr(x, m, env) == TruthValue::Unknown;
        match e {
            RuleExpr::Forall { var, domain, body } | RuleExpr::Exists { var, domain, body } => {
                for i in 0..m.count(*domain) {
                    let inner = env.bind(var, *domain, i);
                    if unknown(body, &inner) {
                        self.unknowns(body, &inner, out);
                    }
                }
            }
            RuleExpr::And(a, b) | RuleExpr::Or(a, b) | RuleExpr::Implies(a, b) => {
                for side in [a, b] {
                    if unknown(side, env) {
                        self.unknowns(side, env, out);
                    }
                }
            }
            RuleExpr::Not(a) => self.unknowns(a, env, out),
            atom => {
                let mut vars: Vec<&str> = Vec::new();
                if let RuleExpr::Field { var, .. } = atom {
                    vars.push(var);
                }
                for t in atom.terms() {
                    if let Term::Field { var, .. } = t {
                        if !vars.contains(&var.as_str()) {
                            vars.push(var);
                        }
                    }
                }
                let entry = UnknownAtom {
                    atom: atom.to_string(),
                    bindings: vars.iter().filter_map(|v| self.binding(v, env)).collect(),
                };
                if !out.contains(&entry) {
                    out.push(entry);
                }
            }
        }
    }
}
