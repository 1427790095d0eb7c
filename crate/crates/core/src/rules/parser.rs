//! Parser and type checker for `.rules` text.
//!
//! ```text
//! rule P8 right=fairness perspective=residents-residents :
//!     forall r in resident_groups: card(r.iot_usage_preferences) = 1
//! ```
//!
//! Precedence, loosest first: quantifiers (body extends as far right as
//! possible), `implies` (right-associative), `or`, `and`, `not`, comparisons.

use super::ast::*;
use crate::syntax::lexer::Tok;
use crate::syntax::{suggest, Cursor, ParseError, SourceSpan};
use crate::token::Token;
use crate::vocab::{
    BusinessScale, Consent, EconomicStatus, EntityKind, GoalTag, InteractionType, MovementType,
    PayloadKind, Perspective, Right, RiskType, UnknownVariant,
};

pub const KEYWORDS: &[&str] = &[
    "rule", "forall", "exists", "in", "and", "or", "not", "implies", "true", "false", "card",
    "flow", "universe",
];

#[derive(Debug, Clone)]
enum RawTerm {
    Path {
        var: String,
        var_span: SourceSpan,
        field: String,
        field_span: SourceSpan,
    },
    Word {
        text: String,
        quoted: bool,
        span: SourceSpan,
    },
    Number(u64, SourceSpan),
    Set(Vec<RawTerm>, SourceSpan),
    Universe(SourceSpan),
    Card(Box<RawTerm>, SourceSpan),
}

impl RawTerm {
    fn span(&self) -> SourceSpan {
        match self {
            RawTerm::Path { var_span, .. } => *var_span,
            RawTerm::Word { span, .. }
            | RawTerm::Number(_, span)
            | RawTerm::Set(_, span)
            | RawTerm::Universe(span)
            | RawTerm::Card(_, span) => *span,
        }
    }
}

#[derive(Debug, Clone)]
enum RawExpr {
    Quant {
        forall: bool,
        binders: Vec<(String, SourceSpan, String, SourceSpan)>,
        body: Box<RawExpr>,
    },
    And(Box<RawExpr>, Box<RawExpr>),
    Or(Box<RawExpr>, Box<RawExpr>),
    Not(Box<RawExpr>),
    Implies(Box<RawExpr>, Box<RawExpr>),
    Cmp {
        op: CmpOp,
        lhs: (Option<u64>, RawTerm),
        rhs: (Option<u64>, RawTerm),
        span: SourceSpan,
    },
    Member {
        elem: RawTerm,
        set: RawTerm,
    },
    Flow(FlowPattern),
    Term(RawTerm),
}

struct Parser {
    cur: Cursor,
}

impl Parser {
    fn keyword(&self) -> Option<&str> {
        match self.cur.peek() {
            Some(Tok::Ident(s)) if KEYWORDS.contains(&s.as_str()) => Some(s.as_str()),
            _ => None,
        }
    }

    fn rule(&mut self) -> Result<RuleDef, ParseError> {
        self.cur.expect_keyword("rule")?;
        let (id, _) = self.cur.ident("a rule id")?;
        let mut right = None;
        let mut perspective = None;
        let mut statement = None;
        while !self.cur.eat(&Tok::Colon) {
            let (key, key_span) = self.cur.ident("`right=`, `perspective=`, `statement=` or `:`")?;
            self.cur.expect(&Tok::Eq)?;
            let (value, v_span) = self.cur.word("an attribute value")?;
            let dup = || ParseError::new(format!("duplicate attribute `{key}`"), key_span);
            match key.as_str() {
                "right" => {
                    let r = Right::parse(&value).map_err(|e| variant(e, v_span))?;
                    if right.replace(r).is_some() {
                        return Err(dup());
                    }
                }
                "perspective" => {
                    let p = Perspective::parse(&value).map_err(|_| {
                        ParseError::new(format!("malformed perspective `{value}`"), v_span)
                            .with_help(
                                "write <role>-<role> with roles from {residents, iot_service, government, business}",
                            )
                    })?;
                    if perspective.replace(p).is_some() {
                        return Err(dup());
                    }
                }
                "statement" => {
                    if statement.replace(value).is_some() {
                        return Err(dup());
                    }
                }
                _ => {
                    return Err(ParseError::new(format!("unknown rule attribute `{key}`"), key_span)
                        .with_help("known attributes: right, perspective, statement"))
                }
            }
        }
        let head = self.cur.prev_span();
        let right = right.ok_or_else(|| {
            ParseError::new(format!("rule {id} has no `right=`"), head)
        })?;
        let perspective = perspective.ok_or_else(|| {
            ParseError::new(format!("rule {id} has no `perspective=`"), head)
        })?;
        let raw = self.expr()?;
        let expr = Checker::default().expr(&raw)?;
        Ok(RuleDef {
            id,
            right,
            perspective,
            statement: statement.unwrap_or_default(),
            expr,
        })
    }

    fn expr(&mut self) -> Result<RawExpr, ParseError> {
        if let Some(q) = self.quantifier()? {
            return Ok(q);
        }
        self.implies()
    }

    /// `forall x in dom[, y in dom]: body`; `exists flow(...)` is an atom, not a quantifier.
    fn quantifier(&mut self) -> Result<Option<RawExpr>, ParseError> {
        let forall = match self.keyword() {
            Some("forall") => true,
            Some("exists") if !matches!(self.cur.peek_at(1), Some(Tok::Ident(s)) if s == "flow") => {
                false
            }
            _ => return Ok(None),
        };
        self.cur.next();
        let mut binders = Vec::new();
        loop {
            let (var, var_span) = self.cur.ident("a variable name")?;
            if KEYWORDS.contains(&var.as_str()) {
                return Err(ParseError::new(
                    format!("`{var}` is a keyword and cannot name a variable"),
                    var_span,
                ));
            }
            self.cur.expect_keyword("in")?;
            let (domain, d_span) = self.cur.ident("a domain")?;
            binders.push((var, var_span, domain, d_span));
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        self.cur.expect(&Tok::Colon)?;
        let body = self.expr()?;
        Ok(Some(RawExpr::Quant {
            forall,
            binders,
            body: Box::new(body),
        }))
    }

    fn implies(&mut self) -> Result<RawExpr, ParseError> {
        let lhs = self.or()?;
        if self.cur.eat_keyword("implies") {
            let rhs = match self.quantifier()? {
                Some(q) => q,
                None => self.implies()?,
            };
            return Ok(RawExpr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.and()?;
        while self.cur.eat_keyword("or") {
            let rhs = self.and()?;
            lhs = RawExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.unary()?;
        while self.cur.eat_keyword("and") {
            let rhs = self.unary()?;
            lhs = RawExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RawExpr, ParseError> {
        if self.cur.eat_keyword("not") {
            return Ok(RawExpr::Not(Box::new(self.unary()?)));
        }
        if let Some(q) = self.quantifier()? {
            return Ok(q);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<RawExpr, ParseError> {
        if self.cur.eat(&Tok::LParen) {
            let inner = self.expr()?;
            self.cur.expect(&Tok::RParen)?;
            return Ok(inner);
        }
        if self.cur.is_keyword("exists") || self.cur.is_keyword("flow") {
            self.cur.eat_keyword("exists");
            return Ok(RawExpr::Flow(self.flow()?));
        }
        let span = self.cur.span();
        let lhs = self.scaled_term()?;
        let op = match self.cur.peek() {
            Some(Tok::Eq) => Some(CmpOp::Eq),
            Some(Tok::Ne) => Some(CmpOp::Ne),
            Some(Tok::Ge) => Some(CmpOp::Ge),
            Some(Tok::Le) => Some(CmpOp::Le),
            Some(Tok::Gt) => Some(CmpOp::Gt),
            Some(Tok::Lt) => Some(CmpOp::Lt),
            _ => None,
        };
        if let Some(op) = op {
            self.cur.next();
            let rhs = self.scaled_term()?;
            return Ok(RawExpr::Cmp { op, lhs, rhs, span });
        }
        if let Some(c) = lhs.0 {
            return Err(ParseError::new(
                format!("`{c} * ...` must be followed by a comparison"),
                span,
            ));
        }
        if self.cur.eat_keyword("in") {
            let set = self.term()?;
            return Ok(RawExpr::Member { elem: lhs.1, set });
        }
        Ok(RawExpr::Term(lhs.1))
    }

    fn scaled_term(&mut self) -> Result<(Option<u64>, RawTerm), ParseError> {
        if let (Some(Tok::Number(n)), Some(Tok::Star)) = (self.cur.peek(), self.cur.peek_at(1)) {
            let n = *n;
            self.cur.next();
            self.cur.next();
            return Ok((Some(n), self.term()?));
        }
        Ok((None, self.term()?))
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let span = self.cur.span();
        match self.cur.peek().cloned() {
            Some(Tok::Ident(w)) if w == "card" => {
                self.cur.next();
                self.cur.expect(&Tok::LParen)?;
                let inner = self.term()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(RawTerm::Card(Box::new(inner), span))
            }
            Some(Tok::Ident(w)) if w == "universe" => {
                self.cur.next();
                Ok(RawTerm::Universe(span))
            }
            Some(Tok::Ident(w)) if w == "true" || w == "false" => {
                self.cur.next();
                Ok(RawTerm::Word {
                    text: w,
                    quoted: false,
                    span,
                })
            }
            Some(Tok::Ident(w)) if KEYWORDS.contains(&w.as_str()) => {
                Err(self.cur.unexpected("a value"))
            }
            Some(Tok::Ident(w)) => {
                self.cur.next();
                if self.cur.eat(&Tok::Dot) {
                    let (field, field_span) = self.cur.ident("a field name")?;
                    return Ok(RawTerm::Path {
                        var: w,
                        var_span: span,
                        field,
                        field_span,
                    });
                }
                Ok(RawTerm::Word {
                    text: w,
                    quoted: false,
                    span,
                })
            }
            Some(Tok::Str(s)) => {
                self.cur.next();
                Ok(RawTerm::Word {
                    text: s,
                    quoted: true,
                    span,
                })
            }
            Some(Tok::Number(n)) => {
                self.cur.next();
                Ok(RawTerm::Number(n, span))
            }
            Some(Tok::LBrace) => {
                self.cur.next();
                let mut items = Vec::new();
                if !self.cur.eat(&Tok::RBrace) {
                    loop {
                        items.push(self.term()?);
                        if self.cur.eat(&Tok::RBrace) {
                            break;
                        }
                        self.cur.expect(&Tok::Comma)?;
                    }
                }
                Ok(RawTerm::Set(items, span))
            }
            _ => Err(self.cur.unexpected("a value")),
        }
    }

    /// `flow(<src> -> <dst> : <payload> [, consent=<c>])`
    fn flow(&mut self) -> Result<FlowPattern, ParseError> {
        self.cur.expect_keyword("flow")?;
        self.cur.expect(&Tok::LParen)?;
        let source = self.endpoint()?;
        self.cur.expect(&Tok::Arrow)?;
        let dest = self.endpoint()?;
        self.cur.expect(&Tok::Colon)?;
        let (p, p_span) = self.cur.ident("a payload kind")?;
        let payload = PayloadKind::parse(&p).map_err(|e| variant(e, p_span))?;
        let mut consent = ConsentPattern::Any;
        if self.cur.eat(&Tok::Comma) {
            self.cur.expect_keyword("consent")?;
            self.cur.expect(&Tok::Eq)?;
            if !self.cur.eat(&Tok::Star) {
                let (c, c_span) = self.cur.ident("`granted`, `denied` or `*`")?;
                match Consent::parse(&c) {
                    Ok(Consent::Unknown) | Err(_) => {
                        return Err(ParseError::new(
                            format!("consent pattern must be granted, denied or *; found `{c}`"),
                            c_span,
                        ))
                    }
                    Ok(c) => consent = ConsentPattern::Is(c),
                }
            }
        }
        self.cur.expect(&Tok::RParen)?;
        Ok(FlowPattern {
            source,
            dest,
            payload,
            consent,
        })
    }

    fn endpoint(&mut self) -> Result<EndpointPattern, ParseError> {
        if self.cur.eat(&Tok::Star) {
            return Ok(EndpointPattern::Any);
        }
        let one = |p: &mut Parser| -> Result<EntityKind, ParseError> {
            let (k, span) = p.cur.ident("an entity kind")?;
            EntityKind::parse(&k).map_err(|e| variant(e, span))
        };
        let mut kinds = Vec::new();
        if self.cur.eat(&Tok::LBrace) {
            loop {
                let k = one(self)?;
                if !kinds.contains(&k) {
                    kinds.push(k);
                }
                if self.cur.eat(&Tok::RBrace) {
                    break;
                }
                self.cur.expect(&Tok::Comma)?;
            }
        } else {
            kinds.push(one(self)?);
        }
        Ok(EndpointPattern::Kinds(kinds))
    }
}

fn variant(e: UnknownVariant, span: SourceSpan) -> ParseError {
    let mut err = ParseError::new(e.to_string(), span);
    if let Some(s) = suggest(&e.found, &e.expected) {
        err = err.with_help(format!("did you mean `{s}`?"));
    }
    err
}

/// Type checker: resolves variables and fields, and gives literals the type
/// demanded by the other side of their comparison.
#[derive(Default)]
struct Checker {
    scope: Vec<(String, EntityKind)>,
}

impl Checker {
    fn expr(&mut self, raw: &RawExpr) -> Result<RuleExpr, ParseError> {
        Ok(match raw {
            RawExpr::Quant {
                forall,
                binders,
                body,
            } => {
                let mut kinds = Vec::new();
                for (var, var_span, domain, d_span) in binders {
                    let kind = parse_domain(domain).ok_or_else(|| {
                        ParseError::new(format!("unknown domain `{domain}`"), *d_span).with_help(
                            "domains are devices, resident_groups, governments, businesses",
                        )
                    })?;
                    if self.scope.iter().any(|(v, _)| v == var) {
                        return Err(ParseError::new(
                            format!("variable `{var}` is already bound"),
                            *var_span,
                        ));
                    }
                    self.scope.push((var.clone(), kind));
                    kinds.push((var.clone(), kind));
                }
                let mut out = self.expr(body)?;
                for (var, domain) in kinds.into_iter().rev() {
                    self.scope.pop();
                    out = if *forall {
                        RuleExpr::Forall {
                            var,
                            domain,
                            body: Box::new(out),
                        }
                    } else {
                        RuleExpr::Exists {
                            var,
                            domain,
                            body: Box::new(out),
                        }
                    };
                }
                out
            }
            RawExpr::And(a, b) => RuleExpr::and(self.expr(a)?, self.expr(b)?),
            RawExpr::Or(a, b) => RuleExpr::or(self.expr(a)?, self.expr(b)?),
            RawExpr::Implies(a, b) => RuleExpr::implies(self.expr(a)?, self.expr(b)?),
            RawExpr::Not(a) => RuleExpr::not(self.expr(a)?),
            RawExpr::Flow(p) => RuleExpr::Flow(p.clone()),
            RawExpr::Term(t) => self.boolean_term(t)?,
            RawExpr::Member { elem, set } => self.member(elem, set)?,
            RawExpr::Cmp { op, lhs, rhs, span } => self.compare(*op, lhs, rhs, *span)?,
        })
    }

    fn boolean_term(&self, t: &RawTerm) -> Result<RuleExpr, ParseError> {
        match t {
            RawTerm::Word {
                text, quoted: false, ..
            } if text == "true" || text == "false" => Ok(RuleExpr::Literal(text == "true")),
            RawTerm::Path { .. } => {
                let (var, field) = self.path(t)?;
                if field.value_type() != ValueType::Scalar(ScalarType::Bool) {
                    return Err(ParseError::new(
                        format!(
                            "`{var}.{}` is a {}, not a condition",
                            field.name(),
                            field.value_type().describe()
                        ),
                        t.span(),
                    ));
                }
                Ok(RuleExpr::Field { var, field })
            }
            other => Err(ParseError::new("expected a condition", other.span())),
        }
    }

    fn path(&self, t: &RawTerm) -> Result<(String, Field), ParseError> {
        let RawTerm::Path {
            var,
            var_span,
            field,
            field_span,
        } = t
        else {
            unreachable!("path() called on a non-path term")
        };
        let kind = self
            .scope
            .iter()
            .rev()
            .find(|(v, _)| v == var)
            .map(|(_, k)| *k)
            .ok_or_else(|| ParseError::new(format!("unbound variable `{var}`"), *var_span))?;
        let f = Field::lookup(kind, field).ok_or_else(|| {
            let names = Field::names_for(kind);
            let mut e = ParseError::new(
                format!("unknown field {field} on {kind} (variable `{var}`)"),
                *field_span,
            );
            if let Some(s) = suggest(field, &names) {
                e = e.with_help(format!("did you mean `{s}`?"));
            } else {
                e = e.with_help(format!("{kind} fields: {}", names.join(", ")));
            }
            e
        })?;
        Ok((var.clone(), f))
    }

    /// Types a term that does not depend on context (fields, universe, card,
    /// numbers, booleans). Returns `None` for literals needing a hint.
    fn intrinsic(&self, t: &RawTerm) -> Result<Option<(Term, ValueType)>, ParseError> {
        Ok(match t {
            RawTerm::Path { .. } => {
                let (var, field) = self.path(t)?;
                Some((Term::Field { var, field }, field.value_type()))
            }
            RawTerm::Universe(_) => Some((Term::Universe, ValueType::Set(ScalarType::Neighborhood))),
            RawTerm::Card(inner, span) => {
                let (term, ty) = match self.intrinsic(inner)? {
                    Some(x) => x,
                    None => match &**inner {
                        RawTerm::Set(..) => self.literal(inner, ValueType::Set(ScalarType::Text))?,
                        _ => (Term::Literal(Value::Bool(false)), ValueType::Scalar(ScalarType::Bool)),
                    },
                };
                if !matches!(ty, ValueType::Set(_)) {
                    return Err(ParseError::new(
                        format!("card() expects a set, found {}", ty.describe()),
                        *span,
                    ));
                }
                Some((Term::Card(Box::new(term)), ValueType::Scalar(ScalarType::Count)))
            }
            RawTerm::Number(n, _) => Some((
                Term::Literal(Value::Count(*n)),
                ValueType::Scalar(ScalarType::Count),
            )),
            RawTerm::Word {
                text, quoted: false, ..
            } if text == "true" || text == "false" => Some((
                Term::Literal(Value::Bool(text == "true")),
                ValueType::Scalar(ScalarType::Bool),
            )),
            RawTerm::Word { .. } | RawTerm::Set(..) => None,
        })
    }

    /// Types a literal against an expected type.
    fn literal(&self, t: &RawTerm, want: ValueType) -> Result<(Term, ValueType), ParseError> {
        match (t, want) {
            (RawTerm::Set(items, _), ValueType::Set(elem)) => {
                let values = items
                    .iter()
                    .map(|i| self.scalar_literal(i, elem))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((
                    Term::SetLiteral {
                        elem,
                        items: values,
                    },
                    want,
                ))
            }
            (RawTerm::Set(_, span), ValueType::Scalar(s)) => Err(ParseError::new(
                format!("expected a {}, found a set literal", s.describe()),
                *span,
            )),
            (_, ValueType::Scalar(s)) => Ok((Term::Literal(self.scalar_literal(t, s)?), want)),
            (other, ValueType::Set(s)) => Err(ParseError::new(
                format!("expected a set of {}", s.describe()),
                other.span(),
            )),
        }
    }

    fn scalar_literal(&self, t: &RawTerm, ty: ScalarType) -> Result<Value, ParseError> {
        let span = t.span();
        let mismatch = |found: &str| {
            ParseError::new(
                format!("expected a {}, found {found}", ty.describe()),
                span,
            )
        };
        let text = match t {
            RawTerm::Word { text, .. } => text.as_str(),
            RawTerm::Number(n, _) => {
                return if ty == ScalarType::Count {
                    Ok(Value::Count(*n))
                } else {
                    Err(mismatch("a number"))
                }
            }
            RawTerm::Path { .. } | RawTerm::Universe(_) | RawTerm::Card(..) => {
                return Err(mismatch("an expression"))
            }
            RawTerm::Set(..) => return Err(mismatch("a set")),
        };
        let token = || {
            Token::new(text).map_err(|_| ParseError::new("name must not be empty", span))
        };
        Ok(match ty {
            ScalarType::Bool => match text {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                _ => return Err(mismatch(&format!("`{text}`"))),
            },
            ScalarType::Count => return Err(mismatch(&format!("`{text}`"))),
            ScalarType::Name => Value::Name(token()?),
            ScalarType::Neighborhood => Value::Neighborhood(token()?),
            ScalarType::Text => Value::Text(text.to_string()),
            ScalarType::Movement => {
                Value::Movement(MovementType::parse(text).map_err(|e| variant(e, span))?)
            }
            ScalarType::Interaction => {
                Value::Interaction(InteractionType::parse(text).map_err(|e| variant(e, span))?)
            }
            ScalarType::Risk => Value::Risk(RiskType::parse(text).map_err(|e| variant(e, span))?),
            ScalarType::Economic => {
                Value::Economic(EconomicStatus::parse(text).map_err(|e| variant(e, span))?)
            }
            ScalarType::Scale => {
                Value::Scale(BusinessScale::parse(text).map_err(|e| variant(e, span))?)
            }
            ScalarType::Goal => Value::Goal(GoalTag::parse(text).map_err(|e| variant(e, span))?),
        })
    }

    /// Types both sides of a binary form, using whichever side is intrinsic
    /// to type the other.
    fn pair(
        &self,
        lhs: &RawTerm,
        rhs: &RawTerm,
        span: SourceSpan,
        lhs_hint: impl Fn(ValueType) -> Option<ValueType>,
        rhs_hint: impl Fn(ValueType) -> Option<ValueType>,
    ) -> Result<((Term, ValueType), (Term, ValueType)), ParseError> {
        let l = self.intrinsic(lhs)?;
        let r = self.intrinsic(rhs)?;
        match (l, r) {
            (Some(l), Some(r)) => Ok((l, r)),
            (Some(l), None) => {
                let want = rhs_hint(l.1).ok_or_else(|| {
                    ParseError::new(
                        format!("no literal fits next to a {}", l.1.describe()),
                        rhs.span(),
                    )
                })?;
                let r = self.literal(rhs, want)?;
                Ok((l, r))
            }
            (None, Some(r)) => {
                let want = lhs_hint(r.1).ok_or_else(|| {
                    ParseError::new(
                        format!("no literal fits next to a {}", r.1.describe()),
                        lhs.span(),
                    )
                })?;
                let l = self.literal(lhs, want)?;
                Ok((l, r))
            }
            (None, None) => Err(ParseError::new(
                "cannot infer the type of a comparison between two literals",
                span,
            )),
        }
    }

    fn member(&self, elem: &RawTerm, set: &RawTerm) -> Result<RuleExpr, ParseError> {
        let span = elem.span();
        let ((elem_t, elem_ty), (set_t, set_ty)) = self.pair(
            elem,
            set,
            span,
            |set_ty| match set_ty {
                ValueType::Set(s) => Some(ValueType::Scalar(s)),
                ValueType::Scalar(_) => None,
            },
            |elem_ty| match elem_ty {
                ValueType::Scalar(s) => Some(ValueType::Set(s)),
                ValueType::Set(_) => None,
            },
        )?;
        match (elem_ty, set_ty) {
            (ValueType::Scalar(a), ValueType::Set(b)) if a == b => Ok(RuleExpr::Member {
                elem: elem_t,
                set: set_t,
            }),
            (ValueType::Scalar(a), ValueType::Set(b)) => Err(ParseError::new(
                format!(
                    "membership of a {} in a set of {}",
                    a.describe(),
                    b.describe()
                ),
                span,
            )),
            (_, ValueType::Scalar(s)) => Err(ParseError::new(
                format!("`in` expects a set on the right, found {}", s.describe()),
                set.span(),
            )),
            (ValueType::Set(_), _) => Err(ParseError::new(
                "`in` expects a single value on the left",
                span,
            )),
        }
    }

    fn compare(
        &self,
        op: CmpOp,
        lhs: &(Option<u64>, RawTerm),
        rhs: &(Option<u64>, RawTerm),
        span: SourceSpan,
    ) -> Result<RuleExpr, ParseError> {
        let same = Some;
        let ((lt, lty), (rt, rty)) = self.pair(&lhs.1, &rhs.1, span, same, same)?;
        if lty != rty {
            return Err(ParseError::new(
                format!(
                    "cannot compare {} with {}",
                    lty.describe(),
                    rty.describe()
                ),
                span,
            ));
        }
        let ValueType::Scalar(scalar) = lty else {
            return Err(ParseError::new(
                "sets cannot be compared directly; compare card(...) instead",
                span,
            ));
        };
        if (op.is_ordering() || lhs.0.is_some() || rhs.0.is_some()) && scalar != ScalarType::Count {
            return Err(ParseError::new(
                format!("`{}` needs counts, found {}", op.symbol(), scalar.describe()),
                span,
            ));
        }
        if lhs.0.is_some() || rhs.0.is_some() {
            return Ok(RuleExpr::ScaledCompare {
                lhs_coeff: lhs.0.unwrap_or(1),
                lhs: lt,
                op,
                rhs_coeff: rhs.0.unwrap_or(1),
                rhs: rt,
            });
        }
        Ok(RuleExpr::Compare {
            op,
            lhs: lt,
            rhs: rt,
        })
    }
}

/// Parses exactly one `rule` definition.
pub fn parse_rule(src: &str) -> Result<RuleDef, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
    };
    if p.cur.at_end() {
        return Err(ParseError::new("no rule definition", SourceSpan::START));
    }
    let rule = p.rule()?;
    if !p.cur.at_end() {
        return Err(p.cur.unexpected("end of rule"));
    }
    Ok(rule)
}

/// Parses a `.rules` file: zero or more `rule` blocks with unique ids.
pub fn parse_rules(name: &str, src: &str) -> Result<RuleSet, ParseError> {
    let mut p = Parser {
        cur: Cursor::new(src)?,
    };
    let mut rules: Vec<RuleDef> = Vec::new();
    while !p.cur.at_end() {
        let span = p.cur.span();
        let rule = p.rule()?;
        if rules.iter().any(|r| r.id.eq_ignore_ascii_case(&rule.id)) {
            return Err(ParseError::new(format!("duplicate rule id `{}`", rule.id), span));
        }
        rules.push(rule);
        if !p.cur.at_end() && !p.cur.is_keyword("rule") {
            return Err(p.cur.unexpected("`rule` or end of input"));
        }
    }
    Ok(RuleSet {
        name: name.to_string(),
        rules,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::Role;

    #[test]
    fn parses_p8() {
        let r = parse_rule(
            "rule P8 right=fairness perspective=residents-residents: forall r in residents: card(r.iot_usage_preferences) = 1",
        )
        .unwrap();
        assert_eq!(r.id, "P8");
        assert_eq!(r.right, Right::Fairness);
        assert_eq!(r.perspective, Perspective(Role::Residents, Role::Residents));
        assert_eq!(
            r.expr,
            RuleExpr::Forall {
                var: "r".into(),
                domain: EntityKind::Residents,
                body: Box::new(RuleExpr::Compare {
                    op: CmpOp::Eq,
                    lhs: Term::Card(Box::new(Term::Field {
                        var: "r".into(),
                        field: Field::IotUsagePreferences
                    })),
                    rhs: Term::Literal(Value::Count(1)),
                })
            }
        );
    }

    #[test]
    fn constant_body() {
        let r = parse_rule("rule X right=safety perspective=residents-iot_service: forall d in devices: true")
            .unwrap();
        assert!(matches!(r.expr, RuleExpr::Forall { ref body, .. } if **body == RuleExpr::Literal(true)));
    }

    #[test]
    fn unknown_field_is_type_error() {
        let src = "rule X right=safety perspective=residents-iot_service: forall d in devices: d.riskk = high";
        let err = parse_rule(src).unwrap_err();
        assert!(err.message.contains("unknown field riskk on device"), "{}", err.message);
        assert!(err.message.contains("`d`"));
        assert_eq!(err.help.as_deref(), Some("did you mean `risk_type`?"));
        assert_eq!(err.span.column, src.find("riskk").unwrap() + 1);
    }

    #[test]
    fn literal_typed_by_context() {
        let r = parse_rule(
            "rule X right=safety perspective=residents-iot_service: forall d in devices: d.movement_type in {still, mobile}",
        )
        .unwrap();
        let RuleExpr::Forall { body, .. } = r.expr else { panic!() };
        let RuleExpr::Member { set, .. } = *body else { panic!() };
        assert_eq!(
            set,
            Term::SetLiteral {
                elem: ScalarType::Movement,
                items: vec![
                    Value::Movement(MovementType::Stationary),
                    Value::Movement(MovementType::Mobile)
                ]
            }
        );
    }

    #[test]
    fn type_errors() {
        let base = "rule X right=safety perspective=residents-iot_service: ";
        for (body, needle) in [
            ("forall d in devices: d.risk_type = extreme", "unknown risk type"),
            ("forall d in devices: d.risk_type > low", "needs counts"),
            ("forall d in devices: x.risk_type = low", "unbound variable `x`"),
            ("forall d in devices: d.risk_type", "not a condition"),
            ("forall d in devices: card(d.risk_type) = 1", "card() expects a set"),
            ("forall d in devices: forall d in devices: true", "already bound"),
            ("forall d in people: true", "unknown domain"),
            ("1 = 1 and low = low", "two literals"),
            ("flow(* -> residents : resident_location, consent=unknown)", "consent pattern"),
            ("forall d in devices: d.deploy_neighborhoods = d.deploy_neighborhoods", "sets cannot"),
        ] {
            let err = parse_rule(&format!("{base}{body}")).unwrap_err();
            assert!(err.message.contains(needle), "{body}: {}", err.message);
        }
    }

    #[test]
    fn precedence_and_quantifier_scope() {
        let r = parse_rule(
            "rule X right=safety perspective=residents-iot_service: not true or false and true implies false implies true",
        )
        .unwrap();
        // ((not true) or (false and true)) implies (false implies true)
        let expected = RuleExpr::implies(
            RuleExpr::or(
                RuleExpr::not(RuleExpr::Literal(true)),
                RuleExpr::and(RuleExpr::Literal(false), RuleExpr::Literal(true)),
            ),
            RuleExpr::implies(RuleExpr::Literal(false), RuleExpr::Literal(true)),
        );
        assert_eq!(r.expr, expected);
    }

    #[test]
    fn multi_binder_forall_nests() {
        let r = parse_rule(
            "rule P2 right=safety perspective=residents-government: forall g in governments, d in devices: not (transform_physical_living_environment in g.project_goals) or d.interaction_type = non_physical",
        )
        .unwrap();
        let RuleExpr::Forall { var, body, .. } = r.expr else { panic!() };
        assert_eq!(var, "g");
        assert!(matches!(*body, RuleExpr::Forall { ref var, .. } if var == "d"));
    }

    #[test]
    fn scaled_comparison() {
        let r = parse_rule(
            "rule P9 right=fairness perspective=business-business: forall d in devices: 5 * card(d.deploy_neighborhoods) >= 2 * card(universe)",
        )
        .unwrap();
        let RuleExpr::Forall { body, .. } = r.expr else { panic!() };
        assert!(matches!(
            *body,
            RuleExpr::ScaledCompare { lhs_coeff: 5, rhs_coeff: 2, op: CmpOp::Ge, .. }
        ));
    }

    #[test]
    fn flow_patterns() {
        let r = parse_rule(
            "rule P6 right=privacy perspective=residents-business: not exists flow(device -> {business, external} : resident_personal_data, consent=denied)",
        )
        .unwrap();
        let RuleExpr::Not(inner) = r.expr else { panic!() };
        assert_eq!(
            *inner,
            RuleExpr::Flow(FlowPattern {
                source: EndpointPattern::Kinds(vec![EntityKind::Device]),
                dest: EndpointPattern::Kinds(vec![EntityKind::Business, EntityKind::External]),
                payload: PayloadKind::ResidentPersonalData,
                consent: ConsentPattern::Is(Consent::Denied),
            })
        );
    }

    #[test]
    fn rules_file_with_duplicates_rejected() {
        let src = "rule A right=truth perspective=residents-government: true\nrule a right=truth perspective=residents-government: false\n";
        let err = parse_rules("x", src).unwrap_err();
        assert!(err.message.contains("duplicate rule id"));
        assert_eq!(err.span.line, 2);
        let ok = parse_rules("x", "# nothing here\n").unwrap();
        assert!(ok.is_empty());
    }

    #[test]
    fn statement_attribute() {
        let r = parse_rule(
            "rule T right=truth perspective=residents-government statement=\"Residents should be informed.\" : exists flow(government -> residents : project_goals)",
        )
        .unwrap();
        assert_eq!(r.statement, "Residents should be informed.");
    }
}
