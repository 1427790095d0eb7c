//! The rule language: typed AST, parser, renderer and three-valued evaluator.

pub mod ast;
pub mod eval;
pub mod explain;
pub mod kleene;
pub mod parser;
pub mod render;

pub use ast::{RuleDef, RuleExpr, RuleSet};
pub use eval::{eval_expr, eval_rule, Bindings, UnknownAtom, Verdict, Witness};
pub use explain::explain;
pub use kleene::TruthValue;
pub use parser::{parse_rule, parse_rules};
pub use render::render_rules;
