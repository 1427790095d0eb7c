//! Test support for civitas: random models, hand-written reference checkers
//! for the builtin principles and a naive micro-scope violation oracle.

pub mod generate;
pub mod naive;
pub mod reference;

pub use generate::{random_expr, random_model, GenConfig};
pub use naive::{naive_can_violate, MicroScope};
pub use reference::{check, RULE_IDS};
