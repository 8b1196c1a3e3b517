//! Walker geometry, mass properties and design-rule checks.

pub mod mass;
mod params;
mod rules;
mod stock;

pub use mass::{
    combine, compose_body, mass_properties_oracle, BodyMassProperties, MassSpec, Primitive, Shape,
};
pub use params::{ContactMaterial, FootSphere, WalkerParams};
pub use rules::{check_design_rules, evaluate_rules, DesignRuleReport, DesignScalars, RuleCheck};
pub use stock::{stock_left_primitives, stock_right_primitives, stock_walker};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("empty body")]
    EmptyBody,
    #[error("primitive {index} has non-positive mass")]
    NonPositiveMass { index: usize },
    #[error("primitive {index}: {reason}")]
    InvalidPrimitive { index: usize, reason: String },
    #[error("oracle needs at least 100000 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("malformed walker file: {0}")]
    Parse(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}
