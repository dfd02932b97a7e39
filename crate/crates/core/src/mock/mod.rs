//! Programmable test doubles: default behavior, expectations, dispatch and
//! verification.

mod action;
mod cardinality;
mod defaults;
mod double;
mod matcher;

use thiserror::Error;

use crate::value::Kind;

pub use action::{apply_action, Action, ActionError, ArgsFn, ValueFactory};
pub use cardinality::Cardinality;
pub use defaults::DefaultValues;
pub use double::{
    BehaviorSource, ExpectationBuilder, ExpectationId, MethodDescriptor, Mismatch, MockDouble,
    MockEvent, MockFailure, Resolution, RetireCause, SequenceId, Violation,
};
pub use matcher::{ArgPredicate, Matcher, TuplePredicate};

/// Errors from building doubles and declaring behavior.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MockError {
    #[error("duplicate method {0}")]
    DuplicateMethod(String),
    #[error("unknown method {0}")]
    UnknownMethod(String),
    #[error("{method} takes {expected} argument(s), {got} matcher(s) given")]
    ArityMismatch {
        method: String,
        expected: usize,
        got: usize,
    },
    #[error("value of kind {got} where {expected} is required")]
    KindMismatch { expected: Kind, got: Kind },
    #[error("invalid action for {method}: {error}")]
    BadAction { method: String, error: ActionError },
    #[error("invalid cardinality {0}")]
    InvalidCardinality(Cardinality),
    #[error("builder misuse: {0}")]
    BuilderMisuse(&'static str),
    #[error("unknown expectation {0}")]
    UnknownExpectation(ExpectationId),
    #[error("unknown sequence {0:?}")]
    UnknownSequence(SequenceId),
}
