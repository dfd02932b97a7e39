//! An xUnit-style test framework with a mock-expectation engine.
//!
//! Tests are [`TestDefinition`]s collected in a [`TestRegistry`] and run
//! through [`runner::cli_main`]. Each test body receives a [`TestContext`]
//! for recording assertion outcomes, running death tests and creating
//! [`mock::MockDouble`]s that are verified when the test ends.

pub mod assertions;
pub mod deathtest;
pub mod mock;
pub mod params;
mod quiet;
pub mod runner;
pub mod value;
pub mod xunit;

pub use value::{Callable, Handle, Kind, Record, Value};
pub use xunit::{
    execute_test, FailureEntry, Fixture, RegistryError, Severity, TestContext, TestDefinition,
    TestId, TestKind, TestRecord, TestRegistry, TestStatus,
};

/// Everything a test file usually needs.
pub mod prelude {
    pub use crate::assertions::*;
    pub use crate::deathtest::{ChildSpec, ExitPredicate, OutputMatcher};
    pub use crate::mock::{Action, Cardinality, Matcher, MethodDescriptor, MockDouble};
    pub use crate::params::{Instantiation, ParamGenerator, TemplateTest};
    pub use crate::runner::cli_main;
    pub use crate::value::{Handle, Kind, Value};
    pub use crate::xunit::{Fixture, TestContext, TestDefinition, TestRegistry};
    pub use crate::{assert_that, expect_that};
}
