//! Test model: ids, definitions, fixtures, per-test context, the registry
//! and the single-test executor.

pub(crate) mod context;
mod definition;
mod execute;
mod id;
mod registry;

pub use context::{FailureEntry, Severity, TestContext};
pub use definition::{Fixture, TestDefinition, TestKind, TestReturn};
pub use execute::{execute_test, TestRecord, TestStatus};
pub use id::{validate_component, TestId, RESERVED_CHARS};
pub use registry::{DeathStatement, RegistryError, TestRegistry};
