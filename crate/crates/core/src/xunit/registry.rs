use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::{TestDefinition, TestId};
use crate::params::{self, Instantiation, TemplateTest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("test {0} is already registered")]
    DuplicateName(TestId),
    #[error("invalid name {name:?}: {reason}")]
    InvalidName { name: String, reason: String },
    #[error("death statement {0:?} is already registered")]
    DuplicateStatement(String),
}

pub type DeathStatement = Arc<dyn Fn() + Send + Sync>;

/// Ordered set of test definitions. Built single-threaded, then shared
/// read-only with the runner.
#[derive(Default)]
pub struct TestRegistry {
    tests: Vec<TestDefinition>,
    ids: HashSet<TestId>,
    statements: BTreeMap<String, DeathStatement>,
    warnings: Vec<String>,
}

impl TestRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, def: TestDefinition) -> Result<TestId, RegistryError> {
        let id = def.id().clone();
        id.validate()?;
        if self.ids.contains(&id) {
            return Err(RegistryError::DuplicateName(id));
        }
        self.ids.insert(id.clone());
        self.tests.push(def);
        Ok(id)
    }

    /// Registers every instance of a parameterized suite. An empty generator
    /// registers nothing and leaves a warning for the runner.
    pub fn register_instantiation(
        &mut self,
        inst: &Instantiation,
        templates: &[TemplateTest],
    ) -> Result<Vec<TestId>, RegistryError> {
        let defs = params::instantiate_parameterized(inst, templates)?;
        if defs.is_empty() {
            self.warnings.push(format!(
                "instantiation {}/{} has no parameter values; no tests registered",
                inst.prefix(),
                inst.template_suite()
            ));
        }
        for def in &defs {
            if self.ids.contains(def.id()) {
                return Err(RegistryError::DuplicateName(def.id().clone()));
            }
        }
        defs.into_iter().map(|d| self.register(d)).collect()
    }

    /// Registers a statement that a re-invoked child can run by name.
    pub fn register_death_statement(
        &mut self,
        name: impl Into<String>,
        statement: impl Fn() + Send + Sync + 'static,
    ) -> Result<(), RegistryError> {
        let name = name.into();
        if self.statements.contains_key(&name) {
            return Err(RegistryError::DuplicateStatement(name));
        }
        self.statements.insert(name, Arc::new(statement));
        Ok(())
    }

    pub fn death_statement(&self, name: &str) -> Option<&DeathStatement> {
        self.statements.get(name)
    }

    /// Definitions in registration order.
    pub fn tests(&self) -> &[TestDefinition] {
        &self.tests
    }

    pub fn ids(&self) -> impl Iterator<Item = &TestId> {
        self.tests.iter().map(TestDefinition::id)
    }

    pub fn get(&self, id: &TestId) -> Option<&TestDefinition> {
        self.tests.iter().find(|d| d.id() == id)
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn noop(suite: &str, name: &str) -> TestDefinition {
        TestDefinition::new(suite, name, |_| {})
    }

    #[test]
    fn single_insertion() {
        let mut reg = TestRegistry::new();
        reg.register(noop("Math", "Adds")).unwrap();
        assert_eq!(reg.len(), 1);
    }

    #[test]
    fn duplicate_is_rejected() {
        let mut reg = TestRegistry::new();
        reg.register(noop("Math", "Adds")).unwrap();
        assert_eq!(
            reg.register(noop("Math", "Adds")),
            Err(RegistryError::DuplicateName(TestId::new("Math", "Adds")))
        );
        assert_eq!(reg.len(), 1);
    }

    #[test]
    fn invalid_name_is_rejected() {
        let mut reg = TestRegistry::new();
        assert!(matches!(
            reg.register(noop("Math.X", "Adds")),
            Err(RegistryError::InvalidName { .. })
        ));
        assert!(reg.is_empty());
    }

    #[test]
    fn enumeration_follows_registration() {
        let mut reg = TestRegistry::new();
        for (s, t) in [("A", "x"), ("B", "y"), ("A", "z")] {
            reg.register(noop(s, t)).unwrap();
        }
        let names: Vec<String> = reg.ids().map(TestId::display_name).collect();
        assert_eq!(names, ["A.x", "B.y", "A.z"]);
    }

    proptest! {
        #[test]
        fn order_is_preserved_for_any_permutation(perm in Just((0..50).collect::<Vec<u32>>()).prop_shuffle()) {
            let mut reg = TestRegistry::new();
            let expected: Vec<TestId> = perm.iter().map(|i| TestId::new(format!("S{}", i % 7), format!("t{i}"))).collect();
            for id in &expected {
                reg.register(noop(id.suite(), id.name())).unwrap();
            }
            let got: Vec<TestId> = reg.ids().cloned().collect();
            prop_assert_eq!(got, expected);
        }
    }
}
