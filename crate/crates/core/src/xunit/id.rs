use std::fmt;

use super::RegistryError;

/// Characters reserved by the filter grammar and the `Suite.Test` display form.
pub const RESERVED_CHARS: [char; 5] = ['.', ':', '*', '?', '-'];

/// Identity of a test: suite name plus test name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TestId {
    suite: String,
    name: String,
}

impl TestId {
    /// Builds an id without validating it; [`TestId::validate`] or
    /// registration checks the naming rules.
    pub fn new(suite: impl Into<String>, name: impl Into<String>) -> Self {
        TestId {
            suite: suite.into(),
            name: name.into(),
        }
    }

    pub fn suite(&self) -> &str {
        &self.suite
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `Suite.Test`, the form matched by filters.
    pub fn display_name(&self) -> String {
        format!("{}.{}", self.suite, self.name)
    }

    pub fn is_death_suite(&self) -> bool {
        self.suite.ends_with("_DeathTest")
    }

    pub fn validate(&self) -> Result<(), RegistryError> {
        validate_component(&self.suite)?;
        validate_component(&self.name)
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.suite, self.name)
    }
}

/// Checks one name component (suite, test, or instantiation prefix).
pub fn validate_component(component: &str) -> Result<(), RegistryError> {
    if component.is_empty() {
        return Err(RegistryError::InvalidName {
            name: component.to_owned(),
            reason: "name is empty".into(),
        });
    }
    if let Some(c) = component.chars().find(|c| RESERVED_CHARS.contains(c)) {
        return Err(RegistryError::InvalidName {
            name: component.to_owned(),
            reason: format!("contains reserved character '{c}'"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_characters() {
        for bad in ["a.b", "a:b", "a*", "?", "x-y"] {
            assert!(TestId::new(bad, "t").validate().is_err(), "{bad}");
            assert!(TestId::new("s", bad).validate().is_err(), "{bad}");
        }
        assert!(TestId::new("", "t").validate().is_err());
        assert!(TestId::new("Evens/ParityTest", "IsEven/0")
            .validate()
            .is_ok());
    }

    #[test]
    fn death_suite_suffix() {
        assert!(TestId::new("Foo_DeathTest", "x").is_death_suite());
        assert!(!TestId::new("Foo_DeathTests", "x").is_death_suite());
        assert_eq!(TestId::new("A", "b").display_name(), "A.b");
    }
}
