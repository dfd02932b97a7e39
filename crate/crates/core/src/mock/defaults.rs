use std::collections::HashMap;

use super::MockError;
use crate::value::{Kind, Value};

/// Per-kind default return values, consulted after expectations and
/// default bindings have nothing to offer.
#[derive(Debug, Clone, Default)]
pub struct DefaultValues {
    values: HashMap<Kind, Value>,
}

impl DefaultValues {
    pub fn set(&mut self, kind: Kind, value: Value) -> Result<(), MockError> {
        if !value.fits(&kind) {
            return Err(MockError::KindMismatch {
                expected: kind,
                got: value.kind(),
            });
        }
        self.values.insert(kind, value);
        Ok(())
    }

    pub fn clear(&mut self, kind: &Kind) {
        self.values.remove(kind);
    }

    pub fn get(&self, kind: &Kind) -> Option<&Value> {
        self.values.get(kind)
    }
}
