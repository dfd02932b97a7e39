use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::MethodDescriptor;
use crate::assertions::Raised;
use crate::value::{Handle, Kind, Value};

pub type ValueFactory = Arc<dyn Fn() -> Value + Send + Sync>;
pub type ArgsFn = Arc<dyn Fn(&[Value]) -> Value + Send + Sync>;

/// Behavior run when an expectation or default binding fires.
///
/// Reference-returning behaviors are expressed with [`Handle`]s: return a
/// shared handle with [`Action::Return`] (same cell every call), or a
/// handle to a copy. [`Action::ReturnLateBound`] reads the handle's content
/// at call time.
#[derive(Clone)]
pub enum Action {
    /// Return from a void method.
    Void,
    Return(Value),
    /// Return the n-th (0-based) argument.
    ReturnArg(usize),
    /// Build a new value on every call.
    ReturnFresh(ValueFactory),
    /// The absent/none sentinel.
    ReturnAbsent,
    ReturnLateBound(Handle),
    /// Call `f` with the call's arguments.
    Invoke(ArgsFn),
    InvokeNoArgs(ValueFactory),
    /// Call the n-th argument, which must be a callable, with `bound`.
    InvokeArgument(usize, Vec<Value>),
    Raise(Raised),
}

impl Action {
    pub fn ret(value: impl Into<Value>) -> Self {
        Action::Return(value.into())
    }

    pub fn fresh(factory: impl Fn() -> Value + Send + Sync + 'static) -> Self {
        Action::ReturnFresh(Arc::new(factory))
    }

    pub fn invoke(f: impl Fn(&[Value]) -> Value + Send + Sync + 'static) -> Self {
        Action::Invoke(Arc::new(f))
    }

    pub fn invoke_no_args(f: impl Fn() -> Value + Send + Sync + 'static) -> Self {
        Action::InvokeNoArgs(Arc::new(f))
    }

    pub fn raise(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Action::Raise(Raised::new(kind, message))
    }

    /// Static compatibility with a method: argument indices in range and,
    /// where the produced kind is known up front, matching the return kind.
    pub(crate) fn check(&self, method: &MethodDescriptor) -> Result<(), ActionError> {
        let arity = method.params.len();
        let produced: Option<Kind> = match self {
            Action::Void => Some(Kind::Unit),
            Action::Return(v) => {
                return if v.fits(&method.returns) {
                    Ok(())
                } else {
                    Err(ActionError::KindMismatch {
                        expected: method.returns.clone(),
                        got: v.kind(),
                    })
                };
            }
            Action::ReturnArg(n) => {
                let kind = method
                    .params
                    .get(*n)
                    .ok_or(ActionError::BadArgumentIndex { index: *n, arity })?;
                Some(kind.clone())
            }
            Action::InvokeArgument(n, _) => {
                let kind = method
                    .params
                    .get(*n)
                    .ok_or(ActionError::BadArgumentIndex { index: *n, arity })?;
                if *kind != Kind::Callable {
                    return Err(ActionError::NotCallable { index: *n });
                }
                None
            }
            Action::ReturnAbsent => {
                return if method.returns == Kind::Unit {
                    Err(ActionError::KindMismatch {
                        expected: Kind::Unit,
                        got: Kind::named("absent"),
                    })
                } else {
                    Ok(())
                };
            }
            Action::ReturnLateBound(h) => Some(h.kind().clone()),
            Action::ReturnFresh(_)
            | Action::Invoke(_)
            | Action::InvokeNoArgs(_)
            | Action::Raise(_) => None,
        };
        match produced {
            Some(kind) if kind != method.returns => Err(ActionError::KindMismatch {
                expected: method.returns.clone(),
                got: kind,
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Void => f.write_str("Void"),
            Action::Return(v) => write!(f, "Return({v})"),
            Action::ReturnArg(n) => write!(f, "ReturnArg({n})"),
            Action::ReturnFresh(_) => f.write_str("ReturnFresh(..)"),
            Action::ReturnAbsent => f.write_str("ReturnAbsent"),
            Action::ReturnLateBound(h) => write!(f, "ReturnLateBound({h:?})"),
            Action::Invoke(_) => f.write_str("Invoke(..)"),
            Action::InvokeNoArgs(_) => f.write_str("InvokeNoArgs(..)"),
            Action::InvokeArgument(n, bound) => write!(f, "InvokeArgument({n}, {bound:?})"),
            Action::Raise(r) => write!(f, "Raise({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActionError {
    #[error("argument index {index} out of range for {arity} argument(s)")]
    BadArgumentIndex { index: usize, arity: usize },
    #[error("argument {index} is not callable")]
    NotCallable { index: usize },
    #[error("action produces {got}, method returns {expected}")]
    KindMismatch { expected: Kind, got: Kind },
    #[error("raised {0}")]
    Raised(Raised),
}

pub fn apply_action(action: &Action, args: &[Value]) -> Result<Value, ActionError> {
    let arg = |n: usize| {
        args.get(n).ok_or(ActionError::BadArgumentIndex {
            index: n,
            arity: args.len(),
        })
    };
    match action {
        Action::Void => Ok(Value::Unit),
        Action::Return(v) => Ok(v.clone()),
        Action::ReturnArg(n) => arg(*n).cloned(),
        Action::ReturnFresh(factory) => Ok(factory()),
        Action::ReturnAbsent => Ok(Value::Absent),
        Action::ReturnLateBound(h) => Ok(h.get()),
        Action::Invoke(f) => Ok(f(args)),
        Action::InvokeNoArgs(f) => Ok(f()),
        Action::InvokeArgument(n, bound) => match arg(*n)? {
            Value::Callable(c) => Ok(c.call(bound)),
            _ => Err(ActionError::NotCallable { index: *n }),
        },
        Action::Raise(r) => Err(ActionError::Raised(r.clone())),
    }
}
