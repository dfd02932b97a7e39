//! Dynamically kinded values.
//!
//! Mock arguments, mock return values and test parameters all travel as
//! [`Value`]. Every value carries a [`Kind`] tag so that doubles can check
//! return kinds, default tables can be keyed by kind and heterogeneous
//! parameter tuples can be compared.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Kind tag of a [`Value`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    /// No value (void return).
    Unit,
    Bool,
    Int,
    Float,
    Text,
    /// User-defined record kind, identified by name.
    Named(String),
    Tuple(Vec<Kind>),
    Callable,
}

impl Kind {
    pub fn named(name: impl Into<String>) -> Self {
        Kind::Named(name.into())
    }

    /// Zero-equivalent for kinds that have one: `0`, `0.0`, `false`, `""`
    /// and unit. Named kinds, tuples and callables have none.
    pub fn builtin_default(&self) -> Option<Value> {
        match self {
            Kind::Unit => Some(Value::Unit),
            Kind::Bool => Some(Value::Bool(false)),
            Kind::Int => Some(Value::Int(0)),
            Kind::Float => Some(Value::Float(0.0)),
            Kind::Text => Some(Value::Text(String::new())),
            Kind::Named(_) | Kind::Tuple(_) | Kind::Callable => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Unit => f.write_str("unit"),
            Kind::Bool => f.write_str("bool"),
            Kind::Int => f.write_str("int"),
            Kind::Float => f.write_str("float"),
            Kind::Text => f.write_str("text"),
            Kind::Named(name) => f.write_str(name),
            Kind::Callable => f.write_str("callable"),
            Kind::Tuple(kinds) => {
                f.write_str("(")?;
                for (i, k) in kinds.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A callable value, as passed to `invoke_argument` style actions.
#[derive(Clone)]
pub struct Callable(CallFn);

type CallFn = Arc<dyn Fn(&[Value]) -> Value + Send + Sync>;

impl Callable {
    pub fn new(f: impl Fn(&[Value]) -> Value + Send + Sync + 'static) -> Self {
        Callable(Arc::new(f))
    }

    pub fn call(&self, args: &[Value]) -> Value {
        (self.0)(args)
    }
}

impl PartialEq for Callable {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl fmt::Debug for Callable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<callable {:p}>", Arc::as_ptr(&self.0) as *const ())
    }
}

/// Shared, mutable cell with identity semantics.
///
/// Stands in for references: two handles are equal only if they point at
/// the same cell. The kind is fixed at creation.
#[derive(Clone)]
pub struct Handle {
    kind: Kind,
    cell: Arc<Mutex<Value>>,
}

impl Handle {
    pub fn new(value: Value) -> Self {
        Handle {
            kind: value.kind(),
            cell: Arc::new(Mutex::new(value)),
        }
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn get(&self) -> Value {
        self.cell.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Replaces the content. Values of a different kind are rejected.
    pub fn set(&self, value: Value) -> Result<(), Value> {
        if !value.fits(&self.kind) {
            return Err(value);
        }
        *self.cell.lock().unwrap_or_else(|e| e.into_inner()) = value;
        Ok(())
    }

    pub fn ptr_eq(&self, other: &Handle) -> bool {
        Arc::ptr_eq(&self.cell, &other.cell)
    }
}

impl PartialEq for Handle {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other)
    }
}

impl fmt::Debug for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "&{:?}", self.get())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, Value)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Record(Record),
    Tuple(Vec<Value>),
    Callable(Callable),
    Handle(Handle),
    /// Absent/none sentinel; fits every kind except unit.
    Absent,
}

impl Value {
    pub fn record<K, I, N>(kind: K, fields: I) -> Self
    where
        K: Into<String>,
        I: IntoIterator<Item = (N, Value)>,
        N: Into<String>,
    {
        Value::Record(Record {
            kind: kind.into(),
            fields: fields.into_iter().map(|(n, v)| (n.into(), v)).collect(),
        })
    }

    pub fn callable(f: impl Fn(&[Value]) -> Value + Send + Sync + 'static) -> Self {
        Value::Callable(Callable::new(f))
    }

    /// Kind tag. [`Value::Absent`] reports [`Kind::Unit`] but [`Value::fits`]
    /// treats it specially.
    pub fn kind(&self) -> Kind {
        match self {
            Value::Unit | Value::Absent => Kind::Unit,
            Value::Bool(_) => Kind::Bool,
            Value::Int(_) => Kind::Int,
            Value::Float(_) => Kind::Float,
            Value::Text(_) => Kind::Text,
            Value::Record(r) => Kind::Named(r.kind.clone()),
            Value::Tuple(items) => Kind::Tuple(items.iter().map(Value::kind).collect()),
            Value::Callable(_) => Kind::Callable,
            Value::Handle(h) => h.kind().clone(),
        }
    }

    /// Whether this value may be produced where `kind` is expected.
    pub fn fits(&self, kind: &Kind) -> bool {
        match self {
            Value::Absent => *kind != Kind::Unit,
            _ => self.kind() == *kind,
        }
    }

    /// Ordering for same-kind scalar values; `None` when the kinds differ,
    /// the kind is unordered, or a float comparison involves NaN.
    pub fn try_cmp(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a.partial_cmp(b),
            (Value::Int(a), Value::Int(b)) => a.partial_cmp(b),
            (Value::Float(a), Value::Float(b)) => a.partial_cmp(b),
            (Value::Text(a), Value::Text(b)) => a.partial_cmp(b),
            (Value::Unit, Value::Unit) => Some(Ordering::Equal),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_float(&self) -> Option<f64> {
        match self {
            Value::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => f.write_str("()"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Text(v) => write!(f, "{v:?}"),
            Value::Record(r) => {
                write!(f, "{} {{", r.kind)?;
                for (i, (name, v)) in r.fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, " {name}: {v}")?;
                }
                f.write_str(" }")
            }
            Value::Tuple(items) => {
                f.write_str("(")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            Value::Callable(c) => write!(f, "{c:?}"),
            Value::Handle(h) => write!(f, "&{}", h.get()),
            Value::Absent => f.write_str("absent"),
        }
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v.into())
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v.into())
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<()> for Value {
    fn from(_: ()) -> Self {
        Value::Unit
    }
}

impl From<Handle> for Value {
    fn from(h: Handle) -> Self {
        Value::Handle(h)
    }
}

impl From<Callable> for Value {
    fn from(c: Callable) -> Self {
        Value::Callable(c)
    }
}
