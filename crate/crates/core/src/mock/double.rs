use std::cell::RefCell;
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use super::action::{apply_action, Action, ActionError};
use super::matcher::{all_match, render_args, render_matchers, Matcher, TuplePredicate};
use super::{Cardinality, DefaultValues, MockError};
use crate::assertions::Raised;
use crate::value::{Kind, Value};

/// Signature of one mocked method. `returns` is [`Kind::Unit`] for void.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDescriptor {
    pub name: String,
    pub params: Vec<Kind>,
    pub returns: Kind,
}

impl MethodDescriptor {
    pub fn new(name: impl Into<String>, params: Vec<Kind>, returns: Kind) -> Self {
        MethodDescriptor {
            name: name.into(),
            params,
            returns,
        }
    }
}

/// Declaration index of an expectation, unique within one double.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpectationId(pub usize);

impl fmt::Display for ExpectationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SequenceId(pub usize);

/// How a call was classified.
#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Matched(ExpectationId),
    /// Selected expectation was already saturated; its count did not move.
    OverSaturated(ExpectationId),
    /// The method has expectations but none accepted the call, or the call
    /// itself was malformed.
    Unexpected,
    /// The method has no expectations at all.
    Uninteresting,
}

/// Where the produced value came from.
#[derive(Debug, Clone, PartialEq)]
pub enum BehaviorSource {
    OnceAction(ExpectationId),
    RepeatedAction(ExpectationId),
    /// Index of the `bind_default` binding, in binding order.
    DefaultBinding(usize),
    KindDefault,
    BuiltinZero,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetireCause {
    Saturated,
    /// A later member of a shared sequence matched.
    Sequence,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MockEvent {
    Call {
        method: String,
        args: Vec<Value>,
        resolution: Resolution,
        source: BehaviorSource,
        result: Result<Value, Raised>,
    },
    Retired {
        expectation: ExpectationId,
        cause: RetireCause,
    },
}

/// Why an expectation did not accept a call.
#[derive(Debug, Clone, PartialEq)]
pub enum Mismatch {
    Retired,
    Argument(usize),
    Tuple,
    Prerequisite(ExpectationId),
    Sequence(ExpectationId),
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Retired => f.write_str("retired"),
            Mismatch::Argument(i) => write!(f, "argument {i} does not match"),
            Mismatch::Tuple => f.write_str("argument tuple does not match"),
            Mismatch::Prerequisite(id) => write!(f, "prerequisite {id} not yet satisfied"),
            Mismatch::Sequence(id) => write!(f, "earlier sequence member {id} not yet satisfied"),
        }
    }
}

/// Failures detected during dispatch. Reported against the owning test.
#[derive(Debug, Clone, PartialEq)]
pub enum MockFailure {
    Unexpected {
        method: String,
        args: Vec<Value>,
        nearest: Option<(ExpectationId, String, Mismatch)>,
    },
    OverSaturated {
        method: String,
        args: Vec<Value>,
        expectation: ExpectationId,
        cardinality: Cardinality,
    },
    NoBehaviorDefined {
        method: String,
        returns: Kind,
    },
    UnknownMethod(String),
    BadArguments {
        method: String,
        args: Vec<Value>,
    },
    BadReturn {
        method: String,
        expected: Kind,
        got: Value,
    },
    ActionFailed {
        method: String,
        error: ActionError,
    },
}

impl fmt::Display for MockFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MockFailure::Unexpected { method, args, nearest } => {
                write!(f, "unexpected call {method}({})", render_args(args))?;
                match nearest {
                    Some((id, decl, why)) => write!(f, "; nearest expectation {id} {decl}: {why}"),
                    None => Ok(()),
                }
            }
            MockFailure::OverSaturated {
                method,
                args,
                expectation,
                cardinality,
            } => write!(
                f,
                "call {method}({}) over-saturates expectation {expectation} (expected {cardinality})",
                render_args(args)
            ),
            MockFailure::NoBehaviorDefined { method, returns } => {
                write!(f, "no behavior defined for {method} returning {returns}")
            }
            MockFailure::UnknownMethod(m) => write!(f, "call to unknown method {m}"),
            MockFailure::BadArguments { method, args } => {
                write!(f, "arguments ({}) do not fit the signature of {method}", render_args(args))
            }
            MockFailure::BadReturn { method, expected, got } => {
                write!(f, "{method} produced {got}, expected a value of kind {expected}")
            }
            MockFailure::ActionFailed { method, error } => write!(f, "action for {method} failed: {error}"),
        }
    }
}

/// An expectation whose lower bound was not reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub expectation: ExpectationId,
    pub declaration: String,
    pub cardinality: Cardinality,
    pub calls: u32,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expectation {} {} expected to be called {}, actually called {} time(s)",
            self.expectation, self.declaration, self.cardinality, self.calls
        )
    }
}

struct Expectation {
    method: usize,
    matchers: Vec<Matcher>,
    tuple: Option<TuplePredicate>,
    cardinality: Cardinality,
    sequences: Vec<SequenceId>,
    prerequisites: Vec<ExpectationId>,
    once: VecDeque<Action>,
    repeated: Option<Action>,
    retires_on_saturation: bool,
    calls: u32,
    retired: bool,
}

struct Binding {
    method: usize,
    matchers: Vec<Matcher>,
    action: Action,
}

#[derive(Default)]
struct State {
    expectations: Vec<Expectation>,
    bindings: Vec<Binding>,
    sequences: Vec<Vec<ExpectationId>>,
    events: Vec<MockEvent>,
    failures: Vec<MockFailure>,
    warnings: Vec<String>,
}

enum Behavior {
    Run(Action, BehaviorSource),
    Produce(Value, BehaviorSource),
    Missing,
}

/// A programmable stand-in for a dependency.
///
/// Code under test reaches the double through [`MockDouble::dispatch`];
/// the test programs it with [`bind_default`](MockDouble::bind_default)
/// and [`expect`](MockDouble::expect).
pub struct MockDouble {
    methods: Vec<MethodDescriptor>,
    defaults: Rc<RefCell<DefaultValues>>,
    state: RefCell<State>,
}

impl fmt::Debug for MockDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MockDouble")
            .field("methods", &self.methods)
            .finish_non_exhaustive()
    }
}

impl MockDouble {
    /// A double with its own kind-default table.
    pub fn new(methods: Vec<MethodDescriptor>) -> Result<Self, MockError> {
        Self::with_defaults(methods, Rc::default())
    }

    pub fn with_defaults(
        methods: Vec<MethodDescriptor>,
        defaults: Rc<RefCell<DefaultValues>>,
    ) -> Result<Self, MockError> {
        let mut seen = HashSet::new();
        for m in &methods {
            if !seen.insert(m.name.as_str()) {
                return Err(MockError::DuplicateMethod(m.name.clone()));
            }
        }
        Ok(MockDouble {
            methods,
            defaults,
            state: RefCell::default(),
        })
    }

    pub fn methods(&self) -> &[MethodDescriptor] {
        &self.methods
    }

    fn method_index(&self, name: &str) -> Result<usize, MockError> {
        self.methods
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| MockError::UnknownMethod(name.to_owned()))
    }

    fn check_arity(&self, method: usize, matchers: &[Matcher]) -> Result<(), MockError> {
        let m = &self.methods[method];
        if m.params.len() != matchers.len() {
            return Err(MockError::ArityMismatch {
                method: m.name.clone(),
                expected: m.params.len(),
                got: matchers.len(),
            });
        }
        Ok(())
    }

    fn check_action(&self, method: usize, action: &Action) -> Result<(), MockError> {
        action
            .check(&self.methods[method])
            .map_err(|error| MockError::BadAction {
                method: self.methods[method].name.clone(),
                error,
            })
    }

    pub fn set_kind_default(&self, kind: Kind, value: Value) -> Result<(), MockError> {
        self.defaults.borrow_mut().set(kind, value)
    }

    pub fn clear_kind_default(&self, kind: &Kind) {
        self.defaults.borrow_mut().clear(kind);
    }

    /// Default behavior for calls no expectation supplies an action for
    /// (`ON_CALL`). The newest matching binding wins.
    pub fn bind_default(
        &self,
        method: &str,
        matchers: impl IntoIterator<Item = Matcher>,
        action: Action,
    ) -> Result<(), MockError> {
        let index = self.method_index(method)?;
        let matchers: Vec<Matcher> = matchers.into_iter().collect();
        self.check_arity(index, &matchers)?;
        self.check_action(index, &action)?;
        self.state.borrow_mut().bindings.push(Binding {
            method: index,
            matchers,
            action,
        });
        Ok(())
    }

    /// Starts declaring an expectation; nothing is recorded until
    /// [`ExpectationBuilder::finish`].
    pub fn expect(
        &self,
        method: &str,
        matchers: impl IntoIterator<Item = Matcher>,
    ) -> ExpectationBuilder<'_> {
        let matchers: Vec<Matcher> = matchers.into_iter().collect();
        let (method, error) = match self.method_index(method) {
            Ok(i) => (i, self.check_arity(i, &matchers).err()),
            Err(e) => (0, Some(e)),
        };
        ExpectationBuilder {
            double: self,
            method,
            matchers,
            tuple: None,
            cardinality: None,
            sequences: Vec::new(),
            prerequisites: Vec::new(),
            once: VecDeque::new(),
            repeated: None,
            retires_on_saturation: false,
            error,
        }
    }

    pub fn new_sequence(&self) -> SequenceId {
        let mut state = self.state.borrow_mut();
        state.sequences.push(Vec::new());
        SequenceId(state.sequences.len() - 1)
    }

    fn describe(&self, e: &Expectation) -> String {
        format!(
            "{}({})",
            self.methods[e.method].name,
            render_matchers(&e.matchers)
        )
    }

    /// Routes one call through the expectation and default machinery.
    ///
    /// `Err` means the chosen action raised, or no behavior could be found;
    /// every problem is also recorded as a [`MockFailure`].
    pub fn dispatch(&self, method: &str, args: &[Value]) -> Result<Value, Raised> {
        let Ok(index) = self.method_index(method) else {
            let failure = MockFailure::UnknownMethod(method.to_owned());
            return self.reject(method, args, failure);
        };
        let descriptor = &self.methods[index];
        let fits = descriptor.params.len() == args.len()
            && args.iter().zip(&descriptor.params).all(|(a, k)| a.fits(k));
        if !fits {
            let failure = MockFailure::BadArguments {
                method: method.to_owned(),
                args: args.to_vec(),
            };
            return self.reject(method, args, failure);
        }

        let (resolution, behavior, retired) = self.resolve(index, args);
        let result = match behavior {
            Behavior::Run(action, source) => (self.run_action(index, &action, args), source),
            Behavior::Produce(value, source) => (Ok(value), source),
            Behavior::Missing => {
                let returns = descriptor.returns.clone();
                let message = format!("no behavior defined for {method} returning {returns}");
                self.state
                    .borrow_mut()
                    .failures
                    .push(MockFailure::NoBehaviorDefined {
                        method: method.to_owned(),
                        returns,
                    });
                (
                    Err(Raised::new("NoBehaviorDefined", message)),
                    BehaviorSource::Undefined,
                )
            }
        };
        let (result, source) = result;

        let mut state = self.state.borrow_mut();
        state.events.push(MockEvent::Call {
            method: method.to_owned(),
            args: args.to_vec(),
            resolution,
            source,
            result: result.clone(),
        });
        state.events.extend(retired);
        result
    }

    fn reject(&self, method: &str, args: &[Value], failure: MockFailure) -> Result<Value, Raised> {
        let raised = Raised::new("BadCall", failure.to_string());
        let mut state = self.state.borrow_mut();
        state.failures.push(failure);
        state.events.push(MockEvent::Call {
            method: method.to_owned(),
            args: args.to_vec(),
            resolution: Resolution::Unexpected,
            source: BehaviorSource::Undefined,
            result: Err(raised.clone()),
        });
        Err(raised)
    }

    fn run_action(&self, method: usize, action: &Action, args: &[Value]) -> Result<Value, Raised> {
        let name = &self.methods[method].name;
        match apply_action(action, args) {
            Ok(value) => {
                let expected = &self.methods[method].returns;
                if !value.fits(expected) {
                    self.state
                        .borrow_mut()
                        .failures
                        .push(MockFailure::BadReturn {
                            method: name.clone(),
                            expected: expected.clone(),
                            got: value.clone(),
                        });
                }
                Ok(value)
            }
            Err(ActionError::Raised(raised)) => Err(raised),
            Err(error) => {
                let raised = Raised::new("ActionFailed", error.to_string());
                self.state
                    .borrow_mut()
                    .failures
                    .push(MockFailure::ActionFailed {
                        method: name.clone(),
                        error,
                    });
                Err(raised)
            }
        }
    }

    fn gate(&self, state: &State, id: ExpectationId, args: &[Value]) -> Result<(), Mismatch> {
        let e = &state.expectations[id.0];
        if e.retired {
            return Err(Mismatch::Retired);
        }
        if let Some(i) = e.matchers.iter().zip(args).position(|(m, a)| !m.matches(a)) {
            return Err(Mismatch::Argument(i));
        }
        if e.tuple.as_ref().is_some_and(|t| !t(args)) {
            return Err(Mismatch::Tuple);
        }
        for &pre in &e.prerequisites {
            let p = &state.expectations[pre.0];
            if !p.cardinality.is_satisfied_by(p.calls) {
                return Err(Mismatch::Prerequisite(pre));
            }
        }
        for seq in &e.sequences {
            for &earlier in state.sequences[seq.0].iter().take_while(|&&m| m != id) {
                let p = &state.expectations[earlier.0];
                if !p.cardinality.is_satisfied_by(p.calls) {
                    return Err(Mismatch::Sequence(earlier));
                }
            }
        }
        Ok(())
    }

    fn resolve(&self, method: usize, args: &[Value]) -> (Resolution, Behavior, Vec<MockEvent>) {
        let mut state = self.state.borrow_mut();
        let own: Vec<ExpectationId> = (0..state.expectations.len())
            .rev()
            .map(ExpectationId)
            .filter(|id| state.expectations[id.0].method == method)
            .collect();
        let name = &self.methods[method].name;

        if own.is_empty() {
            state
                .warnings
                .push(format!("uninteresting call {name}({})", render_args(args)));
            let behavior = self.default_chain(&state, method, args);
            return (Resolution::Uninteresting, behavior, Vec::new());
        }

        let Some(selected) = own
            .iter()
            .copied()
            .find(|&id| self.gate(&state, id, args).is_ok())
        else {
            let nearest = own
                .iter()
                .map(|&id| {
                    let e = &state.expectations[id.0];
                    let score = e
                        .matchers
                        .iter()
                        .zip(args)
                        .filter(|(m, a)| m.matches(a))
                        .count();
                    (score, id)
                })
                .max_by_key(|&(score, id)| (score, id))
                .map(|(_, id)| {
                    let why = self.gate(&state, id, args).unwrap_err();
                    (id, self.describe(&state.expectations[id.0]), why)
                });
            state.failures.push(MockFailure::Unexpected {
                method: name.clone(),
                args: args.to_vec(),
                nearest,
            });
            let behavior = self.default_chain(&state, method, args);
            return (Resolution::Unexpected, behavior, Vec::new());
        };

        let e = &state.expectations[selected.0];
        if e.cardinality.is_saturated_by(e.calls) {
            let cardinality = e.cardinality;
            state.failures.push(MockFailure::OverSaturated {
                method: name.clone(),
                args: args.to_vec(),
                expectation: selected,
                cardinality,
            });
            let behavior = self.default_chain(&state, method, args);
            return (Resolution::OverSaturated(selected), behavior, Vec::new());
        }

        let mut retired = Vec::new();
        let e = &mut state.expectations[selected.0];
        e.calls += 1;
        if e.retires_on_saturation && e.cardinality.is_saturated_by(e.calls) {
            e.retired = true;
            retired.push(MockEvent::Retired {
                expectation: selected,
                cause: RetireCause::Saturated,
            });
        }
        let behavior = if let Some(action) = e.once.pop_front() {
            Behavior::Run(action, BehaviorSource::OnceAction(selected))
        } else if let Some(action) = e.repeated.clone() {
            Behavior::Run(action, BehaviorSource::RepeatedAction(selected))
        } else {
            self.default_chain(&state, method, args)
        };

        let sequences = state.expectations[selected.0].sequences.clone();
        for seq in sequences {
            let earlier: Vec<ExpectationId> = state.sequences[seq.0]
                .iter()
                .copied()
                .take_while(|&m| m != selected)
                .collect();
            for id in earlier {
                let p = &mut state.expectations[id.0];
                if !p.retired {
                    p.retired = true;
                    retired.push(MockEvent::Retired {
                        expectation: id,
                        cause: RetireCause::Sequence,
                    });
                }
            }
        }
        (Resolution::Matched(selected), behavior, retired)
    }

    fn default_chain(&self, state: &State, method: usize, args: &[Value]) -> Behavior {
        if let Some((i, b)) = state
            .bindings
            .iter()
            .enumerate()
            .rev()
            .find(|(_, b)| b.method == method && all_match(&b.matchers, args))
        {
            return Behavior::Run(b.action.clone(), BehaviorSource::DefaultBinding(i));
        }
        let returns = &self.methods[method].returns;
        if let Some(v) = self.defaults.borrow().get(returns) {
            return Behavior::Produce(v.clone(), BehaviorSource::KindDefault);
        }
        match returns.builtin_default() {
            Some(v) => Behavior::Produce(v, BehaviorSource::BuiltinZero),
            None => Behavior::Missing,
        }
    }

    /// Expectations whose lower bound has not been reached. Read-only.
    pub fn verify(&self) -> Vec<Violation> {
        let state = self.state.borrow();
        state
            .expectations
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.cardinality.is_satisfied_by(e.calls))
            .map(|(i, e)| Violation {
                expectation: ExpectationId(i),
                declaration: self.describe(e),
                cardinality: e.cardinality,
                calls: e.calls,
            })
            .collect()
    }

    pub fn events(&self) -> Vec<MockEvent> {
        self.state.borrow().events.clone()
    }

    pub fn failures(&self) -> Vec<MockFailure> {
        self.state.borrow().failures.clone()
    }

    pub fn take_failures(&self) -> Vec<MockFailure> {
        std::mem::take(&mut self.state.borrow_mut().failures)
    }

    pub fn warnings(&self) -> Vec<String> {
        self.state.borrow().warnings.clone()
    }

    pub fn call_count(&self, id: ExpectationId) -> Option<u32> {
        self.state.borrow().expectations.get(id.0).map(|e| e.calls)
    }

    pub fn is_retired(&self, id: ExpectationId) -> Option<bool> {
        self.state
            .borrow()
            .expectations
            .get(id.0)
            .map(|e| e.retired)
    }

    pub fn cardinality(&self, id: ExpectationId) -> Option<Cardinality> {
        self.state
            .borrow()
            .expectations
            .get(id.0)
            .map(|e| e.cardinality)
    }
}

/// Collects clauses of one expectation (`EXPECT_CALL(...).Times(...)...`).
#[must_use = "an expectation is only recorded by finish()"]
pub struct ExpectationBuilder<'d> {
    double: &'d MockDouble,
    method: usize,
    matchers: Vec<Matcher>,
    tuple: Option<TuplePredicate>,
    cardinality: Option<Cardinality>,
    sequences: Vec<SequenceId>,
    prerequisites: Vec<ExpectationId>,
    once: VecDeque<Action>,
    repeated: Option<Action>,
    retires_on_saturation: bool,
    error: Option<MockError>,
}

impl ExpectationBuilder<'_> {
    fn fail(mut self, error: MockError) -> Self {
        self.error.get_or_insert(error);
        self
    }

    /// Whole-argument-tuple predicate (`.With(...)`).
    pub fn with_tuple(
        mut self,
        predicate: impl Fn(&[Value]) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.tuple = Some(std::sync::Arc::new(predicate));
        self
    }

    pub fn times(mut self, cardinality: Cardinality) -> Self {
        if self.cardinality.is_some() {
            return self.fail(MockError::BuilderMisuse("times given twice"));
        }
        if !cardinality.is_valid() {
            return self.fail(MockError::InvalidCardinality(cardinality));
        }
        self.cardinality = Some(cardinality);
        self
    }

    pub fn in_sequence(mut self, sequences: &[SequenceId]) -> Self {
        self.sequences.extend_from_slice(sequences);
        self
    }

    pub fn after(mut self, prerequisites: &[ExpectationId]) -> Self {
        self.prerequisites.extend_from_slice(prerequisites);
        self
    }

    pub fn will_once(mut self, action: Action) -> Self {
        if self.repeated.is_some() {
            return self.fail(MockError::BuilderMisuse("will_once after will_repeatedly"));
        }
        if self.error.is_none() {
            if let Err(e) = self.double.check_action(self.method, &action) {
                return self.fail(e);
            }
        }
        self.once.push_back(action);
        self
    }

    pub fn will_repeatedly(mut self, action: Action) -> Self {
        if self.repeated.is_some() {
            return self.fail(MockError::BuilderMisuse("will_repeatedly given twice"));
        }
        if self.error.is_none() {
            if let Err(e) = self.double.check_action(self.method, &action) {
                return self.fail(e);
            }
        }
        self.repeated = Some(action);
        self
    }

    pub fn retires_on_saturation(mut self) -> Self {
        self.retires_on_saturation = true;
        self
    }

    /// Records the expectation and returns its id. Without `times`, the
    /// cardinality is inferred from the actions: `k` once-actions give
    /// exactly `k` (or at least `k` with a repeated action), none give
    /// exactly one.
    pub fn finish(self) -> Result<ExpectationId, MockError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let mut state = self.double.state.borrow_mut();
        for &p in &self.prerequisites {
            if p.0 >= state.expectations.len() {
                return Err(MockError::UnknownExpectation(p));
            }
        }
        for &s in &self.sequences {
            if s.0 >= state.sequences.len() {
                return Err(MockError::UnknownSequence(s));
            }
        }
        let k = self.once.len() as u32;
        let cardinality = self
            .cardinality
            .unwrap_or(match (k, self.repeated.is_some()) {
                (_, true) => Cardinality::AtLeast(k),
                (0, false) => Cardinality::Exactly(1),
                (_, false) => Cardinality::Exactly(k),
            });
        let id = ExpectationId(state.expectations.len());
        for &s in &self.sequences {
            state.sequences[s.0].push(id);
        }
        state.expectations.push(Expectation {
            method: self.method,
            matchers: self.matchers,
            tuple: self.tuple,
            cardinality,
            sequences: self.sequences,
            prerequisites: self.prerequisites,
            once: self.once,
            repeated: self.repeated,
            retires_on_saturation: self.retires_on_saturation,
            calls: 0,
            retired: false,
        });
        Ok(id)
    }
}
