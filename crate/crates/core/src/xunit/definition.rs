use std::fmt;
use std::sync::Arc;

use super::{TestContext, TestId};

/// Fixture lifecycle. A fresh value is built for every test, `set_up` runs
/// before the body and `tear_down` after it, even when the body failed.
pub trait Fixture: 'static {
    fn set_up(&mut self, _ctx: &mut TestContext) {}
    fn tear_down(&mut self, _ctx: &mut TestContext) {}
}

/// Return types accepted from test bodies. `Err` counts as an uncaught error.
pub trait TestReturn {
    fn into_outcome(self) -> Result<(), String>;
}

impl TestReturn for () {
    fn into_outcome(self) -> Result<(), String> {
        Ok(())
    }
}

impl<E: fmt::Display> TestReturn for Result<(), E> {
    fn into_outcome(self) -> Result<(), String> {
        self.map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Plain,
    Fixture,
    ParameterizedInstance,
    Death,
}

/// One execution of a test: built fresh per run.
pub(crate) trait TestInstance {
    fn set_up(&mut self, ctx: &mut TestContext);
    fn run(&mut self, ctx: &mut TestContext) -> Result<(), String>;
    fn tear_down(&mut self, ctx: &mut TestContext);
}

type InstanceFactory = Arc<dyn Fn() -> Box<dyn TestInstance> + Send + Sync>;

/// A registered runnable unit.
#[derive(Clone)]
pub struct TestDefinition {
    id: TestId,
    kind: TestKind,
    has_hooks: bool,
    factory: InstanceFactory,
}

impl fmt::Debug for TestDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestDefinition")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("has_hooks", &self.has_hooks)
            .finish()
    }
}

struct Plain<B>(Arc<B>);

impl<B, R> TestInstance for Plain<B>
where
    B: Fn(&mut TestContext) -> R,
    R: TestReturn,
{
    fn set_up(&mut self, _ctx: &mut TestContext) {}

    fn run(&mut self, ctx: &mut TestContext) -> Result<(), String> {
        (self.0)(ctx).into_outcome()
    }

    fn tear_down(&mut self, _ctx: &mut TestContext) {}
}

struct WithFixture<F, B> {
    fixture: F,
    body: Arc<B>,
}

impl<F, B, R> TestInstance for WithFixture<F, B>
where
    F: Fixture,
    B: Fn(&mut F, &mut TestContext) -> R,
    R: TestReturn,
{
    fn set_up(&mut self, ctx: &mut TestContext) {
        self.fixture.set_up(ctx);
    }

    fn run(&mut self, ctx: &mut TestContext) -> Result<(), String> {
        (self.body)(&mut self.fixture, ctx).into_outcome()
    }

    fn tear_down(&mut self, ctx: &mut TestContext) {
        self.fixture.tear_down(ctx);
    }
}

impl TestDefinition {
    /// A test without fixture.
    pub fn new<B, R>(suite: impl Into<String>, name: impl Into<String>, body: B) -> Self
    where
        B: Fn(&mut TestContext) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        Self::plain_of_kind(TestId::new(suite, name), TestKind::Plain, body)
    }

    /// A test in a `*_DeathTest` style suite. Runs like a plain test; the
    /// kind only records intent.
    pub fn death<B, R>(suite: impl Into<String>, name: impl Into<String>, body: B) -> Self
    where
        B: Fn(&mut TestContext) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        Self::plain_of_kind(TestId::new(suite, name), TestKind::Death, body)
    }

    /// A fixture test; the fixture is built with `Default` for every run.
    pub fn with_fixture<F, B, R>(suite: impl Into<String>, name: impl Into<String>, body: B) -> Self
    where
        F: Fixture + Default,
        B: Fn(&mut F, &mut TestContext) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        Self::with_fixture_factory(suite, name, F::default, body)
    }

    /// A fixture test with an explicit fixture constructor.
    pub fn with_fixture_factory<F, M, B, R>(
        suite: impl Into<String>,
        name: impl Into<String>,
        make: M,
        body: B,
    ) -> Self
    where
        F: Fixture,
        M: Fn() -> F + Send + Sync + 'static,
        B: Fn(&mut F, &mut TestContext) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        Self::fixture_of_kind(TestId::new(suite, name), TestKind::Fixture, make, body)
    }

    pub(crate) fn plain_of_kind<B, R>(id: TestId, kind: TestKind, body: B) -> Self
    where
        B: Fn(&mut TestContext) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        let body = Arc::new(body);
        TestDefinition {
            id,
            kind,
            has_hooks: false,
            factory: Arc::new(move || Box::new(Plain(Arc::clone(&body))) as Box<dyn TestInstance>),
        }
    }

    pub(crate) fn fixture_of_kind<F, M, B, R>(id: TestId, kind: TestKind, make: M, body: B) -> Self
    where
        F: Fixture,
        M: Fn() -> F + Send + Sync + 'static,
        B: Fn(&mut F, &mut TestContext) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        let body = Arc::new(body);
        TestDefinition {
            id,
            kind,
            has_hooks: true,
            factory: Arc::new(move || {
                Box::new(WithFixture {
                    fixture: make(),
                    body: Arc::clone(&body),
                }) as Box<dyn TestInstance>
            }),
        }
    }

    pub fn id(&self) -> &TestId {
        &self.id
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    /// Whether this definition carries setup/teardown hooks.
    pub fn has_hooks(&self) -> bool {
        self.has_hooks
    }

    pub(crate) fn instantiate(&self) -> Box<dyn TestInstance> {
        (self.factory)()
    }
}
