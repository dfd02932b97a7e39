#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use testbed::assertions::{self, ErrorMode, Raised};
use testbed::deathtest::{ChildSpec, ExitPredicate, OutputMatcher};
use testbed::mock::{Action, Cardinality, Matcher, MethodDescriptor};
use testbed::params::{Instantiation, ParamGenerator, TemplateTest};
use testbed::{
    execute_test, expect_that, FailureEntry, Fixture, Kind, TestContext, TestDefinition,
    TestRegistry, TestStatus, Value,
};

/// Records a nonfatal failure with `message` unless `cond` holds.
pub fn check(ctx: &mut TestContext, cond: bool, message: impl FnOnce() -> String) -> bool {
    if !cond {
        ctx.record_failure(FailureEntry::nonfatal(message(), "check"));
    }
    cond
}

#[derive(Default)]
struct Stack {
    items: Vec<i64>,
    set_up_ran: bool,
}

impl Fixture for Stack {
    fn set_up(&mut self, _ctx: &mut TestContext) {
        self.items = vec![1, 2, 3];
        self.set_up_ran = true;
    }

    fn tear_down(&mut self, ctx: &mut TestContext) {
        expect_that!(ctx, assertions::is_true(self.set_up_ran));
    }
}

/// A dependency seam the code under test talks to.
struct Thermostat<'a> {
    sensor: &'a testbed::mock::MockDouble,
}

impl Thermostat<'_> {
    fn heating_needed(&self, target: i64) -> Result<bool, Raised> {
        let reading = self.sensor.dispatch("read", &[])?;
        Ok(reading.as_int().unwrap_or(i64::MAX) < target)
    }
}

/// Statements the self-hosted death tests re-invoke the executable on.
pub fn register_statements(reg: &mut TestRegistry) {
    reg.register_death_statement("selfhost_exit3", || {
        eprintln!("fatal: exiting with 3");
        std::process::exit(3);
    })
    .unwrap();
    reg.register_death_statement("selfhost_panic", || panic!("invariant broken"))
        .unwrap();
}

/// The framework testing itself with its own runner.
pub fn register_dogfood(reg: &mut TestRegistry) {
    register_statements(reg);

    reg.register(TestDefinition::new(
        "SelfHostAssertions",
        "BinaryForms",
        |ctx| {
            expect_that!(ctx, assertions::eq(2 + 2, 4));
            expect_that!(ctx, assertions::ne("a", "b"));
            expect_that!(ctx, assertions::lt(1.5, 2.0));
            expect_that!(ctx, assertions::ge(3u8, 3u8));
            expect_that!(ctx, assertions::streq("abc", "abc"));
            expect_that!(ctx, assertions::strcaseeq("abc", "ABC"));
            expect_that!(ctx, assertions::near(1.0, 1.05, 0.1).into());
            expect_that!(ctx, assertions::double_eq(0.1 + 0.2, 0.3));
            expect_that!(ctx, assertions::float_eq(1.0f32, 1.0f32 + f32::EPSILON));
        },
    ))
    .unwrap();

    reg.register(TestDefinition::new(
        "SelfHostAssertions",
        "FailuresAreCaptured",
        |ctx| {
            let inner = TestDefinition::new("Inner", "Fails", |c| {
                expect_that!(c, assertions::eq(1, 2));
                testbed::assert_that!(c, assertions::is_true(false));
                c.record_failure(FailureEntry::nonfatal(
                    "ran past a fatal assertion",
                    "after",
                ));
            });
            let record = execute_test(&inner);
            expect_that!(ctx, assertions::eq(record.status, TestStatus::Failed));
            expect_that!(ctx, assertions::eq(record.failures.len(), 2));
            let msg = &record.failures[0].message;
            expect_that!(ctx, assertions::streq(msg, "expected EQ of 1 and 2"));
        },
    ))
    .unwrap();

    reg.register(TestDefinition::new(
        "SelfHostAssertions",
        "ErrorModes",
        |ctx| {
            let timeout = || Err::<(), _>(Raised::new("Timeout", "slow"));
            expect_that!(
                ctx,
                assertions::expect_error(timeout, ErrorMode::specific("Timeout"))
            );
            expect_that!(ctx, assertions::expect_error(timeout, ErrorMode::Any));
            expect_that!(
                ctx,
                assertions::expect_error(|| Ok::<_, Raised>(1), ErrorMode::None)
            );
            expect_that!(
                ctx,
                assertions::expect_panic(|| panic!("x"), ErrorMode::specific("panic"))
            );
        },
    ))
    .unwrap();

    reg.register(TestDefinition::new(
        "SelfHostAssertions",
        "ResultBody",
        |ctx| -> Result<(), String> {
            let n: i64 = "42"
                .parse()
                .map_err(|e: std::num::ParseIntError| e.to_string())?;
            expect_that!(ctx, assertions::eq(n, 42));
            Ok(())
        },
    ))
    .unwrap();

    reg.register(TestDefinition::with_fixture::<Stack, _, _>(
        "SelfHostFixture",
        "SeesSetUp",
        |fx, ctx| {
            expect_that!(ctx, assertions::eq(fx.items.len(), 3));
            fx.items.push(4);
        },
    ))
    .unwrap();

    reg.register(TestDefinition::with_fixture::<Stack, _, _>(
        "SelfHostFixture",
        "FreshInstance",
        |fx, ctx| {
            expect_that!(ctx, assertions::eq(fx.items.clone(), vec![1, 2, 3]));
        },
    ))
    .unwrap();

    reg.register(TestDefinition::new(
        "SelfHostFixture",
        "TeardownAfterFatalSetUp",
        |ctx| {
            struct Broken(Arc<AtomicUsize>);
            impl Fixture for Broken {
                fn set_up(&mut self, ctx: &mut TestContext) {
                    testbed::assert_that!(ctx, assertions::is_true(false));
                }
                fn tear_down(&mut self, _ctx: &mut TestContext) {
                    self.0.fetch_add(1, Ordering::SeqCst);
                }
            }
            let torn_down = Arc::new(AtomicUsize::new(0));
            let counter = Arc::clone(&torn_down);
            let body_ran = Arc::new(AtomicUsize::new(0));
            let b = Arc::clone(&body_ran);
            let def = TestDefinition::with_fixture_factory(
                "Inner",
                "Broken",
                move || Broken(Arc::clone(&counter)),
                move |_, _| {
                    b.fetch_add(1, Ordering::SeqCst);
                },
            );
            let record = execute_test(&def);
            expect_that!(ctx, assertions::eq(record.status, TestStatus::Failed));
            expect_that!(ctx, assertions::eq(torn_down.load(Ordering::SeqCst), 1));
            expect_that!(ctx, assertions::eq(body_ran.load(Ordering::SeqCst), 0));
        },
    ))
    .unwrap();

    reg.register(TestDefinition::new(
        "SelfHostFixture",
        "SkipIsNotFailure",
        |ctx| {
            let record = execute_test(&TestDefinition::new("Inner", "Skips", |c| {
                c.skip("not today")
            }));
            expect_that!(ctx, assertions::eq(record.status, TestStatus::Skipped));
        },
    ))
    .unwrap();

    let inst = Instantiation::new("Small", "SelfHostParams", &ParamGenerator::range(0, 5)).unwrap();
    reg.register_instantiation(
        &inst,
        &[TemplateTest::new(
            "NonNegative",
            |ctx: &mut TestContext, v: &Value| {
                expect_that!(ctx, assertions::ge(v.as_int().unwrap(), 0));
            },
        )],
    )
    .unwrap();

    let grid = ParamGenerator::combine(vec![
        ParamGenerator::bool(),
        ParamGenerator::values(["x", "yy"]),
    ]);
    let inst = Instantiation::new("Grid", "SelfHostParams", &grid)
        .unwrap()
        .with_display_name(|i, v| {
            let t = v.as_tuple().unwrap();
            format!("{}_{}_{i}", t[0], t[1])
        });
    reg.register_instantiation(
        &inst,
        &[TemplateTest::new(
            "TupleShape",
            |ctx: &mut TestContext, v: &Value| {
                expect_that!(
                    ctx,
                    assertions::eq(v.as_tuple().map(<[Value]>::len), Some(2))
                );
            },
        )],
    )
    .unwrap();

    reg.register(TestDefinition::death(
        "SelfHost_DeathTest",
        "ExitCode",
        |ctx| {
            let spec = ChildSpec::statement("selfhost_exit3");
            ctx.expect_exit(
                &spec,
                ExitPredicate::ExitedWithCode(3),
                &OutputMatcher::substring("exiting"),
                "exit3",
            );
            ctx.expect_death(
                &spec,
                &OutputMatcher::regex("^fatal:").unwrap(),
                "exit3 regex",
            );
        },
    ))
    .unwrap();

    reg.register(TestDefinition::death(
        "SelfHost_DeathTest",
        "Panic",
        |ctx| {
            let spec = ChildSpec::statement("selfhost_panic");
            ctx.expect_death(
                &spec,
                &OutputMatcher::substring("invariant broken"),
                "panic",
            );
        },
    ))
    .unwrap();

    reg.register(TestDefinition::new("SelfHostMock", "Thermostat", |ctx| {
        let sensor = ctx
            .make_double(vec![MethodDescriptor::new("read", vec![], Kind::Int)])
            .unwrap();
        sensor
            .expect("read", [])
            .will_once(Action::ret(15))
            .will_once(Action::ret(25))
            .finish()
            .unwrap();
        let thermostat = Thermostat { sensor: &sensor };
        expect_that!(ctx, assertions::eq(thermostat.heating_needed(20), Ok(true)));
        expect_that!(
            ctx,
            assertions::eq(thermostat.heating_needed(20), Ok(false))
        );
    }))
    .unwrap();

    reg.register(TestDefinition::new(
        "SelfHostMock",
        "UnmetExpectationFailsOwner",
        |ctx| {
            let inner = TestDefinition::new("Inner", "Unmet", |c| {
                let d = c
                    .make_double(vec![MethodDescriptor::new("ping", vec![], Kind::Unit)])
                    .unwrap();
                d.expect("ping", [])
                    .times(Cardinality::AtLeast(1))
                    .finish()
                    .unwrap();
            });
            let record = execute_test(&inner);
            expect_that!(ctx, assertions::eq(record.status, TestStatus::Failed));
            let locations: Vec<&str> = record
                .failures
                .iter()
                .map(|f| f.location.as_str())
                .collect();
            expect_that!(ctx, assertions::eq(locations, vec!["mock verify"]));
        },
    ))
    .unwrap();

    reg.register(TestDefinition::new("SelfHostMock", "SpyCallback", |ctx| {
        let d = ctx
            .make_double(vec![MethodDescriptor::new(
                "subscribe",
                vec![Kind::Text, Kind::Callable],
                Kind::Int,
            )])
            .unwrap();
        d.expect("subscribe", [Matcher::eq("temp"), Matcher::Any])
            .will_once(Action::InvokeArgument(1, vec![Value::Int(21)]))
            .finish()
            .unwrap();
        let seen = Arc::new(std::sync::Mutex::new(Vec::new()));
        let s = Arc::clone(&seen);
        let callback = Value::callable(move |args| {
            s.lock().unwrap().push(args[0].clone());
            Value::Int(1)
        });
        let out = d.dispatch("subscribe", &["temp".into(), callback]);
        expect_that!(ctx, assertions::eq(out, Ok(Value::Int(1))));
        expect_that!(
            ctx,
            assertions::eq(seen.lock().unwrap().clone(), vec![Value::Int(21)])
        );
    }))
    .unwrap();
}
