//! Value-parameterized tests.
//!
//! A [`ParamGenerator`] describes a finite, ordered sequence of values. An
//! [`Instantiation`] binds a generator to a template suite; every template
//! test is then registered once per value, named
//! `<prefix>/<suite>.<test>/<index>`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::value::Value;
use crate::xunit::{
    validate_component, Fixture, RegistryError, TestContext, TestDefinition, TestId, TestKind,
    TestReturn,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("combine needs at least one generator")]
    EmptyCombine,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamGenerator {
    /// `begin, begin+step, ...` strictly before `end`.
    IntRange {
        begin: i64,
        end: i64,
        step: i64,
    },
    FloatRange {
        begin: f64,
        end: f64,
        step: f64,
    },
    Values(Vec<Value>),
    ValuesIn(Vec<Value>),
    Bool,
    /// Cartesian product; the last generator varies fastest.
    Combine(Vec<ParamGenerator>),
}

impl ParamGenerator {
    /// Integer range with step 1.
    pub fn range(begin: i64, end: i64) -> Self {
        Self::range_step(begin, end, 1)
    }

    pub fn range_step(begin: i64, end: i64, step: i64) -> Self {
        ParamGenerator::IntRange { begin, end, step }
    }

    pub fn float_range(begin: f64, end: f64, step: f64) -> Self {
        ParamGenerator::FloatRange { begin, end, step }
    }

    pub fn values<I, V>(values: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<Value>,
    {
        ParamGenerator::Values(values.into_iter().map(Into::into).collect())
    }

    /// Values taken from any container or iterator range.
    pub fn values_in<I, V>(container: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<Value>,
    {
        ParamGenerator::ValuesIn(container.into_iter().map(Into::into).collect())
    }

    pub fn bool() -> Self {
        ParamGenerator::Bool
    }

    pub fn combine(generators: Vec<ParamGenerator>) -> Self {
        ParamGenerator::Combine(generators)
    }

    /// The full value sequence. Combine yields [`Value::Tuple`]s.
    pub fn materialize(&self) -> Result<Vec<Value>, ParamError> {
        match self {
            ParamGenerator::IntRange { begin, end, step } => int_range(*begin, *end, *step),
            ParamGenerator::FloatRange { begin, end, step } => float_range(*begin, *end, *step),
            ParamGenerator::Values(v) | ParamGenerator::ValuesIn(v) => Ok(v.clone()),
            ParamGenerator::Bool => Ok(vec![Value::Bool(false), Value::Bool(true)]),
            ParamGenerator::Combine(children) => {
                if children.is_empty() {
                    return Err(ParamError::EmptyCombine);
                }
                let columns = children
                    .iter()
                    .map(ParamGenerator::materialize)
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(cartesian(&columns))
            }
        }
    }
}

fn check_direction(
    span_sign: i8,
    step_sign: i8,
    describe: impl fmt::Display,
) -> Result<(), ParamError> {
    if step_sign == 0 {
        return Err(ParamError::InvalidRange(format!(
            "{describe}: step is zero"
        )));
    }
    if span_sign != 0 && span_sign != step_sign {
        return Err(ParamError::InvalidRange(format!(
            "{describe}: step points away from end"
        )));
    }
    Ok(())
}

fn int_range(begin: i64, end: i64, step: i64) -> Result<Vec<Value>, ParamError> {
    let describe = format!("range({begin}, {end}, {step})");
    check_direction(
        (end as i128 - begin as i128).signum() as i8,
        step.signum() as i8,
        &describe,
    )?;
    let span = end as i128 - begin as i128;
    let step = step as i128;
    // ceil(span / step) for same-sign operands
    let count = if span == 0 {
        0
    } else {
        (span + step - step.signum()) / step
    };
    Ok((0..count)
        .map(|k| Value::Int((begin as i128 + k * step) as i64))
        .collect())
}

fn float_range(begin: f64, end: f64, step: f64) -> Result<Vec<Value>, ParamError> {
    let describe = format!("range({begin:?}, {end:?}, {step:?})");
    if !(begin.is_finite() && end.is_finite() && step.is_finite()) {
        return Err(ParamError::InvalidRange(format!(
            "{describe}: bounds must be finite"
        )));
    }
    let sign = |x: f64| {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };
    check_direction(sign(end - begin), sign(step), &describe)?;
    let before_end = |v: f64| if step > 0.0 { v < end } else { v > end };
    let mut out = Vec::new();
    let mut v = begin;
    while before_end(v) {
        out.push(Value::Float(v));
        let next = v + step;
        if next == v {
            return Err(ParamError::InvalidRange(format!(
                "{describe}: step too small to advance past {v:?}"
            )));
        }
        v = next;
    }
    Ok(out)
}

fn cartesian(columns: &[Vec<Value>]) -> Vec<Value> {
    let total: usize = columns.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut odometer = vec![0usize; columns.len()];
    loop {
        out.push(Value::Tuple(
            odometer
                .iter()
                .zip(columns)
                .map(|(&i, col)| col[i].clone())
                .collect(),
        ));
        // advance the last wheel first
        let mut wheel = columns.len();
        loop {
            if wheel == 0 {
                return out;
            }
            wheel -= 1;
            odometer[wheel] += 1;
            if odometer[wheel] < columns[wheel].len() {
                break;
            }
            odometer[wheel] = 0;
        }
    }
}

pub type DisplayNameFn = Arc<dyn Fn(usize, &Value) -> String + Send + Sync>;

/// A parameterized suite bound to a generator under a prefix.
#[derive(Clone)]
pub struct Instantiation {
    prefix: String,
    template_suite: String,
    values: Vec<Value>,
    display_name: Option<DisplayNameFn>,
}

impl fmt::Debug for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instantiation")
            .field("prefix", &self.prefix)
            .field("template_suite", &self.template_suite)
            .field("values", &self.values)
            .finish_non_exhaustive()
    }
}

impl Instantiation {
    /// Materializes the generator up front.
    pub fn new(
        prefix: impl Into<String>,
        template_suite: impl Into<String>,
        generator: &ParamGenerator,
    ) -> Result<Self, ParamError> {
        Ok(Instantiation {
            prefix: prefix.into(),
            template_suite: template_suite.into(),
            values: generator.materialize()?,
            display_name: None,
        })
    }

    /// Replaces the numeric index suffix with a custom name per value.
    pub fn with_display_name(
        mut self,
        f: impl Fn(usize, &Value) -> String + Send + Sync + 'static,
    ) -> Self {
        self.display_name = Some(Arc::new(f));
        self
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn template_suite(&self) -> &str {
        &self.template_suite
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }
}

type InstanceBuilder = Arc<dyn Fn(TestId, Value) -> TestDefinition + Send + Sync>;

/// A test body written once against a parameter.
#[derive(Clone)]
pub struct TemplateTest {
    name: String,
    build: InstanceBuilder,
}

impl fmt::Debug for TemplateTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TemplateTest")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl TemplateTest {
    pub fn new<B, R>(name: impl Into<String>, body: B) -> Self
    where
        B: Fn(&mut TestContext, &Value) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        let body = Arc::new(body);
        TemplateTest {
            name: name.into(),
            build: Arc::new(move |id, value| {
                let body = Arc::clone(&body);
                TestDefinition::plain_of_kind(id, TestKind::ParameterizedInstance, move |ctx| {
                    body(ctx, &value)
                })
            }),
        }
    }

    /// Template with a fixture built by `Default` for every instance run.
    pub fn with_fixture<F, B, R>(name: impl Into<String>, body: B) -> Self
    where
        F: Fixture + Default,
        B: Fn(&mut F, &mut TestContext, &Value) -> R + Send + Sync + 'static,
        R: TestReturn + 'static,
    {
        let body = Arc::new(body);
        TemplateTest {
            name: name.into(),
            build: Arc::new(move |id, value| {
                let body = Arc::clone(&body);
                TestDefinition::fixture_of_kind(
                    id,
                    TestKind::ParameterizedInstance,
                    F::default,
                    move |fx, ctx| body(fx, ctx, &value),
                )
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// One definition per (template test, value), test-major: every value of
/// the first template, then the second, and so on.
pub fn instantiate_parameterized(
    inst: &Instantiation,
    templates: &[TemplateTest],
) -> Result<Vec<TestDefinition>, RegistryError> {
    validate_component(&inst.prefix)?;
    validate_component(&inst.template_suite)?;
    let suite = format!("{}/{}", inst.prefix, inst.template_suite);
    let mut defs = Vec::with_capacity(templates.len() * inst.values.len());
    for template in templates {
        validate_component(&template.name)?;
        for (index, value) in inst.values.iter().enumerate() {
            let suffix = match &inst.display_name {
                Some(f) => f(index, value),
                None => index.to_string(),
            };
            let id = TestId::new(suite.clone(), format!("{}/{suffix}", template.name));
            id.validate()?;
            defs.push((template.build)(id, value.clone()));
        }
    }
    Ok(defs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xunit::{execute_test, TestStatus};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Value> {
        v.iter().map(|&i| Value::Int(i)).collect()
    }

    #[test]
    fn range_excludes_end() {
        assert_eq!(
            ParamGenerator::range(0, 3).materialize().unwrap(),
            ints(&[0, 1, 2])
        );
        assert_eq!(
            ParamGenerator::range_step(0, 10, 4).materialize().unwrap(),
            ints(&[0, 4, 8])
        );
        assert_eq!(
            ParamGenerator::range_step(3, 0, -2).materialize().unwrap(),
            ints(&[3, 1])
        );
    }

    #[test]
    fn empty_range() {
        assert!(ParamGenerator::range(1, 1)
            .materialize()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn invalid_ranges() {
        assert!(matches!(
            ParamGenerator::range_step(0, 3, 0).materialize(),
            Err(ParamError::InvalidRange(_))
        ));
        assert!(matches!(
            ParamGenerator::range_step(0, 3, -1).materialize(),
            Err(ParamError::InvalidRange(_))
        ));
        assert!(ParamGenerator::float_range(0.0, f64::NAN, 0.5)
            .materialize()
            .is_err());
        assert_eq!(
            ParamGenerator::combine(vec![]).materialize(),
            Err(ParamError::EmptyCombine)
        );
    }

    #[test]
    fn float_range_accumulates() {
        let got = ParamGenerator::float_range(0.0, 1.0, 0.25)
            .materialize()
            .unwrap();
        assert_eq!(
            got,
            vec![0.0, 0.25, 0.5, 0.75]
                .into_iter()
                .map(Value::Float)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn combine_last_fastest() {
        let got =
            ParamGenerator::combine(vec![ParamGenerator::values([1, 2]), ParamGenerator::bool()])
                .materialize()
                .unwrap();
        let expected: Vec<Value> = [(1, false), (1, true), (2, false), (2, true)]
            .into_iter()
            .map(|(i, b)| Value::Tuple(vec![Value::Int(i), Value::Bool(b)]))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn combine_with_empty_child_is_empty() {
        let got =
            ParamGenerator::combine(vec![ParamGenerator::bool(), ParamGenerator::range(0, 0)])
                .materialize()
                .unwrap();
        assert!(got.is_empty());
    }

    fn names(defs: &[TestDefinition]) -> Vec<String> {
        defs.iter().map(|d| d.id().display_name()).collect()
    }

    #[test]
    fn instance_naming() {
        let inst =
            Instantiation::new("Evens", "ParityTest", &ParamGenerator::values([2, 4])).unwrap();
        let defs = instantiate_parameterized(
            &inst,
            &[TemplateTest::new("IsEven", |ctx, v| {
                ctx.expect(crate::assertions::eq(v.as_int().unwrap() % 2, 0), "here");
            })],
        )
        .unwrap();
        assert_eq!(
            names(&defs),
            ["Evens/ParityTest.IsEven/0", "Evens/ParityTest.IsEven/1"]
        );
        assert!(defs
            .iter()
            .all(|d| d.kind() == TestKind::ParameterizedInstance));
        assert!(defs
            .iter()
            .all(|d| execute_test(d).status == TestStatus::Passed));
    }

    #[test]
    fn bool_gives_two_instances() {
        let inst = Instantiation::new("B", "S", &ParamGenerator::bool()).unwrap();
        let defs = instantiate_parameterized(&inst, &[TemplateTest::new("t", |_, _| {})]).unwrap();
        assert_eq!(defs.len(), 2);
    }

    #[test]
    fn test_major_order() {
        let inst = Instantiation::new("P", "S", &ParamGenerator::range(0, 3)).unwrap();
        let defs = instantiate_parameterized(
            &inst,
            &[
                TemplateTest::new("a", |_, _| {}),
                TemplateTest::new("b", |_, _| {}),
            ],
        )
        .unwrap();
        assert_eq!(
            names(&defs),
            ["P/S.a/0", "P/S.a/1", "P/S.a/2", "P/S.b/0", "P/S.b/1", "P/S.b/2"]
        );
    }

    #[test]
    fn display_name_replaces_index() {
        let inst = Instantiation::new("P", "S", &ParamGenerator::values(["x", "y"]))
            .unwrap()
            .with_display_name(|i, v| format!("{}_{i}", v.as_text().unwrap()));
        let defs = instantiate_parameterized(&inst, &[TemplateTest::new("t", |_, _| {})]).unwrap();
        assert_eq!(names(&defs), ["P/S.t/x_0", "P/S.t/y_1"]);

        let bad = Instantiation::new("P", "S", &ParamGenerator::values([1]))
            .unwrap()
            .with_display_name(|_, _| "a.b".into());
        assert!(instantiate_parameterized(&bad, &[TemplateTest::new("t", |_, _| {})]).is_err());
    }

    #[test]
    fn bad_prefix() {
        let inst = Instantiation::new("Ev-ens", "S", &ParamGenerator::bool()).unwrap();
        assert!(matches!(
            instantiate_parameterized(&inst, &[TemplateTest::new("t", |_, _| {})]),
            Err(RegistryError::InvalidName { .. })
        ));
    }

    #[test]
    fn parameter_reaches_body() {
        use std::sync::{Arc, Mutex};
        let seen = Arc::new(Mutex::new(Vec::new()));
        let s = Arc::clone(&seen);
        let inst = Instantiation::new("P", "S", &ParamGenerator::values([5, 7])).unwrap();
        let defs = instantiate_parameterized(
            &inst,
            &[TemplateTest::new("t", move |_, v| {
                s.lock().unwrap().push(v.clone())
            })],
        )
        .unwrap();
        defs.iter().for_each(|d| {
            execute_test(d);
        });
        assert_eq!(*seen.lock().unwrap(), ints(&[5, 7]));
    }

    // Loop oracle for integer ranges.
    fn loop_oracle(b: i64, e: i64, s: i64) -> Vec<Value> {
        let mut out = Vec::new();
        let mut v = b;
        while (s > 0 && v < e) || (s < 0 && v > e) {
            out.push(Value::Int(v));
            v += s;
        }
        out
    }

    fn valid_range() -> impl Strategy<Value = (i64, i64, i64)> {
        (-50i64..50, -50i64..50, 1i64..7)
            .prop_map(|(b, e, s)| if e >= b { (b, e, s) } else { (b, e, -s) })
    }

    proptest! {
        #[test]
        fn range_count_matches_formula((b, e, s) in valid_range()) {
            let got = ParamGenerator::range_step(b, e, s).materialize().unwrap();
            let expected_len = (((e - b) as f64) / s as f64).ceil().max(0.0) as usize;
            prop_assert_eq!(got.len(), expected_len);
            prop_assert_eq!(got, loop_oracle(b, e, s));
        }

        #[test]
        fn combine_size_is_product(sizes in proptest::collection::vec(0usize..4, 1..4)) {
            let gens: Vec<ParamGenerator> = sizes.iter().map(|&n| ParamGenerator::range(0, n as i64)).collect();
            let gen = ParamGenerator::combine(gens);
            let got = gen.materialize().unwrap();
            prop_assert_eq!(got.len(), sizes.iter().product::<usize>());
            prop_assert_eq!(got, gen.materialize().unwrap());
        }

        #[test]
        fn instance_count_is_product(tests in 0usize..4, values in 0usize..5) {
            let inst = Instantiation::new("P", "S", &ParamGenerator::range(0, values as i64)).unwrap();
            let templates: Vec<TemplateTest> = (0..tests).map(|i| TemplateTest::new(format!("t{i}"), |_, _| {})).collect();
            prop_assert_eq!(instantiate_parameterized(&inst, &templates).unwrap().len(), tests * values);
        }
    }
}
