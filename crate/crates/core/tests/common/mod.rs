//! Shared vocabulary for law, equivalence and acceptance tests: a small
//! test state, a fixed set of pure steps, and proptest strategies over them.
#![allow(dead_code)]

use std::sync::Once;

use agentflow::{AsyncFlow, ErrorInfo, Flow};
use proptest::prelude::*;

/// Marker carried by every deliberate panic so the quiet hook can drop it.
pub const DELIBERATE: &str = "deliberate fault";

/// Silences panic output for deliberate faults only; every other panic is
/// reported by the default hook.
pub fn quiet_deliberate_panics() {
    static INSTALL: Once = Once::new();
    INSTALL.call_once(|| {
        let default = std::panic::take_hook();
        std::panic::set_hook(Box::new(move |info| {
            let payload = info.payload();
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_default();
            if !msg.contains(DELIBERATE) {
                default(info);
            }
        }));
    });
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestState {
    pub counter: i64,
    pub trail: Vec<i64>,
}

pub type TestFlow = Flow<TestState, i64>;

/// Pure value functions used for functor/applicative laws.
#[derive(Debug, Clone, Copy)]
pub enum Fun {
    Add(i64),
    Mul(i64),
    Xor(i64),
    Neg,
}

impl Fun {
    pub fn call(self, x: i64) -> i64 {
        match self {
            Fun::Add(k) => x.wrapping_add(k),
            Fun::Mul(k) => x.wrapping_mul(k),
            Fun::Xor(k) => x ^ k,
            Fun::Neg => x.wrapping_neg(),
        }
    }
}

/// Steps `(state, value) -> Flow`, the vocabulary for random pipelines.
#[derive(Debug, Clone, Copy)]
pub enum Op {
    Value(Fun),
    Bump(i64),
    Record,
    Fail(u8),
}

impl Op {
    pub fn step(self, mut s: TestState, v: i64) -> TestFlow {
        match self {
            Op::Value(f) => Flow::success(s, f.call(v)),
            Op::Bump(k) => {
                s.counter = s.counter.wrapping_add(k);
                Flow::success(s, v)
            }
            Op::Record => {
                s.trail.push(v);
                Flow::success(s, v)
            }
            Op::Fail(code) => {
                s.trail.push(-1);
                Flow::failure(s, ErrorInfo::other(format!("fail-{code}")))
            }
        }
    }
}

/// Runs a list of ops as one composite step.
pub fn run_ops(ops: &[Op], s: TestState, v: i64) -> TestFlow {
    ops.iter().fold(Flow::success(s, v), |flow, &op| {
        flow.then(move |s, v| op.step(s, v))
    })
}

pub fn fun_strategy() -> impl Strategy<Value = Fun> {
    prop_oneof![
        (-50i64..50).prop_map(Fun::Add),
        (-5i64..5).prop_map(Fun::Mul),
        any::<i64>().prop_map(Fun::Xor),
        Just(Fun::Neg),
    ]
}

pub fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => fun_strategy().prop_map(Op::Value),
        2 => (-10i64..10).prop_map(Op::Bump),
        2 => Just(Op::Record),
        1 => any::<u8>().prop_map(Op::Fail),
    ]
}

pub fn pure_op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        fun_strategy().prop_map(Op::Value),
        (-10i64..10).prop_map(Op::Bump),
        Just(Op::Record),
    ]
}

pub fn state_strategy() -> impl Strategy<Value = TestState> {
    (any::<i64>(), proptest::collection::vec(-100i64..100, 0..4))
        .prop_map(|(counter, trail)| TestState { counter, trail })
}

pub fn flow_strategy() -> impl Strategy<Value = TestFlow> {
    prop_oneof![
        3 => (state_strategy(), any::<i64>()).prop_map(|(s, v)| Flow::success(s, v)),
        1 => (state_strategy(), "[a-z]{1,8}")
            .prop_map(|(s, m)| Flow::failure(s, ErrorInfo::other(m))),
    ]
}

/// Deferred version of a pipeline: same start, same ops, each as an
/// async step (or async map for pure value ops when `use_map` is set).
pub fn async_pipeline(start: &TestFlow, ops: &[Op], use_map: bool) -> AsyncFlow<TestState, i64> {
    let mut aflow = AsyncFlow::lift(start.clone());
    for &op in ops {
        aflow = match op {
            Op::Value(f) if use_map => aflow.map(move |v| f.call(v)),
            _ => aflow.then(move |s, v| async move { op.step(s, v) }),
        };
    }
    aflow
}

/// Synchronous counterpart of [`async_pipeline`].
pub fn sync_pipeline(start: &TestFlow, ops: &[Op], use_map: bool) -> TestFlow {
    ops.iter().fold(start.clone(), |flow, &op| match op {
        Op::Value(f) if use_map => flow.map(move |v| f.call(v)),
        _ => flow.then(move |s, v| op.step(s, v)),
    })
}

/// Reference evaluation of a pipeline with plain control flow, independent
/// of the combinators.
pub fn oracle_pipeline(start: &TestFlow, ops: &[Op]) -> TestFlow {
    let (mut state, first) = start.clone().into_parts();
    let mut value = match first {
        Ok(v) => v,
        Err(e) => return Flow::failure(state, e),
    };
    for &op in ops {
        match op {
            Op::Value(f) => value = f.call(value),
            Op::Bump(k) => state.counter = state.counter.wrapping_add(k),
            Op::Record => state.trail.push(value),
            Op::Fail(code) => {
                state.trail.push(-1);
                return Flow::failure(state, ErrorInfo::other(format!("fail-{code}")));
            }
        }
    }
    Flow::success(state, value)
}

/// Arbitrary JSON argument values, including unicode text and all numeric
/// representations serde_json distinguishes.
pub fn json_value_strategy() -> impl Strategy<Value = serde_json::Value> {
    use serde_json::Value;
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i64>().prop_map(Value::from),
        any::<u64>().prop_map(Value::from),
        any::<f64>()
            .prop_filter("finite", |f| f.is_finite())
            .prop_map(Value::from),
        "\\PC{0,16}".prop_map(Value::String),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 0..4).prop_map(serde_json::Value::Array),
            proptest::collection::btree_map("\\PC{0,6}", inner, 0..4)
                .prop_map(|m| serde_json::Value::Object(m.into_iter().collect())),
        ]
    })
}

pub fn tool_call_strategy() -> impl Strategy<Value = agentflow::agent::ToolCall> {
    (
        "\\PC{1,12}",
        "\\PC{1,12}",
        proptest::collection::btree_map("\\PC{0,8}", json_value_strategy(), 0..5),
    )
        .prop_map(|(id, name, args)| {
            agentflow::agent::ToolCall::new(id, name, args.into_iter().collect()).unwrap()
        })
}

pub fn tool_result_strategy() -> impl Strategy<Value = agentflow::agent::ToolResult> {
    ("\\PC{0,12}", "\\PC{0,64}", any::<bool>()).prop_map(|(tool_id, content, is_error)| {
        agentflow::agent::ToolResult {
            tool_id,
            content,
            is_error,
        }
    })
}

pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
