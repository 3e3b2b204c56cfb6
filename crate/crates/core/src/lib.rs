//! Monadic orchestration kernel for agent workflows.
//!
//! [`Flow`] threads an agent's state through a chain of fallible steps and
//! short-circuits on the first failure. [`AsyncFlow`] is its deferred
//! counterpart and adds [`AsyncFlow::gather`] for running independent flows
//! concurrently. On top of the kernel sit the agent domain ([`agent`]), the
//! tool-call wire format ([`mcp`]), a meta-agent that spawns and supervises
//! sub-agent flows ([`meta`]), and the scenario runner behind the
//! `agentflow` binary ([`cli`]).

pub mod agent;
pub mod async_flow;
pub mod cli;
pub mod error;
pub mod flow;
pub mod instrument;
pub mod mcp;
pub mod meta;

pub use async_flow::{AsyncFlow, MergeStrategy, EMPTY_GATHER_MESSAGE};
pub use error::{ErrorInfo, ErrorKind};
pub use flow::{Flow, FlowView, ValueAbsent};
