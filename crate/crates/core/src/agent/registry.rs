use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::state::AgentState;
use super::tool::{ToolCall, ToolResult};

/// A tool implementation. Tools used inside gather groups are invoked
/// concurrently, hence `Send + Sync`.
pub type Tool = Arc<dyn Fn(&AgentState, &ToolCall) -> ToolResult + Send + Sync>;

/// Name-indexed tool table. Built once, then only read.
#[derive(Clone, Default)]
pub struct ToolRegistry {
    tools: HashMap<String, Tool>,
}

impl ToolRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `tool` under `name`, replacing any previous entry.
    pub fn register<F>(&mut self, name: impl Into<String>, tool: F) -> &mut Self
    where
        F: Fn(&AgentState, &ToolCall) -> ToolResult + Send + Sync + 'static,
    {
        let name = name.into();
        if self.tools.insert(name.clone(), Arc::new(tool)).is_some() {
            log::warn!("tool `{name}` re-registered; previous implementation replaced");
        }
        self
    }

    pub fn lookup(&self, name: &str) -> Option<&Tool> {
        self.tools.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tools.contains_key(name)
    }

    /// Dispatches `call` by exact name. Unknown names produce an error
    /// result rather than a Rust error.
    pub fn run(&self, state: &AgentState, call: &ToolCall) -> ToolResult {
        match self.lookup(call.name()) {
            Some(tool) => tool(state, call),
            None => ToolResult::error(call, format!("Unknown tool: '{}'", call.name())),
        }
    }

    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.tools.keys().map(String::as_str).collect();
        names.sort_unstable();
        names
    }
}

impl fmt::Debug for ToolRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ToolRegistry")
            .field("tools", &self.names())
            .finish()
    }
}

pub(crate) fn search_snippet(query: &str) -> String {
    format!(
        "[mock search] '{query}': a monad wraps a value in a context and sequences \
         computations on it through bind."
    )
}

pub(crate) fn news_payload(query: &str) -> String {
    format!("[News] Three headlines related to '{query}'.")
}

pub(crate) fn weather_payload(query: &str) -> String {
    format!("[Weather] Clear skies, 21C, for the area relevant to '{query}'.")
}

pub(crate) fn stocks_payload(query: &str) -> String {
    format!("[Stocks] Index up 0.4% at close; watchlist for '{query}' steady.")
}

fn query_tool(payload: fn(&str) -> String) -> impl Fn(&AgentState, &ToolCall) -> ToolResult {
    move |_state, call| match call.query() {
        Some(q) => ToolResult::ok(call, payload(q)),
        None => ToolResult::error(
            call,
            format!("{}: missing string argument 'query'", call.name()),
        ),
    }
}

/// Registry with the bundled deterministic tools: `search`, `news`,
/// `weather` and `stocks`. All read the top-level `query` argument.
pub fn default_registry() -> ToolRegistry {
    let mut registry = ToolRegistry::new();
    registry
        .register("search", query_tool(search_snippet))
        .register("news", query_tool(news_payload))
        .register("weather", query_tool(weather_payload))
        .register("stocks", query_tool(stocks_payload));
    registry
}
