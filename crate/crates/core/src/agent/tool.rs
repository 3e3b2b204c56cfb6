use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToolCallError {
    #[error("tool call field `{0}` must be non-empty")]
    EmptyField(&'static str),
}

/// A request to invoke a tool. `tool_id` and `name` are never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolCall {
    tool_id: String,
    name: String,
    arguments: Map<String, Value>,
}

impl ToolCall {
    pub fn new(
        tool_id: impl Into<String>,
        name: impl Into<String>,
        arguments: Map<String, Value>,
    ) -> Result<Self, ToolCallError> {
        let tool_id = tool_id.into();
        let name = name.into();
        if tool_id.is_empty() {
            return Err(ToolCallError::EmptyField("tool_id"));
        }
        if name.is_empty() {
            return Err(ToolCallError::EmptyField("name"));
        }
        Ok(ToolCall {
            tool_id,
            name,
            arguments,
        })
    }

    /// Convenience for the common single `query` argument.
    pub fn with_query(
        tool_id: impl Into<String>,
        name: impl Into<String>,
        query: impl Into<String>,
    ) -> Result<Self, ToolCallError> {
        let mut arguments = Map::new();
        arguments.insert("query".to_string(), Value::String(query.into()));
        ToolCall::new(tool_id, name, arguments)
    }

    pub fn tool_id(&self) -> &str {
        &self.tool_id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arguments(&self) -> &Map<String, Value> {
        &self.arguments
    }

    /// The top-level `query` argument, when it is a string.
    pub fn query(&self) -> Option<&str> {
        self.arguments.get("query").and_then(Value::as_str)
    }
}

/// The response to a [`ToolCall`]; `tool_id` echoes the request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolResult {
    pub tool_id: String,
    pub content: String,
    pub is_error: bool,
}

impl ToolResult {
    pub fn ok(call: &ToolCall, content: impl Into<String>) -> Self {
        ToolResult {
            tool_id: call.tool_id.clone(),
            content: content.into(),
            is_error: false,
        }
    }

    pub fn error(call: &ToolCall, content: impl Into<String>) -> Self {
        ToolResult {
            tool_id: call.tool_id.clone(),
            content: content.into(),
            is_error: true,
        }
    }
}
