//! JSON wire format for tool calls and tool results.
//!
//! ```text
//! {"type":"tools_call","payload":{"tool_id":..,"name":..,"arguments":{..}}}
//! {"type":"tool_result","payload":{"tool_id":..,"content":..,"isError":..}}
//! ```
//!
//! Encoding is compact with keys in the order shown. Objects inside
//! `arguments` serialize with sorted keys. Unknown keys are ignored when
//! decoding.

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::agent::{ToolCall, ToolCallError, ToolResult};
use crate::error::{ErrorInfo, ErrorKind};
use crate::flow::Flow;

pub const TOOLS_CALL: &str = "tools_call";
pub const TOOL_RESULT: &str = "tool_result";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("malformed JSON: {0}")]
    Malformed(String),
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("field `{field}` must be {expected}")]
    WrongType {
        field: String,
        expected: &'static str,
    },
    #[error("field `type` must be \"{expected}\", found \"{found}\"")]
    WrongTag {
        expected: &'static str,
        found: String,
    },
    #[error("field `{0}` must be non-empty")]
    Empty(String),
}

impl DecodeError {
    /// The offending field, when the failure is attributable to one.
    pub fn field(&self) -> Option<&str> {
        match self {
            DecodeError::Malformed(_) => None,
            DecodeError::MissingField(f) | DecodeError::Empty(f) => Some(f),
            DecodeError::WrongType { field, .. } => Some(field),
            DecodeError::WrongTag { .. } => Some("type"),
        }
    }
}

impl From<DecodeError> for ErrorInfo {
    fn from(e: DecodeError) -> Self {
        ErrorInfo::new(ErrorKind::Decode, e.to_string())
    }
}

#[derive(Serialize)]
struct Envelope<'a, P> {
    #[serde(rename = "type")]
    kind: &'a str,
    payload: P,
}

#[derive(Serialize)]
struct CallPayload<'a> {
    tool_id: &'a str,
    name: &'a str,
    arguments: &'a Map<String, Value>,
}

#[derive(Serialize)]
struct ResultPayload<'a> {
    tool_id: &'a str,
    content: &'a str,
    #[serde(rename = "isError")]
    is_error: bool,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("wire structs always serialize")
}

pub fn encode_tool_call(call: &ToolCall) -> String {
    to_json(&Envelope {
        kind: TOOLS_CALL,
        payload: CallPayload {
            tool_id: call.tool_id(),
            name: call.name(),
            arguments: call.arguments(),
        },
    })
}

pub fn encode_tool_result(result: &ToolResult) -> String {
    to_json(&Envelope {
        kind: TOOL_RESULT,
        payload: ResultPayload {
            tool_id: &result.tool_id,
            content: &result.content,
            is_error: result.is_error,
        },
    })
}

fn open_envelope(text: &str, expected: &'static str) -> Result<Map<String, Value>, DecodeError> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| DecodeError::Malformed(e.to_string()))?;
    let Value::Object(mut doc) = doc else {
        return Err(DecodeError::Malformed(
            "envelope is not a JSON object".into(),
        ));
    };
    match doc.get("type") {
        None => return Err(DecodeError::MissingField("type".into())),
        Some(Value::String(tag)) if tag == expected => {}
        Some(Value::String(tag)) => {
            return Err(DecodeError::WrongTag {
                expected,
                found: tag.clone(),
            })
        }
        Some(_) => {
            return Err(DecodeError::WrongType {
                field: "type".into(),
                expected: "a string",
            })
        }
    }
    match doc.remove("payload") {
        None => Err(DecodeError::MissingField("payload".into())),
        Some(Value::Object(payload)) => Ok(payload),
        Some(_) => Err(DecodeError::WrongType {
            field: "payload".into(),
            expected: "an object",
        }),
    }
}

fn take_string(payload: &mut Map<String, Value>, field: &str) -> Result<String, DecodeError> {
    match payload.remove(field) {
        None => Err(DecodeError::MissingField(field.into())),
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(DecodeError::WrongType {
            field: field.into(),
            expected: "a string",
        }),
    }
}

pub fn decode_tool_call(text: &str) -> Result<ToolCall, DecodeError> {
    let mut payload = open_envelope(text, TOOLS_CALL)?;
    let tool_id = take_string(&mut payload, "tool_id")?;
    let name = take_string(&mut payload, "name")?;
    let arguments = match payload.remove("arguments") {
        None => return Err(DecodeError::MissingField("arguments".into())),
        Some(Value::Object(args)) => args,
        Some(_) => {
            return Err(DecodeError::WrongType {
                field: "arguments".into(),
                expected: "an object",
            })
        }
    };
    ToolCall::new(tool_id, name, arguments).map_err(|e| match e {
        ToolCallError::EmptyField(field) => DecodeError::Empty(field.into()),
    })
}

pub fn decode_tool_result(text: &str) -> Result<ToolResult, DecodeError> {
    let mut payload = open_envelope(text, TOOL_RESULT)?;
    let tool_id = take_string(&mut payload, "tool_id")?;
    let content = take_string(&mut payload, "content")?;
    let is_error = match payload.remove("isError") {
        None => return Err(DecodeError::MissingField("isError".into())),
        Some(Value::Bool(b)) => b,
        Some(_) => {
            return Err(DecodeError::WrongType {
                field: "isError".into(),
                expected: "a boolean",
            })
        }
    };
    Ok(ToolResult {
        tool_id,
        content,
        is_error,
    })
}

/// Packages a step's outcome as a tool result: the value on success, the
/// error message with `is_error` set on failure.
pub fn flow_to_tool_result<S>(flow: &Flow<S, String>, tool_id: &str) -> ToolResult {
    let (content, is_error) = match (flow.value(), flow.error_info()) {
        (Some(value), _) => (value.clone(), false),
        (None, Some(error)) => (error.message().to_string(), true),
        (None, None) => unreachable!("a flow is always on exactly one track"),
    };
    ToolResult {
        tool_id: tool_id.to_string(),
        content,
        is_error,
    }
}

/// Reads a tool result back onto the flow tracks. Error results become
/// `ToolExecution` failures.
pub fn tool_result_to_flow<S>(state: S, result: ToolResult) -> Flow<S, String> {
    if result.is_error {
        Flow::failure(state, ErrorInfo::tool_execution(result.content))
    } else {
        Flow::success(state, result.content)
    }
}
