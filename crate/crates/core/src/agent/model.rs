use thiserror::Error;

/// Prompt prefix used by the planning step.
pub const PLAN_PROMPT_PREFIX: &str = "Select the tool that best serves this task: ";

pub(crate) const DECOMPOSE_PROMPT_PREFIX: &str = "Decompose the goal '";
pub(crate) const DECOMPOSE_PROMPT_SUFFIX: &str = "' into specialized roles. Answer with one line \
     per role formatted as role|pipeline|prompt, where pipeline is one of search, data, writer.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model client failed: {0}")]
pub struct ModelError(pub String);

/// A pluggable text-completion backend.
pub trait ModelClient: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, ModelError>;
}

/// Deterministic stand-in for a language model.
///
/// Planning prompts are answered with `search` (or the configured override),
/// decomposition prompts with the three standard roles, and everything else
/// is echoed back. Output depends only on the prompt and configuration.
#[derive(Debug, Clone, Default)]
pub struct MockModelClient {
    tool_override: Option<String>,
    fault: Option<String>,
}

impl MockModelClient {
    pub fn new() -> Self {
        Self::default()
    }

    /// Makes the planner pick `name` instead of `search`.
    pub fn with_tool_override(mut self, name: impl Into<String>) -> Self {
        self.tool_override = Some(name.into());
        self
    }

    /// Makes every completion fail with `message`.
    pub fn failing(mut self, message: impl Into<String>) -> Self {
        self.fault = Some(message.into());
        self
    }
}

impl ModelClient for MockModelClient {
    fn complete(&self, prompt: &str) -> Result<String, ModelError> {
        if let Some(fault) = &self.fault {
            return Err(ModelError(fault.clone()));
        }
        if prompt.starts_with(PLAN_PROMPT_PREFIX) {
            return Ok(self
                .tool_override
                .clone()
                .unwrap_or_else(|| "search".to_string()));
        }
        if let Some(goal) = prompt
            .strip_prefix(DECOMPOSE_PROMPT_PREFIX)
            .and_then(|rest| rest.strip_suffix(DECOMPOSE_PROMPT_SUFFIX))
        {
            let goal = goal.trim();
            if goal.is_empty() {
                return Ok(String::new());
            }
            return Ok(format!(
                "SearchAgent|search|Find background sources on: {goal}\n\
                 DataAgent|data|Collect and validate figures for: {goal}\n\
                 WriterAgent|writer|Write the summary section for: {goal}"
            ));
        }
        Ok(format!("ACK: {prompt}"))
    }
}
