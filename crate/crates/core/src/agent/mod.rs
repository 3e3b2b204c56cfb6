//! Agent domain: memory, tool calls, the tool registry, the model client
//! interface and the step functions used by the bundled scenarios.

mod briefing;
pub(crate) mod model;
mod registry;
mod state;
mod steps;
mod tool;

pub use briefing::{
    async_fetch_news, async_fetch_stocks, async_fetch_weather, async_synthesize_briefing,
    daily_briefing, BriefingConfig, Source,
};
pub use model::{MockModelClient, ModelClient, ModelError, PLAN_PROMPT_PREFIX};
pub use registry::{default_registry, Tool, ToolRegistry};
pub use state::AgentState;
pub use steps::{
    async_research_pipeline, execute_tool, format_output, next_tool_id, plan_action,
    research_pipeline, synthesize_answer, FINAL_REPORT_PREFIX, FORMATTED_ENTRY, SYNTHESIZED_ENTRY,
};
pub use tool::{ToolCall, ToolCallError, ToolResult};
