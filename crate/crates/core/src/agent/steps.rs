//! The research agent's four steps and the pipelines that chain them.

use std::sync::Arc;

use crate::async_flow::AsyncFlow;
use crate::error::ErrorInfo;
use crate::flow::Flow;

use super::model::{ModelClient, PLAN_PROMPT_PREFIX};
use super::registry::ToolRegistry;
use super::state::AgentState;
use super::tool::ToolCall;

pub const FINAL_REPORT_PREFIX: &str = "Final Report:\n";
pub const SYNTHESIZED_ENTRY: &str = "Synthesized final answer.";
pub const FORMATTED_ENTRY: &str = "Formatted response for delivery.";

const PLAN_ENTRY_PREFIX: &str = "Plan: call ";

/// Request id for the next planned call: `tool-<n>`, where `n` counts the
/// plans already recorded in the history, starting at 1. Derived from the
/// state so that re-running a pipeline yields the same ids.
pub fn next_tool_id(state: &AgentState) -> String {
    let planned = state
        .history()
        .iter()
        .filter(|e| e.starts_with(PLAN_ENTRY_PREFIX))
        .count();
    format!("tool-{}", planned + 1)
}

/// Asks the model which tool to use for `task` and emits the call.
pub fn plan_action(
    state: AgentState,
    task: &str,
    client: &dyn ModelClient,
) -> Flow<AgentState, ToolCall> {
    let name = match client.complete(&format!("{PLAN_PROMPT_PREFIX}{task}")) {
        Ok(answer) => answer.trim().to_string(),
        Err(e) => return Flow::failure(state, ErrorInfo::step_fault(e.to_string())),
    };
    let call = match ToolCall::with_query(next_tool_id(&state), name, task) {
        Ok(call) => call,
        Err(e) => {
            return Flow::failure(
                state,
                ErrorInfo::step_fault(format!("planner produced an invalid call: {e}")),
            )
        }
    };
    let next = state.with_history(format!(
        "{PLAN_ENTRY_PREFIX}{} with query='{task}'.",
        call.name()
    ));
    Flow::success(next, call)
}

/// Dispatches `call`, records the observation, and fails when the tool
/// reported an error. The observation is recorded on both tracks.
pub fn execute_tool(
    state: AgentState,
    call: &ToolCall,
    registry: &ToolRegistry,
) -> Flow<AgentState, String> {
    let result = registry.run(&state, call);
    let next = state.with_history(format!("Tool Result ({}): {}", call.name(), result.content));
    if !result.is_error {
        return Flow::success(next, result.content);
    }
    let error = if registry.contains(call.name()) {
        ErrorInfo::tool_execution(result.content)
    } else {
        ErrorInfo::tool_not_found(result.content)
    };
    Flow::failure(next, error)
}

pub fn synthesize_answer(state: AgentState, tool_output: String) -> Flow<AgentState, String> {
    let answer = format!(
        "Answer to '{}', grounded in the tool output. Evidence: {tool_output}",
        state.task
    );
    Flow::success(state.with_history(SYNTHESIZED_ENTRY), answer)
}

pub fn format_output(state: AgentState, answer: String) -> Flow<AgentState, String> {
    Flow::success(
        state.with_history(FORMATTED_ENTRY),
        format!("{FINAL_REPORT_PREFIX}{answer}"),
    )
}

/// plan → execute → synthesize → format, run eagerly.
pub fn research_pipeline(
    task: &str,
    client: &dyn ModelClient,
    registry: &ToolRegistry,
) -> Flow<AgentState, String> {
    Flow::start(AgentState::new(task))
        .then(|s, _| plan_action(s, task, client))
        .then(|s, call| execute_tool(s, &call, registry))
        .then(synthesize_answer)
        .then(format_output)
}

/// The same four steps as a deferred flow.
pub fn async_research_pipeline(
    task: impl Into<String>,
    client: Arc<dyn ModelClient>,
    registry: Arc<ToolRegistry>,
) -> AsyncFlow<AgentState, String> {
    let task: Arc<str> = task.into().into();
    let plan_task = Arc::clone(&task);
    AsyncFlow::start(AgentState::new(task.as_ref()))
        .then(move |s, _| {
            let task = Arc::clone(&plan_task);
            let client = Arc::clone(&client);
            async move { plan_action(s, &task, client.as_ref()) }
        })
        .then(move |s, call| {
            let registry = Arc::clone(&registry);
            async move { execute_tool(s, &call, &registry) }
        })
        .then(|s, out| async move { synthesize_answer(s, out) })
        .then(|s, answer| async move { format_output(s, answer) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::model::MockModelClient;
    use crate::agent::registry::default_registry;
    use crate::agent::tool::ToolResult;
    use crate::error::ErrorKind;

    const TASK: &str = "What is a Monad?";

    #[test]
    fn plan_action_picks_search() {
        let flow = plan_action(AgentState::new(TASK), TASK, &MockModelClient::new());
        let call = flow.value().unwrap();
        assert_eq!(call.name(), "search");
        assert_eq!(call.tool_id(), "tool-1");
        assert_eq!(call.query(), Some(TASK));
        assert_eq!(
            flow.state().history().last().unwrap(),
            "Plan: call search with query='What is a Monad?'."
        );
    }

    #[test]
    fn plan_action_with_guess_override() {
        let client = MockModelClient::new().with_tool_override("guess");
        let flow = plan_action(AgentState::new(TASK), TASK, &client);
        assert_eq!(flow.value().unwrap().name(), "guess");
    }

    #[test]
    fn plan_action_client_fault() {
        let client = MockModelClient::new().failing("offline");
        let flow = plan_action(AgentState::new(TASK), TASK, &client);
        assert_eq!(flow.error_info().unwrap().kind(), ErrorKind::StepFault);
        assert!(flow.state().history().is_empty());
    }

    #[test]
    fn tool_ids_count_previous_plans() {
        let s = AgentState::new(TASK).with_history("Plan: call search with query='a'.");
        assert_eq!(next_tool_id(&s), "tool-2");
    }

    #[test]
    fn execute_tool_branches() {
        let registry = default_registry();
        let call = ToolCall::with_query("tool-1", "search", TASK).unwrap();
        let ok = execute_tool(AgentState::new(TASK), &call, &registry);
        assert!(ok.is_successful());
        assert!(ok.state().history().last().unwrap().contains("search"));

        let guess = ToolCall::with_query("tool-1", "guess", TASK).unwrap();
        let bad = execute_tool(AgentState::new(TASK), &guess, &registry);
        assert_eq!(bad.error_info().unwrap().kind(), ErrorKind::ToolNotFound);
        assert_eq!(
            bad.state().history().last().unwrap(),
            "Tool Result (guess): Unknown tool: 'guess'"
        );

        let mut failing = ToolRegistry::new();
        failing.register("search", |_, call| ToolResult::error(call, "rate limited"));
        let bad = execute_tool(AgentState::new(TASK), &call, &failing);
        let e = bad.error_info().unwrap();
        assert_eq!(e.kind(), ErrorKind::ToolExecution);
        assert_eq!(e.message(), "rate limited");
    }

    #[test]
    fn synthesize_and_format() {
        let s = synthesize_answer(AgentState::new(TASK), "snippet".into());
        assert!(s.value().unwrap().contains("Evidence: snippet"));
        assert_eq!(s.state().history().last().unwrap(), SYNTHESIZED_ENTRY);

        let f = format_output(AgentState::new(TASK), "A".into());
        assert_eq!(f.value().unwrap(), "Final Report:\nA");
        assert_eq!(f.state().history(), [FORMATTED_ENTRY]);

        let twice = f.then(format_output);
        assert_eq!(twice.value().unwrap(), "Final Report:\nFinal Report:\nA");
    }

    #[test]
    fn research_pipeline_success_and_determinism() {
        let registry = default_registry();
        let client = MockModelClient::new();
        let a = research_pipeline(TASK, &client, &registry);
        let b = research_pipeline(TASK, &client, &registry);
        assert_eq!(a, b);
        assert!(a.value().unwrap().starts_with(FINAL_REPORT_PREFIX));
        assert_eq!(a.state().history().len(), 4);
    }

    #[test]
    fn research_pipeline_guess_short_circuits() {
        let registry = default_registry();
        let client = MockModelClient::new().with_tool_override("guess");
        let flow = research_pipeline(TASK, &client, &registry);
        assert_eq!(flow.error_info().unwrap().kind(), ErrorKind::ToolNotFound);
        assert_eq!(flow.state().history().len(), 2);
        assert!(!flow
            .state()
            .history()
            .iter()
            .any(|e| e == SYNTHESIZED_ENTRY));
    }

    #[test]
    fn async_pipeline_matches_sync() {
        let registry = default_registry();
        let client = MockModelClient::new();
        let sync = research_pipeline(TASK, &client, &registry);
        let aflow = async_research_pipeline(TASK, Arc::new(client), Arc::new(registry));
        let got = futures::executor::block_on(aflow.run());
        assert_eq!(got, sync);
        assert_eq!(futures::executor::block_on(aflow.run()), got);
    }
}
