//! Meta-agent orchestration.
//!
//! The meta-agent never answers the goal itself. It asks the model to split
//! the goal into roles, turns each role into a deferred sub-agent flow, runs
//! those flows as one gather group, and writes the collected reports into a
//! combined report. Every stage is a `then` step on the meta-level flow.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::agent::model::{DECOMPOSE_PROMPT_PREFIX, DECOMPOSE_PROMPT_SUFFIX};
use crate::agent::{execute_tool, AgentState, ModelClient, ToolCall, ToolRegistry};
use crate::async_flow::AsyncFlow;
use crate::error::{ErrorInfo, ErrorKind};
use crate::flow::Flow;

/// Step-chain template a sub-agent is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PipelineKind {
    /// plan_search → execute_tool
    Search,
    /// query_api → validate_data
    Data,
    /// draft_section → refine_prose
    Writer,
}

impl PipelineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PipelineKind::Search => "search",
            PipelineKind::Data => "data",
            PipelineKind::Writer => "writer",
        }
    }
}

impl fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PipelineKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "search" => Ok(PipelineKind::Search),
            "data" => Ok(PipelineKind::Data),
            "writer" => Ok(PipelineKind::Writer),
            other => Err(SpecError::UnknownPipeline(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("unknown pipeline `{0}`")]
    UnknownPipeline(String),
    #[error("sub-agent {0} must be non-empty")]
    Empty(&'static str),
    #[error("line {line}: expected `role|pipeline|prompt`, got `{text}`")]
    Malformed { line: usize, text: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubAgentSpec {
    role: String,
    prompt: String,
    pipeline: PipelineKind,
}

impl SubAgentSpec {
    pub fn new(
        role: impl Into<String>,
        pipeline: PipelineKind,
        prompt: impl Into<String>,
    ) -> Result<Self, SpecError> {
        let role = role.into();
        let prompt = prompt.into();
        if role.trim().is_empty() {
            return Err(SpecError::Empty("role"));
        }
        if prompt.trim().is_empty() {
            return Err(SpecError::Empty("prompt"));
        }
        Ok(SubAgentSpec {
            role,
            prompt,
            pipeline,
        })
    }

    pub fn role(&self) -> &str {
        &self.role
    }

    pub fn prompt(&self) -> &str {
        &self.prompt
    }

    pub fn pipeline(&self) -> PipelineKind {
        self.pipeline
    }
}

/// Parses `role|pipeline|prompt` lines. Blank lines are skipped; the prompt
/// may itself contain `|`.
pub fn parse_specs(text: &str) -> Result<Vec<SubAgentSpec>, SpecError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            let mut parts = line.splitn(3, '|');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(role), Some(pipeline), Some(prompt)) => {
                    SubAgentSpec::new(role.trim(), pipeline.parse()?, prompt.trim())
                }
                _ => Err(SpecError::Malformed {
                    line: i + 1,
                    text: line.to_string(),
                }),
            }
        })
        .collect()
}

pub fn decompose_prompt(goal: &str) -> String {
    format!("{DECOMPOSE_PROMPT_PREFIX}{goal}{DECOMPOSE_PROMPT_SUFFIX}")
}

/// Meta-level state: the goal, the current plan, collected sub-agent
/// reports (in plan order) and the meta log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetaState {
    pub goal: String,
    pub plan: Option<Vec<SubAgentSpec>>,
    pub sub_reports: Vec<String>,
    pub log: Vec<String>,
}

impl MetaState {
    pub fn new(goal: impl Into<String>) -> Self {
        MetaState {
            goal: goal.into(),
            ..Self::default()
        }
    }

    fn logged(mut self, entry: impl Into<String>) -> Self {
        self.log.push(entry.into());
        self
    }
}

/// Asks the model for a decomposition of `goal` and records it as the plan.
pub fn decompose(
    state: MetaState,
    goal: &str,
    client: &dyn ModelClient,
) -> Flow<MetaState, Vec<SubAgentSpec>> {
    let answer = match client.complete(&decompose_prompt(goal)) {
        Ok(answer) => answer,
        Err(e) => return Flow::failure(state, ErrorInfo::step_fault(e.to_string())),
    };
    let specs = match parse_specs(&answer) {
        Ok(specs) => specs,
        Err(e) => {
            return Flow::failure(
                state,
                ErrorInfo::new(ErrorKind::Decode, format!("unparseable decomposition: {e}")),
            )
        }
    };
    if specs.is_empty() {
        return Flow::failure(
            state,
            ErrorInfo::other(format!(
                "decomposition of goal '{goal}' produced no sub-agents"
            )),
        );
    }
    let summary = specs
        .iter()
        .map(|s| format!("{}({})", s.role, s.pipeline))
        .collect::<Vec<_>>()
        .join(", ");
    let mut next = state.logged(format!("Plan: {summary}"));
    next.plan = Some(specs.clone());
    Flow::success(next, specs)
}

/// Latency and failure switches for sub-agents, keyed by pipeline.
#[derive(Debug, Clone, Default)]
pub struct SubAgentOptions {
    pub step_delay: Duration,
    pub delays: HashMap<PipelineKind, Duration>,
    pub failing: HashSet<PipelineKind>,
}

impl SubAgentOptions {
    pub fn with_delay(step_delay: Duration) -> Self {
        SubAgentOptions {
            step_delay,
            ..Self::default()
        }
    }

    pub fn fail(mut self, pipeline: PipelineKind) -> Self {
        self.failing.insert(pipeline);
        self
    }

    fn delay_for(&self, pipeline: PipelineKind) -> Duration {
        self.delays
            .get(&pipeline)
            .copied()
            .unwrap_or(self.step_delay)
    }
}

/// Shared context for one sub-agent's steps.
struct SubAgent {
    role: String,
    pipeline: PipelineKind,
    registry: Arc<ToolRegistry>,
    options: Arc<SubAgentOptions>,
}

impl SubAgent {
    async fn pause(&self) {
        let delay = self.options.delay_for(self.pipeline);
        if !delay.is_zero() {
            tokio::time::sleep(delay).await;
        }
    }

    fn injected(&self, state: AgentState, step: &str) -> Option<Flow<AgentState, String>> {
        if !self.options.failing.contains(&self.pipeline) {
            return None;
        }
        let message = format!("{} {step} failed: injected failure", self.role);
        let next = state.with_history(format!("{step}: {message}"));
        Some(Flow::failure(next, ErrorInfo::tool_execution(message)))
    }

    async fn first_step(&self, state: AgentState, prompt: String) -> Flow<AgentState, String> {
        self.pause().await;
        let step = match self.pipeline {
            PipelineKind::Search => "plan_search",
            PipelineKind::Data => "query_api",
            PipelineKind::Writer => "draft_section",
        };
        if let Some(failed) = self.injected(state.clone(), step) {
            return failed;
        }
        match self.pipeline {
            // The search query travels as the value; the second step builds the call.
            PipelineKind::Search => Flow::success(
                state.with_history(format!("plan_search: search for '{prompt}'")),
                prompt,
            ),
            PipelineKind::Data => {
                let call = ToolCall::with_query("tool-1", "stocks", prompt.as_str())
                    .expect("literal id and name are non-empty");
                execute_tool(
                    state.with_history(format!("query_api: {prompt}")),
                    &call,
                    &self.registry,
                )
            }
            PipelineKind::Writer => {
                let draft = format!("Draft: {prompt}");
                Flow::success(state.with_history("draft_section: drafted section"), draft)
            }
        }
    }

    fn second_step(&self, state: AgentState, input: String) -> Flow<AgentState, String> {
        match self.pipeline {
            PipelineKind::Search => {
                let call =
                    ToolCall::with_query(crate::agent::next_tool_id(&state), "search", input)
                        .expect("generated id and literal name are non-empty");
                execute_tool(state, &call, &self.registry)
            }
            PipelineKind::Data => {
                if input.trim().is_empty() {
                    return Flow::failure(
                        state.with_history("validate_data: empty dataset"),
                        ErrorInfo::tool_execution(format!(
                            "{} validate_data: empty dataset",
                            self.role
                        )),
                    );
                }
                Flow::success(
                    state.with_history("validate_data: 1 record passed validation"),
                    format!("Validated data: {input}"),
                )
            }
            PipelineKind::Writer => Flow::success(
                state.with_history("refine_prose: refined draft"),
                format!("Refined: {input}"),
            ),
        }
    }
}

/// Builds the deferred sub-agent flow for `spec`, seeded with
/// `AgentState { task: spec.prompt }`. Nothing runs until the flow is run.
pub fn instantiate(
    spec: &SubAgentSpec,
    registry: Arc<ToolRegistry>,
    options: Arc<SubAgentOptions>,
) -> AsyncFlow<AgentState, String> {
    let agent = Arc::new(SubAgent {
        role: spec.role.clone(),
        pipeline: spec.pipeline,
        registry,
        options,
    });
    let second = Arc::clone(&agent);
    AsyncFlow::start_with(AgentState::new(spec.prompt.as_str()), spec.prompt.clone())
        .then(move |s, prompt| {
            let agent = Arc::clone(&agent);
            async move { agent.first_step(s, prompt).await }
        })
        .then_sync(move |s, input| second.second_step(s, input))
}

/// A sub-agent's output together with its own history.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SubAgentOutcome {
    output: String,
    history: Vec<String>,
}

async fn spawn_and_gather(
    state: MetaState,
    specs: Vec<SubAgentSpec>,
    registry: Arc<ToolRegistry>,
    options: Arc<SubAgentOptions>,
) -> Flow<MetaState, Vec<String>> {
    let flows = specs
        .iter()
        .map(|spec| {
            instantiate(spec, Arc::clone(&registry), Arc::clone(&options)).then_sync(|s, output| {
                let history = s.history().to_vec();
                Flow::success(s, SubAgentOutcome { output, history })
            })
        })
        .collect();
    let (_, gathered) = AsyncFlow::gather(flows, None).run().await.into_parts();
    match gathered {
        Err(error) => {
            let next = state.logged(format!("Sub-agent failure: {}", error.message()));
            Flow::failure(next, error)
        }
        Ok(outcomes) => {
            let mut next = state;
            for (spec, outcome) in specs.iter().zip(&outcomes) {
                next = next.logged(format!(
                    "{} log: {}",
                    spec.role,
                    outcome.history.join(" | ")
                ));
            }
            next.sub_reports = outcomes.iter().map(|o| o.output.clone()).collect();
            let reports = next.sub_reports.clone();
            Flow::success(next, reports)
        }
    }
}

fn synthesize_report(state: MetaState, reports: Vec<String>) -> Flow<MetaState, String> {
    let roles = state.plan.as_deref().unwrap_or_default();
    let mut report = format!("Meta Report: {}", state.goal);
    for (spec, section) in roles.iter().zip(&reports) {
        report.push_str(&format!("\n\n## {}\n{section}", spec.role));
    }
    let next = state.logged(format!(
        "Synthesized report from {} sub-agents.",
        reports.len()
    ));
    Flow::success(next, report)
}

/// decompose → spawn sub-agents and gather → synthesize, as one deferred
/// meta-level flow. A failing sub-agent fails the whole run with the error
/// of the first failing sub-agent in plan order.
pub fn orchestrate(
    goal: impl Into<String>,
    client: Arc<dyn ModelClient>,
    registry: Arc<ToolRegistry>,
    options: SubAgentOptions,
) -> AsyncFlow<MetaState, String> {
    let goal = goal.into();
    let options = Arc::new(options);
    AsyncFlow::start_with(MetaState::new(goal.as_str()), goal)
        .then_sync(move |s, goal| decompose(s, &goal, client.as_ref()))
        .then(move |s, specs| {
            spawn_and_gather(s, specs, Arc::clone(&registry), Arc::clone(&options))
        })
        .then_sync(synthesize_report)
}
