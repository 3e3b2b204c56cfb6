//! Scenario runner behind the `agentflow` binary.
//!
//! Each scenario builds its flow, runs it on a tokio runtime, prints a
//! human-readable result and optionally writes a JSON-lines trace: one
//! `{"seq","entry"}` line per history entry of the final state, then a
//! `{"status","error","wall_ms"}` footer.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::agent::{
    daily_briefing, default_registry, research_pipeline, AgentState, BriefingConfig,
    MockModelClient, Source,
};
use crate::flow::Flow;
use crate::meta::{orchestrate, PipelineKind, SubAgentOptions};

pub const DEFAULT_TASK: &str = "What is a Monad?";
pub const DEFAULT_GOAL: &str = "Produce a market research report";
pub const DEFAULT_BRIEFING_QUERY: &str = "morning briefing";

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FLOW_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Research,
    Briefing,
    Meta,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Research => "research",
            Scenario::Briefing => "briefing",
            Scenario::Meta => "meta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InjectedFailure {
    GuessTool,
    Weather,
    DataAgent,
}

impl InjectedFailure {
    fn scenario(self) -> Scenario {
        match self {
            InjectedFailure::GuessTool => Scenario::Research,
            InjectedFailure::Weather => Scenario::Briefing,
            InjectedFailure::DataAgent => Scenario::Meta,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "agentflow",
    about = "Run a bundled agent scenario with deterministic mocks"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub scenario: Scenario,
    /// Failure to inject; must match the scenario.
    #[arg(long, value_enum)]
    pub inject_failure: Option<InjectedFailure>,
    /// Simulated delay per fetch or sub-agent step, in milliseconds.
    #[arg(long, default_value_t = 100)]
    pub latency_ms: u64,
    /// Write a JSON-lines trace to this path.
    #[arg(long = "trace")]
    pub trace_path: Option<PathBuf>,
    /// Goal for the meta scenario.
    #[arg(long)]
    pub goal: Option<String>,
    /// Task for the research scenario, or query for the briefing scenario.
    #[arg(long)]
    pub task: Option<String>,
    /// Reserved for randomized harnesses.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(scenario: Scenario) -> Self {
        RunConfig {
            scenario,
            inject_failure: None,
            latency_ms: 100,
            trace_path: None,
            goal: None,
            task: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self.inject_failure {
            Some(failure) if failure.scenario() != self.scenario => {
                Err(CliError::FailureMismatch {
                    failure: failure
                        .to_possible_value()
                        .map(|v| v.get_name().to_string())
                        .unwrap_or_default(),
                    scenario: self.scenario,
                })
            }
            _ => Ok(()),
        }
    }

    fn latency(&self) -> Duration {
        Duration::from_millis(self.latency_ms)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("--inject-failure {failure} does not apply to the {} scenario", scenario.as_str())]
    FailureMismatch { failure: String, scenario: Scenario },
    #[error("cannot write trace to {path}: {source}")]
    Trace { path: PathBuf, source: io::Error },
    #[error("cannot start async runtime: {0}")]
    Runtime(io::Error),
}

/// Everything a scenario run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioReport {
    pub success: bool,
    pub stdout: String,
    pub stderr: String,
    pub history: Vec<String>,
    pub error: Option<String>,
    pub wall_ms: u64,
}

impl ScenarioReport {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            EXIT_SUCCESS
        } else {
            EXIT_FLOW_FAILURE
        }
    }

    /// The trace file contents, newline-terminated.
    pub fn trace(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            seq: usize,
            entry: &'a str,
        }
        #[derive(Serialize)]
        struct Footer<'a> {
            status: &'a str,
            error: Option<&'a str>,
            wall_ms: u64,
        }
        let mut out = String::new();
        for (i, entry) in self.history.iter().enumerate() {
            let line = Line { seq: i + 1, entry };
            out.push_str(&serde_json::to_string(&line).expect("trace line serializes"));
            out.push('\n');
        }
        let footer = Footer {
            status: if self.success { "success" } else { "failure" },
            error: self.error.as_deref(),
            wall_ms: self.wall_ms,
        };
        out.push_str(&serde_json::to_string(&footer).expect("trace footer serializes"));
        out.push('\n');
        out
    }

    pub fn write_trace(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.trace()).map_err(|source| CliError::Trace {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn finish<S, F>(flow: Flow<S, String>, history: F, wall: Duration) -> ScenarioReport
where
    F: FnOnce(&S) -> Vec<String>,
{
    let history = history(flow.state());
    let wall_ms = wall.as_millis() as u64;
    match flow.into_parts() {
        (_, Ok(text)) => ScenarioReport {
            success: true,
            stdout: format!("{text}\n"),
            stderr: String::new(),
            history,
            error: None,
            wall_ms,
        },
        (_, Err(error)) => ScenarioReport {
            success: false,
            stdout: String::new(),
            stderr: format!("error [{}]: {}\n", error.kind(), error.message()),
            history,
            error: Some(error.message().to_string()),
            wall_ms,
        },
    }
}

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_time()
        .build()
        .map_err(CliError::Runtime)
}

pub fn run_research(config: &RunConfig) -> ScenarioReport {
    let task = config.task.as_deref().unwrap_or(DEFAULT_TASK);
    let client = match config.inject_failure {
        Some(InjectedFailure::GuessTool) => MockModelClient::new().with_tool_override("guess"),
        _ => MockModelClient::new(),
    };
    let registry = default_registry();
    let started = Instant::now();
    let flow = research_pipeline(task, &client, &registry);
    finish(
        flow,
        |s: &AgentState| s.history().to_vec(),
        started.elapsed(),
    )
}

pub fn run_briefing(config: &RunConfig) -> Result<ScenarioReport, CliError> {
    let query = config
        .task
        .clone()
        .unwrap_or_else(|| DEFAULT_BRIEFING_QUERY.to_string());
    let mut briefing = BriefingConfig::with_latency(config.latency());
    if config.inject_failure == Some(InjectedFailure::Weather) {
        briefing = briefing.fail(Source::Weather);
    }
    let pipeline = daily_briefing(AgentState::new(query.as_str()), query, briefing);
    let rt = runtime()?;
    let started = Instant::now();
    let flow = rt.block_on(pipeline.run());
    let wall = started.elapsed();
    Ok(finish(flow, |s: &AgentState| s.history().to_vec(), wall))
}

pub fn run_meta(config: &RunConfig) -> Result<ScenarioReport, CliError> {
    let goal = config
        .goal
        .clone()
        .unwrap_or_else(|| DEFAULT_GOAL.to_string());
    let mut options = SubAgentOptions::with_delay(config.latency());
    if config.inject_failure == Some(InjectedFailure::DataAgent) {
        options = options.fail(PipelineKind::Data);
    }
    let pipeline = orchestrate(
        goal,
        Arc::new(MockModelClient::new()),
        Arc::new(default_registry()),
        options,
    );
    let rt = runtime()?;
    let started = Instant::now();
    let flow = rt.block_on(pipeline.run());
    let wall = started.elapsed();
    let sub_logs: Vec<String> = flow
        .state()
        .log
        .iter()
        .filter(|e| e.contains(" log: "))
        .cloned()
        .collect();
    let mut report = finish(flow, |s| s.log.clone(), wall);
    if report.success && !sub_logs.is_empty() {
        report.stdout.push_str("\nSub-agent logs:\n");
        for line in sub_logs {
            let _ = writeln!(report.stdout, "  {line}");
        }
    }
    Ok(report)
}

/// Validates `config`, runs its scenario, and writes the trace if asked.
pub fn execute(config: &RunConfig) -> Result<ScenarioReport, CliError> {
    config.validate()?;
    let report = match config.scenario {
        Scenario::Research => run_research(config),
        Scenario::Briefing => run_briefing(config)?,
        Scenario::Meta => run_meta(config)?,
    };
    if let Some(path) = &config.trace_path {
        report.write_trace(path)?;
    }
    Ok(report)
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_CONFIG_ERROR
            } else {
                EXIT_SUCCESS
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(report) => {
            print!("{}", report.stdout);
            eprint!("{}", report.stderr);
            report.exit_code()
        }
        Err(e) => {
            eprintln!("agentflow: {e}");
            EXIT_CONFIG_ERROR
        }
    }
}
