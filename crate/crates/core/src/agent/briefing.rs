//! Daily-briefing steps: three independent simulated fetches that are
//! gathered concurrently, then synthesized.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use crate::async_flow::AsyncFlow;
use crate::error::ErrorInfo;
use crate::flow::Flow;

use super::registry::{news_payload, stocks_payload, weather_payload};
use super::state::AgentState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    News,
    Weather,
    Stocks,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::News, Source::Weather, Source::Stocks];

    pub fn label(self) -> &'static str {
        match self {
            Source::News => "news",
            Source::Weather => "weather",
            Source::Stocks => "stocks",
        }
    }

    fn payload(self, query: &str) -> String {
        match self {
            Source::News => news_payload(query),
            Source::Weather => weather_payload(query),
            Source::Stocks => stocks_payload(query),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Simulated latency and failure switches for the fetch steps.
#[derive(Debug, Clone)]
pub struct BriefingConfig {
    pub latency: Duration,
    pub latency_overrides: HashMap<Source, Duration>,
    pub failing: HashSet<Source>,
}

impl Default for BriefingConfig {
    fn default() -> Self {
        BriefingConfig {
            latency: Duration::from_millis(100),
            latency_overrides: HashMap::new(),
            failing: HashSet::new(),
        }
    }
}

impl BriefingConfig {
    pub fn with_latency(latency: Duration) -> Self {
        BriefingConfig {
            latency,
            ..Self::default()
        }
    }

    pub fn fail(mut self, source: Source) -> Self {
        self.failing.insert(source);
        self
    }

    pub fn latency_for(&self, source: Source) -> Duration {
        self.latency_overrides
            .get(&source)
            .copied()
            .unwrap_or(self.latency)
    }
}

async fn fetch(
    source: Source,
    state: AgentState,
    query: String,
    config: &BriefingConfig,
) -> Flow<AgentState, String> {
    let latency = config.latency_for(source);
    if !latency.is_zero() {
        tokio::time::sleep(latency).await;
    }
    if config.failing.contains(&source) {
        let message =
            format!("fetch_{source} failed: {source} service unavailable (injected failure)");
        let next = state.with_history(format!("Fetch error ({source}): {message}"));
        return Flow::failure(next, ErrorInfo::tool_execution(message));
    }
    let payload = source.payload(&query);
    let next = state.with_history(format!("Fetched {source}: {payload}"));
    Flow::success(next, payload)
}

pub async fn async_fetch_news(
    state: AgentState,
    query: String,
    config: &BriefingConfig,
) -> Flow<AgentState, String> {
    fetch(Source::News, state, query, config).await
}

pub async fn async_fetch_weather(
    state: AgentState,
    query: String,
    config: &BriefingConfig,
) -> Flow<AgentState, String> {
    fetch(Source::Weather, state, query, config).await
}

pub async fn async_fetch_stocks(
    state: AgentState,
    query: String,
    config: &BriefingConfig,
) -> Flow<AgentState, String> {
    fetch(Source::Stocks, state, query, config).await
}

pub async fn async_synthesize_briefing(
    state: AgentState,
    values: Vec<String>,
) -> Flow<AgentState, String> {
    let mut briefing = String::from("Daily Briefing");
    for section in &values {
        briefing.push('\n');
        briefing.push_str(section);
    }
    Flow::success(state.with_history("Synthesized daily briefing."), briefing)
}

fn fetch_flow(
    source: Source,
    state: AgentState,
    query: String,
    config: Arc<BriefingConfig>,
) -> AsyncFlow<AgentState, String> {
    AsyncFlow::start_with(state, query).then(move |s, q| {
        let config = Arc::clone(&config);
        async move { fetch(source, s, q, &config).await }
    })
}

/// news, weather and stocks fetched concurrently, then synthesized. Branch
/// histories are merged with [`AgentState::merge_branches`].
pub fn daily_briefing(
    state: AgentState,
    query: impl Into<String>,
    config: BriefingConfig,
) -> AsyncFlow<AgentState, String> {
    let query = query.into();
    let config = Arc::new(config);
    let tasks = Source::ALL
        .iter()
        .map(|&source| fetch_flow(source, state.clone(), query.clone(), Arc::clone(&config)))
        .collect();
    AsyncFlow::gather(tasks, Some(AgentState::merge_branches())).then(async_synthesize_briefing)
}
