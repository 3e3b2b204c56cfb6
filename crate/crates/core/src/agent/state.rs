use serde::{Deserialize, Serialize};

use crate::async_flow::MergeStrategy;

/// The agent's memory: the task it is working on and an append-only log of
/// thoughts, actions and observations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentState {
    pub task: String,
    history: Vec<String>,
}

impl AgentState {
    pub fn new(task: impl Into<String>) -> Self {
        AgentState {
            task: task.into(),
            history: Vec::new(),
        }
    }

    /// Returns a copy with `entry` appended to the history.
    pub fn with_history(&self, entry: impl Into<String>) -> Self {
        let mut history = Vec::with_capacity(self.history.len() + 1);
        history.extend_from_slice(&self.history);
        history.push(entry.into());
        AgentState {
            task: self.task.clone(),
            history,
        }
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    /// Merge strategy for gather groups forked from a common state: keeps
    /// the shared prefix once, then appends each branch's new entries in
    /// input order. The task is taken from the first branch.
    pub fn merge_branches() -> MergeStrategy<AgentState> {
        MergeStrategy::new(|states: Vec<AgentState>| {
            let Some(first) = states.first() else {
                return AgentState::default();
            };
            let shared = states
                .iter()
                .map(|s| common_prefix_len(&first.history, &s.history))
                .min()
                .unwrap_or(0);
            let mut history = first.history[..shared].to_vec();
            for branch in &states {
                history.extend_from_slice(&branch.history[shared..]);
            }
            AgentState {
                task: first.task.clone(),
                history,
            }
        })
    }
}

fn common_prefix_len(a: &[String], b: &[String]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}
