//! The synchronous flow container.
//!
//! A [`Flow`] pairs the threaded state with exactly one of a value (success
//! track) or an [`ErrorInfo`] (failure track). Every combinator consumes its
//! input and returns a new flow; a failed flow passes through `map`, `apply`
//! and `then` untouched, and the step it would have fed is never called.
//!
//! Steps that panic are contained: the panic is caught and turned into a
//! `StepFault` failure carrying the state the step was given. This relies on
//! the default `panic = "unwind"` strategy.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};

use thiserror::Error;

use crate::error::ErrorInfo;
use crate::instrument;

/// Returned by value-demanding accessors on a failed flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("Flow has no value.")]
pub struct ValueAbsent;

#[derive(Debug, Clone, PartialEq)]
enum Track<V> {
    Success(V),
    Failure(ErrorInfo),
}

#[derive(Clone, PartialEq)]
pub struct Flow<S, V> {
    state: S,
    track: Track<V>,
}

/// Borrowed projection of every field of a flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowView<'a, S, V> {
    pub is_successful: bool,
    pub state: &'a S,
    pub value: Option<&'a V>,
    pub error_info: Option<&'a ErrorInfo>,
}

impl<S: Clone> Flow<S, S> {
    /// Starts a flow whose value is the state itself.
    pub fn start(state: S) -> Self {
        let value = state.clone();
        Flow::success(state, value)
    }
}

impl<S, V> Flow<S, V> {
    /// Starts a flow with an explicit initial value.
    pub fn start_with(state: S, value: V) -> Self {
        Flow::success(state, value)
    }

    pub fn success(state: S, value: V) -> Self {
        Flow {
            state,
            track: Track::Success(value),
        }
    }

    pub fn failure(state: S, error: ErrorInfo) -> Self {
        Flow {
            state,
            track: Track::Failure(error),
        }
    }

    pub fn is_successful(&self) -> bool {
        matches!(self.track, Track::Success(_))
    }

    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn value(&self) -> Option<&V> {
        match &self.track {
            Track::Success(v) => Some(v),
            Track::Failure(_) => None,
        }
    }

    pub fn error_info(&self) -> Option<&ErrorInfo> {
        match &self.track {
            Track::Success(_) => None,
            Track::Failure(e) => Some(e),
        }
    }

    pub fn require_value(&self) -> Result<&V, ValueAbsent> {
        self.value().ok_or(ValueAbsent)
    }

    pub fn into_value(self) -> Result<V, ValueAbsent> {
        match self.track {
            Track::Success(v) => Ok(v),
            Track::Failure(_) => Err(ValueAbsent),
        }
    }

    pub fn inspect(&self) -> FlowView<'_, S, V> {
        FlowView {
            is_successful: self.is_successful(),
            state: &self.state,
            value: self.value(),
            error_info: self.error_info(),
        }
    }

    pub fn into_state(self) -> S {
        self.state
    }

    /// Splits the flow into its state and its track.
    pub fn into_parts(self) -> (S, Result<V, ErrorInfo>) {
        let outcome = match self.track {
            Track::Success(v) => Ok(v),
            Track::Failure(e) => Err(e),
        };
        (self.state, outcome)
    }

    /// Applies a pure function to the value. A panic in `f` becomes a
    /// `StepFault` failure with the unchanged state.
    pub fn map<R, F>(self, f: F) -> Flow<S, R>
    where
        F: FnOnce(V) -> R,
    {
        match self.track {
            Track::Failure(e) => Flow::failure(self.state, e),
            Track::Success(v) => match panic::catch_unwind(AssertUnwindSafe(move || f(v))) {
                Ok(r) => Flow::success(self.state, r),
                Err(payload) => Flow::failure(self.state, ErrorInfo::from_panic(payload)),
            },
        }
    }

    /// Applies a wrapped function to this flow's value.
    ///
    /// If either side failed the result fails with the first failure,
    /// checking `self` before `func_flow`. The resulting state is always
    /// `self`'s state; `func_flow`'s state is discarded.
    pub fn apply<R, F>(self, func_flow: Flow<S, F>) -> Flow<S, R>
    where
        F: FnOnce(V) -> R,
    {
        match (self.track, func_flow.track) {
            (Track::Failure(e), _) => Flow::failure(self.state, e),
            (Track::Success(_), Track::Failure(e)) => Flow::failure(self.state, e),
            (Track::Success(v), Track::Success(f)) => Flow::success(self.state, v).map(f),
        }
    }

    /// Monadic bind. On failure the step is skipped and the failure is
    /// rebuilt with the same state and error. On success the step receives
    /// the state and value; if it panics the result is a `StepFault` failure
    /// carrying the pre-step state.
    pub fn then<R, F>(self, step: F) -> Flow<S, R>
    where
        S: Clone,
        F: FnOnce(S, V) -> Flow<S, R>,
    {
        instrument::record_sync_then();
        match self.track {
            Track::Failure(e) => Flow::failure(self.state, e),
            Track::Success(v) => {
                let pre_step = self.state.clone();
                let state = self.state;
                match panic::catch_unwind(AssertUnwindSafe(move || step(state, v))) {
                    Ok(next) => next,
                    Err(payload) => Flow::failure(pre_step, ErrorInfo::from_panic(payload)),
                }
            }
        }
    }

    /// Like [`then`](Self::then) for steps that report faults through
    /// `Result`. An `Err` becomes a `StepFault` failure with the pre-step
    /// state.
    pub fn try_then<R, E, F>(self, step: F) -> Flow<S, R>
    where
        S: Clone,
        E: fmt::Display,
        F: FnOnce(S, V) -> Result<Flow<S, R>, E>,
    {
        self.then(move |state: S, value| {
            let pre_step = state.clone();
            match step(state, value) {
                Ok(next) => next,
                Err(e) => Flow::failure(pre_step, ErrorInfo::step_fault(e.to_string())),
            }
        })
    }
}

impl<S: fmt::Debug, V: fmt::Debug> fmt::Debug for Flow<S, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.track {
            Track::Success(v) => f
                .debug_struct("Success")
                .field("state", &self.state)
                .field("value", v)
                .finish(),
            Track::Failure(e) => f
                .debug_struct("Failure")
                .field("state", &self.state)
                .field("error", e)
                .finish(),
        }
    }
}
